//! Image buffers, HSV conversion and color segmentation.
//!
//! Images are row-major 8-bit buffers with 1 or 3 interleaved channels.
//! Hue is stored in a single byte: `h_byte = round(h_deg * 255 / 360)`,
//! so one hue step is 360/255 ~ 1.41 degrees. Saturation and value map
//! [0,1] onto [0,255].

use serde::{Deserialize, Serialize};

use crate::error::{Result, VisionError};

/// Scale factor from hue degrees to the stored byte.
pub const HUE_BYTE_PER_DEG: f64 = 255.0 / 360.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: u32,
    height: u32,
    channels: u8,
    data: Vec<u8>,
}

impl Image {
    pub fn new(width: u32, height: u32, channels: u8, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(VisionError::InvalidImage(format!(
                "zero dimension {width}x{height}"
            )));
        }
        if channels != 1 && channels != 3 {
            return Err(VisionError::InvalidImage(format!(
                "unsupported channel count {channels}"
            )));
        }
        let expected = width as usize * height as usize * channels as usize;
        if data.len() != expected {
            return Err(VisionError::InvalidImage(format!(
                "data length {} does not match {width}x{height}x{channels} = {expected}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    pub fn filled(width: u32, height: u32, channels: u8, value: u8) -> Self {
        Self::new(
            width,
            height,
            channels,
            vec![value; width as usize * height as usize * channels as usize],
        )
        .expect("valid dimensions")
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn channels(&self) -> u8 {
        self.channels
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn in_bounds(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as u32) < self.width && (y as u32) < self.height
    }

    #[inline]
    fn offset(&self, x: u32, y: u32) -> usize {
        (y as usize * self.width as usize + x as usize) * self.channels as usize
    }

    /// Sample of all channels at (x, y).
    #[inline]
    pub fn pixel(&self, x: u32, y: u32) -> &[u8] {
        let o = self.offset(x, y);
        &self.data[o..o + self.channels as usize]
    }

    #[inline]
    pub fn set_pixel(&mut self, x: u32, y: u32, px: &[u8]) {
        let o = self.offset(x, y);
        self.data[o..o + self.channels as usize].copy_from_slice(px);
    }

    /// Single-channel accessor; channel 0 for gray images.
    #[inline]
    pub fn get(&self, x: u32, y: u32, ch: u8) -> u8 {
        self.data[self.offset(x, y) + ch as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, ch: u8, v: u8) {
        let o = self.offset(x, y) + ch as usize;
        self.data[o] = v;
    }

    /// Extract one channel as a new single-channel image.
    pub fn channel(&self, ch: u8) -> Image {
        assert!(ch < self.channels);
        let mut out = Vec::with_capacity(self.width as usize * self.height as usize);
        let c = self.channels as usize;
        for px in self.data.chunks_exact(c) {
            out.push(px[ch as usize]);
        }
        Image::new(self.width, self.height, 1, out).unwrap()
    }
}

/// HSV interval; hue in degrees [0, 360) with wraparound (`h_min > h_max`
/// means the interval crosses 0), saturation and value in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColorRange {
    pub h_min: f64,
    pub h_max: f64,
    pub s_min: f64,
    pub s_max: f64,
    pub v_min: f64,
    pub v_max: f64,
}

impl ColorRange {
    pub fn validate(&self, key: &str) -> Result<()> {
        let in01 = |v: f64| (0.0..=1.0).contains(&v);
        if !(0.0..360.0).contains(&self.h_min) || !(0.0..360.0).contains(&self.h_max) {
            return Err(VisionError::Config {
                key: key.to_string(),
                message: "hue bounds must lie in [0, 360)".to_string(),
            });
        }
        if !in01(self.s_min) || !in01(self.s_max) || self.s_min > self.s_max {
            return Err(VisionError::Config {
                key: key.to_string(),
                message: "saturation bounds must satisfy 0 <= s_min <= s_max <= 1".to_string(),
            });
        }
        if !in01(self.v_min) || !in01(self.v_max) || self.v_min > self.v_max {
            return Err(VisionError::Config {
                key: key.to_string(),
                message: "value bounds must satisfy 0 <= v_min <= v_max <= 1".to_string(),
            });
        }
        Ok(())
    }

    /// Membership test on stored HSV bytes.
    #[inline]
    pub fn contains_bytes(&self, h: u8, s: u8, v: u8) -> bool {
        let h_lo = (self.h_min * HUE_BYTE_PER_DEG).round() as u8;
        let h_hi = (self.h_max * HUE_BYTE_PER_DEG).round() as u8;
        let hue_ok = if h_lo <= h_hi {
            h >= h_lo && h <= h_hi
        } else {
            // Interval crosses 0 degrees.
            h >= h_lo || h <= h_hi
        };
        hue_ok
            && s >= (self.s_min * 255.0).round() as u8
            && s <= (self.s_max * 255.0).round() as u8
            && v >= (self.v_min * 255.0).round() as u8
            && v <= (self.v_max * 255.0).round() as u8
    }
}

/// Convert one RGB triple to stored HSV bytes.
#[inline]
pub fn rgb_to_hsv_px(r: u8, g: u8, b: u8) -> (u8, u8, u8) {
    let rf = r as f64 / 255.0;
    let gf = g as f64 / 255.0;
    let bf = b as f64 / 255.0;
    let max = rf.max(gf).max(bf);
    let min = rf.min(gf).min(bf);
    let delta = max - min;

    let h_deg = if delta == 0.0 {
        0.0
    } else if max == rf {
        let mut h = 60.0 * ((gf - bf) / delta);
        if h < 0.0 {
            h += 360.0;
        }
        h
    } else if max == gf {
        60.0 * ((bf - rf) / delta + 2.0)
    } else {
        60.0 * ((rf - gf) / delta + 4.0)
    };
    let s = if max == 0.0 { 0.0 } else { delta / max };
    (
        (h_deg * HUE_BYTE_PER_DEG).round() as u8,
        (s * 255.0).round() as u8,
        (max * 255.0).round() as u8,
    )
}

/// Per-pixel RGB to HSV conversion. Rejects non-3-channel input.
pub fn rgb_to_hsv(img: &Image) -> Result<Image> {
    if img.channels() != 3 {
        return Err(VisionError::InvalidImage(format!(
            "rgb_to_hsv expects 3 channels, got {}",
            img.channels()
        )));
    }
    let mut data = Vec::with_capacity(img.data().len());
    for px in img.data().chunks_exact(3) {
        let (h, s, v) = rgb_to_hsv_px(px[0], px[1], px[2]);
        data.extend_from_slice(&[h, s, v]);
    }
    Image::new(img.width(), img.height(), 3, data)
}

/// Binarize an HSV image against a color range: 255 where all three channels
/// fall inside, 0 elsewhere.
pub fn segment_color(hsv: &Image, range: &ColorRange) -> Result<Image> {
    if hsv.channels() != 3 {
        return Err(VisionError::InvalidImage(
            "segment_color expects a 3-channel HSV image".to_string(),
        ));
    }
    let mut data = Vec::with_capacity(hsv.data().len() / 3);
    for px in hsv.data().chunks_exact(3) {
        data.push(if range.contains_bytes(px[0], px[1], px[2]) {
            255
        } else {
            0
        });
    }
    Image::new(hsv.width(), hsv.height(), 1, data)
}

/// Binary erosion with a (2r+1)x(2r+1) square structuring element.
/// Pixels closer than `r` to the border are cleared.
pub fn erode(bin: &Image, r: u32) -> Image {
    assert_eq!(bin.channels(), 1);
    let (w, h) = (bin.width(), bin.height());
    let mut out = Image::filled(w, h, 1, 0);
    let ri = r as i64;
    for y in 0..h as i64 {
        'px: for x in 0..w as i64 {
            for dy in -ri..=ri {
                for dx in -ri..=ri {
                    let (nx, ny) = (x + dx, y + dy);
                    if !bin.in_bounds(nx, ny) || bin.get(nx as u32, ny as u32, 0) == 0 {
                        continue 'px;
                    }
                }
            }
            out.set(x as u32, y as u32, 0, 255);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rgb1x1(r: u8, g: u8, b: u8) -> Image {
        Image::new(1, 1, 3, vec![r, g, b]).unwrap()
    }

    #[test]
    fn pure_red_maps_to_hue_zero() {
        let hsv = rgb_to_hsv(&rgb1x1(255, 0, 0)).unwrap();
        assert_eq!(hsv.pixel(0, 0), &[0, 255, 255]);
    }

    #[test]
    fn gray_is_achromatic() {
        let hsv = rgb_to_hsv(&rgb1x1(128, 128, 128)).unwrap();
        assert_eq!(hsv.pixel(0, 0), &[0, 0, 128]);
    }

    #[test]
    fn hand_evaluated_hsv() {
        // (64,128,192): max = 192 (blue), delta = 128.
        // h = 60 * ((64-128)/128 + 4) = 210 deg -> round(210*255/360) = 149
        // s = 128/192 = 2/3 -> round(2/3*255) = 170, v = 192.
        let hsv = rgb_to_hsv(&rgb1x1(64, 128, 192)).unwrap();
        assert_eq!(hsv.pixel(0, 0), &[149, 170, 192]);
    }

    #[test]
    fn rejects_single_channel_input() {
        let gray = Image::filled(4, 4, 1, 10);
        assert!(rgb_to_hsv(&gray).is_err());
    }

    #[test]
    fn segmentation_full_and_empty() {
        let green = ColorRange {
            h_min: 90.0,
            h_max: 150.0,
            s_min: 0.3,
            s_max: 1.0,
            v_min: 0.1,
            v_max: 1.0,
        };
        let white = ColorRange {
            h_min: 0.0,
            h_max: 359.9,
            s_min: 0.0,
            s_max: 0.2,
            v_min: 0.7,
            v_max: 1.0,
        };
        let img = Image::new(2, 1, 3, vec![0, 200, 30, 10, 190, 40]).unwrap();
        let hsv = rgb_to_hsv(&img).unwrap();
        let on = segment_color(&hsv, &green).unwrap();
        assert!(on.data().iter().all(|&v| v == 255));
        let off = segment_color(&hsv, &white).unwrap();
        assert!(off.data().iter().all(|&v| v == 0));
    }

    #[test]
    fn hue_wraparound() {
        let range = ColorRange {
            h_min: 350.0,
            h_max: 10.0,
            s_min: 0.0,
            s_max: 1.0,
            v_min: 0.0,
            v_max: 1.0,
        };
        let to_byte = |deg: f64| (deg * HUE_BYTE_PER_DEG).round() as u8;
        assert!(range.contains_bytes(to_byte(5.0), 128, 128));
        assert!(range.contains_bytes(to_byte(355.0), 128, 128));
        assert!(!range.contains_bytes(to_byte(180.0), 128, 128));
    }

    #[test]
    fn segmentation_monotone_under_range_growth() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let data: Vec<u8> = (0..16 * 16 * 3).map(|_| rng.gen()).collect();
        let hsv = Image::new(16, 16, 3, data).unwrap();
        let narrow = ColorRange {
            h_min: 40.0,
            h_max: 200.0,
            s_min: 0.2,
            s_max: 0.8,
            v_min: 0.2,
            v_max: 0.8,
        };
        let wide = ColorRange {
            h_min: 20.0,
            h_max: 260.0,
            s_min: 0.1,
            s_max: 0.9,
            v_min: 0.1,
            v_max: 0.9,
        };
        let a = segment_color(&hsv, &narrow).unwrap();
        let b = segment_color(&hsv, &wide).unwrap();
        for (pa, pb) in a.data().iter().zip(b.data()) {
            assert!(*pa == 0 || *pb == 255, "enlarging the range cleared a pixel");
        }
    }

    #[test]
    fn hsv_roundtrip_within_quantization() {
        // Naive inverse of the stored-byte HSV encoding.
        fn hsv_to_rgb(h: u8, s: u8, v: u8) -> (u8, u8, u8) {
            let h_deg = h as f64 / HUE_BYTE_PER_DEG;
            let s = s as f64 / 255.0;
            let v = v as f64 / 255.0;
            let c = v * s;
            let x = c * (1.0 - ((h_deg / 60.0) % 2.0 - 1.0).abs());
            let m = v - c;
            let (r1, g1, b1) = match h_deg as u32 / 60 {
                0 => (c, x, 0.0),
                1 => (x, c, 0.0),
                2 => (0.0, c, x),
                3 => (0.0, x, c),
                4 => (x, 0.0, c),
                _ => (c, 0.0, x),
            };
            (
                ((r1 + m) * 255.0).round() as u8,
                ((g1 + m) * 255.0).round() as u8,
                ((b1 + m) * 255.0).round() as u8,
            )
        }
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let (r, g, b) = (rng.gen::<u8>(), rng.gen::<u8>(), rng.gen::<u8>());
            let (h, s, v) = rgb_to_hsv_px(r, g, b);
            let (r2, g2, b2) = hsv_to_rgb(h, s, v);
            for (orig, back) in [(r, r2), (g, g2), (b, b2)] {
                assert!(
                    (orig as i32 - back as i32).abs() <= 2,
                    "roundtrip ({r},{g},{b}) -> ({r2},{g2},{b2})"
                );
            }
        }
    }

    #[test]
    fn erode_shrinks_square() {
        let mut bin = Image::filled(10, 10, 1, 0);
        for y in 2..8 {
            for x in 2..8 {
                bin.set(x, y, 0, 255);
            }
        }
        let out = erode(&bin, 1);
        let count = out.data().iter().filter(|&&v| v == 255).count();
        assert_eq!(count, 16); // 6x6 eroded by 1 -> 4x4
    }
}
