//! Canny edge detection on single-channel images: Gaussian smoothing, Sobel
//! gradients, non-maximum suppression and hysteresis linking.

use crate::error::{Result, VisionError};
use crate::img::Image;

const GAUSSIAN_SIGMA: f64 = 1.4;
const GAUSSIAN_RADIUS: i64 = 2; // 5x5 kernel

/// Run Canny on a single-channel image. Thresholds are in Sobel gradient
/// magnitude units; `low <= high` is required. Returns a binary edge map.
pub fn canny_edges(channel: &Image, low_thresh: f64, high_thresh: f64) -> Result<Image> {
    if channel.channels() != 1 {
        return Err(VisionError::InvalidImage(
            "canny_edges expects a single-channel image".to_string(),
        ));
    }
    if low_thresh > high_thresh {
        return Err(VisionError::InvalidArgument(format!(
            "canny thresholds out of order: low {low_thresh} > high {high_thresh}"
        )));
    }
    let (w, h) = (channel.width() as usize, channel.height() as usize);
    let blurred = gaussian_blur(channel);
    let (gx, gy) = sobel(&blurred, w, h);
    let mag: Vec<f64> = gx
        .iter()
        .zip(gy.iter())
        .map(|(&x, &y)| x.hypot(y))
        .collect();
    let thin = non_maximum_suppression(&mag, &gx, &gy, w, h);
    Ok(hysteresis(&thin, w, h, low_thresh, high_thresh))
}

fn gaussian_kernel() -> [f64; 5] {
    let mut k = [0.0; 5];
    let mut sum = 0.0;
    for (i, v) in k.iter_mut().enumerate() {
        let x = i as f64 - GAUSSIAN_RADIUS as f64;
        *v = (-x * x / (2.0 * GAUSSIAN_SIGMA * GAUSSIAN_SIGMA)).exp();
        sum += *v;
    }
    for v in &mut k {
        *v /= sum;
    }
    k
}

/// Separable 5x5 Gaussian with clamped borders.
fn gaussian_blur(img: &Image) -> Vec<f64> {
    let (w, h) = (img.width() as i64, img.height() as i64);
    let k = gaussian_kernel();
    let mut tmp = vec![0.0f64; (w * h) as usize];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (i, kv) in k.iter().enumerate() {
                let sx = (x + i as i64 - GAUSSIAN_RADIUS).clamp(0, w - 1);
                acc += kv * img.get(sx as u32, y as u32, 0) as f64;
            }
            tmp[(y * w + x) as usize] = acc;
        }
    }
    let mut out = vec![0.0f64; (w * h) as usize];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (i, kv) in k.iter().enumerate() {
                let sy = (y + i as i64 - GAUSSIAN_RADIUS).clamp(0, h - 1);
                acc += kv * tmp[(sy * w + x) as usize];
            }
            out[(y * w + x) as usize] = acc;
        }
    }
    out
}

fn sobel(src: &[f64], w: usize, h: usize) -> (Vec<f64>, Vec<f64>) {
    let mut gx = vec![0.0f64; w * h];
    let mut gy = vec![0.0f64; w * h];
    let at = |x: i64, y: i64| {
        let cx = x.clamp(0, w as i64 - 1) as usize;
        let cy = y.clamp(0, h as i64 - 1) as usize;
        src[cy * w + cx]
    };
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let idx = (y as usize) * w + x as usize;
            gx[idx] = -at(x - 1, y - 1) + at(x + 1, y - 1) - 2.0 * at(x - 1, y)
                + 2.0 * at(x + 1, y)
                - at(x - 1, y + 1)
                + at(x + 1, y + 1);
            gy[idx] = -at(x - 1, y - 1) - 2.0 * at(x, y - 1) - at(x + 1, y - 1)
                + at(x - 1, y + 1)
                + 2.0 * at(x, y + 1)
                + at(x + 1, y + 1);
        }
    }
    (gx, gy)
}

/// Keep only pixels that are local maxima along their gradient direction,
/// quantized to 4 directions.
fn non_maximum_suppression(mag: &[f64], gx: &[f64], gy: &[f64], w: usize, h: usize) -> Vec<f64> {
    let mut out = vec![0.0f64; w * h];
    for y in 1..h.saturating_sub(1) {
        for x in 1..w.saturating_sub(1) {
            let idx = y * w + x;
            let m = mag[idx];
            if m == 0.0 {
                continue;
            }
            let mut angle = gy[idx].atan2(gx[idx]).to_degrees();
            if angle < 0.0 {
                angle += 180.0;
            }
            let (n1, n2) = if !(22.5..157.5).contains(&angle) {
                (mag[idx - 1], mag[idx + 1])
            } else if angle < 67.5 {
                (mag[idx - w - 1], mag[idx + w + 1])
            } else if angle < 112.5 {
                (mag[idx - w], mag[idx + w])
            } else {
                (mag[idx - w + 1], mag[idx + w - 1])
            };
            if m >= n1 && m >= n2 {
                out[idx] = m;
            }
        }
    }
    out
}

/// Double-threshold hysteresis: strong pixels seed a BFS that pulls in
/// 8-connected weak pixels above the low threshold.
fn hysteresis(thin: &[f64], w: usize, h: usize, low: f64, high: f64) -> Image {
    let mut out = Image::filled(w as u32, h as u32, 1, 0);
    let mut stack = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if thin[y * w + x] >= high && out.get(x as u32, y as u32, 0) == 0 {
                out.set(x as u32, y as u32, 0, 255);
                stack.push((x as i64, y as i64));
                while let Some((cx, cy)) = stack.pop() {
                    for dy in -1..=1i64 {
                        for dx in -1..=1i64 {
                            let (nx, ny) = (cx + dx, cy + dy);
                            if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                                continue;
                            }
                            if out.get(nx as u32, ny as u32, 0) == 0
                                && thin[ny as usize * w + nx as usize] >= low
                            {
                                out.set(nx as u32, ny as u32, 0, 255);
                                stack.push((nx, ny));
                            }
                        }
                    }
                }
            }
        }
    }
    out
}
