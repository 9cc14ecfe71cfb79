//! 8-connected component labeling with contour tracing.

use crate::geom::{pt, Polygon2D};
use crate::img::Image;

/// Integer pixel rectangle, inclusive bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PixelRect {
    pub x_min: u32,
    pub y_min: u32,
    pub x_max: u32,
    pub y_max: u32,
}

impl PixelRect {
    pub fn width(&self) -> u32 {
        self.x_max - self.x_min + 1
    }

    pub fn height(&self) -> u32 {
        self.y_max - self.y_min + 1
    }
}

/// One 8-connected region of set pixels in a binary image.
#[derive(Debug, Clone)]
pub struct ConnectedRegion {
    pub label: u32,
    pub pixel_count: usize,
    pub bounding_box: PixelRect,
    /// Traced outer border, ordered; pixel coordinates.
    pub vertices: Polygon2D,
    /// Max-row pixel of the region (leftmost on ties): (x, y).
    pub lowest_point: (u32, u32),
    pub pixels: Vec<(u32, u32)>,
}

/// Label 8-connected regions of non-zero pixels, dropping regions smaller
/// than `min_area` pixels. Returns an empty list for a blank image.
pub fn connected_components(bin: &Image, min_area: usize) -> Vec<ConnectedRegion> {
    assert_eq!(bin.channels(), 1, "expected a binary image");
    let (w, h) = (bin.width() as i64, bin.height() as i64);
    let mut labels = vec![0u32; (w * h) as usize];
    let mut regions = Vec::new();
    let mut next_label = 1u32;
    let mut stack = Vec::new();

    for sy in 0..h {
        for sx in 0..w {
            let idx = (sy * w + sx) as usize;
            if labels[idx] != 0 || bin.get(sx as u32, sy as u32, 0) == 0 {
                continue;
            }
            let label = next_label;
            next_label += 1;
            let mut pixels = Vec::new();
            stack.push((sx, sy));
            labels[idx] = label;
            while let Some((x, y)) = stack.pop() {
                pixels.push((x as u32, y as u32));
                for dy in -1..=1i64 {
                    for dx in -1..=1i64 {
                        if dx == 0 && dy == 0 {
                            continue;
                        }
                        let (nx, ny) = (x + dx, y + dy);
                        if nx < 0 || ny < 0 || nx >= w || ny >= h {
                            continue;
                        }
                        let nidx = (ny * w + nx) as usize;
                        if labels[nidx] == 0 && bin.get(nx as u32, ny as u32, 0) != 0 {
                            labels[nidx] = label;
                            stack.push((nx, ny));
                        }
                    }
                }
            }
            if pixels.len() < min_area {
                continue;
            }
            regions.push(build_region(label, pixels, bin));
        }
    }
    regions
}

fn build_region(label: u32, pixels: Vec<(u32, u32)>, bin: &Image) -> ConnectedRegion {
    let mut bb = PixelRect {
        x_min: u32::MAX,
        y_min: u32::MAX,
        x_max: 0,
        y_max: 0,
    };
    let mut lowest = (u32::MAX, 0u32);
    for &(x, y) in &pixels {
        bb.x_min = bb.x_min.min(x);
        bb.y_min = bb.y_min.min(y);
        bb.x_max = bb.x_max.max(x);
        bb.y_max = bb.y_max.max(y);
        if y > lowest.1 || (y == lowest.1 && x < lowest.0) {
            lowest = (x, y);
        }
    }
    // Seed the border trace from the topmost-leftmost pixel.
    let start = *pixels
        .iter()
        .min_by_key(|&&(x, y)| (y, x))
        .expect("non-empty region");
    let contour = trace_border(bin, start);
    ConnectedRegion {
        label,
        pixel_count: pixels.len(),
        bounding_box: bb,
        vertices: contour,
        lowest_point: lowest,
        pixels,
    }
}

/// Moore-neighbor border following, clockwise in image coordinates.
/// The start pixel must be the topmost-leftmost pixel of its region.
fn trace_border(bin: &Image, start: (u32, u32)) -> Polygon2D {
    // Neighbor offsets in clockwise order starting at west.
    const OFF: [(i64, i64); 8] = [
        (-1, 0),
        (-1, -1),
        (0, -1),
        (1, -1),
        (1, 0),
        (1, 1),
        (0, 1),
        (-1, 1),
    ];
    let set = |x: i64, y: i64| bin.in_bounds(x, y) && bin.get(x as u32, y as u32, 0) != 0;

    let s = (start.0 as i64, start.1 as i64);
    let mut contour = vec![pt(s.0 as f64, s.1 as f64)];
    // Entered the start pixel "from the west" (its west neighbor is outside
    // the region because start is topmost-leftmost).
    let mut cur = s;
    let mut backtrack = 0usize; // index into OFF pointing at the previous (outside) pixel
    loop {
        let mut found = None;
        for i in 1..=8 {
            let dir = (backtrack + i) % 8;
            let (dx, dy) = OFF[dir];
            let (nx, ny) = (cur.0 + dx, cur.1 + dy);
            if set(nx, ny) {
                found = Some((dir, (nx, ny)));
                break;
            }
        }
        let Some((dir, next)) = found else {
            break; // isolated pixel
        };
        if next == s && cur != s {
            break;
        }
        if next == s && cur == s {
            // Region of one pixel surrounded by itself cannot happen; the
            // found neighbor equals start only via wraparound of a 2-pixel
            // region. Record and stop.
            break;
        }
        contour.push(pt(next.0 as f64, next.1 as f64));
        // New backtrack: the direction pointing back toward the pixel we
        // came from, rotated to restart the clockwise scan just past it.
        backtrack = (dir + 5) % 8;
        cur = next;
        if contour.len() > 4 * (bin.width() as usize + 2) * (bin.height() as usize + 2) {
            break; // safety bound, unreachable for valid masks
        }
    }
    Polygon2D::new(contour)
}
