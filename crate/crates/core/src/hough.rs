//! Progressive probabilistic Hough transform for line segment extraction.
//!
//! Random point selection is driven by a fixed-seed RNG so identical edge
//! maps always produce identical segments.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geom::{pt, LineSegment2D};
use crate::img::Image;

const THETA_BINS: usize = 180; // 1 degree resolution
const RNG_SEED: u64 = 0x5eed_11e5;

/// A line segment found by the Hough transform, with the number of edge
/// pixels claimed as its support.
#[derive(Debug, Clone, Copy)]
pub struct HoughSegment {
    pub p1: (f64, f64),
    pub p2: (f64, f64),
    pub support: usize,
}

impl HoughSegment {
    pub fn seg(&self) -> LineSegment2D {
        LineSegment2D::new(pt(self.p1.0, self.p1.1), pt(self.p2.0, self.p2.1))
    }
}

/// Extract line segments from a binary edge map.
///
/// Each returned segment is at least `min_length` pixels long, bridges
/// collinear gaps of at most `max_gap` pixels, and claims at least
/// `vote_thresh` supporting edge pixels.
pub fn hough_segments(
    edges: &Image,
    min_length: f64,
    max_gap: u32,
    vote_thresh: u32,
) -> Vec<HoughSegment> {
    assert_eq!(edges.channels(), 1, "expected a binary edge map");
    let (w, h) = (edges.width() as i64, edges.height() as i64);
    let diag = ((w * w + h * h) as f64).sqrt().ceil() as i64;
    let rho_bins = (2 * diag + 1) as usize;

    let mut points: Vec<(i64, i64)> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if edges.get(x as u32, y as u32, 0) != 0 {
                points.push((x, y));
            }
        }
    }
    if points.is_empty() {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(RNG_SEED);
    points.shuffle(&mut rng);

    // Precompute the trig table once.
    let trig: Vec<(f64, f64)> = (0..THETA_BINS)
        .map(|t| {
            let rad = (t as f64).to_radians();
            (rad.cos(), rad.sin())
        })
        .collect();

    let mut acc = vec![0i32; THETA_BINS * rho_bins];
    let mut available = vec![true; (w * h) as usize];
    let mut voted = vec![false; (w * h) as usize];
    for &(x, y) in &points {
        available[(y * w + x) as usize] = true;
    }

    let mut out = Vec::new();
    for &(x, y) in &points {
        let idx = (y * w + x) as usize;
        if !available[idx] {
            continue;
        }
        // Vote.
        voted[idx] = true;
        let mut best_t = 0usize;
        let mut best_v = 0i32;
        for (t, &(c, s)) in trig.iter().enumerate() {
            let rho = (x as f64 * c + y as f64 * s).round() as i64 + diag;
            let a = &mut acc[t * rho_bins + rho as usize];
            *a += 1;
            if *a > best_v {
                best_v = *a;
                best_t = t;
            }
        }
        if best_v < vote_thresh as i32 {
            continue;
        }

        // Walk the corridor in both directions along the line of angle best_t.
        let (c, s) = trig[best_t];
        let dir = (-s, c);
        let fwd = walk(edges, &available, (x, y), dir, max_gap);
        let bwd = walk(edges, &available, (x, y), (-dir.0, -dir.1), max_gap);
        let e1 = fwd.last().copied().unwrap_or((x, y));
        let e2 = bwd.last().copied().unwrap_or((x, y));
        let len = (((e1.0 - e2.0).pow(2) + (e1.1 - e2.1).pow(2)) as f64).sqrt();

        let mut support: Vec<(i64, i64)> = Vec::with_capacity(fwd.len() + bwd.len() + 1);
        support.push((x, y));
        support.extend(fwd);
        support.extend(bwd);

        if len >= min_length && support.len() >= vote_thresh as usize {
            out.push(HoughSegment {
                p1: (e1.0 as f64, e1.1 as f64),
                p2: (e2.0 as f64, e2.1 as f64),
                support: support.len(),
            });
        }
        // Whether emitted or not, release the walked pixels so a dominant
        // line cannot be re-extracted, and cancel their votes.
        for (px, py) in support {
            let pidx = (py * w + px) as usize;
            if !available[pidx] {
                continue;
            }
            available[pidx] = false;
            if voted[pidx] {
                for (t, &(tc, ts)) in trig.iter().enumerate() {
                    let rho = (px as f64 * tc + py as f64 * ts).round() as i64 + diag;
                    acc[t * rho_bins + rho as usize] -= 1;
                }
                voted[pidx] = false;
            }
        }
        available[idx] = false;
    }
    out
}

/// Step along `dir` from `start`, collecting available edge pixels within a
/// 1-px corridor, tolerating up to `max_gap` consecutive misses.
fn walk(
    edges: &Image,
    available: &[bool],
    start: (i64, i64),
    dir: (f64, f64),
    max_gap: u32,
) -> Vec<(i64, i64)> {
    let w = edges.width() as i64;
    let mut hits = Vec::new();
    let mut gap = 0u32;
    let x_major = dir.0.abs() >= dir.1.abs();
    let (step, slope) = if x_major {
        (dir.0.signum(), dir.1 / dir.0.abs())
    } else {
        (dir.1.signum(), dir.0 / dir.1.abs())
    };
    let mut t = 1i64;
    loop {
        let (ix, iy) = if x_major {
            (
                start.0 + step as i64 * t,
                start.1 + (slope * t as f64).round() as i64,
            )
        } else {
            (
                start.0 + (slope * t as f64).round() as i64,
                start.1 + step as i64 * t,
            )
        };
        if !edges.in_bounds(ix, iy) {
            break;
        }
        let mut found = None;
        for off in [0i64, -1, 1] {
            let (cx, cy) = if x_major { (ix, iy + off) } else { (ix + off, iy) };
            if edges.in_bounds(cx, cy)
                && edges.get(cx as u32, cy as u32, 0) != 0
                && available[(cy * w + cx) as usize]
            {
                found = Some((cx, cy));
                break;
            }
        }
        match found {
            Some(p) => {
                hits.push(p);
                gap = 0;
            }
            None => {
                gap += 1;
                if gap > max_gap {
                    break;
                }
            }
        }
        t += 1;
    }
    // Trim trailing positions past the final hit (the gap run).
    hits
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_edge_map_yields_nothing() {
        let img = Image::filled(64, 64, 1, 0);
        assert!(hough_segments(&img, 10.0, 2, 10).is_empty());
    }

    #[test]
    fn single_long_line_extracted_once() {
        let mut img = Image::filled(256, 64, 1, 0);
        for x in 20..220 {
            img.set(x, 30, 0, 255);
        }
        let segs = hough_segments(&img, 50.0, 2, 20);
        assert_eq!(segs.len(), 1, "got {segs:?}");

        // Least-squares oracle over the edge pixels: the line y = 30 from
        // x = 20 to x = 219; endpoints must agree within 2 px.
        let s = &segs[0];
        let (lo, hi) = if s.p1.0 < s.p2.0 { (s.p1, s.p2) } else { (s.p2, s.p1) };
        assert!((lo.0 - 20.0).abs() <= 2.0, "left endpoint {lo:?}");
        assert!((hi.0 - 219.0).abs() <= 2.0, "right endpoint {hi:?}");
        assert!((lo.1 - 30.0).abs() <= 2.0 && (hi.1 - 30.0).abs() <= 2.0);
    }

    #[test]
    fn diagonal_line_recovered() {
        let mut img = Image::filled(128, 128, 1, 0);
        for t in 0..90 {
            img.set(20 + t, 15 + t, 0, 255);
        }
        let segs = hough_segments(&img, 40.0, 2, 20);
        assert_eq!(segs.len(), 1);
        let s = segs[0].seg();
        assert!((s.length() - 90.0 * 2f64.sqrt()).abs() < 8.0);
        let ang = s.angle_diff_deg(&LineSegment2D::new(pt(0.0, 0.0), pt(1.0, 1.0)));
        assert!(ang < 3.0, "angle off by {ang}");
    }

    #[test]
    fn circle_produces_only_short_chords() {
        let mut img = Image::filled(128, 128, 1, 0);
        let (cx, cy, r) = (64.0, 64.0, 40.0);
        // Dense circle rasterization.
        for i in 0..2000 {
            let a = i as f64 / 2000.0 * std::f64::consts::TAU;
            let x = (cx + r * a.cos()).round() as i64;
            let y = (cy + r * a.sin()).round() as i64;
            if img.in_bounds(x, y) {
                img.set(x as u32, y as u32, 0, 255);
            }
        }
        let segs = hough_segments(&img, 10.0, 2, 10);
        assert!(!segs.is_empty());
        // Chord-length bound: a chord staying within sagitta tolerance d of
        // the arc satisfies L <= sqrt(8 R d). The corridor is 1 px wide and
        // quantization adds ~2 px, so d = 3 px gives L <= sqrt(960) ~ 31 px.
        for s in &segs {
            let len = s.seg().length();
            assert!(len <= 31.0 + 2.0, "chord of length {len} exceeds bound");
        }
    }

    #[test]
    fn support_never_below_vote_threshold() {
        let mut img = Image::filled(128, 128, 1, 0);
        for x in 10..100 {
            img.set(x, 40, 0, 255);
            img.set(x, 80, 0, 255);
        }
        for s in hough_segments(&img, 20.0, 2, 25) {
            assert!(s.support >= 25);
        }
    }

    #[test]
    fn deterministic_across_runs() {
        let mut img = Image::filled(96, 96, 1, 0);
        for t in 0..60 {
            img.set(10 + t, 20, 0, 255);
            img.set(30, 20 + t / 2, 0, 255);
        }
        let a = hough_segments(&img, 15.0, 2, 12);
        let b = hough_segments(&img, 15.0, 2, 12);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.p1, y.p1);
            assert_eq!(x.p2, y.p2);
        }
    }
}
