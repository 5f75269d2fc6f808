//! Shared test corpora.
#![allow(dead_code)]

use std::f64::consts::PI;

use conicsub::convex::is_strictly_convex;
use conicsub::{Point64, Polyline64, Topology};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Strictly convex polygon with random angular gaps and small per-vertex
/// radius jitter around a random ellipse. Candidates that are not strictly
/// convex are redrawn.
pub fn random_convex_polygon(rng: &mut ChaCha8Rng, n: usize) -> Polyline64 {
    loop {
        let gaps: Vec<f64> = (0..n).map(|_| rng.gen_range(0.4..1.6)).collect();
        let total: f64 = gaps.iter().sum();
        let start = rng.gen_range(0.0..2.0 * PI);
        let angles: Vec<f64> = gaps
            .iter()
            .scan(start, |a, g| {
                let cur = *a;
                *a += 2.0 * PI * g / total;
                Some(cur)
            })
            .collect();
        let mean_gap = 2.0 * PI / n as f64;
        let jitter = 0.1 * mean_gap * mean_gap;
        let r0 = rng.gen_range(0.5..3.0);
        let aspect = rng.gen_range(0.5..1.0);
        let (cx, cy) = (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let pts: Vec<Point64> = angles
            .iter()
            .map(|&a| {
                let r = r0 * (1.0 + rng.gen_range(-jitter..jitter));
                Point64::new(cx + r * a.cos(), cy + aspect * r * a.sin())
            })
            .collect();
        if is_strictly_convex(&pts, Topology::Closed) {
            return Polyline64::closed(pts);
        }
    }
}

/// Samples of the superellipse `|x/a|^p + |y/b|^p = 1`, which is convex
/// but not a conic for `p != 2`.
pub fn superellipse(n: usize, a: f64, b: f64, p: f64, phase: f64) -> Polyline64 {
    Polyline64::closed(
        (0..n)
            .map(|k| {
                let t = phase + 2.0 * PI * k as f64 / n as f64;
                let (c, s) = (t.cos(), t.sin());
                Point64::new(a * c.signum() * c.abs().powf(2.0 / p), b * s.signum() * s.abs().powf(2.0 / p))
            })
            .collect(),
    )
}

/// Open S-shaped samples of `y = amp·sin(freq·x)` over one inflection.
pub fn s_shape(n: usize, amp: f64, freq: f64, shift: f64) -> Polyline64 {
    Polyline64::open(
        (0..n)
            .map(|k| {
                let x = -3.0 + 6.0 * k as f64 / (n - 1) as f64 + shift;
                Point64::new(x, amp * (freq * x).sin())
            })
            .collect(),
    )
}

/// Half ellipse sampled at `arc` points closed by `straight` collinear
/// points on the diameter (corners excluded).
pub fn d_shape(arc: usize, straight: usize, a: f64, b: f64) -> Polyline64 {
    let mut pts: Vec<Point64> = (0..arc)
        .map(|k| {
            let t = PI * k as f64 / (arc - 1) as f64;
            Point64::new(a * t.cos(), b * t.sin())
        })
        .collect();
    pts[arc - 1] = Point64::new(-a, 0.0);
    for k in 1..=straight {
        pts.push(Point64::new(-a + 2.0 * a * k as f64 / (straight + 1) as f64, 0.0));
    }
    Polyline64::closed(pts)
}
