//! Deterministic synthetic targets for desk-scale experiments and tests.

use std::f64::consts::PI;

use crate::field::RealImage;

/// Dark background with a bright rectangle and a mid-gray disk.
pub fn shapes(n: usize) -> RealImage {
    let nf = n as f64;
    RealImage::from_fn_clamped(n, n, |r, c| {
        let (y, x) = (r as f64 / nf, c as f64 / nf);
        let in_rect = (0.15..0.45).contains(&x) && (0.2..0.75).contains(&y);
        let in_disk = (x - 0.68).powi(2) + (y - 0.5).powi(2) < 0.18f64.powi(2);
        if in_rect {
            0.95
        } else if in_disk {
            0.6
        } else {
            0.08
        }
    })
}

/// Concentric cosine rings about the centre.
pub fn rings(n: usize) -> RealImage {
    let nf = n as f64;
    RealImage::from_fn_clamped(n, n, |r, c| {
        let (y, x) = (r as f64 / nf - 0.5, c as f64 / nf - 0.5);
        let rho = (x * x + y * y).sqrt();
        0.5 + 0.45 * (2.0 * PI * rho * 6.0).cos() * (-rho * 2.0).exp()
    })
}

/// Vertical bars of increasing width over a horizontal ramp.
pub fn bars(n: usize) -> RealImage {
    let nf = n as f64;
    RealImage::from_fn_clamped(n, n, |r, c| {
        let x = c as f64 / nf;
        let y = r as f64 / nf;
        let period = 0.04 + 0.12 * y;
        let on = (x / period).fract() < 0.5;
        if on {
            0.35 + 0.6 * x
        } else {
            0.05
        }
    })
}

/// Smooth sum of Gaussian blobs.
pub fn blobs(n: usize) -> RealImage {
    let nf = n as f64;
    let centres = [(0.3, 0.3, 0.08, 0.9), (0.7, 0.35, 0.12, 0.7), (0.45, 0.7, 0.1, 0.8), (0.8, 0.8, 0.06, 1.0)];
    RealImage::from_fn_clamped(n, n, |r, c| {
        let (y, x) = (r as f64 / nf, c as f64 / nf);
        0.05 + centres
            .iter()
            .map(|&(cx, cy, s, a)| a * (-((x - cx).powi(2) + (y - cy).powi(2)) / (2.0 * s * s)).exp())
            .sum::<f64>()
    })
}

/// Checkerboard of `n/8` blocks with alternating brightness levels.
pub fn checker(n: usize) -> RealImage {
    let block = (n / 8).max(1);
    RealImage::from_fn_clamped(n, n, |r, c| {
        let parity = (r / block + c / block) % 2;
        let level = ((r / block) as f64 + 1.0) / 9.0;
        if parity == 0 {
            0.1
        } else {
            0.3 + 0.7 * level
        }
    })
}

/// The fixed five-image desk set.
pub fn desk_set(n: usize) -> Vec<(&'static str, RealImage)> {
    vec![
        ("shapes", shapes(n)),
        ("rings", rings(n)),
        ("bars", bars(n)),
        ("blobs", blobs(n)),
        ("checker", checker(n)),
    ]
}

/// Bright centred square of side `side` samples on a black background.
pub fn centered_square(n: usize, side: usize) -> RealImage {
    let lo = (n - side) / 2;
    let hi = lo + side;
    RealImage::from_fn_clamped(n, n, |r, c| {
        if (lo..hi).contains(&r) && (lo..hi).contains(&c) {
            1.0
        } else {
            0.0
        }
    })
}
