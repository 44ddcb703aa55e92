//! Deterministic inputs shared by the benchmarks.

use nalgebra::dvector;
use tubekit::{Complex64, Point};

/// `n` points on a golden-angle spiral inside the disk of radius `r`.
pub fn spiral(n: usize, r: f64) -> Vec<Point> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let rho = r * ((k as f64 + 0.5) / n as f64).sqrt();
            let a = golden * k as f64;
            dvector![rho * a.cos(), rho * a.sin()]
        })
        .collect()
}

/// Pairs of points in the tube over the square, with real parts from a spiral.
pub fn tube_pairs(n: usize) -> Vec<(Vec<Complex64>, Vec<Complex64>)> {
    let re = spiral(2 * n, 0.9);
    (0..n)
        .map(|k| {
            let a = &re[2 * k];
            let b = &re[2 * k + 1];
            let s = k as f64 * 0.37;
            (
                vec![Complex64::new(a[0], s.sin()), Complex64::new(a[1], -s)],
                vec![Complex64::new(b[0], 2.0 * s.cos()), Complex64::new(b[1], 0.5 * s)],
            )
        })
        .collect()
}
