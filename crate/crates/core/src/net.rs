//! Deterministic direction nets and seeded random helpers.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal deviate via Box-Muller; avoids pulling in a distribution crate.
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// Uniform unit vector in `dim` dimensions.
pub fn random_unit<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| gaussian(rng));
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}

/// Options controlling how direction nets are built.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NetOptions {
    /// Angular spacing of the planar net, in radians.
    pub angular_spacing: f64,
    /// Number of directions in dimension three and above.
    pub high_dim_count: usize,
    /// Seed for the random nets used in dimension four and above.
    pub seed: u64,
}

impl Default for NetOptions {
    fn default() -> Self {
        Self {
            angular_spacing: 1e-3,
            high_dim_count: 4096,
            seed: 0x6e65_7473,
        }
    }
}

/// A finite set of unit directions together with its covering resolution.
#[derive(Clone, Debug)]
pub struct DirectionNet {
    pub dim: usize,
    pub dirs: Vec<DVector<f64>>,
    /// Approximate angular covering radius of the net.
    pub resolution: f64,
    /// Planar nets are stored in increasing angle order.
    pub angular_order: bool,
}

impl DirectionNet {
    pub fn new(dim: usize, opts: &NetOptions) -> Self {
        match dim {
            1 => Self {
                dim,
                dirs: vec![DVector::from_element(1, 1.0), DVector::from_element(1, -1.0)],
                resolution: 0.0,
                angular_order: false,
            },
            2 => {
                let raw = (2.0 * PI / opts.angular_spacing).ceil() as usize;
                Self::planar(raw.max(8).div_ceil(8) * 8)
            }
            3 => Self::fibonacci(opts.high_dim_count.max(8)),
            _ => Self::random(dim, opts.high_dim_count.max(2 * dim), opts.seed),
        }
    }

    /// `n` equally spaced planar directions starting at angle zero.
    pub fn planar(n: usize) -> Self {
        let dirs = (0..n)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / n as f64;
                DVector::from_vec(vec![a.cos(), a.sin()])
            })
            .collect();
        Self {
            dim: 2,
            dirs,
            resolution: PI / n as f64,
            angular_order: true,
        }
    }

    pub fn fibonacci(n: usize) -> Self {
        let golden = PI * (3.0 - 5f64.sqrt());
        let dirs = (0..n)
            .map(|k| {
                let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
                let r = (1.0 - z * z).sqrt();
                let a = golden * k as f64;
                DVector::from_vec(vec![r * a.cos(), r * a.sin(), z])
            })
            .collect();
        Self {
            dim: 3,
            dirs,
            resolution: (4.0 * PI / n as f64).sqrt(),
            angular_order: false,
        }
    }

    /// Seeded Gaussian net; contains each sampled direction and its antipode.
    pub fn random(dim: usize, n: usize, seed: u64) -> Self {
        let mut rng = seeded_rng(seed);
        let mut dirs = Vec::with_capacity(n);
        while dirs.len() < n {
            let u = random_unit(&mut rng, dim);
            dirs.push(-&u);
            dirs.push(u);
        }
        dirs.truncate(n);
        let area = 2.0 * PI.powf(dim as f64 / 2.0) / gamma_half(dim);
        Self {
            dim,
            dirs,
            resolution: (area / n as f64).powf(1.0 / (dim as f64 - 1.0)),
            angular_order: false,
        }
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }
}

/// Gamma(d/2) for positive integer d.
fn gamma_half(d: usize) -> f64 {
    if d % 2 == 0 {
        (1..d / 2).map(|k| k as f64).product()
    } else {
        let mut g = PI.sqrt();
        let mut x = 0.5;
        while x < d as f64 / 2.0 - 0.25 {
            g *= x;
            x += 1.0;
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planar_net_contains_axes() {
        let net = DirectionNet::new(2, &NetOptions::default());
        assert_eq!(net.len() % 8, 0);
        let q = net.len() / 4;
        assert!((net.dirs[q][0]).abs() < 1e-15);
        assert!((net.dirs[q][1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_net_is_deterministic() {
        let a = DirectionNet::random(4, 64, 3);
        let b = DirectionNet::random(4, 64, 3);
        assert_eq!(a.dirs, b.dirs);
        for d in &a.dirs {
            assert!((d.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sphere_area_constant() {
        // surface area of S^2 is 4 pi
        assert!((2.0 * PI.powf(1.5) / gamma_half(3) - 4.0 * PI).abs() < 1e-12);
        assert!((gamma_half(4) - 1.0).abs() < 1e-15);
    }
}
