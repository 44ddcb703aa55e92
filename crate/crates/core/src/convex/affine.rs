use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Invertible affine map `x ↦ L x + t`. The inverse linear part is cached.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap {
    linear: DMatrix<f64>,
    translation: DVector<f64>,
    inverse: DMatrix<f64>,
}

impl AffineMap {
    pub fn new(linear: DMatrix<f64>, translation: DVector<f64>) -> Result<Self> {
        if !linear.is_square() {
            return Err(Error::InvalidArgument("linear part must be square".into()));
        }
        if linear.nrows() != translation.len() {
            return Err(Error::DimensionMismatch {
                expected: linear.nrows(),
                got: translation.len(),
            });
        }
        if linear.iter().chain(translation.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("affine map has non-finite entries".into()));
        }
        let det = linear.determinant();
        if det == 0.0 || !det.is_finite() {
            return Err(Error::SingularMap);
        }
        let inverse = linear.clone().try_inverse().ok_or(Error::SingularMap)?;
        Ok(Self {
            linear,
            translation,
            inverse,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            linear: DMatrix::identity(dim, dim),
            translation: DVector::zeros(dim),
            inverse: DMatrix::identity(dim, dim),
        }
    }

    /// `x ↦ s (x - center)`.
    pub fn scaling_about(center: &DVector<f64>, s: f64) -> Result<Self> {
        let d = center.len();
        Self::new(DMatrix::identity(d, d) * s, center * (-s))
    }

    pub fn translation_by(t: DVector<f64>) -> Self {
        let d = t.len();
        Self {
            linear: DMatrix::identity(d, d),
            translation: t,
            inverse: DMatrix::identity(d, d),
        }
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn linear(&self) -> &DMatrix<f64> {
        &self.linear
    }

    pub fn translation(&self) -> &DVector<f64> {
        &self.translation
    }

    pub fn linear_inverse(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.linear * x + &self.translation
    }

    pub fn apply_vector(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.linear * v
    }

    pub fn apply_inverse(&self, y: &DVector<f64>) -> DVector<f64> {
        &self.inverse * (y - &self.translation)
    }

    pub fn apply_inverse_vector(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.inverse * v
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        AffineMap {
            linear: &self.linear * &other.linear,
            translation: &self.linear * &other.translation + &self.translation,
            inverse: &other.inverse * &self.inverse,
        }
    }

    pub fn inverse(&self) -> AffineMap {
        AffineMap {
            linear: self.inverse.clone(),
            translation: -(&self.inverse * &self.translation),
            inverse: self.linear.clone(),
        }
    }

    pub fn determinant(&self) -> f64 {
        self.linear.determinant()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_rejected() {
        let l = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert_eq!(
            AffineMap::new(l, DVector::zeros(2)).unwrap_err(),
            Error::SingularMap
        );
    }

    #[test]
    fn compose_and_invert() {
        let a = AffineMap::new(
            DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 3.0]),
            DVector::from_vec(vec![1.0, -1.0]),
        )
        .unwrap();
        let b = AffineMap::scaling_about(&DVector::from_vec(vec![0.5, 0.5]), 4.0).unwrap();
        let x = DVector::from_vec(vec![0.3, -0.7]);
        let ab = a.compose(&b);
        assert!((ab.apply(&x) - a.apply(&b.apply(&x))).norm() < 1e-12);
        assert!((ab.inverse().apply(&ab.apply(&x)) - &x).norm() < 1e-12);
        assert!((a.apply_inverse(&a.apply(&x)) - &x).norm() < 1e-12);
    }
}
