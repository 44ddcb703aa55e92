//! Maximal-volume centred ellipsoid inside a symmetric slab intersection.
//!
//! Given rows `a_i`, maximize `log det X` subject to `a_iᵀ X a_i ≤ 1`; the
//! ellipsoid `X^{1/2} · B` is then contained in `{y : |⟨a_i, y⟩| ≤ 1}`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

pub(crate) struct JohnSolution {
    pub x: DMatrix<f64>,
    #[allow(dead_code)]
    pub gap: f64,
}

fn basis(d: usize) -> Vec<DMatrix<f64>> {
    let mut out = Vec::with_capacity(d * (d + 1) / 2);
    for i in 0..d {
        for j in i..d {
            let mut e = DMatrix::zeros(d, d);
            e[(i, j)] = 1.0;
            e[(j, i)] = 1.0;
            out.push(e);
        }
    }
    out
}

fn quad(a: &DVector<f64>, x: &DMatrix<f64>) -> f64 {
    (x * a).dot(a)
}

fn barrier(x: &DMatrix<f64>, rows: &[DVector<f64>], mu: f64) -> Option<f64> {
    let chol = x.clone().cholesky()?;
    let logdet: f64 = 2.0 * chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>();
    let mut f = -logdet;
    for a in rows {
        let s = 1.0 - quad(a, x);
        if !(s > 0.0) {
            return None;
        }
        f -= mu * s.ln();
    }
    Some(f)
}

/// Barrier interior-point Newton iteration; stops when the duality-gap bound `m·μ` < `gap_tol`.
pub(crate) fn max_det_ellipsoid(rows: &[DVector<f64>], gap_tol: f64) -> Result<JohnSolution> {
    let rows: Vec<DVector<f64>> = rows.iter().filter(|a| a.norm() > 0.0).cloned().collect();
    let d = rows.first().map(|a| a.len()).ok_or_else(|| {
        Error::NotProperlyConvex { witness: None }
    })?;
    let m = rows.len() as f64;
    let es = basis(d);
    let nb = es.len();
    let amax = rows.iter().map(|a| a.norm_squared()).fold(0.0, f64::max);
    let mut x = DMatrix::identity(d, d) * (0.5 / amax);
    // per-row coordinates of a aᵀ in the symmetric basis
    let coords: Vec<DVector<f64>> = rows
        .iter()
        .map(|a| DVector::from_iterator(nb, es.iter().map(|e| quad(a, e))))
        .collect();
    let mut mu = 1.0;
    for _stage in 0..200 {
        for _newton in 0..100 {
            let xinv = x
                .clone()
                .try_inverse()
                .ok_or_else(|| Error::Internal("ellipsoid iterate lost definiteness".into()))?;
            let mut grad = DVector::zeros(nb);
            let mut hess = DMatrix::zeros(nb, nb);
            let xe: Vec<DMatrix<f64>> = es.iter().map(|e| &xinv * e).collect();
            for k in 0..nb {
                grad[k] = -xe[k].trace();
                for l in k..nb {
                    let v = (&xe[k] * &xe[l]).trace();
                    hess[(k, l)] = v;
                    hess[(l, k)] = v;
                }
            }
            for (a, c) in rows.iter().zip(&coords) {
                let s = 1.0 - quad(a, &x);
                grad += c * (mu / s);
                hess += c * c.transpose() * (mu / (s * s));
            }
            let step = newton_step(&hess, &grad)?;
            let decrement = -grad.dot(&step);
            if decrement < 1e-12 {
                break;
            }
            let dx = es
                .iter()
                .zip(step.iter())
                .fold(DMatrix::zeros(d, d), |acc, (e, s)| acc + e * *s);
            let f0 = barrier(&x, &rows, mu).ok_or_else(|| Error::Internal("infeasible iterate".into()))?;
            let mut t = 1.0;
            loop {
                let cand = &x + &dx * t;
                if let Some(f) = barrier(&cand, &rows, mu) {
                    if f <= f0 - 0.25 * t * decrement {
                        x = cand;
                        break;
                    }
                }
                t *= 0.5;
                if t < 1e-14 {
                    break;
                }
            }
            if t < 1e-14 {
                break;
            }
        }
        if m * mu < gap_tol {
            return Ok(JohnSolution { x, gap: m * mu });
        }
        mu *= 0.2;
    }
    Ok(JohnSolution { x, gap: m * mu })
}

fn newton_step(hess: &DMatrix<f64>, grad: &DVector<f64>) -> Result<DVector<f64>> {
    if let Some(ch) = hess.clone().cholesky() {
        return Ok(ch.solve(&(-grad)));
    }
    // numerically semidefinite: solve on the well-conditioned eigenspace
    let eig = SymmetricEigen::new(hess.clone());
    let top = eig.eigenvalues.amax();
    if !(top > 0.0) {
        return Err(Error::Internal("singular Newton system".into()));
    }
    let g = eig.eigenvectors.transpose() * grad;
    let scaled = DVector::from_iterator(
        g.len(),
        g.iter()
            .zip(eig.eigenvalues.iter())
            .map(|(gi, l)| if *l > 1e-14 * top { -gi / l } else { 0.0 }),
    );
    Ok(&eig.eigenvectors * scaled)
}

/// Symmetric square root of a symmetric positive-definite matrix.
pub(crate) fn sym_sqrt(x: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(x.clone());
    let root = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    &eig.eigenvectors * DMatrix::from_diagonal(&root) * eig.eigenvectors.transpose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    #[test]
    fn square_slabs_give_unit_disk() {
        let rows = vec![dvector![1.0, 0.0], dvector![0.0, 1.0]];
        let sol = max_det_ellipsoid(&rows, 1e-10).unwrap();
        assert!((sol.x.clone() - DMatrix::identity(2, 2)).amax() < 1e-8);
    }

    #[test]
    fn rectangle() {
        let rows = vec![dvector![0.5, 0.0], dvector![0.0, 1.0 / 3.0]];
        let sol = max_det_ellipsoid(&rows, 1e-10).unwrap();
        let b = sym_sqrt(&sol.x);
        assert!((b[(0, 0)] - 2.0).abs() < 1e-7 && (b[(1, 1)] - 3.0).abs() < 1e-7);
        assert!(b[(0, 1)].abs() < 1e-7);
    }

    #[test]
    fn hexagon_is_round() {
        let rows: Vec<_> = (0..3)
            .map(|k| {
                let a = std::f64::consts::PI * k as f64 / 3.0;
                dvector![a.cos(), a.sin()]
            })
            .collect();
        let sol = max_det_ellipsoid(&rows, 1e-10).unwrap();
        assert!((sol.x.clone() - DMatrix::identity(2, 2)).amax() < 1e-7);
    }
}
