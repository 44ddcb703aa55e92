//! Thin wrapper over `minilp` for the few linear programs the polytope code needs.

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::DVector;

pub(crate) enum LpOutcome {
    Optimal { value: f64, x: DVector<f64> },
    Unbounded,
    Infeasible,
}

/// Maximize `⟨obj, x⟩ + obj_s * s` subject to `⟨a_i, x⟩ + s_coef_i * s ≤ b_i`
/// and `Eq` rows, with `x` free and `s ∈ s_bounds`. Pass `obj_s = 0` and
/// all-zero `s_coef` to ignore the slack variable.
pub(crate) struct Lp<'a> {
    pub dim: usize,
    pub objective: &'a DVector<f64>,
    pub slack_objective: f64,
    pub slack_bounds: (f64, f64),
    pub le_rows: Vec<(&'a DVector<f64>, f64, f64)>,
    pub eq_rows: Vec<(&'a DVector<f64>, f64)>,
}

impl Lp<'_> {
    pub fn solve(&self) -> LpOutcome {
        let mut p = Problem::new(OptimizationDirection::Maximize);
        let xs: Vec<_> = (0..self.dim)
            .map(|j| p.add_var(self.objective[j], (f64::NEG_INFINITY, f64::INFINITY)))
            .collect();
        let s = p.add_var(self.slack_objective, self.slack_bounds);
        for (row, slack_coef, rhs) in &self.le_rows {
            let mut expr: Vec<_> = xs
                .iter()
                .zip(row.iter())
                .filter(|(_, c)| **c != 0.0)
                .map(|(v, c)| (*v, *c))
                .collect();
            if *slack_coef != 0.0 {
                expr.push((s, *slack_coef));
            }
            p.add_constraint(&expr[..], ComparisonOp::Le, *rhs);
        }
        for (row, rhs) in &self.eq_rows {
            let expr: Vec<_> = xs
                .iter()
                .zip(row.iter())
                .filter(|(_, c)| **c != 0.0)
                .map(|(v, c)| (*v, *c))
                .collect();
            p.add_constraint(&expr[..], ComparisonOp::Eq, *rhs);
        }
        match p.solve() {
            Ok(sol) => LpOutcome::Optimal {
                value: sol.objective(),
                x: DVector::from_iterator(self.dim, xs.iter().map(|v| sol[*v])),
            },
            Err(minilp::Error::Unbounded) => LpOutcome::Unbounded,
            Err(minilp::Error::Infeasible) => LpOutcome::Infeasible,
        }
    }
}
