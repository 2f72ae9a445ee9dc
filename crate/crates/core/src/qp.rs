//! Accelerated projected gradient for small squared-distance problems over
//! products of simplices.
//!
//! Minimizes `½ d(G z − b, S)²` where `z` is split into consecutive blocks,
//! each constrained to a probability simplex, and `S` is a closed convex set
//! given through its Euclidean projection.

use std::ops::Range;

use crate::geometry::project_onto_simplex;

#[derive(Debug, Clone)]
pub(crate) struct QpOutcome {
    pub z: Vec<f64>,
    /// `½ d(Gz − b, S)²` at `z`.
    pub value: f64,
    /// Frank-Wolfe gap at `z`; an upper bound on `value − optimum`.
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub(crate) struct SquaredDistanceQp<'a> {
    /// Columns of `G`, each of length `dim`.
    pub columns: &'a [Vec<f64>],
    pub blocks: &'a [Range<usize>],
    pub offset: &'a [f64],
    pub project: &'a dyn Fn(&[f64]) -> Vec<f64>,
}

impl SquaredDistanceQp<'_> {
    fn residual(&self, z: &[f64]) -> Vec<f64> {
        let mut y: Vec<f64> = self.offset.iter().map(|b| -b).collect();
        for (col, &zj) in self.columns.iter().zip(z) {
            if zj != 0.0 {
                for (yi, ci) in y.iter_mut().zip(col) {
                    *yi += zj * ci;
                }
            }
        }
        y
    }

    /// Returns the objective and gradient at `z`.
    fn evaluate(&self, z: &[f64]) -> (f64, Vec<f64>) {
        let y = self.residual(z);
        let p = (self.project)(&y);
        let diff: Vec<f64> = y.iter().zip(&p).map(|(a, b)| a - b).collect();
        let value = 0.5 * diff.iter().map(|v| v * v).sum::<f64>();
        let grad = self
            .columns
            .iter()
            .map(|col| col.iter().zip(&diff).map(|(c, d)| c * d).sum())
            .collect();
        (value, grad)
    }

    fn fw_gap(&self, z: &[f64], grad: &[f64]) -> f64 {
        self.blocks
            .iter()
            .map(|r| {
                let inner: f64 = grad[r.clone()].iter().zip(&z[r.clone()]).map(|(g, x)| g * x).sum();
                let min = grad[r.clone()].iter().cloned().fold(f64::INFINITY, f64::min);
                inner - min
            })
            .sum::<f64>()
            .max(0.0)
    }

    /// Largest eigenvalue of `GᵀG` by power iteration, padded slightly.
    fn lipschitz(&self) -> f64 {
        let n = self.columns.len();
        let dim = self.offset.len();
        let mut v = vec![1.0 / (n as f64).sqrt(); n];
        let mut lambda = 0.0;
        for _ in 0..100 {
            let mut gv = vec![0.0; dim];
            for (col, &vj) in self.columns.iter().zip(&v) {
                for (g, c) in gv.iter_mut().zip(col) {
                    *g += vj * c;
                }
            }
            let w: Vec<f64> = self
                .columns
                .iter()
                .map(|col| col.iter().zip(&gv).map(|(c, g)| c * g).sum())
                .collect();
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 1.0;
            }
            lambda = norm;
            v = w.into_iter().map(|x| x / norm).collect();
        }
        let frob: f64 = self.columns.iter().flatten().map(|c| c * c).sum();
        (lambda * 1.05).min(frob).max(1e-12)
    }

    fn project_blocks(&self, z: &mut [f64]) {
        for r in self.blocks {
            let p = project_onto_simplex(&z[r.clone()]);
            z[r.clone()].copy_from_slice(&p);
        }
    }

    pub fn solve(&self, start: Vec<f64>, tol: f64, max_iter: usize) -> QpOutcome {
        let step = 1.0 / self.lipschitz();
        let mut z = start;
        self.project_blocks(&mut z);
        let (mut value, mut grad) = self.evaluate(&z);
        let mut best = (z.clone(), value, self.fw_gap(&z, &grad));
        let mut y = z.clone();
        let mut momentum = 1.0_f64;
        for it in 0..max_iter {
            let gap = self.fw_gap(&z, &grad);
            if value < best.1 || (value == best.1 && gap < best.2) {
                best = (z.clone(), value, gap);
            }
            if gap <= tol {
                return QpOutcome {
                    z,
                    value,
                    gap,
                    iterations: it,
                    converged: true,
                };
            }
            let (_, grad_y) = self.evaluate(&y);
            let mut next: Vec<f64> = y.iter().zip(&grad_y).map(|(a, g)| a - step * g).collect();
            self.project_blocks(&mut next);
            let (next_value, next_grad) = self.evaluate(&next);
            if next_value > value {
                // Restart the momentum when the objective goes up.
                momentum = 1.0;
                y = z.clone();
                continue;
            }
            let next_momentum = (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt()) / 2.0;
            let beta = (momentum - 1.0) / next_momentum;
            y = next.iter().zip(&z).map(|(n, o)| n + beta * (n - o)).collect();
            momentum = next_momentum;
            z = next;
            value = next_value;
            grad = next_grad;
        }
        let gap = self.fw_gap(&z, &grad);
        if value < best.1 || (value == best.1 && gap < best.2) {
            best = (z, value, gap);
        }
        QpOutcome {
            converged: best.2 <= tol,
            z: best.0,
            value: best.1,
            gap: best.2,
            iterations: max_iter,
        }
    }
}
