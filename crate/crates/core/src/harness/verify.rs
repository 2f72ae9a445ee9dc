//! Closed-form target functions of the worked examples against numerical
//! oracles: the generic best-response solver for `φ⋆`, upper concave hulls
//! of its samples for `cav[φ⋆]`, and the decomposition oracle for `φ^{x⋆}`.

use std::fmt;
use std::path::Path;

use crate::error::Result;
use crate::geometry::{MixedAction, Norm, TargetSet};
use crate::responses::{example1_matrix, ResponseFunction};
use crate::targets::{alpha_x, closed_form, cav_oracle, phi_star, write_grid_csv, Parameterization, PhiPsiOracle};

/// The closed forms under test; replaceable to exercise the failure path.
#[derive(Debug, Clone, Copy)]
pub struct ClosedForms {
    pub example1_phi_star: fn(f64) -> f64,
    pub example1_cav: fn(f64) -> f64,
    pub example1_phi_xstar: fn(f64) -> f64,
    pub example2_phi_star: fn(f64, f64) -> f64,
    pub example2_cav: fn(f64, f64) -> f64,
    pub example2_phi_xstar: fn(f64, f64) -> f64,
    pub example2_alpha_half: fn(f64, f64) -> f64,
}

impl Default for ClosedForms {
    fn default() -> Self {
        ClosedForms {
            example1_phi_star: closed_form::example1_phi_star,
            example1_cav: closed_form::example1_cav,
            example1_phi_xstar: closed_form::example1_phi_xstar,
            example2_phi_star: closed_form::example2_phi_star,
            example2_cav: closed_form::example2_cav,
            example2_phi_xstar: closed_form::example2_phi_xstar,
            example2_alpha_half: closed_form::example2_alpha_half,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub max_error: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.max_error <= self.tolerance
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<4} {:<44} max error {:.3e} (tolerance {:.1e})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.max_error,
            self.tolerance
        )
    }
}

/// Grid sizes of the verification.
#[derive(Debug, Clone, Copy)]
pub struct VerifyGrids {
    /// Points on the first example's segment.
    pub segment: usize,
    /// Points per axis on the second example's square.
    pub square: usize,
    /// Points per axis of the decomposition oracle's atom pool on the square.
    pub square_pool: usize,
}

impl Default for VerifyGrids {
    fn default() -> Self {
        VerifyGrids {
            segment: 1001,
            square: 51,
            square_pool: 101,
        }
    }
}

fn max_err(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn check(name: &str, max_error: f64, tolerance: f64) -> Check {
    Check {
        name: name.into(),
        max_error: if max_error.is_nan() { f64::INFINITY } else { max_error },
        tolerance,
    }
}

/// Runs every comparison; when `out_dir` is given, also writes the sampled
/// functions as `example1_targets.csv` and `example2_targets.csv`.
pub fn run_checks(forms: &ClosedForms, grids: VerifyGrids, out_dir: Option<&Path>) -> Result<Vec<Check>> {
    let mut checks = Vec::new();

    // First example.
    let orthant = TargetSet::negative_orthant(2, Norm::LInf)?;
    let p1 = Parameterization::example1();
    let g1 = p1.grid(grids.segment);
    let nus: Vec<f64> = g1.iter().map(|p| p[0]).collect();
    let star_oracle = g1
        .iter()
        .map(|p| phi_star(&p1.point(p), &orthant))
        .collect::<Result<Vec<_>>>()?;
    let star_closed: Vec<f64> = nus.iter().map(|&nu| (forms.example1_phi_star)(nu)).collect();
    checks.push(check("example 1 phi_star vs solver", max_err(&star_closed, &star_oracle), 1e-6));
    let cav_oracle_1 = cav_oracle(&g1, &star_oracle)?;
    let cav_closed: Vec<f64> = nus.iter().map(|&nu| (forms.example1_cav)(nu)).collect();
    checks.push(check("example 1 cav vs hull", max_err(&cav_closed, &cav_oracle_1), 1e-3));
    let generic1 = ResponseFunction::XStar {
        target: orthant.clone(),
    };
    let xs_oracle_1 = PhiPsiOracle::new(generic1, orthant.clone(), p1.clone(), 2, grids.segment)?;
    let xs_oracle: Vec<f64> = g1.iter().map(|p| xs_oracle_1.eval_param(p)).collect::<Result<_>>()?;
    let xs_closed: Vec<f64> = nus.iter().map(|&nu| (forms.example1_phi_xstar)(nu)).collect();
    checks.push(check("example 1 phi_xstar vs decompositions", max_err(&xs_closed, &xs_oracle), 5e-2));
    let half = phi_star(&example1_matrix(0.5), &orthant)?;
    checks.push(check("example 1 phi_star(1/2) = 2.5", ((forms.example1_phi_star)(0.5) - 2.5).abs().max((half - 2.5).abs()), 1e-12));
    checks.push(check("example 1 cav = 4 everywhere", cav_oracle_1.iter().map(|v| (v - 4.0).abs()).fold(0.0, f64::max), 1e-9));
    let alphas: Vec<[f64; 2]> = g1
        .iter()
        .map(|p| {
            let m = p1.point(p);
            Ok([
                alpha_x(&m, &MixedAction::pure(2, 1), &orthant)?,
                alpha_x(&m, &MixedAction::pure(2, 0), &orthant)?,
            ])
        })
        .collect::<Result<_>>()?;
    let alpha1: Vec<f64> = alphas.iter().map(|a| a[1]).collect();
    checks.push(check("example 1 phi_xstar = alpha_1", max_err(&xs_closed, &alpha1), 1e-12));

    // Second example.
    let zero = TargetSet::singleton(vec![0.0], Norm::L2)?;
    let p2 = Parameterization::example2();
    let g2 = p2.grid(grids.square);
    let star2_oracle = g2
        .iter()
        .map(|p| phi_star(&p2.point(p), &zero))
        .collect::<Result<Vec<_>>>()?;
    let star2_closed: Vec<f64> = g2.iter().map(|p| (forms.example2_phi_star)(p[0], p[1])).collect();
    checks.push(check("example 2 phi_star vs solver", max_err(&star2_closed, &star2_oracle), 1e-6));
    let cav2_oracle = cav_oracle(&g2, &star2_oracle)?;
    let cav2_closed: Vec<f64> = g2.iter().map(|p| (forms.example2_cav)(p[0], p[1])).collect();
    checks.push(check("example 2 cav vs hull", max_err(&cav2_closed, &cav2_oracle), 5e-2));
    let generic2 = ResponseFunction::XStar { target: zero.clone() };
    let xs_oracle_2 = PhiPsiOracle::new(generic2, zero.clone(), p2.clone(), 3, grids.square_pool)?;
    let xs2_oracle: Vec<f64> = g2.iter().map(|p| xs_oracle_2.eval_param(p)).collect::<Result<_>>()?;
    let xs2_closed: Vec<f64> = g2.iter().map(|p| (forms.example2_phi_xstar)(p[0], p[1])).collect();
    checks.push(check("example 2 phi_xstar vs decompositions", max_err(&xs2_closed, &xs2_oracle), 5e-2));
    let origin = p2.point(&[0.0, 0.0]);
    checks.push(check(
        "example 2 phi_xstar(0,0) = 1/3",
        ((forms.example2_phi_xstar)(0.0, 0.0) - 1.0 / 3.0).abs(),
        1e-15,
    ));
    checks.push(check(
        "example 2 oracle phi_xstar(0,0) = 1/3",
        (xs_oracle_2.eval_param(&[0.0, 0.0])? - 1.0 / 3.0).abs(),
        5e-2,
    ));
    let half_half = alpha_x(&origin, &MixedAction::uniform(2), &zero)?;
    checks.push(check(
        "example 2 alpha_1/2(0,0) = 0",
        (forms.example2_alpha_half)(0.0, 0.0).abs().max(half_half.abs()),
        0.0,
    ));
    let alpha_half: Vec<f64> = g2
        .iter()
        .map(|p| alpha_x(&p2.point(p), &MixedAction::uniform(2), &zero))
        .collect::<Result<_>>()?;
    let alpha_half_closed: Vec<f64> = g2.iter().map(|p| (forms.example2_alpha_half)(p[0], p[1])).collect();
    checks.push(check("example 2 alpha_1/2 vs direct", max_err(&alpha_half_closed, &alpha_half), 1e-12));

    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        let rows1: Vec<Vec<f64>> = (0..g1.len())
            .map(|k| {
                vec![
                    star_closed[k],
                    star_oracle[k],
                    cav_closed[k],
                    cav_oracle_1[k],
                    xs_closed[k],
                    xs_oracle[k],
                    alphas[k][0],
                    alphas[k][1],
                ]
            })
            .collect();
        let mut buf = Vec::new();
        write_grid_csv(
            &mut buf,
            &[
                "nu",
                "phi_star",
                "phi_star_oracle",
                "cav",
                "cav_oracle",
                "phi_xstar",
                "phi_xstar_oracle",
                "alpha_0",
                "alpha_1",
            ],
            &g1,
            &rows1,
        )?;
        super::csvio::write_atomic(&dir.join("example1_targets.csv"), &buf)?;
        let rows2: Vec<Vec<f64>> = (0..g2.len())
            .map(|k| {
                vec![
                    star2_closed[k],
                    star2_oracle[k],
                    cav2_closed[k],
                    cav2_oracle[k],
                    xs2_closed[k],
                    xs2_oracle[k],
                    alpha_half_closed[k],
                ]
            })
            .collect();
        let mut buf = Vec::new();
        write_grid_csv(
            &mut buf,
            &[
                "v",
                "w",
                "phi_star",
                "phi_star_oracle",
                "cav",
                "cav_oracle",
                "phi_xstar",
                "phi_xstar_oracle",
                "alpha_half",
            ],
            &g2,
            &rows2,
        )?;
        super::csvio::write_atomic(&dir.join("example2_targets.csv"), &buf)?;
    }
    Ok(checks)
}
