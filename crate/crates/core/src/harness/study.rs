use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fvm::{DiscreteField, Scheme};
use crate::mesh::{MeshKind, PolytopalMesh};
use crate::nirb::{offline_build_with, online_solve, projection_error, relative_error, OfflineOptions};
use crate::problem::{sample_parameters, ParametricProblem};
use crate::transfer::build_transfer;

use super::config::{coarse_resolution, StudyConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub kind: MeshKind,
    pub n_fine: usize,
    pub n_coarse: usize,
    pub h: f64,
    #[serde(rename = "H")]
    pub big_h: f64,
    #[serde(rename = "N")]
    pub basis_size: usize,
    pub err_fv_fine: f64,
    pub err_fv_coarse: f64,
    pub err_nirb: f64,
    pub eps_proxy: f64,
    pub t_offline_s: f64,
    pub t_online_s: f64,
    pub t_fine_solve_s: f64,
    pub nested: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct StudyResult {
    pub rows: Vec<StudyRow>,
}

fn solve_at(scheme: Scheme, mesh: &PolytopalMesh, problem: &ParametricProblem, mu: &[f64]) -> Result<DiscreteField> {
    scheme.solve(mesh, problem, mu).map_err(|e| Error::Solve {
        n: mesh.resolution(),
        mu: mu.to_vec(),
        source: Box::new(e),
    })
}

/// Runs `f` twice and returns the second result with its wall-clock time.
fn warm<T>(mut f: impl FnMut() -> Result<T>) -> Result<(T, f64)> {
    f()?;
    let start = Instant::now();
    let out = f()?;
    Ok((out, start.elapsed().as_secs_f64()))
}

pub fn run_study(config: &StudyConfig) -> Result<StudyResult> {
    config.validate()?;
    let problem = config.problem()?;
    let scheme = config.solver_kind;
    let mu = &config.target_mu;
    let samples = sample_parameters(config.snapshot_count + 1, config.seed)?;
    let (training, held_out) = samples.split_at(config.snapshot_count);
    let options = OfflineOptions {
        pod_truncation: config.pod_truncation,
    };

    let mut rows = Vec::with_capacity(config.fine_resolutions.len());
    for &n_fine in &config.fine_resolutions {
        let n_coarse = coarse_resolution(n_fine, config.nested);
        log::info!("study row n_h = {n_fine}, n_H = {n_coarse}");
        let fine = config.mesh_spec(n_fine).build()?;
        let coarse = config.mesh_spec(n_coarse).build()?;

        let reference = {
            let mesh = config.mesh_spec(n_fine * config.reference_factor).build()?;
            let u = solve_at(scheme, &mesh, &problem, mu)?;
            let on_fine = build_transfer(&mesh, &fine)?.restrict(&fine, &u)?;
            let on_coarse = build_transfer(&mesh, &coarse)?.restrict(&coarse, &u)?;
            (on_fine, on_coarse)
        };

        let start = Instant::now();
        let basis = offline_build_with(&fine, &problem, training, scheme, options)?;
        let t_offline_s = start.elapsed().as_secs_f64();

        let (nirb, t_online_s) = warm(|| online_solve(&basis, &fine, &coarse, &problem, mu))?;
        let (u_fine, t_fine_solve_s) = warm(|| solve_at(scheme, &fine, &problem, mu))?;
        let u_coarse = solve_at(scheme, &coarse, &problem, mu)?;
        let held_out_snapshot = solve_at(scheme, &fine, &problem, &held_out[0])?;

        rows.push(StudyRow {
            kind: config.mesh_kind,
            n_fine,
            n_coarse,
            h: fine.mesh_size(),
            big_h: coarse.mesh_size(),
            basis_size: basis.len(),
            err_fv_fine: relative_error(&fine, &u_fine, &reference.0)?,
            err_fv_coarse: relative_error(&coarse, &u_coarse, &reference.1)?,
            err_nirb: relative_error(&fine, &nirb.field, &reference.0)?,
            eps_proxy: projection_error(&fine, &basis, &held_out_snapshot)?,
            t_offline_s,
            t_online_s,
            t_fine_solve_s,
            nested: !nirb.approximate,
        });
    }
    Ok(StudyResult { rows })
}

/// Least-squares slope of `log y` against `log x`.
pub fn fitted_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn slope_of_power_law() {
        let x = [0.1, 0.05, 0.025];
        let y: Vec<f64> = x.iter().map(|h: &f64| 3.0 * h.powf(1.5)).collect();
        assert_abs_diff_eq!(fitted_slope(&x, &y), 1.5, epsilon = 1e-12);
    }

    #[test]
    fn small_study_rows_are_consistent() {
        let mut config = StudyConfig::reference_setup(vec![4, 9]);
        config.snapshot_count = 2;
        config.reference_factor = 2;
        let result = run_study(&config).unwrap();
        assert_eq!(result.rows.len(), 2);
        let row = &result.rows[1];
        assert_eq!((row.n_fine, row.n_coarse), (9, 3));
        assert_abs_diff_eq!(row.h, 2f64.sqrt() / 9.0, epsilon = 1e-15);
        assert!(row.nested);
        for r in &result.rows {
            for e in [r.err_fv_fine, r.err_fv_coarse, r.err_nirb, r.eps_proxy] {
                assert!(e.is_finite() && e >= 0.0);
            }
        }
    }

    #[test]
    fn single_snapshot_at_the_target_reproduces_the_fine_solution() {
        let mut config = StudyConfig::reference_setup(vec![1]);
        config.snapshot_count = 1;
        config.target_mu = sample_parameters(2, config.seed).unwrap()[0].clone();
        let row = &run_study(&config).unwrap().rows[0];
        assert_eq!(row.n_coarse, 1);
        assert!(row.err_nirb <= row.err_fv_fine + 1e-9);
    }
}
