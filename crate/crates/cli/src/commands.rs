use std::fmt::Write as _;

use nirb_core::fvm::{self, Scheme};
use nirb_core::harness::{self, StudyConfig};
use nirb_core::mesh::{compute_diagnostics, MeshSpec, PolytopalMesh};
use nirb_core::nirb::{offline_build_with, online_solve, relative_error, OfflineOptions};
use nirb_core::problem::{sample_parameters, ParameterVector, ParametricProblem};
use nirb_core::transfer::build_transfer;
use nirb_core::{Error, Result};

use crate::args::{MeshArgs, OfflineArgs, OnlineArgs, StudyArgs, SolveArgs, SuperconvArgs};

fn build_mesh(args: &MeshArgs) -> Result<PolytopalMesh> {
    let points = args.points.unwrap_or_else(|| args.kind.default_cell_points());
    MeshSpec::new(args.kind, args.n, points).build()
}

pub fn mesh_info(args: &MeshArgs) -> Result<String> {
    let mesh = build_mesh(args)?;
    let d = compute_diagnostics(&mesh);
    let mut out = String::new();
    writeln!(out, "kind={}", mesh.kind()).unwrap();
    writeln!(out, "n={}", mesh.resolution()).unwrap();
    writeln!(out, "cell_points={}", mesh.cell_point_mode()).unwrap();
    writeln!(out, "cells={}", mesh.num_cells()).unwrap();
    writeln!(out, "faces={}", mesh.num_faces()).unwrap();
    writeln!(out, "interior_faces={}", mesh.num_interior_faces()).unwrap();
    writeln!(out, "h={:.16e}", mesh.mesh_size()).unwrap();
    writeln!(out, "theta={:.16e}", d.theta).unwrap();
    writeln!(out, "superadmissible={}", d.superadmissible).unwrap();
    writeln!(out, "e_max={:.16e}", d.e_max).unwrap();
    writeln!(out, "e_group_max={:.16e}", d.e_group_max).unwrap();
    writeln!(out, "fingerprint={:016x}", mesh.fingerprint()).unwrap();
    Ok(out)
}

fn parameter(problem: &ParametricProblem, mu: Option<&[f64]>) -> ParameterVector {
    match (mu, problem.name()) {
        (Some(mu), _) => ParameterVector::new(mu.to_vec()),
        (None, "paper") => ParameterVector::target(),
        (None, _) => ParameterVector::new(Vec::new()),
    }
}

pub fn solve(args: &SolveArgs) -> Result<String> {
    let problem = ParametricProblem::by_name(&args.problem)?;
    let mu = parameter(&problem, args.mu.as_deref());
    problem.check_admissible(&mu)?;
    let mesh = build_mesh(&args.mesh)?;
    let u = args.scheme.solve(&mesh, &problem, &mu)?;
    let mut out = String::new();
    writeln!(out, "problem={}", problem.name()).unwrap();
    writeln!(out, "scheme={}", args.scheme).unwrap();
    writeln!(out, "mu={mu}").unwrap();
    writeln!(out, "cells={}", mesh.num_cells()).unwrap();
    writeln!(out, "h={:.16e}", mesh.mesh_size()).unwrap();
    writeln!(out, "l2_norm={:.16e}", fvm::l2_norm(&mesh, &u)?).unwrap();
    writeln!(out, "h1_seminorm={:.16e}", fvm::discrete_h1_seminorm(&mesh, &u)?).unwrap();
    if let Some(exact) = problem.exact() {
        let sampled = fvm::sample_exact(&mesh, exact);
        let cells = u.clone().into_cell_only();
        let rel_h1 = relative_error(&mesh, &cells, &sampled)?;
        let l2 = fvm::l2_norm(&mesh, &cells.difference(&sampled)?)?;
        let grad = fvm::gradient_error(&mesh, &u, exact.gradient)?.relative();
        writeln!(out, "rel_h1_error={rel_h1:.16e}").unwrap();
        writeln!(out, "rel_gradient_error={grad:.16e}").unwrap();
        writeln!(out, "l2_error={l2:.16e}").unwrap();
    }
    if let Some(path) = &args.out {
        harness::save_field(&mesh, &u.into_cell_only(), path)?;
        writeln!(out, "wrote {}", path.display()).unwrap();
    }
    Ok(out)
}

pub fn offline(args: &OfflineArgs) -> Result<String> {
    let config = StudyConfig::load(&args.config)?;
    let n = args
        .n
        .unwrap_or_else(|| *config.fine_resolutions.last().expect("validated non-empty"));
    let mesh = config.mesh_spec(n).build()?;
    let problem = config.problem()?;
    let samples = sample_parameters(config.snapshot_count, config.seed)?;
    let options = OfflineOptions {
        pod_truncation: config.pod_truncation,
    };
    let basis = offline_build_with(&mesh, &problem, &samples, config.solver_kind, options)?;
    let invariants = basis.check_invariants(&mesh)?;
    harness::save_basis(&basis, &args.out)?;
    let mut out = String::new();
    writeln!(out, "n={n}").unwrap();
    writeln!(out, "basis_size={}", basis.len()).unwrap();
    for (i, l) in basis.eigenvalues().iter().enumerate() {
        writeln!(out, "lambda_{}={l:.16e}", i + 1).unwrap();
    }
    writeln!(out, "gram_deviation={:.3e}", invariants.gram_deviation).unwrap();
    writeln!(out, "wrote {}", args.out.display()).unwrap();
    Ok(out)
}

pub fn online(args: &OnlineArgs) -> Result<String> {
    let basis = harness::load_basis(&args.basis)?;
    let spec = basis.mesh_spec();
    let fine = spec.build()?;
    let coarse = MeshSpec::new(spec.kind, args.n_coarse, spec.cell_point_mode).build()?;
    let problem = ParametricProblem::by_name(basis.problem())?;
    let mu = ParameterVector::new(args.mu.clone());
    problem.check_admissible(&mu)?;
    let approx = online_solve(&basis, &fine, &coarse, &problem, &mu)?;
    harness::save_field(&fine, &approx.field, &args.out)?;

    let mut out = String::new();
    writeln!(out, "n_fine={} n_coarse={} N={}", spec.n, args.n_coarse, basis.len()).unwrap();
    writeln!(out, "nested={}", !approx.approximate).unwrap();
    for (i, a) in approx.coefficients.iter().enumerate() {
        writeln!(out, "alpha_{}={a:.16e}", i + 1).unwrap();
    }
    if let Some(path) = &args.csv {
        let scheme: Scheme = basis.scheme();
        let u_fine = scheme.solve(&fine, &problem, &mu)?;
        let u_coarse = scheme.solve(&coarse, &problem, &mu)?;
        let on_coarse = build_transfer(&fine, &coarse)?.restrict(&coarse, &u_fine)?;
        let err_nirb = relative_error(&fine, &approx.field, &u_fine)?;
        let err_coarse = relative_error(&coarse, &u_coarse, &on_coarse)?;
        let text = format!(
            "n_fine,n_coarse,N,err_nirb,err_fv_coarse\n{},{},{},{err_nirb:.16e},{err_coarse:.16e}\n",
            spec.n,
            args.n_coarse,
            basis.len()
        );
        std::fs::write(path, text)?;
        writeln!(out, "err_nirb={err_nirb:.16e}").unwrap();
        writeln!(out, "err_fv_coarse={err_coarse:.16e}").unwrap();
    }
    writeln!(out, "wrote {}", args.out.display()).unwrap();
    Ok(out)
}

pub fn study(args: &StudyArgs) -> Result<String> {
    let config = StudyConfig::load(&args.config)?;
    let result = harness::run_study(&config)?;
    harness::emit_outputs(&result, &args.out_dir)?;
    let mut out = String::new();
    writeln!(out, "{:>6} {:>6} {:>12} {:>12} {:>12} {:>12}", "n_h", "n_H", "err_fine", "err_coarse", "err_nirb", "eps").unwrap();
    for r in &result.rows {
        writeln!(
            out,
            "{:>6} {:>6} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}",
            r.n_fine, r.n_coarse, r.err_fv_fine, r.err_fv_coarse, r.err_nirb, r.eps_proxy
        )
        .unwrap();
    }
    if result.rows.len() > 1 {
        let h: Vec<f64> = result.rows.iter().map(|r| r.h).collect();
        let e: Vec<f64> = result.rows.iter().map(|r| r.err_nirb).collect();
        writeln!(out, "nirb_order={:.4}", harness::fitted_slope(&h, &e)).unwrap();
    }
    writeln!(out, "wrote {}", args.out_dir.join("study.csv").display()).unwrap();
    Ok(out)
}

pub fn superconv(args: &SuperconvArgs) -> Result<String> {
    if args.n_list.len() < 2 {
        return Err(Error::InvalidArgument("--n-list needs at least two resolutions".into()));
    }
    let problem = ParametricProblem::sine();
    let exact = problem.exact().expect("sine has an exact solution");
    let points = args.points.unwrap_or_else(|| args.kind.default_cell_points());
    let mut out = String::new();
    let (mut h, mut err) = (Vec::new(), Vec::new());
    for &n in &args.n_list {
        let mesh = MeshSpec::new(args.kind, n, points).build()?;
        let u = args.scheme.solve(&mesh, &problem, &[])?.into_cell_only();
        let e = fvm::l2_norm(&mesh, &u.difference(&fvm::sample_exact(&mesh, exact))?)?;
        writeln!(out, "n={n} h={:.6e} l2_error={e:.6e}", mesh.mesh_size()).unwrap();
        h.push(mesh.mesh_size());
        err.push(e);
    }
    writeln!(out, "order={:.4}", harness::fitted_slope(&h, &err)).unwrap();
    Ok(out)
}
