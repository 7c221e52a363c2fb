use nirb_core::dense::jacobi_eigen;
use nirb_core::fvm::hmm::local_matrix;
use nirb_core::fvm::{self, assemble_tpfa, solve_spd, DiscreteField, Scheme};
use nirb_core::mesh::{build_triangular_mesh, build_uniform_rect_mesh, CellPointMode, PolytopalMesh};
use nirb_core::nirb::{offline_build, projection_error};
use nirb_core::problem::{sample_parameters, ParametricProblem};
use nirb_core::transfer::build_transfer;
use proptest::prelude::*;
use proptest::strategy::ValueTree;

fn l2_distance(mesh: &PolytopalMesh, a: &DiscreteField, b: &DiscreteField) -> f64 {
    fvm::l2_norm(mesh, &a.difference(b).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tpfa_keeps_nonnegative_sources_nonnegative(
        seed in any::<u64>(),
        f in prop::collection::vec(0.0f64..10.0, 64),
        triangular in any::<bool>(),
    ) {
        let mesh = if triangular {
            build_triangular_mesh(2, CellPointMode::Circumcenter).unwrap()
        } else {
            build_uniform_rect_mesh(8).unwrap()
        };
        let mu = &sample_parameters(1, seed).unwrap()[0];
        let mut system = assemble_tpfa(&mesh, &ParametricProblem::paper(), mu).unwrap();
        for ((b, cell), value) in system.rhs.iter_mut().zip(mesh.cells()).zip(f.iter().cycle()) {
            *b = cell.measure * value;
        }
        let x = solve_spd(&system).unwrap();
        prop_assert!(x.iter().all(|&v| v >= -1e-12));
    }

    #[test]
    fn nested_restriction_preserves_integrals(
        values in prop::collection::vec(-5.0f64..5.0, 1..200),
        coarse_n in prop::sample::select(vec![1usize, 2, 3, 4, 6, 12]),
    ) {
        let fine = build_uniform_rect_mesh(12).unwrap();
        let coarse = build_uniform_rect_mesh(coarse_n).unwrap();
        let w: Vec<f64> = values.iter().cycle().take(fine.num_cells()).copied().collect();
        let field = DiscreteField::cell_only(&fine, w).unwrap();
        let map = build_transfer(&fine, &coarse).unwrap();
        prop_assert!(map.nested());
        let restricted = map.restrict(&coarse, &field).unwrap();
        let integral = |mesh: &PolytopalMesh, f: &DiscreteField| -> f64 {
            mesh.cells().iter().zip(f.cell_values()).map(|(c, v)| c.measure * v).sum()
        };
        let scale = 1.0 + integral(&fine, &field).abs();
        prop_assert!((integral(&fine, &field) - integral(&coarse, &restricted)).abs() <= 1e-12 * scale);
    }
}

#[test]
fn projection_beats_other_combinations() {
    let mesh = build_uniform_rect_mesh(16).unwrap();
    let problem = ParametricProblem::paper();
    let params = sample_parameters(5, 11).unwrap();
    let basis = offline_build(&mesh, &problem, &params, Scheme::Tpfa).unwrap();
    let w = Scheme::Tpfa
        .solve(&mesh, &problem, &sample_parameters(6, 12).unwrap()[5])
        .unwrap();
    let best = projection_error(&mesh, &basis, &w).unwrap() * fvm::l2_norm(&mesh, &w).unwrap();
    let projected = basis.project(&mesh, &w).unwrap();
    let coeffs: Vec<f64> = basis
        .fields()
        .iter()
        .map(|phi| fvm::l2_inner_product(&mesh, &w, phi).unwrap())
        .collect();
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    for _ in 0..20 {
        let delta = prop::collection::vec(-0.1f64..0.1, basis.len())
            .new_tree(&mut runner)
            .unwrap()
            .current();
        let c: Vec<f64> = coeffs.iter().zip(&delta).map(|(a, d)| a + d).collect();
        let other = basis.combine(&mesh, &c).unwrap();
        assert!(l2_distance(&mesh, &w, &other) >= best - 1e-14);
    }
    assert!((l2_distance(&mesh, &w, &projected) - best).abs() <= 1e-14);
}

#[test]
fn enrichment_never_increases_projection_error() {
    let mesh = build_uniform_rect_mesh(16).unwrap();
    let problem = ParametricProblem::paper();
    let params = sample_parameters(8, 3).unwrap();
    let w = Scheme::Tpfa
        .solve(&mesh, &problem, &sample_parameters(9, 4).unwrap()[8])
        .unwrap();
    let mut previous = f64::INFINITY;
    for n in 1..=params.len() {
        let basis = offline_build(&mesh, &problem, &params[..n], Scheme::Tpfa).unwrap();
        let e = projection_error(&mesh, &basis, &w).unwrap();
        assert!(e <= previous * (1.0 + 1e-10), "N = {n}: {e} > {previous}");
        previous = e;
    }
}

#[test]
fn hmm_local_kernel_is_constants() {
    for mesh in [
        build_uniform_rect_mesh(3).unwrap(),
        build_triangular_mesh(2, CellPointMode::Circumcenter).unwrap(),
        build_triangular_mesh(2, CellPointMode::Centroid).unwrap(),
    ] {
        for k in 0..mesh.num_cells() {
            let local = local_matrix(&mesh, k, 1.7);
            let (values, vectors) = jacobi_eigen(&local).unwrap();
            let top = values.last().copied().unwrap();
            assert!(values[0].abs() <= 1e-10 * top);
            assert!(values[1] > 1e-8 * top, "second eigenvalue {} on cell {k}", values[1]);
            let v = vectors.column(0);
            let mean = v.mean();
            assert!(v.iter().all(|x| (x - mean).abs() <= 1e-8 * v.amax()));
        }
    }
}
