use crate::error::{Error, Result};
use crate::mesh::{compute_diagnostics, PolytopalMesh};
use crate::problem::ParametricProblem;

use super::system::SparseSpdSystem;

/// Interior transmissibility with the harmonic average of the two cell
/// coefficients.
pub fn transmissibility(measure: f64, a_k: f64, d_k: f64, a_l: f64, d_l: f64) -> f64 {
    measure * a_k * a_l / (a_l * d_l + a_k * d_k)
}

pub fn boundary_transmissibility(measure: f64, a_k: f64, d_k: f64) -> f64 {
    measure * a_k / d_k
}

/// Evaluates `A(x_K; μ)` at every cell point, rejecting non-positive values.
pub(crate) fn cell_diffusion(mesh: &PolytopalMesh, problem: &ParametricProblem, mu: &[f64]) -> Result<Vec<f64>> {
    mesh.cells()
        .iter()
        .map(|c| {
            let value = problem.diffusion(&c.point, mu);
            if value.is_nan() || value <= 0.0 {
                Err(Error::NonPositiveDiffusion {
                    value,
                    x: c.point.x,
                    y: c.point.y,
                })
            } else {
                Ok(value)
            }
        })
        .collect()
}

/// Matrix of the two-point scheme for given cell coefficients, without the
/// right-hand side.
pub(crate) fn tpfa_triplets(mesh: &PolytopalMesh, a: &[f64]) -> Vec<(usize, usize, f64)> {
    let mut triplets = Vec::with_capacity(mesh.num_cells() + 4 * mesh.num_faces());
    for face in mesh.faces() {
        match face.sides.as_slice() {
            [k] => {
                let t = boundary_transmissibility(face.measure, a[k.cell], k.distance);
                triplets.push((k.cell, k.cell, t));
            }
            [k, l] => {
                let t = transmissibility(face.measure, a[k.cell], k.distance, a[l.cell], l.distance);
                triplets.push((k.cell, k.cell, t));
                triplets.push((l.cell, l.cell, t));
                triplets.push((k.cell, l.cell, -t));
                triplets.push((l.cell, k.cell, -t));
            }
            _ => unreachable!("faces have one or two sides"),
        }
    }
    triplets
}

pub fn assemble_tpfa(mesh: &PolytopalMesh, problem: &ParametricProblem, mu: &[f64]) -> Result<SparseSpdSystem> {
    problem.check_dimension(mu)?;
    if !compute_diagnostics(mesh).superadmissible {
        log::warn!("TPFA on a mesh that is not superadmissible ({} n={})", mesh.kind(), mesh.resolution());
    }
    let a = cell_diffusion(mesh, problem, mu)?;
    let rhs = mesh
        .cells()
        .iter()
        .map(|c| c.measure * problem.source(&c.point, mu))
        .collect();
    Ok(SparseSpdSystem::from_triplets(mesh.num_cells(), &tpfa_triplets(mesh, &a), rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fvm::system::solve_spd;
    use crate::mesh::build_uniform_rect_mesh;
    use approx::assert_abs_diff_eq;

    #[test]
    fn transmissibility_examples() {
        assert_abs_diff_eq!(transmissibility(0.5, 1.0, 0.25, 1.0, 0.25), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(boundary_transmissibility(0.5, 1.0, 0.25), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(transmissibility(0.5, 1.0, 0.25, 3.0, 0.25), 1.5, epsilon = 1e-15);
    }

    #[test]
    fn two_by_two_laplacian() {
        let mesh = build_uniform_rect_mesh(2).unwrap();
        let s = assemble_tpfa(&mesh, &ParametricProblem::sine(), &[]).unwrap();
        let d = s.to_dense();
        // two interior neighbours (τ=1) and two boundary faces (τ=2) per cell
        for k in 0..4 {
            assert_abs_diff_eq!(d[(k, k)], 6.0, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(d[(0, 1)], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d[(0, 2)], -1.0, epsilon = 1e-14);
        assert_eq!(d[(0, 3)], 0.0);
    }

    #[test]
    fn m_matrix_structure() {
        let mesh = build_uniform_rect_mesh(5).unwrap();
        let s = assemble_tpfa(&mesh, &ParametricProblem::paper(), &[0.99, 0.8, 0.2, 0.78]).unwrap();
        s.check_symmetric(1e-13).unwrap();
        for (i, j, v) in s.matrix.triplet_iter() {
            if i == j {
                assert!(*v > 0.0);
            } else {
                assert!(*v <= 0.0);
            }
        }
    }

    #[test]
    fn zero_source_gives_zero_solution() {
        let mesh = build_uniform_rect_mesh(4).unwrap();
        let s = assemble_tpfa(&mesh, &ParametricProblem::paper(), &[1.0, 0.5, 0.0, 0.0]).unwrap();
        assert!(s.rhs.iter().all(|&b| b == 0.0));
        assert!(solve_spd(&s).unwrap().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn rejects_non_positive_diffusion() {
        let mesh = build_uniform_rect_mesh(4).unwrap();
        let r = assemble_tpfa(&mesh, &ParametricProblem::paper(), &[-0.5, 0.0, 1.0, 1.0]);
        assert!(matches!(r, Err(Error::NonPositiveDiffusion { .. })));
    }
}
