//! Hybrid mimetic scheme with cell and face unknowns.
//!
//! Local unknowns on a cell `K` are ordered `[v_K, v_σ1, …, v_σm]` following
//! `K.faces`. The local bilinear form is
//! `|K| A_K ∇_K u·∇_K v + R_K(u)ᵀ B_K R_K(v)`, `(B_K)_σσ = A_K |σ| / d_{K,σ}`.

use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::CsrMatrix;

use crate::error::{Error, Result};
use crate::mesh::{Point, PolytopalMesh};
use crate::problem::ParametricProblem;

use super::field::DiscreteField;
use super::system::SparseSpdSystem;

/// `∇_K v = (1/|K|) Σ_σ |σ| v_σ n_{K,σ}`.
pub fn cell_gradient(mesh: &PolytopalMesh, k: usize, face_values: &[f64]) -> Point {
    let cell = mesh.cell(k);
    let mut g = Point::zeros();
    for (&f, &v) in cell.faces.iter().zip(face_values) {
        g += mesh.side(f, k).normal * (mesh.face(f).measure * v);
    }
    g / cell.measure
}

/// `R_{K,σ}(v) = v_σ − v_K − ∇_K v·(x̄_σ − x_K)` for each face of `K`.
pub fn stabilization_residuals(mesh: &PolytopalMesh, k: usize, v_k: f64, face_values: &[f64]) -> Vec<f64> {
    let cell = mesh.cell(k);
    let g = cell_gradient(mesh, k, face_values);
    cell.faces
        .iter()
        .zip(face_values)
        .map(|(&f, &v)| v - v_k - g.dot(&(mesh.face(f).centroid - cell.point)))
        .collect()
}

/// Cone-wise gradient reconstruction
/// `∇_K v + (√2 / d_{K,σ}) R_{K,σ}(v) n_{K,σ}`, one entry per face of `K`.
pub fn cone_gradients(mesh: &PolytopalMesh, k: usize, v_k: f64, face_values: &[f64]) -> Vec<Point> {
    let g = cell_gradient(mesh, k, face_values);
    let r = stabilization_residuals(mesh, k, v_k, face_values);
    mesh.cell(k)
        .faces
        .iter()
        .zip(r)
        .map(|(&f, r)| {
            let side = mesh.side(f, k);
            g + side.normal * (std::f64::consts::SQRT_2 * r / side.distance)
        })
        .collect()
}

/// Local `(m+1) × (m+1)` matrix of cell `k` with coefficient `a_k`.
pub fn local_matrix(mesh: &PolytopalMesh, k: usize, a_k: f64) -> DMatrix<f64> {
    let cell = mesh.cell(k);
    let m = cell.faces.len();
    let mut grad = DMatrix::zeros(2, m + 1);
    for (j, &f) in cell.faces.iter().enumerate() {
        let n = mesh.side(f, k).normal * (mesh.face(f).measure / cell.measure);
        grad[(0, j + 1)] = n.x;
        grad[(1, j + 1)] = n.y;
    }
    let mut residual = DMatrix::zeros(m, m + 1);
    let mut weights = DVector::zeros(m);
    for (i, &f) in cell.faces.iter().enumerate() {
        let face = mesh.face(f);
        let side = mesh.side(f, k);
        let offset = face.centroid - cell.point;
        residual[(i, 0)] = -1.0;
        residual[(i, i + 1)] = 1.0;
        for j in 0..m {
            residual[(i, j + 1)] -= grad[(0, j + 1)] * offset.x + grad[(1, j + 1)] * offset.y;
        }
        weights[i] = a_k * face.measure / side.distance;
    }
    let consistent = grad.transpose() * &grad * (cell.measure * a_k);
    let stabilization = residual.transpose() * DMatrix::from_diagonal(&weights) * &residual;
    let mut local = consistent + stabilization;
    // exact symmetry, independent of rounding in the products
    let t = local.transpose();
    local += t;
    local *= 0.5;
    local
}

/// Index of each unknown: cells first, then interior faces in face order.
#[derive(Clone, Debug)]
pub struct HmmDofs {
    num_cells: usize,
    face_dof: Vec<Option<usize>>,
    size: usize,
}

impl HmmDofs {
    pub fn new(mesh: &PolytopalMesh) -> Self {
        let mut next = mesh.num_cells();
        let face_dof = mesh
            .faces()
            .iter()
            .map(|f| {
                (!f.is_boundary()).then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect();
        Self {
            num_cells: mesh.num_cells(),
            face_dof,
            size: next,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn face_dof(&self, f: usize) -> Option<usize> {
        self.face_dof[f]
    }

    pub fn to_field(&self, mesh: &PolytopalMesh, x: &[f64]) -> Result<DiscreteField> {
        if x.len() != self.size {
            return Err(Error::InvalidArgument(format!(
                "solution has {} entries, expected {}",
                x.len(),
                self.size
            )));
        }
        let faces = self.face_dof.iter().map(|d| d.map_or(0.0, |i| x[i])).collect();
        DiscreteField::hybrid(mesh, x[..self.num_cells].to_vec(), faces)
    }
}

fn hmm_triplets(
    mesh: &PolytopalMesh,
    a: &[f64],
    face_index: impl Fn(usize) -> Option<usize>,
) -> Vec<(usize, usize, f64)> {
    let mut triplets = Vec::new();
    for (k, cell) in mesh.cells().iter().enumerate() {
        let local = local_matrix(mesh, k, a[k]);
        let index: Vec<Option<usize>> = std::iter::once(Some(k))
            .chain(cell.faces.iter().map(|&f| face_index(f)))
            .collect();
        for (i, gi) in index.iter().enumerate() {
            let Some(gi) = gi else { continue };
            for (j, gj) in index.iter().enumerate() {
                if let Some(gj) = gj {
                    triplets.push((*gi, *gj, local[(i, j)]));
                }
            }
        }
    }
    triplets
}

fn centroid_diffusion(mesh: &PolytopalMesh, problem: &ParametricProblem, mu: &[f64]) -> Result<Vec<f64>> {
    mesh.cells()
        .iter()
        .map(|c| {
            let value = problem.diffusion(&c.centroid, mu);
            if value.is_nan() || value <= 0.0 {
                Err(Error::NonPositiveDiffusion {
                    value,
                    x: c.centroid.x,
                    y: c.centroid.y,
                })
            } else {
                Ok(value)
            }
        })
        .collect()
}

/// System over the unknowns of [`HmmDofs`]; boundary faces are eliminated.
pub fn assemble_hmm(mesh: &PolytopalMesh, problem: &ParametricProblem, mu: &[f64]) -> Result<SparseSpdSystem> {
    problem.check_dimension(mu)?;
    let a = centroid_diffusion(mesh, problem, mu)?;
    let dofs = HmmDofs::new(mesh);
    let mut rhs = vec![0.0; dofs.size()];
    for (k, c) in mesh.cells().iter().enumerate() {
        rhs[k] = c.measure * problem.source(&c.centroid, mu);
    }
    let triplets = hmm_triplets(mesh, &a, |f| dofs.face_dof(f));
    Ok(SparseSpdSystem::from_triplets(dofs.size(), &triplets, rhs))
}

/// Matrix of the bilinear form over all cells followed by all faces, for the
/// given cell coefficients. Boundary rows act on the zero boundary values.
pub fn hmm_form_matrix(mesh: &PolytopalMesh, a: &[f64]) -> CsrMatrix<f64> {
    let n = mesh.num_cells() + mesh.num_faces();
    let offset = mesh.num_cells();
    SparseSpdSystem::from_triplets(n, &hmm_triplets(mesh, a, |f| Some(offset + f)), vec![0.0; n]).matrix
}

/// `[cells…, faces…]`; cell-only fields have zero face entries.
pub fn hybrid_vector(mesh: &PolytopalMesh, field: &DiscreteField) -> Vec<f64> {
    let mut v = field.cell_values().to_vec();
    match field.face_values() {
        Some(f) => v.extend_from_slice(f),
        None => v.resize(mesh.num_cells() + mesh.num_faces(), 0.0),
    }
    v
}
