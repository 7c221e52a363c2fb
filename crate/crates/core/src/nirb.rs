//! Two-grid non-intrusive reduced basis: an offline basis of fine snapshots,
//! orthonormal in L² and orthogonal in the discrete H¹ form, and an online
//! step projecting a coarse solution onto it.

use nalgebra::DMatrix;
use nalgebra_sparse::CsrMatrix;
use rayon::prelude::*;

use crate::dense::{generalized_eigen, jacobi_eigen};
use crate::error::{Error, Result};
use crate::fvm::{self, csr_form, discrete_h1_seminorm, DiscreteField, Scheme};
use crate::mesh::{MeshSpec, PolytopalMesh};
use crate::problem::{ParameterVector, ParametricProblem};
use crate::transfer::{build_transfer, TransferMap};

/// Gram–Schmidt drops a candidate whose norm falls below this fraction of its
/// norm before projection.
pub const DROP_TOLERANCE: f64 = 1e-10;
/// POD keeps modes whose singular value exceeds this fraction of the largest.
pub const POD_RATIO: f64 = 1e-8;

#[derive(Clone, Copy, Debug, Default)]
pub struct OfflineOptions {
    pub pod_truncation: bool,
}

#[derive(Clone, Debug)]
pub struct ReducedBasis {
    mesh_spec: MeshSpec,
    fine_fingerprint: u64,
    problem: String,
    scheme: Scheme,
    fields: Vec<DiscreteField>,
    eigenvalues: Vec<f64>,
    training_parameters: Vec<ParameterVector>,
}

impl ReducedBasis {
    /// Assembles a basis from stored parts, checking that they agree.
    pub fn from_parts(
        mesh_spec: MeshSpec,
        problem: String,
        scheme: Scheme,
        fields: Vec<DiscreteField>,
        eigenvalues: Vec<f64>,
        training_parameters: Vec<ParameterVector>,
    ) -> Result<Self> {
        let fine_fingerprint = mesh_spec.fingerprint();
        if fields.is_empty() || fields.len() != eigenvalues.len() {
            return Err(Error::BasisMismatch(format!(
                "{} fields and {} eigenvalues",
                fields.len(),
                eigenvalues.len()
            )));
        }
        for f in &fields {
            if f.mesh_fingerprint() != fine_fingerprint {
                return Err(Error::FingerprintMismatch {
                    expected: fine_fingerprint,
                    found: f.mesh_fingerprint(),
                });
            }
        }
        Ok(Self {
            mesh_spec,
            fine_fingerprint,
            problem,
            scheme,
            fields,
            eigenvalues,
            training_parameters,
        })
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn fields(&self) -> &[DiscreteField] {
        &self.fields
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn training_parameters(&self) -> &[ParameterVector] {
        &self.training_parameters
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn problem(&self) -> &str {
        &self.problem
    }

    pub fn mesh_spec(&self) -> MeshSpec {
        self.mesh_spec
    }

    pub fn fine_fingerprint(&self) -> u64 {
        self.fine_fingerprint
    }

    /// L² projection `Σ (w, Φ_i) Φ_i`, cell values only.
    pub fn project(&self, mesh: &PolytopalMesh, w: &DiscreteField) -> Result<DiscreteField> {
        let coefficients = self
            .fields
            .iter()
            .map(|phi| fvm::l2_inner_product(mesh, w, phi))
            .collect::<Result<Vec<_>>>()?;
        self.combine(mesh, &coefficients)
    }

    /// `Σ c_i Φ_i`, cell values only.
    pub fn combine(&self, mesh: &PolytopalMesh, coefficients: &[f64]) -> Result<DiscreteField> {
        mesh.check_fingerprint(self.fine_fingerprint)?;
        if coefficients.len() != self.len() {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients for a basis of size {}",
                coefficients.len(),
                self.len()
            )));
        }
        let mut out = DiscreteField::zeros(mesh);
        for (c, phi) in coefficients.iter().zip(&self.fields) {
            out.add_scaled(*c, phi)?;
        }
        Ok(out)
    }

    /// Measures the orthogonality properties of the basis on its fine mesh.
    pub fn check_invariants(&self, mesh: &PolytopalMesh) -> Result<BasisInvariants> {
        mesh.check_fingerprint(self.fine_fingerprint)?;
        let stiffness = StiffnessForm::new(mesh, self.scheme);
        let n = self.len();
        let lambda_max = self.eigenvalues[n - 1];
        let mut inv = BasisInvariants {
            gram_deviation: 0.0,
            stiffness_off_diagonal: 0.0,
            eigenvalue_mismatch: 0.0,
            ascending_positive: self.eigenvalues[0] > 0.0 && self.eigenvalues.windows(2).all(|w| w[0] <= w[1]),
        };
        for i in 0..n {
            for j in 0..n {
                let m = fvm::l2_inner_product(mesh, &self.fields[i], &self.fields[j])?;
                let target = if i == j { 1.0 } else { 0.0 };
                inv.gram_deviation = inv.gram_deviation.max((m - target).abs());
                let k = stiffness.eval(mesh, &self.fields[i], &self.fields[j]);
                if i == j {
                    let rel = (k - self.eigenvalues[i]).abs() / self.eigenvalues[i];
                    inv.eigenvalue_mismatch = inv.eigenvalue_mismatch.max(rel);
                } else {
                    inv.stiffness_off_diagonal = inv.stiffness_off_diagonal.max(k.abs() / lambda_max);
                }
            }
        }
        Ok(inv)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BasisInvariants {
    /// `max |(Φ_i, Φ_j) − δ_ij|`.
    pub gram_deviation: f64,
    /// `max_{i≠j} |k(Φ_i, Φ_j)| / λ_N`.
    pub stiffness_off_diagonal: f64,
    /// `max_i |k(Φ_i, Φ_i) − λ_i| / λ_i`.
    pub eigenvalue_mismatch: f64,
    pub ascending_positive: bool,
}

impl BasisInvariants {
    pub fn holds(&self) -> bool {
        self.gram_deviation <= 1e-12
            && self.stiffness_off_diagonal <= 1e-10
            && self.eigenvalue_mismatch <= 1e-10
            && self.ascending_positive
    }
}

/// Discrete H¹ form with unit diffusion, matching the scheme: the two-point
/// form for TPFA, the hybrid form on cells and faces for HMM.
#[derive(Clone, Debug)]
pub struct StiffnessForm {
    scheme: Scheme,
    matrix: CsrMatrix<f64>,
}

impl StiffnessForm {
    pub fn new(mesh: &PolytopalMesh, scheme: Scheme) -> Self {
        let ones = vec![1.0; mesh.num_cells()];
        let matrix = match scheme {
            Scheme::Tpfa => {
                fvm::SparseSpdSystem::from_triplets(mesh.num_cells(), &fvm::tpfa_triplets(mesh, &ones), vec![0.0; mesh.num_cells()])
                    .matrix
            }
            Scheme::Hmm => fvm::hmm::hmm_form_matrix(mesh, &ones),
        };
        Self { scheme, matrix }
    }

    pub fn eval(&self, mesh: &PolytopalMesh, u: &DiscreteField, v: &DiscreteField) -> f64 {
        match self.scheme {
            Scheme::Tpfa => csr_form(&self.matrix, u.cell_values(), v.cell_values()),
            Scheme::Hmm => csr_form(
                &self.matrix,
                &fvm::hmm::hybrid_vector(mesh, u),
                &fvm::hmm::hybrid_vector(mesh, v),
            ),
        }
    }
}

pub fn offline_build(
    mesh: &PolytopalMesh,
    problem: &ParametricProblem,
    parameters: &[ParameterVector],
    scheme: Scheme,
) -> Result<ReducedBasis> {
    offline_build_with(mesh, problem, parameters, scheme, OfflineOptions::default())
}

pub fn offline_build_with(
    mesh: &PolytopalMesh,
    problem: &ParametricProblem,
    parameters: &[ParameterVector],
    scheme: Scheme,
    options: OfflineOptions,
) -> Result<ReducedBasis> {
    if parameters.is_empty() {
        return Err(Error::InvalidArgument("offline build needs at least one parameter".into()));
    }
    let snapshots = parameters
        .par_iter()
        .map(|mu| {
            problem.check_admissible(mu)?;
            scheme.solve(mesh, problem, mu).map_err(|e| Error::Solve {
                n: mesh.resolution(),
                mu: mu.to_vec(),
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let candidates = if options.pod_truncation {
        pod_modes(mesh, &snapshots)?
    } else {
        snapshots
    };
    let orthonormal = gram_schmidt(mesh, candidates)?;
    if orthonormal.is_empty() {
        return Err(Error::DegenerateTrainingSet);
    }
    let n = orthonormal.len();
    if n < parameters.len() {
        log::info!("reduced basis size from {} to {n}", parameters.len());
    }

    let stiffness = StiffnessForm::new(mesh, scheme);
    let mut k = DMatrix::zeros(n, n);
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            k[(i, j)] = stiffness.eval(mesh, &orthonormal[i], &orthonormal[j]);
            m[(i, j)] = fvm::l2_inner_product(mesh, &orthonormal[i], &orthonormal[j])?;
            k[(j, i)] = k[(i, j)];
            m[(j, i)] = m[(i, j)];
        }
    }
    let (eigenvalues, x) = generalized_eigen(&k, &m)?;
    let fields = (0..n)
        .map(|c| {
            let mut phi = orthonormal[0].scaled(0.0);
            for (r, q) in orthonormal.iter().enumerate() {
                phi.add_scaled(x[(r, c)], q)?;
            }
            Ok(phi)
        })
        .collect::<Result<Vec<_>>>()?;

    ReducedBasis::from_parts(
        mesh.spec(),
        problem.name().to_string(),
        scheme,
        fields,
        eigenvalues,
        parameters.to_vec(),
    )
}

/// Modified Gram–Schmidt in L² with relative drop tolerance.
fn gram_schmidt(mesh: &PolytopalMesh, candidates: Vec<DiscreteField>) -> Result<Vec<DiscreteField>> {
    let mut basis: Vec<DiscreteField> = Vec::with_capacity(candidates.len());
    for (i, mut w) in candidates.into_iter().enumerate() {
        let before = fvm::l2_norm(mesh, &w)?;
        for q in &basis {
            let c = fvm::l2_inner_product(mesh, &w, q)?;
            w.add_scaled(-c, q)?;
        }
        let after = fvm::l2_norm(mesh, &w)?;
        if after <= DROP_TOLERANCE * before || after == 0.0 {
            log::warn!("snapshot {i} dropped as linearly dependent");
            continue;
        }
        basis.push(w.scaled(1.0 / after));
    }
    Ok(basis)
}

/// Method of snapshots: eigenvectors of the L² correlation matrix, largest
/// first, truncated at [`POD_RATIO`] in singular value.
fn pod_modes(mesh: &PolytopalMesh, snapshots: &[DiscreteField]) -> Result<Vec<DiscreteField>> {
    let n = snapshots.len();
    let mut c = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            c[(i, j)] = fvm::l2_inner_product(mesh, &snapshots[i], &snapshots[j])?;
            c[(j, i)] = c[(i, j)];
        }
    }
    let (values, v) = jacobi_eigen(&c)?;
    let largest = values[n - 1].max(0.0);
    let mut modes = Vec::new();
    for col in (0..n).rev() {
        if values[col] <= 0.0 || (values[col] / largest).sqrt() <= POD_RATIO {
            break;
        }
        let mut mode = snapshots[0].scaled(0.0);
        for (r, s) in snapshots.iter().enumerate() {
            mode.add_scaled(v[(r, col)], s)?;
        }
        modes.push(mode);
    }
    Ok(modes)
}

#[derive(Clone, Debug)]
pub struct NirbApproximation {
    pub coefficients: Vec<f64>,
    /// `Σ α_i Φ_i` on the fine mesh, cell values only.
    pub field: DiscreteField,
    pub parameter: ParameterVector,
    /// Set when the coarse-to-fine integrals were only approximate.
    pub approximate: bool,
}

/// Coarse solve, then projection onto the basis. Builds the transfer map on
/// each call; see [`online_solve_with_map`] to reuse one.
pub fn online_solve(
    basis: &ReducedBasis,
    fine: &PolytopalMesh,
    coarse: &PolytopalMesh,
    problem: &ParametricProblem,
    mu: &ParameterVector,
) -> Result<NirbApproximation> {
    fine.check_fingerprint(basis.fine_fingerprint())?;
    let map = build_transfer(fine, coarse)?;
    online_solve_with_map(basis, &map, fine, coarse, problem, mu)
}

pub fn online_solve_with_map(
    basis: &ReducedBasis,
    map: &TransferMap,
    fine: &PolytopalMesh,
    coarse: &PolytopalMesh,
    problem: &ParametricProblem,
    mu: &ParameterVector,
) -> Result<NirbApproximation> {
    if problem.name() != basis.problem() {
        return Err(Error::BasisMismatch(format!(
            "basis built for problem `{}`, used with `{}`",
            basis.problem(),
            problem.name()
        )));
    }
    fine.check_fingerprint(basis.fine_fingerprint())?;
    if coarse.mesh_size() <= fine.mesh_size() {
        log::warn!("coarse mesh is not coarser than the fine mesh");
    }
    let coarse_solution = basis
        .scheme()
        .solve(coarse, problem, mu)
        .map_err(|e| Error::Solve {
            n: coarse.resolution(),
            mu: mu.to_vec(),
            source: Box::new(e),
        })?;
    let mut approximate = false;
    let coefficients = basis
        .fields()
        .iter()
        .map(|phi| {
            let p = map.cross_inner_product(&coarse_solution, phi)?;
            approximate |= p.approximate;
            Ok(p.value)
        })
        .collect::<Result<Vec<_>>>()?;
    let field = basis.combine(fine, &coefficients)?;
    Ok(NirbApproximation {
        coefficients,
        field,
        parameter: mu.clone(),
        approximate,
    })
}

/// `|u − u_ref|_D / |u_ref|_D`.
pub fn relative_error(mesh: &PolytopalMesh, approx: &DiscreteField, reference: &DiscreteField) -> Result<f64> {
    let denominator = discrete_h1_seminorm(mesh, reference)?;
    if denominator == 0.0 {
        return Err(Error::ZeroReference);
    }
    Ok(discrete_h1_seminorm(mesh, &approx.difference(reference)?)? / denominator)
}

/// `‖w − Σ (w, Φ_i) Φ_i‖_{L²} / ‖w‖_{L²}`.
pub fn projection_error(mesh: &PolytopalMesh, basis: &ReducedBasis, w: &DiscreteField) -> Result<f64> {
    let norm = fvm::l2_norm(mesh, w)?;
    if norm == 0.0 {
        return Err(Error::ZeroReference);
    }
    let residual = w.difference(&basis.project(mesh, w)?)?;
    Ok(fvm::l2_norm(mesh, &residual)? / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_uniform_rect_mesh;
    use crate::problem::{sample_parameters, TARGET_PARAMETER};
    use approx::assert_abs_diff_eq;

    fn paper() -> ParametricProblem {
        ParametricProblem::paper()
    }

    #[test]
    fn single_snapshot_basis() {
        let mesh = build_uniform_rect_mesh(8).unwrap();
        let mu = ParameterVector::target();
        let basis = offline_build(&mesh, &paper(), std::slice::from_ref(&mu), Scheme::Tpfa).unwrap();
        assert_eq!(basis.len(), 1);
        let u = Scheme::Tpfa.solve(&mesh, &paper(), &mu).unwrap();
        let norm = fvm::l2_norm(&mesh, &u).unwrap();
        for (a, b) in basis.fields()[0].cell_values().iter().zip(u.cell_values()) {
            assert_abs_diff_eq!(*a, b / norm, epsilon = 1e-12);
        }
        let semi = discrete_h1_seminorm(&mesh, &basis.fields()[0]).unwrap();
        assert_abs_diff_eq!(basis.eigenvalues()[0], semi * semi, epsilon = 1e-10 * semi * semi);
    }

    #[test]
    fn duplicate_parameters_reduce_the_basis() {
        let mesh = build_uniform_rect_mesh(8).unwrap();
        let mu = ParameterVector::target();
        let basis = offline_build(&mesh, &paper(), &[mu.clone(), mu], Scheme::Tpfa).unwrap();
        assert_eq!(basis.len(), 1);
    }

    #[test]
    fn zero_snapshots_are_degenerate() {
        let mesh = build_uniform_rect_mesh(4).unwrap();
        let mu = ParameterVector::new(vec![1.0, 0.5, 0.0, 0.0]);
        assert!(matches!(
            offline_build(&mesh, &paper(), &[mu], Scheme::Tpfa),
            Err(Error::DegenerateTrainingSet)
        ));
        assert!(offline_build(&mesh, &paper(), &[], Scheme::Tpfa).is_err());
    }

    #[test]
    fn invariants_hold_for_both_schemes() {
        let mesh = build_uniform_rect_mesh(8).unwrap();
        let params = sample_parameters(4, 11).unwrap();
        for scheme in [Scheme::Tpfa, Scheme::Hmm] {
            let basis = offline_build(&mesh, &paper(), &params, scheme).unwrap();
            let inv = basis.check_invariants(&mesh).unwrap();
            assert!(inv.holds(), "{scheme}: {inv:?}");
        }
    }

    #[test]
    fn pod_option_keeps_the_span() {
        let mesh = build_uniform_rect_mesh(8).unwrap();
        let params = sample_parameters(3, 5).unwrap();
        let plain = offline_build(&mesh, &paper(), &params, Scheme::Tpfa).unwrap();
        let pod = offline_build_with(&mesh, &paper(), &params, Scheme::Tpfa, OfflineOptions { pod_truncation: true }).unwrap();
        assert_eq!(plain.len(), pod.len());
        for (a, b) in plain.eigenvalues().iter().zip(pod.eigenvalues()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-8 * b);
        }
    }

    #[test]
    fn online_on_the_fine_mesh_reproduces_training_snapshots() {
        let mesh = build_uniform_rect_mesh(8).unwrap();
        let params = sample_parameters(3, 9).unwrap();
        let basis = offline_build(&mesh, &paper(), &params, Scheme::Tpfa).unwrap();
        let out = online_solve(&basis, &mesh, &mesh, &paper(), &params[1]).unwrap();
        assert!(!out.approximate);
        let snapshot = Scheme::Tpfa.solve(&mesh, &paper(), &params[1]).unwrap();
        let err = fvm::l2_norm(&mesh, &out.field.difference(&snapshot).unwrap()).unwrap();
        assert!(err <= 1e-10, "{err}");
    }

    #[test]
    fn online_rejects_foreign_problem_and_mesh() {
        let mesh = build_uniform_rect_mesh(4).unwrap();
        let basis = offline_build(&mesh, &paper(), &[ParameterVector::target()], Scheme::Tpfa).unwrap();
        let coarse = build_uniform_rect_mesh(2).unwrap();
        let sine = ParametricProblem::sine();
        assert!(matches!(
            online_solve(&basis, &mesh, &coarse, &sine, &ParameterVector::target()),
            Err(Error::BasisMismatch(_))
        ));
        assert!(online_solve(&basis, &coarse, &coarse, &paper(), &ParameterVector::target()).is_err());
    }

    #[test]
    fn relative_error_examples() {
        let mesh = build_uniform_rect_mesh(6).unwrap();
        let u = Scheme::Tpfa.solve(&mesh, &paper(), &TARGET_PARAMETER).unwrap();
        assert_eq!(relative_error(&mesh, &u, &u).unwrap(), 0.0);
        assert_abs_diff_eq!(relative_error(&mesh, &DiscreteField::zeros(&mesh), &u).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(relative_error(&mesh, &u.scaled(0.5), &u).unwrap(), 0.5, epsilon = 1e-15);
        assert!(matches!(
            relative_error(&mesh, &u, &DiscreteField::zeros(&mesh)),
            Err(Error::ZeroReference)
        ));
    }
}
