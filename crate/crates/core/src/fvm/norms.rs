use crate::error::{Error, Result};
use crate::mesh::{Point, PolytopalMesh};
use crate::problem::ExactSolution;

use super::field::DiscreteField;
use super::hmm::cone_gradients;

fn check(mesh: &PolytopalMesh, field: &DiscreteField) -> Result<()> {
    mesh.check_fingerprint(field.mesh_fingerprint())
}

/// `Σ_K |K| u_K v_K`.
pub fn l2_inner_product(mesh: &PolytopalMesh, a: &DiscreteField, b: &DiscreteField) -> Result<f64> {
    check(mesh, a)?;
    check(mesh, b)?;
    Ok(mass_form(mesh, a.cell_values(), b.cell_values()))
}

pub fn l2_norm(mesh: &PolytopalMesh, field: &DiscreteField) -> Result<f64> {
    l2_inner_product(mesh, field, field).map(f64::sqrt)
}

pub(crate) fn mass_form(mesh: &PolytopalMesh, a: &[f64], b: &[f64]) -> f64 {
    mesh.cells()
        .iter()
        .zip(a.iter().zip(b))
        .map(|(c, (x, y))| c.measure * x * y)
        .sum()
}

/// Two-point form `Σ_int |σ|(u_K−u_L)(v_K−v_L)/(d_K+d_L) + Σ_bnd |σ| u_K v_K / d_K`.
pub fn two_point_form(mesh: &PolytopalMesh, u: &[f64], v: &[f64]) -> f64 {
    mesh.faces()
        .iter()
        .map(|face| match face.sides.as_slice() {
            [k] => face.measure * u[k.cell] * v[k.cell] / k.distance,
            [k, l] => {
                face.measure * (u[k.cell] - u[l.cell]) * (v[k.cell] - v[l.cell]) / (k.distance + l.distance)
            }
            _ => unreachable!("faces have one or two sides"),
        })
        .sum()
}

/// Discrete H¹ seminorm. With face values:
/// `Σ_K Σ_σ |σ| (v_σ − v_K)² / d_{K,σ}`; cell-only fields use [`two_point_form`].
pub fn discrete_h1_seminorm(mesh: &PolytopalMesh, field: &DiscreteField) -> Result<f64> {
    check(mesh, field)?;
    let v = field.cell_values();
    let sq = match field.face_values() {
        None => two_point_form(mesh, v, v),
        Some(faces) => mesh
            .faces()
            .iter()
            .zip(faces)
            .map(|(face, &vs)| {
                face.sides
                    .iter()
                    .map(|s| face.measure * (vs - v[s.cell]).powi(2) / s.distance)
                    .sum::<f64>()
            })
            .sum(),
    };
    Ok(sq.sqrt())
}

/// Cell-only field with `v_K = u(x_K)` at the cell points.
pub fn sample_exact(mesh: &PolytopalMesh, exact: &ExactSolution) -> DiscreteField {
    let values = mesh.cells().iter().map(|c| (exact.value)(&c.point)).collect();
    DiscreteField::cell_only(mesh, values).expect("one value per cell")
}

/// Face values from flux continuity with unit coefficient:
/// `(v_K/d_K + v_L/d_L) / (1/d_K + 1/d_L)` inside, 0 on the boundary.
pub fn interface_values(mesh: &PolytopalMesh, cells: &[f64]) -> Vec<f64> {
    mesh.faces()
        .iter()
        .map(|face| match face.sides.as_slice() {
            [_] => 0.0,
            [k, l] => (cells[k.cell] / k.distance + cells[l.cell] / l.distance) / (1.0 / k.distance + 1.0 / l.distance),
            _ => unreachable!("faces have one or two sides"),
        })
        .collect()
}

// Degree-4 rule on the reference triangle, barycentric points and weights.
const DUNAVANT_6: [([f64; 3], f64); 6] = [
    ([0.108103018168070, 0.445948490915965, 0.445948490915965], 0.223381589678011),
    ([0.445948490915965, 0.108103018168070, 0.445948490915965], 0.223381589678011),
    ([0.445948490915965, 0.445948490915965, 0.108103018168070], 0.223381589678011),
    ([0.816847572980459, 0.091576213509771, 0.091576213509771], 0.109951743655322),
    ([0.091576213509771, 0.816847572980459, 0.091576213509771], 0.109951743655322),
    ([0.091576213509771, 0.091576213509771, 0.816847572980459], 0.109951743655322),
];

#[derive(Clone, Copy, Debug)]
pub struct GradientError {
    /// `‖∇u − ∇_D v‖_{L²}`.
    pub error: f64,
    /// `‖∇u‖_{L²}`.
    pub exact_norm: f64,
}

impl GradientError {
    pub fn relative(&self) -> f64 {
        self.error / self.exact_norm
    }
}

/// L² distance between `∇u` and the cone-wise gradient reconstruction of
/// `field`, integrated per cone with a 6-point rule. Cell-only fields get
/// face values from [`interface_values`].
pub fn gradient_error(mesh: &PolytopalMesh, field: &DiscreteField, gradient: fn(&Point) -> Point) -> Result<GradientError> {
    check(mesh, field)?;
    let cells = field.cell_values();
    let faces = match field.face_values() {
        Some(f) => f.to_vec(),
        None => interface_values(mesh, cells),
    };
    let (mut err, mut norm) = (0.0, 0.0);
    for (k, cell) in mesh.cells().iter().enumerate() {
        let local: Vec<f64> = cell.faces.iter().map(|&f| faces[f]).collect();
        for (&f, g) in cell.faces.iter().zip(cone_gradients(mesh, k, cells[k], &local)) {
            let [a, b] = mesh.face(f).vertices.map(|v| mesh.vertices()[v]);
            let x = cell.point;
            let area = 0.5 * ((a - x).x * (b - x).y - (a - x).y * (b - x).x).abs();
            for (l, w) in DUNAVANT_6 {
                let p = x * l[0] + a * l[1] + b * l[2];
                let du = gradient(&p);
                err += area * w * (du - g).norm_squared();
                norm += area * w * du.norm_squared();
            }
        }
    }
    Ok(GradientError {
        error: err.sqrt(),
        exact_norm: norm.sqrt(),
    })
}

/// `Π_D v`: the piecewise-constant function equal to `v_K` on `K`.
#[derive(Clone, Copy, Debug)]
pub struct PiecewiseConstant<'a> {
    mesh: &'a PolytopalMesh,
    values: &'a [f64],
}

pub fn reconstruct_pi<'a>(mesh: &'a PolytopalMesh, field: &'a DiscreteField) -> Result<PiecewiseConstant<'a>> {
    check(mesh, field)?;
    Ok(PiecewiseConstant {
        mesh,
        values: field.cell_values(),
    })
}

impl PiecewiseConstant<'_> {
    pub fn eval(&self, p: &Point) -> Result<f64> {
        Ok(self.values[self.mesh.locate_cell(p)?])
    }

    /// `Σ_K |K| v_K`.
    pub fn integral(&self) -> f64 {
        self.mesh.cells().iter().zip(self.values).map(|(c, v)| c.measure * v).sum()
    }

    pub fn inner(&self, other: &PiecewiseConstant<'_>) -> Result<f64> {
        if self.mesh.fingerprint() != other.mesh.fingerprint() {
            return Err(Error::FingerprintMismatch {
                expected: self.mesh.fingerprint(),
                found: other.mesh.fingerprint(),
            });
        }
        Ok(mass_form(self.mesh, self.values, other.values))
    }
}
