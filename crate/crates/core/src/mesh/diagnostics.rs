use serde::Serialize;

use super::{Point, PolytopalMesh};

const SUPERADMISSIBLE_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MeshDiagnostics {
    /// Regularity factor `θ`.
    pub theta: f64,
    /// `n_{K,σ} = (x̄_σ − x_K)/d_{K,σ}` for every cell/face pair.
    pub superadmissible: bool,
    /// `max_K |x̄_K − x_K|`.
    pub e_max: f64,
    /// `max_G |e_G|` over the mesh's local grouping.
    pub e_group_max: f64,
}

pub fn compute_diagnostics(mesh: &PolytopalMesh) -> MeshDiagnostics {
    let mut ratio: f64 = 0.0;
    let mut superadmissible = true;
    for face in mesh.faces() {
        if let [a, b] = face.sides.as_slice() {
            ratio = ratio.max(a.distance / b.distance).max(b.distance / a.distance);
        }
        for side in &face.sides {
            let x_k = mesh.cell(side.cell).point;
            let dev = (side.normal - (face.centroid - x_k) / side.distance).norm();
            superadmissible &= dev <= SUPERADMISSIBLE_TOLERANCE;
        }
    }

    let mut shape: f64 = 0.0;
    let mut e_max: f64 = 0.0;
    for (k, cell) in mesh.cells().iter().enumerate() {
        let worst = cell
            .faces
            .iter()
            .map(|&f| cell.diameter / mesh.side(f, k).distance)
            .fold(0.0, f64::max);
        shape = shape.max(worst + cell.faces.len() as f64);
        e_max = e_max.max((cell.centroid - cell.point).norm());
    }

    let e_group_max = mesh
        .groups()
        .map(|group| {
            let mut weighted = Point::zeros();
            let mut measure = 0.0;
            for cell in &mesh.cells()[group] {
                weighted += (cell.centroid - cell.point) * cell.measure;
                measure += cell.measure;
            }
            (weighted / measure).norm()
        })
        .fold(0.0, f64::max);

    MeshDiagnostics {
        theta: ratio + shape,
        superadmissible,
        e_max,
        e_group_max,
    }
}
