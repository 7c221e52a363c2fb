use crate::error::{Error, Result};
use crate::mesh::PolytopalMesh;

/// An element of the discrete space: one value per cell and, for hybrid
/// schemes, one value per face with boundary entries fixed to zero.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteField {
    cell_values: Vec<f64>,
    face_values: Option<Vec<f64>>,
    mesh_fingerprint: u64,
}

impl DiscreteField {
    pub fn cell_only(mesh: &PolytopalMesh, cell_values: Vec<f64>) -> Result<Self> {
        if cell_values.len() != mesh.num_cells() {
            return Err(Error::InvalidArgument(format!(
                "field has {} cell values, mesh has {} cells",
                cell_values.len(),
                mesh.num_cells()
            )));
        }
        Ok(Self {
            cell_values,
            face_values: None,
            mesh_fingerprint: mesh.fingerprint(),
        })
    }

    pub fn hybrid(mesh: &PolytopalMesh, cell_values: Vec<f64>, face_values: Vec<f64>) -> Result<Self> {
        if face_values.len() != mesh.num_faces() {
            return Err(Error::InvalidArgument(format!(
                "field has {} face values, mesh has {} faces",
                face_values.len(),
                mesh.num_faces()
            )));
        }
        if let Some(f) = mesh
            .faces()
            .iter()
            .zip(&face_values)
            .position(|(face, &v)| face.is_boundary() && v != 0.0)
        {
            return Err(Error::InvalidArgument(format!("boundary face {f} carries a non-zero value")));
        }
        let mut field = Self::cell_only(mesh, cell_values)?;
        field.face_values = Some(face_values);
        Ok(field)
    }

    /// Cell-only field bound to a mesh known only by fingerprint.
    pub(crate) fn detached(mesh_fingerprint: u64, cell_values: Vec<f64>) -> Self {
        Self {
            cell_values,
            face_values: None,
            mesh_fingerprint,
        }
    }

    pub fn zeros(mesh: &PolytopalMesh) -> Self {
        Self {
            cell_values: vec![0.0; mesh.num_cells()],
            face_values: None,
            mesh_fingerprint: mesh.fingerprint(),
        }
    }

    pub fn cell_values(&self) -> &[f64] {
        &self.cell_values
    }

    pub fn face_values(&self) -> Option<&[f64]> {
        self.face_values.as_deref()
    }

    pub fn mesh_fingerprint(&self) -> u64 {
        self.mesh_fingerprint
    }

    pub fn len(&self) -> usize {
        self.cell_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cell_values.is_empty()
    }

    /// Drops the face values, keeping only the cell unknowns.
    pub fn into_cell_only(mut self) -> Self {
        self.face_values = None;
        self
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            cell_values: self.cell_values.iter().map(|v| c * v).collect(),
            face_values: self.face_values.as_ref().map(|f| f.iter().map(|v| c * v).collect()),
            mesh_fingerprint: self.mesh_fingerprint,
        }
    }

    /// `self += c · other`. Face values survive only if both fields have them.
    pub fn add_scaled(&mut self, c: f64, other: &DiscreteField) -> Result<()> {
        self.same_mesh(other)?;
        for (a, b) in self.cell_values.iter_mut().zip(&other.cell_values) {
            *a += c * b;
        }
        match (&mut self.face_values, &other.face_values) {
            (Some(a), Some(b)) => a.iter_mut().zip(b).for_each(|(a, b)| *a += c * b),
            (faces, _) => *faces = None,
        }
        Ok(())
    }

    pub fn difference(&self, other: &DiscreteField) -> Result<DiscreteField> {
        let mut d = self.clone();
        d.add_scaled(-1.0, other)?;
        Ok(d)
    }

    pub fn same_mesh(&self, other: &DiscreteField) -> Result<()> {
        if self.mesh_fingerprint != other.mesh_fingerprint {
            return Err(Error::FingerprintMismatch {
                expected: self.mesh_fingerprint,
                found: other.mesh_fingerprint,
            });
        }
        Ok(())
    }
}
