//! Binary basis and field files.
//!
//! Layout: 8-byte magic, `u64` little-endian length of a UTF-8 JSON metadata
//! block, the block, then `rows × cell_count` little-endian `f64` values,
//! row-major. Only cell values are stored.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fvm::{DiscreteField, Scheme};
use crate::mesh::{CellPointMode, MeshKind, MeshSpec, PolytopalMesh};
use crate::nirb::ReducedBasis;
use crate::problem::ParameterVector;

pub const BASIS_MAGIC: &[u8; 8] = b"NIRBB001";
pub const FIELD_MAGIC: &[u8; 8] = b"NIRBF001";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BasisMetadata {
    mesh_kind: MeshKind,
    n: usize,
    cell_point_mode: CellPointMode,
    solver_kind: Scheme,
    problem: String,
    basis_size: usize,
    cell_count: usize,
    training_parameters: Vec<ParameterVector>,
    /// 17 significant digits, exact on reparse.
    eigenvalues: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldMetadata {
    mesh_kind: MeshKind,
    n: usize,
    cell_point_mode: CellPointMode,
    cell_count: usize,
}

fn write_container(path: &Path, magic: &[u8; 8], metadata: &impl Serialize, rows: &[&[f64]]) -> Result<()> {
    let json = serde_json::to_vec(metadata)?;
    let mut out = Vec::with_capacity(16 + json.len() + 8 * rows.iter().map(|r| r.len()).sum::<usize>());
    out.extend_from_slice(magic);
    out.extend_from_slice(&(json.len() as u64).to_le_bytes());
    out.extend_from_slice(&json);
    for row in rows {
        for v in *row {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(&out)?;
    Ok(())
}

/// Returns the metadata bytes and the payload.
fn read_container<'a>(bytes: &'a [u8], magic: &[u8; 8]) -> Result<(&'a [u8], &'a [u8])> {
    if bytes.len() < 16 || &bytes[..8] != magic {
        return Err(Error::Format(format!(
            "bad magic, expected {}",
            String::from_utf8_lossy(magic)
        )));
    }
    let len = u64::from_le_bytes(bytes[8..16].try_into().expect("eight bytes")) as usize;
    let rest = &bytes[16..];
    if len > rest.len() {
        return Err(Error::Format("truncated metadata block".into()));
    }
    Ok(rest.split_at(len))
}

fn decode_rows(payload: &[u8], rows: usize, cells: usize) -> Result<Vec<Vec<f64>>> {
    let expected = rows * cells * 8;
    if payload.len() < expected {
        return Err(Error::Format(format!(
            "truncated payload: {} bytes, expected {expected}",
            payload.len()
        )));
    }
    if payload.len() > expected {
        return Err(Error::Format(format!(
            "payload size mismatch: {} bytes, expected {expected}",
            payload.len()
        )));
    }
    Ok(payload
        .chunks_exact(cells.max(1) * 8)
        .take(rows)
        .map(|row| {
            row.chunks_exact(8)
                .map(|b| f64::from_le_bytes(b.try_into().expect("eight bytes")))
                .collect()
        })
        .collect())
}

fn check_cell_count(spec: &MeshSpec, cell_count: usize) -> Result<()> {
    if spec.num_cells() != cell_count {
        return Err(Error::Format(format!(
            "metadata gives {cell_count} cells, a {} mesh with n = {} has {}",
            spec.kind,
            spec.n,
            spec.num_cells()
        )));
    }
    Ok(())
}

pub fn save_basis(basis: &ReducedBasis, path: &Path) -> Result<()> {
    let spec = basis.mesh_spec();
    let metadata = BasisMetadata {
        mesh_kind: spec.kind,
        n: spec.n,
        cell_point_mode: spec.cell_point_mode,
        solver_kind: basis.scheme(),
        problem: basis.problem().to_string(),
        basis_size: basis.len(),
        cell_count: spec.num_cells(),
        training_parameters: basis.training_parameters().to_vec(),
        eigenvalues: basis.eigenvalues().iter().map(|l| format!("{l:.16e}")).collect(),
    };
    let rows: Vec<&[f64]> = basis.fields().iter().map(|f| f.cell_values()).collect();
    write_container(path, BASIS_MAGIC, &metadata, &rows)
}

pub fn load_basis(path: &Path) -> Result<ReducedBasis> {
    let bytes = std::fs::read(path)?;
    let (meta, payload) = read_container(&bytes, BASIS_MAGIC)?;
    let meta: BasisMetadata = serde_json::from_slice(meta)?;
    let spec = MeshSpec::new(meta.mesh_kind, meta.n, meta.cell_point_mode);
    check_cell_count(&spec, meta.cell_count)?;
    if meta.eigenvalues.len() != meta.basis_size {
        return Err(Error::Format(format!(
            "{} eigenvalues for a basis of size {}",
            meta.eigenvalues.len(),
            meta.basis_size
        )));
    }
    let eigenvalues = meta
        .eigenvalues
        .iter()
        .map(|s| s.parse::<f64>().map_err(|e| Error::Format(format!("eigenvalue `{s}`: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    let fingerprint = spec.fingerprint();
    let fields = decode_rows(payload, meta.basis_size, meta.cell_count)?
        .into_iter()
        .map(|values| DiscreteField::detached(fingerprint, values))
        .collect();
    ReducedBasis::from_parts(spec, meta.problem, meta.solver_kind, fields, eigenvalues, meta.training_parameters)
}

pub fn save_field(mesh: &PolytopalMesh, field: &DiscreteField, path: &Path) -> Result<()> {
    mesh.check_fingerprint(field.mesh_fingerprint())?;
    let spec = mesh.spec();
    let metadata = FieldMetadata {
        mesh_kind: spec.kind,
        n: spec.n,
        cell_point_mode: spec.cell_point_mode,
        cell_count: mesh.num_cells(),
    };
    write_container(path, FIELD_MAGIC, &metadata, &[field.cell_values()])
}

/// Returns the mesh description and the cell-only field.
pub fn load_field(path: &Path) -> Result<(MeshSpec, DiscreteField)> {
    let bytes = std::fs::read(path)?;
    let (meta, payload) = read_container(&bytes, FIELD_MAGIC)?;
    let meta: FieldMetadata = serde_json::from_slice(meta)?;
    let spec = MeshSpec::new(meta.mesh_kind, meta.n, meta.cell_point_mode);
    check_cell_count(&spec, meta.cell_count)?;
    let values = decode_rows(payload, 1, meta.cell_count)?.remove(0);
    Ok((spec, DiscreteField::detached(spec.fingerprint(), values)))
}
