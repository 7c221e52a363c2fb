//! Transfer between a fine and a coarse mesh of the unit square.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fvm::DiscreteField;
use crate::mesh::{PolytopalMesh, GEOMETRY_TOLERANCE};

/// Coarse cell containing each fine centroid.
#[derive(Clone, Debug)]
pub struct TransferMap {
    coarse_of_fine: Vec<usize>,
    fine_measures: Vec<f64>,
    fine_fingerprint: u64,
    coarse_fingerprint: u64,
    nested: bool,
}

/// Cross-mesh integral together with whether it is exact.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrossProduct {
    pub value: f64,
    /// Set when the meshes are not nested and centroid sampling was used.
    pub approximate: bool,
}

pub fn build_transfer(fine: &PolytopalMesh, coarse: &PolytopalMesh) -> Result<TransferMap> {
    let located: Vec<(usize, bool)> = fine
        .cells()
        .par_iter()
        .map(|cell| {
            let k = coarse.locate_cell(&cell.centroid)?;
            let inside = cell
                .vertices
                .iter()
                .all(|&v| coarse.cell_contains(k, &fine.vertices()[v], GEOMETRY_TOLERANCE));
            Ok((k, inside))
        })
        .collect::<Result<_>>()?;
    let nested = located.iter().all(|&(_, inside)| inside);
    Ok(TransferMap {
        coarse_of_fine: located.into_iter().map(|(k, _)| k).collect(),
        fine_measures: fine.cell_measures(),
        fine_fingerprint: fine.fingerprint(),
        coarse_fingerprint: coarse.fingerprint(),
        nested,
    })
}

impl TransferMap {
    pub fn nested(&self) -> bool {
        self.nested
    }

    pub fn coarse_cell(&self, fine_cell: usize) -> usize {
        self.coarse_of_fine[fine_cell]
    }

    pub fn fine_fingerprint(&self) -> u64 {
        self.fine_fingerprint
    }

    pub fn coarse_fingerprint(&self) -> u64 {
        self.coarse_fingerprint
    }

    fn check(&self, coarse: u64, fine: u64) -> Result<()> {
        for (expected, found) in [(self.coarse_fingerprint, coarse), (self.fine_fingerprint, fine)] {
            if expected != found {
                return Err(Error::FingerprintMismatch { expected, found });
            }
        }
        Ok(())
    }

    /// `Σ_k |k| c(map[k]) f_k` over the fine cells.
    pub fn cross_inner_product(&self, coarse: &DiscreteField, fine: &DiscreteField) -> Result<CrossProduct> {
        self.check(coarse.mesh_fingerprint(), fine.mesh_fingerprint())?;
        Ok(CrossProduct {
            value: self.cross_values(coarse.cell_values(), fine.cell_values()),
            approximate: !self.nested,
        })
    }

    pub(crate) fn cross_values(&self, coarse: &[f64], fine: &[f64]) -> f64 {
        self.coarse_of_fine
            .iter()
            .zip(&self.fine_measures)
            .zip(fine)
            .map(|((&k, m), f)| m * coarse[k] * f)
            .sum()
    }

    /// Copies each coarse value onto the fine cells mapped to it.
    pub fn inject(&self, fine_mesh: &PolytopalMesh, coarse: &DiscreteField) -> Result<DiscreteField> {
        self.check(coarse.mesh_fingerprint(), fine_mesh.fingerprint())?;
        let v = coarse.cell_values();
        DiscreteField::cell_only(fine_mesh, self.coarse_of_fine.iter().map(|&k| v[k]).collect())
    }

    /// Measure-weighted average of the fine values mapped to each coarse cell.
    pub fn restrict(&self, coarse_mesh: &PolytopalMesh, fine: &DiscreteField) -> Result<DiscreteField> {
        self.check(coarse_mesh.fingerprint(), fine.mesh_fingerprint())?;
        let n = coarse_mesh.num_cells();
        let mut sum = vec![0.0; n];
        let mut measure = vec![0.0; n];
        for ((&k, m), f) in self.coarse_of_fine.iter().zip(&self.fine_measures).zip(fine.cell_values()) {
            sum[k] += m * f;
            measure[k] += m;
        }
        if let Some(k) = measure.iter().position(|&m| m == 0.0) {
            return Err(Error::InvalidArgument(format!("coarse cell {k} receives no fine cell")));
        }
        DiscreteField::cell_only(coarse_mesh, sum.iter().zip(&measure).map(|(s, m)| s / m).collect())
    }
}
