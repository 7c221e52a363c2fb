use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fvm::Scheme;
use crate::mesh::{CellPointMode, MeshKind, MeshSpec};
use crate::problem::{ParameterVector, ParametricProblem};

fn default_true() -> bool {
    true
}

fn default_reference_factor() -> usize {
    4
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub mesh_kind: MeshKind,
    /// Defaults to the kind's natural cell points.
    #[serde(default)]
    pub cell_point_mode: Option<CellPointMode>,
    pub fine_resolutions: Vec<usize>,
    /// Pick coarse resolutions that divide the fine ones.
    #[serde(default = "default_true")]
    pub nested: bool,
    pub snapshot_count: usize,
    pub seed: u64,
    pub problem: String,
    pub target_mu: ParameterVector,
    pub solver_kind: Scheme,
    #[serde(default = "default_reference_factor")]
    pub reference_factor: usize,
    #[serde(default)]
    pub pod_truncation: bool,
}

impl StudyConfig {
    /// Uniform meshes, TPFA, the built-in family at the target parameter,
    /// five snapshots.
    pub fn reference_setup(fine_resolutions: Vec<usize>) -> Self {
        Self {
            mesh_kind: MeshKind::Uniform,
            cell_point_mode: None,
            fine_resolutions,
            nested: true,
            snapshot_count: 5,
            seed: 42,
            problem: "paper".into(),
            target_mu: ParameterVector::target(),
            solver_kind: Scheme::Tpfa,
            reference_factor: default_reference_factor(),
            pod_truncation: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn cell_points(&self) -> CellPointMode {
        self.cell_point_mode.unwrap_or_else(|| self.mesh_kind.default_cell_points())
    }

    pub fn mesh_spec(&self, n: usize) -> MeshSpec {
        MeshSpec::new(self.mesh_kind, n, self.cell_points())
    }

    pub fn problem(&self) -> Result<ParametricProblem> {
        ParametricProblem::by_name(&self.problem)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: &str| Err(Error::InvalidArgument(msg.into()));
        if self.fine_resolutions.is_empty() {
            return invalid("fine_resolutions is empty");
        }
        if self.fine_resolutions[0] == 0 || self.fine_resolutions.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("fine_resolutions must be positive and strictly increasing");
        }
        if self.snapshot_count == 0 {
            return invalid("snapshot_count must be at least 1");
        }
        if self.reference_factor < 2 {
            return invalid("reference_factor must be at least 2");
        }
        self.problem()?.check_admissible(&self.target_mu)
    }
}

/// `round(√n_h)`, or with nesting the largest divisor of `n_h` not above it.
pub fn coarse_resolution(n_fine: usize, nested: bool) -> usize {
    let r = ((n_fine as f64).sqrt().round() as usize).max(1);
    if nested {
        (1..=r).rev().find(|d| n_fine.is_multiple_of(*d)).unwrap_or(1)
    } else {
        r
    }
}
