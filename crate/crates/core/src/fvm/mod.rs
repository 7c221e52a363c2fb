//! Finite-volume discretizations, the SPD solver and discrete norms.

mod field;
pub mod hmm;
mod norms;
mod system;
mod tpfa;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::PolytopalMesh;
use crate::problem::ParametricProblem;

pub use field::DiscreteField;
pub use hmm::{assemble_hmm, HmmDofs};
pub use norms::{
    discrete_h1_seminorm, gradient_error, interface_values, l2_inner_product, l2_norm, reconstruct_pi, sample_exact,
    two_point_form, GradientError, PiecewiseConstant,
};
pub use system::{csr_form, csr_mul, solve_spd, SparseSpdSystem, CG_TOLERANCE, SYMMETRY_TOLERANCE};
pub use tpfa::{assemble_tpfa, boundary_transmissibility, transmissibility};
pub(crate) use tpfa::tpfa_triplets;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Tpfa,
    Hmm,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Tpfa => "tpfa",
            Scheme::Hmm => "hmm",
        }
    }

    pub fn assemble(self, mesh: &PolytopalMesh, problem: &ParametricProblem, mu: &[f64]) -> Result<SparseSpdSystem> {
        match self {
            Scheme::Tpfa => assemble_tpfa(mesh, problem, mu),
            Scheme::Hmm => assemble_hmm(mesh, problem, mu),
        }
    }

    /// Assembles and solves; TPFA yields cell-only fields, HMM hybrid ones.
    pub fn solve(self, mesh: &PolytopalMesh, problem: &ParametricProblem, mu: &[f64]) -> Result<DiscreteField> {
        let x = solve_spd(&self.assemble(mesh, problem, mu)?)?;
        match self {
            Scheme::Tpfa => DiscreteField::cell_only(mesh, x),
            Scheme::Hmm => HmmDofs::new(mesh).to_field(mesh, &x),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tpfa" => Ok(Scheme::Tpfa),
            "hmm" => Ok(Scheme::Hmm),
            other => Err(Error::InvalidArgument(format!("unknown solver kind `{other}` (expected tpfa or hmm)"))),
        }
    }
}
