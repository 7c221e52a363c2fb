//! Parametric elliptic problems `−div(A(x;μ)∇u) = f(x;μ)` on the unit
//! square with homogeneous Dirichlet conditions.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Deref;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::Point;

/// Admissible box for the built-in family: `μ_1 ∈ [0.5, 1.5]`,
/// `μ_2 ∈ [0, 0.9]`, `μ_3, μ_4 ∈ [0, 1]`. Every point satisfies
/// `2μ_1 − μ_2 ≥ 0.1`.
pub const PARAMETER_BOX: [(f64, f64); 4] = [(0.5, 1.5), (0.0, 0.9), (0.0, 1.0), (0.0, 1.0)];

/// The target parameter of the reference experiment.
pub const TARGET_PARAMETER: [f64; 4] = [0.99, 0.8, 0.2, 0.78];

const PROBE_POINTS: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParameterVector(Vec<f64>);

impl ParameterVector {
    pub fn new(components: Vec<f64>) -> Self {
        Self(components)
    }

    pub fn target() -> Self {
        Self(TARGET_PARAMETER.to_vec())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for ParameterVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for ParameterVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

impl fmt::Display for ParameterVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Manufactured solution with its gradient.
#[derive(Clone, Copy)]
pub struct ExactSolution {
    pub value: fn(&Point) -> f64,
    pub gradient: fn(&Point) -> Point,
}

#[derive(Clone, Copy)]
pub struct ParametricProblem {
    name: &'static str,
    parameter_dim: Option<usize>,
    diffusion: fn(&Point, &[f64]) -> f64,
    source: fn(&Point, &[f64]) -> f64,
    exact: Option<ExactSolution>,
}

impl fmt::Debug for ParametricProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParametricProblem")
            .field("name", &self.name)
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}

impl ParametricProblem {
    /// `A = 2μ_1 + μ_2 sin(x+y) cos(xy)`, `f = μ_3(1−y) + μ_4 x(1−x)`.
    pub fn paper() -> Self {
        Self {
            name: "paper",
            parameter_dim: Some(4),
            diffusion: |p, mu| 2.0 * mu[0] + mu[1] * (p.x + p.y).sin() * (p.x * p.y).cos(),
            source: |p, mu| mu[2] * (1.0 - p.y) + mu[3] * p.x * (1.0 - p.x),
            exact: None,
        }
    }

    /// `A ≡ 1`, `u = sin(πx) sin(πy)`; ignores the parameter.
    pub fn sine() -> Self {
        Self {
            name: "sine",
            parameter_dim: None,
            diffusion: |_, _| 1.0,
            source: |p, _| 2.0 * PI * PI * (PI * p.x).sin() * (PI * p.y).sin(),
            exact: Some(ExactSolution {
                value: |p| (PI * p.x).sin() * (PI * p.y).sin(),
                gradient: |p| {
                    Point::new(
                        PI * (PI * p.x).cos() * (PI * p.y).sin(),
                        PI * (PI * p.x).sin() * (PI * p.y).cos(),
                    )
                },
            }),
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "paper" => Ok(Self::paper()),
            "sine" => Ok(Self::sine()),
            other => Err(Error::UnknownProblem(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn exact(&self) -> Option<&ExactSolution> {
        self.exact.as_ref()
    }

    pub fn diffusion(&self, p: &Point, mu: &[f64]) -> f64 {
        (self.diffusion)(p, mu)
    }

    pub fn source(&self, p: &Point, mu: &[f64]) -> f64 {
        (self.source)(p, mu)
    }

    pub fn check_dimension(&self, mu: &[f64]) -> Result<()> {
        match self.parameter_dim {
            Some(expected) if expected != mu.len() => Err(Error::ParameterDimension {
                problem: self.name,
                expected,
                found: mu.len(),
            }),
            _ => Ok(()),
        }
    }

    /// Minimum of `A(·;μ)` over a 64 × 64 grid of probe points covering the
    /// closed unit square.
    pub fn min_diffusion(&self, mu: &[f64]) -> f64 {
        let step = 1.0 / (PROBE_POINTS - 1) as f64;
        (0..PROBE_POINTS)
            .flat_map(|j| (0..PROBE_POINTS).map(move |i| Point::new(i as f64 * step, j as f64 * step)))
            .map(|p| self.diffusion(&p, mu))
            .fold(f64::INFINITY, f64::min)
    }

    /// Rejects parameters of the wrong length or with a non-positive
    /// diffusion coefficient on the probe grid.
    pub fn check_admissible(&self, mu: &[f64]) -> Result<()> {
        self.check_dimension(mu)?;
        let step = 1.0 / (PROBE_POINTS - 1) as f64;
        for j in 0..PROBE_POINTS {
            for i in 0..PROBE_POINTS {
                let p = Point::new(i as f64 * step, j as f64 * step);
                let value = self.diffusion(&p, mu);
                if value.is_nan() || value <= 0.0 {
                    return Err(Error::NonPositiveDiffusion { value, x: p.x, y: p.y });
                }
            }
        }
        Ok(())
    }
}

/// Draws `count` parameters i.i.d. uniform in [`PARAMETER_BOX`].
///
/// The generator is xoshiro256** seeded through SplitMix64 (`seed_from_u64`),
/// and each coordinate uses the top 53 bits of one output:
/// `u = (x >> 11) · 2⁻⁵³`, `μ_k = lo_k + (hi_k − lo_k) u`. Components are drawn
/// in order `μ_1..μ_4`, samples one after another.
pub fn sample_parameters(count: usize, seed: u64) -> Result<Vec<ParameterVector>> {
    if count == 0 {
        return Err(Error::InvalidArgument("parameter count must be at least 1".into()));
    }
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| {
            PARAMETER_BOX
                .iter()
                .map(|&(lo, hi)| lo + (hi - lo) * unit_interval(rng.next_u64()))
                .collect::<Vec<_>>()
                .into()
        })
        .collect())
}

fn unit_interval(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
