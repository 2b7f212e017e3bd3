//! Monitored occupation-time distributions.
//!
//! A projective measurement of the positive subspace follows every unitary
//! step, and `P(N_n = r)` is the total Born-rule weight of all measurement
//! records with exactly `r` positive outcomes. Three engines compute the
//! same quantity:
//!
//! * [`brute_force`] walks the full `2^n` tree of records,
//! * [`density_recursion`] carries one density block per positive count,
//!   `ρ_{k+1,j} = Q U ρ_{k,j} U† Q + P U ρ_{k,j-1} U† P`,
//! * [`transform_recursion`] carries `Σ_j e^{ijθ} ρ_{k,j}` for the `n + 1`
//!   phases `θ_m = 2πm/(n+1)` and inverts the discrete Fourier transform.

mod block;
mod brute;
mod ledger;
mod transform;

use std::fmt;
use std::str::FromStr;

pub use block::SplitBlock;
pub use brute::{brute_force, brute_force_with, BRUTE_FORCE_LIMIT};
pub use ledger::{density_recursion, density_recursion_with, DensityLedger};
pub use transform::{phase_trace, transform_recursion, transform_recursion_with};

use crate::basis::{initial_state, BasisIndex, StateVector};
use crate::coin::{catalog, ModelSpec};
use crate::{BandedUnitary, Error, Execution, Result};

/// Probabilities above `-NEGATIVE_TOLERANCE` are clamped to zero.
pub const NEGATIVE_TOLERANCE: f64 = 1e-12;

/// Largest mass tolerated on the two outermost sites of the window.
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Engine {
    Brute,
    Density,
    Transform,
}

impl Engine {
    pub fn as_str(self) -> &'static str {
        match self {
            Engine::Brute => "brute",
            Engine::Density => "density",
            Engine::Transform => "transform",
        }
    }

    pub fn run(
        self,
        u: &BandedUnitary,
        psi: &StateVector,
        n: usize,
        exec: Execution,
    ) -> Result<OccupationDistribution> {
        match self {
            Engine::Brute => brute_force_with(u, psi, n, exec),
            Engine::Density => density_recursion_with(u, psi, n, exec),
            Engine::Transform => transform_recursion_with(u, psi, n, exec),
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" => Ok(Engine::Brute),
            "density" => Ok(Engine::Density),
            "transform" => Ok(Engine::Transform),
            other => Err(Error::OutOfRange(format!("unknown engine '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Diagnostics {
    /// Sum of the raw probabilities before clamping.
    pub pre_clamp_sum: f64,
    /// Largest mass seen on the two outermost sites of the window.
    pub boundary_mass: f64,
    /// Most negative raw probability (0 if none).
    pub min_raw: f64,
    /// Largest imaginary part discarded by the inverse transform.
    pub max_imag: f64,
}

/// `P(N_n = r)` for `r = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupationDistribution {
    pub n: usize,
    pub probs: Vec<f64>,
    pub diagnostics: Diagnostics,
}

impl OccupationDistribution {
    /// Checks positivity, clamps tiny negatives and records diagnostics.
    pub fn from_raw(raw: Vec<f64>, mut diagnostics: Diagnostics) -> Result<Self> {
        let n = raw.len().saturating_sub(1);
        diagnostics.pre_clamp_sum = raw.iter().sum();
        diagnostics.min_raw = raw.iter().copied().fold(0.0, f64::min);
        let mut probs = Vec::with_capacity(raw.len());
        for (r, p) in raw.into_iter().enumerate() {
            if p < -NEGATIVE_TOLERANCE || p.is_nan() {
                return Err(Error::NegativeProbability { r, value: p });
            }
            probs.push(p.clamp(0.0, 1.0));
        }
        Ok(OccupationDistribution { n, probs, diagnostics })
    }

    pub fn sum(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn cdf(&self) -> Vec<f64> {
        cdf(&self.probs)
    }

    /// `max_r |p_r - p_{n-r}|`.
    pub fn asymmetry(&self) -> f64 {
        self.probs
            .iter()
            .zip(self.probs.iter().rev())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Total probability of `r/n` falling in `[lo, hi]`.
    pub fn mass_in_ratio(&self, lo: f64, hi: f64) -> f64 {
        let n = self.n.max(1) as f64;
        self.probs
            .iter()
            .enumerate()
            .filter(|(r, _)| {
                let x = *r as f64 / n;
                x >= lo - 1e-12 && x <= hi + 1e-12
            })
            .map(|(_, p)| p)
            .sum()
    }
}

/// Running partial sums, capped at 1 against rounding drift.
pub fn cdf(probs: &[f64]) -> Vec<f64> {
    probs
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p.max(0.0);
            Some(acc.min(1.0))
        })
        .collect()
}

/// Window half-width used by default for an `n`-step run: the support after
/// `k` steps stays within `k + 1` sites, and two outer sites are kept free.
pub fn default_half_width(n: usize) -> usize {
    n + 3
}

/// Light-cone radius (in sites) of a state: largest `|i|` with a nonzero
/// amplitude.
pub(crate) fn support_radius(psi: &StateVector) -> usize {
    psi.iter()
        .filter(|(_, a)| a.norm_sqr() > 0.0)
        .map(|(f, _)| BasisIndex::from_flat(f).site.unsigned_abs() as usize)
        .max()
        .unwrap_or(0)
}

/// Sites with `|i| > edge_cutoff` count as boundary.
pub(crate) fn edge_cutoff(half_width: usize) -> i64 {
    half_width as i64 - 2
}

pub(crate) fn check_boundary(step: usize, mass: f64) -> Result<()> {
    if mass > BOUNDARY_TOLERANCE {
        return Err(Error::LightConeViolation { step, mass });
    }
    Ok(())
}

/// Runs a catalog model from the standard initial state on the default
/// window.
pub fn occupation(
    model: &ModelSpec,
    n: usize,
    engine: Engine,
    exec: Execution,
) -> Result<OccupationDistribution> {
    occupation_in_window(model, n, engine, exec, default_half_width(n))
}

pub fn occupation_in_window(
    model: &ModelSpec,
    n: usize,
    engine: Engine,
    exec: Execution,
    half_width: usize,
) -> Result<OccupationDistribution> {
    let walk = catalog(model, half_width)?;
    let u = walk.unitary(half_width)?;
    let psi = initial_state(half_width)?;
    engine.run(&u, &psi, n, exec)
}
