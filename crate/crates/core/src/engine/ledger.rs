//! One density block per positive count.

use super::block::{half_dim, SplitBlock};
use super::{check_boundary, edge_cutoff, support_radius, Diagnostics, OccupationDistribution};
use crate::basis::StateVector;
use crate::par::{self, Execution};
use crate::{BandedUnitary, Error, Result, C64};

/// Blocks `ρ_{k,j}`, `j = 0..=k`, after `k` monitored steps.
///
/// `trace ρ_{k,j}` is the probability of `j` positive outcomes so far.
/// Before the first step the ledger holds the pure initial state.
pub struct DensityLedger<'a> {
    u: &'a BandedUnitary,
    psi: StateVector,
    step: usize,
    start_radius: usize,
    blocks: Vec<SplitBlock>,
    boundary_mass: f64,
    exec: Execution,
}

impl<'a> DensityLedger<'a> {
    pub fn new(u: &'a BandedUnitary, psi: &StateVector, exec: Execution) -> Result<Self> {
        if psi.half_width() != u.half_width() {
            return Err(Error::WindowMismatch { left: u.half_width(), right: psi.half_width() });
        }
        Ok(DensityLedger {
            u,
            psi: psi.clone(),
            step: 0,
            start_radius: support_radius(psi),
            blocks: Vec::new(),
            boundary_mass: 0.0,
            exec,
        })
    }

    pub fn step_count(&self) -> usize {
        self.step
    }

    /// Light-cone radius after `k ≥ 1` steps, clipped to the window.
    fn radius(&self, k: usize) -> usize {
        (self.start_radius + k + 1).min(self.u.half_width())
    }

    pub fn blocks(&self) -> &[SplitBlock] {
        &self.blocks
    }

    pub fn boundary_mass(&self) -> f64 {
        self.boundary_mass
    }

    pub fn traces(&self) -> Vec<f64> {
        if self.step == 0 {
            return vec![self.psi.norm_sqr()];
        }
        self.blocks.iter().map(|b| b.trace().re).collect()
    }

    pub fn step(&mut self) -> Result<()> {
        let cutoff = edge_cutoff(self.u.half_width());
        let next = self.step + 1;
        let radius = self.radius(next);
        if self.step == 0 {
            let phi = first_step(self.u, &self.psi, radius);
            self.blocks = vec![
                SplitBlock::outer(&phi, radius, false),
                SplitBlock::outer(&phi, radius, true),
            ];
        } else {
            let u = self.u;
            let old = std::mem::take(&mut self.blocks);
            let halves = par::map_vec(self.exec, old, |b| b.conjugate(u, radius, true));
            let d = half_dim(radius);
            let mut blocks = Vec::with_capacity(halves.len() + 1);
            let mut carry = vec![C64::default(); d * d];
            for (neg, pos) in halves {
                blocks.push(SplitBlock::from_parts(radius, neg, carry));
                carry = pos;
            }
            blocks.push(SplitBlock::from_parts(radius, vec![C64::default(); d * d], carry));
            self.blocks = blocks;
        }
        self.step = next;
        let mass: f64 = self.blocks.iter().map(|b| b.mass_beyond(cutoff)).sum();
        self.boundary_mass = self.boundary_mass.max(mass);
        check_boundary(next, mass)
    }
}

/// `U ψ` restricted to the flats of the given radius.
pub(crate) fn first_step(u: &BandedUnitary, psi: &StateVector, radius: usize) -> Vec<C64> {
    let lo = -2 * radius as i64;
    let mut phi = vec![C64::default(); 2 * half_dim(radius)];
    u.apply_range(psi.amplitudes(), psi.lo(), &mut phi, lo);
    phi
}

pub fn density_recursion(
    u: &BandedUnitary,
    psi: &StateVector,
    n: usize,
) -> Result<OccupationDistribution> {
    density_recursion_with(u, psi, n, Execution::default())
}

pub fn density_recursion_with(
    u: &BandedUnitary,
    psi: &StateVector,
    n: usize,
    exec: Execution,
) -> Result<OccupationDistribution> {
    let mut ledger = DensityLedger::new(u, psi, exec)?;
    for _ in 0..n {
        ledger.step()?;
    }
    OccupationDistribution::from_raw(
        ledger.traces(),
        Diagnostics { boundary_mass: ledger.boundary_mass(), ..Default::default() },
    )
}
