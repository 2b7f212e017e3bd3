//! Phase-twisted single-block propagation.

use std::f64::consts::PI;

use num_traits::Zero;

use super::block::SplitBlock;
use super::ledger::first_step;
use super::{check_boundary, edge_cutoff, support_radius, Diagnostics, OccupationDistribution};
use crate::basis::StateVector;
use crate::par::{self, pairwise_sum, Execution};
use crate::{BandedUnitary, Error, Result, C64};

pub fn transform_recursion(
    u: &BandedUnitary,
    psi: &StateVector,
    n: usize,
) -> Result<OccupationDistribution> {
    transform_recursion_with(u, psi, n, Execution::default())
}

/// `trace ρ_n(θ)` with `ρ ← Q U ρ U† Q + e^{iθ} P U ρ U† P`, together with
/// the largest edge mass seen along the way (meaningful for `θ = 0`).
pub fn phase_trace(u: &BandedUnitary, psi: &StateVector, n: usize, theta: f64) -> Result<(C64, f64)> {
    propagate(u, psi, n, C64::from_polar(1.0, theta))
}

fn propagate(u: &BandedUnitary, psi: &StateVector, n: usize, z: C64) -> Result<(C64, f64)> {
    if psi.half_width() != u.half_width() {
        return Err(Error::WindowMismatch { left: u.half_width(), right: psi.half_width() });
    }
    if n == 0 {
        return Ok((C64::new(psi.norm_sqr(), 0.0), 0.0));
    }
    let half_width = u.half_width();
    let cutoff = edge_cutoff(half_width);
    let s0 = support_radius(psi);
    let radius = |k: usize| (s0 + k + 1).min(half_width);

    let phi = first_step(u, psi, radius(1));
    let mut block = SplitBlock::outer(&phi, radius(1), false);
    let pos = SplitBlock::outer(&phi, radius(1), true);
    let mut pos_part = pos.positive_part().to_vec();
    pos_part.iter_mut().for_each(|v| *v *= z);
    block = SplitBlock::from_parts(radius(1), block.negative_part().to_vec(), pos_part);
    let mut boundary = block.mass_beyond(cutoff);

    for k in 2..=n {
        let (neg, pos) = block.conjugate(u, radius(k), false);
        block = SplitBlock::from_parts(radius(k), neg, pos);
        block.scale_positive(z);
        boundary = boundary.max(block.mass_beyond(cutoff));
    }
    Ok((block.trace(), boundary))
}

/// Inverse transform of `(t_m)` over `n + 1` phases, summed pairwise.
fn invert(traces: &[C64]) -> (Vec<f64>, f64) {
    let count = traces.len();
    let twiddle: Vec<C64> =
        (0..count).map(|k| C64::from_polar(1.0, -2.0 * PI * k as f64 / count as f64)).collect();
    let mut probs = Vec::with_capacity(count);
    let mut max_imag: f64 = 0.0;
    let mut terms = vec![C64::zero(); count];
    for r in 0..count {
        for (m, t) in traces.iter().enumerate() {
            terms[m] = t * twiddle[(m * r) % count];
        }
        let p = pairwise_sum(&terms) / count as f64;
        max_imag = max_imag.max(p.im.abs());
        probs.push(p.re);
    }
    (probs, max_imag)
}

pub fn transform_recursion_with(
    u: &BandedUnitary,
    psi: &StateVector,
    n: usize,
    exec: Execution,
) -> Result<OccupationDistribution> {
    let count = n + 1;
    let runs = par::map_indexed(exec, count, |m| {
        let z = C64::from_polar(1.0, 2.0 * PI * m as f64 / count as f64);
        propagate(u, psi, n, z)
    });
    let mut traces = Vec::with_capacity(count);
    let mut boundary = 0.0;
    for (m, run) in runs.into_iter().enumerate() {
        let (t, b) = run?;
        if m == 0 {
            boundary = b;
            check_boundary(n, b)?;
        }
        traces.push(t);
    }
    let (probs, max_imag) = invert(&traces);
    OccupationDistribution::from_raw(
        probs,
        Diagnostics { boundary_mass: boundary, max_imag, ..Default::default() },
    )
}
