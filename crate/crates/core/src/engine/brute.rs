//! Exhaustive sum over measurement records.

use num_traits::Zero;

use super::{check_boundary, edge_cutoff, Diagnostics, OccupationDistribution};
use crate::basis::{is_positive, BasisIndex, StateVector};
use crate::par::{self, Execution};
use crate::{BandedUnitary, Error, Result, C64};

/// Largest step count accepted by [`brute_force`].
pub const BRUTE_FORCE_LIMIT: usize = 20;

/// Levels of the record tree that are split into independent subtasks.
const SPLIT_DEPTH: usize = 8;

struct Tree<'a> {
    u: &'a BandedUnitary,
    n: usize,
    lo: i64,
    edge: Vec<usize>,
    exec: Execution,
}

pub fn brute_force(u: &BandedUnitary, psi: &StateVector, n: usize) -> Result<OccupationDistribution> {
    brute_force_with(u, psi, n, Execution::default())
}

/// `p_r = Σ ‖(P_n U)⋯(P_1 U)ψ‖²` over all `(P_1, …, P_n) ∈ {P, Q}^n` with
/// exactly `r` factors equal to `P`.
pub fn brute_force_with(
    u: &BandedUnitary,
    psi: &StateVector,
    n: usize,
    exec: Execution,
) -> Result<OccupationDistribution> {
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::BruteForceLimit { n, limit: BRUTE_FORCE_LIMIT });
    }
    if psi.half_width() != u.half_width() {
        return Err(Error::WindowMismatch { left: u.half_width(), right: psi.half_width() });
    }
    let cutoff = edge_cutoff(u.half_width());
    let edge = psi
        .iter()
        .enumerate()
        .filter(|(_, (f, _))| BasisIndex::from_flat(*f).site.abs() > cutoff)
        .map(|(k, _)| k)
        .collect();
    let tree = Tree { u, n, lo: u.lo(), edge, exec };
    let (probs, boundary) = tree.node(psi.amplitudes().to_vec(), 0, 0);
    check_boundary(n, boundary)?;
    OccupationDistribution::from_raw(
        probs,
        Diagnostics { boundary_mass: boundary, ..Default::default() },
    )
}

impl Tree<'_> {
    /// Splits `U v` into its negative and positive parts; also returns the
    /// edge mass of `U v`.
    fn branch(&self, v: &[C64]) -> (Vec<C64>, Vec<C64>, f64) {
        let mut w = vec![C64::zero(); v.len()];
        self.u.apply_range(v, self.lo, &mut w, self.lo);
        let edge: f64 = self.edge.iter().map(|&k| w[k].norm_sqr()).sum();
        let mut pos = vec![C64::zero(); v.len()];
        for (k, a) in w.iter_mut().enumerate() {
            if is_positive(self.lo + k as i64) {
                pos[k] = *a;
                *a = C64::zero();
            }
        }
        (w, pos, edge)
    }

    fn node(&self, v: Vec<C64>, depth: usize, positives: usize) -> (Vec<f64>, f64) {
        if depth >= SPLIT_DEPTH || depth == self.n {
            let mut probs = vec![0.0; self.n + 1];
            let mut boundary = 0.0;
            self.accumulate(&v, depth, positives, &mut probs, &mut boundary);
            return (probs, boundary);
        }
        let (neg, pos, edge) = self.branch(&v);
        drop(v);
        let ((mut pa, ba), (pb, bb)) = par::join(
            self.exec,
            || self.node(neg, depth + 1, positives),
            || self.node(pos, depth + 1, positives + 1),
        );
        for (a, b) in pa.iter_mut().zip(pb) {
            *a += b;
        }
        (pa, edge + ba + bb)
    }

    fn accumulate(&self, v: &[C64], depth: usize, positives: usize, probs: &mut [f64], boundary: &mut f64) {
        if depth == self.n {
            probs[positives] += v.iter().map(|a| a.norm_sqr()).sum::<f64>();
            return;
        }
        if v.iter().all(|a| a.is_zero()) {
            return;
        }
        let (neg, pos, edge) = self.branch(v);
        *boundary += edge;
        self.accumulate(&neg, depth + 1, positives, probs, boundary);
        self.accumulate(&pos, depth + 1, positives + 1, probs, boundary);
    }
}
