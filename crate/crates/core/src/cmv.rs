//! The one-step unitary on a finite window.
//!
//! Every walk here moves amplitude by at most one site per step, so each
//! row of `U` has at most four nonzero entries in consecutive flat columns.
//! [`BandedUnitary`] stores exactly that strip per row.
//!
//! A CMV walk is built as the product `U = L·M` of two block-diagonal
//! factors made of the 2×2 blocks `Θ_j = (conj α_j, ρ_j; ρ_j, -α_j)`, the
//! even-indexed blocks forming `L` and the odd-indexed ones `M`. In the
//! matrix index `m` of the CMV display, `L` pairs `(2j, 2j+1)` and `M`
//! pairs `(2j-1, 2j)`. The flat basis is aligned with the display through
//!
//! ```text
//!   flat 2k   (|k↑⟩)  <->  m = 2k - 1
//!   flat 2k+1 (|k↓⟩)  <->  m = 2k + 2
//! ```
//!
//! which turns a CMV walk with vanishing odd coefficients into the coined
//! walk with coins `(ρ_{2i}, -α_{2i}; conj α_{2i}, ρ_{2i})` entry by entry,
//! and maps the positive subspace onto `m ≥ 1`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::basis::{window_dim, window_hi, window_lo, StateVector};
use crate::coin::{Coin, CoinSequence, VerblunskySequence};
use crate::{Error, Result, C64};

pub const STRIP: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct BandedUnitary {
    half_width: usize,
    /// first flat column of each row's strip
    starts: Vec<i64>,
    strips: Vec<[C64; STRIP]>,
}

impl BandedUnitary {
    fn from_rows(half_width: usize, rows: Vec<BTreeMap<i64, C64>>) -> Self {
        let lo = window_lo(half_width);
        let mut starts = Vec::with_capacity(rows.len());
        let mut strips = Vec::with_capacity(rows.len());
        for (k, row) in rows.into_iter().enumerate() {
            let r = lo + k as i64;
            let first = row.keys().next().copied().unwrap_or(r);
            let last = row.keys().next_back().copied().unwrap_or(r);
            assert!(last - first < STRIP as i64, "row {r} wider than the strip");
            let mut strip = [C64::zero(); STRIP];
            for (c, v) in row {
                strip[(c - first) as usize] = v;
            }
            starts.push(first);
            strips.push(strip);
        }
        BandedUnitary { half_width, starts, strips }
    }

    /// Coined walk: `U|i↑⟩ = c11|i+1↑⟩ + c21|i-1↓⟩` and
    /// `U|i↓⟩ = c12|i+1↑⟩ + c22|i-1↓⟩`.
    ///
    /// At the two edge sites the component that would leave the window is
    /// reflected into the edge site's other spin state, which keeps the
    /// window exactly unitary.
    pub fn build_coined(coins: &CoinSequence, half_width: usize) -> Result<Self> {
        if half_width < 1 {
            return Err(Error::InvalidWindow(half_width));
        }
        let lo = window_lo(half_width);
        let hi = window_hi(half_width);
        let l = half_width as i64;
        let mut rows = vec![BTreeMap::new(); window_dim(half_width)];
        for i in -l..=l {
            let Coin { c11, c12, c21, c22 } = coins.coin(i)?;
            let right = if i == l { hi } else { 2 * i + 2 };
            let left = if i == -l { lo } else { 2 * i - 1 };
            for (row, col, v) in [
                (right, 2 * i, c11),
                (left, 2 * i, c21),
                (right, 2 * i + 1, c12),
                (left, 2 * i + 1, c22),
            ] {
                rows[(row - lo) as usize].insert(col, v);
            }
        }
        Ok(Self::from_rows(half_width, rows))
    }

    /// CMV walk from a Verblunsky sequence. Blocks of either factor that
    /// straddle the window edge are closed by a unimodular coefficient
    /// (`α = 1`), so only `α_j` with `|j| < 2L` are read.
    pub fn build_cmv(alphas: &VerblunskySequence, half_width: usize) -> Result<Self> {
        if half_width < 1 {
            return Err(Error::InvalidWindow(half_width));
        }
        let lo = window_lo(half_width);
        let hi = window_hi(half_width);
        let inside = |f: i64| (lo..=hi).contains(&f);

        // factor rows: flat -> [(col, value)]
        let mut l_rows: BTreeMap<i64, Vec<(i64, C64)>> = BTreeMap::new();
        let mut m_rows: BTreeMap<i64, Vec<(i64, C64)>> = BTreeMap::new();
        let one = C64::one();

        // M: pairs (2j-1, 2j) carry Θ_{2j-1}; in flat order (2j-1, 2j)
        // the block is (-α, ρ; ρ, conj α).
        let jm_lo = lo.div_euclid(2);
        let jm_hi = (hi + 1).div_euclid(2);
        for j in jm_lo..=jm_hi {
            let (a, b) = (2 * j - 1, 2 * j);
            match (inside(a), inside(b)) {
                (true, true) => {
                    let al = alphas.alpha(2 * j - 1)?;
                    let rho: C64 = alphas.rho(2 * j - 1)?.into();
                    m_rows.insert(a, vec![(a, -al), (b, rho)]);
                    m_rows.insert(b, vec![(a, rho), (b, al.conj())]);
                }
                (false, true) => {
                    m_rows.insert(b, vec![(b, one)]);
                }
                (true, false) => {
                    m_rows.insert(a, vec![(a, -one)]);
                }
                (false, false) => {}
            }
        }

        // L: pairs (2j-1, 2j+2) carry Θ_{2j}; in flat order the block is
        // (conj α, ρ; ρ, -α).
        let jl_lo = (lo - 2).div_euclid(2);
        let jl_hi = (hi + 1).div_euclid(2);
        for j in jl_lo..=jl_hi {
            let (a, b) = (2 * j - 1, 2 * j + 2);
            match (inside(a), inside(b)) {
                (true, true) => {
                    let al = alphas.alpha(2 * j)?;
                    let rho: C64 = alphas.rho(2 * j)?.into();
                    l_rows.insert(a, vec![(a, al.conj()), (b, rho)]);
                    l_rows.insert(b, vec![(a, rho), (b, -al)]);
                }
                (false, true) => {
                    l_rows.insert(b, vec![(b, -one)]);
                }
                (true, false) => {
                    l_rows.insert(a, vec![(a, one)]);
                }
                (false, false) => {}
            }
        }

        let mut rows = vec![BTreeMap::new(); window_dim(half_width)];
        for r in lo..=hi {
            let row = &mut rows[(r - lo) as usize];
            for &(k, lv) in &l_rows[&r] {
                for &(c, mv) in &m_rows[&k] {
                    *row.entry(c).or_insert_with(C64::zero) += lv * mv;
                }
            }
        }
        Ok(Self::from_rows(half_width, rows))
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn lo(&self) -> i64 {
        window_lo(self.half_width)
    }

    pub fn hi(&self) -> i64 {
        window_hi(self.half_width)
    }

    pub fn dim(&self) -> usize {
        self.strips.len()
    }

    /// `(first column, entries)` of a row given by flat index.
    #[inline]
    pub fn row(&self, r: i64) -> (i64, &[C64; STRIP]) {
        let k = (r - self.lo()) as usize;
        (self.starts[k], &self.strips[k])
    }

    pub fn entry(&self, r: i64, c: i64) -> C64 {
        if r < self.lo() || r > self.hi() {
            return C64::zero();
        }
        let (start, strip) = self.row(r);
        let t = c - start;
        if (0..STRIP as i64).contains(&t) {
            strip[t as usize]
        } else {
            C64::zero()
        }
    }

    /// Largest `|r - c|` over the stored nonzero entries.
    pub fn bandwidth(&self) -> i64 {
        let mut w = 0;
        for r in self.lo()..=self.hi() {
            let (start, strip) = self.row(r);
            for (t, v) in strip.iter().enumerate() {
                if *v != C64::zero() {
                    w = w.max((start + t as i64 - r).abs());
                }
            }
        }
        w
    }

    /// Dense row-major copy, rows and columns in flat order.
    pub fn to_dense(&self) -> Vec<Vec<C64>> {
        let lo = self.lo();
        let n = self.dim();
        let mut m = vec![vec![C64::zero(); n]; n];
        for r in lo..=self.hi() {
            let (start, strip) = self.row(r);
            for (t, v) in strip.iter().enumerate() {
                let c = start + t as i64;
                if c >= lo && c <= self.hi() {
                    m[(r - lo) as usize][(c - lo) as usize] = *v;
                }
            }
        }
        m
    }

    /// `max |(U†U - I)_{ab}|` over the window.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        let lo = self.lo();
        let mut cols: Vec<Vec<(usize, C64)>> = vec![Vec::new(); n];
        for r in lo..=self.hi() {
            let (start, strip) = self.row(r);
            for (t, v) in strip.iter().enumerate() {
                if *v != C64::zero() {
                    cols[(start + t as i64 - lo) as usize].push(((r - lo) as usize, *v));
                }
            }
        }
        let mut worst: f64 = 0.0;
        for a in 0..n {
            let b_lo = a.saturating_sub(8);
            let b_hi = (a + 8).min(n - 1);
            for b in b_lo..=b_hi {
                let mut s = C64::zero();
                for &(ra, va) in &cols[a] {
                    for &(rb, vb) in &cols[b] {
                        if ra == rb {
                            s += va.conj() * vb;
                        }
                    }
                }
                if a == b {
                    s -= 1.0;
                }
                worst = worst.max(s.norm());
            }
        }
        worst
    }

    fn check_window(&self, v: &StateVector) -> Result<()> {
        if v.half_width() != self.half_width {
            return Err(Error::WindowMismatch { left: self.half_width, right: v.half_width() });
        }
        Ok(())
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        self.check_window(v)?;
        let mut out = StateVector::zeros(self.half_width)?;
        self.apply_range(v.amplitudes(), self.lo(), out.amplitudes_mut(), self.lo());
        Ok(out)
    }

    pub fn apply_adjoint(&self, v: &StateVector) -> Result<StateVector> {
        self.check_window(v)?;
        let lo = self.lo();
        let src = v.amplitudes();
        let mut out = StateVector::zeros(self.half_width)?;
        let dst = out.amplitudes_mut();
        for r in lo..=self.hi() {
            let x = src[(r - lo) as usize];
            if x == C64::zero() {
                continue;
            }
            let (start, strip) = self.row(r);
            for (t, u) in strip.iter().enumerate() {
                let c = start + t as i64;
                if c >= lo && c <= self.hi() {
                    dst[(c - lo) as usize] += u.conj() * x;
                }
            }
        }
        Ok(out)
    }

    /// `dst = U src` restricted to the flat ranges covered by the slices.
    /// Source entries outside `src` are taken as zero.
    pub fn apply_range(&self, src: &[C64], src_lo: i64, dst: &mut [C64], dst_lo: i64) {
        let src_hi = src_lo + src.len() as i64 - 1;
        for (k, out) in dst.iter_mut().enumerate() {
            let r = dst_lo + k as i64;
            let (start, strip) = self.row(r);
            let mut acc = C64::zero();
            for (t, u) in strip.iter().enumerate() {
                let c = start + t as i64;
                if c >= src_lo && c <= src_hi {
                    acc += u * src[(c - src_lo) as usize];
                }
            }
            *out = acc;
        }
    }

    /// `D U D†` for the diagonal matrix `D = diag(phase(flat))`.
    pub fn gauge_transform<F>(&self, phase: F) -> Result<BandedUnitary>
    where
        F: Fn(i64) -> C64,
    {
        let lo = self.lo();
        let hi = self.hi();
        let phases: Vec<C64> = (lo..=hi).map(&phase).collect();
        for (k, d) in phases.iter().enumerate() {
            if (d.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::NonUnimodularPhase(lo + k as i64));
            }
        }
        let mut out = self.clone();
        for r in lo..=hi {
            let k = (r - lo) as usize;
            let start = out.starts[k];
            for (t, v) in out.strips[k].iter_mut().enumerate() {
                let c = start + t as i64;
                if c >= lo && c <= hi {
                    *v = phases[k] * *v * phases[(c - lo) as usize].conj();
                }
            }
        }
        Ok(out)
    }
}

/// Applies a diagonal gauge to a state.
pub fn gauge_state<F>(v: &StateVector, phase: F) -> StateVector
where
    F: Fn(i64) -> C64,
{
    let mut out = v.clone();
    let lo = v.lo();
    for (k, a) in out.amplitudes_mut().iter_mut().enumerate() {
        *a *= phase(lo + k as i64);
    }
    out
}

/// Diagonal phases taking the Hadamard walk to the coined walk with
/// `α_{2i} = (-1)^i/√2`: `1` on `|i↑⟩` and `(-1)^{i+1}` on `|i↓⟩`.
pub fn hadamard_gauge(flat: i64) -> C64 {
    if flat.rem_euclid(2) == 0 {
        C64::one()
    } else {
        let site = flat.div_euclid(2);
        if site.rem_euclid(2) == 0 {
            -C64::one()
        } else {
            C64::one()
        }
    }
}

/// The Verblunsky sequence gauge-equivalent to the Hadamard walk.
pub fn hadamard_alphas() -> VerblunskySequence {
    VerblunskySequence::from_fn("hadamard-gauge", |j| {
        if j.rem_euclid(2) == 1 {
            return Some(C64::zero());
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let sign = if (j / 2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        Some(C64::new(sign * s, 0.0))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{initial_state, BasisIndex, Spin};
    use crate::coin::polynomial_coin_sequence;
    use rand::{Rng, SeedableRng};

    fn flat(site: i64, spin: Spin) -> i64 {
        BasisIndex::new(site, spin).flat()
    }

    fn random_state(rng: &mut impl Rng, half_width: usize, support: i64) -> StateVector {
        let mut v = StateVector::zeros(half_width).unwrap();
        for f in -2 * support..=2 * support + 1 {
            v.set(f, C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .unwrap();
        }
        let n = v.norm_sqr().sqrt();
        v.amplitudes_mut().iter_mut().for_each(|a| *a /= n);
        v
    }

    /// Entry of the doubly-infinite CMV display at matrix position (m, k),
    /// written out from the L·M product in the display's own indexing.
    fn display_entry(alphas: &VerblunskySequence, m: i64, k: i64) -> C64 {
        let theta = |j: i64, r: i64, c: i64| -> C64 {
            let a = alphas.alpha(j).unwrap();
            let rho: C64 = alphas.rho(j).unwrap().into();
            match (r, c) {
                (0, 0) => a.conj(),
                (0, 1) | (1, 0) => rho,
                _ => -a,
            }
        };
        // L pairs (2j, 2j+1) with Θ_{2j}; M pairs (2j-1, 2j) with Θ_{2j-1}
        let l = |r: i64, c: i64| -> C64 {
            let j = r.div_euclid(2);
            if c.div_euclid(2) != j {
                return C64::zero();
            }
            theta(2 * j, r - 2 * j, c - 2 * j)
        };
        let mm = |r: i64, c: i64| -> C64 {
            let j = (r + 1).div_euclid(2);
            if (c + 1).div_euclid(2) != j {
                return C64::zero();
            }
            theta(2 * j - 1, r - (2 * j - 1), c - (2 * j - 1))
        };
        (k - 3..=k + 3).map(|q| l(m, q) * mm(q, k)).sum()
    }

    fn to_flat(m: i64) -> i64 {
        if m.rem_euclid(2) == 0 {
            m - 1
        } else {
            m + 1
        }
    }

    #[test]
    fn display_rows_match_written_entries() {
        let nonneg: Vec<C64> = (0..12).map(|k| C64::new(0.05 * k as f64, 0.03)).collect();
        let al = VerblunskySequence::fair_extend(nonneg, C64::new(0.2, -0.1)).unwrap();
        let a = |j| al.alpha(j).unwrap();
        let r = |j| C64::from(al.rho(j).unwrap());
        // row containing ρ_{-1}conj(α_0), -α_{-1}conj(α_0), ρ_0 conj(α_1), ρ_0ρ_1
        let row0 = [
            (-1, r(-1) * a(0).conj()),
            (0, -a(-1) * a(0).conj()),
            (1, r(0) * a(1).conj()),
            (2, r(0) * r(1)),
        ];
        let row1 = [(-1, r(-1) * r(0)), (0, -a(-1) * r(0)), (1, -a(0) * a(1).conj()), (2, -a(0) * r(1))];
        let rowm2 = [
            (-3, r(-3) * a(-2).conj()),
            (-2, -a(-3) * a(-2).conj()),
            (-1, r(-2) * a(-1).conj()),
            (0, r(-2) * r(-1)),
        ];
        for (m, row) in [(0, row0), (1, row1), (-2, rowm2)] {
            for (k, v) in row {
                assert!((display_entry(&al, m, k) - v).norm() < 1e-15, "({m},{k})");
            }
        }
        // and the flat-basis build reproduces the display under the alignment
        let u = BandedUnitary::build_cmv(&al, 5).unwrap();
        for m in -7..=7 {
            for k in -7..=7 {
                let want = display_entry(&al, m, k);
                let got = u.entry(to_flat(m), to_flat(k));
                assert!((want - got).norm() < 1e-15, "({m},{k})");
            }
        }
    }

    #[test]
    fn cmv_free_case_is_permutation() {
        let al = VerblunskySequence::constant(C64::zero()).unwrap();
        let u = BandedUnitary::build_cmv(&al, 6).unwrap();
        let dense = u.to_dense();
        for row in &dense {
            let units = row.iter().filter(|v| (v.norm() - 1.0).abs() < 1e-15).count();
            let zeros = row.iter().filter(|v| v.norm() == 0.0).count();
            assert_eq!((units, zeros), (1, row.len() - 1));
        }
        // interior ones sit exactly at the ρρ positions of the display
        for m in -8..=8 {
            for k in -8..=8 {
                let d = display_entry(&al, m, k);
                assert!(d == C64::zero() || d == C64::one());
                assert_eq!(u.entry(to_flat(m), to_flat(k)), d);
            }
        }
        // and it is the free coined walk: up moves right, down moves left
        assert_eq!(u.entry(flat(3, Spin::Up), flat(2, Spin::Up)), C64::one());
        assert_eq!(u.entry(flat(1, Spin::Down), flat(2, Spin::Down)), C64::one());
    }

    #[test]
    fn identity_coins_shift() {
        let u = BandedUnitary::build_coined(&CoinSequence::Constant(Coin::identity()), 5).unwrap();
        for i in -4..=4 {
            assert_eq!(u.entry(flat(i + 1, Spin::Up), flat(i, Spin::Up)), C64::one());
            assert_eq!(u.entry(flat(i - 1, Spin::Down), flat(i, Spin::Down)), C64::one());
        }
        assert!(u.unitarity_defect() < 1e-15);
    }

    #[test]
    fn hadamard_one_and_two_steps() {
        let u = BandedUnitary::build_coined(&CoinSequence::Constant(Coin::hadamard()), 6).unwrap();
        let psi = initial_state(6).unwrap();
        let v = u.apply(&psi).unwrap();
        let half = |re: f64, im: f64| C64::new(re / 2.0, im / 2.0);
        for (f, a) in v.iter() {
            let want = if f == flat(1, Spin::Up) {
                half(1.0, 1.0)
            } else if f == flat(-1, Spin::Down) {
                half(1.0, -1.0)
            } else {
                C64::zero()
            };
            assert!((a - want).norm() < 1e-15, "flat {f}");
        }
        // U|1↑⟩ = (|2↑⟩ + |0↓⟩)/√2, U|-1↓⟩ = (|0↑⟩ - |-2↓⟩)/√2
        let w = u.apply(&v).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let expect = [
            (flat(2, Spin::Up), half(1.0, 1.0) * s),
            (flat(0, Spin::Down), half(1.0, 1.0) * s),
            (flat(0, Spin::Up), half(1.0, -1.0) * s),
            (flat(-2, Spin::Down), -half(1.0, -1.0) * s),
        ];
        for (f, a) in w.iter() {
            let want = expect.iter().find(|(g, _)| *g == f).map(|e| e.1).unwrap_or_default();
            assert!((a - want).norm() < 1e-15, "flat {f}");
        }
    }

    #[test]
    fn unitarity_of_builds() {
        let c = CoinSequence::Constant(Coin::from_alpha(C64::new(12.0 / 13.0, 0.0)).unwrap());
        let u = BandedUnitary::build_coined(&c, 64).unwrap();
        assert!(u.unitarity_defect() < 1e-10);
        assert!(u.bandwidth() <= 4);
        let al = polynomial_coin_sequence();
        let u = BandedUnitary::build_cmv(&al, 40).unwrap();
        assert!(u.unitarity_defect() < 1e-10);
        assert!(u.bandwidth() <= 4);
        let al = VerblunskySequence::from_fn("random", |j| {
            Some(C64::from_polar(0.9 * ((j * 37 % 11) as f64 / 11.0), j as f64))
        });
        let u = BandedUnitary::build_cmv(&al, 30).unwrap();
        assert!(u.unitarity_defect() < 1e-10);
        assert!(u.bandwidth() <= 4);
    }

    #[test]
    fn cmv_with_zero_odd_alphas_is_coined() {
        let al = polynomial_coin_sequence();
        let cmv = BandedUnitary::build_cmv(&al, 20).unwrap();
        let coined = BandedUnitary::build_coined(&crate::coin::polynomial_coins(), 20).unwrap();
        // identical away from the edge closures
        for r in -36..=36 {
            for c in -36..=36 {
                let (x, y) = (cmv.entry(r, c), coined.entry(r, c));
                assert!((x - y).norm() < 1e-15, "({r},{c}): {x} vs {y}");
            }
        }
    }

    #[test]
    fn apply_preserves_norm_and_adjoint_inverts() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let al = VerblunskySequence::from_fn("random", |j| {
            Some(C64::from_polar(0.3 + 0.05 * (j.rem_euclid(7) as f64), 0.1 * j as f64))
        });
        let u = BandedUnitary::build_cmv(&al, 12).unwrap();
        for _ in 0..20 {
            let v = random_state(&mut rng, 12, 8);
            let w = u.apply(&v).unwrap();
            assert!((w.norm_sqr() - 1.0).abs() < 1e-12);
            let back = u.apply_adjoint(&w).unwrap();
            for (a, b) in back.amplitudes().iter().zip(v.amplitudes()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
        let other = StateVector::zeros(3).unwrap();
        assert!(matches!(u.apply(&other), Err(Error::WindowMismatch { .. })));
    }

    #[test]
    fn gauge_identity_and_errors() {
        let u = BandedUnitary::build_coined(&CoinSequence::Constant(Coin::hadamard()), 4).unwrap();
        assert_eq!(u.gauge_transform(|_| C64::one()).unwrap(), u);
        assert_eq!(
            u.gauge_transform(|f| if f == 3 { C64::new(2.0, 0.0) } else { C64::one() }),
            Err(Error::NonUnimodularPhase(3))
        );
    }

    #[test]
    fn hadamard_gauge_maps_to_cmv_form() {
        let had = BandedUnitary::build_coined(&CoinSequence::Constant(Coin::hadamard()), 10).unwrap();
        let target = BandedUnitary::build_cmv(&hadamard_alphas(), 10).unwrap();
        let gauged = had.gauge_transform(hadamard_gauge).unwrap();
        for r in -16..=16 {
            for c in -16..=16 {
                assert!((gauged.entry(r, c) - target.entry(r, c)).norm() < 1e-15, "({r},{c})");
            }
        }
    }

    #[test]
    fn light_cone_support() {
        let models: Vec<BandedUnitary> = vec![
            BandedUnitary::build_coined(&CoinSequence::Constant(Coin::hadamard()), 45).unwrap(),
            BandedUnitary::build_cmv(
                &VerblunskySequence::from_fn("dense", |j| {
                    Some(C64::from_polar(0.5, 0.3 * j as f64))
                }),
                45,
            )
            .unwrap(),
        ];
        for u in &models {
            let mut v = initial_state(45).unwrap();
            for k in 1..=40 {
                v = u.apply(&v).unwrap();
                for (f, a) in v.iter() {
                    if BasisIndex::from_flat(f).site.abs() > k + 1 {
                        assert_eq!(a, C64::zero(), "step {k} flat {f}");
                    }
                }
            }
        }
    }
}
