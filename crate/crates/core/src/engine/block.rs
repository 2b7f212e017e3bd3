//! Density blocks split by the positive/negative subspaces.
//!
//! After the first monitored step every density block commutes with the
//! projections, so it is stored as two square pieces: the negative part
//! on flats `[-2s, 0]` and the positive part on `[1, 2s+1]`, where `s` is
//! the current light-cone radius in sites.

use num_traits::Zero;

use crate::cmv::{BandedUnitary, STRIP};
use crate::C64;

/// Zero columns on either side of each scratch row; wide enough for any
/// strip that touches the source range.
const PAD: usize = STRIP;

#[derive(Debug, Clone, PartialEq)]
pub struct SplitBlock {
    radius: usize,
    neg: Vec<C64>,
    pos: Vec<C64>,
}

#[inline]
pub(crate) fn half_dim(radius: usize) -> usize {
    2 * radius + 1
}

#[inline]
fn neg_lo(radius: usize) -> i64 {
    -2 * radius as i64
}

const POS_LO: i64 = 1;

impl SplitBlock {
    pub fn zeros(radius: usize) -> Self {
        let d = half_dim(radius);
        SplitBlock { radius, neg: vec![C64::zero(); d * d], pos: vec![C64::zero(); d * d] }
    }

    /// `|φ⟩⟨φ|` restricted to one half; `phi` holds amplitudes on the flats
    /// `[-2·radius, 2·radius+1]`.
    pub(crate) fn outer(phi: &[C64], radius: usize, positive: bool) -> Self {
        let d = half_dim(radius);
        let mut b = SplitBlock::zeros(radius);
        let (part, src) = if positive {
            (&mut b.pos, &phi[d..])
        } else {
            (&mut b.neg, &phi[..d])
        };
        for r in 0..d {
            for c in 0..d {
                part[r * d + c] = src[r] * src[c].conj();
            }
        }
        b
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn dim(&self) -> usize {
        half_dim(self.radius)
    }

    /// Entry at flat indices; zero across the split or outside the range.
    pub fn get(&self, r: i64, c: i64) -> C64 {
        let d = self.dim() as i64;
        if r <= 0 && c <= 0 {
            let (i, j) = (r - neg_lo(self.radius), c - neg_lo(self.radius));
            if i < 0 || j < 0 {
                return C64::zero();
            }
            self.neg[(i * d + j) as usize]
        } else if r >= 1 && c >= 1 {
            let (i, j) = (r - POS_LO, c - POS_LO);
            if i >= d || j >= d {
                return C64::zero();
            }
            self.pos[(i * d + j) as usize]
        } else {
            C64::zero()
        }
    }

    pub fn negative_part(&self) -> &[C64] {
        &self.neg
    }

    pub fn positive_part(&self) -> &[C64] {
        &self.pos
    }

    pub fn trace(&self) -> C64 {
        let d = self.dim();
        (0..d).map(|k| self.neg[k * d + k] + self.pos[k * d + k]).sum()
    }

    /// Diagonal weight on sites with `|i| > cutoff`.
    pub fn mass_beyond(&self, cutoff: i64) -> f64 {
        let d = self.dim();
        let mut m = 0.0;
        for k in 0..d {
            let f_neg = neg_lo(self.radius) + k as i64;
            let f_pos = POS_LO + k as i64;
            if f_neg.div_euclid(2).abs() > cutoff {
                m += self.neg[k * d + k].re;
            }
            if f_pos.div_euclid(2).abs() > cutoff {
                m += self.pos[k * d + k].re;
            }
        }
        m
    }

    /// Largest deviation from Hermiticity over both parts.
    pub fn hermitian_defect(&self) -> f64 {
        let d = self.dim();
        let mut w: f64 = 0.0;
        for part in [&self.neg, &self.pos] {
            for r in 0..d {
                for c in r..d {
                    w = w.max((part[r * d + c] - part[c * d + r].conj()).norm());
                }
            }
        }
        w
    }

    /// Dense copy of one half (row-major), flats ascending.
    pub fn dense_part(&self, positive: bool) -> Vec<Vec<C64>> {
        let d = self.dim();
        let part = if positive { &self.pos } else { &self.neg };
        (0..d).map(|r| part[r * d..(r + 1) * d].to_vec()).collect()
    }

    pub(crate) fn scale_positive(&mut self, z: C64) {
        self.pos.iter_mut().for_each(|v| *v *= z);
    }

    /// Conjugates by `U` into a block of radius `new_radius`, keeping the
    /// two diagonal pieces `(Q U ρ U† Q, P U ρ U† P)`.
    pub(crate) fn conjugate(
        &self,
        u: &BandedUnitary,
        new_radius: usize,
        hermitian: bool,
    ) -> (Vec<C64>, Vec<C64>) {
        let db = half_dim(new_radius);
        let ds = self.dim();
        let mut scratch = Vec::new();
        let mut neg = vec![C64::zero(); db * db];
        let mut pos = vec![C64::zero(); db * db];
        let (nb, pb) = (neg_lo(new_radius), POS_LO);
        let (ns, ps) = (neg_lo(self.radius), POS_LO);
        conj_add(u, &self.neg, ns, ds, nb, db, &mut neg, hermitian, &mut scratch);
        conj_add(u, &self.pos, ps, ds, nb, db, &mut neg, hermitian, &mut scratch);
        conj_add(u, &self.pos, ps, ds, pb, db, &mut pos, hermitian, &mut scratch);
        conj_add(u, &self.neg, ns, ds, pb, db, &mut pos, hermitian, &mut scratch);
        if hermitian {
            mirror_upper(&mut neg, db);
            mirror_upper(&mut pos, db);
        }
        (neg, pos)
    }

    pub(crate) fn from_parts(radius: usize, neg: Vec<C64>, pos: Vec<C64>) -> Self {
        debug_assert_eq!(neg.len(), half_dim(radius).pow(2));
        debug_assert_eq!(pos.len(), half_dim(radius).pow(2));
        SplitBlock { radius, neg, pos }
    }
}

fn mirror_upper(m: &mut [C64], d: usize) {
    for r in 0..d {
        m[r * d + r].im = 0.0;
        for c in r + 1..d {
            m[c * d + r] = m[r * d + c].conj();
        }
    }
}

/// `out += U[B, S] ρ U[B, S]†` where `ρ` lives on flats `[s_lo, s_lo + ds)`
/// and `out` on `[b_lo, b_lo + db)`. With `upper_only` only `q ≥ r` entries
/// of `out` are touched.
#[allow(clippy::too_many_arguments)]
fn conj_add(
    u: &BandedUnitary,
    rho: &[C64],
    s_lo: i64,
    ds: usize,
    b_lo: i64,
    db: usize,
    out: &mut [C64],
    upper_only: bool,
    scratch: &mut Vec<C64>,
) {
    let s_hi = s_lo + ds as i64 - 1;
    let width = ds + 2 * PAD;
    scratch.clear();
    scratch.resize(db * width, C64::zero());

    // rows of B whose strip meets S, with the strip base relative to the
    // padded scratch row
    let mut active: Vec<(usize, usize)> = Vec::new();
    let mut coupled: Vec<(usize, usize, [C64; STRIP])> = Vec::new();
    for k in 0..db {
        let r = b_lo + k as i64;
        let (start, strip) = u.row(r);
        let end = start + STRIP as i64 - 1;
        if end < s_lo || start > s_hi {
            continue;
        }
        let base = (start - s_lo + PAD as i64) as usize;
        let conj = strip.map(|v| v.conj());
        coupled.push((k, base, conj));

        let x = &mut scratch[k * width + PAD..k * width + PAD + ds];
        let mut any = false;
        for (t, &coef) in strip.iter().enumerate() {
            let c = start + t as i64;
            if c < s_lo || c > s_hi || coef == C64::zero() {
                continue;
            }
            any = true;
            let src = &rho[(c - s_lo) as usize * ds..(c - s_lo + 1) as usize * ds];
            for (xv, sv) in x.iter_mut().zip(src) {
                *xv += coef * sv;
            }
        }
        if any {
            active.push((k, k * width));
        }
    }

    for &(k, xoff) in &active {
        let x = &scratch[xoff..xoff + width];
        let row = &mut out[k * db..(k + 1) * db];
        for &(q, base, ref conj) in &coupled {
            if upper_only && q < k {
                continue;
            }
            let xs = &x[base..base + STRIP];
            let acc = xs[0] * conj[0] + xs[1] * conj[1] + xs[2] * conj[2] + xs[3] * conj[3];
            row[q] += acc;
        }
    }
}
