//! Riesz product measure, its moments and Verblunsky coefficients.
//!
//! The truncated product `Π_{k=1}^{K} (1 + cos(4^k θ)) dθ/2π` expands into
//! `Σ 2^{-t} z^m` over the integers `m = Σ ε_k 4^k` with `ε_k ∈ {-1, 0, 1}`,
//! `t` the number of nonzero digits. That representation is unique, so
//! each moment is either zero or a power of 1/2.
//!
//! Moments follow `c_m = ∫ z^m dμ`, which is also `⟨δ_0, 𝒞^m δ_0⟩` for the
//! CMV matrix `𝒞` of the measure; the Szegő recursion below is written
//! against that convention and [`cmv_moment_check`] closes the loop.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::coin::{ratio_to_f64, rho_of, VerblunskySequence};
use crate::par::{self, Execution};
use crate::{Error, Result, C64};

/// Moments `c_0, …, c_M` of a real symmetric measure (`c_{-m} = c_m`).
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence {
    moments: Vec<BigRational>,
}

impl MomentSequence {
    pub fn new(moments: Vec<BigRational>) -> Self {
        MomentSequence { moments }
    }

    /// Normalized Lebesgue measure: `c_0 = 1`, all others zero.
    pub fn lebesgue(max_order: usize) -> Self {
        let mut moments = vec![BigRational::zero(); max_order + 1];
        moments[0] = BigRational::one();
        MomentSequence { moments }
    }

    /// Poisson-kernel measure with `c_m = a^{|m|}`.
    pub fn geometric(a: BigRational, max_order: usize) -> Self {
        let mut moments = Vec::with_capacity(max_order + 1);
        let mut p = BigRational::one();
        for _ in 0..=max_order {
            moments.push(p.clone());
            p *= &a;
        }
        MomentSequence { moments }
    }

    pub fn max_order(&self) -> usize {
        self.moments.len() - 1
    }

    pub fn get(&self, m: usize) -> Option<&BigRational> {
        self.moments.get(m)
    }

    pub fn as_slice(&self) -> &[BigRational] {
        &self.moments
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.moments.iter().map(ratio_to_f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncationSpec {
    depth: u32,
}

impl TruncationSpec {
    pub fn new(depth: u32) -> Result<Self> {
        if depth < 1 {
            return Err(Error::OutOfRange("truncation depth must be ≥ 1".into()));
        }
        Ok(TruncationSpec { depth })
    }

    pub fn depth(self) -> u32 {
        self.depth
    }

    /// Orders up to which the truncated moments equal the full product's.
    pub fn stable_order(self) -> u64 {
        4u64.saturating_pow(self.depth) / 2
    }
}

/// Number of nonzero digits of `m` in the balanced base-4 expansion over
/// `4^1, …, 4^depth`, or `None` if there is none.
fn lacunary_weight(m: u64, depth: u32) -> Option<u32> {
    if !m.is_multiple_of(4) {
        return None;
    }
    let mut x = m / 4;
    let mut t = 0;
    for _ in 0..depth {
        if x == 0 {
            break;
        }
        match x % 4 {
            0 => {}
            1 => {
                t += 1;
                x -= 1;
            }
            3 => {
                t += 1;
                x += 1;
            }
            _ => return None,
        }
        x /= 4;
    }
    (x == 0).then_some(t)
}

/// Single moment `c_m` of the depth-`K` product.
pub fn riesz_moment(m: u64, spec: TruncationSpec) -> BigRational {
    match lacunary_weight(m, spec.depth) {
        Some(t) => BigRational::new(BigInt::one(), BigInt::one() << t),
        None => BigRational::zero(),
    }
}

pub fn riesz_moments(max_order: usize, spec: TruncationSpec) -> MomentSequence {
    let moments = par::map_indexed(Execution::default(), max_order + 1, |m| {
        riesz_moment(m as u64, spec)
    });
    MomentSequence { moments }
}

/// Density of the truncated product with respect to `dθ/2π`.
pub fn riesz_density(theta: f64, spec: TruncationSpec) -> f64 {
    (1..=spec.depth).map(|k| 1.0 + (4f64.powi(k as i32) * theta).cos()).product()
}

/// Output of [`verblunsky_from_moments`].
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveredAlphas {
    pub alphas: Vec<C64>,
    /// Indices with `|α_j| ≥ 1 - 1e-12`.
    pub ill_conditioned: Vec<usize>,
}

/// Szegő recursion on the moments.
///
/// With monic `Φ_n`, `α_n` is fixed by `Φ_{n+1} = zΦ_n - conj(α_n) Φ_n^*`
/// being orthogonal to 1: `conj(α_n) = ∫ zΦ_n dμ / ∫ Φ_n^* dμ`.
pub fn verblunsky_from_moments(c: &MomentSequence, count: usize) -> Result<RecoveredAlphas> {
    if c.max_order() < count {
        return Err(Error::TooFewCoefficients { need: count + 1, have: c.max_order() + 1 });
    }
    let mom: Vec<C64> = c.to_f64().into_iter().map(C64::from).collect();
    // ∫ z^k dμ for k of either sign
    let moment = |k: i64| -> C64 {
        if k >= 0 {
            mom[k as usize]
        } else {
            mom[(-k) as usize].conj()
        }
    };
    let mut phi = vec![C64::one()];
    let mut alphas = Vec::with_capacity(count);
    let mut ill_conditioned = Vec::new();
    for n in 0..count {
        let num: C64 = phi.iter().enumerate().map(|(k, p)| p * moment(k as i64 + 1)).sum();
        let den: C64 = phi.iter().enumerate().map(|(k, p)| p.conj() * moment((n - k) as i64)).sum();
        if !(den.re > 0.0) {
            return Err(Error::InvalidMeasure(n));
        }
        let alpha_bar = num / den.re;
        let alpha = alpha_bar.conj();
        if !(alpha.norm() < 1.0) {
            return Err(Error::InvalidMeasure(n));
        }
        if alpha.norm() >= 1.0 - 1e-12 {
            ill_conditioned.push(n);
        }
        let mut next = vec![C64::zero(); n + 2];
        for k in 0..=n + 1 {
            let shifted = if k >= 1 { phi[k - 1] } else { C64::zero() };
            let reversed = if k <= n { phi[n - k].conj() } else { C64::zero() };
            next[k] = shifted - alpha_bar * reversed;
        }
        phi = next;
        alphas.push(alpha);
    }
    Ok(RecoveredAlphas { alphas, ill_conditioned })
}

/// `Θ = (conj α, ρ; ρ, -α)` applied to entries `a, a+1` of `v`.
fn apply_theta(v: &mut [C64], a: usize, alpha: C64) -> Result<()> {
    if a + 1 >= v.len() {
        return Ok(());
    }
    let rho = rho_of(alpha)?;
    let (x, y) = (v[a], v[a + 1]);
    v[a] = alpha.conj() * x + rho * y;
    v[a + 1] = rho * x - alpha * y;
    Ok(())
}

/// `max_{m ≤ M} |⟨δ_0, 𝒞^m δ_0⟩ - c_m|` for the semi-infinite CMV matrix
/// `𝒞 = L M`, `L = Θ_0 ⊕ Θ_2 ⊕ …`, `M = 1 ⊕ Θ_1 ⊕ Θ_3 ⊕ …`.
pub fn cmv_moment_check(alphas: &[C64], c: &MomentSequence, max_order: usize) -> Result<f64> {
    let size = 2 * max_order + 4;
    if alphas.len() < size {
        return Err(Error::TooFewCoefficients { need: size, have: alphas.len() });
    }
    if c.max_order() < max_order {
        return Err(Error::TooFewCoefficients { need: max_order + 1, have: c.max_order() + 1 });
    }
    let mom = c.to_f64();
    let mut v = vec![C64::zero(); size];
    v[0] = C64::one();
    let mut worst = (v[0] - mom[0]).norm();
    for m in 1..=max_order {
        for a in (1..size).step_by(2) {
            apply_theta(&mut v, a, alphas[a])?;
        }
        for a in (0..size).step_by(2) {
            apply_theta(&mut v, a, alphas[a])?;
        }
        worst = worst.max((v[0] - mom[m]).norm());
    }
    Ok(worst)
}

/// Fair doubly-infinite extension of the Riesz coefficients
/// `α_0, …, α_{count-1}` of the depth-`depth` product.
pub fn riesz_walk_alphas(count: usize, alpha_minus_one: C64, depth: u32) -> Result<VerblunskySequence> {
    let spec = TruncationSpec::new(depth)?;
    let moments = riesz_moments(count, spec);
    let recovered = verblunsky_from_moments(&moments, count)?;
    VerblunskySequence::fair_extend(recovered.alphas, alpha_minus_one)
}
