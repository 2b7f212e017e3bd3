//! Coins, Verblunsky coefficient sequences and the model catalog.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};

use crate::cmv::BandedUnitary;
use crate::riesz;
use crate::{Error, Result, C64};

/// A 2×2 coin, rows `(c11, c12)` and `(c21, c22)`.
///
/// Column 1 is the image of spin up, column 2 of spin down; row 1 feeds
/// the step to the right (spin up), row 2 the step to the left (spin down).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coin {
    pub c11: C64,
    pub c12: C64,
    pub c21: C64,
    pub c22: C64,
}

impl Coin {
    pub fn new(c11: C64, c12: C64, c21: C64, c22: C64) -> Self {
        Coin { c11, c12, c21, c22 }
    }

    pub fn real(c11: f64, c12: f64, c21: f64, c22: f64) -> Self {
        Coin::new(c11.into(), c12.into(), c21.into(), c22.into())
    }

    pub fn identity() -> Self {
        Coin::real(1.0, 0.0, 0.0, 1.0)
    }

    /// `(1, 1; 1, -1)/√2`.
    pub fn hadamard() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Coin::real(s, s, s, -s)
    }

    /// Rows `(ρ, -α)` and `(conj α, ρ)` with `ρ = sqrt(1 - |α|²)`.
    pub fn from_alpha(alpha: C64) -> Result<Self> {
        let rho = rho_of(alpha)?;
        Ok(Coin::from_alpha_rho(alpha, rho))
    }

    /// Same layout as [`Coin::from_alpha`] with a precomputed `ρ`.
    pub fn from_alpha_rho(alpha: C64, rho: f64) -> Self {
        Coin::new(rho.into(), -alpha, alpha.conj(), rho.into())
    }

    /// Largest deviation of `C†C` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let n1 = self.c11.norm_sqr() + self.c21.norm_sqr() - 1.0;
        let n2 = self.c12.norm_sqr() + self.c22.norm_sqr() - 1.0;
        let ov = self.c11.conj() * self.c12 + self.c21.conj() * self.c22;
        n1.abs().max(n2.abs()).max(ov.norm())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }
}

/// `sqrt(1 - |α|²)`, factored to keep precision when `|α|` is close to 1.
pub fn rho_of(alpha: C64) -> Result<f64> {
    let m = alpha.norm();
    if !(m < 1.0) {
        return Err(Error::coefficient(alpha));
    }
    Ok(((1.0 - m) * (1.0 + m)).sqrt())
}

/// The coin whose entries follow from a single Verblunsky coefficient.
pub fn coin_from_alpha(alpha: C64) -> Result<Coin> {
    Coin::from_alpha(alpha)
}

/// Exact `(α_i, ρ_i)` for the site-dependent model at a non-negative even
/// index: `α = ((i+1)^10 - 1)/((i+1)^10 + 1)`, `ρ = 2(i+1)^5/((i+1)^10 + 1)`.
pub fn polynomial_coin_alpha(i: i64) -> Result<(BigRational, BigRational)> {
    if i < 0 || i % 2 != 0 {
        return Err(Error::OutOfDomain(i));
    }
    let base = BigInt::from(i + 1);
    let p5: BigInt = Pow::pow(&base, 5u32);
    let p10 = &p5 * &p5;
    let one = BigInt::one();
    let den = &p10 + &one;
    let alpha = BigRational::new(&p10 - &one, den.clone());
    let rho = BigRational::new(BigInt::from(2) * p5, den);
    Ok((alpha, rho))
}

fn polynomial_coin_alpha_f64(i: i64) -> Result<(f64, f64)> {
    let (a, r) = polynomial_coin_alpha(i)?;
    Ok((ratio_to_f64(&a), ratio_to_f64(&r)))
}

pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

type AlphaFn = Arc<dyn Fn(i64) -> Option<C64> + Send + Sync>;
type AlphaRhoFn = Arc<dyn Fn(i64) -> Option<(C64, f64)> + Send + Sync>;
type CoinFn = Arc<dyn Fn(i64) -> Option<Coin> + Send + Sync>;

#[derive(Clone)]
enum Support {
    Constant(C64),
    Fair { nonneg: Arc<[C64]>, minus_one: C64 },
    Formula { eval: AlphaFn, label: String },
    /// `(α_j, ρ_j)` pairs, for coefficients so close to the unit circle
    /// that `ρ` cannot be recovered from the rounded `α`.
    Exact { eval: AlphaRhoFn, label: String },
}

/// Doubly-infinite sequence `j ↦ α_j` with `|α_j| < 1`.
///
/// Values are produced on demand; finite tables are only ever extended by
/// the reflection `α_j = α_{-2-j}`.
#[derive(Clone)]
pub struct VerblunskySequence {
    support: Support,
}

impl VerblunskySequence {
    pub fn constant(alpha: C64) -> Result<Self> {
        rho_of(alpha)?;
        Ok(VerblunskySequence { support: Support::Constant(alpha) })
    }

    /// Extends `α_0, α_1, …` to negative indices by `α_j = α_{-2-j}`,
    /// leaving `α_{-1}` as given.
    pub fn fair_extend(nonneg: Vec<C64>, alpha_minus_one: C64) -> Result<Self> {
        for &a in nonneg.iter().chain(std::iter::once(&alpha_minus_one)) {
            rho_of(a)?;
        }
        Ok(VerblunskySequence {
            support: Support::Fair { nonneg: nonneg.into(), minus_one: alpha_minus_one },
        })
    }

    /// A sequence given by a formula; `None` marks an undefined index.
    pub fn from_fn<F>(label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(i64) -> Option<C64> + Send + Sync + 'static,
    {
        VerblunskySequence {
            support: Support::Formula { eval: Arc::new(eval), label: label.into() },
        }
    }

    /// Like [`from_fn`](Self::from_fn), with `ρ_j` supplied alongside.
    pub fn from_fn_with_rho<F>(label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(i64) -> Option<(C64, f64)> + Send + Sync + 'static,
    {
        VerblunskySequence {
            support: Support::Exact { eval: Arc::new(eval), label: label.into() },
        }
    }

    fn lookup(&self, j: i64) -> Result<(C64, f64)> {
        let a = match &self.support {
            Support::Constant(a) => Some(*a),
            Support::Fair { nonneg, minus_one } => match j {
                -1 => Some(*minus_one),
                j if j >= 0 => nonneg.get(j as usize).copied(),
                j => nonneg.get((-2 - j) as usize).copied(),
            },
            Support::Formula { eval, .. } => eval(j),
            Support::Exact { eval, .. } => {
                let (a, rho) = eval(j).ok_or(Error::IncompleteModel(j))?;
                if !(rho > 0.0 && rho <= 1.0) || (a.norm_sqr() + rho * rho - 1.0).abs() > 1e-12 {
                    return Err(Error::coefficient(a));
                }
                return Ok((a, rho));
            }
        };
        let a = a.ok_or(Error::IncompleteModel(j))?;
        Ok((a, rho_of(a)?))
    }

    pub fn alpha(&self, j: i64) -> Result<C64> {
        Ok(self.lookup(j)?.0)
    }

    pub fn rho(&self, j: i64) -> Result<f64> {
        Ok(self.lookup(j)?.1)
    }

    /// Number of stored non-negative coefficients for table-backed sequences.
    pub fn table_len(&self) -> Option<usize> {
        match &self.support {
            Support::Fair { nonneg, .. } => Some(nonneg.len()),
            _ => None,
        }
    }
}

impl fmt::Debug for VerblunskySequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.support {
            Support::Constant(a) => write!(f, "VerblunskySequence::Constant({a})"),
            Support::Fair { nonneg, minus_one } => write!(
                f,
                "VerblunskySequence::Fair {{ len: {}, alpha_minus_one: {minus_one} }}",
                nonneg.len()
            ),
            Support::Formula { label, .. } | Support::Exact { label, .. } => {
                write!(f, "VerblunskySequence::Formula({label})")
            }
        }
    }
}

/// `j ↦ α_j` for the site-dependent model: zero at odd indices, the
/// rational formula at even indices, reflected by the fair rule.
pub fn polynomial_coin_sequence() -> VerblunskySequence {
    VerblunskySequence::from_fn_with_rho("polynomial-coin", |j| {
        let j = if j >= 0 { j } else { -2 - j };
        if j % 2 != 0 {
            return Some((C64::zero(), 1.0));
        }
        polynomial_coin_alpha_f64(j).ok().map(|(a, r)| (C64::new(a, 0.0), r))
    })
}

/// Site ↦ coin.
#[derive(Clone)]
pub enum CoinSequence {
    Constant(Coin),
    Formula { eval: CoinFn, label: String },
}

impl CoinSequence {
    pub fn from_fn<F>(label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(i64) -> Option<Coin> + Send + Sync + 'static,
    {
        CoinSequence::Formula { eval: Arc::new(eval), label: label.into() }
    }

    /// Coins `C_i` built from `α_{2i}` of a sequence, the odd coefficients
    /// being ignored.
    pub fn from_even_alphas(alphas: VerblunskySequence) -> Self {
        CoinSequence::from_fn("even-alphas", move |i| {
            let a = alphas.alpha(2 * i).ok()?;
            Coin::from_alpha(a).ok()
        })
    }

    pub fn coin(&self, site: i64) -> Result<Coin> {
        match self {
            CoinSequence::Constant(c) => Ok(*c),
            CoinSequence::Formula { eval, .. } => eval(site).ok_or(Error::IncompleteModel(site)),
        }
    }
}

impl fmt::Debug for CoinSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoinSequence::Constant(c) => write!(f, "CoinSequence::Constant({c:?})"),
            CoinSequence::Formula { label, .. } => write!(f, "CoinSequence::Formula({label})"),
        }
    }
}

/// The site-dependent model as coins: `C_i` uses `α_{2i}` for `i ≥ 0` and
/// `C_i = C_{-1-i}` for `i < 0`.
pub fn polynomial_coins() -> CoinSequence {
    CoinSequence::from_fn("polynomial-coin", |i| {
        let site = if i >= 0 { i } else { -1 - i };
        let (a, r) = polynomial_coin_alpha_f64(2 * site).ok()?;
        Some(Coin::from_alpha_rho(C64::new(a, 0.0), r))
    })
}

pub const DEFAULT_RIESZ_DEPTH: u32 = 6;

/// The walks of the catalog.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Hadamard,
    Constant { alpha: f64 },
    PolynomialCoin,
    Riesz { alpha_minus_one: C64, depth: u32 },
}

impl ModelSpec {
    pub fn riesz_default() -> Self {
        ModelSpec::Riesz { alpha_minus_one: C64::zero(), depth: DEFAULT_RIESZ_DEPTH }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelSpec::Constant { alpha } => {
                if !(alpha.abs() < 1.0) {
                    return Err(Error::coefficient(C64::new(*alpha, 0.0)));
                }
            }
            ModelSpec::Riesz { alpha_minus_one, depth } => {
                rho_of(*alpha_minus_one)?;
                if *depth < 1 {
                    return Err(Error::OutOfRange("Riesz truncation depth must be ≥ 1".into()));
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn name(&self) -> String {
        match self {
            ModelSpec::Hadamard => "hadamard".into(),
            ModelSpec::Constant { alpha } => format!("constant({alpha})"),
            ModelSpec::PolynomialCoin => "polynomial-coin".into(),
            ModelSpec::Riesz { alpha_minus_one, depth } => {
                format!("riesz(alpha_-1={alpha_minus_one}, depth={depth})")
            }
        }
    }
}

/// A concrete walk: coins per site, or a Verblunsky sequence.
#[derive(Debug, Clone)]
pub enum Walk {
    Coined(CoinSequence),
    Cmv(VerblunskySequence),
}

impl Walk {
    pub fn unitary(&self, half_width: usize) -> Result<BandedUnitary> {
        match self {
            Walk::Coined(coins) => BandedUnitary::build_coined(coins, half_width),
            Walk::Cmv(alphas) => BandedUnitary::build_cmv(alphas, half_width),
        }
    }
}

/// Resolves a model into a walk able to cover a window of `half_width`
/// sites (relevant only for table-backed sequences).
pub fn catalog(model: &ModelSpec, half_width: usize) -> Result<Walk> {
    model.validate()?;
    Ok(match model {
        ModelSpec::Hadamard => Walk::Coined(CoinSequence::Constant(Coin::hadamard())),
        ModelSpec::Constant { alpha } => {
            Walk::Coined(CoinSequence::Constant(Coin::from_alpha(C64::new(*alpha, 0.0))?))
        }
        ModelSpec::PolynomialCoin => Walk::Coined(polynomial_coins()),
        ModelSpec::Riesz { alpha_minus_one, depth } => {
            let count = 2 * half_width + 4;
            Walk::Cmv(riesz::riesz_walk_alphas(count, *alpha_minus_one, *depth)?)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: C64, b: f64) -> bool {
        (a - C64::new(b, 0.0)).norm() < 1e-15
    }

    #[test]
    fn fair_extension_reflects() {
        let nonneg: Vec<C64> = (0..21).map(|k| C64::new(0.01 * k as f64, -0.02)).collect();
        let seq = VerblunskySequence::fair_extend(nonneg.clone(), C64::zero()).unwrap();
        assert_eq!(seq.alpha(-2).unwrap(), nonneg[0]);
        assert_eq!(seq.alpha(-3).unwrap(), nonneg[1]);
        assert_eq!(seq.alpha(-4).unwrap(), nonneg[2]);
        assert_eq!(seq.alpha(-1).unwrap(), C64::zero());
        for j in 0..=20 {
            assert_eq!(seq.alpha(j).unwrap(), seq.alpha(-2 - j).unwrap());
        }
        assert_eq!(seq.alpha(21), Err(Error::IncompleteModel(21)));
    }

    #[test]
    fn fair_extension_of_zero() {
        let seq = VerblunskySequence::fair_extend(vec![C64::zero(); 10], C64::zero()).unwrap();
        assert!((-11..10).all(|j| seq.alpha(j).unwrap() == C64::zero()));
    }

    #[test]
    fn fair_extension_rejects_large_modulus() {
        assert!(matches!(
            VerblunskySequence::fair_extend(vec![C64::new(1.0, 0.0)], C64::zero()),
            Err(Error::InvalidCoefficient { .. })
        ));
        assert!(matches!(
            VerblunskySequence::fair_extend(vec![], C64::new(0.0, 1.5)),
            Err(Error::InvalidCoefficient { .. })
        ));
    }

    #[test]
    fn coin_from_alpha_examples() {
        assert_eq!(coin_from_alpha(C64::zero()).unwrap(), Coin::identity());
        let c = coin_from_alpha(C64::new(0.6, 0.0)).unwrap();
        assert!(close(c.c11, 0.8) && close(c.c12, -0.6) && close(c.c21, 0.6) && close(c.c22, 0.8));
        assert!(coin_from_alpha(C64::new(0.6, 0.8)).is_err());
    }

    #[test]
    fn rho_identity() {
        for k in 0..1000 {
            let a = C64::from_polar(k as f64 / 1000.0, 0.37 * k as f64);
            let r = rho_of(a).unwrap();
            assert!((r * r + a.norm_sqr() - 1.0).abs() < 1e-14);
        }
    }

    proptest! {
        #[test]
        fn coins_are_unitary(r in 0.0f64..0.999_999, phase in 0.0f64..6.3) {
            let c = coin_from_alpha(C64::from_polar(r, phase)).unwrap();
            prop_assert!(c.is_unitary(1e-12));
        }
    }

    #[test]
    fn polynomial_coin_values() {
        let (a0, r0) = polynomial_coin_alpha(0).unwrap();
        assert!(a0.is_zero() && r0.is_one());
        let (a2, _) = polynomial_coin_alpha(2).unwrap();
        // 3^10 = 59049
        assert_eq!(a2, BigRational::new(59048.into(), 59050.into()));
        assert_eq!(a2, BigRational::new(29524.into(), 29525.into()));
        assert_eq!(polynomial_coin_alpha(3), Err(Error::OutOfDomain(3)));
        assert_eq!(polynomial_coin_alpha(-2), Err(Error::OutOfDomain(-2)));
    }

    #[test]
    fn polynomial_coin_exact_pythagoras() {
        for i in (0..=40).step_by(2) {
            let (a, r) = polynomial_coin_alpha(i).unwrap();
            assert!((&a * &a + &r * &r).is_one(), "i = {i}");
        }
    }

    #[test]
    fn polynomial_coin_monotone_to_one() {
        let mut prev = BigRational::from_integer((-1).into());
        for i in (0..=100).step_by(2) {
            let (a, _) = polynomial_coin_alpha(i).unwrap();
            assert!(a > prev && a < BigRational::one());
            prev = a;
        }
    }

    #[test]
    fn catalog_hadamard_and_constant() {
        let Walk::Coined(h) = catalog(&ModelSpec::Hadamard, 10).unwrap() else { panic!() };
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for i in -10..=10 {
            assert_eq!(h.coin(i).unwrap(), Coin::real(s, s, s, -s));
        }
        let Walk::Coined(c) = catalog(&ModelSpec::Constant { alpha: 0.6 }, 10).unwrap() else {
            panic!()
        };
        let c0 = c.coin(0).unwrap();
        assert!(close(c0.c11, 0.8) && close(c0.c12, -0.6) && close(c0.c21, 0.6));
        assert!((-10..=10).all(|i| c.coin(i).unwrap() == c0));
        assert!(catalog(&ModelSpec::Constant { alpha: 1.0 }, 10).is_err());
    }

    #[test]
    fn catalog_polynomial_coin_is_fair() {
        let Walk::Coined(c) = catalog(&ModelSpec::PolynomialCoin, 10).unwrap() else { panic!() };
        assert_eq!(c.coin(0).unwrap(), Coin::identity());
        assert_eq!(c.coin(-1).unwrap(), c.coin(0).unwrap());
        for i in 0..30 {
            assert_eq!(c.coin(i).unwrap(), c.coin(-1 - i).unwrap());
            assert!(c.coin(i).unwrap().is_unitary(1e-12));
        }
        let seq = polynomial_coin_sequence();
        for j in 0..40 {
            assert_eq!(seq.alpha(j).unwrap(), seq.alpha(-2 - j).unwrap());
            if j % 2 == 1 {
                assert_eq!(seq.alpha(j).unwrap(), C64::zero());
            }
        }
    }
}
