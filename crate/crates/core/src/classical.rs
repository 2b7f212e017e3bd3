//! Occupation time of the fair coin-tossing walk.
//!
//! `S_k` is counted as positive when `S_k > 0`, or when `S_k = 0` and
//! `S_{k-1} > 0`; `N_n` is the number of positive terms among
//! `S_1, …, S_n`. Closed forms are exact rationals.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::par::{self, Execution};
use crate::{Error, Result};

pub type RationalProbability = BigRational;

/// Identifier of the generator layout used by [`monte_carlo`].
pub const RNG_ALGORITHM: &str = "chacha8/stream-per-chunk/65536";

const MC_CHUNK: u64 = 1 << 16;

pub const ENUMERATION_LIMIT: usize = 24;

fn binomial(n: u64, k: u64) -> BigUint {
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn pow2(k: u64) -> BigInt {
    BigInt::one() << k
}

/// `u_k = C(k, k/2) / 2^k` for even `k`.
pub fn u(k: u64) -> Result<RationalProbability> {
    if !k.is_multiple_of(2) {
        return Err(Error::OutOfRange(format!("u_k needs even k, got {k}")));
    }
    Ok(BigRational::new(BigInt::from(binomial(k, k / 2)), pow2(k)))
}

/// `P(N_{2n} = 2r) = u_{2r} u_{2n-2r}`.
pub fn chung_feller(n: u64, r: u64) -> Result<RationalProbability> {
    if r > n {
        return Err(Error::OutOfRange(format!("r = {r} exceeds n = {n}")));
    }
    Ok(u(2 * r)? * u(2 * n - 2 * r)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// `N_{2n+1} = 2r`, `0 ≤ r ≤ n`
    Even,
    /// `N_{2n+1} = 2r - 1`, `1 ≤ r ≤ n + 1`
    Odd,
}

/// Odd step counts:
/// `P(N_{2n+1} = 2r) = u_{2r} u_{2n+2-2r} (n-r+1)/(n+1)` and
/// `P(N_{2n+1} = 2r-1) = u_{2r} u_{2n+2-2r} r/(n+1)`.
pub fn odd_step(n: u64, r: u64, parity: Parity) -> Result<RationalProbability> {
    let ok = match parity {
        Parity::Even => r <= n,
        Parity::Odd => (1..=n + 1).contains(&r),
    };
    if !ok {
        return Err(Error::OutOfRange(format!("r = {r} out of range for n = {n} ({parity:?})")));
    }
    let base = u(2 * r)? * u(2 * n + 2 - 2 * r)?;
    let weight = match parity {
        Parity::Even => n - r + 1,
        Parity::Odd => r,
    };
    Ok(base * BigRational::new(weight.into(), (n + 1).into()))
}

/// Exact law of `N_steps`, indexed by the value of `N`.
pub fn exact_distribution(steps: u64) -> Vec<RationalProbability> {
    let mut probs = vec![BigRational::zero(); steps as usize + 1];
    if steps.is_multiple_of(2) {
        let n = steps / 2;
        for r in 0..=n {
            probs[2 * r as usize] = chung_feller(n, r).expect("r within range");
        }
    } else {
        let n = (steps - 1) / 2;
        for r in 0..=n {
            probs[2 * r as usize] = odd_step(n, r, Parity::Even).expect("r within range");
        }
        for r in 1..=n + 1 {
            probs[2 * r as usize - 1] = odd_step(n, r, Parity::Odd).expect("r within range");
        }
    }
    probs
}

/// Running sums of an exact law.
pub fn cumulative(probs: &[RationalProbability]) -> Vec<RationalProbability> {
    probs
        .iter()
        .scan(BigRational::zero(), |acc, p| {
            *acc += p;
            Some(acc.clone())
        })
        .collect()
}

pub fn to_f64(p: &RationalProbability) -> f64 {
    crate::coin::ratio_to_f64(p)
}

/// Number of positive terms along the path whose `k`-th step is `+1`
/// exactly when bit `k` of `path` is set.
fn positive_count(path: u64, n: usize) -> usize {
    let mut s: i64 = 0;
    let mut count = 0;
    for k in 0..n {
        let prev = s;
        s += if path >> k & 1 == 1 { 1 } else { -1 };
        if s > 0 || (s == 0 && prev > 0) {
            count += 1;
        }
    }
    count
}

/// Exact law of `N_n` by listing all `2^n` paths.
pub fn enumerate_paths(n: usize) -> Result<Vec<RationalProbability>> {
    enumerate_paths_with(n, Execution::default())
}

pub fn enumerate_paths_with(n: usize, exec: Execution) -> Result<Vec<RationalProbability>> {
    if n > ENUMERATION_LIMIT {
        return Err(Error::EnumerationLimit { n, limit: ENUMERATION_LIMIT });
    }
    let split = n.min(8);
    let low_bits = n - split;
    let chunks = par::map_indexed(exec, 1 << split, |hi| {
        let mut counts = vec![0u64; n + 1];
        for lo in 0..1u64 << low_bits {
            let path = (hi as u64) << low_bits | lo;
            counts[positive_count(path, n)] += 1;
        }
        counts
    });
    let mut counts = vec![0u64; n + 1];
    for chunk in chunks {
        for (c, k) in counts.iter_mut().zip(chunk) {
            *c += k;
        }
    }
    let total = pow2(n as u64);
    Ok(counts.into_iter().map(|c| BigRational::new(c.into(), total.clone())).collect())
}

/// Empirical counts of `N_n` over seeded random paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonteCarlo {
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub counts: Vec<u64>,
}

impl MonteCarlo {
    pub fn frequencies(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.trials as f64).collect()
    }
}

/// Trials are split into fixed chunks of 65536; chunk `c` draws from the
/// ChaCha8 stream `c` of `seed`, so counts do not depend on thread count.
pub fn monte_carlo(n: usize, trials: u64, seed: u64) -> Result<MonteCarlo> {
    monte_carlo_with(n, trials, seed, Execution::default())
}

pub fn monte_carlo_with(n: usize, trials: u64, seed: u64, exec: Execution) -> Result<MonteCarlo> {
    if trials == 0 {
        return Err(Error::OutOfRange("trials must be ≥ 1".into()));
    }
    let chunks = trials.div_ceil(MC_CHUNK) as usize;
    let words = n.div_ceil(64).max(1);
    let partial = par::map_indexed(exec, chunks, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64);
        let in_chunk = MC_CHUNK.min(trials - c as u64 * MC_CHUNK);
        let mut counts = vec![0u64; n + 1];
        let mut bits = vec![0u64; words];
        for _ in 0..in_chunk {
            bits.iter_mut().for_each(|w| *w = rng.next_u64());
            let mut s: i64 = 0;
            let mut count = 0;
            for k in 0..n {
                let prev = s;
                s += if bits[k / 64] >> (k % 64) & 1 == 1 { 1 } else { -1 };
                if s > 0 || (s == 0 && prev > 0) {
                    count += 1;
                }
            }
            counts[count] += 1;
        }
        counts
    });
    let mut counts = vec![0u64; n + 1];
    for chunk in partial {
        for (c, k) in counts.iter_mut().zip(chunk) {
            *c += k;
        }
    }
    Ok(MonteCarlo { n, trials, seed, counts })
}

/// `F(x) = (2/π) arcsin(√x)`.
pub fn arcsine_cdf(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange(format!("arcsine law defined on [0, 1], got {x}")));
    }
    Ok(std::f64::consts::FRAC_2_PI * x.sqrt().asin())
}

pub fn arcsine_density(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return f64::INFINITY;
    }
    1.0 / (std::f64::consts::PI * (x * (1.0 - x)).sqrt())
}

/// Discretizes the arcsine law on the grid `r/n`: bin `r` covers
/// `[(r - 1/2)/n, (r + 1/2)/n] ∩ [0, 1]`.
pub fn arcsine_bins(n: usize) -> Vec<f64> {
    let n_f = n.max(1) as f64;
    let edge = |r: f64| arcsine_cdf(((r + 0.5) / n_f).clamp(0.0, 1.0)).expect("clamped");
    (0..=n)
        .map(|r| {
            let hi = if r == n { 1.0 } else { edge(r as f64) };
            let lo = if r == 0 { 0.0 } else { edge(r as f64 - 1.0) };
            hi - lo
        })
        .collect()
}

/// Legendre polynomial by the three-term recurrence.
pub fn legendre(n: usize, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return p0;
    }
    for k in 1..n {
        let k = k as f64;
        let p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Both sides of `Σ_k u_{2k} u_{2n-2k} q^{2k} = P_n((q + 1/q)/2) q^n`.
pub fn legendre_identity_sides(n: usize, q: f64) -> Result<(f64, f64)> {
    if !(q > 0.0) {
        return Err(Error::OutOfRange(format!("q must be positive, got {q}")));
    }
    let us: Vec<f64> = (0..=n)
        .map(|k| crate::coin::ratio_to_f64(&u(2 * k as u64).expect("even")))
        .collect();
    let lhs: f64 = (0..=n).map(|k| us[k] * us[n - k] * q.powi(2 * k as i32)).sum();
    let rhs = legendre(n, (q + q.recip()) / 2.0) * q.powi(n as i32);
    Ok((lhs, rhs))
}

pub fn legendre_identity_residual(n: usize, q: f64) -> Result<f64> {
    let (lhs, rhs) = legendre_identity_sides(n, q)?;
    Ok((lhs - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn u_values() {
        assert_eq!(u(0).unwrap(), q(1, 1));
        assert_eq!(u(2).unwrap(), q(1, 2));
        assert_eq!(u(4).unwrap(), q(3, 8));
        assert_eq!(u(6).unwrap(), q(5, 16));
        assert!(u(3).is_err());
    }

    #[test]
    fn cumulative_of_four_steps() {
        let c = cumulative(&exact_distribution(4));
        assert_eq!(c, vec![q(3, 8), q(3, 8), q(5, 8), q(5, 8), q(1, 1)]);
        assert_eq!(to_f64(&c[2]), 0.625);
    }

    #[test]
    fn chung_feller_small() {
        assert_eq!(chung_feller(1, 0).unwrap(), q(1, 2));
        assert_eq!(chung_feller(1, 1).unwrap(), q(1, 2));
        assert_eq!(chung_feller(2, 0).unwrap(), q(3, 8));
        assert_eq!(chung_feller(2, 1).unwrap(), q(1, 4));
        assert_eq!(chung_feller(2, 2).unwrap(), q(3, 8));
        assert!(chung_feller(2, 3).is_err());
        for n in 0..=12 {
            for r in 0..=n {
                assert_eq!(chung_feller(n, r).unwrap(), chung_feller(n, n - r).unwrap());
            }
        }
    }

    #[test]
    fn odd_step_small() {
        assert_eq!(odd_step(0, 0, Parity::Even).unwrap(), q(1, 2));
        assert_eq!(odd_step(0, 1, Parity::Odd).unwrap(), q(1, 2));
        assert_eq!(exact_distribution(3), vec![q(3, 8), q(1, 8), q(1, 8), q(3, 8)]);
        assert!(odd_step(2, 0, Parity::Odd).is_err());
        assert!(odd_step(2, 3, Parity::Even).is_err());
        for steps in 0..=25 {
            let total: BigRational = exact_distribution(steps).into_iter().sum();
            assert!(total.is_one(), "steps = {steps}");
        }
    }

    #[test]
    fn enumeration_small() {
        // HH and HT both count twice (S_2 = 0 after S_1 > 0 is positive)
        assert_eq!(enumerate_paths(2).unwrap(), vec![q(1, 2), q(0, 1), q(1, 2)]);
        assert_eq!(enumerate_paths(1).unwrap(), vec![q(1, 2), q(1, 2)]);
        assert!(matches!(enumerate_paths(25), Err(Error::EnumerationLimit { .. })));
    }

    #[test]
    fn enumeration_matches_closed_forms() {
        for n in 0..=16u64 {
            assert_eq!(enumerate_paths(n as usize).unwrap(), exact_distribution(n), "n = {n}");
        }
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let a = monte_carlo(10, 200_000, 42).unwrap();
        let b = monte_carlo(10, 200_000, 42).unwrap();
        assert_eq!(a, b);
        let seq = monte_carlo_with(10, 200_000, 42, Execution::Sequential).unwrap();
        assert_eq!(a, seq);
        let c = monte_carlo(10, 200_000, 43).unwrap();
        assert_ne!(a, c);
        let one = monte_carlo(1, 1000, 1).unwrap();
        assert!((one.frequencies().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(monte_carlo(3, 0, 1).is_err());
    }

    #[test]
    fn monte_carlo_statistics() {
        let trials = 1_000_000u64;
        let mc = monte_carlo(4, trials, 2024).unwrap();
        let exact = exact_distribution(4);
        for (f, p) in mc.frequencies().iter().zip(&exact) {
            let p = crate::coin::ratio_to_f64(p);
            let bound = 3.0 * (p * (1.0 - p) / trials as f64).sqrt();
            assert!((f - p).abs() <= bound.max(1e-12), "freq {f} vs {p}");
        }
    }

    #[test]
    fn arcsine_values() {
        let f = |x| arcsine_cdf(x).unwrap();
        assert!((f(0.5) - 0.5).abs() < 1e-15);
        assert_eq!(f(0.0), 0.0);
        assert!((f(1.0) - 1.0).abs() < 1e-15);
        let middle = f(0.55) - f(0.45);
        let edges = f(0.05) + 1.0 - f(0.95);
        assert!((middle - 0.0637).abs() < 1e-4, "{middle}");
        assert!((edges - 0.2871).abs() < 1e-4, "{edges}");
        for k in 0..=1000 {
            let x = k as f64 / 1000.0;
            assert!((f(x) + f(1.0 - x) - 1.0).abs() < 1e-14);
            if k > 0 {
                assert!(f(x) >= f(x - 0.001));
            }
        }
        assert!(arcsine_cdf(1.5).is_err());
        assert!(arcsine_cdf(-0.1).is_err());
    }

    #[test]
    fn arcsine_bins_sum_to_one() {
        for n in [1, 2, 10, 101] {
            let b = arcsine_bins(n);
            assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            assert!(b.iter().all(|p| *p >= 0.0));
        }
    }

    #[test]
    fn legendre_identity() {
        for qv in [0.5, 1.0, 2.0, 4.0] {
            assert_eq!(legendre_identity_residual(1, qv).unwrap(), 0.0);
        }
        for n in 0..=30 {
            for qv in [0.1, 0.5, 1.0, 2.0, 10.0] {
                let (lhs, rhs) = legendre_identity_sides(n, qv).unwrap();
                assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs(), "n={n} q={qv}");
            }
            let (lhs, _) = legendre_identity_sides(n, 1.0).unwrap();
            assert!((lhs - 1.0).abs() < 1e-14);
        }
        assert!(legendre_identity_residual(3, 0.0).is_err());
    }
}
