//! Spin-site basis, the positive/negative split and the initial state.
//!
//! Basis states `|i⟩⊗|↑⟩` and `|i⟩⊗|↓⟩` are enumerated by a single *flat*
//! index: `2i` for spin up and `2i + 1` for spin down. With this ordering
//! the positive subspace `|0↓⟩, |1↑⟩, |1↓⟩, …` is exactly `flat ≥ 1`, so
//! both projections are diagonal indicators.

use std::fmt;

use num_traits::Zero;

use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisIndex {
    pub site: i64,
    pub spin: Spin,
}

impl BasisIndex {
    pub fn new(site: i64, spin: Spin) -> Self {
        BasisIndex { site, spin }
    }

    pub fn flat(self) -> i64 {
        match self.spin {
            Spin::Up => 2 * self.site,
            Spin::Down => 2 * self.site + 1,
        }
    }

    pub fn from_flat(flat: i64) -> Self {
        let site = flat.div_euclid(2);
        let spin = if flat.rem_euclid(2) == 0 { Spin::Up } else { Spin::Down };
        BasisIndex { site, spin }
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arrow = match self.spin {
            Spin::Up => '↑',
            Spin::Down => '↓',
        };
        write!(f, "|{}{}⟩", self.site, arrow)
    }
}

/// Which half of the state space a flat index belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Half {
    Negative,
    Positive,
}

impl Half {
    pub fn of(flat: i64) -> Half {
        if is_positive(flat) {
            Half::Positive
        } else {
            Half::Negative
        }
    }
}

#[inline]
pub fn is_positive(flat: i64) -> bool {
    flat >= 1
}

/// Lowest flat index of a window with the given half-width.
#[inline]
pub fn window_lo(half_width: usize) -> i64 {
    -2 * half_width as i64
}

/// Highest flat index of a window with the given half-width.
#[inline]
pub fn window_hi(half_width: usize) -> i64 {
    2 * half_width as i64 + 1
}

#[inline]
pub fn window_dim(half_width: usize) -> usize {
    4 * half_width + 2
}

/// Amplitudes over the sites `-L..=L` of a symmetric window, both spins.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    half_width: usize,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn zeros(half_width: usize) -> Result<Self> {
        if half_width < 1 {
            return Err(Error::InvalidWindow(half_width));
        }
        Ok(StateVector {
            half_width,
            amps: vec![C64::zero(); window_dim(half_width)],
        })
    }

    /// Builds a state from amplitudes ordered by flat index, starting at
    /// `window_lo(half_width)`.
    pub fn from_amplitudes(half_width: usize, amps: Vec<C64>) -> Result<Self> {
        if half_width < 1 {
            return Err(Error::InvalidWindow(half_width));
        }
        if amps.len() != window_dim(half_width) {
            return Err(Error::OutOfRange(format!(
                "expected {} amplitudes, got {}",
                window_dim(half_width),
                amps.len()
            )));
        }
        Ok(StateVector { half_width, amps })
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

    /// Amplitude at a flat index; zero outside the window.
    pub fn get(&self, flat: i64) -> C64 {
        if flat < self.lo() || flat > self.hi() {
            return C64::zero();
        }
        self.amps[(flat - self.lo()) as usize]
    }

    pub fn set(&mut self, flat: i64, value: C64) -> Result<()> {
        if flat < self.lo() || flat > self.hi() {
            return Err(Error::OutOfRange(format!("flat index {flat} outside window")));
        }
        let lo = self.lo();
        self.amps[(flat - lo) as usize] = value;
        Ok(())
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    /// `(flat, amplitude)` pairs over the whole window.
    pub fn iter(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        let lo = self.lo();
        self.amps.iter().enumerate().map(move |(k, &a)| (lo + k as i64, a))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn project_positive(&self) -> StateVector {
        self.project(Half::Positive)
    }

    pub fn project_negative(&self) -> StateVector {
        self.project(Half::Negative)
    }

    pub fn project(&self, half: Half) -> StateVector {
        let mut out = self.clone();
        let lo = self.lo();
        for (k, a) in out.amps.iter_mut().enumerate() {
            if Half::of(lo + k as i64) != half {
                *a = C64::zero();
            }
        }
        out
    }

    /// Squared norm carried by sites with `|i| ≥ half_width - depth + 1`,
    /// i.e. by the outermost `depth` sites on each side.
    pub fn edge_mass(&self, depth: usize) -> f64 {
        let cutoff = self.half_width as i64 - depth as i64;
        self.iter()
            .filter(|(f, _)| BasisIndex::from_flat(*f).site.abs() > cutoff)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }
}

/// `(|0↑⟩ + i|0↓⟩)/√2`, the starting state of every quantum walk here.
pub fn initial_state(half_width: usize) -> Result<StateVector> {
    let mut psi = StateVector::zeros(half_width)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    psi.set(0, C64::new(s, 0.0))?;
    psi.set(1, C64::new(0.0, s))?;
    Ok(psi)
}
