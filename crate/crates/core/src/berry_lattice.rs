//! Berry phase of a two-electron lattice state under rotation of the spins
//! about the quantization axis.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Region, RegionPartition, TwoElectronState};
use crate::measures::exchange_overlap;

/// Multiplies the up-in-`A`, down-in-`B` amplitudes by `e^{2 i theta}`.
pub fn rotated_state(state: &TwoElectronState, part: &RegionPartition, theta: f64) -> Result<TwoElectronState> {
    part.check(state)?;
    let n = state.num_sites();
    let phase = Complex64::from_polar(1.0, 2.0 * theta);
    let mut out = state.clone();
    let amp = out.amplitudes_mut();
    for i in 0..n {
        for j in 0..n {
            if i != j && part.region_of(i) == Some(Region::A) && part.region_of(j) == Some(Region::B) {
                amp[i * n + j] *= phase;
            }
        }
    }
    Ok(out)
}

/// Closed-form lattice Berry phase `4 pi sum_{i in A, j in B} conj(amp[i][j]) amp[j][i]`.
///
/// Returned as a complex number; its modulus divided by `2 pi` is the overlap
/// concurrence, and the imaginary part vanishes for states whose cross
/// terms are real (singlets, parity-symmetric scattering states).
pub fn lattice_berry_phase(state: &TwoElectronState, part: &RegionPartition) -> Result<Complex64> {
    Ok(exchange_overlap(state, part)? * (4.0 * PI))
}

/// A family of states sampled on a parameter grid spanning `[0, pi]`.
#[derive(Debug, Clone)]
pub struct StateFamily {
    grid: Vec<f64>,
    states: Vec<TwoElectronState>,
}

impl StateFamily {
    pub fn new(grid: Vec<f64>, states: Vec<TwoElectronState>) -> Result<Self> {
        if grid.len() < 3 {
            return Err(Error::Domain(format!(
                "family needs at least 3 grid points, got {}",
                grid.len()
            )));
        }
        if grid.len() != states.len() {
            return Err(Error::Domain("grid and state counts differ".into()));
        }
        if grid[0] != 0.0 || (grid[grid.len() - 1] - PI).abs() > 1e-12 {
            return Err(Error::Domain("family grid must run from 0 to pi".into()));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("family grid must be strictly increasing".into()));
        }
        let n = states[0].num_sites();
        if states.iter().any(|s| s.num_sites() != n) {
            return Err(Error::Domain("family members have different lattice sizes".into()));
        }
        if let Some(s) = states.iter().find(|s| (s.norm_sqr() - 1.0).abs() > 1e-8) {
            return Err(Error::InvalidState(format!(
                "family member has norm^2 {}",
                s.norm_sqr()
            )));
        }
        Ok(Self { grid, states })
    }

    /// Samples `f` on `points` equally spaced values in `[0, pi]`.
    pub fn uniform<F>(points: usize, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<TwoElectronState>,
    {
        if points < 3 {
            return Err(Error::Domain(format!(
                "family needs at least 3 grid points, got {points}"
            )));
        }
        let grid: Vec<f64> = (0..points)
            .map(|k| {
                if k == points - 1 {
                    PI
                } else {
                    PI * k as f64 / (points - 1) as f64
                }
            })
            .collect();
        let states = grid.iter().map(|&t| f(t)).collect::<Result<Vec<_>>>()?;
        Self::new(grid, states)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn states(&self) -> &[TwoElectronState] {
        &self.states
    }
}

/// Result of the numerical connection integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConnectionIntegral {
    /// `Re(-i int <psi|d psi>)`, the geometric phase.
    pub phase: f64,
    /// Imaginary residue; zero up to discretisation error for norm-preserving families.
    pub residue: f64,
}

/// `-i int_0^pi <psi(theta)|d_theta psi(theta)> d theta` by second-order
/// finite differences and the trapezoidal rule.
pub fn berry_connection_integral(family: &StateFamily) -> Result<ConnectionIntegral> {
    let (x, s) = (&family.grid, &family.states);
    let m = x.len();
    let connection: Vec<Complex64> = (0..m)
        .map(|k| {
            // three-point stencil: centred inside, one-sided at the ends
            let (l, c, r) = match k {
                0 => (0, 1, 2),
                k if k == m - 1 => (m - 3, m - 2, m - 1),
                k => (k - 1, k, k + 1),
            };
            let (h1, h2) = (x[c] - x[l], x[r] - x[c]);
            let t = x[k] - x[c];
            // Lagrange derivative weights at t relative to the middle node
            let wl = (2.0 * t - h2) / (h1 * (h1 + h2));
            let wc = (h2 - h1 - 2.0 * t) / (h1 * h2);
            let wr = (2.0 * t + h1) / (h2 * (h1 + h2));
            s[k].inner(&s[l]) * wl + s[k].inner(&s[c]) * wc + s[k].inner(&s[r]) * wr
        })
        .collect();
    let mut integral = Complex64::new(0.0, 0.0);
    for k in 1..m {
        integral += (connection[k - 1] + connection[k]) * (0.5 * (x[k] - x[k - 1]));
    }
    let phi = integral * Complex64::new(0.0, -1.0);
    Ok(ConnectionIntegral {
        phase: phi.re,
        residue: phi.im,
    })
}
