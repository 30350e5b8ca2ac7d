//! Single-spin geometric phase and the Bell-coefficient parametrisation of
//! concurrence by the spin deviation angle.
//!
//! A spin whose quantization direction precesses on a cone of half-angle
//! `theta` about the z-axis picks up a geometric phase equal to half the
//! enclosed solid angle, `pi (1 - cos theta)` for the aligned state and
//! `pi (1 + cos theta)` for the anti-aligned one. For a Bell-like state
//! `a|ud> - b|du>` the same angle fixes `|a|` and `|b|`, which gives
//! `C = 2|a||b| = sin^2(theta/2) = |Phi_B| / 2 pi`.

use std::f64::consts::{PI, SQRT_2, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ANGLE_SLACK: f64 = 1e-12;

pub(crate) fn check_polar(theta: f64) -> Result<f64> {
    if !theta.is_finite() || theta < -ANGLE_SLACK || theta > PI + ANGLE_SLACK {
        return Err(Error::Domain(format!(
            "polar angle {theta} outside [0, pi]"
        )));
    }
    Ok(theta.clamp(0.0, PI))
}

/// Direction on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochDirection {
    theta: f64,
    phi: f64,
}

impl BlochDirection {
    /// `theta` must lie in `[0, pi]`; `phi` is wrapped into `[0, 2 pi)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        let theta = check_polar(theta)?;
        if !phi.is_finite() {
            return Err(Error::Domain(format!("azimuth {phi} is not finite")));
        }
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Ok(Self { theta, phi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// Uniform precession about z with angular velocity `omega0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationSchedule {
    omega0: f64,
    steps: usize,
}

impl RotationSchedule {
    pub fn new(omega0: f64, steps: usize) -> Result<Self> {
        if !(omega0 > 0.0 && omega0.is_finite()) {
            return Err(Error::Domain(format!(
                "angular velocity must be positive, got {omega0}"
            )));
        }
        if steps < 2 {
            return Err(Error::Domain(format!(
                "rotation needs at least 2 steps, got {steps}"
            )));
        }
        Ok(Self { omega0, steps })
    }

    /// Unit angular velocity.
    pub fn with_steps(steps: usize) -> Result<Self> {
        Self::new(1.0, steps)
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    /// Period of one full revolution, `2 pi / omega0`.
    pub fn tau(&self) -> f64 {
        TAU / self.omega0
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Azimuth reached at step `k` of the schedule.
    pub fn azimuth_at(&self, k: usize) -> f64 {
        let t = self.tau() * k as f64 / self.steps as f64;
        self.omega0 * t
    }
}

/// Normalized single-qubit state in the `sigma_z` basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitState {
    pub amp_up: Complex64,
    pub amp_down: Complex64,
}

impl QubitState {
    pub fn new(amp_up: Complex64, amp_down: Complex64) -> Result<Self> {
        let norm = (amp_up.norm_sqr() + amp_down.norm_sqr()).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidState("zero or non-finite qubit".into()));
        }
        Ok(Self {
            amp_up: amp_up / norm,
            amp_down: amp_down / norm,
        })
    }

    /// `<self|other>`
    pub fn inner(&self, other: &QubitState) -> Complex64 {
        self.amp_up.conj() * other.amp_up + self.amp_down.conj() * other.amp_down
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp_up.norm_sqr() + self.amp_down.norm_sqr()
    }
}

/// Which instantaneous eigenstate is carried around the loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Up,
    Down,
}

/// Instantaneous eigenstates `(|up_n>, |down_n>)` of the spin along `dir`.
///
/// The lower state carries a relative minus sign,
/// `|down_n> = sin(theta/2)|up_z> - cos(theta/2) e^{i phi}|down_z>`,
/// so that the pair is orthonormal for every direction.
pub fn bloch_eigenstates(dir: BlochDirection) -> (QubitState, QubitState) {
    let (s, c) = (dir.theta / 2.0).sin_cos();
    let phase = Complex64::from_polar(1.0, dir.phi);
    let up = QubitState {
        amp_up: Complex64::new(c, 0.0),
        amp_down: phase * s,
    };
    let down = QubitState {
        amp_up: Complex64::new(s, 0.0),
        amp_down: -phase * c,
    };
    (up, down)
}

/// Closed-form geometric phase after one revolution.
pub fn berry_phase_analytic(theta: f64, branch: Branch) -> Result<f64> {
    let theta = check_polar(theta)?;
    Ok(match branch {
        Branch::Up => PI * (1.0 - theta.cos()),
        Branch::Down => PI * (1.0 + theta.cos()),
    })
}

/// Discrete (Pancharatnam) geometric phase of `|up_n(theta, phi)>` carried
/// once around the azimuthal loop.
///
/// The phase is `sum_k arg <psi_k|psi_{k+1}>` over the closed loop, which is
/// the discretisation of `-i \oint <psi|d psi>`. Increments are summed
/// without reduction modulo `2 pi`, so the fully reversed spin at
/// `theta = pi` accumulates `2 pi` rather than wrapping to zero. The error
/// is second order in the step size.
pub fn cyclic_berry_phase_numeric(theta: f64, schedule: &RotationSchedule) -> Result<f64> {
    let theta = check_polar(theta)?;
    let state_at = |k: usize| -> Result<QubitState> {
        let dir = BlochDirection::new(theta, schedule.azimuth_at(k))?;
        Ok(bloch_eigenstates(dir).0)
    };
    let first = state_at(0)?;
    let mut prev = first;
    let mut total = 0.0;
    for k in 1..=schedule.steps() {
        let next = if k == schedule.steps() {
            first
        } else {
            state_at(k)?
        };
        total += prev.inner(&next).arg();
        prev = next;
    }
    Ok(total)
}

/// Bell-state coefficient magnitudes as functions of the deviation angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellCoefficients {
    pub a_mag: f64,
    pub b_mag: f64,
    pub n: u32,
    pub theta: f64,
}

impl BellCoefficients {
    /// `(a, b) / sqrt(a^2 + b^2)`, giving a state with unit norm.
    pub fn normalized(&self) -> (f64, f64) {
        let norm = self.a_mag.hypot(self.b_mag);
        (self.a_mag / norm, self.b_mag / norm)
    }

    /// `2 |a| |b|` on the unnormalized pair.
    pub fn concurrence(&self) -> f64 {
        2.0 * self.a_mag * self.b_mag
    }
}

/// `|a| = sqrt2 cos^2(n theta / 4)`, `|b| = sqrt2 sin^2(n theta / 4)` for odd `n`.
///
/// These satisfy `|a| = |b| = 1/sqrt2` at `theta = pi` and `|b| = 0` at
/// `theta = 0`. Only `n = 1` keeps both magnitudes monotone on `[0, pi]`.
pub fn bell_coefficients(theta: f64, n: u32) -> Result<BellCoefficients> {
    if n % 2 == 0 {
        return Err(Error::Domain(format!(
            "harmonic index must be odd and positive, got {n}"
        )));
    }
    let theta = check_polar(theta)?;
    let (s, c) = (n as f64 * theta / 4.0).sin_cos();
    Ok(BellCoefficients {
        a_mag: SQRT_2 * c * c,
        b_mag: SQRT_2 * s * s,
        n,
        theta,
    })
}

/// `sin^2(theta/2)`
pub fn concurrence_from_theta(theta: f64) -> Result<f64> {
    let theta = check_polar(theta)?;
    Ok(0.5 * (1.0 - theta.cos()))
}

/// `|phi_b| / 2 pi`
pub fn concurrence_from_berry(phi_b: f64) -> Result<f64> {
    if !phi_b.is_finite() || phi_b.abs() > TAU * (1.0 + ANGLE_SLACK) {
        return Err(Error::Domain(format!(
            "berry phase {phi_b} exceeds 2 pi in magnitude"
        )));
    }
    Ok((phi_b.abs() / TAU).min(1.0))
}
