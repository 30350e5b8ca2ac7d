//! Strong-coupling map from the Hubbard chain to the Heisenberg
//! antiferromagnet, and the concurrence it predicts for a two-electron
//! collision at momentum `k0`.
//!
//! The correlator `<S^z_i S^z_j> = cos(theta) / 4` defines the deviation
//! angle. Matching one-particle band energy `t cos k0` to the chain's energy
//! per site `J (3/4) cos theta` with `J = 4 t^2 / U` fixes
//! `cos theta = U cos k0 / (3 t)`. The concurrence is then
//! `C = (1 + |cos theta|) / 2`, except at the band edges `k0 = 0, pi` where
//! flip and non-flip amplitudes coincide and `C = 1`. Note that this makes
//! `C(k0)` jump from `2/3` to `1` at the edges when `t = U`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin_geometry::check_polar;

/// Tolerance for recognising `k0` as a band edge.
pub const BAND_EDGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergParams {
    pub coupling_j: f64,
}

/// `J = 4 t^2 / U`
pub fn j_coupling(t: f64, u: f64) -> Result<HeisenbergParams> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("hopping must be positive, got {t}")));
    }
    if !(u > 0.0) {
        return Err(Error::Domain(format!(
            "exchange coupling undefined for onsite U = {u}"
        )));
    }
    Ok(HeisenbergParams {
        coupling_j: 4.0 * t * t / u,
    })
}

/// `theta = arccos(4 czz)` for `|czz| <= 1/4`.
pub fn theta_from_correlator(czz: f64) -> Result<f64> {
    if !czz.is_finite() || czz.abs() > 0.25 {
        return Err(Error::Domain(format!(
            "spin correlator {czz} violates |<SzSz>| <= 1/4"
        )));
    }
    Ok((4.0 * czz).acos())
}

/// `E = J (3/4) cos theta`
pub fn heisenberg_energy_per_site(params: HeisenbergParams, theta: f64) -> Result<f64> {
    let theta = check_polar(theta)?;
    Ok(params.coupling_j * 0.75 * theta.cos())
}

/// Deviation angle from `t cos k0 = J (3/4) cos theta`.
pub fn theta_from_k0(t: f64, u: f64, k0: f64) -> Result<f64> {
    let j = j_coupling(t, u)?;
    let cos_theta = t * k0.cos() / (0.75 * j.coupling_j);
    if !cos_theta.is_finite() || cos_theta.abs() > 1.0 {
        return Err(Error::Domain(format!(
            "energy matching needs cos(theta) = {cos_theta:.6} outside [-1, 1] (t = {t}, U = {u}, k0 = {k0})"
        )));
    }
    Ok(cos_theta.acos())
}

/// `Phi_B = pi (1 + |cos theta|)`
pub fn generalized_berry_phase(theta: f64) -> Result<f64> {
    let theta = check_polar(theta)?;
    Ok(PI * (1.0 + theta.cos().abs()))
}

/// `C = Phi_B / 2 pi = (1 + |cos theta|) / 2`; exactly 1 at `theta = 0, pi`.
pub fn predict_concurrence(theta: f64) -> Result<f64> {
    let theta = check_polar(theta)?;
    if theta == 0.0 || theta == PI {
        return Ok(1.0);
    }
    Ok(generalized_berry_phase(theta)? / TAU)
}

pub fn is_band_edge(k0: f64) -> bool {
    k0.sin().abs() < BAND_EDGE_TOL
}

/// Prediction for a collision at momentum `k0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumPrediction {
    pub k0: f64,
    pub theta: f64,
    pub berry_phase: f64,
    pub concurrence: f64,
    /// True when the band-edge branch (`C = 1`) was used.
    pub band_edge: bool,
}

/// Applies the energy matching, then the band-edge branch.
///
/// The energy matching is validated first, so a `k0` that sits on a band
/// edge still reports a domain error when `U cos k0 / 3t` is out of range.
/// On the edge branch the deviation angle is reported as `0` (`k0 = 0`) or
/// `pi` (`k0 = pi`).
pub fn predict_from_k0(t: f64, u: f64, k0: f64) -> Result<MomentumPrediction> {
    let matched = theta_from_k0(t, u, k0)?;
    let (theta, band_edge) = if is_band_edge(k0) {
        (if k0.cos() > 0.0 { 0.0 } else { PI }, true)
    } else {
        (matched, false)
    };
    let berry_phase = generalized_berry_phase(theta)?;
    Ok(MomentumPrediction {
        k0,
        theta,
        berry_phase,
        concurrence: predict_concurrence(theta)?,
        band_edge,
    })
}
