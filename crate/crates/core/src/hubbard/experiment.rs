//! The collision experiment: two opposite-spin packets fly at each other,
//! scatter, and the spin concurrence between the two halves is read off.

use serde::{Deserialize, Serialize};

use super::propagate::{default_propagators, ExactPropagator, KrylovPropagator};
use super::{
    build_hamiltonian, extract_from_weights, initial_packets, Boundary, HubbardParams, ScatteringResult,
    SpinLabel, WavePacketSpec,
};
use crate::angle::deserialize_angle;
use crate::berry_lattice::lattice_berry_phase;
use crate::error::{Error, Result};
use crate::heisenberg::{predict_from_k0, MomentumPrediction};
use crate::lattice::{sector_weights, Region, RegionPartition, SectorWeights, TwoElectronState};

pub const SCATTER_SCHEMA_VERSION: u32 = 1;

/// Allowed gap between the Hubbard concurrence and the Heisenberg prediction
/// before the report flags a discrepancy.
pub const HEISENBERG_AGREEMENT_TOL: f64 = 0.15;

/// When the final state is read out.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimePolicy {
    /// Sample up to the time the transmitted packets reach each other's
    /// starting points and keep the best-separated state after the collision.
    #[default]
    Auto,
    Fixed(f64),
}

/// Inclusive, 1-based site ranges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionsConfig {
    pub a: [usize; 2],
    pub b: [usize; 2],
}

/// Experiment configuration, read from TOML.
///
/// ```toml
/// N = 64
/// t = 1.0
/// U = 1.0
/// k0 = "pi/2"
/// sigma = 6.0
/// centers = [16.0, 48.0]
/// method = "krylov"
/// dt = 0.05
/// T_policy = "auto"          # or { fixed = 16.0 }
/// regions = { a = [1, 32], b = [33, 64] }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatterConfig {
    #[serde(rename = "N")]
    pub sites: usize,
    #[serde(rename = "t")]
    pub hopping: f64,
    #[serde(rename = "U")]
    pub onsite_u: f64,
    #[serde(default)]
    pub boundary: Boundary,
    #[serde(deserialize_with = "deserialize_angle")]
    pub k0: f64,
    pub sigma: f64,
    /// Packet centres, 1-based; the left one carries the up spin.
    pub centers: [f64; 2],
    #[serde(default)]
    pub regions: Option<RegionsConfig>,
    #[serde(default = "default_method")]
    pub method: String,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_krylov_dim")]
    pub krylov_dim: usize,
    #[serde(default = "default_krylov_tol")]
    pub krylov_tol: f64,
    #[serde(default = "default_max_exact_sites")]
    pub max_exact_sites: usize,
    #[serde(rename = "T_policy", default)]
    pub t_policy: TimePolicy,
    /// Sampling interval of the automatic policy.
    #[serde(default = "default_sample_dt")]
    pub sample_dt: f64,
}

fn default_method() -> String {
    "krylov".into()
}
fn default_dt() -> f64 {
    0.05
}
fn default_krylov_dim() -> usize {
    30
}
fn default_krylov_tol() -> f64 {
    1e-12
}
fn default_max_exact_sites() -> usize {
    ExactPropagator::default().max_sites
}
fn default_sample_dt() -> f64 {
    0.25
}

impl ScatterConfig {
    /// The reference collision: `N = 64`, `t = U = 1`, `k0 = pi/2`, `sigma = 6`.
    pub fn reference() -> Self {
        Self {
            sites: 64,
            hopping: 1.0,
            onsite_u: 1.0,
            boundary: Boundary::Open,
            k0: std::f64::consts::FRAC_PI_2,
            sigma: 6.0,
            centers: [16.0, 48.0],
            regions: None,
            method: default_method(),
            dt: default_dt(),
            krylov_dim: default_krylov_dim(),
            krylov_tol: default_krylov_tol(),
            max_exact_sites: default_max_exact_sites(),
            t_policy: TimePolicy::Auto,
            sample_dt: default_sample_dt(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn partition(&self) -> Result<RegionPartition> {
        match self.regions {
            None => RegionPartition::halves(self.sites),
            Some(r) => {
                let range = |[lo, hi]: [usize; 2]| -> Result<std::ops::RangeInclusive<usize>> {
                    if lo == 0 || hi < lo {
                        return Err(Error::Config(format!("bad region range [{lo}, {hi}]")));
                    }
                    Ok(lo - 1..=hi - 1)
                };
                RegionPartition::new(self.sites, range(r.a)?, range(r.b)?)
            }
        }
    }

    fn packets(&self) -> (WavePacketSpec, WavePacketSpec) {
        let (l, r) = if self.centers[0] <= self.centers[1] {
            (self.centers[0], self.centers[1])
        } else {
            (self.centers[1], self.centers[0])
        };
        (
            WavePacketSpec {
                center: l - 1.0,
                width_sigma: self.sigma,
                momentum: self.k0,
                spin: SpinLabel::Up,
            },
            WavePacketSpec {
                center: r - 1.0,
                width_sigma: self.sigma,
                momentum: -self.k0,
                spin: SpinLabel::Down,
            },
        )
    }

    /// Times at which the state is inspected.
    pub fn sample_times(&self) -> Result<Vec<f64>> {
        match self.t_policy {
            TimePolicy::Fixed(t) => {
                if !(t >= 0.0 && t.is_finite()) {
                    return Err(Error::Config(format!("fixed time must be non-negative, got {t}")));
                }
                Ok(vec![t])
            }
            TimePolicy::Auto => {
                let speed = 2.0 * self.hopping * self.k0.sin().abs();
                if speed < 1e-6 {
                    return Err(Error::Config(
                        "automatic measurement time needs a nonzero group velocity; use a fixed T_policy".into(),
                    ));
                }
                if !(self.sample_dt > 0.0) {
                    return Err(Error::Config("sample_dt must be positive".into()));
                }
                let gap = (self.centers[1] - self.centers[0]).abs();
                // transmitted packets arrive at each other's starting points
                let end = gap / speed;
                let count = (end / self.sample_dt).ceil() as usize;
                let mut times: Vec<f64> = (0..count).map(|k| k as f64 * self.sample_dt).collect();
                times.push(end);
                Ok(times)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeSample {
    pub time: f64,
    pub w_nonflip: f64,
    pub w_flip: f64,
    pub w_other: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergComparison {
    pub tolerance: f64,
    pub prediction: Option<MomentumPrediction>,
    /// Why no prediction is available (e.g. `U = 0`).
    pub error: Option<String>,
    pub deviation: Option<f64>,
    pub agrees: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BerryPhaseSummary {
    pub re: f64,
    pub im: f64,
    /// `|Phi_B| / 2 pi`
    pub concurrence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergySummary {
    pub initial: f64,
    pub measured: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterReport {
    pub schema_version: u32,
    pub config: ScatterConfig,
    pub measurement_time: f64,
    pub result: ScatteringResult,
    pub weights: SectorWeights,
    /// `|c_tr - c_overlap|`
    pub concurrence_gap: f64,
    /// `|1 - final_norm|`
    pub norm_drift: f64,
    pub heisenberg: HeisenbergComparison,
    /// Lattice Berry phase of the post-selected final state.
    pub berry_phase: BerryPhaseSummary,
    pub energy: EnergySummary,
    pub samples: Vec<TimeSample>,
}

/// Restricts a state to the one-electron-per-region sector and renormalizes.
fn post_select(state: &TwoElectronState, part: &RegionPartition) -> Result<TwoElectronState> {
    let n = state.num_sites();
    let amp = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(k, z)| {
            let (i, j) = (k / n, k % n);
            match (part.region_of(i), part.region_of(j)) {
                (Some(Region::A), Some(Region::B)) | (Some(Region::B), Some(Region::A)) if i != j => *z,
                _ => num_complex::Complex64::new(0.0, 0.0),
            }
        })
        .collect();
    TwoElectronState::from_matrix(n, amp)
}

pub fn scatter_experiment(config: &ScatterConfig) -> Result<ScatterReport> {
    if config.sites < 4 {
        return Err(Error::Config(format!(
            "scattering needs at least 4 sites, got {}",
            config.sites
        )));
    }
    let params = HubbardParams::new(config.sites, config.hopping, config.onsite_u, config.boundary)?;
    let part = config.partition()?;
    let (left, right) = config.packets();
    let initial = initial_packets(&params, &left, &right)?;
    let ham = build_hamiltonian(params);

    let registry = default_propagators(
        ExactPropagator {
            max_sites: config.max_exact_sites,
        },
        KrylovPropagator {
            dt: config.dt,
            max_dim: config.krylov_dim,
            tolerance: config.krylov_tol,
        },
    );
    let propagator = registry.get(&config.method)?;
    let times = config.sample_times()?;

    let mut samples = Vec::with_capacity(times.len());
    let mut peak = f64::NEG_INFINITY;
    let mut best: Option<(f64, SectorWeights, TwoElectronState)> = None;
    propagator.propagate(&ham, &initial, &times, &mut |t, state| {
        let w = sector_weights(state, &part)?;
        samples.push(TimeSample {
            time: t,
            w_nonflip: w.w_nonflip,
            w_flip: w.w_flip,
            w_other: w.w_other,
        });
        // minimum of w_other at or after its maximum
        if w.w_other > peak {
            peak = w.w_other;
            best = Some((t, w, state.clone()));
        } else if best.as_ref().is_none_or(|b| w.w_other < b.1.w_other) {
            best = Some((t, w, state.clone()));
        }
        Ok(())
    })?;
    let (measurement_time, weights, fin) = best.expect("at least one sample");

    let result = extract_from_weights(&fin, &part, &weights)?;
    let heisenberg = match predict_from_k0(config.hopping, config.onsite_u, config.k0) {
        Ok(p) => {
            let deviation = (result.c_tr - p.concurrence).abs();
            HeisenbergComparison {
                tolerance: HEISENBERG_AGREEMENT_TOL,
                prediction: Some(p),
                error: None,
                deviation: Some(deviation),
                agrees: Some(deviation <= HEISENBERG_AGREEMENT_TOL),
            }
        }
        Err(e) => HeisenbergComparison {
            tolerance: HEISENBERG_AGREEMENT_TOL,
            prediction: None,
            error: Some(e.to_string()),
            deviation: None,
            agrees: None,
        },
    };
    let phi = lattice_berry_phase(&post_select(&fin, &part)?, &part)?;

    Ok(ScatterReport {
        schema_version: SCATTER_SCHEMA_VERSION,
        config: config.clone(),
        measurement_time,
        concurrence_gap: (result.c_tr - result.c_overlap).abs(),
        norm_drift: (1.0 - result.final_norm).abs(),
        result,
        weights,
        heisenberg,
        berry_phase: BerryPhaseSummary {
            re: phi.re,
            im: phi.im,
            concurrence: phi.norm() / std::f64::consts::TAU,
        },
        energy: EnergySummary {
            initial: ham.expectation(&initial),
            measured: ham.expectation(&fin),
        },
        samples,
    })
}
