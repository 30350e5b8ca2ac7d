//! Parameter sweeps and experiment runs that produce [`ReportDocument`]s.

use std::f64::consts::PI;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::angle::parse_angle;
use crate::berry_lattice::lattice_berry_phase;
use crate::error::{Error, Result};
use crate::heisenberg::predict_from_k0;
use crate::hubbard::{scatter_experiment, ScatterConfig};
use crate::lattice::{sector_weights, RegionPartition, TwoElectronState};
use crate::measures::MeasureRegistry;
use crate::report::{Cell, ReportDocument};
use crate::spin_geometry::{berry_phase_analytic, bell_coefficients, concurrence_from_theta, Branch};

/// Evenly spaced points `start..=stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Grid {
    pub fn new(start: f64, stop: f64, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::Config(format!("a grid needs at least 2 points, got {points}")));
        }
        if !(start < stop) || !start.is_finite() || !stop.is_finite() {
            return Err(Error::Config(format!("grid needs start < stop, got {start}:{stop}")));
        }
        Ok(Self { start, stop, points })
    }

    /// Endpoints are reproduced exactly.
    pub fn values(&self) -> Vec<f64> {
        let last = self.points - 1;
        (0..self.points)
            .map(|k| {
                if k == last {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * k as f64 / last as f64
                }
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = Error;

    /// `START:STOP:POINTS`, where the bounds may be `pi` expressions.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, points] = parts[..] else {
            return Err(Error::Config(format!("grid `{s}` is not START:STOP:POINTS")));
        };
        let points = points
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("grid point count `{points}` is not an integer")))?;
        Grid::new(parse_angle(start)?, parse_angle(stop)?, points)
    }
}

pub const THETA_COLUMNS: [&str; 6] = ["theta", "berry_up", "berry_down", "a_mag", "b_mag", "concurrence"];

/// Single-spin Berry phases and Bell coefficients across polar angles.
pub fn run_theta_sweep(grid: &Grid) -> Result<ReportDocument> {
    if grid.start < 0.0 || grid.stop > PI + 1e-12 {
        return Err(Error::Domain(format!(
            "theta grid {}:{} leaves [0, pi]",
            grid.start, grid.stop
        )));
    }
    let mut doc = ReportDocument::new("spin-sweep", grid, &THETA_COLUMNS, None)?;
    for theta in grid.values() {
        let bell = bell_coefficients(theta, 1)?;
        doc.push_row(vec![
            theta.into(),
            berry_phase_analytic(theta, Branch::Up)?.into(),
            berry_phase_analytic(theta, Branch::Down)?.into(),
            bell.a_mag.into(),
            bell.b_mag.into(),
            concurrence_from_theta(theta)?.into(),
        ]);
    }
    Ok(doc)
}

pub const HEISENBERG_COLUMNS: [&str; 7] = [
    "k0",
    "theta",
    "berry_phase",
    "concurrence",
    "concurrence_2dp",
    "band_edge",
    "error",
];

#[derive(Debug, Clone, Serialize)]
struct TableConfig<'a> {
    t: f64,
    #[serde(rename = "U")]
    u: f64,
    k0: &'a [f64],
}

/// Rounds half away from zero to two decimals.
pub fn round_2dp(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Heisenberg-map predictions per momentum. Rows that fall outside the
/// mapping carry the error text and empty numeric cells.
pub fn run_heisenberg_table(t: f64, u: f64, k0s: &[f64]) -> Result<ReportDocument> {
    if k0s.is_empty() {
        return Err(Error::Config("no k0 values given".into()));
    }
    let cfg = TableConfig { t, u, k0: k0s };
    let mut doc = ReportDocument::new("heisenberg-table", &cfg, &HEISENBERG_COLUMNS, None)?;
    for &k0 in k0s {
        let row = match predict_from_k0(t, u, k0) {
            Ok(p) => vec![
                k0.into(),
                p.theta.into(),
                p.berry_phase.into(),
                p.concurrence.into(),
                round_2dp(p.concurrence).into(),
                p.band_edge.into(),
                Cell::Null,
            ],
            Err(e) => vec![
                k0.into(),
                Cell::Null,
                Cell::Null,
                Cell::Null,
                Cell::Null,
                Cell::Null,
                e.to_string().into(),
            ],
        };
        doc.push_row(row);
    }
    Ok(doc)
}

pub const MEASURE_COLUMNS: [&str; 3] = ["measure", "concurrence", "description"];

#[derive(Debug, Clone, Serialize)]
struct MeasureConfig<'a> {
    num_sites: usize,
    /// 1-based.
    region_a: Vec<usize>,
    region_b: Vec<usize>,
    measures: &'a [String],
}

/// Evaluates the named measures (all registered ones when `names` is empty).
/// A measure that fails on this state records its error instead of a value.
pub fn run_lattice_measures(
    state: &TwoElectronState,
    part: &RegionPartition,
    registry: &MeasureRegistry,
    names: &[String],
    seed: Option<u64>,
) -> Result<ReportDocument> {
    let selected: Vec<String> = if names.is_empty() {
        registry.names().into_iter().map(String::from).collect()
    } else {
        names.to_vec()
    };
    let cfg = MeasureConfig {
        num_sites: state.num_sites(),
        region_a: part.region_a().iter().map(|s| s + 1).collect(),
        region_b: part.region_b().iter().map(|s| s + 1).collect(),
        measures: &selected,
    };
    let mut doc = ReportDocument::new("lattice-measures", &cfg, &MEASURE_COLUMNS, seed)?;
    let mut failures = serde_json::Map::new();
    for name in &selected {
        let m = registry.get(name)?;
        let value = match m.evaluate(state, part) {
            Ok(v) => Cell::Num(v),
            Err(e) => {
                failures.insert(name.clone(), e.to_string().into());
                Cell::Null
            }
        };
        doc.push_row(vec![name.as_str().into(), value, m.description().into()]);
    }
    let phi = lattice_berry_phase(state, part)?;
    doc.details = Some(serde_json::json!({
        "sector_weights": sector_weights(state, part)?,
        "berry_phase": { "re": phi.re, "im": phi.im },
        "errors": failures,
        "state": state.to_dump(),
    }));
    Ok(doc)
}

pub const SCATTER_COLUMNS: [&str; 12] = [
    "measurement_time",
    "t_mag",
    "r_mag",
    "leakage",
    "c_tr",
    "c_overlap",
    "concurrence_gap",
    "berry_concurrence",
    "heisenberg_concurrence",
    "heisenberg_deviation",
    "norm_drift",
    "energy_drift",
];

/// Runs a collision and tabulates its headline numbers; the full report
/// goes into `details`.
pub fn run_hubbard_scatter(config: &ScatterConfig) -> Result<ReportDocument> {
    let report = scatter_experiment(config)?;
    let mut doc = ReportDocument::new("hubbard-scatter", config, &SCATTER_COLUMNS, None)?;
    let r = &report.result;
    doc.push_row(vec![
        report.measurement_time.into(),
        r.t_mag.into(),
        r.r_mag.into(),
        r.leakage.into(),
        r.c_tr.into(),
        r.c_overlap.into(),
        report.concurrence_gap.into(),
        report.berry_phase.concurrence.into(),
        report.heisenberg.prediction.map(|p| p.concurrence).into(),
        report.heisenberg.deviation.into(),
        report.norm_drift.into(),
        (report.energy.measured - report.energy.initial).abs().into(),
    ]);
    doc.details = Some(serde_json::to_value(&report)?);
    Ok(doc)
}
