//! Concurrence of the spins carried in two spatial regions.
//!
//! Three lattice formulas are provided, together with the standard Wootters
//! concurrence of the reduced two-qubit spin density matrix as an independent
//! check:
//!
//! * [`overlap_concurrence`]: `2 |sum_{i in A, j in B} conj(amp[i][j]) amp[j][i]|`
//! * [`spin_correlator_concurrence`]: `2 |<S+_A S-_B>|`, evaluated by literal
//!   ladder-operator algebra in [`crate::fock`]
//! * [`bell_pair_concurrence`]: `sum_[ij] |(Phi+_ij)^2 - (Phi-_ij)^2|`
//!
//! All of them are also exposed as [`ConcurrenceMeasure`] strategies in a
//! name-keyed registry.

use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::berry_lattice::lattice_berry_phase;
use crate::error::{Error, Result};
use crate::fock::{spin_lowering, spin_raising, FockState};
use crate::lattice::{sector_weights, RegionPartition, TwoElectronState};
use crate::registry::{Named, Registry};

const SECTOR_FLOOR: f64 = 1e-12;

/// Cross term `sum_{i in A, j in B} conj(amp[i][j]) amp[j][i]`, summed in
/// ascending `(i, j)` order.
pub(crate) fn exchange_overlap(state: &TwoElectronState, part: &RegionPartition) -> Result<Complex64> {
    part.check(state)?;
    let mut sum = Complex64::new(0.0, 0.0);
    for &i in part.region_a() {
        for &j in part.region_b() {
            sum += state.amp(i, j).conj() * state.amp(j, i);
        }
    }
    Ok(sum)
}

pub fn overlap_concurrence(
    state: &TwoElectronState,
    part: &RegionPartition,
    normalize_sector: bool,
) -> Result<f64> {
    let c = 2.0 * exchange_overlap(state, part)?.norm();
    if !normalize_sector {
        return Ok(c);
    }
    let w = sector_weights(state, part)?.one_per_region();
    if w < SECTOR_FLOOR {
        return Err(Error::NoSectorSupport { weight: w });
    }
    Ok(c / w)
}

/// `<psi| S+_A S-_B |psi>` computed in Fock space.
pub fn transverse_correlator(state: &TwoElectronState, part: &RegionPartition) -> Result<Complex64> {
    part.check(state)?;
    let psi = FockState::from_two_electron(state);
    let lowered = spin_lowering(part.region_b()).apply(&psi);
    let moved = spin_raising(part.region_a()).apply(&lowered);
    Ok(psi.inner(&moved))
}

pub fn spin_correlator_concurrence(state: &TwoElectronState, part: &RegionPartition) -> Result<f64> {
    Ok(2.0 * transverse_correlator(state, part)?.norm())
}

/// Bell-like combinations for one site pair `i in A`, `j in B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellPairAmplitudes {
    pub pair: (usize, usize),
    pub phi_plus: Complex64,
    pub phi_minus: Complex64,
}

pub fn bell_pairs(state: &TwoElectronState, part: &RegionPartition) -> Result<Vec<BellPairAmplitudes>> {
    part.check(state)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(part.region_a().len() * part.region_b().len());
    for &i in part.region_a() {
        for &j in part.region_b() {
            let (x, y) = (state.amp(i, j), state.amp(j, i));
            out.push(BellPairAmplitudes {
                pair: (i, j),
                phi_plus: (x + y) * s,
                phi_minus: (x - y) * s,
            });
        }
    }
    Ok(out)
}

/// Squares of the complex amplitudes are used, not squared moduli, so this
/// equals `sum 2 |amp[i][j] amp[j][i]|` and bounds [`overlap_concurrence`]
/// from above; the two agree when every cross product shares one phase.
pub fn bell_pair_concurrence(state: &TwoElectronState, part: &RegionPartition) -> Result<f64> {
    Ok(bell_pairs(state, part)?
        .iter()
        .map(|p| (p.phi_plus * p.phi_plus - p.phi_minus * p.phi_minus).norm())
        .sum())
}

/// Density matrix of (spin in `A`, spin in `B`) over `{uu, ud, du, dd}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitDensity {
    rho: Matrix4<Complex64>,
}

impl TwoQubitDensity {
    pub fn new(rho: Matrix4<Complex64>) -> Result<Self> {
        let herm = (rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > 1e-12 {
            return Err(Error::InvalidState(format!("density not Hermitian ({herm:.2e})")));
        }
        let tr = rho.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > 1e-12 {
            return Err(Error::InvalidState(format!("density trace {tr} != 1")));
        }
        let min = SymmetricEigen::new(rho).eigenvalues.min();
        if min < -1e-10 {
            return Err(Error::InvalidState(format!(
                "density has negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { rho })
    }

    /// Projector onto a normalized pure state.
    pub fn pure(psi: [Complex64; 4]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let v = nalgebra::Vector4::from_iterator(psi.iter().map(|z| z / norm));
        Self::new(v * v.adjoint())
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.rho
    }
}

/// Spin density matrix after post-selecting one electron in each region and
/// tracing out positions within the regions.
///
/// Amplitudes are ordered with the `A` electron's creation operator first,
/// so the up-in-`B` component `c^dag_{b up} c^dag_{a down}` enters `|du>`
/// with amplitude `-amp[b][a]`.
pub fn reduced_spin_density(state: &TwoElectronState, part: &RegionPartition) -> Result<TwoQubitDensity> {
    let w = sector_weights(state, part)?.one_per_region();
    if w < SECTOR_FLOOR {
        return Err(Error::NoSectorSupport { weight: w });
    }
    let mut rho = Matrix4::<Complex64>::zeros();
    for &a in part.region_a() {
        for &b in part.region_b() {
            let ud = state.amp(a, b);
            let du = -state.amp(b, a);
            rho[(1, 1)] += ud * ud.conj();
            rho[(1, 2)] += ud * du.conj();
            rho[(2, 1)] += du * ud.conj();
            rho[(2, 2)] += du * du.conj();
        }
    }
    TwoQubitDensity::new(rho / Complex64::new(w, 0.0))
}

fn sigma_y_sigma_y() -> Matrix4<Complex64> {
    let mut y = Matrix4::<Complex64>::zeros();
    y[(0, 3)] = Complex64::new(-1.0, 0.0);
    y[(1, 2)] = Complex64::new(1.0, 0.0);
    y[(2, 1)] = Complex64::new(1.0, 0.0);
    y[(3, 0)] = Complex64::new(-1.0, 0.0);
    y
}

/// Wootters concurrence `max(0, l1 - l2 - l3 - l4)`.
///
/// The `l_k` are the square roots of the eigenvalues of
/// `rho (sy x sy) conj(rho) (sy x sy)`. They are obtained as the singular
/// values of `W^dag (sy x sy) conj(W)`, where the columns of `W` are the
/// eigenvectors of `rho` scaled by the square roots of their weights; this
/// avoids square roots of near-zero eigenvalues.
pub fn wootters_concurrence(rho: &TwoQubitDensity) -> f64 {
    let eig = SymmetricEigen::new(rho.rho);
    let mut w = eig.eigenvectors;
    for (k, &p) in eig.eigenvalues.iter().enumerate() {
        let scale = Complex64::new(p.max(0.0).sqrt(), 0.0);
        w.column_mut(k).iter_mut().for_each(|z| *z *= scale);
    }
    let tau = w.adjoint() * sigma_y_sigma_y() * w.map(|z| z.conj());
    let mut sv: Vec<f64> = tau.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    (sv[0] - sv[1] - sv[2] - sv[3]).clamp(0.0, 1.0)
}

/// A concurrence estimator for a two-electron lattice state.
pub trait ConcurrenceMeasure: Named + Send + Sync {
    fn description(&self) -> &'static str;
    fn evaluate(&self, state: &TwoElectronState, part: &RegionPartition) -> Result<f64>;
}

pub struct Overlap;
pub struct SpinCorrelator;
pub struct BellPair;
pub struct Wootters;
pub struct BerryPhase;

impl Named for Overlap {
    fn name(&self) -> &'static str {
        "overlap"
    }
}

impl ConcurrenceMeasure for Overlap {
    fn description(&self) -> &'static str {
        "2|sum conj(amp[i][j]) amp[j][i]| over i in A, j in B"
    }
    fn evaluate(&self, state: &TwoElectronState, part: &RegionPartition) -> Result<f64> {
        overlap_concurrence(state, part, false)
    }
}

impl Named for SpinCorrelator {
    fn name(&self) -> &'static str {
        "spin-correlator"
    }
}

impl ConcurrenceMeasure for SpinCorrelator {
    fn description(&self) -> &'static str {
        "2|<S+_A S-_B>| by explicit ladder-operator algebra"
    }
    fn evaluate(&self, state: &TwoElectronState, part: &RegionPartition) -> Result<f64> {
        spin_correlator_concurrence(state, part)
    }
}

impl Named for BellPair {
    fn name(&self) -> &'static str {
        "bell-pair"
    }
}

impl ConcurrenceMeasure for BellPair {
    fn description(&self) -> &'static str {
        "sum over site pairs of |(Phi+)^2 - (Phi-)^2|"
    }
    fn evaluate(&self, state: &TwoElectronState, part: &RegionPartition) -> Result<f64> {
        bell_pair_concurrence(state, part)
    }
}

impl Named for Wootters {
    fn name(&self) -> &'static str {
        "wootters"
    }
}

impl ConcurrenceMeasure for Wootters {
    fn description(&self) -> &'static str {
        "Wootters concurrence of the post-selected reduced spin density"
    }
    fn evaluate(&self, state: &TwoElectronState, part: &RegionPartition) -> Result<f64> {
        Ok(wootters_concurrence(&reduced_spin_density(state, part)?))
    }
}

impl Named for BerryPhase {
    fn name(&self) -> &'static str {
        "berry"
    }
}

impl ConcurrenceMeasure for BerryPhase {
    fn description(&self) -> &'static str {
        "|Phi_B| / 2pi from the lattice Berry phase"
    }
    fn evaluate(&self, state: &TwoElectronState, part: &RegionPartition) -> Result<f64> {
        Ok(lattice_berry_phase(state, part)?.norm() / std::f64::consts::TAU)
    }
}

pub type MeasureRegistry = Registry<dyn ConcurrenceMeasure>;

/// Registry holding every built-in measure.
pub fn default_measures() -> MeasureRegistry {
    let mut reg = MeasureRegistry::new("concurrence measure");
    reg.register(Box::new(Overlap))
        .register(Box::new(SpinCorrelator))
        .register(Box::new(BellPair))
        .register(Box::new(Wootters))
        .register(Box::new(BerryPhase));
    reg
}
