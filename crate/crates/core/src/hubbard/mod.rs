//! Two-electron scattering in the one-dimensional Hubbard model.
//!
//! With one up and one down electron the Hamiltonian
//! `H = -t sum_<ij>,s (c^dag_is c_js + h.c.) + U sum_i n_i,up n_i,down`
//! acts on the canonical amplitude matrix as independent hopping of the row
//! (up) and column (down) index plus an energy `U` on the diagonal. No
//! fermionic signs arise in this sector.

pub mod experiment;
pub mod propagate;

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{sector_weights, RegionPartition, SectorWeights, TwoElectronState};
use crate::measures::overlap_concurrence;

pub use experiment::{scatter_experiment, ScatterConfig, ScatterReport, TimePolicy};
pub use propagate::{default_propagators, evolve, ExactPropagator, KrylovPropagator, Propagator, PropagatorRegistry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HubbardParams {
    pub num_sites: usize,
    pub hopping: f64,
    pub onsite_u: f64,
    pub boundary: Boundary,
}

impl HubbardParams {
    pub fn new(num_sites: usize, hopping: f64, onsite_u: f64, boundary: Boundary) -> Result<Self> {
        if num_sites == 0 {
            return Err(Error::Domain("lattice needs at least one site".into()));
        }
        if !(hopping > 0.0 && hopping.is_finite()) {
            return Err(Error::Domain(format!("hopping must be positive, got {hopping}")));
        }
        if !(onsite_u >= 0.0 && onsite_u.is_finite()) {
            return Err(Error::Domain(format!("onsite U must be non-negative, got {onsite_u}")));
        }
        Ok(Self {
            num_sites,
            hopping,
            onsite_u,
            boundary,
        })
    }

    pub fn dim(&self) -> usize {
        self.num_sites * self.num_sites
    }
}

/// Hubbard Hamiltonian restricted to the one-up, one-down sector.
#[derive(Debug, Clone)]
pub struct HubbardHamiltonian {
    params: HubbardParams,
    /// Neighbour lists per site.
    neighbours: Vec<Vec<usize>>,
}

pub fn build_hamiltonian(params: HubbardParams) -> HubbardHamiltonian {
    let n = params.num_sites;
    let mut neighbours = vec![Vec::new(); n];
    let mut bond = |a: usize, b: usize| {
        neighbours[a].push(b);
        neighbours[b].push(a);
    };
    for k in 0..n.saturating_sub(1) {
        bond(k, k + 1);
    }
    // a ring of two sites would double the single bond
    if params.boundary == Boundary::Periodic && n >= 3 {
        bond(n - 1, 0);
    }
    HubbardHamiltonian { params, neighbours }
}

impl HubbardHamiltonian {
    pub fn params(&self) -> &HubbardParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.params.dim()
    }

    /// `out = H input` on row-major amplitude buffers.
    pub fn apply_into(&self, input: &[Complex64], out: &mut [Complex64]) {
        let n = self.params.num_sites;
        let t = self.params.hopping;
        let u = self.params.onsite_u;
        debug_assert_eq!(input.len(), n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for &k in &self.neighbours[i] {
                    acc += input[k * n + j];
                }
                for &k in &self.neighbours[j] {
                    acc += input[i * n + k];
                }
                acc *= -t;
                if i == j {
                    acc += input[i * n + j] * u;
                }
                out[i * n + j] = acc;
            }
        }
    }

    /// `H |state>`, not normalized.
    pub fn apply(&self, state: &TwoElectronState) -> TwoElectronState {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        self.apply_into(state.amplitudes(), &mut out);
        TwoElectronState::from_raw(state.num_sites(), out).expect("dimension preserved")
    }

    /// `<state|H|state>`
    pub fn expectation(&self, state: &TwoElectronState) -> f64 {
        state.inner(&self.apply(state)).re
    }

    /// Dense real symmetric matrix in the row-major canonical basis.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.params.num_sites;
        let (t, u) = (self.params.hopping, self.params.onsite_u);
        let d = n * n;
        let mut h = DMatrix::zeros(d, d);
        for i in 0..n {
            for j in 0..n {
                let row = i * n + j;
                for &k in &self.neighbours[i] {
                    h[(row, k * n + j)] -= t;
                }
                for &k in &self.neighbours[j] {
                    h[(row, i * n + k)] -= t;
                }
                if i == j {
                    h[(row, row)] += u;
                }
            }
        }
        h
    }

    /// Single-particle hopping matrix.
    pub fn single_particle(&self) -> DMatrix<f64> {
        let n = self.params.num_sites;
        let mut h = DMatrix::zeros(n, n);
        for (i, nb) in self.neighbours.iter().enumerate() {
            for &k in nb {
                h[(i, k)] -= self.params.hopping;
            }
        }
        h
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinLabel {
    Up,
    Down,
}

/// Gaussian wave packet `exp(-(x - center)^2 / (2 sigma^2)) e^{i k x}`.
///
/// `sigma` is the width of the amplitude envelope; the probability density
/// has standard deviation `sigma / sqrt2`, and the margins below are counted
/// in that unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavePacketSpec {
    /// 0-based site coordinate; need not be an integer.
    pub center: f64,
    pub width_sigma: f64,
    /// Signed momentum in radians per site.
    pub momentum: f64,
    pub spin: SpinLabel,
}

impl WavePacketSpec {
    /// Standard deviation of `|psi|^2`.
    pub fn density_width(&self) -> f64 {
        self.width_sigma * FRAC_1_SQRT_2
    }

    fn validate(&self, num_sites: usize) -> Result<()> {
        if !(self.width_sigma >= 2.0) {
            return Err(Error::Domain(format!(
                "packet width {} below the minimum of 2 sites",
                self.width_sigma
            )));
        }
        if !self.momentum.is_finite() || self.momentum.abs() > PI {
            return Err(Error::Domain(format!("momentum {} outside [-pi, pi]", self.momentum)));
        }
        let margin = 3.0 * self.density_width();
        let room = self.center.min((num_sites - 1) as f64 - self.center);
        if room < margin {
            return Err(Error::Domain(format!(
                "packet at {} leaves {room:.2} sites to the lattice edge, needs {margin:.2}",
                self.center
            )));
        }
        Ok(())
    }

    fn amplitudes(&self, num_sites: usize) -> Vec<Complex64> {
        (0..num_sites)
            .map(|x| {
                let d = x as f64 - self.center;
                let env = (-d * d / (2.0 * self.width_sigma * self.width_sigma)).exp();
                Complex64::from_polar(env, self.momentum * x as f64)
            })
            .collect()
    }
}

/// Product of an up-spin and a down-spin packet, normalized.
pub fn initial_packets(
    params: &HubbardParams,
    left: &WavePacketSpec,
    right: &WavePacketSpec,
) -> Result<TwoElectronState> {
    let n = params.num_sites;
    left.validate(n)?;
    right.validate(n)?;
    let separation = (right.center - left.center).abs();
    let needed = 3.0 * (left.density_width() + right.density_width());
    if separation < needed {
        return Err(Error::Domain(format!(
            "packets {separation:.2} sites apart overlap; need at least {needed:.2}"
        )));
    }
    let (up, down) = match (left.spin, right.spin) {
        (SpinLabel::Up, SpinLabel::Down) => (left, right),
        (SpinLabel::Down, SpinLabel::Up) => (right, left),
        _ => {
            return Err(Error::Domain(
                "the two packets must carry opposite spins".into(),
            ))
        }
    };
    let (gu, gd) = (up.amplitudes(n), down.amplitudes(n));
    let mut amp = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            amp.push(gu[i] * gd[j]);
        }
    }
    TwoElectronState::from_matrix(n, amp)
}

/// Channel magnitudes and concurrences read off a scattered state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringResult {
    /// Non-flip channel `|t_kq|`: up spin still in `A`.
    pub t_mag: f64,
    /// Flip channel `|r_kq|`: up spin now in `B`.
    pub r_mag: f64,
    /// Weight outside the one-electron-per-region sector.
    pub leakage: f64,
    /// `2 |t| |r|` after post-selection.
    pub c_tr: f64,
    /// Post-selected overlap concurrence.
    pub c_overlap: f64,
    pub final_norm: f64,
}

const MIN_SCATTERED_WEIGHT: f64 = 1e-6;

pub fn extract_amplitudes(state: &TwoElectronState, part: &RegionPartition) -> Result<ScatteringResult> {
    let w = sector_weights(state, part)?;
    extract_from_weights(state, part, &w)
}

pub(crate) fn extract_from_weights(
    state: &TwoElectronState,
    part: &RegionPartition,
    w: &SectorWeights,
) -> Result<ScatteringResult> {
    let inside = w.one_per_region();
    if inside < MIN_SCATTERED_WEIGHT {
        return Err(Error::NoSectorSupport { weight: inside });
    }
    let (t_mag, r_mag) = (w.w_nonflip.sqrt(), w.w_flip.sqrt());
    Ok(ScatteringResult {
        t_mag,
        r_mag,
        leakage: w.w_other,
        c_tr: (2.0 * t_mag * r_mag / inside).min(1.0),
        c_overlap: overlap_concurrence(state, part, true)?,
        final_norm: state.norm_sqr().sqrt(),
    })
}

/// Non-interacting band energy `-2 t sum cos k`.
pub fn free_dispersion_energy(hopping: f64, momenta: &[f64]) -> f64 {
    -2.0 * hopping * momenta.iter().map(|k| k.cos()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{mode, FockState, Operator, Spin};
    use approx::assert_abs_diff_eq;
    use nalgebra::SymmetricEigen;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(n: usize, u: f64) -> HubbardParams {
        HubbardParams::new(n, 1.0, u, Boundary::Open).unwrap()
    }

    #[test]
    fn onsite_only() {
        let h = build_hamiltonian(params(1, 2.5));
        let s = TwoElectronState::from_entries(1, [(0, 0, Complex64::new(1.0, 0.0))]).unwrap();
        assert_eq!(h.apply(&s).amp(0, 0), Complex64::new(2.5, 0.0));
    }

    #[test]
    fn two_site_spectrum_and_elements() {
        let h = build_hamiltonian(params(2, 0.0));
        let dense = h.to_dense();
        let ground = SymmetricEigen::new(dense.clone()).eigenvalues.min();
        assert_abs_diff_eq!(ground, -2.0, epsilon = 1e-12);
        // <(2 up, 2 down)| H |(1 up, 2 down)> in 1-based labels
        assert_eq!(dense[(1 * 2 + 1, 0 * 2 + 1)], -1.0);
    }

    #[test]
    fn matches_second_quantized_hamiltonian() {
        let n = 4;
        let (t, u) = (0.7, 1.9);
        for boundary in [Boundary::Open, Boundary::Periodic] {
            let h = build_hamiltonian(HubbardParams::new(n, t, u, boundary).unwrap());
            let mut op = Operator::new();
            let mut bonds: Vec<(usize, usize)> = (0..n - 1).map(|k| (k, k + 1)).collect();
            if boundary == Boundary::Periodic {
                bonds.push((n - 1, 0));
            }
            for (a, b) in bonds {
                for spin in [Spin::Up, Spin::Down] {
                    op.add_hop(Complex64::new(-t, 0.0), mode(a, spin), mode(b, spin));
                    op.add_hop(Complex64::new(-t, 0.0), mode(b, spin), mode(a, spin));
                }
            }
            for i in 0..n {
                use crate::fock::Ladder::*;
                let (up, dn) = (mode(i, Spin::Up), mode(i, Spin::Down));
                op.add(Complex64::new(u, 0.0), vec![Create(up), Annihilate(up), Create(dn), Annihilate(dn)]);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            let s = TwoElectronState::random(n, &mut rng).unwrap();
            let fock = op.apply(&FockState::from_two_electron(&s));
            let canon = h.apply(&s);
            for i in 0..n {
                for j in 0..n {
                    assert_abs_diff_eq!((fock.two_electron_amp(i, j) - canon.amp(i, j)).norm(), 0.0, epsilon = 1e-13);
                }
            }
        }
    }

    #[test]
    fn hermitian_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in [3, 7, 12] {
            let h = build_hamiltonian(HubbardParams::new(n, 1.0, 3.0, Boundary::Periodic).unwrap());
            let a = TwoElectronState::random(n, &mut rng).unwrap();
            let b = TwoElectronState::random(n, &mut rng).unwrap();
            let lhs = h.apply(&a).inner(&b);
            let rhs = a.inner(&h.apply(&b));
            assert_abs_diff_eq!((lhs - rhs).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn dense_matches_matrix_free() {
        let h = build_hamiltonian(HubbardParams::new(5, 1.2, 0.8, Boundary::Periodic).unwrap());
        let dense = h.to_dense();
        assert_eq!(dense, dense.transpose());
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = TwoElectronState::random(5, &mut rng).unwrap();
        let v = nalgebra::DVector::from_iterator(25, s.amplitudes().iter().copied());
        let hv = dense.map(|x| Complex64::new(x, 0.0)) * v;
        let direct = h.apply(&s);
        for k in 0..25 {
            assert_abs_diff_eq!((hv[k] - direct.amplitudes()[k]).norm(), 0.0, epsilon = 1e-13);
        }
    }

    fn packets(k0: f64) -> (HubbardParams, WavePacketSpec, WavePacketSpec) {
        let p = params(64, 1.0);
        let l = WavePacketSpec { center: 15.0, width_sigma: 6.0, momentum: k0, spin: SpinLabel::Up };
        let r = WavePacketSpec { center: 47.0, width_sigma: 6.0, momentum: -k0, spin: SpinLabel::Down };
        (p, l, r)
    }

    #[test]
    fn initial_packets_sit_in_their_regions() {
        let (p, l, r) = packets(PI / 2.0);
        let s = initial_packets(&p, &l, &r).unwrap();
        assert_abs_diff_eq!(s.norm_sqr(), 1.0, epsilon = 1e-12);
        let w = sector_weights(&s, &RegionPartition::halves(64).unwrap()).unwrap();
        assert!(w.w_nonflip > 0.999, "{w:?}");

        let (p, l, r) = packets(0.0);
        let s = initial_packets(&p, &l, &r).unwrap();
        assert!(s.amplitudes().iter().all(|z| z.im == 0.0 && z.re > 0.0));
    }

    #[test]
    fn packet_validation() {
        let (p, l, mut r) = packets(1.0);
        r.spin = SpinLabel::Up;
        assert!(initial_packets(&p, &l, &r).is_err());
        let (p, mut l, r) = packets(1.0);
        l.center = 5.0;
        assert!(initial_packets(&p, &l, &r).is_err());
        let (p, mut l, r) = packets(1.0);
        l.center = 40.0;
        assert!(initial_packets(&p, &r, &l).is_err());
        let (p, mut l, r) = packets(1.0);
        l.width_sigma = 1.0;
        assert!(initial_packets(&p, &l, &r).is_err());
    }

    #[test]
    fn unscattered_state_has_no_concurrence() {
        let (p, l, r) = packets(PI / 2.0);
        let s = initial_packets(&p, &l, &r).unwrap();
        let res = extract_amplitudes(&s, &RegionPartition::halves(64).unwrap()).unwrap();
        assert!(res.t_mag > 0.999 && res.r_mag < 1e-3 && res.c_tr < 1e-3);
        assert_abs_diff_eq!(res.t_mag.powi(2) + res.r_mag.powi(2) + res.leakage, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn extraction_needs_scattered_weight() {
        let s = TwoElectronState::from_entries(4, [(1, 1, Complex64::new(1.0, 0.0))]).unwrap();
        assert!(extract_amplitudes(&s, &RegionPartition::halves(4).unwrap()).is_err());
    }

    #[test]
    fn dispersion_examples() {
        assert_abs_diff_eq!(free_dispersion_energy(1.0, &[PI / 2.0, -PI / 2.0]), 0.0, epsilon = 1e-15);
        assert_eq!(free_dispersion_energy(1.0, &[0.0, 0.0]), -4.0);
        assert_eq!(free_dispersion_energy(1.0, &[PI]), 2.0);
    }

    #[test]
    fn periodic_plane_waves_follow_dispersion() {
        let n = 12;
        let h = build_hamiltonian(HubbardParams::new(n, 1.0, 0.0, Boundary::Periodic).unwrap());
        let (k1, k2) = (2.0 * PI * 2.0 / n as f64, -2.0 * PI * 5.0 / n as f64);
        let amp = (0..n * n)
            .map(|x| Complex64::from_polar(1.0, k1 * (x / n) as f64 + k2 * (x % n) as f64))
            .collect();
        let s = TwoElectronState::from_matrix(n, amp).unwrap();
        assert_abs_diff_eq!(h.expectation(&s), free_dispersion_energy(1.0, &[k1, k2]), epsilon = 1e-12);
    }
}
