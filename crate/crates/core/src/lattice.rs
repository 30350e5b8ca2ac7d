//! Two-electron states with total `S^z = 0` on an `N`-site chain.
//!
//! A state is stored as the canonical amplitude matrix `amp[i][j]`, the
//! coefficient of `c^dag_{i up} c^dag_{j down} |0>`. The alternative
//! ordering `c^dag_{i down} c^dag_{j up}` is not stored separately: it equals
//! `-c^dag_{j up} c^dag_{i down}`, so its amplitude is `-amp[j][i]`.
//!
//! Sites are 0-based in the Rust API and 1-based in serialized form.

use std::collections::BTreeSet;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct TwoElectronState {
    num_sites: usize,
    amp: Vec<Complex64>,
}

impl TwoElectronState {
    /// Builds a state from `(up_site, down_site, amplitude)` triples and
    /// normalizes it. Repeated index pairs are summed.
    pub fn from_entries<I>(num_sites: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Complex64)>,
    {
        let mut state = Self::zeros(num_sites)?;
        let mut any = false;
        for (i, j, z) in entries {
            if i >= num_sites || j >= num_sites {
                return Err(Error::InvalidState(format!(
                    "site pair ({i}, {j}) out of range for {num_sites} sites"
                )));
            }
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::InvalidState("non-finite amplitude".into()));
            }
            state.amp[i * num_sites + j] += z;
            any = true;
        }
        if !any {
            return Err(Error::InvalidState("empty amplitude list".into()));
        }
        state.normalize()?;
        Ok(state)
    }

    /// Wraps a row-major `N x N` amplitude buffer and normalizes it.
    pub fn from_matrix(num_sites: usize, amp: Vec<Complex64>) -> Result<Self> {
        let mut state = Self::from_raw(num_sites, amp)?;
        state.normalize()?;
        Ok(state)
    }

    /// Wraps a row-major buffer without normalizing.
    pub(crate) fn from_raw(num_sites: usize, amp: Vec<Complex64>) -> Result<Self> {
        if num_sites == 0 {
            return Err(Error::InvalidState("lattice needs at least one site".into()));
        }
        if amp.len() != num_sites * num_sites {
            return Err(Error::InvalidState(format!(
                "expected {} amplitudes, got {}",
                num_sites * num_sites,
                amp.len()
            )));
        }
        Ok(Self { num_sites, amp })
    }

    fn zeros(num_sites: usize) -> Result<Self> {
        Self::from_raw(num_sites, vec![ZERO; num_sites * num_sites])
    }

    fn normalize(&mut self) -> Result<()> {
        let norm = self.norm_sqr().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidState("state has zero norm".into()));
        }
        self.amp.iter_mut().for_each(|z| *z /= norm);
        Ok(())
    }

    /// Random state with independent complex Gaussian amplitudes.
    pub fn random<R: Rng + ?Sized>(num_sites: usize, rng: &mut R) -> Result<Self> {
        let amp = (0..num_sites * num_sites)
            .map(|_| Complex64::new(gaussian(rng), gaussian(rng)))
            .collect();
        Self::from_matrix(num_sites, amp)
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    /// Amplitude of `c^dag_{up_site, up} c^dag_{down_site, down} |0>`.
    pub fn amp(&self, up_site: usize, down_site: usize) -> Complex64 {
        self.amp[up_site * self.num_sites + down_site]
    }

    /// Row-major amplitude buffer.
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amp
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amp
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &TwoElectronState) -> Complex64 {
        debug_assert_eq!(self.num_sites, other.num_sites);
        self.amp
            .iter()
            .zip(&other.amp)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Exchanges the two spin labels: the result has `amp'[i][j] = amp[j][i]`
    /// up to the overall sign `-1` from reordering the creation operators.
    pub fn spin_flipped(&self) -> Self {
        let n = self.num_sites;
        let mut amp = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                amp[i * n + j] = -self.amp[j * n + i];
            }
        }
        Self { num_sites: n, amp }
    }

    /// Serializable form with 1-based site labels; zero entries are dropped.
    pub fn to_dump(&self) -> StateDump {
        let n = self.num_sites;
        let entries = self
            .amp
            .iter()
            .enumerate()
            .filter(|(_, z)| **z != ZERO)
            .map(|(k, z)| (k / n + 1, k % n + 1, z.re, z.im))
            .collect();
        StateDump {
            num_sites: n,
            entries,
        }
    }

    /// Rebuilds a state from its dump without renormalizing, so a dump/load
    /// cycle is bit-exact.
    pub fn from_dump(dump: &StateDump) -> Result<Self> {
        let n = dump.num_sites;
        let mut state = Self::zeros(n)?;
        for &(i, j, re, im) in &dump.entries {
            if i == 0 || j == 0 || i > n || j > n {
                return Err(Error::InvalidState(format!(
                    "site pair ({i}, {j}) out of range 1..={n}"
                )));
            }
            if !(re.is_finite() && im.is_finite()) {
                return Err(Error::InvalidState("non-finite amplitude".into()));
            }
            state.amp[(i - 1) * n + (j - 1)] = Complex64::new(re, im);
        }
        if state.norm_sqr() == 0.0 {
            return Err(Error::InvalidState("empty amplitude list".into()));
        }
        Ok(state)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_dump())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_dump(&serde_json::from_str(text)?)
    }
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// On-disk representation of a [`TwoElectronState`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDump {
    pub num_sites: usize,
    /// `(up_site, down_site, re, im)` with 1-based sites.
    pub entries: Vec<(usize, usize, f64, f64)>,
}

/// Product state: up electron on `up_site`, down electron on `down_site`.
pub fn product_state(num_sites: usize, up_site: usize, down_site: usize) -> Result<TwoElectronState> {
    TwoElectronState::from_entries(num_sites, [(up_site, down_site, Complex64::new(1.0, 0.0))])
}

/// Spin singlet `(c^dag_{i up} c^dag_{j down} - c^dag_{i down} c^dag_{j up})|0>/sqrt2`.
///
/// Reordering the second term gives `+c^dag_{j up} c^dag_{i down}`, so the
/// canonical matrix is symmetric: `amp[i][j] = amp[j][i] = 1/sqrt2`.
pub fn make_singlet(num_sites: usize, i: usize, j: usize) -> Result<TwoElectronState> {
    pair_state(num_sites, i, j, 1.0)
}

/// `S^z = 0` triplet `(c^dag_{i up} c^dag_{j down} + c^dag_{i down} c^dag_{j up})|0>/sqrt2`,
/// stored as `amp[i][j] = -amp[j][i] = 1/sqrt2`.
pub fn make_triplet(num_sites: usize, i: usize, j: usize) -> Result<TwoElectronState> {
    pair_state(num_sites, i, j, -1.0)
}

fn pair_state(num_sites: usize, i: usize, j: usize, sign: f64) -> Result<TwoElectronState> {
    if i == j {
        return Err(Error::InvalidState(format!(
            "spin pair needs two distinct sites, got {i} twice"
        )));
    }
    TwoElectronState::from_entries(
        num_sites,
        [
            (i, j, Complex64::new(FRAC_1_SQRT_2, 0.0)),
            (j, i, Complex64::new(sign * FRAC_1_SQRT_2, 0.0)),
        ],
    )
}

/// Which of the two domains a site belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    A,
    B,
}

/// Two disjoint, non-empty site sets `A` and `B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionPartition {
    num_sites: usize,
    region_a: Vec<usize>,
    region_b: Vec<usize>,
    label: Vec<Option<Region>>,
}

impl RegionPartition {
    pub fn new<A, B>(num_sites: usize, region_a: A, region_b: B) -> Result<Self>
    where
        A: IntoIterator<Item = usize>,
        B: IntoIterator<Item = usize>,
    {
        let a: BTreeSet<usize> = region_a.into_iter().collect();
        let b: BTreeSet<usize> = region_b.into_iter().collect();
        if a.is_empty() || b.is_empty() {
            return Err(Error::InvalidPartition("both regions must be non-empty".into()));
        }
        if let Some(s) = a.iter().chain(&b).find(|&&s| s >= num_sites) {
            return Err(Error::InvalidPartition(format!(
                "site {s} out of range for {num_sites} sites"
            )));
        }
        if let Some(s) = a.intersection(&b).next() {
            return Err(Error::InvalidPartition(format!("site {s} is in both regions")));
        }
        let mut label = vec![None; num_sites];
        a.iter().for_each(|&s| label[s] = Some(Region::A));
        b.iter().for_each(|&s| label[s] = Some(Region::B));
        Ok(Self {
            num_sites,
            region_a: a.into_iter().collect(),
            region_b: b.into_iter().collect(),
            label,
        })
    }

    /// Left block `0..N/2` as `A`, the rest as `B`.
    pub fn halves(num_sites: usize) -> Result<Self> {
        let mid = num_sites / 2;
        Self::new(num_sites, 0..mid, mid..num_sites)
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn region_a(&self) -> &[usize] {
        &self.region_a
    }

    pub fn region_b(&self) -> &[usize] {
        &self.region_b
    }

    pub fn region_of(&self, site: usize) -> Option<Region> {
        self.label.get(site).copied().flatten()
    }

    pub(crate) fn check(&self, state: &TwoElectronState) -> Result<()> {
        if state.num_sites() != self.num_sites {
            return Err(Error::InvalidPartition(format!(
                "partition is for {} sites but the state has {}",
                self.num_sites,
                state.num_sites()
            )));
        }
        Ok(())
    }
}

/// Weight of the state in the three spatial sectors of a partition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorWeights {
    /// Up spin in `A`, down spin in `B`.
    pub w_nonflip: f64,
    /// Up spin in `B`, down spin in `A`.
    pub w_flip: f64,
    /// Everything else: double occupancy, both in one region, or outside `A ∪ B`.
    pub w_other: f64,
}

impl SectorWeights {
    /// Weight with exactly one electron in each region.
    pub fn one_per_region(&self) -> f64 {
        self.w_nonflip + self.w_flip
    }
}

pub fn sector_weights(state: &TwoElectronState, part: &RegionPartition) -> Result<SectorWeights> {
    part.check(state)?;
    let n = state.num_sites();
    let mut w = SectorWeights {
        w_nonflip: 0.0,
        w_flip: 0.0,
        w_other: 0.0,
    };
    for i in 0..n {
        for j in 0..n {
            let p = state.amp(i, j).norm_sqr();
            match (i != j, part.region_of(i), part.region_of(j)) {
                (true, Some(Region::A), Some(Region::B)) => w.w_nonflip += p,
                (true, Some(Region::B), Some(Region::A)) => w.w_flip += p,
                _ => w.w_other += p,
            }
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn make_state_examples() {
        let s = product_state(2, 0, 1).unwrap();
        assert_eq!(s.amp(0, 1), c(1.0));
        assert_eq!(s.norm_sqr(), 1.0);

        let d = TwoElectronState::from_entries(2, [(0, 0, c(1.0))]).unwrap();
        assert_eq!(d.amp(0, 0), c(1.0));

        let s = TwoElectronState::from_entries(2, [(0, 1, c(3.0)), (1, 0, c(4.0))]).unwrap();
        assert_abs_diff_eq!(s.amp(0, 1).re, 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amp(1, 0).re, 0.8, epsilon = 1e-15);
    }

    #[test]
    fn make_state_errors() {
        assert!(TwoElectronState::from_entries(2, std::iter::empty()).is_err());
        assert!(TwoElectronState::from_entries(2, [(2, 0, c(1.0))]).is_err());
        assert!(TwoElectronState::from_entries(2, [(0, 1, c(0.0))]).is_err());
    }

    #[test]
    fn singlet_and_triplet_amplitudes() {
        let s = make_singlet(2, 0, 1).unwrap();
        assert_abs_diff_eq!(s.amp(0, 1).re, FRAC_1_SQRT_2);
        assert_abs_diff_eq!(s.amp(1, 0).re, FRAC_1_SQRT_2);

        let s = make_singlet(4, 0, 3).unwrap();
        assert_eq!(s.amplitudes().iter().filter(|z| z.norm() > 0.0).count(), 2);
        assert_abs_diff_eq!(s.norm_sqr(), 1.0, epsilon = 1e-15);

        let t = make_triplet(2, 0, 1).unwrap();
        assert_abs_diff_eq!(t.amp(0, 1).re, FRAC_1_SQRT_2);
        assert_abs_diff_eq!(t.amp(1, 0).re, -FRAC_1_SQRT_2);
        assert!(make_singlet(3, 1, 1).is_err());
    }

    #[test]
    fn singlet_is_spin_flip_symmetric() {
        let s = make_singlet(5, 1, 3).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(s.amp(i, j), s.amp(j, i));
            }
        }
        // the singlet is odd under exchange of spin labels, the triplet even
        assert_abs_diff_eq!((s.spin_flipped().inner(&s) - c(-1.0)).norm(), 0.0, epsilon = 1e-15);
        let t = make_triplet(5, 1, 3).unwrap();
        assert_abs_diff_eq!((t.spin_flipped().inner(&t) - c(1.0)).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn sector_weight_examples() {
        let part = RegionPartition::new(2, [0], [1]).unwrap();
        let w = sector_weights(&make_singlet(2, 0, 1).unwrap(), &part).unwrap();
        assert_abs_diff_eq!(w.w_nonflip, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(w.w_flip, 0.5, epsilon = 1e-15);
        assert_eq!(w.w_other, 0.0);

        let w = sector_weights(&product_state(2, 0, 1).unwrap(), &part).unwrap();
        assert_eq!((w.w_nonflip, w.w_flip, w.w_other), (1.0, 0.0, 0.0));

        let d = TwoElectronState::from_entries(2, [(0, 0, c(1.0))]).unwrap();
        let w = sector_weights(&d, &part).unwrap();
        assert_eq!((w.w_nonflip, w.w_flip, w.w_other), (0.0, 0.0, 1.0));
    }

    #[test]
    fn partition_validation() {
        assert!(RegionPartition::new(4, [0, 1], [1, 2]).is_err());
        assert!(RegionPartition::new(4, [0], Vec::<usize>::new()).is_err());
        assert!(RegionPartition::new(4, [0], [4]).is_err());
        let h = RegionPartition::halves(6).unwrap();
        assert_eq!(h.region_a(), &[0, 1, 2]);
        assert_eq!(h.region_b(), &[3, 4, 5]);
        let part = RegionPartition::new(3, [0], [2]).unwrap();
        assert_eq!(part.region_of(1), None);
        assert!(sector_weights(&product_state(2, 0, 1).unwrap(), &part).is_err());
    }

    #[test]
    fn dump_round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = TwoElectronState::random(5, &mut rng).unwrap();
        let back = TwoElectronState::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(s, back);
        let dump = s.to_dump();
        assert!(dump.entries.iter().all(|e| e.0 >= 1 && e.1 >= 1));
    }

    #[test]
    fn dump_rejects_bad_sites() {
        let dump = StateDump {
            num_sites: 2,
            entries: vec![(0, 1, 1.0, 0.0)],
        };
        assert!(TwoElectronState::from_dump(&dump).is_err());
    }

    proptest! {
        #[test]
        fn weights_cover_full_norm(seed in any::<u64>(), n in 2usize..7, cut in 1usize..6) {
            let cut = cut.min(n - 1);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = TwoElectronState::random(n, &mut rng).unwrap();
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
            let part = RegionPartition::new(n, 0..cut, cut..n).unwrap();
            let w = sector_weights(&s, &part).unwrap();
            prop_assert!((w.w_nonflip + w.w_flip + w.w_other - 1.0).abs() < 1e-10);
            prop_assert!(w.w_nonflip >= 0.0 && w.w_flip >= 0.0 && w.w_other >= 0.0);
        }
    }
}
