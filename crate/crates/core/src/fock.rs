//! Minimal second-quantized fermion algebra on occupation-number kets.
//!
//! Modes are indexed `2 * site + spin` (spin 0 = up, 1 = down). A basis ket
//! `|mask>` stands for `c^dag_{m1} c^dag_{m2} ... |0>` with `m1 < m2 < ...`,
//! so ladder operators pick up the Jordan-Wigner sign
//! `(-1)^(number of occupied modes below m)`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::lattice::TwoElectronState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Spin {
    Up,
    Down,
}

pub fn mode(site: usize, spin: Spin) -> usize {
    2 * site
        + match spin {
            Spin::Up => 0,
            Spin::Down => 1,
        }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Create(usize),
    Annihilate(usize),
}

/// Product of ladder operators times a coefficient. Operators act right to
/// left, as written: `ops[0] ops[1] ... ops[k-1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: Complex64,
    pub ops: Vec<Ladder>,
}

/// Sum of [`Term`]s.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Operator {
    pub terms: Vec<Term>,
}

impl Operator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, coeff: Complex64, ops: Vec<Ladder>) -> &mut Self {
        self.terms.push(Term { coeff, ops });
        self
    }

    /// `c^dag_to c_from`
    pub fn add_hop(&mut self, coeff: Complex64, to: usize, from: usize) -> &mut Self {
        self.add(coeff, vec![Ladder::Create(to), Ladder::Annihilate(from)])
    }

    pub fn apply(&self, state: &FockState) -> FockState {
        let mut out = FockState::default();
        for term in &self.terms {
            for (&mask, &amp) in &state.amps {
                if let Some((m, sign)) = apply_string(mask, &term.ops) {
                    *out.amps.entry(m).or_default() += term.coeff * amp * sign;
                }
            }
        }
        out
    }
}

fn apply_string(mut mask: u64, ops: &[Ladder]) -> Option<(u64, f64)> {
    let mut sign = 1.0;
    for op in ops.iter().rev() {
        let (m, s) = apply_one(mask, *op)?;
        mask = m;
        sign *= s;
    }
    Some((mask, sign))
}

fn apply_one(mask: u64, op: Ladder) -> Option<(u64, f64)> {
    let (m, create) = match op {
        Ladder::Create(m) => (m, true),
        Ladder::Annihilate(m) => (m, false),
    };
    let bit = 1u64 << m;
    let occupied = mask & bit != 0;
    if occupied == create {
        return None;
    }
    let below = (mask & (bit - 1)).count_ones();
    let sign = if below % 2 == 0 { 1.0 } else { -1.0 };
    Some((mask ^ bit, sign))
}

/// Superposition of occupation-number kets.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FockState {
    amps: BTreeMap<u64, Complex64>,
}

impl FockState {
    pub fn vacuum() -> Self {
        let mut amps = BTreeMap::new();
        amps.insert(0, Complex64::new(1.0, 0.0));
        Self { amps }
    }

    /// `sum_ij amp[i][j] c^dag_{i up} c^dag_{j down} |0>`, built by literal
    /// operator application.
    pub fn from_two_electron(state: &TwoElectronState) -> Self {
        let n = state.num_sites();
        assert!(2 * n <= 64, "fock engine supports at most 32 sites");
        let mut out = FockState::default();
        let vac = FockState::vacuum();
        for i in 0..n {
            for j in 0..n {
                let a = state.amp(i, j);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let mut op = Operator::new();
                op.add(
                    a,
                    vec![
                        Ladder::Create(mode(i, Spin::Up)),
                        Ladder::Create(mode(j, Spin::Down)),
                    ],
                );
                out.accumulate(&op.apply(&vac));
            }
        }
        out
    }

    /// Reads back `amp[i][j] = <0| c_{j down} c_{i up} |psi>`.
    pub fn two_electron_amp(&self, up_site: usize, down_site: usize) -> Complex64 {
        let mut op = Operator::new();
        op.add(
            Complex64::new(1.0, 0.0),
            vec![
                Ladder::Annihilate(mode(down_site, Spin::Down)),
                Ladder::Annihilate(mode(up_site, Spin::Up)),
            ],
        );
        op.apply(self).amps.get(&0).copied().unwrap_or_default()
    }

    pub fn accumulate(&mut self, other: &FockState) {
        for (&m, &a) in &other.amps {
            *self.amps.entry(m).or_default() += a;
        }
    }

    /// `<self|other>`
    pub fn inner(&self, other: &FockState) -> Complex64 {
        self.amps
            .iter()
            .filter_map(|(m, a)| other.amps.get(m).map(|b| a.conj() * b))
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn amplitude(&self, mask: u64) -> Complex64 {
        self.amps.get(&mask).copied().unwrap_or_default()
    }
}

/// `S^+ = sum_{i in sites} c^dag_{i up} c_{i down}`
pub fn spin_raising(sites: &[usize]) -> Operator {
    let mut op = Operator::new();
    for &i in sites {
        op.add_hop(Complex64::new(1.0, 0.0), mode(i, Spin::Up), mode(i, Spin::Down));
    }
    op
}

/// `S^- = sum_{i in sites} c^dag_{i down} c_{i up}`
pub fn spin_lowering(sites: &[usize]) -> Operator {
    let mut op = Operator::new();
    for &i in sites {
        op.add_hop(Complex64::new(1.0, 0.0), mode(i, Spin::Down), mode(i, Spin::Up));
    }
    op
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{make_singlet, TwoElectronState};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn anticommutation() {
        // c^dag_a c^dag_b = -c^dag_b c^dag_a
        let vac = FockState::vacuum();
        let mut ab = Operator::new();
        ab.add(one(), vec![Ladder::Create(1), Ladder::Create(4)]);
        let mut ba = Operator::new();
        ba.add(one(), vec![Ladder::Create(4), Ladder::Create(1)]);
        let x = ab.apply(&vac);
        let y = ba.apply(&vac);
        assert_eq!(x.inner(&y), -one());
        // Pauli exclusion
        let mut aa = Operator::new();
        aa.add(one(), vec![Ladder::Create(2), Ladder::Create(2)]);
        assert_eq!(aa.apply(&vac).norm_sqr(), 0.0);
    }

    #[test]
    fn singlet_from_literal_operators() {
        // (c^dag_{0u} c^dag_{1d} - c^dag_{0d} c^dag_{1u}) |0> / sqrt2
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut op = Operator::new();
        op.add(
            Complex64::new(h, 0.0),
            vec![Ladder::Create(mode(0, Spin::Up)), Ladder::Create(mode(1, Spin::Down))],
        );
        op.add(
            Complex64::new(-h, 0.0),
            vec![Ladder::Create(mode(0, Spin::Down)), Ladder::Create(mode(1, Spin::Up))],
        );
        let literal = op.apply(&FockState::vacuum());
        let canonical = FockState::from_two_electron(&make_singlet(2, 0, 1).unwrap());
        assert!((literal.inner(&canonical) - one()).norm() < 1e-15);
        assert!((literal.two_electron_amp(1, 0).re - h).abs() < 1e-15);
    }

    #[test]
    fn canonical_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = TwoElectronState::random(4, &mut rng).unwrap();
        let f = FockState::from_two_electron(&s);
        assert!((f.norm_sqr() - 1.0).abs() < 1e-12);
        for i in 0..4 {
            for j in 0..4 {
                assert!((f.two_electron_amp(i, j) - s.amp(i, j)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn singlet_transverse_correlator() {
        let f = FockState::from_two_electron(&make_singlet(2, 0, 1).unwrap());
        let moved = spin_raising(&[0]).apply(&spin_lowering(&[1]).apply(&f));
        assert!((f.inner(&moved) - Complex64::new(-0.5, 0.0)).norm() < 1e-15);
    }
}
