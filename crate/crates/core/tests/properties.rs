use std::f64::consts::TAU;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spinberry::berry_lattice::lattice_berry_phase;
use spinberry::hubbard::{build_hamiltonian, evolve, extract_amplitudes, Boundary, HubbardParams, KrylovPropagator};
use spinberry::measures::{default_measures, overlap_concurrence, reduced_spin_density, wootters_concurrence};
use spinberry::{RegionPartition, TwoElectronState};

fn random_state(seed: u64, n: usize) -> TwoElectronState {
    TwoElectronState::random(n, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

/// Keeps only amplitudes with one electron in each region.
fn post_selected(state: &TwoElectronState, part: &RegionPartition) -> TwoElectronState {
    let mut entries = Vec::new();
    for &a in part.region_a() {
        for &b in part.region_b() {
            entries.push((a, b, state.amp(a, b)));
            entries.push((b, a, state.amp(b, a)));
        }
    }
    TwoElectronState::from_entries(state.num_sites(), entries).unwrap()
}

proptest! {
    #[test]
    fn measures_stay_in_unit_interval(seed in any::<u64>(), n in 2usize..7, cut in 1usize..6) {
        let cut = cut.min(n - 1);
        let part = RegionPartition::new(n, 0..cut, cut..n).unwrap();
        let state = post_selected(&random_state(seed, n), &part);
        for m in default_measures().iter() {
            let c = m.evaluate(&state, &part).unwrap();
            prop_assert!((0.0..=1.0 + 1e-12).contains(&c), "{} gave {}", m.name(), c);
        }
    }

    #[test]
    fn post_selection_is_transparent(seed in any::<u64>(), n in 3usize..7) {
        let part = RegionPartition::new(n, [0], 1..n).unwrap();
        let raw = random_state(seed, n);
        let kept = post_selected(&raw, &part);
        let a = overlap_concurrence(&raw, &part, true).unwrap();
        let b = overlap_concurrence(&kept, &part, false).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
        let wa = wootters_concurrence(&reduced_spin_density(&raw, &part).unwrap());
        let wb = wootters_concurrence(&reduced_spin_density(&kept, &part).unwrap());
        prop_assert!((wa - wb).abs() < 1e-10);
        // pure post-selected spin states cannot beat the Wootters value
        prop_assert!(b <= wb + 1e-10);
    }

    #[test]
    fn constructors_normalize(seed in any::<u64>(), n in 1usize..8, scale in 1e-3f64..1e3) {
        let raw = random_state(seed, n);
        let scaled: Vec<Complex64> = raw.amplitudes().iter().map(|z| z * scale).collect();
        let s = TwoElectronState::from_matrix(n, scaled).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        prop_assert!((raw.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn dump_round_trip_is_exact(seed in any::<u64>(), n in 1usize..6) {
        let s = random_state(seed, n);
        prop_assert_eq!(TwoElectronState::from_json(&s.to_json().unwrap()).unwrap(), s);
    }

    #[test]
    fn channel_concurrence_peaks_at_equal_weights(p in 0.01f64..0.99, phase in -3.0f64..3.0) {
        // up electron at site 0 (A) or 3 (B), down electron on the other side
        let part = RegionPartition::halves(4).unwrap();
        let s = TwoElectronState::from_entries(4, [
            (0, 3, Complex64::new(p.sqrt(), 0.0)),
            (3, 0, Complex64::from_polar((1.0 - p).sqrt(), phase)),
        ]).unwrap();
        let r = extract_amplitudes(&s, &part).unwrap();
        prop_assert!((0.0..=1.0).contains(&r.c_tr));
        prop_assert!((r.c_tr - 2.0 * (p * (1.0 - p)).sqrt()).abs() < 1e-12);
        prop_assert!((r.c_tr - r.c_overlap).abs() < 1e-12);
        let berry = lattice_berry_phase(&s, &part).unwrap().norm() / TAU;
        prop_assert!((berry - r.c_overlap).abs() < 1e-12);
    }
}

#[test]
fn maximal_channel_concurrence_needs_equal_amplitudes() {
    let part = RegionPartition::halves(4).unwrap();
    let equal = TwoElectronState::from_entries(4, [(1, 2, Complex64::new(1.0, 0.0)), (2, 1, Complex64::new(0.0, 1.0))]).unwrap();
    assert!((extract_amplitudes(&equal, &part).unwrap().c_tr - 1.0).abs() < 1e-15);
    let unequal = TwoElectronState::from_entries(4, [(1, 2, Complex64::new(1.0, 0.0)), (2, 1, Complex64::new(0.9, 0.0))]).unwrap();
    assert!(extract_amplitudes(&unequal, &part).unwrap().c_tr < 1.0);
}

#[test]
fn evolution_stays_in_the_two_electron_sector() {
    let params = HubbardParams::new(10, 1.0, 2.0, Boundary::Periodic).unwrap();
    let ham = build_hamiltonian(params);
    let s = random_state(5, 10);
    let e0 = ham.expectation(&s);
    let fin = evolve(&KrylovPropagator::default(), &ham, &s, 25.0).unwrap();
    assert_eq!(fin.num_sites(), 10);
    assert!((fin.norm_sqr() - 1.0).abs() < 1e-8);
    assert!((ham.expectation(&fin) - e0).abs() < 1e-6);
}
