//! Time evolution `e^{-iHt}` in the two-electron sector.
//!
//! Two strategies are registered by name: `exact` diagonalizes the dense
//! `N^2 x N^2` Hamiltonian once and is limited to moderate lattices, while
//! `krylov` advances the state in short Lanczos steps using only
//! matrix-free Hamiltonian products.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::HubbardHamiltonian;
use crate::error::{Error, Result};
use crate::lattice::TwoElectronState;
use crate::registry::{Named, Registry};

/// Receives the evolved state at each requested time.
pub type Visitor<'a> = dyn FnMut(f64, &TwoElectronState) -> Result<()> + 'a;

pub trait Propagator: Named + Send + Sync {
    /// Calls `visit` with `e^{-iHt} initial` for every `t` in `times`, which
    /// must be non-negative and non-decreasing.
    fn propagate(
        &self,
        ham: &HubbardHamiltonian,
        initial: &TwoElectronState,
        times: &[f64],
        visit: &mut Visitor<'_>,
    ) -> Result<()>;
}

/// `e^{-iHt} state` at a single time.
pub fn evolve(
    propagator: &dyn Propagator,
    ham: &HubbardHamiltonian,
    state: &TwoElectronState,
    time: f64,
) -> Result<TwoElectronState> {
    let mut out = None;
    propagator.propagate(ham, state, &[time], &mut |_, s| {
        out = Some(s.clone());
        Ok(())
    })?;
    Ok(out.expect("one time requested"))
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::Domain("evolution times must be finite and non-negative".into()));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("evolution times must be non-decreasing".into()));
    }
    Ok(())
}

fn check_state(ham: &HubbardHamiltonian, state: &TwoElectronState) -> Result<()> {
    if state.num_sites() != ham.params().num_sites {
        return Err(Error::InvalidState(format!(
            "state has {} sites, Hamiltonian {}",
            state.num_sites(),
            ham.params().num_sites
        )));
    }
    Ok(())
}

/// Full eigendecomposition of the dense Hamiltonian.
#[derive(Debug, Clone)]
pub struct ExactPropagator {
    /// Largest lattice accepted; the dense problem has dimension `N^2`.
    pub max_sites: usize,
}

impl Default for ExactPropagator {
    fn default() -> Self {
        Self { max_sites: 48 }
    }
}

impl Named for ExactPropagator {
    fn name(&self) -> &'static str {
        "exact"
    }
}

impl Propagator for ExactPropagator {
    fn propagate(
        &self,
        ham: &HubbardHamiltonian,
        initial: &TwoElectronState,
        times: &[f64],
        visit: &mut Visitor<'_>,
    ) -> Result<()> {
        check_times(times)?;
        check_state(ham, initial)?;
        let n = ham.params().num_sites;
        if n > self.max_sites {
            return Err(Error::TooLarge {
                dim: ham.dim(),
                limit: self.max_sites * self.max_sites,
            });
        }
        let eig = SymmetricEigen::new(ham.to_dense());
        let v = &eig.eigenvectors;
        let re = DVector::from_iterator(ham.dim(), initial.amplitudes().iter().map(|z| z.re));
        let im = DVector::from_iterator(ham.dim(), initial.amplitudes().iter().map(|z| z.im));
        let (cr, ci) = (v.tr_mul(&re), v.tr_mul(&im));
        for &t in times {
            let mut pr = DVector::zeros(ham.dim());
            let mut pi = DVector::zeros(ham.dim());
            for (k, &e) in eig.eigenvalues.iter().enumerate() {
                let c = Complex64::new(cr[k], ci[k]) * Complex64::from_polar(1.0, -e * t);
                pr[k] = c.re;
                pi[k] = c.im;
            }
            let (xr, xi) = (v * pr, v * pi);
            let amp = xr.iter().zip(xi.iter()).map(|(&a, &b)| Complex64::new(a, b)).collect();
            visit(t, &TwoElectronState::from_raw(n, amp)?)?;
        }
        Ok(())
    }
}

/// Lanczos propagation in steps of at most `dt`.
#[derive(Debug, Clone)]
pub struct KrylovPropagator {
    pub dt: f64,
    pub max_dim: usize,
    /// Bound on the a-posteriori error estimate per step.
    pub tolerance: f64,
}

impl Default for KrylovPropagator {
    fn default() -> Self {
        Self {
            dt: 0.05,
            max_dim: 30,
            tolerance: 1e-12,
        }
    }
}

impl Named for KrylovPropagator {
    fn name(&self) -> &'static str {
        "krylov"
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `exp(-i T h) e_1` for a real symmetric tridiagonal `T`.
fn tridiagonal_exp(alpha: &[f64], beta: &[f64], h: f64) -> Vec<Complex64> {
    let m = alpha.len();
    let mut t = DMatrix::zeros(m, m);
    for k in 0..m {
        t[(k, k)] = alpha[k];
        if k + 1 < m {
            t[(k, k + 1)] = beta[k];
            t[(k + 1, k)] = beta[k];
        }
    }
    let eig = SymmetricEigen::new(t);
    let s = &eig.eigenvectors;
    (0..m)
        .map(|r| {
            (0..m)
                .map(|c| Complex64::from_polar(s[(r, c)] * s[(0, c)], -eig.eigenvalues[c] * h))
                .sum()
        })
        .collect()
}

impl KrylovPropagator {
    /// One Lanczos step `e^{-iH h} v` with full reorthogonalization.
    pub fn step(&self, ham: &HubbardHamiltonian, v: &[Complex64], h: f64) -> Result<Vec<Complex64>> {
        let d = v.len();
        let beta0 = norm(v);
        if beta0 == 0.0 || h == 0.0 {
            return Ok(v.to_vec());
        }
        let mut basis: Vec<Vec<Complex64>> = vec![v.iter().map(|z| z / beta0).collect()];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut w = vec![Complex64::new(0.0, 0.0); d];
        let mut residual = f64::INFINITY;
        for k in 0..self.max_dim.min(d) {
            ham.apply_into(&basis[k], &mut w);
            alpha.push(dot(&basis[k], &w).re);
            // two passes of Gram-Schmidt against the whole basis
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(q, &w);
                    w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
                }
            }
            let b = norm(&w);
            let y = tridiagonal_exp(&alpha, &beta, h);
            residual = b * y[k].norm();
            if residual <= self.tolerance || b <= 1e-14 {
                let mut out = vec![Complex64::new(0.0, 0.0); d];
                for (q, c) in basis.iter().zip(&y) {
                    let c = c * beta0;
                    out.iter_mut().zip(q).for_each(|(x, y)| *x += c * y);
                }
                return Ok(out);
            }
            beta.push(b);
            basis.push(w.iter().map(|z| z / b).collect());
        }
        Err(Error::KrylovBreakdown {
            residual,
            tolerance: self.tolerance,
        })
    }
}

impl Propagator for KrylovPropagator {
    fn propagate(
        &self,
        ham: &HubbardHamiltonian,
        initial: &TwoElectronState,
        times: &[f64],
        visit: &mut Visitor<'_>,
    ) -> Result<()> {
        check_times(times)?;
        check_state(ham, initial)?;
        if !(self.dt > 0.0) || self.max_dim < 2 {
            return Err(Error::Config(format!(
                "krylov needs dt > 0 and dimension >= 2 (dt = {}, dim = {})",
                self.dt, self.max_dim
            )));
        }
        let n = initial.num_sites();
        let mut now = 0.0;
        let mut v = initial.amplitudes().to_vec();
        for &target in times {
            let span = target - now;
            if span > 0.0 {
                let steps = ((span / self.dt) - 1e-9).ceil().max(1.0) as usize;
                let h = span / steps as f64;
                for _ in 0..steps {
                    v = self.step(ham, &v, h)?;
                }
                now = target;
            }
            visit(target, &TwoElectronState::from_raw(n, v.clone())?)?;
        }
        Ok(())
    }
}

pub type PropagatorRegistry = Registry<dyn Propagator>;

/// Registry with both built-in propagators at the given settings.
pub fn default_propagators(exact: ExactPropagator, krylov: KrylovPropagator) -> PropagatorRegistry {
    let mut reg = PropagatorRegistry::new("propagator");
    reg.register(Box::new(exact)).register(Box::new(krylov));
    reg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hubbard::{build_hamiltonian, Boundary, HubbardParams};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ham(n: usize, u: f64, boundary: Boundary) -> HubbardHamiltonian {
        build_hamiltonian(HubbardParams::new(n, 1.0, u, boundary).unwrap())
    }

    fn max_diff(a: &TwoElectronState, b: &TwoElectronState) -> f64 {
        a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    /// `V diag(e^{-iEt}) V^T` of the single-particle hopping matrix.
    fn single_particle_propagator(h: &HubbardHamiltonian, t: f64) -> DMatrix<Complex64> {
        let eig = SymmetricEigen::new(h.single_particle());
        let v = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
        let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|e| Complex64::from_polar(1.0, -e * t)));
        &v * phases * v.transpose()
    }

    #[test]
    fn zero_time_is_identity() {
        let h = ham(6, 2.0, Boundary::Open);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = TwoElectronState::random(6, &mut rng).unwrap();
        for p in [&ExactPropagator::default() as &dyn Propagator, &KrylovPropagator::default()] {
            assert!(max_diff(&evolve(p, &h, &s, 0.0).unwrap(), &s) < 1e-14);
        }
    }

    #[test]
    fn free_evolution_factorizes() {
        let n = 8;
        let h = ham(n, 0.0, Boundary::Open);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = TwoElectronState::random(n, &mut rng).unwrap();
        let t = 3.7;
        let p = single_particle_propagator(&h, t);
        let m = DMatrix::from_row_slice(n, n, s.amplitudes());
        let oracle = &p * m * p.transpose();
        for prop in [&ExactPropagator::default() as &dyn Propagator, &KrylovPropagator::default()] {
            let out = evolve(prop, &h, &s, t).unwrap();
            for i in 0..n {
                for j in 0..n {
                    assert_abs_diff_eq!((out.amp(i, j) - oracle[(i, j)]).norm(), 0.0, epsilon = 1e-8);
                }
            }
        }
    }

    #[test]
    fn krylov_agrees_with_exact_when_interacting() {
        let h = ham(7, 3.0, Boundary::Periodic);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = TwoElectronState::random(7, &mut rng).unwrap();
        let a = evolve(&ExactPropagator::default(), &h, &s, 5.0).unwrap();
        let b = evolve(&KrylovPropagator::default(), &h, &s, 5.0).unwrap();
        assert!(max_diff(&a, &b) < 1e-9);
    }

    #[test]
    fn unitarity_and_energy() {
        let h = ham(10, 1.5, Boundary::Open);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = TwoElectronState::random(10, &mut rng).unwrap();
        let e0 = h.expectation(&s);
        let times: Vec<f64> = (0..=10).map(|k| 10.0 * k as f64).collect();
        let exact = ExactPropagator::default();
        exact
            .propagate(&h, &s, &times, &mut |_, st| {
                assert!((st.norm_sqr() - 1.0).abs() < 1e-8);
                assert!((h.expectation(st) - e0).abs() < 1e-8);
                Ok(())
            })
            .unwrap();
        let krylov = KrylovPropagator::default();
        krylov
            .propagate(&h, &s, &times[..5], &mut |_, st| {
                assert!((st.norm_sqr() - 1.0).abs() < 1e-8);
                assert!((h.expectation(st) - e0).abs() < 1e-6);
                Ok(())
            })
            .unwrap();
    }

    #[test]
    fn long_krylov_run_keeps_norm() {
        let h = ham(16, 1.0, Boundary::Open);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = TwoElectronState::random(16, &mut rng).unwrap();
        let out = evolve(&KrylovPropagator::default(), &h, &s, 40.0).unwrap();
        assert!((out.norm_sqr() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn guards_and_errors() {
        let h = ham(6, 1.0, Boundary::Open);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let s = TwoElectronState::random(6, &mut rng).unwrap();
        let small = ExactPropagator { max_sites: 4 };
        assert!(matches!(evolve(&small, &h, &s, 1.0), Err(Error::TooLarge { .. })));
        let starved = KrylovPropagator { dt: 5.0, max_dim: 3, tolerance: 1e-12 };
        assert!(matches!(evolve(&starved, &h, &s, 5.0), Err(Error::KrylovBreakdown { .. })));
        let k = KrylovPropagator::default();
        assert!(k.propagate(&h, &s, &[2.0, 1.0], &mut |_, _| Ok(())).is_err());
        assert!(evolve(&k, &h, &s, -1.0).is_err());
    }

    #[test]
    fn registry_lookup() {
        let reg = default_propagators(ExactPropagator::default(), KrylovPropagator::default());
        assert_eq!(reg.names(), vec!["exact", "krylov"]);
        assert!(reg.get("rk4").is_err());
    }
}
