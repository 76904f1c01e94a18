//! Thermal two-molecule states and Wootters concurrence.

use nalgebra::{Matrix4, Schur, SymmetricEigen, SVD};

use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::pair::PairEigensystem;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;
/// Largest tolerated imaginary part of an eigenvalue of `ρ (σy⊗σy) ρ* (σy⊗σy)`.
const SPIN_FLIP_IMAG_TOL: f64 = 1e-8;
const NORM_TOL: f64 = 1e-8;

/// Two-qubit density matrix over `|00⟩, |01⟩, |10⟩, |11⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix4(Matrix4<C64>);

impl DensityMatrix4 {
    /// Validates Hermiticity, unit trace and positive semidefiniteness.
    pub fn new(m: Matrix4<C64>) -> Result<Self> {
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonPhysical("non-finite entries".into()));
        }
        if !linalg::is_hermitian(&m, HERMITIAN_TOL) {
            return Err(Error::NonPhysical("not Hermitian".into()));
        }
        let trace = m.trace();
        if (trace - C64::from(1.0)).norm() > TRACE_TOL {
            return Err(Error::NonPhysical(format!("trace is {trace}")));
        }
        let min = SymmetricEigen::new(m).eigenvalues.min();
        if min < -PSD_TOL {
            return Err(Error::NonPhysical(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self(m))
    }

    pub fn from_pure(state: &[C64; 4]) -> Result<Self> {
        check_norm(state)?;
        Ok(Self(projector(state)))
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.0
    }
}

fn projector(v: &[C64; 4]) -> Matrix4<C64> {
    Matrix4::from_fn(|i, j| v[i] * v[j].conj())
}

fn check_norm(state: &[C64; 4]) -> Result<()> {
    let norm = state.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > NORM_TOL || !norm.is_finite() {
        return Err(Error::NotNormalized((norm - 1.0).abs()));
    }
    Ok(())
}

/// `k_B T / B`. Zero means the ground-state limit.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Temperature(f64);

impl Temperature {
    pub fn new(kt_over_b: f64) -> Result<Self> {
        if !kt_over_b.is_finite() || kt_over_b < 0.0 {
            return Err(Error::invalid(format!("kT/B must be finite and >= 0, got {kt_over_b}")));
        }
        Ok(Self(kt_over_b))
    }

    pub const fn zero() -> Self {
        Self(0.0)
    }

    pub fn kt_over_b(&self) -> f64 {
        self.0
    }
}

/// Boltzmann weights of the four sorted levels. Energies are measured from the
/// lowest one. At zero temperature the weight is shared equally among levels
/// degenerate with the ground state.
pub fn boltzmann_weights(pair: &PairEigensystem, temp: Temperature) -> [f64; 4] {
    let e0 = pair.energies[0];
    let mut w = [0.0; 4];
    if temp.0 == 0.0 {
        let g = pair.ground_degeneracy();
        w.iter_mut().take(g).for_each(|x| *x = 1.0 / g as f64);
        return w;
    }
    for (wn, en) in w.iter_mut().zip(&pair.energies) {
        *wn = (-(en - e0) / temp.0).exp();
    }
    let z: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= z);
    w
}

/// `ρ = Σ_n w_n |Ψ_n⟩⟨Ψ_n|`.
pub fn thermal_density_matrix(pair: &PairEigensystem, temp: Temperature) -> Result<DensityMatrix4> {
    let w = boltzmann_weights(pair, temp);
    let mut rho = Matrix4::<C64>::zeros();
    for (wn, state) in w.iter().zip(&pair.states) {
        if *wn > 0.0 {
            rho += projector(state) * C64::from(*wn);
        }
    }
    // restore exact Hermiticity lost to round-off in the sum
    let rho = (rho + rho.adjoint()) * C64::from(0.5);
    DensityMatrix4::new(rho)
}

/// `σ_y ⊗ σ_y` in the `|00⟩, |01⟩, |10⟩, |11⟩` ordering.
pub fn spin_flip_operator() -> Matrix4<C64> {
    let mut y = Matrix4::<C64>::zeros();
    y[(0, 3)] = C64::from(-1.0);
    y[(1, 2)] = C64::from(1.0);
    y[(2, 1)] = C64::from(1.0);
    y[(3, 0)] = C64::from(-1.0);
    y
}

/// Eigenvalues of `ρ (σy⊗σy) ρ* (σy⊗σy)`, clamped to `≥ 0` and sorted
/// descending.
pub fn spin_flip_eigenvalues(rho: &DensityMatrix4) -> Result<[f64; 4]> {
    let y = spin_flip_operator();
    let r = rho.0;
    let rt = r * y * r.map(|z| z.conj()) * y;
    let eig = Schur::try_new(rt, 1e-15, 10_000)
        .and_then(|s| s.eigenvalues())
        .ok_or(Error::Eigensolver { dim: 4 })?;
    let mut out = [0.0; 4];
    for (o, l) in out.iter_mut().zip(eig.iter()) {
        if l.im.abs() >= SPIN_FLIP_IMAG_TOL {
            return Err(Error::NonPhysical(format!("spin-flip eigenvalue {l} is not real")));
        }
        *o = l.re.max(0.0);
    }
    out.sort_by(|a, b| b.total_cmp(a));
    Ok(out)
}

/// Wootters concurrence `max(0, √λ₁ - √λ₂ - √λ₃ - √λ₄)`.
///
/// The square roots `√λ_i` are taken as the singular values of
/// `τ = Wᵀ (σy⊗σy) W` with `ρ = W W†`; their squares are exactly the
/// spin-flip eigenvalues, but unlike `√λ` of a near-zero eigenvalue they carry
/// round-off linearly rather than as a square root.
pub fn wootters_concurrence(rho: &DensityMatrix4) -> Result<f64> {
    // rejects states whose spin-flip spectrum is not real
    spin_flip_eigenvalues(rho)?;

    let eig = SymmetricEigen::new(rho.0);
    let mut w = Matrix4::<C64>::zeros();
    for k in 0..4 {
        let p = eig.eigenvalues[k].max(0.0).sqrt();
        w.set_column(k, &(eig.eigenvectors.column(k) * C64::from(p)));
    }
    let tau = w.transpose() * spin_flip_operator() * w;
    let mut sv: Vec<f64> = SVD::try_new(tau, false, false, 1e-15, 10_000)
        .ok_or(Error::Eigensolver { dim: 4 })?
        .singular_values
        .iter()
        .copied()
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok((sv[0] - sv[1] - sv[2] - sv[3]).clamp(0.0, 1.0))
}

/// `2 |d₂ d₃ - d₁ d₄|` for a normalized pure state.
pub fn pure_concurrence(state: &[C64; 4]) -> Result<f64> {
    check_norm(state)?;
    Ok(2.0 * (state[1] * state[2] - state[0] * state[3]).norm())
}

pub fn thermal_concurrence(pair: &PairEigensystem, temp: Temperature) -> Result<f64> {
    wootters_concurrence(&thermal_density_matrix(pair, temp)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pair::{solve_pair, PairParams};
    use crate::rotor::RotorParams;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> C64 {
        C64::from(re)
    }

    fn pair(omega: f64, theta_deg: f64, coupling: f64) -> PairEigensystem {
        let rotor = RotorParams::from_degrees(omega, theta_deg, 30).unwrap();
        solve_pair(&PairParams::new(rotor, coupling).unwrap()).unwrap()
    }

    fn random_state(rng: &mut impl Rng) -> [C64; 4] {
        let mut v: [C64; 4] = std::array::from_fn(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= n);
        v
    }

    fn local_phase(phi_a: f64, phi_b: f64) -> Matrix4<C64> {
        let a = [c(1.0), C64::from_polar(1.0, phi_a)];
        let b = [c(1.0), C64::from_polar(1.0, phi_b)];
        Matrix4::from_fn(|i, j| if i == j { a[i >> 1] * b[i & 1] } else { C64::default() })
    }

    #[test]
    fn spin_flip_ordering() {
        let y = spin_flip_operator();
        let ket01 = nalgebra::Vector4::new(c(0.0), c(1.0), c(0.0), c(0.0));
        let ket00 = nalgebra::Vector4::new(c(1.0), c(0.0), c(0.0), c(0.0));
        assert_eq!(y * ket01, nalgebra::Vector4::new(c(0.0), c(0.0), c(1.0), c(0.0)));
        assert_eq!(y * ket00, nalgebra::Vector4::new(c(0.0), c(0.0), c(0.0), c(-1.0)));
        // σy⊗σy built from the Pauli matrices directly
        let sy = [[c(0.0), C64::new(0.0, -1.0)], [C64::new(0.0, 1.0), c(0.0)]];
        let kron = Matrix4::from_fn(|i, j| sy[i >> 1][j >> 1] * sy[i & 1][j & 1]);
        assert_eq!(kron, y);
    }

    #[test]
    fn textbook_states() {
        let s = FRAC_1_SQRT_2;
        let phi_plus = [c(s), c(0.0), c(0.0), c(s)];
        let rho = DensityMatrix4::from_pure(&phi_plus).unwrap();
        assert!((wootters_concurrence(&rho).unwrap() - 1.0).abs() < 1e-12);

        let mixed = DensityMatrix4::new(Matrix4::identity() * c(0.25)).unwrap();
        assert!(wootters_concurrence(&mixed).unwrap().abs() < 1e-12);

        assert_eq!(pure_concurrence(&[c(1.0), c(0.0), c(0.0), c(0.0)]).unwrap(), 0.0);
        assert!((pure_concurrence(&[c(s), c(0.0), c(0.0), c(-s)]).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            pure_concurrence(&[c(1.0), c(0.1), c(0.0), c(0.0)]),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn rejects_non_physical_matrices() {
        let mut m = Matrix4::identity() * c(0.25);
        m[(0, 1)] = C64::new(0.0, 0.1);
        assert!(DensityMatrix4::new(m).is_err());
        assert!(DensityMatrix4::new(Matrix4::identity() * c(0.3)).is_err());
        let neg = Matrix4::from_diagonal(&nalgebra::Vector4::new(c(1.2), c(-0.2), c(0.0), c(0.0)));
        assert!(DensityMatrix4::new(neg).is_err());
        assert!(Temperature::new(-1.0).is_err());
        assert!(Temperature::new(f64::NAN).is_err());
    }

    #[test]
    fn random_pure_states_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let v = random_state(&mut rng);
            let w = wootters_concurrence(&DensityMatrix4::from_pure(&v).unwrap()).unwrap();
            let p = pure_concurrence(&v).unwrap();
            assert!((w - p).abs() < 1e-10, "{w} vs {p}");
        }
    }

    #[test]
    fn singular_values_square_to_spin_flip_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let (a, b) = (random_state(&mut rng), random_state(&mut rng));
            let p: f64 = rng.gen();
            let rho = DensityMatrix4::new(projector(&a) * c(p) + projector(&b) * c(1.0 - p)).unwrap();
            let lambda = spin_flip_eigenvalues(&rho).unwrap();
            let via_eig = (lambda[0].sqrt() - lambda[1].sqrt() - lambda[2].sqrt() - lambda[3].sqrt()).max(0.0);
            let via_svd = wootters_concurrence(&rho).unwrap();
            assert!((via_eig - via_svd).abs() < 1e-6, "{via_eig} vs {via_svd}");
        }
    }

    #[test]
    fn zero_and_infinite_temperature() {
        let p = pair(2.0, 20.0, 0.8);
        let rho0 = thermal_density_matrix(&p, Temperature::zero()).unwrap();
        let proj = projector(&p.states[0]);
        assert!((rho0.matrix() - proj).norm() < 1e-14);

        let hot = thermal_density_matrix(&p, Temperature::new(1e12).unwrap()).unwrap();
        let avg: Matrix4<C64> = p.states.iter().map(projector).sum::<Matrix4<C64>>() * c(0.25);
        assert!((hot.matrix() - avg).norm() < 1e-10);
        assert!((hot.matrix() - Matrix4::identity() * c(0.25)).norm() < 1e-10);
    }

    #[test]
    fn thermal_state_matches_unshifted_evaluation() {
        let p = pair(2.0, 0.0, 0.8);
        let rho = thermal_density_matrix(&p, Temperature::new(1.0).unwrap()).unwrap();
        // direct Boltzmann factors without the ground-energy shift
        let factors: Vec<f64> = p.energies.iter().map(|e| (-e).exp()).collect();
        let z: f64 = factors.iter().sum();
        let mut direct = Matrix4::<C64>::zeros();
        for (f, s) in factors.iter().zip(&p.states) {
            direct += projector(s) * c(f / z);
        }
        assert!((rho.matrix() - direct).norm() < 1e-14);
    }

    #[test]
    fn degenerate_ground_is_mixed_equally() {
        let mut p = pair(2.0, 0.0, 0.8);
        p.energies[1] = p.energies[0];
        assert_eq!(p.ground_degeneracy(), 2);
        assert_eq!(boltzmann_weights(&p, Temperature::zero()), [0.5, 0.5, 0.0, 0.0]);
    }

    #[test]
    fn energy_offset_cancels() {
        let p = pair(1.1, 33.0, 1.4);
        let mut shifted = p.clone();
        shifted.energies.iter_mut().for_each(|e| *e += 123.456);
        for &kt in &[0.05, 0.3, 2.0] {
            let t = Temperature::new(kt).unwrap();
            let a = thermal_density_matrix(&p, t).unwrap();
            let b = thermal_density_matrix(&shifted, t).unwrap();
            assert!((a.matrix() - b.matrix()).iter().all(|z| z.norm() < 1e-12));
        }
    }

    #[test]
    fn thermal_limits() {
        let p = pair(2.0, 0.0, 0.8);
        let c0 = thermal_concurrence(&p, Temperature::zero()).unwrap();
        assert!((c0 - pure_concurrence(&p.states[0]).unwrap()).abs() < 1e-10);
        assert!(thermal_concurrence(&p, Temperature::new(100.0).unwrap()).unwrap() < 1e-3);

        let cs: Vec<f64> = [0.1, 0.3, 1.0]
            .iter()
            .map(|&t| thermal_concurrence(&p, Temperature::new(t).unwrap()).unwrap())
            .collect();
        assert!(cs.windows(2).all(|w| w[1] <= w[0]), "{cs:?}");
    }

    #[test]
    fn mixture_bound_on_grid() {
        for &(omega, theta, coupling) in &[(0.5, 0.0, 0.8), (2.0, 45.0, 0.8), (2.0, 90.0, 3.0), (4.0, 70.0, 1.5)] {
            let p = pair(omega, theta, coupling);
            let pure: Vec<f64> = p.states.iter().map(|s| pure_concurrence(s).unwrap()).collect();
            for &kt in &[0.1, 0.5, 2.0] {
                let t = Temperature::new(kt).unwrap();
                let w = boltzmann_weights(&p, t);
                let bound: f64 = w.iter().zip(&pure).map(|(a, b)| a * b).sum();
                assert!(thermal_concurrence(&p, t).unwrap() <= bound + 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn concurrence_in_unit_interval_and_local_phase_invariant(
            seed in any::<u64>(), p in 0.0f64..1.0, phi_a in -3.2f64..3.2, phi_b in -3.2f64..3.2,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (a, b) = (random_state(&mut rng), random_state(&mut rng));
            let m = projector(&a) * c(p) + projector(&b) * c(1.0 - p);
            let rho = DensityMatrix4::new(m).unwrap();
            let base = wootters_concurrence(&rho).unwrap();
            prop_assert!((0.0..=1.0).contains(&base));

            let u = local_phase(phi_a, phi_b);
            let rotated = DensityMatrix4::new(u * m * u.adjoint()).unwrap();
            prop_assert!((wootters_concurrence(&rotated).unwrap() - base).abs() < 1e-10);
        }
    }
}
