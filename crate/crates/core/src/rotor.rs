//! Single planar rotor in a tilted static field, solved in the free-rotor
//! basis `exp(i m θ)/√(2π)`, `m = -m_max..=m_max`.
//!
//! Energies are in units of the rotational constant `B`.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{self, C64};

pub const DEFAULT_M_MAX: usize = 30;

/// Relative gap `ε₂ - ε₁` below which the lowest-two-level truncation is
/// considered degenerate.
pub const DEFAULT_GUARD_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotorParams {
    omega_over_b: f64,
    theta_t: f64,
    m_max: usize,
}

impl RotorParams {
    /// `theta_t` is in radians and is wrapped into `[0, 2π)`.
    pub fn new(omega_over_b: f64, theta_t: f64, m_max: usize) -> Result<Self> {
        if !omega_over_b.is_finite() || omega_over_b < 0.0 {
            return Err(Error::invalid(format!(
                "omega/B must be finite and >= 0, got {omega_over_b}"
            )));
        }
        if !theta_t.is_finite() {
            return Err(Error::invalid("tilt angle must be finite"));
        }
        if m_max < 1 {
            return Err(Error::invalid("m_max must be at least 1"));
        }
        Ok(Self {
            omega_over_b,
            theta_t: theta_t.rem_euclid(2.0 * PI),
            m_max,
        })
    }

    pub fn with_default_basis(omega_over_b: f64, theta_t: f64) -> Result<Self> {
        Self::new(omega_over_b, theta_t, DEFAULT_M_MAX)
    }

    pub fn from_degrees(omega_over_b: f64, theta_t_deg: f64, m_max: usize) -> Result<Self> {
        Self::new(omega_over_b, theta_t_deg.to_radians(), m_max)
    }

    pub fn omega_over_b(&self) -> f64 {
        self.omega_over_b
    }

    pub fn theta_t(&self) -> f64 {
        self.theta_t
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn dim(&self) -> usize {
        2 * self.m_max + 1
    }
}

/// `H/B = m² δ_{m,m'} - (ω/B) cos(θ - θ_t)` in the free-rotor basis.
///
/// Row/column `i` holds `m = i - m_max`. The only off-diagonal entries are
/// `⟨m|H|m-1⟩ = -(ω/B)/2 · e^{-iθ_t}` and their conjugates.
pub fn build_rotor_hamiltonian(params: &RotorParams) -> DMatrix<C64> {
    let n = params.dim();
    let m_max = params.m_max as i64;
    let hop = C64::from_polar(-0.5 * params.omega_over_b, -params.theta_t);
    let mut h = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        let m = (i as i64 - m_max) as f64;
        h[(i, i)] = C64::new(m * m, 0.0);
        if i > 0 {
            h[(i, i - 1)] = hop;
            h[(i - 1, i)] = hop.conj();
        }
    }
    debug_assert!(linalg::is_hermitian(&h, 0.0));
    h
}

#[derive(Debug, Clone)]
pub struct RotorEigensystem {
    pub params: RotorParams,
    /// `ε_l/B`, ascending.
    pub energies: Vec<f64>,
    /// `coefficients[l][i]` is `c_m^l` with `m = i - m_max`.
    pub coefficients: Vec<Vec<C64>>,
}

/// Full eigendecomposition of [`build_rotor_hamiltonian`].
///
/// The tilted matrix is `U H(0) U†` with `U = diag(e^{-i m θ_t})`, so the real
/// symmetric `θ_t = 0` matrix is diagonalized and its eigenvectors rotated by
/// `U`. The spectrum is therefore identical for every tilt.
pub fn solve_rotor(params: &RotorParams) -> Result<RotorEigensystem> {
    let n = params.dim();
    let m_max = params.m_max as i64;
    let mut h = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let m = (i as i64 - m_max) as f64;
        h[(i, i)] = m * m;
        if i > 0 {
            h[(i, i - 1)] = -0.5 * params.omega_over_b;
            h[(i - 1, i)] = -0.5 * params.omega_over_b;
        }
    }
    let (energies, real_vectors) = linalg::symmetric_eigen(h)?;
    let rotation: Vec<C64> = (0..n)
        .map(|i| C64::from_polar(1.0, -((i as i64 - m_max) as f64) * params.theta_t))
        .collect();
    let coefficients = real_vectors
        .into_iter()
        .map(|v| {
            let mut c: Vec<C64> = v.iter().zip(&rotation).map(|(x, u)| u * *x).collect();
            linalg::fix_gauge(&mut c);
            c
        })
        .collect();
    Ok(RotorEigensystem {
        params: *params,
        energies,
        coefficients,
    })
}

impl RotorEigensystem {
    pub fn levels(&self) -> usize {
        self.energies.len()
    }

    /// `ε_j - ε_i` for `i < j`.
    pub fn level_gap(&self, i: usize, j: usize) -> Result<f64> {
        let levels = self.levels();
        if i >= j || j >= levels {
            return Err(Error::LevelIndex { i, j, levels });
        }
        Ok(self.energies[j] - self.energies[i])
    }

    pub fn m_of_index(&self, i: usize) -> i64 {
        i as i64 - self.params.m_max as i64
    }

    /// `ψ_l(θ)`.
    pub fn wavefunction(&self, level: usize, theta: f64) -> C64 {
        let norm = (2.0 * PI).sqrt().recip();
        self.coefficients[level]
            .iter()
            .enumerate()
            .map(|(i, c)| c * C64::from_polar(norm, self.m_of_index(i) as f64 * theta))
            .sum()
    }

    pub fn probability_density(&self, level: usize, theta: f64) -> f64 {
        self.wavefunction(level, theta).norm_sqr()
    }

    /// `⟨ψ_a| cos θ |ψ_b⟩ = Σ_m conj(a_m) (b_{m-1} + b_{m+1}) / 2`.
    pub fn cos_element(&self, a: usize, b: usize) -> C64 {
        let (ca, cb) = (&self.coefficients[a], &self.coefficients[b]);
        let n = ca.len();
        (0..n)
            .map(|i| {
                let lower = if i > 0 { cb[i - 1] } else { C64::default() };
                let upper = if i + 1 < n { cb[i + 1] } else { C64::default() };
                ca[i].conj() * (lower + upper) * 0.5
            })
            .sum()
    }

    /// `⟨ψ_a| sin θ |ψ_b⟩ = Σ_m conj(a_m) (b_{m-1} - b_{m+1}) / (2i)`.
    pub fn sin_element(&self, a: usize, b: usize) -> C64 {
        let (ca, cb) = (&self.coefficients[a], &self.coefficients[b]);
        let n = ca.len();
        let half_over_i = C64::new(0.0, -0.5);
        (0..n)
            .map(|i| {
                let lower = if i > 0 { cb[i - 1] } else { C64::default() };
                let upper = if i + 1 < n { cb[i + 1] } else { C64::default() };
                ca[i].conj() * (lower - upper) * half_over_i
            })
            .sum()
    }

    /// Multiply level `l` by `e^{i phases[l]}`. Levels beyond `phases` are untouched.
    pub fn with_level_phases(&self, phases: &[f64]) -> Self {
        let mut out = self.clone();
        for (coeffs, &phi) in out.coefficients.iter_mut().zip(phases) {
            let p = C64::from_polar(1.0, phi);
            coeffs.iter_mut().for_each(|c| *c *= p);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuardRejection {
    pub gap_12: f64,
    pub threshold: f64,
}

impl fmt::Display for GuardRejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "levels 1 and 2 are degenerate (gap {:.3e} < {:.3e}); the lowest-two-state truncation is invalid",
            self.gap_12, self.threshold
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GuardOutcome {
    Accepted,
    Rejected(GuardRejection),
}

impl GuardOutcome {
    pub fn is_accepted(&self) -> bool {
        matches!(self, GuardOutcome::Accepted)
    }

    pub fn into_result(self) -> Result<()> {
        match self {
            GuardOutcome::Accepted => Ok(()),
            GuardOutcome::Rejected(rejection) => Err(Error::GuardRejected { rejection, at: None }),
        }
    }
}

/// Rejects when `ε₂ - ε₁ < tolerance · max(1, |ε₁|)`.
pub fn two_level_guard(eig: &RotorEigensystem, tolerance: f64) -> GuardOutcome {
    if eig.levels() < 3 {
        // two-level basis (m_max = 0 is impossible, so this never triggers)
        return GuardOutcome::Accepted;
    }
    let gap_12 = eig.energies[2] - eig.energies[1];
    let threshold = tolerance * eig.energies[1].abs().max(1.0);
    if gap_12 < threshold {
        GuardOutcome::Rejected(GuardRejection { gap_12, threshold })
    } else {
        GuardOutcome::Accepted
    }
}

/// Matrix elements of `cos θ` and `sin θ` between the lowest two rotor states.
///
/// `c0 = ⟨0|cos|0⟩`, `c1 = ⟨1|cos|1⟩`, `cx = ⟨0|cos|1⟩`, `cxc = ⟨1|cos|0⟩`,
/// and the same for `s*` with `sin`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleFactors {
    pub c0: C64,
    pub c1: C64,
    pub cx: C64,
    pub cxc: C64,
    pub s0: C64,
    pub s1: C64,
    pub sx: C64,
    pub sxc: C64,
}

impl DipoleFactors {
    /// Checks conjugation, realness and `|·| ≤ 1` to within `tol`.
    pub fn check(&self, tol: f64) -> Result<()> {
        let bad = |what: &str| Err(Error::invalid(format!("dipole factors: {what}")));
        if (self.cxc - self.cx.conj()).norm() > tol || (self.sxc - self.sx.conj()).norm() > tol {
            return bad("cross elements are not conjugate pairs");
        }
        if [self.c0, self.c1, self.s0, self.s1].iter().any(|z| z.im.abs() > tol) {
            return bad("diagonal elements are not real");
        }
        if self.all().iter().any(|z| !z.re.is_finite() || !z.im.is_finite() || z.norm() > 1.0 + tol) {
            return bad("magnitude exceeds one");
        }
        Ok(())
    }

    pub fn all(&self) -> [C64; 8] {
        [self.c0, self.c1, self.cx, self.cxc, self.s0, self.s1, self.sx, self.sxc]
    }

    /// `(cos, sin)` element for rotor states `a, b ∈ {0, 1}`.
    pub fn element(&self, a: usize, b: usize) -> (C64, C64) {
        match (a, b) {
            (0, 0) => (self.c0, self.s0),
            (1, 1) => (self.c1, self.s1),
            (0, 1) => (self.cx, self.sx),
            (1, 0) => (self.cxc, self.sxc),
            _ => panic!("two-level index out of range: ({a}, {b})"),
        }
    }
}

/// Dipole factors after checking the truncation guard with the default tolerance.
pub fn dipole_factors(eig: &RotorEigensystem) -> Result<DipoleFactors> {
    dipole_factors_with_tolerance(eig, DEFAULT_GUARD_TOLERANCE)
}

pub fn dipole_factors_with_tolerance(eig: &RotorEigensystem, tolerance: f64) -> Result<DipoleFactors> {
    if eig.levels() < 2 {
        return Err(Error::invalid("need at least two rotor levels"));
    }
    two_level_guard(eig, tolerance).into_result()?;
    Ok(DipoleFactors {
        c0: eig.cos_element(0, 0),
        c1: eig.cos_element(1, 1),
        cx: eig.cos_element(0, 1),
        cxc: eig.cos_element(1, 0),
        s0: eig.sin_element(0, 0),
        s1: eig.sin_element(1, 1),
        sx: eig.sin_element(0, 1),
        sxc: eig.sin_element(1, 0),
    })
}

/// Residuals of the squared-factor relations `C₀² = S₀²`, `C₁² = S₁²`,
/// `C_X² = -S_X²`, evaluated both at one tilt angle and between 0° and 90°.
///
/// These are diagnostics only; which pairing is meant is not pinned down, and
/// the cross relation depends on the eigenvector phase convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareRelationDiagnostics {
    /// `[|C₀²-S₀²|, |C₁²-S₁²|, |C_X²+S_X²|]` with every factor at one angle.
    pub same_angle: [f64; 3],
    /// `[|C₀²(0°)-S₀²(90°)|, |C₁²(0°)-S₁²(90°)|, |C_X²(90°)+S_X²(0°)|]`.
    pub cross_angle: [f64; 3],
}

pub fn square_relation_diagnostics(
    omega_over_b: f64,
    theta_t: f64,
    m_max: usize,
) -> Result<SquareRelationDiagnostics> {
    let f = |theta| -> Result<DipoleFactors> {
        dipole_factors(&solve_rotor(&RotorParams::new(omega_over_b, theta, m_max)?)?)
    };
    let here = f(theta_t)?;
    let par = f(0.0)?;
    let perp = f(PI / 2.0)?;
    let sq = |z: C64| z * z;
    Ok(SquareRelationDiagnostics {
        same_angle: [
            (sq(here.c0) - sq(here.s0)).norm(),
            (sq(here.c1) - sq(here.s1)).norm(),
            (sq(here.cx) + sq(here.sx)).norm(),
        ],
        cross_angle: [
            (sq(par.c0) - sq(perp.s0)).norm(),
            (sq(par.c1) - sq(perp.s1)).norm(),
            (sq(perp.cx) + sq(par.sx)).norm(),
        ],
    })
}
