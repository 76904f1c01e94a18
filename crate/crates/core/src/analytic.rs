//! Closed-form eigensystem for fields parallel (θ_t = 0) or perpendicular
//! (θ_t = 90°) to the intermolecular axis.
//!
//! At these two angles half of the dipole factors vanish and the 4×4 matrix
//! splits into a `{|00⟩, |11⟩}` block and a `{|01⟩, |10⟩}` block:
//!
//! ```text
//! | 2ε₀+a    0        0       d    |
//! |   0    ε₀+ε₁+b    f       0    |
//! |   0      f      ε₀+ε₁+b   0    |
//! |   d      0        0     2ε₁+c  |
//! ```

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::Matrix4;

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::rotor::DipoleFactors;

/// Factors that must vanish for the declared angle case may not exceed this.
pub const VANISHING_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AngleCase {
    /// θ_t = 0°
    Parallel,
    /// θ_t = 90°
    Perpendicular,
}

impl AngleCase {
    pub fn theta_t(self) -> f64 {
        match self {
            AngleCase::Parallel => 0.0,
            AngleCase::Perpendicular => PI / 2.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AngleCase::Parallel => "parallel",
            AngleCase::Perpendicular => "perpendicular",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub f: f64,
    pub eps0: f64,
    pub eps1: f64,
    pub coupling_over_b: f64,
    pub angle_case: AngleCase,
    /// `C₀` (parallel) or `S₀` (perpendicular).
    pub diag0: f64,
    /// `C₁` (parallel) or `S₁` (perpendicular).
    pub diag1: f64,
    /// `S_X²` (parallel) or `C_X²` (perpendicular). Real for the canonical
    /// gauge, where the cross factor is purely imaginary.
    pub cross_sq: f64,
}

impl ReducedParams {
    pub fn matrix(&self) -> Matrix4<C64> {
        let mid = self.eps0 + self.eps1 + self.b;
        let z = 0.0;
        Matrix4::new(
            2.0 * self.eps0 + self.a, z, z, self.d, //
            z, mid, self.f, z, //
            z, self.f, mid, z, //
            self.d, z, z, 2.0 * self.eps1 + self.c,
        )
        .map(C64::from)
    }

    /// `Δ = ε₁ - ε₀ + (c - a)/2`.
    pub fn delta(&self) -> f64 {
        self.eps1 - self.eps0 + 0.5 * (self.c - self.a)
    }
}

pub fn reduce(
    factors: &DipoleFactors,
    eps0: f64,
    eps1: f64,
    coupling_over_b: f64,
    angle_case: AngleCase,
) -> Result<ReducedParams> {
    let omega = coupling_over_b;
    let mismatch = |detail: String| Error::AngleCaseMismatch {
        case: angle_case.name(),
        detail,
    };
    let (vanishing, diag0, diag1, cross): ([(&str, C64); 4], C64, C64, C64) = match angle_case {
        AngleCase::Parallel => (
            [("S0", factors.s0), ("S1", factors.s1), ("CX", factors.cx), ("CXC", factors.cxc)],
            factors.c0,
            factors.c1,
            factors.sx,
        ),
        AngleCase::Perpendicular => (
            [("C0", factors.c0), ("C1", factors.c1), ("SX", factors.sx), ("SXC", factors.sxc)],
            factors.s0,
            factors.s1,
            factors.cx,
        ),
    };
    for (name, z) in vanishing {
        if z.norm() > VANISHING_TOL {
            return Err(mismatch(format!("|{name}| = {:.3e} should vanish", z.norm())));
        }
    }
    let cross_sq = cross * cross;
    if cross_sq.im.abs() > VANISHING_TOL {
        return Err(mismatch(format!(
            "cross factor squared {cross_sq} is not real (non-canonical eigenvector phase)"
        )));
    }
    let (diag0, diag1, cross_sq, cross_abs_sq) = (diag0.re, diag1.re, cross_sq.re, cross.norm_sqr());

    let (a, b, c, d, f) = match angle_case {
        AngleCase::Parallel => (
            -2.0 * omega * diag0 * diag0,
            -2.0 * omega * diag0 * diag1,
            -2.0 * omega * diag1 * diag1,
            omega * cross_sq,
            omega * cross_abs_sq,
        ),
        AngleCase::Perpendicular => (
            omega * diag0 * diag0,
            omega * diag0 * diag1,
            omega * diag1 * diag1,
            -2.0 * omega * cross_sq,
            -2.0 * omega * cross_abs_sq,
        ),
    };
    Ok(ReducedParams {
        a,
        b,
        c,
        d,
        f,
        eps0,
        eps1,
        coupling_over_b,
        angle_case,
        diag0,
        diag1,
        cross_sq,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BellLikeSolution {
    /// `E₁..E₄` indexed by label (not necessarily ascending).
    pub energies: [f64; 4],
    /// `Ψ₁..Ψ₄` indexed by label, real coefficients over `|00⟩..|11⟩`.
    pub states: [[C64; 4]; 4],
    pub delta: f64,
    pub n_plus: f64,
    pub n_minus: f64,
    /// Shared concurrence of `Ψ₁` and `Ψ₄`, `|d| / √(d² + Δ²)`.
    pub concurrence_14: f64,
    /// `d = 0` and `Δ = 0`: the `{|00⟩, |11⟩}` block is a multiple of the identity.
    pub degenerate: bool,
}

impl BellLikeSolution {
    pub fn sorted_energies(&self) -> [f64; 4] {
        let mut e = self.energies;
        e.sort_by(f64::total_cmp);
        e
    }
}

pub fn bell_solution(p: &ReducedParams) -> BellLikeSolution {
    let delta = p.delta();
    let d = p.d;
    let root = d.hypot(delta);
    let n_plus = root * root + delta * root;
    let n_minus = root * root - delta * root;
    let centre = p.eps0 + p.eps1 + 0.5 * (p.a + p.c);
    let mid = p.eps0 + p.eps1 + p.b;

    // Ψ₁ = ((Δ+R)|00⟩ - d|11⟩)/√(2N₊), Ψ₄ = ((Δ-R)|00⟩ - d|11⟩)/√(2N₋).
    // One of Δ±R cancels; it is rewritten as -d²/(R∓Δ) so that small d does
    // not lose the coefficient.
    let degenerate = d == 0.0 && delta == 0.0;
    let (psi1, psi4) = if degenerate {
        ([1.0, 0.0], [0.0, -1.0])
    } else if delta >= 0.0 {
        let big = ((root + delta) / (2.0 * root)).sqrt();
        let small = d / (2.0 * root * (root + delta)).sqrt();
        let sign = if d < 0.0 { -1.0 } else { 1.0 };
        ([big, -small], [-small.abs(), -sign * big])
    } else {
        let big = ((root - delta) / (2.0 * root)).sqrt();
        let small = d / (2.0 * root * (root - delta)).sqrt();
        let sign = if d < 0.0 { -1.0 } else { 1.0 };
        ([small.abs(), -sign * big], [-big, -small])
    };

    let s = FRAC_1_SQRT_2;
    let singlet = [0.0, s, -s, 0.0];
    let triplet = [0.0, s, s, 0.0];
    let (psi2, psi3, e2, e3) = match p.angle_case {
        AngleCase::Parallel => (singlet, triplet, mid - p.f, mid + p.f),
        AngleCase::Perpendicular => (triplet, singlet, mid + p.f, mid - p.f),
    };
    let to_c = |v: [f64; 4]| v.map(C64::from);
    BellLikeSolution {
        energies: [centre - root, e2, e3, centre + root],
        states: [
            to_c([psi1[0], 0.0, 0.0, psi1[1]]),
            to_c(psi2),
            to_c(psi3),
            to_c([psi4[0], 0.0, 0.0, psi4[1]]),
        ],
        delta,
        n_plus,
        n_minus,
        concurrence_14: if root == 0.0 { 0.0 } else { d.abs() / root },
        degenerate,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticConcurrence {
    pub value: f64,
    /// `d = 0`: product-state limit, value defined as 0.
    pub product_limit: bool,
}

/// `1/√(1 + Δ²/d²)` with the ratio written in terms of the dipole factors:
///
/// parallel: `Δ/d = (ε₁ - ε₀ - Ω(C₁² - C₀²)) / (Ω S_X²)`,
/// perpendicular: `Δ/d = (ε₁ - ε₀ + Ω(S₁² - S₀²)/2) / (2Ω C_X²)`.
///
/// `S_X²`, `C_X²` are the real squares of the purely imaginary cross factors;
/// the ratio enters squared, so only their magnitude matters.
pub fn analytic_concurrence_14(p: &ReducedParams) -> AnalyticConcurrence {
    let omega = p.coupling_over_b;
    let gap = p.eps1 - p.eps0;
    let (numerator, denominator) = match p.angle_case {
        AngleCase::Parallel => (
            gap - omega * (p.diag1 * p.diag1 - p.diag0 * p.diag0),
            omega * p.cross_sq,
        ),
        AngleCase::Perpendicular => (
            gap + omega * (p.diag1 * p.diag1 - p.diag0 * p.diag0) / 2.0,
            2.0 * omega * p.cross_sq,
        ),
    };
    if denominator == 0.0 {
        return AnalyticConcurrence {
            value: 0.0,
            product_limit: true,
        };
    }
    let ratio = numerator / denominator;
    AnalyticConcurrence {
        value: 1.0 / (1.0 + ratio * ratio).sqrt(),
        product_limit: false,
    }
}
