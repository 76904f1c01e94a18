//! Two identical planar rotors, each truncated to its lowest two field-dressed
//! states, coupled by the in-plane dipole-dipole interaction.
//!
//! Basis order is `|00⟩, |01⟩, |10⟩, |11⟩` with the first digit for the left
//! molecule.

use nalgebra::{DMatrix, Matrix4};

use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::rotor::{self, DipoleFactors, RotorEigensystem, RotorParams};

/// Adjacent energies closer than this (relative to `max(1, |E|)`) are flagged
/// as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Best and second-best overlaps closer than this make a label match ambiguous.
pub const AMBIGUITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairParams {
    pub rotor: RotorParams,
    coupling_over_b: f64,
}

impl PairParams {
    pub fn new(rotor: RotorParams, coupling_over_b: f64) -> Result<Self> {
        if !coupling_over_b.is_finite() || coupling_over_b < 0.0 {
            return Err(Error::invalid(format!(
                "Omega/B must be finite and >= 0, got {coupling_over_b}"
            )));
        }
        Ok(Self { rotor, coupling_over_b })
    }

    pub fn coupling_over_b(&self) -> f64 {
        self.coupling_over_b
    }
}

#[derive(Debug, Clone, Copy)]
enum Factor {
    Zero,
    One,
    Cross,
    CrossConj,
}

fn gamma(f: &DipoleFactors, coupling: f64, a: Factor, b: Factor) -> C64 {
    let pick = |x: Factor| match x {
        Factor::Zero => (f.c0, f.s0),
        Factor::One => (f.c1, f.s1),
        Factor::Cross => (f.cx, f.sx),
        Factor::CrossConj => (f.cxc, f.sxc),
    };
    let (ca, sa) = pick(a);
    let (cb, sb) = pick(b);
    (sa * sb - ca * cb * 2.0) * coupling
}

/// The 4×4 matrix `δ_{α,β} + Γ_{α,β}` with `Γ_{α,β} = (Ω/B)(S_α S_β - 2 C_α C_β)`.
pub fn build_pair_hamiltonian(
    factors: &DipoleFactors,
    eps0: f64,
    eps1: f64,
    coupling_over_b: f64,
) -> Result<Matrix4<C64>> {
    if !eps0.is_finite() || !eps1.is_finite() || !coupling_over_b.is_finite() {
        return Err(Error::invalid("pair Hamiltonian inputs must be finite"));
    }
    factors.check(1e-8)?;
    use Factor::*;
    let g = |a, b| gamma(factors, coupling_over_b, a, b);
    let d00 = C64::from(2.0 * eps0) + g(Zero, Zero);
    let d01 = C64::from(eps0 + eps1) + g(Zero, One);
    let d11 = C64::from(2.0 * eps1) + g(One, One);
    let g0x = g(Zero, Cross);
    let gxx = g(Cross, Cross);
    let gxxc = g(Cross, CrossConj);
    let g1x = g(One, Cross);

    // upper triangle as assembled from the factors, lower by conjugation
    let mut h = Matrix4::new(
        d00, g0x, g0x, gxx, //
        C64::default(), d01, gxxc, g1x, //
        C64::default(), C64::default(), d01, g1x, //
        C64::default(), C64::default(), C64::default(), d11,
    );
    for i in 0..4 {
        h[(i, i)].im = 0.0;
        for j in 0..i {
            h[(i, j)] = h[(j, i)].conj();
        }
    }
    debug_assert!(linalg::is_hermitian(&h, 0.0));
    Ok(h)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairEigensystem {
    pub params: PairParams,
    /// `E_n/B`, ascending.
    pub energies: [f64; 4],
    /// `states[k]` is `(d₁, d₂, d₃, d₄)` for the k-th lowest level.
    pub states: [[C64; 4]; 4],
    /// `labels[k]` is the tracked label (0-based) of the k-th lowest level.
    pub labels: [usize; 4],
    /// Some adjacent energies coincide. Eigenvectors inside such a subspace
    /// are chosen to be symmetric or antisymmetric under exchange.
    pub degenerate: bool,
}

pub fn solve_pair(params: &PairParams) -> Result<PairEigensystem> {
    let rotor = rotor::solve_rotor(&params.rotor)?;
    solve_pair_with_rotor(&rotor, params.coupling_over_b)
}

/// Like [`solve_pair`] but reuses an existing rotor solve.
pub fn solve_pair_with_rotor(rotor: &RotorEigensystem, coupling_over_b: f64) -> Result<PairEigensystem> {
    let params = PairParams::new(rotor.params, coupling_over_b)?;
    let factors = rotor::dipole_factors(rotor)?;
    let h = build_pair_hamiltonian(&factors, rotor.energies[0], rotor.energies[1], coupling_over_b)?;
    solve_pair_matrix(params, h)
}

pub(crate) fn solve_pair_matrix(params: PairParams, h: Matrix4<C64>) -> Result<PairEigensystem> {
    let (values, vectors) = linalg::hermitian_eigen(DMatrix::from_iterator(4, 4, h.iter().copied()))?;
    let mut energies = [0.0; 4];
    let mut states = [[C64::default(); 4]; 4];
    for k in 0..4 {
        energies[k] = values[k];
        states[k].copy_from_slice(&vectors[k]);
    }
    let close = |a: f64, b: f64| (b - a).abs() < DEGENERACY_TOL * a.abs().max(1.0);
    let degenerate = energies.windows(2).any(|w| close(w[0], w[1]));
    let mut start = 0;
    while start < 4 {
        let mut end = start + 1;
        while end < 4 && close(energies[end - 1], energies[end]) {
            end += 1;
        }
        if end - start > 1 {
            resolve_by_exchange(&mut states[start..end])?;
        }
        start = end;
    }
    Ok(PairEigensystem {
        params,
        energies,
        states,
        labels: [0, 1, 2, 3],
        degenerate,
    })
}

/// Inside a degenerate cluster, pick the basis that also diagonalizes the
/// molecule exchange `|ab⟩ → |ba⟩`, which commutes with the pair Hamiltonian.
/// Antisymmetric states come first.
fn resolve_by_exchange(cluster: &mut [[C64; 4]]) -> Result<()> {
    let swap = |v: &[C64; 4]| [v[0], v[2], v[1], v[3]];
    let n = cluster.len();
    let s = DMatrix::from_fn(n, n, |a, b| linalg::inner(&cluster[a], &swap(&cluster[b])));
    let (_, mixing) = linalg::hermitian_eigen(s)?;
    let old = cluster.to_vec();
    for (target, u) in cluster.iter_mut().zip(&mixing) {
        *target = std::array::from_fn(|k| (0..n).map(|a| u[a] * old[a][k]).sum());
        linalg::fix_gauge(target);
    }
    Ok(())
}

impl PairEigensystem {
    /// Sorted position of the level carrying `label`.
    pub fn index_of_label(&self, label: usize) -> usize {
        self.labels
            .iter()
            .position(|&l| l == label)
            .unwrap_or_else(|| panic!("no level carries label {label}"))
    }

    pub fn energy(&self, label: usize) -> f64 {
        self.energies[self.index_of_label(label)]
    }

    pub fn state(&self, label: usize) -> &[C64; 4] {
        &self.states[self.index_of_label(label)]
    }

    /// Energies ordered by label rather than by value.
    pub fn energies_by_label(&self) -> [f64; 4] {
        std::array::from_fn(|l| self.energy(l))
    }

    pub fn with_labels(mut self, labels: [usize; 4]) -> Self {
        self.labels = labels;
        self
    }

    /// Number of levels (1..=4) sharing the lowest energy.
    pub fn ground_degeneracy(&self) -> usize {
        let e0 = self.energies[0];
        self.energies
            .iter()
            .filter(|&&e| (e - e0).abs() < DEGENERACY_TOL * e0.abs().max(1.0))
            .count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabelTracking {
    pub labels: [usize; 4],
    /// Some state's best and second-best overlaps differ by less than
    /// [`AMBIGUITY_TOL`]; the assignment is then arbitrary within the tie.
    pub ambiguous: bool,
}

/// Carry labels from `previous` to `current` by maximal overlap.
///
/// Greedy perfect matching on descending `|⟨prev|cur⟩|`, ties broken by
/// previous index and then current index.
pub fn track_labels(previous: &PairEigensystem, current: &PairEigensystem) -> LabelTracking {
    let mut overlaps = [[0.0; 4]; 4];
    for (p, prev) in previous.states.iter().enumerate() {
        for (c, cur) in current.states.iter().enumerate() {
            overlaps[p][c] = linalg::inner(prev, cur).norm();
        }
    }

    let mut pairs: Vec<(usize, usize)> = (0..4).flat_map(|p| (0..4).map(move |c| (p, c))).collect();
    pairs.sort_by(|a, b| {
        overlaps[b.0][b.1]
            .total_cmp(&overlaps[a.0][a.1])
            .then(a.0.cmp(&b.0))
            .then(a.1.cmp(&b.1))
    });

    let mut labels = [usize::MAX; 4];
    let mut prev_used = [false; 4];
    for (p, c) in pairs {
        if !prev_used[p] && labels[c] == usize::MAX {
            labels[c] = previous.labels[p];
            prev_used[p] = true;
        }
    }

    let ambiguous = (0..4).any(|c| {
        let mut col: Vec<f64> = (0..4).map(|p| overlaps[p][c]).collect();
        col.sort_by(|a, b| b.total_cmp(a));
        col[0] - col[1] < AMBIGUITY_TOL
    });
    LabelTracking { labels, ambiguous }
}
