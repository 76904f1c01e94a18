//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero on any failure.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};

use nalgebra::Matrix4;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use planar_dipoles::analytic::{self, AngleCase};
use planar_dipoles::entanglement::{
    pure_concurrence, thermal_concurrence, wootters_concurrence, DensityMatrix4, Temperature,
};
use planar_dipoles::pair::{self, PairEigensystem, PairParams};
use planar_dipoles::rotor::{self, RotorEigensystem, RotorParams};
use planar_dipoles::sweep::{linspace, locate_feature, Axis, Feature, FixedParams, SweepSpec};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const COARSE: usize = 1000;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rotor_at(omega: f64, theta_deg: f64, m_max: usize) -> RotorEigensystem {
    rotor::solve_rotor(&RotorParams::from_degrees(omega, theta_deg, m_max).unwrap()).unwrap()
}

fn pair_at(omega: f64, theta_deg: f64, coupling: f64, m_max: usize) -> PairEigensystem {
    let r = RotorParams::from_degrees(omega, theta_deg, m_max).unwrap();
    pair::solve_pair(&PairParams::new(r, coupling).unwrap()).unwrap()
}

fn locate(feature: Feature, axis: Axis, start: f64, stop: f64, fixed: FixedParams) -> Result<f64, String> {
    let spec = SweepSpec::new(axis, start, stop, COARSE).with_fixed(fixed);
    locate_feature(feature, &spec)
        .map(|l| l.axis_value)
        .map_err(|e| e.to_string())
}

fn c1_single_rotor_anchors() -> Outcome {
    let r = rotor_at(2.0, 0.0, 30);
    let (e0, e1) = (r.energies[0], r.energies[1]);
    let gap = e1 - e0;
    check(
        (e0 + 1.07).abs() <= 0.01 && (e1 - 0.68).abs() <= 0.01 && (gap - 1.75).abs() <= 0.01,
        format!("eps0={e0:.5} eps1={e1:.5} gap={gap:.5}"),
    )
}

fn c2_field_free_spectrum() -> Outcome {
    let r = rotor_at(0.0, 0.0, 30);
    let expected: Vec<f64> = std::iter::once(0.0)
        .chain((1..=30).flat_map(|k| [(k * k) as f64; 2]))
        .collect();
    let err = r
        .energies
        .iter()
        .zip(&expected)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    check(
        r.energies.len() == expected.len() && err < 1e-10,
        format!("{} levels, max deviation {err:.2e}", r.energies.len()),
    )
}

fn c3_anticrossing() -> Outcome {
    let x = locate(
        Feature::Anticrossing(1, 2),
        Axis::OmegaOverB,
        0.01,
        1.0,
        FixedParams::default().theta_deg(90.0).coupling(0.8),
    )?;
    check((x - 0.299).abs() <= 0.005, format!("min(E2-E1) at omega/B={x:.5}"))
}

fn c4_crossing_in_coupling() -> Outcome {
    let x = locate(
        Feature::Crossing(1, 2),
        Axis::CouplingOverB,
        0.01,
        5.0,
        FixedParams::default().theta_deg(90.0).omega(2.0),
    )?;
    check((x - 2.9).abs() <= 0.05, format!("E1=E2 at Omega/B={x:.5}"))
}

fn c5_crossing_in_tilt() -> Outcome {
    let x = locate(
        Feature::Crossing(2, 3),
        Axis::ThetaTDeg,
        0.0,
        90.0,
        FixedParams::default().omega(2.0).coupling(0.8),
    )?;
    check((x - 43.5).abs() <= 0.3, format!("E2=E3 at theta_t={x:.4} deg"))
}

fn c6_concurrence_dips() -> Outcome {
    let fixed = || FixedParams::default().omega(2.0).coupling(0.8);
    let x1 = locate(Feature::ConcurrenceMinimum(1), Axis::ThetaTDeg, 0.0, 90.0, fixed())?;
    let x4 = locate(Feature::ConcurrenceMinimum(4), Axis::ThetaTDeg, 0.0, 90.0, fixed())?;
    check(
        (x1 - 47.9).abs() <= 0.5 && (x4 - 40.0).abs() <= 0.5,
        format!("C1 min at {x1:.4} deg, C4 min at {x4:.4} deg"),
    )
}

/// Concurrences of the sorted levels, with the two `{|00⟩,|11⟩}` states
/// first and the two `{|01⟩,|10⟩}` states last.
fn block_concurrences(p: &PairEigensystem) -> ([f64; 2], [f64; 2]) {
    let mut outer = Vec::new();
    let mut inner = Vec::new();
    for s in &p.states {
        let c = pure_concurrence(s).unwrap();
        if s[0].norm_sqr() + s[3].norm_sqr() > 0.5 {
            outer.push(c);
        } else {
            inner.push(c);
        }
    }
    assert_eq!((outer.len(), inner.len()), (2, 2), "states do not split into blocks");
    ([outer[0], outer[1]], [inner[0], inner[1]])
}

fn c7_overlapping_concurrences() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for theta in [0.0, 90.0] {
        for &omega in &linspace(0.01, 4.0, 40) {
            let r = rotor_at(omega, theta, 30);
            for &coupling in &linspace(0.0, 5.0, 41) {
                let p = pair::solve_pair_with_rotor(&r, coupling).map_err(|e| e.to_string())?;
                let (outer, inner) = block_concurrences(&p);
                worst = worst
                    .max((outer[0] - outer[1]).abs())
                    .max((inner[0] - 1.0).abs())
                    .max((inner[1] - 1.0).abs());
                points += 1;
            }
        }
    }
    check(worst < 1e-10, format!("{points} points, max deviation {worst:.2e}"))
}

fn c8_analytic_oracle() -> Outcome {
    let mut worst_e: f64 = 0.0;
    let mut worst_c: f64 = 0.0;
    for case in [AngleCase::Parallel, AngleCase::Perpendicular] {
        let theta = case.theta_t().to_degrees();
        for &omega in &linspace(0.01, 4.0, 50) {
            let r = rotor_at(omega, theta, 30);
            let f = rotor::dipole_factors(&r).map_err(|e| e.to_string())?;
            for &coupling in &linspace(0.0, 5.0, 50) {
                let reduced = analytic::reduce(&f, r.energies[0], r.energies[1], coupling, case)
                    .map_err(|e| e.to_string())?;
                let sol = analytic::bell_solution(&reduced);
                let c14 = analytic::analytic_concurrence_14(&reduced).value;
                let num = pair::solve_pair_with_rotor(&r, coupling).map_err(|e| e.to_string())?;

                for (a, b) in sol.sorted_energies().iter().zip(&num.energies) {
                    worst_e = worst_e.max((a - b).abs());
                }
                // match each numeric level to the analytic state it coincides with
                for state in &num.states {
                    let label = (0..4)
                        .max_by(|&x, &y| {
                            let ox = overlap(&sol.states[x], state);
                            let oy = overlap(&sol.states[y], state);
                            ox.total_cmp(&oy)
                        })
                        .unwrap();
                    let expected = if label == 0 || label == 3 { c14 } else { 1.0 };
                    worst_c = worst_c.max((pure_concurrence(state).unwrap() - expected).abs());
                }
            }
        }
    }
    check(
        worst_e < 1e-10 && worst_c < 1e-10,
        format!("2x50x50 grid, max |dE|={worst_e:.2e}, max |dC|={worst_c:.2e}"),
    )
}

fn overlap(a: &[C64; 4], b: &[C64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C64>().norm()
}

/// `⟨ab|H|cd⟩` with the interaction `Ω(sin θ₁ sin θ₂ - 2 cos θ₁ cos θ₂)`
/// integrated on a periodic 2D grid.
fn quadrature_pair_matrix(r: &RotorEigensystem, coupling: f64) -> Matrix4<C64> {
    let n = 128;
    let h = 2.0 * PI / n as f64;
    let grid: Vec<f64> = (0..n).map(|k| k as f64 * h).collect();
    let psi: Vec<Vec<C64>> = (0..2)
        .map(|l| grid.iter().map(|&t| r.wavefunction(l, t)).collect())
        .collect();
    let mut m = Matrix4::<C64>::zeros();
    for row in 0..4 {
        let (a, b) = (row >> 1, row & 1);
        for col in 0..4 {
            let (c, d) = (col >> 1, col & 1);
            let mut acc = C64::default();
            for (i, t1) in grid.iter().enumerate() {
                let left = psi[a][i].conj() * psi[c][i];
                let (s1, c1) = t1.sin_cos();
                let mut inner = C64::default();
                for (j, t2) in grid.iter().enumerate() {
                    let (s2, c2) = t2.sin_cos();
                    inner += psi[b][j].conj() * psi[d][j] * (s1 * s2 - 2.0 * c1 * c2);
                }
                acc += left * inner;
            }
            m[(row, col)] = acc * h * h * coupling;
        }
        let (a, b) = (row >> 1, row & 1);
        m[(row, row)] += C64::from(r.energies[a] + r.energies[b]);
    }
    m
}

fn c9_quadrature_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let omega = rng.gen_range(0.05..6.0);
        let theta = rng.gen_range(0.0..360.0);
        let coupling = rng.gen_range(0.0..5.0);
        let r = rotor_at(omega, theta, 30);
        let f = rotor::dipole_factors(&r).map_err(|e| e.to_string())?;
        let h = pair::build_pair_hamiltonian(&f, r.energies[0], r.energies[1], coupling).map_err(|e| e.to_string())?;
        let q = quadrature_pair_matrix(&r, coupling);
        worst = worst.max((h - q).iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    check(worst < 1e-8, format!("20 random points, max element error {worst:.2e}"))
}

fn c10_wootters_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let mut d: [C64; 4] = std::array::from_fn(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let norm = d.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        d.iter_mut().for_each(|z| *z /= norm);
        let direct = 2.0 * (d[1] * d[2] - d[0] * d[3]).norm();
        let w = wootters_concurrence(&DensityMatrix4::from_pure(&d).unwrap()).unwrap();
        worst = worst.max((w - direct).abs());
    }
    let mixed = wootters_concurrence(&DensityMatrix4::new(Matrix4::identity() * C64::from(0.25)).unwrap()).unwrap();
    let s = FRAC_1_SQRT_2;
    let bell = [C64::from(s), C64::default(), C64::default(), C64::from(s)];
    let bell_c = wootters_concurrence(&DensityMatrix4::from_pure(&bell).unwrap()).unwrap();
    check(
        worst < 1e-10 && mixed.abs() < 1e-10 && (bell_c - 1.0).abs() < 1e-10,
        format!("max pure-state error {worst:.2e}, C(I/4)={mixed:.2e}, C(Bell)={bell_c:.12}"),
    )
}

fn c11_thermal_behaviour() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    let temps = [0.0, 0.1, 0.2, 0.5, 1.0];
    for theta in [0.0, 90.0] {
        let p = pair_at(2.0, theta, 0.8, 30);
        let ground = pure_concurrence(&p.states[0]).unwrap();
        let cs: Vec<f64> = temps
            .iter()
            .map(|&t| thermal_concurrence(&p, Temperature::new(t).unwrap()).unwrap())
            .collect();
        let zero_ok = (cs[0] - ground).abs() < 1e-10;
        let monotone = cs.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        let hot = thermal_concurrence(&p, Temperature::new(100.0).unwrap()).unwrap();
        ok &= zero_ok && monotone && hot < 1e-3;
        notes.push(format!(
            "theta={theta}: C(kT)={:?} C(100)={hot:.1e}",
            cs.iter().map(|c| format!("{c:.4}")).collect::<Vec<_>>()
        ));
    }

    let grid = linspace(2.0, 4.0, 81);
    let r = rotor_at(2.0, 90.0, 30);
    let cs: Vec<f64> = grid
        .iter()
        .map(|&w| {
            let p = pair::solve_pair_with_rotor(&r, w).unwrap();
            thermal_concurrence(&p, Temperature::new(0.1).unwrap()).unwrap()
        })
        .collect();
    let (k, cmin) = cs
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    let edges = cs[0].min(cs[cs.len() - 1]);
    let suppressed = k > 0 && k < cs.len() - 1 && (2.5..=3.3).contains(&grid[k]) && cmin < 0.5 * edges;
    ok &= suppressed;
    notes.push(format!(
        "kT=0.1 theta=90: min C={cmin:.4} at Omega/B={:.3}, edges min {edges:.4}",
        grid[k]
    ));
    check(ok, notes.join("; "))
}

fn c12_invariances() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;

    let base = rotor_at(2.0, 0.0, 30);
    let mut tilt_err: f64 = 0.0;
    for theta in [13.0, 45.0, 90.0, 137.5, 270.0] {
        let r = rotor_at(2.0, theta, 30);
        for (a, b) in r.energies.iter().zip(&base.energies) {
            tilt_err = tilt_err.max((a - b).abs());
        }
    }
    ok &= tilt_err < 1e-12;
    notes.push(format!("tilt {tilt_err:.1e}"));

    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut phase_err: f64 = 0.0;
    for _ in 0..20 {
        let (omega, theta, coupling) = (rng.gen_range(0.1..4.0), rng.gen_range(0.0..180.0), rng.gen_range(0.1..5.0));
        let r = rotor_at(omega, theta, 30);
        let phases: Vec<f64> = (0..r.levels()).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
        let shifted = r.with_level_phases(&phases);
        let p = pair::solve_pair_with_rotor(&r, coupling).unwrap();
        let q = pair::solve_pair_with_rotor(&shifted, coupling).unwrap();
        for k in 0..4 {
            phase_err = phase_err.max((pure_concurrence(&p.states[k]).unwrap() - pure_concurrence(&q.states[k]).unwrap()).abs());
        }
        for t in [0.1, 1.0] {
            let t = Temperature::new(t).unwrap();
            phase_err = phase_err.max((thermal_concurrence(&p, t).unwrap() - thermal_concurrence(&q, t).unwrap()).abs());
        }
    }
    ok &= phase_err < 1e-10;
    notes.push(format!("phase {phase_err:.1e}"));

    let mut trunc_err: f64 = 0.0;
    for (omega, theta, coupling) in [(0.01, 0.0, 0.8), (2.0, 37.0, 0.8), (4.0, 90.0, 5.0), (10.0, 120.0, 2.0)] {
        let (r30, r60) = (rotor_at(omega, theta, 30), rotor_at(omega, theta, 60));
        trunc_err = trunc_err.max((r30.energies[0] - r60.energies[0]).abs());
        trunc_err = trunc_err.max((r30.energies[1] - r60.energies[1]).abs());
        let (f30, f60) = (rotor::dipole_factors(&r30).unwrap(), rotor::dipole_factors(&r60).unwrap());
        for (a, b) in f30.all().iter().zip(f60.all()) {
            trunc_err = trunc_err.max((a - b).norm());
        }
        let (p30, p60) = (
            pair::solve_pair_with_rotor(&r30, coupling).unwrap(),
            pair::solve_pair_with_rotor(&r60, coupling).unwrap(),
        );
        for k in 0..4 {
            trunc_err = trunc_err.max((p30.energies[k] - p60.energies[k]).abs());
            trunc_err = trunc_err
                .max((pure_concurrence(&p30.states[k]).unwrap() - pure_concurrence(&p60.states[k]).unwrap()).abs());
        }
    }
    ok &= trunc_err < 1e-10;
    notes.push(format!("m_max 30->60 {trunc_err:.1e}"));

    let runs: Vec<Vec<String>> = vec![
        vec![
            "pair", "--omega", "2", "--coupling", "0.8", "--sweep", "theta_t_deg:0:90:60", "--quantities",
            "pair_energies,pure_concurrences,thermal_concurrence",
        ],
        vec!["factors", "--theta-t", "30", "--format", "json"],
        vec!["locate", "crossing", "--labels", "2,3", "--omega", "2", "--coupling", "0.8", "--sweep", "theta_t_deg:0:90:200"],
    ]
    .into_iter()
    .map(|v| v.into_iter().map(String::from).collect())
    .collect();
    let mut identical = true;
    for args in &runs {
        let a = run_cli(args)?;
        let b = run_cli(args)?;
        identical &= a == b && !a.is_empty();
    }
    ok &= identical;
    notes.push(format!("CLI byte-identical: {identical}"));
    check(ok, notes.join(", "))
}

fn run_cli(args: &[String]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_planar-dipoles"))
        .args(args)
        .env_remove("PLANAR_DIPOLES_OUTPUT_DIR")
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("single-rotor anchors", c1_single_rotor_anchors),
        ("field-free spectrum", c2_field_free_spectrum),
        ("anticrossing in omega", c3_anticrossing),
        ("E1/E2 crossing in coupling", c4_crossing_in_coupling),
        ("E2/E3 crossing in tilt", c5_crossing_in_tilt),
        ("concurrence dips in tilt", c6_concurrence_dips),
        ("overlapping concurrences", c7_overlapping_concurrences),
        ("analytic-numeric oracle", c8_analytic_oracle),
        ("quadrature oracle", c9_quadrature_oracle),
        ("Wootters consistency", c10_wootters_consistency),
        ("thermal behaviour", c11_thermal_behaviour),
        ("invariance suite", c12_invariances),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag} {name}: {detail}", k + 1);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
