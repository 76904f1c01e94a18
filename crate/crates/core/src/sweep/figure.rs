//! Data behind the numbered figures, one dataset per panel.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::rotor::{self, RotorParams};

use super::{run_sweep, Axis, Dataset, FixedParams, Quantity, SweepSpec, DEFAULT_OMEGA_FLOOR};

pub const FIGURES: std::ops::RangeInclusive<u32> = 2..=7;
pub const DEFAULT_FIGURE_POINTS: usize = 500;
pub const DENSITY_GRID_POINTS: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub struct FigureOptions {
    pub points: usize,
    pub m_max: usize,
    /// Empty means the default temperature list.
    pub temperatures: Vec<f64>,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self {
            points: DEFAULT_FIGURE_POINTS,
            m_max: rotor::DEFAULT_M_MAX,
            temperatures: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    /// e.g. `fig4b`
    pub name: String,
    pub dataset: Dataset,
}

const OMEGA_MAX_ROTOR: f64 = 10.0;
const OMEGA_MAX_PAIR: f64 = 4.0;
const COUPLING_MAX: f64 = 5.0;
/// Coupling sweeps start just above zero, where the pair levels are degenerate.
const COUPLING_MIN: f64 = 0.01;

pub fn figure(n: u32, opts: &FigureOptions) -> Result<Vec<Panel>> {
    if opts.points < 2 {
        return Err(Error::invalid("figure grids need at least two points"));
    }
    let panels = match n {
        2 => figure2(opts)?,
        3 => figure3(opts)?,
        4 => pair_panels(4, Axis::OmegaOverB, DEFAULT_OMEGA_FLOOR, OMEGA_MAX_PAIR, |f| f.coupling(0.8), opts)?,
        5 => pair_panels(5, Axis::CouplingOverB, COUPLING_MIN, COUPLING_MAX, |f| f.omega(2.0), opts)?,
        6 => {
            let fixed = base(opts).omega(2.0).coupling(0.8);
            vec![
                panel(6, 'a', sweep(Axis::ThetaTDeg, 0.0, 90.0, &fixed, &[Quantity::PairEnergies], opts)?),
                panel(6, 'b', sweep(Axis::ThetaTDeg, 0.0, 90.0, &fixed, &[Quantity::PureConcurrences], opts)?),
            ]
        }
        7 => figure7(opts)?,
        _ => return Err(Error::invalid(format!("figure {n} is not in 2..=7"))),
    };
    Ok(panels
        .into_iter()
        .map(|mut p| {
            p.dataset.metadata.insert("panel".into(), p.name.clone());
            p
        })
        .collect())
}

fn base(opts: &FigureOptions) -> FixedParams {
    FixedParams {
        m_max: opts.m_max,
        ..FixedParams::default()
    }
}

fn panel(n: u32, letter: char, dataset: Dataset) -> Panel {
    Panel {
        name: format!("fig{n}{letter}"),
        dataset,
    }
}

fn sweep(axis: Axis, start: f64, stop: f64, fixed: &FixedParams, q: &[Quantity], opts: &FigureOptions) -> Result<Dataset> {
    run_sweep(
        &SweepSpec::new(axis, start, stop, opts.points)
            .with_fixed(fixed.clone())
            .with_quantities(q),
    )
}

fn figure2(opts: &FigureOptions) -> Result<Vec<Panel>> {
    let fixed = base(opts).theta_deg(0.0);
    let a = sweep(Axis::OmegaOverB, DEFAULT_OMEGA_FLOOR, OMEGA_MAX_ROTOR, &fixed, &[Quantity::RotorEnergies], opts)?;
    let b = sweep(Axis::OmegaOverB, DEFAULT_OMEGA_FLOOR, OMEGA_MAX_ROTOR, &fixed, &[Quantity::RotorGap], opts)?;

    let eig = rotor::solve_rotor(&RotorParams::from_degrees(2.0, 0.0, opts.m_max)?)?;
    let step = 2.0 * PI / DENSITY_GRID_POINTS as f64;
    let mut c = Dataset::new(vec!["theta_rad".into(), "density_0".into(), "density_1".into()])
        .with_meta("version", super::VERSION)
        .with_meta("m_max", opts.m_max)
        .with_meta(Axis::OmegaOverB.name(), 2)
        .with_meta(Axis::ThetaTDeg.name(), 0);
    for k in 0..DENSITY_GRID_POINTS {
        let t = k as f64 * step;
        c.rows.push(vec![t, eig.probability_density(0, t), eig.probability_density(1, t)]);
    }
    Ok(vec![panel(2, 'a', a), panel(2, 'b', b), panel(2, 'c', c)])
}

fn figure3(opts: &FigureOptions) -> Result<Vec<Panel>> {
    let tilt = sweep(Axis::ThetaTDeg, 0.0, 180.0, &base(opts).omega(2.0), &[Quantity::Factors], opts)?;
    let a = tilt.select(&["theta_t_deg", "abs_C0", "abs_C1", "abs_CX"])?;
    let b = tilt.select(&["theta_t_deg", "abs_S0", "abs_S1", "abs_SX"])?;

    let by_field = |theta: f64| {
        sweep(
            Axis::OmegaOverB,
            DEFAULT_OMEGA_FLOOR,
            OMEGA_MAX_ROTOR,
            &base(opts).theta_deg(theta),
            &[Quantity::Factors],
            opts,
        )
    };
    let par = by_field(0.0)?;
    let perp = by_field(90.0)?;
    // squares of the factors that survive at each special angle
    let mut c = par.select(&["omega_over_B", "C0_sq_re", "C1_sq_re"])?;
    c.columns = vec!["omega_over_B".into(), "C0_sq_tilt0".into(), "C1_sq_tilt0".into()];
    c.push_column("CX_sq_tilt90", perp.column("CX_sq_re").expect("factor column"))?;
    let mut d = perp.select(&["omega_over_B", "S0_sq_re", "S1_sq_re"])?;
    d.columns = vec!["omega_over_B".into(), "S0_sq_tilt90".into(), "S1_sq_tilt90".into()];
    d.push_column("SX_sq_tilt0", par.column("SX_sq_re").expect("factor column"))?;
    for ds in [&mut c, &mut d] {
        ds.metadata.insert(Axis::ThetaTDeg.name().into(), "0,90".into());
    }
    Ok(vec![panel(3, 'a', a), panel(3, 'b', b), panel(3, 'c', c), panel(3, 'd', d)])
}

fn pair_panels(
    n: u32,
    axis: Axis,
    start: f64,
    stop: f64,
    fix: impl Fn(FixedParams) -> FixedParams,
    opts: &FigureOptions,
) -> Result<Vec<Panel>> {
    let mut out = Vec::new();
    for (theta, letters) in [(0.0, ['a', 'b']), (90.0, ['c', 'd'])] {
        let fixed = fix(base(opts).theta_deg(theta));
        let ds = sweep(axis, start, stop, &fixed, &[Quantity::PairEnergies, Quantity::PureConcurrences], opts)?;
        let mut energies = ds.select(&[axis.name(), "E_1", "E_2", "E_3", "E_4"])?;
        let gap: Vec<f64> = ds.rows.iter().map(|r| r[2] - r[1]).collect();
        energies.push_column("E_2_minus_E_1", gap)?;
        let concurrences = ds.select(&[axis.name(), "C_1", "C_2", "C_3", "C_4"])?;
        out.push(panel(n, letters[0], energies));
        out.push(panel(n, letters[1], concurrences));
    }
    Ok(out)
}

fn figure7(opts: &FigureOptions) -> Result<Vec<Panel>> {
    let q = [Quantity::ThermalConcurrence];
    let mut out = Vec::new();
    let cases = [
        ('a', Axis::OmegaOverB, 0.0),
        ('b', Axis::OmegaOverB, 90.0),
        ('c', Axis::CouplingOverB, 0.0),
        ('d', Axis::CouplingOverB, 90.0),
    ];
    for (letter, axis, theta) in cases {
        let fixed = base(opts).theta_deg(theta).temperatures(opts.temperatures.clone());
        let ds = match axis {
            Axis::OmegaOverB => sweep(axis, DEFAULT_OMEGA_FLOOR, OMEGA_MAX_PAIR, &fixed.coupling(0.8), &q, opts)?,
            _ => sweep(axis, COUPLING_MIN, COUPLING_MAX, &fixed.omega(2.0), &q, opts)?,
        };
        out.push(panel(7, letter, ds));
    }
    Ok(out)
}
