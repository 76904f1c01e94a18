//! Parameter sweeps over one axis with the others held fixed.

mod dataset;
mod figure;
mod locate;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use log::warn;
use rayon::prelude::*;

use crate::entanglement::{pure_concurrence, thermal_concurrence, Temperature};
use crate::error::{Error, Result};
use crate::pair::{self, PairEigensystem, PairParams};
use crate::rotor::{self, DipoleFactors, RotorEigensystem, RotorParams};

pub use dataset::{format_float, Dataset, Format};
pub use figure::{figure, FigureOptions, Panel, DEFAULT_FIGURE_POINTS, FIGURES};
pub use locate::{locate_feature, Feature, Located, LOCATE_TOLERANCE};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_OMEGA_FLOOR: f64 = 0.01;
pub const DEFAULT_OMEGA: f64 = 2.0;
pub const DEFAULT_COUPLING: f64 = 0.8;
pub const DEFAULT_THETA_DEG: f64 = 0.0;
pub const DEFAULT_TEMPERATURES: [f64; 4] = [0.1, 0.2, 0.5, 1.0];
/// Rotor levels reported by the `rotor_energies` quantity.
pub const ROTOR_LEVELS_REPORTED: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    OmegaOverB,
    CouplingOverB,
    ThetaTDeg,
    KtOverB,
}

impl Axis {
    pub const ALL: [Axis; 4] = [Axis::OmegaOverB, Axis::CouplingOverB, Axis::ThetaTDeg, Axis::KtOverB];

    pub fn name(self) -> &'static str {
        match self {
            Axis::OmegaOverB => "omega_over_B",
            Axis::CouplingOverB => "coupling_over_B",
            Axis::ThetaTDeg => "theta_t_deg",
            Axis::KtOverB => "kT_over_B",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase();
        Axis::ALL
            .into_iter()
            .find(|a| a.name().to_ascii_lowercase() == key)
            .or(match key.as_str() {
                "omega" => Some(Axis::OmegaOverB),
                "coupling" => Some(Axis::CouplingOverB),
                "theta" | "theta_t" | "theta-t" => Some(Axis::ThetaTDeg),
                "kt" | "temperature" => Some(Axis::KtOverB),
                _ => None,
            })
            .ok_or_else(|| Error::invalid(format!("unknown sweep axis '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    RotorEnergies,
    RotorGap,
    Factors,
    PairEnergies,
    PureConcurrences,
    ThermalConcurrence,
}

impl Quantity {
    pub const ALL: [Quantity; 6] = [
        Quantity::RotorEnergies,
        Quantity::RotorGap,
        Quantity::Factors,
        Quantity::PairEnergies,
        Quantity::PureConcurrences,
        Quantity::ThermalConcurrence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::RotorEnergies => "rotor_energies",
            Quantity::RotorGap => "rotor_gap",
            Quantity::Factors => "factors",
            Quantity::PairEnergies => "pair_energies",
            Quantity::PureConcurrences => "pure_concurrences",
            Quantity::ThermalConcurrence => "thermal_concurrence",
        }
    }

    /// Comma-separated list, duplicates removed, order kept.
    pub fn parse_list(s: &str) -> Result<Vec<Quantity>> {
        let mut out = Vec::new();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let q: Quantity = item.parse()?;
            if !out.contains(&q) {
                out.push(q);
            }
        }
        if out.is_empty() {
            return Err(Error::invalid("empty quantity list"));
        }
        Ok(out)
    }

    fn needs_pair(self) -> bool {
        matches!(
            self,
            Quantity::PairEnergies | Quantity::PureConcurrences | Quantity::ThermalConcurrence
        )
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown quantity '{s}'")))
    }
}

/// Parameters not swept. `None` means "use the default", except that the
/// swept parameter must be `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedParams {
    pub omega_over_b: Option<f64>,
    pub coupling_over_b: Option<f64>,
    pub theta_t_deg: Option<f64>,
    /// Temperatures for `thermal_concurrence`; empty means the default list.
    pub temperatures: Vec<f64>,
    pub m_max: usize,
    pub guard_tolerance: f64,
    pub omega_floor: f64,
}

impl Default for FixedParams {
    fn default() -> Self {
        Self {
            omega_over_b: None,
            coupling_over_b: None,
            theta_t_deg: None,
            temperatures: Vec::new(),
            m_max: rotor::DEFAULT_M_MAX,
            guard_tolerance: rotor::DEFAULT_GUARD_TOLERANCE,
            omega_floor: DEFAULT_OMEGA_FLOOR,
        }
    }
}

impl FixedParams {
    pub fn omega(mut self, v: f64) -> Self {
        self.omega_over_b = Some(v);
        self
    }

    pub fn coupling(mut self, v: f64) -> Self {
        self.coupling_over_b = Some(v);
        self
    }

    pub fn theta_deg(mut self, v: f64) -> Self {
        self.theta_t_deg = Some(v);
        self
    }

    pub fn temperatures(mut self, v: Vec<f64>) -> Self {
        self.temperatures = v;
        self
    }

    fn temperature_list(&self) -> Vec<f64> {
        if self.temperatures.is_empty() {
            DEFAULT_TEMPERATURES.to_vec()
        } else {
            self.temperatures.clone()
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = |name: &str, v: Option<f64>| match v {
            Some(x) if !x.is_finite() => Err(Error::invalid(format!("{name} must be finite"))),
            _ => Ok(()),
        };
        finite("omega_over_B", self.omega_over_b)?;
        finite("coupling_over_B", self.coupling_over_b)?;
        finite("theta_t_deg", self.theta_t_deg)?;
        if matches!(self.omega_over_b, Some(w) if w < 0.0) {
            return Err(Error::invalid("omega_over_B must be non-negative"));
        }
        if self.temperatures.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::invalid("temperatures must be finite and non-negative"));
        }
        if self.m_max == 0 {
            return Err(Error::invalid("m_max must be at least 1"));
        }
        if !(self.guard_tolerance.is_finite() && self.guard_tolerance >= 0.0) {
            return Err(Error::invalid("guard tolerance must be finite and non-negative"));
        }
        if !(self.omega_floor.is_finite() && self.omega_floor > 0.0) {
            return Err(Error::invalid("omega floor must be positive"));
        }
        Ok(())
    }
}

/// One evaluation point, all parameters resolved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub omega_over_b: f64,
    pub coupling_over_b: f64,
    pub theta_t_deg: f64,
    /// Set only when sweeping temperature.
    pub kt_over_b: Option<f64>,
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "omega_over_B={}, coupling_over_B={}, theta_t_deg={}",
            self.omega_over_b, self.coupling_over_b, self.theta_t_deg
        )?;
        if let Some(t) = self.kt_over_b {
            write!(f, ", kT_over_B={t}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub fixed: FixedParams,
    pub quantities: Vec<Quantity>,
    /// `None` writes to standard output.
    pub output: Option<PathBuf>,
}

impl SweepSpec {
    pub fn new(axis: Axis, start: f64, stop: f64, count: usize) -> Self {
        Self {
            axis,
            start,
            stop,
            count,
            fixed: FixedParams::default(),
            quantities: Vec::new(),
            output: None,
        }
    }

    pub fn with_fixed(mut self, fixed: FixedParams) -> Self {
        self.fixed = fixed;
        self
    }

    pub fn with_quantities(mut self, quantities: &[Quantity]) -> Self {
        self.quantities = quantities.to_vec();
        self
    }

    /// Parses `axis:start:stop:count`.
    pub fn parse_axis_range(s: &str) -> Result<(Axis, f64, f64, usize)> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(Error::invalid(format!("sweep '{s}' is not axis:start:stop:count")));
        }
        let num = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| Error::invalid(format!("sweep bound '{t}' is not a number")))
        };
        let count = parts[3]
            .parse::<usize>()
            .map_err(|_| Error::invalid(format!("sweep count '{}' is not a positive integer", parts[3])))?;
        Ok((parts[0].parse()?, num(parts[1])?, num(parts[2])?, count))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(Error::invalid("sweep bounds must be finite"));
        }
        if self.start >= self.stop {
            return Err(Error::invalid(format!(
                "sweep start {} must be below stop {}",
                self.start, self.stop
            )));
        }
        if self.count < 2 {
            return Err(Error::invalid("sweep count must be at least 2"));
        }
        let f = &self.fixed;
        let clash = match self.axis {
            Axis::OmegaOverB => f.omega_over_b.is_some(),
            Axis::CouplingOverB => f.coupling_over_b.is_some(),
            Axis::ThetaTDeg => f.theta_t_deg.is_some(),
            Axis::KtOverB => !f.temperatures.is_empty(),
        };
        if clash {
            return Err(Error::invalid(format!("{} is both swept and fixed", self.axis)));
        }
        match self.axis {
            Axis::OmegaOverB if self.start < 0.0 => {
                return Err(Error::invalid("omega_over_B must be non-negative"))
            }
            Axis::KtOverB if self.start < 0.0 => return Err(Error::invalid("kT_over_B must be non-negative")),
            Axis::KtOverB if !self.quantities.contains(&Quantity::ThermalConcurrence) => {
                return Err(Error::invalid("a temperature sweep needs the thermal_concurrence quantity"))
            }
            _ => {}
        }
        f.validate()
    }

    /// Evenly spaced axis values, endpoints included.
    pub fn grid(&self) -> Vec<f64> {
        linspace(self.start, self.stop, self.count)
    }

    /// Resolved points plus any warnings raised while resolving them.
    pub fn points(&self) -> (Vec<Point>, Vec<String>) {
        let mut warnings = Vec::new();
        let f = &self.fixed;
        let mut base = Point {
            omega_over_b: f.omega_over_b.unwrap_or(DEFAULT_OMEGA),
            coupling_over_b: f.coupling_over_b.unwrap_or(DEFAULT_COUPLING),
            theta_t_deg: f.theta_t_deg.unwrap_or(DEFAULT_THETA_DEG),
            kt_over_b: None,
        };
        if base.omega_over_b == 0.0 {
            base.omega_over_b = f.omega_floor;
            warnings.push(omega_floor_warning(f.omega_floor));
        }
        let points = self
            .grid()
            .into_iter()
            .map(|x| {
                let mut p = base;
                match self.axis {
                    Axis::OmegaOverB => {
                        p.omega_over_b = if x == 0.0 {
                            warnings.push(omega_floor_warning(f.omega_floor));
                            f.omega_floor
                        } else {
                            x
                        }
                    }
                    Axis::CouplingOverB => p.coupling_over_b = x,
                    Axis::ThetaTDeg => p.theta_t_deg = x,
                    Axis::KtOverB => p.kt_over_b = Some(x),
                }
                p
            })
            .collect();
        for w in &warnings {
            warn!("{w}");
        }
        (points, warnings)
    }
}

fn omega_floor_warning(floor: f64) -> String {
    format!("omega_over_B=0 replaced by {floor}")
}

pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (count - 1) as f64;
            (0..count)
                .map(|k| if k == count - 1 { stop } else { start + step * k as f64 })
                .collect()
        }
    }
}

/// Everything a point needs, computed once.
#[derive(Debug, Clone)]
pub(crate) struct PointEval {
    pub rotor: RotorEigensystem,
    pub factors: Option<DipoleFactors>,
    pub pair: Option<PairEigensystem>,
}

pub(crate) fn evaluate_point(p: &Point, fixed: &FixedParams, need_factors: bool, need_pair: bool) -> Result<PointEval> {
    let params = RotorParams::from_degrees(p.omega_over_b, p.theta_t_deg, fixed.m_max)?;
    let rotor = rotor::solve_rotor(&params)?;
    let factors = if need_factors || need_pair {
        Some(rotor::dipole_factors_with_tolerance(&rotor, fixed.guard_tolerance).map_err(|e| e.at_point(p.to_string()))?)
    } else {
        None
    };
    let pair = match (need_pair, factors) {
        (true, Some(f)) => {
            let h = pair::build_pair_hamiltonian(&f, rotor.energies[0], rotor.energies[1], p.coupling_over_b)?;
            Some(pair::solve_pair_matrix(PairParams::new(params, p.coupling_over_b)?, h)?)
        }
        _ => None,
    };
    Ok(PointEval { rotor, factors, pair })
}

/// Evaluate points in parallel; the first failure in grid order is reported.
pub(crate) fn evaluate_points(
    points: &[Point],
    fixed: &FixedParams,
    need_factors: bool,
    need_pair: bool,
) -> Result<Vec<PointEval>> {
    let results: Vec<Result<PointEval>> = points
        .par_iter()
        .map(|p| evaluate_point(p, fixed, need_factors, need_pair))
        .collect();
    results.into_iter().collect()
}

/// Carry labels along an ordered sequence. Returns the indices whose
/// assignment was ambiguous.
pub(crate) fn track_sequence(pairs: &mut [PairEigensystem]) -> Vec<usize> {
    let mut ambiguous = Vec::new();
    for k in 1..pairs.len() {
        let t = pair::track_labels(&pairs[k - 1], &pairs[k]);
        pairs[k].labels = t.labels;
        if t.ambiguous {
            ambiguous.push(k);
        }
    }
    ambiguous
}

const FACTOR_NAMES: [&str; 6] = ["C0", "C1", "CX", "S0", "S1", "SX"];

fn factor_values(f: &DipoleFactors) -> [crate::linalg::C64; 6] {
    [f.c0, f.c1, f.cx, f.s0, f.s1, f.sx]
}

fn thermal_column(t: f64) -> String {
    format!("C_thermal_kT_{t}")
}

fn columns_for(axis: Option<Axis>, quantities: &[Quantity], temps: &[f64]) -> Vec<String> {
    let mut cols: Vec<String> = match axis {
        Some(a) => vec![a.name().to_string()],
        None => vec![
            Axis::OmegaOverB.name().into(),
            Axis::CouplingOverB.name().into(),
            Axis::ThetaTDeg.name().into(),
        ],
    };
    for q in quantities {
        match q {
            Quantity::RotorEnergies => cols.extend((0..ROTOR_LEVELS_REPORTED).map(|l| format!("eps_{l}"))),
            Quantity::RotorGap => cols.push("gap_10".into()),
            Quantity::Factors => {
                cols.extend(FACTOR_NAMES.iter().map(|n| format!("abs_{n}")));
                for n in FACTOR_NAMES {
                    cols.push(format!("{n}_sq_re"));
                    cols.push(format!("{n}_sq_im"));
                }
            }
            Quantity::PairEnergies => cols.extend((1..=4).map(|l| format!("E_{l}"))),
            Quantity::PureConcurrences => cols.extend((1..=4).map(|l| format!("C_{l}"))),
            Quantity::ThermalConcurrence => match axis {
                Some(Axis::KtOverB) => cols.push("C_thermal".into()),
                _ => cols.extend(temps.iter().map(|&t| thermal_column(t))),
            },
        }
    }
    cols
}

fn row_for(axis_value: Option<f64>, p: &Point, eval: &PointEval, quantities: &[Quantity], temps: &[f64]) -> Result<Vec<f64>> {
    let mut row = match axis_value {
        Some(x) => vec![x],
        None => vec![p.omega_over_b, p.coupling_over_b, p.theta_t_deg],
    };
    let pair = || eval.pair.as_ref().expect("pair solved for pair quantities");
    for q in quantities {
        match q {
            Quantity::RotorEnergies => {
                row.extend(eval.rotor.energies.iter().take(ROTOR_LEVELS_REPORTED).copied());
                row.extend(std::iter::repeat_n(f64::NAN, ROTOR_LEVELS_REPORTED.saturating_sub(eval.rotor.levels())));
            }
            Quantity::RotorGap => row.push(eval.rotor.level_gap(0, 1)?),
            Quantity::Factors => {
                let values = factor_values(eval.factors.as_ref().expect("factors computed"));
                row.extend(values.iter().map(|z| z.norm()));
                for z in values {
                    let sq = z * z;
                    row.push(sq.re);
                    row.push(sq.im);
                }
            }
            Quantity::PairEnergies => row.extend(pair().energies_by_label()),
            Quantity::PureConcurrences => {
                for l in 0..4 {
                    row.push(pure_concurrence(pair().state(l))?);
                }
            }
            Quantity::ThermalConcurrence => match p.kt_over_b {
                Some(t) => row.push(thermal_concurrence(pair(), Temperature::new(t)?)?),
                None => {
                    for &t in temps {
                        row.push(thermal_concurrence(pair(), Temperature::new(t)?)?);
                    }
                }
            },
        }
    }
    Ok(row)
}

fn base_metadata(fixed: &FixedParams, quantities: &[Quantity]) -> Dataset {
    Dataset::default()
        .with_meta("version", VERSION)
        .with_meta("m_max", fixed.m_max)
        .with_meta("guard_tolerance", fixed.guard_tolerance)
        .with_meta("degeneracy_tolerance", pair::DEGENERACY_TOL)
        .with_meta("ambiguity_tolerance", pair::AMBIGUITY_TOL)
        .with_meta("omega_floor", fixed.omega_floor)
        .with_meta(
            "quantities",
            quantities.iter().map(|q| q.name()).collect::<Vec<_>>().join(","),
        )
}

fn join_values(v: impl IntoIterator<Item = f64>) -> String {
    v.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Evaluate every grid point and tabulate the requested quantities.
///
/// Pair columns are indexed by label, tracked from ascending order at the
/// first grid point.
pub fn run_sweep(spec: &SweepSpec) -> Result<Dataset> {
    spec.validate()?;
    let quantities = if spec.quantities.is_empty() {
        return Err(Error::invalid("no quantities requested"));
    } else {
        &spec.quantities
    };
    let temps = spec.fixed.temperature_list();
    let (points, warnings) = spec.points();
    let need_pair = quantities.iter().any(|q| q.needs_pair());
    let need_factors = quantities.contains(&Quantity::Factors);
    let mut evals = evaluate_points(&points, &spec.fixed, need_factors, need_pair)?;

    let mut ambiguous = Vec::new();
    let mut degenerate = Vec::new();
    if need_pair {
        let mut pairs: Vec<PairEigensystem> = evals.iter_mut().map(|e| e.pair.take().unwrap()).collect();
        ambiguous = track_sequence(&mut pairs);
        degenerate = (0..pairs.len()).filter(|&k| pairs[k].degenerate).collect();
        for (e, p) in evals.iter_mut().zip(pairs) {
            e.pair = Some(p);
        }
    }

    let grid = spec.grid();
    let mut ds = base_metadata(&spec.fixed, quantities);
    ds.columns = columns_for(Some(spec.axis), quantities, &temps);
    for ((x, p), e) in grid.iter().zip(&points).zip(&evals) {
        ds.rows.push(row_for(Some(*x), p, e, quantities, &temps)?);
    }

    let f = &spec.fixed;
    let fixed_value = |a: Axis, v: Option<f64>, default: f64| {
        if a == spec.axis {
            "swept".to_string()
        } else {
            v.unwrap_or(default).to_string()
        }
    };
    ds = ds
        .with_meta("axis", spec.axis)
        .with_meta("start", spec.start)
        .with_meta("stop", spec.stop)
        .with_meta("count", spec.count)
        .with_meta(Axis::OmegaOverB.name(), fixed_value(Axis::OmegaOverB, f.omega_over_b, DEFAULT_OMEGA))
        .with_meta(
            Axis::CouplingOverB.name(),
            fixed_value(Axis::CouplingOverB, f.coupling_over_b, DEFAULT_COUPLING),
        )
        .with_meta(Axis::ThetaTDeg.name(), fixed_value(Axis::ThetaTDeg, f.theta_t_deg, DEFAULT_THETA_DEG));
    if spec.axis != Axis::KtOverB && quantities.contains(&Quantity::ThermalConcurrence) {
        ds = ds.with_meta("temperatures", join_values(temps.iter().copied()));
    }
    if !warnings.is_empty() {
        ds = ds.with_meta("warnings", warnings.join("; "));
    }
    if need_pair {
        ds = ds
            .with_meta("ambiguous_points", join_values(ambiguous.iter().map(|&k| grid[k])))
            .with_meta("degenerate_points", join_values(degenerate.iter().map(|&k| grid[k])));
    }
    Ok(ds)
}

/// One-row dataset at a single parameter point. Pair labels are ascending
/// energy order.
pub fn run_point(fixed: &FixedParams, quantities: &[Quantity]) -> Result<Dataset> {
    fixed.validate()?;
    if quantities.is_empty() {
        return Err(Error::invalid("no quantities requested"));
    }
    let mut spec = SweepSpec::new(Axis::KtOverB, 0.0, 1.0, 2).with_fixed(fixed.clone());
    spec.fixed.temperatures.clear();
    let (mut points, warnings) = spec.points();
    points.truncate(1);
    points[0].kt_over_b = None;

    let temps = fixed.temperature_list();
    let need_pair = quantities.iter().any(|q| q.needs_pair());
    let eval = evaluate_point(&points[0], fixed, quantities.contains(&Quantity::Factors), need_pair)?;
    let mut ds = base_metadata(fixed, quantities);
    ds.columns = columns_for(None, quantities, &temps);
    ds.rows.push(row_for(None, &points[0], &eval, quantities, &temps)?);
    if quantities.contains(&Quantity::ThermalConcurrence) {
        ds = ds.with_meta("temperatures", join_values(temps.iter().copied()));
    }
    if !warnings.is_empty() {
        ds = ds.with_meta("warnings", warnings.join("; "));
    }
    if let Some(p) = &eval.pair {
        ds = ds.with_meta("degenerate", p.degenerate);
    }
    Ok(ds)
}
