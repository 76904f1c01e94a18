//! Crossings, anticrossings and concurrence minima along a sweep axis.

use std::fmt;

use crate::entanglement::pure_concurrence;
use crate::error::{Error, Result};
use crate::pair::{self, PairEigensystem};
use crate::search;

use super::{evaluate_point, evaluate_points, track_sequence, Axis, Point, SweepSpec};

/// Axis-value precision of the refinement step.
pub const LOCATE_TOLERANCE: f64 = 1e-6;

/// Labels are 1-based, as in the `E_n` / `C_n` columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feature {
    /// Zero of `E_i - E_j`.
    Crossing(usize, usize),
    /// Interior minimum of `E_j - E_i > 0`.
    Anticrossing(usize, usize),
    /// Interior minimum of the pure concurrence of state `l`.
    ConcurrenceMinimum(usize),
}

impl Feature {
    fn labels(&self) -> Vec<usize> {
        match *self {
            Feature::Crossing(i, j) | Feature::Anticrossing(i, j) => vec![i, j],
            Feature::ConcurrenceMinimum(l) => vec![l],
        }
    }

    fn validate(&self) -> Result<()> {
        let labels = self.labels();
        if labels.iter().any(|&l| !(1..=4).contains(&l)) {
            return Err(Error::invalid(format!("{self}: labels must be in 1..=4")));
        }
        if labels.len() == 2 && labels[0] == labels[1] {
            return Err(Error::invalid(format!("{self}: labels must differ")));
        }
        Ok(())
    }

    fn value(&self, p: &PairEigensystem) -> Result<f64> {
        Ok(match *self {
            Feature::Crossing(i, j) => p.energy(i - 1) - p.energy(j - 1),
            Feature::Anticrossing(i, j) => p.energy(j - 1) - p.energy(i - 1),
            Feature::ConcurrenceMinimum(l) => pure_concurrence(p.state(l - 1))?,
        })
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Feature::Crossing(i, j) => write!(f, "crossing E_{i}/E_{j}"),
            Feature::Anticrossing(i, j) => write!(f, "anticrossing E_{i}/E_{j}"),
            Feature::ConcurrenceMinimum(l) => write!(f, "concurrence minimum C_{l}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Located {
    pub axis_value: f64,
    /// Energy difference, gap or concurrence at `axis_value`.
    pub feature_value: f64,
    /// Coarse-grid interval that contained the feature.
    pub bracket: (f64, f64),
}

/// Scan `spec`'s grid (labels tracked from the first point), bracket the
/// first occurrence of `feature`, and refine to [`LOCATE_TOLERANCE`].
///
/// Crossings take the first sign change; minima take the lowest interior
/// local minimum of the coarse samples.
pub fn locate_feature(feature: Feature, spec: &SweepSpec) -> Result<Located> {
    feature.validate()?;
    if spec.axis == Axis::KtOverB {
        return Err(Error::invalid("features are located along omega, coupling or tilt"));
    }
    let mut spec = spec.clone();
    if spec.quantities.is_empty() {
        spec.quantities = vec![super::Quantity::PairEnergies];
    }
    spec.validate()?;
    let (points, _) = spec.points();
    let grid = spec.grid();
    let mut pairs: Vec<PairEigensystem> = evaluate_points(&points, &spec.fixed, false, true)?
        .into_iter()
        .map(|e| e.pair.expect("pair requested"))
        .collect();
    track_sequence(&mut pairs);
    let values = pairs.iter().map(|p| feature.value(p)).collect::<Result<Vec<_>>>()?;

    // value at axis position x, labels carried over from grid point k
    let at = |k: usize, x: f64| -> Result<f64> {
        let p = retarget(&spec, &points[k], x);
        let cur = evaluate_point(&p, &spec.fixed, false, true)?.pair.expect("pair requested");
        let t = pair::track_labels(&pairs[k], &cur);
        feature.value(&cur.with_labels(t.labels))
    };

    match feature {
        Feature::Crossing(..) => {
            let k = (0..grid.len() - 1)
                .find(|&k| values[k] == 0.0 || values[k].signum() != values[k + 1].signum())
                .ok_or_else(|| not_found(&feature, &spec, "no sign change"))?;
            if values[k] == 0.0 {
                return Ok(Located { axis_value: grid[k], feature_value: 0.0, bracket: (grid[k], grid[k]) });
            }
            let x = search::bisect(|x| at(k, x), grid[k], grid[k + 1], values[k], LOCATE_TOLERANCE)?;
            Ok(Located { axis_value: x, feature_value: at(k, x)?, bracket: (grid[k], grid[k + 1]) })
        }
        Feature::Anticrossing(..) | Feature::ConcurrenceMinimum(_) => {
            let k = (1..grid.len() - 1)
                .filter(|&k| values[k] <= values[k - 1] && values[k] <= values[k + 1])
                .filter(|&k| values[k - 1] > values[k] || values[k + 1] > values[k])
                .min_by(|&a, &b| values[a].total_cmp(&values[b]))
                .ok_or_else(|| not_found(&feature, &spec, "no interior minimum"))?;
            let (x, v) = search::golden_section_min(|x| at(k - 1, x), grid[k - 1], grid[k + 1], LOCATE_TOLERANCE)?;
            if matches!(feature, Feature::Anticrossing(..)) && v <= 0.0 {
                return Err(not_found(&feature, &spec, "levels touch or cross at the minimum"));
            }
            Ok(Located { axis_value: x, feature_value: v, bracket: (grid[k - 1], grid[k + 1]) })
        }
    }
}

fn retarget(spec: &SweepSpec, base: &Point, x: f64) -> Point {
    let mut p = *base;
    match spec.axis {
        Axis::OmegaOverB => p.omega_over_b = if x == 0.0 { spec.fixed.omega_floor } else { x },
        Axis::CouplingOverB => p.coupling_over_b = x,
        Axis::ThetaTDeg => p.theta_t_deg = x,
        Axis::KtOverB => unreachable!("rejected above"),
    }
    p
}

fn not_found(feature: &Feature, spec: &SweepSpec, why: &str) -> Error {
    Error::FeatureNotFound(format!(
        "{feature} along {} in [{}, {}]: {why}",
        spec.axis, spec.start, spec.stop
    ))
}
