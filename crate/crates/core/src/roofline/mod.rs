//! Pairwise machine comparison over error-rate space.
//!
//! Two configurations A and B (circuit metrics plus gate fidelities) are
//! compared through `π = F_A - F_B`. Because `π` rises with A's fidelities and
//! falls with B's, the winner over a whole box of 1-qubit fidelities is
//! decided by its two extreme corners.

mod threshold;
mod topology;

use std::cmp::Ordering;
use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::circuit::{CircuitMetrics, CountError};
use crate::exec::{map_indexed, Exec};
use crate::models::{self, k_ln1m, n_ln, ModelError, ModelKind};

pub use threshold::{
    one_qubit_threshold, required_fidelity_delta, threshold_ratio, two_qubit_threshold,
    OneQubitPolicy, RatioOptions, ThresholdKind, ThresholdReport, ThresholdStatus,
};
pub use topology::{topology_compare, topology_configs, TopologyCell, TopologyConfig};

#[derive(Debug, Error)]
pub enum RooflineError {
    #[error("fidelity range [{lo}, {hi}] is empty or outside [0, 1]")]
    InvalidRange { lo: f64, hi: f64 },
    #[error("{name} = {value} is outside [0, 1]")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("the {0:?} model is not available for roofline comparisons")]
    UnsupportedModel(ModelKind),
    #[error("{0} samples must be non-empty and sorted ascending")]
    BadAxis(&'static str),
    #[error("{0} must be positive")]
    ZeroCount(&'static str),
    #[error(
        "no count record for benchmark `{benchmark}`, gate set `{gate_set}`, topology `{topology}`"
    )]
    MissingCombination {
        benchmark: String,
        gate_set: String,
        topology: String,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Count(#[from] CountError),
}

/// Closed interval of fidelities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityRange {
    pub lo: f64,
    pub hi: f64,
}

impl FidelityRange {
    pub fn new(lo: f64, hi: f64) -> Result<Self, RooflineError> {
        if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
            return Err(RooflineError::InvalidRange { lo, hi });
        }
        Ok(FidelityRange { lo, hi })
    }

    pub fn point(f: f64) -> Result<Self, RooflineError> {
        Self::new(f, f)
    }

    fn check(&self) -> Result<(), RooflineError> {
        Self::new(self.lo, self.hi).map(|_| ())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionLabel {
    AlwaysA,
    AlwaysB,
    OneQubitDependent,
}

impl RegionLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            RegionLabel::AlwaysA => "always_a",
            RegionLabel::AlwaysB => "always_b",
            RegionLabel::OneQubitDependent => "one_qubit_dependent",
        }
    }

    pub fn mirrored(self) -> Self {
        match self {
            RegionLabel::AlwaysA => RegionLabel::AlwaysB,
            RegionLabel::AlwaysB => RegionLabel::AlwaysA,
            RegionLabel::OneQubitDependent => RegionLabel::OneQubitDependent,
        }
    }
}

pub(crate) fn check_unit(name: &'static str, v: f64) -> Result<f64, RooflineError> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(RooflineError::OutOfRange { name, value: v })
    }
}

pub(crate) fn check_model(
    model: ModelKind,
    metrics: &[&CircuitMetrics],
) -> Result<(), RooflineError> {
    match model {
        ModelKind::Digital => Ok(()),
        ModelKind::Cyclic if metrics.iter().all(|m| m.has_schedule()) => Ok(()),
        ModelKind::Cyclic => Err(ModelError::MissingSchedule.into()),
        ModelKind::Coupling => Err(RooflineError::UnsupportedModel(model)),
    }
}

/// `ln F` for one configuration. Under the cyclic model the process
/// infidelities come from the average fidelities, and a factor with
/// `e·P >= 1` makes the fidelity 0.
pub(crate) fn ln_fidelity(model: ModelKind, m: &CircuitMetrics, f1: f64, f2: f64) -> f64 {
    match model {
        ModelKind::Cyclic => {
            let e = |f: f64, n: usize| 1.0 - models::average_to_process(f, n).unwrap_or(0.0);
            let k = m.m as f64;
            k_ln1m(k, e(f1, 1), m.p1) + k_ln1m(k, e(f2, 2), m.p2)
        }
        _ => n_ln(m.n1 as f64, f1) + n_ln(m.n2 as f64, f2),
    }
}

/// Sign of `π = F_A - F_B`, computed on logarithms.
pub(crate) fn pi_sign(ln_a: f64, ln_b: f64) -> Ordering {
    if ln_a == ln_b {
        Ordering::Equal
    } else {
        ln_a.partial_cmp(&ln_b).unwrap_or(Ordering::Equal)
    }
}

pub(crate) fn label_from_corners(best_a: Ordering, worst_a: Ordering) -> RegionLabel {
    match (best_a, worst_a) {
        (Ordering::Greater, Ordering::Greater) => RegionLabel::AlwaysA,
        (Ordering::Less, Ordering::Less) => RegionLabel::AlwaysB,
        _ => RegionLabel::OneQubitDependent,
    }
}

#[allow(clippy::too_many_arguments)]
fn classify_unchecked(
    ma: &CircuitMetrics,
    mb: &CircuitMetrics,
    f2a: f64,
    f2b: f64,
    r1a: FidelityRange,
    r1b: FidelityRange,
    model: ModelKind,
) -> RegionLabel {
    let best = pi_sign(
        ln_fidelity(model, ma, r1a.hi, f2a),
        ln_fidelity(model, mb, r1b.lo, f2b),
    );
    let worst = pi_sign(
        ln_fidelity(model, ma, r1a.lo, f2a),
        ln_fidelity(model, mb, r1b.hi, f2b),
    );
    label_from_corners(best, worst)
}

/// Which configuration wins for every 1-qubit fidelity pair in `r1a x r1b`.
///
/// A tie (`π = 0`) at either corner yields `OneQubitDependent`.
pub fn classify_point(
    ma: &CircuitMetrics,
    mb: &CircuitMetrics,
    f2a: f64,
    f2b: f64,
    r1a: FidelityRange,
    r1b: FidelityRange,
    model: ModelKind,
) -> Result<RegionLabel, RooflineError> {
    check_unit("f2A", f2a)?;
    check_unit("f2B", f2b)?;
    r1a.check()?;
    r1b.check()?;
    check_model(model, &[ma, mb])?;
    Ok(classify_unchecked(ma, mb, f2a, f2b, r1a, r1b, model))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub label: RegionLabel,
    /// Set when `f2B = x·y > 1`; such cells carry `AlwaysA`.
    pub out_of_domain: bool,
}

/// Labels over `x` (A's 2-qubit fidelity) by `y` (B's 2-qubit fidelity
/// relative to A's). Cells are stored row-major with `x` as the row index.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionGrid<C = GridCell> {
    pub x_axis: Vec<f64>,
    pub y_axis: Vec<f64>,
    pub cells: Vec<C>,
    pub config_echo: serde_json::Value,
}

impl<C> RegionGrid<C> {
    pub fn cell(&self, i: usize, j: usize) -> &C {
        &self.cells[i * self.y_axis.len() + j]
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.x_axis.len(), self.y_axis.len())
    }
}

impl RegionGrid<GridCell> {
    pub fn count(&self, label: RegionLabel) -> usize {
        self.cells
            .iter()
            .filter(|c| !c.out_of_domain && c.label == label)
            .count()
    }

    /// CSV with header `x,y,f2A,f2B,label,domain_flag`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,y,f2A,f2B,label,domain_flag")?;
        for (i, &x) in self.x_axis.iter().enumerate() {
            for (j, &y) in self.y_axis.iter().enumerate() {
                let c = self.cell(i, j);
                writeln!(
                    w,
                    "{x},{y},{x},{},{},{}",
                    x * y,
                    c.label.as_str(),
                    u8::from(c.out_of_domain)
                )?;
            }
        }
        Ok(())
    }
}

pub(crate) fn check_axis(name: &'static str, v: &[f64]) -> Result<(), RooflineError> {
    if v.is_empty() || v.windows(2).any(|w| w[0] > w[1]) || v.iter().any(|x| !x.is_finite()) {
        return Err(RooflineError::BadAxis(name));
    }
    Ok(())
}

/// Evenly spaced samples from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// [`classify_point`] at every `(x_i, y_j)` with `f2A = x_i`, `f2B = x_i·y_j`.
#[allow(clippy::too_many_arguments)]
pub fn sweep_grid(
    ma: &CircuitMetrics,
    mb: &CircuitMetrics,
    xs: &[f64],
    ys: &[f64],
    r1a: FidelityRange,
    r1b: FidelityRange,
    model: ModelKind,
    exec: Exec,
) -> Result<RegionGrid, RooflineError> {
    check_axis("x", xs)?;
    check_axis("y", ys)?;
    for &x in xs {
        check_unit("x", x)?;
    }
    if ys.iter().any(|&y| y < 0.0) {
        return Err(RooflineError::BadAxis("y"));
    }
    r1a.check()?;
    r1b.check()?;
    check_model(model, &[ma, mb])?;
    let ny = ys.len();
    let cells = map_indexed(exec, xs.len() * ny, |k| {
        let (x, y) = (xs[k / ny], ys[k % ny]);
        let f2b = x * y;
        if f2b > 1.0 {
            GridCell {
                label: RegionLabel::AlwaysA,
                out_of_domain: true,
            }
        } else {
            GridCell {
                label: classify_unchecked(ma, mb, x, f2b, r1a, r1b, model),
                out_of_domain: false,
            }
        }
    });
    let config_echo = json!({
        "model": model,
        "metrics_a": ma,
        "metrics_b": mb,
        "r1_a": r1a,
        "r1_b": r1b,
    });
    Ok(RegionGrid {
        x_axis: xs.to_vec(),
        y_axis: ys.to_vec(),
        cells,
        config_echo,
    })
}
