use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{check_model, check_unit, ln_fidelity, pi_sign, RooflineError};
use crate::circuit::CircuitMetrics;
use crate::models::{n_ln, ModelKind};
use crate::solve::bisect;

const F2_SEARCH: (f64, f64) = (0.9, 1.0);
const F2_TOL: f64 = 1e-6;
const F1_FLOOR: f64 = 0.999;
const F1_TOP: f64 = 1.0 - 1e-12;
const F1_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdKind {
    TwoQubit,
    OneQubit,
    Ratio,
    Delta,
}

/// How a solve ended. Everything except `Solved` is a flag the caller should
/// surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdStatus {
    Solved,
    /// The only satisfying point is the upper search bound, where the
    /// configurations tie exactly.
    Boundary,
    /// The predicate already holds at the lower search bound.
    BelowBracket,
    /// The predicate fails even at the upper search bound.
    NoThreshold,
    /// 1-qubit threshold sits below the 0.999 search floor.
    AlreadyClosed,
    /// Identical 2-qubit terms; no 1-qubit fidelity orders the machines.
    DegenerateTie,
    /// Ratio search: already decided at ratio 1.
    NoWindow,
    /// Ratio search: the inner threshold was not monotone along the solve.
    NonMonotone,
    /// Delta search: even perfect 2-qubit gates lose.
    Unattainable,
}

impl ThresholdStatus {
    pub fn is_flag(self) -> bool {
        self != ThresholdStatus::Solved
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub kind: ThresholdKind,
    pub value: f64,
    pub bracket: [f64; 2],
    pub status: ThresholdStatus,
    pub assumptions: serde_json::Value,
    /// Ratio search only: `(x, inner threshold)` in evaluation order.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<[f64; 2]>,
}

impl ThresholdReport {
    fn new(
        kind: ThresholdKind,
        value: f64,
        bracket: [f64; 2],
        status: ThresholdStatus,
        assumptions: serde_json::Value,
    ) -> Self {
        ThresholdReport {
            kind,
            value,
            bracket,
            status,
            assumptions,
            trace: Vec::new(),
        }
    }
}

/// Smallest `f2A` in `[0.9, 1]` with `π(f2A, f2B_max) >= 0`. Since `π` falls
/// as `f2B` rises, A then wins or ties for every `f2B <= f2B_max`.
pub fn two_qubit_threshold(
    ma: &CircuitMetrics,
    mb: &CircuitMetrics,
    f1a: f64,
    f1b: f64,
    f2b_max: f64,
    model: ModelKind,
) -> Result<ThresholdReport, RooflineError> {
    check_unit("f1A", f1a)?;
    check_unit("f1B", f1b)?;
    check_unit("f2B_max", f2b_max)?;
    check_model(model, &[ma, mb])?;
    let ln_b = ln_fidelity(model, mb, f1b, f2b_max);
    let sign = |f2a: f64| pi_sign(ln_fidelity(model, ma, f1a, f2a), ln_b);
    let pred = |f2a: f64| sign(f2a) != Ordering::Less;
    let (lo, hi) = F2_SEARCH;
    let assumptions = json!({
        "model": model,
        "metrics_a": ma,
        "metrics_b": mb,
        "f1A": f1a,
        "f1B": f1b,
        "f2B_max": f2b_max,
        "search": [lo, hi],
        "tolerance": F2_TOL,
    });
    let report = |value, bracket, status| {
        ThresholdReport::new(
            ThresholdKind::TwoQubit,
            value,
            bracket,
            status,
            assumptions.clone(),
        )
    };
    if !pred(hi) {
        return Ok(report(hi, [hi, hi], ThresholdStatus::NoThreshold));
    }
    if pred(lo) {
        return Ok(report(lo, [lo, lo], ThresholdStatus::BelowBracket));
    }
    let (blo, bhi) = bisect(lo, hi, F2_TOL, pred);
    let status = if bhi == hi && sign(hi) == Ordering::Equal {
        ThresholdStatus::Boundary
    } else {
        ThresholdStatus::Solved
    };
    Ok(report(bhi, [blo, bhi], status))
}

/// Which 1-qubit fidelities the single-qubit threshold lets vary.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OneQubitPolicy {
    /// Both machines share one 1-qubit fidelity `F1`.
    #[default]
    Shared,
    /// Only A's 1-qubit fidelity varies; B's 1-qubit gates are perfect, so
    /// the result is the `F1A` at which A wins outright.
    PerMachine,
}

fn n1_bounds(n2: usize) -> (usize, usize) {
    (n2.div_ceil(8), 2 * n2)
}

struct OneQubitSolve {
    status: ThresholdStatus,
    value: f64,
    bracket: [f64; 2],
}

fn solve_one_qubit(
    n2a: usize,
    n2b: usize,
    f2a: f64,
    f2b: f64,
    policy: OneQubitPolicy,
) -> (OneQubitSolve, f64) {
    let (a_lo, a_hi) = n1_bounds(n2a);
    let (b_lo, b_hi) = n1_bounds(n2b);
    let d = n_ln(n2a as f64, f2a) - n_ln(n2b as f64, f2b);
    let agree = |f: f64| {
        let l = f.ln();
        match policy {
            OneQubitPolicy::Shared => {
                let e1 = (a_lo as f64 - b_hi as f64) * l + d;
                let e2 = (a_hi as f64 - b_lo as f64) * l + d;
                (e1 > 0.0 && e2 > 0.0) || (e1 < 0.0 && e2 < 0.0)
            }
            OneQubitPolicy::PerMachine => a_hi as f64 * l + d > 0.0,
        }
    };
    let done = |status, value: f64| OneQubitSolve {
        status,
        value,
        bracket: [value, value],
    };
    let solve = if d == 0.0 {
        done(ThresholdStatus::DegenerateTie, 1.0)
    } else if agree(F1_FLOOR) {
        done(ThresholdStatus::AlreadyClosed, F1_FLOOR)
    } else if !agree(F1_TOP) {
        done(ThresholdStatus::NoThreshold, 1.0)
    } else {
        let (lo, hi) = bisect(F1_FLOOR, F1_TOP, F1_TOL, agree);
        OneQubitSolve {
            status: ThresholdStatus::Solved,
            value: hi,
            bracket: [lo, hi],
        }
    };
    (solve, d)
}

/// Smallest shared 1-qubit fidelity `F1` in `[0.999, 1)` at which the winner
/// no longer depends on the 1-qubit gate counts, with each `n1` ranging over
/// `[ceil(n2/8), 2·n2]`.
pub fn one_qubit_threshold(
    n2a: usize,
    n2b: usize,
    f2a: f64,
    f2b: f64,
    policy: OneQubitPolicy,
) -> Result<ThresholdReport, RooflineError> {
    if n2a == 0 {
        return Err(RooflineError::ZeroCount("n2A"));
    }
    if n2b == 0 {
        return Err(RooflineError::ZeroCount("n2B"));
    }
    for (name, f) in [("f2A", f2a), ("f2B", f2b)] {
        if !(f > 0.0 && f <= 1.0) {
            return Err(RooflineError::OutOfRange { name, value: f });
        }
    }
    let (s, d) = solve_one_qubit(n2a, n2b, f2a, f2b, policy);
    let (a_lo, a_hi) = n1_bounds(n2a);
    let (b_lo, b_hi) = n1_bounds(n2b);
    let assumptions = json!({
        "n2A": n2a,
        "n2B": n2b,
        "f2A": f2a,
        "f2B": f2b,
        "n1A_bounds": [a_lo, a_hi],
        "n1B_bounds": [b_lo, b_hi],
        "policy": policy,
        "log_two_qubit_margin": d,
        "search": [F1_FLOOR, F1_TOP],
        "tolerance": F1_TOL,
    });
    Ok(ThresholdReport::new(
        ThresholdKind::OneQubit,
        s.value,
        s.bracket,
        s.status,
        assumptions,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioOptions {
    pub x_max: f64,
    pub tolerance: f64,
    pub policy: OneQubitPolicy,
}

impl Default for RatioOptions {
    fn default() -> Self {
        RatioOptions {
            x_max: 10.0,
            tolerance: 1e-3,
            policy: OneQubitPolicy::Shared,
        }
    }
}

/// Smallest gate-count ratio `x >= 1` (with `n2B = round(x·n2A)`) at which
/// the single-qubit threshold falls to `f1_floor` or below: past `x`, tuning
/// 1-qubit gates can no longer reorder the machines.
///
/// Every inner solve is recorded in `trace`; if the inner threshold is not
/// non-increasing in `x` over the evaluated points the status is
/// `NonMonotone` (the value is still the bisection result).
pub fn threshold_ratio(
    n2a: usize,
    f2a: f64,
    f2b: f64,
    f1_floor: f64,
    opts: RatioOptions,
) -> Result<ThresholdReport, RooflineError> {
    if n2a == 0 {
        return Err(RooflineError::ZeroCount("n2A"));
    }
    for (name, f) in [("f2A", f2a), ("f2B", f2b)] {
        if !(f > 0.0 && f <= 1.0) {
            return Err(RooflineError::OutOfRange { name, value: f });
        }
    }
    if !(f1_floor > 0.0 && f1_floor < 1.0) {
        return Err(RooflineError::OutOfRange {
            name: "F1_floor",
            value: f1_floor,
        });
    }
    let mut trace: Vec<[f64; 2]> = Vec::new();
    let mut inner = |x: f64| {
        let n2b = ((x * n2a as f64).round() as usize).max(1);
        let (s, _) = solve_one_qubit(n2a, n2b, f2a, f2b, opts.policy);
        trace.push([x, s.value]);
        s.value <= f1_floor
    };
    let (lo, hi) = (1.0, opts.x_max);
    let (value, bracket, mut status) = if inner(lo) {
        (lo, [lo, lo], ThresholdStatus::NoWindow)
    } else if !inner(hi) {
        (hi, [hi, hi], ThresholdStatus::NoThreshold)
    } else {
        let (blo, bhi) = bisect(lo, hi, opts.tolerance, &mut inner);
        (bhi, [blo, bhi], ThresholdStatus::Solved)
    };
    let mut sorted = trace.clone();
    sorted.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let monotone = sorted.windows(2).all(|w| w[1][1] <= w[0][1] + 1e-12);
    if !monotone {
        status = ThresholdStatus::NonMonotone;
    }
    let assumptions = json!({
        "n2A": n2a,
        "f2A": f2a,
        "f2B": f2b,
        "F1_floor": f1_floor,
        "scaled": "B",
        "n2B_rounding": "nearest",
        "options": opts,
        "inner_monotone": monotone,
    });
    let mut report =
        ThresholdReport::new(ThresholdKind::Ratio, value, bracket, status, assumptions);
    report.trace = trace;
    Ok(report)
}

/// Smallest `f2` for the target configuration that matches or beats the
/// baseline, searched over `[0, 1]`.
pub fn required_fidelity_delta(
    m_target: &CircuitMetrics,
    m_base: &CircuitMetrics,
    f1_base: f64,
    f2_base: f64,
    f1_target: f64,
    model: ModelKind,
) -> Result<ThresholdReport, RooflineError> {
    check_unit("f1_base", f1_base)?;
    check_unit("f2_base", f2_base)?;
    check_unit("f1_target", f1_target)?;
    check_model(model, &[m_target, m_base])?;
    let ln_base = ln_fidelity(model, m_base, f1_base, f2_base);
    let pred =
        |f2: f64| pi_sign(ln_fidelity(model, m_target, f1_target, f2), ln_base) != Ordering::Less;
    let assumptions = json!({
        "model": model,
        "metrics_target": m_target,
        "metrics_base": m_base,
        "f1_base": f1_base,
        "f2_base": f2_base,
        "f1_target": f1_target,
        "search": [0.0, 1.0],
        "tolerance": F2_TOL,
    });
    let report = |value, bracket, status| {
        ThresholdReport::new(
            ThresholdKind::Delta,
            value,
            bracket,
            status,
            assumptions.clone(),
        )
    };
    if !pred(1.0) {
        return Ok(report(1.0, [1.0, 1.0], ThresholdStatus::Unattainable));
    }
    if pred(0.0) {
        return Ok(report(0.0, [0.0, 0.0], ThresholdStatus::Solved));
    }
    let (lo, hi) = bisect(0.0, 1.0, F2_TOL, pred);
    Ok(report(hi, [lo, hi], ThresholdStatus::Solved))
}
