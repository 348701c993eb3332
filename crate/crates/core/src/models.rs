//! Circuit fidelity models.
//!
//! * digital: `F = f1^n1 · f2^n2`
//! * cyclic: `F = (1 - e1·P1)^m · (1 - e2·P2)^m`
//! * coupling: `F = (1 - ec1·C1)^n1 · (1 - ec2·C2)^n2`
//!
//! Products are accumulated as logarithms so that gate counts in the
//! thousands do not underflow.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::CircuitMetrics;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("{name} = {value} is outside [0, 1]")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("qubit count must be at least 1")]
    ZeroQubits,
    #[error("average fidelity {value} is below the depolarizing floor {floor} for {n} qubit(s)")]
    BelowFloor { value: f64, floor: f64, n: usize },
    #[error("{factor} = {product} reaches the parallelism threshold (must be < 1)")]
    ParallelismThresholdExceeded { factor: &'static str, product: f64 },
    #[error("cyclic model needs a cycle schedule; metrics carry counts only")]
    MissingSchedule,
    #[error("cannot compare a {a:?} estimate with a {b:?} estimate")]
    ModelMismatch { a: ModelKind, b: ModelKind },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Digital,
    Cyclic,
    Coupling,
}

/// Parameters an estimate was computed from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelInputs {
    Digital {
        n1: usize,
        n2: usize,
        f1: f64,
        f2: f64,
    },
    Cyclic {
        m: usize,
        p1: f64,
        p2: f64,
        e1: f64,
        e2: f64,
    },
    Coupling {
        n1: usize,
        n2: usize,
        ec1: f64,
        ec2: f64,
        c1: f64,
        c2: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityEstimate {
    pub value: f64,
    /// Natural log of `value`, kept for comparisons where `value` underflows.
    pub ln_value: f64,
    pub model: ModelKind,
    pub inputs: ModelInputs,
}

impl FidelityEstimate {
    fn new(ln_value: f64, model: ModelKind, inputs: ModelInputs) -> Self {
        FidelityEstimate {
            value: ln_value.exp(),
            ln_value,
            model,
            inputs,
        }
    }
}

fn unit(name: &'static str, value: f64) -> Result<f64, ModelError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(ModelError::OutOfRange { name, value })
    }
}

/// Average gate fidelity from process fidelity: `f = (dγ + 1)/(d + 1)`, `d = 2^n`.
pub fn process_to_average(gamma: f64, n: usize) -> Result<f64, ModelError> {
    unit("gamma", gamma)?;
    if n == 0 {
        return Err(ModelError::ZeroQubits);
    }
    let d = (n as f64).exp2();
    Ok((d * gamma + 1.0) / (d + 1.0))
}

/// Inverse of [`process_to_average`]: `γ = ((d + 1) f - 1)/d`.
pub fn average_to_process(f: f64, n: usize) -> Result<f64, ModelError> {
    unit("average fidelity", f)?;
    if n == 0 {
        return Err(ModelError::ZeroQubits);
    }
    let d = (n as f64).exp2();
    let floor = 1.0 / (d + 1.0);
    if f < floor {
        return Err(ModelError::BelowFloor { value: f, floor, n });
    }
    Ok((((d + 1.0) * f - 1.0) / d).clamp(0.0, 1.0))
}

/// `n · ln(x)` with `0 · ln(0) = 0`.
#[inline]
pub(crate) fn n_ln(n: f64, x: f64) -> f64 {
    if n == 0.0 {
        0.0
    } else {
        n * x.ln()
    }
}

/// `k · ln(1 - e·c)`; `-inf` once `e·c >= 1`.
#[inline]
pub(crate) fn k_ln1m(k: f64, e: f64, c: f64) -> f64 {
    let p = e * c;
    if k == 0.0 || p == 0.0 {
        0.0
    } else if p >= 1.0 {
        f64::NEG_INFINITY
    } else {
        k * (-p).ln_1p()
    }
}

pub fn digital_fidelity(
    metrics: &CircuitMetrics,
    f1: f64,
    f2: f64,
) -> Result<FidelityEstimate, ModelError> {
    digital_from_counts(metrics.n1, metrics.n2, f1, f2)
}

pub fn digital_from_counts(
    n1: usize,
    n2: usize,
    f1: f64,
    f2: f64,
) -> Result<FidelityEstimate, ModelError> {
    unit("f1", f1)?;
    unit("f2", f2)?;
    let ln = n_ln(n1 as f64, f1) + n_ln(n2 as f64, f2);
    Ok(FidelityEstimate::new(
        ln,
        ModelKind::Digital,
        ModelInputs::Digital { n1, n2, f1, f2 },
    ))
}

pub fn cyclic_fidelity(
    metrics: &CircuitMetrics,
    e1: f64,
    e2: f64,
) -> Result<FidelityEstimate, ModelError> {
    unit("e1", e1)?;
    unit("e2", e2)?;
    if !metrics.has_schedule() {
        return Err(ModelError::MissingSchedule);
    }
    for (factor, e, p) in [("e1·P1", e1, metrics.p1), ("e2·P2", e2, metrics.p2)] {
        if e * p >= 1.0 {
            return Err(ModelError::ParallelismThresholdExceeded {
                factor,
                product: e * p,
            });
        }
    }
    let m = metrics.m as f64;
    let ln = k_ln1m(m, e1, metrics.p1) + k_ln1m(m, e2, metrics.p2);
    let inputs = ModelInputs::Cyclic {
        m: metrics.m,
        p1: metrics.p1,
        p2: metrics.p2,
        e1,
        e2,
    };
    Ok(FidelityEstimate::new(ln, ModelKind::Cyclic, inputs))
}

pub fn coupling_fidelity(
    n1: usize,
    n2: usize,
    ec1: f64,
    ec2: f64,
    c1: f64,
    c2: f64,
) -> Result<FidelityEstimate, ModelError> {
    unit("ec1", ec1)?;
    unit("ec2", ec2)?;
    for (name, c) in [("C1", c1), ("C2", c2)] {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(ModelError::OutOfRange { name, value: c });
        }
    }
    for (factor, e, c) in [("ec1·C1", ec1, c1), ("ec2·C2", ec2, c2)] {
        if e * c >= 1.0 {
            return Err(ModelError::ParallelismThresholdExceeded {
                factor,
                product: e * c,
            });
        }
    }
    let ln = k_ln1m(n1 as f64, ec1, c1) + k_ln1m(n2 as f64, ec2, c2);
    Ok(FidelityEstimate::new(
        ln,
        ModelKind::Coupling,
        ModelInputs::Coupling {
            n1,
            n2,
            ec1,
            ec2,
            c1,
            c2,
        },
    ))
}

/// `π = F_A - F_B`; positive means A wins.
pub fn objective(a: &FidelityEstimate, b: &FidelityEstimate) -> Result<f64, ModelError> {
    if a.model != b.model {
        return Err(ModelError::ModelMismatch {
            a: a.model,
            b: b.model,
        });
    }
    Ok(a.value - b.value)
}
