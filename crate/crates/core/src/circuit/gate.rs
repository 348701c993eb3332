use std::fmt;

use super::CircuitError;

/// Gate identifiers understood by the IR.
///
/// The set covers the single-qubit rotations that appear in benchmark bodies,
/// the entangling gates of current hardware (CNOT, ECR, CZ, ZZ, XX, Sycamore,
/// sqrt(iSWAP)) and the theorized B, CNOT^(1/4) and CNOT^(1/8) gates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    U3,
    U2,
    U1,
    Rz,
    Rx,
    Ry,
    Sx,
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    Id,
    Cx,
    Cz,
    Swap,
    Rzz,
    Rxx,
    ISwap,
    SqrtISwap,
    Ecr,
    Syc,
    FSim,
    B,
    Cx4rt,
    Cx8rt,
}

impl GateKind {
    pub const ALL: [GateKind; 29] = [
        GateKind::U3,
        GateKind::U2,
        GateKind::U1,
        GateKind::Rz,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Sx,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::H,
        GateKind::S,
        GateKind::Sdg,
        GateKind::T,
        GateKind::Tdg,
        GateKind::Id,
        GateKind::Cx,
        GateKind::Cz,
        GateKind::Swap,
        GateKind::Rzz,
        GateKind::Rxx,
        GateKind::ISwap,
        GateKind::SqrtISwap,
        GateKind::Ecr,
        GateKind::Syc,
        GateKind::FSim,
        GateKind::B,
        GateKind::Cx4rt,
        GateKind::Cx8rt,
    ];

    pub fn arity(self) -> usize {
        use GateKind::*;
        match self {
            U3 | U2 | U1 | Rz | Rx | Ry | Sx | X | Y | Z | H | S | Sdg | T | Tdg | Id => 1,
            _ => 2,
        }
    }

    pub fn param_count(self) -> usize {
        use GateKind::*;
        match self {
            U3 => 3,
            U2 | FSim => 2,
            U1 | Rz | Rx | Ry | Rzz | Rxx => 1,
            _ => 0,
        }
    }

    /// Lower-case OpenQASM 2.0 spelling.
    pub fn qasm_name(self) -> &'static str {
        use GateKind::*;
        match self {
            U3 => "u3",
            U2 => "u2",
            U1 => "u1",
            Rz => "rz",
            Rx => "rx",
            Ry => "ry",
            Sx => "sx",
            X => "x",
            Y => "y",
            Z => "z",
            H => "h",
            S => "s",
            Sdg => "sdg",
            T => "t",
            Tdg => "tdg",
            Id => "id",
            Cx => "cx",
            Cz => "cz",
            Swap => "swap",
            Rzz => "rzz",
            Rxx => "rxx",
            ISwap => "iswap",
            SqrtISwap => "siswap",
            Ecr => "ecr",
            Syc => "syc",
            FSim => "fsim",
            B => "b",
            Cx4rt => "cx_4rt",
            Cx8rt => "cx_8rt",
        }
    }

    /// Name used in count tables and reports.
    pub fn label(self) -> &'static str {
        use GateKind::*;
        match self {
            U3 => "U3",
            U2 => "U2",
            U1 => "U1",
            Rz => "RZ",
            Rx => "RX",
            Ry => "RY",
            Sx => "SX",
            X => "X",
            Y => "Y",
            Z => "Z",
            H => "H",
            S => "S",
            Sdg => "SDG",
            T => "T",
            Tdg => "TDG",
            Id => "ID",
            Cx => "CNOT",
            Cz => "CZ",
            Swap => "SWAP",
            Rzz => "ZZ",
            Rxx => "XX",
            ISwap => "ISWAP",
            SqrtISwap => "SQRT_ISWAP",
            Ecr => "ECR",
            Syc => "SYC",
            FSim => "FSIM",
            B => "B",
            Cx4rt => "CNOT_4RT",
            Cx8rt => "CNOT_8RT",
        }
    }

    pub fn from_qasm_name(name: &str) -> Option<GateKind> {
        match name {
            "p" => return Some(GateKind::U1),
            "cnot" | "CX" => return Some(GateKind::Cx),
            "u" | "U" => return Some(GateKind::U3),
            "sqrt_iswap" => return Some(GateKind::SqrtISwap),
            _ => {}
        }
        GateKind::ALL
            .iter()
            .copied()
            .find(|k| k.qasm_name() == name)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One gate application. Construction checks operand count, distinctness and
/// parameter arity; bounds against a circuit width are checked by [`super::Circuit`].
#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    kind: GateKind,
    qubits: Vec<usize>,
    params: Vec<f64>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>, params: Vec<f64>) -> Result<Self, CircuitError> {
        if qubits.len() != kind.arity() {
            return Err(CircuitError::OperandCount {
                gate: kind.label(),
                expected: kind.arity(),
                found: qubits.len(),
            });
        }
        if kind.arity() == 2 && qubits[0] == qubits[1] {
            return Err(CircuitError::RepeatedQubit {
                gate: kind.label(),
                qubit: qubits[0],
            });
        }
        if params.len() != kind.param_count() {
            return Err(CircuitError::ParamCount {
                gate: kind.label(),
                expected: kind.param_count(),
                found: params.len(),
            });
        }
        if let Some(p) = params.iter().find(|p| !p.is_finite()) {
            return Err(CircuitError::NonFiniteParam {
                gate: kind.label(),
                value: *p,
            });
        }
        Ok(Gate {
            kind,
            qubits,
            params,
        })
    }

    pub fn one(kind: GateKind, q: usize) -> Self {
        Gate::new(kind, vec![q], vec![]).expect("fixed single-qubit gate")
    }

    pub fn two(kind: GateKind, a: usize, b: usize) -> Self {
        Gate::new(kind, vec![a, b], vec![]).expect("fixed two-qubit gate on distinct qubits")
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Gate::two(GateKind::Cx, control, target)
    }

    pub fn u3(q: usize, theta: f64, phi: f64, lambda: f64) -> Self {
        Gate::new(GateKind::U3, vec![q], vec![theta, phi, lambda]).expect("u3 with finite angles")
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn arity(&self) -> usize {
        self.qubits.len()
    }

    pub fn acts_on(&self, q: usize) -> bool {
        self.qubits.contains(&q)
    }

    /// Same gate with operands renamed through `map`.
    pub fn remapped(&self, map: impl Fn(usize) -> usize) -> Gate {
        Gate {
            kind: self.kind,
            qubits: self.qubits.iter().map(|&q| map(q)).collect(),
            params: self.params.clone(),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.label())?;
        if !self.params.is_empty() {
            let ps: Vec<String> = self.params.iter().map(|p| p.to_string()).collect();
            write!(f, "({})", ps.join(","))?;
        }
        let qs: Vec<String> = self.qubits.iter().map(|q| q.to_string()).collect();
        write!(f, " {}", qs.join(","))
    }
}
