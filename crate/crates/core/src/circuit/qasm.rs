//! OpenQASM 2.0 subset reader and writer.
//!
//! Accepted: a single `qreg`, any number of `creg`s, gate applications from
//! the supported set (with constant parameter expressions), `opaque`
//! declarations, `barrier` and `measure` (both dropped). Custom `gate`
//! bodies are skipped; using a gate that is not in the supported set is an
//! error. Classical control (`if`) and `reset` are rejected.

use std::fmt::Write as _;

use thiserror::Error;

use super::{Circuit, CircuitError, Gate, GateKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QasmError {
    #[error("line {line}: syntax error: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unsupported gate `{name}`")]
    UnsupportedGate { line: usize, name: String },
    #[error("line {line}: unsupported statement: {what}")]
    Unsupported { line: usize, what: String },
    #[error("line {line}: qubit index {index} out of range for register of size {size}")]
    QubitOutOfRange {
        line: usize,
        index: usize,
        size: usize,
    },
    #[error("line {line}: unknown register `{name}`")]
    UnknownRegister { line: usize, name: String },
    #[error("line {line}: {source}")]
    Gate { line: usize, source: CircuitError },
    #[error("program declares no quantum register")]
    NoRegister,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    Int(usize),
    Str(String),
    Sym(&'static str),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, QasmError> {
    const SYMS: [&str; 14] = [
        "->", "==", ";", ",", "(", ")", "[", "]", "{", "}", "+", "-", "*", "/",
    ];
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1;
    'outer: while i < bytes.len() {
        let c = bytes[i] as char;
        if c == '\n' {
            line += 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if text[i..].starts_with("//") {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if c == '^' {
            out.push(Token {
                tok: Tok::Sym("^"),
                line,
            });
            i += 1;
            continue;
        }
        for s in SYMS {
            if text[i..].starts_with(s) {
                out.push(Token {
                    tok: Tok::Sym(s),
                    line,
                });
                i += s.len();
                continue 'outer;
            }
        }
        if c == '"' {
            let start = i + 1;
            let end =
                text[start..]
                    .find('"')
                    .map(|e| start + e)
                    .ok_or_else(|| QasmError::Syntax {
                        line,
                        message: "unterminated string".into(),
                    })?;
            out.push(Token {
                tok: Tok::Str(text[start..end].to_string()),
                line,
            });
            i = end + 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len()
                && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
            {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(text[start..i].to_string()),
                line,
            });
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            let mut is_real = false;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                is_real |= bytes[i] == b'.';
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                    is_real = true;
                }
            }
            let lit = &text[start..i];
            let tok = if is_real {
                Tok::Num(lit.parse().map_err(|_| QasmError::Syntax {
                    line,
                    message: format!("bad number `{lit}`"),
                })?)
            } else {
                Tok::Int(lit.parse().map_err(|_| QasmError::Syntax {
                    line,
                    message: format!("bad integer `{lit}`"),
                })?)
            };
            out.push(Token { tok, line });
            continue;
        }
        return Err(QasmError::Syntax {
            line,
            message: format!("unexpected character `{c}`"),
        });
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    last_line: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|t| t.line)
            .unwrap_or(self.last_line)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if let Some(t) = &t {
            self.last_line = t.line;
            self.pos += 1;
        }
        t.map(|t| t.tok)
    }

    fn err(&self, message: impl Into<String>) -> QasmError {
        QasmError::Syntax {
            line: self.line(),
            message: message.into(),
        }
    }

    fn expect_sym(&mut self, s: &'static str) -> Result<(), QasmError> {
        match self.peek() {
            Some(Tok::Sym(x)) if *x == s => {
                self.next();
                Ok(())
            }
            other => Err(self.err(format!("expected `{s}`, found {}", describe(other)))),
        }
    }

    fn eat_sym(&mut self, s: &'static str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(x)) if *x == s) {
            self.next();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String, QasmError> {
        match self.next() {
            Some(Tok::Ident(s)) => Ok(s),
            other => {
                self.pos = self.pos.saturating_sub(usize::from(other.is_some()));
                Err(self.err(format!(
                    "expected identifier, found {}",
                    describe(other.as_ref())
                )))
            }
        }
    }

    fn int(&mut self) -> Result<usize, QasmError> {
        match self.next() {
            Some(Tok::Int(n)) => Ok(n),
            other => {
                self.pos = self.pos.saturating_sub(usize::from(other.is_some()));
                Err(self.err(format!(
                    "expected integer, found {}",
                    describe(other.as_ref())
                )))
            }
        }
    }

    fn skip_statement(&mut self) -> Result<(), QasmError> {
        loop {
            match self.next() {
                Some(Tok::Sym(";")) => return Ok(()),
                Some(_) => {}
                None => return Err(self.err("unexpected end of input, missing `;`")),
            }
        }
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> Result<f64, QasmError> {
        let mut v = self.term()?;
        loop {
            if self.eat_sym("+") {
                v += self.term()?;
            } else if self.eat_sym("-") {
                v -= self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<f64, QasmError> {
        let mut v = self.unary()?;
        loop {
            if self.eat_sym("*") {
                v *= self.unary()?;
            } else if self.eat_sym("/") {
                v /= self.unary()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn unary(&mut self) -> Result<f64, QasmError> {
        if self.eat_sym("-") {
            return Ok(-self.unary()?);
        }
        if self.eat_sym("+") {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<f64, QasmError> {
        let base = self.primary()?;
        if self.eat_sym("^") {
            let exp = self.unary()?;
            return Ok(base.powf(exp));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<f64, QasmError> {
        let line = self.line();
        match self.next() {
            Some(Tok::Num(x)) => Ok(x),
            Some(Tok::Int(n)) => Ok(n as f64),
            Some(Tok::Sym("(")) => {
                let v = self.expr()?;
                self.expect_sym(")")?;
                Ok(v)
            }
            Some(Tok::Ident(name)) => {
                if name == "pi" {
                    return Ok(std::f64::consts::PI);
                }
                let f: fn(f64) -> f64 = match name.as_str() {
                    "sin" => f64::sin,
                    "cos" => f64::cos,
                    "tan" => f64::tan,
                    "exp" => f64::exp,
                    "ln" => f64::ln,
                    "sqrt" => f64::sqrt,
                    _ => {
                        return Err(QasmError::Syntax {
                            line,
                            message: format!("unknown identifier `{name}` in expression"),
                        })
                    }
                };
                self.expect_sym("(")?;
                let v = self.expr()?;
                self.expect_sym(")")?;
                Ok(f(v))
            }
            other => Err(QasmError::Syntax {
                line,
                message: format!("expected expression, found {}", describe(other.as_ref())),
            }),
        }
    }
}

fn describe(t: Option<&Tok>) -> String {
    match t {
        None => "end of input".into(),
        Some(Tok::Ident(s)) => format!("`{s}`"),
        Some(Tok::Num(x)) => format!("`{x}`"),
        Some(Tok::Int(n)) => format!("`{n}`"),
        Some(Tok::Str(s)) => format!("\"{s}\""),
        Some(Tok::Sym(s)) => format!("`{s}`"),
    }
}

/// Operand of a gate application: a single qubit or a whole register.
enum Operand {
    Qubit(usize),
    Register,
}

/// Parses the supported OpenQASM 2.0 subset into a [`Circuit`].
pub fn parse_qasm(text: &str) -> Result<Circuit, QasmError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        last_line: 1,
    };
    let mut qreg: Option<(String, usize)> = None;
    let mut cregs: Vec<String> = Vec::new();
    let mut circuit: Option<Circuit> = None;

    while let Some(tok) = p.peek().cloned() {
        let line = p.line();
        let word = match tok {
            Tok::Ident(w) => w,
            other => {
                return Err(p.err(format!(
                    "expected statement, found {}",
                    describe(Some(&other))
                )))
            }
        };
        match word.as_str() {
            "OPENQASM" => {
                p.next();
                match p.next() {
                    Some(Tok::Num(v)) if (2.0..3.0).contains(&v) => {}
                    Some(Tok::Int(2)) => {}
                    _ => {
                        return Err(QasmError::Unsupported {
                            line,
                            what: "only OPENQASM 2.x is supported".into(),
                        })
                    }
                }
                p.expect_sym(";")?;
            }
            "include" => {
                p.next();
                match p.next() {
                    Some(Tok::Str(_)) => {}
                    other => {
                        return Err(p.err(format!(
                            "expected file name, found {}",
                            describe(other.as_ref())
                        )))
                    }
                }
                p.expect_sym(";")?;
            }
            "qreg" => {
                p.next();
                let name = p.ident()?;
                p.expect_sym("[")?;
                let size = p.int()?;
                p.expect_sym("]")?;
                p.expect_sym(";")?;
                if qreg.is_some() {
                    return Err(QasmError::Unsupported {
                        line,
                        what: "more than one quantum register".into(),
                    });
                }
                circuit = Some(Circuit::new(size));
                qreg = Some((name, size));
            }
            "creg" => {
                p.next();
                let name = p.ident()?;
                p.expect_sym("[")?;
                p.int()?;
                p.expect_sym("]")?;
                p.expect_sym(";")?;
                cregs.push(name);
            }
            "barrier" | "measure" => {
                p.next();
                p.skip_statement()?;
            }
            "opaque" => {
                p.next();
                let name = p.ident()?;
                if GateKind::from_qasm_name(&name).is_none() {
                    return Err(QasmError::UnsupportedGate { line, name });
                }
                p.skip_statement()?;
            }
            "gate" => {
                p.next();
                p.ident()?;
                let mut depth = 0usize;
                loop {
                    match p.next() {
                        Some(Tok::Sym("{")) => depth += 1,
                        Some(Tok::Sym("}")) => {
                            depth = depth.saturating_sub(1);
                            if depth == 0 {
                                break;
                            }
                        }
                        Some(_) => {}
                        None => return Err(p.err("unterminated gate definition")),
                    }
                }
            }
            "if" => {
                return Err(QasmError::Unsupported {
                    line,
                    what: "classical control (`if`)".into(),
                })
            }
            "reset" => {
                return Err(QasmError::Unsupported {
                    line,
                    what: "`reset`".into(),
                })
            }
            _ => {
                p.next();
                let kind =
                    GateKind::from_qasm_name(&word).ok_or_else(|| QasmError::UnsupportedGate {
                        line,
                        name: word.clone(),
                    })?;
                let mut params = Vec::new();
                if p.eat_sym("(") && !p.eat_sym(")") {
                    loop {
                        params.push(p.expr()?);
                        if p.eat_sym(")") {
                            break;
                        }
                        p.expect_sym(",")?;
                    }
                }
                let (reg_name, size) = qreg.clone().ok_or(QasmError::NoRegister)?;
                let mut operands = Vec::new();
                loop {
                    let arg_line = p.line();
                    let name = p.ident()?;
                    if name != reg_name {
                        return Err(if cregs.contains(&name) {
                            QasmError::Syntax {
                                line: arg_line,
                                message: format!("`{name}` is a classical register"),
                            }
                        } else {
                            QasmError::UnknownRegister {
                                line: arg_line,
                                name,
                            }
                        });
                    }
                    if p.eat_sym("[") {
                        let idx = p.int()?;
                        p.expect_sym("]")?;
                        if idx >= size {
                            return Err(QasmError::QubitOutOfRange {
                                line: arg_line,
                                index: idx,
                                size,
                            });
                        }
                        operands.push(Operand::Qubit(idx));
                    } else {
                        operands.push(Operand::Register);
                    }
                    if p.eat_sym(";") {
                        break;
                    }
                    p.expect_sym(",")?;
                }
                let c = circuit.as_mut().ok_or(QasmError::NoRegister)?;
                let gate_err = |source| QasmError::Gate { line, source };
                match operands.as_slice() {
                    [Operand::Register] if kind.arity() == 1 => {
                        for q in 0..size {
                            let g = Gate::new(kind, vec![q], params.clone()).map_err(gate_err)?;
                            c.push(g).map_err(gate_err)?;
                        }
                    }
                    ops if ops.iter().all(|o| matches!(o, Operand::Qubit(_))) => {
                        let qs = ops
                            .iter()
                            .map(|o| match o {
                                Operand::Qubit(q) => *q,
                                Operand::Register => unreachable!(),
                            })
                            .collect();
                        let g = Gate::new(kind, qs, params).map_err(gate_err)?;
                        c.push(g).map_err(gate_err)?;
                    }
                    _ => {
                        return Err(QasmError::Unsupported {
                            line,
                            what: "register broadcast is only supported for single-qubit gates"
                                .into(),
                        })
                    }
                }
            }
        }
    }
    circuit.ok_or(QasmError::NoRegister)
}

/// Writes `circuit` as OpenQASM 2.0. Angles use the shortest representation
/// that parses back to the same `f64`.
pub fn to_qasm(circuit: &Circuit) -> String {
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let mut opaque: Vec<GateKind> = circuit
        .gates()
        .iter()
        .map(|g| g.kind())
        .filter(|k| {
            matches!(
                k,
                GateKind::Syc
                    | GateKind::FSim
                    | GateKind::B
                    | GateKind::Cx4rt
                    | GateKind::Cx8rt
                    | GateKind::SqrtISwap
                    | GateKind::ISwap
                    | GateKind::Ecr
            )
        })
        .collect();
    opaque.sort();
    opaque.dedup();
    for k in opaque {
        let params = match k.param_count() {
            0 => String::new(),
            2 => "(theta,phi)".to_string(),
            _ => "(theta)".to_string(),
        };
        let _ = writeln!(out, "opaque {}{} a,b;", k.qasm_name(), params);
    }
    let _ = writeln!(out, "qreg q[{}];", circuit.width());
    for g in circuit.gates() {
        out.push_str(g.kind().qasm_name());
        if !g.params().is_empty() {
            let ps: Vec<String> = g.params().iter().map(|p| format!("{p:?}")).collect();
            let _ = write!(out, "({})", ps.join(","));
        }
        let qs: Vec<String> = g.qubits().iter().map(|q| format!("q[{q}]")).collect();
        let _ = writeln!(out, " {};", qs.join(","));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn single_cnot_program() {
        let c = parse_qasm("qreg q[2]; cx q[0],q[1];").unwrap();
        assert_eq!(c, Circuit::from_gates(2, vec![Gate::cx(0, 1)]).unwrap());
    }

    #[test]
    fn identity_u3() {
        let c = parse_qasm("qreg q[1]; u3(0,0,0) q[0];").unwrap();
        assert_eq!(c.width(), 1);
        assert_eq!(c.gates(), &[Gate::u3(0, 0.0, 0.0, 0.0)]);
    }

    #[test]
    fn full_header_and_expressions() {
        let src = r#"OPENQASM 2.0;
include "qelib1.inc";
opaque syc a,b;
qreg q[3];
creg c[3];
u3(pi/2, -pi/4, 2*pi^2 - 1e-3) q[0];
rz(-(pi)) q[1];
syc q[1],q[2];
barrier q;
h q;
measure q[0] -> c[0];
"#;
        let c = parse_qasm(src).unwrap();
        assert_eq!(c.len(), 6);
        let p = c.gates()[0].params();
        assert!((p[0] - PI / 2.0).abs() < 1e-15);
        assert!((p[1] + PI / 4.0).abs() < 1e-15);
        assert!((p[2] - (2.0 * PI * PI - 1e-3)).abs() < 1e-12);
        assert_eq!(c.gates()[1].params(), &[-PI]);
        assert_eq!(c.gates()[2].kind(), GateKind::Syc);
        assert!(c.gates()[3..].iter().all(|g| g.kind() == GateKind::H));
    }

    #[test]
    fn error_cases_report_lines() {
        let e = parse_qasm("qreg q[2];\ncx q[0],q[2];").unwrap_err();
        assert_eq!(
            e,
            QasmError::QubitOutOfRange {
                line: 2,
                index: 2,
                size: 2
            }
        );
        let e = parse_qasm("qreg q[2];\n\nccx q[0],q[1],q[1];").unwrap_err();
        assert_eq!(
            e,
            QasmError::UnsupportedGate {
                line: 3,
                name: "ccx".into()
            }
        );
        let e = parse_qasm("qreg q[2];\ncx q[0] q[1];").unwrap_err();
        assert!(matches!(e, QasmError::Syntax { line: 2, .. }), "{e:?}");
        let e = parse_qasm("qreg q[1];\ncreg c[1];\nif (c==1) x q[0];").unwrap_err();
        assert!(matches!(e, QasmError::Unsupported { line: 3, .. }));
        assert!(matches!(
            parse_qasm("qreg a[1]; qreg b[1];"),
            Err(QasmError::Unsupported { .. })
        ));
        assert_eq!(parse_qasm("OPENQASM 2.0;"), Err(QasmError::NoRegister));
        assert!(matches!(
            parse_qasm("qreg q[2]; cx q[0],q[0];"),
            Err(QasmError::Gate { line: 1, .. })
        ));
    }

    #[test]
    fn custom_gate_bodies_are_skipped() {
        let src = "gate foo a { h a; }\nqreg q[1];\nh q[0];\n";
        assert_eq!(parse_qasm(src).unwrap().len(), 1);
        assert!(matches!(
            parse_qasm("gate foo a { h a; }\nqreg q[1];\nfoo q[0];"),
            Err(QasmError::UnsupportedGate { line: 3, .. })
        ));
    }

    #[test]
    fn writer_output_reparses() {
        let c = Circuit::from_gates(
            3,
            vec![
                Gate::u3(0, 0.1, -2.5e-7, PI),
                Gate::cx(0, 2),
                Gate::new(GateKind::FSim, vec![1, 2], vec![PI / 2.0, PI / 6.0]).unwrap(),
                Gate::two(GateKind::B, 2, 0),
            ],
        )
        .unwrap();
        assert_eq!(parse_qasm(&to_qasm(&c)).unwrap(), c);
    }
}
