//! The textual circuit format: whitespace-separated mnemonics, one
//! operation per line.
//!
//! ```text
//! QUBITS 2        # optional header fixing the register width
//! H 0
//! T 0
//! H 0
//! CNOT 0 1        # control first, target second
//! ```
//!
//! Mnemonics are case-insensitive; `#` starts a comment anywhere on a
//! line. Without a header the register width is one past the largest qubit
//! index used. Angles accept plain decimal literals and pi-scaled forms
//! (`pi`, `-pi/2`, `3*pi/4`, `0.5*pi`). A negative exponent in `R n -k` or
//! `U c t -k` selects the inverse phase gate. `BARRIER` inserts a
//! structural marker with no numerical effect. The conventional file
//! extension is `.jq`; both LF and CRLF line endings are accepted.

use crate::circuit::{Circuit, GateOp, Instruction};
use crate::gates::GateKind;
use std::f64::consts::PI;
use thiserror::Error;

/// A syntax or validation error, fail-fast at the first offending token.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}, column {column}: {message} (found {token:?})")]
pub struct ParseError {
    /// 1-based source line.
    pub line: usize,
    /// 1-based character column of the offending token.
    pub column: usize,
    /// What was expected instead.
    pub message: String,
    /// The offending token, empty when something was missing.
    pub token: String,
}

/// Errors raised when a circuit cannot be rendered as text.
#[derive(Debug, Error)]
pub enum SerializeError {
    #[error("op {index} ({name}) has no textual form")]
    UnsupportedGate { index: usize, name: String },
}

fn err(line: usize, column: usize, message: impl Into<String>, token: &str) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
        token: token.to_string(),
    }
}

/// One token with its 1-based column.
struct Token<'a> {
    column: usize,
    text: &'a str,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let body = match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    };
    let mut tokens = Vec::new();
    let mut start = None;
    for (i, ch) in body.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                tokens.push(Token {
                    column: s + 1,
                    text: &body[s..i],
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        tokens.push(Token {
            column: s + 1,
            text: &body[s..],
        });
    }
    tokens
}

/// Parses an angle token: a decimal literal or a pi-scaled form
/// `[sign][coef*]pi[/divisor]`.
fn parse_angle_token(text: &str) -> Option<f64> {
    if let Ok(v) = text.parse::<f64>() {
        return Some(v);
    }
    let lower = text.to_ascii_lowercase();
    let (sign, rest) = match lower.strip_prefix('-') {
        Some(r) => (-1.0, r),
        None => (1.0, lower.strip_prefix('+').unwrap_or(lower.as_str())),
    };
    let (head, tail) = rest.split_once("pi")?;
    let coef = if head.is_empty() {
        1.0
    } else {
        let c = head.strip_suffix('*')?;
        c.parse::<f64>().ok().filter(|v| v.is_finite() && *v >= 0.0)?
    };
    let divisor = if tail.is_empty() {
        1.0
    } else {
        let d = tail.strip_prefix('/')?;
        d.parse::<f64>().ok().filter(|v| v.is_finite() && *v > 0.0)?
    };
    Some(sign * coef * PI / divisor)
}

struct LineParser<'a> {
    line_no: usize,
    line_len: usize,
    tokens: Vec<Token<'a>>,
    next: usize,
    declared_width: Option<usize>,
}

impl<'a> LineParser<'a> {
    fn take(&mut self, expected: &str) -> Result<&Token<'a>, ParseError> {
        if self.next >= self.tokens.len() {
            return Err(err(
                self.line_no,
                self.line_len + 1,
                format!("expected {expected}"),
                "",
            ));
        }
        self.next += 1;
        Ok(&self.tokens[self.next - 1])
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.next < self.tokens.len() {
            let tok = &self.tokens[self.next];
            return Err(err(
                self.line_no,
                tok.column,
                "unexpected extra argument",
                tok.text,
            ));
        }
        Ok(())
    }

    fn qubit(&mut self) -> Result<(usize, usize), ParseError> {
        let line_no = self.line_no;
        let tok = self.take("qubit index")?;
        let (column, text) = (tok.column, tok.text);
        let q: usize = text
            .parse()
            .map_err(|_| err(line_no, column, "expected qubit index", text))?;
        if let Some(n) = self.declared_width {
            if q >= n {
                return Err(err(
                    line_no,
                    column,
                    format!("qubit index exceeds declared register width {n}"),
                    text,
                ));
            }
        }
        Ok((q, column))
    }

    /// Distinct qubit indices for a multi-qubit gate.
    fn qubits<const K: usize>(&mut self) -> Result<[usize; K], ParseError> {
        let mut out = [0usize; K];
        for i in 0..K {
            let (q, column) = self.qubit()?;
            if out[..i].contains(&q) {
                return Err(err(
                    self.line_no,
                    column,
                    "duplicate qubit index",
                    &q.to_string(),
                ));
            }
            out[i] = q;
        }
        Ok(out)
    }

    /// A phase exponent, where a leading '-' selects the inverse gate.
    fn exponent(&mut self) -> Result<(u32, bool), ParseError> {
        let line_no = self.line_no;
        let tok = self.take("integer exponent")?;
        let (column, text) = (tok.column, tok.text);
        let (dagger, digits) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text),
        };
        let k: u32 = digits
            .parse()
            .map_err(|_| err(line_no, column, "expected integer exponent", text))?;
        Ok((k, dagger))
    }

    fn angle(&mut self) -> Result<f64, ParseError> {
        let line_no = self.line_no;
        let tok = self.take("angle")?;
        let (column, text) = (tok.column, tok.text);
        parse_angle_token(text)
            .ok_or_else(|| err(line_no, column, "expected angle (decimal or pi form)", text))
    }
}

/// Parses a textual circuit into its structural form.
pub fn parse_circuit(source: &str) -> Result<Circuit, ParseError> {
    let mut declared_width: Option<usize> = None;
    let mut ops: Vec<Instruction> = Vec::new();
    let mut max_index = 0usize;
    let mut any_gate = false;

    for (i, raw_line) in source.lines().enumerate() {
        let line_no = i + 1;
        let tokens = tokenize(raw_line);
        if tokens.is_empty() {
            continue;
        }
        let mnemonic_col = tokens[0].column;
        let mnemonic = tokens[0].text.to_ascii_uppercase();
        let mut p = LineParser {
            line_no,
            line_len: raw_line.len(),
            tokens,
            next: 1,
            declared_width,
        };

        if mnemonic == "QUBITS" {
            if declared_width.is_some() || !ops.is_empty() {
                return Err(err(
                    line_no,
                    mnemonic_col,
                    "QUBITS header must be the first statement",
                    "QUBITS",
                ));
            }
            let tok = p.take("register width")?;
            let (column, text) = (tok.column, tok.text);
            let n: usize = text
                .parse()
                .map_err(|_| err(line_no, column, "expected register width", text))?;
            if n == 0 {
                return Err(err(line_no, column, "register width must be at least 1", text));
            }
            p.finish()?;
            declared_width = Some(n);
            continue;
        }

        let instruction = match mnemonic.as_str() {
            "BARRIER" => Instruction::Barrier,
            "I" | "H" | "X" | "Y" | "Z" | "S" | "S+" | "T" | "T+" | "+X" | "-X" | "+Y"
            | "-Y" => {
                let kind = match mnemonic.as_str() {
                    "I" => GateKind::I,
                    "H" => GateKind::H,
                    "X" => GateKind::X,
                    "Y" => GateKind::Y,
                    "Z" => GateKind::Z,
                    "S" => GateKind::S,
                    "S+" => GateKind::Sdg,
                    "T" => GateKind::T,
                    "T+" => GateKind::Tdg,
                    "+X" => GateKind::PlusX,
                    "-X" => GateKind::MinusX,
                    "+Y" => GateKind::PlusY,
                    _ => GateKind::MinusY,
                };
                let (q, _) = p.qubit()?;
                max_index = max_index.max(q);
                any_gate = true;
                Instruction::Gate(GateOp {
                    kind,
                    qubits: vec![q],
                })
            }
            "R" => {
                let (q, _) = p.qubit()?;
                let (k, dagger) = p.exponent()?;
                max_index = max_index.max(q);
                any_gate = true;
                Instruction::Gate(GateOp {
                    kind: if dagger { GateKind::Rkdg(k) } else { GateKind::Rk(k) },
                    qubits: vec![q],
                })
            }
            "U" => {
                let [control, target] = p.qubits::<2>()?;
                let (k, dagger) = p.exponent()?;
                max_index = max_index.max(control).max(target);
                any_gate = true;
                Instruction::Gate(GateOp {
                    kind: if dagger { GateKind::CUkdg(k) } else { GateKind::CUk(k) },
                    qubits: vec![control, target],
                })
            }
            "U1" => {
                let (q, _) = p.qubit()?;
                let lambda = p.angle()?;
                max_index = max_index.max(q);
                any_gate = true;
                Instruction::Gate(GateOp {
                    kind: GateKind::U1(lambda),
                    qubits: vec![q],
                })
            }
            "U2" => {
                let (q, _) = p.qubit()?;
                let phi = p.angle()?;
                let lambda = p.angle()?;
                max_index = max_index.max(q);
                any_gate = true;
                Instruction::Gate(GateOp {
                    kind: GateKind::U2(phi, lambda),
                    qubits: vec![q],
                })
            }
            "U3" => {
                let (q, _) = p.qubit()?;
                let theta = p.angle()?;
                let phi = p.angle()?;
                let lambda = p.angle()?;
                max_index = max_index.max(q);
                any_gate = true;
                Instruction::Gate(GateOp {
                    kind: GateKind::U3(theta, phi, lambda),
                    qubits: vec![q],
                })
            }
            "CNOT" => {
                let [control, target] = p.qubits::<2>()?;
                max_index = max_index.max(control).max(target);
                any_gate = true;
                Instruction::Gate(GateOp {
                    kind: GateKind::Cnot,
                    qubits: vec![control, target],
                })
            }
            "TOFFOLI" => {
                let [c1, c2, target] = p.qubits::<3>()?;
                max_index = max_index.max(c1).max(c2).max(target);
                any_gate = true;
                Instruction::Gate(GateOp {
                    kind: GateKind::Toffoli,
                    qubits: vec![c1, c2, target],
                })
            }
            _ => {
                return Err(err(
                    line_no,
                    mnemonic_col,
                    "unknown mnemonic",
                    p.tokens[0].text,
                ));
            }
        };
        p.finish()?;
        ops.push(instruction);
    }

    let num_qubits = declared_width.unwrap_or(if any_gate { max_index + 1 } else { 1 });
    let mut circuit = Circuit::new(num_qubits);
    circuit.ops = ops;
    Ok(circuit)
}

fn format_angle(x: f64) -> String {
    format!("{x:.16e}")
}

/// Renders a circuit in the textual format, header included.
///
/// Only gates with a mnemonic are expressible; anything else (custom
/// matrices, native rotations, controlled phases outside the `U k` family)
/// is rejected with the index of the offending op.
pub fn serialize_circuit(circuit: &Circuit) -> Result<String, SerializeError> {
    let mut out = format!("QUBITS {}\n", circuit.num_qubits);
    for (index, op) in circuit.ops.iter().enumerate() {
        let gate = match op {
            Instruction::Barrier => {
                out.push_str("BARRIER\n");
                continue;
            }
            Instruction::Gate(g) => g,
        };
        let q = &gate.qubits;
        let line = match &gate.kind {
            GateKind::I => format!("I {}", q[0]),
            GateKind::H => format!("H {}", q[0]),
            GateKind::X => format!("X {}", q[0]),
            GateKind::Y => format!("Y {}", q[0]),
            GateKind::Z => format!("Z {}", q[0]),
            GateKind::S => format!("S {}", q[0]),
            GateKind::Sdg => format!("S+ {}", q[0]),
            GateKind::T => format!("T {}", q[0]),
            GateKind::Tdg => format!("T+ {}", q[0]),
            GateKind::PlusX => format!("+X {}", q[0]),
            GateKind::MinusX => format!("-X {}", q[0]),
            GateKind::PlusY => format!("+Y {}", q[0]),
            GateKind::MinusY => format!("-Y {}", q[0]),
            GateKind::U1(l) => format!("U1 {} {}", q[0], format_angle(*l)),
            GateKind::U2(p, l) => {
                format!("U2 {} {} {}", q[0], format_angle(*p), format_angle(*l))
            }
            GateKind::U3(t, p, l) => format!(
                "U3 {} {} {} {}",
                q[0],
                format_angle(*t),
                format_angle(*p),
                format_angle(*l)
            ),
            GateKind::Rk(k) => format!("R {} {}", q[0], k),
            GateKind::Rkdg(k) => format!("R {} -{}", q[0], k),
            GateKind::Cnot => format!("CNOT {} {}", q[0], q[1]),
            GateKind::CUk(k) => format!("U {} {} {}", q[0], q[1], k),
            GateKind::CUkdg(k) => format!("U {} {} -{}", q[0], q[1], k),
            GateKind::Toffoli => format!("TOFFOLI {} {} {}", q[0], q[1], q[2]),
            other => {
                return Err(SerializeError::UnsupportedGate {
                    index,
                    name: format!("{other:?}"),
                })
            }
        };
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}
