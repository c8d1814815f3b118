//! Line-oriented circuit listing.
//!
//! ```text
//! WIDTH 3
//! MEASURE 0 2
//! ANCILLA 0
//! H 2
//! CNOT 2 1
//! MCX 2 !1 0
//! RY 0 0.9272952180016122
//! FREDKIN 2 1 0
//! ```
//!
//! Gate lines are `KIND qubits... [angle]`. Controls come before targets; an
//! MCX control prefixed with `!` fires on |0⟩. Blank lines and `#` comments
//! are ignored.

use std::fmt::{self, Write as _};

use super::{Circuit, CircuitError, Control, Gate};
use crate::scalar::Real;

impl<T: Real> fmt::Display for Gate<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::Not { target } => write!(f, "NOT {target}"),
            Gate::H { target } => write!(f, "H {target}"),
            Gate::Cnot { control, target } => write!(f, "CNOT {control} {target}"),
            Gate::Toffoli { controls, target } => {
                write!(f, "TOFFOLI {} {} {target}", controls[0], controls[1])
            }
            Gate::Mcx { controls, target } => {
                f.write_str("MCX")?;
                for c in controls {
                    if c.on_one {
                        write!(f, " {}", c.qubit)?;
                    } else {
                        write!(f, " !{}", c.qubit)?;
                    }
                }
                write!(f, " {target}")
            }
            Gate::Ry { target, angle } => write!(f, "RY {target} {angle}"),
            Gate::Cry {
                control,
                target,
                angle,
            } => write!(f, "CRY {control} {target} {angle}"),
            Gate::Fredkin { control, a, b } => write!(f, "FREDKIN {control} {a} {b}"),
        }
    }
}

impl<T: Real> Circuit<T> {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let join = |set: &std::collections::BTreeSet<usize>| {
            set.iter()
                .map(|q| q.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(out, "WIDTH {}", self.width()).unwrap();
        if !self.measured().is_empty() {
            writeln!(out, "MEASURE {}", join(self.measured())).unwrap();
        }
        if !self.ancillas().is_empty() {
            writeln!(out, "ANCILLA {}", join(self.ancillas())).unwrap();
        }
        for g in self.gates() {
            writeln!(out, "{g}").unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, CircuitError> {
        let mut circuit: Option<Circuit<T>> = None;
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |reason: String| CircuitError::Parse {
                line: line_no,
                reason,
            };
            let mut parts = line.split_whitespace();
            let kind = parts.next().unwrap_or_default().to_ascii_uppercase();
            let args: Vec<&str> = parts.collect();
            if kind == "WIDTH" {
                if circuit.is_some() {
                    return Err(err("duplicate WIDTH".into()));
                }
                let [w] = args.as_slice() else {
                    return Err(err("WIDTH takes one argument".into()));
                };
                circuit = Some(Circuit::new(parse_index(w).map_err(err)?));
                continue;
            }
            let c = circuit
                .as_mut()
                .ok_or_else(|| err("WIDTH must come first".into()))?;
            let locate = |e: CircuitError| match e {
                CircuitError::Parse { .. } => e,
                other => CircuitError::Parse {
                    line: line_no,
                    reason: other.to_string(),
                },
            };
            match kind.as_str() {
                "MEASURE" => {
                    let qs = args
                        .iter()
                        .map(|a| parse_index(a))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(err)?;
                    c.measure(qs).map_err(locate)?;
                }
                "ANCILLA" => {
                    let qs = args
                        .iter()
                        .map(|a| parse_index(a))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(err)?;
                    c.declare_ancillas(qs).map_err(locate)?;
                }
                _ => {
                    let gate = parse_gate::<T>(&kind, &args).map_err(err)?;
                    c.push(gate).map_err(locate)?;
                }
            }
        }
        circuit.ok_or(CircuitError::Parse {
            line: 0,
            reason: "missing WIDTH".into(),
        })
    }
}

fn parse_index(s: &str) -> Result<usize, String> {
    s.parse().map_err(|_| format!("bad qubit index {s:?}"))
}

fn parse_angle<T: Real>(s: &str) -> Result<T, String> {
    T::from_str_radix(s, 10).map_err(|_| format!("bad angle {s:?}"))
}

fn parse_gate<T: Real>(kind: &str, args: &[&str]) -> Result<Gate<T>, String> {
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(format!("{kind} takes {n} arguments, got {}", args.len()))
        }
    };
    let q = |i: usize| parse_index(args[i]);
    Ok(match kind {
        "NOT" => {
            arity(1)?;
            Gate::Not { target: q(0)? }
        }
        "H" => {
            arity(1)?;
            Gate::H { target: q(0)? }
        }
        "CNOT" => {
            arity(2)?;
            Gate::Cnot {
                control: q(0)?,
                target: q(1)?,
            }
        }
        "TOFFOLI" => {
            arity(3)?;
            Gate::Toffoli {
                controls: [q(0)?, q(1)?],
                target: q(2)?,
            }
        }
        "MCX" => {
            let (target, controls) = args.split_last().ok_or("MCX needs a target")?;
            let controls = controls
                .iter()
                .map(|a| match a.strip_prefix('!') {
                    Some(rest) => parse_index(rest).map(Control::zero),
                    None => parse_index(a).map(Control::one),
                })
                .collect::<Result<Vec<_>, _>>()?;
            Gate::Mcx {
                controls,
                target: parse_index(target)?,
            }
        }
        "RY" => {
            arity(2)?;
            Gate::Ry {
                target: q(0)?,
                angle: parse_angle(args[1])?,
            }
        }
        "CRY" => {
            arity(3)?;
            Gate::Cry {
                control: q(0)?,
                target: q(1)?,
                angle: parse_angle(args[2])?,
            }
        }
        "FREDKIN" => {
            arity(3)?;
            Gate::Fredkin {
                control: q(0)?,
                a: q(1)?,
                b: q(2)?,
            }
        }
        other => return Err(format!("unknown gate {other}")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const LISTING: &str = "WIDTH 3
MEASURE 0 2
ANCILLA 0
H 2
CNOT 2 1
TOFFOLI 2 1 0
MCX 2 !1 0
RY 0 0.9272952180016122
CRY 1 0 -2.0943951023931957
FREDKIN 2 1 0
NOT 1
";

    #[test]
    fn listing_round_trips() {
        let c = Circuit::<f64>::from_text(LISTING).unwrap();
        assert_eq!(c.len(), 8);
        assert_eq!(
            c.gates()[3],
            Gate::Mcx {
                controls: vec![Control::one(2), Control::zero(1)],
                target: 0
            }
        );
        assert_eq!(c.to_text(), LISTING);
    }

    #[test]
    fn comments_and_errors() {
        let c = Circuit::<f64>::from_text("# demo\nWIDTH 1\n\nNOT 0 # flip\n").unwrap();
        assert_eq!(c.len(), 1);
        assert!(matches!(
            Circuit::<f64>::from_text("NOT 0\n"),
            Err(CircuitError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            Circuit::<f64>::from_text("WIDTH 1\nNOT 3\n"),
            Err(CircuitError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            Circuit::<f64>::from_text("WIDTH 2\nSWAP 0 1\n"),
            Err(CircuitError::Parse { line: 2, .. })
        ));
        assert!(Circuit::<f64>::from_text("").is_err());
    }
}
