//! Named two-qubit gates.
//!
//! Basis order is `|00>, |01>, |10>, |11>`; the first factor is the qubit on
//! modes 0/1 (control of `cnot`), the second the qubit on modes 2/3.
//! Angles are radians. Plain numbers and multiples of `pi` (`pi/4`,
//! `-3pi/8`, `0.5*pi`) are accepted; degree notation is rejected.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use psgate_core::cartan::{self, CanonicalTriple};
use psgate_core::linalg::{self, c, ComplexMatrix, I, ONE, ZERO};

/// Unitarity tolerance for resolved gates.
pub const GATE_UNITARITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum NamedGate {
    Cnot,
    Cz,
    Swap,
    Iswap,
    SqrtSwap,
    Cphase(f64),
    Canonical(f64, f64, f64),
}

impl NamedGate {
    pub fn matrix(&self) -> ComplexMatrix {
        match *self {
            NamedGate::Cnot => linalg::from_real_rows(&[
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
                [0.0, 0.0, 1.0, 0.0],
            ]),
            NamedGate::Cz => linalg::diagonal(&[ONE, ONE, ONE, -ONE]),
            NamedGate::Swap => linalg::swap_operator(),
            NamedGate::Iswap => linalg::from_rows(&[
                [ONE, ZERO, ZERO, ZERO],
                [ZERO, ZERO, I, ZERO],
                [ZERO, I, ZERO, ZERO],
                [ZERO, ZERO, ZERO, ONE],
            ]),
            NamedGate::SqrtSwap => {
                let (p, m) = (c(0.5, 0.5), c(0.5, -0.5));
                linalg::from_rows(&[
                    [ONE, ZERO, ZERO, ZERO],
                    [ZERO, p, m, ZERO],
                    [ZERO, m, p, ZERO],
                    [ZERO, ZERO, ZERO, ONE],
                ])
            }
            NamedGate::Cphase(phi) => linalg::diagonal(&[ONE, ONE, ONE, Complex64::from_polar(1.0, phi)]),
            NamedGate::Canonical(a, b, g) => cartan::canonical_matrix(&CanonicalTriple::new(a, b, g)),
        }
    }
}

impl fmt::Display for NamedGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedGate::Cnot => f.write_str("cnot"),
            NamedGate::Cz => f.write_str("cz"),
            NamedGate::Swap => f.write_str("swap"),
            NamedGate::Iswap => f.write_str("iswap"),
            NamedGate::SqrtSwap => f.write_str("sqrt_swap"),
            NamedGate::Cphase(phi) => write!(f, "cphase({phi})"),
            NamedGate::Canonical(a, b, g) => write!(f, "canonical({a},{b},{g})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{0}")]
pub struct GateParseError(pub String);

/// Parses an angle in radians.
pub fn parse_angle(token: &str) -> Result<f64, GateParseError> {
    let t = token.trim().to_ascii_lowercase();
    if t.contains("deg") || t.contains('°') || t.ends_with('d') {
        return Err(GateParseError(format!(
            "angle {token:?}: only radians are accepted"
        )));
    }
    if let Ok(v) = t.parse::<f64>() {
        return finite(v, token);
    }
    let bad = || GateParseError(format!("angle {token:?} is not a number or multiple of pi"));
    let Some(pos) = t.find("pi") else {
        return Err(bad());
    };
    let (head, tail) = (&t[..pos], &t[pos + 2..]);
    let coefficient = match head.trim_end_matches('*') {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| bad())?,
    };
    let divisor = match tail {
        "" => 1.0,
        d => d.strip_prefix('/').ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?,
    };
    finite(coefficient * PI / divisor, token)
}

fn finite(v: f64, token: &str) -> Result<f64, GateParseError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(GateParseError(format!("angle {token:?} is not finite")))
    }
}

/// Parses `cnot`, `cphase 0.5`, `cphase(pi/2)`, `canonical 0.3 0.5 0.7`,
/// `canonical(0.3, 0.5, 0.7)` and so on, given as one or more tokens.
pub fn parse_named_gate(tokens: &[String]) -> Result<NamedGate, GateParseError> {
    let joined = tokens.join(" ").replace(['(', ')', ','], " ");
    let parts: Vec<&str> = joined.split_whitespace().collect();
    let Some((&name, args)) = parts.split_first() else {
        return Err(GateParseError("no gate given".into()));
    };
    let angles = args.iter().map(|a| parse_angle(a)).collect::<Result<Vec<_>, _>>()?;
    let arity = |n: usize| {
        if angles.len() == n {
            Ok(())
        } else {
            Err(GateParseError(format!(
                "{name} takes {n} angle(s), got {}",
                angles.len()
            )))
        }
    };
    let gate = match name.to_ascii_lowercase().as_str() {
        "cnot" | "cx" => NamedGate::Cnot,
        "cz" => NamedGate::Cz,
        "swap" => NamedGate::Swap,
        "iswap" => NamedGate::Iswap,
        "sqrt_swap" | "sqrtswap" => NamedGate::SqrtSwap,
        "cphase" => {
            arity(1)?;
            return Ok(NamedGate::Cphase(angles[0]));
        }
        "canonical" => {
            arity(3)?;
            return Ok(NamedGate::Canonical(angles[0], angles[1], angles[2]));
        }
        other => return Err(GateParseError(format!("unknown gate {other:?}"))),
    };
    arity(0)?;
    Ok(gate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn angles() {
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        assert!((parse_angle("pi/4").unwrap() - FRAC_PI_4).abs() < 1e-15);
        assert!((parse_angle("-3pi/8").unwrap() + 3.0 * PI / 8.0).abs() < 1e-15);
        assert!((parse_angle("0.5*pi").unwrap() - PI / 2.0).abs() < 1e-15);
        for bad in ["45deg", "45°", "90d", "x", "pi/", "inf"] {
            assert!(parse_angle(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn gate_forms() {
        assert_eq!(parse_named_gate(&toks("cnot")).unwrap(), NamedGate::Cnot);
        assert_eq!(parse_named_gate(&toks("cphase(0.5)")).unwrap(), NamedGate::Cphase(0.5));
        assert_eq!(
            parse_named_gate(&toks("canonical 0.3 0.5 0.7")).unwrap(),
            NamedGate::Canonical(0.3, 0.5, 0.7)
        );
        assert_eq!(
            parse_named_gate(&toks("canonical(0.3, 0.5, -0.7)")).unwrap(),
            NamedGate::Canonical(0.3, 0.5, -0.7)
        );
        assert!(parse_named_gate(&toks("cnot 1")).is_err());
        assert!(parse_named_gate(&toks("canonical 1 2")).is_err());
        assert!(parse_named_gate(&toks("toffoli")).is_err());
        assert!(parse_named_gate(&[]).is_err());
    }

    #[test]
    fn library_is_unitary() {
        for g in [
            NamedGate::Cnot,
            NamedGate::Cz,
            NamedGate::Swap,
            NamedGate::Iswap,
            NamedGate::SqrtSwap,
            NamedGate::Cphase(0.7),
            NamedGate::Canonical(0.3, 0.5, 0.7),
        ] {
            assert!(linalg::unitarity_residual(&g.matrix()).unwrap() < 1e-14, "{g}");
        }
        let s = NamedGate::SqrtSwap.matrix();
        assert!(linalg::max_abs_diff(&(&s * &s), &linalg::swap_operator()) < 1e-15);
    }
}
