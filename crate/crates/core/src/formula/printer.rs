use std::fmt;

use super::ast::{CoreFormula, Formula};

// Binding strength; larger binds tighter.
const IFF: u8 = 1;
const IMPLIES: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const PREFIX: u8 = 5;

fn level(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => IFF,
        Formula::Implies(..) => IMPLIES,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        _ => PREFIX,
    }
}

fn write_at(f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if level(f) < min {
        out.write_str("(")?;
        write_formula(f, out)?;
        out.write_str(")")
    } else {
        write_formula(f, out)
    }
}

fn write_prefixed(prefix: &str, body: &Formula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    out.write_str(prefix)?;
    if level(body) < PREFIX {
        out.write_str("(")?;
        write_formula(body, out)?;
        out.write_str(")")
    } else {
        out.write_str(" ")?;
        write_formula(body, out)
    }
}

fn write_formula(f: &Formula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    match f {
        Formula::Bot => out.write_str("bot"),
        Formula::Top => out.write_str("top"),
        Formula::Atom(p) => out.write_str(p),
        Formula::Correct(a) => write!(out, "correct({a})"),
        Formula::TypeAtom(a, t) => write!(out, "type({a},{t})"),
        Formula::Byz(n) => write!(out, "byz({n})"),
        Formula::Not(g) => {
            out.write_str("!")?;
            write_at(g, PREFIX, out)
        }
        Formula::And(a, b) => {
            write_at(a, AND, out)?;
            out.write_str(" & ")?;
            write_at(b, AND + 1, out)
        }
        Formula::Or(a, b) => {
            write_at(a, OR, out)?;
            out.write_str(" | ")?;
            write_at(b, OR + 1, out)
        }
        Formula::Implies(a, b) => {
            write_at(a, IMPLIES + 1, out)?;
            out.write_str(" -> ")?;
            write_at(b, IMPLIES, out)
        }
        Formula::Iff(a, b) => {
            write_at(a, IFF, out)?;
            out.write_str(" <-> ")?;
            write_at(b, IFF + 1, out)
        }
        Formula::K(a, g) => write_prefixed(&format!("K[{a}]"), g, out),
        Formula::H(a, g) => write_prefixed(&format!("H[{a}]"), g, out),
        Formula::B(a, g) => write_prefixed(&format!("B[{a}]"), g, out),
        Formula::MutualHope(group, g) => {
            let ids: Vec<&str> = group.iter().map(|a| a.id()).collect();
            write_prefixed(&format!("EH[{}]", ids.join(",")), g, out)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, f)
    }
}

impl fmt::Display for CoreFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(&Formula::from(self), f)
    }
}
