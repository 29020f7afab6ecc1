//! Single-letter information measures evaluated by full enumeration.
//!
//! Expressions use a small text syntax: `H(U|Y1,Y2)`, `I(U;X|Y{1,2})`,
//! `I(V;X|U,Y1)`. Variables are `X`, `U`, `V` and `Yj` (1-based); `Y{..}`
//! expands to several participants.

use std::collections::BTreeMap;
use std::fmt;

use super::joint::{JointModel, JointSource, TestChannel, Var};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum InfoExpr {
    Entropy { target: Vec<Var>, given: Vec<Var> },
    Mutual { a: Vec<Var>, b: Vec<Var>, given: Vec<Var> },
}

fn parse_vars(text: &str, whole: &str) -> Result<Vec<Var>> {
    let unknown = || Error::UnknownExpression(whole.to_string());
    let chars: Vec<char> = text.chars().collect();
    let mut vars = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        match chars[i] {
            c if c.is_whitespace() || c == ',' || c == '∅' => i += 1,
            'X' => {
                vars.push(Var::X);
                i += 1;
            }
            'U' => {
                vars.push(Var::U);
                i += 1;
            }
            'V' => {
                vars.push(Var::V);
                i += 1;
            }
            'Y' => {
                i += 1;
                if i < chars.len() && chars[i] == '_' {
                    i += 1;
                }
                if i < chars.len() && chars[i] == '{' {
                    let close = chars[i..].iter().position(|&c| c == '}').ok_or_else(unknown)? + i;
                    let inner: String = chars[i + 1..close].iter().collect();
                    for part in inner.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                        vars.push(Var::Y(part.parse().map_err(|_| unknown())?));
                    }
                    i = close + 1;
                } else {
                    let start = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    if start == i {
                        return Err(unknown());
                    }
                    let digits: String = chars[start..i].iter().collect();
                    vars.push(Var::Y(digits.parse().map_err(|_| unknown())?));
                }
            }
            _ => return Err(unknown()),
        }
    }
    Ok(vars)
}

impl InfoExpr {
    pub fn parse(text: &str) -> Result<Self> {
        let unknown = || Error::UnknownExpression(text.to_string());
        let t = text.trim();
        let (head, rest) = t.split_at(t.find('(').ok_or_else(unknown)?);
        let body = rest
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(unknown)?;
        let (main, given) = match body.split_once('|') {
            Some((m, g)) => (m, parse_vars(g, text)?),
            None => (body, Vec::new()),
        };
        match head.trim() {
            "H" => {
                let target = parse_vars(main, text)?;
                if target.is_empty() || main.contains(';') {
                    return Err(unknown());
                }
                Ok(InfoExpr::Entropy { target, given })
            }
            "I" => {
                let (a, b) = main.split_once(';').ok_or_else(unknown)?;
                let (a, b) = (parse_vars(a, text)?, parse_vars(b, text)?);
                if a.is_empty() || b.is_empty() {
                    return Err(unknown());
                }
                Ok(InfoExpr::Mutual { a, b, given })
            }
            _ => Err(unknown()),
        }
    }

    pub fn eval(&self, model: &JointModel) -> Result<f64> {
        match self {
            InfoExpr::Entropy { target, given } => model.cond_entropy(target, given),
            InfoExpr::Mutual { a, b, given } => model.mutual_info(a, b, given),
        }
    }
}

fn fmt_vars(vars: &[Var]) -> String {
    vars.iter()
        .map(|v| match v {
            Var::X => "X".to_string(),
            Var::U => "U".to_string(),
            Var::V => "V".to_string(),
            Var::Y(j) => format!("Y{j}"),
        })
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for InfoExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cond = |g: &[Var]| if g.is_empty() { String::new() } else { format!("|{}", fmt_vars(g)) };
        match self {
            InfoExpr::Entropy { target, given } => write!(f, "H({}{})", fmt_vars(target), cond(given)),
            InfoExpr::Mutual { a, b, given } => {
                write!(f, "I({};{}{})", fmt_vars(a), fmt_vars(b), cond(given))
            }
        }
    }
}

/// Evaluates each expression on `p_{XY} p_{U|X}` (or the layered law), in bits.
pub fn exact_info(
    source: &JointSource,
    channel: &TestChannel,
    expressions: &[&str],
) -> Result<BTreeMap<String, f64>> {
    let model = JointModel::new(source, channel);
    let mut out = BTreeMap::new();
    for e in expressions {
        let parsed = InfoExpr::parse(e)?;
        let value = parsed.eval(&model).map_err(|err| match err {
            Error::ParticipantRange { .. } | Error::UnknownExpression(_) => {
                Error::UnknownExpression(e.to_string())
            }
            other => other,
        })?;
        out.insert(e.to_string(), value);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::joint::{binary_entropy, make_bss_source, BinaryChannel};
    use approx::assert_abs_diff_eq;

    #[test]
    fn parses_listed_expressions() {
        for e in [
            "I(U;X|Y1,Y2)", "I(U;Y{1,2})", "H(U|Y2)", "H(U|X)", "I(X;Y1,Y2|Y1)",
            "I(V;Y1|U)", "I(V;X|U,Y1)", "H(V|U,Y1)", "H(V|U,X)", "I(V;X|UY1Y2)",
        ] {
            InfoExpr::parse(e).unwrap();
        }
        assert!(matches!(InfoExpr::parse("K(U)"), Err(Error::UnknownExpression(_))));
        assert!(matches!(InfoExpr::parse("I(U;Q)"), Err(Error::UnknownExpression(_))));
        assert_eq!(InfoExpr::parse("I(V;X|UY{1,2})").unwrap().to_string(), "I(V;X|U,Y1,Y2)");
    }

    #[test]
    fn identity_channel_recovers_binary_entropy() {
        let s = make_bss_source(&[0.15, 0.15]).unwrap();
        let ch = TestChannel::single(BinaryChannel::identity());
        let v = exact_info(&s, &ch, &["I(U;X|Y1)", "H(X|Y1)"]).unwrap();
        assert_abs_diff_eq!(v["I(U;X|Y1)"], binary_entropy(0.15), epsilon = 1e-12);
        assert_abs_diff_eq!(v["H(X|Y1)"], binary_entropy(0.15), epsilon = 1e-12);
    }

    #[test]
    fn independent_u_carries_no_information() {
        let s = make_bss_source(&[0.1, 0.3]).unwrap();
        let ch = TestChannel::single(BinaryChannel::independent());
        let v = exact_info(&s, &ch, &["I(U;X)", "I(U;Y1)", "I(U;Y1,Y2)", "I(U;X|Y2)"]).unwrap();
        for value in v.values() {
            assert_abs_diff_eq!(*value, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn noise_half_makes_y_independent() {
        let s = make_bss_source(&[0.5]).unwrap();
        let v = exact_info(&s, &TestChannel::single(BinaryChannel::identity()), &["I(X;Y1)"]).unwrap();
        assert_abs_diff_eq!(v["I(X;Y1)"], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn unknown_variable_is_rejected() {
        let s = make_bss_source(&[0.1]).unwrap();
        let ch = TestChannel::single(BinaryChannel::identity());
        assert!(matches!(exact_info(&s, &ch, &["I(U;Y4)"]), Err(Error::UnknownExpression(_))));
        assert!(matches!(exact_info(&s, &ch, &["H(V|U)"]), Err(Error::UnknownExpression(_))));
    }
}
