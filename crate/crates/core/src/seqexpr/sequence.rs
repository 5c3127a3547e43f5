use std::fmt;
use std::str::FromStr;

use super::expr::{parse_expression, Expr};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PieceCondition {
    AtLeast(i64),
    AtMost(i64),
    Equal(i64),
    Between(i64, i64),
    Otherwise,
}

impl PieceCondition {
    pub fn matches(self, n: i64) -> bool {
        match self {
            PieceCondition::AtLeast(k) => n >= k,
            PieceCondition::AtMost(k) => n <= k,
            PieceCondition::Equal(k) => n == k,
            PieceCondition::Between(lo, hi) => lo <= n && n <= hi,
            PieceCondition::Otherwise => true,
        }
    }
}

fn parse_int(s: &str, whole: &str) -> Result<i64> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidCondition(whole.to_string()))
}

impl FromStr for PieceCondition {
    type Err = Error;

    /// Accepts `n>=K`, `n<=K`, `n==K`, `K1<=n<=K2` and `otherwise`.
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact == "otherwise" {
            return Ok(PieceCondition::Otherwise);
        }
        if let Some(k) = compact.strip_prefix("n>=") {
            return Ok(PieceCondition::AtLeast(parse_int(k, s)?));
        }
        if let Some(k) = compact.strip_prefix("n<=") {
            return Ok(PieceCondition::AtMost(parse_int(k, s)?));
        }
        if let Some(k) = compact.strip_prefix("n==") {
            return Ok(PieceCondition::Equal(parse_int(k, s)?));
        }
        if let Some((lo, hi)) = compact.split_once("<=n<=") {
            let (lo, hi) = (parse_int(lo, s)?, parse_int(hi, s)?);
            if lo > hi {
                return Err(Error::InvalidCondition(s.to_string()));
            }
            return Ok(PieceCondition::Between(lo, hi));
        }
        Err(Error::InvalidCondition(s.to_string()))
    }
}

impl fmt::Display for PieceCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PieceCondition::AtLeast(k) => write!(f, "n>={k}"),
            PieceCondition::AtMost(k) => write!(f, "n<={k}"),
            PieceCondition::Equal(k) => write!(f, "n=={k}"),
            PieceCondition::Between(lo, hi) => write!(f, "{lo}<=n<={hi}"),
            PieceCondition::Otherwise => f.write_str("otherwise"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub condition: PieceCondition,
    pub expr: Expr,
}

/// Piecewise map from the integers to the reals; the first matching piece wins.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSpec {
    name: String,
    pieces: Vec<Piece>,
    default_zero: bool,
}

impl SequenceSpec {
    pub fn new(name: impl Into<String>, pieces: Vec<Piece>, default_zero: bool) -> Result<Self> {
        let name = name.into();
        if let Some(i) = pieces
            .iter()
            .position(|p| p.condition == PieceCondition::Otherwise)
        {
            if i + 1 != pieces.len() {
                return Err(Error::OtherwiseNotLast(name));
            }
        }
        Ok(SequenceSpec {
            name,
            pieces,
            default_zero,
        })
    }

    /// Builds a spec from `(condition, expression)` source pairs.
    pub fn parse<'a, I>(name: impl Into<String>, pieces: I, default_zero: bool) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let pieces = pieces
            .into_iter()
            .map(|(cond, expr)| {
                Ok(Piece {
                    condition: cond.parse()?,
                    expr: parse_expression(expr)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        SequenceSpec::new(name, pieces, default_zero)
    }

    pub fn constant(name: impl Into<String>, value: f64) -> Self {
        SequenceSpec {
            name: name.into(),
            pieces: vec![Piece {
                condition: PieceCondition::Otherwise,
                expr: Expr::Num(value),
            }],
            default_zero: false,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn default_zero(&self) -> bool {
        self.default_zero
    }

    pub fn eval(&self, n: i64) -> Result<f64> {
        let piece = self.pieces.iter().find(|p| p.condition.matches(n));
        let value = match piece {
            Some(p) => p.expr.eval(n),
            None if self.default_zero => 0.0,
            None => {
                return Err(Error::NoMatchingPiece {
                    sequence: self.name.clone(),
                    n,
                })
            }
        };
        if !value.is_finite() {
            return Err(Error::NonFiniteValue {
                sequence: self.name.clone(),
                n,
            });
        }
        Ok(value)
    }
}

/// Evaluates `spec` at `n`.
pub fn eval_sequence(spec: &SequenceSpec, n: i64) -> Result<f64> {
    spec.eval(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conditions_parse_and_print() {
        for s in ["n>=0", "n<=-1", "n==3", "-4<=n<=7", "otherwise"] {
            let c: PieceCondition = s.parse().unwrap();
            assert_eq!(c.to_string(), s);
        }
        assert_eq!(
            " n >= -2 ".parse::<PieceCondition>().unwrap(),
            PieceCondition::AtLeast(-2)
        );
        for bad in ["n>0", "n=>0", "3<=n<=1", "m>=0", "n>=x", ""] {
            assert!(bad.parse::<PieceCondition>().is_err(), "{bad}");
        }
    }

    #[test]
    fn first_match_wins() {
        let s = SequenceSpec::parse(
            "w",
            [("n>=0", "2"), ("n>=-5", "3"), ("otherwise", "4")],
            false,
        )
        .unwrap();
        assert_eq!(s.eval(0).unwrap(), 2.0);
        assert_eq!(s.eval(-5).unwrap(), 3.0);
        assert_eq!(s.eval(-6).unwrap(), 4.0);
    }

    #[test]
    fn otherwise_must_be_last() {
        let r = SequenceSpec::parse("a", [("otherwise", "1"), ("n>=0", "2")], false);
        assert!(matches!(r, Err(Error::OtherwiseNotLast(_))));
    }

    #[test]
    fn unmatched_and_non_finite() {
        let s = SequenceSpec::parse("a", [("n>=0", "log(n)")], false).unwrap();
        assert!(matches!(
            s.eval(-1),
            Err(Error::NoMatchingPiece { n: -1, .. })
        ));
        assert!(matches!(s.eval(0), Err(Error::NonFiniteValue { n: 0, .. })));
        let b = SequenceSpec::parse("b", [("n==0", "1"), ("n>=1", "1/n")], true).unwrap();
        assert_eq!(b.eval(-5).unwrap(), 0.0);
    }
}
