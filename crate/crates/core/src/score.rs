use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

/// Score function `φ` of a linear functional `∫φ dF`.
#[derive(Debug, Clone, PartialEq)]
pub enum ScoreFunction {
    Identity,
    /// `1{x <= threshold}`; integrating it gives the distribution function.
    Indicator(f64),
    /// `x^k`.
    Power(f64),
    Constant(f64),
    /// Values at listed points only; sorted by point, no duplicates.
    Tabulated(Vec<(f64, f64)>),
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("score function undefined at {0}")]
pub struct ScoreError(pub f64);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScoreSpecError {
    #[error("duplicate point {0} in score table")]
    DuplicatePoint(f64),
    #[error("unrecognised score specification {0:?}")]
    BadSpec(alloc::string::String),
}

impl ScoreFunction {
    /// Builds a tabulated score, sorting by point.
    pub fn tabulated(mut table: Vec<(f64, f64)>) -> Result<Self, ScoreSpecError> {
        table.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(w) = table.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(ScoreSpecError::DuplicatePoint(w[0].0));
        }
        Ok(ScoreFunction::Tabulated(table))
    }

    pub fn eval(&self, x: f64) -> Result<f64, ScoreError> {
        Ok(match self {
            ScoreFunction::Identity => x,
            ScoreFunction::Indicator(t) => {
                if x <= *t {
                    1.0
                } else {
                    0.0
                }
            }
            ScoreFunction::Power(k) => libm::pow(x, *k),
            ScoreFunction::Constant(c) => *c,
            ScoreFunction::Tabulated(table) => {
                match table.binary_search_by(|probe| probe.0.total_cmp(&x)) {
                    Ok(i) => table[i].1,
                    Err(_) => return Err(ScoreError(x)),
                }
            }
        })
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, ScoreFunction::Constant(_))
    }
}

/// Parses `identity`, `indicator:<t>`, `power:<k>` and `constant:<c>`.
/// Tables need file access and are handled by the front end.
impl FromStr for ScoreFunction {
    type Err = ScoreSpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ScoreSpecError::BadSpec(s.into());
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        let num = |a: Option<&str>| -> Result<f64, ScoreSpecError> {
            a.ok_or_else(bad)?
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(bad)
        };
        match kind {
            "identity" if arg.is_none() => Ok(ScoreFunction::Identity),
            "indicator" => Ok(ScoreFunction::Indicator(num(arg)?)),
            "power" => Ok(ScoreFunction::Power(num(arg)?)),
            "constant" => Ok(ScoreFunction::Constant(num(arg)?)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for ScoreFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScoreFunction::Identity => write!(f, "identity"),
            ScoreFunction::Indicator(t) => write!(f, "indicator:{t}"),
            ScoreFunction::Power(k) => write!(f, "power:{k}"),
            ScoreFunction::Constant(c) => write!(f, "constant:{c}"),
            ScoreFunction::Tabulated(t) => write!(f, "table[{}]", t.len()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn evaluates_each_kind() {
        assert_eq!(ScoreFunction::Identity.eval(2.5), Ok(2.5));
        assert_eq!(ScoreFunction::Indicator(1.5).eval(1.5), Ok(1.0));
        assert_eq!(ScoreFunction::Indicator(1.5).eval(1.6), Ok(0.0));
        assert_eq!(ScoreFunction::Power(2.0).eval(3.0), Ok(9.0));
        assert_eq!(ScoreFunction::Constant(4.0).eval(-1.0), Ok(4.0));
        let t = ScoreFunction::tabulated(vec![(2.0, 20.0), (1.0, 10.0)]).unwrap();
        assert_eq!(t.eval(1.0), Ok(10.0));
        assert_eq!(t.eval(1.5), Err(ScoreError(1.5)));
    }

    #[test]
    fn rejects_duplicate_table_points() {
        assert_eq!(
            ScoreFunction::tabulated(vec![(1.0, 1.0), (1.0, 2.0)]),
            Err(ScoreSpecError::DuplicatePoint(1.0))
        );
    }

    #[test]
    fn parses_spec_strings() {
        assert_eq!("identity".parse(), Ok(ScoreFunction::Identity));
        assert_eq!("indicator:1.5".parse(), Ok(ScoreFunction::Indicator(1.5)));
        assert_eq!("power:2".parse(), Ok(ScoreFunction::Power(2.0)));
        assert_eq!("constant:3".parse(), Ok(ScoreFunction::Constant(3.0)));
        assert!("indicator".parse::<ScoreFunction>().is_err());
        assert!("indicator:abc".parse::<ScoreFunction>().is_err());
        assert!("cubic".parse::<ScoreFunction>().is_err());
    }
}
