//! Probability expressions such as `0.8*n^-0.5` or `2*log(n)/n`, evaluated
//! against a vertex count.

use std::fmt;
use std::str::FromStr;

use evalexpr::{
    eval_number_with_context, ContextWithMutableFunctions, ContextWithMutableVariables,
    DefaultNumericTypes, Function, HashMapContext, Value,
};
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// A hyperedge probability, either a literal or an expression in `n` (and `r`).
///
/// Expressions may use `+ - * / ^`, parentheses, `log`/`ln` (natural), `log2`,
/// `log10`, `sqrt` and `exp`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PExpr {
    Literal(f64),
    Expr(String),
}

impl PExpr {
    pub fn eval(&self, n: usize, r: usize) -> Result<f64, ConfigError> {
        let p = match self {
            PExpr::Literal(p) => *p,
            PExpr::Expr(src) => eval_expr(src, n, r)?,
        };
        if !p.is_finite() || !(0.0..=1.0).contains(&p) {
            return Err(ConfigError::Invalid(format!(
                "probability `{self}` evaluates to {p} at n={n}, outside [0, 1]"
            )));
        }
        Ok(p)
    }

    /// `c * n^-1/2`.
    pub fn sqrt_scaled(c: f64) -> Self {
        PExpr::Expr(format!("{c}*n^-0.5"))
    }
}

impl fmt::Display for PExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PExpr::Literal(p) => write!(f, "{p}"),
            PExpr::Expr(s) => f.write_str(s),
        }
    }
}

impl FromStr for PExpr {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Ok(p) = s.parse::<f64>() {
            return Ok(PExpr::Literal(p));
        }
        // fail early on syntax; value range is checked once n is known
        eval_expr(s, 100, 3)?;
        Ok(PExpr::Expr(s.to_string()))
    }
}

fn unary(f: fn(f64) -> f64) -> Function<DefaultNumericTypes> {
    Function::new(move |arg: &Value<DefaultNumericTypes>| {
        let x: f64 = arg.as_number()?;
        Ok(Value::Float(f(x)))
    })
}

fn eval_expr(src: &str, n: usize, r: usize) -> Result<f64, ConfigError> {
    let mut ctx = HashMapContext::<DefaultNumericTypes>::new();
    let bad = |e: evalexpr::EvalexprError<DefaultNumericTypes>| {
        ConfigError::Invalid(format!("cannot evaluate probability expression `{src}`: {e}"))
    };
    ctx.set_value("n".into(), Value::Float(n as f64)).map_err(bad)?;
    ctx.set_value("r".into(), Value::Float(r as f64)).map_err(bad)?;
    for (name, f) in [
        ("log", f64::ln as fn(f64) -> f64),
        ("ln", f64::ln),
        ("log2", f64::log2),
        ("log10", f64::log10),
        ("sqrt", f64::sqrt),
        ("exp", f64::exp),
    ] {
        ctx.set_function(name.into(), unary(f)).map_err(bad)?;
    }
    eval_number_with_context(src, &ctx).map_err(bad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_and_expressions() {
        assert_eq!("0.25".parse::<PExpr>().unwrap().eval(10, 3).unwrap(), 0.25);
        let p: PExpr = "0.8*n^-0.5".parse().unwrap();
        assert!((p.eval(10_000, 3).unwrap() - 0.008).abs() < 1e-15);
        let p: PExpr = "2*log(n)/n".parse().unwrap();
        let want = 2.0 * (5000f64).ln() / 5000.0;
        assert!((p.eval(5000, 3).unwrap() - want).abs() < 1e-15);
        let p: PExpr = "n^-0.75".parse().unwrap();
        assert!((p.eval(10_000, 3).unwrap() - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn rejects_garbage_and_out_of_range() {
        assert!("c*n".parse::<PExpr>().is_err());
        assert!("n^(".parse::<PExpr>().is_err());
        let p: PExpr = "n/2".parse().unwrap();
        assert!(p.eval(10, 3).is_err());
        assert!(PExpr::Literal(1.5).eval(10, 3).is_err());
    }

    #[test]
    fn sqrt_scaled_matches_formula() {
        let p = PExpr::sqrt_scaled(0.3).eval(3000, 3).unwrap();
        assert!((p - 0.3 / 3000f64.sqrt()).abs() < 1e-15);
    }
}
