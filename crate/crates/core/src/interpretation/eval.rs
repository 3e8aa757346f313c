use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::Interpretation;
use crate::matrix::Mat;
use crate::trs::Term;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("symbol `{0}` is not interpreted")]
    Uninterpreted(String),
    #[error(
        "symbol `{symbol}` applied to {found} arguments but interpreted with arity {expected}"
    )]
    Arity {
        symbol: String,
        expected: usize,
        found: usize,
    },
}

/// `Σ_X coeffs[X]·X + constant`, the meaning of a term under an
/// interpretation. Variables are kept in order of first occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearForm {
    pub coeffs: Vec<(String, Mat)>,
    pub constant: Mat,
}

impl LinearForm {
    pub fn variable(name: &str, dim: usize) -> Self {
        LinearForm {
            coeffs: vec![(name.to_string(), Mat::identity(dim))],
            constant: Mat::zeros(dim, 1),
        }
    }

    pub fn dim(&self) -> usize {
        self.constant.rows()
    }

    /// Coefficient of `var`, the zero matrix if the variable is absent.
    pub fn coeff(&self, var: &str) -> Mat {
        self.coeffs
            .iter()
            .find(|(v, _)| v == var)
            .map(|(_, m)| m.clone())
            .unwrap_or_else(|| Mat::zeros(self.dim(), self.dim()))
    }

    /// Variables of both forms, in order of first occurrence (`self` first).
    pub fn joint_vars<'a>(&'a self, other: &'a LinearForm) -> Vec<&'a str> {
        let mut out: Vec<&str> = Vec::new();
        for (v, _) in self.coeffs.iter().chain(other.coeffs.iter()) {
            if !out.contains(&v.as_str()) {
                out.push(v);
            }
        }
        out
    }

    fn add_coeff(&mut self, var: &str, m: Mat) {
        match self.coeffs.iter_mut().find(|(v, _)| v == var) {
            Some((_, acc)) => *acc = &*acc + &m,
            None => self.coeffs.push((var.to_string(), m)),
        }
    }

    /// Evaluates the form at concrete column vectors. Missing variables are
    /// treated as zero.
    pub fn apply(&self, assignment: &BTreeMap<String, Mat>) -> Mat {
        let mut out = self.constant.clone();
        for (v, m) in &self.coeffs {
            if let Some(x) = assignment.get(v) {
                out = &out + &(m * x);
            }
        }
        out
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (v, m) in &self.coeffs {
            write!(f, "{m}·{v} + ")?;
        }
        write!(f, "{}", self.constant)
    }
}

/// Evaluates a term symbolically: coefficients are the products of
/// argument matrices along each path to a variable occurrence.
pub fn eval_term(interp: &Interpretation, t: &Term) -> Result<LinearForm, EvalError> {
    let n = interp.dim();
    match t {
        Term::Var(x) => Ok(LinearForm::variable(x, n)),
        Term::App(f, args) => {
            let si = interp
                .get(f)
                .ok_or_else(|| EvalError::Uninterpreted(f.clone()))?;
            if si.arity() != args.len() {
                return Err(EvalError::Arity {
                    symbol: f.clone(),
                    expected: si.arity(),
                    found: args.len(),
                });
            }
            let mut out = LinearForm {
                coeffs: Vec::new(),
                constant: si.constant.clone(),
            };
            for (m, arg) in si.args.iter().zip(args) {
                let inner = eval_term(interp, arg)?;
                for (v, c) in inner.coeffs {
                    out.add_coeff(&v, m * &c);
                }
                out.constant = &out.constant + &(m * &inner.constant);
            }
            Ok(out)
        }
    }
}
