//! Block-based matrix interpretations.
//!
//! An interpretation assigns to every `k`-ary symbol a linear function
//! `F₁x₁ + ··· + F_kx_k + F₀` over `n`-tuples, where the `F_i` are `n×n` and
//! `F₀` is `n×1`. Tuples are split into `β = n/b` blocks of size `b`; the
//! constant vector must be constant on every block.

mod check;
mod eval;
mod param;

pub use check::{
    check_block_value, check_entrywise, check_forms, check_problem, check_value, sample_falsify,
    Backend, CheckError, CheckReport, ConstraintResult, Failure, Outcome, Relation, RhoSummary,
    SampleParams, Verdict, Witness,
};
pub use eval::{eval_term, EvalError, LinearForm};
pub use param::{
    eval_valuation, generate_arith_constraints, parse_constraints, parse_param_interpretation,
    parse_valuation, ArithConstraint, ConstraintKind, ParamError, ParamInterpretation, ParamSymbol,
    Valuation, Word, WordSum, ONE, ZERO,
};

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::matrix::{const_plus_scalar, Mat};
use crate::rat::Rat;
use crate::syntax::{self, ParseError};
use crate::trs::{Rule, Trs};

/// Dimension `n` and block size `b`, with `b | n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockShape {
    dim: usize,
    block: usize,
}

impl BlockShape {
    pub fn new(dim: usize, block: usize) -> Result<Self, InterpError> {
        if dim == 0 {
            return Err(InterpError::BadDimension(dim));
        }
        if block == 0 || !dim.is_multiple_of(block) {
            return Err(InterpError::BlockNotDividing { dim, block });
        }
        Ok(BlockShape { dim, block })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn block(&self) -> usize {
        self.block
    }

    /// Number of blocks, `β = n/b`.
    pub fn blocks(&self) -> usize {
        self.dim / self.block
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Naturals,
    NonnegRationals,
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domain::Naturals => "natural",
            Domain::NonnegRationals => "rational",
        })
    }
}

/// `[f](x₁,…,x_k) = args[0]·x₁ + ··· + args[k-1]·x_k + constant`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolInterp {
    pub args: Vec<Mat>,
    pub constant: Mat,
}

impl SymbolInterp {
    pub fn arity(&self) -> usize {
        self.args.len()
    }

    fn matrices(&self) -> impl Iterator<Item = (String, &Mat)> {
        self.args
            .iter()
            .enumerate()
            .map(|(i, m)| (format!("M{}", i + 1), m))
            .chain(std::iter::once(("C".to_string(), &self.constant)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterpError {
    #[error("dimension must be positive, got {0}")]
    BadDimension(usize),
    #[error("block size {block} does not divide dimension {dim}")]
    BlockNotDividing { dim: usize, block: usize },
    #[error("{symbol}.{part}: expected a {}x{} matrix, found {}x{}", .expected.0, .expected.1, .found.0, .found.1)]
    Shape {
        symbol: String,
        part: String,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("{symbol}.{part}: negative entry")]
    Negative { symbol: String, part: String },
    #[error("{symbol}.{part}: non-natural entry in an interpretation over the naturals")]
    NotNatural { symbol: String, part: String },
    #[error("{symbol}.C: constant vector is not constant on blocks of size {block}")]
    NotBlockConstant { symbol: String, block: usize },
    #[error("delta must be positive, got {0}")]
    BadDelta(Rat),
    #[error("symbol `{symbol}` has arity {expected} in the rewrite system but {found} in the interpretation")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("symbol `{0}` is not interpreted")]
    Uninterpreted(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interpretation {
    pub shape: BlockShape,
    pub domain: Domain,
    /// Strictness margin; `None` means "use the backend default".
    pub delta: Option<Rat>,
    pub table: BTreeMap<String, SymbolInterp>,
}

impl Interpretation {
    /// Builds and validates an interpretation.
    pub fn new(
        shape: BlockShape,
        domain: Domain,
        delta: Option<Rat>,
        table: BTreeMap<String, SymbolInterp>,
    ) -> Result<Self, InterpError> {
        let interp = Interpretation {
            shape,
            domain,
            delta,
            table,
        };
        interp.validate()?;
        Ok(interp)
    }

    pub fn dim(&self) -> usize {
        self.shape.dim
    }

    pub fn get(&self, symbol: &str) -> Option<&SymbolInterp> {
        self.table.get(symbol)
    }

    pub fn validate(&self) -> Result<(), InterpError> {
        if let Some(d) = &self.delta {
            if d.is_negative() || d.is_zero() {
                return Err(InterpError::BadDelta(d.clone()));
            }
        }
        for (symbol, si) in &self.table {
            self.validate_symbol(symbol, si)?;
        }
        Ok(())
    }

    fn validate_symbol(&self, symbol: &str, si: &SymbolInterp) -> Result<(), InterpError> {
        let n = self.dim();
        for (part, m) in si.matrices() {
            let expected = if part == "C" { (n, 1) } else { (n, n) };
            if m.shape() != expected {
                return Err(InterpError::Shape {
                    symbol: symbol.to_string(),
                    part,
                    expected,
                    found: m.shape(),
                });
            }
            if !m.is_nonnegative() {
                return Err(InterpError::Negative {
                    symbol: symbol.to_string(),
                    part,
                });
            }
            if self.domain == Domain::Naturals && !m.is_natural() {
                return Err(InterpError::NotNatural {
                    symbol: symbol.to_string(),
                    part,
                });
            }
        }
        if collapse_vector(&si.constant, self.shape.block).is_none() {
            return Err(InterpError::NotBlockConstant {
                symbol: symbol.to_string(),
                block: self.shape.block,
            });
        }
        Ok(())
    }

    /// Largest entry over all matrices and constant vectors.
    pub fn max_entry(&self) -> Rat {
        self.all_matrices()
            .map(|m| m.max_entry().clone())
            .max()
            .unwrap_or_else(Rat::zero)
    }

    /// Largest entry over the coefficient matrices only.
    pub fn max_matrix_entry(&self) -> Rat {
        self.table
            .values()
            .flat_map(|si| si.args.iter())
            .map(|m| m.max_entry().clone())
            .max()
            .unwrap_or_else(Rat::zero)
    }

    fn all_matrices(&self) -> impl Iterator<Item = &Mat> {
        self.table
            .values()
            .flat_map(|si| si.args.iter().chain(std::iter::once(&si.constant)))
    }

    /// Every symbol of the rules is interpreted with the right arity.
    pub fn covers<'a>(&self, rules: impl IntoIterator<Item = &'a Rule>) -> Result<(), InterpError> {
        let mut sig = BTreeMap::new();
        for r in rules {
            collect_signature(&r.lhs, &mut sig);
            collect_signature(&r.rhs, &mut sig);
        }
        for (symbol, arity) in sig {
            match self.table.get(&symbol) {
                None => return Err(InterpError::Uninterpreted(symbol)),
                Some(si) if si.arity() != arity => {
                    return Err(InterpError::ArityMismatch {
                        symbol,
                        expected: arity,
                        found: si.arity(),
                    })
                }
                Some(_) => {}
            }
        }
        Ok(())
    }

    /// Checks arities against a rewrite system's signature.
    pub fn check_against_trs(&self, trs: &Trs) -> Result<(), InterpError> {
        for (symbol, &arity) in &trs.signature {
            if let Some(si) = self.table.get(symbol) {
                if si.arity() != arity {
                    return Err(InterpError::ArityMismatch {
                        symbol: symbol.clone(),
                        expected: arity,
                        found: si.arity(),
                    });
                }
            }
        }
        Ok(())
    }

    /// True when every coefficient matrix is made of constant-plus-scalar
    /// `b×b` blocks, so that block-constant tuples are mapped to
    /// block-constant tuples.
    pub fn is_block_closed(&self) -> bool {
        self.table
            .values()
            .flat_map(|si| si.args.iter())
            .all(|m| value_collapse(m, self.shape.block).is_some())
    }

    /// The dimension-`β` interpretation obtained by collapsing every
    /// constant-plus-scalar block to its value `b·c + s` and every constant
    /// segment of the vectors to its entry. `None` if some block is not of
    /// that form.
    pub fn collapse(&self) -> Option<Interpretation> {
        let b = self.shape.block;
        let mut table = BTreeMap::new();
        for (symbol, si) in &self.table {
            let args = si
                .args
                .iter()
                .map(|m| value_collapse(m, b))
                .collect::<Option<Vec<_>>>()?;
            let constant = collapse_vector(&si.constant, b)?;
            table.insert(symbol.clone(), SymbolInterp { args, constant });
        }
        let shape = BlockShape::new(self.shape.blocks(), 1).ok()?;
        Some(Interpretation {
            shape,
            domain: self.domain,
            delta: self.delta.clone(),
            table,
        })
    }
}

fn collect_signature(t: &crate::trs::Term, sig: &mut BTreeMap<String, usize>) {
    if let crate::trs::Term::App(f, args) = t {
        sig.entry(f.clone()).or_insert(args.len());
        for a in args {
            collect_signature(a, sig);
        }
    }
}

/// Collapses an `n×n` matrix of constant-plus-scalar `b×b` blocks to the
/// `β×β` matrix of block values `b·c_ij + s_ij`.
pub fn value_collapse(m: &Mat, b: usize) -> Option<Mat> {
    if !m.is_square() || b == 0 || !m.rows().is_multiple_of(b) {
        return None;
    }
    let beta = m.rows() / b;
    let mut out = Mat::zeros(beta, beta);
    let bb = Rat::from(b);
    for i in 0..beta {
        for j in 0..beta {
            let (c, s) = const_plus_scalar(&m.block(i, j, b, b))?;
            out.set(i, j, &bb * &c + s);
        }
    }
    Some(out)
}

/// Collapses a vector that is constant on `b`-segments to the vector of
/// segment values.
pub fn collapse_vector(v: &Mat, b: usize) -> Option<Mat> {
    if v.cols() != 1 || b == 0 || !v.rows().is_multiple_of(b) {
        return None;
    }
    let entries: Option<Vec<Rat>> = (0..v.rows() / b)
        .map(|k| {
            let first = v.get(k * b, 0);
            (0..b)
                .all(|t| v.get(k * b + t, 0) == first)
                .then(|| first.clone())
        })
        .collect();
    Some(Mat::column(entries?))
}

impl fmt::Display for Interpretation {
    /// Writes the line-oriented interpretation format read by
    /// [`parse_interpretation`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "domain {}", self.domain)?;
        writeln!(f, "dim {}", self.shape.dim)?;
        writeln!(f, "block {}", self.shape.block)?;
        if let Some(d) = &self.delta {
            writeln!(f, "delta {d}")?;
        }
        for (symbol, si) in &self.table {
            writeln!(f, "interp {symbol} : {}", si.arity())?;
            for (part, m) in si.matrices() {
                writeln!(f, "  {part} = {m}")?;
            }
        }
        Ok(())
    }
}

struct PendingSymbol {
    name: String,
    arity: usize,
    line: usize,
    args: Vec<Option<Mat>>,
    constant: Option<Mat>,
}

/// Parses the interpretation file format:
///
/// ```text
/// domain natural|rational
/// dim <n>
/// block <b>
/// delta <p>/<q>
/// interp <symbol> : <arity>
///   M<i> = <matrix literal>
///   C = <matrix literal>
/// ```
///
/// `block` defaults to 1, `delta` is optional, and an omitted `C` is the
/// zero vector. All invariants are checked on load.
pub fn parse_interpretation(text: &str) -> Result<Interpretation, ParseError> {
    let mut domain = None;
    let mut dim = None;
    let mut block = None;
    let mut delta = None;
    let mut symbols: Vec<PendingSymbol> = Vec::new();

    for line in syntax::significant_lines(text) {
        let body = line.text.trim_start();
        let (keyword, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
        let rest = rest.trim();
        let header_done = !symbols.is_empty();
        match keyword {
            "domain" | "dim" | "block" | "delta" if header_done => {
                return Err(line.error(
                    keyword,
                    format!("`{keyword}` must precede the first `interp`"),
                ));
            }
            "domain" => {
                domain = Some(match rest {
                    "natural" => Domain::Naturals,
                    "rational" => Domain::NonnegRationals,
                    _ => return Err(line.error(rest, "domain must be `natural` or `rational`")),
                });
            }
            "dim" => {
                let n = syntax::parse_usize(&line, rest)?;
                if n == 0 {
                    return Err(line.error(rest, "dimension must be positive"));
                }
                dim = Some(n);
            }
            "block" => block = Some((syntax::parse_usize(&line, rest)?, line)),
            "delta" => delta = Some((syntax::parse_rat(&line, rest)?, line)),
            "interp" => {
                let (name, arity) = rest
                    .split_once(':')
                    .ok_or_else(|| line.error(rest, "expected `interp <symbol> : <arity>`"))?;
                let name = name.trim();
                if name.is_empty() {
                    return Err(line.error(rest, "missing symbol name"));
                }
                if symbols.iter().any(|s| s.name == name) {
                    return Err(line.error(name, format!("symbol `{name}` interpreted twice")));
                }
                let arity = syntax::parse_usize(&line, arity.trim())?;
                symbols.push(PendingSymbol {
                    name: name.to_string(),
                    arity,
                    line: line.number,
                    args: vec![None; arity],
                    constant: None,
                });
            }
            _ => {
                let current = symbols
                    .last_mut()
                    .ok_or_else(|| line.error_start(format!("unexpected `{keyword}`")))?;
                let (lhs, lit) = body.split_once('=').ok_or_else(|| {
                    line.error_start("expected `M<i> = <matrix>` or `C = <matrix>`")
                })?;
                let lhs = lhs.trim();
                let m = syntax::parse_matrix(&line, lit)?;
                let slot = if lhs == "C" {
                    &mut current.constant
                } else {
                    let idx = lhs
                        .strip_prefix('M')
                        .and_then(|i| i.parse::<usize>().ok())
                        .filter(|&i| i >= 1 && i <= current.arity)
                        .ok_or_else(|| {
                            line.error(
                                lhs,
                                format!("`{lhs}` is not an argument of `{}`", current.name),
                            )
                        })?;
                    &mut current.args[idx - 1]
                };
                if slot.is_some() {
                    return Err(line.error(lhs, format!("`{lhs}` given twice")));
                }
                *slot = Some(m);
            }
        }
    }

    let domain = domain.ok_or_else(|| ParseError::new(1, 1, "missing `domain` line"))?;
    let dim = dim.ok_or_else(|| ParseError::new(1, 1, "missing `dim` line"))?;
    let shape = match block {
        None => BlockShape::new(dim, 1).map_err(|e| ParseError::new(1, 1, e.to_string()))?,
        Some((b, line)) => BlockShape::new(dim, b).map_err(|e| line.error_start(e.to_string()))?,
    };
    if let Some((d, line)) = &delta {
        if d.is_negative() || d.is_zero() {
            return Err(line.error_start(InterpError::BadDelta(d.clone()).to_string()));
        }
    }

    let mut table = BTreeMap::new();
    let mut lines = BTreeMap::new();
    for s in symbols {
        let args = s
            .args
            .into_iter()
            .enumerate()
            .map(|(i, m)| {
                m.ok_or_else(|| {
                    ParseError::new(s.line, 1, format!("`{}` is missing M{}", s.name, i + 1))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let constant = s.constant.unwrap_or_else(|| Mat::zeros(dim, 1));
        lines.insert(s.name.clone(), s.line);
        table.insert(s.name, SymbolInterp { args, constant });
    }

    let interp = Interpretation {
        shape,
        domain,
        delta: delta.map(|(d, _)| d),
        table,
    };
    for (symbol, si) in &interp.table {
        interp
            .validate_symbol(symbol, si)
            .map_err(|e| ParseError::new(lines[symbol], 1, e.to_string()))?;
    }
    Ok(interp)
}
