//! Linear parametric interpretations in dimension one, the arithmetic
//! constraints they induce, and valuations of their parameters.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::check::Relation;
use super::{BlockShape, Domain, Interpretation, SymbolInterp};
use crate::matrix::Mat;
use crate::rat::Rat;
use crate::syntax::{self, ParseError};
use crate::trs::{Rule, Term, Trs};

/// Reserved parameter with value 1.
pub const ONE: &str = "1";
/// Reserved parameter with value 0.
pub const ZERO: &str = "0";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("parameter `{0}` has no value")]
    Unbound(String),
    #[error("symbol `{0}` has no parametric interpretation")]
    Uninterpreted(String),
    #[error("symbol `{symbol}` applied to {found} arguments but declared with arity {expected}")]
    Arity {
        symbol: String,
        expected: usize,
        found: usize,
    },
}

/// A noncommutative product of parameters; the empty word is `1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(pub Vec<String>);

impl Word {
    pub fn one() -> Self {
        Word(Vec::new())
    }

    pub fn param(p: &str) -> Self {
        if p == ONE {
            Word::one()
        } else {
            Word(vec![p.to_string()])
        }
    }

    /// `p · self`.
    fn prepend(&self, p: &str) -> Word {
        let mut out = Word::param(p);
        out.0.extend(self.0.iter().cloned());
        out
    }

    pub fn params(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str(ONE);
        }
        f.write_str(&self.0.join("*"))
    }
}

/// A sum of words; the empty sum is `0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct WordSum(pub Vec<Word>);

impl WordSum {
    pub fn zero() -> Self {
        WordSum(Vec::new())
    }

    /// `p · self`, dropping everything when `p` is the reserved zero.
    fn prepend(&self, p: &str) -> WordSum {
        if p == ZERO {
            return WordSum::zero();
        }
        WordSum(self.0.iter().map(|w| w.prepend(p)).collect())
    }

    fn push_param(&mut self, p: &str) {
        if p != ZERO {
            self.0.push(Word::param(p));
        }
    }

    fn extend(&mut self, other: WordSum) {
        self.0.extend(other.0);
    }

    pub fn words(&self) -> &[Word] {
        &self.0
    }
}

impl fmt::Display for WordSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str(ZERO);
        }
        for (i, w) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{w}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ConstraintKind {
    VarCoeff(String),
    ConstPart,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ArithConstraint {
    pub lhs: WordSum,
    pub rhs: WordSum,
    pub rel: Relation,
    pub kind: ConstraintKind,
}

impl fmt::Display for ArithConstraint {
    /// `var(X): f1*f1 >= f1*g1*f1` or `const: f1*f0 + f0 > 0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ConstraintKind::VarCoeff(x) => write!(f, "var({x}): ")?,
            ConstraintKind::ConstPart => f.write_str("const: ")?,
        }
        write!(f, "{} {} {}", self.lhs, self.rel, self.rhs)
    }
}

/// Coefficient parameters and constant parameter of one symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamSymbol {
    pub coeffs: Vec<String>,
    pub constant: String,
}

/// `[f](x₁,…,x_k) = p₁x₁ + ··· + p_kx_k + p₀` with symbolic parameters.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParamInterpretation {
    pub table: BTreeMap<String, ParamSymbol>,
}

impl ParamInterpretation {
    /// All non-reserved parameters, sorted.
    pub fn params(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self
            .table
            .values()
            .flat_map(|s| s.coeffs.iter().chain(std::iter::once(&s.constant)))
            .map(String::as_str)
            .filter(|p| *p != ONE && *p != ZERO)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// The dimension-1 rational interpretation obtained by substituting
    /// `eta`.
    pub fn instantiate(&self, eta: &Valuation) -> Result<Interpretation, ParamError> {
        let scalar = |p: &str| eta.get(p).map(|v| Mat::column(vec![v]));
        let mut table = BTreeMap::new();
        for (symbol, ps) in &self.table {
            let args = ps
                .coeffs
                .iter()
                .map(|p| scalar(p))
                .collect::<Result<Vec<_>, _>>()?;
            let constant = scalar(&ps.constant)?;
            table.insert(symbol.clone(), SymbolInterp { args, constant });
        }
        Ok(Interpretation {
            shape: BlockShape::new(1, 1).expect("unit shape"),
            domain: Domain::NonnegRationals,
            delta: None,
            table,
        })
    }

    /// Symbolic evaluation: per-variable coefficient sums and the constant
    /// sum, variables in order of first occurrence.
    pub fn eval(&self, t: &Term) -> Result<(Vec<(String, WordSum)>, WordSum), ParamError> {
        match t {
            Term::Var(x) => Ok((
                vec![(x.clone(), WordSum(vec![Word::one()]))],
                WordSum::zero(),
            )),
            Term::App(f, args) => {
                let ps = self
                    .table
                    .get(f)
                    .ok_or_else(|| ParamError::Uninterpreted(f.clone()))?;
                if ps.coeffs.len() != args.len() {
                    return Err(ParamError::Arity {
                        symbol: f.clone(),
                        expected: ps.coeffs.len(),
                        found: args.len(),
                    });
                }
                let mut coeffs: Vec<(String, WordSum)> = Vec::new();
                let mut constant = WordSum::zero();
                for (p, arg) in ps.coeffs.iter().zip(args) {
                    let (inner, inner_const) = self.eval(arg)?;
                    for (x, sum) in inner {
                        let sum = sum.prepend(p);
                        match coeffs.iter_mut().find(|(y, _)| *y == x) {
                            Some((_, acc)) => acc.extend(sum),
                            None => coeffs.push((x, sum)),
                        }
                    }
                    constant.extend(inner_const.prepend(p));
                }
                constant.push_param(&ps.constant);
                Ok((coeffs, constant))
            }
        }
    }
}

impl fmt::Display for ParamInterpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (symbol, ps) in &self.table {
            write!(f, "pinterp {symbol} : {} =", ps.coeffs.len())?;
            for p in &ps.coeffs {
                write!(f, " {p}")?;
            }
            writeln!(f, " | {}", ps.constant)?;
        }
        Ok(())
    }
}

/// Parses `pinterp <symbol> : <arity> = <p1> ... <pk> | <p0>` lines.
pub fn parse_param_interpretation(text: &str) -> Result<ParamInterpretation, ParseError> {
    let mut out = ParamInterpretation::default();
    let mut seen: BTreeMap<String, String> = BTreeMap::new();
    for line in syntax::significant_lines(text) {
        let rest = line
            .text
            .trim_start()
            .strip_prefix("pinterp")
            .filter(|r| r.starts_with(char::is_whitespace))
            .ok_or_else(|| {
                line.error_start("expected `pinterp <symbol> : <arity> = <params> | <param>`")
            })?;
        let (head, body) = rest
            .split_once('=')
            .ok_or_else(|| line.error(rest, "missing `=`"))?;
        let (symbol, arity) = head
            .split_once(':')
            .ok_or_else(|| line.error(head, "expected `<symbol> : <arity>`"))?;
        let symbol = symbol.trim();
        if symbol.is_empty() {
            return Err(line.error(head, "missing symbol name"));
        }
        if out.table.contains_key(symbol) {
            return Err(line.error(symbol, format!("symbol `{symbol}` declared twice")));
        }
        let arity = syntax::parse_usize(&line, arity.trim())?;
        let (coeffs, constant) = body
            .split_once('|')
            .ok_or_else(|| line.error(body, "missing `| <constant parameter>`"))?;
        let coeffs: Vec<&str> = coeffs.split_whitespace().collect();
        if coeffs.len() != arity {
            return Err(line.error(
                body,
                format!(
                    "expected {arity} coefficient parameters, found {}",
                    coeffs.len()
                ),
            ));
        }
        let constant = constant.trim();
        if constant.is_empty() || constant.contains(char::is_whitespace) {
            return Err(line.error(body, "expected exactly one constant parameter"));
        }
        for p in coeffs.iter().copied().chain(std::iter::once(constant)) {
            if p == ONE || p == ZERO {
                continue;
            }
            if let Some(owner) = seen.insert(p.to_string(), symbol.to_string()) {
                return Err(line.error(p, format!("parameter `{p}` already used by `{owner}`")));
            }
        }
        out.table.insert(
            symbol.to_string(),
            ParamSymbol {
                coeffs: coeffs.into_iter().map(String::from).collect(),
                constant: constant.to_string(),
            },
        );
    }
    Ok(out)
}

/// Constraints for `[l] ≥ [r]` on every rule and `[u] > [v]` on every
/// pair: one coefficient constraint per variable (always weak) and one
/// constant constraint (strict for pairs).
pub fn generate_arith_constraints(
    trs: &Trs,
    pairs: &[Rule],
    pinterp: &ParamInterpretation,
) -> Result<Vec<ArithConstraint>, ParamError> {
    let tasks = trs
        .all_rules()
        .map(|r| (r, Relation::Weak))
        .chain(pairs.iter().map(|r| (r, Relation::Strict)));
    let mut out = Vec::new();
    for (rule, rel) in tasks {
        let (lc, lconst) = pinterp.eval(&rule.lhs)?;
        let (rc, rconst) = pinterp.eval(&rule.rhs)?;
        let mut vars: Vec<&str> = lc.iter().map(|(x, _)| x.as_str()).collect();
        for (x, _) in &rc {
            if !vars.contains(&x.as_str()) {
                vars.push(x);
            }
        }
        let lookup = |side: &[(String, WordSum)], x: &str| {
            side.iter()
                .find(|(y, _)| y == x)
                .map(|(_, s)| s.clone())
                .unwrap_or_default()
        };
        for x in vars {
            out.push(ArithConstraint {
                lhs: lookup(&lc, x),
                rhs: lookup(&rc, x),
                rel: Relation::Weak,
                kind: ConstraintKind::VarCoeff(x.to_string()),
            });
        }
        out.push(ArithConstraint {
            lhs: lconst,
            rhs: rconst,
            rel,
            kind: ConstraintKind::ConstPart,
        });
    }
    Ok(out)
}

fn parse_word_sum(line: &syntax::Line<'_>, text: &str) -> Result<WordSum, ParseError> {
    let text = text.trim();
    if text == ZERO {
        return Ok(WordSum::zero());
    }
    let mut sum = WordSum::zero();
    for word in text.split('+') {
        let mut params = Vec::new();
        for p in word.split('*') {
            let p = p.trim();
            if p.is_empty() || p.contains(char::is_whitespace) {
                return Err(line.error(word, "malformed product"));
            }
            if p != ONE {
                params.push(p.to_string());
            }
        }
        sum.0.push(Word(params));
    }
    Ok(sum)
}

/// Parses constraints in the format written by [`ArithConstraint`]'s
/// `Display`, one per line.
pub fn parse_constraints(text: &str) -> Result<Vec<ArithConstraint>, ParseError> {
    let mut out = Vec::new();
    for line in syntax::significant_lines(text) {
        let (tag, body) = line
            .text
            .split_once(':')
            .ok_or_else(|| line.error_start("expected `var(<X>): ...` or `const: ...`"))?;
        let tag = tag.trim();
        let kind = if tag == "const" {
            ConstraintKind::ConstPart
        } else if let Some(x) = tag.strip_prefix("var(").and_then(|r| r.strip_suffix(')')) {
            ConstraintKind::VarCoeff(x.trim().to_string())
        } else {
            return Err(line.error(tag, format!("unknown constraint tag `{tag}`")));
        };
        let (lhs, rel, rhs) = if let Some((l, r)) = body.split_once(">=") {
            (l, Relation::Weak, r)
        } else if let Some((l, r)) = body.split_once('>') {
            (l, Relation::Strict, r)
        } else {
            return Err(line.error(body, "expected `>=` or `>`"));
        };
        out.push(ArithConstraint {
            lhs: parse_word_sum(&line, lhs)?,
            rhs: parse_word_sum(&line, rhs)?,
            rel,
            kind,
        });
    }
    Ok(out)
}

/// Nonnegative rational values for parameters; `1` and `0` are fixed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Valuation {
    values: BTreeMap<String, Rat>,
}

impl Valuation {
    pub fn new() -> Self {
        Valuation::default()
    }

    /// Sets `p` to `v`. Fails for negative values and for reserved
    /// parameters given a value other than their own.
    pub fn set(&mut self, p: &str, v: Rat) -> Result<(), String> {
        if v.is_negative() {
            return Err(format!("parameter `{p}` must be nonnegative, got {v}"));
        }
        let fixed = match p {
            ONE => Some(Rat::one()),
            ZERO => Some(Rat::zero()),
            _ => None,
        };
        if let Some(fixed) = fixed {
            if fixed != v {
                return Err(format!("reserved parameter `{p}` cannot be {v}"));
            }
            return Ok(());
        }
        self.values.insert(p.to_string(), v);
        Ok(())
    }

    pub fn get(&self, p: &str) -> Result<Rat, ParamError> {
        match p {
            ONE => Ok(Rat::one()),
            ZERO => Ok(Rat::zero()),
            _ => self
                .values
                .get(p)
                .cloned()
                .ok_or_else(|| ParamError::Unbound(p.to_string())),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Rat)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn word(&self, w: &Word) -> Result<Rat, ParamError> {
        w.params().map(|p| self.get(p)).product()
    }

    pub fn sum(&self, s: &WordSum) -> Result<Rat, ParamError> {
        s.words().iter().map(|w| self.word(w)).sum()
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, v) in &self.values {
            writeln!(f, "param {p} = {v}")?;
        }
        Ok(())
    }
}

/// Parses `param <name> = <value>` lines.
pub fn parse_valuation(text: &str) -> Result<Valuation, ParseError> {
    let mut eta = Valuation::new();
    for line in syntax::significant_lines(text) {
        let rest = line
            .text
            .trim_start()
            .strip_prefix("param")
            .filter(|r| r.starts_with(char::is_whitespace))
            .ok_or_else(|| line.error_start("expected `param <name> = <value>`"))?;
        let (name, value) = rest
            .split_once('=')
            .ok_or_else(|| line.error(rest, "missing `=`"))?;
        let name = name.trim();
        if name.is_empty() {
            return Err(line.error(rest, "missing parameter name"));
        }
        if eta.values.contains_key(name) {
            return Err(line.error(name, format!("parameter `{name}` given twice")));
        }
        let value_tok = value.trim();
        let v = syntax::parse_rat(&line, value_tok)?;
        eta.set(name, v).map_err(|msg| line.error(value_tok, msg))?;
    }
    Ok(eta)
}

/// Evaluates a constraint numerically. Strict comparisons use `>` or, when
/// `delta` is given, a difference of at least `delta`.
pub fn eval_valuation(
    c: &ArithConstraint,
    eta: &Valuation,
    delta: Option<&Rat>,
) -> Result<bool, ParamError> {
    let l = eta.sum(&c.lhs)?;
    let r = eta.sum(&c.rhs)?;
    Ok(match (c.rel, delta) {
        (Relation::Weak, _) => l >= r,
        (Relation::Strict, None) => l > r,
        (Relation::Strict, Some(d)) => &(l - r) >= d,
    })
}
