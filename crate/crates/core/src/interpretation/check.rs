use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::eval::{eval_term, EvalError, LinearForm};
use super::{BlockShape, Domain, InterpError, Interpretation};
use crate::matrix::Mat;
use crate::rat::Rat;
use crate::trs::{Rule, Trs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Weak,
    Strict,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Weak => ">=",
            Relation::Strict => ">",
        })
    }
}

/// The ordering used to compare interpreted terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Backend {
    /// Entrywise order; strict additionally needs the first component of
    /// the constant part to grow.
    Entrywise,
    /// Compares `ρ_m` of the whole tuple; strict needs a margin of `delta`.
    Value { m: u64, delta: Rat },
    /// Compares `ρ_b` block by block; strict needs a margin of `delta` on
    /// the first block.
    BlockValue { block: usize, delta: Rat },
}

impl Backend {
    /// Value backend with `m = dim` and `delta` taken from the
    /// interpretation, else `1/m`.
    pub fn value_for(interp: &Interpretation) -> Backend {
        let m = interp.dim() as u64;
        let delta = interp
            .delta
            .clone()
            .unwrap_or_else(|| Rat::new(1, m as i64));
        Backend::Value { m, delta }
    }

    /// Block-value backend with the interpretation's block size and `delta`
    /// taken from the interpretation, else `1/b`.
    pub fn block_value_for(interp: &Interpretation) -> Backend {
        let block = interp.shape.block();
        let delta = interp
            .delta
            .clone()
            .unwrap_or_else(|| Rat::new(1, block as i64));
        Backend::BlockValue { block, delta }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Backend::Entrywise => "entrywise",
            Backend::Value { .. } => "value",
            Backend::BlockValue { .. } => "block-value",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Entrywise => f.write_str("entrywise"),
            Backend::Value { m, delta } => write!(f, "value (m={m}, delta={delta})"),
            Backend::BlockValue { block, delta } => {
                write!(f, "block-value (b={block}, delta={delta})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    /// The coefficient of `var` on the left does not dominate the right.
    Coefficient { var: String },
    /// The constant part on the left does not dominate the right.
    Constant,
    /// Entrywise strictness: the first constant component does not grow.
    FirstComponent,
    /// The strict margin is below `delta`.
    Margin { margin: Rat, delta: Rat },
    /// A sampled tuple violating the constraint.
    Sampled(Witness),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Coefficient { var } => write!(f, "coefficient of {var} not dominated"),
            Failure::Constant => f.write_str("constant part not dominated"),
            Failure::FirstComponent => f.write_str("first constant component not strictly greater"),
            Failure::Margin { margin, delta } => write!(f, "margin {margin} < delta {delta}"),
            Failure::Sampled(w) => write!(f, "violated at {w}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails(Failure),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Holds => f.write_str("holds"),
            Verdict::Fails(why) => write!(f, "fails: {why}"),
        }
    }
}

/// Concrete tuple assignment on which a constraint was violated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub assignment: Vec<(String, Mat)>,
    pub lhs: Mat,
    pub rhs: Mat,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (v, x) in &self.assignment {
            write!(f, "{v}={x} ")?;
        }
        write!(f, "(lhs {}, rhs {})", self.lhs, self.rhs)
    }
}

/// Summed constant parts under a value backend: `lhs` and `rhs` are the
/// ρ-values of the constants (first block for the block backend).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RhoSummary {
    pub lhs: Rat,
    pub rhs: Rat,
    pub delta: Option<Rat>,
}

impl RhoSummary {
    pub fn margin(&self) -> Rat {
        &self.lhs - &self.rhs
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub verdict: Verdict,
    pub rho: Option<RhoSummary>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("strict comparison needs a positive delta, got {0}")]
    NonPositiveDelta(Rat),
    #[error("value divisor m must be positive")]
    ZeroDivisor,
    #[error("block size {block} does not divide dimension {dim}")]
    BadBlock { dim: usize, block: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Interp(#[from] InterpError),
}

fn same_dim(l: &LinearForm, r: &LinearForm) -> Result<(), CheckError> {
    if l.dim() != r.dim() {
        return Err(CheckError::DimMismatch(l.dim(), r.dim()));
    }
    Ok(())
}

fn check_delta(rel: Relation, delta: &Rat) -> Result<(), CheckError> {
    if rel == Relation::Strict && (delta.is_zero() || delta.is_negative()) {
        return Err(CheckError::NonPositiveDelta(delta.clone()));
    }
    Ok(())
}

fn dominates(a: &[Rat], b: &[Rat]) -> bool {
    a.iter().zip(b).all(|(x, y)| x >= y)
}

/// Entrywise comparison of two linear forms.
pub fn check_entrywise(
    lhs: &LinearForm,
    rhs: &LinearForm,
    rel: Relation,
) -> Result<Outcome, CheckError> {
    same_dim(lhs, rhs)?;
    let verdict = (|| {
        for var in lhs.joint_vars(rhs) {
            if !dominates(lhs.coeff(var).entries(), rhs.coeff(var).entries()) {
                return Verdict::Fails(Failure::Coefficient {
                    var: var.to_string(),
                });
            }
        }
        if !dominates(lhs.constant.entries(), rhs.constant.entries()) {
            return Verdict::Fails(Failure::Constant);
        }
        if rel == Relation::Strict && lhs.constant.get(0, 0) <= rhs.constant.get(0, 0) {
            return Verdict::Fails(Failure::FirstComponent);
        }
        Verdict::Holds
    })();
    Ok(Outcome { verdict, rho: None })
}

/// Comparison of `ρ_m`-values, decided by column-sum domination.
pub fn check_value(
    lhs: &LinearForm,
    rhs: &LinearForm,
    rel: Relation,
    m: u64,
    delta: &Rat,
) -> Result<Outcome, CheckError> {
    same_dim(lhs, rhs)?;
    check_delta(rel, delta)?;
    if m == 0 {
        return Err(CheckError::ZeroDivisor);
    }
    let mm = Rat::from(m);
    let rho = RhoSummary {
        lhs: lhs.constant.sum() / &mm,
        rhs: rhs.constant.sum() / &mm,
        delta: (rel == Relation::Strict).then(|| delta.clone()),
    };
    let verdict = (|| {
        for var in lhs.joint_vars(rhs) {
            if !dominates(&lhs.coeff(var).column_sums(), &rhs.coeff(var).column_sums()) {
                return Verdict::Fails(Failure::Coefficient {
                    var: var.to_string(),
                });
            }
        }
        let margin = rho.margin();
        if margin.is_negative() {
            return Verdict::Fails(Failure::Constant);
        }
        if rel == Relation::Strict && &margin < delta {
            return Verdict::Fails(Failure::Margin {
                margin,
                delta: delta.clone(),
            });
        }
        Verdict::Holds
    })();
    Ok(Outcome {
        verdict,
        rho: Some(rho),
    })
}

/// Block sums of a matrix (`b×b` blocks) or column (`b`-segments).
fn block_sums(m: &Mat, b: usize) -> Mat {
    let w = if m.cols() == 1 { 1 } else { b };
    Mat::from_fn(m.rows() / b, m.cols() / w, |i, j| {
        m.submatrix(i * b, j * w, b, w).sum()
    })
}

/// Block-by-block comparison of `ρ_b`-values on block-constant tuples.
pub fn check_block_value(
    lhs: &LinearForm,
    rhs: &LinearForm,
    rel: Relation,
    block: usize,
    delta: &Rat,
) -> Result<Outcome, CheckError> {
    same_dim(lhs, rhs)?;
    check_delta(rel, delta)?;
    if block == 0 || !lhs.dim().is_multiple_of(block) {
        return Err(CheckError::BadBlock {
            dim: lhs.dim(),
            block,
        });
    }
    let bb = Rat::from(block);
    let lc = block_sums(&lhs.constant, block);
    let rc = block_sums(&rhs.constant, block);
    let rho = RhoSummary {
        lhs: lc.get(0, 0) / &bb,
        rhs: rc.get(0, 0) / &bb,
        delta: (rel == Relation::Strict).then(|| delta.clone()),
    };
    let verdict = (|| {
        for var in lhs.joint_vars(rhs) {
            let l = block_sums(&lhs.coeff(var), block);
            let r = block_sums(&rhs.coeff(var), block);
            if !dominates(l.entries(), r.entries()) {
                return Verdict::Fails(Failure::Coefficient {
                    var: var.to_string(),
                });
            }
        }
        if !dominates(lc.entries(), rc.entries()) {
            return Verdict::Fails(Failure::Constant);
        }
        let margin = rho.margin();
        if rel == Relation::Strict && &margin < delta {
            return Verdict::Fails(Failure::Margin {
                margin,
                delta: delta.clone(),
            });
        }
        Verdict::Holds
    })();
    Ok(Outcome {
        verdict,
        rho: Some(rho),
    })
}

/// Compares two linear forms under `backend`.
pub fn check_forms(
    lhs: &LinearForm,
    rhs: &LinearForm,
    rel: Relation,
    backend: &Backend,
) -> Result<Outcome, CheckError> {
    match backend {
        Backend::Entrywise => check_entrywise(lhs, rhs, rel),
        Backend::Value { m, delta } => check_value(lhs, rhs, rel, *m, delta),
        Backend::BlockValue { block, delta } => check_block_value(lhs, rhs, rel, *block, delta),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintResult {
    pub label: String,
    pub relation: Relation,
    pub verdict: Verdict,
    pub rho: Option<RhoSummary>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub backend: Backend,
    pub results: Vec<ConstraintResult>,
}

impl CheckReport {
    pub fn holds(&self) -> bool {
        self.results.iter().all(|r| r.verdict.holds())
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConstraintResult> {
        self.results.iter().filter(|r| !r.verdict.holds())
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "backend: {}", self.backend)?;
        for r in &self.results {
            write!(f, "[{}] {}: {}", r.relation, r.label, r.verdict)?;
            if let Some(rho) = &r.rho {
                write!(
                    f,
                    " (rho {} vs {}, margin {}",
                    rho.lhs,
                    rho.rhs,
                    rho.margin()
                )?;
                if let Some(d) = &rho.delta {
                    write!(f, ", delta {d}")?;
                }
                f.write_str(")")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Checks every rule of `trs` weakly and every pair strictly.
pub fn check_problem(
    trs: &Trs,
    pairs: &[Rule],
    interp: &Interpretation,
    backend: &Backend,
) -> Result<CheckReport, CheckError> {
    interp.covers(trs.all_rules().chain(pairs))?;
    let tasks = trs
        .rules
        .iter()
        .map(|r| (r, Relation::Weak, "->"))
        .chain(trs.relative.iter().map(|r| (r, Relation::Weak, "->=")))
        .chain(pairs.iter().map(|r| (r, Relation::Strict, "->")));
    let mut results = Vec::new();
    for (rule, rel, arrow) in tasks {
        let l = eval_term(interp, &rule.lhs)?;
        let r = eval_term(interp, &rule.rhs)?;
        let outcome = check_forms(&l, &r, rel, backend)?;
        results.push(ConstraintResult {
            label: format!("{} {arrow} {}", rule.lhs, rule.rhs),
            relation: rel,
            verdict: outcome.verdict,
            rho: outcome.rho,
        });
    }
    Ok(CheckReport {
        backend: backend.clone(),
        results,
    })
}

/// Parameters for [`sample_falsify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleParams {
    pub shape: BlockShape,
    pub domain: Domain,
    pub trials: usize,
    pub bound: u64,
    pub seed: u64,
}

/// Scalar arithmetic needed to evaluate and compare forms concretely.
trait Scalar: Clone + Ord + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> {
    fn zero() -> Self;
}

impl Scalar for i128 {
    fn zero() -> Self {
        0
    }
}

impl Scalar for Rat {
    fn zero() -> Self {
        Rat::zero()
    }
}

struct Dense<T> {
    n: usize,
    coeffs: Vec<Vec<T>>,
    constant: Vec<T>,
}

impl<T: Scalar> Dense<T> {
    fn new(form: &LinearForm, vars: &[&str], conv: &impl Fn(&Rat) -> Option<T>) -> Option<Self> {
        let coeffs = vars
            .iter()
            .map(|v| form.coeff(v).entries().iter().map(conv).collect())
            .collect::<Option<Vec<_>>>()?;
        let constant = form
            .constant
            .entries()
            .iter()
            .map(conv)
            .collect::<Option<_>>()?;
        Some(Dense {
            n: form.dim(),
            coeffs,
            constant,
        })
    }

    fn apply(&self, xs: &[Vec<T>]) -> Vec<T> {
        let mut out = self.constant.clone();
        for (c, x) in self.coeffs.iter().zip(xs) {
            for (i, o) in out.iter_mut().enumerate() {
                let row = &c[i * self.n..(i + 1) * self.n];
                let mut acc = o.clone();
                for (a, b) in row.iter().zip(x) {
                    acc = acc + a.clone() * b.clone();
                }
                *o = acc;
            }
        }
        out
    }
}

/// Semantic comparison on concrete tuples; strictness margins are given as
/// `delta = num/den` so that integer arithmetic suffices.
struct Semantics<T> {
    kind: SemKind,
    m: T,
    num: T,
    den: T,
}

#[derive(Clone, Copy)]
enum SemKind {
    Entrywise,
    Value,
    Block(usize),
}

impl<T: Scalar> Semantics<T> {
    fn holds(&self, u: &[T], w: &[T], rel: Relation) -> bool {
        let sum = |xs: &[T]| xs.iter().cloned().fold(T::zero(), |a, b| a + b);
        let margin_ok = |l: T, r: T| {
            // (l - r)/m >= num/den
            (l - r) * self.den.clone() >= self.num.clone() * self.m.clone()
        };
        match self.kind {
            SemKind::Entrywise => {
                u.iter().zip(w).all(|(a, b)| a >= b) && (rel == Relation::Weak || u[0] > w[0])
            }
            SemKind::Value => {
                let (l, r) = (sum(u), sum(w));
                if rel == Relation::Weak {
                    l >= r
                } else {
                    margin_ok(l, r)
                }
            }
            SemKind::Block(b) => {
                let blocks_ok = u.chunks(b).zip(w.chunks(b)).all(|(x, y)| sum(x) >= sum(y));
                blocks_ok && (rel == Relation::Weak || margin_ok(sum(&u[..b]), sum(&w[..b])))
            }
        }
    }
}

fn backend_semantics(backend: &Backend) -> (SemKind, Rat, Rat) {
    match backend {
        Backend::Entrywise => (SemKind::Entrywise, Rat::one(), Rat::zero()),
        Backend::Value { m, delta } => (SemKind::Value, Rat::from(*m), delta.clone()),
        Backend::BlockValue { block, delta } => {
            (SemKind::Block(*block), Rat::from(*block), delta.clone())
        }
    }
}

const FAST_LIMIT: i128 = 1 << 40;

fn to_small(x: &Rat) -> Option<i128> {
    if !x.is_integer() {
        return None;
    }
    let v = x.numer().to_i128()?;
    (v.abs() < FAST_LIMIT).then_some(v)
}

/// Draws random block-constant tuples and returns the first one on which
/// `lhs rel rhs` fails under the backend's ordering.
pub fn sample_falsify(
    lhs: &LinearForm,
    rhs: &LinearForm,
    rel: Relation,
    backend: &Backend,
    params: SampleParams,
) -> Option<Witness> {
    let vars = lhs.joint_vars(rhs);
    let (kind, m, delta) = backend_semantics(backend);
    let n = params.shape.dim();
    let b = params.shape.block();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let small_values = params.domain == Domain::Naturals && (params.bound as i128) < FAST_LIMIT;
    let fast = small_values
        .then(|| {
            let l = Dense::<i128>::new(lhs, &vars, &to_small)?;
            let r = Dense::<i128>::new(rhs, &vars, &to_small)?;
            let sem = Semantics {
                kind,
                m: to_small(&m)?,
                num: delta.numer().to_i128()?,
                den: delta.denom().to_i128()?,
            };
            Some((l, r, sem))
        })
        .flatten();

    // Block values as fractions k/d; d = 1 over the naturals.
    let draw = |rng: &mut ChaCha8Rng| -> Vec<Vec<(i64, i64)>> {
        vars.iter()
            .map(|_| {
                let mut x = Vec::with_capacity(n);
                for _ in 0..n / b {
                    let v = match params.domain {
                        Domain::Naturals => (rng.gen_range(0..=params.bound) as i64, 1),
                        Domain::NonnegRationals => {
                            let d: i64 = rng.gen_range(1..=4);
                            (rng.gen_range(0..=params.bound as i64 * d), d)
                        }
                    };
                    x.extend(std::iter::repeat_n(v, b));
                }
                x
            })
            .collect()
    };
    let to_rats = |xs: &[Vec<(i64, i64)>]| -> Vec<Vec<Rat>> {
        xs.iter()
            .map(|x| x.iter().map(|&(k, d)| Rat::new(k, d)).collect())
            .collect()
    };

    let slow = fast.is_none().then(|| {
        let l = Dense::<Rat>::new(lhs, &vars, &|x| Some(x.clone())).expect("total");
        let r = Dense::<Rat>::new(rhs, &vars, &|x| Some(x.clone())).expect("total");
        let sem = Semantics {
            kind,
            m,
            num: Rat::from_bigint(delta.numer()),
            den: Rat::from_bigint(delta.denom()),
        };
        (l, r, sem)
    });

    for _ in 0..params.trials {
        let xs = draw(&mut rng);
        let violated = match (&fast, &slow) {
            (Some((l, r, sem)), _) => {
                let xi: Vec<Vec<i128>> = xs
                    .iter()
                    .map(|x| x.iter().map(|&(k, _)| k as i128).collect())
                    .collect();
                !sem.holds(&l.apply(&xi), &r.apply(&xi), rel)
            }
            (None, Some((l, r, sem))) => {
                let xr = to_rats(&xs);
                !sem.holds(&l.apply(&xr), &r.apply(&xr), rel)
            }
            (None, None) => unreachable!("one evaluation path is always prepared"),
        };
        if violated {
            let assignment: Vec<(String, Mat)> = vars
                .iter()
                .zip(to_rats(&xs))
                .map(|(v, x)| (v.to_string(), Mat::column(x)))
                .collect();
            let map: BTreeMap<String, Mat> = assignment.iter().cloned().collect();
            return Some(Witness {
                lhs: lhs.apply(&map),
                rhs: rhs.apply(&map),
                assignment,
            });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interpretation::parse_interpretation;
    use crate::interpretation::tests::EX2;
    use crate::trs::{dependency_pairs, parse_trs};

    const EX1: &str = "(VAR x) (RULES f(f(x)) -> f(g(f(x))) f(g(f(x))) -> x)";

    const EXPANDED: &str = "\
domain natural
dim 2
interp f : 1
  M1 = [1 1 ; 1 1]
  C = [2 ; 2]
interp g : 1
  M1 = [0 1 ; 0 0]
  C = [1 ; 0]
interp f# : 1
  M1 = [1 0 ; 0 1]
";

    fn forms(interp: &str, rule: &str) -> (LinearForm, LinearForm) {
        let i = parse_interpretation(interp).unwrap();
        let trs = parse_trs(&format!("(VAR x) (RULES {rule})")).unwrap();
        let r = &trs.rules[0];
        (
            eval_term(&i, &r.lhs).unwrap(),
            eval_term(&i, &r.rhs).unwrap(),
        )
    }

    fn half() -> Rat {
        Rat::new(1, 2)
    }

    #[test]
    fn entrywise_examples() {
        let (l, r) = forms(EX2, "f#(f(x)) -> f#(x)");
        assert!(check_entrywise(&l, &r, Relation::Strict)
            .unwrap()
            .verdict
            .holds());
        assert!(check_entrywise(&l, &l, Relation::Weak)
            .unwrap()
            .verdict
            .holds());
        assert_eq!(
            check_entrywise(&l, &l, Relation::Strict).unwrap().verdict,
            Verdict::Fails(Failure::FirstComponent)
        );
        let (l, r) = forms(EXPANDED, "f#(f(x)) -> f#(g(f(x)))");
        assert_eq!(
            check_entrywise(&l, &r, Relation::Strict).unwrap().verdict,
            Verdict::Fails(Failure::Constant)
        );
    }

    #[test]
    fn value_examples() {
        let (l, r) = forms(EXPANDED, "f#(f(x)) -> f#(g(f(x)))");
        let out = check_value(&l, &r, Relation::Strict, 2, &half()).unwrap();
        assert!(out.verdict.holds());
        let rho = out.rho.unwrap();
        assert_eq!(
            (rho.lhs.clone(), rho.rhs.clone()),
            (Rat::from_int(2), Rat::new(3, 2))
        );
        assert_eq!(rho.margin(), half());
        let out = check_value(&l, &r, Relation::Strict, 2, &Rat::one()).unwrap();
        assert!(matches!(
            out.verdict,
            Verdict::Fails(Failure::Margin { .. })
        ));
        assert!(check_value(&l, &l, Relation::Weak, 2, &half())
            .unwrap()
            .verdict
            .holds());
        assert_eq!(
            check_value(&l, &r, Relation::Strict, 2, &Rat::zero()),
            Err(CheckError::NonPositiveDelta(Rat::zero()))
        );
    }

    #[test]
    fn dimension_mismatch() {
        let (l, _) = forms(EX2, "f(x) -> x");
        let r = LinearForm::variable("x", 3);
        assert_eq!(
            check_entrywise(&l, &r, Relation::Weak),
            Err(CheckError::DimMismatch(2, 3))
        );
    }

    #[test]
    fn rhs_only_variable_fails_weak() {
        let l = LinearForm {
            coeffs: vec![],
            constant: Mat::from_ints(&[[5]]),
        };
        let r = LinearForm::variable("y", 1);
        let v = check_value(&l, &r, Relation::Weak, 1, &Rat::one())
            .unwrap()
            .verdict;
        assert_eq!(v, Verdict::Fails(Failure::Coefficient { var: "y".into() }));
    }

    #[test]
    fn problem_examples() {
        let trs = parse_trs(EX1).unwrap();
        let pairs = dependency_pairs(&trs);
        let ex2 = parse_interpretation(EX2).unwrap();
        let report = check_problem(&trs, &pairs, &ex2, &Backend::Entrywise).unwrap();
        assert_eq!(report.results.len(), 4);
        assert!(report.holds(), "{report}");

        let expanded = parse_interpretation(EXPANDED).unwrap();
        let value = Backend::Value {
            m: 2,
            delta: half(),
        };
        assert!(check_problem(&trs, &pairs, &expanded, &value)
            .unwrap()
            .holds());
        let entry = check_problem(&trs, &pairs, &expanded, &Backend::Entrywise).unwrap();
        assert_eq!(entry.failures().count(), 1);

        let empty = parse_trs("").unwrap();
        assert!(check_problem(&empty, &[], &ex2, &Backend::Entrywise)
            .unwrap()
            .holds());
    }

    #[test]
    fn problem_requires_full_interpretation() {
        let trs = parse_trs("(VAR x) (RULES h(x) -> x)").unwrap();
        let ex2 = parse_interpretation(EX2).unwrap();
        assert!(matches!(
            check_problem(&trs, &[], &ex2, &Backend::Entrywise),
            Err(CheckError::Interp(InterpError::Uninterpreted(_)))
        ));
    }

    #[test]
    fn defaults() {
        let i = parse_interpretation(EX2).unwrap();
        assert_eq!(
            Backend::value_for(&i),
            Backend::Value {
                m: 2,
                delta: half()
            }
        );
        assert_eq!(
            Backend::block_value_for(&i),
            Backend::BlockValue {
                block: 1,
                delta: Rat::one()
            }
        );
    }

    fn params(seed: u64) -> SampleParams {
        SampleParams {
            shape: BlockShape::new(2, 1).unwrap(),
            domain: Domain::Naturals,
            trials: 1000,
            bound: 10,
            seed,
        }
    }

    #[test]
    fn sampling_agrees_with_holds() {
        let (l, r) = forms(EX2, "f(f(x)) -> f(g(f(x)))");
        assert!(check_entrywise(&l, &r, Relation::Weak)
            .unwrap()
            .verdict
            .holds());
        for seed in 0..3 {
            assert_eq!(
                sample_falsify(&l, &r, Relation::Weak, &Backend::Entrywise, params(seed)),
                None
            );
        }
        assert_eq!(
            sample_falsify(&l, &l, Relation::Weak, &Backend::Entrywise, params(9)),
            None
        );
    }

    #[test]
    fn sampling_finds_broken_instance() {
        let swapped = EX2
            .replace("M1 = [1 1 ; 1 1]", "M1 = TMP")
            .replace("M1 = [0 1 ; 0 0]", "M1 = [1 1 ; 1 1]")
            .replace("M1 = TMP", "M1 = [0 1 ; 0 0]");
        let (l, r) = forms(&swapped, "f#(f(x)) -> f#(x)");
        let w = sample_falsify(&l, &r, Relation::Strict, &Backend::Entrywise, params(1))
            .expect("violation exists");
        assert!(!check_entrywise(
            &LinearForm {
                coeffs: vec![],
                constant: w.lhs.clone()
            },
            &LinearForm {
                coeffs: vec![],
                constant: w.rhs.clone()
            },
            Relation::Strict
        )
        .unwrap()
        .verdict
        .holds());
    }

    #[test]
    fn sampling_rational_domain() {
        let (l, r) = forms(EXPANDED, "f#(f(x)) -> f#(g(f(x)))");
        let p = SampleParams {
            domain: Domain::NonnegRationals,
            ..params(4)
        };
        let value = Backend::Value {
            m: 2,
            delta: half(),
        };
        assert_eq!(sample_falsify(&l, &r, Relation::Strict, &value, p), None);
        assert!(sample_falsify(&l, &r, Relation::Strict, &Backend::Entrywise, p).is_some());
    }
}
