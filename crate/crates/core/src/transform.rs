//! Interpretation-level transformations: natural interpretations to
//! bit-matrix interpretations, and rational interpretations to natural ones
//! through an encoding. Every transformation can be re-checked with
//! [`verify_transform`].

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::encoding::{required_products, Encoding, EncodingReport, RequiredProducts};
use crate::interpretation::{
    check_problem, generate_arith_constraints, Backend, BlockShape, CheckError, CheckReport,
    Domain, Interpretation, ParamError, ParamInterpretation, SymbolInterp, Valuation,
};
use crate::matrix::Mat;
use crate::rat::Rat;
use crate::representation::{lift_int, lift_vec, mu_int, RepError};
use crate::trs::{Rule, Trs};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("transformation needs an interpretation over the naturals")]
    NotNatural,
    #[error("lifting factor must be at least 2, got {0}")]
    BadFactor(u64),
    #[error("entry {0} is neither natural nor a value of the encoding")]
    NotRepresentable(Rat),
    #[error("encoding fails its value or product conditions:\n{0}")]
    InvalidEncoding(EncodingReport),
    #[error("encoding is not compatible: missing products {}", .missing.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(", "))]
    Incompatible {
        missing: Vec<Rat>,
        report: EncodingReport,
    },
    #[error(transparent)]
    Representation(#[from] RepError),
    #[error(transparent)]
    Param(#[from] ParamError),
}

/// Result of [`interp_to_blocks`]: the lifted interpretation and the factor
/// `N` used (1 when the input was left unchanged).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lifted {
    pub interp: Interpretation,
    pub factor: u64,
}

fn require_natural(interp: &Interpretation) -> Result<(), TransformError> {
    if interp.domain != Domain::Naturals {
        return Err(TransformError::NotNatural);
    }
    Ok(())
}

/// Lifts every coefficient matrix entrywise by `μ_N` and every constant
/// vector by `ν_N`, giving an `(N·n, N·b)` interpretation.
pub fn interp_to_blocks_with(
    interp: &Interpretation,
    n: u64,
) -> Result<Interpretation, TransformError> {
    require_natural(interp)?;
    if n < 2 {
        return Err(TransformError::BadFactor(n));
    }
    let size = n as usize;
    let mut table = BTreeMap::new();
    for (symbol, si) in &interp.table {
        let args = si
            .args
            .iter()
            .map(|m| lift_int(n, m))
            .collect::<Result<Vec<_>, _>>()?;
        let constant = lift_vec(size, &si.constant);
        table.insert(symbol.clone(), SymbolInterp { args, constant });
    }
    let shape = BlockShape::new(interp.dim() * size, interp.shape.block() * size)
        .expect("scaled shape keeps divisibility");
    Ok(Interpretation {
        shape,
        domain: Domain::Naturals,
        delta: interp.delta.clone(),
        table,
    })
}

/// [`interp_to_blocks_with`] using `N` = the largest entry of any matrix or
/// vector. For `N ≤ 1` the interpretation is returned unchanged.
pub fn interp_to_blocks(interp: &Interpretation) -> Result<Lifted, TransformError> {
    require_natural(interp)?;
    let n = interp
        .max_entry()
        .to_u64()
        .expect("natural entries fit in u64");
    if n <= 1 {
        return Ok(Lifted {
            interp: interp.clone(),
            factor: 1,
        });
    }
    Ok(Lifted {
        interp: interp_to_blocks_with(interp, n)?,
        factor: n,
    })
}

/// One lifting step: factor and dimensions before and after.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceStep {
    pub factor: u64,
    pub dim_before: usize,
    pub dim_after: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TransformTrace {
    pub steps: Vec<TraceStep>,
}

impl TransformTrace {
    /// Product of all factors.
    pub fn final_scale(&self) -> u64 {
        self.steps.iter().map(|s| s.factor).product()
    }
}

impl fmt::Display for TransformTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            writeln!(
                f,
                "step {}: N={} dim {} -> {}",
                i + 1,
                s.factor,
                s.dim_before,
                s.dim_after
            )?;
        }
        write!(f, "scale {}", self.final_scale())
    }
}

/// Repeats [`interp_to_blocks_with`] with `N` = the largest coefficient
/// matrix entry until all coefficient matrices are bit matrices. Constant
/// vectors keep their entry values.
pub fn interp_to_bits(
    interp: &Interpretation,
) -> Result<(Interpretation, TransformTrace), TransformError> {
    require_natural(interp)?;
    let mut current = interp.clone();
    let mut trace = TransformTrace::default();
    loop {
        let n = current
            .max_matrix_entry()
            .to_u64()
            .expect("natural entries fit in u64");
        if n <= 1 {
            return Ok((current, trace));
        }
        let next = interp_to_blocks_with(&current, n)?;
        trace.steps.push(TraceStep {
            factor: n,
            dim_before: current.dim(),
            dim_after: next.dim(),
        });
        current = next;
    }
}

/// Output of [`expand_rational`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expansion {
    pub interp: Interpretation,
    pub warnings: Vec<String>,
}

fn expand_entry(x: &Rat, enc: &Encoding) -> Result<Mat, TransformError> {
    let b = enc.dim();
    if let Some(n) = x.to_integer().filter(|_| x.is_natural()) {
        return Ok(if b >= 2 {
            mu_int(b as u64, &n)?
        } else {
            Mat::scalar(1, x.clone())
        });
    }
    enc.get(x)
        .cloned()
        .ok_or_else(|| TransformError::NotRepresentable(x.clone()))
}

/// Replaces every entry of a dimension-`β` interpretation by its matrix
/// image: naturals `x ↦ μ_b(x)`, encoded rationals `q ↦ enc[q]`, and
/// constant entries `v ↦ image(v)·1_b`. The result has dimension `β·b` and
/// is viewed with block size 1.
///
/// With `required` given, the encoding must be compatible with it;
/// otherwise a warning is recorded.
pub fn expand_rational(
    interp: &Interpretation,
    enc: &Encoding,
    required: Option<&RequiredProducts>,
) -> Result<Expansion, TransformError> {
    let report = enc.validate();
    if !report.is_valid() {
        return Err(TransformError::InvalidEncoding(report));
    }
    let mut warnings = Vec::new();
    match required {
        Some(req) => {
            let compat = enc.compatibility(req);
            if !compat.is_ok() {
                return Err(TransformError::Incompatible {
                    missing: compat.missing,
                    report: compat.report,
                });
            }
        }
        None => warnings
            .push("no constraint context: compatibility of the encoding not checked".to_string()),
    }

    let b = enc.dim();
    let ones = Mat::constant(b, 1, Rat::one());
    let expand = |m: &Mat| -> Result<Mat, TransformError> {
        let grid = (0..m.rows())
            .map(|i| {
                (0..m.cols())
                    .map(|j| expand_entry(m.get(i, j), enc))
                    .collect()
            })
            .collect::<Result<Vec<Vec<Mat>>, _>>()?;
        Ok(Mat::from_blocks(&grid).expect("uniform blocks"))
    };
    let mut table = BTreeMap::new();
    for (symbol, si) in &interp.table {
        let args = si.args.iter().map(&expand).collect::<Result<Vec<_>, _>>()?;
        let image = expand(&si.constant)?;
        let constant = &image * &ones;
        table.insert(symbol.clone(), SymbolInterp { args, constant });
    }
    let shape = BlockShape::new(interp.dim() * b, 1).expect("unit blocks");
    Ok(Expansion {
        interp: Interpretation {
            shape,
            domain: Domain::Naturals,
            delta: interp.delta.clone(),
            table,
        },
        warnings,
    })
}

/// Expands the dimension-1 interpretation given by `pinterp` under `eta`,
/// requiring compatibility with the constraints of `trs` and `pairs`.
pub fn expand_valuation(
    pinterp: &ParamInterpretation,
    eta: &Valuation,
    enc: &Encoding,
    trs: &Trs,
    pairs: &[Rule],
    delta: Option<Rat>,
) -> Result<Expansion, TransformError> {
    let constraints = generate_arith_constraints(trs, pairs, pinterp)?;
    let req = required_products(&constraints, eta)?;
    let mut rational = pinterp.instantiate(eta)?;
    rational.delta = delta;
    expand_rational(&rational, enc, Some(&req))
}

/// What a transformation promises about satisfaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Promise {
    /// Before holds if and only if after holds.
    Equivalence,
    /// Before holds implies after holds.
    Implication,
}

impl fmt::Display for Promise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Promise::Equivalence => "before holds iff after holds",
            Promise::Implication => "before holds implies after holds",
        })
    }
}

/// Checks performed on both sides of a transformation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformCheck {
    pub promise: Promise,
    pub before: CheckReport,
    pub after: CheckReport,
}

impl TransformCheck {
    /// Whether the reports respect the promise. For an equivalence, every
    /// constraint must get the same verdict kind on both sides.
    pub fn consistent(&self) -> bool {
        match self.promise {
            Promise::Equivalence => {
                self.before.results.len() == self.after.results.len()
                    && self
                        .before
                        .results
                        .iter()
                        .zip(&self.after.results)
                        .all(|(b, a)| b.verdict.holds() == a.verdict.holds())
            }
            Promise::Implication => !self.before.holds() || self.after.holds(),
        }
    }
}

impl fmt::Display for TransformCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "before:")?;
        write!(f, "{}", self.before)?;
        writeln!(f, "after:")?;
        write!(f, "{}", self.after)?;
        writeln!(f, "promise: {}", self.promise)?;
        write!(
            f,
            "consistent: {}",
            if self.consistent() { "yes" } else { "NO" }
        )
    }
}

/// One side of a transformation check.
#[derive(Debug, Clone, Copy)]
pub struct CheckInput<'a> {
    pub trs: &'a Trs,
    pub pairs: &'a [Rule],
    pub interp: &'a Interpretation,
    pub backend: &'a Backend,
}

pub fn verify_transform(
    before: CheckInput<'_>,
    after: CheckInput<'_>,
    promise: Promise,
) -> Result<TransformCheck, CheckError> {
    Ok(TransformCheck {
        promise,
        before: check_problem(before.trs, before.pairs, before.interp, before.backend)?,
        after: check_problem(after.trs, after.pairs, after.interp, after.backend)?,
    })
}

/// The backend to use after lifting by `factor`: ρ divisors scale, δ stays.
pub fn scaled_backend(backend: &Backend, factor: u64) -> Backend {
    match backend {
        Backend::Entrywise => Backend::Entrywise,
        Backend::Value { m, delta } => Backend::Value {
            m: m * factor,
            delta: delta.clone(),
        },
        Backend::BlockValue { block, delta } => Backend::BlockValue {
            block: block * factor as usize,
            delta: delta.clone(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{catalog, Catalog};
    use crate::interpretation::{
        parse_interpretation, parse_param_interpretation, parse_valuation,
    };
    use crate::matrix::jordan;
    use crate::trs::{dependency_pairs, parse_trs};

    fn natural(dim: usize, entries: &[(&str, Vec<Mat>, Mat)]) -> Interpretation {
        let table = entries
            .iter()
            .map(|(s, args, c)| {
                (
                    s.to_string(),
                    SymbolInterp {
                        args: args.clone(),
                        constant: c.clone(),
                    },
                )
            })
            .collect();
        Interpretation::new(
            BlockShape::new(dim, 1).unwrap(),
            Domain::Naturals,
            None,
            table,
        )
        .unwrap()
    }

    #[test]
    fn single_coefficient_three() {
        let i = natural(
            1,
            &[("f", vec![Mat::from_ints(&[[3]])], Mat::from_ints(&[[0]]))],
        );
        let (bits, trace) = interp_to_bits(&i).unwrap();
        assert_eq!(trace.final_scale(), 3);
        assert_eq!(
            bits.get("f").unwrap().args[0],
            Mat::constant(3, 3, Rat::one())
        );
    }

    #[test]
    fn two_step_reduction() {
        let i = natural(
            2,
            &[(
                "f",
                vec![Mat::from_ints(&[[2, 3], [0, 1]])],
                Mat::zeros(2, 1),
            )],
        );
        let (bits, trace) = interp_to_bits(&i).unwrap();
        let factors: Vec<u64> = trace.steps.iter().map(|s| s.factor).collect();
        assert_eq!(factors, [3, 2]);
        assert_eq!(trace.final_scale(), 6);
        let m = &bits.get("f").unwrap().args[0];
        assert_eq!(m.shape(), (12, 12));
        assert!(m.is_bit());
    }

    #[test]
    fn bit_interpretations_are_fixed_points() {
        let i = parse_interpretation(crate::interpretation::tests::EX2).unwrap();
        let lifted = interp_to_blocks(&i).unwrap();
        assert_eq!(lifted.factor, 1);
        assert_eq!(lifted.interp, i);
        let (same, trace) = interp_to_bits(&i).unwrap();
        assert_eq!(same, i);
        assert!(trace.steps.is_empty());
        assert_eq!(trace.final_scale(), 1);
    }

    #[test]
    fn vectors_count_towards_the_factor() {
        let i = natural(1, &[("a", vec![], Mat::from_ints(&[[3]]))]);
        let lifted = interp_to_blocks(&i).unwrap();
        assert_eq!(lifted.factor, 3);
        assert_eq!(
            lifted.interp.get("a").unwrap().constant,
            Mat::constant(3, 1, Rat::from_int(3))
        );
        assert_eq!(lifted.interp.shape.block(), 3);
        // bits only look at matrices
        assert!(interp_to_bits(&i).unwrap().1.steps.is_empty());
    }

    #[test]
    fn rejects_rational_domain() {
        let mut i = parse_interpretation(crate::interpretation::tests::EX2).unwrap();
        i.domain = Domain::NonnegRationals;
        assert_eq!(interp_to_blocks(&i), Err(TransformError::NotNatural));
        assert!(interp_to_blocks_with(
            &parse_interpretation(crate::interpretation::tests::EX2).unwrap(),
            1
        )
        .is_err());
    }

    const EX14: &str =
        "pinterp f : 1 = f1 | f0\npinterp g : 1 = g1 | g0\npinterp f# : 1 = F1 | F0\n";
    const ETA: &str =
        "param f1 = 2\nparam f0 = 2\nparam g1 = 1/2\nparam g0 = 1/2\nparam F1 = 1\nparam F0 = 0\n";

    #[test]
    fn expands_example_valuation() {
        let trs = parse_trs("(VAR x) (RULES f(f(x)) -> f(g(f(x))) f(g(f(x))) -> x)").unwrap();
        let pairs = dependency_pairs(&trs);
        let pi = parse_param_interpretation(EX14).unwrap();
        let eta = parse_valuation(ETA).unwrap();
        let enc = catalog(Catalog::Half);
        let out = expand_valuation(&pi, &eta, &enc, &trs, &pairs, Some(Rat::new(1, 2))).unwrap();
        assert!(out.warnings.is_empty());
        let i = out.interp;
        assert_eq!(i.dim(), 2);
        let f = i.get("f").unwrap();
        assert_eq!(f.args[0], Mat::constant(2, 2, Rat::one()));
        assert_eq!(f.constant, Mat::from_ints(&[[2], [2]]));
        let g = i.get("g").unwrap();
        assert_eq!(g.args[0], jordan(2, 1));
        assert_eq!(g.constant, Mat::from_ints(&[[1], [0]]));
        let big_f = i.get("f#").unwrap();
        assert_eq!(big_f.args[0], Mat::identity(2));
        assert!(big_f.constant.is_zero());
    }

    #[test]
    fn incompatible_context_is_reported() {
        let trs = parse_trs(
            "(VAR x) (RULES f(f(x)) -> f(g(f(x))) f(g(f(x))) -> x f(g(f(x))) -> f(g(f(g(x)))))",
        )
        .unwrap();
        let pi = parse_param_interpretation(EX14).unwrap();
        let eta = parse_valuation(ETA).unwrap();
        let err =
            expand_valuation(&pi, &eta, &catalog(Catalog::Half), &trs, &[], None).unwrap_err();
        match err {
            TransformError::Incompatible { missing, .. } => {
                assert_eq!(missing, vec![Rat::new(1, 4)])
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn natural_expansion_without_context() {
        let i = natural(
            1,
            &[("f", vec![Mat::from_ints(&[[3]])], Mat::from_ints(&[[1]]))],
        );
        let out = expand_rational(&i, &catalog(Catalog::Unit(3)), None).unwrap();
        assert_eq!(out.warnings.len(), 1);
        let f = out.interp.get("f").unwrap();
        assert_eq!(f.args[0], Mat::constant(3, 3, Rat::one()));
        assert_eq!(f.constant, Mat::constant(3, 1, Rat::one()));
    }

    #[test]
    fn unrepresentable_entry() {
        let mut i = natural(
            1,
            &[("f", vec![Mat::from_ints(&[[1]])], Mat::from_ints(&[[0]]))],
        );
        i.domain = Domain::NonnegRationals;
        i.table.get_mut("f").unwrap().args[0] = Mat::column(vec![Rat::new(3, 2)]);
        assert_eq!(
            expand_rational(&i, &catalog(Catalog::Half), None).unwrap_err(),
            TransformError::NotRepresentable(Rat::new(3, 2))
        );
    }

    #[test]
    fn invalid_encoding_is_refused() {
        let enc = Encoding::new(2, BTreeMap::from([(Rat::new(1, 3), jordan(2, 1))])).unwrap();
        let i = natural(
            1,
            &[("f", vec![Mat::from_ints(&[[1]])], Mat::from_ints(&[[0]]))],
        );
        assert!(matches!(
            expand_rational(&i, &enc, None),
            Err(TransformError::InvalidEncoding(_))
        ));
    }

    #[test]
    fn identity_transform_agrees() {
        let trs = parse_trs("(VAR x) (RULES f(f(x)) -> f(g(f(x))) f(g(f(x))) -> x)").unwrap();
        let pairs = dependency_pairs(&trs);
        let i = parse_interpretation(crate::interpretation::tests::EX2).unwrap();
        let side = CheckInput {
            trs: &trs,
            pairs: &pairs,
            interp: &i,
            backend: &Backend::Entrywise,
        };
        let check = verify_transform(side, side, Promise::Equivalence).unwrap();
        assert!(check.consistent());
        assert!(check.before.holds() && check.after.holds());
    }

    #[test]
    fn scaled_backends() {
        let v = Backend::Value {
            m: 2,
            delta: Rat::new(1, 2),
        };
        assert_eq!(
            scaled_backend(&v, 3),
            Backend::Value {
                m: 6,
                delta: Rat::new(1, 2)
            }
        );
        assert_eq!(scaled_backend(&Backend::Entrywise, 3), Backend::Entrywise);
    }
}
