//! Encodings of finite sets of rationals in `(0,1)` as natural matrices
//! built from nilpotent Jordan blocks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::interpretation::{ArithConstraint, ParamError, Valuation};
use crate::matrix::{jordan, Mat};
use crate::rat::Rat;
use crate::representation::rho;
use crate::syntax::{self, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodingError {
    #[error("encoding dimension must be positive")]
    ZeroDim,
    #[error("value {0} is not strictly between 0 and 1")]
    OutOfRange(Rat),
    #[error("matrix for {value} is {}x{}, expected {dim}x{dim}", .shape.0, .shape.1)]
    Shape {
        value: Rat,
        shape: (usize, usize),
        dim: usize,
    },
    #[error("matrix for {0} has non-natural entries")]
    NotNatural(Rat),
    #[error(
        "unknown encoding `{0}` (expected half, quarters, eighths, sixths or unit(n) with n >= 2)"
    )]
    UnknownCatalog(String),
}

/// A table `q ↦ μ(q)` of natural `dim×dim` matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoding {
    dim: usize,
    table: BTreeMap<Rat, Mat>,
}

impl Encoding {
    pub fn new(dim: usize, table: BTreeMap<Rat, Mat>) -> Result<Self, EncodingError> {
        if dim == 0 {
            return Err(EncodingError::ZeroDim);
        }
        for (q, m) in &table {
            if q <= &Rat::zero() || q >= &Rat::one() {
                return Err(EncodingError::OutOfRange(q.clone()));
            }
            if m.shape() != (dim, dim) {
                return Err(EncodingError::Shape {
                    value: q.clone(),
                    shape: m.shape(),
                    dim,
                });
            }
            if !m.is_natural() {
                return Err(EncodingError::NotNatural(q.clone()));
            }
        }
        Ok(Encoding { dim, table })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, q: &Rat) -> Option<&Mat> {
        self.table.get(q)
    }

    pub fn keys(&self) -> impl Iterator<Item = &Rat> {
        self.table.keys()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Rat, &Mat)> {
        self.table.iter()
    }

    /// Value and product conditions for every key and every ordered key
    /// pair whose product is a key.
    pub fn validate(&self) -> EncodingReport {
        self.validate_on(&self.table.keys().cloned().collect())
    }

    fn validate_on(&self, keys: &BTreeSet<Rat>) -> EncodingReport {
        let m = self.dim as u64;
        let values = keys
            .iter()
            .filter_map(|q| self.table.get(q).map(|a| (q.clone(), rho(m, a) == *q)))
            .collect();
        let mut products = Vec::new();
        for x in keys {
            for y in keys {
                let xy = x * y;
                if !keys.contains(&xy) {
                    continue;
                }
                let (Some(a), Some(b), Some(c)) =
                    (self.table.get(x), self.table.get(y), self.table.get(&xy))
                else {
                    continue;
                };
                let ab = a * b;
                products.push(ProductCheck {
                    x: x.clone(),
                    y: y.clone(),
                    value_valid: rho(m, &ab) == xy,
                    closed: &ab == c,
                });
            }
        }
        EncodingReport { values, products }
    }

    /// Which required products are missing from the table or violate the
    /// value conditions among themselves.
    pub fn compatibility(&self, req: &RequiredProducts) -> Compatibility {
        let missing: Vec<Rat> = req
            .0
            .iter()
            .filter(|q| !self.table.contains_key(*q))
            .cloned()
            .collect();
        Compatibility {
            missing,
            report: self.validate_on(&req.0),
        }
    }

    pub fn is_compatible(&self, req: &RequiredProducts) -> bool {
        self.compatibility(req).is_ok()
    }
}

/// Outcome of [`Encoding::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodingReport {
    /// `(q, ρ_dim(μ(q)) = q)` per key.
    pub values: Vec<(Rat, bool)>,
    pub products: Vec<ProductCheck>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductCheck {
    pub x: Rat,
    pub y: Rat,
    /// `ρ_dim(μ(x)μ(y)) = xy`.
    pub value_valid: bool,
    /// `μ(x)μ(y) = μ(xy)`.
    pub closed: bool,
}

impl EncodingReport {
    pub fn is_valid(&self) -> bool {
        self.values.iter().all(|(_, ok)| *ok) && self.products.iter().all(|p| p.value_valid)
    }

    pub fn all_closed(&self) -> bool {
        self.products.iter().all(|p| p.closed)
    }

    pub fn product(&self, x: &Rat, y: &Rat) -> Option<&ProductCheck> {
        self.products.iter().find(|p| &p.x == x && &p.y == y)
    }
}

impl fmt::Display for EncodingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (q, ok) in &self.values {
            writeln!(f, "value {q}: {}", if *ok { "ok" } else { "WRONG" })?;
        }
        for p in &self.products {
            writeln!(
                f,
                "product {}*{}: value {}, closed {}",
                p.x,
                p.y,
                if p.value_valid { "ok" } else { "WRONG" },
                if p.closed { "yes" } else { "no" }
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Compatibility {
    pub missing: Vec<Rat>,
    pub report: EncodingReport,
}

impl Compatibility {
    pub fn is_ok(&self) -> bool {
        self.missing.is_empty() && self.report.is_valid()
    }
}

/// `ρ_m(J_n^p)`: `(n−p)/m` for `p < n`, else 0.
pub fn rho_jordan(m: u64, n: usize, p: usize) -> Rat {
    assert!(m >= 1, "rho divisor must be positive");
    if p < n {
        Rat::from(n - p) / Rat::from(m)
    } else {
        Rat::zero()
    }
}

/// Encodings shipped with the library.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Catalog {
    /// `{1/2}` at dimension 2.
    Half,
    /// `{1/2, 1/4}` at dimension 4.
    Quarters,
    /// `{1/2, 1/4, 1/8}` at dimension 8.
    Eighths,
    /// `{1/2, 1/3, 1/6}` at dimension 6.
    Sixths,
    /// `{1/n}` at dimension `n`.
    Unit(usize),
}

impl FromStr for Catalog {
    type Err = EncodingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || EncodingError::UnknownCatalog(s.to_string());
        match s {
            "half" => Ok(Catalog::Half),
            "quarters" => Ok(Catalog::Quarters),
            "eighths" => Ok(Catalog::Eighths),
            "sixths" => Ok(Catalog::Sixths),
            _ => {
                let n = s
                    .strip_prefix("unit(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|n| n.trim().parse::<usize>().ok())
                    .ok_or_else(unknown)?;
                if n < 2 {
                    return Err(unknown());
                }
                Ok(Catalog::Unit(n))
            }
        }
    }
}

impl fmt::Display for Catalog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Catalog::Half => f.write_str("half"),
            Catalog::Quarters => f.write_str("quarters"),
            Catalog::Eighths => f.write_str("eighths"),
            Catalog::Sixths => f.write_str("sixths"),
            Catalog::Unit(n) => write!(f, "unit({n})"),
        }
    }
}

/// `[[top_left, top_right], [0, 0]]`.
fn upper(top_left: Mat, top_right: Mat) -> Mat {
    let z = Mat::zeros(top_left.rows(), top_left.cols());
    Mat::from_blocks(&[vec![top_left, top_right], vec![z.clone(), z]]).expect("square blocks")
}

pub fn catalog(which: Catalog) -> Encoding {
    let entries: Vec<(Rat, Mat)> = match which {
        Catalog::Half => vec![(Rat::new(1, 2), jordan(2, 1))],
        Catalog::Quarters => {
            let j = jordan(2, 1);
            let jt = j.transpose();
            vec![
                (Rat::new(1, 2), upper(j.clone(), jt.clone())),
                (Rat::new(1, 4), upper(Mat::zeros(2, 2), &j * &jt)),
            ]
        }
        Catalog::Eighths => vec![
            (Rat::new(1, 2), upper(jordan(4, 1), jordan(4, 3))),
            (Rat::new(1, 4), upper(jordan(4, 2), Mat::zeros(4, 4))),
            (Rat::new(1, 8), upper(jordan(4, 3), Mat::zeros(4, 4))),
        ],
        Catalog::Sixths => {
            let j = jordan(3, 1);
            let j2t = jordan(3, 2).transpose();
            vec![
                (Rat::new(1, 2), upper(j.clone(), j2t.clone())),
                (Rat::new(1, 3), upper(jordan(3, 2), &j * &j2t)),
                (
                    Rat::new(1, 6),
                    upper(Mat::zeros(3, 3), &jordan(3, 2) * &j2t),
                ),
            ]
        }
        Catalog::Unit(n) => vec![(Rat::new(1, n as i64), jordan(n, n - 1))],
    };
    let dim = entries[0].1.rows();
    Encoding::new(dim, entries.into_iter().collect()).expect("catalog encodings are well formed")
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "encoding dim {}", self.dim)?;
        for (q, m) in &self.table {
            writeln!(f, "value {q} = {m}")?;
        }
        Ok(())
    }
}

/// Parses `encoding dim <n>` followed by `value <p>/<q> = <matrix>` lines.
pub fn parse_encoding(text: &str) -> Result<Encoding, ParseError> {
    let lines = syntax::significant_lines(text);
    let mut iter = lines.iter();
    let header = iter
        .next()
        .ok_or_else(|| ParseError::new(1, 1, "missing `encoding dim <n>` header"))?;
    let dim_tok = header
        .text
        .trim_start()
        .strip_prefix("encoding")
        .map(str::trim_start)
        .and_then(|r| r.strip_prefix("dim"))
        .map(str::trim)
        .ok_or_else(|| header.error_start("expected `encoding dim <n>`"))?;
    let dim = syntax::parse_usize(header, dim_tok)?;
    if dim == 0 {
        return Err(header.error(dim_tok, "encoding dimension must be positive"));
    }
    let mut table = BTreeMap::new();
    for line in iter {
        let rest = line
            .text
            .trim_start()
            .strip_prefix("value")
            .filter(|r| r.starts_with(char::is_whitespace))
            .ok_or_else(|| line.error_start("expected `value <p>/<q> = <matrix>`"))?;
        let (q, lit) = rest
            .split_once('=')
            .ok_or_else(|| line.error(rest, "missing `=`"))?;
        let q_tok = q.trim();
        let q = syntax::parse_rat(line, q_tok)?;
        let m = syntax::parse_matrix(line, lit)?;
        let single = BTreeMap::from([(q.clone(), m.clone())]);
        Encoding::new(dim, single).map_err(|e| line.error(q_tok, e.to_string()))?;
        if table.insert(q, m).is_some() {
            return Err(line.error(q_tok, "value given twice"));
        }
    }
    Ok(Encoding { dim, table })
}

/// Products of η-values that an encoding must represent.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RequiredProducts(pub BTreeSet<Rat>);

impl RequiredProducts {
    pub fn contains(&self, q: &Rat) -> bool {
        self.0.contains(q)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for RequiredProducts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, q) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{q}")?;
        }
        f.write_str("}")
    }
}

/// For every word of every constraint, the products of all nonempty
/// subsets of its non-integer η-values.
pub fn required_products(
    constraints: &[ArithConstraint],
    eta: &Valuation,
) -> Result<RequiredProducts, ParamError> {
    let mut out = BTreeSet::new();
    for c in constraints {
        for w in c.lhs.words().iter().chain(c.rhs.words()) {
            let mut subset_products: BTreeSet<Rat> = BTreeSet::new();
            for p in w.params() {
                let v = eta.get(p)?;
                if v.is_integer() {
                    continue;
                }
                let extended: Vec<Rat> = subset_products.iter().map(|s| s * &v).collect();
                subset_products.extend(extended);
                subset_products.insert(v);
            }
            out.extend(subset_products);
        }
    }
    Ok(RequiredProducts(out))
}
