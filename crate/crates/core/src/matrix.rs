//! Dense exact matrices, the entrywise ordering, structural classification
//! and Jordan-block powers.
//!
//! Storage is row-major: entry `(i, j)` lives at `data[i * cols + j]`.
//! Vectors are single-column matrices. Indices are 0-based in the API.

use std::fmt;
use std::ops::{Add, Mul};

use thiserror::Error;

use crate::rat::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatError {
    #[error("shape mismatch in {op}: {}x{} vs {}x{}", .left.0, .left.1, .right.0, .right.1)]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix must have at least one row and one column")]
    Empty,
    #[error("ragged rows: row {row} has {got} entries, expected {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        got: usize,
    },
}

/// Error from [`Mat::parse_literal`], carrying the byte offset into the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} (at offset {offset})")]
pub struct LiteralError {
    pub offset: usize,
    pub message: String,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl Mat {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rat) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat::constant(rows, cols, Rat::zero())
    }

    /// `c · 1_{rows×cols}`.
    pub fn constant(rows: usize, cols: usize, c: Rat) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        Mat {
            rows,
            cols,
            data: vec![c; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Mat::scalar(n, Rat::one())
    }

    /// `s · I_n`.
    pub fn scalar(n: usize, s: Rat) -> Self {
        Mat::from_fn(n, n, |i, j| if i == j { s.clone() } else { Rat::zero() })
    }

    pub fn column(entries: Vec<Rat>) -> Self {
        assert!(!entries.is_empty(), "empty vector");
        Mat {
            rows: entries.len(),
            cols: 1,
            data: entries,
        }
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self, MatError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || cols == 0 {
            return Err(MatError::Empty);
        }
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(MatError::Ragged {
                    row: i,
                    expected: cols,
                    got: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Mat {
            rows: n,
            cols,
            data,
        })
    }

    /// Convenience for literals in code and tests. Panics on ragged input.
    pub fn from_ints<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.as_ref().iter().map(|&x| Rat::from_int(x)).collect())
                .collect(),
        )
        .expect("well-formed integer literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[Rat] {
        &self.data
    }

    pub fn map(&self, f: impl Fn(&Rat) -> Rat) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn scale(&self, k: &Rat) -> Mat {
        self.map(|x| x * k)
    }

    pub fn checked_add(&self, other: &Mat) -> Result<Mat, MatError> {
        self.same_shape("add", other)?;
        Ok(Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn checked_sub(&self, other: &Mat) -> Result<Mat, MatError> {
        self.same_shape("sub", other)?;
        Ok(Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn checked_mul(&self, other: &Mat) -> Result<Mat, MatError> {
        if self.cols != other.rows {
            return Err(MatError::ShapeMismatch {
                op: "mul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    /// `self^k` for square matrices; `k = 0` gives the identity.
    pub fn pow(&self, k: u32) -> Mat {
        assert!(self.is_square(), "pow of non-square matrix");
        (0..k).fold(Mat::identity(self.rows), |acc, _| &acc * self)
    }

    fn same_shape(&self, op: &'static str, other: &Mat) -> Result<(), MatError> {
        if self.shape() != other.shape() {
            return Err(MatError::ShapeMismatch {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(())
    }

    /// Sum of all entries.
    pub fn sum(&self) -> Rat {
        self.data.iter().sum()
    }

    /// Per-column sums, i.e. `1ᵀ·A` as a vector of length `cols`.
    pub fn column_sums(&self) -> Vec<Rat> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j)).sum())
            .collect()
    }

    pub fn max_entry(&self) -> &Rat {
        self.data.iter().max().expect("nonempty")
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rat::is_zero)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|x| !x.is_negative())
    }

    /// Every entry is a nonnegative integer.
    pub fn is_natural(&self) -> bool {
        self.data.iter().all(Rat::is_natural)
    }

    /// Every entry is 0 or 1.
    pub fn is_bit(&self) -> bool {
        self.data.iter().all(|x| x.is_zero() || x.is_one())
    }

    /// The `h×w` sub-matrix whose top-left corner is `(i0, j0)`.
    pub fn submatrix(&self, i0: usize, j0: usize, h: usize, w: usize) -> Mat {
        Mat::from_fn(h, w, |i, j| self.get(i0 + i, j0 + j).clone())
    }

    /// Block `(bi, bj)` of a grid of `h×w` blocks.
    pub fn block(&self, bi: usize, bj: usize, h: usize, w: usize) -> Mat {
        self.submatrix(bi * h, bj * w, h, w)
    }

    /// Assembles a block matrix. All blocks in a block-row share a height and
    /// all blocks in a block-column share a width.
    pub fn from_blocks(grid: &[Vec<Mat>]) -> Result<Mat, MatError> {
        let first_row = grid.first().ok_or(MatError::Empty)?;
        let heights: Vec<usize> = grid
            .iter()
            .map(|r| r.first().map_or(0, Mat::rows))
            .collect();
        let widths: Vec<usize> = first_row.iter().map(Mat::cols).collect();
        if widths.is_empty() {
            return Err(MatError::Empty);
        }
        for (bi, row) in grid.iter().enumerate() {
            if row.len() != widths.len() {
                return Err(MatError::Ragged {
                    row: bi,
                    expected: widths.len(),
                    got: row.len(),
                });
            }
            for (bj, b) in row.iter().enumerate() {
                if b.shape() != (heights[bi], widths[bj]) {
                    return Err(MatError::ShapeMismatch {
                        op: "from_blocks",
                        left: (heights[bi], widths[bj]),
                        right: b.shape(),
                    });
                }
            }
        }
        let rows = heights.iter().sum();
        let cols = widths.iter().sum();
        let mut out = Mat::zeros(rows, cols);
        let mut i0 = 0;
        for (bi, row) in grid.iter().enumerate() {
            let mut j0 = 0;
            for (bj, b) in row.iter().enumerate() {
                for i in 0..b.rows {
                    for j in 0..b.cols {
                        out.set(i0 + i, j0 + j, b.get(i, j).clone());
                    }
                }
                j0 += widths[bj];
            }
            i0 += heights[bi];
        }
        Ok(out)
    }

    /// Parses `[a b ; c d]`: rows separated by `;`, entries by whitespace,
    /// entries are integers or `p/q` fractions.
    pub fn parse_literal(s: &str) -> Result<Mat, LiteralError> {
        let lead = s.len() - s.trim_start().len();
        let t = s.trim();
        let err = |offset: usize, message: &str| LiteralError {
            offset,
            message: message.to_string(),
        };
        let inner = t
            .strip_prefix('[')
            .ok_or_else(|| err(lead, "matrix literal must start with `[`"))?;
        let inner = inner
            .strip_suffix(']')
            .ok_or_else(|| err(lead + t.len(), "matrix literal must end with `]`"))?;
        let mut rows = Vec::new();
        let mut offset = lead + 1;
        for row_text in inner.split(';') {
            let mut row = Vec::new();
            let mut pos = 0;
            for tok in row_text.split_whitespace() {
                let at = offset + pos + row_text[pos..].find(tok).unwrap_or(0);
                pos = at - offset + tok.len();
                row.push(
                    tok.parse::<Rat>()
                        .map_err(|_| err(at, &format!("bad matrix entry `{tok}`")))?,
                );
            }
            if row.is_empty() {
                return Err(err(offset, "empty matrix row"));
            }
            rows.push(row);
            offset += row_text.len() + 1;
        }
        Mat::from_rows(rows).map_err(|e| err(lead, &e.to_string()))
    }
}

impl fmt::Display for Mat {
    /// Renders in the literal syntax accepted by [`Mat::parse_literal`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, " ; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<'a> Add<&'a Mat> for &'a Mat {
    type Output = Mat;
    /// Panics on a shape mismatch; use [`Mat::checked_add`] otherwise.
    fn add(self, rhs: &'a Mat) -> Mat {
        self.checked_add(rhs).unwrap()
    }
}

impl<'a> Mul<&'a Mat> for &'a Mat {
    type Output = Mat;
    /// Panics on a shape mismatch; use [`Mat::checked_mul`] otherwise.
    fn mul(self, rhs: &'a Mat) -> Mat {
        self.checked_mul(rhs).unwrap()
    }
}

/// Result of comparing two matrices under the entrywise ordering, where
/// `A > B` additionally requires `A₁₁ > B₁₁`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryOrder {
    Ge,
    Gt,
    Incomparable,
}

impl EntryOrder {
    pub fn is_ge(self) -> bool {
        matches!(self, EntryOrder::Ge | EntryOrder::Gt)
    }
}

pub fn cmp_entrywise(a: &Mat, b: &Mat) -> Result<EntryOrder, MatError> {
    a.same_shape("cmp_entrywise", b)?;
    if a.data.iter().zip(&b.data).any(|(x, y)| x < y) {
        return Ok(EntryOrder::Incomparable);
    }
    Ok(if a.data[0] > b.data[0] {
        EntryOrder::Gt
    } else {
        EntryOrder::Ge
    })
}

/// `J_n^p`: ones at `(i, i + p)` for `i < n - p`, built by shifting columns.
/// Zero when `p >= n`.
pub fn jordan(n: usize, p: usize) -> Mat {
    assert!(n >= 1, "jordan block of size 0");
    Mat::from_fn(
        n,
        n,
        |i, j| {
            if j == i + p {
                Rat::one()
            } else {
                Rat::zero()
            }
        },
    )
}

/// Structural shape of a matrix, most specific first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StructClass {
    Zero,
    /// `J_n^p` with `p < n`.
    JordanPower {
        n: usize,
        p: usize,
    },
    /// `s·I_n`.
    Scalar(Rat),
    /// `c·1`.
    Constant(Rat),
    /// `c·1 + s·I_n` with both parts nonzero.
    ConstPlusScalar {
        c: Rat,
        s: Rat,
    },
    General,
}

/// Precedence: Zero, JordanPower, Scalar, Constant, ConstPlusScalar, General.
/// The 1×1 matrix `[1]` is `J_1^0 = I_1`, so it classifies as a Jordan power.
pub fn classify(a: &Mat) -> StructClass {
    if a.is_zero() {
        return StructClass::Zero;
    }
    let first = &a.data[0];
    let all_equal = a.data.iter().all(|x| x == first);
    if !a.is_square() {
        return if all_equal {
            StructClass::Constant(first.clone())
        } else {
            StructClass::General
        };
    }
    let n = a.rows;
    if let Some(p) = jordan_exponent(a) {
        return StructClass::JordanPower { n, p };
    }
    if let Some((c, s)) = const_plus_scalar(a) {
        return match (c.is_zero(), s.is_zero()) {
            (true, _) => StructClass::Scalar(s),
            (false, true) => StructClass::Constant(c),
            (false, false) => StructClass::ConstPlusScalar { c, s },
        };
    }
    if all_equal {
        return StructClass::Constant(first.clone());
    }
    StructClass::General
}

fn jordan_exponent(a: &Mat) -> Option<usize> {
    let n = a.rows;
    // The first row determines the only candidate exponent.
    let p = (0..n).find(|&j| a.get(0, j).is_one())?;
    (*a == jordan(n, p)).then_some(p)
}

/// Decomposes a square matrix as `c·1 + s·I`, if possible. For 1×1 matrices
/// the split is ambiguous and the whole value goes to `s`.
pub fn const_plus_scalar(a: &Mat) -> Option<(Rat, Rat)> {
    if !a.is_square() {
        return None;
    }
    let n = a.rows;
    if n == 1 {
        return Some((Rat::zero(), a.data[0].clone()));
    }
    let c = a.get(0, 1).clone();
    let d = a.get(0, 0).clone();
    for i in 0..n {
        for j in 0..n {
            let expected = if i == j { &d } else { &c };
            if a.get(i, j) != expected {
                return None;
            }
        }
    }
    let s = &d - &c;
    Some((c, s))
}
