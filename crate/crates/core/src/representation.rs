//! Numeric matrix representations: a valuation `ρ_m` reading a matrix back
//! as a number, the constant-matrix representation `μ^{p×q}_m`, the integer
//! representation `μ_n`/`ν_n`, their blockwise lifts to whole matrices, and
//! the entry-decreasing reduction of natural matrices to bit matrices.

use num_bigint::BigInt;
use thiserror::Error;

use crate::matrix::Mat;
use crate::rat::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepError {
    #[error("representation parameters must be positive (m={m}, p={p}, q={q})")]
    BadParams { m: u64, p: usize, q: usize },
    #[error("integer representation needs n > 1, got {0}")]
    DegenerateBase(u64),
    #[error("entry {value} at ({row}, {col}) is not an integer")]
    NonInteger { row: usize, col: usize, value: Rat },
    #[error("entry {value} at ({row}, {col}) is not a natural number")]
    NonNatural { row: usize, col: usize, value: Rat },
}

/// Divisor `m` and target block shape `p×q` of the constant representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RepParams {
    pub m: u64,
    pub p: usize,
    pub q: usize,
}

impl RepParams {
    pub fn new(m: u64, p: usize, q: usize) -> Result<Self, RepError> {
        if m == 0 || p == 0 || q == 0 {
            return Err(RepError::BadParams { m, p, q });
        }
        Ok(RepParams { m, p, q })
    }
}

/// `ρ_m(A)`: the sum of all entries divided by `m`.
pub fn rho(m: u64, a: &Mat) -> Rat {
    assert!(m >= 1, "rho divisor must be positive");
    a.sum() / Rat::from(m)
}

/// `μ^{p×q}_m(x)`: the constant `p×q` matrix with entries `m·x/(p·q)`.
pub fn mu_const(params: RepParams, x: &Rat) -> Mat {
    let RepParams { m, p, q } = params;
    let entry = x * &Rat::from(m) / Rat::from(p * q);
    Mat::constant(p, q, entry)
}

/// `μ_n(x)`: `(x/n)·1_{n×n}` when `n` divides `x`, otherwise `x·I_n`.
pub fn mu_int(n: u64, x: &BigInt) -> Result<Mat, RepError> {
    if n < 2 {
        return Err(RepError::DegenerateBase(n));
    }
    let size = n as usize;
    let x = Rat::from_bigint(x.clone());
    Ok(if x.divisible_by(n) {
        Mat::constant(size, size, x / Rat::from(n))
    } else {
        Mat::scalar(size, x)
    })
}

/// `ν_n(x) = x·1_n` as an `n×1` column.
pub fn nu(n: usize, x: &Rat) -> Mat {
    Mat::constant(n, 1, x.clone())
}

/// Replaces every entry `A_ij` by the block `μ^{p×q}_m(A_ij)`.
pub fn lift(params: RepParams, a: &Mat) -> Mat {
    let (p, q) = (params.p, params.q);
    let scale = Rat::from(params.m) / Rat::from(p * q);
    Mat::from_fn(a.rows() * p, a.cols() * q, |i, j| {
        a.get(i / p, j / q) * &scale
    })
}

/// Replaces every integer entry `A_ij` by the block `μ_n(A_ij)`.
pub fn lift_int(n: u64, a: &Mat) -> Result<Mat, RepError> {
    if n < 2 {
        return Err(RepError::DegenerateBase(n));
    }
    let mut grid = Vec::with_capacity(a.rows());
    for i in 0..a.rows() {
        let mut row = Vec::with_capacity(a.cols());
        for j in 0..a.cols() {
            let value = a.get(i, j);
            let x = value.to_integer().ok_or_else(|| RepError::NonInteger {
                row: i,
                col: j,
                value: value.clone(),
            })?;
            row.push(mu_int(n, &x)?);
        }
        grid.push(row);
    }
    Ok(Mat::from_blocks(&grid).expect("uniform n×n blocks"))
}

/// Replaces every entry `v_i` of a column vector by `ν_n(v_i)`.
pub fn lift_vec(n: usize, v: &Mat) -> Mat {
    assert_eq!(v.cols(), 1, "lift_vec expects a column vector");
    Mat::from_fn(v.rows() * n, 1, |i, _| v.get(i / n, 0).clone())
}

pub(crate) fn check_natural(a: &Mat) -> Result<(), RepError> {
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let value = a.get(i, j);
            if !value.is_natural() {
                return Err(RepError::NonNatural {
                    row: i,
                    col: j,
                    value: value.clone(),
                });
            }
        }
    }
    Ok(())
}

/// Reduces a natural matrix to a bit matrix by repeated [`lift_int`] with
/// `n = max(A)`. Returns the bit matrix and the product of the factors used,
/// so that `ρ_{m·scale}(result) = ρ_m(A)` for every `m`.
pub fn to_bit_matrix(a: &Mat) -> Result<(Mat, u64), RepError> {
    check_natural(a)?;
    let mut current = a.clone();
    let mut scale = 1u64;
    loop {
        let n = current
            .max_entry()
            .to_u64()
            .expect("natural entries fit in u64");
        if n <= 1 {
            return Ok((current, scale));
        }
        current = lift_int(n, &current)?;
        scale *= n;
    }
}
