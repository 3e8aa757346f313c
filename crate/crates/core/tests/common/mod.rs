//! Fixtures, generators and brute-force oracles shared by the integration
//! tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use matinterp::interpretation::{
    parse_interpretation, BlockShape, Domain, Interpretation, SymbolInterp,
};
use matinterp::trs::{parse_trs, Trs};
use matinterp::{Mat, Rat};
use proptest::prelude::*;
use rand::Rng;

pub const FG_TRS: &str = include_str!("../../../../data/fg.trs");
pub const FG_PAIRS: &str = include_str!("../../../../data/fg_pairs.trs");
pub const FG_RATIONAL: &str = include_str!("../../../../data/fg_rational.interp");
pub const FG_NATURAL: &str = include_str!("../../../../data/fg_natural.interp");
pub const FG_EXPANDED: &str = include_str!("../../../../data/fg_expanded.interp");
pub const FG_PI: &str = include_str!("../../../../data/fg.pi");
pub const FG_VAL: &str = include_str!("../../../../data/fg.val");
pub const RELATIVE_TRS: &str = include_str!("../../../../data/relative.trs");
pub const RELATIVE_INTERP: &str = include_str!("../../../../data/relative.interp");
pub const RELATIVE_BITS: &str = include_str!("../../../../data/relative_bits.interp");

pub fn trs(text: &str) -> Trs {
    parse_trs(text).expect("fixture parses")
}

pub fn interp(text: &str) -> Interpretation {
    parse_interpretation(text).expect("fixture parses")
}

pub fn q(n: i64, d: i64) -> Rat {
    Rat::new(n, d)
}

pub fn ints(rows: &[&[i64]]) -> Mat {
    Mat::from_ints(rows)
}

/// Entry sum computed by an explicit double loop over `i64` values.
pub fn entry_sum(a: &Mat) -> Rat {
    let mut acc = Rat::zero();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            acc += a.get(i, j);
        }
    }
    acc
}

/// Textbook triple-loop product, independent of the library's `Mul`.
pub fn naive_mul(a: &Mat, b: &Mat) -> Mat {
    assert_eq!(a.cols(), b.rows());
    Mat::from_fn(a.rows(), b.cols(), |i, j| {
        let mut acc = Rat::zero();
        for k in 0..a.cols() {
            acc += &(a.get(i, k) * b.get(k, j));
        }
        acc
    })
}

/// A natural `rows×cols` matrix with entries in `0..=max`.
pub fn nat_mat(rows: usize, cols: usize, max: i64) -> impl Strategy<Value = Mat> {
    proptest::collection::vec(0..=max, rows * cols)
        .prop_map(move |v| Mat::from_fn(rows, cols, |i, j| Rat::from_int(v[i * cols + j])))
}

/// A natural square matrix of random size `1..=max_dim`.
pub fn nat_square(max_dim: usize, max: i64) -> impl Strategy<Value = Mat> {
    (1..=max_dim).prop_flat_map(move |n| nat_mat(n, n, max))
}

/// A nonnegative rational with small numerator and denominator.
pub fn small_rat() -> impl Strategy<Value = Rat> {
    (0i64..40, 1i64..8).prop_map(|(n, d)| Rat::new(n, d))
}

pub fn random_nat_mat(rng: &mut impl Rng, rows: usize, cols: usize, max: i64) -> Mat {
    Mat::from_fn(rows, cols, |_, _| Rat::from_int(rng.gen_range(0..=max)))
}

/// Random natural interpretation of `f`, `g`, `f#` (all unary) at a random
/// dimension `1..=max_dim` with block size 1.
pub fn random_fg_interp(rng: &mut impl Rng, max_dim: usize, max: i64) -> Interpretation {
    let n = rng.gen_range(1..=max_dim);
    let table: BTreeMap<String, SymbolInterp> = ["f", "g", "f#"]
        .iter()
        .map(|s| {
            let si = SymbolInterp {
                args: vec![random_nat_mat(rng, n, n, max)],
                constant: random_nat_mat(rng, n, 1, max),
            };
            (s.to_string(), si)
        })
        .collect();
    Interpretation::new(
        BlockShape::new(n, 1).unwrap(),
        Domain::Naturals,
        None,
        table,
    )
    .expect("random interpretation is valid")
}

/// All `n×n` bit matrices.
pub fn bit_matrices(n: usize) -> impl Iterator<Item = Mat> {
    let cells = n * n;
    (0u64..1 << cells).map(move |bits| {
        Mat::from_fn(n, n, |i, j| {
            Rat::from_int(((bits >> (i * n + j)) & 1) as i64)
        })
    })
}

/// Exhaustive search for an assignment of `n×n` bit matrices to `values`
/// such that every value is reproduced by `ρ_n` and, for every ordered pair
/// `(x, y)` whose product `xy` is among the values, `ρ_n(μ(x)μ(y)) = xy`.
/// Returns the first assignment found.
pub fn search_bit_encoding(values: &[Rat], n: usize) -> Option<Vec<Mat>> {
    let nn = Rat::from(n);
    // Candidates per value: bit matrices with entry sum n·q.
    let candidates: Vec<Vec<Mat>> = values
        .iter()
        .map(|v| {
            let target = v * &nn;
            bit_matrices(n).filter(|m| entry_sum(m) == target).collect()
        })
        .collect();
    if candidates.iter().any(Vec::is_empty) {
        return None;
    }
    let mut chosen: Vec<Mat> = Vec::new();
    extend_search(values, &candidates, &nn, &mut chosen).then_some(chosen)
}

fn extend_search(values: &[Rat], candidates: &[Vec<Mat>], nn: &Rat, chosen: &mut Vec<Mat>) -> bool {
    let k = chosen.len();
    if k == values.len() {
        return true;
    }
    let product_ok = |x: &Mat, xv: &Rat, y: &Mat, yv: &Rat| {
        let xy = xv * yv;
        !values.contains(&xy) || entry_sum(&naive_mul(x, y)) / nn == xy
    };
    for m in &candidates[k] {
        chosen.push(m.clone());
        let ok = (0..=k).all(|i| {
            let a = &chosen[i];
            product_ok(a, &values[i], m, &values[k]) && product_ok(m, &values[k], a, &values[i])
        });
        if ok && extend_search(values, candidates, nn, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}
