mod common;

use common::*;
use matinterp::matrix::jordan;
use matinterp::representation::{
    lift, lift_int, lift_vec, mu_const, mu_int, nu, rho, to_bit_matrix, RepParams,
};
use matinterp::{Mat, Rat};
use num_bigint::BigInt;
use proptest::prelude::*;

fn rho_oracle(m: u64, a: &Mat) -> Rat {
    entry_sum(a) / Rat::from(m)
}

fn dims() -> impl Strategy<Value = (u64, usize, usize)> {
    (1u64..=6, 1usize..=6, 1usize..=6)
}

/// `(A, B)` with `A` `p×q` and `B` `q×r`.
fn product_pair() -> impl Strategy<Value = (Mat, Mat)> {
    (1usize..=4, 1usize..=4, 1usize..=4)
        .prop_flat_map(|(p, q, r)| (nat_mat(p, q, 9), nat_mat(q, r, 9)))
}

/// `(n, p, q)` with `0 ≤ p < q ≤ n`.
fn jordan_triple() -> impl Strategy<Value = (usize, usize, usize)> {
    (1usize..=6)
        .prop_flat_map(|n| (Just(n), 0..n))
        .prop_flat_map(|(n, p)| (Just(n), Just(p), p + 1..=n))
}

proptest! {
    #[test]
    fn rho_inverts_mu_const((m, p, q) in dims(), x in small_rat()) {
        let params = RepParams::new(m, p, q).unwrap();
        prop_assert_eq!(rho(m, &mu_const(params, &x)), x);
    }

    #[test]
    fn rho_inverts_mu_int(n in 2u64..=8, x in 0i64..=60) {
        let img = mu_int(n, &BigInt::from(x)).unwrap();
        prop_assert!(img.is_natural());
        prop_assert_eq!(rho(n, &img), Rat::from_int(x));
        prop_assert_eq!(rho(1, &nu(n as usize, &Rat::from_int(x))), Rat::from_int(x * n as i64));
    }

    #[test]
    fn rho_is_linear(a in nat_mat(3, 4, 9), b in nat_mat(3, 4, 9), m in 1u64..=6, alpha in small_rat()) {
        prop_assert_eq!(rho(m, &(&a + &b)), rho_oracle(m, &a) + rho_oracle(m, &b));
        prop_assert_eq!(rho(m, &a.scale(&alpha)), &alpha * &rho_oracle(m, &a));
    }

    #[test]
    fn constant_right_factor(a in nat_mat(3, 4, 9), r in 1usize..=5, c in 0i64..=9) {
        let b = Mat::constant(4, r, Rat::from_int(c));
        let lhs = rho(3, &naive_mul(&a, &b));
        prop_assert_eq!(lhs, rho_oracle(3, &a) * rho_oracle(4, &b));
    }

    #[test]
    fn scalar_right_factor(p in 1usize..=4, q in 1usize..=4, extra in 0usize..=3, s in 0i64..=9, seed in any::<u64>()) {
        let r = q + extra;
        let a = Mat::from_fn(p, q, |i, j| Rat::from_int(((seed >> ((i * q + j) % 60)) % 10) as i64));
        let b = Mat::from_fn(q, r, |i, j| if i == j { Rat::from_int(s) } else { Rat::zero() });
        prop_assert_eq!(rho(p as u64, &(&a * &b)), rho_oracle(p as u64, &a) * rho_oracle(q as u64, &b));
    }

    #[test]
    fn const_plus_scalar_commutes(a in nat_square(5, 9), c in 0i64..=9, s in 0i64..=9) {
        let n = a.rows();
        let b = &Mat::constant(n, n, Rat::from_int(c)) + &Mat::scalar(n, Rat::from_int(s));
        let expected = rho_oracle(n as u64, &a) * rho_oracle(n as u64, &b);
        prop_assert_eq!(rho(n as u64, &(&a * &b)), expected.clone());
        prop_assert_eq!(rho(n as u64, &(&b * &a)), expected);
    }

    #[test]
    fn lift_preserves_rho(a in nat_mat(3, 2, 9), (n, p, q) in dims(), m in 1u64..=4) {
        let lifted = lift(RepParams::new(n, p, q).unwrap(), &a);
        prop_assert_eq!(lifted.shape(), (3 * p, 2 * q));
        prop_assert_eq!(rho(m * n, &lifted), rho_oracle(m, &a));
    }

    #[test]
    fn lift_int_preserves_rho(a in nat_square(3, 9), n in 2u64..=5, m in 1u64..=4) {
        let lifted = lift_int(n, &a).unwrap();
        prop_assert_eq!(rho(m * n, &lifted), rho_oracle(m, &a));
        let v = Mat::from_fn(a.rows(), 1, |i, _| a.get(i, 0).clone());
        prop_assert_eq!(rho(m * n, &lift_vec(n as usize, &v)), rho_oracle(m, &v));
    }

    #[test]
    fn lift_int_by_max_lowers_max(a in nat_square(3, 9)) {
        let n = a.max_entry().to_u64().unwrap();
        prop_assume!(n >= 2);
        let lifted = lift_int(n, &a).unwrap();
        prop_assert!(lifted.max_entry() < a.max_entry());
    }

    #[test]
    fn lifted_products_keep_value((a, b) in product_pair(), n in 1u64..=3, p in 1usize..=3, r in 1usize..=3, m in 1u64..=4) {
        let inner = n as usize;
        let la = lift(RepParams::new(n, p, inner).unwrap(), &a);
        let lb = lift(RepParams::new(n, inner, r).unwrap(), &b);
        prop_assert_eq!(rho(m, &(&a * &b)), rho_oracle(m * n, &naive_mul(&la, &lb)));
    }

    #[test]
    fn bit_reduction(a in nat_square(2, 4)) {
        let (bits, scale) = to_bit_matrix(&a).unwrap();
        prop_assert!(bits.is_bit());
        prop_assert_eq!(bits.rows() as u64, a.rows() as u64 * scale);
        prop_assert_eq!(rho_oracle(scale, &bits), entry_sum(&a));
    }

    #[test]
    fn jordan_power_ordering((n, p, q) in jordan_triple(), m in 1u64..=6, a in nat_mat(6, 3, 9)) {
        prop_assert!(rho(m, &jordan(n, p)) > rho(m, &jordan(n, q)));
        let a = a.submatrix(0, 0, n, 3);
        prop_assert!(rho(m, &(&jordan(n, p) * &a)) >= rho(m, &(&jordan(n, q) * &a)));
    }
}

#[test]
fn example_reductions() {
    let (bits, scale) = to_bit_matrix(&ints(&[&[3, 0], &[0, 3]])).unwrap();
    assert_eq!(scale, 3);
    let block = |i: usize, j: usize| i / 3 == j / 3;
    assert_eq!(
        bits,
        Mat::from_fn(6, 6, |i, j| Rat::from_int(block(i, j) as i64))
    );

    let id = ints(&[&[1, 0], &[0, 1]]);
    assert_eq!(to_bit_matrix(&id).unwrap(), (id, 1));

    let a = ints(&[&[2, 3], &[0, 1]]);
    let (bits, scale) = to_bit_matrix(&a).unwrap();
    assert_eq!(scale, 6);
    assert_eq!(bits.shape(), (12, 12));
    assert_eq!(rho_oracle(6, &bits), Rat::from_int(6));
}

#[test]
fn mu_int_shapes() {
    assert_eq!(
        mu_int(2, &BigInt::from(4)).unwrap(),
        ints(&[&[2, 2], &[2, 2]])
    );
    assert_eq!(
        mu_int(3, &BigInt::from(2)).unwrap(),
        Mat::scalar(3, Rat::from_int(2))
    );
    assert!(mu_int(1, &BigInt::from(2)).is_err());
}

#[test]
fn general_right_factor_breaks_products() {
    let a = ints(&[&[1, 0], &[0, 0]]);
    let b = ints(&[&[0, 1], &[0, 0]]);
    assert_eq!(rho(2, &(&a * &b)), q(1, 2));
    assert_eq!(rho(2, &a) * rho(2, &b), q(1, 4));
}

#[test]
fn lifted_products_need_matching_inner_blocks() {
    let one = ints(&[&[1]]);
    let params = RepParams::new(1, 2, 2).unwrap();
    let (la, lb) = (lift(params, &one), lift(params, &one));
    assert_eq!(rho(1, &(&one * &one)), Rat::one());
    assert_eq!(rho(1, &(&la * &lb)), q(1, 2));
}

#[test]
fn chains_of_scalars_constants_and_flanked_jordan_powers() {
    let n = 4;
    let c = |v: i64| Mat::constant(n, n, Rat::from_int(v));
    let s = |v: i64| Mat::scalar(n, Rat::from_int(v));
    let chains = [
        vec![c(2), jordan(n, 1), c(3)],
        vec![s(2), c(1), jordan(n, 3), c(5), s(3)],
        vec![c(1), jordan(n, 2), c(1), jordan(n, 0), c(2)],
        vec![s(7)],
    ];
    for chain in chains {
        let product = chain
            .iter()
            .skip(1)
            .fold(chain[0].clone(), |acc, f| &acc * f);
        let expected: Rat = chain.iter().map(|f| rho_oracle(n as u64, f)).product();
        assert_eq!(rho(n as u64, &product), expected, "{chain:?}");
    }
    // Without the flanking constants the product of values is lost.
    let j = jordan(n, 1);
    assert_ne!(
        rho(n as u64, &(&j * &j)),
        rho(n as u64, &j) * rho(n as u64, &j)
    );
}
