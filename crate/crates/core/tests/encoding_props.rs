mod common;

use std::collections::BTreeSet;

use common::*;
use matinterp::encoding::{
    catalog, parse_encoding, required_products, rho_jordan, Catalog, RequiredProducts,
};
use matinterp::interpretation::{
    generate_arith_constraints, parse_param_interpretation, parse_valuation, Valuation,
};
use matinterp::matrix::jordan;
use matinterp::representation::rho;
use matinterp::trs::dependency_pairs;
use matinterp::Rat;
use proptest::prelude::*;

const ALL: [Catalog; 6] = [
    Catalog::Half,
    Catalog::Quarters,
    Catalog::Eighths,
    Catalog::Sixths,
    Catalog::Unit(3),
    Catalog::Unit(7),
];

#[test]
fn catalog_values_by_direct_summation() {
    for c in ALL {
        let enc = catalog(c);
        let n = Rat::from(enc.dim());
        for (v, m) in enc.entries() {
            assert!(m.is_bit(), "{c} {v}");
            assert_eq!(&(entry_sum(m) / &n), v, "{c} {v}");
        }
    }
}

#[test]
fn catalog_products() {
    let quarters = catalog(Catalog::Quarters);
    let h = quarters.get(&q(1, 2)).unwrap();
    assert_eq!(&naive_mul(h, h), quarters.get(&q(1, 4)).unwrap());

    let eighths = catalog(Catalog::Eighths);
    let (h, f, e) = (
        eighths.get(&q(1, 2)).unwrap(),
        eighths.get(&q(1, 4)).unwrap(),
        eighths.get(&q(1, 8)).unwrap(),
    );
    assert_eq!(&naive_mul(h, h), f);
    assert_eq!(&naive_mul(h, f), e);
    assert_eq!(&naive_mul(f, h), e);

    let sixths = catalog(Catalog::Sixths);
    let (h, t, s) = (
        sixths.get(&q(1, 2)).unwrap(),
        sixths.get(&q(1, 3)).unwrap(),
        sixths.get(&q(1, 6)).unwrap(),
    );
    assert_eq!(&naive_mul(h, t), s);
    assert_eq!(&naive_mul(t, h), s);
    assert_eq!(entry_sum(&naive_mul(h, h)) / Rat::from(6usize), q(1, 3));
}

#[test]
fn search_finds_small_encodings() {
    let half = search_bit_encoding(&[q(1, 2)], 2).expect("{1/2} at 2");
    assert_eq!(entry_sum(&half[0]), Rat::one());
    assert!(search_bit_encoding(&[q(1, 2), q(1, 4)], 4).is_some());
    assert!(search_bit_encoding(&[q(1, 3)], 2).is_none());
}

#[test]
fn no_small_encoding_of_half_third_quarter() {
    for n in 1..=3 {
        assert!(
            search_bit_encoding(&[q(1, 2), q(1, 3), q(1, 4)], n).is_none(),
            "dim {n}"
        );
    }
}

#[test]
fn required_products_of_the_running_example() {
    let trs = trs(FG_TRS);
    let pairs = dependency_pairs(&trs);
    let pinterp = parse_param_interpretation(FG_PI).unwrap();
    let cs = generate_arith_constraints(&trs, &pairs, &pinterp).unwrap();
    let eta = parse_valuation(FG_VAL).unwrap();
    let req = required_products(&cs, &eta).unwrap();
    assert_eq!(req, RequiredProducts(BTreeSet::from([q(1, 2)])));
    assert_eq!(req.to_string(), "{1/2}");
    assert!(catalog(Catalog::Half).is_compatible(&req));
    assert!(catalog(Catalog::Quarters).is_compatible(&req));
    assert!(!catalog(Catalog::Unit(3)).is_compatible(&req));
}

fn fraction() -> impl Strategy<Value = Rat> {
    (1i64..=5, 2i64..=8).prop_map(|(n, d)| Rat::new(n, d))
}

proptest! {
    #[test]
    fn rho_jordan_matches_summation(m in 1u64..=9, n in 1usize..=8, p in 0usize..=10) {
        prop_assert_eq!(rho_jordan(m, n, p), rho(m, &jordan(n, p)));
        prop_assert_eq!(rho_jordan(m, n, p), entry_sum(&jordan(n, p)) / Rat::from(m));
    }

    #[test]
    fn required_products_are_subset_closed(values in proptest::collection::vec(fraction(), 1..=4)) {
        let names: Vec<String> = (0..values.len()).map(|i| format!("p{i}")).collect();
        let mut eta = Valuation::new();
        for (n, v) in names.iter().zip(&values) {
            eta.set(n, v.clone()).unwrap();
        }
        let word = names.join("*");
        let cs = matinterp::interpretation::parse_constraints(&format!("var(x): {word} >= 1")).unwrap();
        let req = required_products(&cs, &eta).unwrap();
        // Oracle: every nonempty subset product of the non-integer values.
        let fractional: Vec<&Rat> = values.iter().filter(|v| !v.is_integer()).collect();
        let mut expected = BTreeSet::new();
        for mask in 1u32..(1 << fractional.len()) {
            let prod: Rat = (0..fractional.len())
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| fractional[i].clone())
                .product();
            expected.insert(prod);
        }
        prop_assert_eq!(req.0, expected);
    }
}

#[test]
fn catalog_files_round_trip() {
    for c in ALL {
        let enc = catalog(c);
        assert_eq!(parse_encoding(&enc.to_string()).unwrap(), enc);
    }
}
