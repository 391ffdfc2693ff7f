use std::collections::BTreeMap;
use std::sync::OnceLock;

use loopk_core::conv::Convolver;
use loopk_core::laurent::LaurentPoly;
use loopk_core::weyl::AffElem;
use proptest::prelude::*;

fn engine(label: &str) -> &'static Convolver {
    static A1: OnceLock<Convolver> = OnceLock::new();
    static A2: OnceLock<Convolver> = OnceLock::new();
    let cell = match label {
        "A1" => &A1,
        "A2" => &A2,
        _ => unreachable!(),
    };
    cell.get_or_init(|| Convolver::from_label(label).unwrap())
}

fn reps(label: &str, max_len: usize) -> Vec<AffElem> {
    engine(label).group().minimal_reps_by_length(max_len).into_iter().flatten().collect()
}

fn product(c: &Convolver, u: &AffElem, v: &AffElem) -> BTreeMap<AffElem, LaurentPoly> {
    c.convolve(u, v).unwrap().entries().clone()
}

/// `(a ⊙ b) ⊙ z` expanded coefficientwise.
fn left_assoc(c: &Convolver, a: &AffElem, b: &AffElem, z: &AffElem) -> BTreeMap<AffElem, LaurentPoly> {
    let mut out: BTreeMap<AffElem, LaurentPoly> = BTreeMap::new();
    for (w, p) in product(c, a, b) {
        for (t, r) in product(c, &w, z) {
            *out.entry(t).or_default() += &(&p * &r);
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

#[test]
fn identity_is_neutral() {
    for label in ["A1", "A2"] {
        let c = engine(label);
        let e = c.group().aff_identity();
        for u in reps(label, 3) {
            let expect = BTreeMap::from([(u, LaurentPoly::one(c.group().rank()))]);
            assert_eq!(product(c, &e, &u), expect);
            assert_eq!(product(c, &u, &e), expect);
        }
    }
}

#[test]
fn keys_are_minimal_and_within_support() {
    for (label, n) in [("A1", 4), ("A2", 2)] {
        let c = engine(label);
        let g = c.group();
        let rs = reps(label, n);
        for u in &rs {
            for v in &rs {
                let bound = c.support_bound(u, v);
                for w in product(c, u, v).keys() {
                    assert!(g.is_minimal(w));
                    assert!(g.length_affine(w) <= bound);
                }
            }
        }
    }
}

#[test]
fn length_cap_does_not_change_tables() {
    let wide = engine("A1");
    let narrow = Convolver::from_label("A1").unwrap().with_length_cap(8);
    for u in reps("A1", 3) {
        for v in reps("A1", 3) {
            assert_eq!(product(wide, &u, &v), product(&narrow, &u, &v));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn commutative(label in prop::sample::select(vec!["A1", "A2"]), i in 0usize..64, j in 0usize..64) {
        let rs = reps(label, if label == "A1" { 5 } else { 3 });
        let (u, v) = (&rs[i % rs.len()], &rs[j % rs.len()]);
        let c = engine(label);
        prop_assert_eq!(product(c, u, v), product(c, v, u));
    }

    #[test]
    fn associative(i in 0usize..64, j in 0usize..64, k in 0usize..64) {
        let rs = reps("A1", 3);
        let (a, b, z) = (&rs[i % rs.len()], &rs[j % rs.len()], &rs[k % rs.len()]);
        let c = engine("A1");
        prop_assert_eq!(left_assoc(c, a, b, z), left_assoc(c, b, z, a));
    }
}
