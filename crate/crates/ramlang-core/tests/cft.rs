use ramlang_core::cft::{
    check_exact_sequence, counterexample_report, intermediate_quotient, to_ramdatum, unit_quotient,
    upper_filtration, CftError, IndexSet, Word,
};
use ramlang_core::rat::{int, rat};

#[test]
fn counterexample_quotients() {
    let uq = unit_quotient(3, &IndexSet::from_tail(3), 6).unwrap();
    assert_eq!(uq.invariants(), vec![3, 3]);
    let uq = unit_quotient(2, &IndexSet::new(&[2], Some(4)), 7).unwrap();
    assert_eq!(uq.invariants(), vec![2, 2]);
    let uq = unit_quotient(5, &IndexSet::from_tail(1), 4).unwrap();
    assert_eq!(uq.order(), Some(1));
}

#[test]
fn precision_must_exceed_index_set() {
    assert!(matches!(unit_quotient(3, &IndexSet::from_tail(3), 5), Err(CftError::Domain(_))));
    assert!(matches!(unit_quotient(4, &IndexSet::from_tail(3), 9), Err(CftError::Domain(_))));
}

#[test]
fn filtrations() {
    let f = upper_filtration(&unit_quotient(3, &IndexSet::from_tail(3), 6).unwrap());
    assert_eq!(f.breaks, vec![int(1), int(2)]);
    assert_eq!(f.last_break, int(2));
    let top = f.level_at(int(2));
    assert_eq!((top.order, top.invariants.clone()), (3, vec![3]));
    assert_eq!(f.level_at(rat(1, 2)).order, 9);
    let f = upper_filtration(&unit_quotient(2, &IndexSet::new(&[2], Some(4)), 7).unwrap());
    assert_eq!(f.last_break, int(3));
    let f = upper_filtration(&unit_quotient(5, &IndexSet::from_tail(1), 4).unwrap());
    assert!(f.breaks.is_empty());
    assert_eq!(f.last_break, int(0));
}

#[test]
fn filtration_is_decreasing_and_starts_at_principal_units() {
    for p in [2, 3, 5] {
        let uq = unit_quotient(p, &IndexSet::counterexample(p), 7).unwrap();
        let f = upper_filtration(&uq);
        assert!(f.levels.windows(2).all(|w| w[0].order >= w[1].order));
        assert_eq!(f.level_at(rat(1, 100)).order, uq.span(&uq.level_generators(1)).len() as u64);
        assert_eq!(f.levels.last().unwrap().order, 1);
    }
}

#[test]
fn intermediate_quotients() {
    let uq = unit_quotient(3, &IndexSet::from_tail(3), 6).unwrap();
    let sub = intermediate_quotient(&uq, &[Word::one_plus(1)]).unwrap();
    assert_eq!(sub.invariants(), vec![3]);
    assert_eq!(upper_filtration(&sub).breaks, vec![int(2)]);
    let all = intermediate_quotient(&uq, &[Word::one_plus(1), Word::one_plus(2)]).unwrap();
    assert_eq!(all.order(), Some(1));
    let same = intermediate_quotient(&uq, &[]).unwrap();
    assert_eq!(same.invariants(), uq.invariants());
    assert!(check_exact_sequence(&uq, &sub).unwrap());
    // 1 + 2t generates the same enlarged subgroup as 1 + t
    let other = intermediate_quotient(&uq, &["1+2t".parse().unwrap()]).unwrap();
    assert_eq!(other.invariants(), vec![3]);
}

#[test]
fn ramdatum_of_counterexample() {
    let uq = unit_quotient(3, &IndexSet::from_tail(3), 6).unwrap();
    let (datum, elems) = to_ramdatum(&uq).unwrap();
    assert_eq!(elems.len(), 9);
    assert_eq!(datum.depth_values(), vec![rat(1, 9), rat(4, 9)]);
    let b = datum.breaks().unwrap();
    assert_eq!((b.ell, b.u, b.c), (rat(4, 9), int(2), rat(14, 9)));
}

#[test]
fn reports() {
    let r = counterexample_report(3).unwrap();
    assert_eq!(r.invariants, vec![3, 3]);
    assert_eq!(r.d, int(2));
    assert!(r.gamma_d_cyclic && r.gamma_d_order == 3);
    assert_eq!(r.intermediate_invariants, vec![3]);
    assert!(r.surjection_is_iso && r.exact_sequence);
    let r = counterexample_report(2).unwrap();
    assert_eq!((r.invariants.clone(), r.d, r.gamma_d_order), (vec![2, 2], int(3), 2));
    assert!(r.surjection_is_iso && r.exact_sequence);
    for p in [5, 7] {
        let r = counterexample_report(p).unwrap();
        assert_eq!(r.invariants, vec![i64::from(p), i64::from(p)]);
        assert_eq!(r.d, int(2));
        assert!(r.gamma_d_cyclic && r.surjection_is_iso && r.exact_sequence);
    }
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn invariants_ignore_extra_generator_order(
            p in prop::sample::select(vec![2u32, 3, 5]),
            extras in proptest::collection::vec((1u32..4, 1u32..6), 0..4),
        ) {
            let uq = unit_quotient(p, &IndexSet::from_tail(6), 9).unwrap();
            let words: Vec<Word> = extras.iter().map(|&(a, n)| Word::Unit { a: a % p, n }).collect();
            let mut rev = words.clone();
            rev.reverse();
            let a = intermediate_quotient(&uq, &words).unwrap();
            let b = intermediate_quotient(&uq, &rev).unwrap();
            prop_assert_eq!(a.invariants(), b.invariants());
        }

        #[test]
        fn projection_respects_frobenius(p in prop::sample::select(vec![2u32, 3]), n in 1u32..4) {
            let uq = unit_quotient(p, &IndexSet::from_tail(8), 11).unwrap();
            let x = uq.project(&Word::one_plus(n));
            let mut acc = vec![0; x.len()];
            for _ in 0..p {
                acc = uq.add(&acc, &x);
            }
            prop_assert_eq!(acc, uq.project(&Word::one_plus(n * p)));
        }
    }
}
