use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use ramlang_core::fq::{Fe, Fq};
use ramlang_core::rat::{frac, int, rat};
use ramlang_core::rootdata::*;
use ramlang_core::Rat;

fn sl2_bary() -> (RootDatum, ApartmentPoint) {
    let rd = RootDatum::sl(2);
    (rd, ApartmentPoint::barycenter(&rd))
}

#[test]
fn graded_piece_examples() {
    let gl2 = RootDatum::gl(2);
    let m = graded_piece(&gl2, &ApartmentPoint::origin(&gl2), int(-1), 1).unwrap();
    assert_eq!(m.dim(), 4);
    assert_eq!(m.support().len(), 4);

    let (sl2, x) = sl2_bary();
    let m = graded_piece(&sl2, &x, rat(-1, 2), 2).unwrap();
    assert_eq!(m.dim(), 2);
    assert!(m.labels.iter().all(|l| matches!(l, Label::Root { .. })));
    // E12 t^{-1}, E21 t^0
    assert!(m.labels.contains(&Label::Root { i: 0, j: 1, c: int(-1) }));
    assert!(m.labels.contains(&Label::Root { i: 1, j: 0, c: int(0) }));

    let m = graded_piece(&sl2, &x, int(0), 2).unwrap();
    assert_eq!(m.labels, vec![Label::Torus { k: 0, c: int(0) }]);

    assert!(graded_piece(&sl2, &x, rat(1, 3), 2).is_err());
    assert!(graded_piece(&sl2, &x, int(0), 1).is_err());
}

#[test]
fn reductive_quotient_examples() {
    for n in 1..=3 {
        let rd = RootDatum::gl(n);
        let q = reductive_quotient(&rd, &ApartmentPoint::origin(&rd));
        assert_eq!(q.roots.len(), n * (n - 1));
        assert_eq!(q.weyl, rd.weyl_group());
    }
    let (sl2, x) = sl2_bary();
    let q = reductive_quotient(&sl2, &x);
    assert!(q.is_torus());
    assert_eq!(q.weyl, vec![vec![0, 1]]);

    let gl2 = RootDatum::gl(2);
    let y = ApartmentPoint::new(&gl2, vec![int(0), rat(1, 2)]).unwrap();
    let q = reductive_quotient(&gl2, &y);
    assert!(q.is_torus());
    assert_eq!(q.weyl.len(), 1);

    let sl3 = RootDatum::sl(3);
    assert!(reductive_quotient(&sl3, &ApartmentPoint::barycenter(&sl3)).is_torus());
}

#[test]
fn shift_examples() {
    let gl2 = RootDatum::gl(2);
    let m = graded_piece(&gl2, &ApartmentPoint::origin(&gl2), int(-1), 1).unwrap();
    assert_eq!(shift_by_scalar(&m, int(0)), m);
    let up = shift_by_scalar(&m, int(1));
    let target = graded_piece(&gl2, &ApartmentPoint::origin(&gl2), int(0), 1).unwrap();
    assert_eq!(up.labels, target.labels);
    assert_eq!(up.s, int(0));

    let (sl2, x) = sl2_bary();
    let m = graded_piece(&sl2, &x, rat(-1, 2), 2).unwrap();
    let twice = shift_by_scalar(&shift_by_scalar(&m, rat(1, 2)), rat(1, 2));
    let once = shift_by_scalar(&m, int(1));
    assert_eq!(twice.labels, once.labels);
    assert_eq!(twice.s, once.s);
    // after one half-step the labels sit on the half-integer grid of E = F(t^{1/2})
    let half = shift_by_scalar(&m, rat(1, 2));
    assert_eq!(half.cden, 2);
    assert_eq!(half.s, int(0));
}

// ---- explicit Laurent-matrix conjugation oracle ----

type Laurent = BTreeMap<Rat, Fe>;
type LMat = Vec<Vec<Laurent>>;

fn l_add(f: &Fq, a: &mut Laurent, c: Rat, v: Fe) {
    let s = f.add(*a.get(&c).unwrap_or(&Fe::ZERO), v);
    if s.is_zero() {
        a.remove(&c);
    } else {
        a.insert(c, s);
    }
}

fn l_mul(f: &Fq, a: &LMat, b: &LMat) -> LMat {
    let n = a.len();
    let mut out = vec![vec![Laurent::new(); n]; n];
    for i in 0..n {
        for k in 0..n {
            for (ca, va) in &a[i][k] {
                for j in 0..n {
                    for (cb, vb) in &b[k][j] {
                        l_add(f, &mut out[i][j], ca + cb, f.mul(*va, *vb));
                    }
                }
            }
        }
    }
    out
}

/// `t^lambda S P_sigma` and its inverse as monomial matrices.
fn h_matrices(f: &Fq, w: &AffineWeyl) -> (LMat, LMat) {
    let n = w.perm.len();
    let mut h = vec![vec![Laurent::new(); n]; n];
    let mut hinv = vec![vec![Laurent::new(); n]; n];
    for i in 0..n {
        let a = w.perm[i];
        let s = if w.signs[a] > 0 { Fe::ONE } else { f.neg(Fe::ONE) };
        h[a][i].insert(int(w.trans[a]), s);
        hinv[i][a].insert(int(-w.trans[a]), s);
    }
    (h, hinv)
}

fn laurent_of(f: &Fq, m: &GradedModel, coeffs: &[Fe]) -> LMat {
    let n = m.rd.n;
    let mut out = vec![vec![Laurent::new(); n]; n];
    for (l, &a) in m.labels.iter().zip(coeffs) {
        match *l {
            Label::Root { i, j, c } => l_add(f, &mut out[i][j], c, a),
            Label::Torus { k, c } => {
                l_add(f, &mut out[k][k], c, a);
                if m.rd.ty == GroupType::SL {
                    l_add(f, &mut out[k + 1][k + 1], c, f.neg(a));
                }
            }
        }
    }
    out
}

fn all_coeffs(f: &Fq, dim: usize) -> Vec<Vec<Fe>> {
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|v: Vec<Fe>| {
                f.elements().into_iter().map(move |a| {
                    let mut w = v.clone();
                    w.push(a);
                    w
                })
            })
            .collect();
    }
    out
}

fn check_against_oracle(f: &Fq, w: &AffineWeyl, m: &GradedModel, coeffs: &[Fe]) {
    let (target, moved) = act_affine_weyl(f, w, m, coeffs).unwrap();
    assert_eq!(target.x, w.act_point(&m.x));
    assert_eq!(target.s, m.s);
    let (h, hinv) = h_matrices(f, w);
    let direct = l_mul(f, &l_mul(f, &h, &laurent_of(f, m, coeffs)), &hinv);
    assert_eq!(laurent_of(f, &target, &moved), direct, "{w:?}");
}

#[test]
fn affine_weyl_matches_explicit_conjugation() {
    let f = Fq::new(3, 1).unwrap();
    for rd in [RootDatum::gl(2), RootDatum::sl(2), RootDatum::sl(3)] {
        let points = [ApartmentPoint::origin(&rd), ApartmentPoint::barycenter(&rd)];
        let words = affine_weyl_words(&rd, 4);
        for x in &points {
            let e = x.denominator();
            for s in [int(-1), Rat::new(-1, e)] {
                let m = graded_piece(&rd, x, s, e).unwrap();
                let sweep = all_coeffs(&f, m.dim());
                for (_, w) in &words {
                    for c in sweep.iter().step_by(1 + sweep.len() / 40) {
                        check_against_oracle(&f, w, &m, c);
                    }
                }
            }
        }
    }
}

#[test]
fn affine_weyl_examples() {
    let f = Fq::new(3, 1).unwrap();
    let rd = RootDatum::sl(2);
    let x = ApartmentPoint::origin(&rd);
    let m = graded_piece(&rd, &x, int(-1), 1).unwrap();
    let coeffs: Vec<Fe> = [1, 2, 0].iter().map(|&k| f.from_int(k)).collect();
    let id = AffineWeyl::identity(2);
    let (tx, tc) = act_affine_weyl(&f, &id, &m, &coeffs).unwrap();
    assert_eq!((tx.x, tc), (x.clone(), coeffs.clone()));

    // simple reflection: root lines swap (up to the sign of the SL_2
    // representative), torus coordinate flips sign
    let s1 = affine_generators(&rd)[1].clone();
    let (tm, tc) = act_affine_weyl(&f, &s1, &m, &coeffs).unwrap();
    let get = |model: &GradedModel, c: &[Fe], l: Label| c[model.index_of(&l).unwrap()];
    let h = Label::Torus { k: 0, c: int(-1) };
    let e12 = Label::Root { i: 0, j: 1, c: int(-1) };
    let e21 = Label::Root { i: 1, j: 0, c: int(-1) };
    assert_eq!(get(&tm, &tc, h), f.neg(get(&m, &coeffs, h)));
    assert_eq!(get(&tm, &tc, e12), f.neg(get(&m, &coeffs, e21)));
    assert_eq!(get(&tm, &tc, e21), f.neg(get(&m, &coeffs, e12)));

    // translation by the coroot: x moves, powers re-index
    let tr = AffineWeyl { perm: vec![0, 1], signs: vec![1, 1], trans: vec![1, -1] };
    let (tm, _) = act_affine_weyl(&f, &tr, &m, &coeffs).unwrap();
    assert_eq!(tm.x.coords, vec![int(-1), int(1)]);
    assert!(tm.labels.contains(&Label::Root { i: 0, j: 1, c: int(1) }));
    assert!(tm.labels.contains(&Label::Root { i: 1, j: 0, c: int(-3) }));
    check_against_oracle(&f, &tr, &m, &coeffs);
}

#[test]
fn torsion_examples() {
    let sl2 = RootDatum::sl(2);
    assert_eq!(torsion_canonical(&sl2, &[int(0)], 3), Some(vec![int(0)]));
    assert_eq!(torsion_canonical(&sl2, &[rat(1, 4)], 3), Some(vec![rat(1, 4)]));
    assert_eq!(torsion_canonical(&sl2, &[rat(3, 4)], 3), Some(vec![rat(1, 4)]));
    assert_eq!(torsion_canonical(&sl2, &[rat(1, 5)], 3), None);
    assert_eq!(dual_orbit(&sl2, &sl2.weyl_group(), &[rat(1, 4)]), vec![vec![rat(1, 4)], vec![rat(3, 4)]]);
    assert_eq!(sl2.dual_name(), "PGL_2");
}

/// Every torsion point with denominator at most `bound`, filtered by the
/// fixed-point condition. Orders divide `q^k - 1` or `q^k + 1` with `k` at
/// most the dual rank plus one, so `q^(rank + 1) - 1` covers type A up to rank 2.
fn brute_force(rd: &RootDatum, q: i64, bound: i64) -> BTreeSet<TorsionPoint> {
    let mut out = BTreeSet::new();
    for d in 1..=bound {
        for v in grid_points(rd.dual_rank(), d) {
            if let Some(c) = torsion_canonical(rd, &v, q) {
                out.insert(c);
            }
        }
    }
    out
}

#[test]
fn stable_orbits_agree_with_brute_force() {
    for (rd, q) in [(RootDatum::sl(2), 3), (RootDatum::gl(1), 3), (RootDatum::gl(2), 3), (RootDatum::sl(2), 5), (RootDatum::sl(3), 2)] {
        let exact: BTreeSet<TorsionPoint> = frobenius_stable_orbits(&rd, q).into_keys().collect();
        let bound = q.pow(rd.dual_rank() as u32 + 1) - 1;
        assert_eq!(exact, brute_force(&rd, q, bound), "{rd} q={q}");
        if rd.dual_rank() == 1 {
            assert_eq!(exact, brute_force(&rd, q, q * q - 1), "{rd} q={q}");
        }
    }
    let sl2: Vec<TorsionPoint> = frobenius_stable_orbits(&RootDatum::sl(2), 3).into_keys().collect();
    assert_eq!(sl2, vec![vec![int(0)], vec![rat(1, 4)], vec![rat(1, 2)]]);
    let gl1: Vec<TorsionPoint> = frobenius_stable_orbits(&RootDatum::gl(1), 3).into_keys().collect();
    assert_eq!(gl1, vec![vec![int(0)], vec![rat(1, 2)]]);
}

fn datum() -> impl Strategy<Value = RootDatum> {
    prop_oneof![
        (1usize..=3).prop_map(RootDatum::gl),
        (2usize..=3).prop_map(RootDatum::sl),
    ]
}

fn point(rd: RootDatum) -> impl Strategy<Value = ApartmentPoint> {
    (proptest::collection::vec(-6i64..7, rd.n), prop_oneof![Just(1i64), Just(2), Just(3), Just(4), Just(6)])
        .prop_map(move |(v, d)| ApartmentPoint::new(&rd, v.into_iter().map(|a| Rat::new(a, d)).collect()).unwrap())
}

proptest! {
    #[test]
    fn dims_are_periodic_and_sum_to_dim_g((rd, x) in datum().prop_flat_map(|rd| (Just(rd), point(rd)))) {
        let e = x.denominator();
        let mut total = 0;
        for k in 0..e {
            let s = Rat::new(k, e);
            let a = graded_piece(&rd, &x, s, e).unwrap().dim();
            let b = graded_piece(&rd, &x, s + int(1), e).unwrap().dim();
            let c = graded_piece(&rd, &x, s - int(3), e).unwrap().dim();
            prop_assert_eq!(a, b);
            prop_assert_eq!(a, c);
            total += a;
        }
        prop_assert_eq!(total, rd.dim());
    }

    #[test]
    fn degree_zero_quotient_matches_integral_roots((rd, x) in datum().prop_flat_map(|rd| (Just(rd), point(rd)))) {
        let m = graded_piece(&rd, &x, int(0), x.denominator()).unwrap();
        let q = reductive_quotient(&rd, &x);
        prop_assert_eq!(m.dim(), rd.torus_rank() + q.roots.len());
        // W_x preserves the integral root system
        for w in &q.weyl {
            for &(i, j) in &q.roots {
                prop_assert!(q.roots.contains(&(w[i], w[j])));
            }
        }
    }

    #[test]
    fn shifts_compose(a in -8i64..9, b in -8i64..9, d in 1i64..5) {
        let (rd, x) = sl2_bary();
        let m = graded_piece(&rd, &x, rat(-1, 2), 2).unwrap();
        let (va, vb) = (Rat::new(a, d), Rat::new(b, d));
        let two = shift_by_scalar(&shift_by_scalar(&m, va), vb);
        let one = shift_by_scalar(&m, va + vb);
        prop_assert_eq!(two.labels, one.labels);
        prop_assert_eq!(two.s, one.s);
    }

    #[test]
    fn torsion_canonical_is_orbit_constant(
        rd in prop_oneof![Just(RootDatum::sl(2)), Just(RootDatum::gl(2)), Just(RootDatum::sl(3))],
        nums in proptest::collection::vec(0i64..24, 2),
        d in 1i64..25,
        q in prop_oneof![Just(2i64), Just(3), Just(5)],
    ) {
        let v: Vec<Rat> = nums[..rd.dual_rank()].iter().map(|&a| frac(&Rat::new(a, d))).collect();
        let c = torsion_canonical(&rd, &v, q);
        for w in rd.weyl_group() {
            prop_assert_eq!(torsion_canonical(&rd, &rd.dual_act(&w, &v), q), c.clone());
        }
        if let Some(c) = c {
            prop_assert_eq!(torsion_canonical(&rd, &c, q), Some(c.clone()));
            prop_assert!(is_reduced(&c));
        }
    }
}
