//! Acceptance gate: runs every criterion at its stated tolerance and prints
//! one PASS/FAIL line per criterion. Exits non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use ramlang_core::cft::counterexample_report;
use ramlang_core::dlparams::*;
use ramlang_core::fq::{Fe, Fq};
use ramlang_core::localfield::{
    adapted_catalog, find_adapted_report, galois_catalog, upper_break, with_precision, AdditiveCharacter, Extension,
    FieldError, Tower, TowerDescriptor, DEFAULT_PREC,
};
use ramlang_core::rat::{int, rat};
use ramlang_core::ramification::RamDatum;
use ramlang_core::rootdata::*;
use ramlang_core::series::{Series, EXACT};
use ramlang_core::Rat;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn counterexample() -> Outcome {
    let start = Instant::now();
    let r3 = counterexample_report(3).map_err(err)?;
    ensure!(r3.invariants == vec![3, 3], "p=3 quotient {:?}", r3.invariants);
    ensure!(r3.d == int(2), "p=3 last break {}", r3.d);
    ensure!(r3.gamma_d_order == 3 && r3.gamma_d_cyclic, "p=3 Gamma^d of order {}", r3.gamma_d_order);
    let r2 = counterexample_report(2).map_err(err)?;
    ensure!(r2.invariants == vec![2, 2], "p=2 quotient {:?}", r2.invariants);
    ensure!(r2.d == int(3), "p=2 last break {}", r2.d);
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(1), "took {t:?}");
    Ok("(Z/3)^2 with d=2, (Z/2)^2 with d=3".to_string())
}

struct Split {
    lf: RamDatum,
    lk: RamDatum,
    kf: RamDatum,
}

fn galois_splits(t: &Tower) -> Result<Vec<Split>, FieldError> {
    let full = Extension::full(t)?;
    let lf = full.realize_ramdatum()?;
    let mut out = Vec::new();
    for i in 0..=t.top() {
        let lower = Extension::new(t, 0, i)?;
        if !lower.is_galois() {
            continue;
        }
        let kf = lower.realize_ramdatum()?;
        let lk = Extension::new(t, i, t.top())?.realize_ramdatum()?;
        out.push(Split { lf: lf.clone(), lk, kf });
    }
    Ok(out)
}

fn herbrand() -> Outcome {
    let start = Instant::now();
    let mut towers = 0;
    let mut splits = 0;
    for desc in galois_catalog() {
        let all = with_precision(&desc, DEFAULT_PREC, galois_splits).map_err(err)?;
        for s in &all {
            let (blf, blk, bkf) = (s.lf.breaks().map_err(err)?, s.lk.breaks().map_err(err)?, s.kf.breaks().map_err(err)?);
            ensure!(s.lf.hh_phi() == s.kf.hh_phi().compose(&s.lk.hh_phi()), "phi composition fails on {desc}");
            ensure!(s.lf.hh_psi() == s.lk.hh_psi().compose(&s.kf.hh_psi()), "psi composition fails on {desc}");
            ensure!(blf.c == blk.c + bkf.c, "c additivity fails on {desc}");
            for b in [&blf, &blk, &bkf] {
                ensure!(b.c == b.u - b.ell, "c != u - ell on {desc}");
            }
        }
        splits += all.len();
        towers += 1;
    }
    ensure!(towers >= 20, "only {towers} towers");
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(30), "took {t:?}");
    Ok(format!("{towers} towers, {splits} splits in {:.1}s", t.as_secs_f64()))
}

fn norm_surjectivity() -> Outcome {
    let mut points = 0;
    for p in [3, 5] {
        let desc = TowerDescriptor::base(p, 1).artin_schreier(1);
        let res = with_precision(&desc, DEFAULT_PREC, |t| {
            let ext = Extension::full(t)?;
            let d = ext.realize_ramdatum()?;
            let b = d.breaks()?;
            let e = d.e() as i64;
            let unramified = d.is_unramified();
            let trivial = d.order() == 1;
            let top = ((b.u + int(1)) * int(e)).floor().to_integer();
            let mut rows = Vec::new();
            for k in 1..=top {
                let s = Rat::new(k, e);
                let g = ext.norm_graded(s)?;
                let expected = unramified || (!trivial && s > b.ell);
                rows.push((s, g, expected, s > b.ell));
            }
            Ok(rows)
        })
        .map_err(err)?;
        for (s, g, expected, above) in res {
            ensure!(g.surjective == expected, "p={p}, s={s}: surjective={} expected {expected}", g.surjective);
            if above {
                ensure!(g.additive_match, "p={p}, s={s}: Nm(1+x) != 1+Tr(x)");
            }
            points += 1;
        }
    }
    Ok(format!("{points} grid points on the AS cubic and quintic"))
}

fn equivalent_clauses() -> Outcome {
    let mut points = 0;
    let mut bad = Vec::new();
    for desc in galois_catalog() {
        let rows = with_precision(&desc, DEFAULT_PREC, |t| {
            let ext = Extension::full(t)?;
            let d = ext.realize_ramdatum()?;
            let mut rows = Vec::new();
            for s in d.grid()? {
                let (b1, b2, b3) = d.check_clauses_combinatorial(s)?;
                rows.push((s, b1, b2, b3, ext.check_norm_clause_field(s)?));
            }
            Ok(rows)
        })
        .map_err(err)?;
        let wrong: Vec<_> = rows
            .iter()
            .filter(|(_, b1, b2, b3, field)| !(b1 == b2 && b2 == b3 && b3 == field))
            .map(|(s, ..)| s.to_string())
            .collect();
        if !wrong.is_empty() {
            bad.push(format!("{desc} at s in {{{}}}", wrong.join(",")));
        }
        points += rows.len();
    }
    ensure!(bad.is_empty(), "field clause disagrees on {} towers: {}", bad.len(), bad.join("; "));
    Ok(format!("{points} grid points over the catalog"))
}

fn verified_choices(case: &SweepCase, f: &Fq) -> Result<Vec<VerifiedChoice>, String> {
    case.choices.iter().map(|c| verify_choice(c, case.r, f).map_err(err)).collect()
}

fn invariance() -> Outcome {
    let f = Fq::new(3, 1).map_err(err)?;
    let mut checks = 0;
    for case in standard_cases() {
        let choices = verified_choices(&case, &f)?;
        let words = affine_weyl_words(&case.rd, 6);
        let types = sweep_types(&case, &f).map_err(err)?;
        ensure!(types.len() <= 81, "{}: {} instances", case.name, types.len());
        for mt in &types {
            let d0 = dl_parameter(mt, &choices[0]).map_err(err)?;
            let d1 = dl_parameter(mt, &choices[1]).map_err(err)?;
            ensure!(d0.canonical == d1.canonical, "{}: choices disagree", case.name);
            ensure!(dl_equiv(&f, &d0, &d1), "{}: choices are not equivalent", case.name);
            for (word, w) in &words {
                let moved = mt.transport(w).map_err(err)?;
                let dw = dl_parameter(&moved, &choices[0]).map_err(err)?;
                ensure!(dw.canonical == d0.canonical, "{}: word {word:?} changes the parameter", case.name);
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} transports, 2 choices per case"))
}

fn nondegeneracy() -> Outcome {
    let start = Instant::now();
    let f3 = Fq::new(3, 1).map_err(err)?;
    let f9 = Fq::new(3, 2).map_err(err)?;
    let mut oracle = OrbitOracle::new();
    let mut n = 0;
    for case in standard_cases() {
        for mt in sweep_types(&case, &f3).map_err(err)? {
            let nd = is_nondegenerate(&mt);
            ensure!(nd.guaranteed, "{}: r is not 3-integral", case.name);
            for big in [&f3, &f9] {
                let degenerate = oracle.degenerate_over(&mt, big).map_err(err)?;
                ensure!(nd.flag != degenerate, "{}: mismatch over F_{}", case.name, big.order());
            }
            n += 1;
        }
    }
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(120), "took {t:?}");
    Ok(format!("{n} types over F_3 and F_9 in {:.1}s", t.as_secs_f64()))
}

fn association() -> Outcome {
    let f = Fq::new(3, 1).map_err(err)?;
    let mut oracle = OrbitOracle::new();
    let (mut yes, mut pairs) = (0, 0);
    for case in standard_cases() {
        let choice = verified_choices(&case, &f)?.remove(0);
        let types = sweep_types(&case, &f).map_err(err)?;
        let all_words = affine_weyl_words(&case.rd, 6);
        // second members: the sweep itself and its transport by a length-3 word
        let (_, far) = all_words.iter().find(|(w, _)| w.len() == 3).cloned().ok_or("no length-3 word")?;
        let mut targets = types.clone();
        for mt in &types {
            targets.push(mt.transport(&far).map_err(err)?);
        }
        let here = words_between(&case.rd, &case.x, &case.x, 6);
        let there = words_between(&case.rd, &case.x, &far.act_point(&case.x), 6);
        for m1 in &types {
            for m2 in &targets {
                let words = if m2.x == case.x { &here } else { &there };
                let a = associate_with_words(&mut oracle, m1, m2, words).map_err(err)?;
                if let Associate::Yes(word) = a {
                    yes += 1;
                    ensure!(
                        stable_associate(m1, &choice, m2, &choice).map_err(err)?,
                        "{}: associate via {word:?} but not stably associate",
                        case.name
                    );
                }
                pairs += 1;
            }
        }
    }
    ensure!(yes > 0, "the oracle never found an association");
    Ok(format!("{yes} associate pairs out of {pairs}, no counterexample"))
}

fn toral_norm() -> Outcome {
    let chr = AdditiveCharacter::standard();
    let b = TowerDescriptor::base(3, 1);
    let x1 = Series::monomial(Fe::ONE, -1, EXACT);
    let x2 = Series::monomial(Fe::ONE, -2, EXACT);
    let wild = b.clone().tame(2).artin_schreier(2);
    let pairs = [
        (b.clone().tame(2), 0, 1, x1.clone(), int(1)),
        (b.clone().unramified(2), 0, 1, x1, int(1)),
        (b.clone().artin_schreier(1), 0, 1, x2.clone(), int(2)),
        (wild.clone(), 1, 2, x2.clone(), int(2)),
        (wild, 0, 2, x2, int(2)),
    ];
    let mut checked = 0;
    for (desc, lo, hi, x, r) in pairs {
        let c = norm_compatibility(&chr, &desc, lo, hi, std::slice::from_ref(&x), r).map_err(err)?;
        ensure!(c.mismatches.is_empty(), "{desc} levels {lo}->{hi}: {:?}", c.mismatches);
        let nontrivial = with_precision(&desc, DEFAULT_PREC, |t| {
            ToralCharacter::new(&chr, t, hi, std::slice::from_ref(&x), r).map(|ch| !ch.is_trivial()).map_err(|e| match e {
                DlError::Field(fe) => fe,
                other => FieldError::Domain(other.to_string()),
            })
        })
        .map_err(err)?;
        ensure!(nontrivial, "{desc}: character at level {hi} is trivial");
        checked += c.checked;
    }
    Ok(format!("5 tower pairs, {checked} graded representatives"))
}

fn brute_force_orbits(rd: &RootDatum, q: i64) -> Vec<TorsionPoint> {
    let mut out = std::collections::BTreeSet::new();
    for d in 1..=q * q - 1 {
        for v in grid_points(rd.dual_rank(), d) {
            if let Some(c) = torsion_canonical(rd, &v, q) {
                out.insert(c);
            }
        }
    }
    out.into_iter().collect()
}

fn depth_zero() -> Outcome {
    let sl2 = RootDatum::sl(2);
    let gl1 = RootDatum::gl(1);
    let classes = |rd: &RootDatum| depth_zero_space(rd, 3).into_iter().map(|d| d.canonical).collect::<Vec<_>>();
    let s = classes(&sl2);
    ensure!(s == vec![vec![int(0)], vec![rat(1, 4)], vec![rat(1, 2)]], "SL_2: {s:?}");
    ensure!(s == brute_force_orbits(&sl2, 3), "SL_2 brute force disagrees");
    let g = classes(&gl1);
    ensure!(g == vec![vec![int(0)], vec![rat(1, 2)]], "GL_1: {g:?}");
    ensure!(g == brute_force_orbits(&gl1, 3), "GL_1 brute force disagrees");
    Ok("SL_2: {0},{1/4},{1/2}; GL_1: {0},{1/2}".into())
}

fn adapted_extension() -> Outcome {
    let eps = rat(1, 2);
    let rep = find_adapted_report(&adapted_catalog(3, 2), 3, eps).map_err(err)?;
    ensure!(rep.e % 3 == 0, "e = {}", rep.e);
    let u = with_precision(&rep.tower, DEFAULT_PREC, upper_break).map_err(err)?;
    ensure!(u == rep.u && u < eps, "u = {u}");
    let tame: Vec<_> = rep
        .stability
        .iter()
        .filter(|(c, _, _)| c.steps.iter().any(|s| s.kind == ramlang_core::localfield::StepKind::Tame) && c != &rep.tower)
        .collect();
    ensure!(!tame.is_empty(), "no tame compositum checked");
    for (c, ec, uc) in &tame {
        let again = with_precision(c, DEFAULT_PREC, upper_break).map_err(err)?;
        ensure!(again == *uc && *uc == u && ec % 3 == 0, "{c}: e={ec}, u={uc}");
    }
    Ok(format!("{} with e={} and u={}; compositum {}", rep.tower, rep.e, u, tame[0].0))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("unit-quotient counterexample", counterexample),
        ("Herbrand calculus on the catalog", herbrand),
        ("graded norm surjectivity", norm_surjectivity),
        ("equivalent ramification clauses", equivalent_clauses),
        ("parameter invariance", invariance),
        ("nondegeneracy biconditional", nondegeneracy),
        ("association implies stable association", association),
        ("toral norm compatibility", toral_norm),
        ("depth-zero enumeration", depth_zero),
        ("adapted extension search", adapted_extension),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} [{secs:.2}s]: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} [{secs:.2}s]: {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
