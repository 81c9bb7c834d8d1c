//! Named verification suites for `verify`.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ramlang_core::cft::counterexample_report;
use ramlang_core::dlparams::*;
use ramlang_core::fq::{Fe, Fq};
use ramlang_core::localfield::{
    adapted_catalog, character_conductor, find_adapted_report, galois_catalog, upper_break, with_precision,
    AdditiveCharacter, Extension, FieldError, StepKind, Tower, TowerDescriptor,
};
use ramlang_core::ramification::RamDatum;
use ramlang_core::rat::{fmt_rat, int, rat};
use ramlang_core::rootdata::*;
use ramlang_core::series::{Series, EXACT};
use ramlang_core::{Depth, Rat};
use serde_json::{json, Value};

use crate::json::{self as js};
use crate::{parse, usage, Checks, CliError, RunConfig};

type SuiteFn = fn(&RunConfig) -> Result<(Value, Checks), CliError>;

/// `(name, statement checked, runner)`.
pub const SUITES: &[(&str, &str, SuiteFn)] = &[
    ("adapted-extension", "a catalog tower with n | e(L/F) and u(L/F) < eps exists and keeps both under a tame compositum", adapted_extension),
    ("conductor-shift", "c(L/E) = u(L/E) - ell(L/E), and c is the drop of the additive-character conductor", conductor_shift_suite),
    ("depth-zero", "Frobenius-stable W-orbits of torsion points of the dual torus, against brute force", depth_zero),
    ("depth-zero-pushforward", "a W_x-orbit pushes forward to its W-orbit, unchanged by affine Weyl transport", depth_zero_pushforward_suite),
    ("equivalent-clauses", "the combinatorial clauses and the field-level norm clause agree at every grid level", equivalent_clauses),
    ("herbrand-composition", "phi and psi compose along towers and c is additive", herbrand_composition),
    ("inertia-intersection", "the upper group of M/L at psi_{L/E}(s)+ is the upper group of M/E at s+ met with Gal(M/L)", inertia_intersection),
    ("nondegeneracy", "nonvanishing invariants iff zero is outside the orbit closure, over k and a quadratic extension", nondegeneracy),
    ("norm-surjectivity", "the graded norm is onto iff L/E is unramified or s > ell, and then Nm(1+x) = 1+Tr(x)", norm_surjectivity),
    ("parameter-invariance", "the depth-r parameter is unchanged by affine Weyl transport and by the adapted choice", parameter_invariance),
    ("restricted-parameter", "restricted parameters exist exactly for nondegenerate types and agree with the parameter", restricted_parameter),
    ("stable-association", "associate types have stably associate parameters", stable_association),
    ("toral-norm", "chi_{X,E'} = chi_{X,E} o Nm on every graded representative", toral_norm),
    ("unit-quotient-counterexample", "F^x modulo <1+t^n : n in S> is (Z/p)^2 and its last upper group is cyclic of order p", unit_quotient_counterexample),
];

pub fn verify(config: &RunConfig) -> Result<(Value, Checks), CliError> {
    let name = config.suite.as_deref().ok_or_else(|| usage("verify needs --suite (or --suite list)"))?;
    match name {
        "list" => {
            let list: serde_json::Map<String, Value> =
                SUITES.iter().map(|(n, s, _)| (n.to_string(), Value::String(s.to_string()))).collect();
            Ok((json!({ "suites": list }), Checks::default()))
        }
        "all" => {
            let mut checks = Checks::default();
            let mut results = serde_json::Map::new();
            for (n, _, f) in SUITES {
                let (r, c) = f(config)?;
                results.insert(n.to_string(), r);
                checks.merge_prefixed(n, c);
            }
            Ok((Value::Object(results), checks))
        }
        _ => {
            let (_, statement, f) = SUITES
                .iter()
                .find(|(n, _, _)| *n == name)
                .ok_or_else(|| usage(format!("unknown suite {name}; try --suite list")))?;
            let (mut r, c) = f(config)?;
            if let Value::Object(m) = &mut r {
                m.insert("statement".into(), Value::String(statement.to_string()));
            }
            Ok((r, c))
        }
    }
}

// ---- helpers ----

fn rng(config: &RunConfig) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(config.seed)
}

fn samples(config: &RunConfig, default: usize) -> Result<usize, CliError> {
    config.params.get("samples").map_or(Ok(default), |s| parse::integer("samples", &s))
}

/// The given `--tower`, or the default list.
fn towers(config: &RunConfig, default: impl FnOnce() -> Vec<TowerDescriptor>) -> Result<Vec<TowerDescriptor>, CliError> {
    match config.params.get("tower") {
        Some(t) => Ok(vec![parse::tower(&t)?]),
        None => Ok(default()),
    }
}

fn err_json<E: std::fmt::Display>(e: E) -> Value {
    json!({ "error": e.to_string() })
}

/// Run `op` on each tower, recording one item per tower.
fn per_tower(
    config: &RunConfig,
    list: &[TowerDescriptor],
    mut op: impl FnMut(&Tower) -> Result<(bool, Value), FieldError>,
) -> (Value, Checks) {
    let mut checks = Checks::default();
    let mut out = serde_json::Map::new();
    for d in list {
        let r = with_precision(d, config.prec, &mut op);
        if let Ok((_, v)) = &r {
            out.insert(d.label(), v.clone());
        }
        checks.record_result(d.label(), r);
    }
    (json!({ "towers": out }), checks)
}

// ---- ramification suites ----

/// `c = u - ell` and the conductor comparison on one Galois tower.
pub fn conductor_check(t: &Tower) -> Result<(bool, Value), FieldError> {
    let d = Extension::full(t)?.realize_ramdatum()?;
    let b = d.breaks()?;
    let chr = AdditiveCharacter::standard();
    let drop = character_conductor(&chr, t, 0)? - character_conductor(&chr, t, t.top())?;
    let pass = b.c == b.u - b.ell && b.c == drop;
    Ok((pass, json!({ "breaks": js::breaks(&b), "u_minus_ell": js::rat(&(b.u - b.ell)), "conductor_drop": js::rat(&drop) })))
}

fn conductor_shift_suite(config: &RunConfig) -> Result<(Value, Checks), CliError> {
    let list = towers(config, || galois_catalog().into_iter().filter(|d| d.degree() <= 12).collect())?;
    Ok(per_tower(config, &list, conductor_check))
}

/// Composition laws at every Galois split `L/K/F` of the tower.
pub fn composition_check(t: &Tower) -> Result<(bool, Value), FieldError> {
    let full = Extension::full(t)?;
    let lf = full.realize_ramdatum()?;
    let blf = lf.breaks()?;
    let mut bad = Vec::new();
    let mut splits = 0;
    for i in 0..=t.top() {
        let lower = Extension::new(t, 0, i)?;
        if !lower.is_galois() {
            continue;
        }
        splits += 1;
        let kf = lower.realize_ramdatum()?;
        let lk = Extension::new(t, i, t.top())?.realize_ramdatum()?;
        let (blk, bkf) = (lk.breaks()?, kf.breaks()?);
        if lf.hh_phi() != kf.hh_phi().compose(&lk.hh_phi()) {
            bad.push(format!("phi at level {i}"));
        }
        if lf.hh_psi() != lk.hh_psi().compose(&kf.hh_psi()) {
            bad.push(format!("psi at level {i}"));
        }
        if blf.c != blk.c + bkf.c {
            bad.push(format!("c at level {i}"));
        }
    }
    Ok((bad.is_empty(), json!({ "splits": splits, "failures": bad, "phi": js::emit_plot_data(&lf.hh_phi()) })))
}

fn herbrand_composition(config: &RunConfig) -> Result<(Value, Checks), CliError> {
    let list = towers(config, galois_catalog)?;
    Ok(per_tower(config, &list, composition_check))
}

/// Graded norm surjectivity and the additive comparison on `(0, u+1]`.
pub fn norm_check(t: &Tower) -> Result<(bool, Value), FieldError> {
    let ext = Extension::full(t)?;
    let d = ext.realize_ramdatum()?;
    let b = d.breaks()?;
    let e = d.e() as i64;
    let top = ((b.u + int(1)) * int(e)).floor().to_integer();
    let mut rows = Vec::new();
    let mut pass = true;
    for k in 1..=top {
        let s = rat(k, e);
        let g = ext.norm_graded(s)?;
        let expected = d.is_unramified() || (d.order() > 1 && s > b.ell);
        let ok = g.surjective == expected && (s <= b.ell || g.additive_match);
        pass &= ok;
        rows.push(json!({
            "s": js::rat(&s),
            "target": js::rat(&g.target),
            "surjective": g.surjective,
            "expected": expected,
            "additive_match": g.additive_match,
            "pass": ok,
        }));
    }
    Ok((pass, json!({ "breaks": js::breaks(&b), "levels": rows })))
}

fn norm_surjectivity(config: &RunConfig) -> Result<(Value, Checks), CliError> {
    let list = towers(config, || {
        vec![TowerDescriptor::base(3, 1).artin_schreier(1), TowerDescriptor::base(5, 1).artin_schreier(1)]
    })?;
    Ok(per_tower(config, &list, norm_check))
}

/// The three combinatorial clauses against the field-level norm clause.
pub fn clause_check(t: &Tower) -> Result<(bool, Value), FieldError> {
    let ext = Extension::full(t)?;
    let d = ext.realize_ramdatum()?;
    let grid = d.grid()?;
    let mut disagree = Vec::new();
    for &s in &grid {
        let (b1, b2, b3) = d.check_clauses_combinatorial(s)?;
        let field = ext.check_norm_clause_field(s)?;
        if !(b1 == b2 && b2 == b3 && b3 == field) {
            disagree.push(json!({ "s": js::rat(&s), "combinatorial": [b1, b2, b3], "field": field }));
        }
    }
    Ok((disagree.is_empty(), json!({ "levels": grid.len(), "disagreements": disagree })))
}

fn equivalent_clauses(config: &RunConfig) -> Result<(Value, Checks), CliError> {
    let list = towers(config, galois_catalog)?;
    Ok(per_tower(config, &list, clause_check))
}

fn strictly_above(d: &RamDatum, t: Rat) -> BTreeSet<usize> {
    (0..d.order()).filter(|&k| d.depth(k).is_some_and(|x| x > Depth::Finite(t))).collect()
}

/// `Gamma(M/L)^{psi_{L/F}(s)+} = Gamma(M/F)^{s+} ∩ Gal(M/L)` at every
/// intermediate level `L` and grid level `s`.
pub fn intersection_check(t: &Tower) -> Result<(bool, Value), FieldError> {
    let full = Extension::full(t)?;
    let d = full.realize_ramdatum()?;
    let mut bad = Vec::new();
    let mut count = 0;
    for i in 0..=t.top() {
        let mut h = full.fixing(i)?;
        h.sort_unstable();
        let dh = d.restrict(&h)?;
        let psi_lf = t.step_composed_phi(0, i)?.inverse();
        for s in d.grid()? {
            let lhs: BTreeSet<usize> =
                strictly_above(&dh, dh.hh_psi().eval(psi_lf.eval(s))).into_iter().map(|k| h[k]).collect();
            let rhs: BTreeSet<usize> =
                strictly_above(&d, d.hh_psi().eval(s)).into_iter().filter(|k| h.binary_search(k).is_ok()).collect();
            count += 1;
            if lhs != rhs {
                bad.push(format!("level {i}, s = {}", fmt_rat(&s)));
            }
        }
    }
    Ok((bad.is_empty(), json!({ "comparisons": count, "failures": bad })))
}

fn inertia_intersection(config: &RunConfig) -> Result<(Value, Checks), CliError> {
    let list = towers(config, galois_catalog)?;
    Ok(per_tower(config, &list, intersection_check))
}

fn adapted_extension(config: &RunConfig) -> Result<(Value, Checks), CliError> {
    let f = parse::field(&config.params.get("field").unwrap_or_else(|| "9".into()))?;
    let n: u64 = parse::integer("n", &config.params.get("n").unwrap_or_else(|| "3".into()))?;
    let eps = parse::rational(&config.params.get("eps").unwrap_or_else(|| "1/2".into()))?;
    let mut checks = Checks::default();
    let rep = match find_adapted_report(&adapted_catalog(f.p(), f.degree()), n, eps) {
        Ok(r) => r,
        Err(e) => {
            checks.record("search", false, err_json(e));
            return Ok((json!({}), checks));
        }
    };
    let u = with_precision(&rep.tower, config.prec, upper_break);
    checks.record(
        "tower",
        rep.e % n == 0 && u.as_ref().is_ok_and(|u| *u == rep.u && *u < eps),
        json!({ "e": rep.e, "u": u.as_ref().map(js::rat).unwrap_or_else(err_json) }),
    );
    let mut tame_seen = false;
    let mut stab = Vec::new();
    for (c, ec, uc) in &rep.stability {
        let tame = c.steps.iter().any(|s| s.kind == StepKind::Tame) && c != &rep.tower;
        tame_seen |= tame;
        let again = with_precision(c, config.prec, upper_break);
        checks.record(
            format!("compositum {c}"),
            ec % n == 0 && again.as_ref().is_ok_and(|a| a == uc && *uc == rep.u),
            json!({ "e": ec, "u": js::rat(uc) }),
        );
        stab.push(Value::String(c.label()));
    }
    checks.record("tame compositum present", tame_seen, json!(stab));
    let result = json!({
        "tower": rep.tower.label(),
        "e": rep.e,
        "u": js::rat(&rep.u),
        "n": n,
        "eps": js::rat(&eps),
        "composita": stab,
    });
    Ok((result, checks))
}

fn toral_norm(config: &RunConfig) -> Result<(Value, Checks), CliError> {
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
    let mut checks = Checks::default();
    for (desc, lo, hi, x, r) in pairs {
        let name = format!("{desc} {lo}->{hi}");
        let res = norm_compatibility(&chr, &desc, lo, hi, std::slice::from_ref(&x), r).and_then(|c| {
            let ch = with_precision(&desc, config.prec, |t| {
                ToralCharacter::new(&chr, t, hi, std::slice::from_ref(&x), r).map_err(|e| match e {
                    DlError::Field(fe) => fe,
                    other => FieldError::Domain(other.to_string()),
                })
            })?;
            let mism: Vec<Value> = c
                .mismatches
                .iter()
                .map(|(k, a, l, rr)| json!({ "coordinate": k, "residue": a, "upper": js::rat(l), "lower": js::rat(rr) }))
                .collect();
            Ok((
                c.mismatches.is_empty() && !ch.is_trivial(),
                json!({ "r": js::rat(&r), "checked": c.checked, "mismatches": mism, "c": js::rat(&ch.c), "n": ch.n }),
            ))
        });
        checks.record_result(name, res);
    }
    Ok((json!({}), checks))
}

fn unit_quotient_counterexample(config: &RunConfig) -> Result<(Value, Checks), CliError> {
    let ps: Vec<u32> = match config.params.get("p") {
        Some(p) => vec![parse::integer("p", &p)?],
        None => vec![2, 3],
    };
    let mut checks = Checks::default();
    let mut out = serde_json::Map::new();
    for p in ps {
        let r = counterexample_report(p).map_err(usage)?;
        let v = crate::commands::counterexample_json(&r);
        let pass = r.invariants == vec![i64::from(p); 2]
            && r.gamma_d_order == u64::from(p)
            && r.gamma_d_cyclic
            && r.surjection_is_iso
            && r.exact_sequence
            && r.c == r.u - r.ell;
        checks.record(format!("p={p}"), pass, json!({ "d": js::rat(&r.d), "invariants": r.invariants }));
        out.insert(format!("p={p}"), v);
    }
    Ok((Value::Object(out), checks))
}

// ---- parameter suites ----

fn sweep_field() -> Fq {
    Fq::new(3, 1).expect("F_3")
}

fn cases(config: &RunConfig) -> Result<Vec<SweepCase>, CliError> {
    let all = standard_cases();
    match config.params.get("group") {
        None => Ok(all),
        Some(g) => {
            let rd = parse::group(&g)?;
            let v: Vec<SweepCase> = all.into_iter().filter(|c| c.rd == rd).collect();
            if v.is_empty() {
                return Err(usage(format!("no standard sweep for {g}; use GL2 or SL2")));
            }
            Ok(v)
        }
    }
}

fn choices(case: &SweepCase, f: &Fq) -> Result<Vec<VerifiedChoice>, CliError> {
    case.choices.iter().map(|c| verify_choice(c, case.r, f).map_err(usage)).collect()
}

fn parameter_invariance(config: &RunConfig) -> Result<(Value, Checks), CliError> {
    let f = sweep_field();
    let n = samples(config, 20)?;
    let mut rng = rng(config);
    let mut checks = Checks::default();
    for case in cases(config)? {
        let ch = choices(&case, &f)?;
        let types = sweep_types(&case, &f).map_err(usage)?;
        let words = affine_weyl_words(&case.rd, 6);
        let mut bad = Vec::new();
        let mut seen = Vec::new();
        for _ in 0..n {
            let mt = types.choose(&mut rng).expect("sweeps are nonempty");
            let (word, w) = words.choose(&mut rng).expect("words include the identity");
            let res = (|| -> Result<bool, DlError> {
                let d0 = dl_parameter(mt, &ch[0])?;
                let d1 = dl_parameter(mt, &ch[1])?;
                let dw = dl_parameter(&mt.transport(w)?, &ch[0])?;
                Ok(d0.canonical == d1.canonical && dl_equiv(&f, &d0, &d1) && dw.canonical == d0.canonical)
            })();
            let codes: Vec<u32> = mt.coeffs.iter().map(|&a| f.code(a)).collect();
            seen.push(json!({ "X": js::fes(&f, &mt.coeffs), "word": word }));
            match res {
                Ok(true) => {}
                Ok(false) => bad.push(json!({ "X": codes, "word": word })),
                Err(e) => bad.push(json!({ "X": codes, "word": word, "error": e.to_string() })),
            }
        }
        checks.record(case.name.clone(), bad.is_empty(), json!({ "samples": seen, "failures": bad }));
    }
    Ok((json!({ "samples_per_case": n }), checks))
}

fn nondegeneracy(_config: &RunConfig) -> Result<(Value, Checks), CliError> {
    let f3 = sweep_field();
    let f9 = Fq::new(3, 2).expect("F_9");
    let mut oracle = OrbitOracle::new();
    let mut checks = Checks::default();
    for case in cases(_config)? {
        let mut bad = Vec::new();
        let types = sweep_types(&case, &f3).map_err(usage)?;
        let mut nondeg = 0;
        for mt in &types {
            let nd = is_nondegenerate(mt);
            nondeg += usize::from(nd.flag);
            for big in [&f3, &f9] {
                match oracle.degenerate_over(mt, big) {
                    Ok(deg) if deg != nd.flag => {}
                    Ok(_) => bad.push(json!({ "X": js::fes(&f3, &mt.coeffs), "field": big.order() })),
                    Err(e) => bad.push(err_json(e)),
                }
            }
        }
        checks.record(
            case.name.clone(),
            bad.is_empty(),
            json!({ "types": types.len(), "nondegenerate": nondeg, "mismatches": bad }),
        );
    }
    Ok((json!({}), checks))
}

fn stable_association(config: &RunConfig) -> Result<(Value, Checks), CliError> {
    let f = sweep_field();
    let n = samples(config, 200)?;
    let mut rng = rng(config);
    let mut oracle = OrbitOracle::new();
    let mut checks = Checks::default();
    for case in cases(config)? {
        let ch = choices(&case, &f)?.remove(0);
        let types = sweep_types(&case, &f).map_err(usage)?;
        let short = affine_weyl_words(&case.rd, 3);
        let mut words_to: BTreeMap<ApartmentPoint, Vec<(Vec<usize>, AffineWeyl)>> = BTreeMap::new();
        let (mut yes, mut unknown) = (0, 0);
        let mut bad = Vec::new();
        for _ in 0..n {
            let m1 = types.choose(&mut rng).expect("nonempty");
            let m2 = if rng.gen_bool(0.5) {
                types.choose(&mut rng).expect("nonempty").clone()
            } else {
                let (_, w) = short.choose(&mut rng).expect("nonempty");
                m1.scaled(Fe::ONE).transport(w).map_err(usage)?
            };
            let words =
                words_to.entry(m2.x.clone()).or_insert_with(|| words_between(&case.rd, &m1.x, &m2.x, 6));
            match associate_with_words(&mut oracle, m1, &m2, words).map_err(usage)? {
                Associate::Yes(word) => {
                    yes += 1;
                    if !stable_associate(m1, &ch, &m2, &ch).map_err(usage)? {
                        bad.push(json!({ "X1": js::fes(&f, &m1.coeffs), "X2": js::fes(&f, &m2.coeffs), "word": word }));
                    }
                }
                Associate::Unknown => unknown += 1,
                Associate::No => {}
            }
        }
        checks.record(
            case.name.clone(),
            bad.is_empty(),
            json!({ "pairs": n, "associate": yes, "undecided": unknown, "counterexamples": bad }),
        );
    }
    Ok((json!({ "pairs_per_case": n }), checks))
}

fn restricted_parameter(config: &RunConfig) -> Result<(Value, Checks), CliError> {
    let f = sweep_field();
    let mut checks = Checks::default();
    for case in cases(config)? {
        let ch = choices(&case, &f)?.remove(0);
        let mut bad = Vec::new();
        let types = sweep_types(&case, &f).map_err(usage)?;
        for mt in &types {
            let nd = is_nondegenerate(mt).flag;
            let ok = match restricted_param(mt, &ch) {
                Ok(rp) => nd && dl_parameter(mt, &ch).is_ok_and(|p| p == rp.param),
                Err(DlError::Degenerate) => !nd,
                Err(_) => false,
            };
            if !ok {
                bad.push(js::fes(&f, &mt.coeffs));
            }
        }
        checks.record(case.name.clone(), bad.is_empty(), json!({ "types": types.len(), "failures": bad }));
    }
    Ok((json!({}), checks))
}

// ---- depth zero ----

/// Brute-force stable orbits up to the denominator bound `q^2 - 1` for
/// rank one and `q^(rank+1) - 1` in general.
pub fn brute_force_orbits(rd: &RootDatum, q: i64) -> Vec<TorsionPoint> {
    let rank = rd.dual_rank() as u32;
    let bound = if rank == 1 { q * q - 1 } else { q.pow(rank + 1) - 1 };
    let mut out = BTreeSet::new();
    for d in 1..=bound {
        for v in grid_points(rd.dual_rank(), d) {
            if let Some(c) = torsion_canonical(rd, &v, q) {
                out.insert(c);
            }
        }
    }
    out.into_iter().collect()
}

fn depth_zero_groups(config: &RunConfig, default: &[&str]) -> Result<(Vec<RootDatum>, i64), CliError> {
    let groups = match config.params.get("group") {
        Some(g) => vec![parse::group(&g)?],
        None => default.iter().map(|g| parse::group(g)).collect::<Result<_, _>>()?,
    };
    let q: i64 = parse::integer("q", &config.params.get("q").unwrap_or_else(|| "3".into()))?;
    if q < 2 {
        return Err(usage("--q must be a prime power"));
    }
    Ok((groups, q))
}

fn torsion_json(v: &[Rat]) -> Value {
    js::rats(v)
}

fn depth_zero(config: &RunConfig) -> Result<(Value, Checks), CliError> {
    let (groups, q) = depth_zero_groups(config, &["SL2", "GL1"])?;
    let mut checks = Checks::default();
    let mut out = serde_json::Map::new();
    for rd in groups {
        let classes = depth_zero_space(&rd, q);
        let canon: Vec<TorsionPoint> = classes.iter().map(|c| c.canonical.clone()).collect();
        let brute = brute_force_orbits(&rd, q);
        checks.record(
            rd.to_string(),
            canon == brute,
            json!({ "classes": canon.len(), "brute_force": brute.iter().map(|v| torsion_json(v)).collect::<Vec<_>>() }),
        );
        out.insert(rd.to_string(), crate::commands::depth_zero_json(&classes));
    }
    Ok((Value::Object(out), checks))
}

fn depth_zero_pushforward_suite(config: &RunConfig) -> Result<(Value, Checks), CliError> {
    let (groups, q) = depth_zero_groups(config, &["SL2", "GL2"])?;
    let mut checks = Checks::default();
    for rd in groups {
        let words = affine_weyl_words(&rd, 3);
        let mut bad = Vec::new();
        let mut count = 0;
        for x in [ApartmentPoint::origin(&rd), ApartmentPoint::barycenter(&rd)] {
            let wx = reductive_quotient(&rd, &x).weyl;
            for class in depth_zero_space(&rd, q) {
                let mut rest: BTreeSet<TorsionPoint> = class.orbit.iter().cloned().collect();
                while let Some(v) = rest.iter().next().cloned() {
                    let theta = dual_orbit(&rd, &wx, &v);
                    for t in &theta {
                        rest.remove(t);
                    }
                    count += 1;
                    match depth_zero_pushforward(&rd, &x, &theta) {
                        Ok(p) if p.canonical == class.canonical => {}
                        Ok(_) => bad.push(json!({ "theta": theta.iter().map(|t| torsion_json(t)).collect::<Vec<_>>() })),
                        Err(e) => bad.push(err_json(e)),
                    }
                    for (word, w) in &words {
                        let y = w.act_point(&x);
                        let moved: Vec<TorsionPoint> = theta.iter().map(|t| rd.dual_act(&w.perm, t)).collect();
                        match depth_zero_pushforward(&rd, &y, &moved) {
                            Ok(p) if p.canonical == class.canonical => {}
                            Ok(_) => bad.push(json!({ "word": word, "moved": true })),
                            Err(e) => bad.push(json!({ "word": word, "error": e.to_string() })),
                        }
                    }
                }
            }
        }
        checks.record(rd.to_string(), bad.is_empty(), json!({ "orbits": count, "failures": bad }));
    }
    Ok((json!({ "q": q }), checks))
}
