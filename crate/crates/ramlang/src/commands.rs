//! `hh`, `tower`, `cft`, `dlparam` and `depth0`.

use ramlang_core::cft::{
    counterexample_report, to_ramdatum, unit_quotient, upper_filtration, CounterexampleReport, IndexSet,
};
use ramlang_core::dlparams::*;
use ramlang_core::localfield::{with_precision, Extension, FieldError, TowerDescriptor};
use ramlang_core::ramification::RamDatum;
use ramlang_core::rootdata::{affine_weyl_words, RootDatum};
use serde_json::{json, Value};

use crate::json::{self as js};
use crate::{parse, suites, usage, Checks, CliError, RunConfig};

fn datum_report(d: &RamDatum, checks: &mut Checks) -> Value {
    let phi = d.hh_phi();
    let psi = d.hh_psi();
    let inverse = psi.compose(&phi).is_identity() && phi.compose(&psi).is_identity();
    checks.record("psi inverts phi", inverse, Value::Null);
    let breaks = d.breaks();
    checks.record(
        "c = u - ell",
        breaks.is_ok(),
        breaks.as_ref().map(js::breaks).unwrap_or_else(|e| json!({ "error": e.to_string() })),
    );
    let upper: Vec<Value> = d
        .depth_values()
        .iter()
        .map(|&v| {
            let s = phi.eval(v);
            json!({ "s": js::rat(&s), "order": d.upper_group(s).map(|g| g.len()).unwrap_or(0) })
        })
        .collect();
    json!({
        "datum": js::datum(d),
        "phi": js::emit_plot_data(&phi),
        "psi": js::emit_plot_data(&psi),
        "breaks": breaks.as_ref().map(js::breaks).unwrap_or(Value::Null),
        "upper_groups": upper,
        "phi_is_identity": phi.is_identity(),
    })
}

fn realize(config: &RunConfig, d: &TowerDescriptor) -> Result<RamDatum, CliError> {
    with_precision(d, config.prec, |t| Extension::full(t)?.realize_ramdatum()).map_err(usage)
}

pub fn hh(config: &RunConfig) -> Result<(Value, Checks), CliError> {
    let d = match (config.params.get("datum"), config.params.get("tower")) {
        (Some(s), _) => parse::datum(&s)?,
        (None, Some(t)) => realize(config, &parse::tower(&t)?)?,
        (None, None) => return Err(usage("hh needs --datum or --tower")),
    };
    let mut checks = Checks::default();
    let r = datum_report(&d, &mut checks);
    Ok((r, checks))
}

pub fn tower(config: &RunConfig) -> Result<(Value, Checks), CliError> {
    let desc = parse::tower(&config.params.require("tower")?)?;
    let info = with_precision(&desc, config.prec, |t| {
        let full = Extension::full(t)?;
        let phi = t.step_composed_phi(0, t.top())?;
        Ok((full.is_galois(), phi))
    })
    .map_err(usage)?;
    let (galois, phi) = info;
    let mut result = json!({
        "tower": desc.label(),
        "degree": desc.degree(),
        "e": desc.ram_index(),
        "residue_degree": desc.top_residue_deg(),
        "galois": galois,
        "step_phi": js::emit_plot_data(&phi),
    });
    let mut checks = Checks::default();
    if galois {
        let d = realize(config, &desc)?;
        let mut sub = Checks::default();
        result["datum"] = datum_report(&d, &mut sub);
        checks.merge_prefixed("datum", sub);
        type Check = fn(&ramlang_core::localfield::Tower) -> Result<(bool, Value), FieldError>;
        let named: [(&str, Check); 5] = [
            ("conductor-shift", suites::conductor_check),
            ("herbrand-composition", suites::composition_check),
            ("equivalent-clauses", suites::clause_check),
            ("inertia-intersection", suites::intersection_check),
            ("norm-surjectivity", suites::norm_check),
        ];
        for (name, f) in named {
            let r = with_precision(&desc, config.prec, f);
            if let Ok((_, v)) = &r {
                result[name] = v.clone();
            }
            checks.record_result(name, r);
        }
    }
    Ok((result, checks))
}

pub fn counterexample_json(r: &CounterexampleReport) -> Value {
    let words = |ws: &[ramlang_core::cft::Word]| ws.iter().map(ToString::to_string).collect::<Vec<_>>();
    json!({
        "p": r.p,
        "S": r.s.to_string(),
        "level": r.prec,
        "generators": words(&r.generators),
        "invariants": r.invariants,
        "breaks": js::rats(&r.breaks),
        "d": js::rat(&r.d),
        "gamma_d_order": r.gamma_d_order,
        "gamma_d_cyclic": r.gamma_d_cyclic,
        "intermediate_generator": r.intermediate_generator.to_string(),
        "intermediate_invariants": r.intermediate_invariants,
        "intermediate_breaks": js::rats(&r.intermediate_breaks),
        "surjection_is_iso": r.surjection_is_iso,
        "depths": js::rats(&r.depths),
        "ell": js::rat(&r.ell),
        "u": js::rat(&r.u),
        "c": js::rat(&r.c),
        "exact_sequence": r.exact_sequence,
    })
}

pub fn cft(config: &RunConfig) -> Result<(Value, Checks), CliError> {
    let p: u32 = parse::integer("p", &config.params.require("p")?)?;
    let mut checks = Checks::default();
    match config.action.as_deref() {
        Some("counterexample") => {
            let r = counterexample_report(p).map_err(usage)?;
            checks.record("quotient is (Z/p)^2", r.invariants == vec![i64::from(p); 2], json!(r.invariants));
            checks.record(
                "last upper group cyclic of order p",
                r.gamma_d_cyclic && r.gamma_d_order == u64::from(p),
                json!(r.gamma_d_order),
            );
            checks.record("last upper group maps isomorphically", r.surjection_is_iso, Value::Null);
            checks.record("exact sequence", r.exact_sequence, Value::Null);
            checks.record("c = u - ell", r.c == r.u - r.ell, js::rat(&r.c));
            Ok((counterexample_json(&r), checks))
        }
        Some("quotient") => {
            let listed: Vec<u32> = match config.params.get("listed") {
                Some(s) => serde_json::from_value(parse::load_json(&s)?).map_err(usage)?,
                None => Vec::new(),
            };
            let tail = match config.params.get("tail") {
                Some(s) => Some(parse::integer("tail", &s)?),
                None => None,
            };
            let s = IndexSet::new(&listed, tail);
            let level = match config.params.get("level") {
                Some(l) => parse::integer("level", &l)?,
                None => s.max_marker() + 3,
            };
            let uq = unit_quotient(p, &s, level).map_err(usage)?;
            let filt = upper_filtration(&uq);
            let levels: Vec<Value> = filt
                .levels
                .iter()
                .map(|l| json!({ "n": l.n, "order": l.order, "invariants": l.invariants }))
                .collect();
            let mut result = json!({
                "p": p,
                "S": s.to_string(),
                "level": level,
                "generators": uq.generators().iter().map(ToString::to_string).collect::<Vec<_>>(),
                "invariants": uq.invariants(),
                "order": uq.order(),
                "breaks": js::rats(&filt.breaks),
                "last_break": js::rat(&filt.last_break),
                "filtration": levels,
            });
            match to_ramdatum(&uq) {
                Ok((d, _)) => {
                    let b = d.breaks();
                    checks.record("c = u - ell", b.is_ok(), b.as_ref().map(js::breaks).unwrap_or(Value::Null));
                    result["datum"] = js::datum(&d);
                }
                Err(e) => checks.record("datum", false, json!({ "error": e.to_string() })),
            }
            Ok((result, checks))
        }
        other => Err(usage(format!("cft action must be counterexample or quotient, got {other:?}"))),
    }
}

pub fn dlparam(config: &RunConfig) -> Result<(Value, Checks), CliError> {
    let params = &config.params;
    let rd = parse::group(&params.require("group")?)?;
    let x = parse::point(&rd, &params.require("x")?)?;
    let r = parse::rational(&params.require("r")?)?;
    let f = parse::field(&params.get("field").unwrap_or_else(|| "3".into()))?;
    let coeffs = parse::elements(&f, &params.require("X")?)?;
    let mt = MPType::new(rd, x.clone(), r, f.clone(), coeffs).map_err(usage)?;
    let b = match params.get("b") {
        Some(s) => parse::element(&f, &parse::load_json(&s).or_else(|_| serde_json::from_str(&s).map_err(usage))?)?,
        None => ramlang_core::fq::Fe::ONE,
    };
    let choice = match params.get("tower") {
        Some(t) => AdaptedChoice { tower: parse::tower(&t)?, b },
        None => AdaptedChoice { b, ..default_choice(f.p(), r).map_err(usage)? },
    };
    let vc = verify_choice(&choice, r, &f).map_err(usage)?;
    let param = dl_parameter(&mt, &vc).map_err(usage)?;
    let nd = is_nondegenerate(&mt);
    let mut checks = Checks::default();
    let mut moved_bad = Vec::new();
    for (word, w) in affine_weyl_words(&rd, 2) {
        let ok = mt.transport(&w).and_then(|m| dl_parameter(&m, &vc)).is_ok_and(|p| p.canonical == param.canonical);
        if !ok {
            moved_bad.push(json!(word));
        }
    }
    checks.record("transport invariance", moved_bad.is_empty(), json!(moved_bad));
    let labels: Vec<String> = mt.model.labels.iter().map(ToString::to_string).collect();
    let result = json!({
        "group": rd.to_string(),
        "x": js::rats(&x.coords),
        "r": js::rat(&r),
        "field": f.order(),
        "labels": labels,
        "X": js::fes(&f, &mt.coeffs),
        "nondegenerate": nd.flag,
        "witness": nd.witness,
        "decisive": nd.guaranteed,
        "Z": js::fes(&f, &param.z),
        "Z_ref": js::fes(&f, &param.z_ref),
        "beta": js::fe(&f, param.beta),
        "canonical": js::fes(&f, &param.canonical),
        "class": param.class_string(&f),
        "trivial": param.trivial,
        "choice": {
            "tower": vc.choice.tower.label(),
            "b": js::fe(&f, vc.choice.b),
            "e": vc.e,
            "u": js::rat(&vc.u),
        },
    });
    Ok((result, checks))
}

pub fn depth_zero_json(classes: &[DepthZeroParam]) -> Value {
    Value::Array(
        classes
            .iter()
            .map(|c| {
                json!({
                    "canonical": js::rats(&c.canonical),
                    "orbit": c.orbit.iter().map(|v| js::rats(v)).collect::<Vec<_>>(),
                })
            })
            .collect(),
    )
}

pub fn depth0(config: &RunConfig) -> Result<(Value, Checks), CliError> {
    let params = &config.params;
    let rd: RootDatum = parse::group(&params.require("group")?)?;
    let q: i64 = parse::integer("q", &params.require("q")?)?;
    if q < 2 {
        return Err(usage("--q must be a prime power"));
    }
    let classes = depth_zero_space(&rd, q);
    let mut checks = Checks::default();
    let brute = suites::brute_force_orbits(&rd, q);
    let canon: Vec<_> = classes.iter().map(|c| c.canonical.clone()).collect();
    checks.record("brute force", canon == brute, json!(brute.len()));
    let mut result = json!({
        "group": rd.to_string(),
        "dual": rd.dual_name(),
        "q": q,
        "classes": depth_zero_json(&classes),
    });
    if let Some(theta) = params.get("theta") {
        let x = parse::point(&rd, &params.get("x").unwrap_or_else(|| "vertex".into()))?;
        let theta = parse::torsion_points(&theta)?;
        let p = depth_zero_pushforward(&rd, &x, &theta).map_err(usage)?;
        let known = canon.contains(&p.canonical);
        checks.record("pushforward is a listed class", known, js::rats(&p.canonical));
        result["pushforward"] = depth_zero_json(&[p]);
    }
    Ok((result, checks))
}
