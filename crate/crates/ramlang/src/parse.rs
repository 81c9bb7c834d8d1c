//! Text and JSON inputs.

use std::collections::BTreeMap;

use ramlang_core::fq::{Fe, Fq};
use ramlang_core::localfield::{StepKind, TowerDescriptor};
use ramlang_core::ramification::RamDatum;
use ramlang_core::rat::parse_rat;
use ramlang_core::rootdata::{ApartmentPoint, GroupType, RootDatum, TorsionPoint};
use ramlang_core::Rat;
use serde_json::Value;

use crate::{usage, CliError};

/// Inline JSON when the text starts with `{` or `[`, otherwise a file path.
pub fn load_json(s: &str) -> Result<Value, CliError> {
    let t = s.trim_start();
    let text = if t.starts_with('{') || t.starts_with('[') {
        s.to_string()
    } else {
        std::fs::read_to_string(s).map_err(|e| CliError::Usage(format!("cannot read {s}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("malformed JSON in {s}: {e}")))
}

pub fn rational(s: &str) -> Result<Rat, CliError> {
    parse_rat(s.trim().trim_matches('"')).map_err(usage)
}

pub fn rational_value(v: &Value) -> Result<Rat, CliError> {
    match v {
        Value::String(s) => rational(s),
        Value::Number(n) => n.as_i64().map(Rat::from_integer).ok_or_else(|| usage(format!("{n} is not an integer"))),
        other => Err(usage(format!("expected a rational, got {other}"))),
    }
}

pub fn integer<T: std::str::FromStr>(name: &str, s: &str) -> Result<T, CliError> {
    s.trim().parse().map_err(|_| usage(format!("--{name} expects an integer, got {s:?}")))
}

fn prime_power(q: u32) -> Option<(u32, u32)> {
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let (mut m, mut n) = (q, 0);
    while m % p == 0 {
        m /= p;
        n += 1;
    }
    (m == 1).then_some((p, n))
}

/// `9`, `F_9` or `F9`.
pub fn field(s: &str) -> Result<Fq, CliError> {
    let t = s.trim().trim_start_matches("F_").trim_start_matches('F');
    let q: u32 = integer("field", t)?;
    let (p, n) = prime_power(q).ok_or_else(|| usage(format!("{q} is not a prime power")))?;
    Fq::new(p, n).map_err(usage)
}

/// `AS<p>` (the Artin-Schreier extension `y^p - y = 1/t`), a label
/// `F_q[step,...]` with steps `unr<f>`, `tame<m>`, `AS<m>`, or a JSON object
/// `{"p", "residue_deg", "steps": [{"kind", "param"}]}`.
pub fn tower(s: &str) -> Result<TowerDescriptor, CliError> {
    let s = s.trim();
    let bad = || usage(format!("cannot parse tower {s:?}"));
    if s.starts_with('{') {
        return tower_json(&load_json(s)?).ok_or_else(bad);
    }
    if let Some(p) = s.strip_prefix("AS").and_then(|p| p.parse::<u32>().ok()) {
        prime_power(p).filter(|&(_, n)| n == 1).ok_or_else(bad)?;
        return Ok(TowerDescriptor::base(p, 1).artin_schreier(1));
    }
    let rest = s.strip_prefix("F_").ok_or_else(bad)?;
    let (q, steps) = rest.split_once('[').ok_or_else(bad)?;
    let steps = steps.strip_suffix(']').ok_or_else(bad)?;
    let q: u32 = q.parse().map_err(|_| bad())?;
    let (p, n) = prime_power(q).ok_or_else(bad)?;
    let mut d = TowerDescriptor::base(p, n);
    for step in steps.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        let split = step.find(|c: char| c.is_ascii_digit()).ok_or_else(bad)?;
        let kind = StepKind::parse(&step[..split]).ok_or_else(bad)?;
        let param: u32 = step[split..].parse().map_err(|_| bad())?;
        d = d.then(kind, param);
    }
    Ok(d)
}

fn tower_json(v: &Value) -> Option<TowerDescriptor> {
    let small = |v: &Value| v.as_u64().and_then(|k| u32::try_from(k).ok());
    let p = small(v.get("p")?)?;
    prime_power(p).filter(|&(_, n)| n == 1)?;
    let mut d = TowerDescriptor::base(p, v.get("residue_deg").map_or(Some(1), small)?);
    for step in v.get("steps").map_or(Some(&Vec::new()), Value::as_array)? {
        d = d.then(StepKind::parse(step.get("kind")?.as_str()?)?, small(step.get("param")?)?);
    }
    Some(d)
}

/// `GL2`, `GL_2`, `SL3`, ...
pub fn group(s: &str) -> Result<RootDatum, CliError> {
    let t = s.trim().to_ascii_uppercase().replace('_', "");
    let bad = || usage(format!("cannot parse group {s:?}"));
    let ty = match &t.get(..2) {
        Some("GL") => GroupType::GL,
        Some("SL") => GroupType::SL,
        _ => return Err(bad()),
    };
    let n: usize = t[2..].parse().map_err(|_| bad())?;
    RootDatum::new(ty, n).map_err(usage)
}

fn rational_list(s: &str) -> Result<Vec<Rat>, CliError> {
    match load_json(s)? {
        Value::Array(xs) => xs.iter().map(rational_value).collect(),
        other => Err(usage(format!("expected an array of rationals, got {other}"))),
    }
}

/// `vertex`, `barycenter`, a single rational `a` (rank 2: the point
/// `(a, -a)`) or a JSON array of coordinates.
pub fn point(rd: &RootDatum, s: &str) -> Result<ApartmentPoint, CliError> {
    let t = s.trim();
    match t {
        "vertex" | "origin" => return Ok(ApartmentPoint::origin(rd)),
        "barycenter" => return Ok(ApartmentPoint::barycenter(rd)),
        _ => {}
    }
    let coords = if t.starts_with('[') {
        rational_list(t)?
    } else {
        let a = rational(t)?;
        match rd.n {
            1 => vec![a],
            2 => vec![a, -a],
            _ => return Err(usage("a single coordinate only describes rank-2 points")),
        }
    };
    ApartmentPoint::new(rd, coords).map_err(usage)
}

/// A field element from a prime-field integer or a coefficient array.
pub fn element(f: &Fq, v: &Value) -> Result<Fe, CliError> {
    match v {
        Value::Number(n) => n.as_i64().map(|k| f.from_int(k)).ok_or_else(|| usage(format!("bad element {n}"))),
        Value::Array(ds) => {
            let d: Vec<u32> = ds
                .iter()
                .map(|x| x.as_u64().and_then(|k| u32::try_from(k).ok()).ok_or_else(|| usage(format!("bad digit {x}"))))
                .collect::<Result<_, _>>()?;
            f.from_digits(&d).map_err(usage)
        }
        Value::String(s) => element(f, &load_json_scalar(s)?),
        other => Err(usage(format!("bad element {other}"))),
    }
}

fn load_json_scalar(s: &str) -> Result<Value, CliError> {
    serde_json::from_str(s.trim()).map_err(|e| usage(format!("bad element {s:?}: {e}")))
}

pub fn elements(f: &Fq, s: &str) -> Result<Vec<Fe>, CliError> {
    match load_json(s)? {
        Value::Array(xs) => xs.iter().map(|v| element(f, v)).collect(),
        other => Err(usage(format!("expected an array of field elements, got {other}"))),
    }
}

/// An array of torsion points, each an array of rationals.
pub fn torsion_points(s: &str) -> Result<Vec<TorsionPoint>, CliError> {
    match load_json(s)? {
        Value::Array(pts) => pts
            .iter()
            .map(|p| match p {
                Value::Array(xs) => xs.iter().map(rational_value).collect(),
                other => rational_value(other).map(|r| vec![r]),
            })
            .collect(),
        other => Err(usage(format!("expected an array of torsion points, got {other}"))),
    }
}

/// Datum from JSON:
///
/// ```json
/// { "mul": [[0,1],[1,0]], "elements": ["1","g"], "inertia": [0,1],
///   "depth": {"1": "1/2"}, "e_base": 1 }
/// ```
///
/// Only `mul` is required. `inertia` defaults to the whole group and
/// `depth` is keyed by element index or name. `names` and `depths` are
/// accepted as aliases, and an `e` key is checked against the datum. The word `trivial` gives the
/// trivial extension.
pub fn datum(s: &str) -> Result<RamDatum, CliError> {
    if s.trim() == "trivial" {
        return Ok(RamDatum::trivial(1));
    }
    let v = load_json(s)?;
    let obj = v.as_object().ok_or_else(|| usage("datum must be a JSON object"))?;
    let mul: Vec<Vec<usize>> = serde_json::from_value(obj.get("mul").cloned().ok_or_else(|| usage("datum needs mul"))?)
        .map_err(|e| usage(format!("bad mul: {e}")))?;
    let n = mul.len();
    let names: Vec<String> = match obj.get("elements").or_else(|| obj.get("names")) {
        Some(v) => serde_json::from_value(v.clone()).map_err(|e| usage(format!("bad names: {e}")))?,
        None => (0..n).map(|k| if k == 0 { "1".into() } else { format!("g{k}") }).collect(),
    };
    let inertia: Vec<usize> = match obj.get("inertia") {
        Some(v) => serde_json::from_value(v.clone()).map_err(|e| usage(format!("bad inertia: {e}")))?,
        None => (0..n).collect(),
    };
    let mut depth = BTreeMap::new();
    if let Some(d) = obj.get("depth").or_else(|| obj.get("depths")) {
        let d = d.as_object().ok_or_else(|| usage("depth must be an object"))?;
        for (k, v) in d {
            let idx = k
                .parse::<usize>()
                .ok()
                .or_else(|| names.iter().position(|x| x == k))
                .ok_or_else(|| usage(format!("unknown element {k}")))?;
            depth.insert(idx, rational_value(v)?);
        }
    }
    let e_base = match obj.get("e_base") {
        Some(v) => v.as_u64().ok_or_else(|| usage("e_base must be a positive integer"))?,
        None => 1,
    };
    let d = RamDatum::new(names, mul, &inertia, &depth, e_base).map_err(usage)?;
    if let Some(e) = obj.get("e") {
        if e.as_u64() != Some(d.e()) {
            return Err(usage(format!("e = {e} does not match the datum (e = {})", d.e())));
        }
    }
    Ok(d)
}
