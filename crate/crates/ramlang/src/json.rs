//! JSON encodings of core values.

use ramlang_core::fq::{Fe, Fq};
use ramlang_core::plfun::PLFun;
use ramlang_core::ramification::{Breaks, RamDatum};
use ramlang_core::rat::fmt_rat;
use ramlang_core::Rat;
use serde_json::{json, Value};

pub fn rat(r: &Rat) -> Value {
    Value::String(fmt_rat(r))
}

pub fn rats(rs: &[Rat]) -> Value {
    Value::Array(rs.iter().map(rat).collect())
}

/// Power-basis coefficients, constant term first.
pub fn fe(f: &Fq, a: Fe) -> Value {
    json!(f.digits(a))
}

pub fn fes(f: &Fq, xs: &[Fe]) -> Value {
    Value::Array(xs.iter().map(|&a| fe(f, a)).collect())
}

pub fn breaks(b: &Breaks) -> Value {
    json!({ "ell": rat(&b.ell), "u": rat(&b.u), "c": rat(&b.c) })
}

/// Breakpoints and slopes of a piecewise-linear function, plus a plot table
/// with one row per segment: start, end (`null` for the last), slope and
/// value at the start.
pub fn emit_plot_data(f: &PLFun) -> Value {
    let b = f.breaks();
    let rows: Vec<Value> = b
        .iter()
        .zip(f.slopes())
        .enumerate()
        .map(|(i, (start, slope))| {
            json!({
                "start": rat(start),
                "end": b.get(i + 1).map_or(Value::Null, rat),
                "slope": rat(slope),
                "value": rat(&f.eval(*start)),
            })
        })
        .collect();
    json!({ "breaks": rats(b), "slopes": rats(f.slopes()), "segments": rows })
}

/// Datum as `{elements, mul, inertia, depth, e, e_base}`; `depth` is keyed
/// by element index and omits the identity.
pub fn datum(d: &RamDatum) -> Value {
    let depth: serde_json::Map<String, Value> = d.depth_map().iter().map(|(k, v)| (k.to_string(), rat(v))).collect();
    json!({
        "elements": d.names(),
        "mul": d.mul_table(),
        "inertia": d.inertia(),
        "depth": depth,
        "e": d.e(),
        "e_base": d.e_base(),
    })
}
