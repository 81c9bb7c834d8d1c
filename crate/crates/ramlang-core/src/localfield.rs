//! Explicit towers over `F = F_q((t))`.
//!
//! A tower `F = K_0 ⊂ K_1 ⊂ ... ⊂ K_n` is built from three kinds of steps:
//!
//! - `unramified(f)`: enlarge the residue field by degree `f`;
//! - `tame(m)`: adjoin `pi^m = varpi` (needs `gcd(m, p) = 1` and `mu_m` in the
//!   residue field, so every step is Galois);
//! - `artin_schreier(m)`: adjoin `y^p - y = varpi^{-m}` with `gcd(m, p) = 1`.
//!
//! Every level `K_i = k_i((pi_i))` carries an explicit uniformizer. For an
//! Artin-Schreier step with `a m + b p = 1` we take `pi = z^a varpi^b`,
//! `z = 1/y`; then `z = pi^m h` where `h = (1 - pi^{m(p-1)} h^{p-1})^b`, and
//! `varpi = pi^p (h^p / (1 - pi^{m(p-1)} h^{p-1}))^{1/m}`. All series use one
//! coefficient field, the residue field of the top level.
//!
//! Automorphisms of `K_j` over `K_i` are found by extending the identity level
//! by level, solving `tau(pi)^m = tau(varpi)` or `delta^p - delta = D` inside
//! `K_j`. If some step has fewer extensions than its degree, `K_j/K_i` is not
//! Galois.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_integer::Integer;
use num_traits::Zero;

use crate::fq::{Fe, Fq, FqError};
use crate::plfun::PLFun;
use crate::ramification::{RamDatum, RamError};
use crate::rat::{int, rat, Depth, Rat};
use crate::series::{Series, EXACT};

/// Default working precision, in uniformizer units of each level.
pub const DEFAULT_PREC: i64 = 40;
/// Largest precision tried by [`with_precision`].
pub const MAX_PREC: i64 = 320;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldError {
    Precision(String),
    Domain(String),
    NotGalois,
    Unsupported(String),
    NotFound(String),
    Fq(FqError),
    Ram(RamError),
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::Precision(w) => write!(f, "precision exhausted: {w}"),
            FieldError::Domain(w) => write!(f, "domain error: {w}"),
            FieldError::NotGalois => f.write_str("extension is not Galois"),
            FieldError::Unsupported(w) => write!(f, "unsupported: {w}"),
            FieldError::NotFound(w) => write!(f, "not found: {w}"),
            FieldError::Fq(e) => write!(f, "{e}"),
            FieldError::Ram(e) => write!(f, "{e}"),
        }
    }
}

impl From<FqError> for FieldError {
    fn from(e: FqError) -> Self {
        FieldError::Fq(e)
    }
}

impl From<RamError> for FieldError {
    fn from(e: RamError) -> Self {
        FieldError::Ram(e)
    }
}

fn prec_err(what: &str) -> FieldError {
    FieldError::Precision(what.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StepKind {
    Unramified,
    Tame,
    ArtinSchreier,
}

impl StepKind {
    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            StepKind::Unramified => "unramified",
            StepKind::Tame => "tame",
            StepKind::ArtinSchreier => "artin_schreier",
        }
    }

    #[must_use]
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "unramified" | "unr" => Some(StepKind::Unramified),
            "tame" => Some(StepKind::Tame),
            "artin_schreier" | "as" | "AS" => Some(StepKind::ArtinSchreier),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step {
    pub kind: StepKind,
    pub param: u32,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            StepKind::Unramified => write!(f, "unr{}", self.param),
            StepKind::Tame => write!(f, "tame{}", self.param),
            StepKind::ArtinSchreier => write!(f, "AS{}", self.param),
        }
    }
}

/// `F_{p^residue_deg}((t))` followed by a list of steps.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TowerDescriptor {
    pub p: u32,
    pub residue_deg: u32,
    pub steps: Vec<Step>,
}

impl TowerDescriptor {
    #[must_use]
    pub fn base(p: u32, residue_deg: u32) -> Self {
        Self { p, residue_deg, steps: Vec::new() }
    }

    #[must_use]
    pub fn then(mut self, kind: StepKind, param: u32) -> Self {
        self.steps.push(Step { kind, param });
        self
    }

    #[must_use]
    pub fn unramified(self, f: u32) -> Self {
        self.then(StepKind::Unramified, f)
    }

    #[must_use]
    pub fn tame(self, m: u32) -> Self {
        self.then(StepKind::Tame, m)
    }

    #[must_use]
    pub fn artin_schreier(self, m: u32) -> Self {
        self.then(StepKind::ArtinSchreier, m)
    }

    #[must_use]
    pub fn prefix(&self, n: usize) -> Self {
        Self { p: self.p, residue_deg: self.residue_deg, steps: self.steps[..n].to_vec() }
    }

    #[must_use]
    pub fn step_degree(&self, s: &Step) -> u64 {
        match s.kind {
            StepKind::ArtinSchreier => self.p as u64,
            _ => s.param as u64,
        }
    }

    #[must_use]
    pub fn degree(&self) -> u64 {
        self.steps.iter().map(|s| self.step_degree(s)).product()
    }

    /// Ramification index over the base.
    #[must_use]
    pub fn ram_index(&self) -> u64 {
        self.steps
            .iter()
            .filter(|s| s.kind != StepKind::Unramified)
            .map(|s| self.step_degree(s))
            .product()
    }

    /// Residue degree of the top level over `F_p`.
    #[must_use]
    pub fn top_residue_deg(&self) -> u32 {
        self.residue_deg
            * self.steps.iter().filter(|s| s.kind == StepKind::Unramified).map(|s| s.param).product::<u32>()
    }

    /// Short name such as `F_9[tame4,AS1]`.
    #[must_use]
    pub fn label(&self) -> String {
        let steps: Vec<String> = self.steps.iter().map(ToString::to_string).collect();
        format!("F_{}[{}]", (self.p as u64).pow(self.residue_deg), steps.join(","))
    }
}

impl fmt::Display for TowerDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// An automorphism: Frobenius power on constants and the image of the
/// uniformizer of the level it acts on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Aut {
    pub j: u32,
    pub img: Series,
}

#[derive(Debug, Clone)]
struct Level {
    step: Option<Step>,
    res_deg: u32,
    e_abs: u64,
    /// Previous uniformizer as a series in this level's uniformizer.
    emb: Series,
    /// Artin-Schreier generator `y` and exponents `(a, b)`.
    gen: Option<(Series, i64, i64)>,
}

/// Solve `a m + b p = 1` with `0 < a < p`.
fn bezout(m: i64, p: i64) -> (i64, i64) {
    let a = (1..p).find(|a| (a * m - 1).rem_euclid(p) == 0).expect("gcd(m, p) = 1");
    (a, (1 - a * m) / p)
}

/// Apply `(j, img)` to `x` by substitution.
fn apply_series(f: &Fq, j: u32, img: &Series, x: &Series) -> Result<Series, FieldError> {
    x.compose_frob(f, j, img).ok_or_else(|| prec_err("automorphism image"))
}

/// `x^p` for a series in characteristic `p`.
fn frob_power(f: &Fq, x: &Series) -> Series {
    let p = f.p() as i64;
    let mut c = Vec::new();
    for (n, a) in x.terms() {
        c.push((n * p, f.frob(a, 1)));
    }
    if c.is_empty() {
        return Series::zero(x.prec().saturating_mul(p).min(EXACT));
    }
    let start = c[0].0;
    let len = (c.last().unwrap().0 - start + 1) as usize;
    let mut coeffs = vec![Fe::ZERO; len];
    for (n, a) in c {
        coeffs[(n - start) as usize] = a;
    }
    Series::from_coeffs(start, coeffs, x.prec().saturating_mul(p).min(EXACT))
}

/// All `delta` with `delta^p - delta = d`, constants taken in `F_{p^deg}`.
fn solve_artin_schreier(f: &Fq, d: &Series, deg: u32) -> Result<Vec<Series>, FieldError> {
    let p = f.p() as i64;
    let mut d = d.clone();
    let mut delta = Series::zero(EXACT);
    while let Some(v) = d.valuation() {
        if v >= 0 {
            break;
        }
        if v % p != 0 {
            return Ok(Vec::new());
        }
        let c = d.leading().expect("nonzero");
        let b = f.frob(c, f.degree() - 1);
        let beta = Series::monomial(b, v / p, EXACT);
        d = d.sub(f, &frob_power(f, &beta).sub(f, &beta));
        delta = delta.add(f, &beta);
    }
    if d.prec() <= 0 {
        return Err(prec_err("polar part of an Artin-Schreier equation"));
    }
    let c0 = d.coeff(0).expect("prec > 0");
    let consts: Vec<Fe> = f
        .subfield(deg)
        .into_iter()
        .filter(|&x| f.sub(f.pow(x, p), x) == c0)
        .collect();
    if consts.is_empty() {
        return Ok(Vec::new());
    }
    d = d.sub(f, &Series::monomial(c0, 0, EXACT));
    let mut pos = Series::zero(d.prec());
    let mut term = d.clone();
    while term.valuation().is_some_and(|v| v < d.prec()) {
        pos = pos.sub(f, &term);
        term = frob_power(f, &term);
    }
    let delta = delta.add(f, &pos);
    Ok(consts
        .into_iter()
        .map(|x| delta.add(f, &Series::monomial(x, 0, EXACT)))
        .collect())
}

#[derive(Debug, Clone)]
pub struct Tower {
    desc: TowerDescriptor,
    fq: Fq,
    prec: i64,
    levels: Vec<Level>,
    to_top: Vec<Series>,
    step_auts: Vec<Vec<Aut>>,
}

impl Tower {
    pub fn new(desc: &TowerDescriptor) -> Result<Self, FieldError> {
        Self::with_prec(desc, DEFAULT_PREC)
    }

    pub fn with_prec(desc: &TowerDescriptor, prec: i64) -> Result<Self, FieldError> {
        let p = desc.p;
        if desc.residue_deg == 0 {
            return Err(FieldError::Domain("residue degree must be positive".into()));
        }
        let fq = Fq::new(p, desc.top_residue_deg())?;
        let mut levels = vec![Level {
            step: None,
            res_deg: desc.residue_deg,
            e_abs: 1,
            emb: Series::var(EXACT),
            gen: None,
        }];
        for step in &desc.steps {
            let prev = levels.last().expect("base level");
            let m = step.param;
            if m == 0 {
                return Err(FieldError::Domain(format!("step {step} has parameter 0")));
            }
            let level = match step.kind {
                StepKind::Unramified => Level {
                    step: Some(*step),
                    res_deg: prev.res_deg * m,
                    e_abs: prev.e_abs,
                    emb: Series::var(EXACT),
                    gen: None,
                },
                StepKind::Tame => {
                    let q = (p as u64).pow(prev.res_deg);
                    if m % p == 0 || (q - 1) % m as u64 != 0 {
                        return Err(FieldError::Domain(format!(
                            "tame({m}) needs gcd(m, p) = 1 and mu_m in F_{q}"
                        )));
                    }
                    Level {
                        step: Some(*step),
                        res_deg: prev.res_deg,
                        e_abs: prev.e_abs * m as u64,
                        emb: Series::monomial(Fe::ONE, m as i64, EXACT),
                        gen: None,
                    }
                }
                StepKind::ArtinSchreier => {
                    if m % p == 0 {
                        return Err(FieldError::Domain(format!(
                            "artin_schreier({m}) needs gcd(m, p) = 1"
                        )));
                    }
                    let (emb, y, a, b) = Self::artin_schreier_level(&fq, m as i64, prec)?;
                    Level {
                        step: Some(*step),
                        res_deg: prev.res_deg,
                        e_abs: prev.e_abs * p as u64,
                        emb,
                        gen: Some((y, a, b)),
                    }
                }
            };
            levels.push(level);
        }
        let mut tower = Self { desc: desc.clone(), fq, prec, levels, to_top: Vec::new(), step_auts: Vec::new() };
        let top = tower.top();
        tower.to_top = (0..=top).map(|i| tower.uniformizer_in(i, top)).collect::<Result<_, _>>()?;
        tower.step_auts = vec![Vec::new()];
        for i in 1..=top {
            let (mut auts, galois) = tower.automorphisms(i - 1, i)?;
            sort_auts(&tower.fq, &mut auts, tower.res_deg(i));
            if !galois {
                return Err(FieldError::Domain(format!("step {i} is not Galois over its base")));
            }
            tower.step_auts.push(auts);
        }
        Ok(tower)
    }

    fn artin_schreier_level(fq: &Fq, m: i64, prec: i64) -> Result<(Series, Series, i64, i64), FieldError> {
        let p = fq.p() as i64;
        let (a, b) = bezout(m, p);
        let pi = Series::var(EXACT);
        let lift = pi.pow(fq, m * (p - 1)).expect("monomial");
        let one = Series::one(EXACT);
        let mut h = Series::one(prec);
        loop {
            let hp1 = h.pow(fq, p - 1).expect("unit");
            let inner = one.sub(fq, &lift.mul(fq, &hp1));
            let next = inner.pow(fq, b).ok_or_else(|| prec_err("AS fixed point"))?.truncate(prec);
            if next.eq_to_prec(fq, &h) && next.prec() == h.prec() {
                h = next;
                break;
            }
            h = next;
        }
        let hp1 = h.pow(fq, p - 1).expect("unit");
        let denom = one.sub(fq, &lift.mul(fq, &hp1));
        let ratio = h.pow(fq, p).expect("unit").div(fq, &denom).ok_or_else(|| prec_err("AS ratio"))?;
        let g = ratio.one_unit_root(fq, m as u32).ok_or_else(|| prec_err("AS root"))?;
        let emb = g.shift(p);
        let y = h.inv(fq).ok_or_else(|| prec_err("AS generator"))?.shift(-m);
        Ok((emb, y, a, b))
    }

    #[must_use]
    pub fn descriptor(&self) -> &TowerDescriptor {
        &self.desc
    }

    #[must_use]
    pub fn fq(&self) -> &Fq {
        &self.fq
    }

    #[must_use]
    pub fn p(&self) -> u32 {
        self.desc.p
    }

    #[must_use]
    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// Index of the top level.
    #[must_use]
    pub fn top(&self) -> usize {
        self.levels.len() - 1
    }

    /// `e(K_i/F)`.
    #[must_use]
    pub fn e_abs(&self, i: usize) -> u64 {
        self.levels[i].e_abs
    }

    /// Degree of the residue field of `K_i` over `F_p`.
    #[must_use]
    pub fn res_deg(&self, i: usize) -> u32 {
        self.levels[i].res_deg
    }

    #[must_use]
    pub fn step(&self, i: usize) -> Option<Step> {
        self.levels[i].step
    }

    /// `[K_j : K_i]`.
    #[must_use]
    pub fn degree(&self, i: usize, j: usize) -> u64 {
        (self.e_abs(j) / self.e_abs(i)) * (self.res_deg(j) / self.res_deg(i)) as u64
    }

    /// Uniformizer of `K_i` as a series in the uniformizer of `K_tgt`.
    pub fn uniformizer_in(&self, i: usize, tgt: usize) -> Result<Series, FieldError> {
        if i == tgt {
            return Ok(Series::var(EXACT));
        }
        if let Some(t) = self.to_top.get(i) {
            if tgt == self.top() {
                return Ok(t.clone());
            }
        }
        let inner = self.uniformizer_in(i + 1, tgt)?;
        self.levels[i + 1].emb.compose(&self.fq, &inner).ok_or_else(|| prec_err("embedding"))
    }

    /// The Artin-Schreier generator `y` of level `i`, as a series in `K_tgt`.
    pub fn generator_in(&self, i: usize, tgt: usize) -> Result<Series, FieldError> {
        let (y, _, _) = self.levels[i]
            .gen
            .as_ref()
            .ok_or_else(|| FieldError::Domain(format!("level {i} is not an Artin-Schreier step")))?;
        let u = self.uniformizer_in(i, tgt)?;
        y.compose(&self.fq, &u).ok_or_else(|| prec_err("generator"))
    }

    /// F-normalized valuation of an element of `K_i` given in `pi_i`.
    pub fn valuation(&self, x: &Series, i: usize) -> Result<Rat, FieldError> {
        let v = x.valuation().ok_or_else(|| prec_err("valuation of an element zero to precision"))?;
        Ok(rat(v, self.e_abs(i) as i64))
    }

    /// Automorphisms of `K_tgt` over `K_base` (images in `pi_tgt`), and whether
    /// all `[K_tgt : K_base]` of them were found.
    pub fn automorphisms(&self, base: usize, tgt: usize) -> Result<(Vec<Aut>, bool), FieldError> {
        let f = &self.fq;
        let d_tgt = self.res_deg(tgt);
        let mut cands: Vec<(u32, Series)> = vec![(0, self.uniformizer_in(base, tgt)?)];
        let mut galois = true;
        for i in base + 1..=tgt {
            let step = self.levels[i].step.expect("non-base level");
            let step_deg = self.desc.step_degree(&step) as usize;
            let mut next = Vec::new();
            for (j, t) in cands {
                let exts: Vec<(u32, Series)> = match step.kind {
                    StepKind::Unramified => (0..step.param)
                        .map(|s| ((j + self.res_deg(i - 1) * s) % d_tgt, t.clone()))
                        .collect(),
                    StepKind::Tame => {
                        let m = step.param;
                        let v = t.valuation().ok_or_else(|| prec_err("tame image"))?;
                        let c = t.leading().expect("nonzero");
                        let cinv = f.inv(c).expect("nonzero");
                        let unit = t.shift(-v).scale(f, cinv);
                        let root = unit.one_unit_root(f, m).ok_or_else(|| prec_err("tame root"))?;
                        f.roots(c, m, d_tgt)
                            .into_iter()
                            .map(|rho| (j, root.shift(v / m as i64).scale(f, rho)))
                            .collect()
                    }
                    StepKind::ArtinSchreier => {
                        let m = step.param as i64;
                        let (_, a, b) = self.levels[i].gen.as_ref().expect("AS level");
                        let y = self.generator_in(i, tgt)?;
                        let w = self.uniformizer_in(i - 1, tgt)?;
                        let tm = t.pow(f, -m).ok_or_else(|| prec_err("AS image"))?;
                        let wm = w.pow(f, -m).ok_or_else(|| prec_err("AS image"))?;
                        let tb = t.pow(f, *b).ok_or_else(|| prec_err("AS image"))?;
                        let mut out = Vec::new();
                        for delta in solve_artin_schreier(f, &tm.sub(f, &wm), d_tgt)? {
                            let ty = y.add(f, &delta);
                            let img = ty.pow(f, -a).ok_or_else(|| prec_err("AS image"))?.mul(f, &tb);
                            out.push((j, img));
                        }
                        out
                    }
                };
                if exts.len() < step_deg {
                    galois = false;
                }
                next.extend(exts);
            }
            cands = next;
        }
        let auts: Vec<Aut> = cands.into_iter().map(|(j, img)| Aut { j, img }).collect();
        for (x, a) in auts.iter().enumerate() {
            for b in &auts[x + 1..] {
                if a.j == b.j && a.img.eq_to_prec(f, &b.img) {
                    return Err(prec_err("automorphisms indistinguishable"));
                }
            }
        }
        Ok((auts, galois))
    }

    /// Automorphisms of `K_i` over `K_{i-1}` in `pi_i`.
    #[must_use]
    pub fn step_automorphisms(&self, i: usize) -> &[Aut] {
        &self.step_auts[i]
    }

    /// Express an element of `K_tgt` lying in `K_base` as a series in `pi_base`.
    pub fn descend(&self, x: &Series, base: usize, tgt: usize) -> Result<Series, FieldError> {
        let f = &self.fq;
        let w = self.uniformizer_in(base, tgt)?;
        let e_rel = (self.e_abs(tgt) / self.e_abs(base)) as i64;
        let d_base = self.res_deg(base);
        let lead_w = w.leading().expect("uniformizer");
        let mut r = x.clone();
        let mut terms: Vec<(i64, Fe)> = Vec::new();
        while let Some(v) = r.valuation() {
            if v.rem_euclid(e_rel) != 0 {
                return Err(FieldError::Domain(format!("element is not in level {base}")));
            }
            let k = v / e_rel;
            let c = f.div(r.leading().expect("nonzero"), f.pow(lead_w, k)).expect("unit");
            if !f.in_subfield(c, d_base) {
                return Err(FieldError::Domain(format!("coefficient not in the residue field of level {base}")));
            }
            let wk = w.pow(f, k).ok_or_else(|| prec_err("descent"))?;
            r = r.sub(f, &wk.scale(f, c));
            terms.push((k, c));
        }
        let prec = Integer::div_ceil(&r.prec(), &e_rel);
        if terms.is_empty() {
            return Ok(Series::zero(prec));
        }
        let start = terms[0].0;
        let mut coeffs = vec![Fe::ZERO; (terms.last().unwrap().0 - start + 1) as usize];
        for (k, c) in terms {
            coeffs[(k - start) as usize] = c;
        }
        Ok(Series::from_coeffs(start, coeffs, prec))
    }

    /// `Tr_{K_from / K_to}` through the step automorphisms.
    pub fn trace_by_steps(&self, x: &Series, from: usize, to: usize) -> Result<Series, FieldError> {
        let f = &self.fq;
        let mut cur = x.clone();
        for i in (to + 1..=from).rev() {
            let mut acc = Series::zero(EXACT);
            for a in &self.step_auts[i] {
                acc = acc.add(f, &apply_series(f, a.j, &a.img, &cur)?);
            }
            cur = self.descend(&acc, i - 1, i)?;
        }
        Ok(cur)
    }

    /// `Nm_{K_from / K_to}` through the step automorphisms.
    pub fn norm_by_steps(&self, x: &Series, from: usize, to: usize) -> Result<Series, FieldError> {
        let f = &self.fq;
        let mut cur = x.clone();
        for i in (to + 1..=from).rev() {
            let mut acc = Series::one(EXACT);
            for a in &self.step_auts[i] {
                acc = acc.mul(f, &apply_series(f, a.j, &a.img, &cur)?);
            }
            cur = self.descend(&acc, i - 1, i)?;
        }
        Ok(cur)
    }

    /// Ramification datum of the single step `K_i / K_{i-1}`.
    pub fn step_datum(&self, i: usize) -> Result<RamDatum, FieldError> {
        let f = &self.fq;
        let auts = &self.step_auts[i];
        let e = self.e_abs(i) as i64;
        let d = self.res_deg(i);
        let mul = group_table(f, auts, d)?;
        let inertia: Vec<usize> = (0..auts.len()).filter(|&k| auts[k].j.is_multiple_of(d)).collect();
        let mut depth = BTreeMap::new();
        for &k in inertia.iter().skip(1) {
            depth.insert(k, aut_depth(f, &auts[k], e)?);
        }
        let names = (0..auts.len()).map(|k| format!("g{k}")).collect();
        Ok(RamDatum::new(names, mul, &inertia, &depth, self.e_abs(i - 1))?)
    }

    /// `phi_{K_top / K_base}` as the composite of the step functions; defined
    /// whether or not the tower is Galois.
    pub fn step_composed_phi(&self, base: usize, top: usize) -> Result<PLFun, FieldError> {
        let mut phi = PLFun::identity();
        for i in base + 1..=top {
            phi = phi.compose(&self.step_datum(i)?.hh_phi());
        }
        Ok(phi)
    }
}

/// Put the identity first, then order by Frobenius power and image.
fn sort_auts(f: &Fq, auts: &mut [Aut], d: u32) {
    auts.sort_by_key(|a| {
        let is_id = a.j % d == 0 && a.img.eq_to_prec(f, &Series::var(EXACT));
        let key: Vec<u32> =
            (1..a.img.prec().min(64)).map(|n| a.img.coeff(n).map_or(0, |c| f.code(c))).collect();
        (!is_id, a.j, key)
    });
}

fn find_aut(f: &Fq, auts: &[Aut], j: u32, img: &Series) -> Result<usize, FieldError> {
    let hits: Vec<usize> = (0..auts.len())
        .filter(|&k| auts[k].j == j && auts[k].img.eq_to_prec(f, img))
        .collect();
    match hits.as_slice() {
        [k] => Ok(*k),
        [] => Err(prec_err("composite automorphism not found")),
        _ => Err(prec_err("composite automorphism ambiguous")),
    }
}

fn group_table(f: &Fq, auts: &[Aut], d: u32) -> Result<Vec<Vec<usize>>, FieldError> {
    let mut mul = vec![vec![0; auts.len()]; auts.len()];
    for (x, a) in auts.iter().enumerate() {
        for (y, b) in auts.iter().enumerate() {
            let img = apply_series(f, a.j, &a.img, &b.img)?;
            mul[x][y] = find_aut(f, auts, (a.j + b.j) % d, &img)?;
        }
    }
    Ok(mul)
}

/// F-normalized depth of an inertia automorphism; `e` is the absolute
/// ramification index of the level the image lives in.
fn aut_depth(f: &Fq, a: &Aut, e: i64) -> Result<Rat, FieldError> {
    let diff = a.img.sub(f, &Series::var(EXACT));
    let v = diff.valuation().ok_or_else(|| prec_err("depth beyond precision"))?;
    Ok(rat(v - 1, e))
}

/// `K_top / K_base` inside a tower, with its automorphism group.
#[derive(Debug, Clone)]
pub struct Extension {
    tower: Tower,
    base: usize,
    top: usize,
    auts: Vec<Aut>,
    galois: bool,
    powers: Vec<Vec<Series>>,
}

impl Extension {
    pub fn new(tower: &Tower, base: usize, top: usize) -> Result<Self, FieldError> {
        if base > top || top > tower.top() {
            return Err(FieldError::Domain(format!("bad levels {base}..{top}")));
        }
        let (mut auts, galois) = tower.automorphisms(base, top)?;
        let f = tower.fq();
        let d = tower.res_deg(top);
        sort_auts(f, &mut auts, d);
        let len = (tower.prec() * 2) as usize;
        let powers = auts
            .iter()
            .map(|a| {
                let mut v = vec![Series::one(EXACT)];
                for n in 1..len {
                    let next = v[n - 1].mul(f, &a.img);
                    v.push(next);
                }
                v
            })
            .collect();
        Ok(Self { tower: tower.clone(), base, top, auts, galois, powers })
    }

    /// The whole tower over `F`.
    pub fn full(tower: &Tower) -> Result<Self, FieldError> {
        Self::new(tower, 0, tower.top())
    }

    #[must_use]
    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    #[must_use]
    pub fn base_level(&self) -> usize {
        self.base
    }

    #[must_use]
    pub fn top_level(&self) -> usize {
        self.top
    }

    #[must_use]
    pub fn is_galois(&self) -> bool {
        self.galois
    }

    #[must_use]
    pub fn automorphisms(&self) -> &[Aut] {
        &self.auts
    }

    #[must_use]
    pub fn degree(&self) -> u64 {
        self.tower.degree(self.base, self.top)
    }

    /// `e(L/E)`.
    #[must_use]
    pub fn ram_index(&self) -> u64 {
        self.tower.e_abs(self.top) / self.tower.e_abs(self.base)
    }

    fn fq(&self) -> &Fq {
        self.tower.fq()
    }

    fn e_top(&self) -> i64 {
        self.tower.e_abs(self.top) as i64
    }

    fn e_base(&self) -> i64 {
        self.tower.e_abs(self.base) as i64
    }

    fn require_galois(&self) -> Result<(), FieldError> {
        if self.galois {
            Ok(())
        } else {
            Err(FieldError::NotGalois)
        }
    }

    /// Uniformizer of the base as a series in the top uniformizer.
    pub fn base_uniformizer(&self) -> Result<Series, FieldError> {
        self.tower.uniformizer_in(self.base, self.top)
    }

    /// Map an element of the base (series in `pi_base`) into the top.
    pub fn lift(&self, x: &Series) -> Result<Series, FieldError> {
        x.compose(self.fq(), &self.base_uniformizer()?).ok_or_else(|| prec_err("lift"))
    }

    /// F-normalized valuation of an element of the top field.
    pub fn valuation(&self, x: &Series) -> Result<Rat, FieldError> {
        self.tower.valuation(x, self.top)
    }

    /// Apply automorphism `k` to an element of the top field.
    pub fn apply(&self, k: usize, x: &Series) -> Result<Series, FieldError> {
        let f = self.fq();
        let a = &self.auts[k];
        let table = &self.powers[k];
        let mut acc = Series::zero(x.prec());
        let mut neg_base: Option<Series> = None;
        for (n, c) in x.terms() {
            let pw = if n >= 0 && (n as usize) < table.len() {
                table[n as usize].clone()
            } else if n >= 0 {
                a.img.pow(f, n).expect("nonnegative power")
            } else {
                if neg_base.is_none() {
                    neg_base = Some(a.img.inv(f).ok_or_else(|| prec_err("inverse image"))?);
                }
                neg_base.as_ref().unwrap().pow(f, -n).expect("nonnegative power")
            };
            acc = acc.add(f, &pw.scale(f, f.frob(c, a.j)));
        }
        Ok(acc)
    }

    /// Index of the identity automorphism.
    #[must_use]
    pub fn identity(&self) -> usize {
        0
    }

    /// Whether automorphism `k` acts trivially on the residue field.
    #[must_use]
    pub fn in_inertia(&self, k: usize) -> bool {
        self.auts[k].j.is_multiple_of(self.tower.res_deg(self.top))
    }

    /// Depth of an inertia automorphism (F-normalized).
    pub fn depth_of_aut(&self, k: usize) -> Result<Depth, FieldError> {
        if !self.in_inertia(k) {
            return Err(FieldError::Domain("automorphism is not in inertia".into()));
        }
        if k == self.identity() {
            return Ok(Depth::Infinite);
        }
        Ok(Depth::Finite(aut_depth(self.fq(), &self.auts[k], self.e_top())?))
    }

    /// Depth measured with another uniformizer `w` of the top field.
    pub fn depth_wrt(&self, k: usize, w: &Series) -> Result<Depth, FieldError> {
        if !self.in_inertia(k) {
            return Err(FieldError::Domain("automorphism is not in inertia".into()));
        }
        if w.valuation() != Some(1) {
            return Err(FieldError::Domain("not a uniformizer".into()));
        }
        if k == self.identity() {
            return Ok(Depth::Infinite);
        }
        let f = self.fq();
        let w = &w.truncate(self.tower.prec() + 1);
        let tw = self.apply(k, w)?;
        let q = tw.div(f, w).ok_or_else(|| prec_err("depth"))?.sub(f, &Series::one(EXACT));
        let v = q.valuation().ok_or_else(|| prec_err("depth beyond precision"))?;
        Ok(Depth::Finite(rat(v, self.e_top())))
    }

    /// Depth of automorphism `k` restricted to level `i`, measured on the
    /// uniformizer of `K_i` inside the top field. Infinite when `k` fixes `K_i`.
    pub fn restricted_depth(&self, k: usize, i: usize) -> Result<Depth, FieldError> {
        let f = self.fq();
        if !self.auts[k].j.is_multiple_of(self.tower.res_deg(i)) {
            return Err(FieldError::Domain("restriction is not in inertia".into()));
        }
        let w = self.tower.uniformizer_in(i, self.top)?;
        let diff = self.apply(k, &w)?.sub(f, &w);
        match diff.valuation() {
            None if self.fixing(i)?.contains(&k) => Ok(Depth::Infinite),
            None => Err(prec_err("restricted depth")),
            Some(v) => Ok(Depth::Finite(rat(v - w.valuation().expect("uniformizer"), self.e_top()))),
        }
    }

    /// Multiplication table of the automorphism group.
    pub fn group_table(&self) -> Result<Vec<Vec<usize>>, FieldError> {
        self.require_galois()?;
        group_table(self.fq(), &self.auts, self.tower.res_deg(self.top))
    }

    pub fn realize_ramdatum(&self) -> Result<RamDatum, FieldError> {
        self.require_galois()?;
        let mul = self.group_table()?;
        let inertia: Vec<usize> = (0..self.auts.len()).filter(|&k| self.in_inertia(k)).collect();
        let mut depth = BTreeMap::new();
        for &k in &inertia {
            if let Depth::Finite(d) = self.depth_of_aut(k)? {
                depth.insert(k, d);
            }
        }
        let names = (0..self.auts.len()).map(|k| format!("g{k}")).collect();
        Ok(RamDatum::new(names, mul, &inertia, &depth, self.e_base() as u64)?)
    }

    /// Indices of the automorphisms fixing level `i`.
    pub fn fixing(&self, i: usize) -> Result<Vec<usize>, FieldError> {
        if i < self.base || i > self.top {
            return Err(FieldError::Domain(format!("level {i} is not between base and top")));
        }
        let f = self.fq();
        let w = self.tower.uniformizer_in(i, self.top)?;
        let d = self.tower.res_deg(i);
        let mut out = Vec::new();
        for k in 0..self.auts.len() {
            if self.auts[k].j.is_multiple_of(d) && self.apply(k, &w)?.eq_to_prec(f, &w) {
                out.push(k);
            }
        }
        Ok(out)
    }

    /// `Tr_{L/E}(x)` as a series in the base uniformizer.
    pub fn trace(&self, x: &Series) -> Result<Series, FieldError> {
        self.require_galois()?;
        let f = self.fq();
        let mut acc = Series::zero(EXACT);
        for k in 0..self.auts.len() {
            acc = acc.add(f, &self.apply(k, x)?);
        }
        self.tower.descend(&acc, self.base, self.top)
    }

    /// `Nm_{L/E}(x)` as a series in the base uniformizer.
    pub fn norm(&self, x: &Series) -> Result<Series, FieldError> {
        self.require_galois()?;
        let f = self.fq();
        let mut acc = Series::one(EXACT);
        for k in 0..self.auts.len() {
            acc = acc.mul(f, &self.apply(k, x)?);
        }
        self.tower.descend(&acc, self.base, self.top)
    }

    /// `(shift, surjective)` for the trace on the graded piece at level `s`.
    ///
    /// The shift is the least `val(Tr x) - val(x)` over monomials `a pi^n`
    /// with `n/e_L` in `[s, s + 1/e_E)`; surjectivity is checked at the one
    /// level in that window whose shifted value lies on the base grid.
    pub fn trace_image_level(&self, s: Rat) -> Result<(Rat, bool), FieldError> {
        self.require_galois()?;
        let f = self.fq();
        let (el, ee) = (self.e_top(), self.e_base());
        if !(s * int(el)).is_integer() {
            return Err(FieldError::Domain("level is off the grid".into()));
        }
        let n0 = (s * int(el)).to_integer();
        let basis = f.subfield_basis(self.tower.res_deg(self.top));
        let mut rows: Vec<(i64, Vec<Series>)> = Vec::new();
        let mut shift: Option<Rat> = None;
        let mut horizon: Option<Rat> = None;
        for n in n0..n0 + el / ee {
            let mut traces = Vec::new();
            for &a in &basis {
                let tr = self.trace(&Series::monomial(a, n, EXACT))?;
                let lvl = rat(n, el);
                match tr.valuation() {
                    Some(v) => {
                        let d = rat(v, ee) - lvl;
                        shift = Some(shift.map_or(d, |x: Rat| x.min(d)));
                    }
                    None => {
                        let h = rat(tr.prec(), ee) - lvl;
                        horizon = Some(horizon.map_or(h, |x: Rat| x.min(h)));
                    }
                }
                traces.push(tr);
            }
            rows.push((n, traces));
        }
        let shift = shift.ok_or_else(|| prec_err("every trace vanished to precision"))?;
        if horizon.is_some_and(|h| h <= shift) {
            return Err(prec_err("trace image level"));
        }
        let mut surjective = false;
        for (n, traces) in rows {
            let target = rat(n, el) + shift;
            if !(target * int(ee)).is_integer() {
                continue;
            }
            let idx = (target * int(ee)).to_integer();
            let leads: Vec<Fe> = traces.iter().map(|t| t.coeff(idx).unwrap_or(Fe::ZERO)).collect();
            surjective = fp_rank(f, &leads) == self.tower.res_deg(self.base) as usize;
        }
        Ok((shift, surjective))
    }

    fn units_generators(&self, from_n: i64, phi: &PLFun, r: Rat) -> Result<Vec<Series>, FieldError> {
        let f = self.fq();
        let el = self.e_top();
        let basis = f.subfield_basis(self.tower.res_deg(self.top));
        let mut out = Vec::new();
        let mut n = from_n;
        while phi.eval(rat(n, el)) <= r {
            for &a in &basis {
                let x = Series::one(EXACT).add(f, &Series::monomial(a, n, EXACT));
                out.push(self.norm(&x)?);
            }
            n += 1;
        }
        Ok(out)
    }

    fn norm_image_full(&self, from_n: i64, lo: Rat, r: Rat, phi: &PLFun) -> Result<bool, FieldError> {
        let ee = self.e_base();
        let cutoff = (r * int(ee)).floor().to_integer() + 1;
        let mut ech = UnitEchelon::new(self.fq(), cutoff);
        for g in self.units_generators(from_n, phi, r)? {
            if g.prec() < cutoff {
                return Err(prec_err("norm of a unit"));
            }
            ech.insert(&g);
        }
        let d = self.tower.res_deg(self.base) as usize;
        let lo_n = (lo * int(ee)).ceil().to_integer();
        Ok((lo_n..cutoff).all(|k| ech.rank(k) == d) && ech.min_level().is_none_or(|m| m >= lo_n))
    }

    /// `(phi(s), surjective, additive_match, above_last_break)` for the norm
    /// on `L^x_{>= s}`. Off-grid `s` is allowed and means the next grid level;
    /// the additive comparison uses the monomials `a pi^n` of that level.
    pub fn norm_graded(&self, s: Rat) -> Result<NormGraded, FieldError> {
        self.require_galois()?;
        if s <= Rat::zero() {
            return Err(FieldError::Domain("level must be positive".into()));
        }
        let el = self.e_top();
        let datum = self.realize_ramdatum()?;
        let phi = datum.hh_phi();
        let br = datum.breaks()?;
        let target = phi.eval(s);
        let r = target.max(br.u) + int(1);
        let n0 = (s * int(el)).ceil().to_integer();
        let surjective = self.norm_image_full(n0, target, r, &phi)?;
        let above = s > br.ell;
        let additive_match = if above { self.additive_match(n0, target)? } else { false };
        Ok(NormGraded { target, surjective, additive_match, above_last_break: above })
    }

    fn additive_match(&self, n: i64, target: Rat) -> Result<bool, FieldError> {
        let f = self.fq();
        let ee = self.e_base();
        for a in f.subfield(self.tower.res_deg(self.top)) {
            if a.is_zero() {
                continue;
            }
            let x = Series::monomial(a, n, EXACT);
            let nm = self.norm(&Series::one(EXACT).add(f, &x))?;
            let tr = self.trace(&x)?;
            let diff = nm.sub(f, &Series::one(EXACT)).sub(f, &tr);
            match diff.valuation() {
                Some(v) if rat(v, ee) <= target => return Ok(false),
                Some(_) => {}
                None if rat(diff.prec(), ee) <= target => return Err(prec_err("additive match")),
                None => {}
            }
        }
        Ok(true)
    }

    /// Clause 3 of the equivalence at field level:
    /// `Nm[L^x_{> psi(s)}] = E^x_{> s}`, checked modulo `E^x_{> max(s, u) + 1}`.
    pub fn check_norm_clause_field(&self, s: Rat) -> Result<bool, FieldError> {
        self.require_galois()?;
        if s < Rat::zero() {
            return Err(FieldError::Domain("level must be nonnegative".into()));
        }
        let datum = self.realize_ramdatum()?;
        let phi = datum.hh_phi();
        let psi = datum.hh_psi();
        let br = datum.breaks()?;
        let (el, ee) = (self.e_top(), self.e_base());
        let s0 = (psi.eval(s) * int(el)).floor().to_integer() + 1;
        let r0 = rat((s * int(ee)).floor().to_integer() + 1, ee);
        let r = s.max(br.u) + int(1);
        self.norm_image_full(s0, r0, r, &phi)
    }
}

/// Result of [`Extension::norm_graded`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormGraded {
    pub target: Rat,
    pub surjective: bool,
    pub additive_match: bool,
    pub above_last_break: bool,
}

/// `F_p`-rank of a list of field elements.
#[must_use]
pub fn fp_rank(f: &Fq, xs: &[Fe]) -> usize {
    let p = f.p();
    let mut rows: Vec<Vec<u32>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for &x in xs {
        let mut v = f.digits(x);
        for (row, &pc) in rows.iter().zip(&pivots) {
            if v[pc] != 0 {
                let c = v[pc];
                for (vi, ri) in v.iter_mut().zip(row) {
                    *vi = (*vi + p * p - c * ri % p) % p;
                }
            }
        }
        if let Some(pc) = v.iter().position(|&c| c != 0) {
            let inv = (1..p).find(|k| k * v[pc] % p == 1).expect("prime field");
            for c in &mut v {
                *c = *c * inv % p;
            }
            rows.push(v);
            pivots.push(pc);
        }
    }
    rows.len()
}

/// Echelon form for subgroups of `1 + T O / 1 + T^cutoff O`, level by level.
struct UnitEchelon<'a> {
    f: &'a Fq,
    cutoff: i64,
    levels: BTreeMap<i64, Vec<(Vec<u32>, usize, Series)>>,
}

impl<'a> UnitEchelon<'a> {
    fn new(f: &'a Fq, cutoff: i64) -> Self {
        Self { f, cutoff, levels: BTreeMap::new() }
    }

    fn rank(&self, n: i64) -> usize {
        self.levels.get(&n).map_or(0, Vec::len)
    }

    fn min_level(&self) -> Option<i64> {
        self.levels.keys().next().copied()
    }

    fn insert(&mut self, g: &Series) {
        let f = self.f;
        let p = f.p();
        let one = Series::one(EXACT);
        let mut stack = vec![g.truncate(self.cutoff)];
        while let Some(mut g) = stack.pop() {
            loop {
                let w = g.sub(f, &one);
                let Some(n) = w.valuation() else { break };
                let mut v = f.digits(w.leading().expect("nonzero"));
                let rows = self.levels.entry(n).or_default();
                for (row, pc, b) in rows.iter() {
                    let c = v[*pc];
                    if c == 0 {
                        continue;
                    }
                    for (vi, ri) in v.iter_mut().zip(row) {
                        *vi = (*vi + p * p - c * ri % p) % p;
                    }
                    let binv = b.inv(f).expect("unit").pow(f, c as i64).expect("unit");
                    g = g.mul(f, &binv).truncate(self.cutoff);
                }
                match v.iter().position(|&c| c != 0) {
                    None => continue,
                    Some(pc) => {
                        let k = (1..p).find(|k| k * v[pc] % p == 1).expect("prime field");
                        let gn = g.pow(f, k as i64).expect("unit").truncate(self.cutoff);
                        for c in &mut v {
                            *c = *c * k % p;
                        }
                        let gp = gn.pow(f, p as i64).expect("unit").truncate(self.cutoff);
                        rows.push((v, pc, gn));
                        stack.push(gp);
                        break;
                    }
                }
            }
        }
    }
}

/// Run `op` on the tower at increasing precision until it stops reporting a
/// precision error.
pub fn with_precision<T>(
    desc: &TowerDescriptor,
    start: i64,
    mut op: impl FnMut(&Tower) -> Result<T, FieldError>,
) -> Result<T, FieldError> {
    let mut prec = start.max(8);
    loop {
        let attempt = Tower::with_prec(desc, prec).and_then(|t| op(&t));
        match attempt {
            Err(FieldError::Precision(_)) if prec < MAX_PREC => {
                prec = (prec * 2).min(MAX_PREC);
            }
            other => return other,
        }
    }
}

/// Base additive character `a -> Tr_{k_F/F_p}(lambda a_0) / p` in `Q/Z`,
/// trivial on `m_F` and nontrivial on `O_F`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdditiveCharacter {
    lambda: Fe,
}

impl AdditiveCharacter {
    /// The character with `lambda = 1`.
    #[must_use]
    pub fn standard() -> Self {
        Self { lambda: Fe::ONE }
    }

    /// `lambda` must be a nonzero element of the base residue field.
    pub fn with_lambda(tower: &Tower, lambda: Fe) -> Result<Self, FieldError> {
        if lambda.is_zero() || !tower.fq().in_subfield(lambda, tower.res_deg(0)) {
            return Err(FieldError::Domain("lambda must be a unit of the base residue field".into()));
        }
        Ok(Self { lambda })
    }

    #[must_use]
    pub fn lambda(&self) -> Fe {
        self.lambda
    }

    /// Conductor of the base character.
    #[must_use]
    pub fn conductor(&self) -> Rat {
        Rat::zero()
    }

    /// Value on an element of `F` (a series in `t`), in `[0, 1)`.
    pub fn value(&self, tower: &Tower, y: &Series) -> Result<Rat, FieldError> {
        let f = tower.fq();
        let a0 = y.coeff(0).ok_or_else(|| prec_err("character value"))?;
        let tr = f.trace_to_prime(f.mul(self.lambda, a0), tower.res_deg(0));
        Ok(rat(tr as i64, f.p() as i64))
    }
}

/// `Lambda_E(v x)` with `Lambda_E = Lambda_F o Tr_{E/F}` and `E` = level `i`.
pub fn character_pair(
    chr: &AdditiveCharacter,
    tower: &Tower,
    level: usize,
    v: &Series,
    x: &Series,
) -> Result<Rat, FieldError> {
    let prod = v.mul(tower.fq(), x);
    let tr = tower.trace_by_steps(&prod, level, 0)?;
    chr.value(tower, &tr)
}

/// Largest `c` such that `Lambda_E` is nontrivial on `E_{>= c}`, found by
/// scanning monomials downward from level 1.
pub fn character_conductor(chr: &AdditiveCharacter, tower: &Tower, level: usize) -> Result<Rat, FieldError> {
    let f = tower.fq();
    let e = tower.e_abs(level) as i64;
    let basis = f.subfield_basis(tower.res_deg(level));
    let one = Series::one(EXACT);
    for n in (-(tower.prec() / 2)..=e).rev() {
        for &a in &basis {
            let x = Series::monomial(a, n, EXACT);
            if !character_pair(chr, tower, level, &one, &x)?.is_zero() {
                return Ok(rat(n, e));
            }
        }
    }
    Err(prec_err("conductor below the search window"))
}

/// Galois towers covering unramified, tame, Artin-Schreier and composite
/// steps over several residue fields.
#[must_use]
pub fn galois_catalog() -> Vec<TowerDescriptor> {
    let b = TowerDescriptor::base;
    vec![
        b(3, 1).unramified(2),
        b(3, 1).tame(2),
        b(3, 1).artin_schreier(1),
        b(3, 1).artin_schreier(2),
        b(3, 1).unramified(2).tame(2),
        b(3, 1).unramified(2).tame(4),
        b(3, 1).unramified(2).tame(8),
        b(3, 1).tame(2).unramified(2),
        b(3, 1).unramified(2).artin_schreier(1),
        b(3, 1).artin_schreier(1).unramified(2),
        b(3, 1).tame(2).artin_schreier(2),
        b(3, 1).tame(2).artin_schreier(1),
        b(3, 1).unramified(3).artin_schreier(1),
        b(3, 1).unramified(2).artin_schreier(2),
        b(5, 1).tame(2),
        b(5, 1).tame(4),
        b(5, 1).artin_schreier(1),
        b(5, 1).artin_schreier(2),
        b(5, 1).artin_schreier(3),
        b(5, 1).tame(2).artin_schreier(2),
        b(5, 1).tame(2).artin_schreier(1),
        b(5, 1).tame(4).artin_schreier(1),
        b(2, 1).artin_schreier(1),
        b(2, 1).artin_schreier(3),
        b(2, 1).unramified(2).artin_schreier(1),
        b(2, 2).tame(3),
        b(2, 2).tame(3).artin_schreier(3),
        b(7, 1).tame(2),
        b(7, 1).tame(3),
        b(7, 1).tame(6),
        b(7, 1).artin_schreier(1),
        b(7, 1).tame(2).artin_schreier(1),
        b(7, 1).tame(3).artin_schreier(1),
    ]
}

/// Candidate towers over `F_{p^f}((t))` for [`find_adapted_extension`]:
/// unramified steps of degree at most 4, tame steps of degree at most 12,
/// Artin-Schreier steps with `m <= 3`, and one composite level. Ordered by
/// number of steps, degree, then lexicographically.
#[must_use]
pub fn adapted_catalog(p: u32, f: u32) -> Vec<TowerDescriptor> {
    let q = (p as u64).pow(f);
    let mut firsts = Vec::new();
    for k in 2..=4 {
        firsts.push(Step { kind: StepKind::Unramified, param: k });
    }
    for m in 2..=12u32 {
        if m % p != 0 && (q - 1).is_multiple_of(m as u64) {
            firsts.push(Step { kind: StepKind::Tame, param: m });
        }
    }
    let as_steps: Vec<Step> = (1..=3u32)
        .filter(|m| m % p != 0)
        .map(|m| Step { kind: StepKind::ArtinSchreier, param: m })
        .collect();
    let mut out = vec![TowerDescriptor::base(p, f)];
    for s in firsts.iter().chain(&as_steps) {
        out.push(TowerDescriptor { p, residue_deg: f, steps: vec![*s] });
    }
    for s in &firsts {
        for a in &as_steps {
            out.push(TowerDescriptor { p, residue_deg: f, steps: vec![*s, *a] });
        }
    }
    out.sort_by_key(|d| (d.steps.len(), d.degree(), d.steps.clone()));
    out
}

/// Last upper break of `L/F` from the step-composed Herbrand function.
pub fn upper_break(tower: &Tower) -> Result<Rat, FieldError> {
    let phi = tower.step_composed_phi(0, tower.top())?;
    Ok(phi.eval(phi.last_break()))
}

/// Compositum of two towers over the same base, for the shapes that stay
/// inside the step language: `b` must consist of unramified and tame steps,
/// and `a` of unramified and tame steps followed by at most one
/// Artin-Schreier step.
pub fn compositum(a: &TowerDescriptor, b: &TowerDescriptor) -> Result<TowerDescriptor, FieldError> {
    if a.p != b.p || a.residue_deg != b.residue_deg {
        return Err(FieldError::Domain("towers have different bases".into()));
    }
    let shape = |d: &TowerDescriptor| -> Result<(u32, u32, Option<u32>), FieldError> {
        let (mut u, mut t, mut wild) = (1u32, 1u32, None);
        for (i, s) in d.steps.iter().enumerate() {
            match s.kind {
                StepKind::Unramified => u *= s.param,
                StepKind::Tame => t *= s.param,
                StepKind::ArtinSchreier if i + 1 == d.steps.len() => wild = Some(s.param),
                StepKind::ArtinSchreier => {
                    return Err(FieldError::Unsupported(format!("{d}: Artin-Schreier step below the top")))
                }
            }
        }
        Ok((u, t, wild))
    };
    let (ua, ta, wa) = shape(a)?;
    let (ub, tb, wb) = shape(b)?;
    if wb.is_some() {
        return Err(FieldError::Unsupported(format!("{b}: second factor must be tame")));
    }
    let u = ua.lcm(&ub);
    let t = ta.lcm(&tb);
    let mut out = TowerDescriptor::base(a.p, a.residue_deg);
    if u > 1 {
        out = out.unramified(u);
    }
    if t > 1 {
        out = out.tame(t);
    }
    if let Some(m) = wa {
        out = out.artin_schreier(m * (t / ta));
    }
    Ok(out)
}

/// Outcome of [`find_adapted_report`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptedReport {
    pub tower: TowerDescriptor,
    pub e: u64,
    pub u: Rat,
    /// `(compositum with a tame extension, its e, its u)`.
    pub stability: Vec<(TowerDescriptor, u64, Rat)>,
}

fn tame_partner(d: &TowerDescriptor) -> Option<TowerDescriptor> {
    let q = (d.p as u64).pow(d.residue_deg);
    let t: u64 = d.steps.iter().filter(|s| s.kind == StepKind::Tame).map(|s| s.param as u64).product();
    (2..=12u64)
        .map(|k| t * k)
        .find(|&m| m % d.p as u64 != 0 && (q - 1).is_multiple_of(m) && m <= 12)
        .map(|m| TowerDescriptor::base(d.p, d.residue_deg).tame(m as u32))
}

/// First catalog tower with `n | e(L/F)` and `u(L/F) < eps`, together with
/// the check that a tame compositum keeps both properties.
pub fn find_adapted_report(catalog: &[TowerDescriptor], n: u64, eps: Rat) -> Result<AdaptedReport, FieldError> {
    if n == 0 || eps <= Rat::zero() {
        return Err(FieldError::Domain("need n > 0 and eps > 0".into()));
    }
    for d in catalog {
        let e = d.ram_index();
        if e % n != 0 {
            continue;
        }
        let u = match with_precision(d, DEFAULT_PREC, upper_break) {
            Ok(u) => u,
            Err(FieldError::Domain(_)) => continue,
            Err(err) => return Err(err),
        };
        if u >= eps {
            continue;
        }
        let mut stability = Vec::new();
        let partners = [tame_partner(d), Some(TowerDescriptor::base(d.p, d.residue_deg).unramified(2))];
        for m in partners.into_iter().flatten() {
            let Ok(c) = compositum(d, &m) else { continue };
            let uc = with_precision(&c, DEFAULT_PREC, upper_break)?;
            let ec = c.ram_index();
            if uc != u || ec % n != 0 {
                return Err(FieldError::Ram(RamError::Invariant(format!(
                    "tame compositum {c} changed u or lost n | e"
                ))));
            }
            stability.push((c, ec, uc));
        }
        return Ok(AdaptedReport { tower: d.clone(), e, u, stability });
    }
    Err(FieldError::NotFound(format!("no catalog tower with {n} | e and u < {eps}")))
}

/// First catalog tower with `n | e(L/F)` and `u(L/F) < eps`.
pub fn find_adapted_extension(catalog: &[TowerDescriptor], n: u64, eps: Rat) -> Result<TowerDescriptor, FieldError> {
    find_adapted_report(catalog, n, eps).map(|r| r.tower)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn as_cubic() -> Tower {
        Tower::new(&TowerDescriptor::base(3, 1).artin_schreier(1)).unwrap()
    }

    #[test]
    fn as_cubic_generator_relation() {
        let t = as_cubic();
        let f = t.fq();
        let y = t.generator_in(1, 1).unwrap();
        let w = t.uniformizer_in(0, 1).unwrap();
        let lhs = y.pow(f, 3).unwrap().sub(f, &y);
        let rhs = w.inv(f).unwrap();
        assert!(lhs.eq_to_prec(f, &rhs));
        assert_eq!(t.valuation(&y, 1).unwrap(), rat(-1, 3));
    }

    #[test]
    fn tame_and_unramified_data() {
        let tame = Tower::new(&TowerDescriptor::base(3, 1).tame(2)).unwrap();
        let d = Extension::full(&tame).unwrap().realize_ramdatum().unwrap();
        assert_eq!(d.depth_values(), vec![int(0)]);
        let unr = Tower::new(&TowerDescriptor::base(3, 1).unramified(2)).unwrap();
        let d = Extension::full(&unr).unwrap().realize_ramdatum().unwrap();
        assert_eq!(d.order(), 2);
        assert_eq!(d.e(), 1);
    }

    #[test]
    fn as_cubic_depths() {
        let ext = Extension::full(&as_cubic()).unwrap();
        let d = ext.realize_ramdatum().unwrap();
        let all: Vec<Rat> = d.depth_map().into_values().collect();
        assert_eq!(all, vec![rat(1, 3), rat(1, 3)]);
        assert_eq!(ext.depth_of_aut(0).unwrap(), Depth::Infinite);
    }

    #[test]
    fn non_galois_detected() {
        let t = Tower::new(&TowerDescriptor::base(3, 2).tame(4).artin_schreier(1)).unwrap();
        assert!(!Extension::full(&t).unwrap().is_galois());
        let t = Tower::new(&TowerDescriptor::base(3, 1).tame(2).artin_schreier(1)).unwrap();
        assert!(Extension::full(&t).unwrap().is_galois());
    }

    #[test]
    fn tame_needs_roots_of_unity() {
        assert!(Tower::new(&TowerDescriptor::base(3, 1).tame(4)).is_err());
        assert!(Tower::new(&TowerDescriptor::base(3, 1).artin_schreier(3)).is_err());
    }

    #[test]
    fn bezout_exponents() {
        for (m, p) in [(1, 3), (2, 3), (4, 3), (3, 5), (3, 2)] {
            let (a, b) = bezout(m, p);
            assert_eq!(a * m + b * p, 1);
        }
    }
}
