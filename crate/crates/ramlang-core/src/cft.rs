//! Finite-level class field theory for `F = F_p((t))`.
//!
//! `F^x = t^Z x F_p^x x (1 + tO)`, and `(1 + tO)/(1 + t^N O)` is presented on
//! generators `g_i = 1 + t^i` (`1 <= i < N`) with relations `g_i^p = g_{ip}`
//! (and `g_i^p = 1` once `ip >= N`). A subgroup `U` given by words is then a
//! row space, and `F^x / U` is read off a Smith normal form.
//!
//! The image of `F^x_{>=s}` in `F^x / U` is the upper numbering subgroup
//! `Gamma^s` of the corresponding abelian extension. Breaks are integers by
//! Hasse-Arf; [`to_ramdatum`] rebuilds depths from the filtration and checks
//! that claim at run time.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::plfun::PLFun;
use crate::ramification::{RamDatum, RamError};
use crate::rat::{fmt_rat, int, Rat};
use crate::snf::{smith, subgroup_invariants, Smith};

/// Largest quotient we enumerate element by element.
pub const MAX_ENUM: u64 = 1 << 14;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CftError {
    Domain(String),
    Infinite,
    TooLarge(u64),
    HasseArf(String),
    Ram(RamError),
}

impl fmt::Display for CftError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CftError::Domain(why) => write!(f, "domain error: {why}"),
            CftError::Infinite => f.write_str("quotient is infinite"),
            CftError::TooLarge(n) => write!(f, "quotient of order {n} is too large to enumerate"),
            CftError::HasseArf(why) => write!(f, "Hasse-Arf check failed: {why}"),
            CftError::Ram(e) => write!(f, "{e}"),
        }
    }
}

impl From<RamError> for CftError {
    fn from(e: RamError) -> Self {
        CftError::Ram(e)
    }
}

/// A generator of a subgroup of `F^x`: `t`, a generator of `F_p^x`, or
/// `1 + a t^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Word {
    T,
    Zeta,
    Unit { a: u32, n: u32 },
}

impl Word {
    #[must_use]
    pub fn one_plus(n: u32) -> Self {
        Word::Unit { a: 1, n }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Word::T => f.write_str("t"),
            Word::Zeta => f.write_str("zeta"),
            Word::Unit { a: 1, n } => write!(f, "1+t^{n}"),
            Word::Unit { a, n } => write!(f, "1+{a}t^{n}"),
        }
    }
}

impl FromStr for Word {
    type Err = CftError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CftError::Domain(format!("cannot parse word {s:?}"));
        match s.trim() {
            "t" => return Ok(Word::T),
            "zeta" => return Ok(Word::Zeta),
            _ => {}
        }
        let rest = s.trim().strip_prefix("1+").ok_or_else(bad)?;
        let (coef, pow) = rest.split_once('t').ok_or_else(bad)?;
        let a = if coef.is_empty() { 1 } else { coef.parse().map_err(|_| bad())? };
        let n = match pow {
            "" => 1,
            _ => pow.strip_prefix('^').ok_or_else(bad)?.parse().map_err(|_| bad())?,
        };
        if n == 0 {
            return Err(bad());
        }
        Ok(Word::Unit { a, n })
    }
}

/// `S = listed u {n >= tail}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    pub listed: BTreeSet<u32>,
    pub tail: Option<u32>,
}

impl IndexSet {
    #[must_use]
    pub fn from_tail(tail: u32) -> Self {
        Self { listed: BTreeSet::new(), tail: Some(tail) }
    }

    #[must_use]
    pub fn new(listed: &[u32], tail: Option<u32>) -> Self {
        Self { listed: listed.iter().copied().collect(), tail }
    }

    #[must_use]
    pub fn contains(&self, n: u32) -> bool {
        self.listed.contains(&n) || self.tail.is_some_and(|t| n >= t)
    }

    /// Largest listed index or the start of the tail.
    #[must_use]
    pub fn max_marker(&self) -> u32 {
        let l = self.listed.iter().next_back().copied().unwrap_or(0);
        l.max(self.tail.unwrap_or(0))
    }

    /// The set used in the `SL_p` counterexample.
    #[must_use]
    pub fn counterexample(p: u32) -> Self {
        if p == 2 {
            Self::new(&[2], Some(4))
        } else {
            Self::from_tail(3)
        }
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.listed.iter().map(ToString::to_string).collect();
        if let Some(t) = self.tail {
            parts.push(format!("n>={t}"));
        }
        write!(f, "{{{}}}", parts.join(","))
    }
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// `x * y mod (p, t^n)` on coefficient vectors of length `n`.
fn mul_trunc(x: &[u32], y: &[u32], p: u32) -> Vec<u32> {
    let n = x.len();
    let mut out = vec![0u64; n];
    for (i, &a) in x.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (j, &b) in y.iter().enumerate().take(n - i) {
            out[i + j] = (out[i + j] + u64::from(a) * u64::from(b)) % u64::from(p);
        }
    }
    out.into_iter().map(|c| c as u32).collect()
}

/// Exponents `c_i` with `1 + a t^n = prod g_i^{c_i}` modulo `t^prec`.
fn unit_exponents(p: u32, prec: u32, a: u32, n: u32) -> Vec<i64> {
    let len = prec as usize;
    let mut x = vec![0u32; len];
    x[0] = 1;
    if (n as usize) < len {
        x[n as usize] = a % p;
    }
    let mut c = vec![0i64; len];
    for i in 1..len {
        let b = x[i];
        if b == 0 {
            continue;
        }
        c[i] = i64::from(b);
        // divide by (1 + t^i)^b
        let mut inv = vec![0u32; len];
        let mut k = 0;
        while k * i < len {
            inv[k * i] = if k % 2 == 0 { 1 } else { p - 1 };
            k += 1;
        }
        for _ in 0..b {
            x = mul_trunc(&x, &inv, p);
        }
    }
    c
}

/// `F^x / U` at precision `N`, with the coordinates of every generator.
#[derive(Debug, Clone)]
pub struct UnitQuotient {
    p: u32,
    prec: u32,
    gens: Vec<Word>,
    extra: Vec<Word>,
    smith: Smith,
}

/// Ambient coordinates: `[t, zeta, g_1, ..., g_{N-1}]`.
fn ambient_dim(prec: u32) -> usize {
    prec as usize + 1
}

impl UnitQuotient {
    fn build(p: u32, prec: u32, gens: Vec<Word>, extra: Vec<Word>) -> Self {
        let dim = ambient_dim(prec);
        let mut rel = Vec::new();
        let mut zeta = vec![0i64; dim];
        zeta[1] = i64::from(p) - 1;
        rel.push(zeta);
        for i in 1..prec {
            let mut r = vec![0i64; dim];
            r[i as usize + 1] = i64::from(p);
            if i * p < prec {
                r[(i * p) as usize + 1] -= 1;
            }
            rel.push(r);
        }
        for w in gens.iter().chain(&extra) {
            rel.push(word_vector(p, prec, w));
        }
        let smith = smith(&rel, dim);
        Self { p, prec, gens, extra, smith }
    }

    #[must_use]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[must_use]
    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Generators of `U` (without any extra generators).
    #[must_use]
    pub fn generators(&self) -> &[Word] {
        &self.gens
    }

    /// Generators added by [`intermediate_quotient`].
    #[must_use]
    pub fn extra_generators(&self) -> &[Word] {
        &self.extra
    }

    /// Invariant factors of the quotient; `0` marks a free summand.
    #[must_use]
    pub fn invariants(&self) -> Vec<i64> {
        self.smith.invariants()
    }

    #[must_use]
    pub fn order(&self) -> Option<u64> {
        self.smith.order()
    }

    /// Quotient coordinates of a word.
    #[must_use]
    pub fn project(&self, w: &Word) -> Vec<i64> {
        self.smith.project(&word_vector(self.p, self.prec, w))
    }

    /// Image of `F^x_{>=n}`: `O^x` for `n = 0`, `1 + t^n O` for `n >= 1`.
    #[must_use]
    pub fn level_generators(&self, n: u32) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        if n == 0 {
            out.push(self.project(&Word::Zeta));
        }
        for i in n.max(1)..self.prec {
            out.push(self.project(&Word::one_plus(i)));
        }
        out
    }

    /// Sum of two quotient elements.
    #[must_use]
    pub fn add(&self, x: &[i64], y: &[i64]) -> Vec<i64> {
        self.invariants().iter().zip(x.iter().zip(y)).map(|(&d, (a, b))| reduce(a + b, d)).collect()
    }

    /// All elements, in lexicographic order of coordinates.
    pub fn elements(&self) -> Result<Vec<Vec<i64>>, CftError> {
        let ord = self.order().ok_or(CftError::Infinite)?;
        if ord > MAX_ENUM {
            return Err(CftError::TooLarge(ord));
        }
        let mut out = vec![Vec::new()];
        for d in self.invariants() {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..d).map(move |k| {
                        let mut w = v.clone();
                        w.push(k);
                        w
                    })
                })
                .collect();
        }
        Ok(out)
    }

    /// Elements of the subgroup generated by `gens`.
    #[must_use]
    pub fn span(&self, gens: &[Vec<i64>]) -> BTreeSet<Vec<i64>> {
        let zero = vec![0; self.invariants().len()];
        let mut set = BTreeSet::from([zero.clone()]);
        let mut frontier = vec![zero];
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = self.add(&x, g);
                if set.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        set
    }

    /// Image of a parent element under the natural surjection onto `self`.
    pub fn map_from(&self, parent: &UnitQuotient, x: &[i64]) -> Result<Vec<i64>, CftError> {
        if parent.p != self.p || parent.prec != self.prec {
            return Err(CftError::Domain("quotients at different p or precision".into()));
        }
        Ok(self.smith.project(&parent.smith.lift(x)))
    }
}

fn reduce(x: i64, d: i64) -> i64 {
    if d == 0 {
        x
    } else {
        x.mod_floor(&d)
    }
}

/// Ambient coordinates of a word at precision `prec`.
fn word_vector(p: u32, prec: u32, w: &Word) -> Vec<i64> {
    let mut v = vec![0i64; ambient_dim(prec)];
    match *w {
        Word::T => v[0] = 1,
        Word::Zeta => v[1] = 1,
        Word::Unit { a, n } => {
            let c = unit_exponents(p, prec, a, n);
            v[2..].copy_from_slice(&c[1..]);
        }
    }
    v
}

/// `F^x / <t, F_p^x, (1 + t^n)_{n in S}>` at precision `N`.
pub fn unit_quotient(p: u32, s: &IndexSet, prec: u32) -> Result<UnitQuotient, CftError> {
    if !is_prime(p) {
        return Err(CftError::Domain(format!("{p} is not prime")));
    }
    if s.listed.contains(&0) || s.tail == Some(0) {
        return Err(CftError::Domain("indices must be positive".into()));
    }
    if s.tail.is_none() {
        return Err(CftError::Domain("S must contain all large n for a finite quotient".into()));
    }
    if prec <= s.max_marker() + 2 {
        return Err(CftError::Domain(format!(
            "precision {prec} must exceed {}",
            s.max_marker() + 2
        )));
    }
    let mut gens = vec![Word::T, Word::Zeta];
    gens.extend((1..prec).filter(|&n| s.contains(n)).map(Word::one_plus));
    Ok(UnitQuotient::build(p, prec, gens, Vec::new()))
}

/// Quotient by `U` enlarged with `extra`; [`UnitQuotient::map_from`] is the
/// natural surjection from `uq`.
pub fn intermediate_quotient(uq: &UnitQuotient, extra: &[Word]) -> Result<UnitQuotient, CftError> {
    for w in extra {
        if let Word::Unit { n: 0, .. } = w {
            return Err(CftError::Domain(format!("{w} is not a unit word")));
        }
    }
    let mut all = uq.extra.clone();
    all.extend_from_slice(extra);
    Ok(UnitQuotient::build(uq.p, uq.prec, uq.gens.clone(), all))
}

/// One step of the image filtration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiltrationLevel {
    pub n: u32,
    pub order: u64,
    pub invariants: Vec<i64>,
}

/// Upper numbering filtration of an abelian extension, as images of
/// `F^x_{>=n}`. `Gamma^s` is the level `ceil(s)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianRamification {
    pub levels: Vec<FiltrationLevel>,
    pub breaks: Vec<Rat>,
    pub last_break: Rat,
}

impl AbelianRamification {
    /// The level carrying `Gamma^s`.
    #[must_use]
    pub fn level_at(&self, s: Rat) -> &FiltrationLevel {
        let n = if s <= Rat::zero() { 0 } else { s.ceil().to_integer() as usize };
        &self.levels[n.min(self.levels.len() - 1)]
    }
}

#[must_use]
pub fn upper_filtration(uq: &UnitQuotient) -> AbelianRamification {
    let d = uq.invariants();
    let levels: Vec<FiltrationLevel> = (0..=uq.prec)
        .map(|n| {
            let inv = subgroup_invariants(&d, &uq.level_generators(n));
            let order = inv.iter().map(|&x| x as u64).product();
            FiltrationLevel { n, order, invariants: inv }
        })
        .collect();
    let breaks: Vec<Rat> =
        levels.windows(2).filter(|w| w[0].order > w[1].order).map(|w| int(i64::from(w[0].n))).collect();
    let last_break = breaks.last().copied().unwrap_or_else(Rat::zero);
    AbelianRamification { levels, breaks, last_break }
}

/// The quotient as a [`RamDatum`], with its elements in index order.
///
/// Each element gets the depth `psi(v)` where `v` is its upper level and
/// `psi(x) = int_0^x dy / |Gamma^y|`. The result is checked against the
/// filtration on every integer level (Hasse-Arf).
pub fn to_ramdatum(uq: &UnitQuotient) -> Result<(RamDatum, Vec<Vec<i64>>), CftError> {
    let elems = uq.elements()?;
    let index: BTreeMap<Vec<i64>, usize> = elems.iter().enumerate().map(|(i, x)| (x.clone(), i)).collect();
    let mul: Vec<Vec<usize>> =
        elems.iter().map(|x| elems.iter().map(|y| index[&uq.add(x, y)]).collect()).collect();
    let level_sets: Vec<BTreeSet<Vec<i64>>> =
        (0..=uq.prec).map(|n| uq.span(&uq.level_generators(n))).collect();
    // psi from the filtration, one unit segment per integer level
    let top = level_sets.len() - 1;
    let breaks: Vec<Rat> = (0..top).map(|n| int(n as i64)).collect();
    let slopes: Vec<Rat> =
        (1..=top).map(|n| Rat::new(1, level_sets[n].len() as i64)).collect();
    let psi = PLFun::new(breaks, slopes).map_err(|e| CftError::Domain(format!("{e:?}")))?;
    let mut depth = BTreeMap::new();
    let zero = index[&vec![0; uq.invariants().len()]];
    for (i, x) in elems.iter().enumerate() {
        if i == zero {
            continue;
        }
        let v = (1..=top).rev().find(|&n| level_sets[n].contains(x)).unwrap_or(0);
        depth.insert(i, psi.eval(int(v as i64)));
    }
    let names = elems
        .iter()
        .map(|x| format!("({})", x.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")))
        .collect();
    let inertia: Vec<usize> = (0..elems.len()).collect();
    let datum = RamDatum::new(names, mul, &inertia, &depth, 1)?;
    for d in datum.depth_values() {
        let up = datum.hh_phi().eval(d);
        if !up.is_integer() {
            return Err(CftError::HasseArf(format!("upper jump {} is not an integer", fmt_rat(&up))));
        }
    }
    for (n, set) in level_sets.iter().enumerate().skip(1) {
        for s in [int(n as i64), int(n as i64) - Rat::new(1, 2)] {
            let g: BTreeSet<Vec<i64>> =
                datum.upper_group(s)?.into_iter().map(|i| elems[i].clone()).collect();
            if &g != set {
                return Err(CftError::HasseArf(format!("upper group at {} disagrees", fmt_rat(&s))));
            }
        }
    }
    Ok((datum, elems))
}

/// Checks `1 -> Gal(E/E')^{psi_{E'/F}(s)} -> Gal(E/F)^s -> Gal(E'/F)^s -> 1`
/// for the surjection `uq -> sub` at every half-integer `s` up to the last
/// break plus one.
pub fn check_exact_sequence(uq: &UnitQuotient, sub: &UnitQuotient) -> Result<bool, CftError> {
    let (datum, elems) = to_ramdatum(uq)?;
    let (sub_datum, sub_elems) = to_ramdatum(sub)?;
    let images: Vec<Vec<i64>> = elems.iter().map(|x| sub.map_from(uq, x)).collect::<Result<_, _>>()?;
    let zero = vec![0; sub.invariants().len()];
    let kernel: Vec<usize> = (0..elems.len()).filter(|&i| images[i] == zero).collect();
    let quotient = datum.quotient_datum(&kernel)?;
    if quotient.hh_phi() != sub_datum.hh_phi() {
        return Ok(false);
    }
    let psi_sub = sub_datum.hh_psi();
    let restricted = datum.restrict(&kernel)?;
    let last = upper_filtration(uq).last_break;
    let mut s = Rat::zero();
    while s <= last + Rat::one() {
        let g: BTreeSet<usize> = datum.upper_group(s)?.into_iter().collect();
        // left end: intersection with the kernel is the upper group of E/E'
        let left: BTreeSet<usize> =
            restricted.upper_group(psi_sub.eval(s))?.into_iter().map(|i| kernel[i]).collect();
        let inter: BTreeSet<usize> = g.iter().copied().filter(|i| kernel.contains(i)).collect();
        if left != inter {
            return Ok(false);
        }
        // right end: the image is the upper group of E'/F
        let img: BTreeSet<Vec<i64>> = g.iter().map(|&i| images[i].clone()).collect();
        let want: BTreeSet<Vec<i64>> =
            sub_datum.upper_group(s)?.into_iter().map(|i| sub_elems[i].clone()).collect();
        if img != want {
            return Ok(false);
        }
        s += Rat::new(1, 2);
    }
    Ok(true)
}

/// Numeric content of the `SL_p` counterexample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterexampleReport {
    pub p: u32,
    pub s: IndexSet,
    pub prec: u32,
    pub generators: Vec<Word>,
    pub invariants: Vec<i64>,
    pub breaks: Vec<Rat>,
    pub d: Rat,
    pub gamma_d_order: u64,
    pub gamma_d_cyclic: bool,
    pub intermediate_generator: Word,
    pub intermediate_invariants: Vec<i64>,
    pub intermediate_breaks: Vec<Rat>,
    /// `Gamma(E/F)^d -> Gal(E'/F)` is an isomorphism.
    pub surjection_is_iso: bool,
    pub depths: Vec<Rat>,
    pub ell: Rat,
    pub u: Rat,
    pub c: Rat,
    pub exact_sequence: bool,
}

pub fn counterexample_report(p: u32) -> Result<CounterexampleReport, CftError> {
    if !is_prime(p) || p > 7 {
        return Err(CftError::Domain(format!("p = {p} must be a prime at most 7")));
    }
    let s = IndexSet::counterexample(p);
    let prec = s.max_marker() + 3;
    let uq = unit_quotient(p, &s, prec)?;
    let filt = upper_filtration(&uq);
    let d = filt.last_break;
    let gd = filt.level_at(d).clone();
    let extra = Word::one_plus(1);
    let sub = intermediate_quotient(&uq, &[extra])?;
    let sub_filt = upper_filtration(&sub);
    let gd_gens = uq.level_generators(d.to_integer() as u32);
    let gd_elems = uq.span(&gd_gens);
    let image: BTreeSet<Vec<i64>> =
        gd_elems.iter().map(|x| sub.map_from(&uq, x)).collect::<Result<_, _>>()?;
    let surjection_is_iso = image.len() as u64 == gd.order && Some(gd.order) == sub.order();
    let (datum, _) = to_ramdatum(&uq)?;
    let b = datum.breaks()?;
    Ok(CounterexampleReport {
        p,
        s,
        prec,
        generators: uq.generators().to_vec(),
        invariants: uq.invariants(),
        breaks: filt.breaks.clone(),
        d,
        gamma_d_order: gd.order,
        gamma_d_cyclic: gd.invariants.len() <= 1,
        intermediate_generator: extra,
        intermediate_invariants: sub.invariants(),
        intermediate_breaks: sub_filt.breaks,
        surjection_is_iso,
        depths: datum.depth_values(),
        ell: b.ell,
        u: b.u,
        c: b.c,
        exact_sequence: check_exact_sequence(&uq, &sub)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_exponents_of_generators() {
        assert_eq!(unit_exponents(3, 6, 1, 2), vec![0, 0, 1, 0, 0, 0]);
        // multiplying the factors back recovers 1 + 2t
        let c = unit_exponents(3, 6, 2, 1);
        assert_eq!(c[1], 2);
        let mut x = vec![1, 0, 0, 0, 0, 0];
        for (i, &ci) in c.iter().enumerate().skip(1) {
            for _ in 0..ci {
                let mut g = vec![0; 6];
                g[0] = 1;
                g[i] = 1;
                x = mul_trunc(&x, &g, 3);
            }
        }
        assert_eq!(x, vec![1, 2, 0, 0, 0, 0]);
    }

    #[test]
    fn words_round_trip() {
        for w in [Word::T, Word::Zeta, Word::one_plus(4), Word::Unit { a: 2, n: 3 }] {
            assert_eq!(w.to_string().parse::<Word>().unwrap(), w);
        }
        assert!("1+t^0".parse::<Word>().is_err());
        assert!("x".parse::<Word>().is_err());
    }

    #[test]
    fn principal_units_have_expected_order() {
        // (1+tO)/(1+t^5 O) over F_2 has order 2^4
        let uq = UnitQuotient::build(2, 5, vec![Word::T, Word::Zeta], Vec::new());
        assert_eq!(uq.order(), Some(16));
        assert_eq!(uq.invariants(), vec![2, 8]);
    }
}
