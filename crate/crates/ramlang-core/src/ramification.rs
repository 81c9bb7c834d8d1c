//! Combinatorial ramification data.
//!
//! A [`RamDatum`] is the finite shadow of `Gal(L/E)`: a multiplication table,
//! the inertia subgroup and the depth of every non-trivial inertia element,
//! with depths measured in the valuation normalized by the ground field
//! (`val(t) = 1`). From it we get lower and upper numbering subgroups, the
//! normalized Herbrand functions `phi(x) = sum_{s in I} min(depth(s), x)` and
//! `psi = phi^{-1}`, the breaks `(ell, u, c)` and quotient data.

use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Zero;

use crate::plfun::PLFun;
use crate::rat::{fmt_rat, int, on_grid, Depth, Rat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RamError {
    NotAGroup(String),
    InertiaNotSubgroup,
    InertiaNotNormal,
    DepthMissing(String),
    DepthOutsideInertia(String),
    NegativeDepth(String),
    DepthAsymmetric(String),
    DepthOffGrid(String),
    LevelNotSubgroup(Rat),
    RamIndexMismatch { given: u64, actual: u64 },
    NegativeLevel(Rat),
    NotNormal,
    NotSubgroup,
    Invariant(String),
    NotFound(String),
}

impl fmt::Display for RamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RamError::NotAGroup(why) => write!(f, "multiplication table is not a group: {why}"),
            RamError::InertiaNotSubgroup => f.write_str("inertia is not a subgroup"),
            RamError::InertiaNotNormal => f.write_str("inertia is not normal"),
            RamError::DepthMissing(s) => write!(f, "no depth given for inertia element {s}"),
            RamError::DepthOutsideInertia(s) => {
                write!(f, "depth given for {s}, which is the identity or outside inertia")
            }
            RamError::NegativeDepth(s) => write!(f, "negative depth for {s}"),
            RamError::DepthAsymmetric(s) => write!(f, "depth of {s} differs from its inverse"),
            RamError::DepthOffGrid(s) => write!(f, "depth of {s} is not in (1/(e*e_base))Z"),
            RamError::LevelNotSubgroup(r) => {
                write!(f, "elements of depth >= {} do not form a subgroup", fmt_rat(r))
            }
            RamError::RamIndexMismatch { given, actual } => {
                write!(f, "ramification index {given} does not match |inertia| = {actual}")
            }
            RamError::NegativeLevel(r) => write!(f, "level {} is negative", fmt_rat(r)),
            RamError::NotNormal => f.write_str("subgroup is not normal"),
            RamError::NotSubgroup => f.write_str("subset is not a subgroup"),
            RamError::Invariant(why) => write!(f, "invariant violated: {why}"),
            RamError::NotFound(why) => write!(f, "not found: {why}"),
        }
    }
}

/// Last lower break `ell`, last upper break `u` and conductor shift `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Breaks {
    pub ell: Rat,
    pub u: Rat,
    pub c: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RamDatum {
    names: Vec<String>,
    mul: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
    inertia: Vec<bool>,
    depth: Vec<Depth>,
    e_base: u64,
}

/// Identity, inverse table; errors if `mul` is not a group table.
fn check_group(mul: &[Vec<usize>]) -> Result<(usize, Vec<usize>), RamError> {
    let n = mul.len();
    if n == 0 {
        return Err(RamError::NotAGroup("empty".into()));
    }
    if mul.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
        return Err(RamError::NotAGroup("table is not square or has bad entries".into()));
    }
    let identity = (0..n)
        .find(|&e| (0..n).all(|a| mul[e][a] == a && mul[a][e] == a))
        .ok_or_else(|| RamError::NotAGroup("no identity".into()))?;
    let mut inverse = vec![0; n];
    for a in 0..n {
        inverse[a] = (0..n)
            .find(|&b| mul[a][b] == identity && mul[b][a] == identity)
            .ok_or_else(|| RamError::NotAGroup(format!("element {a} has no inverse")))?;
    }
    for a in 0..n {
        for b in 0..n {
            let ab = mul[a][b];
            for c in 0..n {
                if mul[ab][c] != mul[a][mul[b][c]] {
                    return Err(RamError::NotAGroup("not associative".into()));
                }
            }
        }
    }
    Ok((identity, inverse))
}

impl RamDatum {
    /// Validating constructor.
    ///
    /// `depth` must give exactly the non-identity inertia elements. The
    /// ramification index `e(L/E)` is `|inertia|`; `e_base = e(E/F)`.
    pub fn new(
        names: Vec<String>,
        mul: Vec<Vec<usize>>,
        inertia: &[usize],
        depth: &BTreeMap<usize, Rat>,
        e_base: u64,
    ) -> Result<Self, RamError> {
        let (identity, inverse) = check_group(&mul)?;
        let n = mul.len();
        if names.len() != n {
            return Err(RamError::NotAGroup("one name per element required".into()));
        }
        let mut in_i = vec![false; n];
        for &s in inertia {
            if s >= n {
                return Err(RamError::InertiaNotSubgroup);
            }
            in_i[s] = true;
        }
        in_i[identity] = true;
        for a in 0..n {
            for b in 0..n {
                if in_i[a] && in_i[b] && !in_i[mul[a][b]] {
                    return Err(RamError::InertiaNotSubgroup);
                }
                if in_i[b] && !in_i[mul[mul[a][b]][inverse[a]]] {
                    return Err(RamError::InertiaNotNormal);
                }
            }
        }
        let e = in_i.iter().filter(|&&x| x).count() as u64;
        let mut dep = vec![Depth::Infinite; n];
        for (&s, &d) in depth {
            if s >= n || !in_i[s] || s == identity {
                let name = names.get(s).cloned().unwrap_or_else(|| format!("#{s}"));
                return Err(RamError::DepthOutsideInertia(name));
            }
            if d < Rat::zero() {
                return Err(RamError::NegativeDepth(names[s].clone()));
            }
            if !on_grid(&d, (e * e_base) as i64) {
                return Err(RamError::DepthOffGrid(names[s].clone()));
            }
            dep[s] = Depth::Finite(d);
        }
        for s in 0..n {
            if in_i[s] && s != identity && !depth.contains_key(&s) {
                return Err(RamError::DepthMissing(names[s].clone()));
            }
        }
        for s in 0..n {
            if in_i[s] && dep[s] != dep[inverse[s]] {
                return Err(RamError::DepthAsymmetric(names[s].clone()));
            }
        }
        let datum = Self { names, mul, identity, inverse, inertia: in_i, depth: dep, e_base };
        for r in datum.depth_values() {
            let level = datum.level_set(r);
            if !datum.is_closed(&level) {
                return Err(RamError::LevelNotSubgroup(r));
            }
        }
        Ok(datum)
    }

    /// Datum of the trivial extension.
    #[must_use]
    pub fn trivial(e_base: u64) -> Self {
        Self {
            names: vec!["1".into()],
            mul: vec![vec![0]],
            identity: 0,
            inverse: vec![0],
            inertia: vec![true],
            depth: vec![Depth::Infinite],
            e_base,
        }
    }

    #[must_use]
    pub fn order(&self) -> usize {
        self.mul.len()
    }

    #[must_use]
    pub fn names(&self) -> &[String] {
        &self.names
    }

    #[must_use]
    pub fn name(&self, s: usize) -> &str {
        &self.names[s]
    }

    #[must_use]
    pub fn mul_table(&self) -> &[Vec<usize>] {
        &self.mul
    }

    #[must_use]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    #[must_use]
    pub fn identity(&self) -> usize {
        self.identity
    }

    #[must_use]
    pub fn inverse_of(&self, a: usize) -> usize {
        self.inverse[a]
    }

    #[must_use]
    pub fn inertia(&self) -> Vec<usize> {
        (0..self.order()).filter(|&s| self.inertia[s]).collect()
    }

    #[must_use]
    pub fn in_inertia(&self, s: usize) -> bool {
        self.inertia[s]
    }

    /// `e(L/E) = |inertia|`.
    #[must_use]
    pub fn e(&self) -> u64 {
        self.inertia.iter().filter(|&&x| x).count() as u64
    }

    #[must_use]
    pub fn e_base(&self) -> u64 {
        self.e_base
    }

    /// Denominator of the depth grid, `e(L/E) e(E/F)`.
    #[must_use]
    pub fn grid_den(&self) -> i64 {
        (self.e() * self.e_base) as i64
    }

    /// Depth of an inertia element; `None` outside inertia.
    #[must_use]
    pub fn depth(&self, s: usize) -> Option<Depth> {
        self.inertia[s].then(|| self.depth[s])
    }

    /// Depth map keyed by element index (identity excluded).
    #[must_use]
    pub fn depth_map(&self) -> BTreeMap<usize, Rat> {
        (0..self.order())
            .filter_map(|s| match (self.inertia[s], self.depth[s]) {
                (true, Depth::Finite(d)) => Some((s, d)),
                _ => None,
            })
            .collect()
    }

    /// Distinct finite depths, ascending.
    #[must_use]
    pub fn depth_values(&self) -> Vec<Rat> {
        let set: BTreeSet<Rat> = self.depth_map().into_values().collect();
        set.into_iter().collect()
    }

    fn level_set(&self, r: Rat) -> Vec<usize> {
        (0..self.order()).filter(|&s| self.inertia[s] && self.depth[s].at_least(r)).collect()
    }

    fn is_closed(&self, set: &[usize]) -> bool {
        let mut member = vec![false; self.order()];
        for &s in set {
            member[s] = true;
        }
        set.iter().all(|&a| set.iter().all(|&b| member[self.mul[a][b]]))
    }

    fn is_normal(&self, set: &[usize]) -> bool {
        let mut member = vec![false; self.order()];
        for &s in set {
            member[s] = true;
        }
        (0..self.order()).all(|g| {
            set.iter().all(|&n| member[self.mul[self.mul[g][n]][self.inverse[g]]])
        })
    }

    /// `Gamma_r = {1} u {s : depth(s) >= r}`.
    pub fn lower_group(&self, r: Rat) -> Result<Vec<usize>, RamError> {
        if r < Rat::zero() {
            return Err(RamError::NegativeLevel(r));
        }
        Ok(self.level_set(r))
    }

    /// `phi(x) = sum over inertia of min(depth, x)`.
    #[must_use]
    pub fn hh_phi(&self) -> PLFun {
        let inertia_depths: Vec<Depth> =
            (0..self.order()).filter(|&s| self.inertia[s]).map(|s| self.depth[s]).collect();
        let mut breaks = vec![Rat::zero()];
        breaks.extend(self.depth_values().into_iter().filter(|d| *d > Rat::zero()));
        let slopes = breaks
            .iter()
            .map(|&b| {
                let k = inertia_depths.iter().filter(|d| **d > Depth::Finite(b)).count();
                int(k as i64)
            })
            .collect();
        PLFun::new(breaks, slopes).expect("counting slopes are positive and breaks ascend")
    }

    #[must_use]
    pub fn hh_psi(&self) -> PLFun {
        self.hh_phi().inverse()
    }

    /// `(ell, u, c)` with `c` from the depth sum, checked against `u - ell`.
    pub fn breaks(&self) -> Result<Breaks, RamError> {
        let depths = self.depth_map();
        let ell = depths.values().copied().max().unwrap_or_else(Rat::zero);
        let c: Rat = depths.values().copied().sum();
        let u = self.hh_phi().eval(ell);
        if c != u - ell {
            return Err(RamError::Invariant(format!(
                "c = {} but u - ell = {}",
                fmt_rat(&c),
                fmt_rat(&(u - ell))
            )));
        }
        Ok(Breaks { ell, u, c })
    }

    /// `Gamma^s = Gamma_{psi(s)}`.
    pub fn upper_group(&self, s: Rat) -> Result<Vec<usize>, RamError> {
        if s < Rat::zero() {
            return Err(RamError::NegativeLevel(s));
        }
        self.lower_group(self.hh_psi().eval(s))
    }

    /// Restriction to a subgroup `N = Gal(L/K)`: the datum of `L/K`.
    pub fn restrict(&self, sub: &[usize]) -> Result<RamDatum, RamError> {
        let mut set: Vec<usize> = sub.to_vec();
        set.sort_unstable();
        set.dedup();
        if !set.contains(&self.identity) || !self.is_closed(&set) {
            return Err(RamError::NotSubgroup);
        }
        let pos: BTreeMap<usize, usize> = set.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mul = set.iter().map(|&a| set.iter().map(|&b| pos[&self.mul[a][b]]).collect()).collect();
        let names = set.iter().map(|&s| self.names[s].clone()).collect();
        let inertia: Vec<usize> =
            set.iter().enumerate().filter(|(_, &s)| self.inertia[s]).map(|(i, _)| i).collect();
        let depth = set
            .iter()
            .enumerate()
            .filter_map(|(i, &s)| match (self.inertia[s], self.depth[s]) {
                (true, Depth::Finite(d)) => Some((i, d)),
                _ => None,
            })
            .collect();
        let e_sub = inertia.len() as u64;
        let e_base = self.e_base * (self.e() / e_sub);
        RamDatum::new(names, mul, &inertia, &depth, e_base)
    }

    /// Cosets of a normal subgroup, each sorted, ordered by least member.
    pub fn cosets(&self, normal: &[usize]) -> Result<Vec<Vec<usize>>, RamError> {
        let mut set: Vec<usize> = normal.to_vec();
        set.sort_unstable();
        set.dedup();
        if !set.contains(&self.identity) || !self.is_closed(&set) {
            return Err(RamError::NotSubgroup);
        }
        if !self.is_normal(&set) {
            return Err(RamError::NotNormal);
        }
        let mut seen = vec![false; self.order()];
        let mut out = Vec::new();
        for g in 0..self.order() {
            if seen[g] {
                continue;
            }
            let mut coset: Vec<usize> = set.iter().map(|&n| self.mul[g][n]).collect();
            coset.sort_unstable();
            for &x in &coset {
                seen[x] = true;
            }
            out.push(coset);
        }
        Ok(out)
    }

    /// Datum of `K/E` where `K` is the fixed field of the normal subgroup `N`.
    ///
    /// Coset depths follow Herbrand's theorem: the depth of `sN` in `K/E` is
    /// `phi_{L/K}` of the largest depth in `sN`. [`crate::localfield`] offers
    /// the field-side computation of the same datum.
    pub fn quotient_datum(&self, normal: &[usize]) -> Result<RamDatum, RamError> {
        let cosets = self.cosets(normal)?;
        let phi_lk = self.restrict(normal)?.hh_phi();
        let index_of = |x: usize| cosets.iter().position(|c| c.contains(&x)).expect("partition");
        let k = cosets.len();
        let mul = (0..k)
            .map(|a| (0..k).map(|b| index_of(self.mul[cosets[a][0]][cosets[b][0]])).collect())
            .collect();
        let names = cosets.iter().map(|c| format!("[{}]", self.names[c[0]])).collect();
        let ident = index_of(self.identity);
        let mut inertia = Vec::new();
        let mut depth = BTreeMap::new();
        for (i, coset) in cosets.iter().enumerate() {
            let in_inertia: Vec<usize> =
                coset.iter().copied().filter(|&s| self.inertia[s]).collect();
            if in_inertia.is_empty() {
                continue;
            }
            inertia.push(i);
            if i == ident {
                continue;
            }
            let top = in_inertia.iter().map(|&s| self.depth[s]).max().expect("nonempty");
            match top {
                Depth::Finite(d) => {
                    depth.insert(i, phi_lk.eval(d));
                }
                Depth::Infinite => {
                    return Err(RamError::Invariant("identity outside the trivial coset".into()))
                }
            }
        }
        let e_lk = self.restrict(normal)?.e();
        let e_ke = self.e() / e_lk;
        debug_assert_eq!(e_ke as usize, inertia.len());
        RamDatum::new(names, mul, &inertia, &depth, self.e_base)
    }

    /// The three computable clauses of the ramification equivalence at level `s`:
    /// `c = s - psi(s)`, `psi(s) >= ell or s >= u`, and `Gamma_{psi(s)+} = 1`.
    pub fn check_clauses_combinatorial(&self, s: Rat) -> Result<(bool, bool, bool), RamError> {
        if s < Rat::zero() {
            return Err(RamError::NegativeLevel(s));
        }
        let b = self.breaks()?;
        let psi_s = self.hh_psi().eval(s);
        let b1 = b.c == s - psi_s;
        let b2 = psi_s >= b.ell || s >= b.u;
        let b3 = self
            .depth_map()
            .values()
            .all(|d| *d <= psi_s);
        Ok((b1, b2, b3))
    }

    /// `(1/(e e_base)) Z ∩ [0, u + 2]`.
    pub fn grid(&self) -> Result<Vec<Rat>, RamError> {
        let b = self.breaks()?;
        let den = self.grid_den();
        let top = ((b.u + int(2)) * int(den)).floor().to_integer();
        Ok((0..=top).map(|k| Rat::new(k, den)).collect())
    }

    /// Whether an element set is `{1}`.
    #[must_use]
    pub fn is_trivial_subgroup(&self, set: &[usize]) -> bool {
        set.len() == 1 && set[0] == self.identity
    }

    /// Orders of the upper numbering subgroups at the given levels.
    pub fn upper_orders(&self, levels: &[Rat]) -> Result<Vec<usize>, RamError> {
        levels.iter().map(|&s| self.upper_group(s).map(|g| g.len())).collect()
    }

    /// Cyclic group of order `n` with all non-identity elements at depth `d`.
    /// Element `k` is `g^k`.
    pub fn cyclic(n: usize, d: Rat, e_base: u64) -> Result<Self, RamError> {
        let names = (0..n).map(|k| if k == 0 { "1".into() } else { format!("g^{k}") }).collect();
        let mul = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let inertia: Vec<usize> = (0..n).collect();
        let depth = (1..n).map(|k| (k, d)).collect();
        Self::new(names, mul, &inertia, &depth, e_base)
    }

    #[must_use]
    pub fn is_unramified(&self) -> bool {
        self.e() == 1
    }

    #[must_use]
    pub fn is_tame(&self) -> bool {
        self.depth_map().values().all(|d| d.is_zero())
    }

    /// Slope of `phi` just to the right of `x`, i.e. `|Gamma_{x+}|`.
    #[must_use]
    pub fn phi_slope(&self, x: Rat) -> Rat {
        self.hh_phi().slope_at(x)
    }
}

pub use crate::localfield::find_adapted_extension;
