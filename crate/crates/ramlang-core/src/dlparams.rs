//! Moy-Prasad types, depth-r parameters, toral characters and the depth-zero
//! parameter space for split type-A groups.
//!
//! A type `(x, X)` of depth `r` is stored by the residue matrix of `X` on
//! the graded piece of grade `-r` at `x` (see [`crate::rootdata`]). An
//! adapted pair `(E, alpha)` has `alpha = b * pi_E^{r e}` with `b` in the
//! residue field; since every tower uniformizer satisfies
//! `pi_E^{e} = t * (1 + O(pi_E))`, multiplying by `alpha` sends the residue
//! matrix `Y` to `b Y` in grade 0. The invariant of the type is the vector
//! of non-leading characteristic polynomial coefficients of `b Y`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_integer::Integer;
use num_traits::Zero;

use crate::fq::{Fe, Fq};
use crate::localfield::{
    adapted_catalog, character_conductor, character_pair, find_adapted_report, upper_break, with_precision,
    AdditiveCharacter, FieldError, Tower, TowerDescriptor, DEFAULT_PREC, MAX_PREC,
};
use crate::rat::{fmt_rat, frac, int, is_p_integral, lcm, Rat};
use crate::rootdata::{
    act_affine_weyl, affine_weyl_words, dual_orbit, frobenius_stable_orbits, graded_piece, reductive_quotient,
    AffineWeyl, ApartmentPoint, FeMat, GradedModel, GroupType, Perm, RootDatum, RootError, TorsionPoint,
};
use crate::series::{Series, EXACT};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DlError {
    Domain(String),
    /// An adaptedness clause failed.
    NotAdapted { clause: &'static str, detail: String },
    Degenerate,
    Root(RootError),
    Field(FieldError),
}

impl fmt::Display for DlError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DlError::Domain(why) => write!(f, "domain error: {why}"),
            DlError::NotAdapted { clause, detail } => write!(f, "not adapted ({clause}): {detail}"),
            DlError::Degenerate => write!(f, "type is degenerate"),
            DlError::Root(e) => write!(f, "{e}"),
            DlError::Field(e) => write!(f, "{e}"),
        }
    }
}

impl From<RootError> for DlError {
    fn from(e: RootError) -> Self {
        DlError::Root(e)
    }
}

impl From<FieldError> for DlError {
    fn from(e: FieldError) -> Self {
        DlError::Field(e)
    }
}

// ---- matrices over F_q ----

#[must_use]
pub fn mat_mul(f: &Fq, a: &FeMat, b: &FeMat) -> FeMat {
    let n = a.len();
    let mut out = vec![vec![Fe::ZERO; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                out[i][j] = f.add(out[i][j], f.mul(a[i][k], b[k][j]));
            }
        }
    }
    out
}

#[must_use]
pub fn mat_scale(f: &Fq, c: Fe, a: &FeMat) -> FeMat {
    a.iter().map(|row| row.iter().map(|&x| f.mul(c, x)).collect()).collect()
}

#[must_use]
pub fn mat_trace(f: &Fq, a: &FeMat) -> Fe {
    (0..a.len()).fold(Fe::ZERO, |acc, i| f.add(acc, a[i][i]))
}

fn det_sub(f: &Fq, a: &FeMat, idx: &[usize]) -> Fe {
    // Leibniz expansion on the principal submatrix
    let k = idx.len();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut total = Fe::ZERO;
    loop {
        let mut term = Fe::ONE;
        for (r, &c) in perm.iter().enumerate() {
            term = f.mul(term, a[idx[r]][idx[c]]);
        }
        let inversions = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).filter(|&(i, j)| perm[i] > perm[j]).count();
        total = if inversions % 2 == 0 { f.add(total, term) } else { f.sub(total, term) };
        if !next_permutation(&mut perm) {
            return total;
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| p[i] < p[i + 1]) else { return false };
    let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).expect("successor exists");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// Coefficients `c_1, ..., c_n` of `det(lambda - A) = lambda^n + c_1 lambda^{n-1} + ... + c_n`,
/// from principal minors (division free, valid in every characteristic).
#[must_use]
pub fn charpoly(f: &Fq, a: &FeMat) -> Vec<Fe> {
    let n = a.len();
    let mut out = vec![Fe::ZERO; n];
    for mask in 1u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let k = idx.len();
        let m = det_sub(f, a, &idx);
        out[k - 1] = if k.is_multiple_of(2) { f.add(out[k - 1], m) } else { f.sub(out[k - 1], m) };
    }
    out
}

/// `j_c`: `c_i -> c^i c_i`.
#[must_use]
pub fn j_scale(f: &Fq, c: Fe, z: &[Fe]) -> Vec<Fe> {
    z.iter().enumerate().map(|(i, &zi)| f.mul(f.pow(c, i as i64 + 1), zi)).collect()
}

fn codes(f: &Fq, z: &[Fe]) -> Vec<u32> {
    z.iter().map(|&a| f.code(a)).collect()
}

// ---- types ----

/// A Moy-Prasad type `(x, X)` of depth `r` with residue coefficients in `f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MPType {
    pub rd: RootDatum,
    pub x: ApartmentPoint,
    pub r: Rat,
    pub f: Fq,
    pub model: GradedModel,
    pub coeffs: Vec<Fe>,
}

impl MPType {
    pub fn new(rd: RootDatum, x: ApartmentPoint, r: Rat, f: Fq, coeffs: Vec<Fe>) -> Result<Self, DlError> {
        if r <= Rat::zero() {
            return Err(DlError::Domain("depth must be positive".into()));
        }
        let e = lcm(x.denominator(), *r.denom());
        let model = graded_piece(&rd, &x, -r, e)?;
        if coeffs.len() != model.dim() {
            return Err(DlError::Domain(format!("expected {} coefficients, got {}", model.dim(), coeffs.len())));
        }
        Ok(Self { rd, x, r, f, model, coeffs })
    }

    /// Residue matrix `Y`.
    pub fn matrix(&self) -> FeMat {
        self.model.to_matrix(&self.f, &self.coeffs).expect("coefficients match the model")
    }

    /// `c X` for a residue unit `c`.
    #[must_use]
    pub fn scaled(&self, c: Fe) -> Self {
        let coeffs = self.coeffs.iter().map(|&a| self.f.mul(c, a)).collect();
        Self { coeffs, ..self.clone() }
    }

    /// Transport by an affine Weyl element.
    pub fn transport(&self, w: &AffineWeyl) -> Result<Self, DlError> {
        let (model, coeffs) = act_affine_weyl(&self.f, w, &self.model, &self.coeffs)?;
        Ok(Self { x: model.x.clone(), model, coeffs, ..self.clone() })
    }
}

/// `(E, alpha)` with `alpha = b * pi_E^{r e(E/F)}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptedChoice {
    pub tower: TowerDescriptor,
    pub b: Fe,
}

/// An adapted choice checked against a depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifiedChoice {
    pub choice: AdaptedChoice,
    pub r: Rat,
    pub e: u64,
    pub u: Rat,
}

/// Check `r e(E/F) in Z`, `u(E/F) < r` and that `b` is a unit of `k_E`
/// lying in `f`. The upper break is read off the step-composed Herbrand
/// function, so towers need not be Galois over `F`.
pub fn verify_choice(choice: &AdaptedChoice, r: Rat, f: &Fq) -> Result<VerifiedChoice, DlError> {
    let d = &choice.tower;
    if d.p != f.p() {
        return Err(DlError::NotAdapted { clause: "characteristic", detail: format!("{d} is not over F_{}", f.p()) });
    }
    let e = d.ram_index();
    if !(r * int(e as i64)).is_integer() {
        return Err(DlError::NotAdapted {
            clause: "r*e(E/F) integral",
            detail: format!("r = {}, e = {e}", fmt_rat(&r)),
        });
    }
    if choice.b.is_zero() {
        return Err(DlError::NotAdapted { clause: "val(alpha) = r", detail: "alpha has zero residue".into() });
    }
    let common = f.degree().gcd(&d.top_residue_deg());
    if !f.in_subfield(choice.b, common) {
        return Err(DlError::NotAdapted {
            clause: "alpha residue in k_E",
            detail: format!("residue {} is not in the residue field of {d}", f.code(choice.b)),
        });
    }
    let u = with_precision(d, DEFAULT_PREC, upper_break)?;
    if u >= r {
        return Err(DlError::NotAdapted {
            clause: "u(E/F) < r",
            detail: format!("u = {} is not below r = {}", fmt_rat(&u), fmt_rat(&r)),
        });
    }
    Ok(VerifiedChoice { choice: choice.clone(), r, e, u })
}

/// `(F, 1)` for integral `r`; otherwise the first catalog tower with
/// `denom(r) | e` and `u < r`, with `b = 1`.
pub fn default_choice(p: u32, r: Rat) -> Result<AdaptedChoice, DlError> {
    if r.is_integer() {
        return Ok(AdaptedChoice { tower: TowerDescriptor::base(p, 1), b: Fe::ONE });
    }
    let report = find_adapted_report(&adapted_catalog(p, 1), *r.denom() as u64, r)?;
    Ok(AdaptedChoice { tower: report.tower, b: Fe::ONE })
}

/// A depth-r parameter `(beta, Z)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DLParam {
    pub r: Rat,
    /// Invariants of `b Y`.
    pub z: Vec<Fe>,
    /// Residue class of `alpha`.
    pub beta: Fe,
    /// Invariants of `Y` (the representative at `b = 1`).
    pub z_ref: Vec<Fe>,
    /// Least member of the `j_c`-orbit of `z` by element codes.
    pub canonical: Vec<Fe>,
    pub trivial: bool,
}

impl DLParam {
    /// Stable text form of the class: depth and canonical codes.
    #[must_use]
    pub fn class_string(&self, f: &Fq) -> String {
        let cs: Vec<String> = codes(f, &self.canonical).iter().map(|c| format!("{c}")).collect();
        format!("r={};Z=[{}]", fmt_rat(&self.r), cs.join(","))
    }
}

fn canonical_form(f: &Fq, z: &[Fe]) -> Vec<Fe> {
    let mut best = z.to_vec();
    let mut best_codes = codes(f, z);
    for c in f.elements().into_iter().filter(|c| !c.is_zero()) {
        let cand = j_scale(f, c, z);
        let cc = codes(f, &cand);
        if cc < best_codes {
            best_codes = cc;
            best = cand;
        }
    }
    best
}

/// Parameter of `mt` through a verified adapted choice.
pub fn dl_parameter(mt: &MPType, choice: &VerifiedChoice) -> Result<DLParam, DlError> {
    if choice.r != mt.r {
        return Err(DlError::Domain("choice was verified for a different depth".into()));
    }
    let f = &mt.f;
    let z_ref = charpoly(f, &mt.matrix());
    let beta = choice.choice.b;
    let z = j_scale(f, beta, &z_ref);
    let canonical = canonical_form(f, &z);
    let trivial = z.iter().all(|c| c.is_zero());
    Ok(DLParam { r: mt.r, z, beta, z_ref, canonical, trivial })
}

/// [`dl_parameter`] with the default adapted choice.
pub fn dl_parameter_default(mt: &MPType) -> Result<DLParam, DlError> {
    let choice = verify_choice(&default_choice(mt.f.p(), mt.r)?, mt.r, &mt.f)?;
    dl_parameter(mt, &choice)
}

/// `(beta, Z) ~ (beta', Z')` iff `Z' = j_c(Z)` for `c = beta' / beta`.
#[must_use]
pub fn dl_equiv(f: &Fq, d1: &DLParam, d2: &DLParam) -> bool {
    if d1.r != d2.r || d1.z.len() != d2.z.len() {
        return false;
    }
    let c = f.div(d2.beta, d1.beta).expect("beta is a unit");
    j_scale(f, c, &d1.z) == d2.z
}

/// Both types have equivalent parameters.
pub fn stable_associate(
    m1: &MPType,
    c1: &VerifiedChoice,
    m2: &MPType,
    c2: &VerifiedChoice,
) -> Result<bool, DlError> {
    if m1.r != m2.r {
        return Ok(false);
    }
    Ok(dl_equiv(&m1.f, &dl_parameter(m1, c1)?, &dl_parameter(m2, c2)?))
}

/// `Lambda_F(<W, X>)` in `Q/Z` for `W` on the grade-`r` piece at `x`, using
/// the trace pairing and `Lambda(a) = Tr_{k/F_p}(lambda a) / p`.
pub fn mp_character(mt: &MPType, w: &[Fe], lambda: Fe) -> Result<Rat, DlError> {
    let e = lcm(mt.x.denominator(), *mt.r.denom());
    let wm = graded_piece(&mt.rd, &mt.x, mt.r, e)?;
    if w.len() != wm.dim() {
        return Err(DlError::Domain(format!("W must have {} coefficients on the grade {} piece", wm.dim(), fmt_rat(&mt.r))));
    }
    let f = &mt.f;
    let pairing = mat_trace(f, &mat_mul(f, &wm.to_matrix(f, w)?, &mt.matrix()));
    let tr = f.trace_to_prime(f.mul(lambda, pairing), f.degree());
    Ok(Rat::new(i64::from(tr), i64::from(f.p())))
}

/// Outcome of [`is_nondegenerate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nondegeneracy {
    pub flag: bool,
    /// Least `i` with `c_i != 0`.
    pub witness: Option<usize>,
    /// `false` when `r` is not `p`-integral and the invariant test is not
    /// known to decide nondegeneracy.
    pub guaranteed: bool,
}

#[must_use]
pub fn is_nondegenerate(mt: &MPType) -> Nondegeneracy {
    let z = charpoly(&mt.f, &mt.matrix());
    let witness = z.iter().position(|c| !c.is_zero()).map(|i| i + 1);
    Nondegeneracy { flag: witness.is_some(), witness, guaranteed: is_p_integral(&mt.r, i64::from(mt.f.p())) }
}

/// A class representative for the restricted parameter of a nondegenerate
/// type. The class is stored as its canonical parameter, not as a
/// homomorphism of the inertia quotient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictedParam {
    pub param: DLParam,
}

pub fn restricted_param(mt: &MPType, choice: &VerifiedChoice) -> Result<RestrictedParam, DlError> {
    if !is_nondegenerate(mt).flag {
        return Err(DlError::Degenerate);
    }
    Ok(RestrictedParam { param: dl_parameter(mt, choice)? })
}

// ---- orbit oracle ----

/// Orbits of `G_x(k)` on the graded piece of grade `s` at `x`, for all
/// coefficient vectors over `k`, with the zero-in-closure flag per orbit.
#[derive(Debug, Clone)]
pub struct OrbitPartition {
    f: Fq,
    model: GradedModel,
    root: Vec<u32>,
    nilpotent: BTreeSet<u32>,
}

fn find(parent: &mut [u32], mut a: u32) -> u32 {
    while parent[a as usize] != a {
        let up = parent[parent[a as usize] as usize];
        parent[a as usize] = up;
        a = up;
    }
    a
}

fn identity_mat(n: usize) -> FeMat {
    (0..n).map(|i| (0..n).map(|j| if i == j { Fe::ONE } else { Fe::ZERO }).collect()).collect()
}

/// Generators of `G_x(k)` with their inverses: a torus generator per slot
/// and `1 + a E_ij` over an `F_p`-basis of `k` for each integral root.
fn quotient_generators(f: &Fq, rd: &RootDatum, x: &ApartmentPoint) -> Vec<(FeMat, FeMat)> {
    let n = rd.n;
    let z = f.primitive();
    let zi = f.inv(z).expect("primitive element is a unit");
    let mut gens = Vec::new();
    let slots = match rd.ty {
        GroupType::GL => n,
        GroupType::SL => n - 1,
    };
    for k in 0..slots {
        let mut g = identity_mat(n);
        let mut h = identity_mat(n);
        g[k][k] = z;
        h[k][k] = zi;
        if rd.ty == GroupType::SL {
            g[k + 1][k + 1] = zi;
            h[k + 1][k + 1] = z;
        }
        gens.push((g, h));
    }
    for (i, j) in reductive_quotient(rd, x).roots {
        for a in f.subfield_basis(f.degree()) {
            let mut g = identity_mat(n);
            let mut h = identity_mat(n);
            g[i][j] = a;
            h[i][j] = f.neg(a);
            gens.push((g, h));
        }
    }
    gens
}

/// Zero is a limit of `lambda(t) . Y` for a diagonal cocharacter iff the
/// diagonal vanishes and the support graph `i -> j` is acyclic.
#[must_use]
pub fn torus_destabilized(m: &FeMat) -> bool {
    let n = m.len();
    if (0..n).any(|i| !m[i][i].is_zero()) {
        return false;
    }
    let mut indeg = vec![0usize; n];
    for row in m {
        for (j, a) in row.iter().enumerate() {
            if !a.is_zero() {
                indeg[j] += 1;
            }
        }
    }
    let mut ready: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut seen = 0;
    while let Some(i) = ready.pop() {
        seen += 1;
        for j in 0..n {
            if !m[i][j].is_zero() {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    ready.push(j);
                }
            }
        }
    }
    seen == n
}

impl OrbitPartition {
    pub fn new(rd: &RootDatum, x: &ApartmentPoint, s: Rat, f: &Fq) -> Result<Self, DlError> {
        let e = lcm(x.denominator(), *s.denom());
        let model = graded_piece(rd, x, s, e)?;
        let q = f.order() as u64;
        let size = q.checked_pow(model.dim() as u32).filter(|&n| n <= 1 << 20).ok_or_else(|| {
            DlError::Domain(format!("{} vectors is too many to enumerate", model.dim()))
        })? as u32;
        let gens = quotient_generators(f, rd, x);
        let mut parent: Vec<u32> = (0..size).collect();
        let mut this = Self { f: f.clone(), model, root: Vec::new(), nilpotent: BTreeSet::new() };
        let mut flagged = Vec::new();
        for v in 0..size {
            let m = this.model.to_matrix(f, &this.decode(v))?;
            if torus_destabilized(&m) {
                flagged.push(v);
            }
            for (g, h) in &gens {
                let moved = mat_mul(f, &mat_mul(f, g, &m), h);
                let w = this.encode(&this.model.from_matrix(f, &moved)?);
                let (a, b) = (find(&mut parent, v), find(&mut parent, w));
                if a != b {
                    parent[a.max(b) as usize] = a.min(b);
                }
            }
        }
        this.root = (0..size).map(|v| find(&mut parent, v)).collect();
        this.nilpotent = flagged.into_iter().map(|v| this.root[v as usize]).collect();
        Ok(this)
    }

    fn decode(&self, mut v: u32) -> Vec<Fe> {
        let q = self.f.order();
        (0..self.model.dim())
            .map(|_| {
                let c = v % q;
                v /= q;
                self.f.from_code(c).expect("code in range")
            })
            .collect()
    }

    fn encode(&self, c: &[Fe]) -> u32 {
        let q = self.f.order();
        c.iter().rev().fold(0, |acc, &a| acc * q + self.f.code(a))
    }

    #[must_use]
    pub fn model(&self) -> &GradedModel {
        &self.model
    }

    #[must_use]
    pub fn field(&self) -> &Fq {
        &self.f
    }

    #[must_use]
    pub fn orbit_id(&self, coeffs: &[Fe]) -> u32 {
        self.root[self.encode(coeffs) as usize]
    }

    #[must_use]
    pub fn orbit_count(&self) -> usize {
        self.root.iter().collect::<BTreeSet<_>>().len()
    }

    /// `0` lies in the closure of the orbit.
    #[must_use]
    pub fn zero_in_closure(&self, coeffs: &[Fe]) -> bool {
        self.nilpotent.contains(&self.orbit_id(coeffs))
    }
}

/// Partitions cached by `(group, point, grade, field)`.
#[derive(Debug, Default)]
pub struct OrbitOracle {
    cache: BTreeMap<(GroupType, usize, ApartmentPoint, Rat, u32, u32), OrbitPartition>,
}

impl OrbitOracle {
    #[must_use]
    pub fn new() -> Self {
        Self::default()
    }

    pub fn partition(&mut self, rd: &RootDatum, x: &ApartmentPoint, s: Rat, f: &Fq) -> Result<&OrbitPartition, DlError> {
        let key = (rd.ty, rd.n, x.clone(), s, f.p(), f.degree());
        if !self.cache.contains_key(&key) {
            let part = OrbitPartition::new(rd, x, s, f)?;
            self.cache.insert(key.clone(), part);
        }
        Ok(&self.cache[&key])
    }

    /// Orbit-closure test for `mt`, with the coefficients carried into `big`
    /// (which must contain the coefficient field).
    pub fn degenerate_over(&mut self, mt: &MPType, big: &Fq) -> Result<bool, DlError> {
        let table = mt.f.embed_into(big).ok_or_else(|| DlError::Domain("field does not embed".into()))?;
        let coeffs: Vec<Fe> = mt.coeffs.iter().map(|&a| mt.f.apply_embedding(&table, a)).collect();
        Ok(self.partition(&mt.rd, &mt.x, -mt.r, big)?.zero_in_closure(&coeffs))
    }
}

/// Three-valued answer of [`associate_oracle`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Associate {
    /// Witnessed by an affine Weyl word (generator indices) followed by an
    /// element of `G_y(k)`.
    Yes(Vec<usize>),
    No,
    Unknown,
}

/// Search affine Weyl words up to `len` for `h` with `hx = y` (modulo the
/// center) and `hX` in the `G_y(k)`-orbit of `Y`. Only different depths
/// give a definite `No`.
pub fn associate_oracle(oracle: &mut OrbitOracle, m1: &MPType, m2: &MPType, len: usize) -> Result<Associate, DlError> {
    associate_with_words(oracle, m1, m2, &affine_weyl_words(&m1.rd, len))
}

/// [`associate_oracle`] over a precomputed word list.
pub fn associate_with_words(
    oracle: &mut OrbitOracle,
    m1: &MPType,
    m2: &MPType,
    words: &[(Vec<usize>, AffineWeyl)],
) -> Result<Associate, DlError> {
    if m1.r != m2.r || m1.rd != m2.rd {
        return Ok(Associate::No);
    }
    for (word, w) in words {
        if !w.act_point(&m1.x).same_class(&m2.x) {
            continue;
        }
        let moved = m1.transport(w)?;
        let part = oracle.partition(&m2.rd, &m2.x, -m2.r, &m2.f)?;
        if part.orbit_id(&moved.coeffs) == part.orbit_id(&m2.coeffs) {
            return Ok(Associate::Yes(word.clone()));
        }
    }
    Ok(Associate::Unknown)
}

/// Words of length at most `len` carrying `x` to `y` modulo the center.
#[must_use]
pub fn words_between(rd: &RootDatum, x: &ApartmentPoint, y: &ApartmentPoint, len: usize) -> Vec<(Vec<usize>, AffineWeyl)> {
    affine_weyl_words(rd, len).into_iter().filter(|(_, w)| w.act_point(x).same_class(y)).collect()
}

// ---- toral characters ----

/// `chi_{X,E}` for the split torus `T = GL_1^n` on the graded piece
/// `T(E)_{= r - c(E/F)}`, evaluated through `1 + y -> Lambda_E(y X)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToralCharacter {
    pub tower: TowerDescriptor,
    pub level: usize,
    pub r: Rat,
    /// `c(E/F)`.
    pub c: Rat,
    /// `u(E/F)`.
    pub u: Rat,
    /// Exponent `n` with `n / e(E) = r - c(E/F)`.
    pub n: i64,
    /// `table[k][b]`: value on `1 + basis[b] * pi_E^n` in coordinate `k`.
    pub table: Vec<Vec<Rat>>,
}

/// `c(E/F)` from the conductors of the base and lifted additive characters.
pub fn conductor_shift(chr: &AdditiveCharacter, tower: &Tower, level: usize) -> Result<Rat, DlError> {
    Ok(character_conductor(chr, tower, 0)? - character_conductor(chr, tower, level)?)
}

fn lift_to(tower: &Tower, x: &Series, level: usize) -> Result<Series, DlError> {
    let t = tower.uniformizer_in(0, level)?;
    x.compose(tower.fq(), &t).ok_or_else(|| DlError::Domain("cannot lift X".into()))
}

/// Value of `chi_{X,E}` on `1 + y` for `y` in coordinate `k`.
pub fn toral_value(
    chr: &AdditiveCharacter,
    tower: &Tower,
    level: usize,
    xs: &[Series],
    k: usize,
    y: &Series,
) -> Result<Rat, DlError> {
    let xk = lift_to(tower, &xs[k], level)?;
    Ok(character_pair(chr, tower, level, &xk, y)?)
}

impl ToralCharacter {
    /// `xs[k]` is the `k`-th coordinate of `X` as a series in `t` of
    /// valuation at least `-r`.
    pub fn new(
        chr: &AdditiveCharacter,
        tower: &Tower,
        level: usize,
        xs: &[Series],
        r: Rat,
    ) -> Result<Self, DlError> {
        let e = tower.e_abs(level) as i64;
        if !(r * int(e)).is_integer() {
            return Err(DlError::NotAdapted { clause: "r*e(E/F) integral", detail: format!("e = {e}") });
        }
        let phi = tower.step_composed_phi(0, level)?;
        let u = phi.eval(phi.last_break());
        if level > 0 && u >= r {
            return Err(DlError::NotAdapted {
                clause: "u(E/F) < r",
                detail: format!("u = {}, r = {}", fmt_rat(&u), fmt_rat(&r)),
            });
        }
        for x in xs {
            if x.valuation().is_some_and(|v| int(v) < -r) {
                return Err(DlError::Domain("X has valuation below -r".into()));
            }
        }
        let c = conductor_shift(chr, tower, level)?;
        let n = ((r - c) * int(e)).to_integer();
        let f = tower.fq();
        let basis = f.subfield_basis(tower.res_deg(level));
        let mut table = Vec::with_capacity(xs.len());
        for k in 0..xs.len() {
            let mut row = Vec::with_capacity(basis.len());
            for &b in &basis {
                row.push(toral_value(chr, tower, level, xs, k, &Series::monomial(b, n, EXACT))?);
            }
            table.push(row);
        }
        Ok(Self { tower: tower.descriptor().clone(), level, r, c, u, n, table })
    }

    #[must_use]
    pub fn is_trivial(&self) -> bool {
        self.table.iter().flatten().all(Zero::is_zero)
    }
}

/// Result of comparing `chi_{X,E'}` with `chi_{X,E} o Nm` on every graded
/// representative `1 + a pi_{E'}^{n'}`, `a` in `k_{E'}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormCheck {
    pub checked: usize,
    /// `(coordinate, residue code, chi_{E'}, chi_E o Nm)` for each mismatch.
    pub mismatches: Vec<(usize, u32, Rat, Rat)>,
}

pub fn check_norm_compatibility(
    chr: &AdditiveCharacter,
    tower: &Tower,
    lower: usize,
    upper: usize,
    xs: &[Series],
    r: Rat,
) -> Result<NormCheck, DlError> {
    if lower > upper {
        return Err(DlError::Domain("levels out of order".into()));
    }
    let big = ToralCharacter::new(chr, tower, upper, xs, r)?;
    ToralCharacter::new(chr, tower, lower, xs, r)?;
    let f = tower.fq();
    let one = Series::one(EXACT);
    let mut out = NormCheck { checked: 0, mismatches: Vec::new() };
    for k in 0..xs.len() {
        for a in f.subfield(tower.res_deg(upper)) {
            let y = Series::monomial(a, big.n, EXACT);
            let lhs = toral_value(chr, tower, upper, xs, k, &y)?;
            let nm = tower.norm_by_steps(&one.add(f, &y).truncate(tower.prec()), upper, lower)?;
            let rhs = toral_value(chr, tower, lower, xs, k, &nm.sub(f, &one))?;
            out.checked += 1;
            if lhs != rhs {
                out.mismatches.push((k, f.code(a), lhs, rhs));
            }
        }
    }
    Ok(out)
}

/// [`check_norm_compatibility`] on a tower built from `desc`, raising the
/// working precision while it is insufficient.
pub fn norm_compatibility(
    chr: &AdditiveCharacter,
    desc: &TowerDescriptor,
    lower: usize,
    upper: usize,
    xs: &[Series],
    r: Rat,
) -> Result<NormCheck, DlError> {
    let mut prec = DEFAULT_PREC;
    loop {
        let attempt = Tower::with_prec(desc, prec)
            .map_err(DlError::from)
            .and_then(|t| check_norm_compatibility(chr, &t, lower, upper, xs, r));
        match attempt {
            Err(DlError::Field(FieldError::Precision(_))) if prec < MAX_PREC => prec = (prec * 2).min(MAX_PREC),
            other => return other,
        }
    }
}

// ---- depth zero ----

/// A Frobenius-stable `W`-orbit of torsion points of the dual torus.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DepthZeroParam {
    pub canonical: TorsionPoint,
    pub orbit: Vec<TorsionPoint>,
}

impl fmt::Display for DepthZeroParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pts: Vec<String> = self
            .orbit
            .iter()
            .map(|v| {
                let c: Vec<String> = v.iter().map(fmt_rat).collect();
                format!("({})", c.join(","))
            })
            .collect();
        write!(f, "{{{}}}", pts.join(", "))
    }
}

/// All stable orbits for the split Frobenius `chi -> chi^q`.
#[must_use]
pub fn depth_zero_space(rd: &RootDatum, q: i64) -> Vec<DepthZeroParam> {
    frobenius_stable_orbits(rd, q)
        .into_iter()
        .map(|(canonical, orbit)| DepthZeroParam { canonical, orbit })
        .collect()
}

/// Push a `W_x`-orbit `theta` forward to its `W`-orbit.
pub fn depth_zero_pushforward(rd: &RootDatum, x: &ApartmentPoint, theta: &[TorsionPoint]) -> Result<DepthZeroParam, DlError> {
    let first = theta.first().ok_or_else(|| DlError::Domain("empty orbit".into()))?;
    let wx: Vec<Perm> = reductive_quotient(rd, x).weyl;
    let given: BTreeSet<TorsionPoint> = theta.iter().map(|v| v.iter().map(frac).collect()).collect();
    if given.iter().any(|v: &TorsionPoint| v.len() != rd.dual_rank()) {
        return Err(DlError::Domain(format!("torsion points must have {} entries", rd.dual_rank())));
    }
    let closure: BTreeSet<TorsionPoint> = dual_orbit(rd, &wx, first).into_iter().collect();
    if closure != given {
        return Err(DlError::Domain("theta is not a single W_x-orbit".into()));
    }
    let orbit = dual_orbit(rd, &rd.weyl_group(), first);
    Ok(DepthZeroParam { canonical: orbit[0].clone(), orbit })
}

// ---- standard sweeps ----

/// A group, point and depth with two adapted choices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepCase {
    pub name: String,
    pub rd: RootDatum,
    pub x: ApartmentPoint,
    pub r: Rat,
    pub choices: Vec<AdaptedChoice>,
}

/// `GL_2` and `SL_2` at the vertex with `r = 1` and at the alcove
/// barycenter with `r = 1/2`, over `F_3((t))`. The second choice of each
/// case is `E = F_9((t))(t^{1/4})(y)`, `y^3 - y = pi^{-1}`, with `b = -1`.
#[must_use]
pub fn standard_cases() -> Vec<SweepCase> {
    let wild = TowerDescriptor::base(3, 1).unramified(2).tame(4).artin_schreier(1);
    let minus_one = Fq::new(3, 1).expect("F_3").from_int(-1);
    let mut out = Vec::new();
    for rd in [RootDatum::gl(2), RootDatum::sl(2)] {
        out.push(SweepCase {
            name: format!("{rd} vertex r=1"),
            rd,
            x: ApartmentPoint::origin(&rd),
            r: int(1),
            choices: vec![
                AdaptedChoice { tower: TowerDescriptor::base(3, 1), b: Fe::ONE },
                AdaptedChoice { tower: wild.clone(), b: minus_one },
            ],
        });
        out.push(SweepCase {
            name: format!("{rd} barycenter r=1/2"),
            rd,
            x: ApartmentPoint::barycenter(&rd),
            r: Rat::new(1, 2),
            choices: vec![
                AdaptedChoice { tower: TowerDescriptor::base(3, 1).tame(2), b: Fe::ONE },
                AdaptedChoice { tower: wild.clone(), b: minus_one },
            ],
        });
    }
    out
}

/// Every type of the case with coefficients in `f`.
pub fn sweep_types(case: &SweepCase, f: &Fq) -> Result<Vec<MPType>, DlError> {
    let e = lcm(case.x.denominator(), *case.r.denom());
    let dim = graded_piece(&case.rd, &case.x, -case.r, e)?.dim();
    let mut vecs = vec![Vec::new()];
    for _ in 0..dim {
        vecs = vecs
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
    vecs.into_iter().map(|c| MPType::new(case.rd, case.x.clone(), case.r, f.clone(), c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charpoly_small() {
        let f = Fq::new(3, 1).unwrap();
        let m = vec![vec![f.from_int(1), Fe::ZERO], vec![Fe::ZERO, f.from_int(-1)]];
        assert_eq!(charpoly(&f, &m), vec![Fe::ZERO, f.from_int(-1)]);
        let n = vec![vec![Fe::ZERO, Fe::ONE], vec![Fe::ZERO, Fe::ZERO]];
        assert_eq!(charpoly(&f, &n), vec![Fe::ZERO, Fe::ZERO]);
    }

    #[test]
    fn destabilized_patterns() {
        let o = Fe::ONE;
        let z = Fe::ZERO;
        assert!(torus_destabilized(&vec![vec![z, o], vec![z, z]]));
        assert!(!torus_destabilized(&vec![vec![z, o], vec![o, z]]));
        assert!(!torus_destabilized(&vec![vec![o, z], vec![z, z]]));
    }
}
