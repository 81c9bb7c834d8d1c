//! Split type-A root data, graded Moy-Prasad pieces on the standard
//! apartment, affine Weyl transport and torsion points of the dual torus.
//!
//! Conventions. A point `x` of the standard apartment is a vector in `Q^n`
//! (for `SL_n` only differences `x_i - x_j` matter). The line `E_ij t^c`
//! sits in grade `c + x_i - x_j`; torus lines `E_ii t^c` sit in grade `c`.
//! The dual Lie algebra is identified with `gl_n` by the trace form, which
//! carries the same grading formula, so one model serves both.
//!
//! A graded element is stored by its residue matrix `Y^`: the entry `(i, j)`
//! is the coefficient of `E_ij t^{c_ij}` with `c_ij` fixed by the grade. In
//! these coordinates the reductive quotient `G_x(k)` acts by ordinary matrix
//! conjugation and multiplication by a scalar of valuation `v` keeps the
//! matrix and moves every `c_ij` by `v`.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::fq::{Fe, Fq};
use crate::rat::{frac, int, lcm, on_grid, Rat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RootError {
    Domain(String),
    Shape(String),
}

impl fmt::Display for RootError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootError::Domain(why) => write!(f, "domain error: {why}"),
            RootError::Shape(why) => write!(f, "shape error: {why}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupType {
    GL,
    SL,
}

impl GroupType {
    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            GroupType::GL => "GL",
            GroupType::SL => "SL",
        }
    }
}

/// `GL_n` or `SL_n` with its diagonal torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RootDatum {
    pub ty: GroupType,
    pub n: usize,
}

impl fmt::Display for RootDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.ty.name(), self.n)
    }
}

/// A permutation `sigma` of `0..n` stored as its image list.
pub type Perm = Vec<usize>;

fn all_perms(n: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut cur: Perm = (0..n).collect();
    heap_permute(n, &mut cur, &mut out);
    out.sort();
    out
}

fn heap_permute(k: usize, cur: &mut Perm, out: &mut Vec<Perm>) {
    if k <= 1 {
        out.push(cur.clone());
        return;
    }
    for i in 0..k {
        heap_permute(k - 1, cur, out);
        if k.is_multiple_of(2) {
            cur.swap(i, k - 1);
        } else {
            cur.swap(0, k - 1);
        }
    }
}

impl RootDatum {
    pub fn new(ty: GroupType, n: usize) -> Result<Self, RootError> {
        if n == 0 || n > 4 || (ty == GroupType::SL && n < 2) {
            return Err(RootError::Domain(format!("{}_{n} is outside the supported range", ty.name())));
        }
        Ok(Self { ty, n })
    }

    #[must_use]
    pub fn gl(n: usize) -> Self {
        Self { ty: GroupType::GL, n }
    }

    #[must_use]
    pub fn sl(n: usize) -> Self {
        Self { ty: GroupType::SL, n }
    }

    /// Roots `e_i - e_j`, `i != j`, as index pairs.
    #[must_use]
    pub fn roots(&self) -> Vec<(usize, usize)> {
        let n = self.n;
        (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect()
    }

    /// Character `e_i - e_j` in `X^* = Z^n`.
    #[must_use]
    pub fn root_vector(&self, (i, j): (usize, usize)) -> Vec<i64> {
        let mut v = vec![0; self.n];
        v[i] += 1;
        v[j] -= 1;
        v
    }

    /// Coroot `e_i^v - e_j^v` in `X_* = Z^n`.
    #[must_use]
    pub fn coroot_vector(&self, a: (usize, usize)) -> Vec<i64> {
        self.root_vector(a)
    }

    #[must_use]
    pub fn pairing(x: &[i64], y: &[i64]) -> i64 {
        x.iter().zip(y).map(|(a, b)| a * b).sum()
    }

    /// `<alpha, alpha^v> = 2` for every root.
    #[must_use]
    pub fn check(&self) -> bool {
        self.roots().iter().all(|&a| Self::pairing(&self.root_vector(a), &self.coroot_vector(a)) == 2)
    }

    /// The Weyl group `S_n`, acting on `X^*` by permuting coordinates.
    #[must_use]
    pub fn weyl_group(&self) -> Vec<Perm> {
        all_perms(self.n)
    }

    /// Dimension of the Lie algebra.
    #[must_use]
    pub fn dim(&self) -> usize {
        match self.ty {
            GroupType::GL => self.n * self.n,
            GroupType::SL => self.n * self.n - 1,
        }
    }

    /// Number of torus lines in a graded piece of integral grade.
    #[must_use]
    pub fn torus_rank(&self) -> usize {
        match self.ty {
            GroupType::GL => self.n,
            GroupType::SL => self.n - 1,
        }
    }

    /// Rank of the dual torus; `SL_n` has `X^*(T) = Z^n / Z(1, ..., 1)`.
    #[must_use]
    pub fn dual_rank(&self) -> usize {
        self.torus_rank()
    }

    /// The dual datum: `GL_n` is self-dual, `SL_n` is dual to `PGL_n`.
    #[must_use]
    pub fn dual_name(&self) -> String {
        match self.ty {
            GroupType::GL => format!("GL_{}", self.n),
            GroupType::SL => format!("PGL_{}", self.n),
        }
    }

    /// Matrix of `w` on the dual torus coordinates (rows are images of basis
    /// vectors).
    #[must_use]
    pub fn dual_weyl_matrix(&self, w: &Perm) -> Vec<Vec<i64>> {
        let r = self.dual_rank();
        (0..r)
            .map(|k| {
                let mut basis = vec![Rat::zero(); r];
                basis[k] = Rat::one();
                self.dual_act_raw(w, &basis).into_iter().map(|x| x.to_integer()).collect()
            })
            .collect()
    }

    /// `w . v` without reducing mod 1.
    fn dual_act_raw(&self, w: &Perm, v: &[Rat]) -> Vec<Rat> {
        let n = self.n;
        let mut full = v.to_vec();
        if self.ty == GroupType::SL {
            full.push(Rat::zero());
        }
        let mut moved = vec![Rat::zero(); n];
        for i in 0..n {
            moved[w[i]] = full[i];
        }
        if self.ty == GroupType::SL {
            let last = moved[n - 1];
            moved.truncate(n - 1);
            for m in &mut moved {
                *m -= last;
            }
        }
        moved
    }

    /// `w . v` on `(Q/Z)^rank`.
    #[must_use]
    pub fn dual_act(&self, w: &Perm, v: &[Rat]) -> Vec<Rat> {
        self.dual_act_raw(w, v).iter().map(frac).collect()
    }
}

/// A point of the standard apartment.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ApartmentPoint {
    pub coords: Vec<Rat>,
}

impl ApartmentPoint {
    pub fn new(rd: &RootDatum, coords: Vec<Rat>) -> Result<Self, RootError> {
        if coords.len() != rd.n {
            return Err(RootError::Shape(format!("expected {} coordinates", rd.n)));
        }
        Ok(Self { coords })
    }

    #[must_use]
    pub fn origin(rd: &RootDatum) -> Self {
        Self { coords: vec![Rat::zero(); rd.n] }
    }

    /// Barycenter of the standard alcove `x_1 > ... > x_n > x_1 - 1`.
    #[must_use]
    pub fn barycenter(rd: &RootDatum) -> Self {
        let n = rd.n as i64;
        Self { coords: (1..=n).map(|i| Rat::new(n + 1 - 2 * i, 2 * n)).collect() }
    }

    /// `<e_i - e_j, x>`.
    #[must_use]
    pub fn root_value(&self, (i, j): (usize, usize)) -> Rat {
        self.coords[i] - self.coords[j]
    }

    /// Least `e` with every `x_i - x_j` in `(1/e)Z`.
    #[must_use]
    pub fn denominator(&self) -> i64 {
        let n = self.coords.len();
        let mut e = 1;
        for i in 0..n {
            for j in 0..n {
                e = lcm(e, *self.root_value((i, j)).denom());
            }
        }
        e
    }

    /// Equality modulo the center direction.
    #[must_use]
    pub fn same_class(&self, other: &Self) -> bool {
        let n = self.coords.len();
        n == other.coords.len()
            && (0..n).all(|i| self.root_value((i, 0)) == other.root_value((i, 0)))
    }
}

/// A coordinate line of a graded piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    /// `E_ij t^c`.
    Root { i: usize, j: usize, c: Rat },
    /// `E_kk t^c` for `GL_n`, `(E_kk - E_{k+1,k+1}) t^c` for `SL_n`.
    Torus { k: usize, c: Rat },
}

impl Label {
    #[must_use]
    pub fn power(&self) -> Rat {
        match *self {
            Label::Root { c, .. } | Label::Torus { c, .. } => c,
        }
    }

    fn shifted(&self, v: Rat) -> Self {
        match *self {
            Label::Root { i, j, c } => Label::Root { i, j, c: c + v },
            Label::Torus { k, c } => Label::Torus { k, c: c + v },
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Root { i, j, c } => write!(f, "E{}{}*t^({})", i + 1, j + 1, crate::rat::fmt_rat(c)),
            Label::Torus { k, c } => write!(f, "H{}*t^({})", k + 1, crate::rat::fmt_rat(c)),
        }
    }
}

/// Residue matrix over a finite field.
pub type FeMat = Vec<Vec<Fe>>;

/// `g(E)_{x = s}` where powers `c` run over `(1/cden)Z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedModel {
    pub rd: RootDatum,
    pub x: ApartmentPoint,
    pub s: Rat,
    pub cden: i64,
    pub labels: Vec<Label>,
}

/// Graded piece of `g(F)` at `x` and grade `s`, with `s` and `x` on the
/// `(1/e)Z` grid.
pub fn graded_piece(rd: &RootDatum, x: &ApartmentPoint, s: Rat, e: i64) -> Result<GradedModel, RootError> {
    if e <= 0 || !on_grid(&s, e) {
        return Err(RootError::Domain(format!("grade {} is not in (1/{e})Z", crate::rat::fmt_rat(&s))));
    }
    if e % x.denominator() != 0 {
        return Err(RootError::Domain(format!("point denominators do not divide {e}")));
    }
    graded_piece_over(rd, x, s, 1)
}

/// Graded piece over the extension with uniformizer `t^{1/cden}`.
pub fn graded_piece_over(rd: &RootDatum, x: &ApartmentPoint, s: Rat, cden: i64) -> Result<GradedModel, RootError> {
    if x.coords.len() != rd.n {
        return Err(RootError::Shape("point has the wrong rank".into()));
    }
    let mut labels = Vec::new();
    if on_grid(&s, cden) {
        labels.extend((0..rd.torus_rank()).map(|k| Label::Torus { k, c: s }));
    }
    for (i, j) in rd.roots() {
        let c = s - x.root_value((i, j));
        if on_grid(&c, cden) {
            labels.push(Label::Root { i, j, c });
        }
    }
    Ok(GradedModel { rd: *rd, x: x.clone(), s, cden, labels })
}

impl GradedModel {
    #[must_use]
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// Matrix positions that may be nonzero.
    #[must_use]
    pub fn support(&self) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for l in &self.labels {
            match *l {
                Label::Root { i, j, .. } => {
                    out.insert((i, j));
                }
                Label::Torus { k, .. } => {
                    out.insert((k, k));
                    if self.rd.ty == GroupType::SL {
                        out.insert((k + 1, k + 1));
                    }
                }
            }
        }
        out
    }

    /// Residue matrix of a coefficient vector.
    pub fn to_matrix(&self, f: &Fq, coeffs: &[Fe]) -> Result<FeMat, RootError> {
        if coeffs.len() != self.dim() {
            return Err(RootError::Shape(format!("expected {} coefficients", self.dim())));
        }
        let n = self.rd.n;
        let mut m = vec![vec![Fe::ZERO; n]; n];
        for (l, &a) in self.labels.iter().zip(coeffs) {
            match *l {
                Label::Root { i, j, .. } => m[i][j] = f.add(m[i][j], a),
                Label::Torus { k, .. } => {
                    m[k][k] = f.add(m[k][k], a);
                    if self.rd.ty == GroupType::SL {
                        m[k + 1][k + 1] = f.sub(m[k + 1][k + 1], a);
                    }
                }
            }
        }
        Ok(m)
    }

    /// Coefficients of a residue matrix; fails off the support or, for
    /// `SL_n`, off the trace-zero locus.
    pub fn from_matrix(&self, f: &Fq, m: &FeMat) -> Result<Vec<Fe>, RootError> {
        let n = self.rd.n;
        let support = self.support();
        for (i, row) in m.iter().enumerate() {
            for (j, &a) in row.iter().enumerate() {
                if !a.is_zero() && !support.contains(&(i, j)) {
                    return Err(RootError::Domain(format!("entry ({i},{j}) is outside the graded piece")));
                }
            }
        }
        let mut out = Vec::with_capacity(self.dim());
        let mut running = Fe::ZERO;
        for l in &self.labels {
            match *l {
                Label::Root { i, j, .. } => out.push(m[i][j]),
                Label::Torus { k, .. } => match self.rd.ty {
                    GroupType::GL => out.push(m[k][k]),
                    GroupType::SL => {
                        running = f.add(running, m[k][k]);
                        out.push(running);
                    }
                },
            }
        }
        if self.rd.ty == GroupType::SL && support.contains(&(0, 0)) {
            let tr = (0..n).fold(Fe::ZERO, |acc, k| f.add(acc, m[k][k]));
            if !tr.is_zero() {
                return Err(RootError::Domain("matrix is not trace zero".into()));
            }
        }
        Ok(out)
    }

    /// Position of a label.
    #[must_use]
    pub fn index_of(&self, l: &Label) -> Option<usize> {
        self.labels.iter().position(|m| m == l)
    }
}

/// Multiplication by a scalar of valuation `v`: every power label moves by
/// `v`, coefficients are kept.
#[must_use]
pub fn shift_by_scalar(model: &GradedModel, v: Rat) -> GradedModel {
    GradedModel {
        rd: model.rd,
        x: model.x.clone(),
        s: model.s + v,
        cden: lcm(model.cden, *v.denom()),
        labels: model.labels.iter().map(|l| l.shifted(v)).collect(),
    }
}

/// Reductive quotient `G_x` and the embedding of its Weyl group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductiveQuotient {
    /// Roots with `<alpha, x>` integral.
    pub roots: Vec<(usize, usize)>,
    /// `W_x` as a subgroup of `S_n`.
    pub weyl: Vec<Perm>,
}

impl ReductiveQuotient {
    #[must_use]
    pub fn is_torus(&self) -> bool {
        self.roots.is_empty()
    }
}

#[must_use]
pub fn reductive_quotient(rd: &RootDatum, x: &ApartmentPoint) -> ReductiveQuotient {
    let roots: Vec<(usize, usize)> =
        rd.roots().into_iter().filter(|&a| x.root_value(a).is_integer()).collect();
    let weyl = rd
        .weyl_group()
        .into_iter()
        .filter(|w| (0..rd.n).all(|i| x.root_value((i, w[i])).is_integer()))
        .collect();
    ReductiveQuotient { roots, weyl }
}

/// An element `h = t^lambda . S . P_sigma` of the (extended) affine Weyl
/// group, with a sign vector making the representative lie in `SL_n` when
/// needed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AffineWeyl {
    pub perm: Perm,
    pub signs: Vec<i8>,
    pub trans: Vec<i64>,
}

impl AffineWeyl {
    #[must_use]
    pub fn identity(n: usize) -> Self {
        Self { perm: (0..n).collect(), signs: vec![1; n], trans: vec![0; n] }
    }

    /// `self * other`.
    #[must_use]
    pub fn compose(&self, other: &Self) -> Self {
        let n = self.perm.len();
        let mut trans = self.trans.clone();
        let mut signs = self.signs.clone();
        for i in 0..n {
            trans[self.perm[i]] += other.trans[i];
            signs[self.perm[i]] *= other.signs[i];
        }
        let perm = (0..n).map(|i| self.perm[other.perm[i]]).collect();
        Self { perm, signs, trans }
    }

    /// `(hx)_{sigma(i)} = x_i - lambda_{sigma(i)}`.
    #[must_use]
    pub fn act_point(&self, x: &ApartmentPoint) -> ApartmentPoint {
        let n = self.perm.len();
        let mut out = vec![Rat::zero(); n];
        for i in 0..n {
            let si = self.perm[i];
            out[si] = x.coords[i] - int(self.trans[si]);
        }
        ApartmentPoint { coords: out }
    }

    /// `Y^ -> (S P) Y^ (S P)^{-1}`.
    #[must_use]
    pub fn act_matrix(&self, f: &Fq, m: &FeMat) -> FeMat {
        let n = self.perm.len();
        let mut out = vec![vec![Fe::ZERO; n]; n];
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (self.perm[i], self.perm[j]);
                let sign = self.signs[a] * self.signs[b];
                out[a][b] = if sign > 0 { m[i][j] } else { f.neg(m[i][j]) };
            }
        }
        out
    }
}

fn transposition(n: usize, a: usize, b: usize) -> Perm {
    let mut p: Perm = (0..n).collect();
    p.swap(a, b);
    p
}

/// Simple affine reflections `s_0, ..., s_{n-1}`, plus `t^{e_1}` and its
/// inverse for `GL_n`.
#[must_use]
pub fn affine_generators(rd: &RootDatum) -> Vec<AffineWeyl> {
    let n = rd.n;
    let reflect = |a: usize, b: usize| {
        let mut signs = vec![1i8; n];
        if rd.ty == GroupType::SL {
            signs[a] = -1;
        }
        AffineWeyl { perm: transposition(n, a, b), signs, trans: vec![0; n] }
    };
    let mut gens: Vec<AffineWeyl> = (0..n.saturating_sub(1)).map(|k| reflect(k, k + 1)).collect();
    if n >= 2 {
        let mut theta = vec![0i64; n];
        theta[0] = 1;
        theta[n - 1] = -1;
        let shift = AffineWeyl { perm: (0..n).collect(), signs: vec![1; n], trans: theta };
        gens.insert(0, shift.compose(&reflect(0, n - 1)));
    }
    if rd.ty == GroupType::GL {
        let mut e1 = vec![0i64; n];
        e1[0] = 1;
        gens.push(AffineWeyl { perm: (0..n).collect(), signs: vec![1; n], trans: e1.clone() });
        e1[0] = -1;
        gens.push(AffineWeyl { perm: (0..n).collect(), signs: vec![1; n], trans: e1 });
    }
    gens
}

/// Distinct affine Weyl elements of word length at most `len`, each with a
/// shortest word in [`affine_generators`] indices, in breadth-first order.
#[must_use]
pub fn affine_weyl_words(rd: &RootDatum, len: usize) -> Vec<(Vec<usize>, AffineWeyl)> {
    let gens = affine_generators(rd);
    let id = AffineWeyl::identity(rd.n);
    let mut seen = BTreeSet::from([id.clone()]);
    let mut out = vec![(Vec::new(), id.clone())];
    let mut queue = VecDeque::from([(Vec::new(), id)]);
    while let Some((word, w)) = queue.pop_front() {
        if word.len() == len {
            continue;
        }
        for (g, h) in gens.iter().enumerate() {
            let next = w.compose(h);
            if seen.insert(next.clone()) {
                let mut wd = word.clone();
                wd.push(g);
                out.push((wd.clone(), next.clone()));
                queue.push_back((wd, next));
            }
        }
    }
    out
}

/// Transport `(x, X)` by `h`: returns the model at `hx` (same grade) and
/// the transported coefficients.
pub fn act_affine_weyl(
    f: &Fq,
    w: &AffineWeyl,
    model: &GradedModel,
    coeffs: &[Fe],
) -> Result<(GradedModel, Vec<Fe>), RootError> {
    let hx = w.act_point(&model.x);
    let target = graded_piece_over(&model.rd, &hx, model.s, model.cden)?;
    let m = w.act_matrix(f, &model.to_matrix(f, coeffs)?);
    let c = target.from_matrix(f, &m)?;
    Ok((target, c))
}

/// A torsion point of the dual torus, entries in `[0, 1)`.
pub type TorsionPoint = Vec<Rat>;

/// Orbit of `v` under a set of permutations, sorted.
#[must_use]
pub fn dual_orbit(rd: &RootDatum, perms: &[Perm], v: &[Rat]) -> Vec<TorsionPoint> {
    let set: BTreeSet<TorsionPoint> = perms.iter().map(|w| rd.dual_act(w, v)).collect();
    set.into_iter().collect()
}

/// Least member of the `W`-orbit of `v` when the orbit is stable under
/// `v -> q v`; `None` otherwise.
#[must_use]
pub fn torsion_canonical(rd: &RootDatum, v: &[Rat], q: i64) -> Option<TorsionPoint> {
    let v: TorsionPoint = v.iter().map(frac).collect();
    let orbit = dual_orbit(rd, &rd.weyl_group(), &v);
    let qv: TorsionPoint = v.iter().map(|x| frac(&(*x * int(q)))).collect();
    if orbit.contains(&qv) {
        orbit.into_iter().next()
    } else {
        None
    }
}

/// `|det(q I - w)|` on the dual lattice; every solution of `q v = w v`
/// has denominator dividing it.
#[must_use]
pub fn frobenius_denominator(rd: &RootDatum, w: &Perm, q: i64) -> i64 {
    let m = rd.dual_weyl_matrix(w);
    let r = m.len();
    let a: Vec<Vec<i64>> =
        (0..r).map(|i| (0..r).map(|j| if i == j { q } else { 0 } - m[j][i]).collect()).collect();
    det(&a).abs()
}

fn det(a: &[Vec<i64>]) -> i64 {
    match a.len() {
        0 => 1,
        1 => a[0][0],
        n => (0..n)
            .map(|c| {
                let minor: Vec<Vec<i64>> =
                    a[1..].iter().map(|row| row.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, &x)| x).collect()).collect();
                let s = if c % 2 == 0 { 1 } else { -1 };
                s * a[0][c] * det(&minor)
            })
            .sum(),
    }
}

/// All vectors in `((1/d)Z / Z)^r`.
#[must_use]
pub fn grid_points(r: usize, d: i64) -> Vec<TorsionPoint> {
    let mut out = vec![Vec::new()];
    for _ in 0..r {
        out = out
            .into_iter()
            .flat_map(|v: TorsionPoint| {
                (0..d).map(move |k| {
                    let mut w = v.clone();
                    w.push(Rat::new(k, d));
                    w
                })
            })
            .collect();
    }
    out
}

/// Canonical orbits of Frobenius-stable torsion points, found by solving
/// `q v = w v` for each `w` in `W`.
#[must_use]
pub fn frobenius_stable_orbits(rd: &RootDatum, q: i64) -> BTreeMap<TorsionPoint, Vec<TorsionPoint>> {
    let w_all = rd.weyl_group();
    let mut out = BTreeMap::new();
    for w in &w_all {
        let d = frobenius_denominator(rd, w, q);
        for v in grid_points(rd.dual_rank(), d) {
            let qv: TorsionPoint = v.iter().map(|x| frac(&(*x * int(q)))).collect();
            if rd.dual_act(w, &v) == qv {
                if let Some(c) = torsion_canonical(rd, &v, q) {
                    out.entry(c).or_insert_with(|| dual_orbit(rd, &w_all, &v));
                }
            }
        }
    }
    out
}

/// Least `d > 0` with `d v` integral.
#[must_use]
pub fn torsion_order(v: &[Rat]) -> i64 {
    v.iter().fold(1, |acc, x| acc.lcm(x.denom()))
}

/// Whether every entry of `v` is reduced into `[0, 1)`.
#[must_use]
pub fn is_reduced(v: &[Rat]) -> bool {
    v.iter().all(|x| !x.is_negative() && *x < Rat::one())
}
