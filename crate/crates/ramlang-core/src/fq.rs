//! Small finite fields `F_{p^n}` with Zech-logarithm arithmetic.
//!
//! Elements are stored as discrete logarithms to a fixed primitive element
//! `g` (the class of `x` modulo the defining polynomial), so multiplication is
//! addition of exponents and addition goes through the Zech table
//! `Z(k) = log(1 + g^k)`. The external encoding of an element is its *code*:
//! the integer whose base-`p` digits are the polynomial coefficients,
//! constant term first. For `n = 1` the code is the residue itself.
//!
//! Defining polynomials come from a small table of Conway polynomials; every
//! entry is re-verified to be primitive when the field is built, and if an
//! entry fails (or is missing) the lexicographically first primitive
//! polynomial is used instead.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// A field element, stored as a discrete log (or the zero marker).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fe(u32);

const ZERO_LOG: u32 = u32::MAX;

impl Fe {
    pub const ZERO: Fe = Fe(ZERO_LOG);
    pub const ONE: Fe = Fe(0);

    #[must_use]
    pub fn is_zero(self) -> bool {
        self.0 == ZERO_LOG
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FqError {
    NotPrime(u32),
    TooLarge { p: u32, n: u32 },
    BadCode(u32),
}

impl fmt::Display for FqError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FqError::NotPrime(p) => write!(f, "{p} is not prime"),
            FqError::TooLarge { p, n } => write!(f, "F_{p}^{n} is larger than supported"),
            FqError::BadCode(c) => write!(f, "{c} does not encode a field element"),
        }
    }
}

const MAX_ORDER: u64 = 1 << 16;

/// Conway polynomials, coefficients from the constant term up, leading 1
/// omitted.
fn conway(p: u32, n: u32) -> Option<&'static [u32]> {
    let table: &[(u32, u32, &[u32])] = &[
        (2, 1, &[1]),
        (2, 2, &[1, 1]),
        (2, 3, &[1, 1, 0]),
        (2, 4, &[1, 1, 0, 0]),
        (2, 5, &[1, 0, 1, 0, 0]),
        (2, 6, &[1, 1, 0, 1, 1, 0]),
        (2, 8, &[1, 0, 1, 1, 1, 0, 0, 0]),
        (3, 1, &[1]),
        (3, 2, &[2, 2]),
        (3, 3, &[1, 2, 0]),
        (3, 4, &[2, 0, 0, 2]),
        (3, 6, &[2, 2, 1, 0, 2, 0]),
        (5, 1, &[3]),
        (5, 2, &[2, 4]),
        (5, 3, &[3, 3, 0]),
        (5, 4, &[2, 4, 4, 0]),
        (7, 1, &[4]),
        (7, 2, &[3, 6]),
        (7, 3, &[4, 0, 6]),
        (11, 1, &[9]),
        (11, 2, &[2, 7]),
        (13, 1, &[11]),
        (13, 2, &[2, 12]),
    ];
    table.iter().find(|(pp, nn, _)| *pp == p && *nn == n).map(|(_, _, c)| *c)
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fq {
    p: u32,
    n: u32,
    q: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
    neg_one: u32,
}

/// Powers of `x` modulo `lower` (monic, leading term implicit), as codes; `None`
/// unless `x` has multiplicative order exactly `p^n - 1`.
fn power_table(p: u32, n: u32, lower: &[u32]) -> Option<Vec<u32>> {
    let q = p.pow(n);
    let mut cur = vec![0u32; n as usize];
    cur[0] = 1;
    let encode = |d: &[u32]| d.iter().rev().fold(0u32, |acc, &x| acc * p + x);
    let mut exp = Vec::with_capacity((q - 1) as usize);
    let mut seen = vec![false; q as usize];
    for _ in 0..q - 1 {
        let code = encode(&cur);
        if code == 0 || seen[code as usize] {
            return None;
        }
        seen[code as usize] = true;
        exp.push(code);
        // multiply by x and reduce by the monic modulus
        let top = cur[n as usize - 1];
        for i in (1..n as usize).rev() {
            cur[i] = cur[i - 1];
        }
        cur[0] = 0;
        for i in 0..n as usize {
            cur[i] = (cur[i] + p * p - top * lower[i] % p) % p;
        }
    }
    (encode(&cur) == 1).then_some(exp)
}

impl Fq {
    pub fn new(p: u32, n: u32) -> Result<Self, FqError> {
        if !is_prime(p) {
            return Err(FqError::NotPrime(p));
        }
        if n == 0 || (p as u64).pow(n) > MAX_ORDER {
            return Err(FqError::TooLarge { p, n });
        }
        let q = p.pow(n);
        let (lower, exp) = match conway(p, n).and_then(|c| power_table(p, n, c).map(|e| (c.to_vec(), e))) {
            Some(found) => found,
            None => Self::search_primitive(p, n),
        };
        let mut log = vec![ZERO_LOG; q as usize];
        for (k, &c) in exp.iter().enumerate() {
            log[c as usize] = k as u32;
        }
        let mut field = Self {
            p,
            n,
            q,
            modulus: lower,
            exp,
            log,
            zech: Vec::new(),
            neg_one: 0,
        };
        field.zech = (0..q - 1)
            .map(|k| {
                let code = field.add_codes(1, field.exp[k as usize]);
                field.log[code as usize]
            })
            .collect();
        field.neg_one = if p == 2 { 0 } else { (q - 1) / 2 };
        Ok(field)
    }

    fn search_primitive(p: u32, n: u32) -> (Vec<u32>, Vec<u32>) {
        let q = p.pow(n);
        for code in 0..q {
            let lower: Vec<u32> = (0..n).map(|i| (code / p.pow(i)) % p).collect();
            if lower[0] == 0 {
                continue;
            }
            if let Some(exp) = power_table(p, n, &lower) {
                return (lower, exp);
            }
        }
        unreachable!("a primitive polynomial exists over every prime field")
    }

    fn add_codes(&self, a: u32, b: u32) -> u32 {
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.n {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    #[must_use]
    pub fn p(&self) -> u32 {
        self.p
    }

    /// Degree over the prime field.
    #[must_use]
    pub fn degree(&self) -> u32 {
        self.n
    }

    #[must_use]
    pub fn order(&self) -> u32 {
        self.q
    }

    /// Defining polynomial, constant term first, including the leading 1.
    #[must_use]
    pub fn modulus(&self) -> Vec<u32> {
        let mut m = self.modulus.clone();
        m.push(1);
        m
    }

    #[must_use]
    pub fn primitive(&self) -> Fe {
        if self.q == 2 {
            Fe::ONE
        } else {
            Fe(1 % (self.q - 1))
        }
    }

    #[must_use]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        let m = self.q - 1;
        let d = (b.0 + m - a.0) % m;
        let z = self.zech[d as usize];
        if z == ZERO_LOG {
            Fe::ZERO
        } else {
            Fe((a.0 + z) % m)
        }
    }

    #[must_use]
    pub fn neg(&self, a: Fe) -> Fe {
        if a.is_zero() {
            a
        } else {
            Fe((a.0 + self.neg_one) % (self.q - 1))
        }
    }

    #[must_use]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[must_use]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.is_zero() || b.is_zero() {
            Fe::ZERO
        } else {
            Fe(((a.0 as u64 + b.0 as u64) % (self.q as u64 - 1)) as u32)
        }
    }

    /// Multiplicative inverse; `None` for zero.
    #[must_use]
    pub fn inv(&self, a: Fe) -> Option<Fe> {
        (!a.is_zero()).then(|| Fe((self.q - 1 - a.0) % (self.q - 1)))
    }

    #[must_use]
    pub fn div(&self, a: Fe, b: Fe) -> Option<Fe> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    /// `a^k` for any integer `k` (zero only to positive powers).
    #[must_use]
    pub fn pow(&self, a: Fe, k: i64) -> Fe {
        if a.is_zero() {
            return if k == 0 { Fe::ONE } else { Fe::ZERO };
        }
        let m = (self.q - 1) as i64;
        Fe(((a.0 as i64 * k.rem_euclid(m)) % m) as u32)
    }

    /// `a^{p^j}`.
    #[must_use]
    pub fn frob(&self, a: Fe, j: u32) -> Fe {
        let pj = (self.p as u64).pow(j % self.n.max(1)) as i64;
        self.pow(a, pj)
    }

    /// Image of an integer under `Z -> F_p -> F_q`.
    #[must_use]
    pub fn from_int(&self, k: i64) -> Fe {
        let r = k.rem_euclid(self.p as i64) as u32;
        self.from_code(r).expect("residue below p is a valid code")
    }

    pub fn from_code(&self, code: u32) -> Result<Fe, FqError> {
        if code >= self.q {
            return Err(FqError::BadCode(code));
        }
        Ok(if code == 0 { Fe::ZERO } else { Fe(self.log[code as usize]) })
    }

    #[must_use]
    pub fn code(&self, a: Fe) -> u32 {
        if a.is_zero() {
            0
        } else {
            self.exp[a.0 as usize]
        }
    }

    /// Polynomial coefficients, constant first, length `n`.
    #[must_use]
    pub fn digits(&self, a: Fe) -> Vec<u32> {
        let mut c = self.code(a);
        (0..self.n)
            .map(|_| {
                let d = c % self.p;
                c /= self.p;
                d
            })
            .collect()
    }

    pub fn from_digits(&self, d: &[u32]) -> Result<Fe, FqError> {
        if d.len() > self.n as usize || d.iter().any(|&x| x >= self.p) {
            return Err(FqError::BadCode(u32::MAX));
        }
        let code = d.iter().rev().fold(0u32, |acc, &x| acc * self.p + x);
        self.from_code(code)
    }

    /// Value in `0..p` of an element of the prime field.
    #[must_use]
    pub fn prime_value(&self, a: Fe) -> Option<u32> {
        let c = self.code(a);
        (c < self.p).then_some(c)
    }

    /// All elements ordered by code.
    #[must_use]
    pub fn elements(&self) -> Vec<Fe> {
        (0..self.q).map(|c| self.from_code(c).expect("in range")).collect()
    }

    #[must_use]
    pub fn in_subfield(&self, a: Fe, d: u32) -> bool {
        self.frob(a, d) == a
    }

    /// Elements of `F_{p^d}`, ordered by code; empty unless `d | n`.
    #[must_use]
    pub fn subfield(&self, d: u32) -> Vec<Fe> {
        if d == 0 || !self.n.is_multiple_of(d) {
            return Vec::new();
        }
        self.elements().into_iter().filter(|&a| self.in_subfield(a, d)).collect()
    }

    /// An `F_p`-basis of `F_{p^d}` (powers of a generator of its unit group).
    #[must_use]
    pub fn subfield_basis(&self, d: u32) -> Vec<Fe> {
        let step = (self.q - 1) / (self.p.pow(d) - 1);
        let h = Fe(step % (self.q - 1));
        (0..d).map(|i| self.pow(h, i as i64)).collect()
    }

    /// `Tr_{F_{p^d}/F_p}(a)` as a residue in `0..p`, for `a` in `F_{p^d}`.
    #[must_use]
    pub fn trace_to_prime(&self, a: Fe, d: u32) -> u32 {
        let mut acc = Fe::ZERO;
        for j in 0..d {
            acc = self.add(acc, self.frob(a, j));
        }
        self.prime_value(acc).expect("trace lands in the prime field")
    }

    /// `m`-th roots of `a` lying in `F_{p^d}`, ordered by code.
    #[must_use]
    pub fn roots(&self, a: Fe, m: u32, d: u32) -> Vec<Fe> {
        let mut out: Vec<Fe> =
            self.subfield(d).into_iter().filter(|&x| self.pow(x, m as i64) == a).collect();
        out.sort_by_key(|&x| self.code(x));
        out
    }

    /// Coordinates of `a` over `F_p` in the polynomial basis.
    #[must_use]
    pub fn coords(&self, a: Fe) -> Vec<u32> {
        self.digits(a)
    }

    /// An embedding of `self` into `big`, as the image of every element in
    /// code order. Sends the primitive element `x` to the root of the defining
    /// polynomial with least code in `big`.
    #[must_use]
    pub fn embed_into(&self, big: &Fq) -> Option<Vec<Fe>> {
        if self.p != big.p || !big.n.is_multiple_of(self.n) {
            return None;
        }
        let poly = self.modulus();
        let eval = |x: Fe| {
            poly.iter().rev().fold(Fe::ZERO, |acc, &c| big.add(big.mul(acc, x), big.from_int(c as i64)))
        };
        let root = big.elements().into_iter().find(|&x| !x.is_zero() && eval(x).is_zero())?;
        let mut img = vec![Fe::ZERO; self.q as usize];
        for code in 1..self.q {
            let k = self.log[code as usize] as i64;
            img[code as usize] = big.pow(root, k);
        }
        Some(img)
    }

    /// Map an element through a table produced by [`Fq::embed_into`].
    #[must_use]
    pub fn apply_embedding(&self, table: &[Fe], a: Fe) -> Fe {
        table[self.code(a) as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn conway_entries_verify() {
        for (p, n) in [(2, 2), (2, 3), (3, 2), (3, 3), (3, 4), (5, 2), (7, 2)] {
            let f = Fq::new(p, n).unwrap();
            assert_eq!(f.modulus()[..n as usize], conway(p, n).unwrap()[..]);
        }
    }

    #[test]
    fn prime_field_codes_are_residues() {
        let f = Fq::new(5, 1).unwrap();
        for k in 0..5 {
            assert_eq!(f.code(f.from_int(k)), k as u32);
        }
        assert_eq!(f.add(f.from_int(3), f.from_int(4)), f.from_int(2));
        assert_eq!(f.mul(f.from_int(3), f.from_int(4)), f.from_int(2));
        assert_eq!(f.neg(f.from_int(1)), f.from_int(4));
    }

    #[test]
    fn f9_arithmetic() {
        let f = Fq::new(3, 2).unwrap();
        let g = f.primitive();
        assert_eq!(f.pow(g, 8), Fe::ONE);
        assert_ne!(f.pow(g, 4), Fe::ONE);
        // x^2 = -2x - 2 = x + 1 under x^2 + 2x + 2
        assert_eq!(f.digits(f.mul(g, g)), vec![1, 1]);
        assert_eq!(f.subfield(1).len(), 3);
        assert_eq!(f.roots(f.from_int(-1), 2, 2).len(), 2);
        assert!(f.roots(f.from_int(-1), 2, 1).is_empty());
    }

    #[test]
    fn embedding_is_a_ring_map() {
        let small = Fq::new(3, 2).unwrap();
        let big = Fq::new(3, 4).unwrap();
        let t = small.embed_into(&big).unwrap();
        for a in small.elements() {
            for b in small.elements() {
                let s = small.apply_embedding(&t, small.add(a, b));
                assert_eq!(s, big.add(small.apply_embedding(&t, a), small.apply_embedding(&t, b)));
                let m = small.apply_embedding(&t, small.mul(a, b));
                assert_eq!(m, big.mul(small.apply_embedding(&t, a), small.apply_embedding(&t, b)));
            }
        }
    }

    fn field() -> impl Strategy<Value = Fq> {
        prop::sample::select(vec![(2u32, 3u32), (3, 2), (5, 1), (5, 2), (7, 1)])
            .prop_map(|(p, n)| Fq::new(p, n).unwrap())
    }

    proptest! {
        #[test]
        fn field_axioms(f in field(), a in 0u32..64, b in 0u32..64, c in 0u32..64) {
            let q = f.order();
            let (a, b, c) = (
                f.from_code(a % q).unwrap(),
                f.from_code(b % q).unwrap(),
                f.from_code(c % q).unwrap(),
            );
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            prop_assert_eq!(f.add(a, f.neg(a)), Fe::ZERO);
            prop_assert_eq!(f.frob(f.add(a, b), 1), f.add(f.frob(a, 1), f.frob(b, 1)));
            if !a.is_zero() {
                prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), Fe::ONE);
            }
        }
    }
}
