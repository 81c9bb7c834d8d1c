//! Truncated Laurent series `sum a_n T^n + O(T^prec)` over a finite field.
//!
//! Precision is absolute and tracked pessimistically: every operation returns
//! the largest precision that is guaranteed by the inputs. A series whose
//! known coefficients all vanish is "zero to precision"; its valuation is
//! unknown and asking for it is an error.

use alloc::vec;
use alloc::vec::Vec;

use crate::fq::{Fe, Fq};

/// Precision used for exactly known constants.
pub const EXACT: i64 = i64::MAX / 8;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Series {
    val: i64,
    coeffs: Vec<Fe>,
    prec: i64,
}

impl Series {
    /// Build from coefficients of `T^start, T^{start+1}, ...`, known to `prec`.
    #[must_use]
    pub fn from_coeffs(start: i64, coeffs: Vec<Fe>, prec: i64) -> Self {
        let mut s = Self { val: start, coeffs, prec };
        s.normalize();
        s
    }

    #[must_use]
    pub fn zero(prec: i64) -> Self {
        Self { val: prec, coeffs: Vec::new(), prec }
    }

    #[must_use]
    pub fn monomial(c: Fe, n: i64, prec: i64) -> Self {
        Self::from_coeffs(n, vec![c], prec)
    }

    #[must_use]
    pub fn one(prec: i64) -> Self {
        Self::monomial(Fe::ONE, 0, prec)
    }

    /// The variable `T`.
    #[must_use]
    pub fn var(prec: i64) -> Self {
        Self::monomial(Fe::ONE, 1, prec)
    }

    fn normalize(&mut self) {
        let keep = (self.prec - self.val).max(0) as usize;
        self.coeffs.truncate(keep);
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            Some(k) => {
                self.coeffs.drain(..k);
                self.val += k as i64;
                while self.coeffs.last().is_some_and(|c| c.is_zero()) {
                    self.coeffs.pop();
                }
            }
            None => {
                self.coeffs.clear();
                self.val = self.prec;
            }
        }
    }

    #[must_use]
    pub fn prec(&self) -> i64 {
        self.prec
    }

    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Valuation, or `None` if zero to precision.
    #[must_use]
    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.val)
    }

    /// Leading coefficient, if any.
    #[must_use]
    pub fn leading(&self) -> Option<Fe> {
        self.coeffs.first().copied()
    }

    /// Coefficient of `T^n`; `None` if `n` is at or beyond the precision.
    #[must_use]
    pub fn coeff(&self, n: i64) -> Option<Fe> {
        if n >= self.prec {
            return None;
        }
        if n < self.val {
            return Some(Fe::ZERO);
        }
        Some(self.coeffs.get((n - self.val) as usize).copied().unwrap_or(Fe::ZERO))
    }

    /// `(exponent, coefficient)` for every nonzero known term.
    pub fn terms(&self) -> impl Iterator<Item = (i64, Fe)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, &c)| (self.val + i as i64, c))
    }

    /// Lower the precision to `min(prec, p)`.
    #[must_use]
    pub fn truncate(&self, p: i64) -> Self {
        let mut s = self.clone();
        s.prec = s.prec.min(p);
        s.normalize();
        s
    }

    #[must_use]
    pub fn add(&self, f: &Fq, o: &Series) -> Series {
        let prec = self.prec.min(o.prec);
        let start = self.val.min(o.val);
        if start >= prec {
            return Series::zero(prec);
        }
        let end = [self, o]
            .iter()
            .filter(|s| !s.is_zero())
            .map(|s| s.val + s.coeffs.len() as i64)
            .max()
            .unwrap_or(start);
        let len = (prec.min(end) - start).max(0) as usize;
        let mut c = vec![Fe::ZERO; len];
        for s in [self, o] {
            for (i, &a) in s.coeffs.iter().enumerate() {
                let k = (s.val - start) as usize + i;
                if k < len {
                    c[k] = f.add(c[k], a);
                }
            }
        }
        Series::from_coeffs(start, c, prec)
    }

    #[must_use]
    pub fn neg(&self, f: &Fq) -> Series {
        let coeffs = self.coeffs.iter().map(|&a| f.neg(a)).collect();
        Series { val: self.val, coeffs, prec: self.prec }
    }

    #[must_use]
    pub fn sub(&self, f: &Fq, o: &Series) -> Series {
        self.add(f, &o.neg(f))
    }

    #[must_use]
    pub fn scale(&self, f: &Fq, c: Fe) -> Series {
        if c.is_zero() {
            return Series::zero(self.prec);
        }
        let coeffs = self.coeffs.iter().map(|&a| f.mul(a, c)).collect();
        Series { val: self.val, coeffs, prec: self.prec }
    }

    /// Multiply by `T^k`.
    #[must_use]
    pub fn shift(&self, k: i64) -> Series {
        Series { val: self.val + k, coeffs: self.coeffs.clone(), prec: self.prec + k }
    }

    #[must_use]
    pub fn mul(&self, f: &Fq, o: &Series) -> Series {
        let prec = (self.val + o.prec).min(o.val + self.prec);
        let start = self.val + o.val;
        if start >= prec || self.is_zero() || o.is_zero() {
            return Series::zero(prec);
        }
        let len = ((prec - start) as usize).min(self.coeffs.len() + o.coeffs.len() - 1);
        let mut c = vec![Fe::ZERO; len];
        for (i, &a) in self.coeffs.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate().take(len - i) {
                c[i + j] = f.add(c[i + j], f.mul(a, b));
            }
        }
        Series::from_coeffs(start, c, prec)
    }

    /// Multiplicative inverse; `None` if zero to precision.
    #[must_use]
    pub fn inv(&self, f: &Fq) -> Option<Series> {
        let v = self.valuation()?;
        let rel = self.prec - v;
        let a0inv = f.inv(self.coeffs[0]).expect("leading coefficient is nonzero");
        if self.coeffs.len() == 1 {
            return Some(Series::monomial(a0inv, -v, self.prec - 2 * v));
        }
        assert!(rel < 1 << 24, "inverse of an exact non-monomial needs a precision cap");
        let len = rel as usize;
        let mut out = vec![Fe::ZERO; len];
        out[0] = a0inv;
        for n in 1..len {
            let mut acc = Fe::ZERO;
            for k in 1..=n.min(self.coeffs.len() - 1) {
                acc = f.add(acc, f.mul(self.coeffs[k], out[n - k]));
            }
            out[n] = f.neg(f.mul(acc, a0inv));
        }
        Some(Series::from_coeffs(-v, out, self.prec - 2 * v))
    }

    #[must_use]
    pub fn div(&self, f: &Fq, o: &Series) -> Option<Series> {
        o.inv(f).map(|oi| self.mul(f, &oi))
    }

    /// `self^k` for any integer `k`; `None` only for negative powers of zero.
    #[must_use]
    pub fn pow(&self, f: &Fq, k: i64) -> Option<Series> {
        if k < 0 {
            return self.inv(f)?.pow(f, -k);
        }
        let mut result = Series::one(EXACT);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(f, &base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(f, &base);
            }
        }
        Some(result)
    }

    /// Apply `a -> a^{p^j}` to every coefficient.
    #[must_use]
    pub fn frob(&self, f: &Fq, j: u32) -> Series {
        if j.is_multiple_of(f.degree()) {
            return self.clone();
        }
        let coeffs = self.coeffs.iter().map(|&a| f.frob(a, j)).collect();
        Series { val: self.val, coeffs, prec: self.prec }
    }

    /// Apply `a -> a^{p^j}` to the coefficients, then substitute `T -> g`.
    /// `g` must have positive valuation.
    #[must_use]
    pub fn compose_frob(&self, f: &Fq, j: u32, g: &Series) -> Option<Series> {
        let vg = g.valuation()?;
        debug_assert!(vg > 0);
        let cap = if self.prec >= 0 {
            self.prec.saturating_mul(vg)
        } else {
            // for negative precision the error term is O(g^prec), valuation prec * vg
            self.prec * vg
        };
        if self.is_zero() {
            return Some(Series::zero(cap));
        }
        let mut acc = Series::zero(EXACT);
        for &a in self.coeffs.iter().rev() {
            acc = acc.mul(f, g).add(f, &Series::monomial(f.frob(a, j), 0, EXACT));
        }
        let lead = g.pow(f, self.val)?;
        Some(acc.mul(f, &lead).truncate(cap))
    }

    /// Substitute `T -> g`.
    #[must_use]
    pub fn compose(&self, f: &Fq, g: &Series) -> Option<Series> {
        self.compose_frob(f, 0, g)
    }

    /// The unique `m`-th root congruent to `1` of a series `1 + O(T)`,
    /// for `m` prime to the characteristic.
    #[must_use]
    pub fn one_unit_root(&self, f: &Fq, m: u32) -> Option<Series> {
        if self.valuation() != Some(0) || self.leading() != Some(Fe::ONE) || m.is_multiple_of(f.p()) {
            return None;
        }
        let minv = f.inv(f.from_int(m as i64))?;
        let mut r = Series::one(self.prec);
        let mut known = 1i64;
        while known < self.prec {
            // r <- r - (r^m - a) / (m r^{m-1})
            let rm1 = r.pow(f, m as i64 - 1)?;
            let err = rm1.mul(f, &r).sub(f, self);
            let step = err.div(f, &rm1)?.scale(f, minv);
            r = r.sub(f, &step).truncate(self.prec);
            known *= 2;
        }
        Some(r)
    }

    /// Whether `self - o` is zero to the common precision.
    #[must_use]
    pub fn eq_to_prec(&self, f: &Fq, o: &Series) -> bool {
        self.sub(f, o).is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f9() -> Fq {
        Fq::new(3, 2).unwrap()
    }

    fn series(f: &Fq, start: i64, codes: &[u32], prec: i64) -> Series {
        let c = codes.iter().map(|&k| f.from_code(k % f.order()).unwrap()).collect();
        Series::from_coeffs(start, c, prec)
    }

    #[test]
    fn geometric_inverse() {
        let f = Fq::new(3, 1).unwrap();
        let one_minus_t = series(&f, 0, &[1, 2], 10);
        let inv = one_minus_t.inv(&f).unwrap();
        assert_eq!(inv.prec(), 10);
        for n in 0..10 {
            assert_eq!(inv.coeff(n), Some(Fe::ONE));
        }
    }

    #[test]
    fn precision_is_pessimistic() {
        let f = f9();
        let a = series(&f, 1, &[1, 1], 8);
        let b = series(&f, 2, &[1], 5);
        assert_eq!(a.mul(&f, &b).prec(), 6);
        assert_eq!(a.add(&f, &b).prec(), 5);
        assert_eq!(a.inv(&f).unwrap().prec(), 6);
        assert!(Series::zero(4).valuation().is_none());
    }

    #[test]
    fn root_of_one_unit() {
        let f = Fq::new(5, 1).unwrap();
        let a = series(&f, 0, &[1, 3, 0, 2], 20);
        let r = a.one_unit_root(&f, 4).unwrap();
        assert!(r.pow(&f, 4).unwrap().eq_to_prec(&f, &a));
        assert_eq!(r.leading(), Some(Fe::ONE));
    }

    #[test]
    fn compose_substitutes() {
        let f = Fq::new(3, 1).unwrap();
        // (1 + T) o (T + T^2) = 1 + T + T^2
        let s = series(&f, 0, &[1, 1], 10);
        let g = series(&f, 1, &[1, 1], 10);
        let c = s.compose(&f, &g).unwrap();
        assert_eq!(c.coeff(2), Some(Fe::ONE));
        assert_eq!(c.coeff(3), Some(Fe::ZERO));
    }

    fn arb(f: &Fq) -> impl Strategy<Value = Series> {
        let f = f.clone();
        (-2i64..3, prop::collection::vec(0u32..9, 1..8)).prop_map(move |(v, mut c)| {
            if c[0] % 9 == 0 {
                c[0] = 1;
            }
            series(&f, v, &c, v + 12)
        })
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb(&f9()), b in arb(&f9()), c in arb(&f9())) {
            let f = f9();
            let lhs = a.mul(&f, &b.add(&f, &c));
            let rhs = a.mul(&f, &b).add(&f, &a.mul(&f, &c));
            prop_assert!(lhs.eq_to_prec(&f, &rhs));
            prop_assert!(a.mul(&f, &b).eq_to_prec(&f, &b.mul(&f, &a)));
            let q = a.div(&f, &b).unwrap();
            prop_assert!(q.mul(&f, &b).eq_to_prec(&f, &a));
        }

        #[test]
        fn valuation_is_additive(a in arb(&f9()), b in arb(&f9())) {
            let f = f9();
            let (va, vb) = (a.valuation().unwrap(), b.valuation().unwrap());
            prop_assert_eq!(a.mul(&f, &b).valuation(), Some(va + vb));
            let s = a.add(&f, &b);
            if let Some(vs) = s.valuation() {
                prop_assert!(vs >= va.min(vb));
                if va != vb {
                    prop_assert_eq!(vs, va.min(vb));
                }
            }
        }
    }
}
