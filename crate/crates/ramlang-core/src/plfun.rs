//! Continuous, strictly increasing, piecewise-linear maps `[0, inf) -> [0, inf)`
//! with exact rational breakpoints.
//!
//! A [`PLFun`] is stored as ascending breakpoints `b_0 = 0 < b_1 < ...` and one
//! slope per segment; the last slope continues to infinity. Adjacent segments
//! with equal slopes are merged, so two equal functions have equal
//! representations and `==` is extensional equality.
//!
//! Herbrand's `phi` has integer slopes; its inverse `psi` has slopes `1/k`, so
//! slopes are rationals here.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::rat::{fmt_rat, Rat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PLFunError {
    Empty,
    FirstBreakNotZero,
    NotAscending,
    LengthMismatch,
    NonPositiveSlope,
}

impl fmt::Display for PLFunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            PLFunError::Empty => "no segments",
            PLFunError::FirstBreakNotZero => "first breakpoint must be 0",
            PLFunError::NotAscending => "breakpoints must be strictly ascending",
            PLFunError::LengthMismatch => "need exactly one slope per breakpoint",
            PLFunError::NonPositiveSlope => "slopes must be positive",
        };
        f.write_str(msg)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PLFun {
    breaks: Vec<Rat>,
    slopes: Vec<Rat>,
}

impl PLFun {
    pub fn new(breaks: Vec<Rat>, slopes: Vec<Rat>) -> Result<Self, PLFunError> {
        if breaks.is_empty() {
            return Err(PLFunError::Empty);
        }
        if breaks.len() != slopes.len() {
            return Err(PLFunError::LengthMismatch);
        }
        if !breaks[0].is_zero() {
            return Err(PLFunError::FirstBreakNotZero);
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(PLFunError::NotAscending);
        }
        if slopes.iter().any(|s| *s <= Rat::zero()) {
            return Err(PLFunError::NonPositiveSlope);
        }
        Ok(Self::merged(breaks, slopes))
    }

    #[must_use]
    pub fn identity() -> Self {
        Self { breaks: vec![Rat::zero()], slopes: vec![Rat::one()] }
    }

    fn merged(breaks: Vec<Rat>, slopes: Vec<Rat>) -> Self {
        let mut b = Vec::with_capacity(breaks.len());
        let mut s: Vec<Rat> = Vec::with_capacity(slopes.len());
        for (x, m) in breaks.into_iter().zip(slopes) {
            if s.last() == Some(&m) {
                continue;
            }
            b.push(x);
            s.push(m);
        }
        Self { breaks: b, slopes: s }
    }

    #[must_use]
    pub fn breaks(&self) -> &[Rat] {
        &self.breaks
    }

    #[must_use]
    pub fn slopes(&self) -> &[Rat] {
        &self.slopes
    }

    /// Last point where the slope changes (0 for a linear map).
    #[must_use]
    pub fn last_break(&self) -> Rat {
        *self.breaks.last().expect("nonempty")
    }

    #[must_use]
    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    /// Values at the breakpoints.
    fn knot_values(&self) -> Vec<Rat> {
        let mut out = Vec::with_capacity(self.breaks.len());
        let mut acc = Rat::zero();
        out.push(acc);
        for i in 1..self.breaks.len() {
            acc += self.slopes[i - 1] * (self.breaks[i] - self.breaks[i - 1]);
            out.push(acc);
        }
        out
    }

    /// `f(x)`; negative arguments are passed through unchanged.
    #[must_use]
    pub fn eval(&self, x: Rat) -> Rat {
        if x < Rat::zero() {
            return x;
        }
        let vals = self.knot_values();
        let i = match self.breaks.binary_search(&x) {
            Ok(i) => return vals[i],
            Err(i) => i - 1,
        };
        vals[i] + self.slopes[i] * (x - self.breaks[i])
    }

    /// Slope on the segment starting at or containing `x` (right derivative).
    #[must_use]
    pub fn slope_at(&self, x: Rat) -> Rat {
        let i = match self.breaks.binary_search(&x) {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        };
        self.slopes[i]
    }

    /// Exact functional inverse.
    #[must_use]
    pub fn inverse(&self) -> Self {
        let vals = self.knot_values();
        let slopes = self.slopes.iter().map(|m| m.recip()).collect();
        Self::merged(vals, slopes)
    }

    /// `self ∘ inner`.
    #[must_use]
    pub fn compose(&self, inner: &PLFun) -> Self {
        let inner_inv = inner.inverse();
        let mut pts: Vec<Rat> = inner.breaks.clone();
        for b in &self.breaks {
            pts.push(inner_inv.eval(*b));
        }
        pts.sort();
        pts.dedup();
        let slopes = pts
            .iter()
            .map(|&x| self.slope_at(inner.eval(x)) * inner.slope_at(x))
            .collect();
        Self::merged(pts, slopes)
    }

    /// `(breakpoint, slope)` rows for external plotting.
    #[must_use]
    pub fn segments(&self) -> Vec<(Rat, Rat)> {
        self.breaks.iter().copied().zip(self.slopes.iter().copied()).collect()
    }
}

impl fmt::Display for PLFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (b, m)) in self.breaks.iter().zip(&self.slopes).enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "[{}: slope {}]", fmt_rat(b), fmt_rat(m))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};
    use proptest::prelude::*;

    fn as_cubic_phi() -> PLFun {
        PLFun::new(vec![int(0), rat(1, 3)], vec![int(3), int(1)]).unwrap()
    }

    #[test]
    fn eval_and_inverse_on_two_segment_map() {
        let phi = as_cubic_phi();
        assert_eq!(phi.eval(rat(1, 3)), int(1));
        assert_eq!(phi.eval(int(2)), rat(8, 3));
        let psi = phi.inverse();
        assert_eq!(psi.eval(rat(1, 2)), rat(1, 6));
        assert_eq!(psi.breaks(), &[int(0), int(1)]);
        assert_eq!(psi.slopes(), &[rat(1, 3), int(1)]);
    }

    #[test]
    fn rejects_malformed() {
        assert_eq!(PLFun::new(vec![int(1)], vec![int(1)]), Err(PLFunError::FirstBreakNotZero));
        assert_eq!(
            PLFun::new(vec![int(0), int(0)], vec![int(1), int(1)]),
            Err(PLFunError::NotAscending)
        );
        assert_eq!(PLFun::new(vec![int(0)], vec![int(0)]), Err(PLFunError::NonPositiveSlope));
    }

    #[test]
    fn merging_makes_equality_extensional() {
        let f = PLFun::new(vec![int(0), int(1)], vec![int(2), int(2)]).unwrap();
        let g = PLFun::new(vec![int(0)], vec![int(2)]).unwrap();
        assert_eq!(f, g);
    }

    fn arb_plfun() -> impl Strategy<Value = PLFun> {
        prop::collection::vec((1i64..6, 1i64..5, 1i64..4), 1..5).prop_map(|segs| {
            let mut breaks = vec![int(0)];
            let mut slopes = Vec::new();
            for (i, (len_n, slope_n, slope_d)) in segs.iter().enumerate() {
                if i > 0 {
                    let last = *breaks.last().unwrap();
                    breaks.push(last + rat(*len_n, 3));
                }
                slopes.push(rat(*slope_n, *slope_d));
            }
            PLFun::new(breaks, slopes).unwrap()
        })
    }

    proptest! {
        #[test]
        fn inverse_is_two_sided(f in arb_plfun(), n in 0i64..60) {
            let x = rat(n, 6);
            let g = f.inverse();
            prop_assert_eq!(g.eval(f.eval(x)), x);
            prop_assert_eq!(f.eval(g.eval(x)), x);
        }

        #[test]
        fn compose_matches_pointwise(f in arb_plfun(), g in arb_plfun(), n in 0i64..60) {
            let x = rat(n, 12);
            prop_assert_eq!(f.compose(&g).eval(x), f.eval(g.eval(x)));
        }

        #[test]
        fn inverse_of_composite(f in arb_plfun(), g in arb_plfun()) {
            prop_assert_eq!(f.compose(&g).inverse(), g.inverse().compose(&f.inverse()));
        }
    }
}
