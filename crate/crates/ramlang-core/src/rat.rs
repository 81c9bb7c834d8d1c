//! Exact rationals and the small helpers the rest of the crate leans on.

use alloc::format;
use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;

use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Reduced fraction with positive denominator.
pub type Rat = num_rational::Ratio<i64>;

/// Shorthand constructor; panics on a zero denominator.
#[must_use]
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(num, den)
}

#[must_use]
pub fn int(n: i64) -> Rat {
    Rat::from_integer(n)
}

/// Always `num/den`, including integers (`2/1`).
#[must_use]
pub fn fmt_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRatError(pub String);

impl fmt::Display for ParseRatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot parse rational from {:?}", self.0)
    }
}

/// Accepts `n`, `n/d` and surrounding whitespace.
pub fn parse_rat(s: &str) -> Result<Rat, ParseRatError> {
    let err = || ParseRatError(String::from(s));
    let s = s.trim();
    match s.split_once('/') {
        None => s.parse::<i64>().map(int).map_err(|_| err()),
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| err())?;
            let d: i64 = d.trim().parse().map_err(|_| err())?;
            if d == 0 {
                return Err(err());
            }
            Ok(rat(n, d))
        }
    }
}

/// Representative of `r mod 1` in `[0, 1)`.
#[must_use]
pub fn frac(r: &Rat) -> Rat {
    r - r.floor()
}

/// Whether `r` lies in `(1/e) Z`.
#[must_use]
pub fn on_grid(r: &Rat, e: i64) -> bool {
    (r * int(e)).is_integer()
}

/// `r * e`, which must be an integer.
#[must_use]
pub fn grid_index(r: &Rat, e: i64) -> Option<i64> {
    let x = r * int(e);
    x.is_integer().then(|| x.to_integer())
}

/// Whether `r` lies in `Z_(p)`, i.e. its denominator is prime to `p`.
#[must_use]
pub fn is_p_integral(r: &Rat, p: i64) -> bool {
    r.denom().gcd(&p) == 1
}

#[must_use]
pub fn lcm(a: i64, b: i64) -> i64 {
    if a == 0 || b == 0 {
        0
    } else {
        a.lcm(&b).abs()
    }
}

/// Depth of a Galois element; the identity has infinite depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Depth {
    Finite(Rat),
    Infinite,
}

impl Depth {
    #[must_use]
    pub fn finite(self) -> Option<Rat> {
        match self {
            Depth::Finite(r) => Some(r),
            Depth::Infinite => None,
        }
    }

    /// `min(depth, x)`, with `min(inf, x) = x`.
    #[must_use]
    pub fn min_with(self, x: Rat) -> Rat {
        match self {
            Depth::Finite(r) => r.min(x),
            Depth::Infinite => x,
        }
    }

    #[must_use]
    pub fn at_least(self, x: Rat) -> bool {
        match self {
            Depth::Finite(r) => r >= x,
            Depth::Infinite => true,
        }
    }
}

impl PartialOrd for Depth {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Depth {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Depth::Infinite, Depth::Infinite) => Ordering::Equal,
            (Depth::Infinite, _) => Ordering::Greater,
            (_, Depth::Infinite) => Ordering::Less,
            (Depth::Finite(a), Depth::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Depth::Finite(r) => write!(f, "{}", fmt_rat(r)),
            Depth::Infinite => f.write_str("inf"),
        }
    }
}

/// Non-negative least residue of `a mod m`.
#[must_use]
pub fn modp(a: i64, m: i64) -> i64 {
    a.rem_euclid(m)
}

#[must_use]
pub fn is_zero(r: &Rat) -> bool {
    r.is_zero()
}

#[must_use]
pub fn abs(r: &Rat) -> Rat {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        assert_eq!(parse_rat("2/6").unwrap(), rat(1, 3));
        assert_eq!(parse_rat(" -4 ").unwrap(), int(-4));
        assert_eq!(fmt_rat(&int(2)), "2/1");
        assert_eq!(fmt_rat(&rat(-3, 9)), "-1/3");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn depth_order_and_min() {
        assert!(Depth::Infinite > Depth::Finite(int(100)));
        assert_eq!(Depth::Infinite.min_with(rat(1, 2)), rat(1, 2));
        assert_eq!(Depth::Finite(rat(1, 3)).min_with(int(1)), rat(1, 3));
    }

    #[test]
    fn grid_and_fractional_part() {
        assert!(on_grid(&rat(2, 3), 3));
        assert!(!on_grid(&rat(1, 2), 3));
        assert_eq!(frac(&rat(-1, 4)), rat(3, 4));
        assert!(is_p_integral(&rat(1, 2), 3));
        assert!(!is_p_integral(&rat(1, 3), 3));
    }
}
