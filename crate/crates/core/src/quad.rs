//! Exact arithmetic in `Q(sqrt 2)`.

use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::arith::{inv_mod, mul_mod, reduce_i128};
use crate::{Error, Rational, Result};

/// `a + b*sqrt(2)` with reduced rational parts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadRational {
    pub a: Rational,
    pub b: Rational,
}

impl QuadRational {
    pub fn new(a: Rational, b: Rational) -> Self {
        Self { a, b }
    }

    pub fn rational(a: Rational) -> Self {
        Self { a, b: Rational::zero() }
    }

    pub fn int(a: i128) -> Self {
        Self::rational(Rational::from(a))
    }

    pub fn frac(n: i128, d: i128) -> Self {
        Self::rational(Rational::new(n, d))
    }

    /// `b * sqrt(2)`.
    pub fn sqrt2_times(b: Rational) -> Self {
        Self { a: Rational::zero(), b }
    }

    pub fn sqrt2() -> Self {
        Self::sqrt2_times(Rational::one())
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<Rational> {
        self.is_rational().then_some(self.a)
    }

    /// `b -> -b`.
    pub fn conj(&self) -> Self {
        Self { a: self.a, b: -self.b }
    }

    /// `a^2 - 2 b^2`.
    pub fn norm(&self) -> Rational {
        self.a * self.a - Rational::from(2) * self.b * self.b
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        let c = self.conj();
        Some(Self { a: c.a / n, b: c.b / n })
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::int(1), |acc, _| acc * *self)
    }

    /// Image in `F_p` with `sqrt 2 -> root`. Fails when a denominator is
    /// divisible by `p`, or when `b != 0` and no root is supplied.
    pub fn reduce_mod(&self, p: u64, root: Option<u64>) -> Result<u64> {
        let a = reduce_rational(self.a, p)?;
        if self.b.is_zero() {
            return Ok(a);
        }
        let r = root.ok_or(Error::Sqrt2Absent(p))?;
        let b = reduce_rational(self.b, p)?;
        Ok((a + mul_mod(b, r, p)) % p)
    }
}

/// Reduce a rational modulo the prime `p`.
pub fn reduce_rational(q: Rational, p: u64) -> Result<u64> {
    let den = reduce_i128(*q.denom(), p);
    if den == 0 {
        return Err(Error::BadPrime { curve: alloc::format!("denominator {}", q.denom()), p });
    }
    Ok(mul_mod(reduce_i128(*q.numer(), p), inv_mod(den, p), p))
}

impl From<Rational> for QuadRational {
    fn from(a: Rational) -> Self {
        Self::rational(a)
    }
}

impl From<i128> for QuadRational {
    fn from(a: i128) -> Self {
        Self::int(a)
    }
}

impl Add for QuadRational {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { a: self.a + o.a, b: self.b + o.b }
    }
}

impl Sub for QuadRational {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { a: self.a - o.a, b: self.b - o.b }
    }
}

impl Neg for QuadRational {
    type Output = Self;
    fn neg(self) -> Self {
        Self { a: -self.a, b: -self.b }
    }
}

impl Mul for QuadRational {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let two = Rational::from(2);
        Self { a: self.a * o.a + two * self.b * o.b, b: self.a * o.b + self.b * o.a }
    }
}

impl Div for QuadRational {
    type Output = Self;
    /// Panics on division by zero, like the rational division it wraps.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.inv().expect("division by zero in Q(sqrt 2)")
    }
}

fn fmt_rational(q: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if q.is_integer() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for QuadRational {
    /// `a`, `b*r2`, or `a+b*r2`; `r2` tags the `sqrt 2` part.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return fmt_rational(&self.a, f);
        }
        if !self.a.is_zero() {
            fmt_rational(&self.a, f)?;
            if self.b.is_positive() {
                f.write_str("+")?;
            }
        }
        fmt_rational(&self.b, f)?;
        f.write_str("*r2")
    }
}

fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let d: i128 = d.trim().parse().ok()?;
            if d == 0 {
                return None;
            }
            Some(Rational::new(n.trim().parse().ok()?, d))
        }
        None => Some(Rational::from(s.parse::<i128>().ok()?)),
    }
}

impl core::str::FromStr for QuadRational {
    type Err = ParseQuadError;

    /// Inverse of the `Display` format.
    fn from_str(s: &str) -> core::result::Result<Self, ParseQuadError> {
        let s = s.trim();
        let Some(body) = s.strip_suffix("*r2") else {
            return parse_rational(s).map(Self::rational).ok_or(ParseQuadError);
        };
        // split at the sign that starts the sqrt(2) coefficient, if any
        let cut = body
            .char_indices()
            .skip(1)
            .filter(|&(i, c)| (c == '+' || c == '-') && !body[..i].ends_with('/'))
            .map(|(i, _)| i)
            .last();
        match cut {
            Some(i) => {
                let a = parse_rational(&body[..i]).ok_or(ParseQuadError)?;
                let b = parse_rational(body[i..].trim_start_matches('+')).ok_or(ParseQuadError)?;
                Ok(Self::new(a, b))
            }
            None => parse_rational(body).map(Self::sqrt2_times).ok_or(ParseQuadError),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseQuadError;

impl fmt::Display for ParseQuadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("malformed element of Q(sqrt 2)")
    }
}
