//! Character sums `N = sum_x chi(f(x))` over `F_p`.

use alloc::vec::Vec;

use super::CurveModel;
use crate::arith::{mul_mod, sqrt_mod};
use crate::quad::QuadRational;
use crate::residue::ChiTable;
use crate::{Error, Result};

/// Which square root of 2 mod `p` the image of `sqrt 2` is.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Sqrt2Choice {
    #[default]
    Smaller,
    Larger,
}

impl Sqrt2Choice {
    pub fn root(self, p: u64) -> Option<u64> {
        sqrt_mod(2, p).map(|(lo, hi)| match self {
            Sqrt2Choice::Smaller => lo,
            Sqrt2Choice::Larger => hi,
        })
    }
}

/// Character sum of one curve at one prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceValue {
    pub p: u64,
    pub curve: super::CurveId,
    pub degree: usize,
    pub n: i64,
}

impl TraceValue {
    /// `|N| <= (deg - 1) sqrt p`.
    pub fn within_weil_bound(&self) -> bool {
        let lim = (self.degree as i64 - 1).pow(2) * self.p as i64;
        self.n * self.n <= lim
    }

    /// Trace of Frobenius on the Jacobian of the smooth model: `-N` for odd
    /// degree, `-(N + 1)` for monic even degree (two rational points at
    /// infinity).
    pub fn frobenius(&self) -> i64 {
        frobenius_trace(self.n, self.degree)
    }
}

pub fn frobenius_trace(n: i64, degree: usize) -> i64 {
    if degree.is_multiple_of(2) {
        -(n + 1)
    } else {
        -n
    }
}

const BLOCK: usize = 4096;

/// `sum_x prod_i chi(x + s_i)` for shifts already reduced into `0..p`.
pub fn shifted_product_sum(chi: &ChiTable, shifts: &[u64]) -> i64 {
    let p = chi.p() as usize;
    let mut total = 0i64;
    let mut acc = [0i8; BLOCK];
    let mut start = 0usize;
    while start < p {
        let len = BLOCK.min(p - start);
        let acc = &mut acc[..len];
        acc.copy_from_slice(chi.window((start as u64 + shifts[0]) % chi.p(), len));
        for &s in &shifts[1..] {
            let w = chi.window((start as u64 + s) % chi.p(), len);
            // products of -1, 0, 1; wrapping_mul keeps the loop vectorizable
            // under overflow checks
            for (a, &c) in acc.iter_mut().zip(w) {
                *a = a.wrapping_mul(c);
            }
        }
        total += acc.iter().fold(0i64, |s, &v| s.wrapping_add(v as i64));
        start += len;
    }
    total
}

/// `sum_x chi(f(x))` by forward differences: `deg f` additions per point.
pub fn polynomial_sum(chi: &ChiTable, coeffs: &[u64]) -> i64 {
    let p = chi.p();
    let d = coeffs.len() - 1;
    let eval = |x: u64| coeffs.iter().rev().fold(0u64, |acc, &c| (mul_mod(acc, x, p) + c) % p);
    let mut diffs: Vec<u64> = (0..=d as u64).map(|x| eval(x % p)).collect();
    for k in 1..=d {
        for i in (k..=d).rev() {
            diffs[i] = (diffs[i] + p - diffs[i - 1]) % p;
        }
    }
    let mut total = 0i64;
    for _ in 0..p {
        total += chi.get_reduced(diffs[0]) as i64;
        for k in 0..d {
            let v = diffs[k] + diffs[k + 1];
            diffs[k] = if v >= p { v - p } else { v };
        }
    }
    total
}

fn reduce_all(values: &[QuadRational], p: u64, root: Option<u64>) -> Result<Vec<u64>> {
    values.iter().map(|v| v.reduce_mod(p, root)).collect()
}

/// Character sum of `model` at `chi.p()`.
///
/// Models with a root list use multiplicativity, `chi(prod (x - r)) =
/// prod chi(x - r)`, whenever the roots reduce; rational models without
/// reducible roots fall back to polynomial evaluation.
pub fn char_sum(model: &CurveModel, chi: &ChiTable, choice: Sqrt2Choice) -> Result<TraceValue> {
    let p = chi.p();
    if model.is_bad(p) {
        return Err(Error::BadPrime { curve: alloc::format!("{}", model.id), p });
    }
    let root = choice.root(p);
    let value = |n| TraceValue { p, curve: model.id, degree: model.degree(), n };
    if let Some(roots) = &model.roots {
        if let Ok(reduced) = reduce_all(roots, p, root) {
            let shifts: Vec<u64> = reduced.iter().map(|&r| (p - r) % p).collect();
            return Ok(value(shifted_product_sum(chi, &shifts)));
        }
    }
    if model.is_rational() || root.is_some() {
        let coeffs = reduce_all(&model.poly, p, root)?;
        return Ok(value(polynomial_sum(chi, &coeffs)));
    }
    Err(Error::Sqrt2Absent(p))
}
