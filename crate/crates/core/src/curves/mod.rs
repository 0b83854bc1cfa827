//! Curve models `y^2 = f(x)` attached to consecutive residue runs.
//!
//! `E0`..`E14` and `C` are the curves `y^2 = f_T(x)` for subsets `T` of
//! `{1,..,5}` with `|T| >= 3`; `E15` is a model over `Q(sqrt 2)` and `E16`
//! a rational model, both attached to the genus-2 curve `C`. Generic subset
//! curves `C_T` are built on demand by [`subset_polynomial`].

mod involution;
mod jinv;
mod relations;
mod trace;

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_traits::Zero;

pub use involution::{involution_verify, InvolutionOutcome, InvolutionReport, InvolutionVariant};
pub use jinv::{j_invariant, j_of_lambda};
pub use relations::{non_isogeny_witness, twist_check, TwistReport};
pub use trace::{char_sum, frobenius_trace, polynomial_sum, shifted_product_sum, Sqrt2Choice, TraceValue};

use crate::quad::QuadRational;
use crate::{Error, Rational, Result};

/// Subset of `{1,..,9}` as a bit mask (bit `i` is element `i`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset(u16);

impl Subset {
    pub fn from_elements(elements: &[u8]) -> Result<Self> {
        let mut bits = 0u16;
        for &e in elements {
            if !(1..=9).contains(&e) {
                return Err(Error::SubsetElement(e));
            }
            bits |= 1 << e;
        }
        if bits == 0 {
            return Err(Error::EmptySubset);
        }
        Ok(Self(bits))
    }

    pub fn elements(self) -> impl Iterator<Item = u8> {
        (1..=9u8).filter(move |&i| self.0 >> i & 1 == 1)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn max_element(self) -> u8 {
        15 - self.0.leading_zeros() as u8
    }

    /// Every nonempty subset of `{1,..,t}`, ordered by bit mask.
    pub fn all_nonempty(t: usize) -> impl Iterator<Item = Subset> {
        assert!(t <= 9);
        (1u16..1 << t).map(|m| Subset(m << 1))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CurveId {
    /// `E0`..`E16`.
    E(u8),
    /// The genus-2 quintic `y^2 = x(x+1)(x+2)(x+3)(x+4)`.
    C,
    /// `C_T` for an arbitrary subset.
    Subset(Subset),
}

impl fmt::Display for CurveId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveId::E(i) => write!(f, "E{i}"),
            CurveId::C => f.write_str("C"),
            CurveId::Subset(s) => {
                f.write_str("T")?;
                s.elements().try_for_each(|e| write!(f, "{e}"))
            }
        }
    }
}

impl FromStr for CurveId {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, String> {
        let s = s.trim();
        if s == "C" {
            return Ok(CurveId::C);
        }
        if let Some(n) = s.strip_prefix('E') {
            return match n.parse::<u8>() {
                Ok(i) if i <= 16 => Ok(CurveId::E(i)),
                _ => Err(format!("unknown curve {s:?}")),
            };
        }
        if let Some(digits) = s.strip_prefix('T') {
            let elems = digits
                .chars()
                .map(|c| c.to_digit(10).map(|d| d as u8))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| format!("malformed subset {s:?}"))?;
            return Subset::from_elements(&elems).map(CurveId::Subset).map_err(|e| format!("{e}"));
        }
        Err(format!("unknown curve {s:?}"))
    }
}

/// Root shifts `i` with `f = prod (x + i)` for the named subset curves.
const NAMED_SHIFTS: [&[i128]; 15] = [
    &[0, 1, 2],
    &[0, 1, 3],
    &[0, 2, 3],
    &[1, 2, 3],
    &[0, 1, 2, 3],
    &[0, 1, 4],
    &[0, 2, 4],
    &[0, 3, 4],
    &[1, 2, 4],
    &[1, 3, 4],
    &[2, 3, 4],
    &[0, 1, 2, 4],
    &[0, 1, 3, 4],
    &[0, 2, 3, 4],
    &[1, 2, 3, 4],
];

/// `y^2 = f(x)` with `f` monic and squarefree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveModel {
    pub id: CurveId,
    /// Coefficients from the constant term up.
    pub poly: Vec<QuadRational>,
    pub roots: Option<Vec<QuadRational>>,
    pub bad_primes: Vec<u64>,
}

impl CurveModel {
    pub fn from_roots(id: CurveId, roots: Vec<QuadRational>) -> Self {
        let poly = poly_from_roots(&roots);
        let bad_primes = bad_primes_of_roots(&roots);
        Self { id, poly, roots: Some(roots), bad_primes }
    }

    pub fn degree(&self) -> usize {
        self.poly.len() - 1
    }

    pub fn genus(&self) -> usize {
        (self.degree() - 1) / 2
    }

    /// True when every coefficient lies in `Q`.
    pub fn is_rational(&self) -> bool {
        self.poly.iter().all(QuadRational::is_rational)
    }

    pub fn is_bad(&self, p: u64) -> bool {
        self.bad_primes.contains(&p)
    }

    /// One registry line: `id | c0; c1; ... | bad primes`.
    pub fn table_row(&self) -> String {
        let coeffs: Vec<String> = self.poly.iter().map(|c| format!("{c}")).collect();
        let bad: Vec<String> = self.bad_primes.iter().map(|p| format!("{p}")).collect();
        format!("{} | {} | {}", self.id, coeffs.join("; "), bad.join(" "))
    }
}

pub fn poly_from_roots(roots: &[QuadRational]) -> Vec<QuadRational> {
    let mut poly = alloc::vec![QuadRational::int(1)];
    for &r in roots {
        let mut next = alloc::vec![QuadRational::int(0); poly.len() + 1];
        for (i, &c) in poly.iter().enumerate() {
            next[i + 1] = next[i + 1] + c;
            next[i] = next[i] - c * r;
        }
        poly = next;
    }
    poly
}

fn odd_prime_factors(mut n: u128, out: &mut BTreeSet<u64>) {
    let mut d = 3u128;
    while n.is_multiple_of(2) && n > 0 {
        n /= 2;
    }
    while d * d <= n {
        while n.is_multiple_of(d) {
            out.insert(d as u64);
            n /= d;
        }
        d += 2;
    }
    if n > 1 {
        out.insert(n as u64);
    }
}

/// 2, every odd prime dividing the norm of a root difference, and every
/// prime in a root denominator.
fn bad_primes_of_roots(roots: &[QuadRational]) -> Vec<u64> {
    let mut bad = BTreeSet::new();
    bad.insert(2);
    for (i, a) in roots.iter().enumerate() {
        for den in [a.a.denom(), a.b.denom()] {
            odd_prime_factors(den.unsigned_abs(), &mut bad);
        }
        for b in &roots[i + 1..] {
            let n = (*a - *b).norm();
            debug_assert!(!n.is_zero(), "repeated root");
            odd_prime_factors(n.numer().unsigned_abs(), &mut bad);
            odd_prime_factors(n.denom().unsigned_abs(), &mut bad);
        }
    }
    bad.into_iter().collect()
}

fn shift_roots(shifts: &[i128]) -> Vec<QuadRational> {
    shifts.iter().map(|&i| QuadRational::int(-i)).collect()
}

/// `f_T(X) = prod_{i+1 in T} (X + i)`.
pub fn subset_polynomial(t: Subset) -> Result<CurveModel> {
    if t.is_empty() {
        return Err(Error::EmptySubset);
    }
    let shifts: Vec<i128> = t.elements().map(|e| e as i128 - 1).collect();
    Ok(CurveModel::from_roots(CurveId::Subset(t), shift_roots(&shifts)))
}

/// Model for a named curve.
pub fn model(id: CurveId) -> CurveModel {
    match id {
        CurveId::E(i @ 0..=14) => CurveModel::from_roots(id, shift_roots(NAMED_SHIFTS[i as usize])),
        // x^3 + 2 sqrt2 x^2 - 9x - 18 sqrt2 = (x + 2 sqrt2)(x - 3)(x + 3)
        CurveId::E(15) => CurveModel::from_roots(
            id,
            alloc::vec![QuadRational::sqrt2_times(Rational::from(-2)), QuadRational::int(3), QuadRational::int(-3),],
        ),
        // x^3 + 2x^2 - 9x/2 - 9 = (x + 2)(x^2 - 9/2)
        CurveId::E(16) => CurveModel::from_roots(
            id,
            alloc::vec![
                QuadRational::int(-2),
                QuadRational::sqrt2_times(Rational::new(3, 2)),
                QuadRational::sqrt2_times(Rational::new(-3, 2)),
            ],
        ),
        CurveId::E(i) => panic!("no curve E{i}"),
        CurveId::C => CurveModel::from_roots(id, shift_roots(&[0, 1, 2, 3, 4])),
        CurveId::Subset(t) => subset_polynomial(t).expect("nonempty subset"),
    }
}

/// `E0`..`E16` and `C`.
pub fn registry() -> Vec<CurveModel> {
    (0..=16).map(CurveId::E).chain([CurveId::C]).map(model).collect()
}

/// Named curve whose polynomial is `f_T`, if any.
pub fn named_for_subset(t: Subset) -> Option<CurveId> {
    let shifts: Vec<i128> = t.elements().map(|e| e as i128 - 1).collect();
    if shifts == [0, 1, 2, 3, 4] {
        return Some(CurveId::C);
    }
    NAMED_SHIFTS.iter().position(|s| *s == shifts.as_slice()).map(|i| CurveId::E(i as u8))
}

/// Plain-text table of the registry, one curve per line after a header.
pub fn registry_table() -> String {
    let mut out = String::from("# id | coefficients, constant term first (r2 = sqrt 2) | bad primes\n");
    for m in registry() {
        out.push_str(&m.table_row());
        out.push('\n');
    }
    out
}

/// Parses one [`CurveModel::table_row`] line back into `(id, poly, bad primes)`.
pub fn parse_table_row(line: &str) -> Option<(CurveId, Vec<QuadRational>, Vec<u64>)> {
    let mut parts = line.split('|');
    let id = parts.next()?.parse().ok()?;
    let poly = parts.next()?.split(';').map(|c| c.parse().ok()).collect::<Option<Vec<QuadRational>>>()?;
    let bad = parts.next()?.split_whitespace().map(|p| p.parse().ok()).collect::<Option<Vec<u64>>>()?;
    Some((id, poly, bad))
}

/// `floor((s - 1) / 2)`, the genus of `y^2 = f` with `deg f = s` squarefree.
pub fn genus_of_subset(s: usize) -> usize {
    assert!(s >= 1);
    (s - 1) / 2
}

/// Sum of subset genera over nonempty `T` in `{1,..,t}`, checked against
/// the closed form `2^(t-2) (t-3) + 1`.
pub fn genus_sum(t: usize) -> u64 {
    assert!((2..=9).contains(&t), "genus_sum needs 2 <= t <= 9");
    let explicit: u64 = Subset::all_nonempty(t).map(|s| genus_of_subset(s.len()) as u64).sum();
    let closed = (1i64 << (t - 2)) * (t as i64 - 3) + 1;
    assert_eq!(explicit as i64, closed, "genus sum formula mismatch at t={t}");
    explicit
}
