//! Candidate identities for the trace of the genus-2 curve `C` in terms of
//! the elliptic curves `E15` (over `Q(sqrt 2)`) and `E16`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::curves::{char_sum, model, shifted_product_sum, CurveId, Sqrt2Choice};
use crate::residue::ChiTable;
use crate::{Rational, Result};

/// `a_C = N_C = sum_x chi(x(x+1)(x+2)(x+3)(x+4))`, valid at every odd `p`.
pub fn genus_two_sum(chi: &ChiTable) -> i64 {
    let p = chi.p();
    let shifts: Vec<u64> = (0..5).map(|i| i % p).collect();
    shifted_product_sum(chi, &shifts)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SplitCandidate {
    /// `a_C = N15(r) + N15(r')` over both images `r, r'` of `sqrt 2`;
    /// only meaningful when 2 is a square.
    ConjugateSum,
    /// `a_C = N16 + (2/p) N16'`, with `N16'` the sum for the quadratic twist
    /// of `E16` by 2.
    RationalTwist,
    /// `a_C = 0`.
    Vanishing,
}

impl SplitCandidate {
    pub const ALL: [SplitCandidate; 3] =
        [SplitCandidate::ConjugateSum, SplitCandidate::RationalTwist, SplitCandidate::Vanishing];

    /// Right-hand side at `chi.p()`, or `None` where it is undefined.
    pub fn predict(self, chi: &ChiTable) -> Result<Option<i64>> {
        match self {
            SplitCandidate::ConjugateSum => {
                if Sqrt2Choice::Smaller.root(chi.p()).is_none() {
                    return Ok(None);
                }
                let e15 = model(CurveId::E(15));
                let lo = char_sum(&e15, chi, Sqrt2Choice::Smaller)?.n;
                let hi = char_sum(&e15, chi, Sqrt2Choice::Larger)?.n;
                Ok(Some(lo + hi))
            }
            SplitCandidate::RationalTwist => {
                let n16 = char_sum(&model(CurveId::E(16)), chi, Sqrt2Choice::Smaller)?.n;
                let two = chi.get(2) as i64;
                let twisted = two * n16;
                Ok(Some(n16 + two * twisted))
            }
            SplitCandidate::Vanishing => Ok(Some(0)),
        }
    }

    /// Value standing in for a single `E15` trace once this identity is
    /// accepted: half of the conjugate sum, the `E16` trace, or zero.
    pub fn e15_term(self, chi: &ChiTable) -> Result<Rational> {
        match self {
            SplitCandidate::ConjugateSum => Ok(Rational::new(genus_two_sum(chi) as i128, 2)),
            SplitCandidate::RationalTwist => {
                Ok(Rational::from(char_sum(&model(CurveId::E(16)), chi, Sqrt2Choice::Smaller)?.n as i128))
            }
            SplitCandidate::Vanishing => Ok(Rational::from(0)),
        }
    }
}

/// Outcome of one candidate on one class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SplitCheck {
    pub candidate: SplitCandidate,
    pub primes: usize,
    pub applicable: usize,
    /// `(p, a_C, candidate)` at the first mismatch.
    pub first_failure: Option<(u64, i64, i64)>,
}

impl SplitCheck {
    /// Defined and correct at every prime of the class.
    pub fn holds(&self) -> bool {
        self.primes > 0 && self.applicable == self.primes && self.first_failure.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitReport {
    /// Keyed by `p mod 8`.
    pub classes: BTreeMap<u64, Vec<SplitCheck>>,
}

impl SplitReport {
    pub fn survivors(&self, class: u64) -> Vec<SplitCandidate> {
        self.classes
            .get(&class)
            .map(|v| v.iter().filter(|c| c.holds()).map(|c| c.candidate).collect())
            .unwrap_or_default()
    }

    /// The unique survivor on `class`, if there is exactly one.
    pub fn winner(&self, class: u64) -> Option<SplitCandidate> {
        match self.survivors(class).as_slice() {
            [one] => Some(*one),
            _ => None,
        }
    }
}

/// Tests every candidate at the primes `p > 3` in `primes`.
pub fn genus2_split_test(primes: &[u64]) -> Result<SplitReport> {
    let mut classes: BTreeMap<u64, Vec<SplitCheck>> = BTreeMap::new();
    for &p in primes.iter().filter(|&&p| p > 3) {
        let chi = ChiTable::new(p)?;
        let a_c = genus_two_sum(&chi);
        let row = classes.entry(p % 8).or_insert_with(|| {
            SplitCandidate::ALL
                .iter()
                .map(|&candidate| SplitCheck { candidate, primes: 0, applicable: 0, first_failure: None })
                .collect()
        });
        for check in row.iter_mut() {
            check.primes += 1;
            if let Some(v) = check.candidate.predict(&chi)? {
                check.applicable += 1;
                if v != a_c && check.first_failure.is_none() {
                    check.first_failure = Some((p, a_c, v));
                }
            }
        }
    }
    Ok(SplitReport { classes })
}
