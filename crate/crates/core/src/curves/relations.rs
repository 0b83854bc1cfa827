//! Twist and isogeny checks by comparing traces prime by prime.

use super::trace::{char_sum, Sqrt2Choice};
use super::CurveModel;
use crate::arith::legendre;
use crate::residue::ChiTable;

/// Outcome of comparing `tr_B(p)` with `(d/p) tr_A(p)` over a prime range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistReport {
    pub d: i64,
    pub checked: usize,
    pub skipped: usize,
    /// First `(p, tr_A, tr_B)` with `tr_B != (d/p) tr_A`.
    pub counterexample: Option<(u64, i64, i64)>,
}

impl TwistReport {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none() && self.checked > 0
    }
}

fn frob_at(m: &CurveModel, chi: &ChiTable) -> Option<i64> {
    char_sum(m, chi, Sqrt2Choice::Smaller).ok().map(|v| v.frobenius())
}

/// Frobenius traces (not raw character sums) are compared so that quartic
/// and cubic models of the same curve line up.
pub fn twist_check(a: &CurveModel, b: &CurveModel, d: i64, primes: &[u64]) -> TwistReport {
    let mut report = TwistReport { d, checked: 0, skipped: 0, counterexample: None };
    for &p in primes {
        let Ok(chi) = ChiTable::new(p) else {
            report.skipped += 1;
            continue;
        };
        let (Some(ta), Some(tb)) = (frob_at(a, &chi), frob_at(b, &chi)) else {
            report.skipped += 1;
            continue;
        };
        let twist = legendre(d, p) as i64;
        if twist == 0 {
            report.skipped += 1;
            continue;
        }
        report.checked += 1;
        if tb != twist * ta {
            report.counterexample = Some((p, ta, tb));
            break;
        }
    }
    report
}

/// Smallest odd prime `p <= bound`, good for both curves, with
/// `|tr_A(p)| != |tr_B(p)|`. Isogenous curves (and their quadratic twists)
/// have equal trace magnitudes, so a witness proves non-isogeny; `None` is
/// inconclusive.
pub fn non_isogeny_witness(a: &CurveModel, b: &CurveModel, bound: u64) -> Option<u64> {
    crate::arith::primes_in_range(3, bound).into_iter().find(|&p| {
        let chi = ChiTable::new(p).expect("odd prime");
        match (frob_at(a, &chi), frob_at(b, &chi)) {
            (Some(ta), Some(tb)) => ta.abs() != tb.abs(),
            _ => false,
        }
    })
}
