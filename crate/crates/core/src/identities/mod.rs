//! Exact identities linking run counts to curve character sums.
//!
//! Expanding `prod (1 + chi)` over every window gives
//! `n_p(t) = 2^-t (p + sum_T N_T) + r_p`, where the sum runs over all
//! nonempty `T` in `{1..t}` and the small offset `r_p` comes from the `t`
//! windows that wrap through 0. The offset depends only on the characters of
//! the integers `-(t-1)..(t-1)`, so it is constant on residue classes modulo
//! [`offset_modulus`].

mod coefficients;
mod linalg;
mod split;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use num_traits::Zero;

pub use coefficients::{
    claimed_coefficients, derived_coefficients, infer_coefficients, verify_coefficients, CoefficientHypothesis,
    CoefficientReport, HypothesisSource, RawTraces, SplitSubstituted, TraceSource,
};
pub use linalg::solve_exact;
pub use split::{genus2_split_test, genus_two_sum, SplitCandidate, SplitCheck, SplitReport};

use crate::curves::{shifted_product_sum, Subset};
use crate::residue::{count_run, ChiTable};
use crate::{Error, Rational, Result};

/// Largest `|r_p|` over `t <= 5` and `t + 2 < p <= 10^4`, fixed by an
/// exhaustive run (attained at `t = 5`, `p = 1 mod 24`).
pub const RESIDUAL_BOUND: Rational = Rational::new_raw(5, 2);

/// Modulus on whose classes `r_p(t)` is constant: 8 times the odd primes
/// below `t`.
pub fn offset_modulus(t: usize) -> u64 {
    let odd_primes = [3u64, 5, 7];
    8 * odd_primes.iter().filter(|&&q| (q as usize) < t).product::<u64>()
}

/// `N_T = sum_x chi(f_T(x))` read off the table.
pub fn subset_char_sum(chi: &ChiTable, t: Subset) -> i64 {
    let p = chi.p();
    let shifts: Vec<u64> = t.elements().map(|e| (e as u64 - 1) % p).collect();
    shifted_product_sum(chi, &shifts)
}

fn check_small(p: u64, t: usize) -> Result<ChiTable> {
    if t == 0 || t > 7 || p <= t as u64 + 2 {
        return Err(Error::PrimeTooSmall { p, t });
    }
    ChiTable::new(p)
}

/// `r = n_p(t) - 2^-t (p + sum_{T != {}} N_T)`.
pub fn decomposition_residual(p: u64, t: usize) -> Result<Rational> {
    let chi = check_small(p, t)?;
    Ok(residual_from_table(&chi, t))
}

pub fn residual_from_table(chi: &ChiTable, t: usize) -> Rational {
    let sum: i64 = Subset::all_nonempty(t).map(|s| subset_char_sum(chi, s)).sum();
    let n = count_run(chi, t) as i128;
    Rational::from(n) - Rational::new(chi.p() as i128 + sum as i128, 1 << t)
}

/// Offset when only the curves of positive genus are kept, i.e. with the
/// `|T| <= 2` sums folded into the constant.
pub fn positive_genus_offset(p: u64, t: usize) -> Result<Rational> {
    let chi = check_small(p, t)?;
    let sum: i64 = Subset::all_nonempty(t).filter(|s| s.len() >= 3).map(|s| subset_char_sum(&chi, s)).sum();
    let n = count_run(&chi, t) as i128;
    Ok(Rational::from(n) - Rational::new(p as i128 + sum as i128, 1 << t))
}

/// `J = sum_{i=1}^{p-3} chi(i (i+1) (i+2))` for `p = 1 mod 4`.
pub fn jacobsthal_a(p: u64) -> Result<i64> {
    if p % 4 != 1 {
        return Err(Error::WrongClass { p, class: 1, modulus: 4 });
    }
    let chi = ChiTable::new(p)?;
    Ok((1..=p - 3)
        .map(|i| chi.get_reduced(i) as i64 * chi.get_reduced(i + 1) as i64 * chi.get_reduced(i + 2) as i64)
        .sum())
}

/// Closed forms for `n_p(1)`, `n_p(2)` and `n_p(3)` exactly as published.
pub fn closed_form(t: usize, p: u64) -> Result<Rational> {
    let chi = ChiTable::new(p)?;
    let pi = p as i128;
    match t {
        1 => Ok(Rational::new(pi - 1, 2)),
        2 if p % 4 == 1 => Ok(Rational::new(pi - 5, 4)),
        2 => Ok(Rational::new(pi - 3, 4)),
        3 if p == 3 => Err(Error::PrimeTooSmall { p, t }),
        3 => {
            let two = chi.get(2) as i128;
            if p % 4 == 3 {
                Ok(Rational::new(pi - 3 - 2 * two, 8))
            } else {
                let a = jacobsthal_a(p)? as i128;
                Ok(Rational::new(pi - 11 - 4 * two, 8) + Rational::new(a, 4))
            }
        }
        _ => Err(Error::RunOutOfRange { t, p }),
    }
}

/// Observed residuals grouped by residue class.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub t: usize,
    pub modulus: u64,
    /// Primes `p <= min_prime` were excluded.
    pub min_prime: u64,
    pub classes: BTreeMap<u64, BTreeSet<Rational>>,
    /// Classes holding more than one residual.
    pub offending: Vec<u64>,
    pub samples: Vec<(u64, Rational)>,
}

impl ResidualReport {
    pub fn class_constant(&self) -> bool {
        self.offending.is_empty()
    }

    /// The single residual of each class, when constant.
    pub fn constants(&self) -> Option<BTreeMap<u64, Rational>> {
        self.class_constant()
            .then(|| self.classes.iter().map(|(&c, v)| (c, *v.iter().next().expect("nonempty class"))).collect())
    }

    pub fn max_abs(&self) -> Rational {
        self.samples
            .iter()
            .map(|(_, r)| if *r < Rational::zero() { -*r } else { *r })
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

fn group(samples: &[(u64, Rational)], modulus: u64) -> (BTreeMap<u64, BTreeSet<Rational>>, Vec<u64>) {
    let mut classes: BTreeMap<u64, BTreeSet<Rational>> = BTreeMap::new();
    for &(p, r) in samples {
        classes.entry(p % modulus).or_default().insert(r);
    }
    let offending = classes.iter().filter(|(_, v)| v.len() > 1).map(|(&c, _)| c).collect();
    (classes, offending)
}

/// Residuals of `t` over the primes `p > t + 2` in `primes`, grouped by the
/// smallest modulus in `moduli` that makes them class-constant; if none
/// does, by the largest, with the offending classes listed.
pub fn class_constant_scan(t: usize, primes: &[u64], moduli: &[u64]) -> Result<ResidualReport> {
    let min_prime = t as u64 + 2;
    let samples: Vec<(u64, Rational)> = primes
        .iter()
        .filter(|&&p| p > min_prime)
        .map(|&p| decomposition_residual(p, t).map(|r| (p, r)))
        .collect::<Result<_>>()?;
    Ok(scan_samples(t, samples, moduli))
}

pub fn scan_samples(t: usize, samples: Vec<(u64, Rational)>, moduli: &[u64]) -> ResidualReport {
    let mut sorted: Vec<u64> = moduli.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    assert!(!sorted.is_empty(), "no moduli to scan");
    let min_prime = t as u64 + 2;
    for &m in &sorted {
        let (classes, offending) = group(&samples, m);
        if offending.is_empty() {
            return ResidualReport { t, modulus: m, min_prime, classes, offending, samples };
        }
    }
    let m = *sorted.last().unwrap();
    let (classes, offending) = group(&samples, m);
    ResidualReport { t, modulus: m, min_prime, classes, offending, samples }
}
