//! Limit laws predicted for the normalized deviation
//! `delta_p(t) = 2^t (n_p(t) - p/2^t) / sqrt p`.

use alloc::vec::Vec;

use num_traits::Signed;

use super::{nu2, to_f64, MeasureSpec};
use crate::curves::CurveId;
use crate::identities::{derived_coefficients, CoefficientHypothesis};
use crate::{Error, Rational, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// The published convolution products.
    Paper,
    /// One factor per curve in the exact relation, with the law each
    /// normalized trace follows on the given class.
    ClassAware,
}

/// `lambda_cm`: pushforward of `nu1` under `x -> 2x` when `normalized`;
/// otherwise the published `delta_0 / 4 + arcsine(4, 1/2)`, of mass 3/4.
pub fn lambda_cm(normalized: bool) -> MeasureSpec {
    let atom = if normalized { Rational::new(1, 2) } else { Rational::new(1, 4) };
    MeasureSpec::atom(0.0, atom).plus(&MeasureSpec::arcsine(4.0, Rational::new(1, 2)).expect("positive radius"))
}

fn scaled(m: &MeasureSpec, c: f64) -> MeasureSpec {
    m.scale(c).expect("positive scale")
}

/// Factors of the published product for `(t, class)`; `t = 4` takes a class
/// mod 4, `t = 5` a class mod 8.
pub fn paper_factors(t: usize, class: u64) -> Result<Vec<MeasureSpec>> {
    let lambda = lambda_cm(true);
    let lambda2 = scaled(&lambda, 2.0);
    let mu = scaled(&nu2(), 2.0);
    let mu3 = scaled(&mu, 3.0);
    let v = nu2();
    Ok(match (t, class) {
        (4, 3) => alloc::vec![v],
        (4, 1) => alloc::vec![lambda, mu, v],
        (5, 7) => alloc::vec![lambda, mu.clone(), mu, v],
        (5, 5) => alloc::vec![lambda, mu, mu3, v],
        (5, 3) => alloc::vec![lambda2, mu.clone(), mu.clone(), v, mu],
        (5, 1) => alloc::vec![lambda2, mu.clone(), mu3, v, mu],
        _ => return Err(Error::NoPrediction { t, class }),
    })
}

/// Law of `N / sqrt p` for one curve on the class `p = class mod modulus`.
fn base_law(id: CurveId, modulus: u64, class: u64) -> MeasureSpec {
    let one = Rational::from(1);
    match id {
        // CM by Z[i]: supersingular when p = 3 mod 4, ordinary otherwise
        CurveId::E(0) if class % 4 == 3 => MeasureSpec::atom(0.0, one),
        CurveId::E(0) => MeasureSpec::arcsine(2.0, one).expect("positive radius"),
        // twice the trace of a non-CM curve over Q(sqrt 2) on split primes
        CurveId::C if modulus.is_multiple_of(8) && class % 8 == 1 => {
            MeasureSpec::semicircle(4.0, one).expect("positive radius")
        }
        CurveId::C => MeasureSpec::atom(0.0, one),
        _ => nu2(),
    }
}

/// Factors `scale(base_i, 2^t |c_i|)` for a coefficient hypothesis.
pub fn class_aware_factors(hyp: &CoefficientHypothesis) -> Vec<MeasureSpec> {
    let two_t = Rational::from(1i128 << hyp.t);
    hyp.coefficients
        .iter()
        .map(|(&id, c)| {
            let s = to_f64(two_t * c.abs());
            scaled(&base_law(id, hyp.modulus, hyp.class), s)
        })
        .collect()
}

pub fn class_aware_measure(hyp: &CoefficientHypothesis, step: f64) -> Result<MeasureSpec> {
    MeasureSpec::convolve_all(&class_aware_factors(hyp), step)
}

pub fn predicted_factors(t: usize, class: u64, variant: Variant) -> Result<Vec<MeasureSpec>> {
    match variant {
        Variant::Paper => paper_factors(t, class),
        Variant::ClassAware => {
            let modulus = if t == 4 { 4 } else { 8 };
            Ok(class_aware_factors(&derived_coefficients(t, modulus, class)?))
        }
    }
}

pub fn predicted_measure(t: usize, class: u64, variant: Variant, step: f64) -> Result<MeasureSpec> {
    MeasureSpec::convolve_all(&predicted_factors(t, class, variant)?, step)
}

#[cfg(test)]
mod tests {
    use super::super::{ks, nu1, sample_sum, DEFAULT_STEP};
    use super::*;

    const CASES: [(usize, u64); 6] = [(4, 1), (4, 3), (5, 1), (5, 3), (5, 5), (5, 7)];

    #[test]
    fn lambda_normalization() {
        assert!(lambda_cm(true).is_probability());
        assert_eq!(lambda_cm(true), nu1().scale(2.0).unwrap());
        assert!((lambda_cm(false).mass() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn known_products() {
        assert_eq!(predicted_measure(4, 3, Variant::Paper, DEFAULT_STEP).unwrap(), nu2());
        let f = predicted_factors(4, 1, Variant::ClassAware).unwrap();
        let one = Rational::from(1);
        assert_eq!(
            f,
            [
                MeasureSpec::arcsine(4.0, one).unwrap(),
                MeasureSpec::semicircle(4.0, one).unwrap(),
                MeasureSpec::semicircle(2.0, one).unwrap()
            ]
        );
        let m = predicted_measure(4, 1, Variant::ClassAware, DEFAULT_STEP).unwrap();
        assert_eq!(m.support(), (-10.0, 10.0));
        assert_eq!(predicted_measure(4, 1, Variant::Paper, DEFAULT_STEP).unwrap().support(), (-10.0, 10.0));
        // E1 with weight 2 and E4 with weight 1 on class 7 mod 8
        let f7 = predicted_factors(5, 7, Variant::ClassAware).unwrap();
        assert_eq!(f7, [MeasureSpec::semicircle(4.0, one).unwrap(), nu2()]);
        assert!(predicted_measure(6, 1, Variant::Paper, DEFAULT_STEP).is_err());
        assert!(predicted_measure(4, 2, Variant::ClassAware, DEFAULT_STEP).is_err());
    }

    #[test]
    fn supports_moments_symmetry() {
        for (t, class) in CASES {
            for variant in [Variant::Paper, Variant::ClassAware] {
                let factors = predicted_factors(t, class, variant).unwrap();
                let m = MeasureSpec::convolve_all(&factors, DEFAULT_STEP).unwrap();
                assert!(m.is_probability(), "{t} {class} {variant:?}");
                let lo: f64 = factors.iter().map(|f| f.support().0).sum();
                let hi: f64 = factors.iter().map(|f| f.support().1).sum();
                assert_eq!(m.support(), (lo, hi));
                let grid_var: f64 = factors.iter().map(|f| f.on_grid(DEFAULT_STEP).variance()).sum();
                assert!((m.variance() - grid_var).abs() <= 1e-6);
                let var: f64 = factors.iter().map(MeasureSpec::variance).sum();
                assert!((m.variance() - var).abs() <= 1e-4, "{t} {class} {variant:?}: {} vs {var}", m.variance());
                assert!(m.is_even(1e-9));
            }
        }
    }

    #[test]
    fn monte_carlo_matches_convolution() {
        for (t, class) in [(4, 1), (5, 1)] {
            let factors = predicted_factors(t, class, Variant::ClassAware).unwrap();
            let m = MeasureSpec::convolve_all(&factors, DEFAULT_STEP).unwrap();
            let s = sample_sum(&factors, 200_000, 11);
            assert!(ks(&s, &m) <= 0.01);
        }
    }
}
