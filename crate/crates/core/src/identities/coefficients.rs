//! Linear relations `n_p(t) = p/2^t + sum_i c_i N_i(p) + const` on a
//! residue class, with a small basis of curves.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use num_traits::Zero;

use super::linalg::solve_exact;
use super::offset_modulus;
use super::split::{genus_two_sum, SplitCandidate};
use crate::curves::{char_sum, model, CurveId, Sqrt2Choice, Subset};
use crate::residue::{count_run, ChiTable};
use crate::{Error, Rational, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HypothesisSource {
    /// As published.
    Paper,
    /// Summed from the twist table of the subset curves.
    Derived,
    /// Solved from data.
    Inferred,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientHypothesis {
    pub t: usize,
    /// Class is `p mod modulus`.
    pub modulus: u64,
    pub class: u64,
    pub coefficients: BTreeMap<CurveId, Rational>,
    /// Constant per class mod `offset_modulus(t)`; filled only when solved.
    pub offsets: BTreeMap<u64, Rational>,
    pub source: HypothesisSource,
}

impl CoefficientHypothesis {
    fn new(t: usize, modulus: u64, class: u64, coeffs: &[(CurveId, Rational)], source: HypothesisSource) -> Self {
        Self {
            t,
            modulus,
            class,
            coefficients: coeffs.iter().copied().filter(|(_, c)| !c.is_zero()).collect(),
            offsets: BTreeMap::new(),
            source,
        }
    }

    pub fn abs_sum(&self) -> Rational {
        self.coefficients.values().map(|c| if *c < Rational::zero() { -*c } else { *c }).sum()
    }

    /// Same curves with coefficients equal up to sign.
    pub fn matches_up_to_sign(&self, other: &CoefficientHypothesis) -> bool {
        self.coefficients.len() == other.coefficients.len()
            && self.coefficients.iter().all(|(id, c)| other.coefficients.get(id).is_some_and(|d| *d == *c || *d == -*c))
    }

    pub fn applies_to(&self, p: u64) -> bool {
        p % self.modulus == self.class
            && p > self.t as u64 + 2
            && self.coefficients.keys().all(|&id| !model(id).is_bad(p))
    }
}

/// Values substituted for the curve terms.
pub trait TraceSource {
    fn value(&self, id: CurveId, chi: &ChiTable) -> Result<Rational>;
}

/// Plain character sums `N`, with `C` read through its quintic and `E15`
/// through the smaller square root of 2.
#[derive(Clone, Copy, Debug, Default)]
pub struct RawTraces;

impl TraceSource for RawTraces {
    fn value(&self, id: CurveId, chi: &ChiTable) -> Result<Rational> {
        let n = match id {
            CurveId::C => genus_two_sum(chi),
            _ => char_sum(&model(id), chi, Sqrt2Choice::Smaller)?.n,
        };
        Ok(Rational::from(n as i128))
    }
}

/// Like [`RawTraces`], but the `E15` term is replaced by the accepted
/// genus-2 identity of the prime's class mod 8.
#[derive(Clone, Debug)]
pub struct SplitSubstituted {
    pub winners: BTreeMap<u64, SplitCandidate>,
}

impl TraceSource for SplitSubstituted {
    fn value(&self, id: CurveId, chi: &ChiTable) -> Result<Rational> {
        if id != CurveId::E(15) {
            return RawTraces.value(id, chi);
        }
        let class = chi.p() % 8;
        match self.winners.get(&class) {
            Some(w) => w.e15_term(chi),
            None => Err(Error::NoPrediction { t: 5, class }),
        }
    }
}

fn q(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

/// Published hypotheses: `t = 4` by class mod 4, `t = 5` by class mod 8.
pub fn claimed_coefficients(t: usize, class: u64) -> Result<CoefficientHypothesis> {
    use CurveId::E;
    let paper = HypothesisSource::Paper;
    let h = match (t, class) {
        (4, 1) => CoefficientHypothesis::new(4, 4, 1, &[(E(0), q(1, 8)), (E(1), q(1, 8)), (E(4), q(1, 16))], paper),
        (4, 3) => CoefficientHypothesis::new(4, 4, 3, &[(E(4), q(1, 16))], paper),
        (5, 7) => CoefficientHypothesis::new(
            5,
            8,
            7,
            &[(E(0), q(1, 16)), (E(1), q(1, 16)), (E(4), q(1, 16)), (E(12), q(1, 32))],
            paper,
        ),
        (5, 5) => CoefficientHypothesis::new(
            5,
            8,
            5,
            &[(E(0), q(1, 16)), (E(1), q(1, 8)), (E(4), q(3, 16)), (E(12), q(1, 32))],
            paper,
        ),
        (5, 3) => CoefficientHypothesis::new(
            5,
            8,
            3,
            &[(E(0), q(1, 8)), (E(1), q(1, 16)), (E(4), q(1, 16)), (E(12), q(1, 32)), (E(15), q(1, 16))],
            paper,
        ),
        (5, 1) => CoefficientHypothesis::new(
            5,
            8,
            1,
            &[(E(0), q(1, 8)), (E(1), q(1, 8)), (E(4), q(3, 16)), (E(12), q(1, 32)), (E(15), q(1, 16))],
            paper,
        ),
        _ => return Err(Error::NoPrediction { t, class }),
    };
    Ok(h)
}

/// Isogeny class of each subset curve with `|T| >= 3` inside `{0..4}` as
/// `(shifts, base, d)`: the Frobenius trace of `C_T` is `(d/p)` times that
/// of `base`.
const TWIST_TABLE: [(&[u8], CurveId, i64); 16] = [
    (&[0, 1, 2], CurveId::E(0), 1),
    (&[1, 2, 3], CurveId::E(0), 1),
    (&[0, 2, 4], CurveId::E(0), 2),
    (&[2, 3, 4], CurveId::E(0), 1),
    (&[0, 1, 3], CurveId::E(1), 1),
    (&[0, 2, 3], CurveId::E(1), -1),
    (&[1, 2, 4], CurveId::E(1), 1),
    (&[1, 3, 4], CurveId::E(1), -1),
    (&[0, 1, 2, 4], CurveId::E(1), 2),
    (&[0, 2, 3, 4], CurveId::E(1), 2),
    (&[0, 1, 2, 3], CurveId::E(4), 1),
    (&[0, 1, 4], CurveId::E(4), 1),
    (&[0, 3, 4], CurveId::E(4), -1),
    (&[1, 2, 3, 4], CurveId::E(4), 1),
    (&[0, 1, 3, 4], CurveId::E(4), -1),
    (&[0, 1, 2, 3, 4], CurveId::C, 1),
];

fn class_char(d: i64, modulus: u64, class: u64) -> Option<i64> {
    match d {
        1 => Some(1),
        -1 if modulus.is_multiple_of(4) => Some(if class % 4 == 1 { 1 } else { -1 }),
        2 if modulus.is_multiple_of(8) => Some(if matches!(class % 8, 1 | 7) { 1 } else { -1 }),
        _ => None,
    }
}

/// Exact coefficients over the basis `E0, E1, E4, C` for `t` in `4..=5`.
/// Curves whose sum vanishes identically on the class are left out.
pub fn derived_coefficients(t: usize, modulus: u64, class: u64) -> Result<CoefficientHypothesis> {
    if !(4..=5).contains(&t) || !matches!(modulus, 4 | 8) || class.is_multiple_of(2) || class >= modulus {
        return Err(Error::NoPrediction { t, class });
    }
    let mut sums: BTreeMap<CurveId, i64> = BTreeMap::new();
    for s in Subset::all_nonempty(t).filter(|s| s.len() >= 3) {
        let shifts: Vec<u8> = s.elements().map(|e| e - 1).collect();
        let (_, base, d) =
            TWIST_TABLE.iter().find(|(sh, _, _)| *sh == shifts.as_slice()).expect("twist table covers t <= 5");
        let sign = class_char(*d, modulus, class).ok_or(Error::NoPrediction { t, class })?;
        *sums.entry(*base).or_default() += sign;
    }
    if class % 4 == 3 {
        sums.remove(&CurveId::E(0));
    }
    if modulus == 8 && class != 1 {
        sums.remove(&CurveId::C);
    }
    let coeffs: Vec<(CurveId, Rational)> =
        sums.into_iter().map(|(id, s)| (id, Rational::new(s as i128, 1 << t))).collect();
    Ok(CoefficientHypothesis::new(t, modulus, class, &coeffs, HypothesisSource::Derived))
}

/// Residuals `n_p(t) - p/2^t - sum c_i N_i(p)` on the hypothesis' class.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientReport {
    pub t: usize,
    pub modulus: u64,
    pub class: u64,
    pub residuals: Vec<(u64, Rational)>,
}

impl CoefficientReport {
    pub fn values_mod(&self, m: u64) -> BTreeMap<u64, BTreeSet<Rational>> {
        let mut out: BTreeMap<u64, BTreeSet<Rational>> = BTreeMap::new();
        for &(p, r) in &self.residuals {
            out.entry(p % m).or_default().insert(r);
        }
        out
    }

    /// One residual per class mod `m`.
    pub fn constant_mod(&self, m: u64) -> bool {
        !self.residuals.is_empty() && self.values_mod(m).values().all(|v| v.len() == 1)
    }

    /// One residual for the whole class.
    pub fn constant_on_class(&self) -> bool {
        self.constant_mod(self.modulus)
    }
}

fn predicted_part(hyp: &CoefficientHypothesis, chi: &ChiTable, source: &dyn TraceSource) -> Result<Rational> {
    let mut sum = Rational::zero();
    for (&id, &c) in &hyp.coefficients {
        sum += c * source.value(id, chi)?;
    }
    Ok(sum)
}

fn lhs(chi: &ChiTable, t: usize) -> Rational {
    Rational::from(count_run(chi, t) as i128) - Rational::new(chi.p() as i128, 1 << t)
}

pub fn verify_coefficients(
    hyp: &CoefficientHypothesis,
    primes: &[u64],
    source: &dyn TraceSource,
) -> Result<CoefficientReport> {
    let mut residuals = Vec::new();
    for &p in primes.iter().filter(|&&p| hyp.applies_to(p)) {
        let chi = ChiTable::new(p)?;
        residuals.push((p, lhs(&chi, hyp.t) - predicted_part(hyp, &chi, source)?));
    }
    Ok(CoefficientReport { t: hyp.t, modulus: hyp.modulus, class: hyp.class, residuals })
}

/// Solves for one coefficient per basis curve and one constant per class
/// mod `offset_modulus(t)` from `train`, then checks the fit on `holdout`.
pub fn infer_coefficients(
    t: usize,
    modulus: u64,
    class: u64,
    basis: &[CurveId],
    train: &[u64],
    holdout: &[u64],
    source: &dyn TraceSource,
) -> Result<CoefficientHypothesis> {
    let l = offset_modulus(t);
    let shell = CoefficientHypothesis {
        t,
        modulus,
        class,
        coefficients: basis.iter().map(|&id| (id, Rational::from(1))).collect(),
        offsets: BTreeMap::new(),
        source: HypothesisSource::Inferred,
    };
    let train: Vec<u64> = train.iter().copied().filter(|&p| shell.applies_to(p)).collect();
    let subclasses: Vec<u64> = train.iter().map(|p| p % l).collect::<BTreeSet<_>>().into_iter().collect();
    let unknowns = basis.len() + subclasses.len();
    if train.len() < unknowns {
        return Err(Error::SampleTooSmall { have: train.len(), need: unknowns });
    }
    let mut rows = Vec::with_capacity(train.len());
    let mut rhs = Vec::with_capacity(train.len());
    for &p in &train {
        let chi = ChiTable::new(p)?;
        let mut row: Vec<Rational> = basis.iter().map(|&id| source.value(id, &chi)).collect::<Result<_>>()?;
        row.extend(subclasses.iter().map(|&c| Rational::from((p % l == c) as i128)));
        rows.push(row);
        rhs.push(lhs(&chi, t));
    }
    let x = solve_exact(&rows, &rhs)?;
    let mut hyp = shell;
    hyp.coefficients = basis.iter().copied().zip(x.iter().copied()).filter(|(_, c)| !c.is_zero()).collect();
    hyp.offsets = subclasses.iter().copied().zip(x[basis.len()..].iter().copied()).collect();
    for &p in holdout.iter().filter(|&&p| hyp.applies_to(p)) {
        let chi = ChiTable::new(p)?;
        let offset = hyp.offsets.get(&(p % l)).ok_or(Error::HoldOutMismatch(p))?;
        if lhs(&chi, t) != predicted_part(&hyp, &chi, source)? + *offset {
            return Err(Error::HoldOutMismatch(p));
        }
    }
    Ok(hyp)
}
