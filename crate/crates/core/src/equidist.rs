//! Prime sweeps and the statistics computed from them.
//!
//! A record stores `n_p(t)` and the character sums of a fixed curve set.
//! The normalized deviation is `delta = (2^t n_p(t) - p) / sqrt p`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use libm::sqrt;

use crate::arith::primes_in_range;
use crate::curves::{char_sum, model, CurveId, Sqrt2Choice};
use crate::identities::{claimed_coefficients, genus_two_sum, RESIDUAL_BOUND};
use crate::measures::{ks, predicted_measure, EmpiricalSample, MeasureSpec, Variant};
use crate::residue::{count_run, ChiTable};
use crate::{Error, Rational, Result};

pub const MIN_KS_SAMPLE: usize = 500;
pub const MIN_INDEPENDENCE_SAMPLE: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub p: u64,
    pub class8: u64,
    pub t: usize,
    pub n_pt: u64,
    pub traces: Vec<(CurveId, i64)>,
    pub delta: f64,
}

impl SweepRecord {
    /// `2^t n_p(t) - p`, the exact numerator of `delta`.
    pub fn delta_numerator(&self) -> i64 {
        ((self.n_pt as i64) << self.t) - self.p as i64
    }

    pub fn recompute_delta(&self) -> f64 {
        delta_of(self.p, self.t, self.n_pt)
    }

    pub fn trace(&self, id: CurveId) -> Option<i64> {
        self.traces.iter().find(|(c, _)| *c == id).map(|&(_, n)| n)
    }

    /// `(n_p(t) - p/2^t) / sqrt p`.
    pub fn deviation(&self) -> f64 {
        self.delta / (1u64 << self.t) as f64
    }
}

pub fn delta_of(p: u64, t: usize, n_pt: u64) -> f64 {
    (((n_pt as i64) << t) - p as i64) as f64 / sqrt(p as f64)
}

fn curve_sum(id: CurveId, chi: &ChiTable) -> Result<i64> {
    match id {
        CurveId::C => {
            if model(id).is_bad(chi.p()) {
                return Err(Error::BadPrime { curve: alloc::format!("{id}"), p: chi.p() });
            }
            Ok(genus_two_sum(chi))
        }
        _ => Ok(char_sum(&model(id), chi, Sqrt2Choice::Smaller)?.n),
    }
}

pub fn record_for_prime(p: u64, t: usize, curves: &[CurveId]) -> Result<SweepRecord> {
    if p <= t as u64 + 2 {
        return Err(Error::PrimeTooSmall { p, t });
    }
    let chi = ChiTable::new(p)?;
    let n_pt = count_run(&chi, t);
    let traces = curves.iter().map(|&id| curve_sum(id, &chi).map(|n| (id, n))).collect::<Result<_>>()?;
    Ok(SweepRecord { p, class8: p % 8, t, n_pt, traces, delta: delta_of(p, t, n_pt) })
}

/// Records and the primes left out because some curve is bad there.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Sweep {
    pub records: Vec<SweepRecord>,
    pub skipped: Vec<(u64, Error)>,
}

/// Every prime in `lo..=hi`, in order.
pub fn sweep(t: usize, lo: u64, hi: u64, curves: &[CurveId]) -> Result<Sweep> {
    let mut out = Sweep::default();
    if hi < lo {
        return Ok(out);
    }
    let start = lo.max(t as u64 + 3);
    for p in primes_in_range(start, hi) {
        match record_for_prime(p, t, curves) {
            Ok(r) => out.records.push(r),
            Err(e @ (Error::BadPrime { .. } | Error::Sqrt2Absent(_))) => out.skipped.push((p, e)),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selector {
    Delta,
    /// `N / sqrt p` for one curve.
    Trace(CurveId),
}

/// `p = class mod modulus`; `None` keeps everything.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassFilter {
    pub modulus: u64,
    pub class: u64,
}

impl ClassFilter {
    pub fn new(modulus: u64, class: u64) -> Self {
        Self { modulus, class }
    }

    pub fn keeps(&self, p: u64) -> bool {
        p % self.modulus == self.class
    }
}

fn selected(records: &[SweepRecord], filter: Option<ClassFilter>) -> impl Iterator<Item = &SweepRecord> {
    records.iter().filter(move |r| filter.is_none_or(|f| f.keeps(r.p)))
}

pub fn empirical(records: &[SweepRecord], selector: Selector, filter: Option<ClassFilter>) -> Result<EmpiricalSample> {
    let values: Vec<f64> = selected(records, filter)
        .map(|r| match selector {
            Selector::Delta => Ok(r.delta),
            Selector::Trace(id) => {
                r.trace(id).map(|n| n as f64 / sqrt(r.p as f64)).ok_or(Error::NoPrediction { t: r.t, class: r.p % 8 })
            }
        })
        .collect::<Result<_>>()?;
    if values.is_empty() {
        return Err(Error::EmptySelection);
    }
    Ok(EmpiricalSample::new(values))
}

#[derive(Clone, Debug, PartialEq)]
pub struct KsReport {
    pub t: usize,
    pub filter: Option<ClassFilter>,
    pub selector: Selector,
    pub variant: Option<Variant>,
    pub n: usize,
    pub ks: f64,
    pub threshold: Option<f64>,
}

impl KsReport {
    /// Pass when under the threshold; reports without one always pass.
    pub fn pass(&self) -> bool {
        self.threshold.is_none_or(|th| self.ks <= th)
    }
}

/// KS distance of a selected quantity against `m`.
pub fn ks_against(
    records: &[SweepRecord],
    selector: Selector,
    filter: Option<ClassFilter>,
    m: &MeasureSpec,
    threshold: Option<f64>,
) -> Result<KsReport> {
    let e = empirical(records, selector, filter)?;
    if e.count() < MIN_KS_SAMPLE {
        return Err(Error::SampleTooSmall { have: e.count(), need: MIN_KS_SAMPLE });
    }
    Ok(KsReport {
        t: records.first().map_or(0, |r| r.t),
        filter,
        selector,
        variant: None,
        n: e.count(),
        ks: ks(&e, m),
        threshold,
    })
}

/// KS of `delta` on a class against the predicted law. `t = 4` takes a
/// class mod 4, `t = 5` a class mod 8.
pub fn ks_report(
    t: usize,
    class: u64,
    variant: Variant,
    records: &[SweepRecord],
    step: f64,
    threshold: Option<f64>,
) -> Result<KsReport> {
    let modulus = if t == 4 { 4 } else { 8 };
    let m = predicted_measure(t, class, variant, step)?;
    let mut r = ks_against(records, Selector::Delta, Some(ClassFilter::new(modulus, class)), &m, threshold)?;
    r.t = t;
    r.variant = Some(variant);
    Ok(r)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Correlation {
    pub a: CurveId,
    pub b: CurveId,
    pub n: usize,
    /// Pearson correlation of the normalized traces.
    pub linear: f64,
    /// Pearson correlation of their squares.
    pub squared: f64,
    pub bound: f64,
}

impl Correlation {
    pub fn pass(&self) -> bool {
        self.linear.abs() <= self.bound && self.squared.abs() <= self.bound
    }
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        // a constant sequence is independent of anything, unless both are
        return if sxx == syy { 1.0 } else { 0.0 };
    }
    sxy / sqrt(sxx * syy)
}

pub fn independence_report(
    pairs: &[(CurveId, CurveId)],
    records: &[SweepRecord],
    filter: Option<ClassFilter>,
) -> Result<Vec<Correlation>> {
    pairs
        .iter()
        .map(|&(a, b)| {
            let x = empirical(records, Selector::Trace(a), filter)?.values;
            let y = empirical(records, Selector::Trace(b), filter)?.values;
            if x.len() < MIN_INDEPENDENCE_SAMPLE {
                return Err(Error::SampleTooSmall { have: x.len(), need: MIN_INDEPENDENCE_SAMPLE });
            }
            let sq = |v: &[f64]| v.iter().map(|z| z * z).collect::<Vec<_>>();
            Ok(Correlation {
                a,
                b,
                n: x.len(),
                linear: pearson(&x, &y),
                squared: pearson(&sq(&x), &sq(&y)),
                bound: 3.0 / sqrt(x.len() as f64),
            })
        })
        .collect()
}

/// Largest and smallest deviation `(n_p(t) - p/2^t)/sqrt p` on one class.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassExtrema {
    pub modulus: u64,
    pub class: u64,
    pub count: usize,
    pub max: (f64, u64),
    pub min: (f64, u64),
    /// Bound on `|deviation|` from the published coefficients.
    pub bound: Rational,
    /// The same bound as published (for `t = 5` the stated quantity is
    /// half the deviation).
    pub stated_bound: Rational,
    /// Unconditional constant `c` for which primes with `|deviation| >= c`
    /// are asserted to exist, where one is stated.
    pub target: Option<Rational>,
    /// Records exceeding `bound + 2^t K / sqrt p`.
    pub violations: Vec<u64>,
}

impl ClassExtrema {
    pub fn gap(&self) -> f64 {
        crate::measures::to_f64(self.bound) - self.max.0.abs().max(self.min.0.abs())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtremaReport {
    pub t: usize,
    pub classes: Vec<ClassExtrema>,
    /// The corollary restating these bounds attaches 13/32 to class 3 and
    /// 11/32 to class 5, the reverse of the theorem.
    pub label_conflict: bool,
}

impl ExtremaReport {
    pub fn safe(&self) -> bool {
        self.classes.iter().all(|c| c.violations.is_empty())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassBound {
    pub modulus: u64,
    pub class: u64,
    /// On `|deviation|`.
    pub bound: Rational,
    pub stated: Rational,
    pub target: Option<Rational>,
}

pub fn extrema_bounds(t: usize) -> Result<Vec<ClassBound>> {
    let classes: &[u64] = match t {
        4 => &[1, 3],
        5 => &[1, 3, 5, 7],
        _ => return Err(Error::NoPrediction { t, class: 0 }),
    };
    let modulus = if t == 4 { 4 } else { 8 };
    classes
        .iter()
        .map(|&class| {
            let bound = claimed_coefficients(t, class)?.abs_sum() * Rational::from(2);
            let stated = if t == 4 { bound } else { bound / Rational::from(2) };
            let target = match (t, class) {
                (4, 1) => Some(Rational::new(3, 8)),
                (4, _) => None,
                (_, 3) => Some(Rational::new(3, 16)),
                _ => Some(Rational::new(1, 16)),
            };
            Ok(ClassBound { modulus, class, bound, stated, target })
        })
        .collect()
}

pub fn extrema_report(t: usize, records: &[SweepRecord]) -> Result<ExtremaReport> {
    if records.is_empty() {
        return Err(Error::EmptySelection);
    }
    let k = crate::measures::to_f64(RESIDUAL_BOUND);
    let mut classes = Vec::new();
    for ClassBound { modulus, class, bound, stated: stated_bound, target } in extrema_bounds(t)? {
        let b = crate::measures::to_f64(bound);
        let mut ext: Option<ClassExtrema> = None;
        for r in records.iter().filter(|r| r.t == t && r.p % modulus == class) {
            let x = r.deviation();
            let e = ext.get_or_insert(ClassExtrema {
                modulus,
                class,
                count: 0,
                max: (x, r.p),
                min: (x, r.p),
                bound,
                stated_bound,
                target,
                violations: Vec::new(),
            });
            e.count += 1;
            if x > e.max.0 {
                e.max = (x, r.p);
            }
            if x < e.min.0 {
                e.min = (x, r.p);
            }
            if x.abs() > b + (1u64 << t) as f64 * k / sqrt(r.p as f64) {
                e.violations.push(r.p);
            }
        }
        classes.extend(ext);
    }
    Ok(ExtremaReport { t, classes, label_conflict: t == 5 })
}

/// Records grouped by `p mod modulus`.
pub fn by_class(records: &[SweepRecord], modulus: u64) -> BTreeMap<u64, Vec<&SweepRecord>> {
    let mut out: BTreeMap<u64, Vec<&SweepRecord>> = BTreeMap::new();
    for r in records {
        out.entry(r.p % modulus).or_default().push(r);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identities::decomposition_residual;
    use crate::measures::{nu2, DEFAULT_STEP};
    use CurveId::E;

    #[test]
    fn small_sweep() {
        let s = sweep(4, 10, 100, &[E(0), E(1), E(4)]).unwrap();
        assert_eq!(s.records.len(), 21);
        assert!(s.skipped.is_empty());
        assert_eq!(s.records[0].p, 11);
        assert!(sweep(4, 100, 10, &[E(0)]).unwrap().records.is_empty());
        let split: Vec<_> = sweep(4, 10, 50, &[E(0), E(1), E(4)])
            .unwrap()
            .records
            .into_iter()
            .chain(sweep(4, 51, 100, &[E(0), E(1), E(4)]).unwrap().records)
            .collect();
        assert_eq!(split, s.records);
    }

    #[test]
    fn bad_primes_are_skipped() {
        let s = sweep(5, 3, 40, &[E(0), CurveId::C]).unwrap();
        assert!(s.records.iter().all(|r| r.p > 7));
        let s = sweep(5, 3, 40, &[E(15)]).unwrap();
        assert!(s.skipped.iter().any(|(p, e)| *p == 11 && *e == Error::Sqrt2Absent(11)));
    }

    #[test]
    fn delta_against_residual() {
        let s = sweep(4, 10, 3000, &[E(4)]).unwrap();
        for r in s.records.iter().filter(|r| r.p % 4 == 3) {
            let res = decomposition_residual(r.p, 4).unwrap();
            // the six pair sums are -1 each; the cubic sums cancel in twist pairs
            let n4 = r.trace(E(4)).unwrap() as f64;
            let want = (n4 - 6.0 + 16.0 * crate::measures::to_f64(res)) / sqrt(r.p as f64);
            assert!((r.delta - want).abs() < 1e-9, "p={}", r.p);
            assert_eq!(r.delta, r.recompute_delta());
        }
    }

    #[test]
    fn empirical_selection() {
        let s = sweep(4, 10, 5000, &[E(0), E(4), CurveId::C]).unwrap().records;
        let a0 = empirical(&s, Selector::Trace(E(0)), Some(ClassFilter::new(4, 3))).unwrap();
        assert!(a0.values.iter().all(|&v| v == 0.0));
        let a0 = empirical(&s, Selector::Trace(E(0)), Some(ClassFilter::new(4, 1))).unwrap();
        assert!(a0.values.iter().all(|&v| v != 0.0));
        let a4 = empirical(&s, Selector::Trace(E(4)), None).unwrap();
        assert!(a4.values.iter().all(|v| v.abs() <= 3.0));
        // the quartic model has two points at infinity: |N + 1| <= 2 sqrt p
        assert!(s.iter().all(|r| (r.trace(E(4)).unwrap() + 1).pow(2) <= 4 * r.p as i64));
        let ac = empirical(&s, Selector::Trace(CurveId::C), None).unwrap();
        assert!(ac.values.iter().all(|v| v.abs() <= 4.0));
        assert_eq!(empirical(&s, Selector::Delta, Some(ClassFilter::new(4, 0))), Err(Error::EmptySelection));
    }

    #[test]
    fn small_samples_rejected() {
        let s = sweep(4, 10, 1000, &[E(0), E(4)]).unwrap().records;
        assert!(matches!(
            ks_report(4, 3, Variant::ClassAware, &s, DEFAULT_STEP, Some(0.05)),
            Err(Error::SampleTooSmall { .. })
        ));
        assert!(matches!(independence_report(&[(E(0), E(4))], &s, None), Err(Error::SampleTooSmall { .. })));
    }

    #[test]
    fn statistics_on_a_moderate_sweep() {
        let s = sweep(4, 10, 30_000, &[E(0), E(1), E(2), E(4)]).unwrap().records;
        let r = ks_report(4, 3, Variant::ClassAware, &s, DEFAULT_STEP, Some(0.1)).unwrap();
        assert!(r.pass(), "{}", r.ks);
        let r = ks_against(&s, Selector::Trace(E(4)), None, &nu2(), Some(0.1)).unwrap();
        assert!(r.pass());
        let c = independence_report(&[(E(0), E(0)), (E(1), E(2))], &s, Some(ClassFilter::new(4, 1))).unwrap();
        assert!((c[0].linear - 1.0).abs() < 1e-12);
        assert!((c[1].linear - 1.0).abs() < 1e-12);
        assert!(!c[1].pass());
    }

    #[test]
    fn extrema_bounds_and_safety() {
        let b = extrema_bounds(5).unwrap();
        let stated: Vec<Rational> = b.iter().map(|x| x.stated).collect();
        assert_eq!(stated, [Rational::new(17, 32), Rational::new(11, 32), Rational::new(13, 32), Rational::new(7, 32)]);
        let b4: Vec<Rational> = extrema_bounds(4).unwrap().iter().map(|x| x.bound).collect();
        assert_eq!(b4, [Rational::new(5, 8), Rational::new(1, 8)]);
        let s = sweep(4, 10, 20_000, &[]).unwrap().records;
        let rep = extrema_report(4, &s).unwrap();
        assert!(rep.safe());
        assert_eq!(rep.classes.len(), 2);
        assert!(rep.classes.iter().all(|c| c.max.0 > 0.0 && c.min.0 < 0.0));
        assert_eq!(extrema_report(4, &[]), Err(Error::EmptySelection));
    }

    #[test]
    fn pearson_basics() {
        assert!((pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]) - 1.0).abs() < 1e-15);
        assert!((pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]) + 1.0).abs() < 1e-15);
        assert_eq!(pearson(&[0.0, 0.0], &[0.0, 0.0]), 1.0);
        assert_eq!(pearson(&[0.0, 0.0], &[1.0, 2.0]), 0.0);
    }
}
