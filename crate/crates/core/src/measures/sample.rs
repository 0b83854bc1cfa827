//! Seeded sampling and the Kolmogorov-Smirnov distance.

use alloc::vec::Vec;

use libm::{asin, sin, sqrt};
use rand_core::{Rng, SeedableRng};
use rand_pcg::Pcg64Mcg;

use super::{to_f64, Kind, MeasureSpec, Primitive};

#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalSample {
    pub values: Vec<f64>,
}

impl EmpiricalSample {
    pub fn new(values: Vec<f64>) -> Self {
        assert!(values.iter().all(|v| v.is_finite()), "non-finite sample value");
        Self { values }
    }

    pub fn count(&self) -> usize {
        self.values.len()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

fn uniform(rng: &mut Pcg64Mcg) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard semicircle quantile on `[-1, 1]` by bisection.
fn semicircle_quantile(u: f64) -> f64 {
    let f = |y: f64| 0.5 + (y * sqrt(1.0 - y * y) + asin(y)) / core::f64::consts::PI;
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn draw_primitive(p: &Primitive, u: f64) -> f64 {
    let y = match p.kind {
        Kind::Arcsine => sin(core::f64::consts::PI * (u - 0.5)),
        Kind::Semicircle => semicircle_quantile(u),
    };
    p.center + p.radius * y
}

fn draw(m: &MeasureSpec, weights: &[f64], rng: &mut Pcg64Mcg) -> f64 {
    let total = *weights.last().unwrap();
    let pick = uniform(rng) * total;
    let i = weights.partition_point(|&w| w <= pick).min(weights.len() - 1);
    let na = m.atoms.len();
    let nc = m.components.len();
    if i < na {
        m.atoms[i].x
    } else if i < na + nc {
        draw_primitive(&m.components[i - na], uniform(rng))
    } else {
        let g = &m.grids[i - na - nc];
        let u0 = uniform(rng);
        let us: Vec<f64> = (0..g.order).map(|_| uniform(rng)).collect();
        g.draw(u0, us.into_iter())
    }
}

fn cumulative_weights(m: &MeasureSpec) -> Vec<f64> {
    let masses = m
        .atoms
        .iter()
        .map(|a| to_f64(a.mass))
        .chain(m.components.iter().map(|c| to_f64(c.mass)))
        .chain(m.grids.iter().map(|g| g.mass()));
    let mut acc = 0.0;
    masses
        .map(|w| {
            acc += w;
            acc
        })
        .collect()
}

/// `n` independent draws, reproducible from `seed`.
pub fn sample(m: &MeasureSpec, n: usize, seed: u64) -> EmpiricalSample {
    let mut rng = Pcg64Mcg::seed_from_u64(seed);
    let w = cumulative_weights(m);
    EmpiricalSample::new((0..n).map(|_| draw(m, &w, &mut rng)).collect())
}

/// `n` draws of `X_1 + ... + X_k` with `X_i` independent from `factors[i]`.
pub fn sample_sum(factors: &[MeasureSpec], n: usize, seed: u64) -> EmpiricalSample {
    let mut rng = Pcg64Mcg::seed_from_u64(seed);
    let ws: Vec<Vec<f64>> = factors.iter().map(cumulative_weights).collect();
    EmpiricalSample::new((0..n).map(|_| factors.iter().zip(&ws).map(|(m, w)| draw(m, w, &mut rng)).sum()).collect())
}

/// `sup_x |F_n(x) - F(x)|`, evaluated on both sides of every sample point.
pub fn ks(e: &EmpiricalSample, m: &MeasureSpec) -> f64 {
    assert!(e.count() > 0, "empty sample");
    let mut v = e.values.clone();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut d = 0.0f64;
    let mut i = 0;
    while i < v.len() {
        let x = v[i];
        let mut j = i;
        while j < v.len() && v[j] == x {
            j += 1;
        }
        let below = i as f64 / n;
        let upto = j as f64 / n;
        d = d.max((below - m.cdf_left(x)).abs()).max((upto - m.cdf(x)).abs());
        i = j;
    }
    d
}
