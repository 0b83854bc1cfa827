//! Piecewise-polynomial densities on a uniform lattice.
//!
//! A grid of order `r` is the mixture `sum_k w_k * (o + k h + h U_r)` where
//! `U_r` is a sum of `r` independent uniforms on `[0, 1)` (Irwin-Hall).
//! Order 1 is a histogram; convolving two grids with the same step is exact:
//! the weights convolve, origins add and orders add.

use alloc::vec::Vec;

use libm::floor;

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

fn powi(x: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, _| acc * x)
}

/// CDF of `U_r` at `u`.
pub(crate) fn irwin_hall_cdf(r: u32, u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= r as f64 {
        return 1.0;
    }
    // the alternating sum is better conditioned on the left half
    if u > r as f64 / 2.0 {
        return 1.0 - irwin_hall_cdf(r, r as f64 - u);
    }
    let top = floor(u) as u32;
    let s: f64 = (0..=top)
        .map(|k| {
            let term = binomial(r, k) * powi(u - k as f64, r);
            if k % 2 == 0 {
                term
            } else {
                -term
            }
        })
        .sum();
    (s / factorial(r)).clamp(0.0, 1.0)
}

/// Density of `U_r` at `u`.
pub(crate) fn irwin_hall_density(r: u32, u: f64) -> f64 {
    if u < 0.0 || u >= r as f64 {
        return 0.0;
    }
    if r == 1 {
        return 1.0;
    }
    if u > r as f64 / 2.0 {
        return irwin_hall_density(r, r as f64 - u);
    }
    let top = floor(u) as u32;
    let s: f64 = (0..=top)
        .map(|k| {
            let term = binomial(r, k) * powi(u - k as f64, r - 1);
            if k % 2 == 0 {
                term
            } else {
                -term
            }
        })
        .sum();
    (s / factorial(r - 1)).max(0.0)
}

/// `E[U_r^i]` for `i = 0..=k`.
pub(crate) fn irwin_hall_moments(r: u32, k: usize) -> Vec<f64> {
    let uniform: Vec<f64> = (0..=k).map(|i| 1.0 / (i + 1) as f64).collect();
    let mut m = alloc::vec![0.0; k + 1];
    m[0] = 1.0;
    for _ in 0..r {
        m = (0..=k).map(|i| (0..=i).map(|a| binomial(i as u32, a as u32) * m[a] * uniform[i - a]).sum()).collect();
    }
    m
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub origin: f64,
    pub step: f64,
    pub order: u32,
    pub weights: Vec<f64>,
    prefix: Vec<f64>,
}

impl Grid {
    pub fn new(origin: f64, step: f64, order: u32, weights: Vec<f64>) -> Self {
        assert!(step > 0.0 && order >= 1);
        let mut prefix = Vec::with_capacity(weights.len() + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for w in &weights {
            acc += w;
            prefix.push(acc);
        }
        Self { origin, step, order, weights, prefix }
    }

    pub fn mass(&self) -> f64 {
        *self.prefix.last().unwrap()
    }

    pub fn support(&self) -> (f64, f64) {
        let n = self.weights.len() as f64;
        (self.origin, self.origin + (n - 1.0 + self.order as f64) * self.step)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let u = (x - self.origin) / self.step;
        if u <= 0.0 {
            return 0.0;
        }
        let r = self.order as f64;
        let n = self.weights.len();
        // cells k <= u - r are complete
        let full = if u - r < 0.0 { 0 } else { ((floor(u - r) as usize) + 1).min(n) };
        let last = (floor(u) as usize).min(n.saturating_sub(1));
        let mut total = self.prefix[full];
        if full < n {
            for k in full..=last {
                total += self.weights[k] * irwin_hall_cdf(self.order, u - k as f64);
            }
        }
        total
    }

    pub fn density(&self, x: f64) -> f64 {
        let u = (x - self.origin) / self.step;
        if u < 0.0 {
            return 0.0;
        }
        let n = self.weights.len();
        let hi = floor(u) as usize;
        let lo = floor(u - self.order as f64).max(-1.0);
        let lo = (lo + 1.0) as usize;
        (lo..=hi.min(n.saturating_sub(1)))
            .map(|k| self.weights[k] * irwin_hall_density(self.order, u - k as f64))
            .sum::<f64>()
            / self.step
    }

    /// `int x^i` for `i = 0..=k`.
    pub fn moments(&self, k: usize) -> Vec<f64> {
        let ih = irwin_hall_moments(self.order, k);
        let mut out = alloc::vec![0.0; k + 1];
        for (j, &w) in self.weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let a = self.origin + j as f64 * self.step;
            for (i, o) in out.iter_mut().enumerate() {
                // E[(a + h U)^i]
                *o += w
                    * (0..=i)
                        .map(|b| {
                            binomial(i as u32, b as u32) * powi(a, (i - b) as u32) * powi(self.step, b as u32) * ih[b]
                        })
                        .sum::<f64>();
            }
        }
        out
    }

    pub fn scaled(&self, c: f64) -> Self {
        Grid { origin: self.origin * c, step: self.step * c, ..self.clone() }
    }

    pub fn shifted(&self, dx: f64, factor: f64) -> Self {
        Grid::new(self.origin + dx, self.step, self.order, self.weights.iter().map(|w| w * factor).collect())
    }

    /// Histogram of this grid on cells of width `step` aligned to 0.
    pub fn rebinned(&self, step: f64) -> Self {
        let (lo, hi) = self.support();
        let first = floor(lo / step);
        let cells = (libm::ceil(hi / step) - first).max(1.0) as usize;
        let edges: Vec<f64> = (0..=cells).map(|i| self.cdf((first + i as f64) * step)).collect();
        let weights = edges.windows(2).map(|w| (w[1] - w[0]).max(0.0)).collect();
        Grid::new(first * step, step, 1, weights)
    }

    /// Exact convolution; both grids must share a step.
    pub fn convolve(&self, other: &Grid) -> Self {
        debug_assert_eq!(self.step, other.step);
        let (a, b) = (&self.weights, &other.weights);
        let mut out = alloc::vec![0.0; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (o, &y) in out[i..].iter_mut().zip(b) {
                *o += x * y;
            }
        }
        Grid::new(self.origin + other.origin, self.step, self.order + other.order, out)
    }

    /// Draw from the grid given uniforms `u0` (cell) and `us` (one per order).
    pub(crate) fn draw(&self, u0: f64, us: impl Iterator<Item = f64>) -> f64 {
        let target = u0 * self.mass();
        let k = self.prefix.partition_point(|&c| c <= target).saturating_sub(1).min(self.weights.len() - 1);
        let offset: f64 = us.take(self.order as usize).sum();
        self.origin + (k as f64 + offset) * self.step
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn irwin_hall_basics() {
        assert_eq!(irwin_hall_cdf(1, 0.25), 0.25);
        assert!((irwin_hall_cdf(2, 1.0) - 0.5).abs() < 1e-15);
        assert!((irwin_hall_cdf(3, 1.5) - 0.5).abs() < 1e-15);
        assert!((irwin_hall_cdf(2, 0.5) - 0.125).abs() < 1e-15);
        assert!((irwin_hall_density(2, 1.0) - 1.0).abs() < 1e-15);
        assert!((irwin_hall_density(3, 1.5) - 0.75).abs() < 1e-15);
        let m = irwin_hall_moments(3, 2);
        assert!((m[1] - 1.5).abs() < 1e-14);
        assert!((m[2] - (0.25 + 2.25)).abs() < 1e-14);
        // numeric integral of the density
        let n = 30_000;
        let s: f64 =
            (0..n).map(|i| irwin_hall_density(5, (i as f64 + 0.5) * 5.0 / n as f64)).sum::<f64>() * 5.0 / n as f64;
        assert!((s - 1.0).abs() < 1e-8);
    }

    #[test]
    fn convolution_of_histograms() {
        let a = Grid::new(0.0, 0.5, 1, alloc::vec![0.5, 0.5]);
        let c = a.convolve(&a);
        assert_eq!(c.order, 2);
        assert_eq!(c.weights, [0.25, 0.5, 0.25]);
        assert_eq!(c.support(), (0.0, 2.0));
        assert!((c.cdf(1.0) - 0.5).abs() < 1e-15);
        assert!((c.mass() - 1.0).abs() < 1e-15);
        let m = c.moments(2);
        let ma = a.moments(2);
        let var = |m: &[f64]| m[2] - m[1] * m[1];
        assert!((var(&m) - 2.0 * var(&ma)).abs() < 1e-14);
    }

    #[test]
    fn rebin_preserves_mass_and_cdf_at_edges() {
        let a = Grid::new(-1.0, 0.25, 2, alloc::vec![0.1, 0.4, 0.3, 0.2]);
        let b = a.rebinned(0.125);
        assert!((b.mass() - 1.0).abs() < 1e-14);
        for x in [-1.0, -0.5, 0.0, 0.25] {
            assert!((a.cdf(x) - b.cdf(x)).abs() < 1e-14);
        }
    }
}
