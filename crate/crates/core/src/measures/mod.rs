//! Sato-Tate type measures on the line: atoms, semicircle and arcsine laws,
//! their dilations and convolutions.

mod grid;
mod predicted;
mod sample;

use alloc::vec::Vec;

use libm::{asin, floor, sqrt};
use num_traits::Zero;

pub use grid::Grid;
pub use predicted::{
    class_aware_factors, class_aware_measure, lambda_cm, paper_factors, predicted_factors, predicted_measure, Variant,
};
pub use sample::{ks, sample, sample_sum, EmpiricalSample};

use crate::{Error, Rational, Result};

/// Default convolution grid step.
pub const DEFAULT_STEP: f64 = 1.0 / 512.0;

const MASS_TOLERANCE: f64 = 1e-9;
const RENORMALIZE_LIMIT: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    /// Density `2 sqrt(R^2 - x^2) / (pi R^2)`.
    Semicircle,
    /// Density `1 / (pi sqrt(R^2 - x^2))`.
    Arcsine,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Primitive {
    pub kind: Kind,
    pub radius: f64,
    pub mass: Rational,
    pub center: f64,
}

impl Primitive {
    fn m(&self) -> f64 {
        to_f64(self.mass)
    }

    fn standard(&self, x: f64) -> f64 {
        ((x - self.center) / self.radius).clamp(-1.0, 1.0)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let y = self.standard(x);
        let f = match self.kind {
            Kind::Semicircle => 0.5 + (y * sqrt(1.0 - y * y) + asin(y)) / core::f64::consts::PI,
            Kind::Arcsine => 0.5 + asin(y) / core::f64::consts::PI,
        };
        self.m() * f.clamp(0.0, 1.0)
    }

    pub fn density(&self, x: f64) -> f64 {
        let y = (x - self.center) / self.radius;
        if y.abs() >= 1.0 {
            return 0.0;
        }
        let pi = core::f64::consts::PI;
        self.m()
            * match self.kind {
                Kind::Semicircle => 2.0 * sqrt(1.0 - y * y) / (pi * self.radius),
                Kind::Arcsine => 1.0 / (pi * self.radius * sqrt(1.0 - y * y)),
            }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.radius, self.center + self.radius)
    }

    /// `int x^i` for `i = 0..=k`.
    fn moments(&self, k: usize) -> Vec<f64> {
        // moments of the law rescaled to [-1, 1]
        let std: Vec<f64> = (0..=k)
            .map(|j| {
                if j % 2 == 1 {
                    return 0.0;
                }
                let half = j / 2;
                let central = binomial(j, half) / pow2(j);
                match self.kind {
                    Kind::Arcsine => central,
                    Kind::Semicircle => central / (half + 1) as f64,
                }
            })
            .collect();
        (0..=k)
            .map(|i| {
                self.m()
                    * (0..=i)
                        .map(|j| binomial(i, j) * powi(self.center, i - j) * powi(self.radius, j) * std[j])
                        .sum::<f64>()
            })
            .collect()
    }

    /// Histogram with exact cell masses on cells of width `step` aligned to 0.
    fn discretize(&self, step: f64) -> Grid {
        let (lo, hi) = self.support();
        let first = floor(lo / step + 1e-9);
        let cells = (libm::ceil(hi / step - 1e-9) - first).max(1.0) as usize;
        let edges: Vec<f64> = (0..=cells).map(|i| self.cdf((first + i as f64) * step)).collect();
        let weights = edges.windows(2).map(|w| (w[1] - w[0]).max(0.0)).collect();
        Grid::new(first * step, step, 1, weights)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub x: f64,
    pub mass: Rational,
}

/// A finite combination of atoms, primitive laws and lattice densities.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureSpec {
    pub atoms: Vec<Atom>,
    pub components: Vec<Primitive>,
    pub grids: Vec<Grid>,
    support: (f64, f64),
}

pub(crate) fn to_f64(q: Rational) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn powi(x: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, _| acc * x)
}

fn pow2(n: usize) -> f64 {
    powi(2.0, n)
}

fn hull(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0.min(b.0), a.1.max(b.1))
}

impl MeasureSpec {
    fn from_parts(atoms: Vec<Atom>, components: Vec<Primitive>, grids: Vec<Grid>, support: (f64, f64)) -> Self {
        let mut m = MeasureSpec { atoms, components, grids, support };
        m.merge_atoms();
        m
    }

    fn merge_atoms(&mut self) {
        self.atoms.sort_by(|a, b| a.x.total_cmp(&b.x));
        let mut merged: Vec<Atom> = Vec::with_capacity(self.atoms.len());
        for a in self.atoms.drain(..) {
            match merged.last_mut() {
                Some(last) if last.x == a.x => last.mass += a.mass,
                _ => merged.push(a),
            }
        }
        merged.retain(|a| !a.mass.is_zero());
        self.atoms = merged;
    }

    pub fn atom(x: f64, mass: Rational) -> Self {
        Self::from_parts(alloc::vec![Atom { x, mass }], Vec::new(), Vec::new(), (x, x))
    }

    pub fn primitive(kind: Kind, radius: f64, mass: Rational) -> Result<Self> {
        if radius <= 0.0 || !radius.is_finite() {
            return Err(Error::NonPositiveScale);
        }
        let p = Primitive { kind, radius, mass, center: 0.0 };
        Ok(Self::from_parts(Vec::new(), alloc::vec![p], Vec::new(), p.support()))
    }

    pub fn semicircle(radius: f64, mass: Rational) -> Result<Self> {
        Self::primitive(Kind::Semicircle, radius, mass)
    }

    pub fn arcsine(radius: f64, mass: Rational) -> Result<Self> {
        Self::primitive(Kind::Arcsine, radius, mass)
    }

    /// Sum of two measures (not a probability in general).
    pub fn plus(&self, other: &MeasureSpec) -> Self {
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);
        let mut comps = self.components.clone();
        comps.extend_from_slice(&other.components);
        let mut grids = self.grids.clone();
        grids.extend(other.grids.iter().cloned());
        let support = if self.is_empty() {
            other.support
        } else if other.is_empty() {
            self.support
        } else {
            hull(self.support, other.support)
        };
        Self::from_parts(atoms, comps, grids, support)
    }

    fn is_empty(&self) -> bool {
        self.atoms.is_empty() && self.components.is_empty() && self.grids.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|a| to_f64(a.mass)).sum::<f64>()
            + self.components.iter().map(Primitive::m).sum::<f64>()
            + self.grids.iter().map(Grid::mass).sum::<f64>()
    }

    pub fn is_probability(&self) -> bool {
        (self.mass() - 1.0).abs() <= MASS_TOLERANCE
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// `mu((-inf, x])`.
    pub fn cdf(&self, x: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().filter(|a| a.x <= x).map(|a| to_f64(a.mass)).sum();
        atoms + self.continuous_cdf(x)
    }

    /// `mu((-inf, x))`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().filter(|a| a.x < x).map(|a| to_f64(a.mass)).sum();
        atoms + self.continuous_cdf(x)
    }

    /// Distribution function of the absolutely continuous part.
    pub fn continuous_cdf(&self, x: f64) -> f64 {
        self.components.iter().map(|c| c.cdf(x)).sum::<f64>() + self.grids.iter().map(|g| g.cdf(x)).sum::<f64>()
    }

    /// Density of the absolutely continuous part.
    pub fn density(&self, x: f64) -> f64 {
        self.components.iter().map(|c| c.density(x)).sum::<f64>() + self.grids.iter().map(|g| g.density(x)).sum::<f64>()
    }

    /// Average continuous density over `[x - h/2, x + h/2]`; finite even at
    /// arcsine endpoints.
    pub fn cell_density(&self, x: f64, h: f64) -> f64 {
        (self.continuous_cdf(x + h / 2.0) - self.continuous_cdf(x - h / 2.0)) / h
    }

    pub fn moment(&self, k: usize) -> f64 {
        self.atoms.iter().map(|a| to_f64(a.mass) * powi(a.x, k)).sum::<f64>()
            + self.components.iter().map(|c| c.moments(k)[k]).sum::<f64>()
            + self.grids.iter().map(|g| g.moments(k)[k]).sum::<f64>()
    }

    pub fn variance(&self) -> f64 {
        let m1 = self.moment(1);
        self.moment(2) - m1 * m1
    }

    /// Pushforward under `x -> c x`.
    pub fn scale(&self, c: f64) -> Result<Self> {
        if c <= 0.0 || !c.is_finite() {
            return Err(Error::NonPositiveScale);
        }
        let atoms = self.atoms.iter().map(|a| Atom { x: a.x * c, mass: a.mass }).collect();
        let comps =
            self.components.iter().map(|p| Primitive { radius: p.radius * c, center: p.center * c, ..*p }).collect();
        let grids = self.grids.iter().map(|g| g.scaled(c)).collect();
        Ok(Self::from_parts(atoms, comps, grids, (self.support.0 * c, self.support.1 * c)))
    }

    fn check_probability(&self) -> Result<()> {
        if self.is_probability() {
            Ok(())
        } else {
            Err(Error::NotProbability(self.mass()))
        }
    }

    /// Law of the sum of independent draws, densities discretized on `step`.
    pub fn convolve_with_step(&self, other: &MeasureSpec, step: f64) -> Result<Self> {
        self.check_probability()?;
        other.check_probability()?;
        if step <= 0.0 || !step.is_finite() {
            return Err(Error::NonPositiveScale);
        }
        let mut atoms = Vec::new();
        let mut comps = Vec::new();
        let mut grids: Vec<Grid> = Vec::new();
        for a in &self.atoms {
            for b in &other.atoms {
                atoms.push(Atom { x: a.x + b.x, mass: a.mass * b.mass });
            }
        }
        let translate = |a: &Atom, src: &MeasureSpec, comps: &mut Vec<Primitive>, grids: &mut Vec<Grid>| {
            for p in &src.components {
                comps.push(Primitive { mass: p.mass * a.mass, center: p.center + a.x, ..*p });
            }
            for g in &src.grids {
                grids.push(g.shifted(a.x, to_f64(a.mass)));
            }
        };
        for a in &self.atoms {
            translate(a, other, &mut comps, &mut grids);
        }
        for b in &other.atoms {
            translate(b, self, &mut comps, &mut grids);
        }
        let lattice = |m: &MeasureSpec| -> Vec<Grid> {
            m.components
                .iter()
                .map(|p| p.discretize(step))
                .chain(m.grids.iter().map(|g| if g.step == step { g.clone() } else { g.rebinned(step) }))
                .collect()
        };
        let (la, lb) = (lattice(self), lattice(other));
        for ga in &la {
            for gb in &lb {
                grids.push(ga.convolve(gb));
            }
        }
        let support = (self.support.0 + other.support.0, self.support.1 + other.support.1);
        let mut out = Self::from_parts(atoms, comps, grids, support);
        let drift = out.mass() - 1.0;
        if drift.abs() >= RENORMALIZE_LIMIT {
            return Err(Error::MassDrift(drift));
        }
        let grid_mass: f64 = out.grids.iter().map(Grid::mass).sum();
        if drift != 0.0 && grid_mass > 0.0 {
            let f = (grid_mass - drift) / grid_mass;
            out.grids = out.grids.iter().map(|g| g.shifted(0.0, f)).collect();
        }
        Ok(out)
    }

    pub fn convolve(&self, other: &MeasureSpec) -> Result<Self> {
        self.convolve_with_step(other, DEFAULT_STEP)
    }

    /// Convolution of a nonempty list.
    pub fn convolve_all(factors: &[MeasureSpec], step: f64) -> Result<Self> {
        let (first, rest) = factors.split_first().ok_or(Error::EmptySelection)?;
        rest.iter().try_fold(first.clone(), |acc, m| acc.convolve_with_step(m, step))
    }

    /// Same measure with every primitive replaced by its histogram on
    /// `step`; this is what convolution actually combines.
    pub fn on_grid(&self, step: f64) -> Self {
        let mut grids: Vec<Grid> = self.components.iter().map(|p| p.discretize(step)).collect();
        grids.extend(self.grids.iter().cloned());
        Self::from_parts(self.atoms.clone(), Vec::new(), grids, self.support)
    }

    /// Reflection `x -> -x` leaves the measure unchanged, up to `tol` in the
    /// distribution function at the sample points.
    pub fn is_even(&self, tol: f64) -> bool {
        let (lo, hi) = self.support;
        let r = hi.max(-lo);
        (0..=200).all(|i| {
            let x = -r + 2.0 * r * i as f64 / 200.0;
            (self.cdf(x) - (1.0 - self.cdf_left(-x))).abs() <= tol
        })
    }
}

/// CM law: `1/2 delta_0 + arcsine(2, 1/2)`.
pub fn nu1() -> MeasureSpec {
    MeasureSpec::atom(0.0, Rational::new(1, 2))
        .plus(&MeasureSpec::arcsine(2.0, Rational::new(1, 2)).expect("positive radius"))
}

/// Semicircle law on `[-2, 2]`.
pub fn nu2() -> MeasureSpec {
    MeasureSpec::semicircle(2.0, Rational::from(1)).expect("positive radius")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn primitive_laws() {
        let (n1, n2) = (nu1(), nu2());
        assert!(n1.is_probability() && n2.is_probability());
        assert_eq!(n2.cdf(0.0), 0.5);
        assert!(close(n1.cdf(0.0), 0.75, 1e-15));
        assert!(close(n1.cdf_left(0.0), 0.25, 1e-15));
        assert!(close(n2.moment(2), 1.0, 1e-14));
        assert!(close(n1.moment(2), 1.0, 1e-14));
        assert!(close(n2.moment(4), 2.0, 1e-14));
        assert!(close(n1.moment(4), 3.0, 1e-14));
        assert_eq!(n2.moment(0), 1.0);
        assert_eq!(n2.support(), (-2.0, 2.0));
        assert!(close(n2.density(0.0), 1.0 / core::f64::consts::PI, 1e-15));
        assert!(n1.is_even(1e-12) && n2.is_even(1e-12));
    }

    #[test]
    fn scaling() {
        let mu = nu2().scale(2.0).unwrap();
        assert_eq!(mu, MeasureSpec::semicircle(4.0, Rational::from(1)).unwrap());
        assert_eq!(mu.support(), (-4.0, 4.0));
        let l = nu1().scale(2.0).unwrap();
        assert_eq!(
            l,
            MeasureSpec::atom(0.0, Rational::new(1, 2)).plus(&MeasureSpec::arcsine(4.0, Rational::new(1, 2)).unwrap())
        );
        assert_eq!(nu1().scale(1.0).unwrap(), nu1());
        assert_eq!(nu2().scale(0.0), Err(Error::NonPositiveScale));
        assert_eq!(nu2().scale(-1.0), Err(Error::NonPositiveScale));
    }

    #[test]
    fn convolution_identity_and_supports() {
        let delta = MeasureSpec::atom(0.0, Rational::from(1));
        assert_eq!(delta.convolve(&nu2()).unwrap(), nu2());
        let m = nu1().scale(2.0).unwrap().convolve(&nu2().scale(2.0).unwrap()).unwrap().convolve(&nu2()).unwrap();
        assert_eq!(m.support(), (-10.0, 10.0));
        assert!(m.is_probability());
        assert!(close(m.cdf(10.0), 1.0, 1e-9) && m.cdf(-10.0) < 1e-12);
        assert!(m.is_even(1e-9));
        assert!(close(m.variance(), 4.0 + 4.0 + 1.0, 1e-4), "{}", m.variance());
        let grid_var: f64 = [nu1().scale(2.0).unwrap(), nu2().scale(2.0).unwrap(), nu2()]
            .iter()
            .map(|f| f.on_grid(DEFAULT_STEP).variance())
            .sum();
        assert!(close(m.variance(), grid_var, 1e-9));
    }

    #[test]
    fn grid_step_mismatch_rebins() {
        let a = nu2().convolve(&nu2()).unwrap().scale(1.5).unwrap();
        let b = a.convolve(&nu2()).unwrap();
        assert!(b.is_probability());
        assert_eq!(b.support(), (-8.0, 8.0));
        assert!(close(b.variance(), 2.0 * 2.25 + 1.0, 1e-5));
    }

    #[test]
    fn non_probability_rejected() {
        let half = MeasureSpec::arcsine(4.0, Rational::new(1, 2)).unwrap();
        assert!(matches!(half.convolve(&nu2()), Err(Error::NotProbability(_))));
        assert!(matches!(MeasureSpec::convolve_all(&[], DEFAULT_STEP), Err(Error::EmptySelection)));
    }

    #[test]
    fn cell_density_is_finite_at_arcsine_endpoints() {
        let a = MeasureSpec::arcsine(2.0, Rational::from(1)).unwrap();
        let d = a.cell_density(2.0, DEFAULT_STEP);
        assert!(d.is_finite() && d > 0.0);
        assert_eq!(a.density(2.0), 0.0);
    }
}
