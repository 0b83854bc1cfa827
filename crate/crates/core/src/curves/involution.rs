//! Exhaustive check of candidate extra involutions of
//! `C: y^2 = F(x) = x(x+1)(x+2)(x+3)(x+4)` over `F_p`.

use alloc::vec::Vec;

use crate::arith::{inv_mod, mul_mod, sqrt_mod};
use crate::residue::ChiTable;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InvolutionVariant {
    /// `(x, y) -> (-(2x+6)/(x+2), 2 sqrt2 y / (x+2)^3)`, as printed.
    Printed,
    /// `(x, y) -> (2/(x+2) - 2, 2 sqrt2 y / (x+2)^3)`, the map matching the
    /// identity `(x+2)^6 F(2/(x+2) - 2) = 8 F(x)`.
    Reciprocal,
    /// `(x, y) -> (-(2x+6)/(x+2), 2 sqrt(-2) y / (x+2)^3)`; needs `(-2/p) = 1`.
    PrintedMinusTwo,
}

impl InvolutionVariant {
    pub const ALL: [InvolutionVariant; 3] =
        [InvolutionVariant::Printed, InvolutionVariant::Reciprocal, InvolutionVariant::PrintedMinusTwo];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InvolutionOutcome {
    pub variant: InvolutionVariant,
    /// Square root used for the `y` scale factor.
    pub root: u64,
    pub preserves_curve: bool,
    pub involutive: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvolutionReport {
    pub p: u64,
    pub points_checked: usize,
    pub outcomes: Vec<InvolutionOutcome>,
}

impl InvolutionReport {
    fn variant_holds(&self, v: InvolutionVariant) -> Option<bool> {
        let mut it = self.outcomes.iter().filter(|o| o.variant == v).peekable();
        it.peek()?;
        Some(it.all(|o| o.preserves_curve && o.involutive))
    }

    /// Whether the printed map is an automorphism of `C` for both roots.
    pub fn printed_holds(&self) -> bool {
        self.variant_holds(InvolutionVariant::Printed).unwrap_or(false)
    }

    /// Variants that map `C(F_p)` to itself and square to the identity.
    pub fn genuine(&self) -> Vec<InvolutionVariant> {
        InvolutionVariant::ALL.into_iter().filter(|&v| self.variant_holds(v) == Some(true)).collect()
    }
}

fn quintic(x: u64, p: u64) -> u64 {
    (0..5).fold(1, |acc, i| mul_mod(acc, (x + i) % p, p))
}

struct Map {
    variant: InvolutionVariant,
    scale: u64,
    p: u64,
}

impl Map {
    /// Image of an affine point with `x != -2`.
    fn apply(&self, x: u64, y: u64) -> (u64, u64) {
        let p = self.p;
        let s = (x + 2) % p;
        let s_inv = inv_mod(s, p);
        let nx = match self.variant {
            InvolutionVariant::Reciprocal => (mul_mod(2, s_inv, p) + p - 2) % p,
            _ => mul_mod((p - (2 * x + 6) % p) % p, s_inv, p),
        };
        let s3 = mul_mod(mul_mod(s_inv, s_inv, p), s_inv, p);
        let ny = mul_mod(mul_mod(2 * self.scale % p, y, p), s3, p);
        (nx, ny)
    }
}

/// Checks every affine point of `C(F_p)` off `x = -2` against each variant
/// and each square root. Requires `(2/p) = 1` and good reduction.
pub fn involution_verify(p: u64) -> Result<InvolutionReport> {
    let chi = ChiTable::new(p)?;
    if p == 3 {
        return Err(Error::BadPrime { curve: "C".into(), p });
    }
    let (r_lo, r_hi) = sqrt_mod(2, p).ok_or(Error::Sqrt2Absent(p))?;
    let mut points = Vec::new();
    for x in 0..p {
        if x == p - 2 {
            continue;
        }
        let v = quintic(x, p);
        if v == 0 {
            points.push((x, 0));
        } else if chi.get_reduced(v) == 1 {
            let (a, b) = sqrt_mod(v, p).expect("residue");
            points.push((x, a));
            points.push((x, b));
        }
    }
    let mut outcomes = Vec::new();
    let minus_two = sqrt_mod(p - 2, p);
    for variant in InvolutionVariant::ALL {
        let roots = match variant {
            InvolutionVariant::PrintedMinusTwo => match minus_two {
                Some((a, b)) => [a, b],
                None => continue,
            },
            _ => [r_lo, r_hi],
        };
        for root in roots {
            let map = Map { variant, scale: root, p };
            let mut preserves = true;
            let mut involutive = true;
            for &(x, y) in &points {
                let (nx, ny) = map.apply(x, y);
                if mul_mod(ny, ny, p) != quintic(nx, p) {
                    preserves = false;
                }
                if map.apply(nx, ny) != (x, y) {
                    involutive = false;
                }
            }
            outcomes.push(InvolutionOutcome { variant, root, preserves_curve: preserves, involutive });
        }
    }
    Ok(InvolutionReport { p, points_checked: points.len(), outcomes })
}
