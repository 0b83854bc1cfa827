use super::CurveModel;
use crate::quad::QuadRational;
use crate::{Error, Result};

/// `j = 256 (l^2 - l + 1)^3 / (l^2 (l - 1)^2)`.
pub fn j_of_lambda(lambda: QuadRational) -> Result<QuadRational> {
    let one = QuadRational::int(1);
    let den = lambda * lambda * (lambda - one) * (lambda - one);
    if den.is_zero() {
        return Err(Error::RepeatedRoots);
    }
    let num = QuadRational::int(256) * (lambda * lambda - lambda + one).pow(3);
    Ok(num / den)
}

/// Legendre parameter of `y^2 = f` from the branch points: for a cubic the
/// cross-ratio of its roots with infinity, for a quartic the cross-ratio of
/// its four roots.
fn lambda_of_roots(r: &[QuadRational]) -> Result<QuadRational> {
    let (num, den) = match r {
        [e1, e2, e3] => (*e3 - *e1, *e2 - *e1),
        [r1, r2, r3, r4] => ((*r3 - *r1) * (*r4 - *r2), (*r3 - *r2) * (*r4 - *r1)),
        _ => unreachable!(),
    };
    if den.is_zero() || num.is_zero() {
        return Err(Error::RepeatedRoots);
    }
    Ok(num / den)
}

pub fn j_invariant(model: &CurveModel) -> Result<QuadRational> {
    match &model.roots {
        Some(roots) if (3..=4).contains(&roots.len()) => j_of_lambda(lambda_of_roots(roots)?),
        _ => Err(Error::NoRoots(alloc::format!("{}", model.id))),
    }
}
