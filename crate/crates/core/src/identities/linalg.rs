//! Exact linear solve over `Q`.

use alloc::vec::Vec;

use num_traits::Zero;

use crate::{Error, Rational, Result};

/// Solves `a x = b` exactly. Overdetermined systems are accepted when
/// consistent; the solution must be unique.
pub fn solve_exact(a: &[Vec<Rational>], b: &[Rational]) -> Result<Vec<Rational>> {
    assert_eq!(a.len(), b.len(), "row count mismatch");
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            assert_eq!(row.len(), cols, "ragged matrix");
            let mut r = row.clone();
            r.push(rhs);
            r
        })
        .collect();
    let mut rank = 0;
    let mut pivots = Vec::new();
    for c in 0..cols {
        let Some(pr) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, pr);
        let inv = m[rank][c].recip();
        for v in m[rank].iter_mut() {
            *v *= inv;
        }
        let pivot_row = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && !row[c].is_zero() {
                let f = row[c];
                for (v, &pv) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                    *v -= pv * f;
                }
            }
        }
        pivots.push(c);
        rank += 1;
    }
    if m[rank..].iter().any(|row| !row[cols].is_zero()) {
        return Err(Error::Inconsistent);
    }
    if rank < cols {
        return Err(Error::Underdetermined { rank, unknowns: cols });
    }
    let mut x = alloc::vec![Rational::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = m[r][cols];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn q(n: i128) -> Rational {
        Rational::from(n)
    }

    #[test]
    fn unique_and_overdetermined() {
        let a = vec![vec![q(2), q(1)], vec![q(1), q(3)], vec![q(3), q(4)]];
        let b = vec![q(5), q(10), q(15)];
        assert_eq!(solve_exact(&a, &b).unwrap(), vec![q(1), q(3)]);
        let bad = vec![q(5), q(10), q(16)];
        assert_eq!(solve_exact(&a, &bad), Err(Error::Inconsistent));
    }

    #[test]
    fn rank_deficient() {
        let a = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        assert_eq!(solve_exact(&a, &[q(1), q(2)]), Err(Error::Underdetermined { rank: 1, unknowns: 2 }));
    }

    #[test]
    fn fractional_solution() {
        let a = vec![vec![q(3), q(0)], vec![q(0), q(8)]];
        let x = solve_exact(&a, &[q(1), q(-1)]).unwrap();
        assert_eq!(x, vec![Rational::new(1, 3), Rational::new(-1, 8)]);
    }
}
