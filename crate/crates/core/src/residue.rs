//! Legendre-character tables, residue words and pattern counts.
//!
//! For an odd prime `p` the word `W_p` spells `R` at position `i` when `i`
//! is a nonzero square mod `p` and `N` otherwise, for `i = 1..p-1`. The number
//! of contiguous occurrences of a pattern in `W_p` is counted directly from
//! the character table; the product formula over `(1 + chi)` factors is an
//! independent second route to the same number for runs `R^t`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::arith::is_prime;
use crate::{Error, Rational, Result};

/// Quadratic character of `F_p` as a lookup table.
///
/// The table is stored twice back to back so that `x + r` for
/// `x, r < p` indexes without a reduction.
#[derive(Clone, Debug)]
pub struct ChiTable {
    p: u64,
    doubled: Vec<i8>,
}

impl ChiTable {
    /// Builds the table by marking `x^2 mod p` for `1 <= x <= (p-1)/2`.
    pub fn new(p: u64) -> Result<Self> {
        if p == 2 || !is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        let n = p as usize;
        let mut chi = vec![-1i8; 2 * n];
        chi[0] = 0;
        // x^2 = (x-1)^2 + 2x - 1, kept reduced with one subtraction. All
        // values stay below 2p, so the wrapping ops never wrap; they only
        // keep overflow checks out of the hot loop.
        let mut sq = 0u64;
        for x in 1..=(p - 1) / 2 {
            sq = sq.wrapping_add(x.wrapping_mul(2).wrapping_sub(1));
            if sq >= p {
                sq = sq.wrapping_sub(p);
            }
            chi[sq as usize] = 1;
        }
        let (lo, hi) = chi.split_at_mut(n);
        hi.copy_from_slice(lo);
        Ok(Self { p, doubled: chi })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// `chi[0..p]`.
    pub fn values(&self) -> &[i8] {
        &self.doubled[..self.p as usize]
    }

    /// `chi[start..start + len]` read cyclically; `start < p`, `len <= p`.
    pub fn window(&self, start: u64, len: usize) -> &[i8] {
        let s = start as usize;
        &self.doubled[s..s + len]
    }

    #[inline]
    pub fn get(&self, a: i64) -> i8 {
        self.doubled[a.rem_euclid(self.p as i64) as usize]
    }

    #[inline]
    pub fn get_reduced(&self, a: u64) -> i8 {
        self.doubled[a as usize]
    }

    pub fn residue_count(&self) -> usize {
        self.values().iter().filter(|&&c| c == 1).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    R,
    N,
}

impl Letter {
    pub fn as_char(self) -> char {
        match self {
            Letter::R => 'R',
            Letter::N => 'N',
        }
    }
}

/// Nonempty word over `{R, N}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pattern(Vec<Letter>);

impl Pattern {
    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::EmptyPattern);
        }
        Ok(Self(letters))
    }

    /// The run `R^t`.
    pub fn run(t: usize) -> Result<Self> {
        Self::new(vec![Letter::R; t])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    /// All `2^t` patterns of length `t`, in lexicographic order with `R < N`.
    pub fn all_of_length(t: usize) -> Vec<Pattern> {
        (0..1u64 << t)
            .map(|bits| {
                Pattern((0..t).map(|i| if bits >> (t - 1 - i) & 1 == 0 { Letter::R } else { Letter::N }).collect())
            })
            .collect()
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| match c {
                'R' | 'r' => Ok(Letter::R),
                'N' | 'n' => Ok(Letter::N),
                other => Err(Error::BadLetter(other)),
            })
            .collect::<Result<Vec<_>>>()?;
        Pattern::new(letters)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|l| write!(f, "{}", l.as_char()))
    }
}

/// The residue word `W_p` of length `p - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueWord {
    p: u64,
    letters: Vec<Letter>,
}

impl ResidueWord {
    pub fn from_table(chi: &ChiTable) -> Self {
        let letters = chi.values()[1..].iter().map(|&c| if c == 1 { Letter::R } else { Letter::N }).collect();
        Self { p: chi.p(), letters }
    }

    pub fn new(p: u64) -> Result<Self> {
        Ok(Self::from_table(&ChiTable::new(p)?))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn to_text(&self) -> String {
        self.letters.iter().map(|l| l.as_char()).collect()
    }
}

impl fmt::Display for ResidueWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.letters.iter().try_for_each(|l| write!(f, "{}", l.as_char()))
    }
}

/// `n_p(S)`: contiguous occurrences of `pattern` in `W_p`, read straight off
/// the character table with a sliding bit window.
pub fn count_pattern(chi: &ChiTable, pattern: &Pattern) -> Result<u64> {
    let word_len = (chi.p() - 1) as usize;
    let t = pattern.len();
    if t > word_len {
        return Err(Error::PatternTooLong { len: t, word: word_len });
    }
    let letters = &chi.values()[1..];
    if t > 64 {
        let count = letters
            .windows(t)
            .filter(|w| w.iter().zip(pattern.letters()).all(|(&c, &l)| (c == 1) == (l == Letter::R)))
            .count();
        return Ok(count as u64);
    }
    // Bit 1 encodes N so that the all-R run is the zero mask.
    let mask = if t == 64 { u64::MAX } else { (1u64 << t) - 1 };
    let target = pattern.letters().iter().fold(0u64, |acc, &l| (acc << 1) | (l == Letter::N) as u64);
    let mut window = 0u64;
    let mut count = 0u64;
    for (i, &c) in letters.iter().enumerate() {
        window = ((window << 1) | (c != 1) as u64) & mask;
        if i + 1 >= t && window == target {
            count += 1;
        }
    }
    Ok(count)
}

/// `n_p(t) = n_p(R^t)` by run lengths.
pub fn count_run(chi: &ChiTable, t: usize) -> u64 {
    if t == 0 || t as u64 > chi.p() - 1 {
        return 0;
    }
    let mut run = 0usize;
    let mut count = 0u64;
    for &c in &chi.values()[1..] {
        // bounded by p; wrapping only avoids overflow checks here
        run = if c == 1 { run.wrapping_add(1) } else { 0 };
        count = count.wrapping_add((run >= t) as u64);
    }
    count
}

/// Upper limit of the window index in the product formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpperLimit {
    /// `j <= p - t - 1`, as printed; omits the final window.
    Paper,
    /// `j <= p - t`, every window of `W_p`.
    Exact,
}

/// `2^-t * sum_j prod_{i=1..t} (1 + chi(i + j - 1))`.
pub fn product_formula_count(chi: &ChiTable, t: usize, upper: UpperLimit) -> Result<Rational> {
    let p = chi.p();
    if t == 0 || t as u64 >= p {
        return Err(Error::RunOutOfRange { t, p });
    }
    let last = match upper {
        UpperLimit::Paper => p - t as u64 - 1,
        UpperLimit::Exact => p - t as u64,
    };
    let mut sum: i128 = 0;
    for j in 1..=last {
        let prod = (1..=t as u64).fold(1i128, |acc, i| acc * (1 + chi.get_reduced(i + j - 1) as i128));
        sum += prod;
    }
    Ok(Rational::new(sum, 1i128 << t))
}
