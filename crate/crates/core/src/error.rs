use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("pattern of length {len} does not fit in a word of length {word}")]
    PatternTooLong { len: usize, word: usize },
    #[error("invalid pattern letter {0:?}; expected 'R' or 'N'")]
    BadLetter(char),
    #[error("empty pattern")]
    EmptyPattern,
    #[error("run length t={t} out of range for p={p}")]
    RunOutOfRange { t: usize, p: u64 },
    #[error("empty subset")]
    EmptySubset,
    #[error("subset element {0} outside 1..=9")]
    SubsetElement(u8),
    #[error("{curve} has bad reduction at {p}")]
    BadPrime { curve: alloc::string::String, p: u64 },
    #[error("2 is not a square mod {0}, so the model over Q(sqrt 2) does not reduce")]
    Sqrt2Absent(u64),
    #[error("curve {0} has no root list or the wrong degree for a j-invariant")]
    NoRoots(alloc::string::String),
    #[error("repeated roots")]
    RepeatedRoots,
    #[error("p={p} too small for t={t}")]
    PrimeTooSmall { p: u64, t: usize },
    #[error("p={p} is not in the residue class {class} mod {modulus}")]
    WrongClass { p: u64, class: u64, modulus: u64 },
    #[error("scale factor must be positive")]
    NonPositiveScale,
    #[error("convolution mass drift {0:e} exceeds the renormalization threshold")]
    MassDrift(f64),
    #[error("measure has total mass {0}, expected 1")]
    NotProbability(f64),
    #[error("grid steps differ ({0} vs {1})")]
    StepMismatch(f64, f64),
    #[error("no prediction for t={t} in class {class}")]
    NoPrediction { t: usize, class: u64 },
    #[error("sample too small: {have} < {need}")]
    SampleTooSmall { have: usize, need: usize },
    #[error("empty selection")]
    EmptySelection,
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error("linear system is underdetermined (rank {rank} < {unknowns} unknowns)")]
    Underdetermined { rank: usize, unknowns: usize },
    #[error("hold-out check failed at p={0}")]
    HoldOutMismatch(u64),
    #[error("no valid square root: {0} is not a residue mod {1}")]
    NoSquareRoot(u64, u64),
}
