//! Sweeps split across worker threads.

use std::path::Path;
use std::thread;

use qrpat_core::curves::CurveId;
use qrpat_core::equidist::{sweep, Sweep, SweepRecord};

use crate::cache::{cache_path, CacheError, CacheFile};

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error(transparent)]
    Core(#[from] qrpat_core::Error),
    #[error(transparent)]
    Cache(#[from] CacheError),
}

/// Chunk boundaries with roughly equal work: a prime costs about `p`, so
/// the cut points sit at equal steps of `p^2`.
fn chunks(lo: u64, hi: u64, n: usize) -> Vec<(u64, u64)> {
    let n = n.max(1);
    let (a, b) = (lo as f64 * lo as f64, hi as f64 * hi as f64);
    let mut cuts: Vec<u64> = (1..n).map(|i| (a + (b - a) * i as f64 / n as f64).sqrt() as u64).collect();
    cuts.retain(|&c| c > lo && c < hi);
    cuts.dedup();
    let mut out = Vec::with_capacity(cuts.len() + 1);
    let mut start = lo;
    for c in cuts {
        out.push((start, c));
        start = c + 1;
    }
    out.push((start, hi));
    out
}

/// Same records as `sweep(t, lo, hi, curves)` for any thread count.
pub fn sweep_parallel(t: usize, lo: u64, hi: u64, curves: &[CurveId], threads: usize) -> Result<Sweep, SweepError> {
    if hi < lo {
        return Ok(Sweep::default());
    }
    let parts = chunks(lo, hi, threads);
    let results: Vec<qrpat_core::Result<Sweep>> = thread::scope(|s| {
        let handles: Vec<_> = parts.iter().map(|&(a, b)| s.spawn(move || sweep(t, a, b, curves))).collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    let mut out = Sweep::default();
    for r in results {
        let r = r?;
        out.records.extend(r.records);
        out.skipped.extend(r.skipped);
    }
    out.records.sort_by_key(|r| r.p);
    out.skipped.sort_by_key(|(p, _)| *p);
    Ok(out)
}

/// Records for every good prime in `lo..=hi`, reusing and extending the
/// cache in `dir` when one is given.
pub fn load_or_sweep(
    dir: Option<&Path>,
    t: usize,
    curves: &[CurveId],
    lo: u64,
    hi: u64,
    threads: usize,
) -> Result<Vec<SweepRecord>, SweepError> {
    let Some(dir) = dir else {
        return Ok(sweep_parallel(t, lo, hi, curves, threads)?.records);
    };
    let path = cache_path(dir, t, curves);
    let mut file = if path.exists() {
        CacheFile::read(&path)?
    } else {
        CacheFile { t, curves: curves.to_vec(), covered: (lo, lo.saturating_sub(1)), records: Vec::new() }
    };
    let (have_lo, have_hi) = file.covered;
    let empty = have_hi < have_lo;
    if empty || lo < have_lo || hi > have_hi {
        // keep the covered range contiguous: sweep only what lies outside it
        let (a, b) = if empty { (lo, hi) } else { (lo.min(have_lo), hi.max(have_hi)) };
        let gaps = if empty { vec![(a, b)] } else { vec![(a, have_lo.saturating_sub(1)), (have_hi + 1, b)] };
        for (x, y) in gaps.into_iter().filter(|(x, y)| x <= y) {
            let part = sweep_parallel(t, x, y, curves, threads)?;
            file.merge(CacheFile { t, curves: curves.to_vec(), covered: (x, y), records: part.records })?;
        }
        file.covered = (a, b);
        file.write(&path)?;
    }
    Ok(file.records.into_iter().filter(|r| r.p >= lo && r.p <= hi).collect())
}
