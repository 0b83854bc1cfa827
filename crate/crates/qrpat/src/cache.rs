//! On-disk sweep cache.
//!
//! ```text
//! # covered 11 200000
//! p,class8,t,n_pt,E0,E1,E4,delta_num_scaled,delta
//! 11,3,4,0,0,-4,...,-11,-3.3166247903554
//! # sha256 <hex digest of every byte above this line>
//! ```
//!
//! `delta_num_scaled` is the exact integer `2^t n_pt - p`; `delta` is its
//! quotient by `sqrt p`, written in shortest round-trip form.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use qrpat_core::curves::CurveId;
use qrpat_core::equidist::{delta_of, SweepRecord};
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("cache i/o on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("cache line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("cache checksum mismatch")]
    Checksum,
    #[error("cache holds t={t} with curves {curves}, not the requested set")]
    Mismatch { t: usize, curves: String },
}

/// Contents of one cache file.
#[derive(Clone, Debug, PartialEq)]
pub struct CacheFile {
    pub t: usize,
    pub curves: Vec<CurveId>,
    /// Every prime in this closed range was swept (bad ones have no row).
    pub covered: (u64, u64),
    pub records: Vec<SweepRecord>,
}

fn digest(body: &str) -> String {
    let hash = Sha256::digest(body.as_bytes());
    hash.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub fn curve_list(curves: &[CurveId]) -> String {
    curves.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

impl CacheFile {
    pub fn render(&self) -> String {
        let mut body = format!("# covered {} {}\np,class8,t,n_pt,", self.covered.0, self.covered.1);
        for c in &self.curves {
            let _ = write!(body, "{c},");
        }
        body.push_str("delta_num_scaled,delta\n");
        for r in &self.records {
            let _ = write!(body, "{},{},{},{},", r.p, r.class8, r.t, r.n_pt);
            for c in &self.curves {
                let n = r.trace(*c).expect("record lacks a cached curve");
                let _ = write!(body, "{n},");
            }
            let _ = writeln!(body, "{},{}", r.delta_numerator(), r.delta);
        }
        let sum = digest(&body);
        body.push_str("# sha256 ");
        body.push_str(&sum);
        body.push('\n');
        body
    }

    pub fn parse(text: &str) -> Result<Self, CacheError> {
        let bad = |line: usize, msg: &str| CacheError::Parse { line, msg: msg.to_string() };
        let footer_at = text.rfind("# sha256 ").ok_or_else(|| bad(0, "missing checksum footer"))?;
        let (body, footer) = text.split_at(footer_at);
        if footer.trim_end()["# sha256 ".len()..] != digest(body) {
            return Err(CacheError::Checksum);
        }
        let mut lines = body.lines().enumerate();
        let (_, first) = lines.next().ok_or_else(|| bad(1, "empty cache"))?;
        let covered: Vec<u64> = first
            .strip_prefix("# covered ")
            .ok_or_else(|| bad(1, "expected '# covered lo hi'"))?
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| bad(1, "bad covered range"))?;
        let [lo, hi] = covered[..] else {
            return Err(bad(1, "bad covered range"));
        };
        let (_, header) = lines.next().ok_or_else(|| bad(2, "missing header"))?;
        let cols: Vec<&str> = header.split(',').collect();
        let n = cols.len();
        if n < 6 || cols[..4] != ["p", "class8", "t", "n_pt"] || cols[n - 2..] != ["delta_num_scaled", "delta"] {
            return Err(bad(2, "unexpected header"));
        }
        let curves: Vec<CurveId> =
            cols[4..n - 2].iter().map(|c| c.parse()).collect::<Result<_, _>>().map_err(|e: String| bad(2, &e))?;
        let mut records = Vec::new();
        let mut t_seen = None;
        for (i, line) in lines {
            let line_no = i + 1;
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != n {
                return Err(bad(line_no, "wrong field count"));
            }
            let int = |s: &str| s.parse::<i64>().map_err(|_| bad(line_no, "bad integer"));
            let p = int(f[0])? as u64;
            let class8 = int(f[1])? as u64;
            let t = int(f[2])? as usize;
            let n_pt = int(f[3])? as u64;
            let traces =
                curves.iter().zip(&f[4..n - 2]).map(|(&c, s)| int(s).map(|v| (c, v))).collect::<Result<Vec<_>, _>>()?;
            let delta: f64 = f[n - 1].parse().map_err(|_| bad(line_no, "bad delta"))?;
            let rec = SweepRecord { p, class8, t, n_pt, traces, delta };
            if class8 != p % 8 || int(f[n - 2])? != rec.delta_numerator() || delta != delta_of(p, t, n_pt) {
                return Err(bad(line_no, "inconsistent record"));
            }
            if *t_seen.get_or_insert(t) != t {
                return Err(bad(line_no, "mixed t"));
            }
            records.push(rec);
        }
        let t = t_seen.unwrap_or(0);
        Ok(CacheFile { t, curves, covered: (lo, hi), records })
    }

    pub fn read(path: &Path) -> Result<Self, CacheError> {
        let text = fs::read_to_string(path).map_err(|source| CacheError::Io { path: path.into(), source })?;
        Self::parse(&text)
    }

    /// Atomic replace: write a sibling file and rename it over `path`.
    pub fn write(&self, path: &Path) -> Result<(), CacheError> {
        let io_err = |source| CacheError::Io { path: path.into(), source };
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(io_err)?;
        }
        let tmp = path.with_extension("csv.tmp");
        fs::write(&tmp, self.render()).map_err(io_err)?;
        fs::rename(&tmp, path).map_err(io_err)
    }

    /// Union with records of the same `t` and curve set; later wins on
    /// duplicate primes (they are identical anyway).
    pub fn merge(&mut self, other: CacheFile) -> Result<(), CacheError> {
        if other.curves != self.curves || (!other.records.is_empty() && !self.records.is_empty() && other.t != self.t) {
            return Err(CacheError::Mismatch { t: other.t, curves: curve_list(&other.curves) });
        }
        if self.records.is_empty() {
            self.t = other.t;
        }
        self.covered = (self.covered.0.min(other.covered.0), self.covered.1.max(other.covered.1));
        self.records.extend(other.records);
        self.records.sort_by_key(|r| r.p);
        self.records.dedup_by_key(|r| r.p);
        Ok(())
    }
}

/// File name for a `(t, curves)` cache inside `dir`.
pub fn cache_path(dir: &Path, t: usize, curves: &[CurveId]) -> PathBuf {
    let ids: Vec<String> = curves.iter().map(|c| c.to_string()).collect();
    if ids.is_empty() {
        return dir.join(format!("sweep_t{t}.csv"));
    }
    dir.join(format!("sweep_t{t}_{}.csv", ids.join("-")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use qrpat_core::equidist::sweep;
    use CurveId::E;

    fn sample() -> CacheFile {
        let curves = vec![E(0), E(4), CurveId::C];
        let records = sweep(5, 8, 400, &curves).unwrap().records;
        CacheFile { t: 5, curves, covered: (8, 400), records }
    }

    #[test]
    fn round_trip() {
        let c = sample();
        let text = c.render();
        assert!(text.lines().nth(1).unwrap().starts_with("p,class8,t,n_pt,E0,E4,C,delta_num_scaled,delta"));
        assert_eq!(CacheFile::parse(&text).unwrap(), c);
    }

    #[test]
    fn tampering_is_detected() {
        let text = sample().render();
        let changed = text.replacen("\n11,3,5,", "\n11,3,5,1", 1);
        assert!(matches!(CacheFile::parse(&changed), Err(CacheError::Checksum)));
        let cut = &text[..text.rfind("# sha256").unwrap()];
        assert!(matches!(CacheFile::parse(cut), Err(CacheError::Parse { .. })));
    }

    #[test]
    fn merge_is_union() {
        let curves = vec![E(0)];
        let a = sweep(4, 7, 200, &curves).unwrap().records;
        let b = sweep(4, 150, 400, &curves).unwrap().records;
        let mut left = CacheFile { t: 4, curves: curves.clone(), covered: (7, 200), records: a };
        left.merge(CacheFile { t: 4, curves: curves.clone(), covered: (150, 400), records: b }).unwrap();
        let whole = sweep(4, 7, 400, &curves).unwrap().records;
        assert_eq!(left.records, whole);
        assert_eq!(left.covered, (7, 400));
        let other = CacheFile { t: 4, curves: vec![E(1)], covered: (7, 9), records: vec![] };
        assert!(matches!(left.merge(other), Err(CacheError::Mismatch { .. })));
    }
}
