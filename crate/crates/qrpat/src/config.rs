use std::path::PathBuf;

use qrpat_core::Rational;

use crate::expr::parse_rational;

/// Environment variable overriding the cache directory.
pub const CACHE_ENV: &str = "QRPAT_CACHE";

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Output {
    Csv,
    Table,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub max_prime: u64,
    pub grid_step: Rational,
    pub seed: u64,
    pub cache_path: PathBuf,
    pub output: Output,
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            max_prime: 200_000,
            grid_step: Rational::new(1, 512),
            seed: 0,
            cache_path: PathBuf::from(".qrpat-cache"),
            output: Output::Csv,
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.max_prime < 7 {
            return Err(format!("max prime {} is below 7", self.max_prime));
        }
        if self.grid_step <= Rational::from(0) {
            return Err("grid step must be positive".into());
        }
        if self.threads == 0 {
            return Err("need at least one thread".into());
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        *self.grid_step.numer() as f64 / *self.grid_step.denom() as f64
    }
}

pub fn parse_step(s: &str) -> Result<Rational, String> {
    match parse_rational(s) {
        Some(q) if q > Rational::from(0) => Ok(q),
        _ => Err(format!("invalid grid step {s:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = RunConfig::default();
        assert!(c.validate().is_ok());
        assert_eq!(c.step(), 1.0 / 512.0);
        assert!(RunConfig { max_prime: 5, ..c.clone() }.validate().is_err());
        assert!(RunConfig { grid_step: Rational::from(0), ..c }.validate().is_err());
        assert!(parse_step("0").is_err());
        assert_eq!(parse_step("1/256"), Ok(Rational::new(1, 256)));
    }
}
