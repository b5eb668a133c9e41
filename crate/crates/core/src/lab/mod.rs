//! Monte Carlo and fuzzing harness: typical-state error tails, random
//! Hamiltonian ensembles, the inequality suite and the optimality models.

mod experiments;
mod inequalities;

pub use experiments::*;
pub use inequalities::*;

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CSV_SCHEMA: &str = "# schema v1: quantity,p,value,bound,margin,seed";

/// Relative slack allowed on one-sided inequality checks.
pub const SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ensemble {
    /// Uniformly random computational basis state.
    Basis1Design,
    Haar,
    GaussianHamiltonian,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub samples: usize,
    pub ensemble: Ensemble,
    pub ps: Vec<f64>,
    pub t: f64,
    pub r: u64,
    pub order: u32,
    /// Error threshold for tail estimates.
    pub eps: f64,
    pub cap: usize,
}

impl ExperimentConfig {
    pub fn new(seed: u64, samples: usize, ensemble: Ensemble, t: f64, r: u64, order: u32, eps: f64) -> Self {
        ExperimentConfig { seed, samples, ensemble, ps: vec![2.0], t, r, order, eps, cap: crate::dense::DEFAULT_CAP }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Invalid("samples must be >= 1".into()));
        }
        if self.r == 0 {
            return Err(Error::Invalid("r must be >= 1".into()));
        }
        if !(self.eps > 0.0) {
            return Err(Error::Invalid("eps must be positive".into()));
        }
        if self.ps.iter().any(|&p| p.is_nan() || p < 1.0) {
            return Err(Error::Invalid("every p must be >= 1".into()));
        }
        Ok(())
    }
}

/// Independent stream `idx` of the generator seeded by `seed`.
pub fn trial_rng(seed: u64, idx: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(idx);
    r
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    pub fn add(&mut self, v: f64) {
        let y = v - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

pub fn kahan_sum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut k = Kahan::default();
    for v in it {
        k.add(v);
    }
    k.value()
}

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
}

impl Estimate {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        if xs.is_empty() {
            return Estimate { mean: f64::NAN, se: f64::NAN };
        }
        let mean = kahan_sum(xs.iter().copied()) / n;
        if xs.len() < 2 {
            return Estimate { mean, se: 0.0 };
        }
        let var = kahan_sum(xs.iter().map(|x| (x - mean) * (x - mean))) / (n - 1.0);
        Estimate { mean, se: (var / n).sqrt() }
    }

    /// Fraction of `xs` at or above `eps`.
    pub fn tail(xs: &[f64], eps: f64) -> Self {
        let ind: Vec<f64> = xs.iter().map(|&x| if x >= eps { 1.0 } else { 0.0 }).collect();
        Estimate::of(&ind)
    }
}

/// Empirical quantile by linear interpolation on the sorted sample.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    let w = pos - lo as f64;
    sorted[lo] * (1.0 - w) + sorted[hi] * w
}

pub const QUANTILES: [f64; 5] = [0.5, 0.9, 0.95, 0.99, 1.0];

pub fn quantiles(xs: &[f64]) -> Vec<(f64, f64)> {
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    QUANTILES.iter().map(|&q| (q, quantile(&s, q))).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub quantity: String,
    pub p: Option<f64>,
    pub value: f64,
    pub bound: Option<f64>,
    pub margin: Option<f64>,
    pub seed: Option<u64>,
}

impl CsvRow {
    pub fn new(quantity: impl Into<String>, p: Option<f64>, value: f64, bound: Option<f64>, seed: Option<u64>) -> Self {
        let margin = bound.map(|b| b - value);
        CsvRow { quantity: quantity.into(), p, value, bound, margin, seed }
    }
}

/// CSV with the versioned schema comment as the first line.
pub fn write_csv<W: Write>(mut w: W, rows: &[CsvRow]) -> Result<()> {
    writeln!(w, "{CSV_SCHEMA}")?;
    let mut cw = csv::Writer::from_writer(w);
    for r in rows {
        cw.serialize(r).map_err(|e| Error::Invalid(format!("csv: {e}")))?;
    }
    cw.flush()?;
    Ok(())
}

pub fn csv_string(rows: &[CsvRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows)?;
    String::from_utf8(buf).map_err(|e| Error::Invalid(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: u64 = trial_rng(5, 3).random();
        let b: u64 = trial_rng(5, 3).random();
        let c: u64 = trial_rng(5, 4).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn kahan_beats_naive() {
        let xs = std::iter::once(1.0).chain(std::iter::repeat_n(1e-16, 10_000));
        assert!((kahan_sum(xs) - (1.0 + 1e-12)).abs() < 1e-15);
    }

    #[test]
    fn estimates_and_quantiles() {
        let e = Estimate::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(e.mean, 2.5);
        assert!((e.se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(Estimate::tail(&[0.1, 0.2, 0.3], 0.2).mean, 2.0 / 3.0);
        let q = quantiles(&[3.0, 1.0, 2.0]);
        assert_eq!(q[0], (0.5, 2.0));
        assert_eq!(q.last().unwrap().1, 3.0);
        assert!(q.windows(2).all(|w| w[0].1 <= w[1].1));
    }

    #[test]
    fn csv_layout() {
        let s = csv_string(&[CsvRow::new("spectral", None, 0.5, Some(1.0), Some(7))]).unwrap();
        let mut lines = s.lines();
        assert_eq!(lines.next().unwrap(), CSV_SCHEMA);
        assert_eq!(lines.next().unwrap(), "quantity,p,value,bound,margin,seed");
        assert_eq!(lines.next().unwrap(), "spectral,,0.5,1.0,0.5,7");
    }
}
