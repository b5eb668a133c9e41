//! One-sided inequality checks: hypercontractivity, uniform smoothness
//! (subsystem, weighted, fermionic) and the scalar two-point inequality.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::{trial_rng, SLACK};
use crate::dense::{
    all_subset_components, random_matrix, schatten_from_sv, singular_values, site_average,
    sum_to_matrix, weighted_with_diag, DenseOperator, WeightedNormSpec,
};
use crate::error::{Error, Result};
use crate::fermion::{term_image, FermionOp, FermionTerm};
use crate::pauli::{PauliString, PauliSum, PauliTerm};

/// One instance of `lhs ≤ rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`.
    pub margin: f64,
}

impl Comparison {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        Comparison { lhs, rhs, margin: rhs - lhs }
    }

    pub fn relative(&self) -> f64 {
        let s = self.rhs.abs().max(self.lhs.abs());
        if s == 0.0 {
            0.0
        } else {
            self.margin / s
        }
    }

    pub fn holds(&self) -> bool {
        self.relative() >= -SLACK
    }
}

/// Dense counterexample, row-major real and imaginary parts.
#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub trial: usize,
    pub p: f64,
    pub n: usize,
    pub comparison: Comparison,
    pub operators: BTreeMap<String, (Vec<f64>, Vec<f64>)>,
}

impl Counterexample {
    fn new(trial: usize, p: f64, n: usize, comparison: Comparison, ops: &[(&str, &DenseOperator)]) -> Self {
        let operators = ops
            .iter()
            .map(|(name, m)| {
                let t = m.transpose();
                (name.to_string(), (t.iter().map(|c| c.re).collect(), t.iter().map(|c| c.im).collect()))
            })
            .collect();
        Counterexample { trial, p, n, comparison, operators }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub trials: usize,
    pub comparisons: usize,
    pub violations: usize,
    /// Smallest `margin / max(|lhs|,|rhs|)` seen.
    pub worst_relative_margin: f64,
    pub passed: bool,
    pub counterexample: Option<Counterexample>,
}

impl CheckReport {
    fn collect(name: &str, trials: usize, items: Vec<(Comparison, Option<Counterexample>)>) -> Self {
        let mut worst = f64::INFINITY;
        let mut violations = 0;
        let mut cx = None;
        for (c, ex) in items.iter() {
            worst = worst.min(c.relative());
            if !c.holds() {
                violations += 1;
                if cx.is_none() {
                    cx = ex.clone();
                }
            }
        }
        CheckReport {
            name: name.into(),
            trials,
            comparisons: items.len(),
            violations,
            worst_relative_margin: worst,
            passed: violations == 0,
            counterexample: cx,
        }
    }

    /// Write the first counterexample as JSON; returns whether a file was written.
    pub fn dump_counterexample(&self, path: &Path) -> Result<bool> {
        match &self.counterexample {
            Some(c) => {
                std::fs::write(path, serde_json::to_string(c)?)?;
                Ok(true)
            }
            None => Ok(false),
        }
    }
}

fn norm_p(m: &DenseOperator, p: f64) -> f64 {
    schatten_from_sv(&singular_values(m), p, m.nrows(), true)
}

fn gaussian_c<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Sum of up to 8 random Pauli strings of weight `≤ k` with complex Gaussian coefficients.
pub fn random_local_operator<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Result<PauliSum> {
    let count = rng.random_range(1..=8);
    let mut s = PauliSum::new(n);
    for _ in 0..count {
        let w = rng.random_range(0..=k.min(n));
        let sites = sample(rng, n, w).into_vec();
        let ops: Vec<(usize, char)> = sites.into_iter().map(|i| (i, ['X', 'Y', 'Z'][rng.random_range(0..3)])).collect();
        s.add(PauliTerm::new(PauliString::from_sites(n, &ops)?, gaussian_c(rng)))?;
    }
    Ok(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct HyperResult {
    /// `‖F‖_p² ≤ Σ_S (p−1)^{|S|} ‖F_S‖_p²`.
    pub moment: Comparison,
    /// `‖F‖_p ≤ ‖Σ_S (p−1)^{|S|/2} F_S‖_2`.
    pub fact: Comparison,
}

/// Both sides of the local moment estimate, normalized norms throughout.
pub fn check_hypercontractivity(f: &DenseOperator, n: usize, p: f64) -> Result<HyperResult> {
    let comps = all_subset_components(f, n);
    hyper_from_components(f, &comps, p)
}

fn hyper_from_components(f: &DenseOperator, comps: &[DenseOperator], p: f64) -> Result<HyperResult> {
    if p < 2.0 {
        return Err(Error::Invalid(format!("hypercontractivity needs p >= 2, got {p}")));
    }
    let dim = f.nrows();
    let lhs = norm_p(f, p);
    let mut rhs = 0.0;
    let mut damped = DMatrix::zeros(dim, dim);
    for (mask, c) in comps.iter().enumerate() {
        let w = (p - 1.0).powi(mask.count_ones() as i32);
        rhs += w * norm_p(c, p).powi(2);
        damped += c * Complex64::new(w.sqrt(), 0.0);
    }
    Ok(HyperResult { moment: Comparison::new(lhs * lhs, rhs), fact: Comparison::new(lhs, norm_p(&damped, 2.0)) })
}

/// Random `k`-local operators on `n ≤ n_max` qubits, every `p` in `ps`.
pub fn hypercontractivity_suite(seed: u64, trials: usize, n_max: usize, k_max: usize, ps: &[f64]) -> Result<CheckReport> {
    let items: Vec<Result<Vec<_>>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i as u64);
            let n = rng.random_range(1..=n_max);
            let k = rng.random_range(1..=k_max.min(n));
            let f = sum_to_matrix(&random_local_operator(&mut rng, n, k)?, n_max)?;
            let comps = all_subset_components(&f, n);
            let mut out = Vec::new();
            for &p in ps {
                let h = hyper_from_components(&f, &comps, p)?;
                for c in [h.moment, h.fact] {
                    let ex = (!c.holds()).then(|| Counterexample::new(i, p, n, c, &[("F", &f)]));
                    out.push((c, ex));
                }
            }
            Ok(out)
        })
        .collect();
    let mut all = Vec::new();
    for r in items {
        all.extend(r?);
    }
    Ok(CheckReport::collect("hypercontractivity", trials, all))
}

/// `‖X+Y‖_p² ≤ ‖X‖_p² + (p−1)‖Y‖_p²` (normalized).
pub fn smoothness_pair(x: &DenseOperator, y: &DenseOperator, p: f64) -> Comparison {
    let l = norm_p(&(x + y), p).powi(2);
    let r = norm_p(x, p).powi(2) + (p - 1.0) * norm_p(y, p).powi(2);
    Comparison::new(l, r)
}

/// Random `X = X_j ⊗ I_i` and `Y` with `Tr_i Y = 0` on `n` qubits.
pub fn random_smoothness_pair<R: Rng + ?Sized>(rng: &mut R, n: usize, site: usize) -> (DenseOperator, DenseOperator) {
    let dim = 1usize << n;
    let x = site_average(&random_matrix(rng, dim), n, site);
    let y0 = random_matrix(rng, dim);
    let y = &y0 - site_average(&y0, n, site);
    let scale = 10f64.powf(rng.random_range(-1.5..1.5));
    (x, y * Complex64::new(scale, 0.0))
}

/// Subsystem uniform smoothness at `site` of `n` qubits for every `p`.
pub fn check_uniform_smoothness(seed: u64, n: usize, site: usize, ps: &[f64], trials: usize) -> Result<CheckReport> {
    if site >= n {
        return Err(Error::Invalid(format!("site {site} outside {n} qubits")));
    }
    let items: Vec<_> = (0..trials)
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut rng = trial_rng(seed, i as u64);
            let (x, y) = random_smoothness_pair(&mut rng, n, site);
            ps.iter()
                .map(|&p| {
                    let c = smoothness_pair(&x, &y, p);
                    let ex = (!c.holds()).then(|| Counterexample::new(i, p, n, c, &[("X", &x), ("Y", &y)]));
                    (c, ex)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(CheckReport::collect("uniform-smoothness", trials, items))
}

/// Random sizes and sites in `1..=n_max`.
pub fn uniform_smoothness_suite(seed: u64, n_max: usize, ps: &[f64], trials: usize) -> Result<CheckReport> {
    let items: Vec<_> = (0..trials)
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut rng = trial_rng(seed, i as u64);
            let n = rng.random_range(1..=n_max);
            let site = rng.random_range(0..n);
            let (x, y) = random_smoothness_pair(&mut rng, n, site);
            ps.iter()
                .map(|&p| {
                    let c = smoothness_pair(&x, &y, p);
                    let ex = (!c.holds()).then(|| Counterexample::new(i, p, n, c, &[("X", &x), ("Y", &y)]));
                    (c, ex)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(CheckReport::collect("uniform-smoothness", trials, items))
}

/// `((|a+b|^p + |a−b|^p)/2)^{2/p} ≤ a² + (p−1)b²`.
pub fn two_point(a: f64, b: f64, p: f64) -> Comparison {
    let l = ((((a + b).abs().powf(p) + (a - b).abs().powf(p)) / 2.0).powf(2.0 / p)).max(0.0);
    Comparison::new(l, a * a + (p - 1.0) * b * b)
}

pub fn two_point_suite(seed: u64, trials: usize) -> CheckReport {
    let mut rng = trial_rng(seed, u64::MAX);
    let items = (0..trials)
        .map(|i| {
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample::<f64, _>(StandardNormal) * 10f64.powf(rng.random_range(-2.0..2.0));
            let p = rng.random_range(2.0..12.0);
            let c = two_point(a, b, p);
            let ex = (!c.holds()).then(|| Counterexample {
                trial: i,
                p,
                n: 0,
                comparison: c,
                operators: BTreeMap::from([("ab".to_string(), (vec![a, b], vec![0.0, 0.0]))]),
            });
            (c, ex)
        })
        .collect();
    CheckReport::collect("two-point", trials, items)
}

/// `I_s ⊗ Tr_s(ρ_s F)` with `ρ_s = diag(1−w, w)`.
pub fn weighted_site_average(f: &DenseOperator, n: usize, s: usize, w: f64) -> DenseOperator {
    let dim = 1usize << n;
    let bit = 1usize << (n - 1 - s);
    DMatrix::from_fn(dim, dim, |i, j| {
        if (i ^ j) & bit != 0 {
            return Complex64::new(0.0, 0.0);
        }
        let (i0, j0) = (i & !bit, j & !bit);
        f[(i0, j0)] * (1.0 - w) + f[(i0 | bit, j0 | bit)] * w
    })
}

/// Weighted smoothness with `ρ` from `spec`; sites are drawn per trial.
pub fn check_weighted_smoothness(seed: u64, spec: &WeightedNormSpec, trials: usize) -> Result<CheckReport> {
    let n = spec.eta.len();
    if n == 0 {
        return Err(Error::Invalid("weighted smoothness needs at least one site".into()));
    }
    let rho = spec.diagonal();
    let items: Vec<_> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i as u64);
            let site = rng.random_range(0..n);
            let (x, y0) = random_smoothness_pair(&mut rng, n, site);
            let y = &y0 - weighted_site_average(&y0, n, site, spec.eta[site]);
            let (s, p) = (spec.s, spec.p);
            let w = |a: &DenseOperator| weighted_with_diag(a, &rho, s, p).powi(2);
            let c = Comparison::new(w(&(&x + &y)), w(&x) + (p - 1.0) * w(&y));
            let ex = (!c.holds()).then(|| Counterexample::new(i, p, n, c, &[("X", &x), ("Y", &y)]));
            (c, ex)
        })
        .collect();
    Ok(CheckReport::collect("weighted-smoothness", trials, items))
}

/// Random product weights, `s ∈ {0, ½, 1}` and `p` from `ps`, on up to `n_max` qubits.
pub fn weighted_smoothness_suite(seed: u64, n_max: usize, ps: &[f64], trials: usize) -> Result<CheckReport> {
    let mut all = Vec::new();
    for i in 0..trials {
        let mut rng = trial_rng(seed ^ 0x5eed, i as u64);
        let n = rng.random_range(1..=n_max);
        let eta: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let s = [0.0, 0.5, 1.0][rng.random_range(0..3)];
        let p = ps[rng.random_range(0..ps.len())];
        let spec = WeightedNormSpec::new(eta, s, p)?;
        let r = check_weighted_smoothness(seed.wrapping_add(i as u64), &spec, 1)?;
        all.push(r);
    }
    let worst = all.iter().map(|r| r.worst_relative_margin).fold(f64::INFINITY, f64::min);
    let violations: usize = all.iter().map(|r| r.violations).sum();
    let cx = all.iter().find_map(|r| r.counterexample.clone());
    Ok(CheckReport {
        name: "weighted-smoothness".into(),
        trials,
        comparisons: all.iter().map(|r| r.comparisons).sum(),
        violations,
        worst_relative_margin: worst,
        passed: violations == 0,
        counterexample: cx,
    })
}

/// Random monomials in `a`, `a†` without repeated sites; returns the qubit
/// image of each fermionic support group.
pub fn random_fermionic_groups<R: Rng + ?Sized>(rng: &mut R, n: usize, max_len: usize) -> Result<BTreeMap<Vec<usize>, PauliSum>> {
    let count = rng.random_range(1..=6);
    let mut groups: BTreeMap<Vec<usize>, PauliSum> = BTreeMap::new();
    for _ in 0..count {
        let len = rng.random_range(1..=max_len.min(n));
        let sites = sample(rng, n, len).into_vec();
        let factors: Vec<(usize, FermionOp)> = sites
            .into_iter()
            .map(|s| (s, if rng.random_bool(0.5) { FermionOp::Create } else { FermionOp::Annihilate }))
            .collect();
        let term = FermionTerm::new(factors, 1.0);
        let img = term_image(n, 0.5, &term)?.scale(gaussian_c(rng));
        let key = term.sites();
        let entry = groups.entry(key).or_insert_with(|| PauliSum::new(n));
        *entry = entry.plus(&img)?;
    }
    Ok(groups)
}

/// `‖A‖_p² ≤ Σ_S (p−1)^{|S|} ‖A_S‖_p²` over fermionic supports `S`.
pub fn fermionic_smoothness(groups: &BTreeMap<Vec<usize>, PauliSum>, n: usize, p: f64, cap: usize) -> Result<(Comparison, DenseOperator)> {
    let dim = 1usize << n;
    let mut total = DMatrix::zeros(dim, dim);
    let mut rhs = 0.0;
    for (s, g) in groups {
        let m = sum_to_matrix(g, cap)?;
        rhs += (p - 1.0).powi(s.len() as i32) * norm_p(&m, p).powi(2);
        total += m;
    }
    Ok((Comparison::new(norm_p(&total, p).powi(2), rhs), total))
}

pub fn check_fermionic_smoothness(seed: u64, n: usize, ps: &[f64], trials: usize) -> Result<CheckReport> {
    let items: Vec<Result<Vec<_>>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i as u64);
            let groups = random_fermionic_groups(&mut rng, n, 3)?;
            let mut out = Vec::new();
            for &p in ps {
                let (c, a) = fermionic_smoothness(&groups, n, p, n)?;
                let ex = (!c.holds()).then(|| Counterexample::new(i, p, n, c, &[("A", &a)]));
                out.push((c, ex));
            }
            Ok(out)
        })
        .collect();
    let mut all = Vec::new();
    for r in items {
        all.extend(r?);
    }
    Ok(CheckReport::collect("fermionic-smoothness", trials, all))
}

/// Sector-restricted norm against its weighted bound for random number-preserving operators.
pub fn check_sector_bound(seed: u64, n: usize, p: f64, trials: usize) -> Result<CheckReport> {
    let items: Vec<Result<(Comparison, Option<Counterexample>)>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i as u64);
            let m = rng.random_range(0..=n);
            let dim = 1usize << n;
            let raw = random_matrix(&mut rng, dim);
            // keep only blocks that preserve the popcount
            let a = DMatrix::from_fn(dim, dim, |r, c| {
                if (r.count_ones()) == (c.count_ones()) {
                    raw[(r, c)]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            let s = crate::dense::sector_norm(&a, n, m, p)?;
            let c = Comparison::new(s.value, s.bound);
            Ok((c, (!c.holds()).then(|| Counterexample::new(i, p, n, c, &[("A", &a)]))))
        })
        .collect();
    let items: Result<Vec<_>> = items.into_iter().collect();
    Ok(CheckReport::collect("sector-bound", trials, items?))
}
