//! Typical-state tails, random-Hamiltonian sampling, order-condition fits and
//! the three-block optimality models.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{quantiles, trial_rng, Ensemble, Estimate, ExperimentConfig};
use crate::bounds::markov_tail;
use crate::dense::{
    apply_schedule, apply_schedule_vec, basis_state, check_cap, hermitian_eigen, haar_state, schatten_norm,
    spectral_norm, sum_to_matrix, to_matrix, trace_distance_pure, trotter_error_op, DenseOperator, StateVector,
};
use crate::error::{Error, Result};
use crate::models::{fermi_hop, zxyz, GaussianModel};
use crate::fermion::jordan_wigner;
use crate::pauli::{PauliHamiltonian, PauliSum};
use crate::suzuki::build_schedule;

/// Number of Haar probes added to the basis states for the fixed-input estimate.
pub const HAAR_PROBES: usize = 64;

const PROBE_STREAM: u64 = 1 << 40;

#[derive(Clone, Debug, Serialize)]
pub struct PNormEntry {
    pub p: f64,
    /// Normalized Schatten norm of the error operator.
    pub norm: f64,
    /// `min(1, (norm/ε)^p)`.
    pub markov_bound: f64,
    /// Empirical bound check: tail ≤ bound + 3 SE.
    pub consistent: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorReport {
    pub n: usize,
    pub config: ExperimentConfig,
    pub spectral_norm: f64,
    pub p_norms: Vec<PNormEntry>,
    /// `‖Eψ‖` over the sampled states.
    pub state_error: Estimate,
    pub quantiles: Vec<(f64, f64)>,
    /// Fraction of samples with `‖Eψ‖ ≥ ε`.
    pub tail: Estimate,
    /// Expected p-norm of a deterministic operator: the normalized p-norm itself.
    pub expected_p_norm: Vec<(f64, f64)>,
    /// Max of `‖Eψ‖` over basis states and Haar probes; a lower bound on the fixed-input norm.
    pub fixed_input_lower_bound: f64,
    pub fixed_input_probes: usize,
}

fn draw_state(cfg: &ExperimentConfig, dim: usize, i: usize) -> StateVector {
    let mut rng = trial_rng(cfg.seed, i as u64);
    match cfg.ensemble {
        Ensemble::Haar => haar_state(&mut rng, dim),
        _ => basis_state(dim, rng.random_range(0..dim)),
    }
}

/// Tail statistics of a fixed error operator `E` over a state ensemble.
pub fn typical_error_of(e: &DenseOperator, n: usize, cfg: &ExperimentConfig) -> Result<ErrorReport> {
    cfg.validate()?;
    if cfg.ensemble == Ensemble::GaussianHamiltonian {
        return Err(Error::Invalid("state ensemble must be basis-1-design or haar".into()));
    }
    let dim = e.nrows();
    let errs: Vec<f64> = (0..cfg.samples).into_par_iter().map(|i| (e * draw_state(cfg, dim, i)).norm()).collect();
    let tail = Estimate::tail(&errs, cfg.eps);
    let mut p_norms = Vec::new();
    let mut expected = Vec::new();
    for &p in &cfg.ps {
        let norm = schatten_norm(e, p, true)?;
        let mb = markov_tail(norm, cfg.eps, p)?;
        p_norms.push(PNormEntry { p, norm, markov_bound: mb, consistent: tail.mean <= mb + 3.0 * tail.se });
        expected.push((p, norm));
    }
    let mut fixed: f64 = (0..dim).map(|b| e.column(b).norm()).fold(0.0, f64::max);
    for j in 0..HAAR_PROBES {
        let mut rng = trial_rng(cfg.seed, PROBE_STREAM + j as u64);
        fixed = fixed.max((e * haar_state(&mut rng, dim)).norm());
    }
    Ok(ErrorReport {
        n,
        config: cfg.clone(),
        spectral_norm: spectral_norm(e),
        p_norms,
        state_error: Estimate::of(&errs),
        quantiles: quantiles(&errs),
        tail,
        expected_p_norm: expected,
        fixed_input_lower_bound: fixed,
        fixed_input_probes: dim + HAAR_PROBES,
    })
}

/// Builds `e^{iHt} − S_ℓ(t/r)^r` once and samples states from the ensemble.
pub fn sample_typical_error(h: &PauliHamiltonian, cfg: &ExperimentConfig) -> Result<ErrorReport> {
    cfg.validate()?;
    let e = trotter_error_op(h, cfg.t, cfg.r, cfg.order, cfg.cap)?;
    typical_error_of(&e, h.n(), cfg)
}

/// Exact evolution of a state under a sampled Hamiltonian.
fn exact_state(h: &PauliHamiltonian, t: f64, psi: &StateVector, cap: usize) -> Result<StateVector> {
    let (vals, vecs) = hermitian_eigen(&to_matrix(h, cap)?);
    let mut c = vecs.adjoint() * psi;
    for (k, l) in vals.iter().enumerate() {
        c[k] *= Complex64::from_polar(1.0, l * t);
    }
    Ok(vecs * c)
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleRow {
    pub index: usize,
    pub r: u64,
    /// `‖(e^{iHt} − S^r)ψ‖`.
    pub l2_error: f64,
    /// Trace distance between the two output states.
    pub trace_distance: f64,
    pub spectral_error: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RandomReport {
    pub n: usize,
    pub config: ExperimentConfig,
    pub l2_error: Estimate,
    pub quantiles: Vec<(f64, f64)>,
    pub tail: Estimate,
    pub trace_distance: Estimate,
    /// Samples where the trace distance exceeds twice the ℓ₂ error.
    pub trace_conversion_failures: usize,
    pub spectral_error: Option<Estimate>,
    pub rows: Vec<SampleRow>,
}

/// Per-sample errors at each step count in `rs`, one Hamiltonian draw per sample.
pub fn random_error_rows(
    model: &GaussianModel,
    cfg: &ExperimentConfig,
    rs: &[u64],
    psi: Option<&StateVector>,
    spectral: bool,
) -> Result<Vec<Vec<SampleRow>>> {
    cfg.validate()?;
    let n = model.base.n();
    check_cap(n, cfg.cap)?;
    let dim = 1usize << n;
    let zero = basis_state(dim, 0);
    let psi = psi.unwrap_or(&zero);
    if psi.len() != dim {
        return Err(Error::Dimension(dim, psi.len()));
    }
    let rows: Vec<Result<Vec<SampleRow>>> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(cfg.seed, i as u64);
            let h = model.sample(&mut rng)?;
            let exact = exact_state(&h, cfg.t, psi, cfg.cap)?;
            rs.iter()
                .map(|&r| {
                    let sched = build_schedule(h.gamma(), cfg.order, cfg.t / r as f64)?;
                    let approx = apply_schedule_vec(&h, &sched, psi, r)?;
                    let spectral_error = if spectral {
                        Some(spectral_norm(&trotter_error_op(&h, cfg.t, r, cfg.order, cfg.cap)?))
                    } else {
                        None
                    };
                    Ok(SampleRow {
                        index: i,
                        r,
                        l2_error: (&exact - &approx).norm(),
                        trace_distance: trace_distance_pure(&exact, &approx),
                        spectral_error,
                    })
                })
                .collect()
        })
        .collect();
    let rows: Vec<Vec<SampleRow>> = rows.into_iter().collect::<Result<_>>()?;
    // transpose to one vector per r
    Ok((0..rs.len()).map(|j| rows.iter().map(|s| s[j].clone()).collect()).collect())
}

fn summarize(n: usize, cfg: &ExperimentConfig, rows: Vec<SampleRow>) -> RandomReport {
    let l2: Vec<f64> = rows.iter().map(|r| r.l2_error).collect();
    let td: Vec<f64> = rows.iter().map(|r| r.trace_distance).collect();
    let spec: Option<Vec<f64>> = rows.iter().map(|r| r.spectral_error).collect();
    RandomReport {
        n,
        config: cfg.clone(),
        l2_error: Estimate::of(&l2),
        quantiles: quantiles(&l2),
        tail: Estimate::tail(&l2, cfg.eps),
        trace_distance: Estimate::of(&td),
        trace_conversion_failures: rows.iter().filter(|r| r.trace_distance > 2.0 * r.l2_error + 1e-12).count(),
        spectral_error: spec.map(|s| Estimate::of(&s)),
        rows,
    }
}

/// Fixed-input errors (default `|0…0⟩`) for `cfg.samples` Gaussian draws.
pub fn sample_random_hamiltonian(
    model: &GaussianModel,
    cfg: &ExperimentConfig,
    psi: Option<&StateVector>,
    spectral: bool,
) -> Result<RandomReport> {
    let mut rows = random_error_rows(model, cfg, &[cfg.r], psi, spectral)?;
    Ok(summarize(model.base.n(), cfg, rows.remove(0)))
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingReport {
    pub rs: Vec<u64>,
    pub mean_error: Vec<Estimate>,
    pub tail: Vec<Estimate>,
    /// Slope of mean error against `1/r`.
    pub slope_inverse_r: f64,
}

/// Mean fixed-input error over a sweep of step counts sharing the same draws.
pub fn error_scaling(model: &GaussianModel, cfg: &ExperimentConfig, rs: &[u64]) -> Result<ScalingReport> {
    if rs.len() < 2 {
        return Err(Error::Invalid("need at least two step counts".into()));
    }
    let rows = random_error_rows(model, cfg, rs, None, false)?;
    let mut means = Vec::new();
    let mut tails = Vec::new();
    for col in &rows {
        let l2: Vec<f64> = col.iter().map(|r| r.l2_error).collect();
        means.push(Estimate::of(&l2));
        tails.push(Estimate::tail(&l2, cfg.eps));
    }
    let inv: Vec<f64> = rs.iter().map(|&r| 1.0 / r as f64).collect();
    let ys: Vec<f64> = means.iter().map(|e| e.mean).collect();
    Ok(ScalingReport { rs: rs.to_vec(), mean_error: means, tail: tails, slope_inverse_r: loglog_slope(&inv, &ys) })
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderReport {
    pub order: u32,
    pub taus: Vec<f64>,
    pub errors: Vec<f64>,
    /// Fitted exponent; `None` when every error sits at the floor.
    pub slope: Option<f64>,
    pub exact: bool,
    /// Number of ×10 shifts applied to the τ window.
    pub widened: u32,
}

/// Errors at or below this are treated as roundoff.
pub const ORDER_FLOOR: f64 = 1e-12;

/// Slope of `‖S_ℓ(τ) − e^{iHτ}‖` over 8 log-spaced τ in `[τ_lo, 10 τ_lo]`.
pub fn check_order_condition(h: &PauliHamiltonian, order: u32, tau_lo: f64, cap: usize) -> Result<OrderReport> {
    check_cap(h.n(), cap)?;
    let hm = to_matrix(h, cap)?;
    let (vals, vecs) = hermitian_eigen(&hm);
    let mut lo = tau_lo;
    for widened in 0..4u32 {
        let taus: Vec<f64> = (0..8).map(|i| lo * 10f64.powf(i as f64 / 7.0)).collect();
        let mut errors = Vec::new();
        for &tau in &taus {
            let mut d = vecs.clone();
            for (k, l) in vals.iter().enumerate() {
                let ph = Complex64::from_polar(1.0, l * tau);
                for x in d.column_mut(k).iter_mut() {
                    *x *= ph;
                }
            }
            let exact = d * vecs.adjoint();
            let s = apply_schedule(h, &build_schedule(h.gamma().max(1), order, tau)?, cap)?;
            let s = if h.gamma() == 0 { exact.clone() } else { s };
            errors.push(spectral_norm(&(s - exact)));
        }
        let keep: Vec<usize> = (0..8).filter(|&i| errors[i] > ORDER_FLOOR).collect();
        if keep.len() >= 6 {
            let xs: Vec<f64> = keep.iter().map(|&i| taus[i]).collect();
            let ys: Vec<f64> = keep.iter().map(|&i| errors[i]).collect();
            return Ok(OrderReport { order, slope: Some(loglog_slope(&xs, &ys)), taus, errors, exact: false, widened });
        }
        if widened == 3 || errors.iter().all(|&e| e <= ORDER_FLOOR) && lo * 10.0 > 1.0 {
            return Ok(OrderReport { order, taus, errors, slope: None, exact: true, widened });
        }
        lo *= 10.0;
    }
    unreachable!()
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutatorEntry {
    pub name: String,
    /// Normalized 2-norm from the dense matrix.
    pub two_norm: f64,
    /// Normalized 2-norm from the Pauli coefficients.
    pub two_norm_pauli: f64,
    pub spectral: f64,
    pub closed_two_norm: f64,
    pub closed_spectral: Option<f64>,
    pub rel_err_two: f64,
    pub rel_err_spectral: Option<f64>,
    /// Exact value when the closed form above is known not to be it.
    pub exact_two_norm: Option<f64>,
}

impl CommutatorEntry {
    fn new(name: &str, op: &PauliSum, closed_two: f64, closed_spec: Option<f64>, exact_two: Option<f64>, cap: usize) -> Result<Self> {
        let m = sum_to_matrix(op, cap)?;
        let two = schatten_norm(&m, 2.0, true)?;
        let spec = spectral_norm(&m);
        Ok(CommutatorEntry {
            name: name.into(),
            two_norm: two,
            two_norm_pauli: op.norm2_sq().sqrt(),
            spectral: spec,
            closed_two_norm: closed_two,
            closed_spectral: closed_spec,
            rel_err_two: (two - closed_two).abs() / closed_two,
            rel_err_spectral: closed_spec.map(|c| (spec - c).abs() / c),
            exact_two_norm: exact_two,
        })
    }

    pub fn matches(&self, tol: f64) -> bool {
        self.rel_err_two <= tol && self.rel_err_spectral.is_none_or(|e| e <= tol)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OptimalityReport {
    /// `"zxyz"` or `"fermi-hop"`.
    pub model: String,
    pub m: usize,
    pub order: u32,
    pub n: usize,
    pub entries: Vec<CommutatorEntry>,
    /// Spectral over normalized 2-norm for the first entry.
    pub separation: f64,
}

fn sum_of(h: &PauliHamiltonian, idx: &[usize]) -> Result<PauliSum> {
    Ok(h.subset(idx)?.as_sum().clone())
}

/// Three-block model `A = Σ Z X`, `B = Σ Y Z`: commutator norms against closed forms.
/// Order 1: `‖[A,B]‖₂ = 2m^{3/2}`, `‖[A,B]‖ = 2m³`. Order 2: both nested commutators have
/// `‖·‖₂ = 4m^{3/2}√(3m−2)` and `‖·‖ = 4m⁴`.
pub fn optimality_experiment(m: usize, order: u32, cap: usize) -> Result<OptimalityReport> {
    check_cap(3 * m, cap)?;
    let model = zxyz(m)?;
    let a = sum_of(&model.hamiltonian, &model.groups[0])?;
    let b = sum_of(&model.hamiltonian, &model.groups[1])?;
    let mf = m as f64;
    let ab = a.commutator(&b)?;
    let entries = match order {
        1 => vec![CommutatorEntry::new("[A,B]", &ab, 2.0 * mf.powf(1.5), Some(2.0 * mf.powi(3)), None, cap)?],
        2 => {
            let two = 4.0 * mf.powf(1.5) * (3.0 * mf - 2.0).sqrt();
            let spec = 4.0 * mf.powi(4);
            vec![
                CommutatorEntry::new("[B,[B,A]]", &b.commutator(&b.commutator(&a)?)?, two, Some(spec), None, cap)?,
                CommutatorEntry::new("[A,[A,B]]", &a.commutator(&ab)?, two, Some(spec), None, cap)?,
            ]
        }
        _ => return Err(Error::Unsupported(format!("optimality experiment for order {order}"))),
    };
    let separation = entries[0].spectral / entries[0].two_norm;
    Ok(OptimalityReport { model: "zxyz".into(), m, order, n: 3 * m, entries, separation })
}

/// Fermionic hopping analog. The tabulated forms `2√m·m·√m` and `2√m·m²·√m` are
/// compared; `exact_two_norm` carries `m²/√2` and `m³/√2`.
pub fn fermi_optimality_experiment(m: usize, cap: usize) -> Result<OptimalityReport> {
    check_cap(3 * m, cap)?;
    let model = fermi_hop(m)?;
    let a = jordan_wigner(&model.a)?.hamiltonian.as_sum().clone();
    let b = jordan_wigner(&model.b)?.hamiltonian.as_sum().clone();
    let mf = m as f64;
    let sq = mf.sqrt();
    let entries = vec![
        CommutatorEntry::new("[A,B]", &a.commutator(&b)?, 2.0 * sq * mf * sq, None, Some(mf * mf / 2f64.sqrt()), cap)?,
        CommutatorEntry::new(
            "[B,[B,A]]",
            &b.commutator(&b.commutator(&a)?)?,
            2.0 * sq * mf * mf * sq,
            None,
            Some(mf.powi(3) / 2f64.sqrt()),
            cap,
        )?,
    ];
    let separation = entries[0].spectral / entries[0].two_norm;
    Ok(OptimalityReport { model: "fermi-hop".into(), m, order: 2, n: 3 * m, entries, separation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{all_two_local, chain_heisenberg, k_local_syk};
    use crate::pauli::PauliTerm;

    fn cfg(samples: usize, ensemble: Ensemble, r: u64) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(11, samples, ensemble, 1.0, r, 1, 0.05);
        c.ps = vec![2.0, 4.0];
        c
    }

    #[test]
    fn commuting_hamiltonian_has_no_error() {
        let h = PauliHamiltonian::new(3, ["ZZI", "IZZ", "ZIZ"].map(|l| PauliTerm::from_label(l, 0.7).unwrap())).unwrap();
        let rep = sample_typical_error(&h, &cfg(50, Ensemble::Haar, 3)).unwrap();
        assert!(rep.spectral_norm < 1e-12);
        assert_eq!(rep.tail.mean, 0.0);
        assert!(rep.p_norms.iter().all(|e| e.markov_bound < 1e-12));
        let o = check_order_condition(&h, 2, 1e-3, 12).unwrap();
        assert!(o.exact && o.slope.is_none());
    }

    #[test]
    fn markov_consistency_and_determinism() {
        let h = chain_heisenberg(4, 1.0).unwrap();
        let c = cfg(300, Ensemble::Basis1Design, 2);
        let a = sample_typical_error(&h, &c).unwrap();
        assert!(a.p_norms.iter().all(|e| e.consistent));
        assert!(a.quantiles.windows(2).all(|w| w[0].1 <= w[1].1));
        let b = sample_typical_error(&h, &c).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(a.fixed_input_lower_bound <= a.spectral_norm * (1.0 + 1e-12));
        // deterministic operator: expected p-norm equals the p-norm
        for (e, (p, v)) in a.p_norms.iter().zip(&a.expected_p_norm) {
            assert_eq!(e.p, *p);
            assert_eq!(e.norm, *v);
        }
    }

    #[test]
    fn random_hamiltonian_report() {
        let m = k_local_syk(4, 2, 1.0, 0).unwrap();
        let c = cfg(20, Ensemble::GaussianHamiltonian, 4);
        let rep = sample_random_hamiltonian(&m, &c, None, true).unwrap();
        assert_eq!(rep.trace_conversion_failures, 0);
        assert!(rep.spectral_error.unwrap().mean >= rep.l2_error.mean);
    }

    #[test]
    fn variance_scaling_at_first_order() {
        let m = all_two_local(3).unwrap();
        let big = GaussianModel { base: m.base.scaled(2.0) };
        let mut c = cfg(30, Ensemble::GaussianHamiltonian, 20);
        c.t = 0.01;
        let a = sample_random_hamiltonian(&m, &c, None, true).unwrap().spectral_error.unwrap().mean;
        let b = sample_random_hamiltonian(&big, &c, None, true).unwrap().spectral_error.unwrap().mean;
        let ratio = b / a;
        assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn first_order_error_scaling() {
        let m = k_local_syk(4, 2, 1.0, 3).unwrap();
        let c = cfg(20, Ensemble::GaussianHamiltonian, 10);
        let s = error_scaling(&m, &c, &[10, 20, 40, 80]).unwrap();
        assert!((s.slope_inverse_r - 1.0).abs() < 0.1, "{}", s.slope_inverse_r);
    }

    #[test]
    fn order_slopes_small() {
        let m = all_two_local(3).unwrap();
        let h = m.sample(&mut trial_rng(5, 0)).unwrap();
        for order in [1u32, 2] {
            let o = check_order_condition(&h, order, 1e-3, 12).unwrap();
            let s = o.slope.unwrap();
            assert!((s - (order as f64 + 1.0)).abs() < 0.15, "order {order} slope {s}");
        }
    }

    #[test]
    fn optimality_closed_forms() {
        for m in [1, 2] {
            let r = optimality_experiment(m, 1, 12).unwrap();
            assert!(r.entries[0].matches(1e-9), "{:?}", r.entries[0]);
            let r2 = optimality_experiment(m, 2, 12).unwrap();
            assert!(r2.entries.iter().all(|e| e.matches(1e-9)), "{:?}", r2.entries);
        }
        let r = optimality_experiment(1, 1, 12).unwrap();
        assert!((r.entries[0].two_norm - 2.0).abs() < 1e-12 && (r.entries[0].spectral - 2.0).abs() < 1e-12);
    }

    #[test]
    fn fermi_exact_values() {
        for m in [1, 2] {
            let r = fermi_optimality_experiment(m, 12).unwrap();
            for e in &r.entries {
                let x = e.exact_two_norm.unwrap();
                assert!((e.two_norm - x).abs() < 1e-9 * x, "{} {} {}", e.name, e.two_norm, x);
                assert!((e.two_norm_pauli - e.two_norm).abs() < 1e-9 * x);
            }
        }
    }
}
