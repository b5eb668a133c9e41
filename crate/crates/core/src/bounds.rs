//! Gate-count calculators, Table 1 scalings, power-law truncation and the
//! counting estimate.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::dense::binomial;
use crate::error::{Error, Result};
use crate::models::{distance, lattice_side, syk_variance};
use crate::norms::NormProfile;
use crate::suzuki::{build_schedule, upsilon};

/// Upper limit on the step count before a query is declared infeasible.
pub const R_CAP: f64 = 1e15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    NonrandomTypical,
    RandomSpectral,
    RandomFixed,
    FirstOrderRandomSpectral,
    FirstOrderRandomFixed,
    #[serde(rename = "spectral-1norm-baseline")]
    Spectral1NormBaseline,
}

impl std::str::FromStr for Regime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::Invalid(format!("unknown regime {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GateCountQuery {
    pub t: f64,
    pub eps: f64,
    pub delta: f64,
    pub order: u32,
    pub regime: Regime,
}

impl GateCountQuery {
    pub fn new(t: f64, eps: f64, delta: f64, order: u32, regime: Regime) -> Result<Self> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::Invalid(format!("t={t} must be finite and >= 0")));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Invalid(format!("eps={eps} must be positive")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::Invalid(format!("delta={delta} must lie in (0,1)")));
        }
        upsilon(order)?;
        Ok(GateCountQuery { t, eps, delta, order, regime })
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Diagnostics {
    pub eta: Option<f64>,
    /// Step count forced by the failure probability.
    pub r_delta: Option<f64>,
    /// Step count forced by the two constraints at `p_star`.
    pub r_constraint: Option<f64>,
    /// Constraint step count from the closed-form `a`.
    pub r_constraint_closed_form: Option<f64>,
    /// Constraint step count from an exact solve of the constraints.
    pub r_constraint_exact: Option<f64>,
    /// The two step counts as printed in the source displays (evaluated at `p_r`).
    pub r_delta_display: Option<f64>,
    pub r_constraint_display: Option<f64>,
    /// `p_r` at the returned `r`.
    pub p_at_r: Option<f64>,
    pub a: Option<f64>,
    pub x_transcendental: Option<f64>,
    pub log_clamped: bool,
    pub constraint1_ok: Option<bool>,
    pub constraint2_ok: Option<bool>,
    /// `(t/r)‖H‖_{(1),2} ≤ 4` for the first-order random theorem.
    pub step_condition_ok: Option<bool>,
    pub dominating: Option<String>,
    /// Unit-constant Ω form of the step count.
    pub r_asymptotic: Option<f64>,
    pub gates_asymptotic: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GateCountResult {
    pub regime: Regime,
    pub r: u64,
    pub r_real: f64,
    /// `Γ·Υ·r`.
    pub gates: f64,
    /// Merged exponential count per segment times `r`.
    pub gates_merged: Option<f64>,
    pub gamma: usize,
    pub upsilon: u64,
    pub p_star: f64,
    pub asymptotic: bool,
    pub infeasible: bool,
    pub diagnostics: Diagnostics,
}

fn merged_len(gamma: usize, order: u32) -> Option<usize> {
    if gamma == 0 || gamma > 100_000 {
        return None;
    }
    build_schedule(gamma, order, 1.0).ok().map(|s| s.len())
}

fn finish(regime: Regime, profile: &NormProfile, order: u32, r_real: f64, p_star: f64, asymptotic: bool, diagnostics: Diagnostics) -> Result<GateCountResult> {
    let ups = upsilon(order)?;
    let infeasible = !r_real.is_finite() || r_real > R_CAP;
    let r = if infeasible { R_CAP as u64 } else { (r_real.ceil() as u64).max(1) };
    let gamma = profile.gamma;
    let gates = (gamma as f64) * ups as f64 * r as f64;
    let gates_merged = merged_len(gamma, order).map(|j| j as f64 * r as f64);
    Ok(GateCountResult { regime, r, r_real, gates, gates_merged, gamma, upsilon: ups, p_star, asymptotic, infeasible, diagnostics })
}

/// Root of `x = 2(e(ℓ+1))^{k−1} ln^{k−1}(x)` above `e`, by fixed-point
/// iteration from `(2e(ℓ+1))^k` with a bisection fallback on `[e, 1e15]`.
pub fn transcendental_x(k: usize, order: u32) -> Result<f64> {
    let km = (k - 1) as i32;
    let c = 2.0 * (E * (order as f64 + 1.0)).powi(km);
    let g = |x: f64| c * x.ln().powi(km);
    if k == 1 {
        return Ok(c);
    }
    let mut x = (2.0 * E * (order as f64 + 1.0)).powi(k as i32);
    for _ in 0..10_000 {
        let nx = g(x);
        if !nx.is_finite() || nx <= E {
            break;
        }
        if ((nx - x) / x).abs() < 1e-10 {
            return Ok(nx);
        }
        x = nx;
    }
    let f = |x: f64| x - g(x);
    let (mut lo, mut hi) = (E, 1e15);
    if f(hi) <= 0.0 {
        return Err(Error::Infeasible("transcendental equation has no root below 1e15".into()));
    }
    // move lo to the minimum of f so the bracket holds a single root
    let xmin = (c * km as f64).max(E);
    if f(xmin) < 0.0 {
        lo = xmin;
    }
    if f(lo) > 0.0 {
        return Ok(lo);
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if (hi - lo) / hi < 1e-12 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Closed-form `a = max[(e(ℓ+3))^{k−1}, 2(e ln ρ)^{k−1}, x]` with `ρ = c₂/c₁`,
/// the log argument clamped at `e`.
pub fn closed_form_a(k: usize, order: u32, ratio: f64) -> Result<(f64, f64, bool)> {
    let km = (k - 1) as i32;
    let l = order as f64;
    let a1 = (E * (l + 3.0)).powi(km);
    let clamped = ratio.is_nan() || ratio < E;
    let rho = if clamped { E } else { ratio };
    let a2 = 2.0 * (E * rho.ln()).powi(km);
    let x = transcendental_x(k, order)?;
    Ok((a1.max(a2).max(x), x, clamped))
}

/// Smallest `y` with `y ≥ e(ℓ+3)` and `y ≥ e ln(ρ y^{(k−1)(ℓ+1)})`.
pub fn exact_constraint_y(k: usize, order: u32, ratio: f64) -> f64 {
    let l = order as f64;
    let m = E * (k as f64 - 1.0) * (l + 1.0);
    let f = |y: f64| y - m * y.ln() - E * ratio.max(f64::MIN_POSITIVE).ln();
    let y1 = E * (l + 3.0);
    let ymin = m.max(1e-300);
    if f(ymin) >= 0.0 {
        return y1;
    }
    let (mut lo, mut hi) = (ymin, ymin.max(1.0) * 2.0);
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    y1.max(hi)
}

struct HoConstants {
    /// Base rate `b` with `b_p = p^{(k−1)/2} b` (non-random) or `√p b` (random).
    b: f64,
    c1: f64,
    ratio: f64,
    eta: f64,
    /// Exponent of `p` in `b_p`.
    bp_exp: f64,
}

fn higher_order_r(k: usize, q: &GateCountQuery, c: &HoConstants, log_term: f64, diag: &mut Diagnostics) -> Result<(f64, f64)> {
    let l = q.order as f64;
    let p_star = 2f64.max(log_term / c.eta);
    let bt = c.b * q.t;
    // r_δ^ℓ = (e p*)^η · 2c₁ (bt)^{ℓ+1} / ε
    let ln_rd = (c.eta * (E * p_star).ln() + (2.0 * c.c1).ln() + (l + 1.0) * bt.ln() - q.eps.ln()) / l;
    let r_delta = ln_rd.exp();
    diag.eta = Some(c.eta);
    diag.r_delta = Some(r_delta);
    let mut r_con = 0.0;
    if k >= 2 {
        let (a, x, clamped) = closed_form_a(k, q.order, c.ratio)?;
        let bp = p_star.powf(c.bp_exp) * c.b;
        let r_a = a * bp * q.t;
        let y = exact_constraint_y(k, q.order, c.ratio);
        let r_exact = y.powi(k as i32 - 1) * bp * q.t;
        r_con = r_a.max(r_exact);
        diag.a = Some(a);
        diag.x_transcendental = Some(x);
        diag.log_clamped = clamped;
        diag.r_constraint_closed_form = Some(r_a);
        diag.r_constraint_exact = Some(r_exact);
        diag.r_constraint = Some(r_con);
    }
    let r_real = r_delta.max(r_con);
    let r = r_real.ceil().max(1.0);
    diag.dominating = Some(if r_delta >= r_con { "log-delta".into() } else { "constraint".into() });
    diag.p_at_r = Some((q.eps * r.powf(l) / (2.0 * c.c1 * bt.powf(l + 1.0))).powf(1.0 / c.eta) / E);
    if k >= 2 {
        let bp = p_star.powf(c.bp_exp) * c.b;
        let y = (r / (bp * q.t)).powf(1.0 / (k as f64 - 1.0));
        diag.constraint1_ok = Some(y >= E * (l + 3.0) * (1.0 - 1e-12));
        let rhs = E * (c.ratio * y.powf((k as f64 - 1.0) * (l + 1.0))).ln();
        diag.constraint2_ok = Some(y >= rhs * (1.0 - 1e-12));
    }
    Ok((r_real, p_star))
}

fn empty_result(regime: Regime, profile: &NormProfile, q: &GateCountQuery, asymptotic: bool) -> Result<GateCountResult> {
    let mut r = finish(regime, profile, q.order, 0.0, 2.0, asymptotic, Diagnostics::default())?;
    r.gates = 0.0;
    r.gates_merged = Some(0.0);
    Ok(r)
}

/// Non-random k-local Hamiltonians with typical (1-design) inputs.
pub fn gatecount_nonrandom(profile: &NormProfile, q: &GateCountQuery) -> Result<GateCountResult> {
    let k = profile.k;
    if profile.gamma == 0 || profile.lambda == 0.0 || q.t == 0.0 {
        return empty_result(Regime::NonrandomTypical, profile, q, false);
    }
    let l = q.order as f64;
    let kf = k as f64;
    let eta = ((l + 1.0) * (kf - 1.0) + 1.0) / 2.0;
    let lam = profile.lambda;
    let lamp = profile.lambda_prime;
    let h02 = profile.norm(0, 2);
    let pw = (l + 1.0).powf((l + 1.0) * (kf - 1.0));
    let b = 2.0 * lam;
    let c1 = h02 * pw / (b * (1.0 - 1.0 / E));
    let ratio = (E - 1.0) / (kf.sqrt().powf(kf) * pw) * lamp / lam;
    let consts = HoConstants { b, c1, ratio, eta, bp_exp: (kf - 1.0) / 2.0 };
    let mut diag = Diagnostics::default();
    let ld = (1.0 / q.delta).ln();
    let (r_real, p_star) = higher_order_r(k, q, &consts, ld, &mut diag)?;

    // verbatim displays
    let s = (E * ld / eta).sqrt();
    let disp = (2.0 * s / (E - 1.0) * ((l + 1.0) * s).powf((l + 1.0) * (kf - 1.0)) * h02 * q.t / q.eps).powf(1.0 / l) * b * q.t;
    diag.r_delta_display = Some(disp);
    if k >= 2 {
        if let Some(a) = diag.a {
            let v = a.powf(2.0 * eta / kf)
                * b
                * q.t.powf(1.0 / kf)
                * ((1.0 - 1.0 / E) / (2.0 * E.powf(eta) * pw) * q.eps / h02).powf((kf - 1.0) / kf);
            diag.r_constraint_display = Some(v);
        }
    }
    finish(Regime::NonrandomTypical, profile, q.order, r_real, p_star, false, diag)
}

/// Random-coefficient k-local Hamiltonians, ℓ ≥ 2.
pub fn gatecount_random_ho(profile: &NormProfile, n: usize, q: &GateCountQuery) -> Result<GateCountResult> {
    let spectral = match q.regime {
        Regime::RandomSpectral => true,
        Regime::RandomFixed => false,
        other => return Err(Error::Invalid(format!("regime {other:?} is not a random higher-order regime"))),
    };
    if q.order < 2 {
        return Err(Error::Unsupported("random higher-order bound needs an even order >= 2".into()));
    }
    if profile.gamma == 0 || q.t == 0.0 {
        return empty_result(q.regime, profile, q, false);
    }
    let k = profile.k;
    let (l, kf) = (q.order as f64, k as f64);
    let (h01, h02, h12) = (profile.norm(0, 1), profile.norm(0, 2), profile.norm(1, 2));
    let ck = 4.0 * E * kf * h12;
    let eta = (l + 1.0) / 2.0;
    let pw = (l + 1.0).powf((kf - 1.0) * (l + 1.0));
    let c1 = E / ck * h02 * h02 / h12 * pw / (1.0 - 1.0 / E);
    let ratio = (E - 1.0) / (2.0 * kf) * h01 / (h02 * pw);
    let consts = HoConstants { b: ck, c1, ratio, eta, bp_exp: 0.5 };
    let mut diag = Diagnostics::default();
    let ld = (1.0 / q.delta).ln() + if spectral { n as f64 * 2f64.ln() } else { 0.0 };
    let (r_real, p_star) = higher_order_r(k, q, &consts, ld, &mut diag)?;
    let lg = (1.0 / q.delta).ln() + if spectral { n as f64 } else { 0.0 };
    let ra = h12 * lg.sqrt() * q.t * (h02 * h02 * lg.sqrt() * q.t / (h12 * q.eps)).powf(1.0 / l);
    diag.r_asymptotic = Some(ra);
    diag.gates_asymptotic = Some(profile.gamma as f64 * upsilon(q.order)? as f64 * ra);
    finish(q.regime, profile, q.order, r_real, p_star, false, diag)
}

/// First-order Trotter for random Hamiltonians, `G = 2√2 Γ (n ln d + ln(e²/δ)) ‖H‖_{(0),2}‖H‖_{(1),2} t²/ε`.
pub fn gatecount_random_first(profile: &NormProfile, n: usize, d_local: f64, q: &GateCountQuery) -> Result<GateCountResult> {
    let spectral = match q.regime {
        Regime::FirstOrderRandomSpectral => true,
        Regime::FirstOrderRandomFixed => false,
        other => return Err(Error::Invalid(format!("regime {other:?} is not a first-order random regime"))),
    };
    if q.order != 1 {
        return Err(Error::Invalid("first-order random bound needs order 1".into()));
    }
    if profile.gamma == 0 {
        return empty_result(q.regime, profile, q, false);
    }
    let logs = (E * E / q.delta).ln() + if spectral { n as f64 * d_local.ln() } else { 0.0 };
    let r_real = 2.0 * 2f64.sqrt() * logs * profile.norm(0, 2) * profile.norm(1, 2) * q.t * q.t / q.eps;
    let mut diag = Diagnostics::default();
    let r = r_real.ceil().max(1.0);
    diag.step_condition_ok = Some(q.t / r * profile.norm(1, 2) <= 4.0);
    finish(q.regime, profile, 1, r_real, 2f64.max(logs), false, diag)
}

/// SYK corollary form `G = (2√2/(k·k!))(n ln d + ln(e²/δ)) n^{k+1/2}(Jt)²/ε`.
pub fn syk_first_order_gates(n: usize, k: usize, j: f64, t: f64, eps: f64, delta: f64, spectral: bool) -> f64 {
    let kf = k as f64;
    let fact: f64 = (1..=k).map(|v| v as f64).product();
    let logs = (E * E / delta).ln() + if spectral { n as f64 * 2f64.ln() } else { 0.0 };
    2.0 * 2f64.sqrt() / (kf * fact) * logs * (n as f64).powf(kf + 0.5) * (j * t).powi(2) / eps
}

/// Exact SYK norm profile pieces: `(Γ, ‖H‖_{(0),2}, ‖H‖_{(1),2})` with `b_γ = σ`.
pub fn syk_norms(n: usize, k: usize, j: f64) -> (f64, f64, f64) {
    let s2 = syk_variance(n, k, j);
    let g = binomial(n as u64, k as u64);
    let per_site = binomial(n as u64 - 1, k as u64 - 1);
    (g, (g * s2).sqrt(), (per_site * s2).sqrt())
}

/// Spectral-norm state of the art, `G ≈ Γ‖H‖_{(1),1} t` (asymptotic).
pub fn baseline_1norm(profile: &NormProfile, q: &GateCountQuery) -> Result<GateCountResult> {
    let g = profile.gamma as f64 * profile.norm(1, 1) * q.t;
    let mut diag = Diagnostics::default();
    diag.gates_asymptotic = Some(g);
    diag.r_asymptotic = Some(profile.norm(1, 1) * q.t);
    let mut res = finish(Regime::Spectral1NormBaseline, profile, q.order, profile.norm(1, 1) * q.t, 2.0, true, diag)?;
    res.gates = g;
    res.gates_merged = None;
    Ok(res)
}

/// `Γ ‖H‖_{(1),2} t`, the typical-input 2-norm scaling at unit constants.
pub fn typical_2norm_asymptotic(profile: &NormProfile, t: f64) -> f64 {
    profile.gamma as f64 * profile.norm(1, 2) * t
}

pub fn gatecount(profile: &NormProfile, n: usize, q: &GateCountQuery) -> Result<GateCountResult> {
    match q.regime {
        Regime::NonrandomTypical => gatecount_nonrandom(profile, q),
        Regime::RandomSpectral | Regime::RandomFixed => gatecount_random_ho(profile, n, q),
        Regime::FirstOrderRandomSpectral | Regime::FirstOrderRandomFixed => gatecount_random_first(profile, n, 2.0, q),
        Regime::Spectral1NormBaseline => baseline_1norm(profile, q),
    }
}

/// `min(1, (norm/ε)^p)`.
pub fn markov_tail(norm: f64, eps: f64, p: f64) -> Result<f64> {
    if !(eps > 0.0) || p < 1.0 {
        return Err(Error::Invalid("markov_tail needs eps > 0 and p >= 1".into()));
    }
    Ok((norm / eps).powf(p).min(1.0))
}

// ---------------------------------------------------------------- Table 1

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    /// Norm-level row (no explicit n dependence).
    Norms,
    KLocal { k: u32 },
    /// `d/2 ≤ α ≤ d`, or the truncated `d < α` row for fixed/typical inputs.
    PowerLaw { d: u32, alpha: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Qdrift,
    Qubitization,
    HigherOrder,
    FirstOrder,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Inputs {
    Spectral,
    AllInputs,
    FixedTypical,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentRecord {
    pub method: Method,
    pub inputs: Inputs,
    /// LaTeX of the tabulated cell.
    pub formula: String,
    /// `None` for norm-level cells.
    pub n: Option<f64>,
    pub t: f64,
    pub inv_eps: f64,
    pub row: String,
}

fn rec(method: Method, inputs: Inputs, formula: &str, n: Option<f64>, t: f64, inv_eps: f64, row: &str) -> ExponentRecord {
    ExponentRecord { method, inputs, formula: formula.into(), n, t, inv_eps, row: row.into() }
}

/// Every tabulated cell for a family, in table order.
pub fn table1_cells(family: Family) -> Result<Vec<ExponentRecord>> {
    use Inputs::*;
    use Method::*;
    Ok(match family {
        Family::Norms => {
            let row = "norms";
            vec![
                rec(Qdrift, Spectral, r"\lnormp{\bm{H}}{(0),1}^2 t^2/\epsilon", None, 2.0, 1.0, row),
                rec(Qubitization, Spectral, r"\Gamma'\lnormp{\bm{H}}{(0),1} t", None, 1.0, 0.0, row),
                rec(HigherOrder, Spectral, r"\Gamma\lnormp{\bm{H}}{(1),1} t", None, 1.0, 0.0, row),
                rec(FirstOrder, Spectral, r"\Gamma \lnormp{\bm{H}}{(0),1} \lnormp{\bm{H}}{(1),1} t^2/\epsilon", None, 2.0, 1.0, row),
                rec(HigherOrder, AllInputs, r"\sqrt{n}\Gamma\lnormp{\bm{H}}{(1),2} t", None, 1.0, 0.0, row),
                rec(FirstOrder, AllInputs, r"n\Gamma\lnormp{\bm{H}}{(0),2} \lnormp{\bm{H}}{(1),2} t^2/\epsilon", None, 2.0, 1.0, row),
                rec(HigherOrder, FixedTypical, r"\Gamma\lnormp{\bm{H}}{(1),2} t", None, 1.0, 0.0, row),
                rec(FirstOrder, FixedTypical, r"\Gamma \lnormp{\bm{H}}{(0),2} \lnormp{\bm{H}}{(1),2} t^2/\epsilon", None, 2.0, 1.0, row),
            ]
        }
        Family::KLocal { k } => {
            let k = k as f64;
            let row = "k-local";
            vec![
                rec(Qdrift, Spectral, r"n^{k+1}t^2/\epsilon", Some(k + 1.0), 2.0, 1.0, row),
                rec(Qubitization, Spectral, r"n^{\frac{3k+1}{2}}t", Some((3.0 * k + 1.0) / 2.0), 1.0, 0.0, row),
                rec(HigherOrder, Spectral, r"n^{\frac{3k-1}{2}}t", Some((3.0 * k - 1.0) / 2.0), 1.0, 0.0, row),
                rec(FirstOrder, Spectral, r"n^{2k}t^2/\epsilon", Some(2.0 * k), 2.0, 1.0, row),
                rec(HigherOrder, AllInputs, r"n^{k+\frac{1}{2}}t", Some(k + 0.5), 1.0, 0.0, row),
                rec(FirstOrder, AllInputs, r"n^{k+\frac{3}{2}}t^2/\epsilon", Some(k + 1.5), 2.0, 1.0, row),
                rec(HigherOrder, FixedTypical, r"n^{k}t", Some(k), 1.0, 0.0, row),
                rec(FirstOrder, FixedTypical, r"n^{k+\frac{1}{2}}t^2/\epsilon", Some(k + 0.5), 2.0, 1.0, row),
            ]
        }
        Family::PowerLaw { d, alpha } => {
            let df = d as f64;
            if !(alpha > df / 2.0 || (alpha - df / 2.0).abs() < 1e-15) {
                return Err(Error::Unsupported(format!("power law with alpha={alpha} < d/2")));
            }
            let r = alpha / df;
            let mut v = Vec::new();
            if alpha <= df {
                let row = "power-law";
                v.extend([
                    rec(Qdrift, Spectral, r"n^{4-2\alpha/d}t^2/\epsilon", Some(4.0 - 2.0 * r), 2.0, 1.0, row),
                    rec(Qubitization, Spectral, r"n^{4-\frac{\alpha}{d}}t", Some(4.0 - r), 1.0, 0.0, row),
                    rec(HigherOrder, Spectral, r"n^{3-\frac{\alpha}{d}}t", Some(3.0 - r), 1.0, 0.0, row),
                    rec(FirstOrder, Spectral, r"n^{5-2\frac{\alpha}{d}}t^2/\epsilon", Some(5.0 - 2.0 * r), 2.0, 1.0, row),
                    rec(HigherOrder, AllInputs, r"n^{2+\frac{1}{2}}t", Some(2.5), 1.0, 0.0, row),
                    rec(FirstOrder, AllInputs, r"n^{2+\frac{3}{2}}t^2/\epsilon", Some(3.5), 2.0, 1.0, row),
                    rec(HigherOrder, FixedTypical, r"n^{2}t", Some(2.0), 1.0, 0.0, row),
                    rec(FirstOrder, FixedTypical, r"n^{2+\frac{1}{2}}t^2/\epsilon", Some(2.5), 2.0, 1.0, row),
                ]);
            }
            if alpha > df {
                let e = df / (2.0 * alpha - df);
                v.push(rec(
                    HigherOrder,
                    FixedTypical,
                    r"nt(\frac{nt^2}{\epsilon} )^{\frac{d}{2\alpha-d}}",
                    Some(1.0 + e),
                    1.0 + 2.0 * e,
                    e,
                    "power-law-truncated",
                ));
            }
            v
        }
    })
}

pub fn table1_exponents(family: Family, method: Method, inputs: Inputs) -> Result<ExponentRecord> {
    table1_cells(family)?
        .into_iter()
        .find(|c| c.method == method && c.inputs == inputs)
        .ok_or_else(|| Error::Unsupported(format!("no Table 1 cell for {family:?} / {method:?} / {inputs:?}")))
}

// ---------------------------------------------------------- truncation

/// Largest system for which residuals are summed pair by pair.
pub const ENUM_CAP: usize = 4096;

#[derive(Clone, Debug, Serialize)]
pub struct TruncationPlan {
    pub alpha: f64,
    pub d: usize,
    pub n: usize,
    pub t: f64,
    pub eps: f64,
    pub ell_cut: usize,
    /// Kept pair terms `|x−y| ≤ ell_cut` (exact when enumerated).
    pub kept_terms: f64,
    pub dropped_terms: f64,
    /// `sqrt(Σ_{|x−y|>ℓ} b²)`.
    pub residual_norm: f64,
    /// `"enumeration"` or `"integral-bound"`.
    pub residual_method: String,
    pub residual_error: f64,
    pub feasible: bool,
    /// Smallest cut meeting `t·residual ≤ ε` (enumeration path only).
    pub ell_cut_min: Option<usize>,
    pub gates: f64,
    pub asymptotic: bool,
}

fn sphere_area(d: usize) -> f64 {
    // 2π^{d/2}/Γ(d/2)
    let mut g = if d % 2 == 0 { 1.0 } else { std::f64::consts::PI.sqrt() };
    let mut x = if d % 2 == 0 { 1.0 } else { 0.5 };
    while x < d as f64 / 2.0 - 1e-12 {
        g *= x;
        x += 1.0;
    }
    2.0 * std::f64::consts::PI.powf(d as f64 / 2.0) / g
}

fn pair_distances(n: usize, d: usize) -> Result<Vec<f64>> {
    let side = lattice_side(n, d)?;
    let mut v = Vec::with_capacity(n * (n - 1) / 2);
    for x in 0..n {
        for y in x + 1..n {
            v.push(distance(x, y, side, d));
        }
    }
    Ok(v)
}

/// `(sqrt Σ_{|x−y|>ℓ} |x−y|^{−2α}, kept, dropped)` by enumeration.
pub fn residual_enumerated(n: usize, d: usize, alpha: f64, ell: usize) -> Result<(f64, f64, f64)> {
    let dist = pair_distances(n, d)?;
    let mut s = 0.0;
    let (mut kept, mut dropped) = (0.0, 0.0);
    for r in dist {
        if r > ell as f64 + 1e-12 {
            s += r.powf(-2.0 * alpha);
            dropped += 1.0;
        } else {
            kept += 1.0;
        }
    }
    Ok((s.sqrt(), kept, dropped))
}

/// Closed-form bound `(n/2) S_{d−1} κ^{d−1} (ℓ−√d)^{d−2α}/(2α−d)` on the squared residual,
/// `κ = 1 + √d/(2(ℓ−√d))`; infinite when `ℓ ≤ √d`.
pub fn residual_integral_bound(n: usize, d: usize, alpha: f64, ell: usize) -> f64 {
    let sd = (d as f64).sqrt();
    let lo = ell as f64 - sd;
    if lo <= 0.0 {
        return f64::INFINITY;
    }
    let kappa = 1.0 + sd / (2.0 * lo);
    let df = d as f64;
    (n as f64 / 2.0 * sphere_area(d) * kappa.powf(df - 1.0) * lo.powf(df - 2.0 * alpha) / (2.0 * alpha - df)).sqrt()
}

pub fn truncation_plan(n: usize, d: usize, alpha: f64, t: f64, eps: f64) -> Result<TruncationPlan> {
    if 2.0 * alpha <= d as f64 {
        return Err(Error::Invalid(format!("divergent tail: 2α={} <= d={d}", 2.0 * alpha)));
    }
    if !(eps > 0.0) || t < 0.0 {
        return Err(Error::Invalid("truncation needs eps > 0 and t >= 0".into()));
    }
    let df = d as f64;
    let x = n as f64 * t * t / (eps * eps);
    let ell_cut = (x.powf(1.0 / (2.0 * alpha - df)).ceil() as usize).max(1);
    let (residual, kept, dropped, method, ell_min) = if n <= ENUM_CAP {
        let (res, kept, dropped) = residual_enumerated(n, d, alpha, ell_cut)?;
        let side = lattice_side(n, d)?;
        let max_l = ((side - 1) as f64 * df.sqrt()).ceil() as usize;
        let mut ell_min = None;
        for l in 1..=max_l.max(1) {
            if t * residual_enumerated(n, d, alpha, l)?.0 <= eps {
                ell_min = Some(l);
                break;
            }
        }
        (res, kept, dropped, "enumeration", ell_min)
    } else {
        let ball = sphere_area(d) / df * (ell_cut as f64 + df.sqrt()).powf(df);
        let kept = (n as f64 * ball / 2.0).min(n as f64 * (n as f64 - 1.0) / 2.0);
        let total = n as f64 * (n as f64 - 1.0) / 2.0;
        (residual_integral_bound(n, d, alpha, ell_cut), kept, total - kept, "integral-bound", None)
    };
    let residual_error = t * residual;
    let gates = n as f64 * t * (n as f64 * t * t / eps).powf(df / (2.0 * alpha - df));
    Ok(TruncationPlan {
        alpha,
        d,
        n,
        t,
        eps,
        ell_cut,
        kept_terms: kept,
        dropped_terms: dropped,
        residual_norm: residual,
        residual_method: method.into(),
        residual_error,
        feasible: residual_error <= eps,
        ell_cut_min: ell_min,
        gates,
        asymptotic: true,
    })
}

// ------------------------------------------------------------ counting

#[derive(Clone, Debug, Serialize)]
pub struct NetSize {
    pub n: usize,
    pub k: usize,
    pub eps: f64,
    /// `Γ = C(n,k)`.
    pub gamma: f64,
    /// `E[J²] = J²(k−1)!/(k n^{k−1})`.
    pub variance: f64,
    /// `E[Σ J²]`.
    pub mean: f64,
    /// `Σ Var(J²) = 2Γσ⁴`.
    pub v: f64,
    /// Sub-exponential scale of each `J²`, `2σ²`.
    pub scale: f64,
    /// `E[ΣJ²] − ε²/2`.
    pub deviation: f64,
    /// `(Δ²/2)/(v + scaleΔ/3)`.
    pub exponent: f64,
    /// `min(1, 2e^{−exponent})`.
    pub tail: f64,
    /// `ln N` with `N = ⌊√(2/Pr)⌋` (evaluated in log form).
    pub log_net_size: f64,
    pub vacuous: bool,
    pub infinite: bool,
}

/// Bernstein estimate of `Pr(‖H−H′‖₂ < ε)` for two independent SYK draws and the
/// implied epsilon-net size.
pub fn counting_net_size(k: usize, n: usize, j: f64, eps: f64) -> Result<NetSize> {
    if k == 0 || k > n {
        return Err(Error::Invalid(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    if eps < 0.0 {
        return Err(Error::Invalid("eps must be >= 0".into()));
    }
    let gamma = binomial(n as u64, k as u64);
    let s2 = syk_variance(n, k, j);
    let mean = gamma * s2;
    let v = 2.0 * gamma * s2 * s2;
    let scale = 2.0 * s2;
    let dev = mean - eps * eps / 2.0;
    let mut out = NetSize {
        n,
        k,
        eps,
        gamma,
        variance: s2,
        mean,
        v,
        scale,
        deviation: dev,
        exponent: 0.0,
        tail: 1.0,
        log_net_size: 0.5 * 2f64.ln(),
        vacuous: false,
        infinite: false,
    };
    if eps == 0.0 {
        out.infinite = true;
        out.tail = 0.0;
        out.exponent = f64::INFINITY;
        out.log_net_size = f64::INFINITY;
        return Ok(out);
    }
    if dev <= 0.0 {
        out.vacuous = true;
        return Ok(out);
    }
    let ex = (dev * dev / 2.0) / (v + scale * dev / 3.0);
    out.exponent = ex;
    let ln_tail = (2f64.ln() - ex).min(0.0);
    out.tail = ln_tail.exp();
    out.log_net_size = 0.5 * (2f64.ln() - ln_tail);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;
    use crate::norms::NormProfile;

    fn q(t: f64, eps: f64, delta: f64, order: u32, regime: Regime) -> GateCountQuery {
        GateCountQuery::new(t, eps, delta, order, regime).unwrap()
    }

    #[test]
    fn transcendental_root() {
        for (k, l) in [(2, 1), (2, 2), (3, 2), (4, 4)] {
            let x = transcendental_x(k, l).unwrap();
            let c = 2.0 * (E * (l as f64 + 1.0)).powi(k as i32 - 1);
            let rhs = c * x.ln().powi(k as i32 - 1);
            assert!(((x - rhs) / x).abs() < 1e-9, "k={k} l={l} x={x} rhs={rhs}");
            assert!(x > E);
        }
    }

    #[test]
    fn exact_constraint_solution() {
        for (k, l, rho) in [(2, 2, 0.01), (3, 2, 5.0), (2, 4, 100.0)] {
            let y = exact_constraint_y(k, l, rho);
            let m = E * (k as f64 - 1.0) * (l as f64 + 1.0);
            assert!(y >= E * (l as f64 + 3.0) - 1e-9);
            assert!(y - m * y.ln() - E * rho.ln() >= -1e-6);
        }
    }

    #[test]
    fn nonrandom_chain_independent_arithmetic() {
        let h = models::chain_heisenberg(8, 1.0).unwrap();
        let p = NormProfile::of(&h).unwrap();
        let res = gatecount_nonrandom(&p, &q(1.0, 0.1, 0.1, 2, Regime::NonrandomTypical)).unwrap();
        // straight-line re-evaluation
        let (lam, lamp, h02) = (p.lambda, p.lambda_prime, p.norm(0, 2));
        let (k, l) = (2.0f64, 2.0f64);
        let eta = ((l + 1.0) * (k - 1.0) + 1.0) / 2.0;
        assert_eq!(eta, 2.0);
        let pstar = 2f64.max(10f64.ln() / eta);
        let c1 = h02 * 3f64.powf(3.0) / (2.0 * lam * (1.0 - 1.0 / E));
        let r_delta = ((E * pstar).powf(eta) * 2.0 * c1 * (2.0 * lam).powf(3.0) / 0.1).powf(0.5);
        let ratio = (E - 1.0) / (2.0 * 27.0) * lamp / lam;
        let a = (5.0 * E).max(2.0 * E * ratio.max(E).ln()).max(transcendental_x(2, 2).unwrap());
        let r_con = a * 2f64.sqrt() * 2.0 * lam;
        let expect = r_delta.max(r_con);
        assert!((res.r_real - expect).abs() < 1e-9 * expect, "{} vs {}", res.r_real, expect);
        assert_eq!(res.r, expect.ceil() as u64);
        assert_eq!(res.p_star, 2.0);
        assert_eq!(res.gates, 21.0 * 2.0 * res.r as f64);
        assert!(res.diagnostics.constraint1_ok.unwrap());
        assert!(res.diagnostics.constraint2_ok.unwrap());
        assert!(res.diagnostics.p_at_r.unwrap() >= 2.0 - 1e-9);
        // display of the log-driven bound
        let s = (E * 10f64.ln() / eta).sqrt();
        let disp = (2.0 * s / (E - 1.0) * (3.0 * s).powf(3.0) * h02 / 0.1).powf(0.5) * 2.0 * lam;
        assert!((res.diagnostics.r_delta_display.unwrap() - disp).abs() < 1e-9 * disp);
    }

    #[test]
    fn nonrandom_homogeneity_and_monotonicity() {
        let h = models::chain_heisenberg(6, 0.7).unwrap();
        let p = NormProfile::of(&h).unwrap();
        let base = gatecount_nonrandom(&p, &q(2.0, 0.05, 0.01, 2, Regime::NonrandomTypical)).unwrap();
        let scaled = gatecount_nonrandom(&p.scaled(2.0), &q(1.0, 0.05, 0.01, 2, Regime::NonrandomTypical)).unwrap();
        assert!((base.r_real - scaled.r_real).abs() < 1e-9 * base.r_real);
        let longer = gatecount_nonrandom(&p, &q(3.0, 0.05, 0.01, 2, Regime::NonrandomTypical)).unwrap();
        let tighter = gatecount_nonrandom(&p, &q(2.0, 0.01, 0.01, 2, Regime::NonrandomTypical)).unwrap();
        let surer = gatecount_nonrandom(&p, &q(2.0, 0.05, 1e-6, 2, Regime::NonrandomTypical)).unwrap();
        assert!(longer.r >= base.r && tighter.r >= base.r && surer.r >= base.r);
    }

    #[test]
    fn first_order_random_values() {
        let m = models::k_local_syk(8, 2, 1.0, 0).unwrap();
        let p = NormProfile::of(&m.base).unwrap();
        let (g, h02, h12) = syk_norms(8, 2, 1.0);
        assert!((p.norm(0, 2) - h02).abs() < 1e-12);
        assert!((p.norm(1, 2) - h12).abs() < 1e-12);
        let spec = gatecount_random_first(&p, 8, 2.0, &q(1.0, 0.1, 0.1, 1, Regime::FirstOrderRandomSpectral)).unwrap();
        let fixed = gatecount_random_first(&p, 8, 2.0, &q(1.0, 0.1, 0.1, 1, Regime::FirstOrderRandomFixed)).unwrap();
        let expect = 2.0 * 2f64.sqrt() * (8.0 * 2f64.ln() + (E * E / 0.1).ln()) * h02 * h12 / 0.1;
        assert!((spec.r_real - expect).abs() < 1e-12 * expect);
        assert_eq!(spec.gates, g * spec.r as f64);
        assert!(fixed.gates <= spec.gates);
        let fexp = 2.0 * 2f64.sqrt() * (E * E / 0.1f64).ln() * h02 * h12 / 0.1;
        assert!((fixed.r_real - fexp).abs() < 1e-12 * fexp);
        assert!(fixed.diagnostics.step_condition_ok.unwrap());
    }

    #[test]
    fn syk_corollary_formula() {
        let v = syk_first_order_gates(8, 2, 1.0, 1.0, 0.1, 0.1, true);
        let expect = 2.0 * 2f64.sqrt() / 4.0 * (8.0 * 2f64.ln() + (E * E / 0.1).ln()) * 8f64.powf(2.5) / 0.1;
        assert!((v - expect).abs() < 1e-12 * expect);
        let f = syk_first_order_gates(8, 2, 1.0, 1.0, 0.1, 0.1, false);
        assert!(f < v);
    }

    #[test]
    fn random_ho_shape() {
        let m = models::k_local_syk(8, 2, 1.0, 1).unwrap();
        let p = NormProfile::of(&m.base).unwrap();
        let h12 = p.norm(1, 2);
        let ck = 4.0 * E * 2.0 * h12;
        assert!((ck / h12 - 8.0 * E).abs() < 1e-12);
        let s = gatecount_random_ho(&p, 8, &q(1.0, 0.1, 0.1, 2, Regime::RandomSpectral)).unwrap();
        let f = gatecount_random_ho(&p, 8, &q(1.0, 0.1, 0.1, 2, Regime::RandomFixed)).unwrap();
        assert!(f.r <= s.r);
        assert!(!s.infeasible);
        let ratio = s.diagnostics.r_asymptotic.unwrap() / f.diagnostics.r_asymptotic.unwrap();
        let lg = |x: f64| x.sqrt().powf(1.0 + 0.5);
        assert!((ratio - lg(8.0 + 10f64.ln()) / lg(10f64.ln())).abs() < 1e-9);
        assert!(gatecount_random_ho(&p, 8, &q(1.0, 0.1, 0.1, 1, Regime::RandomFixed)).is_err());
    }

    #[test]
    fn baseline_examples() {
        let h = models::zxyz(3).unwrap().hamiltonian;
        let p = NormProfile::of(&h).unwrap();
        let b = baseline_1norm(&p, &q(1.0, 0.1, 0.1, 1, Regime::Spectral1NormBaseline)).unwrap();
        assert!(b.asymptotic);
        let typ = typical_2norm_asymptotic(&p, 1.0);
        assert!((b.gates / typ - 6f64.sqrt()).abs() < 1e-12);
        let zero = baseline_1norm(&p, &q(0.0, 0.1, 0.1, 1, Regime::Spectral1NormBaseline)).unwrap();
        assert_eq!(zero.gates, 0.0);
    }

    #[test]
    fn empty_hamiltonian_zero_gates() {
        let p = NormProfile::of(&crate::pauli::PauliHamiltonian::empty(3)).unwrap();
        for regime in [Regime::FirstOrderRandomFixed, Regime::FirstOrderRandomSpectral] {
            let r = gatecount(&p, 3, &q(1.0, 0.1, 0.1, 1, regime)).unwrap();
            assert_eq!(r.gates, 0.0);
            assert!(r.r >= 1);
        }
    }

    #[test]
    fn markov_examples() {
        assert_eq!(markov_tail(0.1, 0.1, 3.0).unwrap(), 1.0);
        assert!((markov_tail(0.05, 0.1, 4.0).unwrap() - 1.0 / 16.0).abs() < 1e-15);
        assert_eq!(markov_tail(0.0, 0.1, 2.0).unwrap(), 0.0);
        assert!(markov_tail(0.1, 0.0, 2.0).is_err());
    }

    #[test]
    fn table_examples() {
        let c = table1_exponents(Family::KLocal { k: 3 }, Method::Qdrift, Inputs::Spectral).unwrap();
        assert_eq!(c.formula, r"n^{k+1}t^2/\epsilon");
        assert_eq!((c.n, c.t, c.inv_eps), (Some(4.0), 2.0, 1.0));
        let c = table1_exponents(Family::KLocal { k: 2 }, Method::HigherOrder, Inputs::FixedTypical).unwrap();
        assert_eq!(c.n, Some(2.0));
        let c = table1_exponents(Family::PowerLaw { d: 1, alpha: 1.0 }, Method::HigherOrder, Inputs::Spectral).unwrap();
        assert_eq!(c.n, Some(2.0));
        assert!(table1_exponents(Family::KLocal { k: 2 }, Method::Qdrift, Inputs::FixedTypical).is_err());
        let t = table1_exponents(Family::PowerLaw { d: 1, alpha: 2.0 }, Method::HigherOrder, Inputs::FixedTypical).unwrap();
        assert!((t.inv_eps - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn truncation_examples() {
        let (res, kept, dropped) = residual_enumerated(4, 1, 2.0, 1).unwrap();
        assert!((res - (1.0f64 / 8.0 + 1.0 / 81.0).sqrt()).abs() < 1e-12);
        assert_eq!((kept, dropped), (3.0, 3.0));
        let big = truncation_plan(16, 1, 2.0, 1.0, 1e6).unwrap();
        assert_eq!(big.ell_cut, 1);
        assert!(truncation_plan(16, 2, 1.0, 1.0, 0.1).is_err());
        let p = truncation_plan(64, 1, 1.5, 1.0, 0.5).unwrap();
        assert!((p.gates - 64.0 * (64.0f64 / 0.5).powf(0.5)).abs() < 1e-9);
        // integral bound dominates enumeration
        for ell in [3, 5, 8] {
            let exact = residual_enumerated(256, 2, 1.5, ell).unwrap().0;
            assert!(residual_integral_bound(256, 2, 1.5, ell) >= exact);
            let exact1 = residual_enumerated(512, 1, 0.8, ell).unwrap().0;
            assert!(residual_integral_bound(512, 1, 0.8, ell) >= exact1);
        }
    }

    #[test]
    fn counting_examples() {
        let a = counting_net_size(2, 8, 1.0, 0.1).unwrap();
        let s2 = 1.0 / 16.0;
        let mean = 28.0 * s2;
        let dev = mean - 0.005;
        let ex = (dev * dev / 2.0) / (2.0 * 28.0 * s2 * s2 + 2.0 * s2 * dev / 3.0);
        assert!((a.exponent - ex).abs() < 1e-12);
        assert!((a.tail - (2.0 * (-ex).exp()).min(1.0)).abs() < 1e-15);
        let z = counting_net_size(2, 8, 1.0, 0.0).unwrap();
        assert!(z.infinite);
        let v = counting_net_size(2, 8, 1.0, 10.0).unwrap();
        assert!(v.vacuous);
        let e1 = counting_net_size(2, 20, 1.0, 0.1).unwrap().exponent;
        let e2 = counting_net_size(2, 40, 1.0, 0.1).unwrap().exponent;
        let g1 = binomial(20, 2);
        let g2 = binomial(40, 2);
        assert!((e2 / e1 - g2 / g1).abs() / (g2 / g1) < 0.05);
    }

    #[test]
    fn regime_parse() {
        assert_eq!("first-order-random-fixed".parse::<Regime>().unwrap(), Regime::FirstOrderRandomFixed);
        assert_eq!("spectral-1norm-baseline".parse::<Regime>().unwrap(), Regime::Spectral1NormBaseline);
        assert!("nope".parse::<Regime>().is_err());
    }
}
