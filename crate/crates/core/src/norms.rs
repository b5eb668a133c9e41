//! Local norms `‖H‖_{(c),q}` and the proof constants built from them.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fermion::FermionHamiltonian;
use crate::pauli::PauliHamiltonian;

/// A term reduced to what the norms need: its support and bound `b_γ`.
pub type SupportedBound = (Vec<usize>, f64);

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LocalNorm {
    pub value: f64,
    /// Set when `c` exceeds the locality and the value is reported as 0.
    pub beyond_k: bool,
}

fn for_each_subset(items: &[usize], c: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(items: &[usize], c: usize, start: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == c {
            f(cur);
            return;
        }
        let need = c - cur.len();
        for i in start..=items.len().saturating_sub(need) {
            if i >= items.len() {
                break;
            }
            cur.push(items[i]);
            rec(items, c, i + 1, cur, f);
            cur.pop();
        }
    }
    if c > items.len() {
        return;
    }
    rec(items, c, 0, &mut Vec::with_capacity(c), f);
}

/// `‖H‖_{(c),q}`: for `q=2` the root of the largest `Σ b_γ²` over size-`c`
/// site sets contained in term supports; for `q=1` the same without squares.
pub fn local_norm_of(terms: &[SupportedBound], c: usize, q: u32) -> Result<LocalNorm> {
    if q != 1 && q != 2 {
        return Err(Error::Invalid(format!("local norm index q={q} must be 1 or 2")));
    }
    let pw = |b: f64| if q == 2 { b * b } else { b };
    let fin = |v: f64| if q == 2 { v.sqrt() } else { v };
    let k = terms.iter().map(|t| t.0.len()).max().unwrap_or(0);
    if c > k {
        return Ok(LocalNorm { value: 0.0, beyond_k: true });
    }
    if c == 0 {
        return Ok(LocalNorm { value: fin(terms.iter().map(|t| pw(t.1)).sum()), beyond_k: false });
    }
    let mut acc: HashMap<Vec<usize>, f64> = HashMap::new();
    for (supp, b) in terms {
        let v = pw(*b);
        for_each_subset(supp, c, &mut |s| *acc.entry(s.to_vec()).or_insert(0.0) += v);
    }
    let best = acc.values().copied().fold(0.0, f64::max);
    Ok(LocalNorm { value: fin(best), beyond_k: false })
}

pub fn local_norm(h: &PauliHamiltonian, c: usize, q: u32) -> Result<LocalNorm> {
    local_norm_of(&h.supports(), c, q)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|v| v as f64).product()
}

fn binom(n: usize, k: usize) -> f64 {
    crate::dense::binomial(n as u64, k as u64)
}

/// `λ(k) = (2^{k/2+1}/(k−1)!) Σ_{k'=1}^k 2^{k'/2}/(k−k')! · ‖H‖_{(k'),2}`.
pub fn lambda_from(k: usize, norm2: &dyn Fn(usize) -> f64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let kf = k as f64;
    let pre = 2f64.powf(kf / 2.0 + 1.0) / factorial(k - 1);
    pre * (1..=k).map(|kp| 2f64.powf(kp as f64 / 2.0) / factorial(k - kp) * norm2(kp)).sum::<f64>()
}

/// `λ′(k) = 2 Σ_{k'=1}^k C(k,k') √20^{k'} √(‖H‖_{(k'),1}‖H‖_{(0),1}/k'!)`.
pub fn lambda_prime_from(k: usize, norm1: &dyn Fn(usize) -> f64) -> f64 {
    let n0 = norm1(0);
    2.0 * (1..=k)
        .map(|kp| binom(k, kp) * 20f64.sqrt().powi(kp as i32) * (norm1(kp) * n0 / factorial(kp)).sqrt())
        .sum::<f64>()
}

fn cached(terms: &[SupportedBound], k: usize, q: u32) -> Result<Vec<f64>> {
    (0..=k).map(|c| local_norm_of(terms, c, q).map(|v| v.value)).collect()
}

pub fn lambda_k(h: &PauliHamiltonian) -> Result<f64> {
    let t = h.supports();
    let k = h.k();
    let n2 = cached(&t, k, 2)?;
    Ok(lambda_from(k, &|c| n2[c]))
}

pub fn lambda_prime_k(h: &PauliHamiltonian) -> Result<f64> {
    let t = h.supports();
    let k = h.k();
    let n1 = cached(&t, k, 1)?;
    Ok(lambda_prime_from(k, &|c| n1[c]))
}

/// `λ(k)` over the fermionic supports plus `(2^{k/2+1}/(k−1)!)(1/k!)‖H_ferm‖_{(0),2}`.
pub fn lambda_ferm_k(f: &FermionHamiltonian) -> Result<f64> {
    Ok(fermion_profile(f)?.lambda_ferm.expect("fermionic profile"))
}

#[derive(Clone, Debug, Serialize)]
pub struct NormProfile {
    pub gamma: usize,
    pub k: usize,
    /// Keyed by `"c,q"`.
    pub c_q_norms: BTreeMap<String, f64>,
    pub lambda: f64,
    pub lambda_prime: f64,
    pub lambda_ferm: Option<f64>,
    pub ferm_zero_two: Option<f64>,
}

impl NormProfile {
    pub fn from_supports(terms: &[SupportedBound]) -> Result<Self> {
        let k = terms.iter().map(|t| t.0.len()).max().unwrap_or(0);
        let n1 = cached(terms, k, 1)?;
        let n2 = cached(terms, k, 2)?;
        let mut map = BTreeMap::new();
        for c in 0..=k {
            map.insert(format!("{c},1"), n1[c]);
            map.insert(format!("{c},2"), n2[c]);
        }
        Ok(NormProfile {
            gamma: terms.len(),
            k,
            c_q_norms: map,
            lambda: lambda_from(k, &|c| n2[c]),
            lambda_prime: lambda_prime_from(k, &|c| n1[c]),
            lambda_ferm: None,
            ferm_zero_two: None,
        })
    }

    pub fn of(h: &PauliHamiltonian) -> Result<Self> {
        NormProfile::from_supports(&h.supports())
    }

    /// `‖H‖_{(c),q}`; 0 when `c > k`.
    pub fn norm(&self, c: usize, q: u32) -> f64 {
        self.c_q_norms.get(&format!("{c},{q}")).copied().unwrap_or(0.0)
    }

    /// Profile of `αH`.
    pub fn scaled(&self, a: f64) -> Self {
        let a = a.abs();
        let mut p = self.clone();
        for v in p.c_q_norms.values_mut() {
            *v *= a;
        }
        p.lambda *= a;
        p.lambda_prime *= a;
        p.lambda_ferm = p.lambda_ferm.map(|v| v * a);
        p.ferm_zero_two = p.ferm_zero_two.map(|v| v * a);
        p
    }
}

pub fn fermion_profile(f: &FermionHamiltonian) -> Result<NormProfile> {
    if !f.number_preserving() {
        return Err(Error::Invalid("fermionic Hamiltonian is not number preserving".into()));
    }
    let sup = f.supports()?;
    let mut p = NormProfile::from_supports(&sup)?;
    let ferm: f64 = f
        .terms
        .iter()
        .zip(&sup)
        .filter(|(t, _)| t.is_hopping())
        .map(|(_, s)| s.1 * s.1)
        .sum::<f64>()
        .sqrt();
    let k = p.k;
    let extra = if k == 0 { 0.0 } else { 2f64.powf(k as f64 / 2.0 + 1.0) / factorial(k - 1) / factorial(k) * ferm };
    p.ferm_zero_two = Some(ferm);
    p.lambda_ferm = Some(p.lambda + extra);
    Ok(p)
}
