//! Fermionic monomials and the Jordan–Wigner map.
//!
//! Convention: `a_s = −σ⁻_s Π_{i>s} Z_i` with `σ⁻ = |0⟩⟨1| = (X + iY)/2`, so an
//! occupied site is `|1⟩` and `a†_s a_s = (I − Z_s)/2`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{PauliHamiltonian, PauliString, PauliSum, PauliTerm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FermionOp {
    Create,
    Annihilate,
    /// `O^η = (1−η)|1⟩⟨1| − η|0⟩⟨0|`.
    Occupation,
}

impl FermionOp {
    fn is_odd(self) -> bool {
        !matches!(self, FermionOp::Occupation)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FermionTerm {
    pub factors: Vec<(usize, FermionOp)>,
    pub coeff: f64,
}

impl FermionTerm {
    pub fn new(factors: Vec<(usize, FermionOp)>, coeff: f64) -> Self {
        FermionTerm { factors, coeff }
    }

    pub fn count(&self, op: FermionOp) -> usize {
        self.factors.iter().filter(|f| f.1 == op).count()
    }

    pub fn number_preserving(&self) -> bool {
        self.count(FermionOp::Create) == self.count(FermionOp::Annihilate)
    }

    /// True when the term moves particles (`|S₋| + |S₊| ≠ 0`).
    pub fn is_hopping(&self) -> bool {
        self.factors.iter().any(|f| f.1.is_odd())
    }

    /// Distinct sites touched by the term, ascending.
    pub fn sites(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.factors.iter().map(|f| f.0).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// Stable sort by site with the sign from anticommuting odd factors.
    pub fn normal_ordered(&self) -> (Vec<(usize, FermionOp)>, f64) {
        let mut f = self.factors.clone();
        let mut sign = 1.0;
        // insertion sort so that every swap is an adjacent transposition
        for i in 1..f.len() {
            let mut j = i;
            while j > 0 && f[j - 1].0 > f[j].0 {
                if f[j - 1].1.is_odd() && f[j].1.is_odd() {
                    sign = -sign;
                }
                f.swap(j - 1, j);
                j -= 1;
            }
        }
        (f, sign)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FermionHamiltonian {
    pub n: usize,
    pub eta: f64,
    pub terms: Vec<FermionTerm>,
}

impl FermionHamiltonian {
    pub fn new(n: usize, eta: f64, terms: Vec<FermionTerm>) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::Invalid(format!("eta {eta} outside [0,1]")));
        }
        for t in &terms {
            for &(s, _) in &t.factors {
                if s >= n {
                    return Err(Error::Invalid(format!("site {s} out of range for n={n}")));
                }
            }
        }
        Ok(FermionHamiltonian { n, eta, terms })
    }

    pub fn number_preserving(&self) -> bool {
        self.terms.iter().all(|t| t.number_preserving())
    }

    pub fn k(&self) -> usize {
        self.terms.iter().map(|t| t.sites().len()).max().unwrap_or(0)
    }

    /// (support, b_γ) per term, b_γ the spectral norm of the qubit image.
    pub fn supports(&self) -> Result<Vec<(Vec<usize>, f64)>> {
        self.terms.iter().map(|t| Ok((t.sites(), term_bound(self.n, self.eta, t)?))).collect()
    }

    pub fn from_json(j: &FermionJson) -> Result<Self> {
        let mut terms = Vec::with_capacity(j.terms.len());
        for t in &j.terms {
            let mut factors = Vec::with_capacity(t.ops.len());
            for (kind, site) in &t.ops {
                let op = match kind.as_str() {
                    "+" => FermionOp::Create,
                    "-" => FermionOp::Annihilate,
                    "z" => FermionOp::Occupation,
                    other => return Err(Error::Invalid(format!("unknown fermionic op {other:?}"))),
                };
                factors.push((*site, op));
            }
            terms.push(FermionTerm::new(factors, t.coeff));
        }
        FermionHamiltonian::new(j.n, j.eta, terms)
    }

    pub fn to_json(&self) -> FermionJson {
        FermionJson {
            n: self.n,
            eta: self.eta,
            terms: self
                .terms
                .iter()
                .map(|t| FermionTermJson {
                    ops: t
                        .factors
                        .iter()
                        .map(|&(s, op)| {
                            let k = match op {
                                FermionOp::Create => "+",
                                FermionOp::Annihilate => "-",
                                FermionOp::Occupation => "z",
                            };
                            (k.to_string(), s)
                        })
                        .collect(),
                    coeff: t.coeff,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FermionTermJson {
    pub ops: Vec<(String, usize)>,
    pub coeff: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FermionJson {
    pub n: usize,
    pub eta: f64,
    pub terms: Vec<FermionTermJson>,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Qubit image of one fermionic factor.
pub fn factor_image(n: usize, eta: f64, site: usize, op: FermionOp) -> Result<PauliSum> {
    let zs: Vec<(usize, char)> = (site + 1..n).map(|i| (i, 'Z')).collect();
    let with = |letter: char| -> Result<PauliString> {
        let mut ops = vec![(site, letter)];
        ops.extend_from_slice(&zs);
        PauliString::from_sites(n, &ops)
    };
    let terms = match op {
        // a = −(X + iY)/2 ⊗ Z…
        FermionOp::Annihilate => vec![
            PauliTerm::new(with('X')?, c(-0.5, 0.0)),
            PauliTerm::new(with('Y')?, c(0.0, -0.5)),
        ],
        // a† = −(X − iY)/2 ⊗ Z…
        FermionOp::Create => vec![
            PauliTerm::new(with('X')?, c(-0.5, 0.0)),
            PauliTerm::new(with('Y')?, c(0.0, 0.5)),
        ],
        // (1−η)(I−Z)/2 − η(I+Z)/2
        FermionOp::Occupation => vec![
            PauliTerm::new(PauliString::identity(n), c(0.5 - eta, 0.0)),
            PauliTerm::new(PauliString::single(n, site, 'Z')?, c(-0.5, 0.0)),
        ],
    };
    PauliSum::from_terms(n, terms)
}

/// Image of a single monomial (empty when it squares a creation or annihilation).
pub fn term_image(n: usize, eta: f64, t: &FermionTerm) -> Result<PauliSum> {
    let (factors, sign) = t.normal_ordered();
    for w in factors.windows(2) {
        if w[0].0 == w[1].0 && w[0].1 == w[1].1 && w[0].1.is_odd() {
            return Ok(PauliSum::new(n));
        }
    }
    let mut acc = PauliSum::from_terms(n, [PauliTerm::real(PauliString::identity(n), t.coeff * sign)])?;
    for &(s, op) in &factors {
        acc = acc.mul(&factor_image(n, eta, s, op)?)?;
    }
    Ok(acc)
}

/// Result of the Jordan–Wigner map.
#[derive(Clone, Debug)]
pub struct JwResult {
    pub hamiltonian: PauliHamiltonian,
    /// Indices of terms that vanished (repeated creation or annihilation on a site).
    pub zero_terms: Vec<usize>,
}

pub fn jordan_wigner(f: &FermionHamiltonian) -> Result<JwResult> {
    let mut total = PauliSum::new(f.n);
    let mut zero_terms = Vec::new();
    for (i, t) in f.terms.iter().enumerate() {
        let img = term_image(f.n, f.eta, t)?;
        if img.is_empty() {
            zero_terms.push(i);
        }
        total = total.plus(&img)?;
    }
    Ok(JwResult { hamiltonian: PauliHamiltonian::from_sum(total)?, zero_terms })
}

/// Spectral norm of a monomial's image, computed on its own sites only
/// (the trailing Z strings contribute a common unitary tensor factor).
pub fn term_bound(n: usize, eta: f64, t: &FermionTerm) -> Result<f64> {
    let img = term_image(n, eta, t)?;
    if img.is_empty() {
        return Ok(0.0);
    }
    let sites = t.sites();
    let local: Vec<PauliTerm> =
        img.terms().iter().map(|p| PauliTerm::new(p.string.restrict(&sites), p.coeff)).collect();
    let local = PauliSum::from_terms(sites.len(), local)?;
    let m = crate::dense::sum_to_matrix(&local, 12)?;
    Ok(crate::dense::spectral_norm(&m))
}
