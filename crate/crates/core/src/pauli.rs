//! Pauli strings in symplectic form, Pauli sums and Hamiltonians.
//!
//! Sites are 0-based; site 0 is the leftmost character of a label and the
//! most significant qubit of the dense representation.

use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients below this magnitude are dropped after merging.
pub const MERGE_TOL: f64 = 1e-14;

const I1: Complex64 = Complex64::new(0.0, 1.0);

pub fn i_pow(k: u8) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => I1,
        2 => Complex64::new(-1.0, 0.0),
        _ => -I1,
    }
}

fn popcount(w: &[u64]) -> u32 {
    w.iter().map(|v| v.count_ones()).sum()
}

/// `i^phase` times a tensor product of single-site Paulis.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let w = n.div_ceil(64);
        PauliString { n, x: vec![0; w], z: vec![0; w], phase: 0 }
    }

    pub fn from_label(label: &str) -> Result<Self> {
        let chars: Vec<char> = label.chars().collect();
        let mut p = PauliString::identity(chars.len());
        for (i, c) in chars.iter().enumerate() {
            p.set(i, *c)?;
        }
        Ok(p)
    }

    /// Single-site Pauli `letter` on `site`.
    pub fn single(n: usize, site: usize, letter: char) -> Result<Self> {
        if site >= n {
            return Err(Error::Invalid(format!("site {site} out of range for n={n}")));
        }
        let mut p = PauliString::identity(n);
        p.set(site, letter)?;
        Ok(p)
    }

    /// Build from (site, letter) pairs.
    pub fn from_sites(n: usize, ops: &[(usize, char)]) -> Result<Self> {
        let mut p = PauliString::identity(n);
        for &(s, c) in ops {
            if s >= n {
                return Err(Error::Invalid(format!("site {s} out of range for n={n}")));
            }
            if p.letter(s) != 'I' {
                return Err(Error::Invalid(format!("site {s} given twice")));
            }
            p.set(s, c)?;
        }
        Ok(p)
    }

    fn set(&mut self, i: usize, c: char) -> Result<()> {
        let (xb, zb) = match c {
            'I' => (false, false),
            'X' => (true, false),
            'Y' => (true, true),
            'Z' => (false, true),
            _ => return Err(Error::Invalid(format!("bad Pauli letter {c:?}"))),
        };
        let (w, b) = (i / 64, 1u64 << (i % 64));
        self.x[w] = if xb { self.x[w] | b } else { self.x[w] & !b };
        self.z[w] = if zb { self.z[w] | b } else { self.z[w] & !b };
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn x_bit(&self, i: usize) -> bool {
        self.x[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn z_bit(&self, i: usize) -> bool {
        self.z[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn letter(&self, i: usize) -> char {
        match (self.x_bit(i), self.z_bit(i)) {
            (false, false) => 'I',
            (true, false) => 'X',
            (true, true) => 'Y',
            (false, true) => 'Z',
        }
    }

    pub fn label(&self) -> String {
        (0..self.n).map(|i| self.letter(i)).collect()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.x_bit(i) || self.z_bit(i)).collect()
    }

    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).map(|(a, b)| (a | b).count_ones() as usize).sum()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// Same letters with phase reset to 0.
    pub fn unphased(&self) -> Self {
        PauliString { phase: 0, ..self.clone() }
    }

    /// Number of Y letters, used when acting on basis states.
    pub fn y_count(&self) -> u32 {
        self.x.iter().zip(&self.z).map(|(a, b)| (a & b).count_ones()).sum()
    }

    /// Bit masks over sites restricted to `n <= 64`, site 0 as the most significant bit.
    pub fn masks(&self) -> (u64, u64) {
        let mut xm = 0u64;
        let mut zm = 0u64;
        for i in 0..self.n {
            let b = 1u64 << (self.n - 1 - i);
            if self.x_bit(i) {
                xm |= b;
            }
            if self.z_bit(i) {
                zm |= b;
            }
        }
        (xm, zm)
    }

    /// Restrict to the listed sites (in the given order) producing a smaller string.
    pub fn restrict(&self, sites: &[usize]) -> Self {
        let mut p = PauliString::identity(sites.len());
        for (j, &s) in sites.iter().enumerate() {
            p.set(j, self.letter(s)).expect("valid letter");
        }
        p.phase = self.phase;
        p
    }

    pub fn commutes(&self, other: &PauliString) -> bool {
        let mut acc = 0u32;
        for w in 0..self.x.len() {
            acc += ((self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w])).count_ones();
        }
        acc % 2 == 0
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pre = ["", "i", "-", "-i"][self.phase as usize];
        write!(f, "{pre}{}", self.label())
    }
}

/// Phase-exact product: `matrix(P)·matrix(Q) = i^phase · matrix(R)`.
pub fn multiply(p: &PauliString, q: &PauliString) -> Result<PauliString> {
    if p.n != q.n {
        return Err(Error::Dimension(p.n, q.n));
    }
    let mut plus = 0u32;
    let mut minus = 0u32;
    let mut x = Vec::with_capacity(p.x.len());
    let mut z = Vec::with_capacity(p.z.len());
    for w in 0..p.x.len() {
        let (x1, z1, x2, z2) = (p.x[w], p.z[w], q.x[w], q.z[w]);
        let (py, px, pz) = (x1 & z1, x1 & !z1, !x1 & z1);
        let (qy, qx, qz) = (x2 & z2, x2 & !z2, !x2 & z2);
        // Y·Z = iX, Y·X = -iZ, X·Y = iZ, X·Z = -iY, Z·X = iY, Z·Y = -iX
        plus += popcount(&[py & qz, px & qy, pz & qx]);
        minus += popcount(&[py & qx, px & qz, pz & qy]);
        x.push(x1 ^ x2);
        z.push(z1 ^ z2);
    }
    let phase = ((p.phase as u32 + q.phase as u32 + plus + 3 * minus) % 4) as u8;
    Ok(PauliString { n: p.n, x, z, phase })
}

/// A Pauli string (phase folded into the coefficient) with a complex coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm {
    pub string: PauliString,
    pub coeff: Complex64,
}

impl PauliTerm {
    pub fn new(string: PauliString, coeff: Complex64) -> Self {
        let c = coeff * i_pow(string.phase);
        PauliTerm { string: string.unphased(), coeff: c }
    }

    pub fn real(string: PauliString, coeff: f64) -> Self {
        PauliTerm::new(string, Complex64::new(coeff, 0.0))
    }

    pub fn from_label(label: &str, coeff: f64) -> Result<Self> {
        Ok(PauliTerm::real(PauliString::from_label(label)?, coeff))
    }
}

/// `[P, Q]`, or `None` when the strings commute.
pub fn commutator(p: &PauliTerm, q: &PauliTerm) -> Result<Option<PauliTerm>> {
    if p.string.n != q.string.n {
        return Err(Error::Dimension(p.string.n, q.string.n));
    }
    if p.string.commutes(&q.string) {
        return Ok(None);
    }
    let prod = multiply(&p.string, &q.string)?;
    Ok(Some(PauliTerm::new(prod, p.coeff * q.coeff * 2.0)))
}

/// A merged sum of Pauli terms kept in first-ingestion order.
#[derive(Clone, Debug, Default)]
pub struct PauliSum {
    n: usize,
    terms: Vec<PauliTerm>,
    index: HashMap<PauliString, usize>,
}

impl PartialEq for PauliSum {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.terms == other.terms
    }
}

impl PauliSum {
    pub fn new(n: usize) -> Self {
        PauliSum { n, terms: Vec::new(), index: HashMap::new() }
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = PauliTerm>) -> Result<Self> {
        let mut s = PauliSum::new(n);
        for t in terms {
            s.add(t)?;
        }
        s.prune();
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Add a term, merging with an existing identical string. Call `prune` afterwards.
    pub fn add(&mut self, t: PauliTerm) -> Result<()> {
        if t.string.n != self.n {
            return Err(Error::Dimension(self.n, t.string.n));
        }
        let t = PauliTerm::new(t.string, t.coeff);
        match self.index.get(&t.string) {
            Some(&i) => self.terms[i].coeff += t.coeff,
            None => {
                self.index.insert(t.string.clone(), self.terms.len());
                self.terms.push(t);
            }
        }
        Ok(())
    }

    /// Drop near-zero coefficients, keeping order.
    pub fn prune(&mut self) {
        if self.terms.iter().all(|t| t.coeff.norm() >= MERGE_TOL) {
            return;
        }
        self.terms.retain(|t| t.coeff.norm() >= MERGE_TOL);
        self.index = self.terms.iter().enumerate().map(|(i, t)| (t.string.clone(), i)).collect();
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = PauliSum::new(self.n);
        for t in &self.terms {
            out.add(PauliTerm { string: t.string.clone(), coeff: t.coeff * c }).expect("same n");
        }
        out.prune();
        out
    }

    pub fn plus(&self, other: &PauliSum) -> Result<Self> {
        let mut out = self.clone();
        for t in &other.terms {
            out.add(t.clone())?;
        }
        out.prune();
        Ok(out)
    }

    pub fn mul(&self, other: &PauliSum) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Dimension(self.n, other.n));
        }
        let mut out = PauliSum::new(self.n);
        for a in &self.terms {
            for b in &other.terms {
                let s = multiply(&a.string, &b.string)?;
                out.add(PauliTerm::new(s, a.coeff * b.coeff))?;
            }
        }
        out.prune();
        Ok(out)
    }

    /// `[self, other]` as a merged sum.
    pub fn commutator(&self, other: &PauliSum) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Dimension(self.n, other.n));
        }
        let mut out = PauliSum::new(self.n);
        for a in &self.terms {
            for b in &other.terms {
                if let Some(c) = commutator(a, b)? {
                    out.add(c)?;
                }
            }
        }
        out.prune();
        Ok(out)
    }

    /// Largest |Im c| over terms.
    pub fn max_imag(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.im.abs()).fold(0.0, f64::max)
    }

    /// Sum of squared coefficient magnitudes, the normalized 2-norm squared.
    pub fn norm2_sq(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm_sqr()).sum()
    }
}

/// Hermitian Pauli Hamiltonian: merged, real coefficients, ordered terms.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliHamiltonian {
    sum: PauliSum,
}

impl PauliHamiltonian {
    pub fn new(n: usize, terms: impl IntoIterator<Item = PauliTerm>) -> Result<Self> {
        let mut sum = PauliSum::from_terms(n, terms)?;
        let scale = sum.terms.iter().map(|t| t.coeff.norm()).fold(1.0, f64::max);
        let im = sum.max_imag();
        if im > 1e-12 * scale {
            return Err(Error::NotHermitian(im));
        }
        for t in &mut sum.terms {
            t.coeff.im = 0.0;
        }
        Ok(PauliHamiltonian { sum })
    }

    pub fn from_sum(sum: PauliSum) -> Result<Self> {
        let n = sum.n;
        PauliHamiltonian::new(n, sum.terms)
    }

    pub fn empty(n: usize) -> Self {
        PauliHamiltonian { sum: PauliSum::new(n) }
    }

    pub fn n(&self) -> usize {
        self.sum.n
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.sum.terms
    }

    pub fn gamma(&self) -> usize {
        self.sum.terms.len()
    }

    /// Largest support size over terms.
    pub fn k(&self) -> usize {
        self.sum.terms.iter().map(|t| t.string.weight()).max().unwrap_or(0)
    }

    pub fn as_sum(&self) -> &PauliSum {
        &self.sum
    }

    pub fn coeffs(&self) -> Vec<f64> {
        self.sum.terms.iter().map(|t| t.coeff.re).collect()
    }

    /// (support, b_γ) pairs used by the norm computations.
    pub fn supports(&self) -> Vec<(Vec<usize>, f64)> {
        self.sum.terms.iter().map(|t| (t.string.support(), t.coeff.norm())).collect()
    }

    /// Same strings with new coefficients.
    pub fn with_coeffs(&self, coeffs: &[f64]) -> Result<Self> {
        if coeffs.len() != self.gamma() {
            return Err(Error::Invalid("coefficient count mismatch".into()));
        }
        let terms = self.sum.terms.iter().zip(coeffs).map(|(t, &c)| PauliTerm::real(t.string.clone(), c));
        PauliHamiltonian::new(self.n(), terms)
    }

    pub fn scaled(&self, a: f64) -> Self {
        let c: Vec<f64> = self.coeffs().iter().map(|v| v * a).collect();
        self.with_coeffs(&c).expect("same shape")
    }

    /// Sub-Hamiltonian from term indices in the given order.
    pub fn subset(&self, idx: &[usize]) -> Result<Self> {
        let mut terms = Vec::with_capacity(idx.len());
        for &i in idx {
            let t = self.sum.terms.get(i).ok_or_else(|| Error::Invalid(format!("term index {i} out of range")))?;
            terms.push(t.clone());
        }
        PauliHamiltonian::new(self.n(), terms)
    }

    pub fn to_json(&self) -> HamiltonianJson {
        HamiltonianJson {
            n: self.n(),
            terms: self.sum.terms.iter().map(|t| TermJson { pauli: t.string.label(), coeff: t.coeff.re }).collect(),
        }
    }

    pub fn from_json(j: &HamiltonianJson) -> Result<Self> {
        let mut terms = Vec::with_capacity(j.terms.len());
        for t in &j.terms {
            if t.pauli.chars().count() != j.n {
                return Err(Error::Invalid(format!("label {:?} does not have {} characters", t.pauli, j.n)));
            }
            terms.push(PauliTerm::from_label(&t.pauli, t.coeff)?);
        }
        PauliHamiltonian::new(j.n, terms)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: HamiltonianJson = serde_json::from_str(s)?;
        PauliHamiltonian::from_json(&j)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("serializable")
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermJson {
    pub pauli: String,
    pub coeff: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct HamiltonianJson {
    pub n: usize,
    pub terms: Vec<TermJson>,
}

/// `ℒ_γ[O] = i[H_γ, O]`.
pub fn adjoint_apply(h: &PauliTerm, o: &PauliSum) -> Result<PauliSum> {
    let single = PauliSum::from_terms(h.string.n, [h.clone()])?;
    Ok(single.commutator(o)?.scale(I1))
}

/// Leading error operator `L` with `S(t) − e^{iHt} ≈ t^time_power · L`.
#[derive(Clone, Debug)]
pub struct LeadingError {
    pub time_power: u32,
    pub op: PauliSum,
}

/// Order 1: `½ Σ_{γ'>γ} [iH_γ', iH_γ]` for the forward sweep.
/// Order 2: `−(i/12)([B,[B,A]] − ½[A,[A,B]])` for `e^{iAt/2} e^{iBt} e^{iAt/2}`,
/// with `groups = [A, B]` given as term indices.
pub fn leading_error(h: &PauliHamiltonian, order: u32, groups: Option<&[Vec<usize>]>) -> Result<LeadingError> {
    match order {
        1 => {
            let mut out = PauliSum::new(h.n());
            let t = h.terms();
            for g2 in 0..t.len() {
                for g1 in 0..g2 {
                    if let Some(c) = commutator(&t[g2], &t[g1])? {
                        // [iA, iB] = -[A, B]
                        out.add(PauliTerm { string: c.string, coeff: c.coeff * -0.5 })?;
                    }
                }
            }
            out.prune();
            Ok(LeadingError { time_power: 2, op: out })
        }
        2 => {
            let groups = groups.ok_or_else(|| Error::Unsupported("order 2 needs a two-group partition".into()))?;
            if groups.len() != 2 {
                return Err(Error::Unsupported(format!("partition into {} groups", groups.len())));
            }
            let a = h.subset(&groups[0])?;
            let b = h.subset(&groups[1])?;
            Ok(LeadingError { time_power: 3, op: second_order_error(a.as_sum(), b.as_sum())? })
        }
        _ => Err(Error::Unsupported(format!("leading error of order {order}"))),
    }
}

/// `−(i/12)([B,[B,A]] − ½[A,[A,B]])`.
pub fn second_order_error(a: &PauliSum, b: &PauliSum) -> Result<PauliSum> {
    let bba = b.commutator(&b.commutator(a)?)?;
    let aab = a.commutator(&a.commutator(b)?)?;
    let inner = bba.plus(&aab.scale(Complex64::new(-0.5, 0.0)))?;
    Ok(inner.scale(Complex64::new(0.0, -1.0 / 12.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        PauliString::from_label(s).unwrap()
    }

    #[test]
    fn zx_is_iy() {
        let r = multiply(&p("Z"), &p("X")).unwrap();
        assert_eq!(r.label(), "Y");
        assert_eq!(r.phase(), 1);
    }

    #[test]
    fn involution_and_identity() {
        let r = multiply(&p("X"), &p("X")).unwrap();
        assert!(r.is_identity());
        assert_eq!(r.phase(), 0);
        let q = p("XYZ");
        assert_eq!(multiply(&q, &p("III")).unwrap(), q);
    }

    #[test]
    fn mismatched_n() {
        assert!(matches!(multiply(&p("X"), &p("XX")), Err(Error::Dimension(1, 2))));
    }

    #[test]
    fn commutator_examples() {
        let a = PauliTerm::from_label("ZXI", 1.0).unwrap();
        let b = PauliTerm::from_label("IYZ", 1.0).unwrap();
        let c = commutator(&a, &b).unwrap().unwrap();
        assert_eq!(c.string.label(), "ZZZ");
        assert!((c.coeff - Complex64::new(0.0, 2.0)).norm() < 1e-15);
        let zz = PauliTerm::from_label("ZZ", 1.0).unwrap();
        let xx = PauliTerm::from_label("XX", 1.0).unwrap();
        assert!(commutator(&zz, &xx).unwrap().is_none());
        assert!(commutator(&zz, &zz).unwrap().is_none());
    }

    #[test]
    fn adjoint_examples() {
        let z = PauliTerm::from_label("Z", 1.0).unwrap();
        let x = PauliSum::from_terms(1, [PauliTerm::from_label("X", 1.0).unwrap()]).unwrap();
        let r = adjoint_apply(&z, &x).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.terms()[0].string.label(), "Y");
        assert!((r.terms()[0].coeff - Complex64::new(-2.0, 0.0)).norm() < 1e-15);
        let zs = PauliSum::from_terms(1, [z.clone()]).unwrap();
        assert!(adjoint_apply(&z, &zs).unwrap().is_empty());
        let a = PauliTerm::from_label("ZXI", 1.0).unwrap();
        let b = PauliSum::from_terms(3, [PauliTerm::from_label("IYZ", 1.0).unwrap()]).unwrap();
        let r = adjoint_apply(&a, &b).unwrap();
        assert_eq!(r.terms()[0].string.label(), "ZZZ");
        assert!((r.terms()[0].coeff - Complex64::new(-2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn leading_error_x_plus_z() {
        let h = PauliHamiltonian::new(
            1,
            [PauliTerm::from_label("X", 1.0).unwrap(), PauliTerm::from_label("Z", 1.0).unwrap()],
        )
        .unwrap();
        let l = leading_error(&h, 1, None).unwrap();
        assert_eq!(l.time_power, 2);
        assert_eq!(l.op.len(), 1);
        assert_eq!(l.op.terms()[0].string.label(), "Y");
        assert!((l.op.terms()[0].coeff - Complex64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn leading_error_commuting_is_empty() {
        let h = PauliHamiltonian::new(
            2,
            [PauliTerm::from_label("ZI", 1.0).unwrap(), PauliTerm::from_label("ZZ", 0.5).unwrap()],
        )
        .unwrap();
        assert!(leading_error(&h, 1, None).unwrap().op.is_empty());
    }

    #[test]
    fn order_two_needs_two_groups() {
        let h = PauliHamiltonian::new(1, [PauliTerm::from_label("X", 1.0).unwrap()]).unwrap();
        assert!(leading_error(&h, 2, None).is_err());
        let g = vec![vec![0]];
        assert!(matches!(leading_error(&h, 2, Some(&g)), Err(Error::Unsupported(_))));
    }

    #[test]
    fn merging_and_pruning() {
        let h = PauliHamiltonian::new(
            2,
            [
                PauliTerm::from_label("XI", 1.0).unwrap(),
                PauliTerm::from_label("ZZ", 2.0).unwrap(),
                PauliTerm::from_label("XI", -1.0).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(h.gamma(), 1);
        assert_eq!(h.terms()[0].string.label(), "ZZ");
        assert_eq!(h.k(), 2);
    }

    #[test]
    fn rejects_non_hermitian() {
        let t = PauliTerm::new(PauliString::from_label("X").unwrap(), Complex64::new(0.0, 1.0));
        assert!(matches!(PauliHamiltonian::new(1, [t]), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn json_round_trip() {
        let s = r#"{"n": 2, "terms": [{"pauli": "ZZ", "coeff": 1.5}, {"pauli": "XI", "coeff": -0.25}]}"#;
        let h = PauliHamiltonian::from_json_str(s).unwrap();
        let back = PauliHamiltonian::from_json_str(&h.to_json_string()).unwrap();
        assert_eq!(h, back);
        assert!(PauliHamiltonian::from_json_str(r#"{"n": 3, "terms": [{"pauli": "ZZ", "coeff": 1}]}"#).is_err());
    }

    #[test]
    fn wide_strings_cross_word_boundary() {
        let n = 130;
        let a = PauliString::from_sites(n, &[(3, 'X'), (70, 'Y'), (129, 'Z')]).unwrap();
        let b = PauliString::from_sites(n, &[(70, 'Z'), (129, 'X')]).unwrap();
        let r = multiply(&a, &b).unwrap();
        // Y·Z = iX on 70, Z·X = iY on 129
        assert_eq!(r.phase(), 2);
        assert_eq!(r.letter(70), 'X');
        assert_eq!(r.letter(129), 'Y');
        assert_eq!(r.support(), vec![3, 70, 129]);
        assert!(a.commutes(&b));
    }
}
