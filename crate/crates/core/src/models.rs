//! Model generators for the families used by the CLI and experiments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dense::binomial;
use crate::error::{Error, Result};
use crate::fermion::{FermionHamiltonian, FermionOp, FermionTerm};
use crate::pauli::{PauliHamiltonian, PauliString, PauliTerm};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ModelSpec {
    ChainHeisenberg { n: usize, j: f64 },
    PowerLaw { n: usize, d: usize, alpha: f64 },
    KLocalSyk { n: usize, k: usize, j: f64, seed: u64 },
    Zxyz { m: usize },
    FermiHop { m: usize },
}

/// Nearest-neighbour `J Σ (XX + YY + ZZ)` on an open chain.
pub fn chain_heisenberg(n: usize, j: f64) -> Result<PauliHamiltonian> {
    if n < 2 {
        return Err(Error::Invalid("chain needs n >= 2".into()));
    }
    let mut terms = Vec::new();
    for i in 0..n - 1 {
        for c in ['X', 'Y', 'Z'] {
            terms.push(PauliTerm::real(PauliString::from_sites(n, &[(i, c), (i + 1, c)])?, j));
        }
    }
    PauliHamiltonian::new(n, terms)
}

/// Side length `L` with `L^d = n`.
pub fn lattice_side(n: usize, d: usize) -> Result<usize> {
    if d == 0 {
        return Err(Error::Invalid("dimension d must be >= 1".into()));
    }
    let l = (n as f64).powf(1.0 / d as f64).round() as usize;
    if l.pow(d as u32) != n {
        return Err(Error::Invalid(format!("n={n} is not a perfect {d}-th power")));
    }
    Ok(l)
}

pub fn site_coords(i: usize, side: usize, d: usize) -> Vec<usize> {
    let mut c = Vec::with_capacity(d);
    let mut v = i;
    for _ in 0..d {
        c.push(v % side);
        v /= side;
    }
    c
}

pub fn distance(a: usize, b: usize, side: usize, d: usize) -> f64 {
    let (ca, cb) = (site_coords(a, side, d), site_coords(b, side, d));
    ca.iter().zip(&cb).map(|(x, y)| (*x as f64 - *y as f64).powi(2)).sum::<f64>().sqrt()
}

/// Pair couplings `|x−y|^{−α} σ^a_x σ^a_y` on a hypercube with open boundaries;
/// the letter `a` cycles X, Y, Z over pairs in enumeration order.
pub fn power_law(n: usize, d: usize, alpha: f64) -> Result<PauliHamiltonian> {
    let side = lattice_side(n, d)?;
    let mut terms = Vec::new();
    let mut idx = 0;
    for x in 0..n {
        for y in x + 1..n {
            let c = ['X', 'Y', 'Z'][idx % 3];
            idx += 1;
            let b = distance(x, y, side, d).powf(-alpha);
            terms.push(PauliTerm::real(PauliString::from_sites(n, &[(x, c), (y, c)])?, b));
        }
    }
    PauliHamiltonian::new(n, terms)
}

/// `E[J²] = J²(k−1)!/(k n^{k−1})`.
pub fn syk_variance(n: usize, k: usize, j: f64) -> f64 {
    let fact: f64 = (1..k).map(|v| v as f64).product();
    j * j * fact / (k as f64 * (n as f64).powi(k as i32 - 1))
}

/// A model whose coefficients are `b_γ g_γ` with `g_γ` standard Gaussian.
#[derive(Clone, Debug)]
pub struct GaussianModel {
    /// Strings with coefficients `b_γ`.
    pub base: PauliHamiltonian,
}

impl GaussianModel {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<PauliHamiltonian> {
        let c: Vec<f64> = self
            .base
            .coeffs()
            .iter()
            .map(|b| b * rng.sample::<f64, _>(rand_distr::StandardNormal))
            .collect();
        self.base.with_coeffs(&c)
    }
}

/// One Pauli string per `k`-subset with letters drawn uniformly from {X,Y,Z}
/// by `seed`; `b_γ` is the SYK standard deviation.
pub fn k_local_syk(n: usize, k: usize, j: f64, seed: u64) -> Result<GaussianModel> {
    if k == 0 || k > n {
        return Err(Error::Invalid(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    let sigma = syk_variance(n, k, j).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms = Vec::with_capacity(binomial(n as u64, k as u64) as usize);
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let ops: Vec<(usize, char)> = idx.iter().map(|&s| (s, ['X', 'Y', 'Z'][rng.random_range(0..3)])).collect();
        terms.push(PauliTerm::real(PauliString::from_sites(n, &ops)?, sigma));
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        idx[i - 1] += 1;
        for t in i..k {
            idx[t] = idx[t - 1] + 1;
        }
    }
    Ok(GaussianModel { base: PauliHamiltonian::new(n, terms)? })
}

/// Gaussian coefficients on every 2-local Pauli (including weight 1) of `n` qubits.
pub fn all_two_local(n: usize) -> Result<GaussianModel> {
    let mut terms = Vec::new();
    for a in 0..n {
        for ca in ['X', 'Y', 'Z'] {
            terms.push(PauliTerm::real(PauliString::from_sites(n, &[(a, ca)])?, 1.0));
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            for ca in ['X', 'Y', 'Z'] {
                for cb in ['X', 'Y', 'Z'] {
                    terms.push(PauliTerm::real(PauliString::from_sites(n, &[(a, ca), (b, cb)])?, 1.0));
                }
            }
        }
    }
    Ok(GaussianModel { base: PauliHamiltonian::new(n, terms)? })
}

/// Three blocks of `m` qubits, `A = Σ Z_{s1} X_{s2}`, `B = Σ Y_{s2} Z_{s3}`.
#[derive(Clone, Debug)]
pub struct ThreeBlock {
    pub m: usize,
    pub hamiltonian: PauliHamiltonian,
    /// Term indices of `A` and `B`.
    pub groups: [Vec<usize>; 2],
}

pub fn block_sites(m: usize, which: usize) -> std::ops::Range<usize> {
    which * m..(which + 1) * m
}

pub fn zxyz(m: usize) -> Result<ThreeBlock> {
    if m == 0 {
        return Err(Error::Invalid("m must be >= 1".into()));
    }
    let n = 3 * m;
    let mut terms = Vec::new();
    for s1 in block_sites(m, 0) {
        for s2 in block_sites(m, 1) {
            terms.push(PauliTerm::real(PauliString::from_sites(n, &[(s1, 'Z'), (s2, 'X')])?, 1.0));
        }
    }
    let na = terms.len();
    for s2 in block_sites(m, 1) {
        for s3 in block_sites(m, 2) {
            terms.push(PauliTerm::real(PauliString::from_sites(n, &[(s2, 'Y'), (s3, 'Z')])?, 1.0));
        }
    }
    let hamiltonian = PauliHamiltonian::new(n, terms)?;
    let nt = hamiltonian.gamma();
    Ok(ThreeBlock { m, hamiltonian, groups: [(0..na).collect(), (na..nt).collect()] })
}

/// Hopping between blocks: `A = Σ_{S1×S2}(a†a + h.c.)`, `B = Σ_{S2×S3}(a†a + h.c.)`.
#[derive(Clone, Debug)]
pub struct FermiHop {
    pub m: usize,
    pub a: FermionHamiltonian,
    pub b: FermionHamiltonian,
}

impl FermiHop {
    pub fn combined(&self) -> Result<FermionHamiltonian> {
        let terms = self.a.terms.iter().chain(&self.b.terms).cloned().collect();
        FermionHamiltonian::new(self.a.n, self.a.eta, terms)
    }
}

fn hop(i: usize, j: usize) -> [FermionTerm; 2] {
    [
        FermionTerm::new(vec![(i, FermionOp::Create), (j, FermionOp::Annihilate)], 1.0),
        FermionTerm::new(vec![(j, FermionOp::Create), (i, FermionOp::Annihilate)], 1.0),
    ]
}

pub fn fermi_hop(m: usize) -> Result<FermiHop> {
    if m == 0 {
        return Err(Error::Invalid("m must be >= 1".into()));
    }
    let n = 3 * m;
    let mut a = Vec::new();
    for s1 in block_sites(m, 0) {
        for s2 in block_sites(m, 1) {
            a.extend(hop(s1, s2));
        }
    }
    let mut b = Vec::new();
    for s2 in block_sites(m, 1) {
        for s3 in block_sites(m, 2) {
            b.extend(hop(s2, s3));
        }
    }
    Ok(FermiHop { m, a: FermionHamiltonian::new(n, 0.5, a)?, b: FermionHamiltonian::new(n, 0.5, b)? })
}

/// Qubit Hamiltonian of a spin-type model spec.
pub fn build(spec: &ModelSpec) -> Result<PauliHamiltonian> {
    match *spec {
        ModelSpec::ChainHeisenberg { n, j } => chain_heisenberg(n, j),
        ModelSpec::PowerLaw { n, d, alpha } => power_law(n, d, alpha),
        ModelSpec::KLocalSyk { n, k, j, seed } => {
            let m = k_local_syk(n, k, j, seed)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
            m.sample(&mut rng)
        }
        ModelSpec::Zxyz { m } => Ok(zxyz(m)?.hamiltonian),
        ModelSpec::FermiHop { m } => Ok(crate::fermion::jordan_wigner(&fermi_hop(m)?.combined()?)?.hamiltonian),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_shape() {
        let h = chain_heisenberg(4, 1.0).unwrap();
        assert_eq!(h.gamma(), 9);
        assert_eq!(h.k(), 2);
    }

    #[test]
    fn power_law_couplings() {
        let h = power_law(4, 1, 2.0).unwrap();
        let mut b: Vec<f64> = h.coeffs();
        b.sort_by(|a, c| c.partial_cmp(a).unwrap());
        assert_eq!(b, vec![1.0, 1.0, 1.0, 0.25, 0.25, 1.0 / 9.0]);
        assert!(power_law(5, 2, 2.0).is_err());
        let h2 = power_law(9, 2, 3.0).unwrap();
        assert_eq!(h2.gamma(), 36);
    }

    #[test]
    fn syk_shape_and_variance() {
        let m = k_local_syk(6, 3, 1.0, 7).unwrap();
        assert_eq!(m.base.gamma(), 20);
        assert!(m.base.terms().iter().all(|t| t.string.weight() == 3));
        let s2 = syk_variance(6, 3, 1.0);
        assert!((s2 - 2.0 / (3.0 * 36.0)).abs() < 1e-15);
        assert!((m.base.coeffs()[0] - s2.sqrt()).abs() < 1e-15);
        let again = k_local_syk(6, 3, 1.0, 7).unwrap();
        assert_eq!(m.base, again.base);
    }

    #[test]
    fn three_block_groups() {
        let z = zxyz(2).unwrap();
        assert_eq!(z.hamiltonian.gamma(), 8);
        assert_eq!(z.groups[0], vec![0, 1, 2, 3]);
        let f = fermi_hop(2).unwrap();
        assert_eq!(f.a.terms.len(), 8);
        assert!(f.combined().unwrap().number_preserving());
    }

    #[test]
    fn spec_round_trip() {
        let s = ModelSpec::KLocalSyk { n: 5, k: 2, j: 1.0, seed: 3 };
        let txt = serde_json::to_string(&s).unwrap();
        assert!(txt.contains("k-local-syk"));
        let back: ModelSpec = serde_json::from_str(&txt).unwrap();
        assert_eq!(build(&back).unwrap(), build(&s).unwrap());
    }
}
