//! Dense 2^n × 2^n engine: operators, exact evolution, schedules and norms.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pauli::{i_pow, PauliHamiltonian, PauliString, PauliSum};
use crate::suzuki::{build_schedule, Schedule};

pub type DenseOperator = DMatrix<Complex64>;
pub type StateVector = DVector<Complex64>;

pub const DEFAULT_CAP: usize = 12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Bytes needed for one dense operator on `n` qubits.
pub fn memory_estimate(n: usize) -> u128 {
    (1u128 << (2 * n)) * 16
}

pub fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::Cap(format!(
            "n={n} exceeds dense cap {cap} (one operator needs {} bytes)",
            memory_estimate(n)
        )));
    }
    Ok(())
}

/// `P|b⟩ = factor(b)·|b ⊕ xm⟩`.
#[derive(Clone, Copy, Debug)]
pub struct BasisAction {
    pub xm: usize,
    pub zm: usize,
    pub base: Complex64,
}

impl BasisAction {
    pub fn new(p: &PauliString) -> Self {
        let (xm, zm) = p.masks();
        let base = i_pow(((p.phase() as u32 + p.y_count()) % 4) as u8);
        BasisAction { xm: xm as usize, zm: zm as usize, base }
    }

    #[inline]
    pub fn factor(&self, b: usize) -> Complex64 {
        if (b & self.zm).count_ones() % 2 == 1 {
            -self.base
        } else {
            self.base
        }
    }
}

pub fn pauli_matrix(p: &PauliString) -> DenseOperator {
    let dim = 1usize << p.n();
    let a = BasisAction::new(p);
    let mut m = DMatrix::zeros(dim, dim);
    for b in 0..dim {
        m[(b ^ a.xm, b)] = a.factor(b);
    }
    m
}

pub fn sum_to_matrix(s: &PauliSum, cap: usize) -> Result<DenseOperator> {
    check_cap(s.n(), cap)?;
    let dim = 1usize << s.n();
    let mut m = DMatrix::zeros(dim, dim);
    for t in s.terms() {
        let a = BasisAction::new(&t.string);
        for b in 0..dim {
            m[(b ^ a.xm, b)] += t.coeff * a.factor(b);
        }
    }
    Ok(m)
}

pub fn to_matrix(h: &PauliHamiltonian, cap: usize) -> Result<DenseOperator> {
    sum_to_matrix(h.as_sum(), cap)
}

pub fn hermitian_deviation(m: &DenseOperator) -> f64 {
    let d = m - m.adjoint();
    d.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

pub fn is_hermitian(m: &DenseOperator, tol: f64) -> bool {
    hermitian_deviation(m) <= tol
}

pub fn is_unitary(m: &DenseOperator, tol: f64) -> bool {
    let id = DMatrix::<Complex64>::identity(m.nrows(), m.ncols());
    (m.adjoint() * m - id).iter().all(|v| v.norm() <= tol)
}

/// `e^{iMt}` for Hermitian `M` by eigendecomposition.
pub fn expm_hermitian(m: &DenseOperator, t: f64) -> Result<DenseOperator> {
    let dev = hermitian_deviation(m);
    if dev > 1e-10 {
        return Err(Error::NotHermitian(dev));
    }
    let eig = SymmetricEigen::new(m.clone());
    let v = &eig.eigenvectors;
    let mut vd = v.clone();
    for (j, &l) in eig.eigenvalues.iter().enumerate() {
        let ph = Complex64::from_polar(1.0, l * t);
        for x in vd.column_mut(j).iter_mut() {
            *x *= ph;
        }
    }
    Ok(vd * v.adjoint())
}

/// Hermitian eigendecomposition `(λ, V)` with `M = V diag(λ) V†`.
pub fn hermitian_eigen(m: &DenseOperator) -> (Vec<f64>, DenseOperator) {
    let eig = SymmetricEigen::new(m.clone());
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

pub fn evolve(h: &PauliHamiltonian, t: f64, cap: usize) -> Result<DenseOperator> {
    expm_hermitian(&to_matrix(h, cap)?, t)
}

/// `U ← e^{iθP} U = cos θ U + i sin θ P U`.
pub fn rotate_left(u: &mut DenseOperator, a: &BasisAction, theta: f64) {
    let (c, s) = (theta.cos(), theta.sin());
    let is = Complex64::new(0.0, s);
    let dim = u.nrows();
    let cols = u.ncols();
    for b in 0..dim {
        let b2 = b ^ a.xm;
        if b2 < b {
            continue;
        }
        // rows b and b2 mix: (PU)[b2] = f(b) U[b], (PU)[b] = f(b2) U[b2]
        let fb = a.factor(b);
        let fb2 = a.factor(b2);
        if b2 == b {
            let k = c + is * fb;
            for j in 0..cols {
                u[(b, j)] *= k;
            }
        } else {
            for j in 0..cols {
                let ub = u[(b, j)];
                let ub2 = u[(b2, j)];
                u[(b, j)] = c * ub + is * fb2 * ub2;
                u[(b2, j)] = c * ub2 + is * fb * ub;
            }
        }
    }
}

/// `ψ ← e^{iθP} ψ`.
pub fn rotate_vec(psi: &mut StateVector, a: &BasisAction, theta: f64) {
    let (c, s) = (theta.cos(), theta.sin());
    let is = Complex64::new(0.0, s);
    for b in 0..psi.len() {
        let b2 = b ^ a.xm;
        if b2 < b {
            continue;
        }
        if b2 == b {
            psi[b] *= c + is * a.factor(b);
        } else {
            let (pb, pb2) = (psi[b], psi[b2]);
            psi[b] = c * pb + is * a.factor(b2) * pb2;
            psi[b2] = c * pb2 + is * a.factor(b) * pb;
        }
    }
}

fn schedule_actions(h: &PauliHamiltonian, sched: &Schedule) -> Result<Vec<(BasisAction, f64)>> {
    let terms = h.terms();
    sched
        .steps
        .iter()
        .map(|st| {
            let t = terms.get(st.gamma).ok_or_else(|| {
                Error::Invalid(format!("schedule index {} out of range for Γ={}", st.gamma, terms.len()))
            })?;
            Ok((BasisAction::new(&t.string), st.coeff * t.coeff.re))
        })
        .collect()
}

/// `Π_j e^{i c_j H_γ(j)}` with step 1 applied first (rightmost).
pub fn apply_schedule(h: &PauliHamiltonian, sched: &Schedule, cap: usize) -> Result<DenseOperator> {
    check_cap(h.n(), cap)?;
    let dim = 1usize << h.n();
    let mut u = DMatrix::identity(dim, dim);
    for (a, theta) in schedule_actions(h, sched)? {
        rotate_left(&mut u, &a, theta);
    }
    Ok(u)
}

/// Apply `reps` repetitions of the schedule to a state.
pub fn apply_schedule_vec(h: &PauliHamiltonian, sched: &Schedule, psi: &StateVector, reps: u64) -> Result<StateVector> {
    let acts = schedule_actions(h, sched)?;
    let mut v = psi.clone();
    for _ in 0..reps {
        for (a, theta) in &acts {
            rotate_vec(&mut v, a, *theta);
        }
    }
    Ok(v)
}

pub fn matrix_power(m: &DenseOperator, mut e: u64) -> DenseOperator {
    let mut result = DMatrix::identity(m.nrows(), m.ncols());
    let mut base = m.clone();
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    result
}

/// `e^{iHt} − S_ℓ(t/r)^r`.
pub fn trotter_error_op(h: &PauliHamiltonian, t: f64, r: u64, order: u32, cap: usize) -> Result<DenseOperator> {
    if r == 0 {
        return Err(Error::Invalid("r must be at least 1".into()));
    }
    let exact = evolve(h, t, cap)?;
    if h.gamma() == 0 {
        return Ok(exact.clone() - exact);
    }
    let sched = build_schedule(h.gamma(), order, t / r as f64)?;
    let s = apply_schedule(h, &sched, cap)?;
    Ok(exact - matrix_power(&s, r))
}

/// Singular values; eigenvalue moduli for Hermitian or anti-Hermitian input.
pub fn singular_values(m: &DenseOperator) -> Vec<f64> {
    let scale = m.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
    if hermitian_deviation(m) <= 1e-13 * scale {
        return hermitian_eigen(m).0.iter().map(|v| v.abs()).collect();
    }
    let im = m * Complex64::new(0.0, 1.0);
    if hermitian_deviation(&im) <= 1e-13 * scale {
        return hermitian_eigen(&im).0.iter().map(|v| v.abs()).collect();
    }
    m.clone().singular_values().iter().copied().collect()
}

/// Schatten p-norm from singular values; `normalized` divides by `dim^{1/p}`.
pub fn schatten_from_sv(sv: &[f64], p: f64, dim: usize, normalized: bool) -> f64 {
    let smax = sv.iter().copied().fold(0.0, f64::max);
    if p.is_infinite() {
        return smax;
    }
    if smax == 0.0 {
        return 0.0;
    }
    let s: f64 = sv.iter().map(|v| (v / smax).powf(p)).sum();
    let mut v = smax * s.powf(1.0 / p);
    if normalized {
        v /= (dim as f64).powf(1.0 / p);
    }
    v
}

pub fn schatten_norm(m: &DenseOperator, p: f64, normalized: bool) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::Invalid(format!("Schatten index p={p} < 1")));
    }
    Ok(schatten_from_sv(&singular_values(m), p, m.nrows(), normalized))
}

pub fn spectral_norm(m: &DenseOperator) -> f64 {
    singular_values(m).into_iter().fold(0.0, f64::max)
}

/// Product diagonal state `⊗_i diag(1−η_i, η_i)` on the computational basis.
#[derive(Clone, Debug, Serialize)]
pub struct WeightedNormSpec {
    pub eta: Vec<f64>,
    pub s: f64,
    pub p: f64,
}

impl WeightedNormSpec {
    pub fn new(eta: Vec<f64>, s: f64, p: f64) -> Result<Self> {
        if eta.iter().any(|e| !(0.0..=1.0).contains(e)) {
            return Err(Error::Invalid("site weights must lie in [0,1]".into()));
        }
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Invalid(format!("s={s} outside [0,1]")));
        }
        if p.is_nan() || p < 2.0 {
            return Err(Error::Invalid(format!("weighted norm needs p >= 2, got {p}")));
        }
        Ok(WeightedNormSpec { eta, s, p })
    }

    pub fn maximally_mixed(n: usize, s: f64, p: f64) -> Self {
        WeightedNormSpec { eta: vec![0.5; n], s, p }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        product_diagonal(&self.eta)
    }
}

pub fn product_diagonal(eta: &[f64]) -> Vec<f64> {
    let n = eta.len();
    (0..1usize << n)
        .map(|b| {
            (0..n)
                .map(|i| if b >> (n - 1 - i) & 1 == 1 { eta[i] } else { 1.0 - eta[i] })
                .product()
        })
        .collect()
}

fn pseudo_pow(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else if x == 0.0 {
        0.0
    } else {
        x.powf(e)
    }
}

/// `‖ρ^{(1−s)/p} A ρ^{s/p}‖_p` for diagonal `ρ`.
pub fn weighted_with_diag(a: &DenseOperator, rho: &[f64], s: f64, p: f64) -> f64 {
    let l: Vec<f64> = rho.iter().map(|&r| pseudo_pow(r, (1.0 - s) / p)).collect();
    let rr: Vec<f64> = rho.iter().map(|&r| pseudo_pow(r, s / p)).collect();
    let mut b = a.clone();
    for i in 0..b.nrows() {
        for j in 0..b.ncols() {
            b[(i, j)] *= l[i] * rr[j];
        }
    }
    schatten_from_sv(&singular_values(&b), p, b.nrows(), false)
}

pub fn weighted_norm(a: &DenseOperator, spec: &WeightedNormSpec) -> Result<f64> {
    if a.nrows() != 1 << spec.eta.len() {
        return Err(Error::Dimension(spec.eta.len(), a.nrows().trailing_zeros() as usize));
    }
    Ok(weighted_with_diag(a, &spec.diagonal(), spec.s, spec.p))
}

pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut v = 1.0f64;
    for i in 0..k {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    v.round()
}

#[derive(Clone, Debug, Serialize)]
pub struct ParticleSector {
    pub n: usize,
    pub m: usize,
    pub rank: f64,
    /// `(m/n)^m (1−m/n)^{n−m} C(n,m)`.
    pub b: f64,
}

impl ParticleSector {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if m > n {
            return Err(Error::Invalid(format!("m={m} > n={n}")));
        }
        let rank = binomial(n as u64, m as u64);
        let f = m as f64 / n as f64;
        let b = pseudo_pow(f, m as f64) * pseudo_pow(1.0 - f, (n - m) as f64) * rank;
        Ok(ParticleSector { n, m, rank, b })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SectorNorm {
    pub sector: ParticleSector,
    /// `‖A P̄^{1/p}‖_p`.
    pub value: f64,
    /// `‖A ρ_{m/n}^{1/p}‖_p`.
    pub weighted: f64,
    /// `weighted · b^{−1/p}`, an upper bound on `value` for number-preserving `A`.
    pub bound: f64,
}

pub fn sector_norm(a: &DenseOperator, n: usize, m: usize, p: f64) -> Result<SectorNorm> {
    let sector = ParticleSector::new(n, m)?;
    let dim = 1usize << n;
    if a.nrows() != dim {
        return Err(Error::Invalid("operator dimension does not match n".into()));
    }
    let w = (1.0 / sector.rank).powf(1.0 / p);
    let mut b = a.clone();
    for j in 0..dim {
        let k = if (j.count_ones() as usize) == m { w } else { 0.0 };
        for i in 0..dim {
            b[(i, j)] *= k;
        }
    }
    let value = schatten_from_sv(&singular_values(&b), p, dim, false);
    let rho = product_diagonal(&vec![m as f64 / n as f64; n]);
    let weighted = weighted_with_diag(a, &rho, 1.0, p);
    let bound = weighted * sector.b.powf(-1.0 / p);
    Ok(SectorNorm { sector, value, weighted, bound })
}

/// `I_s ⊗ Tr̄_s[F]` (normalized partial trace on site `s`).
pub fn site_average(f: &DenseOperator, n: usize, s: usize) -> DenseOperator {
    let dim = 1usize << n;
    let bit = 1usize << (n - 1 - s);
    let mut out = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        for i in 0..dim {
            if (i ^ j) & bit != 0 {
                continue;
            }
            let (i0, j0) = (i & !bit, j & !bit);
            out[(i, j)] = (f[(i0, j0)] + f[(i0 | bit, j0 | bit)]) * 0.5;
        }
    }
    out
}

/// `F_S = Π_{s∈S}(I − E_s) Π_{s∉S} E_s [F]`, with `S` a list of 0-based sites.
pub fn subset_component(f: &DenseOperator, n: usize, set: &[usize]) -> DenseOperator {
    let mut g = f.clone();
    for s in 0..n {
        let avg = site_average(&g, n, s);
        g = if set.contains(&s) { g - avg } else { avg };
    }
    g
}

/// All `2^n` components indexed by bitmask over sites (bit `s` set when `s ∈ S`).
pub fn all_subset_components(f: &DenseOperator, n: usize) -> Vec<DenseOperator> {
    let mut parts: Vec<(usize, DenseOperator)> = vec![(0, f.clone())];
    for s in 0..n {
        let mut next = Vec::with_capacity(parts.len() * 2);
        for (mask, g) in parts {
            let avg = site_average(&g, n, s);
            let rest = &g - &avg;
            next.push((mask, avg));
            next.push((mask | 1 << s, rest));
        }
        parts = next;
    }
    parts.sort_by_key(|p| p.0);
    parts.into_iter().map(|p| p.1).collect()
}

pub fn state_error(e: &DenseOperator, psi: &StateVector) -> Result<f64> {
    let nrm = psi.norm();
    if (nrm - 1.0).abs() > 1e-10 {
        return Err(Error::Invalid(format!("state norm {nrm} is not 1")));
    }
    Ok((e * psi).norm())
}

/// `½‖|a⟩⟨a| − |b⟩⟨b|‖₁ = sqrt(1 − |⟨a|b⟩|²)` for unit vectors.
pub fn trace_distance_pure(a: &StateVector, b: &StateVector) -> f64 {
    let ov = a.dotc(b).norm_sqr();
    (1.0 - ov.min(1.0)).max(0.0).sqrt()
}

pub fn basis_state(dim: usize, b: usize) -> StateVector {
    let mut v = DVector::from_element(dim, ZERO);
    v[b] = ONE;
    v
}

/// Normalized complex Gaussian vector.
pub fn haar_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> StateVector {
    let v = DVector::from_fn(dim, |_, _| {
        Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

/// Haar-random unitary from the QR of a complex Gaussian matrix.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DenseOperator {
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut q = q;
    for j in 0..dim {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..dim {
            q[(i, j)] *= ph;
        }
    }
    q
}

pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DenseOperator {
    DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

/// `A ⊗ B`.
pub fn kron(a: &DenseOperator, b: &DenseOperator) -> DenseOperator {
    a.kronecker(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliTerm;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ham(n: usize, t: &[(&str, f64)]) -> PauliHamiltonian {
        PauliHamiltonian::new(n, t.iter().map(|(l, c)| PauliTerm::from_label(l, *c).unwrap())).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn paulis_match_textbook() {
        let y = pauli_matrix(&PauliString::from_label("Y").unwrap());
        assert_eq!(y[(0, 1)], c(0.0, -1.0));
        assert_eq!(y[(1, 0)], c(0.0, 1.0));
        let zz = to_matrix(&ham(2, &[("ZZ", 1.0)]), 12).unwrap();
        let d: Vec<f64> = (0..4).map(|i| zz[(i, i)].re).collect();
        assert_eq!(d, vec![1.0, -1.0, -1.0, 1.0]);
        let z = to_matrix(&ham(1, &[("Z", 1.0)]), 12).unwrap();
        assert_eq!(z[(1, 1)], c(-1.0, 0.0));
    }

    #[test]
    fn matrix_matches_kron_oracle() {
        let sx = DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let sy = DMatrix::from_row_slice(2, 2, &[ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO]);
        let sz = DMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);
        let id = DMatrix::<Complex64>::identity(2, 2);
        let h = ham(3, &[("XYZ", 0.3), ("ZIX", -1.2), ("IYY", 0.7)]);
        let letter = |ch: char| match ch {
            'X' => sx.clone(),
            'Y' => sy.clone(),
            'Z' => sz.clone(),
            _ => id.clone(),
        };
        let mut oracle = DMatrix::zeros(8, 8);
        for t in h.terms() {
            let l: Vec<char> = t.string.label().chars().collect();
            oracle += kron(&kron(&letter(l[0]), &letter(l[1])), &letter(l[2])) * t.coeff;
        }
        assert!((to_matrix(&h, 12).unwrap() - oracle).norm() < 1e-14);
    }

    #[test]
    fn cap_is_enforced() {
        let h = PauliHamiltonian::empty(13);
        assert!(matches!(to_matrix(&h, 12), Err(Error::Cap(_))));
    }

    #[test]
    fn evolve_z() {
        let u = evolve(&ham(1, &[("Z", 1.0)]), 0.7, 12).unwrap();
        assert!((u[(0, 0)] - Complex64::from_polar(1.0, 0.7)).norm() < 1e-12);
        assert!((u[(1, 1)] - Complex64::from_polar(1.0, -0.7)).norm() < 1e-12);
        let h = ham(2, &[("XY", 0.4), ("ZI", 1.1)]);
        let id = evolve(&h, 0.0, 12).unwrap();
        assert!((id - DMatrix::identity(4, 4)).norm() < 1e-12);
        let a = evolve(&h, 1.3, 12).unwrap();
        let b = evolve(&h, -1.3, 12).unwrap();
        assert!((a * b - DMatrix::identity(4, 4)).norm() < 1e-10);
    }

    #[test]
    fn schedule_two_factor_product() {
        let h = ham(1, &[("X", 1.0), ("Z", 1.0)]);
        let tau = 0.3;
        let s = apply_schedule(&h, &build_schedule(2, 1, tau).unwrap(), 12).unwrap();
        let ex = evolve(&ham(1, &[("X", 1.0)]), tau, 12).unwrap();
        let ez = evolve(&ham(1, &[("Z", 1.0)]), tau, 12).unwrap();
        assert!((s - ez * ex).norm() < 1e-12);
    }

    #[test]
    fn commuting_schedules_are_exact() {
        let h = ham(3, &[("ZZI", 0.5), ("IZZ", -0.3), ("ZIZ", 1.0)]);
        for l in [1, 2, 4] {
            let s = apply_schedule(&h, &build_schedule(3, l, 0.8).unwrap(), 12).unwrap();
            assert!((s - evolve(&h, 0.8, 12).unwrap()).norm() < 1e-12);
        }
        let e = trotter_error_op(&h, 1.0, 3, 1, 12).unwrap();
        assert!(e.norm() < 1e-12);
        let single = ham(2, &[("XY", 0.9)]);
        let s = apply_schedule(&single, &build_schedule(1, 2, 0.4).unwrap(), 12).unwrap();
        assert!((s - evolve(&single, 0.4, 12).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn first_order_error_is_tau_squared() {
        let h = ham(1, &[("X", 1.0), ("Z", 1.0)]);
        let tau = 1e-3;
        let e = trotter_error_op(&h, tau, 1, 1, 12).unwrap();
        let v = spectral_norm(&e);
        assert!((v / (tau * tau) - 1.0).abs() < 1e-2, "{v}");
    }

    #[test]
    fn schatten_examples() {
        let id = DMatrix::<Complex64>::identity(8, 8);
        for p in [1.0, 2.0, 4.0, f64::INFINITY] {
            assert!((schatten_norm(&id, p, true).unwrap() - 1.0).abs() < 1e-12);
        }
        let z = to_matrix(&ham(2, &[("ZI", 1.0), ("IZ", 1.0)]), 12).unwrap();
        assert!((schatten_norm(&z, 2.0, true).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert!((schatten_norm(&z, 4.0, true).unwrap() - 8f64.powf(0.25)).abs() < 1e-12);
        assert!(schatten_norm(&z, 0.5, true).is_err());
    }

    #[test]
    fn svd_and_eig_paths_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_matrix(&mut rng, 8);
        let h = &g + g.adjoint();
        let a = h.clone() * c(0.0, 1.0);
        let svd: f64 = h.clone().singular_values().iter().sum();
        assert!((singular_values(&h).iter().sum::<f64>() - svd).abs() < 1e-9);
        assert!((singular_values(&a).iter().sum::<f64>() - svd).abs() < 1e-9);
    }

    #[test]
    fn weighted_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_matrix(&mut rng, 8);
        for s in [0.0, 0.3, 1.0] {
            let spec = WeightedNormSpec::maximally_mixed(3, s, 4.0);
            let lhs = weighted_norm(&a, &spec).unwrap();
            assert!((lhs - schatten_norm(&a, 4.0, true).unwrap()).abs() < 1e-10);
            let spec = WeightedNormSpec::new(vec![0.2, 0.0, 0.9], s, 3.0).unwrap();
            let id = DMatrix::<Complex64>::identity(8, 8);
            assert!((weighted_norm(&id, &spec).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(WeightedNormSpec::new(vec![0.5], 0.5, 1.5).is_err());
    }

    #[test]
    fn sector_examples() {
        let s = ParticleSector::new(4, 2).unwrap();
        assert!((s.b - 0.375).abs() < 1e-15);
        assert_eq!(s.rank, 6.0);
        let id = DMatrix::<Complex64>::identity(16, 16);
        assert!((sector_norm(&id, 4, 2, 4.0).unwrap().value - 1.0).abs() < 1e-12);
        let total: f64 = (0..=5).map(|m| ParticleSector::new(5, m).unwrap().rank).sum();
        assert_eq!(total, 32.0);
    }

    #[test]
    fn subset_components_examples() {
        let z1 = to_matrix(&ham(2, &[("ZI", 1.0)]), 12).unwrap();
        let comps = all_subset_components(&z1, 2);
        assert!((&comps[0b01] - &z1).norm() < 1e-14);
        for m in [0b00, 0b10, 0b11] {
            assert!(comps[m].norm() < 1e-14);
        }
        let zz = to_matrix(&ham(2, &[("ZZ", 1.0)]), 12).unwrap();
        assert!((subset_component(&zz, 2, &[0, 1]) - &zz).norm() < 1e-14);
        assert!(subset_component(&zz, 2, &[0]).norm() < 1e-14);
        assert!(subset_component(&zz, 2, &[]).norm() < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = random_matrix(&mut rng, 8);
        let sum = all_subset_components(&f, 3).into_iter().fold(DMatrix::zeros(8, 8), |a, b| a + b);
        assert!((sum - &f).norm() < 1e-10);
        let direct = subset_component(&f, 3, &[0, 2]);
        assert!((direct - &all_subset_components(&f, 3)[0b101]).norm() < 1e-12);
    }

    #[test]
    fn state_error_examples() {
        let e = DMatrix::<Complex64>::zeros(4, 4);
        assert_eq!(state_error(&e, &basis_state(4, 2)).unwrap(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = haar_unitary(&mut rng, 4);
        assert!(is_unitary(&u, 1e-10));
        let psi = haar_state(&mut rng, 4);
        let v = state_error(&u, &psi).unwrap();
        assert!((0.0..=2.0).contains(&v));
        assert!(state_error(&u, &(psi * c(2.0, 0.0))).is_err());
    }
}
