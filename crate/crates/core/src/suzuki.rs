//! Lie–Trotter and recursive Suzuki schedules.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Step {
    pub gamma: usize,
    /// Time argument `a_j τ` of this exponential.
    pub coeff: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Schedule {
    pub order: u32,
    pub tau: f64,
    /// Step 0 is applied first (rightmost in the operator product).
    pub steps: Vec<Step>,
    pub upsilon: u64,
    /// Exponential count `ΥΓ` before merging.
    pub j_unmerged: u64,
}

impl Schedule {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Total time per term, which should equal `τ` for every term.
    pub fn per_term_time(&self, gamma: usize) -> Vec<f64> {
        let mut v = vec![0.0; gamma];
        for s in &self.steps {
            v[s.gamma] += s.coeff;
        }
        v
    }
}

fn check_order(order: u32) -> Result<()> {
    if order == 0 || (order > 1 && order % 2 == 1) {
        return Err(Error::Unsupported(format!("product formula of order {order}")));
    }
    Ok(())
}

pub fn upsilon(order: u32) -> Result<u64> {
    check_order(order)?;
    Ok(if order == 1 { 1 } else { 2 * 5u64.pow(order / 2 - 1) })
}

/// `q_p = 1/(4 − 4^{1/(2p−1)})`.
pub fn suzuki_q(p: u32) -> f64 {
    1.0 / (4.0 - 4f64.powf(1.0 / (2.0 * p as f64 - 1.0)))
}

fn raw(gamma: usize, order: u32, tau: f64) -> Vec<Step> {
    match order {
        1 => (0..gamma).map(|g| Step { gamma: g, coeff: tau }).collect(),
        2 => {
            let h = tau / 2.0;
            (0..gamma).rev().chain(0..gamma).map(|g| Step { gamma: g, coeff: h }).collect()
        }
        _ => {
            let p = order / 2;
            let q = suzuki_q(p);
            let outer = raw(gamma, order - 2, q * tau);
            let mid = raw(gamma, order - 2, (1.0 - 4.0 * q) * tau);
            let mut v = Vec::with_capacity(outer.len() * 4 + mid.len());
            v.extend_from_slice(&outer);
            v.extend_from_slice(&outer);
            v.extend_from_slice(&mid);
            v.extend_from_slice(&outer);
            v.extend_from_slice(&outer);
            v
        }
    }
}

/// Merge adjacent exponentials of the same term.
pub fn merge_adjacent(steps: &[Step]) -> Vec<Step> {
    let mut out: Vec<Step> = Vec::with_capacity(steps.len());
    for s in steps {
        match out.last_mut() {
            Some(last) if last.gamma == s.gamma => last.coeff += s.coeff,
            _ => out.push(*s),
        }
    }
    out
}

pub fn build_schedule_unmerged(gamma: usize, order: u32, tau: f64) -> Result<Schedule> {
    let upsilon = upsilon(order)?;
    if gamma == 0 {
        return Err(Error::Invalid("schedule needs at least one term".into()));
    }
    Ok(Schedule { order, tau, steps: raw(gamma, order, tau), upsilon, j_unmerged: upsilon * gamma as u64 })
}

pub fn build_schedule(gamma: usize, order: u32, tau: f64) -> Result<Schedule> {
    let mut s = build_schedule_unmerged(gamma, order, tau)?;
    s.steps = merge_adjacent(&s.steps);
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(s: &Schedule) -> Vec<(usize, f64)> {
        s.steps.iter().map(|x| (x.gamma, x.coeff)).collect()
    }

    #[test]
    fn first_and_second_order() {
        let s = build_schedule(2, 1, 1.0).unwrap();
        assert_eq!(pairs(&s), vec![(0, 1.0), (1, 1.0)]);
        let u = build_schedule_unmerged(2, 2, 1.0).unwrap();
        assert_eq!(pairs(&u), vec![(1, 0.5), (0, 0.5), (0, 0.5), (1, 0.5)]);
        let m = build_schedule(2, 2, 1.0).unwrap();
        assert_eq!(pairs(&m), vec![(1, 0.5), (0, 1.0), (1, 0.5)]);
        assert_eq!(m.j_unmerged, 4);
    }

    #[test]
    fn constants() {
        assert!((suzuki_q(2) - 0.414490771794376).abs() < 1e-12);
        let u: Vec<u64> = [1, 2, 4, 6].iter().map(|&l| upsilon(l).unwrap()).collect();
        assert_eq!(u, vec![1, 2, 10, 50]);
        assert!(upsilon(3).is_err());
        assert!(build_schedule(2, 5, 1.0).is_err());
    }

    #[test]
    fn unmerged_length_is_upsilon_gamma() {
        for l in [1, 2, 4, 6] {
            for g in 1..5 {
                let s = build_schedule_unmerged(g, l, 0.1).unwrap();
                assert_eq!(s.steps.len() as u64, s.j_unmerged);
            }
        }
    }

    #[test]
    fn per_term_sums_and_palindrome() {
        for l in [2, 4, 6] {
            let tau = 0.37;
            let s = build_schedule(4, l, tau).unwrap();
            for v in s.per_term_time(4) {
                assert!((v - tau).abs() < 1e-15 * 10.0, "{v}");
            }
            let n = s.steps.len();
            for i in 0..n {
                assert_eq!(s.steps[i].gamma, s.steps[n - 1 - i].gamma);
                assert!((s.steps[i].coeff - s.steps[n - 1 - i].coeff).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn single_term_collapses() {
        let s = build_schedule(1, 4, 0.2).unwrap();
        assert_eq!(s.steps.len(), 1);
        assert!((s.steps[0].coeff - 0.2).abs() < 1e-15);
    }
}
