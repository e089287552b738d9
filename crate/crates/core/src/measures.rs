//! Finite-dimensional coherence functionals in a fixed orthonormal basis.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::validate_density;

/// Values below this are reported as exactly zero.
pub const CLAMP: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    RelEntropy,
    L1,
}

impl Measure {
    /// Coherence of the pure state with populations `p` (phases do not matter).
    pub fn of_probabilities(self, p: &[f64]) -> f64 {
        match self {
            Measure::RelEntropy => shannon_entropy(p),
            Measure::L1 => l1_from_probabilities(p),
        }
    }

    pub fn of_density(self, rho: &DMatrix<C64>) -> Result<f64> {
        match self {
            Measure::RelEntropy => rel_entropy_coherence(rho),
            Measure::L1 => l1_coherence(rho),
        }
    }
}

impl std::str::FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rel_entropy" | "rel-entropy" | "rel" => Ok(Measure::RelEntropy),
            "l1" => Ok(Measure::L1),
            _ => Err(Error::Parse(format!("unknown measure '{s}'"))),
        }
    }
}

/// Shannon entropy in nats, clamped to zero below [`CLAMP`].
pub fn shannon_entropy(p: &[f64]) -> f64 {
    clamp(p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum())
}

fn l1_from_probabilities(p: &[f64]) -> f64 {
    let s: f64 = p.iter().map(|&x| x.max(0.0).sqrt()).sum();
    clamp(s * s - p.iter().sum::<f64>())
}

pub fn von_neumann_entropy(rho: &DMatrix<C64>) -> f64 {
    let h = (rho + rho.adjoint()) * C64::from(0.5);
    h.symmetric_eigenvalues()
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.ln())
        .sum()
}

/// `S(rho_diag) - S(rho)` in nats.
pub fn rel_entropy_coherence(rho: &DMatrix<C64>) -> Result<f64> {
    validate_density(rho)?;
    let diag: Vec<f64> = (0..rho.nrows()).map(|i| rho[(i, i)].re).collect();
    let s_diag: f64 = diag.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum();
    Ok(clamp(s_diag - von_neumann_entropy(rho)))
}

/// Sum of absolute off-diagonal entries.
pub fn l1_coherence(rho: &DMatrix<C64>) -> Result<f64> {
    validate_density(rho)?;
    let n = rho.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += rho[(i, j)].norm();
            }
        }
    }
    Ok(clamp(s))
}

fn clamp(x: f64) -> f64 {
    if x < CLAMP {
        0.0
    } else {
        x
    }
}

/// Density matrix of the pure state `sum_i c_i |i>`.
pub fn pure_density(coeffs: &[C64]) -> DMatrix<C64> {
    let n = coeffs.len();
    let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    DMatrix::from_fn(n, n, |i, j| coeffs[i] * coeffs[j].conj() / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn rel_entropy_examples() {
        assert_eq!(shannon_entropy(&[1.0, 0.0, 0.0]), 0.0);
        assert!((shannon_entropy(&[0.5, 0.5]) - LN_2).abs() < 1e-15);

        // 3/4 |+><+| + 1/4 |-><-|: diag (1/2, 1/2), eigenvalues (3/4, 1/4);
        // closed 2x2 eigenvalue oracle gives log 2 - H(1/4)
        let rho = DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.25, 0.0), c(0.25, 0.0), c(0.5, 0.0)]);
        let h = -(0.75f64 * 0.75f64.ln() + 0.25 * 0.25f64.ln());
        let v = rel_entropy_coherence(&rho).unwrap();
        assert!((v - (LN_2 - h)).abs() < 1e-12);
        assert!((v - 0.13081).abs() < 1e-5);
    }

    #[test]
    fn l1_examples() {
        let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.3, 0.0), c(0.7, 0.0)]));
        assert_eq!(l1_coherence(&diag).unwrap(), 0.0);
        let s = 1.0 / 3f64.sqrt();
        let rho = pure_density(&[c(s, 0.0), c(s, 0.0), c(s, 0.0)]);
        assert!((l1_coherence(&rho).unwrap() - 2.0).abs() < 1e-12);
        let rho = pure_density(&[c(0.8f64.sqrt(), 0.0), c(0.2f64.sqrt(), 0.0)]);
        assert!((l1_coherence(&rho).unwrap() - 0.8).abs() < 1e-12);
        assert!((Measure::L1.of_probabilities(&[0.8, 0.2]) - 0.8).abs() < 1e-12);
    }

    #[test]
    fn invalid_density_rejected() {
        let bad = DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.9, 0.0), c(0.0, 0.0), c(0.5, 0.0)]);
        assert!(rel_entropy_coherence(&bad).is_err());
        assert!(l1_coherence(&bad).is_err());
    }

    #[test]
    fn pure_density_agrees_with_probability_shortcut() {
        let coeffs = [c(0.6, 0.1), c(-0.2, 0.5), c(0.3, -0.4)];
        let rho = pure_density(&coeffs);
        let norm: f64 = coeffs.iter().map(|z| z.norm_sqr()).sum();
        let p: Vec<f64> = coeffs.iter().map(|z| z.norm_sqr() / norm).collect();
        for m in [Measure::RelEntropy, Measure::L1] {
            let a = m.of_density(&rho).unwrap();
            let b = m.of_probabilities(&p);
            assert!((a - b).abs() < 1e-10, "{m:?}: {a} vs {b}");
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn coeffs() -> impl Strategy<Value = Vec<C64>> {
            prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..6)
                .prop_map(|v| v.into_iter().map(|(a, b)| C64::new(a, b)).collect())
                .prop_filter("nonzero", |v: &Vec<C64>| v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3)
        }

        proptest! {
            #[test]
            fn invariant_under_permutation_and_phases(v in coeffs(), shift in 0usize..5, phi in 0.0f64..std::f64::consts::TAU) {
                let n = v.len();
                let rotated: Vec<C64> = (0..n)
                    .map(|i| v[(i + shift) % n] * C64::from_polar(1.0, phi * i as f64))
                    .collect();
                for m in [Measure::RelEntropy, Measure::L1] {
                    let a = m.of_density(&pure_density(&v)).unwrap();
                    let b = m.of_density(&pure_density(&rotated)).unwrap();
                    prop_assert!((a - b).abs() < 1e-9);
                }
            }

            #[test]
            fn vanish_only_when_incoherent(v in coeffs()) {
                let p: Vec<f64> = v.iter().map(|z| z.norm_sqr()).collect();
                let total: f64 = p.iter().sum();
                let p: Vec<f64> = p.iter().map(|x| x / total).collect();
                let support = p.iter().filter(|&&x| x > 1e-10).count();
                for m in [Measure::RelEntropy, Measure::L1] {
                    let value = m.of_probabilities(&p);
                    prop_assert!(value >= 0.0);
                    if support > 1 && p.iter().filter(|&&x| x > 1e-3).count() > 1 {
                        prop_assert!(value > 0.0);
                    }
                }
                let single = vec![1.0];
                prop_assert_eq!(Measure::RelEntropy.of_probabilities(&single), 0.0);
                prop_assert_eq!(Measure::L1.of_probabilities(&single), 0.0);
            }

            #[test]
            fn rel_entropy_bounded_by_log_dimension(v in coeffs()) {
                let value = rel_entropy_coherence(&pure_density(&v)).unwrap();
                prop_assert!(value <= (v.len() as f64).ln() + 1e-12);
            }
        }
    }
}
