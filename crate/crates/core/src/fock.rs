//! Truncated Fock-space states of a single bosonic mode.
//!
//! States live on photon numbers `0..=n_max`. Constructors renormalize after
//! truncation and keep the analytic weight that fell outside the cutoff as
//! [`FockVector::deficit`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_N_MAX: usize = 60;
pub const TOL_NORM: f64 = 1e-10;
pub const TOL_HERM: f64 = 1e-10;
pub const TOL_PSD: f64 = 1e-9;

/// Complex field amplitude labelling a coherent state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherentLabel(C64);

impl CoherentLabel {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        Self::from_complex(C64::new(re, im))
    }

    pub fn from_complex(alpha: C64) -> Result<Self> {
        if alpha.re.is_finite() && alpha.im.is_finite() {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidLabel(format!("{alpha}")))
        }
    }

    pub fn from_polar(r: f64, theta: f64) -> Result<Self> {
        Self::from_complex(C64::from_polar(r, theta))
    }

    pub fn value(self) -> C64 {
        self.0
    }
}

impl From<f64> for CoherentLabel {
    fn from(re: f64) -> Self {
        assert!(re.is_finite());
        Self(C64::new(re, 0.0))
    }
}

/// Truncation settings shared by the state factory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub n_max: usize,
    /// Reject states whose analytic tail weight exceeds `tail_tol`.
    pub strict: bool,
    pub tail_tol: f64,
}

impl Default for Truncation {
    fn default() -> Self {
        Self {
            n_max: DEFAULT_N_MAX,
            strict: true,
            tail_tol: 1e-6,
        }
    }
}

impl Truncation {
    pub fn new(n_max: usize) -> Self {
        Self {
            n_max,
            ..Self::default()
        }
    }

    pub fn lenient(n_max: usize) -> Self {
        Self {
            n_max,
            strict: false,
            ..Self::default()
        }
    }

    fn check_tail(&self, deficit: f64) -> Result<()> {
        if self.strict && deficit > self.tail_tol {
            return Err(Error::Truncation {
                deficit,
                tol: self.tail_tol,
                n_max: self.n_max,
            });
        }
        Ok(())
    }
}

/// Pure single-mode state as amplitudes on photon numbers `0..=n_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    amps: DVector<C64>,
    deficit: f64,
}

impl FockVector {
    /// Normalizes `amps` and wraps them. Requires at least two levels and a
    /// nonzero norm.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let mut v = Self::unnormalized(DVector::from_vec(amps))?;
        let norm_sq = v.norm_sqr();
        if !(norm_sq > 0.0) || !norm_sq.is_finite() {
            return Err(Error::NotNormalized(norm_sq));
        }
        v.amps /= C64::from(norm_sq.sqrt());
        Ok(v)
    }

    /// Wraps amplitudes without normalizing. Used for greedy residuals, which
    /// are sub-normalized by construction.
    pub fn unnormalized(amps: DVector<C64>) -> Result<Self> {
        if amps.len() < 2 {
            return Err(Error::TruncationOrder(amps.len().saturating_sub(1)));
        }
        if amps.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite amplitude".into()));
        }
        Ok(Self { amps, deficit: 0.0 })
    }

    pub(crate) fn with_deficit(amps: DVector<C64>, deficit: f64) -> Self {
        Self { amps, deficit }
    }

    pub fn n_max(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn amplitude(&self, n: usize) -> C64 {
        self.amps[n]
    }

    /// Analytic weight beyond `n_max` before renormalization.
    pub fn deficit(&self) -> f64 {
        self.deficit
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    /// Applies `exp(i theta n)`.
    pub fn rotate_phase(&self, theta: f64) -> FockVector {
        let amps = DVector::from_iterator(
            self.dim(),
            self.amps
                .iter()
                .enumerate()
                .map(|(n, c)| c * C64::from_polar(1.0, theta * n as f64)),
        );
        Self::with_deficit(amps, self.deficit)
    }

    /// Same state on a different cutoff. Shrinking drops amplitudes and
    /// renormalizes.
    pub fn retruncate(&self, n_max: usize) -> Result<FockVector> {
        let mut amps = vec![C64::new(0.0, 0.0); n_max + 1];
        for (n, a) in amps.iter_mut().enumerate().take(self.dim()) {
            *a = self.amps[n];
        }
        FockVector::new(amps)
    }

    pub fn to_file(&self) -> StateFile {
        StateFile {
            n_max: self.n_max(),
            amplitudes: self.amps.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

/// JSON form of a [`FockVector`]: `{"n_max": .., "amplitudes": [[re, im], ..]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateFile {
    pub n_max: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn into_state(self) -> Result<FockVector> {
        if self.amplitudes.len() != self.n_max + 1 {
            return Err(Error::Parse(format!(
                "expected {} amplitudes, found {}",
                self.n_max + 1,
                self.amplitudes.len()
            )));
        }
        let v = FockVector::new(
            self.amplitudes
                .into_iter()
                .map(|[re, im]| C64::new(re, im))
                .collect(),
        )?;
        Ok(v)
    }
}

/// Renormalized truncated coherent amplitudes and the Poisson tail weight
/// beyond `n_max`. Performs no strictness checks.
pub fn coherent_amplitudes(alpha: C64, n_max: usize) -> (DVector<C64>, f64) {
    let x = alpha.norm_sqr();
    let mut amps = DVector::from_element(n_max + 1, C64::new(0.0, 0.0));
    let mut a = C64::new((-0.5 * x).exp(), 0.0);
    amps[0] = a;
    for n in 1..=n_max {
        a *= alpha / (n as f64).sqrt();
        amps[n] = a;
    }
    let kept: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
    let deficit = poisson_tail(x, n_max);
    amps /= C64::from(kept.sqrt());
    (amps, deficit)
}

/// `sum_{n > n_max} e^{-x} x^n / n!`, summed term by term.
pub(crate) fn poisson_tail(x: f64, n_max: usize) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    // log of the first tail term, then ratio recurrence
    let k0 = n_max + 1;
    let log_term = -x + k0 as f64 * x.ln() - ln_factorial(k0);
    let mut term = log_term.exp();
    let mut sum = 0.0;
    let mut k = k0;
    loop {
        sum += term;
        k += 1;
        term *= x / k as f64;
        if term < 1e-300 || (k as f64 > x && term < sum * 1e-17) {
            break;
        }
    }
    sum
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

pub fn coherent_vector(alpha: CoherentLabel, trunc: &Truncation) -> Result<FockVector> {
    check_n_max(trunc.n_max)?;
    let a = alpha.value();
    if trunc.strict && a.norm_sqr() > trunc.n_max as f64 / 2.0 {
        return Err(Error::Truncation {
            deficit: poisson_tail(a.norm_sqr(), trunc.n_max),
            tol: trunc.tail_tol,
            n_max: trunc.n_max,
        });
    }
    let (amps, deficit) = coherent_amplitudes(a, trunc.n_max);
    trunc.check_tail(deficit)?;
    Ok(FockVector::with_deficit(amps, deficit))
}

pub fn overlap(a: &FockVector, b: &FockVector) -> Result<C64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    Ok(a.amps.dotc(&b.amps))
}

/// `|<a|b>|^2`; global phases drop out.
pub fn fidelity(a: &FockVector, b: &FockVector) -> Result<f64> {
    let s = overlap(a, b)?;
    Ok(s.norm_sqr() / (a.norm_sqr() * b.norm_sqr()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// `(|a> + |-a>)` or `(|a> - |-a>)`, normalized. Wrong-parity amplitudes are
/// set to exactly zero.
pub fn cat_state(alpha: CoherentLabel, parity: Parity, trunc: &Truncation) -> Result<FockVector> {
    let a = alpha.value();
    if parity == Parity::Odd && a.norm_sqr() == 0.0 {
        return Err(Error::OddCatAtOrigin);
    }
    let coh = coherent_vector(alpha, trunc)?;
    let keep = match parity {
        Parity::Even => 0,
        Parity::Odd => 1,
    };
    let amps: Vec<C64> = coh
        .amps
        .iter()
        .enumerate()
        .map(|(n, c)| if n % 2 == keep { *c } else { C64::new(0.0, 0.0) })
        .collect();
    let mut v = FockVector::new(amps)?;
    v.deficit = coh.deficit;
    Ok(v)
}

pub fn fock_state(n: usize, n_max: usize) -> Result<FockVector> {
    check_n_max(n_max)?;
    if n > n_max {
        return Err(Error::PhotonNumberOutOfRange { n, n_max });
    }
    let mut amps = DVector::from_element(n_max + 1, C64::new(0.0, 0.0));
    amps[n] = C64::new(1.0, 0.0);
    Ok(FockVector::with_deficit(amps, 0.0))
}

/// `S(r e^{i theta}) |0>`; only even photon numbers are populated.
pub fn squeezed_vacuum(r: f64, theta: f64, trunc: &Truncation) -> Result<FockVector> {
    check_n_max(trunc.n_max)?;
    if !(r >= 0.0) || !r.is_finite() || !theta.is_finite() {
        return Err(Error::InvalidParameter(format!("squeezing r = {r}, theta = {theta}")));
    }
    let n_max = trunc.n_max;
    let ratio = -C64::from_polar(r.tanh(), theta);
    let mut amps = DVector::from_element(n_max + 1, C64::new(0.0, 0.0));
    let mut c = C64::new((1.0 / r.cosh()).sqrt(), 0.0);
    amps[0] = c;
    let mut m = 1;
    while 2 * m <= n_max {
        // c_{2m} / c_{2m-2} = ratio * sqrt((2m - 1) / (2m))
        c *= ratio * ((2 * m - 1) as f64 / (2 * m) as f64).sqrt();
        amps[2 * m] = c;
        m += 1;
    }
    let kept: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
    let deficit = (1.0 - kept).max(0.0);
    trunc.check_tail(deficit)?;
    amps /= C64::from(kept.sqrt());
    Ok(FockVector::with_deficit(amps, deficit))
}

pub fn mean_photon(state: &FockVector) -> f64 {
    let w: f64 = state
        .amps
        .iter()
        .enumerate()
        .map(|(n, c)| n as f64 * c.norm_sqr())
        .sum();
    w / state.norm_sqr()
}

/// Truncated annihilation operator.
pub fn annihilation(n_max: usize) -> DMatrix<C64> {
    let mut a = DMatrix::from_element(n_max + 1, n_max + 1, C64::new(0.0, 0.0));
    for n in 1..=n_max {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// Dense `D(gamma)` on the truncated space, by matrix exponential of the
/// truncated generator `gamma a^dag - gamma^* a`.
pub fn displacement_matrix(gamma: C64, n_max: usize) -> DMatrix<C64> {
    let a = annihilation(n_max);
    let gen = a.adjoint() * gamma - a * gamma.conj();
    gen.exp()
}

/// Applies `D(gamma)` and renormalizes. In strict mode the displaced mean
/// photon number bound `(sqrt(<n>) + |gamma|)^2` must stay below `n_max / 2`.
pub fn apply_displacement(
    state: &FockVector,
    gamma: CoherentLabel,
    trunc: &Truncation,
) -> Result<FockVector> {
    let g = gamma.value();
    let n_max = state.n_max();
    if g.norm_sqr() == 0.0 {
        return Ok(state.clone());
    }
    let bound = (mean_photon(state).sqrt() + g.norm()).powi(2);
    if trunc.strict && bound > n_max as f64 / 2.0 {
        return Err(Error::Headroom(format!(
            "displaced mean photon bound {bound:.3} exceeds n_max/2 = {}",
            n_max as f64 / 2.0
        )));
    }
    let d = displacement_matrix(g, n_max);
    let out = d * &state.amps;
    let norm_sq: f64 = out.iter().map(|c| c.norm_sqr()).sum();
    let out = out / C64::from(norm_sq.sqrt());
    Ok(FockVector::with_deficit(out, state.deficit))
}

fn check_n_max(n_max: usize) -> Result<()> {
    if n_max < 1 {
        return Err(Error::TruncationOrder(n_max));
    }
    Ok(())
}

/// Hermitian, positive, unit-trace matrix on the truncated Fock space.
#[derive(Clone, Debug, PartialEq)]
pub struct FockDensity {
    matrix: DMatrix<C64>,
}

impl FockDensity {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        validate_density(&matrix)?;
        if matrix.nrows() < 2 {
            return Err(Error::TruncationOrder(matrix.nrows().saturating_sub(1)));
        }
        Ok(Self { matrix })
    }

    pub fn from_pure(state: &FockVector) -> Self {
        let v = &state.amps / C64::from(state.norm_sqr().sqrt());
        Self {
            matrix: &v * v.adjoint(),
        }
    }

    /// Convex mixture of pure states.
    pub fn mixture(components: &[(f64, FockVector)]) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidWeights("empty mixture".into()))?;
        let dim = first.1.dim();
        let mut m = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
        for (w, s) in components {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch(dim, s.dim()));
            }
            if !(*w >= 0.0) {
                return Err(Error::InvalidWeights(format!("negative weight {w}")));
            }
            m += Self::from_pure(s).matrix * C64::from(*w);
        }
        Self::new(m)
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn n_max(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }
}

/// Checks the density-matrix invariants: Hermitian, unit trace, PSD.
pub fn validate_density(m: &DMatrix<C64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(m.nrows(), m.ncols()));
    }
    let herm = (m - m.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max);
    if herm > TOL_HERM {
        return Err(Error::InvalidDensity(format!("not Hermitian (deviation {herm:.3e})")));
    }
    let tr = m.trace();
    if (tr.re - 1.0).abs() > TOL_NORM || tr.im.abs() > TOL_NORM {
        return Err(Error::InvalidDensity(format!("trace {tr}")));
    }
    let h = (m + m.adjoint()) * C64::from(0.5);
    let min_eig = h.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
    if min_eig < -TOL_PSD {
        return Err(Error::InvalidDensity(format!("negative eigenvalue {min_eig:.3e}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn label(re: f64, im: f64) -> CoherentLabel {
        CoherentLabel::new(re, im).unwrap()
    }

    #[test]
    fn vacuum_is_zero_label_coherent_state() {
        let v = coherent_vector(label(0.0, 0.0), &Truncation::new(10)).unwrap();
        assert_eq!(v.amplitude(0), C64::new(1.0, 0.0));
        assert!((1..=10).all(|n| v.amplitude(n) == C64::new(0.0, 0.0)));
    }

    #[test]
    fn coherent_vacuum_amplitude_before_renormalization() {
        let v = coherent_vector(label(1.0, 0.0), &Truncation::new(40)).unwrap();
        // deficit ~ 1e-48, so renormalization is invisible here
        assert!((v.amplitude(0).re - (-0.5f64).exp()).abs() < 1e-12);
        assert!((v.amplitude(0).re - 0.60653).abs() < 1e-5);
    }

    #[test]
    fn coherent_truncation_deficit_matches_direct_tail() {
        let v = coherent_vector(label(0.0, 2.0), &Truncation::new(60)).unwrap();
        // independent tail: sum_{n=61}^{200} e^{-4} 4^n / n! via log-gamma free products
        let mut tail = 0.0;
        let mut term = (-4.0f64).exp();
        for n in 1..=200 {
            term *= 4.0 / n as f64;
            if n > 60 {
                tail += term;
            }
        }
        assert!(v.deficit() < 1e-12);
        assert!((v.deficit() - tail).abs() <= 1e-30 + 1e-10 * tail);
    }

    #[test]
    fn strict_mode_rejects_large_amplitude() {
        let err = coherent_vector(label(5.0, 0.0), &Truncation::new(40));
        assert!(matches!(err, Err(Error::Truncation { .. })));
        assert!(coherent_vector(label(5.0, 0.0), &Truncation::lenient(40)).is_ok());
    }

    #[test]
    fn overlap_closed_forms() {
        let t = Truncation::new(60);
        let a = coherent_vector(label(1.0, 0.0), &t).unwrap();
        let b = coherent_vector(label(-1.0, 0.0), &t).unwrap();
        let vac = fock_state(0, 60).unwrap();
        assert!((overlap(&a, &a).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((overlap(&vac, &a).unwrap().norm_sqr() - (-1.0f64).exp()).abs() < 1e-12);
        assert!((overlap(&a, &b).unwrap() - C64::new((-2.0f64).exp(), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn overlap_dimension_mismatch() {
        let a = fock_state(0, 10).unwrap();
        let b = fock_state(0, 11).unwrap();
        assert!(matches!(overlap(&a, &b), Err(Error::DimensionMismatch(11, 12))));
    }

    #[test]
    fn cat_states() {
        let t = Truncation::new(60);
        let even0 = cat_state(label(0.0, 0.0), Parity::Even, &t).unwrap();
        assert!((even0.amplitude(0).re - 1.0).abs() < 1e-14);

        let odd = cat_state(label(0.01, 0.0), Parity::Odd, &t).unwrap();
        let one = fock_state(1, 60).unwrap();
        assert!(fidelity(&odd, &one).unwrap() > 0.9999);

        let even1 = cat_state(label(1.0, 0.0), Parity::Even, &t).unwrap();
        assert_eq!(even1.amplitude(1), C64::new(0.0, 0.0));
        assert!(matches!(
            cat_state(label(0.0, 0.0), Parity::Odd, &t),
            Err(Error::OddCatAtOrigin)
        ));
    }

    #[test]
    fn fock_states() {
        assert_eq!(fock_state(0, 10).unwrap().amplitude(0), C64::new(1.0, 0.0));
        assert!((mean_photon(&fock_state(3, 10).unwrap()) - 3.0).abs() < 1e-15);
        assert!(matches!(
            fock_state(11, 10),
            Err(Error::PhotonNumberOutOfRange { n: 11, n_max: 10 })
        ));
    }

    #[test]
    fn squeezed_vacuum_moments_and_parity() {
        let t = Truncation::new(80);
        let s0 = squeezed_vacuum(0.0, 0.0, &t).unwrap();
        assert!((s0.amplitude(0).re - 1.0).abs() < 1e-15);
        let s1 = squeezed_vacuum(1.0, 0.0, &t).unwrap();
        assert!((mean_photon(&s1) - 1.0f64.sinh().powi(2)).abs() < 1e-6);
        let s = squeezed_vacuum(0.5, 0.3, &t).unwrap();
        for n in (1..=80).step_by(2) {
            assert_eq!(s.amplitude(n), C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn squeezed_strict_tail_rejection() {
        assert!(squeezed_vacuum(2.5, 0.0, &Truncation::new(60)).is_err());
        assert!(squeezed_vacuum(2.5, 0.0, &Truncation::lenient(60)).is_ok());
    }

    #[test]
    fn displacement_of_vacuum_is_coherent() {
        let t = Truncation::new(60);
        let vac = fock_state(0, 60).unwrap();
        let d = apply_displacement(&vac, label(1.0, 0.0), &t).unwrap();
        let c = coherent_vector(label(1.0, 0.0), &t).unwrap();
        assert!(fidelity(&d, &c).unwrap() >= 1.0 - 1e-8);
    }

    #[test]
    fn displacement_composes_up_to_phase() {
        let t = Truncation::new(60);
        let a = coherent_vector(label(0.7, -0.4), &t).unwrap();
        let d = apply_displacement(&a, label(0.3, 1.1), &t).unwrap();
        let target = coherent_vector(label(1.0, 0.7), &t).unwrap();
        assert!(fidelity(&d, &target).unwrap() >= 1.0 - 1e-6);
    }

    #[test]
    fn zero_displacement_is_identity() {
        let one = fock_state(1, 20).unwrap();
        let d = apply_displacement(&one, label(0.0, 0.0), &Truncation::new(20)).unwrap();
        assert_eq!(d, one);
    }

    #[test]
    fn displacement_headroom() {
        let s = fock_state(3, 20).unwrap();
        assert!(matches!(
            apply_displacement(&s, label(3.0, 0.0), &Truncation::new(20)),
            Err(Error::Headroom(_))
        ));
    }

    #[test]
    fn mean_photon_examples() {
        assert!((mean_photon(&fock_state(4, 10).unwrap()) - 4.0).abs() < 1e-15);
        let c = coherent_vector(CoherentLabel::from_polar(1.5, 0.4).unwrap(), &Truncation::new(60))
            .unwrap();
        assert!((mean_photon(&c) - 2.25).abs() < 1e-9);

        // direct Fock-sum oracle: even cat populations are
        // 2 e^{-x} x^n / n! / (1 + e^{-2x}) on even n
        let cat = cat_state(label(1.0, 0.0), Parity::Even, &Truncation::new(60)).unwrap();
        let x = 1.0f64;
        let mut term = (-x).exp();
        let mut oracle = 0.0;
        for n in 0..=60usize {
            if n > 0 {
                term *= x / n as f64;
            }
            if n % 2 == 0 {
                oracle += n as f64 * 2.0 * term / (1.0 + (-2.0 * x).exp());
            }
        }
        assert!((mean_photon(&cat) - oracle).abs() < 1e-6);
        assert!((mean_photon(&cat) - 0.76159).abs() < 1e-5);
    }

    #[test]
    fn phase_rotation_rotates_coherent_label() {
        let t = Truncation::new(60);
        let a = coherent_vector(label(1.2, 0.0), &t).unwrap();
        let r = a.rotate_phase(PI / 3.0);
        let target = coherent_vector(CoherentLabel::from_polar(1.2, PI / 3.0).unwrap(), &t).unwrap();
        assert!(fidelity(&r, &target).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn density_validation() {
        let s = fock_state(2, 10).unwrap();
        let rho = FockDensity::from_pure(&s);
        assert!(validate_density(rho.matrix()).is_ok());
        let mut bad = rho.matrix().clone();
        bad[(0, 1)] = C64::new(0.1, 0.0);
        assert!(FockDensity::new(bad).is_err());
        let mut neg = DMatrix::from_element(3, 3, C64::new(0.0, 0.0));
        neg[(0, 0)] = C64::new(1.5, 0.0);
        neg[(1, 1)] = C64::new(-0.5, 0.0);
        assert!(FockDensity::new(neg).is_err());
    }

    #[test]
    fn state_file_roundtrip() {
        let c = coherent_vector(label(0.4, 0.2), &Truncation::new(12)).unwrap();
        let json = serde_json::to_string(&c.to_file()).unwrap();
        let back: StateFile = serde_json::from_str(&json).unwrap();
        let back = back.into_state().unwrap();
        assert!(fidelity(&c, &back).unwrap() > 1.0 - 1e-15);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn gaussian_overlap_law(ar in -3.0f64..3.0, ai in -3.0f64..3.0,
                                    br in -3.0f64..3.0, bi in -3.0f64..3.0) {
                let a = C64::new(ar, ai);
                let b = C64::new(br, bi);
                prop_assume!(a.norm() <= 3.0 && b.norm() <= 3.0);
                let t = Truncation::new(60);
                let va = coherent_vector(CoherentLabel::from_complex(a).unwrap(), &t).unwrap();
                let vb = coherent_vector(CoherentLabel::from_complex(b).unwrap(), &t).unwrap();
                let f = overlap(&va, &vb).unwrap().norm_sqr();
                prop_assert!((f - (-(a - b).norm_sqr()).exp()).abs() < 1e-8);
            }

            #[test]
            fn displacement_preserves_norm(re in -1.5f64..1.5, im in -1.5f64..1.5, n in 0usize..4) {
                let t = Truncation::new(60);
                let s = fock_state(n, 60).unwrap();
                let d = displacement_matrix(C64::new(re, im), 60);
                let out = d * s.amplitudes();
                let norm: f64 = out.iter().map(|c| c.norm_sqr()).sum();
                prop_assert!((norm - 1.0).abs() < 1e-8);
                let v = apply_displacement(&s, CoherentLabel::new(re, im).unwrap(), &t).unwrap();
                prop_assert!(v.is_normalized(1e-10));
            }

            #[test]
            fn constructors_are_normalized(a in 0.05f64..2.5, r in 0.0f64..1.1) {
                let t = Truncation::new(60);
                let l = CoherentLabel::from(a);
                prop_assert!(coherent_vector(l, &t).unwrap().is_normalized(TOL_NORM));
                prop_assert!(cat_state(l, Parity::Even, &t).unwrap().is_normalized(TOL_NORM));
                prop_assert!(cat_state(l, Parity::Odd, &t).unwrap().is_normalized(TOL_NORM));
                prop_assert!(squeezed_vacuum(r, 0.0, &t).unwrap().is_normalized(TOL_NORM));
            }
        }
    }
}
