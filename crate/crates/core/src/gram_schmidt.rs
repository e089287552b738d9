//! Orthogonalization against the coherent-state dictionary.
//!
//! [`greedy_decompose`] runs the matching-pursuit recursion
//! `psi_{i+1} = psi_i - |alpha_i><alpha_i|psi_i>` with `alpha_i` a global
//! maximizer of `|<alpha|psi_i>|`. [`gs_unitary_simulate`] realizes the same
//! orthogonalization as an explicit product of CNOT-type unitaries on the
//! signal mode plus an ancilla register whose tags are exact orthonormal basis
//! vectors, so the two can be cross-checked against each other.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{coherent_amplitudes, CoherentLabel, FockDensity, FockVector};
use crate::husimi::{maximize, Degeneracy, HusimiObjective, SearchConfig};
use crate::measures::{rel_entropy_coherence, Measure};

/// Recursion stops once the best squared overlap of the residual is below this.
pub const COEFF_FLOOR: f64 = 1e-12;
pub const DEFAULT_BRANCH_BUDGET: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub label: CoherentLabel,
    pub coeff: C64,
}

/// Sequence of maximizer choices that produced a branch; `0` is the canonical
/// (lexicographically smallest) maximizer at that step.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BranchId(Vec<usize>);

impl BranchId {
    pub fn choices(&self) -> &[usize] {
        &self.0
    }

    pub fn is_canonical(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for BranchId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // trailing canonical choices are dropped so ids stay short
        let last = self.0.iter().rposition(|&c| c != 0).map_or(0, |i| i + 1);
        if last == 0 {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.0[..last].iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join("."))
    }
}

impl Serialize for BranchId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GreedyDecomposition {
    pub terms: Vec<Term>,
    pub residual_norm_sq: f64,
    pub captured_weight: f64,
    pub branch_id: BranchId,
    /// Residual squared norm after each term.
    pub residual_history: Vec<f64>,
}

impl GreedyDecomposition {
    pub fn labels(&self) -> Vec<CoherentLabel> {
        self.terms.iter().map(|t| t.label).collect()
    }

    /// The first `n` terms, with residual and captured weight at that depth.
    pub fn prefix(&self, n: usize) -> GreedyDecomposition {
        let n = n.min(self.terms.len());
        let terms = self.terms[..n].to_vec();
        let captured_weight = terms.iter().map(|t| t.coeff.norm_sqr()).sum();
        let residual_norm_sq = if n == 0 {
            self.residual_norm_sq + self.captured_weight
        } else {
            self.residual_history[n - 1]
        };
        GreedyDecomposition {
            terms,
            residual_norm_sq,
            captured_weight,
            branch_id: self.branch_id.clone(),
            residual_history: self.residual_history[..n].to_vec(),
        }
    }

    pub fn to_file(&self) -> DecompositionFile {
        DecompositionFile {
            terms: self
                .terms
                .iter()
                .map(|t| {
                    let a = t.label.value();
                    [a.re, a.im, t.coeff.re, t.coeff.im]
                })
                .collect(),
            residual: self.residual_norm_sq,
            branch_id: self.branch_id.to_string(),
        }
    }
}

/// JSON form: `{"terms": [[re a, im a, re c, im c], ..], "residual": .., "branch_id": ..}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecompositionFile {
    pub terms: Vec<[f64; 4]>,
    pub residual: f64,
    pub branch_id: String,
}

#[derive(Clone, Debug)]
struct Branch {
    id: BranchId,
    terms: Vec<Term>,
    residual: DVector<C64>,
    residual_norm_sq: f64,
    history: Vec<f64>,
    exhausted: bool,
}

impl Branch {
    fn push(&mut self, label: CoherentLabel) {
        let (v, _) = coherent_amplitudes(label.value(), self.residual.len() - 1);
        let coeff = v.dotc(&self.residual);
        self.residual -= &v * coeff;
        self.residual_norm_sq = self.residual.norm_squared();
        self.history.push(self.residual_norm_sq);
        self.terms.push(Term { label, coeff });
    }

    fn decomposition(&self) -> GreedyDecomposition {
        GreedyDecomposition {
            terms: self.terms.clone(),
            residual_norm_sq: self.residual_norm_sq,
            captured_weight: self.terms.iter().map(|t| t.coeff.norm_sqr()).sum(),
            branch_id: self.id.clone(),
            residual_history: self.history.clone(),
        }
    }
}

/// Incremental greedy recursion over all explored degenerate branches.
///
/// Branches advance in lockstep; at each step, extra maximizers spawn new
/// branches in maximizer order until `budget` branches exist.
#[derive(Clone, Debug)]
pub struct GreedyRun {
    search: SearchConfig,
    budget: usize,
    branches: Vec<Branch>,
    orbit_sampled: bool,
    budget_exhausted: bool,
}

impl GreedyRun {
    pub fn new(state: &FockVector, search: &SearchConfig, budget: usize) -> Result<Self> {
        if budget == 0 {
            return Err(Error::InvalidParameter("branch budget must be at least 1".into()));
        }
        if !state.is_normalized(1e-8) {
            return Err(Error::NotNormalized(state.norm_sqr()));
        }
        search.validate()?;
        let residual = state.amplitudes().clone();
        Ok(Self {
            search: *search,
            budget,
            branches: vec![Branch {
                id: BranchId::default(),
                terms: Vec::new(),
                residual_norm_sq: residual.norm_squared(),
                residual,
                history: Vec::new(),
                exhausted: false,
            }],
            orbit_sampled: false,
            budget_exhausted: false,
        })
    }

    /// Extends every branch until it holds `max_terms` terms, its residual is
    /// at or below `tol_tail`, or the recursion has nothing left to capture.
    pub fn extend_to(&mut self, max_terms: usize, tol_tail: f64) -> Result<()> {
        loop {
            let mut spawned = Vec::new();
            let mut progressed = false;
            let count = self.branches.len();
            for b in 0..count {
                let branch = &self.branches[b];
                if branch.exhausted
                    || branch.terms.len() >= max_terms
                    || branch.residual_norm_sq <= tol_tail
                {
                    continue;
                }
                let objective = HusimiObjective::pure(&FockVector::unnormalized(branch.residual.clone())?);
                let set = match maximize(&objective, &self.search) {
                    Ok(set) => set,
                    Err(Error::VanishedResidual(_)) => {
                        self.branches[b].exhausted = true;
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                if set.value < COEFF_FLOOR {
                    self.branches[b].exhausted = true;
                    continue;
                }
                if set.degeneracy == Degeneracy::Orbit {
                    self.orbit_sampled = true;
                }
                for (choice, &label) in set.maximizers.iter().enumerate().skip(1) {
                    if count + spawned.len() >= self.budget {
                        self.budget_exhausted = true;
                        break;
                    }
                    let mut child = self.branches[b].clone();
                    child.id.0.push(choice);
                    child.push(label);
                    spawned.push(child);
                }
                let branch = &mut self.branches[b];
                branch.id.0.push(0);
                branch.push(set.maximizers[0]);
                progressed = true;
            }
            self.branches.extend(spawned);
            self.branches.sort_by(|a, b| a.id.cmp(&b.id));
            if !progressed {
                return Ok(());
            }
        }
    }

    pub fn decompositions(&self) -> Vec<GreedyDecomposition> {
        self.branches.iter().map(Branch::decomposition).collect()
    }

    /// True when an orbit degeneracy was replaced by finitely many samples.
    pub fn orbit_sampled(&self) -> bool {
        self.orbit_sampled
    }

    /// True when degenerate choices were left unexplored for lack of budget.
    pub fn budget_exhausted(&self) -> bool {
        self.budget_exhausted
    }
}

/// Greedy coherent-state decomposition of a unit-norm state, one entry per
/// explored branch, sorted by branch id (canonical branch first).
pub fn greedy_decompose(
    state: &FockVector,
    max_terms: usize,
    tol_tail: f64,
    branch_budget: usize,
    search: &SearchConfig,
) -> Result<Vec<GreedyDecomposition>> {
    if max_terms == 0 {
        return Err(Error::InvalidParameter("max_terms must be at least 1".into()));
    }
    if !(tol_tail > 0.0) {
        return Err(Error::InvalidParameter("tol_tail must be positive".into()));
    }
    let mut run = GreedyRun::new(state, search, branch_budget)?;
    run.extend_to(max_terms, tol_tail)?;
    Ok(run.decompositions())
}

/// Amplitudes on signal mode x ancilla register. Column `j` is ancilla
/// sector `j`: `0` is the blank tag, `i >= 1` the tag of the `i`-th label.
#[derive(Clone, Debug, PartialEq)]
pub struct JointState {
    amps: DMatrix<C64>,
}

impl JointState {
    /// `state (x) |0>` on a register with `n_tags` tags plus the blank.
    pub fn product(state: &FockVector, n_tags: usize) -> Self {
        let mut amps = DMatrix::from_element(state.dim(), n_tags + 1, C64::new(0.0, 0.0));
        amps.set_column(0, state.amplitudes());
        Self { amps }
    }

    pub fn from_matrix(amps: DMatrix<C64>) -> Self {
        Self { amps }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.amps
    }

    pub fn sector(&self, j: usize) -> DVector<C64> {
        self.amps.column(j).into_owned()
    }

    pub fn sector_weight(&self, j: usize) -> f64 {
        self.amps.column(j).norm_squared()
    }

    pub fn n_tags(&self) -> usize {
        self.amps.ncols() - 1
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.norm_squared()
    }

    /// Flattened vector, ancilla-major: index `j * (n_max + 1) + n`.
    pub fn to_vector(&self) -> DVector<C64> {
        DVector::from_column_slice(self.amps.as_slice())
    }
}

/// `U = P (x) |b_i><0| + P (x) |0><b_i| + (1 - P (x) |0><0| - P (x) |b_i><b_i|)`
/// with `P` the projector onto the renormalized truncated `|alpha>`.
#[derive(Clone, Debug)]
pub struct CnotUnitary {
    coherent: DVector<C64>,
    tag: usize,
    n_tags: usize,
}

pub fn build_cnot_unitary(
    label: CoherentLabel,
    tag_index: usize,
    n_max: usize,
    n_tags: usize,
) -> Result<CnotUnitary> {
    if tag_index == 0 || tag_index > n_tags {
        return Err(Error::TagOutOfRange {
            index: tag_index,
            max: n_tags,
        });
    }
    let (coherent, _) = coherent_amplitudes(label.value(), n_max);
    Ok(CnotUnitary {
        coherent,
        tag: tag_index,
        n_tags,
    })
}

impl CnotUnitary {
    pub fn dim(&self) -> usize {
        self.coherent.len() * (self.n_tags + 1)
    }

    /// Sector-wise action; only sectors `0` and `tag` change.
    pub fn apply(&self, state: &mut JointState) {
        let d0 = state.amps.column(0).into_owned();
        let di = state.amps.column(self.tag).into_owned();
        let diff = &di - &d0;
        let shift = &self.coherent * self.coherent.dotc(&diff);
        state.amps.set_column(0, &(&d0 + &shift));
        state.amps.set_column(self.tag, &(&di - &shift));
    }

    /// Dense matrix in the ancilla-major basis of [`JointState::to_vector`],
    /// assembled term by term from the defining formula.
    pub fn to_matrix(&self) -> DMatrix<C64> {
        let zero = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let r = self.n_tags + 1;
        let p = &self.coherent * self.coherent.adjoint();
        let ket_bra = |a: usize, b: usize| {
            let mut m = DMatrix::from_element(r, r, zero);
            m[(a, b)] = one;
            m
        };
        let i = self.tag;
        let dim = self.dim();
        ket_bra(i, 0).kronecker(&p) + ket_bra(0, i).kronecker(&p)
            + (DMatrix::identity(dim, dim) - ket_bra(0, 0).kronecker(&p) - ket_bra(i, i).kronecker(&p))
    }

    /// `U rho U^dag` for a density on the joint space (ancilla-major indices).
    pub fn conjugate(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let left = self.apply_columns(rho);
        // U is Hermitian, so (U rho) U = (U (U rho)^dag)^dag
        self.apply_columns(&left.adjoint()).adjoint()
    }

    fn apply_columns(&self, m: &DMatrix<C64>) -> DMatrix<C64> {
        let d = self.coherent.len();
        let mut out = m.clone();
        for c in 0..m.ncols() {
            let col = m.column(c);
            let mut js = JointState {
                amps: DMatrix::from_column_slice(d, self.n_tags + 1, col.as_slice()),
            };
            self.apply(&mut js);
            out.set_column(c, &DVector::from_column_slice(js.amps.as_slice()));
        }
        out
    }
}

/// Applies `U_{alpha_N} ... U_{alpha_1}` to `state (x) |0>` and checks each
/// tagged sector against the recursion coefficients for the same labels.
pub fn gs_unitary_simulate(state: &FockVector, labels: &[CoherentLabel]) -> Result<JointState> {
    let n_tags = labels.len();
    let n_max = state.n_max();
    let mut joint = JointState::product(state, n_tags);
    for (i, &label) in labels.iter().enumerate() {
        build_cnot_unitary(label, i + 1, n_max, n_tags)?.apply(&mut joint);
    }

    let mut residual = state.amplitudes().clone();
    let mut worst: f64 = 0.0;
    for (i, &label) in labels.iter().enumerate() {
        let (v, _) = coherent_amplitudes(label.value(), n_max);
        let c = v.dotc(&residual);
        residual -= &v * c;
        let expected = &v * c;
        worst = worst.max(max_abs(&(joint.sector(i + 1) - expected)));
    }
    worst = worst.max(max_abs(&(joint.sector(0) - residual)));
    if worst > 1e-6 {
        return Err(Error::TruncationConsistency(worst));
    }
    Ok(joint)
}

/// Largest entry modulus.
pub fn max_abs<R: nalgebra::Dim, C: nalgebra::Dim, S: nalgebra::RawStorage<C64, R, C>>(
    m: &nalgebra::Matrix<C64, R, C, S>,
) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Probabilities `|c_i|^2 / captured_weight` in the tagged basis.
pub fn gs_project(decomp: &GreedyDecomposition) -> Result<Vec<f64>> {
    if !(decomp.captured_weight > 0.0) {
        return Err(Error::ZeroCapturedWeight);
    }
    Ok(decomp
        .terms
        .iter()
        .map(|t| t.coeff.norm_sqr() / decomp.captured_weight)
        .collect())
}

/// Output of the Gram-Schmidt map applied to the trivial extension of a density.
#[derive(Clone, Debug)]
pub struct MappedDensity {
    /// Normalized projected density in the tagged basis `{|alpha_i>|b_i>}`.
    pub tagged: DMatrix<C64>,
    pub labels: Vec<CoherentLabel>,
    /// Trace of the projected joint density before renormalization.
    pub projected_trace: f64,
    /// Set for mixed inputs: the trivial extension only bounds the infimum
    /// over extensions from above.
    pub upper_bound: bool,
}

impl MappedDensity {
    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.tagged.nrows()).map(|i| self.tagged[(i, i)].re).collect()
    }

    pub fn coherence(&self, measure: Measure) -> Result<f64> {
        measure.of_density(&self.tagged)
    }
}

/// Gram-Schmidt map of `rho (x) |0><0|` with canonical maximizer choices.
pub fn gs_map_density(rho: &FockDensity, n_terms: usize, search: &SearchConfig) -> Result<MappedDensity> {
    if n_terms == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    let d = rho.n_max() + 1;
    let r = n_terms + 1;
    let mut joint = DMatrix::from_element(d * r, d * r, C64::new(0.0, 0.0));
    joint.view_mut((0, 0), (d, d)).copy_from(rho.matrix());

    let mut labels = Vec::new();
    for i in 1..=n_terms {
        let block = joint.view((0, 0), (d, d)).into_owned();
        let objective = HusimiObjective::density(&block);
        let set = match maximize(&objective, search) {
            Ok(set) => set,
            Err(Error::VanishedResidual(_)) => break,
            Err(e) => return Err(e),
        };
        if set.value < COEFF_FLOOR {
            break;
        }
        let label = set.canonical();
        joint = build_cnot_unitary(label, i, rho.n_max(), n_terms)?.conjugate(&joint);
        labels.push(label);
    }

    let vecs: Vec<DVector<C64>> = labels
        .iter()
        .map(|l| coherent_amplitudes(l.value(), rho.n_max()).0)
        .collect();
    let n = labels.len();
    let mut tagged = DMatrix::from_fn(n, n, |i, j| {
        let block = joint.view(((i + 1) * d, (j + 1) * d), (d, d));
        vecs[i].dotc(&(block * &vecs[j]))
    });
    let trace = tagged.trace().re;
    if !(trace > 1e-12) {
        return Err(Error::TraceCollapse(trace));
    }
    tagged /= C64::from(trace);
    let eig = rho.matrix().symmetric_eigenvalues();
    let rank = eig.iter().filter(|&&x| x > 1e-10).count();
    Ok(MappedDensity {
        tagged,
        labels,
        projected_trace: trace,
        upper_bound: rank > 1,
    })
}

/// Explicit zero-coherence witness for a finite mixture of coherent states.
#[derive(Clone, Debug)]
pub struct ClassicalCertificate {
    pub value: f64,
    pub weights: Vec<f64>,
    pub labels: Vec<CoherentLabel>,
    /// Extension `sum_j w_j |a_j><a_j| (x) |t_j><t_j|` in the tagged basis.
    pub tagged: DMatrix<C64>,
    pub max_off_diagonal: f64,
}

pub fn classical_certificate(
    mixture: &[(f64, CoherentLabel)],
    n_max: usize,
) -> Result<ClassicalCertificate> {
    if mixture.is_empty() {
        return Err(Error::InvalidWeights("empty mixture".into()));
    }
    if mixture.iter().any(|(w, _)| !(*w > 0.0)) {
        return Err(Error::InvalidWeights("weights must be positive".into()));
    }
    let total: f64 = mixture.iter().map(|(w, _)| w).sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidWeights(format!("weights sum to {total}")));
    }
    let d = n_max + 1;
    let m = mixture.len();
    let vecs: Vec<DVector<C64>> = mixture
        .iter()
        .map(|(_, l)| coherent_amplitudes(l.value(), n_max).0)
        .collect();

    let mut extension = DMatrix::from_element(d * m, d * m, C64::new(0.0, 0.0));
    for (j, (w, _)) in mixture.iter().enumerate() {
        let block = &vecs[j] * vecs[j].adjoint() * C64::from(*w);
        extension.view_mut((j * d, j * d), (d, d)).copy_from(&block);
    }
    let basis: Vec<DVector<C64>> = (0..m)
        .map(|j| {
            let mut e = DVector::from_element(d * m, C64::new(0.0, 0.0));
            e.rows_mut(j * d, d).copy_from(&vecs[j]);
            e
        })
        .collect();
    let tagged = DMatrix::from_fn(m, m, |i, j| basis[i].dotc(&(&extension * &basis[j])));
    let mut max_off: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            if i != j {
                max_off = max_off.max(tagged[(i, j)].norm());
            }
        }
    }
    if max_off > 1e-10 {
        return Err(Error::InvalidDensity(format!("extension not diagonal ({max_off:.3e})")));
    }
    let value = rel_entropy_coherence(&tagged)?;
    Ok(ClassicalCertificate {
        value,
        weights: mixture.iter().map(|(w, _)| *w).collect(),
        labels: mixture.iter().map(|(_, l)| *l).collect(),
        tagged,
        max_off_diagonal: max_off,
    })
}
