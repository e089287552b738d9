//! The alpha-coherence: coherence of the Gram-Schmidt-mapped state in the
//! limit of many greedy terms, with degenerate branches minimized over.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{cat_state, fock_state, mean_photon, squeezed_vacuum, CoherentLabel, FockVector, Parity, Truncation};
use crate::gram_schmidt::{gs_project, GreedyDecomposition, GreedyRun};
use crate::husimi::SearchConfig;
use crate::measures::Measure;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConvergenceSchedule {
    /// Term counts tried in order; convergence compares consecutive entries.
    pub n_schedule: Vec<usize>,
    pub tol_tail: f64,
    pub tol_conv: f64,
    pub branch_budget: usize,
    /// Residual weight at which the greedy recursion itself stops.
    pub greedy_floor: f64,
}

impl Default for ConvergenceSchedule {
    fn default() -> Self {
        Self {
            n_schedule: vec![2, 4, 8, 16, 32, 64],
            tol_tail: 1e-4,
            tol_conv: 1e-3,
            branch_budget: 8,
            greedy_floor: 1e-12,
        }
    }
}

impl ConvergenceSchedule {
    pub fn validate(&self) -> Result<()> {
        if self.n_schedule.is_empty() || self.n_schedule.contains(&0) {
            return Err(Error::InvalidParameter("n_schedule must be nonempty and positive".into()));
        }
        if self.n_schedule.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("n_schedule must be increasing".into()));
        }
        for (name, v) in [("tol_tail", self.tol_tail), ("tol_conv", self.tol_conv), ("greedy_floor", self.greedy_floor)] {
            if !(v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive")));
            }
        }
        if self.branch_budget == 0 {
            return Err(Error::InvalidParameter("branch_budget must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Converged,
    NotConverged,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchValue {
    pub branch_id: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoherenceReport {
    /// Minimum over explored branches, in nats for the relative entropy.
    pub value: f64,
    pub measure: Measure,
    pub n_used: usize,
    /// Residual weight left outside the tagged subspace (the realized epsilon).
    pub residual_tail: f64,
    pub branch_values: Vec<BranchValue>,
    /// Value on the canonical branch alone.
    pub canonical_value: f64,
    /// Probability vector of the winning branch in the tagged basis.
    pub probabilities: Vec<f64>,
    pub winning_branch: String,
    pub upper_bound: bool,
    pub status: Status,
}

/// Report plus the decompositions it was computed from (prefixes at `n_used`).
#[derive(Clone, Debug)]
pub struct CoherenceRun {
    pub report: CoherenceReport,
    pub decompositions: Vec<GreedyDecomposition>,
}

impl CoherenceRun {
    /// Branch minimum of another measure at the same depth.
    pub fn value_for(&self, measure: Measure) -> Result<f64> {
        let mut best = f64::INFINITY;
        for d in &self.decompositions {
            best = best.min(measure.of_probabilities(&gs_project(d)?));
        }
        Ok(best)
    }
}

pub fn alpha_coherence(
    state: &FockVector,
    measure: Measure,
    schedule: &ConvergenceSchedule,
    search: &SearchConfig,
) -> Result<CoherenceReport> {
    Ok(alpha_coherence_run(state, measure, schedule, search)?.report)
}

pub fn alpha_coherence_run(
    state: &FockVector,
    measure: Measure,
    schedule: &ConvergenceSchedule,
    search: &SearchConfig,
) -> Result<CoherenceRun> {
    schedule.validate()?;
    let mut run = GreedyRun::new(state, search, schedule.branch_budget)?;
    let mut previous: Option<f64> = None;
    let mut last = None;
    for &n in &schedule.n_schedule {
        run.extend_to(n, schedule.greedy_floor)?;
        let decompositions: Vec<GreedyDecomposition> =
            run.decompositions().iter().map(|d| d.prefix(n)).collect();
        let (report, value) = summarize(&decompositions, measure, n, &run)?;
        let converged = previous
            .map(|p| report.residual_tail <= schedule.tol_tail && (value - p).abs() <= schedule.tol_conv)
            .unwrap_or(false);
        if converged {
            return Ok(CoherenceRun {
                report: CoherenceReport {
                    status: Status::Converged,
                    ..report
                },
                decompositions,
            });
        }
        previous = Some(value);
        last = Some(CoherenceRun {
            report,
            decompositions,
        });
    }
    Ok(last.expect("schedule is nonempty"))
}

fn summarize(
    decompositions: &[GreedyDecomposition],
    measure: Measure,
    n: usize,
    run: &GreedyRun,
) -> Result<(CoherenceReport, f64)> {
    let mut branch_values = Vec::with_capacity(decompositions.len());
    let mut best: Option<(usize, f64, Vec<f64>)> = None;
    for (k, d) in decompositions.iter().enumerate() {
        let p = gs_project(d)?;
        let v = measure.of_probabilities(&p);
        branch_values.push(BranchValue {
            branch_id: d.branch_id.to_string(),
            value: v,
        });
        if best.as_ref().is_none_or(|b| v < b.1) {
            best = Some((k, v, p));
        }
    }
    let (k, value, probabilities) = best.ok_or(Error::ZeroCapturedWeight)?;
    let canonical_value = branch_values[0].value;
    let winner = &decompositions[k];
    Ok((
        CoherenceReport {
            value,
            measure,
            n_used: n,
            residual_tail: winner.residual_norm_sq,
            branch_values,
            canonical_value,
            probabilities,
            winning_branch: winner.branch_id.to_string(),
            upper_bound: run.orbit_sampled() || run.budget_exhausted(),
            status: Status::NotConverged,
        },
        value,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    CatEven,
    CatOdd,
    Fock,
    Squeezed,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::CatEven => "cat-even",
            Family::CatOdd => "cat-odd",
            Family::Fock => "fock",
            Family::Squeezed => "squeezed",
        }
    }

    /// Family member at `param` (cat amplitude, photon number, or squeezing r).
    pub fn state(self, param: f64, trunc: &Truncation) -> Result<FockVector> {
        match self {
            Family::CatEven => cat_state(CoherentLabel::new(param, 0.0)?, Parity::Even, trunc),
            Family::CatOdd => cat_state(CoherentLabel::new(param, 0.0)?, Parity::Odd, trunc),
            Family::Fock => {
                let n = param.round();
                if (param - n).abs() > 1e-9 || n < 0.0 {
                    return Err(Error::InvalidParameter(format!("Fock photon number {param}")));
                }
                fock_state(n as usize, trunc.n_max)
            }
            Family::Squeezed => squeezed_vacuum(param, 0.0, trunc),
        }
    }

    /// Parameter whose state has mean photon number `target`, within `tol`.
    pub fn match_mean_photon(self, target: f64, tol: f64, trunc: &Truncation) -> Result<f64> {
        if !(target > 0.0) {
            return Err(Error::InvalidParameter(format!("target mean photon {target}")));
        }
        if self == Family::Fock {
            let n = target.round();
            if (target - n).abs() > tol {
                return Err(Error::InvalidParameter(format!("no Fock state has <n> = {target}")));
            }
            return Ok(n);
        }
        // odd cats have <n> = 1 + alpha^4/3 + ... > 1; inside the tolerance band
        // above 1 aim for its midpoint instead of the unreachable target
        let aim = if self == Family::CatOdd {
            if target < 1.0 - tol {
                return Err(Error::InvalidParameter("odd cats have <n> > 1 for alpha > 0".into()));
            }
            target.max(1.0 + 0.5 * tol)
        } else {
            target
        };
        // bracketing may probe parameters the strict truncation rejects; only
        // the final parameter has to pass it
        let loose = Truncation { strict: false, ..*trunc };
        let f = |x: f64| -> Result<f64> { Ok(mean_photon(&self.state(x, &loose)?) - aim) };
        let (mut lo, mut hi) = (1e-6, target.sqrt() + 2.0);
        if f(lo)? > 0.0 || f(hi)? < 0.0 {
            return Err(Error::InvalidParameter(format!("cannot bracket <n> = {target}")));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid)? < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-13 {
                break;
            }
        }
        let x = 0.5 * (lo + hi);
        let err = (mean_photon(&self.state(x, trunc)?) - target).abs();
        if err > tol {
            return Err(Error::InvalidParameter(format!("matched <n> off by {err:.3e}")));
        }
        Ok(x)
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cat-even" | "cat_even" => Ok(Family::CatEven),
            "cat-odd" | "cat_odd" => Ok(Family::CatOdd),
            "fock" => Ok(Family::Fock),
            "squeezed" => Ok(Family::Squeezed),
            _ => Err(Error::Parse(format!("unknown family '{s}'"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CurveRow {
    pub family: Family,
    pub param: f64,
    pub mean_photon: f64,
    /// Report for the measure that drove convergence.
    pub report: CoherenceReport,
    /// Both measures at the converged depth, each minimized over branches.
    pub c_rel: f64,
    pub c_l1: f64,
}

/// One row per parameter, evaluated in parallel; row order follows `params`.
pub fn coherence_curve(
    family: Family,
    params: &[f64],
    measure: Measure,
    trunc: &Truncation,
    schedule: &ConvergenceSchedule,
    search: &SearchConfig,
) -> Result<Vec<CurveRow>> {
    params
        .par_iter()
        .map(|&param| {
            let state = family.state(param, trunc)?;
            let run = alpha_coherence_run(&state, measure, schedule, search)?;
            let c_rel = run.value_for(Measure::RelEntropy)?;
            let c_l1 = run.value_for(Measure::L1)?;
            Ok(CurveRow {
                family,
                param,
                mean_photon: mean_photon(&state),
                report: run.report,
                c_rel,
                c_l1,
            })
        })
        .collect()
}

/// `steps` evenly spaced points on `[min, max]`; a single step yields `min`.
pub fn linspace(min: f64, max: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![min],
        _ => (0..steps)
            .map(|i| min + (max - min) * i as f64 / (steps - 1) as f64)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::coherent_vector;
    use std::f64::consts::LN_2;

    fn defaults() -> (Truncation, ConvergenceSchedule, SearchConfig) {
        (Truncation::new(60), ConvergenceSchedule::default(), SearchConfig::default())
    }

    #[test]
    fn coherent_state_has_zero_coherence() {
        let (t, sched, search) = defaults();
        let b = coherent_vector(CoherentLabel::new(1.3, 0.0).unwrap(), &t).unwrap();
        let r = alpha_coherence(&b, Measure::RelEntropy, &sched, &search).unwrap();
        assert!(r.value <= 1e-6);
        assert_eq!(r.status, Status::Converged);
    }

    #[test]
    fn large_cat_reaches_log_two() {
        let (t, sched, search) = defaults();
        let cat = Family::CatEven.state(3.0, &t).unwrap();
        let r = alpha_coherence(&cat, Measure::RelEntropy, &sched, &search).unwrap();
        assert!((r.value - LN_2).abs() < 0.05, "{}", r.value);
        assert!(r.value <= (r.n_used as f64).ln() + 1e-12);
    }

    #[test]
    fn small_even_cat_vanishes() {
        let (t, sched, search) = defaults();
        let cat = Family::CatEven.state(0.01, &t).unwrap();
        let r = alpha_coherence(&cat, Measure::RelEntropy, &sched, &search).unwrap();
        assert!(r.value <= 0.05);
    }

    #[test]
    fn report_invariants() {
        let (t, sched, search) = defaults();
        let s = Family::Fock.state(1.0, &t).unwrap();
        let r = alpha_coherence(&s, Measure::RelEntropy, &sched, &search).unwrap();
        let min = r.branch_values.iter().map(|b| b.value).fold(f64::INFINITY, f64::min);
        assert_eq!(r.value, min);
        assert!(r.value >= 0.0);
        assert!(r.value <= (r.n_used as f64).ln());
        assert!(r.upper_bound, "Fock orbit must be flagged");
        assert!((r.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn non_convergence_is_reported() {
        let (t, _, search) = defaults();
        let sched = ConvergenceSchedule {
            n_schedule: vec![1, 2],
            ..ConvergenceSchedule::default()
        };
        let s = Family::Fock.state(2.0, &t).unwrap();
        let r = alpha_coherence(&s, Measure::RelEntropy, &sched, &search).unwrap();
        assert_eq!(r.status, Status::NotConverged);
        assert_eq!(r.n_used, 2);
    }

    #[test]
    fn schedule_validation() {
        let bad = ConvergenceSchedule {
            n_schedule: vec![4, 2],
            ..ConvergenceSchedule::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn mean_photon_matching() {
        let t = Truncation::new(60);
        let a = Family::CatEven.match_mean_photon(2.0, 1e-3, &t).unwrap();
        assert!((mean_photon(&Family::CatEven.state(a, &t).unwrap()) - 2.0).abs() < 1e-3);
        let r = Family::Squeezed.match_mean_photon(1.0, 1e-3, &t).unwrap();
        assert!((r - 1f64.asinh()).abs() < 1e-6);
        assert!(Family::CatOdd.match_mean_photon(0.9, 1e-3, &t).is_err());
        let a = Family::CatOdd.match_mean_photon(1.0, 1e-3, &t).unwrap();
        assert!((mean_photon(&Family::CatOdd.state(a, &t).unwrap()) - 1.0).abs() <= 1e-3);
        assert_eq!(Family::Fock.match_mean_photon(3.0, 1e-3, &t).unwrap(), 3.0);
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(3.0, 3.0, 1), vec![3.0]);
        let v = linspace(0.1, 3.0, 30);
        assert_eq!(v.len(), 30);
        assert!((v[29] - 3.0).abs() < 1e-15);
    }
}
