//! Global maximization of the coherent-state overlap `|<alpha|psi>|^2`.
//!
//! The search runs a coarse grid over a disk around the origin, refines every
//! promising grid peak with a simplex descent, then clusters the refined
//! points to decide whether the maximum is unique, a handful of discrete
//! points, or a continuous orbit (as for Fock states).

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{CoherentLabel, FockVector};
use crate::simplex::{self, SimplexOptions};

/// Upper bound on grid peaks handed to the refiner.
const MAX_SEEDS: usize = 32;
/// Grid peaks below this fraction of the grid maximum are not refined.
const SEED_FRACTION: f64 = 0.5;
/// Relative radius spread allowed for an orbit-type degeneracy.
const ORBIT_RADIUS_TOL: f64 = 1e-3;
const VALUE_FLOOR: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub grid_points: usize,
    pub margin: f64,
    pub refine_iters: usize,
    pub refine_tol: f64,
    pub tol_deg: f64,
    pub tol_cluster: f64,
    pub k_orbit: usize,
    /// States with squared norm at or below this are treated as vanished.
    pub tol_residual: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            grid_points: 121,
            margin: 3.0,
            refine_iters: 200,
            refine_tol: 1e-10,
            tol_deg: 1e-6,
            tol_cluster: 1e-4,
            k_orbit: 8,
            tol_residual: 1e-14,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("margin", self.margin),
            ("refine_tol", self.refine_tol),
            ("tol_deg", self.tol_deg),
            ("tol_cluster", self.tol_cluster),
            ("tol_residual", self.tol_residual),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be positive")));
            }
        }
        if self.grid_points < 3 || self.k_orbit < 2 || self.refine_iters == 0 {
            return Err(Error::InvalidParameter(
                "grid_points >= 3, k_orbit >= 2, refine_iters >= 1 required".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Degeneracy {
    Unique,
    Discrete,
    Orbit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaximizerSet {
    /// Sorted lexicographically by `(Re, Im)`; the first entry is canonical.
    pub maximizers: Vec<CoherentLabel>,
    pub values: Vec<f64>,
    pub value: f64,
    pub degeneracy: Degeneracy,
    pub search_radius: f64,
    /// Best value seen on the coarse grid.
    pub grid_value: f64,
}

impl MaximizerSet {
    pub fn canonical(&self) -> CoherentLabel {
        self.maximizers[0]
    }
}

/// `sum_k w_k |<alpha|v_k>|^2` with `|alpha>` the renormalized truncated
/// coherent vector.
#[derive(Clone, Debug)]
pub struct HusimiObjective {
    components: Vec<(f64, DVector<C64>)>,
    inv_sqrt: Vec<f64>,
    weight: f64,
    mean_photon: f64,
}

impl HusimiObjective {
    pub fn pure(state: &FockVector) -> Self {
        Self::from_components(vec![(1.0, state.amplitudes().clone())])
    }

    /// Objective `<alpha|rho|alpha>` for a Hermitian PSD block (possibly with
    /// trace below one).
    pub fn density(block: &DMatrix<C64>) -> Self {
        let h = (block + block.adjoint()) * C64::from(0.5);
        let eig = h.symmetric_eigen();
        let scale = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
        let mut components = Vec::new();
        for (k, &lam) in eig.eigenvalues.iter().enumerate() {
            if lam > 1e-14 * scale.max(1e-300) {
                components.push((lam, eig.eigenvectors.column(k).into_owned()));
            }
        }
        if components.is_empty() {
            components.push((0.0, DVector::zeros(block.nrows())));
        }
        Self::from_components(components)
    }

    fn from_components(components: Vec<(f64, DVector<C64>)>) -> Self {
        let dim = components[0].1.len();
        let inv_sqrt = (0..dim)
            .map(|n| if n == 0 { 1.0 } else { 1.0 / (n as f64).sqrt() })
            .collect();
        let mut weight = 0.0;
        let mut photons = 0.0;
        for (w, v) in &components {
            for (n, c) in v.iter().enumerate() {
                let p = w * c.norm_sqr();
                weight += p;
                photons += n as f64 * p;
            }
        }
        let mean_photon = if weight > 0.0 { photons / weight } else { 0.0 };
        Self {
            components,
            inv_sqrt,
            weight,
            mean_photon,
        }
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn mean_photon(&self) -> f64 {
        self.mean_photon
    }

    pub fn value(&self, alpha: C64) -> f64 {
        let half = (-0.5 * alpha.norm_sqr()).exp();
        let mut total = 0.0;
        let mut kept = 0.0;
        for (k, (w, v)) in self.components.iter().enumerate() {
            let mut a = C64::new(half, 0.0);
            let mut dot = C64::new(0.0, 0.0);
            for (n, c) in v.iter().enumerate() {
                if n > 0 {
                    a *= alpha * self.inv_sqrt[n];
                }
                dot += a.conj() * c;
                if k == 0 {
                    kept += a.norm_sqr();
                }
            }
            total += w * dot.norm_sqr();
        }
        total / kept
    }
}

/// `|<alpha|psi>|^2`.
pub fn husimi(state: &FockVector, alpha: CoherentLabel) -> f64 {
    HusimiObjective::pure(state).value(alpha.value())
}

pub fn maximize_overlap(state: &FockVector, config: &SearchConfig) -> Result<MaximizerSet> {
    maximize(&HusimiObjective::pure(state), config)
}

pub fn maximize(objective: &HusimiObjective, config: &SearchConfig) -> Result<MaximizerSet> {
    config.validate()?;
    if objective.weight() <= config.tol_residual {
        return Err(Error::VanishedResidual(objective.weight()));
    }
    let radius = objective.mean_photon().sqrt() + config.margin;
    let g = config.grid_points;
    let spacing = 2.0 * radius / (g - 1) as f64;
    let coord = |i: usize| -radius + spacing * i as f64;

    let grid: Vec<f64> = (0..g * g)
        .into_par_iter()
        .map(|k| objective.value(C64::new(coord(k / g), coord(k % g))))
        .collect();

    let grid_value = grid.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(grid_value > VALUE_FLOOR) {
        return Err(Error::NoMaximizer);
    }

    let mut seeds: Vec<(usize, f64)> = (0..g * g)
        .filter(|&k| grid[k] >= SEED_FRACTION * grid_value && is_local_max(&grid, g, k))
        .map(|k| (k, grid[k]))
        .collect();
    seeds.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    seeds.truncate(MAX_SEEDS);

    let opts = SimplexOptions {
        max_iters: config.refine_iters,
        f_tol: config.refine_tol * grid_value,
        x_tol: 1e-3 * config.tol_cluster,
    };
    let refined: Vec<(C64, f64)> = seeds
        .par_iter()
        .map(|&(k, v)| {
            let x0 = [coord(k / g), coord(k % g)];
            let r = simplex::minimize(
                |x| -objective.value(C64::new(x[0], x[1])),
                x0,
                0.5 * spacing,
                &opts,
            );
            if -r.f >= v {
                (C64::new(r.x[0], r.x[1]), -r.f)
            } else {
                (C64::new(x0[0], x0[1]), v)
            }
        })
        .collect();

    let best = refined.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    if !(best > VALUE_FLOOR) {
        return Err(Error::NoMaximizer);
    }

    let mut near_best: Vec<(C64, f64)> = refined
        .into_iter()
        .filter(|p| p.1 >= best * (1.0 - config.tol_deg))
        .collect();
    near_best.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| lex(a.0, b.0)));
    let mut clusters: Vec<(C64, f64)> = Vec::new();
    for (z, v) in near_best {
        if clusters.iter().all(|c| (c.0 - z).norm() > config.tol_cluster) {
            clusters.push((z, v));
        }
    }
    clusters.sort_by(|a, b| lex(a.0, b.0));

    let (degeneracy, points) = classify(objective, clusters, config);
    let (maximizers, values) = points
        .into_iter()
        .map(|(z, v)| (CoherentLabel::from_complex(z).expect("finite"), v))
        .unzip();
    Ok(MaximizerSet {
        maximizers,
        values,
        value: best,
        degeneracy,
        search_radius: radius,
        grid_value,
    })
}

fn classify(
    objective: &HusimiObjective,
    clusters: Vec<(C64, f64)>,
    config: &SearchConfig,
) -> (Degeneracy, Vec<(C64, f64)>) {
    match clusters.len() {
        1 => return (Degeneracy::Unique, clusters),
        n if n < config.k_orbit => return (Degeneracy::Discrete, clusters),
        _ => {}
    }
    let n = clusters.len() as f64;
    let Some(center) = circle_center(&clusters) else {
        return (Degeneracy::Discrete, clusters);
    };
    let radii: Vec<f64> = clusters.iter().map(|c| (c.0 - center).norm()).collect();
    let r_mean = radii.iter().sum::<f64>() / n;
    let r_spread = radii.iter().cloned().fold(0.0, f64::max)
        - radii.iter().cloned().fold(f64::INFINITY, f64::min);
    if r_mean <= config.tol_cluster || r_spread > ORBIT_RADIUS_TOL * r_mean {
        return (Degeneracy::Discrete, clusters);
    }
    // representatives: k_orbit evenly spaced points, anchored at the
    // lexicographically smallest maximizer found
    let theta0 = (clusters[0].0 - center).arg();
    let k = config.k_orbit;
    let mut reps: Vec<(C64, f64)> = (0..k)
        .map(|j| {
            let theta = theta0 + 2.0 * std::f64::consts::PI * j as f64 / k as f64;
            let z = center + C64::from_polar(r_mean, theta);
            (z, objective.value(z))
        })
        .collect();
    reps.sort_by(|a, b| lex(a.0, b.0));
    (Degeneracy::Orbit, reps)
}

/// Algebraic least-squares circle fit: minimizes
/// `sum (|z|^2 - 2 Re(conj(c) z) - k)^2` over the center `c` and offset `k`.
fn circle_center(points: &[(C64, f64)]) -> Option<C64> {
    let mut a = nalgebra::Matrix3::<f64>::zeros();
    let mut b = nalgebra::Vector3::<f64>::zeros();
    for (z, _) in points {
        let row = nalgebra::Vector3::new(2.0 * z.re, 2.0 * z.im, 1.0);
        a += row * row.transpose();
        b += row * z.norm_sqr();
    }
    let sol = a.lu().solve(&b)?;
    Some(C64::new(sol[0], sol[1]))
}

fn lex(a: C64, b: C64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn is_local_max(grid: &[f64], g: usize, k: usize) -> bool {
    let (i, j) = ((k / g) as isize, (k % g) as isize);
    let v = grid[k];
    for di in -1..=1isize {
        for dj in -1..=1isize {
            if di == 0 && dj == 0 {
                continue;
            }
            let (ni, nj) = (i + di, j + dj);
            if ni < 0 || nj < 0 || ni >= g as isize || nj >= g as isize {
                continue;
            }
            if grid[ni as usize * g + nj as usize] > v {
                return false;
            }
        }
    }
    true
}
