//! Self-check suites: oracle cross-checks and property sweeps that can be run
//! from the command line against a given configuration.

use std::f64::consts::{LN_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::alpha::alpha_coherence;
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::fock::{
    apply_displacement, cat_state, fock_state, squeezed_vacuum, CoherentLabel, FockVector, Parity, Truncation,
};
use crate::gram_schmidt::{build_cnot_unitary, greedy_decompose, gs_unitary_simulate, max_abs};
use crate::measures::{l1_coherence, rel_entropy_coherence, shannon_entropy, Measure};
use crate::pdist::{
    mix, negativity, negativity_on, transform_beamsplitter, transform_displace, transform_phase, PDensity,
};

pub const SUITES: [&str; 8] = [
    "gs-oracle",
    "unitarity",
    "measures",
    "linear-optics",
    "p-monotone",
    "p-convexity",
    "p-invariance",
    "p-quadrature",
];

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub delta: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    fn new(suite: &'static str, name: impl Into<String>, delta: f64, tol: f64) -> Self {
        Self {
            suite,
            name: name.into(),
            delta,
            tol,
            pass: delta <= tol,
        }
    }
}

/// Fixed listed amplitudes on `|0..4>` used as generic test vectors.
pub const LISTED_VECTORS: [[(f64, f64); 5]; 3] = [
    [(0.5, 0.1), (0.3, -0.4), (-0.2, 0.35), (0.4, 0.2), (0.1, -0.3)],
    [(0.7, 0.0), (0.0, 0.5), (-0.3, 0.0), (0.0, -0.2), (0.35, 0.1)],
    [(0.2, 0.2), (-0.6, 0.1), (0.1, 0.5), (0.3, -0.3), (0.0, 0.25)],
];

fn listed(amps: &[(f64, f64)], n_max: usize) -> Result<FockVector> {
    let mut v = vec![C64::new(0.0, 0.0); n_max + 1];
    for (k, &(re, im)) in amps.iter().enumerate() {
        v[k] = C64::new(re, im);
    }
    FockVector::new(v)
}

/// Ten states: three cats, Fock 1-3, squeezed vacuum at `r = 0.5` and the
/// three listed vectors.
pub fn oracle_states(trunc: &Truncation) -> Result<Vec<(String, FockVector)>> {
    let l = |a: f64| CoherentLabel::from(a);
    let mut out = vec![
        ("cat-even:1.5".to_string(), cat_state(l(1.5), Parity::Even, trunc)?),
        ("cat-odd:1".to_string(), cat_state(l(1.0), Parity::Odd, trunc)?),
        ("cat-even:3".to_string(), cat_state(l(3.0), Parity::Even, trunc)?),
    ];
    for n in 1..=3 {
        out.push((format!("fock:{n}"), fock_state(n, trunc.n_max)?));
    }
    out.push(("squeezed:0.5,0".to_string(), squeezed_vacuum(0.5, 0.0, trunc)?));
    for (k, amps) in LISTED_VECTORS.iter().enumerate() {
        out.push((format!("listed:{k}"), listed(amps, trunc.n_max)?));
    }
    Ok(out)
}

pub fn run_suite(suite: &str, cfg: &RunConfig) -> Result<Vec<Check>> {
    match suite {
        "all" => {
            let mut all = Vec::new();
            for s in SUITES {
                all.extend(run_suite(s, cfg)?);
            }
            Ok(all)
        }
        "gs-oracle" => gs_oracle(cfg),
        "unitarity" => unitarity(cfg),
        "measures" => measures(),
        "linear-optics" => linear_optics(cfg),
        "p-monotone" => p_monotone(cfg),
        "p-convexity" => p_convexity(cfg),
        "p-invariance" => p_invariance(cfg),
        "p-quadrature" => p_quadrature(cfg),
        _ => Err(Error::Parse(format!("unknown suite '{suite}'; known: all, {}", SUITES.join(", ")))),
    }
}

const ORACLE_DEPTH: usize = 8;

/// Greedy coefficients vs tagged-sector weights of the explicit unitary product.
fn gs_oracle(cfg: &RunConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (name, state) in oracle_states(&cfg.truncation())? {
        let d = greedy_decompose(&state, ORACLE_DEPTH, cfg.schedule.greedy_floor, 1, &cfg.search)?;
        let canonical = &d[0];
        let joint = gs_unitary_simulate(&state, &canonical.labels())?;
        let mut dev: f64 = 0.0;
        for (i, t) in canonical.terms.iter().enumerate() {
            dev = dev.max((joint.sector_weight(i + 1) - t.coeff.norm_sqr()).abs());
        }
        dev = dev.max((joint.sector_weight(0) - canonical.residual_norm_sq).abs());
        out.push(Check::new("gs-oracle", name, dev, 1e-6));
    }
    Ok(out)
}

fn unitarity(cfg: &RunConfig) -> Result<Vec<Check>> {
    let trunc = Truncation {
        n_max: cfg.n_max.min(30),
        ..cfg.truncation()
    };
    let mut out = Vec::new();
    for (name, state) in oracle_states(&trunc)?.into_iter().take(4) {
        let d = greedy_decompose(&state, 4, cfg.schedule.greedy_floor, 1, &cfg.search)?;
        let labels = d[0].labels();
        let mut dev: f64 = 0.0;
        for (i, &l) in labels.iter().enumerate() {
            let u = build_cnot_unitary(l, i + 1, trunc.n_max, labels.len())?.to_matrix();
            let dim = u.nrows();
            dev = dev.max(max_abs(&(u.adjoint() * &u - DMatrix::identity(dim, dim))));
        }
        out.push(Check::new("unitarity", name, dev, 1e-8));
    }
    Ok(out)
}

fn measures() -> Result<Vec<Check>> {
    let c = |re: f64| C64::new(re, 0.0);
    let plus = DMatrix::from_element(2, 2, c(0.5));
    let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.3), c(0.7)]));
    Ok(vec![
        Check::new("measures", "H(1/2, 1/2) = log 2", (shannon_entropy(&[0.5, 0.5]) - LN_2).abs(), 1e-12),
        Check::new("measures", "rel entropy of |+> = log 2", (rel_entropy_coherence(&plus)? - LN_2).abs(), 1e-10),
        Check::new("measures", "l1 of |+> = 1", (l1_coherence(&plus)? - 1.0).abs(), 1e-12),
        Check::new("measures", "rel entropy of diagonal = 0", rel_entropy_coherence(&diag)?, 0.0),
        Check::new("measures", "l1 of diagonal = 0", l1_coherence(&diag)?, 0.0),
        Check::new("measures", "H(delta) = 0", shannon_entropy(&[1.0, 0.0, 0.0]), 0.0),
    ])
}

fn linear_optics(cfg: &RunConfig) -> Result<Vec<Check>> {
    let trunc = cfg.truncation();
    let mut out = Vec::new();
    let picks = ["cat-even:1.5", "fock:1", "listed:0"];
    for (name, state) in oracle_states(&trunc)?.into_iter().filter(|(n, _)| picks.contains(&n.as_str())) {
        let base = alpha_coherence(&state, Measure::RelEntropy, &cfg.schedule, &cfg.search)?.value;
        let moved = apply_displacement(&state.rotate_phase(PI / 4.0), CoherentLabel::new(0.5, 0.0)?, &trunc)?;
        let v = alpha_coherence(&moved, Measure::RelEntropy, &cfg.schedule, &cfg.search)?.value;
        out.push(Check::new("linear-optics", format!("{name} under D(0.5) R(pi/4)"), (v - base).abs(), 2e-3));
    }
    Ok(out)
}

fn nonclassical_builtins(cfg: &RunConfig) -> Result<Vec<(String, PDensity)>> {
    [0.5, 1.0]
        .iter()
        .map(|&n| Ok((format!("pat:{n}"), PDensity::photon_added_thermal(n)?.with_window(cfg.quadrature)?)))
        .collect()
}

fn p_monotone(cfg: &RunConfig) -> Result<Vec<Check>> {
    let anc = PDensity::thermal(0.2)?.with_window(cfg.quadrature)?;
    let mut out = Vec::new();
    for (name, p) in nonclassical_builtins(cfg)? {
        let base = negativity(&p)?.value;
        let mut worst = f64::NEG_INFINITY;
        for k in 1..=9 {
            let t = k as f64 / 10.0;
            let v = negativity(&transform_beamsplitter(&p, &anc, t)?)?.value;
            worst = worst.max(v - base);
        }
        out.push(Check::new("p-monotone", format!("{name} through t = 0.1..0.9, thermal(0.2) ancilla"), worst, 1e-3));
    }
    Ok(out)
}

fn p_convexity(cfg: &RunConfig) -> Result<Vec<Check>> {
    let mut dens = nonclassical_builtins(cfg)?;
    dens.push(("thermal:0.3".into(), PDensity::thermal(0.3)?.with_window(cfg.quadrature)?));
    let mut out = Vec::new();
    for i in 0..dens.len() {
        for j in i + 1..dens.len() {
            let (a, b) = (&dens[i].1, &dens[j].1);
            let (na, nb) = (negativity(a)?.value, negativity(b)?.value);
            let mut worst = f64::NEG_INFINITY;
            for r in [0.1, 0.25, 0.5, 0.75, 0.9] {
                let m = negativity(&mix(a, b, r)?)?.value;
                worst = worst.max(m - (r * na + (1.0 - r) * nb));
            }
            out.push(Check::new("p-convexity", format!("{} / {}", dens[i].0, dens[j].0), worst, 1e-6));
        }
    }
    Ok(out)
}

fn p_invariance(cfg: &RunConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut dens = nonclassical_builtins(cfg)?;
    dens.push(("thermal:1".into(), PDensity::thermal(1.0)?.with_window(cfg.quadrature)?));
    for (name, p) in dens {
        let base = negativity(&p)?.value;
        let mut worst: f64 = 0.0;
        // off-lattice shifts so the sampled values genuinely change
        for g in [C64::new(0.37, 0.0), C64::new(0.61, -0.83)] {
            worst = worst.max((negativity(&transform_displace(&p, g)?)?.value - base).abs());
        }
        for theta in [PI / 4.0, 2.0] {
            worst = worst.max((negativity(&transform_phase(&p, theta)?)?.value - base).abs());
        }
        out.push(Check::new("p-invariance", name, worst, 1e-3));
    }
    Ok(out)
}

fn p_quadrature(cfg: &RunConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (name, p) in nonclassical_builtins(cfg)? {
        let q = p.window();
        let base = negativity(&p)?.value;
        let fine = negativity_on(&p, &q.refined())?.value;
        let wide = negativity_on(&p, &q.widened(1.0))?.value;
        let rel = ((fine - base).abs()).max((wide - base).abs()) / base;
        out.push(Check::new("p-quadrature", format!("{name} relative change under h/2, L+1"), rel, 0.02));
    }
    Ok(out)
}
