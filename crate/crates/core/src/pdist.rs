//! Regular Glauber-Sudarshan P densities on a square phase-space window.
//!
//! A [`PDensity`] is either one of a few closed-form kinds or a sampled grid.
//! Everything numeric happens on the lattice `x_i = -L + i h`, `i = 0..n`, with
//! `n = 2L/h + 1`, using midpoint quadrature (each node owns an `h x h` cell).
//! Point masses stand in for the vacuum or a coherent ancilla; they have no
//! grid representation and are only accepted where the result is still a
//! regular density.
//!
//! Negativity is the integral of `-p` over the nodes where `p < -tol_neg`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TOL_NEG: f64 = 1e-12;
pub const TOL_QUAD: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Quadrature {
    #[serde(rename = "L")]
    pub l: f64,
    pub h: f64,
    pub tol_neg: f64,
    pub tol_quad: f64,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            l: 6.0,
            h: 0.05,
            tol_neg: TOL_NEG,
            tol_quad: TOL_QUAD,
        }
    }
}

impl Quadrature {
    pub fn new(l: f64, h: f64) -> Result<Self> {
        let q = Self {
            l,
            h,
            ..Self::default()
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("L", self.l), ("h", self.h), ("tol_neg", self.tol_neg), ("tol_quad", self.tol_quad)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("quadrature {name} must be positive")));
            }
        }
        let cells = 2.0 * self.l / self.h;
        if (cells - cells.round()).abs() > 1e-9 * cells.max(1.0) || cells.round() < 2.0 {
            return Err(Error::InvalidParameter(format!(
                "2L/h = {cells} must be an integer >= 2"
            )));
        }
        Ok(())
    }

    /// Nodes per axis.
    pub fn nodes(&self) -> usize {
        (2.0 * self.l / self.h).round() as usize + 1
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.l + self.h * i as f64
    }

    /// Halved spacing, same window.
    pub fn refined(&self) -> Self {
        Self {
            h: self.h / 2.0,
            ..*self
        }
    }

    pub fn widened(&self, by: f64) -> Self {
        Self {
            l: self.l + by,
            ..*self
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PKind {
    /// `exp(-|a|^2 / n) / (pi n)`.
    Thermal { n_bar: f64 },
    DisplacedThermal { n_bar: f64, gamma: C64 },
    /// P density of `a^dag rho_th a / (n + 1)`.
    PhotonAddedThermal { n_bar: f64 },
    /// `delta^2(a - at)`: a coherent state, singular but classical.
    PointMass { at: C64 },
    Grid(PGrid),
    /// `base(rot (a - shift))` with `|rot| = 1`: displacements and phase
    /// rotations compose here exactly instead of being re-interpolated.
    Mapped { base: Box<PKind>, rot: C64, shift: C64 },
}

impl PKind {
    fn eval(&self, z: C64) -> f64 {
        match self {
            PKind::Thermal { n_bar } => thermal_at(*n_bar, z),
            PKind::DisplacedThermal { n_bar, gamma } => thermal_at(*n_bar, z - gamma),
            PKind::PhotonAddedThermal { n_bar } => {
                let (n, u) = (*n_bar, z.norm_sqr());
                ((1.0 + n) * u - n) * (-u / n).exp() / (PI * n * n * n)
            }
            PKind::PointMass { .. } => 0.0,
            PKind::Grid(g) => g.interpolate(z),
            PKind::Mapped { base, rot, shift } => base.eval(rot * (z - shift)),
        }
    }
}

/// Row-major samples: `values[i * n + j]` is the density at `(x_i, x_j)`
/// with `x_i` the real part.
#[derive(Clone, Debug, PartialEq)]
pub struct PGrid {
    pub quad: Quadrature,
    pub values: Vec<f64>,
}

impl PGrid {
    pub fn n(&self) -> usize {
        self.quad.nodes()
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.quad.h * self.quad.h
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Bilinear interpolation; zero outside the window.
    pub fn interpolate(&self, z: C64) -> f64 {
        let n = self.n();
        let fx = (z.re + self.quad.l) / self.quad.h;
        let fy = (z.im + self.quad.l) / self.quad.h;
        let last = (n - 1) as f64;
        if !(fx >= 0.0 && fy >= 0.0 && fx <= last && fy <= last) {
            return 0.0;
        }
        let i = (fx.floor() as usize).min(n - 2);
        let j = (fy.floor() as usize).min(n - 2);
        let (tx, ty) = (fx - i as f64, fy - j as f64);
        let v = |a: usize, b: usize| self.values[a * n + b];
        (1.0 - tx) * (1.0 - ty) * v(i, j)
            + tx * (1.0 - ty) * v(i + 1, j)
            + (1.0 - tx) * ty * v(i, j + 1)
            + tx * ty * v(i + 1, j + 1)
    }

    /// CSV: a header line `L,h,rows`, its values, then one line per row.
    pub fn to_csv(&self) -> String {
        let n = self.n();
        let mut out = format!("L,h,rows\n{},{},{}\n", self.quad.l, self.quad.h, n);
        for i in 0..n {
            let row: Vec<String> = self.values[i * n..(i + 1) * n].iter().map(|v| format!("{v:e}")).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty grid file".into()))?;
        if header.trim() != "L,h,rows" {
            return Err(Error::Parse(format!("bad grid header '{header}'")));
        }
        let meta = lines.next().ok_or_else(|| Error::Parse("missing grid metadata".into()))?;
        let meta: Vec<&str> = meta.split(',').map(str::trim).collect();
        if meta.len() != 3 {
            return Err(Error::Parse("grid metadata needs L,h,rows".into()));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{s}'")));
        let quad = Quadrature::new(num(meta[0])?, num(meta[1])?)?;
        let rows: usize = meta[2].parse().map_err(|_| Error::Parse(format!("bad row count '{}'", meta[2])))?;
        if rows != quad.nodes() {
            return Err(Error::Parse(format!("{rows} rows but L, h imply {}", quad.nodes())));
        }
        let mut values = Vec::with_capacity(rows * rows);
        for (r, line) in lines.enumerate() {
            let row: Vec<f64> = line.split(',').map(|s| num(s.trim())).collect::<Result<_>>()?;
            if row.len() != rows {
                return Err(Error::Parse(format!("row {r} has {} values, expected {rows}", row.len())));
            }
            values.extend(row);
        }
        if values.len() != rows * rows {
            return Err(Error::Parse(format!("expected {rows} rows of values")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse("non-finite grid value".into()));
        }
        Ok(Self { quad, values })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PDensity {
    kind: PKind,
    window: Quadrature,
    deficit: f64,
}

fn check_n_bar(n_bar: f64) -> Result<()> {
    if !(n_bar > 0.0) || !n_bar.is_finite() {
        return Err(Error::InvalidParameter(format!("mean thermal photon number {n_bar} must be positive")));
    }
    Ok(())
}

impl PDensity {
    pub fn thermal(n_bar: f64) -> Result<Self> {
        check_n_bar(n_bar)?;
        Self::analytic(PKind::Thermal { n_bar }, Quadrature::default())
    }

    pub fn displaced_thermal(n_bar: f64, gamma: C64) -> Result<Self> {
        check_n_bar(n_bar)?;
        if !gamma.is_finite() {
            return Err(Error::InvalidParameter("displacement must be finite".into()));
        }
        Self::analytic(PKind::DisplacedThermal { n_bar, gamma }, Quadrature::default())
    }

    pub fn photon_added_thermal(n_bar: f64) -> Result<Self> {
        check_n_bar(n_bar)?;
        Self::analytic(PKind::PhotonAddedThermal { n_bar }, Quadrature::default())
    }

    pub fn point_mass(at: C64) -> Result<Self> {
        if !at.is_finite() {
            return Err(Error::InvalidParameter("point mass location must be finite".into()));
        }
        Ok(Self {
            kind: PKind::PointMass { at },
            window: Quadrature::default(),
            deficit: 0.0,
        })
    }

    pub fn vacuum() -> Self {
        Self::point_mass(C64::new(0.0, 0.0)).expect("origin is finite")
    }

    pub fn from_grid(grid: PGrid) -> Result<Self> {
        grid.quad.validate()?;
        if grid.values.len() != grid.n() * grid.n() {
            return Err(Error::DimensionMismatch(grid.values.len(), grid.n() * grid.n()));
        }
        if grid.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("grid values must be finite".into()));
        }
        let window = grid.quad;
        let deficit = (1.0 - grid.integral()).abs();
        check_norm(deficit, &window)?;
        Ok(Self {
            kind: PKind::Grid(grid),
            window,
            deficit,
        })
    }

    pub fn read_grid(path: &Path) -> Result<Self> {
        Self::from_grid(PGrid::from_csv(&std::fs::read_to_string(path)?)?)
    }

    pub fn write_grid(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.sample()?.to_csv())?;
        Ok(())
    }

    fn analytic(kind: PKind, window: Quadrature) -> Result<Self> {
        let mut p = Self {
            kind,
            window,
            deficit: 0.0,
        };
        p.deficit = (1.0 - p.sample()?.integral()).abs();
        check_norm(p.deficit, &p.window)?;
        Ok(p)
    }

    /// Same density, quadrature window replaced (grids are resampled).
    pub fn with_window(&self, window: Quadrature) -> Result<Self> {
        window.validate()?;
        match &self.kind {
            PKind::PointMass { .. } => Ok(Self { window, ..self.clone() }),
            PKind::Grid(g) if g.quad == window => Ok(self.clone()),
            PKind::Grid(_) => Self::from_grid(sample_fn(&window, |z| self.eval(z))),
            kind => Self::analytic(kind.clone(), window),
        }
    }

    pub fn kind(&self) -> &PKind {
        &self.kind
    }

    pub fn window(&self) -> &Quadrature {
        &self.window
    }

    /// `|1 - integral|` on the window.
    pub fn deficit(&self) -> f64 {
        self.deficit
    }

    pub fn is_point_mass(&self) -> bool {
        matches!(self.kind, PKind::PointMass { .. })
    }

    /// Density at `z`; grids interpolate bilinearly. Point masses have no
    /// pointwise value and evaluate to zero.
    pub fn eval(&self, z: C64) -> f64 {
        self.kind.eval(z)
    }

    pub fn sample(&self) -> Result<PGrid> {
        self.sample_on(&self.window)
    }

    pub fn sample_on(&self, quad: &Quadrature) -> Result<PGrid> {
        match &self.kind {
            PKind::PointMass { .. } => Err(Error::SingularP("a point mass has no grid representation".into())),
            PKind::Grid(g) if g.quad == *quad => Ok(g.clone()),
            _ => Ok(sample_fn(quad, |z| self.eval(z))),
        }
    }
}

fn thermal_at(n_bar: f64, z: C64) -> f64 {
    (-z.norm_sqr() / n_bar).exp() / (PI * n_bar)
}

fn check_norm(deficit: f64, window: &Quadrature) -> Result<()> {
    if deficit > window.tol_quad {
        return Err(Error::Normalization {
            deficit,
            tol: window.tol_quad,
        });
    }
    Ok(())
}

fn sample_fn<F: Fn(C64) -> f64 + Sync>(quad: &Quadrature, f: F) -> PGrid {
    let n = quad.nodes();
    let values = (0..n * n)
        .into_par_iter()
        .map(|k| f(C64::new(quad.coord(k / n), quad.coord(k % n))))
        .collect();
    PGrid { quad: *quad, values }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NegativityReport {
    pub value: f64,
    pub negative_region_area: f64,
    pub min_value: f64,
    pub quadrature: Quadrature,
}

pub fn negativity(p: &PDensity) -> Result<NegativityReport> {
    negativity_on(p, p.window())
}

pub fn negativity_on(p: &PDensity, quad: &Quadrature) -> Result<NegativityReport> {
    quad.validate()?;
    if p.is_point_mass() {
        return Ok(NegativityReport {
            value: 0.0,
            negative_region_area: 0.0,
            min_value: 0.0,
            quadrature: *quad,
        });
    }
    let grid = p.sample_on(quad)?;
    check_norm((1.0 - grid.integral()).abs(), quad)?;
    let cell = quad.h * quad.h;
    let (value, count) = negative_part(&grid);
    Ok(NegativityReport {
        value: value * cell,
        negative_region_area: count * cell,
        min_value: grid.min(),
        quadrature: *quad,
    })
}

const CELL_SUBDIV: usize = 8;

/// Integral of `max(-p, 0)` and the area where `p < -tol_neg`, in cell units.
///
/// Every cell with a corner below `-tol_neg` is integrated by an m x m
/// midpoint rule on the bicubic (Catmull-Rom) interpolant. The cell integral
/// of that interpolant carries the end correction the plain nodal sum lacks,
/// and the subdivision resolves the zero contour below the lattice spacing,
/// so the result does not depend on where the lattice sits. Zero iff no node
/// is below `-tol_neg`.
fn negative_part(grid: &PGrid) -> (f64, f64) {
    let n = grid.n();
    let tol = grid.quad.tol_neg;
    let m = CELL_SUBDIV;
    let w = 1.0 / (m * m) as f64;
    // outside the window the density is taken as zero
    let at = |i: isize, j: isize| {
        if i < 0 || j < 0 || i >= n as isize || j >= n as isize {
            0.0
        } else {
            grid.values[i as usize * n + j as usize]
        }
    };
    let weights: Vec<[f64; 4]> = (0..m).map(|a| catmull_rom((a as f64 + 0.5) / m as f64)).collect();
    let (mut value, mut count) = (0.0, 0.0);
    let (mut nodal_value, mut nodal_count) = (0.0, 0.0);
    for &v in &grid.values {
        if v < -tol {
            nodal_value -= v;
            nodal_count += 1.0;
        }
    }
    if nodal_count == 0.0 {
        return (0.0, 0.0);
    }
    for i in -1..n as isize {
        for j in -1..n as isize {
            if ![at(i, j), at(i + 1, j), at(i, j + 1), at(i + 1, j + 1)].iter().any(|&v| v < -tol) {
                continue;
            }
            let stencil: [[f64; 4]; 4] = std::array::from_fn(|a| std::array::from_fn(|b| at(i + a as isize - 1, j + b as isize - 1)));
            for wx in &weights {
                let col: [f64; 4] = std::array::from_fn(|b| (0..4).map(|a| wx[a] * stencil[a][b]).sum());
                for wy in &weights {
                    let v: f64 = (0..4).map(|b| wy[b] * col[b]).sum();
                    if v < -tol {
                        value -= v * w;
                        count += w;
                    }
                }
            }
        }
    }
    // interpolant overshoot could in principle hide an isolated negative node
    if value > 0.0 {
        (value, count)
    } else {
        (nodal_value, nodal_count)
    }
}

/// Weights on nodes -1, 0, 1, 2 at fractional position `t` in [0, 1].
fn catmull_rom(t: f64) -> [f64; 4] {
    let (t2, t3) = (t * t, t * t * t);
    [
        0.5 * (-t3 + 2.0 * t2 - t),
        0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
        0.5 * (-3.0 * t3 + 4.0 * t2 + t),
        0.5 * (t3 - t2),
    ]
}

pub fn is_classical(p: &PDensity) -> Result<bool> {
    Ok(negativity(p)?.value == 0.0)
}

/// `p'(a) = p(a - gamma)`.
pub fn transform_displace(p: &PDensity, gamma: C64) -> Result<PDensity> {
    if let PKind::PointMass { at } = p.kind {
        return PDensity::point_mass(at + gamma);
    }
    remap(p, C64::new(1.0, 0.0), gamma)
}

/// `p'(a) = p(exp(-i theta) a)`.
pub fn transform_phase(p: &PDensity, theta: f64) -> Result<PDensity> {
    if let PKind::PointMass { at } = p.kind {
        return PDensity::point_mass(at * C64::from_polar(1.0, theta));
    }
    if theta == 0.0 {
        return Ok(p.clone());
    }
    remap(p, C64::from_polar(1.0, -theta), C64::new(0.0, 0.0))
}

/// Composes `p(rot (a - shift))` onto `p`.
fn remap(p: &PDensity, rot: C64, shift: C64) -> Result<PDensity> {
    let kind = match &p.kind {
        // base(r0 (r (a - s) - s0)) = base(r0 r (a - s - conj(r) s0))
        PKind::Mapped { base, rot: r0, shift: s0 } => PKind::Mapped {
            base: base.clone(),
            rot: r0 * rot,
            shift: shift + rot.conj() * s0,
        },
        k => PKind::Mapped {
            base: Box::new(k.clone()),
            rot,
            shift,
        },
    };
    let out = PDensity {
        kind,
        window: p.window,
        deficit: 0.0,
    };
    let grid = out.sample()?;
    let deficit = (1.0 - grid.integral()).abs();
    if deficit > grid.quad.tol_quad {
        return Err(Error::Headroom(format!(
            "transformed density loses {deficit:.3e} of its mass outside [-{l}, {l}]^2",
            l = grid.quad.l
        )));
    }
    Ok(PDensity { deficit, ..out })
}

fn headroom(grid: PGrid) -> Result<PDensity> {
    let deficit = (1.0 - grid.integral()).abs();
    if deficit > grid.quad.tol_quad {
        return Err(Error::Headroom(format!(
            "transformed density loses {deficit:.3e} of its mass outside [-{l}, {l}]^2",
            l = grid.quad.l
        )));
    }
    PDensity::from_grid(grid)
}

/// Output-mode P density of a beam splitter with transmissivity `t` fed by
/// `p1` and a classical ancilla `p2`: the law of `sqrt(t) a1 + sqrt(1-t) a2`.
pub fn transform_beamsplitter(p1: &PDensity, p2: &PDensity, t: f64) -> Result<PDensity> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter(format!("transmissivity {t} outside [0, 1]")));
    }
    if !is_classical(p2)? {
        return Err(Error::NonclassicalAncilla);
    }
    let (st, sr) = (t.sqrt(), (1.0 - t).sqrt());
    let scaled_shift = |p: &PDensity, s: f64, shift: C64| -> Result<PDensity> {
        let window = *p1.window();
        let grid = sample_fn(&window, |z| p.eval((z - shift) / s) / (s * s));
        headroom(grid)
    };
    match (&p1.kind, &p2.kind) {
        (PKind::PointMass { at: a }, PKind::PointMass { at: b }) => PDensity::point_mass(a * st + b * sr),
        _ if t == 1.0 => p1.with_window(*p1.window()),
        _ if t == 0.0 => p2.with_window(*p1.window()),
        (_, PKind::PointMass { at }) => scaled_shift(p1, st, at * sr),
        (PKind::PointMass { at }, _) => scaled_shift(p2, sr, at * st),
        _ => {
            let window = *p1.window();
            let q1 = sample_fn(&window, |z| p1.eval(z / st) / t);
            let q2 = sample_fn(&window, |z| p2.eval(z / sr) / (1.0 - t));
            headroom(convolve(&q1, &q2))
        }
    }
}

/// Linear 2D convolution `h^2 sum q1(u) q2(z - u)` cropped to the window.
fn convolve(a: &PGrid, b: &PGrid) -> PGrid {
    let n = a.n();
    let m = (2 * n - 1).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);

    let embed = |g: &PGrid| {
        let mut buf = vec![C64::new(0.0, 0.0); m * m];
        for i in 0..n {
            for j in 0..n {
                buf[i * m + j] = C64::new(g.values[i * n + j], 0.0);
            }
        }
        buf
    };
    let fft2 = |buf: &mut Vec<C64>, plan: &std::sync::Arc<dyn rustfft::Fft<f64>>| {
        buf.par_chunks_mut(m).for_each(|row| plan.process(row));
        let mut cols = transpose(buf, m);
        cols.par_chunks_mut(m).for_each(|col| plan.process(col));
        *buf = transpose(&cols, m);
    };

    let mut fa = embed(a);
    let mut fb = embed(b);
    fft2(&mut fa, &fwd);
    fft2(&mut fb, &fwd);
    let mut prod: Vec<C64> = fa.iter().zip(&fb).map(|(x, y)| x * y).collect();
    fft2(&mut prod, &inv);

    // full output index k sits at -2L + k h; the window starts at k = (n-1)/2
    let off = (n - 1) / 2;
    let scale = a.quad.h * a.quad.h / (m * m) as f64;
    let values = (0..n * n)
        .map(|k| prod[(k / n + off) * m + (k % n + off)].re * scale)
        .collect();
    PGrid { quad: a.quad, values }
}

fn transpose(buf: &[C64], m: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); m * m];
    for i in 0..m {
        for j in 0..m {
            out[j * m + i] = buf[i * m + j];
        }
    }
    out
}

/// `r p + (1 - r) q` on `p`'s window.
pub fn mix(p: &PDensity, q: &PDensity, r: f64) -> Result<PDensity> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::InvalidWeights(format!("mixing weight {r} outside [0, 1]")));
    }
    let a = p.sample()?;
    let b = q.sample_on(p.window())?;
    let values = a.values.iter().zip(&b.values).map(|(x, y)| r * x + (1.0 - r) * y).collect();
    PDensity::from_grid(PGrid { quad: a.quad, values })
}

/// Negativity of the photon-added thermal density as a 1D radial integral
/// over the disk `|a|^2 < n/(1+n)`, in closed form.
pub fn photon_added_thermal_negativity(n_bar: f64) -> f64 {
    let a = 1.0 / n_bar;
    let u0 = n_bar / (1.0 + n_bar);
    let e = (-a * u0).exp();
    let i0 = (1.0 - e) / a;
    let i1 = (1.0 - e * (1.0 + a * u0)) / (a * a);
    (n_bar * i0 - (1.0 + n_bar) * i1) / n_bar.powi(3)
}

/// Parses density specs `thermal:n`, `dthermal:n,re,im`, `pat:n`,
/// `point:re,im` (alias `coherent:re,im`) and `grid:path`.
pub fn parse_density(spec: &str) -> Result<PDensity> {
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let nums = || -> Result<Vec<f64>> {
        rest.split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{s}' in '{spec}'"))))
            .collect()
    };
    let want = |v: Vec<f64>, k: usize| -> Result<Vec<f64>> {
        if v.len() == k {
            Ok(v)
        } else {
            Err(Error::Parse(format!("'{spec}' needs {k} numeric argument(s)")))
        }
    };
    match kind {
        "thermal" => PDensity::thermal(want(nums()?, 1)?[0]),
        "pat" | "photon-added-thermal" => PDensity::photon_added_thermal(want(nums()?, 1)?[0]),
        "dthermal" | "displaced-thermal" => {
            let v = want(nums()?, 3)?;
            PDensity::displaced_thermal(v[0], C64::new(v[1], v[2]))
        }
        "point" | "coherent" => {
            let v = want(nums()?, 2)?;
            PDensity::point_mass(C64::new(v[0], v[1]))
        }
        "vacuum" => Ok(PDensity::vacuum()),
        "grid" => PDensity::read_grid(Path::new(rest)),
        "fock" | "squeezed" | "cat-even" | "cat-odd" => Err(Error::SingularP(format!(
            "'{kind}' states have no regular P density; negativity is defined only for regular P"
        ))),
        _ => Err(Error::Parse(format!("unknown density spec '{spec}'"))),
    }
}

/// Short human-readable description for reports.
pub fn describe(p: &PDensity) -> String {
    let mut s = String::new();
    let _ = match p.kind() {
        PKind::Thermal { n_bar } => write!(s, "thermal(n={n_bar})"),
        PKind::DisplacedThermal { n_bar, gamma } => write!(s, "displaced_thermal(n={n_bar}, gamma={}{:+}i)", gamma.re, gamma.im),
        PKind::PhotonAddedThermal { n_bar } => write!(s, "photon_added_thermal(n={n_bar})"),
        PKind::PointMass { at } => write!(s, "point_mass({}{:+}i)", at.re, at.im),
        PKind::Grid(g) => write!(s, "grid(L={}, h={})", g.quad.l, g.quad.h),
        PKind::Mapped { .. } => write!(s, "transformed"),
    };
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn classical_kinds_have_zero_negativity() {
        let th = PDensity::thermal(1.0).unwrap();
        assert_eq!(negativity(&th).unwrap().value, 0.0);
        assert!(is_classical(&th).unwrap());
        let d = PDensity::displaced_thermal(0.5, c(1.0, 1.0)).unwrap();
        assert_eq!(negativity(&d).unwrap().value, 0.0);
        assert!(is_classical(&PDensity::vacuum()).unwrap());
    }

    /// Fock populations implied by P through `p_n = int P(a) e^{-|a|^2} |a|^{2n}/n!`,
    /// against the direct `a^dag rho_th a` diagonal `n n^{n-1} / (1+n)^{n+1}`.
    #[test]
    fn photon_added_thermal_matches_fock_oracle() {
        for n_bar in [0.3, 0.5, 1.2] {
            let p = PDensity::photon_added_thermal(n_bar).unwrap();
            // radial Simpson rule in u = |a|^2: d^2a = pi du
            let (umax, steps) = (40.0, 40_000usize);
            let du = umax / steps as f64;
            for n in 0..6usize {
                let fact: f64 = (1..=n).map(|k| k as f64).product();
                let f = |u: f64| PI * p.eval(c(u.sqrt(), 0.0)) * (-u).exp() * u.powi(n as i32) / fact;
                let mut s = f(0.0) + f(umax);
                for k in 1..steps {
                    s += f(k as f64 * du) * if k % 2 == 1 { 4.0 } else { 2.0 };
                }
                let pn = s * du / 3.0;
                let expected = n as f64 * n_bar.powi(n as i32 - 1) / (1.0 + n_bar).powi(n as i32 + 1);
                assert!((pn - expected).abs() < 1e-9, "n_bar {n_bar} n {n}: {pn} vs {expected}");
            }
        }
    }

    #[test]
    fn photon_added_thermal_negativity_oracle_and_refinement() {
        let p = PDensity::photon_added_thermal(0.5).unwrap();
        let r = negativity(&p).unwrap();
        let exact = photon_added_thermal_negativity(0.5);
        assert!(r.value > 0.0);
        assert!(!is_classical(&p).unwrap());
        // pointwise sign on a lattice approximates the disk boundary to O(h)
        assert!((r.value - exact).abs() < 0.02 * exact, "{} vs {exact}", r.value);
        let fine = negativity_on(&p, &p.window().refined()).unwrap();
        assert!((fine.value - r.value).abs() < 0.02 * r.value);
        let wide = negativity_on(&p, &p.window().widened(1.0)).unwrap();
        assert!((wide.value - r.value).abs() < 0.02 * r.value);
        let u0 = 0.5 / 1.5;
        assert!((r.negative_region_area - PI * u0).abs() < 0.05 * PI * u0);
    }

    #[test]
    fn nonnegative_bump_grid_is_classical() {
        let q = Quadrature::default();
        let g = sample_fn(&q, |z| thermal_at(0.7, z - c(0.3, -0.2)));
        let p = PDensity::from_grid(g).unwrap();
        assert!(is_classical(&p).unwrap());
    }

    #[test]
    fn unnormalized_grid_rejected() {
        let q = Quadrature::default();
        let g = sample_fn(&q, |z| 2.0 * thermal_at(0.7, z));
        assert!(matches!(PDensity::from_grid(g), Err(Error::Normalization { .. })));
    }

    #[test]
    fn displacement_and_phase() {
        let th = PDensity::thermal(1.0).unwrap();
        let d = transform_displace(&th, c(0.7, -0.4)).unwrap();
        assert_eq!(negativity(&d).unwrap().value, 0.0);
        assert!((d.eval(c(0.7, -0.4)) - 1.0 / PI).abs() < 1e-12);
        assert!(matches!(transform_displace(&th, c(5.0, 0.0)), Err(Error::Headroom(_))));

        let pat = PDensity::photon_added_thermal(0.5).unwrap();
        let same = transform_phase(&pat, 0.0).unwrap();
        assert_eq!(same.sample().unwrap(), pat.sample().unwrap());
        let g = PDensity::from_grid(pat.sample().unwrap()).unwrap();
        assert_eq!(transform_phase(&g, 0.0).unwrap().sample().unwrap(), g.sample().unwrap());
        // displace then undo: exact for analytic kinds
        let there = transform_displace(&pat, c(0.4, 0.9)).unwrap();
        let back = transform_displace(&there, c(-0.4, -0.9)).unwrap();
        assert!((back.eval(c(0.1, 0.2)) - pat.eval(c(0.1, 0.2))).abs() < 1e-13);
        let base = negativity(&pat).unwrap().value;
        for theta in [0.3, PI / 4.0, 2.0] {
            let rotated = transform_phase(&pat, theta).unwrap();
            assert!((negativity(&rotated).unwrap().value - base).abs() < 1e-3);
        }
    }

    #[test]
    fn identity_beamsplitter_with_vacuum() {
        let pat = PDensity::photon_added_thermal(0.5).unwrap();
        let out = transform_beamsplitter(&pat, &PDensity::vacuum(), 1.0).unwrap();
        let (a, b) = (pat.sample().unwrap(), out.sample().unwrap());
        let dev = a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(dev < 1e-6);
    }

    #[test]
    fn beamsplitter_of_thermals_is_thermal() {
        let (n1, n2, t) = (1.0, 0.5, 0.5);
        let out = transform_beamsplitter(&PDensity::thermal(n1).unwrap(), &PDensity::thermal(n2).unwrap(), t).unwrap();
        assert_eq!(negativity(&out).unwrap().value, 0.0);
        // Gaussian law: mean photon number mixes linearly
        let expected = PDensity::thermal(t * n1 + (1.0 - t) * n2).unwrap();
        for z in [c(0.0, 0.0), c(0.5, 0.3), c(-1.0, 1.2)] {
            assert!((out.eval(z) - expected.eval(z)).abs() < 1e-9);
        }
    }

    #[test]
    fn beamsplitter_with_coherent_ancilla_displaces() {
        let th = PDensity::thermal(0.8).unwrap();
        let gamma = c(0.6, 0.2);
        let out = transform_beamsplitter(&th, &PDensity::point_mass(gamma).unwrap(), 0.64).unwrap();
        let expected = PDensity::displaced_thermal(0.64 * 0.8, gamma * 0.6).unwrap();
        for z in [c(0.0, 0.0), c(0.3, 0.1), c(-0.4, 0.9)] {
            assert!((out.eval(z) - expected.eval(z)).abs() < 1e-9);
        }
    }

    #[test]
    fn beamsplitter_rejects_nonclassical_ancilla() {
        let th = PDensity::thermal(1.0).unwrap();
        let pat = PDensity::photon_added_thermal(0.5).unwrap();
        assert!(matches!(transform_beamsplitter(&th, &pat, 0.5), Err(Error::NonclassicalAncilla)));
        assert!(transform_beamsplitter(&th, &th, 1.5).is_err());
    }

    #[test]
    fn beamsplitter_sweep_is_monotone() {
        let pat = PDensity::photon_added_thermal(0.5).unwrap();
        let anc = PDensity::thermal(0.2).unwrap();
        let base = negativity(&pat).unwrap().value;
        for k in 1..=9 {
            let t = k as f64 / 10.0;
            let out = transform_beamsplitter(&pat, &anc, t).unwrap();
            assert!(negativity(&out).unwrap().value <= base + 1e-3, "t = {t}");
        }
    }

    #[test]
    fn convexity_on_mixtures() {
        let p = PDensity::photon_added_thermal(0.5).unwrap();
        let q = PDensity::photon_added_thermal(1.0).unwrap();
        let th = PDensity::thermal(0.3).unwrap();
        for (a, b) in [(&p, &q), (&p, &th), (&q, &th)] {
            let (na, nb) = (negativity(a).unwrap().value, negativity(b).unwrap().value);
            for r in [0.1, 0.25, 0.5, 0.75, 0.9] {
                let m = negativity(&mix(a, b, r).unwrap()).unwrap().value;
                assert!(m <= r * na + (1.0 - r) * nb + 1e-6);
            }
        }
    }

    #[test]
    fn grid_csv_round_trip() {
        let p = PDensity::photon_added_thermal(0.5).unwrap().with_window(Quadrature::new(4.0, 0.1).unwrap()).unwrap();
        let g = p.sample().unwrap();
        let back = PGrid::from_csv(&g.to_csv()).unwrap();
        assert_eq!(back.quad.nodes(), g.quad.nodes());
        let dev = g.values.iter().zip(&back.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(dev == 0.0);
        assert!(PGrid::from_csv("L,h,rows\n1,0.5,3\n0,0,0\n").is_err());
    }

    #[test]
    fn spec_parsing() {
        assert!(matches!(parse_density("fock:1"), Err(Error::SingularP(_))));
        assert!(matches!(parse_density("squeezed:0.3,0"), Err(Error::SingularP(_))));
        assert!(matches!(parse_density("wat:1"), Err(Error::Parse(_))));
        assert!(matches!(parse_density("thermal:x"), Err(Error::Parse(_))));
        assert!(parse_density("dthermal:0.5,1,1").is_ok());
        assert!(parse_density("pat:0.5").is_ok());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(10))]

            #[test]
            fn displacement_and_phase_preserve_negativity(n_bar in 0.3f64..1.0, re in -1.0f64..1.0,
                                                          im in -1.0f64..1.0, theta in 0.0f64..std::f64::consts::TAU) {
                let p = PDensity::photon_added_thermal(n_bar).unwrap();
                let base = negativity(&p).unwrap().value;
                let d = transform_displace(&p, C64::new(re, im)).unwrap();
                prop_assert!((negativity(&d).unwrap().value - base).abs() < 1e-3);
                let r = transform_phase(&d, theta).unwrap();
                prop_assert!((negativity(&r).unwrap().value - base).abs() < 1e-3);
            }

            #[test]
            fn beamsplitter_never_increases_negativity(n_bar in 0.3f64..1.0, anc in 0.05f64..1.0, t in 0.05f64..0.95) {
                let p = PDensity::photon_added_thermal(n_bar).unwrap();
                let out = transform_beamsplitter(&p, &PDensity::thermal(anc).unwrap(), t).unwrap();
                prop_assert!(negativity(&out).unwrap().value <= negativity(&p).unwrap().value + 1e-3);
            }
        }
    }
}
