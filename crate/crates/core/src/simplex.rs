//! Two-dimensional Nelder-Mead simplex minimizer.

#[derive(Clone, Copy, Debug)]
pub struct SimplexOptions {
    pub max_iters: usize,
    /// Stop once the spread of objective values across the simplex is below this.
    pub f_tol: f64,
    /// ... and the simplex diameter is below this.
    pub x_tol: f64,
}

#[derive(Clone, Copy, Debug)]
#[allow(dead_code)]
pub struct SimplexResult {
    pub x: [f64; 2],
    pub f: f64,
    pub iters: usize,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

pub fn minimize<F>(f: F, x0: [f64; 2], step: f64, opts: &SimplexOptions) -> SimplexResult
where
    F: Fn([f64; 2]) -> f64,
{
    let mut pts = [x0, [x0[0] + step, x0[1]], [x0[0], x0[1] + step]];
    let mut vals = [f(pts[0]), f(pts[1]), f(pts[2])];
    let mut iters = 0;

    while iters < opts.max_iters {
        sort(&mut pts, &mut vals);
        let spread = vals[2] - vals[0];
        let diam = dist(pts[0], pts[1]).max(dist(pts[0], pts[2]));
        if spread <= opts.f_tol && diam <= opts.x_tol {
            break;
        }
        iters += 1;

        let c = [(pts[0][0] + pts[1][0]) / 2.0, (pts[0][1] + pts[1][1]) / 2.0];
        let along = |t: f64| [c[0] + t * (pts[2][0] - c[0]), c[1] + t * (pts[2][1] - c[1])];

        let xr = along(-REFLECT);
        let fr = f(xr);
        if fr < vals[0] {
            let xe = along(-EXPAND);
            let fe = f(xe);
            if fe < fr {
                pts[2] = xe;
                vals[2] = fe;
            } else {
                pts[2] = xr;
                vals[2] = fr;
            }
            continue;
        }
        if fr < vals[1] {
            pts[2] = xr;
            vals[2] = fr;
            continue;
        }
        // contraction: outside if the reflection improved on the worst point
        let (xc, fc) = if fr < vals[2] {
            let x = along(-CONTRACT);
            (x, f(x))
        } else {
            let x = along(CONTRACT);
            (x, f(x))
        };
        if fc < vals[2].min(fr) {
            pts[2] = xc;
            vals[2] = fc;
            continue;
        }
        for i in 1..3 {
            pts[i] = [
                pts[0][0] + SHRINK * (pts[i][0] - pts[0][0]),
                pts[0][1] + SHRINK * (pts[i][1] - pts[0][1]),
            ];
            vals[i] = f(pts[i]);
        }
    }
    sort(&mut pts, &mut vals);
    SimplexResult {
        x: pts[0],
        f: vals[0],
        iters,
    }
}

fn sort(pts: &mut [[f64; 2]; 3], vals: &mut [f64; 3]) {
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let p = *pts;
    let v = *vals;
    for (k, &i) in idx.iter().enumerate() {
        pts[k] = p[i];
        vals[k] = v[i];
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    const OPTS: SimplexOptions = SimplexOptions {
        max_iters: 500,
        f_tol: 1e-14,
        x_tol: 1e-9,
    };

    #[test]
    fn quadratic_bowl() {
        let r = minimize(
            |x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 0.5).powi(2),
            [0.0, 0.0],
            0.1,
            &OPTS,
        );
        assert!((r.x[0] - 1.0).abs() < 1e-6);
        assert!((r.x[1] + 0.5).abs() < 1e-6);
    }

    #[test]
    fn rosenbrock() {
        let r = minimize(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            [-1.2, 1.0],
            0.1,
            &SimplexOptions {
                max_iters: 2000,
                ..OPTS
            },
        );
        assert!((r.x[0] - 1.0).abs() < 1e-4, "{:?}", r);
        assert!((r.x[1] - 1.0).abs() < 1e-4, "{:?}", r);
    }

    #[test]
    fn respects_iteration_cap() {
        let r = minimize(|x| x[0].abs() + x[1].abs(), [5.0, 5.0], 0.01, &SimplexOptions {
            max_iters: 3,
            ..OPTS
        });
        assert!(r.iters <= 3);
    }
}
