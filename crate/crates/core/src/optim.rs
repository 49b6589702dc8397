//! Local minimizers used to polish shapes and optimize parametric families.
//!
//! Objectives are only available as values (the quality ratio of a convex
//! hull), so gradients are central finite differences. An objective may
//! return a non-finite value to mark a point as inadmissible, e.g. when a
//! move changes the combinatorial type of the hull; line searches then
//! backtrack.

/// Options for [`bfgs`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizeOptions {
    /// Stop once the finite-difference gradient norm drops below this.
    pub grad_tol: f64,
    /// Relative finite-difference step (scaled by `max(1, |x_i|)`).
    pub fd_step: f64,
    pub max_iter: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions { grad_tol: 1e-9, fd_step: 1e-6, max_iter: 2000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Central-difference gradient; one-sided where one neighbour is inadmissible.
pub fn fd_gradient<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], fx: f64, rel_step: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let h = rel_step * x[i].abs().max(1.0);
            probe[i] = x[i] + h;
            let fp = f(&probe);
            probe[i] = x[i] - h;
            let fm = f(&probe);
            probe[i] = x[i];
            match (fp.is_finite(), fm.is_finite()) {
                (true, true) => (fp - fm) / (2.0 * h),
                (true, false) => (fp - fx) / h,
                (false, true) => (fx - fm) / h,
                (false, false) => 0.0,
            }
        })
        .collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Quasi-Newton (BFGS) minimization with finite-difference gradients and
/// backtracking line search.
pub fn bfgs<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], opts: MinimizeOptions) -> Minimum {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    assert!(fx.is_finite(), "starting point must be admissible");
    let mut g = fd_gradient(&f, &x, fx, opts.fd_step);
    let identity = |n: usize| {
        let mut h = vec![0.0; n * n];
        for i in 0..n {
            h[i * n + i] = 1.0;
        }
        h
    };
    let mut hinv = identity(n);
    let mut fresh = true;
    let mut iterations = 0;
    // Value `STALL_WINDOW` iterations ago, to stop when progress dries up.
    const STALL_WINDOW: usize = 25;
    let mut history: Vec<f64> = Vec::new();

    while iterations < opts.max_iter {
        let gn = norm(&g);
        if gn <= opts.grad_tol {
            return Minimum { x, value: fx, grad_norm: gn, iterations, converged: true };
        }
        iterations += 1;

        let mut p: Vec<f64> = (0..n).map(|i| -dot(&hinv[i * n..(i + 1) * n], &g)).collect();
        let mut slope = dot(&p, &g);
        if slope >= 0.0 {
            hinv = identity(n);
            fresh = true;
            p = g.iter().map(|v| -v).collect();
            slope = -gn * gn;
        }
        if fresh {
            // Keep the first step of a fresh inverse Hessian bounded.
            let pn = norm(&p);
            let cap = 0.1 * norm(&x).max(1.0);
            if pn > cap {
                let s = cap / pn;
                p.iter_mut().for_each(|v| *v *= s);
                slope *= s;
            }
        }

        let slack = 4.0 * f64::EPSILON * fx.abs();
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + alpha * b).collect();
            let ft = f(&trial);
            if ft.is_finite() && ft <= fx + 1e-4 * alpha * slope + slack {
                accepted = Some((trial, ft));
                break;
            }
            alpha *= 0.5;
        }
        let Some((xn, fnew)) = accepted else {
            if fresh {
                break;
            }
            hinv = identity(n);
            fresh = true;
            continue;
        };
        let gnew = fd_gradient(&f, &xn, fnew, opts.fd_step);
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gnew.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-300 {
            if fresh {
                // Rescale the initial inverse Hessian to the observed curvature.
                let scale = sy / dot(&y, &y);
                hinv.iter_mut().for_each(|v| *v *= scale);
            }
            let hy: Vec<f64> = (0..n).map(|i| dot(&hinv[i * n..(i + 1) * n], &y)).collect();
            let yhy = dot(&y, &hy);
            let rho = 1.0 / sy;
            for i in 0..n {
                for j in 0..n {
                    hinv[i * n + j] += rho * ((1.0 + rho * yhy) * s[i] * s[j] - hy[i] * s[j] - s[i] * hy[j]);
                }
            }
            fresh = false;
        }
        let stalled = fnew >= fx && norm(&gnew) >= norm(&g);
        x = xn;
        fx = fnew;
        g = gnew;
        if stalled && fresh {
            break;
        }
        history.push(fx);
        if history.len() > STALL_WINDOW {
            let old = history[history.len() - 1 - STALL_WINDOW];
            if old - fx <= 1e-14 * fx.abs().max(1e-300) {
                break;
            }
        }
    }
    let gn = norm(&g);
    Minimum { x, value: fx, grad_norm: gn, iterations, converged: gn <= opts.grad_tol }
}

/// Golden-section search for a minimum of a unimodal function on `[a, b]`.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Locates a minimizer on `[a, b]` by bisecting the sign of the
/// fourth-order finite-difference slope. Resolves the minimizer far below
/// the `sqrt(eps)` limit of value-comparison searches.
pub fn slope_bisection<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, step: f64, tol: f64) -> f64 {
    let slope = |t: f64| 8.0 * (f(t + step) - f(t - step)) - (f(t + 2.0 * step) - f(t - 2.0 * step));
    let mut sa = slope(a);
    while b - a > tol {
        let m = 0.5 * (a + b);
        let sm = slope(m);
        if sm == 0.0 {
            return m;
        }
        if (sm < 0.0) == (sa < 0.0) {
            a = m;
            sa = sm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}
