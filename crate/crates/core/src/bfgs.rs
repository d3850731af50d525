//! Quasi-Newton local minimiser with finite-difference gradients.
//!
//! The discrimination cost functions are smooth in the Reck parameters but
//! their analytic gradients through permanents and irrep blocks are not
//! worth maintaining; central differences with a fixed step are accurate
//! enough for the optimizer's role of driving penalised costs to local
//! minima before re-scoring.

pub(crate) struct Options {
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    pub fd_step: f64,
}

impl Default for Options {
    fn default() -> Self {
        Options { max_iterations: 200, gradient_tolerance: 1e-9, fd_step: 1e-6 }
    }
}

pub(crate) struct Outcome {
    pub x: Vec<f64>,
    pub value: f64,
}

fn gradient(f: &dyn Fn(&[f64]) -> f64, x: &[f64], step: f64) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        probe[i] = x[i] + step;
        let fp = f(&probe);
        probe[i] = x[i] - step;
        let fm = f(&probe);
        probe[i] = x[i];
        g[i] = (fp - fm) / (2.0 * step);
    }
    g
}

/// BFGS with an Armijo backtracking line search. The inverse Hessian update
/// is skipped when the curvature condition fails.
pub(crate) fn minimize(f: &dyn Fn(&[f64]) -> f64, x0: &[f64], opts: &Options) -> Outcome {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut g = gradient(f, &x, opts.fd_step);
    // inverse Hessian approximation, dense row-major
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        h[i * n + i] = 1.0;
    }
    for _ in 0..opts.max_iterations {
        let gnorm = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if gnorm < opts.gradient_tolerance {
            break;
        }
        // direction = -H g
        let mut dir = vec![0.0; n];
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += h[i * n + j] * g[j];
            }
            dir[i] = -acc;
        }
        let mut slope: f64 = dir.iter().zip(&g).map(|(d, gg)| d * gg).sum();
        if slope >= 0.0 {
            // not a descent direction; reset to steepest descent
            for i in 0..n {
                for j in 0..n {
                    h[i * n + j] = if i == j { 1.0 } else { 0.0 };
                }
            }
            for i in 0..n {
                dir[i] = -g[i];
            }
            slope = -g.iter().map(|v| v * v).sum::<f64>();
        }
        // Armijo backtracking
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let trial: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + step * di).collect();
            let ft = f(&trial);
            if ft <= fx + 1e-4 * step * slope {
                accepted = Some((trial, ft));
                break;
            }
            step *= 0.5;
        }
        let Some((x_new, f_new)) = accepted else {
            break; // line search failed; we are at numerical resolution
        };
        let g_new = gradient(f, &x_new, opts.fd_step);
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        let s_norm: f64 = s.iter().map(|v| v * v).sum::<f64>().sqrt();
        let y_norm: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if sy > 1e-12 * s_norm * y_norm {
            // H ← (I - ρ s yᵀ) H (I - ρ y sᵀ) + ρ s sᵀ
            let rho = 1.0 / sy;
            let mut hy = vec![0.0; n];
            for i in 0..n {
                let mut acc = 0.0;
                for j in 0..n {
                    acc += h[i * n + j] * y[j];
                }
                hy[i] = acc;
            }
            let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
            for i in 0..n {
                for j in 0..n {
                    h[i * n + j] += -rho * (s[i] * hy[j] + hy[i] * s[j])
                        + rho * rho * yhy * s[i] * s[j]
                        + rho * s[i] * s[j];
                }
            }
        }
        let f_drop = fx - f_new;
        x = x_new;
        fx = f_new;
        g = g_new;
        if f_drop < 1e-15 * (1.0 + fx.abs()) {
            break;
        }
    }
    Outcome { x, value: fx }
}
