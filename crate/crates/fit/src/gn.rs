//! Damped Gauss-Newton minimizer for small weighted least-squares problems.

/// Damping schedule and termination settings.
#[derive(Clone, Copy, Debug)]
pub struct GnOptions {
    pub max_iterations: usize,
    /// Converged when the relative step falls below this.
    pub step_tol: f64,
    /// Converged when an accepted step improves the cost by less than this
    /// relative amount (plateau at the minimum of a noisy problem).
    pub cost_tol: f64,
    pub lambda_init: f64,
    /// Damping multiplier on a rejected step.
    pub lambda_up: f64,
    /// Damping multiplier on an accepted step.
    pub lambda_down: f64,
}

impl Default for GnOptions {
    fn default() -> Self {
        GnOptions {
            max_iterations: 200,
            step_tol: 1e-10,
            cost_tol: 1e-10,
            lambda_init: 1e-3,
            lambda_up: 10.0,
            lambda_down: 0.3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GnOutcome {
    pub params: Vec<f64>,
    /// Parameter covariance scaled by the residual variance.
    pub covariance: Vec<Vec<f64>>,
    /// Unweighted root-mean-square residual.
    pub residual_rms: f64,
    /// Weighted residual sum of squares at the minimum.
    pub weighted_rss: f64,
    pub converged: bool,
    pub iterations: usize,
}

fn weighted_rss(
    model: &dyn Fn(&[f64], f64) -> f64,
    p: &[f64],
    t: &[f64],
    y: &[f64],
    w: &[f64],
) -> f64 {
    t.iter()
        .zip(y)
        .zip(w)
        .map(|((&tk, &yk), &wk)| {
            let r = yk - model(p, tk);
            wk * r * r
        })
        .sum()
}

/// Central-difference Jacobian of the weighted residual vector.
fn jacobian(
    model: &dyn Fn(&[f64], f64) -> f64,
    p: &[f64],
    t: &[f64],
    w: &[f64],
    scales: &[f64],
) -> Vec<Vec<f64>> {
    let n = t.len();
    let np = p.len();
    let mut jac = vec![vec![0.0; np]; n];
    let mut p_hi = p.to_vec();
    let mut p_lo = p.to_vec();
    for i in 0..np {
        let h = 1e-6 * p[i].abs().max(scales[i].abs()).max(1e-12);
        p_hi[i] = p[i] + h;
        p_lo[i] = p[i] - h;
        for k in 0..n {
            // residual r = sqrt(w) (y - f), so dr/dp = -sqrt(w) df/dp
            let df = (model(&p_hi, t[k]) - model(&p_lo, t[k])) / (2.0 * h);
            jac[k][i] = -w[k].sqrt() * df;
        }
        p_hi[i] = p[i];
        p_lo[i] = p[i];
    }
    jac
}

/// Solve A x = b for a small symmetric system by Gaussian elimination with
/// partial pivoting. Returns None if singular.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

fn invert(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        cols.push(solve(a.to_vec(), e)?);
    }
    // cols holds columns of the inverse; transpose into rows.
    let mut inv = vec![vec![0.0; n]; n];
    for (i, col) in cols.iter().enumerate() {
        for (j, &v) in col.iter().enumerate() {
            inv[j][i] = v;
        }
    }
    Some(inv)
}

/// Minimize sum of w (y - model(p, t))^2 from the starting point `p0`.
///
/// `scales` gives the magnitude of each parameter for finite-difference
/// steps and relative-step convergence tests.
pub fn fit_least_squares(
    model: &dyn Fn(&[f64], f64) -> f64,
    t: &[f64],
    y: &[f64],
    weights: &[f64],
    p0: &[f64],
    scales: &[f64],
    opts: &GnOptions,
) -> GnOutcome {
    assert_eq!(t.len(), y.len());
    assert_eq!(t.len(), weights.len());
    assert_eq!(p0.len(), scales.len());
    let n = t.len();
    let np = p0.len();

    let mut p = p0.to_vec();
    let mut cost = weighted_rss(model, &p, t, y, weights);
    let mut lambda = opts.lambda_init;
    let mut converged = false;
    let mut iterations = 0;
    // An essentially exact fit: residuals at machine-noise level relative
    // to the data norm count as converged regardless of step size.
    let data_scale: f64 = t
        .iter()
        .zip(y)
        .zip(weights)
        .map(|((_, &yk), &wk)| wk * yk * yk)
        .sum::<f64>()
        .max(1e-300);
    let cost_floor = 1e-24 * data_scale;

    while iterations < opts.max_iterations {
        iterations += 1;
        let jac = jacobian(model, &p, t, weights, scales);
        // normal equations: (J^T J + lambda diag) delta = -J^T r
        let mut a = vec![vec![0.0; np]; np];
        let mut g = vec![0.0; np];
        for k in 0..n {
            let r = weights[k].sqrt() * (y[k] - model(&p, t[k]));
            for i in 0..np {
                g[i] += jac[k][i] * r;
                for j in i..np {
                    a[i][j] += jac[k][i] * jac[k][j];
                }
            }
        }
        for i in 0..np {
            for j in 0..i {
                a[i][j] = a[j][i];
            }
        }
        let diag_floor = 1e-12 * (0..np).map(|i| a[i][i]).fold(0.0f64, f64::max) + 1e-300;

        let mut accepted = false;
        let mut inner = 0;
        while inner < 40 {
            inner += 1;
            let mut damped = a.clone();
            for i in 0..np {
                damped[i][i] += lambda * a[i][i].max(diag_floor);
            }
            let rhs: Vec<f64> = g.iter().map(|&v| -v).collect();
            let Some(delta) = solve(damped, rhs) else {
                lambda *= opts.lambda_up;
                continue;
            };
            let candidate: Vec<f64> = p.iter().zip(&delta).map(|(&pi, &d)| pi + d).collect();
            let new_cost = weighted_rss(model, &candidate, t, y, weights);
            if new_cost.is_finite() && new_cost <= cost {
                let rel_step = delta
                    .iter()
                    .zip(scales)
                    .zip(&p)
                    .map(|((&d, &s), &pi)| d.abs() / pi.abs().max(s.abs()).max(1e-12))
                    .fold(0.0f64, f64::max);
                let improvement = cost - new_cost;
                p = candidate;
                cost = new_cost;
                lambda = (lambda * opts.lambda_down).max(1e-14);
                accepted = true;
                if rel_step < opts.step_tol
                    || cost < cost_floor
                    || improvement <= opts.cost_tol * cost.max(1e-300)
                {
                    converged = true;
                }
                break;
            }
            lambda *= opts.lambda_up;
        }
        if converged {
            break;
        }
        if !accepted {
            // Stuck at a point no damped step improves: treat a vanishing
            // gradient as convergence, otherwise report failure.
            let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            converged = gnorm < 1e-8 * (1.0 + cost);
            break;
        }
    }

    // Covariance from the undamped normal matrix, scaled by the residual
    // variance.
    let jac = jacobian(model, &p, t, weights, scales);
    let mut a = vec![vec![0.0; np]; np];
    for k in 0..n {
        for i in 0..np {
            for j in 0..np {
                a[i][j] += jac[k][i] * jac[k][j];
            }
        }
    }
    let dof = n.saturating_sub(np);
    let s2 = if dof > 0 { cost / dof as f64 } else { 0.0 };
    let covariance = invert(&a)
        .map(|inv| {
            inv.iter()
                .map(|row| row.iter().map(|&v| v * s2).collect())
                .collect()
        })
        .unwrap_or_else(|| vec![vec![f64::NAN; np]; np]);

    let rss_plain: f64 = t
        .iter()
        .zip(y)
        .map(|(&tk, &yk)| {
            let r = yk - model(&p, tk);
            r * r
        })
        .sum();

    GnOutcome {
        params: p,
        covariance,
        residual_rms: (rss_plain / n as f64).sqrt(),
        weighted_rss: cost,
        converged,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        // y = p0 + p1 x, exact data
        let t: Vec<f64> = (0..20).map(|k| k as f64 * 0.1).collect();
        let y: Vec<f64> = t.iter().map(|&x| 2.0 + 3.0 * x).collect();
        let w = vec![1.0; t.len()];
        let out = fit_least_squares(
            &|p, x| p[0] + p[1] * x,
            &t,
            &y,
            &w,
            &[0.0, 0.0],
            &[1.0, 1.0],
            &GnOptions::default(),
        );
        assert!(out.converged);
        assert!((out.params[0] - 2.0).abs() < 1e-9);
        assert!((out.params[1] - 3.0).abs() < 1e-9);
        assert!(out.residual_rms < 1e-10);
    }

    #[test]
    fn nonlinear_exponential() {
        let t: Vec<f64> = (0..30).map(|k| k as f64 * 0.05).collect();
        let y: Vec<f64> = t.iter().map(|&x| 1.7 * (-2.3 * x).exp()).collect();
        let w = vec![1.0; t.len()];
        let out = fit_least_squares(
            &|p, x| p[0] * (-p[1] * x).exp(),
            &t,
            &y,
            &w,
            &[1.0, 1.0],
            &[1.0, 1.0],
            &GnOptions::default(),
        );
        assert!(out.converged);
        assert!((out.params[0] - 1.7).abs() < 1e-7);
        assert!((out.params[1] - 2.3).abs() < 1e-7);
    }

    #[test]
    fn weight_scaling_leaves_estimates_unchanged() {
        let t: Vec<f64> = (0..25).map(|k| k as f64 * 0.07).collect();
        let y: Vec<f64> = t
            .iter()
            .enumerate()
            .map(|(k, &x)| 0.4 + 0.8 * x + if k % 2 == 0 { 0.01 } else { -0.01 })
            .collect();
        let w1 = vec![1.0; t.len()];
        let w2 = vec![2.0; t.len()];
        let model = |p: &[f64], x: f64| p[0] + p[1] * x;
        let a = fit_least_squares(
            &model,
            &t,
            &y,
            &w1,
            &[0.0, 0.0],
            &[1.0, 1.0],
            &GnOptions::default(),
        );
        let b = fit_least_squares(
            &model,
            &t,
            &y,
            &w2,
            &[0.0, 0.0],
            &[1.0, 1.0],
            &GnOptions::default(),
        );
        assert!((a.params[0] - b.params[0]).abs() < 1e-12);
        assert!((a.params[1] - b.params[1]).abs() < 1e-12);
        // standard errors are invariant too: covariance picks up 1/2 from
        // J^T J and 2 from the residual variance
        assert!((a.covariance[0][0] - b.covariance[0][0]).abs() < 1e-12);
    }
}
