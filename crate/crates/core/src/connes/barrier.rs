//! Log-barrier interior point method with Newton centering.

use nalgebra::{DMatrix, DVector};

use super::problem::{effective_tol, Problem};
use super::SolveOutcome;

const MAX_BARRIER_PARAMETER: f64 = 1e16;
const CENTERING_TOL: f64 = 1e-12;
const MAX_NEWTON_STEPS: usize = 200;

/// Change of the barrier `-t f_T - Σ log(1 - q_i)` along `f + s·step`, or
/// `None` if the trial point leaves the domain. Computed from the increments
/// of the jumps so that it stays accurate when `t` is large.
fn barrier_change(p: &Problem, f: &[f64], dir: &[f64], s: f64, t: f64) -> Option<f64> {
    let mut change = -t * s * (dir[p.target] - dir[p.source]);
    for star in &p.stars {
        let i = star.centre;
        let slack = 1.0 - p.q(star, f);
        let dq: f64 = star
            .leaves
            .iter()
            .map(|&k| {
                let jump = f[k] - f[i];
                let dj = s * (dir[k] - dir[i]);
                dj * (2.0 * jump + dj)
            })
            .sum();
        if !(dq < slack) {
            return None;
        }
        change -= (-dq / slack).ln_1p();
    }
    Some(change)
}

/// Cholesky factor of a unit-diagonal matrix, with a growing ridge when the
/// plain factorization breaks down.
fn factor(h: DMatrix<f64>) -> Option<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    if let Some(chol) = h.clone().cholesky() {
        return Some(chol);
    }
    let mut ridge = 1e-14;
    while ridge <= 1e-6 {
        let mut shifted = h.clone();
        for a in 0..shifted.nrows() {
            shifted[(a, a)] += ridge;
        }
        if let Some(chol) = shifted.cholesky() {
            return Some(chol);
        }
        ridge *= 100.0;
    }
    None
}

pub(crate) fn solve(p: &Problem, tol: f64, max_iterations: usize) -> SolveOutcome {
    let n = p.len() - 1;
    let red_target = p.reduced(p.target).expect("target differs from source");
    let mut f = vec![0.0; p.len()];
    let mut t = 1.0;
    let mut iterations = 0;
    let mut best = SolveOutcome::start(p);

    loop {
        // centering
        for _ in 0..MAX_NEWTON_STEPS {
            if iterations >= max_iterations {
                return best;
            }
            iterations += 1;
            let mut h = DMatrix::<f64>::zeros(n, n);
            let mut grad = DVector::<f64>::zeros(n);
            grad[red_target] -= t;
            for star in &p.stars {
                let slack = 1.0 - p.q(star, &f);
                let i = star.centre;
                // ∇q = 2 M_i f, supported on the star
                let mut gq: Vec<(usize, f64)> = Vec::with_capacity(star.leaves.len() + 1);
                let mut centre_part = 0.0;
                for &k in &star.leaves {
                    let jump = f[k] - f[i];
                    gq.push((k, 2.0 * jump));
                    centre_part -= 2.0 * jump;
                    p.add_edge_term(&mut h, k, i, 2.0 / slack);
                }
                gq.push((i, centre_part));
                let gq: Vec<(usize, f64)> = gq.into_iter().filter_map(|(a, v)| p.reduced(a).map(|r| (r, v))).collect();
                for &(a, va) in &gq {
                    grad[a] += va / slack;
                    for &(b, vb) in &gq {
                        h[(a, b)] += va * vb / (slack * slack);
                    }
                }
            }
            // symmetric diagonal scaling keeps the factorization stable for large t
            let scale: Vec<f64> = (0..n).map(|a| 1.0 / h[(a, a)].max(f64::MIN_POSITIVE).sqrt()).collect();
            for a in 0..n {
                for b in 0..n {
                    h[(a, b)] *= scale[a] * scale[b];
                }
            }
            let scaled_grad = DVector::from_iterator(n, (0..n).map(|a| grad[a] * scale[a]));
            let Some(chol) = factor(h) else {
                break;
            };
            let scaled_step = chol.solve(&scaled_grad);
            let step = DVector::from_iterator(n, (0..n).map(|a| -scaled_step[a] * scale[a]));
            let decrement = -grad.dot(&step);
            if !decrement.is_finite() {
                break;
            }
            if decrement / 2.0 <= CENTERING_TOL {
                break;
            }
            let dir: Vec<f64> = (0..p.len()).map(|i| p.reduced(i).map_or(0.0, |r| step[r])).collect();
            let scale_f = f.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
            let dir_size = dir.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
            let mut s = 1.0;
            let mut accepted = false;
            while s > 1e-20 {
                if let Some(change) = barrier_change(p, &f, &dir, s, t) {
                    if change <= -0.25 * s * decrement {
                        for (x, d) in f.iter_mut().zip(&dir) {
                            *x += s * d;
                        }
                        accepted = true;
                        break;
                    }
                }
                s *= 0.5;
            }
            if !accepted || s * dir_size <= 1e-15 * scale_f {
                break;
            }
        }

        let nu: Vec<f64> = p.stars.iter().map(|star| 1.0 / (t * (1.0 - p.q(star, &f)))).collect();
        // clearly inactive constraints only loosen the bound
        let active: Vec<f64> = p
            .stars
            .iter()
            .zip(&nu)
            .map(|(star, &w)| if p.q(star, &f) < 0.5 { 0.0 } else { w })
            .collect();
        let upper = p.dual_bound(&nu).min(p.dual_bound(&active));
        best.offer(p, &f, upper);
        best.iterations = iterations;
        if best.upper - best.value <= effective_tol(tol, best.value) {
            best.converged = true;
            return best;
        }
        if t >= MAX_BARRIER_PARAMETER {
            return best;
        }
        t *= 10.0;
    }
}
