//! Projected ascent `f <- P_C(f + α c)`, with `P_C` computed by Dykstra's
//! alternating projections onto the star constraints.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::problem::{effective_tol, Problem, Star};
use super::SolveOutcome;

const MAX_SWEEPS_PER_STEP: usize = 2_000;
const BOUND_EVERY: usize = 10;

/// Projection of the star coordinates `z = (z_centre, z_leaves...)` onto
/// `{ Σ (x_k - x_centre)^2 <= 1 }`. Returns the projected coordinates and the
/// multiplier `λ` of `x = (I + 2λ M)^{-1} z`.
pub fn project_star(z: &[f64]) -> (Vec<f64>, f64) {
    let v = z.len() - 1;
    let q: f64 = z[1..].iter().map(|zk| (zk - z[0]).powi(2)).sum();
    if q <= 1.0 {
        return (z.to_vec(), 0.0);
    }
    let vf = v as f64;
    let mean = z.iter().sum::<f64>() / (vf + 1.0);
    let w_norm = (vf * vf + vf).sqrt();
    // unit vector of eigenvalue v + 1: (v, -1, ..., -1) / sqrt(v^2 + v)
    let w = |j: usize| if j == 0 { vf / w_norm } else { -1.0 / w_norm };
    let a: f64 = z.iter().enumerate().map(|(j, zj)| (zj - mean) * w(j)).sum();
    let u: Vec<f64> = z.iter().enumerate().map(|(j, zj)| zj - mean - a * w(j)).collect();
    let uu: f64 = u.iter().map(|x| x * x).sum();
    let big = (vf + 1.0) * a * a;
    // q(λ) = uu / (1 + 2λ)^2 + big / (1 + 2λ(v+1))^2 is convex and decreasing
    let mut lambda = 0.0_f64;
    for _ in 0..100 {
        let p1 = 1.0 + 2.0 * lambda;
        let p2 = 1.0 + 2.0 * lambda * (vf + 1.0);
        let val = uu / (p1 * p1) + big / (p2 * p2) - 1.0;
        let der = -4.0 * uu / (p1 * p1 * p1) - 4.0 * (vf + 1.0) * big / (p2 * p2 * p2);
        let next = lambda - val / der;
        if (next - lambda).abs() <= 1e-15 * next.max(1.0) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    let p1 = 1.0 + 2.0 * lambda;
    let p2 = 1.0 + 2.0 * lambda * (vf + 1.0);
    let x = (0..=v).map(|j| mean + a / p2 * w(j) + u[j] / p1).collect();
    (x, lambda)
}

fn star_coords(star: &Star) -> impl Iterator<Item = usize> + '_ {
    std::iter::once(star.centre).chain(star.leaves.iter().copied())
}

/// Dykstra's algorithm for the projection of `z` onto the intersection of all
/// star sets. Returns the point, the last multipliers, and the sweeps used.
fn dykstra(p: &Problem, z: &[f64], max_sweeps: usize) -> (Vec<f64>, Vec<f64>, usize) {
    let mut x = z.to_vec();
    let mut increments: Vec<Vec<f64>> = p.stars.iter().map(|s| vec![0.0; s.leaves.len() + 1]).collect();
    let mut lambdas = vec![0.0; p.stars.len()];
    let mut sweeps = 0;
    while sweeps < max_sweeps {
        sweeps += 1;
        let mut change = 0.0_f64;
        for ((star, inc), lambda) in p.stars.iter().zip(&mut increments).zip(&mut lambdas) {
            let y: Vec<f64> = star_coords(star).zip(inc.iter()).map(|(j, d)| x[j] + d).collect();
            let (proj, l) = project_star(&y);
            for ((j, pj), (yj, d)) in star_coords(star).zip(&proj).zip(y.iter().zip(inc.iter_mut())) {
                change = change.max((x[j] - pj).abs());
                x[j] = *pj;
                *d = yj - pj;
            }
            *lambda = l;
        }
        if change <= 1e-14 {
            break;
        }
    }
    (x, lambdas, sweeps)
}

pub(crate) fn solve(p: &Problem, tol: f64, max_iterations: usize, step: f64, seed: u64) -> SolveOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start: Vec<f64> = (0..p.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut f = p.certify(&start);
    let mut best = SolveOutcome::start(p);
    best.offer(p, &f, f64::INFINITY);
    let mut iterations = 0;
    let mut outer = 0;
    while iterations < max_iterations {
        outer += 1;
        let mut z = f.clone();
        z[p.target] += step;
        z[p.source] -= step;
        let (x, lambdas, sweeps) = dykstra(p, &z, MAX_SWEEPS_PER_STEP.min(max_iterations - iterations));
        iterations += sweeps;
        let moved = x.iter().zip(&f).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        f = x;
        if outer % BOUND_EVERY == 0 || moved <= 1e-15 {
            let total: f64 = lambdas.iter().sum();
            let nu: Vec<f64> = lambdas.iter().map(|l| l + 1e-12 * total.max(1e-300)).collect();
            best.offer(p, &f, p.dual_bound(&nu));
        } else {
            best.offer(p, &f, f64::INFINITY);
        }
        best.iterations = iterations;
        if best.upper - best.value <= effective_tol(tol, best.value) {
            best.converged = true;
            break;
        }
    }
    best.iterations = iterations;
    best
}
