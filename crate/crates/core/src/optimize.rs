//! Derivative-free local minimization (Nelder-Mead) and low-discrepancy
//! start points for multi-start searches.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct NelderMead {
    pub max_evals: usize,
    /// Stop when the simplex spread of f falls below this.
    pub f_tol: f64,
    /// ...and every vertex is within this distance of the best one.
    pub x_tol: f64,
    pub initial_step: f64,
    /// Rebuild the simplex around the best point this many times after
    /// convergence, to escape a collapsed simplex.
    pub restarts: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self { max_evals: 20_000, f_tol: 1e-15, x_tol: 1e-10, initial_step: 0.3, restarts: 2 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    pub converged: bool,
}

impl NelderMead {
    pub fn minimize<F: Fn(&[f64]) -> f64>(&self, f: F, x0: &[f64]) -> Minimum {
        let mut best = self.run(&f, x0, self.initial_step);
        let mut evals = best.evals;
        for _ in 0..self.restarts {
            let step = (self.initial_step * 1e-2).max(1e3 * self.x_tol);
            let next = self.run(&f, &best.x, step);
            evals += next.evals;
            let improved = next.f < best.f;
            if next.f <= best.f {
                best = next;
            }
            if !improved {
                break;
            }
        }
        best.evals = evals;
        best
    }

    fn run<F: Fn(&[f64]) -> f64>(&self, f: &F, x0: &[f64], step: f64) -> Minimum {
        let n = x0.len();
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((x0.to_vec(), f(x0)));
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += step;
            let fx = f(&x);
            simplex.push((x, fx));
        }
        let mut evals = n + 1;
        let mut converged = false;

        while evals < self.max_evals {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let f_spread = simplex[n].1 - simplex[0].1;
            let x_spread = simplex[1..]
                .iter()
                .map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            if f_spread <= self.f_tol && x_spread <= self.x_tol {
                converged = true;
                break;
            }

            let centroid: Vec<f64> =
                (0..n).map(|d| simplex[..n].iter().map(|(x, _)| x[d]).sum::<f64>() / n as f64).collect();
            let toward =
                |t: f64| -> Vec<f64> { centroid.iter().zip(&simplex[n].0).map(|(c, w)| c + t * (w - c)).collect() };

            let xr = toward(-1.0);
            let fr = f(&xr);
            evals += 1;
            if fr < simplex[0].1 {
                let xe = toward(-2.0);
                let fe = f(&xe);
                evals += 1;
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
                continue;
            }
            // contraction, outside or inside
            let (xc, fc) = if fr < simplex[n].1 {
                let xc = toward(-0.5);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = toward(0.5);
                let fc = f(&xc);
                (xc, fc)
            };
            evals += 1;
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
                continue;
            }
            // shrink toward the best vertex
            let best = simplex[0].0.clone();
            for v in simplex.iter_mut().skip(1) {
                let x: Vec<f64> = best.iter().zip(&v.0).map(|(b, x)| b + 0.5 * (x - b)).collect();
                let fx = f(&x);
                *v = (x, fx);
            }
            evals += n;
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (x, f) = simplex.swap_remove(0);
        Minimum { x, f, evals, converged }
    }
}

/// Van der Corput radical inverse of `index` in `base`.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut out = 0.0;
    let mut scale = inv;
    while index > 0 {
        out += (index % base) as f64 * scale;
        index /= base;
        scale *= inv;
    }
    out
}

const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Halton points in [0, 1)^dim with a seeded random shift applied modulo 1.
pub fn shifted_halton(count: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    assert!(dim <= PRIMES.len(), "Halton dimension {dim} exceeds available bases");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
    (1..=count as u64).map(|i| (0..dim).map(|d| (radical_inverse(i, PRIMES[d]) + shift[d]).fract()).collect()).collect()
}
