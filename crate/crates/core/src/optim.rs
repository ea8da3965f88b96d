//! Derivative-free minimization.

use alloc::vec;
use alloc::vec::Vec;

/// Nelder-Mead settings.
#[derive(Debug, Clone, Copy)]
pub struct NelderMead {
    /// Edge length of the initial simplex along each axis.
    pub step: f64,
    /// Stop when the spread of simplex values falls below this.
    pub f_tol: f64,
    /// ...and the simplex diameter falls below this.
    pub x_tol: f64,
    /// Hard cap on objective evaluations.
    pub max_evals: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self { step: 0.1, f_tol: 1e-10, x_tol: 1e-8, max_evals: 2000 }
    }
}

/// Result of a minimization.
#[derive(Debug, Clone)]
pub struct Minimum {
    /// Best point found.
    pub x: Vec<f64>,
    /// Objective at `x`.
    pub value: f64,
    /// Objective evaluations used.
    pub evals: usize,
    /// Whether the tolerances were met before the evaluation cap.
    pub converged: bool,
}

impl NelderMead {
    /// Minimizes `f` starting from `x0`. Non-finite objective values are
    /// treated as `+inf`, so the simplex retreats from them.
    pub fn minimize<F>(&self, mut f: F, x0: &[f64]) -> Minimum
    where
        F: FnMut(&[f64]) -> f64,
    {
        let n = x0.len();
        let mut evals = 0usize;
        let mut eval = |x: &[f64], evals: &mut usize| {
            *evals += 1;
            let v = f(x);
            if v.is_finite() {
                v
            } else {
                f64::INFINITY
            }
        };
        if n == 0 {
            let value = eval(x0, &mut evals);
            return Minimum { x: Vec::new(), value, evals, converged: true };
        }

        let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        simplex.push(x0.to_vec());
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += self.step;
            simplex.push(x);
        }
        let mut values: Vec<f64> = simplex.iter().map(|x| eval(x, &mut evals)).collect();
        let mut order: Vec<usize> = (0..=n).collect();
        let mut centroid = vec![0.0; n];
        let mut trial = vec![0.0; n];
        let mut trial2 = vec![0.0; n];
        let mut converged = false;

        while evals < self.max_evals {
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
            let best = order[0];
            let worst = order[n];
            let second_worst = order[n - 1];

            let spread = values[worst] - values[best];
            let diameter = simplex
                .iter()
                .map(|x| x.iter().zip(&simplex[best]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            if spread.is_finite() && spread <= self.f_tol * (1.0 + values[best].abs()) && diameter <= self.x_tol
            {
                converged = true;
                break;
            }
            if diameter <= self.x_tol * 1e-3 {
                // collapsed simplex; nothing left to explore
                converged = true;
                break;
            }

            centroid.iter_mut().for_each(|c| *c = 0.0);
            for &i in &order[..n] {
                for (c, x) in centroid.iter_mut().zip(&simplex[i]) {
                    *c += x / n as f64;
                }
            }

            for k in 0..n {
                trial[k] = centroid[k] + (centroid[k] - simplex[worst][k]);
            }
            let reflected = eval(&trial, &mut evals);

            if reflected < values[best] {
                for k in 0..n {
                    trial2[k] = centroid[k] + 2.0 * (centroid[k] - simplex[worst][k]);
                }
                let expanded = eval(&trial2, &mut evals);
                if expanded < reflected {
                    simplex[worst].copy_from_slice(&trial2);
                    values[worst] = expanded;
                } else {
                    simplex[worst].copy_from_slice(&trial);
                    values[worst] = reflected;
                }
                continue;
            }
            if reflected < values[second_worst] {
                simplex[worst].copy_from_slice(&trial);
                values[worst] = reflected;
                continue;
            }

            // contraction, outside if the reflection helped at all
            let outside = reflected < values[worst];
            for k in 0..n {
                let toward = if outside { trial[k] } else { simplex[worst][k] };
                trial2[k] = centroid[k] + 0.5 * (toward - centroid[k]);
            }
            let contracted = eval(&trial2, &mut evals);
            if contracted < values[worst].min(reflected) {
                simplex[worst].copy_from_slice(&trial2);
                values[worst] = contracted;
                continue;
            }

            // shrink toward the best vertex
            let anchor = simplex[best].clone();
            for &i in &order[1..] {
                for (x, a) in simplex[i].iter_mut().zip(&anchor) {
                    *x = a + 0.5 * (*x - a);
                }
                values[i] = eval(&simplex[i], &mut evals);
            }
        }

        let best = (0..=n)
            .min_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)))
            .expect("simplex is non-empty");
        Minimum { x: simplex[best].clone(), value: values[best], evals, converged }
    }
}
