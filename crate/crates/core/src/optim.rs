//! Derivative-free minimization used by the rate-split optimizer.

use alloc::vec;
use alloc::vec::Vec;

pub(crate) struct NelderMead {
    pub f_tol: f64,
    pub x_tol: f64,
    pub max_iter: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead { f_tol: 1e-12, x_tol: 1e-10, max_iter: 4000 }
    }
}

impl NelderMead {
    /// Minimize `f` from `x0` with an axis-aligned initial simplex of edge `step`.
    ///
    /// `f` may return `+inf` for infeasible points. Deterministic: ties keep
    /// the earlier vertex.
    pub fn minimize(&self, mut f: impl FnMut(&[f64]) -> f64, x0: &[f64], step: f64) -> (Vec<f64>, f64) {
        let n = x0.len();
        if n == 0 {
            return (Vec::new(), f(x0));
        }
        let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += step;
            simplex.push(x);
        }
        let mut values: Vec<f64> = simplex.iter().map(|x| f(x)).collect();

        for _ in 0..self.max_iter {
            // stable sort keeps ties in insertion order
            let mut order: Vec<usize> = (0..=n).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            simplex = order.iter().map(|&i| simplex[i].clone()).collect();
            values = order.iter().map(|&i| values[i]).collect();

            let best = values[0];
            let worst = values[n];
            let diameter = simplex[1..]
                .iter()
                .map(|x| x.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            let f_spread = worst - best;
            if best.is_finite()
                && f_spread.is_finite()
                && f_spread <= self.f_tol * (1.0 + best.abs())
                && diameter <= self.x_tol
            {
                break;
            }

            let centroid: Vec<f64> = (0..n)
                .map(|k| simplex[..n].iter().map(|x| x[k]).sum::<f64>() / n as f64)
                .collect();
            let along = |t: f64| -> Vec<f64> {
                centroid.iter().zip(&simplex[n]).map(|(c, w)| c + t * (w - c)).collect()
            };

            let xr = along(-1.0);
            let fr = f(&xr);
            if fr < best {
                let xe = along(-2.0);
                let fe = f(&xe);
                if fe < fr {
                    simplex[n] = xe;
                    values[n] = fe;
                } else {
                    simplex[n] = xr;
                    values[n] = fr;
                }
                continue;
            }
            if fr < values[n - 1] {
                simplex[n] = xr;
                values[n] = fr;
                continue;
            }
            let (xc, fc) = if fr < worst {
                let xc = along(-0.5);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = along(0.5);
                let fc = f(&xc);
                (xc, fc)
            };
            if fc < worst.min(fr) {
                simplex[n] = xc;
                values[n] = fc;
                continue;
            }
            // shrink toward the best vertex
            let x_best = simplex[0].clone();
            for i in 1..=n {
                let shrunk: Vec<f64> =
                    x_best.iter().zip(&simplex[i]).map(|(b, x)| b + 0.5 * (x - b)).collect();
                values[i] = f(&shrunk);
                simplex[i] = shrunk;
            }
        }

        let mut best = 0;
        for i in 1..values.len() {
            if values[i] < values[best] {
                best = i;
            }
        }
        (simplex.swap_remove(best), values[best])
    }
}

/// All compositions of `total` into `parts` non-negative integers, in
/// lexicographic order.
pub(crate) fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=total {
            prefix.push(k);
            rec(total - k, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 {
        rec(total, parts, &mut Vec::new(), &mut out);
    }
    out
}
