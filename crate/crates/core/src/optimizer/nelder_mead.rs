//! Box-constrained Nelder–Mead simplex search.
//!
//! Works in unit-cube coordinates; trial points leaving the cube are
//! projected back onto it. Batches of independent evaluations (the initial
//! simplex and shrink steps) go through [`crate::parallel::map`], so the
//! trace order is fixed by submission order and not by completion order.

use crate::parallel;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimplexOptions {
    /// Initial simplex edge, as a fraction of each box side.
    pub initial_step: f64,
    /// Stop once the simplex diameter is below this fraction of the box
    /// diagonal.
    pub relative_tolerance: f64,
    pub max_evaluations: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions { initial_step: 0.1, relative_tolerance: 1e-4, max_evaluations: 500 }
    }
}

#[derive(Clone, Debug)]
pub struct SimplexResult {
    pub best: Vec<f64>,
    pub best_value: f64,
    /// Every evaluated point with its value, in submission order.
    pub trace: Vec<(Vec<f64>, f64)>,
    pub converged: bool,
}

struct Evaluator<'a, F> {
    f: &'a F,
    lower: &'a [f64],
    upper: &'a [f64],
    trace: Vec<(Vec<f64>, f64)>,
    budget: usize,
}

impl<F, E> Evaluator<'_, F>
where
    F: Fn(&[f64]) -> Result<f64, E> + Sync,
    E: Send,
{
    fn to_box(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(self.lower.iter().zip(self.upper))
            .map(|(&u, (&lo, &hi))| lo + u.clamp(0.0, 1.0) * (hi - lo))
            .collect()
    }

    fn exhausted(&self) -> bool {
        self.trace.len() >= self.budget
    }

    fn batch(&mut self, points: &[Vec<f64>]) -> Result<Vec<f64>, E> {
        let xs: Vec<Vec<f64>> = points.iter().map(|u| self.to_box(u)).collect();
        let f = self.f;
        let values = parallel::map(&xs, |x| f(x));
        let mut out = Vec::with_capacity(values.len());
        for (x, v) in xs.into_iter().zip(values) {
            let v = v?;
            self.trace.push((x, v));
            out.push(v);
        }
        Ok(out)
    }

    fn one(&mut self, u: &[f64]) -> Result<f64, E> {
        Ok(self.batch(&[u.to_vec()])?[0])
    }
}

fn project(u: Vec<f64>) -> Vec<f64> {
    u.into_iter().map(|v| v.clamp(0.0, 1.0)).collect()
}

fn combine(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    // a + t (b - a)
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Minimizes `f` over the box `[lower, upper]` starting from `start`.
///
/// Deterministic for a deterministic `f`. Errors from `f` abort the search.
pub fn minimize<F, E>(
    f: &F,
    start: &[f64],
    lower: &[f64],
    upper: &[f64],
    options: SimplexOptions,
) -> Result<SimplexResult, E>
where
    F: Fn(&[f64]) -> Result<f64, E> + Sync,
    E: Send,
{
    let n = start.len();
    assert!(n > 0 && lower.len() == n && upper.len() == n);
    let mut ev = Evaluator { f, lower, upper, trace: Vec::new(), budget: options.max_evaluations };

    let u0: Vec<f64> = (0..n).map(|i| ((start[i] - lower[i]) / (upper[i] - lower[i])).clamp(0.0, 1.0)).collect();
    let mut simplex = vec![u0.clone()];
    for i in 0..n {
        let mut v = u0.clone();
        let step = if v[i] + options.initial_step <= 1.0 { options.initial_step } else { -options.initial_step };
        v[i] += step;
        simplex.push(v);
    }
    let mut values = ev.batch(&simplex)?;
    let tolerance = options.relative_tolerance * (n as f64).sqrt();
    let mut converged = false;

    loop {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let diameter = simplex[1..].iter().map(|v| distance(v, &simplex[0])).fold(0.0, f64::max);
        if diameter < tolerance {
            converged = true;
            break;
        }
        if ev.exhausted() {
            break;
        }

        let centroid: Vec<f64> = (0..n).map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / n as f64).collect();
        let worst = simplex[n].clone();

        let reflected = project(combine(&centroid, &worst, -1.0));
        let fr = ev.one(&reflected)?;
        if fr < values[0] {
            let expanded = project(combine(&centroid, &worst, -2.0));
            let fe = if ev.exhausted() { f64::INFINITY } else { ev.one(&expanded)? };
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
            continue;
        }
        if ev.exhausted() {
            break;
        }
        let (contracted, threshold) = if fr < values[n] {
            (combine(&centroid, &reflected, 0.5), fr)
        } else {
            (combine(&centroid, &worst, 0.5), values[n])
        };
        let fc = ev.one(&contracted)?;
        if fc < threshold {
            simplex[n] = contracted;
            values[n] = fc;
            continue;
        }
        if ev.exhausted() {
            break;
        }
        let best = simplex[0].clone();
        let shrunk: Vec<Vec<f64>> = simplex[1..].iter().map(|v| combine(&best, v, 0.5)).collect();
        let fs = ev.batch(&shrunk)?;
        for (k, (v, f)) in shrunk.into_iter().zip(fs).enumerate() {
            simplex[k + 1] = v;
            values[k + 1] = f;
        }
    }

    let (best_u, best_value) = simplex
        .iter()
        .zip(&values)
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(u, v)| (u.clone(), *v))
        .expect("nonempty simplex");
    Ok(SimplexResult { best: ev.to_box(&best_u), best_value, trace: ev.trace, converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    fn quadratic(x: &[f64]) -> Result<f64, Infallible> {
        Ok((x[0] - 1.5).powi(2) + 3.0 * (x[1] + 0.25).powi(2) + 0.5 * (x[0] - 1.5) * (x[1] + 0.25))
    }

    #[test]
    fn finds_quadratic_minimum() {
        let opts = SimplexOptions { relative_tolerance: 1e-9, max_evaluations: 2000, ..Default::default() };
        let r = minimize(&quadratic, &[0.0, 0.0], &[-2.0, -2.0], &[3.0, 3.0], opts).unwrap();
        assert!(r.converged);
        assert!((r.best[0] - 1.5).abs() < 1e-6, "{:?}", r.best);
        assert!((r.best[1] + 0.25).abs() < 1e-6, "{:?}", r.best);
        assert!(r.trace.len() <= 2000);
    }

    #[test]
    fn respects_bounds() {
        let f = |x: &[f64]| -> Result<f64, Infallible> { Ok((x[0] - 10.0).powi(2)) };
        let r = minimize(&f, &[0.5], &[0.0], &[2.0], SimplexOptions::default()).unwrap();
        assert!((r.best[0] - 2.0).abs() < 1e-3);
        assert!(r.trace.iter().all(|(x, _)| x[0] >= 0.0 && x[0] <= 2.0));
    }

    #[test]
    fn budget_is_honored() {
        let opts = SimplexOptions { relative_tolerance: 0.0, max_evaluations: 37, ..Default::default() };
        let r = minimize(&quadratic, &[0.0, 0.0], &[-2.0, -2.0], &[3.0, 3.0], opts).unwrap();
        assert!(!r.converged);
        // a shrink batch may overshoot by at most n − 1
        assert!(r.trace.len() <= 38);
    }

    #[test]
    fn deterministic_trace() {
        let a = minimize(&quadratic, &[2.0, 1.0], &[-2.0, -2.0], &[3.0, 3.0], SimplexOptions::default()).unwrap();
        let b = minimize(&quadratic, &[2.0, 1.0], &[-2.0, -2.0], &[3.0, 3.0], SimplexOptions::default()).unwrap();
        assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn errors_abort() {
        let f = |x: &[f64]| if x[0] > 0.7 { Err("boom") } else { Ok(x[0]) };
        assert_eq!(minimize(&f, &[0.5], &[0.0], &[10.0], SimplexOptions::default()).unwrap_err(), "boom");
    }
}
