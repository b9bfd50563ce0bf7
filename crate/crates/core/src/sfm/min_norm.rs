//! Fujishige–Wolfe minimum-norm-point algorithm.
//!
//! The function is normalized to `g(S) = f(S) - f(∅)` so the base polytope
//! `B(g)` is well defined. Every greedy call visits the prefixes of the current
//! order, and those prefixes are the candidate minimizers; the duality bound
//! `min g >= Σ_v min(x_v, 0)` for `x ∈ B(g)` certifies the best one.

use super::{SfmConfig, SfmError, SfmMethod, SfmResult};
use crate::oracle::{EvalContext, SetFunction, SubsetMask};

const WEIGHT_EPS: f64 = 1e-12;

struct Greedy<'a, F: ?Sized> {
    f: &'a F,
    n: usize,
    offset: f64,
}

struct Vertex {
    point: Vec<f64>,
    best_value: f64,
    best_set: SubsetMask,
}

impl<F: SetFunction + ?Sized> Greedy<'_, F> {
    /// Extreme point of `B(g)` minimizing `<x, q>`: elements in ascending
    /// order of `x`, ties by index.
    fn vertex(&self, ctx: &mut EvalContext, x: &[f64]) -> Result<Vertex, SfmError> {
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
        let mut point = vec![0.0; self.n];
        let mut prefix = SubsetMask::empty(self.n);
        let mut prev = 0.0;
        let mut best_value = 0.0;
        let mut best_len = 0;
        for (i, &v) in order.iter().enumerate() {
            prefix.insert(v);
            let value = ctx.evaluate(self.f, &prefix)? - self.offset;
            point[v] = value - prev;
            prev = value;
            if value < best_value {
                best_value = value;
                best_len = i + 1;
            }
        }
        let best_set = SubsetMask::from_indices(self.n, order[..best_len].iter().copied())?;
        Ok(Vertex { point, best_value, best_set })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn combine(points: &[Vec<f64>], coef: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; points[0].len()];
    for (p, &c) in points.iter().zip(coef) {
        for (xi, pi) in x.iter_mut().zip(p) {
            *xi += c * pi;
        }
    }
    x
}

/// Coefficients (summing to one) of the minimum-norm point in the affine hull
/// of `points`, from `(PᵀP + 11ᵀ) a = 1`. `None` when the system is singular.
fn affine_minimizer(points: &[Vec<f64>], pivot_tolerance: f64) -> Option<Vec<f64>> {
    let k = points.len();
    let mut m = vec![vec![0.0; k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            m[i][j] = dot(&points[i], &points[j]) + 1.0;
        }
        m[i][k] = 1.0;
    }
    let scale = m.iter().flat_map(|r| r[..k].iter()).fold(0.0f64, |a, v| a.max(v.abs()));
    for col in 0..k {
        let pivot_row = (col..k).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[pivot_row][col].abs() <= pivot_tolerance * scale.max(1.0) {
            return None;
        }
        m.swap(col, pivot_row);
        for row in col + 1..k {
            let factor = m[row][col] / m[col][col];
            if factor != 0.0 {
                for c in col..=k {
                    m[row][c] -= factor * m[col][c];
                }
            }
        }
    }
    let mut sol = vec![0.0; k];
    for row in (0..k).rev() {
        let tail: f64 = (row + 1..k).map(|c| m[row][c] * sol[c]).sum();
        sol[row] = (m[row][k] - tail) / m[row][row];
    }
    let total: f64 = sol.iter().sum();
    if !total.is_finite() || total.abs() < f64::EPSILON {
        return None;
    }
    Some(sol.into_iter().map(|a| a / total).collect())
}

pub(super) fn minimize<F: SetFunction + ?Sized>(f: &F, cfg: &SfmConfig) -> Result<SfmResult, SfmError> {
    let n = f.ground_size();
    let mut ctx = EvalContext::new();
    let offset = ctx.evaluate(f, &SubsetMask::empty(n))?;
    let mut scale = 1.0f64.max(ctx.evaluate(f, &SubsetMask::full(n))?.abs());
    for v in 0..n {
        scale = scale.max(ctx.evaluate(f, &SubsetMask::singleton(n, v)?)?.abs());
    }
    let gap_tolerance = cfg.gap_scale * scale;
    let max_minor = cfg.max_minor_iterations.unwrap_or(50 * n * n).max(1);

    let greedy = Greedy { f, n, offset };
    let first = greedy.vertex(&mut ctx, &vec![0.0; n])?;
    let mut best_value = 0.0;
    let mut best_set = SubsetMask::empty(n);
    if first.best_value < best_value {
        best_value = first.best_value;
        best_set = first.best_set.clone();
    }
    let mut corral = vec![first.point];
    let mut lambda: Vec<f64> = vec![1.0];
    let mut x = corral[0].clone();
    let mut majors = 0u64;
    let mut minors = 0usize;

    loop {
        majors += 1;
        let q = greedy.vertex(&mut ctx, &x)?;
        if q.best_value < best_value {
            best_value = q.best_value;
            best_set = q.best_set.clone();
        }
        let lower: f64 = x.iter().map(|&v| v.min(0.0)).sum();
        if best_value - lower <= gap_tolerance {
            break;
        }
        let xx = dot(&x, &x);
        let residual = xx - dot(&x, &q.point);
        // x already minimizes the norm to working precision
        if residual <= 1e-12 * xx.max(1.0) {
            break;
        }
        corral.push(q.point);
        lambda.push(0.0);

        loop {
            minors += 1;
            if minors > max_minor {
                return Err(SfmError::NonConvergence {
                    best_value: best_value + offset,
                    best: best_set,
                    residual,
                    iterations: minors - 1,
                });
            }
            let Some(alpha) = affine_minimizer(&corral, cfg.pivot_tolerance) else {
                // numerically dependent corral: drop the lightest old point
                if corral.len() <= 1 {
                    break;
                }
                let drop = (0..corral.len() - 1)
                    .min_by(|&a, &b| lambda[a].total_cmp(&lambda[b]))
                    .expect("corral has an old point");
                corral.remove(drop);
                lambda.remove(drop);
                let total: f64 = lambda.iter().sum();
                if total > 0.0 {
                    lambda.iter_mut().for_each(|l| *l /= total);
                } else {
                    lambda = vec![1.0 / corral.len() as f64; corral.len()];
                }
                x = combine(&corral, &lambda);
                continue;
            };
            if alpha.iter().all(|&a| a > WEIGHT_EPS) {
                x = combine(&corral, &alpha);
                lambda = alpha;
                break;
            }
            // move from the current convex combination toward alpha until a
            // coefficient hits zero
            let mut theta = 1.0f64;
            let mut leaving = 0;
            for (i, (&a, &l)) in alpha.iter().zip(&lambda).enumerate() {
                if a <= WEIGHT_EPS {
                    let denom = l - a;
                    let t = if denom > 0.0 { l / denom } else { 0.0 };
                    if t < theta {
                        theta = t;
                        leaving = i;
                    }
                }
            }
            for (l, &a) in lambda.iter_mut().zip(&alpha) {
                *l = theta * a + (1.0 - theta) * *l;
            }
            lambda[leaving] = 0.0;
            let mut i = 0;
            while i < corral.len() {
                if lambda[i] <= WEIGHT_EPS {
                    corral.remove(i);
                    lambda.remove(i);
                } else {
                    i += 1;
                }
            }
            let total: f64 = lambda.iter().sum();
            lambda.iter_mut().for_each(|l| *l /= total);
            x = combine(&corral, &lambda);
        }
    }

    let min_value = ctx.evaluate(f, &best_set)?;
    Ok(SfmResult {
        minimizer: best_set,
        min_value,
        method: SfmMethod::MinNormPoint,
        iterations: majors,
        queries_used: ctx.queries(),
    })
}
