//! The complex minimal resultant: `-log|res([f])|` as an infimum of
//! `-log|Res(M.f)|` over the Möbius group, and the degeneration gauge
//! `epsilon = (-log(|res|/C_d))^{-1}`.
//!
//! The search runs an exact piecewise-linear minimization over diagonal
//! conjugations first (closed form, also an internal consistency oracle),
//! then multistart Nelder-Mead over a 6-real-parameter chart of PGL_2(C).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::numeric::{nelder_mead, SimplexResult};
use crate::ratmap::{Mobius, RationalMap};

/// Hadamard bound for the 2d x 2d Sylvester determinant with entries of
/// modulus at most one: `H_d = (2d)^d`.
pub fn hadamard_bound_log(d: usize) -> f64 {
    d as f64 * (2.0 * d as f64).ln()
}

/// `log C_d` with the computable surrogate `C_d = e * H_d`.
pub fn log_c_d(d: usize) -> f64 {
    1.0 + hadamard_bound_log(d)
}

#[derive(Debug, Clone, Serialize)]
pub struct MinResResult {
    /// `-log` of the best (largest) normalized resultant found.
    pub neg_log_res: f64,
    /// `exp(-neg_log_res)`; underflows to zero deep into a degeneration.
    pub value: f64,
    /// Conjugating matrix attaining the best value, row major.
    pub minimizer: [[f64; 2]; 4],
    /// (evaluations, best value so far) at improvement events.
    pub trace: Vec<(usize, f64)>,
    /// Value of the exact diagonal scan, an upper bound for the infimum.
    pub scan_neg_log: f64,
    pub evals: usize,
}

impl MinResResult {
    pub fn minimizer_mobius(&self) -> Mobius<Complex64> {
        let m = &self.minimizer;
        Mobius {
            a: Complex64::new(m[0][0], m[0][1]),
            b: Complex64::new(m[1][0], m[1][1]),
            c: Complex64::new(m[2][0], m[2][1]),
            d: Complex64::new(m[3][0], m[3][1]),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EpsilonGauge {
    pub log_c_d: f64,
    pub epsilon: f64,
}

/// Exact minimization of `-log|Res(M_s . f)|` over diagonal conjugations
/// `M_s(z) = e^s z`, `s` real. Returns `(value at minimum, minimizing s)`.
///
/// Under conjugation by `diag(lambda, 1)` the coefficients scale as
/// `a_i -> lambda^(1+i) a_i`, `b_j -> lambda^j b_j`, and
/// `Res -> lambda^(d^2+d) Res`, so the objective is convex piecewise linear
/// in `s = log|lambda|` and the minimum sits where the envelope slope
/// crosses `(d+1)/2`.
pub fn diagonal_scan(f: &RationalMap<Complex64>) -> Result<(f64, f64)> {
    let d = f.degree();
    let log_res = f.log_abs_resultant();
    if !log_res.is_finite() {
        return Err(Error::Degenerate);
    }
    // lines (intercept, slope) of log|coeff| + e * s
    let mut lines: Vec<(f64, i64)> = Vec::new();
    for (i, a) in f.p().iter().enumerate() {
        if a.norm() > 0.0 {
            lines.push((a.log_abs(), (1 + i) as i64));
        }
    }
    for (j, b) in f.q().iter().enumerate() {
        if b.norm() > 0.0 {
            lines.push((b.log_abs(), j as i64));
        }
    }
    // per slope keep only the highest intercept
    lines.sort_by(|x, y| {
        x.1.cmp(&y.1)
            .then(y.0.partial_cmp(&x.0).unwrap_or(std::cmp::Ordering::Equal))
    });
    lines.dedup_by_key(|l| l.1);

    // upper envelope (max of lines), slopes strictly increasing
    let mut env: Vec<(f64, i64)> = Vec::new();
    for l in lines {
        while env.len() >= 2 {
            let a = env[env.len() - 2];
            let b = env[env.len() - 1];
            // b is useless if the a-l crossing happens left of the a-b one
            let x_ab = (b.0 - a.0) / (a.1 - b.1) as f64;
            let x_al = (l.0 - a.0) / (a.1 - l.1) as f64;
            if x_al <= x_ab {
                env.pop();
            } else {
                break;
            }
        }
        env.push(l);
    }

    let objective = |s: f64, env: &[(f64, i64)]| -> f64 {
        let u = env
            .iter()
            .map(|(c, e)| c + *e as f64 * s)
            .fold(f64::NEG_INFINITY, f64::max);
        -(log_res + (d * d + d) as f64 * s) + 2.0 * d as f64 * u
    };

    // slope of the objective on envelope piece e: 2d e - (d^2 + d);
    // find the breakpoint where it changes sign
    let target = (d as f64 + 1.0) / 2.0;
    let mut best_s = 0.0;
    if env.len() == 1 {
        // single line: objective affine; any finite minimizer is spurious
        best_s = 0.0;
    } else {
        for w in env.windows(2) {
            let (c1, e1) = w[0];
            let (c2, e2) = w[1];
            let x = (c1 - c2) / (e2 - e1) as f64;
            if (e1 as f64) < target && target <= e2 as f64 {
                best_s = x;
                break;
            }
        }
    }
    Ok((objective(best_s, &env), best_s))
}

/// Multistart derivative-free minimizer for `-log|Res(M.f)|` over PGL_2(C).
pub fn minimize_neg_log_res(
    f: &RationalMap<Complex64>,
    budget: usize,
    seed: u64,
) -> Result<MinResResult> {
    let f = f.normalize()?;
    let (scan_val, scan_s) = diagonal_scan(&f)?;

    // chart M = [[1, b], [c, d]]: params (Re b, Im b, Re c, Im c, Re d, Im d)
    let objective = |x: &[f64]| -> f64 {
        let m = Mobius {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(x[0], x[1]),
            c: Complex64::new(x[2], x[3]),
            d: Complex64::new(x[4], x[5]),
        };
        let det = m.det();
        if det.norm() < 1e-140 {
            return f64::INFINITY;
        }
        match f.conjugate(&m) {
            Ok(g) => -g.log_norm_resultant(),
            Err(_) => f64::INFINITY,
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts: Vec<(Vec<f64>, f64)> = Vec::new();
    // identity
    starts.push((vec![0.0, 0.0, 0.0, 0.0, 1.0, 0.0], 0.3));
    // three random rotations (normalized to the a = 1 chart)
    for _ in 0..3 {
        let theta: f64 = rng.gen_range(0.0..std::f64::consts::PI);
        let phi: f64 = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
        let a = Complex64::new(theta.cos(), 0.0);
        let c = Complex64::from_polar(theta.sin(), phi);
        if a.norm() < 1e-3 {
            continue;
        }
        let b = -c.conj() / a;
        let dd = a.conj() / a;
        starts.push((vec![b.re, b.im, (c / a).re, (c / a).im, dd.re, dd.im], 0.3));
    }
    // four diagonal scalings bracketing the exact scan minimizer:
    // diag(lambda, 1) in the chart is [[1,0],[0,1/lambda]]
    for ds in [-1.0, 0.0, 1.0, 2.0] {
        let s = scan_s + ds;
        let inv = (-s).exp();
        starts.push((vec![0.0, 0.0, 0.0, 0.0, inv, 0.0], (0.2 * inv).max(1e-3)));
    }

    let per_start = (budget / starts.len()).max(200);
    let results: Vec<SimplexResult> = starts
        .par_iter()
        .map(|(x0, step)| nelder_mead(objective, x0, *step, 1e-9, per_start))
        .collect();

    let mut best: Option<(usize, f64)> = None;
    for (k, r) in results.iter().enumerate() {
        if best.map(|(_, v)| r.value < v).unwrap_or(true) {
            best = Some((k, r.value));
        }
    }
    let (k_best, val) = best.ok_or_else(|| Error::Numerical("no optimizer start survived".into()))?;
    // the scan point is one of the starts, so the result can never be worse
    if val > scan_val + 1e-6 {
        return Err(Error::Internal(format!(
            "optimizer ({val}) lost to its own diagonal-scan seed ({scan_val})"
        )));
    }
    let x = &results[k_best].x;
    let mut trace: Vec<(usize, f64)> = Vec::new();
    let mut offset = 0usize;
    for r in &results {
        trace.extend(r.trace.iter().map(|(e, v)| (e + offset, *v)));
        offset += r.evals;
    }
    let evals = offset;
    Ok(MinResResult {
        neg_log_res: val,
        value: (-val).exp(),
        minimizer: [
            [1.0, 0.0],
            [x[0], x[1]],
            [x[2], x[3]],
            [x[4], x[5]],
        ],
        trace,
        scan_neg_log: scan_val,
        evals,
    })
}

/// Converts minimal-resultant values into the degeneration gauge
/// `epsilon_n = (-log(value_n / C_d))^{-1}`, clamped into `(0, 1]`.
pub fn epsilon_gauge(values: &[MinResResult], degree: usize) -> Vec<EpsilonGauge> {
    let lc = log_c_d(degree);
    values
        .iter()
        .map(|v| {
            let denom = v.neg_log_res + lc;
            let epsilon = if denom >= 1.0 { 1.0 / denom } else { 1.0 };
            EpsilonGauge { log_c_d: lc, epsilon }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratmap::ProjPoint;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn scan_quadratic_large_c() {
        // f = z^2 + c, |c| = e^L: scan profile -2s then 4L + 6s, min L at s = -L/2
        for l in [2.0f64, 5.0, 12.0] {
            let f = RationalMap::quadratic(c(l.exp(), 0.0)).unwrap().normalize().unwrap();
            let (v, s) = diagonal_scan(&f).unwrap();
            assert_relative_eq!(v, l, epsilon = 1e-6, max_relative = 1e-6);
            assert_relative_eq!(s, -l / 2.0, epsilon = 1e-6, max_relative = 1e-6);
        }
    }

    #[test]
    fn minimize_power_map_attains_zero() {
        // f = z^2 has |Res| = 1 at the identity, and 0 is the global floor
        let f = RationalMap::<Complex64>::power_map(2);
        let r = minimize_neg_log_res(&f, 4000, 11).unwrap();
        assert!(r.neg_log_res <= 1e-6, "neg_log {}", r.neg_log_res);
        // floor: |Res| never exceeds the Hadamard bound
        assert!(r.neg_log_res >= -hadamard_bound_log(2) - 1e-9);
    }

    #[test]
    fn minimize_conjugation_invariant() {
        let f = RationalMap::quadratic(c(20.0, 0.0)).unwrap();
        let n = Mobius::new(c(1.0, 0.1), c(0.4, 0.0), c(-0.2, 0.3), c(1.0, 0.0)).unwrap();
        let g = f.conjugate(&n).unwrap();
        let rf = minimize_neg_log_res(&f, 12_000, 3).unwrap();
        let rg = minimize_neg_log_res(&g, 12_000, 3).unwrap();
        let rel = (rf.neg_log_res - rg.neg_log_res).abs() / rf.neg_log_res.abs().max(1.0);
        assert!(rel < 0.01, "orbit values differ: {} vs {}", rf.neg_log_res, rg.neg_log_res);
    }

    #[test]
    fn epsilon_gauge_degenerating() {
        // f_n = z^2 + e^n: -log|res| = n + O(1), epsilon ~ 1/n
        let mut rs = Vec::new();
        for n in [6, 10, 14] {
            let f = RationalMap::quadratic(c((n as f64).exp(), 0.0)).unwrap();
            rs.push(minimize_neg_log_res(&f, 6000, 5).unwrap());
        }
        let eps = epsilon_gauge(&rs, 2);
        for (k, n) in [6usize, 10, 14].iter().enumerate() {
            let expect = 1.0 / (*n as f64 + log_c_d(2));
            assert_relative_eq!(eps[k].epsilon, expect, max_relative = 0.35);
        }
        assert!(eps[0].epsilon > eps[1].epsilon && eps[1].epsilon > eps[2].epsilon);
        let _ = ProjPoint::from_affine(c(0.0, 0.0));
    }
}
