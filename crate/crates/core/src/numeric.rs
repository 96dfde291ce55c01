//! Floating-point workhorses shared across modules: complex polynomial
//! roots, a plain Nelder-Mead simplex, and a couple of statistics helpers.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Roots of `c[0] + c[1] z + ... + c[n] z^n` by the Aberth-Ehrlich method.
///
/// Trailing zero coefficients are stripped; the returned vector has exactly
/// `deg` entries (repeated roots appear repeatedly, to numerical accuracy).
pub fn poly_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().map(|z| z.norm() == 0.0).unwrap_or(false) {
        c.pop();
    }
    if c.len() <= 1 {
        return Err(Error::Invalid("constant polynomial has no roots".into()));
    }
    let deg = c.len() - 1;
    if deg == 1 {
        return Ok(vec![-c[0] / c[1]]);
    }
    if deg == 2 {
        // closed form; this is the hot path for quadratic families
        let (a, b, cc) = (c[2], c[1], c[0]);
        let disc = (b * b - 4.0 * a * cc).sqrt();
        // pick the sign that avoids cancellation
        let q = if (b + disc).norm() >= (b - disc).norm() {
            -0.5 * (b + disc)
        } else {
            -0.5 * (b - disc)
        };
        let r1 = q / a;
        let r2 = if q.norm() > 0.0 { cc / q } else { -b / a - r1 };
        return Ok(vec![r1, r2]);
    }

    // factor out roots at the origin
    let mut zeros_at_origin = 0;
    while c.first().map(|z| z.norm() == 0.0).unwrap_or(false) {
        c.remove(0);
        zeros_at_origin += 1;
    }
    let m = c.len() - 1;
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros_at_origin];
    if m == 0 {
        return Ok(roots);
    }

    // Cauchy-style radius for the initial circle
    let lead = c[m].norm();
    let radius = 1.0
        + c[..m]
            .iter()
            .map(|z| (z.norm() / lead).powf(1.0 / m as f64))
            .fold(0.0f64, f64::max);
    let mut zs: Vec<Complex64> = (0..m)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.35) / m as f64 + 0.4;
            Complex64::from_polar(radius * (0.6 + 0.4 * ((k % 3) as f64 / 3.0)), theta)
        })
        .collect();

    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &ck in c.iter().rev() {
            dp = dp * z + p;
            p = p * z + ck;
        }
        (p, dp)
    };

    for _ in 0..400 {
        let mut done = true;
        for i in 0..m {
            let (p, dp) = eval(zs[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let newton = if dp.norm() > 0.0 { p / dp } else { Complex64::new(1e-12, 0.0) };
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..m {
                if j != i {
                    let d = zs[i] - zs[j];
                    if d.norm() > 1e-300 {
                        s += 1.0 / d;
                    }
                }
            }
            let denom = 1.0 - newton * s;
            let delta = if denom.norm() > 1e-300 { newton / denom } else { newton };
            zs[i] -= delta;
            let scale = zs[i].norm().max(1.0);
            if delta.norm() > 1e-13 * scale {
                done = false;
            }
        }
        if done {
            roots.extend_from_slice(&zs);
            return Ok(roots);
        }
    }
    // accept when residuals are small even if increments stalled
    let ok = zs.iter().all(|&z| {
        let (p, _) = eval(z);
        p.norm() <= 1e-8 * (lead * z.norm().max(1.0).powi(m as i32)).max(1.0)
    });
    if ok {
        roots.extend_from_slice(&zs);
        Ok(roots)
    } else {
        Err(Error::Numerical("polynomial root iteration did not converge".into()))
    }
}

/// Result of a simplex minimization.
#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
    /// (evaluation count, best value so far), recorded on improvement.
    pub trace: Vec<(usize, f64)>,
}

/// Standard Nelder-Mead on `f: R^n -> R`, no constraints.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    start: &[f64],
    step: f64,
    rel_tol: f64,
    max_evals: usize,
) -> SimplexResult {
    let n = start.len();
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut evals = 0usize;
    let mut trace = Vec::new();
    let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = eval(start, &mut evals);
    trace.push((evals, v0));
    simplex.push((start.to_vec(), v0));
    for i in 0..n {
        let mut x = start.to_vec();
        x[i] += if x[i].abs() > 1e-8 { step * x[i].abs() } else { step };
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }

    let mut best = v0;
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        if simplex[0].1 < best {
            best = simplex[0].1;
            trace.push((evals, best));
        }
        let spread = (simplex[n].1 - simplex[0].1).abs();
        let scale = simplex[0].1.abs().max(1.0);
        if spread <= rel_tol * scale {
            return SimplexResult {
                x: simplex[0].0.clone(),
                value: simplex[0].1,
                evals,
                converged: true,
                trace,
            };
        }
        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / n as f64)
            .collect();
        let xr: Vec<f64> = (0..n)
            .map(|j| centroid[j] + alpha * (centroid[j] - simplex[n].0[j]))
            .collect();
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe: Vec<f64> = (0..n)
                .map(|j| centroid[j] + gamma * (xr[j] - centroid[j]))
                .collect();
            let fe = eval(&xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let xc: Vec<f64> = (0..n)
                .map(|j| centroid[j] + rho * (simplex[n].0[j] - centroid[j]))
                .collect();
            let fc = eval(&xc, &mut evals);
            if fc < simplex[n].1 {
                simplex[n] = (xc, fc);
            } else {
                // shrink toward the best vertex
                let x0 = simplex[0].0.clone();
                for k in 1..=n {
                    let xs: Vec<f64> = (0..n)
                        .map(|j| x0[j] + sigma * (simplex[k].0[j] - x0[j]))
                        .collect();
                    let fs = eval(&xs, &mut evals);
                    simplex[k] = (xs, fs);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    SimplexResult {
        x: simplex[0].0.clone(),
        value: simplex[0].1,
        evals,
        converged: false,
        trace,
    }
}

/// Mean and jackknife standard error of the mean.
pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, f64::INFINITY);
    }
    // jackknife pseudo-values of the mean reduce to the classical estimator
    let ss = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
    let se = (ss / ((n - 1) as f64 * n as f64)).sqrt();
    (mean, se)
}

/// Two-point Richardson extrapolation of `a_n = L + c/n + o(1/n)` from the
/// last two entries of a sequence indexed by `ns`.
pub fn richardson_limit(ns: &[f64], values: &[f64]) -> f64 {
    assert_eq!(ns.len(), values.len());
    let k = values.len();
    if k == 0 {
        return f64::NAN;
    }
    if k == 1 {
        return values[0];
    }
    let (n1, n2) = (ns[k - 2], ns[k - 1]);
    let (a1, a2) = (values[k - 2], values[k - 1]);
    // solve a_i = L + c/n_i
    (a2 * n2 - a1 * n1) / (n2 - n1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn roots_of_cubic() {
        // (z-1)(z-2)(z+3) = z^3 - 7z + 6
        let c = [
            Complex64::new(6.0, 0.0),
            Complex64::new(-7.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ];
        let mut roots: Vec<f64> = poly_roots(&c).unwrap().iter().map(|z| z.re).collect();
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_relative_eq!(roots[0], -3.0, epsilon = 1e-9);
        assert_relative_eq!(roots[1], 1.0, epsilon = 1e-9);
        assert_relative_eq!(roots[2], 2.0, epsilon = 1e-9);
    }

    #[test]
    fn roots_quadratic_huge_coeff() {
        // z^2 + c with |c| = e^40
        let big = (40.0f64).exp();
        let c = [
            Complex64::new(big, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ];
        let roots = poly_roots(&c).unwrap();
        for r in roots {
            assert_relative_eq!(r.norm(), big.sqrt(), max_relative = 1e-12);
        }
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let res = nelder_mead(
            |x| {
                let (a, b) = (x[0], x[1]);
                (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2)
            },
            &[-1.2, 1.0],
            0.5,
            1e-12,
            20_000,
        );
        assert!(res.value < 1e-8, "value {}", res.value);
    }

    #[test]
    fn richardson_converges() {
        let ns: Vec<f64> = (10..=40).map(|n| n as f64).collect();
        let vals: Vec<f64> = ns.iter().map(|n| 0.5 + 3.0 / n).collect();
        assert_relative_eq!(richardson_limit(&ns, &vals), 0.5, epsilon = 1e-9);
    }
}
