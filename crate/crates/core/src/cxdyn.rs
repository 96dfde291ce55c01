//! Complex dynamics at a single parameter: equilibrium-measure sampling by
//! backward iteration, Monte Carlo Lyapunov exponents, polynomial escape
//! rates, and model-function integrals.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{mean_and_stderr, poly_roots};
use crate::ratmap::{model_fn_eval, ProjPoint, RationalMap};

/// Chunk width for parallel sampling; fixed so that parallel and serial
/// runs produce identical streams.
const CHUNK: usize = 1024;

/// Equal-weight atomic sample of `d^{-n} f^{n*} mu_can`.
#[derive(Debug, Clone)]
pub struct MeasureSample {
    pub points: Vec<ProjPoint<Complex64>>,
    pub depth: u32,
    pub seed: u64,
}

impl MeasureSample {
    pub fn weight(&self) -> f64 {
        1.0 / self.points.len() as f64
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LyapunovEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: usize,
    pub depth: u32,
    pub seed: u64,
}

/// One backward step: a uniformly chosen preimage of `w` under `f`,
/// weighted by multiplicity.
fn random_preimage(
    f: &RationalMap<Complex64>,
    w: &ProjPoint<Complex64>,
    rng: &mut ChaCha8Rng,
) -> Result<ProjPoint<Complex64>> {
    let d = f.degree();
    // roots of w1 P(z,1) - w0 Q(z,1), ascending in z
    let mut h = vec![Complex64::new(0.0, 0.0); d + 1];
    for i in 0..=d {
        h[d - i] = w.z1 * f.p()[i] - w.z0 * f.q()[i];
    }
    let mut hh = h.clone();
    while hh.last().map(|z| z.norm() == 0.0).unwrap_or(false) {
        hh.pop();
    }
    let finite = if hh.len() <= 1 { 0 } else { hh.len() - 1 };
    let pick = rng.gen_range(0..d);
    if pick >= finite {
        // the preimage at infinity, multiplicity d - finite
        return Ok(ProjPoint::infinity());
    }
    let roots = poly_roots(&hh)?;
    ProjPoint::from_affine(roots[pick])
}

/// Samples `n_samples` points of the depth-`n` backward iterate of the Haar
/// measure on the unit circle. Chains are independent; a per-chain counter
/// RNG keyed on `(seed, chain)` makes runs bit-reproducible.
pub fn sample_equilibrium(
    f: &RationalMap<Complex64>,
    n_samples: usize,
    depth: u32,
    seed: u64,
) -> Result<MeasureSample> {
    if f.degree() < 2 {
        return Err(Error::Invalid("equilibrium sampling needs degree >= 2".into()));
    }
    let f = f.normalize()?;
    let chunks: Vec<usize> = (0..n_samples.div_ceil(CHUNK)).collect();
    let results: Vec<Result<Vec<ProjPoint<Complex64>>>> = chunks
        .par_iter()
        .map(|&chunk| {
            let lo = chunk * CHUNK;
            let hi = ((chunk + 1) * CHUNK).min(n_samples);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64 + 1);
            let mut out = Vec::with_capacity(hi - lo);
            let mut failures = 0usize;
            for _ in lo..hi {
                loop {
                    match backward_orbit(&f, depth, &mut rng) {
                        Ok(p) => {
                            out.push(p);
                            break;
                        }
                        Err(_) => {
                            failures += 1;
                            if failures > 100 {
                                return Err(Error::Numerical(
                                    "backward sampler: too many root-finder failures".into(),
                                ));
                            }
                        }
                    }
                }
            }
            Ok(out)
        })
        .collect();
    let mut points = Vec::with_capacity(n_samples);
    for r in results {
        points.extend(r?);
    }
    Ok(MeasureSample { points, depth, seed })
}

fn backward_orbit(
    f: &RationalMap<Complex64>,
    depth: u32,
    rng: &mut ChaCha8Rng,
) -> Result<ProjPoint<Complex64>> {
    let theta: f64 = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
    let mut w = ProjPoint::from_affine(Complex64::from_polar(1.0, theta))?;
    for _ in 0..depth {
        w = random_preimage(f, &w, rng)?;
    }
    Ok(w)
}

/// Monte Carlo Lyapunov exponent: the mean of `log |df|` over an
/// equilibrium sample, with jackknife standard error. Samples falling on a
/// critical point (within 1e-12) are redrawn.
pub fn lyapunov_mc(
    f: &RationalMap<Complex64>,
    n_samples: usize,
    depth: u32,
    seed: u64,
) -> Result<LyapunovEstimate> {
    let fnorm = f.normalize()?;
    let sample = sample_equilibrium(&fnorm, n_samples, depth, seed)?;
    let mut values = Vec::with_capacity(sample.points.len());
    let mut redraw_rng = ChaCha8Rng::seed_from_u64(seed);
    redraw_rng.set_stream(0);
    for p in &sample.points {
        let mut v = fnorm.log_spherical_derivative(p)?;
        let mut tries = 0;
        while v < -27.0 {
            // log|df| is integrable but unbounded below near critical points
            tries += 1;
            if tries > 100 {
                return Err(Error::Numerical("persistent critical-point hits".into()));
            }
            let q = backward_orbit(&fnorm, depth, &mut redraw_rng)?;
            v = fnorm.log_spherical_derivative(&q)?;
        }
        values.push(v);
    }
    let (estimate, stderr) = mean_and_stderr(&values);
    Ok(LyapunovEstimate {
        estimate,
        stderr,
        samples: values.len(),
        depth,
        seed,
    })
}

/// Green escape rate `G(z) = lim d^{-n} log^+ |p^n(z)|` of a monic
/// polynomial, ascending coefficients `p[0] + p[1] z + ... + z^d`.
pub fn green_escape_rate(poly: &[Complex64], z: Complex64) -> Result<f64> {
    let d = poly.len() - 1;
    if d < 2 {
        return Err(Error::Invalid("escape rate needs degree >= 2".into()));
    }
    if (poly[d] - Complex64::new(1.0, 0.0)).norm() > 1e-14 {
        return Err(Error::Invalid("escape rate expects a monic polynomial".into()));
    }
    let coeff_sum: f64 = poly[..d].iter().map(|c| c.norm()).sum();
    let escape = 2.0 + 2.0 * coeff_sum;
    let dd = d as f64;

    let mut w = z;
    let mut n = 0u32;
    while w.norm() <= escape {
        w = crate::poly::eval(poly, &w);
        n += 1;
        if n > 20_000 {
            return Ok(0.0); // bounded orbit
        }
    }
    // after escape: G = d^{-n} (log|w| + sum_k d^{-k-1} log|p(w_k)/w_k^d|)
    let mut g = w.norm().ln();
    let mut factor = 1.0 / dd;
    for _ in 0..200 {
        if w.norm() > 1e100 {
            break; // corrections are O(|w|^{1-d}), below any tolerance
        }
        let next = crate::poly::eval(poly, &w);
        let corr = next.norm().ln() - dd * w.norm().ln();
        g += factor * corr;
        if factor * corr.abs() < 1e-14 * g.abs().max(1.0) && w.norm() > 1e8 {
            break;
        }
        factor /= dd;
        w = next;
    }
    Ok(g / dd.powi(n as i32))
}

/// Lyapunov exponent of a monic polynomial via the escape-rate formula
/// `chi = log d + sum over finite critical points of G(c)`. Serves as an
/// independent oracle for `lyapunov_mc` on polynomial maps.
pub fn lyapunov_polynomial_oracle(poly: &[Complex64]) -> Result<f64> {
    let d = poly.len() - 1;
    let dp: Vec<Complex64> = crate::poly::derivative(poly);
    let crits = poly_roots(&dp)?;
    let mut chi = (d as f64).ln();
    for c in crits {
        chi += green_escape_rate(poly, c)?;
    }
    Ok(chi)
}

/// Monte Carlo integral of a model function against a measure sample.
/// Base-point hits (value `-inf`) carry measure zero and are dropped; more
/// than 1% of them signals bad data.
pub fn integrate_model_fn(
    sample: &MeasureSample,
    sections: &[Vec<Complex64>],
    scale: f64,
) -> Result<f64> {
    let mut acc = 0.0f64;
    let mut kept = 0usize;
    for p in &sample.points {
        let v = model_fn_eval(sections, p, scale)?;
        if v.is_finite() {
            acc += v;
            kept += 1;
        }
    }
    if kept * 100 < sample.points.len() * 99 {
        return Err(Error::Numerical("too many base-point hits in model-fn integral".into()));
    }
    Ok(acc / kept as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn squaring_samples_live_on_circle() {
        let f = RationalMap::power_map(2);
        let s = sample_equilibrium(&f, 4000, 12, 41).unwrap();
        let mut acc = 0.0;
        for p in &s.points {
            let z = p.affine().unwrap();
            acc += z.norm().ln();
            assert!((z.norm() - 1.0).abs() < 1e-9);
        }
        let mean = acc / s.points.len() as f64;
        assert!(mean.abs() <= 3.0 / (s.points.len() as f64).sqrt() + 1e-9);
    }

    #[test]
    fn chebyshev_samples_on_interval() {
        // z^2 - 2 keeps its Julia set in [-2, 2]
        let f = RationalMap::quadratic(c(-2.0, 0.0)).unwrap();
        let s = sample_equilibrium(&f, 2000, 20, 7).unwrap();
        for p in &s.points {
            let z = p.affine().unwrap();
            assert!(z.im.abs() < 1e-6, "imaginary part {}", z.im);
            assert!(z.re.abs() <= 2.0 + 1e-6);
        }
    }

    #[test]
    fn lyapunov_of_power_maps() {
        for d in [2usize, 3] {
            let f = RationalMap::power_map(d);
            let r = lyapunov_mc(&f, 20_000, 10, 3).unwrap();
            let expect = (d as f64).ln();
            assert!(
                (r.estimate - expect).abs() <= 3.0 * r.stderr.max(1e-6),
                "chi({d}) = {} +- {}, want {expect}",
                r.estimate,
                r.stderr
            );
            // paper bound: chi >= (1/2) log d
            assert!(r.estimate >= 0.5 * expect - 3.0 * r.stderr);
        }
    }

    #[test]
    fn lyapunov_matches_polynomial_oracle() {
        // |c| large: chi = log 2 + G(0)
        let cc = c(8.0, 3.0);
        let f = RationalMap::quadratic(cc).unwrap();
        let mc = lyapunov_mc(&f, 30_000, 14, 9).unwrap();
        let poly = vec![cc, c(0.0, 0.0), c(1.0, 0.0)];
        let oracle = lyapunov_polynomial_oracle(&poly).unwrap();
        assert!(
            (mc.estimate - oracle).abs() <= 4.0 * mc.stderr + 1e-3,
            "mc {} vs oracle {oracle} (se {})",
            mc.estimate,
            mc.stderr
        );
    }

    #[test]
    fn green_values_for_squaring() {
        let p = vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        assert_relative_eq!(
            green_escape_rate(&p, c(2.0, 0.0)).unwrap(),
            (2.0f64).ln(),
            max_relative = 1e-9
        );
        assert_eq!(green_escape_rate(&p, c(0.5, 0.0)).unwrap(), 0.0);
    }

    #[test]
    fn green_functional_equation() {
        use rand::Rng;
        let poly = vec![c(1.5, 0.2), c(0.0, 0.0), c(1.0, 0.0)];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let z = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let g = green_escape_rate(&poly, z).unwrap();
            if g < 1e-6 {
                continue;
            }
            let fz = crate::poly::eval(&poly, &z);
            let gf = green_escape_rate(&poly, fz).unwrap();
            assert_relative_eq!(gf, 2.0 * g, max_relative = 1e-9);
        }
    }

    #[test]
    fn pushforward_invariance_of_integrals() {
        // f_* mu_f = mu_f: integrating a model function before and after
        // pushing samples forward agrees at Monte Carlo accuracy
        let f = RationalMap::quadratic(c(0.2, 0.1)).unwrap().normalize().unwrap();
        let s = sample_equilibrium(&f, 20_000, 15, 13).unwrap();
        let sections = vec![vec![c(1.0, 0.0), c(-2.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]];
        let before = integrate_model_fn(&s, &sections, 1.0).unwrap();
        let pushed = MeasureSample {
            points: s
                .points
                .iter()
                .map(|p| f.evaluate(p).unwrap())
                .collect(),
            depth: s.depth,
            seed: s.seed,
        };
        let after = integrate_model_fn(&pushed, &sections, 1.0).unwrap();
        assert!(
            (before - after).abs() < 0.05,
            "pushforward drift {before} vs {after}"
        );
    }
}
