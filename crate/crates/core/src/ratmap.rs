//! Rational maps of the projective line in homogeneous coordinates, generic
//! over the scalar field: resultants, normalization, conjugation, iteration,
//! spherical derivatives and model-function evaluation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Scalar;

/// A point of the projective line, stored as a homogeneous pair normalized
/// so the larger coordinate has norm one.
#[derive(Debug, Clone)]
pub struct ProjPoint<K: Scalar> {
    pub z0: K,
    pub z1: K,
}

impl<K: Scalar> ProjPoint<K> {
    pub fn new(z0: K, z1: K) -> Result<Self> {
        if z0.is_zero() && z1.is_zero() {
            return Err(Error::Invalid("projective point (0:0)".into()));
        }
        let mut p = ProjPoint { z0, z1 };
        p.renormalize()?;
        Ok(p)
    }

    pub fn from_affine(z: K) -> Result<Self> {
        ProjPoint::new(z, K::one())
    }

    pub fn infinity() -> Self {
        ProjPoint {
            z0: K::one(),
            z1: K::zero(),
        }
    }

    pub fn is_infinity(&self) -> bool {
        self.z1.is_zero()
    }

    /// Affine coordinate `z0 / z1`.
    pub fn affine(&self) -> Result<K> {
        self.z0.try_div(&self.z1)
    }

    fn renormalize(&mut self) -> Result<()> {
        let big = if self.z0.cmp_abs(&self.z1) == std::cmp::Ordering::Less {
            self.z1.clone()
        } else {
            self.z0.clone()
        };
        let n = big.normalizer();
        self.z0 = self.z0.try_div(&n)?;
        self.z1 = self.z1.try_div(&n)?;
        Ok(())
    }

    /// Scale-invariant equality, exact over exact fields.
    pub fn same_point(&self, other: &Self) -> bool {
        (self.z0.clone() * other.z1.clone() - self.z1.clone() * other.z0.clone()).is_zero()
    }
}

/// Spherical chordal distance on the Riemann sphere (diameter one).
pub fn spherical_distance(a: &ProjPoint<Complex64>, b: &ProjPoint<Complex64>) -> f64 {
    let cross = (a.z0 * b.z1 - a.z1 * b.z0).norm();
    let na = (a.z0.norm_sqr() + a.z1.norm_sqr()).sqrt();
    let nb = (b.z0.norm_sqr() + b.z1.norm_sqr()).sqrt();
    cross / (na * nb)
}

/// A Möbius transformation as a 2x2 matrix modulo scaling.
#[derive(Debug, Clone)]
pub struct Mobius<K: Scalar> {
    pub a: K,
    pub b: K,
    pub c: K,
    pub d: K,
}

impl<K: Scalar> Mobius<K> {
    pub fn new(a: K, b: K, c: K, d: K) -> Result<Self> {
        let m = Mobius { a, b, c, d };
        if m.det().is_zero() {
            return Err(Error::Invalid("singular Möbius matrix".into()));
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        Mobius {
            a: K::one(),
            b: K::zero(),
            c: K::zero(),
            d: K::one(),
        }
    }

    /// `z -> s z + t`.
    pub fn affine(s: K, t: K) -> Result<Self> {
        Mobius::new(s, t, K::zero(), K::one())
    }

    pub fn det(&self) -> K {
        self.a.clone() * self.d.clone() - self.b.clone() * self.c.clone()
    }

    /// Adjugate: the inverse up to scaling.
    pub fn inverse(&self) -> Self {
        Mobius {
            a: self.d.clone(),
            b: -self.b.clone(),
            c: -self.c.clone(),
            d: self.a.clone(),
        }
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        Mobius {
            a: self.a.clone() * rhs.a.clone() + self.b.clone() * rhs.c.clone(),
            b: self.a.clone() * rhs.b.clone() + self.b.clone() * rhs.d.clone(),
            c: self.c.clone() * rhs.a.clone() + self.d.clone() * rhs.c.clone(),
            d: self.c.clone() * rhs.b.clone() + self.d.clone() * rhs.d.clone(),
        }
    }

    pub fn apply(&self, x: &ProjPoint<K>) -> Result<ProjPoint<K>> {
        ProjPoint::new(
            self.a.clone() * x.z0.clone() + self.b.clone() * x.z1.clone(),
            self.c.clone() * x.z0.clone() + self.d.clone() * x.z1.clone(),
        )
    }
}

/// Degree-`d` rational map `[P : Q]` with `P = sum a_i z0^(d-i) z1^i`.
///
/// Construction rejects pairs with vanishing resultant. `normalized` records
/// whether the maximum coefficient norm is one.
#[derive(Debug, Clone)]
pub struct RationalMap<K: Scalar> {
    degree: usize,
    /// a_0..a_d, ordered by decreasing power of z0
    p: Vec<K>,
    /// b_0..b_d
    q: Vec<K>,
    normalized: bool,
}

impl<K: Scalar> RationalMap<K> {
    pub fn new(degree: usize, p: Vec<K>, q: Vec<K>) -> Result<Self> {
        if degree == 0 || p.len() != degree + 1 || q.len() != degree + 1 {
            return Err(Error::Invalid(format!(
                "need {} coefficients for each of P and Q",
                degree + 1
            )));
        }
        let map = RationalMap {
            degree,
            p,
            q,
            normalized: false,
        };
        if map.try_resultant()?.is_zero() {
            return Err(Error::Degenerate);
        }
        Ok(map)
    }

    /// `z -> z^d`.
    pub fn power_map(d: usize) -> Self {
        let mut p = vec![K::zero(); d + 1];
        let mut q = vec![K::zero(); d + 1];
        p[0] = K::one();
        q[d] = K::one();
        RationalMap {
            degree: d,
            p,
            q,
            normalized: true,
        }
    }

    /// The polynomial `z^2 + c`.
    pub fn quadratic(c: K) -> Result<Self> {
        RationalMap::new(2, vec![K::one(), K::zero(), c], vec![K::zero(), K::zero(), K::one()])
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn p(&self) -> &[K] {
        &self.p
    }

    pub fn q(&self) -> &[K] {
        &self.q
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    fn max_coeff(&self) -> K {
        let mut best = self.p[0].clone();
        for c in self.p.iter().chain(self.q.iter()) {
            if best.cmp_abs(c) == std::cmp::Ordering::Less {
                best = c.clone();
            }
        }
        best
    }

    /// Rescales so that the maximum coefficient norm is one.
    pub fn normalize(&self) -> Result<Self> {
        let n = self.max_coeff().normalizer();
        let div = |v: &[K]| -> Result<Vec<K>> { v.iter().map(|c| c.try_div(&n)).collect() };
        Ok(RationalMap {
            degree: self.degree,
            p: div(&self.p)?,
            q: div(&self.q)?,
            normalized: true,
        })
    }

    /// Natural log of the largest coefficient norm.
    pub fn log_max_coeff(&self) -> f64 {
        self.max_coeff().log_abs()
    }

    /// Determinant of the 2d x 2d Sylvester matrix of `(P, Q)`.
    ///
    /// Fraction-free Bareiss elimination: over exact fields every division
    /// is exact, which keeps Puiseux entries finite.
    pub fn try_resultant(&self) -> Result<K> {
        let d = self.degree;
        let n = 2 * d;
        let mut m = vec![vec![K::zero(); n]; n];
        for col in 0..d {
            for (i, a) in self.p.iter().enumerate() {
                m[col + i][col] = a.clone();
            }
            for (i, b) in self.q.iter().enumerate() {
                m[col + i][col + d] = b.clone();
            }
        }
        bareiss_det(m)
    }

    pub fn resultant(&self) -> K {
        self.try_resultant()
            .expect("resultant computable on a constructed map")
    }

    /// `log |Res(P,Q)|` for the complex field, full-pivot elimination in
    /// log scale (safe across hundreds of orders of magnitude).
    pub fn log_abs_resultant(&self) -> f64
    where
        K: ComplexLike,
    {
        let d = self.degree;
        let n = 2 * d;
        let mut m = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for col in 0..d {
            for (i, a) in self.p.iter().enumerate() {
                m[col + i][col] = a.to_c64();
            }
            for (i, b) in self.q.iter().enumerate() {
                m[col + i][col + d] = b.to_c64();
            }
        }
        log_abs_det_full_pivot(m)
    }

    /// Scale-invariant `log |Res(f)| = log|Res(P,Q)| - 2d log max|coeff|`.
    pub fn log_norm_resultant(&self) -> f64
    where
        K: ComplexLike,
    {
        self.log_abs_resultant() - (2 * self.degree) as f64 * self.log_max_coeff()
    }

    pub fn evaluate(&self, x: &ProjPoint<K>) -> Result<ProjPoint<K>> {
        let pv = eval_homogeneous(&self.p, &x.z0, &x.z1);
        let qv = eval_homogeneous(&self.q, &x.z0, &x.z1);
        ProjPoint::new(pv, qv)
    }

    /// Conjugation `M . f = M o f o M^{-1}`, renormalized. The conjugate of
    /// a nondegenerate map is nondegenerate, so no resultant recheck here.
    pub fn conjugate(&self, m: &Mobius<K>) -> Result<Self> {
        let inv = m.inverse();
        // substitute (z0, z1) -> (inv.a z0 + inv.b z1, inv.c z0 + inv.d z1)
        let pm = compose_linear(&self.p, &inv);
        let qm = compose_linear(&self.q, &inv);
        let p: Vec<K> = pm
            .iter()
            .zip(qm.iter())
            .map(|(x, y)| m.a.clone() * x.clone() + m.b.clone() * y.clone())
            .collect();
        let q: Vec<K> = pm
            .iter()
            .zip(qm.iter())
            .map(|(x, y)| m.c.clone() * x.clone() + m.d.clone() * y.clone())
            .collect();
        RationalMap {
            degree: self.degree,
            p,
            q,
            normalized: false,
        }
        .normalize()
    }

    /// Representation of `f^n`, degree `d^n`.
    pub fn iterate(&self, n: u32, degree_budget: usize) -> Result<Self> {
        let mut deg = self.degree;
        let mut p = self.p.clone();
        let mut q = self.q.clone();
        for _ in 1..n {
            deg *= self.degree;
            if deg > degree_budget {
                return Err(Error::Budget(format!(
                    "iterate degree {deg} exceeds budget {degree_budget}"
                )));
            }
            let np = compose_pair(&self.p, &p, &q);
            let nq = compose_pair(&self.q, &p, &q);
            p = np;
            q = nq;
        }
        if n == 0 {
            return Err(Error::Invalid("iterate requires n >= 1".into()));
        }
        RationalMap::new(deg, p, q)
    }

    /// Homogeneous Wronskian `P_{z0} Q_{z1} - P_{z1} Q_{z0}`, degree `2d-2`,
    /// as a coefficient vector in the same ordering as `p`/`q`.
    pub fn wronskian(&self) -> Vec<K> {
        let d = self.degree;
        // partial derivatives in the (z0-descending) coefficient ordering
        let dz0 = |v: &[K]| -> Vec<K> {
            (0..d).map(|i| v[i].clone() * K::from_i64((d - i) as i64)).collect()
        };
        let dz1 = |v: &[K]| -> Vec<K> {
            (1..=d).map(|i| v[i].clone() * K::from_i64(i as i64)).collect()
        };
        let a = homog_mul(&dz0(&self.p), &dz1(&self.q));
        let b = homog_mul(&dz1(&self.p), &dz0(&self.q));
        a.into_iter().zip(b).map(|(x, y)| x - y).collect()
    }
}

/// Conversion to `Complex64`, implemented by the fields that embed in `C`.
pub trait ComplexLike: Scalar {
    fn to_c64(&self) -> Complex64;
}

impl ComplexLike for Complex64 {
    fn to_c64(&self) -> Complex64 {
        *self
    }
}

impl ComplexLike for crate::field::GaussRational {
    fn to_c64(&self) -> Complex64 {
        self.to_complex()
    }
}

impl RationalMap<Complex64> {
    /// Spherical-metric derivative norm `|df|` at a point, zero exactly at
    /// critical points. Computed on normalized data in log scale.
    pub fn spherical_derivative(&self, x: &ProjPoint<Complex64>) -> Result<f64> {
        Ok(self.log_spherical_derivative(x)?.exp())
    }

    /// `log |df|`; `-inf` at critical points.
    pub fn log_spherical_derivative(&self, x: &ProjPoint<Complex64>) -> Result<f64> {
        let f = if self.normalized { self.clone() } else { self.normalize()? };
        let mut x = x.clone();
        x.renormalize()?;
        let w = f.wronskian();
        let wv = eval_homogeneous(&w, &x.z0, &x.z1);
        let pv = eval_homogeneous(&f.p, &x.z0, &x.z1);
        let qv = eval_homogeneous(&f.q, &x.z0, &x.z1);
        let num = x.z0.norm_sqr() + x.z1.norm_sqr();
        let den = pv.norm_sqr() + qv.norm_sqr();
        if den == 0.0 {
            return Err(Error::Numerical("map evaluates to (0:0); degenerate data".into()));
        }
        Ok(wv.log_abs() - (self.degree as f64).ln() + num.ln() - den.ln())
    }
}

impl RationalMap<crate::puiseux::Puiseux> {
    /// Exact `log |df|` at a Type-1 point over the Puiseux field, as a
    /// rational (the non-Archimedean spherical derivative drops the 1/d
    /// factor, which has norm one here anyway).
    pub fn log_spherical_derivative_exact(
        &self,
        x: &ProjPoint<crate::puiseux::Puiseux>,
    ) -> Result<num::BigRational> {
        let w = self.wronskian();
        let wv = eval_homogeneous(&w, &x.z0, &x.z1);
        let pv = eval_homogeneous(&self.p, &x.z0, &x.z1);
        let qv = eval_homogeneous(&self.q, &x.z0, &x.z1);
        let ord_w = wv.ord_finite()?;
        let min2 = |a: &crate::puiseux::Puiseux, b: &crate::puiseux::Puiseux| -> Result<num::BigRational> {
            let oa = a.ord().ok().and_then(|v| v.finite().cloned());
            let ob = b.ord().ok().and_then(|v| v.finite().cloned());
            match (oa, ob) {
                (Some(x), Some(y)) => Ok(x.min(y)),
                (Some(x), None) => Ok(x),
                (None, Some(y)) => Ok(y),
                (None, None) => Err(Error::Precision("point norm undetermined".into())),
            }
        };
        let ord_z = min2(&x.z0, &x.z1)?;
        let ord_img = min2(&pv, &qv)?;
        // log|df| = -ord W - 2 min ord z + 2 min ord (P,Q)
        Ok(-ord_w - &ord_z - &ord_z + &ord_img + &ord_img)
    }
}

/// `e * log max_i psi_{P_i}(x)` where `psi_P = |P| / max(|z0|,|z1|)^l`;
/// `-inf` exactly when every section vanishes at `x`.
pub fn model_fn_eval<K: Scalar>(sections: &[Vec<K>], x: &ProjPoint<K>, scale: f64) -> Result<f64> {
    if sections.is_empty() {
        return Err(Error::Invalid("empty section list".into()));
    }
    let l = sections[0].len() - 1;
    if sections.iter().any(|s| s.len() != l + 1) {
        return Err(Error::Invalid("sections must share a common degree".into()));
    }
    let mut best = f64::NEG_INFINITY;
    for s in sections {
        let v = eval_homogeneous(s, &x.z0, &x.z1);
        let lv = v.log_abs();
        if lv > best {
            best = lv;
        }
    }
    let norm = x.z0.log_abs().max(x.z1.log_abs());
    if best == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(scale * (best - l as f64 * norm))
}

/// Evaluates `sum c_i z0^(n-i) z1^i` by two-variable Horner.
pub fn eval_homogeneous<K: Scalar>(coeffs: &[K], z0: &K, z1: &K) -> K {
    let mut acc = K::zero();
    let mut z1_pow = K::one();
    let last = coeffs.len() - 1;
    for (i, c) in coeffs.iter().enumerate() {
        acc = acc * z0.clone() + c.clone() * z1_pow.clone();
        if i < last {
            z1_pow = z1_pow * z1.clone();
        }
    }
    acc
}

/// Product of homogeneous coefficient vectors (degrees add).
fn homog_mul<K: Scalar>(a: &[K], b: &[K]) -> Vec<K> {
    let mut out = vec![K::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    out
}

/// Substitutes the linear forms of `m` into a homogeneous coefficient vector:
/// returns coefficients of `H(m.a z0 + m.b z1, m.c z0 + m.d z1)`.
fn compose_linear<K: Scalar>(coeffs: &[K], m: &Mobius<K>) -> Vec<K> {
    let d = coeffs.len() - 1;
    let u = [m.a.clone(), m.b.clone()]; // first argument
    let v = [m.c.clone(), m.d.clone()]; // second argument
    // powers of u and v as homogeneous vectors in (z0, z1)
    let mut u_pows: Vec<Vec<K>> = vec![vec![K::one()]];
    let mut v_pows: Vec<Vec<K>> = vec![vec![K::one()]];
    for k in 1..=d {
        u_pows.push(homog_mul(&u_pows[k - 1], &u));
        v_pows.push(homog_mul(&v_pows[k - 1], &v));
    }
    let mut out = vec![K::zero(); d + 1];
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        // c * u^(d-i) * v^i
        let term = homog_mul(&u_pows[d - i], &v_pows[i]);
        for (j, t) in term.iter().enumerate() {
            out[j] = out[j].clone() + c.clone() * t.clone();
        }
    }
    out
}

/// Substitutes a homogeneous pair into `outer`: coefficients of
/// `sum outer_i p^(d-i) q^i`.
fn compose_pair<K: Scalar>(outer: &[K], p: &[K], q: &[K]) -> Vec<K> {
    let d = outer.len() - 1;
    let mut p_pows: Vec<Vec<K>> = vec![vec![K::one()]];
    let mut q_pows: Vec<Vec<K>> = vec![vec![K::one()]];
    for k in 1..=d {
        p_pows.push(homog_mul(&p_pows[k - 1], p));
        q_pows.push(homog_mul(&q_pows[k - 1], q));
    }
    let inner_deg = (p.len() - 1) * d;
    let mut out = vec![K::zero(); inner_deg + 1];
    for (i, c) in outer.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let term = homog_mul(&p_pows[d - i], &q_pows[i]);
        for (j, t) in term.iter().enumerate() {
            out[j] = out[j].clone() + c.clone() * t.clone();
        }
    }
    out
}

/// Fraction-free Bareiss determinant. Divisions are exact over exact fields.
fn bareiss_det<K: Scalar>(mut m: Vec<Vec<K>>) -> Result<K> {
    let n = m.len();
    if n == 0 {
        return Ok(K::one());
    }
    let mut sign = false;
    let mut prev = K::one();
    for k in 0..n - 1 {
        // pivot: the largest-norm nonzero entry in the column
        let mut piv: Option<usize> = None;
        for r in k..n {
            if m[r][k].is_zero() {
                continue;
            }
            piv = match piv {
                None => Some(r),
                Some(p0) => {
                    if m[p0][k].cmp_abs(&m[r][k]) == std::cmp::Ordering::Less {
                        Some(r)
                    } else {
                        Some(p0)
                    }
                }
            };
        }
        let piv = match piv {
            Some(p) => p,
            None => return Ok(K::zero()),
        };
        if piv != k {
            m.swap(piv, k);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[k][k].clone() * m[i][j].clone() - m[i][k].clone() * m[k][j].clone();
                m[i][j] = num.try_div(&prev)?;
            }
            m[i][k] = K::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    Ok(if sign { -det } else { det })
}

/// `log |det|` by Gaussian elimination with full pivoting.
fn log_abs_det_full_pivot(mut m: Vec<Vec<Complex64>>) -> f64 {
    let n = m.len();
    let mut log_det = 0.0f64;
    let mut cols: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let mut best = (k, k, 0.0f64);
        for i in k..n {
            for j in k..n {
                let v = m[i][cols[j]].norm();
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        if best.2 == 0.0 {
            return f64::NEG_INFINITY;
        }
        m.swap(k, best.0);
        cols.swap(k, best.1);
        let pivot = m[k][cols[k]];
        log_det += pivot.norm().ln();
        for i in k + 1..n {
            let factor = m[i][cols[k]] / pivot;
            if factor.norm() == 0.0 {
                continue;
            }
            for j in k + 1..n {
                let sub = factor * m[k][cols[j]];
                m[i][cols[j]] -= sub;
            }
            m[i][cols[k]] = Complex64::new(0.0, 0.0);
        }
    }
    log_det
}

// ---------------------------------------------------------------------------
// JSON wire format
// ---------------------------------------------------------------------------

/// Serialized form of a rational map. Coefficients are JSON numbers or
/// strings in the series/Gaussian-rational text form, depending on `field`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapJson {
    pub degree: usize,
    #[serde(rename = "P")]
    pub p: Vec<serde_json::Value>,
    #[serde(rename = "Q")]
    pub q: Vec<serde_json::Value>,
    pub field: String,
}

fn coeff_to_string(v: &serde_json::Value) -> Result<String> {
    match v {
        serde_json::Value::String(s) => Ok(s.clone()),
        serde_json::Value::Number(n) => Ok(n.to_string()),
        other => Err(Error::Invalid(format!("bad coefficient {other}"))),
    }
}

impl MapJson {
    pub fn to_complex(&self) -> Result<RationalMap<Complex64>> {
        let conv = |v: &[serde_json::Value]| -> Result<Vec<Complex64>> {
            v.iter()
                .map(|x| {
                    let s = coeff_to_string(x)?;
                    let g: crate::field::GaussRational = s
                        .parse()
                        .map_err(|_| Error::Invalid(format!("bad complex coefficient `{s}`")))?;
                    Ok(g.to_complex())
                })
                .collect()
        };
        RationalMap::new(self.degree, conv(&self.p)?, conv(&self.q)?)
    }

    pub fn to_rational(&self) -> Result<RationalMap<crate::field::GaussRational>> {
        let conv = |v: &[serde_json::Value]| -> Result<Vec<crate::field::GaussRational>> {
            v.iter().map(|x| coeff_to_string(x)?.parse()).collect()
        };
        RationalMap::new(self.degree, conv(&self.p)?, conv(&self.q)?)
    }

    pub fn to_puiseux(&self) -> Result<RationalMap<crate::puiseux::Puiseux>> {
        let conv = |v: &[serde_json::Value]| -> Result<Vec<crate::puiseux::Puiseux>> {
            v.iter().map(|x| coeff_to_string(x)?.parse()).collect()
        };
        RationalMap::new(self.degree, conv(&self.p)?, conv(&self.q)?)
    }

    pub fn from_map<K: Scalar>(map: &RationalMap<K>, field: &str) -> Self {
        MapJson {
            degree: map.degree(),
            p: map.p().iter().map(|c| serde_json::Value::String(c.to_string())).collect(),
            q: map.q().iter().map(|c| serde_json::Value::String(c.to_string())).collect(),
            field: field.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GaussRational;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn gr(n: i64) -> GaussRational {
        GaussRational::from_ints(n, 0)
    }

    #[test]
    fn resultant_triangular_cases() {
        // P = z0^2, Q = z1^2 -> 1
        let r: GaussRational = RationalMap::<GaussRational>::power_map(2).resultant();
        assert_eq!(r, gr(1));
        // linear: P = a z0 + b z1, Q = c z0 + d z1 -> ad - bc
        let f = RationalMap::new(1, vec![gr(2), gr(3)], vec![gr(5), gr(7)]).unwrap();
        assert_eq!(f.resultant(), gr(2 * 7 - 3 * 5));
        // P = z0^2 + c z1^2, Q = z1^2 -> 1 (expanding the 4x4 determinant)
        let f = RationalMap::new(2, vec![gr(1), gr(0), gr(9)], vec![gr(0), gr(0), gr(1)]).unwrap();
        assert_eq!(f.resultant(), gr(1));
    }

    #[test]
    fn norm_resultant_scale_invariance() {
        let f = RationalMap::new(
            2,
            vec![c(1.0, 0.5), c(0.0, 0.0), c(3.0, -2.0)],
            vec![c(0.2, 0.0), c(1.0, 1.0), c(0.0, 0.7)],
        )
        .unwrap();
        let scaled = RationalMap::new(
            2,
            f.p().iter().map(|x| x * 10.0).collect(),
            f.q().iter().map(|x| x * 10.0).collect(),
        )
        .unwrap();
        assert_relative_eq!(f.log_norm_resultant(), scaled.log_norm_resultant(), epsilon = 1e-10);
    }

    #[test]
    fn norm_resultant_quadratic_large_c() {
        // f = z^2 + c with |c| >= 1: |Res(f)| = |c|^-4
        for ln_c in [0.5f64, 2.0, 10.0, 40.0] {
            let f = RationalMap::quadratic(c(ln_c.exp(), 0.0)).unwrap();
            assert_relative_eq!(f.log_norm_resultant(), -4.0 * ln_c, epsilon = 1e-8, max_relative = 1e-8);
        }
    }

    #[test]
    fn conjugation_group_action() {
        let f = RationalMap::quadratic(c(0.3, 0.1)).unwrap();
        let id = Mobius::identity();
        let g = f.conjugate(&id).unwrap();
        // identity conjugation: same map up to scaling
        let x = ProjPoint::from_affine(c(0.7, -0.2)).unwrap();
        let fx = f.evaluate(&x).unwrap();
        let gx = g.evaluate(&x).unwrap();
        assert!(spherical_distance(&fx, &gx) < 1e-12);

        // conjugate(conjugate(f, M1), M2) = conjugate(f, M2 M1)
        let m1 = Mobius::new(c(1.0, 0.2), c(0.3, 0.0), c(0.0, -0.4), c(0.9, 0.0)).unwrap();
        let m2 = Mobius::new(c(0.5, 0.0), c(-1.0, 0.3), c(0.2, 0.2), c(1.1, 0.0)).unwrap();
        let lhs = f.conjugate(&m1).unwrap().conjugate(&m2).unwrap();
        let rhs = f.conjugate(&m2.compose(&m1)).unwrap();
        for _ in 0..5 {
            let x = ProjPoint::from_affine(c(0.12, 0.9)).unwrap();
            let a = lhs.evaluate(&x).unwrap();
            let b = rhs.evaluate(&x).unwrap();
            assert!(spherical_distance(&a, &b) < 1e-9);
        }
    }

    #[test]
    fn conjugate_scaling_formula() {
        // f = z^2 + c, M(z) = lambda z: conjugate is z -> z^2/lambda + lambda c
        let cc = c(0.4, -0.3);
        let lambda = c(2.0, 1.0);
        let f = RationalMap::quadratic(cc).unwrap();
        let m = Mobius::affine(lambda, c(0.0, 0.0)).unwrap();
        let g = f.conjugate(&m).unwrap();
        for z in [c(0.3, 0.4), c(-1.2, 0.8)] {
            let expect = z * z / lambda + lambda * cc;
            let got = g.evaluate(&ProjPoint::from_affine(z).unwrap()).unwrap();
            let want = ProjPoint::from_affine(expect).unwrap();
            assert!(spherical_distance(&got, &want) < 1e-12);
        }
    }

    #[test]
    fn evaluate_and_iterate() {
        let f = RationalMap::<GaussRational>::power_map(2);
        let x = ProjPoint::from_affine(gr(2)).unwrap();
        let fx = f.evaluate(&x).unwrap();
        assert!(fx.same_point(&ProjPoint::from_affine(gr(4)).unwrap()));
        let f8 = f.iterate(3, 100).unwrap();
        assert_eq!(f8.degree(), 8);
        let y = f8.evaluate(&x).unwrap();
        assert!(y.same_point(&ProjPoint::from_affine(gr(256)).unwrap()));
    }

    #[test]
    fn spherical_derivative_squaring() {
        let f = RationalMap::power_map(2);
        // |df| = 2 on the unit circle
        let x = ProjPoint::from_affine(c(0.6, 0.8)).unwrap();
        assert_relative_eq!(f.spherical_derivative(&x).unwrap(), 2.0, epsilon = 1e-10);
        // critical point at 0
        let zero = ProjPoint::from_affine(c(0.0, 0.0)).unwrap();
        assert_eq!(f.spherical_derivative(&zero).unwrap(), 0.0);
    }

    #[test]
    fn spherical_derivative_matches_difference_quotient() {
        let f = RationalMap::new(
            2,
            vec![c(1.0, 0.0), c(0.5, -0.2), c(0.1, 0.3)],
            vec![c(0.0, 0.1), c(0.2, 0.0), c(1.0, 0.0)],
        )
        .unwrap();
        let mut ok = 0;
        for k in 0..50 {
            let z = c(0.1 * k as f64 - 2.0, 0.07 * k as f64 - 1.5);
            let x = ProjPoint::from_affine(z).unwrap();
            let h = 1e-7;
            let y = ProjPoint::from_affine(z + c(h, 0.0)).unwrap();
            let quot = spherical_distance(&f.evaluate(&x).unwrap(), &f.evaluate(&y).unwrap())
                / spherical_distance(&x, &y);
            let sd = f.spherical_derivative(&x).unwrap();
            if sd > 1e-3 {
                assert_relative_eq!(sd, quot, max_relative = 1e-4);
                ok += 1;
            }
        }
        assert!(ok > 30);
    }

    #[test]
    fn model_fn_basics() {
        // single section z0 at [0:1] -> -inf
        let z0_section = vec![c(1.0, 0.0), c(0.0, 0.0)];
        let origin = ProjPoint::from_affine(c(0.0, 0.0)).unwrap();
        let v = model_fn_eval(&[z0_section.clone()], &origin, 1.0).unwrap();
        assert_eq!(v, f64::NEG_INFINITY);
        // at [2:1]: |2| / max(2,1) = 1 -> 0
        let x = ProjPoint::from_affine(c(2.0, 0.0)).unwrap();
        let v = model_fn_eval(&[z0_section.clone()], &x, 1.0).unwrap();
        assert_relative_eq!(v, 0.0, epsilon = 1e-12);
        // sigma = {z0, z1} -> 0 everywhere
        let z1_section = vec![c(0.0, 0.0), c(1.0, 0.0)];
        for z in [c(0.3, 0.4), c(5.0, -2.0), c(0.0, 0.0)] {
            let x = ProjPoint::from_affine(z).unwrap();
            let v = model_fn_eval(&[z0_section.clone(), z1_section.clone()], &x, 1.0).unwrap();
            assert_relative_eq!(v, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn map_json_roundtrip() {
        let j: MapJson =
            serde_json::from_str(r#"{"degree":2,"P":[1,0,0],"Q":[0,0,1],"field":"rational"}"#).unwrap();
        let f = j.to_rational().unwrap();
        assert_eq!(f.resultant(), gr(1));
        let back = MapJson::from_map(&f, "rational");
        let f2 = back.to_rational().unwrap();
        assert_eq!(f2.p(), f.p());
    }
}
