//! Dense univariate polynomial helpers over any [`Scalar`].
//!
//! Coefficient slices are in ascending order of degree: `p[i]` multiplies
//! `z^i`. Leading zeros are tolerated on input and trimmed on output.

use crate::field::Scalar;

pub fn trim<K: Scalar>(p: &mut Vec<K>) {
    while p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
}

pub fn degree<K: Scalar>(p: &[K]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn add<K: Scalar>(a: &[K], b: &[K]) -> Vec<K> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(K::zero);
        let y = b.get(i).cloned().unwrap_or_else(K::zero);
        out.push(x + y);
    }
    trim(&mut out);
    out
}

pub fn sub<K: Scalar>(a: &[K], b: &[K]) -> Vec<K> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(K::zero);
        let y = b.get(i).cloned().unwrap_or_else(K::zero);
        out.push(x - y);
    }
    trim(&mut out);
    out
}

pub fn mul<K: Scalar>(a: &[K], b: &[K]) -> Vec<K> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![K::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    trim(&mut out);
    out
}

pub fn scale<K: Scalar>(a: &[K], s: &K) -> Vec<K> {
    let mut out: Vec<K> = a.iter().map(|c| c.clone() * s.clone()).collect();
    trim(&mut out);
    out
}

pub fn eval<K: Scalar>(p: &[K], z: &K) -> K {
    let mut acc = K::zero();
    for c in p.iter().rev() {
        acc = acc * z.clone() + c.clone();
    }
    acc
}

pub fn derivative<K: Scalar>(p: &[K]) -> Vec<K> {
    if p.len() <= 1 {
        return Vec::new();
    }
    let mut out: Vec<K> = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c.clone() * K::from_i64(i as i64))
        .collect();
    trim(&mut out);
    out
}

/// Coefficients of `p(z + a)` (Horner-style Taylor shift).
pub fn taylor_shift<K: Scalar>(p: &[K], a: &K) -> Vec<K> {
    let mut out: Vec<K> = Vec::new();
    for c in p.iter().rev() {
        // out = out * (z + a) + c
        let mut next = vec![K::zero(); out.len() + 1];
        for (i, o) in out.iter().enumerate() {
            next[i + 1] = next[i + 1].clone() + o.clone();
            next[i] = next[i].clone() + o.clone() * a.clone();
        }
        next[0] = next[0].clone() + c.clone();
        out = next;
    }
    trim(&mut out);
    out
}

/// Exact polynomial long division, `(quotient, remainder)`.
/// Only valid over exact fields (division by the leading coefficient).
pub fn div_rem<K: Scalar>(num: &[K], den: &[K]) -> (Vec<K>, Vec<K>) {
    let dd = degree(den).expect("division by zero polynomial");
    let lead = den[dd].clone();
    let mut rem: Vec<K> = num.to_vec();
    trim(&mut rem);
    let mut quot: Vec<K> = Vec::new();
    while let Some(dr) = degree(&rem) {
        if dr < dd {
            break;
        }
        let c = rem[dr]
            .try_div(&lead)
            .expect("leading coefficient is a unit");
        let shift = dr - dd;
        if quot.len() < shift + 1 {
            quot.resize(shift + 1, K::zero());
        }
        quot[shift] = quot[shift].clone() + c.clone();
        for (i, d) in den.iter().enumerate() {
            rem[i + shift] = rem[i + shift].clone() - c.clone() * d.clone();
        }
        trim(&mut rem);
    }
    (quot, rem)
}

/// Monic gcd of two polynomials over an exact field.
pub fn gcd<K: Scalar>(a: &[K], b: &[K]) -> Vec<K> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let (_, r) = div_rem(&a, &b);
        a = std::mem::replace(&mut b, r);
    }
    if let Some(d) = degree(&a) {
        let lead = a[d].clone();
        a = a
            .iter()
            .map(|c| c.try_div(&lead).expect("lead is nonzero"))
            .collect();
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GaussRational;

    fn gr(n: i64) -> GaussRational {
        GaussRational::from_ints(n, 0)
    }

    #[test]
    fn shift_and_divide() {
        // p = (z-1)^2 = 1 - 2z + z^2; p(z+1) = z^2
        let p = vec![gr(1), gr(-2), gr(1)];
        let shifted = taylor_shift(&p, &gr(1));
        assert_eq!(shifted, vec![gr(0), gr(0), gr(1)]);
        let (q, r) = div_rem(&p, &[gr(-1), gr(1)]);
        assert_eq!(q, vec![gr(-1), gr(1)]);
        assert!(r.is_empty());
    }

    #[test]
    fn gcd_detects_multiplicity() {
        // (z-1)^2 (z+2) and its derivative share (z-1)
        let p = mul(&mul(&[gr(-1), gr(1)], &[gr(-1), gr(1)]), &[gr(2), gr(1)]);
        let g = gcd(&p, &derivative(&p));
        assert_eq!(g, vec![gr(-1), gr(1)]);
    }
}
