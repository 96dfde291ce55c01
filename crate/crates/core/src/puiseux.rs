//! Truncated Puiseux series over the Gaussian rationals.
//!
//! These are finite sums `c * t^(p/q)` with exact coefficients, together
//! with a truncation order: exponents at or beyond it are unknown. The
//! valuation `ord` (least exponent) induces the non-Archimedean norm
//! `|x| = exp(-ord x)`, with value group `Q`. Precision tracking is
//! conservative: no operation ever reports a digit it cannot certify.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::{GaussRational, Scalar};

/// Exponent digits kept when an exact division has to truncate an infinite
/// expansion, counted in units of the exponent grid `1/N`.
pub const DEFAULT_DIGITS: i64 = 24;

/// Value of the valuation `ord`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Valuation {
    Finite(BigRational),
    /// The exact zero.
    Infinite,
}

impl Valuation {
    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            Valuation::Finite(q) => Some(q),
            Valuation::Infinite => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Valuation::Finite(q) => q.to_f64().unwrap_or(f64::NAN),
            Valuation::Infinite => f64::INFINITY,
        }
    }
}

/// Truncation marker: `Exact` means every digit is known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Trunc {
    Exact,
    /// Exponents `>= order` are unknown.
    Order(BigRational),
}

impl Trunc {
    fn min(a: &Trunc, b: &Trunc) -> Trunc {
        match (a, b) {
            (Trunc::Exact, t) | (t, Trunc::Exact) => t.clone(),
            (Trunc::Order(x), Trunc::Order(y)) => Trunc::Order(x.min(y).clone()),
        }
    }

    fn shift(&self, by: &BigRational) -> Trunc {
        match self {
            Trunc::Exact => Trunc::Exact,
            Trunc::Order(q) => Trunc::Order(q + by),
        }
    }

    pub fn allows(&self, exp: &BigRational) -> bool {
        match self {
            Trunc::Exact => true,
            Trunc::Order(q) => exp < q,
        }
    }
}

/// A truncated Puiseux series.
#[derive(Clone, PartialEq)]
pub struct Puiseux {
    /// Strictly increasing exponents, nonzero coefficients, all below `trunc`.
    terms: Vec<(BigRational, GaussRational)>,
    trunc: Trunc,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Puiseux {
    pub fn zero() -> Self {
        Puiseux {
            terms: Vec::new(),
            trunc: Trunc::Exact,
        }
    }

    pub fn constant(c: GaussRational) -> Self {
        Puiseux::monomial(c, BigRational::zero())
    }

    pub fn from_int(n: i64) -> Self {
        Puiseux::constant(GaussRational::from_ints(n, 0))
    }

    pub fn monomial(c: GaussRational, exp: BigRational) -> Self {
        if Scalar::is_zero(&c) {
            return Puiseux::zero();
        }
        Puiseux {
            terms: vec![(exp, c)],
            trunc: Trunc::Exact,
        }
    }

    /// The uniformizer `t`.
    pub fn t() -> Self {
        Puiseux::monomial(GaussRational::from_ints(1, 0), BigRational::one())
    }

    pub fn t_pow(exp: BigRational) -> Self {
        Puiseux::monomial(GaussRational::from_ints(1, 0), exp)
    }

    /// Builds `sum c_k t^k` from integer-exponent (Laurent) terms.
    pub fn from_laurent(terms: &[(i64, GaussRational)]) -> Self {
        let mut out = Puiseux::zero();
        for (k, c) in terms {
            out = out + Puiseux::monomial(c.clone(), rat(*k, 1));
        }
        out
    }

    pub fn terms(&self) -> &[(BigRational, GaussRational)] {
        &self.terms
    }

    pub fn trunc(&self) -> &Trunc {
        &self.trunc
    }

    pub fn is_exact(&self) -> bool {
        self.trunc == Trunc::Exact
    }

    /// True when no nonzero digit is known. An exact zero satisfies this;
    /// so does a truncated series whose known part cancelled out.
    pub fn no_known_terms(&self) -> bool {
        self.terms.is_empty()
    }

    /// Least common denominator of all exponents (and the truncation order).
    pub fn ramification(&self) -> BigInt {
        let mut n = BigInt::one();
        for (e, _) in &self.terms {
            n = n.lcm(e.denom());
        }
        if let Trunc::Order(q) = &self.trunc {
            n = n.lcm(q.denom());
        }
        n
    }

    /// The valuation. Errors when the series is zero only up to truncation.
    pub fn ord(&self) -> Result<Valuation> {
        match (self.terms.first(), &self.trunc) {
            (Some((e, _)), _) => Ok(Valuation::Finite(e.clone())),
            (None, Trunc::Exact) => Ok(Valuation::Infinite),
            (None, Trunc::Order(q)) => Err(Error::Precision(format!(
                "series is zero up to O(t^{q}); raise the truncation order to decide"
            ))),
        }
    }

    /// Finite valuation or an error (also errors on the exact zero).
    pub fn ord_finite(&self) -> Result<BigRational> {
        match self.ord()? {
            Valuation::Finite(q) => Ok(q),
            Valuation::Infinite => Err(Error::Invalid("valuation of exact zero".into())),
        }
    }

    /// Valuation used for precision bookkeeping: first known exponent, else
    /// the truncation order itself (a lower bound for the true `ord`).
    fn ord_lower_bound(&self) -> Option<BigRational> {
        match (self.terms.first(), &self.trunc) {
            (Some((e, _)), _) => Some(e.clone()),
            (None, Trunc::Order(q)) => Some(q.clone()),
            (None, Trunc::Exact) => None, // exact zero: +infinity
        }
    }

    pub fn leading(&self) -> Option<(&BigRational, &GaussRational)> {
        self.terms.first().map(|(e, c)| (e, c))
    }

    /// Coefficient of `t^exp` among the known digits.
    pub fn coeff_at(&self, exp: &BigRational) -> GaussRational {
        match self.terms.binary_search_by(|(e, _)| e.cmp(exp)) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => GaussRational::from_ints(0, 0),
        }
    }

    /// The residue: coefficient of `t^0`.
    pub fn residue(&self) -> GaussRational {
        self.coeff_at(&BigRational::zero())
    }

    /// Drops digits at or beyond `order` and records the truncation.
    pub fn truncate_to(&self, order: &BigRational) -> Puiseux {
        let trunc = Trunc::min(&self.trunc, &Trunc::Order(order.clone()));
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| trunc.allows(e))
            .cloned()
            .collect();
        Puiseux { terms, trunc }
    }

    /// The digits below `order` as an exact number. This is a choice of
    /// representative, not a rounding: callers use it where any element of
    /// `self + O(t^order)` serves equally (e.g. disk centers at radius
    /// `e^(-order)`). Errors when the known digits do not reach `order`.
    pub fn truncated_exact(&self, order: &BigRational) -> Result<Puiseux> {
        if let Trunc::Order(t) = &self.trunc {
            if t < order {
                return Err(Error::Precision(format!(
                    "digits known only to O(t^{t}), need t^{order}"
                )));
            }
        }
        Ok(Puiseux {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e < order)
                .cloned()
                .collect(),
            trunc: Trunc::Exact,
        })
    }

    fn normalize(mut terms: Vec<(BigRational, GaussRational)>, trunc: Trunc) -> Puiseux {
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(BigRational, GaussRational)> = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            if let Some(last) = merged.last_mut() {
                if last.0 == e {
                    last.1 = last.1.clone() + c;
                    if Scalar::is_zero(&last.1) {
                        merged.pop();
                    }
                    continue;
                }
            }
            if !Scalar::is_zero(&c) {
                merged.push((e, c));
            }
        }
        merged.retain(|(e, _)| trunc.allows(e));
        Puiseux { terms: merged, trunc }
    }

    pub fn scale(&self, c: &GaussRational) -> Puiseux {
        if Scalar::is_zero(c) {
            return Puiseux {
                terms: Vec::new(),
                trunc: self.trunc.clone(),
            };
        }
        Puiseux {
            terms: self
                .terms
                .iter()
                .map(|(e, a)| (e.clone(), a.clone() * c.clone()))
                .collect(),
            trunc: self.trunc.clone(),
        }
    }

    /// Multiplication by the monomial `t^exp`.
    pub fn shift_exp(&self, exp: &BigRational) -> Puiseux {
        Puiseux {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e + exp, c.clone()))
                .collect(),
            trunc: self.trunc.shift(exp),
        }
    }

    pub fn pow(&self, n: u32) -> Puiseux {
        let mut acc = Puiseux::from_int(1);
        for _ in 0..n {
            acc = acc * self.clone();
        }
        acc
    }

    fn default_cap(&self, other: &Puiseux) -> BigRational {
        let n = self.ramification().lcm(&other.ramification());
        BigRational::new(BigInt::from(DEFAULT_DIGITS), n)
    }

    /// Multiplicative inverse, truncating an infinite expansion at
    /// `ord(1/self) + extra_digits`.
    pub fn inv_to_order(&self, extra_digits: &BigRational) -> Result<Puiseux> {
        let (e0, c0) = match self.terms.first() {
            Some(t) => t.clone(),
            None => {
                return Err(match &self.trunc {
                    Trunc::Exact => Error::Numerical("inverse of exact zero".into()),
                    Trunc::Order(q) => Error::Precision(format!(
                        "divisor indistinguishable from 0 at O(t^{q}); raise the truncation order"
                    )),
                })
            }
        };
        // self = c0 t^e0 (1 + u), ord u > 0
        let lead_inv = GaussRational::from_ints(1, 0).try_div(&c0)?;
        let u = Puiseux {
            terms: self.terms[1..]
                .iter()
                .map(|(e, c)| (e - &e0, c.clone() * lead_inv.clone()))
                .collect(),
            trunc: self.trunc.shift(&-e0.clone()),
        };
        let cap = extra_digits.clone();
        // geometric series sum_k (-u)^k, truncated at relative order `cap`
        let mut acc = Puiseux::from_int(1);
        if !u.no_known_terms() {
            acc = acc.truncate_to(&cap);
            let u_ord = u.ord_finite()?;
            if !u_ord.is_positive() {
                return Err(Error::Internal("inverse: series not in 1 + o(1) form".into()));
            }
            let max_k = (cap.clone() / u_ord).to_integer().to_i64().unwrap_or(0) + 1;
            let mut power = Puiseux::from_int(1);
            for _ in 0..max_k {
                power = (power * -u.clone()).truncate_to(&cap);
                if power.no_known_terms() {
                    break;
                }
                acc = acc + power.clone();
            }
        } else if let Trunc::Order(q) = &u.trunc {
            acc = acc.truncate_to(q);
        }
        let mut out = acc.scale(&lead_inv).shift_exp(&-e0.clone());
        // precision inherited from the operand: d(1/x) = dx / x^2
        if let Trunc::Order(q) = &self.trunc {
            out = out.truncate_to(&(q - &e0 - &e0));
        }
        Ok(out)
    }

    /// Division with an explicit digit budget for infinite expansions.
    pub fn div_to_order(&self, rhs: &Puiseux, extra_digits: &BigRational) -> Result<Puiseux> {
        Ok(self.clone() * rhs.inv_to_order(extra_digits)?)
    }

    pub fn to_valuation_f64(&self) -> f64 {
        self.terms
            .first()
            .map(|(e, _)| e.to_f64().unwrap_or(f64::NAN))
            .unwrap_or(f64::INFINITY)
    }
}

impl fmt::Debug for Puiseux {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Add for Puiseux {
    type Output = Puiseux;
    fn add(self, rhs: Puiseux) -> Puiseux {
        let trunc = Trunc::min(&self.trunc, &rhs.trunc);
        let mut terms = self.terms;
        terms.extend(rhs.terms);
        Puiseux::normalize(terms, trunc)
    }
}

impl Sub for Puiseux {
    type Output = Puiseux;
    fn sub(self, rhs: Puiseux) -> Puiseux {
        self + (-rhs)
    }
}

impl Neg for Puiseux {
    type Output = Puiseux;
    fn neg(self) -> Puiseux {
        Puiseux {
            terms: self
                .terms
                .into_iter()
                .map(|(e, c)| (e, -c))
                .collect(),
            trunc: self.trunc,
        }
    }
}

impl Mul for Puiseux {
    type Output = Puiseux;
    fn mul(self, rhs: Puiseux) -> Puiseux {
        // error terms: a * O(t^tb) has order >= ord(a) + tb, and symmetrically
        let mut trunc = Trunc::Exact;
        if let Trunc::Order(tb) = &rhs.trunc {
            trunc = match self.ord_lower_bound() {
                Some(oa) => Trunc::min(&trunc, &Trunc::Order(oa + tb)),
                None => trunc, // exact zero absorbs everything
            };
        }
        if let Trunc::Order(ta) = &self.trunc {
            trunc = match rhs.ord_lower_bound() {
                Some(ob) => Trunc::min(&trunc, &Trunc::Order(ob + ta)),
                None => trunc,
            };
        }
        if self.terms.is_empty() && rhs.terms.is_empty() {
            return Puiseux { terms: Vec::new(), trunc };
        }
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                terms.push((ea + eb, ca.clone() * cb.clone()));
            }
        }
        Puiseux::normalize(terms, trunc)
    }
}

impl Scalar for Puiseux {
    const EXACT: bool = true;

    fn zero() -> Self {
        Puiseux::zero()
    }
    fn one() -> Self {
        Puiseux::from_int(1)
    }
    fn from_i64(n: i64) -> Self {
        Puiseux::from_int(n)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn log_abs(&self) -> f64 {
        -self.to_valuation_f64()
    }
    fn try_div(&self, rhs: &Puiseux) -> Result<Puiseux> {
        let cap = self.default_cap(rhs);
        self.div_to_order(rhs, &cap)
    }
    fn cmp_abs(&self, other: &Puiseux) -> std::cmp::Ordering {
        // bigger norm = smaller valuation; anything with no known digit
        // compares as zero
        match (self.terms.first(), other.terms.first()) {
            (Some((a, _)), Some((b, _))) => b.cmp(a),
            (Some(_), None) => std::cmp::Ordering::Greater,
            (None, Some(_)) => std::cmp::Ordering::Less,
            (None, None) => std::cmp::Ordering::Equal,
        }
    }
    fn normalizer(&self) -> Puiseux {
        let (e, c) = self.leading().expect("normalizer of zero");
        Puiseux::monomial(c.clone(), e.clone())
    }
}

// ---------------------------------------------------------------------------
// text form
// ---------------------------------------------------------------------------

impl fmt::Display for Puiseux {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let coeff = if c.is_real() {
                format!("{}", c.re)
            } else {
                format!("({c})")
            };
            if e.is_zero() {
                write!(f, "{coeff}")?;
            } else if c == &GaussRational::from_ints(1, 0) {
                write!(f, "t^({e})")?;
            } else {
                write!(f, "{coeff}*t^({e})")?;
            }
        }
        match (&self.trunc, first) {
            (Trunc::Exact, true) => write!(f, "0"),
            (Trunc::Exact, false) => Ok(()),
            (Trunc::Order(q), true) => write!(f, "O(t^({q}))"),
            (Trunc::Order(q), false) => write!(f, " + O(t^({q}))"),
        }
    }
}

impl FromStr for Puiseux {
    type Err = Error;

    fn from_str(s: &str) -> Result<Puiseux> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Invalid("empty series".into()));
        }
        // split into signed summands at top-level +/-
        let mut parts: Vec<String> = Vec::new();
        let mut depth = 0i32;
        let mut cur = String::new();
        for (k, ch) in s.chars().enumerate() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                '+' | '-' if depth == 0 && k > 0 => {
                    parts.push(std::mem::take(&mut cur));
                    if ch == '-' {
                        cur.push('-');
                    }
                    continue;
                }
                _ => {}
            }
            cur.push(ch);
        }
        parts.push(cur);

        let parse_exp = |tok: &str| -> Result<BigRational> {
            let tok = tok
                .strip_prefix('(')
                .and_then(|t| t.strip_suffix(')'))
                .unwrap_or(tok);
            BigRational::from_str(tok).map_err(|e| Error::Invalid(format!("bad exponent `{tok}`: {e}")))
        };

        let mut out = Puiseux::zero();
        let mut trunc = Trunc::Exact;
        for part in parts {
            if part.is_empty() || part == "0" || part == "-0" {
                continue;
            }
            if let Some(body) = part.strip_prefix("O(").and_then(|p| p.strip_suffix(')')) {
                let body = body
                    .strip_prefix("t^")
                    .ok_or_else(|| Error::Invalid(format!("bad O-term `{part}`")))?;
                trunc = Trunc::min(&trunc, &Trunc::Order(parse_exp(body)?));
                continue;
            }
            let (negate, body) = match part.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, part.as_str()),
            };
            let (coeff_tok, exp) = if let Some(idx) = body.find("*t^") {
                (&body[..idx], parse_exp(&body[idx + 3..])?)
            } else if let Some(rest) = body.strip_prefix("t^") {
                ("1", parse_exp(rest)?)
            } else if body == "t" {
                ("1", BigRational::one())
            } else {
                (body, BigRational::zero())
            };
            let coeff_tok = coeff_tok
                .strip_prefix('(')
                .and_then(|t| t.strip_suffix(')'))
                .unwrap_or(coeff_tok);
            let mut coeff: GaussRational = coeff_tok.parse()?;
            if negate {
                coeff = -coeff;
            }
            out = out + Puiseux::monomial(coeff, exp);
        }
        let trunc = Trunc::min(&out.trunc, &trunc);
        out.terms.retain(|(e, _)| trunc.allows(e));
        out.trunc = trunc;
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Newton-Puiseux root solver
// ---------------------------------------------------------------------------

/// Roots (with multiplicity) of a polynomial with Puiseux coefficients,
/// `p[i]` multiplying `z^i`. Each root `r` satisfies `ord p(r) >= target`.
///
/// The leading coefficient must be nonzero. Residual equations are solved in
/// `Q(i)`; a residual root outside that field is reported as a precision
/// error rather than approximated.
pub fn newton_puiseux_roots(
    p: &[Puiseux],
    target: &BigRational,
) -> Result<Vec<(Puiseux, usize)>> {
    let deg = p
        .iter()
        .rposition(|c| !c.no_known_terms())
        .ok_or_else(|| Error::Invalid("zero polynomial".into()))?;
    if deg == 0 {
        return Err(Error::Invalid("constant polynomial has no roots".into()));
    }
    if p.len() - 1 != deg {
        // leading coefficient only zero up to truncation is not acceptable
        for c in &p[deg + 1..] {
            if !c.is_exact() {
                return Err(Error::Precision(
                    "leading coefficient indistinguishable from zero".into(),
                ));
            }
        }
    }
    let p = &p[..=deg];
    let mut out = Vec::new();
    roots_rec(p, target, None, 0, &mut out)?;
    let found: usize = out.iter().map(|(_, m)| m).sum();
    if found != deg {
        return Err(Error::Internal(format!(
            "root count {found} != degree {deg} after branch tracking"
        )));
    }
    Ok(out)
}

fn roots_rec(
    p: &[Puiseux],
    target: &BigRational,
    min_slope: Option<&BigRational>,
    depth: usize,
    out: &mut Vec<(Puiseux, usize)>,
) -> Result<()> {
    if depth > 64 {
        return Err(Error::Precision("root branch recursion too deep".into()));
    }
    // multiplicity of the exact root 0: leading exactly-zero coefficients
    let mut m0 = 0usize;
    for c in p {
        if c.no_known_terms() {
            if c.is_exact() {
                m0 += 1;
                continue;
            }
            return Err(Error::Precision(format!(
                "coefficient of z^{m0} is zero only up to truncation"
            )));
        }
        break;
    }
    if m0 > 0 {
        out.push((Puiseux::zero(), m0));
    }
    let q = &p[m0..];
    if q.len() <= 1 {
        return Ok(());
    }

    // Newton polygon: lower hull of (i, ord q_i)
    let pts: Vec<(usize, BigRational)> = q
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.no_known_terms())
        .map(|(i, c)| Ok((i, c.ord_finite()?)))
        .collect::<Result<_>>()?;
    let hull = lower_hull(&pts);

    for w in hull.windows(2) {
        let (i1, v1) = (w[0].0, &w[0].1);
        let (i2, v2) = (w[1].0, &w[1].1);
        let slope = (v2 - v1) / BigRational::from_integer(BigInt::from((i2 - i1) as i64));
        let mu = -slope;
        if let Some(ms) = min_slope {
            if &mu <= ms {
                continue; // belongs to a sibling branch
            }
        }
        // residual polynomial from the lattice points on this segment
        let m_min = v1 + &(BigRational::from_integer(BigInt::from(i1 as i64)) * mu.clone());
        let mut residual: Vec<GaussRational> = vec![GaussRational::from_ints(0, 0); i2 - i1 + 1];
        for (i, v) in &pts {
            if *i < i1 || *i > i2 {
                continue;
            }
            let tot = v + &(BigRational::from_integer(BigInt::from(*i as i64)) * mu.clone());
            if tot == m_min {
                residual[i - i1] = q[*i].leading().expect("nonzero").1.clone();
            }
        }
        let rroots = residual_roots(&residual)?;
        for (alpha, mult) in rroots {
            let lead = Puiseux::monomial(alpha, mu.clone());
            if mult == 1 {
                let root = newton_refine(q, lead, target)?;
                out.push((root, 1));
            } else {
                // shift and keep only the branches strictly deeper than mu
                let shifted = taylor_shift_puiseux(q, &lead);
                let mut sub = Vec::new();
                roots_rec(&shifted, target, Some(&mu), depth + 1, &mut sub)?;
                let taken: usize = sub.iter().map(|(_, m)| m).sum();
                if taken != mult {
                    return Err(Error::Precision(format!(
                        "branch at t^{mu} expected {mult} roots, resolved {taken}"
                    )));
                }
                for (r, m) in sub {
                    out.push((lead.clone() + r, m));
                }
            }
        }
    }
    Ok(())
}

fn lower_hull(pts: &[(usize, BigRational)]) -> Vec<(usize, BigRational)> {
    let mut hull: Vec<(usize, BigRational)> = Vec::new();
    for (i, v) in pts {
        while hull.len() >= 2 {
            let (ia, va) = &hull[hull.len() - 2];
            let (ib, vb) = &hull[hull.len() - 1];
            // drop b when it lies on or above segment a--(i,v)
            let lhs = (vb - va) * BigRational::from_integer(BigInt::from((*i - *ia) as i64));
            let rhs = (v - va) * BigRational::from_integer(BigInt::from((*ib - *ia) as i64));
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((*i, v.clone()));
    }
    hull
}

/// Nonzero roots in `Q(i)` of a polynomial with Gaussian-rational
/// coefficients, with exact multiplicities. The total count must exhaust the
/// degree (after the root at zero), otherwise a root lies outside `Q(i)`.
fn residual_roots(r: &[GaussRational]) -> Result<Vec<(GaussRational, usize)>> {
    use crate::poly;
    let mut r = r.to_vec();
    poly::trim(&mut r);
    let low = r
        .iter()
        .position(|c| !Scalar::is_zero(c))
        .ok_or_else(|| Error::Internal("zero residual polynomial".into()))?;
    let r = &r[low..];
    let deg = r.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    // square-free part via exact gcd, then simple numeric roots
    let g = poly::gcd(r, &poly::derivative(r));
    let (sf, _) = poly::div_rem(r, &g);
    let coeffs: Vec<num_complex::Complex64> = sf.iter().map(|c| c.to_complex()).collect();
    let numeric = crate::numeric::poly_roots(&coeffs)?;
    let mut found: Vec<(GaussRational, usize)> = Vec::new();
    let mut remaining = r.to_vec();
    for z in numeric {
        let scale = z.norm().max(1.0);
        let re = crate::field::rationalize(z.re, 1_000_000_000, 1e-6 * scale)
            .ok_or_else(|| Error::Precision("residual root is not a recognizable Gaussian rational".into()))?;
        let im = crate::field::rationalize(z.im, 1_000_000_000, 1e-6 * scale)
            .ok_or_else(|| Error::Precision("residual root is not a recognizable Gaussian rational".into()))?;
        let alpha = GaussRational::new(re, im);
        if found.iter().any(|(a, _)| a == &alpha) {
            continue;
        }
        // exact verification and multiplicity by repeated exact division
        let lin = vec![-alpha.clone(), GaussRational::from_ints(1, 0)];
        let mut mult = 0usize;
        loop {
            let (quot, rem) = poly::div_rem(&remaining, &lin);
            if rem.is_empty() {
                mult += 1;
                remaining = quot;
            } else {
                break;
            }
        }
        if mult == 0 {
            return Err(Error::Precision(format!(
                "candidate residual root {alpha} failed exact verification"
            )));
        }
        found.push((alpha, mult));
    }
    let total: usize = found.iter().map(|(_, m)| m).sum();
    if total != deg {
        return Err(Error::Precision(
            "some residual roots lie outside Q(i); the coefficient field cannot express this branch".into(),
        ));
    }
    Ok(found)
}

fn taylor_shift_puiseux(p: &[Puiseux], a: &Puiseux) -> Vec<Puiseux> {
    crate::poly::taylor_shift(p, a)
}

fn eval_poly(p: &[Puiseux], z: &Puiseux) -> Puiseux {
    crate::poly::eval(p, z)
}

/// Newton iteration from a separated leading term of a simple root.
fn newton_refine(p: &[Puiseux], start: Puiseux, target: &BigRational) -> Result<Puiseux> {
    let dp: Vec<Puiseux> = crate::poly::derivative(p);
    let mut z = start;
    // generous working precision beyond the requested order
    let work_cap = target + &rat(4, 1);
    // digits of z beyond target - ord p'(z) are not certified
    let certified = |z: Puiseux, dv: &Puiseux| -> Result<Puiseux> {
        match dv.ord()? {
            Valuation::Finite(o) => Ok(z.truncate_to(&(target - &o))),
            Valuation::Infinite => Err(Error::Internal("vanishing derivative at simple root".into())),
        }
    };
    for _ in 0..64 {
        let pv = eval_poly(p, &z);
        if pv.no_known_terms() {
            match pv.trunc() {
                Trunc::Exact => return Ok(z),
                Trunc::Order(q) if q >= target => {
                    let dv = eval_poly(&dp, &z);
                    return certified(z, &dv);
                }
                Trunc::Order(_) => {
                    return Err(Error::Precision(
                        "coefficient precision insufficient to certify root".into(),
                    ))
                }
            }
        }
        let dv = eval_poly(&dp, &z);
        let ord_pv = pv.ord_finite()?;
        if &ord_pv >= target {
            return certified(z, &dv);
        }
        let digits = std::cmp::max(&work_cap - &ord_pv, BigRational::one());
        let step = pv.div_to_order(&dv, &digits)?;
        z = (z - step).truncate_to(&work_cap);
    }
    Err(Error::Precision(
        "Newton refinement did not reach the requested order".into(),
    ))
}
