//! Exact sparse polynomials in spatial variables `x1..xn` and a scale variable `s`.
//!
//! Coefficients are arbitrary-precision rationals, so identities such as
//! "this family solves the heat equation" are checked to exact zero rather
//! than to a floating tolerance. Every operation returns a value in canonical
//! form: no zero coefficients are stored and terms are kept in graded
//! lexicographic order with `s` as the last variable.

mod horner;
mod parse;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use horner::HornerPoly;
pub use parse::ParseError;

/// Exact rational coefficient type.
pub type Rational = BigRational;

/// Builds the rational `num/den`.
///
/// Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Builds an integer-valued rational.
pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Lossy conversion used when handing exact values to the numerical engine.
pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("spatial variable index {index} out of range for n = {n}")]
    VariableOutOfRange { index: usize, n: usize },
    #[error("dimension mismatch: polynomial has {expected} spatial variables, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("weighted degree of the zero polynomial is undefined")]
    ZeroPolynomial,
    #[error("heat flow time must be non-negative")]
    NegativeTime,
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// A variable of the polynomial ring: a spatial coordinate or the scale `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    Spatial(usize),
    Scale,
}

impl Var {
    pub const X: Var = Var::Spatial(0);
    pub const Y: Var = Var::Spatial(1);
    pub const S: Var = Var::Scale;
}

/// Display names of the spatial variables for dimension `n`.
///
/// Up to three dimensions use `x, y, z`; above that `x1..xn`.
pub fn spatial_names(n: usize) -> Vec<String> {
    match n {
        0..=3 => ["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect(),
        _ => (1..=n).map(|i| format!("x{i}")).collect(),
    }
}

/// Exponent vector `(e1, .., en, e_s)`.
///
/// Ordered graded-lexicographically: total degree first, then lexicographic
/// with `x1 > x2 > .. > xn > s`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(n_spatial: usize) -> Self {
        Monomial(vec![0; n_spatial + 1])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn n_spatial(&self) -> usize {
        self.0.len() - 1
    }

    pub fn scale_exponent(&self) -> u32 {
        *self.0.last().unwrap()
    }

    pub fn spatial_exponents(&self) -> &[u32] {
        &self.0[..self.0.len() - 1]
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Degree with `s` counted at weight 2.
    pub fn weighted_degree(&self) -> u32 {
        self.spatial_exponents().iter().sum::<u32>() + 2 * self.scale_exponent()
    }

    fn index(&self, var: Var) -> usize {
        match var {
            Var::Spatial(i) => i,
            Var::Scale => self.0.len() - 1,
        }
    }

    pub fn exponent(&self, var: Var) -> u32 {
        self.0[self.index(var)]
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Floating point evaluation point: spatial coordinates plus a scale.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub spatial: Vec<f64>,
    pub s: f64,
}

impl Point {
    pub fn new(spatial: Vec<f64>, s: f64) -> Self {
        Point { spatial, s }
    }

    pub fn xy(x: f64, y: f64, s: f64) -> Self {
        Point {
            spatial: vec![x, y],
            s,
        }
    }
}

/// Exact sparse multivariate polynomial over the rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    n_spatial: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(n_spatial: usize) -> Self {
        Polynomial {
            n_spatial,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n_spatial: usize, c: Rational) -> Self {
        let mut p = Self::zero(n_spatial);
        p.add_term(Monomial::one(n_spatial), c);
        p
    }

    pub fn one(n_spatial: usize) -> Self {
        Self::constant(n_spatial, Rational::one())
    }

    /// The polynomial consisting of the single variable `var`.
    pub fn var(n_spatial: usize, var: Var) -> Result<Self, PolyError> {
        let mut exps = vec![0; n_spatial + 1];
        match var {
            Var::Spatial(i) if i >= n_spatial => {
                return Err(PolyError::VariableOutOfRange {
                    index: i,
                    n: n_spatial,
                })
            }
            Var::Spatial(i) => exps[i] = 1,
            Var::Scale => exps[n_spatial] = 1,
        }
        Ok(Self::monomial(Monomial(exps), Rational::one()))
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let mut p = Self::zero(m.n_spatial());
        p.add_term(m, c);
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs; like terms are combined.
    pub fn from_terms<I>(n_spatial: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut p = Self::zero(n_spatial);
        for (exps, c) in terms {
            if exps.len() != n_spatial + 1 {
                return Err(PolyError::DimensionMismatch {
                    expected: n_spatial,
                    got: exps.len().saturating_sub(1),
                });
            }
            p.add_term(Monomial(exps), c);
        }
        Ok(p)
    }

    /// Parses the canonical ASCII rendering, e.g. `x^3 - 6*x*y^2 + 1/2*s`.
    pub fn parse(text: &str, n_spatial: usize) -> Result<Self, PolyError> {
        parse::parse(text, n_spatial)
    }

    pub fn n_spatial(&self) -> usize {
        self.n_spatial
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in descending canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter().rev()
    }

    pub fn coeff(&self, exponents: &[u32]) -> Rational {
        self.terms
            .get(&Monomial(exponents.to_vec()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&vec![0; self.n_spatial + 1])
    }

    pub fn depends_on(&self, var: Var) -> bool {
        self.terms.keys().any(|m| m.exponent(var) > 0)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check_var(&self, var: Var) -> Result<(), PolyError> {
        match var {
            Var::Spatial(i) if i >= self.n_spatial => Err(PolyError::VariableOutOfRange {
                index: i,
                n: self.n_spatial,
            }),
            _ => Ok(()),
        }
    }

    fn check_same_dim(&self, other: &Polynomial) {
        assert_eq!(
            self.n_spatial, other.n_spatial,
            "polynomial arithmetic across different dimensions"
        );
    }

    pub fn scale_by(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Self::zero(self.n_spatial);
        }
        Polynomial {
            n_spatial: self.n_spatial,
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut acc = Self::one(self.n_spatial);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn differentiate(&self, var: Var) -> Result<Polynomial, PolyError> {
        self.check_var(var)?;
        let mut out = Self::zero(self.n_spatial);
        for (m, c) in &self.terms {
            let idx = m.index(var);
            let e = m.0[idx];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[idx] = e - 1;
            out.add_term(Monomial(exps), c * int(e as i64));
        }
        Ok(out)
    }

    /// Sum of second derivatives over the spatial variables only.
    pub fn laplacian(&self) -> Polynomial {
        let mut out = Self::zero(self.n_spatial);
        for (m, c) in &self.terms {
            for i in 0..self.n_spatial {
                let e = m.0[i];
                if e < 2 {
                    continue;
                }
                let mut exps = m.0.clone();
                exps[i] = e - 2;
                out.add_term(Monomial(exps), c * int((e * (e - 1)) as i64));
            }
        }
        out
    }

    /// `∂p/∂s - Δp`; zero exactly when `p` solves the heat equation.
    pub fn heat_residual(&self) -> Polynomial {
        let ds = self
            .differentiate(Var::Scale)
            .expect("scale variable always exists");
        &ds - &self.laplacian()
    }

    /// Exact evaluation at a rational point `(x1..xn, s)`.
    pub fn evaluate_exact(&self, point: &[Rational]) -> Result<Rational, PolyError> {
        if point.len() != self.n_spatial + 1 {
            return Err(PolyError::DimensionMismatch {
                expected: self.n_spatial,
                got: point.len().saturating_sub(1),
            });
        }
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (v, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    term *= num_traits::pow(v.clone(), e as usize);
                }
            }
            total += term;
        }
        Ok(total)
    }

    /// Floating point evaluation through a Horner scheme.
    ///
    /// For repeated evaluation build a [`HornerPoly`] once with [`Polynomial::horner`].
    pub fn evaluate(&self, point: &Point) -> Result<f64, PolyError> {
        if point.spatial.len() != self.n_spatial {
            return Err(PolyError::DimensionMismatch {
                expected: self.n_spatial,
                got: point.spatial.len(),
            });
        }
        let mut coords = point.spatial.clone();
        coords.push(point.s);
        Ok(self.horner().eval(&coords))
    }

    pub fn horner(&self) -> HornerPoly {
        HornerPoly::new(self)
    }

    /// Substitutes `var := var + offset[var]` for every variable, expanding exactly.
    ///
    /// `offset` holds `n_spatial + 1` entries, the last one shifting `s`.
    pub fn recenter(&self, offset: &[Rational]) -> Result<Polynomial, PolyError> {
        if offset.len() != self.n_spatial + 1 {
            return Err(PolyError::DimensionMismatch {
                expected: self.n_spatial,
                got: offset.len().saturating_sub(1),
            });
        }
        let n = self.n_spatial;
        // shifted[i] = v_i + a_i
        let shifted: Vec<Polynomial> = (0..=n)
            .map(|i| {
                let var = if i == n { Var::Scale } else { Var::Spatial(i) };
                &Self::var(n, var).unwrap() + &Self::constant(n, offset[i].clone())
            })
            .collect();
        let mut out = Self::zero(n);
        for (m, c) in &self.terms {
            let mut term = Self::constant(n, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    term = &term * &shifted[i].pow(e);
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Replaces `var` by the constant `value`.
    pub fn substitute(&self, var: Var, value: &Rational) -> Result<Polynomial, PolyError> {
        self.check_var(var)?;
        let mut out = Self::zero(self.n_spatial);
        for (m, c) in &self.terms {
            let idx = m.index(var);
            let e = m.0[idx];
            let mut exps = m.0.clone();
            exps[idx] = 0;
            out.add_term(
                Monomial(exps),
                c * num_traits::pow(value.clone(), e as usize),
            );
        }
        Ok(out)
    }

    /// Re-embeds the polynomial in `n_target` spatial variables, mapping
    /// spatial variable `i` to `i + first`.
    pub fn embed(&self, n_target: usize, first: usize) -> Result<Polynomial, PolyError> {
        if first + self.n_spatial > n_target {
            return Err(PolyError::DimensionMismatch {
                expected: n_target,
                got: first + self.n_spatial,
            });
        }
        let mut out = Self::zero(n_target);
        for (m, c) in &self.terms {
            let mut exps = vec![0; n_target + 1];
            exps[first..first + self.n_spatial].copy_from_slice(m.spatial_exponents());
            exps[n_target] = m.scale_exponent();
            out.add_term(Monomial(exps), c.clone());
        }
        Ok(out)
    }

    /// `e^{tΔ} p` as the finite series `Σ t^k Δ^k p / k!`.
    ///
    /// Equivalent to convolving with a Gaussian of per-axis variance `2t`.
    pub fn heat_flow(&self, t: &Rational) -> Result<Polynomial, PolyError> {
        if t.is_negative() {
            return Err(PolyError::NegativeTime);
        }
        self.heat_flow_by(&Self::constant(self.n_spatial, t.clone()))
    }

    /// Heat flow with a polynomial time, typically `t = s`.
    ///
    /// `heat_flow_by(p, s)` with `p` independent of `s` yields the unique
    /// polynomial heat solution with initial data `p`.
    pub fn heat_flow_by(&self, t: &Polynomial) -> Result<Polynomial, PolyError> {
        if t.n_spatial != self.n_spatial {
            return Err(PolyError::DimensionMismatch {
                expected: self.n_spatial,
                got: t.n_spatial,
            });
        }
        let mut out = Self::zero(self.n_spatial);
        let mut lap = self.clone();
        let mut t_pow = Self::one(self.n_spatial);
        let mut factorial = BigInt::one();
        let mut k: u64 = 0;
        while !lap.is_zero() {
            let coef = Rational::new(BigInt::one(), factorial.clone());
            out = &out + &(&t_pow * &lap).scale_by(&coef);
            lap = lap.laplacian();
            t_pow = &t_pow * t;
            k += 1;
            factorial *= BigInt::from(k);
        }
        Ok(out)
    }

    /// Max over terms of `|spatial exponents| + 2·(s exponent)`.
    pub fn weighted_degree(&self) -> Result<u32, PolyError> {
        self.terms
            .keys()
            .map(Monomial::weighted_degree)
            .max()
            .ok_or(PolyError::ZeroPolynomial)
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.check_same_dim(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.check_same_dim(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.check_same_dim(rhs);
        let mut out = Polynomial::zero(self.n_spatial);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale_by(&-Rational::one())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let names = spatial_names(self.n_spatial);
        for (k, (m, c)) in self.terms().enumerate() {
            let negative = c.is_negative();
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let abs = c.abs();
            let mut factors: Vec<String> = Vec::new();
            let is_const = m.degree() == 0;
            if !abs.is_one() || is_const {
                factors.push(abs.to_string());
            }
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let name = if i == self.n_spatial { "s" } else { &names[i] };
                factors.push(if e == 1 {
                    name.to_string()
                } else {
                    format!("{name}^{e}")
                });
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// The worked example `x³ − 6xy² + y² − 6sx + 2s`.
pub fn damon_family() -> Polynomial {
    Polynomial::parse("x^3 - 6*x*y^2 + y^2 - 6*s*x + 2*s", 2).expect("static polynomial")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2(text: &str) -> Polynomial {
        Polynomial::parse(text, 2).unwrap()
    }

    #[test]
    fn power_rule() {
        assert_eq!(p2("x^3").differentiate(Var::X).unwrap(), p2("3*x^2"));
    }

    #[test]
    fn derivative_in_y() {
        assert_eq!(
            p2("-6*x*y^2 + y^2").differentiate(Var::Y).unwrap(),
            p2("-12*x*y + 2*y")
        );
    }

    #[test]
    fn derivative_of_absent_variable_is_zero() {
        assert!(p2("x^2").differentiate(Var::S).unwrap().is_zero());
    }

    #[test]
    fn unknown_variable_is_rejected() {
        assert_eq!(
            p2("x").differentiate(Var::Spatial(2)),
            Err(PolyError::VariableOutOfRange { index: 2, n: 2 })
        );
    }

    #[test]
    fn laplacians() {
        assert_eq!(p2("x^2 + y^2").laplacian(), p2("4"));
        assert_eq!(p2("x^3 - 6*x*y^2 + y^2").laplacian(), p2("-6*x + 2"));
        assert!(p2("x^3 - 3*x*y^2").laplacian().is_zero());
        // s is never differentiated by the Laplacian
        assert!(p2("s^2").laplacian().is_zero());
    }

    #[test]
    fn heat_residuals() {
        assert!(damon_family().heat_residual().is_zero());
        assert!(p2("x^2 + y^2 + 4*s").heat_residual().is_zero());
        assert_eq!(p2("s*x").heat_residual(), p2("x"));
    }

    #[test]
    fn evaluations() {
        let f = damon_family();
        assert_eq!(
            f.evaluate_exact(&[rat(1, 6), int(0), rat(1, 72)]).unwrap(),
            rat(1, 54)
        );
        assert_eq!(f.evaluate(&Point::xy(0.0, 0.0, 0.0)).unwrap(), 0.0);
        assert_eq!(
            f.evaluate_exact(&[rat(1, 6), rat(1, 12), rat(1, 144)])
                .unwrap(),
            rat(1, 144) + rat(1, 216)
        );
        let v = f
            .evaluate(&Point::xy(1.0 / 6.0, 1.0 / 12.0, 1.0 / 144.0))
            .unwrap();
        assert!((v - (1.0 / 144.0 + 1.0 / 216.0)).abs() < 1e-15);
    }

    #[test]
    fn evaluate_dimension_mismatch() {
        let f = damon_family();
        assert!(matches!(
            f.evaluate(&Point::new(vec![0.0], 0.0)),
            Err(PolyError::DimensionMismatch { .. })
        ));
        assert!(f.evaluate_exact(&[int(0)]).is_err());
    }

    #[test]
    fn recenter_reproduces_shifted_family() {
        let shifted = damon_family()
            .recenter(&[rat(1, 6), int(0), int(0)])
            .unwrap();
        let expected = p2("x^3 - 6*x*y^2 + 1/2*x^2 + 1/12*x - 6*s*x + s + 1/216");
        assert_eq!(shifted, expected);
    }

    #[test]
    fn recenter_identity_and_binomial() {
        let f = damon_family();
        assert_eq!(f.recenter(&[int(0), int(0), int(0)]).unwrap(), f);
        let sq = p2("x^2").recenter(&[rat(3, 7), int(5), int(0)]).unwrap();
        assert_eq!(sq, p2("x^2 + 6/7*x + 9/49"));
    }

    #[test]
    fn heat_flow_examples() {
        let t = rat(3, 11);
        assert_eq!(p2("x^2").heat_flow(&t).unwrap(), p2("x^2 + 6/11"));
        let harmonic = p2("x^3 - 3*x*y^2");
        assert_eq!(harmonic.heat_flow(&t).unwrap(), harmonic);
        let s = Polynomial::var(2, Var::S).unwrap();
        assert_eq!(
            p2("x^3 - 6*x*y^2 + y^2").heat_flow_by(&s).unwrap(),
            damon_family()
        );
        assert_eq!(p2("x").heat_flow(&rat(-1, 2)), Err(PolyError::NegativeTime));
    }

    #[test]
    fn weighted_degrees() {
        assert_eq!(p2("s*x").weighted_degree(), Ok(3));
        assert_eq!(p2("x^3").weighted_degree(), Ok(3));
        assert_eq!(p2("s^2").weighted_degree(), Ok(4));
        assert_eq!(
            Polynomial::zero(2).weighted_degree(),
            Err(PolyError::ZeroPolynomial)
        );
    }

    #[test]
    fn display_is_canonical() {
        assert_eq!(
            damon_family().to_string(),
            "x^3 - 6*x*y^2 - 6*x*s + y^2 + 2*s"
        );
        assert_eq!(p2("-1/2 + x").to_string(), "x - 1/2");
        assert_eq!(Polynomial::zero(2).to_string(), "0");
        assert_eq!(p2("-x^2").to_string(), "-x^2");
    }

    #[test]
    fn substitute_and_embed() {
        let f = damon_family();
        let at = f.substitute(Var::S, &rat(1, 72)).unwrap();
        assert!(!at.depends_on(Var::S));
        let q = Polynomial::parse("x^2 - y^2", 2).unwrap();
        let e = q.embed(3, 1).unwrap();
        assert_eq!(e, Polynomial::parse("y^2 - z^2", 3).unwrap());
        assert!(q.embed(2, 1).is_err());
    }
}
