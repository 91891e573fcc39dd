//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! A [`Poly`] lives on a chart with a fixed number of variables. Terms are
//! kept in canonical form: no stored coefficient is zero, so equality of
//! polynomials is structural equality and `is_zero` is exact.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Exponent multi-index, one entry per chart variable.
pub type Monomial = Vec<u32>;

pub fn rat(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, rat(c))
    }

    /// The coordinate function of variable `index` (zero-based).
    pub fn var(nvars: usize, index: usize) -> Self {
        assert!(index < nvars, "variable {index} out of range for {nvars} variables");
        let mut exps = vec![0; nvars];
        exps[index] = 1;
        Self::monomial(exps, Rational::one())
    }

    pub fn monomial(exps: Monomial, coeff: Rational) -> Self {
        let mut p = Self::zero(exps.len());
        if !coeff.is_zero() {
            p.terms.insert(exps, coeff);
        }
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, merging
    /// repeated monomials.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (exps, c) in terms {
            if exps.len() != nvars {
                return Err(Error::ChartMismatch {
                    expected: nvars,
                    found: exps.len(),
                });
            }
            p.add_term(exps, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, exps: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn constant_term(&self) -> Rational {
        self.terms.get(&vec![0; self.nvars]).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Largest total degree in the variables `vars`; `None` for the zero
    /// polynomial.
    pub fn degree_in(&self, vars: std::ops::Range<usize>) -> Option<u32> {
        self.terms.keys().map(|e| e[vars.clone()].iter().sum()).max()
    }

    fn check_chart(&self, other: &Poly) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::ChartMismatch {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Poly) -> Result<Poly> {
        self.check_chart(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Poly) -> Result<Poly> {
        self.check_chart(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Poly) -> Result<Poly> {
        self.check_chart(other)?;
        let mut out = Poly::zero(self.nvars);
        if self.is_zero() || other.is_zero() {
            return Ok(out);
        }
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let exps: Monomial = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(exps, c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn scale_int(&self, c: i64) -> Poly {
        self.scale(&rat(c))
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::one(self.nvars);
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Exact partial derivative with respect to variable `j` (zero-based).
    pub fn partial(&self, j: usize) -> Result<Poly> {
        if j >= self.nvars {
            return Err(Error::IndexOutOfRange { index: j, limit: self.nvars });
        }
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[j] == 0 {
                continue;
            }
            let mut exps = e.clone();
            exps[j] -= 1;
            out.add_term(exps, c * rat(e[j] as i64));
        }
        Ok(out)
    }

    /// Derivative along the vector field with components `field`.
    pub fn derive_along(&self, field: &[Poly]) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (j, x) in field.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let d = self.partial(j).expect("field length matches chart");
            if !d.is_zero() {
                out += &(x * &d);
            }
        }
        out
    }

    /// Re-reads the polynomial on a chart with `nvars` variables whose
    /// first variables are the current ones.
    pub fn extend_vars(&self, nvars: usize) -> Poly {
        assert!(nvars >= self.nvars, "cannot shrink a chart by extension");
        Poly {
            nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut exps = e.clone();
                    exps.resize(nvars, 0);
                    (exps, c.clone())
                })
                .collect(),
        }
    }

    /// Inverse of [`Poly::extend_vars`]; fails when a dropped variable occurs.
    pub fn restrict_vars(&self, nvars: usize) -> Result<Poly> {
        let mut out = Poly::zero(nvars);
        for (e, c) in &self.terms {
            if e[nvars.min(e.len())..].iter().any(|&x| x != 0) {
                return Err(Error::Invalid(format!("polynomial depends on variables beyond the first {nvars}")));
            }
            out.add_term(e[..nvars].to_vec(), c.clone());
        }
        Ok(out)
    }

    /// Substitutes `subs[i]` for variable `i`. All substitutes share one chart,
    /// which becomes the chart of the result.
    pub fn substitute(&self, subs: &[Poly]) -> Result<Poly> {
        if subs.len() != self.nvars {
            return Err(Error::ChartMismatch {
                expected: self.nvars,
                found: subs.len(),
            });
        }
        let target = subs.first().map(|p| p.nvars).unwrap_or(0);
        if let Some(bad) = subs.iter().find(|p| p.nvars != target) {
            return Err(Error::ChartMismatch {
                expected: target,
                found: bad.nvars,
            });
        }
        let mut cache: Vec<Vec<Poly>> = subs.iter().map(|s| vec![Poly::one(target), s.clone()]).collect();
        let mut out = Poly::zero(target);
        for (e, c) in &self.terms {
            let mut term = Poly::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while cache[i].len() <= k as usize {
                    let next = cache[i].last().unwrap() * &subs[i];
                    cache[i].push(next);
                }
                term = &term * &cache[i][k as usize];
            }
            out += &term;
        }
        Ok(out)
    }

    /// Coefficient of the monomial `exps` in the variables `vars`, as a
    /// polynomial in the remaining variables (still on the full chart).
    pub fn coefficient_in(&self, vars: &[usize], exps: &[u32]) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if vars.iter().zip(exps).all(|(&v, &k)| e[v] == k) {
                let mut rest = e.clone();
                for &v in vars {
                    rest[v] = 0;
                }
                out.add_term(rest, c.clone());
            }
        }
        out
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.nvars {
            return Err(Error::ChartMismatch {
                expected: self.nvars,
                found: point.len(),
            });
        }
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    t *= x;
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay {
            poly: self,
            names: Some(names),
        }
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Poly,
    names: Option<&'a [String]>,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        // Highest-degree terms first reads closer to hand-written input.
        let mut terms: Vec<_> = self.poly.terms.iter().collect();
        terms.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then_with(|| b.0.cmp(a.0))
        });
        for (n, (exps, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if n == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let is_const = exps.iter().all(|&k| k == 0);
            let mut first = true;
            if is_const || !abs.is_one() {
                write!(f, "{}", abs)?;
                first = false;
            }
            for (i, &k) in exps.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                match self.names {
                    Some(names) => write!(f, "{}", names[i])?,
                    None => write!(f, "x{}", i + 1)?,
                }
                if k > 1 {
                    write!(f, "^{}", k)?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        PolyDisplay { poly: self, names: None }.fmt(f)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&Poly> for &Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                self.$checked(rhs).expect("polynomials on different charts")
            }
        }
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                (&self).$method(rhs)
            }
        }
        impl $tr<Poly> for &Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        assert_eq!(self.nvars, rhs.nvars, "polynomials on different charts");
        for (e, c) in &rhs.terms {
            self.add_term(e.clone(), c.clone());
        }
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        assert_eq!(self.nvars, rhs.nvars, "polynomials on different charts");
        for (e, c) in &rhs.terms {
            self.add_term(e.clone(), -c.clone());
        }
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Poly {
        Poly::var(2, i)
    }

    #[test]
    fn additive_identity() {
        assert_eq!(&x(0) + &Poly::zero(2), x(0));
    }

    #[test]
    fn difference_of_squares() {
        let one = Poly::one(2);
        let lhs = (&x(0) + &one) * (&x(0) - &one);
        assert_eq!(lhs, &x(0).pow(2) - &one);
    }

    #[test]
    fn termwise_product() {
        let a = (&x(0) * &x(1)).scale_int(2);
        let b = x(1).scale_int(3);
        let expected = Poly::monomial(vec![1, 2], rat(6));
        assert_eq!(&a * &b, expected);
    }

    #[test]
    fn chart_mismatch_is_an_error() {
        let a = Poly::var(1, 0);
        let b = Poly::var(2, 0);
        assert!(matches!(a.checked_add(&b), Err(Error::ChartMismatch { .. })));
        assert!(a.checked_mul(&b).is_err());
    }

    #[test]
    fn partial_derivatives() {
        let p = &x(0).pow(2) * &x(1);
        assert_eq!(p.partial(0).unwrap(), (&x(0) * &x(1)).scale_int(2));
        assert_eq!(p.partial(1).unwrap(), x(0).pow(2));
        assert!(Poly::from_int(2, 5).partial(0).unwrap().is_zero());
        assert!(matches!(p.partial(2), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn zero_test() {
        assert!((&x(0) - &x(0)).is_zero());
        let one = Poly::one(2);
        let sq = (&x(0) + &one).pow(2);
        let r = &(&(&sq - &x(0).pow(2)) - &x(0).scale_int(2)) - &one;
        assert!(r.is_zero());
        assert!(!(&x(0) * &x(1)).is_zero());
    }

    #[test]
    fn substitution_and_coefficients() {
        // p(x, y) = x^2 y + 3; substitute x -> y + 1, y -> 2
        let p = &(&x(0).pow(2) * &x(1)) + &Poly::from_int(2, 3);
        let subs = [&x(1) + &Poly::one(2), Poly::from_int(2, 2)];
        let q = p.substitute(&subs).unwrap();
        let y = x(1);
        let expected = &(&(&y.pow(2) + &y.scale_int(2)) + &Poly::one(2)).scale_int(2) + &Poly::from_int(2, 3);
        assert_eq!(q, expected);
        assert_eq!(p.coefficient_in(&[0], &[2]), x(1));
        assert_eq!(p.coefficient_in(&[0, 1], &[0, 0]), Poly::from_int(2, 3));
    }

    #[test]
    fn display_is_readable() {
        let p = &(&(&x(0).pow(2) * &x(1)).scale(&ratio(3, 2)) - &x(1)) + &Poly::one(2);
        assert_eq!(p.to_string(), "3/2*x1^2*x2 - x2 + 1");
        assert_eq!((-&x(0)).to_string(), "-x1");
    }

    #[test]
    fn extend_and_restrict_round_trip() {
        let p = &x(0) * &x(1);
        let e = p.extend_vars(4);
        assert_eq!(e.nvars(), 4);
        assert_eq!(e.restrict_vars(2).unwrap(), p);
        assert!(Poly::var(3, 2).restrict_vars(2).is_err());
    }
}
