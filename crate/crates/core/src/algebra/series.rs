//! Sparse truncated multivariate power series over exact rationals.
//!
//! Truncation is by total degree: every operation discards terms above the
//! cutoff, so a `TruncSeries` is a canonical representative of a power series
//! modulo degree `cutoff + 1`. Term maps never store explicit zeros, and two
//! series are equal iff their term maps are equal.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use crate::algebra::{MultiIndex, Ratio};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncSeries {
    nvars: usize,
    cutoff: u32,
    terms: BTreeMap<MultiIndex, Ratio>,
}

impl TruncSeries {
    pub fn zero(nvars: usize, cutoff: u32) -> Self {
        TruncSeries { nvars, cutoff, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, cutoff: u32, c: Ratio) -> Self {
        let mut s = Self::zero(nvars, cutoff);
        s.add_term(MultiIndex::zero(nvars), c);
        s
    }

    pub fn one(nvars: usize, cutoff: u32) -> Self {
        Self::constant(nvars, cutoff, Ratio::one())
    }

    pub fn variable(nvars: usize, cutoff: u32, var: usize) -> Result<Self> {
        if var >= nvars {
            return Err(Error::IndexOutOfRange(format!("variable {var} of {nvars}")));
        }
        let mut s = Self::zero(nvars, cutoff);
        s.add_term(MultiIndex::unit(nvars, var), Ratio::one());
        Ok(s)
    }

    pub fn monomial(nvars: usize, cutoff: u32, index: MultiIndex, c: Ratio) -> Result<Self> {
        if index.len() != nvars {
            return Err(Error::DimensionMismatch(format!(
                "multi-index of length {} in {} variables",
                index.len(),
                nvars
            )));
        }
        let mut s = Self::zero(nvars, cutoff);
        s.add_term(index, c);
        Ok(s)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Ratio)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, index: &MultiIndex) -> Ratio {
        self.terms.get(index).cloned().unwrap_or_else(Ratio::zero)
    }

    pub fn constant_term(&self) -> Ratio {
        self.coeff(&MultiIndex::zero(self.nvars))
    }

    /// Smallest total degree with a nonzero term, or `None` for the zero series.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().next().map(|i| i.degree())
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|i| i.degree())
    }

    /// Adds `c · y^index`, dropping the term if it exceeds the cutoff or cancels.
    pub fn add_term(&mut self, index: MultiIndex, c: Ratio) {
        debug_assert_eq!(index.len(), self.nvars);
        if c.is_zero() || index.degree() > self.cutoff {
            return;
        }
        match self.terms.entry(index) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn same_shape(&self, rhs: &TruncSeries) -> Result<()> {
        if self.nvars != rhs.nvars || self.cutoff != rhs.cutoff {
            return Err(Error::DimensionMismatch(format!(
                "series shapes ({}, cutoff {}) vs ({}, cutoff {})",
                self.nvars, self.cutoff, rhs.nvars, rhs.cutoff
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, rhs: &TruncSeries) -> Result<TruncSeries> {
        self.same_shape(rhs)?;
        let mut out = self.clone();
        for (i, c) in &rhs.terms {
            out.add_term(i.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, rhs: &TruncSeries) -> Result<TruncSeries> {
        self.same_shape(rhs)?;
        let mut out = self.clone();
        for (i, c) in &rhs.terms {
            out.add_term(i.clone(), -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, rhs: &TruncSeries) -> Result<TruncSeries> {
        self.same_shape(rhs)?;
        let mut out = Self::zero(self.nvars, self.cutoff);
        for (i, a) in &self.terms {
            let di = i.degree();
            for (j, b) in &rhs.terms {
                if di + j.degree() > self.cutoff {
                    // rhs iterates in graded order; later terms only grow.
                    break;
                }
                out.add_term(i.add(j), a * b);
            }
        }
        Ok(out)
    }

    pub fn scalar_mul(&self, c: &Ratio) -> TruncSeries {
        if c.is_zero() {
            return Self::zero(self.nvars, self.cutoff);
        }
        let mut out = Self::zero(self.nvars, self.cutoff);
        for (i, a) in &self.terms {
            out.terms.insert(i.clone(), a * c);
        }
        out
    }

    /// Reinterprets the series at a lower (or equal) cutoff, dropping terms.
    pub fn truncated(&self, cutoff: u32) -> TruncSeries {
        let mut out = Self::zero(self.nvars, cutoff);
        for (i, c) in &self.terms {
            if i.degree() <= cutoff {
                out.terms.insert(i.clone(), c.clone());
            }
        }
        out
    }

    /// Re-embeds at an arbitrary cutoff (terms above the new cutoff drop).
    pub fn resized(&self, cutoff: u32) -> TruncSeries {
        self.truncated(cutoff)
    }

    /// The homogeneous part of total degree `d`, kept at the same cutoff.
    pub fn homogeneous_part(&self, d: u32) -> TruncSeries {
        let mut out = Self::zero(self.nvars, self.cutoff);
        for (i, c) in &self.terms {
            if i.degree() == d {
                out.terms.insert(i.clone(), c.clone());
            }
        }
        out
    }

    /// Formal partial derivative with respect to `var`.
    ///
    /// The cutoff field is kept; information at the top degree is lost, so the
    /// result is only trustworthy through degree `cutoff - 1`.
    pub fn derive(&self, var: usize) -> Result<TruncSeries> {
        if var >= self.nvars {
            return Err(Error::IndexOutOfRange(format!("variable {var} of {}", self.nvars)));
        }
        let mut out = Self::zero(self.nvars, self.cutoff);
        for (i, c) in &self.terms {
            let e = i.exponent(var);
            if e > 0 {
                let lowered = i.decrement(var).unwrap();
                out.add_term(lowered, c * &Ratio::from_int(e as i64));
            }
        }
        Ok(out)
    }

    /// Multiplication by the single variable `var` (degree shift by one).
    pub fn mul_var(&self, var: usize) -> TruncSeries {
        let mut out = Self::zero(self.nvars, self.cutoff);
        for (i, c) in &self.terms {
            out.add_term(i.increment(var), c.clone());
        }
        out
    }

    /// Substitutes `inner` into a univariate `outer`; `inner` must have zero
    /// constant term so the composition truncates degree-wise.
    pub fn substitute(outer: &TruncSeries, inner: &TruncSeries) -> Result<TruncSeries> {
        if outer.nvars != 1 {
            return Err(Error::DimensionMismatch(format!(
                "outer series has {} variables, expected 1",
                outer.nvars
            )));
        }
        if !inner.constant_term().is_zero() {
            return Err(Error::Domain("substitution requires inner constant term = 0".into()));
        }
        let cutoff = inner.cutoff;
        let mut out = TruncSeries::zero(inner.nvars, cutoff);
        let mut powers: Vec<TruncSeries> = vec![TruncSeries::one(inner.nvars, cutoff)];
        for (idx, c) in &outer.terms {
            let k = idx.exponent(0) as usize;
            while powers.len() <= k {
                let next = powers.last().unwrap().checked_mul(inner)?;
                if next.is_zero() {
                    // All higher powers vanish under truncation.
                    break;
                }
                powers.push(next);
            }
            if let Some(p) = powers.get(k) {
                out = out.checked_add(&p.scalar_mul(c))?;
            }
        }
        Ok(out)
    }

    /// Composes the coefficient sequence `coeffs[m] · a^m` (a univariate
    /// formal series given by its coefficients) with `a`; the argument must
    /// have zero constant term.
    fn compose_coefficients(&self, coeffs: impl Iterator<Item = Ratio>) -> Result<TruncSeries> {
        if !self.constant_term().is_zero() {
            return Err(Error::Domain("composition requires zero constant term".into()));
        }
        let mut out = TruncSeries::zero(self.nvars, self.cutoff);
        let mut power = TruncSeries::one(self.nvars, self.cutoff);
        for (m, c) in coeffs.enumerate() {
            if m > 0 {
                power = power.checked_mul(self)?;
                if power.is_zero() {
                    break;
                }
            }
            out = out.checked_add(&power.scalar_mul(&c))?;
        }
        Ok(out)
    }

    /// log(1 + a) for a series `a` with zero constant term (Mercator series).
    pub fn log1p(&self) -> Result<TruncSeries> {
        let cutoff = self.cutoff as i64;
        self.compose_coefficients((0..=cutoff).map(|m| {
            if m == 0 {
                Ratio::zero()
            } else if m % 2 == 1 {
                Ratio::new(1, m).unwrap()
            } else {
                Ratio::new(-1, m).unwrap()
            }
        }))
    }

    /// exp(a) for a series with zero constant term.
    pub fn exp(&self) -> Result<TruncSeries> {
        let cutoff = self.cutoff as i64;
        let mut factorial = Ratio::one();
        let coeffs: Vec<Ratio> = (0..=cutoff)
            .map(|m| {
                if m > 0 {
                    factorial *= Ratio::from_int(m);
                }
                factorial.recip().unwrap()
            })
            .collect();
        self.compose_coefficients(coeffs.into_iter())
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn inverse(&self) -> Result<TruncSeries> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(Error::Domain("inverse requires nonzero constant term".into()));
        }
        let c0_inv = c0.recip()?;
        // a = c0 (1 + u); a^{-1} = c0^{-1} sum (-u)^m.
        let u = self.scalar_mul(&c0_inv).checked_sub(&TruncSeries::one(self.nvars, self.cutoff))?;
        let geo = u.compose_coefficients((0..=self.cutoff as i64).map(|m| {
            if m % 2 == 0 {
                Ratio::one()
            } else {
                Ratio::from_int(-1)
            }
        }))?;
        Ok(geo.scalar_mul(&c0_inv))
    }

    /// a^{-1/2}; the constant term must be a nonzero perfect rational square.
    pub fn inv_sqrt(&self) -> Result<TruncSeries> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(Error::Domain("inv_sqrt requires nonzero constant term".into()));
        }
        let root = c0
            .sqrt_exact()
            .ok_or_else(|| Error::Domain(format!("inv_sqrt constant term {c0} is not a rational square")))?;
        let u = self
            .scalar_mul(&c0.recip()?)
            .checked_sub(&TruncSeries::one(self.nvars, self.cutoff))?;
        // (1 + u)^{-1/2} = sum binom(-1/2, m) u^m, binom(-1/2, m) = (-1/4)^m C(2m, m).
        let mut binom = Ratio::one();
        let coeffs: Vec<Ratio> = (0..=self.cutoff as i64)
            .map(|m| {
                if m > 0 {
                    // binom(-1/2, m) = binom(-1/2, m-1) * (-1/2 - (m-1)) / m
                    binom *= Ratio::new(-(2 * m - 1), 2 * m).unwrap();
                }
                binom.clone()
            })
            .collect();
        let series = u.compose_coefficients(coeffs.into_iter())?;
        Ok(series.scalar_mul(&root.recip()?))
    }

    /// Canonical text form: one term per line, `e1,...,en : p/q`, graded-lex
    /// order, LF endings. The zero series renders as the empty string.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, c) in &self.terms {
            let _ = writeln!(out, "{i} : {c}");
        }
        out
    }

    pub fn parse(nvars: usize, cutoff: u32, text: &str) -> Result<TruncSeries> {
        let mut out = TruncSeries::zero(nvars, cutoff);
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (idx_part, coeff_part) = line
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("line {}: missing ':'", lineno + 1)))?;
            let exponents: Vec<u32> = idx_part
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::Parse(format!("line {}: bad exponent {t:?}", lineno + 1)))
                })
                .collect::<Result<_>>()?;
            if exponents.len() != nvars {
                return Err(Error::Parse(format!(
                    "line {}: {} exponents, expected {nvars}",
                    lineno + 1,
                    exponents.len()
                )));
            }
            let index = MultiIndex::from_exponents(exponents);
            if index.degree() > cutoff {
                return Err(Error::Parse(format!(
                    "line {}: degree {} exceeds cutoff {cutoff}",
                    lineno + 1,
                    index.degree()
                )));
            }
            let c: Ratio = coeff_part.parse()?;
            out.add_term(index, c);
        }
        Ok(out)
    }
}

impl Add for &TruncSeries {
    type Output = TruncSeries;
    fn add(self, rhs: &TruncSeries) -> TruncSeries {
        self.checked_add(rhs).expect("series shape mismatch")
    }
}

impl Sub for &TruncSeries {
    type Output = TruncSeries;
    fn sub(self, rhs: &TruncSeries) -> TruncSeries {
        self.checked_sub(rhs).expect("series shape mismatch")
    }
}

impl Mul for &TruncSeries {
    type Output = TruncSeries;
    fn mul(self, rhs: &TruncSeries) -> TruncSeries {
        self.checked_mul(rhs).expect("series shape mismatch")
    }
}

impl Neg for &TruncSeries {
    type Output = TruncSeries;
    fn neg(self) -> TruncSeries {
        self.scalar_mul(&Ratio::from_int(-1))
    }
}

/// `|y|^2 = y_1^2 + ... + y_n^2` as a series.
pub fn norm_squared(nvars: usize, cutoff: u32) -> TruncSeries {
    let mut s = TruncSeries::zero(nvars, cutoff);
    for v in 0..nvars {
        let mut idx = MultiIndex::zero(nvars);
        idx = idx.increment(v).increment(v);
        s.add_term(idx, Ratio::one());
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(n: usize, k: u32, v: usize) -> TruncSeries {
        TruncSeries::variable(n, k, v).unwrap()
    }

    #[test]
    fn product_truncates() {
        // (1 + u)(1 - u) at cutoff 3 = 1 - u^2
        let one = TruncSeries::one(1, 3);
        let u = var(1, 3, 0);
        let lhs = &(&one + &u) * &(&one - &u);
        let u2 = &u * &u;
        assert_eq!(lhs, &one - &u2);
        // u^2 * u^2 at cutoff 3 = 0
        assert!((&u2 * &u2).is_zero());
    }

    #[test]
    fn rational_addition() {
        let u = var(1, 3, 0);
        let s = &u.scalar_mul(&Ratio::new(1, 2).unwrap()) + &u.scalar_mul(&Ratio::new(1, 3).unwrap());
        assert_eq!(s, u.scalar_mul(&Ratio::new(5, 6).unwrap()));
    }

    #[test]
    fn mercator_series() {
        // log(1 + (-t)) = -t - t^2/2 - t^3/3 at cutoff 3
        let t = var(1, 3, 0);
        let got = (-&t).log1p().unwrap();
        let mut want = TruncSeries::zero(1, 3);
        want.add_term(MultiIndex::from_exponents(vec![1]), Ratio::from_int(-1));
        want.add_term(MultiIndex::from_exponents(vec![2]), Ratio::new(-1, 2).unwrap());
        want.add_term(MultiIndex::from_exponents(vec![3]), Ratio::new(-1, 3).unwrap());
        assert_eq!(got, want);
    }

    #[test]
    fn geometric_inverse() {
        // (1 - u)^{-1} = 1 + u + u^2 at cutoff 2
        let one = TruncSeries::one(1, 2);
        let u = var(1, 2, 0);
        let got = (&one - &u).inverse().unwrap();
        let want = &(&one + &u) + &(&u * &u);
        assert_eq!(got, want);
    }

    #[test]
    fn inv_sqrt_matches_binomial_oracle() {
        // 1/sqrt(1 - |y|^2) at cutoff 4 = 1 + |y|^2/2 + 3|y|^4/8.
        // Oracle: binomial coefficients of (1-t)^{-1/2} expanded in t = |y|^2.
        let one = TruncSeries::one(2, 4);
        let r2 = norm_squared(2, 4);
        let got = (&one - &r2).inv_sqrt().unwrap();
        let mut want = one.clone();
        want = &want + &r2.scalar_mul(&Ratio::new(1, 2).unwrap());
        want = &want + &(&r2 * &r2).scalar_mul(&Ratio::new(3, 8).unwrap());
        assert_eq!(got, want);
    }

    #[test]
    fn substitution_examples() {
        // outer = sum t^n / (2n), inner = -u -> -u/2 + u^2/4 - u^3/6 at cutoff 3
        let mut outer = TruncSeries::zero(1, 3);
        for m in 1..=3i64 {
            outer.add_term(MultiIndex::from_exponents(vec![m as u32]), Ratio::new(1, 2 * m).unwrap());
        }
        let u = var(1, 3, 0);
        let got = TruncSeries::substitute(&outer, &(-&u)).unwrap();
        let mut want = TruncSeries::zero(1, 3);
        want.add_term(MultiIndex::from_exponents(vec![1]), Ratio::new(-1, 2).unwrap());
        want.add_term(MultiIndex::from_exponents(vec![2]), Ratio::new(1, 4).unwrap());
        want.add_term(MultiIndex::from_exponents(vec![3]), Ratio::new(-1, 6).unwrap());
        assert_eq!(got, want);

        // inner = 0 -> 0
        let zero = TruncSeries::zero(1, 3);
        assert!(TruncSeries::substitute(&outer, &zero).unwrap().is_zero());

        // nonzero inner constant term is a domain error
        let bad = TruncSeries::one(1, 3);
        assert!(TruncSeries::substitute(&outer, &bad).is_err());
    }

    #[test]
    fn derivative_examples() {
        // d/dy1 (y1^2 y2) = 2 y1 y2
        let k = 4;
        let y1 = var(2, k, 0);
        let y2 = var(2, k, 1);
        let f = &(&y1 * &y1) * &y2;
        assert_eq!(f.derive(0).unwrap(), (&y1 * &y2).scalar_mul(&Ratio::from_int(2)));
        // derivative of a constant
        assert!(TruncSeries::one(2, k).derive(0).unwrap().is_zero());
        // divergence of the Euler field: sum_i d/dy_i (y_i) = n
        let n = 3;
        let mut div = TruncSeries::zero(n, k);
        for i in 0..n {
            div = &div + &var(n, k, i).derive(i).unwrap();
        }
        assert_eq!(div, TruncSeries::constant(n, k, Ratio::from_int(n as i64)));
        assert!(y1.derive(5).is_err());
    }

    #[test]
    fn shape_mismatch_errors() {
        let a = TruncSeries::one(1, 3);
        let b = TruncSeries::one(2, 3);
        let c = TruncSeries::one(1, 4);
        assert!(a.checked_add(&b).is_err());
        assert!(a.checked_mul(&c).is_err());
    }

    #[test]
    fn transcendental_domain_errors() {
        let one = TruncSeries::one(1, 3);
        assert!(one.log1p().is_err());
        assert!(one.exp().is_err());
        assert!(TruncSeries::zero(1, 3).inverse().is_err());
        // constant term 2 is not a rational square
        let two = TruncSeries::constant(1, 3, Ratio::from_int(2));
        assert!(two.inv_sqrt().is_err());
    }

    #[test]
    fn render_parse_roundtrip() {
        let mut s = TruncSeries::zero(2, 4);
        s.add_term(MultiIndex::from_exponents(vec![1, 2]), Ratio::new(-7, 3).unwrap());
        s.add_term(MultiIndex::from_exponents(vec![0, 0]), Ratio::from_int(5));
        let text = s.render();
        assert_eq!(text, "0,0 : 5\n1,2 : -7/3\n");
        assert_eq!(TruncSeries::parse(2, 4, &text).unwrap(), s);
    }
}
