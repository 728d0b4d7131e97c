//! Laurent series in the loop parameter over an arbitrary coefficient ring.
//!
//! Intermediate objects like e^{I/hbar} carry negative powers; truncation in
//! both the polynomial degree and the top power keeps everything finite.

use std::collections::BTreeMap;

use crate::algebra::Ratio;
use crate::error::Result;

/// Coefficient ring for Laurent payloads.
pub trait Coeff: Clone {
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Result<Self>;
    fn sub(&self, rhs: &Self) -> Result<Self>;
    fn mul(&self, rhs: &Self) -> Result<Self>;
    fn scalar_mul(&self, c: &Ratio) -> Self;
}

impl Coeff for crate::algebra::TruncSeries {
    fn is_zero(&self) -> bool {
        self.is_zero()
    }
    fn add(&self, rhs: &Self) -> Result<Self> {
        self.checked_add(rhs)
    }
    fn sub(&self, rhs: &Self) -> Result<Self> {
        self.checked_sub(rhs)
    }
    fn mul(&self, rhs: &Self) -> Result<Self> {
        self.checked_mul(rhs)
    }
    fn scalar_mul(&self, c: &Ratio) -> Self {
        self.scalar_mul(c)
    }
}

/// Sparse Laurent series: power -> coefficient, truncated above `top`.
#[derive(Clone, Debug)]
pub struct Laurent<P: Coeff> {
    top: i32,
    terms: BTreeMap<i32, P>,
}

impl<P: Coeff + PartialEq> PartialEq for Laurent<P> {
    fn eq(&self, other: &Self) -> bool {
        self.top == other.top && self.terms == other.terms
    }
}

impl<P: Coeff> Laurent<P> {
    pub fn zero(top: i32) -> Self {
        Laurent { top, terms: BTreeMap::new() }
    }

    pub fn single(top: i32, power: i32, payload: P) -> Self {
        let mut l = Self::zero(top);
        l.add_term(power, payload);
        l
    }

    pub fn top(&self) -> i32 {
        self.top
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_power(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn coeff(&self, power: i32) -> Option<&P> {
        self.terms.get(&power)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i32, &P)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, power: i32, payload: P) {
        if power > self.top || payload.is_zero() {
            return;
        }
        match self.terms.entry(power) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(payload);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&payload).expect("payload shapes match");
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (p, v) in &rhs.terms {
            let merged = match out.terms.get(p) {
                Some(cur) => cur.add(v)?,
                None => v.clone(),
            };
            if merged.is_zero() {
                out.terms.remove(p);
            } else if *p <= out.top {
                out.terms.insert(*p, merged);
            }
        }
        Ok(out)
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        self.checked_add(&rhs.scalar_mul(&Ratio::from_int(-1)))
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        let mut out = Self::zero(self.top);
        for (p, a) in &self.terms {
            for (q, b) in &rhs.terms {
                if p + q > self.top {
                    break;
                }
                out.add_term(p + q, a.mul(b)?);
            }
        }
        Ok(out)
    }

    pub fn scalar_mul(&self, c: &Ratio) -> Self {
        if c.is_zero() {
            return Self::zero(self.top);
        }
        Laurent {
            top: self.top,
            terms: self.terms.iter().map(|(p, v)| (*p, v.scalar_mul(c))).collect(),
        }
    }

    /// Multiplies by the k-th power of the parameter.
    pub fn shift(&self, k: i32) -> Self {
        let mut out = Self::zero(self.top);
        for (p, v) in &self.terms {
            out.add_term(p + k, v.clone());
        }
        out
    }

    /// exp of a filtered-positive element: the iteration stops when powers of
    /// the argument vanish under truncation; `max_steps` bounds it hard.
    pub fn exp(&self, one: &P, max_steps: usize) -> Result<Self> {
        let mut out = Laurent::single(self.top, 0, one.clone());
        let mut power = Laurent::single(self.top, 0, one.clone());
        let mut factorial = Ratio::one();
        for m in 1..=max_steps {
            power = power.checked_mul(self)?;
            if power.is_zero() {
                break;
            }
            factorial *= Ratio::from_int(m as i64);
            out = out.checked_add(&power.scalar_mul(&factorial.recip().unwrap()))?;
        }
        Ok(out)
    }

    /// log(1 + u) for a filtered-positive deviation u = self.
    pub fn log1p(&self, max_steps: usize) -> Result<Self> {
        let mut out = Self::zero(self.top);
        let mut power = self.clone();
        for m in 1..=max_steps {
            if power.is_zero() {
                break;
            }
            let sign = if m % 2 == 1 { 1 } else { -1 };
            let coeff = Ratio::new(sign, m as i64).unwrap();
            out = out.checked_add(&power.scalar_mul(&coeff))?;
            power = power.checked_mul(self)?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::TruncSeries;

    #[test]
    fn exp_log_roundtrip() {
        // u = h * x: log(exp(u)) = u at top power 4.
        let x = TruncSeries::variable(1, 6, 0).unwrap();
        let one = TruncSeries::one(1, 6);
        let u = Laurent::single(4, 1, x);
        let e = u.exp(&one, 20).unwrap();
        let dev = e.checked_sub(&Laurent::single(4, 0, one.clone())).unwrap();
        let back = dev.log1p(20).unwrap();
        assert_eq!(back, u);
    }
}
