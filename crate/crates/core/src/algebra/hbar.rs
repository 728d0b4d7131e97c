//! Formal power series in the loop-counting parameter.
//!
//! The parameter is never evaluated at a number; coefficients are truncated
//! series sharing one shape.

use std::ops::{Add, Mul, Sub};

use crate::algebra::{Ratio, TruncSeries};
use crate::error::{Error, Result};

/// Polynomial data graded by powers of the formal parameter, truncated at
/// `hbar_cutoff`. `coeffs[j]` is the coefficient of the j-th power.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HbarSeries {
    hbar_cutoff: usize,
    coeffs: Vec<TruncSeries>,
}

impl HbarSeries {
    pub fn zero(nvars: usize, cutoff: u32, hbar_cutoff: usize) -> Self {
        HbarSeries {
            hbar_cutoff,
            coeffs: vec![TruncSeries::zero(nvars, cutoff); hbar_cutoff + 1],
        }
    }

    /// Builds from explicit coefficients; all payloads must share one shape.
    pub fn from_coeffs(hbar_cutoff: usize, coeffs: Vec<TruncSeries>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() > hbar_cutoff + 1 {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for hbar cutoff {hbar_cutoff}",
                coeffs.len()
            )));
        }
        let (nv, k) = (coeffs[0].nvars(), coeffs[0].cutoff());
        if coeffs.iter().any(|c| c.nvars() != nv || c.cutoff() != k) {
            return Err(Error::DimensionMismatch("mixed payload shapes".into()));
        }
        let mut s = Self::zero(nv, k, hbar_cutoff);
        for (j, c) in coeffs.into_iter().enumerate() {
            s.coeffs[j] = c;
        }
        Ok(s)
    }

    pub fn hbar_cutoff(&self) -> usize {
        self.hbar_cutoff
    }

    pub fn nvars(&self) -> usize {
        self.coeffs[0].nvars()
    }

    pub fn cutoff(&self) -> u32 {
        self.coeffs[0].cutoff()
    }

    pub fn coeff(&self, power: usize) -> &TruncSeries {
        &self.coeffs[power]
    }

    pub fn set_coeff(&mut self, power: usize, s: TruncSeries) {
        self.coeffs[power] = s;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn scalar_mul(&self, c: &Ratio) -> Self {
        HbarSeries {
            hbar_cutoff: self.hbar_cutoff,
            coeffs: self.coeffs.iter().map(|s| s.scalar_mul(c)).collect(),
        }
    }

    fn same_shape(&self, rhs: &Self) -> Result<()> {
        if self.hbar_cutoff != rhs.hbar_cutoff
            || self.nvars() != rhs.nvars()
            || self.cutoff() != rhs.cutoff()
        {
            return Err(Error::DimensionMismatch("hbar series shapes differ".into()));
        }
        Ok(())
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        self.same_shape(rhs)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a.checked_add(b))
            .collect::<Result<_>>()?;
        Ok(HbarSeries { hbar_cutoff: self.hbar_cutoff, coeffs })
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        self.same_shape(rhs)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a.checked_sub(b))
            .collect::<Result<_>>()?;
        Ok(HbarSeries { hbar_cutoff: self.hbar_cutoff, coeffs })
    }

    /// Cauchy product in the formal parameter, truncated at the cutoff.
    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        self.same_shape(rhs)?;
        let mut out = Self::zero(self.nvars(), self.cutoff(), self.hbar_cutoff);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if i + j > self.hbar_cutoff {
                    break;
                }
                let prod = a.checked_mul(b)?;
                out.coeffs[i + j] = out.coeffs[i + j].checked_add(&prod)?;
            }
        }
        Ok(out)
    }
}

impl Add for &HbarSeries {
    type Output = HbarSeries;
    fn add(self, rhs: &HbarSeries) -> HbarSeries {
        self.checked_add(rhs).expect("hbar series shape mismatch")
    }
}

impl Sub for &HbarSeries {
    type Output = HbarSeries;
    fn sub(self, rhs: &HbarSeries) -> HbarSeries {
        self.checked_sub(rhs).expect("hbar series shape mismatch")
    }
}

impl Mul for &HbarSeries {
    type Output = HbarSeries;
    fn mul(self, rhs: &HbarSeries) -> HbarSeries {
        self.checked_mul(rhs).expect("hbar series shape mismatch")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cauchy_product_truncates() {
        let one = TruncSeries::one(1, 2);
        // (1 + h)^2 at hbar cutoff 1 = 1 + 2h
        let s = HbarSeries::from_coeffs(1, vec![one.clone(), one.clone()]).unwrap();
        let sq = (&s * &s).coeffs;
        assert_eq!(sq[0], one);
        assert_eq!(sq[1], one.scalar_mul(&Ratio::from_int(2)));
    }
}
