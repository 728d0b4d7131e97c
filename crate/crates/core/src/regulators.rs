//! Heat-kernel coincidence values and scale-divergence bookkeeping on the
//! plane, plus eigenvalue-cutoff propagators for the finite-dimensional toy
//! theory.
//!
//! Divergences are carried symbolically in exactly two channels: 1/(4 pi eps)
//! and (1/4 pi) log(L/eps). Scale markers interpolate log-linearly between
//! eps and L so that every symbolic window stays inside those channels.

use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::Ratio;
use crate::error::{Error, Result};

/// Symbolic finite tokens a divergence-free part can carry.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum FiniteToken {
    One,
    LogL,
    InvL,
}

impl fmt::Display for FiniteToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiniteToken::One => write!(f, "1"),
            FiniteToken::LogL => write!(f, "log L"),
            FiniteToken::InvL => write!(f, "1/L"),
        }
    }
}

/// A value with symbolic divergence channels.
///
/// Interpretation: `inv_eps / (4 pi eps) + log_le * (1/4 pi) log(L/eps)
/// + finite`, with the finite part a rational combination of tokens.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DivergentValue {
    pub inv_eps: Ratio,
    pub log_le: Ratio,
    finite: BTreeMap<FiniteToken, Ratio>,
}

impl DivergentValue {
    pub fn zero() -> Self {
        DivergentValue { inv_eps: Ratio::zero(), log_le: Ratio::zero(), finite: BTreeMap::new() }
    }

    pub fn inv_eps_channel(c: Ratio) -> Self {
        DivergentValue { inv_eps: c, ..Self::zero() }
    }

    pub fn log_channel(c: Ratio) -> Self {
        DivergentValue { log_le: c, ..Self::zero() }
    }

    pub fn finite_token(token: FiniteToken, c: Ratio) -> Self {
        let mut v = Self::zero();
        v.add_finite(token, c);
        v
    }

    pub fn add_finite(&mut self, token: FiniteToken, c: Ratio) {
        if c.is_zero() {
            return;
        }
        let e = self.finite.entry(token).or_insert_with(Ratio::zero);
        *e += c;
        if e.is_zero() {
            self.finite.remove(&token);
        }
    }

    pub fn finite_coeff(&self, token: FiniteToken) -> Ratio {
        self.finite.get(&token).cloned().unwrap_or_else(Ratio::zero)
    }

    /// A value is finite iff both divergence channels vanish.
    pub fn is_finite(&self) -> bool {
        self.inv_eps.is_zero() && self.log_le.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.is_finite() && self.finite.is_empty()
    }

    pub fn add(&self, rhs: &DivergentValue) -> DivergentValue {
        let mut out = self.clone();
        out.inv_eps += rhs.inv_eps.clone();
        out.log_le += rhs.log_le.clone();
        for (t, c) in &rhs.finite {
            out.add_finite(*t, c.clone());
        }
        out
    }

    pub fn scalar_mul(&self, c: &Ratio) -> DivergentValue {
        let mut out = DivergentValue {
            inv_eps: &self.inv_eps * c,
            log_le: &self.log_le * c,
            finite: BTreeMap::new(),
        };
        for (t, v) in &self.finite {
            out.add_finite(*t, v * c);
        }
        out
    }

    pub fn neg(&self) -> DivergentValue {
        self.scalar_mul(&Ratio::from_int(-1))
    }

    /// Float rendering at concrete scales (reports only).
    pub fn eval_f64(&self, eps: f64, l: f64) -> f64 {
        let four_pi = 4.0 * std::f64::consts::PI;
        self.inv_eps.to_f64() / (four_pi * eps)
            + self.log_le.to_f64() * (l / eps).ln() / four_pi
            + self.finite_coeff(FiniteToken::One).to_f64()
            + self.finite_coeff(FiniteToken::LogL).to_f64() * l.ln()
            + self.finite_coeff(FiniteToken::InvL).to_f64() / l
    }

    /// Report form: {"inv_eps": "p/q", "log": "p/q", "finite": "..."}.
    pub fn to_json(&self) -> serde_json::Value {
        let finite = if self.finite.is_empty() {
            "0".to_string()
        } else {
            self.finite
                .iter()
                .map(|(t, c)| format!("{c}*{t}"))
                .collect::<Vec<_>>()
                .join(" + ")
        };
        serde_json::json!({
            "inv_eps": self.inv_eps.to_string(),
            "log": self.log_le.to_string(),
            "finite": finite,
        })
    }
}

/// Symbolic scale marker: log-linear interpolation between eps (t = 0) and
/// L (t = 1), i.e. log marker = (1 - t) log(eps) + t log(L).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ScaleMarker(Ratio);

impl ScaleMarker {
    pub fn eps() -> Self {
        ScaleMarker(Ratio::zero())
    }

    pub fn infrared() -> Self {
        ScaleMarker(Ratio::one())
    }

    /// Geometric interpolation between the two regulators, rational weight.
    pub fn geometric(t: Ratio) -> Self {
        ScaleMarker(t)
    }
}

/// Coincidence-point heat kernel: K_t(x,x) = 1/t in units of 1/(4 pi).
pub fn heat_kernel_coincident(t: &Ratio) -> Result<Ratio> {
    if !t.is_positive() {
        return Err(Error::Domain(format!("heat kernel needs t > 0, got {t}")));
    }
    t.recip()
}

/// Coincidence-point heat kernel at the symbolic ultraviolet scale: the
/// 1/(4 pi eps) channel with unit coefficient.
pub fn heat_kernel_coincident_eps() -> DivergentValue {
    DivergentValue::inv_eps_channel(Ratio::one())
}

/// Tadpole P(a,b)(x,x) = (1/4 pi) log(b/a) over a symbolic window.
/// For the full window (eps, L) this is the unit log channel.
pub fn tadpole_integral(lower: &ScaleMarker, upper: &ScaleMarker) -> DivergentValue {
    DivergentValue::log_channel(&upper.0 - &lower.0)
}

/// Eigenvalue-window propagator: diag entries 1/lambda for lambda in
/// (lower, upper], zero otherwise.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EigenPropagator {
    eigenvalues: Vec<Ratio>,
    entries: Vec<Ratio>,
}

impl EigenPropagator {
    pub fn diagonal(&self) -> &[Ratio] {
        &self.entries
    }

    pub fn add(&self, rhs: &EigenPropagator) -> Result<EigenPropagator> {
        if self.eigenvalues != rhs.eigenvalues {
            return Err(Error::DimensionMismatch("propagators over different spectra".into()));
        }
        Ok(EigenPropagator {
            eigenvalues: self.eigenvalues.clone(),
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }
}

/// Window selection over a positive spectrum; `upper = None` means infinity.
pub fn eigen_propagator(
    eigenvalues: &[Ratio],
    lower: &Ratio,
    upper: Option<&Ratio>,
) -> Result<EigenPropagator> {
    for l in eigenvalues {
        if !l.is_positive() {
            return Err(Error::Domain(format!("nonpositive eigenvalue {l}")));
        }
    }
    if let Some(u) = upper {
        if u < lower {
            return Err(Error::Domain("propagator window is empty the wrong way".into()));
        }
    }
    let entries = eigenvalues
        .iter()
        .map(|l| {
            let in_window = l > lower && upper.map_or(true, |u| l <= u);
            if in_window {
                l.recip().unwrap()
            } else {
                Ratio::zero()
            }
        })
        .collect();
    Ok(EigenPropagator { eigenvalues: eigenvalues.to_vec(), entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Ratio {
        Ratio::new(n, d).unwrap()
    }

    #[test]
    fn heat_kernel_values() {
        assert_eq!(heat_kernel_coincident(&Ratio::one()).unwrap(), Ratio::one());
        assert_eq!(heat_kernel_coincident(&Ratio::from_int(2)).unwrap(), q(1, 2));
        assert!(heat_kernel_coincident(&Ratio::zero()).is_err());
        assert_eq!(heat_kernel_coincident_eps().inv_eps, Ratio::one());
    }

    #[test]
    fn tadpole_full_window() {
        let t = tadpole_integral(&ScaleMarker::eps(), &ScaleMarker::infrared());
        assert_eq!(t.log_le, Ratio::one());
        assert!(t.inv_eps.is_zero());
        // eps = L: empty integral.
        assert!(tadpole_integral(&ScaleMarker::eps(), &ScaleMarker::eps()).is_zero());
    }

    #[test]
    fn tadpole_numeric_render() {
        // eps = 1, L = e: value 1/(4 pi).
        let t = tadpole_integral(&ScaleMarker::eps(), &ScaleMarker::infrared());
        let v = t.eval_f64(1.0, std::f64::consts::E);
        assert!((v - 1.0 / (4.0 * std::f64::consts::PI)).abs() < 1e-12);
        assert!((v - 0.0795775).abs() < 1e-6);
    }

    #[test]
    fn tadpole_additivity() {
        let mid = ScaleMarker::geometric(q(1, 3));
        let a = tadpole_integral(&ScaleMarker::eps(), &mid);
        let b = tadpole_integral(&mid, &ScaleMarker::infrared());
        assert_eq!(a.add(&b), tadpole_integral(&ScaleMarker::eps(), &ScaleMarker::infrared()));
    }

    #[test]
    fn channel_arithmetic_is_modular() {
        let mut v = DivergentValue::inv_eps_channel(q(1, 2));
        v.add_finite(FiniteToken::LogL, q(3, 1));
        let w = v.scalar_mul(&q(2, 3)).add(&v.neg());
        assert_eq!(w.inv_eps, q(1, 2) * q(2, 3) - q(1, 2));
        // finite values closed under addition
        let f1 = DivergentValue::finite_token(FiniteToken::One, q(1, 1));
        let f2 = DivergentValue::finite_token(FiniteToken::InvL, q(2, 1));
        assert!(f1.add(&f2).is_finite());
    }

    #[test]
    fn eigen_propagator_windows() {
        let eigs = vec![Ratio::one(), Ratio::from_int(2)];
        // window (3/2, inf) on {1, 2} -> diag(0, 1/2)
        let p = eigen_propagator(&eigs, &q(3, 2), None).unwrap();
        assert_eq!(p.diagonal(), &[Ratio::zero(), q(1, 2)]);
        // window (0, inf): full inverse
        let p = eigen_propagator(&eigs, &Ratio::zero(), None).unwrap();
        assert_eq!(p.diagonal(), &[Ratio::one(), q(1, 2)]);
        // additivity over adjacent windows
        let p1 = eigen_propagator(&eigs, &Ratio::zero(), Some(&q(3, 2))).unwrap();
        let p2 = eigen_propagator(&eigs, &q(3, 2), None).unwrap();
        assert_eq!(p1.add(&p2).unwrap(), p);
        // nonpositive eigenvalue rejected
        assert!(eigen_propagator(&[Ratio::zero()], &Ratio::zero(), None).is_err());
    }
}
