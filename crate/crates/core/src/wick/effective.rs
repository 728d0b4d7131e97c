//! Effective interactions by Wick contraction: exponentiate, contract, take
//! the connected logarithm.
//!
//! Truncation semantics: the degree cutoff of an `Interaction` is a budget
//! for the combined filtration `degree + 2 * loop order`. Contraction with
//! the loop-weighted propagator preserves that filtration exactly, so the
//! flow restricted to the window is an exact semigroup: applying P then P'
//! equals applying P + P', and -P inverts P, with no truncation leakage.
//! A coefficient at loop order h is therefore kept through degree
//! `cutoff - 2h`. Intermediates are computed in a larger ring (three times
//! the window is enough for a sum of vertices to re-enter it).

use crate::algebra::{HbarSeries, Ratio, TruncSeries};
use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::wick::contraction::contract;
use crate::wick::laurent::Laurent;

/// Interaction: a loop-graded polynomial functional, at least cubic modulo
/// the loop parameter when fed to the connected-diagram machinery.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Interaction {
    pub series: HbarSeries,
}

impl Interaction {
    pub fn new(series: HbarSeries) -> Self {
        Interaction { series }
    }

    pub fn nvars(&self) -> usize {
        self.series.nvars()
    }

    pub fn cutoff(&self) -> u32 {
        self.series.cutoff()
    }

    pub fn hbar_cutoff(&self) -> usize {
        self.series.hbar_cutoff()
    }

    pub fn is_zero(&self) -> bool {
        self.series.is_zero()
    }

    /// Convergence preconditions for the connected logarithm: loop-zero part
    /// at least cubic, loop-one part without constant term. Every term of
    /// I/hbar is then strictly positive in the combined filtration.
    fn check_cubic(&self) -> Result<()> {
        if self.series.coeff(0).min_degree().map_or(false, |d| d < 3) {
            return Err(Error::Domain(
                "interaction must be at least cubic modulo the loop parameter".into(),
            ));
        }
        if self.hbar_cutoff() >= 1 && !self.series.coeff(1).constant_term().is_zero() {
            return Err(Error::Domain(
                "loop-one part of the interaction must have no constant term".into(),
            ));
        }
        Ok(())
    }

    /// Terms outside the combined filtration window cannot be tracked
    /// exactly through the flow; reject them up front.
    fn check_window(&self) -> Result<()> {
        let w = self.cutoff();
        for h in 0..=self.hbar_cutoff() {
            if let Some(d) = self.series.coeff(h).max_degree() {
                if d + 2 * h as u32 > w {
                    return Err(Error::Domain(format!(
                        "interaction term at loop order {h}, degree {d} exceeds the \
                         filtration window {w}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Drops every term whose combined filtration degree + 2 * loop power
/// exceeds the window. Multiplication and loop-weighted contraction both
/// respect this filtration, so trimming intermediates loses nothing inside
/// the window and keeps the connected-diagram cancellations exact.
fn wtrim(l: &Laurent<TruncSeries>, window: u32) -> Laurent<TruncSeries> {
    let mut out = Laurent::zero(l.top());
    for (pow, payload) in l.terms() {
        let budget = window as i64 - 2 * *pow as i64;
        if budget < 0 {
            continue;
        }
        let trimmed = payload.truncated(budget.min(payload.cutoff() as i64) as u32);
        out.add_term(*pow, trimmed.resized(payload.cutoff()));
    }
    out
}

/// Applies e^{hbar d_P}; each step raises the loop power and drops the
/// degree by two, preserving the combined filtration.
fn exp_hbar_contraction(
    p: &QMatrix,
    w: &Laurent<TruncSeries>,
    work_cutoff: u32,
) -> Result<Laurent<TruncSeries>> {
    let mut out = w.clone();
    let mut term = w.clone();
    let max_steps = (work_cutoff / 2 + 2) as usize + w.top().unsigned_abs() as usize;
    for k in 1..=max_steps {
        let mut next = Laurent::zero(term.top());
        for (pow, payload) in term.terms() {
            next.add_term(pow + 1, contract(p, payload)?);
        }
        if next.is_zero() {
            break;
        }
        term = next.scalar_mul(&Ratio::new(1, k as i64).unwrap());
        out = out.checked_add(&term)?;
    }
    Ok(out)
}

/// The scale-change flow: I' = hbar log( e^{hbar d_P} e^{I/hbar} ), the sum
/// of connected contraction diagrams, exact on the filtration window.
pub fn effective_interaction(i: &Interaction, p: &QMatrix) -> Result<Interaction> {
    i.check_cubic()?;
    i.check_window()?;
    let nvars = i.nvars();
    if p.rows() != nvars || p.cols() != nvars {
        return Err(Error::DimensionMismatch("propagator size vs interaction variables".into()));
    }
    let window = i.cutoff();
    let hbar_top = i.hbar_cutoff() as i32;
    // With the filtration trim, a term at loop power -m carries degree at
    // most window + 2m, and m is at most the window.
    let work_cutoff = 3 * window;
    let one = TruncSeries::one(nvars, work_cutoff);
    let max_steps = (window + 2) as usize;

    // x = I/hbar at working precision; every term has positive filtration
    // weight, so powers of x terminate within the window.
    let mut x = Laurent::zero(hbar_top);
    for h in 0..=i.hbar_cutoff() {
        x.add_term(h as i32 - 1, i.series.coeff(h).resized(work_cutoff));
    }

    // exp with filtration trim after every product.
    let mut w = Laurent::single(hbar_top, 0, one.clone());
    let mut power = Laurent::single(hbar_top, 0, one.clone());
    for m in 1..=max_steps {
        power = wtrim(&power.checked_mul(&x)?, window);
        if power.is_zero() {
            break;
        }
        power = power.scalar_mul(&Ratio::new(1, m as i64).unwrap());
        w = w.checked_add(&power)?;
    }

    let w_prime = exp_hbar_contraction(p, &w, work_cutoff)?;
    let deviation = w_prime.checked_sub(&Laurent::single(hbar_top, 0, one))?;
    if let Some(c0) = deviation.coeff(0) {
        if !c0.constant_term().is_zero() {
            return Err(Error::Domain(
                "connected log does not converge degree-wise (scalar loop-zero part)".into(),
            ));
        }
    }

    // log(1 + u) with the same trim.
    let mut log = Laurent::zero(hbar_top);
    let mut upow = deviation.clone();
    for m in 1..=max_steps {
        if upow.is_zero() {
            break;
        }
        let sign = Ratio::new(if m % 2 == 1 { 1 } else { -1 }, m as i64).unwrap();
        log = log.checked_add(&upow.scalar_mul(&sign))?;
        upow = wtrim(&upow.checked_mul(&deviation)?, window);
    }
    let log = log.shift(1);

    // Project back onto the window: loop order h keeps degree <= window - 2h.
    let mut series = HbarSeries::zero(nvars, window, i.hbar_cutoff());
    for (pow, payload) in log.terms() {
        if *pow < 0 {
            if !payload.is_zero() {
                return Err(Error::Domain("connected sum below loop order zero".into()));
            }
            continue;
        }
        let h = *pow as usize;
        if h > i.hbar_cutoff() {
            continue;
        }
        let keep = window.saturating_sub(2 * h as u32);
        series.set_coeff(h, payload.truncated(keep).resized(window));
    }
    Ok(Interaction::new(series))
}
