//! Finite-dimensional BV toy theory: polynomial functionals with odd
//! antifield partners, the kinetic differential, the mode-window divergence
//! operator, and the descent of measure invariance to an eigenvalue scale.

use std::collections::BTreeMap;

use crate::algebra::{Ratio, TruncSeries};
use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::regulators::eigen_propagator;
use crate::wick::contraction::contract;
use crate::wick::laurent::{Coeff, Laurent};

/// Gaussian toy model: eigenvalues of minus the kinetic operator, all
/// positive (negative-definite kinetic term, no zero modes).
#[derive(Clone, Debug)]
pub struct GaussianModel {
    eigenvalues: Vec<Ratio>,
}

impl GaussianModel {
    pub fn new(eigenvalues: Vec<Ratio>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::Domain("model needs at least one mode".into()));
        }
        for l in &eigenvalues {
            if !l.is_positive() {
                return Err(Error::Domain(format!("eigenvalue {l} is not positive")));
            }
        }
        Ok(GaussianModel { eigenvalues })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[Ratio] {
        &self.eigenvalues
    }

    /// Diagonal propagator over an eigenvalue window as a two-tensor.
    pub fn propagator(&self, lower: &Ratio, upper: Option<&Ratio>) -> Result<QMatrix> {
        let p = eigen_propagator(&self.eigenvalues, lower, upper)?;
        let d = self.dim();
        let mut m = QMatrix::zeros(d, d);
        for (i, v) in p.diagonal().iter().enumerate() {
            m.set(i, i, v.clone());
        }
        Ok(m)
    }

    /// Mode indices with eigenvalue <= the scale.
    pub fn low_modes(&self, scale: &Ratio) -> Vec<usize> {
        (0..self.dim()).filter(|&a| &self.eigenvalues[a] <= scale).collect()
    }
}

/// Polynomial functional of the fields and their odd antifield partners:
/// even part a truncated series, odd generators tracked by bitmask.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedPoly {
    nvars: usize,
    cutoff: u32,
    parts: BTreeMap<u64, TruncSeries>,
}

impl GradedPoly {
    pub fn zero(nvars: usize, cutoff: u32) -> Self {
        GradedPoly { nvars, cutoff, parts: BTreeMap::new() }
    }

    pub fn from_even(s: TruncSeries) -> Self {
        let mut g = GradedPoly::zero(s.nvars(), s.cutoff());
        g.add_part(0, s);
        g
    }

    /// A single odd generator times an even coefficient.
    pub fn odd_term(xi: usize, coeff: TruncSeries) -> Self {
        let mut g = GradedPoly::zero(coeff.nvars(), coeff.cutoff());
        g.add_part(1 << xi, coeff);
        g
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn part(&self, mask: u64) -> Option<&TruncSeries> {
        self.parts.get(&mask)
    }

    pub fn parts(&self) -> impl Iterator<Item = (&u64, &TruncSeries)> {
        self.parts.iter()
    }

    pub fn add_part(&mut self, mask: u64, s: TruncSeries) {
        if s.is_zero() {
            return;
        }
        match self.parts.entry(mask) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(s);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().checked_add(&s).expect("shapes match");
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
        for (m, s) in &rhs.parts {
            out.add_part(*m, s.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        self.checked_add(&rhs.scale(&Ratio::from_int(-1)))
    }

    pub fn scale(&self, c: &Ratio) -> Self {
        if c.is_zero() {
            return GradedPoly::zero(self.nvars, self.cutoff);
        }
        GradedPoly {
            nvars: self.nvars,
            cutoff: self.cutoff,
            parts: self.parts.iter().map(|(m, s)| (*m, s.scalar_mul(c))).collect(),
        }
    }

    /// Graded product with the Koszul sign from reordering odd generators.
    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        let mut out = GradedPoly::zero(self.nvars, self.cutoff);
        for (ma, a) in &self.parts {
            for (mb, b) in &rhs.parts {
                if ma & mb != 0 {
                    continue;
                }
                let sign = koszul_sign(*ma, *mb);
                let prod = a.checked_mul(b)?;
                out.add_part(ma | mb, if sign < 0 { prod.scalar_mul(&Ratio::from_int(-1)) } else { prod });
            }
        }
        Ok(out)
    }

    /// Left derivative with respect to the odd generator `xi`.
    pub fn odd_derive(&self, xi: usize) -> GradedPoly {
        let bit = 1u64 << xi;
        let mut out = GradedPoly::zero(self.nvars, self.cutoff);
        for (m, s) in &self.parts {
            if m & bit == 0 {
                continue;
            }
            let below = m & (bit - 1);
            let sign = if below.count_ones() % 2 == 0 { 1 } else { -1 };
            let coeff = if sign < 0 { s.scalar_mul(&Ratio::from_int(-1)) } else { s.clone() };
            out.add_part(m & !bit, coeff);
        }
        out
    }

    pub fn even_derive(&self, var: usize) -> Result<GradedPoly> {
        let mut out = GradedPoly::zero(self.nvars, self.cutoff);
        for (m, s) in &self.parts {
            out.add_part(*m, s.derive(var)?);
        }
        Ok(out)
    }

    /// Splits into (even-parity, odd-parity) parts by antifield count.
    pub fn parity_split(&self) -> (GradedPoly, GradedPoly) {
        let mut even = GradedPoly::zero(self.nvars, self.cutoff);
        let mut odd = GradedPoly::zero(self.nvars, self.cutoff);
        for (m, s) in &self.parts {
            if m.count_ones() % 2 == 0 {
                even.add_part(*m, s.clone());
            } else {
                odd.add_part(*m, s.clone());
            }
        }
        (even, odd)
    }
}

fn koszul_sign(a: u64, b: u64) -> i32 {
    // Inversions: pairs (i in a, j in b) with i > j.
    let mut inversions = 0u32;
    let mut bits_a = a;
    while bits_a != 0 {
        let i = bits_a.trailing_zeros();
        inversions += (b & ((1u64 << i) - 1)).count_ones();
        bits_a &= bits_a - 1;
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

impl Coeff for GradedPoly {
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
        self.scale(c)
    }
}

/// The three scale operators of the toy theory on graded functionals.
pub struct BvOperators<'a> {
    model: &'a GaussianModel,
    window: Vec<usize>,
}

impl<'a> BvOperators<'a> {
    /// Operators at an eigenvalue scale; `None` means all modes.
    pub fn new(model: &'a GaussianModel, scale: Option<&Ratio>) -> Self {
        let window = match scale {
            Some(s) => model.low_modes(s),
            None => (0..model.dim()).collect(),
        };
        BvOperators { model, window }
    }

    /// Kinetic differential: Q F = sum_a lambda_a x_a (d/d xi_a) F.
    pub fn q_action(&self, f: &GradedPoly) -> Result<GradedPoly> {
        let mut out = GradedPoly::zero(f.nvars(), f.cutoff());
        for a in 0..self.model.dim() {
            let term = f.odd_derive(a);
            if term.is_zero() {
                continue;
            }
            let mut scaled = GradedPoly::zero(f.nvars(), f.cutoff());
            for (m, s) in term.parts() {
                scaled.add_part(*m, s.mul_var(a).scalar_mul(&self.model.eigenvalues()[a]));
            }
            out = out.checked_add(&scaled)?;
        }
        Ok(out)
    }

    /// Window divergence: div F = sum over window modes of d_x d_xi F.
    pub fn divergence(&self, f: &GradedPoly) -> Result<GradedPoly> {
        let mut out = GradedPoly::zero(f.nvars(), f.cutoff());
        for &a in &self.window {
            out = out.checked_add(&f.odd_derive(a).even_derive(a)?)?;
        }
        Ok(out)
    }

    /// Scale bracket: the failure of the divergence to be a derivation,
    /// {F,G} = div(FG) - div(F) G - (-1)^{|F|} F div(G) (computed per parity
    /// component of F).
    pub fn bracket(&self, f: &GradedPoly, g: &GradedPoly) -> Result<GradedPoly> {
        let (f_even, f_odd) = f.parity_split();
        let mut out = GradedPoly::zero(f.nvars(), f.cutoff());
        for (part, sign) in [(f_even, 1i64), (f_odd, -1i64)] {
            if part.is_zero() {
                continue;
            }
            let t1 = self.divergence(&part.checked_mul(g)?)?;
            let t2 = self.divergence(&part)?.checked_mul(g)?;
            let t3 = part.checked_mul(&self.divergence(g)?)?.scale(&Ratio::from_int(sign));
            out = out.checked_add(&t1.checked_sub(&t2)?.checked_sub(&t3)?)?;
        }
        Ok(out)
    }

    /// (Q + hbar div)^2 applied to a functional, as a Laurent series in the
    /// loop parameter. Zero exactly for all inputs.
    pub fn square_of_q_plus_div(&self, f: &GradedPoly, hbar_top: i32) -> Result<Laurent<GradedPoly>> {
        let apply = |x: &Laurent<GradedPoly>| -> Result<Laurent<GradedPoly>> {
            let mut out = Laurent::zero(x.top());
            for (pow, payload) in x.terms() {
                out.add_term(*pow, self.q_action(payload)?);
                out.add_term(pow + 1, self.divergence(payload)?);
            }
            Ok(out)
        };
        let once = apply(&Laurent::single(hbar_top, 0, f.clone()))?;
        apply(&once)
    }
}

/// Wick-reduces the high modes: applies e^{hbar d_P(scale, infinity)} and
/// restricts to the low-mode subspace. Polynomials in the even variables.
pub fn reduce_high_modes(
    model: &GaussianModel,
    scale: &Ratio,
    f: &TruncSeries,
) -> Result<Laurent<TruncSeries>> {
    let p = model.propagator(scale, None)?;
    let low = model.low_modes(scale);
    let restrict = |s: &TruncSeries| -> TruncSeries {
        let mut out = TruncSeries::zero(s.nvars(), s.cutoff());
        for (idx, c) in s.terms() {
            let high_free = (0..s.nvars())
                .all(|v| low.contains(&v) || idx.exponent(v) == 0);
            if high_free {
                out.add_term(idx.clone(), c.clone());
            }
        }
        out
    };

    let top = (f.cutoff() / 2 + 1) as i32;
    let mut out = Laurent::zero(top);
    out.add_term(0, restrict(f));
    let mut term = f.clone();
    for k in 1..=(f.cutoff() / 2 + 1) as i64 {
        term = contract(&p, &term)?.scalar_mul(&Ratio::new(1, k).unwrap());
        if term.is_zero() {
            break;
        }
        out.add_term(k as i32, restrict(&term));
    }
    Ok(out)
}

/// Polynomial vector field on the model: one even series per component.
#[derive(Clone, Debug)]
pub struct PolyVectorField {
    pub components: Vec<TruncSeries>,
}

/// Outcome of the scale-descent identity check.
#[derive(Clone, Debug)]
pub enum DescentOutcome {
    /// Residual of (integrated-out LHS) - (scale-restricted RHS); empty of
    /// terms when the identity holds.
    Residual(Laurent<TruncSeries>),
    /// No eigenvalue split at this scale; the check is vacuous.
    Degenerate,
}

impl DescentOutcome {
    pub fn is_zero(&self) -> bool {
        match self {
            DescentOutcome::Residual(r) => r.is_zero(),
            DescentOutcome::Degenerate => true,
        }
    }
}

/// Both sides of the invariance-descent identity: integrating the Lie
/// derivative of the Gaussian measure over the high modes must equal the
/// Lie derivative of the low-mode measure along the reduced vector field
/// V[scale] = e^{hbar d_P(scale, infinity)} V restricted to low modes.
pub fn scale_descent_check(
    model: &GaussianModel,
    v: &PolyVectorField,
    scale: &Ratio,
) -> Result<DescentOutcome> {
    let d = model.dim();
    if v.components.len() != d {
        return Err(Error::DimensionMismatch("vector field components vs model dimension".into()));
    }
    let low = model.low_modes(scale);
    if low.len() == d || low.is_empty() {
        return Ok(DescentOutcome::Degenerate);
    }
    let nvars = v.components[0].nvars();
    if nvars != d {
        return Err(Error::DimensionMismatch("vector field variables vs model dimension".into()));
    }
    let cutoff = v.components[0].cutoff();

    // LHS density over dmu_{Q,scale}: reduce( L_V (x,Qx)/2 ) / hbar
    // + reduce( div V ), with (x,Qx)/2 = -(1/2) sum lambda_a x_a^2.
    let mut q_of_v = TruncSeries::zero(nvars, cutoff);
    let mut div_v = TruncSeries::zero(nvars, cutoff);
    for a in 0..d {
        let xa_va = v.components[a].mul_var(a);
        q_of_v = q_of_v.checked_sub(&xa_va.scalar_mul(&model.eigenvalues()[a]))?;
        div_v = div_v.checked_add(&v.components[a].derive(a)?)?;
    }
    let lhs = reduce_high_modes(model, scale, &q_of_v)?
        .shift(-1)
        .checked_add(&reduce_high_modes(model, scale, &div_v)?)?;

    // RHS: Q_low(V[scale])/hbar + div_low(V[scale]).
    let mut rhs = Laurent::zero(lhs.top());
    for &a in &low {
        let reduced = reduce_high_modes(model, scale, &v.components[a])?;
        for (pow, payload) in reduced.terms() {
            rhs.add_term(
                pow - 1,
                payload.mul_var(a).scalar_mul(&-(model.eigenvalues()[a].clone())),
            );
            rhs.add_term(*pow, payload.derive(a)?);
        }
    }
    Ok(DescentOutcome::Residual(lhs.checked_sub(&rhs)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::MultiIndex;

    fn q(n: i64, d: i64) -> Ratio {
        Ratio::new(n, d).unwrap()
    }

    #[test]
    fn divergence_of_euler_field_counts_dimension() {
        let model = GaussianModel::new(vec![Ratio::one(), q(3, 2), Ratio::from_int(2)]).unwrap();
        let ops = BvOperators::new(&model, None);
        // Euler field as a functional: sum_a x_a xi_a.
        let d = model.dim();
        let mut f = GradedPoly::zero(d, 4);
        for a in 0..d {
            f = f
                .checked_add(&GradedPoly::odd_term(a, TruncSeries::variable(d, 4, a).unwrap()))
                .unwrap();
        }
        let div = ops.divergence(&f).unwrap();
        let want = GradedPoly::from_even(TruncSeries::constant(d, 4, Ratio::from_int(d as i64)));
        assert_eq!(div, want);
    }

    #[test]
    fn q_kills_purely_even_functionals() {
        // The kinetic form has no antifields: Q S_kin = 0.
        let model = GaussianModel::new(vec![Ratio::one(), Ratio::from_int(2)]).unwrap();
        let ops = BvOperators::new(&model, None);
        let mut kin = TruncSeries::zero(2, 4);
        for a in 0..2 {
            let idx = MultiIndex::zero(2).increment(a).increment(a);
            kin.add_term(idx, q(-1, 2) * model.eigenvalues()[a].clone());
        }
        let f = GradedPoly::from_even(kin);
        assert!(ops.q_action(&f).unwrap().is_zero());
    }

    #[test]
    fn kinetic_form_brackets_to_zero_with_itself() {
        // S_kin is purely even, so {S_kin, S_kin} = 0 at every scale.
        let model = GaussianModel::new(vec![Ratio::one(), Ratio::from_int(2)]).unwrap();
        let mut kin = TruncSeries::zero(2, 4);
        for a in 0..2 {
            let idx = MultiIndex::zero(2).increment(a).increment(a);
            kin.add_term(idx, q(-1, 2) * model.eigenvalues()[a].clone());
        }
        let f = GradedPoly::from_even(kin);
        for scale in [None, Some(q(3, 2))] {
            let ops = BvOperators::new(&model, scale.as_ref());
            assert!(ops.bracket(&f, &f).unwrap().is_zero());
        }
    }

    #[test]
    fn bracket_pairs_antifield_with_field() {
        // {xi_1, x_1} = 1 when mode 1 is inside the window, 0 otherwise.
        let model = GaussianModel::new(vec![Ratio::one(), Ratio::from_int(2)]).unwrap();
        let xi = GradedPoly::odd_term(0, TruncSeries::one(2, 4));
        let x = GradedPoly::from_even(TruncSeries::variable(2, 4, 0).unwrap());
        let full = BvOperators::new(&model, None);
        let got = full.bracket(&xi, &x).unwrap();
        assert_eq!(got, GradedPoly::from_even(TruncSeries::one(2, 4)));
        // Window excluding every mode: the bracket vanishes.
        let empty = BvOperators::new(&model, Some(&q(1, 2)));
        assert!(empty.bracket(&xi, &x).unwrap().is_zero());
    }

    #[test]
    fn q_plus_div_squares_to_zero_on_spanning_set() {
        let model = GaussianModel::new(vec![Ratio::one(), q(3, 2), q(5, 2)]).unwrap();
        for scale in [None, Some(q(2, 1))] {
            let ops = BvOperators::new(&model, scale.as_ref());
            // Spanning set: x^alpha xi_S with |alpha| + |S| <= 4.
            let d = 3usize;
            for mask in 0u64..(1 << d) {
                let odd_count = mask.count_ones();
                for alpha in crate::wick::test_support::monomials(d, 4 - odd_count.min(4)) {
                    let f = GradedPoly {
                        nvars: d,
                        cutoff: 4,
                        parts: [(mask, TruncSeries::monomial(d, 4, alpha.clone(), Ratio::one()).unwrap())]
                            .into_iter()
                            .collect(),
                    };
                    let sq = ops.square_of_q_plus_div(&f, 3).unwrap();
                    assert!(sq.is_zero(), "mask {mask:#b}, monomial {alpha:?}");
                }
            }
        }
    }

    #[test]
    fn descent_example_from_single_contraction() {
        // d=2, eigenvalues (1,2), scale 3/2, V = x_2^2 d_1:
        // V[scale] = (hbar/2) d_1 and the residual vanishes.
        let model = GaussianModel::new(vec![Ratio::one(), Ratio::from_int(2)]).unwrap();
        let x2_sq = {
            let x2 = TruncSeries::variable(2, 4, 1).unwrap();
            x2.checked_mul(&x2).unwrap()
        };
        let v = PolyVectorField {
            components: vec![x2_sq.clone(), TruncSeries::zero(2, 4)],
        };
        let scale = q(3, 2);
        let reduced = reduce_high_modes(&model, &scale, &x2_sq).unwrap();
        assert_eq!(reduced.coeff(0), None); // restriction kills x_2^2
        assert_eq!(
            reduced.coeff(1).unwrap(),
            &TruncSeries::constant(2, 4, q(1, 2))
        );
        let out = scale_descent_check(&model, &v, &scale).unwrap();
        assert!(out.is_zero());
    }

    #[test]
    fn descent_low_mode_field_is_trivial() {
        let model = GaussianModel::new(vec![Ratio::one(), Ratio::from_int(3)]).unwrap();
        let x1 = TruncSeries::variable(2, 4, 0).unwrap();
        let v = PolyVectorField {
            components: vec![x1.checked_mul(&x1).unwrap(), TruncSeries::zero(2, 4)],
        };
        let out = scale_descent_check(&model, &v, &Ratio::from_int(2)).unwrap();
        assert!(out.is_zero());
    }

    #[test]
    fn descent_linear_high_mode_field() {
        // V linear in high modes: odd Gaussian moments kill corrections.
        let model = GaussianModel::new(vec![Ratio::one(), Ratio::from_int(3)]).unwrap();
        let x2 = TruncSeries::variable(2, 4, 1).unwrap();
        let v = PolyVectorField { components: vec![x2.clone(), x2.clone()] };
        let out = scale_descent_check(&model, &v, &Ratio::from_int(2)).unwrap();
        assert!(out.is_zero());
    }

    #[test]
    fn no_split_is_degenerate() {
        let model = GaussianModel::new(vec![Ratio::one(), Ratio::from_int(2)]).unwrap();
        let v = PolyVectorField {
            components: vec![TruncSeries::zero(2, 4), TruncSeries::zero(2, 4)],
        };
        let out = scale_descent_check(&model, &v, &Ratio::from_int(5)).unwrap();
        assert!(matches!(out, DescentOutcome::Degenerate));
    }
}
