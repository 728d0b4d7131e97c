//! The one-loop pipeline for the O(N) model: classical master equation
//! residuals, the wheel, vector, and metric counterterms with their
//! consistency identities, the one-loop log coefficient of the two-point
//! function, and the comparison against the Ricci tensor.

use std::collections::BTreeMap;

use crate::algebra::{norm_squared, Ratio, TruncSeries};
use crate::error::{Error, Result};
use crate::geometry::{
    curvature, lie_derivative_metric, proportionality_ratio, rotation_fields, sigma_series,
    sphere_graph_metric, trace_second_derivatives, Chart, MetricJet, TensorJet, TensorKind,
    VectorFieldJet,
};
use crate::lie::{build_so, cocycle_residual, cocycle_space, CocycleConstraints, JetRealization};
use crate::linalg::QMatrix;
use crate::regulators::DivergentValue;

/// Translation-invariant local vertex density.
#[derive(Clone, Debug)]
pub enum LocalVertexDensity {
    /// Two contracted derivative legs, symmetric coefficient tensor.
    MetricType(TensorJet),
    /// Pure potential density.
    FunctionType(TruncSeries),
    /// Linear in one antifield; vector coefficient.
    VectorType(VectorFieldJet),
}

/// The three one-loop counterterms with their divergence channels.
#[derive(Clone, Debug, Default)]
pub struct CounterTermSet {
    pub fun: Option<(DivergentValue, TruncSeries)>,
    pub vec: Option<(DivergentValue, VectorFieldJet)>,
    pub met: Option<(DivergentValue, TensorJet)>,
}

/// Residuals of the three classical-master-equation components.
#[derive(Clone, Debug)]
pub struct CmeResiduals {
    /// Lie derivative of the metric along every symmetry generator,
    /// truncated to cutoff - 1; all zero iff the metric is invariant.
    pub metric_invariance: Vec<TensorJet>,
    /// Jet-commutator minus structure-constant combination per pair.
    pub homomorphism: Vec<VectorFieldJet>,
    /// Jacobi residual of the structure constants.
    pub jacobi: Vec<Ratio>,
}

impl CmeResiduals {
    pub fn all_zero(&self) -> bool {
        self.metric_invariance.iter().all(|t| t.is_zero())
            && self.homomorphism.iter().all(|v| v.is_zero())
            && self.jacobi.iter().all(|r| r.is_zero())
    }
}

/// The three (CME) residuals for a metric and the so(N) symmetry fields.
pub fn classical_master_residual_with(
    metric: &MetricJet,
    n_sphere: usize,
    cutoff: u32,
) -> Result<CmeResiduals> {
    let (algebra, _) = build_so(n_sphere)?;
    let rf = rotation_fields(n_sphere, cutoff)?;
    let keep = cutoff.saturating_sub(1);

    let metric_invariance = rf
        .fields
        .iter()
        .map(|z| Ok(lie_derivative_metric(z, metric.tensor())?.truncated(keep)))
        .collect::<Result<Vec<_>>>()?;

    let mut homomorphism = Vec::new();
    for a in 0..algebra.dim() {
        for b in (a + 1)..algebra.dim() {
            let mut r = crate::geometry::commutator(&rf.fields[a], &rf.fields[b])?;
            for (c, t) in algebra.bracket(a, b) {
                r = r.checked_sub(&rf.fields[c].scalar_mul(&t))?;
            }
            let comps: Vec<TruncSeries> = (0..r.nvars())
                .map(|i| r.component(i).truncated(keep).resized(cutoff))
                .collect();
            homomorphism.push(VectorFieldJet::from_components(comps)?);
        }
    }

    Ok(CmeResiduals {
        metric_invariance,
        homomorphism,
        jacobi: algebra.jacobi_residual(),
    })
}

/// The (CME) residuals for the round sphere at the given cutoff.
pub fn classical_master_residual(n_sphere: usize, cutoff: u32) -> Result<CmeResiduals> {
    let metric = sphere_graph_metric(n_sphere, cutoff)?;
    classical_master_residual_with(&metric, n_sphere, cutoff)
}

/// The interaction with derivative legs amputated:
/// F = -|pi|^2 / (1 - |pi|^2), truncated. The squared denominator is forced
/// by the closed form of the wheel sum (see `wheel_counterterm`).
pub fn amputated_potential(n_sphere: usize, cutoff: u32) -> Result<TruncSeries> {
    if n_sphere < 2 {
        return Err(Error::Domain("need N >= 2".into()));
    }
    if cutoff < 2 || cutoff % 2 != 0 {
        return Err(Error::Domain("cutoff must be even and >= 2".into()));
    }
    let n = n_sphere - 1;
    let r2 = norm_squared(n, cutoff);
    let denom = TruncSeries::one(n, cutoff).checked_sub(&r2)?.inverse()?;
    r2.scalar_mul(&Ratio::from_int(-1)).checked_mul(&denom)
}

/// Result of the wheel-sum counterterm extraction.
#[derive(Clone, Debug)]
pub struct WheelCounterterm {
    /// Wheel sum: sum over n of F^n / (2n); equals log sigma.
    pub wheel_sum: TruncSeries,
    /// Counterterm density: the series paired with its divergence channel
    /// (coefficient -1 on 1/(4 pi eps), multiplying the wheel sum).
    pub counterterm: (DivergentValue, TruncSeries),
    /// Invariance residual sigma d_i(log sigma) - d_i sigma, per component.
    pub residual: Vec<TruncSeries>,
}

/// Sums the one-loop wheels of the amputated interaction and checks the
/// measure-invariance identity for the nonlinear symmetry directions.
pub fn wheel_counterterm(f: &TruncSeries) -> Result<WheelCounterterm> {
    if !f.constant_term().is_zero() {
        return Err(Error::Domain("amputated interaction must vanish at the origin".into()));
    }
    let nvars = f.nvars();
    let cutoff = f.cutoff();

    // sum_n F^n/(2n); terminates since F has positive minimal degree.
    let mut wheel_sum = TruncSeries::zero(nvars, cutoff);
    let mut power = TruncSeries::one(nvars, cutoff);
    for n in 1..=(cutoff as i64) {
        power = power.checked_mul(f)?;
        if power.is_zero() {
            break;
        }
        wheel_sum = wheel_sum.checked_add(&power.scalar_mul(&Ratio::new(1, 2 * n).unwrap()))?;
    }

    // sigma = exp(wheel sum); the identity checks the regulated rotation of
    // the counterterm against the divergence of the symmetry field.
    let sigma = wheel_sum.exp()?;
    let mut residual = Vec::with_capacity(nvars);
    for i in 0..nvars {
        let lhs = sigma.checked_mul(&wheel_sum.derive(i)?)?;
        residual.push(lhs.checked_sub(&sigma.derive(i)?)?);
    }

    Ok(WheelCounterterm {
        wheel_sum: wheel_sum.clone(),
        counterterm: (DivergentValue::inv_eps_channel(Ratio::from_int(-1)), wheel_sum),
        residual,
    })
}

/// Result of the vector-counterterm cocycle computation.
#[derive(Clone, Debug)]
pub struct VectorCounterterm {
    /// Dimension of the constrained cocycle space (1 for spheres).
    pub dim: usize,
    /// Scalar coefficient C with c(Z_Ni) = C Z_Ni, normalized to C(0) = 1;
    /// equals 1/sigma^2 for the round sphere.
    pub coefficient: Option<TruncSeries>,
    /// The generator as field jets per transverse generator.
    pub generator: Vec<VectorFieldJet>,
    /// Full cocycle-condition residuals of the returned generator.
    pub residual: Vec<VectorFieldJet>,
    /// Density factor C sigma (equals 1/sigma), carried on the log channel.
    pub density: Option<(DivergentValue, TruncSeries)>,
}

/// Solves the constrained cocycle problem for so(N) on sphere jets and
/// normalizes the generator.
pub fn vector_counterterm(n_sphere: usize, cutoff: u32) -> Result<VectorCounterterm> {
    if n_sphere < 3 {
        return Err(Error::Domain("need N >= 3".into()));
    }
    let (algebra, basis) = build_so(n_sphere)?;
    let rf = rotation_fields(n_sphere, cutoff)?;
    let realization = JetRealization { algebra: &algebra, fields: &rf.fields };
    let constraints = CocycleConstraints {
        vanish_on: basis.isotropy.clone(),
        direction: basis.complement.iter().enumerate().map(|(j, &g)| (g, j)).collect(),
    };
    let solution = cocycle_space(&realization, cutoff, &constraints)?;
    if solution.dim == 0 {
        return Err(Error::Domain(
            "anomaly: constrained cocycle space is empty for the sphere".into(),
        ));
    }

    let mut generator: Vec<VectorFieldJet> = Vec::new();
    let mut coefficient = None;
    let mut residual = Vec::new();
    let mut density = None;
    if solution.dim == 1 {
        let assignment = &solution.basis[0];
        // The value on the first transverse generator is f(y) d_1 with
        // f = C sigma; rescale so C(0) = 1.
        let first = &assignment[&basis.complement[0]];
        let c0 = first.component(0).constant_term();
        if c0.is_zero() {
            return Err(Error::Domain("cocycle generator vanishes at the origin".into()));
        }
        let scale = c0.recip()?;
        let normalized: BTreeMap<usize, VectorFieldJet> =
            assignment.iter().map(|(g, v)| (*g, v.scalar_mul(&scale))).collect();

        let sigma = sigma_series(n_sphere - 1, cutoff);
        let f = normalized[&basis.complement[0]].component(0).clone();
        let c_series = f.checked_mul(&sigma.inverse()?)?;
        let dens = c_series.checked_mul(&sigma)?;
        residual = cocycle_residual(&realization, cutoff, &normalized, &basis.isotropy)?;
        generator = basis.complement.iter().map(|g| normalized[g].clone()).collect();
        coefficient = Some(c_series);
        density = Some((DivergentValue::log_channel(Ratio::one()), dens));
    }

    Ok(VectorCounterterm { dim: solution.dim, coefficient, generator, residual, density })
}

/// Identity (III): L_W g must equal -2 lambda (g + y y / sigma^4) for the
/// radial field W = -lambda y.d, and the metric counterterm candidate
/// mu g - 2 lambda y y / sigma^4 must match mu' g + L_W g after relabeling
/// mu' = mu - 2 lambda. Returns both residual tensors.
pub fn metric_counterterm_check(
    n_sphere: usize,
    cutoff: u32,
    lambda: &Ratio,
    mu: &Ratio,
) -> Result<(TensorJet, TensorJet)> {
    let n = n_sphere - 1;
    let g = sphere_graph_metric(n_sphere, cutoff)?;
    let radial = VectorFieldJet::from_components(
        (0..n)
            .map(|i| Ok(TruncSeries::variable(n, cutoff, i)?.scalar_mul(&-(lambda.clone()))))
            .collect::<Result<Vec<_>>>()?,
    )?;
    let lie = lie_derivative_metric(&radial, g.tensor())?;

    // y_i y_j / sigma^4 as a symmetric tensor.
    let sigma = sigma_series(n, cutoff);
    let sigma4_inv =
        sigma.checked_mul(&sigma)?.checked_mul(&sigma)?.checked_mul(&sigma)?.inverse()?;
    let mut yy = TensorJet::zero(n, cutoff, TensorKind::Sym2Covariant);
    for i in 0..n {
        for j in i..n {
            let prod = TruncSeries::variable(n, cutoff, i)?
                .checked_mul(&TruncSeries::variable(n, cutoff, j)?)?
                .checked_mul(&sigma4_inv)?;
            yy.set_sym2_component(i, j, prod);
        }
    }

    // Residual 1: L_W g + 2 lambda (g + yy), up to cutoff - 1.
    let two_lambda = Ratio::from_int(2) * lambda.clone();
    let want = g.tensor().checked_add(&yy)?.scalar_mul(&-(two_lambda.clone()));
    let residual1 = lie.checked_sub(&want)?.truncated(cutoff.saturating_sub(1));

    // Residual 2: the counterterm candidate mu g - 2 lambda yy equals
    // (mu + 2 lambda) g + L_W g, i.e. a multiple of the round metric plus an
    // exact term, relabeling mu.
    let candidate = g.tensor().scalar_mul(mu).checked_sub(&yy.scalar_mul(&two_lambda))?;
    let relabeled =
        g.tensor().scalar_mul(&(mu.clone() + two_lambda)).checked_add(&lie)?;
    let residual2 = candidate.checked_sub(&relabeled)?.truncated(cutoff.saturating_sub(1));
    Ok((residual1, residual2))
}

/// The one-loop log coefficient of the two-point function.
#[derive(Clone, Debug)]
pub struct LogCoefficient {
    /// B_ij = -(1/2) sum_k g_{ij,kk}(p), in units of (1/4 pi) log(L/eps).
    pub b: QMatrix,
    /// sum_k g_{ij,kk}(p).
    pub trace_tensor: QMatrix,
    /// Ricci tensor at the base point.
    pub ricci: QMatrix,
    /// Scalar c with B = c Ric (in 1/(4 pi) units), when proportional.
    pub ratio_to_ricci: Option<Ratio>,
    /// Measured ratio of the trace tensor to Ricci (sign recorded).
    pub trace_ricci_ratio: Option<Ratio>,
}

/// Computes the log-divergence coefficient tensor of the one-loop two-point
/// diagram from a normal-chart metric.
pub fn one_loop_log_coefficient(metric: &MetricJet) -> Result<LogCoefficient> {
    if metric.chart() != Chart::Normal {
        return Err(Error::Precondition("one-loop log coefficient needs a normal chart".into()));
    }
    let (trace_tensor, trace_ratio) = trace_second_derivatives(metric)?;
    let b = trace_tensor.scalar_mul(&Ratio::new(-1, 2).unwrap());
    let ricci = curvature(metric)?.ricci;
    let ratio = proportionality_ratio(&b, &ricci);
    Ok(LogCoefficient {
        b,
        trace_tensor,
        ricci,
        ratio_to_ricci: ratio,
        trace_ricci_ratio: trace_ratio,
    })
}

/// Verdict of the beta/Ricci comparison.
#[derive(Clone, Debug)]
pub struct BetaReport {
    pub log_coefficient: LogCoefficient,
    /// True when B is an exact scalar multiple of Ric with |scalar| = 1/3 in
    /// (1/4 pi) units (1/(12 pi) absolute), or both vanish.
    pub proportional: bool,
    /// The implemented sign of the scalar (reported, not asserted).
    pub sign: Option<i32>,
    /// |c| in absolute units as a float, for report rendering.
    pub magnitude: Option<f64>,
}

pub fn beta_report(metric: &MetricJet) -> Result<BetaReport> {
    let log_coefficient = one_loop_log_coefficient(metric)?;
    let want = Ratio::new(1, 3).unwrap();
    let (proportional, sign, magnitude) =
        if log_coefficient.b.is_zero() && log_coefficient.ricci.is_zero() {
            (true, None, None)
        } else {
            match &log_coefficient.ratio_to_ricci {
                Some(c) => (
                    c.abs() == want,
                    Some(if c.is_negative() { -1 } else { 1 }),
                    Some(c.abs().to_f64() / (4.0 * std::f64::consts::PI)),
                ),
                None => (false, None, None),
            }
        };
    Ok(BetaReport { log_coefficient, proportional, sign, magnitude })
}

/// Deformation dimension from explicit fiber data:
/// dim(invariant symmetric tensors) - rank(map restricted to invariant
/// vectors).
pub fn deformation_dimension_from_data(
    isotropy_sym2: &[QMatrix],
    isotropy_vec: &[QMatrix],
    fiber_map: &QMatrix,
) -> usize {
    let sym_dim = fiber_map.rows();
    let vec_dim = fiber_map.cols();

    // Invariant subspaces as nullspaces of the stacked actions.
    let stack = |mats: &[QMatrix], dim: usize| -> Vec<Vec<Ratio>> {
        let mut rows = crate::linalg::SparseMat::new(dim);
        for m in mats {
            for i in 0..m.rows() {
                let entries: Vec<(usize, Ratio)> = (0..m.cols())
                    .filter(|&j| !m.get(i, j).is_zero())
                    .map(|j| (j, m.get(i, j).clone()))
                    .collect();
                rows.push_row(&entries);
            }
        }
        rows.nullspace()
    };
    let inv_sym = stack(isotropy_sym2, sym_dim);
    let inv_vec = stack(isotropy_vec, vec_dim);

    // Rank of the fiber map restricted to invariant vectors.
    let mut image = crate::linalg::SparseMat::new(sym_dim);
    for v in &inv_vec {
        let mut col = vec![Ratio::zero(); sym_dim];
        for (i, c) in col.iter_mut().enumerate() {
            for j in 0..vec_dim {
                let m = fiber_map.get(i, j);
                if !m.is_zero() && !v[j].is_zero() {
                    *c += m * &v[j];
                }
            }
        }
        let entries: Vec<(usize, Ratio)> =
            col.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
        image.push_row(&entries);
    }
    inv_sym.len() - image.rank()
}

/// Deformation dimension for the sphere: isotropy-invariant symmetric
/// two-tensors at the base point modulo Lie derivatives of the round metric
/// along invariant fields.
pub fn deformation_dimension(n_sphere: usize) -> Result<usize> {
    if n_sphere < 3 {
        return Err(Error::Domain("need N >= 3".into()));
    }
    let n = n_sphere - 1;
    let vec_actions = crate::lie::isotropy_vector_action(n_sphere)?;
    let sym_actions: Vec<QMatrix> =
        vec_actions.iter().map(crate::lie::sym2_action_from_vector).collect();

    // The fiber map sends a vector at the base point to the Lie derivative
    // of the round metric along its invariant jet extension, evaluated at
    // the base point. Obstructed extensions leave a zero column; only
    // invariant vectors enter the final rank anyway.
    let cutoff = 4u32;
    let rf = rotation_fields(n_sphere, cutoff)?;
    let isotropy_fields: Vec<VectorFieldJet> =
        rf.isotropy.iter().map(|&i| rf.fields[i].clone()).collect();
    let transverse_fields: Vec<VectorFieldJet> =
        rf.complement.iter().map(|&i| rf.fields[i].clone()).collect();
    let metric = sphere_graph_metric(n_sphere, cutoff)?;

    let sym_dim = n * (n + 1) / 2;
    let mut fiber_map = QMatrix::zeros(sym_dim, n);
    for j in 0..n {
        let mut unit = vec![Ratio::zero(); n];
        unit[j] = Ratio::one();
        let fiber = crate::lie::FiberValue::Vector(unit);
        if let Ok(crate::lie::ExtensionResult::Invariant(jet)) = crate::lie::invariant_jet_extension(
            &fiber,
            &isotropy_fields,
            &transverse_fields,
            cutoff,
        ) {
            let field = VectorFieldJet::from_components(
                (0..n).map(|i| jet.components()[i].clone()).collect(),
            )?;
            let lg = lie_derivative_metric(&field, metric.tensor())?;
            let mut slot = 0;
            for a in 0..n {
                for b in a..n {
                    fiber_map.set(slot, j, lg.sym2_component(a, b).constant_term());
                    slot += 1;
                }
            }
        }
    }
    Ok(deformation_dimension_from_data(&sym_actions, &vec_actions, &fiber_map))
}

/// The full identity-(I) pipeline result for the O(N) model.
pub struct IdentityOne {
    pub wheel: WheelCounterterm,
    /// Coefficient-wise difference between the wheel sum and log sigma.
    pub log_sigma_mismatch: TruncSeries,
}

pub fn identity_one(n_sphere: usize, cutoff: u32) -> Result<IdentityOne> {
    let f = amputated_potential(n_sphere, cutoff)?;
    let wheel = wheel_counterterm(&f)?;
    let sigma = sigma_series(n_sphere - 1, cutoff);
    let log_sigma = sigma.checked_sub(&TruncSeries::one(n_sphere - 1, cutoff))?.log1p()?;
    let log_sigma_mismatch = wheel.wheel_sum.checked_sub(&log_sigma)?;
    Ok(IdentityOne { wheel, log_sigma_mismatch })
}

/// Assembles the full one-loop counterterm set for the O(N) model with the
/// canonical normalization (lambda = 1, mu = 0).
pub fn counterterm_set(n_sphere: usize, cutoff: u32) -> Result<CounterTermSet> {
    let id1 = identity_one(n_sphere, cutoff)?;
    let vec_ct = vector_counterterm(n_sphere, cutoff)?;
    let lambda = Ratio::one();
    let mu = Ratio::zero();
    let _ = metric_counterterm_check(n_sphere, cutoff, &lambda, &mu)?;

    // Metric entry: mu g - 2 lambda y y / sigma^4.
    let n = n_sphere - 1;
    let sigma = sigma_series(n, cutoff);
    let sigma4_inv =
        sigma.checked_mul(&sigma)?.checked_mul(&sigma)?.checked_mul(&sigma)?.inverse()?;
    let g = sphere_graph_metric(n_sphere, cutoff)?;
    let mut met = TensorJet::zero(n, cutoff, TensorKind::Sym2Covariant);
    for i in 0..n {
        for j in i..n {
            let yy = TruncSeries::variable(n, cutoff, i)?
                .checked_mul(&TruncSeries::variable(n, cutoff, j)?)?
                .checked_mul(&sigma4_inv)?;
            let entry = g
                .component(i, j)
                .scalar_mul(&mu)
                .checked_sub(&yy.scalar_mul(&(Ratio::from_int(2) * lambda.clone())))?;
            met.set_sym2_component(i, j, entry);
        }
    }
    let vec_channel = vec_ct.density.as_ref().map(|(ch, _)| ch.clone());
    Ok(CounterTermSet {
        fun: Some(id1.wheel.counterterm),
        vec: vec_ct
            .generator
            .first()
            .cloned()
            .map(|field| (vec_channel.unwrap_or_else(|| DivergentValue::log_channel(Ratio::one())), field)),
        met: Some((DivergentValue::log_channel(Ratio::one()), met)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::MultiIndex;

    fn q(n: i64, d: i64) -> Ratio {
        Ratio::new(n, d).unwrap()
    }

    #[test]
    fn cme_residuals_vanish_for_spheres() {
        let r = classical_master_residual(3, 6).unwrap();
        assert!(r.all_zero());
        // N = 2: abelian circle.
        let r = classical_master_residual(2, 4).unwrap();
        assert!(r.homomorphism.iter().all(|v| v.is_zero()));
        assert!(r.jacobi.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn cme_detects_broken_invariance() {
        // Perturb the metric by y_1^2 dy_1 dy_1.
        let cutoff = 4;
        let g = sphere_graph_metric(3, cutoff).unwrap();
        let mut t = g.tensor().clone();
        let y1 = TruncSeries::variable(2, cutoff, 0).unwrap();
        let bump = y1.checked_mul(&y1).unwrap();
        t.set_sym2_component(0, 0, t.sym2_component(0, 0).checked_add(&bump).unwrap());
        let perturbed = MetricJet::new(t, Chart::Graph).unwrap();
        let r = classical_master_residual_with(&perturbed, 3, cutoff).unwrap();
        assert!(r.metric_invariance.iter().any(|t| !t.is_zero()));
        assert!(r.homomorphism.iter().all(|v| v.is_zero()));
    }

    #[test]
    fn amputated_potential_shapes() {
        // cutoff 2: F = -|pi|^2.
        let f = amputated_potential(3, 2).unwrap();
        assert_eq!(f, norm_squared(2, 2).scalar_mul(&Ratio::from_int(-1)));
        // (1 - F)^{-1} = 1 - |pi|^2.
        let cutoff = 6;
        let f = amputated_potential(3, cutoff).unwrap();
        let one = TruncSeries::one(2, cutoff);
        let lhs = one.checked_sub(&f).unwrap().inverse().unwrap();
        let want = one.checked_sub(&norm_squared(2, cutoff)).unwrap();
        assert_eq!(lhs, want);
        // N = 2 specialization is univariate.
        let f = amputated_potential(2, 4).unwrap();
        assert_eq!(f.nvars(), 1);
    }

    #[test]
    fn wheel_sum_equals_log_sigma() {
        // N=3, cutoff 4: sum F^n/(2n) = -|pi|^2/2 - |pi|^4/4 = log sigma.
        let out = identity_one(3, 4).unwrap();
        let r2 = norm_squared(2, 4);
        let mut want = r2.scalar_mul(&q(-1, 2));
        want = want.checked_add(&r2.checked_mul(&r2).unwrap().scalar_mul(&q(-1, 4))).unwrap();
        assert_eq!(out.wheel.wheel_sum, want);
        assert!(out.log_sigma_mismatch.is_zero());
        assert!(out.wheel.residual.iter().all(|r| r.is_zero()));
        assert_eq!(out.wheel.counterterm.0.inv_eps, Ratio::from_int(-1));
    }

    #[test]
    fn wheel_flat_target_is_trivial() {
        let f = TruncSeries::zero(2, 4);
        let out = wheel_counterterm(&f).unwrap();
        assert!(out.wheel_sum.is_zero());
        assert!(out.residual.iter().all(|r| r.is_zero()));
    }

    #[test]
    fn vector_counterterm_generator_is_inverse_sigma_squared() {
        for n_sphere in [3usize, 4] {
            let cutoff = 4;
            let out = vector_counterterm(n_sphere, cutoff).unwrap();
            assert_eq!(out.dim, 1, "N={n_sphere}");
            let n = n_sphere - 1;
            let sigma = sigma_series(n, cutoff);
            let want = sigma.checked_mul(&sigma).unwrap().inverse().unwrap();
            assert_eq!(out.coefficient.as_ref().unwrap(), &want);
            assert!(out.residual.iter().all(|r| r.is_zero()));
            // density: C sigma = 1/sigma.
            let density = &out.density.as_ref().unwrap().1;
            assert_eq!(density, &sigma.inverse().unwrap());
        }
    }

    #[test]
    fn cocycle_dimension_stabilizes_at_quadratic_order() {
        // Already at cutoff 2 the constrained space is one-dimensional and
        // the generator is the quadratic truncation of 1/sigma^2.
        let out = vector_counterterm(3, 2).unwrap();
        assert_eq!(out.dim, 1);
        let mut want = TruncSeries::one(2, 2);
        want = want.checked_add(&norm_squared(2, 2)).unwrap();
        assert_eq!(out.coefficient.unwrap(), want);
    }

    #[test]
    fn radial_ode_for_coefficient() {
        // d_i sigma^{-2} = 2 y_i sigma^{-4}.
        let cutoff = 6;
        let sigma = sigma_series(2, cutoff);
        let c = sigma.checked_mul(&sigma).unwrap().inverse().unwrap();
        let c2 = c.checked_mul(&c).unwrap();
        for i in 0..2 {
            let lhs = c.derive(i).unwrap();
            let rhs = TruncSeries::variable(2, cutoff, i)
                .unwrap()
                .checked_mul(&c2)
                .unwrap()
                .scalar_mul(&Ratio::from_int(2));
            assert_eq!(lhs.truncated(cutoff - 1), rhs.truncated(cutoff - 1));
        }
    }

    #[test]
    fn metric_counterterm_identity() {
        for (lambda, mu) in [(q(1, 1), q(0, 1)), (q(2, 3), q(5, 1)), (q(0, 1), q(1, 1))] {
            let (r1, r2) = metric_counterterm_check(3, 6, &lambda, &mu).unwrap();
            assert!(r1.is_zero(), "lambda={lambda}");
            assert!(r2.is_zero(), "lambda={lambda}, mu={mu}");
        }
    }

    #[test]
    fn metric_counterterm_low_degree_example() {
        // lambda = 1, degree <= 2: L_W g = -2 delta - 4 y y.
        let cutoff = 4;
        let n = 2;
        let g = sphere_graph_metric(3, cutoff).unwrap();
        let radial = VectorFieldJet::from_components(
            (0..n)
                .map(|i| TruncSeries::variable(n, cutoff, i).unwrap().scalar_mul(&q(-1, 1)))
                .collect(),
        )
        .unwrap();
        let lie = lie_derivative_metric(&radial, g.tensor()).unwrap();
        for i in 0..n {
            for j in i..n {
                let got = lie.sym2_component(i, j).truncated(2);
                let mut want = TruncSeries::variable(n, 2, i)
                    .unwrap()
                    .checked_mul(&TruncSeries::variable(n, 2, j).unwrap())
                    .unwrap()
                    .scalar_mul(&Ratio::from_int(-4));
                if i == j {
                    want = want
                        .checked_add(&TruncSeries::constant(n, 2, Ratio::from_int(-2)))
                        .unwrap();
                }
                assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn log_coefficient_for_spheres() {
        // Unit S^2: B = (1/3) delta in (1/4 pi) log units.
        let g = crate::geometry::sphere_normal_metric(3, 4).unwrap();
        let out = one_loop_log_coefficient(&g).unwrap();
        assert_eq!(out.b, QMatrix::identity(2).scalar_mul(&q(1, 3)));
        assert_eq!(out.ratio_to_ricci, Some(q(1, 3)));
        assert_eq!(out.trace_ricci_ratio, Some(q(-2, 3)));
        // S^4: B proportional with Ricci-unit magnitude (N-2)/(12 pi).
        let g = crate::geometry::sphere_normal_metric(5, 4).unwrap();
        let out = one_loop_log_coefficient(&g).unwrap();
        assert_eq!(out.b, QMatrix::identity(4).scalar_mul(&Ratio::one()));
        assert_eq!(out.ratio_to_ricci, Some(q(1, 3)));
    }

    #[test]
    fn log_coefficient_is_symmetric_and_isotropy_invariant() {
        // B is symmetric and commutes with the isotropy action: for every
        // isotropy generator with fiber linearization A, A^T B + B A = 0.
        for n_sphere in [3usize, 4, 5] {
            let g = crate::geometry::sphere_normal_metric(n_sphere, 4).unwrap();
            let out = one_loop_log_coefficient(&g).unwrap();
            assert!(out.b.is_symmetric());
            for r in crate::lie::isotropy_vector_action(n_sphere).unwrap() {
                let a = r.scalar_mul(&Ratio::from_int(-1)); // field linearization
                let lie = a.transpose().matmul(&out.b).add(&out.b.matmul(&a));
                assert!(lie.is_zero(), "N={n_sphere}");
            }
        }
    }

    #[test]
    fn log_coefficient_flat_and_chart_guard() {
        let flat = MetricJet::flat(3, 4);
        let out = one_loop_log_coefficient(&flat).unwrap();
        assert!(out.b.is_zero());
        let graph = sphere_graph_metric(3, 4).unwrap();
        assert!(one_loop_log_coefficient(&graph).is_err());
    }

    #[test]
    fn beta_report_verdicts() {
        let mut ratios = Vec::new();
        for n_sphere in [3usize, 4, 5] {
            let g = crate::geometry::sphere_normal_metric(n_sphere, 4).unwrap();
            let report = beta_report(&g).unwrap();
            assert!(report.proportional, "N={n_sphere}");
            assert_eq!(report.sign, Some(1));
            ratios.push(report.log_coefficient.ratio_to_ricci.clone().unwrap());
            let m = report.magnitude.unwrap();
            assert!((m - 1.0 / (12.0 * std::f64::consts::PI)).abs() < 1e-15);
        }
        assert!(ratios.windows(2).all(|w| w[0] == w[1]));
        // Flat input: trivially proportional.
        let flat = MetricJet::flat(2, 4);
        let report = beta_report(&flat).unwrap();
        assert!(report.proportional);
        assert!(report.sign.is_none());
    }

    #[test]
    fn beta_block_diagonal_products() {
        // Product of two unit spheres: block-diagonal B matches blockwise
        // Ricci through the same pipeline.
        let g2 = crate::geometry::sphere_normal_metric(3, 4).unwrap(); // n=2
        let g3 = crate::geometry::sphere_normal_metric(4, 4).unwrap(); // n=3
        let n = 5usize;
        let cutoff = 4;
        let mut t = TensorJet::zero(n, cutoff, TensorKind::Sym2Covariant);
        let lift = |s: &TruncSeries, offset: usize| -> TruncSeries {
            let mut out = TruncSeries::zero(n, cutoff);
            for (idx, c) in s.terms() {
                let mut e = vec![0u32; n];
                for (v, &ev) in idx.exponents().iter().enumerate() {
                    e[v + offset] = ev;
                }
                out.add_term(MultiIndex::from_exponents(e), c.clone());
            }
            out
        };
        for i in 0..2 {
            for j in i..2 {
                t.set_sym2_component(i, j, lift(g2.component(i, j), 0));
            }
        }
        for i in 0..3 {
            for j in i..3 {
                t.set_sym2_component(i + 2, j + 2, lift(g3.component(i, j), 2));
            }
        }
        let product = MetricJet::new(t, Chart::Normal).unwrap();
        let out = one_loop_log_coefficient(&product).unwrap();
        let ric2 = curvature(&g2).unwrap().ricci;
        let ric3 = curvature(&g3).unwrap().ricci;
        for i in 0..n {
            for j in 0..n {
                let want = if i < 2 && j < 2 {
                    ric2.get(i, j) * &q(1, 3)
                } else if i >= 2 && j >= 2 {
                    ric3.get(i - 2, j - 2) * &q(1, 3)
                } else {
                    Ratio::zero()
                };
                assert_eq!(out.b.get(i, j), &want, "({i},{j})");
            }
        }
    }

    #[test]
    fn deformation_dimension_of_spheres() {
        for n_sphere in [3usize, 4, 5] {
            assert_eq!(deformation_dimension(n_sphere).unwrap(), 1, "N={n_sphere}");
        }
    }

    #[test]
    fn deformation_formula_on_generic_input() {
        // Trivial isotropy on R^n with an injective fiber map
        // v -> v (x) c + c (x) v: dimension n(n+1)/2 - n.
        let n = 3usize;
        let sym_dim = n * (n + 1) / 2;
        let slot = |i: usize, j: usize| -> usize {
            let (i, j) = if i <= j { (i, j) } else { (j, i) };
            i * n - i * (i + 1) / 2 + j
        };
        let mut fiber_map = QMatrix::zeros(sym_dim, n);
        // c = e_1: (v (x) c + c (x) v)_{ab} = v_a delta_{b1} + v_b delta_{a1}.
        for v in 0..n {
            for a in 0..n {
                for b in a..n {
                    let mut coeff = Ratio::zero();
                    if b == 0 && a == v {
                        coeff += Ratio::one();
                    }
                    if a == 0 && b == v {
                        coeff += Ratio::one();
                    }
                    if !coeff.is_zero() {
                        let prev = fiber_map.get(slot(a, b), v).clone();
                        fiber_map.set(slot(a, b), v, prev + coeff);
                    }
                }
            }
        }
        let d = deformation_dimension_from_data(&[], &[], &fiber_map);
        assert_eq!(d, sym_dim - n);
    }

    #[test]
    fn so2_invariant_tensors_on_the_plane() {
        // N=3 fiber data: so(2)-invariant symmetric 2-tensors on R^2 are
        // multiples of delta.
        let vec_actions = crate::lie::isotropy_vector_action(3).unwrap();
        let sym_actions: Vec<QMatrix> =
            vec_actions.iter().map(crate::lie::sym2_action_from_vector).collect();
        let zero_map = QMatrix::zeros(3, 2);
        let d = deformation_dimension_from_data(&sym_actions, &vec_actions, &zero_map);
        assert_eq!(d, 1);
    }
}
