//! Series-valued tensors with enforced index symmetries.

use crate::algebra::{Ratio, TruncSeries};
use crate::error::{Error, Result};
use crate::linalg::QMatrix;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TensorKind {
    Scalar,
    Vector,
    /// Symmetric covariant two-tensor; components stored for i <= j.
    Sym2Covariant,
}

impl TensorKind {
    pub fn component_count(self, nvars: usize) -> usize {
        match self {
            TensorKind::Scalar => 1,
            TensorKind::Vector => nvars,
            TensorKind::Sym2Covariant => nvars * (nvars + 1) / 2,
        }
    }
}

/// A truncated-jet tensor: one series per independent component.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TensorJet {
    nvars: usize,
    cutoff: u32,
    kind: TensorKind,
    components: Vec<TruncSeries>,
}

fn sym2_slot(nvars: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    // Row-major upper triangle.
    i * nvars - i * (i + 1) / 2 + j
}

impl TensorJet {
    pub fn zero(nvars: usize, cutoff: u32, kind: TensorKind) -> Self {
        TensorJet {
            nvars,
            cutoff,
            kind,
            components: vec![TruncSeries::zero(nvars, cutoff); kind.component_count(nvars)],
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn kind(&self) -> TensorKind {
        self.kind
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    pub fn scalar(&self) -> &TruncSeries {
        debug_assert_eq!(self.kind, TensorKind::Scalar);
        &self.components[0]
    }

    pub fn vector_component(&self, i: usize) -> &TruncSeries {
        debug_assert_eq!(self.kind, TensorKind::Vector);
        &self.components[i]
    }

    pub fn sym2_component(&self, i: usize, j: usize) -> &TruncSeries {
        debug_assert_eq!(self.kind, TensorKind::Sym2Covariant);
        &self.components[sym2_slot(self.nvars, i, j)]
    }

    pub fn set_scalar(&mut self, s: TruncSeries) {
        debug_assert_eq!(self.kind, TensorKind::Scalar);
        self.components[0] = s;
    }

    pub fn set_vector_component(&mut self, i: usize, s: TruncSeries) {
        debug_assert_eq!(self.kind, TensorKind::Vector);
        self.components[i] = s;
    }

    pub fn set_sym2_component(&mut self, i: usize, j: usize, s: TruncSeries) {
        debug_assert_eq!(self.kind, TensorKind::Sym2Covariant);
        self.components[sym2_slot(self.nvars, i, j)] = s;
    }

    pub fn components(&self) -> &[TruncSeries] {
        &self.components
    }

    pub fn checked_add(&self, rhs: &TensorJet) -> Result<TensorJet> {
        self.same_shape(rhs)?;
        let components = self
            .components
            .iter()
            .zip(&rhs.components)
            .map(|(a, b)| a.checked_add(b))
            .collect::<Result<_>>()?;
        Ok(TensorJet { components, ..self.clone() })
    }

    pub fn checked_sub(&self, rhs: &TensorJet) -> Result<TensorJet> {
        self.same_shape(rhs)?;
        let components = self
            .components
            .iter()
            .zip(&rhs.components)
            .map(|(a, b)| a.checked_sub(b))
            .collect::<Result<_>>()?;
        Ok(TensorJet { components, ..self.clone() })
    }

    pub fn scalar_mul(&self, c: &Ratio) -> TensorJet {
        TensorJet {
            components: self.components.iter().map(|s| s.scalar_mul(c)).collect(),
            ..self.clone()
        }
    }

    /// Truncates every component to degree `d` (for residuals "up to
    /// cutoff - 1", where the top degree is not trustworthy).
    pub fn truncated(&self, d: u32) -> TensorJet {
        TensorJet {
            cutoff: d,
            components: self.components.iter().map(|s| s.truncated(d)).collect(),
            ..self.clone()
        }
    }

    fn same_shape(&self, rhs: &TensorJet) -> Result<()> {
        if self.nvars != rhs.nvars || self.cutoff != rhs.cutoff || self.kind != rhs.kind {
            return Err(Error::DimensionMismatch("tensor jet shapes differ".into()));
        }
        Ok(())
    }

    /// Constant part as a matrix (sym2) — the tensor evaluated at the origin.
    pub fn sym2_at_origin(&self) -> QMatrix {
        debug_assert_eq!(self.kind, TensorKind::Sym2Covariant);
        QMatrix::from_fn(self.nvars, self.nvars, |i, j| {
            self.sym2_component(i, j).constant_term()
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    Graph,
    Normal,
    Other,
}

/// Metric jet: symmetric two-tensor with positive-definite constant part.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MetricJet {
    tensor: TensorJet,
    chart: Chart,
}

impl MetricJet {
    /// Validates the chart invariants: constant part symmetric
    /// positive-definite, and for normal charts g(0) = delta with vanishing
    /// degree-one coefficients.
    pub fn new(tensor: TensorJet, chart: Chart) -> Result<Self> {
        if tensor.kind() != TensorKind::Sym2Covariant {
            return Err(Error::DimensionMismatch("metric jet must be sym2 covariant".into()));
        }
        let g0 = tensor.sym2_at_origin();
        if !g0.is_positive_definite() {
            return Err(Error::Domain("metric constant term is not positive definite".into()));
        }
        if chart == Chart::Normal {
            let n = tensor.nvars();
            if g0 != QMatrix::identity(n) {
                return Err(Error::Precondition("normal chart requires g(0) = identity".into()));
            }
            for i in 0..n {
                for j in i..n {
                    if !tensor.sym2_component(i, j).homogeneous_part(1).is_zero() {
                        return Err(Error::Precondition(
                            "normal chart requires vanishing first derivatives".into(),
                        ));
                    }
                }
            }
        }
        Ok(MetricJet { tensor, chart })
    }

    pub fn tensor(&self) -> &TensorJet {
        &self.tensor
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn nvars(&self) -> usize {
        self.tensor.nvars()
    }

    pub fn cutoff(&self) -> u32 {
        self.tensor.cutoff()
    }

    pub fn component(&self, i: usize, j: usize) -> &TruncSeries {
        self.tensor.sym2_component(i, j)
    }

    /// Flat metric (identity at all orders) in a normal chart.
    pub fn flat(nvars: usize, cutoff: u32) -> Self {
        let mut t = TensorJet::zero(nvars, cutoff, TensorKind::Sym2Covariant);
        for i in 0..nvars {
            t.set_sym2_component(i, i, TruncSeries::one(nvars, cutoff));
        }
        MetricJet::new(t, Chart::Normal).expect("flat metric is a valid normal chart")
    }
}

/// Vector field jet, optionally tagged with the Lie-algebra basis label it
/// realizes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VectorFieldJet {
    tensor: TensorJet,
    pub label: Option<String>,
}

impl VectorFieldJet {
    pub fn zero(nvars: usize, cutoff: u32) -> Self {
        VectorFieldJet { tensor: TensorJet::zero(nvars, cutoff, TensorKind::Vector), label: None }
    }

    pub fn from_components(components: Vec<TruncSeries>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::DimensionMismatch("empty vector field".into()));
        }
        let nvars = components[0].nvars();
        let cutoff = components[0].cutoff();
        if components.len() != nvars
            || components.iter().any(|c| c.nvars() != nvars || c.cutoff() != cutoff)
        {
            return Err(Error::DimensionMismatch("vector field component shapes differ".into()));
        }
        let mut t = TensorJet::zero(nvars, cutoff, TensorKind::Vector);
        for (i, c) in components.into_iter().enumerate() {
            t.set_vector_component(i, c);
        }
        Ok(VectorFieldJet { tensor: t, label: None })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn tensor(&self) -> &TensorJet {
        &self.tensor
    }

    pub fn nvars(&self) -> usize {
        self.tensor.nvars()
    }

    pub fn cutoff(&self) -> u32 {
        self.tensor.cutoff()
    }

    pub fn component(&self, i: usize) -> &TruncSeries {
        self.tensor.vector_component(i)
    }

    pub fn is_zero(&self) -> bool {
        self.tensor.is_zero()
    }

    pub fn checked_add(&self, rhs: &VectorFieldJet) -> Result<VectorFieldJet> {
        Ok(VectorFieldJet { tensor: self.tensor.checked_add(&rhs.tensor)?, label: None })
    }

    pub fn checked_sub(&self, rhs: &VectorFieldJet) -> Result<VectorFieldJet> {
        Ok(VectorFieldJet { tensor: self.tensor.checked_sub(&rhs.tensor)?, label: None })
    }

    pub fn scalar_mul(&self, c: &Ratio) -> VectorFieldJet {
        VectorFieldJet { tensor: self.tensor.scalar_mul(c), label: None }
    }

    /// Multiplies every component by a scalar series.
    pub fn series_mul(&self, s: &TruncSeries) -> Result<VectorFieldJet> {
        let components = (0..self.nvars())
            .map(|i| self.component(i).checked_mul(s))
            .collect::<Result<Vec<_>>>()?;
        VectorFieldJet::from_components(components)
    }

    /// Linearization at the origin: matrix A with A[i][j] = d_j V^i (0).
    pub fn linear_part(&self) -> QMatrix {
        let n = self.nvars();
        QMatrix::from_fn(n, n, |i, j| {
            let d = self.component(i).derive(j).expect("var in range");
            d.constant_term()
        })
    }

    /// Directional derivative of a scalar series: V^k d_k f.
    pub fn apply_to_scalar(&self, f: &TruncSeries) -> Result<TruncSeries> {
        let mut out = TruncSeries::zero(f.nvars(), f.cutoff());
        for k in 0..self.nvars() {
            let vk = self.component(k);
            if vk.is_zero() {
                continue;
            }
            out = out.checked_add(&vk.checked_mul(&f.derive(k)?)?)?;
        }
        Ok(out)
    }
}

/// Lie derivative of a scalar: V^k d_k f.
pub fn lie_derivative_scalar(v: &VectorFieldJet, f: &TruncSeries) -> Result<TruncSeries> {
    v.apply_to_scalar(f)
}

/// Commutator of vector field jets: [v, w]^i = v^k d_k w^i - w^k d_k v^i.
pub fn commutator(v: &VectorFieldJet, w: &VectorFieldJet) -> Result<VectorFieldJet> {
    let components = (0..v.nvars())
        .map(|i| {
            let a = v.apply_to_scalar(w.component(i))?;
            let b = w.apply_to_scalar(v.component(i))?;
            a.checked_sub(&b)
        })
        .collect::<Result<Vec<_>>>()?;
    VectorFieldJet::from_components(components)
}

/// Lie derivative of a vector field jet: [v, w].
pub fn lie_derivative_vector(v: &VectorFieldJet, w: &VectorFieldJet) -> Result<VectorFieldJet> {
    commutator(v, w)
}

/// Lie derivative dispatching on the tensor kind.
pub fn lie_derivative_tensor(v: &VectorFieldJet, t: &TensorJet) -> Result<TensorJet> {
    match t.kind() {
        TensorKind::Scalar => {
            let mut out = TensorJet::zero(t.nvars(), t.cutoff(), TensorKind::Scalar);
            out.set_scalar(v.apply_to_scalar(t.scalar())?);
            Ok(out)
        }
        TensorKind::Vector => {
            let w = VectorFieldJet {
                tensor: t.clone(),
                label: None,
            };
            Ok(commutator(v, &w)?.tensor)
        }
        TensorKind::Sym2Covariant => lie_derivative_metric(v, t),
    }
}

/// Lie derivative of a symmetric two-tensor jet:
/// (L_V g)_ij = V^k d_k g_ij + g_kj d_i V^k + g_ik d_j V^k.
pub fn lie_derivative_metric(v: &VectorFieldJet, g: &TensorJet) -> Result<TensorJet> {
    if g.kind() != TensorKind::Sym2Covariant {
        return Err(Error::DimensionMismatch("lie_derivative_metric needs a sym2 tensor".into()));
    }
    if g.nvars() != v.nvars() || g.cutoff() != v.cutoff() {
        return Err(Error::DimensionMismatch("vector field and metric shapes differ".into()));
    }
    let n = g.nvars();
    let mut out = TensorJet::zero(n, g.cutoff(), TensorKind::Sym2Covariant);
    for i in 0..n {
        for j in i..n {
            let mut s = v.apply_to_scalar(g.sym2_component(i, j))?;
            for k in 0..n {
                let dv_i = v.component(k).derive(i)?;
                if !dv_i.is_zero() {
                    s = s.checked_add(&g.sym2_component(k, j).checked_mul(&dv_i)?)?;
                }
                let dv_j = v.component(k).derive(j)?;
                if !dv_j.is_zero() {
                    s = s.checked_add(&g.sym2_component(i, k).checked_mul(&dv_j)?)?;
                }
            }
            out.set_sym2_component(i, j, s);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euler_field_scales_flat_metric() {
        // L_{y^k d_k} delta = 2 delta
        let n = 3;
        let k = 4;
        let euler = VectorFieldJet::from_components(
            (0..n).map(|i| TruncSeries::variable(n, k, i).unwrap()).collect(),
        )
        .unwrap();
        let flat = MetricJet::flat(n, k);
        let lg = lie_derivative_metric(&euler, flat.tensor()).unwrap();
        for i in 0..n {
            for j in i..n {
                let want = if i == j {
                    TruncSeries::constant(n, k, Ratio::from_int(2))
                } else {
                    TruncSeries::zero(n, k)
                };
                assert_eq!(lg.sym2_component(i, j), &want);
            }
        }
    }

    #[test]
    fn metric_invariants_enforced() {
        // degenerate constant part rejected
        let t = TensorJet::zero(2, 3, TensorKind::Sym2Covariant);
        assert!(MetricJet::new(t, Chart::Other).is_err());

        // normal chart with a first-derivative term rejected
        let mut t = TensorJet::zero(2, 3, TensorKind::Sym2Covariant);
        for i in 0..2 {
            t.set_sym2_component(i, i, TruncSeries::one(2, 3));
        }
        let mut bad = t.clone();
        bad.set_sym2_component(
            0,
            1,
            TruncSeries::variable(2, 3, 0).unwrap(),
        );
        assert!(MetricJet::new(t, Chart::Normal).is_ok());
        assert!(MetricJet::new(bad, Chart::Normal).is_err());
    }
}
