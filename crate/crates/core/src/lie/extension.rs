//! Order-by-order extension of an isotropy-invariant fiber value to the
//! unique invariant tensor jet.
//!
//! The transverse fields make the system triangular: the degree-m part of
//! the invariance equation determines the degree-(m+1) jet coefficients
//! through the Euler identity, and any failure shows up as a nonzero
//! residual at the first inconsistent order.

use crate::algebra::{Ratio, TruncSeries};
use crate::error::{Error, Result};
use crate::geometry::{lie_derivative_tensor, TensorJet, TensorKind, VectorFieldJet};
use crate::linalg::QMatrix;

/// Tensor value at the base point.
#[derive(Clone, Debug)]
pub enum FiberValue {
    Scalar(Ratio),
    Vector(Vec<Ratio>),
    Sym2(QMatrix),
}

impl FiberValue {
    fn kind(&self) -> TensorKind {
        match self {
            FiberValue::Scalar(_) => TensorKind::Scalar,
            FiberValue::Vector(_) => TensorKind::Vector,
            FiberValue::Sym2(_) => TensorKind::Sym2Covariant,
        }
    }

    fn embed(&self, nvars: usize, cutoff: u32) -> TensorJet {
        let mut t = TensorJet::zero(nvars, cutoff, self.kind());
        match self {
            FiberValue::Scalar(c) => t.set_scalar(TruncSeries::constant(nvars, cutoff, c.clone())),
            FiberValue::Vector(v) => {
                for (i, c) in v.iter().enumerate() {
                    t.set_vector_component(i, TruncSeries::constant(nvars, cutoff, c.clone()));
                }
            }
            FiberValue::Sym2(g) => {
                for i in 0..nvars {
                    for j in i..nvars {
                        t.set_sym2_component(
                            i,
                            j,
                            TruncSeries::constant(nvars, cutoff, g.get(i, j).clone()),
                        );
                    }
                }
            }
        }
        t
    }

    /// Fiber-level Lie derivative under a linear isotropy field with
    /// linearization A (A[i][j] = d_j V^i at the origin).
    fn isotropy_derivative(&self, a: &QMatrix) -> Vec<Ratio> {
        match self {
            FiberValue::Scalar(_) => vec![Ratio::zero()],
            FiberValue::Vector(v) => {
                // (L_Z T)^i(0) = -sum_k T^k A^i_k
                (0..v.len())
                    .map(|i| {
                        let mut acc = Ratio::zero();
                        for (k, t) in v.iter().enumerate() {
                            acc += &-(t.clone()) * a.get(i, k);
                        }
                        acc
                    })
                    .collect()
            }
            FiberValue::Sym2(g) => {
                // (L_Z g)_ij(0) = (A^T g + g A)_ij
                let n = g.rows();
                let at_g = a.transpose().matmul(g);
                let g_a = g.matmul(a);
                let s = at_g.add(&g_a);
                let mut out = Vec::new();
                for i in 0..n {
                    for j in i..n {
                        out.push(s.get(i, j).clone());
                    }
                }
                out
            }
        }
    }
}

/// Outcome of the extension.
#[derive(Clone, Debug)]
pub enum ExtensionResult {
    Invariant(TensorJet),
    Obstructed(ObstructionReport),
}

/// The first order at which the triangular system is inconsistent.
#[derive(Clone, Debug)]
pub struct ObstructionReport {
    pub order: u32,
    pub generator: String,
}

/// Extends an isotropy-invariant fiber value to the invariant tensor jet up
/// to the cutoff. `transverse[j]` must have leading constant part d_{y^j}.
pub fn invariant_jet_extension(
    fiber: &FiberValue,
    isotropy: &[VectorFieldJet],
    transverse: &[VectorFieldJet],
    cutoff: u32,
) -> Result<ExtensionResult> {
    if transverse.is_empty() {
        return Err(Error::Precondition("no transverse fields supplied".into()));
    }
    let nvars = transverse[0].nvars();
    for (j, y) in transverse.iter().enumerate() {
        for i in 0..nvars {
            let want = if i == j { Ratio::one() } else { Ratio::zero() };
            if y.component(i).constant_term() != want {
                return Err(Error::Precondition(format!(
                    "transverse field {j} is not normalized to d_y{}",
                    j + 1
                )));
            }
        }
    }

    // Precondition: the fiber value is isotropy-invariant.
    for z in isotropy {
        let a = z.linear_part();
        let lv = fiber.isotropy_derivative(&a);
        if lv.iter().any(|v| !v.is_zero()) {
            return Err(Error::Precondition(format!(
                "fiber value is not invariant under {}",
                z.label.clone().unwrap_or_else(|| "isotropy generator".into())
            )));
        }
    }

    let mut jet = fiber.embed(nvars, cutoff);
    for m in 0..cutoff {
        // Degree-(m+1) coefficients from the Euler identity:
        // T^{(m+1)} = -(1/(m+1)) sum_j y_j [L_{Y_j} T^{<=m}]^{(m)}.
        let mut correction = TensorJet::zero(nvars, cutoff, jet.kind());
        for (j, y) in transverse.iter().enumerate() {
            let l = lie_derivative_tensor(y, &jet)?;
            for (slot, comp) in l.components().iter().enumerate() {
                let part = comp.homogeneous_part(m).mul_var(j);
                let updated = correction.components()[slot].checked_add(&part)?;
                set_component(&mut correction, slot, updated);
            }
        }
        let scale = Ratio::new(-1, m as i64 + 1).unwrap();
        jet = jet.checked_add(&correction.scalar_mul(&scale))?;
    }

    // Verify full invariance; report the first failing order.
    let mut first_failure: Option<(u32, String)> = None;
    for field in isotropy.iter().chain(transverse.iter()) {
        let l = lie_derivative_tensor(field, &jet)?;
        let trimmed = l.truncated(cutoff.saturating_sub(1));
        if let Some(order) = trimmed
            .components()
            .iter()
            .filter_map(|c| c.min_degree())
            .min()
        {
            let label = field.label.clone().unwrap_or_else(|| "field".into());
            match &first_failure {
                Some((o, _)) if *o <= order => {}
                _ => first_failure = Some((order, label)),
            }
        }
    }
    if let Some((order, generator)) = first_failure {
        return Ok(ExtensionResult::Obstructed(ObstructionReport { order, generator }));
    }
    Ok(ExtensionResult::Invariant(jet))
}

fn set_component(t: &mut TensorJet, slot: usize, s: TruncSeries) {
    // Slot order matches TensorJet's internal layout.
    match t.kind() {
        TensorKind::Scalar => t.set_scalar(s),
        TensorKind::Vector => t.set_vector_component(slot, s),
        TensorKind::Sym2Covariant => {
            let n = t.nvars();
            let mut k = 0;
            for i in 0..n {
                for j in i..n {
                    if k == slot {
                        t.set_sym2_component(i, j, s);
                        return;
                    }
                    k += 1;
                }
            }
        }
    }
}
