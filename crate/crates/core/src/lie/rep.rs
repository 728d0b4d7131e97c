//! Finite-dimensional representations as explicit action matrices.

use crate::algebra::Ratio;
use crate::error::{Error, Result};
use crate::lie::algebra::LieAlgebraData;
use crate::linalg::QMatrix;

/// A module given by one action matrix per basis vector of the algebra.
/// The homomorphism axiom rho(a) rho(b) - rho(b) rho(a) = sum_c T^c_ab rho(c)
/// is checked exactly at construction.
#[derive(Clone, Debug)]
pub struct Representation {
    pub algebra: LieAlgebraData,
    module_dim: usize,
    action: Vec<QMatrix>,
    pub module_name: String,
}

impl Representation {
    pub fn new(
        algebra: LieAlgebraData,
        action: Vec<QMatrix>,
        module_name: impl Into<String>,
    ) -> Result<Self> {
        if action.len() != algebra.dim() {
            return Err(Error::DimensionMismatch("one action matrix per basis vector".into()));
        }
        let module_dim = action.first().map(|m| m.rows()).unwrap_or(0);
        for m in &action {
            if m.rows() != module_dim || m.cols() != module_dim {
                return Err(Error::DimensionMismatch("action matrices must be square and equal-sized".into()));
            }
        }
        let rep = Representation { algebra, module_dim, action, module_name: module_name.into() };
        rep.check_axiom()?;
        Ok(rep)
    }

    pub fn module_dim(&self) -> usize {
        self.module_dim
    }

    pub fn action(&self, a: usize) -> &QMatrix {
        &self.action[a]
    }

    fn check_axiom(&self) -> Result<()> {
        let dim = self.algebra.dim();
        for a in 0..dim {
            for b in (a + 1)..dim {
                let comm = self.action[a]
                    .matmul(&self.action[b])
                    .sub(&self.action[b].matmul(&self.action[a]));
                let mut want = QMatrix::zeros(self.module_dim, self.module_dim);
                for (c, t) in self.algebra.bracket(a, b) {
                    want = want.add(&self.action[c].scalar_mul(&t));
                }
                if comm != want {
                    return Err(Error::Domain(format!(
                        "representation axiom fails on ({}, {})",
                        self.algebra.label(a),
                        self.algebra.label(b)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Trivial one-dimensional module.
    pub fn trivial(algebra: LieAlgebraData) -> Self {
        let dim = algebra.dim();
        Representation {
            algebra,
            module_dim: 1,
            action: vec![QMatrix::zeros(1, 1); dim],
            module_name: "trivial".into(),
        }
    }

    /// Direct sum with another module over the same algebra.
    pub fn direct_sum(&self, rhs: &Representation, name: impl Into<String>) -> Result<Representation> {
        if self.algebra.dim() != rhs.algebra.dim() {
            return Err(Error::DimensionMismatch("direct sum over different algebras".into()));
        }
        let d1 = self.module_dim;
        let d2 = rhs.module_dim;
        let action = (0..self.algebra.dim())
            .map(|a| {
                QMatrix::from_fn(d1 + d2, d1 + d2, |i, j| {
                    if i < d1 && j < d1 {
                        self.action[a].get(i, j).clone()
                    } else if i >= d1 && j >= d1 {
                        rhs.action[a].get(i - d1, j - d1).clone()
                    } else {
                        Ratio::zero()
                    }
                })
            })
            .collect();
        Representation::new(self.algebra.clone(), action, name)
    }

    /// Adjoint module from the structure constants: ad(a) e_b = [e_a, e_b].
    pub fn adjoint(algebra: LieAlgebraData) -> Result<Self> {
        let dim = algebra.dim();
        let action = (0..dim)
            .map(|a| {
                QMatrix::from_fn(dim, dim, |c, b| algebra.structure_constant(a, b, c).clone())
            })
            .collect();
        Representation::new(algebra, action, "adjoint")
    }
}

/// Linearization matrix of the rotation generator Z_pq acting on R^n vectors.
/// The vector-fiber action of the field A y . d is v -> -A v, which makes
/// Z -> rho(Z) a homomorphism for the vector-field bracket.
fn rotation_vector_action(n: usize, p: usize, q: usize) -> QMatrix {
    // Field components: V^q = y^p, V^p = -y^q (1-based pair labels).
    let mut a = QMatrix::zeros(n, n);
    a.set(q - 1, p - 1, Ratio::one());
    a.set(p - 1, q - 1, Ratio::from_int(-1));
    a.scalar_mul(&Ratio::from_int(-1))
}

/// Standard N-dimensional module of so(N).
pub fn standard_so_rep(n: usize) -> Result<Representation> {
    let (alg, basis) = crate::lie::algebra::build_so(n)?;
    let action = basis
        .pairs
        .iter()
        .map(|&crate::lie::algebra::RotationPair(p, q)| rotation_vector_action(n, p, q))
        .collect();
    Representation::new(alg, action, "standard")
}

/// Action of the isotropy subalgebra so(n) (rotations of the first n axes of
/// R^{n+1}) on the fiber R^n: one matrix per isotropy generator of so(n+1),
/// i.e. the standard so(n) module indexed compatibly with `SoBasis`.
pub fn isotropy_vector_action(n_sphere: usize) -> Result<Vec<QMatrix>> {
    let n = n_sphere - 1;
    let basis = crate::lie::algebra::SoBasis::new(n_sphere);
    Ok(basis
        .isotropy
        .iter()
        .map(|&idx| {
            let crate::lie::algebra::RotationPair(p, q) = basis.pairs[idx];
            rotation_vector_action(n, p, q)
        })
        .collect())
}

/// Induced action on symmetric two-tensors from a vector action matrix R:
/// the fiber Lie derivative g -> A^T g + g A with A = -R the field
/// linearization, written on the packed upper triangle. Like the vector
/// action, this is a Lie algebra homomorphism for the field bracket.
pub fn sym2_action_from_vector(r: &QMatrix) -> QMatrix {
    let n = r.rows();
    let a = r.scalar_mul(&Ratio::from_int(-1)); // field linearization
    let slot = |i: usize, j: usize| -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * n - i * (i + 1) / 2 + j
    };
    let dim = n * (n + 1) / 2;
    let mut out = QMatrix::zeros(dim, dim);
    // (L g)_ij = sum over ordered (k,l) of [A_ki delta_lj + delta_ki A_lj] g_kl;
    // both orders of an off-diagonal pair fold into the same packed column.
    for i in 0..n {
        for j in i..n {
            for k in 0..n {
                for l in 0..n {
                    let mut c = Ratio::zero();
                    if l == j {
                        c += a.get(k, i).clone();
                    }
                    if k == i {
                        c += a.get(l, j).clone();
                    }
                    if c.is_zero() {
                        continue;
                    }
                    let row = slot(i, j);
                    let col = slot(k, l);
                    let prev = out.get(row, col).clone();
                    out.set(row, col, prev + c);
                }
            }
        }
    }
    out
}
