//! Finite-dimensional Lie algebras given by structure constants.

use crate::algebra::Ratio;
use crate::error::{Error, Result};

/// Structure constants T^c_{ab} with basis labels. Antisymmetry and the
/// Jacobi identity are enforced at construction.
#[derive(Clone, Debug)]
pub struct LieAlgebraData {
    dim: usize,
    /// Dense layout [a][b][c].
    structure: Vec<Ratio>,
    labels: Vec<String>,
}

impl LieAlgebraData {
    pub fn new(dim: usize, structure: Vec<Ratio>, labels: Vec<String>) -> Result<Self> {
        if structure.len() != dim * dim * dim || labels.len() != dim {
            return Err(Error::DimensionMismatch("structure constant table size".into()));
        }
        let alg = LieAlgebraData { dim, structure, labels };
        alg.check_antisymmetry()?;
        alg.check_jacobi()?;
        Ok(alg)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn structure_constant(&self, a: usize, b: usize, c: usize) -> &Ratio {
        &self.structure[(a * self.dim + b) * self.dim + c]
    }

    /// [e_a, e_b] as coefficients on the basis.
    pub fn bracket(&self, a: usize, b: usize) -> Vec<(usize, Ratio)> {
        (0..self.dim)
            .filter_map(|c| {
                let t = self.structure_constant(a, b, c);
                if t.is_zero() {
                    None
                } else {
                    Some((c, t.clone()))
                }
            })
            .collect()
    }

    /// Bracket of two general elements given by coefficient vectors.
    pub fn bracket_elements(&self, x: &[Ratio], y: &[Ratio]) -> Vec<Ratio> {
        let mut out = vec![Ratio::zero(); self.dim];
        for a in 0..self.dim {
            if x[a].is_zero() {
                continue;
            }
            for b in 0..self.dim {
                if y[b].is_zero() {
                    continue;
                }
                for c in 0..self.dim {
                    let t = self.structure_constant(a, b, c);
                    if !t.is_zero() {
                        out[c] += &(&x[a] * &y[b]) * t;
                    }
                }
            }
        }
        out
    }

    fn check_antisymmetry(&self) -> Result<()> {
        for a in 0..self.dim {
            for b in 0..self.dim {
                for c in 0..self.dim {
                    let lhs = self.structure_constant(a, b, c);
                    let rhs = self.structure_constant(b, a, c);
                    if *lhs != -rhs {
                        return Err(Error::Domain(format!(
                            "structure constants not antisymmetric at ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_jacobi(&self) -> Result<()> {
        let residual = self.jacobi_residual();
        if residual.iter().any(|r| !r.is_zero()) {
            return Err(Error::Domain("Jacobi identity fails".into()));
        }
        Ok(())
    }

    /// Sum over e of T^e_ab T^d_ec + cyclic, flattened over (a,b,c,d).
    /// All entries are zero for a Lie algebra.
    pub fn jacobi_residual(&self) -> Vec<Ratio> {
        let n = self.dim;
        let mut out = Vec::with_capacity(n * n * n * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let mut acc = Ratio::zero();
                        for e in 0..n {
                            acc += &(self.structure_constant(a, b, e).clone())
                                * self.structure_constant(e, c, d);
                            acc += &(self.structure_constant(b, c, e).clone())
                                * self.structure_constant(e, a, d);
                            acc += &(self.structure_constant(c, a, e).clone())
                                * self.structure_constant(e, b, d);
                        }
                        out.push(acc);
                    }
                }
            }
        }
        out
    }
}

/// Oriented rotation generator Z_pq = y^p d_q - y^q d_p on R^N.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct RotationPair(pub usize, pub usize);

/// Basis bookkeeping for so(N): pairs Z_ab with a < b < N first (isotropy of
/// the last coordinate axis), then Z_N1 .. Z_N,N-1.
#[derive(Clone, Debug)]
pub struct SoBasis {
    pub n: usize,
    pub pairs: Vec<RotationPair>,
    pub isotropy: Vec<usize>,
    pub complement: Vec<usize>,
}

impl SoBasis {
    pub fn new(n: usize) -> Self {
        let mut pairs = Vec::new();
        let mut isotropy = Vec::new();
        let mut complement = Vec::new();
        for a in 1..n {
            for b in (a + 1)..n {
                isotropy.push(pairs.len());
                pairs.push(RotationPair(a, b));
            }
        }
        for i in 1..n {
            complement.push(pairs.len());
            pairs.push(RotationPair(n, i));
        }
        SoBasis { n, pairs, isotropy, complement }
    }

    /// Index and sign of the basis element carrying the oriented pair (p,q).
    pub fn locate(&self, p: usize, q: usize) -> Option<(usize, i64)> {
        for (idx, RotationPair(a, b)) in self.pairs.iter().enumerate() {
            if (*a, *b) == (p, q) {
                return Some((idx, 1));
            }
            if (*a, *b) == (q, p) {
                return Some((idx, -1));
            }
        }
        None
    }

    /// [Z_pq, Z_rs] expanded on the basis via
    /// delta_qr Z_ps - delta_pr Z_qs - delta_qs Z_pr + delta_ps Z_qr.
    pub fn bracket_pairs(&self, x: RotationPair, y: RotationPair) -> Vec<(usize, i64)> {
        let RotationPair(p, q) = x;
        let RotationPair(r, s) = y;
        let mut terms: Vec<(usize, usize, i64)> = Vec::new();
        if q == r {
            terms.push((p, s, 1));
        }
        if p == r {
            terms.push((q, s, -1));
        }
        if q == s {
            terms.push((p, r, -1));
        }
        if p == s {
            terms.push((q, r, 1));
        }
        let mut out: Vec<(usize, i64)> = Vec::new();
        for (u, v, sign) in terms {
            if u == v {
                continue;
            }
            let (idx, orient) = self.locate(u, v).expect("pair in basis");
            let total = sign * orient;
            if let Some(e) = out.iter_mut().find(|(i, _)| *i == idx) {
                e.1 += total;
            } else {
                out.push((idx, total));
            }
        }
        out.retain(|(_, c)| *c != 0);
        out
    }
}

/// so(N) from the commutators of the rotation vector fields, N >= 2.
pub fn build_so(n: usize) -> Result<(LieAlgebraData, SoBasis)> {
    if n < 2 {
        return Err(Error::Domain(format!("so(N) needs N >= 2, got {n}")));
    }
    let basis = SoBasis::new(n);
    let dim = basis.pairs.len();
    let mut structure = vec![Ratio::zero(); dim * dim * dim];
    for (a, &pa) in basis.pairs.iter().enumerate() {
        for (b, &pb) in basis.pairs.iter().enumerate() {
            for (c, coeff) in basis.bracket_pairs(pa, pb) {
                structure[(a * dim + b) * dim + c] = Ratio::from_int(coeff);
            }
        }
    }
    let labels = basis
        .pairs
        .iter()
        .map(|RotationPair(a, b)| format!("Z_{a}{b}"))
        .collect();
    let alg = LieAlgebraData::new(dim, structure, labels)?;
    Ok((alg, basis))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn so3_bracket_example() {
        // [Z_12, Z_23] = Z_13 (vector-field commutator of y1 d2 - y2 d1
        // with y2 d3 - y3 d2).
        let (_, basis) = build_so(3).unwrap();
        let terms = basis.bracket_pairs(RotationPair(1, 2), RotationPair(2, 3));
        // Z_13 = -Z_31 in this basis, so expect the (3,1) generator with -1.
        let (idx, orient) = basis.locate(1, 3).unwrap();
        assert_eq!(terms, vec![(idx, orient)]);
    }

    #[test]
    fn disjoint_pairs_commute() {
        let (alg, basis) = build_so(5).unwrap();
        let (i12, _) = basis.locate(1, 2).unwrap();
        let (i34, _) = basis.locate(3, 4).unwrap();
        assert!(alg.bracket(i12, i34).is_empty());
    }

    #[test]
    fn so2_is_abelian() {
        let (alg, _) = build_so(2).unwrap();
        assert_eq!(alg.dim(), 1);
        assert!(alg.bracket(0, 0).is_empty());
    }

    #[test]
    fn jacobi_holds_up_to_so6() {
        for n in 2..=6 {
            let (alg, _) = build_so(n).unwrap();
            assert!(alg.jacobi_residual().iter().all(|r| r.is_zero()), "so({n})");
        }
    }

    #[test]
    fn n_too_small_rejected() {
        assert!(build_so(1).is_err());
    }
}
