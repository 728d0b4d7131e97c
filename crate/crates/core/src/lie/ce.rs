//! Chevalley-Eilenberg cochain complexes and exact cohomology dimensions.
//!
//! Sign convention: the differential is the negative of the textbook formula,
//! so for a 0-cochain m one has (d m)(Z) = -Z.m. Kernels, ranks, and all
//! dimension counts are of course convention-independent.

use serde::{Deserialize, Serialize};

use crate::algebra::Ratio;
use crate::error::{Error, Result};
use crate::lie::rep::Representation;
use crate::linalg::SparseMat;

/// Sorted p-subsets of {0, .., dim-1} in lexicographic order.
fn subsets(dim: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(p);
    fn rec(start: usize, dim: usize, p: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == p {
            out.push(current.clone());
            return;
        }
        let needed = p - current.len();
        for i in start..=dim.saturating_sub(needed) {
            current.push(i);
            rec(i + 1, dim, p, current, out);
            current.pop();
        }
    }
    if p <= dim {
        rec(0, dim, p, &mut current, &mut out);
    }
    out
}

fn subset_index(list: &[Vec<usize>]) -> std::collections::BTreeMap<Vec<usize>, usize> {
    list.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect()
}

/// The matrix of d_p : C^p -> C^{p+1} in the canonical wedge/module basis.
/// Rows are indexed by (p+1)-subsets x module basis, columns by p-subsets x
/// module basis.
pub fn ce_differential(p: usize, rep: &Representation) -> Result<SparseMat> {
    let g_dim = rep.algebra.dim();
    if p > g_dim {
        return Err(Error::Domain(format!("degree {p} exceeds algebra dimension {g_dim}")));
    }
    let m_dim = rep.module_dim();
    let lower = subsets(g_dim, p);
    let upper = subsets(g_dim, p + 1);
    let lower_idx = subset_index(&lower);

    let cols = lower.len() * m_dim;
    let mut rows: Vec<Vec<(usize, Ratio)>> = vec![Vec::new(); upper.len() * m_dim];

    for (ti, t) in upper.iter().enumerate() {
        // Action term: sum_a (-1)^a rho(Z_{t_a}) omega(T \ t_a).
        for (a, &za) in t.iter().enumerate() {
            let mut rest = t.clone();
            rest.remove(a);
            let Some(&s_idx) = lower_idx.get(&rest) else { continue };
            let sign = if a % 2 == 0 { 1 } else { -1 };
            let act = rep.action(za);
            for m in 0..m_dim {
                for m_out in 0..m_dim {
                    let v = act.get(m_out, m);
                    if v.is_zero() {
                        continue;
                    }
                    // Overall minus from the sign convention.
                    let coeff = v * &Ratio::from_int(-sign);
                    rows[ti * m_dim + m_out].push((s_idx * m_dim + m, coeff));
                }
            }
        }
        // Bracket term: sum_{a<b} (-1)^{a+b} omega([Z_a, Z_b], T \ {a,b}).
        for a in 0..t.len() {
            for b in (a + 1)..t.len() {
                let mut rest = t.clone();
                rest.remove(b);
                rest.remove(a);
                let base_sign = if (a + b) % 2 == 0 { 1i64 } else { -1i64 };
                for (c, tau) in rep.algebra.bracket(t[a], t[b]) {
                    if rest.contains(&c) {
                        continue;
                    }
                    let mut merged = rest.clone();
                    let pos = merged.iter().take_while(|&&u| u < c).count();
                    merged.insert(pos, c);
                    let Some(&s_idx) = lower_idx.get(&merged) else { continue };
                    let perm_sign = if pos % 2 == 0 { 1i64 } else { -1i64 };
                    let coeff = &tau * &Ratio::from_int(-(base_sign * perm_sign));
                    for m in 0..m_dim {
                        rows[ti * m_dim + m].push((s_idx * m_dim + m, coeff.clone()));
                    }
                }
            }
        }
    }

    let mut mat = SparseMat::new(cols);
    for row in rows {
        mat.push_row(&row);
    }
    Ok(mat)
}

/// One cohomology degree of a finite module, with exact ranks.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CohomologyRecord {
    pub algebra: String,
    pub module: String,
    pub degree: usize,
    pub dim_kernel: usize,
    pub dim_image: usize,
    #[serde(rename = "dim_H")]
    pub dim_h: usize,
}

/// dim H^p for p = 0..=max_degree via exact rational rank computation.
pub fn cohomology_dims(rep: &Representation, max_degree: usize) -> Result<Vec<CohomologyRecord>> {
    let g_dim = rep.algebra.dim();
    let m_dim = rep.module_dim();
    let algebra_name = format!("dim-{g_dim} algebra");
    let mut records = Vec::new();
    let mut prev_rank = 0usize;
    for p in 0..=max_degree.min(g_dim) {
        let c_dim = subsets(g_dim, p).len() * m_dim;
        let rank_dp = if p < g_dim { ce_differential(p, rep)?.rank() } else { 0 };
        let kernel = c_dim - rank_dp;
        records.push(CohomologyRecord {
            algebra: algebra_name.clone(),
            module: rep.module_name.clone(),
            degree: p,
            dim_kernel: kernel,
            dim_image: prev_rank,
            dim_h: kernel - prev_rank,
        });
        prev_rank = rank_dp;
    }
    Ok(records)
}

/// Checks d_{p+1} d_p = 0 exactly for all degrees.
pub fn complex_squares_to_zero(rep: &Representation) -> Result<bool> {
    let g_dim = rep.algebra.dim();
    for p in 0..g_dim {
        let dp = ce_differential(p, rep)?;
        let dp1 = ce_differential(p + 1, rep)?;
        // Apply d_{p+1} to every column image of d_p: build the dense image
        // column by column and check it maps to zero.
        let m_dim = rep.module_dim();
        let c_dim = subsets(g_dim, p).len() * m_dim;
        for col in 0..c_dim {
            let mut unit = vec![Ratio::zero(); c_dim];
            unit[col] = Ratio::one();
            let mid = dense_apply(&dp, &unit);
            let out = dense_apply(&dp1, &mid);
            if out.iter().any(|v| !v.is_zero()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn dense_apply(m: &SparseMat, x: &[Ratio]) -> Vec<Ratio> {
    m.apply(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::algebra::build_so;
    use crate::lie::rep::{standard_so_rep, Representation};

    #[test]
    fn abelian_trivial_module_has_zero_differential() {
        let (alg, _) = build_so(2).unwrap();
        let rep = Representation::trivial(alg);
        for p in 0..=1 {
            let d = ce_differential(p, &rep).unwrap();
            assert_eq!(d.rank(), 0);
        }
    }

    #[test]
    fn so3_adjoint_degree_zero() {
        // d_0(m)(Z) = -Z.m; kernel = invariants = 0 for the adjoint of so(3).
        let (alg, _) = build_so(3).unwrap();
        let rep = Representation::adjoint(alg).unwrap();
        let d0 = ce_differential(0, &rep).unwrap();
        assert_eq!(d0.rank(), 3); // trivial kernel
    }

    #[test]
    fn d_squared_zero_so4_five_dim() {
        let std4 = standard_so_rep(4).unwrap();
        let (alg, _) = build_so(4).unwrap();
        let five = std4.direct_sum(&Representation::trivial(alg), "standard+trivial").unwrap();
        assert!(complex_squares_to_zero(&five).unwrap());
    }

    #[test]
    fn whitehead_vanishing_so3_standard() {
        let rep = standard_so_rep(3).unwrap();
        let dims = cohomology_dims(&rep, 2).unwrap();
        assert_eq!(dims[0].dim_h, 0);
        assert_eq!(dims[1].dim_h, 0);
        assert_eq!(dims[2].dim_h, 0);
    }

    #[test]
    fn so2_trivial_module_survives() {
        let (alg, _) = build_so(2).unwrap();
        let rep = Representation::trivial(alg);
        let dims = cohomology_dims(&rep, 1).unwrap();
        assert_eq!(dims[0].dim_h, 1);
        assert_eq!(dims[1].dim_h, 1);
    }

    #[test]
    fn so3_trivial_module_no_characters() {
        let (alg, _) = build_so(3).unwrap();
        let rep = Representation::trivial(alg);
        let dims = cohomology_dims(&rep, 1).unwrap();
        assert_eq!(dims[1].dim_h, 0);
    }

    #[test]
    fn degree_out_of_range_rejected() {
        let rep = standard_so_rep(3).unwrap();
        assert!(ce_differential(4, &rep).is_err());
    }

    #[test]
    fn euler_characteristic_consistency() {
        // sum (-1)^p dim C^p = sum (-1)^p dim H^p over the whole complex.
        let rep = standard_so_rep(3).unwrap();
        let g_dim = rep.algebra.dim();
        let m_dim = rep.module_dim();
        let records = cohomology_dims(&rep, g_dim).unwrap();
        let mut chi_c: i64 = 0;
        let mut chi_h: i64 = 0;
        for p in 0..=g_dim {
            let c = (subsets(g_dim, p).len() * m_dim) as i64;
            let sign = if p % 2 == 0 { 1 } else { -1 };
            chi_c += sign * c;
            chi_h += sign * records[p].dim_h as i64;
        }
        assert_eq!(chi_c, chi_h);
    }
}
