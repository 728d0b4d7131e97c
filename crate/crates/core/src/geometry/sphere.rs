//! Round-sphere data in graph and normal coordinates, and the rotation
//! vector fields realizing so(N) on the chart.

use crate::algebra::{norm_squared, MultiIndex, Ratio, TruncSeries};
use crate::error::{Error, Result};
use crate::geometry::jets::{Chart, MetricJet, TensorJet, TensorKind, VectorFieldJet};

/// sigma = (1 - |y|^2)^{1/2} truncated: 1 - |y|^2/2 - |y|^4/8 - ...
pub fn sigma_series(n_target: usize, cutoff: u32) -> TruncSeries {
    let one = TruncSeries::one(n_target, cutoff);
    let r2 = norm_squared(n_target, cutoff);
    one.checked_sub(&r2)
        .and_then(|s| s.inv_sqrt())
        .and_then(|s| s.inverse())
        .expect("sigma series is well-defined")
}

/// Graph-coordinate round metric on S^{N-1}:
/// g_ij = delta_ij + y_i y_j / (1 - |y|^2), expanded and truncated.
pub fn sphere_graph_metric(n_sphere: usize, cutoff: u32) -> Result<MetricJet> {
    if n_sphere < 2 {
        return Err(Error::Domain(format!("sphere needs N >= 2, got {n_sphere}")));
    }
    if cutoff < 2 {
        return Err(Error::Domain(format!("graph metric needs cutoff >= 2, got {cutoff}")));
    }
    let n = n_sphere - 1;
    let one = TruncSeries::one(n, cutoff);
    let geo = one.checked_sub(&norm_squared(n, cutoff))?.inverse()?;
    let mut t = TensorJet::zero(n, cutoff, TensorKind::Sym2Covariant);
    for i in 0..n {
        for j in i..n {
            let yy = TruncSeries::variable(n, cutoff, i)?.checked_mul(&TruncSeries::variable(n, cutoff, j)?)?;
            let mut s = yy.checked_mul(&geo)?;
            if i == j {
                s = s.checked_add(&one)?;
            }
            t.set_sym2_component(i, j, s);
        }
    }
    MetricJet::new(t, Chart::Graph)
}

/// Normal-coordinate round metric on the unit S^{N-1}:
/// g_ij = s(r^2) delta_ij + u(r^2) y_i y_j with s(t) = sin^2(sqrt t)/t and
/// u(t) = (1 - s(t))/t, both even series with exact rational coefficients.
pub fn sphere_normal_metric(n_sphere: usize, cutoff: u32) -> Result<MetricJet> {
    if n_sphere < 3 {
        return Err(Error::Domain(format!("normal sphere chart needs N >= 3, got {n_sphere}")));
    }
    if cutoff < 4 {
        return Err(Error::Domain(format!("normal sphere chart needs cutoff >= 4, got {cutoff}")));
    }
    let n = n_sphere - 1;
    let r2 = norm_squared(n, cutoff);

    // s(t) = sum_{m>=0} (-1)^m 2^{2m+1} t^m / (2m+2)!
    // u(t) = sum_{m>=1} (-1)^{m+1} 2^{2m+1} t^{m-1} / (2m+2)!
    let max_m = (cutoff / 2) as i64 + 1;
    let mut s_uni = TruncSeries::zero(1, cutoff);
    let mut u_uni = TruncSeries::zero(1, cutoff);
    let mut factorial = Ratio::from_int(2); // (2m+2)! starting at m=0
    let mut two_pow = Ratio::from_int(2); // 2^{2m+1} starting at m=0
    for m in 0..=max_m {
        if m > 0 {
            factorial *= Ratio::from_int(2 * m + 1);
            factorial *= Ratio::from_int(2 * m + 2);
            two_pow *= Ratio::from_int(4);
        }
        let sign = if m % 2 == 0 { Ratio::one() } else { Ratio::from_int(-1) };
        let coeff = sign * two_pow.clone() * factorial.recip()?;
        s_uni.add_term(MultiIndex::from_exponents(vec![m as u32]), coeff.clone());
        if m >= 1 {
            u_uni.add_term(MultiIndex::from_exponents(vec![(m - 1) as u32]), -coeff);
        }
    }

    // Substitute t = r^2. The constant terms are handled separately since
    // substitution requires a zero constant term.
    let sub_at_r2 = |uni: &TruncSeries| -> Result<TruncSeries> {
        let c0 = uni.coeff(&MultiIndex::zero(1));
        let mut rest = uni.clone();
        rest.add_term(MultiIndex::zero(1), -&c0);
        let composed = TruncSeries::substitute(&rest, &r2)?;
        composed.checked_add(&TruncSeries::constant(n, cutoff, c0))
    };
    let s_series = sub_at_r2(&s_uni)?;
    let u_series = sub_at_r2(&u_uni)?;

    let mut t = TensorJet::zero(n, cutoff, TensorKind::Sym2Covariant);
    for i in 0..n {
        for j in i..n {
            let yy = TruncSeries::variable(n, cutoff, i)?.checked_mul(&TruncSeries::variable(n, cutoff, j)?)?;
            let mut g = yy.checked_mul(&u_series)?;
            if i == j {
                g = g.checked_add(&s_series)?;
            }
            t.set_sym2_component(i, j, g);
        }
    }
    MetricJet::new(t, Chart::Normal)
}

/// The rotation generators of so(N) realized as vector field jets on the
/// graph chart, together with the isotropy split.
#[derive(Clone, Debug)]
pub struct RotationFields {
    /// One jet per so(N) basis element, aligned with `lie::build_so(N)`.
    pub fields: Vec<VectorFieldJet>,
    /// Indices of the isotropy generators Z_ab, a < b < N (linear fields).
    pub isotropy: Vec<usize>,
    /// Indices of the complementary generators Z_Ni (= sigma d_i); the k-th
    /// entry is the generator whose leading term is d_{y^k}.
    pub complement: Vec<usize>,
}

/// Builds jets for all so(N) generators on the graph chart of S^{N-1}:
/// linear jets for the isotropy subalgebra, sigma * d_i for the complement.
pub fn rotation_fields(n_sphere: usize, cutoff: u32) -> Result<RotationFields> {
    if n_sphere < 2 {
        return Err(Error::Domain(format!("rotation fields need N >= 2, got {n_sphere}")));
    }
    let n = n_sphere - 1;
    let sigma = sigma_series(n, cutoff);
    let mut fields = Vec::new();
    let mut isotropy = Vec::new();
    let mut complement = Vec::new();

    // Basis order matches lie::build_so: Z_ab for a < b < N, then Z_N1..Z_N,N-1.
    for a in 0..n {
        for b in (a + 1)..n {
            let mut comps = vec![TruncSeries::zero(n, cutoff); n];
            comps[b] = TruncSeries::variable(n, cutoff, a)?;
            comps[a] = TruncSeries::variable(n, cutoff, b)?.scalar_mul(&Ratio::from_int(-1));
            isotropy.push(fields.len());
            fields.push(
                VectorFieldJet::from_components(comps)?
                    .with_label(format!("Z_{}{}", a + 1, b + 1)),
            );
        }
    }
    for i in 0..n {
        let mut comps = vec![TruncSeries::zero(n, cutoff); n];
        comps[i] = sigma.clone();
        complement.push(fields.len());
        fields.push(VectorFieldJet::from_components(comps)?.with_label(format!("Z_N{}", i + 1)));
    }
    Ok(RotationFields { fields, isotropy, complement })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::MultiIndex;
    use crate::geometry::jets::{commutator, lie_derivative_metric};

    #[test]
    fn sigma_series_low_order() {
        // k = 2: 1 - |y|^2/2 for any target dimension
        let s = sigma_series(3, 2);
        let want = TruncSeries::one(3, 2)
            .checked_sub(&norm_squared(3, 2).scalar_mul(&Ratio::new(1, 2).unwrap()))
            .unwrap();
        assert_eq!(s, want);
    }

    #[test]
    fn sigma_defining_relation() {
        // sigma^2 + |y|^2 = 1 up to cutoff
        let k = 6;
        let s = sigma_series(2, k);
        let lhs = s.checked_mul(&s).unwrap().checked_add(&norm_squared(2, k)).unwrap();
        assert_eq!(lhs, TruncSeries::one(2, k));
    }

    #[test]
    fn sigma_algebra_consistency() {
        // sigma * sigma^{-2} = sigma^{-1}
        let k = 6;
        let s = sigma_series(2, k);
        let s_inv = s.inverse().unwrap();
        let s_inv2 = s_inv.checked_mul(&s_inv).unwrap();
        assert_eq!(s.checked_mul(&s_inv2).unwrap(), s_inv);
    }

    #[test]
    fn graph_metric_leading_terms() {
        // N=3, k=2: g_ij = delta_ij + y_i y_j
        let g = sphere_graph_metric(3, 2).unwrap();
        let one = TruncSeries::one(2, 2);
        let y = |i| TruncSeries::variable(2, 2, i).unwrap();
        assert_eq!(g.component(0, 0), &one.checked_add(&y(0).checked_mul(&y(0)).unwrap()).unwrap());
        assert_eq!(g.component(0, 1), &y(0).checked_mul(&y(1)).unwrap());
    }

    #[test]
    fn circle_metric_is_geometric_series() {
        // N=2: g_11 = 1/(1-y^2)
        let k = 6;
        let g = sphere_graph_metric(2, k).unwrap();
        let want = TruncSeries::one(1, k)
            .checked_sub(&norm_squared(1, k))
            .unwrap()
            .inverse()
            .unwrap();
        assert_eq!(g.component(0, 0), &want);
    }

    #[test]
    fn graph_metric_quartic_coefficient() {
        // N=3, k=4: coefficient of y1^2 y2^2 in g_22 equals 1
        // (expand y2^2/(1-|y|^2) by hand: y2^2 (1 + y1^2 + y2^2 + ...)).
        let g = sphere_graph_metric(3, 4).unwrap();
        let idx = MultiIndex::from_exponents(vec![2, 2]);
        assert_eq!(g.component(1, 1).coeff(&idx), Ratio::one());
    }

    #[test]
    fn normal_metric_degree_two() {
        // degree-2 part = -(1/3)(|y|^2 delta_ij - y_i y_j)
        let g = sphere_normal_metric(4, 4).unwrap();
        let n = 3;
        let third = Ratio::new(-1, 3).unwrap();
        for i in 0..n {
            for j in i..n {
                let part = g.component(i, j).homogeneous_part(2);
                let mut want = TruncSeries::zero(n, 4);
                if i == j {
                    want = norm_squared(n, 4).scalar_mul(&third);
                }
                let yy = TruncSeries::variable(n, 4, i)
                    .unwrap()
                    .checked_mul(&TruncSeries::variable(n, 4, j).unwrap())
                    .unwrap();
                want = want.checked_sub(&yy.scalar_mul(&third)).unwrap();
                assert_eq!(part, want, "component ({i},{j})");
            }
        }
    }

    #[test]
    fn rotation_fields_kill_round_metric() {
        let k = 5;
        let g = sphere_graph_metric(3, k).unwrap();
        let rf = rotation_fields(3, k).unwrap();
        for f in &rf.fields {
            let lg = lie_derivative_metric(f, g.tensor()).unwrap();
            assert!(lg.truncated(k - 1).is_zero(), "L_{:?} g != 0", f.label);
        }
    }

    #[test]
    fn frame_relation() {
        // Z_ij - (y^i / sigma) Z_Nj + (y^j / sigma) Z_Ni = 0
        let k = 6;
        let n = 2;
        let rf = rotation_fields(3, k).unwrap();
        let sigma_inv = sigma_series(n, k).inverse().unwrap();
        let z12 = &rf.fields[rf.isotropy[0]];
        let zn1 = &rf.fields[rf.complement[0]];
        let zn2 = &rf.fields[rf.complement[1]];
        let y1_over_sigma = TruncSeries::variable(n, k, 0).unwrap().checked_mul(&sigma_inv).unwrap();
        let y2_over_sigma = TruncSeries::variable(n, k, 1).unwrap().checked_mul(&sigma_inv).unwrap();
        let residual = z12
            .checked_sub(&zn2.series_mul(&y1_over_sigma).unwrap())
            .unwrap()
            .checked_add(&zn1.series_mul(&y2_over_sigma).unwrap())
            .unwrap();
        assert!(residual.is_zero());
    }

    #[test]
    fn complement_brackets_close_into_isotropy() {
        // [Z_N1, Z_N2] + Z_12 = 0 up to cutoff - 1
        let k = 6;
        let rf = rotation_fields(3, k).unwrap();
        let zn1 = &rf.fields[rf.complement[0]];
        let zn2 = &rf.fields[rf.complement[1]];
        let z12 = &rf.fields[rf.isotropy[0]];
        let c = commutator(zn1, zn2).unwrap().checked_add(z12).unwrap();
        assert!(c.tensor().truncated(k - 1).is_zero());
    }
}
