//! Constrained degree-one cocycles valued in truncated vector-field jets.
//!
//! The cocycle condition is the literal closedness equation
//! Z.c(Z') - Z'.c(Z) - c([Z,Z']) = 0, with generators acting on jets by Lie
//! derivative and projection back to the cutoff. Equations are imposed only
//! at degrees whose every contribution is computable from the truncated
//! unknowns: degree <= cutoff for pairs of fields without constant part,
//! degree <= cutoff - 1 otherwise.

use std::collections::BTreeMap;

use crate::algebra::{MultiIndex, Ratio, TruncSeries};
use crate::error::{Error, Result};
use crate::geometry::{commutator, VectorFieldJet};
use crate::lie::algebra::LieAlgebraData;
use crate::linalg::SparseMat;

/// A jet realization of the algebra: one vector field jet per basis element.
#[derive(Clone, Debug)]
pub struct JetRealization<'a> {
    pub algebra: &'a LieAlgebraData,
    pub fields: &'a [VectorFieldJet],
}

/// Constraints on the solution space.
#[derive(Clone, Debug, Default)]
pub struct CocycleConstraints {
    /// Generator indices on which the cochain must vanish. Checked to span a
    /// subalgebra. Cocycle equations against these generators are exactly the
    /// isotropy-equivariance conditions.
    pub vanish_on: Vec<usize>,
    /// Direction ansatz: generator index -> the single vector component its
    /// value may occupy (the quantization constraint that the correction to
    /// a transverse generator points along that generator).
    pub direction: BTreeMap<usize, usize>,
}

/// A basis of the constrained solution space; each element assigns a vector
/// field jet to every non-vanishing generator.
#[derive(Clone, Debug)]
pub struct CocycleSolution {
    pub dim: usize,
    pub basis: Vec<BTreeMap<usize, VectorFieldJet>>,
}

fn monomials_up_to(nvars: usize, cutoff: u32) -> Vec<MultiIndex> {
    let mut out = vec![MultiIndex::zero(nvars)];
    let mut frontier = vec![MultiIndex::zero(nvars)];
    for _ in 0..cutoff {
        let mut next = Vec::new();
        for m in &frontier {
            // Raise only variables >= the last raised one to avoid duplicates:
            // raise var v if all exponents after v are zero.
            for v in 0..nvars {
                if m.exponents()[v + 1..].iter().all(|&e| e == 0) {
                    next.push(m.increment(v));
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out.sort();
    out
}

/// Solves the constrained cocycle problem and returns an exact basis.
pub fn cocycle_space(
    realization: &JetRealization,
    cutoff: u32,
    constraints: &CocycleConstraints,
) -> Result<CocycleSolution> {
    let algebra = realization.algebra;
    let fields = realization.fields;
    if fields.len() != algebra.dim() {
        return Err(Error::DimensionMismatch("one field jet per basis element".into()));
    }
    let nvars = fields[0].nvars();

    // vanish_on must be closed under the bracket.
    for &a in &constraints.vanish_on {
        for &b in &constraints.vanish_on {
            for (c, t) in algebra.bracket(a, b) {
                if !t.is_zero() && !constraints.vanish_on.contains(&c) {
                    return Err(Error::Precondition(format!(
                        "vanish_on set is not a subalgebra: [{}, {}] leaves it",
                        algebra.label(a),
                        algebra.label(b)
                    )));
                }
            }
        }
    }

    let free: Vec<usize> =
        (0..algebra.dim()).filter(|g| !constraints.vanish_on.contains(g)).collect();
    let monos = monomials_up_to(nvars, cutoff);
    let mono_index: BTreeMap<MultiIndex, usize> =
        monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();

    // Unknown layout: (free generator, allowed component, monomial).
    let mut unknowns: Vec<(usize, usize, usize)> = Vec::new();
    for &g in &free {
        let comps: Vec<usize> = match constraints.direction.get(&g) {
            Some(&c) => vec![c],
            None => (0..nvars).collect(),
        };
        for c in comps {
            for m in 0..monos.len() {
                unknowns.push((g, c, m));
            }
        }
    }
    let unknown_index: BTreeMap<(usize, usize, usize), usize> =
        unknowns.iter().cloned().enumerate().map(|(i, u)| (u, i)).collect();

    // Pair list with the maximal fully-computable equation degree. A field
    // with a constant part shifts degrees down when it acts, so equations at
    // the top degree would need unknowns beyond the cutoff; a field whose
    // cochain value vanishes identically never acts at all.
    let has_constant_part = |g: usize| -> bool {
        (0..nvars).any(|i| !fields[g].component(i).constant_term().is_zero())
    };
    let vanished = |g: usize| constraints.vanish_on.contains(&g);
    let mut pairs: Vec<(usize, usize, u32)> = Vec::new();
    for a in 0..algebra.dim() {
        for b in (a + 1)..algebra.dim() {
            if vanished(a) && vanished(b) {
                // c vanishes on both and [a,b] stays in the subalgebra.
                continue;
            }
            let acting_shifts = (!vanished(b) && has_constant_part(a))
                || (!vanished(a) && has_constant_part(b));
            let dmax = if acting_shifts { cutoff.saturating_sub(1) } else { cutoff };
            pairs.push((a, b, dmax));
        }
    }

    // Equation coordinates: (pair position, component, monomial).
    let eq_rows = pairs.len() * nvars * monos.len();
    let mut rows: Vec<Vec<(usize, Ratio)>> = vec![Vec::new(); eq_rows];
    let eq_coord = |pair_pos: usize, comp: usize, mono: usize| -> usize {
        (pair_pos * nvars + comp) * monos.len() + mono
    };

    // Emit the contribution of a vector-field jet into a pair's equations,
    // degree-filtered by dmax.
    let emit = |rows: &mut Vec<Vec<(usize, Ratio)>>,
                    pair_pos: usize,
                    dmax: u32,
                    col: usize,
                    jet: &VectorFieldJet,
                    sign: &Ratio| {
        for comp in 0..nvars {
            for (idx, coeff) in jet.component(comp).terms() {
                if idx.degree() > dmax {
                    continue;
                }
                let m = mono_index[idx];
                rows[eq_coord(pair_pos, comp, m)].push((col, coeff * sign));
            }
        }
    };

    let one = Ratio::one();
    let minus_one = Ratio::from_int(-1);
    for (col, &(g, comp, m)) in unknowns.iter().enumerate() {
        let unit = {
            let mut comps = vec![TruncSeries::zero(nvars, cutoff); nvars];
            comps[comp] = TruncSeries::monomial(nvars, cutoff, monos[m].clone(), Ratio::one())?;
            VectorFieldJet::from_components(comps)?
        };
        for (pair_pos, &(a, b, dmax)) in pairs.iter().enumerate() {
            // Term a.c(b) when g == b, minus b.c(a) when g == a.
            if g == b {
                let action = commutator(&fields[a], &unit)?;
                emit(&mut rows, pair_pos, dmax, col, &action, &one);
            }
            if g == a {
                let action = commutator(&fields[b], &unit)?;
                emit(&mut rows, pair_pos, dmax, col, &action, &minus_one);
            }
            // Term -c([a,b]) restricted to the g component of the bracket.
            let t = algebra.structure_constant(a, b, g);
            if !t.is_zero() {
                emit(&mut rows, pair_pos, dmax, col, &unit, &(-t));
            }
        }
    }

    let mut mat = SparseMat::new(unknowns.len());
    for row in rows {
        if !row.is_empty() {
            mat.push_row(&row);
        }
    }
    let null = mat.nullspace();

    let mut basis = Vec::with_capacity(null.len());
    for x in null {
        let mut assignment: BTreeMap<usize, VectorFieldJet> = BTreeMap::new();
        for &g in &free {
            assignment.insert(g, VectorFieldJet::zero(nvars, cutoff));
        }
        for (u, v) in x.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let (g, comp, m) = unknowns[u];
            let jet = assignment.get_mut(&g).unwrap();
            let mut comps: Vec<TruncSeries> =
                (0..nvars).map(|i| jet.component(i).clone()).collect();
            let mono = TruncSeries::monomial(nvars, cutoff, monos[m].clone(), v.clone())?;
            comps[comp] = comps[comp].checked_add(&mono)?;
            *jet = VectorFieldJet::from_components(comps)?;
        }
        let _ = unknown_index; // layout kept for debugging
        basis.push(assignment);
    }
    Ok(CocycleSolution { dim: basis.len(), basis })
}

/// Residual of the full cocycle condition for a given assignment, evaluated
/// on every pair at the fully-computable degrees. Zero for genuine solutions.
pub fn cocycle_residual(
    realization: &JetRealization,
    cutoff: u32,
    assignment: &BTreeMap<usize, VectorFieldJet>,
    vanish_on: &[usize],
) -> Result<Vec<VectorFieldJet>> {
    let algebra = realization.algebra;
    let fields = realization.fields;
    let nvars = fields[0].nvars();
    let zero = VectorFieldJet::zero(nvars, cutoff);
    let value = |g: usize| -> &VectorFieldJet { assignment.get(&g).unwrap_or(&zero) };
    let has_constant_part = |g: usize| -> bool {
        (0..nvars).any(|i| !fields[g].component(i).constant_term().is_zero())
    };

    let mut residuals = Vec::new();
    for a in 0..algebra.dim() {
        for b in (a + 1)..algebra.dim() {
            if vanish_on.contains(&a) && vanish_on.contains(&b) {
                continue;
            }
            let acting_shifts = (!vanish_on.contains(&b) && has_constant_part(a))
                || (!vanish_on.contains(&a) && has_constant_part(b));
            let dmax = if acting_shifts { cutoff.saturating_sub(1) } else { cutoff };
            let mut r = commutator(&fields[a], value(b))?
                .checked_sub(&commutator(&fields[b], value(a))?)?;
            for (c, t) in algebra.bracket(a, b) {
                r = r.checked_sub(&value(c).scalar_mul(&t))?;
            }
            let comps: Vec<TruncSeries> =
                (0..nvars).map(|i| r.component(i).truncated(dmax)).collect();
            // Re-pad to the original cutoff for uniform shapes.
            let comps = comps
                .into_iter()
                .map(|s| {
                    let mut padded = TruncSeries::zero(nvars, cutoff);
                    for (idx, c) in s.terms() {
                        padded.add_term(idx.clone(), c.clone());
                    }
                    padded
                })
                .collect();
            residuals.push(VectorFieldJet::from_components(comps)?);
        }
    }
    Ok(residuals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::algebra::build_so;

    #[test]
    fn abelian_no_constraints_gives_full_hom() {
        // so(2) is abelian; with a trivial 1-jet module action (zero fields),
        // the cocycle condition degenerates and every linear map survives:
        // dim = dim g * dim module = 1 * (vector jets at cutoff 1 in 1 var).
        let (alg, _) = build_so(2).unwrap();
        let fields = vec![VectorFieldJet::zero(1, 1)];
        let realization = JetRealization { algebra: &alg, fields: &fields };
        let sol = cocycle_space(&realization, 1, &CocycleConstraints::default()).unwrap();
        // one generator, one component, monomials {1, y}: dimension 2.
        assert_eq!(sol.dim, 2);
    }

    #[test]
    fn vanish_on_non_subalgebra_rejected() {
        let (alg, basis) = build_so(3).unwrap();
        let fields = vec![VectorFieldJet::zero(2, 2); 3];
        let realization = JetRealization { algebra: &alg, fields: &fields };
        // The two transverse generators do not close: [Z_N1, Z_N2] = -Z_12.
        let constraints = CocycleConstraints {
            vanish_on: basis.complement.clone(),
            direction: BTreeMap::new(),
        };
        assert!(cocycle_space(&realization, 2, &constraints).is_err());
    }
}
