//! Finite-dimensional Gaussian/Wick calculus and the BV toy theory:
//! contraction operators, Gaussian moments, effective interactions,
//! divergence operators, and quantum-master-equation residuals.

mod bv;
mod contraction;
mod effective;
mod laurent;
pub mod random;

pub use bv::{
    reduce_high_modes, scale_descent_check, BvOperators, DescentOutcome, GaussianModel,
    GradedPoly, PolyVectorField,
};
pub use contraction::{contract, contract_full_eval0, gauss_hermite_expectation, wick_expectation};
pub use effective::{effective_interaction, Interaction};
pub use laurent::{Coeff, Laurent};

/// Monomial enumeration shared by batteries and tests.
pub mod test_support {
    use crate::algebra::MultiIndex;

    /// All exponent vectors in `nvars` variables of total degree <= `max`.
    pub fn monomials(nvars: usize, max: u32) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex::zero(nvars)];
        let mut frontier = vec![MultiIndex::zero(nvars)];
        for _ in 0..max {
            let mut next = Vec::new();
            for m in &frontier {
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
}
