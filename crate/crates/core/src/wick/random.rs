//! Seeded generators for the randomized verification batteries.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{MultiIndex, Ratio, TruncSeries};
use crate::linalg::QMatrix;
use crate::wick::bv::{GaussianModel, PolyVectorField};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small_ratio(rng: &mut ChaCha8Rng) -> Ratio {
    let n = rng.gen_range(-6i64..=6);
    let d = rng.gen_range(1i64..=4);
    Ratio::new(n, d).unwrap()
}

/// Random symmetric positive-definite rational matrix: B^T B + I with small
/// integer B.
pub fn random_spd(rng: &mut ChaCha8Rng, dim: usize) -> QMatrix {
    let b = QMatrix::from_fn(dim, dim, |_, _| Ratio::from_int(rng.gen_range(-2i64..=2)));
    b.transpose().matmul(&b).add(&QMatrix::identity(dim))
}

/// Random toy model with distinct-ish positive rational eigenvalues.
pub fn random_model(rng: &mut ChaCha8Rng, dim: usize) -> GaussianModel {
    let eigenvalues = (0..dim)
        .map(|_| Ratio::new(rng.gen_range(1i64..=8), rng.gen_range(1i64..=3)).unwrap())
        .collect();
    GaussianModel::new(eigenvalues).expect("positive eigenvalues")
}

/// Random polynomial with terms up to the given total degree.
pub fn random_poly(rng: &mut ChaCha8Rng, nvars: usize, cutoff: u32, max_degree: u32) -> TruncSeries {
    let mut s = TruncSeries::zero(nvars, cutoff);
    for idx in crate::wick::test_support::monomials(nvars, max_degree) {
        if rng.gen_bool(0.4) {
            s.add_term(idx, small_ratio(rng));
        }
    }
    s
}

/// Random polynomial vector field of bounded degree.
pub fn random_vector_field(
    rng: &mut ChaCha8Rng,
    nvars: usize,
    cutoff: u32,
    max_degree: u32,
) -> PolyVectorField {
    PolyVectorField {
        components: (0..nvars).map(|_| random_poly(rng, nvars, cutoff, max_degree)).collect(),
    }
}

/// All monomial exponent vectors in `nvars` variables of total degree at
/// most `max_degree`.
pub fn monomials_up_to(nvars: usize, max_degree: u32) -> Vec<MultiIndex> {
    crate::wick::test_support::monomials(nvars, max_degree)
}
