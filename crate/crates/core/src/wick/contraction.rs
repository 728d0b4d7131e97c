//! Contraction with a symmetric two-tensor and Gaussian moments.
//!
//! Two independent routes to the same number: the permutation-sum moment
//! formula and iterated contraction evaluated at the origin. A float
//! Gauss-Hermite quadrature provides a third, numeric cross-check.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::algebra::{MultiIndex, Ratio, TruncSeries};
use crate::error::{Error, Result};
use crate::linalg::QMatrix;

/// d_P F = (1/2) sum_ab P_ab d_a d_b F for a symmetric two-tensor P.
pub fn contract(p: &QMatrix, f: &TruncSeries) -> Result<TruncSeries> {
    let n = f.nvars();
    if p.rows() != n || p.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "two-tensor is {}x{}, polynomial has {n} variables",
            p.rows(),
            p.cols()
        )));
    }
    if !p.is_symmetric() {
        return Err(Error::Domain("contraction tensor must be symmetric".into()));
    }
    let half = Ratio::new(1, 2).unwrap();
    let mut out = TruncSeries::zero(n, f.cutoff());
    for a in 0..n {
        for b in 0..n {
            let w = p.get(a, b);
            if w.is_zero() {
                continue;
            }
            let dd = f.derive(a)?.derive(b)?;
            out = out.checked_add(&dd.scalar_mul(&(w * &half)))?;
        }
    }
    Ok(out)
}

/// (e^{d_P} f)(0): full-contraction evaluation of a polynomial.
pub fn contract_full_eval0(p: &QMatrix, f: &TruncSeries) -> Result<Ratio> {
    let mut total = f.constant_term();
    let mut g = f.clone();
    let mut factorial = Ratio::one();
    for k in 1..=(f.cutoff() / 2 + 1) {
        g = contract(p, &g)?;
        if g.is_zero() {
            break;
        }
        factorial *= Ratio::from_int(k as i64);
        total += g.constant_term() * factorial.recip()?;
    }
    Ok(total)
}

/// Gaussian moment of a monomial by the permutation-sum formula:
/// (1 / (2^{n/2} (n/2)!)) sum over all permutations of products of inverse
/// covariance entries. Zero for odd degree.
pub fn wick_expectation(a: &QMatrix, exponents: &MultiIndex) -> Result<Ratio> {
    let d = exponents.len();
    if a.rows() != d || a.cols() != d {
        return Err(Error::DimensionMismatch("covariance size vs monomial variables".into()));
    }
    if !a.is_symmetric() {
        return Err(Error::Domain("quadratic form must be symmetric".into()));
    }
    let a_inv = a.inverse().map_err(|_| Error::Domain("singular quadratic form".into()))?;
    if !a.is_positive_definite() {
        return Err(Error::Domain("quadratic form must be positive definite".into()));
    }

    let n = exponents.degree() as usize;
    if n == 0 {
        return Ok(Ratio::one());
    }
    if n % 2 == 1 {
        return Ok(Ratio::zero());
    }

    // Clear A^{-1} to an integer matrix over a common denominator.
    let mut denom_lcm = BigInt::from(1);
    for i in 0..d {
        for j in 0..d {
            denom_lcm = denom_lcm.lcm(a_inv.get(i, j).denom());
        }
    }
    let m_int: Vec<Vec<BigInt>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let v = a_inv.get(i, j);
                    v.numer() * (&denom_lcm / v.denom())
                })
                .collect()
        })
        .collect();

    // Index list of the monomial, then the literal sum over S_n.
    let mut idx: Vec<usize> = Vec::with_capacity(n);
    for (v, &e) in exponents.exponents().iter().enumerate() {
        idx.extend(std::iter::repeat(v).take(e as usize));
    }
    let sum = permutation_sum(&m_int, &mut idx);

    // Normalization: divide by 2^{n/2} (n/2)! and the cleared denominators.
    let half_n = n / 2;
    let mut norm = BigInt::from(1);
    for k in 1..=half_n {
        norm *= BigInt::from(2 * k);
    }
    let mut denom_pow = BigInt::from(1);
    for _ in 0..half_n {
        denom_pow *= &denom_lcm;
    }
    Ratio::from_big(sum, norm * denom_pow)
}

/// sum over all permutations sigma of prod_i M[idx[sigma(2i)]][idx[sigma(2i+1)]],
/// via Heap's algorithm with an i128 fast path.
fn permutation_sum(m: &[Vec<BigInt>], idx: &mut [usize]) -> BigInt {
    let small: Option<Vec<Vec<i128>>> = m
        .iter()
        .map(|row| row.iter().map(|v| v.to_i128()).collect::<Option<Vec<_>>>())
        .collect();
    if let Some(ms) = small {
        if let Some(total) = permutation_sum_i128(&ms, idx) {
            return BigInt::from(total);
        }
    }
    let mut total = BigInt::zero();
    heap_permutations(idx, &mut |perm| {
        let mut prod = BigInt::from(1);
        for pair in perm.chunks_exact(2) {
            prod *= &m[pair[0]][pair[1]];
        }
        total += prod;
    });
    total
}

fn permutation_sum_i128(m: &[Vec<i128>], idx: &mut [usize]) -> Option<i128> {
    let mut total: i128 = 0;
    let mut overflow = false;
    heap_permutations(idx, &mut |perm| {
        if overflow {
            return;
        }
        let mut prod: i128 = 1;
        for pair in perm.chunks_exact(2) {
            match prod.checked_mul(m[pair[0]][pair[1]]) {
                Some(v) => prod = v,
                None => {
                    overflow = true;
                    return;
                }
            }
        }
        match total.checked_add(prod) {
            Some(v) => total = v,
            None => overflow = true,
        }
    });
    if overflow {
        None
    } else {
        Some(total)
    }
}

fn heap_permutations(items: &mut [usize], visit: &mut impl FnMut(&[usize])) {
    let n = items.len();
    let mut c = vec![0usize; n];
    visit(items);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            visit(items);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Float Gauss-Hermite oracle for the same moment, exact for monomials of
/// degree <= 9 per axis. Report rendering / cross-checks only.
pub fn gauss_hermite_expectation(a: &QMatrix, exponents: &MultiIndex) -> Result<f64> {
    // Physicists' 5-point rule for weight e^{-t^2}.
    const NODES: [f64; 5] = [
        -2.0201828704560856,
        -0.9585724646138185,
        0.0,
        0.9585724646138185,
        2.0201828704560856,
    ];
    const WEIGHTS: [f64; 5] = [
        0.019953242059045913,
        0.39361932315224116,
        0.9453087204829419,
        0.39361932315224116,
        0.019953242059045913,
    ];
    let d = exponents.len();
    let a_inv = a.inverse().map_err(|_| Error::Domain("singular quadratic form".into()))?;
    let cov: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| a_inv.get(i, j).to_f64()).collect())
        .collect();
    // Cholesky of the covariance: x = R z with z standard normal.
    let mut r = vec![vec![0.0f64; d]; d];
    for i in 0..d {
        for j in 0..=i {
            let mut s = cov[i][j];
            for k in 0..j {
                s -= r[i][k] * r[j][k];
            }
            if i == j {
                if s <= 0.0 {
                    return Err(Error::Domain("covariance not positive definite".into()));
                }
                r[i][j] = s.sqrt();
            } else {
                r[i][j] = s / r[j][j];
            }
        }
    }

    let sqrt_pi = std::f64::consts::PI.sqrt();
    let mut total = 0.0;
    let mut grid = vec![0usize; d];
    loop {
        // z_k = sqrt(2) * node
        let mut weight = 1.0;
        let mut z = vec![0.0f64; d];
        for k in 0..d {
            weight *= WEIGHTS[grid[k]] / sqrt_pi;
            z[k] = std::f64::consts::SQRT_2 * NODES[grid[k]];
        }
        let mut value = 1.0;
        for (i, &e) in exponents.exponents().iter().enumerate() {
            if e > 0 {
                let mut xi = 0.0;
                for k in 0..=i {
                    xi += r[i][k] * z[k];
                }
                value *= xi.powi(e as i32);
            }
        }
        total += weight * value;

        // Advance the tensor-product grid.
        let mut k = 0;
        loop {
            if k == d {
                return Ok(total);
            }
            grid[k] += 1;
            if grid[k] < NODES.len() {
                break;
            }
            grid[k] = 0;
            k += 1;
        }
    }
}
