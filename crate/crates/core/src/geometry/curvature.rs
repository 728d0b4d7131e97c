//! Levi-Civita curvature from metric Taylor coefficients.
//!
//! Convention: R^l_{kij} = d_i Gamma^l_{jk} - d_j Gamma^l_{ik}
//! + Gamma^l_{im} Gamma^m_{jk} - Gamma^l_{jm} Gamma^m_{ik},
//! Ric_{kj} = R^i_{kij}. The unit round sphere then has Ric(p) = (n-1) delta.

use crate::algebra::{Ratio, TruncSeries};
use crate::error::{Error, Result};
use crate::geometry::jets::{Chart, MetricJet};
use crate::linalg::QMatrix;

/// Curvature data of a metric jet at the origin.
#[derive(Clone, Debug)]
pub struct Curvature {
    /// Christoffel symbols as truncated series; index (k, i, j) with i <= j.
    pub christoffel: Vec<TruncSeries>,
    nvars: usize,
    /// Riemann tensor at the origin, layout [l][k][i][j].
    pub riemann: Vec<Ratio>,
    /// Ricci tensor at the origin.
    pub ricci: QMatrix,
}

impl Curvature {
    pub fn christoffel_symbol(&self, k: usize, i: usize, j: usize) -> &TruncSeries {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let slot = i * self.nvars - i * (i + 1) / 2 + j;
        &self.christoffel[k * self.nvars * (self.nvars + 1) / 2 + slot]
    }

    pub fn riemann_at_origin(&self, l: usize, k: usize, i: usize, j: usize) -> &Ratio {
        let n = self.nvars;
        &self.riemann[((l * n + k) * n + i) * n + j]
    }
}

/// Truncated inverse metric as a matrix of series, via the Neumann series
/// around the exact inverse of the constant part.
fn inverse_metric(g: &MetricJet) -> Result<Vec<Vec<TruncSeries>>> {
    let n = g.nvars();
    let cutoff = g.cutoff();
    let g0 = g.tensor().sym2_at_origin();
    let g0_inv = g0.inverse().map_err(|_| Error::Domain("degenerate metric constant term".into()))?;

    // h = g - g0 (min degree >= 1), m = -g0^{-1} h, inverse = (sum m^p) g0^{-1}.
    let mut h: Vec<Vec<TruncSeries>> = vec![vec![TruncSeries::zero(n, cutoff); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut s = g.component(i, j).clone();
            s.add_term(crate::algebra::MultiIndex::zero(n), -g0.get(i, j));
            h[i][j] = s;
        }
    }
    let const_mul = |m: &QMatrix, s: &Vec<Vec<TruncSeries>>| -> Result<Vec<Vec<TruncSeries>>> {
        let mut out = vec![vec![TruncSeries::zero(n, cutoff); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = TruncSeries::zero(n, cutoff);
                for k in 0..n {
                    if !m.get(i, k).is_zero() {
                        acc = acc.checked_add(&s[k][j].scalar_mul(m.get(i, k)))?;
                    }
                }
                out[i][j] = acc;
            }
        }
        Ok(out)
    };
    let series_mul = |a: &Vec<Vec<TruncSeries>>, b: &Vec<Vec<TruncSeries>>| -> Result<Vec<Vec<TruncSeries>>> {
        let mut out = vec![vec![TruncSeries::zero(n, cutoff); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = TruncSeries::zero(n, cutoff);
                for k in 0..n {
                    acc = acc.checked_add(&a[i][k].checked_mul(&b[k][j])?)?;
                }
                out[i][j] = acc;
            }
        }
        Ok(out)
    };

    let neg_g0inv = g0_inv.scalar_mul(&Ratio::from_int(-1));
    let m = const_mul(&neg_g0inv, &h)?;
    // Accumulate sum_{p>=0} m^p, then right-multiply by g0^{-1}.
    let mut total: Vec<Vec<TruncSeries>> = vec![vec![TruncSeries::zero(n, cutoff); n]; n];
    for i in 0..n {
        total[i][i] = TruncSeries::one(n, cutoff);
    }
    let mut power = {
        let mut id = vec![vec![TruncSeries::zero(n, cutoff); n]; n];
        for (i, row) in id.iter_mut().enumerate() {
            row[i] = TruncSeries::one(n, cutoff);
        }
        id
    };
    for _ in 0..cutoff {
        power = series_mul(&power, &m)?;
        if power.iter().all(|row| row.iter().all(|s| s.is_zero())) {
            break;
        }
        for i in 0..n {
            for j in 0..n {
                total[i][j] = total[i][j].checked_add(&power[i][j])?;
            }
        }
    }
    // total * g0^{-1}
    let mut out = vec![vec![TruncSeries::zero(n, cutoff); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = TruncSeries::zero(n, cutoff);
            for k in 0..n {
                if !g0_inv.get(k, j).is_zero() {
                    acc = acc.checked_add(&total[i][k].scalar_mul(g0_inv.get(k, j)))?;
                }
            }
            out[i][j] = acc;
        }
    }
    Ok(out)
}

/// Christoffel symbols, Riemann and Ricci at the origin.
pub fn curvature(g: &MetricJet) -> Result<Curvature> {
    if g.cutoff() < 2 {
        return Err(Error::Precondition(format!("curvature needs cutoff >= 2, got {}", g.cutoff())));
    }
    let n = g.nvars();
    let cutoff = g.cutoff();
    let ginv = inverse_metric(g)?;

    let sym_count = n * (n + 1) / 2;
    let mut christoffel = vec![TruncSeries::zero(n, cutoff); n * sym_count];
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let mut acc = TruncSeries::zero(n, cutoff);
                for l in 0..n {
                    let term = g
                        .component(j, l)
                        .derive(i)?
                        .checked_add(&g.component(i, l).derive(j)?)?
                        .checked_sub(&g.component(i, j).derive(l)?)?;
                    acc = acc.checked_add(&ginv[k][l].checked_mul(&term)?)?;
                }
                let slot = i * n - i * (i + 1) / 2 + j;
                christoffel[k * sym_count + slot] = acc.scalar_mul(&Ratio::new(1, 2).unwrap());
            }
        }
    }
    let gamma = |k: usize, i: usize, j: usize| -> &TruncSeries {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let slot = i * n - i * (i + 1) / 2 + j;
        &christoffel[k * sym_count + slot]
    };

    let mut riemann = vec![Ratio::zero(); n * n * n * n];
    for l in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut v = gamma(l, j, k).derive(i)?.constant_term();
                    v -= gamma(l, i, k).derive(j)?.constant_term();
                    for m in 0..n {
                        v += gamma(l, i, m).constant_term() * gamma(m, j, k).constant_term();
                        v -= gamma(l, j, m).constant_term() * gamma(m, i, k).constant_term();
                    }
                    riemann[((l * n + k) * n + i) * n + j] = v;
                }
            }
        }
    }
    let ricci = QMatrix::from_fn(n, n, |k, j| {
        let mut acc = Ratio::zero();
        for i in 0..n {
            acc += riemann[((i * n + k) * n + i) * n + j].clone();
        }
        acc
    });

    Ok(Curvature { christoffel, nvars: n, riemann, ricci })
}

/// Sum over k of g_{ij,kk}(p) for a normal-chart metric, as an exact
/// constant tensor. Also reports the measured ratio to the Ricci tensor when
/// the two are exactly proportional.
pub fn trace_second_derivatives(g: &MetricJet) -> Result<(QMatrix, Option<Ratio>)> {
    if g.chart() != Chart::Normal {
        return Err(Error::Precondition("trace_second_derivatives requires a normal chart".into()));
    }
    if g.cutoff() < 2 {
        return Err(Error::Precondition("trace_second_derivatives needs cutoff >= 2".into()));
    }
    let n = g.nvars();
    let trace = QMatrix::from_fn(n, n, |i, j| {
        let mut acc = Ratio::zero();
        for k in 0..n {
            // d_k d_k at 0 picks up 2! times the y_k^2 coefficient.
            let mut idx = crate::algebra::MultiIndex::zero(n);
            idx = idx.increment(k).increment(k);
            acc += g.component(i, j).coeff(&idx) * Ratio::from_int(2);
        }
        acc
    });
    let ricci = curvature(g)?.ricci;
    let ratio = proportionality_ratio(&trace, &ricci);
    Ok((trace, ratio))
}

/// If a = c * b entry-wise for a single rational c (b nonzero), returns c.
pub fn proportionality_ratio(a: &QMatrix, b: &QMatrix) -> Option<Ratio> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return None;
    }
    let mut c: Option<Ratio> = None;
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let (x, y) = (a.get(i, j), b.get(i, j));
            if y.is_zero() {
                if !x.is_zero() {
                    return None;
                }
                continue;
            }
            let r = x / y;
            match &c {
                None => c = Some(r),
                Some(prev) if *prev != r => return None,
                _ => {}
            }
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::sphere::{sphere_graph_metric, sphere_normal_metric};

    #[test]
    fn flat_metric_has_zero_curvature() {
        let flat = MetricJet::flat(3, 4);
        let c = curvature(&flat).unwrap();
        assert!(c.ricci.is_zero());
        assert!(c.riemann.iter().all(|v| v.is_zero()));
    }

    #[test]
    fn unit_sphere_ricci_both_charts() {
        // Unit S^2: Ric = (n-1) delta = delta in both charts.
        for n_sphere in 3..=6 {
            let want = QMatrix::identity(n_sphere - 1).scalar_mul(&Ratio::from_int(n_sphere as i64 - 2));
            let g = sphere_graph_metric(n_sphere, 4).unwrap();
            assert_eq!(curvature(&g).unwrap().ricci, want, "graph chart N={n_sphere}");
            let g = sphere_normal_metric(n_sphere, 4).unwrap();
            assert_eq!(curvature(&g).unwrap().ricci, want, "normal chart N={n_sphere}");
        }
    }

    #[test]
    fn trace_second_derivatives_sphere() {
        // Unit S^2 normal chart: -(2/3) delta, ratio -2/3.
        let g = sphere_normal_metric(3, 4).unwrap();
        let (trace, ratio) = trace_second_derivatives(&g).unwrap();
        assert_eq!(trace, QMatrix::identity(2).scalar_mul(&Ratio::new(-2, 3).unwrap()));
        assert_eq!(ratio, Some(Ratio::new(-2, 3).unwrap()));

        // Unit S^4 (N=5): -(2/3) * 3 * delta.
        let g = sphere_normal_metric(5, 4).unwrap();
        let (trace, ratio) = trace_second_derivatives(&g).unwrap();
        assert_eq!(trace, QMatrix::identity(4).scalar_mul(&Ratio::from_int(-2)));
        assert_eq!(ratio, Some(Ratio::new(-2, 3).unwrap()));
    }

    #[test]
    fn trace_second_derivatives_flat_and_chart_guard() {
        let flat = MetricJet::flat(2, 4);
        let (trace, _) = trace_second_derivatives(&flat).unwrap();
        assert!(trace.is_zero());
        let graph = sphere_graph_metric(3, 4).unwrap();
        assert!(trace_second_derivatives(&graph).is_err());
    }
}
