//! Sparse basis rotation: turning an orthonormal eigenvector bundle into
//! nonnegative, localised cluster indicators.
//!
//! Given a matrix `V` with orthonormal columns spanning a low-eigenvalue
//! subspace, the rotation seeks a sparse matrix `S` and an orthogonal `Q`
//! minimising `½‖V − S Q‖²_F + μ‖S‖₁`. Alternating the two blocks gives a
//! descent method: for fixed `Q` the optimal unit-norm sparse columns are
//! soft-thresholded projections, and for fixed `S` the optimal rotation is
//! the polar factor of `SᵀV`. Columns of the result concentrate on the
//! near-indicator structure hidden in the eigenvector span.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Hard cap on alternating iterations.
pub const MAX_ITERS: usize = 5000;
/// Relative objective-change threshold that stops the iteration.
pub const STOP_TOL: f64 = 1e-12;

/// Outcome of the sparse rotation.
#[derive(Debug, Clone)]
pub struct SebaResult {
    /// Sparse nonnegative indicator matrix, one column per input column,
    /// each column rescaled to peak value 1 (zero columns stay zero).
    pub s: DMatrix<f64>,
    /// Final rotation.
    pub q: DMatrix<f64>,
    /// Objective value at the final iterate (before the export transform).
    pub objective: f64,
    /// Number of alternating iterations performed.
    pub iterations: usize,
    /// Objective after each iteration; nonincreasing up to roundoff.
    pub objective_trace: Vec<f64>,
}

fn soft_threshold(x: f64, mu: f64) -> f64 {
    if x > mu {
        x - mu
    } else if x < -mu {
        x + mu
    } else {
        0.0
    }
}

/// Polar factor (closest orthogonal matrix) of a square matrix via SVD.
fn polar_factor(m: &DMatrix<f64>) -> DMatrix<f64> {
    let r = m.nrows();
    let svd = nalgebra::SVD::new(m.clone(), true, true);
    let u = svd.u.expect("svd with u requested");
    let vt = svd.v_t.expect("svd with v_t requested");
    // Guard against degenerate factors from rank-deficient input: the
    // product of the computed factors is orthogonal regardless.
    let mut q = u * vt;
    // One Newton step toward orthogonality to suppress roundoff drift.
    let qtq = q.transpose() * &q;
    let correction = DMatrix::identity(r, r) * 1.5 - qtq * 0.5;
    q = q * correction;
    q
}

/// Deterministic pivot rows: greedy column-pivoted orthogonalisation of the
/// rows of `V`, returning the indices of the `r` most independent,
/// largest-residual rows. These seed the initial rotation so that each
/// output column starts anchored on a different region.
fn pivot_rows(v: &DMatrix<f64>) -> Vec<usize> {
    let (m, r) = v.shape();
    let mut residual: Vec<nalgebra::DVector<f64>> = (0..m)
        .map(|i| nalgebra::DVector::from(v.row(i).transpose()))
        .collect();
    let mut chosen = Vec::with_capacity(r);
    let mut basis: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(r);
    for _ in 0..r {
        let mut best = usize::MAX;
        let mut best_norm = -1.0;
        for (i, res) in residual.iter().enumerate() {
            if chosen.contains(&i) {
                continue;
            }
            let n = res.norm();
            if n > best_norm + 1e-15 {
                best_norm = n;
                best = i;
            }
        }
        if best == usize::MAX || best_norm <= 1e-12 {
            break;
        }
        let mut b = residual[best].clone();
        b /= b.norm();
        for res in residual.iter_mut() {
            let c = res.dot(&b);
            res.axpy(-c, &b, 1.0);
        }
        basis.push(b);
        chosen.push(best);
    }
    chosen
}

/// Rotates an orthonormal bundle into sparse nonnegative indicator columns.
///
/// `v` is `m × r` with (numerically) orthonormal columns; `mu` is the
/// sparsity penalty, defaulting to `0.99 / sqrt(m)`. The returned indicator
/// matrix is sign-fixed, clipped to nonnegative values, and column-rescaled
/// to peak 1. The iteration stops when the relative objective change drops
/// below [`STOP_TOL`] or after [`MAX_ITERS`] iterations.
pub fn seba(v: &DMatrix<f64>, mu: Option<f64>) -> Result<SebaResult> {
    let (m, r) = v.shape();
    if r == 0 || m == 0 {
        return Err(Error::invalid("input bundle must be nonempty"));
    }
    if r > m {
        return Err(Error::invalid(format!(
            "bundle has more columns ({r}) than rows ({m})"
        )));
    }
    let gram = v.transpose() * v;
    let mut gram_err = 0.0f64;
    for i in 0..r {
        for j in 0..r {
            let want = if i == j { 1.0 } else { 0.0 };
            gram_err = gram_err.max((gram[(i, j)] - want).abs());
        }
    }
    if gram_err > 1e-8 {
        return Err(Error::invalid(format!(
            "input columns are not orthonormal (deviation {gram_err:.3e})"
        )));
    }
    let mu = match mu {
        Some(x) if x > 0.0 && x.is_finite() => x,
        Some(x) => {
            return Err(Error::invalid(format!("sparsity penalty must be positive, got {x}")))
        }
        None => 0.99 / (m as f64).sqrt(),
    };

    // Initial rotation: polar factor of the submatrix of well-spread rows.
    let pivots = pivot_rows(v);
    let mut q = if pivots.len() == r {
        let mut sub = DMatrix::zeros(r, r);
        for (k, &i) in pivots.iter().enumerate() {
            for j in 0..r {
                sub[(k, j)] = v[(i, j)];
            }
        }
        polar_factor(&sub)
    } else {
        DMatrix::identity(r, r)
    };

    let mut s = DMatrix::zeros(m, r);
    let mut objective_trace = Vec::new();
    let mut prev_obj = f64::INFINITY;
    let mut iterations = 0;
    for it in 0..MAX_ITERS {
        iterations = it + 1;
        // S-step: soft-threshold V Qᵀ and renormalise each column to the
        // unit sphere (the exact minimiser of the column subproblem).
        let z = v * q.transpose();
        for c in 0..r {
            let mut norm2 = 0.0;
            for i in 0..m {
                let val = soft_threshold(z[(i, c)], mu);
                s[(i, c)] = val;
                norm2 += val * val;
            }
            if norm2 > 0.0 {
                let inv = 1.0 / norm2.sqrt();
                for i in 0..m {
                    s[(i, c)] *= inv;
                }
            }
        }
        // Q-step: polar factor of SᵀV.
        q = polar_factor(&(s.transpose() * v));

        let diff = v - &s * &q;
        let mut l1 = 0.0;
        for val in s.iter() {
            l1 += val.abs();
        }
        let obj = 0.5 * diff.norm_squared() + mu * l1;
        objective_trace.push(obj);
        if (prev_obj - obj).abs() <= STOP_TOL * prev_obj.abs().max(1.0) {
            prev_obj = obj;
            break;
        }
        prev_obj = obj;
    }

    // Export transform: make the dominant entry of each column positive,
    // clip negatives, rescale the peak to 1.
    for c in 0..r {
        let mut best = 0usize;
        let mut best_abs = -1.0;
        for i in 0..m {
            let a = s[(i, c)].abs();
            if a > best_abs {
                best_abs = a;
                best = i;
            }
        }
        if s[(best, c)] < 0.0 {
            for i in 0..m {
                s[(i, c)] = -s[(i, c)];
            }
        }
        let mut peak = 0.0f64;
        for i in 0..m {
            if s[(i, c)] < 0.0 {
                s[(i, c)] = 0.0;
            }
            peak = peak.max(s[(i, c)]);
        }
        if peak > 0.0 {
            for i in 0..m {
                s[(i, c)] /= peak;
            }
        }
    }

    Ok(SebaResult {
        s,
        q,
        objective: prev_obj,
        iterations,
        objective_trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Orthonormalised span of the indicators of {0..4} and {5..9} mixed by
    /// a rotation: the sparse rotation must recover the two blocks.
    fn mixed_indicator_bundle(angle: f64) -> DMatrix<f64> {
        let m = 10;
        let mut v = DMatrix::zeros(m, 2);
        let a = 1.0 / 5f64.sqrt();
        for i in 0..5 {
            v[(i, 0)] = a;
            v[(5 + i, 1)] = a;
        }
        let rot =
            DMatrix::from_row_slice(2, 2, &[angle.cos(), -angle.sin(), angle.sin(), angle.cos()]);
        v * rot
    }

    #[test]
    fn recovers_disjoint_indicators_from_a_rotated_basis() {
        let v = mixed_indicator_bundle(0.6);
        let r = seba(&v, None).unwrap();
        // Each column must be supported on exactly one block, at value 1.
        let mut seen_first = false;
        let mut seen_second = false;
        for c in 0..2 {
            let first: f64 = (0..5).map(|i| r.s[(i, c)]).sum();
            let second: f64 = (5..10).map(|i| r.s[(i, c)]).sum();
            if first > 4.9 && second < 1e-8 {
                seen_first = true;
            }
            if second > 4.9 && first < 1e-8 {
                seen_second = true;
            }
            for i in 0..10 {
                assert!(r.s[(i, c)] >= 0.0 && r.s[(i, c)] <= 1.0 + 1e-12);
            }
        }
        assert!(seen_first && seen_second);
    }

    #[test]
    fn objective_trace_is_nonincreasing() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let m = 40;
        let r = 3;
        // Random orthonormal bundle via Gram-Schmidt on Gaussian columns.
        let mut cols: Vec<nalgebra::DVector<f64>> = Vec::new();
        while cols.len() < r {
            let mut v = nalgebra::DVector::from_fn(m, |_, _| rng.gen_range(-1.0..1.0));
            for u in &cols {
                let c = v.dot(u);
                v.axpy(-c, u, 1.0);
            }
            let n = v.norm();
            if n > 1e-6 {
                cols.push(v / n);
            }
        }
        let mut vm = DMatrix::zeros(m, r);
        for (c, col) in cols.iter().enumerate() {
            vm.set_column(c, col);
        }
        let res = seba(&vm, None).unwrap();
        for w in res.objective_trace.windows(2) {
            assert!(
                w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0),
                "objective increased: {} -> {}",
                w[0],
                w[1]
            );
        }
        assert!(res.iterations <= MAX_ITERS);
    }

    #[test]
    fn single_column_bundle_becomes_a_clean_indicator() {
        // One orthonormal column that is already an indicator: the rotation
        // must return it with peak 1 and no sign damage.
        let m = 6;
        let mut v = DMatrix::zeros(m, 1);
        for i in 0..3 {
            v[(i, 0)] = -(1.0 / 3f64.sqrt());
        }
        let r = seba(&v, None).unwrap();
        for i in 0..3 {
            assert_abs_diff_eq!(r.s[(i, 0)], 1.0, epsilon = 1e-9);
        }
        for i in 3..6 {
            assert_abs_diff_eq!(r.s[(i, 0)], 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_non_orthonormal_input() {
        let mut v = DMatrix::zeros(4, 2);
        v[(0, 0)] = 1.0;
        v[(0, 1)] = 1.0;
        assert!(seba(&v, None).is_err());
    }

    #[test]
    fn rejects_bad_penalty() {
        let v = mixed_indicator_bundle(0.3);
        assert!(seba(&v, Some(-0.1)).is_err());
        assert!(seba(&v, Some(f64::NAN)).is_err());
    }

    #[test]
    fn rotation_stays_orthogonal() {
        let v = mixed_indicator_bundle(1.1);
        let r = seba(&v, None).unwrap();
        let qtq = r.q.transpose() * &r.q;
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(qtq[(i, j)], want, epsilon = 1e-10);
            }
        }
    }
}
