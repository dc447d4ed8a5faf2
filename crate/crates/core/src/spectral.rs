//! Eigensolvers and spectral structure of space-time Laplacians.
//!
//! Besides computing smallest eigenpairs, this module knows the special
//! structure of fully-present (multiplex) assemblies: the spectrum splits
//! into *spatial* eigenvectors (zero slice-mean deviation, inherited from the
//! slice graphs) and *temporal* eigenvectors (constant on each slice, lifted
//! from the coupling graph on the slice set). [`classify_multiplex`] labels a
//! computed eigenset accordingly, rotating within numerically degenerate
//! groups so that mixed bases are separated before labelling.
//!
//! For networks where vertices enter and leave, the clean splitting is lost;
//! [`identify_spatial_nonmultiplex`] scores eigenvectors by their overlap
//! with lifted temporal modes and selects those that are essentially spatial.
//!
//! Two searches locate the diffusion strength `a` at which spatial and
//! temporal connectivity balance: [`critical_a_multiplex`] equates the second
//! spatial eigenvalue with the second temporal one, and
//! [`critical_a_nonmultiplex`] balances the spatial and temporal parts of the
//! Rayleigh quotient of the first nontrivial eigenvector.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{
    build_multiplex_adjacency, build_nonmultiplex_adjacency, assemble_laplacian, TemporalNetwork,
};
use crate::supra::{MatrixKind, Part, SupraMatrix};

/// Default residual tolerance for eigensolves.
pub const DEFAULT_EIG_TOL: f64 = 1e-9;
/// Default threshold on slice-mean deviation used when labelling eigenvectors.
pub const DEFAULT_TAU_CLS: f64 = 1e-8;
/// Default threshold on temporal overlap below which an eigenvector counts as
/// spatial in the non-multiplex selection.
pub const DEFAULT_TAU_TEMP: f64 = 0.1;
/// Default bracket for the critical-strength searches.
pub const DEFAULT_BRACKET: (f64, f64) = (1e-3, 1e3);
/// Default relative tolerance for the bisection on `a`.
pub const DEFAULT_BISECT_TOL: f64 = 1e-6;
/// Default iteration cap for the bisection on `a`.
pub const DEFAULT_BISECT_MAX_ITER: usize = 60;

/// Problems larger than this switch from a dense solve to Lanczos iteration.
const DENSE_LIMIT: usize = 2000;

/// Origin of an eigenvector in the multiplex splitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    Spatial,
    Temporal,
    Unclassified,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Spatial => "spatial",
            Label::Temporal => "temporal",
            Label::Unclassified => "unclassified",
        }
    }
}

/// A batch of eigenpairs of one assembled operator, ascending by eigenvalue.
///
/// Invariants: `values` are ascending and (for Laplacian kinds) nonnegative;
/// `vectors` are unit length, mutually orthogonal, and sign-fixed so the
/// largest-magnitude entry (lowest index on ties) is positive; the residual
/// `‖L v − λ v‖ ≤ tol · max(1, λ)` holds at construction time.
#[derive(Debug, Clone)]
pub struct EigenSet {
    /// Diffusion strength of the operator the set was computed from.
    pub a: f64,
    pub values: Vec<f64>,
    pub vectors: Vec<DVector<f64>>,
    pub labels: Vec<Label>,
    /// Largest absolute entry of the operator (used to scale degeneracy
    /// thresholds when grouping eigenvalues).
    pub op_scale: f64,
}

impl EigenSet {
    pub fn k(&self) -> usize {
        self.values.len()
    }

    pub fn dim(&self) -> usize {
        self.vectors.first().map(|v| v.len()).unwrap_or(0)
    }

    /// Indices labelled spatial, in ascending eigenvalue order.
    pub fn spatial_indices(&self) -> Vec<usize> {
        (0..self.k())
            .filter(|&i| self.labels[i] == Label::Spatial)
            .collect()
    }

    pub fn temporal_indices(&self) -> Vec<usize> {
        (0..self.k())
            .filter(|&i| self.labels[i] == Label::Temporal)
            .collect()
    }

    /// Columns side by side as an `n × k` matrix.
    pub fn vector_matrix(&self) -> DMatrix<f64> {
        let n = self.dim();
        let k = self.k();
        let mut m = DMatrix::zeros(n, k);
        for (j, v) in self.vectors.iter().enumerate() {
            m.set_column(j, v);
        }
        m
    }

    /// Checks the residual and orthonormality invariants against an operator.
    pub fn validate(&self, l: &SupraMatrix, tol: f64) -> Result<()> {
        for i in 0..self.vectors.len() {
            for j in 0..=i {
                let dot = self.vectors[i].dot(&self.vectors[j]);
                let want = if i == j { 1.0 } else { 0.0 };
                if (dot - want).abs() > tol.max(1e-12) * 10.0 {
                    return Err(Error::numerical(format!(
                        "eigenvectors {j} and {i} are not orthonormal: inner product {dot:.3e}"
                    )));
                }
            }
        }
        for (i, v) in self.vectors.iter().enumerate() {
            let lam = self.values[i];
            let lv = l.matvec(v.as_slice());
            let mut r2 = 0.0;
            for (j, lvj) in lv.iter().enumerate() {
                let d = lvj - lam * v[j];
                r2 += d * d;
            }
            let budget = tol * lam.abs().max(1.0);
            if r2.sqrt() > budget {
                return Err(Error::numerical(format!(
                    "eigenpair {i} residual {:.3e} exceeds {:.3e}",
                    r2.sqrt(),
                    budget
                )));
            }
        }
        Ok(())
    }
}

/// Flips a vector in place so its largest-magnitude entry (lowest index on
/// ties) is positive.
pub(crate) fn fix_sign(v: &mut DVector<f64>) {
    let mut best = 0usize;
    let mut best_abs = v[0].abs();
    for i in 1..v.len() {
        let a = v[i].abs();
        if a > best_abs {
            best_abs = a;
            best = i;
        }
    }
    if v[best] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

/// Sorts eigenpairs ascending by value and sign-fixes each column.
fn sort_eigenpairs(values: &[f64], vectors: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap());
    let mut out_vals = Vec::with_capacity(n);
    let mut out_vecs = DMatrix::zeros(vectors.nrows(), n);
    for (pos, &idx) in order.iter().enumerate() {
        out_vals.push(values[idx]);
        let mut col = DVector::from(vectors.column(idx).clone_owned());
        fix_sign(&mut col);
        out_vecs.set_column(pos, &col);
    }
    (out_vals, out_vecs)
}

/// Cyclic Jacobi eigensolver: slower than tridiagonalisation but
/// unconditionally robust — the accumulated rotations are orthogonal by
/// construction and eigenvalue/eigenvector alignment cannot drift, which
/// matters for (near-)diagonal inputs where faster algorithms misbehave.
fn jacobi_eigs_sorted(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let mut a = m.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let frob = m.norm();
    let stop = (f64::EPSILON * frob.max(1e-300)).powi(2);
    for _ in 0..100 {
        let mut off2 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off2 += a[(p, q)] * a[(p, q)];
            }
        }
        if off2 <= stop {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = c * aip - s * aiq;
                    a[(i, q)] = s * aip + c * aiq;
                }
                for i in 0..n {
                    let api = a[(p, i)];
                    let aqi = a[(q, i)];
                    a[(p, i)] = c * api - s * aqi;
                    a[(q, i)] = s * api + c * aqi;
                }
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = c * vip - s * viq;
                    v[(i, q)] = s * vip + c * viq;
                }
            }
        }
    }
    let values: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    sort_eigenpairs(&values, &v)
}

/// Size up to which the Jacobi solver is used directly.
const JACOBI_LIMIT: usize = 100;

/// All eigenpairs of a dense symmetric matrix, ascending, sign-fixed columns.
///
/// Small matrices go straight to the Jacobi solver. Larger ones use the fast
/// tridiagonalisation-based solver, whose output is then verified column by
/// column (it can misalign eigenvectors on reducible inputs); any defect
/// triggers a Jacobi recomputation, trading time for correctness.
pub fn symmetric_eigs_dense(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if n <= JACOBI_LIMIT {
        return jacobi_eigs_sorted(m);
    }
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    let vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let (values, vectors) = sort_eigenpairs(&vals, &eig.eigenvectors);
    let tol = 1e-10 * m.amax().max(1.0) * (n as f64).sqrt();
    let mv = m * &vectors;
    for i in 0..n {
        let resid = (mv.column(i) - values[i] * vectors.column(i)).norm();
        if resid > tol {
            return jacobi_eigs_sorted(m);
        }
    }
    (values, vectors)
}

/// Rayleigh–Ritz extraction on the span of `vecs`: diagonalises the projected
/// operator and rotates the basis, which cleans up mixing between vectors of
/// (numerically) equal eigenvalue. The input basis is re-orthonormalised
/// first; dense solvers can return slightly skewed vectors inside clustered
/// eigenvalue groups, and the projection step needs a true orthonormal frame.
fn rayleigh_ritz(l: &SupraMatrix, vecs: &[DVector<f64>]) -> (Vec<f64>, Vec<DVector<f64>>) {
    let k = vecs.len();
    let n = l.dim();
    let mut vecs: Vec<DVector<f64>> = vecs.to_vec();
    for i in 0..k {
        let mut v = vecs[i].clone();
        for _ in 0..2 {
            orthogonalize(&mut v, &vecs[..i]);
        }
        let norm = v.norm();
        if norm > 0.0 {
            v /= norm;
        }
        vecs[i] = v;
    }
    let lv: Vec<Vec<f64>> = vecs.iter().map(|v| l.matvec(v.as_slice())).collect();
    let mut b = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let mut s = 0.0;
            for r in 0..n {
                s += vecs[i][r] * lv[j][r];
            }
            b[(i, j)] = s;
            b[(j, i)] = s;
        }
    }
    let (vals, rot) = symmetric_eigs_dense(&b);
    let mut out = Vec::with_capacity(k);
    for c in 0..k {
        let mut v = DVector::zeros(n);
        for i in 0..k {
            let w = rot[(i, c)];
            if w != 0.0 {
                v.axpy(w, &vecs[i], 1.0);
            }
        }
        let norm = v.norm();
        if norm > 0.0 {
            v /= norm;
        }
        fix_sign(&mut v);
        out.push(v);
    }
    (vals, out)
}

/// Computes the `k` smallest eigenpairs of an assembled symmetric operator.
///
/// Small problems are solved densely; larger ones run Lanczos iteration with
/// full reorthogonalisation, restarting with deflation so that repeated
/// eigenvalues are resolved copy by copy. Each returned pair satisfies
/// `‖L v − λ v‖ ≤ tol · max(1, λ)`; failure to reach that accuracy is an
/// error, never a silently degraded result.
pub fn smallest_eigenpairs(l: &SupraMatrix, k: usize, tol: f64) -> Result<EigenSet> {
    let n = l.dim();
    if k == 0 || k > n {
        return Err(Error::invalid(format!(
            "requested {k} eigenpairs from a dimension-{n} operator"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("eigensolver tolerance must be positive"));
    }
    let scale = l.max_abs();
    let (_, raw_vectors) = if n <= DENSE_LIMIT {
        dense_smallest(l, k)
    } else {
        lanczos_smallest(l, k, tol)?
    };

    // Rayleigh–Ritz polish: optimal extraction from the computed span.
    let (mut values, vectors) = rayleigh_ritz(l, &raw_vectors);

    // Laplacians are positive semidefinite; snap roundoff-level negatives.
    if l.kind() != MatrixKind::Adjacency {
        let neg_tol = 1e3 * f64::EPSILON * (n as f64).sqrt() * scale.max(1.0);
        for v in values.iter_mut() {
            if *v < 0.0 {
                if *v < -neg_tol {
                    return Err(Error::numerical(format!(
                        "laplacian produced negative eigenvalue {v:.3e}"
                    )));
                }
                *v = 0.0;
            }
        }
    }

    let es = EigenSet {
        a: l.a(),
        values,
        vectors,
        labels: vec![Label::Unclassified; k],
        op_scale: scale,
    };

    es.validate(l, tol)?;
    Ok(es)
}

/// Widens a requested residual tolerance to what is attainable in floating
/// point for an operator of the given scale: backward-stable solvers cannot
/// push residuals below roughly `eps * ‖L‖`, so near-kernel pairs of very
/// large operators (e.g. assemblies at extreme diffusion strength) need the
/// budget to grow with the operator norm.
pub fn scale_aware_tol(tol: f64, l: &SupraMatrix) -> f64 {
    tol.max(1e3 * f64::EPSILON * l.max_abs().max(1.0))
}

fn dense_smallest(l: &SupraMatrix, k: usize) -> (Vec<f64>, Vec<DVector<f64>>) {
    let (vals, vecs) = symmetric_eigs_dense(&l.to_dense());
    let values = vals[..k].to_vec();
    let vectors = (0..k).map(|i| DVector::from(vecs.column(i).clone_owned())).collect();
    (values, vectors)
}

/// Lanczos with full reorthogonalisation and deflated restarts.
fn lanczos_smallest(l: &SupraMatrix, k: usize, tol: f64) -> Result<(Vec<f64>, Vec<DVector<f64>>)> {
    let n = l.dim();
    let mut converged_vals: Vec<f64> = Vec::new();
    let mut converged_vecs: Vec<DVector<f64>> = Vec::new();
    let max_restarts = k + 2;
    let mut restart = 0usize;
    while converged_vals.len() < k {
        if restart >= max_restarts {
            return Err(Error::numerical(format!(
                "lanczos found only {} of {k} eigenpairs after {max_restarts} deflated restarts",
                converged_vals.len()
            )));
        }
        let want = k - converged_vals.len();
        let mut m = (2 * want + 40).min(n - converged_vecs.len()).max(2);
        let mut grown = 0usize;
        loop {
            let (vals, vecs) =
                lanczos_pass(l, want, m, tol, restart as u64, &converged_vecs)?;
            if !vals.is_empty() {
                converged_vals.extend(vals);
                converged_vecs.extend(vecs);
                break;
            }
            if grown >= 4 || m >= (n - converged_vecs.len()).min(600) {
                // Give the restart loop a chance with a fresh start vector.
                break;
            }
            m = (2 * m).min((n - converged_vecs.len()).min(600));
            grown += 1;
        }
        restart += 1;
    }
    let mut order: Vec<usize> = (0..converged_vals.len()).collect();
    order.sort_by(|&i, &j| converged_vals[i].partial_cmp(&converged_vals[j]).unwrap());
    let values: Vec<f64> = order.iter().take(k).map(|&i| converged_vals[i]).collect();
    let vectors: Vec<DVector<f64>> = order
        .iter()
        .take(k)
        .map(|&i| converged_vecs[i].clone())
        .collect();
    Ok((values, vectors))
}

/// Single Lanczos factorisation deflated against `avoid`; returns pairs whose
/// true residual meets the budget.
fn lanczos_pass(
    l: &SupraMatrix,
    want: usize,
    m: usize,
    tol: f64,
    seed_salt: u64,
    avoid: &[DVector<f64>],
) -> Result<(Vec<f64>, Vec<DVector<f64>>)> {
    let n = l.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0x51AC_0001 ^ seed_salt.wrapping_mul(0x9E37_79B9));
    let mut v0 = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
    orthogonalize(&mut v0, avoid);
    let norm = v0.norm();
    if norm < 1e-12 {
        return Err(Error::numerical("lanczos start vector vanished under deflation"));
    }
    v0 /= norm;

    let mut basis: Vec<DVector<f64>> = vec![v0];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    for j in 0..m {
        let vj = basis[j].clone();
        let mut w = DVector::from(l.matvec(vj.as_slice()));
        if j > 0 {
            w.axpy(-beta[j - 1], &basis[j - 1], 1.0);
        }
        let a_j = w.dot(&vj);
        alpha.push(a_j);
        w.axpy(-a_j, &vj, 1.0);
        // Full reorthogonalisation, twice, against basis and deflated space.
        for _ in 0..2 {
            orthogonalize(&mut w, &basis);
            orthogonalize(&mut w, avoid);
        }
        let b_j = w.norm();
        if j + 1 == m {
            beta.push(b_j);
            break;
        }
        if b_j < 1e-12 * l.max_abs().max(1.0) {
            // Invariant subspace exhausted: restart direction randomly.
            let mut fresh = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
            for _ in 0..2 {
                orthogonalize(&mut fresh, &basis);
                orthogonalize(&mut fresh, avoid);
            }
            let fnorm = fresh.norm();
            if fnorm < 1e-12 {
                beta.push(0.0);
                break;
            }
            beta.push(0.0);
            basis.push(fresh / fnorm);
            continue;
        }
        beta.push(b_j);
        basis.push(w / b_j);
    }

    let steps = alpha.len();
    let mut t = DMatrix::zeros(steps, steps);
    for i in 0..steps {
        t[(i, i)] = alpha[i];
        if i + 1 < steps {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let (tvals, tvecs) = symmetric_eigs_dense(&t);
    let mut out_vals = Vec::new();
    let mut out_vecs: Vec<DVector<f64>> = Vec::new();
    for i in 0..steps.min(want + 3) {
        let lam = tvals[i];
        let mut x = DVector::zeros(n);
        for (j, b) in basis.iter().enumerate().take(steps) {
            x.axpy(tvecs[(j, i)], b, 1.0);
        }
        // Deflation and roundoff can leave a component in the found space.
        orthogonalize(&mut x, avoid);
        orthogonalize(&mut x, &out_vecs);
        let norm = x.norm();
        if norm < 1e-8 {
            continue;
        }
        x /= norm;
        let lx = l.matvec(x.as_slice());
        let rq: f64 = x.iter().zip(&lx).map(|(a, b)| a * b).sum();
        let mut r2 = 0.0;
        for j in 0..n {
            let d = lx[j] - rq * x[j];
            r2 += d * d;
        }
        if r2.sqrt() <= tol * rq.abs().max(1.0) {
            fix_sign(&mut x);
            out_vals.push(lam);
            out_vecs.push(x);
            if out_vals.len() == want {
                break;
            }
        }
    }
    Ok((out_vals, out_vecs))
}

fn orthogonalize(w: &mut DVector<f64>, against: &[DVector<f64>]) {
    for u in against {
        let c = w.dot(u);
        if c != 0.0 {
            w.axpy(-c, u, 1.0);
        }
    }
}

/// Outcome counts of a classification pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassifyCounts {
    pub spatial: usize,
    pub temporal: usize,
    pub unclassified: usize,
}

/// Squared norm of the projection onto lifted nonconstant slice-mean profiles,
/// together with the projection itself laid out on the multiplex frame.
fn slice_mean_component(v: &DVector<f64>, n: usize, t_count: usize) -> (f64, Vec<f64>) {
    let mut means = vec![0.0; t_count];
    for t in 0..t_count {
        let mut s = 0.0;
        for x in 0..n {
            s += v[t * n + x];
        }
        means[t] = s / n as f64;
    }
    let grand: f64 = means.iter().sum::<f64>() / t_count as f64;
    let mut norm2 = 0.0;
    for m in means.iter_mut() {
        *m -= grand;
        norm2 += n as f64 * *m * *m;
    }
    (norm2, means)
}

/// Labels each eigenvector of a fully-present assembly as spatial (slice
/// means all equal), temporal (constant on each slice, varying across
/// slices), or unclassified.
///
/// Numerically degenerate eigenvalue groups are first rotated so that the
/// subspace splits cleanly: within each group the basis is aligned with its
/// projection onto the lifted slice-mean space via an SVD, after which each
/// vector is either almost entirely inside that space or almost entirely
/// outside it. Vectors of the eigenset are updated in place by this rotation
/// (which stays inside the numerical eigenspace).
pub fn classify_multiplex(
    es: &mut EigenSet,
    n: usize,
    t_count: usize,
    tau: f64,
) -> Result<ClassifyCounts> {
    if es.dim() != n * t_count {
        return Err(Error::invalid(format!(
            "eigenvector dimension {} does not match {n} vertices x {t_count} slices",
            es.dim()
        )));
    }
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::invalid("classification threshold must lie in (0, 1)"));
    }
    let k = es.k();
    let scale = es.op_scale;
    let group_tol = |lam: f64| -> f64 {
        (1e-8 * lam.abs().max(1.0)).max(1e4 * f64::EPSILON * scale.max(1.0))
    };

    let mut start = 0usize;
    while start < k {
        let mut end = start + 1;
        while end < k && es.values[end] - es.values[end - 1] <= group_tol(es.values[end]) {
            end += 1;
        }
        let g = end - start;
        if g > 1 {
            // Rotate the group so each basis vector is aligned with or
            // orthogonal to the lifted slice-mean space.
            let mut proj = DMatrix::zeros(n * t_count, g);
            for (c, i) in (start..end).enumerate() {
                let (_, means) = slice_mean_component(&es.vectors[i], n, t_count);
                for t in 0..t_count {
                    for x in 0..n {
                        proj[(t * n + x, c)] = means[t];
                    }
                }
            }
            let svd = nalgebra::SVD::new(proj, false, true);
            let vt = svd.v_t.expect("svd requested right singular vectors");
            let old: Vec<DVector<f64>> = es.vectors[start..end].to_vec();
            for c in 0..g {
                let mut v = DVector::zeros(n * t_count);
                for (r, o) in old.iter().enumerate() {
                    // Column c of V is row c of V^T.
                    v.axpy(vt[(c, r)], o, 1.0);
                }
                let norm = v.norm();
                if norm > 0.0 {
                    v /= norm;
                }
                fix_sign(&mut v);
                es.vectors[start + c] = v;
            }
        }
        for i in start..end {
            let (p2, _) = slice_mean_component(&es.vectors[i], n, t_count);
            es.labels[i] = if p2 <= tau {
                Label::Spatial
            } else if 1.0 - p2 <= tau {
                Label::Temporal
            } else {
                Label::Unclassified
            };
        }
        start = end;
    }
    Ok(ClassifyCounts {
        spatial: es.labels.iter().filter(|&&l| l == Label::Spatial).count(),
        temporal: es.labels.iter().filter(|&&l| l == Label::Temporal).count(),
        unclassified: es
            .labels
            .iter()
            .filter(|&&l| l == Label::Unclassified)
            .count(),
    })
}

/// Laplacian of the path graph on `t` slices (the chain coupling).
pub fn chain_laplacian(t: usize) -> DMatrix<f64> {
    let mut l = DMatrix::zeros(t, t);
    for i in 0..t.saturating_sub(1) {
        l[(i, i)] += 1.0;
        l[(i + 1, i + 1)] += 1.0;
        l[(i, i + 1)] -= 1.0;
        l[(i + 1, i)] -= 1.0;
    }
    l
}

/// Laplacian of a network's temporal coupling graph on the slice set.
pub fn temporal_laplacian(net: &TemporalNetwork) -> DMatrix<f64> {
    let w = net.temporal_matrix();
    let t = w.nrows();
    let mut l = DMatrix::zeros(t, t);
    for i in 0..t {
        let d: f64 = w.row(i).sum();
        l[(i, i)] = d;
        for j in 0..t {
            if i != j {
                l[(i, j)] = -w[(i, j)];
            }
        }
    }
    l
}

/// Smallest nonzero eigenvalue of the temporal coupling Laplacian.
fn second_temporal_eigenvalue(net: &TemporalNetwork) -> Result<f64> {
    let lp = temporal_laplacian(net);
    let (vals, _) = symmetric_eigs_dense(&lp);
    let sigma2 = vals.get(1).copied().unwrap_or(0.0);
    if sigma2 <= 1e-12 {
        return Err(Error::numerical(
            "temporal coupling graph is disconnected; no balance point exists",
        ));
    }
    Ok(sigma2)
}

/// Second spatial eigenvalue of the fully-present assembly at strength `a`.
fn second_spatial_eigenvalue(net: &TemporalNetwork, a: f64, eig_tol: f64) -> Result<f64> {
    let n_total = net.n() * net.t_count();
    let w = build_multiplex_adjacency(net, a)?;
    let l = assemble_laplacian(&w, false)?;
    let eig_tol = scale_aware_tol(eig_tol, &l);
    let mut k = (net.t_count() + 3).min(n_total);
    loop {
        let mut es = smallest_eigenpairs(&l, k, eig_tol)?;
        classify_multiplex(&mut es, net.n(), net.t_count(), DEFAULT_TAU_CLS)?;
        let spatial: Vec<f64> = es
            .spatial_indices()
            .iter()
            .map(|&i| es.values[i])
            .collect();
        if spatial.len() >= 2 {
            return Ok(spatial[1]);
        }
        if k == n_total {
            return Err(Error::numerical(
                "could not locate two spatial eigenvalues in the full spectrum",
            ));
        }
        k = (2 * k).min(n_total);
    }
}

/// Finds the diffusion strength at which the second spatial eigenvalue of a
/// fully-present assembly meets the second temporal one.
///
/// The difference is positive for small `a` (temporal connectivity still
/// weak) and negative for large `a`; a geometric bisection locates the
/// crossing. Returns 0 when `T = 1` or when the network has no spatial
/// connectivity to balance.
pub fn critical_a_multiplex(
    net: &TemporalNetwork,
    bracket: (f64, f64),
    bisect_tol: f64,
    max_iter: usize,
    eig_tol: f64,
) -> Result<f64> {
    if !net.is_fully_present() {
        return Err(Error::invalid(
            "spectral balance point requires a fully-present network",
        ));
    }
    if net.t_count() == 1 {
        return Ok(0.0);
    }
    let (blo, bhi) = bracket;
    if !(blo > 0.0 && bhi > blo) {
        return Err(Error::invalid("bracket must satisfy 0 < lo < hi"));
    }
    let sigma2 = second_temporal_eigenvalue(net)?;
    // With spatially disconnected slices the second spatial eigenvalue is 0
    // at every strength, so it never exceeds the temporal one: the balance
    // point degenerates to 0. The time-averaged Laplacian detects this (its
    // second eigenvalue is the large-strength limit of the spatial family).
    let ld = crate::graph::dynamic_laplacian(net)?;
    let ld_gap = if ld.dim() >= 2 {
        smallest_eigenpairs(&ld, 2, scale_aware_tol(eig_tol, &ld))?.values[1]
    } else {
        0.0
    };
    if ld_gap <= 1e-12 * ld.max_abs().max(1.0) {
        return Ok(0.0);
    }
    let g = |a: f64| -> Result<f64> {
        Ok(second_spatial_eigenvalue(net, a, eig_tol)? - a * a * sigma2)
    };

    let mut lo = blo;
    let mut glo = g(lo)?;
    while glo <= 0.0 && lo > 1e-9 {
        lo /= 10.0;
        glo = g(lo)?;
    }
    if glo <= 0.0 {
        // Spatial connectivity never dominates: the balance point is at 0.
        return Ok(0.0);
    }
    let mut hi = bhi;
    let mut ghi = g(hi)?;
    while ghi > 0.0 && hi < 1e9 {
        hi *= 10.0;
        ghi = g(hi)?;
    }
    if ghi > 0.0 {
        return Err(Error::numerical(
            "no sign change of the spectral balance within the expanded bracket",
        ));
    }

    for _ in 0..max_iter {
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= bisect_tol * mid {
            break;
        }
    }
    Ok((lo * hi).sqrt())
}

/// Result of scoring eigenvectors against lifted temporal modes.
#[derive(Debug, Clone)]
pub struct SpatialSelection {
    /// Indices into the eigenset chosen as spatial, ascending by eigenvalue.
    pub indices: Vec<usize>,
    /// Peak absolute overlap with any lifted temporal mode, per eigenvector.
    pub m_values: Vec<f64>,
    /// False when fewer than the requested number qualified.
    pub satisfied: bool,
}

/// Unit-normalised lifts of the chain modes onto the present-copies frame:
/// mode `j` takes the value of the `j`-th nonconstant path-graph eigenvector
/// at slice `t` on every vertex copy in slice `t`.
fn lifted_temporal_modes(net: &TemporalNetwork) -> Vec<Vec<f64>> {
    let t_count = net.t_count();
    let map = net.nonmultiplex_index_map();
    let n_prime = map.len();
    let (_, chain_vecs) = symmetric_eigs_dense(&chain_laplacian(t_count));
    let mut modes = Vec::new();
    for j in 1..t_count {
        let mut lift = vec![0.0; n_prime];
        let mut norm2 = 0.0;
        for t in 0..t_count {
            let val = chain_vecs[(t, j)];
            for idx in map.slice_range(t) {
                lift[idx] = val;
                norm2 += val * val;
            }
        }
        if norm2 > 0.0 {
            let inv = 1.0 / norm2.sqrt();
            for v in lift.iter_mut() {
                *v *= inv;
            }
        }
        modes.push(lift);
    }
    modes
}

/// Selects up to `r` spatial eigenvectors of a present-copies assembly by
/// rejecting those with a large overlap with any lifted temporal mode.
///
/// Eigenvectors are scanned in ascending eigenvalue order, skipping the
/// trivial first one; an eigenvector qualifies when its peak temporal overlap
/// is below `tau_temp`. `satisfied` reports whether `r` qualifiers were found
/// among the computed pairs.
pub fn identify_spatial_nonmultiplex(
    es: &EigenSet,
    net: &TemporalNetwork,
    r: usize,
    tau_temp: f64,
) -> Result<SpatialSelection> {
    let map = net.nonmultiplex_index_map();
    if es.dim() != map.len() {
        return Err(Error::invalid(format!(
            "eigenvector dimension {} does not match {} present vertex copies",
            es.dim(),
            map.len()
        )));
    }
    if !(tau_temp > 0.0 && tau_temp < 1.0) {
        return Err(Error::invalid("temporal overlap threshold must lie in (0, 1)"));
    }
    let modes = lifted_temporal_modes(net);
    let mut m_values = Vec::with_capacity(es.k());
    for v in &es.vectors {
        let mut m = 0.0f64;
        for mode in &modes {
            let mut dot = 0.0;
            for (i, &mv) in mode.iter().enumerate() {
                dot += mv * v[i];
            }
            m = m.max(dot.abs());
        }
        m_values.push(m);
    }
    let mut indices = Vec::new();
    for k in 1..es.k() {
        if indices.len() == r {
            break;
        }
        if m_values[k] < tau_temp {
            indices.push(k);
        }
    }
    let satisfied = indices.len() == r;
    Ok(SpatialSelection {
        indices,
        m_values,
        satisfied,
    })
}

/// Finds the diffusion strength at which the first nontrivial eigenvector
/// splits its energy evenly between spatial and temporal edges.
///
/// The balance function is the spatial minus the temporal part of the
/// Rayleigh quotient of `F_2`; it is negative for small `a` (the eigenvector
/// rides the weak temporal coupling) and positive for large `a`. The returned
/// strength is the geometric-bisection root. Works on any network with the
/// chain coupling, including fully-present ones.
pub fn critical_a_nonmultiplex(
    net: &TemporalNetwork,
    bracket: (f64, f64),
    bisect_tol: f64,
    max_iter: usize,
    eig_tol: f64,
) -> Result<f64> {
    if net.t_count() == 1 {
        return Ok(0.0);
    }
    let (blo, bhi) = bracket;
    if !(blo > 0.0 && bhi > blo) {
        return Err(Error::invalid("bracket must satisfy 0 < lo < hi"));
    }
    // Balance = spatial energy minus temporal energy of F_2, using the
    // a^2-scaled weights as assembled.
    let g = |a: f64| -> Result<(f64, f64)> {
        let w = build_nonmultiplex_adjacency(net, a)?;
        let l = assemble_laplacian(&w, false)?;
        let es = smallest_eigenpairs(&l, 2.min(l.dim()), scale_aware_tol(eig_tol, &l))?;
        if es.k() < 2 {
            return Err(Error::invalid(
                "network has a single vertex copy; no balance point exists",
            ));
        }
        let lam2 = es.values[1];
        if lam2 <= 1e-10 * es.op_scale.max(1.0) {
            return Err(Error::numerical(
                "space-time graph is disconnected; no balance point exists",
            ));
        }
        let f2 = es.vectors[1].as_slice();
        let s = l.quad_form_part(Part::Spatial, f2);
        let t = l.quad_form_part(Part::Temporal, f2);
        Ok((s - t, t))
    };

    let mut lo = blo;
    let (mut glo, _) = g(lo)?;
    while glo > 0.0 && lo > 1e-9 {
        lo /= 10.0;
        glo = g(lo)?.0;
    }
    if glo > 0.0 {
        return Err(Error::numerical(
            "spatial energy dominates at arbitrarily small strength; no balance point",
        ));
    }
    let mut hi = bhi;
    let (mut ghi, _) = g(hi)?;
    while ghi <= 0.0 && hi < 1e9 {
        hi *= 10.0;
        ghi = g(hi)?.0;
    }
    if ghi <= 0.0 {
        // Temporal energy dominates at every strength (e.g. no spatial
        // edges): the balance point degenerates to 0.
        return Ok(0.0);
    }

    let mut best = (lo * hi).sqrt();
    for _ in 0..max_iter {
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        best = mid;
        let (gm, tm) = g(mid)?;
        if gm <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= bisect_tol * mid && gm.abs() <= 1e-6 * tm.max(1e-300) {
            break;
        }
        if hi - lo <= f64::EPSILON * mid {
            break;
        }
    }
    Ok(best)
}
