//! Decompositions: numerical null spaces, Hermitian square roots, and
//! biorthogonal eigendecompositions of general complex matrices.

use nalgebra::{DMatrix, DVector};

use super::operator::{canonical_phase, Ket, Operator, C64};
use super::tolerance::TolerancePolicy;
use super::NumError;

/// Orthonormal basis of the numerical null space of `a`.
///
/// Rank is decided by a relative singular-value cutoff: directions with
/// `σ ≤ τ·σ_max` count as null. Returns the empty list when `a` is
/// numerically invertible. Each basis vector carries the canonical phase
/// gauge so repeated runs produce identical output.
pub fn null_space(a: &Operator, tol: &TolerancePolicy) -> Vec<Ket> {
    let dim = a.dim();
    let svd = a.matrix().clone().svd(false, true);
    let v_t = svd.v_t.expect("svd requested with V^T");
    let sigma_max = svd.singular_values.iter().fold(0.0f64, |m, &s| m.max(s));
    let cutoff = tol.flat() * sigma_max;
    let mut basis = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= cutoff {
            // Null direction = i-th column of V = adjoint of the i-th row of V^H.
            let col: DVector<C64> = v_t.row(i).adjoint();
            basis.push(canonical_phase(&Ket::from_vector_unchecked(col)));
        }
    }
    // A zero matrix has sigma_max = 0 and the loop above catches everything;
    // otherwise pad in pathological rank-deficient cases where the SVD
    // reports fewer small values than the true corank (does not happen for
    // finite input, kept as a defensive invariant check).
    debug_assert!(basis.len() <= dim);
    basis
}

/// Singular direction attaining `σ_min`, with the singular value.
fn min_singular_vector(m: &DMatrix<C64>) -> (f64, DVector<C64>) {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("svd requested with V^T");
    let mut idx = 0;
    let mut min = f64::INFINITY;
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s < min {
            min = s;
            idx = i;
        }
    }
    (min, v_t.row(idx).adjoint())
}

/// Eigendecomposition of a Hermitian operator, eigenvalues ascending.
///
/// The input is symmetrized before decomposition; callers gate on
/// [`Operator::hermitian_deviation`] when Hermiticity is a contract.
pub fn hermitian_eigen(p: &Operator) -> (Vec<f64>, Vec<Ket>) {
    let se = p.hermitize().into_matrix().symmetric_eigen();
    let mut order: Vec<usize> = (0..se.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));
    let vals = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let vecs = order
        .iter()
        .map(|&i| {
            canonical_phase(&Ket::from_vector_unchecked(
                se.eigenvectors.column(i).into_owned(),
            ))
        })
        .collect();
    (vals, vecs)
}

/// Hermitian positive-definite square root `R` with `R·R = P`.
///
/// Rejects input that is not Hermitian within `τ·‖P‖` or whose smallest
/// eigenvalue is not above `τ·λ_max`, naming the offending eigenvalue.
pub fn herm_sqrt(p: &Operator, tol: &TolerancePolicy) -> Result<Operator, NumError> {
    herm_sqrt_pair(p, tol).map(|(r, _)| r)
}

/// `(P^{1/2}, P^{-1/2})` from a single eigendecomposition.
pub fn herm_sqrt_pair(
    p: &Operator,
    tol: &TolerancePolicy,
) -> Result<(Operator, Operator), NumError> {
    let scale = p.spectral_norm();
    let dev = p.hermitian_deviation();
    let tau = tol.flat();
    if dev > tau * scale.max(1.0) {
        return Err(NumError::NotHermitian {
            deviation: dev,
            tolerance: tau * scale.max(1.0),
        });
    }
    let (vals, vecs) = hermitian_eigen(p);
    let lambda_max = *vals.last().expect("non-empty spectrum");
    let floor = tau * lambda_max;
    if lambda_max <= 0.0 || vals[0] <= floor {
        return Err(NumError::NotPositiveDefinite {
            eigenvalue: vals[0],
            threshold: floor,
        });
    }
    let dim = p.dim();
    let mut root = DMatrix::<C64>::zeros(dim, dim);
    let mut inv_root = DMatrix::<C64>::zeros(dim, dim);
    for (lam, v) in vals.iter().zip(vecs.iter()) {
        let proj = Operator::outer(v, v);
        let s = lam.sqrt();
        root += proj.matrix() * C64::new(s, 0.0);
        inv_root += proj.matrix() * C64::new(1.0 / s, 0.0);
    }
    Ok((
        Operator::from_matrix_unchecked(root).hermitize(),
        Operator::from_matrix_unchecked(inv_root).hermitize(),
    ))
}

/// Result of [`eig_biorthogonal`].
///
/// `right[k]` and `left[k]` satisfy `A·right_k = λ_k right_k`,
/// `A†·left_k = conj(λ_k) left_k` and `⟨left_j, right_k⟩ = δ_jk`. Right
/// vectors have unit norm and canonical phase; the pairing normalization is
/// pushed entirely into the left vectors.
#[derive(Clone, Debug)]
pub struct EigBiorthogonal {
    pub eigenvalues: Vec<C64>,
    pub right: Vec<Ket>,
    pub left: Vec<Ket>,
}

/// Biorthogonal eigendecomposition of a diagonalizable complex matrix with
/// numerically distinct eigenvalues.
///
/// Eigenvalues are sorted by ascending real part, ties by ascending
/// imaginary part. Fails with [`NumError::DefectiveMatrix`] when the
/// smallest eigenvalue gap is below `τ·‖A‖` — the regime where eigenvectors
/// coalesce and the decomposition ceases to exist.
pub fn eig_biorthogonal(a: &Operator, tol: &TolerancePolicy) -> Result<EigBiorthogonal, NumError> {
    let dim = a.dim();
    let norm = a.spectral_norm();
    let (_, t) = a.matrix().clone().schur().unpack();
    let mut eigenvalues: Vec<C64> = t.diagonal().iter().copied().collect();
    eigenvalues.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));

    let gap_threshold = tol.flat() * norm.max(f64::MIN_POSITIVE);
    let mut min_gap = f64::INFINITY;
    for i in 0..dim {
        for j in (i + 1)..dim {
            min_gap = min_gap.min((eigenvalues[i] - eigenvalues[j]).norm());
        }
    }
    if dim > 1 && min_gap <= gap_threshold {
        return Err(NumError::DefectiveMatrix {
            gap: min_gap,
            threshold: gap_threshold,
        });
    }

    let adj = a.adjoint();
    let mut right = Vec::with_capacity(dim);
    let mut left = Vec::with_capacity(dim);
    for &lambda in &eigenvalues {
        let shifted = a.matrix() - DMatrix::<C64>::identity(dim, dim) * lambda;
        let (_, rv) = min_singular_vector(&shifted);
        let r = canonical_phase(&Ket::from_vector_unchecked(rv).normalized());

        let shifted_adj = adj.matrix() - DMatrix::<C64>::identity(dim, dim) * lambda.conj();
        let (_, lv) = min_singular_vector(&shifted_adj);
        let l_raw = Ket::from_vector_unchecked(lv);

        let s = l_raw.inner(&r);
        if s.norm() < 1e3 * f64::EPSILON {
            // ⟨l, r⟩ ≈ 0 happens only at (near-)defective points.
            return Err(NumError::DefectiveMatrix {
                gap: s.norm(),
                threshold: 1e3 * f64::EPSILON,
            });
        }
        let l = l_raw.scale((s.conj()).inv());
        right.push(r);
        left.push(l);
    }
    Ok(EigBiorthogonal {
        eigenvalues,
        right,
        left,
    })
}
