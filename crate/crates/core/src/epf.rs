//! Extended ladder pairs on an arbitrary basis of an (M+1)-dimensional space.
//!
//! Given any linearly independent family `h_0, …, h_M`, the pair defined by
//! `a·h_k = √k·h_{k-1}` and `b·h_k = √(k+1)·h_{k+1}` (with `b·h_M = 0`)
//! reproduces the two-level ladder algebra at `M = 1` and, for larger `M`,
//! keeps the whole functional structure — dual family, integer-spectrum
//! number operators, metric pair, Hermitization — while the anticommutator
//! `{a, b}` becomes the diagonal `(1, 3, 5, …, 2M−1, M)` in the `(g, h)`
//! pairing instead of the identity.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numkernel::{herm_sqrt_pair, null_space, Ket, NumError, Operator, TolerancePolicy, C64};
use crate::report::VerificationReport;

/// Condition number of the basis matrix above which metric identities are
/// expected to degrade; crossing it produces a report warning, not an error.
pub const CONDITION_WARN: f64 = 1e6;

#[derive(Debug, Clone, Error)]
pub enum EpfError {
    #[error("basis is numerically singular (sigma_min/sigma_max = {ratio:.3e})")]
    SingularBasis { ratio: f64 },

    #[error("basis must contain M+1 = {expected} vectors of dimension {expected}, got {got}")]
    BasisShape { expected: usize, got: usize },

    #[error(
        "dual constructions disagree: max entry difference {difference:.3e} exceeds {threshold:.3e}"
    )]
    DualMethodMismatch { difference: f64, threshold: f64 },

    #[error(transparent)]
    Num(#[from] NumError),
}

/// A linearly independent family spanning ℂ^{M+1}.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "EpfBasisRepr", into = "EpfBasisRepr")]
pub struct EpfBasis {
    m: usize,
    h: Vec<Ket>,
}

/// Wire schema: {"M": m, "vectors": [[[re,im],…],…]}.
#[derive(Serialize, Deserialize)]
struct EpfBasisRepr {
    #[serde(rename = "M")]
    m: usize,
    vectors: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<EpfBasisRepr> for EpfBasis {
    type Error = String;
    fn try_from(r: EpfBasisRepr) -> Result<Self, String> {
        let kets = r
            .vectors
            .iter()
            .map(|v| {
                let entries: Vec<C64> = v.iter().map(|&[re, im]| C64::new(re, im)).collect();
                Ket::from_slice(&entries).map_err(|e| e.to_string())
            })
            .collect::<Result<Vec<_>, _>>()?;
        EpfBasis::new(r.m, kets, &TolerancePolicy::default()).map_err(|e| e.to_string())
    }
}

impl From<EpfBasis> for EpfBasisRepr {
    fn from(b: EpfBasis) -> Self {
        EpfBasisRepr {
            m: b.m,
            vectors: b
                .h
                .iter()
                .map(|k| k.vector().iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

impl EpfBasis {
    /// Validate shape and numerical invertibility of the column matrix.
    pub fn new(m: usize, h: Vec<Ket>, tol: &TolerancePolicy) -> Result<Self, EpfError> {
        let dim = m + 1;
        if h.len() != dim || h.iter().any(|k| k.dim() != dim) {
            return Err(EpfError::BasisShape {
                expected: dim,
                got: h.len(),
            });
        }
        let basis = Self { m, h };
        let mat = basis.column_matrix();
        let cond = mat.condition();
        if !cond.is_finite() || 1.0 / cond <= tol.flat() {
            return Err(EpfError::SingularBasis { ratio: 1.0 / cond });
        }
        Ok(basis)
    }

    /// Standard orthonormal basis of ℂ^{M+1}.
    pub fn standard(m: usize) -> Self {
        Self {
            m,
            h: (0..=m).map(|k| Ket::basis(m + 1, k)).collect(),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn vectors(&self) -> &[Ket] {
        &self.h
    }

    /// Matrix whose k-th column is `h_k`.
    pub fn column_matrix(&self) -> Operator {
        Operator::from_columns(&self.h).expect("validated shape")
    }

    pub fn condition(&self) -> f64 {
        self.column_matrix().condition()
    }
}

/// Full record of the extended ladder structure on a basis.
#[derive(Clone, Debug, Serialize)]
pub struct EpfSystem {
    pub basis: EpfBasis,
    /// Dual family, `⟨g_j, h_k⟩ = δ_jk`.
    pub g: Vec<Ket>,
    pub a: Operator,
    pub b: Operator,
    /// `N = b·a`, diagonal with spectrum `0..=M` in the `(g, h)` pairing.
    pub n_op: Operator,
    /// `Σ_k |h_k⟩⟨h_k|`.
    pub sh: Operator,
    /// `Σ_k |g_k⟩⟨g_k|`, inverse of `sh`.
    pub sg: Operator,
    /// Self-adjoint number operator `sg^{1/2}·N·sh^{1/2}`.
    pub n_sa: Operator,
    /// Orthonormal family `c_k = sg^{1/2}·h_k`.
    pub c: Vec<Ket>,
    /// Diagonal of `{a, b}` in the `(g, h)` pairing.
    pub alpha: Vec<f64>,
    /// Condition number of the basis matrix.
    pub kappa: f64,
}

/// Dual family by adjoint-inverse of the column matrix (the conditioning-
/// preferred route), cross-checked against the iterative construction:
/// `g_0 ⊥ span{h_1, …, h_M}` normalized to `⟨g_0, h_0⟩ = 1`, then
/// `g_k = a†·g_{k-1}/√k`.
pub fn epf_dual(basis: &EpfBasis, tol: &TolerancePolicy) -> Result<Vec<Ket>, EpfError> {
    let direct = dual_adjoint_inverse(basis)?;
    let iterated = dual_iterated(basis, &direct, tol)?;
    let kappa = basis.condition();
    let threshold = 10.0 * tol.threshold(kappa);
    let mut diff = 0.0f64;
    for (d, i) in direct.iter().zip(iterated.iter()) {
        diff = diff.max((d - i).norm() / d.norm().max(1.0));
    }
    if diff > threshold {
        return Err(EpfError::DualMethodMismatch {
            difference: diff,
            threshold,
        });
    }
    Ok(direct)
}

fn dual_adjoint_inverse(basis: &EpfBasis) -> Result<Vec<Ket>, EpfError> {
    let hmat = basis.column_matrix();
    let inv = hmat.try_inverse().map_err(|_| EpfError::SingularBasis {
        ratio: 1.0 / hmat.condition(),
    })?;
    let g_mat = inv.adjoint();
    Ok((0..=basis.m).map(|k| g_mat.column(k)).collect())
}

fn dual_iterated(
    basis: &EpfBasis,
    direct: &[Ket],
    tol: &TolerancePolicy,
) -> Result<Vec<Ket>, EpfError> {
    let dim = basis.m + 1;
    // g_0 spans the orthogonal complement of {h_1, …, h_M}: the kernel of
    // the matrix whose leading rows are the adjoints of those vectors.
    let mut rows = Vec::with_capacity(dim * dim);
    for j in 1..dim {
        let hj = &basis.h[j];
        for i in 0..dim {
            rows.push(hj.entry(i).conj());
        }
    }
    for _ in 0..dim {
        rows.push(C64::new(0.0, 0.0));
    }
    let constraint = Operator::from_rows(dim, &rows)?;
    let kernel = null_space(&constraint, tol);
    if kernel.len() != 1 {
        return Err(NumError::KernelDimension {
            found: kernel.len(),
        }
        .into());
    }
    let u = &kernel[0];
    let pairing = u.inner(&basis.h[0]);
    if pairing.norm() < 1e3 * f64::EPSILON {
        return Err(EpfError::SingularBasis {
            ratio: pairing.norm(),
        });
    }
    let g0 = u.scale(pairing.conj().inv());

    // The raising operator in the iteration is assembled from the direct
    // dual; the iteration itself provides the independent arithmetic path.
    let (a, _) = ladder_from_dual(basis, direct);
    let a_dag = a.adjoint();
    let mut g = vec![g0];
    for k in 1..dim {
        let prev = &g[k - 1];
        g.push(
            a_dag
                .apply(prev)
                .scale(C64::new(1.0 / (k as f64).sqrt(), 0.0)),
        );
    }
    Ok(g)
}

fn ladder_from_dual(basis: &EpfBasis, g: &[Ket]) -> (Operator, Operator) {
    let dim = basis.m + 1;
    let mut a = Operator::zeros(dim);
    let mut b = Operator::zeros(dim);
    for (k, gk) in g.iter().enumerate().skip(1) {
        a = &a + &Operator::outer(&basis.h[k - 1], gk).scale(C64::new((k as f64).sqrt(), 0.0));
    }
    for (k, gk) in g.iter().enumerate().take(basis.m) {
        b = &b
            + &Operator::outer(&basis.h[k + 1], gk)
                .scale(C64::new(((k + 1) as f64).sqrt(), 0.0));
    }
    (a, b)
}

/// Lowering/raising pair `(a, b)` for the basis: `a = Σ √k |h_{k-1}⟩⟨g_k|`,
/// `b = Σ √(k+1) |h_{k+1}⟩⟨g_k|`.
pub fn epf_ladder(
    basis: &EpfBasis,
    tol: &TolerancePolicy,
) -> Result<(Operator, Operator), EpfError> {
    let g = epf_dual(basis, tol)?;
    Ok(ladder_from_dual(basis, &g))
}

/// Assemble the complete system on a basis.
pub fn epf_system(basis: &EpfBasis, tol: &TolerancePolicy) -> Result<EpfSystem, EpfError> {
    let g = epf_dual(basis, tol)?;
    let (a, b) = ladder_from_dual(basis, &g);
    let n_op = &b * &a;
    let dim = basis.m + 1;

    let mut sh = Operator::zeros(dim);
    let mut sg = Operator::zeros(dim);
    for (hk, gk) in basis.h.iter().zip(g.iter()) {
        sh = &sh + &Operator::outer(hk, hk);
        sg = &sg + &Operator::outer(gk, gk);
    }

    // The metric pair has condition kappa(basis)^2; the positivity floor for
    // its square roots must sit at the rounding noise level, not at the
    // report tolerance, or legitimately stiff bases (which only warn) would
    // be rejected here.
    let sqrt_floor = TolerancePolicy::with_rtol(64.0 * f64::EPSILON);
    let (sg_sqrt, _) = herm_sqrt_pair(&sg, &sqrt_floor)?;
    let (sh_sqrt, _) = herm_sqrt_pair(&sh, &sqrt_floor)?;
    let n_sa = (&(&sg_sqrt * &n_op) * &sh_sqrt).hermitize();
    let c = (0..dim).map(|k| sg_sqrt.apply(&basis.h[k])).collect();

    let anti = anticommutator_pairing(basis, &a, &b)?;
    let alpha = (0..dim).map(|k| anti.entry(k, k).re).collect();
    let kappa = basis.condition();

    Ok(EpfSystem {
        basis: basis.clone(),
        g,
        a,
        b,
        n_op,
        sh,
        sg,
        n_sa,
        c,
        alpha,
        kappa,
    })
}

/// Coordinate matrix of an operator in the basis: `(H⁻¹ X H)_{jk}`, which
/// equals the dual pairing `⟨g_j, X h_k⟩`. Computed by LU solves against
/// the exact basis columns so rounding scales with the condition number
/// once, not squared (pairing directly against the dual vectors loses a
/// second factor of κ to cancellation).
fn coordinate_matrix(basis: &EpfBasis, x: &Operator) -> Result<Operator, EpfError> {
    let hmat = basis.column_matrix();
    let lu = hmat.matrix().clone().lu();
    let rhs = x.matrix() * hmat.matrix();
    let sol = lu.solve(&rhs).ok_or(EpfError::SingularBasis {
        ratio: 1.0 / hmat.condition(),
    })?;
    Ok(Operator::from_matrix_unchecked(sol))
}

/// `{a, b}` expressed in the dual pairing `⟨g_j, {a,b} h_k⟩`.
pub fn anticommutator_pairing(
    basis: &EpfBasis,
    a: &Operator,
    b: &Operator,
) -> Result<Operator, EpfError> {
    let ta = coordinate_matrix(basis, a)?;
    let tb = coordinate_matrix(basis, b)?;
    Ok(ta.anticommutator(&tb))
}

/// Diagonal of `{a, b}` in the `(g, h)` pairing.
///
/// The closed law `α_k = 2k+1` for `k < M` and `α_M = M` is verified by
/// [`epf_verify`]; this accessor just extracts the coefficients.
pub fn epf_anticommutator(sys: &EpfSystem) -> Vec<f64> {
    sys.alpha.clone()
}

/// Expected anticommutator diagonal for order `M`.
pub fn expected_alpha(m: usize) -> Vec<f64> {
    if m == 0 {
        // Single-mode space: a = b = 0, so the diagonal is just 0.
        return vec![0.0];
    }
    let mut v: Vec<f64> = (0..m).map(|k| (2 * k + 1) as f64).collect();
    v.push(m as f64);
    v
}

/// Verify every identity of the extended structure. Conditioning above
/// [`CONDITION_WARN`] adds an informational entry rather than failing.
pub fn epf_verify(sys: &EpfSystem, tol: &TolerancePolicy) -> VerificationReport {
    let mut rep = VerificationReport::new();
    let m = sys.basis.m();
    let dim = m + 1;
    let ctx = format!("epf M={m} kappa={:.3e}", sys.kappa);
    let ctx = ctx.as_str();
    let kappa = sys.kappa.max(1.0);
    let id = Operator::identity(dim);

    if kappa > CONDITION_WARN {
        rep.push_info("basis-conditioning-warning", kappa, ctx);
    }

    // Biorthonormality of the dual pairing.
    let mut bio = 0.0f64;
    for j in 0..dim {
        for k in 0..dim {
            let d = if j == k { 1.0 } else { 0.0 };
            bio = bio.max((sys.g[j].inner(&sys.basis.vectors()[k]) - C64::new(d, 0.0)).norm());
        }
    }
    rep.push("dual-biorthonormality", bio, tol.threshold(kappa), ctx);

    // Ladder action on the basis and on the dual family.
    let mut ladder = 0.0f64;
    for k in 0..dim {
        let hk = &sys.basis.vectors()[k];
        let want_a = if k == 0 {
            Ket::zeros(dim)
        } else {
            sys.basis.vectors()[k - 1].scale(C64::new((k as f64).sqrt(), 0.0))
        };
        ladder = ladder.max((&sys.a.apply(hk) - &want_a).norm());
        let want_b = if k == m {
            Ket::zeros(dim)
        } else {
            sys.basis.vectors()[k + 1].scale(C64::new(((k + 1) as f64).sqrt(), 0.0))
        };
        ladder = ladder.max((&sys.b.apply(hk) - &want_b).norm());
    }
    rep.push("ladder-action", ladder, tol.threshold(kappa), ctx);

    // Nilpotency at order M+1.
    let nil = sys
        .a
        .pow(dim)
        .spectral_norm()
        .max(sys.b.pow(dim).spectral_norm());
    let nil_scale = kappa * sys.a.spectral_norm().powi(dim as i32).max(1.0);
    rep.push("nilpotency-order", nil, tol.threshold(nil_scale), ctx);

    // Integer spectrum of the number pair on both families.
    let mut num = 0.0f64;
    for k in 0..dim {
        let kf = C64::new(k as f64, 0.0);
        num = num.max(
            (&sys.n_op.apply(&sys.basis.vectors()[k]) - &sys.basis.vectors()[k].scale(kf)).norm(),
        );
        num = num.max((&sys.n_op.adjoint().apply(&sys.g[k]) - &sys.g[k].scale(kf)).norm());
    }
    rep.push(
        "number-op-eigenvalues",
        num,
        tol.threshold(kappa * kappa * dim as f64),
        ctx,
    );

    // Metric pair: mutual inverses, Hermitian, mapping h <-> g, intertwining.
    let metric_scale = (sys.sh.spectral_norm() * sys.sg.spectral_norm()).max(1.0);
    rep.push(
        "metric-inverse-pair",
        (&(&sys.sh * &sys.sg) - &id).spectral_norm(),
        tol.threshold(metric_scale),
        ctx,
    );
    rep.push(
        "metric-hermitian",
        sys.sh
            .hermitian_deviation()
            .max(sys.sg.hermitian_deviation()),
        tol.threshold(metric_scale),
        ctx,
    );
    let mut maps = 0.0f64;
    for k in 0..dim {
        maps = maps.max((&sys.sh.apply(&sys.g[k]) - &sys.basis.vectors()[k]).norm());
        maps = maps.max((&sys.sg.apply(&sys.basis.vectors()[k]) - &sys.g[k]).norm());
    }
    rep.push(
        "metric-maps-families",
        maps,
        tol.threshold(metric_scale),
        ctx,
    );
    let inter = (&(&sys.sg * &sys.n_op) - &(&sys.n_op.adjoint() * &sys.sg))
        .spectral_norm()
        .max((&(&sys.n_op * &sys.sh) - &(&sys.sh * &sys.n_op.adjoint())).spectral_norm());
    rep.push(
        "intertwining-number-ops",
        inter,
        tol.threshold(metric_scale * sys.n_op.spectral_norm().max(1.0)),
        ctx,
    );

    // Resolution of the identity in the dual pairing.
    let mut res = Operator::zeros(dim);
    for k in 0..dim {
        res = &res + &Operator::outer(&sys.g[k], &sys.basis.vectors()[k]);
    }
    rep.push(
        "dual-resolution-identity",
        (&res - &id).spectral_norm(),
        tol.threshold(kappa),
        ctx,
    );

    // Hermitized number operator and its orthonormal eigenfamily.
    rep.push(
        "hermitized-number-selfadjoint",
        sys.n_sa.hermitian_deviation(),
        tol.threshold(kappa * kappa * dim as f64),
        ctx,
    );
    let mut herm_eig = 0.0f64;
    let mut c_on = 0.0f64;
    for j in 0..dim {
        herm_eig = herm_eig
            .max((&sys.n_sa.apply(&sys.c[j]) - &sys.c[j].scale(C64::new(j as f64, 0.0))).norm());
        for k in 0..dim {
            let d = if j == k { 1.0 } else { 0.0 };
            c_on = c_on.max((sys.c[j].inner(&sys.c[k]) - C64::new(d, 0.0)).norm());
        }
    }
    rep.push(
        "hermitized-number-eigenvalues",
        herm_eig,
        tol.threshold(kappa * kappa * dim as f64),
        ctx,
    );
    rep.push(
        "hermitized-basis-orthonormal",
        c_on,
        tol.threshold(kappa),
        ctx,
    );

    // Anticommutator diagonal law and vanishing cross terms, measured in
    // the dual pairing.
    let expect = expected_alpha(m);
    let mut alpha_res = 0.0f64;
    for (got, want) in sys.alpha.iter().zip(expect.iter()) {
        alpha_res = alpha_res.max((got - want).abs());
    }
    let anti_scale = kappa * dim as f64;
    match anticommutator_pairing(&sys.basis, &sys.a, &sys.b) {
        Ok(anti) => {
            let mut imag_part = 0.0f64;
            let mut off = 0.0f64;
            for j in 0..dim {
                for k in 0..dim {
                    let v = anti.entry(j, k);
                    if j == k {
                        imag_part = imag_part.max(v.im.abs());
                    } else {
                        off = off.max(v.norm());
                    }
                }
            }
            rep.push(
                "anticommutator-diagonal-law",
                alpha_res.max(imag_part),
                tol.threshold(anti_scale),
                ctx,
            );
            rep.push(
                "anticommutator-offdiagonal",
                off,
                tol.threshold(anti_scale),
                ctx,
            );
        }
        Err(_) => {
            rep.push("anticommutator-diagonal-law", f64::INFINITY, 0.0, ctx);
        }
    }

    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{eig_biorthogonal, random_with_condition};
    use approx::assert_abs_diff_eq;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn random_basis(m: usize, kappa: f64, rng: &mut ChaCha8Rng) -> EpfBasis {
        let mat = random_with_condition(m + 1, kappa, rng);
        let h = (0..=m).map(|k| mat.column(k)).collect();
        EpfBasis::new(m, h, &tol()).unwrap()
    }

    #[test]
    fn standard_basis_order_one_is_canonical_pair() {
        let basis = EpfBasis::standard(1);
        let (a, b) = epf_ladder(&basis, &tol()).unwrap();
        assert_abs_diff_eq!((a.entry(0, 1) - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-14);
        assert!(a.entry(0, 0).norm() < 1e-14);
        assert!(a.entry(1, 0).norm() < 1e-14);
        assert!(a.entry(1, 1).norm() < 1e-14);
        assert!((&b - &a.adjoint()).spectral_norm() < 1e-14);
        let anti = a.anticommutator(&b);
        assert!((&anti - &Operator::identity(2)).spectral_norm() < 1e-14);
    }

    #[test]
    fn standard_basis_order_two_is_truncated_boson_ladder() {
        let basis = EpfBasis::standard(2);
        let (a, _) = epf_ladder(&basis, &tol()).unwrap();
        assert_abs_diff_eq!((a.entry(0, 1) - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            (a.entry(1, 2) - c(2.0f64.sqrt(), 0.0)).norm(),
            0.0,
            epsilon = 1e-14
        );
        for (i, j) in [(0, 0), (0, 2), (1, 0), (1, 1), (2, 0), (2, 1), (2, 2)] {
            assert!(a.entry(i, j).norm() < 1e-14, "({i},{j}) should vanish");
        }
    }

    #[test]
    fn random_basis_cubes_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let basis = random_basis(2, 20.0, &mut rng);
        let (a, b) = epf_ladder(&basis, &tol()).unwrap();
        assert!(a.pow(3).spectral_norm() < 1e-12);
        assert!(b.pow(3).spectral_norm() < 1e-12);
    }

    #[test]
    fn dual_of_hand_checked_basis() {
        let h0 = Ket::from_slice(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let h1 = Ket::from_slice(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let basis = EpfBasis::new(1, vec![h0, h1], &tol()).unwrap();
        let g = epf_dual(&basis, &tol()).unwrap();
        assert!((&g[0] - &Ket::from_slice(&[c(1.0, 0.0), c(-1.0, 0.0)]).unwrap()).norm() < 1e-13);
        assert!((&g[1] - &Ket::from_slice(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap()).norm() < 1e-13);
    }

    #[test]
    fn dual_of_orthonormal_basis_is_itself() {
        let basis = EpfBasis::standard(3);
        let g = epf_dual(&basis, &tol()).unwrap();
        for (gk, hk) in g.iter().zip(basis.vectors()) {
            assert!((gk - hk).norm() < 1e-13);
        }
    }

    #[test]
    fn orthonormal_order_one_reduces_to_plain_fermions() {
        let sys = epf_system(&EpfBasis::standard(1), &tol()).unwrap();
        let id = Operator::identity(2);
        assert!((&sys.sh - &id).spectral_norm() < 1e-14);
        assert!((&sys.sg - &id).spectral_norm() < 1e-14);
        assert!((&sys.b - &sys.a.adjoint()).spectral_norm() < 1e-14);
        assert!(epf_verify(&sys, &tol()).all_pass());
    }

    #[test]
    fn dual_methods_agree_on_random_bases() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let basis = random_basis(4, 100.0, &mut rng);
            // epf_dual errors out internally if the two routes disagree.
            let g = epf_dual(&basis, &tol()).unwrap();
            for (j, gj) in g.iter().enumerate() {
                for (k, hk) in basis.vectors().iter().enumerate() {
                    let d = if j == k { 1.0 } else { 0.0 };
                    assert!((gj.inner(hk) - c(d, 0.0)).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn single_mode_degenerate_case() {
        let h0 = Ket::from_slice(&[c(2.0, 0.0)]).unwrap();
        let basis = EpfBasis::new(0, vec![h0], &tol()).unwrap();
        let sys = epf_system(&basis, &tol()).unwrap();
        // g_0 = h_0 / ||h_0||^2 and the ladder operators vanish.
        assert_abs_diff_eq!(
            (sys.g[0].entry(0) - c(0.5, 0.0)).norm(),
            0.0,
            epsilon = 1e-14
        );
        assert!(sys.a.spectral_norm() < 1e-15);
        assert!(sys.b.spectral_norm() < 1e-15);
        assert!(epf_verify(&sys, &tol()).all_pass());
    }

    #[test]
    fn singular_basis_rejected() {
        let h0 = Ket::from_slice(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let h1 = Ket::from_slice(&[c(2.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(matches!(
            EpfBasis::new(1, vec![h0, h1], &tol()),
            Err(EpfError::SingularBasis { .. })
        ));
    }

    #[test]
    fn alpha_tables_for_small_orders() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for (m, expect) in [
            (1usize, vec![1.0, 1.0]),
            (2, vec![1.0, 3.0, 2.0]),
            (3, vec![1.0, 3.0, 5.0, 3.0]),
        ] {
            let sys = epf_system(&random_basis(m, 50.0, &mut rng), &tol()).unwrap();
            assert_eq!(sys.alpha.len(), expect.len());
            for (got, want) in sys.alpha.iter().zip(expect.iter()) {
                assert_abs_diff_eq!(got, want, epsilon = 1e-10);
            }
            assert_eq!(expected_alpha(m), expect);
        }
    }

    #[test]
    fn order_one_is_the_only_identity_anticommutator() {
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        for m in 1..=6 {
            let sys = epf_system(&random_basis(m, 30.0, &mut rng), &tol()).unwrap();
            let anti = sys.a.anticommutator(&sys.b);
            let dev = (&anti - &Operator::identity(m + 1)).spectral_norm();
            if m == 1 {
                assert!(dev < 1e-12, "order 1 must reproduce the identity");
            } else {
                assert!(dev > 0.5, "order {m} must deviate from the identity");
            }
        }
    }

    #[test]
    fn full_verification_on_random_bases() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for m in [1usize, 3, 5] {
            let sys = epf_system(&random_basis(m, 200.0, &mut rng), &tol()).unwrap();
            let rep = epf_verify(&sys, &tol());
            assert!(rep.all_pass(), "M={m}: {:?}", rep.failed());
        }
    }

    #[test]
    fn spectra_are_basis_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for m in 1..=8 {
            for _ in 0..12 {
                let sys = epf_system(&random_basis(m, 100.0, &mut rng), &tol()).unwrap();
                let eig = eig_biorthogonal(&sys.n_op, &TolerancePolicy::with_rtol(1e-6)).unwrap();
                for (k, lam) in eig.eigenvalues.iter().enumerate() {
                    assert!(
                        (lam - c(k as f64, 0.0)).norm() < 1e-8,
                        "M={m}: eigenvalue {k} was {lam}"
                    );
                }
            }
        }
    }

    #[test]
    fn duality_is_involutive() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let basis = random_basis(4, 100.0, &mut rng);
        let g = epf_dual(&basis, &tol()).unwrap();
        let dual_basis = EpfBasis::new(4, g, &tol()).unwrap();
        let back = epf_dual(&dual_basis, &tol()).unwrap();
        for (orig, round) in basis.vectors().iter().zip(back.iter()) {
            assert!(
                (orig - round).norm() < 1e-10 * orig.norm().max(1.0),
                "dual of dual must return the original family"
            );
        }
    }

    #[test]
    fn conditioning_warning_is_informational() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let basis = random_basis(3, 3e6, &mut rng);
        let sys = epf_system(&basis, &tol()).unwrap();
        let rep = epf_verify(&sys, &tol());
        assert!(rep
            .entries
            .iter()
            .any(|e| e.check == "basis-conditioning-warning" && e.pass));
    }
}
