//! Deformed fermion pairs on ℂ².
//!
//! A pair of 2×2 operators `(a, b)` with `{a,b} = 1` and `a² = b² = 0`,
//! where `b` need not be `a†`, generates the whole structure built here:
//! biorthonormal vacua and excited states, non-self-adjoint number
//! operators, the metric pair `S_φ`, `S_Ψ`, and the positive similarity `T`
//! mapping the pair onto canonical fermions. [`pf_verify`] reduces every
//! identity of that structure to a residual report.

use serde::Serialize;
use thiserror::Error;

use crate::numkernel::{
    eig_biorthogonal, herm_sqrt_pair, null_space, Ket, NumError, Operator, TolerancePolicy, C64,
};
use crate::report::VerificationReport;

/// Default relative eigenvalue-gap threshold below which a 2×2 Hamiltonian
/// is treated as defective (spectrum coalescing).
pub const DEFAULT_GAP_RTOL: f64 = 1e-8;

#[derive(Debug, Clone, Error)]
pub enum PfError {
    #[error(
        "exceptional point: sqrt(|omega|^2 - delta^2) is not real positive (|omega|={omega_abs}, delta={delta})"
    )]
    ExceptionalPoint { omega_abs: f64, delta: f64 },

    #[error("invalid ladder pair: {check} residual {residual:.3e} exceeds {threshold:.3e}")]
    InvalidPair {
        check: &'static str,
        residual: f64,
        threshold: f64,
    },

    #[error("vacuum pairing is degenerate: |<phi0, psi0_raw>| = {overlap:.3e}")]
    DegeneratePairing { overlap: f64 },

    #[error("{model} parameter domain violation: {constraint}")]
    ParameterDomain {
        model: &'static str,
        constraint: String,
    },

    #[error("expected a 2x2 operator, got dimension {dim}")]
    WrongDimension { dim: usize },

    #[error(transparent)]
    Num(#[from] NumError),
}

/// Parameters of the two-level decay model: decay-rate asymmetry `delta`,
/// coupling modulus `omega_abs` and coupling phase `theta`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct HeffParams {
    pub delta: f64,
    pub omega_abs: f64,
    pub theta: f64,
}

impl HeffParams {
    pub fn new(delta: f64, omega_abs: f64, theta: f64) -> Result<Self, PfError> {
        if !(delta.is_finite() && omega_abs.is_finite() && theta.is_finite()) {
            return Err(PfError::ParameterDomain {
                model: "two-level",
                constraint: "parameters must be finite".into(),
            });
        }
        if omega_abs <= 0.0 {
            return Err(PfError::ParameterDomain {
                model: "two-level",
                constraint: format!("|omega| must be positive, got {omega_abs}"),
            });
        }
        Ok(Self {
            delta,
            omega_abs,
            theta,
        })
    }

    /// `Ω = sqrt(|ω|² − δ²)`; exists (real positive) only for `|ω| > |δ|`.
    pub fn big_omega(&self) -> Result<f64, PfError> {
        let sq = self.omega_abs * self.omega_abs - self.delta * self.delta;
        if sq <= 0.0 {
            return Err(PfError::ExceptionalPoint {
                omega_abs: self.omega_abs,
                delta: self.delta,
            });
        }
        Ok(sq.sqrt())
    }
}

/// A validated ladder pair on ℂ²: `{a,b} = 1`, `a² = b² = 0` within the
/// policy threshold (scaled by the operand size `‖a‖·‖b‖`).
#[derive(Clone, Debug, Serialize)]
pub struct PfPair {
    pub a: Operator,
    pub b: Operator,
}

impl PfPair {
    pub fn new(a: Operator, b: Operator, tol: &TolerancePolicy) -> Result<Self, PfError> {
        if a.dim() != 2 {
            return Err(PfError::WrongDimension { dim: a.dim() });
        }
        if b.dim() != 2 {
            return Err(PfError::WrongDimension { dim: b.dim() });
        }
        let pair = Self { a, b };
        pair.validate(tol)?;
        Ok(pair)
    }

    /// Residuals of the defining relations, in order:
    /// `‖{a,b} − 1‖`, `‖a²‖`, `‖b²‖`.
    pub fn relation_residuals(&self) -> [f64; 3] {
        let anti = self.a.anticommutator(&self.b);
        [
            (&anti - &Operator::identity(2)).spectral_norm(),
            (&self.a * &self.a).spectral_norm(),
            (&self.b * &self.b).spectral_norm(),
        ]
    }

    pub fn scale(&self) -> f64 {
        (self.a.spectral_norm() * self.b.spectral_norm()).max(1.0)
    }

    pub fn validate(&self, tol: &TolerancePolicy) -> Result<(), PfError> {
        let [anti, a2, b2] = self.relation_residuals();
        let threshold = tol.threshold(self.scale());
        for (check, residual) in [
            ("anticommutator-unit", anti),
            ("nilpotent-a", a2),
            ("nilpotent-b", b2),
        ] {
            if residual > threshold {
                return Err(PfError::InvalidPair {
                    check,
                    residual,
                    threshold,
                });
            }
        }
        Ok(())
    }
}

/// Complete record of the structure generated by a valid pair.
///
/// `phi`/`psi` are the biorthonormal families (`⟨φ_k, Ψ_n⟩ = δ_kn`),
/// `n_op = b·a` and `n_dag = a†·b†` the two number operators, `s_phi`/`s_psi`
/// the mutually inverse metric operators, `t = s_psi^{-1/2}` the positive
/// similarity with `a = t·c·t⁻¹`, and `e` the orthonormal reference basis
/// `e_n = s_psi^{1/2}·φ_n` in which `c` is a canonical fermion annihilator.
#[derive(Clone, Debug, Serialize)]
pub struct PfSystem {
    pub pair: PfPair,
    pub phi: [Ket; 2],
    pub psi: [Ket; 2],
    pub n_op: Operator,
    pub n_dag: Operator,
    pub s_phi: Operator,
    pub s_psi: Operator,
    pub t: Operator,
    pub t_inv: Operator,
    pub c: Operator,
    pub e: [Ket; 2],
}

/// Explicit two-level model: pair `(a, b)` and Hamiltonian.
///
/// Guarantees `H = Ω(b·a − ½·1)` to rounding. Fails at the exceptional
/// point `|ω| ≤ |δ|`, where the eigenvalues merge and the structure
/// ceases to exist.
pub fn heff_build(p: &HeffParams) -> Result<(PfPair, Operator), PfError> {
    let omega_cap = p.big_omega()?;
    let (delta, om, th) = (p.delta, p.omega_abs, p.theta);
    let phase = C64::new(0.0, th).exp();
    let i = C64::new(0.0, 1.0);
    let half_inv = C64::new(1.0 / (2.0 * omega_cap), 0.0);

    let a = Operator::from_rows(
        2,
        &[
            C64::new(-om, 0.0) * half_inv,
            -phase.conj() * (omega_cap + i * delta) * half_inv,
            phase * (omega_cap - i * delta) * half_inv,
            C64::new(om, 0.0) * half_inv,
        ],
    )?;
    let b = Operator::from_rows(
        2,
        &[
            C64::new(-om, 0.0) * half_inv,
            phase.conj() * (omega_cap - i * delta) * half_inv,
            -phase * (omega_cap + i * delta) * half_inv,
            C64::new(om, 0.0) * half_inv,
        ],
    )?;
    let omega = C64::new(om, 0.0) * phase;
    let h = Operator::from_rows(
        2,
        &[
            C64::new(0.0, -delta / 2.0),
            omega.conj() * 0.5,
            omega * 0.5,
            C64::new(0.0, delta / 2.0),
        ],
    )?;
    let pair = PfPair::new(a, b, &TolerancePolicy::default())?;
    Ok((pair, h))
}

/// Build the full system from a valid pair.
///
/// Gauge: `‖φ₀‖ = 1` with the leading component real positive, and
/// `⟨φ₀, Ψ₀⟩ = 1` exactly, pushing the remaining scale and phase into
/// `Ψ₀`. Every physical object is invariant under this choice.
pub fn pf_system(pair: &PfPair, tol: &TolerancePolicy) -> Result<PfSystem, PfError> {
    pf_system_with_phase(pair, tol, None)
}

/// Internal constructor with an explicit vacuum phase override, used to test
/// gauge invariance of the physical objects.
pub(crate) fn pf_system_with_phase(
    pair: &PfPair,
    tol: &TolerancePolicy,
    vacuum_phase: Option<f64>,
) -> Result<PfSystem, PfError> {
    pair.validate(tol)?;

    let phi0_gauged = single_kernel_vector(&pair.a, tol)?;
    let phi0 = match vacuum_phase {
        None => phi0_gauged,
        Some(theta) => phi0_gauged.scale(C64::new(0.0, theta).exp()),
    };
    let psi_raw = single_kernel_vector(&pair.b.adjoint(), tol)?;
    let overlap = phi0.inner(&psi_raw);
    if overlap.norm() < 1e3 * f64::EPSILON {
        return Err(PfError::DegeneratePairing {
            overlap: overlap.norm(),
        });
    }
    let psi0 = psi_raw.scale(overlap.inv());

    let phi1 = pair.b.apply(&phi0);
    let psi1 = pair.a.adjoint().apply(&psi0);

    let s_phi = &Operator::outer(&phi0, &phi0) + &Operator::outer(&phi1, &phi1);
    let s_psi = &Operator::outer(&psi0, &psi0) + &Operator::outer(&psi1, &psi1);

    let (s_psi_sqrt, s_psi_inv_sqrt) = herm_sqrt_pair(&s_psi, tol)?;
    let t = s_psi_inv_sqrt;
    let t_inv = s_psi_sqrt;
    let c = &(&t_inv * &pair.a) * &t;
    let e = [t_inv.apply(&phi0), t_inv.apply(&phi1)];

    let n_op = &pair.b * &pair.a;
    let n_dag = n_op.adjoint();

    Ok(PfSystem {
        pair: pair.clone(),
        phi: [phi0, phi1],
        psi: [psi0, psi1],
        n_op,
        n_dag,
        s_phi,
        s_psi,
        t,
        t_inv,
        c,
        e,
    })
}

fn single_kernel_vector(a: &Operator, tol: &TolerancePolicy) -> Result<Ket, PfError> {
    let ns = null_space(a, tol);
    match ns.len() {
        1 => Ok(ns.into_iter().next().unwrap()),
        n => Err(NumError::KernelDimension { found: n }.into()),
    }
}

/// Verify every identity of the structure; failures are report entries,
/// never errors. Thresholds scale with the size of the operands entering
/// each identity.
pub fn pf_verify(sys: &PfSystem, tol: &TolerancePolicy) -> VerificationReport {
    let mut rep = VerificationReport::new();
    let ctx = "pf";
    let a = &sys.pair.a;
    let b = &sys.pair.b;
    let id = Operator::identity(2);
    let pair_scale = sys.pair.scale();

    let [anti, a2, b2] = sys.pair.relation_residuals();
    rep.push("car-anticommutator", anti, tol.threshold(pair_scale), ctx);
    rep.push("car-nilpotent-a", a2, tol.threshold(pair_scale), ctx);
    rep.push("car-nilpotent-b", b2, tol.threshold(pair_scale), ctx);

    // Lowering action on the excited states.
    let ket_scale = |x: &Ket, y: &Ket| (x.norm() * y.norm()).max(1.0);
    rep.push(
        "lowering-a",
        (&a.apply(&sys.phi[1]) - &sys.phi[0]).norm(),
        tol.threshold(ket_scale(&sys.phi[1], &sys.phi[0]) * a.spectral_norm().max(1.0)),
        ctx,
    );
    rep.push(
        "lowering-bdag",
        (&b.adjoint().apply(&sys.psi[1]) - &sys.psi[0]).norm(),
        tol.threshold(ket_scale(&sys.psi[1], &sys.psi[0]) * b.spectral_norm().max(1.0)),
        ctx,
    );

    // Integer eigenvalues of the number pair.
    let mut num_res = 0.0f64;
    let mut num_scale = 1.0f64;
    for n in 0..2 {
        let nf = C64::new(n as f64, 0.0);
        num_res = num_res.max((&sys.n_op.apply(&sys.phi[n]) - &sys.phi[n].scale(nf)).norm());
        num_res = num_res.max((&sys.n_dag.apply(&sys.psi[n]) - &sys.psi[n].scale(nf)).norm());
        num_scale = num_scale
            .max(sys.n_op.spectral_norm() * sys.phi[n].norm())
            .max(sys.n_dag.spectral_norm() * sys.psi[n].norm());
    }
    rep.push(
        "number-op-eigenvalues",
        num_res,
        tol.threshold(num_scale),
        ctx,
    );

    // Biorthonormality of the two families.
    let mut bio = 0.0f64;
    let mut bio_scale = 1.0f64;
    for k in 0..2 {
        for n in 0..2 {
            let d = if k == n { 1.0 } else { 0.0 };
            bio = bio.max((sys.phi[k].inner(&sys.psi[n]) - C64::new(d, 0.0)).norm());
            bio_scale = bio_scale.max(sys.phi[k].norm() * sys.psi[n].norm());
        }
    }
    rep.push("biorthonormality", bio, tol.threshold(bio_scale), ctx);

    // Norm bounds on the metric operators.
    let phi_bound = sys.phi[0].norm().powi(2) + sys.phi[1].norm().powi(2);
    let psi_bound = sys.psi[0].norm().powi(2) + sys.psi[1].norm().powi(2);
    rep.push(
        "metric-norm-bound-phi",
        (sys.s_phi.spectral_norm() - phi_bound).max(0.0),
        tol.threshold(phi_bound),
        ctx,
    );
    rep.push(
        "metric-norm-bound-psi",
        (sys.s_psi.spectral_norm() - psi_bound).max(0.0),
        tol.threshold(psi_bound),
        ctx,
    );

    // Metric operators map one family onto the other and invert each other.
    let mut map_res = 0.0f64;
    let mut map_scale = 1.0f64;
    for n in 0..2 {
        map_res = map_res.max((&sys.s_phi.apply(&sys.psi[n]) - &sys.phi[n]).norm());
        map_res = map_res.max((&sys.s_psi.apply(&sys.phi[n]) - &sys.psi[n]).norm());
        map_scale = map_scale
            .max(sys.s_phi.spectral_norm() * sys.psi[n].norm())
            .max(sys.s_psi.spectral_norm() * sys.phi[n].norm());
    }
    rep.push(
        "metric-maps-families",
        map_res,
        tol.threshold(map_scale),
        ctx,
    );
    let metric_scale = (sys.s_phi.spectral_norm() * sys.s_psi.spectral_norm()).max(1.0);
    rep.push(
        "metric-inverse-pair",
        (&(&sys.s_phi * &sys.s_psi) - &id).spectral_norm(),
        tol.threshold(metric_scale),
        ctx,
    );
    rep.push(
        "metric-hermitian",
        sys.s_phi
            .hermitian_deviation()
            .max(sys.s_psi.hermitian_deviation()),
        tol.threshold(metric_scale),
        ctx,
    );

    // Intertwining between the number operators through the metrics.
    let inter_scale = (sys.s_psi.spectral_norm() * sys.n_op.spectral_norm())
        .max(sys.s_phi.spectral_norm() * sys.n_dag.spectral_norm())
        .max(1.0);
    let inter = (&(&sys.s_psi * &sys.n_op) - &(&sys.n_dag * &sys.s_psi))
        .spectral_norm()
        .max((&(&sys.s_phi * &sys.n_dag) - &(&sys.n_op * &sys.s_phi)).spectral_norm());
    rep.push(
        "intertwining-number-ops",
        inter,
        tol.threshold(inter_scale),
        ctx,
    );

    // Similarity onto canonical fermions: a = T c T^{-1}, b = T c† T^{-1},
    // with c canonical in the orthonormal reference basis.
    let sim_scale = (sys.t.spectral_norm() * sys.t_inv.spectral_norm()).max(1.0);
    let sim = (&(&(&sys.t * &sys.c) * &sys.t_inv) - a)
        .spectral_norm()
        .max((&(&(&sys.t * &sys.c.adjoint()) * &sys.t_inv) - b).spectral_norm());
    rep.push("fermion-similarity", sim, tol.threshold(sim_scale), ctx);
    let cc = (&sys.c.anticommutator(&sys.c.adjoint()) - &id)
        .spectral_norm()
        .max((&sys.c * &sys.c).spectral_norm());
    rep.push("canonical-pair", cc, tol.threshold(sim_scale), ctx);
    let n0 = &sys.c.adjoint() * &sys.c;
    rep.push(
        "number-similarity",
        (&(&(&sys.t * &n0) * &sys.t_inv) - &sys.n_op).spectral_norm(),
        tol.threshold(sim_scale * sys.n_op.spectral_norm().max(1.0)),
        ctx,
    );
    let mut e_res = 0.0f64;
    for j in 0..2 {
        for k in 0..2 {
            let d = if j == k { 1.0 } else { 0.0 };
            e_res = e_res.max((sys.e[j].inner(&sys.e[k]) - C64::new(d, 0.0)).norm());
        }
    }
    rep.push(
        "reference-basis-orthonormal",
        e_res,
        tol.threshold(sim_scale),
        ctx,
    );

    rep
}

/// Two-level model Hamiltonians covered by the ladder-pair decomposition.
#[derive(Clone, Copy, Debug, Serialize)]
pub enum TwoLevelModel {
    /// Real amplitudes with independent diagonal/off-diagonal phases.
    Dg {
        r: f64,
        s: f64,
        t: f64,
        theta: f64,
        phi: f64,
    },
    /// Two resonance energies with decay widths and a symmetric complex
    /// coupling.
    Gmm {
        eps1: f64,
        eps2: f64,
        gamma1: f64,
        gamma2: f64,
        nu0: C64,
    },
    /// Energy scale times a complex-angle traceless direction.
    Mo { e: f64, theta: C64, phi: C64 },
}

/// Build the explicit 2×2 matrix of a model, rejecting out-of-domain
/// parameters with the violated constraint named.
pub fn model_hamiltonian(model: &TwoLevelModel) -> Result<Operator, PfError> {
    match *model {
        TwoLevelModel::Dg {
            r,
            s,
            t,
            theta,
            phi,
        } => {
            for (name, v) in [("r", r), ("s", s), ("t", t)] {
                if v == 0.0 || !v.is_finite() {
                    return Err(PfError::ParameterDomain {
                        model: "dg",
                        constraint: format!("amplitude {name} must be non-zero, got {v}"),
                    });
                }
            }
            if !(theta.is_finite() && phi.is_finite()) {
                return Err(PfError::ParameterDomain {
                    model: "dg",
                    constraint: "phases must be finite".into(),
                });
            }
            let eith = C64::new(0.0, theta).exp();
            let eiph = C64::new(0.0, phi).exp();
            Ok(Operator::from_rows(
                2,
                &[
                    C64::new(r, 0.0) * eith,
                    C64::new(s, 0.0) * eiph,
                    C64::new(t, 0.0) * eiph.conj(),
                    C64::new(r, 0.0) * eith.conj(),
                ],
            )?)
        }
        TwoLevelModel::Gmm {
            eps1,
            eps2,
            gamma1,
            gamma2,
            nu0,
        } => {
            if !(gamma1 > 0.0 && gamma2 > 0.0) {
                return Err(PfError::ParameterDomain {
                    model: "gmm",
                    constraint: format!(
                        "widths must be positive, got gamma1={gamma1}, gamma2={gamma2}"
                    ),
                });
            }
            if !(eps1.is_finite() && eps2.is_finite() && nu0.re.is_finite() && nu0.im.is_finite()) {
                return Err(PfError::ParameterDomain {
                    model: "gmm",
                    constraint: "energies and coupling must be finite".into(),
                });
            }
            Ok(Operator::from_rows(
                2,
                &[C64::new(eps1, -gamma1), nu0, nu0, C64::new(eps2, -gamma2)],
            )?)
        }
        TwoLevelModel::Mo { e, theta, phi } => {
            if !e.is_finite() {
                return Err(PfError::ParameterDomain {
                    model: "mo",
                    constraint: "energy scale must be finite".into(),
                });
            }
            for (name, z) in [("theta", theta), ("phi", phi)] {
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(PfError::ParameterDomain {
                        model: "mo",
                        constraint: format!("{name} must be finite"),
                    });
                }
                if !(0.0..std::f64::consts::PI).contains(&z.re) {
                    return Err(PfError::ParameterDomain {
                        model: "mo",
                        constraint: format!("Re({name}) must lie in [0, pi), got {}", z.re),
                    });
                }
            }
            let es = C64::new(e, 0.0);
            let iphi = C64::new(0.0, 1.0) * phi;
            Ok(Operator::from_rows(
                2,
                &[
                    es * theta.cos(),
                    es * (-iphi).exp() * theta.sin(),
                    es * iphi.exp() * theta.sin(),
                    -es * theta.cos(),
                ],
            )?)
        }
    }
}

/// Decompose a diagonalizable 2×2 Hamiltonian into a ladder pair through its
/// biorthogonal eigensystem.
///
/// With eigenvalues `λ₀, λ₁` (sorted) this returns the system of
/// `a = |r₀⟩⟨l₁|`, `b = |r₁⟩⟨l₀|`, together with `Ω = λ₁ − λ₀` and
/// `γ = (λ₀ + λ₁)/2`, so that `H = Ω(b·a − ½·1) + γ·1`.
pub fn pf_from_hamiltonian(
    h: &Operator,
    tol: &TolerancePolicy,
) -> Result<(PfSystem, C64, C64), PfError> {
    pf_from_hamiltonian_with_gap(h, tol, DEFAULT_GAP_RTOL)
}

/// As [`pf_from_hamiltonian`] with an explicit relative eigenvalue-gap
/// threshold for the defectiveness test.
pub fn pf_from_hamiltonian_with_gap(
    h: &Operator,
    tol: &TolerancePolicy,
    gap_rtol: f64,
) -> Result<(PfSystem, C64, C64), PfError> {
    if h.dim() != 2 {
        return Err(PfError::WrongDimension { dim: h.dim() });
    }
    let eig = eig_biorthogonal(h, &TolerancePolicy::with_rtol(gap_rtol))?;
    let omega = eig.eigenvalues[1] - eig.eigenvalues[0];
    let gamma = (eig.eigenvalues[0] + eig.eigenvalues[1]) * 0.5;
    let a = Operator::outer(&eig.right[0], &eig.left[1]);
    let b = Operator::outer(&eig.right[1], &eig.left[0]);
    let pair = PfPair::new(a, b, tol)?;
    let sys = pf_system(&pair, tol)?;
    Ok((sys, omega, gamma))
}

/// Residual of the spectral reassembly `H = Ω(b·a − ½·1) + γ·1`, relative
/// to `‖H‖`.
pub fn hamiltonian_reassembly_residual(
    h: &Operator,
    sys: &PfSystem,
    omega: C64,
    gamma: C64,
) -> f64 {
    let id = Operator::identity(2);
    let rebuilt = &(&sys.n_op - &id.scale(C64::new(0.5, 0.0))).scale(omega) + &id.scale(gamma);
    (&rebuilt - h).spectral_norm() / h.spectral_norm().max(1e-300)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::random_diagonalizable_2x2;
    use approx::assert_abs_diff_eq;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    #[test]
    fn canonical_limit_has_adjoint_pair_and_trivial_metric() {
        let p = HeffParams::new(0.0, 1.0, 0.0).unwrap();
        let (pair, _) = heff_build(&p).unwrap();
        assert!((&pair.a * &pair.a).spectral_norm() < 1e-14);
        assert!((&pair.a.adjoint() - &pair.b).spectral_norm() < 1e-14);
        let sys = pf_system(&pair, &tol()).unwrap();
        let id = Operator::identity(2);
        assert!((&sys.s_phi - &id).spectral_norm() < 1e-13);
        assert!((&sys.s_psi - &id).spectral_norm() < 1e-13);
        for n in 0..2 {
            assert!((&sys.phi[n] - &sys.psi[n]).norm() < 1e-13);
        }
        // In the adjoint limit every identity sits at the rounding floor.
        let rep = pf_verify(&sys, &tol());
        for e in &rep.entries {
            assert!(e.residual <= 1e-14, "{}: residual {:e}", e.check, e.residual);
        }
    }

    #[test]
    fn decaying_model_spectrum_and_metric_shape() {
        // delta = 0.6, |omega| = 1: the frequency is sqrt(1 - 0.36) = 0.8 and
        // the spectrum is ±0.4.
        let p = HeffParams::new(0.6, 1.0, 0.0).unwrap();
        let (pair, h) = heff_build(&p).unwrap();
        let eig = eig_biorthogonal(&h, &tol()).unwrap();
        assert_abs_diff_eq!(eig.eigenvalues[0].re, -0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(eig.eigenvalues[1].re, 0.4, epsilon = 1e-12);
        assert!(eig.eigenvalues[0].im.abs() < 1e-12);
        assert!(eig.eigenvalues[1].im.abs() < 1e-12);

        // H = Omega(b a - 1/2).
        let rebuilt =
            (&(&pair.b * &pair.a) - &Operator::identity(2).scale(c(0.5, 0.0))).scale(c(0.8, 0.0));
        assert!((&rebuilt - &h).spectral_norm() < 1e-14);

        // Under the unit-vacuum gauge the metric is [[1, -0.6i], [0.6i, 1]].
        let sys = pf_system(&pair, &tol()).unwrap();
        assert_abs_diff_eq!(sys.s_phi.entry(0, 0).re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sys.s_phi.entry(1, 1).re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            (sys.s_phi.entry(0, 1) - c(0.0, -0.6)).norm(),
            0.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            (sys.s_phi.entry(1, 0) - c(0.0, 0.6)).norm(),
            0.0,
            epsilon = 1e-12
        );

        // Vacuum collinear with (1, -(0.8 - 0.6i))/sqrt(2).
        let expect = Ket::from_slice(&[c(1.0, 0.0), c(-0.8, 0.6)])
            .unwrap()
            .normalized();
        assert!((&sys.phi[0] - &expect).norm() < 1e-12);

        // The positive root of the dual metric squares back at 1e-12.
        let root = crate::numkernel::herm_sqrt(&sys.s_psi, &tol()).unwrap();
        assert!(
            (&(&root * &root) - &sys.s_psi).spectral_norm()
                <= 1e-12 * sys.s_psi.spectral_norm()
        );
    }

    #[test]
    fn exceptional_point_is_a_hard_error() {
        let p = HeffParams::new(1.0, 1.0, 0.0).unwrap();
        assert!(matches!(
            heff_build(&p),
            Err(PfError::ExceptionalPoint { .. })
        ));
        assert!(matches!(
            heff_build(&HeffParams::new(1.2, 1.0, 0.4).unwrap()),
            Err(PfError::ExceptionalPoint { .. })
        ));
    }

    #[test]
    fn full_verification_passes_at_tight_tolerance() {
        let p = HeffParams::new(0.6, 1.0, PI / 3.0).unwrap();
        let (pair, _) = heff_build(&p).unwrap();
        let sys = pf_system(&pair, &tol()).unwrap();
        let rep = pf_verify(&sys, &TolerancePolicy::with_rtol(1e-12));
        assert!(rep.all_pass(), "failed entries: {:?}", rep.failed());
    }

    #[test]
    fn perturbed_pair_is_flagged_by_the_report() {
        let p = HeffParams::new(0.6, 1.0, 0.0).unwrap();
        let (pair, _) = heff_build(&p).unwrap();
        let mut sys = pf_system(&pair, &tol()).unwrap();
        let mut entries = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                entries.push(sys.pair.b.entry(i, j));
            }
        }
        entries[1] += c(1e-3, 0.0);
        sys.pair.b = Operator::from_rows(2, &entries).unwrap();
        let rep = pf_verify(&sys, &tol());
        assert!(!rep.all_pass());
        let failed: Vec<&str> = rep.failed().iter().map(|e| e.check.as_str()).collect();
        assert!(
            failed.contains(&"car-anticommutator") || failed.contains(&"car-nilpotent-b"),
            "defining-relation check should fail, failed set: {failed:?}"
        );
    }

    #[test]
    fn norm_bound_holds_for_valid_pairs() {
        let p = HeffParams::new(0.6, 1.0, 0.0).unwrap();
        let (pair, _) = heff_build(&p).unwrap();
        let sys = pf_system(&pair, &tol()).unwrap();
        let bound = sys.phi[0].norm().powi(2) + sys.phi[1].norm().powi(2);
        assert!(sys.s_phi.spectral_norm() <= bound + 1e-12);
        // For this model the bound is 2 and the norm is 1.6.
        assert_abs_diff_eq!(sys.s_phi.spectral_norm(), 1.6, epsilon = 1e-12);
        assert_abs_diff_eq!(bound, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn model_matrices() {
        let h = model_hamiltonian(&TwoLevelModel::Dg {
            r: 1.0,
            s: 1.0,
            t: 1.0,
            theta: 0.0,
            phi: 0.0,
        })
        .unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!((h.entry(i, j) - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
            }
        }

        let g = model_hamiltonian(&TwoLevelModel::Gmm {
            eps1: 0.0,
            eps2: 0.0,
            gamma1: 0.5,
            gamma2: 0.5,
            nu0: c(0.3, 0.0),
        })
        .unwrap();
        assert_eq!(g.entry(0, 1), g.entry(1, 0));
        assert_eq!(g.entry(0, 0), g.entry(1, 1));
        assert_abs_diff_eq!(g.entry(0, 0).im, -0.5, epsilon = 1e-15);

        // Real angles give a Hermitian matrix with spectrum ±E.
        let m = model_hamiltonian(&TwoLevelModel::Mo {
            e: 2.0,
            theta: c(0.3, 0.0),
            phi: c(0.7, 0.0),
        })
        .unwrap();
        assert!(m.hermitian_deviation() < 1e-14);
        let eig = eig_biorthogonal(&m, &tol()).unwrap();
        assert_abs_diff_eq!(eig.eigenvalues[0].re, -2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eig.eigenvalues[1].re, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn model_domain_violations_are_named() {
        let err = model_hamiltonian(&TwoLevelModel::Dg {
            r: 0.0,
            s: 1.0,
            t: 1.0,
            theta: 0.0,
            phi: 0.0,
        })
        .unwrap_err();
        assert!(err.to_string().contains("r"));
        assert!(model_hamiltonian(&TwoLevelModel::Gmm {
            eps1: 0.0,
            eps2: 0.0,
            gamma1: -1.0,
            gamma2: 1.0,
            nu0: c(1.0, 0.0),
        })
        .is_err());
        assert!(model_hamiltonian(&TwoLevelModel::Mo {
            e: 1.0,
            theta: c(-0.1, 0.0),
            phi: c(0.0, 0.0),
        })
        .is_err());
    }

    #[test]
    fn decomposition_of_diagonal_matrix() {
        let h = Operator::diagonal(&[c(1.0, 0.0), c(3.0, 0.0)]);
        let (sys, omega, gamma) = pf_from_hamiltonian(&h, &tol()).unwrap();
        assert_abs_diff_eq!((omega - c(2.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!((gamma - c(2.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            (sys.pair.a.entry(0, 1) - c(1.0, 0.0)).norm(),
            0.0,
            epsilon = 1e-12
        );
        assert!(sys.pair.a.entry(0, 0).norm() < 1e-13);
        assert!(sys.pair.a.entry(1, 0).norm() < 1e-13);
        assert!(sys.pair.a.entry(1, 1).norm() < 1e-13);
        assert!(hamiltonian_reassembly_residual(&h, &sys, omega, gamma) < 1e-13);
    }

    #[test]
    fn decomposition_of_two_level_and_complex_angle_models() {
        let (_, h) = heff_build(&HeffParams::new(0.6, 1.0, 0.0).unwrap()).unwrap();
        let (sys, omega, gamma) = pf_from_hamiltonian(&h, &tol()).unwrap();
        assert_abs_diff_eq!((omega - c(0.8, 0.0)).norm(), 0.0, epsilon = 1e-12);
        assert!(gamma.norm() < 1e-13);
        assert!(hamiltonian_reassembly_residual(&h, &sys, omega, gamma) < 1e-12);

        let m = model_hamiltonian(&TwoLevelModel::Mo {
            e: 1.0,
            theta: c(PI / 4.0, 0.0),
            phi: c(0.0, 0.0),
        })
        .unwrap();
        let (_, omega, _) = pf_from_hamiltonian(&m, &tol()).unwrap();
        assert_abs_diff_eq!((omega - c(2.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn decomposition_rejects_exceptional_points() {
        let jordan =
            Operator::from_rows(2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(matches!(
            pf_from_hamiltonian(&jordan, &tol()),
            Err(PfError::Num(NumError::DefectiveMatrix { .. }))
        ));
    }

    #[test]
    fn random_pair_sweep_all_identities_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(20260811);
        for i in 0..500 {
            let h = random_diagonalizable_2x2(0.1, &mut rng);
            let (sys, omega, gamma) =
                pf_from_hamiltonian(&h, &tol()).unwrap_or_else(|e| panic!("case {i}: {e}"));
            let rep = pf_verify(&sys, &tol());
            assert!(
                rep.all_pass(),
                "case {i}: failed entries {:?}",
                rep.failed()
            );
            assert!(hamiltonian_reassembly_residual(&h, &sys, omega, gamma) < 1e-10);
        }
    }

    #[test]
    fn similarity_hermitizes_the_two_level_hamiltonian() {
        let (pair, h) = heff_build(&HeffParams::new(0.6, 1.0, PI / 3.0).unwrap()).unwrap();
        let sys = pf_system(&pair, &tol()).unwrap();
        // t^{-1} H t is Hermitian and equals Omega(c†c - 1/2).
        let small_h = &(&sys.t_inv * &h) * &sys.t;
        assert!(small_h.hermitian_deviation() < 1e-12);
        let expect = (&(&sys.c.adjoint() * &sys.c) - &Operator::identity(2).scale(c(0.5, 0.0)))
            .scale(c(0.8, 0.0));
        assert!((&small_h - &expect).spectral_norm() < 1e-12);
        // Isospectrality with the original.
        let eig = eig_biorthogonal(&small_h.hermitize(), &tol()).unwrap();
        assert_abs_diff_eq!(eig.eigenvalues[0].re, -0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(eig.eigenvalues[1].re, 0.4, epsilon = 1e-12);
    }

    #[test]
    fn physical_objects_are_vacuum_phase_invariant() {
        let (pair, _) = heff_build(&HeffParams::new(0.45, 1.1, 0.9).unwrap()).unwrap();
        let base = pf_system(&pair, &tol()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let theta: f64 = rand::Rng::random::<f64>(&mut rng) * 2.0 * PI;
            let alt = pf_system_with_phase(&pair, &tol(), Some(theta)).unwrap();
            let proj_base = Operator::outer(&base.phi[0], &base.psi[0]);
            let proj_alt = Operator::outer(&alt.phi[0], &alt.psi[0]);
            assert!((&proj_base - &proj_alt).spectral_norm() < 1e-12);
            assert!((&base.n_op - &alt.n_op).spectral_norm() < 1e-12);
            assert!((&base.s_phi - &alt.s_phi).spectral_norm() < 1e-12);
            assert!(
                (&(&base.s_phi * &base.s_psi) - &(&alt.s_phi * &alt.s_psi)).spectral_norm() < 1e-12
            );
        }
    }

    #[test]
    fn dimension_guard() {
        let a3 = Operator::identity(3);
        assert!(matches!(
            PfPair::new(a3.clone(), a3, &tol()),
            Err(PfError::WrongDimension { dim: 3 })
        ));
    }
}
