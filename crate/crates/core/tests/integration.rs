//! Cross-module flows and the wire schemas exercised end to end.

use pbtk_core::dpb::{dpb_build, dpb_verify, SimilaritySpec, DEFAULT_KAPPA_MAX};
use pbtk_core::epf::{epf_system, EpfBasis};
use pbtk_core::gauss2d::GaussPoly;
use pbtk_core::numkernel::{eig_biorthogonal, random_with_condition, C64};
use pbtk_core::pseudofermion::{pf_system, pf_verify, PfPair};
use pbtk_core::{Ket, Operator, TolerancePolicy};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn tol() -> TolerancePolicy {
    TolerancePolicy::default()
}

#[test]
fn operator_wire_schema_shape() {
    let json = r#"{"dim": 2, "data": [[0.0,0.0],[1.0,0.5],[0.0,0.0],[0.0,0.0]]}"#;
    let op: Operator = serde_json::from_str(json).unwrap();
    assert_eq!(op.dim(), 2);
    assert_eq!(op.entry(0, 1), c(1.0, 0.5));
    let back = serde_json::to_value(&op).unwrap();
    assert_eq!(back["dim"], 2);
    assert_eq!(back["data"][1][1], 0.5);

    let ket: Ket = serde_json::from_str(r#"{"dim": 2, "data": [[1.0,0.0],[0.0,-1.0]]}"#).unwrap();
    assert_eq!(ket.entry(1), c(0.0, -1.0));
}

#[test]
fn epf_basis_wire_schema_round_trip() {
    let json = r#"{"M": 1, "vectors": [[[1.0,0.0],[0.0,0.0]], [[1.0,0.0],[1.0,0.0]]]}"#;
    let basis: EpfBasis = serde_json::from_str(json).unwrap();
    assert_eq!(basis.m(), 1);
    let sys = epf_system(&basis, &tol()).unwrap();
    // Hand-checked dual of this basis.
    assert!((&sys.g[0] - &Ket::from_slice(&[c(1.0, 0.0), c(-1.0, 0.0)]).unwrap()).norm() < 1e-13);
    let back = serde_json::to_string(&basis).unwrap();
    let again: EpfBasis = serde_json::from_str(&back).unwrap();
    for (u, v) in basis.vectors().iter().zip(again.vectors()) {
        assert!((u - v).norm() == 0.0);
    }
    // A singular family must be rejected at the schema boundary.
    let bad = r#"{"M": 1, "vectors": [[[1.0,0.0],[0.0,0.0]], [[2.0,0.0],[0.0,0.0]]]}"#;
    assert!(serde_json::from_str::<EpfBasis>(bad).is_err());
}

#[test]
fn gauss_poly_wire_schema_shape() {
    let json = r#"{
        "Q": [[[1.0,0.0],[0.2,0.0]],[[0.2,0.0],[1.0,0.0]]],
        "L": [[0.0,0.5],[0.0,-0.5]],
        "P": [[[2.0,0.0],[0.0,0.0]],[[0.0,1.0],[0.0,0.0]]]
    }"#;
    let s: GaussPoly = serde_json::from_str(json).unwrap();
    assert_eq!(s.q()[0][1], c(0.2, 0.0));
    assert_eq!(s.poly().coeff(1, 0), c(0.0, 1.0));
    let v = serde_json::to_value(&s).unwrap();
    assert_eq!(v["Q"][1][0][0], 0.2);
    assert_eq!(v["P"][0][0][0], 2.0);
}

#[test]
fn pf_system_serializes_with_wire_schema_fields() {
    let params = pbtk_core::pseudofermion::HeffParams::new(0.6, 1.0, 0.0).unwrap();
    let (pair, _) = pbtk_core::pseudofermion::heff_build(&params).unwrap();
    let sys = pf_system(&pair, &tol()).unwrap();
    let v = serde_json::to_value(&sys).unwrap();
    assert_eq!(v["pair"]["a"]["dim"], 2);
    assert_eq!(v["phi"][0]["dim"], 2);
    assert_eq!(v["s_phi"]["data"].as_array().unwrap().len(), 4);
}

/// The order-1 extended system is exactly a two-level ladder pair: feeding
/// its operators through the two-level machinery must verify cleanly.
#[test]
fn order_one_extended_system_is_a_valid_two_level_pair() {
    let mut rng = ChaCha8Rng::seed_from_u64(314);
    for _ in 0..20 {
        let mat = random_with_condition(2, 50.0, &mut rng);
        let h = vec![mat.column(0), mat.column(1)];
        let basis = EpfBasis::new(1, h, &tol()).unwrap();
        let esys = epf_system(&basis, &tol()).unwrap();
        let pair = PfPair::new(esys.a.clone(), esys.b.clone(), &tol()).unwrap();
        let psys = pf_system(&pair, &tol()).unwrap();
        let rep = pf_verify(&psys, &tol());
        assert!(rep.all_pass(), "{:?}", rep.failed());
    }
}

/// Spectra of the number operator are basis independent: always 0..=M.
#[test]
fn number_operator_spectra_are_basis_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(2718);
    for m in 1..=8usize {
        for trial in 0..100 {
            let mat = random_with_condition(m + 1, 100.0, &mut rng);
            let h = (0..=m).map(|k| mat.column(k)).collect();
            let basis = EpfBasis::new(m, h, &tol()).unwrap();
            let sys = epf_system(&basis, &tol()).unwrap();
            let eig = eig_biorthogonal(&sys.n_op, &TolerancePolicy::with_rtol(1e-6)).unwrap();
            for (k, lam) in eig.eigenvalues.iter().enumerate() {
                assert!(
                    (lam - c(k as f64, 0.0)).norm() < 1e-8,
                    "M={m} trial={trial}: eigenvalue {k} was {lam}"
                );
            }
        }
    }
}

/// An explicit similarity fed through the wire schema reproduces the
/// diagonal-similarity system.
#[test]
fn explicit_similarity_matches_diagonal_construction() {
    let json = r#"{"dim": 4, "data": [
        [1.0,0.0],[0.0,0.0],[0.0,0.0],[0.0,0.0],
        [0.0,0.0],[2.0,0.0],[0.0,0.0],[0.0,0.0],
        [0.0,0.0],[0.0,0.0],[1.0,0.0],[0.0,0.0],
        [0.0,0.0],[0.0,0.0],[0.0,0.0],[1.0,0.0]]}"#;
    let s: Operator = serde_json::from_str(json).unwrap();
    let via_explicit = dpb_build(
        &SimilaritySpec::Explicit { matrix: s },
        3,
        DEFAULT_KAPPA_MAX,
    )
    .unwrap();
    let via_diag = dpb_build(
        &SimilaritySpec::Diagonal {
            entries: vec![[1.0, 0.0], [2.0, 0.0], [1.0, 0.0], [1.0, 0.0]],
        },
        3,
        DEFAULT_KAPPA_MAX,
    )
    .unwrap();
    assert!((&via_explicit.theta - &via_diag.theta).spectral_norm() < 1e-15);
    assert!(dpb_verify(&via_explicit, &tol()).all_pass());
}
