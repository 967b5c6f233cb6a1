//! Seeded random operators for tests, sweeps and the random similarity spec.

use nalgebra::DMatrix;
use rand::Rng;

use super::operator::{Operator, C64};

/// Random dense complex operator with entries uniform in the unit square.
pub fn random_operator<R: Rng>(dim: usize, rng: &mut R) -> Operator {
    let mat = DMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    Operator::from_matrix_unchecked(mat)
}

/// Random invertible operator with condition number exactly `kappa`
/// (singular values log-spaced on `[1/κ, 1]`, random unitary factors).
pub fn random_with_condition<R: Rng>(dim: usize, kappa: f64, rng: &mut R) -> Operator {
    assert!(kappa >= 1.0, "condition number must be at least 1");
    let q1 = random_operator(dim, rng).into_matrix().qr().q();
    let q2 = random_operator(dim, rng).into_matrix().qr().q();
    let mut d = DMatrix::<C64>::zeros(dim, dim);
    for i in 0..dim {
        let t = if dim > 1 {
            i as f64 / (dim - 1) as f64
        } else {
            0.0
        };
        d[(i, i)] = C64::new(kappa.powf(-t), 0.0);
    }
    Operator::from_matrix_unchecked(q1 * d * q2.adjoint())
}

/// Random 2x2 complex matrix resampled until its eigenvalue gap exceeds
/// `min_gap` (gap measured on the raw matrix, entries O(1)).
pub fn random_diagonalizable_2x2<R: Rng>(min_gap: f64, rng: &mut R) -> Operator {
    loop {
        let m = random_operator(2, rng);
        // Eigenvalue gap of a 2x2 from the closed form: λ± = t/2 ± sqrt(t²/4 - d).
        let t = m.trace();
        let d = m.entry(0, 0) * m.entry(1, 1) - m.entry(0, 1) * m.entry(1, 0);
        let disc = (t * t * 0.25 - d).sqrt();
        if 2.0 * disc.norm() > min_gap {
            return m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn conditioned_operator_hits_requested_kappa() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &kappa in &[1.0, 10.0, 1e3] {
            let s = random_with_condition(6, kappa, &mut rng);
            assert_abs_diff_eq!(s.condition(), kappa, epsilon = 1e-6 * kappa);
        }
    }

    #[test]
    fn seeded_generation_is_deterministic() {
        let a = random_with_condition(5, 50.0, &mut ChaCha8Rng::seed_from_u64(11));
        let b = random_with_condition(5, 50.0, &mut ChaCha8Rng::seed_from_u64(11));
        assert_eq!(a, b);
    }

    #[test]
    fn diagonalizable_2x2_respects_gap() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let m = random_diagonalizable_2x2(0.1, &mut rng);
            let eig = super::super::eig_biorthogonal(&m, &super::super::TolerancePolicy::default())
                .unwrap();
            let gap = (eig.eigenvalues[0] - eig.eigenvalues[1]).norm();
            assert!(gap > 0.1);
        }
    }
}
