//! Gauss–Legendre nodes and the Poisson tail function used to pick
//! quadrature radii.

use nalgebra::DMatrix;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// computed from the symmetric tridiagonal Jacobi matrix (Golub–Welsch).
/// Exact for polynomials of degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "quadrature order must be positive");
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let kf = k as f64;
        let beta = kf / (4.0 * kf * kf - 1.0).sqrt();
        jac[(k - 1, k)] = beta;
        jac[(k, k - 1)] = beta;
    }
    let se = jac.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let node = se.eigenvalues[i];
            let w = 2.0 * se.eigenvectors[(0, i)].powi(2);
            (node, w)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    (
        x.iter().map(|&t| mid + half * t).collect(),
        w.iter().map(|&wi| wi * half).collect(),
    )
}

/// `P(Poisson(x) <= k)`: the regularized upper incomplete gamma
/// `Γ(k+1, x)/k!` for integer shape, evaluated by direct term recursion.
pub fn poisson_cdf(k: usize, x: f64) -> f64 {
    assert!(x >= 0.0);
    let mut term = (-x).exp();
    let mut sum = term;
    for j in 1..=k {
        term *= x / j as f64;
        sum += term;
    }
    sum.min(1.0)
}

/// Smallest radius `R` such that `Γ(n_max+1, R²)/n_max! < target`; the
/// truncation-tail rule for choosing the resolution-of-identity radius.
pub fn tail_radius(n_max: usize, target: f64) -> f64 {
    assert!(target > 0.0 && target < 1.0);
    let mut lo = (n_max as f64).sqrt().max(1.0);
    let mut hi = lo;
    while poisson_cdf(n_max, hi * hi) >= target {
        hi *= 1.5;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if poisson_cdf(n_max, mid * mid) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn low_order_rules_match_known_nodes() {
        let (x, w) = gauss_legendre(2);
        let v = 1.0 / 3.0f64.sqrt();
        assert_abs_diff_eq!(x[0], -v, epsilon = 1e-14);
        assert_abs_diff_eq!(x[1], v, epsilon = 1e-14);
        assert_abs_diff_eq!(w[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(w[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn integrates_polynomials_exactly() {
        // Degree 2n-1 exactness: x^7 + x^4 on [-1, 1] with n = 4.
        let (x, w) = gauss_legendre(4);
        let got: f64 = x
            .iter()
            .zip(&w)
            .map(|(&t, &wi)| wi * (t.powi(7) + t.powi(4)))
            .sum();
        assert_abs_diff_eq!(got, 2.0 / 5.0, epsilon = 1e-14);
    }

    #[test]
    fn gaussian_moment_on_interval() {
        // ∫_0^6 e^{-r^2} r^3 dr = (1 - e^{-36}(36 + 1))/2... closed form:
        // (1 - e^{-R^2}(R^2 + 1)) / 2.
        let (r, w) = gauss_legendre_on(80, 0.0, 6.0);
        let got: f64 = r
            .iter()
            .zip(&w)
            .map(|(&t, &wi)| wi * (-t * t).exp() * t.powi(3))
            .sum();
        let want = 0.5 * (1.0 - (-36.0f64).exp() * 37.0);
        assert_abs_diff_eq!(got, want, epsilon = 1e-14);
    }

    #[test]
    fn poisson_tail_matches_direct_sums() {
        assert_abs_diff_eq!(poisson_cdf(0, 2.0), (-2.0f64).exp(), epsilon = 1e-15);
        // k = 2, x = 3: e^{-3}(1 + 3 + 4.5).
        assert_abs_diff_eq!(poisson_cdf(2, 3.0), (-3.0f64).exp() * 8.5, epsilon = 1e-15);
        assert!(poisson_cdf(10, 36.0) < 4e-7);
        assert!(poisson_cdf(10, 36.0) > 2e-7);
    }

    #[test]
    fn tail_radius_meets_target_and_is_minimal() {
        let r = tail_radius(10, 1e-10);
        assert!(poisson_cdf(10, r * r) < 1e-10);
        assert!(poisson_cdf(10, (r - 1e-3) * (r - 1e-3)) >= 1e-10 * 0.5);
        assert!(r > 6.0 && r < 8.0, "radius {r} outside the expected window");
    }
}
