//! Inner products of polynomial-times-Gaussian states.
//!
//! Two independent routes are provided and cross-checked by the test
//! suites: a closed form through complex Gaussian moments (complete the
//! square, then the two-variable moment recursion over the inverse of the
//! combined quadratic form), and plain tensor-product quadrature on a box.

use super::state::GaussPoly;
use super::GaussError;
use crate::numkernel::{gauss_legendre_on, C64};

/// `∫_{ℝ²} conj(f)·g` by closed-form Gaussian moments.
///
/// Requires the combined quadratic form `A = conj(Q_f) + Q_g` to have a
/// positive-definite real part and eigenvalues in the right half-plane (the
/// branch of `det(A)^{-1/2}` is the analytic continuation from the real
/// positive-definite case).
pub fn inner(f: &GaussPoly, g: &GaussPoly) -> Result<C64, GaussError> {
    let a = [
        [
            f.q()[0][0].conj() + g.q()[0][0],
            f.q()[0][1].conj() + g.q()[0][1],
        ],
        [
            f.q()[1][0].conj() + g.q()[1][0],
            f.q()[1][1].conj() + g.q()[1][1],
        ],
    ];
    let ell = [f.l()[0].conj() + g.l()[0], f.l()[1].conj() + g.l()[1]];

    let re00 = a[0][0].re;
    let re_det = a[0][0].re * a[1][1].re - a[0][1].re * a[1][0].re;
    if !(re00 > 0.0 && re_det > 0.0) {
        return Err(GaussError::NotIntegrable {
            leading: re00,
            determinant: re_det,
        });
    }

    // Eigenvalues of the symmetric 2x2 (quadratic formula); both must stay
    // in the right half-plane for the continued branch to be valid.
    let tr = a[0][0] + a[1][1];
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let disc = (tr * tr * 0.25 - det).sqrt();
    let lam = [tr * 0.5 + disc, tr * 0.5 - disc];
    if lam.iter().any(|z| z.re <= 0.0) {
        return Err(GaussError::NotIntegrable {
            leading: lam[0].re.min(lam[1].re),
            determinant: re_det,
        });
    }
    let inv_sqrt_det = (-0.5 * (lam[0].ln() + lam[1].ln())).exp();
    let z0 = 2.0 * std::f64::consts::PI * inv_sqrt_det;

    // Complete the square: mu = -A^{-1} ell, constant factor e^{-ell·mu/2}.
    let inv = [
        [a[1][1] / det, -a[0][1] / det],
        [-a[1][0] / det, a[0][0] / det],
    ];
    let mu = [
        -(inv[0][0] * ell[0] + inv[0][1] * ell[1]),
        -(inv[1][0] * ell[0] + inv[1][1] * ell[1]),
    ];
    let factor = (-0.5 * (ell[0] * mu[0] + ell[1] * mu[1])).exp();

    // Shift the polynomial to the stationary point and contract against the
    // central moments of the covariance A^{-1}.
    let h = f.poly().conj().mul(g.poly());
    if h.is_zero() {
        return Ok(C64::new(0.0, 0.0));
    }
    let shifted = h.shifted(mu[0], mu[1]);
    let moments = central_moments(&inv, shifted.deg1(), shifted.deg2());
    let mut acc = C64::new(0.0, 0.0);
    for (m1, m2, c) in shifted.iter_nonzero() {
        acc += c * moments[m1][m2];
    }
    Ok(z0 * factor * acc)
}

/// Central moments `E[y1^p y2^q]` of the (complex) Gaussian weight with
/// covariance `sigma`, normalized to `E[1] = 1`, via the integration-by-
/// parts recursion `E[y1 f] = Σ_j sigma_{1j} E[∂_j f]`.
fn central_moments(sigma: &[[C64; 2]; 2], d1: usize, d2: usize) -> Vec<Vec<C64>> {
    let zero = C64::new(0.0, 0.0);
    let mut t = vec![vec![zero; d2 + 1]; d1 + 1];
    t[0][0] = C64::new(1.0, 0.0);
    for total in 1..=(d1 + d2) {
        for p in 0..=total.min(d1) {
            let q = total - p;
            if q > d2 {
                continue;
            }
            let mut v = zero;
            if p >= 1 {
                if p >= 2 {
                    v += sigma[0][0] * (p - 1) as f64 * t[p - 2][q];
                }
                if q >= 1 {
                    v += sigma[0][1] * q as f64 * t[p - 1][q - 1];
                }
            } else {
                // p = 0, q >= 1: recurse along the second variable.
                if q >= 2 {
                    v += sigma[1][1] * (q - 1) as f64 * t[p][q - 2];
                }
            }
            t[p][q] = v;
        }
    }
    t
}

/// `∫ conj(f)·g` over `[-w, w]²` by tensor Gauss–Legendre with `n` nodes
/// per axis.
pub fn inner_quadrature(f: &GaussPoly, g: &GaussPoly, half_width: f64, n: usize) -> C64 {
    let (nodes, weights) = gauss_legendre_on(n, -half_width, half_width);
    let mut acc = C64::new(0.0, 0.0);
    for (i, &x1) in nodes.iter().enumerate() {
        for (j, &x2) in nodes.iter().enumerate() {
            let w = weights[i] * weights[j];
            acc += f.eval(x1, x2).conj() * g.eval(x1, x2) * w;
        }
    }
    acc
}

/// Self-refining quadrature: doubles the per-axis node count until two
/// consecutive levels agree to `rtol` (relative to the larger magnitude)
/// or the node budget is exhausted. Returns the finest value.
pub fn inner_quadrature_adaptive(f: &GaussPoly, g: &GaussPoly, half_width: f64, rtol: f64) -> C64 {
    let mut n = 48;
    let mut prev = inner_quadrature(f, g, half_width, n);
    loop {
        n *= 2;
        let next = inner_quadrature(f, g, half_width, n);
        let scale = prev.norm().max(next.norm()).max(1.0);
        if (next - prev).norm() <= rtol * scale || n >= 384 {
            return next;
        }
        prev = next;
    }
}

/// All pairwise quadrature inner products `∫ conj(f_i)·g_j` on `[-w, w]²`:
/// every state is evaluated once on the grid (weights folded in), and the
/// Gram matrix reduces to plain dot products.
pub fn quadrature_gram(
    fs: &[GaussPoly],
    gs: &[GaussPoly],
    half_width: f64,
    n: usize,
) -> Vec<Vec<C64>> {
    let (nodes, weights) = gauss_legendre_on(n, -half_width, half_width);
    let sqrt_w: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let sample = |s: &GaussPoly| -> Vec<C64> {
        let mut vals = Vec::with_capacity(n * n);
        for (i, &x1) in nodes.iter().enumerate() {
            for (j, &x2) in nodes.iter().enumerate() {
                vals.push(s.eval(x1, x2) * (sqrt_w[i] * sqrt_w[j]));
            }
        }
        vals
    };
    let fv: Vec<Vec<C64>> = fs.iter().map(sample).collect();
    let gv: Vec<Vec<C64>> = gs.iter().map(sample).collect();
    fv.iter()
        .map(|fi| {
            gv.iter()
                .map(|gj| {
                    fi.iter()
                        .zip(gj.iter())
                        .map(|(a, b)| a.conj() * b)
                        .sum::<C64>()
                })
                .collect()
        })
        .collect()
}
