//! Polynomial-coefficient differential operators in two variables.
//!
//! Terms are kept normal-ordered (`x` powers to the left of derivatives),
//! so composition reduces to moving derivative blocks past coordinate
//! blocks with the two-variable Leibniz rule.

use std::collections::BTreeMap;

use crate::numkernel::C64;

/// Multi-index of one normal-ordered term `x1^{m1} x2^{m2} ∂1^{d1} ∂2^{d2}`.
type TermKey = (u8, u8, u8, u8);

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DiffOp {
    terms: BTreeMap<TermKey, C64>,
}

impl DiffOp {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::constant(C64::new(1.0, 0.0))
    }

    pub fn constant(c: C64) -> Self {
        let mut op = Self::default();
        op.accumulate((0, 0, 0, 0), c);
        op
    }

    /// Multiplication by `x_{axis+1}`.
    pub fn x(axis: usize) -> Self {
        let mut op = Self::default();
        let key = match axis {
            0 => (1, 0, 0, 0),
            1 => (0, 1, 0, 0),
            _ => panic!("axis must be 0 or 1"),
        };
        op.accumulate(key, C64::new(1.0, 0.0));
        op
    }

    /// `∂/∂x_{axis+1}`.
    pub fn dx(axis: usize) -> Self {
        let mut op = Self::default();
        let key = match axis {
            0 => (0, 0, 1, 0),
            1 => (0, 0, 0, 1),
            _ => panic!("axis must be 0 or 1"),
        };
        op.accumulate(key, C64::new(1.0, 0.0));
        op
    }

    fn accumulate(&mut self, key: TermKey, c: C64) {
        if c == C64::new(0.0, 0.0) {
            return;
        }
        let entry = self.terms.entry(key).or_insert(C64::new(0.0, 0.0));
        *entry += c;
        if *entry == C64::new(0.0, 0.0) {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (TermKey, C64)> + '_ {
        self.terms.iter().map(|(&k, &c)| (k, c))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in other.terms() {
            out.accumulate(k, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = Self::default();
        for (k, c) in self.terms() {
            out.accumulate(k, c * s);
        }
        out
    }

    /// Largest total degree `m1 + m2 + d1 + d2` over the terms; the
    /// classical order-1/order-2 classification reads off this value.
    pub fn order(&self) -> usize {
        self.terms
            .keys()
            .map(|&(m1, m2, d1, d2)| (m1 + m2 + d1 + d2) as usize)
            .max()
            .unwrap_or(0)
    }

    /// Largest derivative degree, which bounds how much a single
    /// application can raise a state's polynomial degree.
    pub fn derivative_order(&self) -> usize {
        self.terms
            .keys()
            .map(|&(_, _, d1, d2)| (d1 + d2) as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn coordinate_order(&self) -> usize {
        self.terms
            .keys()
            .map(|&(m1, m2, _, _)| (m1 + m2) as usize)
            .max()
            .unwrap_or(0)
    }

    /// Operator product `self ∘ other`, renormal-ordered: per axis,
    /// `∂^d x^a = Σ_k C(d,k)·a!/(a−k)!·x^{a−k} ∂^{d−k}`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for ((lm1, lm2, ld1, ld2), lc) in self.terms() {
            for ((rm1, rm2, rd1, rd2), rc) in other.terms() {
                for (k1, f1) in leibniz(ld1, rm1) {
                    for (k2, f2) in leibniz(ld2, rm2) {
                        let key = (
                            lm1 + rm1 - k1,
                            lm2 + rm2 - k2,
                            ld1 - k1 + rd1,
                            ld2 - k2 + rd2,
                        );
                        out.accumulate(key, lc * rc * f1 * f2);
                    }
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.compose(other).sub(&other.compose(self))
    }

    /// Formal adjoint: coordinates are self-adjoint, derivatives flip sign,
    /// scalars conjugate, factor order reverses.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::default();
        for ((m1, m2, d1, d2), c) in self.terms() {
            let mut dpart = Self::default();
            dpart.accumulate((0, 0, d1, d2), C64::new(1.0, 0.0));
            let mut xpart = Self::default();
            xpart.accumulate((m1, m2, 0, 0), C64::new(1.0, 0.0));
            let sign = if (d1 + d2) % 2 == 0 { 1.0 } else { -1.0 };
            let reordered = dpart.compose(&xpart);
            out = out.add(&reordered.scale(c.conj() * sign));
        }
        out
    }

    /// If the operator is `c · 1` up to `floor` on every other coefficient,
    /// return `c`.
    pub fn as_scalar_identity(&self, floor: f64) -> Option<C64> {
        let mut scalar = C64::new(0.0, 0.0);
        for (k, c) in self.terms() {
            if k == (0, 0, 0, 0) {
                scalar = c;
            } else if c.norm() > floor {
                return None;
            }
        }
        Some(scalar)
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// `(k, C(d,k)·a·(a−1)···(a−k+1))` pairs for moving `∂^d` past `x^a` on one
/// axis, `k = 0..=min(d, a)`.
fn leibniz(d: u8, a: u8) -> Vec<(u8, f64)> {
    let kmax = d.min(a);
    let mut out = Vec::with_capacity(kmax as usize + 1);
    for k in 0..=kmax {
        let mut f = 1.0f64;
        for j in 0..k {
            // C(d,k) multiplied by the falling factorial of a, assembled
            // incrementally: (d-j)/(j+1) * (a-j).
            f *= (d - j) as f64 / (j + 1) as f64 * (a - j) as f64;
        }
        out.push((k, f));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn canonical_commutator_is_unity() {
        // [∂1, x1] = 1, [∂1, x2] = 0.
        let comm = DiffOp::dx(0).commutator(&DiffOp::x(0));
        let s = comm.as_scalar_identity(0.0).unwrap();
        assert_abs_diff_eq!((s - c(1.0, 0.0)).norm(), 0.0, epsilon = 0.0);
        let cross = DiffOp::dx(0).commutator(&DiffOp::x(1));
        assert_eq!(cross.as_scalar_identity(0.0).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn reordering_matches_leibniz() {
        // ∂1 x1^2 = x1^2 ∂1 + 2 x1.
        let p = DiffOp::dx(0).compose(&DiffOp::x(0).compose(&DiffOp::x(0)));
        let mut expect = DiffOp::default();
        expect.accumulate((2, 0, 1, 0), c(1.0, 0.0));
        expect.accumulate((1, 0, 0, 0), c(2.0, 0.0));
        assert!(p.sub(&expect).max_abs() == 0.0);
    }

    #[test]
    fn adjoint_is_involutive_and_flips_derivatives() {
        let op = DiffOp::x(0)
            .compose(&DiffOp::dx(1))
            .scale(c(0.0, 2.0))
            .add(&DiffOp::dx(0).scale(c(1.0, -1.0)));
        let adj = op.adjoint();
        // (x1 ∂2 · 2i)† = -2i x1 ∂2 ... modulo ordering corrections handled
        // by compose; double adjoint must return the original exactly.
        assert!(adj.adjoint().sub(&op).max_abs() == 0.0);
        // ∂-only term flips sign and conjugates.
        let d = DiffOp::dx(0).scale(c(0.0, 1.0));
        let da = d.adjoint();
        let mut expect = DiffOp::default();
        expect.accumulate((0, 0, 1, 0), c(0.0, 1.0));
        assert!(da.sub(&expect).max_abs() == 0.0);
    }

    #[test]
    fn order_classification() {
        let first = DiffOp::x(0).add(&DiffOp::dx(1));
        assert_eq!(first.order(), 1);
        let second = DiffOp::dx(0).compose(&DiffOp::dx(0));
        assert_eq!(second.order(), 2);
        assert_eq!(second.derivative_order(), 2);
        assert_eq!(first.coordinate_order(), 1);
    }
}
