//! Polynomial-times-Gaussian states on ℝ².

use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::diffop::DiffOp;
use super::poly::PolyTable;
use super::GaussError;
use crate::numkernel::C64;

/// Default cap on the polynomial degree a state may reach.
pub const DEFAULT_DEGREE_CAP: usize = 16;

/// A state `P(x)·exp(−½ xᵀQx − Lᵀx)` with `Q` complex symmetric,
/// `Re(Q)` positive definite (square integrability), `L` a complex pair and
/// `P` a bivariate polynomial below the degree cap.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussPoly {
    q: [[C64; 2]; 2],
    l: [C64; 2],
    p: PolyTable,
    cap: usize,
}

impl GaussPoly {
    pub fn new(
        q: [[C64; 2]; 2],
        l: [C64; 2],
        p: PolyTable,
        cap: usize,
    ) -> Result<Self, GaussError> {
        let asym = (q[0][1] - q[1][0]).norm();
        let scale = q.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
        if asym > 1e-12 * scale.max(1.0) {
            return Err(GaussError::Malformed(format!(
                "quadratic form must be symmetric, asymmetry {asym:.3e}"
            )));
        }
        for z in q.iter().flatten().chain(l.iter()) {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(GaussError::Malformed("non-finite Gaussian data".into()));
            }
        }
        // Positive definiteness of Re(Q): leading minor and determinant.
        let r00 = q[0][0].re;
        let det = q[0][0].re * q[1][1].re - q[0][1].re * q[1][0].re;
        if !(r00 > 0.0 && det > 0.0) {
            return Err(GaussError::NotIntegrable {
                leading: r00,
                determinant: det,
            });
        }
        if p.total_degree() > cap {
            return Err(GaussError::DegreeCap {
                needed: p.total_degree(),
                cap,
            });
        }
        Ok(Self { q, l, p, cap })
    }

    /// Pure Gaussian with unit coefficient.
    pub fn gaussian(q: [[C64; 2]; 2], l: [C64; 2], cap: usize) -> Result<Self, GaussError> {
        Self::new(q, l, PolyTable::constant(C64::new(1.0, 0.0)), cap)
    }

    pub fn q(&self) -> &[[C64; 2]; 2] {
        &self.q
    }

    pub fn l(&self) -> &[C64; 2] {
        &self.l
    }

    pub fn poly(&self) -> &PolyTable {
        &self.p
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn degree(&self) -> usize {
        self.p.total_degree()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            p: self.p.scale(s),
            ..self.clone()
        }
    }

    pub fn is_zero_poly(&self) -> bool {
        self.p.is_zero()
    }

    /// Whether the polynomial part vanishes up to `floor` in every
    /// coefficient (the structural-zero test used for exact annihilation).
    pub fn is_zero_within(&self, floor: f64) -> bool {
        self.p.max_abs() <= floor
    }

    /// Evaluate the state at a real point.
    pub fn eval(&self, x1: f64, x2: f64) -> C64 {
        let z1 = C64::new(x1, 0.0);
        let z2 = C64::new(x2, 0.0);
        let quad = self.q[0][0] * z1 * z1
            + (self.q[0][1] + self.q[1][0]) * z1 * z2
            + self.q[1][1] * z2 * z2;
        let expo = -0.5 * quad - self.l[0] * z1 - self.l[1] * z2;
        self.p.eval(z1, z2) * expo.exp()
    }

    /// Difference of two states sharing the same Gaussian part (within
    /// `gauss_rtol` relatively); the result keeps `self`'s Gaussian data.
    pub fn sub_compatible(&self, other: &Self, gauss_rtol: f64) -> Result<Self, GaussError> {
        let scale = self
            .q
            .iter()
            .flatten()
            .chain(self.l.iter())
            .map(|z| z.norm())
            .fold(1.0, f64::max);
        let mut dev = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                dev = dev.max((self.q[i][j] - other.q[i][j]).norm());
            }
            dev = dev.max((self.l[i] - other.l[i]).norm());
        }
        if dev > gauss_rtol * scale {
            return Err(GaussError::IncompatibleStates(format!(
                "Gaussian parts differ by {dev:.3e} (allowed {:.3e})",
                gauss_rtol * scale
            )));
        }
        Ok(Self {
            p: self.p.sub(&other.p),
            ..self.clone()
        })
    }
}

/// Apply a normal-ordered differential operator to a state, exactly at the
/// coefficient level: a derivative `∂_j` sends `P` to
/// `∂_j P − P·(Q_{j1}x1 + Q_{j2}x2 + L_j)` and coordinates shift the table.
/// The result keeps the Gaussian part untouched.
pub fn apply_op(op: &DiffOp, s: &GaussPoly) -> Result<GaussPoly, GaussError> {
    let needed = s.degree() + op.derivative_order().max(op.coordinate_order());
    if needed > s.cap {
        return Err(GaussError::DegreeCap { needed, cap: s.cap });
    }
    let mut acc = PolyTable::zero();
    for ((m1, m2, d1, d2), c) in op.terms() {
        let mut t = s.p.clone();
        for _ in 0..d1 {
            t = gaussian_derivative(&t, s, 0);
        }
        for _ in 0..d2 {
            t = gaussian_derivative(&t, s, 1);
        }
        for _ in 0..m1 {
            t = t.mul_x(0);
        }
        for _ in 0..m2 {
            t = t.mul_x(1);
        }
        acc = acc.add(&t.scale(c));
    }
    GaussPoly::new(s.q, s.l, acc, s.cap)
}

fn gaussian_derivative(p: &PolyTable, s: &GaussPoly, axis: usize) -> PolyTable {
    let qrow = s.q[axis];
    let linear = p
        .mul_x(0)
        .scale(qrow[0])
        .add(&p.mul_x(1).scale(qrow[1]))
        .add(&p.scale(s.l[axis]));
    p.diff(axis).sub(&linear)
}

/// Complex-argument translation `x ↦ x + shift`: the Gaussian absorbs
/// `L ↦ L + Q·shift`, the polynomial is re-expanded binomially, and the
/// scalar factor `exp(−½ shiftᵀQ shift − Lᵀ shift)` folds into the
/// coefficients.
pub fn translate(s: &GaussPoly, shift: [C64; 2]) -> Result<GaussPoly, GaussError> {
    let q = s.q;
    let qc = [
        q[0][0] * shift[0] + q[0][1] * shift[1],
        q[1][0] * shift[0] + q[1][1] * shift[1],
    ];
    let new_l = [s.l[0] + qc[0], s.l[1] + qc[1]];
    let exponent =
        -0.5 * (shift[0] * qc[0] + shift[1] * qc[1]) - (s.l[0] * shift[0] + s.l[1] * shift[1]);
    let factor = exponent.exp();
    let p = s.p.shifted(shift[0], shift[1]).scale(factor);
    GaussPoly::new(q, new_l, p, s.cap)
}

// Wire schema: {"Q": [[[re,im],[re,im]],[[re,im],[re,im]]],
//               "L": [[re,im],[re,im]], "P": [[[re,im],…],…]}.

#[derive(Serialize, Deserialize)]
struct GaussPolyRepr {
    #[serde(rename = "Q")]
    q: [[[f64; 2]; 2]; 2],
    #[serde(rename = "L")]
    l: [[f64; 2]; 2],
    #[serde(rename = "P")]
    p: Vec<Vec<[f64; 2]>>,
}

impl Serialize for GaussPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let cx = |z: C64| [z.re, z.im];
        let rows = (0..=self.p.deg1())
            .map(|m1| {
                (0..=self.p.deg2())
                    .map(|m2| cx(self.p.coeff(m1, m2)))
                    .collect()
            })
            .collect();
        GaussPolyRepr {
            q: [
                [cx(self.q[0][0]), cx(self.q[0][1])],
                [cx(self.q[1][0]), cx(self.q[1][1])],
            ],
            l: [cx(self.l[0]), cx(self.l[1])],
            p: rows,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GaussPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = GaussPolyRepr::deserialize(d)?;
        let cx = |a: [f64; 2]| C64::new(a[0], a[1]);
        let q = [
            [cx(repr.q[0][0]), cx(repr.q[0][1])],
            [cx(repr.q[1][0]), cx(repr.q[1][1])],
        ];
        let l = [cx(repr.l[0]), cx(repr.l[1])];
        let rows = repr
            .p
            .iter()
            .map(|r| r.iter().map(|&a| cx(a)).collect())
            .collect();
        GaussPoly::new(q, l, PolyTable::from_rows(rows), DEFAULT_DEGREE_CAP)
            .map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn unit_gaussian() -> GaussPoly {
        GaussPoly::gaussian(
            [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]],
            [c(0.0, 0.0), c(0.0, 0.0)],
            DEFAULT_DEGREE_CAP,
        )
        .unwrap()
    }

    #[test]
    fn rejects_non_integrable_forms() {
        let bad = GaussPoly::gaussian(
            [[c(-1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]],
            [c(0.0, 0.0), c(0.0, 0.0)],
            8,
        );
        assert!(matches!(bad, Err(GaussError::NotIntegrable { .. })));
    }

    #[test]
    fn identity_operator_returns_the_state() {
        let s = unit_gaussian();
        let out = apply_op(&DiffOp::identity(), &s).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn derivative_of_pure_gaussian_is_minus_x() {
        // ∂1 e^{−(x1²+x2²)/2} = −x1 e^{...}.
        let s = unit_gaussian();
        let out = apply_op(&DiffOp::dx(0), &s).unwrap();
        assert_abs_diff_eq!(
            (out.poly().coeff(1, 0) + c(1.0, 0.0)).norm(),
            0.0,
            epsilon = 0.0
        );
        assert_eq!(out.poly().total_degree(), 1);
    }

    #[test]
    fn degree_cap_overflow_reports_needed_cap() {
        let s = GaussPoly::new(
            *unit_gaussian().q(),
            *unit_gaussian().l(),
            PolyTable::constant(c(1.0, 0.0)),
            0,
        )
        .unwrap();
        match apply_op(&DiffOp::x(0), &s) {
            Err(GaussError::DegreeCap { needed: 1, cap: 0 }) => {}
            other => panic!("expected degree-cap error, got {other:?}"),
        }
    }

    #[test]
    fn translation_round_trip_is_coefficientwise_tiny() {
        let mut s = unit_gaussian();
        s = apply_op(&DiffOp::x(0).add(&DiffOp::dx(1)), &s).unwrap();
        let shift = [c(0.3, 0.7), c(-0.2, 0.4)];
        let fwd = translate(&s, shift).unwrap();
        let back = translate(&fwd, [-shift[0], -shift[1]]).unwrap();
        let diff = back.sub_compatible(&s, 1e-12).unwrap();
        assert!(diff.poly().max_abs() < 1e-14 * s.poly().max_abs().max(1.0));
    }

    #[test]
    fn eval_matches_closed_form() {
        let s = unit_gaussian();
        let v = s.eval(0.5, -1.0);
        let want = (-0.5f64 * (0.25 + 1.0)).exp();
        assert_abs_diff_eq!(v.re, want, epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn json_round_trip() {
        let mut s = unit_gaussian();
        s = apply_op(&DiffOp::x(1).scale(c(0.0, 2.0)), &s).unwrap();
        let js = serde_json::to_string(&s).unwrap();
        let back: GaussPoly = serde_json::from_str(&js).unwrap();
        assert_eq!(back.poly().coeff(0, 1), s.poly().coeff(0, 1));
        assert_eq!(back.q()[0][0], s.q()[0][0]);
    }
}
