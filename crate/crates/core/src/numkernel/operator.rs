//! Dense complex operators and state vectors.

use nalgebra::{DMatrix, DVector};
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::ops::{Add, Mul, Neg, Sub};

use super::NumError;

pub type C64 = num_complex::Complex<f64>;

/// Dense complex square matrix with a dimension tag.
///
/// Invariants: square storage, all entries finite. Arithmetic between
/// mismatched dimensions panics (programming error); fallible validation
/// happens at the construction and deserialization boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    mat: DMatrix<C64>,
}

/// Complex state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    v: DVector<C64>,
}

impl Operator {
    /// Build from row-major entries; `data.len()` must equal `dim²` and all
    /// entries must be finite.
    pub fn from_rows(dim: usize, data: &[C64]) -> Result<Self, NumError> {
        if dim == 0 {
            return Err(NumError::Malformed("dimension must be positive".into()));
        }
        if data.len() != dim * dim {
            return Err(NumError::Malformed(format!(
                "expected {} entries for a {dim}x{dim} operator, got {}",
                dim * dim,
                data.len()
            )));
        }
        let mat = DMatrix::from_row_slice(dim, dim, data);
        Self::from_matrix(mat)
    }

    pub fn from_matrix(mat: DMatrix<C64>) -> Result<Self, NumError> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(NumError::Malformed(format!(
                "operator must be square and non-empty, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let op = Self { mat };
        if !op.is_finite() {
            return Err(NumError::Malformed(
                "operator contains non-finite entries".into(),
            ));
        }
        Ok(op)
    }

    /// Internal constructor for results of arithmetic on already-validated
    /// operands.
    pub(crate) fn from_matrix_unchecked(mat: DMatrix<C64>) -> Self {
        Self { mat }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: DMatrix::zeros(dim, dim),
        }
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        Self {
            mat: DMatrix::from_diagonal(&DVector::from_column_slice(entries)),
        }
    }

    /// `|x⟩⟨y|`, the rank-one operator `v ↦ ⟨y, v⟩ x`.
    pub fn outer(x: &Ket, y: &Ket) -> Self {
        assert_eq!(x.dim(), y.dim(), "outer product dimension mismatch");
        Self {
            mat: &x.v * y.v.adjoint(),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn is_finite(&self) -> bool {
        self.mat
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            mat: self.mat.transpose(),
        }
    }

    pub fn conjugate(&self) -> Self {
        Self {
            mat: self.mat.map(|z| z.conj()),
        }
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            mat: self.mat.map(|z| z * s),
        }
    }

    pub fn apply(&self, k: &Ket) -> Ket {
        assert_eq!(self.dim(), k.dim(), "operator/ket dimension mismatch");
        Ket {
            v: &self.mat * &k.v,
        }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self * other - other * self
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        self * other + other * self
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut out = Self::identity(self.dim());
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Spectral norm (largest singular value).
    pub fn spectral_norm(&self) -> f64 {
        if self.mat.iter().all(|z| z.norm_sqr() == 0.0) {
            return 0.0;
        }
        self.mat
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .fold(0.0f64, |a, &b| a.max(b))
    }

    pub fn fro_norm(&self) -> f64 {
        self.mat.norm()
    }

    /// Condition number `σ_max / σ_min`; `f64::INFINITY` when singular.
    pub fn condition(&self) -> f64 {
        let sv = self.mat.clone().svd(false, false).singular_values;
        let max = sv.iter().fold(0.0f64, |a, &b| a.max(b));
        let min = sv.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        if min == 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }

    pub fn try_inverse(&self) -> Result<Self, NumError> {
        self.mat
            .clone()
            .try_inverse()
            .map(|mat| Self { mat })
            .ok_or(NumError::Singular {
                condition: f64::INFINITY,
            })
    }

    /// `‖A − A†‖` in the spectral norm.
    pub fn hermitian_deviation(&self) -> f64 {
        (self - &self.adjoint()).spectral_norm()
    }

    /// `(A + A†)/2`.
    pub fn hermitize(&self) -> Self {
        (self + &self.adjoint()).scale(C64::new(0.5, 0.0))
    }

    /// Column `j` as a ket.
    pub fn column(&self, j: usize) -> Ket {
        Ket {
            v: self.mat.column(j).into_owned(),
        }
    }

    /// Operator whose columns are the given kets.
    pub fn from_columns(cols: &[Ket]) -> Result<Self, NumError> {
        if cols.is_empty() {
            return Err(NumError::Malformed("no columns given".into()));
        }
        let dim = cols[0].dim();
        if cols.len() != dim || cols.iter().any(|c| c.dim() != dim) {
            return Err(NumError::Malformed(format!(
                "need {dim} columns of dimension {dim} for a square operator"
            )));
        }
        let mut mat = DMatrix::zeros(dim, dim);
        for (j, c) in cols.iter().enumerate() {
            mat.set_column(j, &c.v);
        }
        Self::from_matrix(mat)
    }
}

impl Ket {
    pub fn from_slice(data: &[C64]) -> Result<Self, NumError> {
        if data.is_empty() {
            return Err(NumError::Malformed("ket must be non-empty".into()));
        }
        let k = Self {
            v: DVector::from_column_slice(data),
        };
        if !k.is_finite() {
            return Err(NumError::Malformed(
                "ket contains non-finite entries".into(),
            ));
        }
        Ok(k)
    }

    pub fn from_vector(v: DVector<C64>) -> Result<Self, NumError> {
        if v.is_empty() {
            return Err(NumError::Malformed("ket must be non-empty".into()));
        }
        let k = Self { v };
        if !k.is_finite() {
            return Err(NumError::Malformed(
                "ket contains non-finite entries".into(),
            ));
        }
        Ok(k)
    }

    pub(crate) fn from_vector_unchecked(v: DVector<C64>) -> Self {
        Self { v }
    }

    pub fn basis(dim: usize, n: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[n] = C64::new(1.0, 0.0);
        Self { v }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            v: DVector::zeros(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn entry(&self, i: usize) -> C64 {
        self.v[i]
    }

    pub fn vector(&self) -> &DVector<C64> {
        &self.v
    }

    pub fn is_finite(&self) -> bool {
        self.v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn norm(&self) -> f64 {
        self.v.norm()
    }

    /// `⟨self, other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> C64 {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.v.dotc(&other.v)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            v: self.v.map(|z| z * s),
        }
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero ket");
        self.scale(C64::new(1.0 / n, 0.0))
    }
}

/// Rotate a ket by a global phase so that its first non-negligible component
/// (relative threshold `1e-8` of the largest magnitude) is real positive.
/// This is the deterministic gauge used for vacua and eigenvectors.
pub fn canonical_phase(k: &Ket) -> Ket {
    let max = k.v.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    if max == 0.0 {
        return k.clone();
    }
    let lead =
        k.v.iter()
            .find(|z| z.norm() > 1e-8 * max)
            .copied()
            .unwrap_or_else(|| k.v[0]);
    let phase = lead.conj() / lead.norm();
    k.scale(phase)
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $op:tt, $lhs:ty, $rhs:ty, $out:ty, $field:ident) => {
        impl $trait<$rhs> for $lhs {
            type Output = $out;
            fn $method(self, rhs: $rhs) -> $out {
                <$out>::from_matrix_unchecked(&self.$field $op &rhs.$field)
            }
        }
    };
}

impl_binop!(Add, add, +, &Operator, &Operator, Operator, mat);
impl_binop!(Sub, sub, -, &Operator, &Operator, Operator, mat);
impl_binop!(Add, add, +, Operator, Operator, Operator, mat);
impl_binop!(Sub, sub, -, Operator, Operator, Operator, mat);

impl Mul<&Operator> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator product dimension mismatch");
        Operator::from_matrix_unchecked(&self.mat * &rhs.mat)
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator::from_matrix_unchecked(-&self.mat)
    }
}

impl Add<&Ket> for &Ket {
    type Output = Ket;
    fn add(self, rhs: &Ket) -> Ket {
        Ket::from_vector_unchecked(&self.v + &rhs.v)
    }
}

impl Sub<&Ket> for &Ket {
    type Output = Ket;
    fn sub(self, rhs: &Ket) -> Ket {
        Ket::from_vector_unchecked(&self.v - &rhs.v)
    }
}

// Wire schema: {"dim": d, "data": [[re, im], ...]} with row-major entries
// for operators and plain entries for kets.

#[derive(Serialize, Deserialize)]
struct DenseRepr {
    dim: usize,
    data: Vec<[f64; 2]>,
}

impl Serialize for Operator {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let dim = self.dim();
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let z = self.mat[(i, j)];
                data.push([z.re, z.im]);
            }
        }
        DenseRepr { dim, data }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Operator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = DenseRepr::deserialize(d)?;
        let entries: Vec<C64> = repr.data.iter().map(|&[re, im]| C64::new(re, im)).collect();
        Operator::from_rows(repr.dim, &entries).map_err(D::Error::custom)
    }
}

impl Serialize for Ket {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DenseRepr {
            dim: self.dim(),
            data: self.v.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Ket {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = DenseRepr::deserialize(d)?;
        if repr.data.len() != repr.dim {
            return Err(D::Error::custom(format!(
                "expected {} entries for a ket of dimension {}, got {}",
                repr.dim,
                repr.dim,
                repr.data.len()
            )));
        }
        let entries: Vec<C64> = repr.data.iter().map(|&[re, im]| C64::new(re, im)).collect();
        Ket::from_slice(&entries).map_err(D::Error::custom)
    }
}
