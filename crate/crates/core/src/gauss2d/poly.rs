//! Dense bivariate polynomial coefficient tables.

use crate::numkernel::C64;

/// Coefficients `table[m1][m2]` of `x1^{m1} x2^{m2}`, stored rectangular
/// with exactly-zero trailing rows and columns trimmed.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyTable {
    rows: Vec<Vec<C64>>,
}

impl PolyTable {
    pub fn zero() -> Self {
        Self { rows: vec![] }
    }

    pub fn constant(c: C64) -> Self {
        if c == C64::new(0.0, 0.0) {
            return Self::zero();
        }
        Self {
            rows: vec![vec![c]],
        }
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Self {
        let mut t = Self { rows };
        t.rectangularize();
        t.trim();
        t
    }

    fn rectangularize(&mut self) {
        let width = self.rows.iter().map(|r| r.len()).max().unwrap_or(0);
        for r in &mut self.rows {
            r.resize(width, C64::new(0.0, 0.0));
        }
    }

    /// Drop trailing rows/columns whose entries are all exactly zero.
    fn trim(&mut self) {
        let zero = C64::new(0.0, 0.0);
        while let Some(last) = self.rows.last() {
            if last.iter().all(|&c| c == zero) {
                self.rows.pop();
            } else {
                break;
            }
        }
        let mut width = self.rows.iter().map(|r| r.len()).max().unwrap_or(0);
        while width > 0 && self.rows.iter().all(|r| r[width - 1] == zero) {
            width -= 1;
        }
        for r in &mut self.rows {
            r.truncate(width);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn coeff(&self, m1: usize, m2: usize) -> C64 {
        self.rows
            .get(m1)
            .and_then(|r| r.get(m2))
            .copied()
            .unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn deg1(&self) -> usize {
        self.rows.len().saturating_sub(1)
    }

    pub fn deg2(&self) -> usize {
        self.rows
            .iter()
            .map(|r| r.len())
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }

    /// Largest `m1 + m2` over non-zero coefficients.
    pub fn total_degree(&self) -> usize {
        let zero = C64::new(0.0, 0.0);
        let mut deg = 0;
        for (m1, row) in self.rows.iter().enumerate() {
            for (m2, &c) in row.iter().enumerate() {
                if c != zero {
                    deg = deg.max(m1 + m2);
                }
            }
        }
        deg
    }

    pub fn max_abs(&self) -> f64 {
        self.rows
            .iter()
            .flatten()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn iter_nonzero(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        let zero = C64::new(0.0, 0.0);
        self.rows.iter().enumerate().flat_map(move |(m1, row)| {
            row.iter()
                .enumerate()
                .filter(move |(_, &c)| c != zero)
                .map(move |(m2, &c)| (m1, m2, c))
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        let n1 = self.rows.len().max(other.rows.len());
        let n2 = self
            .rows
            .first()
            .map(|r| r.len())
            .unwrap_or(0)
            .max(other.rows.first().map(|r| r.len()).unwrap_or(0));
        let mut rows = vec![vec![C64::new(0.0, 0.0); n2]; n1];
        for (m1, row) in rows.iter_mut().enumerate() {
            for (m2, c) in row.iter_mut().enumerate() {
                *c = self.coeff(m1, m2) + other.coeff(m1, m2);
            }
        }
        Self::from_rows(rows)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_rows(
            self.rows
                .iter()
                .map(|r| r.iter().map(|&c| c * s).collect())
                .collect(),
        )
    }

    /// Multiply by `x_axis` (shift the corresponding index by one).
    pub fn mul_x(&self, axis: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        match axis {
            0 => {
                let mut rows = vec![vec![C64::new(0.0, 0.0); self.deg2() + 1]];
                rows.extend(self.rows.clone());
                Self::from_rows(rows)
            }
            1 => Self::from_rows(
                self.rows
                    .iter()
                    .map(|r| {
                        let mut nr = vec![C64::new(0.0, 0.0)];
                        nr.extend(r.iter().copied());
                        nr
                    })
                    .collect(),
            ),
            _ => panic!("axis must be 0 or 1"),
        }
    }

    /// Partial derivative along `x_axis`.
    pub fn diff(&self, axis: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        match axis {
            0 => Self::from_rows(
                self.rows
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(m1, r)| r.iter().map(|&c| c * m1 as f64).collect())
                    .collect(),
            ),
            1 => Self::from_rows(
                self.rows
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .skip(1)
                            .map(|(m2, &c)| c * m2 as f64)
                            .collect()
                    })
                    .collect(),
            ),
            _ => panic!("axis must be 0 or 1"),
        }
    }

    /// Polynomial product.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let n1 = self.deg1() + other.deg1() + 1;
        let n2 = self.deg2() + other.deg2() + 1;
        let mut rows = vec![vec![C64::new(0.0, 0.0); n2]; n1];
        for (a1, a2, ca) in self.iter_nonzero() {
            for (b1, b2, cb) in other.iter_nonzero() {
                rows[a1 + b1][a2 + b2] += ca * cb;
            }
        }
        Self::from_rows(rows)
    }

    pub fn conj(&self) -> Self {
        Self::from_rows(
            self.rows
                .iter()
                .map(|r| r.iter().map(|c| c.conj()).collect())
                .collect(),
        )
    }

    /// `P(x1 + c1, x2 + c2)` by binomial re-expansion.
    pub fn shifted(&self, c1: C64, c2: C64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let d1 = self.deg1();
        let d2 = self.deg2();
        let mut rows = vec![vec![C64::new(0.0, 0.0); d2 + 1]; d1 + 1];
        // Pascal rows up to the needed degree.
        let binom = pascal(d1.max(d2));
        // Powers of the shifts.
        let pow1 = powers(c1, d1);
        let pow2 = powers(c2, d2);
        for (m1, m2, c) in self.iter_nonzero() {
            for (j1, row_b1) in binom[m1].iter().enumerate().take(m1 + 1) {
                for (j2, row_b2) in binom[m2].iter().enumerate().take(m2 + 1) {
                    rows[j1][j2] += c * *row_b1 * *row_b2 * pow1[m1 - j1] * pow2[m2 - j2];
                }
            }
        }
        Self::from_rows(rows)
    }

    /// Evaluate at a (complex) point by direct accumulation.
    pub fn eval(&self, x1: C64, x2: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        let p1 = powers(x1, self.deg1());
        for (m1, row) in self.rows.iter().enumerate() {
            // Horner along x2 inside each row.
            let mut inner = C64::new(0.0, 0.0);
            for &c in row.iter().rev() {
                inner = inner * x2 + c;
            }
            acc += p1[m1] * inner;
        }
        acc
    }
}

fn pascal(n: usize) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = vec![vec![1.0]];
    for i in 1..=n {
        let prev = &rows[i - 1];
        let mut row = vec![1.0; i + 1];
        for j in 1..i {
            row[j] = prev[j - 1] + prev[j];
        }
        rows.push(row);
    }
    rows
}

fn powers(c: C64, n: usize) -> Vec<C64> {
    let mut p = Vec::with_capacity(n + 1);
    p.push(C64::new(1.0, 0.0));
    for k in 1..=n {
        let last = p[k - 1];
        p.push(last * c);
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn trim_drops_exact_zero_edges() {
        let t = PolyTable::from_rows(vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        ]);
        assert_eq!(t.deg1(), 0);
        assert_eq!(t.deg2(), 0);
        assert!(PolyTable::from_rows(vec![vec![c(0.0, 0.0)]]).is_zero());
    }

    #[test]
    fn product_and_degree() {
        // (1 + x1)(1 + x2) = 1 + x1 + x2 + x1 x2.
        let a = PolyTable::from_rows(vec![vec![c(1.0, 0.0)], vec![c(1.0, 0.0)]]);
        let b = PolyTable::from_rows(vec![vec![c(1.0, 0.0), c(1.0, 0.0)]]);
        let p = a.mul(&b);
        for (m1, m2) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            assert_abs_diff_eq!((p.coeff(m1, m2) - c(1.0, 0.0)).norm(), 0.0, epsilon = 0.0);
        }
        assert_eq!(p.total_degree(), 2);
    }

    #[test]
    fn derivative_and_shift() {
        // P = x1^2 x2: d/dx1 = 2 x1 x2.
        let mut rows = vec![vec![c(0.0, 0.0); 2]; 3];
        rows[2][1] = c(1.0, 0.0);
        let p = PolyTable::from_rows(rows);
        let d = p.diff(0);
        assert_abs_diff_eq!((d.coeff(1, 1) - c(2.0, 0.0)).norm(), 0.0, epsilon = 0.0);

        // Shift x1 -> x1 + 1: (x1+1)^2 x2 = (x1^2 + 2x1 + 1) x2.
        let s = p.shifted(c(1.0, 0.0), c(0.0, 0.0));
        assert_abs_diff_eq!((s.coeff(0, 1) - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((s.coeff(1, 1) - c(2.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((s.coeff(2, 1) - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-15);

        // Round trip shift is coefficientwise tiny.
        let back = s.shifted(c(-1.0, 0.0), c(0.0, 0.0));
        assert!(back.sub(&p).max_abs() < 1e-15);
    }

    #[test]
    fn eval_matches_coefficients() {
        // P = 3 + 2 x1 x2^2.
        let mut rows = vec![vec![c(0.0, 0.0); 3]; 2];
        rows[0][0] = c(3.0, 0.0);
        rows[1][2] = c(2.0, 0.0);
        let p = PolyTable::from_rows(rows);
        let v = p.eval(c(0.5, 0.0), c(2.0, 0.0));
        assert_abs_diff_eq!(v.re, 3.0 + 2.0 * 0.5 * 4.0, epsilon = 1e-14);
    }
}
