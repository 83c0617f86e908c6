//! Dense matrices of polynomials.

use std::collections::HashMap;
use std::fmt;

use super::polynomial::Polynomial;
use super::rational::Rational;
use super::var::VarId;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DimensionError {
    #[error("dimension mismatch: {op} of {lhs:?} and {rhs:?}")]
    Mismatch {
        op: &'static str,
        lhs: (usize, usize),
        rhs: (usize, usize),
    },
    #[error("matrix of shape {0:?} is not square")]
    NotSquare((usize, usize)),
    #[error("matrix dimensions must be positive")]
    Empty,
}

/// Row-major `rows x cols` matrix of polynomials.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Polynomial>,
}

impl PolyMatrix {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Polynomial) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        PolyMatrix { rows, cols, entries }
    }

    pub fn from_rows(rows: Vec<Vec<Polynomial>>) -> Result<Self, DimensionError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 {
            return Err(DimensionError::Empty);
        }
        if rows.iter().any(|row| row.len() != c) {
            return Err(DimensionError::Mismatch {
                op: "from_rows",
                lhs: (r, c),
                rhs: (r, 0),
            });
        }
        Ok(PolyMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_rational_rows(rows: &[Vec<Rational>]) -> Result<Self, DimensionError> {
        PolyMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().cloned().map(Polynomial::constant).collect())
                .collect(),
        )
    }

    pub fn column(entries: Vec<Polynomial>) -> Self {
        PolyMatrix {
            rows: entries.len(),
            cols: 1,
            entries,
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        PolyMatrix::from_fn(rows, cols, |_, _| Polynomial::zero())
    }

    pub fn identity(n: usize) -> Self {
        PolyMatrix::from_fn(n, n, |i, j| if i == j { Polynomial::one() } else { Polynomial::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Polynomial) {
        self.entries[i * self.cols + j] = p;
    }

    pub fn entries(&self) -> &[Polynomial] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Polynomial] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column_entries(&self, j: usize) -> Vec<Polynomial> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn map(&self, f: impl FnMut(&Polynomial) -> Polynomial) -> PolyMatrix {
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, p: &Polynomial) -> PolyMatrix {
        self.map(|e| e * p)
    }

    pub fn substitute(&self, bindings: &HashMap<VarId, Polynomial>) -> PolyMatrix {
        self.map(|e| e.substitute(bindings))
    }

    fn zip(&self, other: &PolyMatrix, op: &'static str, f: impl Fn(&Polynomial, &Polynomial) -> Polynomial) -> Result<PolyMatrix, DimensionError> {
        if self.shape() != other.shape() {
            return Err(DimensionError::Mismatch {
                op,
                lhs: self.shape(),
                rhs: other.shape(),
            });
        }
        Ok(PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &PolyMatrix) -> Result<PolyMatrix, DimensionError> {
        self.zip(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &PolyMatrix) -> Result<PolyMatrix, DimensionError> {
        self.zip(other, "sub", |a, b| a - b)
    }

    pub fn mul(&self, other: &PolyMatrix) -> Result<PolyMatrix, DimensionError> {
        if self.cols != other.rows {
            return Err(DimensionError::Mismatch {
                op: "mul",
                lhs: self.shape(),
                rhs: other.shape(),
            });
        }
        Ok(PolyMatrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = Polynomial::zero();
            for k in 0..self.cols {
                let (a, b) = (self.get(i, k), other.get(k, j));
                if !a.is_zero() && !b.is_zero() {
                    acc = &acc + &(a * b);
                }
            }
            acc
        }))
    }

    /// `self^k` by repeated multiplication; `self^0` is the identity.
    pub fn pow(&self, k: u32) -> Result<PolyMatrix, DimensionError> {
        if !self.is_square() {
            return Err(DimensionError::NotSquare(self.shape()));
        }
        let mut acc = PolyMatrix::identity(self.rows);
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// `det(z*I - self)` by Berkowitz's division-free algorithm.
    ///
    /// The coefficient vector of the characteristic polynomial of the leading
    /// `r x r` block is obtained from the one of the `(r-1) x (r-1)` block by
    /// a lower-triangular Toeplitz product whose first column is
    /// `(1, -a_rr, -R C, -R M C, ..., -R M^(r-2) C)`, with `M` the previous
    /// block, `R` the new row and `C` the new column.
    pub fn char_poly(&self, z: &VarId) -> Result<Polynomial, DimensionError> {
        let coeffs = self.char_poly_coeffs()?;
        let n = self.rows;
        let zp = Polynomial::var(z.clone());
        let mut out = Polynomial::zero();
        for (k, c) in coeffs.iter().enumerate() {
            out = &out + &(c * &zp.pow((n - k) as u32));
        }
        Ok(out)
    }

    /// Coefficients `[1, c_{n-1}, ..., c_0]` of the characteristic polynomial,
    /// highest degree first.
    pub fn char_poly_coeffs(&self) -> Result<Vec<Polynomial>, DimensionError> {
        if !self.is_square() {
            return Err(DimensionError::NotSquare(self.shape()));
        }
        if self.rows == 0 {
            return Err(DimensionError::Empty);
        }
        let mut v: Vec<Polynomial> = vec![Polynomial::one()];
        for r in 0..self.rows {
            // Toeplitz first column for block r (0-based: the new index is r).
            let mut col = Vec::with_capacity(r + 2);
            col.push(Polynomial::one());
            col.push(-self.get(r, r));
            // R M^k C for k = 0..r-2, where M is the leading r x r block.
            let mut mc: Vec<Polynomial> = (0..r).map(|i| self.get(i, r).clone()).collect();
            for k in 0..r {
                let rmc = (0..r).fold(Polynomial::zero(), |acc, j| {
                    let (a, b) = (self.get(r, j), &mc[j]);
                    if a.is_zero() || b.is_zero() {
                        acc
                    } else {
                        &acc + &(a * b)
                    }
                });
                col.push(-&rmc);
                if k + 1 < r {
                    mc = (0..r)
                        .map(|i| {
                            (0..r).fold(Polynomial::zero(), |acc, j| {
                                let (a, b) = (self.get(i, j), &mc[j]);
                                if a.is_zero() || b.is_zero() {
                                    acc
                                } else {
                                    &acc + &(a * b)
                                }
                            })
                        })
                        .collect();
                }
            }
            // v_new = T v, T is (r+2) x (r+1) lower-triangular Toeplitz.
            let next: Vec<Polynomial> = (0..r + 2)
                .map(|i| {
                    let mut acc = Polynomial::zero();
                    for (j, vj) in v.iter().enumerate() {
                        if i >= j && !vj.is_zero() {
                            let t = &col[i - j];
                            if !t.is_zero() {
                                acc = &acc + &(t * vj);
                            }
                        }
                    }
                    acc
                })
                .collect();
            v = next;
        }
        Ok(v)
    }

    /// Entries as rationals, if every entry is constant.
    pub fn to_rational_rows(&self) -> Option<Vec<Vec<Rational>>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(Polynomial::as_constant).collect())
            .collect()
    }
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for (j, e) in self.row(i).iter().enumerate() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{e}")?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::var::VarKind;

    fn ints(rows: &[&[i64]]) -> PolyMatrix {
        PolyMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Polynomial::int(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn identity_power_zero() {
        let b = ints(&[&[1, 1], &[1, 0]]);
        assert_eq!(b.pow(0).unwrap(), PolyMatrix::identity(2));
    }

    #[test]
    fn fibonacci_companion_squared() {
        let b = ints(&[&[1, 1], &[1, 0]]);
        assert_eq!(b.pow(2).unwrap(), ints(&[&[2, 1], &[1, 1]]));
    }

    #[test]
    fn char_poly_identity() {
        let z = VarId::new("z", VarKind::CharZ);
        let zp = Polynomial::var(z.clone());
        let chi = PolyMatrix::identity(2).char_poly(&z).unwrap();
        assert_eq!(chi, (&zp - &Polynomial::one()).pow(2));
    }

    #[test]
    fn char_poly_rejects_non_square() {
        let z = VarId::new("z", VarKind::CharZ);
        assert!(matches!(PolyMatrix::zeros(2, 3).char_poly(&z), Err(DimensionError::NotSquare(_))));
    }

    #[test]
    fn dimension_mismatch() {
        assert!(PolyMatrix::zeros(2, 2).mul(&PolyMatrix::zeros(3, 1)).is_err());
        assert!(PolyMatrix::zeros(2, 2).add(&PolyMatrix::zeros(2, 1)).is_err());
        assert!(PolyMatrix::zeros(2, 3).pow(2).is_err());
    }
}
