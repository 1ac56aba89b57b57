use std::fmt;

use serde::{Deserialize, Serialize};

use super::monomap::MonomialMap;
use super::poly::LaurentPolynomial;
use super::{AlgebraError, Rat};
use num_traits::One;

/// Dense matrix over the Laurent ring. Small by construction (nothing in the
/// crate needs more than 3x3), all arithmetic exact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaurentMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<LaurentPolynomial>,
}

impl LaurentMatrix {
    pub fn from_rows(rows: Vec<Vec<LaurentPolynomial>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        LaurentMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn zero(nvars: usize, rows: usize, cols: usize) -> Self {
        LaurentMatrix {
            rows,
            cols,
            entries: vec![LaurentPolynomial::zero(nvars); rows * cols],
        }
    }

    pub fn identity(nvars: usize, n: usize) -> Self {
        let mut m = Self::zero(nvars, n, n);
        for i in 0..n {
            *m.at_mut(i, i) = LaurentPolynomial::one(nvars);
        }
        m
    }

    /// 2x2 matrix from constant integer entries.
    pub fn from_ints(nvars: usize, e: [[i64; 2]; 2]) -> Self {
        Self::from_rows(vec![
            vec![
                LaurentPolynomial::constant(nvars, Rat::from_integer(e[0][0].into())),
                LaurentPolynomial::constant(nvars, Rat::from_integer(e[0][1].into())),
            ],
            vec![
                LaurentPolynomial::constant(nvars, Rat::from_integer(e[1][0].into())),
                LaurentPolynomial::constant(nvars, Rat::from_integer(e[1][1].into())),
            ],
        ])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nvars(&self) -> usize {
        self.entries
            .first()
            .map_or(0, LaurentPolynomial::nvars)
    }

    pub fn at(&self, i: usize, j: usize) -> &LaurentPolynomial {
        &self.entries[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut LaurentPolynomial {
        &mut self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> impl Iterator<Item = &LaurentPolynomial> {
        self.entries.iter()
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.cols != other.rows {
            return Err(AlgebraError::Dimension(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let nvars = self.nvars();
        let mut out = Self::zero(nvars, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = LaurentPolynomial::zero(nvars);
                for k in 0..self.cols {
                    acc = acc.checked_add(&self.at(i, k).checked_mul(other.at(k, j))?)?;
                }
                *out.at_mut(i, j) = acc;
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.checked_mul(other).expect("matrix dimension mismatch")
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a = a.checked_add(b).expect("context mismatch");
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Self {
        let mut out = self.clone();
        for a in out.entries.iter_mut() {
            *a = a.scale(c);
        }
        out
    }

    pub fn map<F: Fn(&LaurentPolynomial) -> LaurentPolynomial>(&self, f: F) -> Self {
        LaurentMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    /// Apply a monomial substitution to every entry.
    pub fn substitute(&self, map: &MonomialMap) -> Result<Self, AlgebraError> {
        let mut out = self.clone();
        for e in out.entries.iter_mut() {
            *e = map.substitute(e)?;
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.nvars(), self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *out.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self.at(i, j).is_one()
                    } else {
                        self.at(i, j).is_zero()
                    }
                })
            })
    }

    /// Determinant by cofactor expansion (fine for the sizes used here).
    pub fn det(&self) -> LaurentPolynomial {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let nvars = self.nvars();
        match self.rows {
            0 => LaurentPolynomial::one(nvars),
            1 => self.at(0, 0).clone(),
            2 => {
                let ad = self.at(0, 0).checked_mul(self.at(1, 1)).unwrap();
                let bc = self.at(0, 1).checked_mul(self.at(1, 0)).unwrap();
                ad.checked_add(&bc.scale(&-Rat::one())).unwrap()
            }
            n => {
                let mut acc = LaurentPolynomial::zero(nvars);
                for j in 0..n {
                    let mut sub = Vec::new();
                    for i in 1..n {
                        let mut row = Vec::new();
                        for k in 0..n {
                            if k != j {
                                row.push(self.at(i, k).clone());
                            }
                        }
                        sub.push(row);
                    }
                    let minor = LaurentMatrix::from_rows(sub).det();
                    let term = self.at(0, j).checked_mul(&minor).unwrap();
                    let sign = if j % 2 == 0 { Rat::one() } else { -Rat::one() };
                    acc = acc.checked_add(&term.scale(&sign)).unwrap();
                }
                acc
            }
        }
    }

    /// Exact 2x2 inverse. Requires the determinant to be a unit of the
    /// Laurent ring (a single nonzero term); the error carries the offending
    /// determinant.
    pub fn inverse_2x2(&self) -> Result<Self, AlgebraError> {
        assert_eq!((self.rows, self.cols), (2, 2));
        let det = self.det();
        let det_inv = det
            .unit_inverse()
            .map_err(|_| AlgebraError::NotInvertible {
                det: det.to_string(),
            })?;
        let neg = -Rat::one();
        let adj = LaurentMatrix::from_rows(vec![
            vec![self.at(1, 1).clone(), self.at(0, 1).scale(&neg)],
            vec![self.at(1, 0).scale(&neg), self.at(0, 0).clone()],
        ]);
        Ok(adj.map(|p| p.checked_mul(&det_inv).unwrap()))
    }

    /// Row-major array of canonical entry strings, for reports.
    pub fn to_string_rows(&self, names: &[&str]) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.at(i, j).to_string_with(names))
                    .collect()
            })
            .collect()
    }

    /// Extend every entry's variable context by `extra` trailing variables.
    pub fn extend_context(&self, extra: usize) -> Self {
        self.map(|p| p.extend_context(extra))
    }
}

impl fmt::Display for LaurentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.at(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat_int, ExpVec};

    fn mono(nvars: usize, e: &[i64], c: i64) -> LaurentPolynomial {
        LaurentPolynomial::monomial(nvars, ExpVec(e.to_vec()), rat_int(c))
    }

    #[test]
    fn quarter_turn_squares_to_minus_identity() {
        let j = LaurentMatrix::from_ints(2, [[0, -1], [1, 0]]);
        let jj = j.mul(&j);
        assert_eq!(jj, LaurentMatrix::from_ints(2, [[-1, 0], [0, -1]]));
    }

    #[test]
    fn diagonal_unit_inverse() {
        let m = LaurentMatrix::from_rows(vec![
            vec![mono(2, &[-2, 0], 1), LaurentPolynomial::zero(2)],
            vec![LaurentPolynomial::zero(2), mono(2, &[-1, 0], 1)],
        ]);
        let inv = m.inverse_2x2().unwrap();
        assert_eq!(*inv.at(0, 0), mono(2, &[2, 0], 1));
        assert_eq!(*inv.at(1, 1), mono(2, &[1, 0], 1));
        assert!(m.mul(&inv).is_identity());
    }

    #[test]
    fn non_unit_determinant_is_rejected() {
        let m = LaurentMatrix::from_rows(vec![
            vec![LaurentPolynomial::one(2), LaurentPolynomial::one(2)],
            vec![
                LaurentPolynomial::one(2),
                LaurentPolynomial::one(2)
                    .checked_add(&mono(2, &[1, 0], 1))
                    .unwrap(),
            ],
        ]);
        // det = w1, a unit: invertible
        assert!(m.inverse_2x2().is_ok());
        let m2 = LaurentMatrix::from_rows(vec![
            vec![LaurentPolynomial::one(2), mono(2, &[1, 0], -1)],
            vec![mono(2, &[0, 1], 1), LaurentPolynomial::zero(2)],
        ]);
        // det = w1*w2, still a unit
        assert!(m2.inverse_2x2().is_ok());
        let m3 = LaurentMatrix::from_rows(vec![
            vec![
                LaurentPolynomial::one(2)
                    .checked_add(&mono(2, &[1, 0], 1))
                    .unwrap(),
                LaurentPolynomial::zero(2),
            ],
            vec![LaurentPolynomial::zero(2), LaurentPolynomial::one(2)],
        ]);
        // det = 1 + w1: not a unit
        match m3.inverse_2x2() {
            Err(AlgebraError::NotInvertible { det }) => assert_eq!(det, "1 + w1^1"),
            other => panic!("expected NotInvertible, got {other:?}"),
        }
    }
}
