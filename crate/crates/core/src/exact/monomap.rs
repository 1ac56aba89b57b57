use serde::{Deserialize, Serialize};

use super::poly::{ExpVec, LaurentPolynomial};
use super::AlgebraError;

/// Monomial substitution map: variable `i` maps to the monomial whose
/// exponent vector is row `i`. Acting on a monomial replaces its exponent
/// `e` by `e · matrix`; composition of maps is integer matrix product.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialMap {
    rows: Vec<Vec<i64>>,
}

impl MonomialMap {
    pub fn new(rows: Vec<Vec<i64>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "map matrix must be square");
        MonomialMap { rows }
    }

    pub fn identity(n: usize) -> Self {
        MonomialMap {
            rows: (0..n)
                .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
                .collect(),
        }
    }

    /// Embed a 2x2 torus block into an `n`-variable context, acting as the
    /// identity on the remaining (parameter) variables.
    pub fn from_torus_block(block: [[i64; 2]; 2], n: usize) -> Self {
        let mut m = Self::identity(n);
        m.rows[0][0] = block[0][0];
        m.rows[0][1] = block[0][1];
        m.rows[1][0] = block[1][0];
        m.rows[1][1] = block[1][1];
        m
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn apply_exp(&self, e: &ExpVec) -> ExpVec {
        assert_eq!(e.len(), self.dim(), "exponent/context dimension mismatch");
        let n = self.dim();
        let mut out = vec![0i64; n];
        for (i, &ei) in e.0.iter().enumerate() {
            if ei == 0 {
                continue;
            }
            for j in 0..n {
                out[j] += ei * self.rows[i][j];
            }
        }
        ExpVec(out)
    }

    /// Substitute into a polynomial: exponents transform, coefficients do not.
    pub fn substitute(&self, p: &LaurentPolynomial) -> Result<LaurentPolynomial, AlgebraError> {
        if p.nvars() != self.dim() {
            return Err(AlgebraError::ContextMismatch(p.nvars(), self.dim()));
        }
        let mut out = LaurentPolynomial::zero(p.nvars());
        for (e, c) in p.terms() {
            let m = LaurentPolynomial::monomial(p.nvars(), self.apply_exp(e), c.clone());
            out = out.checked_add(&m)?;
        }
        Ok(out)
    }

    /// `self` then `other` (exponent row-vector convention: e · A · B).
    pub fn compose(&self, other: &MonomialMap) -> MonomialMap {
        assert_eq!(self.dim(), other.dim());
        let n = self.dim();
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| self.rows[i][k] * other.rows[k][j]).sum())
                    .collect()
            })
            .collect();
        MonomialMap { rows }
    }

    pub fn det(&self) -> i64 {
        det_int(&self.rows)
    }

    /// Integer inverse; exists exactly when the determinant is ±1.
    pub fn inverse(&self) -> Result<MonomialMap, AlgebraError> {
        let n = self.dim();
        let d = self.det();
        if d != 1 && d != -1 {
            return Err(AlgebraError::NonUnimodular(d));
        }
        let mut adj = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                let minor = minor_matrix(&self.rows, i, j);
                let cof = det_int(&minor) * if (i + j) % 2 == 0 { 1 } else { -1 };
                adj[j][i] = cof * d; // divide by det = multiply, since det = ±1
            }
        }
        Ok(MonomialMap { rows: adj })
    }
}

fn minor_matrix(m: &[Vec<i64>], skip_i: usize, skip_j: usize) -> Vec<Vec<i64>> {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != skip_i)
        .map(|(_, row)| {
            row.iter()
                .enumerate()
                .filter(|(j, _)| *j != skip_j)
                .map(|(_, &v)| v)
                .collect()
        })
        .collect()
}

fn det_int(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    match n {
        0 => 1,
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => (0..n)
            .map(|j| {
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * det_int(&minor_matrix(m, 0, j))
            })
            .sum(),
    }
}
