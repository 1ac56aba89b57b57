use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{AlgebraError, Rat};

/// Integer exponent vector of a Laurent monomial. Componentwise addition is
/// the monomial product; ordering is lexicographic, which fixes a canonical
/// term order for display and hashing.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ExpVec(pub Vec<i64>);

impl ExpVec {
    pub fn zeros(n: usize) -> Self {
        ExpVec(vec![0; n])
    }

    /// Unit exponent: variable `i` to the first power.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        ExpVec(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &ExpVec) -> ExpVec {
        ExpVec(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn neg(&self) -> ExpVec {
        ExpVec(self.0.iter().map(|a| -a).collect())
    }

    /// Pairing against an integer covector/vector of the same length prefix.
    pub fn dot(&self, v: &[i64]) -> i64 {
        self.0.iter().zip(v).map(|(a, b)| a * b).sum()
    }

    /// The first `k` components (the torus block of an extended context).
    pub fn torus_part(&self, k: usize) -> &[i64] {
        &self.0[..k]
    }
}

/// Sparse Laurent polynomial with exact rational coefficients.
///
/// Invariants: no stored zero coefficients; all exponent vectors have length
/// `nvars`. Equality is term-map equality, which is canonical because the
/// term map is ordered.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaurentPolynomial {
    nvars: usize,
    terms: BTreeMap<ExpVec, Rat>,
}

impl LaurentPolynomial {
    pub fn zero(nvars: usize) -> Self {
        LaurentPolynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(ExpVec::zeros(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rat::one())
    }

    pub fn monomial(nvars: usize, exp: ExpVec, c: Rat) -> Self {
        assert_eq!(exp.len(), nvars, "exponent length must match context");
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(exp, c);
        }
        p
    }

    /// Monomial `var_i^k` with coefficient 1.
    pub fn var(nvars: usize, i: usize, k: i64) -> Self {
        let mut e = ExpVec::zeros(nvars);
        e.0[i] = k;
        Self::monomial(nvars, e, Rat::one())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExpVec, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .all(|(e, c)| e.is_zero() && c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.is_zero())
    }

    /// The constant coefficient (zero if absent).
    pub fn constant_term(&self) -> Rat {
        self.terms
            .get(&ExpVec::zeros(self.nvars))
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    /// Single-term view, if this polynomial is a (nonzero) monomial.
    pub fn as_monomial(&self) -> Option<(&ExpVec, &Rat)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// True iff the polynomial is a unit of the Laurent ring: exactly one
    /// term with nonzero coefficient.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1
    }

    /// Inverse of a unit (single-term) polynomial.
    pub fn unit_inverse(&self) -> Result<LaurentPolynomial, AlgebraError> {
        match self.as_monomial() {
            Some((e, c)) => Ok(Self::monomial(self.nvars, e.neg(), c.recip())),
            None => Err(AlgebraError::NotAUnit(self.to_string())),
        }
    }

    fn check_ctx(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.nvars != other.nvars {
            Err(AlgebraError::ContextMismatch(self.nvars, other.nvars))
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_ctx(other)?;
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let entry = terms.entry(e.clone()).or_insert_with(Rat::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(e);
            }
        }
        Ok(LaurentPolynomial {
            nvars: self.nvars,
            terms,
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_ctx(other)?;
        let mut terms: BTreeMap<ExpVec, Rat> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.add(eb);
                let entry = terms.entry(e.clone()).or_insert_with(Rat::zero);
                *entry += ca * cb;
                if entry.is_zero() {
                    terms.remove(&e);
                }
            }
        }
        Ok(LaurentPolynomial {
            nvars: self.nvars,
            terms,
        })
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        LaurentPolynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, t)| (e.clone(), t * c)).collect(),
        }
    }

    /// Multiply every exponent vector by a fixed shift (monomial product).
    pub fn mul_monomial(&self, exp: &ExpVec, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        LaurentPolynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, t)| (e.add(exp), t * c))
                .collect(),
        }
    }

    /// Replace variables `from..nvars` by rational values, keeping the first
    /// `from` variables. Negative exponents require nonzero values.
    pub fn eval_tail_vars(&self, from: usize, values: &[Rat]) -> Result<Self, AlgebraError> {
        assert_eq!(from + values.len(), self.nvars);
        let mut out = Self::zero(from);
        for (e, c) in &self.terms {
            let mut coeff = c.clone();
            for (k, v) in values.iter().enumerate() {
                let pow = e.0[from + k];
                if pow == 0 {
                    continue;
                }
                if v.is_zero() {
                    return Err(AlgebraError::NotAUnit(format!(
                        "zero value for variable {} with exponent {}",
                        from + k,
                        pow
                    )));
                }
                let mut base = v.clone();
                if pow < 0 {
                    base = base.recip();
                }
                for _ in 0..pow.unsigned_abs() {
                    coeff *= base.clone();
                }
            }
            let head = ExpVec(e.0[..from].to_vec());
            let add = Self::monomial(from, head, coeff);
            out = out.checked_add(&add)?;
        }
        Ok(out)
    }

    /// Extend the context by appending `extra` fresh variables (exponent 0).
    pub fn extend_context(&self, extra: usize) -> Self {
        LaurentPolynomial {
            nvars: self.nvars + extra,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut v = e.0.clone();
                    v.extend(std::iter::repeat_n(0, extra));
                    (ExpVec(v), c.clone())
                })
                .collect(),
        }
    }

    /// Canonical text form with explicit variable names.
    pub fn to_string_with(&self, names: &[&str]) -> String {
        assert!(names.len() >= self.nvars);
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = if neg { -c.clone() } else { c.clone() };
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else if neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let vars: Vec<String> = e
                .0
                .iter()
                .enumerate()
                .filter(|(_, &p)| p != 0)
                .map(|(k, &p)| format!("{}^{}", names[k], p))
                .collect();
            if vars.is_empty() {
                out.push_str(&format_rat(&mag));
            } else {
                if !mag.is_one() {
                    out.push_str(&format_rat(&mag));
                    out.push('*');
                }
                out.push_str(&vars.join("*"));
            }
        }
        out
    }
}

fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Default variable names: torus coordinates first, then the gluing
/// constants used in parametric mode.
pub(crate) const DEFAULT_NAMES: [&str; 7] = ["w1", "w2", "a0", "b0", "a1", "b1", "a2"];

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_with(&DEFAULT_NAMES[..self.nvars.max(2)]))
    }
}

impl Add for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn add(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        self.checked_add(rhs).expect("context mismatch in +")
    }
}

impl Sub for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn sub(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        self.checked_add(&rhs.neg()).expect("context mismatch in -")
    }
}

impl Mul for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn mul(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        self.checked_mul(rhs).expect("context mismatch in *")
    }
}

impl Neg for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn neg(self) -> LaurentPolynomial {
        self.scale(&-Rat::one())
    }
}

/// True iff every exponent of `p` (torus block) pairs nonnegatively against
/// every listed lattice generator, i.e. lies in the dual cone of the cone the
/// generators span.
pub fn is_regular_on_cone(p: &LaurentPolynomial, generators: &[[i64; 2]]) -> bool {
    p.terms().all(|(e, _)| {
        generators
            .iter()
            .all(|g| e.torus_part(2).iter().zip(g).map(|(a, b)| a * b).sum::<i64>() >= 0)
    })
}
