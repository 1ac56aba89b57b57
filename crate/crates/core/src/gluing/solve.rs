use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::exact::{is_regular_on_cone, ExpVec, LaurentMatrix, LaurentPolynomial, Rat};
use crate::fan::Covector;

use super::cocycle::TransitionCocycle;
use super::local_system::LocalSystem;
use super::{GluingError, TORUS_VARS};

/// Exact affine solve `A x = b`. Returns `None` when inconsistent,
/// otherwise a particular solution together with a nullspace basis.
fn solve_affine(rows: &[(Vec<Rat>, Rat)], ncols: usize) -> Option<(Vec<Rat>, Vec<Vec<Rat>>)> {
    let mut mat: Vec<Vec<Rat>> = rows
        .iter()
        .map(|(r, b)| {
            let mut v = r.clone();
            v.push(b.clone());
            v
        })
        .collect();
    let nrows = mat.len();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let Some(p) = (row..nrows).find(|&r| !mat[r][col].is_zero()) else {
            continue;
        };
        mat.swap(row, p);
        let inv = mat[row][col].clone().recip();
        for c in col..=ncols {
            mat[row][c] = &mat[row][c] * &inv;
        }
        for r in 0..nrows {
            if r != row && !mat[r][col].is_zero() {
                let factor = mat[r][col].clone();
                for c in col..=ncols {
                    let delta = &mat[row][c] * &factor;
                    mat[r][c] = &mat[r][c] - &delta;
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
        if row == nrows {
            break;
        }
    }
    // inconsistency: zero row with nonzero rhs
    for r in row..nrows {
        if !mat[r][ncols].is_zero() {
            return None;
        }
    }
    let mut particular = vec![Rat::zero(); ncols];
    for (r, &col) in pivot_cols.iter().enumerate() {
        particular[col] = mat[r][ncols].clone();
    }
    let free_cols: Vec<usize> = (0..ncols).filter(|c| !pivot_cols.contains(c)).collect();
    let mut basis = Vec::new();
    for &fc in &free_cols {
        let mut v = vec![Rat::zero(); ncols];
        v[fc] = Rat::one();
        for (r, &col) in pivot_cols.iter().enumerate() {
            v[col] = -mat[r][fc].clone();
        }
        basis.push(v);
    }
    Some((particular, basis))
}

/// Exact rational square root, if it exists.
fn rat_sqrt(r: &Rat) -> Option<Rat> {
    if r.is_negative() {
        return None;
    }
    let num = r.numer().sqrt();
    let den = r.denom().sqrt();
    if &(&num * &num) == r.numer() && &(&den * &den) == r.denom() {
        Some(Rat::new(num, den))
    } else {
        None
    }
}

/// Rational roots of `a t^2 + b t + c = 0` (all roots when a = b = 0, c = 0
/// is signalled as `None` meaning "any t").
fn quadratic_rational_roots(a: &Rat, b: &Rat, c: &Rat) -> Option<Vec<Rat>> {
    if a.is_zero() {
        if b.is_zero() {
            if c.is_zero() {
                return None; // identically zero: one-parameter family
            }
            return Some(vec![]);
        }
        return Some(vec![-(c / b)]);
    }
    let disc = &(b * b) - &(Rat::from(BigInt::from(4)) * a * c);
    match rat_sqrt(&disc) {
        None => Some(vec![]),
        Some(s) => {
            let two_a = Rat::from(BigInt::from(2)) * a;
            let r1 = (-(b.clone()) + s.clone()) / two_a.clone();
            let r2 = (-(b.clone()) - s) / two_a;
            let mut out = vec![r1.clone()];
            if r2 != r1 {
                out.push(r2);
            }
            Some(out)
        }
    }
}

/// Off-diagonal position, torus Fourier mode and scalar coefficient of one
/// correction factor.
pub type CorrectionEntry = ((usize, usize), (i64, i64), Rat);

/// One unipotent correction triple: per overlap (ordered `1<-0`, `2<-1`,
/// `0<-2`) the off-diagonal position, the torus Fourier mode of the
/// correction monomial, and its scalar coefficient. Zero coefficients are
/// normalized to position (1,0) and mode (0,0).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CorrectionSolution {
    pub entries: [CorrectionEntry; 3],
}

impl CorrectionSolution {
    fn normalized(mut self) -> Self {
        for e in &mut self.entries {
            if e.2.is_zero() {
                e.0 = (1, 0);
                e.1 = (0, 0);
            }
        }
        self
    }

    /// The three factors as matrices in torus coordinates.
    pub fn matrices(&self, nvars: usize) -> [LaurentMatrix; 3] {
        let build = |((r, c), (e1, e2), coeff): &CorrectionEntry| {
            let mut m = LaurentMatrix::identity(nvars, 2);
            let mut e = ExpVec::zeros(nvars);
            e.0[0] = *e1;
            e.0[1] = *e2;
            *m.at_mut(*r, *c) = LaurentPolynomial::monomial(nvars, e, coeff.clone());
            m
        };
        [
            build(&self.entries[0]),
            build(&self.entries[1]),
            build(&self.entries[2]),
        ]
    }
}

/// Result of the bounded correction search.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorrectionSearch {
    pub solutions: Vec<CorrectionSolution>,
    /// Candidate subsystems whose solution set had dimension two or more and
    /// was not resolved; zero for every search exercised here.
    pub unresolved_families: usize,
}

struct Candidate {
    pos: (usize, usize),
    exp: (i64, i64),
    matrix: LaurentMatrix, // E: single off-diagonal monomial, torus coords
}

fn candidates(bound: i64, wall: (i64, i64), nvars: usize) -> Vec<Candidate> {
    let mut out = Vec::new();
    let neg_wall = [[-wall.0, -wall.1]];
    for pos in [(1usize, 0usize), (0usize, 1usize)] {
        for e1 in -bound..=bound {
            for e2 in -bound..=bound {
                if (e1, e2) == (0, 0) {
                    // a wall-crossing factor carries a nonzero Fourier mode;
                    // a constant off-diagonal entry is a coboundary, not a
                    // correction
                    continue;
                }
                let mono = LaurentPolynomial::monomial(
                    nvars,
                    {
                        let mut e = ExpVec::zeros(nvars);
                        e.0[0] = e1;
                        e.0[1] = e2;
                        e
                    },
                    Rat::one(),
                );
                if !is_regular_on_cone(&mono, &neg_wall) {
                    continue;
                }
                let mut m = LaurentMatrix::zero(nvars, 2, 2);
                *m.at_mut(pos.0, pos.1) = mono;
                out.push(Candidate {
                    pos,
                    exp: (e1, e2),
                    matrix: m,
                });
            }
        }
    }
    out
}

/// Collect per-monomial linear equations from a matrix identity
/// `constant + sum_k t_k * coeff_k = 0` over selected positions.
fn matrix_rows(
    constant: &LaurentMatrix,
    coeffs: &[&LaurentMatrix],
    positions: &[(usize, usize)],
) -> Vec<(Vec<Rat>, Rat)> {
    let mut rows = Vec::new();
    for &(r, c) in positions {
        let mut monomials: BTreeSet<ExpVec> = BTreeSet::new();
        for (e, _) in constant.at(r, c).terms() {
            monomials.insert(e.clone());
        }
        for m in coeffs {
            for (e, _) in m.at(r, c).terms() {
                monomials.insert(e.clone());
            }
        }
        for mu in monomials {
            let coeff_of = |p: &LaurentPolynomial| {
                p.terms()
                    .find(|(e, _)| **e == mu)
                    .map(|(_, c)| c.clone())
                    .unwrap_or_else(Rat::zero)
            };
            let row: Vec<Rat> = coeffs.iter().map(|m| coeff_of(m.at(r, c))).collect();
            let rhs = -coeff_of(constant.at(r, c));
            rows.push((row, rhs));
        }
    }
    rows
}

/// Bounded search for unipotent wall-crossing corrections gluing a
/// semi-flat cocycle.
///
/// Each factor is `I + c * w^m` in a single off-diagonal entry with a
/// nonzero Fourier mode `m`, regular on its overlap and of sup-norm at most
/// `bound`; a factor may also degenerate to the identity (`c = 0`). With
/// the loop reduced to `W21(c1) W10(c0) = W02(c2)^{-1}` the system is
/// linear in `(c0, c1, c0 c1, c2)`, and the third overlap's factor is
/// determined rather than enumerated, so the search over the first two
/// overlaps is exhaustive and the result list is complete within the bound.
pub fn solve_unipotent_corrections(
    semiflat: &TransitionCocycle,
    twist: Option<&LocalSystem>,
    bound: i64,
) -> Result<CorrectionSearch, GluingError> {
    assert_eq!(
        semiflat.nvars, TORUS_VARS,
        "the bounded search runs on instantiated constants"
    );
    let n = semiflat.nvars;
    let k = twist
        .map(|ls| ls.twist_insertion(n))
        .unwrap_or_else(|| LaurentMatrix::identity(n, 2));
    let k_inv = k.inverse_2x2()?;

    let a10 = semiflat.transition_torus(1, 0)?;
    let a21 = semiflat.transition_torus(2, 1)?;
    let a02 = semiflat.transition_torus(0, 2)?;
    let a02_inv = a02.inverse_2x2()?;

    let wall = |i: usize, j: usize| -> Result<(i64, i64), GluingError> {
        let r = semiflat
            .walls
            .get(&(i, j))
            .ok_or(GluingError::NoSharedRay(i, j))?;
        Ok((r.0, r.1))
    };
    let cands0 = candidates(bound, wall(1, 0)?, n);
    let cands1 = candidates(bound, wall(2, 1)?, n);
    let wall02 = wall(0, 2)?;

    // fixed parts
    let p_base = k_inv.mul(&a21).mul(&k).mul(&a10); // Kinv A21 K A10

    let mut solutions: BTreeSet<CorrectionSolution> = BTreeSet::new();
    let mut unresolved = 0usize;

    for c0 in &cands0 {
        let q = p_base.mul(&c0.matrix); // coefficient of t0
        for c1 in &cands1 {
            let left = k_inv.mul(&a21).mul(&c1.matrix).mul(&k);
            let r = left.mul(&a10); // coefficient of t1
            let s = left.mul(&a10).mul(&c0.matrix); // coefficient of t0*t1
            // V(c) := P - A02inv + t0 Q + t1 R + t01 S must equal -t2 * E2 * A02inv.
            // For either off-diagonal slot of E2, one row of the identity is
            // free of t2; solve that row first.
            for pos2 in [(1usize, 0usize), (0usize, 1usize)] {
                // E2 at pos2 puts t2 into output row pos2.0; the other row
                // must vanish on its own.
                let free_row = 1 - pos2.0;
                let constant = p_base.add(&a02_inv.scale(&-Rat::one()));
                let rows = matrix_rows(
                    &constant,
                    &[&q, &r, &s],
                    &[(free_row, 0), (free_row, 1)],
                );
                let Some((part, basis)) = solve_affine(&rows, 3) else {
                    continue;
                };
                // impose t01 = t0 * t1 on the solution set
                let mut stage1: Vec<(Rat, Rat, Rat)> = Vec::new();
                match basis.len() {
                    0 => {
                        if part[2] == &part[0] * &part[1] {
                            stage1.push((part[0].clone(), part[1].clone(), part[2].clone()));
                        }
                    }
                    1 => {
                        let b = &basis[0];
                        // (p0 + t b0)(p1 + t b1) = p2 + t b2
                        let qa = &b[0] * &b[1];
                        let qb = &(&(&part[0] * &b[1]) + &(&part[1] * &b[0])) - &b[2];
                        let qc = &(&part[0] * &part[1]) - &part[2];
                        match quadratic_rational_roots(&qa, &qb, &qc) {
                            None => {
                                // any t works: a genuine one-parameter family
                                unresolved += 1;
                            }
                            Some(roots) => {
                                for t in roots {
                                    stage1.push((
                                        &part[0] + &(&t * &b[0]),
                                        &part[1] + &(&t * &b[1]),
                                        &part[2] + &(&t * &b[2]),
                                    ));
                                }
                            }
                        }
                    }
                    _ => {
                        unresolved += 1;
                    }
                }
                for (t0, t1, _) in stage1 {
                    // residual on the t2-carrying row determines c2 exactly
                    let mut v = constant.clone();
                    v = v.add(&q.scale(&t0));
                    v = v.add(&r.scale(&t1));
                    v = v.add(&s.scale(&(&t0 * &t1)));
                    // v + t2 * E2(pos2, w^e2) * A02inv = 0 on row pos2.0
                    // E2 * A02inv row pos2.0 = w^e2 * A02inv row pos2.1
                    let hot = pos2.0;
                    let src = pos2.1;
                    // match v[hot, c] = -t2 * w^e2 * a02inv[src, c]
                    let mut t2: Option<(Rat, (i64, i64))> = None;
                    let mut consistent = true;
                    for c in 0..2 {
                        let target = v.at(hot, c);
                        let base = a02_inv.at(src, c);
                        match (target.is_zero(), base.is_zero()) {
                            (true, true) => {}
                            (true, false) => {
                                // forces t2 = 0 unless already set nonzero
                                if let Some((ref val, _)) = t2 {
                                    if !val.is_zero() {
                                        consistent = false;
                                    }
                                } else {
                                    t2 = Some((Rat::zero(), (0, 0)));
                                }
                            }
                            (false, true) => {
                                consistent = false;
                            }
                            (false, false) => {
                                let (et, ct) = match target.as_monomial() {
                                    Some(x) => x,
                                    None => {
                                        consistent = false;
                                        break;
                                    }
                                };
                                let (eb, cb) = base.as_monomial().expect("monomial cocycle");
                                let exp = (et.0[0] - eb.0[0], et.0[1] - eb.0[1]);
                                let coeff = -(ct / cb);
                                match &t2 {
                                    None => t2 = Some((coeff, exp)),
                                    Some((val, e)) => {
                                        if *val != coeff || (!val.is_zero() && *e != exp) {
                                            consistent = false;
                                        }
                                    }
                                }
                            }
                        }
                        if !consistent {
                            break;
                        }
                    }
                    let Some((c2val, e2)) = t2 else {
                        continue;
                    };
                    if !consistent {
                        continue;
                    }
                    // mode, bound and regularity checks for the determined factor
                    if !c2val.is_zero() {
                        if e2 == (0, 0) {
                            continue;
                        }
                        if e2.0.abs() > bound || e2.1.abs() > bound {
                            continue;
                        }
                        if -(wall02.0) * e2.0 - wall02.1 * e2.1 < 0 {
                            continue;
                        }
                    }
                    let sol = CorrectionSolution {
                        entries: [
                            (c0.pos, c0.exp, t0.clone()),
                            (c1.pos, c1.exp, t1.clone()),
                            (pos2, e2, c2val),
                        ],
                    }
                    .normalized();
                    // verify end to end before accepting
                    let thetas = sol.matrices(n);
                    let defect = a02
                        .mul(&thetas[2])
                        .mul(&k_inv)
                        .mul(&a21)
                        .mul(&thetas[1])
                        .mul(&k)
                        .mul(&a10)
                        .mul(&thetas[0]);
                    if defect.is_identity() {
                        solutions.insert(sol);
                    }
                }
            }
        }
    }

    Ok(CorrectionSearch {
        solutions: solutions.into_iter().collect(),
        unresolved_families: unresolved,
    })
}

/// Triangular elimination for the correction coefficients at fixed
/// positions and exponents, valid in any constant mode (the coefficients
/// come out as Laurent polynomials in the constants). Returns `None` when
/// the elimination stalls or the system is inconsistent.
pub fn recover_corrections_at(
    semiflat: &TransitionCocycle,
    twist: Option<&LocalSystem>,
    candidates: &[((usize, usize), Covector); 3],
) -> Result<Option<[LaurentPolynomial; 3]>, GluingError> {
    let n = semiflat.nvars;
    let ext = n + 3;

    let lift = |m: &LaurentMatrix| m.extend_context(3);
    let k = twist
        .map(|ls| ls.twist_insertion(ext))
        .unwrap_or_else(|| LaurentMatrix::identity(ext, 2));
    let k_inv = k.inverse_2x2()?;
    let a10 = lift(&semiflat.transition_torus(1, 0)?);
    let a21 = lift(&semiflat.transition_torus(2, 1)?);
    let a02 = lift(&semiflat.transition_torus(0, 2)?);

    let theta = |idx: usize| -> LaurentMatrix {
        let ((r, c), mode) = candidates[idx];
        let mut e = ExpVec::zeros(ext);
        e.0[0] = mode.0;
        e.0[1] = mode.1;
        e.0[n + idx] = 1;
        let mut m = LaurentMatrix::identity(ext, 2);
        *m.at_mut(r, c) = LaurentPolynomial::monomial(ext, e, Rat::one());
        m
    };

    let defect = a02
        .mul(&theta(2))
        .mul(&k_inv)
        .mul(&a21)
        .mul(&theta(1))
        .mul(&k)
        .mul(&a10)
        .mul(&theta(0));
    let mut equations = Vec::new();
    let identity = LaurentMatrix::identity(ext, 2);
    for r in 0..2 {
        for c in 0..2 {
            let eq = defect.at(r, c).checked_add(&identity.at(r, c).scale(&-Rat::one()))?;
            if !eq.is_zero() {
                equations.push(eq);
            }
        }
    }

    let cvar_range = n..ext;
    let cvars_in = |p: &LaurentPolynomial| -> BTreeSet<usize> {
        let mut s = BTreeSet::new();
        for (e, _) in p.terms() {
            for v in cvar_range.clone() {
                if e.0[v] != 0 {
                    s.insert(v);
                }
            }
        }
        s
    };
    // split p = p0 + c_v * p1, both free of c_v (multilinear by construction)
    let split = |p: &LaurentPolynomial, v: usize| -> (LaurentPolynomial, LaurentPolynomial) {
        let mut p0 = LaurentPolynomial::zero(ext);
        let mut p1 = LaurentPolynomial::zero(ext);
        for (e, c) in p.terms() {
            match e.0[v] {
                0 => {
                    p0 = p0
                        .checked_add(&LaurentPolynomial::monomial(ext, e.clone(), c.clone()))
                        .unwrap()
                }
                1 => {
                    let mut e2 = e.clone();
                    e2.0[v] = 0;
                    p1 = p1
                        .checked_add(&LaurentPolynomial::monomial(ext, e2, c.clone()))
                        .unwrap()
                }
                _ => unreachable!("corrections enter each path at most once"),
            }
        }
        (p0, p1)
    };

    let mut values: BTreeMap<usize, LaurentPolynomial> = BTreeMap::new();
    loop {
        // eliminate any equation holding exactly one unknown, linearly, with
        // a unit coefficient
        let mut progressed = false;
        for eq in &equations {
            let vars = cvars_in(eq);
            if vars.len() != 1 {
                continue;
            }
            let v = *vars.iter().next().unwrap();
            let (p0, p1) = split(eq, v);
            if !p1.is_unit() {
                continue;
            }
            let value = (&-&p0) * &p1.unit_inverse()?;
            if !cvars_in(&value).is_empty() {
                continue;
            }
            values.insert(v, value.clone());
            equations = equations
                .iter()
                .map(|q| {
                    let (q0, q1) = split(q, v);
                    &q0 + &(&value * &q1)
                })
                .filter(|q| !q.is_zero())
                .collect();
            progressed = true;
            break;
        }
        if !progressed {
            break;
        }
    }

    if !equations.is_empty() {
        return Ok(None);
    }
    let mut out = Vec::new();
    for idx in 0..3 {
        let v = values.get(&(n + idx)).cloned().unwrap_or_else(|| {
            // unconstrained coefficient: the factor is irrelevant, take zero
            LaurentPolynomial::zero(ext)
        });
        out.push(project_context(&v, n));
    }
    Ok(Some([out[0].clone(), out[1].clone(), out[2].clone()]))
}

fn project_context(p: &LaurentPolynomial, new_n: usize) -> LaurentPolynomial {
    let mut out = LaurentPolynomial::zero(new_n);
    for (e, c) in p.terms() {
        assert!(e.0[new_n..].iter().all(|&x| x == 0));
        out = out
            .checked_add(&LaurentPolynomial::monomial(
                new_n,
                ExpVec(e.0[..new_n].to_vec()),
                c.clone(),
            ))
            .unwrap();
    }
    out
}

/// Result of the bounded intertwiner solve.
#[derive(Clone, Debug)]
pub struct IntertwinerResult {
    /// Dimension of the space of chartwise maps satisfying all relations
    /// within the exponent bound.
    pub family_dim: usize,
    /// Invertible representatives found (unit determinant, chart-regular
    /// inverse), canonically normalized.
    pub witnesses: Vec<[LaurentMatrix; 3]>,
}

/// Negated generators of chart `k`'s cone: a monomial is regular on the
/// chart when it pairs nonnegatively against both.
fn chart_regularity_gens(k: usize) -> [[i64; 2]; 2] {
    match k {
        0 => [[1, 0], [0, 1]],
        1 => [[-1, -1], [0, 1]],
        _ => [[-1, -1], [1, 0]],
    }
}

/// Solve `f_i a_{ij} = b_{ij} f_j` for chartwise matrices with bounded,
/// chart-regular monomial entries, by exact linear algebra over the
/// rationals. Returns the solution-space dimension and the invertible
/// representatives found among basis vectors and seeded random combinations.
pub fn solve_intertwiner(
    a: &TransitionCocycle,
    b: &TransitionCocycle,
    bound: i64,
    seed: u64,
) -> Result<IntertwinerResult, GluingError> {
    assert_eq!(a.nvars, TORUS_VARS, "intertwiner solve runs instantiated");
    assert_eq!(b.nvars, TORUS_VARS);
    let n = a.nvars;
    let rank = 2usize;

    // unknown layout: (chart, row, col, exponent) -> column index
    let mut unknowns: Vec<(usize, usize, usize, (i64, i64))> = Vec::new();
    let mut exps_per_chart: Vec<Vec<(i64, i64)>> = Vec::new();
    for k in 0..3 {
        let gens = chart_regularity_gens(k);
        let mut exps = Vec::new();
        for e1 in -bound..=bound {
            for e2 in -bound..=bound {
                if gens
                    .iter()
                    .all(|g| g[0] * e1 + g[1] * e2 >= 0)
                {
                    exps.push((e1, e2));
                }
            }
        }
        exps_per_chart.push(exps);
    }
    for (k, exps) in exps_per_chart.iter().enumerate() {
        for r in 0..rank {
            for c in 0..rank {
                for e in exps {
                    unknowns.push((k, r, c, *e));
                }
            }
        }
    }
    let ncols = unknowns.len();
    let col_of: BTreeMap<(usize, usize, usize, (i64, i64)), usize> = unknowns
        .iter()
        .enumerate()
        .map(|(i, u)| (*u, i))
        .collect();

    // equations: per overlap, per position, per monomial
    let mut rows: Vec<(Vec<Rat>, Rat)> = Vec::new();
    for (i, j) in [(1usize, 0usize), (2, 1), (0, 2)] {
        let aij = a.transition_torus(i, j)?;
        let bij = b.transition_torus(i, j)?;
        // f_i * a_{ij} - b_{ij} * f_j = 0
        // coefficient of unknown (i, r, s, e) in position (r, c): a[s, c] shifted by e
        // coefficient of unknown (j, s, c, e) in position (r, c): -b[r, s] shifted by e
        for r in 0..rank {
            for c in 0..rank {
                // collect contributions per monomial
                let mut contrib: BTreeMap<ExpVec, Vec<(usize, Rat)>> = BTreeMap::new();
                for s in 0..rank {
                    for e in &exps_per_chart[i] {
                        let col = col_of[&(i, r, s, *e)];
                        for (ae, ac) in aij.at(s, c).terms() {
                            let mut key = ae.clone();
                            key.0[0] += e.0;
                            key.0[1] += e.1;
                            contrib.entry(key).or_default().push((col, ac.clone()));
                        }
                    }
                    for e in &exps_per_chart[j] {
                        let col = col_of[&(j, s, c, *e)];
                        for (be, bc) in bij.at(r, s).terms() {
                            let mut key = be.clone();
                            key.0[0] += e.0;
                            key.0[1] += e.1;
                            contrib.entry(key).or_default().push((col, -bc.clone()));
                        }
                    }
                }
                for (_, entries) in contrib {
                    let mut row = vec![Rat::zero(); ncols];
                    for (col, val) in entries {
                        row[col] = &row[col] + &val;
                    }
                    if row.iter().any(|x| !x.is_zero()) {
                        rows.push((row, Rat::zero()));
                    }
                }
            }
        }
    }

    let (_, basis) = solve_affine(&rows, ncols).expect("homogeneous system is consistent");
    let family_dim = basis.len();

    let to_matrices = |coeffs: &[Rat]| -> [LaurentMatrix; 3] {
        let mut out = [
            LaurentMatrix::zero(n, rank, rank),
            LaurentMatrix::zero(n, rank, rank),
            LaurentMatrix::zero(n, rank, rank),
        ];
        for (idx, (k, r, c, e)) in unknowns.iter().enumerate() {
            if coeffs[idx].is_zero() {
                continue;
            }
            let mut exp = ExpVec::zeros(n);
            exp.0[0] = e.0;
            exp.0[1] = e.1;
            let mono = LaurentPolynomial::monomial(n, exp, coeffs[idx].clone());
            let cur = out[*k].at(*r, *c).checked_add(&mono).unwrap();
            *out[*k].at_mut(*r, *c) = cur;
        }
        out
    };

    let normalize = |v: &[Rat]| -> Vec<Rat> {
        match v.iter().find(|x| !x.is_zero()) {
            None => v.to_vec(),
            Some(first) => {
                let inv = first.clone().recip();
                v.iter().map(|x| x * &inv).collect()
            }
        }
    };

    let invertible = |f: &[LaurentMatrix; 3]| -> bool {
        f.iter().enumerate().all(|(k, m)| {
            let det = m.det();
            if !det.is_unit() {
                return false;
            }
            let inv = m.inverse_2x2().expect("unit determinant");
            let gens = chart_regularity_gens(k);
            let regular = inv.entries().all(|p| is_regular_on_cone(p, &gens));
            regular
        })
    };

    let mut witnesses: Vec<[LaurentMatrix; 3]> = Vec::new();
    let mut seen: BTreeSet<Vec<Rat>> = BTreeSet::new();
    let mut consider = |coeffs: Vec<Rat>, witnesses: &mut Vec<[LaurentMatrix; 3]>| {
        let norm = normalize(&coeffs);
        if !seen.insert(norm.clone()) {
            return;
        }
        let f = to_matrices(&norm);
        if invertible(&f) {
            witnesses.push(f);
        }
    };

    for v in &basis {
        consider(v.clone(), &mut witnesses);
    }
    if family_dim > 1 {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..64 {
            let mut combo = vec![Rat::zero(); ncols];
            for v in &basis {
                let lambda = Rat::from(BigInt::from(rng.gen_range(-4i64..=4)));
                for (slot, x) in combo.iter_mut().zip(v) {
                    *slot = &*slot + &(&lambda * x);
                }
            }
            consider(combo, &mut witnesses);
        }
    }

    Ok(IntertwinerResult {
        family_dim,
        witnesses,
    })
}

/// Scale-invariant equality of two chartwise matrix triples: `g = lambda f`
/// for one global nonzero scalar.
pub fn equal_up_to_scalar(f: &[LaurentMatrix; 3], g: &[LaurentMatrix; 3]) -> bool {
    let mut ratio: Option<Rat> = None;
    for (mf, mg) in f.iter().zip(g) {
        for r in 0..mf.rows() {
            for c in 0..mf.cols() {
                let pf = mf.at(r, c);
                let pg = mg.at(r, c);
                if pf.is_zero() != pg.is_zero() {
                    return false;
                }
                if pf.is_zero() {
                    continue;
                }
                if pf.num_terms() != pg.num_terms() {
                    return false;
                }
                for ((ef, cf), (eg, cg)) in pf.terms().zip(pg.terms()) {
                    if ef != eg {
                        return false;
                    }
                    let q = cg / cf;
                    match &ratio {
                        None => ratio = Some(q),
                        Some(r0) => {
                            if *r0 != q {
                                return false;
                            }
                        }
                    }
                }
            }
        }
    }
    true
}
