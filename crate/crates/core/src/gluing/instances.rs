use std::collections::BTreeMap;

use num_traits::One;

use crate::cover::{build_l, build_l_prime};
use crate::exact::{ExpVec, LaurentMatrix, LaurentPolynomial, Rat};
use crate::fan::{Covector, Vector};

use super::cocycle::{semiflat_cocycle, ChartFrame, OverlapPairing, PairingEdge, TransitionCocycle};
use super::local_system::LocalSystem;
use super::{chart_to_torus, ConstName, Constants, GluingError};


fn chart_mono(nvars: usize, chart: (i64, i64), c: Rat) -> LaurentPolynomial {
    // exponents given directly in chart coordinates
    let mut e = ExpVec::zeros(nvars);
    e.0[0] = chart.0;
    e.0[1] = chart.1;
    LaurentPolynomial::monomial(nvars, e, c)
}

/// Tangent frames: basis vector `r` of chart `k` differentiates along the
/// `r`-th chart coordinate, whose torus weight is the corresponding chart
/// monomial exponent.
pub fn tangent_frames() -> Vec<ChartFrame> {
    vec![
        ChartFrame {
            chart: 0,
            basis_labels: vec!["d_w01".into(), "d_w02".into()],
            weights: vec![Covector(1, 0), Covector(0, 1)],
        },
        ChartFrame {
            chart: 1,
            basis_labels: vec!["d_w10".into(), "d_w12".into()],
            weights: vec![Covector(-1, 0), Covector(-1, 1)],
        },
        ChartFrame {
            chart: 2,
            basis_labels: vec!["d_w20".into(), "d_w21".into()],
            weights: vec![Covector(0, -1), Covector(1, -1)],
        },
    ]
}

/// The transition cocycle of the holomorphic tangent bundle in the three
/// inhomogeneous charts, each matrix written in the source chart's
/// coordinates.
pub fn reference_tangent_cocycle(nvars: usize) -> TransitionCocycle {
    let one = Rat::one;
    let t10 = LaurentMatrix::from_rows(vec![
        vec![chart_mono(nvars, (-2, 0), -one()), LaurentPolynomial::zero(nvars)],
        vec![chart_mono(nvars, (-2, 1), -one()), chart_mono(nvars, (-1, 0), one())],
    ]);
    let t21 = LaurentMatrix::from_rows(vec![
        vec![chart_mono(nvars, (0, -1), one()), chart_mono(nvars, (1, -2), -one())],
        vec![LaurentPolynomial::zero(nvars), chart_mono(nvars, (0, -2), -one())],
    ]);
    let t02 = LaurentMatrix::from_rows(vec![
        vec![chart_mono(nvars, (-2, 1), -one()), chart_mono(nvars, (-1, 0), one())],
        vec![chart_mono(nvars, (-2, 0), -one()), LaurentPolynomial::zero(nvars)],
    ]);

    let transitions = BTreeMap::from([((1, 0), t10), ((2, 1), t21), ((0, 2), t02)]);
    let walls = BTreeMap::from([
        ((1, 0), Vector(0, -1)),
        ((2, 1), Vector(1, 1)),
        ((0, 2), Vector(-1, 0)),
    ]);
    TransitionCocycle {
        nvars,
        frames: tangent_frames(),
        transitions,
        chart_maps: (0..3).map(|k| chart_to_torus(k, nvars)).collect(),
        walls,
    }
}

/// Frame basis orders for the semi-flat bundle of the connected degree-2
/// multi-section: the second chart lists its sheets in (minus, plus) order
/// so that the antidiagonal overlap comes out antidiagonal.
pub fn l_basis_orders() -> Vec<Vec<String>> {
    vec![
        vec!["0+".into(), "0-".into()],
        vec!["1+".into(), "1-".into()],
        vec!["2-".into(), "2+".into()],
    ]
}

/// Semi-flat cocycle of the connected multi-section: diagonal on the first
/// two overlaps, antidiagonal on the third.
pub fn l_semiflat(constants: &Constants) -> Result<TransitionCocycle, GluingError> {
    constants.check_nonzero()?;
    let ms = build_l();
    let edge = |from: &str, to: &str, c: ConstName| PairingEdge {
        from: from.into(),
        to: to.into(),
        coeff: constants.value(c),
    };
    let pairings = vec![
        OverlapPairing {
            to_chart: 1,
            from_chart: 0,
            edges: vec![edge("0+", "1+", ConstName::A0), edge("0-", "1-", ConstName::B0)],
        },
        OverlapPairing {
            to_chart: 2,
            from_chart: 1,
            edges: vec![edge("1+", "2-", ConstName::A1), edge("1-", "2+", ConstName::B1)],
        },
        OverlapPairing {
            to_chart: 0,
            from_chart: 2,
            edges: vec![edge("2-", "0-", ConstName::A2), edge("2+", "0+", ConstName::B2)],
        },
    ];
    semiflat_cocycle(&ms, &l_basis_orders(), &pairings, constants.nvars())
}

/// The three unipotent wall-crossing factors correcting the semi-flat
/// cocycle, each written in its source chart's coordinates:
/// `I + E_21 * coeff * monomial` with Fourier modes (-1,1), (0,-1), (1,0)
/// in torus coordinates.
pub fn wall_factors(constants: &Constants) -> Result<[LaurentMatrix; 3], GluingError> {
    constants.check_nonzero()?;
    let n = constants.nvars();
    let v = |c: ConstName| constants.value(c);

    let coeff10 = (&(&v(ConstName::A0) * &v(ConstName::B1)) * &v(ConstName::A2))
        .scale(&-Rat::one());
    let coeff21 = (&(&v(ConstName::B0) * &v(ConstName::B1)) * &v(ConstName::A2))
        .unit_inverse()?
        .scale(&-Rat::one());
    let coeff02 = (&(&v(ConstName::A0) * &v(ConstName::B1)) * &v(ConstName::B2)).unit_inverse()?;

    // torus exponents of the correction monomials, converted chartwise
    let build = |chart: usize, torus_exp: (i64, i64), coeff: LaurentPolynomial| {
        let to_chart = chart_to_torus(chart, n).inverse().expect("unimodular");
        let mut e = ExpVec::zeros(n);
        e.0[0] = torus_exp.0;
        e.0[1] = torus_exp.1;
        let entry = coeff.mul_monomial(&to_chart.apply_exp(&e), &Rat::one());
        let mut m = LaurentMatrix::identity(n, 2);
        *m.at_mut(1, 0) = entry;
        m
    };

    Ok([
        build(0, (-1, 1), coeff10),
        build(1, (0, -1), coeff21),
        build(2, (1, 0), coeff02),
    ])
}

/// Corrected transitions `t'_{ij} = t^{sf}_{ij} * Theta_{ij}` without any
/// twist insertions, in chart coordinates.
pub fn corrected_transitions(constants: &Constants) -> Result<TransitionCocycle, GluingError> {
    let mut sf = l_semiflat(constants)?;
    let thetas = wall_factors(constants)?;
    for ((i, j), theta) in [(1usize, 0usize), (2, 1), (0, 2)].into_iter().zip(thetas) {
        let t = sf.transition(i, j)?.mul(&theta);
        sf.set_transition(i, j, t);
    }
    Ok(sf)
}

/// The full corrected cocycle including the local-system twist: the
/// quarter-turn is inserted after the first overlap and removed before the
/// last, exactly where the pushforward trivialization changes.
pub fn corrected_cocycle(
    constants: &Constants,
    ls: &LocalSystem,
) -> Result<TransitionCocycle, GluingError> {
    let mut c = corrected_transitions(constants)?;
    let n = constants.nvars();
    let k = ls.twist_insertion(n);
    let k_inv = k.inverse_2x2()?;
    let t10 = k.mul(c.transition(1, 0)?);
    let t02 = c.transition(0, 2)?.mul(&k_inv);
    c.set_transition(1, 0, t10);
    c.set_transition(0, 2, t02);
    Ok(c)
}

/// Loop defect of the twisted corrected transitions: the identity exactly
/// when the constants satisfy the determinant constraint and the local
/// system has holonomy -1.
pub fn twisted_corrected_defect(
    semiflat: &TransitionCocycle,
    thetas: &[LaurentMatrix; 3],
    ls: &LocalSystem,
) -> Result<LaurentMatrix, GluingError> {
    let n = semiflat.nvars;
    let k = ls.twist_insertion(n);
    let k_inv = k.inverse_2x2()?;
    let torus = |i: usize, j: usize, theta: &LaurentMatrix| -> Result<LaurentMatrix, GluingError> {
        let m = semiflat.transition(i, j)?.mul(theta);
        Ok(m.substitute(&semiflat.chart_maps[j])?)
    };
    let t10 = torus(1, 0, &thetas[0])?;
    let t21 = torus(2, 1, &thetas[1])?;
    let t02 = torus(0, 2, &thetas[2])?;
    Ok(t02.mul(&k_inv).mul(&t21).mul(&k).mul(&t10))
}

/// The chartwise matrices of the isomorphism from the tangent cocycle to
/// the corrected cocycle. The middle and last matrices repair two sign
/// typos in the usual printed form; all three relations are verified
/// exactly in the tests.
pub fn reference_intertwiner(constants: &Constants) -> Result<[LaurentMatrix; 3], GluingError> {
    constants.check_nonzero()?;
    let n = constants.nvars();
    let v = |c: ConstName| constants.value(c);
    let zero = || LaurentPolynomial::zero(n);
    let a0b1a2 = &(&v(ConstName::A0) * &v(ConstName::B1)) * &v(ConstName::A2);
    let f0 = LaurentMatrix::from_rows(vec![
        vec![LaurentPolynomial::one(n), zero()],
        vec![zero(), a0b1a2],
    ]);
    let a1b2_inv = (&v(ConstName::A1) * &v(ConstName::B2)).unit_inverse()?;
    let f1 = LaurentMatrix::from_rows(vec![
        vec![zero(), a1b2_inv],
        vec![v(ConstName::A0).scale(&-Rat::one()), zero()],
    ]);
    let b2_inv = v(ConstName::B2).unit_inverse()?;
    let a0b1 = &v(ConstName::A0) * &v(ConstName::B1);
    let f2 = LaurentMatrix::from_rows(vec![
        vec![zero(), b2_inv.scale(&-Rat::one())],
        vec![a0b1.scale(&-Rat::one()), zero()],
    ]);
    Ok([f0, f1, f2])
}

/// Semi-flat cocycle of the cone-complex multi-section. The six scalars are
/// ordered by overlap: `(01->10, 02->12, 10->20, 12->21, 20->02, 21->01)`.
pub fn l_prime_semiflat(coeffs: &[Rat; 6]) -> Result<TransitionCocycle, GluingError> {
    let ms = build_l_prime();
    let n = super::TORUS_VARS;
    let edge = |from: &str, to: &str, c: &Rat| PairingEdge {
        from: from.into(),
        to: to.into(),
        coeff: LaurentPolynomial::constant(n, c.clone()),
    };
    let basis_orders = vec![
        vec!["01".to_string(), "02".to_string()],
        vec!["10".to_string(), "12".to_string()],
        vec!["20".to_string(), "21".to_string()],
    ];
    let pairings = vec![
        OverlapPairing {
            to_chart: 1,
            from_chart: 0,
            edges: vec![edge("01", "10", &coeffs[0]), edge("02", "12", &coeffs[1])],
        },
        OverlapPairing {
            to_chart: 2,
            from_chart: 1,
            edges: vec![edge("10", "20", &coeffs[2]), edge("12", "21", &coeffs[3])],
        },
        OverlapPairing {
            to_chart: 0,
            from_chart: 2,
            edges: vec![edge("20", "02", &coeffs[4]), edge("21", "01", &coeffs[5])],
        },
    ];
    semiflat_cocycle(&ms, &basis_orders, &pairings, n)
}

/// Default scalars for the cone-complex gluing, chosen so the determinant
/// cocycle matches the degree-3 line bundle (product -1) and the diagonal
/// parts agree with the tangent transitions.
pub fn l_prime_default_constants() -> [Rat; 6] {
    let one = Rat::one();
    [
        -one.clone(),
        one.clone(),
        one.clone(),
        -one.clone(),
        -one.clone(),
        one,
    ]
}

/// Chart-handoff quarter-turn in an arbitrary context (integer entries).
pub fn quarter_turn(nvars: usize) -> LaurentMatrix {
    LaurentMatrix::from_ints(nvars, [[0, -1], [1, 0]])
}

/// Substitute parameter variables by instantiated constants, entrywise.
pub fn instantiate_matrix(
    m: &LaurentMatrix,
    constants: &Constants,
) -> Result<LaurentMatrix, GluingError> {
    let mut rows = Vec::new();
    for i in 0..m.rows() {
        let mut row = Vec::new();
        for j in 0..m.cols() {
            row.push(constants.instantiate_poly(m.at(i, j))?);
        }
        rows.push(row);
    }
    Ok(LaurentMatrix::from_rows(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat_int;
    use crate::gluing::cocycle::{equivariance_report, matrix_equivariance_violations, regularity_report};

    fn parametric() -> Constants {
        Constants::Parametric
    }

    #[test]
    fn tangent_cocycle_matches_the_printed_matrices() {
        let c = reference_tangent_cocycle(2);
        let t10 = c.transition(1, 0).unwrap();
        // entry (2,1) is -w02/w01^2
        assert_eq!(*t10.at(1, 0), chart_mono(2, (-2, 1), -Rat::one()));
        let t21 = c.transition(2, 1).unwrap();
        assert_eq!(
            t21.det(),
            chart_mono(2, (0, -3), -Rat::one()),
            "det t21 = -1/w12^3"
        );
    }

    #[test]
    fn tangent_cocycle_defect_is_the_identity() {
        let c = reference_tangent_cocycle(2);
        assert!(c.defect(&[0, 1, 2, 0]).unwrap().is_identity());
        assert!(c.defect(&[1, 2, 0, 1]).unwrap().is_identity());
        assert!(c.defect(&[0]).unwrap().is_identity());
    }

    #[test]
    fn corrupted_transition_breaks_the_gluing() {
        let mut c = reference_tangent_cocycle(2);
        let mut bad = c.transition(2, 1).unwrap().clone();
        *bad.at_mut(0, 0) = chart_mono(2, (1, -1), Rat::one());
        c.set_transition(2, 1, bad);
        let defect = c.defect(&[0, 1, 2, 0]).unwrap();
        assert!(!defect.is_identity());
    }

    #[test]
    fn tangent_cocycle_is_equivariant_and_regular() {
        let c = reference_tangent_cocycle(2);
        assert!(equivariance_report(&c).unwrap().passed());
        assert!(regularity_report(&c).unwrap().passed());
    }

    #[test]
    fn tangent_transitions_invert_exactly() {
        let c = reference_tangent_cocycle(2);
        for (i, j) in [(1, 0), (2, 1), (0, 2)] {
            let t = c.transition_torus(i, j).unwrap();
            let inv = t.inverse_2x2().unwrap();
            assert!(t.mul(&inv).is_identity());
            assert!(inv.mul(&t).is_identity());
        }
    }

    #[test]
    fn semiflat_matches_the_printed_matrices() {
        let c = l_semiflat(&parametric()).unwrap();
        let n = c.nvars;
        let cst = parametric();
        // t10 = diag(a0/w01^2, b0/w01)
        let t10 = c.transition(1, 0).unwrap();
        assert_eq!(
            *t10.at(0, 0),
            cst.value(ConstName::A0).mul_monomial(&exp2(n, -2, 0), &Rat::one())
        );
        assert_eq!(
            *t10.at(1, 1),
            cst.value(ConstName::B0).mul_monomial(&exp2(n, -1, 0), &Rat::one())
        );
        assert!(t10.at(0, 1).is_zero() && t10.at(1, 0).is_zero());
        // t21 = diag(a1/w12^2, b1/w12)
        let t21 = c.transition(2, 1).unwrap();
        assert_eq!(
            *t21.at(0, 0),
            cst.value(ConstName::A1).mul_monomial(&exp2(n, 0, -2), &Rat::one())
        );
        assert_eq!(
            *t21.at(1, 1),
            cst.value(ConstName::B1).mul_monomial(&exp2(n, 0, -1), &Rat::one())
        );
        // t02 antidiagonal: (1,2) = b2/w20, (2,1) = a2/w20^2
        let t02 = c.transition(0, 2).unwrap();
        assert!(t02.at(0, 0).is_zero() && t02.at(1, 1).is_zero());
        assert_eq!(
            *t02.at(0, 1),
            cst.value(ConstName::B2).mul_monomial(&exp2(n, -1, 0), &Rat::one())
        );
        assert_eq!(
            *t02.at(1, 0),
            cst.value(ConstName::A2).mul_monomial(&exp2(n, -2, 0), &Rat::one())
        );
    }

    fn exp2(nvars: usize, a: i64, b: i64) -> ExpVec {
        let mut e = ExpVec::zeros(nvars);
        e.0[0] = a;
        e.0[1] = b;
        e
    }

    #[test]
    fn semiflat_entry_exponents_are_slope_differences() {
        let c = l_semiflat(&parametric()).unwrap();
        let t10 = c.transition(1, 0).unwrap();
        let (e, _) = t10.at(0, 0).as_monomial().unwrap();
        // -(slope(1+) - slope(0+)) = -(2,0)
        assert_eq!((e.0[0], e.0[1]), (-2, 0));
    }

    #[test]
    fn semiflat_is_equivariant_and_regular() {
        let c = l_semiflat(&parametric()).unwrap();
        assert!(equivariance_report(&c).unwrap().passed());
        assert!(regularity_report(&c).unwrap().passed());
    }

    #[test]
    fn naive_defect_is_the_antidiagonal_of_constants() {
        let cst = parametric();
        let c = l_semiflat(&cst).unwrap();
        let d = c.defect(&[0, 1, 2, 0]).unwrap();
        let n = cst.nvars();
        let b0b1b2 = &(&cst.value(ConstName::B0) * &cst.value(ConstName::B1))
            * &cst.value(ConstName::B2);
        let a0a1a2 = &(&cst.value(ConstName::A0) * &cst.value(ConstName::A1))
            * &cst.value(ConstName::A2);
        assert!(d.at(0, 0).is_zero());
        assert!(d.at(1, 1).is_zero());
        assert_eq!(*d.at(0, 1), b0b1b2);
        assert_eq!(*d.at(1, 0), a0a1a2);
        let _ = n;
    }

    #[test]
    fn naive_defect_with_unit_constants_is_the_monodromy_permutation() {
        let ones = Constants::Rational([
            rat_int(1),
            rat_int(1),
            rat_int(1),
            rat_int(1),
            rat_int(1),
            rat_int(1),
        ]);
        let c = l_semiflat(&ones).unwrap();
        let d = c.defect(&[0, 1, 2, 0]).unwrap();
        assert_eq!(d, LaurentMatrix::from_ints(2, [[0, 1], [1, 0]]));
        // which is the permutation matrix of the sheet transposition
        assert!(build_l().monodromy(0).unwrap().is_transposition());
    }

    #[test]
    fn wall_factor_shapes() {
        let thetas = wall_factors(&parametric()).unwrap();
        for t in &thetas {
            assert!(t.det().is_one(), "unipotent factors have det 1");
            assert!(t.at(0, 1).is_zero());
        }
        // with a0 = -1 and the rest 1, the first factor's correction entry
        // has coefficient +1
        let inst = Constants::Rational([
            rat_int(-1),
            rat_int(1),
            rat_int(1),
            rat_int(1),
            rat_int(1),
            rat_int(1),
        ]);
        let t10 = &wall_factors(&inst).unwrap()[0];
        let (e, coeff) = t10.at(1, 0).as_monomial().unwrap();
        assert_eq!(coeff, &Rat::one());
        assert_eq!((e.0[0], e.0[1]), (-1, 1));
    }

    #[test]
    fn corrected_defect_is_the_identity_parametrically() {
        let cst = parametric();
        let sf = l_semiflat(&cst).unwrap();
        let thetas = wall_factors(&cst).unwrap();
        let d = twisted_corrected_defect(&sf, &thetas, &LocalSystem::standard()).unwrap();
        assert!(d.is_identity());
    }

    #[test]
    fn corrected_defect_is_unchanged_by_the_sign_flip() {
        let cst = parametric();
        let sf = l_semiflat(&cst).unwrap();
        let thetas = wall_factors(&cst).unwrap();
        let d = twisted_corrected_defect(&sf, &thetas, &LocalSystem::sign_flipped()).unwrap();
        assert!(d.is_identity());
    }

    #[test]
    fn corrected_defect_without_twist_is_not_the_identity() {
        let cst = parametric();
        let sf = l_semiflat(&cst).unwrap();
        let thetas = wall_factors(&cst).unwrap();
        let d = twisted_corrected_defect(&sf, &thetas, &LocalSystem::trivial()).unwrap();
        assert!(!d.is_identity());
        // the antidiagonal still carries the naive constants
        let b0b1b2 = &(&cst.value(ConstName::B0) * &cst.value(ConstName::B1))
            * &cst.value(ConstName::B2);
        let a0a1a2 = &(&cst.value(ConstName::A0) * &cst.value(ConstName::A1))
            * &cst.value(ConstName::A2);
        assert_eq!(*d.at(0, 1), b0b1b2);
        assert_eq!(*d.at(1, 0), a0a1a2);
        assert!(d.at(1, 1).is_zero());
    }

    #[test]
    fn corrected_cocycle_defect_via_stored_transitions() {
        let c = corrected_cocycle(&parametric(), &LocalSystem::standard()).unwrap();
        assert!(c.defect(&[0, 1, 2, 0]).unwrap().is_identity());
        assert!(regularity_report(&c).unwrap().passed());
    }

    #[test]
    fn corrected_defect_identity_under_random_instantiations() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..25 {
            let cst = Constants::random(&mut rng);
            let sf = l_semiflat(&cst).unwrap();
            let thetas = wall_factors(&cst).unwrap();
            let d = twisted_corrected_defect(&sf, &thetas, &LocalSystem::standard()).unwrap();
            assert!(d.is_identity());
        }
    }

    #[test]
    fn parametric_and_instantiated_corrected_transitions_agree() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let inst = Constants::random(&mut rng);
            let par = corrected_transitions(&Constants::Parametric).unwrap();
            let ins = corrected_transitions(&inst).unwrap();
            for (i, j) in [(1, 0), (2, 1), (0, 2)] {
                let from_par = instantiate_matrix(par.transition(i, j).unwrap(), &inst).unwrap();
                assert_eq!(&from_par, ins.transition(i, j).unwrap());
            }
        }
    }

    #[test]
    fn intertwiner_relations_hold_parametrically() {
        let cst = parametric();
        let tangent = reference_tangent_cocycle(cst.nvars());
        let corrected = corrected_cocycle(&cst, &LocalSystem::standard()).unwrap();
        let f = reference_intertwiner(&cst).unwrap();
        for (i, j) in [(1usize, 0usize), (2, 1), (0, 2)] {
            let a = tangent.transition_torus(i, j).unwrap();
            let b = corrected.transition_torus(i, j).unwrap();
            // f_i * a_{ij} = b_{ij} * f_j
            assert_eq!(f[i].mul(&a), b.mul(&f[j]), "relation {i} <- {j}");
        }
        // loop consistency: both defects are the identity, so f_0 commutes
        let da = tangent.defect(&[0, 1, 2, 0]).unwrap();
        let db = corrected.defect(&[0, 1, 2, 0]).unwrap();
        assert_eq!(f[0].mul(&da), db.mul(&f[0]));
    }

    #[test]
    fn intertwiner_matrices_are_invertible() {
        let f = reference_intertwiner(&parametric()).unwrap();
        for m in &f {
            let inv = m.inverse_2x2().unwrap();
            assert!(m.mul(&inv).is_identity());
        }
    }

    #[test]
    fn theta_breaks_equivariance_for_trivial_weights() {
        let thetas = wall_factors(&parametric()).unwrap();
        let torus = thetas[0]
            .substitute(&chart_to_torus(0, 7))
            .unwrap();
        let trivial = [Covector(0, 0), Covector(0, 0)];
        let violations = matrix_equivariance_violations(&torus, &trivial, &trivial);
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].0, (2, 1));
        assert_eq!(violations[0].1, Covector(-1, 1));
    }

    #[test]
    fn l_prime_corrections_reach_the_tangent_cocycle() {
        use crate::gluing::solve::CorrectionSolution;
        let c = l_prime_semiflat(&l_prime_default_constants()).unwrap();
        let tangent = reference_tangent_cocycle(2);
        // unipotent factors with the same three Fourier modes as the
        // connected cover's corrections, no twist needed
        let sol = CorrectionSolution {
            entries: [
                ((1, 0), (-1, 1), -Rat::one()),
                ((0, 1), (0, -1), -Rat::one()),
                ((1, 0), (1, 0), -Rat::one()),
            ],
        };
        let thetas = sol.matrices(2);
        for (idx, (i, j)) in [(1usize, 0usize), (2, 1), (0, 2)].into_iter().enumerate() {
            let corrected = c.transition_torus(i, j).unwrap().mul(&thetas[idx]);
            assert_eq!(
                corrected,
                tangent.transition_torus(i, j).unwrap(),
                "overlap {i} <- {j}"
            );
        }
    }

    #[test]
    fn l_prime_semiflat_is_equivariant() {
        let c = l_prime_semiflat(&l_prime_default_constants()).unwrap();
        assert!(equivariance_report(&c).unwrap().passed());
        assert!(regularity_report(&c).unwrap().passed());
    }
}
