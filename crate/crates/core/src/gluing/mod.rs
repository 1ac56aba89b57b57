//! Transition-cocycle machinery for rank-2 bundles on the projective plane:
//! the reference tangent cocycle, semi-flat cocycles built from multi-section
//! data, wall-crossing correction factors, the local-system twist, exact
//! gluing identities, and solvers that rediscover corrections and
//! intertwiners.
//!
//! Coordinate conventions. Torus coordinates are `w1, w2`; chart `k` of the
//! fan carries the two inhomogeneous coordinates obtained from the
//! homogeneous ones by dividing by coordinate `k`. As monomials in the torus
//! coordinates the chart variables are
//!
//! ```text
//! chart 0: w1,        w2          (the torus coordinates themselves)
//! chart 1: w1^-1,     w1^-1 w2
//! chart 2: w2^-1,     w1 w2^-1
//! ```
//!
//! The supporting-function convention used throughout is max-based, so a
//! monomial `w^m` is regular on the overlap of charts `i` and `j` exactly
//! when `<m, -rho> >= 0` for the shared ray `rho`, and regular on chart `k`
//! when it pairs nonnegatively against the negated generators of cone `k`.
//!
//! The six gluing constants `a0, b0, a1, b1, a2, b2` are carried either as
//! exact rationals or parametrically as five extra Laurent variables, with
//! `b2` eliminated through the determinant constraint
//! `a0 b0 a1 b1 a2 b2 = -1`.

mod cocycle;
mod instances;
mod local_system;
mod solve;
mod walls;

pub use cocycle::{
    equivariance_report, line_bundle_cocycle, line_defect, matrix_equivariance_violations,
    regularity_report, semiflat_cocycle, ChartFrame, EquivarianceReport, OverlapPairing,
    PairingEdge, RegularityReport, TransitionCocycle,
};
pub use instances::{
    corrected_cocycle, corrected_transitions, instantiate_matrix, l_basis_orders,
    l_prime_default_constants, l_prime_semiflat, l_semiflat, quarter_turn, reference_intertwiner,
    reference_tangent_cocycle, tangent_frames, twisted_corrected_defect, wall_factors,
};
pub use local_system::LocalSystem;
pub use solve::{
    equal_up_to_scalar, recover_corrections_at, solve_intertwiner, solve_unipotent_corrections,
    CorrectionEntry, CorrectionSearch, CorrectionSolution, IntertwinerResult,
};
pub use walls::{correction_wall_data, wall_data, WallDatum};

use num_traits::One;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{ExpVec, LaurentPolynomial, MonomialMap, Rat};

/// Number of torus variables; everything after them is a gluing constant.
pub const TORUS_VARS: usize = 2;

/// Parametric variable context: torus coordinates plus the five free
/// constants (`b2` is eliminated).
pub const PARAM_VARS: usize = 7;

#[derive(Debug, Error)]
pub enum GluingError {
    #[error("missing transition {0} <- {1}")]
    MissingTransition(usize, usize),
    #[error("sheet pairing over an overlap is not a bijection")]
    NonBijectivePairing,
    #[error("gluing constant {0} is zero")]
    ZeroConstant(&'static str),
    #[error("a wall factor needs a nonzero exponent")]
    DegenerateWall,
    #[error("charts {0} and {1} do not overlap in a wall")]
    NoSharedRay(usize, usize),
    #[error(transparent)]
    Algebra(#[from] crate::exact::AlgebraError),
    #[error(transparent)]
    Cover(#[from] crate::cover::CoverError),
}

/// Index names for the six gluing constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstName {
    A0,
    B0,
    A1,
    B1,
    A2,
    B2,
}

impl ConstName {
    pub fn label(&self) -> &'static str {
        match self {
            ConstName::A0 => "a0",
            ConstName::B0 => "b0",
            ConstName::A1 => "a1",
            ConstName::B1 => "b1",
            ConstName::A2 => "a2",
            ConstName::B2 => "b2",
        }
    }
}

/// The six gluing constants, instantiated or symbolic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Constants {
    /// `[a0, b0, a1, b1, a2, b2]` as exact rationals.
    Rational([Rat; 6]),
    /// Five Laurent variables `a0, b0, a1, b1, a2`; `b2` is the monomial
    /// `-(a0 b0 a1 b1 a2)^-1`, so the determinant constraint holds
    /// identically.
    Parametric,
}

impl Constants {
    /// Context width for polynomials carrying these constants.
    pub fn nvars(&self) -> usize {
        match self {
            Constants::Rational(_) => TORUS_VARS,
            Constants::Parametric => PARAM_VARS,
        }
    }

    pub fn names(&self) -> Vec<&'static str> {
        match self {
            Constants::Rational(_) => vec!["w1", "w2"],
            Constants::Parametric => vec!["w1", "w2", "a0", "b0", "a1", "b1", "a2"],
        }
    }

    /// The constant as a Laurent polynomial in this context.
    pub fn value(&self, name: ConstName) -> LaurentPolynomial {
        match self {
            Constants::Rational(v) => {
                let idx = match name {
                    ConstName::A0 => 0,
                    ConstName::B0 => 1,
                    ConstName::A1 => 2,
                    ConstName::B1 => 3,
                    ConstName::A2 => 4,
                    ConstName::B2 => 5,
                };
                LaurentPolynomial::constant(TORUS_VARS, v[idx].clone())
            }
            Constants::Parametric => match name {
                ConstName::A0 => LaurentPolynomial::var(PARAM_VARS, 2, 1),
                ConstName::B0 => LaurentPolynomial::var(PARAM_VARS, 3, 1),
                ConstName::A1 => LaurentPolynomial::var(PARAM_VARS, 4, 1),
                ConstName::B1 => LaurentPolynomial::var(PARAM_VARS, 5, 1),
                ConstName::A2 => LaurentPolynomial::var(PARAM_VARS, 6, 1),
                ConstName::B2 => LaurentPolynomial::monomial(
                    PARAM_VARS,
                    ExpVec(vec![0, 0, -1, -1, -1, -1, -1]),
                    -Rat::one(),
                ),
            },
        }
    }

    /// Nonzero check for instantiated constants.
    pub fn check_nonzero(&self) -> Result<(), GluingError> {
        if let Constants::Rational(v) = self {
            use num_traits::Zero;
            const LABELS: [&str; 6] = ["a0", "b0", "a1", "b1", "a2", "b2"];
            for (x, l) in v.iter().zip(LABELS) {
                if x.is_zero() {
                    return Err(GluingError::ZeroConstant(l));
                }
            }
        }
        Ok(())
    }

    /// Product `a0 b0 a1 b1 a2 b2` (identically -1 in parametric mode).
    pub fn determinant_product(&self) -> LaurentPolynomial {
        use ConstName::*;
        [A0, B0, A1, B1, A2, B2]
            .iter()
            .map(|n| self.value(*n))
            .fold(LaurentPolynomial::one(self.nvars()), |acc, v| &acc * &v)
    }

    /// Rational constants from the five free values, solving for `b2`.
    pub fn from_free_values(v: [Rat; 5]) -> Result<Constants, GluingError> {
        use num_traits::Zero;
        let prod: Rat = v.iter().cloned().fold(Rat::one(), |a, b| a * b);
        if prod.is_zero() {
            return Err(GluingError::ZeroConstant("a0..a2"));
        }
        let b2 = -prod.recip();
        Ok(Constants::Rational([
            v[0].clone(),
            v[1].clone(),
            v[2].clone(),
            v[3].clone(),
            v[4].clone(),
            b2,
        ]))
    }

    /// Seeded random instantiation satisfying the determinant constraint.
    pub fn random<R: Rng>(rng: &mut R) -> Constants {
        let mut draw = || loop {
            let n = rng.gen_range(-6i64..=6);
            let d = rng.gen_range(1i64..=6);
            if n != 0 {
                return Rat::new(n.into(), d.into());
            }
        };
        Constants::from_free_values([draw(), draw(), draw(), draw(), draw()])
            .expect("nonzero draws")
    }

    /// Default instantiation used by the command-line driver.
    pub fn default_rational() -> Constants {
        use crate::exact::rat_int;
        Constants::Rational([
            rat_int(-1),
            rat_int(1),
            rat_int(1),
            rat_int(1),
            rat_int(1),
            rat_int(1),
        ])
    }

    /// Evaluate a parametric polynomial at the instantiated values.
    pub fn instantiate_poly(
        &self,
        p: &LaurentPolynomial,
    ) -> Result<LaurentPolynomial, GluingError> {
        if p.nvars() == TORUS_VARS {
            return Ok(p.clone());
        }
        match self {
            Constants::Parametric => Ok(p.clone()),
            Constants::Rational(v) => {
                let vals = [
                    v[0].clone(),
                    v[1].clone(),
                    v[2].clone(),
                    v[3].clone(),
                    v[4].clone(),
                ];
                Ok(p.eval_tail_vars(TORUS_VARS, &vals)?)
            }
        }
    }
}

/// Torus-exponent rows of the chart coordinates, per chart.
pub(crate) const CHART_BLOCKS: [[[i64; 2]; 2]; 3] = [
    [[1, 0], [0, 1]],
    [[-1, 0], [-1, 1]],
    [[0, -1], [1, -1]],
];

/// Monomial map sending chart-`k` variables to torus monomials (identity on
/// any trailing constant variables).
pub fn chart_to_torus(k: usize, nvars: usize) -> MonomialMap {
    MonomialMap::from_torus_block(CHART_BLOCKS[k], nvars)
}

/// Chart variable names, for rendering chart-coordinate matrices.
pub fn chart_var_names(k: usize) -> [&'static str; 2] {
    match k {
        0 => ["w01", "w02"],
        1 => ["w10", "w12"],
        _ => ["w20", "w21"],
    }
}
