use serde::{Deserialize, Serialize};

use num_integer::Integer;

use crate::fan::{Covector, Vector};

use super::instances::wall_factors;
use super::{Constants, GluingError, TORUS_VARS};

/// A wall through the origin: the Fourier mode of the correction entry, the
/// primitive tangent of its kernel line, and the orientation determinant of
/// the pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallDatum {
    pub mode: Covector,
    pub tangent: Vector,
    /// `det [mode; tangent]`, positive by construction; equals 1 exactly
    /// when the mode has unit length squared.
    pub orientation_det: i64,
}

/// Wall data of a nonzero Fourier mode: the tangent is the primitive
/// generator of `ker(mode)` oriented so that `(mode, tangent)` is a
/// positive basis of the plane.
pub fn wall_data(mode: Covector) -> Result<WallDatum, GluingError> {
    if mode == Covector(0, 0) {
        return Err(GluingError::DegenerateWall);
    }
    let g = mode.0.gcd(&mode.1);
    let tangent = Vector(-mode.1 / g, mode.0 / g);
    let orientation_det = mode.0 * tangent.1 - mode.1 * tangent.0;
    debug_assert!(orientation_det > 0);
    Ok(WallDatum {
        mode,
        tangent,
        orientation_det,
    })
}

/// Wall data of the three correction factors, read off from their actual
/// correction entries and indexed by the opposite chart (factor `i <- j`
/// goes with index `k` distinct from both).
pub fn correction_wall_data(constants: &Constants) -> Result<[WallDatum; 3], GluingError> {
    let thetas = wall_factors(constants)?;
    let overlaps = [(1usize, 0usize), (2, 1), (0, 2)];
    let mut out = [wall_data(Covector(1, 0))?; 3];
    for (idx, (i, j)) in overlaps.iter().enumerate() {
        let torus = thetas[idx].substitute(&super::chart_to_torus(*j, constants.nvars()))?;
        let (e, _) = torus
            .at(1, 0)
            .as_monomial()
            .ok_or(GluingError::DegenerateWall)?;
        let mode = Covector(e.0[0], e.0[1]);
        let k = 3 - i - j;
        out[k] = wall_data(mode)?;
    }
    let _ = TORUS_VARS;
    Ok(out)
}
