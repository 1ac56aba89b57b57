//! Numeric engine for the metric-degeneration side: the polytope potentials,
//! Legendre transforms, Fubini-Study connection entries, region
//! classification, tropical limits, Hessian positivity and convergence
//! sweeps.
//!
//! The family of potentials is `g = g_P + psi / hbar` on the standard
//! simplex; every exponential is evaluated in log space so arbitrarily small
//! `hbar` cannot overflow.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cover::TropicalMultiSection;

#[derive(Debug, Error)]
pub enum TropicError {
    #[error("point ({0}, {1}) is not interior to the simplex")]
    BoundaryPoint(f64, f64),
    #[error("connection limit is undefined on region boundaries")]
    UndefinedRegion,
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("multi-section failed validation")]
    InvalidMultiSection,
}

/// Point of the moment simplex `x1, x2 >= 0`, `x1 + x2 <= 1`, with the
/// implicit third coordinate `x3 = 1 - x1 - x2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolytopePoint {
    pub x1: f64,
    pub x2: f64,
}

impl PolytopePoint {
    pub fn new(x1: f64, x2: f64) -> Self {
        PolytopePoint { x1, x2 }
    }

    pub fn x3(&self) -> f64 {
        1.0 - self.x1 - self.x2
    }

    pub fn is_interior(&self) -> bool {
        self.x1 > 0.0 && self.x2 > 0.0 && self.x3() > 0.0
    }

    fn require_interior(&self) -> Result<(), TropicError> {
        if self.is_interior() {
            Ok(())
        } else {
            Err(TropicError::BoundaryPoint(self.x1, self.x2))
        }
    }
}

/// Potential values and first derivatives at an interior point.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Potentials {
    /// `g_P = (x1 ln x1 + x2 ln x2 + x3 ln x3) / 2`
    pub g_p: f64,
    /// `psi = x1^2 + x2^2 + x1 x2 - x1 - x2`
    pub psi: f64,
    /// `d(psi)/dx1 = 2 x1 + x2 - 1`
    pub psi1: f64,
    /// `d(psi)/dx2 = x1 + 2 x2 - 1`
    pub psi2: f64,
    /// `d(g_P)/dx1 = ln(x1/x3) / 2`
    pub g1: f64,
    /// `d(g_P)/dx2 = ln(x2/x3) / 2`
    pub g2: f64,
}

pub fn potentials(x: &PolytopePoint) -> Result<Potentials, TropicError> {
    x.require_interior()?;
    let (x1, x2, x3) = (x.x1, x.x2, x.x3());
    Ok(Potentials {
        g_p: 0.5 * (x1 * x1.ln() + x2 * x2.ln() + x3 * x3.ln()),
        psi: x1 * x1 + x2 * x2 + x1 * x2 - x1 - x2,
        psi1: 2.0 * x1 + x2 - 1.0,
        psi2: x1 + 2.0 * x2 - 1.0,
        g1: 0.5 * (x1 / x3).ln(),
        g2: 0.5 * (x2 / x3).ln(),
    })
}

/// Legendre coordinates `xi_i = g_i + psi_i / hbar` of an interior point.
pub fn legendre_xi(x: &PolytopePoint, hbar: f64) -> Result<(f64, f64), TropicError> {
    if hbar <= 0.0 {
        return Err(TropicError::BadParameter(format!("hbar = {hbar}")));
    }
    let p = potentials(x)?;
    Ok((p.g1 + p.psi1 / hbar, p.g2 + p.psi2 / hbar))
}

/// Inverse Legendre transform of the Fubini-Study potential:
/// `x_i = e^{2 xi_i} / (1 + e^{2 xi_1} + e^{2 xi_2})`, always interior.
pub fn legendre_x(xi: (f64, f64)) -> PolytopePoint {
    let l = logsumexp3(0.0, 2.0 * xi.0, 2.0 * xi.1);
    PolytopePoint {
        x1: (2.0 * xi.0 - l).exp(),
        x2: (2.0 * xi.1 - l).exp(),
    }
}

/// The three connection-entry moduli, each in `[0, 1]`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EntryTriple {
    pub e1: f64,
    pub e2: f64,
    pub e12: f64,
}

fn logsumexp3(a: f64, b: f64, c: f64) -> f64 {
    let m = a.max(b).max(c);
    m + ((a - m).exp() + (b - m).exp() + (c - m).exp()).ln()
}

/// Connection entries at `(x, hbar)` via log-sum-exp: with
/// `L = ln(1 + e^{2 xi_1} + e^{2 xi_2})`, the entries are
/// `e1 = e^{2 xi_1 - L}`, `e2 = e^{2 xi_2 - L}`, `e12 = e^{xi_1 + xi_2 - L}`.
pub fn connection_entries(x: &PolytopePoint, hbar: f64) -> Result<EntryTriple, TropicError> {
    let (xi1, xi2) = legendre_xi(x, hbar)?;
    let l = logsumexp3(0.0, 2.0 * xi1, 2.0 * xi2);
    Ok(EntryTriple {
        e1: (2.0 * xi1 - l).exp(),
        e2: (2.0 * xi2 - l).exp(),
        e12: (xi1 + xi2 - l).exp(),
    })
}

/// Region of the simplex decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionTag {
    P0,
    P1,
    P2,
    Boundary,
}

impl RegionTag {
    pub fn label(&self) -> &'static str {
        match self {
            RegionTag::P0 => "P0",
            RegionTag::P1 => "P1",
            RegionTag::P2 => "P2",
            RegionTag::Boundary => "boundary",
        }
    }
}

/// Classify by the signs of `psi1`, `psi2` and `x1 - x2`; points within
/// `tol` of a defining equality (where that equality actually separates two
/// regions) are tagged as boundary.
pub fn region_classify(x: &PolytopePoint, tol: f64) -> Result<RegionTag, TropicError> {
    let p = potentials(x)?;
    let dx = x.x1 - x.x2;
    let near_p0_p1 = p.psi1.abs() <= tol && dx >= -tol;
    let near_p0_p2 = p.psi2.abs() <= tol && dx <= tol;
    let near_p1_p2 = dx.abs() <= tol && (p.psi1 >= -tol || p.psi2 >= -tol);
    if near_p0_p1 || near_p0_p2 || near_p1_p2 {
        return Ok(RegionTag::Boundary);
    }
    if p.psi1 <= 0.0 && p.psi2 <= 0.0 {
        Ok(RegionTag::P0)
    } else if p.psi1 >= 0.0 && dx >= 0.0 {
        Ok(RegionTag::P1)
    } else {
        Ok(RegionTag::P2)
    }
}

/// Limits of the entry triple on each open region.
pub fn entry_limits(tag: RegionTag) -> Result<(f64, f64, f64), TropicError> {
    match tag {
        RegionTag::P0 => Ok((0.0, 0.0, 0.0)),
        RegionTag::P1 => Ok((1.0, 0.0, 0.0)),
        RegionTag::P2 => Ok((0.0, 1.0, 0.0)),
        RegionTag::Boundary => Err(TropicError::UndefinedRegion),
    }
}

fn logsumexp2(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Entry errors against the region limits, evaluated entirely in log space
/// so that `|e - 1|` does not saturate at the floating-point resolution of
/// one: the complements `1 - e1 = (1 + e^{2 xi_2}) e^{-L}` and
/// `1 - e2 = (1 + e^{2 xi_1}) e^{-L}` have their own stable expressions.
pub fn entry_errors(
    x: &PolytopePoint,
    hbar: f64,
    tag: RegionTag,
) -> Result<(f64, f64, f64), TropicError> {
    let limits = entry_limits(tag)?;
    let (xi1, xi2) = legendre_xi(x, hbar)?;
    let l = logsumexp3(0.0, 2.0 * xi1, 2.0 * xi2);
    let err1 = if limits.0 == 1.0 {
        (logsumexp2(0.0, 2.0 * xi2) - l).exp()
    } else {
        (2.0 * xi1 - l).exp()
    };
    let err2 = if limits.1 == 1.0 {
        (logsumexp2(0.0, 2.0 * xi1) - l).exp()
    } else {
        (2.0 * xi2 - l).exp()
    };
    let err12 = (xi1 + xi2 - l).exp();
    Ok((err1, err2, err12))
}

/// Real 2x2 matrix, the coefficient of one connection one-form component.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub fn zero() -> Self {
        Mat2([[0.0; 2]; 2])
    }

    pub fn diag(a: f64, b: f64) -> Self {
        Mat2([[a, 0.0], [0.0, b]])
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let mut m: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                m = m.max((self.0[r][c] - other.0[r][c]).abs());
            }
        }
        m
    }
}

/// Connection descriptor: coefficient matrices of the two fiber one-forms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectionLimit {
    pub dy1: Mat2,
    pub dy2: Mat2,
}

/// The singular limit connection per open region: zero on the first region,
/// `diag(2,1)` on the first fiber form over the second, `diag(1,2)` on the
/// second fiber form over the third.
pub fn tropical_connection(tag: RegionTag) -> Result<ConnectionLimit, TropicError> {
    match tag {
        RegionTag::P0 => Ok(ConnectionLimit {
            dy1: Mat2::zero(),
            dy2: Mat2::zero(),
        }),
        RegionTag::P1 => Ok(ConnectionLimit {
            dy1: Mat2::diag(2.0, 1.0),
            dy2: Mat2::zero(),
        }),
        RegionTag::P2 => Ok(ConnectionLimit {
            dy1: Mat2::zero(),
            dy2: Mat2::diag(1.0, 2.0),
        }),
        RegionTag::Boundary => Err(TropicError::UndefinedRegion),
    }
}

/// Connection coefficient matrices at finite `hbar` on the real locus:
/// `dz1` carries `[[2 e1, 0], [e12, e1]]` and `dz2` carries
/// `[[e2, e12], [0, 2 e2]]`.
pub fn assemble_connection(x: &PolytopePoint, hbar: f64) -> Result<(Mat2, Mat2), TropicError> {
    let e = connection_entries(x, hbar)?;
    Ok((
        Mat2([[2.0 * e.e1, 0.0], [e.e12, e.e1]]),
        Mat2([[e.e2, e.e12], [0.0, 2.0 * e.e2]]),
    ))
}

/// Hessian data of `g_P + psi / hbar` at an interior point.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct HessianCheck {
    pub positive_definite: bool,
    pub det: f64,
    /// `alpha = 1 / (det * x1 x2 x3)`
    pub alpha: f64,
}

/// Hessian of the barrier part: `[[1/x1 + 1/x3, 1/x3], [1/x3, 1/x2 + 1/x3]] / 2`.
pub fn hessian_g_p(x: &PolytopePoint) -> Result<[[f64; 2]; 2], TropicError> {
    x.require_interior()?;
    let (x1, x2, x3) = (x.x1, x.x2, x.x3());
    Ok([
        [0.5 * (1.0 / x1 + 1.0 / x3), 0.5 / x3],
        [0.5 / x3, 0.5 * (1.0 / x2 + 1.0 / x3)],
    ])
}

/// Hessian of the quadratic part: constant `[[2, 1], [1, 2]]`.
pub fn hessian_psi() -> [[f64; 2]; 2] {
    [[2.0, 1.0], [1.0, 2.0]]
}

pub fn hessian_check(x: &PolytopePoint, hbar: f64) -> Result<HessianCheck, TropicError> {
    if hbar <= 0.0 {
        return Err(TropicError::BadParameter(format!("hbar = {hbar}")));
    }
    let hg = hessian_g_p(x)?;
    let hp = hessian_psi();
    let h = [
        [hg[0][0] + hp[0][0] / hbar, hg[0][1] + hp[0][1] / hbar],
        [hg[1][0] + hp[1][0] / hbar, hg[1][1] + hp[1][1] / hbar],
    ];
    let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    let positive_definite = h[0][0] > 0.0 && det > 0.0;
    let alpha = 1.0 / (det * x.x1 * x.x2 * x.x3());
    Ok(HessianCheck {
        positive_definite,
        det,
        alpha,
    })
}

/// One sweep sample: entries and absolute errors against the region limits.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepRow {
    pub x1: f64,
    pub x2: f64,
    pub hbar: f64,
    pub e1: f64,
    pub e2: f64,
    pub e12: f64,
    pub region: String,
    pub err1: f64,
    pub err2: f64,
    pub err12: f64,
}

/// Per-point summary of a sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepPointSummary {
    pub x1: f64,
    pub x2: f64,
    pub region: String,
    /// Errors strictly decreasing along the hbar list, per entry.
    pub strictly_decreasing: [bool; 3],
    /// Worst entry error at the smallest hbar.
    pub final_error: f64,
    /// Fitted slope of `ln(err)` against `1/hbar`, per entry (negative for
    /// exponential decay).
    pub decay_slopes: [f64; 3],
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub points: Vec<SweepPointSummary>,
    pub excluded_boundary_points: usize,
}

impl SweepReport {
    pub fn all_strictly_decreasing(&self) -> bool {
        self.points
            .iter()
            .all(|p| p.strictly_decreasing.iter().all(|&b| b))
    }

    pub fn all_slopes_negative(&self) -> bool {
        self.points
            .iter()
            .all(|p| p.decay_slopes.iter().all(|&s| s < 0.0))
    }

    pub fn max_final_error(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.final_error)
            .fold(0.0, f64::max)
    }
}

const LOG_FLOOR: f64 = 1e-300;

fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

/// Evaluate the entry errors over a grid for a decreasing list of `hbar`
/// values. Boundary-tagged points are excluded and counted.
pub fn convergence_sweep(
    grid: &[PolytopePoint],
    hbars: &[f64],
    tol: f64,
) -> Result<SweepReport, TropicError> {
    if hbars.windows(2).any(|w| w[1] >= w[0]) {
        return Err(TropicError::BadParameter(
            "hbar list must be strictly decreasing".into(),
        ));
    }
    let mut rows = Vec::new();
    let mut points = Vec::new();
    let mut excluded = 0;
    for x in grid {
        let tag = region_classify(x, tol)?;
        if tag == RegionTag::Boundary {
            excluded += 1;
            continue;
        }
        let mut errs: [Vec<f64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        for &hbar in hbars {
            let e = connection_entries(x, hbar)?;
            let err = entry_errors(x, hbar, tag)?;
            errs[0].push(err.0);
            errs[1].push(err.1);
            errs[2].push(err.2);
            rows.push(SweepRow {
                x1: x.x1,
                x2: x.x2,
                hbar,
                e1: e.e1,
                e2: e.e2,
                e12: e.e12,
                region: tag.label().into(),
                err1: err.0,
                err2: err.1,
                err12: err.2,
            });
        }
        let strictly_decreasing = [0, 1, 2].map(|k| errs[k].windows(2).all(|w| w[1] < w[0]));
        let final_error = errs
            .iter()
            .map(|e| *e.last().unwrap())
            .fold(0.0, f64::max);
        let inv_h: Vec<f64> = hbars.iter().map(|h| 1.0 / h).collect();
        let decay_slopes = [0, 1, 2].map(|k| {
            let logs: Vec<f64> = errs[k].iter().map(|e| e.max(LOG_FLOOR).ln()).collect();
            fit_slope(&inv_h, &logs)
        });
        points.push(SweepPointSummary {
            x1: x.x1,
            x2: x.x2,
            region: tag.label().into(),
            strictly_decreasing,
            final_error,
            decay_slopes,
        });
    }
    Ok(SweepReport {
        rows,
        points,
        excluded_boundary_points: excluded,
    })
}

/// The standard 3x3 interior grids, one per open region, all points at
/// distance at least 0.05 from every region boundary.
pub fn default_region_grids() -> [Vec<PolytopePoint>; 3] {
    let mut p0 = Vec::new();
    for &x1 in &[0.10, 0.17, 0.24] {
        for &x2 in &[0.10, 0.17, 0.24] {
            p0.push(PolytopePoint::new(x1, x2));
        }
    }
    let mut p1 = Vec::new();
    for &x1 in &[0.55, 0.63, 0.71] {
        for &x2 in &[0.07, 0.13, 0.19] {
            p1.push(PolytopePoint::new(x1, x2));
        }
    }
    let p2 = p1.iter().map(|p| PolytopePoint::new(p.x2, p.x1)).collect();
    [p0, p1, p2]
}

/// Finite-scale check of the tropical limit of the degree-`k` potential:
/// evaluates `(k/2) log_t(1 + t^{2 xi_1} + t^{2 xi_2})` stably and compares
/// with `max(0, k xi_1, k xi_2)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PotentialLimitReport {
    pub limit: f64,
    /// `(t, value, |value - limit|)` per sample.
    pub samples: Vec<(f64, f64, f64)>,
}

pub fn trop_potential_limit(
    k: i64,
    xi: (f64, f64),
    t_list: &[f64],
) -> Result<PotentialLimitReport, TropicError> {
    if k < 0 {
        return Err(TropicError::BadParameter("k must be nonnegative".into()));
    }
    if t_list.windows(2).any(|w| w[1] <= w[0]) || t_list.iter().any(|&t| t <= 1.0) {
        return Err(TropicError::BadParameter(
            "t list must be increasing and > 1".into(),
        ));
    }
    let kf = k as f64;
    let limit = (kf * xi.0).max(kf * xi.1).max(0.0);
    let samples = t_list
        .iter()
        .map(|&t| {
            let ln_t = t.ln();
            let value = 0.5 * kf * logsumexp3(0.0, 2.0 * xi.0 * ln_t, 2.0 * xi.1 * ln_t) / ln_t;
            (t, value, (value - limit).abs())
        })
        .collect();
    Ok(PotentialLimitReport { limit, samples })
}

/// Formal fiberwise transform of a validated multi-section: on each base
/// cone the connection descriptor is diagonal in the sheet slopes, taken in
/// sheet label order.
pub fn syz_connection_of_multisection(
    ms: &TropicalMultiSection,
) -> Result<Vec<ConnectionLimit>, TropicError> {
    if !ms.validate().all_ok() {
        return Err(TropicError::InvalidMultiSection);
    }
    let mut out = Vec::new();
    for cone in 0..ms.base.max_cones.len() {
        let sheets = ms.sheets_over(cone);
        assert_eq!(sheets.len(), 2, "rank-2 descriptors only");
        let s0 = ms.sheets[sheets[0]].slope;
        let s1 = ms.sheets[sheets[1]].slope;
        out.push(ConnectionLimit {
            dy1: Mat2::diag(s0.0 as f64, s1.0 as f64),
            dy2: Mat2::diag(s0.1 as f64, s1.1 as f64),
        });
    }
    Ok(out)
}
