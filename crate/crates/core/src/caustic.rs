//! Local model at the branch point: the caustic potential on the double
//! cover, its gradient flow in polar coordinates, separatrix detection, and
//! the first integral certifying the flow-line count.
//!
//! The angle is the covering coordinate, so it lives in `[0, 4*pi)` and is
//! reduced modulo `2*pi` only for reporting. The gradient is taken in the
//! Euclidean metric `dr^2 + r^2 dtheta^2`:
//!
//! ```text
//! f      = (4/3) r^(3/2) cos(3 theta / 2)
//! dr/dt  =  2 sqrt(r)      cos(3 theta / 2)
//! dth/dt = -2 / sqrt(r) *  sin(3 theta / 2)
//! ```
//!
//! from which `Q = r^(3/2) sin(3 theta / 2)` is conserved, and the flow
//! lines reaching the origin are exactly the rays where `Q = 0`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CausticError {
    #[error("the gradient is singular at the origin")]
    SingularPoint,
    #[error("invalid parameter: {0}")]
    BadParameter(String),
}

/// Polar point on the cover; `theta` is unreduced.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarPoint {
    pub r: f64,
    pub theta: f64,
}

impl PolarPoint {
    pub fn new(r: f64, theta: f64) -> Self {
        PolarPoint { r, theta }
    }

    /// Angle reduced to `[0, 2*pi)` for reporting.
    pub fn theta_mod_2pi(&self) -> f64 {
        self.theta.rem_euclid(2.0 * PI)
    }
}

/// Potential value `(4/3) r^(3/2) cos(3 theta / 2)`.
pub fn f_caustic(p: &PolarPoint) -> f64 {
    (4.0 / 3.0) * p.r.powf(1.5) * (1.5 * p.theta).cos()
}

/// Euclidean-metric gradient in polar coordinates `(dr/dt, dtheta/dt)`.
pub fn grad_caustic(p: &PolarPoint) -> Result<(f64, f64), CausticError> {
    if p.r <= 0.0 {
        return Err(CausticError::SingularPoint);
    }
    let half = 1.5 * p.theta;
    Ok((
        2.0 * p.r.sqrt() * half.cos(),
        -2.0 / p.r.sqrt() * half.sin(),
    ))
}

/// First integral `Q = r^(3/2) sin(3 theta / 2)` of the gradient flow.
pub fn first_integral(p: &PolarPoint) -> f64 {
    p.r.powf(1.5) * (1.5 * p.theta).sin()
}

/// One integration sample.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FlowSample {
    pub t: f64,
    pub r: f64,
    pub theta: f64,
}

/// Why an integration stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlowTermination {
    /// The radius left `[R_MIN, R_MAX]`.
    LeftDomain,
    /// A step ran into the coordinate singularity at the origin.
    HitOrigin,
    /// The step budget was exhausted.
    MaxSteps,
}

/// A numerically integrated flow path.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlowPath {
    pub samples: Vec<FlowSample>,
    pub step: f64,
    pub integrator: &'static str,
    pub terminated: FlowTermination,
}

impl FlowPath {
    pub fn last(&self) -> &FlowSample {
        self.samples.last().expect("path has at least one sample")
    }

    /// Largest relative drift of the first integral along the path.
    pub fn first_integral_drift(&self) -> f64 {
        let q0 = first_integral(&PolarPoint::new(self.samples[0].r, self.samples[0].theta));
        let scale = q0.abs().max(1e-30);
        self.samples
            .iter()
            .map(|s| (first_integral(&PolarPoint::new(s.r, s.theta)) - q0).abs() / scale)
            .fold(0.0, f64::max)
    }

    /// True when the potential increases along the samples, allowing the
    /// given per-step slack.
    pub fn potential_monotone(&self, slack: f64) -> bool {
        self.samples
            .windows(2)
            .all(|w| {
                f_caustic(&PolarPoint::new(w[1].r, w[1].theta))
                    >= f_caustic(&PolarPoint::new(w[0].r, w[0].theta)) - slack
            })
    }
}

pub const DEFAULT_STEP: f64 = 1e-4;
pub const R_MIN: f64 = 1e-8;
pub const R_MAX: f64 = 10.0;

fn rk4_step(p: PolarPoint, h: f64) -> Result<PolarPoint, CausticError> {
    let eval = |q: PolarPoint| grad_caustic(&q);
    let k1 = eval(p)?;
    let k2 = eval(PolarPoint::new(
        p.r + 0.5 * h * k1.0,
        p.theta + 0.5 * h * k1.1,
    ))?;
    let k3 = eval(PolarPoint::new(
        p.r + 0.5 * h * k2.0,
        p.theta + 0.5 * h * k2.1,
    ))?;
    let k4 = eval(PolarPoint::new(p.r + h * k3.0, p.theta + h * k3.1))?;
    Ok(PolarPoint::new(
        p.r + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        p.theta + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
    ))
}

/// Classical fixed-step fourth-order integration of the gradient flow,
/// forward in time; terminates when the radius leaves `[R_MIN, R_MAX]` or
/// after `max_steps`.
pub fn integrate_flow(
    start: PolarPoint,
    step: f64,
    max_steps: usize,
) -> Result<FlowPath, CausticError> {
    integrate_signed(start, step, max_steps, 1.0)
}

/// Backward-in-time integration (negated field).
pub fn integrate_flow_backward(
    start: PolarPoint,
    step: f64,
    max_steps: usize,
) -> Result<FlowPath, CausticError> {
    integrate_signed(start, step, max_steps, -1.0)
}

fn integrate_signed(
    start: PolarPoint,
    step: f64,
    max_steps: usize,
    direction: f64,
) -> Result<FlowPath, CausticError> {
    if step <= 0.0 {
        return Err(CausticError::BadParameter(format!("step = {step}")));
    }
    if start.r <= 0.0 {
        return Err(CausticError::SingularPoint);
    }
    let h = step * direction;
    let mut samples = vec![FlowSample {
        t: 0.0,
        r: start.r,
        theta: start.theta,
    }];
    let mut p = start;
    let mut terminated = FlowTermination::MaxSteps;
    for n in 1..=max_steps {
        match rk4_step(p, h) {
            Ok(next) => p = next,
            // an internal stage stepped through the origin: stop here
            Err(CausticError::SingularPoint) => {
                terminated = FlowTermination::HitOrigin;
                break;
            }
            Err(e) => return Err(e),
        }
        if p.r <= 0.0 {
            terminated = FlowTermination::HitOrigin;
            break;
        }
        samples.push(FlowSample {
            t: h * n as f64,
            r: p.r,
            theta: p.theta,
        });
        if p.r < R_MIN || p.r > R_MAX {
            terminated = FlowTermination::LeftDomain;
            break;
        }
    }
    Ok(FlowPath {
        samples,
        step,
        integrator: "rk4",
        terminated,
    })
}

/// Separatrix report: the directions of the flow lines leaving the origin.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeparatrixReport {
    /// Outflow directions on the cover, in `[0, 4*pi)`.
    pub cover_angles: Vec<f64>,
    /// The same directions reduced mod `2*pi` and sorted.
    pub base_angles: Vec<f64>,
    /// Each angle was confirmed by backward flow into the origin.
    pub confirmed: Vec<bool>,
}

/// Merge near-duplicates on a sorted circle of circumference `period`,
/// including the wraparound pair.
fn circular_dedup(angles: &mut Vec<f64>, period: f64, tol: f64) {
    angles.dedup_by(|a, b| (*a - *b).abs() < tol);
    if angles.len() > 1 {
        let first = angles[0];
        let last = *angles.last().unwrap();
        if (first + period - last).abs() < tol {
            angles.pop();
        }
    }
}

/// Find the flow lines emanating from the origin: root-find the zeros of
/// `sin(3 theta / 2)` on the covering circle, keep the unstable branch
/// (`cos(3 theta / 2) > 0`), and confirm each direction by integrating
/// backward from `(r0, theta)` into the origin.
pub fn find_separatrices(r0: f64, grid_size: usize, tol: f64) -> Result<SeparatrixReport, CausticError> {
    if r0 <= 0.0 || grid_size < 12 {
        return Err(CausticError::BadParameter(
            "need r0 > 0 and a reasonable grid".into(),
        ));
    }
    let full = 4.0 * PI;
    let h = full / grid_size as f64;
    let g = |theta: f64| (1.5 * theta).sin();

    let mut roots = Vec::new();
    for i in 0..grid_size {
        let a = i as f64 * h;
        let b = a + h;
        let (ga, gb) = (g(a), g(b));
        if ga == 0.0 {
            roots.push(a);
            continue;
        }
        if ga * gb < 0.0 {
            // bisect to tolerance
            let (mut lo, mut hi, mut glo) = (a, b, ga);
            while hi - lo > tol * 1e-3 {
                let mid = 0.5 * (lo + hi);
                let gm = g(mid);
                if gm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if glo * gm < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    glo = gm;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
    }

    let mut cover_angles: Vec<f64> = roots
        .into_iter()
        .filter(|&t| (1.5 * t).cos() > 0.0)
        .map(|t| t.rem_euclid(full))
        .collect();
    cover_angles.sort_by(f64::total_cmp);
    circular_dedup(&mut cover_angles, full, tol.max(1e-12));

    let confirmed: Vec<bool> = cover_angles
        .iter()
        .map(|&theta| {
            integrate_flow_backward(PolarPoint::new(r0, theta), DEFAULT_STEP, 2_000_000)
                .map(|path| {
                    path.last().r < R_MIN || path.terminated == FlowTermination::HitOrigin
                })
                .unwrap_or(false)
        })
        .collect();

    let mut base_angles: Vec<f64> = cover_angles
        .iter()
        .map(|t| t.rem_euclid(2.0 * PI))
        .collect();
    base_angles.sort_by(f64::total_cmp);
    circular_dedup(&mut base_angles, 2.0 * PI, tol.max(1e-12));

    Ok(SeparatrixReport {
        cover_angles,
        base_angles,
        confirmed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn potential_reference_values() {
        assert!((f_caustic(&PolarPoint::new(1.0, 0.0)) - 4.0 / 3.0).abs() < 1e-15);
        assert!((f_caustic(&PolarPoint::new(1.0, 2.0 * PI / 3.0)) + 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(f_caustic(&PolarPoint::new(0.0, 1.234)), 0.0);
    }

    #[test]
    fn gradient_reference_values() {
        let g = grad_caustic(&PolarPoint::new(1.0, 0.0)).unwrap();
        assert!((g.0 - 2.0).abs() < 1e-15 && g.1.abs() < 1e-15);
        let g = grad_caustic(&PolarPoint::new(1.0, PI / 3.0)).unwrap();
        assert!(g.0.abs() < 1e-12 && (g.1 + 2.0).abs() < 1e-12);
        let g = grad_caustic(&PolarPoint::new(1.0, 2.0 * PI / 3.0)).unwrap();
        assert!((g.0 + 2.0).abs() < 1e-12 && g.1.abs() < 1e-12);
        assert!(grad_caustic(&PolarPoint::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn gradient_matches_finite_differences_of_the_potential() {
        // gradient in the metric dr^2 + r^2 dtheta^2: compare (df/dr,
        // df/dtheta / r^2) with central differences
        let h = 1e-6;
        for (r, theta) in [(0.8, 0.4), (1.7, 2.2), (0.3, 5.0)] {
            let g = grad_caustic(&PolarPoint::new(r, theta)).unwrap();
            let fr = (f_caustic(&PolarPoint::new(r + h, theta))
                - f_caustic(&PolarPoint::new(r - h, theta)))
                / (2.0 * h);
            let ft = (f_caustic(&PolarPoint::new(r, theta + h))
                - f_caustic(&PolarPoint::new(r, theta - h)))
                / (2.0 * h);
            assert!((g.0 - fr).abs() / fr.abs().max(1.0) < 1e-6);
            assert!((g.1 - ft / (r * r)).abs() / (ft / (r * r)).abs().max(1.0) < 1e-6);
        }
    }

    #[test]
    fn axis_rays_are_invariant() {
        for theta in [0.0, 2.0 * PI / 3.0 + 2.0 * PI, 4.0 * PI / 3.0] {
            // outflow lifts: theta with cos(3 theta/2) = +1
            if (1.5 * theta).cos() < 0.0 {
                continue;
            }
            let path = integrate_flow(PolarPoint::new(1e-3, theta), 1e-4, 200_000).unwrap();
            assert!(path.last().r > 1e-3, "r grows on the outflow ray");
            for s in &path.samples {
                assert!((s.theta - theta).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn off_axis_path_conserves_the_first_integral() {
        let path = integrate_flow(PolarPoint::new(0.5, PI / 6.0), 1e-4, 100_000).unwrap();
        assert!(path.first_integral_drift() <= 1e-8);
        // and visibly bends: theta is not constant
        let dth = (path.last().theta - path.samples[0].theta).abs();
        assert!(dth > 1e-3);
    }

    #[test]
    fn potential_increases_along_forward_flow() {
        for start in [
            PolarPoint::new(0.5, PI / 6.0),
            PolarPoint::new(0.2, 3.0),
            PolarPoint::new(1.0, 5.5),
        ] {
            let path = integrate_flow(start, 1e-4, 100_000).unwrap();
            assert!(path.potential_monotone(1e-10));
        }
    }

    #[test]
    fn q_reference_values() {
        assert!(first_integral(&PolarPoint::new(1.0, 0.0)).abs() < 1e-15);
        assert!((first_integral(&PolarPoint::new(1.0, PI / 3.0)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exactly_three_separatrices() {
        let rep = find_separatrices(1e-3, 720, 1e-9).unwrap();
        assert_eq!(rep.base_angles.len(), 3);
        let expected = [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0];
        for (got, want) in rep.base_angles.iter().zip(expected) {
            assert!((got - want).abs() < 1e-6, "{got} vs {want}");
        }
        assert!(rep.confirmed.iter().all(|&c| c));
        // grid refinement does not change the count
        let finer = find_separatrices(1e-3, 2160, 1e-9).unwrap();
        assert_eq!(finer.base_angles.len(), 3);
    }

    #[test]
    fn flows_commute_with_the_cover_rotation() {
        // the potential is invariant under theta -> theta + 4 pi / 3 on the
        // cover, so flows commute with that rotation pointwise
        let shift = 4.0 * PI / 3.0;
        let a = integrate_flow(PolarPoint::new(0.4, 0.9), 1e-4, 20_000).unwrap();
        let b = integrate_flow(PolarPoint::new(0.4, 0.9 + shift), 1e-4, 20_000).unwrap();
        assert_eq!(a.samples.len(), b.samples.len());
        for (s, t) in a.samples.iter().zip(&b.samples) {
            assert!((s.r - t.r).abs() < 1e-10);
            assert!((s.theta + shift - t.theta).abs() < 1e-10);
        }
        // and the separatrix direction set is invariant under the base
        // rotation by 2 pi / 3
        let rep = find_separatrices(1e-3, 720, 1e-9).unwrap();
        let rotated: Vec<f64> = rep
            .base_angles
            .iter()
            .map(|t| (t + 2.0 * PI / 3.0).rem_euclid(2.0 * PI))
            .collect();
        for r in rotated {
            assert!(rep
                .base_angles
                .iter()
                .any(|t| (t - r).abs() < 1e-9 || (t - r).abs() > 2.0 * PI - 1e-9));
        }
    }

    #[test]
    fn bad_parameters_are_rejected() {
        assert!(integrate_flow(PolarPoint::new(1.0, 0.0), 0.0, 10).is_err());
        assert!(integrate_flow(PolarPoint::new(0.0, 0.0), 1e-4, 10).is_err());
        assert!(find_separatrices(0.0, 720, 1e-9).is_err());
    }
}
