//! Lattices, cones, complete fans, dual cones, and piecewise-linear
//! supporting functions. The fixed fan of the projective plane lives here,
//! along with the PL-function <-> line-bundle dictionary used by the gluing
//! layer.

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{rat_int, Rat};

/// Lattice vector in N (rank 2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Vector(pub i64, pub i64);

/// Lattice covector in the dual lattice M.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Covector(pub i64, pub i64);

impl Vector {
    pub fn is_primitive(&self) -> bool {
        self.0.gcd(&self.1) == 1
    }

    pub fn neg(&self) -> Vector {
        Vector(-self.0, -self.1)
    }

    pub fn as_array(&self) -> [i64; 2] {
        [self.0, self.1]
    }
}

impl Covector {
    pub fn neg(&self) -> Covector {
        Covector(-self.0, -self.1)
    }

    pub fn sub(&self, other: &Covector) -> Covector {
        Covector(self.0 - other.0, self.1 - other.1)
    }

    pub fn add(&self, other: &Covector) -> Covector {
        Covector(self.0 + other.0, self.1 + other.1)
    }

    pub fn as_array(&self) -> [i64; 2] {
        [self.0, self.1]
    }
}

/// Dual pairing M x N -> Z.
pub fn pair(m: &Covector, v: &Vector) -> i64 {
    m.0 * v.0 + m.1 * v.1
}

fn det2(a: (i64, i64), b: (i64, i64)) -> i64 {
    a.0 * b.1 - a.1 * b.0
}

/// Rational polyhedral cone in N, given by 0, 1 or 2 primitive ray
/// generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cone {
    pub rays: Vec<Vector>,
}

impl Cone {
    pub fn zero() -> Self {
        Cone { rays: vec![] }
    }

    pub fn ray(v: Vector) -> Self {
        Cone { rays: vec![v] }
    }

    pub fn span(u: Vector, v: Vector) -> Self {
        Cone { rays: vec![u, v] }
    }

    pub fn dim(&self) -> usize {
        match self.rays.len() {
            0 => 0,
            1 => 1,
            _ => 2,
        }
    }

    /// Strict convexity for 2-generator cones: generators not (anti)parallel.
    pub fn is_strictly_convex(&self) -> bool {
        match self.rays.len() {
            0 | 1 => true,
            2 => det2(
                (self.rays[0].0, self.rays[0].1),
                (self.rays[1].0, self.rays[1].1),
            ) != 0,
            _ => false,
        }
    }

    /// Membership test for an integer direction.
    pub fn contains(&self, x: &Vector) -> bool {
        match self.rays.len() {
            0 => x.0 == 0 && x.1 == 0,
            1 => {
                let r = &self.rays[0];
                det2((r.0, r.1), (x.0, x.1)) == 0 && r.0 * x.0 + r.1 * x.1 >= 0
            }
            2 => {
                let u = (self.rays[0].0, self.rays[0].1);
                let v = (self.rays[1].0, self.rays[1].1);
                let d = det2(u, v);
                debug_assert!(d != 0);
                // x = alpha*u + beta*v with alpha = det(x,v)/d, beta = det(u,x)/d
                let alpha = det2((x.0, x.1), v);
                let beta = det2(u, (x.0, x.1));
                if d > 0 {
                    alpha >= 0 && beta >= 0
                } else {
                    alpha <= 0 && beta <= 0
                }
            }
            _ => unreachable!(),
        }
    }
}

/// Dual cone in M, kept as generators together with the defining
/// inequalities (the primal generators).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualCone {
    pub generators: Vec<Covector>,
    pub constraints: Vec<Vector>,
}

impl DualCone {
    pub fn contains(&self, m: &Covector) -> bool {
        self.constraints.iter().all(|v| pair(m, v) >= 0)
    }
}

fn primitive_covector(a: i64, b: i64) -> Covector {
    let g = a.gcd(&b);
    if g == 0 {
        Covector(0, 0)
    } else {
        Covector(a / g, b / g)
    }
}

/// Generators of `{m : <m, v> >= 0 for all v in c}`.
///
/// For a strictly convex 2-dimensional cone the dual is again 2-dimensional
/// with two generators. For a ray the dual is a half-plane (three
/// generators); for the zero cone it is all of M.
pub fn dual_cone(c: &Cone) -> DualCone {
    match c.rays.len() {
        0 => DualCone {
            generators: vec![
                Covector(1, 0),
                Covector(0, 1),
                Covector(-1, 0),
                Covector(0, -1),
            ],
            constraints: vec![],
        },
        1 => {
            let u = c.rays[0];
            let t = primitive_covector(-u.1, u.0);
            // normal direction pairing positively with u
            let n = primitive_covector(u.0, u.1);
            DualCone {
                generators: vec![t, t.neg(), n],
                constraints: vec![u],
            }
        }
        2 => {
            assert!(c.is_strictly_convex(), "dual of a non-convex cone");
            let u = c.rays[0];
            let v = c.rays[1];
            let mut gens = Vec::new();
            for (zero_on, positive_on) in [(u, v), (v, u)] {
                let mut t = primitive_covector(-zero_on.1, zero_on.0);
                if pair(&t, &positive_on) < 0 {
                    t = t.neg();
                }
                gens.push(t);
            }
            gens.sort();
            DualCone {
                generators: gens,
                constraints: vec![u, v],
            }
        }
        _ => unreachable!(),
    }
}

/// Dual of a 2-generator dual cone, back in N. Used to check involutivity.
pub fn dual_of_dual(d: &DualCone) -> Option<Cone> {
    if d.generators.len() != 2 {
        return None;
    }
    // Same construction with the roles of N and M swapped.
    let as_cone = Cone::span(
        Vector(d.generators[0].0, d.generators[0].1),
        Vector(d.generators[1].0, d.generators[1].1),
    );
    let mut rays: Vec<Vector> = dual_cone(&as_cone)
        .generators
        .iter()
        .map(|m| Vector(m.0, m.1))
        .collect();
    rays.sort();
    Some(Cone { rays })
}

#[derive(Debug, Error)]
pub enum FanError {
    #[error("fan is not complete")]
    Incomplete,
    #[error("no value supplied for ray {0:?}")]
    MissingRayValue(Vector),
    #[error("supporting slope on cone {cone} is not integral: ({s1}, {s2})")]
    NonIntegralSlope { cone: usize, s1: Rat, s2: Rat },
    #[error("cone {0} does not have exactly two rays")]
    BadCone(usize),
}

/// Complete fan in the rank-2 lattice. Maximal cones are stored with their
/// shared-ray adjacency table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fan {
    pub max_cones: Vec<Cone>,
    pub rays: Vec<Vector>,
    /// (cone index, cone index, shared ray), with i < j.
    pub adjacency: Vec<(usize, usize, Vector)>,
}

impl Fan {
    pub fn new(max_cones: Vec<Cone>) -> Self {
        let mut rays: Vec<Vector> = Vec::new();
        for c in &max_cones {
            for r in &c.rays {
                if !rays.contains(r) {
                    rays.push(*r);
                }
            }
        }
        rays.sort();
        let mut adjacency = Vec::new();
        for i in 0..max_cones.len() {
            for j in (i + 1)..max_cones.len() {
                for r in &max_cones[i].rays {
                    if max_cones[j].rays.contains(r) {
                        adjacency.push((i, j, *r));
                    }
                }
            }
        }
        Fan {
            max_cones,
            rays,
            adjacency,
        }
    }

    pub fn shared_ray(&self, i: usize, j: usize) -> Option<Vector> {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.adjacency
            .iter()
            .find(|(x, y, _)| *x == a && *y == b)
            .map(|(_, _, r)| *r)
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .adjacency
            .iter()
            .filter_map(|(a, b, _)| {
                if *a == i {
                    Some(*b)
                } else if *b == i {
                    Some(*a)
                } else {
                    None
                }
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Index of the maximal cone containing the direction, if any.
    pub fn cone_containing(&self, x: &Vector) -> Option<usize> {
        self.max_cones.iter().position(|c| c.contains(x))
    }

    /// Sampled completeness check: every primitive direction in a box lands
    /// in some maximal cone.
    pub fn is_complete(&self) -> bool {
        for p in -8i64..=8 {
            for q in -8i64..=8 {
                if (p, q) == (0, 0) || p.gcd(&q) != 1 {
                    continue;
                }
                if self.cone_containing(&Vector(p, q)).is_none() {
                    return false;
                }
            }
        }
        true
    }
}

/// The fan of the projective plane with primitive generators
/// (1,1), (-1,0), (0,-1); maximal cone `k` is spanned by the two rays other
/// than `v_k`.
pub fn build_p2_fan() -> Fan {
    let v0 = Vector(1, 1);
    let v1 = Vector(-1, 0);
    let v2 = Vector(0, -1);
    Fan::new(vec![
        Cone::span(v1, v2),
        Cone::span(v0, v2),
        Cone::span(v0, v1),
    ])
}

/// Piecewise-linear function on a complete fan: one integral slope per
/// maximal cone plus a rational offset (zero for supporting functions
/// through the origin). Continuity across shared rays is an invariant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PLFunction {
    pub fan: Fan,
    pub slopes: Vec<Covector>,
    pub offsets: Vec<Rat>,
}

impl PLFunction {
    pub fn value_at_ray(&self, ray: &Vector) -> Option<Rat> {
        let cone = self
            .fan
            .max_cones
            .iter()
            .position(|c| c.rays.contains(ray))?;
        Some(rat_int(pair(&self.slopes[cone], ray)) + self.offsets[cone].clone())
    }

    /// Values at the fan's rays, in ray order.
    pub fn ray_values(&self) -> Vec<Rat> {
        self.fan
            .rays
            .iter()
            .map(|r| self.value_at_ray(r).expect("ray not in any cone"))
            .collect()
    }

    /// Exact continuity check across every shared ray.
    pub fn is_continuous(&self) -> bool {
        self.fan.adjacency.iter().all(|(i, j, r)| {
            rat_int(pair(&self.slopes[*i], r)) + self.offsets[*i].clone()
                == rat_int(pair(&self.slopes[*j], r)) + self.offsets[*j].clone()
        })
    }
}

/// Build the supporting function with prescribed values on the rays.
///
/// For each maximal cone the slope solves `<m, v> = value(v)` on both rays;
/// a non-integral solution is an error carrying the rational slope.
pub fn pl_from_ray_values(fan: &Fan, values: &[(Vector, Rat)]) -> Result<PLFunction, FanError> {
    if !fan.is_complete() {
        return Err(FanError::Incomplete);
    }
    let value_of = |v: &Vector| -> Result<Rat, FanError> {
        values
            .iter()
            .find(|(r, _)| r == v)
            .map(|(_, val)| val.clone())
            .ok_or(FanError::MissingRayValue(*v))
    };
    let mut slopes = Vec::new();
    for (ci, cone) in fan.max_cones.iter().enumerate() {
        if cone.rays.len() != 2 {
            return Err(FanError::BadCone(ci));
        }
        let u = cone.rays[0];
        let v = cone.rays[1];
        let alpha = value_of(&u)?;
        let beta = value_of(&v)?;
        let d = rat_int(det2((u.0, u.1), (v.0, v.1)));
        // Cramer for m1*u1 + m2*u2 = alpha, m1*v1 + m2*v2 = beta
        let s1 = (alpha.clone() * rat_int(v.1) - beta.clone() * rat_int(u.1)) / d.clone();
        let s2 = (rat_int(u.0) * beta - rat_int(v.0) * alpha) / d;
        if !s1.denom().is_one() || !s2.denom().is_one() {
            return Err(FanError::NonIntegralSlope { cone: ci, s1, s2 });
        }
        let to_i64 = |r: &Rat| -> i64 {
            let n = r.numer().clone();
            i64::try_from(n).expect("slope exceeds i64")
        };
        slopes.push(Covector(to_i64(&s1), to_i64(&s2)));
    }
    Ok(PLFunction {
        fan: fan.clone(),
        slopes,
        offsets: vec![Rat::zero(); fan.max_cones.len()],
    })
}

/// Kink positivity: across every wall the neighboring slope exceeds the
/// linear extension of the current piece, strictly, in the direction of the
/// opposite cone.
pub fn pl_is_strictly_convex(f: &PLFunction) -> bool {
    f.fan.adjacency.iter().all(|(i, j, shared)| {
        let check = |from: usize, to: usize| {
            let other = f.fan.max_cones[to]
                .rays
                .iter()
                .find(|r| *r != shared)
                .expect("wall cone with a single ray");
            let actual = rat_int(pair(&f.slopes[to], other)) + f.offsets[to].clone();
            let extended = rat_int(pair(&f.slopes[from], other)) + f.offsets[from].clone();
            actual > extended
        };
        check(*i, *j) && check(*j, *i)
    })
}

/// If `f - g` is globally linear, return its slope. This is the exact test
/// for linear equivalence of the corresponding line bundles.
pub fn pl_difference_linear(f: &PLFunction, g: &PLFunction) -> Option<Covector> {
    if f.fan != g.fan {
        return None;
    }
    let diffs: Vec<Covector> = f
        .slopes
        .iter()
        .zip(&g.slopes)
        .map(|(a, b)| a.sub(b))
        .collect();
    let offsets_match = f
        .offsets
        .iter()
        .zip(&g.offsets)
        .all(|(a, b)| a == b);
    if offsets_match && diffs.iter().all(|d| *d == diffs[0]) {
        Some(diffs[0])
    } else {
        None
    }
}
