//! Branched covers of complete fans and tropical multi-sections: sheeted
//! cones carrying linear functions, ray-gluing tables, validation, monodromy
//! and trace.
//!
//! Two concrete degree-2 instances are built here. Both are branched over
//! the origin with transposition monodromy, i.e. combinatorially the square
//! map on the plane, and both trace down to the supporting function of the
//! same degree-3 line bundle (up to a global linear shift).

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{rat_int, Rat};
use crate::fan::{build_p2_fan, pair, Covector, Fan, PLFunction, Vector};

/// One sheet of the cover: a copy of a base maximal cone together with the
/// linear function it carries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SheetedCone {
    /// Index of the base cone in `base.max_cones`.
    pub cone: usize,
    /// Sheet label, unique within the multi-section.
    pub label: String,
    /// Integral slope of the linear function on this sheet.
    pub slope: Covector,
    /// Affine offset (zero for everything built here).
    pub offset: Rat,
}

/// Identification of two sheets along a shared base ray.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingEdge {
    pub ray: Vector,
    /// Indices into the sheet list.
    pub a: usize,
    pub b: usize,
}

/// A branched cover of a complete fan with a piecewise-linear function on
/// the total space: sheets, gluing table and (combinatorial) branch locus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TropicalMultiSection {
    pub base: Fan,
    pub sheets: Vec<SheetedCone>,
    pub gluings: Vec<GluingEdge>,
    /// Branch points of the projection; always the origin here.
    pub branch_points: Vec<Vector>,
}

/// Sheet permutation over a fixed base cone, e.g. the monodromy of one loop
/// around the branch point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SheetPermutation {
    pub mapping: BTreeMap<String, String>,
}

impl SheetPermutation {
    pub fn is_identity(&self) -> bool {
        self.mapping.iter().all(|(k, v)| k == v)
    }

    pub fn is_transposition(&self) -> bool {
        self.mapping.len() == 2
            && self.mapping.iter().all(|(k, v)| k != v)
            && self.squared_is_identity()
    }

    pub fn squared_is_identity(&self) -> bool {
        self.mapping
            .iter()
            .all(|(k, v)| self.mapping.get(v) == Some(k))
    }
}

#[derive(Debug, Error)]
pub enum CoverError {
    #[error("unknown sheet label {0:?}")]
    UnknownSheet(String),
    #[error("no gluing matches sheet {sheet:?} across ray {ray:?}")]
    InconsistentGluing { sheet: String, ray: Vector },
    #[error("covers have different degrees ({0} vs {1})")]
    DegreeMismatch(usize, usize),
    #[error("sheet pairing violates the gluing tables at ray {0:?}")]
    PairingViolation(Vector),
    #[error("multi-section failed validation: {0}")]
    Invalid(String),
}

/// One line of a validation report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValidationEntry {
    pub check: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValidationReport {
    pub entries: Vec<ValidationEntry>,
}

impl ValidationReport {
    pub fn all_ok(&self) -> bool {
        self.entries.iter().all(|e| e.ok)
    }
}

impl TropicalMultiSection {
    pub fn sheet_index(&self, label: &str) -> Result<usize, CoverError> {
        self.sheets
            .iter()
            .position(|s| s.label == label)
            .ok_or_else(|| CoverError::UnknownSheet(label.to_string()))
    }

    pub fn sheet(&self, label: &str) -> Result<&SheetedCone, CoverError> {
        Ok(&self.sheets[self.sheet_index(label)?])
    }

    /// Sheet indices over a base cone, in label order.
    pub fn sheets_over(&self, cone: usize) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.sheets.len())
            .filter(|&i| self.sheets[i].cone == cone)
            .collect();
        v.sort_by(|&a, &b| self.sheets[a].label.cmp(&self.sheets[b].label));
        v
    }

    /// Covering degree, assuming it is constant (validated separately).
    pub fn degree(&self) -> usize {
        self.sheets_over(0).len()
    }

    fn edge_continuity(&self, e: &GluingEdge) -> bool {
        let sa = &self.sheets[e.a];
        let sb = &self.sheets[e.b];
        rat_int(pair(&sa.slope, &e.ray)) + sa.offset.clone()
            == rat_int(pair(&sb.slope, &e.ray)) + sb.offset.clone()
    }

    /// Structural validation: continuity across every gluing edge, integral
    /// slopes (by construction of `Covector`), constant covering degree over
    /// every base ray, and the branch locus being the origin only.
    pub fn validate(&self) -> ValidationReport {
        let mut entries = Vec::new();

        for e in &self.gluings {
            let ok = self.edge_continuity(e);
            entries.push(ValidationEntry {
                check: format!(
                    "continuity {} ~ {} along ray ({},{})",
                    self.sheets[e.a].label, self.sheets[e.b].label, e.ray.0, e.ray.1
                ),
                ok,
                detail: if ok {
                    "linear parts agree on the shared ray".into()
                } else {
                    "linear parts disagree on the shared ray".into()
                },
            });
        }

        for e in &self.gluings {
            let adjacent = self
                .base
                .shared_ray(self.sheets[e.a].cone, self.sheets[e.b].cone)
                == Some(e.ray);
            entries.push(ValidationEntry {
                check: format!(
                    "adjacency {} ~ {}",
                    self.sheets[e.a].label, self.sheets[e.b].label
                ),
                ok: adjacent,
                detail: "glued sheets must lie over cones sharing the edge ray".into(),
            });
        }

        let degree = self.degree();
        for (i, j, ray) in &self.base.adjacency {
            let over_i = self.sheets_over(*i);
            let over_j = self.sheets_over(*j);
            let edges: Vec<&GluingEdge> = self.gluings.iter().filter(|e| e.ray == *ray).collect();
            let mut seen_a = BTreeSet::new();
            let mut seen_b = BTreeSet::new();
            for e in &edges {
                let (x, y) = if self.sheets[e.a].cone == *i {
                    (e.a, e.b)
                } else {
                    (e.b, e.a)
                };
                seen_a.insert(x);
                seen_b.insert(y);
            }
            let ok = edges.len() == degree
                && seen_a.len() == degree
                && seen_b.len() == degree
                && over_i.len() == degree
                && over_j.len() == degree;
            entries.push(ValidationEntry {
                check: format!("covering degree over ray ({},{})", ray.0, ray.1),
                ok,
                detail: format!(
                    "{} gluing edges matching {} sheets per side (degree {})",
                    edges.len(),
                    over_i.len(),
                    degree
                ),
            });
        }

        let branch_ok =
            self.branch_points.is_empty() || self.branch_points == vec![Vector(0, 0)];
        entries.push(ValidationEntry {
            check: "branch locus".into(),
            ok: branch_ok,
            detail: "branch locus is at most the origin (codimension 2)".into(),
        });

        ValidationReport { entries }
    }

    /// Cross one wall: the sheet glued to `sheet` over the neighboring cone.
    fn cross(&self, sheet: usize, ray: Vector) -> Result<usize, CoverError> {
        for e in &self.gluings {
            if e.ray == ray {
                if e.a == sheet {
                    return Ok(e.b);
                }
                if e.b == sheet {
                    return Ok(e.a);
                }
            }
        }
        Err(CoverError::InconsistentGluing {
            sheet: self.sheets[sheet].label.clone(),
            ray,
        })
    }

    /// Monodromy of one loop around the origin, starting and ending over
    /// `base_cone`, crossing each maximal cone once in cyclic order.
    pub fn monodromy(&self, base_cone: usize) -> Result<SheetPermutation, CoverError> {
        let n = self.base.max_cones.len();
        // cyclic order by walking the adjacency graph
        let mut order = vec![base_cone];
        let mut prev = None;
        while order.len() < n {
            let current = *order.last().unwrap();
            let next = self
                .base
                .neighbors(current)
                .into_iter()
                .find(|&c| Some(c) != prev && !order.contains(&c))
                .ok_or_else(|| CoverError::Invalid("fan adjacency is not a cycle".into()))?;
            prev = Some(current);
            order.push(next);
        }
        order.push(base_cone);

        let mut mapping = BTreeMap::new();
        for start in self.sheets_over(base_cone) {
            let mut sheet = start;
            for w in order.windows(2) {
                let ray = self
                    .base
                    .shared_ray(w[0], w[1])
                    .ok_or_else(|| CoverError::Invalid("consecutive cones not adjacent".into()))?;
                sheet = self.cross(sheet, ray)?;
            }
            mapping.insert(
                self.sheets[start].label.clone(),
                self.sheets[sheet].label.clone(),
            );
        }
        Ok(SheetPermutation { mapping })
    }

    /// Trace: the base PL function whose slope on each cone is the sum of
    /// the sheet slopes over it.
    pub fn trace_pl(&self) -> PLFunction {
        let mut slopes = Vec::new();
        let mut offsets = Vec::new();
        for c in 0..self.base.max_cones.len() {
            let mut m = Covector(0, 0);
            let mut b = Rat::zero();
            for s in self.sheets_over(c) {
                m = m.add(&self.sheets[s].slope);
                b += self.sheets[s].offset.clone();
            }
            slopes.push(m);
            offsets.push(b);
        }
        PLFunction {
            fan: self.base.clone(),
            slopes,
            offsets,
        }
    }
}

/// Per-sheet slope differences of two multi-sections under a sheet pairing.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompareReport {
    /// For every sheet of `a` (label order): matched sheet of `b` and the
    /// slope difference a - b.
    pub differences: Vec<(String, String, Covector)>,
    /// Differences assemble to a continuous function on the common cover.
    pub continuous: bool,
    /// Distinct difference covectors with their supports (sheet labels of `a`).
    pub groups: Vec<(Covector, Vec<String>)>,
}

/// Compare two multi-sections over the same base through an explicit
/// per-sheet pairing (labels of `a` to labels of `b`). The pairing must be
/// compatible with both gluing tables.
pub fn compare_multisections(
    a: &TropicalMultiSection,
    b: &TropicalMultiSection,
    sheet_match: &BTreeMap<String, String>,
) -> Result<CompareReport, CoverError> {
    if a.degree() != b.degree() {
        return Err(CoverError::DegreeMismatch(a.degree(), b.degree()));
    }
    let matched = |label: &str| -> Result<usize, CoverError> {
        let target = sheet_match
            .get(label)
            .ok_or_else(|| CoverError::UnknownSheet(label.to_string()))?;
        b.sheet_index(target)
    };

    // pairing must respect cones and send gluing edges to gluing edges
    for s in &a.sheets {
        let t = &b.sheets[matched(&s.label)?];
        if s.cone != t.cone {
            return Err(CoverError::PairingViolation(Vector(0, 0)));
        }
    }
    for e in &a.gluings {
        let ta = matched(&a.sheets[e.a].label)?;
        let tb = matched(&a.sheets[e.b].label)?;
        let found = b
            .gluings
            .iter()
            .any(|f| f.ray == e.ray && ((f.a == ta && f.b == tb) || (f.a == tb && f.b == ta)));
        if !found {
            return Err(CoverError::PairingViolation(e.ray));
        }
    }

    let mut differences = Vec::new();
    for s in &a.sheets {
        let t = &b.sheets[matched(&s.label)?];
        differences.push((s.label.clone(), t.label.clone(), s.slope.sub(&t.slope)));
    }
    differences.sort_by(|x, y| x.0.cmp(&y.0));

    // continuity of the difference across every edge of a
    let continuous = a.gluings.iter().all(|e| {
        let da = differences
            .iter()
            .find(|(l, _, _)| *l == a.sheets[e.a].label)
            .unwrap()
            .2;
        let db = differences
            .iter()
            .find(|(l, _, _)| *l == a.sheets[e.b].label)
            .unwrap()
            .2;
        pair(&da, &e.ray) == pair(&db, &e.ray)
    });

    let mut groups: BTreeMap<Covector, Vec<String>> = BTreeMap::new();
    for (label, _, d) in &differences {
        groups.entry(*d).or_default().push(label.clone());
    }
    Ok(CompareReport {
        differences,
        continuous,
        groups: groups.into_iter().collect(),
    })
}

fn sheet(cone: usize, label: &str, slope: (i64, i64)) -> SheetedCone {
    SheetedCone {
        cone,
        label: label.to_string(),
        slope: Covector(slope.0, slope.1),
        offset: Rat::zero(),
    }
}

/// The degree-2 multi-section tropicalizing the Fubini-Study connection of
/// the tangent bundle: sheets `k+`/`k-` over cone `k` with linear functions
/// 0, 0, 2x1, x1, x2, 2x2, glued so the cover is connected with
/// transposition monodromy.
pub fn build_l() -> TropicalMultiSection {
    let base = build_p2_fan();
    let sheets = vec![
        sheet(0, "0+", (0, 0)),
        sheet(0, "0-", (0, 0)),
        sheet(1, "1+", (2, 0)),
        sheet(1, "1-", (1, 0)),
        sheet(2, "2+", (0, 1)),
        sheet(2, "2-", (0, 2)),
    ];
    // indices: 0+ = 0, 0- = 1, 1+ = 2, 1- = 3, 2+ = 4, 2- = 5
    let gluings = vec![
        // along v0 = (1,1): 1+ ~ 2-, 1- ~ 2+
        GluingEdge { ray: Vector(1, 1), a: 2, b: 5 },
        GluingEdge { ray: Vector(1, 1), a: 3, b: 4 },
        // along v2 = (0,-1): 0+ ~ 1-, 0- ~ 1+
        GluingEdge { ray: Vector(0, -1), a: 0, b: 3 },
        GluingEdge { ray: Vector(0, -1), a: 1, b: 2 },
        // along v1 = (-1,0): 0+ ~ 2-, 0- ~ 2+
        GluingEdge { ray: Vector(-1, 0), a: 0, b: 5 },
        GluingEdge { ray: Vector(-1, 0), a: 1, b: 4 },
    ];
    TropicalMultiSection {
        base,
        sheets,
        gluings,
        branch_points: vec![Vector(0, 0)],
    }
}

/// The cone-complex multi-section built from the equivariant chart splitting
/// of the tangent bundle: sheet `ki` over cone `k` carries the supporting
/// function of the boundary-divisor summand `i`, and `ij ~ ji`, `ik ~ jk`
/// along the common ray.
pub fn build_l_prime() -> TropicalMultiSection {
    let base = build_p2_fan();
    let sheets = vec![
        sheet(0, "01", (-1, 0)),
        sheet(0, "02", (0, -1)),
        sheet(1, "10", (1, 0)),
        sheet(1, "12", (1, -1)),
        sheet(2, "20", (0, 1)),
        sheet(2, "21", (-1, 1)),
    ];
    // indices: 01 = 0, 02 = 1, 10 = 2, 12 = 3, 20 = 4, 21 = 5
    let gluings = vec![
        // along v2 = (0,-1) between cones 0 and 1: 01 ~ 10, 02 ~ 12
        GluingEdge { ray: Vector(0, -1), a: 0, b: 2 },
        GluingEdge { ray: Vector(0, -1), a: 1, b: 3 },
        // along v1 = (-1,0) between cones 0 and 2: 02 ~ 20, 01 ~ 21
        GluingEdge { ray: Vector(-1, 0), a: 1, b: 4 },
        GluingEdge { ray: Vector(-1, 0), a: 0, b: 5 },
        // along v0 = (1,1) between cones 1 and 2: 10 ~ 20, 12 ~ 21
        GluingEdge { ray: Vector(1, 1), a: 2, b: 4 },
        GluingEdge { ray: Vector(1, 1), a: 3, b: 5 },
    ];
    TropicalMultiSection {
        base,
        sheets,
        gluings,
        branch_points: vec![Vector(0, 0)],
    }
}

/// Disconnected double of two base PL functions: sheet `first`/`second`
/// over every cone with diagonal gluings. Used for direct-sum cocycles and
/// as the trivial-monodromy control.
pub fn parallel_double(
    first: (&str, &PLFunction),
    second: (&str, &PLFunction),
) -> TropicalMultiSection {
    let base = first.1.fan.clone();
    assert_eq!(base, second.1.fan);
    let mut sheets = Vec::new();
    for c in 0..base.max_cones.len() {
        sheets.push(SheetedCone {
            cone: c,
            label: format!("{}{}", first.0, c),
            slope: first.1.slopes[c],
            offset: first.1.offsets[c].clone(),
        });
        sheets.push(SheetedCone {
            cone: c,
            label: format!("{}{}", second.0, c),
            slope: second.1.slopes[c],
            offset: second.1.offsets[c].clone(),
        });
    }
    let mut gluings = Vec::new();
    for (i, j, ray) in &base.adjacency {
        for off in 0..2 {
            gluings.push(GluingEdge {
                ray: *ray,
                a: 2 * i + off,
                b: 2 * j + off,
            });
        }
    }
    TropicalMultiSection {
        base,
        sheets,
        gluings,
        branch_points: vec![],
    }
}

/// The sheet pairing between the two standard instances under which their
/// difference is piecewise the two coordinate functions.
pub fn standard_sheet_match() -> BTreeMap<String, String> {
    BTreeMap::from([
        ("0-".to_string(), "01".to_string()),
        ("0+".to_string(), "02".to_string()),
        ("1+".to_string(), "10".to_string()),
        ("1-".to_string(), "12".to_string()),
        ("2+".to_string(), "21".to_string()),
        ("2-".to_string(), "20".to_string()),
    ])
}
