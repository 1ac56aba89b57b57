use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cover::TropicalMultiSection;
use crate::exact::{is_regular_on_cone, ExpVec, LaurentMatrix, LaurentPolynomial, MonomialMap};
use crate::fan::{Covector, PLFunction, Vector};

use super::{chart_to_torus, GluingError};

/// Ordered frame of a rank-2 chart trivialization: which sheet each basis
/// vector comes from, and its torus character weight.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartFrame {
    pub chart: usize,
    pub basis_labels: Vec<String>,
    /// Weight of each frame vector, as a covector in torus coordinates.
    pub weights: Vec<Covector>,
}

/// Chartwise transition data of a rank-`r` bundle over the three-chart fan.
///
/// `transitions[(i, j)]` is the matrix of the change of frame `j -> i`,
/// written in chart-`j` coordinates. Composition always happens after
/// conversion to torus coordinates through `chart_maps`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionCocycle {
    pub nvars: usize,
    pub frames: Vec<ChartFrame>,
    pub transitions: BTreeMap<(usize, usize), LaurentMatrix>,
    pub chart_maps: Vec<MonomialMap>,
    /// Shared wall ray for each stored overlap.
    pub walls: BTreeMap<(usize, usize), Vector>,
}

impl TransitionCocycle {
    pub fn transition(&self, i: usize, j: usize) -> Result<&LaurentMatrix, GluingError> {
        self.transitions
            .get(&(i, j))
            .ok_or(GluingError::MissingTransition(i, j))
    }

    /// Transition `j -> i` expressed in torus coordinates.
    pub fn transition_torus(&self, i: usize, j: usize) -> Result<LaurentMatrix, GluingError> {
        let t = self.transition(i, j)?;
        Ok(t.substitute(&self.chart_maps[j])?)
    }

    /// Product of transitions around a chart loop, in torus coordinates.
    /// The loop lists charts in visiting order, first == last for a closed
    /// loop; a single-chart loop yields the identity.
    pub fn defect(&self, chart_loop: &[usize]) -> Result<LaurentMatrix, GluingError> {
        let rank = self
            .frames
            .first()
            .map_or(2, |f| f.basis_labels.len());
        let mut acc = LaurentMatrix::identity(self.nvars, rank);
        for w in chart_loop.windows(2) {
            let step = self.transition_torus(w[1], w[0])?;
            acc = step.mul(&acc);
        }
        Ok(acc)
    }

    /// Replace a stored transition (used by negative-control tests).
    pub fn set_transition(&mut self, i: usize, j: usize, m: LaurentMatrix) {
        self.transitions.insert((i, j), m);
    }
}

/// One equivariance violation: a monomial whose exponent differs from the
/// weight difference of the frame vectors it connects.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EquivarianceViolation {
    pub overlap: (usize, usize),
    pub entry: (usize, usize),
    pub exponent: Covector,
    pub expected: Covector,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EquivarianceReport {
    pub violations: Vec<EquivarianceViolation>,
}

impl EquivarianceReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check that every monomial of every transition entry has torus exponent
/// equal to `weight(target frame vector) - weight(source frame vector)`.
pub fn equivariance_report(c: &TransitionCocycle) -> Result<EquivarianceReport, GluingError> {
    let mut violations = Vec::new();
    for &(i, j) in c.transitions.keys() {
        let torus = c.transition_torus(i, j)?;
        let wi = &c.frames[i].weights;
        let wj = &c.frames[j].weights;
        violations.extend(matrix_equivariance_violations(&torus, wi, wj).into_iter().map(
            |(entry, exponent, expected)| EquivarianceViolation {
                overlap: (i, j),
                entry,
                exponent,
                expected,
            },
        ));
    }
    Ok(EquivarianceReport { violations })
}

/// Equivariance check for a single matrix in torus coordinates against
/// target (row) and source (column) frame weights.
pub fn matrix_equivariance_violations(
    torus_matrix: &LaurentMatrix,
    row_weights: &[Covector],
    col_weights: &[Covector],
) -> Vec<((usize, usize), Covector, Covector)> {
    let mut out = Vec::new();
    for r in 0..torus_matrix.rows() {
        for s in 0..torus_matrix.cols() {
            let expected = row_weights[r].sub(&col_weights[s]);
            for (e, _) in torus_matrix.at(r, s).terms() {
                let got = Covector(e.0[0], e.0[1]);
                if got != expected {
                    out.push(((r + 1, s + 1), got, expected));
                }
            }
        }
    }
    out
}

/// Regularity of every transition and its inverse on its overlap.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegularityReport {
    /// (overlap, which side failed, entry description)
    pub failures: Vec<(String, String)>,
}

impl RegularityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Every entry of every transition, and of its inverse, must be regular on
/// the chart overlap: exponents pair nonnegatively against the negated wall
/// ray.
pub fn regularity_report(c: &TransitionCocycle) -> Result<RegularityReport, GluingError> {
    let mut failures = Vec::new();
    for &(i, j) in c.transitions.keys() {
        let wall = c
            .walls
            .get(&(i, j))
            .ok_or(GluingError::NoSharedRay(i, j))?;
        let gens = [[-wall.0, -wall.1]];
        let torus = c.transition_torus(i, j)?;
        let inv = match torus.rows() {
            1 => LaurentMatrix::from_rows(vec![vec![torus.at(0, 0).unit_inverse()?]]),
            _ => torus.inverse_2x2()?,
        };
        for (side, m) in [("transition", &torus), ("inverse", &inv)] {
            for r in 0..m.rows() {
                for s in 0..m.cols() {
                    if !is_regular_on_cone(m.at(r, s), &gens) {
                        failures.push((
                            format!("{} <- {} ({side})", i, j),
                            format!("entry ({},{}) = {}", r + 1, s + 1, m.at(r, s)),
                        ));
                    }
                }
            }
        }
    }
    Ok(RegularityReport { failures })
}

/// One matched sheet pair over an overlap, with the scalar carried by the
/// corresponding semi-flat entry.
#[derive(Clone, Debug)]
pub struct PairingEdge {
    /// Sheet label over the source chart `j`.
    pub from: String,
    /// Sheet label over the target chart `i`.
    pub to: String,
    pub coeff: LaurentPolynomial,
}

/// Sheet pairing for one ordered overlap `i <- j`.
#[derive(Clone, Debug)]
pub struct OverlapPairing {
    pub to_chart: usize,
    pub from_chart: usize,
    pub edges: Vec<PairingEdge>,
}

/// Build the semi-flat cocycle of a multi-section: for each overlap
/// `i <- j` and each matched sheet pair `s -> s'`, the `(s', s)` entry is
/// `coeff * w^-(m_{s'} - m_s)` in chart-`j` coordinates; all other entries
/// vanish. Frame weights are minus the sheet slopes.
pub fn semiflat_cocycle(
    ms: &TropicalMultiSection,
    basis_orders: &[Vec<String>],
    pairings: &[OverlapPairing],
    nvars: usize,
) -> Result<TransitionCocycle, GluingError> {
    let rank = ms.degree();
    let frames: Vec<ChartFrame> = basis_orders
        .iter()
        .enumerate()
        .map(|(chart, labels)| {
            let weights = labels
                .iter()
                .map(|l| Ok(ms.sheet(l)?.slope.neg()))
                .collect::<Result<Vec<_>, GluingError>>()?;
            Ok(ChartFrame {
                chart,
                basis_labels: labels.clone(),
                weights,
            })
        })
        .collect::<Result<Vec<_>, GluingError>>()?;

    let chart_maps: Vec<MonomialMap> = (0..basis_orders.len())
        .map(|k| chart_to_torus(k, nvars))
        .collect();

    let mut transitions = BTreeMap::new();
    let mut walls = BTreeMap::new();
    for p in pairings {
        let (i, j) = (p.to_chart, p.from_chart);
        let wall = ms
            .base
            .shared_ray(i, j)
            .ok_or(GluingError::NoSharedRay(i, j))?;
        if p.edges.len() != rank {
            return Err(GluingError::NonBijectivePairing);
        }
        let mut seen_from = vec![false; rank];
        let mut seen_to = vec![false; rank];
        let torus_to_chart = chart_maps[j].inverse()?;
        let mut m = LaurentMatrix::zero(nvars, rank, rank);
        for edge in &p.edges {
            let col = basis_orders[j]
                .iter()
                .position(|l| *l == edge.from)
                .ok_or(GluingError::NonBijectivePairing)?;
            let row = basis_orders[i]
                .iter()
                .position(|l| *l == edge.to)
                .ok_or(GluingError::NonBijectivePairing)?;
            if seen_from[col] || seen_to[row] {
                return Err(GluingError::NonBijectivePairing);
            }
            seen_from[col] = true;
            seen_to[row] = true;
            let m_from = ms.sheet(&edge.from)?.slope;
            let m_to = ms.sheet(&edge.to)?.slope;
            let torus_exp = m_from.sub(&m_to); // -(m_to - m_from)
            let mut exp = ExpVec::zeros(nvars);
            exp.0[0] = torus_exp.0;
            exp.0[1] = torus_exp.1;
            let chart_exp = torus_to_chart.apply_exp(&exp);
            *m.at_mut(row, col) = edge
                .coeff
                .mul_monomial(&chart_exp, &crate::exact::rat_int(1));
        }
        transitions.insert((i, j), m);
        walls.insert((i, j), wall);
    }

    Ok(TransitionCocycle {
        nvars,
        frames,
        transitions,
        chart_maps,
        walls,
    })
}

/// Rank-1 cocycle of a supporting function: transition `i <- j` is the
/// monomial `w^(m_j - m_i)` in chart-`j` coordinates. Overlap set matches
/// the fan adjacency, oriented with the standard loop 0 -> 1 -> 2 -> 0.
pub fn line_bundle_cocycle(pl: &PLFunction, nvars: usize) -> Result<TransitionCocycle, GluingError> {
    let frames = (0..pl.fan.max_cones.len())
        .map(|chart| ChartFrame {
            chart,
            basis_labels: vec!["s".into()],
            weights: vec![pl.slopes[chart].neg()],
        })
        .collect();
    let chart_maps: Vec<MonomialMap> = (0..pl.fan.max_cones.len())
        .map(|k| chart_to_torus(k, nvars))
        .collect();
    let mut transitions = BTreeMap::new();
    let mut walls = BTreeMap::new();
    for (i, j) in [(1usize, 0usize), (2, 1), (0, 2)] {
        let wall = pl
            .fan
            .shared_ray(i, j)
            .ok_or(GluingError::NoSharedRay(i, j))?;
        let torus_exp = pl.slopes[j].sub(&pl.slopes[i]);
        let mut exp = ExpVec::zeros(nvars);
        exp.0[0] = torus_exp.0;
        exp.0[1] = torus_exp.1;
        let chart_exp = chart_maps[j].inverse()?.apply_exp(&exp);
        let m = LaurentMatrix::from_rows(vec![vec![LaurentPolynomial::monomial(
            nvars,
            chart_exp,
            crate::exact::rat_int(1),
        )]]);
        transitions.insert((i, j), m);
        walls.insert((i, j), wall);
    }
    Ok(TransitionCocycle {
        nvars,
        frames,
        transitions,
        chart_maps,
        walls,
    })
}

/// Torus-coordinate matrix of the loop product of a rank-1 cocycle.
pub fn line_defect(c: &TransitionCocycle) -> Result<LaurentPolynomial, GluingError> {
    let d = c.defect(&[0, 1, 2, 0])?;
    Ok(d.at(0, 0).clone())
}
