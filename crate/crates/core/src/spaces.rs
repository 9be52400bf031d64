//! Finite probabilistic metric spaces and invariant metric groups.
//!
//! A [`ProbSpace`] carries a finite point set, a total table of pairwise
//! distribution functions and a triangle function; a [`ProbGroup`] adds a
//! group table whose metric is invariant under left and right translation.
//! Carriers are finite and enumerable throughout, so every axiom is a
//! decidable exact check.

use std::collections::HashMap;

use thiserror::Error;

use crate::distributions::DistFn;
use crate::rational::Rat;
use crate::report::{AxiomId, Report, Violation};
use crate::tnorms::TriangleFn;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpaceError {
    #[error("point set must be nonempty")]
    EmptyCarrier,
    #[error("duplicate point label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown point label `{0}`")]
    UnknownPoint(String),
    #[error("table must be {expected}x{expected}; row {row} has length {got}")]
    BadTableShape {
        expected: usize,
        row: usize,
        got: usize,
    },
    #[error("classical table is not a metric: {axiom} fails at ({p}, {q})")]
    NotAMetric { axiom: AxiomId, p: String, q: String },
    #[error("triangle function violates the Heaviside sum law at ({a}, {b})")]
    HeavisideSumLaw { a: Rat, b: Rat },
    #[error("scale factor must be nonnegative, got {0}")]
    NegativeScale(Rat),
    #[error("group table entry {0} is out of range")]
    GroupEntryOutOfRange(usize),
}

/// Finite probabilistic metric space: points, a total metric table and the
/// triangle function used in its triangle axiom.
#[derive(Debug, Clone)]
pub struct ProbSpace {
    points: Vec<String>,
    index: HashMap<String, usize>,
    metric: Vec<Vec<DistFn>>,
    tf: TriangleFn,
}

impl ProbSpace {
    /// Shape-checked constructor. Axiom conformance is a separate concern:
    /// run [`validate_space`] (file parsing does).
    pub fn new(
        points: Vec<String>,
        metric: Vec<Vec<DistFn>>,
        tf: TriangleFn,
    ) -> Result<ProbSpace, SpaceError> {
        if points.is_empty() {
            return Err(SpaceError::EmptyCarrier);
        }
        let mut index = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            if index.insert(p.clone(), i).is_some() {
                return Err(SpaceError::DuplicateLabel(p.clone()));
            }
        }
        check_square(&metric, points.len())?;
        Ok(ProbSpace {
            points,
            index,
            metric,
            tf,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn label(&self, i: usize) -> &str {
        &self.points[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize, SpaceError> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| SpaceError::UnknownPoint(label.to_string()))
    }

    pub fn metric(&self, p: usize, q: usize) -> &DistFn {
        &self.metric[p][q]
    }

    pub fn metric_table(&self) -> &[Vec<DistFn>] {
        &self.metric
    }

    pub fn tf(&self) -> TriangleFn {
        self.tf
    }

    /// The space induced on a subset of the carrier (same triangle function,
    /// restricted table). Restriction preserves all three space axioms.
    pub fn restrict(&self, subset: &[usize]) -> ProbSpace {
        let points = subset.iter().map(|&i| self.points[i].clone()).collect();
        let metric = subset
            .iter()
            .map(|&i| subset.iter().map(|&j| self.metric[i][j].clone()).collect())
            .collect();
        ProbSpace::new(points, metric, self.tf).expect("restriction keeps shape")
    }
}

fn check_square<T>(table: &[Vec<T>], n: usize) -> Result<(), SpaceError> {
    if table.len() != n {
        return Err(SpaceError::BadTableShape {
            expected: n,
            row: usize::MAX,
            got: table.len(),
        });
    }
    for (row, entries) in table.iter().enumerate() {
        if entries.len() != n {
            return Err(SpaceError::BadTableShape {
                expected: n,
                row,
                got: entries.len(),
            });
        }
    }
    Ok(())
}

/// Checks the three probabilistic-metric-space axioms exactly: the diagonal
/// is the top step and nothing else is, the table is symmetric, and
/// `D(p,q) * D(q,r) <= D(p,r)` for every ordered triple under the space's
/// triangle function.
pub fn validate_space(s: &ProbSpace) -> Report {
    let mut violations = Vec::new();
    let n = s.len();
    for p in 0..n {
        for q in 0..n {
            let d = s.metric(p, q);
            if (p == q) != d.is_top() {
                violations.push(
                    Violation::new(
                        AxiomId::IdentityOfIndiscernibles,
                        vec![s.label(p).into(), s.label(q).into()],
                    )
                    .with_sides(d.clone(), DistFn::top()),
                );
            }
            if p < q && s.metric(p, q) != s.metric(q, p) {
                violations.push(
                    Violation::new(
                        AxiomId::Symmetry,
                        vec![s.label(p).into(), s.label(q).into()],
                    )
                    .with_sides(s.metric(p, q).clone(), s.metric(q, p).clone()),
                );
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                let lhs = s.tf().combine(s.metric(p, q), s.metric(q, r));
                if !lhs.leq(s.metric(p, r)) {
                    violations.push(
                        Violation::new(
                            AxiomId::Triangle,
                            vec![s.label(p).into(), s.label(q).into(), s.label(r).into()],
                        )
                        .with_sides(lhs, s.metric(p, r).clone()),
                    );
                }
            }
        }
    }
    Report::from_violations(violations)
}

/// Finite invariant probabilistic metric group: a space plus a group table.
#[derive(Debug, Clone)]
pub struct ProbGroup {
    space: ProbSpace,
    op: Vec<Vec<usize>>,
    identity: usize,
    /// Derived two-sided inverse candidates: `inverse[x]` is the first `y`
    /// with `x·y = y·x = e`, when one exists. Missing entries are reported by
    /// [`validate_invariant_group`], not rejected at construction.
    inverse: Vec<Option<usize>>,
}

impl ProbGroup {
    pub fn new(
        space: ProbSpace,
        op: Vec<Vec<usize>>,
        identity: usize,
    ) -> Result<ProbGroup, SpaceError> {
        let n = space.len();
        check_square(&op, n)?;
        for row in &op {
            for &entry in row {
                if entry >= n {
                    return Err(SpaceError::GroupEntryOutOfRange(entry));
                }
            }
        }
        if identity >= n {
            return Err(SpaceError::GroupEntryOutOfRange(identity));
        }
        let inverse = (0..n)
            .map(|x| (0..n).find(|&y| op[x][y] == identity && op[y][x] == identity))
            .collect();
        Ok(ProbGroup {
            space,
            op,
            identity,
            inverse,
        })
    }

    pub fn space(&self) -> &ProbSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn op(&self, x: usize, y: usize) -> usize {
        self.op[x][y]
    }

    pub fn op_table(&self) -> &[Vec<usize>] {
        &self.op
    }

    pub fn inverse(&self, x: usize) -> Option<usize> {
        self.inverse[x]
    }

    pub fn metric(&self, p: usize, q: usize) -> &DistFn {
        self.space.metric(p, q)
    }

    pub fn tf(&self) -> TriangleFn {
        self.space.tf()
    }

    pub fn label(&self, i: usize) -> &str {
        self.space.label(i)
    }
}

/// Checks the group laws by enumeration (two-sided identity, associativity
/// over all triples, two-sided inverses) and then the invariance axiom
/// `D(pr, qr) = D(rp, rq) = D(p, q)` for all triples.
pub fn validate_invariant_group(g: &ProbGroup) -> Report {
    let mut violations = Vec::new();
    let n = g.len();
    let e = g.identity();
    for x in 0..n {
        if g.op(e, x) != x || g.op(x, e) != x {
            violations.push(Violation::new(
                AxiomId::GroupIdentity,
                vec![g.label(x).into()],
            ));
        }
        if g.inverse(x).is_none() {
            violations.push(Violation::new(
                AxiomId::GroupInverse,
                vec![g.label(x).into()],
            ));
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if g.op(g.op(x, y), z) != g.op(x, g.op(y, z)) {
                    violations.push(Violation::new(
                        AxiomId::GroupAssociativity,
                        vec![g.label(x).into(), g.label(y).into(), g.label(z).into()],
                    ));
                }
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                let d = g.metric(p, q);
                let right = g.metric(g.op(p, r), g.op(q, r));
                let left = g.metric(g.op(r, p), g.op(r, q));
                for side in [right, left] {
                    if side != d {
                        violations.push(
                            Violation::new(
                                AxiomId::Invariance,
                                vec![g.label(p).into(), g.label(q).into(), g.label(r).into()],
                            )
                            .with_sides(side.clone(), d.clone()),
                        );
                    }
                }
            }
        }
    }
    Report::from_violations(violations)
}

/// Validates that `d` is a classical metric on the labels, by enumeration.
#[allow(clippy::needless_range_loop)] // indices are the violation witnesses
pub fn check_classical_metric(points: &[String], d: &[Vec<Rat>]) -> Result<(), SpaceError> {
    check_square(d, points.len())?;
    let n = points.len();
    let fail = |axiom, p: usize, q: usize| SpaceError::NotAMetric {
        axiom,
        p: points[p].clone(),
        q: points[q].clone(),
    };
    for p in 0..n {
        for q in 0..n {
            if d[p][q].is_negative() || ((p == q) != d[p][q].is_zero()) {
                return Err(fail(AxiomId::IdentityOfIndiscernibles, p, q));
            }
            if d[p][q] != d[q][p] {
                return Err(fail(AxiomId::Symmetry, p, q));
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                if d[p][r] > &d[p][q] + &d[q][r] {
                    return Err(fail(AxiomId::Triangle, p, r));
                }
            }
        }
    }
    Ok(())
}

/// Lifts a classical metric to the probabilistic space `D(p,q) = H_{d(p,q)}`.
///
/// Requires `d` to be a metric and the triangle function to turn sums of the
/// involved step thresholds into threshold sums (`H_a * H_b = H_{a+b}`),
/// which is checked on exactly the finitely many distances in the table; the
/// resulting space then passes [`validate_space`].
pub fn menger_from_classical(
    points: Vec<String>,
    d: &[Vec<Rat>],
    tf: TriangleFn,
) -> Result<ProbSpace, SpaceError> {
    if points.is_empty() {
        return Err(SpaceError::EmptyCarrier);
    }
    check_classical_metric(&points, d)?;
    let mut involved: Vec<Rat> = d.iter().flatten().cloned().collect();
    involved.sort();
    involved.dedup();
    for a in &involved {
        for b in &involved {
            let lhs = tf.combine(
                &DistFn::heaviside(a).expect("metric values are nonnegative"),
                &DistFn::heaviside(b).expect("metric values are nonnegative"),
            );
            if lhs != DistFn::heaviside(&(a + b)).expect("sum of nonnegatives") {
                return Err(SpaceError::HeavisideSumLaw {
                    a: a.clone(),
                    b: b.clone(),
                });
            }
        }
    }
    let metric = d
        .iter()
        .map(|row| {
            row.iter()
                .map(|a| DistFn::heaviside(a).expect("metric values are nonnegative"))
                .collect()
        })
        .collect();
    ProbSpace::new(points, metric, tf)
}

/// Time-rescaled metric table `D_k(x, y)(t) = D(x, y)(t / k)`: every
/// breakpoint is multiplied by `k`. For `k = 0` the whole table degenerates
/// to the top step, which is no longer a valid space, so a raw table is
/// returned rather than a `ProbSpace`.
pub fn scale_metric(s: &ProbSpace, k: &Rat) -> Result<Vec<Vec<DistFn>>, SpaceError> {
    if k.is_negative() {
        return Err(SpaceError::NegativeScale(k.clone()));
    }
    Ok(s.metric_table()
        .iter()
        .map(|row| {
            row.iter()
                .map(|f| {
                    if k.is_zero() {
                        DistFn::top()
                    } else {
                        f.scale_time(k)
                    }
                })
                .collect()
        })
        .collect())
}

/// The probabilistic discrete metric: top step on the diagonal, bottom
/// element everywhere else. Its triangle axiom holds because the bottom
/// element absorbs every convolution.
pub fn discrete_space(points: Vec<String>, tf: TriangleFn) -> Result<ProbSpace, SpaceError> {
    let n = points.len();
    let metric = (0..n)
        .map(|p| {
            (0..n)
                .map(|q| if p == q { DistFn::top() } else { DistFn::bottom() })
                .collect()
        })
        .collect();
    ProbSpace::new(points, metric, tf)
}
