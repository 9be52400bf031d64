//! Probabilistic 1-Lipschitz maps over a finite probabilistic metric space.
//!
//! A map `f` from the carrier into the distribution lattice is 1-Lipschitz
//! when `D(x, y) * f(y) <= f(x)` for every ordered pair, where `*` is the
//! space's triangle function. The point embeddings `x -> D(., x)` are the
//! basic examples; shifts, distance-to-set maps and extensions from a subset
//! all stay inside the class.

use thiserror::Error;

use crate::distributions::DistFn;
use crate::rational::Rat;
use crate::report::{AxiomId, Report, Violation};
use crate::spaces::{menger_from_classical, ProbSpace, SpaceError};
use crate::tnorms::TriangleFn;

#[derive(Debug, Error)]
pub enum LipschitzError {
    #[error("`{op}` requires a sup-continuous triangle function")]
    SupContinuityRequired { op: &'static str },
    #[error("the subset must be nonempty")]
    EmptySubset,
    #[error("point index {0} is outside the carrier")]
    PointOutOfRange(usize),
    #[error("values table has {got} entries for a carrier of {expected}")]
    BadTableLength { expected: usize, got: usize },
    #[error("classical levels must be nonnegative, got {0}")]
    NegativeLevel(Rat),
    #[error("the partial map is not 1-Lipschitz on its domain: {0}")]
    NotLipschitz(Report),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// Total assignment of a distribution function to every carrier point.
///
/// This is a plain table: raw imports are not trusted, and every operation
/// that accepts one gates it through [`is_one_lipschitz`]. Maps built by the
/// constructors in this module are 1-Lipschitz by the closure properties they
/// implement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LipMap {
    values: Vec<DistFn>,
}

impl LipMap {
    pub fn new(values: Vec<DistFn>) -> LipMap {
        LipMap { values }
    }

    pub fn values(&self) -> &[DistFn] {
        &self.values
    }

    pub fn get(&self, x: usize) -> &DistFn {
        &self.values[x]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Exact membership check: `D(x, y) * f(y) <= f(x)` over all ordered pairs.
pub fn is_one_lipschitz(s: &ProbSpace, values: &[DistFn]) -> Report {
    let mut violations = Vec::new();
    if values.len() != s.len() {
        violations.push(Violation::new(AxiomId::Lipschitz, vec!["table-size".into()]));
        return Report::from_violations(violations);
    }
    for x in 0..s.len() {
        for y in 0..s.len() {
            let lhs = s.tf().combine(s.metric(x, y), &values[y]);
            if !lhs.leq(&values[x]) {
                violations.push(
                    Violation::new(
                        AxiomId::Lipschitz,
                        vec![s.label(x).into(), s.label(y).into()],
                    )
                    .with_sides(lhs, values[x].clone()),
                );
            }
        }
    }
    Report::from_violations(violations)
}

/// The point embedding `a -> (y -> D(y, a))`. Distinct points give distinct
/// maps, since the target point is the only one sent to the top step.
pub fn delta_embed(s: &ProbSpace, a: usize) -> Result<LipMap, LipschitzError> {
    if a >= s.len() {
        return Err(LipschitzError::PointOutOfRange(a));
    }
    Ok(LipMap::new(
        (0..s.len()).map(|y| s.metric(y, a).clone()).collect(),
    ))
}

/// The shifted map `x -> f(x) * F`. Shifting preserves the Lipschitz bound
/// by associativity and monotonicity of the triangle function.
pub fn shift_map(s: &ProbSpace, f: &LipMap, shift: &DistFn) -> LipMap {
    LipMap::new(
        f.values()
            .iter()
            .map(|v| s.tf().combine(v, shift))
            .collect(),
    )
}

/// Probabilistic distance to a nonempty subset: `x -> sup over y in A of
/// D(x, y)`. Requires a sup-continuous triangle function.
pub fn dist_to_set(s: &ProbSpace, subset: &[usize]) -> Result<LipMap, LipschitzError> {
    if subset.is_empty() {
        return Err(LipschitzError::EmptySubset);
    }
    if !s.tf().is_sup_continuous() {
        return Err(LipschitzError::SupContinuityRequired { op: "dist_to_set" });
    }
    for &y in subset {
        if y >= s.len() {
            return Err(LipschitzError::PointOutOfRange(y));
        }
    }
    let values = (0..s.len())
        .map(|x| {
            let family: Vec<DistFn> = subset.iter().map(|&y| s.metric(x, y).clone()).collect();
            DistFn::pointwise_sup(&family).expect("subset is nonempty")
        })
        .collect();
    Ok(LipMap::new(values))
}

/// Extends a 1-Lipschitz map given on a subset `A` to the whole carrier via
/// `x -> sup over a in A of D(a, x) * f(a)`, which agrees with the input on
/// `A` and is 1-Lipschitz everywhere. Requires a sup-continuous triangle
/// function; the partial map is verified on the restricted space first and
/// rejected (with the witnessing report) when it is not Lipschitz there.
pub fn mcshane_extend(
    s: &ProbSpace,
    subset: &[usize],
    partial: &[DistFn],
) -> Result<LipMap, LipschitzError> {
    if subset.is_empty() {
        return Err(LipschitzError::EmptySubset);
    }
    if !s.tf().is_sup_continuous() {
        return Err(LipschitzError::SupContinuityRequired {
            op: "mcshane_extend",
        });
    }
    if partial.len() != subset.len() {
        return Err(LipschitzError::BadTableLength {
            expected: subset.len(),
            got: partial.len(),
        });
    }
    for &a in subset {
        if a >= s.len() {
            return Err(LipschitzError::PointOutOfRange(a));
        }
    }
    let restricted = s.restrict(subset);
    let report = is_one_lipschitz(&restricted, partial);
    if !report.passed {
        return Err(LipschitzError::NotLipschitz(report));
    }
    let values = (0..s.len())
        .map(|x| {
            let family: Vec<DistFn> = subset
                .iter()
                .zip(partial)
                .map(|(&a, fa)| s.tf().combine(s.metric(a, x), fa))
                .collect();
            DistFn::pointwise_sup(&family).expect("subset is nonempty")
        })
        .collect();
    Ok(LipMap::new(values))
}

/// Result of lifting a classical nonnegative map through step functions.
#[derive(Debug)]
pub struct LiftOutcome {
    pub space: ProbSpace,
    pub map: LipMap,
    /// Classical check `|L(x) - L(y)| <= d(x, y)` over all pairs.
    pub classical: Report,
    /// Probabilistic check of the lifted map on the lifted space.
    pub probabilistic: Report,
}

impl LiftOutcome {
    /// The two checks succeed or fail together.
    pub fn verdicts_agree(&self) -> bool {
        self.classical.passed == self.probabilistic.passed
    }
}

/// Lifts `L : points -> nonnegative rationals` to `x -> H_{L(x)}` over the
/// lifted space of `d`, and verifies both the classical and the probabilistic
/// Lipschitz conditions; they are equivalent, and the outcome reports both
/// verdicts with witnesses.
pub fn lift_classical(
    points: Vec<String>,
    d: &[Vec<Rat>],
    level_of: &[Rat],
    tf: TriangleFn,
) -> Result<LiftOutcome, LipschitzError> {
    let space = menger_from_classical(points, d, tf)?;
    if level_of.len() != space.len() {
        return Err(LipschitzError::BadTableLength {
            expected: space.len(),
            got: level_of.len(),
        });
    }
    let mut classical = Vec::new();
    for x in 0..space.len() {
        for y in 0..space.len() {
            if (&level_of[x] - &level_of[y]).abs() > d[x][y] {
                classical.push(Violation::new(
                    AxiomId::ClassicalLipschitz,
                    vec![space.label(x).into(), space.label(y).into()],
                ));
            }
        }
    }
    if let Some(bad) = level_of.iter().find(|l| l.is_negative()) {
        return Err(LipschitzError::NegativeLevel(bad.clone()));
    }
    let values: Vec<DistFn> = level_of
        .iter()
        .map(|l| DistFn::heaviside(l).expect("levels checked nonnegative"))
        .collect();
    let probabilistic = is_one_lipschitz(&space, &values);
    Ok(LiftOutcome {
        space,
        map: LipMap::new(values),
        classical: Report::from_violations(classical),
        probabilistic,
    })
}
