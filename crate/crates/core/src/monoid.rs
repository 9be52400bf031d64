//! The monoid of probabilistic 1-Lipschitz maps over a finite invariant
//! metric group.
//!
//! The sup-convolution of two maps is
//! `(f ⊙ h)(x) = sup over y of f(y) * h(y⁻¹ x)`; under a sup-continuous
//! triangle function this makes the 1-Lipschitz maps a monoid whose identity
//! is the point map of the group identity, and the point embedding is an
//! injective group homomorphism into it. The map space carries the metric
//! `sup over x of f(x) * h(x)`, extended discretely outside the completion
//! carrier. On a finite group the carrier of the completion is exactly the
//! set of point maps, the units of the monoid are exactly those point maps,
//! and an isometric isomorphism of groups transports to the map monoids and
//! can be recovered from them — all checked here by exact enumeration.

use thiserror::Error;

use crate::distributions::{sibley_distance, DistFn, WeakTolerance};
use crate::lipschitz::{delta_embed, LipMap};
use crate::rational::Rat;
use crate::report::{AxiomId, Report, Violation};
use crate::spaces::ProbGroup;

#[derive(Debug, Error)]
pub enum MonoidError {
    #[error("`{op}` requires a sup-continuous triangle function")]
    SupContinuityRequired { op: &'static str },
    #[error("group element `{0}` has no two-sided inverse in the table")]
    MissingInverse(String),
    #[error("map tables must cover the carrier: expected {expected}, got {got}")]
    BadTableLength { expected: usize, got: usize },
    #[error("the point map correspondence is not an isometric isomorphism: {0}")]
    InvalidIso(Report),
    #[error("the oracle image of the point map of `{0}` is not a point map")]
    NotDeltaImage(String),
    #[error("the oracle is undefined on the point map of `{0}`")]
    OracleUndefined(String),
}

fn require_sup_continuous(g: &ProbGroup, op: &'static str) -> Result<(), MonoidError> {
    if g.tf().is_sup_continuous() {
        Ok(())
    } else {
        Err(MonoidError::SupContinuityRequired { op })
    }
}

fn check_len(g: &ProbGroup, f: &LipMap) -> Result<(), MonoidError> {
    if f.len() != g.len() {
        return Err(MonoidError::BadTableLength {
            expected: g.len(),
            got: f.len(),
        });
    }
    Ok(())
}

fn group_inverse(g: &ProbGroup, x: usize) -> Result<usize, MonoidError> {
    g.inverse(x)
        .ok_or_else(|| MonoidError::MissingInverse(g.label(x).to_string()))
}

/// Sup-convolution of two maps over the group:
/// `(f ⊙ h)(x) = sup over y of f(y) * h(y⁻¹ x)`.
pub fn sup_conv_maps(g: &ProbGroup, f: &LipMap, h: &LipMap) -> Result<LipMap, MonoidError> {
    require_sup_continuous(g, "sup_conv_maps")?;
    check_len(g, f)?;
    check_len(g, h)?;
    let n = g.len();
    let mut values = Vec::with_capacity(n);
    for x in 0..n {
        let family: Vec<DistFn> = (0..n)
            .map(|y| {
                let yinv_x = g.op(group_inverse(g, y)?, x);
                Ok(g.tf().combine(f.get(y), h.get(yinv_x)))
            })
            .collect::<Result<_, MonoidError>>()?;
        values.push(DistFn::pointwise_sup(&family).expect("carrier is nonempty"));
    }
    Ok(LipMap::new(values))
}

/// The metric on the map space: `sup over x of f(x) * h(x)`. Restricted to
/// point maps it coincides with the group's own metric.
pub fn map_distance(g: &ProbGroup, f: &LipMap, h: &LipMap) -> DistFn {
    let family: Vec<DistFn> = (0..g.len())
        .map(|x| g.tf().combine(f.get(x), h.get(x)))
        .collect();
    DistFn::pointwise_sup(&family).expect("carrier is nonempty")
}

/// Index of the point whose point map equals `f`, when there is one. On a
/// finite carrier this is exactly membership in the completion carrier.
pub fn completion_member(g: &ProbGroup, f: &LipMap) -> Option<usize> {
    if f.len() != g.len() {
        return None;
    }
    (0..g.len()).find(|&a| (0..g.len()).all(|y| f.get(y) == g.metric(y, a)))
}

/// Discrete extension of [`map_distance`] to all maps: the sup metric inside
/// the completion carrier, the top step between equal maps, the bottom
/// element between distinct maps not both in the carrier.
pub fn extended_map_distance(g: &ProbGroup, f: &LipMap, h: &LipMap) -> DistFn {
    if completion_member(g, f).is_some() && completion_member(g, h).is_some() {
        map_distance(g, f, h)
    } else if f == h {
        DistFn::top()
    } else {
        DistFn::bottom()
    }
}

/// Separation evidence produced by [`completion_carrier`]: on a finite
/// carrier the distinct point maps sit at positive pairwise Sibley distance
/// from coincidence, so every Cauchy sequence is eventually constant and the
/// completion adds nothing.
#[derive(Debug, Clone)]
pub struct CompletionCertificate {
    /// Smallest Sibley distance between an off-diagonal metric entry and the
    /// top step; `None` on a one-point carrier.
    pub min_separation: Option<Rat>,
    /// Bisection tolerance the separations were computed at.
    pub tol: Rat,
    /// All off-diagonal entries differ from the top step exactly, and every
    /// computed separation is positive.
    pub separated: bool,
}

/// The carrier of the completion of a finite group: the family of point maps,
/// one per carrier point, together with the separation certificate.
pub fn completion_carrier(
    g: &ProbGroup,
    tol: &WeakTolerance,
) -> (Vec<LipMap>, CompletionCertificate) {
    let deltas: Vec<LipMap> = (0..g.len())
        .map(|a| delta_embed(g.space(), a).expect("index in range"))
        .collect();
    let mut min_separation: Option<Rat> = None;
    let mut separated = true;
    for p in 0..g.len() {
        for q in (p + 1)..g.len() {
            if g.metric(p, q).is_top() {
                separated = false;
            }
            let d = sibley_distance(g.metric(p, q), &DistFn::top(), tol);
            if !d.is_positive() {
                separated = false;
            }
            min_separation = Some(match min_separation.take() {
                Some(m) => m.min(d),
                None => d,
            });
        }
    }
    (
        deltas,
        CompletionCertificate {
            min_separation,
            tol: tol.eps().clone(),
            separated,
        },
    )
}

/// Two-sided inverse of a unit of the map monoid, when `f` is one.
///
/// Under a sup-convolution triangle function the only invertible
/// distribution is the top step, and on a finite (hence complete) group the
/// units are exactly the point maps; so `f` is a unit precisely when it is
/// the point map of some `x`, with inverse the point map of `x⁻¹`.
pub fn unit_inverse(g: &ProbGroup, f: &LipMap) -> Result<Option<LipMap>, MonoidError> {
    require_sup_continuous(g, "unit_inverse")?;
    check_len(g, f)?;
    match completion_member(g, f) {
        Some(x) => {
            let xinv = group_inverse(g, x)?;
            Ok(Some(delta_embed(g.space(), xinv).expect("index in range")))
        }
        None => Ok(None),
    }
}

/// Brute-force inverse search: the first candidate `c` with
/// `f ⊙ c = c ⊙ f = identity point map`, if any. Independent of
/// [`unit_inverse`], which it cross-checks in the test suites.
pub fn inverse_search_oracle(
    g: &ProbGroup,
    f: &LipMap,
    candidates: &[LipMap],
) -> Result<Option<LipMap>, MonoidError> {
    let delta_e = delta_embed(g.space(), g.identity()).expect("identity in range");
    for c in candidates {
        if sup_conv_maps(g, f, c)? == delta_e && sup_conv_maps(g, c, f)? == delta_e {
            return Ok(Some(c.clone()));
        }
    }
    Ok(None)
}

/// A claimed isometric isomorphism between two group carriers, as the image
/// of each point of the first under a point map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsoWitness {
    forward: Vec<usize>,
}

impl IsoWitness {
    pub fn new(forward: Vec<usize>) -> IsoWitness {
        IsoWitness { forward }
    }

    pub fn forward(&self) -> &[usize] {
        &self.forward
    }

    pub fn apply(&self, x: usize) -> usize {
        self.forward[x]
    }

    /// Inverse point map, when the witness is a bijection onto `0..n`.
    pub fn backward(&self, n: usize) -> Option<Vec<usize>> {
        let mut back = vec![usize::MAX; n];
        if self.forward.len() != n {
            return None;
        }
        for (a, &b) in self.forward.iter().enumerate() {
            if b >= n || back[b] != usize::MAX {
                return None;
            }
            back[b] = a;
        }
        Some(back)
    }
}

/// Checks that the witness is a bijection, a group homomorphism over the op
/// tables, and preserves the metric exactly, reporting every failure.
pub fn verify_isometric_iso(ga: &ProbGroup, gb: &ProbGroup, iso: &IsoWitness) -> Report {
    let mut violations = Vec::new();
    let n = ga.len();
    if iso.forward().len() != n || gb.len() != n || iso.backward(n).is_none() {
        violations.push(Violation::new(AxiomId::Bijection, vec![]));
        return Report::from_violations(violations);
    }
    for x in 0..n {
        for y in 0..n {
            if iso.apply(ga.op(x, y)) != gb.op(iso.apply(x), iso.apply(y)) {
                violations.push(Violation::new(
                    AxiomId::Homomorphism,
                    vec![ga.label(x).into(), ga.label(y).into()],
                ));
            }
            let da = ga.metric(x, y);
            let db = gb.metric(iso.apply(x), iso.apply(y));
            if da != db {
                violations.push(
                    Violation::new(
                        AxiomId::MetricEquality,
                        vec![ga.label(x).into(), ga.label(y).into()],
                    )
                    .with_sides(db.clone(), da.clone()),
                );
            }
        }
    }
    Report::from_violations(violations)
}

/// A monoid-isomorphism oracle between two map monoids: a callable contract,
/// not a table, because the map space is infinite. `None` means the oracle
/// has no image for the given map.
pub trait MonoidIsoOracle {
    fn apply(&self, f: &LipMap) -> Option<LipMap>;
}

/// The transported isomorphism `f -> f ∘ 𝓘⁻¹`, defined on every map.
#[derive(Debug, Clone)]
pub struct TransportedIso {
    backward: Vec<usize>,
}

impl TransportedIso {
    pub fn transport(&self, f: &LipMap) -> LipMap {
        LipMap::new(
            self.backward
                .iter()
                .map(|&a| f.get(a).clone())
                .collect(),
        )
    }
}

impl MonoidIsoOracle for TransportedIso {
    fn apply(&self, f: &LipMap) -> Option<LipMap> {
        Some(self.transport(f))
    }
}

/// Builds the map-monoid isomorphism induced by a verified isometric group
/// isomorphism: precomposition with its inverse. Rejects a witness that
/// fails [`verify_isometric_iso`], returning the report.
pub fn transport_iso(
    ga: &ProbGroup,
    gb: &ProbGroup,
    iso: &IsoWitness,
) -> Result<TransportedIso, MonoidError> {
    let report = verify_isometric_iso(ga, gb, iso);
    if !report.passed {
        return Err(MonoidError::InvalidIso(report));
    }
    let backward = iso
        .backward(ga.len())
        .expect("verified witnesses are bijections");
    Ok(TransportedIso { backward })
}

/// Recovers the point isomorphism from a monoid-isomorphism oracle by
/// evaluating it on every point map: each image must itself be a point map
/// (units go to units), the induced point correspondence must be a verified
/// isometric isomorphism, and that witness is returned.
pub fn recover_iso(
    ga: &ProbGroup,
    gb: &ProbGroup,
    phi: &dyn MonoidIsoOracle,
) -> Result<IsoWitness, MonoidError> {
    require_sup_continuous(ga, "recover_iso")?;
    let mut forward = Vec::with_capacity(ga.len());
    for a in 0..ga.len() {
        let delta_a = delta_embed(ga.space(), a).expect("index in range");
        let image = phi
            .apply(&delta_a)
            .ok_or_else(|| MonoidError::OracleUndefined(ga.label(a).to_string()))?;
        if image.len() != gb.len() {
            return Err(MonoidError::NotDeltaImage(ga.label(a).to_string()));
        }
        let b = completion_member(gb, &image)
            .ok_or_else(|| MonoidError::NotDeltaImage(ga.label(a).to_string()))?;
        forward.push(b);
    }
    let witness = IsoWitness::new(forward);
    let report = verify_isometric_iso(ga, gb, &witness);
    if !report.passed {
        return Err(MonoidError::InvalidIso(report));
    }
    Ok(witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{relabel_group, zn_group};
    use crate::lipschitz::{is_one_lipschitz, shift_map};
    use crate::tnorms::{TNorm, TriangleFn};

    fn z3() -> ProbGroup {
        zn_group(3, TriangleFn::SupConv(TNorm::Minimum)).unwrap()
    }

    fn deltas(g: &ProbGroup) -> Vec<LipMap> {
        (0..g.len())
            .map(|a| delta_embed(g.space(), a).unwrap())
            .collect()
    }

    #[test]
    fn point_maps_multiply_like_the_group() {
        let g = z3();
        let d = deltas(&g);
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(
                    sup_conv_maps(&g, &d[a], &d[b]).unwrap(),
                    d[g.op(a, b)]
                );
            }
        }
    }

    #[test]
    fn identity_point_map_is_two_sided_identity() {
        let g = z3();
        let e = &deltas(&g)[g.identity()];
        for f in member_family(&g) {
            assert_eq!(&sup_conv_maps(&g, &f, e).unwrap(), &f);
            assert_eq!(&sup_conv_maps(&g, e, &f).unwrap(), &f);
        }
    }

    /// Direct double-loop evaluation of the defining supremum, kept separate
    /// from the production path (which loops over the left factor only).
    fn conv_bruteforce(g: &ProbGroup, f: &LipMap, h: &LipMap) -> LipMap {
        let n = g.len();
        let values = (0..n)
            .map(|x| {
                let mut family = Vec::new();
                for y in 0..n {
                    for z in 0..n {
                        if g.op(y, z) == x {
                            family.push(g.tf().combine(f.get(y), h.get(z)));
                        }
                    }
                }
                DistFn::pointwise_sup(&family).unwrap()
            })
            .collect();
        LipMap::new(values)
    }

    fn member_family(g: &ProbGroup) -> Vec<LipMap> {
        let mut fam = deltas(g);
        let shifts = [
            DistFn::heaviside(&Rat::int(1)).unwrap(),
            DistFn::from_jumps(vec![(Rat::new(1, 2), Rat::new(1, 2))]).unwrap(),
            DistFn::bottom(),
        ];
        for a in 0..g.len() {
            for s in &shifts {
                fam.push(shift_map(g.space(), &fam[a].clone(), s));
            }
        }
        fam
    }

    #[test]
    fn conv_matches_double_loop_and_closes() {
        let g = z3();
        let mut gen = crate::generate::Gen::new(17);
        let mut fam = member_family(&g);
        fam.extend((0..6).map(|_| gen.lip_map(g.space(), 2)));
        for f in &fam {
            for h in &fam {
                let got = sup_conv_maps(&g, f, h).unwrap();
                assert_eq!(got, conv_bruteforce(&g, f, h));
                assert!(is_one_lipschitz(g.space(), got.values()).passed);
            }
        }
    }

    #[test]
    fn map_distance_restricts_to_the_group_metric() {
        let g = z3();
        let d = deltas(&g);
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(&map_distance(&g, &d[a], &d[b]), g.metric(a, b));
            }
        }
    }

    #[test]
    fn extended_distance_cases() {
        let g = z3();
        let d = deltas(&g);
        let outside = shift_map(g.space(), &d[0], &DistFn::heaviside(&Rat::int(1)).unwrap());
        assert!(completion_member(&g, &outside).is_none());
        assert_eq!(extended_map_distance(&g, &d[0], &d[1]), map_distance(&g, &d[0], &d[1]));
        assert_eq!(extended_map_distance(&g, &outside, &outside), DistFn::top());
        assert_eq!(extended_map_distance(&g, &outside, &d[0]), DistFn::bottom());
    }

    #[test]
    fn completion_of_a_finite_group_is_its_point_maps() {
        let tol = WeakTolerance::pow2(20);
        let g = z3();
        let (pts, cert) = completion_carrier(&g, &tol);
        assert_eq!(pts.len(), 3);
        assert!(cert.separated);
        // Word distance 1 lifts to H_1, whose separation from the top step
        // is the full unit.
        assert_eq!(cert.min_separation, Some(Rat::one()));

        let z2 = zn_group(2, TriangleFn::SupConv(TNorm::Minimum)).unwrap();
        let (pts, cert) = completion_carrier(&z2, &tol);
        assert_eq!(pts, deltas(&z2));
        assert_eq!(cert.min_separation, Some(Rat::one()));

        let singleton = zn_group(1, TriangleFn::SupConv(TNorm::Minimum)).unwrap();
        let (pts, cert) = completion_carrier(&singleton, &tol);
        assert_eq!(pts.len(), 1);
        assert!(cert.separated && cert.min_separation.is_none());
    }

    #[test]
    fn units_are_exactly_the_point_maps() {
        let g = z3();
        let d = deltas(&g);
        let e = &d[g.identity()];
        let candidates = member_family(&g);
        for (x, dx) in d.iter().enumerate() {
            let inv = unit_inverse(&g, dx).unwrap().unwrap();
            assert_eq!(&inv, &d[g.inverse(x).unwrap()]);
            assert_eq!(&sup_conv_maps(&g, dx, &inv).unwrap(), e);
            let found = inverse_search_oracle(&g, dx, &candidates).unwrap();
            assert_eq!(found, Some(inv));
        }
        let non_unit = shift_map(g.space(), e, &DistFn::heaviside(&Rat::int(1)).unwrap());
        assert_eq!(unit_inverse(&g, &non_unit).unwrap(), None);
        assert_eq!(
            inverse_search_oracle(&g, &non_unit, &candidates).unwrap(),
            None
        );
    }

    #[test]
    fn transport_and_recover_roundtrip() {
        let g = z3();
        let (g2, iso) = relabel_group(&g, &[2, 0, 1], "q").unwrap();
        assert!(verify_isometric_iso(&g, &g2, &iso).passed);
        let phi = transport_iso(&g, &g2, &iso).unwrap();
        // Point maps transport to point maps of the image points.
        for a in 0..3 {
            let img = phi.transport(&delta_embed(g.space(), a).unwrap());
            assert_eq!(img, delta_embed(g2.space(), iso.apply(a)).unwrap());
        }
        let recovered = recover_iso(&g, &g2, &phi).unwrap();
        assert_eq!(recovered, iso);
    }

    #[test]
    fn identity_oracle_recovers_identity() {
        let g = z3();
        struct Id;
        impl MonoidIsoOracle for Id {
            fn apply(&self, f: &LipMap) -> Option<LipMap> {
                Some(f.clone())
            }
        }
        let recovered = recover_iso(&g, &g, &Id).unwrap();
        assert_eq!(recovered.forward(), &[0, 1, 2]);
    }

    #[test]
    fn non_point_image_is_a_structural_error() {
        let g = z3();
        struct Broken(ProbGroup);
        impl MonoidIsoOracle for Broken {
            fn apply(&self, f: &LipMap) -> Option<LipMap> {
                Some(shift_map(
                    self.0.space(),
                    f,
                    &DistFn::heaviside(&Rat::int(1)).unwrap(),
                ))
            }
        }
        assert!(matches!(
            recover_iso(&g, &g, &Broken(g.clone())),
            Err(MonoidError::NotDeltaImage(_))
        ));
    }

    #[test]
    fn bad_witnesses_are_reported() {
        let g = z3();
        // A bijection that is not a homomorphism: swap identity away.
        let report = verify_isometric_iso(&g, &g, &IsoWitness::new(vec![1, 0, 2]));
        assert!(report
            .violations
            .iter()
            .any(|v| v.axiom == AxiomId::Homomorphism));
        // A homomorphism onto a copy with one corrupted metric entry is
        // reported with both distribution functions.
        let (copy, iso) = relabel_group(&g, &[0, 1, 2], "c").unwrap();
        let mut metric = copy.space().metric_table().to_vec();
        metric[0][1] = DistFn::heaviside(&Rat::int(9)).unwrap();
        metric[1][0] = metric[0][1].clone();
        let space = crate::spaces::ProbSpace::new(
            copy.space().points().to_vec(),
            metric,
            copy.tf(),
        )
        .unwrap();
        let corrupted = ProbGroup::new(space, copy.op_table().to_vec(), copy.identity()).unwrap();
        let report = verify_isometric_iso(&g, &corrupted, &iso);
        let mismatch = report
            .violations
            .iter()
            .find(|v| v.axiom == AxiomId::MetricEquality)
            .expect("metric mismatch is reported");
        assert!(mismatch.lhs.is_some() && mismatch.rhs.is_some());
        // Not a bijection at all.
        let report = verify_isometric_iso(&g, &g, &IsoWitness::new(vec![0, 0, 2]));
        assert!(report
            .violations
            .iter()
            .any(|v| v.axiom == AxiomId::Bijection));
        assert!(matches!(
            transport_iso(&g, &g, &IsoWitness::new(vec![0, 0, 2])),
            Err(MonoidError::InvalidIso(_))
        ));
    }

    #[test]
    fn dual_triangle_functions_are_rejected() {
        let g = zn_group(3, TriangleFn::InfConvDual(TNorm::Minimum)).unwrap();
        let d = deltas(&g);
        assert!(matches!(
            sup_conv_maps(&g, &d[0], &d[1]),
            Err(MonoidError::SupContinuityRequired { .. })
        ));
        assert!(matches!(
            unit_inverse(&g, &d[0]),
            Err(MonoidError::SupContinuityRequired { .. })
        ));
    }
}
