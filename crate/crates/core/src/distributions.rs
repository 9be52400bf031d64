//! Distribution functions vanishing at zero, represented exactly.
//!
//! A [`DistFn`] is a nondecreasing, left-continuous step function
//! `F : [-inf, +inf] -> [0, 1]` with `F(t) = 0` for `t <= 0` and `F(+inf) = 1`
//! by convention. It is stored as its ordered jump list `(t_i, v_i)`: the
//! function is `0` up to and including `t_1`, equals `v_i` on `(t_i, t_{i+1}]`
//! and `v_k` past the last jump. The family is a complete lattice under the
//! pointwise order, with the unit step at zero as top and the identically-zero
//! function (empty jump list) as bottom.
//!
//! Canonical form: breakpoints strictly increasing, levels strictly increasing
//! in `(0, 1]`, no zero levels. Equality of values is equality of jump lists.

use serde::de::{self, SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use thiserror::Error;

use crate::rational::Rat;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DistFnError {
    #[error("jump times must be strictly increasing (offender at index {0})")]
    TimesNotIncreasing(usize),
    #[error("jump levels must be nondecreasing (offender at index {0})")]
    LevelsDecreasing(usize),
    #[error("jump level {0} is outside [0, 1]")]
    LevelOutOfRange(Rat),
    #[error("jump time {0} is negative; distribution functions here vanish at 0")]
    NegativeTime(Rat),
    #[error("a Heaviside step needs a nonnegative threshold, got {0}")]
    NegativeThreshold(Rat),
    #[error("the empty family has no supremum")]
    EmptyFamily,
    #[error("tolerance must lie in (0, 1], got {0}")]
    BadTolerance(Rat),
}

/// Element of the lattice of step distribution functions (see module docs).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DistFn {
    jumps: Vec<(Rat, Rat)>,
}

impl DistFn {
    /// Canonicalizing constructor for untrusted jump lists.
    ///
    /// Times must be strictly increasing and nonnegative, levels nondecreasing
    /// within `[0, 1]`. Zero levels are dropped and equal consecutive levels
    /// merged (keeping the earliest breakpoint), so the result is canonical.
    pub fn from_jumps(pairs: Vec<(Rat, Rat)>) -> Result<DistFn, DistFnError> {
        for (i, (t, v)) in pairs.iter().enumerate() {
            if i > 0 && pairs[i - 1].0 >= *t {
                return Err(DistFnError::TimesNotIncreasing(i));
            }
            if v.is_negative() || *v > Rat::one() {
                return Err(DistFnError::LevelOutOfRange(v.clone()));
            }
            if i > 0 && pairs[i - 1].1 > *v {
                return Err(DistFnError::LevelsDecreasing(i));
            }
        }
        if let Some((t, _)) = pairs.iter().find(|(_, v)| !v.is_zero()) {
            if t.is_negative() {
                return Err(DistFnError::NegativeTime(t.clone()));
            }
        }
        Ok(Self::from_sweep(pairs))
    }

    /// Trusted builder: `points` lists `(breakpoint, value just after it)` in
    /// strictly increasing breakpoint order with nondecreasing values. Emits a
    /// jump only where the value strictly rises, which canonicalizes.
    pub(crate) fn from_sweep<I: IntoIterator<Item = (Rat, Rat)>>(points: I) -> DistFn {
        let mut jumps: Vec<(Rat, Rat)> = Vec::new();
        let mut level = Rat::zero();
        for (t, v) in points {
            if v > level {
                level = v.clone();
                jumps.push((t, v));
            }
        }
        DistFn { jumps }
    }

    /// The step `H_a`: 0 up to and including `a`, then 1. Rejects negative `a`.
    pub fn heaviside(a: &Rat) -> Result<DistFn, DistFnError> {
        if a.is_negative() {
            return Err(DistFnError::NegativeThreshold(a.clone()));
        }
        Ok(DistFn {
            jumps: vec![(a.clone(), Rat::one())],
        })
    }

    /// `H_0`, the maximal element.
    pub fn top() -> DistFn {
        DistFn {
            jumps: vec![(Rat::zero(), Rat::one())],
        }
    }

    /// `H_inf`, the minimal element: identically zero on the finite reals.
    pub fn bottom() -> DistFn {
        DistFn { jumps: Vec::new() }
    }

    pub fn jumps(&self) -> &[(Rat, Rat)] {
        &self.jumps
    }

    pub fn is_bottom(&self) -> bool {
        self.jumps.is_empty()
    }

    pub fn is_top(&self) -> bool {
        self.jumps.len() == 1 && self.jumps[0].0.is_zero() && self.jumps[0].1.is_one()
    }

    /// Largest level reached at finite times (0 for the bottom element). A
    /// value below 1 means the distribution is defective.
    pub fn top_level(&self) -> Rat {
        self.jumps
            .last()
            .map(|(_, v)| v.clone())
            .unwrap_or_else(Rat::zero)
    }

    /// Left-continuous evaluation: the level just *left* of `t`.
    pub fn eval(&self, t: &Rat) -> Rat {
        let idx = self.jumps.partition_point(|(ti, _)| ti < t);
        if idx == 0 {
            Rat::zero()
        } else {
            self.jumps[idx - 1].1.clone()
        }
    }

    /// The level held on the open interval just *right* of `t`.
    pub fn level_after(&self, t: &Rat) -> Rat {
        let idx = self.jumps.partition_point(|(ti, _)| ti <= t);
        if idx == 0 {
            Rat::zero()
        } else {
            self.jumps[idx - 1].1.clone()
        }
    }

    /// Pointwise order `F <= G`, decided exactly on the merged breakpoint
    /// partition: both functions are constant between consecutive merged
    /// breakpoints, so comparing the level just after every breakpoint covers
    /// all of the line.
    pub fn leq(&self, other: &DistFn) -> bool {
        self.jumps
            .iter()
            .chain(other.jumps.iter())
            .all(|(t, _)| self.level_after(t) <= other.level_after(t))
    }

    /// Least upper bound of a nonempty family, exact via merged breakpoints.
    pub fn pointwise_sup(family: &[DistFn]) -> Result<DistFn, DistFnError> {
        if family.is_empty() {
            return Err(DistFnError::EmptyFamily);
        }
        let mut breakpoints: Vec<Rat> = family
            .iter()
            .flat_map(|f| f.jumps.iter().map(|(t, _)| t.clone()))
            .collect();
        breakpoints.sort();
        breakpoints.dedup();
        Ok(DistFn::from_sweep(breakpoints.into_iter().map(|t| {
            let level = family
                .iter()
                .map(|f| f.level_after(&t))
                .max()
                .expect("family is nonempty");
            (t, level)
        })))
    }

    /// Time rescaling `t -> t/k` for `k > 0`: every breakpoint is multiplied
    /// by `k`. Callers handle `k = 0` themselves.
    pub(crate) fn scale_time(&self, k: &Rat) -> DistFn {
        debug_assert!(k.is_positive());
        DistFn {
            jumps: self
                .jumps
                .iter()
                .map(|(t, v)| (t * k, v.clone()))
                .collect(),
        }
    }
}

impl fmt::Debug for DistFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.jumps.is_empty() {
            return f.write_str("DistFn[bottom]");
        }
        f.write_str("DistFn[")?;
        for (i, (t, v)) in self.jumps.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({t}, {v})")?;
        }
        f.write_str("]")
    }
}

impl Serialize for DistFn {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.jumps.len()))?;
        for (t, v) in &self.jumps {
            seq.serialize_element(&[t, v])?;
        }
        seq.end()
    }
}

struct DistFnVisitor;

impl<'de> Visitor<'de> for DistFnVisitor {
    type Value = DistFn;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("an array of [time, level] pairs")
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<DistFn, A::Error> {
        let mut pairs = Vec::new();
        while let Some([t, v]) = seq.next_element::<[Rat; 2]>()? {
            pairs.push((t, v));
        }
        DistFn::from_jumps(pairs).map_err(|e| de::Error::custom(e.to_string()))
    }
}

impl<'de> Deserialize<'de> for DistFn {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<DistFn, D::Error> {
        deserializer.deserialize_seq(DistFnVisitor)
    }
}

/// Stopping width for the Sibley-distance bisection; must lie in `(0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakTolerance(Rat);

impl WeakTolerance {
    pub fn new(eps: Rat) -> Result<WeakTolerance, DistFnError> {
        if !eps.is_positive() || eps > Rat::one() {
            return Err(DistFnError::BadTolerance(eps));
        }
        Ok(WeakTolerance(eps))
    }

    /// 2^-k.
    pub fn pow2(k: u32) -> WeakTolerance {
        WeakTolerance(Rat::pow2_inv(k))
    }

    pub fn eps(&self) -> &Rat {
        &self.0
    }
}

/// One side of the Sibley condition: `g(t) <= f(t + h) + h` for every
/// `t` in the open interval `(0, 1/h)`.
///
/// The difference `g(t) - f(t + h)` is a left-continuous step function of `t`
/// whose breakpoints are the jumps of `g` and the jumps of `f` shifted left by
/// `h`; sampling each breakpoint inside the interval plus one interior point
/// of the unbounded tail piece therefore decides the condition exactly.
fn shift_dominates(g: &DistFn, f: &DistFn, h: &Rat) -> bool {
    let h_inv = h.recip();
    let mut samples: Vec<Rat> = g
        .jumps()
        .iter()
        .map(|(t, _)| t.clone())
        .chain(f.jumps().iter().map(|(t, _)| t - h))
        .filter(|t| t.is_positive() && *t < h_inv)
        .collect();
    samples.sort();
    samples.dedup();
    let tail_start = samples.last().cloned().unwrap_or_else(Rat::zero);
    samples.push(Rat::midpoint(&tail_start, &h_inv));
    samples
        .into_iter()
        .all(|t| g.eval(&t) <= f.eval(&(&t + h)) + h.clone())
}

fn sibley_condition(f: &DistFn, g: &DistFn, h: &Rat) -> bool {
    shift_dominates(g, f, h) && shift_dominates(f, g, h)
}

/// Sibley (modified Levy) distance between two distribution functions:
/// the infimum of `h` in `(0, 1]` such that each function is dominated by the
/// other's `h`-shift-`h`-lift on `(0, 1/h)`. Convergence in this metric is
/// weak convergence.
///
/// Returns exactly 0 when `f = g`; otherwise bisects on `h` (the condition is
/// monotone in `h`, and always holds at `h = 1`) and returns the upper bracket
/// end, which is within `tol` of the infimum.
pub fn sibley_distance(f: &DistFn, g: &DistFn, tol: &WeakTolerance) -> Rat {
    if f == g {
        return Rat::zero();
    }
    let mut lo = Rat::zero();
    let mut hi = Rat::one();
    debug_assert!(sibley_condition(f, g, &hi));
    while &(&hi - &lo) > tol.eps() {
        let mid = Rat::midpoint(&lo, &hi);
        if sibley_condition(f, g, &mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Limit of a finite sequence at resolution `tol`: the last element, provided
/// the tail (the last `ceil(n/2)` entries) is Cauchy under the Sibley distance
/// at that resolution. Returns `None` otherwise.
pub fn weak_limit(seq: &[DistFn], tol: &WeakTolerance) -> Option<DistFn> {
    if seq.is_empty() {
        return None;
    }
    let tail = &seq[seq.len() - seq.len().div_ceil(2)..];
    for (i, f) in tail.iter().enumerate() {
        for g in &tail[i + 1..] {
            if &sibley_distance(f, g, tol) > tol.eps() {
                return None;
            }
        }
    }
    seq.last().cloned()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(num: i64, den: i64) -> DistFn {
        DistFn::heaviside(&Rat::new(num, den)).unwrap()
    }

    fn d(jumps: &[(i64, i64, i64, i64)]) -> DistFn {
        DistFn::from_jumps(
            jumps
                .iter()
                .map(|&(tn, td, vn, vd)| (Rat::new(tn, td), Rat::new(vn, vd)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn heaviside_steps() {
        assert_eq!(DistFn::top().jumps(), &[(Rat::zero(), Rat::one())]);
        assert_eq!(DistFn::bottom().jumps(), &[]);
        assert_eq!(h(2, 1).jumps(), &[(Rat::int(2), Rat::one())]);
        assert!(DistFn::heaviside(&Rat::new(-1, 2)).is_err());
    }

    #[test]
    fn eval_is_left_continuous() {
        assert_eq!(DistFn::top().eval(&Rat::int(5)), Rat::one());
        assert_eq!(h(2, 1).eval(&Rat::int(2)), Rat::zero());
        assert_eq!(h(2, 1).eval(&Rat::new(5, 2)), Rat::one());
        assert_eq!(DistFn::bottom().eval(&Rat::int(1_000_000)), Rat::zero());
        let f = d(&[(1, 1, 1, 2), (3, 1, 1, 1)]);
        assert_eq!(f.eval(&Rat::int(1)), Rat::zero());
        assert_eq!(f.eval(&Rat::int(3)), Rat::new(1, 2));
        assert_eq!(f.eval(&Rat::int(4)), Rat::one());
    }

    #[test]
    fn canonicalization_drops_zero_and_repeated_levels() {
        let f = DistFn::from_jumps(vec![
            (Rat::int(1), Rat::zero()),
            (Rat::int(2), Rat::new(1, 2)),
            (Rat::int(3), Rat::new(1, 2)),
            (Rat::int(4), Rat::one()),
        ])
        .unwrap();
        assert_eq!(f, d(&[(2, 1, 1, 2), (4, 1, 1, 1)]));
    }

    #[test]
    fn construction_rejections() {
        assert!(matches!(
            DistFn::from_jumps(vec![(Rat::int(2), Rat::new(1, 2)), (Rat::int(1), Rat::one())]),
            Err(DistFnError::TimesNotIncreasing(_))
        ));
        assert!(matches!(
            DistFn::from_jumps(vec![(Rat::int(1), Rat::one()), (Rat::int(2), Rat::new(1, 2))]),
            Err(DistFnError::LevelsDecreasing(_))
        ));
        assert!(matches!(
            DistFn::from_jumps(vec![(Rat::int(1), Rat::int(2))]),
            Err(DistFnError::LevelOutOfRange(_))
        ));
        assert!(matches!(
            DistFn::from_jumps(vec![(Rat::int(-1), Rat::one())]),
            Err(DistFnError::NegativeTime(_))
        ));
        // A negative breakpoint carrying a zero level is dropped, not an error.
        assert_eq!(
            DistFn::from_jumps(vec![(Rat::int(-1), Rat::zero()), (Rat::int(1), Rat::one())])
                .unwrap(),
            h(1, 1)
        );
    }

    #[test]
    fn lattice_extremes() {
        let f = d(&[(1, 2, 1, 3), (2, 1, 1, 1)]);
        assert!(DistFn::bottom().leq(&f));
        assert!(f.leq(&DistFn::top()));
        assert!(!h(1, 1).leq(&h(2, 1)));
        assert!(h(2, 1).leq(&h(1, 1)));
    }

    #[test]
    fn sup_examples() {
        let f = d(&[(1, 1, 1, 2)]);
        let g = h(2, 1);
        assert_eq!(DistFn::pointwise_sup(std::slice::from_ref(&f)).unwrap(), f);
        assert_eq!(
            DistFn::pointwise_sup(&[h(1, 1), h(2, 1)]).unwrap(),
            h(1, 1)
        );
        assert_eq!(
            DistFn::pointwise_sup(&[f, g]).unwrap(),
            d(&[(1, 1, 1, 2), (2, 1, 1, 1)])
        );
        assert!(DistFn::pointwise_sup(&[]).is_err());
    }

    #[test]
    fn sibley_frozen_values() {
        let tol = WeakTolerance::pow2(20);
        let f = d(&[(1, 3, 2, 5), (7, 4, 1, 1)]);
        assert_eq!(sibley_distance(&f, &f, &tol), Rat::zero());
        assert_eq!(
            sibley_distance(&DistFn::top(), &DistFn::bottom(), &tol),
            Rat::one()
        );
        // d(H_0, H_{1/2}) = 1/2: the bisection lands on it exactly.
        assert_eq!(
            sibley_distance(&DistFn::top(), &h(1, 2), &tol),
            Rat::new(1, 2)
        );
    }

    #[test]
    fn sibley_agrees_with_grid_scan() {
        // Independent check: scan h over the dyadic grid k/2^8 and take the
        // first grid point satisfying the defining condition.
        let tol = WeakTolerance::new(Rat::new(1, 256)).unwrap();
        let cases = [
            (DistFn::top(), h(1, 2)),
            (h(1, 4), h(3, 4)),
            (d(&[(1, 2, 1, 2)]), d(&[(1, 2, 1, 1)])),
            (DistFn::bottom(), d(&[(1, 1, 1, 3)])),
        ];
        for (f, g) in cases {
            let scan = (1..=256)
                .map(|k| Rat::new(k, 256))
                .find(|h| sibley_condition(&f, &g, h))
                .unwrap();
            let bisected = sibley_distance(&f, &g, &tol);
            assert!(
                (&scan - &bisected).abs() <= Rat::new(2, 256),
                "scan {scan} vs bisection {bisected}"
            );
        }
    }

    #[test]
    fn small_distance_separates_only_equal_functions() {
        // At the generator's resolution (levels on denominators <= 64, times
        // on denominators <= 8) distinct canonical step functions sit far
        // above the bisection tolerance, so a distance within tolerance
        // certifies equality of levels at every shared continuity point,
        // which for canonical step functions is equality outright.
        let tol = WeakTolerance::pow2(20);
        let mut gen = crate::generate::Gen::new(5150);
        for _ in 0..200 {
            let f = gen.dist_fn(6, 64);
            let g = gen.dist_fn(6, 64);
            let close = &sibley_distance(&f, &g, &tol) <= tol.eps();
            assert_eq!(close, f == g);
        }
    }

    #[test]
    fn weak_limit_examples() {
        let tol = WeakTolerance::new(Rat::new(1, 4)).unwrap();
        let f = d(&[(1, 1, 1, 2), (2, 1, 1, 1)]);
        assert_eq!(
            weak_limit(&[f.clone(), f.clone(), f.clone()], &tol),
            Some(f)
        );
        let seq = [h(1, 1), h(1, 2), h(1, 4), h(1, 8)];
        assert_eq!(weak_limit(&seq, &tol), Some(h(1, 8)));
        let alternating = [DistFn::top(), h(1, 1), DistFn::top(), h(1, 1)];
        assert_eq!(weak_limit(&alternating, &tol), None);
    }

    #[test]
    fn json_encoding_roundtrip() {
        let f = d(&[(1, 2, 1, 3), (2, 1, 1, 1)]);
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(text, r#"[["1/2","1/3"],["2","1"]]"#);
        let back: DistFn = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        let bottom: DistFn = serde_json::from_str("[]").unwrap();
        assert_eq!(bottom, DistFn::bottom());
        // Integers are accepted on input.
        let g: DistFn = serde_json::from_str(r#"[[1, "1/2"], [2, 1]]"#).unwrap();
        assert_eq!(g, d(&[(1, 1, 1, 2), (2, 1, 1, 1)]));
        assert!(serde_json::from_str::<DistFn>(r#"[[2, 1], [1, 1]]"#).is_err());
    }
}
