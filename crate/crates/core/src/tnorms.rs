//! Triangular norms and the triangle functions they induce.
//!
//! A t-norm `T` is a commutative, associative, monotone binary operation on
//! `[0, 1]` with identity 1. Each left-continuous t-norm induces a triangle
//! function on step distribution functions by sup-convolution,
//! `(F * L)(t) = sup over s + u = t of T(F(s), L(u))`, and its conorm dual
//! induces the inf-convolution `(F * L)(t) = inf over s + u = t of
//! T*(F(s), L(u))`. Both are computed exactly here.
//!
//! For step functions the sup-convolution has a closed form: its value at `t`
//! is the largest `T(v_i, w_j)` over jump pairs whose breakpoint sum lies
//! strictly below `t` (zero when no pair qualifies), so the result jumps only
//! at pairwise breakpoint sums. Two interchangeable kernels implement this —
//! a naive all-pairs enumeration and a Pareto-frontier sweep that discards a
//! pair as soon as some pair with a smaller breakpoint sum reaches at least
//! its T-value — plus a grid-sampling oracle that evaluates the defining
//! supremum directly and is kept independent of the closed form.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distributions::DistFn;
use crate::rational::Rat;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TNormError {
    #[error("t-norm arguments must lie in [0, 1], got {0}")]
    OutOfRange(Rat),
    #[error("unknown t-norm tag `{0}` (expected min, product or lukasiewicz)")]
    UnknownTNorm(String),
    #[error("unknown triangle function tag `{0}` (expected sup:<tnorm> or infdual:<tnorm>)")]
    UnknownTriangleFn(String),
}

/// The three left-continuous t-norm tags used throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TNorm {
    Minimum,
    Product,
    Lukasiewicz,
}

impl TNorm {
    pub const ALL: [TNorm; 3] = [TNorm::Minimum, TNorm::Product, TNorm::Lukasiewicz];

    /// `T(x, y)` for arguments already known to lie in `[0, 1]`.
    pub(crate) fn raw(self, x: &Rat, y: &Rat) -> Rat {
        match self {
            TNorm::Minimum => x.clone().min(y.clone()),
            TNorm::Product => x * y,
            TNorm::Lukasiewicz => (x + y - Rat::one()).max(Rat::zero()),
        }
    }

    /// `T(x, y)`, rejecting arguments outside `[0, 1]`.
    pub fn apply(self, x: &Rat, y: &Rat) -> Result<Rat, TNormError> {
        check_level(x)?;
        check_level(y)?;
        Ok(self.raw(x, y))
    }

    /// The dual t-conorm `T*(x, y) = 1 - T(1 - x, 1 - y)`; the minimum
    /// dualizes to the maximum.
    pub fn conorm(self, x: &Rat, y: &Rat) -> Result<Rat, TNormError> {
        check_level(x)?;
        check_level(y)?;
        Ok(self.conorm_raw(x, y))
    }

    pub(crate) fn conorm_raw(self, x: &Rat, y: &Rat) -> Rat {
        Rat::one() - self.raw(&(Rat::one() - x), &(Rat::one() - y))
    }
}

fn check_level(x: &Rat) -> Result<(), TNormError> {
    if x.is_negative() || *x > Rat::one() {
        return Err(TNormError::OutOfRange(x.clone()));
    }
    Ok(())
}

impl fmt::Display for TNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TNorm::Minimum => "min",
            TNorm::Product => "product",
            TNorm::Lukasiewicz => "lukasiewicz",
        })
    }
}

impl FromStr for TNorm {
    type Err = TNormError;

    fn from_str(s: &str) -> Result<TNorm, TNormError> {
        match s {
            "min" => Ok(TNorm::Minimum),
            "product" => Ok(TNorm::Product),
            "lukasiewicz" => Ok(TNorm::Lukasiewicz),
            other => Err(TNormError::UnknownTNorm(other.to_string())),
        }
    }
}

/// A triangle function: either the sup-convolution of a t-norm (commutative,
/// associative, monotone, with the unit step at 0 as identity, and
/// sup-continuous) or the inf-convolution of its conorm dual (commutative and
/// monotone, but not sup-continuous; its identity law is not asserted).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TriangleFn {
    SupConv(TNorm),
    InfConvDual(TNorm),
}

impl TriangleFn {
    pub fn is_sup_continuous(self) -> bool {
        matches!(self, TriangleFn::SupConv(_))
    }

    pub fn combine(self, f: &DistFn, l: &DistFn) -> DistFn {
        match self {
            TriangleFn::SupConv(t) => sup_conv(t, f, l),
            TriangleFn::InfConvDual(t) => inf_conv_dual(t, f, l),
        }
    }

    /// Whether `f` is invertible in the monoid this triangle function makes of
    /// the distribution lattice. For both convolution kinds the unit step at 0
    /// is the one and only invertible element, so this is an exact equality
    /// test against it.
    pub fn is_unit(self, f: &DistFn) -> bool {
        f.is_top()
    }
}

impl fmt::Display for TriangleFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TriangleFn::SupConv(t) => write!(f, "sup:{t}"),
            TriangleFn::InfConvDual(t) => write!(f, "infdual:{t}"),
        }
    }
}

impl FromStr for TriangleFn {
    type Err = TNormError;

    fn from_str(s: &str) -> Result<TriangleFn, TNormError> {
        let (kind, tag) = s
            .split_once(':')
            .ok_or_else(|| TNormError::UnknownTriangleFn(s.to_string()))?;
        let t: TNorm = tag.parse()?;
        match kind {
            "sup" => Ok(TriangleFn::SupConv(t)),
            "infdual" => Ok(TriangleFn::InfConvDual(t)),
            _ => Err(TNormError::UnknownTriangleFn(s.to_string())),
        }
    }
}

impl Serialize for TriangleFn {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for TriangleFn {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<TriangleFn, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Sup-convolution of two step functions. Delegates to the frontier kernel.
pub fn sup_conv(t: TNorm, f: &DistFn, l: &DistFn) -> DistFn {
    sup_conv_frontier(t, f, l)
}

/// Naive kernel: materialize every jump pair `(t_i + u_j, T(v_i, w_j))`, sort
/// by breakpoint sum, and sweep once keeping the running maximum.
pub fn sup_conv_naive(t: TNorm, f: &DistFn, l: &DistFn) -> DistFn {
    if f.is_bottom() || l.is_bottom() {
        return DistFn::bottom();
    }
    let mut pairs: Vec<(Rat, Rat)> = Vec::with_capacity(f.jumps().len() * l.jumps().len());
    for (ti, vi) in f.jumps() {
        for (uj, wj) in l.jumps() {
            pairs.push((ti + uj, t.raw(vi, wj)));
        }
    }
    pairs.sort();
    sweep_rising(pairs)
}

/// Pareto-frontier kernel: a k-way merge over the rows of the pair grid
/// (each row is already sorted by sum) that discards dominated pairs on the
/// fly. A whole row is dropped once even its largest T-value cannot exceed
/// the running maximum.
pub fn sup_conv_frontier(t: TNorm, f: &DistFn, l: &DistFn) -> DistFn {
    if f.is_bottom() || l.is_bottom() {
        return DistFn::bottom();
    }
    let rows = f.jumps();
    let cols = l.jumps();
    let top_col = &cols[cols.len() - 1].1;
    let mut heap: BinaryHeap<Reverse<(Rat, usize, usize)>> = rows
        .iter()
        .enumerate()
        .map(|(i, (ti, _))| Reverse((ti + &cols[0].0, i, 0)))
        .collect();
    let mut out: Vec<(Rat, Rat)> = Vec::new();
    let mut running = Rat::zero();
    while let Some(Reverse((sum, i, j))) = heap.pop() {
        let val = t.raw(&rows[i].1, &cols[j].1);
        if val > running {
            running = val.clone();
            match out.last_mut() {
                Some(last) if last.0 == sum => last.1 = val,
                _ => out.push((sum.clone(), val)),
            }
        }
        // Within a row both sum and value rise with the column, so the row
        // can only stay useful if its top value still beats the running max.
        if j + 1 < cols.len() && t.raw(&rows[i].1, top_col) > running {
            heap.push(Reverse((&rows[i].0 + &cols[j + 1].0, i, j + 1)));
        }
    }
    DistFn::from_sweep(out)
}

fn sweep_rising(pairs: Vec<(Rat, Rat)>) -> DistFn {
    let mut out: Vec<(Rat, Rat)> = Vec::new();
    let mut running = Rat::zero();
    for (sum, val) in pairs {
        if val > running {
            running = val.clone();
            match out.last_mut() {
                Some(last) if last.0 == sum => last.1 = val,
                _ => out.push((sum, val)),
            }
        }
    }
    DistFn::from_sweep(out)
}

/// Independent oracle for [`sup_conv`]: evaluates the defining supremum by
/// direct sampling, with no use of the closed-form pair characterization.
///
/// The result can only change value across a pairwise breakpoint sum, so it is
/// reconstructed from one sample per sum. With `eps` below a quarter of the
/// smallest gap between distinct sums, the value on the interval following a
/// sum `S` is the supremum at `t = S + eps`, and sampling the splitting point
/// `s` over the breakpoints of `f` shifted by `eps/2` realizes every jump pair
/// that contributes to that supremum.
pub fn sup_conv_grid_oracle(t: TNorm, f: &DistFn, l: &DistFn) -> DistFn {
    if f.is_bottom() || l.is_bottom() {
        return DistFn::bottom();
    }
    let mut sums: Vec<Rat> = Vec::new();
    for (ti, _) in f.jumps() {
        for (uj, _) in l.jumps() {
            sums.push(ti + uj);
        }
    }
    sums.sort();
    sums.dedup();
    let eps = min_gap(&sums)
        .map(|g| g * Rat::new(1, 4))
        .unwrap_or_else(|| Rat::new(1, 4));
    let half = &eps * &Rat::new(1, 2);
    DistFn::from_sweep(sums.into_iter().map(|s| {
        let t_star = &s + &eps;
        let val = f
            .jumps()
            .iter()
            .map(|(ti, _)| {
                let split = ti + &half;
                t.raw(&f.eval(&split), &l.eval(&(&t_star - &split)))
            })
            .max()
            .unwrap_or_else(Rat::zero);
        (s, val)
    }))
}

fn min_gap(sorted: &[Rat]) -> Option<Rat> {
    sorted.windows(2).map(|w| &w[1] - &w[0]).min()
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Ext {
    NegInf,
    Fin(Rat),
    PosInf,
}

impl Ext {
    fn add(&self, other: &Ext) -> Ext {
        match (self, other) {
            (Ext::NegInf, Ext::PosInf) | (Ext::PosInf, Ext::NegInf) => {
                unreachable!("no pair boundary mixes the two infinities")
            }
            (Ext::NegInf, _) | (_, Ext::NegInf) => Ext::NegInf,
            (Ext::PosInf, _) | (_, Ext::PosInf) => Ext::PosInf,
            (Ext::Fin(a), Ext::Fin(b)) => Ext::Fin(a + b),
        }
    }
}

/// Extended level/boundary view of a step function: levels `0, v_1, ..., v_n`
/// where level `i` is held on `(b_i, b_{i+1}]` with `b_0 = -inf` and
/// `b_{n+1} = +inf`.
struct Windows {
    levels: Vec<Rat>,
    bounds: Vec<Ext>,
}

impl Windows {
    fn of(f: &DistFn) -> Windows {
        let mut levels = vec![Rat::zero()];
        let mut bounds = vec![Ext::NegInf];
        for (t, v) in f.jumps() {
            levels.push(v.clone());
            bounds.push(Ext::Fin(t.clone()));
        }
        bounds.push(Ext::PosInf);
        Windows { levels, bounds }
    }
}

/// Inf-convolution through the dual t-conorm:
/// `(F * L)(t) = inf over s + u = t of T*(F(s), L(u))`.
///
/// For step functions the infimum at `t` is the least `T*` over level-window
/// pairs — including the implicit zero level left of each first jump — whose
/// window sum `(b_i + c_j, b_{i+1} + c_{j+1}]` contains `t`. The raw infimum
/// is constant between consecutive pairwise breakpoint sums, and the result is
/// canonicalized to its left-continuous version.
pub fn inf_conv_dual(t: TNorm, f: &DistFn, l: &DistFn) -> DistFn {
    let fw = Windows::of(f);
    let lw = Windows::of(l);
    let regions = dual_regions(f, l);
    let mut values = Vec::with_capacity(regions.len());
    for (r_lo, r_hi) in &regions {
        let mut best: Option<Rat> = None;
        for i in 0..fw.levels.len() {
            for j in 0..lw.levels.len() {
                let lo = fw.bounds[i].add(&lw.bounds[j]);
                let hi = fw.bounds[i + 1].add(&lw.bounds[j + 1]);
                if lo <= *r_lo && *r_hi <= hi {
                    let v = t.conorm_raw(&fw.levels[i], &lw.levels[j]);
                    best = Some(match best {
                        Some(b) => b.min(v),
                        None => v,
                    });
                }
            }
        }
        values.push(best.expect("every point sits in some window pair"));
    }
    assemble_regions(regions, values)
}

/// Independent oracle for [`inf_conv_dual`]: evaluates the defining infimum
/// pointwise at one representative per region by sampling the splitting point
/// and reconstructs the step function.
pub fn inf_conv_dual_grid_oracle(t: TNorm, f: &DistFn, l: &DistFn) -> DistFn {
    let regions = dual_regions(f, l);
    let values: Vec<Rat> = regions
        .iter()
        .map(|(lo, hi)| {
            // The raw infimum is constant on (lo, hi] including the right
            // endpoint, so a finite right endpoint is itself a representative.
            let point = match (lo, hi) {
                (_, Ext::Fin(c)) => c.clone(),
                (Ext::Fin(c), Ext::PosInf) => c + &Rat::one(),
                (Ext::NegInf, Ext::PosInf) => Rat::zero(),
                _ => unreachable!("regions are ordered"),
            };
            dual_value_at(t, f, l, &point)
        })
        .collect();
    assemble_regions(regions, values)
}

/// Pointwise `inf over s + u = point of T*(F(s), L(u))`, exactly.
///
/// As `s` varies, `(F(s), L(point - s))` is a step function of `s` with
/// breakpoints at the jumps of `f` and at `point` minus the jumps of `l`;
/// sampling each breakpoint, each midpoint between consecutive ones, and one
/// point beyond each end reaches every value the pair takes.
fn dual_value_at(t: TNorm, f: &DistFn, l: &DistFn, point: &Rat) -> Rat {
    let mut breaks: Vec<Rat> = f
        .jumps()
        .iter()
        .map(|(ti, _)| ti.clone())
        .chain(l.jumps().iter().map(|(uj, _)| point - uj))
        .collect();
    breaks.sort();
    breaks.dedup();
    let mut samples = Vec::with_capacity(2 * breaks.len() + 2);
    if breaks.is_empty() {
        samples.push(point.clone());
    } else {
        samples.push(&breaks[0] - &Rat::one());
        for w in breaks.windows(2) {
            samples.push(Rat::midpoint(&w[0], &w[1]));
        }
        samples.push(breaks.last().unwrap() + &Rat::one());
        samples.extend(breaks);
    }
    samples
        .into_iter()
        .map(|s| t.conorm_raw(&f.eval(&s), &l.eval(&(point - &s))))
        .min()
        .expect("at least one sample")
}

/// The half-open regions between consecutive pairwise breakpoint sums, where
/// both convolutions are constant. Always nonempty (a single unbounded region
/// when an operand has no jumps).
fn dual_regions(f: &DistFn, l: &DistFn) -> Vec<(Ext, Ext)> {
    let mut sums: Vec<Rat> = Vec::new();
    for (ti, _) in f.jumps() {
        for (uj, _) in l.jumps() {
            sums.push(ti + uj);
        }
    }
    sums.sort();
    sums.dedup();
    let mut regions = Vec::with_capacity(sums.len() + 1);
    let mut lo = Ext::NegInf;
    for s in sums {
        let hi = Ext::Fin(s);
        regions.push((lo, hi.clone()));
        lo = hi;
    }
    regions.push((lo, Ext::PosInf));
    regions
}

fn assemble_regions(regions: Vec<(Ext, Ext)>, values: Vec<Rat>) -> DistFn {
    debug_assert!(
        values[0].is_zero(),
        "a convolution of functions vanishing at 0 vanishes before the first sum"
    );
    debug_assert!(values.windows(2).all(|w| w[0] <= w[1]));
    DistFn::from_sweep(
        regions
            .into_iter()
            .zip(values)
            .skip(1)
            .map(|((lo, _), v)| match lo {
                Ext::Fin(c) => (c, v),
                _ => unreachable!("every region past the first starts at a sum"),
            }),
    )
}
