//! Deterministic generators for test families and benchmark operands.
//!
//! Everything here is seeded: the same seed reproduces the same candidate
//! families, spaces and maps. The group catalog (cyclic groups, the Klein
//! four-group, the symmetric group on three letters) carries invariant word
//! metrics lifted through step functions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::distributions::DistFn;
use crate::lipschitz::{delta_embed, shift_map, LipMap};
use crate::monoid::IsoWitness;
use crate::rational::Rat;
use crate::spaces::{menger_from_classical, ProbGroup, ProbSpace, SpaceError};
use crate::tnorms::TriangleFn;

/// Default RNG seed when none is supplied (the CLI reads `PMSKIT_SEED`).
pub const DEFAULT_SEED: u64 = 0x70_6d_73_6b;

/// Seeded generator of random exact-arithmetic test data.
pub struct Gen {
    rng: ChaCha12Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Gen {
        Gen {
            rng: ChaCha12Rng::seed_from_u64(seed),
        }
    }

    /// A level in `(0, 1]` with denominator at most `max_denom`.
    pub fn level(&mut self, max_denom: i64) -> Rat {
        let den = self.rng.gen_range(1..=max_denom);
        let num = self.rng.gen_range(1..=den);
        Rat::new(num, den)
    }

    /// A nonnegative time with denominator at most `max_denom`.
    pub fn time(&mut self, max_int: i64, max_denom: i64) -> Rat {
        let den = self.rng.gen_range(1..=max_denom);
        let num = self.rng.gen_range(0..=max_int * den);
        Rat::new(num, den)
    }

    /// A random step function with at most `max_jumps` jumps and rational
    /// data with denominators at most `max_denom`. Occasionally produces the
    /// two lattice extremes; defective distributions come out naturally.
    pub fn dist_fn(&mut self, max_jumps: usize, max_denom: i64) -> DistFn {
        match self.rng.gen_range(0..12) {
            0 => return DistFn::bottom(),
            1 => return DistFn::top(),
            _ => {}
        }
        let want = self.rng.gen_range(1..=max_jumps);
        let mut times: Vec<Rat> = (0..want).map(|_| self.time(6, max_denom)).collect();
        times.sort();
        times.dedup();
        let mut levels: Vec<Rat> = (0..times.len()).map(|_| self.level(max_denom)).collect();
        if self.rng.gen_bool(0.5) {
            levels.push(Rat::one());
        }
        levels.sort();
        levels.dedup();
        let k = times.len().min(levels.len());
        let jumps: Vec<(Rat, Rat)> = times
            .into_iter()
            .take(k)
            .zip(levels.into_iter().rev().take(k).rev())
            .collect();
        DistFn::from_jumps(jumps).expect("generated jumps are canonical-ready")
    }

    /// A random classical metric on `n` points: a star metric (sums of
    /// positive radii), a constant metric, or distances along a line of
    /// distinct integers.
    pub fn classical_metric(&mut self, n: usize) -> Vec<Vec<Rat>> {
        let shape = self.rng.gen_range(0..3);
        let values: Vec<Rat> = match shape {
            0 => (0..n)
                .map(|_| Rat::new(self.rng.gen_range(1..=8), self.rng.gen_range(1..=4)))
                .collect(),
            1 => vec![Rat::new(self.rng.gen_range(1..=8), self.rng.gen_range(1..=4)); n],
            _ => {
                let mut coords: Vec<i64> = Vec::new();
                while coords.len() < n {
                    let c = self.rng.gen_range(0..24);
                    if !coords.contains(&c) {
                        coords.push(c);
                    }
                }
                coords.into_iter().map(Rat::int).collect()
            }
        };
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            Rat::zero()
                        } else if shape == 2 {
                            (&values[i] - &values[j]).abs()
                        } else {
                            &values[i] + &values[j]
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// A random valid probabilistic metric space on `n` labelled points:
    /// either a lifted classical metric or a two-level table built from a
    /// nested pair of classical metrics (valid for every sup-convolution
    /// triangle function).
    pub fn prob_space(&mut self, n: usize, tf: TriangleFn) -> ProbSpace {
        let points: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let d1 = self.classical_metric(n);
        if self.rng.gen_bool(0.5) {
            return menger_from_classical(points, &d1, tf).expect("generated metrics are valid");
        }
        let extra = self.classical_metric(n);
        let alpha = self.level(8);
        let metric: Vec<Vec<DistFn>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            DistFn::top()
                        } else {
                            let d2 = &d1[i][j] + &extra[i][j];
                            DistFn::from_jumps(vec![
                                (d1[i][j].clone(), alpha.clone()),
                                (d2, Rat::one()),
                            ])
                            .expect("nested thresholds with rising levels")
                        }
                    })
                    .collect()
            })
            .collect();
        ProbSpace::new(points, metric, tf).expect("square table")
    }

    /// A random 1-Lipschitz map: the pointwise supremum of a few shifted
    /// point maps, which stays in the class when the triangle function is
    /// sup-continuous.
    pub fn lip_map(&mut self, s: &ProbSpace, terms: usize) -> LipMap {
        debug_assert!(s.tf().is_sup_continuous());
        let terms = terms.max(1);
        let parts: Vec<LipMap> = (0..terms)
            .map(|_| {
                let a = self.rng.gen_range(0..s.len());
                let shift = self.dist_fn(3, 8);
                shift_map(s, &delta_embed(s, a).expect("in range"), &shift)
            })
            .collect();
        let values = (0..s.len())
            .map(|x| {
                let family: Vec<DistFn> = parts.iter().map(|p| p.get(x).clone()).collect();
                DistFn::pointwise_sup(&family).expect("at least one term")
            })
            .collect();
        LipMap::new(values)
    }

    /// A raw values table with no Lipschitz guarantee.
    pub fn raw_table(&mut self, s: &ProbSpace) -> Vec<DistFn> {
        (0..s.len()).map(|_| self.dist_fn(4, 8)).collect()
    }

    pub fn usize_in(&mut self, range: std::ops::RangeInclusive<usize>) -> usize {
        self.rng.gen_range(range)
    }

    /// A uniformly random permutation of `0..n`.
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = self.rng.gen_range(0..=i);
            perm.swap(i, j);
        }
        perm
    }

    /// Benchmark operand: `n` jumps at half-integer times with levels `k/n`.
    pub fn bench_operand(&mut self, n: usize) -> DistFn {
        let start = self.rng.gen_range(0..4);
        let jumps = (0..n as i64)
            .map(|k| {
                (
                    Rat::new(start + k, 2),
                    Rat::new(k + 1, n as i64),
                )
            })
            .collect();
        DistFn::from_jumps(jumps).expect("strictly increasing by construction")
    }
}

/// Builds an invariant group from labels, an op table and a weight function
/// on elements: the metric is the lifted word distance `d(x, y) = w(x y⁻¹)`.
/// Invariance needs `w` to be symmetric under inversion and conjugation,
/// which the catalog weights below are.
fn group_from_weights(
    labels: Vec<String>,
    op: Vec<Vec<usize>>,
    identity: usize,
    weights: &[Rat],
    tf: TriangleFn,
) -> Result<ProbGroup, SpaceError> {
    let n = labels.len();
    let inv: Vec<usize> = (0..n)
        .map(|x| (0..n).find(|&y| op[x][y] == identity).expect("group table"))
        .collect();
    let d: Vec<Vec<Rat>> = (0..n)
        .map(|x| (0..n).map(|y| weights[op[x][inv[y]]].clone()).collect())
        .collect();
    let space = menger_from_classical(labels, &d, tf)?;
    ProbGroup::new(space, op, identity)
}

/// The cyclic group of order `n` with the wrap-around word metric.
pub fn zn_group(n: usize, tf: TriangleFn) -> Result<ProbGroup, SpaceError> {
    if n == 0 {
        return Err(SpaceError::EmptyCarrier);
    }
    let labels = (0..n).map(|i| i.to_string()).collect();
    let op = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
    let weights: Vec<Rat> = (0..n).map(|i| Rat::int(i.min(n - i) as i64)).collect();
    group_from_weights(labels, op, 0, &weights, tf)
}

/// The Klein four-group with the Hamming word metric.
pub fn klein_group(tf: TriangleFn) -> Result<ProbGroup, SpaceError> {
    let labels = vec!["e".into(), "a".into(), "b".into(), "ab".into()];
    // Elements as bit pairs; the operation is xor.
    let op = (0..4usize).map(|i| (0..4).map(|j| i ^ j).collect()).collect();
    let weights: Vec<Rat> = (0..4u32).map(|i| Rat::int(i.count_ones() as i64)).collect();
    group_from_weights(labels, op, 0, &weights, tf)
}

/// The symmetric group on three letters; transpositions have weight 1 and
/// the three-cycles weight 2, a conjugation-invariant choice satisfying the
/// word triangle inequality.
pub fn s3_group(tf: TriangleFn) -> Result<ProbGroup, SpaceError> {
    let perms: [[usize; 3]; 6] = [
        [0, 1, 2],
        [1, 2, 0],
        [2, 0, 1],
        [1, 0, 2],
        [0, 2, 1],
        [2, 1, 0],
    ];
    let labels = vec![
        "e".into(),
        "r".into(),
        "rr".into(),
        "s01".into(),
        "s12".into(),
        "s02".into(),
    ];
    let compose = |p: &[usize; 3], q: &[usize; 3]| -> [usize; 3] {
        [p[q[0]], p[q[1]], p[q[2]]]
    };
    let index_of = |p: &[usize; 3]| perms.iter().position(|q| q == p).expect("closed");
    let op: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| perms.iter().map(|q| index_of(&compose(p, q))).collect())
        .collect();
    let weights: Vec<Rat> = perms
        .iter()
        .map(|p| {
            let fixed = (0..3).filter(|&i| p[i] == i).count();
            match fixed {
                3 => Rat::zero(),
                1 => Rat::one(),
                _ => Rat::int(2),
            }
        })
        .collect();
    group_from_weights(labels, op, 0, &weights, tf)
}

/// A relabelled copy of a group along a permutation: point `x` of the
/// original becomes point `perm[x]` of the copy, with fresh labels prefixed
/// by `prefix`. The permutation is then an isometric isomorphism witness
/// from the original onto the copy, by construction.
pub fn relabel_group(
    g: &ProbGroup,
    perm: &[usize],
    prefix: &str,
) -> Result<(ProbGroup, IsoWitness), SpaceError> {
    let n = g.len();
    assert_eq!(perm.len(), n, "permutation must cover the carrier");
    let mut back = vec![0usize; n];
    for (a, &b) in perm.iter().enumerate() {
        back[b] = a;
    }
    let labels: Vec<String> = (0..n).map(|i| format!("{prefix}{i}")).collect();
    let metric: Vec<Vec<DistFn>> = (0..n)
        .map(|x| (0..n).map(|y| g.metric(back[x], back[y]).clone()).collect())
        .collect();
    let op: Vec<Vec<usize>> = (0..n)
        .map(|x| {
            (0..n)
                .map(|y| perm[g.op(back[x], back[y])])
                .collect()
        })
        .collect();
    let space = ProbSpace::new(labels, metric, g.tf())?;
    let copy = ProbGroup::new(space, op, perm[g.identity()])?;
    Ok((copy, IsoWitness::new(perm.to_vec())))
}
