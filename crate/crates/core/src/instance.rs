//! Problem instances, line-ups and instance classification.
//!
//! External JSON uses 1-based player indices:
//!
//! ```json
//! { "n": 3, "p": [[0.9, 1, 1], [0.5, 0.9, 1], [0, 0.5, 0.9]], "target": 2 }
//! ```
//!
//! `p[i][j]` is the probability that player `i + 1` of the first team beats
//! player `j + 1` of the opponent. `target` defaults to `n / 2 + 1`. Internally
//! everything is 0-based.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strict majority of `n` matches.
pub fn default_target(n: usize) -> usize {
    n / 2 + 1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance", into = "RawInstance")]
pub struct Instance {
    n: usize,
    p: Vec<Vec<f64>>,
    target: usize,
}

/// Unvalidated wire form of an [`Instance`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawInstance {
    pub n: usize,
    pub p: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<usize>,
}

impl TryFrom<RawInstance> for Instance {
    type Error = Error;

    fn try_from(raw: RawInstance) -> Result<Self> {
        validate(raw)
    }
}

impl From<Instance> for RawInstance {
    fn from(inst: Instance) -> Self {
        RawInstance {
            n: inst.n,
            p: inst.p,
            target: Some(inst.target),
        }
    }
}

/// Checks shape, probability range and target; never clamps.
pub fn validate(raw: RawInstance) -> Result<Instance> {
    let RawInstance { n, p, target } = raw;
    if n == 0 {
        return Err(Error::invalid("team size must be at least 1"));
    }
    if p.len() != n {
        return Err(Error::invalid(format!(
            "matrix has {} rows, expected {n}",
            p.len()
        )));
    }
    for (i, row) in p.iter().enumerate() {
        if row.len() != n {
            return Err(Error::invalid(format!(
                "row {} has {} entries, expected {n}",
                i + 1,
                row.len()
            )));
        }
        for (j, &v) in row.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(format!(
                    "p[{}][{}] = {v} is outside [0, 1]",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    let target = target.unwrap_or_else(|| default_target(n));
    if target < 1 || target > n {
        return Err(Error::invalid(format!(
            "target {target} is outside [1, {n}]"
        )));
    }
    Ok(Instance { n, p, target })
}

impl Instance {
    pub fn new(p: Vec<Vec<f64>>, target: Option<usize>) -> Result<Self> {
        validate(RawInstance {
            n: p.len(),
            p,
            target,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.p
    }

    /// Probability that player `i` beats opponent `j` (0-based).
    #[inline]
    pub fn prob(&self, i: usize, j: usize) -> f64 {
        self.p[i][j]
    }

    pub fn with_target(&self, target: usize) -> Result<Self> {
        if target < 1 || target > self.n {
            return Err(Error::invalid(format!(
                "target {target} is outside [1, {}]",
                self.n
            )));
        }
        Ok(Instance {
            target,
            ..self.clone()
        })
    }

    pub fn has_default_target(&self) -> bool {
        self.target == default_target(self.n)
    }

    /// Per-match win probabilities of `lineup`, in first-team order.
    pub fn lineup_probs(&self, lineup: &LineUp) -> Result<Vec<f64>> {
        if lineup.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: lineup.len(),
            });
        }
        Ok(lineup
            .iter()
            .enumerate()
            .map(|(i, j)| self.p[i][j])
            .collect())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::invalid(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serializes")
    }
}

/// A permutation: first-team player `i` plays opponent `assignment[i]`.
///
/// Stored 0-based; serialized as a 1-based integer array.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct LineUp(Vec<usize>);

impl LineUp {
    /// Builds from a 0-based assignment, rejecting non-permutations.
    pub fn new(assignment: Vec<usize>) -> Result<Self> {
        let n = assignment.len();
        let mut seen = vec![false; n];
        for &j in &assignment {
            if j >= n || seen[j] {
                return Err(Error::invalid(format!(
                    "assignment {:?} is not a permutation of 1..{n}",
                    assignment.iter().map(|j| j + 1).collect::<Vec<_>>()
                )));
            }
            seen[j] = true;
        }
        Ok(LineUp(assignment))
    }

    pub fn from_one_based(assignment: &[usize]) -> Result<Self> {
        if assignment.contains(&0) {
            return Err(Error::invalid("line-up indices are 1-based"));
        }
        Self::new(assignment.iter().map(|j| j - 1).collect())
    }

    pub fn identity(n: usize) -> Self {
        LineUp((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Opponent index (0-based) of player `i`.
    #[inline]
    pub fn get(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|j| j + 1).collect()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.iter().copied().enumerate()
    }
}

impl TryFrom<Vec<usize>> for LineUp {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        LineUp::from_one_based(&v)
    }
}

impl From<LineUp> for Vec<usize> {
    fn from(l: LineUp) -> Self {
        l.to_one_based()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ClassTag {
    General,
    /// Every probability is 0 or 1.
    Degenerate,
    /// Positive values are `alpha` and optionally a smaller `beta`.
    ThreeValue { alpha: f64, beta: Option<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceClass {
    pub tag: ClassTag,
    /// Edges `(i, j)` with `p` strictly between 0 and 1.
    pub fractional: Vec<(usize, usize)>,
    /// Edges with `p` in {0, 1}.
    pub binary: Vec<(usize, usize)>,
    /// Smallest distance of a fractional probability from {0, 1}; `None` when
    /// there are no fractional edges.
    pub delta: Option<f64>,
}

impl InstanceClass {
    pub fn is_three_value(&self) -> bool {
        matches!(
            self.tag,
            ClassTag::ThreeValue { .. } | ClassTag::Degenerate
        )
    }
}

pub fn is_fractional(p: f64) -> bool {
    p != 0.0 && p != 1.0
}

pub fn classify(inst: &Instance) -> InstanceClass {
    let n = inst.n();
    let mut fractional = Vec::new();
    let mut binary = Vec::new();
    let mut delta: Option<f64> = None;
    let mut positive: Vec<f64> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let v = inst.prob(i, j);
            if is_fractional(v) {
                fractional.push((i, j));
                let d = v.min(1.0 - v);
                delta = Some(delta.map_or(d, |cur| cur.min(d)));
            } else {
                binary.push((i, j));
            }
            if v > 0.0 && !positive.contains(&v) {
                positive.push(v);
            }
        }
    }
    positive.sort_by(|a, b| b.total_cmp(a));
    let tag = if fractional.is_empty() {
        ClassTag::Degenerate
    } else if positive.len() <= 2 {
        ClassTag::ThreeValue {
            alpha: positive[0],
            beta: positive.get(1).copied(),
        }
    } else {
        ClassTag::General
    };
    InstanceClass {
        tag,
        fractional,
        binary,
        delta,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorKind {
    UniformRandom,
    ThreeValue { alpha: f64, beta: f64, density: f64 },
    Degenerate { density: f64 },
    FixedFractionalCount { count: usize },
}

/// Deterministic instance generator; the default target is used.
pub fn generate(kind: GeneratorKind, n: usize, seed: u64) -> Result<Instance> {
    if n == 0 {
        return Err(Error::invalid("team size must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = vec![vec![0.0; n]; n];
    match kind {
        GeneratorKind::UniformRandom => {
            for row in p.iter_mut() {
                for v in row.iter_mut() {
                    *v = rng.gen::<f64>();
                }
            }
        }
        GeneratorKind::ThreeValue {
            alpha,
            beta,
            density,
        } => {
            if !(alpha > beta && beta > 0.0 && alpha <= 1.0) {
                return Err(Error::invalid(format!(
                    "three-value generator needs 1 >= alpha > beta > 0, got ({alpha}, {beta})"
                )));
            }
            if !(density > 0.0 && density <= 1.0) {
                return Err(Error::invalid(format!("density {density} not in (0, 1]")));
            }
            if n < 2 {
                return Err(Error::invalid("three-value generator needs n >= 2"));
            }
            for row in p.iter_mut() {
                for v in row.iter_mut() {
                    if rng.gen_bool(density) {
                        *v = if rng.gen_bool(0.5) { alpha } else { beta };
                    }
                }
            }
            // Both values must occur so the instance classifies as requested.
            let cells = sample(&mut rng, n * n, 2);
            let has = |p: &[Vec<f64>], x: f64| p.iter().flatten().any(|&v| v == x);
            if !has(&p, alpha) {
                let c = cells.index(0);
                p[c / n][c % n] = alpha;
            }
            if !has(&p, beta) {
                let c = cells.index(1);
                p[c / n][c % n] = beta;
            }
        }
        GeneratorKind::Degenerate { density } => {
            if !(0.0..=1.0).contains(&density) {
                return Err(Error::invalid(format!("density {density} not in [0, 1]")));
            }
            for row in p.iter_mut() {
                for v in row.iter_mut() {
                    *v = if rng.gen_bool(density) { 1.0 } else { 0.0 };
                }
            }
        }
        GeneratorKind::FixedFractionalCount { count } => {
            if count > n * n {
                return Err(Error::invalid(format!(
                    "cannot place {count} fractional entries in a {n}x{n} matrix"
                )));
            }
            for row in p.iter_mut() {
                for v in row.iter_mut() {
                    *v = if rng.gen_bool(0.5) { 1.0 } else { 0.0 };
                }
            }
            for c in sample(&mut rng, n * n, count).iter() {
                p[c / n][c % n] = rng.gen_range(0.1..0.9);
            }
        }
    }
    Instance::new(p, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn table1() -> Instance {
        Instance::new(
            vec![
                vec![0.9, 1.0, 1.0],
                vec![0.5, 0.9, 1.0],
                vec![0.0, 0.5, 0.9],
            ],
            Some(2),
        )
        .unwrap()
    }

    #[test]
    fn validates_table1_and_minimal() {
        assert_eq!(table1().n(), 3);
        let one = Instance::new(vec![vec![0.5]], Some(1)).unwrap();
        assert_eq!(one.target(), 1);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Instance::new(vec![vec![0.5, 1.2], vec![0.0, 0.1]], None).is_err());
        assert!(Instance::new(vec![vec![0.5, 0.2], vec![0.0]], None).is_err());
        assert!(Instance::new(vec![vec![0.5]], Some(2)).is_err());
        assert!(Instance::new(vec![vec![0.5]], Some(0)).is_err());
        assert!(Instance::new(vec![vec![f64::NAN]], None).is_err());
        assert!(Instance::new(vec![], None).is_err());
        let raw = r#"{"n": 3, "p": [[0.5, 0.5], [0.5, 0.5]]}"#;
        assert!(Instance::from_json(raw).is_err());
    }

    #[test]
    fn default_target_from_json() {
        let inst = Instance::from_json(r#"{"n": 4, "p": [[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}"#)
            .unwrap();
        assert_eq!(inst.target(), 3);
        let inst = Instance::from_json(r#"{"n": 1, "p": [[1]]}"#).unwrap();
        assert_eq!(inst.target(), 1);
    }

    #[test]
    fn lineup_rejects_non_permutations() {
        assert!(LineUp::from_one_based(&[1, 1, 2]).is_err());
        assert!(LineUp::from_one_based(&[0, 1, 2]).is_err());
        assert!(LineUp::from_one_based(&[1, 2, 4]).is_err());
        let l = LineUp::from_one_based(&[2, 3, 1]).unwrap();
        assert_eq!(l.as_slice(), &[1, 2, 0]);
        let json = serde_json::to_string(&l).unwrap();
        assert_eq!(json, "[2,3,1]");
        let back: LineUp = serde_json::from_str(&json).unwrap();
        assert_eq!(back, l);
        assert!(serde_json::from_str::<LineUp>("[1,1]").is_err());
    }

    #[test]
    fn classify_table1() {
        let c = classify(&table1());
        assert_eq!(c.tag, ClassTag::General);
        assert_eq!(c.fractional.len(), 5);
        assert_eq!(c.binary.len(), 4);
        assert!((c.delta.unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn classify_degenerate_and_three_value() {
        let d = Instance::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]], None).unwrap();
        let c = classify(&d);
        assert_eq!(c.tag, ClassTag::Degenerate);
        assert!(c.fractional.is_empty());
        assert_eq!(c.delta, None);

        let t = Instance::new(
            vec![vec![0.7, 0.2, 0.0], vec![0.0, 0.7, 0.2], vec![0.2, 0.0, 0.0]],
            None,
        )
        .unwrap();
        assert_eq!(
            classify(&t).tag,
            ClassTag::ThreeValue {
                alpha: 0.7,
                beta: Some(0.2)
            }
        );

        let single = Instance::new(vec![vec![0.6, 0.0], vec![0.0, 0.6]], None).unwrap();
        assert_eq!(
            classify(&single).tag,
            ClassTag::ThreeValue {
                alpha: 0.6,
                beta: None
            }
        );
    }

    #[test]
    fn generators_are_deterministic_and_respect_class() {
        let a = generate(GeneratorKind::Degenerate { density: 0.5 }, 4, 7).unwrap();
        let b = generate(GeneratorKind::Degenerate { density: 0.5 }, 4, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(classify(&a).tag, ClassTag::Degenerate);

        let t = generate(
            GeneratorKind::ThreeValue {
                alpha: 0.8,
                beta: 0.3,
                density: 0.5,
            },
            5,
            1,
        )
        .unwrap();
        assert_eq!(
            classify(&t).tag,
            ClassTag::ThreeValue {
                alpha: 0.8,
                beta: Some(0.3)
            }
        );

        let f = generate(GeneratorKind::FixedFractionalCount { count: 3 }, 6, 2).unwrap();
        assert_eq!(classify(&f).fractional.len(), 3);

        assert!(generate(GeneratorKind::UniformRandom, 0, 1).is_err());
        assert!(generate(GeneratorKind::FixedFractionalCount { count: 10 }, 3, 1).is_err());
    }
}

#[cfg(test)]
pub(crate) use tests::table1;

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn json_round_trip_is_bit_exact(n in 1usize..7, seed in any::<u64>()) {
            let inst = generate(GeneratorKind::UniformRandom, n, seed).unwrap();
            let back = Instance::from_json(&inst.to_json()).unwrap();
            prop_assert_eq!(back.n(), inst.n());
            prop_assert_eq!(back.target(), inst.target());
            for (r1, r2) in back.matrix().iter().zip(inst.matrix()) {
                for (a, b) in r1.iter().zip(r2) {
                    prop_assert_eq!(a.to_bits(), b.to_bits());
                }
            }
        }

        #[test]
        fn fractional_and_binary_partition_edges(n in 1usize..7, count in 0usize..20, seed in any::<u64>()) {
            let count = count.min(n * n);
            let inst = generate(GeneratorKind::FixedFractionalCount { count }, n, seed).unwrap();
            let c = classify(&inst);
            prop_assert_eq!(c.fractional.len() + c.binary.len(), n * n);
            let mut all: Vec<_> = c.fractional.iter().chain(&c.binary).copied().collect();
            all.sort();
            all.dedup();
            prop_assert_eq!(all.len(), n * n);
        }

        #[test]
        fn accepted_lineups_are_permutations(v in proptest::collection::vec(1usize..6, 1..6)) {
            if let Ok(l) = LineUp::from_one_based(&v) {
                let mut s = l.to_one_based();
                s.sort();
                prop_assert_eq!(s, (1..=v.len()).collect::<Vec<_>>());
            }
        }
    }
}
