use serde::{Deserialize, Serialize};

use super::multi::MultiInstance;
use crate::error::{Error, Result};

/// Universe `{1..lambda}`, a collection of subsets and a size budget `x`.
/// Elements are 1-based in JSON and in memory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawHittingSet", into = "RawHittingSet")]
pub struct HittingSetInstance {
    lambda: usize,
    sets: Vec<Vec<usize>>,
    x: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawHittingSet {
    pub lambda: usize,
    pub sets: Vec<Vec<usize>>,
    pub x: usize,
}

impl TryFrom<RawHittingSet> for HittingSetInstance {
    type Error = Error;

    fn try_from(raw: RawHittingSet) -> Result<Self> {
        HittingSetInstance::new(raw.lambda, raw.sets, raw.x)
    }
}

impl From<HittingSetInstance> for RawHittingSet {
    fn from(hs: HittingSetInstance) -> Self {
        RawHittingSet {
            lambda: hs.lambda,
            sets: hs.sets,
            x: hs.x,
        }
    }
}

impl HittingSetInstance {
    pub fn new(lambda: usize, sets: Vec<Vec<usize>>, x: usize) -> Result<Self> {
        if lambda == 0 {
            return Err(Error::invalid("universe must be nonempty"));
        }
        if sets.is_empty() {
            return Err(Error::invalid("collection of subsets must be nonempty"));
        }
        if x > lambda {
            return Err(Error::invalid(format!("budget x = {x} exceeds universe size {lambda}")));
        }
        let mut sets = sets;
        for s in &mut sets {
            if let Some(&e) = s.iter().find(|&&e| e == 0 || e > lambda) {
                return Err(Error::invalid(format!("element {e} outside 1..={lambda}")));
            }
            s.sort_unstable();
            s.dedup();
        }
        Ok(HittingSetInstance { lambda, sets, x })
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn x(&self) -> usize {
        self.x
    }

    /// Even `lambda` and `x`, and `lambda >= 2x` so the reduction has room for
    /// its always-winning and always-losing rows.
    pub fn is_normalized(&self) -> bool {
        self.lambda.is_multiple_of(2) && self.x.is_multiple_of(2) && self.lambda >= 2 * self.x
    }

    /// `true` when some set of at most `x` elements meets every subset.
    pub fn is_hit_by(&self, chosen: &[usize]) -> bool {
        chosen.len() <= self.x && self.sets.iter().all(|s| s.iter().any(|e| chosen.contains(e)))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::invalid(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

/// Equivalent normalized instance. An odd budget gets a fresh element and the
/// singleton subset containing it, with the budget raised by one. Elements
/// that appear in no subset are then appended until `lambda` is even and at
/// least `2x`.
pub fn normalize(hs: &HittingSetInstance) -> HittingSetInstance {
    let mut lambda = hs.lambda;
    let mut sets = hs.sets.clone();
    let mut x = hs.x;
    if x % 2 == 1 {
        lambda += 1;
        sets.push(vec![lambda]);
        x += 1;
    }
    lambda = lambda.max(2 * x);
    lambda += lambda % 2;
    HittingSetInstance { lambda, sets, x }
}

/// Smallest hitting set by enumerating subsets in order of size, or `None`
/// when it needs more than `x` elements.
pub fn solve_hitting_set_brute(hs: &HittingSetInstance) -> Option<Vec<usize>> {
    let masks: Vec<u64> = hs
        .sets
        .iter()
        .map(|s| s.iter().fold(0u64, |m, &e| m | 1 << (e - 1)))
        .collect();
    assert!(hs.lambda <= 63, "enumeration oracle limited to 63 elements");
    let mut best: Option<u64> = None;
    for chosen in 0u64..(1u64 << hs.lambda) {
        let size = chosen.count_ones() as usize;
        if size > hs.x || best.is_some_and(|b| b.count_ones() as usize <= size) {
            continue;
        }
        if masks.iter().all(|m| m & chosen != 0) {
            best = Some(chosen);
        }
    }
    best.map(|b| (1..=hs.lambda).filter(|e| b >> (e - 1) & 1 == 1).collect())
}

/// Row groups of the reduced instance (0-based, contiguous).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Reduction {
    pub instance: MultiInstance,
    /// Rows that win exactly against members of each subset.
    pub selector_rows: usize,
    /// Rows that always win.
    pub winning_rows: usize,
    /// Rows that always lose.
    pub losing_rows: usize,
}

/// Builds a multi-opponent instance that beats every opponent exactly when
/// the hitting set instance is a yes-instance.
///
/// Opponent `l` fields the universe as its players. The first `x` rows beat
/// player `j` iff `j` is in subset `l`, the next `lambda / 2` rows always win
/// and the rest always lose. A line-up therefore beats opponent `l` iff the
/// `x` elements facing the selector rows meet subset `l`.
pub fn reduce_hitting_set(hs: &HittingSetInstance) -> Result<Reduction> {
    if !hs.is_normalized() {
        return Err(Error::invalid(
            "hitting set instance must be normalized (even lambda and x, lambda >= 2x)",
        ));
    }
    let n = hs.lambda;
    let x = hs.x;
    let winning = n / 2;
    let losing = n - x - winning;
    let w: Vec<Vec<Vec<bool>>> = hs
        .sets
        .iter()
        .map(|s| {
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            if i < x {
                                s.binary_search(&(j + 1)).is_ok()
                            } else {
                                i < x + winning
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let k = w.len();
    let instance = MultiInstance::new(w, k)?;
    debug_assert_eq!(x + winning + losing, n);
    Ok(Reduction {
        instance,
        selector_rows: x,
        winning_rows: winning,
        losing_rows: losing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extensions::{solve_multi, DEFAULT_MULTI_CAP};
    use proptest::prelude::*;

    fn round_trip(hs: &HittingSetInstance) -> (bool, bool) {
        let normal = normalize(hs);
        let red = reduce_hitting_set(&normal).unwrap();
        let sol = solve_multi(&red.instance, DEFAULT_MULTI_CAP).unwrap();
        (solve_hitting_set_brute(hs).is_some(), sol.teams_beaten == red.instance.m())
    }

    #[test]
    fn yes_example() {
        let hs = HittingSetInstance::new(2, vec![vec![1], vec![2]], 2).unwrap();
        assert_eq!(round_trip(&hs), (true, true));
    }

    #[test]
    fn no_example() {
        let hs = HittingSetInstance::new(4, vec![vec![1], vec![2], vec![3]], 2).unwrap();
        assert_eq!(round_trip(&hs), (false, false));
    }

    #[test]
    fn structure_of_reduction() {
        let hs = HittingSetInstance::new(8, vec![vec![1, 2], vec![3]], 2).unwrap();
        let red = reduce_hitting_set(&hs).unwrap();
        assert_eq!(red.winning_rows, 4);
        assert_eq!(red.losing_rows, 8 - 2 - 4);
        assert_eq!(red.instance.threshold(), red.winning_rows + 1);
        assert!(red.instance.beats(0, 0, 1));
        assert!(!red.instance.beats(0, 0, 2));
        assert!(red.instance.beats(1, 2, 7));
        assert!(!red.instance.beats(1, 7, 0));
    }

    #[test]
    fn unnormalized_input_is_rejected() {
        let hs = HittingSetInstance::new(3, vec![vec![1]], 1).unwrap();
        assert!(reduce_hitting_set(&hs).is_err());
        let normal = normalize(&hs);
        assert!(normal.is_normalized());
        assert_eq!((normal.lambda(), normal.x()), (4, 2));
    }

    #[test]
    fn validation() {
        assert!(HittingSetInstance::new(2, vec![vec![3]], 1).is_err());
        assert!(HittingSetInstance::new(2, vec![vec![1]], 3).is_err());
        assert!(HittingSetInstance::new(2, vec![], 1).is_err());
        let hs = HittingSetInstance::from_json(r#"{"lambda":3,"sets":[[2,1],[3]],"x":2}"#).unwrap();
        assert_eq!(hs.sets(), &[vec![1, 2], vec![3]]);
        assert_eq!(HittingSetInstance::from_json(&hs.to_json()).unwrap(), hs);
    }

    proptest! {
        #[test]
        fn normalization_preserves_the_answer(
            lambda in 1usize..7,
            x in 0usize..4,
            raw in proptest::collection::vec(proptest::collection::vec(1usize..7, 0..3), 1..4),
        ) {
            let x = x.min(lambda);
            let sets = raw.into_iter().map(|s| s.into_iter().filter(|&e| e <= lambda).collect()).collect();
            let hs = HittingSetInstance::new(lambda, sets, x).unwrap();
            let normal = normalize(&hs);
            prop_assert!(normal.is_normalized());
            prop_assert_eq!(
                solve_hitting_set_brute(&hs).is_some(),
                solve_hitting_set_brute(&normal).is_some()
            );
        }

        #[test]
        fn reduction_round_trip(
            lambda in 1usize..5,
            x in 0usize..3,
            raw in proptest::collection::vec(proptest::collection::vec(1usize..5, 0..3), 1..4),
        ) {
            let x = x.min(lambda);
            let sets = raw.into_iter().map(|s| s.into_iter().filter(|&e| e <= lambda).collect()).collect();
            let hs = HittingSetInstance::new(lambda, sets, x).unwrap();
            let (direct, reduced) = round_trip(&hs);
            prop_assert_eq!(direct, reduced);
        }
    }
}
