use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::LineUp;

pub const DEFAULT_MULTI_CAP: usize = 9;

/// One team against `m` opponents with 0/1 outcomes. `w[l][i][j] = 1` when
/// player `i` beats player `j` of opponent `l`. An opponent is beaten by
/// winning at least `floor(n/2) + 1` matches.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawMulti", into = "RawMulti")]
pub struct MultiInstance {
    n: usize,
    k: usize,
    w: Vec<Vec<Vec<bool>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawMulti {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub w: Vec<Vec<Vec<u8>>>,
}

impl TryFrom<RawMulti> for MultiInstance {
    type Error = Error;

    fn try_from(raw: RawMulti) -> Result<Self> {
        if raw.w.len() != raw.m {
            return Err(Error::DimensionMismatch {
                expected: raw.m,
                found: raw.w.len(),
            });
        }
        let w = raw
            .w
            .iter()
            .map(|mat| {
                if mat.len() != raw.n || mat.iter().any(|r| r.len() != raw.n) {
                    return Err(Error::DimensionMismatch {
                        expected: raw.n,
                        found: mat.len(),
                    });
                }
                mat.iter()
                    .map(|r| {
                        r.iter()
                            .map(|&v| match v {
                                0 => Ok(false),
                                1 => Ok(true),
                                other => Err(Error::invalid(format!("entry {other} is not 0 or 1"))),
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        MultiInstance::new(w, raw.k)
    }
}

impl From<MultiInstance> for RawMulti {
    fn from(inst: MultiInstance) -> Self {
        RawMulti {
            n: inst.n,
            m: inst.m(),
            k: inst.k,
            w: inst
                .w
                .iter()
                .map(|mat| mat.iter().map(|r| r.iter().map(|&b| b as u8).collect()).collect())
                .collect(),
        }
    }
}

impl MultiInstance {
    pub fn new(w: Vec<Vec<Vec<bool>>>, k: usize) -> Result<Self> {
        let m = w.len();
        if m == 0 {
            return Err(Error::invalid("at least one opponent is required"));
        }
        let n = w[0].len();
        if n == 0 {
            return Err(Error::invalid("team size must be positive"));
        }
        for mat in &w {
            if mat.len() != n || mat.iter().any(|r| r.len() != n) {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: mat.len(),
                });
            }
        }
        if !(1..=m).contains(&k) {
            return Err(Error::invalid(format!("k = {k} outside [1, {m}]")));
        }
        Ok(MultiInstance { n, k, w })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.w.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn beats(&self, team: usize, i: usize, j: usize) -> bool {
        self.w[team][i][j]
    }

    pub fn threshold(&self) -> usize {
        self.n / 2 + 1
    }

    pub fn teams_beaten(&self, lineup: &LineUp) -> usize {
        (0..self.m())
            .filter(|&l| lineup.edges().filter(|&(i, j)| self.w[l][i][j]).count() >= self.threshold())
            .count()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::invalid(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiSolution {
    pub lineup: LineUp,
    pub teams_beaten: usize,
    /// Whether at least `k` opponents are beaten.
    pub meets_k: bool,
    pub nodes: u64,
}

/// Line-up beating the most opponents, by depth-first search over rows with
/// columns in increasing order. A branch is cut when the opponents still able
/// to reach the threshold cannot beat the incumbent count.
pub fn solve_multi(inst: &MultiInstance, cap: usize) -> Result<MultiSolution> {
    let n = inst.n();
    if n > cap {
        return Err(Error::CapExceeded {
            what: "multi-opponent team size".into(),
            required: n as u64,
            cap: cap as u64,
        });
    }

    struct Search<'a> {
        inst: &'a MultiInstance,
        wins: Vec<usize>,
        assignment: Vec<usize>,
        used: Vec<bool>,
        best: Option<(usize, Vec<usize>)>,
        nodes: u64,
    }

    impl Search<'_> {
        fn run(&mut self, i: usize) {
            self.nodes += 1;
            let (n, m, t) = (self.inst.n(), self.inst.m(), self.inst.threshold());
            let remaining = n - i;
            let reachable = self.wins.iter().filter(|&&w| w + remaining >= t).count();
            if let Some((b, _)) = &self.best {
                if reachable <= *b {
                    return;
                }
            }
            if i == n {
                self.best = Some((reachable, self.assignment.clone()));
                return;
            }
            for j in 0..n {
                if self.used[j] {
                    continue;
                }
                self.used[j] = true;
                self.assignment[i] = j;
                for l in 0..m {
                    self.wins[l] += self.inst.w[l][i][j] as usize;
                }
                self.run(i + 1);
                for l in 0..m {
                    self.wins[l] -= self.inst.w[l][i][j] as usize;
                }
                self.used[j] = false;
                if matches!(&self.best, Some((b, _)) if *b == m) {
                    return;
                }
            }
        }
    }

    let mut search = Search {
        inst,
        wins: vec![0; inst.m()],
        assignment: vec![0; n],
        used: vec![false; n],
        best: None,
        nodes: 0,
    };
    search.run(0);
    let (teams_beaten, assignment) = search.best.expect("the first leaf always records");
    Ok(MultiSolution {
        lineup: LineUp::new(assignment)?,
        teams_beaten,
        meets_k: teams_beaten >= inst.k(),
        nodes: search.nodes,
    })
}
