//! Team line-up solvers.
//!
//! Every solver returns a [`SolveResult`] whose report is recomputed from the
//! returned line-up, so the reported probability is always exact for that
//! line-up regardless of how the solver ranked its candidates.

mod baselines;
mod brute;
pub mod ptas;
mod three_value;

pub use baselines::{check_nonzero_win, solve_max_weight_baseline, solve_win_all, NonzeroWin};
pub use brute::{solve_brute, DEFAULT_BRUTE_CAP};
pub use ptas::{solve_ptas, PtasConfig, PtasDiagnostics};
pub use three_value::{solve_three_value, SizeCandidate};

use serde::Serialize;

use crate::error::Result;
use crate::instance::{Instance, LineUp};
use crate::pb::{evaluate_lineup, WinReport};

/// Absolute tolerance below which two win probabilities count as tied.
pub const PROBABILITY_TIE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Brute,
    ThreeValue,
    Ptas,
    MaxWeight,
    WinAll,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Diagnostics {
    Brute { lineups_evaluated: u64 },
    ThreeValue { candidates: Vec<SizeCandidate>, chosen_size: Option<usize> },
    Ptas(Box<PtasDiagnostics>),
    MaxWeight { weight: f64 },
    WinAll { log_weight: f64, product: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub lineup: LineUp,
    pub report: WinReport,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

impl SolveResult {
    pub(crate) fn new(
        inst: &Instance,
        lineup: LineUp,
        method: Method,
        diagnostics: Diagnostics,
    ) -> Result<Self> {
        let report = evaluate_lineup(inst, &lineup)?;
        Ok(SolveResult {
            lineup,
            report,
            method,
            diagnostics,
        })
    }

    pub fn win_probability(&self) -> f64 {
        self.report.win_probability
    }
}

/// `true` when candidate `(p, l)` should replace the incumbent: a strictly
/// higher probability, or a tie broken toward the smaller assignment.
pub(crate) fn improves(p: f64, l: &LineUp, best: Option<(f64, &LineUp)>) -> bool {
    match best {
        None => true,
        Some((bp, bl)) => {
            p > bp + PROBABILITY_TIE || ((p - bp).abs() <= PROBABILITY_TIE && l < bl)
        }
    }
}

/// Extends a partial matching to a full line-up, pairing leftover rows with
/// leftover columns in increasing order.
pub(crate) fn complete_lineup(n: usize, pairs: &[(usize, usize)]) -> LineUp {
    let mut assignment = vec![usize::MAX; n];
    let mut col_used = vec![false; n];
    for &(i, j) in pairs {
        assignment[i] = j;
        col_used[j] = true;
    }
    let mut free_cols = (0..n).filter(|&j| !col_used[j]);
    for a in assignment.iter_mut().filter(|a| **a == usize::MAX) {
        *a = free_cols.next().expect("as many free columns as free rows");
    }
    LineUp::new(assignment).expect("completion is a permutation")
}

#[cfg(test)]
pub(crate) mod fixtures {
    use crate::instance::Instance;

    pub fn table2() -> Instance {
        let mut p = vec![vec![0.0; 7]; 7];
        let rows: [&[f64]; 4] = [
            &[0.0, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0],
            &[0.0, 0.0, 0.0, 0.0, 0.5, 1.0, 1.0],
            &[0.0, 0.0, 0.0, 0.0, 0.0, 0.5, 1.0],
            &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5],
        ];
        for (i, r) in rows.iter().enumerate() {
            p[i] = r.to_vec();
        }
        Instance::new(p, Some(4)).unwrap()
    }

    pub fn table3() -> Instance {
        Instance::new(
            vec![vec![0.9, 0.5, 1.0], vec![0.5, 0.1, 1.0], vec![0.0, 0.0, 1.0]],
            None,
        )
        .unwrap()
    }
}
