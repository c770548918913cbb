//! Exact solver for instances whose probabilities take at most two positive
//! values.
//!
//! With zero edges removed, a maximum-weight matching of size `s` has the
//! largest possible number of high-value edges among size-`s` matchings, so
//! its win count stochastically dominates that of any other size-`s`
//! matching. Trying every size from the target upward therefore hits an
//! optimal line-up.

use serde::Serialize;

use super::{complete_lineup, solve_max_weight_baseline, Diagnostics, Method, SolveResult};
use crate::error::{Error, Result};
use crate::instance::{classify, Instance};
use crate::matching::{max_weight_by_size, WeightedBipartite};
use crate::pb::{upper_tail, win_distribution, PbParams};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeCandidate {
    pub size: usize,
    pub weight: f64,
    /// Win probability with the unmatched players counted as certain losses.
    pub win_probability: f64,
}

pub fn solve_three_value(inst: &Instance) -> Result<SolveResult> {
    let class = classify(inst);
    if !class.is_three_value() {
        return Err(Error::Inapplicable(
            "instance has more than two distinct positive probabilities".into(),
        ));
    }
    let n = inst.n();
    let weights = inst
        .matrix()
        .iter()
        .map(|r| r.iter().map(|&p| (p > 0.0).then_some(p)).collect())
        .collect();
    let g = WeightedBipartite::new(weights, Vec::new())?;
    let by_size = max_weight_by_size(&g);

    let mut candidates = Vec::new();
    let mut best: Option<(f64, usize)> = None;
    for s in inst.target()..=n {
        let Some(m) = by_size.get(s) else { break };
        let probs = PbParams::new(m.pairs.iter().map(|&(i, j)| inst.prob(i, j)).collect())?;
        let p = upper_tail(&win_distribution(&probs), inst.target());
        candidates.push(SizeCandidate {
            size: s,
            weight: m.weight,
            win_probability: p,
        });
        if best.is_none_or(|(bp, _)| p > bp) {
            best = Some((p, s));
        }
    }

    match best {
        Some((_, s)) => {
            let lineup = complete_lineup(n, &by_size[s].pairs);
            SolveResult::new(
                inst,
                lineup,
                Method::ThreeValue,
                Diagnostics::ThreeValue {
                    candidates,
                    chosen_size: Some(s),
                },
            )
        }
        // No nonzero matching reaches the target: every line-up loses surely.
        None => {
            let fallback = solve_max_weight_baseline(inst)?;
            SolveResult::new(
                inst,
                fallback.lineup,
                Method::ThreeValue,
                Diagnostics::ThreeValue {
                    candidates,
                    chosen_size: None,
                },
            )
        }
    }
}
