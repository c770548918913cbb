use serde::Serialize;

use super::{complete_lineup, Diagnostics, Method, SolveResult};
use crate::error::{Error, Result};
use crate::instance::{Instance, LineUp};
use crate::matching::{max_cardinality, max_weight_perfect, WeightedBipartite};
use crate::pb::evaluate_lineup;

/// Maximum expected number of wins, i.e. the max-weight perfect matching.
pub fn solve_max_weight_baseline(inst: &Instance) -> Result<SolveResult> {
    let m = max_weight_perfect(&WeightedBipartite::complete(inst.matrix()))?;
    SolveResult::new(
        inst,
        m.lineup,
        Method::MaxWeight,
        Diagnostics::MaxWeight { weight: m.weight },
    )
}

/// Line-up maximizing the probability of winning every match: a max-weight
/// perfect matching under `log p` on the nonzero edges.
pub fn solve_win_all(inst: &Instance) -> Result<SolveResult> {
    let weights = inst
        .matrix()
        .iter()
        .map(|r| r.iter().map(|&p| (p > 0.0).then(|| p.ln())).collect())
        .collect();
    let g = WeightedBipartite::new(weights, Vec::new())?;
    let m = max_weight_perfect(&g).map_err(|e| match e {
        Error::Infeasible(_) => Error::Infeasible(
            "no line-up gives every player a nonzero chance of winning".into(),
        ),
        other => other,
    })?;
    SolveResult::new(
        inst,
        m.lineup,
        Method::WinAll,
        Diagnostics::WinAll {
            log_weight: m.weight,
            product: m.weight.exp(),
        },
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonzeroWin {
    pub possible: bool,
    /// A line-up with positive win probability, when one exists.
    pub witness: Option<LineUp>,
    pub win_probability: Option<f64>,
}

/// Decides whether some line-up wins with positive probability: exactly when
/// the nonzero edges admit a matching with at least `target` edges.
pub fn check_nonzero_win(inst: &Instance) -> Result<NonzeroWin> {
    let adj: Vec<Vec<bool>> = inst
        .matrix()
        .iter()
        .map(|r| r.iter().map(|&p| p > 0.0).collect())
        .collect();
    let matching = max_cardinality(&adj);
    let pairs: Vec<(usize, usize)> = matching
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.map(|j| (i, j)))
        .collect();
    if pairs.len() < inst.target() {
        return Ok(NonzeroWin {
            possible: false,
            witness: None,
            win_probability: None,
        });
    }
    let witness = complete_lineup(inst.n(), &pairs);
    let p = evaluate_lineup(inst, &witness)?.win_probability;
    debug_assert!(p > 0.0);
    Ok(NonzeroWin {
        possible: true,
        witness: Some(witness),
        win_probability: Some(p),
    })
}
