use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::pb::{upper_tail, win_distribution, PbParams};

pub const DEFAULT_EQUILIBRIUM_CAP: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumReport {
    pub n: usize,
    /// Expected payoff of each pure second-team line-up against a uniform
    /// first team, in lexicographic line-up order.
    pub second_values: Vec<f64>,
    /// Expected payoff of each pure first-team line-up against a uniform
    /// second team.
    pub first_values: Vec<f64>,
    pub second_spread: f64,
    pub first_spread: f64,
    /// Average of the whole payoff table.
    pub game_value: f64,
    /// Largest payoff change either team gets by deviating from uniform.
    pub max_deviation_gain: f64,
}

/// Builds the `n! x n!` table of first-team win probabilities, where in match
/// `k` first-team player `s1[k]` faces second-team player `s2[k]`, and checks
/// that every pure line-up does equally well against a uniform opponent.
pub fn verify_uniform_equilibrium(inst: &Instance, cap: usize) -> Result<EquilibriumReport> {
    let n = inst.n();
    if n > cap {
        return Err(Error::CapExceeded {
            what: "equilibrium team size".into(),
            required: n as u64,
            cap: cap as u64,
        });
    }
    let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let table: Vec<Vec<f64>> = perms
        .iter()
        .map(|s1| {
            perms
                .iter()
                .map(|s2| {
                    let probs = s1.iter().zip(s2).map(|(&i, &j)| inst.prob(i, j)).collect();
                    let params = PbParams::new(probs).expect("entries validated");
                    upper_tail(&win_distribution(&params), inst.target())
                })
                .collect()
        })
        .collect();

    let count = perms.len() as f64;
    let second_values: Vec<f64> = (0..perms.len())
        .map(|b| table.iter().map(|row| row[b]).sum::<f64>() / count)
        .collect();
    let first_values: Vec<f64> = table.iter().map(|row| row.iter().sum::<f64>() / count).collect();
    let game_value = first_values.iter().sum::<f64>() / count;

    let spread = |v: &[f64]| {
        let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
        hi - lo
    };
    let first_gain = first_values.iter().fold(f64::NEG_INFINITY, |a, &v| a.max(v)) - game_value;
    let second_gain = game_value - second_values.iter().fold(f64::INFINITY, |a, &v| a.min(v));
    Ok(EquilibriumReport {
        n,
        second_spread: spread(&second_values),
        first_spread: spread(&first_values),
        second_values,
        first_values,
        game_value,
        max_deviation_gain: first_gain.max(second_gain).max(0.0),
    })
}
