//! Budgeted and reward perfect matching by Lagrangian relaxation.
//!
//! For a multiplier `lambda >= 0` the relaxed problem maximizes
//! `w(M) - lambda * c(M)` over perfect matchings, which is a plain assignment
//! problem. Bisection on `lambda` brackets the point where the relaxed optimum
//! turns feasible. The feasible optimum `M1` and the infeasible optimum `M2`
//! at the bracket differ by alternating cycles; swapping those cycles from
//! `M2` toward `M1` one at a time walks through perfect matchings that are all
//! (near-)optimal for the relaxation, and the walk ends feasible.
//!
//! Every probed `lambda` gives an upper bound
//! `max_M (w(M) - lambda c(M)) + lambda B` on the constrained optimum; the
//! smallest one is returned so the additive loss can be checked without
//! enumerating matchings.

use serde::Serialize;

use super::hungarian::assign_max;
use super::{assignment_total, WeightedBipartite};
use crate::error::{Error, Result};
use crate::instance::LineUp;

const FEASIBILITY_SLACK: f64 = 1e-12;
const LAMBDA_TOLERANCE: f64 = 1e-9;
const MAX_DOUBLINGS: usize = 64;
const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", content = "value", rename_all = "lowercase")]
pub enum BudgetMode {
    /// `c(M) <= B`
    Budget(f64),
    /// `c(M) >= R`
    Reward(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BudgetedProblem {
    pub graph: WeightedBipartite,
    /// Edge costs in `[0, 1)`.
    pub cost: Vec<Vec<f64>>,
    pub mode: BudgetMode,
}

impl BudgetedProblem {
    pub fn new(graph: WeightedBipartite, cost: Vec<Vec<f64>>, mode: BudgetMode) -> Result<Self> {
        let n = graph.n();
        if cost.len() != n || cost.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: cost.len(),
            });
        }
        if cost.iter().flatten().any(|c| !(0.0..1.0).contains(c)) {
            return Err(Error::invalid("edge costs must lie in [0, 1)"));
        }
        let bound = match mode {
            BudgetMode::Budget(b) | BudgetMode::Reward(b) => b,
        };
        if !(bound >= 0.0) {
            return Err(Error::invalid("budget / reward must be nonnegative"));
        }
        Ok(BudgetedProblem { graph, cost, mode })
    }

    /// Cost matrix and budget of the equivalent budget-mode problem.
    fn as_budget(&self) -> (Vec<Vec<f64>>, f64) {
        match self.mode {
            BudgetMode::Budget(b) => (self.cost.clone(), b),
            BudgetMode::Reward(r) => {
                let flipped = self
                    .cost
                    .iter()
                    .map(|row| row.iter().map(|c| 1.0 - c).collect())
                    .collect();
                (flipped, self.graph.n() as f64 - r)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetedSolution {
    pub lineup: LineUp,
    pub weight: f64,
    /// Total of the original costs (before any reward-mode complement).
    pub cost: f64,
    /// Certified upper bound on the best feasible weight.
    pub lagrangian_upper_bound: f64,
    /// Multiplier at the feasible end of the final bracket.
    pub lambda: f64,
    /// Number of alternating cycles between the bracketing matchings.
    pub cycles: usize,
}

impl BudgetedSolution {
    pub fn guarantee_holds(&self) -> bool {
        self.weight >= self.lagrangian_upper_bound - 2.0 - 1e-9
    }
}

struct Relaxed {
    assignment: Vec<usize>,
    weight: f64,
    cost: f64,
}

pub fn solve_budgeted(prob: &BudgetedProblem) -> Result<BudgetedSolution> {
    let g = &prob.graph;
    let (cost_full, budget_full) = prob.as_budget();
    let contraction = g.contract();
    let w = contraction.reduce(g.weights());
    let c = contraction.reduce(&cost_full);
    let forced_cost: f64 = g.forced().iter().map(|&(i, j)| cost_full[i][j]).sum();
    let budget = budget_full - forced_cost;
    let offset = contraction.offset;

    let relax = |lambda: f64| -> Relaxed {
        let lw: Vec<Vec<Option<f64>>> = w
            .iter()
            .zip(&c)
            .map(|(wr, cr)| {
                wr.iter()
                    .zip(cr)
                    .map(|(x, cost)| x.map(|v| v - lambda * cost))
                    .collect()
            })
            .collect();
        let assignment = assign_max(&lw).expect("feasibility checked up front");
        let weight = assignment
            .iter()
            .enumerate()
            .map(|(i, &j)| w[i][j].expect("allowed"))
            .sum();
        let cost = assignment_total(&c, &assignment);
        Relaxed {
            assignment,
            weight,
            cost,
        }
    };

    // Any perfect matching at all, and the cheapest one.
    let neg_cost: Vec<Vec<Option<f64>>> = w
        .iter()
        .zip(&c)
        .map(|(wr, cr)| wr.iter().zip(cr).map(|(x, cost)| x.map(|_| -cost)).collect())
        .collect();
    let cheapest = assign_max(&neg_cost)
        .ok_or_else(|| Error::Infeasible("no perfect matching respects the constraints".into()))?;
    if assignment_total(&c, &cheapest) > budget + FEASIBILITY_SLACK {
        return Err(Error::Infeasible(format!(
            "cheapest perfect matching exceeds the budget ({:.6} > {:.6})",
            assignment_total(&c, &cheapest) + forced_cost,
            budget_full
        )));
    }

    let feasible = |r: &Relaxed| r.cost <= budget + FEASIBILITY_SLACK;
    let mut upper = f64::INFINITY;
    let mut probe = |lambda: f64| -> Relaxed {
        let r = relax(lambda);
        upper = upper.min(r.weight - lambda * r.cost + lambda * budget);
        r
    };

    let m0 = probe(0.0);
    if feasible(&m0) {
        // The unconstrained optimum is feasible, hence optimal.
        let upper_bound = upper + offset;
        return finish(prob, &contraction, m0, upper_bound, 0.0, 0);
    }

    let n = w.len().max(1);
    let mut hi = 4.0 * n as f64;
    let mut m_hi = probe(hi);
    let mut doublings = 0;
    while !feasible(&m_hi) && doublings < MAX_DOUBLINGS {
        hi *= 2.0;
        m_hi = probe(hi);
        doublings += 1;
    }
    if !feasible(&m_hi) {
        // Costs are too close for the multiplier range; fall back to the
        // cheapest matching as the feasible end.
        m_hi = Relaxed {
            weight: cheapest.iter().enumerate().map(|(i, &j)| w[i][j].unwrap()).sum(),
            cost: assignment_total(&c, &cheapest),
            assignment: cheapest,
        };
    }

    let mut lo = 0.0;
    let mut m_lo = m0;
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= LAMBDA_TOLERANCE {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let m = probe(mid);
        if feasible(&m) {
            hi = mid;
            m_hi = m;
        } else {
            lo = mid;
            m_lo = m;
        }
    }

    // Walk from the infeasible end toward the feasible end one cycle at a time.
    // The first feasible intermediate is kept if it beats `M1` itself.
    let cycles = alternating_cycles(&m_lo.assignment, &m_hi.assignment);
    let mut current = m_lo.assignment.clone();
    let target = m_hi.assignment.clone();
    let mut best = m_hi;
    for cycle in &cycles {
        for &row in cycle {
            current[row] = target[row];
        }
        let cost = assignment_total(&c, &current);
        if cost <= budget + FEASIBILITY_SLACK {
            let weight = current
                .iter()
                .enumerate()
                .map(|(i, &j)| w[i][j].expect("allowed"))
                .sum::<f64>();
            if weight > best.weight + 1e-12 {
                best = Relaxed {
                    assignment: current.clone(),
                    weight,
                    cost,
                };
            }
            break;
        }
    }
    finish(prob, &contraction, best, upper + offset, hi, cycles.len())
}

fn finish(
    prob: &BudgetedProblem,
    contraction: &super::Contraction,
    r: Relaxed,
    upper_bound: f64,
    lambda: f64,
    cycles: usize,
) -> Result<BudgetedSolution> {
    let lineup = LineUp::new(contraction.expand(&r.assignment))?;
    let weight = lineup
        .edges()
        .map(|(i, j)| prob.graph.weight(i, j).expect("allowed edge"))
        .sum();
    let cost = lineup.edges().map(|(i, j)| prob.cost[i][j]).sum();
    Ok(BudgetedSolution {
        lineup,
        weight,
        cost,
        lagrangian_upper_bound: upper_bound,
        lambda,
        cycles,
    })
}

/// Rows of each alternating cycle of the symmetric difference of two perfect
/// assignments, ordered by smallest row.
fn alternating_cycles(a: &[usize], b: &[usize]) -> Vec<Vec<usize>> {
    let n = a.len();
    let mut row_of_col_a = vec![0usize; n];
    for (i, &j) in a.iter().enumerate() {
        row_of_col_a[j] = i;
    }
    let mut seen = vec![false; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if seen[start] || a[start] == b[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut row = start;
        while !seen[row] {
            seen[row] = true;
            cycle.push(row);
            // b moves `row` to column b[row], previously held by another row under a.
            row = row_of_col_a[b[row]];
        }
        cycles.push(cycle);
    }
    cycles
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::max_weight_perfect;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn variance_costs(p: &[Vec<f64>]) -> Vec<Vec<f64>> {
        p.iter()
            .map(|r| r.iter().map(|x| x * (1.0 - x)).collect())
            .collect()
    }

    fn random_probs(n: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| (0..n).map(|_| rng.gen::<f64>()).collect()).collect()
    }

    /// All permutations with their (weight, cost).
    fn enumerate(w: &[Vec<f64>], c: &[Vec<f64>]) -> Vec<(f64, f64)> {
        let n = w.len();
        let mut out = Vec::new();
        let mut perm: Vec<usize> = (0..n).collect();
        fn rec(k: usize, perm: &mut Vec<usize>, w: &[Vec<f64>], c: &[Vec<f64>], out: &mut Vec<(f64, f64)>) {
            if k == perm.len() {
                out.push((assignment_total(w, perm), assignment_total(c, perm)));
                return;
            }
            for i in k..perm.len() {
                perm.swap(k, i);
                rec(k + 1, perm, w, c, out);
                perm.swap(k, i);
            }
        }
        rec(0, &mut perm, w, c, &mut out);
        out
    }

    #[test]
    fn cycles_cover_the_difference() {
        let a = [0, 1, 2, 3, 4];
        let b = [1, 0, 2, 4, 3];
        let cyc = alternating_cycles(&a, &b);
        assert_eq!(cyc, vec![vec![0, 1], vec![3, 4]]);
    }

    #[test]
    fn vacuous_budget_is_max_weight() {
        let p = random_probs(5, 3);
        let g = WeightedBipartite::complete(&p);
        let prob = BudgetedProblem::new(g.clone(), variance_costs(&p), BudgetMode::Budget(5.0 / 4.0)).unwrap();
        let s = solve_budgeted(&prob).unwrap();
        let m = max_weight_perfect(&g).unwrap();
        assert_eq!(s.lineup, m.lineup);
        assert!((s.weight - m.weight).abs() < 1e-12);

        let reward = BudgetedProblem::new(g, variance_costs(&p), BudgetMode::Reward(0.0)).unwrap();
        let s = solve_budgeted(&reward).unwrap();
        assert_eq!(s.lineup, m.lineup);
    }

    #[test]
    fn impossible_budget_and_reward() {
        let p = vec![vec![0.5, 0.5], vec![0.5, 0.5]];
        let g = WeightedBipartite::complete(&p);
        let c = variance_costs(&p);
        let tight = BudgetedProblem::new(g.clone(), c.clone(), BudgetMode::Budget(0.1)).unwrap();
        assert!(matches!(solve_budgeted(&tight), Err(Error::Infeasible(_))));
        let greedy = BudgetedProblem::new(g, c, BudgetMode::Reward(0.6)).unwrap();
        assert!(matches!(solve_budgeted(&greedy), Err(Error::Infeasible(_))));
    }

    #[test]
    fn rejects_bad_costs() {
        let g = WeightedBipartite::complete(&[vec![0.5]]);
        assert!(BudgetedProblem::new(g.clone(), vec![vec![1.0]], BudgetMode::Budget(1.0)).is_err());
        assert!(BudgetedProblem::new(g, vec![vec![0.2]], BudgetMode::Budget(-1.0)).is_err());
    }

    #[test]
    fn median_budget_against_enumeration() {
        for seed in 0..40 {
            let p = random_probs(5, seed);
            let c = variance_costs(&p);
            let all = enumerate(&p, &c);
            let mut costs: Vec<f64> = all.iter().map(|x| x.1).collect();
            costs.sort_by(f64::total_cmp);
            let budget = costs[costs.len() / 2];
            let opt = all
                .iter()
                .filter(|x| x.1 <= budget)
                .map(|x| x.0)
                .fold(f64::NEG_INFINITY, f64::max);
            let prob = BudgetedProblem::new(WeightedBipartite::complete(&p), c, BudgetMode::Budget(budget)).unwrap();
            let s = solve_budgeted(&prob).unwrap();
            assert!(s.cost <= budget + 1e-12);
            assert!(s.weight >= opt - 2.0);
            assert!(s.lagrangian_upper_bound >= opt - 1e-9);
            assert!(s.guarantee_holds());
        }
    }

    proptest! {
        #[test]
        fn reward_mode_feasible_and_bounded(seed in any::<u64>(), frac in 0.0f64..1.0) {
            let p = random_probs(4, seed);
            let c = variance_costs(&p);
            let all = enumerate(&p, &c);
            let max_cost = all.iter().map(|x| x.1).fold(0.0, f64::max);
            let reward = frac * max_cost;
            let opt = all.iter().filter(|x| x.1 >= reward).map(|x| x.0).fold(f64::NEG_INFINITY, f64::max);
            let prob = BudgetedProblem::new(WeightedBipartite::complete(&p), c, BudgetMode::Reward(reward)).unwrap();
            let s = solve_budgeted(&prob).unwrap();
            prop_assert!(s.cost >= reward - 1e-12);
            prop_assert!(s.weight >= opt - 2.0);
            prop_assert!(s.lagrangian_upper_bound >= opt - 1e-9);
        }

        #[test]
        fn forced_edges_are_kept(seed in any::<u64>(), frac in 0.2f64..1.0) {
            let p = random_probs(5, seed);
            let c = variance_costs(&p);
            let g = WeightedBipartite::complete(&p).with_forced(vec![(0, 2), (3, 1)]).unwrap();
            let budget = 0.25 + frac;
            let prob = BudgetedProblem::new(g, c, BudgetMode::Budget(budget)).unwrap();
            if let Ok(s) = solve_budgeted(&prob) {
                prop_assert_eq!(s.lineup.get(0), 2);
                prop_assert_eq!(s.lineup.get(3), 1);
                prop_assert!(s.cost <= budget + 1e-12);
                prop_assert!(s.guarantee_holds());
            }
        }
    }
}
