//! Maximum-weight perfect matching by the Hungarian method with potentials.
//!
//! Among all optimal matchings the lexicographically smallest assignment is
//! returned: every optimal matching lives in the subgraph of edges that are
//! tight under the optimal duals, so the smallest one is found there by
//! greedy fixing with alternating-path repair.

use super::{cardinality::max_cardinality, WeightedBipartite};
use crate::error::{Error, Result};
use crate::instance::LineUp;

#[derive(Debug, Clone, PartialEq)]
pub struct PerfectMatching {
    pub lineup: LineUp,
    pub weight: f64,
}

pub fn max_weight_perfect(g: &WeightedBipartite) -> Result<PerfectMatching> {
    let c = g.contract();
    let reduced = c.reduce(g.weights());
    let assignment = assign_max(&reduced)
        .ok_or_else(|| Error::Infeasible("no perfect matching respects the constraints".into()))?;
    let weight = c.offset
        + assignment
            .iter()
            .enumerate()
            .map(|(i, &j)| reduced[i][j].expect("allowed edge"))
            .sum::<f64>();
    let lineup = LineUp::new(c.expand(&assignment))?;
    Ok(PerfectMatching { lineup, weight })
}

/// Lexicographically smallest maximum-weight perfect assignment, or `None`
/// when the allowed edges admit no perfect matching.
pub(crate) fn assign_max(w: &[Vec<Option<f64>>]) -> Option<Vec<usize>> {
    let n = w.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let adj: Vec<Vec<bool>> = w
        .iter()
        .map(|r| r.iter().map(Option::is_some).collect())
        .collect();
    if max_cardinality(&adj).iter().flatten().count() < n {
        return None;
    }
    let cost: Vec<Vec<f64>> = w
        .iter()
        .map(|r| r.iter().map(|x| x.map_or(f64::INFINITY, |v| -v)).collect())
        .collect();
    let (col_of_row, u, v) = hungarian_min(&cost);

    let scale = w
        .iter()
        .flatten()
        .flatten()
        .fold(1.0f64, |m, x| m.max(x.abs()));
    let tol = 1e-9 * scale;
    let tight: Vec<Vec<bool>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| cost[i][j].is_finite() && cost[i][j] - u[i] - v[j] <= tol)
                .collect()
        })
        .collect();
    Some(lex_smallest_perfect(&tight, col_of_row))
}

/// Dense `O(n^3)` minimum-cost assignment; infinite cost marks a forbidden
/// edge. The caller guarantees a finite perfect matching exists. Returns the
/// assignment and the row/column potentials.
fn hungarian_min(cost: &[Vec<f64>]) -> (Vec<usize>, Vec<f64>, Vec<f64>) {
    let n = cost.len();
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    // p[j]: row (1-based) matched to column j; p[0] is the row being inserted.
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            debug_assert!(delta.is_finite(), "no augmenting path despite feasibility");
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut col_of_row = vec![0usize; n];
    for j in 1..=n {
        col_of_row[p[j] - 1] = j - 1;
    }
    (col_of_row, u[1..].to_vec(), v[1..].to_vec())
}

/// Lexicographically smallest perfect matching of `allowed`, starting from a
/// known perfect matching `col_of_row`.
pub(crate) fn lex_smallest_perfect(allowed: &[Vec<bool>], mut col_of_row: Vec<usize>) -> Vec<usize> {
    let n = allowed.len();
    let mut row_of_col = vec![0usize; n];
    for (i, &j) in col_of_row.iter().enumerate() {
        row_of_col[j] = i;
    }

    fn reroute(
        r: usize,
        fixed_upto: usize,
        target: usize,
        allowed: &[Vec<bool>],
        seen: &mut [bool],
        col_of_row: &mut [usize],
        row_of_col: &mut [usize],
    ) -> bool {
        for c in 0..allowed.len() {
            if !allowed[r][c] || seen[c] {
                continue;
            }
            seen[c] = true;
            let ok = c == target || {
                let r2 = row_of_col[c];
                r2 > fixed_upto
                    && reroute(r2, fixed_upto, target, allowed, seen, col_of_row, row_of_col)
            };
            if ok {
                col_of_row[r] = c;
                row_of_col[c] = r;
                return true;
            }
        }
        false
    }

    for i in 0..n {
        let current = col_of_row[i];
        for j in 0..current {
            if !allowed[i][j] || row_of_col[j] < i {
                continue;
            }
            let r = row_of_col[j];
            let mut seen = vec![false; n];
            seen[j] = true;
            if reroute(r, i, current, allowed, &mut seen, &mut col_of_row, &mut row_of_col) {
                col_of_row[i] = j;
                row_of_col[j] = i;
                break;
            }
        }
    }
    col_of_row
}
