//! Maximum-cardinality matching and maximum-weight matchings of every size.

use super::WeightedBipartite;
use crate::error::{Error, Result};

/// Maximum-cardinality matching by augmenting paths (Kuhn). Returns the
/// matched column of each row.
pub fn max_cardinality(adj: &[Vec<bool>]) -> Vec<Option<usize>> {
    let n_rows = adj.len();
    let n_cols = adj.first().map_or(0, Vec::len);
    let mut row_of_col: Vec<Option<usize>> = vec![None; n_cols];

    fn augment(
        r: usize,
        adj: &[Vec<bool>],
        seen: &mut [bool],
        row_of_col: &mut [Option<usize>],
    ) -> bool {
        for c in 0..row_of_col.len() {
            if adj[r][c] && !seen[c] {
                seen[c] = true;
                let free = match row_of_col[c] {
                    None => true,
                    Some(r2) => augment(r2, adj, seen, row_of_col),
                };
                if free {
                    row_of_col[c] = Some(r);
                    return true;
                }
            }
        }
        false
    }

    for r in 0..n_rows {
        let mut seen = vec![false; n_cols];
        augment(r, adj, &mut seen, &mut row_of_col);
    }
    let mut col_of_row = vec![None; n_rows];
    for (c, r) in row_of_col.iter().enumerate() {
        if let Some(r) = r {
            col_of_row[*r] = Some(c);
        }
    }
    col_of_row
}

/// A (not necessarily perfect) matching as sorted `(row, col)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct SizedMatching {
    pub pairs: Vec<(usize, usize)>,
    pub weight: f64,
}

impl SizedMatching {
    pub fn size(&self) -> usize {
        self.pairs.len()
    }
}

/// Maximum-weight matchings of every achievable size.
///
/// Entry `s` of the result is a maximum-weight matching with exactly `s`
/// edges. Built by successive shortest augmenting paths on the residual
/// graph (cost = -weight, Bellman-Ford); after `s` augmentations the matching
/// is optimal among size-`s` matchings. Forced edges are included in every
/// entry, so the vector starts at size `|forced|`; shorter sizes are absent.
pub fn max_weight_by_size(g: &WeightedBipartite) -> Vec<SizedMatching> {
    let c = g.contract();
    let w = c.reduce(g.weights());
    let n = w.len();
    let forced_pairs = g.forced().to_vec();

    let mut col_of_row: Vec<Option<usize>> = vec![None; n];
    let mut row_of_col: Vec<Option<usize>> = vec![None; n];
    let mut weight = 0.0;

    let snapshot = |col_of_row: &[Option<usize>], weight: f64| {
        let mut pairs = forced_pairs.clone();
        for (k, m) in col_of_row.iter().enumerate() {
            if let Some(cc) = m {
                pairs.push((c.rows[k], c.cols[*cc]));
            }
        }
        pairs.sort_unstable();
        SizedMatching {
            pairs,
            weight: weight + c.offset,
        }
    };

    let mut out = vec![snapshot(&col_of_row, weight)];
    loop {
        // Shortest distances (in -weight) from any free row.
        let inf = f64::INFINITY;
        let mut dist_row = vec![inf; n];
        let mut dist_col = vec![inf; n];
        let mut pred_col = vec![usize::MAX; n]; // row that reaches the column
        for r in 0..n {
            if col_of_row[r].is_none() {
                dist_row[r] = 0.0;
            }
        }
        for _ in 0..=2 * n {
            let mut changed = false;
            for r in 0..n {
                if dist_row[r] == inf {
                    continue;
                }
                for cc in 0..n {
                    if col_of_row[r] == Some(cc) {
                        continue;
                    }
                    if let Some(x) = w[r][cc] {
                        let d = dist_row[r] - x;
                        if d < dist_col[cc] - 1e-15 {
                            dist_col[cc] = d;
                            pred_col[cc] = r;
                            changed = true;
                        }
                    }
                }
            }
            for cc in 0..n {
                if let (Some(r), true) = (row_of_col[cc], dist_col[cc] < inf) {
                    let d = dist_col[cc] + w[r][cc].expect("matched edge allowed");
                    if d < dist_row[r] - 1e-15 {
                        dist_row[r] = d;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let end = (0..n)
            .filter(|&cc| row_of_col[cc].is_none() && dist_col[cc] < inf)
            .min_by(|&a, &b| dist_col[a].total_cmp(&dist_col[b]).then(a.cmp(&b)));
        let Some(mut cc) = end else { break };
        weight -= dist_col[cc];
        loop {
            let r = pred_col[cc];
            let prev = col_of_row[r];
            col_of_row[r] = Some(cc);
            row_of_col[cc] = Some(r);
            match prev {
                None => break,
                Some(p) => cc = p,
            }
        }
        out.push(snapshot(&col_of_row, weight));
    }
    out
}

/// Maximum-weight matching with exactly `s` edges.
pub fn max_weight_of_size(g: &WeightedBipartite, s: usize) -> Result<SizedMatching> {
    if s > g.n() {
        return Err(Error::invalid(format!("size {s} exceeds n = {}", g.n())));
    }
    let k = g.forced().len();
    if s < k {
        return Err(Error::Infeasible(format!(
            "size {s} is smaller than the {k} forced edges"
        )));
    }
    max_weight_by_size(g)
        .into_iter()
        .nth(s - k)
        .ok_or_else(|| Error::Infeasible(format!("no matching with {s} edges exists")))
}
