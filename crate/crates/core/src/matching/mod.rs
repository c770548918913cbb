//! Bipartite matching engines.
//!
//! Rows are first-team players and columns are opponents. A `None` weight
//! marks a forbidden edge. Forced edges are contracted out before solving and
//! their weight added back.

mod budgeted;
mod cardinality;
mod hungarian;

pub use budgeted::{solve_budgeted, BudgetMode, BudgetedProblem, BudgetedSolution};
pub use cardinality::{max_cardinality, max_weight_by_size, max_weight_of_size, SizedMatching};
pub use hungarian::{max_weight_perfect, PerfectMatching};

use crate::error::{Error, Result};

/// Weight matrix, forbidden-edge marker and forced edge set.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedBipartite {
    n: usize,
    weights: Vec<Vec<Option<f64>>>,
    forced: Vec<(usize, usize)>,
}

impl WeightedBipartite {
    pub fn new(weights: Vec<Vec<Option<f64>>>, forced: Vec<(usize, usize)>) -> Result<Self> {
        let n = weights.len();
        if let Some(row) = weights.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: row.len(),
            });
        }
        let mut row_used = vec![false; n];
        let mut col_used = vec![false; n];
        for &(i, j) in &forced {
            if i >= n || j >= n {
                return Err(Error::invalid(format!("forced edge ({i}, {j}) out of range")));
            }
            if row_used[i] || col_used[j] {
                return Err(Error::invalid("forced edges must be vertex-disjoint"));
            }
            if weights[i][j].is_none() {
                return Err(Error::invalid(format!("forced edge ({i}, {j}) is forbidden")));
            }
            row_used[i] = true;
            col_used[j] = true;
        }
        Ok(WeightedBipartite {
            n,
            weights,
            forced,
        })
    }

    /// Complete graph with the given weights and no forced edges.
    pub fn complete(weights: &[Vec<f64>]) -> Self {
        let w = weights
            .iter()
            .map(|r| r.iter().map(|&x| Some(x)).collect())
            .collect();
        WeightedBipartite::new(w, Vec::new()).expect("square matrix")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        self.weights[i][j]
    }

    pub fn weights(&self) -> &[Vec<Option<f64>>] {
        &self.weights
    }

    pub fn forced(&self) -> &[(usize, usize)] {
        &self.forced
    }

    pub fn with_forced(&self, forced: Vec<(usize, usize)>) -> Result<Self> {
        WeightedBipartite::new(self.weights.clone(), forced)
    }

    /// Reduced problem on the vertices not covered by forced edges.
    pub(crate) fn contract(&self) -> Contraction {
        let mut row_free = vec![true; self.n];
        let mut col_free = vec![true; self.n];
        let mut offset = 0.0;
        for &(i, j) in &self.forced {
            row_free[i] = false;
            col_free[j] = false;
            offset += self.weights[i][j].unwrap_or(0.0);
        }
        let rows: Vec<usize> = (0..self.n).filter(|&i| row_free[i]).collect();
        let cols: Vec<usize> = (0..self.n).filter(|&j| col_free[j]).collect();
        Contraction {
            rows,
            cols,
            offset,
            forced: self.forced.clone(),
            n: self.n,
        }
    }
}

/// Index maps between a graph and its forced-edge contraction.
#[derive(Debug, Clone)]
pub(crate) struct Contraction {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    /// Total weight of the forced edges.
    pub offset: f64,
    forced: Vec<(usize, usize)>,
    n: usize,
}

impl Contraction {
    pub fn reduce<T: Clone>(&self, full: &[Vec<T>]) -> Vec<Vec<T>> {
        self.rows
            .iter()
            .map(|&i| self.cols.iter().map(|&j| full[i][j].clone()).collect())
            .collect()
    }

    /// Lifts a reduced assignment back to a full 0-based assignment.
    pub fn expand(&self, reduced: &[usize]) -> Vec<usize> {
        let mut full = vec![usize::MAX; self.n];
        for &(i, j) in &self.forced {
            full[i] = j;
        }
        for (k, &c) in reduced.iter().enumerate() {
            full[self.rows[k]] = self.cols[c];
        }
        full
    }
}

/// Sum of `values[i][assignment[i]]`.
pub fn assignment_total(values: &[Vec<f64>], assignment: &[usize]) -> f64 {
    assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| values[i][j])
        .sum()
}
