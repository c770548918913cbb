use super::{improves, Diagnostics, Method, SolveResult};
use crate::error::{Error, Result};
use crate::instance::{Instance, LineUp};
use crate::pb::upper_tail;

pub const DEFAULT_BRUTE_CAP: usize = 10;

/// Exact optimum by enumerating all `n!` line-ups.
///
/// Line-ups are visited in lexicographic order by a depth-first search that
/// extends the win-count distribution one match at a time, so each prefix is
/// shared by all its completions. Ties (within [`super::PROBABILITY_TIE`]) keep
/// the first, i.e. lexicographically smallest, line-up.
pub fn solve_brute(inst: &Instance, cap: usize) -> Result<SolveResult> {
    let n = inst.n();
    if n > cap {
        return Err(Error::CapExceeded {
            what: "brute-force team size".into(),
            required: n as u64,
            cap: cap as u64,
        });
    }

    struct Search<'a> {
        inst: &'a Instance,
        assignment: Vec<usize>,
        used: Vec<bool>,
        // dists[k] is the distribution after the first k matches.
        dists: Vec<Vec<f64>>,
        best: Option<(f64, LineUp)>,
        evaluated: u64,
    }

    impl Search<'_> {
        fn run(&mut self, i: usize) {
            let n = self.inst.n();
            if i == n {
                self.evaluated += 1;
                let p = upper_tail(&self.dists[n], self.inst.target());
                let l = LineUp::new(self.assignment.clone()).expect("permutation");
                if improves(p, &l, self.best.as_ref().map(|(bp, bl)| (*bp, bl))) {
                    self.best = Some((p, l));
                }
                return;
            }
            for j in 0..n {
                if self.used[j] {
                    continue;
                }
                let q = self.inst.prob(i, j);
                let (head, tail) = self.dists.split_at_mut(i + 1);
                let (prev, next) = (&head[i], &mut tail[0]);
                next[0] = prev[0] * (1.0 - q);
                for k in 1..=i {
                    next[k] = prev[k - 1] * q + prev[k] * (1.0 - q);
                }
                next[i + 1] = prev[i] * q;
                self.used[j] = true;
                self.assignment[i] = j;
                self.run(i + 1);
                self.used[j] = false;
            }
        }
    }

    let mut dists: Vec<Vec<f64>> = (0..=n).map(|k| vec![0.0; k + 1]).collect();
    dists[0][0] = 1.0;
    let mut search = Search {
        inst,
        assignment: vec![0; n],
        used: vec![false; n],
        dists,
        best: None,
        evaluated: 0,
    };
    search.run(0);
    let (_, lineup) = search.best.expect("n >= 1 gives at least one line-up");
    SolveResult::new(
        inst,
        lineup,
        Method::Brute,
        Diagnostics::Brute {
            lineups_evaluated: search.evaluated,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate, table1, GeneratorKind};
    use crate::pb::evaluate_lineup;
    use crate::solvers::fixtures::table2;

    #[test]
    fn table1_optimum_is_certain() {
        let r = solve_brute(&table1(), DEFAULT_BRUTE_CAP).unwrap();
        assert_eq!(r.win_probability(), 1.0);
        // Lexicographically first certain line-up.
        assert_eq!(r.lineup.to_one_based(), vec![2, 3, 1]);
        assert_eq!(
            r.diagnostics,
            Diagnostics::Brute {
                lineups_evaluated: 6
            }
        );
    }

    #[test]
    fn table2_optimum() {
        let r = solve_brute(&table2(), DEFAULT_BRUTE_CAP).unwrap();
        assert!((r.win_probability() - 0.0625).abs() < 1e-12);
    }

    #[test]
    fn degenerate_is_zero_or_one() {
        for seed in 0..10 {
            let inst = generate(GeneratorKind::Degenerate { density: 0.4 }, 5, seed).unwrap();
            let p = solve_brute(&inst, DEFAULT_BRUTE_CAP).unwrap().win_probability();
            assert!(p == 0.0 || p == 1.0);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let inst = generate(GeneratorKind::UniformRandom, 5, 1).unwrap();
        assert!(matches!(
            solve_brute(&inst, 4),
            Err(Error::CapExceeded { required: 5, cap: 4, .. })
        ));
    }

    #[test]
    fn agrees_with_direct_evaluation() {
        let inst = generate(GeneratorKind::UniformRandom, 6, 9).unwrap();
        let r = solve_brute(&inst, DEFAULT_BRUTE_CAP).unwrap();
        let again = evaluate_lineup(&inst, &r.lineup).unwrap();
        assert!((again.win_probability - r.win_probability()).abs() < 1e-12);
    }
}
