//! Descending-`k` solve protocol and an exhaustive oracle for small graphs.

use std::time::{Duration, Instant};

use crate::construct::{naive, procedure2};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::Partition;
use crate::rng::SeededRng;
use crate::tabu::{tabu_eqcol, SearchResult, StopCondition, TenureParams};

/// Per-call iteration cap used by [`DescentConfig::default`].
pub const DEFAULT_ITERATION_CAP: u64 = 500_000;

/// Largest graph [`brute_force_chi_eq`] accepts.
pub const BRUTE_FORCE_LIMIT: usize = 12;

#[derive(Clone, Copy, Debug)]
pub struct DescentConfig {
    pub lower_bound: usize,
    pub params: TenureParams,
    /// Budget for the tabu searches; the initial coloring is not charged.
    pub time_limit: Duration,
    pub iteration_cap: u64,
}

impl Default for DescentConfig {
    fn default() -> Self {
        Self {
            lower_bound: 1,
            params: TenureParams::COMBINATION_G,
            time_limit: Duration::from_secs(3600),
            iteration_cap: DEFAULT_ITERATION_CAP,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DescentStatus {
    /// A coloring with `lower_bound` classes was found.
    LowerBoundReached,
    /// The initial coloring already uses fewer classes than the lower bound,
    /// so the bound was wrong; the initial coloring is returned unchanged.
    InitialBelowLowerBound,
    /// The search at `best_k - 1` ended without success (time, iteration cap
    /// or an empty neighborhood).
    SearchExhausted,
}

#[derive(Clone, Debug)]
pub struct SolveReport<'g> {
    pub best_k: usize,
    pub best_coloring: Partition<'g>,
    /// Every tabu run in order, with the `k` it targeted.
    pub schedule: Vec<(usize, SearchResult<'g>)>,
    pub initial_k: usize,
    pub lower_bound_used: usize,
    pub total_elapsed: Duration,
    pub status: DescentStatus,
}

impl SolveReport<'_> {
    pub fn total_iterations(&self) -> u64 {
        self.schedule.iter().map(|(_, r)| r.iterations_run).sum()
    }

    /// Best objective of the last, failed, run; 0 when the descent ended on a
    /// success.
    pub fn residual(&self) -> usize {
        match self.schedule.last() {
            Some((_, r)) if !r.solved => r.best_objective,
            _ => 0,
        }
    }
}

/// Finds an initial coloring, then repeatedly asks the tabu search for a
/// coloring with one class fewer, seeding each attempt from the last success.
pub fn solve_descending<'g>(
    graph: &'g Graph,
    config: &DescentConfig,
    rng: &mut SeededRng,
) -> Result<SolveReport<'g>> {
    let n = graph.n();
    if config.lower_bound == 0 || config.lower_bound > n {
        return Err(Error::InvalidParameters(format!(
            "lower bound {} must lie in 1..={n}",
            config.lower_bound
        )));
    }

    let mut best = naive(graph, rng)?;
    let initial_k = best.k();
    let started = Instant::now();
    let mut schedule = Vec::new();

    let status = if initial_k < config.lower_bound {
        DescentStatus::InitialBelowLowerBound
    } else {
        loop {
            if best.k() <= config.lower_bound {
                break DescentStatus::LowerBoundReached;
            }
            let remaining = config.time_limit.saturating_sub(started.elapsed());
            if remaining.is_zero() {
                break DescentStatus::SearchExhausted;
            }
            let k = best.k() - 1;
            let s0 = procedure2(graph, k, &best, rng)?;
            let stop = StopCondition::iterations(config.iteration_cap).with_time(remaining);
            let result = tabu_eqcol(s0, config.params, stop, rng)?;
            let solved = result.solved;
            if solved {
                best = result.best.clone();
            }
            schedule.push((k, result));
            if !solved {
                break DescentStatus::SearchExhausted;
            }
        }
    };

    debug_assert!(best.verify_eqcol());
    Ok(SolveReport {
        best_k: best.k(),
        best_coloring: best,
        schedule,
        initial_k,
        lower_bound_used: config.lower_bound,
        total_elapsed: started.elapsed(),
        status,
    })
}

/// Equitable chromatic number by exhaustive search. Refuses graphs with more
/// than [`BRUTE_FORCE_LIMIT`] vertices.
pub fn brute_force_chi_eq(graph: &Graph) -> Result<usize> {
    let n = graph.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    if n == 0 {
        return Err(Error::InvalidParameters("graph has no vertices".into()));
    }
    Ok((1..=n)
        .find(|&k| has_eqcol(graph, k))
        .expect("singleton classes always work"))
}

/// Whether an equitable `k`-coloring exists, by backtracking with class-size
/// caps. Classes are interchangeable, so a vertex may open at most one new
/// class.
pub fn has_eqcol(graph: &Graph, k: usize) -> bool {
    let n = graph.n();
    if k == 0 || k > n {
        return false;
    }
    let mut search = Backtrack {
        graph,
        k,
        q: n / k,
        r: n % k,
        colors: vec![usize::MAX; n],
        sizes: vec![0; k],
        large: 0,
    };
    search.extend(0, 0)
}

struct Backtrack<'a> {
    graph: &'a Graph,
    k: usize,
    q: usize,
    r: usize,
    colors: Vec<usize>,
    sizes: Vec<usize>,
    large: usize,
}

impl Backtrack<'_> {
    fn extend(&mut self, v: usize, used: usize) -> bool {
        if v == self.colors.len() {
            // caps force the exact q / q+1 split
            return true;
        }
        for c in 0..(used + 1).min(self.k) {
            let cap = if self.large < self.r {
                self.q + 1
            } else {
                self.q
            };
            if self.sizes[c] >= cap {
                continue;
            }
            if self.graph.neighbors(v).iter().any(|&w| self.colors[w] == c) {
                continue;
            }
            self.colors[v] = c;
            self.sizes[c] += 1;
            let became_large = self.sizes[c] == self.q + 1;
            if became_large {
                self.large += 1;
            }
            if self.extend(v + 1, used.max(c + 1)) {
                return true;
            }
            if became_large {
                self.large -= 1;
            }
            self.sizes[c] -= 1;
            self.colors[v] = usize::MAX;
        }
        false
    }
}
