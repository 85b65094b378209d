//! Tabu search over equitable `k`-partitions.
//!
//! The neighborhood of a partition combines two schemes:
//!
//! * relocations of a conflicting vertex from a class of size `floor(n/k)+1`
//!   to a class of size `floor(n/k)`, available only when `k` does not divide
//!   `n`;
//! * swaps of a conflicting vertex `v` (class `i`) with any vertex `u` of
//!   another class `j`, where pairs of two conflicting vertices are visited
//!   once, from the side with the smaller class index.
//!
//! Both keep class sizes equitable. After moving `v` out of class `i`, the
//! feature `(v, i)` is forbidden for `floor(alpha * |C(s)|) + Random(beta)`
//! iterations, `C(s)` being the conflicting set of the partition just left.
//! A forbidden move is still admissible when it would beat the best objective
//! seen so far.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::rng::SeededRng;

/// Dynamic tenure parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TenureParams {
    alpha: f64,
    beta: u32,
}

impl TenureParams {
    /// `alpha = 0.9`, `beta = 5`.
    pub const COMBINATION_G: TenureParams = TenureParams {
        alpha: 0.9,
        beta: 5,
    };

    pub fn new(alpha: f64, beta: u32) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::InvalidParameters(format!(
                "alpha must be a nonnegative number, got {alpha}"
            )));
        }
        if beta == 0 {
            return Err(Error::InvalidParameters("beta must be at least 1".into()));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> u32 {
        self.beta
    }
}

impl Default for TenureParams {
    fn default() -> Self {
        Self::COMBINATION_G
    }
}

/// `floor(alpha * conflict_count) + d`, `d` uniform in `0..beta`.
pub fn tenure(params: TenureParams, conflict_count: usize, rng: &mut SeededRng) -> u64 {
    let base = (params.alpha * conflict_count as f64).floor() as u64;
    base + rng.below(params.beta as usize) as u64
}

/// Expiry iteration per `(vertex, class)` feature.
///
/// A feature stored at iteration `t0` with tenure `t` is tabu during
/// iterations `t0 + 1 ..= t0 + t`.
#[derive(Clone, Debug)]
pub struct TabuList {
    k: usize,
    expiry: Vec<u64>,
}

impl TabuList {
    pub fn new(n: usize, k: usize) -> Self {
        Self {
            k,
            expiry: vec![0; n * k],
        }
    }

    pub fn forbid(&mut self, vertex: usize, class: usize, iteration: u64, tenure: u64) {
        self.expiry[vertex * self.k + class] = iteration + tenure + 1;
    }

    #[inline]
    pub fn is_tabu(&self, vertex: usize, class: usize, iteration: u64) -> bool {
        self.expiry[vertex * self.k + class] > iteration
    }

    /// Remaining iterations during which the feature stays tabu, counting
    /// `iteration` itself.
    pub fn live(&self, vertex: usize, class: usize, iteration: u64) -> u64 {
        self.expiry[vertex * self.k + class].saturating_sub(iteration)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Move {
    /// Move `vertex` into class `to`.
    Relocate { vertex: usize, to: usize },
    /// Swap the classes of `vertex` (the conflicting one) and `other`.
    Swap { vertex: usize, other: usize },
}

impl Move {
    /// The vertex whose former class becomes tabu.
    pub fn vertex(&self) -> usize {
        match *self {
            Move::Relocate { vertex, .. } | Move::Swap { vertex, .. } => vertex,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScoredMove {
    pub mv: Move,
    pub delta: i64,
}

/// Calls `visit` for every move of the neighborhood together with its
/// objective delta.
pub fn for_each_move(s: &Partition<'_>, mut visit: impl FnMut(Move, i64)) {
    let k = s.k();
    let colors = s.colors();
    let conflicting = s.conflicting();

    if s.surplus() != 0 {
        let small: Vec<usize> = (0..k).filter(|&c| !s.is_large(c)).collect();
        for &v in conflicting {
            if !s.is_large(colors[v]) {
                continue;
            }
            for &to in &small {
                visit(Move::Relocate { vertex: v, to }, s.move_delta(v, to));
            }
        }
    }

    for &v in conflicting {
        let i = colors[v];
        for (u, &j) in colors.iter().enumerate() {
            if j == i || (j < i && s.is_conflicting(u)) {
                continue;
            }
            visit(
                Move::Swap {
                    vertex: v,
                    other: u,
                },
                s.swap_delta(v, u),
            );
        }
    }
}

/// The full neighborhood, mostly for inspection and tests.
pub fn neighborhood(s: &Partition<'_>) -> Vec<ScoredMove> {
    let mut out = Vec::new();
    for_each_move(s, |mv, delta| out.push(ScoredMove { mv, delta }));
    out
}

fn is_tabu_move(s: &Partition<'_>, list: &TabuList, mv: Move, iteration: u64) -> bool {
    match mv {
        Move::Relocate { vertex, to } => list.is_tabu(vertex, to, iteration),
        Move::Swap { vertex, other } => {
            list.is_tabu(vertex, s.color_of(other), iteration)
                || list.is_tabu(other, s.color_of(vertex), iteration)
        }
    }
}

/// Uniform choice among minimum-delta candidates, one pass.
struct Reservoir {
    best: Option<ScoredMove>,
    ties: u64,
}

impl Reservoir {
    fn new() -> Self {
        Self {
            best: None,
            ties: 0,
        }
    }

    fn offer(&mut self, candidate: ScoredMove, rng: &mut SeededRng) {
        match self.best {
            Some(b) if candidate.delta > b.delta => {}
            Some(b) if candidate.delta == b.delta => {
                self.ties += 1;
                if rng.below(self.ties as usize) == 0 {
                    self.best = Some(candidate);
                }
            }
            _ => {
                self.best = Some(candidate);
                self.ties = 1;
            }
        }
    }
}

/// Picks the next move.
///
/// Among admissible moves (not tabu at `iteration`, or aspirating because
/// `f(s) + delta < best_so_far`) a minimum-delta one is drawn uniformly. When
/// every move is tabu the minimum-delta move of the whole neighborhood is
/// returned instead. `None` means the neighborhood is empty.
pub fn best_admissible_move(
    s: &Partition<'_>,
    list: &TabuList,
    iteration: u64,
    best_so_far: usize,
    rng: &mut SeededRng,
) -> Option<ScoredMove> {
    let current = s.objective() as i64;
    let mut admissible = Reservoir::new();
    let mut fallback = Reservoir::new();
    for_each_move(s, |mv, delta| {
        let candidate = ScoredMove { mv, delta };
        let aspirates = current + delta < best_so_far as i64;
        if aspirates || !is_tabu_move(s, list, mv, iteration) {
            admissible.offer(candidate, rng);
        } else if admissible.best.is_none() {
            fallback.offer(candidate, rng);
        }
    });
    admissible.best.or(fallback.best)
}

/// When a search stops.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StopCondition {
    pub max_iterations: Option<u64>,
    pub time_limit: Option<Duration>,
    /// Stop as soon as the objective reaches zero.
    pub stop_at_target: bool,
}

impl StopCondition {
    pub fn iterations(max: u64) -> Self {
        Self {
            max_iterations: Some(max),
            time_limit: None,
            stop_at_target: true,
        }
    }

    pub fn time(limit: Duration) -> Self {
        Self {
            max_iterations: None,
            time_limit: Some(limit),
            stop_at_target: true,
        }
    }

    pub fn with_iterations(mut self, max: u64) -> Self {
        self.max_iterations = Some(max);
        self
    }

    pub fn with_time(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.max_iterations.is_none() && self.time_limit.is_none() {
            return Err(Error::InvalidParameters(
                "a search needs an iteration or time bound".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SearchResult<'g> {
    pub best: Partition<'g>,
    pub best_objective: usize,
    pub iterations_run: u64,
    pub iterations_to_best: u64,
    pub elapsed: Duration,
    pub solved: bool,
}

/// One iteration of a search, as reported to an observer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Step {
    pub iteration: u64,
    pub mv: Move,
    pub delta: i64,
    pub objective: usize,
    pub tenure: u64,
}

/// Searches for an equitable `k`-coloring starting from `s0`.
pub fn tabu_eqcol<'g>(
    s0: Partition<'g>,
    params: TenureParams,
    stop: StopCondition,
    rng: &mut SeededRng,
) -> Result<SearchResult<'g>> {
    tabu_eqcol_observed(s0, params, stop, rng, |_| {})
}

/// [`tabu_eqcol`], calling `observe` after every applied move.
pub fn tabu_eqcol_observed<'g>(
    s0: Partition<'g>,
    params: TenureParams,
    stop: StopCondition,
    rng: &mut SeededRng,
    mut observe: impl FnMut(&Step),
) -> Result<SearchResult<'g>> {
    stop.validate()?;
    let started = Instant::now();
    let mut list = TabuList::new(s0.n(), s0.k());
    let mut s = s0;
    let mut best_colors = s.colors().to_vec();
    let mut best_objective = s.objective();
    let mut iterations_to_best = 0;
    let mut iteration = 0u64;

    loop {
        if stop.stop_at_target && s.objective() == 0 {
            break;
        }
        if stop.max_iterations.is_some_and(|max| iteration >= max) {
            break;
        }
        if stop
            .time_limit
            .is_some_and(|limit| started.elapsed() >= limit)
        {
            break;
        }
        iteration += 1;
        let Some(chosen) = best_admissible_move(&s, &list, iteration, best_objective, rng) else {
            iteration -= 1;
            break;
        };
        let conflict_count = s.conflicting().len();
        let vertex = chosen.mv.vertex();
        let left = s.color_of(vertex);
        match chosen.mv {
            Move::Relocate { vertex, to } => s.apply_1move(vertex, to),
            Move::Swap { vertex, other } => s.apply_2exchange(vertex, other),
        }
        .expect("enumerated moves are valid");
        let t = tenure(params, conflict_count, rng);
        list.forbid(vertex, left, iteration, t);
        observe(&Step {
            iteration,
            mv: chosen.mv,
            delta: chosen.delta,
            objective: s.objective(),
            tenure: t,
        });
        if s.objective() < best_objective {
            best_objective = s.objective();
            best_colors.copy_from_slice(s.colors());
            iterations_to_best = iteration;
        }
    }

    let best = Partition::from_assignment(s.graph(), s.k(), best_colors)?;
    Ok(SearchResult {
        best,
        best_objective,
        iterations_run: iteration,
        iterations_to_best,
        elapsed: started.elapsed(),
        solved: best_objective == 0,
    })
}
