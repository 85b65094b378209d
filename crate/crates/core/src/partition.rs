//! Equitable `k`-partitions with incremental conflict bookkeeping.
//!
//! A [`Partition`] keeps, besides the class of every vertex, an `n x k` table
//! of neighbor tallies ([`ConflictCounts`]). With it the objective change of a
//! single-vertex move or of a color swap is a constant-time lookup, and
//! applying a move costs `O(deg(v))`.
//!
//! Class sizes always satisfy the equity constraint: with `q = n / k` and
//! `r = n % k`, exactly `r` classes hold `q + 1` vertices (the set `W+`) and the
//! remaining `k - r` hold `q` (the set `W-`).

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::Graph;

const ABSENT: usize = usize::MAX;

/// `gamma[v][c]`: number of neighbors of `v` currently in class `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConflictCounts {
    k: usize,
    counts: Vec<u32>,
}

impl ConflictCounts {
    fn tally(graph: &Graph, k: usize, color_of: &[usize]) -> Self {
        let mut counts = vec![0u32; graph.n() * k];
        for (u, v) in graph.edges() {
            counts[u * k + color_of[v]] += 1;
            counts[v * k + color_of[u]] += 1;
        }
        Self { k, counts }
    }

    #[inline]
    pub fn get(&self, v: usize, class: usize) -> usize {
        self.counts[v * self.k + class] as usize
    }

    /// Tallies of one vertex across all classes.
    pub fn row(&self, v: usize) -> &[u32] {
        &self.counts[v * self.k..(v + 1) * self.k]
    }

    #[inline]
    fn shift(&mut self, v: usize, from: usize, to: usize) {
        self.counts[v * self.k + from] -= 1;
        self.counts[v * self.k + to] += 1;
    }
}

#[derive(Clone, Debug)]
pub struct Partition<'g> {
    graph: &'g Graph,
    k: usize,
    color_of: Vec<usize>,
    class_size: Vec<usize>,
    gamma: ConflictCounts,
    objective: usize,
    // C(s) as an indexed set: `conflict_pos[v]` is v's slot in `conflicting`.
    conflicting: Vec<usize>,
    conflict_pos: Vec<usize>,
}

impl<'g> Partition<'g> {
    /// Builds a partition from a class index per vertex, rejecting any
    /// assignment that violates equity.
    pub fn from_assignment(graph: &'g Graph, k: usize, color_of: Vec<usize>) -> Result<Self> {
        let n = graph.n();
        if k == 0 || k > n {
            return Err(Error::InvalidParameters(format!(
                "number of classes {k} must lie in 1..={n}"
            )));
        }
        if color_of.len() != n {
            return Err(Error::InvalidParameters(format!(
                "assignment covers {} vertices, graph has {n}",
                color_of.len()
            )));
        }
        let mut class_size = vec![0usize; k];
        for (v, &c) in color_of.iter().enumerate() {
            if c >= k {
                return Err(Error::InvalidParameters(format!(
                    "vertex {v} has class {c}, expected < {k}"
                )));
            }
            class_size[c] += 1;
        }
        let largest = *class_size.iter().max().unwrap();
        let smallest = *class_size.iter().min().unwrap();
        if largest - smallest > 1 {
            return Err(Error::EquityViolation {
                larger: largest,
                smaller: smallest,
            });
        }

        let gamma = ConflictCounts::tally(graph, k, &color_of);
        let mut partition = Self {
            graph,
            k,
            color_of,
            class_size,
            gamma,
            objective: 0,
            conflicting: Vec::new(),
            conflict_pos: vec![ABSENT; n],
        };
        let twice: usize = (0..n).map(|v| partition.own_conflicts(v)).sum();
        partition.objective = twice / 2;
        for v in 0..n {
            partition.refresh_conflict(v);
        }
        Ok(partition)
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn n(&self) -> usize {
        self.color_of.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn color_of(&self, v: usize) -> usize {
        self.color_of[v]
    }

    pub fn colors(&self) -> &[usize] {
        &self.color_of
    }

    pub fn class_size(&self, class: usize) -> usize {
        self.class_size[class]
    }

    pub fn class_sizes(&self) -> &[usize] {
        &self.class_size
    }

    /// Vertices of one class, ascending.
    pub fn class_members(&self, class: usize) -> Vec<usize> {
        (0..self.n())
            .filter(|&v| self.color_of[v] == class)
            .collect()
    }

    /// Cached objective `f(s)`: the number of edges inside classes.
    #[inline]
    pub fn objective(&self) -> usize {
        self.objective
    }

    pub fn conflicts(&self) -> &ConflictCounts {
        &self.gamma
    }

    /// `floor(n / k)`.
    pub fn base_size(&self) -> usize {
        self.n() / self.k
    }

    /// `r = n mod k`, the number of classes of size `floor(n / k) + 1`.
    pub fn surplus(&self) -> usize {
        self.n() % self.k
    }

    /// Whether `class` belongs to `W+`.
    #[inline]
    pub fn is_large(&self, class: usize) -> bool {
        self.class_size[class] == self.base_size() + 1
    }

    /// `(W+, W-)`: classes of size `floor(n/k) + 1` and of size `floor(n/k)`.
    pub fn equity_sets(&self) -> (Vec<usize>, Vec<usize>) {
        (0..self.k).partition(|&c| self.is_large(c))
    }

    /// Conflicting vertices in unspecified order.
    #[inline]
    pub fn conflicting(&self) -> &[usize] {
        &self.conflicting
    }

    /// `C(s)`, ascending.
    pub fn conflicting_set(&self) -> Vec<usize> {
        let mut set = self.conflicting.clone();
        set.sort_unstable();
        set
    }

    #[inline]
    pub fn is_conflicting(&self, v: usize) -> bool {
        self.conflict_pos[v] != ABSENT
    }

    /// `f(s') - f(s)` for moving `v` to class `to`.
    pub fn delta_1move(&self, v: usize, to: usize) -> Result<i64> {
        self.check_vertex(v)?;
        self.check_class(to)?;
        if to == self.color_of[v] {
            return Err(Error::InvalidMove(format!(
                "vertex {v} is already in class {to}"
            )));
        }
        Ok(self.move_delta(v, to))
    }

    #[inline]
    pub(crate) fn move_delta(&self, v: usize, to: usize) -> i64 {
        self.gamma.get(v, to) as i64 - self.own_conflicts(v) as i64
    }

    /// `f(s') - f(s)` for swapping the classes of `v` and `u`.
    pub fn delta_2exchange(&self, v: usize, u: usize) -> Result<i64> {
        self.check_vertex(v)?;
        self.check_vertex(u)?;
        if self.color_of[v] == self.color_of[u] {
            return Err(Error::InvalidMove(format!(
                "vertices {v} and {u} share class {}",
                self.color_of[v]
            )));
        }
        Ok(self.swap_delta(v, u))
    }

    /// The u-v edge, when present, is excluded from both new-class tallies:
    /// after the swap v no longer sits in u's new class and vice versa.
    #[inline]
    pub(crate) fn swap_delta(&self, v: usize, u: usize) -> i64 {
        let i = self.color_of[v];
        let j = self.color_of[u];
        let shared = self.graph.adjacent(u, v) as i64;
        (self.gamma.get(u, i) as i64 - shared) - self.gamma.get(u, j) as i64
            + (self.gamma.get(v, j) as i64 - shared)
            - self.gamma.get(v, i) as i64
    }

    /// Moves `v` from a `W+` class to a `W-` class.
    pub fn apply_1move(&mut self, v: usize, to: usize) -> Result<()> {
        self.check_vertex(v)?;
        self.check_class(to)?;
        let from = self.color_of[v];
        if from == to {
            return Err(Error::InvalidMove(format!(
                "vertex {v} is already in class {to}"
            )));
        }
        if self.surplus() == 0 || !self.is_large(from) {
            return Err(Error::InvalidMove(format!(
                "class {from} of vertex {v} is not among the larger classes"
            )));
        }
        if self.is_large(to) {
            return Err(Error::InvalidMove(format!(
                "target class {to} is already among the larger classes"
            )));
        }
        self.relocate(v, to);
        Ok(())
    }

    /// Swaps the classes of `v` and `u`.
    pub fn apply_2exchange(&mut self, v: usize, u: usize) -> Result<()> {
        self.check_vertex(v)?;
        self.check_vertex(u)?;
        let (i, j) = (self.color_of[v], self.color_of[u]);
        if i == j {
            return Err(Error::InvalidMove(format!(
                "vertices {v} and {u} share class {i}"
            )));
        }
        self.relocate(v, j);
        self.relocate(u, i);
        Ok(())
    }

    /// Unchecked reassignment; keeps every cache consistent but not equity.
    fn relocate(&mut self, v: usize, to: usize) {
        let from = self.color_of[v];
        let delta = self.move_delta(v, to);
        self.color_of[v] = to;
        self.class_size[from] -= 1;
        self.class_size[to] += 1;
        self.objective = (self.objective as i64 + delta) as usize;
        let graph = self.graph;
        for &w in graph.neighbors(v) {
            self.gamma.shift(w, from, to);
            let cw = self.color_of[w];
            if cw == from || cw == to {
                self.refresh_conflict(w);
            }
        }
        self.refresh_conflict(v);
    }

    #[inline]
    fn own_conflicts(&self, v: usize) -> usize {
        self.gamma.get(v, self.color_of[v])
    }

    fn refresh_conflict(&mut self, v: usize) {
        let conflicted = self.own_conflicts(v) > 0;
        let pos = self.conflict_pos[v];
        if conflicted && pos == ABSENT {
            self.conflict_pos[v] = self.conflicting.len();
            self.conflicting.push(v);
        } else if !conflicted && pos != ABSENT {
            let last = *self.conflicting.last().unwrap();
            self.conflicting.swap_remove(pos);
            if last != v {
                self.conflict_pos[last] = pos;
            }
            self.conflict_pos[v] = ABSENT;
        }
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n() {
            Ok(())
        } else {
            Err(Error::InvalidMove(format!("vertex {v} out of range")))
        }
    }

    fn check_class(&self, c: usize) -> Result<()> {
        if c < self.k {
            Ok(())
        } else {
            Err(Error::InvalidMove(format!("class {c} out of range")))
        }
    }

    /// Number of monochromatic edges, counted from scratch.
    pub fn recompute_objective(&self) -> usize {
        self.graph
            .edges()
            .filter(|&(u, v)| self.color_of[u] == self.color_of[v])
            .count()
    }

    /// True iff the partition is a proper equitable `k`-coloring. Checked
    /// against the graph directly, not the caches.
    pub fn verify_eqcol(&self) -> bool {
        verify_eqcol(self.graph, self.k, &self.color_of)
    }

    /// Coloring file text: a header `s <k> <f>` and one `<vertex> <color>`
    /// line per vertex, both 1-based.
    pub fn to_coloring_file(&self) -> String {
        let mut out = String::with_capacity(8 + self.n() * 8);
        writeln!(out, "s {} {}", self.k, self.objective).unwrap();
        for (v, &c) in self.color_of.iter().enumerate() {
            writeln!(out, "{} {}", v + 1, c + 1).unwrap();
        }
        out
    }
}

/// Checks that `color_of` is a proper coloring with `k` classes satisfying
/// equity.
pub fn verify_eqcol(graph: &Graph, k: usize, color_of: &[usize]) -> bool {
    if k == 0 || color_of.len() != graph.n() || color_of.iter().any(|&c| c >= k) {
        return false;
    }
    let mut sizes = vec![0usize; k];
    for &c in color_of {
        sizes[c] += 1;
    }
    let largest = sizes.iter().max().copied().unwrap_or(0);
    let smallest = sizes.iter().min().copied().unwrap_or(0);
    largest - smallest <= 1 && graph.edges().all(|(u, v)| color_of[u] != color_of[v])
}

/// A parsed coloring file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoringFile {
    pub k: usize,
    pub objective: usize,
    /// 0-based class per 0-based vertex.
    pub color_of: Vec<usize>,
}

impl ColoringFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut entries: Vec<Option<usize>> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let number = |tok: &str| -> Result<usize> {
                tok.parse()
                    .map_err(|_| Error::parse(line_no, format!("malformed number `{tok}`")))
            };
            match tokens.as_slice() {
                ["s", k, f] => {
                    if header.is_some() {
                        return Err(Error::parse(line_no, "duplicate header"));
                    }
                    header = Some((number(k)?, number(f)?));
                }
                [v, c] => {
                    let Some((k, _)) = header else {
                        return Err(Error::parse(line_no, "vertex line before header"));
                    };
                    let (v, c) = (number(v)?, number(c)?);
                    if v == 0 {
                        return Err(Error::parse(line_no, "vertex ids are 1-based"));
                    }
                    if c == 0 || c > k {
                        return Err(Error::parse(line_no, format!("color {c} outside 1..{k}")));
                    }
                    if entries.len() < v {
                        entries.resize(v, None);
                    }
                    if entries[v - 1].replace(c - 1).is_some() {
                        return Err(Error::parse(line_no, format!("vertex {v} colored twice")));
                    }
                }
                _ => return Err(Error::parse(line_no, format!("unrecognised line `{line}`"))),
            }
        }
        let Some((k, objective)) = header else {
            return Err(Error::parse(0, "missing `s k f` header"));
        };
        let color_of = entries
            .into_iter()
            .enumerate()
            .map(|(v, c)| {
                c.ok_or_else(|| Error::parse(0, format!("vertex {} has no color", v + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            k,
            objective,
            color_of,
        })
    }
}
