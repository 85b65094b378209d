//! Simple undirected graphs, DIMACS `.col` I/O and the Kneser generator.
//!
//! Vertices are `0..n` internally. The DIMACS boundary is 1-based and converts
//! exactly once, in [`Graph::parse_dimacs`] and [`Graph::to_dimacs`].

use std::fmt::Write as _;
use std::io::Read;

use crate::error::{Error, Result};

/// Immutable simple undirected graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    m: usize,
    /// Sorted neighbor lists.
    adjacency: Vec<Vec<usize>>,
    /// Row-major `n x n` bit matrix for constant-time adjacency tests.
    matrix: Vec<u64>,
    words_per_row: usize,
}

impl Graph {
    /// Builds a graph from 0-based edges. Duplicates and mirrored pairs collapse.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adjacency = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidParameters(format!(
                    "edge ({u}, {v}) out of range for {n} vertices"
                )));
            }
            if u == v {
                return Err(Error::InvalidParameters(format!("self-loop at vertex {u}")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        Ok(Self::from_adjacency(adjacency))
    }

    fn from_adjacency(mut adjacency: Vec<Vec<usize>>) -> Self {
        let n = adjacency.len();
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        let words_per_row = n.div_ceil(64);
        let mut matrix = vec![0u64; n * words_per_row];
        for (u, list) in adjacency.iter().enumerate() {
            for &v in list {
                matrix[u * words_per_row + v / 64] |= 1 << (v % 64);
            }
        }
        let m = adjacency.iter().map(Vec::len).sum::<usize>() / 2;
        Self {
            n,
            m,
            adjacency,
            matrix,
            words_per_row,
        }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_adjacency(vec![Vec::new(); n])
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Self::from_edges(n, edges).expect("complete graph edges are valid")
    }

    pub fn cycle(n: usize) -> Self {
        let edges = (0..n).map(|u| (u, (u + 1) % n));
        Self::from_edges(n, edges).expect("cycle edges are valid")
    }

    /// Parses DIMACS `.col` text.
    ///
    /// Accepts `c` comment lines, exactly one `p edge <n> <m>` line (the
    /// format word `col` is accepted too) and `e <u> <v>` lines with 1-based
    /// ids. The edge count on the problem line is not checked against the
    /// edge lines.
    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut adjacency: Vec<Vec<usize>> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let mut tokens = line.split_whitespace();
            match tokens.next() {
                Some("c") => {}
                Some("p") => {
                    if n.is_some() {
                        return Err(Error::parse(line_no, "duplicate problem line"));
                    }
                    match tokens.next() {
                        Some("edge" | "col" | "edges") => {}
                        other => {
                            return Err(Error::parse(
                                line_no,
                                format!("expected `p edge`, found format {other:?}"),
                            ))
                        }
                    }
                    let count = parse_number(tokens.next(), line_no, "vertex count")?;
                    parse_number(tokens.next(), line_no, "edge count")?;
                    expect_end(tokens, line_no)?;
                    n = Some(count);
                    adjacency = vec![Vec::new(); count];
                }
                Some("e") => {
                    let Some(count) = n else {
                        return Err(Error::parse(line_no, "edge line before problem line"));
                    };
                    let u = parse_number(tokens.next(), line_no, "edge endpoint")?;
                    let v = parse_number(tokens.next(), line_no, "edge endpoint")?;
                    expect_end(tokens, line_no)?;
                    for id in [u, v] {
                        if id == 0 || id > count {
                            return Err(Error::parse(
                                line_no,
                                format!("vertex {id} outside 1..{count}"),
                            ));
                        }
                    }
                    if u == v {
                        return Err(Error::parse(line_no, format!("self-loop on vertex {u}")));
                    }
                    adjacency[u - 1].push(v - 1);
                    adjacency[v - 1].push(u - 1);
                }
                Some(other) => {
                    return Err(Error::parse(
                        line_no,
                        format!("unknown line type `{other}`"),
                    ))
                }
                None => unreachable!("blank lines are skipped"),
            }
        }

        if n.is_none() {
            return Err(Error::parse(0, "missing problem line"));
        }
        Ok(Self::from_adjacency(adjacency))
    }

    pub fn read_dimacs<R: Read>(mut reader: R) -> Result<Self> {
        let mut text = String::new();
        reader.read_to_string(&mut text)?;
        Self::parse_dimacs(&text)
    }

    /// Serializes as DIMACS `.col`, edges sorted by `(u, v)` with `u < v`, 1-based.
    pub fn to_dimacs(&self) -> String {
        let mut out = String::with_capacity(16 + self.m * 12);
        writeln!(out, "p edge {} {}", self.n, self.m).unwrap();
        for (u, v) in self.edges() {
            writeln!(out, "e {} {}", u + 1, v + 1).unwrap();
        }
        out
    }

    /// Kneser graph K(a, b): vertices are the `b`-subsets of `{1..a}` in
    /// lexicographic order, adjacent iff disjoint.
    pub fn kneser(a: usize, b: usize) -> Result<Self> {
        if b == 0 || b > a {
            return Err(Error::InvalidParameters(format!(
                "kneser graph needs 1 <= b <= a, got a={a}, b={b}"
            )));
        }
        if a > 64 {
            return Err(Error::InvalidParameters(format!(
                "kneser graph ground set of {a} elements exceeds 64"
            )));
        }
        let subsets = lex_subsets(a, b);
        let n = subsets.len();
        let mut adjacency = vec![Vec::new(); n];
        for i in 0..n {
            for j in i + 1..n {
                if subsets[i] & subsets[j] == 0 {
                    adjacency[i].push(j);
                    adjacency[j].push(i);
                }
            }
        }
        Ok(Self::from_adjacency(adjacency))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    #[inline]
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.matrix[u * self.words_per_row + v / 64] >> (v % 64) & 1 == 1
    }

    /// Maximum degree; 0 for edgeless (and empty) graphs.
    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }
}

fn parse_number(token: Option<&str>, line: usize, what: &str) -> Result<usize> {
    let token = token.ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    token
        .parse()
        .map_err(|_| Error::parse(line, format!("malformed {what} `{token}`")))
}

fn expect_end<'a>(mut tokens: impl Iterator<Item = &'a str>, line: usize) -> Result<()> {
    match tokens.next() {
        None => Ok(()),
        Some(extra) => Err(Error::parse(line, format!("unexpected token `{extra}`"))),
    }
}

/// All `b`-subsets of `{0..a}` as bitmasks, in lexicographic order of their
/// sorted element lists.
fn lex_subsets(a: usize, b: usize) -> Vec<u64> {
    let mut out = Vec::new();
    let mut combo: Vec<usize> = (0..b).collect();
    loop {
        out.push(combo.iter().fold(0u64, |acc, &x| acc | 1 << x));
        // advance to the next combination
        let Some(pos) = (0..b).rev().find(|&i| combo[i] < a - b + i) else {
            return out;
        };
        combo[pos] += 1;
        for i in pos + 1..b {
            combo[i] = combo[i - 1] + 1;
        }
    }
}
