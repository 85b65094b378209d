//! Initial-solution builders.
//!
//! All three share one placement loop: with `q = n / k` and `r = n % k`, a
//! class may grow to `q + 1` only while fewer than `r` classes have reached
//! that size, otherwise it is capped at `q`. Each vertex goes to the
//! lowest-index open class holding none of its neighbors, or to a uniformly
//! random open class when every open class already holds one.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::Partition;
use crate::rng::SeededRng;

/// Builds an equitable `k`-partition from scratch, or completes `partial`
/// (one optional class per vertex) when given. Unassigned vertices are placed
/// in uniformly random order.
pub fn procedure1<'g>(
    graph: &'g Graph,
    k: usize,
    rng: &mut SeededRng,
    partial: Option<&[Option<usize>]>,
) -> Result<Partition<'g>> {
    let n = graph.n();
    check_k(n, k)?;
    let mut assignment = match partial {
        Some(p) if p.len() != n => {
            return Err(Error::InvalidParameters(format!(
                "partial assignment covers {} vertices, graph has {n}",
                p.len()
            )))
        }
        Some(p) => p.to_vec(),
        None => vec![None; n],
    };
    let mut order: Vec<usize> = (0..n).filter(|&v| assignment[v].is_none()).collect();
    rng.shuffle(&mut order);
    place(graph, k, &mut assignment, &order, rng)?;
    let colors = assignment
        .into_iter()
        .map(|c| c.expect("all placed"))
        .collect();
    Partition::from_assignment(graph, k, colors)
}

/// Builds an equitable `k`-partition from a proper equitable `(k+1)`-coloring:
/// `k` of its classes, chosen and ordered by a random permutation, are kept
/// intact and the vertices of the remaining class are re-placed.
pub fn procedure2<'g>(
    graph: &'g Graph,
    k: usize,
    prev: &Partition<'_>,
    rng: &mut SeededRng,
) -> Result<Partition<'g>> {
    let n = graph.n();
    check_k(n, k)?;
    if prev.n() != n || prev.k() != k + 1 {
        return Err(Error::InvalidParameters(format!(
            "previous coloring has {} classes over {} vertices, expected {} over {n}",
            prev.k(),
            prev.n(),
            k + 1
        )));
    }
    if !crate::partition::verify_eqcol(graph, prev.k(), prev.colors()) {
        return Err(Error::NotAnEqcol(format!(
            "previous partition is not a proper equitable {}-coloring",
            k + 1
        )));
    }

    let mut perm: Vec<usize> = (0..=k).collect();
    rng.shuffle(&mut perm);
    // new class of each old class; the last slot of `perm` is dissolved
    let mut renamed = vec![None; k + 1];
    for (new, &old) in perm[..k].iter().enumerate() {
        renamed[old] = Some(new);
    }
    let partial: Vec<Option<usize>> = prev.colors().iter().map(|&c| renamed[c]).collect();
    procedure1(graph, k, rng, Some(&partial))
}

/// First proper equitable coloring by escalating `k`.
///
/// Vertices are visited by decreasing degree (ties by index). Starting from
/// the color count of a plain first-fit coloring in that order, the placement
/// loop is run for `k, k + 1, ...` until it yields no conflicts; `k = n`
/// always succeeds.
pub fn naive<'g>(graph: &'g Graph, rng: &mut SeededRng) -> Result<Partition<'g>> {
    let n = graph.n();
    if n == 0 {
        return Err(Error::InvalidParameters("graph has no vertices".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(graph.degree(v)), v));

    let start = first_fit_colors(graph, &order);
    for k in start..=n {
        let mut assignment = vec![None; n];
        place(graph, k, &mut assignment, &order, rng)?;
        let colors = assignment
            .into_iter()
            .map(|c| c.expect("all placed"))
            .collect();
        let partition = Partition::from_assignment(graph, k, colors)?;
        if partition.objective() == 0 {
            return Ok(partition);
        }
    }
    unreachable!("singleton classes are always a proper coloring")
}

/// Number of colors used by greedy first-fit in `order`.
fn first_fit_colors(graph: &Graph, order: &[usize]) -> usize {
    let n = graph.n();
    let mut color: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![usize::MAX; n + 1];
    let mut used = 0;
    for &v in order {
        for &w in graph.neighbors(v) {
            if let Some(c) = color[w] {
                seen[c] = v;
            }
        }
        let c = (0..).find(|&c| seen[c] != v).unwrap();
        color[v] = Some(c);
        used = used.max(c + 1);
    }
    used
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::InvalidParameters(format!(
            "number of classes {k} must lie in 1..={n}"
        )));
    }
    Ok(())
}

/// Places the vertices of `order` into `assignment`, respecting the size caps.
fn place(
    graph: &Graph,
    k: usize,
    assignment: &mut [Option<usize>],
    order: &[usize],
    rng: &mut SeededRng,
) -> Result<()> {
    let n = graph.n();
    let (q, r) = (n / k, n % k);
    let mut sizes = vec![0usize; k];
    for &c in assignment.iter().flatten() {
        if c >= k {
            return Err(Error::InvalidParameters(format!("class {c} out of range")));
        }
        sizes[c] += 1;
    }
    let cap = if r == 0 { q } else { q + 1 };
    if let Some(&too_big) = sizes.iter().find(|&&s| s > cap) {
        return Err(Error::InvalidParameters(format!(
            "partial class of size {too_big} exceeds the cap {cap}"
        )));
    }
    // number of classes currently holding q + 1 vertices
    let mut full = sizes.iter().filter(|&&s| s == q + 1).count();
    if full > r {
        return Err(Error::InvalidParameters(format!(
            "{full} partial classes hold {} vertices, at most {r} may",
            q + 1
        )));
    }

    // `blocked[c] == v` marks class c as holding a neighbor of v
    let mut blocked = vec![usize::MAX; k];
    let mut open = Vec::with_capacity(k);
    for &v in order {
        let limit = if full < r { q + 1 } else { q };
        for &w in graph.neighbors(v) {
            if let Some(c) = assignment[w] {
                blocked[c] = v;
            }
        }
        open.clear();
        open.extend((0..k).filter(|&c| sizes[c] < limit));
        let class = match open.iter().find(|&&c| blocked[c] != v) {
            Some(&c) => c,
            None => open[rng.below(open.len())],
        };
        assignment[v] = Some(class);
        sizes[class] += 1;
        if sizes[class] == q + 1 {
            full += 1;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_equitable(p: &Partition<'_>) -> bool {
        let sizes = p.class_sizes();
        sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1
    }

    #[test]
    fn procedure1_edgeless() {
        let g = Graph::empty(4);
        for seed in 0..20 {
            let p = procedure1(&g, 2, &mut SeededRng::new(seed), None).unwrap();
            assert_eq!(p.class_sizes(), &[2, 2]);
            assert_eq!(p.objective(), 0);
        }
    }

    #[test]
    fn procedure1_k4() {
        let g = Graph::complete(4);
        for seed in 0..20 {
            let p = procedure1(&g, 2, &mut SeededRng::new(seed), None).unwrap();
            assert_eq!(p.class_sizes(), &[2, 2]);
            assert_eq!(p.objective(), 2);
            let p = procedure1(&g, 4, &mut SeededRng::new(seed), None).unwrap();
            assert_eq!(p.class_sizes(), &[1, 1, 1, 1]);
            assert_eq!(p.objective(), 0);
        }
    }

    #[test]
    fn procedure1_rejects_bad_input() {
        let g = Graph::empty(4);
        let mut rng = SeededRng::new(1);
        assert!(procedure1(&g, 0, &mut rng, None).is_err());
        assert!(procedure1(&g, 5, &mut rng, None).is_err());
        // class 0 already holds 3 > ceil(4/2)
        let partial = [Some(0), Some(0), Some(0), None];
        assert!(procedure1(&g, 2, &mut rng, Some(&partial)).is_err());
        // n=7, k=3: only one class may reach size 3
        let g7 = Graph::empty(7);
        let partial = [Some(0), Some(0), Some(0), Some(1), Some(1), Some(1), None];
        assert!(procedure1(&g7, 3, &mut rng, Some(&partial)).is_err());
        let g5 = Graph::empty(5);
        let partial = [Some(0), Some(0), Some(0), None, None];
        let p = procedure1(&g5, 2, &mut rng, Some(&partial)).unwrap();
        assert_eq!(p.class_sizes(), &[3, 2]);
    }

    #[test]
    fn procedure1_keeps_partial() {
        let g = Graph::cycle(7);
        let partial = [Some(2), None, None, Some(0), None, None, None];
        for seed in 0..10 {
            let p = procedure1(&g, 3, &mut SeededRng::new(seed), Some(&partial)).unwrap();
            assert_eq!(p.color_of(0), 2);
            assert_eq!(p.color_of(3), 0);
            assert!(is_equitable(&p));
        }
    }

    #[test]
    fn procedure2_c5() {
        let g = Graph::cycle(5);
        let prev = Partition::from_assignment(&g, 3, vec![0, 1, 0, 1, 2]).unwrap();
        for seed in 0..30 {
            let p = procedure2(&g, 2, &prev, &mut SeededRng::new(seed)).unwrap();
            let mut sizes = p.class_sizes().to_vec();
            sizes.sort_unstable();
            assert_eq!(sizes, vec![2, 3]);
            assert!(p.objective() >= 1);
        }
    }

    #[test]
    fn procedure2_edgeless_and_k4() {
        let g = Graph::empty(6);
        let prev = Partition::from_assignment(&g, 3, vec![0, 0, 1, 1, 2, 2]).unwrap();
        let p = procedure2(&g, 2, &prev, &mut SeededRng::new(4)).unwrap();
        assert_eq!(p.class_sizes(), &[3, 3]);
        assert_eq!(p.objective(), 0);

        let k4 = Graph::complete(4);
        let prev = Partition::from_assignment(&k4, 4, vec![0, 1, 2, 3]).unwrap();
        for seed in 0..10 {
            let p = procedure2(&k4, 3, &prev, &mut SeededRng::new(seed)).unwrap();
            let mut sizes = p.class_sizes().to_vec();
            sizes.sort_unstable();
            assert_eq!(sizes, vec![1, 1, 2]);
            assert_eq!(p.objective(), 1);
        }
    }

    #[test]
    fn procedure2_rejects_improper_prev() {
        let g = Graph::cycle(5);
        let improper = Partition::from_assignment(&g, 3, vec![0, 0, 1, 1, 2]).unwrap();
        assert!(matches!(
            procedure2(&g, 2, &improper, &mut SeededRng::new(0)),
            Err(Error::NotAnEqcol(_))
        ));
        let wrong_k = Partition::from_assignment(&g, 2, vec![0, 0, 0, 1, 1]).unwrap();
        assert!(procedure2(&g, 2, &wrong_k, &mut SeededRng::new(0)).is_err());
    }

    #[test]
    fn naive_examples() {
        let mut rng = SeededRng::new(0);
        let edgeless = Graph::empty(6);
        assert_eq!(naive(&edgeless, &mut rng).unwrap().k(), 1);

        let k4 = Graph::complete(4);
        assert_eq!(naive(&k4, &mut rng).unwrap().k(), 4);

        let c5 = Graph::cycle(5);
        let p = naive(&c5, &mut rng).unwrap();
        assert_eq!(p.k(), 3);
        assert!(p.verify_eqcol());
    }

    #[test]
    fn naive_is_deterministic_per_seed() {
        let g = Graph::kneser(7, 2).unwrap();
        let a = naive(&g, &mut SeededRng::new(9)).unwrap();
        let b = naive(&g, &mut SeededRng::new(9)).unwrap();
        assert_eq!(a.colors(), b.colors());
        assert!(a.verify_eqcol());
    }

    #[test]
    fn first_fit_counts() {
        let order: Vec<usize> = (0..5).collect();
        assert_eq!(first_fit_colors(&Graph::cycle(5), &order), 3);
        assert_eq!(first_fit_colors(&Graph::complete(4), &order[..4]), 4);
        assert_eq!(first_fit_colors(&Graph::empty(5), &order), 1);
    }
}
