use std::collections::BTreeSet;

use eqcol_core::construct::{naive, procedure1, procedure2};
use eqcol_core::driver::brute_force_chi_eq;
use eqcol_core::partition::verify_eqcol;
use eqcol_core::tabu::{neighborhood, tabu_eqcol_observed, Move, StopCondition, TenureParams};
use eqcol_core::{Graph, Partition, SeededRng};
use proptest::prelude::*;

fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = SeededRng::new(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.unit() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

/// Independent recount of every cached quantity.
fn assert_caches_consistent(g: &Graph, s: &Partition<'_>) {
    let colors = s.colors();
    let f = g.edges().filter(|&(u, v)| colors[u] == colors[v]).count();
    assert_eq!(s.objective(), f);
    for v in 0..g.n() {
        for c in 0..s.k() {
            let tally = g.neighbors(v).iter().filter(|&&w| colors[w] == c).count();
            assert_eq!(s.conflicts().get(v, c), tally);
        }
    }
    let conflicting: Vec<usize> = (0..g.n())
        .filter(|&v| g.neighbors(v).iter().any(|&w| colors[w] == colors[v]))
        .collect();
    assert_eq!(s.conflicting_set(), conflicting);
    let mut sizes = vec![0; s.k()];
    for &c in colors {
        sizes[c] += 1;
    }
    assert_eq!(s.class_sizes(), sizes.as_slice());
}

fn assert_equitable(s: &Partition<'_>) {
    let sizes = s.class_sizes();
    assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    assert_eq!(s.equity_sets().0.len(), s.n() % s.k());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_moves_keep_caches_exact(
        n in 4usize..24,
        p in 0.1f64..0.8,
        seed in any::<u64>(),
        k_frac in 0.0f64..1.0,
        steps in 1usize..80,
    ) {
        let g = random_graph(n, p, seed);
        let k = 1 + ((n - 1) as f64 * k_frac) as usize;
        let mut rng = SeededRng::new(seed ^ 0x5eed);
        let mut s = procedure1(&g, k, &mut rng, None).unwrap();
        assert_caches_consistent(&g, &s);
        for _ in 0..steps {
            let (plus, minus) = s.equity_sets();
            let before = s.objective() as i64;
            if !plus.is_empty() && rng.below(2) == 0 {
                let from = plus[rng.below(plus.len())];
                let members = s.class_members(from);
                let v = members[rng.below(members.len())];
                let to = minus[rng.below(minus.len())];
                let predicted = s.delta_1move(v, to).unwrap();
                s.apply_1move(v, to).unwrap();
                prop_assert_eq!(s.objective() as i64 - before, predicted);
            } else if k > 1 {
                let v = rng.below(n);
                let others: Vec<usize> = (0..n).filter(|&u| s.color_of(u) != s.color_of(v)).collect();
                let u = others[rng.below(others.len())];
                let predicted = s.delta_2exchange(v, u).unwrap();
                s.apply_2exchange(v, u).unwrap();
                prop_assert_eq!(s.objective() as i64 - before, predicted);
            }
            assert_equitable(&s);
        }
        assert_caches_consistent(&g, &s);
    }

    #[test]
    fn double_exchange_restores(n in 3usize..16, p in 0.1f64..0.9, seed in any::<u64>()) {
        let g = random_graph(n, p, seed);
        let mut rng = SeededRng::new(seed);
        let s0 = procedure1(&g, 2, &mut rng, None).unwrap();
        let v = rng.below(n);
        let u = (0..n).find(|&u| s0.color_of(u) != s0.color_of(v)).unwrap();
        let mut s = s0.clone();
        s.apply_2exchange(v, u).unwrap();
        s.apply_2exchange(v, u).unwrap();
        prop_assert_eq!(s.colors(), s0.colors());
        prop_assert_eq!(s.objective(), s0.objective());
        prop_assert_eq!(s.conflicts(), s0.conflicts());
    }

    #[test]
    fn objective_zero_iff_no_conflicts(n in 2usize..14, p in 0.0f64..0.6, seed in any::<u64>(), k in 1usize..6) {
        let g = random_graph(n, p, seed);
        let k = k.min(n);
        let s = procedure1(&g, k, &mut SeededRng::new(seed), None).unwrap();
        prop_assert_eq!(s.objective() == 0, s.conflicting_set().is_empty());
        prop_assert_eq!(s.objective() == 0, s.verify_eqcol());
        assert_equitable(&s);
    }

    #[test]
    fn procedure2_keeps_surviving_classes(n in 4usize..30, p in 0.05f64..0.5, seed in any::<u64>()) {
        let g = random_graph(n, p, seed);
        let mut rng = SeededRng::new(seed);
        let prev = naive(&g, &mut rng).unwrap();
        prop_assume!(prev.k() >= 2);
        let next = procedure2(&g, prev.k() - 1, &prev, &mut rng).unwrap();
        assert_equitable(&next);
        // some old class was dissolved; every other old class maps onto its
        // own new class
        let mut image: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); prev.k()];
        for v in 0..n {
            image[prev.color_of(v)].insert(next.color_of(v));
        }
        let renaming_without = |dissolved: usize| {
            let targets: Vec<usize> = (0..prev.k())
                .filter(|&c| c != dissolved)
                .map(|c| if image[c].len() == 1 { *image[c].first().unwrap() } else { usize::MAX })
                .collect();
            let distinct: BTreeSet<usize> = targets.iter().copied().collect();
            !targets.contains(&usize::MAX) && distinct.len() == targets.len()
        };
        prop_assert!((0..prev.k()).any(renaming_without));
    }
}

#[test]
fn naive_colorings_are_proper_and_equitable() {
    for seed in 0..40 {
        let g = random_graph(
            10 + (seed as usize % 40),
            0.1 + 0.02 * (seed % 30) as f64,
            seed,
        );
        let s = naive(&g, &mut SeededRng::new(seed)).unwrap();
        assert!(verify_eqcol(&g, s.k(), s.colors()));
    }
    let kneser = Graph::kneser(9, 4).unwrap();
    assert!(naive(&kneser, &mut SeededRng::new(0))
        .unwrap()
        .verify_eqcol());
}

type MoveSet = BTreeSet<(usize, usize)>;

/// Brute-force neighborhood: every equity-preserving relocation of a
/// conflicting vertex, and every unordered pair of differently colored
/// vertices at least one of which is conflicting.
fn brute_neighborhood(g: &Graph, s: &Partition<'_>) -> (MoveSet, MoveSet) {
    let colors = s.colors();
    let n = g.n();
    let conflicting = |v: usize| g.neighbors(v).iter().any(|&w| colors[w] == colors[v]);
    let mut relocations = BTreeSet::new();
    for v in (0..n).filter(|&v| conflicting(v)) {
        for to in 0..s.k() {
            if to == colors[v] {
                continue;
            }
            let mut sizes = vec![0i64; s.k()];
            for &c in colors {
                sizes[c] += 1;
            }
            sizes[colors[v]] -= 1;
            sizes[to] += 1;
            if sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1 {
                relocations.insert((v, to));
            }
        }
    }
    let mut swaps = BTreeSet::new();
    for v in 0..n {
        for u in v + 1..n {
            if colors[u] != colors[v] && (conflicting(u) || conflicting(v)) {
                swaps.insert((v, u));
            }
        }
    }
    (relocations, swaps)
}

#[test]
fn neighborhood_matches_brute_force() {
    for seed in 0..300u64 {
        let n = 3 + (seed as usize % 6);
        let g = random_graph(n, [0.3, 0.5, 0.7][seed as usize % 3], seed);
        let mut rng = SeededRng::new(seed);
        let k = 1 + rng.below(n);
        let s = procedure1(&g, k, &mut rng, None).unwrap();
        let (relocations, swaps) = brute_neighborhood(&g, &s);

        let moves = neighborhood(&s);
        let mut got_relocations = BTreeSet::new();
        let mut got_swaps = BTreeSet::new();
        for m in &moves {
            match m.mv {
                Move::Relocate { vertex, to } => {
                    assert!(got_relocations.insert((vertex, to)), "duplicate relocation");
                }
                Move::Swap { vertex, other } => {
                    assert!(s.is_conflicting(vertex));
                    let pair = (vertex.min(other), vertex.max(other));
                    assert!(got_swaps.insert(pair), "pair {pair:?} enumerated twice");
                }
            }
        }
        assert_eq!(got_relocations, relocations, "seed {seed}");
        assert_eq!(got_swaps, swaps, "seed {seed}");

        // every enumerated delta agrees with a recount
        for m in &moves {
            let mut colors = s.colors().to_vec();
            match m.mv {
                Move::Relocate { vertex, to } => colors[vertex] = to,
                Move::Swap { vertex, other } => colors.swap(vertex, other),
            }
            let f = g.edges().filter(|&(a, b)| colors[a] == colors[b]).count() as i64;
            assert_eq!(f - s.objective() as i64, m.delta);
        }
    }
}

#[test]
fn identical_seeds_give_identical_traces() {
    let g = random_graph(40, 0.3, 17);
    let run = |seed: u64| {
        let mut rng = SeededRng::new(seed);
        let s0 = procedure1(&g, 5, &mut rng, None).unwrap();
        let mut trace = Vec::new();
        let result = tabu_eqcol_observed(
            s0,
            TenureParams::default(),
            StopCondition::iterations(400),
            &mut rng,
            |step| trace.push(*step),
        )
        .unwrap();
        (
            trace,
            result.best.colors().to_vec(),
            result.best_objective,
            result.iterations_run,
        )
    };
    assert_eq!(run(5), run(5));
    assert_ne!(run(5).0, run(6).0);
}

#[test]
fn zero_tenure_never_blocks() {
    // with tenure 0 every step is a steepest-descent step over the full neighborhood
    let g = random_graph(30, 0.3, 3);
    let mut rng = SeededRng::new(3);
    let s0 = procedure1(&g, 4, &mut rng, None).unwrap();
    let params = TenureParams::new(0.0, 1).unwrap();
    let mut replay = s0.clone();
    tabu_eqcol_observed(
        s0,
        params,
        StopCondition::iterations(200),
        &mut rng,
        |step| {
            assert_eq!(step.tenure, 0);
            let min = neighborhood(&replay).iter().map(|m| m.delta).min().unwrap();
            assert_eq!(step.delta, min, "iteration {}", step.iteration);
            match step.mv {
                Move::Relocate { vertex, to } => replay.apply_1move(vertex, to).unwrap(),
                Move::Swap { vertex, other } => replay.apply_2exchange(vertex, other).unwrap(),
            }
        },
    )
    .unwrap();
}

#[test]
fn brute_force_respects_degree_bound() {
    for seed in 0..60u64 {
        let n = 2 + (seed as usize % 9);
        let g = random_graph(n, [0.3, 0.5, 0.7][seed as usize % 3], seed);
        let chi = brute_force_chi_eq(&g).unwrap();
        assert!(chi <= g.max_degree() + 1, "seed {seed}");
    }
}

#[test]
fn dimacs_round_trip() {
    for seed in 0..20u64 {
        let g = random_graph(1 + seed as usize, 0.4, seed);
        let again = Graph::parse_dimacs(&g.to_dimacs()).unwrap();
        assert_eq!(again, g);
    }
}

#[test]
fn kneser_degrees_match_binomials() {
    fn choose(n: usize, k: usize) -> usize {
        if k > n {
            return 0;
        }
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }
    for a in 1..=9 {
        for b in 1..=a {
            let g = Graph::kneser(a, b).unwrap();
            assert_eq!(g.n(), choose(a, b));
            let d = if a >= b { choose(a - b, b) } else { 0 };
            assert!((0..g.n()).all(|v| g.degree(v) == d), "K({a},{b})");
        }
    }
}
