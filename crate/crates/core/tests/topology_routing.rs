use std::collections::BTreeSet;

use hetnet::routing::{self, build_routes, LinkKind};
use hetnet::topology::{HetNetTopology, Point, TopologyParams, WiredLink, CELL_COUNT};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn cell_counts_are_multinomial() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let n = 10_000;
    let t = HetNetTopology::<f64>::generate(n, &mut rng, TopologyParams::default()).unwrap();
    let mut counts = [0usize; CELL_COUNT];
    for node in t.nodes() {
        counts[node.cell] += 1;
    }
    let p = 1.0 / CELL_COUNT as f64;
    let mean = n as f64 * p;
    let sigma = (n as f64 * p * (1.0 - p)).sqrt();
    for c in counts {
        assert!((c as f64 - mean).abs() < 5.0 * sigma, "{counts:?}");
    }
}

/// Adjacency from first principles: distance, explicit wires, backbone.
fn oracle_adjacent(t: &HetNetTopology<f64>, a: usize, b: usize) -> bool {
    if a == b {
        return false;
    }
    let wifi = t.distance(a, b) <= t.params().wifi_range;
    let wired = t
        .wired_links()
        .iter()
        .any(|l| (l.a, l.b) == (a, b) || (l.a, l.b) == (b, a));
    let backbone = t.node(a).has_backbone && t.node(b).has_backbone;
    wifi || wired || backbone
}

/// Every simple path from `s` to `d`, by exhaustive depth-first search.
fn all_paths(t: &HetNetTopology<f64>, s: usize, d: usize) -> Vec<Vec<usize>> {
    fn go(t: &HetNetTopology<f64>, path: &mut Vec<usize>, d: usize, out: &mut Vec<Vec<usize>>) {
        let u = *path.last().unwrap();
        if u == d {
            out.push(path.clone());
            return;
        }
        for v in 0..t.len() {
            if !path.contains(&v) && oracle_adjacent(t, u, v) {
                path.push(v);
                go(t, path, d, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(t, &mut vec![s], d, &mut out);
    out
}

fn small_topology(seed: u64) -> HetNetTopology<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=8);
    let pos: Vec<Point<f64>> = (0..n)
        .map(|_| Point::new(rng.random_range(0.0..300.0), rng.random_range(0.0..120.0)))
        .collect();
    let backbone: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.15)).collect();
    let wired: Vec<WiredLink<f64>> = (0..rng.random_range(0..2))
        .filter_map(|_| {
            let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
            (a != b).then_some(WiredLink { a, b, rate: 1.0 })
        })
        .collect();
    HetNetTopology::from_positions(TopologyParams::default(), pos, None, &backbone, wired).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bfs_matches_path_enumeration(seed in any::<u64>()) {
        let t = small_topology(seed);
        let routes = build_routes(&t);
        for s in 0..t.len() {
            for d in 0..t.len() {
                let paths = all_paths(&t, s, d);
                let shortest = paths.iter().map(|p| p.len() as u32 - 1).min();
                prop_assert_eq!(routes.distance(s, d), shortest, "{} -> {}", s, d);
            }
        }
    }

    #[test]
    fn route_membership_matches_enumeration(seed in any::<u64>()) {
        let t = small_topology(seed);
        let routes = build_routes(&t);
        for s in 0..t.len() {
            for d in 0..t.len() {
                let paths = all_paths(&t, s, d);
                let Some(best) = paths.iter().map(|p| p.len()).min() else {
                    continue;
                };
                let on: BTreeSet<usize> = paths.iter().filter(|p| p.len() == best).flatten().copied().collect();
                for n in 0..t.len() {
                    prop_assert_eq!(routes.on_route(n, s, d), on.contains(&n));
                }
                // next hops are exactly the second nodes of shortest paths
                let firsts: BTreeSet<usize> =
                    paths.iter().filter(|p| p.len() == best && p.len() > 1).map(|p| p[1]).collect();
                let hops: BTreeSet<usize> = routes.next_hops(&t, s, d).iter().map(|h| h.node).collect();
                prop_assert_eq!(hops, firsts);
            }
        }
    }

    #[test]
    fn wifi_only_bfs_ignores_wires(seed in any::<u64>()) {
        let t = small_topology(seed);
        for s in 0..t.len() {
            let d = routing::bfs(&t, s, true);
            for (v, &h) in d.iter().enumerate() {
                if h == 1 {
                    prop_assert!(t.distance(s, v) <= t.params().wifi_range);
                }
            }
        }
    }

    #[test]
    fn protocol_model_is_the_guard_inequality(
        pts in proptest::collection::vec((0.0f64..400.0, 0.0f64..400.0), 3..8),
        delta in 0.0f64..1.0,
    ) {
        let params = TopologyParams { delta, ..Default::default() };
        let pos: Vec<Point<f64>> = pts.iter().map(|&(x, y)| Point::new(x, y)).collect();
        let t = HetNetTopology::from_positions(params, pos, None, &[], Vec::new()).unwrap();
        let others: Vec<usize> = (2..t.len()).collect();
        let link = t.distance(0, 1);
        match t.protocol_model_ok(0, 1, &others) {
            Ok(ok) => {
                prop_assert!(link <= 100.0);
                let want = others.iter().all(|&k| t.distance(1, k) >= (1.0 + delta) * link);
                prop_assert_eq!(ok, want);
            }
            Err(_) => prop_assert!(link > 100.0),
        }
    }
}

#[test]
fn backbone_hops_are_labelled() {
    let pos = vec![Point::new(0.0, 0.0), Point::new(900.0, 0.0), Point::new(990.0, 0.0)];
    let t = HetNetTopology::from_positions(TopologyParams::default(), pos, None, &[0, 1], Vec::new()).unwrap();
    let routes = build_routes(&t);
    assert_eq!(routes.distance(0, 2), Some(2));
    let hops = routes.next_hops(&t, 0, 2);
    assert_eq!(hops.len(), 1);
    assert_eq!(hops[0].kind, LinkKind::Backbone);
}
