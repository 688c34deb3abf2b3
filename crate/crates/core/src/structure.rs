//! Components, k-core shells, bridges and the degree-preserving null model.

use std::collections::{HashSet, VecDeque};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::graph::{NodeIx, Weight, WeightedNetwork};

/// Connected components as sorted node lists, largest first. Components of
/// equal size are ordered by their smallest node index.
pub fn connected_components(net: &WeightedNetwork) -> Vec<Vec<NodeIx>> {
    let n = net.node_count();
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut comp = Vec::new();
        while let Some(v) = queue.pop_front() {
            comp.push(v);
            for &(w, _) in net.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    comps
}

pub fn is_connected(net: &WeightedNetwork) -> bool {
    net.node_count() > 0 && connected_components(net).len() == 1
}

/// N_c / N; zero for an empty network.
pub fn lcc_fraction(net: &WeightedNetwork) -> f64 {
    match connected_components(net).first() {
        Some(c) => c.len() as f64 / net.node_count() as f64,
        None => 0.0,
    }
}

/// Induced subgraph on the largest connected component, node order preserved.
pub fn largest_component(net: &WeightedNetwork) -> WeightedNetwork {
    match connected_components(net).first() {
        Some(c) => net.induced_subgraph(c),
        None => net.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoreDecomposition {
    /// Coreness per node index.
    pub shell_index: Vec<usize>,
    pub max_core: usize,
}

/// Coreness of every node by repeated removal of a minimum-degree vertex
/// (bucket queue, linear time). Weights are ignored.
pub fn k_core_decomposition(net: &WeightedNetwork) -> CoreDecomposition {
    let n = net.node_count();
    let mut degree = net.degrees();
    let max_deg = degree.iter().copied().max().unwrap_or(0);

    // Nodes sorted by degree, with bucket starts and each node's position.
    let mut bin = vec![0usize; max_deg + 1];
    for &d in &degree {
        bin[d] += 1;
    }
    let mut start = 0;
    for b in bin.iter_mut() {
        let count = *b;
        *b = start;
        start += count;
    }
    let mut pos = vec![0usize; n];
    let mut order = vec![0usize; n];
    for v in 0..n {
        pos[v] = bin[degree[v]];
        order[pos[v]] = v;
        bin[degree[v]] += 1;
    }
    for d in (1..=max_deg).rev() {
        bin[d] = bin[d - 1];
    }
    bin[0] = 0;

    for i in 0..n {
        let v = order[i];
        for &(u, _) in net.neighbors(v) {
            if degree[u] > degree[v] {
                let du = degree[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = order[pw];
                if u != w {
                    order.swap(pu, pw);
                    pos[u] = pw;
                    pos[w] = pu;
                }
                bin[du] += 1;
                degree[u] -= 1;
            }
        }
    }
    let max_core = degree.iter().copied().max().unwrap_or(0);
    CoreDecomposition { shell_index: degree, max_core }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BridgeReport {
    /// Edges whose removal disconnects their component, as `(u, v)` with `u < v`.
    pub bridges: Vec<(NodeIx, NodeIx)>,
    /// Edges whose endpoints have no common neighbor.
    pub local_bridges: Vec<(NodeIx, NodeIx)>,
}

pub fn bridges_and_local_bridges(net: &WeightedNetwork) -> BridgeReport {
    BridgeReport { bridges: bridges(net), local_bridges: local_bridges(net) }
}

fn local_bridges(net: &WeightedNetwork) -> Vec<(NodeIx, NodeIx)> {
    net.edges()
        .iter()
        .filter(|e| {
            let (a, b) = (net.neighbors(e.u), net.neighbors(e.v));
            // Both lists are sorted; merge-scan for a shared neighbor.
            let (mut i, mut j) = (0, 0);
            while i < a.len() && j < b.len() {
                match a[i].0.cmp(&b[j].0) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => return false,
                }
            }
            true
        })
        .map(|e| e.endpoints())
        .collect()
}

/// Tarjan low-link bridge finding, iterative so deep graphs don't overflow the stack.
fn bridges(net: &WeightedNetwork) -> Vec<(NodeIx, NodeIx)> {
    let n = net.node_count();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut timer = 0;
    let mut out = Vec::new();
    // (node, parent, next neighbor position)
    let mut stack: Vec<(NodeIx, NodeIx, usize)> = Vec::new();

    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        stack.push((root, usize::MAX, 0));
        while let Some(top) = stack.last_mut() {
            let (v, parent) = (top.0, top.1);
            if let Some(&(w, _)) = net.neighbors(v).get(top.2) {
                top.2 += 1;
                if w == parent {
                    continue;
                }
                if disc[w] == usize::MAX {
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    stack.push((w, v, 0));
                } else {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if parent != usize::MAX {
                    low[parent] = low[parent].min(low[v]);
                    if low[v] > disc[parent] {
                        out.push((parent.min(v), parent.max(v)));
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// How weights are assigned to rewired edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightMode {
    /// Each swapped edge keeps the weight it had before the swap.
    #[default]
    Carry,
    /// All weights reset to one.
    Unit,
}

#[derive(Debug, Clone, Serialize)]
pub struct RewireReport {
    #[serde(skip)]
    pub network: WeightedNetwork,
    pub attempted_swaps: u64,
    pub successful_swaps: u64,
    pub target_swaps: u64,
    pub rng_seed: u64,
    pub weight_mode: WeightMode,
    pub components_before: usize,
    pub components_after: usize,
    /// Set when the attempt cap was reached before the target swap count.
    pub hit_attempt_cap: bool,
}

pub const DEFAULT_SWAPS_PER_EDGE: f64 = 10.0;

/// Degree-preserving randomization by double-edge swaps.
///
/// Two distinct edges `{a,b}`, `{c,d}` are drawn uniformly with a random
/// orientation and replaced by `{a,d}`, `{c,b}`; a swap that would create a
/// self-loop or a parallel edge is rejected. Stops after
/// `swaps_per_edge * E` successful swaps or 100 times as many attempts.
pub fn rewire_degree_preserving(
    net: &WeightedNetwork,
    swaps_per_edge: f64,
    seed: u64,
    mode: WeightMode,
) -> RewireReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rewire_with_rng(net, swaps_per_edge, mode, &mut rng, seed)
}

pub(crate) fn rewire_with_rng<R: Rng>(
    net: &WeightedNetwork,
    swaps_per_edge: f64,
    mode: WeightMode,
    rng: &mut R,
    seed: u64,
) -> RewireReport {
    let m = net.edge_count();
    let target = (swaps_per_edge.max(0.0) * m as f64).round() as u64;
    let cap = target.saturating_mul(100);
    let components_before = connected_components(net).len();

    let mut edges: Vec<(NodeIx, NodeIx, Weight)> =
        net.edges().iter().map(|e| (e.u, e.v, if mode == WeightMode::Unit { 1 } else { e.weight })).collect();
    let key = |a: NodeIx, b: NodeIx| (a.min(b), a.max(b));
    let mut present: HashSet<(NodeIx, NodeIx)> = edges.iter().map(|&(a, b, _)| key(a, b)).collect();

    let mut attempted = 0u64;
    let mut successful = 0u64;
    if m >= 2 {
        while successful < target && attempted < cap {
            attempted += 1;
            let i = rng.random_range(0..m);
            let mut j = rng.random_range(0..m - 1);
            if j >= i {
                j += 1;
            }
            let (mut a, mut b, wi) = edges[i];
            let (mut c, mut d, wj) = edges[j];
            if rng.random::<bool>() {
                std::mem::swap(&mut a, &mut b);
            }
            if rng.random::<bool>() {
                std::mem::swap(&mut c, &mut d);
            }
            if a == d || c == b || present.contains(&key(a, d)) || present.contains(&key(c, b)) {
                continue;
            }
            present.remove(&key(a, b));
            present.remove(&key(c, d));
            present.insert(key(a, d));
            present.insert(key(c, b));
            edges[i] = (a, d, wi);
            edges[j] = (c, b, wj);
            successful += 1;
        }
    }

    let network = WeightedNetwork::new(net.nodes().to_vec(), edges).expect("swaps keep the graph simple");
    let components_after = connected_components(&network).len();
    if successful < target {
        log::warn!("rewiring stopped after {successful}/{target} swaps ({attempted} attempts)");
    }
    RewireReport {
        network,
        attempted_swaps: attempted,
        successful_swaps: successful,
        target_swaps: target,
        rng_seed: seed,
        weight_mode: mode,
        components_before,
        components_after,
        hit_attempt_cap: successful < target,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators::*;

    fn named(net: &WeightedNetwork, pairs: &[(NodeIx, NodeIx)]) -> Vec<(String, String)> {
        pairs.iter().map(|&(a, b)| (net.name(a).to_string(), net.name(b).to_string())).collect()
    }

    #[test]
    fn components_of_two_triangles() {
        let g = disjoint_cliques(2, 3);
        let comps = connected_components(&g);
        assert_eq!(comps.len(), 2);
        assert!(comps.iter().all(|c| c.len() == 3));
        assert_eq!(lcc_fraction(&g), 0.5);
        assert_eq!(lcc_fraction(&complete(4)), 1.0);
        assert!(is_connected(&cycle(5)));
    }

    #[test]
    fn largest_component_extracts_biggest() {
        let g = WeightedNetwork::from_named_edges(&[("a", "b", 1), ("c", "d", 1), ("d", "e", 2)]).unwrap();
        let lcc = largest_component(&g);
        assert_eq!(lcc.nodes(), &["c".to_string(), "d".into(), "e".into()]);
        assert_eq!(lcc.edge_count(), 2);
    }

    #[test]
    fn kcore_examples() {
        let k4 = k_core_decomposition(&complete(4));
        assert_eq!(k4.shell_index, vec![3; 4]);
        assert_eq!(k4.max_core, 3);
        let g =
            WeightedNetwork::from_named_edges(&[("a", "b", 1), ("b", "c", 1), ("a", "c", 1), ("c", "p", 1)]).unwrap();
        assert_eq!(k_core_decomposition(&g).shell_index, vec![2, 2, 2, 1]);
    }

    #[test]
    fn kcore_of_disjoint_cliques() {
        let g = disjoint_cliques(3, 6);
        assert!(k_core_decomposition(&g).shell_index.iter().all(|&c| c == 5));
    }

    #[test]
    fn bridge_examples() {
        let p = path(3);
        let r = bridges_and_local_bridges(&p);
        assert_eq!(r.bridges, vec![(0, 1), (1, 2)]);
        assert_eq!(r.local_bridges, vec![(0, 1), (1, 2)]);

        let t = complete(3);
        assert_eq!(bridges_and_local_bridges(&t), BridgeReport::default());

        let g = WeightedNetwork::from_named_edges(&[
            ("a", "b", 1),
            ("b", "c", 1),
            ("a", "c", 1),
            ("x", "y", 1),
            ("y", "z", 1),
            ("x", "z", 1),
            ("c", "x", 1),
        ])
        .unwrap();
        let r = bridges_and_local_bridges(&g);
        assert_eq!(named(&g, &r.bridges), vec![("c".into(), "x".into())]);
        assert_eq!(named(&g, &r.local_bridges), vec![("c".into(), "x".into())]);
    }

    #[test]
    fn cycle_edges_are_local_bridges_but_not_bridges() {
        let r = bridges_and_local_bridges(&cycle(5));
        assert!(r.bridges.is_empty());
        assert_eq!(r.local_bridges.len(), 5);
    }

    #[test]
    fn star_cannot_be_rewired() {
        let s = star(4);
        let r = rewire_degree_preserving(&s, 10.0, 3, WeightMode::Carry);
        assert_eq!(r.successful_swaps, 0);
        assert!(r.hit_attempt_cap);
        assert_eq!(r.attempted_swaps, 4000);
        assert_eq!(r.network, s);
    }

    #[test]
    fn four_cycle_rewires_only_into_four_cycles() {
        // Every 2-regular simple graph on 4 labelled nodes is one of three Hamiltonian cycles.
        let legal: Vec<Vec<(usize, usize)>> = vec![
            vec![(0, 1), (0, 3), (1, 2), (2, 3)],
            vec![(0, 1), (0, 2), (1, 3), (2, 3)],
            vec![(0, 2), (0, 3), (1, 2), (1, 3)],
        ];
        let c4 = cycle(4);
        let mut reached = HashSet::new();
        for seed in 0..40 {
            let r = rewire_degree_preserving(&c4, 1.0, seed, WeightMode::Carry);
            let es: Vec<_> = r.network.edges().iter().map(|e| e.endpoints()).collect();
            assert!(legal.contains(&es), "{es:?}");
            assert_eq!(r.network.degrees(), vec![2; 4]);
            reached.insert(es);
        }
        assert!(reached.len() > 1);
    }

    #[test]
    fn rewiring_is_deterministic_and_preserves_invariants() {
        let g = clique_ring(5, 5, 1);
        let g = {
            let edges: Vec<_> = g.edges().iter().enumerate().map(|(i, e)| (e.u, e.v, 1 + (i % 3) as u32)).collect();
            WeightedNetwork::new(g.nodes().to_vec(), edges).unwrap()
        };
        let a = rewire_degree_preserving(&g, 10.0, 42, WeightMode::Carry);
        let b = rewire_degree_preserving(&g, 10.0, 42, WeightMode::Carry);
        assert_eq!(a.network, b.network);
        assert_eq!(a.network.degrees(), g.degrees());
        assert_eq!(a.network.weight_multiset(), g.weight_multiset());
        assert_eq!(a.successful_swaps, a.target_swaps);
        assert_ne!(a.network, g);

        let unit = rewire_degree_preserving(&g, 1.0, 42, WeightMode::Unit);
        assert!(unit.network.edges().iter().all(|e| e.weight == 1));
        assert_eq!(unit.network.degrees(), g.degrees());
    }
}
