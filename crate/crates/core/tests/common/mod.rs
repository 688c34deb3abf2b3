//! Independent oracles and random graph generators shared by the integration tests.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::HashMap;

use boardnet::graph::WeightedNetwork;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

/// G(n, p) with weights uniform in `1..=max_weight`.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64, max_weight: u32) -> WeightedNetwork {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            if rng.random::<f64>() < p {
                edges.push((a, b, rng.random_range(1..=max_weight)));
            }
        }
    }
    WeightedNetwork::new(names(n), edges).unwrap()
}

/// Random spanning tree plus random extra edges.
pub fn random_connected_graph<R: Rng>(rng: &mut R, n: usize, max_weight: u32) -> WeightedNetwork {
    let p = rng.random_range(0.0..0.8);
    let mut adj = vec![vec![false; n]; n];
    let mut edges = Vec::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        adj[u][v] = true;
        edges.push((u, v, rng.random_range(1..=max_weight)));
    }
    for a in 0..n {
        for b in (a + 1)..n {
            if !adj[a][b] && rng.random::<f64>() < p {
                edges.push((a, b, rng.random_range(1..=max_weight)));
            }
        }
    }
    WeightedNetwork::new(names(n), edges).unwrap()
}

pub struct PathOracle {
    pub node_betweenness: Vec<f64>,
    /// Keyed by `(u, v)` with `u < v`.
    pub edge_betweenness: HashMap<(usize, usize), f64>,
    pub closeness: Vec<f64>,
}

fn simple_paths(net: &WeightedNetwork, s: usize, t: usize, inverse: bool) -> Vec<(f64, Vec<usize>)> {
    fn dfs(
        net: &WeightedNetwork,
        t: usize,
        inverse: bool,
        path: &mut Vec<usize>,
        len: f64,
        out: &mut Vec<(f64, Vec<usize>)>,
    ) {
        let v = *path.last().unwrap();
        if v == t {
            out.push((len, path.clone()));
            return;
        }
        for &(w, weight) in net.neighbors(v) {
            if path.contains(&w) {
                continue;
            }
            let step = if inverse { 1.0 / f64::from(weight) } else { 1.0 };
            path.push(w);
            dfs(net, t, inverse, path, len + step, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    dfs(net, t, inverse, &mut vec![s], 0.0, &mut out);
    out
}

/// Betweenness and closeness by listing every simple path of every pair and
/// keeping the shortest ones. Exponential; for graphs of a handful of nodes.
pub fn enumerate_paths(net: &WeightedNetwork, inverse: bool) -> PathOracle {
    let n = net.node_count();
    let mut node_betweenness = vec![0.0; n];
    let mut edge_betweenness: HashMap<(usize, usize), f64> = net.edges().iter().map(|e| ((e.u, e.v), 0.0)).collect();
    let mut dist_sum = vec![0.0; n];
    for s in 0..n {
        for t in (s + 1)..n {
            let paths = simple_paths(net, s, t, inverse);
            if paths.is_empty() {
                continue;
            }
            let best = paths.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
            let shortest: Vec<&Vec<usize>> =
                paths.iter().filter(|p| p.0 <= best * (1.0 + 1e-12)).map(|p| &p.1).collect();
            let share = 1.0 / shortest.len() as f64;
            for p in &shortest {
                for &v in &p[1..p.len() - 1] {
                    node_betweenness[v] += share;
                }
                for pair in p.windows(2) {
                    *edge_betweenness.get_mut(&(pair[0].min(pair[1]), pair[0].max(pair[1]))).unwrap() += share;
                }
            }
            dist_sum[s] += best;
            dist_sum[t] += best;
        }
    }
    let closeness = dist_sum.iter().map(|&d| if d > 0.0 { 1.0 / d } else { 0.0 }).collect();
    PathOracle { node_betweenness, edge_betweenness, closeness }
}

/// Principal eigenvector from a dense symmetric eigendecomposition, max-normalized.
pub fn dense_eigenvector(net: &WeightedNetwork, use_weights: bool) -> Vec<f64> {
    let n = net.node_count();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for e in net.edges() {
        let w = if use_weights { f64::from(e.weight) } else { 1.0 };
        a[(e.u, e.v)] = w;
        a[(e.v, e.u)] = w;
    }
    let eig = SymmetricEigen::new(a);
    let top = eig.eigenvalues.imax();
    let v: Vec<f64> = eig.eigenvectors.column(top).iter().map(|x| x.abs()).collect();
    let max = v.iter().copied().fold(0.0, f64::max);
    v.into_iter().map(|x| x / max).collect()
}

/// Shell index by definition: the largest k for which repeatedly deleting
/// nodes of degree below k leaves the node in place.
pub fn brute_force_shells(net: &WeightedNetwork) -> Vec<usize> {
    let n = net.node_count();
    let mut shell = vec![0; n];
    for k in 1..=n {
        let mut alive = vec![true; n];
        loop {
            let doomed: Vec<usize> = (0..n)
                .filter(|&v| alive[v] && net.neighbors(v).iter().filter(|&&(w, _)| alive[w]).count() < k)
                .collect();
            if doomed.is_empty() {
                break;
            }
            doomed.into_iter().for_each(|v| alive[v] = false);
        }
        for v in 0..n {
            if alive[v] {
                shell[v] = k;
            }
        }
    }
    shell
}
