//! Degree, betweenness, closeness and eigenvector centrality, plus ranked
//! listings with explicit tie groups.
//!
//! Shortest paths count hops by default. Weights record tie multiplicity,
//! not cost; [`PathMetric::InverseWeight`] treats `1/w` as a length instead.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{NodeIx, WeightedNetwork};
use crate::structure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PathMetric {
    #[default]
    Hops,
    InverseWeight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClosenessScope {
    /// Whole graph; must be connected.
    #[default]
    Whole,
    /// Largest connected component only; other nodes get no score.
    Lcc,
}

/// Sources per work unit. Fixed so the floating-point reduction order does not
/// depend on the number of workers.
const SOURCE_CHUNK: usize = 32;

/// Relative tolerance used to compare distances under inverse-weight lengths.
const DIST_EPS: f64 = 1e-12;

struct ShortestPathDag {
    /// Nodes in non-decreasing distance order.
    order: Vec<NodeIx>,
    /// Predecessors with the index of the connecting edge.
    preds: Vec<Vec<(NodeIx, usize)>>,
    sigma: Vec<f64>,
}

#[derive(Clone, Copy, PartialEq)]
struct HeapItem(f64, NodeIx);

impl Eq for HeapItem {}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

/// Edge index for every adjacency slot, aligned with `net.neighbors(v)`.
fn adjacency_edge_ix(net: &WeightedNetwork) -> Vec<Vec<usize>> {
    (0..net.node_count())
        .map(|v| {
            net.neighbors(v)
                .iter()
                .map(|&(w, _)| {
                    let key = (v.min(w), v.max(w));
                    net.edges().binary_search_by(|e| e.endpoints().cmp(&key)).expect("adjacency and edge list agree")
                })
                .collect()
        })
        .collect()
}

fn shortest_path_dag(net: &WeightedNetwork, edge_ix: &[Vec<usize>], s: NodeIx, metric: PathMetric) -> ShortestPathDag {
    let n = net.node_count();
    let mut preds = vec![Vec::new(); n];
    let mut sigma = vec![0.0; n];
    let mut order = Vec::with_capacity(n);
    sigma[s] = 1.0;

    match metric {
        PathMetric::Hops => {
            let mut dist = vec![usize::MAX; n];
            dist[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                order.push(v);
                for (slot, &(w, _)) in net.neighbors(v).iter().enumerate() {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[v] + 1;
                        queue.push_back(w);
                    }
                    if dist[w] == dist[v] + 1 {
                        sigma[w] += sigma[v];
                        preds[w].push((v, edge_ix[v][slot]));
                    }
                }
            }
        }
        PathMetric::InverseWeight => {
            let mut dist = vec![f64::INFINITY; n];
            let mut done = vec![false; n];
            dist[s] = 0.0;
            let mut heap = BinaryHeap::from([HeapItem(0.0, s)]);
            while let Some(HeapItem(d, v)) = heap.pop() {
                if done[v] || d > dist[v] {
                    continue;
                }
                done[v] = true;
                order.push(v);
                for (slot, &(w, weight)) in net.neighbors(v).iter().enumerate() {
                    if done[w] {
                        continue;
                    }
                    let alt = d + 1.0 / f64::from(weight);
                    let tol = DIST_EPS * alt.max(1.0);
                    if alt < dist[w] - tol {
                        dist[w] = alt;
                        sigma[w] = sigma[v];
                        preds[w].clear();
                        preds[w].push((v, edge_ix[v][slot]));
                        heap.push(HeapItem(alt, w));
                    } else if (alt - dist[w]).abs() <= tol {
                        sigma[w] += sigma[v];
                        preds[w].push((v, edge_ix[v][slot]));
                    }
                }
            }
        }
    }
    ShortestPathDag { order, preds, sigma }
}

/// Node and edge betweenness together; one Brandes sweep feeds both.
///
/// Unordered pairs are counted once. Pairs in different components
/// contribute nothing.
pub fn betweenness(net: &WeightedNetwork, metric: PathMetric) -> (Vec<f64>, Vec<f64>) {
    let n = net.node_count();
    let m = net.edge_count();
    let edge_ix = adjacency_edge_ix(net);
    let sources: Vec<NodeIx> = (0..n).collect();

    let partials: Vec<(Vec<f64>, Vec<f64>)> = sources
        .par_chunks(SOURCE_CHUNK)
        .map(|chunk| {
            let mut node_bc = vec![0.0; n];
            let mut edge_bc = vec![0.0; m];
            let mut delta = vec![0.0; n];
            for &s in chunk {
                let dag = shortest_path_dag(net, &edge_ix, s, metric);
                for &v in &dag.order {
                    delta[v] = 0.0;
                }
                for &w in dag.order.iter().rev() {
                    let coeff = (1.0 + delta[w]) / dag.sigma[w];
                    for &(v, e) in &dag.preds[w] {
                        let c = dag.sigma[v] * coeff;
                        edge_bc[e] += c;
                        delta[v] += c;
                    }
                    if w != s {
                        node_bc[w] += delta[w];
                    }
                }
            }
            (node_bc, edge_bc)
        })
        .collect();

    let mut node_bc = vec![0.0; n];
    let mut edge_bc = vec![0.0; m];
    for (nb, eb) in partials {
        node_bc.iter_mut().zip(nb).for_each(|(a, b)| *a += b);
        edge_bc.iter_mut().zip(eb).for_each(|(a, b)| *a += b);
    }
    // Every unordered pair was visited from both ends.
    node_bc.iter_mut().for_each(|x| *x /= 2.0);
    edge_bc.iter_mut().for_each(|x| *x /= 2.0);
    (node_bc, edge_bc)
}

/// Node betweenness `b_v = sum over pairs i<j (i, j != v) of n_ij(v) / n_ij`.
pub fn betweenness_nodes(net: &WeightedNetwork, metric: PathMetric) -> Vec<f64> {
    betweenness(net, metric).0
}

/// Edge betweenness, aligned with `net.edges()`.
pub fn betweenness_edges(net: &WeightedNetwork, metric: PathMetric) -> Vec<f64> {
    betweenness(net, metric).1
}

/// Scales raw node betweenness by `2 / ((N-1)(N-2))`.
pub fn normalize_betweenness(scores: &mut [f64]) {
    let n = scores.len() as f64;
    if n > 2.0 {
        let k = 2.0 / ((n - 1.0) * (n - 2.0));
        scores.iter_mut().for_each(|x| *x *= k);
    }
}

fn distance_sum(net: &WeightedNetwork, s: NodeIx, metric: PathMetric) -> f64 {
    match metric {
        PathMetric::Hops => {
            crate::metrics::bfs_distances(net, s).into_iter().filter(|&d| d != usize::MAX).sum::<usize>() as f64
        }
        PathMetric::InverseWeight => {
            let mut dist = vec![f64::INFINITY; net.node_count()];
            dist[s] = 0.0;
            let mut heap = BinaryHeap::from([HeapItem(0.0, s)]);
            while let Some(HeapItem(d, v)) = heap.pop() {
                if d > dist[v] {
                    continue;
                }
                for &(w, weight) in net.neighbors(v) {
                    let alt = d + 1.0 / f64::from(weight);
                    if alt < dist[w] {
                        dist[w] = alt;
                        heap.push(HeapItem(alt, w));
                    }
                }
            }
            dist.into_iter().filter(|d| d.is_finite()).sum()
        }
    }
}

/// Closeness `h_i = 1 / sum_k l_ik` within the node's component.
///
/// With [`ClosenessScope::Whole`] the graph must be connected. With
/// [`ClosenessScope::Lcc`] only nodes of the largest component are scored.
pub fn closeness(net: &WeightedNetwork, scope: ClosenessScope, metric: PathMetric) -> Result<Vec<Option<f64>>> {
    let comps = structure::connected_components(net);
    let mut include = vec![false; net.node_count()];
    match scope {
        ClosenessScope::Whole => {
            if comps.len() > 1 {
                return Err(Error::ClosenessDisconnected);
            }
            include.iter_mut().for_each(|x| *x = true);
        }
        ClosenessScope::Lcc => {
            if let Some(c) = comps.first() {
                c.iter().for_each(|&v| include[v] = true);
            }
        }
    }
    Ok((0..net.node_count())
        .into_par_iter()
        .map(|v| {
            if !include[v] {
                return None;
            }
            let total = distance_sum(net, v, metric);
            (total > 0.0).then(|| 1.0 / total)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    pub use_weights: bool,
    /// Stop once the largest entry-wise change falls below this, relative to the max entry.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions { use_weights: false, tolerance: 1e-10, max_iterations: 100_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenvectorScores {
    /// Non-negative, maximum entry exactly 1.
    pub scores: Vec<f64>,
    /// Principal eigenvalue of the adjacency matrix.
    pub eigenvalue: f64,
    pub iterations: usize,
}

/// Principal eigenvector of the adjacency matrix by power iteration.
///
/// Iterates on `A + I`, which has the same eigenvectors as `A` but a strictly
/// dominant Perron eigenvalue on connected graphs, so bipartite graphs do not
/// oscillate. Starts from the uniform vector.
pub fn eigenvector_centrality(net: &WeightedNetwork, opts: EigenOptions) -> Result<EigenvectorScores> {
    let n = net.node_count();
    if n < 2 {
        return Err(Error::TooFewNodes { needed: 2, found: n });
    }
    let comps = structure::connected_components(net).len();
    if comps > 1 {
        return Err(Error::Disconnected { components: comps });
    }
    let weight = |w: u32| if opts.use_weights { f64::from(w) } else { 1.0 };
    let mut x = vec![1.0; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for it in 1..=opts.max_iterations {
        for v in 0..n {
            next[v] = x[v] + net.neighbors(v).iter().map(|&(w, wt)| weight(wt) * x[w]).sum::<f64>();
        }
        let max = next.iter().copied().fold(0.0, f64::max);
        next.iter_mut().for_each(|y| *y /= max);
        residual = x.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        std::mem::swap(&mut x, &mut next);
        if residual < opts.tolerance {
            // x is max-normalized, so (A+I)x has max equal to lambda + 1 at convergence.
            let ax_max = (0..n)
                .map(|v| x[v] + net.neighbors(v).iter().map(|&(w, wt)| weight(wt) * x[w]).sum::<f64>())
                .fold(0.0, f64::max);
            return Ok(EigenvectorScores { scores: x, eigenvalue: ax_max - 1.0, iterations: it });
        }
    }
    Err(Error::NoConvergence { iterations: opts.max_iterations, residual })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CentralityOptions {
    pub metric: PathMetric,
    pub eigen_weighted: bool,
    pub normalize_betweenness: bool,
}

/// Per-node scores for the four measures.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralityTable {
    pub nodes: Vec<String>,
    pub degree: Vec<usize>,
    pub betweenness: Vec<f64>,
    pub closeness: Vec<f64>,
    pub eigenvector: Vec<f64>,
}

/// All four measures on a connected network (pass the largest component).
pub fn centrality_table(net: &WeightedNetwork, opts: CentralityOptions) -> Result<CentralityTable> {
    let closeness = closeness(net, ClosenessScope::Whole, opts.metric)?.into_iter().map(|c| c.unwrap_or(0.0)).collect();
    let eigen = eigenvector_centrality(net, EigenOptions { use_weights: opts.eigen_weighted, ..Default::default() })?;
    let mut betweenness = betweenness_nodes(net, opts.metric);
    if opts.normalize_betweenness {
        normalize_betweenness(&mut betweenness);
    }
    Ok(CentralityTable {
        nodes: net.nodes().to_vec(),
        degree: net.degrees(),
        betweenness,
        closeness,
        eigenvector: eigen.scores,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Degree,
    Betweenness,
    Closeness,
    Eigenvector,
}

impl Measure {
    pub const ALL: [Measure; 4] = [Measure::Degree, Measure::Betweenness, Measure::Closeness, Measure::Eigenvector];
}

impl CentralityTable {
    pub fn scores(&self, measure: Measure) -> Vec<f64> {
        match measure {
            Measure::Degree => self.degree.iter().map(|&d| d as f64).collect(),
            Measure::Betweenness => self.betweenness.clone(),
            Measure::Closeness => self.closeness.clone(),
            Measure::Eigenvector => self.eigenvector.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankEntry {
    /// Competition rank: tied nodes share the rank of the first of them.
    pub rank: usize,
    pub node: String,
    pub score: f64,
    /// Index into the ranking's `tie_groups`, if the node is tied.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tie_group: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ranking {
    pub measure: Measure,
    pub entries: Vec<RankEntry>,
    /// Every group of two or more tied nodes touching the listing, complete
    /// even where it extends past the cut.
    pub tie_groups: Vec<Vec<String>>,
}

/// Scores equal within this relative tolerance are treated as ties.
const TIE_EPS: f64 = 1e-9;

fn tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_EPS * a.abs().max(b.abs())
}

/// Groups of near-equal scores in descending order, each group sorted by identifier.
fn tie_groups_by_score<K: Ord>(ids: &[K], scores: &[f64]) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..ids.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then_with(|| ids[a].cmp(&ids[b])));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for v in order {
        match groups.last_mut() {
            Some(g) if tied(scores[g[0]], scores[v]) => g.push(v),
            _ => groups.push(vec![v]),
        }
    }
    for g in &mut groups {
        g.sort_by(|&a, &b| ids[a].cmp(&ids[b]));
    }
    groups
}

/// Indices by descending score; near-equal scores are ordered by ascending identifier.
pub fn order_by_score<K: Ord>(ids: &[K], scores: &[f64]) -> Vec<usize> {
    tie_groups_by_score(ids, scores).into_iter().flatten().collect()
}

/// Top `top` nodes by descending score; ties are listed by ascending identifier.
pub fn rank_by(nodes: &[String], scores: &[f64], measure: Measure, top: usize) -> Ranking {
    let mut entries = Vec::new();
    let mut tie_groups = Vec::new();
    let mut position = 0;
    for g in tie_groups_by_score(nodes, scores) {
        if entries.len() >= top {
            break;
        }
        let group_ix = (g.len() > 1).then(|| {
            tie_groups.push(g.iter().map(|&v| nodes[v].clone()).collect());
            tie_groups.len() - 1
        });
        for &v in g.iter().take(top - entries.len()) {
            entries.push(RankEntry {
                rank: position + 1,
                node: nodes[v].clone(),
                score: scores[v],
                tie_group: group_ix,
            });
        }
        position += g.len();
    }
    Ranking { measure, entries, tie_groups }
}

/// One ranking per measure.
pub fn rank_table(table: &CentralityTable, top: usize) -> Vec<Ranking> {
    Measure::ALL.iter().map(|&m| rank_by(&table.nodes, &table.scores(m), m, top.max(1))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterRow {
    pub node: String,
    pub betweenness: f64,
    pub closeness: f64,
    pub degree: usize,
    pub eigenvector: f64,
}

/// One row per node: betweenness against closeness, with degree and
/// eigenvector score as marker size and shade.
pub fn key_actor_scatter(table: &CentralityTable) -> Vec<ScatterRow> {
    (0..table.nodes.len())
        .map(|i| ScatterRow {
            node: table.nodes[i].clone(),
            betweenness: table.betweenness[i],
            closeness: table.closeness[i],
            degree: table.degree[i],
            eigenvector: table.eigenvector[i],
        })
        .collect()
}
