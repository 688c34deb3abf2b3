//! Global statistics, distributions and degree-class regressions.

use std::collections::BTreeMap;
use std::collections::VecDeque;

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::graph::{NodeIx, WeightedNetwork};
use crate::structure;

/// How nodes with fewer than two neighbors enter the mean clustering coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusteringConvention {
    /// Local clustering is undefined below degree 2; such nodes are skipped.
    #[default]
    ExcludeLowDegree,
    /// Nodes below degree 2 count as zero.
    IncludeAsZero,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryStats {
    pub n_nodes: usize,
    pub n_edges: usize,
    pub lcc_fraction: f64,
    pub mean_degree: f64,
    /// Mean degree over the maximum possible degree `N - 1`.
    pub density: f64,
    /// `None` when no node qualifies under the clustering convention.
    pub mean_clustering: Option<f64>,
    /// Mean hop distance over connected ordered pairs; `None` without any edge.
    pub mean_path_length: Option<f64>,
}

/// `<k> = 2E/N` and density `<k>/(N-1)`.
pub fn mean_degree_and_density(n_nodes: usize, n_edges: usize) -> (f64, f64) {
    let mean = 2.0 * n_edges as f64 / n_nodes as f64;
    (mean, mean / (n_nodes as f64 - 1.0))
}

pub fn summary(net: &WeightedNetwork, convention: ClusteringConvention) -> Result<SummaryStats> {
    let n = net.node_count();
    if n < 2 {
        return Err(Error::TooFewNodes { needed: 2, found: n });
    }
    let (mean_degree, density) = mean_degree_and_density(n, net.edge_count());
    Ok(SummaryStats {
        n_nodes: n,
        n_edges: net.edge_count(),
        lcc_fraction: structure::lcc_fraction(net),
        mean_degree,
        density,
        mean_clustering: mean_clustering(net, convention),
        mean_path_length: mean_path_length(net),
    })
}

/// Local clustering coefficient, `None` below degree 2. Weights are ignored.
pub fn local_clustering(net: &WeightedNetwork, v: NodeIx) -> Option<f64> {
    let nbrs = net.neighbors(v);
    let k = nbrs.len();
    if k < 2 {
        return None;
    }
    let mut links = 0usize;
    for (i, &(a, _)) in nbrs.iter().enumerate() {
        for &(b, _) in &nbrs[i + 1..] {
            if net.has_edge(a, b) {
                links += 1;
            }
        }
    }
    Some(2.0 * links as f64 / (k * (k - 1)) as f64)
}

pub fn mean_clustering(net: &WeightedNetwork, convention: ClusteringConvention) -> Option<f64> {
    let values: Vec<f64> = (0..net.node_count())
        .filter_map(|v| match (local_clustering(net, v), convention) {
            (Some(c), _) => Some(c),
            (None, ClusteringConvention::IncludeAsZero) => Some(0.0),
            (None, ClusteringConvention::ExcludeLowDegree) => None,
        })
        .collect();
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

/// Hop distances from `source`; `usize::MAX` marks unreachable nodes.
pub fn bfs_distances(net: &WeightedNetwork, source: NodeIx) -> Vec<usize> {
    let mut dist = vec![usize::MAX; net.node_count()];
    let mut queue = VecDeque::new();
    dist[source] = 0;
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        for &(w, _) in net.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Mean hop distance over ordered pairs `(i, j)`, `i != j`, with `j`
/// reachable from `i`. Sums are integers, so the result does not depend on
/// how sources are split across workers.
pub fn mean_path_length(net: &WeightedNetwork) -> Option<f64> {
    let (total, pairs) = (0..net.node_count())
        .into_par_iter()
        .map(|s| {
            bfs_distances(net, s)
                .into_iter()
                .filter(|&d| d != usize::MAX && d > 0)
                .fold((0u64, 0u64), |(t, c), d| (t + d as u64, c + 1))
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    (pairs > 0).then(|| total as f64 / pairs as f64)
}

/// Empirical distribution of a non-negative integer quantity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionTable {
    pub support: Vec<u64>,
    pub pmf: Vec<f64>,
    /// Fraction of observations `<= value`.
    pub cdf: Vec<f64>,
    /// Fraction of observations `>= value`.
    pub ccdf: Vec<f64>,
}

impl DistributionTable {
    pub fn from_values<I: IntoIterator<Item = u64>>(values: I) -> Self {
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        let mut total = 0u64;
        for v in values {
            *counts.entry(v).or_insert(0) += 1;
            total += 1;
        }
        let n = total as f64;
        let mut table = DistributionTable { support: vec![], pmf: vec![], cdf: vec![], ccdf: vec![] };
        let mut below = 0u64;
        for (value, c) in counts {
            table.support.push(value);
            table.pmf.push(c as f64 / n);
            table.ccdf.push((total - below) as f64 / n);
            below += c;
            table.cdf.push(below as f64 / n);
        }
        table
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn pmf_at(&self, value: u64) -> f64 {
        self.support.binary_search(&value).map_or(0.0, |i| self.pmf[i])
    }
}

/// Degree distribution, optionally restricted to the largest connected component.
pub fn degree_distribution(net: &WeightedNetwork, lcc_only: bool) -> DistributionTable {
    if lcc_only {
        let lcc = structure::largest_component(net);
        DistributionTable::from_values(lcc.degrees().into_iter().map(|d| d as u64))
    } else {
        DistributionTable::from_values(net.degrees().into_iter().map(|d| d as u64))
    }
}

pub fn weight_distribution(net: &WeightedNetwork) -> Result<DistributionTable> {
    if net.edge_count() == 0 {
        return Err(Error::EmptyEdgeSet);
    }
    Ok(DistributionTable::from_values(net.edges().iter().map(|e| u64::from(e.weight))))
}

pub fn strength_distribution(net: &WeightedNetwork) -> Result<DistributionTable> {
    if net.edge_count() == 0 {
        return Err(Error::EmptyEdgeSet);
    }
    Ok(DistributionTable::from_values((0..net.node_count()).map(|v| net.strength(v))))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionResult {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: Option<f64>,
    pub r_squared: f64,
    pub r_squared_adj: Option<f64>,
    /// Two-sided t-test on the slope; needs at least three points.
    pub p_value: Option<f64>,
    pub n_points: usize,
}

/// Ordinary least squares of `y` on `x`. Needs two points with distinct `x`.
pub fn ols(points: &[(f64, f64)]) -> Result<RegressionResult> {
    let n = points.len();
    let nf = n as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if n < 2 || sxx == 0.0 {
        return Err(Error::InsufficientDegreeClasses { needed: 2, found: n.min(1) });
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = points
        .iter()
        .map(|p| {
            let r = p.1 - (intercept + slope * p.0);
            r * r
        })
        .sum();
    let r_squared = if ss_res == 0.0 { 1.0 } else { 1.0 - ss_res / syy };

    let (mut slope_stderr, mut r_squared_adj, mut p_value) = (None, None, None);
    if n >= 3 {
        let df = nf - 2.0;
        let se = (ss_res / df / sxx).sqrt();
        slope_stderr = Some(se);
        r_squared_adj = Some(1.0 - (1.0 - r_squared) * (nf - 1.0) / df);
        p_value = Some(if se == 0.0 {
            if slope == 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            let t = (slope / se).abs();
            let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
            (2.0 * (1.0 - dist.cdf(t))).clamp(0.0, 1.0)
        });
    }
    Ok(RegressionResult { slope, intercept, slope_stderr, r_squared, r_squared_adj, p_value, n_points: n })
}

/// Mean of `value(v)` over nodes of each degree class `k >= 1`.
fn degree_class_means<F: Fn(NodeIx) -> f64>(net: &WeightedNetwork, value: F) -> Vec<(f64, f64)> {
    let mut classes: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for v in 0..net.node_count() {
        let k = net.degree(v);
        if k == 0 {
            continue;
        }
        let e = classes.entry(k).or_insert((0.0, 0));
        e.0 += value(v);
        e.1 += 1;
    }
    classes.into_iter().map(|(k, (sum, c))| (k as f64, sum / c as f64)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrengthFit {
    /// `<s(k)>` against `k`; the slope estimates the mean weight.
    pub linear: RegressionResult,
    /// `ln <s(k)>` against `ln k`; the slope is the power-law exponent.
    pub power_law: RegressionResult,
    pub points: Vec<(f64, f64)>,
}

/// Regression of mean strength per degree class on degree.
pub fn strength_vs_degree(net: &WeightedNetwork) -> Result<StrengthFit> {
    let points = degree_class_means(net, |v| net.strength(v) as f64);
    if points.len() < 3 {
        return Err(Error::InsufficientDegreeClasses { needed: 3, found: points.len() });
    }
    let logs: Vec<_> = points.iter().map(|&(k, s)| (k.ln(), s.ln())).collect();
    Ok(StrengthFit { linear: ols(&points)?, power_law: ols(&logs)?, points })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KnnResult {
    /// `(k, <k_nn>(k))` per degree class.
    pub points: Vec<(f64, f64)>,
    pub fit: RegressionResult,
}

/// Mean neighbor degree per degree class, `(k, <k_nn>(k))`.
pub fn knn_points(net: &WeightedNetwork) -> Vec<(f64, f64)> {
    degree_class_means(net, |v| {
        let nbrs = net.neighbors(v);
        nbrs.iter().map(|&(w, _)| net.degree(w) as f64).sum::<f64>() / nbrs.len() as f64
    })
}

/// Nearest-neighbor degree against degree, with its least-squares line.
/// A positive slope indicates assortative mixing.
///
/// Two classes suffice for the slope; the p-value needs three.
pub fn knn_vs_degree(net: &WeightedNetwork) -> Result<KnnResult> {
    let points = knn_points(net);
    if points.len() < 2 {
        return Err(Error::InsufficientDegreeClasses { needed: 2, found: points.len() });
    }
    Ok(KnnResult { fit: ols(&points)?, points })
}
