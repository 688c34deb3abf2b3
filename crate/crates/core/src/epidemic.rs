//! Discrete-time SI spreading on weighted networks.
//!
//! A susceptible node `j` whose infected neighbors are `I_j` becomes infected
//! at the next step with probability `1 - prod_{i in I_j} (1 - beta * w_ij)`,
//! i.e. each infected neighbor transmits independently with probability
//! `beta * w_ij`. Updates are synchronous and infection is permanent.
//!
//! Each run draws from its own ChaCha stream selected by the run index, so an
//! ensemble gives the same traces whatever the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::centrality::{self, PathMetric};
use crate::error::{Error, Result};
use crate::graph::{NodeIx, WeightedNetwork};
use crate::structure::{self, WeightMode};

pub const DEFAULT_BETA: f64 = 0.05;
pub const DEFAULT_RUNS: usize = 500;
pub const DEFAULT_SUPPRESSION: f64 = 0.07;
pub const DEFAULT_MAX_STEPS: usize = 10_000;
pub const DEFAULT_THRESHOLDS: [f64; 3] = [0.5, 0.9, 1.0];

const NULL_RUN_TAG: u64 = 0x6e75_6c6c_5f72_756e;
const REWIRE_TAG: u64 = 0x7265_7769_7265_0000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SiConfig {
    pub beta: f64,
    pub runs: usize,
    pub max_steps: usize,
    pub seed: u64,
    /// Initially infected node; drawn uniformly per run when absent.
    pub seed_node: Option<String>,
    pub thresholds: Vec<f64>,
}

impl Default for SiConfig {
    fn default() -> Self {
        SiConfig {
            beta: DEFAULT_BETA,
            runs: DEFAULT_RUNS,
            max_steps: DEFAULT_MAX_STEPS,
            seed: 0,
            seed_node: None,
            thresholds: DEFAULT_THRESHOLDS.to_vec(),
        }
    }
}

impl SiConfig {
    fn validate(&self, net: &WeightedNetwork) -> Result<()> {
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::InvalidParameter(format!("beta must lie in [0, 1], got {}", self.beta)));
        }
        if self.runs == 0 || self.max_steps == 0 {
            return Err(Error::InvalidParameter("runs and max_steps must be positive".into()));
        }
        if self.thresholds.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(Error::InvalidParameter("thresholds must lie in [0, 1]".into()));
        }
        let bound = self.beta * f64::from(net.max_weight());
        if bound > 1.0 + 1e-12 {
            return Err(Error::ProbabilityBound(bound));
        }
        Ok(())
    }
}

/// Infected count per step of one run; `counts[0] == 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunTrace {
    pub n_nodes: usize,
    pub seed_node: String,
    pub counts: Vec<usize>,
}

impl RunTrace {
    /// First step at which at least `fraction` of the nodes are infected.
    pub fn time_to_fraction(&self, fraction: f64) -> Option<usize> {
        let needed = ((fraction * self.n_nodes as f64) - 1e-9).ceil().max(1.0) as usize;
        self.counts.iter().position(|&c| c >= needed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdStat {
    pub fraction: f64,
    /// Mean first-passage step over runs that reached the threshold.
    pub mean_step: Option<f64>,
    /// Runs that stopped at `max_steps` before reaching it.
    pub censored: usize,
    #[serde(skip)]
    pub per_run: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpidemicTrace {
    #[serde(skip)]
    pub runs: Vec<RunTrace>,
    /// Ensemble mean per step. Finished runs hold their final count.
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
    /// Runs still recording at each step.
    pub runs_active: Vec<usize>,
    pub time_to_fraction: Vec<ThresholdStat>,
}

impl EpidemicTrace {
    pub fn aggregate(runs: Vec<RunTrace>, thresholds: &[f64]) -> Self {
        let len = runs.iter().map(|r| r.counts.len()).max().unwrap_or(0);
        let n = runs.len() as f64;
        let mut mean = Vec::with_capacity(len);
        let mut sd = Vec::with_capacity(len);
        let mut runs_active = Vec::with_capacity(len);
        for t in 0..len {
            let at = |r: &RunTrace| *r.counts.get(t).unwrap_or_else(|| r.counts.last().unwrap()) as f64;
            let m = runs.iter().map(at).sum::<f64>() / n;
            let var =
                if runs.len() > 1 { runs.iter().map(|r| (at(r) - m).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
            mean.push(m);
            sd.push(var.sqrt());
            runs_active.push(runs.iter().filter(|r| r.counts.len() > t).count());
        }
        let time_to_fraction = thresholds
            .iter()
            .map(|&fraction| {
                let per_run: Vec<Option<usize>> = runs.iter().map(|r| r.time_to_fraction(fraction)).collect();
                let reached: Vec<usize> = per_run.iter().flatten().copied().collect();
                let censored = per_run.len() - reached.len();
                if censored > 0 {
                    log::warn!("{censored} runs censored before reaching {fraction} infected");
                }
                let mean_step =
                    (!reached.is_empty()).then(|| reached.iter().sum::<usize>() as f64 / reached.len() as f64);
                ThresholdStat { fraction, mean_step, censored, per_run }
            })
            .collect();
        EpidemicTrace { runs, mean, sd, runs_active, time_to_fraction }
    }

    pub fn threshold(&self, fraction: f64) -> Option<&ThresholdStat> {
        self.time_to_fraction.iter().find(|t| (t.fraction - fraction).abs() < 1e-12)
    }

    /// Per-run first-passage steps for `fraction`, censored runs dropped.
    pub fn passage_times(&self, fraction: f64) -> Vec<f64> {
        match self.threshold(fraction) {
            Some(t) => t.per_run.iter().flatten().map(|&s| s as f64).collect(),
            None => self.runs.iter().filter_map(|r| r.time_to_fraction(fraction)).map(|s| s as f64).collect(),
        }
    }
}

fn run_rng(seed: u64, run: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run as u64);
    rng
}

/// Infection state of one run. `escape[j]` is the probability that `j`
/// escapes every currently infected neighbor in one step.
struct SiState<'a> {
    net: &'a WeightedNetwork,
    beta: f64,
    infected: Vec<bool>,
    escape: Vec<f64>,
    exposed: Vec<NodeIx>,
    is_exposed: Vec<bool>,
    count: usize,
}

impl<'a> SiState<'a> {
    fn new(net: &'a WeightedNetwork, beta: f64) -> Self {
        let n = net.node_count();
        SiState {
            net,
            beta,
            infected: vec![false; n],
            escape: vec![1.0; n],
            exposed: Vec::new(),
            is_exposed: vec![false; n],
            count: 0,
        }
    }

    fn infect(&mut self, v: NodeIx) {
        self.infected[v] = true;
        self.count += 1;
        for &(w, weight) in self.net.neighbors(v) {
            if !self.infected[w] {
                self.escape[w] *= 1.0 - self.beta * f64::from(weight);
                if !self.is_exposed[w] && self.escape[w] < 1.0 {
                    self.is_exposed[w] = true;
                    self.exposed.push(w);
                }
            }
        }
    }

    /// Probability that susceptible `j` is infected during the next step.
    fn infection_probability(&self, j: NodeIx) -> f64 {
        1.0 - self.escape[j]
    }

    /// One synchronous step: all draws use the infected set from the start
    /// of the step, in ascending node order.
    fn step<R: Rng>(&mut self, rng: &mut R) {
        let infected = &self.infected;
        self.exposed.retain(|&v| !infected[v]);
        self.exposed.sort_unstable();
        let newly: Vec<NodeIx> =
            self.exposed.iter().copied().filter(|&j| rng.random::<f64>() < self.infection_probability(j)).collect();
        for j in newly {
            self.infect(j);
        }
    }
}

/// One SI realization from `seed_node`: infected count after each step,
/// stopping at full infection or after `max_steps` steps.
pub fn simulate_once<R: Rng>(
    net: &WeightedNetwork,
    beta: f64,
    max_steps: usize,
    seed_node: NodeIx,
    rng: &mut R,
) -> Vec<usize> {
    let mut state = SiState::new(net, beta);
    state.infect(seed_node);
    let mut counts = vec![state.count];
    while state.count < net.node_count() && counts.len() <= max_steps {
        state.step(rng);
        counts.push(state.count);
    }
    counts
}

fn resolve_seed_node(net: &WeightedNetwork, name: Option<&str>) -> Result<Option<NodeIx>> {
    name.map(|s| net.index_of(s)).transpose()
}

fn run_ensemble(net: &WeightedNetwork, cfg: &SiConfig, seed: u64) -> Result<Vec<RunTrace>> {
    let fixed = resolve_seed_node(net, cfg.seed_node.as_deref())?;
    Ok((0..cfg.runs)
        .into_par_iter()
        .map(|run| {
            let mut rng = run_rng(seed, run);
            let start = fixed.unwrap_or_else(|| rng.random_range(0..net.node_count()));
            RunTrace {
                n_nodes: net.node_count(),
                seed_node: net.name(start).to_string(),
                counts: simulate_once(net, cfg.beta, cfg.max_steps, start, &mut rng),
            }
        })
        .collect())
}

/// Runs the SI ensemble on a connected network.
pub fn run_si(net: &WeightedNetwork, cfg: &SiConfig) -> Result<EpidemicTrace> {
    cfg.validate(net)?;
    let components = structure::connected_components(net).len();
    if components != 1 {
        return Err(Error::Disconnected { components });
    }
    let runs = run_ensemble(net, cfg, cfg.seed)?;
    Ok(EpidemicTrace::aggregate(runs, &cfg.thresholds))
}

fn mix(seed: u64, tag: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ tag;
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NullModelOptions {
    pub replicas: usize,
    pub swaps_per_edge: f64,
    pub weight_mode: WeightMode,
}

impl Default for NullModelOptions {
    fn default() -> Self {
        NullModelOptions {
            replicas: DEFAULT_RUNS,
            swaps_per_edge: structure::DEFAULT_SWAPS_PER_EDGE,
            weight_mode: WeightMode::Carry,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NullComparison {
    pub real: EpidemicTrace,
    pub null: EpidemicTrace,
    /// Size of the largest component of each randomized replica.
    pub replica_lcc_sizes: Vec<usize>,
    /// Mean time to 90% on the real network over the same on the null family.
    pub t90_ratio: Option<f64>,
}

/// Rewired replica `r` of `net`, restricted to its largest component.
pub fn null_replica(net: &WeightedNetwork, opts: &NullModelOptions, seed: u64, r: usize) -> WeightedNetwork {
    let mut rng = run_rng(mix(seed, REWIRE_TAG), r);
    let report = structure::rewire_with_rng(net, opts.swaps_per_edge, opts.weight_mode, &mut rng, seed);
    if report.components_after > 1 {
        log::info!("null replica {r} split into {} components; using the largest", report.components_after);
    }
    structure::largest_component(&report.network)
}

/// SI ensembles on the real network and on a family of degree-preserving
/// randomizations. Null run `i` uses replica `i mod replicas`.
pub fn compare_with_random(net: &WeightedNetwork, cfg: &SiConfig, opts: &NullModelOptions) -> Result<NullComparison> {
    if opts.replicas == 0 {
        return Err(Error::InvalidParameter("null replicas must be positive".into()));
    }
    let real = run_si(net, cfg)?;
    let replicas: Vec<WeightedNetwork> =
        (0..opts.replicas.min(cfg.runs)).into_par_iter().map(|r| null_replica(net, opts, cfg.seed, r)).collect();
    let null_seed = mix(cfg.seed, NULL_RUN_TAG);
    let runs: Vec<RunTrace> = (0..cfg.runs)
        .into_par_iter()
        .map(|run| {
            let g = &replicas[run % replicas.len()];
            let mut rng = run_rng(null_seed, run);
            let start = match cfg.seed_node.as_deref().and_then(|s| g.index_of(s).ok()) {
                Some(v) => v,
                None => rng.random_range(0..g.node_count()),
            };
            RunTrace {
                n_nodes: g.node_count(),
                seed_node: g.name(start).to_string(),
                counts: simulate_once(g, cfg.beta, cfg.max_steps, start, &mut rng),
            }
        })
        .collect();
    let null = EpidemicTrace::aggregate(runs, &cfg.thresholds);
    let t90 = |t: &EpidemicTrace| {
        let v = t.passage_times(0.9);
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    };
    let t90_ratio = match (t90(&real), t90(&null)) {
        (Some(a), Some(b)) if b > 0.0 => Some(a / b),
        _ => None,
    };
    Ok(NullComparison { real, null, replica_lcc_sizes: replicas.iter().map(|g| g.node_count()).collect(), t90_ratio })
}

#[derive(Debug, Clone, Serialize)]
pub struct SuppressionResult {
    pub before: EpidemicTrace,
    pub after: EpidemicTrace,
    /// Removed edges by name, in removal order.
    pub removed: Vec<(String, String)>,
    pub still_connected: bool,
    pub lcc_size_after: usize,
}

/// Edges ordered by decreasing betweenness; near-equal scores are ordered by
/// endpoint identifiers.
pub fn edges_by_betweenness(net: &WeightedNetwork) -> Vec<(NodeIx, NodeIx)> {
    let scores = centrality::betweenness_edges(net, PathMetric::Hops);
    let labels: Vec<(String, String)> = net
        .edges()
        .iter()
        .map(|e| {
            let (a, b) = (net.name(e.u), net.name(e.v));
            if a <= b {
                (a.to_string(), b.to_string())
            } else {
                (b.to_string(), a.to_string())
            }
        })
        .collect();
    centrality::order_by_score(&labels, &scores).into_iter().map(|i| net.edges()[i].endpoints()).collect()
}

/// Removes `ceil(fraction * E)` edges in decreasing betweenness order (ranked
/// once, on the intact graph) and reruns the ensemble on the largest
/// remaining component.
pub fn suppress_and_rerun(net: &WeightedNetwork, cfg: &SiConfig, fraction: f64) -> Result<SuppressionResult> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::InvalidParameter(format!("fraction must lie in [0, 1), got {fraction}")));
    }
    let count = (fraction * net.edge_count() as f64).ceil() as usize;
    if count < 1 {
        return Err(Error::InvalidParameter("fraction removes no edge".into()));
    }
    if count >= net.edge_count() {
        return Err(Error::EmptiedGraph);
    }
    let before = run_si(net, cfg)?;
    let removed: Vec<(NodeIx, NodeIx)> = edges_by_betweenness(net).into_iter().take(count).collect();
    let pruned = net.without_edges(&removed);
    let still_connected = structure::is_connected(&pruned);
    if !still_connected {
        log::warn!("suppressing {count} edges disconnected the graph; rerunning on the largest component");
    }
    let lcc = structure::largest_component(&pruned);
    if lcc.edge_count() == 0 {
        return Err(Error::EmptiedGraph);
    }
    let mut cfg_after = cfg.clone();
    if let Some(s) = &cfg.seed_node {
        if lcc.index_of(s).is_err() {
            cfg_after.seed_node = None;
        }
    }
    let after = run_si(&lcc, &cfg_after)?;
    Ok(SuppressionResult {
        before,
        after,
        removed: removed.iter().map(|&(a, b)| (net.name(a).to_string(), net.name(b).to_string())).collect(),
        still_connected,
        lcc_size_after: lcc.node_count(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BootstrapResult {
    /// `mean(a) - mean(b)`.
    pub mean_diff: f64,
    /// Lower one-sided bound of the difference at the requested confidence.
    pub lower_bound: f64,
    pub confidence: f64,
    pub resamples: usize,
}

impl BootstrapResult {
    /// True when `mean(a) > mean(b)` at the bootstrap confidence.
    pub fn a_exceeds_b(&self) -> bool {
        self.lower_bound > 0.0
    }
}

/// Percentile bootstrap of the difference of means, resampling each sample
/// independently.
pub fn bootstrap_mean_diff(
    a: &[f64],
    b: &[f64],
    resamples: usize,
    confidence: f64,
    seed: u64,
) -> Result<BootstrapResult> {
    if a.is_empty() || b.is_empty() || resamples == 0 {
        return Err(Error::InvalidParameter("bootstrap needs non-empty samples".into()));
    }
    let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut diffs: Vec<f64> = (0..resamples)
        .map(|_| {
            let ma = (0..a.len()).map(|_| a[rng.random_range(0..a.len())]).sum::<f64>() / a.len() as f64;
            let mb = (0..b.len()).map(|_| b[rng.random_range(0..b.len())]).sum::<f64>() / b.len() as f64;
            ma - mb
        })
        .collect();
    diffs.sort_by(f64::total_cmp);
    let idx = (((1.0 - confidence) * resamples as f64).floor() as usize).min(resamples - 1);
    Ok(BootstrapResult { mean_diff: mean(a) - mean(b), lower_bound: diffs[idx], confidence, resamples })
}
