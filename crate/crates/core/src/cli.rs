//! Command-line driver: ingestion, projection, analyses and file output.
//!
//! Every output file starts with a line naming the command and a hash of the
//! configuration that produced it (a `#` comment in CSV files, a
//! `config_hash` field in JSON files). The output directory and worker count
//! are excluded from the hash; neither affects the content.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::centrality::{self, CentralityOptions, PathMetric};
use crate::epidemic::{self, NullModelOptions, SiConfig};
use crate::error::{Error, Result};
use crate::graph::WeightedNetwork;
use crate::ingest::{self, SyntheticSpec};
use crate::metrics::{self, ClusteringConvention};
use crate::projection::{self, Side};
use crate::structure::{self, WeightMode};

/// Environment variable overriding the worker count.
pub const THREADS_ENV: &str = "BOARDNET_THREADS";

#[derive(Debug, Parser)]
#[command(name = "boardnet", version, about = "Board interlock and affiliation-network analysis")]
pub struct Cli {
    /// Worker threads (default: BOARDNET_THREADS or all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Normalize memberships and summarize director attributes.
    Ingest(IngestArgs),
    /// Write the weighted one-mode projections as edge lists.
    Project(SideArgs),
    /// Summary statistics, distributions and degree-class regressions.
    Report(ReportArgs),
    /// Centrality scores and ranking tables.
    Centrality(CentralityArgs),
    /// k-core shell indices, bridges and local bridges.
    Kcore(SideArgs),
    /// Degree-preserving randomization.
    Rewire(RewireArgs),
    /// SI spreading on the real, randomized and link-suppressed networks.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InputArgs {
    /// Membership CSV with header `board_id,director_id`.
    #[arg(long, conflicts_with_all = ["synthetic_boards", "edges"])]
    pub memberships: Option<PathBuf>,

    /// Director attribute CSV with header `director_id,age,gender,nationality`.
    #[arg(long)]
    pub attributes: Option<PathBuf>,

    /// Weighted edge list (`source,target,weight`) analysed as-is instead of a projection.
    #[arg(long, conflicts_with = "synthetic_boards")]
    pub edges: Option<PathBuf>,

    /// Generate a synthetic affiliation network with this many boards.
    #[arg(long)]
    pub synthetic_boards: Option<usize>,

    #[arg(long, default_value_t = 8.0)]
    pub board_size_mean: f64,

    #[arg(long, default_value_t = 0.1)]
    pub interlock_rate: f64,

    /// Global seed for the generator and every randomized analysis.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    /// Output directory.
    #[arg(long, default_value = "out")]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SideChoice {
    Directors,
    Boards,
    Both,
}

impl SideChoice {
    fn sides(self) -> Vec<Side> {
        match self {
            SideChoice::Directors => vec![Side::Directors],
            SideChoice::Boards => vec![Side::Boards],
            SideChoice::Both => vec![Side::Directors, Side::Boards],
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct IngestArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Nationality counted as national in the demographic summary.
    #[arg(long, default_value = "CH")]
    pub home_nationality: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SideArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value_t = SideChoice::Both)]
    pub side: SideChoice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClusteringChoice {
    /// Skip nodes of degree below two.
    Exclude,
    /// Count nodes of degree below two as zero.
    Zero,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReportArgs {
    #[command(flatten)]
    pub side: SideArgs,
    #[arg(long, value_enum, default_value_t = ClusteringChoice::Exclude)]
    pub clustering: ClusteringChoice,
    /// Restrict the regressions to the largest connected component.
    #[arg(long)]
    pub lcc: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CentralityArgs {
    #[command(flatten)]
    pub side: SideArgs,
    /// Entries per ranking table.
    #[arg(long, default_value_t = 10)]
    pub top: usize,
    /// Use 1/w as path length for betweenness and closeness.
    #[arg(long)]
    pub weighted_paths: bool,
    /// Use edge weights in the adjacency matrix for eigenvector centrality.
    #[arg(long)]
    pub weighted_eigen: bool,
    /// Scale betweenness by 2/((N-1)(N-2)).
    #[arg(long)]
    pub normalized: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightModeChoice {
    Carry,
    Unit,
}

impl From<WeightModeChoice> for WeightMode {
    fn from(c: WeightModeChoice) -> Self {
        match c {
            WeightModeChoice::Carry => WeightMode::Carry,
            WeightModeChoice::Unit => WeightMode::Unit,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RewireArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value_t = SideChoice::Directors)]
    pub side: SideChoice,
    #[arg(long, default_value_t = structure::DEFAULT_SWAPS_PER_EDGE)]
    pub swaps_per_edge: f64,
    #[arg(long, value_enum, default_value_t = WeightModeChoice::Carry)]
    pub weight_mode: WeightModeChoice,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value_t = SideChoice::Directors)]
    pub side: SideChoice,
    #[arg(long, default_value_t = epidemic::DEFAULT_BETA)]
    pub beta: f64,
    #[arg(long, default_value_t = epidemic::DEFAULT_RUNS)]
    pub runs: usize,
    #[arg(long, default_value_t = epidemic::DEFAULT_MAX_STEPS)]
    pub max_steps: usize,
    /// Fraction of edges removed in decreasing betweenness order.
    #[arg(long, default_value_t = epidemic::DEFAULT_SUPPRESSION)]
    pub fraction: f64,
    /// Randomized replicas for the null model (default: one per run).
    #[arg(long)]
    pub null_replicas: Option<usize>,
    #[arg(long, default_value_t = structure::DEFAULT_SWAPS_PER_EDGE)]
    pub swaps_per_edge: f64,
    #[arg(long, value_enum, default_value_t = WeightModeChoice::Carry)]
    pub weight_mode: WeightModeChoice,
    /// Initially infected node (default: uniform per run).
    #[arg(long)]
    pub seed_node: Option<String>,
    /// Also write every individual run.
    #[arg(long)]
    pub dump_runs: bool,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Ingest(_) => "ingest",
            Command::Project(_) => "project",
            Command::Report(_) => "report",
            Command::Centrality(_) => "centrality",
            Command::Kcore(_) => "kcore",
            Command::Rewire(_) => "rewire",
            Command::Simulate(_) => "simulate",
        }
    }

    fn input(&self) -> &InputArgs {
        match self {
            Command::Ingest(a) => &a.input,
            Command::Project(a) | Command::Kcore(a) => &a.input,
            Command::Report(a) => &a.side.input,
            Command::Centrality(a) => &a.side.input,
            Command::Rewire(a) => &a.input,
            Command::Simulate(a) => &a.input,
        }
    }

    /// Short hex digest of the serialized configuration.
    pub fn config_hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("configuration serializes");
        hex::encode(&Sha256::digest(&json)[..8])
    }
}

struct Output {
    dir: PathBuf,
    command: &'static str,
    hash: String,
}

fn fmt_opt<T: Display>(v: Option<T>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Output {
    fn create(dir: &Path, command: &'static str, hash: String) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(Output { dir: dir.to_path_buf(), command, hash })
    }

    fn write(&self, name: &str, content: &str) -> Result<()> {
        let path = self.dir.join(name);
        let mut f = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        f.write_all(content.as_bytes()).map_err(|e| Error::io(&path, e))
    }

    fn csv(&self, name: &str, header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
        let mut s = format!("# boardnet {} config={}\n{header}\n", self.command, self.hash);
        for row in rows {
            let fields: Vec<String> = row.iter().map(|f| csv_field(f)).collect();
            s.push_str(&fields.join(","));
            s.push('\n');
        }
        self.write(name, &s)
    }

    fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        #[derive(Serialize)]
        struct Envelope<'a, T> {
            generator: String,
            config_hash: &'a str,
            data: &'a T,
        }
        let env = Envelope { generator: format!("boardnet {}", self.command), config_hash: &self.hash, data: value };
        let mut s = serde_json::to_string_pretty(&env)?;
        s.push('\n');
        self.write(name, &s)
    }
}

/// Loaded input: either a bipartite network (file or synthetic) or a plain edge list.
enum Input {
    Bipartite { records: Vec<ingest::MembershipRecord>, bip: crate::graph::BipartiteNetwork },
    Edges(WeightedNetwork),
}

fn load_input(args: &InputArgs) -> Result<Input> {
    if let Some(path) = &args.edges {
        return Ok(Input::Edges(ingest::load_edge_list(path)?));
    }
    let records = match (&args.memberships, args.synthetic_boards) {
        (Some(path), _) => ingest::load_memberships(path)?,
        (None, Some(n_boards)) => ingest::generate_synthetic(&SyntheticSpec {
            n_boards,
            board_size_mean: args.board_size_mean,
            interlock_rate: args.interlock_rate,
            rng_seed: args.seed,
        })?,
        (None, None) => {
            return Err(Error::InvalidParameter(
                "one of --memberships, --edges or --synthetic-boards is required".into(),
            ))
        }
    };
    let bip = ingest::to_bipartite(&records)?;
    Ok(Input::Bipartite { records, bip })
}

impl Input {
    /// Networks to analyse, labelled by side. An edge list is a single network labelled `network`.
    fn networks(&self, choice: SideChoice) -> Vec<(String, WeightedNetwork, Option<Vec<u32>>)> {
        match self {
            Input::Edges(net) => vec![("network".into(), net.clone(), None)],
            Input::Bipartite { bip, .. } => choice
                .sides()
                .into_iter()
                .map(|side| {
                    let p = projection::project(bip, side);
                    (side.as_str().to_string(), p.network, Some(p.diagonal))
                })
                .collect(),
        }
    }
}

fn distribution_rows(d: &metrics::DistributionTable) -> Vec<Vec<String>> {
    (0..d.len())
        .map(|i| vec![d.support[i].to_string(), d.pmf[i].to_string(), d.ccdf[i].to_string(), d.cdf[i].to_string()])
        .collect()
}

const DISTRIBUTION_HEADER: &str = "value,pmf,ccdf,cdf";

fn edge_rows(net: &WeightedNetwork) -> Vec<Vec<String>> {
    net.edges()
        .iter()
        .map(|e| vec![net.name(e.u).to_string(), net.name(e.v).to_string(), e.weight.to_string()])
        .collect()
}

fn cmd_ingest(args: &IngestArgs, out: &Output) -> Result<()> {
    let input = load_input(&args.input)?;
    let Input::Bipartite { records, bip } = &input else {
        return Err(Error::InvalidParameter("ingest needs membership data, not an edge list".into()));
    };
    out.csv(
        "memberships.csv",
        "board_id,director_id,raw_name",
        records.iter().map(|r| vec![r.board_id.clone(), r.director_id.clone(), r.raw_name.clone()]),
    )?;
    let mut attrs = match &args.input.attributes {
        Some(path) => ingest::load_attributes(path)?,
        None => BTreeMap::new(),
    };
    let known = attrs.len();
    ingest::attach_board_counts(&mut attrs, bip);
    out.csv(
        "directors.csv",
        "director_id,boards,age,gender,nationality",
        attrs.iter().map(|(id, a)| {
            vec![
                id.clone(),
                fmt_opt(a.board_count),
                fmt_opt(a.age),
                a.gender.clone().unwrap_or_default(),
                a.nationality.clone().unwrap_or_default(),
            ]
        }),
    )?;
    #[derive(Serialize)]
    struct IngestSummary {
        boards: usize,
        directors: usize,
        memberships: usize,
        attribute_rows: usize,
        demographics: ingest::DemographicSummary,
    }
    out.json(
        "ingest.json",
        &IngestSummary {
            boards: bip.n_boards(),
            directors: bip.n_directors(),
            memberships: bip.n_incidences(),
            attribute_rows: known,
            demographics: ingest::demographic_summary(&attrs, &args.home_nationality),
        },
    )
}

fn cmd_project(args: &SideArgs, out: &Output) -> Result<()> {
    let input = load_input(&args.input)?;
    for (label, net, diagonal) in input.networks(args.side) {
        out.csv(&format!("projection_{label}.csv"), "source,target,weight", edge_rows(&net))?;
        if let Some(diag) = diagonal {
            out.csv(
                &format!("diagonal_{label}.csv"),
                "node,affiliations",
                net.nodes().iter().zip(diag).map(|(n, d)| vec![n.clone(), d.to_string()]),
            )?;
        }
    }
    Ok(())
}

fn cmd_report(args: &ReportArgs, out: &Output) -> Result<()> {
    let input = load_input(&args.side.input)?;
    let convention = match args.clustering {
        ClusteringChoice::Exclude => ClusteringConvention::ExcludeLowDegree,
        ClusteringChoice::Zero => ClusteringConvention::IncludeAsZero,
    };
    let mut summaries = BTreeMap::new();
    for (label, net, _) in input.networks(args.side.side) {
        summaries.insert(label.clone(), metrics::summary(&net, convention)?);
        out.csv(
            &format!("degree_{label}.csv"),
            DISTRIBUTION_HEADER,
            distribution_rows(&metrics::degree_distribution(&net, false)),
        )?;
        out.csv(
            &format!("degree_lcc_{label}.csv"),
            DISTRIBUTION_HEADER,
            distribution_rows(&metrics::degree_distribution(&net, true)),
        )?;
        if net.edge_count() > 0 {
            out.csv(
                &format!("weight_{label}.csv"),
                DISTRIBUTION_HEADER,
                distribution_rows(&metrics::weight_distribution(&net)?),
            )?;
            out.csv(
                &format!("strength_{label}.csv"),
                DISTRIBUTION_HEADER,
                distribution_rows(&metrics::strength_distribution(&net)?),
            )?;
        }

        let fit_net = if args.lcc { structure::largest_component(&net) } else { net.clone() };
        let knn = metrics::knn_vs_degree(&fit_net);
        out.csv(
            &format!("knn_{label}.csv"),
            "degree,mean_neighbor_degree",
            metrics::knn_points(&fit_net).into_iter().map(|(k, v)| vec![k.to_string(), v.to_string()]),
        )?;
        #[derive(Serialize)]
        struct Regressions {
            strength_vs_degree: Option<metrics::StrengthFit>,
            knn_vs_degree: Option<metrics::RegressionResult>,
            notes: Vec<String>,
        }
        let strength = metrics::strength_vs_degree(&fit_net);
        let mut notes = Vec::new();
        if let Err(e) = &strength {
            notes.push(format!("strength_vs_degree: {e}"));
        }
        if let Err(e) = &knn {
            notes.push(format!("knn_vs_degree: {e}"));
        }
        out.json(
            &format!("regressions_{label}.json"),
            &Regressions { strength_vs_degree: strength.ok(), knn_vs_degree: knn.ok().map(|k| k.fit), notes },
        )?;
    }
    out.json("summary.json", &summaries)
}

fn cmd_centrality(args: &CentralityArgs, out: &Output) -> Result<()> {
    let input = load_input(&args.side.input)?;
    let opts = CentralityOptions {
        metric: if args.weighted_paths { PathMetric::InverseWeight } else { PathMetric::Hops },
        eigen_weighted: args.weighted_eigen,
        normalize_betweenness: args.normalized,
    };
    for (label, net, _) in input.networks(args.side.side) {
        let lcc = structure::largest_component(&net);
        let table = centrality::centrality_table(&lcc, opts)?;
        out.csv(
            &format!("centrality_{label}.csv"),
            "node,degree,betweenness,closeness,eigenvector",
            centrality::key_actor_scatter(&table).into_iter().map(|r| {
                vec![
                    r.node,
                    r.degree.to_string(),
                    r.betweenness.to_string(),
                    r.closeness.to_string(),
                    r.eigenvector.to_string(),
                ]
            }),
        )?;
        #[derive(Serialize)]
        struct Ranks {
            lcc_nodes: usize,
            total_nodes: usize,
            rankings: Vec<centrality::Ranking>,
        }
        out.json(
            &format!("ranks_{label}.json"),
            &Ranks {
                lcc_nodes: lcc.node_count(),
                total_nodes: net.node_count(),
                rankings: centrality::rank_table(&table, args.top),
            },
        )?;
    }
    Ok(())
}

fn cmd_kcore(args: &SideArgs, out: &Output) -> Result<()> {
    let input = load_input(&args.input)?;
    for (label, net, _) in input.networks(args.side) {
        let cores = structure::k_core_decomposition(&net);
        out.csv(
            &format!("kcore_{label}.csv"),
            "node,degree,coreness",
            (0..net.node_count())
                .map(|v| vec![net.name(v).to_string(), net.degree(v).to_string(), cores.shell_index[v].to_string()]),
        )?;
        let named = |pairs: Vec<(usize, usize)>| -> Vec<[String; 2]> {
            pairs.into_iter().map(|(a, b)| [net.name(a).to_string(), net.name(b).to_string()]).collect()
        };
        let b = structure::bridges_and_local_bridges(&net);
        #[derive(Serialize)]
        struct Shells {
            max_core: usize,
            components: usize,
            lcc_fraction: f64,
            bridges: Vec<[String; 2]>,
            local_bridges: Vec<[String; 2]>,
        }
        out.json(
            &format!("structure_{label}.json"),
            &Shells {
                max_core: cores.max_core,
                components: structure::connected_components(&net).len(),
                lcc_fraction: structure::lcc_fraction(&net),
                bridges: named(b.bridges),
                local_bridges: named(b.local_bridges),
            },
        )?;
    }
    Ok(())
}

fn cmd_rewire(args: &RewireArgs, out: &Output) -> Result<()> {
    let input = load_input(&args.input)?;
    for (label, net, _) in input.networks(args.side) {
        if net.edge_count() < 2 {
            return Err(Error::InvalidParameter(format!("{label}: rewiring needs at least two edges")));
        }
        let report =
            structure::rewire_degree_preserving(&net, args.swaps_per_edge, args.input.seed, args.weight_mode.into());
        out.csv(&format!("rewired_{label}.csv"), "source,target,weight", edge_rows(&report.network))?;
        out.json(&format!("rewire_{label}.json"), &report)?;
    }
    Ok(())
}

fn trace_rows(t: &epidemic::EpidemicTrace) -> Vec<Vec<String>> {
    (0..t.mean.len())
        .map(|s| vec![s.to_string(), t.mean[s].to_string(), t.sd[s].to_string(), t.runs_active[s].to_string()])
        .collect()
}

fn run_rows(t: &epidemic::EpidemicTrace) -> Vec<Vec<String>> {
    t.runs
        .iter()
        .enumerate()
        .flat_map(|(i, r)| {
            r.counts
                .iter()
                .enumerate()
                .map(move |(s, c)| vec![i.to_string(), r.seed_node.clone(), s.to_string(), c.to_string()])
        })
        .collect()
}

fn cmd_simulate(args: &SimulateArgs, out: &Output) -> Result<()> {
    let input = load_input(&args.input)?;
    let cfg = SiConfig {
        beta: args.beta,
        runs: args.runs,
        max_steps: args.max_steps,
        seed: args.input.seed,
        seed_node: args.seed_node.clone(),
        thresholds: epidemic::DEFAULT_THRESHOLDS.to_vec(),
    };
    let null_opts = NullModelOptions {
        replicas: args.null_replicas.unwrap_or(args.runs),
        swaps_per_edge: args.swaps_per_edge,
        weight_mode: args.weight_mode.into(),
    };
    for (label, net, _) in input.networks(args.side) {
        let lcc = structure::largest_component(&net);
        let cmp = epidemic::compare_with_random(&lcc, &cfg, &null_opts)?;
        let sup = epidemic::suppress_and_rerun(&lcc, &cfg, args.fraction)?;
        let header = "step,mean_infected,sd_infected,runs_active";
        out.csv(&format!("epidemic_real_{label}.csv"), header, trace_rows(&cmp.real))?;
        out.csv(&format!("epidemic_null_{label}.csv"), header, trace_rows(&cmp.null))?;
        out.csv(&format!("epidemic_pruned_{label}.csv"), header, trace_rows(&sup.after))?;
        if args.dump_runs {
            let h = "run,seed_node,step,infected";
            out.csv(&format!("runs_real_{label}.csv"), h, run_rows(&cmp.real))?;
            out.csv(&format!("runs_null_{label}.csv"), h, run_rows(&cmp.null))?;
            out.csv(&format!("runs_pruned_{label}.csv"), h, run_rows(&sup.after))?;
        }

        let t90 = |t: &epidemic::EpidemicTrace| t.threshold(0.9).and_then(|s| s.mean_step);
        let ratio = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(a), Some(b)) if b > 0.0 => Some(a / b),
            _ => None,
        };
        let boot = |a: &epidemic::EpidemicTrace, b: &epidemic::EpidemicTrace, salt: u64| {
            epidemic::bootstrap_mean_diff(&a.passage_times(0.9), &b.passage_times(0.9), 2000, 0.95, cfg.seed ^ salt)
                .ok()
        };
        #[derive(Serialize)]
        struct Scenario<'a> {
            nodes: usize,
            edges: usize,
            time_to_fraction: &'a [epidemic::ThresholdStat],
        }
        #[derive(Serialize)]
        struct Comparison<'a> {
            lcc_nodes: usize,
            lcc_edges: usize,
            real: Scenario<'a>,
            null: Scenario<'a>,
            pruned: Scenario<'a>,
            null_replicas: usize,
            null_replica_lcc_sizes: &'a [usize],
            removed_edges: &'a [(String, String)],
            pruned_still_connected: bool,
            pruned_lcc_nodes: usize,
            t90_real_over_null: Option<f64>,
            t90_pruned_over_real: Option<f64>,
            real_slower_than_null: Option<epidemic::BootstrapResult>,
            pruned_slower_than_real: Option<epidemic::BootstrapResult>,
        }
        let pruned_edges = lcc.edge_count() - sup.removed.len();
        out.json(
            &format!("epidemic_comparison_{label}.json"),
            &Comparison {
                lcc_nodes: lcc.node_count(),
                lcc_edges: lcc.edge_count(),
                real: Scenario {
                    nodes: lcc.node_count(),
                    edges: lcc.edge_count(),
                    time_to_fraction: &cmp.real.time_to_fraction,
                },
                null: Scenario {
                    nodes: lcc.node_count(),
                    edges: lcc.edge_count(),
                    time_to_fraction: &cmp.null.time_to_fraction,
                },
                pruned: Scenario {
                    nodes: sup.lcc_size_after,
                    edges: pruned_edges,
                    time_to_fraction: &sup.after.time_to_fraction,
                },
                null_replicas: cmp.replica_lcc_sizes.len(),
                null_replica_lcc_sizes: &cmp.replica_lcc_sizes,
                removed_edges: &sup.removed,
                pruned_still_connected: sup.still_connected,
                pruned_lcc_nodes: sup.lcc_size_after,
                t90_real_over_null: cmp.t90_ratio,
                t90_pruned_over_real: ratio(t90(&sup.after), t90(&cmp.real)),
                real_slower_than_null: boot(&cmp.real, &cmp.null, 0x11),
                pruned_slower_than_real: boot(&sup.after, &cmp.real, 0x22),
            },
        )?;
    }
    Ok(())
}

/// Runs one parsed command.
pub fn run(cli: &Cli) -> Result<()> {
    let cmd = &cli.command;
    let out = Output::create(&cmd.input().out, cmd.name(), cmd.config_hash())?;
    match cmd {
        Command::Ingest(a) => cmd_ingest(a, &out),
        Command::Project(a) => cmd_project(a, &out),
        Command::Report(a) => cmd_report(a, &out),
        Command::Centrality(a) => cmd_centrality(a, &out),
        Command::Kcore(a) => cmd_kcore(a, &out),
        Command::Rewire(a) => cmd_rewire(a, &out),
        Command::Simulate(a) => cmd_simulate(a, &out),
    }
}

fn worker_count(cli: &Cli) -> Option<usize> {
    cli.threads.or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok())).filter(|&n| n > 0)
}

/// Binary entry point. Exit codes: 0 ok, 1 analysis error, 2 I/O or configuration error.
pub fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = worker_count(&cli) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} workers: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let config_error = e.is_io() || matches!(e, Error::InvalidParameter(_));
            ExitCode::from(if config_error { 2 } else { 1 })
        }
    }
}
