//! Acceptance gate: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p boardnet --test acceptance`.

mod common;

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use boardnet::centrality::{self, ClosenessScope, EigenOptions, PathMetric};
use boardnet::epidemic::{self, NullModelOptions, SiConfig};
use boardnet::graph::generators::{clique_ring, complete, cycle, random_clique_ring, star};
use boardnet::graph::WeightedNetwork;
use boardnet::metrics::{self, ClusteringConvention};
use boardnet::projection::{project_boards, project_directors};
use boardnet::structure::{self, WeightMode};
use boardnet::{build_bipartite, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{brute_force_shells, dense_eigenvector, enumerate_paths, random_connected_graph, random_graph};

/// Reference values are given to two decimals.
const MEAN_DEGREE_TOL: f64 = 0.01;
/// Reference density is in percent with two decimals; tolerance in percentage points.
const DENSITY_PP_TOL: f64 = 0.02;
const PATH_ORACLE_TOL: f64 = 1e-9;
const EIGEN_ORACLE_TOL: f64 = 1e-8;
const CALIBRATION_SIGMAS: f64 = 3.0;
const CONFIDENCE: f64 = 0.95;
const BOOTSTRAP_RESAMPLES: usize = 4000;

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

/// Connected graph with exactly `n` nodes and `e` edges: a path plus chords.
fn graph_with_counts(n: usize, e: usize) -> WeightedNetwork {
    assert!(e + 1 >= n);
    let mut edges: Vec<(usize, usize, u32)> = (1..n).map(|i| (i - 1, i, 1)).collect();
    let mut gap = 2;
    'outer: while edges.len() < e {
        for a in 0..n - gap {
            if edges.len() == e {
                break 'outer;
            }
            edges.push((a, a + gap, 1));
        }
        gap += 1;
    }
    WeightedNetwork::new((0..n).map(|i| format!("v{i}")).collect(), edges).unwrap()
}

/// Forest with `n` nodes and `e < n` edges.
fn forest_with_counts(n: usize, e: usize) -> WeightedNetwork {
    let edges: Vec<_> = (1..=e).map(|i| (i - 1, i, 1)).collect();
    WeightedNetwork::new((0..n).map(|i| format!("v{i}")).collect(), edges).unwrap()
}

fn c1_summary_identities() -> Outcome {
    let cases = [(graph_with_counts(818, 3971), 9.71, 1.19), (forest_with_counts(108, 91), 1.69, 1.57)];
    let mut report = Vec::new();
    for (net, k_ref, density_ref) in cases {
        let s = metrics::summary(&net, ClusteringConvention::ExcludeLowDegree).map_err(|e| e.to_string())?;
        let density_pct = 100.0 * s.density;
        ensure((s.mean_degree - k_ref).abs() <= MEAN_DEGREE_TOL, || {
            format!("N={}: <k>={} vs reference {k_ref}", s.n_nodes, s.mean_degree)
        })?;
        ensure((density_pct - density_ref).abs() <= DENSITY_PP_TOL, || {
            format!("N={}: density={density_pct}% vs reference {density_ref}%", s.n_nodes)
        })?;
        report.push(format!("N={} E={} <k>={:.3} density={:.3}%", s.n_nodes, s.n_edges, s.mean_degree, density_pct));
    }
    Ok(report.join("; "))
}

fn c2_projection_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in 0..200 {
        let l = rng.random_range(1..=12);
        let m = rng.random_range(1..=12);
        let p = rng.random_range(0.1..0.7);
        let mut pairs = Vec::new();
        for b in 0..l {
            for d in 0..m {
                if rng.random::<f64>() < p {
                    pairs.push((format!("b{b}"), format!("d{d}")));
                }
            }
        }
        if pairs.is_empty() {
            pairs.push(("b0".into(), "d0".into()));
        }
        let bip = build_bipartite(&pairs).map_err(|e| e.to_string())?;

        // Dense B over the names that actually occur.
        let boards: Vec<String> =
            pairs.iter().map(|p| p.0.clone()).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        let dirs: Vec<String> =
            pairs.iter().map(|p| p.1.clone()).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        let mut b = vec![vec![0u32; dirs.len()]; boards.len()];
        for (bn, dn) in &pairs {
            let i = boards.iter().position(|x| x == bn).unwrap();
            let j = dirs.iter().position(|x| x == dn).unwrap();
            b[i][j] = 1;
        }
        let btb = |i: usize, j: usize| (0..boards.len()).map(|r| b[r][i] * b[r][j]).sum::<u32>();
        let bbt = |i: usize, j: usize| (0..dirs.len()).map(|c| b[i][c] * b[j][c]).sum::<u32>();

        for (proj, names, product) in [
            (project_directors(&bip), &dirs, &btb as &dyn Fn(usize, usize) -> u32),
            (project_boards(&bip), &boards, &bbt),
        ] {
            let net = &proj.network;
            ensure(net.node_count() == names.len(), || format!("case {case}: node count"))?;
            for (i, a) in names.iter().enumerate() {
                let ia = net.index_of(a).map_err(|e| e.to_string())?;
                ensure(proj.diagonal[ia] == product(i, i), || format!("case {case}: diagonal of {a}"))?;
                for (j, c) in names.iter().enumerate().skip(i + 1) {
                    let ic = net.index_of(c).map_err(|e| e.to_string())?;
                    let w = net.weight(ia, ic).unwrap_or(0);
                    ensure(w == product(i, j), || format!("case {case}: {a}-{c} weight {w} vs {}", product(i, j)))?;
                }
            }
        }
    }
    Ok("200 networks, both sides and diagonals exact".into())
}

fn c3_centrality_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for case in 0..200 {
        let n = rng.random_range(2..=8);
        let net = random_connected_graph(&mut rng, n, 4);
        for metric in [PathMetric::Hops, PathMetric::InverseWeight] {
            let oracle = enumerate_paths(&net, metric == PathMetric::InverseWeight);
            let (nb, eb) = centrality::betweenness(&net, metric);
            let cl = centrality::closeness(&net, ClosenessScope::Whole, metric).map_err(|e| e.to_string())?;
            for v in 0..n {
                worst = worst.max((nb[v] - oracle.node_betweenness[v]).abs());
                ensure(close(nb[v], oracle.node_betweenness[v], PATH_ORACLE_TOL), || {
                    format!("case {case} {metric:?}: node {v} betweenness {} vs {}", nb[v], oracle.node_betweenness[v])
                })?;
                let h = cl[v].ok_or_else(|| format!("case {case}: closeness missing"))?;
                ensure(close(h, oracle.closeness[v], PATH_ORACLE_TOL), || {
                    format!("case {case} {metric:?}: node {v} closeness {h} vs {}", oracle.closeness[v])
                })?;
            }
            for (e, edge) in net.edges().iter().enumerate() {
                let want = oracle.edge_betweenness[&(edge.u, edge.v)];
                ensure(close(eb[e], want, PATH_ORACLE_TOL), || {
                    format!("case {case} {metric:?}: edge {e} betweenness {} vs {want}", eb[e])
                })?;
            }
        }
        for use_weights in [false, true] {
            let got = centrality::eigenvector_centrality(&net, EigenOptions { use_weights, ..Default::default() })
                .map_err(|e| format!("case {case}: {e}"))?;
            let want = dense_eigenvector(&net, use_weights);
            for (v, want_v) in want.iter().enumerate() {
                ensure((got.scores[v] - want_v).abs() <= EIGEN_ORACLE_TOL, || {
                    format!("case {case} weights={use_weights}: eigenvector {v} {} vs {}", got.scores[v], want[v])
                })?;
            }
        }
    }
    Ok(format!("200 graphs, hop and 1/w paths, max betweenness deviation {worst:.1e}"))
}

fn c4_kcore_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut deepest = 0;
    for case in 0..200 {
        let n = rng.random_range(1..=12);
        let p = rng.random_range(0.05..0.9);
        let net = random_graph(&mut rng, n, p, 1);
        let got = structure::k_core_decomposition(&net);
        let want = brute_force_shells(&net);
        ensure(got.shell_index == want, || format!("case {case}: {:?} vs {want:?}", got.shell_index))?;
        deepest = deepest.max(got.max_core);
    }
    Ok(format!("200 graphs, deepest core {deepest}"))
}

fn c5_rewire_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut swaps = 0;
    let mut done = 0;
    while done < 100 {
        let n = rng.random_range(5..=30);
        let p = rng.random_range(0.1..0.6);
        let net = random_graph(&mut rng, n, p, 5);
        if net.edge_count() < 2 {
            continue;
        }
        let seed = rng.random();
        let r = structure::rewire_degree_preserving(&net, structure::DEFAULT_SWAPS_PER_EDGE, seed, WeightMode::Carry);
        let g = &r.network;
        ensure(g.degrees() == net.degrees(), || format!("graph {done}: degree sequence changed"))?;
        ensure(g.weight_multiset() == net.weight_multiset(), || format!("graph {done}: weights changed"))?;
        let mut seen = std::collections::HashSet::new();
        for e in g.edges() {
            ensure(e.u != e.v, || format!("graph {done}: self-loop"))?;
            ensure(seen.insert((e.u.min(e.v), e.u.max(e.v))), || format!("graph {done}: parallel edge"))?;
        }
        swaps += r.successful_swaps;
        done += 1;
    }
    Ok(format!("100 graphs, {swaps} successful swaps"))
}

fn c6_transmission_calibration() -> Outcome {
    const TRIALS: usize = 100_000;
    let net = WeightedNetwork::new(vec!["a".into(), "b".into()], vec![(0, 1, 2)]).unwrap();
    let cfg =
        SiConfig { beta: 0.05, runs: TRIALS, max_steps: 1, seed: 6, seed_node: Some("a".into()), ..Default::default() };
    let trace = epidemic::run_si(&net, &cfg).map_err(|e| e.to_string())?;
    let hits = trace.runs.iter().filter(|r| r.counts.get(1) == Some(&2)).count();
    let p = 0.1;
    let rate = hits as f64 / TRIALS as f64;
    let se = (p * (1.0 - p) / TRIALS as f64).sqrt();
    ensure((rate - p).abs() <= CALIBRATION_SIGMAS * se, || format!("rate {rate} vs {p} (se {se:.4})"))?;
    Ok(format!("rate {rate:.4}, expected 0.1 +/- {:.4}", CALIBRATION_SIGMAS * se))
}

fn si_config(seed: u64) -> SiConfig {
    SiConfig { beta: 0.05, runs: 500, seed, ..Default::default() }
}

fn c7_slowdown() -> Outcome {
    let net = clique_ring(10, 8, 1);
    let cmp =
        epidemic::compare_with_random(&net, &si_config(7), &NullModelOptions::default()).map_err(|e| e.to_string())?;
    let real = cmp.real.passage_times(0.9);
    let null = cmp.null.passage_times(0.9);
    let boot =
        epidemic::bootstrap_mean_diff(&real, &null, BOOTSTRAP_RESAMPLES, CONFIDENCE, 77).map_err(|e| e.to_string())?;
    let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
    let summary = format!(
        "t90 real {:.1} vs null {:.1}, one-sided 95% lower bound on difference {:.2}",
        mean(&real),
        mean(&null),
        boot.lower_bound
    );
    ensure(boot.a_exceeds_b(), || summary.clone())?;
    Ok(summary)
}

fn c8_suppression() -> Outcome {
    let net = random_clique_ring(10, 8, 6, 1);
    let r =
        epidemic::suppress_and_rerun(&net, &si_config(8), epidemic::DEFAULT_SUPPRESSION).map_err(|e| e.to_string())?;
    let expected = (epidemic::DEFAULT_SUPPRESSION * net.edge_count() as f64).ceil() as usize;
    ensure(r.removed.len() == expected, || format!("removed {} edges, expected {expected}", r.removed.len()))?;
    ensure(r.still_connected, || "suppression disconnected the ring".into())?;
    let after = r.after.passage_times(0.9);
    let before = r.before.passage_times(0.9);
    let boot = epidemic::bootstrap_mean_diff(&after, &before, BOOTSTRAP_RESAMPLES, CONFIDENCE, 88)
        .map_err(|e| e.to_string())?;
    let t = |s: &epidemic::EpidemicTrace| s.threshold(0.9).and_then(|x| x.mean_step).unwrap_or(f64::NAN);
    let summary = format!(
        "{} of {} edges removed, connected; t90 {:.1} -> {:.1}, lower bound {:.2}",
        r.removed.len(),
        net.edge_count(),
        t(&r.before),
        t(&r.after),
        boot.lower_bound
    );
    ensure(boot.a_exceeds_b(), || summary.clone())?;
    Ok(summary)
}

fn two_cliques(a: usize, b: usize, bridge: bool) -> WeightedNetwork {
    let mut edges = Vec::new();
    for (offset, size) in [(0, a), (a, b)] {
        for i in 0..size {
            for j in (i + 1)..size {
                edges.push((offset + i, offset + j, 1));
            }
        }
    }
    if bridge {
        edges.push((0, a, 1));
    }
    WeightedNetwork::new((0..a + b).map(|i| format!("v{i}")).collect(), edges).unwrap()
}

fn c9_assortativity() -> Outcome {
    for (name, g) in [("cycle", cycle(10)), ("complete", complete(6))] {
        ensure(matches!(metrics::knn_vs_degree(&g), Err(Error::InsufficientDegreeClasses { .. })), || {
            format!("{name}: regular graph not rejected")
        })?;
    }
    let star_slope = metrics::knn_vs_degree(&star(8)).map_err(|e| e.to_string())?.fit.slope;
    ensure(star_slope < 0.0, || format!("star slope {star_slope}"))?;
    let mut slopes = Vec::new();
    for bridge in [false, true] {
        let s = metrics::knn_vs_degree(&two_cliques(4, 9, bridge)).map_err(|e| e.to_string())?.fit.slope;
        ensure(s > 0.0, || format!("two cliques (bridge={bridge}) slope {s}"))?;
        slopes.push(s);
    }
    Ok(format!("regular rejected, star slope {star_slope:.2}, clique pair slopes {:.2}/{:.2}", slopes[0], slopes[1]))
}

fn read_dir(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect()
}

fn c10_cli_determinism() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_boardnet");
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input = ["--synthetic-boards", "40", "--board-size-mean", "6", "--interlock-rate", "0.2", "--seed", "1"];
    let commands: [(&str, &[&str]); 7] = [
        ("ingest", &[]),
        ("project", &[]),
        ("report", &[]),
        ("centrality", &["--top", "5"]),
        ("kcore", &[]),
        ("rewire", &[]),
        ("simulate", &["--runs", "60", "--null-replicas", "15", "--dump-runs"]),
    ];
    let mut files = 0;
    for (cmd, extra) in commands {
        let mut outputs = Vec::new();
        for (label, threads) in [("a", "1"), ("b", "1"), ("c", "4")] {
            let out = tmp.path().join(format!("{cmd}_{label}"));
            let status = Command::new(exe)
                .arg(cmd)
                .args(input)
                .args(extra)
                .arg("--out")
                .arg(&out)
                .env("BOARDNET_THREADS", threads)
                .output()
                .map_err(|e| e.to_string())?;
            ensure(status.status.success(), || {
                format!("{cmd} threads={threads} failed: {}", String::from_utf8_lossy(&status.stderr))
            })?;
            outputs.push(read_dir(&out));
        }
        ensure(!outputs[0].is_empty(), || format!("{cmd}: no output files"))?;
        ensure(outputs[0] == outputs[1], || format!("{cmd}: repeated run differs"))?;
        ensure(outputs[0] == outputs[2], || format!("{cmd}: 1 vs 4 workers differ"))?;
        files += outputs[0].len();
    }
    Ok(format!("7 commands, {files} files identical across repeats and worker counts"))
}

fn main() {
    let criteria: [(&str, Check); 10] = [
        ("summary identities", c1_summary_identities),
        ("projection oracle", c2_projection_oracle),
        ("centrality oracle", c3_centrality_oracle),
        ("k-core oracle", c4_kcore_oracle),
        ("rewiring invariants", c5_rewire_invariants),
        ("transmission calibration", c6_transmission_calibration),
        ("slowdown vs null model", c7_slowdown),
        ("suppression slowdown", c8_suppression),
        ("assortativity directions", c9_assortativity),
        ("CLI determinism", c10_cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS {:>2} {name} ({secs:.1}s): {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.1}s): {msg}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
