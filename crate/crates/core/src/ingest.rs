//! Membership and attribute files, name normalization, and a synthetic
//! affiliation-network generator.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};
use crate::graph::{build_bipartite, BipartiteNetwork, Weight, WeightedNetwork};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MembershipRecord {
    pub board_id: String,
    pub director_id: String,
    /// Director name as it appeared in the source.
    pub raw_name: String,
}

/// Canonical form used for duplicate detection: compatibility decomposition
/// with combining marks dropped, lower case, single inner spaces, trimmed.
pub fn normalize_name(raw: &str) -> String {
    // Lower-casing can itself produce combining marks (e.g. dotted capital I),
    // and decomposition can produce capitals, so fold on both sides.
    let stripped: String = raw.to_lowercase().nfkd().filter(|c| !is_combining_mark(*c)).collect();
    stripped.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" ")
}

fn open_csv(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(file))
}

fn check_header(path: &Path, reader: &mut csv::Reader<File>, expected: &[&str]) -> Result<()> {
    let headers = reader.headers().map_err(|source| Error::Csv { path: path.into(), source })?;
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(Error::EmptyFile(path.into()));
    }
    let found: Vec<String> = headers.iter().map(|h| h.trim().trim_start_matches('\u{feff}').to_lowercase()).collect();
    if found != expected {
        return Err(Error::MalformedRow {
            path: path.into(),
            row: 0,
            message: format!("expected header {:?}, found {:?}", expected.join(","), found.join(",")),
        });
    }
    Ok(())
}

/// Reads a `board_id,director_id` CSV. Identifiers are normalized and rows
/// that coincide after normalization are merged (first occurrence kept).
pub fn load_memberships(path: impl AsRef<Path>) -> Result<Vec<MembershipRecord>> {
    let path = path.as_ref();
    let mut reader = open_csv(path)?;
    check_header(path, &mut reader, &["board_id", "director_id"])?;
    let mut seen = HashSet::new();
    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row_no = i + 1;
        let row = row.map_err(|source| Error::Csv { path: path.into(), source })?;
        if row.len() != 2 {
            return Err(Error::MalformedRow {
                path: path.into(),
                row: row_no,
                message: format!("expected 2 columns, found {}", row.len()),
            });
        }
        let board_id = normalize_name(&row[0]);
        let director_id = normalize_name(&row[1]);
        if board_id.is_empty() || director_id.is_empty() {
            return Err(Error::MalformedRow { path: path.into(), row: row_no, message: "empty identifier".into() });
        }
        if seen.insert((board_id.clone(), director_id.clone())) {
            records.push(MembershipRecord { board_id, director_id, raw_name: row[1].to_string() });
        }
    }
    if records.is_empty() {
        return Err(Error::EmptyFile(path.into()));
    }
    Ok(records)
}

pub fn to_bipartite(records: &[MembershipRecord]) -> Result<BipartiteNetwork> {
    let pairs: Vec<(&str, &str)> = records.iter().map(|r| (r.board_id.as_str(), r.director_id.as_str())).collect();
    build_bipartite(&pairs)
}

/// Reads a `source,target,weight` edge list, as written by the `project` command.
pub fn load_edge_list(path: impl AsRef<Path>) -> Result<WeightedNetwork> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).comment(Some(b'#')).from_reader(file);
    check_header(path, &mut reader, &["source", "target", "weight"])?;
    let mut edges = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row_no = i + 1;
        let row = row.map_err(|source| Error::Csv { path: path.into(), source })?;
        let malformed = |message: String| Error::MalformedRow { path: path.into(), row: row_no, message };
        if row.len() != 3 {
            return Err(malformed(format!("expected 3 columns, found {}", row.len())));
        }
        let w: Weight =
            row[2].trim().parse().map_err(|_| malformed(format!("weight {:?} is not a positive integer", &row[2])))?;
        edges.push((row[0].trim().to_string(), row[1].trim().to_string(), w));
    }
    if edges.is_empty() {
        return Err(Error::EmptyFile(path.into()));
    }
    WeightedNetwork::from_named_edges(&edges)
}

/// Optional per-director data. Missing values stay missing.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct NodeAttributes {
    pub age: Option<u32>,
    pub gender: Option<String>,
    pub nationality: Option<String>,
    /// Number of boards, filled in from the bipartite network.
    pub board_count: Option<u32>,
}

fn non_empty(s: &str) -> Option<String> {
    let t = s.trim();
    (!t.is_empty()).then(|| t.to_string())
}

/// Reads a `director_id,age,gender,nationality` CSV keyed by normalized director id.
pub fn load_attributes(path: impl AsRef<Path>) -> Result<BTreeMap<String, NodeAttributes>> {
    let path = path.as_ref();
    let mut reader = open_csv(path)?;
    check_header(path, &mut reader, &["director_id", "age", "gender", "nationality"])?;
    let mut out = BTreeMap::new();
    for (i, row) in reader.records().enumerate() {
        let row_no = i + 1;
        let row = row.map_err(|source| Error::Csv { path: path.into(), source })?;
        let malformed = |message: String| Error::MalformedRow { path: path.into(), row: row_no, message };
        if row.len() != 4 {
            return Err(malformed(format!("expected 4 columns, found {}", row.len())));
        }
        let id = normalize_name(&row[0]);
        if id.is_empty() {
            return Err(malformed("empty director_id".into()));
        }
        let age = match non_empty(&row[1]) {
            Some(a) => Some(a.parse::<u32>().map_err(|_| malformed(format!("age {a:?} is not an integer")))?),
            None => None,
        };
        out.insert(
            id,
            NodeAttributes { age, gender: non_empty(&row[2]), nationality: non_empty(&row[3]), board_count: None },
        );
    }
    Ok(out)
}

/// Fills `board_count` from the bipartite network, adding empty records for
/// directors without attribute rows.
pub fn attach_board_counts(attrs: &mut BTreeMap<String, NodeAttributes>, bip: &BipartiteNetwork) {
    for (d, name) in bip.directors().iter().enumerate() {
        attrs.entry(name.clone()).or_default().board_count = Some(bip.affiliations(d).len() as u32);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coverage {
    pub gender: f64,
    pub age: f64,
    pub nationality: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemographicSummary {
    pub n_directors: usize,
    pub female_fraction: Option<f64>,
    pub mean_age: Option<f64>,
    /// Share of directors whose nationality differs from `home_nationality`.
    pub nonnational_fraction: Option<f64>,
    pub home_nationality: String,
    /// Fraction of directors for which each field is known.
    pub coverage: Coverage,
}

fn is_female(gender: &str) -> bool {
    matches!(gender.trim().to_lowercase().as_str(), "f" | "female" | "w" | "woman")
}

/// Each statistic is computed over the directors for which its field is present.
pub fn demographic_summary(attrs: &BTreeMap<String, NodeAttributes>, home_nationality: &str) -> DemographicSummary {
    let n = attrs.len();
    let frac = |k: usize| if n == 0 { 0.0 } else { k as f64 / n as f64 };
    let genders: Vec<&str> = attrs.values().filter_map(|a| a.gender.as_deref()).collect();
    let ages: Vec<u32> = attrs.values().filter_map(|a| a.age).collect();
    let nations: Vec<&str> = attrs.values().filter_map(|a| a.nationality.as_deref()).collect();
    let home = home_nationality.trim().to_lowercase();
    DemographicSummary {
        n_directors: n,
        female_fraction: (!genders.is_empty())
            .then(|| genders.iter().filter(|g| is_female(g)).count() as f64 / genders.len() as f64),
        mean_age: (!ages.is_empty()).then(|| ages.iter().map(|&a| f64::from(a)).sum::<f64>() / ages.len() as f64),
        nonnational_fraction: (!nations.is_empty())
            .then(|| nations.iter().filter(|c| c.trim().to_lowercase() != home).count() as f64 / nations.len() as f64),
        home_nationality: home_nationality.to_string(),
        coverage: Coverage { gender: frac(genders.len()), age: frac(ages.len()), nationality: frac(nations.len()) },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SyntheticSpec {
    pub n_boards: usize,
    pub board_size_mean: f64,
    /// Probability that a seat goes to an existing director.
    pub interlock_rate: f64,
    pub rng_seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_boards == 0 {
            return Err(Error::InvalidParameter("n_boards must be positive".into()));
        }
        if self.board_size_mean.is_nan() || self.board_size_mean < 1.0 {
            return Err(Error::InvalidParameter("board_size_mean must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.interlock_rate) {
            return Err(Error::InvalidParameter("interlock_rate must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

/// Synthetic memberships. Board sizes are `2 + Poisson(mean - 2)`; each seat
/// is given, with probability `interlock_rate`, to a uniformly chosen
/// existing director not yet on the board, otherwise to a new director.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Vec<MembershipRecord>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let extra = (spec.board_size_mean - 2.0).max(0.0);
    let poisson = (extra > 0.0).then(|| Poisson::new(extra).expect("positive rate"));
    let mut n_directors = 0usize;
    let mut records = Vec::new();
    for b in 0..spec.n_boards {
        let size = 2 + poisson.as_ref().map_or(0, |p| p.sample(&mut rng) as usize);
        let board_id = format!("B{:04}", b + 1);
        let mut seated: Vec<usize> = Vec::with_capacity(size);
        for _ in 0..size {
            let reuse = rng.random::<f64>() < spec.interlock_rate && n_directors > seated.len();
            let d = if reuse {
                loop {
                    let cand = rng.random_range(0..n_directors);
                    if !seated.contains(&cand) {
                        break cand;
                    }
                }
            } else {
                n_directors += 1;
                n_directors - 1
            };
            seated.push(d);
            let director_id = format!("D{:05}", d + 1);
            records.push(MembershipRecord { board_id: board_id.clone(), raw_name: director_id.clone(), director_id });
        }
    }
    Ok(records)
}

pub fn count_directors(records: &[MembershipRecord]) -> usize {
    records.iter().map(|r| r.director_id.as_str()).collect::<HashSet<_>>().len()
}

/// Bisects the interlock rate so the generated network has about
/// `target_directors` directors (fewer directors as the rate grows).
pub fn tune_interlock_rate(n_boards: usize, board_size_mean: f64, target_directors: usize, seed: u64) -> Result<f64> {
    let count = |rate: f64| -> Result<usize> {
        let spec = SyntheticSpec { n_boards, board_size_mean, interlock_rate: rate, rng_seed: seed };
        Ok(count_directors(&generate_synthetic(&spec)?))
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if count(mid)? > target_directors {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (c_lo, c_hi) = (count(lo)?, count(hi)?);
    Ok(if c_lo.abs_diff(target_directors) <= c_hi.abs_diff(target_directors) { lo } else { hi })
}
