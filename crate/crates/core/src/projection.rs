//! One-mode projections of the bipartite network.
//!
//! Edge weights count shared affiliations. Each board's member list is
//! expanded into a clique and weights accumulate over boards, which is the
//! off-diagonal part of `B^T B` (directors) or `B B^T` (boards) without
//! forming the dense product.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::graph::{BipartiteNetwork, Weight, WeightedNetwork};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Directors,
    Boards,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Directors => "directors",
            Side::Boards => "boards",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionResult {
    /// Off-diagonal part of the projection matrix.
    pub network: WeightedNetwork,
    /// Diagonal entries: affiliation count per node (boards per director, or
    /// board size).
    pub diagonal: Vec<u32>,
    pub side: Side,
}

/// Directors projection: directors are linked by the number of boards they share.
pub fn project_directors(bip: &BipartiteNetwork) -> ProjectionResult {
    let groups: Vec<&[usize]> = (0..bip.n_boards()).map(|b| bip.members(b)).collect();
    let network = clique_expansion(bip.directors(), &groups);
    let diagonal = (0..bip.n_directors()).map(|d| bip.affiliations(d).len() as u32).collect();
    ProjectionResult { network, diagonal, side: Side::Directors }
}

/// Boards projection: boards are linked by the number of directors they share.
pub fn project_boards(bip: &BipartiteNetwork) -> ProjectionResult {
    let groups: Vec<&[usize]> = (0..bip.n_directors()).map(|d| bip.affiliations(d)).collect();
    let network = clique_expansion(bip.boards(), &groups);
    let diagonal = (0..bip.n_boards()).map(|b| bip.members(b).len() as u32).collect();
    ProjectionResult { network, diagonal, side: Side::Boards }
}

pub fn project(bip: &BipartiteNetwork, side: Side) -> ProjectionResult {
    match side {
        Side::Directors => project_directors(bip),
        Side::Boards => project_boards(bip),
    }
}

fn clique_expansion(names: &[String], groups: &[&[usize]]) -> WeightedNetwork {
    let mut weights: BTreeMap<(usize, usize), Weight> = BTreeMap::new();
    for members in groups {
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                *weights.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
    }
    let edges: Vec<_> = weights.into_iter().map(|((a, b), w)| (a, b, w)).collect();
    WeightedNetwork::new(names.to_vec(), edges).expect("projection of a valid bipartite network")
}
