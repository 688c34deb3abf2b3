//! The two graph representations everything else builds on: the bipartite
//! board/director incidence structure and the weighted one-mode network.
//!
//! Identifiers are opaque strings. Each gets a dense index in first-seen
//! order, and those indices are what the algorithms work with.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};

/// Index of a node inside a [`WeightedNetwork`].
pub type NodeIx = usize;

/// Integer edge weight: the number of shared affiliations.
pub type Weight = u32;

/// Incidence between boards and directors. Entry `(i, j)` is set iff director
/// `j` sits on board `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteNetwork {
    boards: Vec<String>,
    directors: Vec<String>,
    board_members: Vec<Vec<usize>>,
    director_boards: Vec<Vec<usize>>,
}

/// Builds the incidence structure from `(board, director)` pairs.
///
/// Repeated pairs collapse into a single incidence entry. Boards and
/// directors are indexed in order of first appearance.
pub fn build_bipartite<B, D>(memberships: &[(B, D)]) -> Result<BipartiteNetwork>
where
    B: AsRef<str>,
    D: AsRef<str>,
{
    if memberships.is_empty() {
        return Err(Error::NoMemberships);
    }
    let mut board_ix: HashMap<&str, usize> = HashMap::new();
    let mut director_ix: HashMap<&str, usize> = HashMap::new();
    let mut boards = Vec::new();
    let mut directors = Vec::new();
    let mut pairs = BTreeSet::new();

    for (b, d) in memberships {
        let (b, d) = (b.as_ref(), d.as_ref());
        if b.is_empty() || d.is_empty() {
            return Err(Error::EmptyIdentifier);
        }
        let bi = *board_ix.entry(b).or_insert_with(|| {
            boards.push(b.to_string());
            boards.len() - 1
        });
        let di = *director_ix.entry(d).or_insert_with(|| {
            directors.push(d.to_string());
            directors.len() - 1
        });
        pairs.insert((bi, di));
    }
    if let Some(shared) = boards.iter().find(|b| director_ix.contains_key(b.as_str())) {
        return Err(Error::BipartiteViolation(shared.clone()));
    }

    let mut board_members = vec![Vec::new(); boards.len()];
    let mut director_boards = vec![Vec::new(); directors.len()];
    for (bi, di) in pairs {
        board_members[bi].push(di);
        director_boards[di].push(bi);
    }
    for members in &mut director_boards {
        members.sort_unstable();
    }

    Ok(BipartiteNetwork { boards, directors, board_members, director_boards })
}

impl BipartiteNetwork {
    pub fn boards(&self) -> &[String] {
        &self.boards
    }

    pub fn directors(&self) -> &[String] {
        &self.directors
    }

    pub fn n_boards(&self) -> usize {
        self.boards.len()
    }

    pub fn n_directors(&self) -> usize {
        self.directors.len()
    }

    /// Director indices sitting on board `b`, ascending.
    pub fn members(&self, b: usize) -> &[usize] {
        &self.board_members[b]
    }

    /// Board indices of director `d`, ascending.
    pub fn affiliations(&self, d: usize) -> &[usize] {
        &self.director_boards[d]
    }

    pub fn is_member(&self, b: usize, d: usize) -> bool {
        self.board_members[b].binary_search(&d).is_ok()
    }

    pub fn n_incidences(&self) -> usize {
        self.board_members.iter().map(Vec::len).sum()
    }

    /// Dense `l x m` 0/1 incidence matrix, row-major.
    pub fn incidence_matrix(&self) -> Vec<Vec<u8>> {
        let mut m = vec![vec![0u8; self.directors.len()]; self.boards.len()];
        for (b, members) in self.board_members.iter().enumerate() {
            for &d in members {
                m[b][d] = 1;
            }
        }
        m
    }
}

/// An undirected weighted edge, stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub u: NodeIx,
    pub v: NodeIx,
    pub weight: Weight,
}

impl Edge {
    pub fn endpoints(&self) -> (NodeIx, NodeIx) {
        (self.u, self.v)
    }

    pub fn other(&self, x: NodeIx) -> NodeIx {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Undirected weighted simple graph. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedNetwork {
    nodes: Vec<String>,
    index: HashMap<String, NodeIx>,
    adjacency: Vec<Vec<(NodeIx, Weight)>>,
    edges: Vec<Edge>,
}

impl WeightedNetwork {
    /// Builds a network over `nodes` from `(u, v, weight)` index triples.
    ///
    /// Rejects self-loops, parallel edges, zero weights and duplicate node names.
    pub fn new<I>(nodes: Vec<String>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeIx, NodeIx, Weight)>,
    {
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, name) in nodes.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::DuplicateNode(name.clone()));
            }
        }
        let n = nodes.len();
        let mut list = Vec::new();
        for (a, b, w) in edges {
            if a >= n {
                return Err(Error::NodeOutOfRange(a));
            }
            if b >= n {
                return Err(Error::NodeOutOfRange(b));
            }
            let bad = |reason| Error::InvalidEdge { u: nodes[a].clone(), v: nodes[b].clone(), reason };
            if a == b {
                return Err(bad("self-loop"));
            }
            if w == 0 {
                return Err(bad("zero weight"));
            }
            list.push(Edge { u: a.min(b), v: a.max(b), weight: w });
        }
        list.sort_unstable();
        if let Some(pair) = list.windows(2).find(|p| p[0].endpoints() == p[1].endpoints()) {
            return Err(Error::InvalidEdge {
                u: nodes[pair[0].u].clone(),
                v: nodes[pair[0].v].clone(),
                reason: "parallel edge",
            });
        }

        let mut adjacency = vec![Vec::new(); n];
        for e in &list {
            adjacency[e.u].push((e.v, e.weight));
            adjacency[e.v].push((e.u, e.weight));
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        Ok(WeightedNetwork { nodes, index, adjacency, edges: list })
    }

    /// Builds a network from named edges; nodes are indexed in first-seen order.
    pub fn from_named_edges<S: AsRef<str>>(edges: &[(S, S, Weight)]) -> Result<Self> {
        let mut nodes: Vec<String> = Vec::new();
        let mut seen: HashMap<String, NodeIx> = HashMap::new();
        let mut ix = |name: &str| {
            *seen.entry(name.to_string()).or_insert_with(|| {
                nodes.push(name.to_string());
                nodes.len() - 1
            })
        };
        let triples: Vec<_> = edges.iter().map(|(a, b, w)| (ix(a.as_ref()), ix(b.as_ref()), *w)).collect();
        Self::new(nodes, triples)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn name(&self, v: NodeIx) -> &str {
        &self.nodes[v]
    }

    pub fn index_of(&self, name: &str) -> Result<NodeIx> {
        self.index.get(name).copied().ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbors of `v` with edge weights, sorted by neighbor index.
    pub fn neighbors(&self, v: NodeIx) -> &[(NodeIx, Weight)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: NodeIx) -> usize {
        self.adjacency[v].len()
    }

    pub fn strength(&self, v: NodeIx) -> u64 {
        self.adjacency[v].iter().map(|&(_, w)| u64::from(w)).sum()
    }

    /// Degree of the node called `name`.
    pub fn degree_of(&self, name: &str) -> Result<usize> {
        self.index_of(name).map(|v| self.degree(v))
    }

    /// Strength (sum of incident weights) of the node called `name`.
    pub fn strength_of(&self, name: &str) -> Result<u64> {
        self.index_of(name).map(|v| self.strength(v))
    }

    pub fn weight(&self, u: NodeIx, v: NodeIx) -> Option<Weight> {
        let nbrs = &self.adjacency[u];
        nbrs.binary_search_by_key(&v, |&(x, _)| x).ok().map(|i| nbrs[i].1)
    }

    pub fn has_edge(&self, u: NodeIx, v: NodeIx) -> bool {
        self.weight(u, v).is_some()
    }

    pub fn max_weight(&self) -> Weight {
        self.edges.iter().map(|e| e.weight).max().unwrap_or(0)
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.node_count()).map(|v| self.degree(v)).collect()
    }

    /// Sorted edge weights.
    pub fn weight_multiset(&self) -> Vec<Weight> {
        let mut ws: Vec<_> = self.edges.iter().map(|e| e.weight).collect();
        ws.sort_unstable();
        ws
    }

    /// Subgraph induced by `keep`, with nodes re-indexed in the order given.
    pub fn induced_subgraph(&self, keep: &[NodeIx]) -> WeightedNetwork {
        let mut remap = vec![usize::MAX; self.node_count()];
        for (new, &old) in keep.iter().enumerate() {
            remap[old] = new;
        }
        let nodes = keep.iter().map(|&v| self.nodes[v].clone()).collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| remap[e.u] != usize::MAX && remap[e.v] != usize::MAX)
            .map(|e| (remap[e.u], remap[e.v], e.weight));
        WeightedNetwork::new(nodes, edges.collect::<Vec<_>>()).expect("subgraph of a valid network")
    }

    /// Same node set with the listed edges removed.
    pub fn without_edges(&self, removed: &[(NodeIx, NodeIx)]) -> WeightedNetwork {
        let drop: BTreeSet<(NodeIx, NodeIx)> = removed.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        let edges: Vec<_> =
            self.edges.iter().filter(|e| !drop.contains(&e.endpoints())).map(|e| (e.u, e.v, e.weight)).collect();
        WeightedNetwork::new(self.nodes.clone(), edges).expect("edge subset of a valid network")
    }

    /// Same topology with every weight set to one.
    pub fn unweighted(&self) -> WeightedNetwork {
        let edges: Vec<_> = self.edges.iter().map(|e| (e.u, e.v, 1)).collect();
        WeightedNetwork::new(self.nodes.clone(), edges).expect("valid network")
    }
}

/// Small deterministic graphs used by tests, the acceptance suite and the
/// synthetic experiments.
pub mod generators {
    use super::{NodeIx, WeightedNetwork};

    fn names(n: usize, prefix: &str) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    pub fn complete(n: usize) -> WeightedNetwork {
        let edges: Vec<_> = (0..n).flat_map(|a| ((a + 1)..n).map(move |b| (a, b, 1))).collect();
        WeightedNetwork::new(names(n, "n"), edges).unwrap()
    }

    /// Star with center `c` (index 0) and `leaves` leaves.
    pub fn star(leaves: usize) -> WeightedNetwork {
        let mut nodes = vec!["c".to_string()];
        nodes.extend(names(leaves, "l"));
        let edges: Vec<_> = (1..=leaves).map(|l| (0, l, 1)).collect();
        WeightedNetwork::new(nodes, edges).unwrap()
    }

    pub fn path(n: usize) -> WeightedNetwork {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i, 1)).collect();
        WeightedNetwork::new(names(n, "n"), edges).unwrap()
    }

    pub fn cycle(n: usize) -> WeightedNetwork {
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i, 1)).collect();
        edges.push((n - 1, 0, 1));
        WeightedNetwork::new(names(n, "n"), edges).unwrap()
    }

    /// `cliques` complete graphs of `size` nodes arranged in a ring. Each pair
    /// of neighboring cliques is joined by `links` edges between distinct node
    /// pairs: node `size-1-j` of clique `c` to node `j` of clique `c+1`.
    pub fn clique_ring(cliques: usize, size: usize, links: usize) -> WeightedNetwork {
        assert!(links <= size && cliques >= 3);
        let id = |c: usize, i: usize| -> NodeIx { c * size + i };
        let mut edges = Vec::new();
        for c in 0..cliques {
            for a in 0..size {
                for b in (a + 1)..size {
                    edges.push((id(c, a), id(c, b), 1));
                }
            }
            let next = (c + 1) % cliques;
            for j in 0..links {
                edges.push((id(c, size - 1 - j), id(next, j), 1));
            }
        }
        let nodes = (0..cliques).flat_map(|c| (0..size).map(move |i| format!("k{c:02}_{i:02}"))).collect();
        WeightedNetwork::new(nodes, edges).unwrap()
    }

    /// Like [`clique_ring`], but the `links` edges of each gap join node pairs
    /// drawn uniformly without replacement, so no two gaps are alike.
    pub fn random_clique_ring(cliques: usize, size: usize, links: usize, seed: u64) -> WeightedNetwork {
        use rand::seq::index::sample;
        use rand::SeedableRng;
        assert!(links <= size * size && cliques >= 3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let ring = clique_ring(cliques, size, 0);
        let mut edges: Vec<_> = ring.edges().iter().map(|e| (e.u, e.v, e.weight)).collect();
        for c in 0..cliques {
            let next = (c + 1) % cliques;
            for pair in sample(&mut rng, size * size, links) {
                edges.push((c * size + pair / size, next * size + pair % size, 1));
            }
        }
        WeightedNetwork::new(ring.nodes().to_vec(), edges).unwrap()
    }

    /// Disjoint union of `count` cliques of `size` nodes.
    pub fn disjoint_cliques(count: usize, size: usize) -> WeightedNetwork {
        let mut edges = Vec::new();
        for c in 0..count {
            for a in 0..size {
                for b in (a + 1)..size {
                    edges.push((c * size + a, c * size + b, 1));
                }
            }
        }
        let nodes = (0..count).flat_map(|c| (0..size).map(move |i| format!("q{c:02}_{i:02}"))).collect();
        WeightedNetwork::new(nodes, edges).unwrap()
    }
}
