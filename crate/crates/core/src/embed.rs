//! Chimera-style hardware graphs, minor-embedding search and validation,
//! chain-coupled physical model construction, and majority-vote recovery of
//! logical samples.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ising::{IsingError, IsingModel, SpinConfig};

/// Cap on the number of logical variables the embedding search accepts.
pub const MAX_EMBED_VARS: usize = 16;

/// One reason an embedding fails validation.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EmbeddingViolation {
    #[error("chain of logical {logical} uses node {node} outside the hardware graph")]
    ChainOutOfRange { logical: usize, node: usize },
    #[error("chains of logical {a} and {b} both contain node {node}")]
    OverlappingChains { a: usize, b: usize, node: usize },
    #[error("chain of logical {logical} is not connected in the hardware graph")]
    DisconnectedChain { logical: usize },
    #[error("no physical edge represents the logical edge ({u}, {v})")]
    MissingLogicalEdge { u: usize, v: usize },
    #[error("logical {logical} has no chain")]
    MissingChain { logical: usize },
}

fn summarize(violations: &[EmbeddingViolation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, thiserror::Error)]
pub enum EmbedError {
    #[error("chimera dimensions must all be at least 1")]
    ZeroChimeraParameter,
    #[error("self-loop on node {node}")]
    SelfLoop { node: usize },
    #[error("node {node} outside a graph of {num_nodes} nodes")]
    NodeOutOfRange { node: usize, num_nodes: usize },
    #[error("edge list line {line}: {message}")]
    EdgeListParse { line: usize, message: String },
    #[error("{variables} logical variables exceed the embedding cap of {max}")]
    CapExceeded { variables: usize, max: usize },
    #[error("at least one try is required")]
    ZeroTries,
    #[error("no embedding found after {tries} tries")]
    NoEmbeddingFound { tries: usize },
    #[error("invalid embedding: {}", summarize(violations))]
    InvalidEmbedding { violations: Vec<EmbeddingViolation> },
    #[error("chain strength must be positive and finite, got {value}")]
    BadChainStrength { value: f64 },
    #[error("sample does not cover node {node} of the chain for logical {logical}")]
    MissingNodes { logical: usize, node: usize },
    #[error("chain of logical {logical} is empty")]
    EmptyChain { logical: usize },
    #[error("embedding JSON: {0}")]
    BadJson(String),
    #[error(transparent)]
    Ising(#[from] IsingError),
}

/// Where a hardware graph came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    Chimera { m: usize, n: usize, t: usize },
    File,
}

/// An undirected device connectivity graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HardwareGraph {
    num_nodes: usize,
    edges: BTreeSet<(usize, usize)>,
    adjacency: Vec<BTreeSet<usize>>,
    layout: Layout,
}

impl HardwareGraph {
    fn build(
        num_nodes: usize,
        raw_edges: impl IntoIterator<Item = (usize, usize)>,
        layout: Layout,
    ) -> Result<Self, EmbedError> {
        let mut edges = BTreeSet::new();
        let mut adjacency = vec![BTreeSet::new(); num_nodes];
        for (u, v) in raw_edges {
            if u == v {
                return Err(EmbedError::SelfLoop { node: u });
            }
            for node in [u, v] {
                if node >= num_nodes {
                    return Err(EmbedError::NodeOutOfRange { node, num_nodes });
                }
            }
            edges.insert((u.min(v), u.max(v)));
            adjacency[u].insert(v);
            adjacency[v].insert(u);
        }
        Ok(HardwareGraph {
            num_nodes,
            edges,
            adjacency,
            layout,
        })
    }

    /// Builds a graph from an explicit edge list; the node count is the
    /// largest index mentioned plus one.
    pub fn from_edges(edges: &[(usize, usize)]) -> Result<Self, EmbedError> {
        let num_nodes = edges
            .iter()
            .map(|&(u, v)| u.max(v) + 1)
            .max()
            .unwrap_or(0);
        HardwareGraph::build(num_nodes, edges.iter().copied(), Layout::File)
    }

    /// Parses the edge-list text form: one "u v" pair per line, blank lines
    /// ignored.
    pub fn from_edge_list_text(text: &str) -> Result<Self, EmbedError> {
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(EmbedError::EdgeListParse {
                    line: i + 1,
                    message: format!("expected \"u v\", found {line:?}"),
                });
            }
            let mut pair = [0usize; 2];
            for (slot, field) in pair.iter_mut().zip(&fields) {
                *slot = field.parse().map_err(|_| EmbedError::EdgeListParse {
                    line: i + 1,
                    message: format!("{field:?} is not a node index"),
                })?;
            }
            edges.push((pair[0], pair[1]));
        }
        HardwareGraph::from_edges(&edges)
    }

    /// Renders the graph back to the edge-list text form.
    pub fn to_edge_list_text(&self) -> String {
        let mut out = String::new();
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn neighbors(&self, node: usize) -> &BTreeSet<usize> {
        &self.adjacency[node]
    }
}

/// Builds the `m` by `n` grid of `K_{t,t}` unit cells.
///
/// Node `(row*n + col)*2t + k` sits in cell `(row, col)`; shore members
/// `k < t` couple to every `k >= t` member of the same cell and to the
/// same-`k` node of the cell below, while `k >= t` members couple to the
/// cell to the right.
pub fn chimera_graph(m: usize, n: usize, t: usize) -> Result<HardwareGraph, EmbedError> {
    if m == 0 || n == 0 || t == 0 {
        return Err(EmbedError::ZeroChimeraParameter);
    }
    let index = |row: usize, col: usize, k: usize| (row * n + col) * 2 * t + k;
    let mut edges = Vec::new();
    for row in 0..m {
        for col in 0..n {
            for k1 in 0..t {
                for k2 in t..2 * t {
                    edges.push((index(row, col, k1), index(row, col, k2)));
                }
            }
            if row + 1 < m {
                for k in 0..t {
                    edges.push((index(row, col, k), index(row + 1, col, k)));
                }
            }
            if col + 1 < n {
                for k in t..2 * t {
                    edges.push((index(row, col, k), index(row, col + 1, k)));
                }
            }
        }
    }
    HardwareGraph::build(2 * t * m * n, edges, Layout::Chimera { m, n, t })
}

/// Assignment of each logical variable to a non-empty set of physical nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    chains: BTreeMap<usize, BTreeSet<usize>>,
}

impl Embedding {
    pub fn new(chains: BTreeMap<usize, BTreeSet<usize>>) -> Result<Self, EmbedError> {
        for (&logical, chain) in &chains {
            if chain.is_empty() {
                return Err(EmbedError::EmptyChain { logical });
            }
        }
        Ok(Embedding { chains })
    }

    pub fn chains(&self) -> &BTreeMap<usize, BTreeSet<usize>> {
        &self.chains
    }

    pub fn chain(&self, logical: usize) -> Option<&BTreeSet<usize>> {
        self.chains.get(&logical)
    }

    /// Total number of physical nodes in use.
    pub fn num_physical_nodes(&self) -> usize {
        self.chains.values().map(BTreeSet::len).sum()
    }

    /// Serializes to `{"chains": {"logical": [physical, ...]}}`.
    pub fn to_json(&self) -> String {
        let chains: BTreeMap<String, Vec<usize>> = self
            .chains
            .iter()
            .map(|(&l, c)| (l.to_string(), c.iter().copied().collect()))
            .collect();
        serde_json::to_string_pretty(&serde_json::json!({ "chains": chains }))
            .expect("embedding serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, EmbedError> {
        #[derive(serde::Deserialize)]
        struct Wire {
            chains: BTreeMap<String, Vec<usize>>,
        }
        let wire: Wire =
            serde_json::from_str(text).map_err(|e| EmbedError::BadJson(e.to_string()))?;
        let mut chains = BTreeMap::new();
        for (key, nodes) in wire.chains {
            let logical: usize = key
                .parse()
                .map_err(|_| EmbedError::BadJson(format!("{key:?} is not a variable index")))?;
            chains.insert(logical, nodes.into_iter().collect());
        }
        Embedding::new(chains)
    }
}

fn is_connected(chain: &BTreeSet<usize>, hw: &HardwareGraph) -> bool {
    let start = match chain.iter().next() {
        Some(&s) => s,
        None => return true,
    };
    let mut seen = BTreeSet::from([start]);
    let mut frontier = vec![start];
    while let Some(node) = frontier.pop() {
        for &next in hw.neighbors(node) {
            if chain.contains(&next) && seen.insert(next) {
                frontier.push(next);
            }
        }
    }
    seen.len() == chain.len()
}

/// Checks an embedding against a problem graph: chains must stay on the
/// hardware, be pairwise disjoint and connected, and every problem edge must
/// be backed by at least one physical edge. Violations come back as data;
/// an empty list means the embedding is valid.
pub fn validate_embedding(
    problem_edges: &[(usize, usize)],
    hw: &HardwareGraph,
    emb: &Embedding,
) -> Vec<EmbeddingViolation> {
    let mut violations = Vec::new();
    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    for (&logical, chain) in emb.chains() {
        for &node in chain {
            if node >= hw.num_nodes() {
                violations.push(EmbeddingViolation::ChainOutOfRange { logical, node });
            } else if let Some(&other) = owner.get(&node) {
                violations.push(EmbeddingViolation::OverlappingChains {
                    a: other,
                    b: logical,
                    node,
                });
            } else {
                owner.insert(node, logical);
            }
        }
    }
    for (&logical, chain) in emb.chains() {
        if chain.iter().all(|&n| n < hw.num_nodes()) && !is_connected(chain, hw) {
            violations.push(EmbeddingViolation::DisconnectedChain { logical });
        }
    }
    for &(u, v) in problem_edges {
        let (cu, cv) = match (emb.chain(u), emb.chain(v)) {
            (Some(cu), Some(cv)) => (cu, cv),
            (missing_u, _) => {
                let logical = if missing_u.is_none() { u } else { v };
                violations.push(EmbeddingViolation::MissingChain { logical });
                continue;
            }
        };
        let covered = cu
            .iter()
            .any(|&a| cv.iter().any(|&b| hw.has_edge(a, b)));
        if !covered {
            violations.push(EmbeddingViolation::MissingLogicalEdge {
                u: u.min(v),
                v: u.max(v),
            });
        }
    }
    violations
}

/// One randomized placement attempt; `None` when some variable cannot be
/// placed with the remaining free nodes.
fn attempt_embedding(
    order: &[usize],
    problem_adj: &BTreeMap<usize, BTreeSet<usize>>,
    hw: &HardwareGraph,
    rng: &mut ChaCha8Rng,
) -> Option<BTreeMap<usize, BTreeSet<usize>>> {
    let num_nodes = hw.num_nodes();
    let mut used = vec![false; num_nodes];
    let mut chains: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();

    for &var in order {
        let placed: Vec<usize> = problem_adj[&var]
            .iter()
            .copied()
            .filter(|u| chains.contains_key(u))
            .collect();
        if placed.is_empty() {
            let free: Vec<usize> = (0..num_nodes).filter(|&x| !used[x]).collect();
            if free.is_empty() {
                return None;
            }
            let node = free[rng.gen_range(0..free.len())];
            used[node] = true;
            chains.insert(var, BTreeSet::from([node]));
            continue;
        }

        // Distance fields from each placed neighbor's chain over free nodes.
        let mut dists: Vec<Vec<Option<u32>>> = Vec::with_capacity(placed.len());
        for &u in &placed {
            let mut dist = vec![None; num_nodes];
            let mut frontier = Vec::new();
            for &cnode in &chains[&u] {
                for &x in hw.neighbors(cnode) {
                    if !used[x] && dist[x].is_none() {
                        dist[x] = Some(0);
                        frontier.push(x);
                    }
                }
            }
            let mut depth = 0u32;
            while !frontier.is_empty() {
                depth += 1;
                let mut next = Vec::new();
                for &x in &frontier {
                    for &y in hw.neighbors(x) {
                        if !used[y] && dist[y].is_none() {
                            dist[y] = Some(depth);
                            next.push(y);
                        }
                    }
                }
                frontier = next;
            }
            dists.push(dist);
        }

        let mut best_cost = u32::MAX;
        let mut best_roots = Vec::new();
        for x in 0..num_nodes {
            if used[x] {
                continue;
            }
            let mut cost = 0u32;
            let mut reachable = true;
            for dist in &dists {
                match dist[x] {
                    Some(d) => cost += d,
                    None => {
                        reachable = false;
                        break;
                    }
                }
            }
            if !reachable {
                continue;
            }
            if cost < best_cost {
                best_cost = cost;
                best_roots.clear();
            }
            if cost == best_cost {
                best_roots.push(x);
            }
        }
        if best_roots.is_empty() {
            return None;
        }
        let root = best_roots[rng.gen_range(0..best_roots.len())];

        let mut chain = BTreeSet::from([root]);
        for dist in &dists {
            let mut cur = root;
            while let Some(d) = dist[cur] {
                if d == 0 {
                    break;
                }
                let closer: Vec<usize> = hw
                    .neighbors(cur)
                    .iter()
                    .copied()
                    .filter(|&y| !used[y] && dist[y] == Some(d - 1))
                    .collect();
                cur = closer[rng.gen_range(0..closer.len())];
                chain.insert(cur);
            }
        }
        for &node in &chain {
            used[node] = true;
        }
        chains.insert(var, chain);
    }
    Some(chains)
}

/// Searches for an embedding of the problem graph with randomized greedy
/// chain growth, restarting up to `tries` times. Deterministic for a given
/// seed; any embedding returned passes [`validate_embedding`].
pub fn find_embedding(
    problem_edges: &[(usize, usize)],
    hw: &HardwareGraph,
    seed: u64,
    tries: usize,
) -> Result<Embedding, EmbedError> {
    if tries == 0 {
        return Err(EmbedError::ZeroTries);
    }
    let mut problem_adj: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for &(u, v) in problem_edges {
        if u == v {
            return Err(EmbedError::SelfLoop { node: u });
        }
        problem_adj.entry(u).or_default().insert(v);
        problem_adj.entry(v).or_default().insert(u);
    }
    let variables = problem_adj.len();
    if variables > MAX_EMBED_VARS {
        return Err(EmbedError::CapExceeded {
            variables,
            max: MAX_EMBED_VARS,
        });
    }
    if variables == 0 {
        return Embedding::new(BTreeMap::new());
    }

    let mut order: Vec<usize> = problem_adj.keys().copied().collect();
    order.sort_by_key(|v| (usize::MAX - problem_adj[v].len(), *v));

    for try_index in 0..tries {
        let mut rng = ChaCha8Rng::seed_from_u64(crate::anneal::mix_seed(seed, try_index as u64));
        if let Some(chains) = attempt_embedding(&order, &problem_adj, hw, &mut rng) {
            let emb = Embedding::new(chains)?;
            debug_assert!(validate_embedding(problem_edges, hw, &emb).is_empty());
            return Ok(emb);
        }
    }
    Err(EmbedError::NoEmbeddingFound { tries })
}

/// Maps a logical model onto hardware through an embedding.
///
/// Each field splits equally over its chain; each logical coupling lands on
/// the lowest-index physical edge between the two chains; every hardware
/// edge inside a chain gets `-chain_strength`. The offset grows by
/// `chain_strength` per intra-chain edge, so any chain-unanimous physical
/// configuration has exactly the logical energy.
pub fn embed_model(
    model: &IsingModel,
    emb: &Embedding,
    hw: &HardwareGraph,
    chain_strength: f64,
) -> Result<IsingModel, EmbedError> {
    if !(chain_strength > 0.0 && chain_strength.is_finite()) {
        return Err(EmbedError::BadChainStrength {
            value: chain_strength,
        });
    }
    let problem_edges: Vec<(usize, usize)> = model.couplings().keys().copied().collect();
    let mut violations = validate_embedding(&problem_edges, hw, emb);
    for i in model.variables() {
        if emb.chain(i).is_none() {
            violations.push(EmbeddingViolation::MissingChain { logical: i });
        }
    }
    violations.dedup();
    if !violations.is_empty() {
        return Err(EmbedError::InvalidEmbedding { violations });
    }

    let num_physical = emb
        .chains()
        .values()
        .flat_map(|c| c.iter())
        .max()
        .map_or(0, |&n| n + 1);
    let mut physical = IsingModel::new(num_physical);

    for (&i, &h) in model.fields() {
        let chain = &emb.chains()[&i];
        let share = h / chain.len() as f64;
        for &node in chain {
            physical.add_field(node, share)?;
        }
    }
    for (&(i, j), &coupling) in model.couplings() {
        let mut edge = None;
        for &a in &emb.chains()[&i] {
            for &b in &emb.chains()[&j] {
                if hw.has_edge(a, b) {
                    let candidate = (a.min(b), a.max(b));
                    if edge.is_none_or(|e| candidate < e) {
                        edge = Some(candidate);
                    }
                }
            }
        }
        let (a, b) = edge.expect("validated embedding covers every logical edge");
        physical.add_coupling(a, b, coupling)?;
    }
    let mut intra_edges = 0usize;
    for chain in emb.chains().values() {
        for &a in chain {
            for &b in chain {
                if a < b && hw.has_edge(a, b) {
                    physical.add_coupling(a, b, -chain_strength)?;
                    intra_edges += 1;
                }
            }
        }
    }
    physical.set_offset(model.offset() + chain_strength * intra_edges as f64);
    Ok(physical)
}

/// Collapses a physical sample back to logical variables by majority vote
/// per chain; exact ties flip a seeded coin. Returns the logical
/// configuration and the fraction of chains whose nodes disagreed.
///
/// Logical variables absent from the embedding (possible only with gapped
/// labels) come back as spin +1.
pub fn unembed(
    sample: &SpinConfig,
    emb: &Embedding,
    seed: u64,
) -> Result<(SpinConfig, f64), EmbedError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = sample.values();
    let num_logical = emb.chains().keys().last().map_or(0, |&l| l + 1);
    let mut logical = vec![1i8; num_logical];
    let mut broken = 0usize;
    for (&var, chain) in emb.chains() {
        let mut sum = 0i64;
        for &node in chain {
            if node >= values.len() {
                return Err(EmbedError::MissingNodes { logical: var, node });
            }
            sum += i64::from(values[node]);
        }
        if sum.unsigned_abs() as usize != chain.len() {
            broken += 1;
        }
        logical[var] = match sum.cmp(&0) {
            std::cmp::Ordering::Greater => 1,
            std::cmp::Ordering::Less => -1,
            std::cmp::Ordering::Equal => {
                if rng.gen::<bool>() {
                    1
                } else {
                    -1
                }
            }
        };
    }
    let fraction = if emb.chains().is_empty() {
        0.0
    } else {
        broken as f64 / emb.chains().len() as f64
    };
    Ok((SpinConfig::new(logical)?, fraction))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle_edges() -> Vec<(usize, usize)> {
        vec![(0, 1), (0, 2), (1, 2)]
    }

    fn fig14_embedding() -> Embedding {
        Embedding::new(BTreeMap::from([
            (0, BTreeSet::from([0])),
            (1, BTreeSet::from([4])),
            (2, BTreeSet::from([3, 7])),
        ]))
        .unwrap()
    }

    #[test]
    fn unit_cell_is_a_complete_bipartite_block() {
        let hw = chimera_graph(1, 1, 4).unwrap();
        assert_eq!(hw.num_nodes(), 8);
        assert_eq!(hw.num_edges(), 16);
        for (u, v) in [(0, 4), (0, 7), (3, 4), (3, 7)] {
            assert!(hw.has_edge(u, v), "missing ({u},{v})");
        }
        assert!(!hw.has_edge(0, 1));
        assert!(!hw.has_edge(4, 5));
    }

    #[test]
    fn two_by_two_counts() {
        let hw = chimera_graph(2, 2, 4).unwrap();
        assert_eq!(hw.num_nodes(), 32);
        assert_eq!(hw.num_edges(), 80);
    }

    #[test]
    fn edge_count_formula_matches_construction() {
        for m in 1..=4 {
            for n in 1..=4 {
                for t in 1..=4 {
                    let hw = chimera_graph(m, n, t).unwrap();
                    assert_eq!(hw.num_nodes(), 2 * t * m * n);
                    let expected = m * n * t * t + t * (m * (n - 1) + n * (m - 1));
                    assert_eq!(hw.num_edges(), expected, "m={m} n={n} t={t}");
                }
            }
        }
    }

    #[test]
    fn inter_cell_wiring_orientation() {
        let hw = chimera_graph(2, 2, 2).unwrap();
        // Cell (0,0) nodes 0..4, cell (0,1) nodes 4..8, cell (1,0) nodes 8..12.
        assert!(hw.has_edge(0, 8), "k<t connects vertically, same k");
        assert!(hw.has_edge(2, 6), "k>=t connects horizontally, same k");
        assert!(!hw.has_edge(0, 4));
        assert!(!hw.has_edge(2, 10));
    }

    #[test]
    fn chimera_rejects_zero_dimensions() {
        assert!(matches!(
            chimera_graph(0, 1, 4),
            Err(EmbedError::ZeroChimeraParameter)
        ));
    }

    #[test]
    fn edge_list_text_round_trips() {
        let hw = HardwareGraph::from_edges(&[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(hw.num_nodes(), 3);
        assert_eq!(hw.layout(), Layout::File);
        let text = hw.to_edge_list_text();
        let back = HardwareGraph::from_edge_list_text(&text).unwrap();
        assert_eq!(hw, back);
        assert!(matches!(
            HardwareGraph::from_edge_list_text("0 1\n2\n"),
            Err(EmbedError::EdgeListParse { line: 2, .. })
        ));
        assert!(matches!(
            HardwareGraph::from_edges(&[(1, 1)]),
            Err(EmbedError::SelfLoop { node: 1 })
        ));
    }

    #[test]
    fn fig14_style_triangle_embedding_validates() {
        let hw = chimera_graph(1, 1, 4).unwrap();
        let violations = validate_embedding(&triangle_edges(), &hw, &fig14_embedding());
        assert!(violations.is_empty(), "{violations:?}");
    }

    #[test]
    fn missing_physical_edge_is_reported() {
        let hw = chimera_graph(1, 1, 4).unwrap();
        let emb = Embedding::new(BTreeMap::from([
            (0, BTreeSet::from([0])),
            (1, BTreeSet::from([4])),
            (2, BTreeSet::from([3])),
        ]))
        .unwrap();
        let violations = validate_embedding(&triangle_edges(), &hw, &emb);
        assert_eq!(
            violations,
            vec![EmbeddingViolation::MissingLogicalEdge { u: 0, v: 2 }]
        );
    }

    #[test]
    fn overlap_and_disconnection_are_reported() {
        let hw = chimera_graph(1, 1, 4).unwrap();
        let emb = Embedding::new(BTreeMap::from([
            (0, BTreeSet::from([0])),
            (1, BTreeSet::from([0])),
        ]))
        .unwrap();
        let violations = validate_embedding(&[(0, 1)], &hw, &emb);
        assert!(violations
            .iter()
            .any(|v| matches!(v, EmbeddingViolation::OverlappingChains { node: 0, .. })));

        let emb = Embedding::new(BTreeMap::from([(0, BTreeSet::from([1, 2]))])).unwrap();
        let violations = validate_embedding(&[], &hw, &emb);
        assert_eq!(
            violations,
            vec![EmbeddingViolation::DisconnectedChain { logical: 0 }]
        );
    }

    #[test]
    fn triangle_needs_exactly_one_two_node_chain() {
        let hw = chimera_graph(1, 1, 4).unwrap();
        let emb = find_embedding(&triangle_edges(), &hw, 11, 20).unwrap();
        assert!(validate_embedding(&triangle_edges(), &hw, &emb).is_empty());
        let mut lengths: Vec<usize> = emb.chains().values().map(BTreeSet::len).collect();
        lengths.sort();
        assert_eq!(lengths, vec![1, 1, 2]);
    }

    #[test]
    fn four_cycle_fits_without_chains() {
        let hw = chimera_graph(1, 1, 4).unwrap();
        let edges = vec![(0, 1), (1, 2), (2, 3), (0, 3)];
        let emb = find_embedding(&edges, &hw, 3, 20).unwrap();
        assert!(validate_embedding(&edges, &hw, &emb).is_empty());
        assert!(emb.chains().values().all(|c| c.len() == 1));
    }

    fn clique_edges(n: usize) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                edges.push((u, v));
            }
        }
        edges
    }

    #[test]
    fn five_clique_squeezes_into_one_cell() {
        // Three two-node chains plus two singletons cover all ten edges of
        // K5 inside a single K44 cell, e.g. {0,4} {1,5} {2,6} {3} {7}.
        let hw = chimera_graph(1, 1, 4).unwrap();
        let edges = clique_edges(5);
        let emb = find_embedding(&edges, &hw, 7, 50).unwrap();
        assert!(validate_embedding(&edges, &hw, &emb).is_empty());
    }

    #[test]
    fn six_clique_cannot_embed_in_one_cell() {
        // A K44 cell has treewidth 4, so K6 has no minor embedding there;
        // every restart must come up empty.
        let hw = chimera_graph(1, 1, 4).unwrap();
        assert!(matches!(
            find_embedding(&clique_edges(6), &hw, 0, 30),
            Err(EmbedError::NoEmbeddingFound { tries: 30 })
        ));
    }

    #[test]
    fn search_is_deterministic_per_seed() {
        let hw = chimera_graph(2, 2, 2).unwrap();
        let edges = vec![(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)];
        let a = find_embedding(&edges, &hw, 42, 10).unwrap();
        let b = find_embedding(&edges, &hw, 42, 10).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn search_caps_logical_size() {
        let hw = chimera_graph(4, 4, 4).unwrap();
        let edges: Vec<(usize, usize)> = (0..17).map(|i| (i, (i + 1) % 18)).collect();
        assert!(matches!(
            find_embedding(&edges, &hw, 0, 5),
            Err(EmbedError::CapExceeded { variables: 18, .. })
        ));
    }

    #[test]
    fn identity_chains_leave_the_model_unchanged() {
        let model = {
            use crate::ising::Relation;
            let relations = BTreeMap::from([
                ((0, 1), Relation::Good),
                ((2, 3), Relation::Good),
                ((0, 3), Relation::Bad),
                ((1, 2), Relation::Bad),
            ]);
            crate::ising::build_garden_model(&relations, &Default::default(), 0.0).unwrap()
        };
        let hw = HardwareGraph::from_edges(&[(0, 1), (2, 3), (0, 3), (1, 2)]).unwrap();
        let chains = (0..4).map(|i| (i, BTreeSet::from([i]))).collect();
        let emb = Embedding::new(chains).unwrap();
        let physical = embed_model(&model, &emb, &hw, 5.0).unwrap();
        assert_eq!(physical, model);
    }

    #[test]
    fn triangle_embedding_places_couplings_and_chain_bond() {
        let mut model = IsingModel::new(3);
        model.set_coupling(0, 1, 1.0).unwrap();
        model.set_coupling(0, 2, 1.0).unwrap();
        model.set_coupling(1, 2, 1.0).unwrap();
        model.set_field(2, 1.0).unwrap();
        let hw = chimera_graph(1, 1, 4).unwrap();
        let physical = embed_model(&model, &fig14_embedding(), &hw, 2.0).unwrap();

        let couplings = physical.couplings();
        assert_eq!(couplings[&(3, 7)], -2.0);
        assert_eq!(couplings[&(0, 4)], 1.0);
        assert_eq!(couplings[&(0, 7)], 1.0);
        assert_eq!(couplings[&(3, 4)], 1.0);
        assert_eq!(couplings.len(), 4);
        let fields = physical.fields();
        assert_eq!(fields[&3], 0.5);
        assert_eq!(fields[&7], 0.5);
        assert_eq!(physical.offset(), 2.0);
    }

    #[test]
    fn unbroken_configurations_reproduce_logical_energies() {
        let mut model = IsingModel::new(3);
        model.set_coupling(0, 1, 1.0).unwrap();
        model.set_coupling(0, 2, -0.5).unwrap();
        model.set_coupling(1, 2, 0.25).unwrap();
        model.set_field(0, -0.3).unwrap();
        model.set_field(2, 0.7).unwrap();
        model.set_offset(0.125);
        let hw = chimera_graph(1, 1, 4).unwrap();
        let emb = fig14_embedding();
        let physical = embed_model(&model, &emb, &hw, 2.0).unwrap();

        for code in 0..8usize {
            let logical: Vec<i8> = (0..3)
                .map(|b| if (code >> b) & 1 == 1 { 1 } else { -1 })
                .collect();
            let mut phys = vec![1i8; physical.num_variables()];
            for (&var, chain) in emb.chains() {
                for &node in chain {
                    phys[node] = logical[var];
                }
            }
            let logical_energy = model.energy(&SpinConfig::new(logical).unwrap()).unwrap();
            let physical_energy = physical.energy(&SpinConfig::new(phys).unwrap()).unwrap();
            assert!((logical_energy - physical_energy).abs() < 1e-12);
        }
    }

    #[test]
    fn embedding_must_cover_the_model() {
        let mut model = IsingModel::new(3);
        model.set_coupling(0, 2, 1.0).unwrap();
        model.set_field(1, 0.5).unwrap();
        let hw = chimera_graph(1, 1, 4).unwrap();
        let emb = Embedding::new(BTreeMap::from([
            (0, BTreeSet::from([0])),
            (2, BTreeSet::from([4])),
        ]))
        .unwrap();
        let err = embed_model(&model, &emb, &hw, 1.0).unwrap_err();
        match err {
            EmbedError::InvalidEmbedding { violations } => {
                assert!(violations
                    .iter()
                    .any(|v| matches!(v, EmbeddingViolation::MissingChain { logical: 1 })));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            embed_model(&model, &fig14_embedding(), &hw, 0.0),
            Err(EmbedError::BadChainStrength { .. })
        ));
    }

    #[test]
    fn majority_vote_repairs_a_broken_chain() {
        let emb = Embedding::new(BTreeMap::from([(0, BTreeSet::from([0, 1, 2]))])).unwrap();
        let sample = SpinConfig::new(vec![1, 1, -1]).unwrap();
        let (logical, fraction) = unembed(&sample, &emb, 9).unwrap();
        assert_eq!(logical.values(), &[1]);
        assert_eq!(fraction, 1.0);
    }

    #[test]
    fn unanimous_chains_break_nothing() {
        let emb = fig14_embedding();
        let sample = SpinConfig::new(vec![1, 1, 1, -1, -1, 1, 1, -1]).unwrap();
        let (logical, fraction) = unembed(&sample, &emb, 0).unwrap();
        assert_eq!(logical.values(), &[1, -1, -1]);
        assert_eq!(fraction, 0.0);
    }

    #[test]
    fn exact_tie_uses_the_seeded_coin() {
        let emb = Embedding::new(BTreeMap::from([(0, BTreeSet::from([0, 1]))])).unwrap();
        let sample = SpinConfig::new(vec![1, -1]).unwrap();
        let (first, fraction) = unembed(&sample, &emb, 4).unwrap();
        assert_eq!(fraction, 1.0);
        for _ in 0..5 {
            let (again, _) = unembed(&sample, &emb, 4).unwrap();
            assert_eq!(first.values(), again.values());
        }
    }

    #[test]
    fn missing_sample_nodes_are_an_error() {
        let emb = fig14_embedding();
        let sample = SpinConfig::new(vec![1, 1, 1]).unwrap();
        assert!(matches!(
            unembed(&sample, &emb, 0),
            Err(EmbedError::MissingNodes { logical: 1, node: 4 })
        ));
    }

    #[test]
    fn embedding_json_round_trips() {
        let emb = fig14_embedding();
        let json = emb.to_json();
        assert!(json.contains("\"chains\""));
        let back = Embedding::from_json(&json).unwrap();
        assert_eq!(emb, back);
        assert!(Embedding::from_json("{\"chains\": {\"x\": [0]}}").is_err());
        assert!(Embedding::from_json("{\"chains\": {\"0\": []}}").is_err());
    }

    #[test]
    fn ground_of_embedded_triangle_unembeds_to_logical_ground() {
        let mut model = IsingModel::new(3);
        for (i, j) in triangle_edges() {
            model.set_coupling(i, j, 1.0).unwrap();
        }
        let hw = chimera_graph(1, 1, 4).unwrap();
        let emb = find_embedding(&triangle_edges(), &hw, 5, 20).unwrap();
        let physical = embed_model(&model, &emb, &hw, 2.0).unwrap();
        let logical_best = model.brute_force_solve().unwrap();
        let physical_best = physical.brute_force_solve().unwrap();
        for config in &physical_best.configs {
            let (logical, fraction) = unembed(config, &emb, 0).unwrap();
            assert_eq!(fraction, 0.0);
            let energy = model.energy(&logical).unwrap();
            assert!((energy - logical_best.energy).abs() < 1e-12);
        }
    }
}
