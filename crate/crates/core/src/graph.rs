//! Vertex-weighted undirected graphs.
//!
//! Vertices are `0..n`. Each vertex keeps a sorted neighbor list; when the
//! edge density reaches [`DEFAULT_DENSE_THRESHOLD`] (or a caller supplied
//! threshold) a bit row per vertex is also built so adjacency tests are O(1).
//! Sparse graphs answer adjacency by binary search over the shorter list.
//!
//! Parsers accept the DIMACS ascii clique format (`p edge n m`, `e u v`,
//! 1-based ids) and plain whitespace separated edge lists.

use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vertex = usize;
pub type Weight = i64;

/// Density at or above which dense adjacency rows are materialized.
pub const DEFAULT_DENSE_THRESHOLD: f64 = 0.05;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("self-loop on vertex {0}")]
    SelfLoop(Vertex),
    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("weight vector has {got} entries, graph has {n} vertices")]
    WeightLength { got: usize, n: usize },
    #[error("vertex {0} has non-positive weight")]
    NonPositiveWeight(Vertex),
    #[error("attachment count m={m} must satisfy 1 <= m < n={n}")]
    BadAttachment { m: usize, n: usize },
    #[error("edge probability {0} outside [0, 1]")]
    BadProbability(f64),
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("missing `p edge n m` line")]
    MissingProblemLine,
    #[error("duplicate `p` line")]
    DuplicateProblemLine,
    #[error("malformed `{0}` line")]
    Malformed(&'static str),
    #[error("not an integer: {0:?}")]
    NotAnInteger(String),
    #[error("vertex id {id} outside [1, {n}]")]
    VertexOutOfRange { id: u64, n: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(u64),
    #[error("edge line before `p` line")]
    EdgeBeforeProblemLine,
    #[error("unknown line type {0:?}")]
    UnknownLine(String),
}

/// How vertex weights are assigned to an unweighted instance.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightScheme {
    /// Every vertex weighs 1 (plain top-k clique cover).
    #[default]
    Unit,
    /// Vertex `i` weighs `(i mod 200) + 1`.
    Mod200,
}

impl WeightScheme {
    pub fn weight_of(self, index: Vertex) -> Weight {
        match self {
            WeightScheme::Unit => 1,
            WeightScheme::Mod200 => (index % 200) as Weight + 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Graph {
    name: String,
    adj: Vec<Vec<Vertex>>,
    rows: Option<Vec<FixedBitSet>>,
    weights: Vec<Weight>,
    edge_count: usize,
}

impl Graph {
    /// Builds a unit-weight graph from an edge list. Duplicate edges (in
    /// either orientation) collapse; self-loops and out-of-range ids are
    /// rejected.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        Self::from_edges_with_threshold(n, edges, DEFAULT_DENSE_THRESHOLD)
    }

    pub fn from_edges_with_threshold(
        n: usize,
        edges: &[(Vertex, Vertex)],
        dense_threshold: f64,
    ) -> Result<Self, GraphError> {
        let mut adj: Vec<Vec<Vertex>> = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: x, n });
                }
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        let edge_count = adj.iter().map(Vec::len).sum::<usize>() / 2;
        let mut g = Graph {
            name: String::new(),
            adj,
            rows: None,
            weights: vec![1; n],
            edge_count,
        };
        if n > 1 && g.density() >= dense_threshold {
            g.rows = Some(g.build_rows());
        }
        debug_assert!(g.check_invariants().is_ok());
        Ok(g)
    }

    fn build_rows(&self) -> Vec<FixedBitSet> {
        let n = self.n();
        self.adj
            .iter()
            .map(|list| {
                let mut row = FixedBitSet::with_capacity(n);
                for &v in list {
                    row.insert(v);
                }
                row
            })
            .collect()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Replaces all weights according to `scheme`; structure is untouched.
    pub fn with_weights(mut self, scheme: WeightScheme) -> Self {
        for (i, w) in self.weights.iter_mut().enumerate() {
            *w = scheme.weight_of(i);
        }
        self
    }

    pub fn with_vertex_weights(mut self, weights: Vec<Weight>) -> Result<Self, GraphError> {
        if weights.len() != self.n() {
            return Err(GraphError::WeightLength {
                got: weights.len(),
                n: self.n(),
            });
        }
        if let Some(v) = weights.iter().position(|&w| w < 1) {
            return Err(GraphError::NonPositiveWeight(v));
        }
        self.weights = weights;
        Ok(self)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    #[inline]
    pub fn weight(&self, v: Vertex) -> Weight {
        self.weights[v]
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn total_weight(&self) -> Weight {
        self.weights.iter().sum()
    }

    pub fn has_dense_rows(&self) -> bool {
        self.rows.is_some()
    }

    /// `2|E| / (n(n-1))`, or 0 for graphs with fewer than two vertices.
    pub fn density(&self) -> f64 {
        let n = self.n() as f64;
        if self.n() < 2 {
            0.0
        } else {
            2.0 * self.edge_count as f64 / (n * (n - 1.0))
        }
    }

    #[inline]
    pub fn is_adjacent(&self, u: Vertex, v: Vertex) -> bool {
        if let Some(rows) = &self.rows {
            return rows[u].contains(v);
        }
        let (a, b) = if self.adj[u].len() <= self.adj[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.adj[a].binary_search(&b).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Induced subgraph on `keep` (which must be sorted and distinct). The
    /// i-th kept vertex becomes vertex i and keeps its weight.
    pub fn induced_subgraph(&self, keep: &[Vertex]) -> Graph {
        debug_assert!(keep.windows(2).all(|w| w[0] < w[1]));
        let mut index = vec![usize::MAX; self.n()];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i;
        }
        let adj: Vec<Vec<Vertex>> = keep
            .iter()
            .map(|&v| {
                self.adj[v]
                    .iter()
                    .filter_map(|&u| (index[u] != usize::MAX).then_some(index[u]))
                    .collect()
            })
            .collect();
        let edge_count = adj.iter().map(Vec::len).sum::<usize>() / 2;
        let mut g = Graph {
            name: self.name.clone(),
            adj,
            rows: None,
            weights: keep.iter().map(|&v| self.weights[v]).collect(),
            edge_count,
        };
        if self.rows.is_some() || (g.n() > 1 && g.density() >= DEFAULT_DENSE_THRESHOLD) {
            g.rows = Some(g.build_rows());
        }
        g
    }

    /// Checks symmetry, ordering, loop-freeness, positive weights and the
    /// cached edge count. Returns a description of the first violation.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut half_edges = 0usize;
        for (u, list) in self.adj.iter().enumerate() {
            if !list.windows(2).all(|w| w[0] < w[1]) {
                return Err(format!("neighbor list of {u} not strictly ascending"));
            }
            for &v in list {
                if v == u {
                    return Err(format!("self-loop at {u}"));
                }
                if v >= self.n() || self.adj[v].binary_search(&u).is_err() {
                    return Err(format!("asymmetric edge {u}-{v}"));
                }
            }
            half_edges += list.len();
        }
        if half_edges != 2 * self.edge_count {
            return Err("edge count mismatch".into());
        }
        if let Some(v) = self.weights.iter().position(|&w| w < 1) {
            return Err(format!("vertex {v} has weight < 1"));
        }
        if let Some(rows) = &self.rows {
            for (u, row) in rows.iter().enumerate() {
                if !row.ones().eq(self.adj[u].iter().copied()) {
                    return Err(format!("dense row of {u} disagrees with list"));
                }
            }
        }
        Ok(())
    }

    /// Same vertex count and edge set (weights and names are ignored).
    pub fn same_structure(&self, other: &Graph) -> bool {
        self.n() == other.n() && self.adj == other.adj
    }
}

fn parse_int(token: &str, line: usize) -> Result<u64, ParseError> {
    token.parse::<u64>().map_err(|_| ParseError {
        line,
        kind: ParseErrorKind::NotAnInteger(token.to_string()),
    })
}

/// Parses the DIMACS ascii clique format.
pub fn parse_dimacs(text: &str) -> Result<Graph, ParseError> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let err = |kind| ParseError {
            line: line_no,
            kind,
        };
        let mut tokens = line.split_whitespace();
        let tag = tokens.next().unwrap_or_default();
        match tag {
            "c" => {}
            "p" => {
                if n.is_some() {
                    return Err(err(ParseErrorKind::DuplicateProblemLine));
                }
                let fields: Vec<&str> = tokens.collect();
                if fields.len() != 3 {
                    return Err(err(ParseErrorKind::Malformed("p")));
                }
                let count = parse_int(fields[1], line_no)?;
                parse_int(fields[2], line_no)?;
                n = Some(count as usize);
            }
            "e" => {
                let Some(nv) = n else {
                    return Err(err(ParseErrorKind::EdgeBeforeProblemLine));
                };
                let fields: Vec<&str> = tokens.collect();
                if fields.len() < 2 {
                    return Err(err(ParseErrorKind::Malformed("e")));
                }
                let u = parse_int(fields[0], line_no)?;
                let v = parse_int(fields[1], line_no)?;
                for id in [u, v] {
                    if id == 0 || id as usize > nv {
                        return Err(err(ParseErrorKind::VertexOutOfRange { id, n: nv }));
                    }
                }
                if u == v {
                    return Err(err(ParseErrorKind::SelfLoop(u)));
                }
                edges.push((u as usize - 1, v as usize - 1));
            }
            // Comment lines occasionally omit the space after `c`.
            t if t.starts_with('c') => {}
            other => return Err(err(ParseErrorKind::UnknownLine(other.to_string()))),
        }
    }
    let n = n.ok_or(ParseError {
        line: text.lines().count().max(1),
        kind: ParseErrorKind::MissingProblemLine,
    })?;
    Ok(Graph::from_edges(n, &edges).expect("ids validated during parsing"))
}

/// Parses whitespace separated `u v` pairs, one per line. Lines starting
/// with `#` or `%` are comments and tokens after the second are ignored.
/// Ids are treated as 1-based when no id 0 appears.
pub fn parse_edge_list(text: &str) -> Result<Graph, ParseError> {
    let mut raw_edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('%') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let (Some(a), Some(b)) = (tokens.next(), tokens.next()) else {
            return Err(ParseError {
                line: line_no,
                kind: ParseErrorKind::Malformed("edge"),
            });
        };
        let u = parse_int(a, line_no)?;
        let v = parse_int(b, line_no)?;
        if u == v {
            return Err(ParseError {
                line: line_no,
                kind: ParseErrorKind::SelfLoop(u),
            });
        }
        raw_edges.push((u, v));
    }
    let Some(min_id) = raw_edges.iter().map(|&(u, v)| u.min(v)).min() else {
        return Ok(Graph::from_edges(0, &[]).expect("empty graph"));
    };
    let base = u64::from(min_id >= 1);
    let edges: Vec<(Vertex, Vertex)> = raw_edges
        .iter()
        .map(|&(u, v)| ((u - base) as usize, (v - base) as usize))
        .collect();
    let n = edges
        .iter()
        .map(|&(u, v)| u.max(v))
        .max()
        .map_or(0, |m| m + 1);
    Ok(Graph::from_edges(n, &edges).expect("ids validated during parsing"))
}

pub fn write_dimacs(g: &Graph) -> String {
    let mut out = String::with_capacity(16 + 12 * g.edge_count());
    writeln!(out, "p edge {} {}", g.n(), g.edge_count()).unwrap();
    for (u, v) in g.edges() {
        writeln!(out, "e {} {}", u + 1, v + 1).unwrap();
    }
    out
}

/// Erdős–Rényi G(n, p): every unordered pair is an edge independently with
/// probability `p`. Uses geometric skipping so sparse graphs cost O(n + m).
pub fn gen_er(n: usize, p: f64, seed: u64) -> Result<Graph, GraphError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::BadProbability(p));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    if p >= 1.0 {
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
    } else if p > 0.0 {
        // Walk the strictly lower triangle row by row, jumping over
        // geometrically distributed runs of non-edges.
        let log_q = (1.0 - p).ln();
        let (mut v, mut w): (usize, i64) = (1, -1);
        while v < n {
            let r: f64 = rng.gen();
            let skip = ((1.0 - r).ln() / log_q).floor();
            // Any skip beyond the remaining pairs ends the walk, so capping is exact.
            w += 1 + skip.min((n * n) as f64) as i64;
            while v < n && w >= v as i64 {
                w -= v as i64;
                v += 1;
            }
            if v < n {
                edges.push((w as usize, v));
            }
        }
    }
    Ok(Graph::from_edges(n, &edges)?.with_name(format!("er-{n}-{p}-{seed}")))
}

/// Barabási–Albert preferential attachment. Starts from a clique on `m`
/// vertices; every later vertex attaches to `m` distinct earlier vertices
/// chosen with probability proportional to degree.
pub fn gen_ba(n: usize, m: usize, seed: u64) -> Result<Graph, GraphError> {
    if m == 0 || m >= n {
        return Err(GraphError::BadAttachment { m, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(m * (n - m) + m * (m - 1) / 2);
    // Each endpoint occurrence; sampling uniformly from it is degree-proportional.
    let mut endpoints: Vec<Vertex> = Vec::with_capacity(2 * edges.capacity());
    for u in 0..m {
        for v in u + 1..m {
            edges.push((u, v));
            endpoints.extend([u, v]);
        }
    }
    let mut chosen = Vec::with_capacity(m);
    let mut mark = vec![false; n];
    for v in m..n {
        chosen.clear();
        if endpoints.is_empty() {
            // Only when m == 1 and the seed is a lone vertex.
            chosen.extend(0..m);
        } else {
            while chosen.len() < m {
                let t = endpoints[rng.gen_range(0..endpoints.len())];
                if !mark[t] {
                    mark[t] = true;
                    chosen.push(t);
                }
            }
        }
        for &t in &chosen {
            mark[t] = false;
            edges.push((t, v));
            endpoints.extend([t, v]);
        }
    }
    Ok(Graph::from_edges(n, &edges)?.with_name(format!("ba-{n}-{m}-{seed}")))
}
