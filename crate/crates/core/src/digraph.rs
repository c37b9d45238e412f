//! DAG data model, the `p dag` text format, and structural queries.
//!
//! Vertices carry an original id in `1..=n` (as read from the file) and an
//! internal index in `0..n`. Internal indices follow a topological order, so
//! every arc `(u, v)` satisfies `u < v` on internal indices. All public
//! functions in this crate take and return internal indices unless they say
//! otherwise; [`Dag::original_id`] and [`Dag::index_of`] convert.

use std::collections::{BTreeSet, BinaryHeap, VecDeque};
use std::cmp::Reverse;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DagError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("vertex id {id} out of range 1..={n}")]
    OutOfRange { id: usize, n: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate arc ({0}, {1})")]
    DuplicateArc(usize, usize),
    #[error("anti-parallel arcs ({0}, {1}) and ({1}, {0})")]
    AntiParallel(usize, usize),
    #[error("arc set contains a directed cycle")]
    Cycle,
    #[error("digraph must have at least one vertex")]
    Empty,
    #[error("labeling has {got} entries, digraph has {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },
    #[error("label of vertex {vertex} is {value}; labels must be positive")]
    NonPositiveLabel { vertex: usize, value: u64 },
    #[error("operation requires a connected digraph")]
    Disconnected,
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
}

/// A validated directed acyclic graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dag {
    n: usize,
    /// Arcs in input order, as internal indices.
    arcs: Vec<(usize, usize)>,
    /// Sorted undirected adjacency of G(D).
    adj: Vec<Vec<usize>>,
    /// Sorted out-neighbors.
    out: Vec<Vec<usize>>,
    /// internal index -> original id
    ids: Vec<usize>,
    /// original id - 1 -> internal index
    index: Vec<usize>,
}

impl Dag {
    /// Builds a DAG on original ids `1..=n` from arcs given as original ids.
    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Result<Self, DagError> {
        if n == 0 {
            return Err(DagError::Empty);
        }
        let mut seen = BTreeSet::new();
        for &(u, v) in arcs {
            for id in [u, v] {
                if id == 0 || id > n {
                    return Err(DagError::OutOfRange { id, n });
                }
            }
            if u == v {
                return Err(DagError::SelfLoop(u));
            }
            if seen.contains(&(v, u)) {
                return Err(DagError::AntiParallel(v, u));
            }
            if !seen.insert((u, v)) {
                return Err(DagError::DuplicateArc(u, v));
            }
        }

        // Kahn's algorithm, smallest original id first.
        let mut out0 = vec![Vec::new(); n];
        let mut indeg = vec![0usize; n];
        for &(u, v) in arcs {
            out0[u - 1].push(v - 1);
            indeg[v - 1] += 1;
        }
        let mut heap: BinaryHeap<Reverse<usize>> =
            (0..n).filter(|&v| indeg[v] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse(v)) = heap.pop() {
            order.push(v);
            for &w in &out0[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    heap.push(Reverse(w));
                }
            }
        }
        if order.len() != n {
            return Err(DagError::Cycle);
        }

        let ids: Vec<usize> = order.iter().map(|&v| v + 1).collect();
        let mut index = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            index[v] = i;
        }
        let arcs: Vec<(usize, usize)> = arcs
            .iter()
            .map(|&(u, v)| (index[u - 1], index[v - 1]))
            .collect();
        let mut adj = vec![Vec::new(); n];
        let mut out = vec![Vec::new(); n];
        for &(u, v) in &arcs {
            adj[u].push(v);
            adj[v].push(u);
            out[u].push(v);
        }
        for list in adj.iter_mut().chain(out.iter_mut()) {
            list.sort_unstable();
        }
        Ok(Dag {
            n,
            arcs,
            adj,
            out,
            ids,
            index,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    /// Arcs in input order, as internal indices.
    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    /// Undirected neighborhood N(v), sorted.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.out[u].binary_search(&v).is_ok()
    }

    pub fn original_id(&self, v: usize) -> usize {
        self.ids[v]
    }

    /// Internal index of an original id, if in range.
    pub fn index_of(&self, id: usize) -> Option<usize> {
        (1..=self.n).contains(&id).then(|| self.index[id - 1])
    }

    /// Arcs in input order, as original ids.
    pub fn original_arcs(&self) -> Vec<(usize, usize)> {
        self.arcs
            .iter()
            .map(|&(u, v)| (self.ids[u], self.ids[v]))
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.n
    }

    pub fn require_connected(&self) -> Result<(), DagError> {
        if self.is_connected() {
            Ok(())
        } else {
            Err(DagError::Disconnected)
        }
    }

    /// True iff G(D) is a complete graph.
    pub fn is_complete(&self) -> bool {
        // parallel and anti-parallel arcs are rejected, so each pair has at most one arc
        self.arcs.len() == self.n * (self.n - 1) / 2
    }

    /// Proper 2-coloring of G(D) (color 0 or 1 per vertex), BFS from the
    /// smallest index of each component, or `None` if G(D) has an odd cycle.
    pub fn two_coloring(&self) -> Option<Vec<u8>> {
        let mut color = vec![u8::MAX; self.n];
        for start in 0..self.n {
            if color[start] != u8::MAX {
                continue;
            }
            color[start] = 0;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &w in &self.adj[v] {
                    if color[w] == u8::MAX {
                        color[w] = 1 - color[v];
                        queue.push_back(w);
                    } else if color[w] == color[v] {
                        return None;
                    }
                }
            }
        }
        Some(color)
    }

    /// Converts labels listed in original id order into a [`Labeling`]
    /// indexed by internal index.
    pub fn labeling_from_original(&self, values: &[u64]) -> Result<Labeling, DagError> {
        if values.len() != self.n {
            return Err(DagError::LengthMismatch {
                expected: self.n,
                got: values.len(),
            });
        }
        let internal = (0..self.n).map(|v| values[self.ids[v] - 1]).collect();
        Labeling::new(internal)
    }

    /// Labels listed in original id order.
    pub fn to_original_order(&self, f: &Labeling) -> Vec<u64> {
        (1..=self.n).map(|id| f.get(self.index[id - 1])).collect()
    }

    /// Serializes in the `p dag` format with original ids and input arc order.
    pub fn to_text(&self) -> String {
        let mut s = format!("p dag {} {}\n", self.n, self.arcs.len());
        for (u, v) in self.original_arcs() {
            s.push_str(&format!("a {u} {v}\n"));
        }
        s
    }
}

/// Vertex labeling f with positive integer labels, indexed by internal index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Labeling {
    values: Vec<u64>,
    k: u64,
}

impl Labeling {
    pub fn new(values: Vec<u64>) -> Result<Self, DagError> {
        if let Some(vertex) = values.iter().position(|&x| x == 0) {
            return Err(DagError::NonPositiveLabel { vertex, value: 0 });
        }
        let k = values.iter().copied().max().unwrap_or(0);
        Ok(Labeling { values, k })
    }

    /// All-ones labeling on `n` vertices.
    pub fn ones(n: usize) -> Self {
        Labeling {
            values: vec![1; n],
            k: if n == 0 { 0 } else { 1 },
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, v: usize) -> u64 {
        self.values[v]
    }

    /// Largest label used.
    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }
}

impl fmt::Display for Labeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(u64::to_string).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Neighbor sums S(v) for some labeling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumVector(pub Vec<u64>);

impl SumVector {
    pub fn get(&self, v: usize) -> u64 {
        self.0[v]
    }
}

/// Ordered list of disjoint nonempty vertex sets covering V.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    parts: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(n: usize, mut parts: Vec<Vec<usize>>) -> Result<Self, DagError> {
        let mut seen = vec![false; n];
        for part in &mut parts {
            if part.is_empty() {
                return Err(DagError::InvalidPartition("empty part".into()));
            }
            part.sort_unstable();
            for &v in part.iter() {
                if v >= n {
                    return Err(DagError::InvalidPartition(format!("vertex {v} out of range")));
                }
                if seen[v] {
                    return Err(DagError::InvalidPartition(format!("vertex {v} repeated")));
                }
                seen[v] = true;
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(DagError::InvalidPartition("parts do not cover V".into()));
        }
        Ok(Partition { parts })
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Part index per vertex.
    pub fn part_of(&self, n: usize) -> Vec<usize> {
        let mut which = vec![0; n];
        for (i, part) in self.parts.iter().enumerate() {
            for &v in part {
                which[v] = i;
            }
        }
        which
    }
}

/// Parses the `p dag <n> <m>` format.
pub fn parse_dag(text: &str) -> Result<Dag, DagError> {
    let mut header: Option<(usize, usize)> = None;
    let mut arcs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let mut tokens = raw.split_whitespace();
        let Some(tag) = tokens.next() else { continue };
        let syntax = |msg: &str| DagError::Syntax {
            line,
            msg: msg.to_string(),
        };
        match tag {
            "c" => continue,
            "p" => {
                if header.is_some() {
                    return Err(syntax("duplicate header"));
                }
                if tokens.next() != Some("dag") {
                    return Err(syntax("expected 'p dag <n> <m>'"));
                }
                let n = parse_num(tokens.next(), line)?;
                let m = parse_num(tokens.next(), line)?;
                if tokens.next().is_some() {
                    return Err(syntax("trailing tokens in header"));
                }
                header = Some((n, m));
            }
            "a" => {
                let Some((n, _)) = header else {
                    return Err(syntax("arc before header"));
                };
                let u = parse_num(tokens.next(), line)?;
                let v = parse_num(tokens.next(), line)?;
                if tokens.next().is_some() {
                    return Err(syntax("trailing tokens in arc line"));
                }
                for id in [u, v] {
                    if id == 0 || id > n {
                        return Err(DagError::OutOfRange { id, n });
                    }
                }
                arcs.push((u, v));
            }
            other => return Err(syntax(&format!("unknown line type '{other}'"))),
        }
    }
    let (n, m) = header.ok_or(DagError::Syntax {
        line: 0,
        msg: "missing 'p dag' header".into(),
    })?;
    if arcs.len() != m {
        return Err(DagError::Syntax {
            line: 0,
            msg: format!("header declares {m} arcs, found {}", arcs.len()),
        });
    }
    Dag::from_arcs(n, &arcs)
}

fn parse_num(token: Option<&str>, line: usize) -> Result<usize, DagError> {
    let token = token.ok_or(DagError::Syntax {
        line,
        msg: "missing number".into(),
    })?;
    token.parse().map_err(|_| DagError::Syntax {
        line,
        msg: format!("'{token}' is not a non-negative integer"),
    })
}

/// Original ids in topological order (smallest id first among ties).
pub fn topological_order(d: &Dag) -> Vec<usize> {
    d.ids.clone()
}

pub fn neighbor_sums(d: &Dag, f: &Labeling) -> Result<SumVector, DagError> {
    if f.len() != d.n() {
        return Err(DagError::LengthMismatch {
            expected: d.n(),
            got: f.len(),
        });
    }
    Ok(SumVector(
        (0..d.n())
            .map(|v| d.neighbors(v).iter().map(|&w| f.get(w)).sum())
            .collect(),
    ))
}

/// True iff S(u) < S(v) for every arc (u, v).
pub fn is_topological_additive(d: &Dag, f: &Labeling) -> Result<bool, DagError> {
    let sums = neighbor_sums(d, f)?;
    Ok(d.arcs().iter().all(|&(u, v)| sums.get(u) < sums.get(v)))
}

/// Looks for vertices u != v with N(u) ⊆ N(v) and a directed path v -> u.
/// Such a pair proves D has no topological additive numbering; its absence
/// proves nothing.
pub fn obs22_infeasibility(d: &Dag) -> Option<(usize, usize)> {
    let n = d.n();
    // reach[v][u]: directed path v -> u; indices are topological so a
    // reverse sweep suffices
    let mut reach = vec![vec![false; n]; n];
    for v in (0..n).rev() {
        for &w in d.out_neighbors(v) {
            reach[v][w] = true;
            for x in w + 1..n {
                if reach[w][x] {
                    reach[v][x] = true;
                }
            }
        }
    }
    for u in 0..n {
        for v in 0..n {
            if reach[v][u] && is_subset(d.neighbors(u), d.neighbors(v)) {
                return Some((u, v));
            }
        }
    }
    None
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

/// Bipartition (V_1, V_2) with every arc in V_1 × V_2, if one exists.
pub fn detect_monotone_bipartite(d: &Dag) -> Result<Option<Partition>, DagError> {
    d.require_connected()?;
    if d.n() < 2 {
        return Ok(None);
    }
    let Some(color) = d.two_coloring() else {
        return Ok(None);
    };
    let tail_color = color[d.arcs()[0].0];
    if d
        .arcs()
        .iter()
        .any(|&(u, v)| color[u] != tail_color || color[v] == tail_color)
    {
        return Ok(None);
    }
    let (tails, heads): (Vec<usize>, Vec<usize>) =
        (0..d.n()).partition(|&v| color[v] == tail_color);
    Partition::new(d.n(), vec![tails, heads]).map(Some)
}

/// If G(D) is complete multipartite and arcs between parts follow a total
/// order on the parts, returns the parts in that order.
pub fn detect_complete_monotone_multipartite(d: &Dag) -> Result<Option<Partition>, DagError> {
    d.require_connected()?;
    let n = d.n();
    // classes of the "equal or non-adjacent" relation
    let mut class = vec![usize::MAX; n];
    let mut parts: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        if class[v] != usize::MAX {
            continue;
        }
        let id = parts.len();
        let members: Vec<usize> = (v..n).filter(|&w| w == v || !d.adjacent(v, w)).collect();
        for &w in &members {
            if class[w] != usize::MAX {
                return Ok(None);
            }
            class[w] = id;
        }
        parts.push(members);
    }
    // non-adjacency must be transitive: members pairwise non-adjacent, and
    // every cross-part pair adjacent
    let expected_edges: usize = {
        let sizes: Vec<usize> = parts.iter().map(Vec::len).collect();
        let total: usize = sizes.iter().sum();
        (total * total - sizes.iter().map(|s| s * s).sum::<usize>()) / 2
    };
    if d.num_arcs() != expected_edges
        || parts
            .iter()
            .any(|p| p.iter().any(|&a| p.iter().any(|&b| d.adjacent(a, b))))
    {
        return Ok(None);
    }

    let r = parts.len();
    // direction[i][j] = true when some arc goes from part i to part j
    let mut direction = vec![vec![false; r]; r];
    for &(u, v) in d.arcs() {
        direction[class[u]][class[v]] = true;
    }
    for i in 0..r {
        for j in 0..r {
            if direction[i][j] && direction[j][i] {
                return Ok(None);
            }
        }
    }
    // order parts by number of parts they dominate (a transitive tournament
    // has distinct out-degrees r-1, ..., 0)
    let mut order: Vec<usize> = (0..r).collect();
    let outdeg: Vec<usize> = (0..r)
        .map(|i| direction[i].iter().filter(|&&x| x).count())
        .collect();
    order.sort_by_key(|&i| Reverse(outdeg[i]));
    for (pos, &i) in order.iter().enumerate() {
        if outdeg[i] != r - 1 - pos {
            return Ok(None);
        }
        if order[pos + 1..].iter().any(|&j| !direction[i][j]) {
            return Ok(None);
        }
    }
    let ordered = order.into_iter().map(|i| parts[i].clone()).collect();
    Partition::new(n, ordered).map(Some)
}
