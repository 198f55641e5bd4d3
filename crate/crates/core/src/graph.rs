//! Simple undirected graphs: construction, text formats and BFS distances.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};
use crate::metric::{DistanceMatrix, FiniteMetricSpace};

/// Simple undirected graph on the dense vertex set `0..n`.
///
/// Adjacency lists are kept sorted and deduplicated. Connectivity is not an
/// invariant; operations that need it check it themselves.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<usize>>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

impl Graph {
    /// Graph with `n` vertices and no edges.
    pub fn empty(n: usize) -> Self {
        Self { n, adj: vec![Vec::new(); n] }
    }

    /// Builds a graph from an edge iterator, rejecting loops and
    /// out-of-range endpoints. Duplicate edges are merged.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::empty(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        for x in [u, v] {
            if x >= self.n {
                return Err(Error::VertexOutOfRange { vertex: x, n: self.n });
            }
        }
        if u == v {
            return Err(Error::LoopEdge { line: 0, vertex: u });
        }
        if let Err(pos) = self.adj[u].binary_search(&v) {
            self.adj[u].insert(pos, v);
            let pos = self.adj[v].binary_search(&u).unwrap_err();
            self.adj[v].insert(pos, u);
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, nb)| nb.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Neighbourhood bitmasks; only valid for `n <= 64`.
    pub fn adjacency_masks(&self) -> Vec<u64> {
        assert!(self.n <= 64, "bitmask adjacency needs n <= 64");
        self.adj
            .iter()
            .map(|nb| nb.iter().fold(0u64, |m, &v| m | (1 << v)))
            .collect()
    }

    /// BFS distances from `src`; unreachable vertices get `None`.
    pub fn bfs(&self, src: usize) -> Vec<Option<u64>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::new();
        dist[src] = Some(0);
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &v in &self.adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.first_unreachable().is_none()
    }

    fn first_unreachable(&self) -> Option<usize> {
        if self.n == 0 {
            return None;
        }
        self.bfs(0).iter().position(Option::is_none)
    }

    /// Error unless the graph is connected.
    pub fn require_connected(&self) -> Result<()> {
        match self.first_unreachable() {
            Some(b) => Err(Error::Disconnected { a: 0, b }),
            None => Ok(()),
        }
    }

    /// Graph whose vertex `perm[u]` plays the role of `u`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let mut g = Self::empty(self.n);
        for (u, v) in self.edges() {
            g.add_edge(perm[u], perm[v]).expect("permutation keeps edges valid");
        }
        g
    }

    pub fn path(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycles need at least three vertices");
        Self::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    pub fn complete(n: usize) -> Self {
        Self::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
    }

    /// `K_{a,b}` with parts `0..a` and `a..a+b`.
    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        Self::from_edges(a + b, (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v)))).unwrap()
    }

    /// Two copies of `K_k` joined by a path with `path_len` edges.
    ///
    /// The first clique is `0..k`, the second is `k..2k`, and the
    /// `path_len - 1` internal path vertices follow. The path runs from
    /// vertex `k - 1` to vertex `k`.
    pub fn barbell(k: usize, path_len: usize) -> Self {
        assert!(k >= 1 && path_len >= 1);
        let internal = path_len - 1;
        let n = 2 * k + internal;
        let mut g = Self::empty(n);
        for base in [0, k] {
            for u in 0..k {
                for v in u + 1..k {
                    g.add_edge(base + u, base + v).unwrap();
                }
            }
        }
        let mut prev = k - 1;
        for i in 0..internal {
            g.add_edge(prev, 2 * k + i).unwrap();
            prev = 2 * k + i;
        }
        g.add_edge(prev, k).unwrap();
        g
    }

    /// Graph on `n` vertices whose edges are the set bits of `mask`, with bit
    /// `i` addressing the `i`-th pair of [`all_pairs`].
    pub fn from_pair_mask(n: usize, mask: u64) -> Self {
        let pairs = all_pairs(n);
        Self::from_edges(
            n,
            pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p),
        )
        .unwrap()
    }

    /// Encodes in graph6 short form (`n <= 62`).
    pub fn to_graph6(&self) -> String {
        assert!(self.n <= 62, "short graph6 form needs n <= 62");
        let mut out = vec![(self.n as u8) + 63];
        let mut acc = 0u8;
        let mut filled = 0;
        for j in 1..self.n {
            for i in 0..j {
                acc = (acc << 1) | self.has_edge(i, j) as u8;
                filled += 1;
                if filled == 6 {
                    out.push(acc + 63);
                    acc = 0;
                    filled = 0;
                }
            }
        }
        if filled > 0 {
            out.push((acc << (6 - filled)) + 63);
        }
        String::from_utf8(out).unwrap()
    }

    /// Shortest-path metric, wrapped as a validated finite metric space.
    pub fn metric_space(&self) -> Result<FiniteMetricSpace<u64>> {
        let d = bfs_apsp(self)?;
        Ok(FiniteMetricSpace::from_graph_distances(d))
    }
}

/// Unordered vertex pairs `(i, j)`, `i < j`, in lexicographic order.
pub fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// Parses `u v` lines. An optional first line `n <count>` fixes the vertex
/// count; otherwise it is one more than the largest label. Blank lines and
/// `#` comments are ignored.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut explicit_n = None;
    let mut edges = Vec::new();
    let mut seen_content = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if !seen_content && tokens.first() == Some(&"n") {
            if tokens.len() != 2 {
                return Err(Error::Parse { line: line_no, msg: "expected `n <count>`".into() });
            }
            explicit_n = Some(parse_label(tokens[1], line_no)?);
            seen_content = true;
            continue;
        }
        seen_content = true;
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected two vertex labels, found {} tokens", tokens.len()),
            });
        }
        let u = parse_label(tokens[0], line_no)?;
        let v = parse_label(tokens[1], line_no)?;
        if u == v {
            return Err(Error::LoopEdge { line: line_no, vertex: u });
        }
        edges.push((u, v, line_no));
    }
    let max_label = edges.iter().map(|&(u, v, _)| u.max(v) + 1).max().unwrap_or(0);
    let n = match explicit_n {
        Some(n) if n < max_label => {
            return Err(Error::VertexOutOfRange { vertex: max_label - 1, n });
        }
        Some(n) => n,
        None => max_label,
    };
    Graph::from_edges(n, edges.into_iter().map(|(u, v, _)| (u, v)))
}

fn parse_label(tok: &str, line: usize) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| Error::Parse { line, msg: format!("`{tok}` is not a nonnegative integer") })
}

/// Decodes a graph6 string (short form, `n <= 62`). A leading `>>graph6<<`
/// header and surrounding whitespace are accepted.
pub fn parse_graph6(bytes: &[u8]) -> Result<Graph> {
    let trimmed = trim_ascii(bytes);
    let body = trimmed.strip_prefix(b">>graph6<<".as_slice()).unwrap_or(trimmed);
    let (&head, rest) = body.split_first().ok_or_else(|| Error::Graph6("empty input".into()))?;
    if !(63..=126).contains(&head) {
        return Err(Error::Graph6(format!("bad header byte {head:#04x}")));
    }
    if head == 126 {
        return Err(Error::Graph6("long form (n > 62) is not supported".into()));
    }
    let n = (head - 63) as usize;
    let nbits = n * n.saturating_sub(1) / 2;
    let nbytes = nbits.div_ceil(6);
    if rest.len() < nbytes {
        return Err(Error::Graph6(format!(
            "truncated: need {nbytes} data bytes for n = {n}, found {}",
            rest.len()
        )));
    }
    if rest.len() > nbytes {
        return Err(Error::Graph6(format!("{} trailing bytes", rest.len() - nbytes)));
    }
    let mut bits = Vec::with_capacity(nbytes * 6);
    for &b in rest {
        if !(63..=126).contains(&b) {
            return Err(Error::Graph6(format!("bad data byte {b:#04x}")));
        }
        let x = b - 63;
        bits.extend((0..6).rev().map(|k| x >> k & 1 == 1));
    }
    let mut g = Graph::empty(n);
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            if bits[k] {
                g.add_edge(i, j)?;
            }
            k += 1;
        }
    }
    Ok(g)
}

fn trim_ascii(b: &[u8]) -> &[u8] {
    let start = b.iter().position(|c| !c.is_ascii_whitespace()).unwrap_or(b.len());
    let end = b.iter().rposition(|c| !c.is_ascii_whitespace()).map_or(start, |e| e + 1);
    &b[start..end]
}

/// All-pairs shortest-path distances by one BFS per vertex.
///
/// Fails on disconnected graphs, naming one vertex from each of two
/// different components.
pub fn bfs_apsp(g: &Graph) -> Result<DistanceMatrix<u64>> {
    g.require_connected()?;
    let n = g.n();
    let mut data = Vec::with_capacity(n * n);
    for u in 0..n {
        data.extend(g.bfs(u).into_iter().map(|d| d.expect("connected")));
    }
    Ok(DistanceMatrix::from_raw_unchecked(n, data))
}
