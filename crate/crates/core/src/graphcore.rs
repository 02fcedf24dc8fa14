//! Simple connected graphs and the structural predicates the rest of the crate
//! relies on: distances, pendant and support vertices, generalized suns, the
//! nested-neighborhood obstruction, degree parity and a canonical code.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

/// Canonical codes are computed for graphs up to this many vertices.
pub const MAX_CANON_VERTICES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph needs at least 2 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("edge ({0}, {1}) names a vertex outside 0..{2}")]
    VertexOutOfRange(usize, usize, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("edge ({0}, {1}) appears twice")]
    DuplicateEdge(usize, usize),
    #[error("graph is disconnected: vertex {0} is unreachable from vertex 0")]
    Disconnected(usize),
    #[error("{what} is limited to {limit} vertices, graph has {n}")]
    TooLarge {
        what: &'static str,
        limit: usize,
        n: usize,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A simple, undirected, connected graph on vertices `0..n`.
///
/// Adjacency lists are sorted, so iteration order is deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        if n < 2 {
            return Err(GraphError::TooFewVertices(n));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::VertexOutOfRange(u, v, n));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if adj[u].contains(&v) {
                return Err(GraphError::DuplicateEdge(u, v));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let g = Graph {
            adj,
            edge_count: edges.len(),
        };
        let dist = g.distances_from(0);
        if let Some(v) = dist.iter().position(Option::is_none) {
            return Err(GraphError::Disconnected(v));
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for (u, list) in self.adj.iter().enumerate() {
            out.extend(list.iter().filter(|&&v| u < v).map(|&v| (u, v)));
        }
        out
    }

    /// Number of independent cycles, `m - n + 1`.
    pub fn cycle_rank(&self) -> usize {
        self.edge_count + 1 - self.n()
    }

    pub fn is_regular(&self) -> bool {
        let d = self.degree(0);
        (1..self.n()).all(|v| self.degree(v) == d)
    }

    fn distances_from(&self, s: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        dist[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].expect("queued vertices have a distance");
            for &w in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Shortest-path distances from `s`.
    pub fn distances(&self, s: usize) -> Vec<usize> {
        self.distances_from(s)
            .into_iter()
            .map(|d| d.expect("connected"))
            .collect()
    }

    pub fn eccentricity(&self, v: usize) -> usize {
        self.distances(v).into_iter().max().unwrap_or(0)
    }

    pub fn diameter(&self) -> usize {
        (0..self.n())
            .map(|v| self.eccentricity(v))
            .max()
            .unwrap_or(0)
    }

    /// Vertices left after repeatedly deleting degree-1 vertices, ascending.
    pub fn two_core(&self) -> Vec<usize> {
        let mut deg: Vec<usize> = (0..self.n()).map(|v| self.degree(v)).collect();
        let mut removed = vec![false; self.n()];
        let mut stack: Vec<usize> = (0..self.n()).filter(|&v| deg[v] <= 1).collect();
        while let Some(v) = stack.pop() {
            if removed[v] {
                continue;
            }
            removed[v] = true;
            for &w in &self.adj[v] {
                if !removed[w] {
                    deg[w] -= 1;
                    if deg[w] == 1 {
                        stack.push(w);
                    }
                }
            }
        }
        (0..self.n()).filter(|&v| !removed[v]).collect()
    }
}

/// Pendant and support vertices of a graph, each list ascending.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StructuralProfile {
    pub pendants: Vec<usize>,
    pub supports: Vec<usize>,
    pub weak_supports: Vec<usize>,
    pub strong_supports: Vec<usize>,
    /// Pendant neighbors of each vertex.
    pub pendant_count: Vec<usize>,
}

impl StructuralProfile {
    pub fn is_support(&self, v: usize) -> bool {
        self.pendant_count[v] > 0
    }
}

pub fn classify_vertices(g: &Graph) -> StructuralProfile {
    let n = g.n();
    let pendant_count: Vec<usize> = (0..n)
        .map(|v| g.neighbors(v).iter().filter(|&&w| g.degree(w) == 1).count())
        .collect();
    StructuralProfile {
        pendants: (0..n).filter(|&v| g.degree(v) == 1).collect(),
        supports: (0..n).filter(|&v| pendant_count[v] > 0).collect(),
        weak_supports: (0..n).filter(|&v| pendant_count[v] == 1).collect(),
        strong_supports: (0..n).filter(|&v| pendant_count[v] >= 2).collect(),
        pendant_count,
    }
}

/// A unicyclic graph whose cycle is not the whole graph and whose off-cycle
/// vertices are all pendants.
pub fn is_generalized_sun(g: &Graph) -> bool {
    if g.cycle_rank() != 1 {
        return false;
    }
    let core = g.two_core();
    core.len() < g.n()
        && (0..g.n())
            .filter(|v| core.binary_search(v).is_err())
            .all(|v| g.degree(v) == 1)
}

/// Vertices of the unique cycle of a generalized sun, in cyclic order starting
/// from the smallest vertex and continuing to its smaller cycle neighbor.
pub fn sun_cycle(g: &Graph) -> Option<Vec<usize>> {
    if !is_generalized_sun(g) {
        return None;
    }
    let core: BTreeSet<usize> = g.two_core().into_iter().collect();
    let start = *core.iter().next()?;
    let mut order = vec![start];
    let mut prev = start;
    let mut cur = *g.neighbors(start).iter().find(|w| core.contains(w))?;
    while cur != start {
        order.push(cur);
        let next = *g
            .neighbors(cur)
            .iter()
            .find(|&&w| core.contains(&w) && w != prev)?;
        prev = cur;
        cur = next;
    }
    Some(order)
}

/// Lexicographically least ordered pair `(u, v)` with `deg(u) = deg(v) + 1`
/// and `N(v)` contained in `N(u)`.
///
/// Such a pair forces the label of the extra neighbor of `u` to be zero, so a
/// graph with one has no magic labeling over any group.
pub fn neighborhood_obstruction(g: &Graph) -> Option<(usize, usize)> {
    for u in 0..g.n() {
        for v in 0..g.n() {
            if u == v || g.degree(u) != g.degree(v) + 1 {
                continue;
            }
            if g.neighbors(v).iter().all(|&w| g.has_edge(u, w)) {
                return Some((u, v));
            }
        }
    }
    None
}

pub fn degrees_same_parity(g: &Graph) -> bool {
    let p = g.degree(0) % 2;
    (1..g.n()).all(|v| g.degree(v) % 2 == p)
}

/// Isomorphism invariant: equal codes if and only if the graphs are isomorphic.
///
/// The first byte is `n`; the rest packs the upper triangle of the adjacency
/// matrix under the lexicographically least relabeling found by
/// individualization and refinement from the degree partition.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCode(pub Vec<u8>);

impl CanonicalCode {
    pub fn to_hex(&self) -> String {
        self.0.iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

pub fn canonical_code(g: &Graph) -> Result<CanonicalCode, GraphError> {
    let n = g.n();
    if n > MAX_CANON_VERTICES {
        return Err(GraphError::TooLarge {
            what: "canonical code",
            limit: MAX_CANON_VERTICES,
            n,
        });
    }
    let mut degrees: Vec<u32> = (0..n).map(|v| g.degree(v) as u32).collect();
    let mut best = None;
    refine(g, &mut degrees);
    search(g, degrees, &mut best);
    Ok(CanonicalCode(
        best.expect("search visits at least one leaf"),
    ))
}

/// Splits color classes by the multiset of neighbor colors until stable.
/// Colors are re-ranked to `0..k` in an isomorphism-invariant way.
fn refine(g: &Graph, colors: &mut [u32]) {
    let mut classes = count_classes(colors);
    loop {
        let signatures: Vec<(u32, Vec<u32>)> = (0..g.n())
            .map(|v| {
                let mut around: Vec<u32> = g.neighbors(v).iter().map(|&w| colors[w]).collect();
                around.sort_unstable();
                (colors[v], around)
            })
            .collect();
        let mut distinct = signatures.clone();
        distinct.sort();
        distinct.dedup();
        for (c, sig) in colors.iter_mut().zip(&signatures) {
            *c = distinct.binary_search(sig).expect("present") as u32;
        }
        if distinct.len() == classes {
            return;
        }
        classes = distinct.len();
    }
}

fn count_classes(colors: &[u32]) -> usize {
    colors.iter().collect::<BTreeSet<_>>().len()
}

fn search(g: &Graph, colors: Vec<u32>, best: &mut Option<Vec<u8>>) {
    let n = g.n();
    let mut cells: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (v, &c) in colors.iter().enumerate() {
        cells[c as usize].push(v);
    }
    let Some(target) = cells.iter().find(|cell| cell.len() > 1) else {
        let code = code_for(g, &colors);
        if best.as_ref().is_none_or(|b| code < *b) {
            *best = Some(code);
        }
        return;
    };
    // Twins are swapped by an automorphism fixing everything else, so one
    // representative per twin class yields the same set of leaves.
    let mut open_seen = BTreeSet::new();
    let mut closed_seen = BTreeSet::new();
    for &v in target {
        let open: Vec<usize> = g.neighbors(v).to_vec();
        let mut closed = open.clone();
        closed.push(v);
        closed.sort_unstable();
        let fresh_open = open_seen.insert(open);
        let fresh_closed = closed_seen.insert(closed);
        if !(fresh_open && fresh_closed) {
            continue;
        }
        let c = colors[v];
        let mut next: Vec<u32> = colors
            .iter()
            .enumerate()
            .map(|(w, &cw)| 2 * cw + u32::from(cw == c && w != v))
            .collect();
        refine(g, &mut next);
        search(g, next, best);
    }
}

fn code_for(g: &Graph, position: &[u32]) -> Vec<u8> {
    let n = g.n();
    let mut at = vec![0usize; n];
    for (v, &p) in position.iter().enumerate() {
        at[p as usize] = v;
    }
    let mut out = vec![n as u8];
    let mut byte = 0u8;
    let mut filled = 0;
    for i in 0..n {
        for j in i + 1..n {
            byte = (byte << 1) | u8::from(g.has_edge(at[i], at[j]));
            filled += 1;
            if filled == 8 {
                out.push(byte);
                byte = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push(byte << (8 - filled));
    }
    out
}

/// Graphviz rendering. `names` overrides the vertex labels.
pub fn to_dot(g: &Graph, names: Option<&[String]>) -> String {
    let mut out = String::from("graph G {\n");
    for v in 0..g.n() {
        let label = names
            .and_then(|ns| ns.get(v))
            .cloned()
            .unwrap_or_else(|| v.to_string());
        let _ = writeln!(out, "  {v} [label=\"{}\"];", label.replace('"', "\\\""));
    }
    for (u, v) in g.edges() {
        let _ = writeln!(out, "  {u} -- {v};");
    }
    out.push_str("}\n");
    out
}

/// Parses the plain edge-list format: vertex count on the first line, then
/// one `u v` pair per line. Blank lines and `#` comments are skipped.
pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (first, header) = lines.next().ok_or(GraphError::Parse {
        line: 1,
        message: "missing vertex count".into(),
    })?;
    let n: usize = header.parse().map_err(|_| GraphError::Parse {
        line: first,
        message: format!("expected a vertex count, found '{header}'"),
    })?;
    let mut edges = Vec::new();
    for (line, body) in lines {
        let parts: Vec<&str> = body.split_whitespace().collect();
        let pair = match parts.as_slice() {
            [a, b] => a.parse::<usize>().ok().zip(b.parse::<usize>().ok()),
            _ => None,
        };
        let (u, v) = pair.ok_or_else(|| GraphError::Parse {
            line,
            message: format!("expected 'u v', found '{body}'"),
        })?;
        if u >= n || v >= n {
            return Err(GraphError::Parse {
                line,
                message: format!("vertex out of range 0..{n}"),
            });
        }
        edges.push((u, v));
    }
    Graph::new(n, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(k: usize) -> Graph {
        let edges: Vec<_> = (0..k).map(|i| (i, (i + 1) % k)).collect();
        Graph::new(k, &edges).unwrap()
    }

    #[test]
    fn rejects_malformed_input() {
        assert_eq!(Graph::new(1, &[]), Err(GraphError::TooFewVertices(1)));
        assert_eq!(Graph::new(2, &[(0, 0)]), Err(GraphError::SelfLoop(0)));
        assert_eq!(
            Graph::new(2, &[(0, 1), (1, 0)]),
            Err(GraphError::DuplicateEdge(1, 0))
        );
        assert_eq!(Graph::new(3, &[(0, 1)]), Err(GraphError::Disconnected(2)));
        assert!(matches!(
            Graph::new(2, &[(0, 5)]),
            Err(GraphError::VertexOutOfRange(..))
        ));
    }

    #[test]
    fn cycle_basics() {
        let c6 = cycle(6);
        assert_eq!(c6.diameter(), 3);
        assert_eq!(c6.cycle_rank(), 1);
        assert!(c6.is_regular());
        assert!(!is_generalized_sun(&c6));
        assert_eq!(c6.two_core().len(), 6);
    }

    #[test]
    fn triangle_with_pendants() {
        // Triangle 0-1-2 with two pendants on 0 and one on 1.
        let g = Graph::new(6, &[(0, 1), (1, 2), (2, 0), (0, 3), (0, 4), (1, 5)]).unwrap();
        let p = classify_vertices(&g);
        assert_eq!(p.pendants, vec![3, 4, 5]);
        assert_eq!(p.supports, vec![0, 1]);
        assert_eq!(p.strong_supports, vec![0]);
        assert_eq!(p.weak_supports, vec![1]);
        assert!(is_generalized_sun(&g));
        assert_eq!(sun_cycle(&g), Some(vec![0, 1, 2]));
        assert_eq!(g.diameter(), 3);
    }

    #[test]
    fn obstruction_on_support_with_degree_two_neighbor() {
        // Path 0-1-2-3 with a pendant 4 on 1: vertex 2 has N = {1, 3},
        // vertex 1 has N = {0, 2, 4}; (u, v) with N(v) in N(u) needs deg(u) = 3.
        let g = Graph::new(5, &[(0, 1), (1, 2), (2, 3), (1, 4)]).unwrap();
        let (u, v) = neighborhood_obstruction(&g).unwrap();
        assert_eq!(g.degree(u), g.degree(v) + 1);
        assert!(g.neighbors(v).iter().all(|&w| g.has_edge(u, w)));
        assert_eq!(neighborhood_obstruction(&cycle(5)), None);
    }

    #[test]
    fn parity() {
        assert!(degrees_same_parity(&cycle(7)));
        let p3 = Graph::new(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(!degrees_same_parity(&p3));
    }

    #[test]
    fn canonical_code_separates_and_identifies() {
        let a = Graph::new(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let b = Graph::new(4, &[(2, 0), (0, 3), (3, 1)]).unwrap();
        let star = Graph::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(canonical_code(&a), canonical_code(&b));
        assert_ne!(canonical_code(&a), canonical_code(&star));
        let big = cycle(17);
        assert!(matches!(
            canonical_code(&big),
            Err(GraphError::TooLarge { .. })
        ));
    }

    #[test]
    fn canonical_code_on_regular_graphs() {
        let prism = Graph::new(
            6,
            &[
                (0, 1),
                (1, 2),
                (2, 0),
                (3, 4),
                (4, 5),
                (5, 3),
                (0, 3),
                (1, 4),
                (2, 5),
            ],
        )
        .unwrap();
        let k33 = Graph::new(
            6,
            &[
                (0, 3),
                (0, 4),
                (0, 5),
                (1, 3),
                (1, 4),
                (1, 5),
                (2, 3),
                (2, 4),
                (2, 5),
            ],
        )
        .unwrap();
        assert_ne!(canonical_code(&prism), canonical_code(&k33));
        assert_eq!(canonical_code(&cycle(6)).unwrap().0[0], 6);
    }

    #[test]
    fn dot_output_is_deterministic() {
        let g = Graph::new(3, &[(2, 1), (0, 1)]).unwrap();
        let names = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        assert_eq!(
            to_dot(&g, Some(&names)),
            "graph G {\n  0 [label=\"a\"];\n  1 [label=\"b\"];\n  2 [label=\"c\"];\n  0 -- 1;\n  1 -- 2;\n}\n"
        );
    }

    #[test]
    fn graph_file_parsing() {
        let g = parse_graph("# path\n3\n0 1\n\n1 2\n").unwrap();
        assert_eq!(g.edges(), vec![(0, 1), (1, 2)]);
        assert_eq!(
            parse_graph("3\n0 1\n1 x\n"),
            Err(GraphError::Parse {
                line: 3,
                message: "expected 'u v', found '1 x'".into()
            })
        );
        assert!(matches!(
            parse_graph("2\n0 7\n"),
            Err(GraphError::Parse { line: 2, .. })
        ));
        assert_eq!(parse_graph("3\n0 1\n"), Err(GraphError::Disconnected(2)));
    }
}
