//! Finite graph substrate: construction, metrics, balls, boundaries, ends
//! profiles, growth, and small-graph isomorphism.
//!
//! All graphs are simple, undirected, and vertex-labelled. A graph may carry
//! a [`WindowDescriptor`] saying which infinite family it is a finite window
//! of; the descriptor's `rim` records the vertices at the truncation edge so
//! that metric queries can detect when an answer would be a truncation
//! artifact.

use crate::{Error, Result};
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

/// A set of vertices of some [`Graph`], by internal index.
pub type VertexSet = BTreeSet<usize>;

/// Which infinite graph a finite window materializes, and where it was cut.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowDescriptor {
    /// Family name, e.g. `line`, `grid-2`, `tree-3`, `wreath`.
    pub family: String,
    /// Family parameters (radii, degrees, moduli), family-specific.
    pub params: Vec<i64>,
    /// Vertices at the truncation edge. Empty means the graph is complete
    /// (not a window of something bigger).
    pub rim: VertexSet,
    /// True when distances measured inside the window agree with distances
    /// in the infinite graph (convex windows: intervals, boxes, tree balls).
    pub metrically_faithful: bool,
}

/// Finite simple undirected graph with string vertex labels.
#[derive(Debug, Clone)]
pub struct Graph {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    adj: Vec<Vec<usize>>,
    pub name: Option<String>,
    pub window: Option<WindowDescriptor>,
}

impl Graph {
    pub fn new() -> Self {
        Graph {
            labels: Vec::new(),
            index: HashMap::new(),
            adj: Vec::new(),
            name: None,
            window: None,
        }
    }

    /// Adds a vertex (no-op if the label already exists) and returns its index.
    pub fn add_vertex(&mut self, label: &str) -> usize {
        if let Some(&i) = self.index.get(label) {
            return i;
        }
        let i = self.labels.len();
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), i);
        self.adj.push(Vec::new());
        i
    }

    /// Adds an undirected edge between two labels, creating vertices as needed.
    /// Self-loops and duplicate edges are rejected.
    pub fn add_edge(&mut self, a: &str, b: &str) -> Result<()> {
        let i = self.add_vertex(a);
        let j = self.add_vertex(b);
        self.add_edge_idx(i, j)
    }

    pub fn add_edge_idx(&mut self, i: usize, j: usize) -> Result<()> {
        if i == j {
            return Err(Error::Invalid(format!("self-loop at {}", self.labels[i])));
        }
        if self.adj[i].contains(&j) {
            return Ok(()); // already present; keep the relation simple
        }
        self.adj[i].push(j);
        self.adj[j].push(i);
        self.adj[i].sort_unstable();
        self.adj[j].sort_unstable();
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|n| n.len()).sum::<usize>() / 2
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn vertex(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(label.to_string()))
    }

    pub fn has_vertex(&self, label: &str) -> bool {
        self.index.contains_key(label)
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(|n| n.len()).max().unwrap_or(0)
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> {
        0..self.labels.len()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in self.vertices() {
            for &j in &self.adj[i] {
                if i < j {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn is_adjacent(&self, i: usize, j: usize) -> bool {
        self.adj[i].binary_search(&j).is_ok()
    }

    /// Exact geodesic hop counts from `source`; `None` marks unreachable
    /// vertices.
    pub fn distances_from(&self, source: usize) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.labels.len()];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for &w in &self.adj[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// BFS distance between two vertices, `None` if disconnected.
    pub fn distance(&self, a: usize, b: usize) -> Option<u32> {
        // Early-exit BFS; fine for the desk-scale graphs we handle.
        if a == b {
            return Some(0);
        }
        let mut dist = vec![u32::MAX; self.labels.len()];
        let mut queue = VecDeque::new();
        dist[a] = 0;
        queue.push_back(a);
        while let Some(v) = queue.pop_front() {
            for &w in &self.adj[v] {
                if dist[w] == u32::MAX {
                    dist[w] = dist[v] + 1;
                    if w == b {
                        return Some(dist[w]);
                    }
                    queue.push_back(w);
                }
            }
        }
        None
    }

    /// Multi-source BFS: hop count to the nearest vertex of `set`.
    pub fn distances_from_set(&self, set: &VertexSet) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.labels.len()];
        let mut queue = VecDeque::new();
        for &v in set {
            dist[v] = Some(0);
            queue.push_back(v);
        }
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for &w in &self.adj[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Closed metric ball of radius `r` around `v`.
    pub fn ball(&self, v: usize, r: u32) -> VertexSet {
        self.distances_from(v)
            .iter()
            .enumerate()
            .filter(|(_, d)| matches!(d, Some(x) if *x <= r))
            .map(|(i, _)| i)
            .collect()
    }

    /// Outer vertex boundary: vertices not in `s` adjacent to a vertex of `s`.
    pub fn boundary(&self, s: &VertexSet) -> VertexSet {
        let mut out = VertexSet::new();
        for &v in s {
            for &w in &self.adj[v] {
                if !s.contains(&w) {
                    out.insert(w);
                }
            }
        }
        out
    }

    /// `s^{+r}`: union of closed `r`-balls around the vertices of `s`.
    pub fn thicken(&self, s: &VertexSet, r: u32) -> VertexSet {
        self.distances_from_set(s)
            .iter()
            .enumerate()
            .filter(|(_, d)| matches!(d, Some(x) if *x <= r))
            .map(|(i, _)| i)
            .collect()
    }

    /// Connected components of the subgraph induced on `keep`.
    pub fn components_within(&self, keep: &VertexSet) -> Vec<VertexSet> {
        let mut seen = VertexSet::new();
        let mut comps = Vec::new();
        for &start in keep {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = VertexSet::new();
            let mut queue = VecDeque::new();
            queue.push_back(start);
            seen.insert(start);
            while let Some(v) = queue.pop_front() {
                comp.insert(v);
                for &w in &self.adj[v] {
                    if keep.contains(&w) && seen.insert(w) {
                        queue.push_back(w);
                    }
                }
            }
            comps.push(comp);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        if self.labels.is_empty() {
            return true;
        }
        self.distances_from(0).iter().all(|d| d.is_some())
    }

    /// Minimum distance from `v` to the window rim; `None` when the graph is
    /// not a window (no rim).
    pub fn rim_distance(&self, v: usize) -> Option<u32> {
        let rim = &self.window.as_ref()?.rim;
        if rim.is_empty() {
            return None;
        }
        self.distances_from_set(rim)[v]
    }

    /// Per-radius report of the components left after removing a ball, used
    /// to profile the ends of the underlying infinite graph.
    ///
    /// A component is *deep* when it contains a vertex at distance at least
    /// `margin` from the removed ball. When the graph is a window, the
    /// classification is only trusted if `center` is far enough from the rim
    /// that a deep vertex cannot be a truncation artifact; otherwise the
    /// query errors out as inconclusive.
    pub fn ends_profile(
        &self,
        center: usize,
        radii: &[u32],
        margin: u32,
    ) -> Result<Vec<EndsReport>> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        let mut reports = Vec::new();
        for &r in radii {
            if let Some(rim_d) = self.rim_distance(center) {
                if rim_d <= r + margin {
                    return Err(Error::Window(format!(
                        "ends profile inconclusive at this window: center is {} from the rim, \
                         but radius {} + margin {} requires more",
                        rim_d, r, margin
                    )));
                }
            }
            let ball = self.ball(center, r);
            let keep: VertexSet = self.vertices().filter(|v| !ball.contains(v)).collect();
            let comps = self.components_within(&keep);
            let dist_to_ball = self.distances_from_set(&ball);
            let deep = comps
                .iter()
                .filter(|c| {
                    c.iter()
                        .any(|&v| matches!(dist_to_ball[v], Some(d) if d >= margin))
                })
                .count();
            reports.push(EndsReport {
                radius: r,
                components: comps.len(),
                deep_components: deep,
            });
        }
        Ok(reports)
    }

    /// Growth value: the maximum cardinality of a closed `r`-ball, over all
    /// centers whose ball is certainly unaffected by window truncation.
    pub fn growth(&self, r: u32) -> Result<usize> {
        let mut best = None;
        for v in self.vertices() {
            if let Some(rim_d) = self.rim_distance(v) {
                // A center within r of the rim sees a truncated ball.
                if rim_d <= r {
                    continue;
                }
            }
            let size = self.ball(v, r).len();
            best = Some(best.map_or(size, |b: usize| b.max(size)));
        }
        best.ok_or_else(|| {
            Error::Window(format!(
                "no window-interior center remains at radius {}",
                r
            ))
        })
    }

    /// DOT export for visualization.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph {\n");
        for v in self.vertices() {
            out.push_str(&format!("  \"{}\";\n", self.labels[v]));
        }
        for (i, j) in self.edges() {
            out.push_str(&format!(
                "  \"{}\" -- \"{}\";\n",
                self.labels[i], self.labels[j]
            ));
        }
        out.push_str("}\n");
        out
    }

    /// Serializes to the line-based edge-list format (see [`Graph::parse`]).
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        if let Some(w) = &self.window {
            out.push_str(&format!("# window {}", w.family));
            for p in &w.params {
                out.push_str(&format!(" {}", p));
            }
            out.push('\n');
            if !w.rim.is_empty() {
                out.push_str("# rim");
                for &v in &w.rim {
                    out.push_str(&format!(" {}", self.labels[v]));
                }
                out.push('\n');
            }
        }
        let mut isolated: BTreeSet<usize> = self.vertices().collect();
        for (i, j) in self.edges() {
            isolated.remove(&i);
            isolated.remove(&j);
            out.push_str(&format!("{} {}\n", self.labels[i], self.labels[j]));
        }
        for v in isolated {
            out.push_str(&format!("# vertex {}\n", self.labels[v]));
        }
        out
    }

    /// Parses the edge-list format: one `u v` edge per line, `# vertex <id>`
    /// for isolated vertices, `# window <family> <params>` and `# rim <ids>`
    /// header comments for windows. Vertex labels must not contain spaces.
    pub fn parse(text: &str) -> Result<Graph> {
        let mut g = Graph::new();
        let mut window: Option<(String, Vec<i64>)> = None;
        let mut rim_labels: Vec<String> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                match toks.first() {
                    Some(&"vertex") if toks.len() == 2 => {
                        g.add_vertex(toks[1]);
                    }
                    Some(&"window") if toks.len() >= 2 => {
                        let params = toks[2..]
                            .iter()
                            .map(|t| {
                                t.parse::<i64>().map_err(|_| {
                                    Error::Invalid(format!("bad window param {:?}", t))
                                })
                            })
                            .collect::<Result<Vec<_>>>()?;
                        window = Some((toks[1].to_string(), params));
                    }
                    Some(&"rim") => {
                        rim_labels.extend(toks[1..].iter().map(|t| t.to_string()));
                    }
                    _ => {} // other comments ignored
                }
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 2 {
                return Err(Error::Invalid(format!("bad edge line {:?}", line)));
            }
            g.add_edge(toks[0], toks[1])?;
        }
        if let Some((family, params)) = window {
            let rim = rim_labels
                .iter()
                .map(|l| g.vertex(l))
                .collect::<Result<VertexSet>>()?;
            g.window = Some(WindowDescriptor {
                family,
                params,
                rim,
                metrically_faithful: false,
            });
        }
        Ok(g)
    }

    /// Exact isomorphism decision with a checked witness (≤ `cap` vertices).
    pub fn isomorphic(&self, other: &Graph, cap: usize) -> Result<IsoVerdict> {
        isomorphic(self, other, cap)
    }
}

impl Default for Graph {
    fn default() -> Self {
        Graph::new()
    }
}

/// One radius's entry in an ends profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndsReport {
    pub radius: u32,
    /// Components of the graph minus the ball.
    pub components: usize,
    /// Components containing a vertex at distance ≥ margin from the ball.
    pub deep_components: usize,
}

// ---------------------------------------------------------------------------
// Standard builders
// ---------------------------------------------------------------------------

/// Path graph `P_k` on vertices `0..k`.
pub fn path_graph(k: usize) -> Graph {
    let mut g = Graph::new();
    g.name = Some(format!("path-{}", k));
    for v in 0..k {
        g.add_vertex(&v.to_string());
    }
    for v in 1..k {
        g.add_edge(&(v - 1).to_string(), &v.to_string()).unwrap();
    }
    g
}

/// Cycle graph `C_k`.
pub fn cycle_graph(k: usize) -> Graph {
    let mut g = path_graph(k);
    g.name = Some(format!("cycle-{}", k));
    if k > 2 {
        g.add_edge(&(k - 1).to_string(), "0").unwrap();
    }
    g
}

/// Complete graph `K_k`.
pub fn complete_graph(k: usize) -> Graph {
    let mut g = Graph::new();
    g.name = Some(format!("complete-{}", k));
    for v in 0..k {
        g.add_vertex(&v.to_string());
    }
    for a in 0..k {
        for b in (a + 1)..k {
            g.add_edge(&a.to_string(), &b.to_string()).unwrap();
        }
    }
    g
}

/// Window `[-r, r]` of the bi-infinite line, labels `-r ..= r`.
pub fn line_window(r: i64) -> Graph {
    let mut g = Graph::new();
    g.name = Some(format!("line[{},{}]", -r, r));
    for v in -r..=r {
        g.add_vertex(&v.to_string());
    }
    for v in -r..r {
        g.add_edge(&v.to_string(), &(v + 1).to_string()).unwrap();
    }
    let rim: VertexSet = if r > 0 {
        [g.vertex(&(-r).to_string()).unwrap(), g.vertex(&r.to_string()).unwrap()]
            .into_iter()
            .collect()
    } else {
        VertexSet::new()
    };
    g.window = Some(WindowDescriptor {
        family: "line".into(),
        params: vec![r],
        rim,
        metrically_faithful: true,
    });
    g
}

/// Window `[-r, r]^d` of the grid `E^d` (d ∈ 1..=3), labels `x`, `x,y`, `x,y,z`.
pub fn grid_window(d: usize, r: i64) -> Result<Graph> {
    if !(1..=3).contains(&d) {
        return Err(Error::Invalid(format!("grid dimension {} not in 1..=3", d)));
    }
    if d == 1 {
        return Ok(line_window(r));
    }
    let mut g = Graph::new();
    g.name = Some(format!("grid-{}[{}]", d, r));
    let coords: Vec<Vec<i64>> = {
        let axis: Vec<i64> = (-r..=r).collect();
        let mut cs: Vec<Vec<i64>> = axis.iter().map(|&x| vec![x]).collect();
        for _ in 1..d {
            cs = cs
                .into_iter()
                .flat_map(|c| {
                    axis.iter().map(move |&x| {
                        let mut c2 = c.clone();
                        c2.push(x);
                        c2
                    })
                })
                .collect();
        }
        cs
    };
    let lab = |c: &[i64]| c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    for c in &coords {
        g.add_vertex(&lab(c));
    }
    for c in &coords {
        for axis in 0..d {
            if c[axis] < r {
                let mut c2 = c.clone();
                c2[axis] += 1;
                g.add_edge(&lab(c), &lab(&c2))?;
            }
        }
    }
    let rim: VertexSet = coords
        .iter()
        .filter(|c| c.iter().any(|&x| x.abs() == r))
        .map(|c| g.vertex(&lab(c)).unwrap())
        .collect();
    g.window = Some(WindowDescriptor {
        family: format!("grid-{}", d),
        params: vec![r],
        rim,
        metrically_faithful: true,
    });
    Ok(g)
}

/// Ball of radius `r` in the `d`-regular tree, rooted at label `e`.
///
/// Vertex labels are the root `e` and edge-letter words like `a0.a1.a2`
/// (letters `a0..a{d-1}`; the first letter is free, later letters never
/// backtrack). The rim is the sphere of radius `r`.
pub fn tree_window(d: usize, r: u32) -> Result<Graph> {
    if d < 2 {
        return Err(Error::Invalid("tree degree must be ≥ 2".into()));
    }
    let mut g = Graph::new();
    g.name = Some(format!("tree-{}[{}]", d, r));
    g.add_vertex("e");
    let mut frontier: Vec<(String, Option<usize>)> = vec![("e".to_string(), None)];
    for _depth in 0..r {
        let mut next = Vec::new();
        for (label, came_from) in frontier {
            for letter in 0..d {
                // In a d-regular tree each non-root vertex has d-1 children;
                // skip the letter pointing back to the parent.
                if Some(letter) == came_from {
                    continue;
                }
                let child = if label == "e" {
                    format!("a{}", letter)
                } else {
                    format!("{}.a{}", label, letter)
                };
                g.add_edge(&label, &child)?;
                // Walking back down the same letter would backtrack, so the
                // child's "parent letter" is the mirror letter: we reuse the
                // same letter index to mark the parent direction.
                next.push((child, Some(letter)));
            }
        }
        frontier = next;
    }
    let dist = g.distances_from(0);
    let rim: VertexSet = g
        .vertices()
        .filter(|&v| dist[v] == Some(r))
        .collect();
    g.window = Some(WindowDescriptor {
        family: format!("tree-{}", d),
        params: vec![r as i64],
        rim,
        metrically_faithful: true,
    });
    Ok(g)
}

// ---------------------------------------------------------------------------
// Isomorphism
// ---------------------------------------------------------------------------

/// Outcome of an exact isomorphism test.
#[derive(Debug, Clone)]
pub enum IsoVerdict {
    /// Checked adjacency-preserving bijection, as indices of `g1 -> g2`.
    Isomorphic(Vec<usize>),
    /// A refutation: an invariant that differs, stated for humans.
    NotIsomorphic(String),
}

impl IsoVerdict {
    pub fn is_iso(&self) -> bool {
        matches!(self, IsoVerdict::Isomorphic(_))
    }
}

/// Exact isomorphism by degree-refined partition plus backtracking.
/// Candidate order is deterministic (lexicographic within refinement class).
pub fn isomorphic(g1: &Graph, g2: &Graph, cap: usize) -> Result<IsoVerdict> {
    let n = g1.vertex_count();
    if n > cap || g2.vertex_count() > cap {
        return Err(Error::CapExceeded(format!(
            "isomorphism cap {} exceeded ({} / {} vertices)",
            cap,
            n,
            g2.vertex_count()
        )));
    }
    if n != g2.vertex_count() {
        return Ok(IsoVerdict::NotIsomorphic("vertex counts differ".into()));
    }
    if g1.edge_count() != g2.edge_count() {
        return Ok(IsoVerdict::NotIsomorphic("edge counts differ".into()));
    }
    let (colours1, colours2) = refine_colours_pair(g1, g2);
    let mut sig1: Vec<u64> = colours1.clone();
    let mut sig2: Vec<u64> = colours2.clone();
    sig1.sort_unstable();
    sig2.sort_unstable();
    if sig1 != sig2 {
        return Ok(IsoVerdict::NotIsomorphic(
            "degree-refinement signatures differ".into(),
        ));
    }
    // Backtracking: map vertices of g1 in order of rarest refinement class.
    let mut order: Vec<usize> = (0..n).collect();
    let mut class_size: HashMap<u64, usize> = HashMap::new();
    for &c in &colours1 {
        *class_size.entry(c).or_insert(0) += 1;
    }
    order.sort_by_key(|&v| (class_size[&colours1[v]], colours1[v], v));
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    if backtrack(g1, g2, &colours1, &colours2, &order, 0, &mut map, &mut used) {
        // Double-check the witness.
        for (i, j) in g1.edges() {
            debug_assert!(g2.is_adjacent(map[i], map[j]));
            if !g2.is_adjacent(map[i], map[j]) {
                return Err(Error::Invalid("internal: witness check failed".into()));
            }
        }
        Ok(IsoVerdict::Isomorphic(map))
    } else {
        Ok(IsoVerdict::NotIsomorphic(
            "exhaustive backtracking found no bijection".into(),
        ))
    }
}

/// Iterated neighbour-colour refinement (1-dimensional Weisfeiler-Leman),
/// run jointly over both graphs so that class ids are comparable.
fn refine_colours_pair(g1: &Graph, g2: &Graph) -> (Vec<u64>, Vec<u64>) {
    let n1 = g1.vertex_count();
    let n2 = g2.vertex_count();
    let mut c1: Vec<u64> = (0..n1).map(|v| g1.degree(v) as u64).collect();
    let mut c2: Vec<u64> = (0..n2).map(|v| g2.degree(v) as u64).collect();
    for _round in 0..(n1 + n2) {
        let sig = |g: &Graph, colours: &[u64], v: usize| {
            let mut ns: Vec<u64> = g.neighbors(v).iter().map(|&w| colours[w]).collect();
            ns.sort_unstable();
            (colours[v], ns)
        };
        let sigs1: Vec<_> = (0..n1).map(|v| sig(g1, &c1, v)).collect();
        let sigs2: Vec<_> = (0..n2).map(|v| sig(g2, &c2, v)).collect();
        // A canonical palette: rank of the signature in sorted order.
        let mut palette: BTreeMap<&(u64, Vec<u64>), u64> = BTreeMap::new();
        for s in sigs1.iter().chain(sigs2.iter()) {
            palette.insert(s, 0);
        }
        for (rank, (_, id)) in palette.iter_mut().enumerate() {
            *id = rank as u64;
        }
        let new1: Vec<u64> = sigs1.iter().map(|s| palette[s]).collect();
        let new2: Vec<u64> = sigs2.iter().map(|s| palette[s]).collect();
        if new1 == c1 && new2 == c2 {
            break;
        }
        c1 = new1;
        c2 = new2;
    }
    (c1, c2)
}

#[allow(clippy::too_many_arguments)]
fn backtrack(
    g1: &Graph,
    g2: &Graph,
    colours1: &[u64],
    colours2: &[u64],
    order: &[usize],
    depth: usize,
    map: &mut Vec<usize>,
    used: &mut Vec<bool>,
) -> bool {
    if depth == order.len() {
        return true;
    }
    let v = order[depth];
    for w in 0..g2.vertex_count() {
        if used[w] || colours2[w] != colours1[v] {
            continue;
        }
        // Consistency with already-mapped neighbours (and non-neighbours of
        // matching degree handled by edge-count equality at the end).
        let ok = order[..depth].iter().all(|&u| {
            let mapped = map[u];
            g1.is_adjacent(v, u) == g2.is_adjacent(w, mapped)
        });
        if !ok {
            continue;
        }
        map[v] = w;
        used[w] = true;
        if backtrack(g1, g2, colours1, colours2, order, depth + 1, map, used) {
            return true;
        }
        used[w] = false;
        map[v] = usize::MAX;
    }
    false
}
