//! Coarse homotopy of paths at a scale E, coarse triviality of loops,
//! nerve projections of coverings, E-persistent intersections, and the
//! lamplighter inside/outside covering.
//!
//! The elementary move is subpath replacement: a subpath ζ may be replaced
//! by a path ξ with the same endpoints provided `diam(ζ ∪ ξ) ≤ E`. The
//! equivalence implemented is the closure of this move (the operational form
//! all the structural arguments use); whether the coarser whole-path
//! symmetric-difference relation is strictly larger at equal scale is left
//! open, so verdicts speak only about the replacement closure.
//!
//! Searches over path space are capped (maximum path length in vertices,
//! maximum visited states) and three-valued: "no" is returned only when the
//! reachable set under the length cap is provably closed.

use crate::graph::{Graph, VertexSet};
use crate::wreath::{ts_solve, Colouring, LampVertex, MaterializedWindow, WreathSpace, HELD_KARP_CAP};
use crate::{Error, Result};
use std::collections::{BTreeMap, HashMap, VecDeque};

// ---------------------------------------------------------------------------
// Paths and moves
// ---------------------------------------------------------------------------

/// A combinatorial path: a nonempty vertex sequence with consecutive
/// entries adjacent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathSeq {
    verts: Vec<usize>,
}

impl PathSeq {
    pub fn new(g: &Graph, verts: Vec<usize>) -> Result<Self> {
        if verts.is_empty() {
            return Err(Error::Invalid("empty path".into()));
        }
        for &v in &verts {
            if v >= g.vertex_count() {
                return Err(Error::UnknownVertex(format!("path vertex {}", v)));
            }
        }
        for w in verts.windows(2) {
            if !g.is_adjacent(w[0], w[1]) {
                return Err(Error::Invalid(format!(
                    "path steps from {} to {}, which are not adjacent",
                    g.label(w[0]),
                    g.label(w[1])
                )));
            }
        }
        Ok(PathSeq { verts })
    }

    pub fn from_labels(g: &Graph, labels: &[&str]) -> Result<Self> {
        let verts = labels
            .iter()
            .map(|l| g.vertex(l))
            .collect::<Result<Vec<_>>>()?;
        PathSeq::new(g, verts)
    }

    pub fn verts(&self) -> &[usize] {
        &self.verts
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn start(&self) -> usize {
        self.verts[0]
    }

    pub fn end(&self) -> usize {
        *self.verts.last().unwrap()
    }

    pub fn is_loop(&self) -> bool {
        self.start() == self.end()
    }
}

/// One elementary move: replace the subpath at positions `i..=j` by
/// `replacement` (which shares its endpoints).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move {
    pub i: usize,
    pub j: usize,
    pub replacement: Vec<usize>,
}

/// Applies one elementary move, checking the endpoint and diameter
/// conditions. The diameter condition is `diam(ζ ∪ ξ) ≤ E` in `g`.
pub fn elementary_move(
    g: &Graph,
    p: &PathSeq,
    i: usize,
    j: usize,
    replacement: &[usize],
    e: u32,
) -> Result<PathSeq> {
    if i > j || j >= p.len() {
        return Err(Error::Invalid(format!("bad subpath range {}..={}", i, j)));
    }
    let zeta = &p.verts()[i..=j];
    if replacement.first() != zeta.first() || replacement.last() != zeta.last() {
        return Err(Error::Invalid(
            "replacement does not share the subpath's endpoints".into(),
        ));
    }
    let mut union: Vec<usize> = zeta.iter().chain(replacement.iter()).copied().collect();
    union.sort_unstable();
    union.dedup();
    for &a in &union {
        let dist = g.distances_from(a);
        for &b in &union {
            match dist[b] {
                Some(d) if d <= e => {}
                _ => {
                    return Err(Error::Invalid(format!(
                        "diameter bound {} violated by the pair ({}, {})",
                        e,
                        g.label(a),
                        g.label(b)
                    )));
                }
            }
        }
    }
    let mut verts = Vec::with_capacity(p.len() - (j - i + 1) + replacement.len());
    verts.extend_from_slice(&p.verts()[..i]);
    verts.extend_from_slice(replacement);
    verts.extend_from_slice(&p.verts()[j + 1..]);
    PathSeq::new(g, verts)
}

/// Replays a move script, validating every step at scale `e`.
pub fn replay(g: &Graph, p: &PathSeq, script: &[Move], e: u32) -> Result<PathSeq> {
    let mut cur = p.clone();
    for m in script {
        cur = elementary_move(g, &cur, m.i, m.j, &m.replacement, e)?;
    }
    Ok(cur)
}

/// Serializes a move script for audit/replay: one `i j v1,v2,...` line per
/// move, with vertex labels.
pub fn script_to_text(g: &Graph, script: &[Move]) -> String {
    script
        .iter()
        .map(|m| {
            let repl: Vec<&str> = m.replacement.iter().map(|&v| g.label(v)).collect();
            format!("{} {} {}", m.i, m.j, repl.join(","))
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Parses the format written by [`script_to_text`].
pub fn script_from_text(g: &Graph, text: &str) -> Result<Vec<Move>> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.splitn(3, ' ');
        let bad = || Error::Invalid(format!("bad move line {:?}", line));
        let i: usize = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let j: usize = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let repl = it
            .next()
            .ok_or_else(bad)?
            .split(',')
            .map(|l| g.vertex(l.trim()))
            .collect::<Result<Vec<_>>>()?;
        out.push(Move {
            i,
            j,
            replacement: repl,
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Move-graph search
// ---------------------------------------------------------------------------

/// Verdict of a capped search over the move graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HomotopyVerdict {
    /// Equivalent, with a replayable move script.
    Yes(Vec<Move>),
    /// Provably not equivalent within the length cap: the reachable set
    /// closed without meeting the target.
    No,
    /// Caps exhausted before the search closed.
    Unknown,
}

struct State {
    path: Vec<usize>,
    parent: Option<(usize, Move)>,
}

enum ClosureOutcome {
    Found(usize),
    Closed,
    Truncated,
}

/// BFS over the move graph from `start`; calls `hit` on every discovered
/// path and stops early when it returns true.
fn move_closure(
    g: &Graph,
    dist: &[Vec<Option<u32>>],
    start: &PathSeq,
    e: u32,
    max_len: usize,
    max_states: usize,
    mut hit: impl FnMut(&[usize]) -> bool,
) -> (Vec<State>, ClosureOutcome) {
    let mut states: Vec<State> = vec![State {
        path: start.verts().to_vec(),
        parent: None,
    }];
    if hit(start.verts()) {
        return (states, ClosureOutcome::Found(0));
    }
    let mut seen: HashMap<Vec<usize>, ()> = HashMap::new();
    seen.insert(start.verts().to_vec(), ());
    let mut queue: VecDeque<usize> = VecDeque::from([0]);
    while let Some(idx) = queue.pop_front() {
        let path = states[idx].path.clone();
        let mut found = None;
        enumerate_moves(g, dist, &path, e, max_len, &mut |mv, new_path| {
            if found.is_some() || seen.contains_key(&new_path) {
                return true;
            }
            let ok_budget = states.len() < max_states;
            if !ok_budget {
                return false; // signal truncation
            }
            seen.insert(new_path.clone(), ());
            let sid = states.len();
            let is_hit = hit(&new_path);
            states.push(State {
                path: new_path,
                parent: Some((idx, mv)),
            });
            if is_hit {
                found = Some(sid);
                return true;
            }
            queue.push_back(sid);
            true
        });
        if let Some(sid) = found {
            return (states, ClosureOutcome::Found(sid));
        }
        if states.len() >= max_states {
            return (states, ClosureOutcome::Truncated);
        }
    }
    (states, ClosureOutcome::Closed)
}

/// Enumerates every elementary move applicable to `path` at scale `e` whose
/// result stays within `max_len` vertices. `sink` returns false to abort
/// (budget exhausted).
fn enumerate_moves(
    g: &Graph,
    dist: &[Vec<Option<u32>>],
    path: &[usize],
    e: u32,
    max_len: usize,
    sink: &mut impl FnMut(Move, Vec<usize>) -> bool,
) {
    let within = |a: usize, b: usize| matches!(dist[a][b], Some(d) if d <= e);
    let len = path.len();
    for i in 0..len {
        'subpath: for j in i..len {
            let zeta = &path[i..=j];
            for &a in zeta {
                if !within(a, *zeta.last().unwrap()) {
                    continue 'subpath;
                }
                for &b in zeta {
                    if !within(a, b) {
                        continue 'subpath;
                    }
                }
            }
            // Budget for the replacement (in vertices).
            let rest = len - (j - i + 1);
            if max_len <= rest {
                continue;
            }
            let budget = max_len - rest;
            let mut cur = vec![path[i]];
            if !walks_dfs(g, dist, e, zeta, path[j], budget, &mut cur, &mut |xi| {
                if xi == zeta {
                    return true; // skip the no-op
                }
                let mut new_path = Vec::with_capacity(rest + xi.len());
                new_path.extend_from_slice(&path[..i]);
                new_path.extend_from_slice(xi);
                new_path.extend_from_slice(&path[j + 1..]);
                sink(
                    Move {
                        i,
                        j,
                        replacement: xi.to_vec(),
                    },
                    new_path,
                )
            }) {
                return;
            }
        }
    }
}

/// DFS over candidate replacement walks: every vertex must be within `e` of
/// all of ζ and of all earlier walk vertices. Returns false on abort.
fn walks_dfs(
    g: &Graph,
    dist: &[Vec<Option<u32>>],
    e: u32,
    zeta: &[usize],
    to: usize,
    budget: usize,
    cur: &mut Vec<usize>,
    emit: &mut impl FnMut(&[usize]) -> bool,
) -> bool {
    let within = |a: usize, b: usize| matches!(dist[a][b], Some(d) if d <= e);
    if *cur.last().unwrap() == to && !emit(cur) {
        return false;
    }
    if cur.len() >= budget {
        return true;
    }
    let last = *cur.last().unwrap();
    for &w in g.neighbors(last) {
        if zeta.iter().any(|&z| !within(w, z)) || cur.iter().any(|&x| !within(w, x)) {
            continue;
        }
        cur.push(w);
        let ok = walks_dfs(g, dist, e, zeta, to, budget, cur, emit);
        cur.pop();
        if !ok {
            return false;
        }
    }
    true
}

fn script_of(states: &[State], mut idx: usize) -> Vec<Move> {
    let mut script = Vec::new();
    while let Some((parent, mv)) = &states[idx].parent {
        script.push(mv.clone());
        idx = *parent;
    }
    script.reverse();
    script
}

fn all_pairs(g: &Graph) -> Vec<Vec<Option<u32>>> {
    g.vertices().map(|v| g.distances_from(v)).collect()
}

/// Are `p1` and `p2` E-coarsely homotopic (through elementary moves)?
pub fn coarse_homotopic(
    g: &Graph,
    p1: &PathSeq,
    p2: &PathSeq,
    e: u32,
    max_len: usize,
    max_states: usize,
) -> Result<HomotopyVerdict> {
    if p1.start() != p2.start() || p1.end() != p2.end() {
        return Err(Error::Invalid("paths do not share endpoints".into()));
    }
    let dist = all_pairs(g);
    let target = p2.verts();
    let (states, outcome) =
        move_closure(g, &dist, p1, e, max_len, max_states, |path| path == target);
    Ok(match outcome {
        ClosureOutcome::Found(idx) => HomotopyVerdict::Yes(script_of(&states, idx)),
        ClosureOutcome::Closed => HomotopyVerdict::No,
        ClosureOutcome::Truncated => HomotopyVerdict::Unknown,
    })
}

/// Is the loop E-coarsely trivial, i.e. equivalent to the constant path at
/// its basepoint?
pub fn is_coarsely_trivial(
    g: &Graph,
    lp: &PathSeq,
    e: u32,
    max_len: usize,
    max_states: usize,
) -> Result<HomotopyVerdict> {
    if !lp.is_loop() {
        return Err(Error::Invalid("path is not a loop".into()));
    }
    let constant = PathSeq::new(g, vec![lp.start()])?;
    coarse_homotopic(g, lp, &constant, e, max_len, max_states)
}

// ---------------------------------------------------------------------------
// Coverings and nerve projections
// ---------------------------------------------------------------------------

/// One part of a covering: a named vertex set of the ambient graph.
#[derive(Debug, Clone)]
pub struct CoveringPart {
    pub name: String,
    pub members: VertexSet,
}

/// A covering of (part of) a graph at a scale: every vertex set of diameter
/// ≤ scale should lie inside a single part, and the nerve must be a graph
/// (no triple intersections, no nerve triangles).
#[derive(Debug, Clone)]
pub struct Covering {
    pub scale: u32,
    pub parts: Vec<CoveringPart>,
}

impl Covering {
    pub fn parts_containing(&self, v: usize) -> Vec<usize> {
        self.parts
            .iter()
            .enumerate()
            .filter(|(_, p)| p.members.contains(&v))
            .map(|(i, _)| i)
            .collect()
    }

    /// Does some single part contain the whole set?
    pub fn covers_set(&self, set: &VertexSet) -> bool {
        self.parts.iter().any(|p| set.is_subset(&p.members))
    }

    /// The nerve as a graph: parts are vertices, intersecting parts are
    /// adjacent.
    pub fn nerve(&self) -> Result<Graph> {
        let mut g = Graph::new();
        g.name = Some("nerve".into());
        for p in &self.parts {
            g.add_vertex(&p.name);
        }
        for i in 0..self.parts.len() {
            for j in i + 1..self.parts.len() {
                if !self.parts[i].members.is_disjoint(&self.parts[j].members) {
                    g.add_edge_idx(i, j)?;
                }
            }
        }
        Ok(g)
    }

    /// Checks the graph-nerve requirement: no vertex lies in three parts and
    /// the nerve has no triangle.
    pub fn validate_graph_nerve(&self) -> Result<()> {
        let mut membership: BTreeMap<usize, usize> = BTreeMap::new();
        for p in &self.parts {
            for &v in &p.members {
                let c = membership.entry(v).or_insert(0);
                *c += 1;
                if *c > 2 {
                    return Err(Error::Invalid(format!(
                        "vertex {} lies in three covering parts; nerve is not a graph",
                        v
                    )));
                }
            }
        }
        let nerve = self.nerve()?;
        for a in nerve.vertices() {
            for &b in nerve.neighbors(a) {
                for &c in nerve.neighbors(b) {
                    if c != a && nerve.is_adjacent(a, c) {
                        return Err(Error::Invalid(format!(
                            "nerve triangle {} - {} - {}",
                            nerve.label(a),
                            nerve.label(b),
                            nerve.label(c)
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Nerve projection of a path: the greedy maximal-segment decomposition
/// (raw) and its backtrack reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NerveProjection {
    /// Part indices, one per maximal segment.
    pub raw: Vec<usize>,
    /// After iterated backtrack removal.
    pub reduced: Vec<usize>,
}

/// Projects a path onto the nerve of a covering. Greedy: each segment is
/// the longest prefix of the remaining path contained in a single part,
/// which must be unique; consecutive parts must intersect. Backtracks
/// (`C, D, C`) are then removed until stable.
pub fn nerve_projection(cov: &Covering, p: &PathSeq) -> Result<NerveProjection> {
    let verts = p.verts();
    let mut raw: Vec<usize> = Vec::new();
    let mut s = 0;
    while s < verts.len() {
        // Candidates: parts containing verts[s].
        let mut candidates = cov.parts_containing(verts[s]);
        if candidates.is_empty() {
            return Err(Error::Invalid(format!(
                "vertex at position {} lies in no covering part",
                s
            )));
        }
        let mut k = s;
        while k + 1 < verts.len() {
            let next: Vec<usize> = candidates
                .iter()
                .copied()
                .filter(|&pi| cov.parts[pi].members.contains(&verts[k + 1]))
                .collect();
            if next.is_empty() {
                break;
            }
            candidates = next;
            k += 1;
        }
        if candidates.len() != 1 {
            return Err(Error::Invalid(format!(
                "unique-extension violated at the edge between positions {} and {}: \
                 {} parts contain the maximal segment",
                k,
                k + 1,
                candidates.len()
            )));
        }
        raw.push(candidates[0]);
        s = k + 1;
    }
    for w in raw.windows(2) {
        if cov.parts[w[0]]
            .members
            .is_disjoint(&cov.parts[w[1]].members)
        {
            return Err(Error::Invalid(format!(
                "consecutive projected parts {} and {} do not intersect",
                cov.parts[w[0]].name, cov.parts[w[1]].name
            )));
        }
    }
    // Backtrack reduction.
    let mut reduced = raw.clone();
    loop {
        let mut changed = false;
        let mut i = 1;
        while i + 1 < reduced.len() {
            if reduced[i - 1] == reduced[i + 1] {
                reduced.drain(i..=i + 1);
                changed = true;
            } else {
                i += 1;
            }
        }
        let before = reduced.len();
        reduced.dedup();
        changed |= reduced.len() != before;
        if !changed {
            break;
        }
    }
    Ok(NerveProjection { raw, reduced })
}

// ---------------------------------------------------------------------------
// Lamplighter inside/outside covering
// ---------------------------------------------------------------------------

/// The I/O covering of a materialized lamplighter window around a base
/// vertex `p` at scale `A1`:
///
/// * `I(d)`: arrow in `B(p, 3·A1)`, colouring equal to `d` outside
///   `B(p, 3·A1)`;
/// * `O(d)`: arrow outside `B(p, 2·A1)`, colouring equal to `d` on
///   `B(p, A1)`.
///
/// Distinct I-parts are disjoint, distinct O-parts are disjoint, so the
/// nerve is bipartite; every vertex set of diameter ≤ A1 lies in a single
/// part.
pub fn lamp_io_covering(
    w: &WreathSpace,
    window: &MaterializedWindow,
    p: usize,
    a1: u32,
) -> Result<Covering> {
    if p >= w.base.vertex_count() {
        return Err(Error::UnknownVertex(format!("base vertex {}", p)));
    }
    if a1 == 0 {
        return Err(Error::Invalid("scale A1 must be ≥ 1".into()));
    }
    if let Some(d) = &w.base.window {
        if !d.rim.is_empty() {
            let rd = w.base.distances_from_set(&d.rim)[p].ok_or(Error::Disconnected)?;
            if rd <= 3 * a1 {
                return Err(Error::Window(format!(
                    "base window too small around the centre: rim distance {} ≤ 3·A1 = {}",
                    rd,
                    3 * a1
                )));
            }
        }
    }
    let db = w.base.distances_from(p);
    let dist_p = |q: usize| db[q].ok_or(Error::Disconnected);
    let mut i_parts: BTreeMap<Colouring, VertexSet> = BTreeMap::new();
    let mut o_parts: BTreeMap<Colouring, VertexSet> = BTreeMap::new();
    for (idx, v) in window.verts.iter().enumerate() {
        let dq = dist_p(v.arrow)?;
        if dq <= 3 * a1 {
            let mut outer = Colouring::empty();
            for (q, c) in v.colouring.entries() {
                if dist_p(q)? > 3 * a1 {
                    outer.set(q, c, w.o);
                }
            }
            i_parts.entry(outer).or_default().insert(idx);
        }
        if dq > 2 * a1 {
            let mut inner = Colouring::empty();
            for (q, c) in v.colouring.entries() {
                if dist_p(q)? <= a1 {
                    inner.set(q, c, w.o);
                }
            }
            o_parts.entry(inner).or_default().insert(idx);
        }
    }
    let describe = |c: &Colouring| {
        let entries: Vec<String> = c
            .entries()
            .map(|(q, col)| format!("{}:{}", w.base.label(q), w.lamp.label(col)))
            .collect();
        format!("{{{}}}", entries.join(","))
    };
    let mut parts = Vec::new();
    for (key, members) in i_parts {
        parts.push(CoveringPart {
            name: format!("I{}", describe(&key)),
            members,
        });
    }
    for (key, members) in o_parts {
        parts.push(CoveringPart {
            name: format!("O{}", describe(&key)),
            members,
        });
    }
    Ok(Covering { scale: a1, parts })
}

// ---------------------------------------------------------------------------
// Persistence certificates
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PersistVerdict {
    /// Every path E-equivalent to the input meets the target (certified
    /// via the covering's nerve, or trivially via a shared endpoint).
    Certified,
    /// An equivalent path avoiding the target was found.
    Refuted,
    /// Caps exhausted without a decision.
    Unknown,
}

#[derive(Debug, Clone)]
pub struct PersistenceCertificate {
    pub verdict: PersistVerdict,
    pub scale: u32,
    /// Reduced nerve path (part names) when certified through a covering.
    pub nerve_path: Option<Vec<String>>,
    /// Avoiding path plus its replayable move script when refuted.
    pub witness: Option<(Vec<usize>, Vec<Move>)>,
    pub notes: Vec<String>,
}

/// Does every path E-coarsely equivalent to `p` intersect `target`?
///
/// With a covering whose hypotheses verify, a reduced-nerve-path node
/// contained in the target certifies persistence (the node is met by every
/// equivalent path); otherwise a capped search looks for a refuting path.
/// Certification without a covering happens only in the trivial endpoint
/// case.
pub fn persistent_intersection(
    g: &Graph,
    p: &PathSeq,
    target: &VertexSet,
    e: u32,
    max_len: usize,
    max_states: usize,
    cov: Option<&Covering>,
) -> Result<PersistenceCertificate> {
    let mut notes = Vec::new();
    let meets = |path: &[usize]| path.iter().any(|v| target.contains(v));
    if !meets(p.verts()) {
        return Ok(PersistenceCertificate {
            verdict: PersistVerdict::Refuted,
            scale: e,
            nerve_path: None,
            witness: Some((p.verts().to_vec(), Vec::new())),
            notes: vec!["input path itself misses the target".into()],
        });
    }
    if target.contains(&p.start()) || target.contains(&p.end()) {
        return Ok(PersistenceCertificate {
            verdict: PersistVerdict::Certified,
            scale: e,
            nerve_path: None,
            witness: None,
            notes: vec!["an endpoint lies in the target; all equivalent paths share it".into()],
        });
    }
    if let Some(cov) = cov {
        let mut ok = true;
        if cov.scale < e {
            notes.push(format!(
                "covering scale {} below move scale {}; downgraded to search",
                cov.scale, e
            ));
            ok = false;
        }
        if ok {
            if let Err(err) = cov.validate_graph_nerve() {
                notes.push(format!("covering hypotheses failed: {}; downgraded to search", err));
                ok = false;
            }
        }
        if ok {
            match nerve_projection(cov, p) {
                Ok(proj) => {
                    // Sound direction: a reduced-nerve node is met by every
                    // equivalent path, so the part must lie inside the target
                    // for the intersection to follow.
                    let hit = proj
                        .reduced
                        .iter()
                        .find(|&&pi| cov.parts[pi].members.is_subset(target));
                    if let Some(&pi) = hit {
                        notes.push(format!(
                            "target contains the reduced nerve node {}",
                            cov.parts[pi].name
                        ));
                        return Ok(PersistenceCertificate {
                            verdict: PersistVerdict::Certified,
                            scale: e,
                            nerve_path: Some(
                                proj.reduced
                                    .iter()
                                    .map(|&pi| cov.parts[pi].name.clone())
                                    .collect(),
                            ),
                            witness: None,
                            notes,
                        });
                    }
                    notes.push("no reduced nerve node lies inside the target".into());
                }
                Err(err) => {
                    notes.push(format!("nerve projection failed: {}; downgraded to search", err));
                }
            }
        }
    }
    // Search for a refutation.
    let dist = all_pairs(g);
    let (states, outcome) = move_closure(g, &dist, p, e, max_len, max_states, |path| !meets(path));
    Ok(match outcome {
        ClosureOutcome::Found(idx) => PersistenceCertificate {
            verdict: PersistVerdict::Refuted,
            scale: e,
            nerve_path: None,
            witness: Some((states[idx].path.clone(), script_of(&states, idx))),
            notes,
        },
        ClosureOutcome::Closed => {
            notes.push(
                "move closure under the length cap finds no avoiding path, but longer \
                 paths are out of scope"
                    .into(),
            );
            PersistenceCertificate {
                verdict: PersistVerdict::Unknown,
                scale: e,
                nerve_path: None,
                witness: None,
                notes,
            }
        }
        ClosureOutcome::Truncated => PersistenceCertificate {
            verdict: PersistVerdict::Unknown,
            scale: e,
            nerve_path: None,
            witness: None,
            notes,
        },
    })
}

// ---------------------------------------------------------------------------
// Stringiness witnesses
// ---------------------------------------------------------------------------

/// A witness that two lamplighter vertices are separated by a far-away
/// colour difference, so the I/O covering around it yields a persistent
/// bounded obstruction.
#[derive(Debug, Clone)]
pub struct StringyWitness {
    /// Base vertex where the colourings differ, far from both arrows.
    pub p: usize,
    pub d_u: u32,
    pub d_v: u32,
    /// Required separation `2·A1 + A2`.
    pub d_bound: u32,
    /// Diameter bound `(1 + 4·A1)·deg(X)^(2·A1)` for the I-part.
    pub f_bound: u64,
    /// Leaf-proximity constant `(1 + 2D)·deg(X)^D` for `D = 2·A1 + A2`.
    pub k_bound: u64,
    /// Outer colouring of the I-part matching `u` (its restriction away
    /// from `B(p, 3·A1)`).
    pub outer: Colouring,
}

/// Distance from a vertex to the leaf of colouring `c` (all arrow
/// positions): colour costs plus a free-endpoint TS walk.
fn leaf_distance_from(w: &WreathSpace, v: &LampVertex, c: &Colouring) -> Result<u32> {
    let delta = v.colouring.delta(c);
    let colour_cost: u32 = delta
        .iter()
        .map(|&q| w.lamp_metric(w.colour_at(&v.colouring, q), w.colour_at(c, q)))
        .sum();
    let (walk, _) = ts_solve(&w.base, v.arrow, &delta, None, HELD_KARP_CAP)?;
    Ok(walk + colour_cost)
}

/// Finds a colour difference far from both arrows. If none exists, the two
/// vertices provably lie near a common leaf (constructed explicitly and
/// verified), and that is reported as the error.
pub fn stringy_witness(
    w: &WreathSpace,
    u: &LampVertex,
    v: &LampVertex,
    a1: u32,
    a2: u32,
) -> Result<StringyWitness> {
    w.check_vertex(u)?;
    w.check_vertex(v)?;
    if a1 == 0 {
        return Err(Error::Invalid("scale A1 must be ≥ 1".into()));
    }
    let d_bound = 2 * a1 + a2;
    let deg = w.lamp.max_degree().max(w.base.max_degree()).max(2) as u64;
    let f_bound = (1 + 4 * a1 as u64).saturating_mul(deg.saturating_pow(2 * a1));
    let k_bound = (1 + 2 * d_bound as u64).saturating_mul(deg.saturating_pow(d_bound));
    let du = w.base.distances_from(u.arrow);
    let dv = w.base.distances_from(v.arrow);
    let delta = u.colouring.delta(&v.colouring);
    for &q in &delta {
        if let (Some(a), Some(b)) = (du[q], dv[q]) {
            if a >= d_bound && b >= d_bound {
                let d3 = w.base.distances_from(q);
                let mut outer = Colouring::empty();
                for (pos, col) in u.colouring.entries() {
                    if matches!(d3[pos], Some(d) if d > 3 * a1) || d3[pos].is_none() {
                        outer.set(pos, col, w.o);
                    }
                }
                return Ok(StringyWitness {
                    p: q,
                    d_u: a,
                    d_v: b,
                    d_bound,
                    f_bound,
                    k_bound,
                    outer,
                });
            }
        }
    }
    // No witness: build the common leaf the structural lemma guarantees.
    let mut c = u.colouring.clone();
    for &q in &delta {
        if matches!(du[q], Some(d) if d < d_bound) {
            c.set(q, w.colour_at(&v.colouring, q), w.o);
        }
    }
    let lu = leaf_distance_from(w, u, &c)?;
    let lv = leaf_distance_from(w, v, &c)?;
    Err(Error::Invalid(format!(
        "no witness: the vertices lie near a common leaf (distances {} and {}, \
         within the leaf-proximity bound {})",
        lu,
        lv,
        k_bound.min(u64::from(u32::MAX))
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cycle_graph, grid_window, line_window};

    #[test]
    fn elementary_move_examples() {
        let c8 = cycle_graph(8);
        // Backtrack removal at E = 1.
        let p = PathSeq::from_labels(&c8, &["0", "1", "0", "7"]).unwrap();
        let q = elementary_move(&c8, &p, 0, 2, &[c8.vertex("0").unwrap()], 1).unwrap();
        assert_eq!(q, PathSeq::from_labels(&c8, &["0", "7"]).unwrap());
        // Identity replacement.
        let arc = PathSeq::from_labels(&c8, &["0", "1", "2"]).unwrap();
        let same = elementary_move(
            &c8,
            &arc,
            0,
            2,
            &["0", "1", "2"].map(|l| c8.vertex(l).unwrap()),
            2,
        )
        .unwrap();
        assert_eq!(same, arc);
        // Complementary 6-arc rejected at E = 3 (diameter 4).
        let repl: Vec<usize> = ["0", "7", "6", "5", "4", "3", "2"]
            .iter()
            .map(|l| c8.vertex(l).unwrap())
            .collect();
        let err = elementary_move(&c8, &arc, 0, 2, &repl, 3).unwrap_err();
        assert!(err.to_string().contains("diameter bound 3"));
    }

    #[test]
    fn script_round_trip() {
        let c8 = cycle_graph(8);
        let script = vec![Move {
            i: 0,
            j: 2,
            replacement: vec![0],
        }];
        let text = script_to_text(&c8, &script);
        assert_eq!(script_from_text(&c8, &text).unwrap(), script);
    }

    #[test]
    fn homotopic_on_four_cycle() {
        let c4 = cycle_graph(4);
        let p1 = PathSeq::from_labels(&c4, &["0", "1", "2"]).unwrap();
        let p2 = PathSeq::from_labels(&c4, &["0", "3", "2"]).unwrap();
        // Equal paths: yes with empty script.
        match coarse_homotopic(&c4, &p1, &p1, 1, 8, 10_000).unwrap() {
            HomotopyVerdict::Yes(script) => assert!(script.is_empty()),
            other => panic!("expected yes, got {:?}", other),
        }
        // Opposite arcs at E = 2: yes; script replays, also at larger E.
        match coarse_homotopic(&c4, &p1, &p2, 2, 8, 100_000).unwrap() {
            HomotopyVerdict::Yes(script) => {
                assert_eq!(replay(&c4, &p1, &script, 2).unwrap(), p2);
                assert_eq!(replay(&c4, &p1, &script, 5).unwrap(), p2);
            }
            other => panic!("expected yes, got {:?}", other),
        }
    }

    #[test]
    fn not_homotopic_on_c8_at_scale_one() {
        let c8 = cycle_graph(8);
        let p1 = PathSeq::from_labels(&c8, &["0", "1"]).unwrap();
        let p2 = PathSeq::from_labels(&c8, &["0", "7", "6", "5", "4", "3", "2", "1"]).unwrap();
        assert_eq!(
            coarse_homotopic(&c8, &p1, &p2, 1, 9, 1_000_000).unwrap(),
            HomotopyVerdict::No
        );
    }

    #[test]
    fn triviality_examples() {
        let grid = grid_window(2, 2).unwrap();
        let sq = PathSeq::from_labels(&grid, &["0,0", "1,0", "1,1", "0,1", "0,0"]).unwrap();
        assert!(matches!(
            is_coarsely_trivial(&grid, &sq, 2, 6, 500_000).unwrap(),
            HomotopyVerdict::Yes(_)
        ));
        let c8 = cycle_graph(8);
        let constant = PathSeq::from_labels(&c8, &["3"]).unwrap();
        assert!(matches!(
            is_coarsely_trivial(&c8, &constant, 1, 4, 1000).unwrap(),
            HomotopyVerdict::Yes(_)
        ));
    }

    fn io_setup() -> (WreathSpace, MaterializedWindow, usize) {
        let w = WreathSpace::lamplighter(2, line_window(6)).unwrap();
        let p = w.base.vertex("0").unwrap();
        let supp: VertexSet = [p].into_iter().collect();
        let arrows: VertexSet = w.base.vertices().collect();
        let window = w.materialize(&supp, &arrows, 10_000).unwrap();
        (w, window, p)
    }

    #[test]
    fn io_covering_membership_and_nerve() {
        let (w, window, p) = io_setup();
        let cov = lamp_io_covering(&w, &window, p, 1).unwrap();
        cov.validate_graph_nerve().unwrap();
        // (∅, q) close to p is in an I part; far away in an O part.
        let near = window.vertex_of(&w.parse_vertex("{}@1").unwrap()).unwrap();
        let far = window.vertex_of(&w.parse_vertex("{}@5").unwrap()).unwrap();
        let near_parts = cov.parts_containing(near);
        assert!(near_parts
            .iter()
            .all(|&i| cov.parts[i].name.starts_with('I')));
        let far_parts = cov.parts_containing(far);
        assert!(far_parts.iter().all(|&i| cov.parts[i].name.starts_with('O')));
        // Every edge (diameter-1 set) is covered by a single part.
        for (a, b) in window.graph.edges() {
            let set: VertexSet = [a, b].into_iter().collect();
            assert!(cov.covers_set(&set), "uncovered edge {} - {}", a, b);
        }
    }

    #[test]
    fn nerve_projection_of_crossing_geodesic() {
        let (w, window, p) = io_setup();
        let cov = lamp_io_covering(&w, &window, p, 1).unwrap();
        let u = w.parse_vertex("{}@-5").unwrap();
        let v = w.parse_vertex("{0:1}@5").unwrap();
        let geo = w.lamp_geodesic(&u, &v, 20).unwrap();
        let verts: Vec<usize> = geo.iter().map(|x| window.vertex_of(x).unwrap()).collect();
        let path = PathSeq::new(&window.graph, verts).unwrap();
        let proj = nerve_projection(&cov, &path).unwrap();
        let names: Vec<&str> = proj
            .reduced
            .iter()
            .map(|&i| cov.parts[i].name.as_str())
            .collect();
        assert_eq!(names, vec!["O{}", "I{}", "O{0:1}"]);

        // Inserting a backtrack into a neighbouring part does not change the
        // reduced projection.
        let with_back = elementary_move(
            &window.graph,
            &path,
            0,
            0,
            &[path.verts()[0], path.verts()[1], path.verts()[0]],
            1,
        )
        .unwrap();
        let proj2 = nerve_projection(&cov, &with_back).unwrap();
        assert_eq!(proj.reduced, proj2.reduced);
    }

    #[test]
    fn persistence_certified_and_refuted() {
        // Certified through the nerve on the lamplighter window.
        let (w, window, p) = io_setup();
        let cov = lamp_io_covering(&w, &window, p, 1).unwrap();
        let u = w.parse_vertex("{}@-5").unwrap();
        let v = w.parse_vertex("{0:1}@5").unwrap();
        let geo = w.lamp_geodesic(&u, &v, 20).unwrap();
        let verts: Vec<usize> = geo.iter().map(|x| window.vertex_of(x).unwrap()).collect();
        let path = PathSeq::new(&window.graph, verts).unwrap();
        let target = cov
            .parts
            .iter()
            .find(|pt| pt.name == "I{}")
            .unwrap()
            .members
            .clone();
        let cert =
            persistent_intersection(&window.graph, &path, &target, 1, 14, 10_000, Some(&cov))
                .unwrap();
        assert_eq!(cert.verdict, PersistVerdict::Certified);
        assert_eq!(
            cert.nerve_path,
            Some(vec!["O{}".into(), "I{}".into(), "O{0:1}".into()])
        );

        // Refuted on a grid: a straight segment detours around one vertex.
        let grid = grid_window(2, 2).unwrap();
        let path = PathSeq::from_labels(&grid, &["0,0", "1,0", "2,0"]).unwrap();
        let target: VertexSet = [grid.vertex("1,0").unwrap()].into_iter().collect();
        let cert = persistent_intersection(&grid, &path, &target, 2, 8, 200_000, None).unwrap();
        assert_eq!(cert.verdict, PersistVerdict::Refuted);
        let (witness, script) = cert.witness.unwrap();
        assert!(witness.iter().all(|v| !target.contains(v)));
        let replayed = replay(&grid, &path, &script, 2).unwrap();
        assert_eq!(replayed.verts(), &witness[..]);

        // Trivial certification via endpoints.
        let constant = PathSeq::from_labels(&grid, &["1,1"]).unwrap();
        let target: VertexSet = [grid.vertex("1,1").unwrap()].into_iter().collect();
        let cert = persistent_intersection(&grid, &constant, &target, 2, 4, 100, None).unwrap();
        assert_eq!(cert.verdict, PersistVerdict::Certified);
    }

    #[test]
    fn stringy_witness_examples() {
        let w = WreathSpace::lamplighter(2, line_window(25)).unwrap();
        let u = w.parse_vertex("{}@0").unwrap();
        let v = w.parse_vertex("{10:1}@20").unwrap();
        let wit = stringy_witness(&w, &u, &v, 1, 3).unwrap();
        assert_eq!(w.base.label(wit.p), "10");
        assert_eq!((wit.d_u, wit.d_v, wit.d_bound), (10, 10, 5));
        assert_eq!(wit.f_bound, 20); // (1+4)·2²
        // Same colouring: near a common leaf, no witness.
        let v2 = w.parse_vertex("{}@20").unwrap();
        let err = stringy_witness(&w, &u, &v2, 1, 3).unwrap_err();
        assert!(err.to_string().contains("common leaf"));
    }

    #[test]
    fn io_part_diameter_bound() {
        // diam(I-part) ≤ F = 20 on L_2(line), A1 = 1.
        let (w, window, p) = io_setup();
        let cov = lamp_io_covering(&w, &window, p, 1).unwrap();
        let ipart = &cov.parts.iter().find(|pt| pt.name == "I{}").unwrap().members;
        let mut diam = 0;
        for &a in ipart {
            let va = &window.verts[a];
            for &b in ipart {
                diam = diam.max(w.lamp_distance(va, &window.verts[b], 20).unwrap());
            }
        }
        assert!(diam <= 20, "diameter {} exceeds the bound", diam);
    }
}
