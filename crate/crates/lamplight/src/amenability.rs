//! Følner certificates, quasi-isometry verification, quasi-κ-to-one checks,
//! toward-end maps on trees, and the two aptolic quasi-isometry
//! constructions (the fiber-split map over non-amenable bases and the
//! partition/σ assembly over amenable ones).

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, VertexSet};
use crate::leaves::AptolicMap;
use crate::wreath::{Colouring, LampVertex, WreathSpace, HELD_KARP_CAP};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Følner certificates
// ---------------------------------------------------------------------------

/// One measured Følner set: its size, its boundary (computed by graph
/// breadth, not by formula), and the isoperimetric ratio.
#[derive(Debug, Clone)]
pub struct FolnerEntry {
    pub label: String,
    /// The set itself, when it was materialized as explicit graph vertices.
    /// Empty for sets only counted through cardinality formulas.
    pub set: VertexSet,
    pub size: u64,
    pub boundary: u64,
    pub ratio: f64,
}

/// A sequence of measured Følner sets with a monotonicity report.
#[derive(Debug, Clone)]
pub struct FolnerCertificate {
    pub window: String,
    pub entries: Vec<FolnerEntry>,
    /// Whether the ratios are non-increasing in the given order.
    pub ratios_monotone: bool,
}

/// Assembles a certificate from measured entries, computing the
/// monotonicity report.
pub fn folner_certificate(window: &str, entries: Vec<FolnerEntry>) -> FolnerCertificate {
    let ratios_monotone = entries.windows(2).all(|w| w[1].ratio <= w[0].ratio);
    FolnerCertificate {
        window: window.to_string(),
        entries,
        ratios_monotone,
    }
}

/// Følner boxes `[1, n]^d` in the grid `E^d`: measures `|∂F_n|` by graph
/// boundary and checks it equals `2·d·n^(d-1)` exactly, so the ratios are
/// exactly `2d/n`.
pub fn folner_boxes(d: usize, n_values: &[i64]) -> Result<FolnerCertificate> {
    if n_values.is_empty() {
        return Err(Error::Invalid("need at least one box size".into()));
    }
    if n_values.iter().any(|&n| n < 1) {
        return Err(Error::Invalid("box sizes must be ≥ 1".into()));
    }
    let max_n = *n_values.iter().max().unwrap();
    // The box [1,n]^d and its boundary live in [0, n+1]^d, so a window of
    // radius n+1 suffices.
    let g = crate::graph::grid_window(d, max_n + 1)?;
    let coords: Vec<Vec<i64>> = g
        .vertices()
        .map(|v| {
            g.label(v)
                .split(',')
                .map(|s| s.parse().expect("grid labels are integers"))
                .collect()
        })
        .collect();
    let mut entries = Vec::new();
    for &n in n_values {
        let set: VertexSet = g
            .vertices()
            .filter(|&v| coords[v].iter().all(|&x| 1 <= x && x <= n))
            .collect();
        let size = (n as u64).pow(d as u32);
        debug_assert_eq!(set.len() as u64, size);
        let boundary = g.boundary(&set).len() as u64;
        let predicted = 2 * d as u64 * (n as u64).pow(d as u32 - 1);
        if boundary != predicted {
            return Err(Error::Invalid(format!(
                "box boundary mismatch: measured {} vs predicted {}",
                boundary, predicted
            )));
        }
        entries.push(FolnerEntry {
            label: format!("[1,{}]^{}", n, d),
            set,
            size,
            boundary,
            ratio: boundary as f64 / size as f64,
        });
    }
    Ok(folner_certificate(
        g.name.as_deref().unwrap_or("grid"),
        entries,
    ))
}

/// The wreath Følner set `F = A ≀ B`: colourings with support in `B`,
/// colours in `A` on `B`, arrow in `B`. Returns the exact counts
/// `|F| = |B|·|A|^|B|` and
/// `|∂F| = |B|·|∂A|·|A|^(|B|-1) + |∂B|·|A|^|B|`,
/// verified against the graph boundary on a materialized window whenever
/// that window fits under `cap`.
pub fn folner_wreath(
    w: &WreathSpace,
    a_n: &VertexSet,
    b_n: &VertexSet,
    cap: usize,
) -> Result<FolnerEntry> {
    if a_n.is_empty() || b_n.is_empty() {
        return Err(Error::Invalid("Følner sets must be non-empty".into()));
    }
    if !a_n.contains(&w.o) {
        return Err(Error::Invalid(
            "the colour set A must contain the default colour".into(),
        ));
    }
    for &a in a_n {
        if a >= w.lamp.vertex_count() {
            return Err(Error::UnknownVertex(format!("lamp vertex {}", a)));
        }
    }
    for &b in b_n {
        if b >= w.base.vertex_count() {
            return Err(Error::UnknownVertex(format!("base vertex {}", b)));
        }
    }
    // Window rule: the boundary must be measured fully inside the window,
    // so no member may sit on a window rim.
    if let Some(win) = &w.lamp.window {
        if a_n.iter().any(|a| win.rim.contains(a)) {
            return Err(Error::Window(
                "colour set A touches the lamp window rim".into(),
            ));
        }
    }
    if let Some(win) = &w.base.window {
        if b_n.iter().any(|b| win.rim.contains(b)) {
            return Err(Error::Window(
                "base set B touches the base window rim".into(),
            ));
        }
    }
    let da = w.lamp.boundary(a_n).len() as u128;
    let db = w.base.boundary(b_n).len() as u128;
    let a = a_n.len() as u128;
    let b = b_n.len() as u128;
    let a_pow = a
        .checked_pow(b as u32)
        .ok_or_else(|| Error::CapExceeded("|A|^|B| overflows".into()))?;
    let a_pow_less = a.pow(b as u32 - 1);
    let size = b * a_pow;
    let boundary = b * da * a_pow_less + db * a_pow;
    if size > u64::MAX as u128 || boundary > u64::MAX as u128 {
        return Err(Error::CapExceeded("wreath Følner set too large".into()));
    }

    // Independent verification by explicit boundary count, when feasible.
    let k = w.lamp.vertex_count() as u128;
    let arrows = w.base.thicken(b_n, 1);
    let window_size = (arrows.len() as u128)
        .checked_mul(k.checked_pow(b as u32).unwrap_or(u128::MAX))
        .unwrap_or(u128::MAX);
    let mut set = VertexSet::new();
    if window_size <= cap as u128 {
        let mat = w.materialize(b_n, &arrows, cap)?;
        for (i, v) in mat.verts.iter().enumerate() {
            let in_f = b_n.contains(&v.arrow)
                && b_n
                    .iter()
                    .all(|&q| a_n.contains(&w.colour_at(&v.colouring, q)));
            if in_f {
                set.insert(i);
            }
        }
        if set.len() as u128 != size {
            return Err(Error::Invalid(format!(
                "wreath Følner size mismatch: enumerated {} vs formula {}",
                set.len(),
                size
            )));
        }
        let measured = mat.graph.boundary(&set).len() as u128;
        if measured != boundary {
            return Err(Error::Invalid(format!(
                "wreath Følner boundary mismatch: measured {} vs formula {}",
                measured, boundary
            )));
        }
    }
    Ok(FolnerEntry {
        label: format!("A({})≀B({})", a_n.len(), b_n.len()),
        set,
        size: size as u64,
        boundary: boundary as u64,
        ratio: boundary as f64 / size as f64,
    })
}

/// Boundary report for a finite piece of a regular tree.
#[derive(Debug, Clone)]
pub struct TreeBoundaryReport {
    pub size: u64,
    pub boundary: u64,
    /// The linear isoperimetric bound `(d-2)·|V| + 2`.
    pub bound: u64,
    pub ok: bool,
}

/// Checks the linear isoperimetric inequality `|∂V(T)| ≥ (d-2)|V(T)| + 2`
/// for a connected induced piece of the `d`-regular tree.
pub fn tree_subtree_boundary(
    t: &Graph,
    subtree: &VertexSet,
    d: usize,
) -> Result<TreeBoundaryReport> {
    if subtree.is_empty() {
        return Err(Error::Invalid("subtree must be non-empty".into()));
    }
    for &v in subtree {
        if v >= t.vertex_count() {
            return Err(Error::UnknownVertex(format!("vertex {}", v)));
        }
        if t.degree(v) != d {
            return Err(Error::Window(format!(
                "vertex {} has degree {} in the window, not {}: \
                 the subtree must stay inside the window interior",
                v,
                t.degree(v),
                d
            )));
        }
    }
    if t.components_within(subtree).len() != 1 {
        return Err(Error::Invalid("the set is not a connected subtree".into()));
    }
    let size = subtree.len() as u64;
    let boundary = t.boundary(subtree).len() as u64;
    let bound = (d as u64 - 2) * size + 2;
    Ok(TreeBoundaryReport {
        size,
        boundary,
        bound,
        ok: boundary >= bound,
    })
}

/// Grows a pseudorandom connected induced subtree of up to `size` vertices
/// inside the window interior (every member keeps its full degree `d`).
pub fn random_subtree(t: &Graph, d: usize, size: usize, seed: u64) -> Result<VertexSet> {
    let interior: Vec<usize> = t.vertices().filter(|&v| t.degree(v) == d).collect();
    if interior.is_empty() {
        return Err(Error::Window("no interior vertices".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut set = VertexSet::new();
    set.insert(interior[rng.gen_range(0..interior.len())]);
    while set.len() < size {
        let frontier: Vec<usize> = t
            .boundary(&set)
            .into_iter()
            .filter(|&v| t.degree(v) == d)
            .collect();
        if frontier.is_empty() {
            break;
        }
        set.insert(frontier[rng.gen_range(0..frontier.len())]);
    }
    Ok(set)
}

// ---------------------------------------------------------------------------
// Quasi-isometries
// ---------------------------------------------------------------------------

/// A tabulated vertex map between two graphs with declared affine
/// quasi-isometry parameters `(A, B)`. Vertices outside `map` are outside
/// the domain.
#[derive(Debug, Clone)]
pub struct QIMap {
    pub map: BTreeMap<usize, usize>,
    pub params: (f64, f64),
}

impl QIMap {
    pub fn identity(g: &Graph) -> Self {
        QIMap {
            map: g.vertices().map(|v| (v, v)).collect(),
            params: (1.0, 0.0),
        }
    }

    /// Builds a map by translating source labels; `f` returning `None`
    /// leaves the vertex outside the domain.
    pub fn from_labels<F>(source: &Graph, target: &Graph, params: (f64, f64), f: F) -> Result<Self>
    where
        F: Fn(&str) -> Option<String>,
    {
        let mut map = BTreeMap::new();
        for v in source.vertices() {
            if let Some(lab) = f(source.label(v)) {
                map.insert(v, target.vertex(&lab)?);
            }
        }
        Ok(QIMap { map, params })
    }

    pub fn apply(&self, v: usize) -> Result<usize> {
        self.map
            .get(&v)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(format!("vertex {} outside the domain", v)))
    }

    /// The composite `other ∘ self`, on the domain where both are defined.
    pub fn compose(&self, other: &QIMap) -> QIMap {
        let map = self
            .map
            .iter()
            .filter_map(|(&x, y)| other.map.get(y).map(|&z| (x, z)))
            .collect();
        let (a1, b1) = self.params;
        let (a2, b2) = other.params;
        QIMap {
            map,
            params: (a1 * a2, a2 * b1 + b2),
        }
    }

    pub fn image(&self) -> VertexSet {
        self.map.values().copied().collect()
    }

    pub fn preimage(&self, s: &VertexSet) -> VertexSet {
        self.map
            .iter()
            .filter(|(_, y)| s.contains(y))
            .map(|(&x, _)| x)
            .collect()
    }
}

/// Measures the tightest additive constant for the declared multiplicative
/// constant: returns `(A, B)` with `A` as declared and `B` the least value
/// such that `d/A - B ≤ d' ≤ A·d + B` on all tabulated pairs and every
/// target vertex lies within `B` of the image.
pub fn qi_verify(source: &Graph, target: &Graph, f: &QIMap) -> Result<(f64, f64)> {
    if f.map.is_empty() {
        return Err(Error::Invalid("empty quasi-isometry".into()));
    }
    let a = f.params.0.max(1.0);
    let domain: Vec<usize> = f.map.keys().copied().collect();
    let mut b: f64 = 0.0;
    for (i, &x) in domain.iter().enumerate() {
        let ds = source.distances_from(x);
        let dt = target.distances_from(f.map[&x]);
        for &y in &domain[i + 1..] {
            let d1 = ds[y].ok_or(Error::Disconnected)? as f64;
            let d2 = dt[f.map[&y]].ok_or(Error::Disconnected)? as f64;
            b = b.max(d2 - a * d1).max(d1 / a - d2);
        }
    }
    let from_image = target.distances_from_set(&f.image());
    for v in target.vertices() {
        let d = from_image[v].ok_or(Error::Disconnected)? as f64;
        b = b.max(d);
    }
    Ok((a, b))
}

/// A quasi-inverse: each target vertex maps to the lexicographically least
/// source vertex whose image is nearest. Declared parameters `(A, 3AB)`.
pub fn quasi_inverse(source: &Graph, target: &Graph, f: &QIMap) -> Result<QIMap> {
    let (a, b) = f.params;
    let from_image = target.distances_from_set(&f.image());
    for v in target.vertices() {
        let gap = from_image[v].ok_or(Error::Disconnected)? as f64;
        if gap > b {
            return Err(Error::Invalid(format!(
                "coverage gap {} at target vertex {} exceeds declared B = {}",
                gap, v, b
            )));
        }
    }
    let _ = source;
    let mut map = BTreeMap::new();
    for y in target.vertices() {
        let dt = target.distances_from(y);
        let mut best: Option<(u32, usize)> = None;
        for (&x, &fx) in &f.map {
            if let Some(d) = dt[fx] {
                if best.map_or(true, |(bd, _)| d < bd) {
                    best = Some((d, x));
                }
            }
        }
        let (_, x) = best.ok_or(Error::Disconnected)?;
        map.insert(y, x);
    }
    Ok(QIMap {
        map,
        params: (a, 3.0 * a * b),
    })
}

// ---------------------------------------------------------------------------
// Quasi-κ-to-one checks
// ---------------------------------------------------------------------------

/// One tested thick set.
#[derive(Debug, Clone)]
pub struct KappaSample {
    pub centers: Vec<usize>,
    pub size: u64,
    pub preimage: u64,
    pub boundary: u64,
    /// `| |φ⁻¹(S)| - κ|S| |`, as a float for reporting; the verdict is
    /// computed exactly in integers.
    pub residual: f64,
    pub ok: bool,
}

/// Residuals of `| |φ⁻¹(S)| - κ|S| | ≤ C·|∂S|` over a family of R-thick
/// sets (unions of at most three R-balls).
#[derive(Debug, Clone)]
pub struct KappaReport {
    /// κ as an exact fraction (numerator, denominator).
    pub kappa: (u64, u64),
    pub r: u32,
    pub c: u64,
    pub samples: Vec<KappaSample>,
    pub pass: bool,
}

/// Tests the quasi-κ-to-one inequality over all unions of at most three
/// R-balls with centers in the target window interior, capped at
/// `max_sets` sets. The comparison is exact (integer arithmetic).
pub fn quasi_kappa_check(
    target: &Graph,
    f: &QIMap,
    kappa: (u64, u64),
    r: u32,
    c: u64,
    max_sets: usize,
) -> Result<KappaReport> {
    let (num, den) = kappa;
    if den == 0 || num == 0 {
        return Err(Error::Invalid("κ must be a positive fraction".into()));
    }
    let rim: VertexSet = target
        .window
        .as_ref()
        .map(|w| w.rim.clone())
        .unwrap_or_default();
    let centers: Vec<usize> = target.vertices().filter(|v| !rim.contains(v)).collect();
    let balls: Vec<VertexSet> = centers.iter().map(|&v| target.ball(v, r)).collect();

    let mut samples = Vec::new();
    let mut families: Vec<Vec<usize>> = Vec::new();
    'outer: for take in 1..=3usize {
        // Combinations of center indices in lexicographic order.
        let mut idx: Vec<usize> = (0..take).collect();
        if take > centers.len() {
            break;
        }
        loop {
            families.push(idx.clone());
            if families.len() >= max_sets {
                break 'outer;
            }
            // Next combination.
            let mut i = take;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if idx[i] + (take - i) <= centers.len() - 1 {
                    idx[i] += 1;
                    for j in i + 1..take {
                        idx[j] = idx[j - 1] + 1;
                    }
                    break;
                }
                if i == 0 {
                    idx.clear();
                    break;
                }
            }
            if idx.is_empty() {
                break;
            }
        }
    }
    let mut pass = true;
    for fam in families {
        let mut s = VertexSet::new();
        for &i in &fam {
            s.extend(balls[i].iter().copied());
        }
        let pre = f.map.values().filter(|y| s.contains(y)).count() as u64;
        let boundary = target.boundary(&s).len() as u64;
        let lhs = (den as i128 * pre as i128 - num as i128 * s.len() as i128).unsigned_abs();
        let rhs = den as u128 * c as u128 * boundary as u128;
        let ok = lhs <= rhs;
        pass &= ok;
        samples.push(KappaSample {
            centers: fam.iter().map(|&i| centers[i]).collect(),
            size: s.len() as u64,
            preimage: pre,
            boundary,
            residual: lhs as f64 / den as f64,
            ok,
        });
    }
    Ok(KappaReport {
        kappa,
        r,
        c,
        samples,
        pass,
    })
}

// ---------------------------------------------------------------------------
// Toward-end maps on trees
// ---------------------------------------------------------------------------

/// The map sending every tree vertex to its neighbour toward the end
/// marked by `ray` (a geodesic from any vertex out to the window rim).
/// On a `d`-regular tree window this is (d-1)-to-one on interior fibers,
/// with displacement exactly 1.
pub fn toward_end_map(t: &Graph, ray: &[usize]) -> Result<QIMap> {
    if ray.is_empty() {
        return Err(Error::Invalid("ray must be non-empty".into()));
    }
    for win in ray.windows(2) {
        if !t.is_adjacent(win[0], win[1]) {
            return Err(Error::Invalid(format!(
                "ray vertices {} and {} are not adjacent",
                win[0], win[1]
            )));
        }
    }
    let end = *ray.last().unwrap();
    let dist0 = t.distances_from(ray[0]);
    for (i, &v) in ray.iter().enumerate() {
        if dist0[v] != Some(i as u32) {
            return Err(Error::Invalid("ray is not a geodesic".into()));
        }
    }
    if let Some(win) = &t.window {
        if !win.rim.contains(&end) {
            return Err(Error::Window(
                "the ray must reach the window rim to mark an end".into(),
            ));
        }
    }
    let dist = t.distances_from(end);
    let mut map = BTreeMap::new();
    for v in t.vertices() {
        if v == end {
            continue; // its next step leaves the window
        }
        let dv = dist[v].ok_or(Error::Disconnected)?;
        let mut toward: Vec<usize> = t
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&u| dist[u] == Some(dv - 1))
            .collect();
        if toward.len() != 1 {
            return Err(Error::Invalid(format!(
                "vertex {} has {} neighbours toward the end; the graph is not a tree",
                v,
                toward.len()
            )));
        }
        map.insert(v, toward.pop().unwrap());
    }
    // Displacement 1 by construction; declared parameters follow from
    // finite distance 1 to the identity.
    Ok(QIMap {
        map,
        params: (1.0, 2.0),
    })
}

/// Fiber sizes of a tabulated map, per target vertex.
pub fn fiber_sizes(f: &QIMap) -> BTreeMap<usize, usize> {
    let mut out = BTreeMap::new();
    for &y in f.map.values() {
        *out.entry(y).or_insert(0) += 1;
    }
    out
}

// ---------------------------------------------------------------------------
// Aptolic construction over non-amenable bases (fiber splitting)
// ---------------------------------------------------------------------------

/// The colour-splitting map `L_{mp}(X) → L_{mp^n}(X)` built from an
/// n-to-one base map `f` at bounded displacement from the identity.
///
/// Colours are identified with pairs: a value `v` in `Z_{mp}` splits as
/// `(v mod m, v div m)` and a value in `Z_{mp^n}` as `(v mod m, digits of
/// v div m in base p)`. The image colouring keeps the first halves in
/// place and gathers the second halves of each fiber of `f` (ordered by
/// vertex index) into the digits at the fiber's image.
#[derive(Debug, Clone)]
pub struct SplitLampMap {
    pub m: usize,
    pub p: usize,
    pub n: usize,
    pub source: WreathSpace,
    pub target: WreathSpace,
    pub f: QIMap,
    fibers: BTreeMap<usize, Vec<usize>>,
    /// Max displacement `d(x, f(x))` over the domain.
    pub displacement: u32,
}

fn is_prime(p: usize) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl SplitLampMap {
    pub fn new(m: usize, p: usize, n: usize, base: &Graph, f: &QIMap) -> Result<Self> {
        if m < 1 || n < 1 {
            return Err(Error::Invalid("need m ≥ 1 and n ≥ 1".into()));
        }
        if !is_prime(p) {
            return Err(Error::Invalid(format!("{} is not prime", p)));
        }
        if m % p == 0 {
            return Err(Error::Invalid(
                "m must be coprime to p for the colour split".into(),
            ));
        }
        let mp = m * p;
        let target_colours = mp
            .checked_mul(p.checked_pow(n as u32 - 1).ok_or_else(|| {
                Error::CapExceeded("p^n overflows".into())
            })?)
            .ok_or_else(|| Error::CapExceeded("m·p^n overflows".into()))?;
        if mp < 2 {
            return Err(Error::Invalid("need at least two colours".into()));
        }
        let mut fibers: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (&x, &y) in &f.map {
            fibers.entry(y).or_default().push(x);
        }
        for fiber in fibers.values_mut() {
            fiber.sort_unstable();
        }
        // Reject maps whose interior fibers do not have exactly n elements.
        let rim: VertexSet = base
            .window
            .as_ref()
            .map(|w| w.rim.clone())
            .unwrap_or_default();
        for v in base.vertices() {
            if rim.contains(&v) {
                continue;
            }
            if !f.map.contains_key(&v) {
                return Err(Error::Invalid(format!(
                    "interior vertex {} is outside the domain of f",
                    v
                )));
            }
            let got = fibers.get(&v).map_or(0, |fib| fib.len());
            if got != n {
                return Err(Error::Invalid(format!(
                    "interior fiber over vertex {} has {} elements, expected {}",
                    v, got, n
                )));
            }
        }
        let mut displacement = 0;
        for (&x, &y) in &f.map {
            let d = base
                .distance(x, y)
                .ok_or(Error::Disconnected)?;
            displacement = displacement.max(d);
        }
        Ok(SplitLampMap {
            m,
            p,
            n,
            source: WreathSpace::lamplighter(mp, base.clone())?,
            target: WreathSpace::lamplighter(target_colours, base.clone())?,
            f: f.clone(),
            fibers,
            displacement,
        })
    }

    /// The colouring half of the map: first halves stay, second halves of
    /// each fiber become the base-p digits at the fiber's image.
    pub fn alpha(&self, c: &Colouring) -> Result<Colouring> {
        let mp = self.m * self.p;
        let mut value: BTreeMap<usize, usize> = BTreeMap::new();
        let mut images = VertexSet::new();
        for (x, v) in c.entries() {
            if v >= mp {
                return Err(Error::Invalid(format!(
                    "colour {} out of range (Z_{})",
                    v, mp
                )));
            }
            let first = v % self.m;
            if first != 0 {
                *value.entry(x).or_insert(0) += first;
            }
            images.insert(self.f.apply(x)?);
        }
        for y in images {
            let fiber = self.fibers.get(&y).filter(|fib| fib.len() == self.n);
            let fiber = fiber.ok_or_else(|| {
                Error::Window(format!(
                    "fiber over vertex {} is truncated by the window",
                    y
                ))
            })?;
            let mut t = 0usize;
            for (i, &x) in fiber.iter().enumerate() {
                let digit = c.get(x, self.source.o) / self.m;
                t += digit * self.p.pow(i as u32);
            }
            if t != 0 {
                *value.entry(y).or_insert(0) += self.m * t;
            }
        }
        let mut out = Colouring::empty();
        for (x, v) in value {
            out.set(x, v, self.target.o);
        }
        Ok(out)
    }

    pub fn apply(&self, v: &LampVertex) -> Result<LampVertex> {
        Ok(LampVertex::new(self.alpha(&v.colouring)?, v.arrow))
    }

    /// Tabulates the map over all colourings supported on `support`,
    /// producing a finite aptolic map (β = identity).
    pub fn tabulate(&self, support: &VertexSet, cap: usize) -> Result<AptolicMap> {
        let mut alpha = BTreeMap::new();
        for c in crate::leaves::enumerate_colourings(&self.source, support, cap)? {
            let image = self.alpha(&c)?;
            alpha.insert(c, image);
        }
        AptolicMap::new(
            alpha,
            (0..self.source.base.vertex_count()).collect(),
            (2 * self.displacement + 1, 0),
        )
    }
}

/// Sampled verification of the colour-splitting construction.
#[derive(Debug, Clone)]
pub struct NonamenableReport {
    pub samples: usize,
    pub displacement: u32,
    /// `supp(c̄₁-c̄₂) ⊆ supp(c₁-c₂) ∪ f(supp(c₁-c₂))` held on every sample.
    pub inclusion_first: bool,
    /// `supp(c₁-c₂) ⊆ supp(c̄₁-c̄₂) ∪ f⁻¹(supp(c̄₁-c̄₂))` held on every sample.
    pub inclusion_second: bool,
    pub upper_ratio: f64,
    /// `2C + 1`.
    pub upper_bound: f64,
    pub lower_ratio: f64,
    /// `2nC + 1`.
    pub lower_bound: f64,
    pub ok: bool,
}

/// Builds the colour-splitting map `L_{mp}(X) → L_{mp^n}(X)` and verifies
/// the two support inclusions (exactly) and the Lipschitz bounds
/// `d(Φu,Φv) ≤ (2C+1)·d(u,v)` and `d(u,v) ≤ (2nC+1)·d(Φu,Φv)` on seeded
/// random samples.
pub fn aptolic_nonamenable(
    m: usize,
    p: usize,
    n: usize,
    base: &Graph,
    f: &QIMap,
    seed: u64,
    samples: usize,
) -> Result<(SplitLampMap, NonamenableReport)> {
    let map = SplitLampMap::new(m, p, n, base, f)?;
    let rim: VertexSet = base
        .window
        .as_ref()
        .map(|w| w.rim.clone())
        .unwrap_or_default();
    // Positions safe for sampling: the position, its image, and the image's
    // fiber all stay clear of the rim.
    let pool: Vec<usize> = base
        .vertices()
        .filter(|&v| {
            !rim.contains(&v)
                && map.f.map.get(&v).map_or(false, |y| !rim.contains(y))
        })
        .collect();
    if pool.is_empty() {
        return Err(Error::Window("no interior vertices to sample".into()));
    }
    let mp = m * p;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_colouring = |rng: &mut ChaCha8Rng| {
        let lamps = rng.gen_range(0..=3usize);
        let mut c = Colouring::empty();
        for _ in 0..lamps {
            let x = pool[rng.gen_range(0..pool.len())];
            c.set(x, rng.gen_range(0..mp), 0);
        }
        c
    };
    let c_disp = map.displacement;
    let upper_bound = (2 * c_disp as usize + 1) as f64;
    let lower_bound = (2 * n * c_disp as usize + 1) as f64;
    let mut inclusion_first = true;
    let mut inclusion_second = true;
    let mut upper_ratio: f64 = 0.0;
    let mut lower_ratio: f64 = 0.0;
    for _ in 0..samples {
        let c1 = random_colouring(&mut rng);
        let c2 = random_colouring(&mut rng);
        let p1 = pool[rng.gen_range(0..pool.len())];
        let p2 = pool[rng.gen_range(0..pool.len())];
        let bar1 = map.alpha(&c1)?;
        let bar2 = map.alpha(&c2)?;
        let delta = c1.delta(&c2);
        let delta_bar = bar1.delta(&bar2);
        let mut first_allowed = delta.clone();
        for &x in &delta {
            first_allowed.insert(map.f.apply(x)?);
        }
        inclusion_first &= delta_bar.is_subset(&first_allowed);
        let mut second_allowed = delta_bar.clone();
        for &y in &delta_bar {
            if let Some(fiber) = map.fibers.get(&y) {
                second_allowed.extend(fiber.iter().copied());
            }
        }
        inclusion_second &= delta.is_subset(&second_allowed);
        let u = LampVertex::new(c1, p1);
        let v = LampVertex::new(c2, p2);
        let d = map.source.lamp_distance(&u, &v, HELD_KARP_CAP)? as f64;
        let d_bar = map
            .target
            .lamp_distance(
                &LampVertex::new(bar1, p1),
                &LampVertex::new(bar2, p2),
                HELD_KARP_CAP,
            )? as f64;
        if d > 0.0 {
            upper_ratio = upper_ratio.max(d_bar / d);
        }
        if d_bar > 0.0 {
            lower_ratio = lower_ratio.max(d / d_bar);
        }
    }
    let ok = inclusion_first
        && inclusion_second
        && upper_ratio <= upper_bound
        && lower_ratio <= lower_bound;
    let report = NonamenableReport {
        samples,
        displacement: c_disp,
        inclusion_first,
        inclusion_second,
        upper_ratio,
        upper_bound,
        lower_ratio,
        lower_bound,
        ok,
    };
    Ok((map, report))
}

// ---------------------------------------------------------------------------
// Aptolic construction over amenable bases (partition + σ)
// ---------------------------------------------------------------------------

/// Input for the partition construction of `L_{q^a}(X) → L_{q^b}(Y)`:
/// partitions of `X` into pieces of size `b` and of `Y` into pieces of
/// size `a`, matched by `psi`, a piece-respecting base map `beta`, and a
/// colour-block bijection `sigma` with `sigma[0] = 0`.
pub struct AmenableSpec<'a> {
    pub x: &'a Graph,
    pub y: &'a Graph,
    pub p_pieces: &'a [VertexSet],
    pub q_pieces: &'a [VertexSet],
    /// `psi[i]` is the index in `q_pieces` matched to `p_pieces[i]`.
    pub psi: &'a [usize],
    pub beta: &'a QIMap,
    /// A bijection on `q^(a·b)` block values, `sigma[0] = 0`.
    pub sigma: &'a [usize],
    pub q: usize,
    pub a: u32,
    pub b: u32,
}

/// Condition report for the partition construction.
#[derive(Debug, Clone)]
pub struct AmenableReport {
    /// α is a bijection between the tabulated colour families.
    pub alpha_bijective: bool,
    /// Tightest additive fit of β at its declared multiplicative constant.
    pub beta_fit: (f64, f64),
    /// Largest Hausdorff distance between `β(supp(c₁-c₂))` and
    /// `supp(α(c₁)-α(c₂))` over the samples.
    pub hausdorff_max: u32,
    /// The piece-diameter bound the Hausdorff distances must respect.
    pub hausdorff_bound: u32,
    pub ok: bool,
}

fn hausdorff_distance(g: &Graph, s1: &VertexSet, s2: &VertexSet) -> Result<u32> {
    if s1.is_empty() || s2.is_empty() {
        return Err(Error::Invalid("Hausdorff distance of an empty set".into()));
    }
    let d1 = g.distances_from_set(s1);
    let d2 = g.distances_from_set(s2);
    let mut h = 0;
    for &v in s2 {
        h = h.max(d1[v].ok_or(Error::Disconnected)?);
    }
    for &v in s1 {
        h = h.max(d2[v].ok_or(Error::Disconnected)?);
    }
    Ok(h)
}

/// Assembles the aptolic map `(c, p) ↦ (α(c), β(p))` where α acts
/// blockwise through `sigma` on each matched pair of pieces, tabulated on
/// colourings supported on the pieces listed in `support_pieces`. Reports
/// the three sufficient conditions: α bijective, β a quasi-isometry, and
/// a uniform Hausdorff bound between `β(supp(c₁-c₂))` and
/// `supp(α(c₁)-α(c₂))`.
pub fn aptolic_amenable(
    spec: &AmenableSpec,
    support_pieces: &[usize],
    seed: u64,
    samples: usize,
    cap: usize,
) -> Result<(AptolicMap, AmenableReport)> {
    let n = spec
        .q
        .checked_pow(spec.a)
        .ok_or_else(|| Error::CapExceeded("q^a overflows".into()))?;
    let m = spec
        .q
        .checked_pow(spec.b)
        .ok_or_else(|| Error::CapExceeded("q^b overflows".into()))?;
    if n < 2 || m < 2 {
        return Err(Error::Invalid("need at least two colours per side".into()));
    }
    // Partition sanity.
    let mut seen_x = VertexSet::new();
    for piece in spec.p_pieces {
        if piece.len() != spec.b as usize {
            return Err(Error::Invalid(format!(
                "piece {:?} has size {}, expected {}",
                piece,
                piece.len(),
                spec.b
            )));
        }
        for &v in piece {
            if v >= spec.x.vertex_count() || !seen_x.insert(v) {
                return Err(Error::Invalid("pieces of X overlap or leave the graph".into()));
            }
        }
    }
    let mut seen_y = VertexSet::new();
    for piece in spec.q_pieces {
        if piece.len() != spec.a as usize {
            return Err(Error::Invalid(format!(
                "piece {:?} has size {}, expected {}",
                piece,
                piece.len(),
                spec.a
            )));
        }
        for &v in piece {
            if v >= spec.y.vertex_count() || !seen_y.insert(v) {
                return Err(Error::Invalid("pieces of Y overlap or leave the graph".into()));
            }
        }
    }
    if spec.psi.len() != spec.p_pieces.len() {
        return Err(Error::Invalid("psi must match the pieces of X".into()));
    }
    let mut psi_seen = VertexSet::new();
    for &j in spec.psi {
        if j >= spec.q_pieces.len() || !psi_seen.insert(j) {
            return Err(Error::Invalid("psi is not injective into the pieces of Y".into()));
        }
    }
    // σ sanity: a bijection on q^(ab) block values fixing 0.
    let blocks = n
        .checked_pow(spec.b)
        .ok_or_else(|| Error::CapExceeded("q^(ab) overflows".into()))?;
    if spec.sigma.len() != blocks {
        return Err(Error::Invalid(format!(
            "sigma has {} entries, expected q^(a·b) = {}",
            spec.sigma.len(),
            blocks
        )));
    }
    if spec.sigma[0] != 0 {
        return Err(Error::Invalid("sigma must fix 0".into()));
    }
    {
        let mut seen = vec![false; blocks];
        for &v in spec.sigma {
            if v >= blocks || seen[v] {
                return Err(Error::Invalid("sigma is not a bijection".into()));
            }
            seen[v] = true;
        }
    }
    // β respects the matched pieces.
    for (i, piece) in spec.p_pieces.iter().enumerate() {
        let image_piece = &spec.q_pieces[spec.psi[i]];
        for &v in piece {
            let fv = spec.beta.apply(v)?;
            if !image_piece.contains(&fv) {
                return Err(Error::Invalid(format!(
                    "beta maps vertex {} of piece {} outside its matched piece",
                    v, i
                )));
            }
        }
    }

    let source = WreathSpace::lamplighter(n, spec.x.clone())?;
    let target = WreathSpace::lamplighter(m, spec.y.clone())?;

    // Tabulate α over colourings supported on the chosen pieces.
    let mut support = VertexSet::new();
    for &i in support_pieces {
        if i >= spec.p_pieces.len() {
            return Err(Error::UnknownVertex(format!("piece {}", i)));
        }
        support.extend(spec.p_pieces[i].iter().copied());
    }
    let domain = crate::leaves::enumerate_colourings(&source, &support, cap)?;
    let mut image_support = VertexSet::new();
    for &i in support_pieces {
        image_support.extend(spec.q_pieces[spec.psi[i]].iter().copied());
    }
    let mut alpha = BTreeMap::new();
    let mut images_in_range = true;
    for c in &domain {
        let mut image = Colouring::empty();
        for &i in support_pieces {
            let xs: Vec<usize> = spec.p_pieces[i].iter().copied().collect();
            let mut idx = 0usize;
            for (j, &x) in xs.iter().enumerate() {
                idx += c.get(x, source.o) * n.pow(j as u32);
            }
            let t = spec.sigma[idx];
            let ys: Vec<usize> = spec.q_pieces[spec.psi[i]].iter().copied().collect();
            for (j, &y) in ys.iter().enumerate() {
                image.set(y, (t / m.pow(j as u32)) % m, target.o);
            }
        }
        images_in_range &= image.support_set().is_subset(&image_support);
        alpha.insert(c.clone(), image);
    }
    let count = alpha.len();
    let mut beta_vec = Vec::with_capacity(spec.x.vertex_count());
    for v in spec.x.vertices() {
        beta_vec.push(spec.beta.apply(v).map_err(|_| {
            Error::Invalid("beta must be defined on every vertex of X".into())
        })?);
    }
    let qi_params = (
        spec.beta.params.0.ceil() as u32,
        spec.beta.params.1.ceil() as u32,
    );
    let map = AptolicMap::new(alpha, beta_vec, qi_params)?;
    // Injective (checked by the constructor) + image inside the matched
    // family + equal cardinalities ⇒ bijective onto that family.
    let alpha_bijective = images_in_range && count == domain.len();

    let beta_fit = qi_verify(spec.x, spec.y, spec.beta)?;

    let hausdorff_bound = spec
        .q_pieces
        .iter()
        .map(|piece| {
            let mut d = 0;
            for &u in piece {
                for &v in piece {
                    d = d.max(spec.y.distance(u, v).unwrap_or(0));
                }
            }
            d
        })
        .max()
        .unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hausdorff_max = 0;
    for _ in 0..samples {
        let c1 = &domain[rng.gen_range(0..domain.len())];
        let c2 = &domain[rng.gen_range(0..domain.len())];
        let diff = c1.delta(c2);
        if diff.is_empty() {
            continue;
        }
        let beta_supp: VertexSet = diff.iter().map(|&x| map.beta[x]).collect();
        let alpha_diff = map.alpha(c1)?.delta(map.alpha(c2)?);
        hausdorff_max =
            hausdorff_max.max(hausdorff_distance(spec.y, &beta_supp, &alpha_diff)?);
    }
    let ok = alpha_bijective && hausdorff_max <= hausdorff_bound;
    let report = AmenableReport {
        alpha_bijective,
        beta_fit,
        hausdorff_max,
        hausdorff_bound,
        ok,
    };
    Ok((map, report))
}
