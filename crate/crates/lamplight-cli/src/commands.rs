//! One handler per subcommand. Handlers read their inputs from the flat
//! config, run library computations, and fill a [`Report`].

use lamplight::amenability::{
    aptolic_amenable, aptolic_nonamenable, folner_boxes, folner_wreath, quasi_kappa_check,
    random_subtree, toward_end_map, tree_subtree_boundary, AmenableSpec, QIMap,
};
use lamplight::graph;
use lamplight::homotopy::{
    coarse_homotopic, is_coarsely_trivial, lamp_io_covering, persistent_intersection,
    script_to_text, HomotopyVerdict, PathSeq, PersistVerdict,
};
use lamplight::leaves::{
    detect_square, dist_to_leaf, ladder_check, leaf_coarse_intersection, leaf_distance, Leaf,
    SquareVerdict,
};
use lamplight::wreath::distortion_experiment;
use lamplight::{Colouring, Graph, LampVertex, VertexSet, WreathSpace};

use crate::config::JobConfig;
use crate::descriptors::parse_graph;
use crate::report::{Report, Verdict};
use crate::{fixtures, CliError, Common};

fn lamplighter_space(
    cfg: &JobConfig,
    common: &Common,
    default_base: &str,
) -> Result<WreathSpace, CliError> {
    let n: usize = cfg.parse("n", 2)?;
    let base = parse_graph(&cfg.str("base", default_base), common.window)?;
    Ok(WreathSpace::lamplighter(n, base)?)
}

/// A bare colouring in the `{v1:c1,...}` syntax of vertex texts.
fn parse_colouring(w: &WreathSpace, text: &str) -> Result<Colouring, CliError> {
    let with_arrow = format!("{}@{}", text.trim(), w.base.label(0));
    Ok(w.parse_vertex(&with_arrow)?.colouring)
}

fn parse_leaf(w: &WreathSpace, text: &str) -> Result<Leaf, CliError> {
    Ok(Leaf::new(parse_colouring(w, text)?))
}

fn parse_leaf_list(w: &WreathSpace, text: &str) -> Result<Vec<Leaf>, CliError> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_leaf(w, s))
        .collect()
}

fn base_vertices(w: &WreathSpace, labels: &[String]) -> Result<VertexSet, CliError> {
    labels
        .iter()
        .map(|l| Ok(w.base.vertex(l)?))
        .collect::<Result<VertexSet, lamplight::Error>>()
        .map_err(CliError::from)
}

fn write_dot(g: &Graph, common: &Common) -> Result<(), CliError> {
    if let Some(path) = &common.dot_out {
        std::fs::write(path, g.to_dot())
            .map_err(|e| CliError::Usage(format!("cannot write DOT to {:?}: {}", path, e)))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// build
// ---------------------------------------------------------------------------

pub fn build(cfg: &JobConfig, common: &Common) -> Result<Report, CliError> {
    let w = lamplighter_space(cfg, common, "line:2")?;
    let support: VertexSet = w.base.vertices().collect();
    let mat = w.materialize(&support, &support, common.cap_states)?;
    let mut report = Report::new("build");
    report.push(format!(
        "lamplighter window over {} base vertices, {} colours",
        w.base.vertex_count(),
        w.lamp.vertex_count()
    ));
    report.push(format!(
        "materialized: {} vertices, {} edges, max degree {}",
        mat.graph.vertex_count(),
        mat.graph.edge_count(),
        mat.graph.max_degree()
    ));
    report.kv("vertices", mat.graph.vertex_count());
    report.kv("edges", mat.graph.edge_count());
    report.kv("max-degree", mat.graph.max_degree());
    match cfg.str("check", "none").as_str() {
        "none" => {}
        "truncated-cube" => {
            let tc = fixtures::truncated_cube();
            let iso = mat.graph.isomorphic(&tc, 1_000_000)?.is_iso();
            report.push(format!("isomorphic to the truncated cube: {}", iso));
            report.kv("check", iso);
            if !iso {
                report.fail();
            }
        }
        "c8" => {
            let iso = mat
                .graph
                .isomorphic(&graph::cycle_graph(8), 1_000_000)?
                .is_iso();
            report.push(format!("isomorphic to the 8-cycle: {}", iso));
            report.kv("check", iso);
            if !iso {
                report.fail();
            }
        }
        other => {
            return Err(CliError::Usage(format!(
                "check={:?} is not one of none, truncated-cube, c8",
                other
            )))
        }
    }
    write_dot(&mat.graph, common)?;
    Ok(report)
}

// ---------------------------------------------------------------------------
// dist
// ---------------------------------------------------------------------------

pub fn dist(cfg: &JobConfig, common: &Common) -> Result<Report, CliError> {
    let w = lamplighter_space(cfg, common, "line:4")?;
    let u = w.parse_vertex(&cfg.str("u", "{}@0"))?;
    let v = w.parse_vertex(&cfg.str("v", "{-1:1,2:1}@0"))?;
    let d = w.lamp_distance(&u, &v, common.cap_heldkarp)?;
    let mut report = Report::new("dist");
    report.push(format!(
        "d({}, {}) = {}",
        w.vertex_text(&u),
        w.vertex_text(&v),
        d
    ));
    report.kv("distance", d);
    if cfg.parse("geodesic", false)? {
        let path = w.lamp_geodesic(&u, &v, common.cap_heldkarp)?;
        for step in &path {
            report.push(format!("  {}", w.vertex_text(step)));
        }
        report.kv("geodesic-len", path.len() - 1);
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// homotopy
// ---------------------------------------------------------------------------

pub fn homotopy(cfg: &JobConfig, common: &Common) -> Result<Report, CliError> {
    let g = parse_graph(&cfg.str("graph", "cycle:8"), common.window)?;
    let e: u32 = cfg.parse("e", 1)?;
    let labels = cfg.list("path", "0,1,2,3,4,5,6,7,0");
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    let p1 = PathSeq::from_labels(&g, &refs)?;
    let max_len: usize = cfg.parse("max-len", p1.len() + 4 * e as usize + 8)?;
    let mode = cfg.str("mode", "trivial");
    let verdict = match mode.as_str() {
        "trivial" => is_coarsely_trivial(&g, &p1, e, max_len, common.cap_states)?,
        "equiv" => {
            let labels2 = cfg
                .get("path2")
                .ok_or_else(|| CliError::Usage("mode=equiv needs path2".into()))?
                .to_string();
            let labels2: Vec<&str> = labels2.split(',').map(str::trim).collect();
            let p2 = PathSeq::from_labels(&g, &labels2)?;
            coarse_homotopic(&g, &p1, &p2, e, max_len, common.cap_states)?
        }
        other => {
            return Err(CliError::Usage(format!(
                "mode={:?} is not one of trivial, equiv",
                other
            )))
        }
    };
    let mut report = Report::new("homotopy");
    report.push(format!("scale E = {}, length cap {}", e, max_len));
    match verdict {
        HomotopyVerdict::Yes(script) => {
            report.push(format!("equivalent, via {} elementary moves:", script.len()));
            for line in script_to_text(&g, &script).lines() {
                report.push(format!("  {}", line));
            }
            report.kv("equivalent", "yes");
            report.kv("moves", script.len());
        }
        HomotopyVerdict::No => {
            report.push("not equivalent: the move closure misses the target".to_string());
            report.kv("equivalent", "no");
            report.fail();
        }
        HomotopyVerdict::Unknown => {
            report.push("inconclusive: caps exhausted before the search closed".to_string());
            report.kv("equivalent", "unknown");
            report.verdict = Verdict::Unknown;
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// persist
// ---------------------------------------------------------------------------

pub fn persist(cfg: &JobConfig, common: &Common) -> Result<Report, CliError> {
    let w = lamplighter_space(cfg, common, "line:6")?;
    let p = w.base.vertex(&cfg.str("p", "0"))?;
    let a1: u32 = cfg.parse("a1", 1)?;
    let e: u32 = cfg.parse("e", 1)?;
    let support = w.base.ball(p, cfg.parse("support-radius", a1)?);
    let arrows: VertexSet = w.base.vertices().collect();
    let mat = w.materialize(&support, &arrows, common.cap_states)?;

    // Default path: walk in from one side with all lamps off, flip the lamp
    // at p, and walk out the other side. The endpoints then lie in distinct
    // outer covering parts, so the central part shows up on the nerve path.
    let default_path = {
        let from = w.base.vertex(&cfg.str("from", "-5"))?;
        let to = w.base.vertex(&cfg.str("to", "5"))?;
        let mut lit = Colouring::empty();
        lit.set(p, 1 % w.lamp.vertex_count(), w.o);
        let mut steps: Vec<String> = lamplight::wreath::geodesic(&w.base, from, p)?
            .into_iter()
            .map(|q| w.vertex_text(&LampVertex::new(Colouring::empty(), q)))
            .collect();
        steps.extend(
            lamplight::wreath::geodesic(&w.base, p, to)?
                .into_iter()
                .map(|q| w.vertex_text(&LampVertex::new(lit.clone(), q))),
        );
        steps.join(";")
    };
    let path_text = cfg.str("path", &default_path);
    let verts: Vec<usize> = path_text
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            let v = w.parse_vertex(s)?;
            mat.vertex_of(&v)
                .ok_or_else(|| lamplight::Error::UnknownVertex(s.into()))
        })
        .collect::<Result<_, _>>()?;
    let path = PathSeq::new(&mat.graph, verts)?;

    let cov = lamp_io_covering(&w, &mat, p, a1)?;
    // Default target: the central covering part (window vertices whose
    // arrow is near p and whose far lamps are all off).
    let target: VertexSet = match cfg.get("target") {
        None => cov
            .parts
            .iter()
            .find(|pt| pt.name == "I{}")
            .map(|pt| pt.members.clone())
            .unwrap_or_default(),
        Some(text) => text
            .to_string()
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                let v = w.parse_vertex(s)?;
                mat.vertex_of(&v)
                    .ok_or_else(|| lamplight::Error::UnknownVertex(s.into()))
            })
            .collect::<Result<_, lamplight::Error>>()?,
    };

    let max_len: usize = cfg.parse("max-len", path.len() + 4 * e as usize + 8)?;
    let cert = persistent_intersection(
        &mat.graph,
        &path,
        &target,
        e,
        max_len,
        common.cap_states,
        Some(&cov),
    )?;

    let mut report = Report::new("persist");
    report.push(format!(
        "window: {} vertices; covering: {} parts at scale {}",
        mat.graph.vertex_count(),
        cov.parts.len(),
        cov.scale
    ));
    report.push(format!("target: {} window vertices", target.len()));
    for note in &cert.notes {
        report.push(format!("note: {}", note));
    }
    match cert.verdict {
        PersistVerdict::Certified => {
            report.push("certified: every equivalent path meets the target".to_string());
            if let Some(np) = &cert.nerve_path {
                report.push(format!("nerve path: {}", np.join(" -> ")));
            }
            report.kv("persist", "certified");
        }
        PersistVerdict::Refuted => {
            report.push("refuted: an equivalent path avoids the target".to_string());
            if let Some((witness, _)) = &cert.witness {
                let labels: Vec<&str> = witness.iter().map(|&v| mat.graph.label(v)).collect();
                report.push(format!("witness: {}", labels.join(" ")));
            }
            report.kv("persist", "refuted");
            report.fail();
        }
        PersistVerdict::Unknown => {
            report.push("inconclusive: caps exhausted".to_string());
            report.kv("persist", "unknown");
            report.verdict = Verdict::Unknown;
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// leaves
// ---------------------------------------------------------------------------

pub fn leaves(cfg: &JobConfig, common: &Common) -> Result<Report, CliError> {
    let w = lamplighter_space(cfg, common, "line:6")?;
    let mut report = Report::new("leaves");
    match cfg.str("mode", "dist").as_str() {
        "dist" => {
            let leaf = parse_leaf(&w, &cfg.str("leaf", "{-1:1,2:1}"))?;
            match cfg.get("leaf2") {
                Some(text) => {
                    let leaf2 = parse_leaf(&w, &text.to_string())?;
                    let d = leaf_distance(&w, &leaf, &leaf2)?;
                    report.push(format!("d(X(c1), X(c2)) = {}", d));
                    report.kv("distance", d);
                }
                None => {
                    let v = w.parse_vertex(&cfg.str("v", "{}@0"))?;
                    let d = dist_to_leaf(&w, &v, &leaf)?;
                    report.push(format!("d({}, leaf) = {}", w.vertex_text(&v), d));
                    report.kv("distance", d);
                }
            }
        }
        "intersect" => {
            let l1 = parse_leaf(&w, &cfg.str("leaf", "{0:1}"))?;
            let l2 = parse_leaf(&w, &cfg.str("leaf2", "{1:1}"))?;
            let k: u32 = cfg.parse("k", 1)?;
            let support = base_vertices(&w, &cfg.list("support", "-1,0,1"))?;
            let arrows: VertexSet = w.base.vertices().collect();
            let mat = w.materialize(&support, &arrows, common.cap_states)?;
            let li = leaf_coarse_intersection(&w, &l1, &l2, k, &mat)?;
            report.push(format!(
                "K = {}: {} window vertices in both thickenings, diameter {:?} (bound {})",
                k, li.count, li.diameter, li.bound
            ));
            report.kv("count", li.count);
            report.kv("bound", li.bound);
            if let Some(d) = li.diameter {
                report.kv("diameter", d);
                if d as u64 > li.bound {
                    report.fail();
                }
            }
        }
        "square" => {
            let corners = [
                parse_leaf(&w, &cfg.str("leaf0", "{}"))?,
                parse_leaf(&w, &cfg.str("leaf1", "{-10:1}"))?,
                parse_leaf(&w, &cfg.str("leaf2", "{-10:1,10:1}"))?,
                parse_leaf(&w, &cfg.str("leaf3", "{10:1}"))?,
            ];
            let eps: u32 = cfg.parse("eps", 1)?;
            let l: u32 = cfg.parse("l", 10)?;
            match detect_square(&w, &corners, eps, l)? {
                SquareVerdict::Square(sq) => {
                    report.push(format!(
                        "({}, {})-square; supports {} apart, centred at {} and {}",
                        sq.eps,
                        sq.l,
                        sq.support_distance,
                        w.base.label(sq.a_center),
                        w.base.label(sq.b_center)
                    ));
                    report.kv("square", "yes");
                }
                SquareVerdict::Refuted(msg) => {
                    report.push(format!("not a square: {}", msg));
                    report.kv("square", "no");
                    report.fail();
                }
            }
        }
        "ladder" => {
            let ps = parse_leaf_list(&w, &cfg.str("ps", "{};{-10:1}"))?;
            let qs = parse_leaf_list(&w, &cfg.str("qs", "{10:1};{-10:1,10:1}"))?;
            let eps: u32 = cfg.parse("eps", 1)?;
            let l: u32 = cfg.parse("l", 10)?;
            let eta: u32 = cfg.parse("eta", 1)?;
            let u = w.parse_vertex(&cfg.str("u", "{}@0"))?;
            let v = w.parse_vertex(&cfg.str("v", "{-10:1}@0"))?;
            let lr = ladder_check(&w, &ps, &qs, eps, l, eta, &u, &v)?;
            report.push(format!(
                "ladder verified; d(p, q) = {} against the bound 6η = {}",
                lr.arrow_distance, lr.bound
            ));
            report.kv("arrow-distance", lr.arrow_distance);
            report.kv("bound", lr.bound);
            if !lr.ok {
                report.fail();
            }
        }
        other => {
            return Err(CliError::Usage(format!(
                "mode={:?} is not one of dist, intersect, square, ladder",
                other
            )))
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// folner
// ---------------------------------------------------------------------------

pub fn folner(cfg: &JobConfig, common: &Common) -> Result<Report, CliError> {
    let mut report = Report::new("folner");
    match cfg.str("mode", "boxes").as_str() {
        "boxes" => {
            let d: usize = cfg.parse("d", 2)?;
            let sizes: Vec<i64> = cfg.parse_list("sizes", "1,2,3,4")?;
            let cert = folner_boxes(d, &sizes)?;
            for e in &cert.entries {
                report.push(format!(
                    "{}: |F| = {}, |∂F| = {}, ratio {:.4}",
                    e.label, e.size, e.boundary, e.ratio
                ));
            }
            report.kv("entries", cert.entries.len());
            report.kv("ratios-monotone", cert.ratios_monotone);
            if !cert.ratios_monotone {
                report.fail();
            }
        }
        "wreath" => {
            let w = lamplighter_space(cfg, common, "line:8")?;
            let colours = base_vertices_in(&w.lamp, &cfg.list("colours", "0"))?;
            let center = w.base.vertex(&cfg.str("center", "0"))?;
            let steps: Vec<u32> = cfg.parse_list("steps", "0,1,2")?;
            let mut prev: Option<f64> = None;
            let mut monotone = true;
            for &k in &steps {
                let b = w.base.ball(center, k);
                let entry = folner_wreath(&w, &colours, &b, common.cap_states)?;
                report.push(format!(
                    "{}: |F| = {}, |∂F| = {}, ratio {:.4}",
                    entry.label, entry.size, entry.boundary, entry.ratio
                ));
                if let Some(p) = prev {
                    monotone &= entry.ratio <= p;
                }
                prev = Some(entry.ratio);
            }
            report.kv("entries", steps.len());
            report.kv("ratios-monotone", monotone);
            if !monotone {
                report.fail();
            }
        }
        "tree" => {
            let d: usize = cfg.parse("d", 3)?;
            let r: u32 = cfg.parse("r", 5)?;
            let size: usize = cfg.parse("size", 6)?;
            let count: u64 = cfg.parse("count", 5)?;
            let t = graph::tree_window(d, r)?;
            let mut all_ok = true;
            for i in 0..count {
                let sub = random_subtree(&t, d, size, common.seed.wrapping_add(i))?;
                let tb = tree_subtree_boundary(&t, &sub, d)?;
                report.push(format!(
                    "sample {}: |V| = {}, |∂V| = {} ≥ bound {} : {}",
                    i, tb.size, tb.boundary, tb.bound, tb.ok
                ));
                all_ok &= tb.ok;
            }
            report.kv("samples", count);
            report.kv("isoperimetric", all_ok);
            if !all_ok {
                report.fail();
            }
        }
        other => {
            return Err(CliError::Usage(format!(
                "mode={:?} is not one of boxes, wreath, tree",
                other
            )))
        }
    }
    Ok(report)
}

fn base_vertices_in(g: &Graph, labels: &[String]) -> Result<VertexSet, CliError> {
    labels
        .iter()
        .map(|l| Ok(g.vertex(l)?))
        .collect::<Result<VertexSet, lamplight::Error>>()
        .map_err(CliError::from)
}

// ---------------------------------------------------------------------------
// kappa
// ---------------------------------------------------------------------------

/// The alternating-letter geodesic ray `e, a0, a0.a1, a0.a1.a0, ...` out to
/// the rim of a tree window.
pub fn tree_ray(t: &Graph, r: u32) -> Result<Vec<usize>, CliError> {
    let mut labels = vec!["e".to_string()];
    let mut cur = String::new();
    for i in 0..r {
        let letter = if i % 2 == 0 { "a0" } else { "a1" };
        if cur.is_empty() {
            cur = letter.to_string();
        } else {
            cur = format!("{}.{}", cur, letter);
        }
        labels.push(cur.clone());
    }
    labels
        .iter()
        .map(|l| Ok(t.vertex(l)?))
        .collect::<Result<Vec<usize>, lamplight::Error>>()
        .map_err(CliError::from)
}

pub fn kappa(cfg: &JobConfig, common: &Common) -> Result<Report, CliError> {
    let r: u32 = cfg.parse("r", 2)?;
    let c: u64 = cfg.parse("c", 1)?;
    let max_sets: usize = cfg.parse("max-sets", 2000)?;
    let map_name = cfg.str("map", "identity");
    let (target, f, default_kappa) = match map_name.as_str() {
        "identity" => {
            let g = parse_graph(&cfg.str("graph", "line:20"), common.window)?;
            let f = QIMap::identity(&g);
            (g, f, "1".to_string())
        }
        "double" => {
            let g = parse_graph(&cfg.str("graph", "line:20"), common.window)?;
            let half = ((g.vertex_count() as i64 - 1) / 2) / 2;
            let f = QIMap::from_labels(&g, &g, (2.0, 1.0), |lab| {
                let k: i64 = lab.parse().ok()?;
                (k.abs() <= half).then(|| (2 * k).to_string())
            })?;
            (g, f, "1/2".to_string())
        }
        "floor" => {
            let g = parse_graph(&cfg.str("graph", "line:20"), common.window)?;
            let f = QIMap::from_labels(&g, &g, (2.0, 1.0), |lab| {
                let k: i64 = lab.parse().ok()?;
                Some(k.div_euclid(2).to_string())
            })?;
            (g, f, "2".to_string())
        }
        "toward-end" => {
            let d: usize = cfg.parse("d", 3)?;
            let depth: u32 = cfg.parse("depth", 4)?;
            let t = graph::tree_window(d, depth)?;
            let ray = tree_ray(&t, depth)?;
            let f = toward_end_map(&t, &ray)?;
            (t, f, format!("{}", d - 1))
        }
        other => {
            return Err(CliError::Usage(format!(
                "map={:?} is not one of identity, double, floor, toward-end",
                other
            )))
        }
    };
    let kappa = cfg.fraction("kappa", &default_kappa)?;
    let kr = quasi_kappa_check(&target, &f, kappa, r, c, max_sets)?;
    let mut report = Report::new("kappa");
    report.push(format!(
        "map {} on {} vertices, κ = {}/{}, R = {}, C = {}: {} thick sets",
        map_name,
        target.vertex_count(),
        kappa.0,
        kappa.1,
        r,
        c,
        kr.samples.len()
    ));
    let worst = kr
        .samples
        .iter()
        .max_by(|a, b| a.residual.total_cmp(&b.residual));
    if let Some(s) = worst {
        report.push(format!(
            "worst residual {:.3} on a set of size {} with boundary {}",
            s.residual, s.size, s.boundary
        ));
        report.kv("worst-residual", format!("{:.3}", s.residual));
    }
    report.kv("sets", kr.samples.len());
    report.kv("pass", kr.pass);
    if !kr.pass {
        report.fail();
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// aptolic
// ---------------------------------------------------------------------------

pub fn aptolic(cfg: &JobConfig, common: &Common) -> Result<Report, CliError> {
    let mut report = Report::new("aptolic");
    match cfg.str("mode", "nonamenable").as_str() {
        "nonamenable" => {
            let m: usize = cfg.parse("m", 3)?;
            let p: usize = cfg.parse("p", 2)?;
            let n: usize = cfg.parse("n", 3)?;
            let depth: u32 = cfg.parse("depth", 3)?;
            let samples: usize = cfg.parse("samples", 50)?;
            let t = graph::tree_window(n + 1, depth)?;
            let ray = tree_ray(&t, depth)?;
            let f = toward_end_map(&t, &ray)?;
            let (map, nr) = aptolic_nonamenable(m, p, n, &t, &f, common.seed, samples)?;
            report.push(format!(
                "colour split {} = {}·{} against {} = {}·{}^{} over the {}-regular tree",
                m * p,
                m,
                p,
                m * p.pow(n as u32),
                m,
                p,
                n,
                n + 1
            ));
            report.push(format!(
                "displacement C = {}; inclusions: first {}, second {}",
                map.displacement, nr.inclusion_first, nr.inclusion_second
            ));
            report.push(format!(
                "Lipschitz ratios: up {:.3} ≤ {}, down {:.3} ≤ {}",
                nr.upper_ratio, nr.upper_bound, nr.lower_ratio, nr.lower_bound
            ));
            report.kv("samples", nr.samples);
            report.kv("ok", nr.ok);
            if !nr.ok {
                report.fail();
            }
        }
        "amenable" => {
            let q: usize = cfg.parse("q", 2)?;
            let a: u32 = cfg.parse("a", 1)?;
            let b: u32 = cfg.parse("b", 2)?;
            let pieces: usize = cfg.parse("pieces", 8)?;
            let samples: usize = cfg.parse("samples", 60)?;
            if a != 1 {
                return Err(CliError::Usage(
                    "only a=1 (pair partitions onto singletons) is wired up here".into(),
                ));
            }
            let x = graph::path_graph(pieces * b as usize);
            let y = graph::path_graph(pieces);
            let p_pieces: Vec<VertexSet> = (0..pieces)
                .map(|i| (0..b as usize).map(|j| b as usize * i + j).collect())
                .collect();
            let q_pieces: Vec<VertexSet> =
                y.vertices().map(|v| [v].into_iter().collect()).collect();
            let psi: Vec<usize> = (0..pieces).collect();
            let beta = QIMap::from_labels(&x, &y, (b as f64, 1.0), |lab| {
                let k: usize = lab.parse().ok()?;
                Some((k / b as usize).to_string())
            })?;
            let sigma: Vec<usize> = (0..q.pow(a * b)).collect();
            let spec = AmenableSpec {
                x: &x,
                y: &y,
                p_pieces: &p_pieces,
                q_pieces: &q_pieces,
                psi: &psi,
                beta: &beta,
                sigma: &sigma,
                q,
                a,
                b,
            };
            let support: Vec<usize> = (0..pieces.min(4)).collect();
            let (_, ar) =
                aptolic_amenable(&spec, &support, common.seed, samples, common.cap_states)?;
            report.push(format!(
                "partition map L_{}(path_{}) → L_{}(path_{})",
                q.pow(a),
                x.vertex_count(),
                q.pow(b),
                y.vertex_count()
            ));
            report.push(format!(
                "α bijective: {}; β fit ({:.1}, {:.1}); Hausdorff {} ≤ {}",
                ar.alpha_bijective,
                ar.beta_fit.0,
                ar.beta_fit.1,
                ar.hausdorff_max,
                ar.hausdorff_bound
            ));
            report.kv("ok", ar.ok);
            if !ar.ok {
                report.fail();
            }
        }
        other => {
            return Err(CliError::Usage(format!(
                "mode={:?} is not one of nonamenable, amenable",
                other
            )))
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// distortion
// ---------------------------------------------------------------------------

pub fn distortion(cfg: &JobConfig, common: &Common) -> Result<Report, CliError> {
    let ns: Vec<i64> = cfg.parse_list("n", "1,2,3")?;
    let rows = distortion_experiment(&ns, common.cap_states)?;
    let mut report = Report::new("distortion");
    let mut prev: Option<f64> = None;
    let mut monotone = true;
    let mut complete = true;
    for row in &rows {
        match (row.len_standard, row.len_subgroup) {
            (Some(s), Some(h)) => {
                let ratio = h as f64 / s as f64;
                report.push(format!(
                    "n = {}: standard length {}, subgroup length {}, ratio {:.3}",
                    row.n, s, h, ratio
                ));
                if let Some(p) = prev {
                    monotone &= ratio >= p;
                }
                prev = Some(ratio);
            }
            _ => {
                report.push(format!("n = {}: search hit its caps", row.n));
                complete = false;
            }
        }
    }
    report.kv("rows", rows.len());
    report.kv("ratio-nondecreasing", monotone);
    if !complete {
        report.verdict = Verdict::Unknown;
    } else if !monotone {
        report.fail();
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// ends
// ---------------------------------------------------------------------------

pub fn ends(cfg: &JobConfig, common: &Common) -> Result<Report, CliError> {
    let g = parse_graph(&cfg.str("graph", "line:8"), common.window)?;
    let center = g.vertex(&cfg.str("center", "0"))?;
    let radii: Vec<u32> = cfg.parse_list("radii", "1,2,3")?;
    let margin: u32 = cfg.parse("margin", 2)?;
    let reports = g.ends_profile(center, &radii, margin)?;
    let mut report = Report::new("ends");
    let mut deep_last = 0;
    for er in &reports {
        report.push(format!(
            "radius {}: {} components, {} deep",
            er.radius, er.components, er.deep_components
        ));
        deep_last = er.deep_components;
    }
    report.kv("deep-components", deep_last);
    Ok(report)
}
