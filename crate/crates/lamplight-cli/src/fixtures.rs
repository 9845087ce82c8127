//! Built-in fixture battery: small hand-checkable facts the library must
//! reproduce exactly. `lamplight fixtures` prints one PASS/FAIL line each.

use std::collections::HashMap;

use lamplight::amenability::{fiber_sizes, folner_boxes, toward_end_map};
use lamplight::graph::{self, Graph};
use lamplight::wreath::{cayley, distortion_experiment, dl_graph, psi_embed, WreathElement};
use lamplight::{VertexSet, WreathSpace};

use crate::commands::tree_ray;
use crate::config::JobConfig;
use crate::report::Report;
use crate::{CliError, Common};

/// The truncated cube, built by corner-cutting the 3-cube: one vertex
/// `(v, u)` per oriented cube edge, triangle edges around each corner and a
/// cut edge along each original cube edge.
pub fn truncated_cube() -> Graph {
    let mut cube: Vec<(u8, Vec<u8>)> = Vec::new();
    for v in 0u8..8 {
        let nbrs = (0..3).map(|b| v ^ (1 << b)).collect();
        cube.push((v, nbrs));
    }
    let mut g = Graph::new();
    g.name = Some("truncated-cube".into());
    let mut idx = HashMap::new();
    for (v, nbrs) in &cube {
        for u in nbrs {
            let i = g.add_vertex(&format!("{}-{}", v, u));
            idx.insert((*v, *u), i);
        }
    }
    for (v, nbrs) in &cube {
        // Triangle around the cut corner v.
        for (a, u1) in nbrs.iter().enumerate() {
            for u2 in &nbrs[a + 1..] {
                g.add_edge_idx(idx[&(*v, *u1)], idx[&(*v, *u2)]).unwrap();
            }
        }
        // Remainder of each original cube edge.
        for u in nbrs {
            if v < u {
                g.add_edge_idx(idx[&(*v, *u)], idx[&(*u, *v)]).unwrap();
            }
        }
    }
    g
}

fn full_window(w: &WreathSpace, cap: usize) -> Result<Graph, lamplight::Error> {
    let all: VertexSet = w.base.vertices().collect();
    Ok(w.materialize(&all, &all, cap)?.graph)
}

type Check = (&'static str, fn(&Common) -> Result<bool, CliError>);

fn check_c8(_: &Common) -> Result<bool, CliError> {
    let w = WreathSpace::new(graph::complete_graph(2), 0, graph::complete_graph(2))?;
    let g = full_window(&w, 100)?;
    Ok(g.isomorphic(&graph::cycle_graph(8), 10_000)?.is_iso())
}

fn check_truncated_cube(_: &Common) -> Result<bool, CliError> {
    let w = WreathSpace::lamplighter(2, graph::complete_graph(3))?;
    let g = full_window(&w, 100)?;
    let tc = truncated_cube();
    Ok(g.vertex_count() == 24
        && g.edge_count() == 36
        && g.vertices().all(|v| g.degree(v) == 3)
        && g.isomorphic(&tc, 1_000_000)?.is_iso())
}

fn check_cayley_cycle(_: &Common) -> Result<bool, CliError> {
    // Cayl(Z_2 ≀ Z_3, {a, t}) against the lamplighter graph L_2(C_3).
    let a = WreathElement::lamp_at(2, vec![3], &[0], 1);
    let t = WreathElement::shift(2, vec![3], &[1]);
    let cay = cayley(&[a, t], 0, 1000)?;
    let w = WreathSpace::lamplighter(2, graph::cycle_graph(3))?;
    let g = full_window(&w, 100)?;
    Ok(cay.isomorphic(&g, 1_000_000)?.is_iso())
}

fn check_psi_embedding(_: &Common) -> Result<bool, CliError> {
    // Radius-4 ball of Z_2 ≀ Z in the generators {t, at}: the embedding is
    // injective, levels sum to zero, and generator steps move both tree
    // coordinates by one.
    let a = WreathElement::lamp_at(2, vec![0], &[0], 1);
    let t = WreathElement::shift(2, vec![0], &[1]);
    let at = a.mul(&t)?;
    let mut gens = vec![t.clone(), t.inv(), at.clone(), at.inv()];
    gens.dedup();
    let id = WreathElement::identity(2, vec![0]);
    let mut ball = vec![id.clone()];
    let mut seen: HashMap<WreathElement, ()> = HashMap::from([(id, ())]);
    let mut head = 0;
    let mut frontier_end = ball.len();
    for _ in 0..4 {
        while head < frontier_end {
            let cur = ball[head].clone();
            head += 1;
            for s in &gens {
                let next = cur.mul(s)?;
                if !seen.contains_key(&next) {
                    seen.insert(next.clone(), ());
                    ball.push(next);
                }
            }
        }
        frontier_end = ball.len();
    }
    let mut images = HashMap::new();
    for e in &ball {
        let p = psi_embed(e)?;
        if p.left.level + p.right.level != 0 {
            return Ok(false);
        }
        if images.insert(p, e.clone()).is_some() {
            return Ok(false); // not injective
        }
    }
    for e in &ball {
        let pe = psi_embed(e)?;
        for s in &gens {
            let f = e.mul(s)?;
            let pf = psi_embed(&f)?;
            if !pe.left.adjacent(&pf.left) || !pe.right.adjacent(&pf.right) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn check_dist_example(common: &Common) -> Result<bool, CliError> {
    let w = WreathSpace::lamplighter(2, graph::line_window(4))?;
    let u = w.parse_vertex("{}@0")?;
    let v = w.parse_vertex("{-1:1,2:1}@0")?;
    Ok(w.lamp_distance(&u, &v, common.cap_heldkarp)? == 8)
}

fn check_distortion_rows(common: &Common) -> Result<bool, CliError> {
    let rows = distortion_experiment(&[1, 2], common.cap_states.max(500_000))?;
    Ok(rows[0].len_standard == Some(3)
        && rows[0].len_subgroup == Some(2)
        && rows[1].len_standard == Some(6)
        && rows[1].len_subgroup == Some(6))
}

fn check_folner_box(_: &Common) -> Result<bool, CliError> {
    let cert = folner_boxes(2, &[4])?;
    let e = &cert.entries[0];
    Ok(e.size == 16 && e.boundary == 16)
}

fn check_toward_end_fibers(_: &Common) -> Result<bool, CliError> {
    let t = graph::tree_window(4, 3)?;
    let ray = tree_ray(&t, 3)?;
    let f = toward_end_map(&t, &ray)?;
    let rim = t.window.as_ref().unwrap().rim.clone();
    let fibers = fiber_sizes(&f);
    Ok(t.vertices()
        .filter(|v| !rim.contains(v) && t.neighbors(*v).iter().all(|u| !rim.contains(u)))
        .all(|v| fibers.get(&v).copied().unwrap_or(0) == 3))
}

fn check_dl_degrees(_: &Common) -> Result<bool, CliError> {
    let g = dl_graph(2, 2, 100_000)?;
    let rim = g.window.as_ref().unwrap().rim.clone();
    Ok(g.vertices().filter(|v| !rim.contains(v)).all(|v| g.degree(v) == 4))
}

pub fn run(cfg: &JobConfig, common: &Common) -> Result<Report, CliError> {
    let checks: Vec<Check> = vec![
        ("wreath-of-k2-is-c8", check_c8),
        ("l2k3-is-truncated-cube", check_truncated_cube),
        ("cayley-matches-lamplighter", check_cayley_cycle),
        ("horocyclic-embedding", check_psi_embedding),
        ("distance-example", check_dist_example),
        ("distortion-word-lengths", check_distortion_rows),
        ("folner-box-boundary", check_folner_box),
        ("toward-end-fibers", check_toward_end_fibers),
        ("dl-window-degrees", check_dl_degrees),
    ];
    let only = cfg.get("only").map(str::to_string);
    let mut report = Report::new("fixtures");
    let mut failed = 0usize;
    let mut ran = 0usize;
    for (name, f) in checks {
        if let Some(only) = &only {
            if only != name {
                continue;
            }
        }
        ran += 1;
        let ok = f(common)?;
        report.push(format!("{} {}", if ok { "PASS" } else { "FAIL" }, name));
        if !ok {
            failed += 1;
        }
    }
    if ran == 0 {
        return Err(CliError::Usage(format!(
            "only={:?} matches no fixture",
            only.unwrap_or_default()
        )));
    }
    report.kv("ran", ran);
    report.kv("failed", failed);
    if failed > 0 {
        report.fail();
    }
    Ok(report)
}
