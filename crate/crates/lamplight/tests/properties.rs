//! Property-based tests: structural laws that must hold for all inputs,
//! checked on randomized instances small enough for exact oracles.

use proptest::prelude::*;

use lamplight::amenability::{folner_boxes, quasi_inverse, QIMap};
use lamplight::graph::{cycle_graph, grid_window, line_window, path_graph};
use lamplight::homotopy::{coarse_homotopic, is_coarsely_trivial, replay, HomotopyVerdict, PathSeq};
use lamplight::leaves::{col_add, col_sub, Leaf};
use lamplight::wreath::{transport_bilip, WreathElement};
use lamplight::{Colouring, LampVertex, VertexSet, WreathSpace};

const HK: usize = 20;

fn line_space() -> WreathSpace {
    WreathSpace::lamplighter(2, line_window(4)).unwrap()
}

/// A lamp vertex of `L_2(line:4)` from a small support list and an arrow.
fn vertex(w: &WreathSpace, support: &[i64], arrow: i64) -> LampVertex {
    let mut c = Colouring::empty();
    for &k in support {
        c.set(w.base.vertex(&k.to_string()).unwrap(), 1, 0);
    }
    LampVertex::new(c, w.base.vertex(&arrow.to_string()).unwrap())
}

fn small_support() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-4i64..=4, 0..=4)
}

fn arrow() -> impl Strategy<Value = i64> {
    -4i64..=4
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    // -----------------------------------------------------------------
    // Metric laws of the TS distance
    // -----------------------------------------------------------------

    #[test]
    fn distance_is_a_metric(su in small_support(), sv in small_support(),
                            sw in small_support(),
                            au in arrow(), av in arrow(), aw in arrow()) {
        let sp = line_space();
        let u = vertex(&sp, &su, au);
        let v = vertex(&sp, &sv, av);
        let w = vertex(&sp, &sw, aw);
        let duv = sp.lamp_distance(&u, &v, HK).unwrap();
        prop_assert_eq!(duv, sp.lamp_distance(&v, &u, HK).unwrap());
        prop_assert_eq!(duv == 0, u == v);
        let duw = sp.lamp_distance(&u, &w, HK).unwrap();
        let dvw = sp.lamp_distance(&v, &w, HK).unwrap();
        prop_assert!(duw <= duv + dvw);
    }

    #[test]
    fn geodesics_realize_the_distance(su in small_support(), sv in small_support(),
                                      au in arrow(), av in arrow()) {
        let sp = line_space();
        let u = vertex(&sp, &su, au);
        let v = vertex(&sp, &sv, av);
        let d = sp.lamp_distance(&u, &v, HK).unwrap();
        let path = sp.lamp_geodesic(&u, &v, HK).unwrap();
        prop_assert_eq!(path.len() as u32, d + 1);
        prop_assert_eq!(path.first(), Some(&u));
        prop_assert_eq!(path.last(), Some(&v));
        for pair in path.windows(2) {
            prop_assert!(sp.neighbors(&pair[0]).unwrap().contains(&pair[1]));
        }
    }

    #[test]
    fn ts_path_matches_brute_force(visits in prop::collection::btree_set(-4i64..=4, 0..=4),
                                   start in arrow(), end in arrow()) {
        let g = line_window(4);
        let idx = |k: i64| g.vertex(&k.to_string()).unwrap();
        let s = idx(start);
        let t = idx(end);
        let must: VertexSet = visits.iter().map(|&k| idx(k)).collect();
        let sp = WreathSpace::lamplighter(2, g.clone()).unwrap();
        let (got, order) = sp.ts_path(s, &must, t, HK).unwrap();
        // The reported visiting order must realize the reported length.
        let mut along = 0;
        let mut cur = s;
        for &q in order.iter().chain(std::iter::once(&t)) {
            along += g.distance(cur, q).unwrap();
            cur = q;
        }
        prop_assert_eq!(along, got);
        // Exhaustive minimum over all visiting orders.
        let mut pool: Vec<usize> = must.iter().copied().collect();
        let mut best = u32::MAX;
        permute(&mut pool, 0, &mut |perm| {
            let mut len = 0;
            let mut cur = s;
            for &q in perm.iter().chain(std::iter::once(&t)) {
                len += g.distance(cur, q).unwrap();
                cur = q;
            }
            best = best.min(len);
        });
        prop_assert_eq!(got, best);
    }

    // -----------------------------------------------------------------
    // Group laws for wreath elements over Z
    // -----------------------------------------------------------------

    #[test]
    fn wreath_group_laws(wx in word(), wy in word(), wz in word()) {
        let x = eval(&wx);
        let y = eval(&wy);
        let z = eval(&wz);
        let left = x.mul(&y).unwrap().mul(&z).unwrap();
        let right = x.mul(&y.mul(&z).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        prop_assert!(x.mul(&x.inv()).unwrap().is_identity());
        let inv_of_prod = x.mul(&y).unwrap().inv();
        prop_assert_eq!(inv_of_prod, y.inv().mul(&x.inv()).unwrap());
    }

    // -----------------------------------------------------------------
    // Cardinality of full windows
    // -----------------------------------------------------------------

    #[test]
    fn full_window_cardinality(n in 2usize..=3, k in 1usize..=3) {
        let sp = WreathSpace::lamplighter(n, path_graph(k)).unwrap();
        let all: VertexSet = sp.base.vertices().collect();
        let mat = sp.materialize(&all, &all, 100_000).unwrap();
        prop_assert_eq!(mat.graph.vertex_count(), n.pow(k as u32) * k);
    }

    // -----------------------------------------------------------------
    // Transport along window symmetries is an isometry
    // -----------------------------------------------------------------

    #[test]
    fn reversal_transport_is_isometric(su in prop::collection::vec(-3i64..=3, 0..=3),
                                       sv in prop::collection::vec(-3i64..=3, 0..=3),
                                       au in -3i64..=3, av in -3i64..=3) {
        let sp = WreathSpace::lamplighter(2, line_window(3)).unwrap();
        let alpha: Vec<usize> = (0..sp.lamp.vertex_count()).collect();
        let beta: Vec<usize> = sp
            .base
            .vertices()
            .map(|i| {
                let k: i64 = sp.base.label(i).parse().unwrap();
                sp.base.vertex(&(-k).to_string()).unwrap()
            })
            .collect();
        let t = transport_bilip(&alpha, &beta, &sp, &sp).unwrap();
        let u = vertex(&sp, &su, au);
        let v = vertex(&sp, &sv, av);
        prop_assert_eq!(
            sp.lamp_distance(&u, &v, HK).unwrap(),
            sp.lamp_distance(&t.apply(&u), &t.apply(&v), HK).unwrap()
        );
    }

    // -----------------------------------------------------------------
    // Move scripts are sound and replayable
    // -----------------------------------------------------------------

    #[test]
    fn out_and_back_loops_are_trivial_and_scripts_replay(
            start in 0usize..6, steps in prop::collection::vec(prop::bool::ANY, 1..=3),
            e in 1u32..=2) {
        let g = path_graph(6);
        let mut verts = vec![start];
        for &right in &steps {
            let cur = *verts.last().unwrap();
            let next = if right { (cur + 1).min(5) } else { cur.saturating_sub(1) };
            if next != cur {
                verts.push(next);
            }
        }
        let mut back: Vec<usize> = verts[..verts.len() - 1].to_vec();
        back.reverse();
        verts.extend(back);
        let lp = PathSeq::new(&g, verts).unwrap();
        let verdict = is_coarsely_trivial(&g, &lp, e, lp.len() + 2, 100_000).unwrap();
        match verdict {
            HomotopyVerdict::Yes(script) => {
                let end = replay(&g, &lp, &script, e).unwrap();
                prop_assert_eq!(end.verts(), &[lp.start()]);
            }
            other => prop_assert!(false, "expected Yes, got {:?}", other),
        }
    }

    // -----------------------------------------------------------------
    // Coarse equivalence is monotone in the scale
    // -----------------------------------------------------------------

    #[test]
    fn triviality_is_monotone_in_e(shift in 0usize..6, e in 1u32..=2,
                                   wobble in prop::collection::vec(prop::bool::ANY, 0..=2)) {
        // A zero-winding loop on a 6-cycle: out along the wobbles, back again.
        let g = cycle_graph(6);
        let mut verts = vec![shift];
        for &fwd in &wobble {
            let cur = *verts.last().unwrap();
            verts.push(if fwd { (cur + 1) % 6 } else { (cur + 5) % 6 });
        }
        let mut back: Vec<usize> = verts[..verts.len() - 1].to_vec();
        back.reverse();
        verts.extend(back);
        let lp = PathSeq::new(&g, verts).unwrap();
        let at_e = is_coarsely_trivial(&g, &lp, e, lp.len() + 4, 100_000).unwrap();
        let at_e1 = is_coarsely_trivial(&g, &lp, e + 1, lp.len() + 4, 100_000).unwrap();
        // A definite Yes may never turn into a definite No at a larger scale.
        prop_assert!(
            !(matches!(at_e, HomotopyVerdict::Yes(_)) && at_e1 == HomotopyVerdict::No),
            "Yes at {} but No at {}", e, e + 1
        );
    }

    // -----------------------------------------------------------------
    // Colouring arithmetic and the leaf partition
    // -----------------------------------------------------------------

    #[test]
    fn colour_arithmetic_round_trips(xs in prop::collection::vec((0usize..3, 1usize..3), 0..=3),
                                     ys in prop::collection::vec((0usize..3, 1usize..3), 0..=3)) {
        let sp = WreathSpace::lamplighter(3, path_graph(3)).unwrap();
        let build = |entries: &[(usize, usize)]| {
            let mut c = Colouring::empty();
            for &(v, val) in entries {
                c.set(v, val, 0);
            }
            c
        };
        let x = build(&xs);
        let y = build(&ys);
        let sum = col_add(&sp, &x, &y).unwrap();
        prop_assert_eq!(col_sub(&sp, &sum, &y).unwrap(), x.clone());
        prop_assert_eq!(col_add(&sp, &x, &Colouring::empty()).unwrap(), x);
    }

    // -----------------------------------------------------------------
    // Box Folner ratios
    // -----------------------------------------------------------------

    #[test]
    fn folner_box_ratio_is_2d_over_n(d in 1usize..=3, n in 1i64..=6) {
        let cert = folner_boxes(d, &[n]).unwrap();
        let e = &cert.entries[0];
        // boundary / size == 2 d / n, exactly, as an identity of integers.
        prop_assert_eq!(e.boundary * n as u64, e.size * 2 * d as u64);
    }

    // -----------------------------------------------------------------
    // Boundary and thickening laws
    // -----------------------------------------------------------------

    #[test]
    fn boundary_thicken_laws(mask in 1u32..(1 << 25), r in 0u32..=3) {
        let g = grid_window(2, 2).unwrap(); // 25 vertices
        let s: VertexSet = (0..25).filter(|i| mask & (1 << i) != 0).collect();
        let b = g.boundary(&s);
        prop_assert!(b.is_disjoint(&s), "outer boundary avoids the set");
        let t1 = g.thicken(&s, 1);
        let union: VertexSet = s.union(&b).copied().collect();
        prop_assert_eq!(t1, union);
        let tr = g.thicken(&s, r);
        let tr1 = g.thicken(&s, r + 1);
        prop_assert!(tr.is_subset(&tr1));
        prop_assert!(s.is_subset(&tr));
    }

    // -----------------------------------------------------------------
    // Quasi-inverses compose to within the affine bound
    // -----------------------------------------------------------------

    #[test]
    fn quasi_inverse_composite_is_close_to_identity(stride in 1i64..=3) {
        let src = line_window(15 / stride);
        let dst = line_window(15);
        let f = QIMap::from_labels(&src, &dst, (stride as f64, 1.0), |lab| {
            let k: i64 = lab.parse().ok()?;
            Some((stride * k).to_string())
        })
        .unwrap();
        let g = quasi_inverse(&src, &dst, &f).unwrap();
        let bound = 3 * stride as u32 * 1;
        for x in src.vertices() {
            let round = g.apply(f.apply(x).unwrap()).unwrap();
            prop_assert!(src.distance(x, round).unwrap() <= bound);
        }
    }
}

/// All-permutations helper for the TS brute force.
fn permute(xs: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == xs.len() {
        f(xs);
        return;
    }
    for i in k..xs.len() {
        xs.swap(k, i);
        permute(xs, k + 1, f);
        xs.swap(k, i);
    }
}

/// Short random words in the generators of `Z_2 wr Z`.
#[derive(Debug, Clone)]
enum Letter {
    Lamp(i64),
    Shift(i64),
}

fn word() -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec(
        prop_oneof![
            (-3i64..=3).prop_map(Letter::Lamp),
            prop_oneof![Just(-1i64), Just(1)].prop_map(Letter::Shift),
        ],
        0..=6,
    )
}

fn eval(wd: &[Letter]) -> WreathElement {
    let mut acc = WreathElement::identity(2, vec![0]);
    for l in wd {
        let g = match l {
            Letter::Lamp(p) => WreathElement::lamp_at(2, vec![0], &[*p], 1),
            Letter::Shift(d) => WreathElement::shift(2, vec![0], &[*d]),
        };
        acc = acc.mul(&g).unwrap();
    }
    acc
}

// ---------------------------------------------------------------------------
// Non-proptest structural checks that enumerate exhaustively
// ---------------------------------------------------------------------------

#[test]
fn leaves_partition_the_full_window() {
    let sp = WreathSpace::lamplighter(2, path_graph(3)).unwrap();
    let all: VertexSet = sp.base.vertices().collect();
    let mat = sp.materialize(&all, &all, 100_000).unwrap();
    let mut by_leaf: std::collections::HashMap<Vec<(usize, usize)>, usize> =
        std::collections::HashMap::new();
    for v in &mat.verts {
        let key: Vec<(usize, usize)> = v.colouring.entries().collect();
        *by_leaf.entry(key).or_default() += 1;
        let leaf = Leaf::new(v.colouring.clone());
        assert!(leaf.contains(v));
        assert_eq!(lamplight::leaves::dist_to_leaf(&sp, v, &leaf).unwrap(), 0);
    }
    assert_eq!(by_leaf.len(), 8, "2^3 colourings");
    assert!(by_leaf.values().all(|&n| n == 3), "one arrow slot per base vertex");
}

#[test]
fn equivalent_paths_reach_each_other_symmetrically() {
    // coarse_homotopic is symmetric: p ~ q iff q ~ p on a small instance.
    let g = cycle_graph(6);
    let p = PathSeq::new(&g, vec![0, 1, 2, 3]).unwrap();
    let q = PathSeq::new(&g, vec![0, 5, 4, 3]).unwrap();
    for e in [1u32, 3] {
        let fwd = coarse_homotopic(&g, &p, &q, e, 10, 100_000).unwrap();
        let bwd = coarse_homotopic(&g, &q, &p, e, 10, 100_000).unwrap();
        assert_eq!(
            matches!(fwd, HomotopyVerdict::Yes(_)),
            matches!(bwd, HomotopyVerdict::Yes(_)),
            "e = {}",
            e
        );
    }
}
