//! Crossing-count reduction by local moves.
//!
//! Faces of the diagram (traced from the rotation system implied by crossing
//! signs) drive three moves: curl removal at monogon faces, strand
//! separation at bigon faces where one strand stays on top, and triangle
//! slides applied only when they unlock one of the first two. A fourth,
//! non-local move detaches any component that passes on one side of every
//! other component. The output is always a diagram of the same link; no
//! claim of minimality is made.

use super::{rebuild, Crossing, EdgeId, LinkDiagram, Pass};

/// A directed traversal of one arc: `true` runs along the orientation.
type Dart = (EdgeId, bool);

/// Arc role at a crossing slot.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Role {
    In,
    Out,
}

/// The four (arc, role) slots counterclockwise, matching
/// [`Crossing::cyclic_edges`].
fn slots(c: &Crossing) -> [(EdgeId, Role); 4] {
    if c.sign > 0 {
        [
            (c.under_in, Role::In),
            (c.over_out, Role::Out),
            (c.under_out, Role::Out),
            (c.over_in, Role::In),
        ]
    } else {
        [
            (c.under_in, Role::In),
            (c.over_in, Role::In),
            (c.under_out, Role::Out),
            (c.over_out, Role::Out),
        ]
    }
}

fn pass_pair(c: &Crossing, pass: Pass) -> (EdgeId, EdgeId) {
    match pass {
        Pass::Under => (c.under_in, c.under_out),
        Pass::Over => (c.over_in, c.over_out),
    }
}

fn set_pass_pair(c: &mut Crossing, pass: Pass, pair: (EdgeId, EdgeId)) {
    match pass {
        Pass::Under => {
            c.under_in = pair.0;
            c.under_out = pair.1;
        }
        Pass::Over => {
            c.over_in = pair.0;
            c.over_out = pair.1;
        }
    }
}

/// All faces as cyclic dart lists. Crossing-free circles bound no darts and
/// are skipped.
fn faces(d: &LinkDiagram) -> Vec<Vec<Dart>> {
    let inc = d.incidence().expect("validated diagram");
    let crossings = d.crossings();
    let next = |(e, fwd): Dart| -> Dart {
        let (ci, _) = if fwd { inc.head[e].unwrap() } else { inc.tail[e].unwrap() };
        let want = (e, if fwd { Role::In } else { Role::Out });
        let sl = slots(&crossings[ci]);
        let s = sl.iter().position(|&x| x == want).expect("arc sits in its crossing");
        let (f, role) = sl[(s + 1) % 4];
        (f, role == Role::Out)
    };
    let mut seen = vec![[false; 2]; d.n_edges()];
    let mut out = Vec::new();
    for e in 0..d.n_edges() {
        if inc.head[e].is_none() {
            continue;
        }
        for fwd in [true, false] {
            if seen[e][fwd as usize] {
                continue;
            }
            let mut face = Vec::new();
            let mut dart = (e, fwd);
            loop {
                if seen[dart.0][dart.1 as usize] {
                    break;
                }
                seen[dart.0][dart.1 as usize] = true;
                face.push(dart);
                dart = next(dart);
            }
            out.push(face);
        }
    }
    out
}

/// Applies the first available monogon or removable bigon reduction.
fn reduce_once(d: &LinkDiagram) -> Option<LinkDiagram> {
    let inc = d.incidence().expect("validated diagram");
    let comp_of = d.component_map();
    for face in faces(d) {
        match face.as_slice() {
            [(e, _)] => {
                // A curl: the arc loops from a crossing back to itself and
                // bounds an empty disk.
                let (ci, head_pass) = inc.head[*e].unwrap();
                let c = d.crossings()[ci];
                let splice = match head_pass {
                    Pass::Over => (c.under_in, c.over_out),
                    Pass::Under => (c.over_in, c.under_out),
                };
                let mut crossings = d.crossings().to_vec();
                crossings.remove(ci);
                let mut keep = vec![true; d.n_edges()];
                keep[*e] = false;
                return Some(
                    rebuild(crossings, &keep, &[splice], None, Some(&comp_of))
                        .expect("curl removal is closed"),
                );
            }
            [(ea, _), (eb, _)] => {
                let (ea, eb) = (*ea, *eb);
                if ea == eb {
                    continue;
                }
                let (c1, pa1) = inc.tail[ea].unwrap();
                let (c2, pa2) = inc.head[ea].unwrap();
                let (_, pb1) = inc.tail[eb].unwrap();
                let (_, pb2) = inc.head[eb].unwrap();
                if c1 == c2 {
                    continue;
                }
                // One arc rides over at both corners while the other stays
                // under: the two strands pull apart.
                let over_under = pa1 == Pass::Over && pa2 == Pass::Over
                    && pb1 == Pass::Under
                    && pb2 == Pass::Under;
                let under_over = pa1 == Pass::Under && pa2 == Pass::Under
                    && pb1 == Pass::Over
                    && pb2 == Pass::Over;
                if !(over_under || under_over) {
                    continue;
                }
                let mut unions = Vec::new();
                for (pass, skip) in [
                    (if over_under { Pass::Over } else { Pass::Under }, ea),
                    (if over_under { Pass::Under } else { Pass::Over }, eb),
                ] {
                    let mut outer = Vec::new();
                    for ci in [c1, c2] {
                        let (i, o) = pass_pair(&d.crossings()[ci], pass);
                        outer.push(if i == skip { o } else { i });
                    }
                    unions.push((outer[0], outer[1]));
                }
                let mut crossings = d.crossings().to_vec();
                let (hi, lo) = (c1.max(c2), c1.min(c2));
                crossings.remove(hi);
                crossings.remove(lo);
                let mut keep = vec![true; d.n_edges()];
                keep[ea] = false;
                keep[eb] = false;
                return Some(
                    rebuild(crossings, &keep, &unions, None, Some(&comp_of))
                        .expect("bigon removal is closed"),
                );
            }
            _ => {}
        }
    }
    None
}

/// Detaches a component that stays on one side of everything else: if every
/// crossing between component `k` and the rest has `k` underneath (or every
/// one has `k` on top), the whole component can be pushed past the rest of
/// the diagram and its mutual crossings deleted. Self-crossings of `k` are
/// kept; they reduce on their own afterwards if they can.
fn separate_component(d: &LinkDiagram) -> Option<LinkDiagram> {
    let comp_of = d.component_map();
    for k in 0..d.n_components() {
        let mut mutual = Vec::new();
        let mut passes = Vec::new();
        for (ci, c) in d.crossings().iter().enumerate() {
            let under_is_k = comp_of[c.under_in] == k;
            let over_is_k = comp_of[c.over_in] == k;
            if under_is_k != over_is_k {
                mutual.push(ci);
                passes.push(if under_is_k { Pass::Under } else { Pass::Over });
            }
        }
        if mutual.is_empty() || !passes.iter().all(|&p| p == passes[0]) {
            continue;
        }
        let mut crossings = d.crossings().to_vec();
        let mut unions = Vec::new();
        for &ci in mutual.iter().rev() {
            let c = crossings.remove(ci);
            unions.push((c.under_in, c.under_out));
            unions.push((c.over_in, c.over_out));
        }
        let keep = vec![true; d.n_edges()];
        return Some(
            rebuild(crossings, &keep, &unions, None, Some(&comp_of))
                .expect("component separation is closed"),
        );
    }
    None
}

/// Triangle slides that would let a monogon or bigon reduction fire next.
fn triangle_slides(d: &LinkDiagram) -> Vec<LinkDiagram> {
    let inc = d.incidence().expect("validated diagram");
    let mut out = Vec::new();
    for face in faces(d) {
        let [da, db, dc] = match face.as_slice() {
            [a, b, c] => [*a, *b, *c],
            _ => continue,
        };
        let edges = [da.0, db.0, dc.0];
        if edges[0] == edges[1] || edges[1] == edges[2] || edges[0] == edges[2] {
            continue;
        }
        let ends: Vec<((usize, Pass), (usize, Pass))> =
            edges.iter().map(|&e| (inc.tail[e].unwrap(), inc.head[e].unwrap())).collect();
        let mut xs: Vec<usize> = ends.iter().flat_map(|&((t, _), (h, _))| [t, h]).collect();
        xs.sort_unstable();
        xs.dedup();
        if xs.len() != 3 {
            continue;
        }
        // A slide needs a side that rides over both others.
        let Some(top) = (0..3).find(|&i| ends[i].0 .1 == Pass::Over && ends[i].1 .1 == Pass::Over)
        else {
            continue;
        };
        let (x_start, x_end) = (ends[top].0 .0, ends[top].1 .0);
        let far = *xs.iter().find(|&&x| x != x_start && x != x_end).unwrap();
        let mut crossings = d.crossings().to_vec();
        // Sliding the top strand across the far crossing exchanges, along
        // each of the two lower strands, which of its two crossings sits
        // between which arcs. Arc order along every strand is unchanged.
        let mut ok = true;
        for other in (0..3).filter(|&i| i != top) {
            let (ot, oh) = ends[other];
            let near = if ot.0 == far { oh } else { ot };
            let far_pass = if ot.0 == far { ot.1 } else { oh.1 };
            if near.0 == far {
                ok = false;
                break;
            }
            let near_pair = pass_pair(&crossings[near.0], near.1);
            let far_pair = pass_pair(&crossings[far], far_pass);
            set_pass_pair(&mut crossings[near.0], near.1, far_pair);
            set_pass_pair(&mut crossings[far], far_pass, near_pair);
        }
        if !ok {
            continue;
        }
        let slid = LinkDiagram {
            crossings,
            components: d.components().to_vec(),
            framing_kinks: d.framing_kinks().to_vec(),
            n_edges: d.n_edges(),
        };
        if slid.validate().is_ok() {
            out.push(slid);
        }
    }
    out
}

/// Greedy reduction: monogons and removable bigons first, then one-sided
/// component separation, then triangle slides with one move of lookahead. At
/// most `budget` moves are applied.
pub fn simplify(d: &LinkDiagram, budget: usize) -> LinkDiagram {
    let mut d = d.clone();
    let mut moves = 0;
    'outer: while moves < budget {
        if let Some(next) = reduce_once(&d) {
            d = next;
            moves += 1;
            continue;
        }
        if let Some(next) = separate_component(&d) {
            d = next;
            moves += 1;
            continue;
        }
        for slid in triangle_slides(&d) {
            if moves + 1 < budget {
                if let Some(next) = reduce_once(&slid) {
                    d = next;
                    moves += 2;
                    continue 'outer;
                }
            }
        }
        break;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::super::hopf_link;
    use super::*;

    fn unknot() -> LinkDiagram {
        LinkDiagram::from_parts(Vec::new(), vec![vec![0]]).unwrap()
    }

    #[test]
    fn face_count_satisfies_euler_formula() {
        // V - E + F = 2 for a connected diagram.
        let d = hopf_link(1);
        assert_eq!(faces(&d).len(), 4);
    }

    #[test]
    fn curls_unwind() {
        let mut d = unknot();
        for sign in [1, -1, 1, 1] {
            d = d.add_kink(0, sign).unwrap();
        }
        let s = simplify(&d, 100);
        assert_eq!(s.n_crossings(), 0);
        assert_eq!(s.n_components(), 1);
    }

    #[test]
    fn switched_hopf_pulls_apart() {
        let d = hopf_link(1).switch_crossings(&[0]).unwrap();
        let s = simplify(&d, 100);
        assert_eq!(s.n_crossings(), 0);
        assert_eq!(s.n_components(), 2);
    }

    #[test]
    fn hopf_is_already_minimal() {
        let d = hopf_link(1);
        assert_eq!(simplify(&d, 100), d);
    }

    #[test]
    fn budget_zero_is_identity() {
        let d = unknot().add_kink(0, 1).unwrap();
        assert_eq!(simplify(&d, 0), d);
    }

    #[test]
    fn one_sided_component_detaches() {
        // One component rides under everything: two mutual crossings of the
        // same sign form a clasp-shaped bigon no Reidemeister-II move kills,
        // yet the under strand pulls free, leaving the other's kink to unwind.
        let d = LinkDiagram::from_gauss_code("O3+ O2- O1- U2- ; U3+ U1-").unwrap();
        let s = simplify(&d, 100);
        assert_eq!(s.n_crossings(), 0);
        assert_eq!(s.n_components(), 2);
    }

    #[test]
    fn linked_components_do_not_detach() {
        let d = hopf_link(1);
        assert!(separate_component(&d).is_none());
    }

    #[test]
    fn mixed_bigon_is_a_clasp_and_stays() {
        // Two crossings where each strand goes over once: not removable.
        let d = LinkDiagram::from_parts(
            vec![
                Crossing { under_in: 0, under_out: 1, over_in: 2, over_out: 3, sign: 1 },
                Crossing { under_in: 3, under_out: 2, over_in: 1, over_out: 0, sign: -1 },
            ],
            vec![vec![0, 1], vec![2, 3]],
        )
        .unwrap();
        let s = simplify(&d, 100);
        assert_eq!(s.n_crossings(), 2);
    }
}
