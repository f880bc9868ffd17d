//! Oriented link diagrams as combinatorial crossing lists.
//!
//! A diagram stores, per crossing, the four incident arcs split by strand
//! role (under/over, incoming/outgoing) plus the crossing sign, and the
//! partition of arcs into oriented component cycles. This is exactly the
//! data of a signed Gauss code; inputs are assumed to be realizable in the
//! plane, which is true for everything built here from braid closures.

use serde::{Deserialize, Serialize};
use thiserror::Error;

mod codes;
mod simplify;

pub use codes::{GaussCodeError, PdCode, PdCodeError};
pub use simplify::simplify;

pub type EdgeId = usize;

/// Which strand of a crossing an arc belongs to.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Pass {
    Under,
    Over,
}

/// One transverse double point. The four arcs are keyed by strand role;
/// `sign` records the handedness given the component orientations, so the
/// planar cyclic order around the crossing is `(under_in, over_out,
/// under_out, over_in)` counterclockwise for `sign = +1` and `(under_in,
/// over_in, under_out, over_out)` for `sign = -1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Crossing {
    pub under_in: EdgeId,
    pub under_out: EdgeId,
    pub over_in: EdgeId,
    pub over_out: EdgeId,
    pub sign: i8,
}

impl Crossing {
    /// Over and under strands exchanged; the sign flips because the
    /// orientations stay put while the handedness mirrors.
    pub fn switched(&self) -> Crossing {
        Crossing {
            under_in: self.over_in,
            under_out: self.over_out,
            over_in: self.under_in,
            over_out: self.under_out,
            sign: -self.sign,
        }
    }

    /// The four arcs counterclockwise starting at the incoming under arc.
    pub fn cyclic_edges(&self) -> [EdgeId; 4] {
        if self.sign > 0 {
            [self.under_in, self.over_out, self.under_out, self.over_in]
        } else {
            [self.under_in, self.over_in, self.under_out, self.over_out]
        }
    }

    fn in_edge(&self, pass: Pass) -> EdgeId {
        match pass {
            Pass::Under => self.under_in,
            Pass::Over => self.over_in,
        }
    }

    fn out_edge(&self, pass: Pass) -> EdgeId {
        match pass {
            Pass::Under => self.under_out,
            Pass::Over => self.over_out,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiagramError {
    #[error("crossing {crossing} references arc {edge} outside the diagram")]
    UnknownEdge { crossing: usize, edge: usize },
    #[error("crossing {0} has sign {1}; expected +1 or -1")]
    BadSign(usize, i8),
    #[error("arc {0} is wired into {1} incoming slots; every arc needs exactly one head or none")]
    HeadCount(usize, usize),
    #[error("arc {0} is wired into {1} outgoing slots; every arc needs exactly one tail or none")]
    TailCount(usize, usize),
    #[error("arc {0} has a head but no tail, or the reverse")]
    HalfOpenArc(usize),
    #[error("components do not partition the arcs")]
    BadComponents,
    #[error("component {comp} breaks orientation at arc {edge}")]
    BrokenCycle { comp: usize, edge: usize },
    #[error("unknown crossing id {0}")]
    UnknownCrossing(usize),
    #[error("component index {0} out of range")]
    UnknownComponent(usize),
    #[error("cannot delete every component")]
    EmptySublink,
}

/// An oriented link diagram. Components are cycles of arc ids listed in
/// orientation order; `framing_kinks` counts curls added on purpose by
/// [`LinkDiagram::zero_frame`] and is bookkeeping only.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LinkDiagram {
    crossings: Vec<Crossing>,
    components: Vec<Vec<EdgeId>>,
    framing_kinks: Vec<usize>,
    n_edges: usize,
}

/// Arc incidence maps derived from the crossing list.
pub(crate) struct Incidence {
    /// Arc -> crossing and pass consuming it.
    pub head: Vec<Option<(usize, Pass)>>,
    /// Arc -> crossing and pass emitting it.
    pub tail: Vec<Option<(usize, Pass)>>,
}

impl Incidence {
    fn scan(crossings: &[Crossing], n_edges: usize) -> Result<Incidence, DiagramError> {
        let mut head_count = vec![0usize; n_edges];
        let mut tail_count = vec![0usize; n_edges];
        let mut head = vec![None; n_edges];
        let mut tail = vec![None; n_edges];
        for (ci, c) in crossings.iter().enumerate() {
            for pass in [Pass::Under, Pass::Over] {
                let e_in = c.in_edge(pass);
                let e_out = c.out_edge(pass);
                for e in [e_in, e_out] {
                    if e >= n_edges {
                        return Err(DiagramError::UnknownEdge { crossing: ci, edge: e });
                    }
                }
                head_count[e_in] += 1;
                head[e_in] = Some((ci, pass));
                tail_count[e_out] += 1;
                tail[e_out] = Some((ci, pass));
            }
        }
        for e in 0..n_edges {
            if head_count[e] > 1 {
                return Err(DiagramError::HeadCount(e, head_count[e]));
            }
            if tail_count[e] > 1 {
                return Err(DiagramError::TailCount(e, tail_count[e]));
            }
            if (head_count[e] == 0) != (tail_count[e] == 0) {
                return Err(DiagramError::HalfOpenArc(e));
            }
        }
        Ok(Incidence { head, tail })
    }
}

impl LinkDiagram {
    /// Builds and validates a diagram from explicit parts. Arc ids must be
    /// exactly `0..total` where `total` is the number of arcs listed across
    /// `components`.
    pub fn from_parts(
        crossings: Vec<Crossing>,
        components: Vec<Vec<EdgeId>>,
    ) -> Result<LinkDiagram, DiagramError> {
        let n_edges = components.iter().map(|c| c.len()).sum();
        let framing_kinks = vec![0; components.len()];
        let d = LinkDiagram { crossings, components, framing_kinks, n_edges };
        d.validate()?;
        Ok(d)
    }

    fn validate(&self) -> Result<(), DiagramError> {
        for (ci, c) in self.crossings.iter().enumerate() {
            if c.sign != 1 && c.sign != -1 {
                return Err(DiagramError::BadSign(ci, c.sign));
            }
        }
        let inc = self.incidence()?;
        let mut seen = vec![false; self.n_edges];
        for (comp_idx, comp) in self.components.iter().enumerate() {
            if comp.is_empty() {
                return Err(DiagramError::BadComponents);
            }
            for (k, &e) in comp.iter().enumerate() {
                if e >= self.n_edges || seen[e] {
                    return Err(DiagramError::BadComponents);
                }
                seen[e] = true;
                let succ = comp[(k + 1) % comp.len()];
                match inc.head[e] {
                    // The arc after e must leave the crossing e enters, on
                    // the same strand.
                    Some((ci, pass)) => {
                        if self.crossings[ci].out_edge(pass) != succ {
                            return Err(DiagramError::BrokenCycle { comp: comp_idx, edge: e });
                        }
                    }
                    None => {
                        if comp.len() != 1 {
                            return Err(DiagramError::BrokenCycle { comp: comp_idx, edge: e });
                        }
                    }
                }
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(DiagramError::BadComponents);
        }
        Ok(())
    }

    pub(crate) fn incidence(&self) -> Result<Incidence, DiagramError> {
        Incidence::scan(&self.crossings, self.n_edges)
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn components(&self) -> &[Vec<EdgeId>] {
        &self.components
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn n_crossings(&self) -> usize {
        self.crossings.len()
    }

    pub fn n_edges(&self) -> usize {
        self.n_edges
    }

    pub fn framing_kinks(&self) -> &[usize] {
        &self.framing_kinks
    }

    /// Arc -> component index.
    pub fn component_map(&self) -> Vec<usize> {
        let mut map = vec![0; self.n_edges];
        for (i, comp) in self.components.iter().enumerate() {
            for &e in comp {
                map[e] = i;
            }
        }
        map
    }

    /// Component indices of the two strands at a crossing, under first.
    pub fn strand_components(&self, crossing: usize) -> (usize, usize) {
        let map = self.component_map();
        let c = &self.crossings[crossing];
        (map[c.under_in], map[c.over_in])
    }

    /// Over/under exchanged at every listed crossing; ids are positions in
    /// the crossing list and stay stable across the switch.
    pub fn switch_crossings(&self, ids: &[usize]) -> Result<LinkDiagram, DiagramError> {
        let mut out = self.clone();
        let mut chosen = vec![false; self.crossings.len()];
        for &id in ids {
            if id >= self.crossings.len() {
                return Err(DiagramError::UnknownCrossing(id));
            }
            if !chosen[id] {
                chosen[id] = true;
                out.crossings[id] = out.crossings[id].switched();
            }
        }
        Ok(out)
    }

    /// Sum of signs over the crossings where component `comp` crosses itself.
    pub fn self_writhe(&self, comp: usize) -> Result<i64, DiagramError> {
        if comp >= self.components.len() {
            return Err(DiagramError::UnknownComponent(comp));
        }
        let map = self.component_map();
        Ok(self
            .crossings
            .iter()
            .filter(|c| map[c.under_in] == comp && map[c.over_in] == comp)
            .map(|c| c.sign as i64)
            .sum())
    }

    /// Adds one curl of the given handedness on the first arc of the
    /// component, raising its self-writhe by `sign`.
    pub fn add_kink(&self, comp: usize, sign: i8) -> Result<LinkDiagram, DiagramError> {
        if comp >= self.components.len() {
            return Err(DiagramError::UnknownComponent(comp));
        }
        let e = self.components[comp][0];
        let inc = self.incidence()?;
        let mut crossings = self.crossings.clone();
        let loop_arc = self.n_edges;
        match inc.head[e] {
            Some((ci, pass)) => {
                let tail_arc = self.n_edges + 1;
                // e keeps its tail; its old head slot now receives the arc
                // leaving the curl.
                match pass {
                    Pass::Under => crossings[ci].under_in = tail_arc,
                    Pass::Over => crossings[ci].over_in = tail_arc,
                }
                crossings.push(Crossing {
                    under_in: e,
                    under_out: loop_arc,
                    over_in: loop_arc,
                    over_out: tail_arc,
                    sign,
                });
                let mut components = self.components.clone();
                let slot = components[comp].iter().position(|&x| x == e).unwrap();
                components[comp].splice(slot + 1..slot + 1, [loop_arc, tail_arc]);
                let mut framing_kinks = self.framing_kinks.clone();
                framing_kinks[comp] += 1;
                let d = LinkDiagram {
                    crossings,
                    components,
                    framing_kinks,
                    n_edges: self.n_edges + 2,
                };
                d.validate()?;
                Ok(d)
            }
            None => {
                // A crossing-free circle curls into the one-crossing unknot
                // shape: the strand passes the new crossing twice.
                crossings.push(Crossing {
                    under_in: e,
                    under_out: loop_arc,
                    over_in: loop_arc,
                    over_out: e,
                    sign,
                });
                let mut components = self.components.clone();
                components[comp] = vec![e, loop_arc];
                let mut framing_kinks = self.framing_kinks.clone();
                framing_kinks[comp] += 1;
                let d = LinkDiagram {
                    crossings,
                    components,
                    framing_kinks,
                    n_edges: self.n_edges + 1,
                };
                d.validate()?;
                Ok(d)
            }
        }
    }

    /// Curls every component until its self-writhe is zero. Inter-component
    /// crossings are untouched.
    pub fn zero_frame(&self) -> Result<LinkDiagram, DiagramError> {
        let mut d = self.clone();
        for comp in 0..self.components.len() {
            let w = d.self_writhe(comp)?;
            let sign = if w > 0 { -1 } else { 1 };
            for _ in 0..w.unsigned_abs() {
                d = d.add_kink(comp, sign)?;
            }
        }
        Ok(d)
    }

    /// Diagram of the sublink left after removing the listed components.
    /// Crossings with a removed strand are spliced through.
    pub fn delete_components(&self, remove: &[usize]) -> Result<LinkDiagram, DiagramError> {
        let mut drop = vec![false; self.components.len()];
        for &i in remove {
            if i >= self.components.len() {
                return Err(DiagramError::UnknownComponent(i));
            }
            drop[i] = true;
        }
        if drop.iter().all(|&d| d) {
            return Err(DiagramError::EmptySublink);
        }
        let map = self.component_map();
        let keep_edge: Vec<bool> = (0..self.n_edges).map(|e| !drop[map[e]]).collect();
        let mut crossings = Vec::new();
        let mut unions = Vec::new();
        for c in &self.crossings {
            let keep_under = keep_edge[c.under_in];
            let keep_over = keep_edge[c.over_in];
            match (keep_under, keep_over) {
                (true, true) => crossings.push(*c),
                (true, false) => unions.push((c.under_in, c.under_out)),
                (false, true) => unions.push((c.over_in, c.over_out)),
                (false, false) => {}
            }
        }
        let kept_kinks: Vec<usize> = self
            .framing_kinks
            .iter()
            .enumerate()
            .filter(|(i, _)| !drop[*i])
            .map(|(_, &k)| k)
            .collect();
        rebuild(crossings, &keep_edge, &unions, Some(kept_kinks), Some(&map))
    }

    /// Oriented smoothing: the crossing is removed and each incoming strand
    /// is rejoined to the outgoing strand on its side. Components are
    /// retraced, so their count may change.
    pub fn smooth_crossing(&self, crossing: usize) -> Result<LinkDiagram, DiagramError> {
        if crossing >= self.crossings.len() {
            return Err(DiagramError::UnknownCrossing(crossing));
        }
        let c = self.crossings[crossing];
        let mut crossings = self.crossings.clone();
        crossings.remove(crossing);
        let keep = vec![true; self.n_edges];
        let unions = [(c.under_in, c.over_out), (c.over_in, c.under_out)];
        rebuild(crossings, &keep, &unions, None, None)
    }
}

/// Union-find over arc ids.
struct ArcSets {
    parent: Vec<usize>,
}

impl ArcSets {
    fn new(n: usize) -> ArcSets {
        ArcSets { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        // Keep the smaller id as representative so relabeling is stable.
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
    }
}

/// Reassembles a diagram after surgery: merges arcs, renumbers the survivors
/// compactly in old-id order, and retraces component cycles. When the move
/// keeps every circle intact, `old_component_of_edge` carries the old
/// edge-to-component map and the new components take their old order, so
/// component indices stay stable across the surgery; without it they are
/// ordered by smallest arc id. `kinks` supplies per-component bookkeeping
/// when the caller knows the components survive in order; otherwise counts
/// reset to zero.
pub(crate) fn rebuild(
    crossings: Vec<Crossing>,
    keep_edge: &[bool],
    unions: &[(EdgeId, EdgeId)],
    kinks: Option<Vec<usize>>,
    old_component_of_edge: Option<&[usize]>,
) -> Result<LinkDiagram, DiagramError> {
    let n_old = keep_edge.len();
    let mut sets = ArcSets::new(n_old);
    for &(a, b) in unions {
        sets.union(a, b);
    }
    // Compact ids for surviving classes, ordered by representative id.
    let mut new_id = vec![usize::MAX; n_old];
    let mut next = 0;
    for e in 0..n_old {
        if keep_edge[e] && sets.find(e) == e {
            new_id[e] = next;
            next += 1;
        }
    }
    // Old component of each surviving arc class, when the caller knows it.
    let source = old_component_of_edge.map(|map| {
        let mut source = vec![usize::MAX; next];
        for e in 0..n_old {
            if keep_edge[e] {
                let nid = new_id[sets.find(e)];
                debug_assert_ne!(nid, usize::MAX, "kept arc lost its class");
                debug_assert!(
                    source[nid] == usize::MAX || source[nid] == map[e],
                    "union merged arcs of two components"
                );
                source[nid] = map[e];
            }
        }
        source
    });
    let relabel = |sets: &mut ArcSets, e: usize| new_id[sets.find(e)];
    let crossings: Vec<Crossing> = crossings
        .into_iter()
        .map(|c| Crossing {
            under_in: relabel(&mut sets, c.under_in),
            under_out: relabel(&mut sets, c.under_out),
            over_in: relabel(&mut sets, c.over_in),
            over_out: relabel(&mut sets, c.over_out),
            sign: c.sign,
        })
        .collect();
    let n_edges = next;
    let inc = Incidence::scan(&crossings, n_edges)?;

    // Trace oriented cycles; free circles are their own components.
    let mut visited = vec![false; n_edges];
    let mut components = Vec::new();
    for start in 0..n_edges {
        if visited[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut e = start;
        loop {
            if visited[e] {
                return Err(DiagramError::BadComponents);
            }
            visited[e] = true;
            cycle.push(e);
            e = match inc.head[e] {
                Some((ci, pass)) => crossings[ci].out_edge(pass),
                None => start,
            };
            if e == start {
                break;
            }
        }
        components.push(cycle);
    }
    match &source {
        Some(source) => {
            debug_assert!(
                components.iter().all(|c| c.iter().all(|&e| source[e] == source[c[0]])),
                "a traced cycle spans two source components"
            );
            components.sort_by_key(|c| source[c[0]]);
        }
        None => components.sort_by_key(|c| c.iter().copied().min()),
    }
    let framing_kinks = match kinks {
        Some(k) if k.len() == components.len() => k,
        _ => vec![0; components.len()],
    };
    let d = LinkDiagram { crossings, components, framing_kinks, n_edges };
    d.validate()?;
    Ok(d)
}

/// Crossing list referencing provisional arc ids plus the seams to glue,
/// used by closure builders before a diagram exists.
pub(crate) struct RawDiagram {
    pub n_raw: usize,
    pub crossings: Vec<Crossing>,
    pub unions: Vec<(usize, usize)>,
}

impl RawDiagram {
    pub fn assemble(self) -> Result<LinkDiagram, DiagramError> {
        let keep = vec![true; self.n_raw];
        rebuild(self.crossings, &keep, &self.unions, None, None)
    }
}

#[cfg(test)]
pub(crate) fn hopf_link(sign: i8) -> LinkDiagram {
    // Two arcs per component; each component passes under once and over
    // once. Both crossings carry the same sign.
    LinkDiagram::from_parts(
        vec![
            Crossing { under_in: 0, under_out: 1, over_in: 2, over_out: 3, sign },
            Crossing { under_in: 3, under_out: 2, over_in: 1, over_out: 0, sign },
        ],
        vec![vec![0, 1], vec![2, 3]],
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unknot() -> LinkDiagram {
        LinkDiagram::from_parts(Vec::new(), vec![vec![0]]).unwrap()
    }

    #[test]
    fn hopf_fixture_is_valid() {
        let d = hopf_link(1);
        assert_eq!(d.n_components(), 2);
        assert_eq!(d.n_crossings(), 2);
        assert_eq!(d.self_writhe(0).unwrap(), 0);
        assert_eq!(d.self_writhe(1).unwrap(), 0);
    }

    #[test]
    fn rejects_broken_cycle() {
        // Hopf crossings but the components mix arcs of both strands.
        let err = LinkDiagram::from_parts(
            vec![
                Crossing { under_in: 0, under_out: 1, over_in: 2, over_out: 3, sign: 1 },
                Crossing { under_in: 3, under_out: 2, over_in: 1, over_out: 0, sign: 1 },
            ],
            vec![vec![0, 3], vec![2, 1]],
        )
        .unwrap_err();
        assert!(matches!(err, DiagramError::BrokenCycle { .. }));
    }

    #[test]
    fn rejects_duplicate_arc_use() {
        let err =
            LinkDiagram::from_parts(Vec::new(), vec![vec![0], vec![0]]).unwrap_err();
        assert!(matches!(err, DiagramError::BadComponents));
    }

    #[test]
    fn rejects_half_open_arcs() {
        let err = LinkDiagram::from_parts(
            vec![Crossing { under_in: 0, under_out: 1, over_in: 2, over_out: 3, sign: 1 }],
            vec![vec![0, 1], vec![2, 3]],
        )
        .unwrap_err();
        assert!(matches!(err, DiagramError::HalfOpenArc(_)));
    }

    #[test]
    fn switch_is_an_involution_and_flips_sign() {
        let d = hopf_link(1);
        let s = d.switch_crossings(&[0]).unwrap();
        assert_eq!(s.crossings()[0].sign, -1);
        assert_eq!(s.crossings()[0].under_in, d.crossings()[0].over_in);
        let back = s.switch_crossings(&[0]).unwrap();
        assert_eq!(back, d);
        // Shadow and components are untouched.
        assert_eq!(s.components(), d.components());
    }

    #[test]
    fn switch_rejects_unknown_id() {
        let d = hopf_link(1);
        assert!(matches!(
            d.switch_crossings(&[7]),
            Err(DiagramError::UnknownCrossing(7))
        ));
    }

    #[test]
    fn kink_moves_self_writhe_and_zero_frame_undoes_it() {
        let d = unknot();
        let kinked = d.add_kink(0, 1).unwrap();
        assert_eq!(kinked.n_crossings(), 1);
        assert_eq!(kinked.self_writhe(0).unwrap(), 1);
        let framed = kinked.zero_frame().unwrap();
        assert_eq!(framed.self_writhe(0).unwrap(), 0);
        assert_eq!(framed.n_crossings(), 2);
        assert_eq!(framed.framing_kinks()[0], 2);
    }

    #[test]
    fn zero_frame_leaves_inter_component_crossings_alone() {
        let d = hopf_link(1);
        let framed = d.zero_frame().unwrap();
        assert_eq!(framed, d);
    }

    #[test]
    fn deleting_a_hopf_component_leaves_a_circle() {
        let d = hopf_link(1);
        let left = d.delete_components(&[1]).unwrap();
        assert_eq!(left.n_components(), 1);
        assert_eq!(left.n_crossings(), 0);
        assert_eq!(left.components()[0].len(), 1);
    }

    #[test]
    fn deleting_everything_is_refused() {
        let d = hopf_link(1);
        assert!(matches!(
            d.delete_components(&[0, 1]),
            Err(DiagramError::EmptySublink)
        ));
    }

    #[test]
    fn smoothing_hopf_merges_components() {
        let d = hopf_link(1);
        let s = d.smooth_crossing(0).unwrap();
        assert_eq!(s.n_components(), 1);
        assert_eq!(s.n_crossings(), 1);
    }

    #[test]
    fn smoothing_a_kink_splits_off_a_circle() {
        let kinked = unknot().add_kink(0, 1).unwrap();
        let s = kinked.smooth_crossing(0).unwrap();
        assert_eq!(s.n_crossings(), 0);
        assert_eq!(s.n_components(), 2);
    }
}
