//! Wirtinger presentations of link groups, zero-framed longitudes, and the
//! rewriting of both in terms of one meridian per component.
//!
//! Generators correspond to arcs (maximal runs of a component between
//! underpasses), one conjugation relator per crossing. The meridian of a
//! component is the generator of the arc holding its first edge. Longitudes
//! read off one over-arc letter per underpass in traversal order and remove
//! the self-writhe as a meridian power, so their linking with the component
//! is zero.
//!
//! The meridian rewriting works at a fixed series cap: each arc generator is
//! expressed as a conjugate of its component's meridian, the conjugators
//! refined one lower-central-series level per round. Coefficients of degree
//! at most the cap are exact. A plain word form of the same rewriting is
//! available for display; it guards against the exponential growth conjugate
//! expansion can produce and fails honestly instead of stalling.

use std::fmt::Write as _;

use thiserror::Error;

use crate::diagram::{LinkDiagram, Pass};
use crate::freegroup::FreeWord;
use crate::IntSeries;

/// Longest word the display-form rewriting will build before giving up.
const WORD_GUARD: usize = 1 << 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinkGroupError {
    #[error("component index {0} out of range")]
    UnknownComponent(usize),
    #[error("series cap must be at least 1, got 0")]
    CapTooSmall,
    #[error("meridian rewriting exceeded {limit} letters; use the series form")]
    WordBlowup { limit: usize },
}

/// Wirtinger data: one generator per arc, one relator per crossing.
///
/// Arc ids run over components in order, and within a component in traversal
/// order from its first edge. Relator words live in rank `n_arcs`, generator
/// `k+1` standing for arc `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    n_arcs: usize,
    arc_component: Vec<usize>,
    relators: Vec<FreeWord>,
    meridians: Vec<usize>,
    edge_arc: Vec<usize>,
}

/// Joins arcs across over-passes and numbers them deterministically.
pub fn wirtinger(d: &LinkDiagram) -> Presentation {
    let n_edges = d.n_edges();
    let mut parent: Vec<usize> = (0..n_edges).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for c in d.crossings() {
        let (a, b) = (find(&mut parent, c.over_in), find(&mut parent, c.over_out));
        parent[a.max(b)] = a.min(b);
    }

    let mut edge_arc = vec![usize::MAX; n_edges];
    let mut arc_component = Vec::new();
    let mut meridians = Vec::new();
    for (ci, comp) in d.components().iter().enumerate() {
        meridians.push(arc_component.len());
        for &e in comp {
            let root = find(&mut parent, e);
            if edge_arc[root] == usize::MAX {
                edge_arc[root] = arc_component.len();
                arc_component.push(ci);
            }
            edge_arc[e] = edge_arc[root];
        }
    }
    let n_arcs = arc_component.len();

    // Relator per crossing: out = over^(-sign) . in . over^(sign), written
    // as out . over^(-sign) . in^(-1) . over^(sign) = 1. This pairing of the
    // conjugation side with the crossing sign is forced once meridians are
    // oriented to have linking +1 with their component and longitudes read
    // over-arcs with exponent +sign.
    let relators = d
        .crossings()
        .iter()
        .map(|c| {
            let out = (edge_arc[c.under_out] + 1) as i32;
            let inc = (edge_arc[c.under_in] + 1) as i32;
            let over = (edge_arc[c.over_in] + 1) as i32;
            let s = c.sign as i32;
            FreeWord::from_raw(n_arcs, vec![out, -s * over, -inc, s * over]).reduce()
        })
        .collect();

    Presentation { n_arcs, arc_component, relators, meridians, edge_arc }
}

impl Presentation {
    pub fn n_arcs(&self) -> usize {
        self.n_arcs
    }

    pub fn n_components(&self) -> usize {
        self.meridians.len()
    }

    pub fn relators(&self) -> &[FreeWord] {
        &self.relators
    }

    /// Component an arc belongs to.
    pub fn arc_component(&self, arc: usize) -> usize {
        self.arc_component[arc]
    }

    /// Arc id of the meridian generator chosen for a component.
    pub fn meridian(&self, comp: usize) -> usize {
        self.meridians[comp]
    }

    /// Arc containing a diagram edge.
    pub fn arc_of_edge(&self, edge: usize) -> usize {
        self.edge_arc[edge]
    }

    /// Generators minus relators. Free circles and components that never
    /// pass under contribute a generator but no relator, so this equals the
    /// number of such components.
    pub fn deficiency(&self) -> isize {
        self.n_arcs as isize - self.relators.len() as isize
    }

    /// Plain-text form: generator list with component tags, meridian
    /// choices, then the relators.
    pub fn display_text(&self) -> String {
        let mut out = String::new();
        out.push_str("gens:");
        for (a, &c) in self.arc_component.iter().enumerate() {
            write!(out, " x{}[c{}]", a + 1, c + 1).unwrap();
        }
        out.push_str("\nmeridians:");
        for (c, &a) in self.meridians.iter().enumerate() {
            write!(out, " c{} -> x{}", c + 1, a + 1).unwrap();
        }
        out.push_str("\nrels:");
        if self.relators.is_empty() {
            out.push_str(" (none)");
        }
        for r in &self.relators {
            write!(out, " {} ;", r.display_with("x")).unwrap();
        }
        out.push('\n');
        out
    }
}

/// Zero-framed longitude of one component, written in arc generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Longitude {
    pub component: usize,
    pub word: FreeWord,
    /// Meridian power removed from the raw over-arc product (the
    /// self-writhe of the component).
    pub framing_correction: i64,
}

/// One underpass along a component walk.
struct Pickup {
    over_arc: usize,
    sign: i8,
}

/// Underpasses of a component in traversal order from its first edge.
fn pickups(d: &LinkDiagram, p: &Presentation, comp: usize) -> Vec<Pickup> {
    let inc = d.incidence().expect("validated diagram");
    let mut out = Vec::new();
    for &e in &d.components()[comp] {
        if let Some((ci, Pass::Under)) = inc.head[e] {
            let c = &d.crossings()[ci];
            out.push(Pickup { over_arc: p.arc_of_edge(c.over_in), sign: c.sign });
        }
    }
    out
}

/// Over-arc letters in traversal order, times meridian^(-self_writhe).
pub fn longitude(
    d: &LinkDiagram,
    comp: usize,
    p: &Presentation,
) -> Result<Longitude, LinkGroupError> {
    if comp >= d.n_components() {
        return Err(LinkGroupError::UnknownComponent(comp));
    }
    let w = d.self_writhe(comp).expect("component exists");
    let mut letters: Vec<i32> = pickups(d, p, comp)
        .iter()
        .map(|pk| pk.sign as i32 * (pk.over_arc + 1) as i32)
        .collect();
    let m = (p.meridian(comp) + 1) as i32;
    for _ in 0..w.unsigned_abs() {
        letters.push(if w > 0 { -m } else { m });
    }
    let word = FreeWord::from_raw(p.n_arcs, letters).reduce();
    Ok(Longitude { component: comp, word, framing_correction: w })
}

/// Arc generators and longitudes rewritten in the meridians `x_1..x_n`, as
/// series truncated at `cap`. Coefficients of degree <= cap are exact.
#[derive(Debug, Clone)]
pub struct ChenMilnor {
    cap: usize,
    arc_series: Vec<IntSeries>,
    longitudes: Vec<IntSeries>,
}

impl ChenMilnor {
    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn n_components(&self) -> usize {
        self.longitudes.len()
    }

    /// Series of arc generator `arc` in the meridian variables.
    pub fn arc_series(&self, arc: usize) -> &IntSeries {
        &self.arc_series[arc]
    }

    /// Series of the zero-framed longitude of a component.
    pub fn longitude_series(&self, comp: usize) -> &IntSeries {
        &self.longitudes[comp]
    }

    pub fn longitudes(&self) -> &[IntSeries] {
        &self.longitudes
    }

    /// Substitutes the arc series into a relator word and multiplies out.
    ///
    /// A relator whose outgoing arc is not a meridian arc rewrites to 1
    /// exactly. The one relator per component that closes the walk back
    /// onto the meridian arc rewrites to the commutation of the meridian
    /// with the longitude, so its image is 1 plus terms of degree strictly
    /// above the longitude's lowest nonvanishing degree. Those deviations
    /// are the content of the presentation, not rounding error.
    pub fn relator_image(&self, relator: &FreeWord) -> IntSeries {
        let rank = self.longitudes.len();
        let mut acc = IntSeries::one(rank, self.cap);
        for (gen, exp) in relator.letters() {
            let s = &self.arc_series[gen - 1];
            acc = if exp > 0 { acc.mul(s) } else { acc.mul(&s.inverse()) };
        }
        acc
    }
}

/// Runs the meridian rewriting for `cap` rounds, each exact one
/// lower-central-series level deeper.
pub fn chen_milnor_series(d: &LinkDiagram, cap: usize) -> Result<ChenMilnor, LinkGroupError> {
    if cap == 0 {
        return Err(LinkGroupError::CapTooSmall);
    }
    let p = wirtinger(d);
    let n = d.n_components();
    let meridian_var = |arc: usize| p.arc_component(arc) + 1;

    // Conjugators: arc generator = A[arc] . x_m . A[arc]^-1.
    let mut prev: Vec<IntSeries> = vec![IntSeries::one(n, cap); p.n_arcs()];
    for _ in 0..cap {
        // Generator series from the previous round, used for the over arcs.
        let s_prev: Vec<IntSeries> = (0..p.n_arcs())
            .map(|a| conjugated_meridian(&prev[a], n, cap, meridian_var(a)))
            .collect();
        let mut cur = prev.clone();
        for comp in 0..n {
            let mut a_cur = IntSeries::one(n, cap);
            let walk = component_arc_walk(d, &p, comp);
            for (pk, next_arc) in walk {
                let s = &s_prev[pk.over_arc];
                // Relator: next = over^(-sign) . cur . over^(sign).
                let factor = if pk.sign > 0 { s.inverse() } else { s.clone() };
                a_cur = factor.mul(&a_cur);
                if next_arc != p.meridian(comp) {
                    cur[next_arc] = a_cur.clone();
                }
            }
        }
        prev = cur;
    }

    let arc_series: Vec<IntSeries> = (0..p.n_arcs())
        .map(|a| conjugated_meridian(&prev[a], n, cap, meridian_var(a)))
        .collect();

    let mut longitudes = Vec::with_capacity(n);
    for comp in 0..n {
        let mut l = IntSeries::one(n, cap);
        for pk in pickups(d, &p, comp) {
            let s = &arc_series[pk.over_arc];
            l = if pk.sign > 0 { l.mul(s) } else { l.mul(&s.inverse()) };
        }
        let w = d.self_writhe(comp).expect("component exists");
        let m = IntSeries::letter(n, cap, comp + 1, if w > 0 { -1 } else { 1 });
        for _ in 0..w.unsigned_abs() {
            l = l.mul(&m);
        }
        longitudes.push(l);
    }
    Ok(ChenMilnor { cap, arc_series, longitudes })
}

/// `A . (1 + X_m) . A^-1`.
fn conjugated_meridian(a: &IntSeries, rank: usize, cap: usize, var: usize) -> IntSeries {
    a.mul(&IntSeries::letter(rank, cap, var, 1)).mul(&a.inverse())
}

/// The underpasses of a component paired with the arc that starts there.
fn component_arc_walk(
    d: &LinkDiagram,
    p: &Presentation,
    comp: usize,
) -> Vec<(Pickup, usize)> {
    let inc = d.incidence().expect("validated diagram");
    let mut out = Vec::new();
    for &e in &d.components()[comp] {
        if let Some((ci, Pass::Under)) = inc.head[e] {
            let c = &d.crossings()[ci];
            let pk = Pickup { over_arc: p.arc_of_edge(c.over_in), sign: c.sign };
            out.push((pk, p.arc_of_edge(c.under_out)));
        }
    }
    out
}

/// The same rewriting carried out on words, for display. Returns the
/// longitude words `W_1..W_n` in the meridians.
pub fn chen_milnor_words(d: &LinkDiagram, cap: usize) -> Result<Vec<FreeWord>, LinkGroupError> {
    if cap == 0 {
        return Err(LinkGroupError::CapTooSmall);
    }
    let p = wirtinger(d);
    let n = d.n_components();
    let meridian_word =
        |arc: usize| FreeWord::generator(n, p.arc_component(arc) + 1).expect("component in range");

    let mut prev: Vec<FreeWord> = vec![FreeWord::empty(n); p.n_arcs()];
    for _ in 0..cap {
        let s_prev: Vec<FreeWord> = (0..p.n_arcs())
            .map(|a| meridian_word(a).conjugate_by(&prev[a]).expect("same rank"))
            .collect();
        let mut cur = prev.clone();
        for comp in 0..n {
            let mut a_cur = FreeWord::empty(n);
            for (pk, next_arc) in component_arc_walk(d, &p, comp) {
                let s = &s_prev[pk.over_arc];
                let factor = if pk.sign > 0 { s.invert() } else { s.clone() };
                a_cur = factor.multiply(&a_cur).expect("same rank");
                if a_cur.len() > WORD_GUARD {
                    return Err(LinkGroupError::WordBlowup { limit: WORD_GUARD });
                }
                if next_arc != p.meridian(comp) {
                    cur[next_arc] = a_cur.clone();
                }
            }
        }
        prev = cur;
    }

    let mut words = Vec::with_capacity(n);
    for comp in 0..n {
        let mut l = FreeWord::empty(n);
        for pk in pickups(d, &p, comp) {
            let s = meridian_word(pk.over_arc).conjugate_by(&prev[pk.over_arc]).expect("rank");
            let factor = if pk.sign > 0 { s } else { s.invert() };
            l = l.multiply(&factor).expect("same rank");
            if l.len() > WORD_GUARD {
                return Err(LinkGroupError::WordBlowup { limit: WORD_GUARD });
            }
        }
        let w = d.self_writhe(comp).expect("component exists");
        let m = FreeWord::generator(n, comp + 1).expect("in range");
        l = l.multiply(&m.pow(-w)).expect("same rank");
        words.push(l);
    }
    Ok(words)
}
