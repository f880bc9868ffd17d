//! Link invariants: the linking matrix, Milnor mu-bar values with their
//! indeterminacy, Conway polynomials, and finite type evaluation on links
//! with marked double points.
//!
//! Everything is exact integer arithmetic. Resource limits (crossing bound,
//! series cap) produce errors, never approximate values.

mod conway;

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{DiagramError, LinkDiagram};
use crate::linkgroup::{chen_milnor_series, ChenMilnor, LinkGroupError};
use crate::Int;

pub use conway::{conway, ConwayEngine, ConwayPolynomial};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InvariantError {
    #[error("diagram has {have} crossings; the skein bound is {bound}")]
    TooManyCrossings { have: usize, bound: usize },
    #[error("series cap {cap} is below the {needed} needed for this sequence")]
    CapTooSmall { cap: usize, needed: usize },
    #[error("sequence of length {0} has no mu-bar value; need at least 2 indices")]
    SequenceTooShort(usize),
    #[error("component index {index} out of range 1..={components}")]
    BadComponentIndex { index: usize, components: usize },
    #[error("double point {index} out of range for {crossings} crossings")]
    DoublePointOutOfRange { index: usize, crossings: usize },
    #[error("double point {0} is marked twice")]
    DuplicateDoublePoint(usize),
    #[error("value does not fit the report's integer width")]
    ReportOverflow,
    #[error(transparent)]
    LinkGroup(#[from] LinkGroupError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// Symmetric matrix of pairwise linking numbers, zero diagonal. Each entry
/// is half the signed count of crossings between the two components; closed
/// curves cross an even number of times, so the halving is exact.
pub fn linking_matrix(d: &LinkDiagram) -> Vec<Vec<i64>> {
    let n = d.n_components();
    let mut doubled = vec![vec![0i64; n]; n];
    for ci in 0..d.n_crossings() {
        let (a, b) = d.strand_components(ci);
        if a != b {
            let s = d.crossings()[ci].sign as i64;
            doubled[a][b] += s;
            doubled[b][a] += s;
        }
    }
    for row in &mut doubled {
        for v in row.iter_mut() {
            debug_assert_eq!(*v % 2, 0);
            *v /= 2;
        }
    }
    doubled
}

/// A mu-bar value together with its indeterminacy.
///
/// `delta` is the gcd of the magnitudes of mu-bar over every sequence
/// obtained by deleting at least one index and cyclically permuting the
/// remainder. When `delta` is positive the value is reduced into
/// `0..delta`; when zero the value is a well-defined integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MilnorValue {
    /// 1-based component indices, last one naming the longitude read.
    pub sequence: Vec<usize>,
    pub value: Int,
    pub delta: Int,
}

fn validate_sequence(n: usize, sequence: &[usize], cap: usize) -> Result<(), InvariantError> {
    if sequence.len() < 2 {
        return Err(InvariantError::SequenceTooShort(sequence.len()));
    }
    if cap < sequence.len() {
        return Err(InvariantError::CapTooSmall { cap, needed: sequence.len() });
    }
    for &i in sequence {
        if i == 0 || i > n {
            return Err(InvariantError::BadComponentIndex { index: i, components: n });
        }
    }
    Ok(())
}

/// Coefficient of X_{i1}..X_{i(k-1)} in the longitude series of component
/// i_k, before any indeterminacy reduction.
fn raw_mu(cm: &ChenMilnor, sequence: &[usize]) -> Int {
    let (last, head) = sequence.split_last().expect("validated length");
    cm.longitude_series(last - 1).coefficient(head)
}

fn delta_of(cm: &ChenMilnor, sequence: &[usize]) -> Int {
    let len = sequence.len();
    let mut g = Int::from(0);
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    for keep in 1u32..(1 << len) {
        let k = keep.count_ones() as usize;
        if k < 2 || k == len {
            continue;
        }
        let base: Vec<usize> =
            (0..len).filter(|&p| keep >> p & 1 == 1).map(|p| sequence[p]).collect();
        for r in 0..k {
            let mut rot = base[r..].to_vec();
            rot.extend_from_slice(&base[..r]);
            if seen.insert(rot.clone()) {
                g = g.gcd(&raw_mu(cm, &rot));
            }
        }
    }
    g
}

/// Reads one mu-bar value out of an already computed rewriting. The
/// sequence must be valid for the rewriting's component count and cap.
pub fn mu_from_series(cm: &ChenMilnor, sequence: &[usize]) -> Result<MilnorValue, InvariantError> {
    validate_sequence(cm.n_components(), sequence, cm.cap())?;
    let raw = raw_mu(cm, sequence);
    let delta = delta_of(cm, sequence);
    let value = if delta.is_zero() { raw } else { raw.mod_floor(&delta) };
    Ok(MilnorValue { sequence: sequence.to_vec(), value, delta })
}

/// Milnor mu-bar of one sequence, running the meridian rewriting at `cap`.
pub fn mu_bar(
    d: &LinkDiagram,
    sequence: &[usize],
    cap: usize,
) -> Result<MilnorValue, InvariantError> {
    validate_sequence(d.n_components(), sequence, cap)?;
    let cm = chen_milnor_series(d, cap)?;
    mu_from_series(&cm, sequence)
}

/// All mu-bar values for sequences of length 2..=max_len, in lexicographic
/// order, computed from a single rewriting at `cap`.
pub fn mu_values_through(
    d: &LinkDiagram,
    max_len: usize,
    cap: usize,
) -> Result<Vec<MilnorValue>, InvariantError> {
    if max_len < 2 {
        return Err(InvariantError::SequenceTooShort(max_len));
    }
    if cap < max_len {
        return Err(InvariantError::CapTooSmall { cap, needed: max_len });
    }
    let n = d.n_components();
    let cm = chen_milnor_series(d, cap)?;
    let mut out = Vec::new();
    for len in 2..=max_len {
        let mut seq = vec![1usize; len];
        'tuples: loop {
            out.push(mu_from_series(&cm, &seq)?);
            // Odometer step through {1..n}^len, most significant first.
            let mut pos = len;
            loop {
                if pos == 0 {
                    break 'tuples;
                }
                pos -= 1;
                if seq[pos] < n {
                    seq[pos] += 1;
                    for slot in seq.iter_mut().skip(pos + 1) {
                        *slot = 1;
                    }
                    continue 'tuples;
                }
                seq[pos] = 1;
            }
        }
    }
    Ok(out)
}

/// A link diagram with a marked set of crossings treated as transverse
/// double points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingularLink {
    diagram: LinkDiagram,
    double_points: Vec<usize>,
}

impl SingularLink {
    pub fn new(diagram: LinkDiagram, double_points: Vec<usize>) -> Result<Self, InvariantError> {
        let mut seen = BTreeSet::new();
        for &p in &double_points {
            if p >= diagram.n_crossings() {
                return Err(InvariantError::DoublePointOutOfRange {
                    index: p,
                    crossings: diagram.n_crossings(),
                });
            }
            if !seen.insert(p) {
                return Err(InvariantError::DuplicateDoublePoint(p));
            }
        }
        Ok(SingularLink { diagram, double_points })
    }

    pub fn diagram(&self) -> &LinkDiagram {
        &self.diagram
    }

    pub fn double_points(&self) -> &[usize] {
        &self.double_points
    }

    /// Resolution selected by bitmask: bit j set resolves double point j
    /// positively, clear resolves it negatively.
    pub fn resolve(&self, mask: usize) -> LinkDiagram {
        let flips: Vec<usize> = self
            .double_points
            .iter()
            .enumerate()
            .filter_map(|(j, &ci)| {
                let want: i8 = if mask >> j & 1 == 1 { 1 } else { -1 };
                (self.diagram.crossings()[ci].sign != want).then_some(ci)
            })
            .collect();
        self.diagram.switch_crossings(&flips).expect("validated double points")
    }
}

/// The finite type invariants this crate evaluates on singular links.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvariantHandle {
    /// Entry (i, j) of the linking matrix, 0-based components.
    Linking(usize, usize),
    /// Conway coefficient of the given degree.
    ConwayCoeff(usize),
}

/// Skein extension to double points: the alternating sum of the underlying
/// invariant over all 2^k resolutions, signed by the number of negative
/// resolutions.
pub fn vassiliev_eval(
    handle: InvariantHandle,
    s: &SingularLink,
    bound: usize,
) -> Result<Int, InvariantError> {
    if let InvariantHandle::Linking(i, j) = handle {
        let n = s.diagram().n_components();
        for idx in [i, j] {
            if idx >= n {
                return Err(InvariantError::BadComponentIndex { index: idx + 1, components: n });
            }
        }
    }
    let k = s.double_points().len();
    let mut engine: ConwayEngine<Int> = ConwayEngine::new(bound);
    let mut total = Int::from(0);
    for mask in 0..(1usize << k) {
        let resolved = s.resolve(mask);
        let value = match handle {
            InvariantHandle::Linking(i, j) => Int::from(linking_matrix(&resolved)[i][j]),
            InvariantHandle::ConwayCoeff(degree) => engine.eval(&resolved)?.coefficient(degree),
        };
        let negatives = k - mask.count_ones() as usize;
        total += if negatives % 2 == 0 { value } else { -value };
    }
    Ok(total)
}

/// Values of every implemented invariant of order at most `order`, plus the
/// comparison against the unlink with the same component count.
///
/// The linking matrix is always listed for reference but participates in
/// the match only when `order >= 1`, since linking numbers have order 1.
/// Conway coefficients enter for degrees up to `order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteTypeProfile {
    pub order: usize,
    pub lk: Vec<Vec<i64>>,
    /// Nonzero Conway coefficients of degree <= order.
    pub conway: BTreeMap<usize, Int>,
    pub matches_unlink: bool,
}

pub fn finite_type_profile(
    d: &LinkDiagram,
    order: usize,
    bound: usize,
) -> Result<FiniteTypeProfile, InvariantError> {
    let n = d.n_components();
    let lk = linking_matrix(d);
    let nabla: ConwayPolynomial<Int> = conway(d, bound)?;
    let coeffs: BTreeMap<usize, Int> =
        nabla.iter().filter(|&(k, _)| k <= order).map(|(k, c)| (k, c.clone())).collect();

    let unlink_coeffs: BTreeMap<usize, Int> = if n == 1 {
        [(0usize, Int::from(1))].into_iter().collect()
    } else {
        BTreeMap::new()
    };
    let lk_matches = order == 0 || lk.iter().all(|row| row.iter().all(|&v| v == 0));
    let matches_unlink = lk_matches && coeffs == unlink_coeffs;

    Ok(FiniteTypeProfile { order, lk, conway: coeffs, matches_unlink })
}

/// One mu-bar record in the report layer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MuRecord {
    #[serde(rename = "I")]
    pub sequence: Vec<usize>,
    pub value: i64,
    pub delta: i64,
}

/// The JSON-facing invariant report. The exact internal integers are
/// narrowed to i64 here; overflow is an error rather than a wrong number.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub mu: Vec<MuRecord>,
    pub conway: BTreeMap<usize, i64>,
    pub lk: Vec<Vec<i64>>,
}

fn narrow(x: &Int) -> Result<i64, InvariantError> {
    x.to_i64().ok_or(InvariantError::ReportOverflow)
}

impl InvariantReport {
    pub fn build(
        mu: &[MilnorValue],
        nabla: &ConwayPolynomial<Int>,
        lk: Vec<Vec<i64>>,
    ) -> Result<Self, InvariantError> {
        let mu = mu
            .iter()
            .map(|m| {
                Ok(MuRecord {
                    sequence: m.sequence.clone(),
                    value: narrow(&m.value)?,
                    delta: narrow(&m.delta)?,
                })
            })
            .collect::<Result<Vec<_>, InvariantError>>()?;
        let conway = nabla
            .iter()
            .map(|(k, c)| Ok((k, narrow(c)?)))
            .collect::<Result<BTreeMap<_, _>, InvariantError>>()?;
        Ok(InvariantReport { mu, conway, lk })
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use crate::braid::{parse_braid, BraidWord};
    use crate::diagram::LinkDiagram;

    use super::*;

    fn hopf() -> LinkDiagram {
        parse_braid("s1 s1", 2).unwrap().ordinary_closure().unwrap()
    }

    fn unlink(n: usize) -> LinkDiagram {
        parse_braid("", n).unwrap().ordinary_closure().unwrap()
    }

    fn trefoil() -> LinkDiagram {
        LinkDiagram::from_gauss_code("O1+ U2+ O3+ U1+ O2+ U3+").unwrap()
    }

    fn borromean() -> LinkDiagram {
        parse_braid("s1 s2^-1 s1 s2^-1 s1 s2^-1", 3).unwrap().ordinary_closure().unwrap()
    }

    fn chain3() -> LinkDiagram {
        parse_braid("s2 s2 s4 s4", 6).unwrap().plat_closure().unwrap()
    }

    #[test]
    fn linking_matrix_of_unlink_is_zero() {
        assert_eq!(linking_matrix(&unlink(3)), vec![vec![0; 3]; 3]);
    }

    #[test]
    fn linking_matrix_of_hopf_is_unit_off_diagonal() {
        assert_eq!(linking_matrix(&hopf()), vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn linking_matrix_of_borromean_vanishes() {
        let d = borromean();
        assert_eq!(d.n_components(), 3);
        assert_eq!(linking_matrix(&d), vec![vec![0; 3]; 3]);
    }

    #[test]
    fn mu_of_pair_is_the_linking_number() {
        let m = mu_bar(&hopf(), &[1, 2], 4).unwrap();
        assert_eq!(m.value, Int::from(1));
        assert_eq!(m.delta, Int::from(0));
        let m = mu_bar(&hopf(), &[2, 1], 4).unwrap();
        assert_eq!(m.value, Int::from(1));
    }

    #[test]
    fn mu_on_unlink_vanishes() {
        for seq in [vec![1, 2], vec![2, 1, 1], vec![1, 1, 2, 2]] {
            let m = mu_bar(&unlink(2), &seq, 5).unwrap();
            assert_eq!(m.value, Int::from(0));
            assert_eq!(m.delta, Int::from(0));
        }
    }

    #[test]
    fn mu_validates_input() {
        let d = hopf();
        assert_eq!(mu_bar(&d, &[1], 4).unwrap_err(), InvariantError::SequenceTooShort(1));
        assert_eq!(
            mu_bar(&d, &[1, 1, 2, 2], 3).unwrap_err(),
            InvariantError::CapTooSmall { cap: 3, needed: 4 }
        );
        assert_eq!(
            mu_bar(&d, &[1, 3], 4).unwrap_err(),
            InvariantError::BadComponentIndex { index: 3, components: 2 }
        );
    }

    // The triple value of the Borromean rings is the standard first
    // example beyond linking numbers: pairwise linking vanishes, so the
    // length-3 values are well-defined, cyclically symmetric, and +-1.
    #[test]
    fn borromean_triple_mu_is_a_unit_and_cyclic() {
        let d = borromean();
        let cm = chen_milnor_series(&d, 4).unwrap();
        for seq in [[1, 2], [1, 3], [2, 3]] {
            let m = mu_from_series(&cm, &seq).unwrap();
            assert_eq!(m.value, Int::from(0), "pair {seq:?}");
        }
        let base = mu_from_series(&cm, &[1, 2, 3]).unwrap();
        assert_eq!(base.delta, Int::from(0));
        assert_eq!(base.value.clone() * base.value.clone(), Int::from(1));
        for rot in [[2, 3, 1], [3, 1, 2]] {
            let m = mu_from_series(&cm, &rot).unwrap();
            assert_eq!(m.value, base.value, "rotation {rot:?}");
            assert_eq!(m.delta, Int::from(0));
        }
    }

    // A three-component chain has nonzero pairwise linking, so the triple
    // value is only defined modulo gcd of the pair values, which is 1.
    #[test]
    fn chain_triple_mu_collapses_to_indeterminacy() {
        let d = chain3();
        assert_eq!(d.n_components(), 3);
        let lk = linking_matrix(&d);
        assert_eq!(lk[0][1].abs(), 1);
        assert_eq!(lk[1][2].abs(), 1);
        assert_eq!(lk[0][2], 0);
        let m = mu_bar(&d, &[1, 2, 3], 4).unwrap();
        assert_eq!(m.delta, Int::from(1));
        assert_eq!(m.value, Int::from(0));
    }

    #[test]
    fn mu_table_enumerates_lexicographically() {
        let all = mu_values_through(&hopf(), 3, 4).unwrap();
        let seqs: Vec<Vec<usize>> = all.iter().map(|m| m.sequence.clone()).collect();
        assert_eq!(seqs.len(), 4 + 8);
        assert_eq!(seqs[0], vec![1, 1]);
        assert_eq!(seqs[1], vec![1, 2]);
        assert_eq!(seqs[2], vec![2, 1]);
        assert_eq!(seqs[3], vec![2, 2]);
        assert_eq!(seqs[4], vec![1, 1, 1]);
        assert_eq!(seqs.last().unwrap(), &vec![2, 2, 2]);
    }

    #[test]
    fn singular_link_validates_points() {
        let d = hopf();
        assert_eq!(
            SingularLink::new(d.clone(), vec![5]).unwrap_err(),
            InvariantError::DoublePointOutOfRange { index: 5, crossings: 2 }
        );
        assert_eq!(
            SingularLink::new(d, vec![0, 0]).unwrap_err(),
            InvariantError::DuplicateDoublePoint(0)
        );
    }

    #[test]
    fn no_double_points_evaluates_the_link() {
        let s = SingularLink::new(hopf(), vec![]).unwrap();
        assert_eq!(vassiliev_eval(InvariantHandle::Linking(0, 1), &s, 16).unwrap(), Int::from(1));
        assert_eq!(vassiliev_eval(InvariantHandle::ConwayCoeff(1), &s, 16).unwrap(), Int::from(1));
    }

    #[test]
    fn one_double_point_takes_a_difference() {
        // The positive resolution is the Hopf link (lk 1, c_1 = 1); the
        // negative one unlinks (both values 0). The extension reports the
        // difference.
        let s = SingularLink::new(hopf(), vec![0]).unwrap();
        let v = vassiliev_eval(InvariantHandle::ConwayCoeff(1), &s, 16).unwrap();
        assert_eq!(v, Int::from(1));
        let v = vassiliev_eval(InvariantHandle::Linking(0, 1), &s, 16).unwrap();
        assert_eq!(v, Int::from(1));
    }

    #[test]
    fn profile_of_unlink_matches() {
        let p = finite_type_profile(&unlink(3), 3, 16).unwrap();
        assert!(p.matches_unlink);
        assert!(p.conway.is_empty());
    }

    #[test]
    fn profile_of_hopf_fails_at_order_one() {
        let p = finite_type_profile(&hopf(), 1, 16).unwrap();
        assert!(!p.matches_unlink);
        let p = finite_type_profile(&hopf(), 0, 16).unwrap();
        assert!(p.matches_unlink, "no invariant of order 0 separates links");
    }

    #[test]
    fn profile_of_trefoil_needs_order_two() {
        let p = finite_type_profile(&trefoil(), 1, 16).unwrap();
        assert!(p.matches_unlink, "a knot looks unknotted through order 1");
        let p = finite_type_profile(&trefoil(), 2, 16).unwrap();
        assert!(!p.matches_unlink);
        assert_eq!(p.conway.get(&2), Some(&Int::from(1)));
    }

    #[test]
    fn report_serializes_to_the_documented_shape() {
        let report = InvariantReport {
            mu: vec![MuRecord { sequence: vec![1, 1, 2, 2], value: 1, delta: 0 }],
            conway: [(3usize, 1i64)].into_iter().collect(),
            lk: vec![vec![0, 0], vec![0, 0]],
        };
        let json = serde_json::to_string(&report).unwrap();
        assert_eq!(
            json,
            r#"{"mu":[{"I":[1,1,2,2],"value":1,"delta":0}],"conway":{"3":1},"lk":[[0,0],[0,0]]}"#
        );
        let back: InvariantReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn report_builds_from_exact_values() {
        let d = hopf();
        let mu = vec![mu_bar(&d, &[1, 2], 4).unwrap()];
        let nabla = conway(&d, 16).unwrap();
        let report = InvariantReport::build(&mu, &nabla, linking_matrix(&d)).unwrap();
        assert_eq!(report.mu[0].value, 1);
        assert_eq!(report.conway.get(&1), Some(&1));
        assert_eq!(report.lk, vec![vec![0, 1], vec![1, 0]]);
    }

    fn arb_plat() -> impl Strategy<Value = LinkDiagram> {
        let clasp = (1usize..4, prop::bool::ANY);
        prop::collection::vec(clasp, 0..5).prop_map(|clasps| {
            let mut letters = Vec::new();
            for (g, inv) in clasps {
                let s = if inv { -1i8 } else { 1 };
                letters.push((g, s));
                letters.push((g, s));
            }
            BraidWord::new(4, letters).unwrap().plat_closure().unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn pair_mu_equals_linking_entries(d in arb_plat()) {
            let lk = linking_matrix(&d);
            let cm = chen_milnor_series(&d, 3).unwrap();
            for i in 1..=d.n_components() {
                for j in 1..=d.n_components() {
                    if i == j { continue; }
                    let m = mu_from_series(&cm, &[i, j]).unwrap();
                    prop_assert_eq!(m.delta, Int::from(0));
                    prop_assert_eq!(m.value, Int::from(lk[i - 1][j - 1]));
                }
            }
        }

        // Isotopy stability of the first interesting value: kinks change
        // the diagram but not any mu-bar with vanishing indeterminacy.
        #[test]
        fn pair_mu_survives_curls(
            d in arb_plat(),
            comp in 0usize..2,
            sign in prop_oneof![Just(1i8), Just(-1i8)],
        ) {
            let kinked = d.add_kink(comp, sign).unwrap();
            let a = mu_bar(&d, &[1, 2], 3).unwrap();
            let b = mu_bar(&kinked, &[1, 2], 3).unwrap();
            prop_assert_eq!(a.value, b.value);
        }

        // Order bounds: an invariant of order m vanishes on any singular
        // link with m + 1 double points.
        #[test]
        fn linking_dies_on_two_double_points(
            d in arb_plat().prop_filter("needs 2 crossings", |d| d.n_crossings() >= 2),
            pick in any::<prop::sample::Index>(),
        ) {
            let ci = pick.index(d.n_crossings() - 1);
            let s = SingularLink::new(d, vec![ci, ci + 1]).unwrap();
            let v = vassiliev_eval(InvariantHandle::Linking(0, 1), &s, 16).unwrap();
            prop_assert_eq!(v, Int::from(0));
        }

        #[test]
        fn low_conway_coefficients_die_on_excess_double_points(
            d in arb_plat().prop_filter("needs 3 crossings", |d| d.n_crossings() >= 3),
            pick in any::<prop::sample::Index>(),
            m in 1usize..3,
        ) {
            let start = pick.index(d.n_crossings() - m);
            let points: Vec<usize> = (start..=start + m).collect();
            let s = SingularLink::new(d, points).unwrap();
            let v = vassiliev_eval(InvariantHandle::ConwayCoeff(m), &s, 16).unwrap();
            prop_assert_eq!(v, Int::from(0));
        }
    }
}
