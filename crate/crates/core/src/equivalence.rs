//! Crossing-switch certificates and the mu-bar side of link triviality.
//!
//! A certificate claims that a diagram becomes a given target link when the
//! crossings of any non-empty selection from a collection of disjoint sets
//! are switched. [`verify_certificate`] checks every selection mechanically:
//! a selection refutes the claim when any computed invariant separates the
//! switched diagram from the target, and supports it when the switched
//! diagram simplifies to the target within budget. Unlink recognition is a
//! semi-decision, so `inconclusive` is a first-class outcome and is never
//! coerced to either answer.
//!
//! The remaining entry points tie the longitude expansions to the finite
//! type profile: [`theorem1_check`] records the two vanishing thresholds
//! (sequence lengths `m+1` and `m+2`) next to the profile through order `m`,
//! [`corollary32_scan`] looks for a nonvanishing mu-bar witness below a cap,
//! and [`is_brunnian`] tests every proper sublink for triviality.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::Config;
use crate::diagram::{simplify, DiagramError, LinkDiagram, PdCode, PdCodeError};
use crate::invariants::{
    finite_type_profile, linking_matrix, ConwayEngine, ConwayPolynomial, FiniteTypeProfile,
    InvariantError,
};
use crate::linkgroup::{chen_milnor_series, ChenMilnor};
use crate::Int;

#[derive(Debug, Error)]
pub enum EquivalenceError {
    #[error("certificate needs at least one crossing set")]
    EmptyCollection,
    #[error("crossing set {0} is empty")]
    EmptySet(usize),
    #[error("crossing {0} appears in more than one set")]
    RepeatedCrossing(usize),
    #[error("crossing {crossing} is out of range for a diagram with {crossings} crossings")]
    CrossingOutOfRange { crossing: usize, crossings: usize },
    #[error("a collection of {0} sets needs 2^{0} - 1 switched diagrams; the limit is 16 sets")]
    TooManySets(usize),
    #[error("unlink target needs at least one component")]
    EmptyUnlink,
    #[error("cannot parse target {0:?}; expected \"unlink:<n>\" or a pd object")]
    BadTarget(String),
    #[error("certificate json: {0}")]
    Json(String),
    #[error("need at least two components, got {0}")]
    TooFewComponents(usize),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Pd(#[from] PdCodeError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// What a certificate claims the switched diagrams are.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    /// The trivial link on this many components.
    Unlink(usize),
    /// An explicit diagram of the target link.
    Diagram(LinkDiagram),
}

/// A claim that a diagram is `m`-equivalent to a target, where `m + 1` is
/// the number of crossing sets: switching the union of any non-empty
/// selection of sets must yield the target link.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    diagram: LinkDiagram,
    collection: Vec<Vec<usize>>,
    target: Target,
}

#[derive(Serialize, Deserialize)]
struct CertificateRepr {
    pd: PdCode,
    collection: Vec<Vec<usize>>,
    target: TargetRepr,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TargetRepr {
    Name(String),
    Diagram { pd: PdCode },
}

impl Certificate {
    /// Validates disjointness, non-emptiness, and crossing ranges.
    pub fn new(
        diagram: LinkDiagram,
        collection: Vec<Vec<usize>>,
        target: Target,
    ) -> Result<Self, EquivalenceError> {
        if collection.is_empty() {
            return Err(EquivalenceError::EmptyCollection);
        }
        if collection.len() > 16 {
            return Err(EquivalenceError::TooManySets(collection.len()));
        }
        if target == Target::Unlink(0) {
            return Err(EquivalenceError::EmptyUnlink);
        }
        let mut seen = vec![false; diagram.n_crossings()];
        for (i, set) in collection.iter().enumerate() {
            if set.is_empty() {
                return Err(EquivalenceError::EmptySet(i));
            }
            for &id in set {
                if id >= diagram.n_crossings() {
                    return Err(EquivalenceError::CrossingOutOfRange {
                        crossing: id,
                        crossings: diagram.n_crossings(),
                    });
                }
                if seen[id] {
                    return Err(EquivalenceError::RepeatedCrossing(id));
                }
                seen[id] = true;
            }
        }
        let collection = collection
            .into_iter()
            .map(|mut set| {
                set.sort_unstable();
                set
            })
            .collect();
        Ok(Certificate { diagram, collection, target })
    }

    pub fn diagram(&self) -> &LinkDiagram {
        &self.diagram
    }

    pub fn collection(&self) -> &[Vec<usize>] {
        &self.collection
    }

    pub fn target(&self) -> &Target {
        &self.target
    }

    /// The `m` of the equivalence claim: one less than the set count.
    pub fn order(&self) -> usize {
        self.collection.len() - 1
    }

    pub fn from_json(text: &str) -> Result<Self, EquivalenceError> {
        let repr: CertificateRepr =
            serde_json::from_str(text).map_err(|e| EquivalenceError::Json(e.to_string()))?;
        let diagram = repr.pd.to_diagram()?;
        let target = match repr.target {
            TargetRepr::Name(name) => {
                let n = name
                    .strip_prefix("unlink:")
                    .and_then(|rest| rest.trim().parse::<usize>().ok())
                    .ok_or(EquivalenceError::BadTarget(name))?;
                Target::Unlink(n)
            }
            TargetRepr::Diagram { pd } => Target::Diagram(pd.to_diagram()?),
        };
        Certificate::new(diagram, repr.collection, target)
    }

    pub fn to_json(&self) -> String {
        let repr = CertificateRepr {
            pd: self.diagram.pd_code(),
            collection: self.collection.clone(),
            target: match &self.target {
                Target::Unlink(n) => TargetRepr::Name(format!("unlink:{n}")),
                Target::Diagram(d) => TargetRepr::Diagram { pd: d.pd_code() },
            },
        };
        serde_json::to_string_pretty(&repr).expect("certificate data serializes")
    }
}

/// The invariant that separated a switched diagram from the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefutedBy {
    Components,
    Linking,
    Conway,
    MuBar,
}

/// Result of checking a certificate. Selections are listed by the indices
/// of the chosen sets within the collection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyOutcome {
    /// Every selection simplified to the target.
    Verified,
    /// Some selection provably differs from the target.
    Refuted { selection: Vec<usize>, witness: RefutedBy },
    /// No selection refuted the claim but this one resisted simplification.
    Inconclusive { selection: Vec<usize> },
}

impl VerifyOutcome {
    pub fn is_verified(&self) -> bool {
        matches!(self, VerifyOutcome::Verified)
    }

    pub fn word(&self) -> &'static str {
        match self {
            VerifyOutcome::Verified => "verified",
            VerifyOutcome::Refuted { .. } => "refuted",
            VerifyOutcome::Inconclusive { .. } => "inconclusive",
        }
    }
}

impl fmt::Display for VerifyOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.word())
    }
}

fn unlink_conway(components: usize) -> ConwayPolynomial<Int> {
    if components == 1 {
        ConwayPolynomial::one()
    } else {
        ConwayPolynomial::zero()
    }
}

/// True when every longitude series has no term of degree below `max_len`,
/// i.e. every mu-bar value over a sequence of length at most `max_len`
/// vanishes. Errors when the series cap cannot see that far.
pub fn mu_vanish_through(cm: &ChenMilnor, max_len: usize) -> Result<bool, InvariantError> {
    if max_len >= 2 && cm.cap() + 1 < max_len {
        return Err(InvariantError::CapTooSmall { cap: cm.cap(), needed: max_len - 1 });
    }
    Ok((0..cm.n_components()).all(|c| {
        cm.longitude_series(c)
            .min_positive_degree()
            .map_or(true, |deg| deg >= max_len)
    }))
}

fn lk_is_zero(d: &LinkDiagram) -> bool {
    linking_matrix(d).iter().all(|row| row.iter().all(|&v| v == 0))
}

/// Rows of the linking matrix, each sorted, the list of rows sorted. Equal
/// links give equal values no matter how components are numbered.
fn lk_row_multiset(d: &LinkDiagram) -> Vec<Vec<i64>> {
    let mut rows = linking_matrix(d);
    for row in &mut rows {
        row.sort_unstable();
    }
    rows.sort();
    rows
}

/// Checks each of the `2^(m+1) - 1` selections in binary counter order
/// (bit `i` of the counter picks set `i`). Each switched diagram is first
/// simplified; a diagram that does not reach the target is then attacked
/// with invariants of the reduced diagram, which present the same link.
/// The first refuting selection wins; otherwise the first unresolved one
/// makes the outcome inconclusive.
pub fn verify_certificate(
    c: &Certificate,
    cfg: &Config,
) -> Result<VerifyOutcome, EquivalenceError> {
    let k = c.collection.len();
    let mut engine: ConwayEngine<Int> = ConwayEngine::new(cfg.conway_crossing_bound);

    let (target_components, target_reduced) = match &c.target {
        Target::Unlink(n) => (*n, None),
        Target::Diagram(t) => (t.n_components(), Some(simplify(t, cfg.simplify_budget))),
    };
    let target_conway = match (&c.target, &target_reduced) {
        (Target::Unlink(n), _) => Some(unlink_conway(*n)),
        (Target::Diagram(_), Some(tr)) if tr.n_crossings() <= cfg.conway_crossing_bound => {
            Some(engine.eval(tr)?)
        }
        _ => None,
    };
    let target_lk_rows = target_reduced.as_ref().map(lk_row_multiset);

    let mut unresolved: Option<Vec<usize>> = None;
    for mask in 1u32..(1 << k) {
        let selection: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
        let refuted = |witness| {
            Ok(VerifyOutcome::Refuted { selection: selection.clone(), witness })
        };
        let ids: Vec<usize> = selection
            .iter()
            .flat_map(|&i| c.collection[i].iter().copied())
            .collect();
        let switched = c.diagram.switch_crossings(&ids)?;
        if switched.n_components() != target_components {
            return refuted(RefutedBy::Components);
        }
        let red = simplify(&switched, cfg.simplify_budget);
        let reached = match &target_reduced {
            None => red.n_crossings() == 0,
            Some(tr) => red == *tr || (red.n_crossings() == 0 && tr.n_crossings() == 0),
        };
        if reached {
            continue;
        }

        match &c.target {
            Target::Unlink(_) => {
                if !lk_is_zero(&red) {
                    return refuted(RefutedBy::Linking);
                }
                if red.n_crossings() <= cfg.conway_crossing_bound {
                    if engine.eval(&red)? != *target_conway.as_ref().expect("unlink target") {
                        return refuted(RefutedBy::Conway);
                    }
                }
                if cfg.mu_cap >= 2 && red.n_components() >= 2 {
                    let cm = chen_milnor_series(&red, cfg.mu_cap)
                        .map_err(InvariantError::from)?;
                    if !mu_vanish_through(&cm, cfg.mu_cap)? {
                        return refuted(RefutedBy::MuBar);
                    }
                }
            }
            Target::Diagram(_) => {
                // Mu-bar tables are indexed by component numbers, which need
                // not correspond between independent diagrams, so only
                // numbering-free invariants may refute here.
                if lk_row_multiset(&red) != *target_lk_rows.as_ref().expect("diagram target") {
                    return refuted(RefutedBy::Linking);
                }
                if let Some(tc) = &target_conway {
                    if red.n_crossings() <= cfg.conway_crossing_bound && engine.eval(&red)? != *tc
                    {
                        return refuted(RefutedBy::Conway);
                    }
                }
            }
        }
        if unresolved.is_none() {
            unresolved = Some(selection);
        }
    }
    Ok(match unresolved {
        Some(selection) => VerifyOutcome::Inconclusive { selection },
        None => VerifyOutcome::Verified,
    })
}

fn profiles_agree(a: &FiniteTypeProfile, b: &FiniteTypeProfile) -> bool {
    let sorted = |p: &FiniteTypeProfile| {
        let mut rows: Vec<Vec<i64>> = p.lk.iter().cloned().collect();
        for row in &mut rows {
            row.sort_unstable();
        }
        rows.sort();
        rows
    };
    a.order == b.order && a.lk.len() == b.lk.len() && a.conway == b.conway && sorted(a) == sorted(b)
}

/// The executable form of the statement that `m`-equivalent links share all
/// finite type invariants through order `m`: compares the profile of the
/// certificate's diagram with the target's. Call on a verified certificate;
/// a `false` is a soundness alarm, not a routine answer.
pub fn m_equivalence_implies_profile(
    c: &Certificate,
    m: usize,
    cfg: &Config,
) -> Result<bool, EquivalenceError> {
    let pd = finite_type_profile(&c.diagram, m, cfg.conway_crossing_bound)?;
    Ok(match &c.target {
        Target::Unlink(n) => pd.matches_unlink && pd.lk.len() == *n,
        Target::Diagram(t) => {
            let pt = finite_type_profile(t, m, cfg.conway_crossing_bound)?;
            profiles_agree(&pd, &pt)
        }
    })
}

/// Which proper sublinks [`is_brunnian`] inspects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SublinkScope {
    /// All `2^n - 2` proper sublinks.
    #[default]
    Full,
    /// Only the `n` sublinks obtained by deleting one component.
    Weak,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrunnianReport {
    pub brunnian: bool,
    /// Some sublink resisted simplification without any invariant refuting
    /// its triviality; `brunnian` is then conservatively false.
    pub inconclusive: bool,
    /// Kept component indices (0-based) of the first sublink that failed.
    pub failing_sublink: Option<Vec<usize>>,
}

/// Tests whether every proper sublink is trivial. A sublink counts as
/// trivial when it simplifies to a crossing-free diagram; one that does not
/// is refuted by linking numbers, the Conway polynomial, or mu-bar reads,
/// and is otherwise inconclusive.
pub fn is_brunnian(
    d: &LinkDiagram,
    scope: SublinkScope,
    cfg: &Config,
) -> Result<BrunnianReport, EquivalenceError> {
    let n = d.n_components();
    if n < 2 {
        return Err(EquivalenceError::TooFewComponents(n));
    }
    let kept_sets: Vec<Vec<usize>> = match scope {
        SublinkScope::Full => (1..(1u32 << n) - 1)
            .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
            .collect(),
        SublinkScope::Weak => (0..n)
            .map(|skip| (0..n).filter(|&i| i != skip).collect())
            .collect(),
    };
    let mut engine: ConwayEngine<Int> = ConwayEngine::new(cfg.conway_crossing_bound);
    let mut soft_failure: Option<Vec<usize>> = None;
    for kept in kept_sets {
        let removed: Vec<usize> = (0..n).filter(|i| !kept.contains(i)).collect();
        let sub = d.delete_components(&removed)?;
        let red = simplify(&sub, cfg.simplify_budget);
        if red.n_crossings() == 0 {
            continue;
        }
        let hard = |kept: Vec<usize>| {
            Ok(BrunnianReport { brunnian: false, inconclusive: false, failing_sublink: Some(kept) })
        };
        if !lk_is_zero(&red) {
            return hard(kept);
        }
        if red.n_crossings() <= cfg.conway_crossing_bound
            && engine.eval(&red)? != unlink_conway(red.n_components())
        {
            return hard(kept);
        }
        if red.n_components() >= 2 && cfg.mu_cap >= 2 {
            let cm = chen_milnor_series(&red, cfg.mu_cap).map_err(InvariantError::from)?;
            if !mu_vanish_through(&cm, cfg.mu_cap)? {
                return hard(kept);
            }
        }
        if soft_failure.is_none() {
            soft_failure = Some(kept);
        }
    }
    Ok(match soft_failure {
        Some(kept) => BrunnianReport {
            brunnian: false,
            inconclusive: true,
            failing_sublink: Some(kept),
        },
        None => BrunnianReport { brunnian: true, inconclusive: false, failing_sublink: None },
    })
}

/// Longitude vanishing thresholds next to the finite type profile.
///
/// The two directions being monitored: a profile that matches the unlink
/// through order `m` must come with vanishing mu-bar through length `m+1`,
/// and vanishing mu-bar through length `m+2` must come with a matching
/// profile. A `false` in either consistency field is a soundness alarm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theorem1Report {
    pub order: usize,
    /// Every mu-bar value over a sequence of length <= order + 1 vanishes.
    pub mu_vanish_short: bool,
    /// Every mu-bar value over a sequence of length <= order + 2 vanishes.
    pub mu_vanish_long: bool,
    pub profile: FiniteTypeProfile,
    /// profile matches the unlink => mu_vanish_short.
    pub forward_consistent: bool,
    /// mu_vanish_long => profile matches the unlink.
    pub converse_consistent: bool,
}

impl Theorem1Report {
    pub fn consistent(&self) -> bool {
        self.forward_consistent && self.converse_consistent
    }
}

pub fn theorem1_check(
    d: &LinkDiagram,
    m: usize,
    cfg: &Config,
) -> Result<Theorem1Report, EquivalenceError> {
    let cm = chen_milnor_series(d, m + 2).map_err(InvariantError::from)?;
    let mu_vanish_short = mu_vanish_through(&cm, m + 1)?;
    let mu_vanish_long = mu_vanish_through(&cm, m + 2)?;
    let profile = finite_type_profile(d, m, cfg.conway_crossing_bound)?;
    let forward_consistent = !profile.matches_unlink || mu_vanish_short;
    let converse_consistent = !mu_vanish_long || profile.matches_unlink;
    Ok(Theorem1Report {
        order: m,
        mu_vanish_short,
        mu_vanish_long,
        profile,
        forward_consistent,
        converse_consistent,
    })
}

/// Outcome of scanning a link for triviality via longitude reads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnlinkScan {
    /// All reads vanish and the diagram simplifies to a crossing-free one.
    TrivialCertified,
    /// All reads through the cap vanish but simplification stalled; the
    /// link is trivial exactly when every longer read also vanishes, which
    /// this cap cannot see.
    UndeterminedAtCap { cap: usize },
    /// A nonvanishing mu-bar value; minimal length, so its indeterminacy
    /// is zero and the link is certainly not an unlink.
    Nontrivial { sequence: Vec<usize>, value: Int },
}

impl fmt::Display for UnlinkScan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnlinkScan::TrivialCertified => write!(f, "trivial (certified)"),
            UnlinkScan::UndeterminedAtCap { cap } => write!(f, "undetermined at cap {cap}"),
            UnlinkScan::Nontrivial { sequence, value } => {
                let seq: Vec<String> = sequence.iter().map(|i| i.to_string()).collect();
                let sep = if sequence.iter().all(|&i| i <= 9) { "" } else { "," };
                write!(f, "nontrivial (mu({}) = {})", seq.join(sep), value)
            }
        }
    }
}

/// Searches sequences of length at most `cap` for a nonvanishing mu-bar
/// value. Finding one proves the link nontrivial. Finding none, the scan
/// falls back to simplification, which can certify triviality but not
/// refute it, hence the third outcome.
pub fn corollary32_scan(
    d: &LinkDiagram,
    cap: usize,
    cfg: &Config,
) -> Result<UnlinkScan, EquivalenceError> {
    if cap < 2 {
        return Err(InvariantError::CapTooSmall { cap, needed: 2 }.into());
    }
    let cm = chen_milnor_series(d, cap).map_err(InvariantError::from)?;
    let mut best: Option<(usize, usize)> = None;
    for comp in 0..cm.n_components() {
        if let Some(deg) = cm.longitude_series(comp).min_positive_degree() {
            if deg <= cap - 1 && best.map_or(true, |(b, _)| deg < b) {
                best = Some((deg, comp));
            }
        }
    }
    if let Some((deg, comp)) = best {
        let part = cm.longitude_series(comp).homogeneous_part(deg);
        let (monomial, coefficient) = part.iter().next().expect("degree has a term");
        // Monomial entries are already the 1-based component numbers of the
        // meridian variables; the read closes with the longitude's component.
        let mut sequence = monomial.clone();
        sequence.push(comp + 1);
        #[cfg(debug_assertions)]
        {
            let mv = crate::invariants::mu_from_series(&cm, &sequence)
                .expect("witness sequence is in range");
            debug_assert!(mv.delta == Int::from(0) && mv.value == *coefficient);
        }
        return Ok(UnlinkScan::Nontrivial { sequence, value: coefficient.clone() });
    }
    let red = simplify(d, cfg.simplify_budget);
    Ok(if red.n_crossings() == 0 {
        UnlinkScan::TrivialCertified
    } else {
        UnlinkScan::UndeterminedAtCap { cap }
    })
}
