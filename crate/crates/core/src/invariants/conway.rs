//! Conway polynomials by exact skein recursion.
//!
//! The recursion picks the first crossing, in traversal order, that a
//! descending walk meets at its under pass. Switching that crossing strictly
//! extends the descending prefix; smoothing it drops the crossing count;
//! descending diagrams are unlinks. Both branches re-simplify, and finished
//! sub-results are memoized on the simplified diagram value, which collapses
//! most of the exponential tree at this crate's working scale.

use std::collections::HashMap;
use std::fmt;

use crate::diagram::{simplify, LinkDiagram, Pass};
use crate::Scalar;

use super::InvariantError;

/// Move budget for the simplification pass that normalizes memo keys.
const MEMO_SIMPLIFY_BUDGET: usize = 1_000;

/// Polynomial in the skein variable with exact coefficients. Zero
/// coefficients are never stored, so equality is plain map equality.
///
/// For an n-component link the nonzero terms sit in degrees n-1, n+1, ...;
/// the unknot polynomial is 1 and split links give 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConwayPolynomial<C: Scalar> {
    coeffs: std::collections::BTreeMap<usize, C>,
}

impl<C: Scalar> ConwayPolynomial<C> {
    pub fn zero() -> Self {
        ConwayPolynomial { coeffs: Default::default() }
    }

    pub fn one() -> Self {
        Self::from_coeffs([(0, C::one())])
    }

    /// Builds from `(degree, coefficient)` pairs, dropping zeros and summing
    /// duplicate degrees.
    pub fn from_coeffs<I>(coeffs: I) -> Self
    where
        I: IntoIterator<Item = (usize, C)>,
    {
        let mut out = Self::zero();
        for (k, c) in coeffs {
            let slot = out.coeffs.entry(k).or_insert_with(C::zero);
            *slot += c;
            if slot.is_zero() {
                out.coeffs.remove(&k);
            }
        }
        out
    }

    pub fn coefficient(&self, degree: usize) -> C {
        self.coeffs.get(&degree).cloned().unwrap_or_else(C::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &C)> + '_ {
        self.coeffs.iter().map(|(&k, c)| (k, c))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            let slot = out.coeffs.entry(*k).or_insert_with(C::zero);
            *slot += c.clone();
            if slot.is_zero() {
                out.coeffs.remove(k);
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            let slot = out.coeffs.entry(*k).or_insert_with(C::zero);
            *slot += -c.clone();
            if slot.is_zero() {
                out.coeffs.remove(k);
            }
        }
        out
    }

    /// Multiplication by the skein variable to the `shift` power.
    pub fn shift_up(&self, shift: usize) -> Self {
        ConwayPolynomial {
            coeffs: self.coeffs.iter().map(|(&k, c)| (k + shift, c.clone())).collect(),
        }
    }
}

impl<C: Scalar> fmt::Display for ConwayPolynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (&k, c) in &self.coeffs {
            let body = c.to_string();
            let (neg, mag) = match body.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, body),
            };
            if first {
                if neg {
                    f.write_str("-")?;
                }
                first = false;
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            match (k, mag.as_str()) {
                (0, m) => f.write_str(m)?,
                (1, "1") => f.write_str("z")?,
                (1, m) => write!(f, "{m} z")?,
                (_, "1") => write!(f, "z^{k}")?,
                (_, m) => write!(f, "{m} z^{k}")?,
            }
        }
        Ok(())
    }
}

/// Skein evaluator with a memo shared across calls, so batches of related
/// diagrams (resolutions of one singular link, sublinks of one link) reuse
/// each other's subtrees.
pub struct ConwayEngine<C: Scalar> {
    bound: usize,
    memo: HashMap<LinkDiagram, ConwayPolynomial<C>>,
}

impl<C: Scalar> ConwayEngine<C> {
    pub fn new(bound: usize) -> Self {
        ConwayEngine { bound, memo: HashMap::new() }
    }

    /// Full skein recursion. Errors when the input diagram exceeds the
    /// crossing bound; the recursion itself never grows the count.
    pub fn eval(&mut self, d: &LinkDiagram) -> Result<ConwayPolynomial<C>, InvariantError> {
        if d.n_crossings() > self.bound {
            return Err(InvariantError::TooManyCrossings {
                have: d.n_crossings(),
                bound: self.bound,
            });
        }
        Ok(self.run(simplify(d, MEMO_SIMPLIFY_BUDGET)))
    }

    // Precondition: d is simplified output.
    fn run(&mut self, d: LinkDiagram) -> ConwayPolynomial<C> {
        if d.n_crossings() == 0 {
            return if d.n_components() == 1 {
                ConwayPolynomial::one()
            } else {
                ConwayPolynomial::zero()
            };
        }
        if is_split(&d) {
            return ConwayPolynomial::zero();
        }
        if let Some(hit) = self.memo.get(&d) {
            return hit.clone();
        }
        let result = match first_ascending(&d) {
            // Descending diagrams are unlinks, whether or not the crossing
            // pattern looks connected.
            None => {
                if d.n_components() == 1 {
                    ConwayPolynomial::one()
                } else {
                    ConwayPolynomial::zero()
                }
            }
            Some(ci) => {
                let sign = d.crossings()[ci].sign;
                let switched = d.switch_crossings(&[ci]).expect("crossing exists");
                let smoothed = d.smooth_crossing(ci).expect("crossing exists");
                let a = self.run(simplify(&switched, MEMO_SIMPLIFY_BUDGET));
                let b = self.run(simplify(&smoothed, MEMO_SIMPLIFY_BUDGET)).shift_up(1);
                if sign > 0 {
                    a.add(&b)
                } else {
                    a.sub(&b)
                }
            }
        };
        self.memo.insert(d, result.clone());
        result
    }
}

/// One-shot evaluation with a fresh memo.
pub fn conway<C: Scalar>(
    d: &LinkDiagram,
    bound: usize,
) -> Result<ConwayPolynomial<C>, InvariantError> {
    ConwayEngine::new(bound).eval(d)
}

/// True when the components split into groups with no crossings between
/// them. Diagram-level splitness implies the link is split, never the
/// converse, which is the safe direction for the zero base case.
fn is_split(d: &LinkDiagram) -> bool {
    let n = d.n_components();
    if n <= 1 {
        return false;
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for ci in 0..d.n_crossings() {
        let (a, b) = d.strand_components(ci);
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra.max(rb)] = ra.min(rb);
    }
    (0..n).any(|c| find(&mut parent, c) != 0)
}

/// First crossing a descending traversal meets at its under pass, walking
/// components in order from their first edges. `None` means descending.
fn first_ascending(d: &LinkDiagram) -> Option<usize> {
    let inc = d.incidence().expect("validated diagram");
    let mut seen = vec![false; d.n_crossings()];
    for comp in d.components() {
        for &e in comp {
            if let Some((ci, pass)) = inc.head[e] {
                if !seen[ci] {
                    seen[ci] = true;
                    if pass == Pass::Under {
                        return Some(ci);
                    }
                }
            }
        }
    }
    None
}
