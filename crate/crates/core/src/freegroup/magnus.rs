use std::collections::BTreeMap;
use std::fmt;

use crate::Scalar;

use super::FreeWord;

/// Truncated Magnus expansion: an element of the ring of noncommutative
/// power series `Z<<X1..Xn>>` with every monomial of degree > `cap` dropped.
///
/// Terms map a monomial (sequence of 1-based generator indices, the empty
/// sequence being the constant term) to a nonzero coefficient; zero
/// coefficients are never stored, so `==` is ring equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MagnusSeries<C: Scalar> {
    rank: usize,
    cap: usize,
    terms: BTreeMap<Vec<u16>, C>,
}

impl<C: Scalar> MagnusSeries<C> {
    pub fn zero(rank: usize, cap: usize) -> Self {
        assert!(cap >= 1, "degree cap must be at least 1");
        MagnusSeries { rank, cap, terms: BTreeMap::new() }
    }

    pub fn one(rank: usize, cap: usize) -> Self {
        let mut s = Self::zero(rank, cap);
        s.terms.insert(Vec::new(), C::one());
        s
    }

    /// The expansion of a single letter: `1 + X` for a generator,
    /// `1 - X + X^2 - ...` (the exact truncated inverse) for its inverse.
    pub fn letter(rank: usize, cap: usize, gen: usize, exp: i8) -> Self {
        assert!(gen >= 1 && gen <= rank, "generator out of range");
        let mut s = Self::one(rank, cap);
        if exp > 0 {
            s.terms.insert(vec![gen as u16], C::one());
        } else {
            let mut sign_pos = false;
            for deg in 1..=cap {
                let c = if sign_pos { C::one() } else { -C::one() };
                s.terms.insert(vec![gen as u16; deg], c);
                sign_pos = !sign_pos;
            }
        }
        s
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&Vec::new()).map(|c| c.is_one()) == Some(true)
    }

    pub fn coefficient(&self, monomial: &[usize]) -> C {
        let key: Vec<u16> = monomial.iter().map(|&g| g as u16).collect();
        self.terms.get(&key).cloned().unwrap_or_else(C::zero)
    }

    /// Nonzero terms as `(monomial, coefficient)` pairs in monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, &C)> + '_ {
        self.terms.iter().map(|(m, c)| (m.iter().map(|&g| g as usize).collect(), c))
    }

    /// Smallest degree with a nonzero term in `self - 1`, if any.
    pub fn min_positive_degree(&self) -> Option<usize> {
        self.terms.keys().filter(|m| !m.is_empty()).map(|m| m.len()).min()
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.rank, other.rank, "rank mismatch");
        assert_eq!(self.cap, other.cap, "cap mismatch");
        let mut terms: BTreeMap<Vec<u16>, C> = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if a.len() + b.len() > self.cap {
                    continue;
                }
                let mut key = Vec::with_capacity(a.len() + b.len());
                key.extend_from_slice(a);
                key.extend_from_slice(b);
                let c = ca.clone() * cb.clone();
                match terms.entry(key) {
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        *e.get_mut() += c;
                        if e.get().is_zero() {
                            e.remove();
                        }
                    }
                    std::collections::btree_map::Entry::Vacant(e) => {
                        if !c.is_zero() {
                            e.insert(c);
                        }
                    }
                }
            }
        }
        MagnusSeries { rank: self.rank, cap: self.cap, terms }
    }

    /// Exact inverse in the truncated ring; requires constant term 1.
    ///
    /// With `self = 1 + N` (N of positive degree) this is the geometric
    /// series `1 - N + N^2 - ...`, which terminates at the cap.
    pub fn inverse(&self) -> Self {
        assert!(
            self.terms.get(&Vec::new()).map(|c| c.is_one()) == Some(true),
            "inverse requires constant term 1"
        );
        let mut n = self.clone();
        n.terms.remove(&Vec::new());
        let mut out = Self::one(self.rank, self.cap);
        let mut power = Self::one(self.rank, self.cap);
        let mut negate = true;
        for _ in 0..self.cap {
            power = power.mul(&n);
            if power.terms.is_empty() {
                break;
            }
            for (m, c) in &power.terms {
                let c = if negate { -c.clone() } else { c.clone() };
                match out.terms.entry(m.clone()) {
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        *e.get_mut() += c;
                        if e.get().is_zero() {
                            e.remove();
                        }
                    }
                    std::collections::btree_map::Entry::Vacant(e) => {
                        if !c.is_zero() {
                            e.insert(c);
                        }
                    }
                }
            }
            negate = !negate;
        }
        out
    }

    pub fn add_scaled(&mut self, other: &Self, scale: &C) {
        assert_eq!(self.rank, other.rank);
        assert_eq!(self.cap, other.cap);
        for (m, c) in &other.terms {
            let c = scale.clone() * c.clone();
            match self.terms.entry(m.clone()) {
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    *e.get_mut() += c;
                    if e.get().is_zero() {
                        e.remove();
                    }
                }
                std::collections::btree_map::Entry::Vacant(e) => {
                    if !c.is_zero() {
                        e.insert(c);
                    }
                }
            }
        }
    }

    /// Truncates every term of degree <= `degree` away or keeps them: the
    /// homogeneous part of the given degree.
    pub fn homogeneous_part(&self, degree: usize) -> BTreeMap<Vec<usize>, C> {
        self.terms
            .iter()
            .filter(|(m, _)| m.len() == degree)
            .map(|(m, c)| (m.iter().map(|&g| g as usize).collect(), c.clone()))
            .collect()
    }
}

impl<C: Scalar> fmt::Display for MagnusSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut sorted: Vec<_> = self.terms.iter().collect();
        sorted.sort_by(|(a, _), (b, _)| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let mut first = true;
        for (m, c) in sorted {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if m.is_empty() {
                write!(f, "{}", c)?;
            } else {
                let mono: Vec<String> = m.iter().map(|g| format!("X{}", g)).collect();
                write!(f, "{}·{}", c, mono.join(""))?;
            }
        }
        Ok(())
    }
}

/// Magnus expansion of a word, truncated at degree `cap`.
///
/// Multiplicative in the word: letters map to [`MagnusSeries::letter`] and
/// the images multiply in the truncated ring, so freely equal words share an
/// expansion.
pub fn magnus<C: Scalar>(word: &FreeWord, cap: usize) -> MagnusSeries<C> {
    let mut out = MagnusSeries::one(word.rank(), cap);
    for (gen, exp) in word.letters() {
        out = out.mul(&MagnusSeries::letter(word.rank(), cap, gen, exp));
    }
    out
}

/// Position of a word in the lower central series, certified at cap `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LcsDepth {
    /// Largest `m <= d` with the word in the m-th lower central term.
    pub depth: usize,
    /// True when the truncated expansion is exactly 1, so the word sits at
    /// least `d` deep and `depth` is only a lower bound.
    pub saturated: bool,
}

/// Where `w` sits in the lower central series `F = F(1) ⊇ F(2) ⊇ ...`,
/// measured through the Magnus criterion: `w ∈ F(m)` iff every term of
/// `magnus(w) - 1` has degree >= m.
///
/// When the truncated series is exactly 1 nothing below degree `d` obstructs,
/// so the result saturates at `d` and is flagged as a lower bound.
pub fn lcs_depth(word: &FreeWord, d: usize) -> LcsDepth {
    let series: MagnusSeries<crate::Int> = magnus(word, d);
    match series.min_positive_degree() {
        Some(deg) => LcsDepth { depth: deg.min(d), saturated: false },
        None => LcsDepth { depth: d, saturated: true },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Int;
    use proptest::prelude::*;

    fn w(rank: usize, s: &str) -> FreeWord {
        FreeWord::parse(s, Some(rank)).unwrap()
    }

    fn series(rank: usize, s: &str, cap: usize) -> MagnusSeries<Int> {
        magnus(&w(rank, s), cap)
    }

    #[test]
    fn generator_expands_to_one_plus_x() {
        let s = series(1, "x1", 2);
        assert_eq!(s.coefficient(&[]), Int::from(1));
        assert_eq!(s.coefficient(&[1]), Int::from(1));
        assert_eq!(s.coefficient(&[1, 1]), Int::from(0));
    }

    #[test]
    fn inverse_generator_expands_to_alternating_series() {
        let s = series(1, "x1^-1", 2);
        assert_eq!(s.coefficient(&[]), Int::from(1));
        assert_eq!(s.coefficient(&[1]), Int::from(-1));
        assert_eq!(s.coefficient(&[1, 1]), Int::from(1));
    }

    #[test]
    fn commutator_expands_to_one_plus_bracket() {
        // magnus([x,y]) = 1 + XY - YX at cap 2.
        let s = series(2, "[x1,x2]", 2);
        assert_eq!(s.coefficient(&[]), Int::from(1));
        assert_eq!(s.coefficient(&[1]), Int::from(0));
        assert_eq!(s.coefficient(&[2]), Int::from(0));
        assert_eq!(s.coefficient(&[1, 2]), Int::from(1));
        assert_eq!(s.coefficient(&[2, 1]), Int::from(-1));
        assert_eq!(s.coefficient(&[1, 1]), Int::from(0));
    }

    #[test]
    fn letter_times_inverse_letter_is_one() {
        let x: MagnusSeries<Int> = MagnusSeries::letter(2, 6, 1, 1);
        let xi: MagnusSeries<Int> = MagnusSeries::letter(2, 6, 1, -1);
        assert!(x.mul(&xi).is_one());
        assert!(xi.mul(&x).is_one());
    }

    #[test]
    fn series_inverse_matches_word_inverse() {
        let word = w(2, "x1 x2^-1 x1 x2");
        let s: MagnusSeries<Int> = magnus(&word, 5);
        let t: MagnusSeries<Int> = magnus(&word.invert(), 5);
        assert_eq!(s.inverse(), t);
        assert!(s.mul(&t).is_one());
    }

    #[test]
    fn lcs_depth_of_generator_is_one() {
        assert_eq!(lcs_depth(&w(2, "x1"), 5), LcsDepth { depth: 1, saturated: false });
    }

    #[test]
    fn lcs_depth_of_commutator_is_two() {
        assert_eq!(lcs_depth(&w(2, "[x1,x2]"), 5), LcsDepth { depth: 2, saturated: false });
    }

    #[test]
    fn lcs_depth_of_iterated_commutator() {
        // [[x,y],y^-1] lies exactly three deep.
        assert_eq!(
            lcs_depth(&w(2, "[[x1,x2],x2^-1]"), 5),
            LcsDepth { depth: 3, saturated: false }
        );
    }

    #[test]
    fn lcs_depth_saturates_on_trivial_words() {
        assert_eq!(lcs_depth(&FreeWord::empty(2), 4), LcsDepth { depth: 4, saturated: true });
        assert_eq!(lcs_depth(&w(1, "x1 x1^-1"), 3), LcsDepth { depth: 3, saturated: true });
    }

    #[test]
    fn depth_two_word_keeps_visible_top_term() {
        // At cap 2 the commutator's obstruction is visible at the cap itself.
        assert_eq!(lcs_depth(&w(2, "[x1,x2]"), 2), LcsDepth { depth: 2, saturated: false });
    }

    fn arb_word() -> impl Strategy<Value = FreeWord> {
        proptest::collection::vec((1usize..=3, prop_oneof![Just(1i8), Just(-1i8)]), 0..12)
            .prop_map(|ls| FreeWord::from_letters(3, ls).unwrap())
    }

    proptest! {
        #[test]
        fn magnus_is_multiplicative(u in arb_word(), v in arb_word()) {
            let uv = u.multiply(&v).unwrap();
            let lhs: MagnusSeries<Int> = magnus(&uv, 4);
            let rhs = magnus::<Int>(&u, 4).mul(&magnus::<Int>(&v, 4));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn magnus_ignores_free_reduction(u in arb_word()) {
            let direct: MagnusSeries<Int> = magnus(&u, 4);
            let reduced: MagnusSeries<Int> = magnus(&u.reduce(), 4);
            prop_assert_eq!(direct, reduced);
        }

        #[test]
        fn word_inverse_gives_series_inverse(u in arb_word()) {
            let s = magnus::<Int>(&u, 4).mul(&magnus::<Int>(&u.invert(), 4));
            prop_assert!(s.is_one());
        }
    }
}
