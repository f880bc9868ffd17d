//! Braid words, the Artin action on free groups, and closures into diagrams.
//!
//! Generators follow the usual convention: `s<i>` crosses the strands at
//! positions `i` and `i+1` (1-based), with the right strand passing over the
//! left for a positive letter. Words compose left to right, which stacks
//! braid boxes top to bottom in the pictures.

use std::fmt;

use thiserror::Error;

use crate::diagram::{Crossing, LinkDiagram, RawDiagram};
use crate::freegroup::{magnus, FreeWord};
use crate::Int;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BraidError {
    #[error("parse error at byte {at}: {message}")]
    Parse { at: usize, message: String },
    #[error("generator index {index} out of range on {strands} strands")]
    GeneratorRange { index: usize, strands: usize },
    #[error("a braid needs at least 2 strands, got {0}")]
    StrandCount(usize),
    #[error("strand count mismatch: {left} vs {right}")]
    StrandMismatch { left: usize, right: usize },
    #[error("word rank {rank} does not match strand count {strands}")]
    RankMismatch { rank: usize, strands: usize },
    #[error("braid is not pure")]
    NotPure,
    #[error("plat closure needs an even strand count, got {0}")]
    OddStrands(usize),
}

/// A word in the Artin generators of the braid group on `strands` strands.
/// Letters are `(generator, sign)` with 1-based generator index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<(usize, i8)>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<(usize, i8)>) -> Result<BraidWord, BraidError> {
        if strands < 2 {
            return Err(BraidError::StrandCount(strands));
        }
        for &(g, s) in &letters {
            if g == 0 || g >= strands {
                return Err(BraidError::GeneratorRange { index: g, strands });
            }
            debug_assert!(s == 1 || s == -1);
        }
        Ok(BraidWord { strands, letters })
    }

    pub fn identity(strands: usize) -> Result<BraidWord, BraidError> {
        BraidWord::new(strands, Vec::new())
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[(usize, i8)] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn compose(&self, other: &BraidWord) -> Result<BraidWord, BraidError> {
        if self.strands != other.strands {
            return Err(BraidError::StrandMismatch { left: self.strands, right: other.strands });
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(BraidWord { strands: self.strands, letters })
    }

    pub fn invert(&self) -> BraidWord {
        let letters = self.letters.iter().rev().map(|&(g, s)| (g, -s)).collect();
        BraidWord { strands: self.strands, letters }
    }

    /// Position each strand ends at: `permutation()[start] = end`.
    pub fn permutation(&self) -> Vec<usize> {
        let mut at: Vec<usize> = (0..self.strands).collect();
        for &(g, _) in &self.letters {
            at.swap(g - 1, g);
        }
        let mut perm = vec![0; self.strands];
        for (p, &w) in at.iter().enumerate() {
            perm[w] = p;
        }
        perm
    }

    pub fn is_pure(&self) -> bool {
        self.permutation().iter().enumerate().all(|(i, &p)| i == p)
    }

    /// Image of `w` under the braid automorphism of the free group: the
    /// letter `s<g>` maps `x_g -> x_g x_{g+1} x_g^-1` and `x_{g+1} -> x_g`,
    /// its inverse maps `x_g -> x_{g+1}` and `x_{g+1} -> x_{g+1}^-1 x_g
    /// x_{g+1}`. Letters act in word order; the result is reduced.
    pub fn artin_action(&self, w: &FreeWord) -> Result<FreeWord, BraidError> {
        if w.rank() != self.strands {
            return Err(BraidError::RankMismatch { rank: w.rank(), strands: self.strands });
        }
        let mut cur = w.reduce();
        for &(g, s) in &self.letters {
            cur = apply_generator(&cur, g, s);
        }
        Ok(cur)
    }

    /// Whether the braid acts trivially on every generator modulo the
    /// `(m+1)`-st lower central series term of the free group, checked by
    /// cancelling `x_i` off the image and expanding through degree `m+1`.
    pub fn artin_rep_trivial(&self, m: usize) -> Result<bool, BraidError> {
        if !self.is_pure() {
            return Err(BraidError::NotPure);
        }
        for i in 1..=self.strands {
            let x = FreeWord::generator(self.strands, i).expect("index in range");
            let image = self.artin_action(&x)?;
            let defect = image.multiply(&x.invert()).expect("same rank");
            if !magnus::<Int>(&defect, m + 1).is_one() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Closes the braid by arcs pairing positions `(1,2), (3,4), ...` at top
    /// and bottom. Odd positions are oriented down, even positions up, so
    /// the caps connect coherently; component `i` (0-based) is the strand
    /// through positions `2i+1, 2i+2` and components come out in that order.
    pub fn plat_closure(&self) -> Result<LinkDiagram, BraidError> {
        let k = self.strands;
        if k % 2 != 0 {
            return Err(BraidError::OddStrands(k));
        }
        if !self.is_pure() {
            return Err(BraidError::NotPure);
        }
        let n = k / 2;
        let mut arcs = 0;
        let mut cur = Vec::with_capacity(k);
        for _ in 0..n {
            let t = fresh(&mut arcs);
            cur.push(t);
            cur.push(t);
        }
        let crossings = self.sweep(&mut arcs, &mut cur, |wire| wire % 2 == 0);
        let unions: Vec<(usize, usize)> = (0..n).map(|i| (cur[2 * i], cur[2 * i + 1])).collect();
        let d = RawDiagram { n_raw: arcs, crossings, unions }
            .assemble()
            .expect("plat closure wiring is closed");
        debug_assert_eq!(d.n_components(), n);
        Ok(d)
    }

    /// Standard trace closure: every position is joined to itself around the
    /// braid axis, all strands oriented down. Works for any braid word; the
    /// link components correspond to the cycles of the braid permutation, so
    /// a pure braid on `k` strands closes to a `k`-component link while, say,
    /// a single generator on two strands closes to an unknot.
    pub fn ordinary_closure(&self) -> Result<LinkDiagram, BraidError> {
        let k = self.strands;
        let mut arcs = 0;
        let mut cur: Vec<usize> = (0..k).map(|_| fresh(&mut arcs)).collect();
        let top = cur.clone();
        let crossings = self.sweep(&mut arcs, &mut cur, |_| true);
        let unions: Vec<(usize, usize)> = top.into_iter().zip(cur).collect();
        let d = RawDiagram { n_raw: arcs, crossings, unions }
            .assemble()
            .expect("trace closure wiring is closed");
        debug_assert_eq!(d.n_components(), cycle_count(&self.permutation()));
        Ok(d)
    }

    /// Runs the wires through the braid box top to bottom. `cur` holds the
    /// arc at each position and is left holding the bottom arcs. `down` says
    /// which wires run against the sweep; their arcs swap in/out roles, and
    /// the crossing sign picks up one factor per upward strand.
    fn sweep<F>(&self, arcs: &mut usize, cur: &mut [usize], down: F) -> Vec<Crossing>
    where
        F: Fn(usize) -> bool,
    {
        let mut wire: Vec<usize> = (0..self.strands).collect();
        let mut crossings = Vec::with_capacity(self.letters.len());
        for &(g, s) in &self.letters {
            let (lp, rp) = (g - 1, g);
            let (la, ra) = (cur[lp], cur[rp]);
            let (lw, rw) = (wire[lp], wire[rp]);
            let la2 = fresh(arcs);
            let ra2 = fresh(arcs);
            let (l_in, l_out) = if down(lw) { (la, la2) } else { (la2, la) };
            let (r_in, r_out) = if down(rw) { (ra, ra2) } else { (ra2, ra) };
            let or = |w: usize| if down(w) { 1i8 } else { -1 };
            let sign = s * or(lw) * or(rw);
            // Right over left for a positive letter.
            let c = if s > 0 {
                Crossing { under_in: l_in, under_out: l_out, over_in: r_in, over_out: r_out, sign }
            } else {
                Crossing { under_in: r_in, under_out: r_out, over_in: l_in, over_out: l_out, sign }
            };
            crossings.push(c);
            cur[lp] = ra2;
            cur[rp] = la2;
            wire.swap(lp, rp);
        }
        crossings
    }
}

fn fresh(counter: &mut usize) -> usize {
    let a = *counter;
    *counter += 1;
    a
}

fn cycle_count(perm: &[usize]) -> usize {
    let mut seen = vec![false; perm.len()];
    let mut cycles = 0;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut p = start;
        while !seen[p] {
            seen[p] = true;
            p = perm[p];
        }
    }
    cycles
}

fn apply_generator(w: &FreeWord, g: usize, s: i8) -> FreeWord {
    let gi = g as i32;
    let hi = gi + 1;
    let mut out: Vec<i32> = Vec::with_capacity(3 * w.len());
    for &l in w.raw_letters() {
        let a = l.unsigned_abs() as usize;
        let image: &[i32] = if a == g {
            if s > 0 {
                &[gi, hi, -gi]
            } else {
                &[hi]
            }
        } else if a == g + 1 {
            if s > 0 {
                &[gi]
            } else {
                &[-hi, gi, hi]
            }
        } else {
            out.push(l);
            continue;
        };
        if l > 0 {
            out.extend_from_slice(image);
        } else {
            out.extend(image.iter().rev().map(|&x| -x));
        }
    }
    FreeWord::from_raw(w.rank(), out).reduce()
}

/// Parses braid text: whitespace-separated tokens `s<i>` or the pure-braid
/// band macro `A(<i>,<j>)`, either followed by an optional integer exponent
/// `^<e>`. `A(i,j)` with `i < j` expands to
/// `s<j-1> ... s<i+1> s<i> s<i> s<i+1>^-1 ... s<j-1>^-1`, the band where
/// strand `j` loops once around strand `i`.
pub fn parse_braid(text: &str, strands: usize) -> Result<BraidWord, BraidError> {
    if strands < 2 {
        return Err(BraidError::StrandCount(strands));
    }
    let bytes = text.as_bytes();
    let mut pos = 0;
    let mut letters: Vec<(usize, i8)> = Vec::new();
    loop {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos >= bytes.len() {
            break;
        }
        let base = match bytes[pos] {
            b's' => {
                pos += 1;
                let (g, _) = read_number(bytes, &mut pos)?;
                if g == 0 || g >= strands {
                    return Err(BraidError::GeneratorRange { index: g, strands });
                }
                vec![(g, 1i8)]
            }
            b'A' => {
                pos += 1;
                expect(bytes, &mut pos, b'(')?;
                let (i, _) = read_number(bytes, &mut pos)?;
                expect(bytes, &mut pos, b',')?;
                let (j, j_at) = read_number(bytes, &mut pos)?;
                expect(bytes, &mut pos, b')')?;
                if i == 0 || i > strands {
                    return Err(BraidError::GeneratorRange { index: i, strands });
                }
                if j == 0 || j > strands {
                    return Err(BraidError::GeneratorRange { index: j, strands });
                }
                if i >= j {
                    return Err(BraidError::Parse {
                        at: j_at,
                        message: format!("band A({i},{j}) needs i < j"),
                    });
                }
                band(i, j)
            }
            _ => {
                return Err(BraidError::Parse {
                    at: pos,
                    message: "expected a generator 's<i>' or a band 'A(i,j)'".into(),
                });
            }
        };
        let mut exp: i64 = 1;
        if pos < bytes.len() && bytes[pos] == b'^' {
            pos += 1;
            let negative = if pos < bytes.len() && (bytes[pos] == b'-' || bytes[pos] == b'+') {
                pos += 1;
                bytes[pos - 1] == b'-'
            } else {
                false
            };
            let (e, _) = read_number(bytes, &mut pos)?;
            exp = if negative { -(e as i64) } else { e as i64 };
        }
        if exp >= 0 {
            for _ in 0..exp {
                letters.extend_from_slice(&base);
            }
        } else {
            let inv: Vec<(usize, i8)> = base.iter().rev().map(|&(g, s)| (g, -s)).collect();
            for _ in 0..(-exp) {
                letters.extend_from_slice(&inv);
            }
        }
    }
    Ok(BraidWord { strands, letters })
}

/// The band generator word for `A(i,j)`, `i < j`.
fn band(i: usize, j: usize) -> Vec<(usize, i8)> {
    let mut w = Vec::with_capacity(2 * (j - i));
    for t in ((i + 1)..j).rev() {
        w.push((t, 1));
    }
    w.push((i, 1));
    w.push((i, 1));
    for t in (i + 1)..j {
        w.push((t, -1));
    }
    w
}

fn read_number(bytes: &[u8], pos: &mut usize) -> Result<(usize, usize), BraidError> {
    let start = *pos;
    while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
        *pos += 1;
    }
    if *pos == start {
        return Err(BraidError::Parse { at: start, message: "expected a number".into() });
    }
    let text = std::str::from_utf8(&bytes[start..*pos]).expect("digits are ascii");
    let value = text
        .parse()
        .map_err(|_| BraidError::Parse { at: start, message: "number too large".into() })?;
    Ok((value, start))
}

fn expect(bytes: &[u8], pos: &mut usize, want: u8) -> Result<(), BraidError> {
    if *pos < bytes.len() && bytes[*pos] == want {
        *pos += 1;
        Ok(())
    } else {
        Err(BraidError::Parse { at: *pos, message: format!("expected '{}'", want as char) })
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, &(g, s)) in self.letters.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            if s > 0 {
                write!(f, "s{g}")?;
            } else {
                write!(f, "s{g}^-1")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn braid(text: &str, strands: usize) -> BraidWord {
        parse_braid(text, strands).unwrap()
    }

    /// Signed crossing count between distinct components, halved.
    fn linking_sum(d: &LinkDiagram) -> i64 {
        let total: i64 = (0..d.n_crossings())
            .filter(|&ci| {
                let (a, b) = d.strand_components(ci);
                a != b
            })
            .map(|ci| d.crossings()[ci].sign as i64)
            .sum();
        assert_eq!(total % 2, 0);
        total / 2
    }

    #[test]
    fn parses_generators_and_bands() {
        assert_eq!(braid("s1 s1", 2).letters(), &[(1, 1), (1, 1)]);
        assert_eq!(braid("A(1,2)", 2).letters(), &[(1, 1), (1, 1)]);
        assert_eq!(
            braid("A(1,3)", 3).letters(),
            &[(2, 1), (1, 1), (1, 1), (2, -1)]
        );
        assert_eq!(braid("s2^-2", 3).letters(), &[(2, -1), (2, -1)]);
        assert_eq!(
            braid("A(1,2)^-1", 2).letters(),
            &[(1, -1), (1, -1)]
        );
        assert_eq!(braid("", 4).letters(), &[]);
    }

    #[test]
    fn parse_errors_carry_positions() {
        match parse_braid("s1 t2", 3).unwrap_err() {
            BraidError::Parse { at, .. } => assert_eq!(at, 3),
            e => panic!("unexpected {e:?}"),
        }
        match parse_braid("s1 s^2", 3).unwrap_err() {
            BraidError::Parse { at, .. } => assert_eq!(at, 4),
            e => panic!("unexpected {e:?}"),
        }
        assert_eq!(
            parse_braid("s3", 3).unwrap_err(),
            BraidError::GeneratorRange { index: 3, strands: 3 }
        );
        assert_eq!(
            parse_braid("A(2,5)", 4).unwrap_err(),
            BraidError::GeneratorRange { index: 5, strands: 4 }
        );
        assert!(matches!(
            parse_braid("A(2,2)", 4).unwrap_err(),
            BraidError::Parse { at: 4, .. }
        ));
    }

    #[test]
    fn display_round_trips() {
        let b = braid("s1 s2^-1 A(1,3)", 3);
        let again = parse_braid(&b.to_string(), 3).unwrap();
        assert_eq!(again, b);
    }

    #[test]
    fn purity_matches_hand_composed_permutations() {
        assert!(braid("", 4).is_pure());
        assert!(!braid("s1", 2).is_pure());
        assert!(braid("s1 s1", 2).is_pure());

        // Oracle: push [0,1,2] through (s1 s2)^3 one transposition at a time.
        let mut positions = [0usize, 1, 2];
        for _ in 0..3 {
            positions.swap(0, 1);
            positions.swap(1, 2);
        }
        assert_eq!(positions, [0, 1, 2]);
        assert!(braid("s1 s2 s1 s2 s1 s2", 3).is_pure());
    }

    #[test]
    fn artin_action_on_generators() {
        let x1 = FreeWord::generator(2, 1).unwrap();
        let x2 = FreeWord::generator(2, 2).unwrap();
        let id = braid("", 2);
        assert_eq!(id.artin_action(&x1).unwrap(), x1);

        let s1 = braid("s1", 2);
        assert_eq!(s1.artin_action(&x2).unwrap(), x1);
        let img = s1.artin_action(&x1).unwrap();
        let expected = x2.conjugate_by(&x1).unwrap();
        assert_eq!(img, expected);
    }

    #[test]
    fn artin_action_of_squared_generator() {
        // Oracle: (x1 x2) x1 (x1 x2)^-1 assembled by free-group operations.
        let x1 = FreeWord::generator(2, 1).unwrap();
        let x2 = FreeWord::generator(2, 2).unwrap();
        let img = braid("s1 s1", 2).artin_action(&x1).unwrap();
        let expected = x1.conjugate_by(&x1.multiply(&x2).unwrap()).unwrap();
        assert_eq!(img, expected);
    }

    #[test]
    fn artin_action_rejects_rank_mismatch() {
        let w = FreeWord::generator(3, 1).unwrap();
        assert_eq!(
            braid("s1", 2).artin_action(&w).unwrap_err(),
            BraidError::RankMismatch { rank: 3, strands: 2 }
        );
    }

    #[test]
    fn artin_triviality_thresholds() {
        let id = braid("", 3);
        for m in 0..4 {
            assert!(id.artin_rep_trivial(m).unwrap());
        }
        let s1s1 = braid("s1 s1", 2);
        assert!(s1s1.artin_rep_trivial(0).unwrap());
        assert!(!s1s1.artin_rep_trivial(1).unwrap());
        assert_eq!(braid("s1", 2).artin_rep_trivial(1).unwrap_err(), BraidError::NotPure);
    }

    #[test]
    fn plat_of_identity_is_unlink() {
        let d = braid("", 6).plat_closure().unwrap();
        assert_eq!(d.n_components(), 3);
        assert_eq!(d.n_crossings(), 0);
    }

    #[test]
    fn plat_needs_even_strands_and_purity() {
        assert_eq!(
            braid("s1 s1", 3).plat_closure().unwrap_err(),
            BraidError::OddStrands(3)
        );
        assert_eq!(braid("s2", 4).plat_closure().unwrap_err(), BraidError::NotPure);
    }

    #[test]
    fn plat_of_middle_clasp_is_hopf() {
        let d = braid("s2 s2", 4).plat_closure().unwrap();
        assert_eq!(d.n_components(), 2);
        assert_eq!(d.n_crossings(), 2);
        assert_eq!(linking_sum(&d).abs(), 1);
    }

    #[test]
    fn trace_closure_of_clasp_is_hopf() {
        let d = braid("s1 s1", 2).ordinary_closure().unwrap();
        assert_eq!(d.n_components(), 2);
        assert_eq!(d.n_crossings(), 2);
        assert_eq!(linking_sum(&d).abs(), 1);
    }

    #[test]
    fn trace_closure_of_double_band_is_torus_link() {
        let d = braid("A(1,2)^2", 2).ordinary_closure().unwrap();
        assert_eq!(d.n_components(), 2);
        assert_eq!(d.n_crossings(), 4);
        assert_eq!(linking_sum(&d).abs(), 2);
    }

    #[test]
    fn trace_closure_of_identity_is_unlink() {
        let d = braid("", 3).ordinary_closure().unwrap();
        assert_eq!(d.n_components(), 3);
        assert_eq!(d.n_crossings(), 0);
    }

    #[test]
    fn trace_closure_merges_permuted_strands() {
        let d = braid("s1", 2).ordinary_closure().unwrap();
        assert_eq!(d.n_components(), 1);
        assert_eq!(d.n_crossings(), 1);
        let d = braid("s1 s1 s1", 2).ordinary_closure().unwrap();
        assert_eq!(d.n_components(), 1);
        assert_eq!(d.n_crossings(), 3);
        assert_eq!(d.self_writhe(0).unwrap(), 3);
    }

    fn arb_braid(strands: usize) -> impl Strategy<Value = BraidWord> {
        prop::collection::vec((1..strands, prop::bool::ANY), 0..12).prop_map(move |letters| {
            let letters =
                letters.into_iter().map(|(g, pos)| (g, if pos { 1i8 } else { -1 })).collect();
            BraidWord::new(strands, letters).unwrap()
        })
    }

    /// Random words in the bands generate pure braids.
    fn arb_pure_braid(strands: usize) -> impl Strategy<Value = BraidWord> {
        let band_choice =
            (1..strands).prop_flat_map(move |i| (Just(i), (i + 1)..=strands, prop::bool::ANY));
        prop::collection::vec(band_choice, 0..6).prop_map(move |bands| {
            let mut letters = Vec::new();
            for (i, j, inv) in bands {
                let mut w = band(i, j);
                if inv {
                    w = w.iter().rev().map(|&(g, s)| (g, -s)).collect();
                }
                letters.extend(w);
            }
            BraidWord::new(strands, letters).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn action_respects_composition(a in arb_braid(4), b in arb_braid(4)) {
            let ab = a.compose(&b).unwrap();
            for i in 1..=4 {
                let x = FreeWord::generator(4, i).unwrap();
                let direct = ab.artin_action(&x).unwrap();
                let staged = b.artin_action(&a.artin_action(&x).unwrap()).unwrap();
                prop_assert_eq!(direct, staged);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn action_of_inverse_undoes(b in arb_braid(4)) {
            let inv = b.invert();
            for i in 1..=4 {
                let x = FreeWord::generator(4, i).unwrap();
                let back = inv.artin_action(&b.artin_action(&x).unwrap()).unwrap();
                prop_assert_eq!(back, x);
            }
        }

        #[test]
        fn pure_braids_fix_the_abelianization(b in arb_pure_braid(4)) {
            prop_assert!(b.is_pure());
            for i in 1..=4 {
                let x = FreeWord::generator(4, i).unwrap();
                let image = b.artin_action(&x).unwrap();
                let mut expected = vec![0i64; 4];
                expected[i - 1] = 1;
                prop_assert_eq!(image.abelianization(), expected);
            }
        }

        #[test]
        fn plat_component_count_is_half_the_strands(b in arb_pure_braid(6)) {
            let d = b.plat_closure().unwrap();
            prop_assert_eq!(d.n_components(), 3);
        }
    }
}
