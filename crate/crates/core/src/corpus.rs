//! A zoo of worked links: plat words, independently drawn diagrams,
//! longitude targets, and crossing-switch certificates built on them.
//! These fixtures anchor the test suites and the command-line examples;
//! every numeric claim about them is pinned by a test in this file or in
//! the integration suites.

use crate::braid::{parse_braid, BraidWord};
use crate::diagram::LinkDiagram;
use crate::equivalence::{Certificate, Target};
use crate::freegroup::FreeWord;

fn plat(text: &str, strands: usize) -> LinkDiagram {
    parse_braid(text, strands)
        .expect("fixture word parses")
        .plat_closure()
        .expect("fixture word is pure")
}

fn trace(text: &str, strands: usize) -> LinkDiagram {
    parse_braid(text, strands)
        .expect("fixture word parses")
        .ordinary_closure()
        .expect("fixture closure is well formed")
}

/// `a b a^-1 b^-1` on a shared strand count.
fn braid_commutator(a: &BraidWord, b: &BraidWord) -> BraidWord {
    a.compose(b)
        .and_then(|w| w.compose(&a.invert()))
        .and_then(|w| w.compose(&b.invert()))
        .expect("commutator factors share a strand count")
}

/// Crossing-free diagram of the trivial link on `components` circles.
pub fn unlink_plat(components: usize) -> LinkDiagram {
    plat("", 2 * components)
}

/// Two clasped unknots with linking number one: the plat of `s2^2` on four
/// strands.
pub fn hopf_plat() -> LinkDiagram {
    plat("s2 s2", 4)
}

/// The six-letter pure word whose plat is the Whitehead link, in the
/// orientation where the Conway polynomial is `-z^3`.
pub fn whitehead_word() -> BraidWord {
    parse_braid("s2^-1 s1 s2^-1 s1 s2^-1 s1^-1", 4).expect("fixture word parses")
}

pub fn whitehead_plat() -> LinkDiagram {
    whitehead_word().plat_closure().expect("whitehead word is pure")
}

/// The Whitehead link again, entered as a five-crossing alternating diagram
/// by its interleaving code rather than through any braid machinery. Every
/// invariant must agree with [`whitehead_plat`].
pub fn whitehead_alternating() -> LinkDiagram {
    LinkDiagram::from_gauss_code("O3+ U4+ O5+ U3+ O2- U1- ; O1- U2- O4+ U5+")
        .expect("frozen interleaving code is consistent")
}

/// The reduced free word `[y^-1, [x, y]]` that the zero-framed longitude of
/// either Whitehead component equals modulo the fifth lower central subgroup
/// term; `component` 0 reads `x` as the first meridian, 1 as the second.
/// For the fixtures here the match is exact through degree four, not just
/// modulo the subgroup.
pub fn whitehead_longitude_target(component: usize) -> FreeWord {
    assert!(component < 2, "the link has two components");
    let x = FreeWord::generator(2, component + 1).expect("rank two");
    let y = FreeWord::generator(2, 2 - component).expect("rank two");
    y.invert()
        .commutator(&x.commutator(&y).expect("same rank"))
        .expect("same rank")
        .reduce()
}

/// Three pairwise unlinked circles that are jointly linked: the plat of
/// `[A(2,3), A(3,5)]` on six strands. Same link as [`borromean_trace`].
pub fn borromean_plat() -> LinkDiagram {
    necklace_plat(3)
}

/// The classical three-strand presentation of the same link: the trace
/// closure of `(s1 s2^-1)^3`.
pub fn borromean_trace() -> LinkDiagram {
    trace("s1 s2^-1 s1 s2^-1 s1 s2^-1", 3)
}

/// Trefoil as the trace closure of `s1^3`.
pub fn trefoil_trace() -> LinkDiagram {
    trace("s1 s1 s1", 2)
}

/// Figure-eight knot as the trace closure of `(s1 s2^-1)^2`.
pub fn figure_eight_trace() -> LinkDiagram {
    trace("s1 s2^-1 s1 s2^-1", 3)
}

/// Iterated clasp commutator on `2n` strands:
/// `B_1 = A(2,3)` and `w_k = [w_{k-1}, A(2k-1, 2k+1)]`.
///
/// Clasp `k` links components `k` and `k+1`, so deleting any component
/// erases every occurrence of some clasp and the word collapses to the
/// identity: the closure is an n-component Brunnian link. For n = 2 this is
/// the clasp itself (a Hopf link); n = 3 gives the Borromean rings.
pub fn necklace_word(n: usize) -> BraidWord {
    assert!((2..=8).contains(&n), "supported necklace sizes are 2..=8");
    let strands = 2 * n;
    let band =
        |i: usize, j: usize| parse_braid(&format!("A({i},{j})"), strands).expect("band in range");
    let mut w = band(2, 3);
    for k in 2..n {
        w = braid_commutator(&w, &band(2 * k - 1, 2 * k + 1));
    }
    w
}

pub fn necklace_plat(n: usize) -> LinkDiagram {
    necklace_word(n).plat_closure().expect("necklace words are pure")
}

/// A second four-component Brunnian plat, built from a different clasp
/// chain: `[[A(2,4), A(4,5)], A(5,7)]` on eight strands.
pub fn necklace_variant_word() -> BraidWord {
    let band = |i: usize, j: usize| {
        parse_braid(&format!("A({i},{j})"), 8).expect("band in range")
    };
    braid_commutator(&braid_commutator(&band(2, 4), &band(4, 5)), &band(5, 7))
}

pub fn necklace_variant_plat() -> LinkDiagram {
    necklace_variant_word().plat_closure().expect("variant word is pure")
}

/// Certificates over the fixture links, every one of which verifies. Each
/// claims its diagram is `(set count - 1)`-equivalent to an unlink; the
/// collections are chosen so that switching any selection of sets undoes a
/// clasp or a kink everywhere it occurs.
///
/// Crossing ids are the braid letter positions in sweep order. A clasp
/// `A(i,j)` contributes its two core crossings at offsets `j-i-1` and `j-i`
/// within its own letters, and switching either one turns the clasp into a
/// cancelling pair, so a set that picks one core from every occurrence of a
/// clasp trivializes that clasp under every selection containing the set.
pub fn certificate_corpus() -> Vec<Certificate> {
    let mut certs = Vec::new();
    let mut push = |d: LinkDiagram, sets: &[&[usize]], target: Target| {
        let collection = sets.iter().map(|s| s.to_vec()).collect();
        certs.push(Certificate::new(d, collection, target).expect("corpus certificate is valid"));
    };

    let wh = whitehead_plat();
    // Switching the middle crossing alone undoes the clasp.
    push(wh.clone(), &[&[2]], Target::Unlink(2));
    // Two disjoint pairs, each of which (and their union) unlinks: the
    // switch-any-selection scheme at order one.
    push(wh.clone(), &[&[0, 3], &[1, 4]], Target::Unlink(2));
    push(wh, &[&[0, 4], &[1, 3]], Target::Unlink(2));

    let hopf = hopf_plat();
    push(hopf.clone(), &[&[0]], Target::Unlink(2));
    push(hopf, &[&[1]], Target::Unlink(2));

    // The same clasp conjugated by a cap-absorbed crossing on each side.
    let conj = plat("s1 s2 s2 s1^-1", 4);
    push(conj.clone(), &[&[1]], Target::Unlink(2));
    push(conj, &[&[2]], Target::Unlink(2));

    // A clasp reaching across a middle component: unlinks by either core.
    let wide = plat("A(2,5)", 6);
    push(wide.clone(), &[&[2]], Target::Unlink(3));
    push(wide, &[&[3]], Target::Unlink(3));

    // Stacked kinks on one cap: any switch pattern leaves unknots.
    let kinks4 = plat("s1 s1 s1 s1", 4);
    push(kinks4, &[&[0], &[1], &[2]], Target::Unlink(2));
    let kinks2 = plat("s1 s1", 4);
    push(kinks2, &[&[0], &[1]], Target::Unlink(2));
    let kinks8 = plat("s5 s5 s5 s5", 8);
    push(kinks8, &[&[0], &[1], &[2]], Target::Unlink(4));

    // Borromean word A(2,3) A(3,5) A(2,3)^-1 A(3,5)^-1: clasp occurrences
    // at 0..2, 2..6, 6..8, 8..12 with cores {0,1}, {3,4}, {6,7}, {9,10}.
    let borr = borromean_plat();
    push(borr.clone(), &[&[0, 6], &[3, 9]], Target::Unlink(3));
    push(borr.clone(), &[&[1, 7], &[4, 10]], Target::Unlink(3));
    push(borr, &[&[3, 9]], Target::Unlink(3));

    // Four-component necklace [[B1,B2],B3], 32 letters: B1 cores at
    // {0,1},{6,7},{20,21},{26,27}; B2 at {3,4},{9,10},{17,18},{23,24};
    // B3 at {13,14},{29,30}.
    let neck4 = necklace_plat(4);
    push(
        neck4.clone(),
        &[&[0, 6, 20, 26], &[3, 9, 17, 23], &[13, 29]],
        Target::Unlink(4),
    );
    push(
        neck4.clone(),
        &[&[1, 7, 21, 27], &[4, 10, 18, 24], &[14, 30]],
        Target::Unlink(4),
    );
    push(neck4, &[&[0, 6, 20, 26], &[3, 9, 17, 23]], Target::Unlink(4));

    // [[B1,B2],B1] on six strands: the outer clasp reuses B1, so killing
    // any of the three sets still collapses the word. Inner B1 cores at
    // {0,1},{6,7},{18,19},{24,25}; B2 at {3,4},{9,10},{15,16},{21,22};
    // outer B1 at {12,13},{26,27}.
    let strands6 = parse_braid("A(2,3)", 6).expect("band in range");
    let strands6b = parse_braid("A(3,5)", 6).expect("band in range");
    let reused = braid_commutator(&braid_commutator(&strands6, &strands6b), &strands6)
        .plat_closure()
        .expect("pure");
    push(
        reused,
        &[&[0, 6, 18, 24], &[3, 9, 15, 21], &[12, 26]],
        Target::Unlink(3),
    );

    // Unknotting-number-one knots entered as trace closures.
    push(trefoil_trace(), &[&[0]], Target::Unlink(1));
    push(figure_eight_trace(), &[&[0]], Target::Unlink(1));
    push(figure_eight_trace(), &[&[3]], Target::Unlink(1));

    certs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;
    use crate::equivalence::{
        is_brunnian, m_equivalence_implies_profile, mu_vanish_through, verify_certificate,
        SublinkScope, VerifyOutcome,
    };
    use crate::freegroup::magnus;
    use crate::invariants::{conway, linking_matrix, mu_values_through, MilnorValue};
    use crate::linkgroup::chen_milnor_series;
    use crate::{Int, IntConway, IntSeries};

    fn lk_zero(d: &LinkDiagram) -> bool {
        linking_matrix(d).iter().all(|r| r.iter().all(|&v| v == 0))
    }

    fn mu_entry(values: &[MilnorValue], seq: &[usize]) -> (Int, Int) {
        let v = values
            .iter()
            .find(|v| v.sequence == seq)
            .expect("sequence enumerated");
        (v.value.clone(), v.delta.clone())
    }

    #[test]
    fn whitehead_plat_has_the_expected_low_invariants() {
        let d = whitehead_plat();
        assert_eq!(d.n_components(), 2);
        assert_eq!(d.n_crossings(), 6);
        assert!(lk_zero(&d));
        let nabla: IntConway = conway(&d, 16).unwrap();
        assert_eq!(nabla, IntConway::from_coeffs([(3, Int::from(-1))]));

        let values = mu_values_through(&d, 4, 4).unwrap();
        for v in &values {
            if v.sequence.len() <= 3 {
                assert_eq!(v.value, Int::from(0), "short read {:?}", v.sequence);
            }
        }
        for (seq, want) in [
            (vec![1, 1, 2, 2], 1),
            (vec![1, 2, 1, 2], -2),
            (vec![1, 2, 2, 1], 1),
            (vec![2, 1, 1, 2], 1),
            (vec![2, 1, 2, 1], -2),
            (vec![2, 2, 1, 1], 1),
        ] {
            assert_eq!(mu_entry(&values, &seq), (Int::from(want), Int::from(0)), "{seq:?}");
        }
    }

    #[test]
    fn alternating_whitehead_matches_the_plat_on_everything() {
        let a = whitehead_alternating();
        let b = whitehead_plat();
        assert_eq!(a.n_crossings(), 5);
        assert_eq!(linking_matrix(&a), linking_matrix(&b));
        assert_eq!(conway::<Int>(&a, 16).unwrap(), conway::<Int>(&b, 16).unwrap());
        let va = mu_values_through(&a, 4, 4).unwrap();
        let vb = mu_values_through(&b, 4, 4).unwrap();
        assert_eq!(va, vb);
    }

    #[test]
    fn whitehead_longitudes_equal_the_commutator_target_series() {
        // The zero-framed longitudes of both plat components expand to
        // exactly the Magnus series of [y^-1, [x, y]] through degree 4.
        let cm = chen_milnor_series(&whitehead_plat(), 4).unwrap();
        for comp in 0..2 {
            let target: IntSeries = magnus(&whitehead_longitude_target(comp), 4);
            assert_eq!(*cm.longitude_series(comp), target, "plat component {comp}");
        }
        // The independently drawn diagram reproduces the full expansion on
        // its first component; on the second only the degree-3 part is
        // forced (degree-4 coefficients depend on the presentation).
        let cm = chen_milnor_series(&whitehead_alternating(), 4).unwrap();
        let target: IntSeries = magnus(&whitehead_longitude_target(0), 4);
        assert_eq!(*cm.longitude_series(0), target);
        let target: IntSeries = magnus(&whitehead_longitude_target(1), 4);
        for deg in 1..=3 {
            assert_eq!(
                cm.longitude_series(1).homogeneous_part(deg),
                target.homogeneous_part(deg),
                "degree {deg}"
            );
        }
    }

    #[test]
    fn borromean_presentations_agree_and_are_brunnian() {
        let p = borromean_plat();
        let t = borromean_trace();
        assert_eq!(p.n_components(), 3);
        assert_eq!(t.n_components(), 3);
        assert!(lk_zero(&p) && lk_zero(&t));
        let np: IntConway = conway(&p, 16).unwrap();
        assert_eq!(np, conway::<Int>(&t, 16).unwrap());
        assert_eq!(np, IntConway::from_coeffs([(4, Int::from(1))]));

        // Component numbering of the two presentations need not correspond,
        // so compare the length-3 read up to the sign a relabeling can flip.
        let vp = mu_values_through(&p, 3, 3).unwrap();
        assert_eq!(mu_entry(&vp, &[1, 2, 3]), (Int::from(1), Int::from(0)));
        let vt = mu_values_through(&t, 3, 3).unwrap();
        let (tv, td) = mu_entry(&vt, &[1, 2, 3]);
        assert_eq!(td, Int::from(0));
        assert!(tv == Int::from(1) || tv == Int::from(-1), "got {tv}");

        let cfg = Config::default();
        assert!(is_brunnian(&p, SublinkScope::Full, &cfg).unwrap().brunnian);
    }

    #[test]
    fn necklaces_are_brunnian_with_one_long_nonvanishing_read() {
        let cfg = Config::default();
        let n4 = necklace_plat(4);
        assert_eq!(n4.n_crossings(), 32);
        assert!(lk_zero(&n4));
        assert!(is_brunnian(&n4, SublinkScope::Full, &cfg).unwrap().brunnian);
        // Reads through length 3 vanish; length 4 does not.
        let cm = chen_milnor_series(&n4, 5).unwrap();
        assert!(mu_vanish_through(&cm, 3).unwrap());
        assert!(!mu_vanish_through(&cm, 4).unwrap());
        let values = mu_values_through(&n4, 4, 5).unwrap();
        assert_eq!(mu_entry(&values, &[1, 2, 3, 4]), (Int::from(-1), Int::from(0)));

        let nv = necklace_variant_plat();
        assert_eq!(nv.n_components(), 4);
        assert!(lk_zero(&nv));
        assert!(is_brunnian(&nv, SublinkScope::Full, &cfg).unwrap().brunnian);
        let cm = chen_milnor_series(&nv, 4).unwrap();
        assert!(mu_vanish_through(&cm, 3).unwrap());
        assert!(!mu_vanish_through(&cm, 4).unwrap());
    }

    #[test]
    fn five_component_necklace_is_brunnian_with_length_five_read() {
        let cfg = Config::default();
        let n5 = necklace_plat(5);
        assert_eq!(n5.n_components(), 5);
        assert_eq!(n5.n_crossings(), 72);
        assert!(is_brunnian(&n5, SublinkScope::Full, &cfg).unwrap().brunnian);
        let cm = chen_milnor_series(&n5, 5).unwrap();
        assert!(mu_vanish_through(&cm, 4).unwrap());
        assert!(!mu_vanish_through(&cm, 5).unwrap());
    }

    #[test]
    fn every_corpus_certificate_verifies() {
        let cfg = Config::default();
        let certs = certificate_corpus();
        assert!(certs.len() >= 20, "need at least 20, have {}", certs.len());
        let mut orders = [0usize; 3];
        for (i, c) in certs.iter().enumerate() {
            assert_eq!(
                verify_certificate(c, &cfg).unwrap(),
                VerifyOutcome::Verified,
                "certificate {i} (order {})",
                c.order()
            );
            orders[c.order()] += 1;
        }
        assert!(orders.iter().all(|&k| k > 0), "orders 0..=2 all present: {orders:?}");
    }

    #[test]
    fn every_verified_certificate_has_matching_profile() {
        // The profile-agreement consequence of switch equivalence, checked
        // with zero exceptions; the skein bound is raised to reach the
        // 32-crossing bases.
        let cfg = Config { conway_crossing_bound: 40, ..Config::default() };
        for (i, c) in certificate_corpus().iter().enumerate() {
            assert!(
                m_equivalence_implies_profile(c, c.order(), &cfg).unwrap(),
                "certificate {i}"
            );
        }
    }
}
