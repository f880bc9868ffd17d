use std::collections::{BTreeMap, BinaryHeap, HashSet, VecDeque};

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::Int;

use super::{magnus, CommutatorTree, FreeWord, MagnusSeries};

/// Resource bounds for [`decompose_simple_quasi`].
///
/// The decomposition search is a semi-decision procedure: a factorization
/// into simple commutators always exists for words deep enough in the lower
/// central series, but the search may fail to find one within these bounds,
/// in which case it reports [`DecomposeError::Stalled`] instead of looping.
#[derive(Debug, Clone)]
pub struct DecomposeLimits {
    /// Outer peeling iterations before giving up.
    pub max_iters: usize,
    /// Highest lower-central-series level the collection step will visit.
    pub max_level: usize,
    /// Largest number of output factors.
    pub max_factors: usize,
    /// Longest cancelled seam the structural parser will reconstruct.
    pub seam_budget: usize,
    /// Longest residual word tolerated during peeling.
    pub max_len: usize,
}

impl Default for DecomposeLimits {
    fn default() -> Self {
        DecomposeLimits {
            max_iters: 512,
            max_level: 24,
            max_factors: 4096,
            seam_budget: 64,
            max_len: 8192,
        }
    }
}

#[derive(Debug, Error)]
pub enum DecomposeError {
    #[error("word has lower-central depth {depth}, below the required {required}")]
    NotInTerm { required: usize, depth: usize },
    #[error("peeling stalled at level {level} with residual of length {residual_len}")]
    Stalled { level: usize, residual_len: usize },
    #[error("factorization needs more than {cap} factors")]
    TooManyFactors { cap: usize },
    #[error("internal decomposition invariant broken: {0}")]
    Internal(String),
}

/// Writes `w` as a product of simple commutators of length at least `m`.
///
/// The returned trees multiply out, in order, to a word freely equal to `w`.
/// The input must lie in the m-th lower central series term, which is
/// certified through the Magnus expansion before any peeling starts.
pub fn decompose_simple_quasi(
    w: &FreeWord,
    m: usize,
) -> Result<Vec<CommutatorTree>, DecomposeError> {
    decompose_with_limits(w, m, &DecomposeLimits::default())
}

pub fn decompose_with_limits(
    w: &FreeWord,
    m: usize,
    limits: &DecomposeLimits,
) -> Result<Vec<CommutatorTree>, DecomposeError> {
    let w = w.reduce();
    if w.is_empty() {
        return Ok(Vec::new());
    }
    if m <= 1 {
        return Ok(w.letters().map(|(gen, exp)| CommutatorTree::leaf(gen, exp)).collect());
    }

    let probe: MagnusSeries<Int> = magnus(&w, m);
    if let Some(depth) = probe.min_positive_degree() {
        if depth < m {
            return Err(DecomposeError::NotInTerm { required: m, depth });
        }
    }

    let rank = w.rank();
    let mut out_left: Vec<CommutatorTree> = Vec::new();
    let mut out_right: VecDeque<CommutatorTree> = VecDeque::new();
    let mut residual = w.clone();
    let mut level = m;
    let mut lie_cache: BTreeMap<Vec<u16>, LieCombo> = BTreeMap::new();

    for _ in 0..limits.max_iters {
        if residual.is_empty() {
            let mut out = out_left;
            out.extend(out_right);
            if out.len() > limits.max_factors {
                return Err(DecomposeError::TooManyFactors { cap: limits.max_factors });
            }
            verify_product(&w, &out, rank)?;
            return Ok(out);
        }
        if residual.len() > limits.max_len {
            return Err(DecomposeError::Stalled { level, residual_len: residual.len() });
        }

        if let Some(peel) = best_structural_peel(&residual, m, rank, limits) {
            match peel.side {
                Side::Prefix => out_left.push(peel.tree),
                Side::Suffix => out_right.push_front(peel.tree),
            }
            residual = peel.residual;
            continue;
        }

        // Collection step: cancel the lowest-degree Magnus terms with basic
        // commutators from the Lyndon basis, working upward level by level.
        let series: MagnusSeries<Int> = magnus(&residual, level);
        match series.min_positive_degree() {
            Some(k) => {
                level = k;
                if level > limits.max_level {
                    return Err(DecomposeError::Stalled { level, residual_len: residual.len() });
                }
                let factors =
                    collect_level(&series, k, rank, limits.max_factors, &mut lie_cache)?;
                let f = flatten_product(&factors, rank);
                let left = f.invert().multiply(&residual).expect("rank fixed");
                let right = residual.multiply(&f.invert()).expect("rank fixed");
                if left.len() <= right.len() {
                    out_left.extend(factors);
                    residual = left;
                } else {
                    for t in factors.into_iter().rev() {
                        out_right.push_front(t);
                    }
                    residual = right;
                }
                let check: MagnusSeries<Int> = magnus(&residual, level);
                if check.min_positive_degree() == Some(level) {
                    return Err(DecomposeError::Internal(format!(
                        "collection left degree-{} terms standing",
                        level
                    )));
                }
                level += 1;
            }
            None => {
                // The expansion is trivial through the current cap; push the
                // cap up until an obstruction appears or the budget runs out.
                level += 1;
                if level > limits.max_level {
                    return Err(DecomposeError::Stalled { level, residual_len: residual.len() });
                }
            }
        }
    }
    Err(DecomposeError::Stalled { level, residual_len: residual.len() })
}

fn verify_product(
    w: &FreeWord,
    trees: &[CommutatorTree],
    rank: usize,
) -> Result<(), DecomposeError> {
    let product = flatten_product(trees, rank);
    if &product == w {
        Ok(())
    } else {
        Err(DecomposeError::Internal("factor product does not reduce to the input".into()))
    }
}

fn flatten_product(trees: &[CommutatorTree], rank: usize) -> FreeWord {
    let mut out = FreeWord::empty(rank);
    for t in trees {
        out = out.multiply(&t.flatten(rank)).expect("rank fixed");
    }
    out
}

// ---------------------------------------------------------------------------
// Structural peeling: recognize flattened simple commutators at either end of
// the residual, reconstructing letters a seam with the neighbouring factor
// cancelled away.

enum Side {
    Prefix,
    Suffix,
}

struct Peel {
    tree: CommutatorTree,
    residual: FreeWord,
    side: Side,
}

#[derive(Clone)]
struct Cand {
    tree: CommutatorTree,
    /// Freely reduced flattening of `tree`.
    flat: Vec<i32>,
    /// How many letters of `flat` the word shows at the anchor.
    consumed: usize,
    /// The rest of `flat`, cancelled against material beyond the factor.
    completion: Vec<i32>,
}

/// Candidate whose first flattening letter is not in the word: it cancels
/// against the wrapper letter of an enclosing bracket. Flattening a bracket
/// `[s, A]` where `flatten(A)` starts with `s⁻¹` erases both letters, so the
/// inner factor shows up shifted by one.
#[derive(Clone)]
struct SkipCand {
    tree: CommutatorTree,
    flat: Vec<i32>,
    /// Letters of `flat[1..]` the word shows at the anchor.
    consumed: usize,
    completion: Vec<i32>,
}

const CANDS_PER_POS: usize = 64;
const GROWTH_CAP: usize = 256;
const POPS_PER_POS: usize = 512;
const PEELS_EVALUATED: usize = 10;
const STRUCTURAL_LEN_LIMIT: usize = 512;

fn best_structural_peel(
    residual: &FreeWord,
    m: usize,
    rank: usize,
    limits: &DecomposeLimits,
) -> Option<Peel> {
    let forward = residual.raw_letters().to_vec();
    let backward = residual.invert().raw_letters().to_vec();
    let mut options: Vec<(bool, Cand)> = Vec::new();
    for cand in anchored_candidates(&forward, rank, limits.seam_budget) {
        if cand.tree.len() >= m {
            options.push((true, cand));
        }
    }
    for cand in anchored_candidates(&backward, rank, limits.seam_budget) {
        if cand.tree.len() >= m {
            options.push((false, cand));
        }
    }
    options.sort_by_key(|(_, c)| (c.completion.len(), usize::MAX - c.consumed));
    options.truncate(PEELS_EVALUATED);

    let mut best: Option<(usize, usize, Peel)> = None;
    for (is_prefix, cand) in options {
        let word = if is_prefix { &forward } else { &backward };
        let peeled = peel_residual(word, &cand, rank);
        if peeled.len() > residual.len() {
            continue;
        }
        let score = if peeled.is_empty() {
            0
        } else if whole_word_parses(peeled.raw_letters(), rank, m) {
            1
        } else {
            2
        };
        if score == 2 && peeled.len() >= residual.len() {
            continue;
        }
        let peel = if is_prefix {
            Peel { tree: cand.tree, residual: peeled, side: Side::Prefix }
        } else {
            Peel {
                tree: cand.tree.invert(),
                residual: peeled.invert(),
                side: Side::Suffix,
            }
        };
        let key = (score, peel.residual.len());
        if best.as_ref().map(|(s, l, _)| key < (*s, *l)).unwrap_or(true) {
            best = Some((key.0, key.1, peel));
        }
    }
    best.map(|(_, _, p)| p)
}

/// Residual left over after peeling `cand` off the front of `word`: the
/// completion letters were cancelled against the next factor, so they return
/// to the word inverted.
fn peel_residual(word: &[i32], cand: &Cand, rank: usize) -> FreeWord {
    let mut letters: Vec<i32> = cand.completion.iter().rev().map(|l| -l).collect();
    letters.extend_from_slice(&word[cand.consumed..]);
    FreeWord::from_raw(rank, letters).reduce()
}

fn whole_word_parses(word: &[i32], rank: usize, m: usize) -> bool {
    anchored_candidates(word, rank, 0)
        .iter()
        .any(|c| c.consumed == word.len() && c.completion.is_empty() && c.tree.len() >= m)
}

/// All simple commutator trees whose reduced flattening starts the word,
/// possibly missing a cancelled suffix no longer than `seam_budget` letters.
///
/// Each candidate satisfies `flat = word[0..consumed] ++ completion` letter
/// for letter, where `flat` is the freely reduced flattening of its tree.
/// Brackets grow outward from matched sub-candidates; every growth step
/// re-reduces and re-aligns from scratch, because wrapping a commutator
/// around a word can cancel letters deep inside it.
fn anchored_candidates(word: &[i32], rank: usize, seam_budget: usize) -> Vec<Cand> {
    if word.is_empty() || word.len() > STRUCTURAL_LEN_LIMIT {
        return Vec::new();
    }
    let len = word.len();
    let mut table: Vec<Vec<Cand>> = vec![Vec::new(); len + 1];
    for pos in (0..len).rev() {
        let cands = position_candidates(&word[pos..], &table[pos + 1], rank, seam_budget);
        table[pos] = cands;
    }
    table.swap_remove(0)
}

enum Item {
    Plain(Cand),
    Shifted(SkipCand),
}

/// Exploration frontier entry, popped cheapest seam first so exactly matching
/// growth chains are extended before speculative ones.
struct Frontier {
    key: (usize, usize),
    seq: usize,
    item: Item,
}

impl PartialEq for Frontier {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key && self.seq == other.seq
    }
}
impl Eq for Frontier {}
impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // BinaryHeap pops the maximum; flip so the smallest key wins.
        (&other.key, other.seq).cmp(&(&self.key, self.seq))
    }
}

/// Grows candidates anchored at one position. Plain candidates match the word
/// letter for letter; shifted ones are missing their first flattening letter,
/// which an enclosing `[s, ·]` wrapper will cancel. A shifted candidate whose
/// hidden letter is cancelled becomes plain again, and wrapping a generator on
/// the right leaves the hidden front alone. At most one letter ever hides: a
/// wrapper is a single letter, and free reduction of a bracket erodes only the
/// seam it touches.
fn position_candidates(
    word_tail: &[i32],
    next: &[Cand],
    rank: usize,
    seam_budget: usize,
) -> Vec<Cand> {
    let head = word_tail[0];
    let mut plain: Vec<Cand> = Vec::new();
    let mut seen_plain: HashSet<CommutatorTree> = HashSet::new();
    let mut seen_shift: HashSet<CommutatorTree> = HashSet::new();
    let mut shifted = 0usize;
    let mut queue: BinaryHeap<Frontier> = BinaryHeap::new();
    let mut seq = 0usize;

    let push_plain = |cand: Cand,
                          plain: &mut Vec<Cand>,
                          queue: &mut BinaryHeap<Frontier>,
                          seq: &mut usize| {
        let key = (cand.completion.len(), usize::MAX - cand.consumed);
        plain.push(cand.clone());
        *seq += 1;
        queue.push(Frontier { key, seq: *seq, item: Item::Plain(cand) });
    };
    let push_shift =
        |cand: SkipCand, queue: &mut BinaryHeap<Frontier>, seq: &mut usize| {
            let key = (cand.completion.len(), usize::MAX - cand.consumed);
            *seq += 1;
            queue.push(Frontier { key, seq: *seq, item: Item::Shifted(cand) });
        };

    let leaf = Cand {
        tree: tree_of_letter(head),
        flat: vec![head],
        consumed: 1,
        completion: Vec::new(),
    };
    seen_plain.insert(leaf.tree.clone());
    push_plain(leaf, &mut plain, &mut queue, &mut seq);

    // Brackets with the anchor letter first: head · A · head⁻¹ · A⁻¹, with A
    // anchored one letter further in.
    for a in next {
        let tree = CommutatorTree::bracket(tree_of_letter(head), a.tree.clone());
        if seen_plain.contains(&tree) {
            continue;
        }
        let flat = bracket_flat(&[head], &a.flat);
        if let Some(cand) = align(tree, flat, word_tail, seam_budget) {
            seen_plain.insert(cand.tree.clone());
            push_plain(cand, &mut plain, &mut queue, &mut seq);
        }
    }

    // Weight-two seeds with a hidden front: [a, head] shows head first.
    for g in 1..=rank as i32 {
        for a in [g, -g] {
            let tree = CommutatorTree::bracket(tree_of_letter(a), tree_of_letter(head));
            if seen_shift.contains(&tree) {
                continue;
            }
            let flat = bracket_flat(&[a], &[head]);
            if let Some(cand) = align_skip(tree, flat, word_tail, seam_budget) {
                seen_shift.insert(cand.tree.clone());
                shifted += 1;
                push_shift(cand, &mut queue, &mut seq);
            }
        }
    }

    let mut pops = 0usize;
    while let Some(entry) = queue.pop() {
        pops += 1;
        if pops > POPS_PER_POS || plain.len() >= GROWTH_CAP {
            break;
        }
        match entry.item {
            Item::Plain(a) => {
                for g in 1..=rank as i32 {
                    for s in [g, -g] {
                        // Generator second: A · s · A⁻¹ · s⁻¹ keeps the front.
                        let tree = CommutatorTree::bracket(a.tree.clone(), tree_of_letter(s));
                        if !seen_plain.contains(&tree) {
                            let flat = bracket_flat(&a.flat, &[s]);
                            if let Some(cand) = align(tree, flat, word_tail, seam_budget) {
                                seen_plain.insert(cand.tree.clone());
                                push_plain(cand, &mut plain, &mut queue, &mut seq);
                            }
                        }
                        // Generator first without cancellation hides it.
                        if shifted < GROWTH_CAP {
                            let tree =
                                CommutatorTree::bracket(tree_of_letter(s), a.tree.clone());
                            if !seen_shift.contains(&tree) {
                                let flat = bracket_flat(&[s], &a.flat);
                                if let Some(cand) =
                                    align_skip(tree, flat, word_tail, seam_budget)
                                {
                                    seen_shift.insert(cand.tree.clone());
                                    shifted += 1;
                                    push_shift(cand, &mut queue, &mut seq);
                                }
                            }
                        }
                    }
                }
            }
            Item::Shifted(a) => {
                // The wrapper that cancels the hidden letter makes the whole
                // flattening visible again.
                let s = -a.flat[0];
                let tree = CommutatorTree::bracket(tree_of_letter(s), a.tree.clone());
                if !seen_plain.contains(&tree) {
                    let flat = bracket_flat(&[s], &a.flat);
                    if let Some(cand) = align(tree, flat, word_tail, seam_budget) {
                        seen_plain.insert(cand.tree.clone());
                        push_plain(cand, &mut plain, &mut queue, &mut seq);
                    }
                }
                if shifted >= GROWTH_CAP {
                    continue;
                }
                for g in 1..=rank as i32 {
                    for s in [g, -g] {
                        let tree = CommutatorTree::bracket(a.tree.clone(), tree_of_letter(s));
                        if seen_shift.contains(&tree) {
                            continue;
                        }
                        let flat = bracket_flat(&a.flat, &[s]);
                        if let Some(cand) = align_skip(tree, flat, word_tail, seam_budget) {
                            seen_shift.insert(cand.tree.clone());
                            shifted += 1;
                            push_shift(cand, &mut queue, &mut seq);
                        }
                    }
                }
            }
        }
    }

    plain.sort_by_key(|c| (c.completion.len(), usize::MAX - c.consumed));
    plain.truncate(CANDS_PER_POS);
    plain
}

/// Reduced flattening of `[a, b]` from the reduced flattenings of the sides.
fn bracket_flat(a: &[i32], b: &[i32]) -> Vec<i32> {
    let mut letters = Vec::with_capacity(2 * (a.len() + b.len()));
    letters.extend_from_slice(a);
    letters.extend_from_slice(b);
    letters.extend(inverted(a));
    letters.extend(inverted(b));
    reduce_letters(letters)
}

fn reduce_letters(letters: Vec<i32>) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::with_capacity(letters.len());
    for l in letters {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// Aligns a reduced flattening against the word; the unmatched suffix becomes
/// the completion if it fits the budget. Unanchored candidates are dropped.
fn align(tree: CommutatorTree, flat: Vec<i32>, word: &[i32], seam_budget: usize) -> Option<Cand> {
    let matched = flat.iter().zip(word.iter()).take_while(|(f, w)| f == w).count();
    if matched == 0 || flat.len() - matched > seam_budget {
        return None;
    }
    let completion = flat[matched..].to_vec();
    Some(Cand { tree, flat, consumed: matched, completion })
}

/// Aligns a flattening whose first letter is hidden behind a future wrapper;
/// everything after it must start the word.
fn align_skip(
    tree: CommutatorTree,
    flat: Vec<i32>,
    word: &[i32],
    seam_budget: usize,
) -> Option<SkipCand> {
    if flat.len() < 2 {
        return None;
    }
    let matched = flat[1..].iter().zip(word.iter()).take_while(|(f, w)| f == w).count();
    if matched == 0 || flat.len() - 1 - matched > seam_budget {
        return None;
    }
    let completion = flat[1 + matched..].to_vec();
    Some(SkipCand { tree, flat, consumed: matched, completion })
}

fn tree_of_letter(letter: i32) -> CommutatorTree {
    CommutatorTree::leaf(letter.unsigned_abs() as usize, if letter > 0 { 1 } else { -1 })
}

fn inverted(letters: &[i32]) -> Vec<i32> {
    letters.iter().rev().map(|l| -l).collect()
}

// ---------------------------------------------------------------------------
// Collection step: the degree-k part of the expansion of a word k deep in the
// lower central series is a Lie polynomial; write it in the Lyndon basis and
// realize each basis element as a product of left-normed simple commutators.

type LieCombo = BTreeMap<Vec<u16>, Int>;

fn collect_level(
    series: &MagnusSeries<Int>,
    k: usize,
    rank: usize,
    max_factors: usize,
    lie_cache: &mut BTreeMap<Vec<u16>, LieCombo>,
) -> Result<Vec<CommutatorTree>, DecomposeError> {
    let mut xi: LieCombo = series
        .homogeneous_part(k)
        .into_iter()
        .map(|(m, c)| (m.into_iter().map(|g| g as u16).collect(), c))
        .collect();
    let mut picked: Vec<(Vec<u16>, Int)> = Vec::new();

    for u in lyndon_words(rank as u16, k) {
        let c = match xi.get(&u) {
            Some(c) if !c.is_zero() => c.clone(),
            _ => continue,
        };
        let combo = lie_cache
            .entry(u.clone())
            .or_insert_with(|| lie_expand(&lyndon_bracketing(&u)))
            .clone();
        for (mono, coef) in combo {
            let entry = xi.entry(mono).or_insert_with(|| Int::from(0i32));
            *entry -= &c * coef;
        }
        xi.retain(|_, v| !v.is_zero());
        picked.push((u, c));
    }
    if !xi.is_empty() {
        return Err(DecomposeError::Internal(format!(
            "degree-{} obstruction is not a Lie element",
            k
        )));
    }

    let mut factors = Vec::new();
    for (u, c) in picked {
        for (beta, d) in left_normed_rewrite(&lyndon_bracketing(&u)) {
            let e = &c * Int::from(d);
            let copies = e.abs();
            if Int::from(max_factors as u64) < Int::from(factors.len() as u64) + &copies {
                return Err(DecomposeError::TooManyFactors { cap: max_factors });
            }
            let tree = left_normed_tree(&beta);
            let tree = if e.is_negative() { tree.invert() } else { tree };
            let copies: usize = copies.try_into().expect("bounded by max_factors");
            factors.extend(std::iter::repeat_with(|| tree.clone()).take(copies));
        }
    }
    Ok(factors)
}

/// Lyndon words of length exactly `k` over `{1..n}`, lexicographically
/// ordered, by Duval's generation algorithm.
fn lyndon_words(n: u16, k: usize) -> Vec<Vec<u16>> {
    let mut out = Vec::new();
    let mut w = vec![1u16];
    loop {
        if w.len() == k {
            out.push(w.clone());
        }
        let len = w.len();
        while w.len() < k {
            let c = w[w.len() - len];
            w.push(c);
        }
        while let Some(&last) = w.last() {
            if last == n {
                w.pop();
            } else {
                break;
            }
        }
        match w.last_mut() {
            Some(last) => *last += 1,
            None => break,
        }
    }
    out.sort();
    out
}

fn is_lyndon(w: &[u16]) -> bool {
    (1..w.len()).all(|i| w < &w[i..])
}

/// Standard bracketing of a Lyndon word: split before the longest proper
/// Lyndon suffix and bracket the halves.
fn lyndon_bracketing(u: &[u16]) -> CommutatorTree {
    if u.len() == 1 {
        return CommutatorTree::leaf(u[0] as usize, 1);
    }
    let split = (1..u.len())
        .find(|&i| is_lyndon(&u[i..]))
        .expect("proper Lyndon suffix exists");
    CommutatorTree::bracket(lyndon_bracketing(&u[..split]), lyndon_bracketing(&u[split..]))
}

/// Expands a bracketing into its Lie polynomial via `[a, b] = ab - ba`.
fn lie_expand(tree: &CommutatorTree) -> LieCombo {
    match tree {
        CommutatorTree::Leaf { gen, exp } => {
            let mut out = LieCombo::new();
            out.insert(vec![*gen as u16], Int::from(*exp as i32));
            out
        }
        CommutatorTree::Bracket(a, b) => {
            let ea = lie_expand(a);
            let eb = lie_expand(b);
            let mut out = LieCombo::new();
            for (ma, ca) in &ea {
                for (mb, cb) in &eb {
                    let mut ab = ma.clone();
                    ab.extend_from_slice(mb);
                    let mut ba = mb.clone();
                    ba.extend_from_slice(ma);
                    let c = ca * cb;
                    *out.entry(ab).or_insert_with(|| Int::from(0i32)) += &c;
                    *out.entry(ba).or_insert_with(|| Int::from(0i32)) -= &c;
                }
            }
            out.retain(|_, v| !v.is_zero());
            out
        }
    }
}

/// Rewrites a bracketing of positive leaves as an integer combination of
/// left-normed brackets on the same leaves, using the Jacobi identity
/// `[a,[c,d]] = [[a,c],d] - [[a,d],c]` and dropping brackets that start
/// `[x,x]`.
fn left_normed_rewrite(tree: &CommutatorTree) -> BTreeMap<Vec<u16>, i64> {
    fn go(tree: &CommutatorTree, out: &mut BTreeMap<Vec<u16>, i64>, sign: i64) {
        match tree {
            CommutatorTree::Leaf { gen, .. } => {
                *out.entry(vec![*gen as u16]).or_insert(0) += sign;
            }
            CommutatorTree::Bracket(a, b) => match &**b {
                CommutatorTree::Leaf { gen, .. } => {
                    let mut inner = BTreeMap::new();
                    go(a, &mut inner, sign);
                    for (mut beta, c) in inner {
                        beta.push(*gen as u16);
                        if beta.len() >= 2 && beta[0] == beta[1] {
                            continue;
                        }
                        *out.entry(beta).or_insert(0) += c;
                    }
                }
                CommutatorTree::Bracket(c, d) => {
                    let ac = CommutatorTree::bracket((**a).clone(), (**c).clone());
                    let ad = CommutatorTree::bracket((**a).clone(), (**d).clone());
                    go(&CommutatorTree::bracket(ac, (**d).clone()), out, sign);
                    go(&CommutatorTree::bracket(ad, (**c).clone()), out, -sign);
                }
            },
        }
    }
    let mut out = BTreeMap::new();
    go(tree, &mut out, 1);
    out.retain(|_, v| *v != 0);
    out
}

fn left_normed_tree(beta: &[u16]) -> CommutatorTree {
    let mut iter = beta.iter();
    let first = *iter.next().expect("nonempty bracket");
    let mut tree = CommutatorTree::leaf(first as usize, 1);
    for &g in iter {
        tree = CommutatorTree::bracket(tree, CommutatorTree::leaf(g as usize, 1));
    }
    tree
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(rank: usize, s: &str) -> FreeWord {
        FreeWord::parse(s, Some(rank)).unwrap()
    }

    fn check_round_trip(word: &FreeWord, m: usize, trees: &[CommutatorTree]) {
        for t in trees {
            assert!(t.is_simple(), "factor {} is not simple", t);
            assert!(t.len() >= m, "factor {} shorter than {}", t, m);
        }
        let product = flatten_product(trees, word.rank());
        assert_eq!(product, word.reduce(), "factors multiply to the wrong word");
    }

    #[test]
    fn empty_word_has_empty_decomposition() {
        assert!(decompose_simple_quasi(&FreeWord::empty(2), 3).unwrap().is_empty());
    }

    #[test]
    fn plain_commutator_is_its_own_decomposition() {
        let word = w(2, "[x1,x2]");
        let trees = decompose_simple_quasi(&word, 2).unwrap();
        assert_eq!(trees.len(), 1);
        assert_eq!(trees[0].to_string(), "[x1,x2]");
        check_round_trip(&word, 2, &trees);
    }

    #[test]
    fn product_splits_into_both_factors() {
        let word = w(2, "[x1,x2] [x2,[x1,x2]]");
        let trees = decompose_simple_quasi(&word, 2).unwrap();
        assert_eq!(trees.len(), 2);
        let mut lens: Vec<usize> = trees.iter().map(|t| t.len()).collect();
        lens.sort();
        assert_eq!(lens, vec![2, 3]);
        check_round_trip(&word, 2, &trees);
    }

    #[test]
    fn letters_decompose_at_level_one() {
        let word = w(2, "x1 x2^-1 x1");
        let trees = decompose_simple_quasi(&word, 1).unwrap();
        assert_eq!(trees.len(), 3);
        check_round_trip(&word, 1, &trees);
    }

    #[test]
    fn shallow_word_is_rejected() {
        match decompose_simple_quasi(&w(2, "x1 [x1,x2]"), 2) {
            Err(DecomposeError::NotInTerm { required: 2, depth: 1 }) => {}
            other => panic!("expected depth rejection, got {:?}", other),
        }
    }

    #[test]
    fn conjugated_commutator_decomposes() {
        // x [x,y] x^-1 = [x,[x,y]] · [x,y], found structurally.
        let word = w(2, "x1 [x1,x2] x1^-1");
        let trees = decompose_simple_quasi(&word, 2).unwrap();
        check_round_trip(&word, 2, &trees);
    }

    #[test]
    fn weight_inverted_product_decomposes() {
        // A weight-2 factor wedged between weight-3 factors.
        let word = w(2, "[x1,[x1,x2]] [x1,x2] [[x1,x2],x2]");
        let trees = decompose_simple_quasi(&word, 2).unwrap();
        check_round_trip(&word, 2, &trees);
    }

    #[test]
    fn zero_iteration_budget_reports_stall() {
        let limits = DecomposeLimits { max_iters: 0, ..DecomposeLimits::default() };
        match decompose_with_limits(&w(2, "[x1,x2]"), 2, &limits) {
            Err(DecomposeError::Stalled { .. }) => {}
            other => panic!("expected stall, got {:?}", other),
        }
    }

    #[test]
    fn lyndon_words_are_generated_in_order() {
        assert_eq!(lyndon_words(2, 1), vec![vec![1], vec![2]]);
        assert_eq!(lyndon_words(2, 3), vec![vec![1, 1, 2], vec![1, 2, 2]]);
        assert_eq!(
            lyndon_words(3, 2),
            vec![vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        for u in lyndon_words(3, 5) {
            assert!(is_lyndon(&u), "{:?} is not Lyndon", u);
        }
        assert_eq!(lyndon_words(2, 5).len(), 6);
    }

    #[test]
    fn lyndon_bracketing_leads_with_its_word() {
        // The expansion of the bracketing of u is u plus lex-greater terms.
        for k in 2..=5 {
            for u in lyndon_words(2, k) {
                let combo = lie_expand(&lyndon_bracketing(&u));
                assert_eq!(combo.get(&u), Some(&Int::from(1)), "leading term of {:?}", u);
                for (mono, _) in &combo {
                    assert!(mono >= &u, "{:?} precedes {:?} in {:?}", mono, u, u);
                }
            }
        }
    }

    #[test]
    fn left_normed_rewrite_preserves_lie_polynomial() {
        for k in 2..=5 {
            for u in lyndon_words(2, k) {
                let tree = lyndon_bracketing(&u);
                let direct = lie_expand(&tree);
                let mut recombined = LieCombo::new();
                for (beta, d) in left_normed_rewrite(&tree) {
                    for (mono, c) in lie_expand(&left_normed_tree(&beta)) {
                        let entry =
                            recombined.entry(mono).or_insert_with(|| Int::from(0i32));
                        *entry += c * Int::from(d);
                    }
                }
                recombined.retain(|_, v| !v.is_zero());
                assert_eq!(recombined, direct, "rewrite of {:?} drifted", u);
            }
        }
    }

    #[test]
    fn collection_handles_commutator_powers() {
        let word = w(2, "[x1,x2]^3 [[x1,x2],x2]");
        let trees = decompose_simple_quasi(&word, 2).unwrap();
        check_round_trip(&word, 2, &trees);
    }

    /// Random simple tree: a chain of brackets with the leaf on a random
    /// side at each level. Every simple tree has this caterpillar shape.
    fn arb_simple_tree(rank: usize, weight: usize) -> impl Strategy<Value = CommutatorTree> {
        let leaf = (1..=rank, prop_oneof![Just(1i8), Just(-1i8)])
            .prop_map(|(g, e)| CommutatorTree::leaf(g, e));
        let levels = proptest::collection::vec(
            ((1..=rank, prop_oneof![Just(1i8), Just(-1i8)]), any::<bool>()),
            weight - 1,
        );
        (leaf, levels).prop_map(|(seed, levels)| {
            let mut tree = seed;
            for ((g, e), leaf_left) in levels {
                let leaf = CommutatorTree::leaf(g, e);
                tree = if leaf_left {
                    CommutatorTree::bracket(leaf, tree)
                } else {
                    CommutatorTree::bracket(tree, leaf)
                };
            }
            tree
        })
    }

    fn arb_simple_product(m: usize) -> impl Strategy<Value = (FreeWord, usize)> {
        proptest::collection::vec((m..=m + 2).prop_flat_map(move |k| arb_simple_tree(3, k)), 1..=3)
            .prop_map(move |trees| {
                let word = flatten_product(&trees, 3);
                (word, m)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn random_simple_products_round_trip((word, m) in prop_oneof![arb_simple_product(2), arb_simple_product(3)]) {
            let trees = decompose_simple_quasi(&word, m).unwrap();
            check_round_trip(&word, m, &trees);
        }

        #[test]
        fn random_single_simples_round_trip(tree in arb_simple_tree(3, 4)) {
            let word = tree.flatten(3);
            let trees = decompose_simple_quasi(&word, 4).unwrap();
            check_round_trip(&word, 4, &trees);
        }
    }
}
