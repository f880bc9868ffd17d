use std::fmt;

use serde::{Deserialize, Serialize};

use super::FreeWord;

/// A formal iterated commutator over free generators.
///
/// Leaves carry a generator with exponent +1 or -1; internal nodes are group
/// commutators `[a, b] = a b a^-1 b^-1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CommutatorTree {
    Leaf { gen: usize, exp: i8 },
    Bracket(Box<CommutatorTree>, Box<CommutatorTree>),
}

impl CommutatorTree {
    pub fn leaf(gen: usize, exp: i8) -> Self {
        assert!(exp == 1 || exp == -1, "leaf exponent must be +1 or -1");
        CommutatorTree::Leaf { gen, exp }
    }

    pub fn bracket(a: CommutatorTree, b: CommutatorTree) -> Self {
        CommutatorTree::Bracket(Box::new(a), Box::new(b))
    }

    /// Number of leaves; the weight of the commutator.
    pub fn len(&self) -> usize {
        match self {
            CommutatorTree::Leaf { .. } => 1,
            CommutatorTree::Bracket(a, b) => a.len() + b.len(),
        }
    }

    /// Simple commutators have a bare generator on one side of every bracket.
    pub fn is_simple(&self) -> bool {
        match self {
            CommutatorTree::Leaf { .. } => true,
            CommutatorTree::Bracket(a, b) => {
                let leaf_side = matches!(**a, CommutatorTree::Leaf { .. })
                    || matches!(**b, CommutatorTree::Leaf { .. });
                leaf_side && a.is_simple() && b.is_simple()
            }
        }
    }

    /// Spells the commutator out as a word in the free group of the given
    /// rank.
    pub fn flatten(&self, rank: usize) -> FreeWord {
        match self {
            CommutatorTree::Leaf { gen, exp } => {
                let g = FreeWord::generator(rank, *gen).expect("leaf generator within rank");
                if *exp > 0 { g } else { g.invert() }
            }
            CommutatorTree::Bracket(a, b) => {
                a.flatten(rank).commutator(&b.flatten(rank)).expect("children share the rank")
            }
        }
    }

    /// The tree whose flattening is the inverse word: `[a,b]^-1 = [b,a]`, and
    /// a leaf inverts by flipping its exponent.
    pub fn invert(&self) -> Self {
        match self {
            CommutatorTree::Leaf { gen, exp } => CommutatorTree::Leaf { gen: *gen, exp: -exp },
            CommutatorTree::Bracket(a, b) => {
                CommutatorTree::Bracket(Box::new((**b).clone()), Box::new((**a).clone()))
            }
        }
    }

    /// Largest generator index appearing in the tree.
    pub fn max_generator(&self) -> usize {
        match self {
            CommutatorTree::Leaf { gen, .. } => *gen,
            CommutatorTree::Bracket(a, b) => a.max_generator().max(b.max_generator()),
        }
    }
}

impl fmt::Display for CommutatorTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CommutatorTree::Leaf { gen, exp } => {
                if *exp > 0 {
                    write!(f, "x{}", gen)
                } else {
                    write!(f, "x{}^-1", gen)
                }
            }
            CommutatorTree::Bracket(a, b) => write!(f, "[{},{}]", a, b),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leaf(g: usize) -> CommutatorTree {
        CommutatorTree::leaf(g, 1)
    }

    #[test]
    fn flatten_matches_word_commutator() {
        let t = CommutatorTree::bracket(leaf(1), leaf(2));
        assert_eq!(t.flatten(2), FreeWord::parse("[x1,x2]", Some(2)).unwrap());
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn nested_flatten() {
        let t = CommutatorTree::bracket(CommutatorTree::bracket(leaf(1), leaf(2)), leaf(2));
        // flatten multiplies its pieces, so the result is freely reduced.
        assert_eq!(t.flatten(2), FreeWord::parse("[[x1,x2],x2]", Some(2)).unwrap().reduce());
        assert_eq!(t.len(), 3);
    }

    #[test]
    fn simple_detection() {
        let ab = CommutatorTree::bracket(leaf(1), leaf(2));
        let cd = CommutatorTree::bracket(leaf(3), leaf(4));
        assert!(ab.is_simple());
        assert!(CommutatorTree::bracket(ab.clone(), leaf(3)).is_simple());
        assert!(CommutatorTree::bracket(leaf(3), ab.clone()).is_simple());
        // A bracket of two brackets is not simple.
        assert!(!CommutatorTree::bracket(ab, cd).is_simple());
    }

    #[test]
    fn invert_flattens_to_inverse() {
        let t = CommutatorTree::bracket(CommutatorTree::bracket(leaf(1), leaf(2)), leaf(1));
        assert_eq!(t.invert().flatten(2), t.flatten(2).invert());
        let l = CommutatorTree::leaf(2, -1);
        assert_eq!(l.invert().flatten(2), l.flatten(2).invert());
    }

    #[test]
    fn display_round_trip_through_parser() {
        let t = CommutatorTree::bracket(CommutatorTree::bracket(leaf(1), leaf(2)), CommutatorTree::leaf(2, -1));
        let shown = t.to_string();
        assert_eq!(shown, "[[x1,x2],x2^-1]");
        assert_eq!(FreeWord::parse(&shown, Some(2)).unwrap().reduce(), t.flatten(2));
    }
}
