/// Resource knobs shared by the pipeline entry points.
///
/// Every field is a budget or a cap, never a tolerance: exceeding one yields
/// a resource error or an explicitly inconclusive outcome, never a wrong
/// value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    /// Truncation degree for Magnus expansions and Chen-Milnor rewriting.
    pub magnus_cap: usize,
    /// Largest crossing count the full Conway skein recursion will accept.
    pub conway_crossing_bound: usize,
    /// Move budget for diagram simplification.
    pub simplify_budget: usize,
    /// Longest mu-bar sequence the equivalence pipelines scan.
    pub mu_cap: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            magnus_cap: 8,
            conway_crossing_bound: 16,
            simplify_budget: 10_000,
            mu_cap: 6,
        }
    }
}
