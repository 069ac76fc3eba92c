//! Ex-post reasoning: knowledge-base-driven comparison of atoms, possible-world
//! tables, paraconsistent joining and confidence scoring.

mod classify;
mod compare;
mod outcome;
pub mod ratio;
mod table;

pub use classify::{
    analyse, classify_pair, AtomMotivation, Direction, PairAnalysis, PairClass, PairVerdict, Prepared, ReasonError,
};
pub use compare::{
    cmp_binary, cmp_name, cmp_prop, cmp_prop_plain, cmp_term, cmp_unary, compare_props, kappa_i, kappa_r, Expanded,
    Verdict,
};
pub use outcome::{eta, sigma, sigma_prime, CmpOutcome};
pub use table::{join_all, pair_table, tabular_semantics, AtomBudgetExceeded, WorldTable, DEFAULT_ATOM_CAP};

/// Exact confidence value.
pub type Confidence = num_rational::Ratio<u64>;
