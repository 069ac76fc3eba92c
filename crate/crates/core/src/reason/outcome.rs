use serde::{Deserialize, Serialize};

/// Multi-valued comparison outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CmpOutcome {
    Eq,
    NEq,
    /// Specificity lost through a missing copula.
    ImplNspec,
    /// A missing value implies any value.
    ImplNone,
    /// The second item is a specific instance of the first.
    ImplDown,
    /// Generic implication.
    ImplGen,
    Omega,
}

use CmpOutcome::*;

impl CmpOutcome {
    pub const ALL: [CmpOutcome; 7] = [Eq, NEq, ImplNspec, ImplNone, ImplDown, ImplGen, Omega];

    pub fn is_impl(self) -> bool {
        matches!(self, ImplNspec | ImplNone | ImplDown | ImplGen)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Eq => "Eq",
            NEq => "NEq",
            ImplNspec => "⇒nspec",
            ImplNone => "⇒None",
            ImplDown => "⇒↓",
            ImplGen => "↠",
            Omega => "ω",
        }
    }
}

impl std::fmt::Display for CmpOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Negation transform.
pub fn eta(v: CmpOutcome) -> CmpOutcome {
    match v {
        Eq => NEq,
        NEq => Eq,
        _ => Omega,
    }
}

/// Most specific outcome summarising a set.
pub fn sigma(s: &[CmpOutcome]) -> CmpOutcome {
    let has = |x| s.contains(&x);
    if s.is_empty() {
        Omega
    } else if has(NEq) {
        NEq
    } else if has(Eq) {
        Eq
    } else if has(ImplNspec) && !has(ImplNone) && !has(ImplDown) && !has(ImplGen) {
        ImplNspec
    } else if !has(ImplNspec) && has(ImplNone) && !has(ImplDown) && !has(ImplGen) {
        ImplNone
    } else if !has(ImplNspec) && !has(ImplNone) && has(ImplDown) && !has(ImplGen) {
        ImplDown
    } else if s.iter().any(|x| x.is_impl()) {
        ImplGen
    } else {
        Omega
    }
}

/// Property-level summary; empty means equivalent.
pub fn sigma_prime(s: &[CmpOutcome]) -> CmpOutcome {
    let has = |x| s.contains(&x);
    if s.is_empty() {
        Eq
    } else if has(Omega) {
        Omega
    } else if has(NEq) {
        NEq
    } else if !has(Eq) && s.iter().any(|x| x.is_impl()) {
        sigma(s)
    } else if has(Eq) {
        Eq
    } else {
        Omega
    }
}
