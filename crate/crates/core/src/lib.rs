//! Compiles dependency-parsed factoid sentences into an extended first-order
//! logic and scores ordered sentence pairs for implication, inconsistency or
//! indifference over possible worlds.

pub mod apriori;
pub mod bench;
pub mod dataset;
pub mod eval;
pub mod evaluate;
pub mod explain;
pub mod fol;
pub mod kb;
pub mod kernel;
pub mod logifun;
pub mod pipeline;
pub mod reason;
pub mod rewrite;
