//! A-priori phase: dependency graphs in, typed entities and groups out.
//!
//! Function words (`case`, `det`, `aux`, `cop`, `mark`, ...) fold into their
//! heads; `compound` chains resolve against the MEU database into single
//! entities with an optional `extra`; negation, coordination and repeated
//! obliques become [`SetOfSingletons`].

mod coalesce;
mod entity;
mod graph;
mod meu;

pub use coalesce::{coalesce_groups, resolve_multiword, AprioriGraph, AprioriOptions, EmptyGroupError, Link, Token};
pub use entity::{
    is_position_key, render_props, Entity, GroupType, PropValue, Props, SetOfSingletons, Singleton,
    DEFAULT_EXISTENTIAL, EXISTENTIAL,
};
pub use graph::{load_dep_graph, DepEdge, DepGraph, DepNode, GraphError};
pub use meu::{
    meu_match, meu_resolution, most_specific_type, similarity, type_compatible, MeuDb, MeuEntry, MeuMatch, MeuSource,
    GEONAMES_WEIGHT, SIMILARITY_THRESHOLD, TYPE_HIERARCHY,
};
