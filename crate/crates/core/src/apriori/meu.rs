//! Multi-word entity unit matching against a per-sentence MEU database.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::graph::GraphError;

/// Minimum normalised edit similarity for a fuzzy match.
pub const SIMILARITY_THRESHOLD: f64 = 0.8;
/// Gazetteer matches are down-weighted by this factor.
pub const GEONAMES_WEIGHT: f64 = 0.8;

/// Most specific first.
pub const TYPE_HIERARCHY: [&str; 7] = ["VERB", "GPE", "LOC", "ORG", "NOUN", "ENTITY", "ADJECTIVE"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeuSource {
    GeoNames,
    SUTime,
    Stanza,
    Parmenides,
    ConceptNet,
}

impl MeuSource {
    pub fn name(self) -> &'static str {
        match self {
            MeuSource::GeoNames => "GeoNames",
            MeuSource::SUTime => "SUTime",
            MeuSource::Stanza => "Stanza",
            MeuSource::Parmenides => "Parmenides",
            MeuSource::ConceptNet => "ConceptNet",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeuEntry {
    pub start: usize,
    pub end: usize,
    pub text: String,
    /// Lemmatised text used for fuzzy comparison.
    pub monad: String,
    #[serde(rename = "type")]
    pub type_: String,
    pub source: MeuSource,
    pub confidence: f64,
}

impl MeuEntry {
    /// Confidence after source weighting.
    pub fn weighted(&self) -> f64 {
        match self.source {
            MeuSource::GeoNames => self.confidence * GEONAMES_WEIGHT,
            _ => self.confidence,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MeuDb {
    pub entries: Vec<MeuEntry>,
}

impl MeuDb {
    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let db: MeuDb = serde_json::from_str(text).map_err(|e| GraphError::Parse(e.to_string()))?;
        for e in &db.entries {
            if e.start >= e.end {
                return Err(GraphError::Parse(format!("MEU entry {:?} has start ≥ end", e.text)));
            }
            if !(0.0..=1.0).contains(&e.confidence) {
                return Err(GraphError::Parse(format!("MEU entry {:?} has confidence outside [0,1]", e.text)));
            }
        }
        Ok(db)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, GraphError> {
        let p = path.as_ref();
        let text =
            std::fs::read_to_string(p).map_err(|source| GraphError::Io { path: p.display().to_string(), source })?;
        MeuDb::from_json(&text)
    }
}

fn rank(t: &str) -> Option<usize> {
    TYPE_HIERARCHY.iter().position(|h| *h == t)
}

/// Minimum of the listed types under the hierarchy, `"None"` if none is listed.
pub fn most_specific_type<S: AsRef<str>>(types: &[S]) -> String {
    types
        .iter()
        .filter_map(|t| rank(t.as_ref()).map(|r| (r, t.as_ref())))
        .min_by_key(|(r, _)| *r)
        .map_or_else(|| "None".to_string(), |(_, t)| t.to_string())
}

/// An entry type satisfies a required type when equal or more specific.
pub fn type_compatible(entry: &str, required: &str) -> bool {
    if required.is_empty() || required == "None" || entry == required {
        return true;
    }
    matches!((rank(entry), rank(required)), (Some(a), Some(b)) if a <= b)
}

pub fn similarity(a: &str, b: &str) -> f64 {
    strsim::normalized_levenshtein(&a.to_lowercase(), &b.to_lowercase())
}

/// A typed span match.
#[derive(Clone, Debug, PartialEq)]
pub struct MeuMatch {
    pub confidence: f64,
    pub type_: String,
    pub source: Option<MeuSource>,
}

impl MeuMatch {
    pub fn none() -> Self {
        MeuMatch { confidence: 0.0, type_: "None".into(), source: None }
    }
}

/// Best entry overlapping `[min, max)` of a compatible type, weighted by its
/// similarity to `text` when one is given.
pub fn meu_match(min: usize, max: usize, text: Option<&str>, required_type: &str, db: &MeuDb) -> MeuMatch {
    let mut best = MeuMatch::none();
    for e in &db.entries {
        if e.start >= max || min >= e.end || !type_compatible(&e.type_, required_type) {
            continue;
        }
        let sim = match text {
            Some(t) => similarity(&e.monad, t).max(similarity(&e.text, t)),
            None => 1.0,
        };
        if sim < SIMILARITY_THRESHOLD {
            continue;
        }
        let score = e.weighted() * sim;
        if score > best.confidence {
            best = MeuMatch { confidence: score, type_: e.type_.clone(), source: Some(e.source) };
        }
    }
    best
}

/// Best confidence and type among entries for exactly this span of text.
pub fn meu_resolution(min: usize, max: usize, required_type: &str, text: &str, db: &MeuDb) -> (f64, String) {
    let m = meu_match(min, max, Some(text), required_type, db);
    (m.confidence, m.type_)
}
