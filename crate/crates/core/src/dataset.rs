//! YAML datasets: sentences with their parse fixtures and gold annotations.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::apriori::{load_dep_graph, DepGraph, GraphError, MeuDb};
use crate::eval::{canonical, Clusters};
use crate::reason::PairClass;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed dataset {path}: {source}")]
    Yaml { path: String, source: serde_yaml::Error },
    #[error("invalid dataset: {0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Fixture { path: String, source: GraphError },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SentenceRef {
    pub text: String,
    pub graph: PathBuf,
    #[serde(default)]
    pub meu: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetFile {
    #[serde(default)]
    name: Option<String>,
    sentences: Vec<SentenceRef>,
    #[serde(default)]
    expected_clusters: Clusters,
    #[serde(default)]
    expected_pairs: BTreeMap<String, String>,
}

#[derive(Clone, Debug)]
pub struct Dataset {
    pub name: String,
    pub sentences: Vec<SentenceRef>,
    pub expected_clusters: Clusters,
    pub expected_pairs: BTreeMap<(usize, usize), PairClass>,
}

/// `"i->j"` as used for pair ids.
pub fn pair_id(i: usize, j: usize) -> String {
    format!("{i}->{j}")
}

fn parse_pair(key: &str) -> Option<(usize, usize)> {
    let (a, b) = key.split_once("->")?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

impl Dataset {
    /// Fixture paths are resolved against the dataset file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, DatasetError> {
        let p = path.as_ref();
        let text =
            std::fs::read_to_string(p).map_err(|source| DatasetError::Io { path: p.display().to_string(), source })?;
        let mut d = Self::from_yaml(&text).map_err(|e| match e {
            DatasetError::Yaml { source, .. } => DatasetError::Yaml { path: p.display().to_string(), source },
            other => other,
        })?;
        let base = p.parent().unwrap_or(Path::new("."));
        for s in &mut d.sentences {
            s.graph = base.join(&s.graph);
            s.meu = s.meu.as_ref().map(|m| base.join(m));
        }
        if d.name.is_empty() {
            d.name = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        }
        Ok(d)
    }

    pub fn from_yaml(text: &str) -> Result<Self, DatasetError> {
        let f: DatasetFile =
            serde_yaml::from_str(text).map_err(|source| DatasetError::Yaml { path: "<input>".into(), source })?;
        let n = f.sentences.len();
        let mut expected_pairs = BTreeMap::new();
        for (k, v) in &f.expected_pairs {
            let (i, j) = parse_pair(k).ok_or_else(|| DatasetError::Invalid(format!("pair key {k:?} is not i->j")))?;
            if i >= n || j >= n {
                return Err(DatasetError::Invalid(format!("pair {k} out of range")));
            }
            expected_pairs.insert((i, j), v.parse().map_err(DatasetError::Invalid)?);
        }
        let mut seen = vec![false; n];
        for &i in f.expected_clusters.iter().flatten() {
            if i >= n {
                return Err(DatasetError::Invalid(format!("cluster member {i} out of range")));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(DatasetError::Invalid(format!("sentence {i} in two clusters")));
            }
        }
        if !f.expected_clusters.is_empty() && seen.contains(&false) {
            return Err(DatasetError::Invalid("expected clusters do not cover every sentence".into()));
        }
        Ok(Dataset {
            name: f.name.unwrap_or_default(),
            sentences: f.sentences,
            expected_clusters: canonical(f.expected_clusters),
            expected_pairs,
        })
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// Parse graph and entity table of sentence `i`; a missing table is empty.
    pub fn fixture(&self, i: usize) -> Result<(DepGraph, MeuDb), DatasetError> {
        let s = &self.sentences[i];
        let fixture = |p: &Path, e| DatasetError::Fixture { path: p.display().to_string(), source: e };
        let g = load_dep_graph(&s.graph).map_err(|e| fixture(&s.graph, e))?;
        let db = match &s.meu {
            Some(m) => MeuDb::load(m).map_err(|e| fixture(m, e))?,
            None => MeuDb::default(),
        };
        Ok((g, db))
    }

    /// Pairs annotated as conflicting.
    pub fn conflicts(&self) -> Vec<(usize, usize)> {
        self.expected_pairs.iter().filter(|(_, c)| **c == PairClass::Inconsistency).map(|(k, _)| *k).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = r#"
sentences:
  - {text: "a", graph: a.json}
  - {text: "b", graph: b.json, meu: b.meu.json}
expected_clusters: [[1], [0]]
expected_pairs:
  "0->1": IMPLICATION
  "1->0": indifference
"#;

    #[test]
    fn parses() {
        let d = Dataset::from_yaml(DOC).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.expected_clusters, vec![vec![0], vec![1]]);
        assert_eq!(d.expected_pairs[&(1, 0)], PairClass::Indifference);
    }

    #[test]
    fn rejects_bad_pairs_and_clusters() {
        assert!(Dataset::from_yaml(&DOC.replace("\"0->1\"", "\"0->5\"")).is_err());
        assert!(Dataset::from_yaml(&DOC.replace("[[1], [0]]", "[[1], [1]]")).is_err());
        assert!(Dataset::from_yaml(&DOC.replace("IMPLICATION", "ENTAILS")).is_err());
        assert!(Dataset::from_yaml("sentences: []\nextra: 1\n").is_err());
    }
}
