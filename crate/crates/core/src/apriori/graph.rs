use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed dependency graph: {0}")]
    Parse(String),
    #[error("dependency graph has a cycle through node {0}")]
    Cyclic(u32),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DepNode {
    pub id: u32,
    pub name: String,
    pub lemma: String,
    pub pos: String,
    #[serde(rename = "type")]
    pub type_: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub properties: BTreeMap<String, Vec<String>>,
    /// Character span of the word in `text`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DepEdge {
    pub source: u32,
    pub target: u32,
    pub label: String,
    #[serde(default)]
    pub label_type: String,
    #[serde(default)]
    pub negated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DepGraph {
    #[serde(default)]
    pub text: String,
    pub nodes: Vec<DepNode>,
    pub edges: Vec<DepEdge>,
}

impl DepGraph {
    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let g: DepGraph = serde_json::from_str(text).map_err(|e| GraphError::Parse(e.to_string()))?;
        g.validate()?;
        Ok(g)
    }

    pub fn node(&self, id: u32) -> Option<&DepNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    /// Unique ids, known endpoints, no cycles.
    pub fn validate(&self) -> Result<(), GraphError> {
        let mut ids = BTreeSet::new();
        for n in &self.nodes {
            if !ids.insert(n.id) {
                return Err(GraphError::Parse(format!("duplicate node id {}", n.id)));
            }
            if let (Some(s), Some(e)) = (n.start, n.end) {
                if s > e {
                    return Err(GraphError::Parse(format!("node {} has start after end", n.id)));
                }
            }
        }
        for e in &self.edges {
            for end in [e.source, e.target] {
                if !ids.contains(&end) {
                    return Err(GraphError::Parse(format!(
                        "edge {}→{} references missing node {end}",
                        e.source, e.target
                    )));
                }
            }
        }
        self.check_acyclic()
    }

    fn check_acyclic(&self) -> Result<(), GraphError> {
        let mut children: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for e in &self.edges {
            children.entry(e.source).or_default().push(e.target);
        }
        // 0 unvisited, 1 on stack, 2 done
        let mut state: BTreeMap<u32, u8> = self.nodes.iter().map(|n| (n.id, 0)).collect();
        for n in &self.nodes {
            if state[&n.id] != 0 {
                continue;
            }
            let mut stack = vec![(n.id, 0usize)];
            state.insert(n.id, 1);
            while let Some((v, i)) = stack.pop() {
                let kids = children.get(&v).map(Vec::as_slice).unwrap_or(&[]);
                if i < kids.len() {
                    stack.push((v, i + 1));
                    let w = kids[i];
                    match state[&w] {
                        0 => {
                            state.insert(w, 1);
                            stack.push((w, 0));
                        }
                        1 => return Err(GraphError::Cyclic(w)),
                        _ => {}
                    }
                } else {
                    state.insert(v, 2);
                }
            }
        }
        Ok(())
    }

    /// Nodes with no incoming edge, in id order.
    pub fn roots(&self) -> Vec<u32> {
        let targets: BTreeSet<u32> = self.edges.iter().map(|e| e.target).collect();
        let mut r: Vec<u32> = self.nodes.iter().map(|n| n.id).filter(|i| !targets.contains(i)).collect();
        r.sort_unstable();
        r
    }
}

pub fn load_dep_graph(path: impl AsRef<Path>) -> Result<DepGraph, GraphError> {
    let p = path.as_ref();
    let text = std::fs::read_to_string(p).map_err(|source| GraphError::Io { path: p.display().to_string(), source })?;
    DepGraph::from_json(&text)
}
