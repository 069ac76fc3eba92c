//! Symmetric baselines: bag-of-words cosine and edge-matching graph similarity.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::apriori::{Entity, GroupType, PropValue};
use crate::kernel::Relationship;

fn tokens(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric() && c != '\'').filter(|w| !w.is_empty()).map(|w| w.to_lowercase())
}

/// Rectified cosine between term-frequency vectors.
pub fn token_cosine(a: &str, b: &str) -> f64 {
    let tf = |s: &str| {
        let mut m: BTreeMap<String, f64> = BTreeMap::new();
        for t in tokens(s) {
            *m.entry(t).or_default() += 1.0;
        }
        m
    };
    let (x, y) = (tf(a), tf(b));
    let dot: f64 = x.iter().filter_map(|(k, v)| y.get(k).map(|w| v * w)).sum();
    let norm = |m: &BTreeMap<String, f64>| m.values().map(|v| v * v).sum::<f64>().sqrt();
    let d = norm(&x) * norm(&y);
    if d == 0.0 {
        return 0.0;
    }
    (dot / d).clamp(0.0, 1.0)
}

/// Normalised token overlap `|A∩B| / |A∪B|`; two empty names are identical.
pub fn token_overlap(a: &str, b: &str) -> f64 {
    let x: BTreeSet<String> = tokens(a).collect();
    let y: BTreeSet<String> = tokens(b).collect();
    if x.is_empty() && y.is_empty() {
        return 1.0;
    }
    x.intersection(&y).count() as f64 / x.union(&y).count() as f64
}

/// Graph node: a name or a logical combination of nodes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum GNode {
    Leaf(String),
    And(Vec<GNode>),
    Or(Vec<GNode>),
    Not(Box<GNode>),
}

impl GNode {
    fn leaves(&self) -> Vec<String> {
        match self {
            GNode::Leaf(s) => vec![s.clone()],
            GNode::And(xs) | GNode::Or(xs) => xs.iter().flat_map(GNode::leaves).collect(),
            GNode::Not(x) => x.leaves(),
        }
    }

    fn is_leaf(&self) -> bool {
        matches!(self, GNode::Leaf(_))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GEdge {
    pub source: GNode,
    pub target: GNode,
    pub label: String,
    pub negated: bool,
}

fn leaf_name(e: &Entity) -> String {
    match e {
        Entity::Single(s) => {
            let mut name = s.named_entity.clone();
            if let Some(PropValue::Text(x)) = s.prop("extra") {
                name = format!("{name} {x}");
            }
            name
        }
        Entity::Set(_) => e.leaf_names().join(" "),
    }
}

fn node(e: &Entity) -> GNode {
    match e {
        Entity::Single(s) => match &s.kernel {
            Some(k) => GNode::Leaf(k.label.clone()),
            None => GNode::Leaf(leaf_name(e)),
        },
        Entity::Set(set) => {
            let xs: Vec<GNode> = set.entities.iter().map(node).collect();
            match set.group_type {
                GroupType::Or => GNode::Or(xs),
                GroupType::Not => GNode::Not(Box::new(if xs.len() == 1 { xs[0].clone() } else { GNode::And(xs) })),
                GroupType::Neither => GNode::Not(Box::new(GNode::Or(xs))),
                _ => GNode::And(xs),
            }
        }
    }
}

fn kernel_edges(k: &Relationship, out: &mut Vec<GEdge>) {
    let src = node(&k.source);
    let tgt = k.target.as_ref().map_or(GNode::Leaf("none".into()), node);
    out.push(GEdge { source: src.clone(), target: tgt, label: k.label.clone(), negated: k.negated });
    for (key, v) in &k.properties {
        match v {
            PropValue::Kernel(r) => {
                kernel_edges(r, out);
                out.push(GEdge {
                    source: src.clone(),
                    target: GNode::Leaf(r.label.clone()),
                    label: key.clone(),
                    negated: false,
                });
            }
            PropValue::Entity(e) => {
                out.push(GEdge { source: src.clone(), target: node(e), label: key.clone(), negated: false })
            }
            PropValue::Text(t) => out.push(GEdge {
                source: src.clone(),
                target: GNode::Leaf(t.clone()),
                label: key.clone(),
                negated: false,
            }),
        }
    }
}

/// Edges of a kernel keeping logical connectives in the nodes.
pub fn logical_edges(k: &Relationship) -> Vec<GEdge> {
    let mut out = Vec::new();
    kernel_edges(k, &mut out);
    out
}

/// Edges with every group flattened into its member names; negation of groups is lost.
pub fn simple_edges(k: &Relationship) -> Vec<GEdge> {
    let mut out = Vec::new();
    for e in logical_edges(k) {
        for s in e.source.leaves() {
            for t in e.target.leaves() {
                out.push(GEdge {
                    source: GNode::Leaf(s.clone()),
                    target: GNode::Leaf(t),
                    label: e.label.clone(),
                    negated: e.negated,
                });
            }
        }
    }
    out
}

/// `d|ᴺ = d / (d + 1)`.
pub fn normalise(d: f64) -> f64 {
    d / (d + 1.0)
}

/// `d|ᴺˢ = 1 − d|ᴺ`.
pub fn as_similarity(d: f64) -> f64 {
    1.0 - normalise(d)
}

fn best<T>(xs: &[T], f: impl Fn(&T) -> f64) -> f64 {
    xs.iter().map(f).fold(f64::INFINITY, f64::min)
}

fn avg(xs: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.collect();
    if v.is_empty() {
        1.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

/// Asymmetric node distance that follows the connectives of `u` and `v`.
pub fn delta_nu(u: &GNode, v: &GNode, nu: &impl Fn(&str, &str) -> f64) -> f64 {
    use GNode::*;
    match (u, v) {
        (Leaf(a), Leaf(b)) => 1.0 - nu(a, b),
        (Not(x), Not(y)) => delta_nu(x, y, nu),
        (And(xs), b) if b.is_leaf() => best(xs, |x| delta_nu(x, b, nu)),
        (Not(x), b) if b.is_leaf() => 1.0 - delta_nu(x, b, nu),
        (a, Not(y)) if a.is_leaf() => 1.0 - delta_nu(a, y, nu),
        (a, Or(ys)) if a.is_leaf() => best(ys, |y| delta_nu(a, y, nu)),
        (And(xs), And(ys)) => {
            let m: Vec<f64> = xs.iter().map(|x| best(ys, |y| delta_nu(x, y, nu))).collect();
            if m.len() == xs.len() {
                avg(m.into_iter())
            } else {
                1.0
            }
        }
        (And(xs), Or(ys)) => avg(xs.iter().map(|x| best(ys, |y| delta_nu(x, y, nu)))),
        (Or(xs), Or(ys)) => avg(ys.iter().map(|y| best(xs, |x| delta_nu(x, y, nu)))),
        _ => 1.0,
    }
}

/// Node similarity for either graph flavour.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphMode {
    Simple,
    Logical,
}

fn node_sim(mode: GraphMode, a: &GNode, b: &GNode) -> f64 {
    match mode {
        GraphMode::Simple => token_overlap(&a.leaves().join(" "), &b.leaves().join(" ")),
        GraphMode::Logical => as_similarity(delta_nu(a, b, &token_overlap)),
    }
}

/// `1 − ν(s,s')·ν(t,t')·ε(λ,λ')`, or 1 when the negations differ.
pub fn edge_distance(mode: GraphMode, e: &GEdge, f: &GEdge) -> f64 {
    if e.negated != f.negated {
        return 1.0;
    }
    1.0 - node_sim(mode, &e.source, &f.source)
        * node_sim(mode, &e.target, &f.target)
        * token_overlap(&e.label, &f.label)
}

/// Best-match similarity of `a` against `b`, damped by the edges of `b` left unmatched.
pub fn graph_alignment(a: &[GEdge], b: &[GEdge], mode: GraphMode) -> f64 {
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() { 1.0 } else { 0.0 };
    }
    let mut used = vec![false; b.len()];
    let mut total = 0.0;
    for e in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .map(|(j, f)| (j, edge_distance(mode, e, f)))
            .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        used[j] = true;
        total += d;
    }
    let unmatched = used.iter().filter(|u| !**u).count() as f64;
    (1.0 - total / a.len() as f64) * as_similarity(unmatched)
}
