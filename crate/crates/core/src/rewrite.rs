//! Intermediate graph: one clause per verb (or copular predicate, or verbless
//! root) with its acting and acted-upon entities, passive voice normalised,
//! plus the depth-first visit order used to build nested kernels.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::apriori::{AprioriGraph, Entity, Link};
use crate::kb::KnowledgeBase;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("intermediate graph has a cycle through node {0}")]
pub struct CyclicGraphError(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    /// Clause node to its acting entity.
    Action,
    /// Clause node to its acted-upon entity.
    Actioned,
    Relation,
    /// Owning clause to an embedded clause.
    Clause,
    Mark,
    InheritEdge,
    Dep,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct INode {
    pub id: u32,
    pub name: String,
    /// Set on clause nodes: the verb acts through `action`/`actioned` edges.
    pub action: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IEdge {
    pub source: u32,
    pub target: u32,
    pub label: String,
    pub kind: EdgeKind,
    /// Clause that collects this edge as a property.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub owner: Option<u32>,
    /// Entity an embedded clause hangs from.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anchor: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Clause {
    pub id: u32,
    pub label: String,
    pub source: Option<u32>,
    pub target: Option<u32>,
    pub negated: bool,
    /// Target is an adjectival complement with no subject of its own.
    pub adjective_complement: bool,
    /// Verbless root: `be(root, ?)`.
    pub default_be: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntermediateGraph {
    pub nodes: Vec<INode>,
    pub edges: Vec<IEdge>,
    pub entities: BTreeMap<u32, Entity>,
    pub clauses: BTreeMap<u32, Clause>,
    /// Clause containing the sentence root.
    pub root: u32,
}

/// Node ids, deepest first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VisitOrder {
    pub ids: Vec<u32>,
}

const SUBJECTS: [&str; 3] = ["nsubj", "nsubj:pass", "csubj"];
const CLAUSE_LINKS: [&str; 6] = ["xcomp", "ccomp", "advcl", "acl", "acl:relcl", "conj"];

impl IntermediateGraph {
    pub fn node(&self, id: u32) -> Option<&INode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn owned_by(&self, clause: u32) -> impl Iterator<Item = &IEdge> {
        self.edges.iter().filter(move |e| e.owner == Some(clause))
    }
}

fn strip_cases(e: &mut Entity) {
    for s in e.singletons_mut() {
        s.properties.retain(|(k, _)| !crate::apriori::is_position_key(k));
    }
}

/// Verb edges with normalised voice, relation edges assigned to their clause.
pub fn build_intermediate(a: &AprioriGraph, kb: &KnowledgeBase) -> IntermediateGraph {
    let mut a = a.clone();
    let tokens: Vec<u32> = a.tokens.keys().copied().collect();
    let is_clause_token = |t: u32, a: &AprioriGraph| {
        let tok = a.token(t);
        a.own.contains_key(&t) && (tok.is_verb() || tok.copular)
    };
    let mut clause_of_token: BTreeMap<u32, u32> = BTreeMap::new();
    for &t in &tokens {
        if is_clause_token(t, &a) {
            let id = if a.token(t).copular { a.fresh_id() } else { t };
            clause_of_token.insert(t, id);
        }
    }
    let root = a.root;
    clause_of_token.entry(root).or_insert_with(|| a.fresh_id());

    let mut used: BTreeSet<usize> = BTreeSet::new();
    let find = |a: &AprioriGraph, used: &BTreeSet<usize>, head: u32, labels: &[&str]| -> Option<usize> {
        a.links
            .iter()
            .enumerate()
            .find(|(i, l)| l.head == head && labels.contains(&l.label.as_str()) && !used.contains(i))
            .map(|(i, _)| i)
    };
    let mut clauses = BTreeMap::new();
    for (&t, &cid) in &clause_of_token {
        let tok = a.token(t).clone();
        let clause = if tok.copular {
            let source = find(&a, &used, t, &SUBJECTS).map(|i| {
                used.insert(i);
                a.links[i].target
            });
            Clause {
                id: cid,
                label: "be".into(),
                source,
                target: Some(a.refer[&t]),
                negated: false,
                adjective_complement: false,
                default_be: false,
            }
        } else if !tok.is_verb() {
            Clause {
                id: cid,
                label: "be".into(),
                source: Some(a.refer[&t]),
                target: None,
                negated: false,
                adjective_complement: false,
                default_be: true,
            }
        } else {
            let mut label = kb.lemma(&tok.node.lemma);
            if let Some(p) = &tok.particle {
                label = format!("{label} {p}");
            }
            if let Some(m) = tok.mark.as_deref().filter(|m| kb.prototypical_prepositions().iter().any(|p| p == m)) {
                label = format!("{m} {label}");
            }
            let subj = find(&a, &used, t, &SUBJECTS);
            let passive = tok.passive || subj.is_some_and(|i| a.links[i].label == "nsubj:pass");
            let obj = find(&a, &used, t, &["obj"]);
            let agent = if passive { find(&a, &used, t, &["obl:agent"]) } else { None };
            let (mut source, mut target) = if passive { (agent, subj) } else { (subj, obj) };
            if passive {
                if let Some(i) = obj {
                    used.insert(i);
                }
            }
            let mut adjective_complement = false;
            if target.is_none() {
                let adj = a.links.iter().enumerate().find(|(i, l)| {
                    l.head == t
                        && l.label == "xcomp"
                        && !used.contains(i)
                        && a.token(l.dep).is_adjective()
                        && !a.token(l.dep).copular
                });
                if let Some((i, l)) = adj {
                    adjective_complement = !a.links_from(l.dep).any(|x| SUBJECTS.contains(&x.label.as_str()));
                    target = Some(i);
                }
            }
            for i in [source, target].into_iter().flatten() {
                used.insert(i);
            }
            let entity_of = |i: Option<usize>, a: &mut AprioriGraph| {
                i.map(|i| {
                    let id = a.links[i].target;
                    if a.links[i].label == "obl:agent" {
                        let mut e = a.entities[&id].clone();
                        strip_cases(&mut e);
                        a.entities.insert(id, e);
                    }
                    id
                })
            };
            let (s, tg) = (entity_of(source.take(), &mut a), entity_of(target.take(), &mut a));
            Clause {
                id: cid,
                label,
                source: s,
                target: tg,
                negated: tok.negated,
                adjective_complement,
                default_be: false,
            }
        };
        clauses.insert(cid, clause);
    }

    let clause_of = |mut t: u32| -> u32 {
        loop {
            if let Some(c) = clause_of_token.get(&t) {
                return *c;
            }
            match &a.token(t).parent {
                Some((p, _)) => t = *p,
                None => return clause_of_token[&a.root],
            }
        }
    };

    let mut nodes: Vec<INode> =
        a.entities.iter().map(|(id, e)| INode { id: *id, name: e.leaf_names().join(" "), action: false }).collect();
    let mut edges = Vec::new();
    for c in clauses.values() {
        nodes.push(INode { id: c.id, name: c.label.clone(), action: true });
        if let Some(s) = c.source {
            edges.push(IEdge {
                source: c.id,
                target: s,
                label: c.label.clone(),
                kind: EdgeKind::Action,
                owner: None,
                anchor: None,
            });
        }
        if let Some(t) = c.target {
            edges.push(IEdge {
                source: c.id,
                target: t,
                label: c.label.clone(),
                kind: EdgeKind::Actioned,
                owner: None,
                anchor: None,
            });
        }
    }
    for (i, l) in a.links.iter().enumerate() {
        if used.contains(&i) {
            continue;
        }
        let owner = clause_of(l.head);
        let Link { head, dep, target, label } = l;
        if CLAUSE_LINKS.contains(&label.as_str()) && clause_of_token.contains_key(dep) {
            let sub = clause_of_token[dep];
            if sub != owner {
                edges.push(IEdge {
                    source: owner,
                    target: sub,
                    label: label.clone(),
                    kind: EdgeKind::Clause,
                    owner: Some(owner),
                    anchor: Some(a.own[head]),
                });
                continue;
            }
        }
        let kind = if label == "dep" { EdgeKind::Dep } else { EdgeKind::Relation };
        edges.push(IEdge {
            source: a.own[head],
            target: *target,
            label: label.clone(),
            kind,
            owner: Some(owner),
            anchor: None,
        });
    }
    nodes.sort_by_key(|n| n.id);
    let root = clause_of_token[&a.root];
    IntermediateGraph { nodes, edges, entities: a.entities, clauses, root }
}

/// Depth-first post-order (children before parents), then drops inherited,
/// label-folded and empty nodes.
pub fn topo_sort_filter(g: &IntermediateGraph) -> Result<VisitOrder, CyclicGraphError> {
    let ids: Vec<u32> = g.nodes.iter().map(|n| n.id).collect();
    let mut children: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for e in &g.edges {
        children.entry(e.source).or_default().push(e.target);
    }
    let mut state: BTreeMap<u32, u8> = ids.iter().map(|i| (*i, 0)).collect();
    let mut order = Vec::new();
    for &start in &ids {
        if state[&start] != 0 {
            continue;
        }
        state.insert(start, 1);
        let mut stack = vec![(start, 0usize)];
        while let Some((v, i)) = stack.pop() {
            let kids = children.get(&v).map(Vec::as_slice).unwrap_or(&[]);
            if i < kids.len() {
                stack.push((v, i + 1));
                let w = kids[i];
                match state.get(&w).copied().unwrap_or(2) {
                    0 => {
                        state.insert(w, 1);
                        stack.push((w, 0));
                    }
                    1 => return Err(CyclicGraphError(w)),
                    _ => {}
                }
            } else {
                state.insert(v, 2);
                order.push(v);
            }
        }
    }
    let dropped: BTreeSet<u32> = g
        .edges
        .iter()
        .filter(|e| matches!(e.kind, EdgeKind::InheritEdge | EdgeKind::Mark))
        .map(|e| e.target)
        .chain(g.nodes.iter().filter(|n| n.name.trim().is_empty()).map(|n| n.id))
        .collect();
    order.retain(|i| !dropped.contains(i));
    Ok(VisitOrder { ids: order })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(id: u32, name: &str) -> INode {
        INode { id, name: name.into(), action: false }
    }

    fn edge(s: u32, t: u32, label: &str, kind: EdgeKind) -> IEdge {
        IEdge { source: s, target: t, label: label.into(), kind, owner: None, anchor: None }
    }

    fn graph(nodes: Vec<INode>, edges: Vec<IEdge>) -> IntermediateGraph {
        IntermediateGraph { nodes, edges, entities: BTreeMap::new(), clauses: BTreeMap::new(), root: 0 }
    }

    /// "become able to answer more questions" after graph rewriting.
    pub(crate) fn become_able() -> IntermediateGraph {
        let names = [
            (1, "?"),
            (6, "answer"),
            (7, "become"),
            (8, ""),
            (9, "more"),
            (10, "able"),
            (11, "become"),
            (12, ""),
            (5, "questions"),
            (2, "to"),
            (3, "able"),
        ];
        graph(
            names.iter().map(|(i, n)| node(*i, n)).collect(),
            vec![
                edge(1, 3, "inherit_edge", EdgeKind::InheritEdge),
                edge(6, 2, "mark", EdgeKind::Mark),
                edge(8, 5, "dep", EdgeKind::Dep),
                edge(5, 9, "amod", EdgeKind::Relation),
                edge(10, 6, "xcomp", EdgeKind::Clause),
                edge(10, 8, "obj", EdgeKind::Relation),
                edge(11, 10, "xcomp", EdgeKind::Clause),
            ],
        )
    }

    #[test]
    fn become_able_visit_order() {
        assert_eq!(topo_sort_filter(&become_able()).unwrap().ids, vec![1, 6, 7, 9, 5, 10, 11]);
    }

    #[test]
    fn single_node() {
        assert_eq!(topo_sort_filter(&graph(vec![node(4, "work")], vec![])).unwrap().ids, vec![4]);
    }

    #[test]
    fn disconnected_kernels_keep_children_first() {
        let g = graph(
            vec![node(1, "a"), node(2, "b"), node(3, "c"), node(4, "d"), node(5, "e")],
            vec![
                edge(1, 2, "x", EdgeKind::Relation),
                edge(2, 3, "x", EdgeKind::Relation),
                edge(4, 5, "x", EdgeKind::Relation),
            ],
        );
        let order = topo_sort_filter(&g).unwrap().ids;
        assert_eq!(order, vec![3, 2, 1, 5, 4]);
        for e in &g.edges {
            let pos = |i| order.iter().position(|x| *x == i).unwrap();
            assert!(pos(e.target) < pos(e.source));
        }
    }

    #[test]
    fn cycle_detected() {
        let g = graph(
            vec![node(1, "a"), node(2, "b")],
            vec![edge(1, 2, "x", EdgeKind::Relation), edge(2, 1, "x", EdgeKind::Relation)],
        );
        assert!(topo_sort_filter(&g).is_err());
    }
}
