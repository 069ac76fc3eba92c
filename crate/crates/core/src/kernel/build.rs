use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use super::Relationship;
use crate::apriori::{Entity, GroupType, PropValue, Props, Singleton};
use crate::kb::KnowledgeBase;
use crate::logifun::{apply_specifications, rewrite_properties_logically};
use crate::rewrite::{topo_sort_filter, CyclicGraphError, EdgeKind, IEdge, IntermediateGraph, VisitOrder};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("no kernel can be built around node {0}")]
    NoKernelConstructible(u32),
    #[error(transparent)]
    Cyclic(#[from] CyclicGraphError),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct KernelEdges {
    pub edges: Vec<IEdge>,
    /// Clause or entity nodes to be built as sub-sentences.
    pub true_targets: BTreeSet<u32>,
    pub preposition_labels: BTreeSet<String>,
}

/// Prototypical preposition opening a label, e.g. `to` in `to steal`.
pub fn prototypical_prefix<'k>(label: &str, kb: &'k KnowledgeBase) -> Option<&'k str> {
    kb.prototypical_prepositions()
        .iter()
        .find(|p| label.len() > p.len() + 1 && label.starts_with(p.as_str()) && label[p.len()..].starts_with(' '))
        .map(String::as_str)
}

/// Drops `dep` edges shadowed by a more precise label and collects the
/// sub-sentence roots introduced by prototypical prepositions.
pub fn get_kernel_edges(edges: &[IEdge], kb: &KnowledgeBase) -> KernelEdges {
    let mut out = KernelEdges::default();
    for e in edges {
        let shadowed = e.kind == EdgeKind::Dep
            && edges.iter().any(|o| o.kind != EdgeKind::Dep && o.source == e.source && o.target == e.target);
        if shadowed {
            continue;
        }
        if prototypical_prefix(&e.label, kb).is_some() {
            out.preposition_labels.insert(e.label.clone());
            let promoted = match e.kind {
                EdgeKind::Action | EdgeKind::Actioned => e.source,
                _ => e.target,
            };
            out.true_targets.insert(promoted);
        }
        out.edges.push(e.clone());
    }
    out
}

/// Clause nodes in visit order; falls back to a lone node or to action nodes.
pub fn get_topological_root_ids(g: &IntermediateGraph, order: &VisitOrder, true_targets: &BTreeSet<u32>) -> Vec<u32> {
    let in_sets: BTreeSet<u32> = g
        .entities
        .values()
        .filter_map(|e| match e {
            Entity::Set(s) => Some(s.entities.iter().map(Entity::id).collect::<Vec<_>>()),
            _ => None,
        })
        .flatten()
        .collect();
    let mut roots: Vec<u32> = Vec::new();
    for id in &order.ids {
        let candidate = g.clauses.contains_key(id) || true_targets.contains(id);
        if candidate && !in_sets.contains(id) && !roots.contains(id) {
            roots.push(*id);
        }
    }
    if roots.is_empty() {
        if let [only] = order.ids.as_slice() {
            roots.push(*only);
        } else {
            roots.extend(g.nodes.iter().filter(|n| n.action).map(|n| n.id));
        }
    }
    roots
}

fn has_case(e: &Entity) -> bool {
    match e {
        Entity::Single(s) => !s.cases().is_empty(),
        Entity::Set(s) => s.group_type == GroupType::Not && s.entities.iter().any(has_case),
    }
}

/// Splits a coordination holding prepositional members: the first plain member
/// stays an argument, the rest become properties under the group type.
fn split_cased(e: Entity, props: &mut Props) -> Option<Entity> {
    match e {
        Entity::Set(set)
            if matches!(set.group_type, GroupType::And | GroupType::Or) && set.entities.iter().any(has_case) =>
        {
            let key = set.group_type.name().to_string();
            let mut kept = None;
            for m in set.entities {
                if kept.is_none() && !has_case(&m) {
                    kept = Some(m);
                } else {
                    props.push((key.clone(), PropValue::Entity(m)));
                }
            }
            kept
        }
        e if has_case(&e) => {
            props.push((e.type_name().to_string(), PropValue::Entity(e)));
            None
        }
        e => Some(e),
    }
}

fn verb_lemma(label: &str) -> &str {
    label.rsplit(' ').next().unwrap_or(label)
}

/// The verb edge of `root` with existentials for missing arguments.
pub fn assign_kernel(
    g: &IntermediateGraph,
    root: u32,
    kb: &KnowledgeBase,
    fresh: &mut u32,
) -> Result<Relationship, KernelError> {
    let mut next = || {
        *fresh += 1;
        *fresh
    };
    let Some(c) = g.clauses.get(&root) else {
        let e = g.entities.get(&root).ok_or(KernelError::NoKernelConstructible(root))?;
        return Ok(Relationship {
            label: "be".into(),
            source: e.clone(),
            target: Some(Entity::Single(Singleton::default_existential(next()))),
            negated: false,
            properties: Props::new(),
        });
    };
    let mut props = Props::new();
    let mut source = c.source.and_then(|i| split_cased(g.entities[&i].clone(), &mut props));
    let mut target = c.target.and_then(|i| split_cased(g.entities[&i].clone(), &mut props));
    if c.adjective_complement {
        if let Some(adj) = target.take() {
            let src = source.get_or_insert_with(|| Entity::Single(Singleton::existential(next())));
            for s in src.singletons_mut() {
                s.properties.push(("cop".into(), PropValue::Entity(adj.clone())));
            }
        }
    }
    if kb.transitive(verb_lemma(&c.label)) == Some(false) {
        if let Some(t) = target.take() {
            props.push((t.type_name().to_string(), PropValue::Entity(t)));
        }
    }
    let source = source.unwrap_or_else(|| Entity::Single(Singleton::existential(next())));
    if target.is_none() && c.label == "be" {
        target = Some(Entity::Single(Singleton::default_existential(next())));
    }
    Ok(Relationship { label: c.label.clone(), source, target, negated: c.negated, properties: props })
}

/// Entity-valued properties keyed by type; MULTIINDIRECT members are listed one by one.
fn push_entity(props: &mut Props, e: &Entity) {
    match e {
        Entity::Set(s) if s.group_type == GroupType::MultiIndirect => {
            s.entities.iter().for_each(|m| push_entity(props, m))
        }
        _ => props.push((e.type_name().to_string(), PropValue::Entity(e.clone()))),
    }
}

fn add_to_props(
    k: &mut Relationship,
    g: &IntermediateGraph,
    clause: u32,
    edges: &[IEdge],
    built: &mut BTreeMap<u32, Relationship>,
    acl: &mut Vec<(u32, Entity)>,
) {
    for e in edges.iter().filter(|e| e.owner == Some(clause)) {
        match e.kind {
            EdgeKind::Clause => {
                let Some(sub) = built.remove(&e.target) else { continue };
                if e.label == "acl:relcl" {
                    let anchor = g.entities[&e.anchor.expect("clause edges carry an anchor")].clone();
                    acl.push((sub.source.id(), anchor.clone()));
                    let mut holder = Singleton::new(e.target, sub.label.clone(), "KERNEL");
                    holder.kernel = Some(Box::new(sub.clone()));
                    k.properties.push(("SENTENCE".into(), PropValue::Kernel(Box::new(sub))));
                    let rel = Relationship {
                        label: "acl_relcl".into(),
                        source: anchor,
                        target: Some(Entity::Single(holder)),
                        negated: false,
                        properties: Props::new(),
                    };
                    k.properties.push(("acl_relcl".into(), PropValue::Kernel(Box::new(rel))));
                } else {
                    k.properties.push(("SENTENCE".into(), PropValue::Kernel(Box::new(sub))));
                }
            }
            EdgeKind::Relation | EdgeKind::Dep => {
                let (head, dep) = (&g.entities[&e.source], &g.entities[&e.target]);
                if e.label == "nmod" || e.label == "nmod:poss" {
                    let key = e.label.replace(':', "_");
                    let (source, target) = if e.label == "nmod:poss" { (dep, head) } else { (head, dep) };
                    let rel = Relationship {
                        label: key.clone(),
                        source: source.clone(),
                        target: Some(target.clone()),
                        negated: false,
                        properties: Props::new(),
                    };
                    k.properties.push((key, PropValue::Kernel(Box::new(rel))));
                } else {
                    push_entity(&mut k.properties, dep);
                }
            }
            _ => {}
        }
    }
}

fn swap_adjective_target(r: &mut Relationship) {
    let adjective = r.target.as_ref().and_then(Entity::as_single).is_some_and(|t| t.type_ == "ADJECTIVE");
    let pronouns: Vec<usize> = r
        .properties
        .iter()
        .enumerate()
        .filter(|(_, (_, v))| v.as_entity().and_then(Entity::as_single).is_some_and(|s| s.type_ == "PRONOUN"))
        .map(|(i, _)| i)
        .collect();
    if adjective && r.source.is_existential() && pronouns.len() == 1 {
        let i = pronouns[0];
        let PropValue::Entity(p) = r.properties[i].1.clone() else { return };
        let adj = r.target.replace(p).expect("checked");
        r.properties[i] = ("JJ".into(), PropValue::Entity(adj));
    }
}

fn remove_duplicates(r: &mut Relationship) {
    let ids: Vec<u32> = std::iter::once(r.source.id()).chain(r.target.as_ref().map(Entity::id)).collect();
    let mut seen: Vec<(String, PropValue)> = Vec::new();
    r.properties.retain(|(k, v)| {
        if v.as_entity().is_some_and(|e| ids.contains(&e.id())) || seen.contains(&(k.clone(), v.clone())) {
            return false;
        }
        seen.push((k.clone(), v.clone()));
        true
    });
}

/// Relative-pronoun replacement, adjective/pronoun swap, duplicate removal.
pub fn post_process(k: &Relationship, acl: &[(u32, Entity)]) -> Relationship {
    let mut k = k.clone();
    k.walk_mut(&mut |r: &mut Relationship| {
        if let Some((_, e)) = acl.iter().find(|(id, _)| *id == r.source.id()) {
            r.source = e.clone();
        }
        r.properties.retain(|(key, _)| key != "acl_relcl");
        swap_adjective_target(r);
        remove_duplicates(r);
    });
    k
}

fn number(r: &mut Relationship, n: &mut u32) {
    for (k, v) in r.properties.iter_mut() {
        if let (true, PropValue::Kernel(inner)) = (k == "SENTENCE", v) {
            number(inner, n);
        }
    }
    let mut name = |e: &mut Entity| {
        if let Some(s) = e.as_single_mut().filter(|s| s.is_existential()) {
            *n += 1;
            s.named_entity = format!("?{n}");
        }
    };
    name(&mut r.source);
    if let Some(t) = r.target.as_mut() {
        name(t);
    }
}

/// Phrasal-verb adverb merge and existential numbering.
pub fn finalize(k: &Relationship, kb: &KnowledgeBase) -> Relationship {
    let mut k = k.clone();
    k.walk_mut(&mut |r: &mut Relationship| {
        let mut label = r.label.clone();
        r.properties.retain(|(_, v)| match v.as_entity().and_then(Entity::as_single) {
            Some(s) if s.type_ == "ADVERB" && kb.is_phrasal(verb_lemma(&label), &s.named_entity.to_lowercase()) => {
                label = format!("{label} {}", s.named_entity.to_lowercase());
                false
            }
            _ => true,
        });
        r.label = label;
    });
    let mut n = 0;
    number(&mut k, &mut n);
    k
}

/// Every stage of kernel construction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelTrace {
    pub raw: Relationship,
    pub post: Relationship,
    pub logical: Relationship,
    pub specified: Relationship,
    #[serde(rename = "final")]
    pub final_: Relationship,
}

impl KernelTrace {
    pub const STAGES: [&'static str; 5] = ["raw", "post", "logical", "specified", "final"];

    pub fn stage(&self, name: &str) -> Option<&Relationship> {
        match name {
            "raw" => Some(&self.raw),
            "post" => Some(&self.post),
            "logical" => Some(&self.logical),
            "specified" => Some(&self.specified),
            "final" => Some(&self.final_),
            _ => None,
        }
    }
}

/// Builds clause kernels deepest first, nesting each into its owner.
pub fn construct_final_kernel(g: &IntermediateGraph, kb: &KnowledgeBase) -> Result<KernelTrace, KernelError> {
    let ke = get_kernel_edges(&g.edges, kb);
    let order = topo_sort_filter(g)?;
    let roots = get_topological_root_ids(g, &order, &ke.true_targets);
    let mut fresh = g.nodes.iter().map(|n| n.id).max().unwrap_or(0);
    let mut built: BTreeMap<u32, Relationship> = BTreeMap::new();
    let mut acl = Vec::new();
    for r in roots {
        let mut k = assign_kernel(g, r, kb, &mut fresh)?;
        add_to_props(&mut k, g, r, &ke.edges, &mut built, &mut acl);
        built.insert(r, k);
    }
    let mut top = built.remove(&g.root).ok_or(KernelError::NoKernelConstructible(g.root))?;
    for (_, k) in built {
        top.properties.push(("SENTENCE".into(), PropValue::Kernel(Box::new(k))));
    }
    let post = post_process(&top, &acl);
    let logical = rewrite_properties_logically(&post, kb);
    let specified = apply_specifications(&logical);
    let final_ = finalize(&specified, kb);
    Ok(KernelTrace { raw: top, post, logical, specified, final_ })
}
