//! Logical-function rewriting: prepositional properties become SPACE, TIME,
//! AIM_OBJECTIVE, ... annotations; `nmod` sub-kernels become SPECIFICATIONs.

use serde::Serialize;

use crate::apriori::{is_position_key, Entity, GroupType, PropValue, Props, SetOfSingletons, Singleton};
use crate::kb::{AttachTo, KernelContext, KnowledgeBase, LogicalRewriteRule, NodeContext};
use crate::kernel::Relationship;

pub const SPECIFICATION: &str = "SPECIFICATION";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogicalAnnotation {
    pub construct_name: String,
    pub node: Entity,
    pub type_property: String,
}

fn kernel_context(k: &Relationship) -> KernelContext {
    let verb = k.label.rsplit(' ').next().unwrap_or(&k.label);
    let verb = if k.label.starts_with("to ") { k.label.trim_start_matches("to ") } else { verb };
    KernelContext { verb: Some(verb.to_string()) }
}

fn node_context(s: &Singleton, kb: &KnowledgeBase) -> NodeContext {
    NodeContext { prepositions: s.cases(), source: s.source.clone(), abstract_entity: kb.is_abstract(&s.named_entity) }
}

fn consumed(rule: &LogicalRewriteRule, key: &str, value: &PropValue) -> bool {
    is_position_key(key) && matches!(value, PropValue::Text(w) if rule.prepositions.contains(&w.to_lowercase()))
}

fn matched<'k>(ctx: &KernelContext, s: &Singleton, kb: &'k KnowledgeBase) -> Option<&'k LogicalRewriteRule> {
    if s.cases().is_empty() {
        return None;
    }
    kb.match_logical_rule(ctx, &node_context(s, kb))
}

fn key_for(rule: &LogicalRewriteRule, kb: &KnowledgeBase) -> String {
    match kb.function_for(rule) {
        Some(f) if !f.argument.is_empty() => f.argument.clone(),
        _ => rule.construct_name.to_uppercase(),
    }
}

fn attach_kind(rule: &LogicalRewriteRule, kb: &KnowledgeBase) -> AttachTo {
    kb.function_for(rule).map_or(AttachTo::Kernel, |f| f.attach_to)
}

/// `[type] + rest`, without the prepositions the rule consumed.
fn typed(s: &Singleton, rule: &LogicalRewriteRule) -> Singleton {
    let mut out = s.clone();
    out.properties = vec![("type".into(), PropValue::Text(rule.construct_property.clone()))];
    out.properties.extend(s.properties.iter().filter(|(k, v)| !consumed(rule, k, v)).cloned());
    out
}

/// Annotation for a single node, if a kernel-attached rule matches.
pub fn rewrite_node_logically(ctx: &KernelContext, node: &Entity, kb: &KnowledgeBase) -> Option<LogicalAnnotation> {
    match node {
        Entity::Single(s) => {
            let rule = matched(ctx, s, kb)?;
            if attach_kind(rule, kb) != AttachTo::Kernel {
                return None;
            }
            Some(LogicalAnnotation {
                construct_name: key_for(rule, kb),
                node: Entity::Single(typed(s, rule)),
                type_property: rule.construct_property.clone(),
            })
        }
        Entity::Set(set) => {
            let mut set = set.clone();
            let (name, prop) = annotate_in_place(ctx, &mut set.entities, kb)?;
            Some(LogicalAnnotation { construct_name: name, node: Entity::Set(set), type_property: prop })
        }
    }
}

/// Replaces the first matching case property inside a group with its `type`.
fn annotate_in_place(ctx: &KernelContext, xs: &mut [Entity], kb: &KnowledgeBase) -> Option<(String, String)> {
    for x in xs {
        match x {
            Entity::Single(s) => {
                let Some(rule) = matched(ctx, s, kb).filter(|r| attach_kind(r, kb) == AttachTo::Kernel) else {
                    continue;
                };
                let mut done = false;
                let mut props = Props::new();
                for (k, v) in s.properties.drain(..) {
                    if consumed(rule, &k, &v) {
                        if !done {
                            props.push(("type".into(), PropValue::Text(rule.construct_property.clone())));
                            done = true;
                        }
                    } else {
                        props.push((k, v));
                    }
                }
                s.properties = props;
                return Some((key_for(rule, kb), rule.construct_property.clone()));
            }
            Entity::Set(inner) => {
                if let Some(r) = annotate_in_place(ctx, &mut inner.entities, kb) {
                    return Some(r);
                }
            }
        }
    }
    None
}

/// `nmod(src, tgt)`: a specification folds one side into the other as `extra`;
/// a kernel-attached function annotates the target.
fn rewrite_nmod(ctx: &KernelContext, r: &Relationship, kb: &KnowledgeBase) -> Option<(String, Entity)> {
    let tgt = r.target.as_ref()?.as_single()?;
    let src = r.source.as_single()?;
    // Possessives carry the case on the possessor, which is the source.
    let cased = if tgt.cases().is_empty() { src } else { tgt };
    let rule = matched(ctx, cased, kb)?;
    match attach_kind(rule, kb) {
        AttachTo::Singleton => {
            let inverse = rule.construct_property == "inverse";
            let (head, extra) = if inverse { (tgt, src) } else { (src, tgt) };
            let mut node = head.clone();
            node.properties.push(("extra".into(), PropValue::Entity(Entity::Single(extra.clone()))));
            Some((key_for(rule, kb), Entity::Single(node)))
        }
        AttachTo::Kernel => Some((key_for(rule, kb), Entity::Single(typed(cased, rule)))),
    }
}

/// Rewrites every property of `k` and of its nested SENTENCE kernels.
pub fn rewrite_properties_logically(k: &Relationship, kb: &KnowledgeBase) -> Relationship {
    let mut k = k.clone();
    let ctx = kernel_context(&k);
    let mut out = Props::new();
    for (key, value) in std::mem::take(&mut k.properties) {
        match value {
            PropValue::Kernel(r) if key == "SENTENCE" => {
                out.push((key, PropValue::Kernel(Box::new(rewrite_properties_logically(&r, kb)))));
            }
            PropValue::Kernel(r) if key == "nmod" || key == "nmod_poss" => match rewrite_nmod(&ctx, &r, kb) {
                Some((nk, e)) => out.push((nk, PropValue::Entity(e))),
                None => out.push((key, PropValue::Kernel(r))),
            },
            PropValue::Entity(e) if key != "extra" => match rewrite_node_logically(&ctx, &e, kb) {
                Some(a) => {
                    let wrap = match key.as_str() {
                        "AND" => Some(GroupType::And),
                        "OR" => Some(GroupType::Or),
                        "NEITHER" => Some(GroupType::Neither),
                        _ => None,
                    };
                    let node = match wrap {
                        Some(group_type) => Entity::Set(SetOfSingletons {
                            id: a.node.id(),
                            confidence: a.node.confidence(),
                            entities: vec![a.node],
                            group_type,
                        }),
                        None => a.node,
                    };
                    out.push((a.construct_name, PropValue::Entity(node)));
                }
                None => out.push((key, PropValue::Entity(e))),
            },
            v => out.push((key, v)),
        }
    }
    k.properties = out;
    k
}

/// Moves SPECIFICATION properties whose head is the kernel's source or target
/// into that argument.
pub fn apply_specifications(k: &Relationship) -> Relationship {
    let mut k = k.clone();
    k.walk_mut(&mut |r: &mut Relationship| {
        let mut keep = Props::new();
        for (key, v) in std::mem::take(&mut r.properties) {
            if key == SPECIFICATION {
                if let PropValue::Entity(e) = &v {
                    if e.id() == r.source.id() {
                        r.source = e.clone();
                        continue;
                    }
                    if r.target.as_ref().is_some_and(|t| t.id() == e.id()) {
                        r.target = Some(e.clone());
                        continue;
                    }
                }
            }
            keep.push((key, v));
        }
        r.properties = keep;
    });
    k
}
