use thiserror::Error;

use super::{Formula, Proposition, Quantity, Term, TermProps};
use crate::apriori::{is_position_key, Entity, GroupType, PropValue, Singleton};
use crate::kb::KnowledgeBase;
use crate::kernel::Relationship;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FolError {
    #[error("group {0} has no logical reading")]
    UnboundStructure(String),
}

const UNIVERSAL: [&str; 4] = ["all", "every", "each", "any"];

fn text_term(t: &str, kb: &KnowledgeBase) -> Term {
    Term::func(kb.lemma_phrase(t))
}

fn value_term(v: &PropValue, kb: &KnowledgeBase) -> Option<Term> {
    match v {
        PropValue::Text(t) => Some(text_term(t, kb)),
        PropValue::Entity(Entity::Single(s)) => Some(term(s, kb)),
        _ => None,
    }
}

/// One Singleton as one term; adjectival material becomes `JJ`.
pub fn term(s: &Singleton, kb: &KnowledgeBase) -> Term {
    let mut t = if s.is_existential() { Term::var(&s.named_entity) } else { text_term(&s.named_entity, kb) };
    for (k, v) in &s.properties {
        match k.as_str() {
            "extra" => {
                t.specification = match v {
                    PropValue::Text(x) => Some(kb.lemma_phrase(x)),
                    PropValue::Entity(e) => Some(kb.lemma_phrase(&e.leaf_names().join(" "))),
                    PropValue::Kernel(_) => None,
                }
            }
            "cop" | "amod" | "JJ" => {
                if let Some(x) = value_term(v, kb) {
                    t.properties.entry("JJ".into()).or_default().push(x);
                }
            }
            "det" => {
                if matches!(v, PropValue::Text(d) if UNIVERSAL.contains(&d.to_lowercase().as_str())) {
                    t.quantity = Quantity::All;
                }
            }
            "type" => {}
            k if is_position_key(k) => {}
            _ => {
                if let Some(x) = value_term(v, kb) {
                    t.properties.entry(k.clone()).or_default().push(x);
                }
            }
        }
    }
    for vs in t.properties.values_mut() {
        vs.dedup();
    }
    t
}

fn merge_props(a: &mut Singleton, b: &Singleton) {
    for p in &b.properties {
        if !a.properties.contains(p) {
            a.properties.push(p.clone());
        }
    }
}

/// Embedded clauses with an unexpressed subject share the enclosing subject.
fn unify_control(k: &mut Relationship) {
    for (key, v) in k.properties.iter_mut() {
        let PropValue::Kernel(inner) = v else { continue };
        if key != "SENTENCE" {
            continue;
        }
        unify_control(inner);
        let inner_var = inner.source.as_single().is_some_and(|s| s.is_existential() && !s.is_default());
        if !inner_var {
            continue;
        }
        match &mut k.source {
            Entity::Single(outer) if outer.is_existential() && !outer.is_default() => {
                let Entity::Single(inn) = &mut inner.source else { unreachable!() };
                merge_props(inn, outer);
                let snapshot = inn.clone();
                merge_props(outer, &snapshot);
                outer.named_entity = snapshot.named_entity.clone();
                outer.properties = snapshot.properties;
            }
            outer if !outer.is_existential() => inner.source = outer.clone(),
            _ => {}
        }
    }
}

fn expand_args(
    e: &Entity,
    kb: &KnowledgeBase,
    leaf: &mut dyn FnMut(Term) -> Result<Formula, FolError>,
) -> Result<Formula, FolError> {
    match e {
        Entity::Single(s) => leaf(term(s, kb)),
        Entity::Set(set) => {
            let parts = || -> Result<Vec<Formula>, FolError> {
                set.entities.iter().map(|m| expand_args(m, kb, &mut *leaf)).collect()
            };
            let mut parts = parts;
            match set.group_type {
                GroupType::And => Ok(Formula::and(parts()?)),
                GroupType::Or => Ok(Formula::or(parts()?)),
                GroupType::Neither => Ok(Formula::not(Formula::or(parts()?))),
                GroupType::Not => Ok(Formula::not(Formula::and(parts()?))),
                g => Err(FolError::UnboundStructure(g.name().into())),
            }
        }
    }
}

fn expand_props(p: &Proposition, pending: &[(String, Entity)], kb: &KnowledgeBase) -> Result<Formula, FolError> {
    let Some(((key, e), rest)) = pending.split_first() else {
        return Ok(Formula::Atom(p.clone()));
    };
    let with = |x: &Entity| -> Result<Formula, FolError> {
        let mut pending = vec![(key.clone(), x.clone())];
        pending.extend_from_slice(rest);
        expand_props(p, &pending, kb)
    };
    match e {
        Entity::Single(s) => {
            let mut q = p.clone();
            q.properties.entry(key.clone()).or_default().push(term(s, kb));
            expand_props(&q, rest, kb)
        }
        Entity::Set(set) => {
            let parts = || set.entities.iter().map(with).collect::<Result<Vec<_>, _>>();
            match set.group_type {
                GroupType::And => Ok(Formula::and(parts()?)),
                GroupType::Or => Ok(Formula::or(parts()?)),
                GroupType::Neither => Ok(Formula::not(Formula::or(parts()?))),
                // The clause holds, but not under this property.
                GroupType::Not => {
                    Ok(Formula::And(vec![expand_props(p, rest, kb)?, Formula::not(Formula::and(parts()?))]))
                }
                g => Err(FolError::UnboundStructure(g.name().into())),
            }
        }
    }
}

fn kernel_formula(k: &Relationship, kb: &KnowledgeBase) -> Result<Formula, FolError> {
    let mut parts = Vec::new();
    let mut simple = TermProps::new();
    let mut pending = Vec::new();
    for (key, v) in &k.properties {
        match v {
            PropValue::Kernel(inner) if key == "SENTENCE" => parts.push(kernel_formula(inner, kb)?),
            PropValue::Kernel(inner) => {
                if let Some(Entity::Single(t)) = &inner.target {
                    simple.entry(key.clone()).or_default().push(term(t, kb));
                }
            }
            PropValue::Entity(Entity::Set(s)) if s.group_type == GroupType::MultiIndirect => {
                pending.extend(s.entities.iter().map(|m| (m.type_name().to_string(), m.clone())));
            }
            PropValue::Entity(e @ Entity::Set(_)) => pending.push((key.clone(), e.clone())),
            other => {
                if let Some(t) = value_term(other, kb) {
                    simple.entry(key.clone()).or_default().push(t);
                }
            }
        }
    }
    let target = k.target.as_ref().filter(|t| !t.as_single().is_some_and(Singleton::is_default));
    let base =
        |args: Vec<Term>| Proposition { name: k.label.clone(), args, properties: simple.clone(), negated: false };
    let main = expand_args(&k.source, kb, &mut |s: Term| match target {
        None => expand_props(&base(vec![s]), &pending, kb),
        Some(t) => expand_args(t, kb, &mut |t: Term| expand_props(&base(vec![s.clone(), t]), &pending, kb)),
    })?;
    parts.push(if k.negated { Formula::not(main) } else { main });
    Ok(Formula::and(parts))
}

/// Closed formula for a fully rewritten kernel.
pub fn to_fol(k: &Relationship, kb: &KnowledgeBase) -> Result<Formula, FolError> {
    let mut k = k.clone();
    unify_control(&mut k);
    Ok(kernel_formula(&k, kb)?.close())
}
