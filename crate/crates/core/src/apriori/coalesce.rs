use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use super::entity::{Entity, GroupType, PropValue, Props, SetOfSingletons, Singleton};
use super::graph::{DepGraph, DepNode};
use super::meu::{meu_match, meu_resolution, most_specific_type, MeuDb};
use crate::kb::KnowledgeBase;

const NEGATORS: [&str; 4] = ["not", "n't", "never", "no"];

#[derive(Debug, Error, Clone, PartialEq)]
#[error("cannot resolve an empty group")]
pub struct EmptyGroupError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AprioriOptions {
    /// MEU typing and multi-word resolution; off joins compound words verbatim.
    pub use_meu: bool,
}

impl Default for AprioriOptions {
    fn default() -> Self {
        AprioriOptions { use_meu: true }
    }
}

/// A dependency-graph word plus the markers folded into it.
#[derive(Clone, Debug, Serialize)]
pub struct Token {
    pub node: DepNode,
    pub parent: Option<(u32, String)>,
    pub negated: bool,
    pub copular: bool,
    pub passive: bool,
    pub mark: Option<String>,
    pub particle: Option<String>,
}

impl Token {
    pub fn is_verb(&self) -> bool {
        matches!(self.node.pos.as_str(), "VERB" | "AUX")
    }

    pub fn is_adjective(&self) -> bool {
        self.node.pos == "ADJ"
    }
}

/// A content dependency surviving the fold; `target` is the entity the head refers to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Link {
    pub head: u32,
    pub dep: u32,
    pub target: u32,
    pub label: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct AprioriGraph {
    pub text: String,
    pub tokens: BTreeMap<u32, Token>,
    pub entities: BTreeMap<u32, Entity>,
    /// Token → entity representing the word itself.
    pub own: BTreeMap<u32, u32>,
    /// Token → outermost entity that incoming links refer to.
    pub refer: BTreeMap<u32, u32>,
    pub links: Vec<Link>,
    pub root: u32,
    pub next_id: u32,
}

impl AprioriGraph {
    pub fn entity(&self, id: u32) -> &Entity {
        &self.entities[&id]
    }

    pub fn token(&self, id: u32) -> &Token {
        &self.tokens[&id]
    }

    pub fn fresh_id(&mut self) -> u32 {
        let id = self.next_id;
        self.next_id += 1;
        id
    }

    pub fn links_from(&self, head: u32) -> impl Iterator<Item = &Link> {
        self.links.iter().filter(move |l| l.head == head)
    }
}

/// Merges a positional GROUPING into one Singleton with an optional `extra`.
pub fn resolve_multiword(group: &SetOfSingletons, text: &str, db: &MeuDb) -> Result<Singleton, EmptyGroupError> {
    let members: Vec<&Singleton> = group.entities.iter().filter_map(Entity::as_single).collect();
    if members.is_empty() {
        return Err(EmptyGroupError);
    }
    let conf_product: f64 = members.iter().map(|m| m.confidence).product();
    let span = |xs: &[&Singleton]| -> (usize, usize, String) {
        let name = xs.iter().map(|m| m.named_entity.as_str()).collect::<Vec<_>>().join(" ");
        (xs[0].min, xs[xs.len() - 1].max, name)
    };
    if members.len() == 1 {
        return Ok(members[0].clone());
    }
    let n = members.len();
    // (confidence, length, start, type)
    let mut best: Option<(f64, usize, usize, String)> = None;
    for len in 2..=n {
        for start in 0..=n - len {
            let (min, max, name) = span(&members[start..start + len]);
            let spanned = text.get(min..max).filter(|s| !s.is_empty()).unwrap_or(&name);
            let (c, t) = meu_resolution(min, max, "None", spanned, db);
            if c <= 0.0 {
                continue;
            }
            let better = match &best {
                None => true,
                Some((bc, bl, _, _)) => c > *bc || (c == *bc && len > *bl),
            };
            if better {
                best = Some((c, len, start, t));
            }
        }
    }
    let head = members[n - 1];
    let (min, max, name) = span(&members);
    let Some((conf, len, start, type_)) = best else {
        let types: Vec<&str> = members.iter().map(|m| m.type_.as_str()).collect();
        let t = most_specific_type(&types);
        let mut s = head.clone();
        s.named_entity = name;
        s.type_ = if t == "None" { head.type_.clone() } else { t };
        s.min = min;
        s.max = max;
        s.confidence = conf_product;
        s.properties.clear();
        return Ok(s);
    };
    let (mmin, mmax, mname) = span(&members[start..start + len]);
    let mut merged = members[start + len - 1].clone();
    merged.named_entity = mname;
    merged.type_ = type_;
    merged.min = mmin;
    merged.max = mmax;
    merged.properties.clear();
    let mut remaining: Vec<Singleton> = members[..start].iter().map(|m| (*m).clone()).collect();
    remaining.push(merged);
    remaining.extend(members[start + len..].iter().map(|m| (*m).clone()));
    let types: Vec<&str> = remaining.iter().map(|m| m.type_.as_str()).collect();
    let most = most_specific_type(&types);
    let core_at = remaining.iter().position(|m| m.type_ == most).unwrap_or(remaining.len() - 1);
    let mut core = remaining[core_at].clone();
    core.properties.clear();
    let extra: Vec<&str> =
        remaining.iter().enumerate().filter(|(i, _)| *i != core_at).map(|(_, m)| m.named_entity.as_str()).collect();
    if !extra.is_empty() {
        core.properties.push(("extra".into(), PropValue::Text(extra.join(" "))));
    }
    core.min = min;
    core.max = max;
    core.confidence = conf_product * conf;
    Ok(core)
}

struct Builder<'a> {
    g: &'a DepGraph,
    kb: &'a KnowledgeBase,
    db: &'a MeuDb,
    opts: AprioriOptions,
}

impl Builder<'_> {
    fn span(&self, n: &DepNode) -> (usize, usize) {
        match (n.start, n.end) {
            (Some(s), Some(e)) => (s, e),
            _ => (0, 0),
        }
    }

    /// Noun-tagged words only take a VERB type under narrow syntactic conditions.
    fn may_be_verb(&self, id: u32, props: &Props, tokens: &BTreeMap<u32, Token>, roots: &[u32]) -> bool {
        if props.iter().any(|(k, _)| k == "det") {
            return false;
        }
        let cases: Vec<String> = props
            .iter()
            .filter(|(k, _)| super::entity::is_position_key(k))
            .filter_map(|(_, v)| if let PropValue::Text(t) = v { Some(t.to_lowercase()) } else { None })
            .collect();
        if cases.iter().any(|c| c == "on") {
            return false;
        }
        let last = self.g.nodes.iter().map(|n| n.id).max() == Some(id);
        let parent = tokens[&id].parent.clone();
        let incoming_with_case = parent.is_some() && !cases.is_empty();
        let rooted = last && roots.contains(&id);
        let compound_of_root = last && matches!(&parent, Some((p, label)) if label == "compound" && roots.contains(p));
        incoming_with_case || rooted || compound_of_root
    }

    fn singleton(&self, n: &DepNode, props: Props, tokens: &BTreeMap<u32, Token>, roots: &[u32]) -> Singleton {
        let (min, max) = self.span(n);
        let mut s = Singleton::new(n.id, n.name.clone(), n.type_.clone());
        s.min = min;
        s.max = max;
        if self.kb.is_pronoun(&n.name) {
            s.type_ = "PRONOUN".into();
        } else if self.opts.use_meu && max > min {
            let m = meu_match(min, max, Some(&n.lemma), "None", self.db);
            let noun = matches!(n.pos.as_str(), "NOUN" | "PROPN");
            let accept =
                m.confidence > 0.0 && (m.type_ != "VERB" || !noun || self.may_be_verb(n.id, &props, tokens, roots));
            if accept {
                s.type_ = m.type_;
                s.confidence = m.confidence;
                s.source = m.source.map(|x| x.name().to_string());
            }
        }
        s.properties = props;
        s
    }
}

/// Folds function words into their heads and groups compounds, negations,
/// coordinations and repeated obliques into entities.
pub fn coalesce_groups(
    g: &DepGraph,
    kb: &KnowledgeBase,
    db: &MeuDb,
    opts: AprioriOptions,
) -> Result<AprioriGraph, EmptyGroupError> {
    let b = Builder { g, kb, db, opts };
    let roots = g.roots();
    let mut tokens: BTreeMap<u32, Token> = g
        .nodes
        .iter()
        .map(|n| {
            let t = Token {
                node: n.clone(),
                parent: None,
                negated: false,
                copular: false,
                passive: false,
                mark: None,
                particle: None,
            };
            (n.id, t)
        })
        .collect();
    let mut edges = g.edges.clone();
    edges.sort_by_key(|e| (e.target, e.source));
    for e in &edges {
        tokens.get_mut(&e.target).expect("validated").parent = Some((e.source, e.label.clone()));
    }
    let has_children: BTreeSet<u32> = edges.iter().map(|e| e.source).collect();

    let mut folded: BTreeMap<u32, Props> = BTreeMap::new();
    let mut consumed: BTreeSet<u32> = BTreeSet::new();
    let mut content = Vec::new();
    for e in &edges {
        let word = tokens[&e.target].node.name.clone();
        let head = tokens.get_mut(&e.source).expect("validated");
        let props = folded.entry(e.source).or_default();
        match e.label.as_str() {
            "case" => props.push((e.target.to_string(), PropValue::Text(word))),
            "det" | "det:poss" | "det:predet" => props.push(("det".into(), PropValue::Text(word))),
            "amod" if !has_children.contains(&e.target) => props.push(("amod".into(), PropValue::Text(word))),
            "aux" => {}
            "aux:pass" => head.passive = true,
            "cop" => head.copular = true,
            "mark" => head.mark = Some(word.to_lowercase()),
            "punct" | "expl" | "cc" | "cc:preconj" => {}
            "compound:prt" => head.particle = Some(word.to_lowercase()),
            "advmod" if NEGATORS.contains(&word.to_lowercase().as_str()) => head.negated = true,
            _ => {
                content.push(e.clone());
                continue;
            }
        }
        consumed.insert(e.target);
    }

    let mut out = AprioriGraph {
        text: g.text.clone(),
        tokens: BTreeMap::new(),
        entities: BTreeMap::new(),
        own: BTreeMap::new(),
        refer: BTreeMap::new(),
        links: Vec::new(),
        root: roots.first().copied().unwrap_or(0),
        next_id: g.nodes.iter().map(|n| n.id).max().map_or(0, |m| m + 1),
    };

    // Compound chains and fans, resolved bottom-up as one group per outermost head.
    let compound_kids = |id: u32| -> Vec<u32> {
        content.iter().filter(|e| e.source == id && e.label == "compound").map(|e| e.target).collect()
    };
    let mut grouped: BTreeSet<u32> = BTreeSet::new();
    for n in &g.nodes {
        let is_child = matches!(&tokens[&n.id].parent, Some((_, l)) if l == "compound");
        if is_child || consumed.contains(&n.id) || compound_kids(n.id).is_empty() {
            continue;
        }
        let mut members = vec![n.id];
        let mut stack = compound_kids(n.id);
        while let Some(m) = stack.pop() {
            members.push(m);
            stack.extend(compound_kids(m));
        }
        members.sort_unstable();
        let singles: Vec<Entity> = members
            .iter()
            .map(|m| Entity::Single(b.singleton(&tokens[m].node, Props::new(), &tokens, &roots)))
            .collect();
        let set = SetOfSingletons { id: n.id, entities: singles, group_type: GroupType::Grouping, confidence: 1.0 };
        let mut s = if opts.use_meu {
            resolve_multiword(&set, &g.text, db)?
        } else {
            let mut s = set.entities.last().and_then(Entity::as_single).cloned().ok_or(EmptyGroupError)?;
            s.named_entity = set.entities.iter().flat_map(Entity::leaf_names).collect::<Vec<_>>().join(" ");
            s
        };
        for m in &members {
            s.properties.extend(folded.remove(m).unwrap_or_default());
        }
        let id = s.id;
        for m in &members {
            out.own.insert(*m, id);
            out.refer.insert(*m, id);
            grouped.insert(*m);
        }
        out.entities.insert(id, Entity::Single(s));
    }
    content.retain(|e| e.label != "compound");

    for n in &g.nodes {
        if consumed.contains(&n.id) || grouped.contains(&n.id) {
            continue;
        }
        let props = folded.remove(&n.id).unwrap_or_default();
        let mut s = b.singleton(n, props, &tokens, &roots);
        if let Some(p) = &tokens[&n.id].particle {
            s.named_entity = format!("{} {}", s.named_entity, p);
        }
        out.own.insert(n.id, n.id);
        out.refer.insert(n.id, n.id);
        out.entities.insert(n.id, Entity::Single(s));
    }

    // Negated non-verbal words become NOT wrappers.
    for (id, t) in &tokens {
        if t.negated && !t.is_verb() && out.refer.contains_key(id) {
            let inner = out.entities[&out.refer[id]].clone();
            let nid = out.fresh_id();
            let set = SetOfSingletons {
                id: nid,
                confidence: inner.confidence(),
                entities: vec![inner],
                group_type: GroupType::Not,
            };
            out.entities.insert(nid, Entity::Set(set));
            out.refer.insert(*id, nid);
        }
    }

    // Coordination, typed by the first coordinating word found breadth-first.
    let heads: Vec<u32> =
        content.iter().filter(|e| e.label == "conj").map(|e| e.source).collect::<BTreeSet<_>>().into_iter().collect();
    for h in heads {
        if tokens[&h].is_verb() {
            continue;
        }
        let mut members = vec![h];
        members.extend(content.iter().filter(|e| e.source == h && e.label == "conj").map(|e| e.target));
        members.sort_unstable();
        let cc_of = |id: u32| -> Vec<String> {
            edges
                .iter()
                .filter(|e| e.source == id && (e.label == "cc" || e.label == "cc:preconj"))
                .map(|e| tokens[&e.target].node.name.to_lowercase())
                .collect()
        };
        let mut words: Vec<String> = Vec::new();
        for m in &members {
            words.extend(cc_of(*m));
        }
        let group_type = if words.iter().any(|w| w == "neither" || w == "nor") {
            GroupType::Neither
        } else {
            match words.first().map(String::as_str) {
                Some("or") => GroupType::Or,
                _ => GroupType::And,
            }
        };
        let entities: Vec<Entity> = members.iter().map(|m| out.entities[&out.refer[m]].clone()).collect();
        let confidence = entities.iter().map(Entity::confidence).product();
        let nid = out.fresh_id();
        out.entities.insert(nid, Entity::Set(SetOfSingletons { id: nid, entities, group_type, confidence }));
        out.refer.insert(h, nid);
    }
    content.retain(|e| !(e.label == "conj" && !tokens[&e.source].is_verb()));

    out.links = content
        .iter()
        .filter(|e| out.own.contains_key(&e.source) && out.refer.contains_key(&e.target))
        .map(|e| Link { head: e.source, dep: e.target, target: out.refer[&e.target], label: e.label.clone() })
        .collect();

    // Two or more obliques of one head become a single MULTIINDIRECT argument.
    let heads: BTreeSet<u32> = out.links.iter().filter(|l| l.label == "obl").map(|l| l.head).collect();
    for h in heads {
        let obl: Vec<Link> = out.links.iter().filter(|l| l.head == h && l.label == "obl").cloned().collect();
        if obl.len() < 2 {
            continue;
        }
        let entities: Vec<Entity> = obl.iter().map(|l| out.entities[&l.target].clone()).collect();
        let nid = out.fresh_id();
        out.entities.insert(
            nid,
            Entity::Set(SetOfSingletons { id: nid, entities, group_type: GroupType::MultiIndirect, confidence: 1.0 }),
        );
        let first = out.links.iter().position(|l| l.head == h && l.label == "obl").expect("present");
        out.links[first] = Link { head: h, dep: obl[0].dep, target: nid, label: "obl".into() };
        let mut seen = false;
        out.links.retain(|l| {
            if l.head == h && l.label == "obl" {
                let keep = !seen;
                seen = true;
                keep
            } else {
                true
            }
        });
    }
    out.tokens = tokens;
    Ok(out)
}
