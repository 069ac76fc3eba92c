//! Miniature upper-ontology knowledge base: lexicon, verb classes, logical
//! rewrite rules, logical-function definitions, semantic relations and
//! proposition expansion rules.

mod expand;
mod pattern;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use expand::ExpansionBudgetExceeded;
pub use pattern::{PropPattern, TermPattern};

/// Derived propositions allowed per expansion seed.
pub const EXPANSION_BOUND: usize = 64;

#[derive(Debug, Error)]
pub enum KbError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed knowledge base: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid knowledge base entry {entry}: {reason}")]
    Validation { entry: String, reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum EntityClass {
    Verb,
    Gpe,
    Loc,
    Org,
    Noun,
    Entity,
    Adjective,
    Pronoun,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerbClass {
    Causative,
    Movement,
    Any,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KbLexEntry {
    pub lemma: String,
    #[serde(default)]
    pub surface_forms: Vec<String>,
    pub entity_class: EntityClass,
    #[serde(default)]
    pub abstract_entity: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transitive: Option<bool>,
    #[serde(default)]
    pub semi_modal: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verb_class: Option<VerbClass>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogicalRewriteRule {
    pub rule_order: u32,
    #[serde(default)]
    pub prepositions: BTreeSet<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matched_by_source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub requires_abstract_entity: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub requires_verb_class: Option<VerbClass>,
    pub construct_name: String,
    pub construct_property: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AttachTo {
    Kernel,
    Singleton,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogicalFunctionDef {
    pub construct_name: String,
    pub construct_property: String,
    pub attach_to: AttachTo,
    pub argument: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RelationKind {
    Equiv,
    Implies,
    Inconsistent,
    PartOf,
    IsA,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemanticRelation {
    pub kind: RelationKind,
    pub left: String,
    pub right: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ExpansionMode {
    Entailing,
    Equivalent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpansionRule {
    pub mode: ExpansionMode,
    pub pattern: PropPattern,
    pub rewrite: PropPattern,
    /// Pattern properties must equal the proposition's properties.
    #[serde(default)]
    pub exact: bool,
    /// Copy properties the pattern did not mention into the rewrite.
    #[serde(default = "yes")]
    pub carry: bool,
}

fn yes() -> bool {
    true
}

/// Result of [`KnowledgeBase::relation`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum KbRelation {
    Equiv,
    Implies,
    Inconsistent,
    None,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KbFile {
    #[serde(default)]
    lexicon: Vec<KbLexEntry>,
    #[serde(default)]
    rewrite_rules: Vec<LogicalRewriteRule>,
    #[serde(default)]
    functions: Vec<LogicalFunctionDef>,
    #[serde(default)]
    relations: Vec<SemanticRelation>,
    #[serde(default)]
    expansions: Vec<ExpansionRule>,
    #[serde(default)]
    prototypical_prepositions: Vec<String>,
    #[serde(default)]
    pronouns: Vec<String>,
    #[serde(default)]
    phrasal_verbs: Vec<String>,
}

/// What the rule matcher knows about the enclosing kernel.
#[derive(Clone, Debug, Default)]
pub struct KernelContext {
    pub verb: Option<String>,
}

/// What the rule matcher knows about the candidate node.
#[derive(Clone, Debug, Default)]
pub struct NodeContext {
    pub prepositions: Vec<String>,
    pub source: Option<String>,
    pub abstract_entity: bool,
}

/// Immutable after load.
#[derive(Clone, Debug)]
pub struct KnowledgeBase {
    lexicon: Vec<KbLexEntry>,
    by_surface: HashMap<String, usize>,
    rules: Vec<LogicalRewriteRule>,
    functions: Vec<LogicalFunctionDef>,
    relations: Vec<SemanticRelation>,
    expansions: Vec<ExpansionRule>,
    prototypical_prepositions: Vec<String>,
    pronouns: Vec<String>,
    phrasal_verbs: Vec<String>,
    equiv_class: HashMap<String, usize>,
}

impl Default for KnowledgeBase {
    fn default() -> Self {
        KnowledgeBase::from_file(KbFile::default()).expect("empty knowledge base is valid")
    }
}

impl KnowledgeBase {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, KbError> {
        let p = path.as_ref();
        let text =
            std::fs::read_to_string(p).map_err(|source| KbError::Io { path: p.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, KbError> {
        let file: KbFile = serde_json::from_str(text)?;
        Self::from_file(file)
    }

    fn from_file(mut f: KbFile) -> Result<Self, KbError> {
        let mut by_surface = HashMap::new();
        for (i, e) in f.lexicon.iter().enumerate() {
            if e.lemma.trim().is_empty() {
                return invalid(format!("lexicon[{i}]"), "lemma is empty");
            }
            if e.entity_class != EntityClass::Verb && (e.transitive.is_some() || e.semi_modal || e.verb_class.is_some())
            {
                return invalid(e.lemma.clone(), "verb-only field on a non-verb entry");
            }
            by_surface.entry(e.lemma.to_lowercase()).or_insert(i);
            for s in &e.surface_forms {
                by_surface.entry(s.to_lowercase()).or_insert(i);
            }
        }
        let mut orders = BTreeSet::new();
        for r in &f.rewrite_rules {
            if r.rule_order == 0 {
                return invalid(format!("logrule/{}", r.rule_order), "rule_order must be positive");
            }
            if !orders.insert(r.rule_order) {
                return invalid(format!("logrule/{}", r.rule_order), "duplicate rule_order");
            }
            if r.prepositions.is_empty() && r.matched_by_source.is_none() {
                return invalid(format!("logrule/{}", r.rule_order), "empty prepositions require matched_by_source");
            }
        }
        f.rewrite_rules.sort_by_key(|r| r.rule_order);
        let mut seen = BTreeSet::new();
        for d in &f.functions {
            if !seen.insert((d.construct_name.clone(), d.construct_property.clone())) {
                return invalid(format!("{}/{}", d.construct_name, d.construct_property), "duplicate logical function");
            }
        }
        for r in &f.relations {
            if r.kind == RelationKind::Inconsistent && r.left == r.right {
                return invalid(format!("INCONSISTENT({})", r.left), "self-loop");
            }
        }
        for (i, x) in f.expansions.iter().enumerate() {
            let bound = x.pattern.variables();
            for v in x.rewrite.variables() {
                if !bound.contains(&v) {
                    return invalid(format!("expansions[{i}]"), &format!("template variable {v} is unbound"));
                }
            }
            if x.mode == ExpansionMode::Equivalent {
                let back = x.rewrite.variables();
                for v in x.pattern.variables() {
                    if !back.contains(&v) {
                        return invalid(
                            format!("expansions[{i}]"),
                            &format!("equivalence loses variable {v} right-to-left"),
                        );
                    }
                }
            }
        }
        let equiv_class = equivalence_classes(&f.relations);
        Ok(KnowledgeBase {
            lexicon: f.lexicon,
            by_surface,
            rules: f.rewrite_rules,
            functions: f.functions,
            relations: f.relations,
            expansions: f.expansions,
            prototypical_prepositions: f.prototypical_prepositions,
            pronouns: f.pronouns,
            phrasal_verbs: f.phrasal_verbs,
            equiv_class,
        })
    }

    pub fn lexicon(&self) -> &[KbLexEntry] {
        &self.lexicon
    }

    pub fn rules(&self) -> &[LogicalRewriteRule] {
        &self.rules
    }

    pub fn rule_by_order(&self, order: u32) -> Option<&LogicalRewriteRule> {
        self.rules.iter().find(|r| r.rule_order == order)
    }

    pub fn functions(&self) -> &[LogicalFunctionDef] {
        &self.functions
    }

    pub fn function_for(&self, rule: &LogicalRewriteRule) -> Option<&LogicalFunctionDef> {
        self.functions
            .iter()
            .find(|d| d.construct_name == rule.construct_name && d.construct_property == rule.construct_property)
            .or_else(|| self.functions.iter().find(|d| d.construct_name == rule.construct_name))
    }

    pub fn relations(&self) -> &[SemanticRelation] {
        &self.relations
    }

    pub fn expansions(&self) -> &[ExpansionRule] {
        &self.expansions
    }

    pub fn prototypical_prepositions(&self) -> &[String] {
        &self.prototypical_prepositions
    }

    pub fn is_pronoun(&self, word: &str) -> bool {
        self.pronouns.iter().any(|p| p.eq_ignore_ascii_case(word))
    }

    pub fn is_phrasal(&self, verb: &str, adverb: &str) -> bool {
        let joined = format!("{verb} {adverb}");
        self.phrasal_verbs.iter().any(|p| p == &joined)
    }

    pub fn entry(&self, word: &str) -> Option<&KbLexEntry> {
        self.by_surface.get(&word.to_lowercase()).map(|&i| &self.lexicon[i])
    }

    /// Surface form to lemma; unknown words lemmatise to themselves.
    pub fn lemma(&self, word: &str) -> String {
        self.entry(word).map(|e| e.lemma.clone()).unwrap_or_else(|| word.to_string())
    }

    /// Word-by-word lemmatisation of a multi-word name.
    pub fn lemma_phrase(&self, phrase: &str) -> String {
        if let Some(e) = self.entry(phrase) {
            return e.lemma.clone();
        }
        phrase.split(' ').map(|w| self.lemma(w)).collect::<Vec<_>>().join(" ")
    }

    pub fn is_abstract(&self, word: &str) -> bool {
        self.entry(word).is_some_and(|e| e.abstract_entity)
    }

    pub fn transitive(&self, verb: &str) -> Option<bool> {
        self.entry(verb).and_then(|e| e.transitive)
    }

    pub fn is_semi_modal(&self, verb: &str) -> bool {
        self.entry(verb).is_some_and(|e| e.semi_modal)
    }

    pub fn verb_class(&self, verb: &str) -> Option<VerbClass> {
        self.entry(verb).and_then(|e| e.verb_class)
    }

    /// First rule in ascending `rule_order` whose premises all hold.
    pub fn match_logical_rule(&self, k: &KernelContext, n: &NodeContext) -> Option<&LogicalRewriteRule> {
        self.rules.iter().find(|r| {
            let prep_ok = if r.prepositions.is_empty() {
                true
            } else {
                n.prepositions.iter().any(|p| r.prepositions.contains(&p.to_lowercase()))
            };
            let source_ok = match &r.matched_by_source {
                Some(s) => n.source.as_deref() == Some(s.as_str()),
                None => true,
            };
            let abstract_ok = r.requires_abstract_entity.is_none_or(|a| a == n.abstract_entity);
            let verb_ok = match r.requires_verb_class {
                None | Some(VerbClass::Any) => true,
                Some(c) => k.verb.as_deref().and_then(|v| self.verb_class(v)) == Some(c),
            };
            prep_ok && source_ok && abstract_ok && verb_ok
        })
    }

    /// Closure-based relation between two names; priority EQUIV > INCONSISTENT > IMPLIES.
    pub fn relation(&self, a: &str, b: &str) -> KbRelation {
        if a == b || matches!((self.equiv_class.get(a), self.equiv_class.get(b)), (Some(x), Some(y)) if x == y) {
            return KbRelation::Equiv;
        }
        let up_a = self.upward(a);
        let up_b = self.upward(b);
        for r in &self.relations {
            if r.kind == RelationKind::Inconsistent
                && ((up_a.contains(&r.left) && up_b.contains(&r.right))
                    || (up_a.contains(&r.right) && up_b.contains(&r.left)))
            {
                return KbRelation::Inconsistent;
            }
        }
        if up_a.contains(b) || up_a.iter().any(|x| self.same_class(x, b)) {
            return KbRelation::Implies;
        }
        KbRelation::None
    }

    fn same_class(&self, a: &str, b: &str) -> bool {
        a == b || matches!((self.equiv_class.get(a), self.equiv_class.get(b)), (Some(x), Some(y)) if x == y)
    }

    /// Names reachable through EQUIV (both ways) and directed IMPLIES/IS_A/PART_OF.
    fn upward(&self, start: &str) -> BTreeSet<String> {
        let mut seen = BTreeSet::from([start.to_string()]);
        let mut queue = VecDeque::from([start.to_string()]);
        while let Some(x) = queue.pop_front() {
            for r in &self.relations {
                let next = match r.kind {
                    RelationKind::Equiv if r.left == x => Some(&r.right),
                    RelationKind::Equiv if r.right == x => Some(&r.left),
                    RelationKind::Implies | RelationKind::IsA | RelationKind::PartOf if r.left == x => Some(&r.right),
                    _ => None,
                };
                if let Some(n) = next {
                    if seen.insert(n.clone()) {
                        queue.push_back(n.clone());
                    }
                }
            }
        }
        seen
    }

    /// One-step term substitutions allowed by semantic relations in a mode.
    pub(crate) fn substitutions(&self, key: &str, mode: ExpansionMode) -> Vec<String> {
        let mut out = Vec::new();
        for r in &self.relations {
            match (r.kind, mode) {
                (RelationKind::Equiv, _) => {
                    if r.left == key {
                        out.push(r.right.clone());
                    } else if r.right == key {
                        out.push(r.left.clone());
                    }
                }
                (RelationKind::Implies | RelationKind::IsA | RelationKind::PartOf, ExpansionMode::Entailing)
                    if r.left == key =>
                {
                    out.push(r.right.clone())
                }
                _ => {}
            }
        }
        out
    }
}

fn invalid<T>(entry: String, reason: &str) -> Result<T, KbError> {
    Err(KbError::Validation { entry, reason: reason.to_string() })
}

fn equivalence_classes(rels: &[SemanticRelation]) -> HashMap<String, usize> {
    let mut parent: BTreeMap<String, String> = BTreeMap::new();
    fn find(p: &mut BTreeMap<String, String>, x: &str) -> String {
        let up = p.get(x).cloned().unwrap_or_else(|| x.to_string());
        if up == x {
            return up;
        }
        let root = find(p, &up);
        p.insert(x.to_string(), root.clone());
        root
    }
    for r in rels.iter().filter(|r| r.kind == RelationKind::Equiv) {
        parent.entry(r.left.clone()).or_insert_with(|| r.left.clone());
        parent.entry(r.right.clone()).or_insert_with(|| r.right.clone());
        let a = find(&mut parent, &r.left);
        let b = find(&mut parent, &r.right);
        if a != b {
            parent.insert(a, b);
        }
    }
    let keys: Vec<String> = parent.keys().cloned().collect();
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut out = HashMap::new();
    for k in keys {
        let root = find(&mut parent, &k);
        let n = ids.len();
        let id = *ids.entry(root).or_insert(n);
        out.insert(k, id);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kb(json: &str) -> KnowledgeBase {
        KnowledgeBase::from_json(json).unwrap()
    }

    #[test]
    fn minimal_kb_loads_one_entry() {
        let k = kb(r#"{"lexicon":[{"lemma":"cat","entity_class":"NOUN"}]}"#);
        assert_eq!(k.lexicon().len(), 1);
    }

    #[test]
    fn rule_twelve_retrievable_by_order() {
        let k = kb(r#"{"rewrite_rules":[{"rule_order":12,"prepositions":["in","into"],
            "construct_name":"space","construct_property":"stay in place"}]}"#);
        let r = k.rule_by_order(12).unwrap();
        assert_eq!(r.construct_property, "stay in place");
        assert!(r.prepositions.contains("into"));
    }

    #[test]
    fn duplicate_rule_order_rejected() {
        let e = KnowledgeBase::from_json(
            r#"{"rewrite_rules":[
            {"rule_order":3,"prepositions":["in"],"construct_name":"space","construct_property":"a"},
            {"rule_order":3,"prepositions":["on"],"construct_name":"space","construct_property":"b"}]}"#,
        )
        .unwrap_err();
        assert!(matches!(e, KbError::Validation { ref entry, .. } if entry == "logrule/3"));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(KnowledgeBase::from_json(r#"{"lexicon":[],"colour":1}"#).is_err());
    }

    #[test]
    fn verb_fields_only_on_verbs() {
        let e = KnowledgeBase::from_json(r#"{"lexicon":[{"lemma":"cat","entity_class":"NOUN","transitive":true}]}"#);
        assert!(e.is_err());
    }

    fn rules_kb() -> KnowledgeBase {
        kb(r#"{
          "lexicon":[{"lemma":"close","entity_class":"VERB","verb_class":"causative","transitive":true}],
          "rewrite_rules":[
            {"rule_order":1,"prepositions":["on","in","at"],"matched_by_source":"SUTime","construct_name":"time","construct_property":"defined"},
            {"rule_order":12,"prepositions":["in","into"],"requires_abstract_entity":false,"construct_name":"space","construct_property":"stay in place"},
            {"rule_order":20,"prepositions":["for"],"requires_verb_class":"causative","construct_name":"aim_objective","construct_property":"aim"}
          ]}"#)
    }

    #[test]
    fn movies_in_is_space() {
        let k = rules_kb();
        let n = NodeContext { prepositions: vec!["in".into()], source: None, abstract_entity: false };
        let r = k.match_logical_rule(&KernelContext::default(), &n).unwrap();
        assert_eq!((r.construct_name.as_str(), r.construct_property.as_str()), ("space", "stay in place"));
    }

    #[test]
    fn saturdays_on_is_time() {
        let k = rules_kb();
        let n = NodeContext { prepositions: vec!["on".into()], source: Some("SUTime".into()), abstract_entity: false };
        assert_eq!(k.match_logical_rule(&KernelContext::default(), &n).unwrap().rule_order, 1);
    }

    #[test]
    fn no_premise_no_rule() {
        let k = rules_kb();
        assert!(k.match_logical_rule(&KernelContext::default(), &NodeContext::default()).is_none());
    }

    #[test]
    fn verb_class_premise() {
        let k = rules_kb();
        let n = NodeContext { prepositions: vec!["for".into()], ..Default::default() };
        assert!(k.match_logical_rule(&KernelContext { verb: Some("flow".into()) }, &n).is_none());
        let r = k.match_logical_rule(&KernelContext { verb: Some("close".into()) }, &n).unwrap();
        assert_eq!(r.rule_order, 20);
    }

    #[test]
    fn relation_reflexive_and_transitive() {
        let k =
            kb(r#"{"relations":[{"kind":"EQUIV","left":"a","right":"b"},{"kind":"EQUIV","left":"b","right":"c"}]}"#);
        assert_eq!(k.relation("x", "x"), KbRelation::Equiv);
        assert_eq!(k.relation("a", "c"), KbRelation::Equiv);
        assert_eq!(k.relation("c", "a"), KbRelation::Equiv);
    }

    #[test]
    fn is_a_closure_implies() {
        let k = kb(r#"{"relations":[{"kind":"IS_A","left":"city centre","right":"Newcastle-part"},
            {"kind":"PART_OF","left":"Newcastle-part","right":"Newcastle"}]}"#);
        assert_eq!(k.relation("city centre", "Newcastle-part"), KbRelation::Implies);
        assert_eq!(k.relation("city centre", "Newcastle"), KbRelation::Implies);
        assert_eq!(k.relation("Newcastle", "city centre"), KbRelation::None);
    }

    #[test]
    fn inconsistency_beats_implication() {
        let k = kb(r#"{"relations":[{"kind":"IMPLIES","left":"a","right":"b"},
            {"kind":"INCONSISTENT","left":"b","right":"c"},{"kind":"IMPLIES","left":"a","right":"c"}]}"#);
        assert_eq!(k.relation("a", "c"), KbRelation::Inconsistent);
        assert_eq!(k.relation("b", "c"), KbRelation::Inconsistent);
    }

    #[test]
    fn lemma_lookup_and_fallback() {
        let k = kb(r#"{"lexicon":[{"lemma":"flow","surface_forms":["flowing","flows"],"entity_class":"VERB"}]}"#);
        assert_eq!(k.lemma("flowing"), "flow");
        assert_eq!(k.lemma("Flows"), "flow");
        assert_eq!(k.lemma("zebra"), "zebra");
    }
}
