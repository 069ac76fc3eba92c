use serde::Serialize;

use crate::kernel::Relationship;

/// Type tag of an unnumbered or numbered existential placeholder.
pub const EXISTENTIAL: &str = "EXISTENTIAL";
/// Existential introduced only because `be` lacks a complement; dropped in FOL.
pub const DEFAULT_EXISTENTIAL: &str = "DEFAULT_EXISTENTIAL";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GroupType {
    And,
    Or,
    Neither,
    Not,
    Grouping,
    MultiIndirect,
}

impl GroupType {
    pub fn name(self) -> &'static str {
        match self {
            GroupType::And => "AND",
            GroupType::Or => "OR",
            GroupType::Neither => "NEITHER",
            GroupType::Not => "NOT",
            GroupType::Grouping => "GROUPING",
            GroupType::MultiIndirect => "MULTIINDIRECT",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum PropValue {
    Text(String),
    Entity(Entity),
    Kernel(Box<Relationship>),
}

/// Ordered property multimap; insertion order is part of the rendering.
pub type Props = Vec<(String, PropValue)>;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Singleton {
    pub id: u32,
    pub named_entity: String,
    pub properties: Props,
    pub min: usize,
    pub max: usize,
    #[serde(rename = "type")]
    pub type_: String,
    pub confidence: f64,
    /// MEU source that typed this entity, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel: Option<Box<Relationship>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SetOfSingletons {
    pub id: u32,
    pub entities: Vec<Entity>,
    pub group_type: GroupType,
    pub confidence: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Entity {
    Single(Singleton),
    Set(SetOfSingletons),
}

impl Singleton {
    pub fn new(id: u32, name: impl Into<String>, type_: impl Into<String>) -> Self {
        Singleton {
            id,
            named_entity: name.into(),
            properties: Vec::new(),
            min: 0,
            max: 0,
            type_: type_.into(),
            confidence: 1.0,
            source: None,
            kernel: None,
        }
    }

    pub fn existential(id: u32) -> Self {
        Singleton::new(id, "?", EXISTENTIAL)
    }

    pub fn default_existential(id: u32) -> Self {
        Singleton::new(id, "?", DEFAULT_EXISTENTIAL)
    }

    pub fn is_existential(&self) -> bool {
        self.type_ == EXISTENTIAL || self.type_ == DEFAULT_EXISTENTIAL
    }

    pub fn is_default(&self) -> bool {
        self.type_ == DEFAULT_EXISTENTIAL
    }

    pub fn prop(&self, key: &str) -> Option<&PropValue> {
        self.properties.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    /// Words of positional `case` properties, in position order.
    pub fn cases(&self) -> Vec<String> {
        self.properties
            .iter()
            .filter(|(k, _)| is_position_key(k))
            .filter_map(|(_, v)| match v {
                PropValue::Text(t) => Some(t.clone()),
                _ => None,
            })
            .collect()
    }
}

/// `case` properties are keyed by the position of the case word.
pub fn is_position_key(k: &str) -> bool {
    !k.is_empty() && k.parse::<f64>().is_ok()
}

impl Entity {
    pub fn id(&self) -> u32 {
        match self {
            Entity::Single(s) => s.id,
            Entity::Set(s) => s.id,
        }
    }

    pub fn confidence(&self) -> f64 {
        match self {
            Entity::Single(s) => s.confidence,
            Entity::Set(s) => s.confidence,
        }
    }

    pub fn as_single(&self) -> Option<&Singleton> {
        match self {
            Entity::Single(s) => Some(s),
            Entity::Set(_) => None,
        }
    }

    pub fn as_single_mut(&mut self) -> Option<&mut Singleton> {
        match self {
            Entity::Single(s) => Some(s),
            Entity::Set(_) => None,
        }
    }

    pub fn is_existential(&self) -> bool {
        self.as_single().is_some_and(Singleton::is_existential)
    }

    pub fn type_name(&self) -> &str {
        match self {
            Entity::Single(s) => &s.type_,
            Entity::Set(s) => s.group_type.name(),
        }
    }

    /// Leaf names in order.
    pub fn leaf_names(&self) -> Vec<String> {
        match self {
            Entity::Single(s) => vec![s.named_entity.clone()],
            Entity::Set(s) => s.entities.iter().flat_map(Entity::leaf_names).collect(),
        }
    }

    /// Singletons nested in this entity, outermost first.
    pub fn singletons_mut(&mut self) -> Vec<&mut Singleton> {
        match self {
            Entity::Single(s) => vec![s],
            Entity::Set(s) => s.entities.iter_mut().flat_map(Entity::singletons_mut).collect(),
        }
    }

    pub fn render(&self, ids: bool) -> String {
        match self {
            Entity::Single(s) => {
                if let Some(k) = &s.kernel {
                    return k.render(ids);
                }
                let mut out = s.named_entity.clone();
                if ids && !s.is_existential() {
                    out.push_str(&format!("^{}", s.id));
                }
                out.push_str(&render_props(&s.properties, ids));
                out
            }
            Entity::Set(s) => {
                let inner: Vec<String> = s.entities.iter().map(|e| e.render(ids)).collect();
                let mut out = format!("{}({})", s.group_type.name(), inner.join(", "));
                if ids {
                    out.push_str(&format!("^{}", s.id));
                }
                out
            }
        }
    }
}

impl PropValue {
    pub fn render(&self, ids: bool) -> String {
        match self {
            PropValue::Text(t) => t.clone(),
            PropValue::Entity(e) => e.render(ids),
            PropValue::Kernel(k) => k.render(ids),
        }
    }

    pub fn as_entity(&self) -> Option<&Entity> {
        match self {
            PropValue::Entity(e) => Some(e),
            _ => None,
        }
    }
}

pub fn render_props(props: &Props, ids: bool) -> String {
    if props.is_empty() {
        return String::new();
    }
    let items: Vec<String> = props
        .iter()
        .map(|(k, v)| match v {
            PropValue::Kernel(r) if &r.label == k => format!("({})", r.render(ids)),
            _ => format!("({}:{})", k, v.render(ids)),
        })
        .collect();
    format!("[{}]", items.join(", "))
}

impl std::fmt::Display for Entity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.render(false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_nested_sets_with_ids() {
        let mut n = Singleton::new(10, "Newcastle", "GPE");
        n.properties.push(("extra".into(), PropValue::Text("city centre".into())));
        n.properties.push(("6".into(), PropValue::Text("in".into())));
        let not = Entity::Set(SetOfSingletons {
            id: 11,
            entities: vec![Entity::Single(n)],
            group_type: GroupType::Not,
            confidence: 1.0,
        });
        assert_eq!(not.render(false), "NOT(Newcastle[(extra:city centre), (6:in)])");
        assert_eq!(not.render(true), "NOT(Newcastle^10[(extra:city centre), (6:in)])^11");
    }

    #[test]
    fn existentials_render_without_ids() {
        assert_eq!(Entity::Single(Singleton::existential(4)).render(true), "?");
    }

    #[test]
    fn position_keys() {
        assert!(is_position_key("6"));
        assert!(is_position_key("2.5"));
        assert!(!is_position_key("det"));
    }
}
