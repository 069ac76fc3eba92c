use serde::Serialize;

use crate::apriori::{render_props, Entity, PropValue, Props};

/// A verb (or default `be`) between a source and an optional target.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Relationship {
    pub label: String,
    pub source: Entity,
    pub target: Option<Entity>,
    pub negated: bool,
    pub properties: Props,
}

impl Relationship {
    pub fn render(&self, ids: bool) -> String {
        let target = self.target.as_ref().map_or_else(|| "None".to_string(), |t| t.render(ids));
        format!(
            "{}{}({}, {}){}",
            if self.negated { "¬" } else { "" },
            self.label,
            self.source.render(ids),
            target,
            render_props(&self.properties, ids)
        )
    }

    pub fn sentences(&self) -> impl Iterator<Item = &Relationship> {
        self.properties.iter().filter_map(|(k, v)| match v {
            PropValue::Kernel(r) if k == "SENTENCE" => Some(r.as_ref()),
            _ => None,
        })
    }

    /// Applies `f` to this kernel and every nested SENTENCE kernel, innermost first.
    pub fn walk_mut(&mut self, f: &mut impl FnMut(&mut Relationship)) {
        for (k, v) in self.properties.iter_mut() {
            if let (true, PropValue::Kernel(r)) = (k == "SENTENCE", v) {
                r.walk_mut(f);
            }
        }
        f(self);
    }
}

impl std::fmt::Display for Relationship {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.render(false))
    }
}
