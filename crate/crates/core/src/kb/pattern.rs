//! Proposition patterns and templates for expansion rules.
//!
//! A term pattern is either a string or an object:
//!
//! * `"$X"` binds (or must equal) the whole term;
//! * `"?"` matches any variable; in a template it makes a fresh variable;
//! * any other string matches a non-variable term with that name and no specification;
//! * `{"name": .., "spec": .., "props": {"K": [..]}}` matches piecewise. `name` and
//!   `spec` are literals or `$V` text bindings; a `spec` key requires a specification;
//!   each listed property value must occur under its key.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::fol::{Proposition, Term, TermProps};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TermPattern {
    Atom(String),
    Object(TermShape),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermShape {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub props: BTreeMap<String, Vec<TermPattern>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropPattern {
    pub name: String,
    pub args: Vec<TermPattern>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub props: BTreeMap<String, TermPattern>,
    #[serde(default)]
    pub negated: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Binding {
    Term(Term),
    Text(String),
}

impl Binding {
    fn text(&self) -> String {
        match self {
            Binding::Term(t) => t.key(),
            Binding::Text(s) => s.clone(),
        }
    }
}

pub(crate) type Env = HashMap<String, Binding>;

fn is_var_name(s: &str) -> bool {
    s.len() > 1 && s.starts_with('$')
}

impl TermPattern {
    fn variables(&self, out: &mut BTreeSet<String>) {
        match self {
            TermPattern::Atom(s) if is_var_name(s) => {
                out.insert(s.clone());
            }
            TermPattern::Atom(_) => {}
            TermPattern::Object(o) => {
                for s in o.name.iter().chain(o.spec.iter()) {
                    if is_var_name(s) {
                        out.insert(s.clone());
                    }
                }
                for ps in o.props.values() {
                    ps.iter().for_each(|p| p.variables(out));
                }
            }
        }
    }

    pub(crate) fn matches(&self, t: &Term, env: &mut Env) -> bool {
        match self {
            TermPattern::Atom(s) if s == "?" => t.is_var(),
            TermPattern::Atom(s) if is_var_name(s) => bind(env, s, Binding::Term(t.clone())),
            TermPattern::Atom(s) => !t.is_var() && !t.negated && t.name == *s && t.specification.is_none(),
            TermPattern::Object(o) => {
                if t.is_var() || t.negated {
                    return false;
                }
                if let Some(n) = &o.name {
                    if !text_matches(n, &t.name, env) {
                        return false;
                    }
                }
                if let Some(sp) = &o.spec {
                    match &t.specification {
                        Some(v) if text_matches(sp, v, env) => {}
                        _ => return false,
                    }
                }
                o.props.iter().all(|(k, pats)| {
                    let Some(vals) = t.properties.get(k) else { return false };
                    pats.iter().all(|p| vals.iter().any(|v| p.matches(v, &mut env.clone())))
                })
            }
        }
    }

    pub(crate) fn instantiate(&self, env: &Env, fresh: &mut usize) -> Term {
        match self {
            TermPattern::Atom(s) if s == "?" => {
                *fresh += 1;
                Term::var(format!("?x{fresh}"))
            }
            TermPattern::Atom(s) if is_var_name(s) => match env.get(s) {
                Some(Binding::Term(t)) => t.clone(),
                Some(Binding::Text(x)) => Term::func(x.clone()),
                None => Term::func(s.clone()),
            },
            TermPattern::Atom(s) => Term::func(s.clone()),
            TermPattern::Object(o) => {
                let mut t = match o.name.as_deref() {
                    Some(n) if is_var_name(n) => match env.get(n) {
                        Some(Binding::Term(t)) => t.clone(),
                        Some(Binding::Text(x)) => Term::func(x.clone()),
                        None => Term::func(n),
                    },
                    Some(n) => Term::func(n),
                    None => Term::var("?"),
                };
                if let Some(sp) = &o.spec {
                    t.specification = Some(if is_var_name(sp) {
                        env.get(sp).map(Binding::text).unwrap_or_else(|| sp.clone())
                    } else {
                        sp.clone()
                    });
                }
                for (k, vs) in &o.props {
                    for v in vs {
                        let x = v.instantiate(env, fresh);
                        t.properties.entry(k.clone()).or_default().push(x);
                    }
                }
                t
            }
        }
    }
}

fn bind(env: &mut Env, var: &str, b: Binding) -> bool {
    match env.get(var) {
        Some(existing) => match (existing, &b) {
            (Binding::Term(x), Binding::Term(y)) => x == y,
            _ => existing.text() == b.text(),
        },
        None => {
            env.insert(var.to_string(), b);
            true
        }
    }
}

fn text_matches(pat: &str, value: &str, env: &mut Env) -> bool {
    if is_var_name(pat) {
        bind(env, pat, Binding::Text(value.to_string()))
    } else {
        pat == value
    }
}

impl PropPattern {
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.args.iter().for_each(|a| a.variables(&mut out));
        self.props.values().for_each(|p| p.variables(&mut out));
        out
    }

    /// Binds the pattern against `p`; `exact` demands the same property keys, one value each.
    pub(crate) fn matches(&self, p: &Proposition, exact: bool) -> Option<Env> {
        if p.name != self.name || p.args.len() != self.args.len() || p.negated != self.negated {
            return None;
        }
        if exact
            && (p.properties.len() != self.props.len()
                || p.properties.iter().any(|(k, v)| v.len() != 1 || !self.props.contains_key(k)))
        {
            return None;
        }
        let mut env = Env::new();
        for (pat, t) in self.args.iter().zip(&p.args) {
            if !pat.matches(t, &mut env) {
                return None;
            }
        }
        for (k, pat) in &self.props {
            let vals = p.properties.get(k)?;
            let hit = vals.iter().find_map(|v| {
                let mut e = env.clone();
                pat.matches(v, &mut e).then_some(e)
            })?;
            env = hit;
        }
        Some(env)
    }

    /// Builds the rewrite; `carried` are source properties the pattern did not consume.
    pub(crate) fn instantiate(&self, env: &Env, carried: Option<&TermProps>) -> Proposition {
        let mut fresh = 0;
        let args = self.args.iter().map(|a| a.instantiate(env, &mut fresh)).collect();
        let mut properties = TermProps::new();
        if let Some(c) = carried {
            properties.extend(c.iter().map(|(k, v)| (k.clone(), v.clone())));
        }
        for (k, v) in &self.props {
            let t = v.instantiate(env, &mut fresh);
            properties.entry(k.clone()).or_default().push(t);
        }
        Proposition { name: self.name.clone(), args, properties, negated: self.negated }
    }
}
