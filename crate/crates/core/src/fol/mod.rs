//! Extended first-order logic: terms with quantity marks, specifications,
//! copulae and properties; unary/binary propositions; formulas.

mod convert;
mod render;
pub mod syntax;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use convert::{term, to_fol, FolError};
pub use render::{render, render_prop, render_term};

/// Property multimap with canonical (sorted) key order.
pub type TermProps = BTreeMap<String, Vec<Term>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TermKind {
    Var,
    Func,
}

/// `◇` (some) or `□` (all).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Quantity {
    #[default]
    Some,
    All,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Term {
    pub kind: TermKind,
    pub quantity: Quantity,
    pub name: String,
    pub specification: Option<String>,
    pub cop: Option<Box<Term>>,
    pub properties: TermProps,
    pub negated: bool,
}

impl Term {
    pub fn func(name: impl Into<String>) -> Self {
        Term {
            kind: TermKind::Func,
            quantity: Quantity::Some,
            name: name.into(),
            specification: None,
            cop: None,
            properties: TermProps::new(),
            negated: false,
        }
    }

    pub fn var(name: impl Into<String>) -> Self {
        Term { kind: TermKind::Var, ..Term::func(name) }
    }

    pub fn with_spec(mut self, spec: impl Into<String>) -> Self {
        self.specification = Some(spec.into());
        self
    }

    pub fn with_cop(mut self, cop: Term) -> Self {
        self.cop = Some(Box::new(cop));
        self
    }

    pub fn with_prop(mut self, key: impl Into<String>, value: Term) -> Self {
        self.properties.entry(key.into()).or_default().push(value);
        self
    }

    pub fn all(mut self) -> Self {
        self.quantity = Quantity::All;
        self
    }

    pub fn negate(mut self) -> Self {
        self.negated = !self.negated;
        self
    }

    pub fn is_var(&self) -> bool {
        self.kind == TermKind::Var
    }

    pub fn is_all(&self) -> bool {
        self.quantity == Quantity::All
    }

    /// The positive counterpart of a negated term.
    pub fn positive(&self) -> Term {
        Term { negated: false, ..self.clone() }
    }

    /// `name` or `name [of] spec`; the key used by semantic relations.
    pub fn key(&self) -> String {
        match &self.specification {
            Some(s) => format!("{} [of] {}", self.name, s),
            None => self.name.clone(),
        }
    }

    /// Structural equality where any variable matches any variable.
    pub fn same_shape(&self, other: &Term) -> bool {
        if self.kind != other.kind || self.negated != other.negated {
            return false;
        }
        if self.kind == TermKind::Var {
            return cop_shape(&self.cop, &other.cop) && props_shape(&self.properties, &other.properties);
        }
        self.quantity == other.quantity
            && self.name == other.name
            && self.specification == other.specification
            && cop_shape(&self.cop, &other.cop)
            && props_shape(&self.properties, &other.properties)
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        if self.is_var() && !out.contains(&self.name) {
            out.push(self.name.clone());
        }
        if let Some(c) = &self.cop {
            c.collect_vars(out);
        }
        for ts in self.properties.values() {
            for t in ts {
                t.collect_vars(out);
            }
        }
    }

    fn rename_var(&mut self, from: &str, to: &str) {
        if self.is_var() && self.name == from {
            self.name = to.to_string();
        }
        if let Some(c) = &mut self.cop {
            c.rename_var(from, to);
        }
        for ts in self.properties.values_mut() {
            for t in ts {
                t.rename_var(from, to);
            }
        }
    }
}

fn cop_shape(a: &Option<Box<Term>>, b: &Option<Box<Term>>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => x.same_shape(y),
        _ => false,
    }
}

fn props_shape(a: &TermProps, b: &TermProps) -> bool {
    a.len() == b.len()
        && a.iter().zip(b.iter()).all(|((ka, va), (kb, vb))| {
            ka == kb && va.len() == vb.len() && va.iter().zip(vb).all(|(x, y)| x.same_shape(y))
        })
}

/// `u_p(t)` or `b_p(t, t')`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Proposition {
    pub name: String,
    pub args: Vec<Term>,
    pub properties: TermProps,
    /// Only produced by knowledge-base expansion; formulas negate with [`Formula::Not`].
    pub negated: bool,
}

impl Proposition {
    pub fn unary(name: impl Into<String>, arg: Term) -> Self {
        Proposition { name: name.into(), args: vec![arg], properties: TermProps::new(), negated: false }
    }

    pub fn binary(name: impl Into<String>, src: Term, dst: Term) -> Self {
        Proposition { name: name.into(), args: vec![src, dst], properties: TermProps::new(), negated: false }
    }

    pub fn with_prop(mut self, key: impl Into<String>, value: Term) -> Self {
        self.properties.entry(key.into()).or_default().push(value);
        self
    }

    pub fn negate(mut self) -> Self {
        self.negated = !self.negated;
        self
    }

    pub fn positive(&self) -> Proposition {
        Proposition { negated: false, ..self.clone() }
    }

    pub fn is_binary(&self) -> bool {
        self.args.len() == 2
    }

    pub fn same_shape(&self, other: &Proposition) -> bool {
        self.name == other.name
            && self.negated == other.negated
            && self.args.len() == other.args.len()
            && self.args.iter().zip(&other.args).all(|(a, b)| a.same_shape(b))
            && props_shape(&self.properties, &other.properties)
    }

    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        for t in &self.args {
            t.collect_vars(&mut out);
        }
        for ts in self.properties.values() {
            for t in ts {
                t.collect_vars(&mut out);
            }
        }
        out
    }

    fn rename_var(&mut self, from: &str, to: &str) {
        for t in &mut self.args {
            t.rename_var(from, to);
        }
        for ts in self.properties.values_mut() {
            for t in ts {
                t.rename_var(from, to);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formula {
    Atom(Proposition),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    /// Conjunction that collapses singleton lists.
    pub fn and(mut fs: Vec<Formula>) -> Formula {
        if fs.len() == 1 {
            fs.pop().unwrap()
        } else {
            Formula::And(fs)
        }
    }

    pub fn or(mut fs: Vec<Formula>) -> Formula {
        if fs.len() == 1 {
            fs.pop().unwrap()
        } else {
            Formula::Or(fs)
        }
    }

    /// Distinct atoms in first-occurrence order.
    pub fn atoms(&self) -> Vec<Proposition> {
        let mut out: Vec<Proposition> = Vec::new();
        self.visit_atoms(&mut |p| {
            if !out.contains(p) {
                out.push(p.clone());
            }
        });
        out
    }

    fn visit_atoms(&self, f: &mut impl FnMut(&Proposition)) {
        match self {
            Formula::Atom(p) => f(p),
            Formula::Not(x) | Formula::Exists(_, x) => x.visit_atoms(f),
            Formula::And(xs) | Formula::Or(xs) => xs.iter().for_each(|x| x.visit_atoms(f)),
        }
    }

    /// Boolean valuation given the truth value of each atom.
    pub fn eval(&self, truth: &impl Fn(&Proposition) -> bool) -> bool {
        match self {
            Formula::Atom(p) => truth(p),
            Formula::Not(x) => !x.eval(truth),
            Formula::And(xs) => xs.iter().all(|x| x.eval(truth)),
            Formula::Or(xs) => xs.iter().any(|x| x.eval(truth)),
            Formula::Exists(_, x) => x.eval(truth),
        }
    }

    pub fn free_vars(&self) -> Vec<String> {
        fn go(f: &Formula, bound: &mut Vec<String>, out: &mut Vec<String>) {
            match f {
                Formula::Atom(p) => {
                    for v in p.vars() {
                        if !bound.contains(&v) && !out.contains(&v) {
                            out.push(v);
                        }
                    }
                }
                Formula::Not(x) => go(x, bound, out),
                Formula::And(xs) | Formula::Or(xs) => xs.iter().for_each(|x| go(x, bound, out)),
                Formula::Exists(v, x) => {
                    bound.push(v.clone());
                    go(x, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Bound variable names in binder order.
    pub fn binders(&self) -> Vec<String> {
        let mut out = Vec::new();
        fn go(f: &Formula, out: &mut Vec<String>) {
            match f {
                Formula::Atom(_) => {}
                Formula::Not(x) => go(x, out),
                Formula::And(xs) | Formula::Or(xs) => xs.iter().for_each(|x| go(x, out)),
                Formula::Exists(v, x) => {
                    out.push(v.clone());
                    go(x, out);
                }
            }
        }
        go(self, &mut out);
        out
    }

    /// Renames a variable everywhere, binders included.
    pub fn rename_var(&mut self, from: &str, to: &str) {
        match self {
            Formula::Atom(p) => p.rename_var(from, to),
            Formula::Not(x) => x.rename_var(from, to),
            Formula::And(xs) | Formula::Or(xs) => xs.iter_mut().for_each(|x| x.rename_var(from, to)),
            Formula::Exists(v, x) => {
                if v == from {
                    *v = to.to_string();
                }
                x.rename_var(from, to);
            }
        }
    }

    /// Closes the formula by binding every free variable at top scope.
    pub fn close(self) -> Formula {
        let mut f = self;
        for v in f.free_vars().into_iter().rev() {
            f = Formula::Exists(v, Box::new(f));
        }
        f
    }
}

impl std::fmt::Display for Formula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&render(self))
    }
}

impl std::fmt::Display for Proposition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&render_prop(self))
    }
}

impl std::fmt::Display for Term {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&render_term(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_shape_ignores_variable_names() {
        let a = Proposition::binary("close", Term::var("?1"), Term::func("x"));
        let b = Proposition::binary("close", Term::var("?7"), Term::func("x"));
        assert!(a.same_shape(&b));
        assert_ne!(a, b);
    }

    #[test]
    fn close_binds_free_variables_in_order() {
        let f = Formula::And(vec![
            Formula::Atom(Proposition::unary("a", Term::var("?1"))),
            Formula::Atom(Proposition::unary("b", Term::var("?2"))),
        ]);
        let c = f.close();
        assert_eq!(c.binders(), vec!["?1".to_string(), "?2".to_string()]);
        assert!(c.free_vars().is_empty());
    }
}
