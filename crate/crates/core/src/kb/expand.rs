use std::collections::VecDeque;

use thiserror::Error;

use super::{ExpansionMode, ExpansionRule, KnowledgeBase, EXPANSION_BOUND};
use crate::fol::{Proposition, Term, TermProps};

#[derive(Debug, Error, Clone, PartialEq)]
#[error("expansion of {seed} exceeded {bound} derived propositions")]
pub struct ExpansionBudgetExceeded {
    pub seed: String,
    pub bound: usize,
}

impl KnowledgeBase {
    /// Bounded fixpoint of rule and relation rewriting; never contains `p` itself.
    pub fn expand(&self, p: &Proposition, mode: ExpansionMode) -> Result<Vec<Proposition>, ExpansionBudgetExceeded> {
        let mut out: Vec<Proposition> = Vec::new();
        let mut queue = VecDeque::from([p.clone()]);
        while let Some(q) = queue.pop_front() {
            for next in self.step(&q, mode) {
                if next == *p || out.contains(&next) {
                    continue;
                }
                if out.len() == EXPANSION_BOUND {
                    return Err(ExpansionBudgetExceeded { seed: p.to_string(), bound: EXPANSION_BOUND });
                }
                out.push(next.clone());
                queue.push_back(next);
            }
        }
        Ok(out)
    }

    fn step(&self, p: &Proposition, mode: ExpansionMode) -> Vec<Proposition> {
        let mut out = Vec::new();
        for rule in self.expansions() {
            let usable = rule.mode == ExpansionMode::Equivalent || mode == ExpansionMode::Entailing;
            if !usable {
                continue;
            }
            out.extend(apply(rule, &rule.pattern, &rule.rewrite, p));
            if rule.mode == ExpansionMode::Equivalent {
                out.extend(apply(rule, &rule.rewrite, &rule.pattern, p));
            }
        }
        if !p.negated {
            for (i, arg) in p.args.iter().enumerate() {
                for t in self.substituted(arg, mode) {
                    let mut q = p.clone();
                    q.args[i] = t;
                    out.push(q);
                }
            }
            for (k, vals) in &p.properties {
                for (i, val) in vals.iter().enumerate() {
                    for t in self.substituted(val, mode) {
                        let mut q = p.clone();
                        q.properties.get_mut(k).expect("key present")[i] = t;
                        out.push(q);
                    }
                }
            }
        }
        out
    }

    fn substituted(&self, t: &Term, mode: ExpansionMode) -> Vec<Term> {
        if t.is_var() || t.negated {
            return Vec::new();
        }
        self.substitutions(&t.key(), mode)
            .into_iter()
            .map(|k| {
                let mut x = t.clone();
                match k.split_once(" [of] ") {
                    Some((n, s)) => {
                        x.name = n.to_string();
                        x.specification = Some(s.to_string());
                    }
                    None => {
                        x.name = k;
                        x.specification = None;
                    }
                }
                x
            })
            .collect()
    }
}

fn apply(
    rule: &ExpansionRule,
    from: &super::PropPattern,
    to: &super::PropPattern,
    p: &Proposition,
) -> Option<Proposition> {
    let env = from.matches(p, rule.exact)?;
    let carried: Option<TermProps> = rule.carry.then(|| {
        p.properties.iter().filter(|(k, _)| !from.props.contains_key(*k)).map(|(k, v)| (k.clone(), v.clone())).collect()
    });
    Some(to.instantiate(&env, carried.as_ref()))
}
