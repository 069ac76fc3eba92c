//! Multi-valued comparison of terms and propositions.
//!
//! Every case table is evaluated top to bottom, first match wins. Each
//! verdict carries the id of the row that fired (`ter.N`, `un.N`, `bin.N`,
//! `prop.N`, `pre.*`) so explanations can cite it.

use std::collections::BTreeMap;

use serde::Serialize;

use super::outcome::{eta, sigma, sigma_prime, CmpOutcome};
use crate::fol::{Proposition, Term, TermProps};
use crate::kb::{ExpansionBudgetExceeded, ExpansionMode, KbRelation, KnowledgeBase};

use CmpOutcome::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub outcome: CmpOutcome,
    pub rule: &'static str,
}

fn v(outcome: CmpOutcome, rule: &'static str) -> Verdict {
    Verdict { outcome, rule }
}

/// Name comparison through the knowledge base; `ImplGen` means `y` implies `x`.
pub fn cmp_name(x: &str, y: &str, kb: &KnowledgeBase) -> CmpOutcome {
    if x == y {
        return Eq;
    }
    match kb.relation(x, y) {
        KbRelation::Equiv => Eq,
        KbRelation::Inconsistent => NEq,
        _ if kb.relation(y, x) == KbRelation::Implies => ImplGen,
        _ => Omega,
    }
}

fn spec_term(t: &Term) -> Option<Term> {
    t.specification.as_ref().map(|s| Term::func(s.clone()))
}

pub fn cmp_term(a: Option<&Term>, b: Option<&Term>, kb: &KnowledgeBase) -> Verdict {
    let (x, y) = match (a, b) {
        (None, None) => return v(Eq, "ter.1"),
        (Some(x), Some(y)) if x.same_shape(y) => return v(Eq, "ter.1"),
        (None, Some(_)) => return v(ImplNone, "ter.5"),
        (_, None) => return v(Omega, "ter.6"),
        (Some(x), Some(y)) => (x, y),
    };
    if x.negated != y.negated && x.positive().same_shape(&y.positive()) {
        return v(NEq, "ter.2");
    }
    if x.negated {
        return v(eta(cmp_term(Some(&x.positive()), Some(y), kb).outcome), "ter.3");
    }
    if y.negated {
        return v(eta(cmp_term(Some(x), Some(&y.positive()), kb).outcome), "ter.4");
    }
    if x.is_var() || y.is_var() {
        return v(Omega, "ter.6");
    }
    let n = cmp_name(&x.name, &y.name, kb);
    let s = cmp_term(spec_term(y).as_ref(), spec_term(x).as_ref(), kb).outcome;
    let c = cmp_term(y.cop.as_deref(), x.cop.as_deref(), kb).outcome;
    if n == Eq && s == Eq && c == Eq {
        return v(Eq, "ter.1");
    }
    let nc_flip = match &x.specification {
        Some(sp) => cmp_name(&y.name, sp, kb),
        None => Omega,
    };
    let n_flip = cmp_name(&y.name, &x.name, kb);
    let (a_all, b_all) = (x.is_all(), y.is_all());
    let b_spec = y.specification.is_some();
    if n == Omega && b_all && a_all && nc_flip == Eq && b_spec {
        return v(ImplDown, "ter.7");
    }
    if n == Omega && b_all && !a_all && nc_flip == Eq && b_spec {
        return v(ImplDown, "ter.8");
    }
    if n == Omega && b_all && !a_all && n_flip.is_impl() {
        return v(n_flip, "ter.9");
    }
    if n == Omega && !b_all && !a_all && n_flip == Eq {
        return v(ImplDown, "ter.10");
    }
    if n == Eq && s == c && (b_all == a_all || b_all) {
        return v(s, "ter.11");
    }
    if n == Eq && s == Eq && c == ImplNone {
        return v(ImplNspec, "ter.12");
    }
    if n == Eq && s == Eq {
        return v(c, "ter.13");
    }
    if n.is_impl() && s == Eq && c == Eq && !b_all && a_all {
        return v(n, "ter.14");
    }
    if n.is_impl() && s == Eq && c == NEq {
        return v(NEq, "ter.15");
    }
    if n.is_impl() && nc_flip == Eq && !b_spec && b_all {
        return v(ImplDown, "ter.16");
    }
    if n == NEq && s == Eq && c == Eq {
        return v(NEq, "ter.17");
    }
    v(Omega, "ter.18")
}

pub fn cmp_unary(p: &Proposition, q: &Proposition, kb: &KnowledgeBase) -> Verdict {
    if p.name != q.name {
        return v(Omega, "un.1");
    }
    let t = cmp_term(p.args.first(), q.args.first(), kb);
    v(t.outcome, "un.2")
}

pub fn cmp_binary(p: &Proposition, q: &Proposition, kb: &KnowledgeBase) -> Verdict {
    if p.name != q.name {
        return v(Omega, "bin.1");
    }
    let s = cmp_term(p.args.first(), q.args.first(), kb).outcome;
    let t = cmp_term(p.args.get(1), q.args.get(1), kb).outcome;
    if s == Omega || t == Omega {
        return v(Omega, "bin.1");
    }
    if s == NEq || t == NEq {
        return v(Omega, "bin.2");
    }
    if t == Eq {
        return v(s, "bin.5");
    }
    if s == Eq {
        return v(t, "bin.6");
    }
    v(sigma(&[s, t]), "bin.7")
}

fn cross(xs: &[Term], ys: &[Term], kb: &KnowledgeBase) -> CmpOutcome {
    let all: Vec<CmpOutcome> =
        xs.iter().flat_map(|a| ys.iter().map(move |b| cmp_term(Some(a), Some(b), kb).outcome)).collect();
    sigma(&all)
}

fn kappa(
    p: &TermProps,
    q: &TermProps,
    only_p: CmpOutcome,
    only_q: CmpOutcome,
    kb: &KnowledgeBase,
) -> BTreeMap<String, CmpOutcome> {
    let mut out = BTreeMap::new();
    for (k, xs) in p {
        let o = match q.get(k) {
            Some(ys) => cross(xs, ys, kb),
            None => only_p,
        };
        out.insert(k.clone(), o);
    }
    for k in q.keys() {
        out.entry(k.clone()).or_insert(only_q);
    }
    out
}

/// Per-key comparison from the first property map towards the second.
pub fn kappa_r(p: &TermProps, q: &TermProps, kb: &KnowledgeBase) -> BTreeMap<String, CmpOutcome> {
    kappa(p, q, Omega, ImplGen, kb)
}

/// Per-key comparison in the inverse direction.
pub fn kappa_i(p: &TermProps, q: &TermProps, kb: &KnowledgeBase) -> BTreeMap<String, CmpOutcome> {
    kappa(p, q, ImplGen, Omega, kb)
}

/// Proposition comparison without knowledge-base expansion.
pub fn cmp_prop_plain(a: &Proposition, b: &Proposition, kb: &KnowledgeBase) -> Verdict {
    if a.same_shape(b) {
        return v(Eq, "prop.1");
    }
    if a.negated != b.negated && a.positive().same_shape(&b.positive()) {
        return v(NEq, "prop.2");
    }
    if a.negated {
        return v(eta(cmp_prop_plain(&a.positive(), b, kb).outcome), "prop.3");
    }
    if b.negated {
        return v(eta(cmp_prop_plain(a, &b.positive(), kb).outcome), "prop.4");
    }
    if a.is_binary() != b.is_binary() {
        return v(Omega, "prop.9");
    }
    if !a.is_binary() && !a.args[0].same_shape(&b.args[0]) {
        return v(Omega, "prop.10");
    }
    let gamma = if a.is_binary() { cmp_binary(a, b, kb) } else { cmp_unary(a, b, kb) }.outcome;
    if gamma == Omega {
        return v(Omega, "prop.11");
    }
    let (sa, sb) = (&a.args[0], &b.args[0]);
    let f = cmp_term(Some(sa), Some(sb), kb).outcome;
    let c_eq = if sa.cop.is_some() || sb.cop.is_some() {
        cmp_term(sa.cop.as_deref(), sb.cop.as_deref(), kb).outcome == Eq
    } else {
        false
    };
    let kr = kappa_r(&a.properties, &b.properties, kb);
    let cod: Vec<CmpOutcome> = kr.values().copied().collect();
    let k = sigma_prime(&cod);
    let kr_flip: Vec<CmpOutcome> = kappa_r(&b.properties, &a.properties, kb).values().copied().collect();
    let k_flip = sigma_prime(&kr_flip);
    let in_cod = |o| cod.contains(&o);
    if gamma == Eq && f == Eq {
        if k.is_impl() && !c_eq {
            return v(k, "prop.12");
        }
        if k.is_impl() && c_eq && in_cod(Omega) {
            return v(Omega, "prop.13");
        }
        if k.is_impl() && c_eq && in_cod(ImplNspec) {
            return v(Omega, "prop.14");
        }
        if k == ImplDown || in_cod(ImplDown) {
            return v(k, "prop.15");
        }
        if k.is_impl() {
            return v(Omega, "prop.16");
        }
        if k_flip == ImplNspec {
            return v(ImplDown, "prop.17");
        }
        return v(k, "prop.18");
    }
    if gamma.is_impl() && k != Eq {
        if in_cod(Omega) {
            return v(Omega, "prop.19");
        }
        if k_flip == ImplNspec {
            return v(ImplDown, "prop.20");
        }
        return v(k, "prop.21");
    }
    if gamma == NEq && (k == Omega || k == NEq) {
        return v(Omega, "prop.22");
    }
    v(gamma, "prop.23")
}

/// A proposition with its entailing and equivalent expansions.
#[derive(Clone, Debug)]
pub struct Expanded {
    pub prop: Proposition,
    pub entailed: Vec<Proposition>,
    pub equivalent: Vec<Proposition>,
}

impl Expanded {
    pub fn new(prop: Proposition, kb: &KnowledgeBase) -> Result<Self, ExpansionBudgetExceeded> {
        let entailed = kb.expand(&prop, ExpansionMode::Entailing)?;
        let equivalent = kb.expand(&prop, ExpansionMode::Equivalent)?;
        Ok(Expanded { prop, entailed, equivalent })
    }

    fn derivable(&self) -> impl Iterator<Item = &Proposition> {
        std::iter::once(&self.prop).chain(&self.entailed).chain(&self.equivalent)
    }
}

fn negation_hit(from: &Expanded, other: &Proposition, kb: &KnowledgeBase) -> bool {
    from.derivable().filter(|x| x.negated).any(|x| {
        let o = cmp_prop_plain(&x.positive(), other, kb).outcome;
        o == Eq || o.is_impl()
    })
}

/// Full comparison: priority preamble, then the expanded cross-comparison.
pub fn cmp_prop(a: &Expanded, b: &Expanded, kb: &KnowledgeBase) -> Verdict {
    if a.prop.same_shape(&b.prop) || b.equivalent.iter().any(|x| x.same_shape(&a.prop)) {
        return v(Eq, "pre.eq");
    }
    if a.prop.negated != b.prop.negated && a.prop.positive().same_shape(&b.prop.positive()) {
        return v(NEq, "pre.neq");
    }
    if negation_hit(a, &b.prop, kb) || negation_hit(b, &a.prop, kb) {
        return v(NEq, "pre.neq");
    }
    let in_e = b.entailed.iter().any(|x| x.same_shape(&a.prop));
    let in_t = b.equivalent.iter().any(|x| x.same_shape(&a.prop));
    if in_e && !in_t {
        return v(ImplGen, "pre.impl");
    }
    let lhs: Vec<&Proposition> = std::iter::once(&a.prop).chain(&a.equivalent).collect();
    let rhs: Vec<&Proposition> = std::iter::once(&b.prop).chain(&b.entailed).collect();
    let mut outcomes = Vec::with_capacity(lhs.len() * rhs.len());
    let mut direct = None;
    for p in &lhs {
        for q in &rhs {
            let r = cmp_prop_plain(p, q, kb);
            if std::ptr::eq(*p, &a.prop) && std::ptr::eq(*q, &b.prop) {
                direct = Some(r.rule);
            }
            outcomes.push(r.outcome);
        }
    }
    let o = sigma(&outcomes);
    if outcomes.len() == 1 {
        return v(o, direct.unwrap_or("pre.sigma"));
    }
    v(o, "pre.sigma")
}

/// Convenience wrapper that expands both sides first.
pub fn compare_props(a: &Proposition, b: &Proposition, kb: &KnowledgeBase) -> Result<Verdict, ExpansionBudgetExceeded> {
    Ok(cmp_prop(&Expanded::new(a.clone(), kb)?, &Expanded::new(b.clone(), kb)?, kb))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kb0() -> KnowledgeBase {
        KnowledgeBase::default()
    }

    fn t(n: &str) -> Term {
        Term::func(n)
    }

    #[test]
    fn identical_terms_eq() {
        assert_eq!(cmp_term(Some(&t("foo")), Some(&t("foo")), &kb0()).outcome, Eq);
    }

    #[test]
    fn none_first_is_impl_none() {
        let r = cmp_term(None, Some(&t("foo")), &kb0());
        assert_eq!((r.outcome, r.rule), (ImplNone, "ter.5"));
    }

    #[test]
    fn explicit_term_negation() {
        assert_eq!(cmp_term(Some(&t("foo")), Some(&t("foo").negate()), &kb0()).outcome, NEq);
        assert_eq!(cmp_term(Some(&t("foo").negate()), Some(&t("foo")), &kb0()).outcome, NEq);
    }

    #[test]
    fn negated_argument_goes_through_eta() {
        let r = cmp_term(Some(&t("foo").negate()), Some(&t("bar")), &kb0());
        assert_eq!((r.outcome, r.rule), (Omega, "ter.3"));
    }

    #[test]
    fn variables() {
        assert_eq!(cmp_term(Some(&Term::var("?1")), Some(&Term::var("?2")), &kb0()).outcome, Eq);
        assert_eq!(cmp_term(Some(&Term::var("?1")), Some(&t("x")), &kb0()).outcome, Omega);
    }

    #[test]
    fn missing_copula_loses_specificity() {
        let a = t("vision");
        let b = t("vision").with_cop(t("clear"));
        let r = cmp_term(Some(&b), Some(&a), &kb0());
        assert_eq!((r.outcome, r.rule), (ImplNspec, "ter.12"));
        assert_eq!(cmp_term(Some(&a), Some(&b), &kb0()).outcome, Omega);
    }

    #[test]
    fn different_players_are_indifferent() {
        let p = Proposition::binary("play", t("Alice"), t("football"));
        let q = Proposition::binary("play", t("Bob"), t("football"));
        assert_eq!(cmp_binary(&p, &q, &kb0()).outcome, Omega);
        assert_eq!(compare_props(&p, &q, &kb0()).unwrap().outcome, Omega);
        assert_eq!(compare_props(&p, &p, &kb0()).unwrap().outcome, Eq);
    }

    #[test]
    fn swapped_roles_are_indifferent() {
        let p = Proposition::binary("eat", t("cat"), t("mouse"));
        let q = Proposition::binary("eat", t("mouse"), t("cat"));
        assert_eq!(cmp_binary(&p, &q, &kb0()).outcome, Omega);
    }

    #[test]
    fn explicit_negation_of_proposition() {
        let p = Proposition::unary("be", t("a"));
        assert_eq!(compare_props(&p, &p.clone().negate(), &kb0()).unwrap().outcome, NEq);
    }

    #[test]
    fn kappa_disjoint_keys() {
        let p: TermProps = [("A".to_string(), vec![t("x")])].into();
        let q: TermProps = [("B".to_string(), vec![t("y")])].into();
        let r = kappa_r(&p, &q, &kb0());
        assert_eq!(r["A"], Omega);
        assert_eq!(r["B"], ImplGen);
        let i = kappa_i(&p, &q, &kb0());
        assert_eq!(i["A"], ImplGen);
        assert_eq!(i["B"], Omega);
    }

    #[test]
    fn kappa_equal_and_inconsistent() {
        let p: TermProps = [("A".to_string(), vec![t("x")])].into();
        assert_eq!(kappa_r(&p, &p, &kb0())["A"], Eq);
        let q: TermProps = [("A".to_string(), vec![t("x").negate()])].into();
        assert_eq!(kappa_r(&p, &q, &kb0())["A"], sigma(&[NEq]));
    }

    #[test]
    fn extra_property_on_second_implies_first() {
        let a = Proposition::unary("flow", t("traffic")).with_prop("SPACE", t("Newcastle"));
        let b = a.clone().with_prop("TIME", t("Saturdays"));
        let r = cmp_prop_plain(&a, &b, &kb0());
        assert_eq!(r.outcome, Eq);
        let r = cmp_prop_plain(&b, &a, &kb0());
        assert_eq!(r.outcome, Omega);
    }
}
