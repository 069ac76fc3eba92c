use super::{Formula, Proposition, Quantity, Term, TermProps};

pub fn render_term(t: &Term) -> String {
    let mut s = String::new();
    if t.negated {
        s.push('¬');
    }
    s.push(match t.quantity {
        Quantity::Some => '◇',
        Quantity::All => '□',
    });
    match &t.specification {
        Some(spec) => s.push_str(&format!("[{} [of] {}]", t.name, spec)),
        None => s.push_str(&t.name),
    }
    if let Some(c) = &t.cop {
        s.push_str("^{");
        s.push_str(&render_term(c));
        s.push('}');
    }
    s.push_str(&render_props(&t.properties));
    s
}

fn render_props(p: &TermProps) -> String {
    if p.is_empty() {
        return String::new();
    }
    let items: Vec<String> =
        p.iter().flat_map(|(k, vs)| vs.iter().map(move |v| format!("{}: {}", k, render_term(v)))).collect();
    format!("_{{{}}}", items.join(", "))
}

pub fn render_prop(p: &Proposition) -> String {
    let args: Vec<String> = p.args.iter().map(render_term).collect();
    format!("{}{}{}({})", if p.negated { "¬" } else { "" }, p.name, render_props(&p.properties), args.join(", "))
}

/// Canonical text form; [`super::syntax::parse`] inverts it.
pub fn render(f: &Formula) -> String {
    match f {
        Formula::Atom(p) => render_prop(p),
        Formula::Not(x) => match x.as_ref() {
            Formula::And(_) | Formula::Or(_) => format!("¬{}", render(x)),
            _ => format!("¬({})", render(x)),
        },
        Formula::And(xs) => join(xs, " ∧ "),
        Formula::Or(xs) => join(xs, " ∨ "),
        Formula::Exists(v, x) => format!("∃{}. {}", v, render(x)),
    }
}

fn join(xs: &[Formula], op: &str) -> String {
    let parts: Vec<String> = xs
        .iter()
        .map(|x| match x {
            Formula::Exists(..) => format!("({})", render(x)),
            _ => render(x),
        })
        .collect();
    format!("({})", parts.join(op))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn specification_renders_with_of() {
        let t = Term::func("Newcastle").with_spec("city centre");
        assert_eq!(render_term(&t), "◇[Newcastle [of] city centre]");
    }

    #[test]
    fn bare_function_term() {
        assert_eq!(render_term(&Term::func("foo")), "◇foo");
    }

    #[test]
    fn property_keys_sorted() {
        let p = Proposition::unary("flow", Term::func("traffic"))
            .with_prop("TIME", Term::func("Saturdays"))
            .with_prop("SPACE", Term::func("Newcastle").with_spec("city centre"));
        assert_eq!(render_prop(&p), "flow_{SPACE: ◇[Newcastle [of] city centre], TIME: ◇Saturdays}(◇traffic)");
    }

    #[test]
    fn negated_atom_keeps_parentheses() {
        let f = Formula::And(vec![
            Formula::not(Formula::Atom(Proposition::binary("be", Term::func("music"), Term::func("classical")))),
            Formula::Atom(Proposition::unary("be", Term::func("music"))),
        ]);
        assert_eq!(render(&f), "(¬(be(◇music, ◇classical)) ∧ be(◇music))");
    }
}
