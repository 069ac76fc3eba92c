//! Recursive-descent parser for the canonical formula rendering.
//!
//! ```text
//! formula := '∃' VAR '. ' formula | '¬' '(' formula ')' | '¬' group | group | atom
//! group   := '(' formula (OP formula)* ')'          OP := ' ∧ ' | ' ∨ '
//! atom    := ['¬'] NAME [props] '(' term [', ' term] ')'
//! term    := ['¬'] ('◇'|'□') (NAME | '[' NAME ' [of] ' NAME ']') ['^{' term '}'] [props]
//! props   := '_{' KEY ': ' term (', ' KEY ': ' term)* '}'
//! ```

use thiserror::Error;

use super::{Formula, Proposition, Quantity, Term, TermKind, TermProps};

#[derive(Debug, Error, PartialEq)]
#[error("formula syntax error at char {pos}: {msg}")]
pub struct SyntaxError {
    pub pos: usize,
    pub msg: String,
}

pub fn parse(input: &str) -> Result<Formula, SyntaxError> {
    let mut p = Parser { s: input.chars().collect(), i: 0 };
    let f = p.formula()?;
    p.ws();
    if p.i != p.s.len() {
        return p.err("trailing input");
    }
    Ok(f)
}

pub fn parse_term(input: &str) -> Result<Term, SyntaxError> {
    let mut p = Parser { s: input.chars().collect(), i: 0 };
    let t = p.term()?;
    if p.i != p.s.len() {
        return p.err("trailing input");
    }
    Ok(t)
}

struct Parser {
    s: Vec<char>,
    i: usize,
}

impl Parser {
    fn err<T>(&self, msg: &str) -> Result<T, SyntaxError> {
        Err(SyntaxError { pos: self.i, msg: msg.to_string() })
    }

    fn peek(&self) -> Option<char> {
        self.s.get(self.i).copied()
    }

    fn peek_at(&self, k: usize) -> Option<char> {
        self.s.get(self.i + k).copied()
    }

    fn ws(&mut self) {
        while self.peek() == Some(' ') {
            self.i += 1;
        }
    }

    fn eat(&mut self, lit: &str) -> bool {
        let cs: Vec<char> = lit.chars().collect();
        if self.s[self.i..].starts_with(&cs) {
            self.i += cs.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, lit: &str) -> Result<(), SyntaxError> {
        if self.eat(lit) {
            Ok(())
        } else {
            self.err(&format!("expected '{lit}'"))
        }
    }

    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        self.ws();
        match self.peek() {
            Some('∃') => {
                self.i += 1;
                let v = self.until(|c, _| c == '.');
                self.expect(".")?;
                let body = self.formula()?;
                Ok(Formula::Exists(v, Box::new(body)))
            }
            Some('¬') if self.peek_at(1) == Some('(') => {
                self.i += 1;
                let inner = self.group()?;
                Ok(Formula::not(inner))
            }
            Some('(') => self.group(),
            Some(_) => Ok(Formula::Atom(self.atom()?)),
            None => self.err("unexpected end of input"),
        }
    }

    /// `( f )` yields `f`; `( f op f ... )` yields the connective.
    fn group(&mut self) -> Result<Formula, SyntaxError> {
        self.expect("(")?;
        let mut items = vec![self.formula()?];
        let mut op: Option<char> = None;
        loop {
            self.ws();
            match self.peek() {
                Some(')') => {
                    self.i += 1;
                    break;
                }
                Some(c @ ('∧' | '∨')) => {
                    if op.is_some_and(|o| o != c) {
                        return self.err("mixed connectives need parentheses");
                    }
                    op = Some(c);
                    self.i += 1;
                    items.push(self.formula()?);
                }
                _ => return self.err("expected connective or ')'"),
            }
        }
        Ok(match op {
            None => items.pop().unwrap(),
            Some('∧') => Formula::And(items),
            Some(_) => Formula::Or(items),
        })
    }

    fn until(&mut self, stop: impl Fn(char, Option<char>) -> bool) -> String {
        let start = self.i;
        while let Some(c) = self.peek() {
            if stop(c, self.peek_at(1)) {
                break;
            }
            self.i += 1;
        }
        self.s[start..self.i].iter().collect()
    }

    fn atom(&mut self) -> Result<Proposition, SyntaxError> {
        let negated = self.eat("¬");
        let name = self.until(|c, n| c == '(' || (c == '_' && n == Some('{')));
        if name.is_empty() {
            return self.err("expected proposition name");
        }
        let properties = self.props()?;
        self.expect("(")?;
        let mut args = vec![self.term()?];
        if self.eat(", ") {
            args.push(self.term()?);
        }
        self.expect(")")?;
        Ok(Proposition { name, args, properties, negated })
    }

    fn props(&mut self) -> Result<TermProps, SyntaxError> {
        let mut out = TermProps::new();
        if !self.eat("_{") {
            return Ok(out);
        }
        loop {
            let key = self.until(|c, _| c == ':');
            self.expect(": ")?;
            let t = self.term()?;
            out.entry(key).or_default().push(t);
            if self.eat("}") {
                break;
            }
            self.expect(", ")?;
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<Term, SyntaxError> {
        let negated = self.eat("¬");
        let quantity = if self.eat("◇") {
            Quantity::Some
        } else if self.eat("□") {
            Quantity::All
        } else {
            return self.err("expected '◇' or '□'");
        };
        let (name, specification) = if self.eat("[") {
            let name = self.until(|c, _| c == '[').trim_end().to_string();
            self.expect("[of] ")?;
            let spec = self.until(|c, _| c == ']');
            self.expect("]")?;
            (name, Some(spec))
        } else {
            let name = self.until(|c, n| matches!(c, '^' | ',' | ')' | '}') || (c == '_' && n == Some('{')));
            (name, None)
        };
        if name.is_empty() {
            return self.err("expected term name");
        }
        let cop = if self.eat("^{") {
            let c = self.term()?;
            self.expect("}")?;
            Some(Box::new(c))
        } else {
            None
        };
        let properties = self.props()?;
        let kind = if name.starts_with('?') { TermKind::Var } else { TermKind::Func };
        Ok(Term { kind, quantity, name, specification, cop, properties, negated })
    }
}

#[cfg(test)]
mod tests {
    use super::super::render;
    use super::*;

    #[test]
    fn parses_existential_with_properties() {
        let s = "∃?1. make_{JJ: ◇angry}(◇?1, ◇you)";
        let f = parse(s).unwrap();
        assert_eq!(render(&f), s);
        assert_eq!(f.binders(), vec!["?1".to_string()]);
    }

    #[test]
    fn parses_specification_and_cop() {
        let s = "(to answer(◇?1^{◇able}, ◇questions_{JJ: ◇more}) ∧ become(◇?1^{◇able}))";
        let f = parse(s).unwrap();
        assert_eq!(render(&f), s);
        let t = parse_term("□[Newcastle [of] city centre]").unwrap();
        assert_eq!(t.specification.as_deref(), Some("city centre"));
        assert!(t.is_all());
    }

    #[test]
    fn rejects_mixed_connectives() {
        assert!(parse("(a(◇x) ∧ b(◇x) ∨ c(◇x))").is_err());
    }

    #[test]
    fn negation_forms() {
        for s in ["¬(be(◇music, ◇classical))", "¬(a(◇x) ∨ b(◇x))", "¬have(◇N, ◇t)", "¬(¬(a(◇x)))"]
        {
            assert_eq!(render(&parse(s).unwrap()), s);
        }
    }
}
