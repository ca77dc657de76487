use super::{Formula, Signature, Term};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    fn new(offset: usize, message: impl Into<String>) -> Self {
        ParseError { offset, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LBrack,
    RBrack,
    LParen,
    RParen,
    Comma,
    Not,
    And,
    Or,
    Implies,
    Quant { universal: bool, var: String },
    Eof,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::LBrack => "`[`".into(),
        Tok::RBrack => "`]`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Not => "`~`".into(),
        Tok::And => "`&`".into(),
        Tok::Or => "`|`".into(),
        Tok::Implies => "`->`".into(),
        Tok::Quant { universal, var } => {
            format!("quantifier `({}{var})`", if *universal { 'A' } else { 'E' })
        }
        Tok::Eof => "end of input".into(),
    }
}

fn ident_start(c: char) -> bool {
    c.is_ascii_alphabetic()
}

fn ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric()
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    let read_ident = |mut j: usize| -> (String, usize) {
        let mut s = String::new();
        while j < chars.len() && ident_char(chars[j].1) {
            s.push(chars[j].1);
            j += 1;
        }
        (s, j)
    };
    while i < chars.len() {
        let (off, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        match c {
            '~' | '∼' | '¬' => {
                out.push((Tok::Not, off));
                i += 1;
            }
            '&' | '∧' => {
                out.push((Tok::And, off));
                i += 1;
            }
            '|' | '∨' => {
                out.push((Tok::Or, off));
                i += 1;
            }
            '→' | '⟶' => {
                out.push((Tok::Implies, off));
                i += 1;
            }
            '-' => {
                if i + 1 < chars.len() && chars[i + 1].1 == '>' {
                    out.push((Tok::Implies, off));
                    i += 2;
                } else {
                    return Err(ParseError::new(off, "expected `->`"));
                }
            }
            '[' => {
                out.push((Tok::LBrack, off));
                i += 1;
            }
            ']' => {
                out.push((Tok::RBrack, off));
                i += 1;
            }
            ',' => {
                out.push((Tok::Comma, off));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, off));
                i += 1;
            }
            '∀' | '∃' => {
                let (var, j) = read_ident(i + 1);
                if var.is_empty() || !ident_start(var.chars().next().unwrap()) {
                    return Err(ParseError::new(off, "quantifier without a variable"));
                }
                out.push((Tok::Quant { universal: c == '∀', var }, off));
                i = j;
            }
            '(' => {
                // `(Ax)`, `(Ev11)`, `(∀x)`: a quantifier prefix rather than a group.
                if let Some(&(_, q)) = chars.get(i + 1) {
                    if matches!(q, 'A' | 'E' | '∀' | '∃') {
                        let (var, j) = read_ident(i + 2);
                        if !var.is_empty()
                            && ident_start(var.chars().next().unwrap())
                            && chars.get(j).map(|p| p.1) == Some(')')
                        {
                            out.push((Tok::Quant { universal: matches!(q, 'A' | '∀'), var }, off));
                            i = j + 1;
                            continue;
                        }
                    }
                }
                out.push((Tok::LParen, off));
                i += 1;
            }
            c if ident_start(c) => {
                let (s, j) = read_ident(i);
                out.push((Tok::Ident(s), off));
                i = j;
            }
            other => return Err(ParseError::new(off, format!("unexpected character `{other}`"))),
        }
    }
    out.push((Tok::Eof, src.len()));
    Ok(out)
}

struct Parser<'s> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    sig: &'s Signature,
}

impl<'s> Parser<'s> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let idx = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[idx].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(ParseError::new(
                self.offset(),
                format!("expected {}, found {}", describe(&want), describe(self.peek())),
            ))
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            Tok::RBrack | Tok::RParen => {
                Err(ParseError::new(self.offset(), "unbalanced closing bracket"))
            }
            t => Err(ParseError::new(self.offset(), format!("unexpected {}", describe(t)))),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.conjunction()?;
            acc = Formula::or(acc, rhs);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            acc = Formula::and(acc, rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Quant { universal, var } => {
                self.bump();
                let body = self.unary()?;
                Ok(if universal { Formula::forall(var, body) } else { Formula::exists(var, body) })
            }
            _ => self.primary(),
        }
    }

    fn is_function(&self, t: &Tok) -> bool {
        matches!(t, Tok::Ident(name) if self.sig.function(name).is_some())
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        let off = self.offset();
        match self.peek().clone() {
            Tok::LBrack => {
                if self.is_function(self.peek_at(1)) {
                    return Err(ParseError::new(off, "function term where a formula was expected"));
                }
                self.bump();
                let f = self.formula()?;
                self.close(Tok::RBrack, off)?;
                Ok(f)
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.close(Tok::RParen, off)?;
                Ok(f)
            }
            Tok::Ident(name) => {
                let Some((pred, arity)) = self.sig.predicate(&name) else {
                    return Err(ParseError::new(off, format!("unknown predicate `{name}`")));
                };
                self.bump();
                let args = if *self.peek() == Tok::LParen {
                    self.call_args()?
                } else {
                    let mut args = Vec::with_capacity(arity);
                    for _ in 0..arity {
                        if !matches!(self.peek(), Tok::Ident(_) | Tok::LBrack) {
                            return Err(ParseError::new(
                                self.offset(),
                                format!("arity mismatch: `{pred}` takes {arity} arguments, found {}", args.len()),
                            ));
                        }
                        args.push(self.term()?);
                    }
                    args
                };
                if args.len() != arity {
                    return Err(ParseError::new(
                        off,
                        format!("arity mismatch: `{pred}` takes {arity} arguments, found {}", args.len()),
                    ));
                }
                Ok(Formula::Atom(pred, args))
            }
            t => Err(ParseError::new(off, format!("expected a formula, found {}", describe(&t)))),
        }
    }

    fn close(&mut self, want: Tok, open_at: usize) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else if *self.peek() == Tok::Eof {
            Err(ParseError::new(open_at, "unbalanced bracket: not closed"))
        } else {
            Err(ParseError::new(
                self.offset(),
                format!("expected {}, found {}", describe(&want), describe(self.peek())),
            ))
        }
    }

    /// `( t1, t2, ... )`
    fn call_args(&mut self) -> Result<Vec<Term>, ParseError> {
        let open = self.offset();
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                args.push(self.term()?);
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.close(Tok::RParen, open)?;
        Ok(args)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let off = self.offset();
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                if let Some((fname, arity)) = self.sig.function(&name) {
                    if *self.peek() != Tok::LParen {
                        return Err(ParseError::new(off, format!("function symbol `{fname}` used as a variable")));
                    }
                    let args = self.call_args()?;
                    if args.len() != arity {
                        return Err(ParseError::new(
                            off,
                            format!("arity mismatch: `{fname}` takes {arity} arguments, found {}", args.len()),
                        ));
                    }
                    return Ok(Term::App(fname, args));
                }
                if *self.peek() == Tok::LParen {
                    return Err(ParseError::new(off, format!("unknown function symbol `{name}`")));
                }
                Ok(Term::Var(name))
            }
            Tok::LBrack => {
                self.bump();
                let head_off = self.offset();
                let Tok::Ident(name) = self.peek().clone() else {
                    return Err(ParseError::new(head_off, "expected a function symbol after `[`"));
                };
                let Some((fname, arity)) = self.sig.function(&name) else {
                    return Err(ParseError::new(head_off, format!("unknown function symbol `{name}`")));
                };
                self.bump();
                let mut args = Vec::with_capacity(arity);
                while matches!(self.peek(), Tok::Ident(_) | Tok::LBrack) {
                    args.push(self.term()?);
                }
                if args.len() != arity {
                    return Err(ParseError::new(
                        head_off,
                        format!("arity mismatch: `{fname}` takes {arity} arguments, found {}", args.len()),
                    ));
                }
                self.close(Tok::RBrack, off)?;
                Ok(Term::App(fname, args))
            }
            t => Err(ParseError::new(off, format!("expected a term, found {}", describe(&t)))),
        }
    }
}

/// Parse a formula over the geometry signature.
pub fn parse_formula(src: &str) -> Result<Formula, ParseError> {
    parse_formula_with(src, &Signature::geometry())
}

pub fn parse_formula_with(src: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let mut p = Parser { toks: lex(src)?, pos: 0, sig };
    let f = p.formula()?;
    p.expect_eof()?;
    Ok(f)
}

/// Parse a term: a variable, `[fn args]`, or `fn(args)`.
pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    parse_term_with(src, &Signature::geometry())
}

pub fn parse_term_with(src: &str, sig: &Signature) -> Result<Term, ParseError> {
    let mut p = Parser { toks: lex(src)?, pos: 0, sig };
    let t = p.term()?;
    p.expect_eof()?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Term {
        Term::var(n)
    }

    fn u(a: Term, b: Term) -> Formula {
        Formula::undir(a, b)
    }

    #[test]
    fn terms() {
        assert_eq!(parse_term("v1").unwrap(), v("v1"));
        assert_eq!(parse_term("[rev v2]").unwrap(), Term::rev(v("v2")));
        assert_eq!(
            parse_term("[rev [rev [rev v3]]]").unwrap(),
            Term::rev(Term::rev(Term::rev(v("v3"))))
        );
        assert_eq!(parse_term("rev(rev(v3))").unwrap(), Term::rev(Term::rev(v("v3"))));
        assert_eq!(parse_term("[rev[rev v3]]").unwrap(), Term::rev(Term::rev(v("v3"))));
    }

    #[test]
    fn term_errors_carry_offsets() {
        let e = parse_term("[foo v1]").unwrap_err();
        assert_eq!(e.offset, 1);
        assert!(e.message.contains("unknown function"));
        let e = parse_term("[rev v1 v2]").unwrap_err();
        assert!(e.message.contains("arity"), "{e}");
        let e = parse_term("[rev v1").unwrap_err();
        assert_eq!(e.offset, 0);
        assert!(e.message.contains("unbalanced"));
        let e = parse_term("[rev v1]]").unwrap_err();
        assert_eq!(e.offset, 8);
    }

    #[test]
    fn axiom_i5() {
        let f = parse_formula("(Ax)~UNDIR x x").unwrap();
        assert_eq!(f, Formula::forall("x", Formula::not(u(v("x"), v("x")))));
    }

    #[test]
    fn axiom_i6() {
        let f = parse_formula("(Ax)(Ay)[UNDIR x y -> (Az)[UNDIR x z | UNDIR y z]]").unwrap();
        let expected = Formula::forall(
            "x",
            Formula::forall(
                "y",
                Formula::implies(
                    u(v("x"), v("y")),
                    Formula::forall("z", Formula::or(u(v("x"), v("z")), u(v("y"), v("z")))),
                ),
            ),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn and_binds_tighter_than_or() {
        let f = parse_formula("UNDIR v1 v3 & UNDIR v1 [rev v3] | UNDIR v2 v3").unwrap();
        let expected = Formula::or(
            Formula::and(u(v("v1"), v("v3")), u(v("v1"), Term::rev(v("v3")))),
            u(v("v2"), v("v3")),
        );
        assert_eq!(f, expected);
        let g = parse_formula("UNDIR a b & UNDIR b c | UNDIR c d & UNDIR d a").unwrap();
        assert!(matches!(g, Formula::Or(ref l, ref r) if matches!(**l, Formula::And(..)) && matches!(**r, Formula::And(..))));
    }

    #[test]
    fn implication_is_loosest_and_right_associative() {
        let f = parse_formula("UNDIR a b -> UNDIR b c -> UNDIR c a | UNDIR a a").unwrap();
        let Formula::Implies(_, rhs) = f else { panic!() };
        let Formula::Implies(_, inner) = *rhs else { panic!() };
        assert!(matches!(*inner, Formula::Or(..)));
    }

    #[test]
    fn quantifier_scope_is_tight() {
        let f = parse_formula("(Ev11)UNDIR v11 v11 | UNDIR v3 [rev v2]").unwrap();
        assert!(matches!(f, Formula::Or(ref l, _) if matches!(**l, Formula::Exists(..))));
    }

    #[test]
    fn unicode_and_call_notation_aliases() {
        let a = parse_formula("(∀x)∼Undir(x,x)").unwrap();
        let b = parse_formula("(Ax)~UNDIR x x").unwrap();
        assert_eq!(a, b);
        let c = parse_formula("Undir(l,m) → Undir(l,n) ∨ Undir(m,rev(n))").unwrap();
        let d = parse_formula("UNDIR l m -> UNDIR l n | UNDIR m [rev n]").unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn bracket_disambiguation() {
        let e = parse_formula("[rev x]").unwrap_err();
        assert!(e.message.contains("function term"));
        assert!(parse_formula("[UNDIR x y]").is_ok());
    }

    #[test]
    fn formula_errors() {
        assert!(parse_formula("UNDIR x").unwrap_err().message.contains("arity"));
        assert!(parse_formula("FOO x y").unwrap_err().message.contains("unknown predicate"));
        assert!(parse_formula("[UNDIR x y").unwrap_err().message.contains("unbalanced"));
        assert!(parse_formula("UNDIR x y]").unwrap_err().message.contains("unbalanced"));
        assert_eq!(parse_formula("UNDIR x $").unwrap_err().offset, 8);
        assert!(parse_formula("UNDIR rev y").unwrap_err().message.contains("used as a variable"));
    }
}
