//! Recursive-descent parser for the presentation grammar:
//!
//! ```text
//! presentation := "<" gen_list "|" rel_list ">"
//! gen_list     := ident ("," ident)*
//! rel_list     := (rel ("," rel)*)?
//! rel          := term ("*" term)*
//! term         := ident ("^" signed_int)? | "(" rel ")" ("^" signed_int)?
//! ```
//!
//! Whitespace is insignificant. A relator written as a single `R^n` with
//! `n >= 1` is a torsion relator; when every relator has that shape the
//! parser returns a [`TorsionPresentation`].

use super::word::{Letter, Word};
use super::{Presentation, PresentationError, TorsionPresentation};
use thiserror::Error;

/// Guard against pathological exponents blowing up word storage.
const MAX_RELATOR_LENGTH: usize = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn new(pos: (usize, usize), message: impl Into<String>) -> Self {
        ParseError {
            line: pos.0,
            column: pos.1,
            message: message.into(),
        }
    }
}

/// Output of [`parse_presentation`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Parsed {
    Plain(Presentation),
    Torsion(TorsionPresentation),
}

impl Parsed {
    pub fn presentation(&self) -> &Presentation {
        match self {
            Parsed::Plain(p) => p,
            Parsed::Torsion(t) => t.base(),
        }
    }

    pub fn into_presentation(self) -> Presentation {
        match self {
            Parsed::Plain(p) => p,
            Parsed::Torsion(t) => t.base().clone(),
        }
    }

    pub fn torsion(&self) -> Option<&TorsionPresentation> {
        match self {
            Parsed::Torsion(t) => Some(t),
            Parsed::Plain(_) => None,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Token {
    Sym(char),
    Ident(String),
    Int(i64),
}

#[derive(Clone, Debug)]
struct Spanned {
    token: Token,
    pos: (usize, usize),
}

fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut column = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let pos = (line, column);
        match c {
            '\n' => {
                chars.next();
                line += 1;
                column = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                column += 1;
            }
            '<' | '>' | '|' | ',' | '*' | '^' | '(' | ')' => {
                chars.next();
                column += 1;
                out.push(Spanned {
                    token: Token::Sym(c),
                    pos,
                });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut ident = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        ident.push(c);
                        chars.next();
                        column += 1;
                    } else {
                        break;
                    }
                }
                out.push(Spanned {
                    token: Token::Ident(ident),
                    pos,
                });
            }
            c if c.is_ascii_digit() || c == '-' || c == '+' => {
                let mut digits = String::new();
                digits.push(c);
                chars.next();
                column += 1;
                if (c == '-' || c == '+') && !chars.peek().is_some_and(|d| d.is_ascii_digit()) {
                    return Err(ParseError::new(pos, format!("expected digits after `{c}`")));
                }
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        digits.push(d);
                        chars.next();
                        column += 1;
                    } else {
                        break;
                    }
                }
                let value: i64 = digits
                    .parse()
                    .map_err(|_| ParseError::new(pos, format!("integer `{digits}` out of range")))?;
                out.push(Spanned {
                    token: Token::Int(value),
                    pos,
                });
            }
            other => {
                return Err(ParseError::new(pos, format!("unexpected character `{other}`")));
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [Spanned],
    at: usize,
    names: Vec<String>,
}

/// A relator as parsed, before word flattening.
struct RelAst {
    terms: Vec<TermAst>,
}

struct TermAst {
    base: BaseAst,
    exponent: Option<i64>,
    pos: (usize, usize),
}

enum BaseAst {
    Gen(usize),
    Group(RelAst),
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Spanned> {
        self.tokens.get(self.at)
    }

    fn end_pos(&self) -> (usize, usize) {
        self.tokens.last().map(|t| t.pos).unwrap_or((1, 1))
    }

    fn next(&mut self) -> Option<&Spanned> {
        let t = self.tokens.get(self.at);
        self.at += 1;
        t
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        match self.next() {
            Some(Spanned {
                token: Token::Sym(s),
                ..
            }) if *s == c => Ok(()),
            Some(t) => Err(ParseError::new(t.pos, format!("expected `{c}`"))),
            None => Err(ParseError::new(self.end_pos(), format!("expected `{c}`, found end of input"))),
        }
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if matches!(self.peek(), Some(Spanned { token: Token::Sym(s), .. }) if *s == c) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn parse_gen_list(&mut self) -> Result<(), ParseError> {
        loop {
            match self.next().cloned() {
                Some(Spanned {
                    token: Token::Ident(name),
                    pos,
                }) => {
                    if self.names.contains(&name) {
                        return Err(ParseError::new(pos, format!("duplicate generator name `{name}`")));
                    }
                    self.names.push(name);
                }
                Some(t) => return Err(ParseError::new(t.pos, "expected generator name")),
                None => {
                    return Err(ParseError::new(self.end_pos(), "expected generator name, found end of input"))
                }
            }
            if !self.eat_sym(',') {
                return Ok(());
            }
        }
    }

    fn parse_rel(&mut self) -> Result<RelAst, ParseError> {
        let mut terms = vec![self.parse_term()?];
        while self.eat_sym('*') {
            terms.push(self.parse_term()?);
        }
        Ok(RelAst { terms })
    }

    fn parse_term(&mut self) -> Result<TermAst, ParseError> {
        let spanned = self
            .next()
            .cloned()
            .ok_or_else(|| ParseError::new(self.end_pos(), "expected relator term, found end of input"))?;
        let base = match &spanned.token {
            Token::Ident(name) => {
                let idx = self
                    .names
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| ParseError::new(spanned.pos, format!("unknown generator `{name}`")))?;
                BaseAst::Gen(idx)
            }
            Token::Sym('(') => {
                let inner = self.parse_rel()?;
                self.expect_sym(')')?;
                BaseAst::Group(inner)
            }
            _ => return Err(ParseError::new(spanned.pos, "expected generator or `(`")),
        };
        let exponent = if self.eat_sym('^') {
            match self.next() {
                Some(Spanned {
                    token: Token::Int(n),
                    ..
                }) => Some(*n),
                Some(t) => return Err(ParseError::new(t.pos, "expected integer exponent")),
                None => {
                    return Err(ParseError::new(self.end_pos(), "expected integer exponent, found end of input"))
                }
            }
        } else {
            None
        };
        Ok(TermAst {
            base,
            exponent,
            pos: spanned.pos,
        })
    }
}

fn rel_to_word(rel: &RelAst, rank: usize) -> Result<Word, ParseError> {
    let mut out = Word::identity(rank);
    for term in &rel.terms {
        let base = match &term.base {
            BaseAst::Gen(idx) => Word::from_letters(rank, [Letter::new(*idx, false)]),
            BaseAst::Group(inner) => rel_to_word(inner, rank)?,
        };
        let exp = term.exponent.unwrap_or(1);
        let grown = base.len().saturating_mul(exp.unsigned_abs() as usize);
        if out.len().saturating_add(grown) > MAX_RELATOR_LENGTH {
            return Err(ParseError::new(term.pos, "relator exceeds maximum length"));
        }
        out = out.mul(&base.pow(exp));
    }
    Ok(out)
}

/// Parses a full presentation, detecting the torsion form `R^n`.
pub fn parse_presentation(text: &str) -> Result<Parsed, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens: &tokens,
        at: 0,
        names: Vec::new(),
    };
    parser.expect_sym('<')?;
    parser.parse_gen_list()?;
    parser.expect_sym('|')?;
    let mut rels: Vec<(RelAst, (usize, usize))> = Vec::new();
    if !matches!(parser.peek(), Some(Spanned { token: Token::Sym('>'), .. })) {
        loop {
            let pos = parser.peek().map(|t| t.pos).unwrap_or(parser.end_pos());
            rels.push((parser.parse_rel()?, pos));
            if !parser.eat_sym(',') {
                break;
            }
        }
    }
    parser.expect_sym('>')?;
    if let Some(t) = parser.peek() {
        return Err(ParseError::new(t.pos, "unexpected trailing input"));
    }

    let rank = parser.names.len();
    let names = parser.names.clone();

    // Torsion form: every relator is a single explicit power R^n, n >= 1.
    let torsion_shape = !rels.is_empty()
        && rels.iter().all(|(r, _)| {
            r.terms.len() == 1 && matches!(r.terms[0].exponent, Some(n) if n >= 1)
        });

    let lift = |e: PresentationError, pos: (usize, usize)| ParseError::new(pos, e.to_string());

    if torsion_shape {
        let mut pairs = Vec::with_capacity(rels.len());
        for (r, pos) in &rels {
            let term = &r.terms[0];
            let root = match &term.base {
                BaseAst::Gen(idx) => Word::from_letters(rank, [Letter::new(*idx, false)]),
                BaseAst::Group(inner) => rel_to_word(inner, rank)?,
            };
            if root.is_identity() {
                return Err(ParseError::new(*pos, "relator is empty after free reduction"));
            }
            let exp = term.exponent.unwrap();
            if root.len().saturating_mul(exp as usize) > MAX_RELATOR_LENGTH {
                return Err(ParseError::new(term.pos, "relator exceeds maximum length"));
            }
            pairs.push((root, exp));
        }
        let first_pos = rels.first().map(|(_, p)| *p).unwrap_or((1, 1));
        let tp = TorsionPresentation::new(names, pairs).map_err(|e| lift(e, first_pos))?;
        Ok(Parsed::Torsion(tp))
    } else {
        let mut words = Vec::with_capacity(rels.len());
        for (r, pos) in &rels {
            let w = rel_to_word(r, rank)?;
            if w.is_identity() {
                return Err(ParseError::new(*pos, "relator is empty after free reduction"));
            }
            words.push(w);
        }
        let first_pos = rels.first().map(|(_, p)| *p).unwrap_or((1, 1));
        let p = Presentation::new(names, words).map_err(|e| lift(e, first_pos))?;
        Ok(Parsed::Plain(p))
    }
}

/// Parses a single word in the `rel` grammar over the given generators.
pub fn parse_word(text: &str, names: &[String]) -> Result<Word, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens: &tokens,
        at: 0,
        names: names.to_vec(),
    };
    let rel = parser.parse_rel()?;
    if let Some(t) = parser.peek() {
        return Err(ParseError::new(t.pos, "unexpected trailing input"));
    }
    rel_to_word(&rel, names.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_torsion_presentation() {
        let parsed = parse_presentation("< a, b | a^2, b^3 >").unwrap();
        let tp = parsed.torsion().expect("torsion form");
        assert_eq!(tp.rank(), 2);
        let p = tp.base();
        assert_eq!(p.relators().len(), 2);
        assert_eq!(p.relators()[0].len(), 2); // aa
        assert_eq!(p.relators()[1].len(), 3); // bbb
    }

    #[test]
    fn parses_free_presentation_as_plain() {
        let parsed = parse_presentation("< x | >").unwrap();
        assert!(parsed.torsion().is_none());
        let p = parsed.presentation();
        assert_eq!(p.rank(), 1);
        assert!(p.relators().is_empty());
    }

    #[test]
    fn parses_kropholler_thurston() {
        let parsed = parse_presentation("< y, z | z*y*z*y^-2, y*z*y*z^-6 >").unwrap();
        assert!(parsed.torsion().is_none());
        let p = parsed.presentation();
        assert_eq!(p.rank(), 2);
        assert_eq!(p.relators()[0].len(), 5);
        assert_eq!(p.relators()[1].len(), 9);
    }

    #[test]
    fn parses_parenthesized_powers() {
        let parsed = parse_presentation("< x1, x2 | x1^2, x2^2, (x1*x2)^3 >").unwrap();
        let tp = parsed.torsion().expect("torsion form");
        let exps: Vec<u64> = tp.torsion_relators().iter().map(|r| r.1).collect();
        assert_eq!(exps, vec![2, 2, 3]);
        assert_eq!(tp.base().relators()[2].len(), 6);
    }

    #[test]
    fn reports_position_of_unknown_generator() {
        let err = parse_presentation("< a |\n b >").unwrap_err();
        assert_eq!((err.line, err.column), (2, 2));
        assert!(err.message.contains("unknown generator"));
    }

    #[test]
    fn rejects_duplicate_generator() {
        let err = parse_presentation("< a, a | >").unwrap_err();
        assert!(err.message.contains("duplicate"));
    }

    #[test]
    fn rejects_relator_collapsing_to_identity() {
        let err = parse_presentation("< a | a*a^-1 >").unwrap_err();
        assert!(err.message.contains("empty"));
    }

    #[test]
    fn mixed_relators_are_plain() {
        let parsed = parse_presentation("< a, b | a^2, a*b >").unwrap();
        assert!(parsed.torsion().is_none());
    }

    #[test]
    fn parse_word_roundtrip() {
        let names: Vec<String> = vec!["a".into(), "b".into()];
        let w = parse_word("a*b^-2*(a*b)^2", &names).unwrap();
        assert_eq!(w.format_with(&names), "a*b^-2*a*b*a*b");
    }

    #[test]
    fn presentation_text_roundtrips() {
        for text in [
            "< a, b | a^2, b^3 >",
            "< y, z | z*y*z*y^-2, y*z*y*z^-6 >",
            "< x1, x2, x3 | x1^2, x2^2, x3^2, (x1*x2)^3, (x1*x3)^5 >",
            "< x1, x2 | >",
        ] {
            let p = parse_presentation(text).unwrap().into_presentation();
            let again = parse_presentation(&p.to_text()).unwrap().into_presentation();
            assert_eq!(p, again);
        }
    }
}
