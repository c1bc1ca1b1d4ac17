use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::{CtlFormula, PathQuantifier, UnaryOp};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnknownToken(char),
    UnexpectedToken {
        found: String,
        expected: &'static str,
    },
    UnexpectedEnd {
        expected: &'static str,
    },
    TrailingInput(String),
}

/// Syntax error with the byte offset at which it was detected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::UnknownToken(c) => {
                write!(f, "unknown token {c:?} at position {}", self.position)
            }
            ParseErrorKind::UnexpectedToken { found, expected } => write!(
                f,
                "syntax error at position {}: expected {expected}, found {found:?}",
                self.position
            ),
            ParseErrorKind::UnexpectedEnd { expected } => write!(
                f,
                "syntax error at position {}: expected {expected}, found end of input",
                self.position
            ),
            ParseErrorKind::TrailingInput(found) => write!(
                f,
                "syntax error at position {}: unexpected trailing input {found:?}",
                self.position
            ),
        }
    }
}

impl core::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Ident(String),
    True,
    False,
    Temporal(UnaryOp),
    A,
    E,
    U,
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    LBracket,
    RBracket,
}

impl Token {
    fn text(&self) -> String {
        let s = match self {
            Token::Ident(s) => return s.clone(),
            Token::True => "true",
            Token::False => "false",
            Token::Temporal(op) => op.name(),
            Token::A => "A",
            Token::E => "E",
            Token::U => "U",
            Token::Not => "~",
            Token::And => "&",
            Token::Or => "|",
            Token::Implies => "->",
            Token::Iff => "<->",
            Token::LParen => "(",
            Token::RParen => ")",
            Token::LBracket => "[",
            Token::RBracket => "]",
        };
        String::from(s)
    }
}

fn keyword(word: &str) -> Option<Token> {
    Some(match word {
        "true" => Token::True,
        "false" => Token::False,
        "A" => Token::A,
        "E" => Token::E,
        "U" => Token::U,
        _ => {
            return UnaryOp::ALL
                .into_iter()
                .find(|op| op.name() == word)
                .map(Token::Temporal)
        }
    })
}

/// True when `name` can be used as a proposition.
pub fn is_valid_prop_name(name: &str) -> bool {
    !name.is_empty()
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && keyword(name).is_none()
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let token = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'~' => Token::Not,
            b'&' => Token::And,
            b'|' => Token::Or,
            b'(' => Token::LParen,
            b')' => Token::RParen,
            b'[' => Token::LBracket,
            b']' => Token::RBracket,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Token::Implies
            }
            b'<' if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') => {
                i += 2;
                Token::Iff
            }
            c if c.is_ascii_alphanumeric() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                tokens.push((
                    start,
                    keyword(word).unwrap_or_else(|| Token::Ident(word.into())),
                ));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('\u{fffd}');
                return Err(ParseError {
                    position: i,
                    kind: ParseErrorKind::UnknownToken(ch),
                });
            }
        };
        i += 1;
        tokens.push((start, token));
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn error(&self, expected: &'static str) -> ParseError {
        let kind = match self.peek() {
            Some(t) => ParseErrorKind::UnexpectedToken {
                found: t.text(),
                expected,
            },
            None => ParseErrorKind::UnexpectedEnd { expected },
        };
        ParseError {
            position: self.offset(),
            kind,
        }
    }

    fn eat(&mut self, token: &Token) -> bool {
        if self.peek() == Some(token) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: Token, expected: &'static str) -> Result<(), ParseError> {
        if self.eat(&token) {
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn iff(&mut self) -> Result<CtlFormula, ParseError> {
        let left = self.implies()?;
        if self.eat(&Token::Iff) {
            let right = self.iff()?;
            return Ok(CtlFormula::Iff(Box::new(left), Box::new(right)));
        }
        Ok(left)
    }

    fn implies(&mut self) -> Result<CtlFormula, ParseError> {
        let left = self.or()?;
        if self.eat(&Token::Implies) {
            let right = self.implies()?;
            return Ok(CtlFormula::Implies(Box::new(left), Box::new(right)));
        }
        Ok(left)
    }

    fn or(&mut self) -> Result<CtlFormula, ParseError> {
        let mut left = self.and()?;
        while self.eat(&Token::Or) {
            left = CtlFormula::Or(Box::new(left), Box::new(self.and()?));
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<CtlFormula, ParseError> {
        let mut left = self.unary()?;
        while self.eat(&Token::And) {
            left = CtlFormula::And(Box::new(left), Box::new(self.unary()?));
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<CtlFormula, ParseError> {
        match self.peek() {
            Some(Token::Not) => {
                self.pos += 1;
                Ok(CtlFormula::Not(Box::new(self.unary()?)))
            }
            Some(Token::Temporal(op)) => {
                let op = *op;
                self.pos += 1;
                Ok(CtlFormula::Temporal(op, Box::new(self.unary()?)))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<CtlFormula, ParseError> {
        const EXPECTED: &str = "a formula";
        let Some(token) = self.peek().cloned() else {
            return Err(self.error(EXPECTED));
        };
        match token {
            Token::True => {
                self.pos += 1;
                Ok(CtlFormula::True)
            }
            Token::False => {
                self.pos += 1;
                Ok(CtlFormula::False)
            }
            Token::Ident(name) => {
                self.pos += 1;
                Ok(CtlFormula::Prop(name))
            }
            Token::LParen => {
                self.pos += 1;
                let inner = self.iff()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            Token::A | Token::E => {
                self.pos += 1;
                let quantifier = if token == Token::A {
                    PathQuantifier::All
                } else {
                    PathQuantifier::Exists
                };
                self.expect(Token::LBracket, "`[` after path quantifier")?;
                let left = self.iff()?;
                self.expect(Token::U, "`U`")?;
                let right = self.iff()?;
                self.expect(Token::RBracket, "`]`")?;
                Ok(CtlFormula::Until(
                    quantifier,
                    Box::new(left),
                    Box::new(right),
                ))
            }
            _ => Err(self.error(EXPECTED)),
        }
    }
}

/// Parses the textual formula grammar.
///
/// Precedence from tightest to loosest: temporal prefixes and `~`, `&`, `|`,
/// `->`, `<->`. `&` and `|` associate to the left, the arrows to the right.
pub fn parse_formula(text: &str) -> Result<CtlFormula, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let formula = parser.iff()?;
    if let Some(t) = parser.peek() {
        return Err(ParseError {
            position: parser.offset(),
            kind: ParseErrorKind::TrailingInput(t.text()),
        });
    }
    Ok(formula)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn p(s: &str) -> CtlFormula {
        CtlFormula::prop(s)
    }

    #[test]
    fn grammar_examples() {
        assert_eq!(
            parse_formula("AX p & EX ~p").unwrap(),
            p("p").ax().and(p("p").not().ex())
        );
        assert_eq!(
            parse_formula("A[p U EF z]").unwrap(),
            p("p").au(p("z").ef())
        );
        let fig1 = p("p")
            .and(p("z").ef().not())
            .ag()
            .ex()
            .or(p("p").au(p("z").ef()).not());
        assert_eq!(
            parse_formula("EX(AG(p & ~(EF z))) | ~(A[p U (EF z)])").unwrap(),
            fig1
        );
    }

    #[test]
    fn precedence_and_associativity() {
        let f = parse_formula("a | b & c -> d <-> e").unwrap();
        let expected = p("a").or(p("b").and(p("c"))).implies(p("d")).iff(p("e"));
        assert_eq!(f, expected);
        assert_eq!(
            parse_formula("a -> b -> c").unwrap(),
            p("a").implies(p("b").implies(p("c")))
        );
        assert_eq!(
            parse_formula("a & b & c").unwrap(),
            p("a").and(p("b")).and(p("c"))
        );
        assert_eq!(parse_formula("~AX p").unwrap(), p("p").ax().not());
        assert_eq!(parse_formula("AX ~p").unwrap(), p("p").not().ax());
        assert_eq!(
            parse_formula("E[true U false]").unwrap(),
            CtlFormula::True.eu(CtlFormula::False)
        );
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_formula("p & ").unwrap_err();
        assert_eq!(err.position, 4);
        assert!(matches!(err.kind, ParseErrorKind::UnexpectedEnd { .. }));

        let err = parse_formula("p # q").unwrap_err();
        assert_eq!(
            err,
            ParseError {
                position: 2,
                kind: ParseErrorKind::UnknownToken('#')
            }
        );

        let err = parse_formula("A[p q]").unwrap_err();
        assert_eq!(err.position, 4);

        let err = parse_formula("p q").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::TrailingInput(_)));

        assert!(parse_formula("AX").is_err());
        assert!(parse_formula("(p").is_err());
        assert!(parse_formula("A p").is_err());
        assert!(!err.to_string().is_empty());
    }

    #[test]
    fn proposition_names() {
        assert!(is_valid_prop_name("tr_1_0"));
        assert!(is_valid_prop_name("9x"));
        assert!(!is_valid_prop_name("AX"));
        assert!(!is_valid_prop_name("U"));
        assert!(!is_valid_prop_name(""));
        assert!(!is_valid_prop_name("a-b"));
    }
}
