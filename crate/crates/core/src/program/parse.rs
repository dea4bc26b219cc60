use super::{Program, Rule, Signature, WeakConstraint};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Ident(String),
    Not,
    Pipe,
    Comma,
    Dot,
    If,
    WeakIf,
    Eof,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Ident(name) => format!("atom `{name}`"),
            Token::Not => "`not`".into(),
            Token::Pipe => "`|`".into(),
            Token::Comma => "`,`".into(),
            Token::Dot => "`.`".into(),
            Token::If => "`:-`".into(),
            Token::WeakIf => "`:~`".into(),
            Token::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    column: usize,
}

fn syntax(pos: Pos, message: impl Into<String>) -> Error {
    Error::Syntax {
        line: pos.line,
        column: pos.column,
        message: message.into(),
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column,
        }
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '%' {
                while let Some(&c) = self.chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn next_token(&mut self) -> Result<(Token, Pos)> {
        self.skip_trivia();
        let pos = self.pos();
        let Some(c) = self.bump() else {
            return Ok((Token::Eof, pos));
        };
        let token = match c {
            '|' => Token::Pipe,
            ',' => Token::Comma,
            '.' => Token::Dot,
            ':' => match self.bump() {
                Some('-') => Token::If,
                Some('~') => Token::WeakIf,
                _ => return Err(syntax(pos, "expected `:-` or `:~`")),
            },
            '[' => return Err(syntax(pos, "weight annotations on weak constraints are not supported")),
            c if c.is_ascii_lowercase() => {
                let mut name = String::from(c);
                while let Some(&c) = self.chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        name.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                if name == "not" {
                    Token::Not
                } else {
                    Token::Ident(name)
                }
            }
            c if c.is_ascii_uppercase() || c == '_' => {
                return Err(syntax(pos, "variables are not supported; programs must be ground"))
            }
            c => return Err(syntax(pos, format!("unexpected character `{c}`"))),
        };
        Ok((token, pos))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    current: Token,
    pos: Pos,
}

/// A body literal before interning.
struct Literal {
    negated: bool,
    name: String,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Result<Self> {
        let mut lexer = Lexer::new(text);
        let (current, pos) = lexer.next_token()?;
        Ok(Parser { lexer, current, pos })
    }

    fn advance(&mut self) -> Result<Token> {
        let (next, pos) = self.lexer.next_token()?;
        self.pos = pos;
        Ok(std::mem::replace(&mut self.current, next))
    }

    fn expect(&mut self, expected: Token) -> Result<()> {
        if self.current == expected {
            self.advance()?;
            Ok(())
        } else {
            Err(self.unexpected(&expected.describe()))
        }
    }

    fn unexpected(&self, wanted: &str) -> Error {
        syntax(self.pos, format!("expected {wanted}, found {}", self.current.describe()))
    }

    fn atom(&mut self) -> Result<String> {
        match &self.current {
            Token::Ident(_) => match self.advance()? {
                Token::Ident(name) => Ok(name),
                _ => unreachable!(),
            },
            _ => Err(self.unexpected("an atom")),
        }
    }

    fn body(&mut self) -> Result<Vec<Literal>> {
        let mut body = Vec::new();
        loop {
            let negated = if self.current == Token::Not {
                self.advance()?;
                true
            } else {
                false
            };
            body.push(Literal {
                negated,
                name: self.atom()?,
            });
            if self.current == Token::Comma {
                self.advance()?;
            } else {
                return Ok(body);
            }
        }
    }

    fn statement(&mut self, program: &mut Program) -> Result<()> {
        let start = self.pos;
        match self.current {
            Token::WeakIf => {
                self.advance()?;
                let body = self.body()?;
                self.expect(Token::Dot)?;
                let pos_names: Vec<&str> = body.iter().filter(|l| !l.negated).map(|l| l.name.as_str()).collect();
                let neg_names: Vec<&str> = body.iter().filter(|l| l.negated).map(|l| l.name.as_str()).collect();
                if pos_names.iter().any(|p| neg_names.contains(p)) {
                    // never violated
                    return Ok(());
                }
                let sig = program.signature_mut();
                let ids: Vec<_> = body.iter().map(|l| (l.negated, sig.intern(&l.name))).collect();
                let weak = WeakConstraint::new(
                    ids.iter().filter(|(n, _)| !n).map(|&(_, id)| id),
                    ids.iter().filter(|(n, _)| *n).map(|&(_, id)| id),
                )
                .expect("overlap checked above");
                program.push_weak(weak);
                Ok(())
            }
            _ => {
                let mut head = Vec::new();
                if matches!(self.current, Token::Ident(_)) {
                    head.push(self.atom()?);
                    while self.current == Token::Pipe {
                        self.advance()?;
                        head.push(self.atom()?);
                    }
                }
                let body = if self.current == Token::If {
                    self.advance()?;
                    self.body()?
                } else if head.is_empty() {
                    return Err(self.unexpected("an atom, `:-` or `:~`"));
                } else {
                    Vec::new()
                };
                if self.current != Token::Dot {
                    let wanted = if body.is_empty() { "`|`, `:-` or `.`" } else { "`,` or `.`" };
                    return Err(self.unexpected(wanted));
                }
                self.advance()?;
                if head.is_empty() && body.is_empty() {
                    return Err(syntax(start, "a rule needs a head or a body"));
                }
                let sig = program.signature_mut();
                let head: Vec<_> = head.iter().map(|h| sig.intern(h)).collect();
                let body: Vec<_> = body.iter().map(|l| (l.negated, sig.intern(&l.name))).collect();
                program.push_rule(Rule::new(
                    head,
                    body.iter().filter(|(n, _)| !n).map(|&(_, id)| id),
                    body.iter().filter(|(n, _)| *n).map(|&(_, id)| id),
                ));
                Ok(())
            }
        }
    }
}

/// Parses a ground program. Atom ids follow first occurrence in the text.
///
/// ```
/// let p = paracoherent::program::parse("a | b. c :- a, not b. :- c.").unwrap();
/// assert_eq!(p.rules().len(), 3);
/// assert_eq!(p.signature().len(), 3);
/// ```
pub fn parse(text: &str) -> Result<Program> {
    let mut parser = Parser::new(text)?;
    let mut program = Program::new(Signature::new());
    while parser.current != Token::Eof {
        parser.statement(&mut program)?;
    }
    Ok(program)
}
