//! Recursive-descent parser producing an untyped item tree. Semantic
//! interpretation of items and fields lives in `check`.

use super::diagnostic::{Diagnostic, DiagnosticKind, Position};
use super::lexer::{Token, TokenKind};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum ValueKind {
    Str(String),
    Number(f64),
    Ident(String),
    List(Vec<Value>),
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Value {
    pub kind: ValueKind,
    pub pos: Position,
}

impl Value {
    pub fn describe(&self) -> &'static str {
        match self.kind {
            ValueKind::Str(_) => "string",
            ValueKind::Number(_) => "number",
            ValueKind::Ident(_) => "identifier",
            ValueKind::List(_) => "list",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Field {
    pub name: String,
    pub pos: Position,
    pub value: Value,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Body {
    Block(Vec<Field>),
    Assign(Value),
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Item {
    pub keyword: String,
    pub pos: Position,
    /// Name after the keyword: identifier or string.
    pub label: Option<(String, Position)>,
    pub body: Body,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct RawDocument {
    pub name: String,
    pub items: Vec<Item>,
}

#[derive(Clone, Copy, PartialEq)]
enum Shape {
    /// `keyword label { ... }`
    LabelledBlock,
    /// `keyword { ... }`
    Block,
    /// `keyword STRING`
    Label,
    /// `keyword = value`
    Assign,
}

fn item_shape(keyword: &str) -> Option<Shape> {
    Some(match keyword {
        "protected_attribute" | "favorable_outcome" | "metric" | "model" => Shape::LabelledBlock,
        "decision" | "composition" => Shape::Block,
        "approved_source" => Shape::Label,
        "on_violation" => Shape::Assign,
        _ => return None,
    })
}

pub(crate) const ITEM_KEYWORDS: &[&str] = &[
    "protected_attribute",
    "favorable_outcome",
    "metric",
    "approved_source",
    "model",
    "composition",
    "decision",
    "on_violation",
];

const MAX_LIST_DEPTH: usize = 32;

struct Parser<'t> {
    tokens: &'t [Token],
    idx: usize,
    depth: usize,
}

type PResult<T> = Result<T, Diagnostic>;

fn syntax(pos: Position, msg: impl Into<String>) -> Diagnostic {
    Diagnostic::new(DiagnosticKind::Syntax, pos, msg)
}

impl<'t> Parser<'t> {
    fn peek(&self) -> &'t Token {
        &self.tokens[self.idx]
    }

    fn bump(&mut self) -> &'t Token {
        let t = &self.tokens[self.idx];
        if t.kind != TokenKind::Eof {
            self.idx += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> Diagnostic {
        let t = self.peek();
        syntax(
            t.pos,
            format!("expected {expected}, found {}", t.kind.describe()),
        )
    }

    fn expect(&mut self, kind: TokenKind, expected: &str) -> PResult<&'t Token> {
        if self.peek().kind == kind {
            Ok(self.bump())
        } else {
            Err(self.unexpected(expected))
        }
    }

    /// Closing delimiter; at end of input report the opener's location.
    fn expect_close(&mut self, kind: TokenKind, open: &str, open_pos: Position) -> PResult<()> {
        let t = self.peek();
        if t.kind == kind {
            self.bump();
            Ok(())
        } else if t.kind == TokenKind::Eof {
            Err(syntax(
                t.pos,
                format!("unclosed `{open}` opened at {open_pos}; reached end of input"),
            ))
        } else {
            Err(self.unexpected(&format!("`{}`", if open == "{" { "}" } else { "]" })))
        }
    }

    /// Items end at `;` (consumed), before `}`, or at a line break.
    fn terminator(&mut self) -> PResult<()> {
        let t = self.peek();
        match t.kind {
            TokenKind::Semi => {
                self.bump();
                Ok(())
            }
            TokenKind::RBrace | TokenKind::Eof => Ok(()),
            _ if t.newline_before => Ok(()),
            _ => Err(syntax(
                t.pos,
                format!(
                    "expected `;` or a line break after item, found {}",
                    t.kind.describe()
                ),
            )),
        }
    }

    fn document(&mut self) -> PResult<RawDocument> {
        match &self.peek().kind {
            TokenKind::Ident(k) if k == "policy" => {
                self.bump();
            }
            _ => return Err(self.unexpected("`policy`")),
        }
        let name = match &self.peek().kind {
            TokenKind::Str(s) => {
                self.bump();
                s.clone()
            }
            _ => return Err(self.unexpected("policy name string")),
        };
        let open = self.expect(TokenKind::LBrace, "`{`")?.pos;
        let mut items = Vec::new();
        loop {
            match &self.peek().kind {
                TokenKind::RBrace | TokenKind::Eof => break,
                TokenKind::Semi => {
                    self.bump();
                }
                _ => {
                    items.push(self.item()?);
                    self.terminator()?;
                }
            }
        }
        self.expect_close(TokenKind::RBrace, "{", open)?;
        if self.peek().kind != TokenKind::Eof {
            return Err(self.unexpected("end of input after policy"));
        }
        Ok(RawDocument { name, items })
    }

    fn item(&mut self) -> PResult<Item> {
        let t = self.peek();
        let keyword = match &t.kind {
            TokenKind::Ident(k) => k.clone(),
            _ => return Err(self.unexpected("an item keyword or `}`")),
        };
        let Some(shape) = item_shape(&keyword) else {
            return Err(syntax(
                t.pos,
                format!(
                    "unknown item `{keyword}` (expected one of: {})",
                    ITEM_KEYWORDS.join(", ")
                ),
            ));
        };
        let pos = t.pos;
        self.bump();
        let label = match shape {
            Shape::LabelledBlock | Shape::Label => {
                let t = self.peek();
                match &t.kind {
                    TokenKind::Ident(s) | TokenKind::Str(s) => {
                        self.bump();
                        Some((s.clone(), t.pos))
                    }
                    _ => {
                        let what = if shape == Shape::Label {
                            "a string"
                        } else {
                            "a name"
                        };
                        return Err(self.unexpected(&format!("{what} after `{keyword}`")));
                    }
                }
            }
            _ => None,
        };
        let body = match shape {
            Shape::LabelledBlock | Shape::Block => Body::Block(self.block()?),
            Shape::Label => Body::Empty,
            Shape::Assign => {
                self.expect(TokenKind::Eq, "`=`")?;
                Body::Assign(self.value()?)
            }
        };
        Ok(Item {
            keyword,
            pos,
            label,
            body,
        })
    }

    fn block(&mut self) -> PResult<Vec<Field>> {
        let open = self.expect(TokenKind::LBrace, "`{`")?.pos;
        let mut fields = Vec::new();
        loop {
            let t = self.peek();
            match &t.kind {
                TokenKind::RBrace | TokenKind::Eof => break,
                TokenKind::Semi => {
                    self.bump();
                }
                TokenKind::Ident(name) => {
                    self.bump();
                    self.expect(TokenKind::Eq, "`=`")?;
                    let value = self.value()?;
                    fields.push(Field {
                        name: name.clone(),
                        pos: t.pos,
                        value,
                    });
                    self.terminator()?;
                }
                _ => return Err(self.unexpected("a field name or `}`")),
            }
        }
        self.expect_close(TokenKind::RBrace, "{", open)?;
        Ok(fields)
    }

    fn value(&mut self) -> PResult<Value> {
        let t = self.peek();
        let kind = match &t.kind {
            TokenKind::Str(s) => ValueKind::Str(s.clone()),
            TokenKind::Number(n) => ValueKind::Number(*n),
            TokenKind::Ident(s) => ValueKind::Ident(s.clone()),
            TokenKind::LBracket => {
                if self.depth >= MAX_LIST_DEPTH {
                    return Err(syntax(
                        t.pos,
                        format!("lists nested deeper than {MAX_LIST_DEPTH} levels"),
                    ));
                }
                self.bump();
                self.depth += 1;
                let mut elems = Vec::new();
                loop {
                    if matches!(self.peek().kind, TokenKind::RBracket | TokenKind::Eof) {
                        break;
                    }
                    elems.push(self.value()?);
                    if self.peek().kind == TokenKind::Comma {
                        self.bump();
                    } else {
                        break;
                    }
                }
                self.expect_close(TokenKind::RBracket, "[", t.pos)?;
                self.depth -= 1;
                return Ok(Value {
                    kind: ValueKind::List(elems),
                    pos: t.pos,
                });
            }
            _ => return Err(self.unexpected("a value")),
        };
        self.bump();
        Ok(Value { kind, pos: t.pos })
    }
}

pub(crate) fn parse_tokens(tokens: &[Token]) -> Result<RawDocument, Diagnostic> {
    Parser {
        tokens,
        idx: 0,
        depth: 0,
    }
    .document()
}
