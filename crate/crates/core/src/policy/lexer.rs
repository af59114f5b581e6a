use super::diagnostic::{Diagnostic, DiagnosticKind, Position};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum TokenKind {
    Ident(String),
    Str(String),
    Number(f64),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Eq,
    Semi,
    Eof,
}

impl TokenKind {
    pub(crate) fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Str(_) => "string".to_string(),
            TokenKind::Number(_) => "number".to_string(),
            TokenKind::LBrace => "`{`".to_string(),
            TokenKind::RBrace => "`}`".to_string(),
            TokenKind::LBracket => "`[`".to_string(),
            TokenKind::RBracket => "`]`".to_string(),
            TokenKind::Comma => "`,`".to_string(),
            TokenKind::Eq => "`=`".to_string(),
            TokenKind::Semi => "`;`".to_string(),
            TokenKind::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Token {
    pub kind: TokenKind,
    pub pos: Position,
    /// A line break separates this token from the previous one.
    pub newline_before: bool,
}

struct Cursor<'a> {
    src: &'a str,
    pos: Position,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos.offset..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.src[self.pos.offset..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos.offset += c.len_utf8();
        if c == '\n' {
            self.pos.line += 1;
            self.pos.column = 1;
        } else {
            self.pos.column += 1;
        }
        Some(c)
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_lowercase() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_'
}

/// Tokenize the whole input. Lexing continues past bad tokens so that all
/// lexical problems are reported at once.
pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, Vec<Diagnostic>> {
    let mut cur = Cursor {
        src,
        pos: Position::START,
    };
    let mut tokens = Vec::new();
    let mut errors = Vec::new();
    let mut newline_before = false;
    let err = |pos, msg: String| Diagnostic::new(DiagnosticKind::Lex, pos, msg);

    loop {
        // whitespace and comments
        while let Some(c) = cur.peek() {
            if c == '\n' {
                newline_before = true;
                cur.bump();
            } else if c.is_whitespace() {
                cur.bump();
            } else if c == '#' {
                while cur.peek().is_some_and(|c| c != '\n') {
                    cur.bump();
                }
            } else {
                break;
            }
        }
        let start = cur.pos;
        let Some(c) = cur.peek() else {
            tokens.push(Token {
                kind: TokenKind::Eof,
                pos: start,
                newline_before,
            });
            break;
        };
        let kind = match c {
            '{' | '}' | '[' | ']' | ',' | '=' | ';' => {
                cur.bump();
                Some(match c {
                    '{' => TokenKind::LBrace,
                    '}' => TokenKind::RBrace,
                    '[' => TokenKind::LBracket,
                    ']' => TokenKind::RBracket,
                    ',' => TokenKind::Comma,
                    '=' => TokenKind::Eq,
                    _ => TokenKind::Semi,
                })
            }
            '"' => {
                cur.bump();
                let mut s = String::new();
                let mut closed = false;
                while let Some(c) = cur.peek() {
                    match c {
                        '"' => {
                            cur.bump();
                            closed = true;
                            break;
                        }
                        '\n' => break,
                        '\\' => {
                            let esc_pos = cur.pos;
                            cur.bump();
                            match cur.peek() {
                                Some('"') => s.push('"'),
                                Some('\\') => s.push('\\'),
                                Some('n') => s.push('\n'),
                                Some('t') => s.push('\t'),
                                Some('\n') | None => continue,
                                Some(other) => errors.push(err(
                                    esc_pos,
                                    format!("unknown escape sequence `\\{other}`"),
                                )),
                            }
                            cur.bump();
                        }
                        _ => {
                            s.push(c);
                            cur.bump();
                        }
                    }
                }
                if closed {
                    Some(TokenKind::Str(s))
                } else {
                    errors.push(err(start, "unterminated string".to_string()));
                    None
                }
            }
            c if c.is_ascii_digit()
                || ((c == '-' || c == '+') && cur.peek2().is_some_and(|d| d.is_ascii_digit())) =>
            {
                let begin = cur.pos.offset;
                cur.bump();
                while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                    cur.bump();
                }
                let mut ok = true;
                if cur.peek() == Some('.') {
                    cur.bump();
                    if cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                        while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                            cur.bump();
                        }
                    } else {
                        ok = false;
                        errors.push(err(start, "expected digits after decimal point".into()));
                    }
                }
                let text = &src[begin..cur.pos.offset];
                if !ok {
                    None
                } else {
                    // digits-only text always parses; overflow yields inf, rejected later
                    Some(TokenKind::Number(text.parse::<f64>().unwrap_or(f64::NAN)))
                }
            }
            c if is_ident_start(c) => {
                let begin = cur.pos.offset;
                while cur.peek().is_some_and(is_ident_continue) {
                    cur.bump();
                }
                Some(TokenKind::Ident(src[begin..cur.pos.offset].to_string()))
            }
            other => {
                cur.bump();
                errors.push(err(start, format!("unexpected character {other:?}")));
                None
            }
        };
        if let Some(kind) = kind {
            tokens.push(Token {
                kind,
                pos: start,
                newline_before,
            });
            newline_before = false;
        }
    }

    if errors.is_empty() {
        Ok(tokens)
    } else {
        Err(errors)
    }
}
