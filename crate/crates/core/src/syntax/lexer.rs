use std::fmt;

use super::SyntaxError;

/// 1-based line/column of a token's first character.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Token {
    /// Lowercase-initial identifier.
    Atom(String),
    /// Uppercase- or underscore-initial identifier.
    Var(String),
    Num(f64),
    /// Raw text between braces, used for algebraic labels.
    Opaque(String),
    DColon,
    Neck,
    Tilde,
    Comma,
    Dot,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Not,
    Eq,
    Lt,
    Gt,
    Le,
    Ge,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Atom(s) | Token::Var(s) => write!(f, "{s}"),
            Token::Num(n) => write!(f, "{n}"),
            Token::Opaque(s) => write!(f, "{{{s}}}"),
            Token::DColon => f.write_str("::"),
            Token::Neck => f.write_str(":-"),
            Token::Tilde => f.write_str("~"),
            Token::Comma => f.write_str(","),
            Token::Dot => f.write_str("."),
            Token::LParen => f.write_str("("),
            Token::RParen => f.write_str(")"),
            Token::LBracket => f.write_str("["),
            Token::RBracket => f.write_str("]"),
            Token::Not => f.write_str("\\+"),
            Token::Eq => f.write_str("="),
            Token::Lt => f.write_str("<"),
            Token::Gt => f.write_str(">"),
            Token::Le => f.write_str("=<"),
            Token::Ge => f.write_str(">="),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spanned {
    pub token: Token,
    pub pos: Position,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next()
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

    fn pos(&self) -> Position {
        Position { line: self.line, column: self.column }
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Splits source text into tokens; `%` comments and whitespace are dropped.
pub fn tokenize(source: &str) -> Result<Vec<Spanned>, SyntaxError> {
    let mut cur = Cursor { chars: source.chars().peekable(), line: 1, column: 1 };
    let mut out = Vec::new();
    while let Some(c) = cur.peek() {
        let pos = cur.pos();
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '%' {
            while let Some(c) = cur.peek() {
                if c == '\n' {
                    break;
                }
                cur.bump();
            }
            continue;
        }
        let negative_number = c == '-' && cur.peek2().is_some_and(|d| d.is_ascii_digit());
        let token = if c.is_ascii_digit() || negative_number {
            lex_number(&mut cur, pos)?
        } else if c.is_ascii_lowercase() {
            Token::Atom(lex_ident(&mut cur))
        } else if c.is_ascii_uppercase() || c == '_' {
            Token::Var(lex_ident(&mut cur))
        } else {
            cur.bump();
            match c {
                ':' => match cur.peek() {
                    Some(':') => {
                        cur.bump();
                        Token::DColon
                    }
                    Some('-') => {
                        cur.bump();
                        Token::Neck
                    }
                    _ => return Err(SyntaxError::lex(pos, "expected `::` or `:-` after `:`")),
                },
                // U+02DC also accepted, as it appears in typeset listings
                '~' | '\u{02DC}' => Token::Tilde,
                ',' => Token::Comma,
                '.' => Token::Dot,
                '(' => Token::LParen,
                ')' => Token::RParen,
                '[' => Token::LBracket,
                ']' => Token::RBracket,
                '\\' => {
                    if cur.peek() == Some('+') {
                        cur.bump();
                        Token::Not
                    } else {
                        return Err(SyntaxError::lex(pos, "expected `\\+`"));
                    }
                }
                '=' => {
                    if cur.peek() == Some('<') {
                        cur.bump();
                        Token::Le
                    } else {
                        Token::Eq
                    }
                }
                '<' => Token::Lt,
                '>' => {
                    if cur.peek() == Some('=') {
                        cur.bump();
                        Token::Ge
                    } else {
                        Token::Gt
                    }
                }
                '{' => {
                    let mut depth = 1usize;
                    let mut text = String::new();
                    loop {
                        match cur.bump() {
                            None => return Err(SyntaxError::lex(pos, "unterminated `{` label")),
                            Some('{') => {
                                depth += 1;
                                text.push('{');
                            }
                            Some('}') => {
                                depth -= 1;
                                if depth == 0 {
                                    break;
                                }
                                text.push('}');
                            }
                            Some(ch) => text.push(ch),
                        }
                    }
                    Token::Opaque(text.trim().to_string())
                }
                other => {
                    return Err(SyntaxError::lex(pos, format!("illegal character {other:?}")));
                }
            }
        };
        out.push(Spanned { token, pos });
    }
    Ok(out)
}

fn lex_ident(cur: &mut Cursor<'_>) -> String {
    let mut s = String::new();
    while let Some(c) = cur.peek() {
        if !is_ident_char(c) {
            break;
        }
        s.push(c);
        cur.bump();
    }
    s
}

fn lex_number(cur: &mut Cursor<'_>, pos: Position) -> Result<Token, SyntaxError> {
    let mut s = String::new();
    if cur.peek() == Some('-') {
        s.push('-');
        cur.bump();
    }
    while let Some(c) = cur.peek().filter(char::is_ascii_digit) {
        s.push(c);
        cur.bump();
    }
    // a dot only belongs to the number when a digit follows; otherwise it ends the statement
    if cur.peek() == Some('.') && cur.peek2().is_some_and(|d| d.is_ascii_digit()) {
        s.push('.');
        cur.bump();
        while let Some(c) = cur.peek().filter(char::is_ascii_digit) {
            s.push(c);
            cur.bump();
        }
    }
    if matches!(cur.peek(), Some('e' | 'E')) {
        let next = cur.peek2();
        if next.is_some_and(|d| d.is_ascii_digit() || d == '-' || d == '+') {
            s.push('e');
            cur.bump();
            if matches!(cur.peek(), Some('-' | '+')) {
                s.push(cur.bump().unwrap_or('+'));
            }
            while let Some(c) = cur.peek().filter(char::is_ascii_digit) {
                s.push(c);
                cur.bump();
            }
        }
    }
    if cur.peek().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') {
        return Err(SyntaxError::lex(pos, format!("malformed number starting with {s:?}")));
    }
    s.parse::<f64>().map(Token::Num).map_err(|_| SyntaxError::lex(pos, format!("malformed number {s:?}")))
}
