use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error, Clone)]
#[error("parse error at {span}: {message}")]
pub struct ParseError {
    pub span: Span,
    pub message: String,
}

impl ParseError {
    pub fn new(span: Span, message: impl Into<String>) -> ParseError {
        ParseError {
            span,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Nat(u64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Assign,
    Semi,
    Dot,
    Star,
    Arrow,
    Iff,
    Amp,
    Pipe,
    Eq,
    Tilde,
    Slash,
    Backslash,
    // keywords
    Bot,
    All,
    Ex,
    In,
    Context,
    Assume,
    By,
    Axiom,
    Rule,
    From,
    Assumption,
    Mode,
    Logic,
    Arithmetic,
    ConstKw,
    Fun,
    Rel,
    Bind,
    Table,
    Pi,
    Sig,
    Set,
    Cup,
    Bigcup,
    Rec,
    Zero,
    Suc,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Nat(n) => format!("number `{n}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.lexeme()),
        }
    }

    fn lexeme(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Assign => ":=",
            Tok::Semi => ";",
            Tok::Dot => ".",
            Tok::Star => "*",
            Tok::Arrow => "->",
            Tok::Iff => "<->",
            Tok::Amp => "&",
            Tok::Pipe => "|",
            Tok::Eq => "=",
            Tok::Tilde => "~",
            Tok::Slash => "/",
            Tok::Backslash => "\\",
            Tok::Bot => "bot",
            Tok::All => "all",
            Tok::Ex => "ex",
            Tok::In => "in",
            Tok::Context => "context",
            Tok::Assume => "assume",
            Tok::By => "BY",
            Tok::Axiom => "axiom",
            Tok::Rule => "rule",
            Tok::From => "from",
            Tok::Assumption => "assumption",
            Tok::Mode => "mode",
            Tok::Logic => "logic",
            Tok::Arithmetic => "arithmetic",
            Tok::ConstKw => "const",
            Tok::Fun => "fun",
            Tok::Rel => "rel",
            Tok::Bind => "bind",
            Tok::Table => "table",
            Tok::Pi => "PI",
            Tok::Sig => "SIG",
            Tok::Set => "SET",
            Tok::Cup => "CUP",
            Tok::Bigcup => "BIGCUP",
            Tok::Rec => "REC",
            Tok::Zero => "ZERO",
            Tok::Suc => "SUC",
            Tok::Ident(_) | Tok::Nat(_) | Tok::Eof => unreachable!(),
        }
    }
}

fn keyword(s: &str) -> Option<Tok> {
    Some(match s {
        "bot" => Tok::Bot,
        "all" => Tok::All,
        "ex" => Tok::Ex,
        "in" => Tok::In,
        "context" => Tok::Context,
        "assume" => Tok::Assume,
        "BY" => Tok::By,
        "axiom" => Tok::Axiom,
        "rule" => Tok::Rule,
        "from" => Tok::From,
        "assumption" => Tok::Assumption,
        "mode" => Tok::Mode,
        "logic" => Tok::Logic,
        "arithmetic" => Tok::Arithmetic,
        "const" => Tok::ConstKw,
        "fun" => Tok::Fun,
        "rel" => Tok::Rel,
        "bind" => Tok::Bind,
        "table" => Tok::Table,
        "PI" => Tok::Pi,
        "SIG" => Tok::Sig,
        "SET" => Tok::Set,
        "CUP" => Tok::Cup,
        "BIGCUP" => Tok::Bigcup,
        "REC" => Tok::Rec,
        "ZERO" => Tok::Zero,
        "SUC" => Tok::Suc,
        _ => return None,
    })
}

pub struct Lexer;

impl Lexer {
    /// Tokenizes the input; `--` starts a line comment.
    pub fn tokenize(input: &str) -> Result<Vec<(Tok, Span)>, ParseError> {
        let mut out = Vec::new();
        let mut line: u32 = 1;
        let mut col: u32 = 1;
        let mut chars = input.chars().peekable();
        macro_rules! bump {
            () => {{
                let c = chars.next();
                if c == Some('\n') {
                    line += 1;
                    col = 1;
                } else if c.is_some() {
                    col += 1;
                }
                c
            }};
        }
        loop {
            let span = Span { line, col };
            let c = match chars.peek().copied() {
                None => {
                    out.push((Tok::Eof, span));
                    return Ok(out);
                }
                Some(c) => c,
            };
            match c {
                ' ' | '\t' | '\r' | '\n' => {
                    bump!();
                }
                '(' => {
                    bump!();
                    out.push((Tok::LParen, span));
                }
                ')' => {
                    bump!();
                    out.push((Tok::RParen, span));
                }
                '[' => {
                    bump!();
                    out.push((Tok::LBracket, span));
                }
                ']' => {
                    bump!();
                    out.push((Tok::RBracket, span));
                }
                '{' => {
                    bump!();
                    out.push((Tok::LBrace, span));
                }
                '}' => {
                    bump!();
                    out.push((Tok::RBrace, span));
                }
                ',' => {
                    bump!();
                    out.push((Tok::Comma, span));
                }
                ';' => {
                    bump!();
                    out.push((Tok::Semi, span));
                }
                '.' => {
                    bump!();
                    out.push((Tok::Dot, span));
                }
                '*' => {
                    bump!();
                    out.push((Tok::Star, span));
                }
                '&' => {
                    bump!();
                    out.push((Tok::Amp, span));
                }
                '|' => {
                    bump!();
                    out.push((Tok::Pipe, span));
                }
                '=' => {
                    bump!();
                    out.push((Tok::Eq, span));
                }
                '~' => {
                    bump!();
                    out.push((Tok::Tilde, span));
                }
                '/' => {
                    bump!();
                    out.push((Tok::Slash, span));
                }
                '\\' => {
                    bump!();
                    out.push((Tok::Backslash, span));
                }
                ':' => {
                    bump!();
                    if chars.peek() == Some(&'=') {
                        bump!();
                        out.push((Tok::Assign, span));
                    } else {
                        out.push((Tok::Colon, span));
                    }
                }
                '-' => {
                    bump!();
                    match chars.peek() {
                        Some('>') => {
                            bump!();
                            out.push((Tok::Arrow, span));
                        }
                        Some('-') => {
                            while let Some(&c) = chars.peek() {
                                if c == '\n' {
                                    break;
                                }
                                bump!();
                            }
                        }
                        _ => {
                            return Err(ParseError::new(span, "expected `->` or `--`"));
                        }
                    }
                }
                '<' => {
                    bump!();
                    if chars.peek() == Some(&'-') {
                        bump!();
                        if chars.peek() == Some(&'>') {
                            bump!();
                            out.push((Tok::Iff, span));
                        } else {
                            return Err(ParseError::new(span, "expected `<->`"));
                        }
                    } else {
                        return Err(ParseError::new(span, "expected `<->`"));
                    }
                }
                '0'..='9' => {
                    let mut n: u64 = 0;
                    while let Some(&d) = chars.peek() {
                        if let Some(v) = d.to_digit(10) {
                            n = n
                                .checked_mul(10)
                                .and_then(|n| n.checked_add(v as u64))
                                .ok_or_else(|| ParseError::new(span, "numeral too large"))?;
                            bump!();
                        } else {
                            break;
                        }
                    }
                    out.push((Tok::Nat(n), span));
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let mut s = String::new();
                    while let Some(&d) = chars.peek() {
                        if d.is_ascii_alphanumeric() || d == '_' || d == '\'' || d == '#' {
                            s.push(d);
                            bump!();
                        } else {
                            break;
                        }
                    }
                    match keyword(&s) {
                        Some(t) => out.push((t, span)),
                        None => out.push((Tok::Ident(s), span)),
                    }
                }
                other => {
                    return Err(ParseError::new(span, format!("unexpected character `{other}`")));
                }
            }
        }
    }
}
