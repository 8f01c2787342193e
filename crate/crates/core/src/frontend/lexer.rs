//! Hand-rolled lexer for the OpenQASM 3 subset.

use super::diag::{DiagCode, Diagnostic, Span};

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    OpenQasm,
    Include,
    Gate,
    Qubit,
    Bit,
    Measure,
    Reset,
    Barrier,
    Ctrl,
    NegCtrl,
    Inv,
    /// Identifier, including `pi`.
    Ident(String),
    /// Numeric literal with value and original lexeme (to recover the exact
    /// version string, e.g. `3.0`).
    Number(f64, String),
    Str(String),
    Semicolon,
    Comma,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Plus,
    Minus,
    Star,
    Slash,
    At,
    Equals,
    /// A keyword belonging to OpenQASM 3 but outside the supported subset
    /// (for, if, defcal, ...). Surfaced as UnsupportedConstruct.
    Unsupported(String),
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

const UNSUPPORTED_KEYWORDS: &[&str] = &[
    "def", "defcal", "defcalgrammar", "cal", "for", "while", "if", "else", "in", "return",
    "break", "continue", "let", "const", "input", "output", "box", "delay", "duration",
    "durationof", "stretch", "pragma", "extern", "switch", "case", "default", "end", "gphase",
    "int", "uint", "float", "angle", "bool", "complex", "array", "creg", "qreg", "U", "CX",
];

pub struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    pub fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    /// Tokenize the whole input. Lex-level failures (bad characters,
    /// unterminated strings or comments) become ParseError diagnostics;
    /// lexing continues past bad characters so the parser can still
    /// recover later statements.
    pub fn tokenize(mut self) -> (Vec<Token>, Vec<Diagnostic>) {
        let mut out = Vec::new();
        let mut diags = Vec::new();
        loop {
            self.skip_ws_and_comments(&mut diags);
            if self.pos >= self.src.len() {
                break;
            }
            let start_span = self.span_here(1);
            let c = self.src[self.pos];
            let tok = match c {
                b';' => self.single(Tok::Semicolon),
                b',' => self.single(Tok::Comma),
                b'(' => self.single(Tok::LParen),
                b')' => self.single(Tok::RParen),
                b'{' => self.single(Tok::LBrace),
                b'}' => self.single(Tok::RBrace),
                b'[' => self.single(Tok::LBracket),
                b']' => self.single(Tok::RBracket),
                b'+' => self.single(Tok::Plus),
                b'-' => self.single(Tok::Minus),
                b'*' => self.single(Tok::Star),
                b'/' => self.single(Tok::Slash),
                b'@' => self.single(Tok::At),
                b'=' => self.single(Tok::Equals),
                b'"' => match self.string() {
                    Ok(t) => t,
                    Err(d) => {
                        diags.push(d);
                        break;
                    }
                },
                b'0'..=b'9' | b'.' => match self.number() {
                    Ok(t) => t,
                    Err(d) => {
                        diags.push(d);
                        self.advance();
                        continue;
                    }
                },
                c if c.is_ascii_alphabetic() || c == b'_' => self.ident(),
                0xcf if self.src.get(self.pos + 1) == Some(&0x80) => {
                    // UTF-8 for the Greek letter pi
                    self.advance();
                    self.advance();
                    Token { tok: Tok::Ident("pi".to_string()), span: start_span }
                }
                other => {
                    diags.push(Diagnostic::error(
                        DiagCode::ParseError,
                        start_span,
                        format!("unexpected character '{}'", other as char),
                    ));
                    self.advance();
                    continue;
                }
            };
            out.push(tok);
        }
        (out, diags)
    }

    fn span_here(&self, len: u32) -> Span {
        Span::new(self.line, self.col, len)
    }

    fn advance(&mut self) {
        if self.pos < self.src.len() {
            if self.src[self.pos] == b'\n' {
                self.line += 1;
                self.col = 1;
            } else {
                self.col += 1;
            }
            self.pos += 1;
        }
    }

    fn single(&mut self, tok: Tok) -> Token {
        let span = self.span_here(1);
        self.advance();
        Token { tok, span }
    }

    fn skip_ws_and_comments(&mut self, diags: &mut Vec<Diagnostic>) {
        loop {
            while self.pos < self.src.len() && (self.src[self.pos] as char).is_whitespace() {
                self.advance();
            }
            if self.pos + 1 < self.src.len() && self.src[self.pos] == b'/' {
                if self.src[self.pos + 1] == b'/' {
                    while self.pos < self.src.len() && self.src[self.pos] != b'\n' {
                        self.advance();
                    }
                    continue;
                }
                if self.src[self.pos + 1] == b'*' {
                    let open = self.span_here(2);
                    self.advance();
                    self.advance();
                    let mut closed = false;
                    while self.pos + 1 < self.src.len() {
                        if self.src[self.pos] == b'*' && self.src[self.pos + 1] == b'/' {
                            self.advance();
                            self.advance();
                            closed = true;
                            break;
                        }
                        self.advance();
                    }
                    if !closed {
                        self.pos = self.src.len();
                        diags.push(Diagnostic::error(
                            DiagCode::ParseError,
                            open,
                            "unterminated block comment",
                        ));
                    }
                    continue;
                }
            }
            break;
        }
    }

    fn string(&mut self) -> Result<Token, Diagnostic> {
        let span = self.span_here(1);
        self.advance(); // opening quote
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos] != b'"' && self.src[self.pos] != b'\n'
        {
            self.advance();
        }
        if self.pos >= self.src.len() || self.src[self.pos] != b'"' {
            return Err(Diagnostic::error(DiagCode::ParseError, span, "unterminated string"));
        }
        let text = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
        self.advance(); // closing quote
        Ok(Token { tok: Tok::Str(text), span })
    }

    fn number(&mut self) -> Result<Token, Diagnostic> {
        let span_start = self.span_here(0);
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.advance();
        }
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.advance();
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.advance();
            }
        }
        if self.pos < self.src.len() && (self.src[self.pos] == b'e' || self.src[self.pos] == b'E') {
            let save = self.pos;
            self.advance();
            if self.pos < self.src.len() && (self.src[self.pos] == b'+' || self.src[self.pos] == b'-')
            {
                self.advance();
            }
            if self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.advance();
                }
            } else {
                self.pos = save;
            }
        }
        let lexeme = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
        let span = Span::new(span_start.line, span_start.column, lexeme.len() as u32);
        match lexeme.parse::<f64>() {
            Ok(v) => Ok(Token { tok: Tok::Number(v, lexeme), span }),
            Err(_) => Err(Diagnostic::error(
                DiagCode::ParseError,
                span,
                format!("malformed numeric literal '{lexeme}'"),
            )),
        }
    }

    fn ident(&mut self) -> Token {
        let span_start = self.span_here(0);
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.advance();
        }
        let text = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
        let span = Span::new(span_start.line, span_start.column, text.len() as u32);
        let tok = match text.as_str() {
            "OPENQASM" => Tok::OpenQasm,
            "include" => Tok::Include,
            "gate" => Tok::Gate,
            "qubit" => Tok::Qubit,
            "bit" => Tok::Bit,
            "measure" => Tok::Measure,
            "reset" => Tok::Reset,
            "barrier" => Tok::Barrier,
            "ctrl" => Tok::Ctrl,
            "negctrl" => Tok::NegCtrl,
            "inv" => Tok::Inv,
            _ if UNSUPPORTED_KEYWORDS.contains(&text.as_str()) => Tok::Unsupported(text),
            _ => Tok::Ident(text),
        };
        Token { tok, span }
    }
}
