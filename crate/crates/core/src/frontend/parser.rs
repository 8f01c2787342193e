//! Recursive-descent parser producing a [`Program`] plus diagnostics.
//!
//! The parser is tolerant: on a syntax error it records a diagnostic and
//! resynchronizes at the next `;` or `}` so that later statements still get
//! checked. Declarations are hoisted into dedicated lists on [`Program`];
//! the relative order of executable statements is preserved.

use super::ast::*;
use super::diag::{DiagCode, Diagnostic, Span};
use super::lexer::{Lexer, Tok, Token};

pub fn parse(source: &str) -> (Program, Vec<Diagnostic>) {
    parse_with_mode(source, true)
}

/// Parse a headerless fragment (the body of an include file).
pub fn parse_fragment(source: &str) -> (Program, Vec<Diagnostic>) {
    parse_with_mode(source, false)
}

fn parse_with_mode(source: &str, require_header: bool) -> (Program, Vec<Diagnostic>) {
    let (tokens, diags) = Lexer::new(source).tokenize();
    let mut p = Parser { tokens, pos: 0, diags, program: Program::empty() };
    p.run(require_header);
    (p.program, p.diags)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    diags: Vec<Diagnostic>,
    program: Program,
}

impl Parser {
    fn run(&mut self, require_header: bool) {
        if require_header || self.peek() == Some(&Tok::OpenQasm) {
            self.version_header();
        }
        while self.pos < self.tokens.len() {
            self.item();
        }
    }

    // ---- token helpers -------------------------------------------------

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn peek_span(&self) -> Span {
        match self.tokens.get(self.pos) {
            Some(t) => t.span,
            None => self.tokens.last().map(|t| t.span).unwrap_or_else(Span::none),
        }
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, want: &Tok) -> bool {
        if self.peek() == Some(want) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, want: Tok, what: &str) -> bool {
        if self.eat(&want) {
            true
        } else {
            let span = self.peek_span();
            self.error(span, format!("expected {what}"));
            false
        }
    }

    fn error(&mut self, span: Span, msg: impl Into<String>) {
        self.diags.push(Diagnostic::error(DiagCode::ParseError, span, msg));
    }

    /// Skip tokens until just past the next `;`, or until a `}` (left for
    /// the caller), so one bad statement does not swallow the rest.
    fn synchronize(&mut self) {
        while let Some(tok) = self.peek() {
            match tok {
                Tok::Semicolon => {
                    self.pos += 1;
                    return;
                }
                Tok::RBrace => return,
                _ => self.pos += 1,
            }
        }
    }

    // ---- grammar productions -------------------------------------------

    fn version_header(&mut self) {
        let span = self.peek_span();
        if !self.eat(&Tok::OpenQasm) {
            self.error(span, "missing OPENQASM version header");
            return;
        }
        match self.bump() {
            Some(Token { tok: Tok::Number(_, lexeme), span }) => {
                let mut parts = lexeme.splitn(2, '.');
                let major: u32 = parts.next().and_then(|s| s.parse().ok()).unwrap_or(0);
                let minor: u32 = parts.next().map(|s| s.parse().unwrap_or(0)).unwrap_or(0);
                if major != 3 {
                    self.error(span, format!("unsupported OPENQASM version {lexeme}"));
                }
                self.program.version = (major, minor);
            }
            _ => {
                self.error(span, "expected version number after OPENQASM");
                self.synchronize();
                return;
            }
        }
        self.expect(Tok::Semicolon, "';' after version header");
    }

    fn item(&mut self) {
        let span = self.peek_span();
        match self.peek() {
            Some(Tok::Include) => self.include(),
            Some(Tok::Gate) => self.gate_def(),
            Some(Tok::Qubit) => self.reg_decl(true),
            Some(Tok::Bit) => self.reg_decl(false),
            Some(Tok::Measure) => {
                self.error(span, "measurement must assign to a classical bit");
                self.synchronize();
            }
            Some(Tok::Reset) => self.reset(),
            Some(Tok::Barrier) => self.barrier(),
            Some(Tok::Ctrl) | Some(Tok::NegCtrl) | Some(Tok::Inv) | Some(Tok::Ident(_)) => {
                self.statement_starting_with_ref()
            }
            Some(Tok::Unsupported(kw)) => {
                let kw = kw.clone();
                self.diags.push(Diagnostic::error(
                    DiagCode::UnsupportedConstruct,
                    span,
                    format!("'{kw}' is not supported"),
                ));
                self.pos += 1;
                self.skip_unsupported_item();
            }
            Some(Tok::OpenQasm) => {
                self.error(span, "duplicate OPENQASM header");
                self.synchronize();
            }
            Some(_) => {
                self.error(span, "expected a statement");
                self.synchronize();
            }
            None => {}
        }
    }

    /// Unsupported constructs may be block-shaped (`if (...) { ... }`); skip
    /// a balanced brace group if one appears before the terminating `;`.
    fn skip_unsupported_item(&mut self) {
        let mut depth = 0usize;
        while let Some(tok) = self.peek() {
            match tok {
                Tok::LBrace => {
                    depth += 1;
                    self.pos += 1;
                }
                Tok::RBrace if depth > 0 => {
                    depth -= 1;
                    self.pos += 1;
                    if depth == 0 {
                        return;
                    }
                }
                Tok::RBrace => return,
                Tok::Semicolon if depth == 0 => {
                    self.pos += 1;
                    return;
                }
                _ => self.pos += 1,
            }
        }
    }

    fn include(&mut self) {
        let span = self.peek_span();
        self.pos += 1;
        match self.bump() {
            Some(Token { tok: Tok::Str(name), .. }) => {
                self.expect(Tok::Semicolon, "';' after include");
                self.program.includes.push(Include { name, span });
            }
            _ => {
                self.error(span, "expected file name string after include");
                self.synchronize();
            }
        }
    }

    fn reg_decl(&mut self, quantum: bool) {
        let span = self.peek_span();
        self.pos += 1;
        let mut size = 1u32;
        if self.eat(&Tok::LBracket) {
            size = self.uint("register size").unwrap_or(1);
            self.expect(Tok::RBracket, "']' after register size");
        }
        let name = match self.bump() {
            Some(Token { tok: Tok::Ident(n), .. }) => n,
            _ => {
                self.error(span, "expected register name");
                self.synchronize();
                return;
            }
        };
        self.expect(Tok::Semicolon, "';' after declaration");
        let decl = RegDecl { name, size, span };
        if quantum {
            self.program.quantum_decls.push(decl);
        } else {
            self.program.classical_decls.push(decl);
        }
    }

    fn gate_def(&mut self) {
        let span = self.peek_span();
        self.pos += 1;
        let name = match self.bump() {
            Some(Token { tok: Tok::Ident(n), .. }) => n,
            _ => {
                self.error(span, "expected gate name");
                self.synchronize();
                return;
            }
        };
        let mut params = Vec::new();
        if self.eat(&Tok::LParen) {
            if !self.eat(&Tok::RParen) {
                loop {
                    match self.bump() {
                        Some(Token { tok: Tok::Ident(p), .. }) => params.push(p),
                        _ => {
                            let s = self.peek_span();
                            self.error(s, "expected parameter name");
                            break;
                        }
                    }
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(Tok::RParen, "')' after gate parameters");
            }
        }
        let mut qubits = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::Ident(_)) => {
                    if let Some(Token { tok: Tok::Ident(q), .. }) = self.bump() {
                        qubits.push(q);
                    }
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                _ => break,
            }
        }
        if qubits.is_empty() {
            let s = self.peek_span();
            self.error(s, "gate definition needs at least one qubit operand");
        }
        if !self.expect(Tok::LBrace, "'{' to open gate body") {
            self.synchronize();
            return;
        }
        let mut body = Vec::new();
        while self.pos < self.tokens.len() && self.peek() != Some(&Tok::RBrace) {
            let s = self.peek_span();
            match self.peek() {
                Some(Tok::Ctrl) | Some(Tok::NegCtrl) | Some(Tok::Inv) | Some(Tok::Ident(_)) => {
                    if let Some(apply) = self.gate_apply() {
                        body.push(apply);
                    }
                }
                Some(Tok::Measure) | Some(Tok::Reset) | Some(Tok::Barrier) => {
                    self.diags.push(Diagnostic::error(
                        DiagCode::UnsupportedConstruct,
                        s,
                        "only gate applications are allowed in a gate body",
                    ));
                    self.synchronize();
                }
                Some(Tok::Unsupported(kw)) => {
                    let kw = kw.clone();
                    self.diags.push(Diagnostic::error(
                        DiagCode::UnsupportedConstruct,
                        s,
                        format!("'{kw}' is not supported"),
                    ));
                    self.synchronize();
                }
                _ => {
                    self.error(s, "expected a gate application");
                    self.synchronize();
                }
            }
        }
        self.expect(Tok::RBrace, "'}' to close gate body");
        self.program.gate_defs.push(GateDef {
            name,
            params,
            qubits,
            body,
            origin: GateOrigin::User,
            span,
        });
    }

    /// Statement that begins with a gate name, modifier list, or a classical
    /// reference (measurement assignment).
    fn statement_starting_with_ref(&mut self) {
        // Measurement assignment: `ref = measure ref ;`
        if matches!(self.peek(), Some(Tok::Ident(_))) {
            let save = self.pos;
            let span = self.peek_span();
            if let Some(bit) = self.try_ref() {
                if self.eat(&Tok::Equals) {
                    if self.eat(&Tok::Measure) {
                        if let Some(qubit) = self.try_ref() {
                            self.expect(Tok::Semicolon, "';' after measurement");
                            self.program
                                .statements
                                .push(Statement::Measure { qubit, bit, span });
                        } else {
                            let s = self.peek_span();
                            self.error(s, "expected qubit reference after measure");
                            self.synchronize();
                        }
                    } else {
                        let s = self.peek_span();
                        self.diags.push(Diagnostic::error(
                            DiagCode::UnsupportedConstruct,
                            s,
                            "only measurement results may be assigned",
                        ));
                        self.synchronize();
                    }
                    return;
                }
            }
            self.pos = save;
        }
        if let Some(apply) = self.gate_apply() {
            self.program.statements.push(Statement::Gate(apply));
        }
    }

    fn reset(&mut self) {
        let span = self.peek_span();
        self.pos += 1;
        match self.try_ref() {
            Some(qubit) => {
                self.expect(Tok::Semicolon, "';' after reset");
                self.program.statements.push(Statement::Reset { qubit, span });
            }
            None => {
                self.error(span, "expected qubit reference after reset");
                self.synchronize();
            }
        }
    }

    fn barrier(&mut self) {
        let span = self.peek_span();
        self.pos += 1;
        let mut qubits = Vec::new();
        if self.peek() != Some(&Tok::Semicolon) {
            loop {
                match self.try_ref() {
                    Some(r) => qubits.push(r),
                    None => {
                        let s = self.peek_span();
                        self.error(s, "expected qubit reference in barrier");
                        self.synchronize();
                        return;
                    }
                }
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::Semicolon, "';' after barrier");
        self.program.statements.push(Statement::Barrier { qubits, span });
    }

    fn gate_apply(&mut self) -> Option<GateApply> {
        let span = self.peek_span();
        let mut modifiers = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::Ctrl) | Some(Tok::NegCtrl) => {
                    let neg = self.peek() == Some(&Tok::NegCtrl);
                    self.pos += 1;
                    let mut count = 1u32;
                    if self.eat(&Tok::LParen) {
                        count = self.uint("control count")?;
                        if count == 0 {
                            let s = self.peek_span();
                            self.error(s, "control count must be at least 1");
                            self.synchronize();
                            return None;
                        }
                        if !self.expect(Tok::RParen, "')' after control count") {
                            self.synchronize();
                            return None;
                        }
                    }
                    if !self.expect(Tok::At, "'@' after modifier") {
                        self.synchronize();
                        return None;
                    }
                    modifiers.push(if neg { Modifier::NegCtrl(count) } else { Modifier::Ctrl(count) });
                }
                Some(Tok::Inv) => {
                    self.pos += 1;
                    if !self.expect(Tok::At, "'@' after modifier") {
                        self.synchronize();
                        return None;
                    }
                    modifiers.push(Modifier::Inv);
                }
                _ => break,
            }
        }
        let name = match self.bump() {
            Some(Token { tok: Tok::Ident(n), .. }) => n,
            other => {
                let s = other.map(|t| t.span).unwrap_or_else(|| self.peek_span());
                self.error(s, "expected gate name");
                self.synchronize();
                return None;
            }
        };
        let mut params = Vec::new();
        if self.eat(&Tok::LParen) {
            if !self.eat(&Tok::RParen) {
                loop {
                    match self.expr() {
                        Some(e) => params.push(e),
                        None => {
                            self.synchronize();
                            return None;
                        }
                    }
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                if !self.expect(Tok::RParen, "')' after gate parameters") {
                    self.synchronize();
                    return None;
                }
            }
        }
        let mut targets = Vec::new();
        loop {
            match self.try_ref() {
                Some(r) => targets.push(r),
                None => {
                    let s = self.peek_span();
                    self.error(s, "expected qubit operand");
                    self.synchronize();
                    return None;
                }
            }
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        if !self.expect(Tok::Semicolon, "';' after gate application") {
            self.synchronize();
            return None;
        }
        Some(GateApply { modifiers, name, params, targets, span })
    }

    fn try_ref(&mut self) -> Option<Ref> {
        let span = self.peek_span();
        let name = match self.peek() {
            Some(Tok::Ident(_)) => match self.bump() {
                Some(Token { tok: Tok::Ident(n), .. }) => n,
                _ => unreachable!(),
            },
            _ => return None,
        };
        let mut index = None;
        if self.eat(&Tok::LBracket) {
            index = Some(self.uint("index")?);
            if !self.expect(Tok::RBracket, "']' after index") {
                return None;
            }
        }
        Some(Ref { reg: name, index, span })
    }

    fn uint(&mut self, what: &str) -> Option<u32> {
        let span = self.peek_span();
        match self.bump() {
            Some(Token { tok: Tok::Number(v, lexeme), .. })
                if !lexeme.contains('.') && v >= 0.0 && v <= u32::MAX as f64 =>
            {
                Some(v as u32)
            }
            _ => {
                self.error(span, format!("expected a nonnegative integer {what}"));
                None
            }
        }
    }

    // ---- expressions ----------------------------------------------------

    fn expr(&mut self) -> Option<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Some(lhs),
            }
        }
    }

    fn term(&mut self) -> Option<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Some(lhs),
            }
        }
    }

    fn factor(&mut self) -> Option<Expr> {
        let span = self.peek_span();
        match self.bump() {
            Some(Token { tok: Tok::Minus, .. }) => {
                let inner = self.factor()?;
                Some(Expr::Neg(Box::new(inner)))
            }
            Some(Token { tok: Tok::Number(v, _), .. }) => Some(Expr::Lit(v)),
            Some(Token { tok: Tok::Ident(name), .. }) => {
                if name == "pi" {
                    Some(Expr::Pi)
                } else {
                    Some(Expr::Param(name))
                }
            }
            Some(Token { tok: Tok::LParen, .. }) => {
                let inner = self.expr()?;
                if !self.expect(Tok::RParen, "')' in expression") {
                    return None;
                }
                Some(inner)
            }
            _ => {
                self.error(span, "expected an expression");
                None
            }
        }
    }
}
