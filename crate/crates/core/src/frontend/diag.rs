//! Machine-readable diagnostics shared by the parser, include resolver and
//! validator. Codes are stable so downstream consumers (checkers, reflection
//! prompts, tests) can match on them instead of scraping messages.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Source location of a diagnostic: 1-based line and column plus the length
/// of the offending lexeme (0 when unknown, e.g. end of input).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub line: u32,
    pub column: u32,
    #[serde(skip)]
    pub length: u32,
}

impl Span {
    pub fn new(line: u32, column: u32, length: u32) -> Self {
        Span { line, column, length }
    }

    /// Placeholder span for diagnostics without a real location.
    pub fn none() -> Self {
        Span { line: 0, column: 0, length: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiagCode {
    ParseError,
    UndefinedGate,
    ArityMismatch,
    ParamCountMismatch,
    UndeclaredRegister,
    IndexOutOfRange,
    DuplicateDeclaration,
    UnresolvedInclude,
    UnsupportedConstruct,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: DiagCode,
    #[serde(flatten)]
    pub span: Span,
    pub message: String,
}

impl Diagnostic {
    pub fn error(code: DiagCode, span: Span, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Error, code, span, message: message.into() }
    }

    pub fn warning(code: DiagCode, span: Span, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, code, span, message: message.into() }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(
            f,
            "{}:{}: {} [{:?}]: {}",
            self.span.line, self.span.column, sev, self.code, self.message
        )
    }
}

/// True iff the list contains no error-severity entries, i.e. the program
/// "passes syntax".
pub fn passes(diags: &[Diagnostic]) -> bool {
    !diags.iter().any(Diagnostic::is_error)
}

/// Sort diagnostics by source position, then code, for deterministic output.
pub fn sort_diagnostics(diags: &mut Vec<Diagnostic>) {
    diags.sort_by(|a, b| a.span.cmp(&b.span).then_with(|| format!("{:?}", a.code).cmp(&format!("{:?}", b.code))));
}
