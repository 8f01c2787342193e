//! OpenQASM 3 subset frontend: parse, include resolution, validation, and
//! canonical emission.
//!
//! The supported subset is the version header, `include`, gate definitions
//! with angle parameters, `qubit[n]`/`bit[n]` declarations, gate application
//! with `ctrl`/`negctrl`/`inv` modifiers, `measure`, `reset` and `barrier`.
//! Anything else is rejected with an `UnsupportedConstruct` diagnostic
//! rather than silently accepted.

pub mod ast;
pub mod diag;
pub mod emit;
mod lexer;
pub mod parser;
pub mod stdgates;
pub mod validate;

use std::collections::HashMap;
use std::path::PathBuf;

pub use ast::*;
pub use diag::{passes, DiagCode, Diagnostic, Severity, Span};
pub use emit::{emit, emit_fragment};
pub use parser::{parse, parse_fragment};
pub use stdgates::standard_gate;
pub use validate::{validate, validate_with_externs, ExternGate};

/// Source of include-file text. `stdgates.inc` is built in and never asked
/// for.
pub trait IncludeProvider {
    fn include_source(&self, name: &str) -> Option<String>;
}

/// Provider with no includes at all.
pub struct NoIncludes;

impl IncludeProvider for NoIncludes {
    fn include_source(&self, _name: &str) -> Option<String> {
        None
    }
}

impl IncludeProvider for HashMap<String, String> {
    fn include_source(&self, name: &str) -> Option<String> {
        self.get(name).cloned()
    }
}

/// Resolves includes against files in a directory.
pub struct DirIncludes {
    pub base: PathBuf,
}

impl DirIncludes {
    pub fn new(base: impl Into<PathBuf>) -> Self {
        DirIncludes { base: base.into() }
    }
}

impl IncludeProvider for DirIncludes {
    fn include_source(&self, name: &str) -> Option<String> {
        std::fs::read_to_string(self.base.join(name)).ok()
    }
}

pub const STDGATES_INCLUDE: &str = "stdgates.inc";

/// Pull gate definitions out of each named include and prepend them, in
/// include order, to the program's definitions. The include list itself is
/// preserved so `emit` can reproduce the original text. Include files may
/// only define gates; diagnostics from their text are attributed by name.
pub fn resolve_includes(
    mut program: Program,
    provider: &dyn IncludeProvider,
) -> (Program, Vec<Diagnostic>) {
    let mut diags = Vec::new();
    let mut pulled: Vec<GateDef> = Vec::new();
    for inc in &program.includes {
        if inc.name == STDGATES_INCLUDE {
            continue;
        }
        let source = match provider.include_source(&inc.name) {
            Some(s) => s,
            None => {
                diags.push(Diagnostic::error(
                    DiagCode::UnresolvedInclude,
                    inc.span,
                    format!("cannot resolve include \"{}\"", inc.name),
                ));
                continue;
            }
        };
        let (fragment, mut fdiags) = parse_fragment(&source);
        for d in &mut fdiags {
            d.message = format!("in \"{}\": {}", inc.name, d.message);
        }
        diags.append(&mut fdiags);
        if !fragment.includes.is_empty() {
            diags.push(Diagnostic::error(
                DiagCode::UnsupportedConstruct,
                inc.span,
                format!("in \"{}\": nested includes are not supported", inc.name),
            ));
        }
        if !fragment.quantum_decls.is_empty()
            || !fragment.classical_decls.is_empty()
            || !fragment.statements.is_empty()
        {
            diags.push(Diagnostic::error(
                DiagCode::UnsupportedConstruct,
                inc.span,
                format!("in \"{}\": include files may only define gates", inc.name),
            ));
        }
        for mut def in fragment.gate_defs {
            def.origin = GateOrigin::Include(inc.name.clone());
            pulled.push(def);
        }
    }
    pulled.append(&mut program.gate_defs);
    program.gate_defs = pulled;
    (program, diags)
}

/// Full pipeline: parse, resolve includes, validate. The program "passes
/// syntax" iff the returned diagnostics contain no errors.
pub fn analyze(source: &str, provider: &dyn IncludeProvider) -> (Program, Vec<Diagnostic>) {
    analyze_with_externs(source, provider, &[])
}

pub fn analyze_with_externs(
    source: &str,
    provider: &dyn IncludeProvider,
    externs: &[ExternGate],
) -> (Program, Vec<Diagnostic>) {
    let (program, mut diags) = parse(source);
    if diags.iter().any(Diagnostic::is_error) {
        return (program, diags);
    }
    let (program, mut rdiags) = resolve_includes(program, provider);
    diags.append(&mut rdiags);
    let mut vdiags = validate_with_externs(&program, externs);
    diags.append(&mut vdiags);
    diag::sort_diagnostics(&mut diags);
    (program, diags)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stdgates_include_needs_no_provider() {
        let (_, diags) = analyze(
            "OPENQASM 3.0;\ninclude \"stdgates.inc\";\nqubit q;\nh q;\n",
            &NoIncludes,
        );
        assert!(passes(&diags), "{diags:?}");
    }

    #[test]
    fn missing_include_is_unresolved() {
        let (_, diags) = analyze("OPENQASM 3.0;\ninclude \"missing.inc\";\n", &NoIncludes);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, DiagCode::UnresolvedInclude);
    }

    #[test]
    fn include_defs_are_prepended_and_usable() {
        let mut provider = HashMap::new();
        provider.insert(
            "oracle.inc".to_string(),
            "gate Uf x0, y0 { cx x0, y0; }\n".to_string(),
        );
        let src = "OPENQASM 3.0;\ninclude \"oracle.inc\";\nqubit[2] q;\nbit c;\nUf q[0], q[1];\nc = measure q[1];\n";
        let (prog, diags) = analyze(src, &provider);
        assert!(passes(&diags), "{diags:?}");
        let def = prog.find_gate_def("Uf").unwrap();
        assert_eq!(def.origin, GateOrigin::Include("oracle.inc".to_string()));
        // First in the list: prepended before any user definitions.
        assert_eq!(prog.gate_defs[0].name, "Uf");
    }

    #[test]
    fn include_diagnostics_carry_the_include_name() {
        let mut provider = HashMap::new();
        provider.insert("bad.inc".to_string(), "gate broken {".to_string());
        let (_, diags) = analyze("OPENQASM 3.0;\ninclude \"bad.inc\";\n", &provider);
        assert!(!passes(&diags));
        assert!(diags.iter().any(|d| d.message.contains("bad.inc")));
    }

    #[test]
    fn include_with_statements_is_rejected() {
        let mut provider = HashMap::new();
        provider.insert("odd.inc".to_string(), "qubit q;\nh q;\n".to_string());
        let (_, diags) = analyze("OPENQASM 3.0;\ninclude \"odd.inc\";\n", &provider);
        assert!(diags.iter().any(|d| d.code == DiagCode::UnsupportedConstruct));
    }

    #[test]
    fn resolved_program_reemits_include_line() {
        let mut provider = HashMap::new();
        provider.insert("oracle.inc".to_string(), "gate Uf x0 { x x0; }\n".to_string());
        let src = "OPENQASM 3.0;\ninclude \"oracle.inc\";\nqubit q;\nUf q;\n";
        let (prog, diags) = analyze(src, &provider);
        assert!(passes(&diags), "{diags:?}");
        let text = emit(&prog);
        assert!(text.contains("include \"oracle.inc\";"));
        assert!(!text.contains("gate Uf"));
        // Re-analyzing the emitted text with the same provider reproduces
        // the same structure.
        let (prog2, diags2) = analyze(&text, &provider);
        assert!(passes(&diags2), "{diags2:?}");
        assert_eq!(prog, prog2);
    }
}
