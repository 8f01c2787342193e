//! Pulling structured payloads out of free-text model responses: fenced
//! code blocks, qubit counts, and JSON plans.

/// All fenced code blocks in a response, in order. A fence is a line whose
/// trimmed form starts with three backticks; an unclosed final fence runs to
/// the end of the text.
pub fn fenced_blocks(text: &str) -> Vec<String> {
    let mut blocks = Vec::new();
    let mut current: Option<String> = None;
    for line in text.lines() {
        if line.trim_start().starts_with("```") {
            match current.take() {
                Some(block) => blocks.push(block),
                None => current = Some(String::new()),
            }
            continue;
        }
        if let Some(block) = &mut current {
            block.push_str(line);
            block.push('\n');
        }
    }
    if let Some(block) = current {
        blocks.push(block);
    }
    blocks
}

/// The program text inside a model response: the last fenced block, else
/// the region from the first "OPENQASM" to the end, else empty (which then
/// fails syntax checking downstream rather than erroring here).
pub fn extract_program(response: &str) -> String {
    if let Some(block) = fenced_blocks(response).pop() {
        return block;
    }
    match response.find("OPENQASM") {
        Some(pos) => response[pos..].trim().to_string(),
        None => String::new(),
    }
}

/// The JSON payload of a response: the last fenced block if any, otherwise
/// the whole trimmed text.
pub fn extract_json_payload(response: &str) -> String {
    match fenced_blocks(response).pop() {
        Some(block) => block,
        None => response.trim().to_string(),
    }
}

/// First "N qubit(s)" occurrence in the text, the fixed rule for free-form
/// requests. The digits must be followed (modulo whitespace) directly by
/// the word "qubit"; "4 counting qubits" deliberately does not match.
pub fn parse_qubit_count(text: &str) -> Option<u32> {
    let lower = text.to_lowercase();
    let bytes = lower.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if !bytes[i].is_ascii_digit() {
            i += 1;
            continue;
        }
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let mut j = i;
        while j < bytes.len() && bytes[j].is_ascii_whitespace() {
            j += 1;
        }
        if lower[j..].starts_with("qubit") {
            if let Ok(n) = lower[start..i].parse() {
                return Some(n);
            }
        }
    }
    None
}
