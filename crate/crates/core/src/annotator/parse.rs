//! Parsers that turn free-form model generations into task values.
//!
//! Both parsers are total: undecidable input falls back to a conservative
//! value (`false` / empty list) with the ok-flag cleared so reports can
//! count and exclude parse failures.

use crate::tokenize;

/// Scan a generation for a boolean answer. The first decisive head token
/// wins: "true"/"yes" against "false"/"no", case-insensitive, positions of
/// punctuation and preamble ignored. Undecidable input yields
/// `(false, false)`.
pub fn parse_boolean(generation: &str) -> (bool, bool) {
    for word in tokenize::words(generation) {
        match word.as_str() {
            "true" | "yes" => return (true, true),
            "false" | "no" => return (false, true),
            _ => {}
        }
    }
    (false, false)
}

/// Parse a generation into a list of items.
///
/// Accepts bracketed lists (`[a, b]`), bullet and numbered lines, and
/// comma/semicolon/newline-separated text after an optional `...:` preamble.
/// "none"-style answers parse to the empty list with the ok-flag set. Items
/// are trimmed of quotes and trailing punctuation and deduplicated
/// case-insensitively, keeping first occurrences.
pub fn parse_list(generation: &str) -> (Vec<String>, bool) {
    let text = generation.trim();
    if text.is_empty() {
        return (Vec::new(), false);
    }

    if let (Some(open), Some(close)) = (text.find('['), text.rfind(']')) {
        if open < close {
            return (split_items(&text[open + 1..close]), true);
        }
    }

    let bullets: Vec<&str> = text.lines().filter_map(bullet_content).collect();
    if !bullets.is_empty() {
        return (dedup_items(bullets.into_iter().map(clean_item)), true);
    }

    // "The symptoms are: vomiting, nausea." — drop the preamble.
    let body = match text.find(':') {
        Some(idx) => text[idx + 1..].trim(),
        None => text,
    };
    if body.is_empty() {
        return (Vec::new(), false);
    }

    if let Some(first) = tokenize::words(body).first() {
        if matches!(first.as_str(), "none" | "nothing" | "nil" | "n" | "na" | "no") {
            return (Vec::new(), true);
        }
    }

    if body.contains(',') || body.contains(';') || body.contains('\n') {
        let items = split_items(body);
        let ok = !items.is_empty();
        return (items, ok);
    }

    let single = clean_item(body);
    if single.chars().any(char::is_alphanumeric) && single.split_whitespace().count() <= 6 {
        return (vec![single], true);
    }
    (Vec::new(), false)
}

fn bullet_content(line: &str) -> Option<&str> {
    let line = line.trim();
    for marker in ["- ", "* ", "• "] {
        if let Some(rest) = line.strip_prefix(marker) {
            return Some(rest);
        }
    }
    // Numbered lists: "1. item" or "2) item".
    let digits = line.chars().take_while(|c| c.is_ascii_digit()).count();
    if digits > 0 {
        let rest = &line[digits..];
        if let Some(item) = rest.strip_prefix(". ").or_else(|| rest.strip_prefix(") ")) {
            return Some(item);
        }
    }
    None
}

fn split_items(body: &str) -> Vec<String> {
    dedup_items(
        body.split(|c| c == ',' || c == ';' || c == '\n')
            .map(clean_item),
    )
}

fn dedup_items(items: impl Iterator<Item = String>) -> Vec<String> {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for item in items {
        if !item.chars().any(char::is_alphanumeric) {
            continue;
        }
        if seen.insert(item.to_lowercase()) {
            out.push(item);
        }
    }
    out
}

fn clean_item(raw: &str) -> String {
    raw.trim()
        .trim_matches(|c| matches!(c, '"' | '\'' | '`' | '*'))
        .trim_end_matches(|c| matches!(c, '.' | ',' | ';'))
        .trim()
        .to_string()
}
