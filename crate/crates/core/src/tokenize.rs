//! Word tokenization shared by keyword filtering, symptom disambiguation,
//! and term substitution.
//!
//! A token is a maximal run of alphanumeric characters, possibly joined by
//! apostrophes that have alphanumeric characters on both sides, so `sick's`
//! is a single token. Everything else separates tokens.

/// A token with its byte span in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'a> {
    pub text: &'a str,
    pub start: usize,
    pub end: usize,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// Split `text` into tokens with byte spans.
pub fn tokenize(text: &str) -> Vec<Token<'_>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if !is_word_char(chars[i].1) {
            i += 1;
            continue;
        }
        let start = chars[i].0;
        let mut j = i;
        loop {
            while j < chars.len() && is_word_char(chars[j].1) {
                j += 1;
            }
            // An apostrophe flanked by word characters continues the token.
            if j < chars.len()
                && is_apostrophe(chars[j].1)
                && j + 1 < chars.len()
                && is_word_char(chars[j + 1].1)
            {
                j += 1;
                continue;
            }
            break;
        }
        let end = if j < chars.len() { chars[j].0 } else { text.len() };
        tokens.push(Token {
            text: &text[start..end],
            start,
            end,
        });
        i = j;
    }
    tokens
}

/// Lowercased token texts, for callers that only need the words.
pub fn words(text: &str) -> Vec<String> {
    tokenize(text).iter().map(|t| t.text.to_lowercase()).collect()
}

/// True when the byte range `[start, end)` sits on token boundaries: the
/// character before `start` does not extend a token into the range, and
/// likewise after `end`.
pub fn on_token_boundaries(text: &str, start: usize, end: usize) -> bool {
    if let Some(prev) = text[..start].chars().next_back() {
        if is_word_char(prev) {
            return false;
        }
        if is_apostrophe(prev) {
            let before = &text[..start - prev.len_utf8()];
            if before.chars().next_back().is_some_and(is_word_char) {
                return false;
            }
        }
    }
    let mut after = text[end..].chars();
    if let Some(next) = after.next() {
        if is_word_char(next) {
            return false;
        }
        if is_apostrophe(next) && after.next().is_some_and(is_word_char) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_on_punctuation_and_whitespace() {
        let words: Vec<&str> = tokenize("I was sick, twice!").iter().map(|t| t.text).collect();
        assert_eq!(words, vec!["I", "was", "sick", "twice"]);
    }

    #[test]
    fn internal_apostrophe_joins_token() {
        let words: Vec<&str> = tokenize("sick's n' tired").iter().map(|t| t.text).collect();
        assert_eq!(words, vec!["sick's", "n", "tired"]);
    }

    #[test]
    fn quoting_apostrophes_do_not_join() {
        let words: Vec<&str> = tokenize("it was 'sick' food").iter().map(|t| t.text).collect();
        assert_eq!(words, vec!["it", "was", "sick", "food"]);
    }

    #[test]
    fn spans_index_original_text() {
        let text = "Très sick!";
        for t in tokenize(text) {
            assert_eq!(&text[t.start..t.end], t.text);
        }
    }

    #[test]
    fn boundary_rejects_mid_token_ranges() {
        let text = "sickly";
        assert!(!on_token_boundaries(text, 0, 4)); // "sick" inside "sickly"
        assert!(on_token_boundaries(text, 0, 6));
        let text = "sick's";
        assert!(!on_token_boundaries(text, 0, 4)); // apostrophe continues token
    }
}
