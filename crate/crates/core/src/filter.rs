//! Exact-match keyword prefiltering of reviews for GI relevance.
//!
//! Matching is case-insensitive and token-boundary exact: a term matches
//! only where it is not embedded in a longer token, so "sick" never matches
//! inside "sickly". Multi-word terms match their literal single-space form
//! ("threw up"), and the one symbol-bearing term ("a&e") matches its
//! contiguous character sequence at token boundaries. Overlapping matches
//! are all reported.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use aho_corasick::AhoCorasick;
use serde::{Deserialize, Serialize};

use crate::corpus::Review;
use crate::data;
use crate::error::{Error, Result};
use crate::tokenize;

/// Ordered list of lowercase search terms, possibly multi-word.
#[derive(Debug, Clone)]
pub struct KeywordList {
    terms: Vec<String>,
    automaton: AhoCorasick,
}

impl KeywordList {
    /// Build a list from terms. Terms are lowercased and must be non-empty
    /// and free of duplicates.
    pub fn new(terms: Vec<String>) -> Result<KeywordList> {
        let mut seen = BTreeSet::new();
        let mut cleaned = Vec::with_capacity(terms.len());
        for term in terms {
            let term = term
                .to_lowercase()
                .split_whitespace()
                .collect::<Vec<_>>()
                .join(" ");
            if term.is_empty() {
                return Err(Error::InvalidArgument("empty keyword".to_string()));
            }
            if !seen.insert(term.clone()) {
                return Err(Error::InvalidArgument(format!("duplicate keyword `{term}`")));
            }
            cleaned.push(term);
        }
        if cleaned.is_empty() {
            return Err(Error::InvalidArgument("keyword list is empty".to_string()));
        }
        let automaton = AhoCorasick::builder()
            .ascii_case_insensitive(true)
            .build(&cleaned)
            .map_err(|e| Error::InvalidArgument(format!("keyword automaton: {e}")))?;
        Ok(KeywordList {
            terms: cleaned,
            automaton,
        })
    }

    /// The default term list shipped with the crate.
    pub fn bundled() -> KeywordList {
        Self::parse(data::KEYWORDS, Path::new("<bundled keywords>"))
            .expect("bundled keyword list is valid")
    }

    pub fn from_file(path: &Path) -> Result<KeywordList> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    /// Parse a term file: one term per line, `#` comments, lowercased on load.
    pub fn parse(text: &str, path: &Path) -> Result<KeywordList> {
        let terms: Vec<String> = text
            .lines()
            .map(|line| match line.find('#') {
                Some(idx) => line[..idx].trim(),
                None => line.trim(),
            })
            .filter(|line| !line.is_empty())
            .map(str::to_string)
            .collect();
        Self::new(terms).map_err(|e| match e {
            Error::InvalidArgument(message) => Error::InvalidTableEntry {
                path: path.to_path_buf(),
                line: 0,
                message,
            },
            other => other,
        })
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// The keyword hits found in one review.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterMatch {
    /// Filled in by [`filter_corpus`]; empty for bare [`match_keywords`] calls.
    pub review_id: String,
    pub matched_terms: BTreeSet<String>,
    /// Byte spans of every match, sorted by position.
    pub spans: Vec<(usize, usize)>,
}

/// Find every keyword occurrence in `text`.
pub fn match_keywords(text: &str, keywords: &KeywordList) -> FilterMatch {
    let mut matched_terms = BTreeSet::new();
    let mut spans = Vec::new();
    for m in keywords.automaton.find_overlapping_iter(text) {
        if !tokenize::on_token_boundaries(text, m.start(), m.end()) {
            continue;
        }
        matched_terms.insert(keywords.terms[m.pattern().as_usize()].clone());
        spans.push((m.start(), m.end()));
    }
    spans.sort_unstable();
    spans.dedup();
    FilterMatch {
        review_id: String::new(),
        matched_terms,
        spans,
    }
}

/// Result of filtering a corpus: matching reviews in input order, plus the
/// number dropped.
#[derive(Debug, Clone)]
pub struct FilterOutcome {
    pub kept: Vec<(Review, FilterMatch)>,
    pub dropped: usize,
}

/// Keep the reviews with at least one keyword match, preserving input order.
pub fn filter_corpus(reviews: &[Review], keywords: &KeywordList) -> FilterOutcome {
    let mut kept = Vec::new();
    let mut dropped = 0usize;
    for review in reviews {
        let mut m = match_keywords(&review.text, keywords);
        if m.matched_terms.is_empty() {
            dropped += 1;
            continue;
        }
        m.review_id = review.id.clone();
        kept.push((review.clone(), m));
    }
    FilterOutcome { kept, dropped }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn review(id: &str, text: &str) -> Review {
        Review {
            id: id.to_string(),
            text: text.to_string(),
            meta: BTreeMap::new(),
        }
    }

    #[test]
    fn single_word_term_matches_whole_token() {
        let m = match_keywords("I got sick after eating here", &KeywordList::bundled());
        assert!(m.matched_terms.contains("sick"));
    }

    #[test]
    fn term_does_not_match_inside_longer_token() {
        let m = match_keywords("the dessert was sickly sweet", &KeywordList::bundled());
        assert!(m.matched_terms.is_empty());
    }

    #[test]
    fn multi_word_term_matches() {
        let m = match_keywords("I threw up all night", &KeywordList::bundled());
        assert!(m.matched_terms.contains("threw up"));
    }

    #[test]
    fn symbol_term_matches_contiguously() {
        let kws = KeywordList::bundled();
        let m = match_keywords("we ended up in A&E that night", &kws);
        assert!(m.matched_terms.contains("a&e"));
        let m = match_keywords("ba&el is not a term", &kws);
        assert!(!m.matched_terms.contains("a&e"));
    }

    #[test]
    fn matching_is_case_insensitive() {
        let m = match_keywords("NOROVIRUS outbreak, THREW UP twice", &KeywordList::bundled());
        assert!(m.matched_terms.contains("norovirus"));
        assert!(m.matched_terms.contains("threw up"));
    }

    #[test]
    fn spans_cover_the_exact_term_text() {
        let text = "Vomit everywhere; then vomiting again";
        let m = match_keywords(text, &KeywordList::bundled());
        for &(start, end) in &m.spans {
            let covered = text[start..end].to_lowercase();
            assert!(m.matched_terms.contains(&covered));
        }
    }

    #[test]
    fn overlapping_matches_are_all_reported() {
        let kws = KeywordList::new(vec!["upset stomach".to_string(), "stomach bug".to_string()])
            .unwrap();
        let m = match_keywords("an upset stomach bug hit me", &kws);
        assert_eq!(m.matched_terms.len(), 2);
        assert_eq!(m.spans.len(), 2);
    }

    #[test]
    fn filter_drops_reviews_without_matches() {
        let reviews = vec![
            review("a", "We had a wonderful evening, great Italian food!"),
            review("b", "I caught norovirus here"),
        ];
        let outcome = filter_corpus(&reviews, &KeywordList::bundled());
        assert_eq!(outcome.kept.len(), 1);
        assert_eq!(outcome.kept[0].0.id, "b");
        assert_eq!(outcome.dropped, 1);
    }

    #[test]
    fn multiple_matches_yield_one_kept_record() {
        let reviews = vec![review("a", "I was sick and then I had to vomit")];
        let outcome = filter_corpus(&reviews, &KeywordList::bundled());
        assert_eq!(outcome.kept.len(), 1);
        assert_eq!(outcome.kept[0].1.matched_terms.len(), 2);
        assert_eq!(outcome.kept[0].1.review_id, "a");
    }

    #[test]
    fn filtering_is_idempotent() {
        let reviews = vec![
            review("a", "great food"),
            review("b", "threw up after"),
            review("c", "felt nauseous"),
        ];
        let kws = KeywordList::bundled();
        let first = filter_corpus(&reviews, &kws);
        let kept: Vec<Review> = first.kept.iter().map(|(r, _)| r.clone()).collect();
        let second = filter_corpus(&kept, &kws);
        assert_eq!(second.dropped, 0);
        assert_eq!(second.kept.len(), kept.len());
    }

    #[test]
    fn rejects_duplicate_and_empty_terms() {
        assert!(KeywordList::new(vec!["sick".to_string(), "SICK".to_string()]).is_err());
        assert!(KeywordList::new(vec!["".to_string()]).is_err());
        assert!(KeywordList::new(vec![]).is_err());
    }

    #[test]
    fn bundled_list_is_loaded_in_full() {
        let kws = KeywordList::bundled();
        assert_eq!(kws.len(), 63);
        assert!(kws.terms().contains(&"the squits".to_string()));
        assert!(!kws.terms().contains(&"ill".to_string()));
        assert!(!kws.terms().contains(&"poorly".to_string()));
    }
}
