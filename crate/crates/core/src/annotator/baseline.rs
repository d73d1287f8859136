//! Deterministic rule-based annotation backend.
//!
//! The baseline exists so pipelines can run offline and reproducibly: its
//! GI rule is the keyword filter plus an exception-cue veto within the same
//! sentence, its symptom output is the matched keyword spans, and its food
//! output is the review tokens found in the lookup table. It is a pure
//! function of the review text and the loaded tables.

use std::path::Path;

use crate::corpus::Review;
use crate::data;
use crate::disambiguation::FoodLookupTable;
use crate::error::Result;
use crate::filter::{match_keywords, KeywordList};
use crate::tokenize;

use super::{AnnotationResult, ParsedAnnotation, Task};

#[derive(Debug, Clone)]
pub struct BaselineAnnotator {
    keywords: KeywordList,
    /// Exception cues, pre-tokenized into word sequences.
    exceptions: Vec<Vec<String>>,
    food_table: FoodLookupTable,
}

impl BaselineAnnotator {
    pub fn new(
        keywords: KeywordList,
        exception_terms: &[String],
        food_table: FoodLookupTable,
    ) -> BaselineAnnotator {
        let exceptions = exception_terms
            .iter()
            .map(|t| tokenize::words(t))
            .filter(|words| !words.is_empty())
            .collect();
        BaselineAnnotator {
            keywords,
            exceptions,
            food_table,
        }
    }

    /// Baseline over the bundled keyword list, exception cues, and sample
    /// food table.
    pub fn bundled() -> BaselineAnnotator {
        let exceptions = parse_exception_terms(data::GI_EXCEPTIONS);
        BaselineAnnotator::new(KeywordList::bundled(), &exceptions, FoodLookupTable::bundled())
    }

    pub fn annotate(&self, review: &Review, task: Task) -> AnnotationResult {
        match task {
            Task::GiClassification => {
                let gi = self.classify_gi(&review.text);
                AnnotationResult {
                    review_id: review.id.clone(),
                    task,
                    raw_generation: if gi { "True" } else { "False" }.to_string(),
                    parsed: ParsedAnnotation::Gi(gi),
                    parse_ok: true,
                }
            }
            Task::SymptomExtraction => {
                let mentions = self.symptom_mentions(&review.text);
                AnnotationResult {
                    review_id: review.id.clone(),
                    task,
                    raw_generation: format!("[{}]", mentions.join(", ")),
                    parsed: ParsedAnnotation::Symptoms(mentions),
                    parse_ok: true,
                }
            }
            Task::FoodExtraction => {
                let foods = self.food_mentions(&review.text);
                AnnotationResult {
                    review_id: review.id.clone(),
                    task,
                    raw_generation: format!("[{}]", foods.join(", ")),
                    parsed: ParsedAnnotation::Foods(foods),
                    parse_ok: true,
                }
            }
        }
    }

    /// True when at least one keyword match has no exception cue in its
    /// sentence.
    fn classify_gi(&self, text: &str) -> bool {
        let matches = match_keywords(text, &self.keywords);
        if matches.spans.is_empty() {
            return false;
        }
        let sentences = sentence_spans(text);
        matches.spans.iter().any(|&(start, _)| {
            let sentence = sentences
                .iter()
                .find(|&&(s, e)| start >= s && start < e)
                .copied()
                .unwrap_or((0, text.len()));
            !self.exception_in(&text[sentence.0..sentence.1])
        })
    }

    fn exception_in(&self, sentence: &str) -> bool {
        let words = tokenize::words(sentence);
        self.exceptions
            .iter()
            .any(|term| words.windows(term.len()).any(|win| win == term[..]))
    }

    /// The matched keyword spans, as they appear in the review, first
    /// occurrence per distinct text.
    fn symptom_mentions(&self, text: &str) -> Vec<String> {
        let matches = match_keywords(text, &self.keywords);
        let mut seen = std::collections::BTreeSet::new();
        let mut mentions = Vec::new();
        for &(start, end) in &matches.spans {
            let span = &text[start..end];
            if seen.insert(span.to_lowercase()) {
                mentions.push(span.to_string());
            }
        }
        mentions
    }

    /// Token windows (longest first) whose normalized form is a lookup-table
    /// key.
    fn food_mentions(&self, text: &str) -> Vec<String> {
        let tokens = tokenize::tokenize(text);
        let max_window = self.food_table.max_key_words().max(1);
        let mut seen = std::collections::BTreeSet::new();
        let mut found = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            let mut advanced = false;
            for window in (1..=max_window.min(tokens.len() - i)).rev() {
                let phrase = tokens[i..i + window]
                    .iter()
                    .map(|t| t.text.to_lowercase())
                    .collect::<Vec<_>>()
                    .join(" ");
                let singular = singular_last_word(&phrase);
                if self.food_table.get(&phrase).is_some()
                    || self.food_table.get(&singular).is_some()
                {
                    let span = &text[tokens[i].start..tokens[i + window - 1].end];
                    if seen.insert(phrase.clone()) {
                        found.push(span.to_string());
                    }
                    i += window;
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                i += 1;
            }
        }
        found
    }
}

fn singular_last_word(phrase: &str) -> String {
    match phrase.rsplit_once(' ') {
        Some((head, last)) => format!("{head} {}", crate::disambiguation::singularize(last)),
        None => crate::disambiguation::singularize(phrase),
    }
}

/// Parse the exception-term file format: one term per line, `#` comments.
pub fn parse_exception_terms(text: &str) -> Vec<String> {
    text.lines()
        .map(|line| match line.find('#') {
            Some(idx) => line[..idx].trim(),
            None => line.trim(),
        })
        .filter(|line| !line.is_empty())
        .map(str::to_lowercase)
        .collect()
}

pub fn load_exception_terms(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|source| crate::error::Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parse_exception_terms(&text))
}

/// Sentence byte spans, split on `.`, `!`, `?`, and newlines. An ellipsis
/// character does not end a sentence.
fn sentence_spans(text: &str) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut start = 0usize;
    for (idx, c) in text.char_indices() {
        if matches!(c, '.' | '!' | '?' | '\n') {
            let end = idx + c.len_utf8();
            if text[start..end].chars().any(|c| !c.is_whitespace()) {
                spans.push((start, end));
            }
            start = end;
        }
    }
    if start < text.len() && text[start..].chars().any(|c| !c.is_whitespace()) {
        spans.push((start, text.len()));
    }
    spans
}
