//! Bundled default tables and prompts.
//!
//! Every table is plain data so it can be edited and reloaded without
//! rebuilding; these constants are the shipped defaults. The files live
//! under `data/` in the crate source.

/// GI-relevance search terms, one per line.
pub const KEYWORDS: &str = include_str!("../data/keywords.txt");

/// Symptom disambiguation fragments (`label<TAB>fragment`).
pub const SYMPTOM_STEMS: &str = include_str!("../data/symptom_stems.tsv");

/// Sample food lookup table (`term<TAB>label[<TAB>provenance]`).
pub const FOOD_LOOKUP: &str = include_str!("../data/food_lookup.tsv");

/// Gender term pairs for social-group substitution.
pub const GENDER_TERMS: &str = include_str!("../data/gender_terms.tsv");

/// Marital-status term pairs for social-group substitution.
pub const MARITAL_TERMS: &str = include_str!("../data/marital_terms.tsv");

/// Exception cues used by the rule-based baseline GI classifier.
pub const GI_EXCEPTIONS: &str = include_str!("../data/gi_exceptions.txt");

/// Bundled prompt specs, two variants per task.
pub const PROMPT_GI_A: &str = include_str!("../data/prompts/gi_classification_a.json");
pub const PROMPT_GI_B: &str = include_str!("../data/prompts/gi_classification_b.json");
pub const PROMPT_SYMPTOM_A: &str = include_str!("../data/prompts/symptom_extraction_a.json");
pub const PROMPT_SYMPTOM_B: &str = include_str!("../data/prompts/symptom_extraction_b.json");
pub const PROMPT_FOOD_A: &str = include_str!("../data/prompts/food_extraction_a.json");
pub const PROMPT_FOOD_B: &str = include_str!("../data/prompts/food_extraction_b.json");
