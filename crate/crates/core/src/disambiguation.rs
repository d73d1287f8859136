//! Normalization of free-text symptom and food mentions onto closed label
//! taxonomies.
//!
//! Symptom mentions are matched against a table of word-prefix stems and
//! phrases; anything that matches nothing falls back to `general sickness`.
//! Food mentions go through a clarifier-stripping / singularizing pipeline
//! and are then looked up verbatim in a term table.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data;
use crate::error::{Error, Result};
use crate::tokenize;

/// The closed symptom taxonomy. `GeneralSickness` is the fallback label and
/// is never combined with the others.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SymptomLabel {
    #[serde(rename = "diarrhoea")]
    Diarrhoea,
    #[serde(rename = "vomiting")]
    Vomiting,
    #[serde(rename = "abdominal pain")]
    AbdominalPain,
    #[serde(rename = "bloody stool")]
    BloodyStool,
    #[serde(rename = "nausea")]
    Nausea,
    #[serde(rename = "general sickness")]
    GeneralSickness,
}

impl SymptomLabel {
    pub const ALL: [SymptomLabel; 6] = [
        SymptomLabel::Diarrhoea,
        SymptomLabel::Vomiting,
        SymptomLabel::AbdominalPain,
        SymptomLabel::BloodyStool,
        SymptomLabel::Nausea,
        SymptomLabel::GeneralSickness,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SymptomLabel::Diarrhoea => "diarrhoea",
            SymptomLabel::Vomiting => "vomiting",
            SymptomLabel::AbdominalPain => "abdominal pain",
            SymptomLabel::BloodyStool => "bloody stool",
            SymptomLabel::Nausea => "nausea",
            SymptomLabel::GeneralSickness => "general sickness",
        }
    }
}

impl fmt::Display for SymptomLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SymptomLabel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .iter()
            .find(|l| l.as_str() == s)
            .copied()
            .ok_or_else(|| s.to_string())
    }
}

/// The closed 27-label food taxonomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FoodLabel {
    #[serde(rename = "meat")]
    Meat,
    #[serde(rename = "beef")]
    Beef,
    #[serde(rename = "other meat")]
    OtherMeat,
    #[serde(rename = "pork")]
    Pork,
    #[serde(rename = "mutton/lamb")]
    MuttonLamb,
    #[serde(rename = "poultry")]
    Poultry,
    #[serde(rename = "cured meat")]
    CuredMeat,
    #[serde(rename = "sausage")]
    Sausage,
    #[serde(rename = "other processed meat")]
    OtherProcessedMeat,
    #[serde(rename = "seafood")]
    Seafood,
    #[serde(rename = "fish")]
    Fish,
    #[serde(rename = "shellfish")]
    Shellfish,
    #[serde(rename = "other seafood")]
    OtherSeafood,
    #[serde(rename = "dairy")]
    Dairy,
    #[serde(rename = "eggs")]
    Eggs,
    #[serde(rename = "rice")]
    Rice,
    #[serde(rename = "vegetable")]
    Vegetable,
    #[serde(rename = "lettuce")]
    Lettuce,
    #[serde(rename = "salad")]
    Salad,
    #[serde(rename = "sprouts")]
    Sprouts,
    #[serde(rename = "funghi")]
    Funghi,
    #[serde(rename = "herbs")]
    Herbs,
    #[serde(rename = "nuts and seeds")]
    NutsAndSeeds,
    #[serde(rename = "tofu and other soy")]
    TofuAndOtherSoy,
    #[serde(rename = "fruit")]
    Fruit,
    #[serde(rename = "berries")]
    Berries,
    #[serde(rename = "other")]
    Other,
}

impl FoodLabel {
    pub const ALL: [FoodLabel; 27] = [
        FoodLabel::Meat,
        FoodLabel::Beef,
        FoodLabel::OtherMeat,
        FoodLabel::Pork,
        FoodLabel::MuttonLamb,
        FoodLabel::Poultry,
        FoodLabel::CuredMeat,
        FoodLabel::Sausage,
        FoodLabel::OtherProcessedMeat,
        FoodLabel::Seafood,
        FoodLabel::Fish,
        FoodLabel::Shellfish,
        FoodLabel::OtherSeafood,
        FoodLabel::Dairy,
        FoodLabel::Eggs,
        FoodLabel::Rice,
        FoodLabel::Vegetable,
        FoodLabel::Lettuce,
        FoodLabel::Salad,
        FoodLabel::Sprouts,
        FoodLabel::Funghi,
        FoodLabel::Herbs,
        FoodLabel::NutsAndSeeds,
        FoodLabel::TofuAndOtherSoy,
        FoodLabel::Fruit,
        FoodLabel::Berries,
        FoodLabel::Other,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FoodLabel::Meat => "meat",
            FoodLabel::Beef => "beef",
            FoodLabel::OtherMeat => "other meat",
            FoodLabel::Pork => "pork",
            FoodLabel::MuttonLamb => "mutton/lamb",
            FoodLabel::Poultry => "poultry",
            FoodLabel::CuredMeat => "cured meat",
            FoodLabel::Sausage => "sausage",
            FoodLabel::OtherProcessedMeat => "other processed meat",
            FoodLabel::Seafood => "seafood",
            FoodLabel::Fish => "fish",
            FoodLabel::Shellfish => "shellfish",
            FoodLabel::OtherSeafood => "other seafood",
            FoodLabel::Dairy => "dairy",
            FoodLabel::Eggs => "eggs",
            FoodLabel::Rice => "rice",
            FoodLabel::Vegetable => "vegetable",
            FoodLabel::Lettuce => "lettuce",
            FoodLabel::Salad => "salad",
            FoodLabel::Sprouts => "sprouts",
            FoodLabel::Funghi => "funghi",
            FoodLabel::Herbs => "herbs",
            FoodLabel::NutsAndSeeds => "nuts and seeds",
            FoodLabel::TofuAndOtherSoy => "tofu and other soy",
            FoodLabel::Fruit => "fruit",
            FoodLabel::Berries => "berries",
            FoodLabel::Other => "other",
        }
    }
}

impl fmt::Display for FoodLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FoodLabel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .iter()
            .find(|l| l.as_str() == s)
            .copied()
            .ok_or_else(|| s.to_string())
    }
}

/// A single match rule in the stem table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Fragment {
    /// Matches any word that starts with the stem ("vom" hits "vomiting").
    Prefix(String),
    /// Matches only the exact word (file syntax: leading `=`).
    ExactWord(String),
    /// Matches the word sequence anywhere in the mention.
    Phrase(Vec<String>),
}

impl Fragment {
    fn parse(raw: &str) -> Fragment {
        if let Some(word) = raw.strip_prefix('=') {
            Fragment::ExactWord(word.to_string())
        } else if raw.contains(char::is_whitespace) {
            Fragment::Phrase(raw.split_whitespace().map(str::to_string).collect())
        } else {
            Fragment::Prefix(raw.to_string())
        }
    }

    fn matches(&self, words: &[String]) -> bool {
        match self {
            Fragment::Prefix(stem) => words.iter().any(|w| w.starts_with(stem.as_str())),
            Fragment::ExactWord(word) => words.iter().any(|w| w == word),
            Fragment::Phrase(phrase) => words.windows(phrase.len()).any(|win| win == phrase[..]),
        }
    }
}

/// Mapping from each non-fallback symptom label to its match fragments.
#[derive(Debug, Clone)]
pub struct StemTable {
    entries: Vec<(SymptomLabel, Fragment)>,
}

impl StemTable {
    /// The table shipped with the crate (see `data/symptom_stems.tsv`).
    pub fn bundled() -> StemTable {
        Self::parse(data::SYMPTOM_STEMS, Path::new("<bundled symptom stems>"))
            .expect("bundled stem table is valid")
    }

    pub fn from_file(path: &Path) -> Result<StemTable> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    /// Parse a tab-delimited `label<TAB>fragment` table. `#` starts a comment,
    /// fragments are lowercased, and a leading `=` marks an exact-word rule.
    pub fn parse(text: &str, path: &Path) -> Result<StemTable> {
        let mut entries = Vec::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = strip_comment(raw_line).trim();
            if line.is_empty() {
                continue;
            }
            let entry_err = |message: String| Error::InvalidTableEntry {
                path: path.to_path_buf(),
                line: idx + 1,
                message,
            };
            let (label_str, fragment_str) = line
                .split_once('\t')
                .map(|(a, b)| (a.trim(), b.trim()))
                .ok_or_else(|| entry_err("expected `label<TAB>fragment`".to_string()))?;
            let label = SymptomLabel::from_str(label_str).map_err(|l| Error::UnknownLabel {
                path: path.to_path_buf(),
                line: idx + 1,
                taxonomy: "symptom",
                label: l,
            })?;
            if label == SymptomLabel::GeneralSickness {
                return Err(entry_err(
                    "`general sickness` is the fallback label and takes no fragments".to_string(),
                ));
            }
            if fragment_str.is_empty() || fragment_str == "=" {
                return Err(entry_err("empty fragment".to_string()));
            }
            entries.push((label, Fragment::parse(&fragment_str.to_lowercase())));
        }
        let table = StemTable { entries };
        for label in SymptomLabel::ALL {
            if label == SymptomLabel::GeneralSickness {
                continue;
            }
            if !table.entries.iter().any(|(l, _)| *l == label) {
                return Err(Error::InvalidTableEntry {
                    path: path.to_path_buf(),
                    line: 0,
                    message: format!("no fragments for label `{label}`"),
                });
            }
        }
        Ok(table)
    }

    pub fn entries(&self) -> &[(SymptomLabel, Fragment)] {
        &self.entries
    }
}

/// Map raw symptom mentions onto symptom labels.
///
/// Each mention is lowercased and tokenized; a prefix stem matches when any
/// word starts with it, a phrase when its words occur consecutively. The
/// union of matched labels is returned. Non-empty input that matches nothing
/// yields `{general sickness}`; empty input yields the empty set.
pub fn disambiguate_symptoms(mentions: &[String], table: &StemTable) -> BTreeSet<SymptomLabel> {
    let mut labels = BTreeSet::new();
    for mention in mentions {
        let words = tokenize::words(mention);
        for (label, fragment) in &table.entries {
            if fragment.matches(&words) {
                labels.insert(*label);
            }
        }
    }
    if labels.is_empty() && !mentions.is_empty() {
        labels.insert(SymptomLabel::GeneralSickness);
    }
    labels
}

/// Provenance of a lookup-table entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    #[serde(rename = "foodex")]
    FoodexDerived,
    #[serde(rename = "supplementary")]
    Supplementary,
}

#[derive(Debug, Clone)]
pub struct FoodEntry {
    pub label: FoodLabel,
    pub provenance: Provenance,
}

/// Exact-match term table mapping normalized food terms to labels.
///
/// Keys must be lowercase, clarifier-free, and in singular form; lookup never
/// falls back to fuzzy matching.
#[derive(Debug, Clone)]
pub struct FoodLookupTable {
    entries: BTreeMap<String, FoodEntry>,
}

impl FoodLookupTable {
    /// The sample table shipped with the crate. It covers all 27 labels with
    /// common terms; production use is expected to load a much larger table.
    pub fn bundled() -> FoodLookupTable {
        Self::parse(data::FOOD_LOOKUP, Path::new("<bundled food lookup>"))
            .expect("bundled food lookup table is valid")
    }

    pub fn from_file(path: &Path) -> Result<FoodLookupTable> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    /// Parse a tab-delimited `term<TAB>label[<TAB>provenance]` table.
    /// Provenance is `foodex` or `supplementary` and defaults to the latter.
    pub fn parse(text: &str, path: &Path) -> Result<FoodLookupTable> {
        let mut entries = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = strip_comment(raw_line).trim();
            if line.is_empty() {
                continue;
            }
            let entry_err = |message: String| Error::InvalidTableEntry {
                path: path.to_path_buf(),
                line: idx + 1,
                message,
            };
            let mut cols = line.split('\t').map(str::trim);
            let term = cols.next().unwrap_or_default();
            let label_str = cols
                .next()
                .ok_or_else(|| entry_err("expected `term<TAB>label`".to_string()))?;
            if term.is_empty() {
                return Err(entry_err("empty term".to_string()));
            }
            if term != term.to_lowercase() {
                return Err(entry_err(format!("term `{term}` must be lowercase")));
            }
            if term.contains('(') || term.contains(')') {
                return Err(entry_err(format!(
                    "term `{term}` must not contain parenthesized clarifiers"
                )));
            }
            let label = FoodLabel::from_str(label_str).map_err(|l| Error::UnknownLabel {
                path: path.to_path_buf(),
                line: idx + 1,
                taxonomy: "food",
                label: l,
            })?;
            let provenance = match cols.next() {
                None => Provenance::Supplementary,
                Some("foodex") => Provenance::FoodexDerived,
                Some("supplementary") => Provenance::Supplementary,
                Some(other) => {
                    return Err(entry_err(format!(
                        "provenance must be `foodex` or `supplementary`, got `{other}`"
                    )))
                }
            };
            if entries
                .insert(term.to_string(), FoodEntry { label, provenance })
                .is_some()
            {
                return Err(entry_err(format!("duplicate term `{term}`")));
            }
        }
        Ok(FoodLookupTable { entries })
    }

    pub fn get(&self, term: &str) -> Option<&FoodEntry> {
        self.entries.get(term)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// The largest number of words in any key, used by scanners that try
    /// multi-word windows.
    pub fn max_key_words(&self) -> usize {
        self.entries
            .keys()
            .map(|k| k.split(' ').count())
            .max()
            .unwrap_or(0)
    }
}

/// Produce the lookup candidates for one extracted food term.
///
/// Pipeline: lowercase, strip parenthesized clarifiers, then emit the full
/// phrase followed by every constituent word, each word followed by its
/// singular form. Duplicates keep their first position.
pub fn normalize_food_term(term: &str) -> Vec<String> {
    let lowered = term.to_lowercase();
    let stripped = strip_clarifiers(&lowered);
    let words: Vec<&str> = stripped.split_whitespace().collect();
    let mut out: Vec<String> = Vec::new();
    let mut push = |candidate: String, out: &mut Vec<String>| {
        if !candidate.is_empty() && !out.contains(&candidate) {
            out.push(candidate);
        }
    };
    push(words.join(" "), &mut out);
    for word in &words {
        push((*word).to_string(), &mut out);
        push(singularize(word), &mut out);
    }
    out
}

/// Map extracted food spans onto food labels via the lookup table.
///
/// Every candidate of every span is looked up; all hits are unioned. Spans
/// with no hit contribute nothing.
pub fn disambiguate_foods(spans: &[String], table: &FoodLookupTable) -> BTreeSet<FoodLabel> {
    let mut labels = BTreeSet::new();
    for span in spans {
        for candidate in normalize_food_term(span) {
            if let Some(entry) = table.get(&candidate) {
                labels.insert(entry.label);
            }
        }
    }
    labels
}

/// Remove parenthesized groups and collapse the remaining whitespace.
fn strip_clarifiers(text: &str) -> String {
    let mut depth = 0usize;
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            _ if depth == 0 => out.push(c),
            _ => {}
        }
    }
    out.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Rule-based singularization: `ies`→`y`, a few `es` suffixes drop `es`,
/// otherwise a trailing `s` is dropped. Irregular plurals come from a small
/// exception list; words ending in `ss` are left alone.
pub fn singularize(word: &str) -> String {
    const IRREGULAR: &[(&str, &str)] = &[
        ("leaves", "leaf"),
        ("loaves", "loaf"),
        ("halves", "half"),
        ("calves", "calf"),
        ("knives", "knife"),
        ("tomatoes", "tomato"),
        ("potatoes", "potato"),
        ("cheeses", "cheese"),
    ];
    if let Some((_, singular)) = IRREGULAR.iter().find(|(plural, _)| *plural == word) {
        return (*singular).to_string();
    }
    if word.len() >= 5 {
        if let Some(stem) = word.strip_suffix("ies") {
            return format!("{stem}y");
        }
    }
    for suffix in ["ches", "shes", "ses", "xes", "zes"] {
        if let Some(stem) = word.strip_suffix(suffix) {
            return format!("{}{}", stem, &suffix[..suffix.len() - 2]);
        }
    }
    if word.len() > 1 && word.ends_with('s') && !word.ends_with("ss") {
        return word[..word.len() - 1].to_string();
    }
    word.to_string()
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(idx) => &line[..idx],
        None => line,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mentions(items: &[&str]) -> Vec<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn vomiting_and_diarrhea_map_to_their_labels() {
        let got = disambiguate_symptoms(&mentions(&["vomiting", "diarrhea"]), &StemTable::bundled());
        let want: BTreeSet<_> = [SymptomLabel::Vomiting, SymptomLabel::Diarrhoea].into();
        assert_eq!(got, want);
    }

    #[test]
    fn puking_disambiguates_to_vomiting() {
        let got = disambiguate_symptoms(&mentions(&["puking"]), &StemTable::bundled());
        assert_eq!(got, [SymptomLabel::Vomiting].into());
    }

    #[test]
    fn unmatched_mentions_fall_back_to_general_sickness() {
        let got = disambiguate_symptoms(&mentions(&["got sick"]), &StemTable::bundled());
        assert_eq!(got, [SymptomLabel::GeneralSickness].into());
    }

    #[test]
    fn no_mentions_yield_no_labels() {
        assert!(disambiguate_symptoms(&[], &StemTable::bundled()).is_empty());
    }

    #[test]
    fn run_matches_only_as_exact_word() {
        let table = StemTable::bundled();
        assert_eq!(
            disambiguate_symptoms(&mentions(&["the runs"]), &table),
            [SymptomLabel::Diarrhoea].into()
        );
        // "runny nose" must not be pulled into diarrhoea by a naive prefix.
        assert_eq!(
            disambiguate_symptoms(&mentions(&["runny nose"]), &table),
            [SymptomLabel::GeneralSickness].into()
        );
    }

    #[test]
    fn phrases_match_on_word_boundaries() {
        let table = StemTable::bundled();
        assert_eq!(
            disambiguate_symptoms(&mentions(&["a very upset stomach"]), &table),
            [SymptomLabel::Diarrhoea].into()
        );
        assert_eq!(
            disambiguate_symptoms(&mentions(&["bad stomach ache"]), &table),
            [SymptomLabel::AbdominalPain].into()
        );
    }

    #[test]
    fn every_bundled_fragment_maps_to_its_own_label() {
        let table = StemTable::bundled();
        for (label, fragment) in table.entries() {
            let mention = match fragment {
                Fragment::Prefix(s) | Fragment::ExactWord(s) => s.clone(),
                Fragment::Phrase(ws) => ws.join(" "),
            };
            let got = disambiguate_symptoms(&[mention.clone()], &table);
            assert_eq!(
                got,
                [*label].into(),
                "fragment `{mention}` should map to exactly `{label}`"
            );
        }
    }

    #[test]
    fn stem_table_requires_all_non_fallback_labels() {
        let err = StemTable::parse("vomiting\tvom\n", Path::new("t")).unwrap_err();
        assert!(err.to_string().contains("no fragments"));
    }

    #[test]
    fn stem_table_rejects_fragments_for_the_fallback() {
        let err = StemTable::parse("general sickness\tsick\n", Path::new("t")).unwrap_err();
        assert!(err.to_string().contains("fallback"));
    }

    #[test]
    fn clarifiers_are_stripped() {
        assert_eq!(normalize_food_term("chicken (fresh meat)"), vec!["chicken"]);
    }

    #[test]
    fn plural_terms_add_singular_candidates() {
        assert_eq!(normalize_food_term("eggs"), vec!["eggs", "egg"]);
    }

    #[test]
    fn multi_word_terms_expand_to_words_and_singulars() {
        assert_eq!(
            normalize_food_term("beef tacos"),
            vec!["beef tacos", "beef", "tacos", "taco"]
        );
    }

    #[test]
    fn normalization_is_idempotent_on_its_outputs() {
        for term in ["beef tacos", "eggs", "chicken (fresh meat)", "berries"] {
            for candidate in normalize_food_term(term) {
                assert!(
                    normalize_food_term(&candidate).contains(&candidate),
                    "normalizing `{candidate}` should retain it"
                );
            }
        }
    }

    #[test]
    fn singularize_applies_rules_and_exceptions() {
        assert_eq!(singularize("berries"), "berry");
        assert_eq!(singularize("dishes"), "dish");
        assert_eq!(singularize("boxes"), "box");
        assert_eq!(singularize("buses"), "bus");
        assert_eq!(singularize("tomatoes"), "tomato");
        assert_eq!(singularize("cheeses"), "cheese");
        assert_eq!(singularize("pies"), "pie");
        assert_eq!(singularize("swiss"), "swiss");
        assert_eq!(singularize("beef"), "beef");
    }

    #[test]
    fn bundled_lookup_resolves_the_worked_examples() {
        let table = FoodLookupTable::bundled();
        assert_eq!(
            disambiguate_foods(&mentions(&["chicken"]), &table),
            [FoodLabel::Poultry].into()
        );
        assert_eq!(
            disambiguate_foods(&mentions(&["beef", "salad"]), &table),
            [FoodLabel::Beef, FoodLabel::Salad].into()
        );
        assert!(disambiguate_foods(&mentions(&["mystery stew"]), &table).is_empty());
    }

    #[test]
    fn bundled_lookup_covers_every_label() {
        let table = FoodLookupTable::bundled();
        let covered: BTreeSet<FoodLabel> = table
            .terms()
            .map(|t| table.get(t).unwrap().label)
            .collect();
        assert_eq!(covered.len(), FoodLabel::ALL.len());
    }

    #[test]
    fn lookup_table_rejects_unknown_labels_and_bad_keys() {
        let err = FoodLookupTable::parse("pizza\tpizza\n", Path::new("t")).unwrap_err();
        assert!(matches!(err, Error::UnknownLabel { .. }));
        let err = FoodLookupTable::parse("Chicken\tpoultry\n", Path::new("t")).unwrap_err();
        assert!(err.to_string().contains("lowercase"));
        let err = FoodLookupTable::parse("chicken (meat)\tpoultry\n", Path::new("t")).unwrap_err();
        assert!(err.to_string().contains("clarifier"));
    }
}
