//! Loading, validating, splitting, and summarizing review corpora.
//!
//! Corpora are JSON Lines files: one object per line with `id`, `text`,
//! an optional `meta` string map, and an optional `gold` object
//! `{gi, symptoms, foods}`. Symptom and food gold fields are only present
//! for reviews that were annotated for those tasks; an absent field means
//! "not annotated", which is distinct from an annotated empty list.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::disambiguation::{FoodLabel, SymptomLabel};
use crate::error::{Error, Result};

/// One raw review record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Review {
    pub id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub meta: BTreeMap<String, String>,
}

/// Expert labels for one review.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldAnnotation {
    pub review_id: String,
    pub gi: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symptoms: Option<BTreeSet<SymptomLabel>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub foods: Option<BTreeSet<FoodLabel>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawGold {
    gi: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    symptoms: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    foods: Option<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawRecord {
    id: String,
    text: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    meta: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gold: Option<RawGold>,
}

/// Load a JSONL corpus. With `with_gold`, also return the gold annotations
/// for every record that carries them. Gold labels are validated against the
/// taxonomies either way.
pub fn load_corpus(path: &Path, with_gold: bool) -> Result<(Vec<Review>, Option<Vec<GoldAnnotation>>)> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_corpus(BufReader::new(file), path, with_gold)
}

/// Parse a corpus from any reader; `path` is used in error messages only.
pub fn read_corpus<R: BufRead>(
    reader: R,
    path: &Path,
    with_gold: bool,
) -> Result<(Vec<Review>, Option<Vec<GoldAnnotation>>)> {
    let mut reviews = Vec::new();
    let mut golds = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record: RawRecord =
            serde_json::from_str(&line).map_err(|e| Error::MalformedRecord {
                path: path.to_path_buf(),
                line: line_no,
                message: e.to_string(),
            })?;
        if record.id.is_empty() {
            return Err(Error::MalformedRecord {
                path: path.to_path_buf(),
                line: line_no,
                message: "empty id".to_string(),
            });
        }
        if record.text.is_empty() {
            return Err(Error::MalformedRecord {
                path: path.to_path_buf(),
                line: line_no,
                message: format!("review `{}` has empty text", record.id),
            });
        }
        if !seen.insert(record.id.clone()) {
            return Err(Error::DuplicateId {
                path: path.to_path_buf(),
                line: line_no,
                id: record.id,
            });
        }
        if let Some(raw_gold) = record.gold {
            let gold = validate_gold(raw_gold, &record.id, path, line_no)?;
            golds.push(gold);
        }
        reviews.push(Review {
            id: record.id,
            text: record.text,
            meta: record.meta,
        });
    }
    Ok((reviews, with_gold.then_some(golds)))
}

fn validate_gold(raw: RawGold, id: &str, path: &Path, line: usize) -> Result<GoldAnnotation> {
    let symptoms = match raw.symptoms {
        None => None,
        Some(items) => {
            let mut set = BTreeSet::new();
            for item in items {
                let label = SymptomLabel::from_str(&item).map_err(|l| Error::UnknownLabel {
                    path: path.to_path_buf(),
                    line,
                    taxonomy: "symptom",
                    label: l,
                })?;
                set.insert(label);
            }
            if set.contains(&SymptomLabel::GeneralSickness) && set.len() > 1 {
                return Err(Error::ExclusivityViolation {
                    path: path.to_path_buf(),
                    line,
                    id: id.to_string(),
                });
            }
            Some(set)
        }
    };
    let foods = match raw.foods {
        None => None,
        Some(items) => {
            let mut set = BTreeSet::new();
            for item in items {
                let label = FoodLabel::from_str(&item).map_err(|l| Error::UnknownLabel {
                    path: path.to_path_buf(),
                    line,
                    taxonomy: "food",
                    label: l,
                })?;
                set.insert(label);
            }
            Some(set)
        }
    };
    if !raw.gi && (symptoms.is_some() || foods.is_some()) {
        return Err(Error::MalformedRecord {
            path: path.to_path_buf(),
            line,
            message: format!("review `{id}`: symptom/food annotations require gi = true"),
        });
    }
    Ok(GoldAnnotation {
        review_id: id.to_string(),
        gi: raw.gi,
        symptoms,
        foods,
    })
}

/// Write a corpus back to JSONL, rejoining gold annotations by review id.
pub fn save_corpus(
    path: &Path,
    reviews: &[Review],
    gold: Option<&[GoldAnnotation]>,
) -> Result<()> {
    let gold_by_id: HashMap<&str, &GoldAnnotation> = gold
        .unwrap_or_default()
        .iter()
        .map(|g| (g.review_id.as_str(), g))
        .collect();
    let mut out = String::new();
    for review in reviews {
        let record = RawRecord {
            id: review.id.clone(),
            text: review.text.clone(),
            meta: review.meta.clone(),
            gold: gold_by_id.get(review.id.as_str()).map(|g| RawGold {
                gi: g.gi,
                symptoms: g
                    .symptoms
                    .as_ref()
                    .map(|s| s.iter().map(|l| l.as_str().to_string()).collect()),
                foods: g
                    .foods
                    .as_ref()
                    .map(|s| s.iter().map(|l| l.as_str().to_string()).collect()),
            }),
        };
        out.push_str(&serde_json::to_string(&record).expect("corpus records serialize"));
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut file = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    file.write_all(bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// A named partition of a corpus: seed plus ordered (name, fraction) pairs
/// summing to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub seed: u64,
    pub fractions: Vec<(String, f64)>,
}

impl SplitSpec {
    pub fn new(seed: u64, fractions: Vec<(String, f64)>) -> Result<SplitSpec> {
        if fractions.is_empty() {
            return Err(Error::InvalidSplitSpec("no splits given".to_string()));
        }
        let mut names = HashSet::new();
        for (name, fraction) in &fractions {
            if name.is_empty() {
                return Err(Error::InvalidSplitSpec("empty split name".to_string()));
            }
            if !names.insert(name.as_str()) {
                return Err(Error::InvalidSplitSpec(format!("duplicate split name `{name}`")));
            }
            if !(*fraction > 0.0 && *fraction <= 1.0) {
                return Err(Error::InvalidSplitSpec(format!(
                    "fraction for `{name}` must be in (0, 1], got {fraction}"
                )));
            }
        }
        let sum: f64 = fractions.iter().map(|(_, f)| f).sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidSplitSpec(format!(
                "fractions must sum to 1.0, got {sum}"
            )));
        }
        Ok(SplitSpec { seed, fractions })
    }
}

/// Deterministically partition a corpus.
///
/// Reviews are sorted by id, shuffled with a PRNG seeded from `spec.seed`,
/// and cut into consecutive chunks of `round(fraction * N)` reviews
/// (half-up, clamped to what remains); the last split absorbs the
/// remainder. The result depends only on the id set, the seed, and the
/// fractions, never on input order. Reviews within each split are returned
/// sorted by id.
pub fn split_corpus(reviews: &[Review], spec: &SplitSpec) -> Result<Vec<(String, Vec<Review>)>> {
    if reviews.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut ordered: Vec<&Review> = reviews.iter().collect();
    ordered.sort_by(|a, b| a.id.cmp(&b.id));
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    ordered.shuffle(&mut rng);

    let total = ordered.len();
    let mut sizes = Vec::with_capacity(spec.fractions.len());
    let mut assigned = 0usize;
    for (i, (_, fraction)) in spec.fractions.iter().enumerate() {
        let size = if i + 1 == spec.fractions.len() {
            total - assigned
        } else {
            let want = (fraction * total as f64).round() as usize;
            want.min(total - assigned)
        };
        sizes.push(size);
        assigned += size;
    }

    let mut out = Vec::with_capacity(sizes.len());
    let mut cursor = 0usize;
    for ((name, _), size) in spec.fractions.iter().zip(sizes) {
        let mut chunk: Vec<Review> = ordered[cursor..cursor + size]
            .iter()
            .map(|r| (*r).clone())
            .collect();
        chunk.sort_by(|a, b| a.id.cmp(&b.id));
        out.push((name.clone(), chunk));
        cursor += size;
    }
    Ok(out)
}

/// Which label space a summary counts over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SummaryKind {
    /// Count GI gold booleans as labels `True` / `False` over every review
    /// with a gold record.
    GiClassification,
    /// Count symptom labels over the symptom-annotated subset.
    Symptoms,
    /// Count food labels over the food-annotated subset.
    Foods,
}

/// Descriptive statistics for a corpus, in the shape of the descriptive
/// tables produced by the pipeline: sample counts, text-length stats over
/// whitespace-delimited words, and per-label review counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub total_samples: usize,
    pub unique_labels: usize,
    pub mean_words: f64,
    pub median_words: f64,
    pub min_words: usize,
    pub max_words: usize,
    pub label_counts: BTreeMap<String, usize>,
}

/// Summarize a corpus. Text length is whitespace tokenization; a review
/// carrying several labels counts once per label. Only observed labels
/// appear in `label_counts`.
pub fn summarize(
    reviews: &[Review],
    gold: Option<&[GoldAnnotation]>,
    kind: SummaryKind,
) -> CorpusSummary {
    let gold_by_id: HashMap<&str, &GoldAnnotation> = gold
        .unwrap_or_default()
        .iter()
        .map(|g| (g.review_id.as_str(), g))
        .collect();

    let mut label_counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut word_counts: Vec<usize> = Vec::new();
    for review in reviews {
        let gold = gold_by_id.get(review.id.as_str()).copied();
        let labels: Option<Vec<String>> = match (kind, gold) {
            (_, None) if gold_by_id.is_empty() => Some(Vec::new()),
            (_, None) => None,
            (SummaryKind::GiClassification, Some(g)) => {
                Some(vec![if g.gi { "True" } else { "False" }.to_string()])
            }
            (SummaryKind::Symptoms, Some(g)) => g
                .symptoms
                .as_ref()
                .map(|s| s.iter().map(|l| l.as_str().to_string()).collect()),
            (SummaryKind::Foods, Some(g)) => g
                .foods
                .as_ref()
                .map(|s| s.iter().map(|l| l.as_str().to_string()).collect()),
        };
        // Reviews outside the annotated subset are not part of the summary.
        let Some(labels) = labels else { continue };
        word_counts.push(review.text.split_whitespace().count());
        for label in labels {
            *label_counts.entry(label).or_insert(0) += 1;
        }
    }

    word_counts.sort_unstable();
    let total = word_counts.len();
    let (mean, median) = if total == 0 {
        (0.0, 0.0)
    } else {
        let sum: usize = word_counts.iter().sum();
        let median = if total % 2 == 1 {
            word_counts[total / 2] as f64
        } else {
            (word_counts[total / 2 - 1] + word_counts[total / 2]) as f64 / 2.0
        };
        (sum as f64 / total as f64, median)
    };
    CorpusSummary {
        total_samples: total,
        unique_labels: label_counts.len(),
        mean_words: mean,
        median_words: median,
        min_words: word_counts.first().copied().unwrap_or(0),
        max_words: word_counts.last().copied().unwrap_or(0),
        label_counts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn parse(jsonl: &str, with_gold: bool) -> Result<(Vec<Review>, Option<Vec<GoldAnnotation>>)> {
        read_corpus(Cursor::new(jsonl.to_string()), Path::new("test.jsonl"), with_gold)
    }

    #[test]
    fn loads_valid_records() {
        let (reviews, gold) = parse(
            r#"{"id":"a","text":"great food"}
{"id":"b","text":"got sick","gold":{"gi":true}}
{"id":"c","text":"fine","meta":{"spelling":"standard"}}
"#,
            true,
        )
        .unwrap();
        assert_eq!(reviews.len(), 3);
        assert_eq!(gold.as_ref().unwrap().len(), 1);
        assert_eq!(reviews[2].meta["spelling"], "standard");
    }

    #[test]
    fn rejects_general_sickness_with_other_labels() {
        let err = parse(
            r#"{"id":"a","text":"x","gold":{"gi":true,"symptoms":["general sickness","nausea"]}}"#,
            true,
        )
        .unwrap_err();
        assert!(matches!(err, Error::ExclusivityViolation { line: 1, .. }));
    }

    #[test]
    fn rejects_unknown_food_label() {
        let err = parse(
            r#"{"id":"a","text":"x","gold":{"gi":true,"foods":["pizza"]}}"#,
            true,
        )
        .unwrap_err();
        assert!(matches!(err, Error::UnknownLabel { taxonomy: "food", .. }));
    }

    #[test]
    fn rejects_duplicate_ids() {
        let err = parse(
            "{\"id\":\"a\",\"text\":\"x\"}\n{\"id\":\"a\",\"text\":\"y\"}\n",
            false,
        )
        .unwrap_err();
        assert!(matches!(err, Error::DuplicateId { line: 2, .. }));
    }

    #[test]
    fn reports_line_number_for_malformed_records() {
        let err = parse("{\"id\":\"a\",\"text\":\"x\"}\nnot json\n", false).unwrap_err();
        assert!(matches!(err, Error::MalformedRecord { line: 2, .. }));
    }

    #[test]
    fn rejects_annotations_on_non_gi_reviews() {
        let err = parse(
            r#"{"id":"a","text":"x","gold":{"gi":false,"symptoms":[]}}"#,
            true,
        )
        .unwrap_err();
        assert!(err.to_string().contains("require gi = true"));
    }

    #[test]
    fn empty_annotated_list_is_distinct_from_absent() {
        let (_, gold) = parse(
            r#"{"id":"a","text":"x","gold":{"gi":true,"symptoms":[]}}"#,
            true,
        )
        .unwrap();
        let gold = gold.unwrap();
        assert_eq!(gold[0].symptoms, Some(BTreeSet::new()));
        assert_eq!(gold[0].foods, None);
    }

    fn synthetic_reviews(n: usize) -> Vec<Review> {
        (0..n)
            .map(|i| Review {
                id: format!("r{i:05}"),
                text: format!("review number {i}"),
                meta: BTreeMap::new(),
            })
            .collect()
    }

    #[test]
    fn split_sizes_follow_round_half_up_with_remainder_last() {
        let reviews = synthetic_reviews(3069);
        let spec = SplitSpec::new(
            7,
            vec![("val".to_string(), 0.2), ("test".to_string(), 0.8)],
        )
        .unwrap();
        let splits = split_corpus(&reviews, &spec).unwrap();
        assert_eq!(splits[0].1.len(), 614);
        assert_eq!(splits[1].1.len(), 2455);
    }

    #[test]
    fn split_handles_exact_fractions() {
        let reviews = synthetic_reviews(10);
        let spec = SplitSpec::new(
            0,
            vec![
                ("train".to_string(), 0.7),
                ("val".to_string(), 0.1),
                ("test".to_string(), 0.2),
            ],
        )
        .unwrap();
        let sizes: Vec<usize> = split_corpus(&reviews, &spec)
            .unwrap()
            .iter()
            .map(|(_, r)| r.len())
            .collect();
        assert_eq!(sizes, vec![7, 1, 2]);
    }

    #[test]
    fn split_is_deterministic_and_order_independent() {
        let reviews = synthetic_reviews(100);
        let mut reversed = reviews.clone();
        reversed.reverse();
        let spec = SplitSpec::new(
            42,
            vec![("a".to_string(), 0.3), ("b".to_string(), 0.7)],
        )
        .unwrap();
        let first = split_corpus(&reviews, &spec).unwrap();
        let second = split_corpus(&reversed, &spec).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn split_rejects_empty_corpus() {
        let spec = SplitSpec::new(0, vec![("all".to_string(), 1.0)]).unwrap();
        assert!(matches!(split_corpus(&[], &spec), Err(Error::EmptyCorpus)));
    }

    #[test]
    fn split_spec_validates_fractions() {
        assert!(SplitSpec::new(0, vec![("a".to_string(), 0.5)]).is_err());
        assert!(SplitSpec::new(0, vec![("a".to_string(), 0.0), ("b".to_string(), 1.0)]).is_err());
        assert!(SplitSpec::new(
            0,
            vec![("a".to_string(), 0.5), ("a".to_string(), 0.5)]
        )
        .is_err());
    }

    #[test]
    fn summarize_singleton() {
        let reviews = vec![Review {
            id: "a".to_string(),
            text: "a b c".to_string(),
            meta: BTreeMap::new(),
        }];
        let summary = summarize(&reviews, None, SummaryKind::GiClassification);
        assert_eq!(summary.total_samples, 1);
        assert_eq!(summary.mean_words, 3.0);
        assert_eq!(summary.median_words, 3.0);
        assert_eq!(summary.min_words, 3);
        assert_eq!(summary.max_words, 3);
    }

    #[test]
    fn summarize_counts_multi_label_reviews_once_per_label() {
        let reviews = vec![
            Review { id: "a".to_string(), text: "x".to_string(), meta: BTreeMap::new() },
            Review { id: "b".to_string(), text: "y".to_string(), meta: BTreeMap::new() },
        ];
        let gold = vec![
            GoldAnnotation {
                review_id: "a".to_string(),
                gi: true,
                symptoms: Some([SymptomLabel::Diarrhoea].into()),
                foods: None,
            },
            GoldAnnotation {
                review_id: "b".to_string(),
                gi: true,
                symptoms: Some([SymptomLabel::Diarrhoea, SymptomLabel::Vomiting].into()),
                foods: None,
            },
        ];
        let summary = summarize(&reviews, Some(&gold), SummaryKind::Symptoms);
        assert_eq!(summary.total_samples, 2);
        assert_eq!(summary.label_counts["diarrhoea"], 2);
        assert_eq!(summary.label_counts["vomiting"], 1);
        assert_eq!(summary.unique_labels, 2);
    }

    #[test]
    fn save_then_load_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        let jsonl = r#"{"id":"a","text":"hello there","meta":{"spelling":"standard"},"gold":{"gi":true,"symptoms":["vomiting"],"foods":["poultry","rice"]}}
{"id":"b","text":"plain review"}
"#;
        let (reviews, gold) = parse(jsonl, true).unwrap();
        save_corpus(&path, &reviews, gold.as_deref()).unwrap();
        let (reviews2, gold2) = load_corpus(&path, true).unwrap();
        assert_eq!(reviews, reviews2);
        assert_eq!(gold, gold2);
    }
}
