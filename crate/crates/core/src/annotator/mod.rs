//! Annotation of reviews through a pluggable backend contract.
//!
//! Three backends share one interface: a remote OpenAI-compatible
//! chat-completion client, a deterministic rule-based baseline, and a
//! replay backend that serves a recorded cache. Results always come back
//! one per review, in input order.

mod baseline;
mod cache;
mod parse;
mod remote;

pub use baseline::{load_exception_terms, parse_exception_terms, BaselineAnnotator};
pub use cache::{cache_key, CacheEntry, CacheRecorder, ReplayCache};
pub use parse::{parse_boolean, parse_list};
pub use remote::{RemoteClient, RemoteConfig, API_TOKEN_ENV};

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;

use serde::{Deserialize, Serialize};

use crate::corpus::Review;
use crate::data;
use crate::error::{Error, Result};

/// The three annotation tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Task {
    #[serde(rename = "gi_classification")]
    GiClassification,
    #[serde(rename = "symptom_extraction")]
    SymptomExtraction,
    #[serde(rename = "food_extraction")]
    FoodExtraction,
}

impl Task {
    pub fn as_str(&self) -> &'static str {
        match self {
            Task::GiClassification => "gi_classification",
            Task::SymptomExtraction => "symptom_extraction",
            Task::FoodExtraction => "food_extraction",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "gi_classification" => Ok(Task::GiClassification),
            "symptom_extraction" => Ok(Task::SymptomExtraction),
            "food_extraction" => Ok(Task::FoodExtraction),
            other => Err(other.to_string()),
        }
    }
}

/// One worked example embedded in a few-shot prompt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptExample {
    pub input: String,
    pub output: String,
}

/// An authored prompt: task, template with a single `{review}` placeholder,
/// shot count, and worked examples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptSpec {
    pub name: String,
    pub task: Task,
    pub template: String,
    pub shots: u8,
    #[serde(default)]
    pub examples: Vec<PromptExample>,
}

pub const PLACEHOLDER: &str = "{review}";

impl PromptSpec {
    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(Error::InvalidPrompt("prompt name is empty".to_string()));
        }
        let count = self.template.matches(PLACEHOLDER).count();
        if count != 1 {
            return Err(Error::InvalidPrompt(format!(
                "template must contain `{PLACEHOLDER}` exactly once, found {count}"
            )));
        }
        if !matches!(self.shots, 0 | 1 | 5) {
            return Err(Error::InvalidPrompt(format!(
                "shots must be 0, 1, or 5, got {}",
                self.shots
            )));
        }
        if (self.shots as usize) > self.examples.len() {
            return Err(Error::InvalidPrompt(format!(
                "{} shots requested but only {} examples provided",
                self.shots,
                self.examples.len()
            )));
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<PromptSpec> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let spec: PromptSpec = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidPrompt(format!("{}: {e}", path.display())))?;
        spec.validate()?;
        Ok(spec)
    }

    /// The bundled default prompt for a task (variant `a`).
    pub fn bundled(task: Task) -> PromptSpec {
        let text = match task {
            Task::GiClassification => data::PROMPT_GI_A,
            Task::SymptomExtraction => data::PROMPT_SYMPTOM_A,
            Task::FoodExtraction => data::PROMPT_FOOD_A,
        };
        let spec: PromptSpec = serde_json::from_str(text).expect("bundled prompt parses");
        spec.validate().expect("bundled prompt is valid");
        spec
    }

    /// The bundled alternate prompt for a task (variant `b`), useful for
    /// fragility sweeps.
    pub fn bundled_alternate(task: Task) -> PromptSpec {
        let text = match task {
            Task::GiClassification => data::PROMPT_GI_B,
            Task::SymptomExtraction => data::PROMPT_SYMPTOM_B,
            Task::FoodExtraction => data::PROMPT_FOOD_B,
        };
        let spec: PromptSpec = serde_json::from_str(text).expect("bundled prompt parses");
        spec.validate().expect("bundled prompt is valid");
        spec
    }

    /// Replace the shot count, revalidating against the example pool.
    pub fn with_shots(mut self, shots: u8) -> Result<PromptSpec> {
        self.shots = shots;
        self.validate()?;
        Ok(self)
    }

    pub fn render(&self, review_text: &str) -> String {
        self.template.replace(PLACEHOLDER, review_text)
    }
}

/// Backend selection plus its connection details.
#[derive(Debug, Clone)]
pub enum BackendConfig {
    Remote(RemoteConfig),
    Baseline(BaselineAnnotator),
    Replay { cache: PathBuf, model: String },
}

/// The parsed payload of one annotation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParsedAnnotation {
    #[serde(rename = "gi")]
    Gi(bool),
    #[serde(rename = "symptoms")]
    Symptoms(Vec<String>),
    #[serde(rename = "foods")]
    Foods(Vec<String>),
}

/// A backend's output for one review on one task. When `parse_ok` is false
/// the parsed value is the documented fallback (`false` / empty list).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationResult {
    pub review_id: String,
    pub task: Task,
    pub raw_generation: String,
    pub parsed: ParsedAnnotation,
    pub parse_ok: bool,
}

/// A review the backend could not annotate after retries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationFailure {
    pub review_id: String,
    pub message: String,
}

/// The outcome of an annotation run: one result per review in input order,
/// plus any transport failures (those reviews carry fallback results).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationRun {
    pub results: Vec<AnnotationResult>,
    pub failures: Vec<AnnotationFailure>,
}

/// Parse a raw generation into the task's value space.
pub fn parse_generation(task: Task, raw: &str) -> (ParsedAnnotation, bool) {
    match task {
        Task::GiClassification => {
            let (value, ok) = parse_boolean(raw);
            (ParsedAnnotation::Gi(value), ok)
        }
        Task::SymptomExtraction => {
            let (items, ok) = parse_list(raw);
            (ParsedAnnotation::Symptoms(items), ok)
        }
        Task::FoodExtraction => {
            let (items, ok) = parse_list(raw);
            (ParsedAnnotation::Foods(items), ok)
        }
    }
}

fn fallback_parsed(task: Task) -> ParsedAnnotation {
    match task {
        Task::GiClassification => ParsedAnnotation::Gi(false),
        Task::SymptomExtraction => ParsedAnnotation::Symptoms(Vec::new()),
        Task::FoodExtraction => ParsedAnnotation::Foods(Vec::new()),
    }
}

/// A ready-to-run annotation backend.
pub struct Annotator {
    backend: Backend,
}

enum Backend {
    Remote(RemoteClient),
    Baseline(BaselineAnnotator),
    Replay { cache: ReplayCache, model: String },
}

impl Annotator {
    pub fn new(config: BackendConfig) -> Result<Annotator> {
        let backend = match config {
            BackendConfig::Remote(remote) => Backend::Remote(RemoteClient::new(remote)?),
            BackendConfig::Baseline(baseline) => Backend::Baseline(baseline),
            BackendConfig::Replay { cache, model } => {
                if model.is_empty() {
                    return Err(Error::InvalidConfig(
                        "replay backend requires the model name used when recording".to_string(),
                    ));
                }
                Backend::Replay {
                    cache: ReplayCache::load(&cache)?,
                    model,
                }
            }
        };
        Ok(Annotator { backend })
    }

    /// The model identifier used in cache keys and reports.
    pub fn model_name(&self) -> &str {
        match &self.backend {
            Backend::Remote(client) => &client.config().model,
            Backend::Baseline(_) => "baseline",
            Backend::Replay { model, .. } => model,
        }
    }

    /// Annotate every review with one prompt. Results come back in input
    /// order. Remote transport failures mark the review failed and the run
    /// continues; a replay cache miss aborts, since replay must be
    /// deterministic.
    pub fn annotate(&self, reviews: &[Review], prompt: &PromptSpec) -> Result<AnnotationRun> {
        prompt.validate()?;
        match &self.backend {
            Backend::Baseline(baseline) => Ok(AnnotationRun {
                results: reviews
                    .iter()
                    .map(|r| baseline.annotate(r, prompt.task))
                    .collect(),
                failures: Vec::new(),
            }),
            Backend::Replay { cache, model } => {
                let mut results = Vec::with_capacity(reviews.len());
                for review in reviews {
                    let key = cache_key(
                        prompt.task,
                        &prompt.name,
                        prompt.shots,
                        model,
                        &review.id,
                        &review.text,
                    );
                    let raw = cache.get(&key).ok_or_else(|| Error::CacheMiss {
                        review_id: review.id.clone(),
                        key: key.clone(),
                    })?;
                    let (parsed, parse_ok) = parse_generation(prompt.task, raw);
                    results.push(AnnotationResult {
                        review_id: review.id.clone(),
                        task: prompt.task,
                        raw_generation: raw.to_string(),
                        parsed,
                        parse_ok,
                    });
                }
                Ok(AnnotationRun {
                    results,
                    failures: Vec::new(),
                })
            }
            Backend::Remote(client) => Ok(annotate_remote(client, reviews, prompt)),
        }
    }
}

/// Fan requests out over a bounded worker pool; slot results by index so
/// output order matches input order regardless of completion order.
fn annotate_remote(client: &RemoteClient, reviews: &[Review], prompt: &PromptSpec) -> AnnotationRun {
    let n = reviews.len();
    let workers = client.config().max_in_flight.max(1).min(n.max(1));
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<(usize, Result<String>)>();

    std::thread::scope(|scope| {
        for _ in 0..workers {
            let tx = tx.clone();
            let next = &next;
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let review = &reviews[i];
                let key = cache_key(
                    prompt.task,
                    &prompt.name,
                    prompt.shots,
                    &client.config().model,
                    &review.id,
                    &review.text,
                );
                let outcome = client.complete(prompt, review, &key);
                if tx.send((i, outcome)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
    });

    let mut slots: Vec<Option<Result<String>>> = (0..n).map(|_| None).collect();
    for (i, outcome) in rx {
        slots[i] = Some(outcome);
    }

    let mut results = Vec::with_capacity(n);
    let mut failures = Vec::new();
    for (review, slot) in reviews.iter().zip(slots) {
        match slot.expect("every review produces an outcome") {
            Ok(raw) => {
                let (parsed, parse_ok) = parse_generation(prompt.task, &raw);
                results.push(AnnotationResult {
                    review_id: review.id.clone(),
                    task: prompt.task,
                    raw_generation: raw,
                    parsed,
                    parse_ok,
                });
            }
            Err(e) => {
                failures.push(AnnotationFailure {
                    review_id: review.id.clone(),
                    message: e.to_string(),
                });
                results.push(AnnotationResult {
                    review_id: review.id.clone(),
                    task: prompt.task,
                    raw_generation: String::new(),
                    parsed: fallback_parsed(prompt.task),
                    parse_ok: false,
                });
            }
        }
    }
    AnnotationRun { results, failures }
}
