//! OpenAI-compatible chat-completion client.
//!
//! Requests go to `<endpoint>/v1/chat/completions` with temperature 0.
//! Few-shot examples are sent as alternating user/assistant turns rendered
//! through the same template as the review. Transient failures (transport
//! errors, 429, 5xx) are retried with exponential backoff; anything else
//! fails the review. A bearer token is read from the `GISURV_API_TOKEN`
//! environment variable when present.

use std::path::PathBuf;
use std::time::Duration;

use serde_json::json;

use super::cache::CacheRecorder;
use super::PromptSpec;
use crate::corpus::Review;
use crate::error::{Error, Result};

/// Environment variable holding the bearer token for remote backends.
pub const API_TOKEN_ENV: &str = "GISURV_API_TOKEN";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemoteConfig {
    /// Base URL, e.g. `http://localhost:8000`.
    pub endpoint: String,
    pub model: String,
    /// Per-request timeout in seconds.
    pub timeout_secs: u64,
    /// Retries after the first attempt, for transient failures only.
    pub max_retries: u32,
    /// Bounded in-flight request limit.
    pub max_in_flight: usize,
    /// When set, every request/response pair is appended here.
    pub record_cache: Option<PathBuf>,
}

impl RemoteConfig {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>) -> RemoteConfig {
        RemoteConfig {
            endpoint: endpoint.into(),
            model: model.into(),
            timeout_secs: 60,
            max_retries: 3,
            max_in_flight: 4,
            record_cache: None,
        }
    }
}

pub struct RemoteClient {
    config: RemoteConfig,
    http: reqwest::blocking::Client,
    token: Option<String>,
    recorder: Option<CacheRecorder>,
    /// Base backoff delay; shortened in tests.
    backoff: Duration,
}

impl RemoteClient {
    pub fn new(config: RemoteConfig) -> Result<RemoteClient> {
        if config.endpoint.is_empty() {
            return Err(Error::InvalidConfig("remote backend requires an endpoint".to_string()));
        }
        if config.model.is_empty() {
            return Err(Error::InvalidConfig("remote backend requires a model name".to_string()));
        }
        let http = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs))
            .build()
            .map_err(|e| Error::InvalidConfig(format!("http client: {e}")))?;
        let recorder = match &config.record_cache {
            Some(path) => Some(CacheRecorder::open(path)?),
            None => None,
        };
        Ok(RemoteClient {
            config,
            http,
            token: std::env::var(API_TOKEN_ENV).ok(),
            recorder,
            backoff: Duration::from_millis(200),
        })
    }

    #[cfg(test)]
    pub(crate) fn with_backoff(mut self, backoff: Duration) -> RemoteClient {
        self.backoff = backoff;
        self
    }

    pub fn config(&self) -> &RemoteConfig {
        &self.config
    }

    /// Build the chat payload for one review.
    pub fn build_request(&self, prompt: &PromptSpec, review_text: &str) -> serde_json::Value {
        let mut messages = Vec::new();
        for example in prompt.examples.iter().take(prompt.shots as usize) {
            messages.push(json!({"role": "user", "content": prompt.render(&example.input)}));
            messages.push(json!({"role": "assistant", "content": example.output}));
        }
        messages.push(json!({"role": "user", "content": prompt.render(review_text)}));
        json!({
            "model": self.config.model,
            "messages": messages,
            "temperature": 0,
        })
    }

    /// Run one completion, retrying transient failures. Returns the raw
    /// generation text.
    pub fn complete(&self, prompt: &PromptSpec, review: &Review, key: &str) -> Result<String> {
        let request = self.build_request(prompt, &review.text);
        let url = format!(
            "{}/v1/chat/completions",
            self.config.endpoint.trim_end_matches('/')
        );
        let mut last_error = String::new();
        for attempt in 0..=self.config.max_retries {
            if attempt > 0 {
                std::thread::sleep(self.backoff * 2u32.pow(attempt - 1));
            }
            let mut builder = self.http.post(&url).json(&request);
            if let Some(token) = &self.token {
                builder = builder.bearer_auth(token);
            }
            match builder.send() {
                Err(e) => last_error = format!("transport: {e}"),
                Ok(response) => {
                    let status = response.status();
                    if status.is_success() {
                        let body: serde_json::Value =
                            response.json().map_err(|e| Error::Transport {
                                review_id: review.id.clone(),
                                message: format!("invalid response body: {e}"),
                            })?;
                        let content = body
                            .pointer("/choices/0/message/content")
                            .and_then(serde_json::Value::as_str)
                            .ok_or_else(|| Error::Transport {
                                review_id: review.id.clone(),
                                message: "response has no choices[0].message.content".to_string(),
                            })?
                            .to_string();
                        if let Some(recorder) = &self.recorder {
                            recorder.append(key, request.clone(), &content)?;
                        }
                        return Ok(content);
                    }
                    last_error = format!("http status {status}");
                    if !(status.as_u16() == 429 || status.is_server_error()) {
                        break;
                    }
                }
            }
        }
        Err(Error::Transport {
            review_id: review.id.clone(),
            message: last_error,
        })
    }
}
