use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::EmbeddingVector;
use crate::error::{Error, Result};

#[derive(Serialize)]
struct EmbedRequest<'a> {
    texts: &'a [&'a str],
}

#[derive(Deserialize)]
struct EmbedResponse {
    vectors: Vec<Vec<f32>>,
}

/// Client for a sentence-embedding service speaking
/// `POST {"texts": [..]}` -> `{"vectors": [[..], ..]}`.
#[derive(Clone)]
pub struct RemoteEmbedder {
    endpoint: String,
    dimension: usize,
    normalize: bool,
    agent: ureq::Agent,
}

impl std::fmt::Debug for RemoteEmbedder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RemoteEmbedder")
            .field("endpoint", &self.endpoint)
            .field("dimension", &self.dimension)
            .field("normalize", &self.normalize)
            .finish()
    }
}

impl RemoteEmbedder {
    pub fn new(endpoint: impl Into<String>, dimension: usize, normalize: bool) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(60)))
            .build()
            .into();
        RemoteEmbedder {
            endpoint: endpoint.into(),
            dimension,
            normalize,
            agent,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    /// One batched request; output order follows input order.
    pub fn embed_batch(&self, texts: &[&str]) -> Result<Vec<EmbeddingVector>> {
        if texts.is_empty() {
            return Ok(Vec::new());
        }
        let mut resp = self
            .agent
            .post(&self.endpoint)
            .send_json(EmbedRequest { texts })
            .map_err(|e| Error::RemoteUnavailable(format!("{}: {e}", self.endpoint)))?;
        let body: EmbedResponse = resp
            .body_mut()
            .read_json()
            .map_err(|e| Error::RemoteUnavailable(format!("bad response body: {e}")))?;

        if body.vectors.len() != texts.len() {
            return Err(Error::PartialResponse {
                expected: texts.len(),
                got: body.vectors.len(),
            });
        }
        body.vectors
            .into_iter()
            .map(|values| {
                if values.len() != self.dimension {
                    return Err(Error::DimensionMismatch {
                        expected: self.dimension,
                        got: values.len(),
                    });
                }
                if !values.iter().all(|v| v.is_finite()) {
                    return Err(Error::RemoteUnavailable("non-finite vector entry".into()));
                }
                Ok(if self.normalize {
                    let wide: Vec<f64> = values.iter().map(|&v| f64::from(v)).collect();
                    EmbeddingVector::from_f64_normalized(&wide)
                } else {
                    EmbeddingVector::new(values)
                })
            })
            .collect()
    }
}
