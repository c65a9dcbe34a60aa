use rand::seq::index::sample;

use super::EngineConfig;
use crate::corpus::{shuffle_plagiarize, Segment};
use crate::error::{Error, Result};
use crate::metrics::{evaluate_retrieval, RetrievalEvalResult, RetrievalQuery};
use crate::rng::{derive_seed, seeded};
use crate::vecindex::{FlatIndex, IvfPqIndex, Strategy, VectorSearch};

const QUERY_STREAM: u64 = 0x71;
const INDEX_STREAM: u64 = 0x72;

/// Retrieval benchmark over one corpus: every strategy indexes the same
/// segment embeddings and answers the same shuffled-segment queries.
pub struct RetrievalBench {
    pub dim: usize,
    pub ids: Vec<u64>,
    pub data: Vec<f32>,
    pub queries: Vec<RetrievalQuery>,
}

impl RetrievalBench {
    /// Embeds `segments` and derives `n_queries` queries (all segments when
    /// `None`) by shuffling the sentences of randomly chosen segments.
    pub fn prepare(segments: &[Segment], config: &EngineConfig, n_queries: Option<usize>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::EmptyIndex);
        }
        let embedder = config.provider.build()?;
        let texts: Vec<&str> = segments.iter().map(|s| s.text.as_str()).collect();
        let data: Vec<f32> = embedder
            .embed_batch(&texts)?
            .into_iter()
            .flat_map(|v| v.into_values())
            .collect();
        let n = n_queries.unwrap_or(segments.len()).min(segments.len());
        let mut picks = sample(
            &mut seeded(derive_seed(config.seed, QUERY_STREAM, 0)),
            segments.len(),
            n,
        )
        .into_vec();
        picks.sort_unstable();
        let shuffled: Vec<String> = picks
            .iter()
            .map(|&i| {
                shuffle_plagiarize(
                    &segments[i].text,
                    derive_seed(config.seed, QUERY_STREAM, segments[i].id),
                )
            })
            .collect();
        let refs: Vec<&str> = shuffled.iter().map(String::as_str).collect();
        let queries = embedder
            .embed_batch(&refs)?
            .into_iter()
            .zip(&picks)
            .map(|(v, &i)| RetrievalQuery {
                original_id: segments[i].id,
                vector: v.into_values(),
            })
            .collect();
        Ok(RetrievalBench {
            dim: embedder.dimension(),
            ids: segments.iter().map(|s| s.id).collect(),
            data,
            queries,
        })
    }

    pub fn build_index(&self, strategy: Strategy, config: &EngineConfig) -> Result<Box<dyn VectorSearch>> {
        let settings = super::IndexSettings {
            strategy,
            ..config.index
        };
        Ok(match strategy {
            Strategy::Flat => Box::new(FlatIndex::from_rows(self.dim, settings.metric, &self.ids, &self.data)?),
            _ => {
                let cfg = settings.ivf_config(self.dim, derive_seed(config.seed, INDEX_STREAM, 0))?;
                Box::new(IvfPqIndex::build(&cfg, self.dim, &self.ids, &self.data)?)
            }
        })
    }

    pub fn run(&self, strategy: Strategy, config: &EngineConfig) -> Result<RetrievalEvalResult> {
        let index = self.build_index(strategy, config)?;
        evaluate_retrieval(index.as_ref(), &self.queries, config.index.k, Some(config.index.nprobe))
    }
}
