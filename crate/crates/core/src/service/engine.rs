use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::EngineConfig;
use crate::binio::{Reader, Writer};
use crate::classifier::{
    predict, train_with_callback, EpochStats, LabeledPair, MlpParams, PlagiarismLabel, TrainOutcome,
};
use crate::corpus::{read_jsonl, write_jsonl, Segment, TextPair};
use crate::embed::{count_tokens, Embedder, MAX_TOKENS};
use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::vecindex::{FlatIndex, IvfPqIndex, Strategy, VectorSearch};

const INDEX_STREAM: u64 = 0x61;
const CLASSIFIER_STREAM: u64 = 0x62;
const EMBEDDINGS_MAGIC: &[u8; 4] = b"SSEM";
const REMOTE_BATCH: usize = 64;

pub const CONFIG_FILE: &str = "engine.toml";
pub const SEGMENTS_FILE: &str = "segments.jsonl";
pub const EMBEDDINGS_FILE: &str = "embeddings.ssem";
pub const INDEX_FILE: &str = "index.ssix";
pub const PARAMS_FILE: &str = "params.ssmp";

#[derive(Debug, Clone)]
pub enum EngineIndex {
    Flat(FlatIndex),
    Ivf(IvfPqIndex),
}

impl EngineIndex {
    pub fn as_search(&self) -> &dyn VectorSearch {
        match self {
            EngineIndex::Flat(f) => f,
            EngineIndex::Ivf(i) => i,
        }
    }

    fn save(&self, path: &Path) -> Result<()> {
        match self {
            EngineIndex::Flat(f) => f.save(path),
            EngineIndex::Ivf(i) => i.save(path),
        }
    }
}

/// Whether ingested segments are added to the store or replace it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IngestMode {
    #[default]
    Replace,
    Append,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub ingested: usize,
    pub segments: usize,
    pub indexed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub rank: usize,
    pub segment_id: u64,
    pub doc_id: String,
    pub text: String,
    pub score: f64,
    pub label: PlagiarismLabel,
    pub label_name: String,
    /// Probabilities of no / imitation / shuffle plagiarism.
    pub probabilities: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Timings {
    pub embed_ms: f64,
    pub retrieve_ms: f64,
    pub classify_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub query_text: String,
    pub k: usize,
    pub nprobe: Option<usize>,
    pub strategy: Strategy,
    pub candidates: Vec<Candidate>,
    pub timings: Timings,
}

impl DetectionReport {
    /// The report with timings zeroed, for comparing runs.
    pub fn without_timings(&self) -> DetectionReport {
        DetectionReport {
            timings: Timings::default(),
            ..self.clone()
        }
    }
}

/// Segment store, embeddings, vector index and pair classifier.
///
/// Queries take `&self` and may run concurrently; ingestion and training take
/// `&mut self`.
#[derive(Debug, Clone)]
pub struct Engine {
    config: EngineConfig,
    embedder: Embedder,
    segments: BTreeMap<u64, Segment>,
    embeddings: HashMap<u64, Vec<f32>>,
    index: Option<EngineIndex>,
    params: Option<MlpParams>,
}

impl Engine {
    pub fn new(config: EngineConfig) -> Result<Self> {
        config.validate()?;
        Ok(Engine {
            embedder: config.provider.build()?,
            config,
            segments: BTreeMap::new(),
            embeddings: HashMap::new(),
            index: None,
            params: None,
        })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn embedder(&self) -> &Embedder {
        &self.embedder
    }

    pub fn segment(&self, id: u64) -> Option<&Segment> {
        self.segments.get(&id)
    }

    pub fn segments(&self) -> impl Iterator<Item = &Segment> {
        self.segments.values()
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn embedding(&self, id: u64) -> Option<&[f32]> {
        self.embeddings.get(&id).map(Vec::as_slice)
    }

    pub fn index(&self) -> Option<&EngineIndex> {
        self.index.as_ref()
    }

    pub fn params(&self) -> Option<&MlpParams> {
        self.params.as_ref()
    }

    /// Installs classifier parameters, rounded to `f32` as they are stored
    /// on disk.
    pub fn set_params(&mut self, mut params: MlpParams) -> Result<()> {
        params.validate()?;
        params.round_to_f32();
        let dim = self.embedder.dimension();
        if params.embedding_dim() != dim || params.shape.classes != PlagiarismLabel::COUNT {
            return Err(Error::ShapeMismatch(format!(
                "classifier expects {}-dim embeddings and {} classes; engine embeds into {dim} dims",
                params.embedding_dim(),
                params.shape.classes
            )));
        }
        self.params = Some(params);
        Ok(())
    }

    pub fn embed_texts(&self, texts: &[&str]) -> Result<Vec<Vec<f32>>> {
        let mut out = Vec::with_capacity(texts.len());
        let chunk = match self.embedder {
            Embedder::Hash(_) => texts.len().max(1),
            Embedder::Remote(_) => REMOTE_BATCH,
        };
        for batch in texts.chunks(chunk) {
            out.extend(self.embedder.embed_batch(batch)?.into_iter().map(|v| v.into_values()));
        }
        Ok(out)
    }

    /// Stores `segments`, embeds them and rebuilds the index. Nothing changes
    /// if any step fails. Ids must be unique within the batch and, when
    /// appending, new to the engine.
    pub fn ingest(&mut self, segments: Vec<Segment>, mode: IngestMode) -> Result<IngestSummary> {
        let ingested = segments.len();
        let mut store = match mode {
            IngestMode::Replace => BTreeMap::new(),
            IngestMode::Append => self.segments.clone(),
        };
        let mut fresh = Vec::with_capacity(segments.len());
        let mut batch_ids = std::collections::HashSet::new();
        for mut seg in segments {
            if !batch_ids.insert(seg.id) || (mode == IngestMode::Append && self.segments.contains_key(&seg.id)) {
                return Err(Error::DuplicateId(seg.id));
            }
            seg.token_count = count_tokens(&seg.text);
            if seg.text.trim().is_empty() {
                return Err(Error::InvalidInput(format!("segment {} has empty text", seg.id)));
            }
            if seg.token_count > MAX_TOKENS {
                return Err(Error::InvalidInput(format!(
                    "segment {} has {} tokens, more than {MAX_TOKENS}",
                    seg.id, seg.token_count
                )));
            }
            fresh.push(seg.id);
            store.insert(seg.id, seg);
        }

        let texts: Vec<&str> = fresh.iter().map(|id| store[id].text.as_str()).collect();
        let vectors = self.embed_texts(&texts)?;
        let mut embeddings = match mode {
            IngestMode::Replace => HashMap::new(),
            IngestMode::Append => self.embeddings.clone(),
        };
        embeddings.extend(fresh.iter().copied().zip(vectors));

        let index = self.build_index(&store, &embeddings)?;
        self.segments = store;
        self.embeddings = embeddings;
        self.index = index;
        Ok(IngestSummary {
            ingested,
            segments: self.segments.len(),
            indexed: self.index.as_ref().map_or(0, |i| i.as_search().len()),
        })
    }

    /// Reads a corpus JSONL file; unreadable lines are reported as
    /// [`Error::CorruptFile`].
    pub fn ingest_file(&mut self, path: impl AsRef<Path>, mode: IngestMode) -> Result<IngestSummary> {
        let segments: Vec<Segment> = read_jsonl(path).map_err(|e| match e {
            Error::InvalidInput(msg) => Error::CorruptFile(msg),
            other => other,
        })?;
        self.ingest(segments, mode)
    }

    fn build_index(
        &self,
        store: &BTreeMap<u64, Segment>,
        embeddings: &HashMap<u64, Vec<f32>>,
    ) -> Result<Option<EngineIndex>> {
        if store.is_empty() {
            return Ok(None);
        }
        let dim = self.embedder.dimension();
        let ids: Vec<u64> = store.keys().copied().collect();
        let data: Vec<f32> = ids.iter().flat_map(|id| embeddings[id].iter().copied()).collect();
        let settings = &self.config.index;
        let index = match settings.strategy {
            Strategy::Flat => EngineIndex::Flat(FlatIndex::from_rows(dim, settings.metric, &ids, &data)?),
            Strategy::Ivf | Strategy::IvfPq => {
                let cfg = settings.ivf_config(dim, derive_seed(self.config.seed, INDEX_STREAM, 0))?;
                EngineIndex::Ivf(IvfPqIndex::build(&cfg, dim, &ids, &data)?)
            }
        };
        Ok(Some(index))
    }

    /// Embeds both sides of every pair, reusing vectors for repeated texts.
    pub fn embed_pairs(&self, pairs: &[TextPair]) -> Result<Vec<LabeledPair>> {
        let mut slot: HashMap<&str, usize> = HashMap::new();
        let mut texts = Vec::new();
        for p in pairs {
            for t in [p.t1.as_str(), p.t2.as_str()] {
                slot.entry(t).or_insert_with(|| {
                    texts.push(t);
                    texts.len() - 1
                });
            }
        }
        let vectors = self.embed_texts(&texts)?;
        Ok(pairs
            .iter()
            .map(|p| LabeledPair {
                h1: vectors[slot[p.t1.as_str()]].clone(),
                h2: vectors[slot[p.t2.as_str()]].clone(),
                label: p.label,
            })
            .collect())
    }

    /// The classifier hyperparameters with the seed derived from the engine seed.
    pub fn train_config(&self) -> crate::classifier::TrainConfig {
        crate::classifier::TrainConfig {
            seed: derive_seed(self.config.seed, CLASSIFIER_STREAM, 0),
            ..self.config.classifier
        }
    }

    pub fn train(&mut self, pairs: &[TextPair], on_epoch: impl FnMut(&EpochStats)) -> Result<TrainOutcome> {
        let labeled = self.embed_pairs(pairs)?;
        let outcome = train_with_callback(&labeled, &self.train_config(), on_epoch)?;
        self.params = Some(outcome.params.clone());
        Ok(outcome)
    }

    /// Retrieves the top `k` stored segments for `query` and classifies each
    /// `(segment, query)` pair, the stored segment being the original.
    pub fn detect(&self, query: &str, k: Option<usize>, nprobe: Option<usize>) -> Result<DetectionReport> {
        let k = k.unwrap_or(self.config.index.k);
        if k == 0 {
            return Err(Error::InvalidInput("k must be at least 1".into()));
        }
        let index = self
            .index
            .as_ref()
            .filter(|i| !i.as_search().is_empty())
            .ok_or(Error::EmptyIndex)?;
        let params = self.params.as_ref().ok_or(Error::ModelNotTrained)?;
        let search = index.as_search();
        let nprobe = match search.strategy() {
            Strategy::Flat => None,
            _ => Some(nprobe.unwrap_or(self.config.index.nprobe)),
        };

        let t0 = Instant::now();
        let h = self.embedder.embed(query)?.into_values();
        let t1 = Instant::now();
        let result = search.search(&h, k, nprobe)?;
        let t2 = Instant::now();
        let mut candidates = Vec::with_capacity(result.hits.len());
        for (rank, hit) in result.hits.iter().enumerate() {
            let seg = self
                .segments
                .get(&hit.id)
                .ok_or_else(|| Error::InvalidInput(format!("index holds unknown segment {}", hit.id)))?;
            let (label, dist) = predict(params, &self.embeddings[&hit.id], &h)?;
            candidates.push(Candidate {
                rank: rank + 1,
                segment_id: hit.id,
                doc_id: seg.doc_id.clone(),
                text: seg.text.clone(),
                score: hit.score,
                label,
                label_name: label.name().to_string(),
                probabilities: dist.probs().to_vec(),
            });
        }
        let t3 = Instant::now();
        let ms = |a: Instant, b: Instant| (b - a).as_secs_f64() * 1000.0;
        Ok(DetectionReport {
            query_text: query.to_string(),
            k,
            nprobe,
            strategy: search.strategy(),
            candidates,
            timings: Timings {
                embed_ms: ms(t0, t1),
                retrieve_ms: ms(t1, t2),
                classify_ms: ms(t2, t3),
            },
        })
    }

    /// Writes config, segments, embeddings, index and (when trained)
    /// classifier parameters into `dir`.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        self.config.save(dir.join(CONFIG_FILE))?;
        let segs: Vec<&Segment> = self.segments.values().collect();
        write_jsonl(dir.join(SEGMENTS_FILE), &segs)?;

        let dim = self.embedder.dimension();
        let mut w = Writer::new(EMBEDDINGS_MAGIC);
        w.u32(dim as u32);
        w.u64(segs.len() as u64);
        for s in &segs {
            w.u64(s.id);
            w.f32s(self.embeddings[&s.id].iter().copied());
        }
        w.write_to(&dir.join(EMBEDDINGS_FILE))?;

        for (name, present) in [(INDEX_FILE, self.index.is_some()), (PARAMS_FILE, self.params.is_some())] {
            let path = dir.join(name);
            if !present && path.exists() {
                std::fs::remove_file(&path)?;
            }
        }
        if let Some(index) = &self.index {
            index.save(&dir.join(INDEX_FILE))?;
        }
        if let Some(params) = &self.params {
            params.save(&dir.join(PARAMS_FILE))?;
        }
        Ok(())
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let config = EngineConfig::load(dir.join(CONFIG_FILE))?;
        let mut engine = Engine::new(config)?;
        let segments: Vec<Segment> = read_jsonl(dir.join(SEGMENTS_FILE)).map_err(|e| match e {
            Error::InvalidInput(msg) => Error::CorruptFile(msg),
            other => other,
        })?;
        for mut s in segments {
            s.token_count = count_tokens(&s.text);
            engine.segments.insert(s.id, s);
        }

        let bytes = std::fs::read(dir.join(EMBEDDINGS_FILE))?;
        let mut r = Reader::open(&bytes, EMBEDDINGS_MAGIC)?;
        let dim = r.u32()? as usize;
        let n = r.u64()? as usize;
        if dim != engine.embedder.dimension() || n != engine.segments.len() {
            return Err(Error::CorruptFile(format!(
                "embeddings file holds {n} vectors of dimension {dim}, expected {} of {}",
                engine.segments.len(),
                engine.embedder.dimension()
            )));
        }
        for _ in 0..n {
            let id = r.u64()?;
            let v = r.f32s(dim)?;
            if !engine.segments.contains_key(&id) || engine.embeddings.insert(id, v).is_some() {
                return Err(Error::CorruptFile(format!("unexpected embedding for segment {id}")));
            }
        }
        r.expect_end()?;

        let index_path = dir.join(INDEX_FILE);
        if index_path.exists() {
            let ivf = IvfPqIndex::load(&index_path)?;
            let index = match engine.config.index.strategy {
                Strategy::Flat => EngineIndex::Flat(ivf.into_flat().map_err(|e| Error::CorruptFile(e.to_string()))?),
                _ => EngineIndex::Ivf(ivf),
            };
            if index.as_search().len() != engine.segments.len() {
                return Err(Error::CorruptFile("index and segment store disagree".into()));
            }
            engine.index = Some(index);
        } else if !engine.segments.is_empty() {
            return Err(Error::CorruptFile(format!("{INDEX_FILE} is missing")));
        }

        let params_path = dir.join(PARAMS_FILE);
        if params_path.exists() {
            engine.set_params(MlpParams::load(&params_path)?)?;
        }
        Ok(engine)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::{MlpShape, TrainConfig};
    use crate::corpus::{segment_corpus, SynthConfig, SynthCorpus};
    use crate::embed::EmbeddingProviderConfig;
    use crate::service::IndexSettings;

    fn small_config() -> EngineConfig {
        EngineConfig {
            seed: 5,
            provider: EmbeddingProviderConfig::hash(64, 1),
            index: IndexSettings::flat(),
            classifier: TrainConfig {
                hidden: 8,
                max_epochs: 2,
                batch_size: 16,
                ..TrainConfig::default()
            },
        }
    }

    fn corpus() -> Vec<Segment> {
        SynthCorpus::generate(&SynthConfig::with_size(4, 5, 2))
            .unwrap()
            .segments()
    }

    #[test]
    fn empty_engine_reports_empty_index() {
        let mut e = Engine::new(small_config()).unwrap();
        assert!(matches!(e.detect("hello", None, None), Err(Error::EmptyIndex)));
        let s = e.ingest(vec![], IngestMode::Replace).unwrap();
        assert_eq!((s.segments, s.indexed), (0, 0));
        assert!(matches!(e.detect("hello", None, None), Err(Error::EmptyIndex)));
    }

    #[test]
    fn untrained_engine_refuses_detect() {
        let mut e = Engine::new(small_config()).unwrap();
        e.ingest(corpus(), IngestMode::Replace).unwrap();
        assert!(matches!(e.detect("hello", None, None), Err(Error::ModelNotTrained)));
    }

    #[test]
    fn detect_reports_top_k_in_order() {
        let mut e = Engine::new(small_config()).unwrap();
        let segs = corpus();
        e.ingest(segs.clone(), IngestMode::Replace).unwrap();
        e.set_params(MlpParams::init(MlpShape::for_embedding_dim(64, 8), 1))
            .unwrap();
        let r = e.detect(&segs[7].text, Some(5), None).unwrap();
        assert_eq!(r.candidates.len(), 5);
        assert_eq!(r.candidates[0].segment_id, 7);
        assert!(r.candidates.windows(2).all(|w| w[0].score >= w[1].score));
        for c in &r.candidates {
            assert!((c.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-6);
            assert_eq!(c.text, e.segment(c.segment_id).unwrap().text);
        }
        let all = e.detect(&segs[0].text, Some(500), None).unwrap();
        assert_eq!(all.candidates.len(), segs.len());
    }

    #[test]
    fn append_and_replace() {
        let mut e = Engine::new(small_config()).unwrap();
        let segs = corpus();
        e.ingest(segs[..10].to_vec(), IngestMode::Replace).unwrap();
        let s = e.ingest(segs[10..].to_vec(), IngestMode::Append).unwrap();
        assert_eq!((s.ingested, s.segments, s.indexed), (10, 20, 20));
        let s = e.ingest(segs[..3].to_vec(), IngestMode::Replace).unwrap();
        assert_eq!(s.segments, 3);
    }

    #[test]
    fn failed_ingest_leaves_state_alone() {
        let mut cfg = small_config();
        cfg.index = IndexSettings {
            nlist: 50,
            ..IndexSettings::default()
        };
        let mut e = Engine::new(cfg).unwrap();
        e.ingest(segment_corpus([("a", "x y."), ("b", "z w.")], 512), IngestMode::Replace)
            .unwrap_err();
        assert!(e.is_empty());
        assert!(e.index().is_none());
    }

    #[test]
    fn mismatched_params_rejected() {
        let mut e = Engine::new(small_config()).unwrap();
        let wrong = MlpParams::init(MlpShape::for_embedding_dim(32, 8), 1);
        assert!(matches!(e.set_params(wrong), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small_config();
        cfg.index = IndexSettings {
            nlist: 4,
            nprobe: 2,
            ..IndexSettings::default()
        };
        let mut e = Engine::new(cfg).unwrap();
        let segs = corpus();
        e.ingest(segs.clone(), IngestMode::Replace).unwrap();
        e.set_params(MlpParams::init(MlpShape::for_embedding_dim(64, 8), 3))
            .unwrap();
        e.save(dir.path()).unwrap();
        let back = Engine::load(dir.path()).unwrap();
        assert_eq!(back.len(), e.len());
        for q in [&segs[2].text, &segs[11].text] {
            assert_eq!(
                back.detect(q, None, None).unwrap().without_timings(),
                e.detect(q, None, None).unwrap().without_timings()
            );
        }
    }
}
