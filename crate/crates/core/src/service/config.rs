use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classifier::TrainConfig;
use crate::embed::EmbeddingProviderConfig;
use crate::error::{Error, Result};
use crate::vecindex::{IvfConfig, Metric, PqParams, Strategy};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IndexSettings {
    pub strategy: Strategy,
    pub metric: Metric,
    pub nlist: usize,
    pub nprobe: usize,
    /// PQ sub-vector width; only read for `ivf_pq`.
    pub dsub: usize,
    pub ks: usize,
    pub kmeans_iters: usize,
    /// Default number of candidates per query.
    pub k: usize,
}

impl Default for IndexSettings {
    fn default() -> Self {
        IndexSettings {
            strategy: Strategy::Ivf,
            metric: Metric::InnerProduct,
            nlist: 100,
            nprobe: 20,
            dsub: 16,
            ks: 256,
            kmeans_iters: 25,
            k: 10,
        }
    }
}

impl IndexSettings {
    pub fn flat() -> Self {
        IndexSettings {
            strategy: Strategy::Flat,
            ..IndexSettings::default()
        }
    }

    pub fn ivf_config(&self, dim: usize, seed: u64) -> Result<IvfConfig> {
        let pq = match self.strategy {
            Strategy::IvfPq => Some(PqParams::with_dsub(dim, self.dsub, self.ks)?),
            _ => None,
        };
        Ok(IvfConfig {
            nlist: self.nlist,
            nprobe: self.nprobe,
            metric: self.metric,
            pq,
            kmeans_iters: self.kmeans_iters,
            seed,
        })
    }
}

/// Everything needed to rebuild an engine: embedding provider, index layout,
/// classifier hyperparameters and the seed every random choice derives from.
///
/// Stored as TOML:
///
/// ```toml
/// seed = 7
///
/// [provider]
/// kind = "hash"
/// dimension = 768
///
/// [index]
/// strategy = "ivf_pq"
/// nlist = 100
/// nprobe = 20
/// dsub = 16
///
/// [classifier]
/// batch_size = 128
/// ```
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub seed: u64,
    pub provider: EmbeddingProviderConfig,
    pub index: IndexSettings,
    pub classifier: TrainConfig,
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        self.provider.validate()?;
        self.classifier.validate()?;
        let ix = &self.index;
        if ix.k == 0 || ix.nlist == 0 || ix.nprobe == 0 {
            return Err(Error::InvalidConfig(
                "index k, nlist and nprobe must be positive".into(),
            ));
        }
        if ix.strategy == Strategy::IvfPq {
            PqParams::with_dsub(self.provider.dimension, ix.dsub, ix.ks)?.check(self.provider.dimension)?;
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: EngineConfig = toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("engine config is always representable in TOML")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_toml())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::ProviderKind;

    #[test]
    fn toml_round_trip() {
        let mut cfg = EngineConfig {
            seed: 7,
            ..EngineConfig::default()
        };
        cfg.index.strategy = Strategy::IvfPq;
        cfg.classifier.batch_size = 128;
        let text = cfg.to_toml();
        assert_eq!(EngineConfig::from_toml(&text).unwrap(), cfg);
    }

    #[test]
    fn partial_file_fills_defaults() {
        let cfg = EngineConfig::from_toml(
            "seed = 3\n[provider]\nkind = \"remote\"\nendpoint = \"http://localhost:9000/embed\"\n[index]\nstrategy = \"flat\"\n",
        )
        .unwrap();
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.provider.kind, ProviderKind::Remote);
        assert_eq!(cfg.provider.dimension, 768);
        assert_eq!(cfg.index.strategy, Strategy::Flat);
        assert_eq!((cfg.index.k, cfg.index.nprobe), (10, 20));
        assert_eq!(cfg.classifier.batch_size, 1024);
    }

    #[test]
    fn bad_files_rejected() {
        assert!(matches!(
            EngineConfig::from_toml("sed = 1"),
            Err(Error::InvalidConfig(_))
        ));
        assert!(matches!(
            EngineConfig::from_toml("[index]\nstrategy = \"ivf_pq\"\ndsub = 10"),
            Err(Error::BadPqShape(_))
        ));
        assert!(matches!(
            EngineConfig::from_toml("[provider]\nkind = \"remote\""),
            Err(Error::InvalidConfig(_))
        ));
    }
}
