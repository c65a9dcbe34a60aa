use std::collections::HashMap;
use std::sync::Arc;
use std::time::Duration;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::synonyms::{FUNCTION_SWAPS, SYNONYMS};
use crate::embed::token_spans;
use crate::error::{Error, Result};
use crate::rng::seeded;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParaphraseKind {
    RuleStub,
    External,
}

/// Word to replacement candidates. Keys are lowercase.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SynonymTable {
    map: HashMap<String, Vec<String>>,
}

impl SynonymTable {
    pub fn bundled() -> Self {
        Self::from_entries(SYNONYMS.iter().map(|(k, v)| (*k, v.to_vec())))
    }

    pub fn from_entries<K, V>(entries: impl IntoIterator<Item = (K, Vec<V>)>) -> Self
    where
        K: AsRef<str>,
        V: Into<String>,
    {
        let map = entries
            .into_iter()
            .map(|(k, v)| {
                (
                    k.as_ref().to_lowercase(),
                    v.into_iter().map(Into::into).collect::<Vec<String>>(),
                )
            })
            .filter(|(_, v)| !v.is_empty())
            .collect();
        SynonymTable { map }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[String]> {
        self.map.get(word).map(Vec::as_slice)
    }
}

/// Source of imitation-plagiarism rewrites.
///
/// `RuleStub` rewrites locally: every word found in the synonym table is
/// replaced (with probability `rate`) by a seeded choice among its synonyms,
/// and the function words this/that, these/those, also/additionally are
/// swapped with probability one half. `External` posts `{"text": ...}` to an
/// HTTP endpoint and returns the `text` field of the reply verbatim.
#[derive(Debug, Clone)]
pub struct ParaphraseProvider {
    pub kind: ParaphraseKind,
    pub seed: u64,
    pub endpoint: Option<String>,
    pub rate: f64,
    table: Arc<SynonymTable>,
}

#[derive(Serialize)]
struct ParaphraseRequest<'a> {
    text: &'a str,
}

#[derive(Deserialize)]
struct ParaphraseResponse {
    text: String,
}

impl ParaphraseProvider {
    pub fn rule_stub(seed: u64) -> Self {
        ParaphraseProvider {
            kind: ParaphraseKind::RuleStub,
            seed,
            endpoint: None,
            rate: 1.0,
            table: Arc::new(SynonymTable::bundled()),
        }
    }

    pub fn with_table(seed: u64, table: SynonymTable) -> Self {
        ParaphraseProvider {
            table: Arc::new(table),
            ..Self::rule_stub(seed)
        }
    }

    pub fn with_rate(mut self, rate: f64) -> Self {
        self.rate = rate;
        self
    }

    pub fn external(endpoint: impl Into<String>) -> Self {
        ParaphraseProvider {
            kind: ParaphraseKind::External,
            seed: 0,
            endpoint: Some(endpoint.into()),
            rate: 1.0,
            table: Arc::new(SynonymTable::default()),
        }
    }

    pub fn table(&self) -> &SynonymTable {
        &self.table
    }

    pub fn validate(&self) -> Result<()> {
        match (self.kind, &self.endpoint) {
            (ParaphraseKind::External, None) => {
                Err(Error::InvalidConfig("external paraphraser needs an endpoint".into()))
            }
            (ParaphraseKind::RuleStub, Some(_)) => {
                Err(Error::InvalidConfig("rule_stub paraphraser takes no endpoint".into()))
            }
            _ if !(0.0..=1.0).contains(&self.rate) => Err(Error::InvalidConfig("rate must lie in [0, 1]".into())),
            _ => Ok(()),
        }
    }

    pub fn paraphrase(&self, text: &str) -> Result<String> {
        self.paraphrase_seeded(text, self.seed)
    }

    /// Like [`paraphrase`](Self::paraphrase) with an explicit seed; the
    /// external provider ignores it.
    pub fn paraphrase_seeded(&self, text: &str, seed: u64) -> Result<String> {
        self.validate()?;
        match self.kind {
            ParaphraseKind::RuleStub => Ok(self.rewrite(text, seed)),
            ParaphraseKind::External => self.call_external(text),
        }
    }

    fn rewrite(&self, text: &str, seed: u64) -> String {
        let mut rng = seeded(seed);
        let mut out = String::with_capacity(text.len() + 16);
        let mut last = 0;
        for span in token_spans(text) {
            let word = &text[span.clone()];
            let lower = word.to_lowercase();
            let replacement = if let Some(syns) = self.table.get(&lower) {
                let hit = rng.gen_bool(self.rate);
                let pick = rng.gen_range(0..syns.len());
                hit.then(|| syns[pick].as_str())
            } else if let Some(&(_, to)) = FUNCTION_SWAPS.iter().find(|(from, _)| *from == lower) {
                rng.gen_bool(0.5).then_some(to)
            } else {
                None
            };
            if let Some(rep) = replacement {
                out.push_str(&text[last..span.start]);
                out.push_str(&match_case(word, rep));
                last = span.end;
            }
        }
        out.push_str(&text[last..]);
        out
    }

    fn call_external(&self, text: &str) -> Result<String> {
        let endpoint = self.endpoint.as_deref().unwrap_or_default();
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(60)))
            .build()
            .into();
        let unavailable = |e: ureq::Error| Error::RemoteUnavailable(format!("{endpoint}: {e}"));
        let mut resp = agent
            .post(endpoint)
            .send_json(ParaphraseRequest { text })
            .map_err(unavailable)?;
        let body: ParaphraseResponse = resp.body_mut().read_json().map_err(unavailable)?;
        Ok(body.text)
    }
}

/// Rewrites `text` with `provider` using the provider's own seed.
pub fn paraphrase(text: &str, provider: &ParaphraseProvider) -> Result<String> {
    provider.paraphrase(text)
}

fn match_case(original: &str, replacement: &str) -> String {
    let mut chars = original.chars();
    let first_upper = chars.next().is_some_and(char::is_uppercase);
    let all_upper = first_upper && original.chars().count() > 1 && original.chars().all(|c| !c.is_lowercase());
    if all_upper {
        replacement.to_uppercase()
    } else if first_upper {
        let mut r = replacement.chars();
        r.next()
            .map(|c| c.to_uppercase().chain(r).collect())
            .unwrap_or_default()
    } else {
        replacement.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::split_sentences;

    #[test]
    fn table_lookup_trace() {
        let p = ParaphraseProvider::with_table(3, SynonymTable::from_entries([("fast", vec!["quick"])]));
        assert_eq!(p.paraphrase("The program runs fast").unwrap(), "The program runs quick");
    }

    #[test]
    fn case_and_punctuation_survive() {
        let p = ParaphraseProvider::with_table(0, SynonymTable::from_entries([("fast", vec!["quick"])]));
        assert_eq!(p.paraphrase("Fast, FAST! fast.").unwrap(), "Quick, QUICK! quick.");
    }

    #[test]
    fn no_table_words_only_swaps_function_words() {
        let p = ParaphraseProvider::with_table(1, SynonymTable::default());
        let text = "Cats sleep on mats in the sun.";
        assert_eq!(p.paraphrase(text).unwrap(), text);
        for seed in 0..20 {
            let out = p.paraphrase_seeded("This works and that fails.", seed).unwrap();
            assert!(
                [
                    "This works and that fails.",
                    "That works and that fails.",
                    "This works and this fails.",
                    "That works and this fails."
                ]
                .contains(&out.as_str()),
                "{out}"
            );
        }
    }

    #[test]
    fn bundled_stub_changes_text_and_keeps_sentences() {
        let p = ParaphraseProvider::rule_stub(9);
        for seed in 0..100u64 {
            let text = format!(
                "This method shows important results {seed}. The new approach is fast! Also, many problems remain? Yes."
            );
            let out = p.paraphrase_seeded(&text, seed).unwrap();
            assert_ne!(out, text);
            assert_eq!(split_sentences(&out).len(), split_sentences(&text).len());
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let p = ParaphraseProvider::rule_stub(4);
        let text = "The big method uses many new results to improve performance.";
        assert_eq!(p.paraphrase(text).unwrap(), p.paraphrase(text).unwrap());
        let outs: std::collections::HashSet<String> = (0..10).map(|s| p.paraphrase_seeded(text, s).unwrap()).collect();
        assert!(outs.len() > 1);
    }

    #[test]
    fn invalid_provider_rejected() {
        let mut p = ParaphraseProvider::external("http://127.0.0.1:1/p");
        p.endpoint = None;
        assert!(matches!(p.paraphrase("x"), Err(Error::InvalidConfig(_))));
        assert!(matches!(
            ParaphraseProvider::rule_stub(0).with_rate(1.5).paraphrase("x"),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn unreachable_external_is_remote_unavailable() {
        let p = ParaphraseProvider::external("http://127.0.0.1:1/paraphrase");
        assert!(matches!(p.paraphrase("text"), Err(Error::RemoteUnavailable(_))));
    }
}
