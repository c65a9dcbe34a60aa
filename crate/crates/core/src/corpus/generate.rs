use std::collections::{BTreeMap, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{split_sentences, ParaphraseProvider, Segment, TextPair};
use crate::classifier::PlagiarismLabel;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, seeded};

const SHUFFLE_STREAM: u64 = 0x21;
const PARAPHRASE_STREAM: u64 = 0x22;
const NEGATIVE_STREAM: u64 = 0x23;
const SPLIT_STREAM: u64 = 0x31;

/// Reorders the sentences of `text`.
///
/// With two or more sentences the permutation is never the identity. The
/// shuffled sentences are joined by single spaces; a single sentence comes
/// back unchanged.
pub fn shuffle_plagiarize(text: &str, seed: u64) -> String {
    let sentences = split_sentences(text);
    if sentences.len() < 2 {
        return text.to_string();
    }
    let mut rng = seeded(seed);
    let mut order: Vec<usize> = (0..sentences.len()).collect();
    loop {
        order.shuffle(&mut rng);
        if order.iter().enumerate().any(|(i, &j)| i != j) {
            break;
        }
    }
    order.iter().map(|&i| sentences[i]).collect::<Vec<_>>().join(" ")
}

/// One negative pair per segment; see [`negative_sample_n`].
pub fn negative_sample(segments: &[Segment], seed: u64) -> Result<Vec<TextPair>> {
    negative_sample_n(segments, seed, 1)
}

/// For every segment, `per_segment` partners drawn without replacement from
/// other documents. Fails when fewer than two documents exist or a segment
/// has fewer than `per_segment` cross-document partners.
pub fn negative_sample_n(segments: &[Segment], seed: u64, per_segment: usize) -> Result<Vec<TextPair>> {
    let sampler = NegativeSampler::new(segments, per_segment)?;
    Ok(segments
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, s)| {
            sampler
                .partners(i, derive_seed(seed, NEGATIVE_STREAM, i as u64))
                .into_iter()
                .map(move |j| TextPair {
                    t1: s.text.clone(),
                    t2: segments[j].text.clone(),
                    label: PlagiarismLabel::NoPlagiarism,
                })
        })
        .collect())
}

struct NegativeSampler<'a> {
    segments: &'a [Segment],
    doc_sizes: HashMap<&'a str, usize>,
    n: usize,
}

impl<'a> NegativeSampler<'a> {
    fn new(segments: &'a [Segment], n: usize) -> Result<Self> {
        let mut doc_sizes: HashMap<&str, usize> = HashMap::new();
        for s in segments {
            *doc_sizes.entry(s.doc_id.as_str()).or_default() += 1;
        }
        if doc_sizes.len() < 2 {
            return Err(Error::InsufficientDocuments);
        }
        let largest = doc_sizes.values().copied().max().unwrap_or(0);
        if segments.len() - largest < n {
            return Err(Error::InsufficientDocuments);
        }
        Ok(NegativeSampler { segments, doc_sizes, n })
    }

    fn partners(&self, i: usize, seed: u64) -> Vec<usize> {
        if self.n == 0 {
            return Vec::new();
        }
        let doc = self.segments[i].doc_id.as_str();
        let others = self.segments.len() - self.doc_sizes[doc];
        let mut rng = seeded(seed);
        if self.n * 2 >= others {
            let mut pool: Vec<usize> = (0..self.segments.len())
                .filter(|&j| self.segments[j].doc_id != doc)
                .collect();
            pool.shuffle(&mut rng);
            pool.truncate(self.n);
            return pool;
        }
        let mut chosen = Vec::with_capacity(self.n);
        let mut seen = HashSet::new();
        while chosen.len() < self.n {
            let j = rng.gen_range(0..self.segments.len());
            if self.segments[j].doc_id != doc && seen.insert(j) {
                chosen.push(j);
            }
        }
        chosen
    }
}

/// Pairs generated per source segment, by label.
///
/// `disguised_negative` adds extra `NoPlagiarism` pairs whose second text is a
/// cross-document partner that was itself shuffled or paraphrased, so that a
/// rewritten-looking `t2` alone is no evidence of plagiarism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCounts {
    pub shuffle: usize,
    pub imitation: usize,
    pub negative: usize,
    #[serde(default)]
    pub disguised_negative: usize,
}

impl Default for PairCounts {
    fn default() -> Self {
        PairCounts {
            shuffle: 1,
            imitation: 1,
            negative: 1,
            disguised_negative: 0,
        }
    }
}

impl PairCounts {
    pub fn per_segment(&self) -> usize {
        self.shuffle + self.imitation + self.negative + self.disguised_negative
    }
}

/// Builds `(t1, t2, label)` pairs with every segment as `t1`.
///
/// Output is grouped by segment in ascending id order; within a segment come
/// the shuffle pairs, then the paraphrase pairs, then the negatives, then the
/// disguised negatives (alternately paraphrased and shuffled partners).
pub fn build_dataset(
    segments: &[Segment],
    provider: &ParaphraseProvider,
    seed: u64,
    counts: PairCounts,
) -> Result<Vec<TextPair>> {
    if let Some(bad) = segments.iter().find(|s| s.text.trim().is_empty()) {
        return Err(Error::InvalidInput(format!("segment {} has empty text", bad.id)));
    }
    provider.validate()?;
    let mut ordered: Vec<&Segment> = segments.iter().collect();
    ordered.sort_by_key(|s| s.id);
    let ordered: Vec<Segment> = ordered.into_iter().cloned().collect();
    let sampler = NegativeSampler::new(&ordered, counts.negative + counts.disguised_negative)?;

    let groups: Vec<Result<Vec<TextPair>>> = ordered
        .par_iter()
        .enumerate()
        .map(|(i, seg)| {
            let mut out = Vec::with_capacity(counts.per_segment());
            let pair = |t2: String, label| TextPair {
                t1: seg.text.clone(),
                t2,
                label,
            };
            let shuffle_seed = derive_seed(seed, SHUFFLE_STREAM, seg.id);
            for j in 0..counts.shuffle {
                let t2 = shuffle_plagiarize(&seg.text, derive_seed(shuffle_seed, 0, j as u64));
                out.push(pair(t2, PlagiarismLabel::ShufflePlagiarism));
            }
            let para_seed = derive_seed(seed, PARAPHRASE_STREAM, seg.id);
            for j in 0..counts.imitation {
                let t2 = provider.paraphrase_seeded(&seg.text, derive_seed(para_seed, 0, j as u64))?;
                out.push(pair(t2, PlagiarismLabel::ImitationPlagiarism));
            }
            let partners = sampler.partners(i, derive_seed(seed, NEGATIVE_STREAM, seg.id));
            for (n, &j) in partners.iter().enumerate() {
                let text = &ordered[j].text;
                let t2 = match n.checked_sub(counts.negative) {
                    None => text.clone(),
                    Some(d) if d % 2 == 0 => provider.paraphrase_seeded(text, derive_seed(para_seed, 1, d as u64))?,
                    Some(d) => shuffle_plagiarize(text, derive_seed(shuffle_seed, 1, d as u64)),
                };
                out.push(pair(t2, PlagiarismLabel::NoPlagiarism));
            }
            Ok(out)
        })
        .collect();

    let mut pairs = Vec::with_capacity(ordered.len() * counts.per_segment());
    for g in groups {
        pairs.extend(g?);
    }
    Ok(pairs)
}

/// Stratified split: each label is shuffled and split on its own, with the
/// train share rounded up. Both halves are shuffled again before returning.
pub fn split_dataset<T: Clone + HasLabel>(items: &[T], ratio: f64, seed: u64) -> Result<(Vec<T>, Vec<T>)> {
    if items.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: items.len(),
        });
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidConfig(format!("split ratio {ratio} is not in (0, 1)")));
    }
    let mut by_label: BTreeMap<PlagiarismLabel, Vec<T>> = BTreeMap::new();
    for item in items {
        by_label.entry(item.label()).or_default().push(item.clone());
    }
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (label, mut group) in by_label {
        group.shuffle(&mut seeded(derive_seed(seed, SPLIT_STREAM, label.index() as u64)));
        let n_train = ((group.len() as f64 * ratio) - 1e-9).ceil() as usize;
        let rest = group.split_off(n_train.min(group.len()));
        train.extend(group);
        test.extend(rest);
    }
    train.shuffle(&mut seeded(derive_seed(seed, SPLIT_STREAM, 100)));
    test.shuffle(&mut seeded(derive_seed(seed, SPLIT_STREAM, 101)));
    Ok((train, test))
}

pub trait HasLabel {
    fn label(&self) -> PlagiarismLabel;
}

impl HasLabel for TextPair {
    fn label(&self) -> PlagiarismLabel {
        self.label
    }
}

impl HasLabel for crate::classifier::LabeledPair {
    fn label(&self) -> PlagiarismLabel {
        self.label
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{segment_corpus, SynonymTable};
    use proptest::prelude::*;

    fn sorted_sentences(text: &str) -> Vec<String> {
        let mut v: Vec<String> = split_sentences(text).into_iter().map(str::to_string).collect();
        v.sort();
        v
    }

    fn seg(id: u64, doc: &str, text: &str) -> Segment {
        Segment::new(id, doc, text)
    }

    #[test]
    fn single_sentence_is_unchanged() {
        assert_eq!(
            shuffle_plagiarize("Only one sentence here.", 3),
            "Only one sentence here."
        );
        assert_eq!(shuffle_plagiarize("", 3), "");
    }

    #[test]
    fn seeded_shuffle_snapshot() {
        let text = "Alpha one. Bravo two. Charlie three. Delta four. Echo five.";
        let out = shuffle_plagiarize(text, 42);
        assert_eq!(out, shuffle_plagiarize(text, 42));
        assert_eq!(out, "Alpha one. Charlie three. Echo five. Delta four. Bravo two.");
        assert_ne!(out, text);
    }

    #[test]
    fn two_sentences_always_swap() {
        for seed in 0..50 {
            assert_eq!(shuffle_plagiarize("A b. C d.", seed), "C d. A b.");
        }
    }

    proptest! {
        #[test]
        fn shuffle_preserves_sentence_multiset(
            sents in proptest::collection::vec("[a-z]{1,6}( [a-z]{1,6}){0,4}[.!?]", 1..8),
            seed in any::<u64>()
        ) {
            let text = sents.join(" ");
            let out = shuffle_plagiarize(&text, seed);
            prop_assert_eq!(sorted_sentences(&out), sorted_sentences(&text));
            if sents.len() >= 2 {
                let before = split_sentences(&text);
                let after = split_sentences(&out);
                let distinct = before.iter().collect::<HashSet<_>>().len() > 1;
                if distinct {
                    prop_assert_ne!(before, after);
                }
            }
        }
    }

    #[test]
    fn negative_sampling_needs_two_documents() {
        let segs = vec![seg(0, "a", "x."), seg(1, "a", "y.")];
        assert!(matches!(negative_sample(&segs, 0), Err(Error::InsufficientDocuments)));
        assert!(matches!(negative_sample(&[], 0), Err(Error::InsufficientDocuments)));
    }

    #[test]
    fn two_single_segment_docs_give_the_cross_pair() {
        let segs = vec![seg(0, "a", "first."), seg(1, "b", "second.")];
        let pairs = negative_sample(&segs, 7).unwrap();
        assert_eq!(pairs.len(), 2);
        assert_eq!((pairs[0].t1.as_str(), pairs[0].t2.as_str()), ("first.", "second."));
        assert_eq!((pairs[1].t1.as_str(), pairs[1].t2.as_str()), ("second.", "first."));
        assert!(matches!(
            negative_sample_n(&segs, 7, 2),
            Err(Error::InsufficientDocuments)
        ));
    }

    fn ten_docs() -> Vec<Segment> {
        let docs: Vec<(String, String)> = (0..10)
            .map(|d| {
                let text = (0..3)
                    .map(|p| format!("Doc {d} part {p}."))
                    .collect::<Vec<_>>()
                    .join("\n\n");
                (format!("doc{d}"), text)
            })
            .collect();
        segment_corpus(docs.iter().map(|(a, b)| (a.as_str(), b.as_str())), 512)
    }

    #[test]
    fn negatives_cross_documents_without_replacement() {
        let segs = ten_docs();
        let doc_of: HashMap<&str, &str> = segs.iter().map(|s| (s.text.as_str(), s.doc_id.as_str())).collect();
        let pairs = negative_sample_n(&segs, 5, 4).unwrap();
        assert_eq!(pairs.len(), 30 * 4);
        for chunk in pairs.chunks(4) {
            let partners: HashSet<&str> = chunk.iter().map(|p| p.t2.as_str()).collect();
            assert_eq!(partners.len(), 4);
            for p in chunk {
                assert_ne!(doc_of[p.t1.as_str()], doc_of[p.t2.as_str()]);
                assert_eq!(p.label, PlagiarismLabel::NoPlagiarism);
            }
        }
        assert_eq!(pairs, negative_sample_n(&segs, 5, 4).unwrap());
        let single = negative_sample(&segs, 5).unwrap();
        let first: Vec<&str> = single[..3].iter().map(|p| p.t2.as_str()).collect();
        assert_eq!(first, vec!["Doc 9 part 0.", "Doc 6 part 0.", "Doc 4 part 0."]);
    }

    #[test]
    fn dataset_label_counts_are_exact() {
        let segs: Vec<Segment> = (0..100)
            .map(|i| {
                seg(
                    i,
                    &format!("d{}", i % 7),
                    &format!("This result {i} is fast. The method is new. Also good."),
                )
            })
            .collect();
        let provider = ParaphraseProvider::rule_stub(1);
        let pairs = build_dataset(&segs, &provider, 11, PairCounts::default()).unwrap();
        assert_eq!(pairs.len(), 300);
        for label in PlagiarismLabel::ALL {
            assert_eq!(pairs.iter().filter(|p| p.label == label).count(), 100);
        }
        for p in &pairs {
            assert!(!p.t1.is_empty() && !p.t2.is_empty());
            if p.label == PlagiarismLabel::ShufflePlagiarism {
                assert_eq!(sorted_sentences(&p.t1), sorted_sentences(&p.t2));
                assert_ne!(p.t1, p.t2);
            }
        }
        assert_eq!(
            pairs,
            build_dataset(&segs, &provider, 11, PairCounts::default()).unwrap()
        );
        let bigger = PairCounts {
            shuffle: 2,
            imitation: 3,
            negative: 4,
            disguised_negative: 0,
        };
        assert_eq!(build_dataset(&segs, &provider, 11, bigger).unwrap().len(), 900);
        let disguised = PairCounts {
            disguised_negative: 2,
            ..PairCounts::default()
        };
        let pairs = build_dataset(&segs, &provider, 11, disguised).unwrap();
        assert_eq!(pairs.len(), 500);
        assert_eq!(
            pairs
                .iter()
                .filter(|p| p.label == PlagiarismLabel::NoPlagiarism)
                .count(),
            300
        );
        let originals: HashSet<&str> = segs.iter().map(|s| s.text.as_str()).collect();
        for group in pairs.chunks(5) {
            assert!(originals.contains(group[2].t2.as_str()));
            assert!(!originals.contains(group[4].t2.as_str()));
            assert_ne!(group[0].t1, group[4].t2);
        }
    }

    #[test]
    fn dataset_order_follows_segment_ids() {
        let segs = vec![seg(5, "b", "Beta one. Beta two."), seg(2, "a", "Alpha one. Alpha two.")];
        let p = ParaphraseProvider::with_table(0, SynonymTable::default());
        let pairs = build_dataset(&segs, &p, 0, PairCounts::default()).unwrap();
        assert!(pairs[..3].iter().all(|p| p.t1.starts_with("Alpha")));
        assert_eq!(pairs[2].t2, "Beta one. Beta two.");
    }

    fn labeled(n_per_label: usize) -> Vec<TextPair> {
        PlagiarismLabel::ALL
            .iter()
            .flat_map(|&label| {
                (0..n_per_label).map(move |i| TextPair {
                    t1: format!("{label:?} {i}"),
                    t2: "x".into(),
                    label,
                })
            })
            .collect()
    }

    #[test]
    fn split_is_stratified_partition() {
        let data = labeled(10);
        let (train, test) = split_dataset(&data, 0.8, 3).unwrap();
        for label in PlagiarismLabel::ALL {
            assert_eq!(train.iter().filter(|p| p.label == label).count(), 8);
            assert_eq!(test.iter().filter(|p| p.label == label).count(), 2);
        }
        let mut all: Vec<String> = train.iter().chain(&test).map(|p| p.t1.clone()).collect();
        all.sort();
        let mut expect: Vec<String> = data.iter().map(|p| p.t1.clone()).collect();
        expect.sort();
        assert_eq!(all, expect);
        assert_eq!((train.clone(), test.clone()), split_dataset(&data, 0.8, 3).unwrap());
        let names: Vec<&str> = test.iter().map(|p| p.t1.as_str()).collect();
        assert_eq!(
            names,
            vec![
                "NoPlagiarism 2",
                "ImitationPlagiarism 7",
                "ShufflePlagiarism 6",
                "ShufflePlagiarism 9",
                "NoPlagiarism 4",
                "ImitationPlagiarism 8"
            ]
        );
    }

    #[test]
    fn split_rounds_train_up() {
        let data = labeled(7);
        let (train, test) = split_dataset(&data, 0.8, 0).unwrap();
        assert_eq!((train.len(), test.len()), (18, 3));
        assert!(matches!(
            split_dataset(&data[..1], 0.8, 0),
            Err(Error::TooFewSamples { got: 1, .. })
        ));
        assert!(matches!(split_dataset(&data, 1.0, 0), Err(Error::InvalidConfig(_))));
    }
}
