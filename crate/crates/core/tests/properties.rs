use std::collections::HashSet;

use plagdet::binio::{Reader, Writer};
use plagdet::classifier::{predict, MlpParams, MlpShape};
use plagdet::corpus::segment_document;
use plagdet::embed::{count_tokens, tokenize, HashEmbedder};
use plagdet::metrics::{Aggregation, ConfusionMatrix};
use plagdet::vecindex::{pq_train, FlatIndex, IvfConfig, IvfPqIndex, Metric};
use proptest::collection::vec;
use proptest::prelude::*;

fn rows(dim: usize, n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f32>> {
    n.prop_flat_map(move |n| vec(-1.0f32..1.0, n * dim))
}

fn metric() -> impl Strategy<Value = Metric> {
    prop_oneof![Just(Metric::InnerProduct), Just(Metric::L2)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn flat_results_are_ranked_unique_and_bounded(
        data in rows(8, 1..60),
        query in vec(-1.0f32..1.0, 8),
        k in 1usize..20,
        metric in metric(),
    ) {
        let n = data.len() / 8;
        let ids: Vec<u64> = (0..n as u64).map(|i| i * 5 + 1).collect();
        let index = FlatIndex::from_rows(8, metric, &ids, &data).unwrap();
        let res = index.search(&query, k).unwrap();
        prop_assert_eq!(res.hits.len(), k.min(n));
        prop_assert!(res.is_ordered(metric));
        let unique: HashSet<u64> = res.ids().into_iter().collect();
        prop_assert_eq!(unique.len(), res.hits.len());
        prop_assert!(unique.iter().all(|id| ids.contains(id)));
    }

    #[test]
    fn probing_every_list_matches_flat(
        data in rows(6, 12..80),
        query in vec(-1.0f32..1.0, 6),
        nlist in 1usize..6,
        seed in any::<u64>(),
        metric in metric(),
    ) {
        let n = data.len() / 6;
        let ids: Vec<u64> = (0..n as u64).rev().collect();
        let flat = FlatIndex::from_rows(6, metric, &ids, &data).unwrap();
        let cfg = IvfConfig { nlist, nprobe: 1, metric, pq: None, seed, ..IvfConfig::default() };
        let ivf = IvfPqIndex::build(&cfg, 6, &ids, &data).unwrap();
        prop_assert_eq!(ivf.count(), n);
        prop_assert_eq!(ivf.search(&query, 7, nlist).unwrap(), flat.search(&query, 7).unwrap());
        let partial = ivf.search(&query, 7, 1).unwrap();
        prop_assert!(partial.is_ordered(metric));
    }

    #[test]
    fn adc_agrees_with_decoded_scores(
        data in rows(8, 16..40),
        query in vec(-1.0f32..1.0, 8),
        m in prop_oneof![Just(1usize), Just(2), Just(4), Just(8)],
        ks in 1usize..9,
        metric in metric(),
    ) {
        let book = pq_train(&data, 8, m, ks, 3).unwrap();
        let table = book.adc_table(&query, metric).unwrap();
        for row in data.chunks_exact(8) {
            let code = book.encode(row).unwrap();
            prop_assert_eq!(code.len(), m);
            prop_assert!(code.iter().all(|&c| (c as usize) < ks));
            let exact = metric.score(&query, &book.decode(&code).unwrap());
            prop_assert!((table.score(&code).unwrap() - exact).abs() < 1e-9);
        }
    }

    #[test]
    fn hash_embeddings_are_unit_or_zero(text in "[a-zA-Z ,.!?'-]{0,200}", dim in 1usize..300, seed in any::<u64>()) {
        let e = HashEmbedder { dimension: dim, seed, normalize: true };
        let v = e.embed(&text);
        prop_assert_eq!(v.dim(), dim);
        prop_assert_eq!(&v, &e.embed(&text));
        if tokenize(&text).is_empty() {
            prop_assert!(v.values().iter().all(|&x| x == 0.0));
        } else {
            prop_assert!((v.norm() - 1.0).abs() < 1e-5);
        }
    }

    #[test]
    fn predictions_are_distributions(
        dim in 1usize..6,
        hidden in 1usize..10,
        seed in any::<u64>(),
        inputs in vec(-3.0f32..3.0, 12),
    ) {
        let params = MlpParams::init(MlpShape::for_embedding_dim(dim, hidden), seed);
        let (label, p) = predict(&params, &inputs[..dim], &inputs[6..6 + dim]).unwrap();
        prop_assert!(p.is_valid(1e-9));
        prop_assert_eq!(label.index(), p.argmax());
    }

    #[test]
    fn segments_respect_the_cap_and_keep_every_token(
        sentences in vec("[A-Z][a-z]{0,6}( [a-z]{1,6}){0,12}[.!?]", 1..25),
        breaks in vec(any::<bool>(), 25),
        cap in 1usize..30,
    ) {
        let mut text = String::new();
        for (i, s) in sentences.iter().enumerate() {
            if i > 0 {
                text.push_str(if breaks[i] { "\n\n" } else { " " });
            }
            text.push_str(s);
        }
        let segs = segment_document("d", &text, cap);
        prop_assert!(segs.iter().all(|s| s.token_count <= cap && s.token_count > 0));
        let ids: Vec<u64> = segs.iter().map(|s| s.id).collect();
        prop_assert_eq!(ids, (0..segs.len() as u64).collect::<Vec<_>>());
        let rejoined: Vec<String> = segs.iter().flat_map(|s| tokenize(&s.text).tokens().to_vec()).collect();
        prop_assert_eq!(rejoined, tokenize(&text).tokens().to_vec());
        prop_assert_eq!(segs.iter().map(|s| s.token_count).sum::<usize>(), count_tokens(&text));
    }

    #[test]
    fn weighted_recall_equals_accuracy(counts in vec(0u64..40, 9)) {
        prop_assume!(counts.iter().any(|&c| c > 0));
        let m = ConfusionMatrix::from_counts(3, counts).unwrap();
        let r = m.precision_recall_f1(Aggregation::Weighted).unwrap();
        prop_assert!((r.recall - r.accuracy).abs() < 1e-12);
        for v in [r.accuracy, r.precision, r.recall, r.f1] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn any_single_byte_flip_is_caught(payload in vec(any::<u8>(), 0..64), pos in any::<prop::sample::Index>(), bit in 0u8..8) {
        let mut w = Writer::new(b"TEST");
        w.u64(payload.len() as u64);
        w.bytes(&payload);
        let mut bytes = w.finish();
        let i = pos.index(bytes.len());
        bytes[i] ^= 1 << bit;
        prop_assert!(Reader::open(&bytes, b"TEST").is_err());
    }
}
