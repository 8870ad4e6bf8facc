use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lextune_core::bayesopt::{expected_improvement, GpModel, KernelParams};
use lextune_core::evaluation::{average_precision, ndcg, parse_qrels, parse_run, precision_at_k, write_run, Qrels};
use lextune_core::hyperspace::{ConfigPoint, SpaceDef, ENCODED_DIM};
use lextune_core::index::{build_index, Document, IndexVariant, InvertedIndex};
use lextune_core::retrieval::{prf_expand, score_bm25, score_tfidf, Ranking, ScoredDoc, TopicId, WeightedQuery};
use lextune_core::{ConfigPoint64, RunFile64};

const VOCAB: [&str; 8] = ["amber", "basalt", "cobalt", "dune", "ember", "flint", "garnet", "heath"];
const PLAIN: IndexVariant = IndexVariant {
    stopper: false,
    stemmer: false,
};

fn corpus() -> impl Strategy<Value = Vec<Vec<usize>>> {
    prop::collection::vec(prop::collection::vec(0..VOCAB.len(), 1..15), 1..8)
}

fn index_of(docs: &[Vec<usize>]) -> InvertedIndex {
    let docs: Vec<Document> = docs
        .iter()
        .enumerate()
        .map(|(i, words)| {
            let text: Vec<&str> = words.iter().map(|&w| VOCAB[w]).collect();
            Document::new(format!("D{i:02}"), text.join(" "))
        })
        .collect();
    build_index(&docs, PLAIN).unwrap()
}

fn sampled_point(seed: u64) -> ConfigPoint64 {
    SpaceDef::standard().sample_random(&mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #[test]
    fn encoding_is_in_unit_cube_with_one_hot_model(seed in any::<u64>()) {
        let point = sampled_point(seed);
        let x = SpaceDef::standard().encode(&point).unwrap();
        let x = x.as_slice();
        prop_assert_eq!(x.len(), ENCODED_DIM);
        prop_assert!(x.iter().all(|v| (0.0..=1.0).contains(v)));
        prop_assert_eq!(x[2..7].iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn sampled_points_validate_and_round_trip(seed in any::<u64>()) {
        let point = sampled_point(seed);
        SpaceDef::standard().validate(&point).unwrap();
        prop_assert_eq!(ConfigPoint::parse_kv(&point.to_kv()).unwrap(), point);
        prop_assert_eq!(ConfigPoint::parse_kv(&point.to_kv_inline()).unwrap(), point);
    }

    #[test]
    fn ei_nonnegative(mean in -5.0f64..5.0, var in 0.0f64..4.0, best in -5.0f64..5.0) {
        prop_assert!(expected_improvement(mean, var, best) >= 0.0);
    }

    #[test]
    fn ei_at_incumbent_grows_with_variance(best in -5.0f64..5.0, v in 1e-6f64..4.0, dv in 1e-6f64..4.0) {
        prop_assert!(expected_improvement(best, v + dv, best) > expected_improvement(best, v, best));
    }

    #[test]
    fn posterior_variance_bounded_by_prior(
        xs in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 3), 1..12),
        query in prop::collection::vec(0.0f64..1.0, 3),
        lengthscale in 0.1f64..2.0,
        seed in any::<u64>(),
    ) {
        let ys: Vec<f64> = xs.iter().enumerate().map(|(i, x)| (x[0] * 7.0 + (seed % 13) as f64 + i as f64).sin()).collect();
        let params = KernelParams::from_targets(&ys, lengthscale, 1e-4);
        let model = GpModel::fit(&xs, &ys, params).unwrap();
        let (_, var) = model.posterior(&query);
        prop_assert!(var >= 0.0);
        prop_assert!(var <= params.signal_var + params.noise_var);
    }

    #[test]
    fn single_precision_model_tracks_double(
        xs in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 2), 1..6),
        query in prop::collection::vec(0.0f64..1.0, 2),
    ) {
        let ys: Vec<f64> = xs.iter().map(|x| x[0] - x[1]).collect();
        let m64 = GpModel::fit(&xs, &ys, KernelParams::from_targets(&ys, 0.5, 1e-2)).unwrap();
        let xs32: Vec<Vec<f32>> = xs.iter().map(|x| x.iter().map(|&v| v as f32).collect()).collect();
        let ys32: Vec<f32> = ys.iter().map(|&y| y as f32).collect();
        let m32 = GpModel::fit(&xs32, &ys32, KernelParams::from_targets(&ys32, 0.5, 1e-2)).unwrap();
        let q32: Vec<f32> = query.iter().map(|&v| v as f32).collect();
        prop_assert!((m64.posterior(&query).0 - m32.posterior(&q32).0 as f64).abs() < 1e-3);
    }

    #[test]
    fn collection_probabilities_sum_to_one(docs in corpus()) {
        let index = index_of(&docs);
        let total: f64 = index.terms().iter().map(|t| index.collection_prob::<f64>(t).unwrap()).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert_eq!(index.collection_prob::<f64>("zircon").unwrap(), 0.0);
    }

    #[test]
    fn expanded_query_is_a_distribution(
        docs in corpus(),
        query in prop::collection::vec(0..VOCAB.len(), 1..4),
        fb_docs in 1usize..5,
        fb_terms in 1usize..8,
        fb_mu in 0.0f64..200.0,
        orig in 0.0f64..1.0,
    ) {
        let index = index_of(&docs);
        let query = WeightedQuery::<f64>::from_tokens(query.iter().map(|&w| VOCAB[w].to_owned()).collect()).unwrap();
        let entries = index
            .docnos()
            .iter()
            .enumerate()
            .map(|(i, d)| ScoredDoc { docno: d.clone(), score: -(i as f64) })
            .collect();
        let first = Ranking::from_scored(TopicId::new("1"), entries, 100);
        let expanded = prf_expand(&index, &query, &first, fb_docs, fb_terms, fb_mu, orig).unwrap();
        let total: f64 = expanded.terms().values().sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
        prop_assert!(expanded.terms().values().all(|&w| w > 0.0));
    }

    #[test]
    fn term_weighting_is_monotone_in_tf(
        tf in 1usize..8,
        filler in 1usize..8,
        background in 3usize..8,
        k1 in 1.0f64..2.0,
        b in 0.0f64..1.0,
    ) {
        // Same length, one more occurrence of the query term.
        let doc = |n: usize| {
            let mut words = vec![0; n];
            words.extend(std::iter::repeat_n(1, tf + filler - n));
            words
        };
        let mut docs = vec![doc(tf), doc(tf + 1)];
        docs.extend((0..background).map(|_| vec![2, 3]));
        let index = index_of(&docs);
        let query = WeightedQuery::<f64>::from_tokens(vec![VOCAB[0].to_owned()]).unwrap();
        let (lo, hi) = (index.doc_ordinal("D00").unwrap(), index.doc_ordinal("D01").unwrap());
        prop_assert!(score_tfidf(&index, &query, hi, k1, b).unwrap() > score_tfidf(&index, &query, lo, k1, b).unwrap());
        prop_assert!(
            score_bm25(&index, &query, hi, k1, 7.0, b).unwrap() > score_bm25(&index, &query, lo, k1, 7.0, b).unwrap()
        );
    }

    #[test]
    fn run_files_round_trip(
        topics in prop::collection::btree_map(1u32..500, prop::collection::btree_map("[a-z]{1,6}", -400i32..400, 1..10), 1..5)
    ) {
        let mut text = String::new();
        for (topic, docs) in &topics {
            let mut entries: Vec<_> = docs.iter().collect();
            entries.sort_by(|a, b| b.1.cmp(a.1).then(a.0.cmp(b.0)));
            for (k, (docno, score)) in entries.iter().enumerate() {
                text += &format!("{topic} Q0 {docno} {} {} tag\n", k + 1, **score as f64 / 4.0);
            }
        }
        let run: RunFile64 = parse_run(&text).unwrap();
        let written = write_run(&run);
        prop_assert_eq!(&parse_run::<f64>(&written).unwrap(), &run);
        prop_assert_eq!(write_run(&parse_run::<f64>(&written).unwrap()), written);
    }

    #[test]
    fn measures_lie_in_unit_interval(
        ranked in prop::collection::vec(0u8..30, 0..25),
        judged in prop::collection::btree_map(0u8..30, 0i32..4, 1..20),
    ) {
        let mut seen = std::collections::HashSet::new();
        let entries: Vec<_> = ranked
            .into_iter()
            .filter(|d| seen.insert(*d))
            .enumerate()
            .map(|(i, d)| ScoredDoc { docno: format!("d{d}"), score: 100.0 - i as f64 })
            .collect();
        let topic = TopicId::new("7");
        let ranking = Ranking::from_scored(topic.clone(), entries, 1000);
        let mut grades = BTreeMap::new();
        for (d, g) in judged {
            grades.insert(format!("d{d}"), g);
        }
        let qrels = Qrels::new(BTreeMap::from([(topic.clone(), grades)]));
        prop_assume!(qrels.relevant_count(&topic) > 0);
        for m in [
            average_precision::<f64>(&ranking, &qrels, &topic).unwrap(),
            ndcg::<f64>(&ranking, &qrels, &topic).unwrap(),
            precision_at_k::<f64>(&ranking, &qrels, &topic, 10).unwrap(),
        ] {
            prop_assert!((0.0..=1.0 + 1e-12).contains(&m), "{m}");
        }
    }
}

#[test]
fn qrels_parse_is_order_insensitive() {
    let a = parse_qrels("2 0 x 1\n1 0 y 0\n1 0 z 2\n").unwrap();
    let b = parse_qrels("1 0 z 2\n2 0 x 1\n1 0 y 0\n").unwrap();
    assert_eq!(a, b);
}
