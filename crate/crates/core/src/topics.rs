//! Topic inference over subjective answers: latent Dirichlet allocation
//! fitted by collapsed Gibbs sampling, plus sentiment stratification by
//! dominant topic.

use std::collections::{HashMap, HashSet};

use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::pipeline::LabeledAnswer;
use crate::sentiment::{tokenize, CoarseLabel};

#[derive(Debug, Error)]
pub enum TopicError {
    #[error("no documents survive corpus construction")]
    EmptyCorpus,
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),
    #[error("topic id {id} out of range for {k} topics")]
    TopicOutOfRange { id: usize, k: usize },
    #[error("answers do not align with corpus documents: {0}")]
    Alignment(String),
}

/// Token-id encoded corpus. `doc_refs[d]` names the answer document `d`
/// came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusMatrix {
    pub vocab: Vec<String>,
    pub docs: Vec<Vec<usize>>,
    pub doc_refs: Vec<(String, usize)>,
}

/// Lowercase, drop stopwords and tokens shorter than two characters, drop
/// documents left empty.
pub fn build_corpus(
    answers: &[LabeledAnswer],
    stopwords: &HashSet<String>,
) -> Result<CorpusMatrix, TopicError> {
    let mut vocab: Vec<String> = Vec::new();
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut docs = Vec::new();
    let mut doc_refs = Vec::new();

    for la in answers {
        let tokens: Vec<usize> = tokenize(&la.answer.text)
            .tokens
            .into_iter()
            .filter(|t| t.text.chars().count() >= 2 && !stopwords.contains(&t.text))
            .map(|t| {
                *ids.entry(t.text.clone()).or_insert_with(|| {
                    vocab.push(t.text);
                    vocab.len() - 1
                })
            })
            .collect();
        if !tokens.is_empty() {
            docs.push(tokens);
            doc_refs.push((la.answer.transcript_id.clone(), la.answer.turn_index));
        }
    }

    if docs.is_empty() {
        return Err(TopicError::EmptyCorpus);
    }
    Ok(CorpusMatrix {
        vocab,
        docs,
        doc_refs,
    })
}

/// Fitted LDA state: per-position assignments plus the count matrices the
/// sampler maintains incrementally.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicModel<F> {
    pub k: usize,
    pub alpha: F,
    pub beta: F,
    pub assignments: Vec<Vec<usize>>,
    pub n_dk: Vec<Vec<u32>>,
    pub n_kw: Vec<Vec<u32>>,
    pub n_k: Vec<u32>,
    pub seed: u64,
    pub iterations: usize,
    pub vocab_size: usize,
}

impl<F: Float> TopicModel<F> {
    /// Recompute all count matrices from the assignments and compare with
    /// the stored ones.
    pub fn counts_consistent(&self, corpus: &CorpusMatrix) -> bool {
        let mut n_dk = vec![vec![0u32; self.k]; corpus.docs.len()];
        let mut n_kw = vec![vec![0u32; self.vocab_size]; self.k];
        let mut n_k = vec![0u32; self.k];
        for (d, doc) in corpus.docs.iter().enumerate() {
            for (pos, &word) in doc.iter().enumerate() {
                let z = self.assignments[d][pos];
                n_dk[d][z] += 1;
                n_kw[z][word] += 1;
                n_k[z] += 1;
            }
        }
        n_dk == self.n_dk && n_kw == self.n_kw && n_k == self.n_k
    }

    /// Smoothed topic-word probability `(n_kw + beta) / (n_k + V beta)`.
    pub fn topic_word_weight(&self, topic: usize, word: usize) -> F {
        let v = F::from(self.vocab_size).unwrap();
        (F::from(self.n_kw[topic][word]).unwrap() + self.beta)
            / (F::from(self.n_k[topic]).unwrap() + v * self.beta)
    }
}

/// Sentiment tallies for answers whose dominant topic is `topic`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TopicSentiment {
    pub topic: usize,
    pub pos: usize,
    pub neg: usize,
}

/// Collapsed Gibbs LDA with a per-sweep observer for instrumentation.
pub fn fit_lda_observed<F, O>(
    corpus: &CorpusMatrix,
    k: usize,
    alpha: F,
    beta: F,
    iterations: usize,
    seed: u64,
    mut on_sweep: O,
) -> Result<TopicModel<F>, TopicError>
where
    F: Float,
    O: FnMut(usize, &TopicModel<F>),
{
    if k < 2 {
        return Err(TopicError::InvalidHyperparameter(format!("K = {k} < 2")));
    }
    if !(alpha > F::zero()) || !(beta > F::zero()) {
        return Err(TopicError::InvalidHyperparameter(
            "alpha and beta must be positive".into(),
        ));
    }
    if iterations < 1 {
        return Err(TopicError::InvalidHyperparameter("iterations < 1".into()));
    }
    if corpus.docs.is_empty() {
        return Err(TopicError::EmptyCorpus);
    }

    let vocab_size = corpus.vocab.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut model = TopicModel {
        k,
        alpha,
        beta,
        assignments: corpus.docs.iter().map(|d| vec![0usize; d.len()]).collect(),
        n_dk: vec![vec![0u32; k]; corpus.docs.len()],
        n_kw: vec![vec![0u32; vocab_size]; k],
        n_k: vec![0u32; k],
        seed,
        iterations,
        vocab_size,
    };

    // uniform random initialization
    for (d, doc) in corpus.docs.iter().enumerate() {
        for (pos, &word) in doc.iter().enumerate() {
            let z = rng.gen_range(0..k);
            model.assignments[d][pos] = z;
            model.n_dk[d][z] += 1;
            model.n_kw[z][word] += 1;
            model.n_k[z] += 1;
        }
    }

    let v_beta = F::from(vocab_size).unwrap() * beta;
    let mut weights = vec![F::zero(); k];
    for sweep in 0..iterations {
        for (d, doc) in corpus.docs.iter().enumerate() {
            for (pos, &word) in doc.iter().enumerate() {
                let old = model.assignments[d][pos];
                model.n_dk[d][old] -= 1;
                model.n_kw[old][word] -= 1;
                model.n_k[old] -= 1;

                let mut total = F::zero();
                for (t, w) in weights.iter_mut().enumerate() {
                    *w = (F::from(model.n_dk[d][t]).unwrap() + alpha)
                        * (F::from(model.n_kw[t][word]).unwrap() + beta)
                        / (F::from(model.n_k[t]).unwrap() + v_beta);
                    total = total + *w;
                }

                let u = F::from(rng.gen::<f64>()).unwrap() * total;
                let mut acc = F::zero();
                let mut new = k - 1;
                for (t, &w) in weights.iter().enumerate() {
                    acc = acc + w;
                    if u < acc {
                        new = t;
                        break;
                    }
                }

                model.assignments[d][pos] = new;
                model.n_dk[d][new] += 1;
                model.n_kw[new][word] += 1;
                model.n_k[new] += 1;
            }
        }
        on_sweep(sweep, &model);
    }

    Ok(model)
}

pub fn fit_lda<F: Float>(
    corpus: &CorpusMatrix,
    k: usize,
    alpha: F,
    beta: F,
    iterations: usize,
    seed: u64,
) -> Result<TopicModel<F>, TopicError> {
    fit_lda_observed(corpus, k, alpha, beta, iterations, seed, |_, _| {})
}

/// The `n` highest-weight vocabulary tokens for one topic, ties broken by
/// vocabulary order.
pub fn top_words<F: Float>(
    model: &TopicModel<F>,
    corpus: &CorpusMatrix,
    topic: usize,
    n: usize,
) -> Result<Vec<String>, TopicError> {
    if topic >= model.k {
        return Err(TopicError::TopicOutOfRange {
            id: topic,
            k: model.k,
        });
    }
    let mut order: Vec<usize> = (0..corpus.vocab.len()).collect();
    order.sort_by_key(|&w| (std::cmp::Reverse(model.n_kw[topic][w]), w));
    Ok(order
        .into_iter()
        .take(n)
        .map(|w| corpus.vocab[w].clone())
        .collect())
}

/// Dominant topic per document (argmax of `n_dk`, ties to the lowest
/// topic id), tallied against the answers' coarse labels. Topics with no
/// dominant documents are omitted.
pub fn topic_sentiment<F: Float>(
    model: &TopicModel<F>,
    corpus: &CorpusMatrix,
    answers: &[LabeledAnswer],
) -> Result<Vec<TopicSentiment>, TopicError> {
    let labels: HashMap<(&str, usize), CoarseLabel> = answers
        .iter()
        .map(|la| {
            (
                (la.answer.transcript_id.as_str(), la.answer.turn_index),
                la.coarse,
            )
        })
        .collect();

    let mut tally: Vec<(usize, usize)> = vec![(0, 0); model.k];
    let mut seen = vec![false; model.k];
    for (d, (id, turn)) in corpus.doc_refs.iter().enumerate() {
        let label = labels
            .get(&(id.as_str(), *turn))
            .ok_or_else(|| TopicError::Alignment(format!("no answer for ({id}, {turn})")))?;
        let mut dominant = 0;
        for t in 1..model.k {
            if model.n_dk[d][t] > model.n_dk[d][dominant] {
                dominant = t;
            }
        }
        seen[dominant] = true;
        match label {
            CoarseLabel::Positive => tally[dominant].0 += 1,
            CoarseLabel::Negative => tally[dominant].1 += 1,
            _ => {}
        }
    }

    Ok((0..model.k)
        .filter(|&t| seen[t])
        .map(|t| TopicSentiment {
            topic: t,
            pos: tally[t].0,
            neg: tally[t].1,
        })
        .collect())
}

/// Per-token perplexity under the point estimates of the fitted model.
pub fn perplexity<F: Float>(model: &TopicModel<F>, corpus: &CorpusMatrix) -> F {
    let k_alpha = F::from(model.k).unwrap() * model.alpha;
    let mut log_likelihood = F::zero();
    let mut tokens = 0usize;
    for (d, doc) in corpus.docs.iter().enumerate() {
        let len_d = F::from(doc.len()).unwrap();
        for &word in doc {
            let mut p = F::zero();
            for t in 0..model.k {
                let theta = (F::from(model.n_dk[d][t]).unwrap() + model.alpha) / (len_d + k_alpha);
                p = p + theta * model.topic_word_weight(t, word);
            }
            log_likelihood = log_likelihood + p.ln();
            tokens += 1;
        }
    }
    (-log_likelihood / F::from(tokens).unwrap()).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::LabeledAnswer;
    use crate::transcript::Answer;

    fn labeled(id: &str, turn: usize, text: &str, coarse: CoarseLabel) -> LabeledAnswer {
        LabeledAnswer {
            answer: Answer {
                transcript_id: id.into(),
                turn_index: turn,
                text: text.into(),
                word_count: text.split_whitespace().count(),
            },
            score: None,
            coarse,
            fine: None,
        }
    }

    fn stopwords(words: &[&str]) -> HashSet<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn build_corpus_hand_example() {
        let answers = vec![
            labeled("t1", 1, "the visa office", CoarseLabel::Positive),
            labeled("t1", 3, "my visa application", CoarseLabel::Negative),
        ];
        let c = build_corpus(&answers, &stopwords(&["the", "my"])).unwrap();
        assert_eq!(c.vocab, vec!["visa", "office", "application"]);
        assert_eq!(c.docs, vec![vec![0, 1], vec![0, 2]]);
        assert_eq!(c.doc_refs, vec![("t1".into(), 1), ("t1".into(), 3)]);
    }

    #[test]
    fn build_corpus_drops_empty_docs_and_short_tokens() {
        let answers = vec![
            labeled("t1", 1, "the the the", CoarseLabel::Positive),
            labeled("t1", 3, "a b visa here", CoarseLabel::Negative),
        ];
        let c = build_corpus(&answers, &stopwords(&["the"])).unwrap();
        assert_eq!(c.docs.len(), 1);
        assert_eq!(c.doc_refs[0], ("t1".into(), 3));
        assert_eq!(c.vocab, vec!["visa", "here"]);
    }

    #[test]
    fn build_corpus_empty_input_errors() {
        assert!(matches!(
            build_corpus(&[], &HashSet::new()),
            Err(TopicError::EmptyCorpus)
        ));
    }

    fn tiny_corpus() -> CorpusMatrix {
        CorpusMatrix {
            vocab: vec!["visa".into(), "office".into(), "rent".into(), "cold".into()],
            docs: vec![vec![0, 1, 0], vec![2, 3, 2], vec![0, 1], vec![3, 2]],
            doc_refs: vec![
                ("a".into(), 1),
                ("a".into(), 3),
                ("b".into(), 1),
                ("b".into(), 3),
            ],
        }
    }

    #[test]
    fn fit_is_deterministic_under_fixed_seed() {
        let c = tiny_corpus();
        let m1 = fit_lda::<f64>(&c, 2, 0.5, 0.01, 1, 7).unwrap();
        let m2 = fit_lda::<f64>(&c, 2, 0.5, 0.01, 1, 7).unwrap();
        assert_eq!(m1.assignments, m2.assignments);
        assert_eq!(m1.n_kw, m2.n_kw);
    }

    #[test]
    fn counts_track_assignments_every_sweep() {
        let c = tiny_corpus();
        let mut checked = 0;
        fit_lda_observed::<f64, _>(&c, 2, 0.5, 0.01, 20, 3, |_, m| {
            assert!(m.counts_consistent(&c));
            checked += 1;
        })
        .unwrap();
        assert_eq!(checked, 20);
    }

    #[test]
    fn single_word_corpus_degenerate() {
        let c = CorpusMatrix {
            vocab: vec!["visa".into()],
            docs: vec![vec![0]],
            doc_refs: vec![("a".into(), 1)],
        };
        let m = fit_lda::<f64>(&c, 2, 0.5, 0.01, 5, 1).unwrap();
        assert!(m.assignments[0][0] < 2);
        assert!(m.counts_consistent(&c));
        assert_eq!(m.n_k.iter().sum::<u32>(), 1);
    }

    #[test]
    fn invalid_hyperparameters_rejected() {
        let c = tiny_corpus();
        assert!(fit_lda::<f64>(&c, 1, 0.5, 0.01, 5, 1).is_err());
        assert!(fit_lda::<f64>(&c, 2, 0.0, 0.01, 5, 1).is_err());
        assert!(fit_lda::<f64>(&c, 2, 0.5, -1.0, 5, 1).is_err());
        assert!(fit_lda::<f64>(&c, 2, 0.5, 0.01, 0, 1).is_err());
    }

    #[test]
    fn topic_relabeling_preserves_invariants() {
        let c = tiny_corpus();
        let m = fit_lda::<f64>(&c, 2, 0.5, 0.01, 10, 11).unwrap();
        // swap topic ids 0 <-> 1 everywhere
        let mut swapped = m.clone();
        for doc in swapped.assignments.iter_mut() {
            for z in doc.iter_mut() {
                *z = 1 - *z;
            }
        }
        swapped.n_dk.iter_mut().for_each(|row| row.swap(0, 1));
        swapped.n_kw.swap(0, 1);
        swapped.n_k.swap(0, 1);
        assert!(swapped.counts_consistent(&c));
    }

    #[test]
    fn top_words_order_and_bounds() {
        let c = tiny_corpus();
        let m = fit_lda::<f64>(&c, 2, 0.5, 0.01, 30, 5).unwrap();
        // n larger than vocab yields the whole vocabulary
        let all = top_words(&m, &c, 0, 100).unwrap();
        assert_eq!(all.len(), c.vocab.len());
        assert!(matches!(
            top_words(&m, &c, 9, 3),
            Err(TopicError::TopicOutOfRange { .. })
        ));
    }

    #[test]
    fn top_words_tie_break_is_vocab_order() {
        let c = tiny_corpus();
        let mut m = fit_lda::<f64>(&c, 2, 0.5, 0.01, 1, 5).unwrap();
        // force uniform counts for topic 0
        m.n_kw[0] = vec![2, 2, 2, 2];
        let words = top_words(&m, &c, 0, 4).unwrap();
        assert_eq!(words, vec!["visa", "office", "rent", "cold"]);
    }

    #[test]
    fn topic_sentiment_tallies_dominant_topics() {
        let c = tiny_corpus();
        let mut m = fit_lda::<f64>(&c, 2, 0.5, 0.01, 1, 5).unwrap();
        // force every document dominant in topic 0
        m.n_dk = vec![vec![3, 0], vec![3, 0], vec![2, 0], vec![2, 0]];
        let answers = vec![
            labeled("a", 1, "x", CoarseLabel::Positive),
            labeled("a", 3, "x", CoarseLabel::Positive),
            labeled("b", 1, "x", CoarseLabel::Negative),
            labeled("b", 3, "x", CoarseLabel::Negative),
        ];
        let ts = topic_sentiment(&m, &c, &answers).unwrap();
        assert_eq!(ts, vec![TopicSentiment { topic: 0, pos: 2, neg: 2 }]);
    }

    #[test]
    fn topic_sentiment_alignment_error() {
        let c = tiny_corpus();
        let m = fit_lda::<f64>(&c, 2, 0.5, 0.01, 1, 5).unwrap();
        let answers = vec![labeled("a", 1, "x", CoarseLabel::Positive)];
        assert!(matches!(
            topic_sentiment(&m, &c, &answers),
            Err(TopicError::Alignment(_))
        ));
    }

    #[test]
    fn disjoint_vocabulary_blocks_separate() {
        // two documents over disjoint vocabularies; after enough sweeps each
        // topic's mass concentrates on one block
        let c = CorpusMatrix {
            vocab: (0..8).map(|i| format!("w{i}")).collect(),
            docs: vec![
                vec![0, 1, 2, 3, 0, 1, 2, 3, 0, 1, 2, 3],
                vec![4, 5, 6, 7, 4, 5, 6, 7, 4, 5, 6, 7],
            ],
            doc_refs: vec![("a".into(), 1), ("b".into(), 1)],
        };
        let m = fit_lda::<f64>(&c, 2, 0.1, 0.01, 200, 42).unwrap();
        for t in 0..2 {
            let block_a: f64 = (0..4).map(|w| m.topic_word_weight(t, w)).sum();
            let block_b: f64 = (4..8).map(|w| m.topic_word_weight(t, w)).sum();
            let concentration = block_a.max(block_b) / (block_a + block_b);
            assert!(
                concentration >= 0.9,
                "topic {t} concentration {concentration}"
            );
        }
    }

    #[test]
    fn perplexity_is_finite_and_positive() {
        let c = tiny_corpus();
        let m = fit_lda::<f64>(&c, 2, 0.5, 0.01, 20, 5).unwrap();
        let p = perplexity(&m, &c);
        assert!(p.is_finite() && p > 0.0);
        assert!(p <= c.vocab.len() as f64 * 2.0);
    }
}
