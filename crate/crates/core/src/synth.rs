//! Synthetic "dialect" corpora for tests, benchmarks and demos.
//!
//! Every label owns a disjoint set of marker words. Markers of different
//! labels are syllable rotations of the same base words, so all labels share
//! one character inventory and only character order (or whole words) tells
//! them apart. Documents mix markers of their own label with shared filler
//! words.

use std::collections::HashSet;

use rand::seq::IndexedRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::LabeledCorpus;

const SYLLABLES: &[&str] = &[
    "ka", "lo", "mi", "ne", "su", "tar", "vo", "dri", "pe", "gu", "zan", "bel",
];

const FILLERS: &[&str] = &[
    "de", "het", "een", "en", "van", "ik", "je", "dat", "is", "niet", "op", "te", "met", "maar",
    "wat", "zijn", "er", "ook", "nog", "wel", "al", "als", "bij", "om", "dan", "naar", "hier",
    "daar", "nu", "toch",
];

#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    labels: Vec<String>,
    /// markers[label] = that label's marker words
    markers: Vec<Vec<String>>,
    noise: f64,
    markers_per_doc: (usize, usize),
    fillers_per_doc: (usize, usize),
}

impl SyntheticCorpus {
    /// A generator with 24 markers per label and no feature noise.
    pub fn new<S: AsRef<str>>(labels: &[S]) -> Self {
        Self::with_vocabulary(labels, 24)
    }

    pub fn with_vocabulary<S: AsRef<str>>(labels: &[S], markers_per_label: usize) -> Self {
        assert!(labels.len() >= 2, "need at least two labels");
        let k = labels.len();
        let width = k.max(3);
        assert!(
            width <= SYLLABLES.len(),
            "too many labels for the syllable inventory"
        );
        let mut rng = ChaCha8Rng::seed_from_u64(0x005e_ed0f_d1a1);
        let mut used: HashSet<String> = HashSet::new();
        let mut markers = vec![Vec::with_capacity(markers_per_label); k];
        while markers[0].len() < markers_per_label {
            let base: Vec<&str> = SYLLABLES.sample(&mut rng, width).copied().collect();
            let rotations: Vec<String> = (0..k)
                .map(|r| {
                    let mut s = base.clone();
                    s.rotate_left(r);
                    s.concat()
                })
                .collect();
            if rotations.iter().any(|w| used.contains(w)) {
                continue;
            }
            for (label, word) in rotations.into_iter().enumerate() {
                used.insert(word.clone());
                markers[label].push(word);
            }
        }
        SyntheticCorpus {
            labels: labels.iter().map(|l| l.as_ref().to_owned()).collect(),
            markers,
            noise: 0.0,
            markers_per_doc: (2, 4),
            fillers_per_doc: (3, 8),
        }
    }

    /// Probability that each marker token is drawn from a random label's
    /// vocabulary instead of the document's own.
    pub fn with_noise(mut self, noise: f64) -> Self {
        self.noise = noise.clamp(0.0, 1.0);
        self
    }

    pub fn markers(&self, label: usize) -> &[String] {
        &self.markers[label]
    }

    /// `n` documents, labels assigned round-robin.
    pub fn generate(&self, n: usize, seed: u64) -> LabeledCorpus {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = self.labels.len();
        let pairs: Vec<(String, &str)> = (0..n)
            .map(|i| {
                let label = i % k;
                (self.document(label, &mut rng), self.labels[label].as_str())
            })
            .collect();
        LabeledCorpus::from_pairs(pairs).expect("synthetic entries are valid")
    }

    fn document(&self, label: usize, rng: &mut ChaCha8Rng) -> String {
        let n_markers = rng.random_range(self.markers_per_doc.0..=self.markers_per_doc.1);
        let n_fillers = rng.random_range(self.fillers_per_doc.0..=self.fillers_per_doc.1);
        let mut words: Vec<&str> = Vec::with_capacity(n_markers + n_fillers);
        for _ in 0..n_markers {
            let source = if self.noise > 0.0 && rng.random_bool(self.noise) {
                rng.random_range(0..self.labels.len())
            } else {
                label
            };
            words.push(self.markers[source].choose(rng).expect("markers exist"));
        }
        for _ in 0..n_fillers {
            words.push(FILLERS.choose(rng).expect("fillers exist"));
        }
        // interleave deterministically
        for i in (1..words.len()).rev() {
            let j = rng.random_range(0..=i);
            words.swap(i, j);
        }
        words.join(" ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn marker_vocabularies_are_disjoint() {
        let gen = SyntheticCorpus::new(&["EGY", "GLF", "LEV", "MSA", "NOR"]);
        let mut all = HashSet::new();
        for label in 0..5 {
            assert_eq!(gen.markers(label).len(), 24);
            for m in gen.markers(label) {
                assert!(all.insert(m.clone()), "{m} shared");
            }
        }
    }

    #[test]
    fn generation_is_seeded() {
        let gen = SyntheticCorpus::new(&["BEL", "DUT"]);
        assert_eq!(gen.generate(50, 3), gen.generate(50, 3));
        assert_ne!(gen.generate(50, 3), gen.generate(50, 4));
        let corpus = gen.generate(10, 1);
        assert_eq!(corpus.len(), 10);
        assert_eq!(corpus.labels().filter(|l| *l == "BEL").count(), 5);
    }

    #[test]
    fn clean_documents_only_use_own_markers() {
        let gen = SyntheticCorpus::new(&["A", "B", "C"]);
        let corpus = gen.generate(60, 9);
        for (doc, label) in corpus.entries() {
            let own = (label.as_bytes()[0] - b'A') as usize;
            for word in doc.text.split(' ') {
                for other in (0..3).filter(|&l| l != own) {
                    assert!(!gen.markers(other).iter().any(|m| m == word));
                }
            }
        }
    }
}
