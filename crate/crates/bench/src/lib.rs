//! Shared fixtures for the criterion benches.

use varid_core::synth::SyntheticCorpus;
use varid_core::{Document, LabeledCorpus};

pub const ADI_LABELS: [&str; 5] = ["EGY", "GLF", "LEV", "MSA", "NOR"];

/// A noisy five-label corpus, so the solver does real work.
pub fn corpus(n: usize, seed: u64) -> LabeledCorpus {
    SyntheticCorpus::new(&ADI_LABELS)
        .with_noise(0.3)
        .generate(n, seed)
}

pub fn documents(corpus: &LabeledCorpus) -> Vec<Document> {
    corpus.documents().cloned().collect()
}
