//! Hard-voting ensembles of per-feature-family linear SVMs.
//!
//! Every member fits its own TF-IDF vocabulary on the training split and
//! casts one vote per document. The label with the most votes wins; ties go
//! to the label that sorts first.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::corpus::{build_label_set, Document, LabelSet, LabeledCorpus};
use crate::error::{Error, Result};
use crate::features::{fit_tfidf, FeatureSpec, SparseVector};
use crate::svm::{train_multiclass, LinearModel, TrainConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemberSpec {
    pub spec: FeatureSpec,
    pub config: TrainConfig,
}

impl MemberSpec {
    pub fn new(spec: FeatureSpec, config: TrainConfig) -> Self {
        MemberSpec { spec, config }
    }
}

/// Compiled-in member configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Arabic dialects: character 3-, 4- and 5-grams, C = 1.
    Adi,
    /// Dutch vs. Flemish: character 3- to 6-grams plus word trigrams, C = 100.
    Dfs,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Adi => "adi",
            Preset::Dfs => "dfs",
        }
    }

    pub fn feature_specs(self) -> Vec<FeatureSpec> {
        let specs: &[&str] = match self {
            Preset::Adi => &["char:3", "char:4", "char:5"],
            Preset::Dfs => &["char:3", "char:4", "char:5", "char:6", "word:3"],
        };
        specs
            .iter()
            .map(|s| s.parse().expect("preset specs are valid"))
            .collect()
    }

    pub fn c(self) -> f64 {
        match self {
            Preset::Adi => 1.0,
            Preset::Dfs => 100.0,
        }
    }

    pub fn train_config(self) -> TrainConfig {
        TrainConfig::with_c(self.c())
    }

    /// Preset members, taking every setting but C from `base`.
    pub fn members(self, base: &TrainConfig) -> Vec<MemberSpec> {
        let config = TrainConfig {
            c: self.c(),
            ..*base
        };
        self.feature_specs()
            .into_iter()
            .map(|spec| MemberSpec::new(spec, config))
            .collect()
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "adi" => Ok(Preset::Adi),
            "dfs" => Ok(Preset::Dfs),
            _ => Err(Error::InvalidConfig(format!("unknown preset {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleModel {
    label_set: LabelSet,
    members: Vec<LinearModel>,
}

impl EnsembleModel {
    pub fn new(label_set: LabelSet, members: Vec<LinearModel>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidConfig(
                "an ensemble needs at least one member".into(),
            ));
        }
        if let Some(i) = members.iter().position(|m| m.label_set() != &label_set) {
            return Err(Error::ModelFormat(format!(
                "member {i} has a different label set"
            )));
        }
        Ok(EnsembleModel { label_set, members })
    }

    pub fn label_set(&self) -> &LabelSet {
        &self.label_set
    }

    pub fn members(&self) -> &[LinearModel] {
        &self.members
    }

    /// One predicted label index per member, in member order.
    pub fn votes(&self, text: &str) -> Vec<usize> {
        self.members
            .iter()
            .map(|m| m.predict_text_index(text))
            .collect()
    }

    pub fn predict_index(&self, text: &str) -> usize {
        majority_vote(&self.votes(text), self.label_set.len())
    }

    pub fn predict(&self, doc: &Document) -> &str {
        self.label_set.label(self.predict_index(&doc.text))
    }
}

/// Most frequent label index among `votes`; ties go to the smallest index.
pub fn majority_vote(votes: &[usize], n_labels: usize) -> usize {
    let mut counts = vec![0usize; n_labels];
    for &v in votes {
        counts[v] += 1;
    }
    let mut best = 0;
    for (k, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = k;
        }
    }
    best
}

/// Fits the member's TF-IDF model and trains its one-vs-rest SVM.
pub fn train_member(
    corpus: &LabeledCorpus,
    label_set: &LabelSet,
    member: &MemberSpec,
) -> Result<LinearModel> {
    let tfidf = fit_tfidf(corpus, member.spec)?;
    let xs: Vec<SparseVector> = corpus.documents().map(|d| tfidf.transform(d)).collect();
    let labels: Vec<&str> = corpus.labels().collect();
    train_multiclass(&xs, &labels, label_set, &tfidf, &member.config)
}

pub fn train_ensemble(corpus: &LabeledCorpus, members: &[MemberSpec]) -> Result<EnsembleModel> {
    if members.is_empty() {
        return Err(Error::InvalidConfig(
            "an ensemble needs at least one member".into(),
        ));
    }
    let label_set = build_label_set(corpus)?;
    let trained = members
        .par_iter()
        .map(|m| train_member(corpus, &label_set, m))
        .collect::<Result<Vec<_>>>()?;
    EnsembleModel::new(label_set, trained)
}

pub fn predict_ensemble<'m>(model: &'m EnsembleModel, doc: &Document) -> &'m str {
    model.predict(doc)
}

pub fn predict_batch<'m>(model: &'m EnsembleModel, docs: &[Document]) -> Vec<&'m str> {
    docs.par_iter().map(|d| model.predict(d)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_vote(votes: &[usize], n_labels: usize) -> usize {
        (0..n_labels)
            .map(|k| (votes.iter().filter(|&&v| v == k).count(), k))
            .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)))
            .unwrap()
            .1
    }

    #[test]
    fn vote_examples() {
        let adi = LabelSet::new(["EGY", "GLF", "LEV", "MSA", "NOR"]).unwrap();
        let idx = |l: &str| adi.index_of(l).unwrap();
        let vote = |ls: &[&str]| {
            let v: Vec<usize> = ls.iter().map(|l| idx(l)).collect();
            adi.label(majority_vote(&v, adi.len())).to_owned()
        };
        assert_eq!(vote(&["EGY", "EGY", "MSA"]), "EGY");
        assert_eq!(vote(&["NOR", "LEV", "NOR", "LEV", "EGY"]), "LEV");

        let dfs = LabelSet::new(["DUT", "BEL"]).unwrap();
        let v = [dfs.index_of("DUT").unwrap(), dfs.index_of("BEL").unwrap()];
        assert_eq!(dfs.label(majority_vote(&v, 2)), "BEL");
    }

    #[test]
    fn presets_expand() {
        let adi = Preset::Adi.members(&TrainConfig::default());
        assert_eq!(adi.len(), 3);
        assert!(adi.iter().all(|m| m.config.c == 1.0));
        assert_eq!(
            Preset::Adi
                .feature_specs()
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>(),
            ["char:3", "char:4", "char:5"]
        );
        let dfs = Preset::Dfs.members(&TrainConfig::default());
        assert_eq!(dfs.len(), 5);
        assert!(dfs.iter().all(|m| m.config.c == 100.0));
        assert_eq!(
            Preset::Dfs
                .feature_specs()
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>(),
            ["char:3", "char:4", "char:5", "char:6", "word:3"]
        );
        assert_eq!("DFS".parse::<Preset>().unwrap(), Preset::Dfs);
        assert!("gdi".parse::<Preset>().is_err());
    }

    #[test]
    fn empty_member_list_is_rejected() {
        let corpus = LabeledCorpus::from_pairs([("aa", "A"), ("bb", "B")]).unwrap();
        assert!(train_ensemble(&corpus, &[]).is_err());
    }

    fn small_corpus() -> LabeledCorpus {
        LabeledCorpus::from_pairs([
            ("allee zeg gij", "BEL"),
            ("goesting hebben zeg", "BEL"),
            ("nou hoor jij", "DUT"),
            ("leuk hoor jongens", "DUT"),
            ("amai zeg", "BEL"),
            ("gezellig hoor", "DUT"),
        ])
        .unwrap()
    }

    #[test]
    fn single_member_matches_member() {
        let corpus = small_corpus();
        let members = [MemberSpec::new(
            FeatureSpec::char(3).unwrap(),
            TrainConfig::default(),
        )];
        let model = train_ensemble(&corpus, &members).unwrap();
        let docs: Vec<Document> = ["zeg eens", "hoor eens", "xyz", "jij gij"]
            .into_iter()
            .map(Document::from)
            .collect();
        let batch = predict_batch(&model, &docs);
        for (doc, label) in docs.iter().zip(&batch) {
            let member = &model.members()[0];
            assert_eq!(
                member
                    .label_set()
                    .label(member.predict_text_index(&doc.text)),
                *label
            );
            assert_eq!(predict_ensemble(&model, doc), *label);
        }
        assert!(predict_batch(&model, &[]).is_empty());
    }

    #[test]
    fn members_keep_order_and_label_set() {
        let corpus = small_corpus();
        let model = train_ensemble(&corpus, &Preset::Dfs.members(&TrainConfig::default())).unwrap();
        assert_eq!(model.members().len(), 5);
        for (m, spec) in model.members().iter().zip(Preset::Dfs.feature_specs()) {
            assert_eq!(m.tfidf().spec(), spec);
            assert_eq!(m.label_set(), model.label_set());
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn vote_matches_brute_force(
                n_labels in 2usize..7,
                raw in proptest::collection::vec(0usize..64, 1..12),
            ) {
                let votes: Vec<usize> = raw.iter().map(|v| v % n_labels).collect();
                let winner = majority_vote(&votes, n_labels);
                prop_assert_eq!(winner, brute_force_vote(&votes, n_labels));
                let count = votes.iter().filter(|&&v| v == winner).count();
                prop_assert!(count >= 1);
                prop_assert!(count >= votes.len().div_ceil(n_labels));
            }

            #[test]
            fn unanimous_vote_wins(n_labels in 2usize..7, label in 0usize..7, v in 1usize..9) {
                let label = label % n_labels;
                prop_assert_eq!(majority_vote(&vec![label; v], n_labels), label);
            }
        }
    }
}
