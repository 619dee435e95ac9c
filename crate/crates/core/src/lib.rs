//! Language variety and dialect identification with ensembles of linear SVMs.
//!
//! The pipeline is: load a labeled TSV corpus ([`corpus`]), turn each
//! document into TF-IDF weighted n-gram vectors ([`features`]), train one
//! one-vs-rest linear SVM per feature family ([`svm`]), combine the members
//! by majority vote ([`ensemble`]), pick `C` and the member set by grid
//! search ([`tuning`]) and score predictions with macro-F1 ([`eval`]).
//! Trained ensembles persist through [`model_io`].

pub mod corpus;
pub mod ensemble;
pub mod error;
pub mod eval;
pub mod features;
pub mod model_io;
pub mod svm;
pub mod synth;
pub mod tuning;

pub use corpus::{build_label_set, load_corpus, Document, LabelSet, LabeledCorpus};
pub use ensemble::{
    predict_batch, predict_ensemble, train_ensemble, EnsembleModel, MemberSpec, Preset,
};
pub use error::{Error, Result};
pub use eval::{confusion, macro_f1, report, ConfusionMatrix, ScoreReport};
pub use features::{
    fit_tfidf, transform, FeatureKind, FeatureLimits, FeatureSpec, SparseVector, TfIdfModel,
    Vocabulary,
};
pub use svm::{train_binary, train_multiclass, LinearModel, TrainConfig};
pub use tuning::{grid_search, sweep_members, GridSpec, SearchResult};
