//! Grid search over the regularization parameter and member combinations,
//! plus the single-member sweep that scores every feature family alone.
//!
//! All members of a candidate ensemble share one `C`. Candidates are
//! evaluated in ascending `C`, then combination order, and the first
//! candidate reaching the best development macro-F1 wins.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::corpus::{build_label_set, LabelSet, LabeledCorpus};
use crate::ensemble::{majority_vote, Preset};
use crate::error::{Error, Result};
use crate::eval::{macro_f1, ConfusionMatrix};
use crate::features::{fit_tfidf, format_spec_list, FeatureSpec, SparseVector};
use crate::svm::{train_multiclass, TrainConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    c_values: Vec<f64>,
    combinations: Vec<Vec<FeatureSpec>>,
}

impl GridSpec {
    pub fn new(c_values: Vec<f64>, combinations: Vec<Vec<FeatureSpec>>) -> Result<Self> {
        if c_values.is_empty() {
            return Err(Error::InvalidConfig(
                "grid needs at least one C value".into(),
            ));
        }
        if let Some(c) = c_values.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
            return Err(Error::InvalidConfig(format!("C must be positive, got {c}")));
        }
        if c_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "C values must be strictly increasing".into(),
            ));
        }
        if combinations.is_empty() || combinations.iter().any(Vec::is_empty) {
            return Err(Error::InvalidConfig(
                "grid needs at least one non-empty combination".into(),
            ));
        }
        Ok(GridSpec {
            c_values,
            combinations,
        })
    }

    /// 10^-3 through 10^3.
    pub fn default_c_values() -> Vec<f64> {
        vec![1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3]
    }

    /// Character 1- to 8-grams, word 1- to 3-grams, 1- to 3-skip bigrams.
    pub fn feature_menu() -> Vec<FeatureSpec> {
        let chars = (1..=8).map(FeatureSpec::char);
        let words = (1..=3).map(FeatureSpec::word);
        let skips = (1..=3).map(FeatureSpec::skip);
        chars
            .chain(words)
            .chain(skips)
            .collect::<Result<Vec<_>>>()
            .expect("menu specs are in range")
    }

    /// Every menu spec alone, then the two preset combinations.
    pub fn default_combinations() -> Vec<Vec<FeatureSpec>> {
        let mut combos: Vec<Vec<FeatureSpec>> =
            Self::feature_menu().into_iter().map(|s| vec![s]).collect();
        combos.push(Preset::Adi.feature_specs());
        combos.push(Preset::Dfs.feature_specs());
        combos
    }

    pub fn c_values(&self) -> &[f64] {
        &self.c_values
    }

    pub fn combinations(&self) -> &[Vec<FeatureSpec>] {
        &self.combinations
    }

    pub fn len(&self) -> usize {
        self.c_values.len() * self.combinations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::new(Self::default_c_values(), Self::default_combinations())
            .expect("default grid is valid")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub c: f64,
    pub combination: Vec<FeatureSpec>,
    pub dev_macro_f1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best_c: f64,
    pub best_combination: Vec<FeatureSpec>,
    pub best_dev_f1: f64,
    pub trace: Vec<TraceEntry>,
}

impl SearchResult {
    /// `C<TAB>combination<TAB>dev_macro_f1` with a header line.
    pub fn trace_tsv(&self) -> String {
        let mut out = String::from("C\tcombination\tdev_macro_f1\n");
        for e in &self.trace {
            let _ = writeln!(
                out,
                "{}\t{}\t{:.6}",
                e.c,
                format_spec_list(&e.combination),
                e.dev_macro_f1
            );
        }
        out
    }

    pub fn winner_line(&self) -> String {
        format!(
            "best C={} features={} dev_macro_f1={:.6}",
            self.best_c,
            format_spec_list(&self.best_combination),
            self.best_dev_f1
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MemberScore {
    pub spec: FeatureSpec,
    pub dev_macro_f1: f64,
}

fn dev_gold(dev: &LabeledCorpus, label_set: &LabelSet) -> Result<Vec<usize>> {
    dev.labels()
        .map(|l| {
            label_set
                .index_of(l)
                .ok_or_else(|| Error::UnknownDevLabel(l.to_owned()))
        })
        .collect()
}

/// Dev-set predictions of one feature family at several values of C.
fn member_predictions(
    train: &LabeledCorpus,
    dev: &LabeledCorpus,
    label_set: &LabelSet,
    spec: FeatureSpec,
    configs: &[TrainConfig],
) -> Result<Vec<Vec<usize>>> {
    let tfidf = fit_tfidf(train, spec)?;
    let xs: Vec<SparseVector> = train.documents().map(|d| tfidf.transform(d)).collect();
    let dev_xs: Vec<SparseVector> = dev.documents().map(|d| tfidf.transform(d)).collect();
    let labels: Vec<&str> = train.labels().collect();
    configs
        .par_iter()
        .map(|config| {
            let model = train_multiclass(&xs, &labels, label_set, &tfidf, config)?;
            dev_xs.iter().map(|x| model.predict_index(x)).collect()
        })
        .collect()
}

fn score(label_set: &LabelSet, gold: &[usize], pred: &[usize]) -> Result<f64> {
    let matrix = ConfusionMatrix::from_indices(label_set.clone(), gold, pred)?;
    Ok(macro_f1(&matrix))
}

/// Trains one single-member model per spec and scores it on `dev`.
pub fn sweep_members(
    train: &LabeledCorpus,
    dev: &LabeledCorpus,
    specs: &[FeatureSpec],
    config: &TrainConfig,
) -> Result<Vec<MemberScore>> {
    if specs.is_empty() {
        return Err(Error::InvalidConfig("no feature specs to sweep".into()));
    }
    config.validate()?;
    let label_set = build_label_set(train)?;
    let gold = dev_gold(dev, &label_set)?;
    specs
        .iter()
        .map(|&spec| {
            let preds = member_predictions(train, dev, &label_set, spec, &[*config])?;
            Ok(MemberScore {
                spec,
                dev_macro_f1: score(&label_set, &gold, &preds[0])?,
            })
        })
        .collect()
}

/// Evaluates every (C, combination) candidate on `dev`. Settings other than
/// C come from `base`.
///
/// Each distinct feature family is fitted once and trained once per C; a
/// candidate's dev predictions are the majority vote over its members'
/// cached predictions, which is exactly what a separately trained ensemble
/// would produce.
pub fn grid_search(
    train: &LabeledCorpus,
    dev: &LabeledCorpus,
    grid: &GridSpec,
    base: &TrainConfig,
) -> Result<SearchResult> {
    base.validate()?;
    let label_set = build_label_set(train)?;
    let gold = dev_gold(dev, &label_set)?;

    let mut distinct: Vec<FeatureSpec> = Vec::new();
    for spec in grid.combinations.iter().flatten() {
        if !distinct.contains(spec) {
            distinct.push(*spec);
        }
    }
    let configs: Vec<TrainConfig> = grid
        .c_values
        .iter()
        .map(|&c| TrainConfig { c, ..*base })
        .collect();
    // cache[spec][c] = dev predictions
    let cache = distinct
        .iter()
        .map(|&spec| member_predictions(train, dev, &label_set, spec, &configs))
        .collect::<Result<Vec<_>>>()?;

    let k = label_set.len();
    let mut trace = Vec::with_capacity(grid.len());
    for (ci, &c) in grid.c_values.iter().enumerate() {
        for combination in &grid.combinations {
            let members: Vec<&Vec<usize>> = combination
                .iter()
                .map(|s| {
                    let si = distinct.iter().position(|d| d == s).expect("spec cached");
                    &cache[si][ci]
                })
                .collect();
            let mut votes = Vec::with_capacity(members.len());
            let pred: Vec<usize> = (0..gold.len())
                .map(|doc| {
                    votes.clear();
                    votes.extend(members.iter().map(|m| m[doc]));
                    majority_vote(&votes, k)
                })
                .collect();
            trace.push(TraceEntry {
                c,
                combination: combination.clone(),
                dev_macro_f1: score(&label_set, &gold, &pred)?,
            });
        }
    }

    let mut best = 0;
    for (i, e) in trace.iter().enumerate() {
        if e.dev_macro_f1 > trace[best].dev_macro_f1 {
            best = i;
        }
    }
    let winner = &trace[best];
    Ok(SearchResult {
        best_c: winner.c,
        best_combination: winner.combination.clone(),
        best_dev_f1: winner.dev_macro_f1,
        trace,
    })
}
