//! N-gram feature extraction and TF-IDF weighting.
//!
//! Three feature families are supported, each selected by a [`FeatureSpec`]:
//!
//! * character n-grams over the lowercased raw text (whitespace and
//!   punctuation included, word boundaries crossed),
//! * word n-grams over [`tokenize`]d text,
//! * word k-skip bigrams: token pairs with up to `k` tokens between them
//!   (or exactly `k` for the `skip-exact` variant).
//!
//! Weights are raw term frequency times the smoothed inverse document
//! frequency `ln((1 + N) / (1 + df)) + 1`, followed by L2 normalization.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::corpus::{Document, LabeledCorpus};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FeatureKind {
    CharNgram,
    WordNgram,
    /// Pairs with 0..=k intervening tokens.
    WordSkipBigram,
    /// Pairs with exactly k intervening tokens.
    WordSkipBigramExact,
}

impl FeatureKind {
    fn prefix(self) -> &'static str {
        match self {
            FeatureKind::CharNgram => "char",
            FeatureKind::WordNgram => "word",
            FeatureKind::WordSkipBigram => "skip",
            FeatureKind::WordSkipBigramExact => "skip-exact",
        }
    }
}

/// Upper bounds on [`FeatureSpec::order`] per family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureLimits {
    pub max_char: usize,
    pub max_word: usize,
    pub max_skip: usize,
}

impl Default for FeatureLimits {
    fn default() -> Self {
        FeatureLimits {
            max_char: 8,
            max_word: 3,
            max_skip: 3,
        }
    }
}

impl FeatureLimits {
    pub fn unbounded() -> Self {
        FeatureLimits {
            max_char: usize::MAX,
            max_word: usize::MAX,
            max_skip: usize::MAX,
        }
    }

    fn max_for(&self, kind: FeatureKind) -> usize {
        match kind {
            FeatureKind::CharNgram => self.max_char,
            FeatureKind::WordNgram => self.max_word,
            FeatureKind::WordSkipBigram | FeatureKind::WordSkipBigramExact => self.max_skip,
        }
    }
}

/// One feature family: `char:N`, `word:N`, `skip:K` or `skip-exact:K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureSpec {
    kind: FeatureKind,
    order: usize,
}

impl FeatureSpec {
    pub fn new(kind: FeatureKind, order: usize) -> Result<Self> {
        Self::with_limits(kind, order, &FeatureLimits::default())
    }

    pub fn with_limits(kind: FeatureKind, order: usize, limits: &FeatureLimits) -> Result<Self> {
        let spec = FeatureSpec { kind, order };
        if order == 0 || order > limits.max_for(kind) {
            return Err(Error::InvalidFeatureSpec(spec.to_string()));
        }
        Ok(spec)
    }

    pub fn char(n: usize) -> Result<Self> {
        Self::new(FeatureKind::CharNgram, n)
    }

    pub fn word(n: usize) -> Result<Self> {
        Self::new(FeatureKind::WordNgram, n)
    }

    pub fn skip(k: usize) -> Result<Self> {
        Self::new(FeatureKind::WordSkipBigram, k)
    }

    pub fn kind(&self) -> FeatureKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// The same spec with skip bigrams switched to exact-gap mode.
    pub fn exact_skips(self) -> Self {
        match self.kind {
            FeatureKind::WordSkipBigram => FeatureSpec {
                kind: FeatureKind::WordSkipBigramExact,
                ..self
            },
            _ => self,
        }
    }

    pub fn parse_with(s: &str, limits: &FeatureLimits) -> Result<Self> {
        let invalid = || Error::InvalidFeatureSpec(s.to_owned());
        let (prefix, order) = s.trim().split_once(':').ok_or_else(invalid)?;
        let kind = match prefix {
            "char" => FeatureKind::CharNgram,
            "word" => FeatureKind::WordNgram,
            "skip" => FeatureKind::WordSkipBigram,
            "skip-exact" => FeatureKind::WordSkipBigramExact,
            _ => return Err(invalid()),
        };
        let order = order.parse().map_err(|_| invalid())?;
        Self::with_limits(kind, order, limits).map_err(|_| invalid())
    }

    /// Calls `emit` once per term occurrence in `text`.
    pub fn for_each_term(&self, text: &str, mut emit: impl FnMut(&str)) {
        match self.kind {
            FeatureKind::CharNgram => {
                let lowered = lowercase(text);
                for_each_char_ngram(&lowered, self.order, &mut emit);
            }
            FeatureKind::WordNgram => {
                let tokens = tokenize(text);
                let mut buf = String::new();
                for window in tokens.windows(self.order) {
                    buf.clear();
                    for (i, tok) in window.iter().enumerate() {
                        if i > 0 {
                            buf.push(' ');
                        }
                        buf.push_str(tok);
                    }
                    emit(&buf);
                }
            }
            FeatureKind::WordSkipBigram | FeatureKind::WordSkipBigramExact => {
                let tokens = tokenize(text);
                let gaps = if self.kind == FeatureKind::WordSkipBigramExact {
                    self.order..=self.order
                } else {
                    0..=self.order
                };
                let mut buf = String::new();
                for_each_skip_pair(&tokens, gaps, |a, b| {
                    buf.clear();
                    buf.push_str(a);
                    buf.push(' ');
                    buf.push_str(b);
                    emit(&buf);
                });
            }
        }
    }

    pub fn terms(&self, text: &str) -> Vec<String> {
        let mut out = Vec::new();
        self.for_each_term(text, |t| out.push(t.to_owned()));
        out
    }
}

impl fmt::Display for FeatureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind.prefix(), self.order)
    }
}

impl FromStr for FeatureSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_with(s, &FeatureLimits::default())
    }
}

/// Parses a comma-separated list such as `char:3,char:4,word:3`.
pub fn parse_spec_list(s: &str, limits: &FeatureLimits) -> Result<Vec<FeatureSpec>> {
    let specs = s
        .split(',')
        .filter(|part| !part.trim().is_empty())
        .map(|part| FeatureSpec::parse_with(part, limits))
        .collect::<Result<Vec<_>>>()?;
    if specs.is_empty() {
        return Err(Error::InvalidFeatureSpec(s.to_owned()));
    }
    Ok(specs)
}

pub fn format_spec_list(specs: &[FeatureSpec]) -> String {
    specs
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

/// Simple (one-to-one) Unicode lowercase mapping, applied per character.
pub fn lowercase(text: &str) -> String {
    text.chars()
        .map(|c| c.to_lowercase().next().unwrap_or(c))
        .collect()
}

/// Lowercases, then splits into maximal alphanumeric runs of at least two
/// characters.
pub fn tokenize(text: &str) -> Vec<String> {
    let lowered = lowercase(text);
    lowered
        .split(|c: char| !c.is_alphanumeric())
        .filter(|tok| tok.chars().nth(1).is_some())
        .map(str::to_owned)
        .collect()
}

fn for_each_char_ngram(lowered: &str, n: usize, emit: &mut impl FnMut(&str)) {
    let mut bounds: Vec<usize> = lowered.char_indices().map(|(i, _)| i).collect();
    bounds.push(lowered.len());
    for start in 0..bounds.len().saturating_sub(n) {
        emit(&lowered[bounds[start]..bounds[start + n]]);
    }
}

fn for_each_skip_pair<'a>(
    tokens: &'a [String],
    gaps: std::ops::RangeInclusive<usize>,
    mut emit: impl FnMut(&'a str, &'a str),
) {
    for (i, first) in tokens.iter().enumerate() {
        for gap in gaps.clone() {
            match tokens.get(i + gap + 1) {
                Some(second) => emit(first, second),
                None => break,
            }
        }
    }
}

/// Contiguous character n-grams of the lowercased text.
pub fn char_ngrams(text: &str, n: usize) -> Vec<String> {
    let mut out = Vec::new();
    if n > 0 {
        for_each_char_ngram(&lowercase(text), n, &mut |t| out.push(t.to_owned()));
    }
    out
}

/// Contiguous token windows of length `n`, space-joined.
pub fn word_ngrams<S: AsRef<str>>(tokens: &[S], n: usize) -> Vec<String> {
    if n == 0 {
        return Vec::new();
    }
    tokens
        .windows(n)
        .map(|w| w.iter().map(AsRef::as_ref).collect::<Vec<&str>>().join(" "))
        .collect()
}

/// Token pairs with 0..=k tokens skipped between them.
pub fn skip_bigrams<S: AsRef<str>>(tokens: &[S], k: usize) -> Vec<String> {
    skip_bigrams_in(tokens, 0..=k)
}

/// Token pairs with exactly k tokens skipped between them.
pub fn skip_bigrams_exact<S: AsRef<str>>(tokens: &[S], k: usize) -> Vec<String> {
    skip_bigrams_in(tokens, k..=k)
}

fn skip_bigrams_in<S: AsRef<str>>(
    tokens: &[S],
    gaps: std::ops::RangeInclusive<usize>,
) -> Vec<String> {
    let mut out = Vec::new();
    for i in 0..tokens.len() {
        for gap in gaps.clone() {
            let Some(second) = tokens.get(i + gap + 1) else {
                break;
            };
            out.push(format!("{} {}", tokens[i].as_ref(), second.as_ref()));
        }
    }
    out
}

/// Sorted sparse vector with strictly increasing indices and no zero entries.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseVector {
    pairs: Vec<(u32, f64)>,
}

impl SparseVector {
    pub fn empty() -> Self {
        SparseVector::default()
    }

    /// Validates ordering and drops nothing: zero or non-finite weights are
    /// rejected.
    pub fn from_pairs(pairs: Vec<(u32, f64)>) -> Result<Self> {
        if pairs.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidConfig(
                "sparse indices must be strictly increasing".into(),
            ));
        }
        if let Some(pos) = pairs.iter().position(|&(_, v)| v == 0.0 || !v.is_finite()) {
            return Err(Error::NonFinite { instance: pos });
        }
        Ok(SparseVector { pairs })
    }

    pub fn pairs(&self) -> &[(u32, f64)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn norm_squared(&self) -> f64 {
        self.pairs.iter().map(|&(_, v)| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Largest stored index plus one, or 0 when empty.
    pub fn dim_hint(&self) -> usize {
        self.pairs.last().map_or(0, |&(i, _)| i as usize + 1)
    }

    /// Dot product with a dense vector; indices beyond `dense` are skipped.
    #[inline]
    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.pairs
            .iter()
            .filter_map(|&(i, v)| dense.get(i as usize).map(|w| w * v))
            .sum()
    }

    #[inline]
    pub fn axpy(&self, scale: f64, dense: &mut [f64]) {
        for &(i, v) in &self.pairs {
            dense[i as usize] += scale * v;
        }
    }
}

/// Terms with their document frequencies; index order is ascending term order.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, u32>,
    document_frequency: Vec<u32>,
    n_documents: usize,
}

impl Vocabulary {
    pub fn from_parts(
        terms: Vec<String>,
        document_frequency: Vec<u32>,
        n_documents: usize,
    ) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        if terms.len() != document_frequency.len() {
            return Err(Error::LengthMismatch {
                left: terms.len(),
                right: document_frequency.len(),
            });
        }
        if terms.len() > u32::MAX as usize {
            return Err(Error::InvalidConfig("vocabulary too large".into()));
        }
        if terms.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::ModelFormat(
                "vocabulary terms are not strictly ascending".into(),
            ));
        }
        if let Some(i) = document_frequency
            .iter()
            .position(|&df| df == 0 || df as usize > n_documents)
        {
            return Err(Error::ModelFormat(format!(
                "document frequency {} of term {:?} outside 1..={n_documents}",
                document_frequency[i], terms[i]
            )));
        }
        let index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Ok(Vocabulary {
            terms,
            index,
            document_frequency,
            n_documents,
        })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn index_of(&self, term: &str) -> Option<u32> {
        self.index.get(term).copied()
    }

    pub fn document_frequency(&self) -> &[u32] {
        &self.document_frequency
    }

    pub fn n_documents(&self) -> usize {
        self.n_documents
    }
}

pub fn smoothed_idf(n_documents: usize, document_frequency: u32) -> f64 {
    ((1.0 + n_documents as f64) / (1.0 + f64::from(document_frequency))).ln() + 1.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct TfIdfModel {
    spec: FeatureSpec,
    vocabulary: Vocabulary,
    idf: Vec<f64>,
}

impl TfIdfModel {
    /// Fits vocabulary and idf weights over `texts`.
    pub fn fit<'a>(texts: impl IntoIterator<Item = &'a str>, spec: FeatureSpec) -> Result<Self> {
        // term -> (document frequency, last document that counted it)
        let mut counts: HashMap<String, (u32, usize)> = HashMap::new();
        let mut n_documents = 0;
        for (doc, text) in texts.into_iter().enumerate() {
            n_documents += 1;
            spec.for_each_term(text, |term| match counts.get_mut(term) {
                Some((df, last)) => {
                    if *last != doc {
                        *df += 1;
                        *last = doc;
                    }
                }
                None => {
                    counts.insert(term.to_owned(), (1, doc));
                }
            });
        }
        if counts.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        let mut sorted: Vec<(String, u32)> =
            counts.into_iter().map(|(t, (df, _))| (t, df)).collect();
        sorted.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let (terms, df): (Vec<String>, Vec<u32>) = sorted.into_iter().unzip();
        let vocabulary = Vocabulary::from_parts(terms, df, n_documents)?;
        let idf = vocabulary
            .document_frequency()
            .iter()
            .map(|&df| smoothed_idf(n_documents, df))
            .collect();
        Ok(TfIdfModel {
            spec,
            vocabulary,
            idf,
        })
    }

    /// Reassembles a fitted model, checking each stored idf against the
    /// smoothing formula.
    pub fn from_parts(spec: FeatureSpec, vocabulary: Vocabulary, idf: Vec<f64>) -> Result<Self> {
        if idf.len() != vocabulary.len() {
            return Err(Error::ModelFormat(format!(
                "idf has {} entries for {} terms",
                idf.len(),
                vocabulary.len()
            )));
        }
        for (i, (&w, &df)) in idf.iter().zip(vocabulary.document_frequency()).enumerate() {
            let expected = smoothed_idf(vocabulary.n_documents(), df);
            if !w.is_finite() || (w - expected).abs() > 1e-12 * expected {
                return Err(Error::ModelFormat(format!(
                    "idf[{i}] = {w} disagrees with document frequency {df}"
                )));
            }
        }
        Ok(TfIdfModel {
            spec,
            vocabulary,
            idf,
        })
    }

    pub fn spec(&self) -> FeatureSpec {
        self.spec
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn idf(&self) -> &[f64] {
        &self.idf
    }

    pub fn n_features(&self) -> usize {
        self.vocabulary.len()
    }

    /// L2-normalized tf-idf vector of `text`; out-of-vocabulary terms are
    /// ignored and a text with no known terms maps to the empty vector.
    pub fn transform_text(&self, text: &str) -> SparseVector {
        let mut hits: Vec<u32> = Vec::new();
        self.spec.for_each_term(text, |term| {
            if let Some(i) = self.vocabulary.index_of(term) {
                hits.push(i);
            }
        });
        if hits.is_empty() {
            return SparseVector::empty();
        }
        hits.sort_unstable();
        let mut pairs: Vec<(u32, f64)> = Vec::new();
        for chunk in hits.chunk_by(|a, b| a == b) {
            let i = chunk[0];
            pairs.push((i, chunk.len() as f64 * self.idf[i as usize]));
        }
        let norm = pairs.iter().map(|&(_, v)| v * v).sum::<f64>().sqrt();
        for (_, v) in &mut pairs {
            *v /= norm;
        }
        SparseVector { pairs }
    }

    pub fn transform(&self, doc: &Document) -> SparseVector {
        self.transform_text(&doc.text)
    }
}

pub fn fit_tfidf(corpus: &LabeledCorpus, spec: FeatureSpec) -> Result<TfIdfModel> {
    if corpus.is_empty() {
        return Err(Error::NoEntries);
    }
    TfIdfModel::fit(corpus.documents().map(|d| d.text.as_str()), spec)
}

pub fn transform(doc: &Document, model: &TfIdfModel) -> SparseVector {
    model.transform(doc)
}
