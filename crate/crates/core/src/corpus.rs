//! Labeled datasets and the canonical label order.
//!
//! Datasets are plain TSV: one `text<TAB>label` instance per line, UTF-8,
//! LF or CRLF terminated, no header and no quoting. Blank lines are skipped.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use unicode_normalization::{is_nfc, UnicodeNormalization};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub text: String,
    pub id: Option<String>,
}

impl Document {
    pub fn new(text: impl Into<String>) -> Self {
        Document {
            text: text.into(),
            id: None,
        }
    }
}

impl From<&str> for Document {
    fn from(text: &str) -> Self {
        Document::new(text)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabeledCorpus {
    entries: Vec<(Document, String)>,
}

impl LabeledCorpus {
    /// Builds a corpus from in-memory pairs, applying the same validation as
    /// the file loader. Line numbers in errors are 1-based entry positions.
    pub fn from_pairs<T, L>(pairs: impl IntoIterator<Item = (T, L)>) -> Result<Self>
    where
        T: Into<String>,
        L: AsRef<str>,
    {
        let mut entries = Vec::new();
        for (i, (text, label)) in pairs.into_iter().enumerate() {
            let text = text.into();
            let label = label.as_ref();
            validate_entry(&text, label).map_err(|message| Error::Parse {
                line: i + 1,
                message,
            })?;
            entries.push((Document::new(text), canonical_label(label)));
        }
        if entries.is_empty() {
            return Err(Error::NoEntries);
        }
        Ok(LabeledCorpus { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(Document, String)] {
        &self.entries
    }

    pub fn documents(&self) -> impl ExactSizeIterator<Item = &Document> + '_ {
        self.entries.iter().map(|(doc, _)| doc)
    }

    pub fn labels(&self) -> impl ExactSizeIterator<Item = &str> + '_ {
        self.entries.iter().map(|(_, label)| label.as_str())
    }
}

fn validate_entry(text: &str, label: &str) -> std::result::Result<(), String> {
    if text.is_empty() {
        return Err("empty text".into());
    }
    if label.is_empty() {
        return Err("empty label".into());
    }
    if text.contains(['\t', '\n']) || label.contains(['\t', '\n']) {
        return Err("expected exactly one tab separating text and label".into());
    }
    Ok(())
}

fn canonical_label(label: &str) -> String {
    if is_nfc(label) {
        label.to_owned()
    } else {
        label.nfc().collect()
    }
}

/// Loads a `text<TAB>label` TSV file.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<LabeledCorpus> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8(bytes).map_err(|e| Error::Encoding {
        path: path.to_owned(),
        offset: e.utf8_error().valid_up_to(),
    })?;
    parse_corpus(&text)
}

/// Parses TSV content already in memory.
pub fn parse_corpus(content: &str) -> Result<LabeledCorpus> {
    let mut entries = Vec::new();
    for (i, line) in split_lines(content).enumerate() {
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: &str| Error::Parse {
            line: i + 1,
            message: message.to_owned(),
        };
        let mut fields = line.split('\t');
        let (text, label) = match (fields.next(), fields.next(), fields.next()) {
            (Some(text), Some(label), None) => (text, label),
            (_, None, _) => return Err(parse_err("no tab separating text and label")),
            _ => return Err(parse_err("more than one tab")),
        };
        if text.is_empty() {
            return Err(parse_err("empty text"));
        }
        if label.is_empty() {
            return Err(parse_err("empty label"));
        }
        entries.push((Document::new(text), canonical_label(label)));
    }
    if entries.is_empty() {
        return Err(Error::NoEntries);
    }
    Ok(LabeledCorpus { entries })
}

/// Splits on LF, dropping one trailing CR per line and the empty remainder
/// after a final terminator.
pub fn split_lines(content: &str) -> impl Iterator<Item = &str> {
    let body = content.strip_suffix('\n').unwrap_or(content);
    let empty = content.is_empty();
    body.split('\n')
        .filter(move |_| !empty)
        .map(|line| line.strip_suffix('\r').unwrap_or(line))
}

/// Distinct labels in ascending bytewise order of their NFC form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct LabelSet {
    labels: Vec<String>,
}

impl LabelSet {
    /// Builds a label set from any collection of labels; duplicates collapse.
    pub fn new<S: AsRef<str>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let distinct: BTreeSet<String> = labels
            .into_iter()
            .map(|l| canonical_label(l.as_ref()))
            .collect();
        if distinct.len() < 2 {
            return Err(Error::DegenerateLabelSet(distinct.len()));
        }
        Ok(LabelSet {
            labels: distinct.into_iter().collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        if is_nfc(label) {
            self.labels.binary_search_by(|l| l.as_str().cmp(label)).ok()
        } else {
            let canonical: String = label.nfc().collect();
            self.labels.binary_search(&canonical).ok()
        }
    }

    pub fn require_index(&self, label: &str) -> Result<usize> {
        self.index_of(label)
            .ok_or_else(|| Error::UnknownLabel(label.to_owned()))
    }
}

impl TryFrom<Vec<String>> for LabelSet {
    type Error = Error;

    /// Accepts only an already canonical list: NFC, strictly ascending.
    fn try_from(labels: Vec<String>) -> Result<Self> {
        if labels.len() < 2 {
            return Err(Error::DegenerateLabelSet(labels.len()));
        }
        if let Some(bad) = labels.iter().find(|l| l.is_empty() || !is_nfc(l)) {
            return Err(Error::ModelFormat(format!(
                "label {bad:?} is empty or not NFC-normalized"
            )));
        }
        if labels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::ModelFormat(
                "labels are not strictly ascending".into(),
            ));
        }
        Ok(LabelSet { labels })
    }
}

impl From<LabelSet> for Vec<String> {
    fn from(set: LabelSet) -> Self {
        set.labels
    }
}

pub fn build_label_set(corpus: &LabeledCorpus) -> Result<LabelSet> {
    if corpus.is_empty() {
        return Err(Error::NoEntries);
    }
    LabelSet::new(corpus.labels())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_two_line_file() {
        let corpus = parse_corpus("hoi allemaal\tBEL\nhallo mensen\tDUT\n").unwrap();
        assert_eq!(corpus.len(), 2);
        assert_eq!(corpus.labels().collect::<Vec<_>>(), ["BEL", "DUT"]);
        assert_eq!(corpus.entries()[0].0.text, "hoi allemaal");
    }

    #[test]
    fn crlf_and_blank_lines() {
        let corpus = parse_corpus(" padded text \tA\r\n\r\n\nsecond\tB").unwrap();
        assert_eq!(corpus.len(), 2);
        assert_eq!(corpus.entries()[0].0.text, " padded text ");
        assert_eq!(corpus.entries()[1].1, "B");
    }

    #[test]
    fn empty_file_has_no_entries() {
        assert!(matches!(parse_corpus(""), Err(Error::NoEntries)));
        assert!(matches!(parse_corpus("\n\n"), Err(Error::NoEntries)));
    }

    #[test]
    fn line_without_tab_is_rejected() {
        match parse_corpus("no label here") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_lines_report_their_number() {
        for (content, expected) in [
            ("a\tB\nx\ty\tz\n", 2),
            ("a\tB\n\n\tB\n", 3),
            ("a\tB\nb\t\n", 2),
        ] {
            match parse_corpus(content) {
                Err(Error::Parse { line, .. }) => assert_eq!(line, expected, "{content:?}"),
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn non_utf8_file_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.tsv");
        fs::write(&path, b"ok\tA\n\xff\xfe\tB\n").unwrap();
        assert!(matches!(
            load_corpus(&path),
            Err(Error::Encoding { offset: 5, .. })
        ));
        assert!(matches!(
            load_corpus(dir.path().join("missing.tsv")),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn label_set_is_sorted() {
        let corpus = LabeledCorpus::from_pairs(
            ["NOR", "EGY", "GLF", "MSA", "LEV"]
                .iter()
                .map(|l| (format!("text {l}"), *l)),
        )
        .unwrap();
        let set = build_label_set(&corpus).unwrap();
        assert_eq!(set.labels(), ["EGY", "GLF", "LEV", "MSA", "NOR"]);
        for (i, l) in set.labels().iter().enumerate() {
            assert_eq!(set.index_of(l), Some(i));
        }

        let set = LabelSet::new(["DUT", "BEL", "DUT"]).unwrap();
        assert_eq!(set.labels(), ["BEL", "DUT"]);
    }

    #[test]
    fn single_label_is_degenerate() {
        let corpus = LabeledCorpus::from_pairs([("a", "MSA"), ("b", "MSA")]).unwrap();
        assert!(matches!(
            build_label_set(&corpus),
            Err(Error::DegenerateLabelSet(1))
        ));
    }

    #[test]
    fn labels_compare_in_nfc() {
        // "é" precomposed vs decomposed collapse to one label.
        let set = LabelSet::new(["\u{e9}", "e\u{301}", "z"]).unwrap();
        assert_eq!(set.len(), 2);
        // bytewise: 'z' (0x7A) sorts before 'é' (0xC3 0xA9)
        assert_eq!(set.index_of("z"), Some(0));
        assert_eq!(set.index_of("e\u{301}"), Some(1));
    }

    #[test]
    fn deserialized_label_set_must_be_canonical() {
        assert!(LabelSet::try_from(vec!["B".to_owned(), "A".to_owned()]).is_err());
        assert!(LabelSet::try_from(vec!["A".to_owned(), "A".to_owned()]).is_err());
        assert!(LabelSet::try_from(vec!["A".to_owned()]).is_err());
        assert!(LabelSet::try_from(vec!["A".to_owned(), "B".to_owned()]).is_ok());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn label_set_is_order_insensitive(
                labels in proptest::collection::vec("[A-Za-z]{1,4}", 2..30),
                seed in any::<u64>(),
            ) {
                let mut shuffled = labels.clone();
                // deterministic rotation + reversal as the permutation
                let shift = (seed as usize) % shuffled.len();
                shuffled.rotate_left(shift);
                if seed % 2 == 0 {
                    shuffled.reverse();
                }
                let a = LabelSet::new(&labels);
                let b = LabelSet::new(&shuffled);
                match (a, b) {
                    (Ok(a), Ok(b)) => {
                        prop_assert_eq!(&a, &b);
                        for l in &labels {
                            prop_assert_eq!(a.labels().iter().filter(|x| *x == l).count(), 1);
                        }
                    }
                    (Err(_), Err(_)) => {}
                    _ => prop_assert!(false, "order changed success"),
                }
            }

            #[test]
            fn loading_is_deterministic(
                rows in proptest::collection::vec(("[a-z ]{1,12}", "[A-C]"), 1..20),
            ) {
                let content: String = rows
                    .iter()
                    .map(|(t, l)| format!("{t}\t{l}\n"))
                    .collect();
                prop_assert_eq!(parse_corpus(&content).unwrap(), parse_corpus(&content).unwrap());
            }
        }
    }
}
