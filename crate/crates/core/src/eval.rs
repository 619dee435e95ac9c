//! Confusion matrices, per-class precision/recall/F1 and macro-F1.
//!
//! Undefined ratios (0/0) count as 0, and the macro average runs over every
//! label in the label set, including labels absent from the evaluated split.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::corpus::LabelSet;
use crate::error::{Error, Result};

/// Rows are gold labels, columns predicted labels, both in label-set order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    label_set: LabelSet,
    counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn from_counts(label_set: LabelSet, counts: Vec<Vec<u64>>) -> Result<Self> {
        let k = label_set.len();
        if counts.len() != k || counts.iter().any(|row| row.len() != k) {
            return Err(Error::InvalidConfig(format!(
                "confusion matrix must be {k}x{k}"
            )));
        }
        Ok(ConfusionMatrix { label_set, counts })
    }

    /// Builds a matrix from label indices.
    pub fn from_indices(label_set: LabelSet, gold: &[usize], pred: &[usize]) -> Result<Self> {
        if gold.len() != pred.len() {
            return Err(Error::LengthMismatch {
                left: gold.len(),
                right: pred.len(),
            });
        }
        let k = label_set.len();
        let mut counts = vec![vec![0u64; k]; k];
        for (&g, &p) in gold.iter().zip(pred) {
            if g >= k || p >= k {
                return Err(Error::IndexOutOfRange {
                    index: g.max(p),
                    size: k,
                });
            }
            counts[g][p] += 1;
        }
        Ok(ConfusionMatrix { label_set, counts })
    }

    pub fn label_set(&self) -> &LabelSet {
        &self.label_set
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> u64 {
        (0..self.counts.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn row_sum(&self, i: usize) -> u64 {
        self.counts[i].iter().sum()
    }

    pub fn col_sum(&self, j: usize) -> u64 {
        self.counts.iter().map(|row| row[j]).sum()
    }

    /// Each row divided by its sum; all-zero rows stay zero.
    pub fn row_normalized(&self) -> Vec<Vec<f64>> {
        self.counts
            .iter()
            .map(|row| {
                let sum: u64 = row.iter().sum();
                row.iter().map(|&c| ratio(c, sum)).collect()
            })
            .collect()
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassScore {
    pub label: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Number of gold instances.
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub per_class: Vec<ClassScore>,
    pub macro_f1: f64,
    pub accuracy: f64,
}

pub fn confusion<G, P>(gold: &[G], pred: &[P], labels: &LabelSet) -> Result<ConfusionMatrix>
where
    G: AsRef<str>,
    P: AsRef<str>,
{
    if gold.len() != pred.len() {
        return Err(Error::LengthMismatch {
            left: gold.len(),
            right: pred.len(),
        });
    }
    if gold.is_empty() {
        return Err(Error::NoEntries);
    }
    let index = |l: &str| labels.require_index(l);
    let gold = gold
        .iter()
        .map(|g| index(g.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    let pred = pred
        .iter()
        .map(|p| index(p.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    ConfusionMatrix::from_indices(labels.clone(), &gold, &pred)
}

pub fn class_scores(matrix: &ConfusionMatrix) -> Vec<ClassScore> {
    (0..matrix.label_set.len())
        .map(|i| {
            let tp = matrix.counts[i][i];
            let precision = ratio(tp, matrix.col_sum(i));
            let recall = ratio(tp, matrix.row_sum(i));
            let f1 = if precision + recall == 0.0 {
                0.0
            } else {
                2.0 * precision * recall / (precision + recall)
            };
            ClassScore {
                label: matrix.label_set.label(i).to_owned(),
                precision,
                recall,
                f1,
                support: matrix.row_sum(i),
            }
        })
        .collect()
}

pub fn macro_f1(matrix: &ConfusionMatrix) -> f64 {
    let scores = class_scores(matrix);
    scores.iter().map(|s| s.f1).sum::<f64>() / scores.len() as f64
}

pub fn accuracy(matrix: &ConfusionMatrix) -> f64 {
    ratio(matrix.correct(), matrix.total())
}

pub fn score_report(matrix: &ConfusionMatrix) -> ScoreReport {
    let per_class = class_scores(matrix);
    let macro_f1 = per_class.iter().map(|s| s.f1).sum::<f64>() / per_class.len() as f64;
    ScoreReport {
        per_class,
        macro_f1,
        accuracy: accuracy(matrix),
    }
}

pub fn report<G, P>(
    gold: &[G],
    pred: &[P],
    labels: &LabelSet,
) -> Result<(ScoreReport, ConfusionMatrix)>
where
    G: AsRef<str>,
    P: AsRef<str>,
{
    let matrix = confusion(gold, pred, labels)?;
    Ok((score_report(&matrix), matrix))
}

/// `scores.tsv`: a header, one row per class, then `macro_f1` and `accuracy`.
pub fn scores_tsv(report: &ScoreReport) -> String {
    let mut out = String::from("label\tprecision\trecall\tf1\tsupport\n");
    for s in &report.per_class {
        let _ = writeln!(
            out,
            "{}\t{:.6}\t{:.6}\t{:.6}\t{}",
            s.label, s.precision, s.recall, s.f1, s.support
        );
    }
    let _ = writeln!(out, "macro_f1\t{:.6}", report.macro_f1);
    let _ = writeln!(out, "accuracy\t{:.6}", report.accuracy);
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

fn csv_table<T>(matrix: &ConfusionMatrix, rows: &[Vec<T>], cell: impl Fn(&T) -> String) -> String {
    let labels = matrix.label_set.labels();
    let mut out = String::new();
    for l in labels {
        out.push(',');
        out.push_str(&csv_field(l));
    }
    out.push('\n');
    for (label, row) in labels.iter().zip(rows) {
        out.push_str(&csv_field(label));
        for c in row {
            out.push(',');
            out.push_str(&cell(c));
        }
        out.push('\n');
    }
    out
}

/// Integer counts with the ascending labels as header row and column.
pub fn confusion_csv(matrix: &ConfusionMatrix) -> String {
    csv_table(matrix, &matrix.counts, |c| c.to_string())
}

/// Row-normalized counts at six decimal places.
pub fn confusion_normalized_csv(matrix: &ConfusionMatrix) -> String {
    csv_table(matrix, &matrix.row_normalized(), |v| format!("{v:.6}"))
}

pub const SCORES_FILE: &str = "scores.tsv";
pub const CONFUSION_FILE: &str = "confusion.csv";
pub const CONFUSION_NORMALIZED_FILE: &str = "confusion_normalized.csv";

/// Writes the three report files into `dir`, creating it if needed.
pub fn write_report(dir: &Path, report: &ScoreReport, matrix: &ConfusionMatrix) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (name, body) in [
        (SCORES_FILE, scores_tsv(report)),
        (CONFUSION_FILE, confusion_csv(matrix)),
        (CONFUSION_NORMALIZED_FILE, confusion_normalized_csv(matrix)),
    ] {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> LabelSet {
        LabelSet::new(["A", "B"]).unwrap()
    }

    #[test]
    fn confusion_examples() {
        let m = confusion(&["A", "B"], &["A", "B"], &ab()).unwrap();
        assert_eq!(m.counts(), [vec![1, 0], vec![0, 1]]);
        let m = confusion(&["A", "A", "B", "B"], &["A", "B", "A", "B"], &ab()).unwrap();
        assert_eq!(m.counts(), [vec![1, 1], vec![1, 1]]);
        assert!(matches!(
            confusion(&["A"], &["C"], &ab()),
            Err(Error::UnknownLabel(_))
        ));
        assert!(matches!(
            confusion(&["A"], &["A", "B"], &ab()),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(confusion::<&str, &str>(&[], &[], &ab()).is_err());
    }

    #[test]
    fn macro_f1_examples() {
        let diag = ConfusionMatrix::from_counts(ab(), vec![vec![3, 0], vec![0, 4]]).unwrap();
        assert_eq!(macro_f1(&diag), 1.0);
        let even = ConfusionMatrix::from_counts(ab(), vec![vec![1, 1], vec![1, 1]]).unwrap();
        assert!((macro_f1(&even) - 0.5).abs() < 1e-12);
        for s in class_scores(&even) {
            assert_eq!((s.precision, s.recall, s.f1), (0.5, 0.5, 0.5));
        }
        let all_a = confusion(&["A", "A"], &["A", "A"], &ab()).unwrap();
        assert!((macro_f1(&all_a) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn report_examples() {
        let set = LabelSet::new(["EGY", "GLF", "LEV", "MSA", "NOR"]).unwrap();
        let (r, m) = report(&["LEV"], &["LEV"], &set).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert!((r.macro_f1 - 0.2).abs() < 1e-12);
        assert_eq!(m.total(), 1);

        let gold = ["EGY", "GLF", "LEV", "MSA", "NOR", "EGY"];
        let (r, _) = report(&gold, &gold, &set).unwrap();
        assert_eq!((r.macro_f1, r.accuracy), (1.0, 1.0));
    }

    #[test]
    fn report_files() {
        let m = confusion(&["A", "A", "B", "B"], &["A", "B", "B", "B"], &ab()).unwrap();
        let r = score_report(&m);
        assert_eq!(confusion_csv(&m), ",A,B\nA,1,1\nB,0,2\n");
        assert_eq!(
            confusion_normalized_csv(&m),
            ",A,B\nA,0.500000,0.500000\nB,0.000000,1.000000\n"
        );
        let tsv = scores_tsv(&r);
        let lines: Vec<&str> = tsv.lines().collect();
        assert_eq!(lines[0], "label\tprecision\trecall\tf1\tsupport");
        assert_eq!(lines[1], "A\t1.000000\t0.500000\t0.666667\t2");
        assert_eq!(lines[2], "B\t0.666667\t1.000000\t0.800000\t2");
        assert_eq!(lines[3], "macro_f1\t0.733333");
        assert_eq!(lines[4], "accuracy\t0.750000");

        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("nested");
        write_report(&out, &r, &m).unwrap();
        for f in [SCORES_FILE, CONFUSION_FILE, CONFUSION_NORMALIZED_FILE] {
            assert!(out.join(f).is_file());
        }

        let odd = LabelSet::new(["a,b", "c\"d"]).unwrap();
        let m = confusion(&["a,b"], &["c\"d"], &odd).unwrap();
        assert_eq!(
            confusion_csv(&m),
            ",\"a,b\",\"c\"\"d\"\n\"a,b\",0,1\n\"c\"\"d\",0,0\n"
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn matrix_strategy() -> impl Strategy<Value = Vec<Vec<u64>>> {
            (2usize..6).prop_flat_map(|k| {
                proptest::collection::vec(proptest::collection::vec(0u64..6, k), k)
            })
        }

        fn labels(k: usize) -> LabelSet {
            LabelSet::new((0..k).map(|i| format!("L{i}"))).unwrap()
        }

        proptest! {
            #[test]
            fn permutation_invariant(counts in matrix_strategy(), rot in 0usize..6) {
                let k = counts.len();
                let m = ConfusionMatrix::from_counts(labels(k), counts.clone()).unwrap();
                let perm: Vec<usize> = (0..k).map(|i| (i + rot) % k).collect();
                let permuted: Vec<Vec<u64>> = perm
                    .iter()
                    .map(|&i| perm.iter().map(|&j| counts[i][j]).collect())
                    .collect();
                let p = ConfusionMatrix::from_counts(labels(k), permuted).unwrap();
                prop_assert!((macro_f1(&m) - macro_f1(&p)).abs() < 1e-12);
            }

            #[test]
            fn bounded_and_perfect_only_when_diagonal(counts in matrix_strategy()) {
                let k = counts.len();
                let m = ConfusionMatrix::from_counts(labels(k), counts.clone()).unwrap();
                let f = macro_f1(&m);
                prop_assert!((0.0..=1.0).contains(&f));
                let diagonal = (0..k).all(|i| (0..k).all(|j| i == j || counts[i][j] == 0))
                    && (0..k).all(|i| counts[i][i] > 0);
                prop_assert_eq!(f == 1.0, diagonal);
            }
        }
    }
}
