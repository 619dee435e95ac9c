use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use varid_core::corpus::split_lines;
use varid_core::ensemble::{predict_batch, train_ensemble, MemberSpec};
use varid_core::eval::{report, write_report};
use varid_core::synth::SyntheticCorpus;
use varid_core::tuning::{grid_search as run_grid, sweep_members, GridSpec};
use varid_core::{load_corpus, model_io, Document, Error, FeatureSpec, TfIdfModel};

use crate::config::RunConfig;
use crate::CliError;

fn write_output(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, content).map_err(|e| Error::Io {
            path: p.to_owned(),
            source: e,
        })?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(content.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Error::Io {
                    path: "<stdout>".into(),
                    source: e,
                })?;
        }
    }
    Ok(())
}

fn read_text(path: &Path) -> Result<String, CliError> {
    let bytes = fs::read(path).map_err(|e| Error::Io {
        path: path.to_owned(),
        source: e,
    })?;
    String::from_utf8(bytes).map_err(|e| {
        CliError::Data(Error::Encoding {
            path: path.to_owned(),
            offset: e.utf8_error().valid_up_to(),
        })
    })
}

/// One document per line; for TSV input the text is the first field.
fn input_documents(path: &Path) -> Result<Vec<Document>, CliError> {
    let content = read_text(path)?;
    Ok(split_lines(&content)
        .map(|line| Document::new(line.split('\t').next().unwrap_or("")))
        .collect())
}

pub fn train(train: &Path, model_path: &Path, cfg: &RunConfig) -> Result<(), CliError> {
    let specs = cfg
        .feature_specs()
        .ok_or_else(|| CliError::Usage("give --features or --preset".into()))?;
    let config = cfg.train_config();
    config
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let corpus = load_corpus(train)?;
    let members: Vec<MemberSpec> = specs.iter().map(|&s| MemberSpec::new(s, config)).collect();
    let model = train_ensemble(&corpus, &members)?;
    model_io::save(&model, model_path)?;

    let mut summary = format!(
        "trained {} member(s) on {} documents, labels: {}\n",
        model.members().len(),
        corpus.len(),
        model.label_set().labels().join(",")
    );
    for m in model.members() {
        let _ = writeln!(
            summary,
            "  {}\tC={}\tvocabulary={}",
            m.tfidf().spec(),
            m.config().c,
            m.tfidf().n_features()
        );
    }
    let _ = writeln!(summary, "model written to {}", model_path.display());
    write_output(None, &summary)
}

pub fn predict(model_path: &Path, input: &Path, output: Option<&Path>) -> Result<(), CliError> {
    let model = model_io::load(model_path)?;
    let docs = input_documents(input)?;
    let labels = predict_batch(&model, &docs);
    let mut out = String::new();
    for (i, label) in labels.iter().enumerate() {
        let _ = writeln!(out, "{}\t{label}", i + 1);
    }
    write_output(output, &out)
}

pub fn evaluate(model_path: &Path, test: &Path, report_dir: Option<&Path>) -> Result<(), CliError> {
    let model = model_io::load(model_path)?;
    let corpus = load_corpus(test)?;
    let docs: Vec<Document> = corpus.documents().cloned().collect();
    let gold: Vec<&str> = corpus.labels().collect();
    for label in &gold {
        model.label_set().require_index(label)?;
    }
    let pred = predict_batch(&model, &docs);
    let (scores, matrix) = report(&gold, &pred, model.label_set())?;
    if let Some(dir) = report_dir {
        write_report(dir, &scores, &matrix)?;
    }
    write_output(
        None,
        &format!(
            "macro-F1 {:.3}\naccuracy {:.3}\n",
            scores.macro_f1, scores.accuracy
        ),
    )
}

pub fn grid_search(
    train: &Path,
    dev: &Path,
    cfg: &RunConfig,
    report_dir: Option<&Path>,
) -> Result<(), CliError> {
    let c_values = cfg
        .c_values
        .clone()
        .unwrap_or_else(GridSpec::default_c_values);
    let combinations = cfg.grid_combinations().unwrap_or_else(|| {
        let defaults = GridSpec::default_combinations();
        if cfg.skip_exact {
            defaults
                .into_iter()
                .map(|c| c.into_iter().map(FeatureSpec::exact_skips).collect())
                .collect()
        } else {
            defaults
        }
    });
    let grid = GridSpec::new(c_values, combinations).map_err(|e| CliError::Usage(e.to_string()))?;
    let base = cfg.train_config();
    base.validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let train = load_corpus(train)?;
    let dev = load_corpus(dev)?;
    let result = run_grid(&train, &dev, &grid, &base)?;
    let trace = result.trace_tsv();
    match report_dir {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| Error::Io {
                path: dir.to_owned(),
                source: e,
            })?;
            write_output(Some(&dir.join("trace.tsv")), &trace)?;
        }
        None => write_output(None, &trace)?,
    }
    write_output(None, &format!("{}\n", result.winner_line()))
}

pub fn sweep(train: &Path, dev: &Path, cfg: &RunConfig) -> Result<(), CliError> {
    let specs = cfg.feature_specs().unwrap_or_else(|| {
        GridSpec::feature_menu()
            .into_iter()
            .map(|s| if cfg.skip_exact { s.exact_skips() } else { s })
            .collect()
    });
    let config = cfg.train_config();
    config
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let train = load_corpus(train)?;
    let dev = load_corpus(dev)?;
    let rows = sweep_members(&train, &dev, &specs, &config)?;
    let mut out = String::from("feature\tdev_macro_f1\n");
    for row in rows {
        let _ = writeln!(out, "{}\t{:.6}", row.spec, row.dev_macro_f1);
    }
    write_output(None, &out)
}

pub fn featurize(
    spec: &str,
    skip_exact: bool,
    input: &Path,
    train: Option<&Path>,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let mut spec: FeatureSpec = spec
        .parse()
        .map_err(|e: Error| CliError::Usage(e.to_string()))?;
    if skip_exact {
        spec = spec.exact_skips();
    }
    let docs = input_documents(input)?;
    let model = match train {
        Some(path) => {
            let corpus = load_corpus(path)?;
            TfIdfModel::fit(corpus.documents().map(|d| d.text.as_str()), spec)?
        }
        None => TfIdfModel::fit(docs.iter().map(|d| d.text.as_str()), spec)?,
    };
    let mut out = String::new();
    for (i, doc) in docs.iter().enumerate() {
        let pairs: Vec<String> = model
            .transform(doc)
            .pairs()
            .iter()
            .map(|(idx, w)| format!("{idx}:{w}"))
            .collect();
        let _ = writeln!(out, "{}\t{}", i + 1, pairs.join(" "));
    }
    write_output(output, &out)
}

pub fn synth(
    labels: &[String],
    n: usize,
    seed: u64,
    noise: f64,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let mut distinct = labels.to_vec();
    distinct.sort();
    distinct.dedup();
    if distinct.len() < 2 || distinct.len() > 12 || labels.iter().any(|l| l.is_empty()) {
        return Err(CliError::Usage(
            "synth needs 2 to 12 distinct non-empty labels".into(),
        ));
    }
    if !(0.0..=1.0).contains(&noise) {
        return Err(CliError::Usage("--noise must lie in [0, 1]".into()));
    }
    if n == 0 {
        return Err(CliError::Usage("--n must be positive".into()));
    }
    let corpus = SyntheticCorpus::new(labels)
        .with_noise(noise)
        .generate(n, seed);
    let mut out = String::new();
    for (doc, label) in corpus.entries() {
        let _ = writeln!(out, "{}\t{label}", doc.text);
    }
    write_output(output, &out)
}
