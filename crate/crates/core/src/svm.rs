//! Linear SVMs trained by dual coordinate descent.
//!
//! Each binary problem minimizes the L2-regularized squared-hinge objective
//!
//! ```text
//! 1/2 ||w||^2 + C * sum_i max(0, 1 - y_i w.x_i)^2
//! ```
//!
//! through its dual: `max_a  sum_i a_i - 1/2 a'(Q + D)a`, `a_i >= 0`, where
//! `Q_ij = y_i y_j x_i.x_j` and `D = I / (2C)`. One coordinate is updated at a
//! time with a projected Newton step, which is an exact line minimization for
//! this quadratic, while `w = sum_i a_i y_i x_i` is maintained incrementally.
//!
//! Multiclass problems use one-vs-rest with K separators, except for two
//! labels, where a single separator scores the second label positively.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::corpus::LabelSet;
use crate::error::{Error, Result};
use crate::features::{SparseVector, TfIdfModel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    /// Regularization parameter.
    pub c: f64,
    /// Stop once every projected-gradient violation is below this.
    pub tolerance: f64,
    pub max_epochs: usize,
    /// Seeds the per-epoch visiting order.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            c: 1.0,
            tolerance: 1e-4,
            max_epochs: 1000,
            seed: 42,
        }
    }
}

impl TrainConfig {
    pub fn with_c(c: f64) -> Self {
        TrainConfig {
            c,
            ..TrainConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "C must be positive, got {}",
                self.c
            )));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_epochs == 0 {
            return Err(Error::InvalidConfig("max_epochs must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverStats {
    pub epochs: usize,
    pub converged: bool,
    /// Largest projected-gradient magnitude at the returned point.
    pub max_violation: f64,
    /// Dual objective before the first epoch and after each epoch.
    pub dual_objective: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinarySolution {
    /// Primal weights; with a bias the last entry is the bias weight.
    pub weights: Vec<f64>,
    /// Dual variables, one per training instance.
    pub alpha: Vec<f64>,
    pub stats: SolverStats,
}

struct DualProblem<'a> {
    xs: &'a [SparseVector],
    ys: &'a [f64],
    n_features: usize,
    bias: f64,
    /// Dual diagonal term 1/(2C).
    diag: f64,
}

impl DualProblem<'_> {
    #[inline]
    fn margin(&self, i: usize, w: &[f64]) -> f64 {
        let mut s = self.xs[i].dot(&w[..self.n_features]);
        if self.bias != 0.0 {
            s += w[self.n_features] * self.bias;
        }
        self.ys[i] * s
    }

    #[inline]
    fn gradient(&self, i: usize, w: &[f64], alpha: &[f64]) -> f64 {
        self.margin(i, w) - 1.0 + self.diag * alpha[i]
    }

    #[inline]
    fn add_instance(&self, i: usize, scale: f64, w: &mut Weights) {
        for &(j, v) in self.xs[i].pairs() {
            w.add(j as usize, scale * v);
        }
        if self.bias != 0.0 {
            w.add(self.n_features, scale * self.bias);
        }
    }

    fn max_violation(&self, w: &[f64], alpha: &[f64]) -> f64 {
        (0..self.xs.len())
            .map(|i| projected(self.gradient(i, w, alpha), alpha[i]).abs())
            .fold(0.0, f64::max)
    }
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bp = s - a;
    (s, (a - (s - bp)) + (b - bp))
}

/// Primal weights held as an unevaluated sum `hi + lo`. The rounding error of
/// every update is carried in `lo`, so many tiny late updates cannot push the
/// stored state, and with it the recorded dual objective, downhill.
struct Weights {
    hi: Vec<f64>,
    lo: Vec<f64>,
}

impl Weights {
    fn zeros(n: usize) -> Self {
        Weights {
            hi: vec![0.0; n],
            lo: vec![0.0; n],
        }
    }

    #[inline]
    fn add(&mut self, j: usize, v: f64) {
        let (s, e) = two_sum(self.hi[j], v);
        self.hi[j] = s;
        self.lo[j] += e;
    }

    /// Folds `lo` into `hi` as far as it goes; `hi` becomes the rounded sum.
    fn renormalize(&mut self) {
        for (h, l) in self.hi.iter_mut().zip(&mut self.lo) {
            let (s, e) = two_sum(*h, *l);
            *h = s;
            *l = e;
        }
    }
}

/// Double-double accumulator for evaluating the dual objective.
#[derive(Clone, Copy, Default)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        Dd { hi, lo }
    }

    fn product(a: f64, b: f64) -> Self {
        let p = a * b;
        Dd {
            hi: p,
            lo: a.mul_add(b, -p),
        }
    }

    fn plus(self, o: Dd) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        Dd::new(s, e + self.lo + o.lo)
    }

    fn scaled(self, k: f64) -> Self {
        Dd::new(self.hi * k, self.lo * k)
    }

    fn divided(self, k: f64) -> Self {
        let q = self.hi / k;
        let r = (-q).mul_add(k, self.hi) + self.lo;
        Dd::new(q, r / k)
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// [`dual_objective`] evaluated in double-double precision on the
/// compensated weights.
fn precise_dual(w: &Weights, alpha: &[f64], c: f64) -> f64 {
    let mut linear = Dd::default();
    let mut alpha_sq = Dd::default();
    for &a in alpha {
        linear = linear.plus(Dd { hi: a, lo: 0.0 });
        alpha_sq = alpha_sq.plus(Dd::product(a, a));
    }
    let mut quad = Dd::default();
    for (&h, &l) in w.hi.iter().zip(&w.lo) {
        quad = quad
            .plus(Dd::product(h, h))
            .plus(Dd::new(2.0 * h * l, l * l));
    }
    linear
        .plus(quad.scaled(-0.5))
        .plus(alpha_sq.divided(4.0 * c).scaled(-1.0))
        .value()
}

#[inline]
fn projected(gradient: f64, alpha: f64) -> f64 {
    if alpha == 0.0 {
        gradient.min(0.0)
    } else {
        gradient
    }
}

/// Dual value `sum a - 1/2 (||w||^2 + ||a||^2 / (2C))` for a weight vector
/// consistent with `alpha`.
pub fn dual_objective(weights: &[f64], alpha: &[f64], c: f64) -> f64 {
    let linear: f64 = alpha.iter().sum();
    let quad: f64 = weights.iter().map(|v| v * v).sum();
    let diag: f64 = alpha.iter().map(|a| a * a).sum::<f64>() / (2.0 * c);
    linear - 0.5 * (quad + diag)
}

/// Primal squared-hinge objective of `weights` (bias as the last entry when
/// `bias` is set).
pub fn primal_objective(
    xs: &[SparseVector],
    ys: &[f64],
    weights: &[f64],
    bias: bool,
    c: f64,
) -> f64 {
    let n = weights.len() - usize::from(bias);
    let reg = 0.5 * weights.iter().map(|v| v * v).sum::<f64>();
    let loss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, &y)| {
            let mut s = x.dot(&weights[..n]);
            if bias {
                s += weights[n];
            }
            let slack = (1.0 - y * s).max(0.0);
            slack * slack
        })
        .sum();
    reg + c * loss
}

/// Solves one binary problem. Labels must be `+1.0` or `-1.0`; feature
/// indices must be below `n_features`. With `bias`, every instance is
/// augmented by a constant 1.0 feature stored after the last weight.
pub fn train_binary(
    xs: &[SparseVector],
    ys: &[f64],
    n_features: usize,
    bias: bool,
    config: &TrainConfig,
) -> Result<BinarySolution> {
    config.validate()?;
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if let Some(&y) = ys.iter().find(|&&y| y != 1.0 && y != -1.0) {
        return Err(Error::InvalidConfig(format!(
            "binary label must be ±1, got {y}"
        )));
    }
    if !(ys.contains(&1.0) && ys.contains(&-1.0)) {
        return Err(Error::SingleClass);
    }
    for (i, x) in xs.iter().enumerate() {
        if x.pairs().iter().any(|&(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { instance: i });
        }
        if x.dim_hint() > n_features {
            return Err(Error::IndexOutOfRange {
                index: x.dim_hint() - 1,
                size: n_features,
            });
        }
    }

    let problem = DualProblem {
        xs,
        ys,
        n_features,
        bias: if bias { 1.0 } else { 0.0 },
        diag: 0.5 / config.c,
    };
    let l = xs.len();
    let qd: Vec<f64> = xs
        .iter()
        .map(|x| x.norm_squared() + problem.bias * problem.bias + problem.diag)
        .collect();
    let mut alpha = vec![0.0; l];
    let mut w = Weights::zeros(n_features + usize::from(bias));
    let mut order: Vec<usize> = (0..l).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut dual = vec![precise_dual(&w, &alpha, config.c)];
    let mut epochs = 0;
    let mut converged = false;
    let mut violation = f64::INFINITY;

    while epochs < config.max_epochs {
        order.shuffle(&mut rng);
        let mut epoch_violation: f64 = 0.0;
        for &i in &order {
            let g = problem.gradient(i, &w.hi, &alpha);
            let pg = projected(g, alpha[i]);
            epoch_violation = epoch_violation.max(pg.abs());
            if pg.abs() > 1e-12 {
                let old = alpha[i];
                alpha[i] = (old - g / qd[i]).max(0.0);
                problem.add_instance(i, (alpha[i] - old) * ys[i], &mut w);
            }
        }
        epochs += 1;
        w.renormalize();
        dual.push(precise_dual(&w, &alpha, config.c));
        if epoch_violation < config.tolerance {
            // Re-check at the final point, since this epoch still moved it.
            violation = problem.max_violation(&w.hi, &alpha);
            if violation < config.tolerance {
                converged = true;
                break;
            }
        }
    }
    if !converged {
        violation = problem.max_violation(&w.hi, &alpha);
    }
    let w = w.hi;
    if w.iter().any(|v| !v.is_finite()) {
        return Err(Error::Internal("solver produced non-finite weights".into()));
    }

    Ok(BinarySolution {
        weights: w,
        alpha,
        stats: SolverStats {
            epochs,
            converged,
            max_violation: violation,
            dual_objective: dual,
        },
    })
}

/// One-vs-rest linear classifier over the features of a fitted [`TfIdfModel`].
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    label_set: LabelSet,
    tfidf: TfIdfModel,
    /// One row per class (a single row for two classes), each
    /// `n_features + 1` long with the bias last.
    weights: Vec<Vec<f64>>,
    config: TrainConfig,
}

impl LinearModel {
    pub fn from_parts(
        label_set: LabelSet,
        tfidf: TfIdfModel,
        weights: Vec<Vec<f64>>,
        config: TrainConfig,
    ) -> Result<Self> {
        config.validate()?;
        let rows = if label_set.len() == 2 {
            1
        } else {
            label_set.len()
        };
        if weights.len() != rows {
            return Err(Error::ModelFormat(format!(
                "expected {rows} weight arrays for {} labels, found {}",
                label_set.len(),
                weights.len()
            )));
        }
        let width = tfidf.n_features() + 1;
        for (k, row) in weights.iter().enumerate() {
            if row.len() != width {
                return Err(Error::ModelFormat(format!(
                    "weight array {k} has length {}, expected {width}",
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::ModelFormat(format!(
                    "weight array {k} has non-finite entries"
                )));
            }
        }
        Ok(LinearModel {
            label_set,
            tfidf,
            weights,
            config,
        })
    }

    pub fn label_set(&self) -> &LabelSet {
        &self.label_set
    }

    pub fn tfidf(&self) -> &TfIdfModel {
        &self.tfidf
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn decision_scores(&self, x: &SparseVector) -> Result<Vec<f64>> {
        let n = self.tfidf.n_features();
        if x.dim_hint() > n {
            return Err(Error::IndexOutOfRange {
                index: x.dim_hint() - 1,
                size: n,
            });
        }
        let score = |w: &[f64]| x.dot(&w[..n]) + w[n];
        Ok(if self.label_set.len() == 2 {
            let s = score(&self.weights[0]);
            vec![-s, s]
        } else {
            self.weights.iter().map(|w| score(w)).collect()
        })
    }

    pub fn predict_index(&self, x: &SparseVector) -> Result<usize> {
        Ok(argmax(&self.decision_scores(x)?))
    }

    pub fn predict(&self, x: &SparseVector) -> Result<&str> {
        Ok(self.label_set.label(self.predict_index(x)?))
    }

    /// Featurizes raw text with this model's own vocabulary, then predicts.
    pub fn predict_text_index(&self, text: &str) -> usize {
        let x = self.tfidf.transform_text(text);
        self.predict_index(&x)
            .expect("vectors from the model's own vocabulary are in range")
    }
}

/// Index of the largest score; exact ties go to the smallest index.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (k, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = k;
        }
    }
    best
}

/// Trains a one-vs-rest model on vectors produced by `tfidf`.
pub fn train_multiclass<S: AsRef<str>>(
    xs: &[SparseVector],
    labels: &[S],
    label_set: &LabelSet,
    tfidf: &TfIdfModel,
    config: &TrainConfig,
) -> Result<LinearModel> {
    config.validate()?;
    if xs.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: xs.len(),
            right: labels.len(),
        });
    }
    let classes = labels
        .iter()
        .map(|l| label_set.require_index(l.as_ref()))
        .collect::<Result<Vec<usize>>>()?;
    let positives: Vec<usize> = if label_set.len() == 2 {
        vec![1]
    } else {
        (0..label_set.len()).collect()
    };
    let n = tfidf.n_features();
    let weights = positives
        .into_par_iter()
        .map(|k| {
            let ys: Vec<f64> = classes
                .iter()
                .map(|&c| if c == k { 1.0 } else { -1.0 })
                .collect();
            train_binary(xs, &ys, n, true, config).map(|s| s.weights)
        })
        .collect::<Result<Vec<_>>>()?;
    LinearModel::from_parts(label_set.clone(), tfidf.clone(), weights, *config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FeatureSpec;

    fn sv(pairs: &[(u32, f64)]) -> SparseVector {
        SparseVector::from_pairs(pairs.to_vec()).unwrap()
    }

    fn tight(c: f64) -> TrainConfig {
        TrainConfig {
            c,
            tolerance: 1e-10,
            max_epochs: 100_000,
            seed: 42,
        }
    }

    #[test]
    fn two_point_closed_form() {
        let xs = [sv(&[(0, 1.0)]), sv(&[(0, -1.0)])];
        let ys = [1.0, -1.0];
        for c in [0.01, 0.1, 1.0, 10.0, 1000.0] {
            let sol = train_binary(&xs, &ys, 1, false, &tight(c)).unwrap();
            let expected = 4.0 * c / (1.0 + 4.0 * c);
            assert!(
                (sol.weights[0] - expected).abs() < 1e-9,
                "C={c}: {:?}",
                sol.weights
            );
            assert!(sol.stats.converged);
        }
        let sol = train_binary(&xs, &ys, 1, false, &tight(1000.0)).unwrap();
        assert!((sol.weights[0] - 4000.0 / 4001.0).abs() < 1e-9);

        // default tolerance still lands close
        let sol = train_binary(&xs, &ys, 1, false, &TrainConfig::default()).unwrap();
        assert!((sol.weights[0] - 0.8).abs() < 1e-3);
    }

    #[test]
    fn rejects_bad_input() {
        let xs = [sv(&[(0, 1.0)]), sv(&[(0, 2.0)])];
        let cfg = TrainConfig::default();
        assert!(matches!(
            train_binary(&xs, &[1.0, 1.0], 1, true, &cfg),
            Err(Error::SingleClass)
        ));
        assert!(matches!(
            train_binary(&xs, &[1.0], 1, true, &cfg),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(train_binary(&xs, &[1.0, 0.5], 1, true, &cfg).is_err());
        assert!(matches!(
            train_binary(&xs, &[1.0, -1.0], 0, true, &cfg),
            Err(Error::IndexOutOfRange { .. })
        ));
        let bad = TrainConfig { c: 0.0, ..cfg };
        assert!(train_binary(&xs, &[1.0, -1.0], 1, true, &bad).is_err());
        let bad = TrainConfig {
            max_epochs: 0,
            ..cfg
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn sparse_vector_rejects_non_finite() {
        assert!(SparseVector::from_pairs(vec![(0, f64::NAN)]).is_err());
        assert!(SparseVector::from_pairs(vec![(0, f64::INFINITY)]).is_err());
        assert!(SparseVector::from_pairs(vec![(1, 1.0), (0, 1.0)]).is_err());
    }

    fn fixture() -> (Vec<SparseVector>, Vec<f64>) {
        let xs = vec![
            sv(&[(0, 0.9), (1, 0.1)]),
            sv(&[(0, 0.7), (2, 0.3)]),
            sv(&[(1, 0.8), (2, -0.2)]),
            sv(&[(0, -0.3), (1, 0.6), (2, 0.5)]),
            sv(&[(0, 0.2), (2, 0.9)]),
            sv(&[(1, -0.5)]),
        ];
        let ys = vec![1.0, 1.0, -1.0, -1.0, 1.0, -1.0];
        (xs, ys)
    }

    #[test]
    fn dual_ascends_and_kkt_holds() {
        let (xs, ys) = fixture();
        for c in [0.01, 1.0, 100.0] {
            for bias in [false, true] {
                let cfg = TrainConfig::with_c(c);
                let sol = train_binary(&xs, &ys, 3, bias, &cfg).unwrap();
                assert!(sol.stats.converged);
                for pair in sol.stats.dual_objective.windows(2) {
                    assert!(pair[1] >= pair[0], "{pair:?}");
                }

                let n = 3;
                let diag = 0.5 / c;
                for (i, x) in xs.iter().enumerate() {
                    let mut s = x.dot(&sol.weights[..n]);
                    if bias {
                        s += sol.weights[n];
                    }
                    let g = ys[i] * s - 1.0 + diag * sol.alpha[i];
                    if sol.alpha[i] == 0.0 {
                        assert!(g >= -cfg.tolerance);
                    } else {
                        assert!(g.abs() <= cfg.tolerance);
                    }
                }

                // w = sum a_i y_i x_i
                let mut w = vec![0.0; n + usize::from(bias)];
                for (i, x) in xs.iter().enumerate() {
                    x.axpy(sol.alpha[i] * ys[i], &mut w[..n]);
                    if bias {
                        w[n] += sol.alpha[i] * ys[i];
                    }
                }
                for (a, b) in w.iter().zip(&sol.weights) {
                    assert!((a - b).abs() < 1e-8);
                }

                let primal = primal_objective(&xs, &ys, &sol.weights, bias, c);
                let dual = dual_objective(&sol.weights, &sol.alpha, c);
                assert!(primal >= dual - 1e-12);
                assert!((primal - dual) / primal.abs().max(1.0) < 1e-3);
            }
        }
    }

    #[test]
    fn training_is_deterministic_per_seed() {
        let (xs, ys) = fixture();
        let cfg = TrainConfig::with_c(10.0);
        let a = train_binary(&xs, &ys, 3, true, &cfg).unwrap();
        let b = train_binary(&xs, &ys, 3, true, &cfg).unwrap();
        assert_eq!(
            a.weights.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            b.weights.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn argmax_ties_go_low() {
        assert_eq!(argmax(&[0.1, 0.9, 0.1, 0.1, 0.1]), 1);
        assert_eq!(argmax(&[0.0; 5]), 0);
        assert_eq!(argmax(&[0.5, 0.5, -1.0]), 0);
        assert_eq!(argmax(&[-1.0, 0.5, 0.5]), 1);
    }

    fn text_model(texts: &[(&str, &str)], config: &TrainConfig) -> LinearModel {
        let tfidf =
            TfIdfModel::fit(texts.iter().map(|(t, _)| *t), FeatureSpec::word(1).unwrap()).unwrap();
        let labels: Vec<&str> = texts.iter().map(|(_, l)| *l).collect();
        let set = LabelSet::new(&labels).unwrap();
        let xs: Vec<SparseVector> = texts.iter().map(|(t, _)| tfidf.transform_text(t)).collect();
        train_multiclass(&xs, &labels, &set, &tfidf, config).unwrap()
    }

    #[test]
    fn one_vs_rest_shapes() {
        let five = [
            ("masr ahu", "EGY"),
            ("khaleej wayed", "GLF"),
            ("sham kteer", "LEV"),
            ("fusha jiddan", "MSA"),
            ("maghreb bezaf", "NOR"),
        ];
        let model = text_model(&five, &TrainConfig::default());
        assert_eq!(model.weights().len(), 5);
        assert!(model
            .weights()
            .iter()
            .all(|w| w.len() == model.tfidf().n_features() + 1));
        for (text, label) in five {
            let x = model.tfidf().transform_text(text);
            assert_eq!(model.predict(&x).unwrap(), label);
        }

        let two = [
            ("zeg eens", "BEL"),
            ("hoor eens", "DUT"),
            ("allee zeg", "BEL"),
            ("nou hoor", "DUT"),
        ];
        let model = text_model(&two, &TrainConfig::default());
        assert_eq!(model.weights().len(), 1);
        let x = model.tfidf().transform_text("hoor");
        let scores = model.decision_scores(&x).unwrap();
        assert_eq!(scores[0], -scores[1]);
        assert!(scores[1] > 0.0);
        assert_eq!(model.predict(&x).unwrap(), "DUT");
    }

    #[test]
    fn decision_score_edge_cases() {
        let two = [("zeg eens", "BEL"), ("hoor eens", "DUT")];
        let model = text_model(&two, &TrainConfig::default());
        let n = model.tfidf().n_features();
        let zero = model.decision_scores(&SparseVector::empty()).unwrap();
        let b = model.weights()[0][n];
        assert_eq!(zero, vec![-b, b]);
        assert!(matches!(
            model.decision_scores(&sv(&[(n as u32, 1.0)])),
            Err(Error::IndexOutOfRange { .. })
        ));

        let zeros = LinearModel::from_parts(
            model.label_set().clone(),
            model.tfidf().clone(),
            vec![vec![0.0; n + 1]],
            TrainConfig::default(),
        )
        .unwrap();
        let x = model.tfidf().transform_text("zeg");
        assert_eq!(zeros.decision_scores(&x).unwrap(), vec![0.0, 0.0]);
        assert_eq!(zeros.predict(&x).unwrap(), "BEL");

        assert!(LinearModel::from_parts(
            model.label_set().clone(),
            model.tfidf().clone(),
            vec![vec![0.0; n]],
            TrainConfig::default(),
        )
        .is_err());
    }

    #[test]
    fn unknown_training_label_is_rejected() {
        let tfidf = TfIdfModel::fit(["aa bb", "cc dd"], FeatureSpec::word(1).unwrap()).unwrap();
        let xs: Vec<_> = ["aa bb", "cc dd"]
            .iter()
            .map(|t| tfidf.transform_text(t))
            .collect();
        let set = LabelSet::new(["A", "B"]).unwrap();
        assert!(matches!(
            train_multiclass(&xs, &["A", "Z"], &set, &tfidf, &TrainConfig::default()),
            Err(Error::UnknownLabel(_))
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn argmax_shift_invariant(
                scores in proptest::collection::vec(-10i32..10, 1..8),
                shift in 1i32..100,
            ) {
                let a: Vec<f64> = scores.iter().map(|&s| s as f64).collect();
                let b: Vec<f64> = a.iter().map(|s| s + shift as f64).collect();
                prop_assert_eq!(argmax(&a), argmax(&b));
            }

            #[test]
            fn dual_never_decreases(
                points in proptest::collection::vec(
                    (proptest::collection::vec(-2.0f64..2.0, 3), any::<bool>()), 2..8),
                log_c in -3i32..=3,
                seed in any::<u64>(),
            ) {
                let mut ys: Vec<f64> = points.iter().map(|(_, p)| if *p { 1.0 } else { -1.0 }).collect();
                ys[0] = 1.0;
                ys[1] = -1.0;
                let xs: Vec<SparseVector> = points
                    .iter()
                    .map(|(v, _)| {
                        SparseVector::from_pairs(
                            v.iter().enumerate().filter(|(_, &x)| x != 0.0).map(|(i, &x)| (i as u32, x)).collect(),
                        ).unwrap()
                    })
                    .collect();
                let cfg = TrainConfig { c: 10f64.powi(log_c), seed, ..TrainConfig::default() };
                let sol = train_binary(&xs, &ys, 3, true, &cfg).unwrap();
                for pair in sol.stats.dual_objective.windows(2) {
                    prop_assert!(pair[1] >= pair[0], "{:?}", pair);
                }
            }
        }
    }
}
