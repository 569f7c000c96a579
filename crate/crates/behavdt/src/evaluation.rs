//! Scoring, k-fold cross-validation, and the experiment drivers (confidence
//! sweep, model comparison), plus the TSV/TOML report renderers the CLI
//! prints.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::baselines::{build_traditional_dt, build_zero_r};
use crate::dataset::{split_kfold, split_kfold_stratified, Dataset};
use crate::error::{Error, Result};
use crate::learner::{build_tree, LearnerConfig};
use crate::model::{count_decision_nodes, esc, fmt_fraction, predict, TrainedModel};

/// One-vs-rest counts for a single class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionTally {
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub true_negatives: u64,
}

/// Per-class precision and recall. A zero denominator yields the value 0.0
/// with the matching `*_defined` flag cleared, so downstream aggregation
/// never divides by zero and callers can still tell "bad" from "vacuous".
#[derive(Debug, Clone, PartialEq)]
pub struct ClassMetrics {
    pub class: String,
    pub tally: ConfusionTally,
    pub precision: f64,
    pub recall: f64,
    pub precision_defined: bool,
    pub recall_defined: bool,
}

impl ClassMetrics {
    /// How often the class appears as ground truth.
    pub fn support(&self) -> u64 {
        self.tally.true_positives + self.tally.false_negatives
    }
}

/// Scores for one set of (truth, predicted) pairs. When produced by
/// cross-validation the top-level numbers are pooled over every fold's test
/// predictions and `folds` holds the per-fold reports.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub total: u64,
    pub correct: u64,
    pub accuracy: f64,
    /// Sorted by class name; covers every class seen in truth or predictions.
    pub per_class: Vec<ClassMetrics>,
    /// Unweighted means over classes that appear in the truth column.
    pub macro_precision: f64,
    pub macro_recall: f64,
    /// Means weighted by truth support. Weighted recall reduces to
    /// correct/total and is computed that way, so it equals accuracy exactly.
    pub weighted_precision: f64,
    pub weighted_recall: f64,
    pub folds: Option<Vec<MetricsReport>>,
}

fn ratio(numerator: u64, denominator: u64) -> (f64, bool) {
    if denominator == 0 {
        (0.0, false)
    } else {
        (numerator as f64 / denominator as f64, true)
    }
}

/// Computes a full report from `(truth, predicted)` pairs.
pub fn score(pairs: &[(String, String)]) -> Result<MetricsReport> {
    if pairs.is_empty() {
        return Err(Error::EmptyPredictions);
    }
    let mut tallies: BTreeMap<&str, ConfusionTally> = BTreeMap::new();
    let mut correct = 0u64;
    for (truth, predicted) in pairs {
        tallies.entry(truth.as_str()).or_default();
        tallies.entry(predicted.as_str()).or_default();
        if truth == predicted {
            correct += 1;
            tallies.get_mut(truth.as_str()).unwrap().true_positives += 1;
        } else {
            tallies.get_mut(truth.as_str()).unwrap().false_negatives += 1;
            tallies.get_mut(predicted.as_str()).unwrap().false_positives += 1;
        }
    }
    let total = pairs.len() as u64;
    let accuracy = correct as f64 / total as f64;

    let mut per_class = Vec::with_capacity(tallies.len());
    for (class, mut tally) in tallies {
        tally.true_negatives =
            total - tally.true_positives - tally.false_positives - tally.false_negatives;
        let (precision, precision_defined) =
            ratio(tally.true_positives, tally.true_positives + tally.false_positives);
        let (recall, recall_defined) =
            ratio(tally.true_positives, tally.true_positives + tally.false_negatives);
        per_class.push(ClassMetrics {
            class: class.to_owned(),
            tally,
            precision,
            recall,
            precision_defined,
            recall_defined,
        });
    }

    let truth_classes: Vec<&ClassMetrics> =
        per_class.iter().filter(|c| c.support() > 0).collect();
    let class_count = truth_classes.len() as f64;
    let macro_precision = truth_classes.iter().map(|c| c.precision).sum::<f64>() / class_count;
    let macro_recall = truth_classes.iter().map(|c| c.recall).sum::<f64>() / class_count;
    let weighted_precision = truth_classes
        .iter()
        .map(|c| c.support() as f64 * c.precision)
        .sum::<f64>()
        / total as f64;
    // sum of per-class true positives is exactly `correct`
    let weighted_recall = correct as f64 / total as f64;

    Ok(MetricsReport {
        total,
        correct,
        accuracy,
        per_class,
        macro_precision,
        macro_recall,
        weighted_precision,
        weighted_recall,
        folds: None,
    })
}

/// Which learner to train.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    BehavDt,
    TraditionalDt,
    ZeroR,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::BehavDt => "behavdt",
            ModelKind::TraditionalDt => "traditional-dt",
            ModelKind::ZeroR => "zero-r",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "behavdt" => Some(ModelKind::BehavDt),
            "traditional-dt" => Some(ModelKind::TraditionalDt),
            "zero-r" => Some(ModelKind::ZeroR),
            _ => None,
        }
    }
}

/// Trains the requested model. `config` only steers the BehavDT learner;
/// the baselines ignore it.
pub fn train_model(
    kind: ModelKind,
    dataset: &Dataset,
    config: &LearnerConfig,
) -> Result<TrainedModel> {
    Ok(match kind {
        ModelKind::BehavDt => build_tree(dataset, config)?.into(),
        ModelKind::TraditionalDt => build_traditional_dt(dataset)?.into(),
        ModelKind::ZeroR => build_zero_r(dataset)?.into(),
    })
}

/// Predicts every instance and pairs the truth label with the prediction.
pub fn prediction_pairs(model: &TrainedModel, dataset: &Dataset) -> Result<Vec<(String, String)>> {
    dataset
        .instances
        .iter()
        .map(|instance| {
            let prediction = predict(model, &instance.values)?;
            Ok((instance.label.clone(), prediction.label))
        })
        .collect()
}

/// Seeded k-fold cross-validation. Test predictions from every fold are
/// pooled into the primary report; the per-fold reports ride along in
/// `folds`. The same (k, seed, stratified) triple always reproduces the
/// same folds.
pub fn cross_validate(
    dataset: &Dataset,
    kind: ModelKind,
    config: &LearnerConfig,
    k: usize,
    seed: u64,
    stratified: bool,
) -> Result<MetricsReport> {
    let splits = if stratified {
        split_kfold_stratified(dataset, k, seed)?
    } else {
        split_kfold(dataset, k, seed)?
    };
    let mut pooled = Vec::with_capacity(dataset.len());
    let mut fold_reports = Vec::with_capacity(splits.len());
    for (train, test) in &splits {
        let model = train_model(kind, train, config)?;
        let pairs = prediction_pairs(&model, test)?;
        fold_reports.push(score(&pairs)?);
        pooled.extend(pairs);
    }
    let mut report = score(&pooled)?;
    report.folds = Some(fold_reports);
    Ok(report)
}

/// One row of a confidence sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub threshold: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub accuracy: f64,
    /// Decision nodes of the tree built on the full dataset at this
    /// threshold (cross-validated metrics, full-data node count).
    pub decision_nodes: usize,
}

/// Sweep output; rows are ordered by strictly decreasing threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

/// Runs cross-validation and a full-data build per confidence threshold.
/// Thresholds are validated, sorted descending, and deduplicated.
pub fn confidence_sweep(
    dataset: &Dataset,
    base_config: &LearnerConfig,
    thresholds: &[f64],
    k: usize,
    seed: u64,
    stratified: bool,
) -> Result<SweepResult> {
    if thresholds.is_empty() {
        return Err(Error::Config(
            "a confidence sweep needs at least one threshold".into(),
        ));
    }
    let mut grid = Vec::with_capacity(thresholds.len());
    for &threshold in thresholds {
        let config = LearnerConfig {
            confidence_threshold: threshold,
            ..base_config.clone()
        };
        config.validate()?;
        grid.push((threshold, config));
    }
    grid.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("validated thresholds"));
    grid.dedup_by(|a, b| a.0 == b.0);

    let mut rows = Vec::with_capacity(grid.len());
    for (threshold, config) in grid {
        let report = cross_validate(dataset, ModelKind::BehavDt, &config, k, seed, stratified)?;
        let full = build_tree(dataset, &config)?;
        let decision_nodes = count_decision_nodes(&full.into());
        rows.push(SweepRow {
            threshold,
            macro_precision: report.macro_precision,
            macro_recall: report.macro_recall,
            accuracy: report.accuracy,
            decision_nodes,
        });
    }
    Ok(SweepResult { rows })
}

/// One row of the three-way model comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub model: String,
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub decision_nodes: usize,
}

/// Cross-validates ZeroR, the traditional tree, and BehavDT on identical
/// folds (the split is a pure function of k and seed) and reports one row
/// per model in that order.
pub fn compare_models(
    dataset: &Dataset,
    config: &LearnerConfig,
    k: usize,
    seed: u64,
    stratified: bool,
) -> Result<Vec<ComparisonRow>> {
    let kinds = [ModelKind::ZeroR, ModelKind::TraditionalDt, ModelKind::BehavDt];
    let mut rows = Vec::with_capacity(kinds.len());
    for kind in kinds {
        let report = cross_validate(dataset, kind, config, k, seed, stratified)?;
        let full = train_model(kind, dataset, config)?;
        rows.push(ComparisonRow {
            model: kind.as_str().to_owned(),
            accuracy: report.accuracy,
            macro_precision: report.macro_precision,
            macro_recall: report.macro_recall,
            decision_nodes: count_decision_nodes(&full),
        });
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Report rendering
// ---------------------------------------------------------------------------

fn tsv_row(out: &mut String, scope: &str, metric: &str, class: &str, value: String) {
    let _ = writeln!(out, "{scope}\t{metric}\t{class}\t{value}");
}

fn emit_scope(out: &mut String, scope: &str, report: &MetricsReport) {
    tsv_row(out, scope, "accuracy", "", format!("{:.6}", report.accuracy));
    tsv_row(out, scope, "macro_precision", "", format!("{:.6}", report.macro_precision));
    tsv_row(out, scope, "macro_recall", "", format!("{:.6}", report.macro_recall));
    tsv_row(out, scope, "weighted_precision", "", format!("{:.6}", report.weighted_precision));
    tsv_row(out, scope, "weighted_recall", "", format!("{:.6}", report.weighted_recall));
    for class in &report.per_class {
        tsv_row(out, scope, "precision", &class.class, format!("{:.6}", class.precision));
        tsv_row(out, scope, "recall", &class.class, format!("{:.6}", class.recall));
        tsv_row(out, scope, "support", &class.class, class.support().to_string());
    }
}

/// Long-format TSV: `scope  metric  class  value`. The pooled scope comes
/// first, then one `fold_<i>` scope per fold; the class column is empty on
/// aggregate rows.
pub fn metrics_tsv(report: &MetricsReport) -> String {
    let mut out = String::from("scope\tmetric\tclass\tvalue\n");
    emit_scope(&mut out, "pooled", report);
    if let Some(folds) = &report.folds {
        for (i, fold) in folds.iter().enumerate() {
            emit_scope(&mut out, &format!("fold_{i}"), fold);
        }
    }
    out
}

/// One TSV row per sweep threshold, highest threshold first.
pub fn sweep_tsv(result: &SweepResult) -> String {
    let mut out =
        String::from("threshold\tmacro_precision\tmacro_recall\taccuracy\tdecision_nodes\n");
    for row in &result.rows {
        let _ = writeln!(
            out,
            "{:.6}\t{:.6}\t{:.6}\t{:.6}\t{}",
            row.threshold, row.macro_precision, row.macro_recall, row.accuracy, row.decision_nodes
        );
    }
    out
}

/// One TSV row per compared model.
pub fn compare_tsv(rows: &[ComparisonRow]) -> String {
    let mut out =
        String::from("model\taccuracy\tmacro_precision\tmacro_recall\tdecision_nodes\n");
    for row in rows {
        let _ = writeln!(
            out,
            "{}\t{:.6}\t{:.6}\t{:.6}\t{}",
            row.model, row.accuracy, row.macro_precision, row.macro_recall, row.decision_nodes
        );
    }
    out
}

fn emit_report_table(out: &mut String, header: &str, class_header: &str, report: &MetricsReport) {
    let _ = writeln!(out, "\n[{header}]");
    let _ = writeln!(out, "total = {}", report.total);
    let _ = writeln!(out, "correct = {}", report.correct);
    let _ = writeln!(out, "accuracy = {}", fmt_fraction(report.accuracy));
    let _ = writeln!(out, "macro_precision = {}", fmt_fraction(report.macro_precision));
    let _ = writeln!(out, "macro_recall = {}", fmt_fraction(report.macro_recall));
    let _ = writeln!(out, "weighted_precision = {}", fmt_fraction(report.weighted_precision));
    let _ = writeln!(out, "weighted_recall = {}", fmt_fraction(report.weighted_recall));
    for class in &report.per_class {
        let _ = writeln!(out, "\n[[{class_header}]]");
        let _ = writeln!(out, "name = \"{}\"", esc(&class.class));
        let _ = writeln!(out, "precision = {}", fmt_fraction(class.precision));
        let _ = writeln!(out, "precision_defined = {}", class.precision_defined);
        let _ = writeln!(out, "recall = {}", fmt_fraction(class.recall));
        let _ = writeln!(out, "recall_defined = {}", class.recall_defined);
        let _ = writeln!(out, "true_positives = {}", class.tally.true_positives);
        let _ = writeln!(out, "false_positives = {}", class.tally.false_positives);
        let _ = writeln!(out, "false_negatives = {}", class.tally.false_negatives);
        let _ = writeln!(out, "true_negatives = {}", class.tally.true_negatives);
    }
}

/// TOML mirror of [`metrics_tsv`], carrying full-precision numbers and the
/// raw tallies.
pub fn metrics_doc(report: &MetricsReport) -> String {
    let mut out = String::from("kind = \"evaluation\"\n");
    emit_report_table(&mut out, "pooled", "pooled.class", report);
    if let Some(folds) = &report.folds {
        for (i, fold) in folds.iter().enumerate() {
            let _ = writeln!(out, "\n[[fold]]");
            let _ = writeln!(out, "index = {i}");
            // inline the same fields as pooled, nested per fold
            let _ = writeln!(out, "total = {}", fold.total);
            let _ = writeln!(out, "correct = {}", fold.correct);
            let _ = writeln!(out, "accuracy = {}", fmt_fraction(fold.accuracy));
            let _ = writeln!(out, "macro_precision = {}", fmt_fraction(fold.macro_precision));
            let _ = writeln!(out, "macro_recall = {}", fmt_fraction(fold.macro_recall));
            let _ = writeln!(out, "weighted_precision = {}", fmt_fraction(fold.weighted_precision));
            let _ = writeln!(out, "weighted_recall = {}", fmt_fraction(fold.weighted_recall));
            for class in &fold.per_class {
                let _ = writeln!(out, "\n[[fold.class]]");
                let _ = writeln!(out, "name = \"{}\"", esc(&class.class));
                let _ = writeln!(out, "precision = {}", fmt_fraction(class.precision));
                let _ = writeln!(out, "precision_defined = {}", class.precision_defined);
                let _ = writeln!(out, "recall = {}", fmt_fraction(class.recall));
                let _ = writeln!(out, "recall_defined = {}", class.recall_defined);
                let _ = writeln!(out, "true_positives = {}", class.tally.true_positives);
                let _ = writeln!(out, "false_positives = {}", class.tally.false_positives);
                let _ = writeln!(out, "false_negatives = {}", class.tally.false_negatives);
                let _ = writeln!(out, "true_negatives = {}", class.tally.true_negatives);
            }
        }
    }
    out
}

/// TOML mirror of [`sweep_tsv`].
pub fn sweep_doc(result: &SweepResult) -> String {
    let mut out = String::from("kind = \"sweep\"\n");
    for row in &result.rows {
        let _ = writeln!(out, "\n[[row]]");
        let _ = writeln!(out, "threshold = {}", fmt_fraction(row.threshold));
        let _ = writeln!(out, "macro_precision = {}", fmt_fraction(row.macro_precision));
        let _ = writeln!(out, "macro_recall = {}", fmt_fraction(row.macro_recall));
        let _ = writeln!(out, "accuracy = {}", fmt_fraction(row.accuracy));
        let _ = writeln!(out, "decision_nodes = {}", row.decision_nodes);
    }
    out
}

/// TOML mirror of [`compare_tsv`].
pub fn compare_doc(rows: &[ComparisonRow]) -> String {
    let mut out = String::from("kind = \"comparison\"\n");
    for row in rows {
        let _ = writeln!(out, "\n[[row]]");
        let _ = writeln!(out, "model = \"{}\"", esc(&row.model));
        let _ = writeln!(out, "accuracy = {}", fmt_fraction(row.accuracy));
        let _ = writeln!(out, "macro_precision = {}", fmt_fraction(row.macro_precision));
        let _ = writeln!(out, "macro_recall = {}", fmt_fraction(row.macro_recall));
        let _ = writeln!(out, "decision_nodes = {}", row.decision_nodes);
    }
    out
}
