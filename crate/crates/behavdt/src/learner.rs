//! The BehavDT learner: recursive best-attribute splitting with
//! behavior-oriented node generalization and exception expansion.
//!
//! Construction runs over an integer-coded copy of the training data so
//! repeated distribution/gain computations stay cheap; codes are assigned in
//! sorted value order, which makes the coded tie-breaks identical to the
//! string-level rules in [`crate::metrics`].

use std::collections::BTreeMap;

use crate::dataset::{ContextSchema, Dataset};
use crate::error::{Error, Result};
use crate::metrics::{dominant_behavior, entropy_from_counts, ClassDistribution, GAIN_TIE_TOLERANCE};

/// When does a value branch under a generalized node count as an exception
/// worth expanding?
///
/// Majority-deviation expands a branch only when the branch subset's dominant
/// class differs from the generalized label; it is the default because it
/// keeps generalization effective under label noise. Any-deviation expands on
/// any single disagreeing instance, which reproduces exact trees on clean
/// data at the cost of regrowing most branches when noise is present.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExceptionPolicy {
    MajorityDeviation,
    AnyDeviation,
}

impl ExceptionPolicy {
    /// Whether a child subset with distribution `dist` deviates from the
    /// generalized label and must be expanded. Empty subsets never expand.
    pub fn expands(&self, dist: &ClassDistribution, generalized_label: &str) -> bool {
        if dist.is_empty() {
            return false;
        }
        match self {
            ExceptionPolicy::MajorityDeviation => {
                let (dominant, _) = dominant_behavior(dist).expect("non-empty");
                dominant != generalized_label
            }
            ExceptionPolicy::AnyDeviation => {
                let matching = dist.counts().get(generalized_label).copied().unwrap_or(0);
                matching < dist.total()
            }
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ExceptionPolicy::MajorityDeviation => "majority-deviation",
            ExceptionPolicy::AnyDeviation => "any-deviation",
        }
    }

    /// Accepts both the full token and the CLI short form.
    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "majority" | "majority-deviation" => Some(ExceptionPolicy::MajorityDeviation),
            "any" | "any-deviation" => Some(ExceptionPolicy::AnyDeviation),
            _ => None,
        }
    }
}

/// Knobs for [`build_tree`].
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerConfig {
    /// The user-preferred confidence threshold t: a node generalizes when
    /// its dominant behavior's share reaches this fraction.
    pub confidence_threshold: f64,
    pub exception_policy: ExceptionPolicy,
    /// Optional depth cap; nodes at the cap become leaves.
    pub max_depth: Option<usize>,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig {
            confidence_threshold: 0.8,
            exception_policy: ExceptionPolicy::MajorityDeviation,
            max_depth: None,
        }
    }
}

impl LearnerConfig {
    pub fn with_threshold(confidence_threshold: f64) -> Self {
        LearnerConfig {
            confidence_threshold,
            ..LearnerConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.confidence_threshold) {
            return Err(Error::Config(format!(
                "confidence threshold {} is outside [0, 1]",
                self.confidence_threshold
            )));
        }
        if self.max_depth == Some(0) {
            return Err(Error::Config("max depth must be positive".into()));
        }
        if self.confidence_threshold < 0.5 {
            log::warn!(
                "confidence threshold {} is below 0.5; a dominant class can then be a minority of a multi-class subset",
                self.confidence_threshold
            );
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Root,
    Interior,
    Leaf,
}

impl NodeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            NodeKind::Root => "root",
            NodeKind::Interior => "interior",
            NodeKind::Leaf => "leaf",
        }
    }
}

/// One tree node. Interior nodes may carry behavior labels — that is the
/// whole point of the learner — and an unlabeled node only routes.
#[derive(Debug, Clone, PartialEq)]
pub struct BehavNode {
    /// Pre-order position over the whole tree (root = 0, children visited in
    /// lexicographic branch-value order). Shared by extraction, prediction
    /// provenance, and the serialized form.
    pub id: u64,
    pub kind: NodeKind,
    /// The generalized or leaf behavior; `None` on nodes that failed the
    /// confidence test and only dispatch to their branches.
    pub label: Option<String>,
    /// Share of the node's training subset carried by the dominant class
    /// (the label when present).
    pub confidence: f64,
    /// Training instances that reached this node.
    pub support: u64,
    /// True for impure leaves labeled only because attributes ran out or the
    /// depth cap was hit; exempt from the confidence invariant.
    pub forced: bool,
    pub split_attribute: Option<String>,
    pub branches: BTreeMap<String, BehavNode>,
    /// (attribute, value) tests from the root down to this node.
    pub context_path: Vec<(String, String)>,
}

impl BehavNode {
    pub fn depth(&self) -> usize {
        self.context_path.len()
    }

    pub fn is_labeled(&self) -> bool {
        self.label.is_some()
    }

    /// Nodes in this subtree, self included.
    pub fn size(&self) -> usize {
        1 + self.branches.values().map(BehavNode::size).sum::<usize>()
    }
}

/// A built behavioral decision tree plus everything prediction needs.
#[derive(Debug, Clone, PartialEq)]
pub struct BehavTree {
    pub root: BehavNode,
    pub schema: ContextSchema,
    pub config: LearnerConfig,
    /// Dataset-wide majority class, the fallback when no labeled node is met.
    pub majority_label: String,
}

/// Algorithm core: if the subset is non-empty and its dominant behavior's
/// confidence reaches `threshold`, that behavior generalizes the subset.
pub fn node_generalization(subset: &Dataset, threshold: f64) -> Option<(String, f64)> {
    if subset.is_empty() {
        return None;
    }
    let dist =
        ClassDistribution::from_labels(subset.instances.iter().map(|i| i.label.as_str()));
    let (label, confidence) = dominant_behavior(&dist).expect("non-empty");
    (confidence >= threshold).then_some((label, confidence))
}

// ---------------------------------------------------------------------------
// Integer-coded training data
// ---------------------------------------------------------------------------

/// Training data recoded to dense integers: attribute values and class
/// labels are replaced by their positions in the sorted distinct-value lists,
/// so code order equals lexicographic order everywhere tie-breaks matter.
pub(crate) struct CodedData {
    pub attr_names: Vec<String>,
    /// Per attribute: sorted distinct observed values; index = code.
    pub attr_values: Vec<Vec<String>>,
    /// Sorted distinct labels; index = code.
    pub classes: Vec<String>,
    /// Row-major value codes, `attr_count` per instance.
    rows: Vec<u32>,
    labels: Vec<u32>,
    pub attr_count: usize,
}

impl CodedData {
    pub fn from_dataset(dataset: &Dataset) -> Self {
        let attr_count = dataset.schema.len();
        let mut value_sets: Vec<std::collections::BTreeSet<&str>> = vec![Default::default(); attr_count];
        let mut class_set: std::collections::BTreeSet<&str> = Default::default();
        for inst in &dataset.instances {
            for (a, v) in inst.values.iter().enumerate() {
                value_sets[a].insert(v);
            }
            class_set.insert(&inst.label);
        }
        let attr_values: Vec<Vec<String>> = value_sets
            .into_iter()
            .map(|s| s.into_iter().map(str::to_owned).collect())
            .collect();
        let classes: Vec<String> = class_set.into_iter().map(str::to_owned).collect();

        let code = |sorted: &[String], v: &str| -> u32 {
            sorted
                .binary_search_by(|probe| probe.as_str().cmp(v))
                .expect("value seen during collection") as u32
        };
        let mut rows = Vec::with_capacity(dataset.len() * attr_count);
        let mut labels = Vec::with_capacity(dataset.len());
        for inst in &dataset.instances {
            for (a, v) in inst.values.iter().enumerate() {
                rows.push(code(&attr_values[a], v));
            }
            labels.push(code(&classes, &inst.label));
        }
        CodedData {
            attr_names: dataset
                .schema
                .attributes
                .iter()
                .map(|a| a.name.clone())
                .collect(),
            attr_values,
            classes,
            rows,
            labels,
            attr_count,
        }
    }

    fn value(&self, row: u32, attr: usize) -> u32 {
        self.rows[row as usize * self.attr_count + attr]
    }

    fn label_counts(&self, subset: &[u32]) -> Vec<u64> {
        let mut counts = vec![0u64; self.classes.len()];
        for &r in subset {
            counts[self.labels[r as usize] as usize] += 1;
        }
        counts
    }

    /// (class code, count) with the max count; ties go to the smallest code,
    /// which is the lexicographically smallest label.
    fn dominant(counts: &[u64]) -> (u32, u64) {
        let mut best = (0u32, 0u64);
        for (code, &count) in counts.iter().enumerate() {
            if count > best.1 {
                best = (code as u32, count);
            }
        }
        best
    }

    /// Unused attribute with maximal information gain on `subset`; gains
    /// within the tie tolerance resolve to the earliest schema position.
    /// `None` when every attribute is used.
    fn best_attribute(&self, subset: &[u32], used: &[bool]) -> Option<usize> {
        let counts = self.label_counts(subset);
        let total = subset.len() as u64;
        let parent_entropy = entropy_from_counts(counts.iter().copied(), total);
        let mut best: Option<(usize, f64)> = None;
        for (attr, &is_used) in used.iter().enumerate() {
            if is_used {
                continue;
            }
            let gain = self.gain(subset, attr, parent_entropy);
            if best.is_none_or(|(_, g)| gain > g + GAIN_TIE_TOLERANCE) {
                best = Some((attr, gain));
            }
        }
        best.map(|(attr, _)| attr)
    }

    fn gain(&self, subset: &[u32], attr: usize, parent_entropy: f64) -> f64 {
        let k = self.classes.len();
        let vcount = self.attr_values[attr].len();
        let mut table = vec![0u64; vcount * k];
        let mut totals = vec![0u64; vcount];
        for &r in subset {
            let v = self.value(r, attr) as usize;
            table[v * k + self.labels[r as usize] as usize] += 1;
            totals[v] += 1;
        }
        let n = subset.len() as f64;
        let mut gain = parent_entropy;
        for v in 0..vcount {
            if totals[v] > 0 {
                let h = entropy_from_counts(table[v * k..(v + 1) * k].iter().copied(), totals[v]);
                gain -= (totals[v] as f64 / n) * h;
            }
        }
        gain
    }

    /// Non-empty cells of the value partition, in value-code (hence
    /// lexicographic) order.
    fn partition(&self, subset: &[u32], attr: usize) -> Vec<(u32, Vec<u32>)> {
        let mut cells: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for &r in subset {
            cells.entry(self.value(r, attr)).or_default().push(r);
        }
        cells.into_iter().collect()
    }

    pub fn majority_label(&self) -> String {
        let all: Vec<u32> = (0..self.labels.len() as u32).collect();
        let counts = self.label_counts(&all);
        let (code, _) = Self::dominant(&counts);
        self.classes[code as usize].clone()
    }
}

// ---------------------------------------------------------------------------
// Tree growth
// ---------------------------------------------------------------------------

pub(crate) enum GrowMode {
    /// BehavDT: purity check, then generalization with exception expansion,
    /// then routing.
    Generalizing {
        threshold: f64,
        policy: ExceptionPolicy,
        max_depth: Option<usize>,
    },
    /// ID3-style baseline: split at every impure node, labels on leaves only.
    Traditional,
}

fn make_node(
    label: Option<String>,
    confidence: f64,
    support: u64,
    forced: bool,
    split_attribute: Option<String>,
    branches: BTreeMap<String, BehavNode>,
) -> BehavNode {
    let kind = if branches.is_empty() {
        NodeKind::Leaf
    } else {
        NodeKind::Interior
    };
    BehavNode {
        id: 0,
        kind,
        label,
        confidence,
        support,
        forced,
        split_attribute,
        branches,
        context_path: Vec::new(),
    }
}

fn grow(data: &CodedData, subset: Vec<u32>, used: &mut [bool], depth: usize, mode: &GrowMode) -> BehavNode {
    let counts = data.label_counts(&subset);
    let support = subset.len() as u64;
    let (dom_code, dom_count) = CodedData::dominant(&counts);
    let confidence = dom_count as f64 / support as f64;
    let dom_label = data.classes[dom_code as usize].clone();

    if dom_count == support {
        // pure subset
        return make_node(Some(dom_label), 1.0, support, false, None, BTreeMap::new());
    }

    match mode {
        GrowMode::Generalizing {
            threshold,
            policy,
            max_depth,
        } => {
            let depth_open = max_depth.is_none_or(|cap| depth < cap);
            let next_attr = if depth_open {
                data.best_attribute(&subset, used)
            } else {
                None
            };

            if confidence >= *threshold {
                // generalized node; only deviating branches are expanded
                let mut branches = BTreeMap::new();
                let mut split_attribute = None;
                if let Some(attr) = next_attr {
                    let deviating: Vec<(u32, Vec<u32>)> = data
                        .partition(&subset, attr)
                        .into_iter()
                        .filter(|(_, cell)| {
                            let cell_counts = data.label_counts(cell);
                            match policy {
                                ExceptionPolicy::MajorityDeviation => {
                                    CodedData::dominant(&cell_counts).0 != dom_code
                                }
                                ExceptionPolicy::AnyDeviation => {
                                    cell_counts[dom_code as usize] < cell.len() as u64
                                }
                            }
                        })
                        .collect();
                    if !deviating.is_empty() {
                        used[attr] = true;
                        for (value_code, cell) in deviating {
                            let value = data.attr_values[attr][value_code as usize].clone();
                            branches.insert(value, grow(data, cell, used, depth + 1, mode));
                        }
                        used[attr] = false;
                        split_attribute = Some(data.attr_names[attr].clone());
                    }
                }
                return make_node(
                    Some(dom_label),
                    confidence,
                    support,
                    false,
                    split_attribute,
                    branches,
                );
            }

            match next_attr {
                None => {
                    // attributes exhausted or depth cap on an impure subset
                    make_node(Some(dom_label), confidence, support, true, None, BTreeMap::new())
                }
                Some(attr) => {
                    // no generalization possible: unlabeled routing node over
                    // every present value
                    let mut branches = BTreeMap::new();
                    used[attr] = true;
                    for (value_code, cell) in data.partition(&subset, attr) {
                        let value = data.attr_values[attr][value_code as usize].clone();
                        branches.insert(value, grow(data, cell, used, depth + 1, mode));
                    }
                    used[attr] = false;
                    make_node(
                        None,
                        confidence,
                        support,
                        false,
                        Some(data.attr_names[attr].clone()),
                        branches,
                    )
                }
            }
        }
        GrowMode::Traditional => match data.best_attribute(&subset, used) {
            None => make_node(Some(dom_label), confidence, support, true, None, BTreeMap::new()),
            Some(attr) => {
                let mut branches = BTreeMap::new();
                used[attr] = true;
                for (value_code, cell) in data.partition(&subset, attr) {
                    let value = data.attr_values[attr][value_code as usize].clone();
                    branches.insert(value, grow(data, cell, used, depth + 1, mode));
                }
                used[attr] = false;
                make_node(
                    None,
                    confidence,
                    support,
                    false,
                    Some(data.attr_names[attr].clone()),
                    branches,
                )
            }
        },
    }
}

fn assign_ids_and_paths(node: &mut BehavNode, counter: &mut u64, path: &[(String, String)]) {
    node.id = *counter;
    *counter += 1;
    node.context_path = path.to_vec();
    let split = node.split_attribute.clone();
    for (value, child) in &mut node.branches {
        let mut child_path = path.to_vec();
        child_path.push((
            split.clone().expect("branches imply a split attribute"),
            value.clone(),
        ));
        assign_ids_and_paths(child, counter, &child_path);
    }
}

/// Root growth shared with the baseline module: grows, marks the root, and
/// assigns pre-order ids plus context paths.
pub(crate) fn grow_root(data: &CodedData, mode: &GrowMode) -> BehavNode {
    let rows: Vec<u32> = (0..data.labels.len() as u32).collect();
    let mut used = vec![false; data.attr_count];
    let mut root = grow(data, rows, &mut used, 0, mode);
    root.kind = NodeKind::Root;
    let mut counter = 0;
    assign_ids_and_paths(&mut root, &mut counter, &[]);
    root
}

/// Builds a BehavDT tree: every node first tries purity, then behavior-
/// oriented generalization against the confidence threshold (expanding only
/// exception branches below a generalized node), and otherwise splits into
/// an unlabeled routing node; impure dead ends become forced leaves.
pub fn build_tree(train: &Dataset, config: &LearnerConfig) -> Result<BehavTree> {
    config.validate()?;
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if train.schema.is_empty() {
        return Err(Error::Schema("dataset has no context attributes".into()));
    }
    let data = CodedData::from_dataset(train);
    let mode = GrowMode::Generalizing {
        threshold: config.confidence_threshold,
        policy: config.exception_policy,
        max_depth: config.max_depth,
    };
    let root = grow_root(&data, &mode);
    log::debug!(
        "built behavdt tree: {} nodes over {} instances (threshold {}, policy {})",
        root.size(),
        train.len(),
        config.confidence_threshold,
        config.exception_policy.as_str()
    );
    Ok(BehavTree {
        root,
        schema: train.schema.clone(),
        config: config.clone(),
        majority_label: data.majority_label(),
    })
}
