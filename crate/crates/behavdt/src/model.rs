//! Prediction over built trees, decision-node extraction, the on-disk model
//! document, and human-readable exports.
//!
//! The model document is TOML (format documented in FORMATS.md). Writing is
//! hand-rolled so output is canonical byte-for-byte: fixed key order,
//! pre-order node array, branch targets by node id, confidences rendered
//! with 12 significant digits.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Deserialize;

use crate::baselines::{BaselineModel, BaselineVariant};
use crate::dataset::{Attribute, ContextSchema};
use crate::error::{Error, Result};
use crate::learner::{BehavNode, BehavTree, ExceptionPolicy, LearnerConfig, NodeKind};

/// The document format version this build writes and reads.
pub const MODEL_FORMAT_VERSION: i64 = 1;

/// Any trained predictor: the BehavDT tree or one of the baselines.
#[derive(Debug, Clone, PartialEq)]
pub enum TrainedModel {
    BehavDt(BehavTree),
    Baseline(BaselineModel),
}

impl From<BehavTree> for TrainedModel {
    fn from(tree: BehavTree) -> Self {
        TrainedModel::BehavDt(tree)
    }
}

impl From<BaselineModel> for TrainedModel {
    fn from(model: BaselineModel) -> Self {
        TrainedModel::Baseline(model)
    }
}

impl TrainedModel {
    /// Stable token naming the model family: `behavdt`, `traditional-dt`,
    /// or `zero-r`.
    pub fn kind_token(&self) -> &'static str {
        match self {
            TrainedModel::BehavDt(_) => "behavdt",
            TrainedModel::Baseline(b) => b.variant.as_str(),
        }
    }

    pub fn schema(&self) -> &ContextSchema {
        match self {
            TrainedModel::BehavDt(tree) => &tree.schema,
            TrainedModel::Baseline(b) => &b.schema,
        }
    }

    pub fn majority_label(&self) -> &str {
        match self {
            TrainedModel::BehavDt(tree) => &tree.majority_label,
            TrainedModel::Baseline(b) => &b.majority_label,
        }
    }

    pub fn root(&self) -> Option<&BehavNode> {
        match self {
            TrainedModel::BehavDt(tree) => Some(&tree.root),
            TrainedModel::Baseline(b) => b.tree.as_ref(),
        }
    }
}

/// One prediction with its provenance: which node decided, how deep it sits,
/// and whether the dataset-majority fallback had to fire.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prediction {
    pub label: String,
    /// Id of the labeled node that produced the label; `None` when the
    /// fallback fired (no labeled node on the visited path, or ZeroR).
    pub source_node: Option<u64>,
    pub depth: usize,
    pub fallback_used: bool,
}

/// Descends from the root following branches that match the instance's
/// values, and answers with the deepest labeled node on the visited path;
/// when no labeled node was met the dataset majority label is used.
pub fn predict(model: &TrainedModel, values: &[String]) -> Result<Prediction> {
    let schema = model.schema();
    if values.len() != schema.len() {
        return Err(Error::InstanceArity {
            expected: schema.len(),
            found: values.len(),
        });
    }
    let fallback = || Prediction {
        label: model.majority_label().to_owned(),
        source_node: None,
        depth: 0,
        fallback_used: true,
    };
    let Some(root) = model.root() else {
        return Ok(fallback());
    };
    let mut node = root;
    let mut decided: Option<&BehavNode> = None;
    loop {
        if node.is_labeled() {
            decided = Some(node);
        }
        let Some(attr) = &node.split_attribute else {
            break;
        };
        let Some(idx) = schema.attribute_index(attr) else {
            break; // validated models never hit this
        };
        match node.branches.get(&values[idx]) {
            Some(child) => node = child,
            None => break, // unseen or subsumed value: stop here
        }
    }
    Ok(match decided {
        Some(n) => Prediction {
            label: n.label.clone().expect("labeled"),
            source_node: Some(n.id),
            depth: n.depth(),
            fallback_used: false,
        },
        None => fallback(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeType {
    Interior,
    Leaf,
}

impl NodeType {
    pub fn as_str(&self) -> &'static str {
        match self {
            NodeType::Interior => "interior",
            NodeType::Leaf => "leaf",
        }
    }
}

/// A flat summary row describing one decision (labeled) node.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionNodeRecord {
    pub node_id: u64,
    /// Interior when the node still has branches below it, leaf otherwise.
    pub node_type: NodeType,
    pub behavior: String,
    /// The context-path values from the root down to the node.
    pub associated_contexts: Vec<String>,
    pub confidence: f64,
    pub support: u64,
}

fn collect_records(node: &BehavNode, out: &mut Vec<DecisionNodeRecord>) {
    if let Some(behavior) = &node.label {
        out.push(DecisionNodeRecord {
            node_id: node.id,
            node_type: if node.branches.is_empty() {
                NodeType::Leaf
            } else {
                NodeType::Interior
            },
            behavior: behavior.clone(),
            associated_contexts: node.context_path.iter().map(|(_, v)| v.clone()).collect(),
            confidence: node.confidence,
            support: node.support,
        });
    }
    for child in node.branches.values() {
        collect_records(child, out);
    }
}

/// One record per labeled node, in pre-order (lexicographic branch order).
pub fn extract_decision_nodes(tree: &BehavTree) -> Vec<DecisionNodeRecord> {
    let mut out = Vec::new();
    collect_records(&tree.root, &mut out);
    out
}

/// Decision records of any model. ZeroR has none — its single majority rule
/// is counted by [`count_decision_nodes`] but has no tree node behind it.
pub fn decision_records(model: &TrainedModel) -> Vec<DecisionNodeRecord> {
    let mut out = Vec::new();
    if let Some(root) = model.root() {
        collect_records(root, &mut out);
    }
    out
}

/// Number of decision nodes: labeled tree nodes, or 1 for ZeroR's single
/// majority rule.
pub fn count_decision_nodes(model: &TrainedModel) -> usize {
    match model {
        TrainedModel::Baseline(b) if b.variant == BaselineVariant::ZeroR => 1,
        other => decision_records(other).len(),
    }
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

pub(crate) fn esc(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            _ => out.push(c),
        }
    }
    out
}

/// 12 significant digits; enough that a parse/render cycle is a fixed point.
pub(crate) fn fmt_fraction(value: f64) -> String {
    format!("{value:.11e}")
}

fn write_node(out: &mut String, node: &BehavNode, id: u64) {
    let _ = writeln!(out, "\n[[nodes]]");
    let _ = writeln!(out, "id = {id}");
    let _ = writeln!(out, "kind = \"{}\"", node.kind.as_str());
    if let Some(label) = &node.label {
        let _ = writeln!(out, "label = \"{}\"", esc(label));
    }
    let _ = writeln!(out, "confidence = {}", fmt_fraction(node.confidence));
    let _ = writeln!(out, "support = {}", node.support);
    if node.forced {
        let _ = writeln!(out, "forced = true");
    }
    if let Some(attr) = &node.split_attribute {
        let _ = writeln!(out, "split_attribute = \"{}\"", esc(attr));
    }
    if !node.branches.is_empty() {
        // children are numbered pre-order: first child right after the
        // parent, each next child after the previous child's subtree
        let _ = writeln!(out, "\n[nodes.branches]");
        let mut child_id = id + 1;
        for (value, child) in &node.branches {
            let _ = writeln!(out, "\"{}\" = {}", esc(value), child_id);
            child_id += child.size() as u64;
        }
        let mut child_id = id + 1;
        for child in node.branches.values() {
            write_node(out, child, child_id);
            child_id += child.size() as u64;
        }
    }
}

/// Renders the canonical model document. Output is deterministic and
/// re-serializing a just-deserialized model reproduces it byte for byte.
pub fn serialize(model: &TrainedModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "version = {MODEL_FORMAT_VERSION}");
    let _ = writeln!(out, "model = \"{}\"", model.kind_token());
    let _ = writeln!(out, "majority_label = \"{}\"", esc(model.majority_label()));

    let schema = model.schema();
    let _ = writeln!(out, "\n[schema]");
    let _ = writeln!(out, "class_attribute = \"{}\"", esc(&schema.class_attribute));
    for attr in &schema.attributes {
        let _ = writeln!(out, "\n[[schema.attribute]]");
        let _ = writeln!(out, "name = \"{}\"", esc(&attr.name));
        if let Some(domain) = &attr.domain {
            let values: Vec<String> = domain.iter().map(|v| format!("\"{}\"", esc(v))).collect();
            let _ = writeln!(out, "values = [{}]", values.join(", "));
        }
    }

    if let TrainedModel::BehavDt(tree) = model {
        let _ = writeln!(out, "\n[config]");
        let _ = writeln!(
            out,
            "confidence_threshold = {}",
            fmt_fraction(tree.config.confidence_threshold)
        );
        let _ = writeln!(
            out,
            "exception_policy = \"{}\"",
            tree.config.exception_policy.as_str()
        );
        if let Some(depth) = tree.config.max_depth {
            let _ = writeln!(out, "max_depth = {depth}");
        }
    }

    if let Some(root) = model.root() {
        write_node(&mut out, root, 0);
    }
    out
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    #[allow(dead_code)] // checked before typed decoding
    version: i64,
    model: String,
    majority_label: String,
    schema: SchemaDoc,
    config: Option<ConfigDoc>,
    #[serde(default)]
    nodes: Vec<NodeDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemaDoc {
    class_attribute: String,
    #[serde(rename = "attribute", default)]
    attributes: Vec<AttrDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AttrDoc {
    name: String,
    values: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDoc {
    confidence_threshold: f64,
    exception_policy: String,
    max_depth: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    id: u64,
    kind: String,
    label: Option<String>,
    confidence: f64,
    support: u64,
    #[serde(default)]
    forced: bool,
    split_attribute: Option<String>,
    #[serde(default)]
    branches: BTreeMap<String, u64>,
}

fn structure_err(message: impl Into<String>) -> Error {
    Error::ModelStructure(message.into())
}

fn rebuild_node(
    docs: &[NodeDoc],
    idx: usize,
    schema: &ContextSchema,
    path: &[(String, String)],
    used: &mut Vec<String>,
) -> Result<BehavNode> {
    let doc = &docs[idx];
    let kind = match doc.kind.as_str() {
        "root" => NodeKind::Root,
        "interior" => NodeKind::Interior,
        "leaf" => NodeKind::Leaf,
        other => return Err(structure_err(format!("node {idx}: unknown kind `{other}`"))),
    };
    if (idx == 0) != (kind == NodeKind::Root) {
        return Err(structure_err(format!(
            "node {idx}: kind `{}` is only valid for node 0",
            doc.kind
        )));
    }
    if kind == NodeKind::Interior && doc.branches.is_empty() {
        return Err(structure_err(format!("node {idx}: interior node without branches")));
    }
    if kind == NodeKind::Leaf && !doc.branches.is_empty() {
        return Err(structure_err(format!("node {idx}: leaf node with branches")));
    }
    if !(0.0..=1.0).contains(&doc.confidence) {
        return Err(structure_err(format!(
            "node {idx}: confidence {} is outside [0, 1]",
            doc.confidence
        )));
    }
    if doc.label.is_none() && doc.branches.is_empty() {
        return Err(structure_err(format!(
            "node {idx}: unlabeled node without branches can never decide"
        )));
    }
    match (&doc.split_attribute, doc.branches.is_empty()) {
        (Some(_), true) => {
            return Err(structure_err(format!(
                "node {idx}: split_attribute without branches"
            )))
        }
        (None, false) => {
            return Err(structure_err(format!(
                "node {idx}: branches without split_attribute"
            )))
        }
        _ => {}
    }

    let mut branches = BTreeMap::new();
    if let Some(attr) = &doc.split_attribute {
        if schema.attribute_index(attr).is_none() {
            return Err(structure_err(format!(
                "node {idx}: split attribute `{attr}` is not in the schema"
            )));
        }
        if used.contains(attr) {
            return Err(structure_err(format!(
                "node {idx}: attribute `{attr}` repeats on its path"
            )));
        }
        used.push(attr.clone());
        for (value, &target) in &doc.branches {
            let mut child_path = path.to_vec();
            child_path.push((attr.clone(), value.clone()));
            branches.insert(
                value.clone(),
                rebuild_node(docs, target as usize, schema, &child_path, used)?,
            );
        }
        used.pop();
    }

    Ok(BehavNode {
        id: doc.id,
        kind,
        label: doc.label.clone(),
        confidence: doc.confidence,
        support: doc.support,
        forced: doc.forced,
        split_attribute: doc.split_attribute.clone(),
        branches,
        context_path: path.to_vec(),
    })
}

fn rebuild_tree(docs: &[NodeDoc], schema: &ContextSchema) -> Result<BehavNode> {
    for (i, doc) in docs.iter().enumerate() {
        if doc.id != i as u64 {
            return Err(structure_err(format!(
                "node at position {i} carries id {}; ids must equal array positions",
                doc.id
            )));
        }
    }
    let mut referenced = vec![0usize; docs.len()];
    for doc in docs {
        for (value, &target) in &doc.branches {
            if target as usize >= docs.len() {
                return Err(structure_err(format!(
                    "node {}: branch `{value}` points at missing node {target}",
                    doc.id
                )));
            }
            if target <= doc.id {
                return Err(structure_err(format!(
                    "node {}: branch `{value}` points backward to node {target}",
                    doc.id
                )));
            }
            referenced[target as usize] += 1;
        }
    }
    if referenced[0] != 0 {
        return Err(structure_err("the root must not be a branch target"));
    }
    for (i, &count) in referenced.iter().enumerate().skip(1) {
        if count != 1 {
            return Err(structure_err(format!(
                "node {i} is referenced {count} times; every non-root node needs exactly one parent"
            )));
        }
    }
    rebuild_node(docs, 0, schema, &[], &mut Vec::new())
}

/// Parses a model document, checking the version before anything else so
/// documents from future formats fail with a version error rather than a
/// parse error.
pub fn deserialize(text: &str) -> Result<TrainedModel> {
    let value: toml::Value = toml::from_str(text)?;
    let version = value
        .get("version")
        .ok_or_else(|| structure_err("missing `version` field"))?
        .as_integer()
        .ok_or_else(|| structure_err("`version` must be an integer"))?;
    if version != MODEL_FORMAT_VERSION {
        return Err(Error::ModelVersion {
            found: version,
            supported: MODEL_FORMAT_VERSION,
        });
    }
    let doc: ModelDoc = value.try_into()?;

    let attributes = doc
        .schema
        .attributes
        .into_iter()
        .map(|a| Attribute {
            name: a.name,
            domain: a.values.map(|v| v.into_iter().collect()),
        })
        .collect();
    let schema = ContextSchema::new(attributes, doc.schema.class_attribute)?;
    if doc.majority_label.is_empty() {
        return Err(structure_err("empty majority_label"));
    }

    match doc.model.as_str() {
        "behavdt" => {
            let config_doc = doc
                .config
                .ok_or_else(|| structure_err("behavdt model requires a [config] table"))?;
            let policy = ExceptionPolicy::parse(&config_doc.exception_policy).ok_or_else(|| {
                structure_err(format!(
                    "unknown exception policy `{}`",
                    config_doc.exception_policy
                ))
            })?;
            let config = LearnerConfig {
                confidence_threshold: config_doc.confidence_threshold,
                exception_policy: policy,
                max_depth: config_doc.max_depth,
            };
            config
                .validate()
                .map_err(|e| structure_err(e.to_string()))?;
            if doc.nodes.is_empty() {
                return Err(structure_err("behavdt model carries no nodes"));
            }
            let root = rebuild_tree(&doc.nodes, &schema)?;
            Ok(TrainedModel::BehavDt(BehavTree {
                root,
                schema,
                config,
                majority_label: doc.majority_label,
            }))
        }
        "traditional-dt" => {
            if doc.config.is_some() {
                return Err(structure_err("traditional-dt models carry no [config]"));
            }
            if doc.nodes.is_empty() {
                return Err(structure_err("traditional-dt model carries no nodes"));
            }
            let root = rebuild_tree(&doc.nodes, &schema)?;
            Ok(TrainedModel::Baseline(BaselineModel {
                variant: BaselineVariant::TraditionalDt,
                tree: Some(root),
                schema,
                majority_label: doc.majority_label,
            }))
        }
        "zero-r" => {
            if doc.config.is_some() {
                return Err(structure_err("zero-r models carry no [config]"));
            }
            if !doc.nodes.is_empty() {
                return Err(structure_err("zero-r models carry no nodes"));
            }
            Ok(TrainedModel::Baseline(BaselineModel {
                variant: BaselineVariant::ZeroR,
                tree: None,
                schema,
                majority_label: doc.majority_label,
            }))
        }
        other => Err(structure_err(format!("unknown model kind `{other}`"))),
    }
}

// ---------------------------------------------------------------------------
// Human-readable exports
// ---------------------------------------------------------------------------

fn dot_escape(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}

/// DOT digraph with one graph node per tree node. Labeled nodes read
/// `label (confidence, support)`; routing nodes show the attribute they
/// dispatch on; edges carry branch values. ZeroR renders as its single
/// majority rule.
pub fn export_dot(model: &TrainedModel) -> String {
    let mut out = String::from("digraph behavdt {\n");
    let _ = writeln!(out, "  node [shape=box];");
    match model.root() {
        None => {
            let _ = writeln!(
                out,
                "  n0 [label=\"{} (majority)\"];",
                dot_escape(model.majority_label())
            );
        }
        Some(root) => {
            let mut stack = vec![root];
            while let Some(node) = stack.pop() {
                let text = match &node.label {
                    Some(label) => format!(
                        "{} ({:.3}, {})",
                        dot_escape(label),
                        node.confidence,
                        node.support
                    ),
                    None => format!(
                        "{}?",
                        dot_escape(node.split_attribute.as_deref().unwrap_or(""))
                    ),
                };
                let _ = writeln!(out, "  n{} [label=\"{}\"];", node.id, text);
                for (value, child) in &node.branches {
                    let _ = writeln!(
                        out,
                        "  n{} -> n{} [label=\"{}\"];",
                        node.id,
                        child.id,
                        dot_escape(value)
                    );
                    stack.push(child);
                }
            }
        }
    }
    out.push_str("}\n");
    out
}

/// One `IF ... THEN ...` line per decision node, in extraction order. An
/// empty condition renders as `IF TRUE`. ZeroR emits its single majority
/// rule.
pub fn export_rules(model: &TrainedModel) -> String {
    if model.root().is_none() {
        return format!(
            "IF TRUE THEN {} [type=majority]\n",
            model.majority_label()
        );
    }
    let mut out = String::new();
    let mut nodes = Vec::new();
    if let Some(root) = model.root() {
        collect_rule_nodes(root, &mut nodes);
    }
    for node in nodes {
        let condition = if node.context_path.is_empty() {
            "TRUE".to_owned()
        } else {
            node.context_path
                .iter()
                .map(|(attr, value)| format!("{attr}={value}"))
                .collect::<Vec<_>>()
                .join(" AND ")
        };
        let node_type = if node.branches.is_empty() {
            NodeType::Leaf
        } else {
            NodeType::Interior
        };
        let _ = writeln!(
            out,
            "IF {condition} THEN {} [conf={:.3}, sup={}, type={}]",
            node.label.as_deref().expect("labeled"),
            node.confidence,
            node.support,
            node_type.as_str()
        );
    }
    out
}

fn collect_rule_nodes<'a>(node: &'a BehavNode, out: &mut Vec<&'a BehavNode>) {
    if node.is_labeled() {
        out.push(node);
    }
    for child in node.branches.values() {
        collect_rule_nodes(child, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::{build_traditional_dt, build_zero_r};
    use crate::dataset::{generate_synthetic, Dataset, Instance, PlantedRule, PlantedTreeSpec};
    use crate::learner::build_tree;

    fn single_attr_dataset(rows: &[(&str, &str)]) -> Dataset {
        let schema = ContextSchema::new(vec![Attribute::new("relationship")], "action").unwrap();
        let instances = rows.iter().map(|(v, l)| Instance::new([*v], *l)).collect();
        Dataset::new(schema, instances).unwrap()
    }

    fn meeting_dataset() -> Dataset {
        let mut rows = Vec::new();
        for value in ["friend", "colleague", "xyz", "boss", "unknown"] {
            for _ in 0..10 {
                rows.push((value, if value == "boss" { "Answer" } else { "Decline" }));
            }
        }
        single_attr_dataset(&rows)
    }

    fn meeting_model() -> TrainedModel {
        build_tree(&meeting_dataset(), &LearnerConfig::default())
            .unwrap()
            .into()
    }

    fn values(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn predict_uses_the_deepest_labeled_node() {
        let model = meeting_model();
        let boss = predict(&model, &values(&["boss"])).unwrap();
        assert_eq!(boss.label, "Answer");
        assert_eq!(boss.source_node, Some(1));
        assert_eq!(boss.depth, 1);
        assert!(!boss.fallback_used);

        // friend is a subsumed branch: the generalized root answers
        let friend = predict(&model, &values(&["friend"])).unwrap();
        assert_eq!(friend.label, "Decline");
        assert_eq!(friend.source_node, Some(0));
        assert_eq!(friend.depth, 0);
        assert!(!friend.fallback_used);

        // unseen value: root is labeled, so no fallback
        let alien = predict(&model, &values(&["alien"])).unwrap();
        assert_eq!(alien.label, "Decline");
        assert!(!alien.fallback_used);
    }

    #[test]
    fn predict_falls_back_when_no_labeled_node_is_met() {
        // traditional tree: unlabeled root, so an unseen value falls through
        let model: TrainedModel = build_traditional_dt(&meeting_dataset()).unwrap().into();
        let alien = predict(&model, &values(&["alien"])).unwrap();
        assert_eq!(alien.label, "Decline");
        assert_eq!(alien.source_node, None);
        assert_eq!(alien.depth, 0);
        assert!(alien.fallback_used);
    }

    #[test]
    fn predict_checks_instance_arity() {
        let model = meeting_model();
        assert!(matches!(
            predict(&model, &values(&["boss", "extra"])),
            Err(Error::InstanceArity {
                expected: 1,
                found: 2
            })
        ));
    }

    #[test]
    fn zero_r_always_answers_the_majority() {
        let model: TrainedModel = build_zero_r(&meeting_dataset()).unwrap().into();
        let p = predict(&model, &values(&["boss"])).unwrap();
        assert_eq!(p.label, "Decline");
        assert_eq!(p.source_node, None);
        assert!(p.fallback_used);
    }

    #[test]
    fn extraction_contrasts_generalized_and_traditional_trees() {
        let behav = meeting_model();
        let records = decision_records(&behav);
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].node_type, NodeType::Interior);
        assert_eq!(records[0].behavior, "Decline");
        assert!(records[0].associated_contexts.is_empty());
        assert_eq!(records[1].node_type, NodeType::Leaf);
        assert_eq!(records[1].behavior, "Answer");
        assert_eq!(records[1].associated_contexts, vec!["boss".to_owned()]);

        let traditional: TrainedModel = build_traditional_dt(&meeting_dataset()).unwrap().into();
        let records = decision_records(&traditional);
        assert_eq!(records.len(), 5);
        assert!(records.iter().all(|r| r.node_type == NodeType::Leaf));

        assert_eq!(count_decision_nodes(&behav), 2);
        assert_eq!(count_decision_nodes(&traditional), 5);
        let zero: TrainedModel = build_zero_r(&meeting_dataset()).unwrap().into();
        assert_eq!(count_decision_nodes(&zero), 1);
    }

    #[test]
    fn single_labeled_node_extracts_one_record() {
        let ds = single_attr_dataset(&[("a", "X"), ("b", "X")]);
        let tree = build_tree(&ds, &LearnerConfig::default()).unwrap();
        let records = extract_decision_nodes(&tree);
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].node_type, NodeType::Leaf);
        assert_eq!(records[0].node_id, 0);
    }

    fn noisy_model(seed: u64) -> TrainedModel {
        let schema = ContextSchema::new(
            vec![
                Attribute::with_domain("situation", ["meeting", "office", "outside"]),
                Attribute::with_domain("relation", ["boss", "friend", "mother"]),
                Attribute::with_domain("time", ["day", "night"]),
            ],
            "action",
        )
        .unwrap();
        let spec = PlantedTreeSpec {
            schema,
            rules: vec![
                PlantedRule {
                    when: BTreeMap::from([("situation".to_owned(), "meeting".to_owned())]),
                    label: "Decline".to_owned(),
                },
                PlantedRule {
                    when: BTreeMap::from([("relation".to_owned(), "mother".to_owned())]),
                    label: "Answer".to_owned(),
                },
            ],
            default_label: "Ignore".to_owned(),
            noise_rate: 0.08,
            instance_count: 400,
            seed,
        };
        let ds = generate_synthetic(&spec).unwrap();
        build_tree(&ds, &LearnerConfig::with_threshold(0.85))
            .unwrap()
            .into()
    }

    fn assert_same_rendering(a: &TrainedModel, b: &TrainedModel) {
        assert_eq!(serialize(a), serialize(b));
    }

    #[test]
    fn serialization_round_trips_structurally() {
        for model in [
            meeting_model(),
            noisy_model(5),
            build_traditional_dt(&meeting_dataset()).unwrap().into(),
            build_zero_r(&meeting_dataset()).unwrap().into(),
        ] {
            let text = serialize(&model);
            let back = deserialize(&text).unwrap();
            // byte-stable re-rendering implies equality at the documented
            // 12-significant-digit precision
            assert_same_rendering(&model, &back);
            assert_eq!(back.kind_token(), model.kind_token());
            assert_eq!(back.schema(), model.schema());
            assert_eq!(back.majority_label(), model.majority_label());
        }
    }

    #[test]
    fn round_trip_preserves_predictions() {
        let model = noisy_model(6);
        let back = deserialize(&serialize(&model)).unwrap();
        let schema = model.schema();
        let situations = ["meeting", "office", "outside", "unseen"];
        let relations = ["boss", "friend", "mother", "stranger"];
        let times = ["day", "night"];
        assert_eq!(schema.len(), 3);
        for s in situations {
            for r in relations {
                for t in times {
                    let vals = values(&[s, r, t]);
                    assert_eq!(
                        predict(&model, &vals).unwrap(),
                        predict(&back, &vals).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn confidences_serialize_with_twelve_significant_digits() {
        let model = meeting_model();
        let text = serialize(&model);
        assert!(
            text.contains("confidence = 8.00000000000e-1"),
            "{text}"
        );
        assert!(text.contains("confidence_threshold = 8.00000000000e-1"));
    }

    #[test]
    fn unknown_version_is_a_version_error_not_a_parse_error() {
        let mut text = serialize(&meeting_model());
        text = text.replace("version = 1", "version = 9");
        match deserialize(&text) {
            Err(Error::ModelVersion { found, supported }) => {
                assert_eq!(found, 9);
                assert_eq!(supported, 1);
            }
            other => panic!("unexpected: {other:?}"),
        }

        let missing = serialize(&meeting_model()).replace("version = 1\n", "");
        assert!(matches!(
            deserialize(&missing),
            Err(Error::ModelStructure(_))
        ));
    }

    #[test]
    fn hand_written_minimal_document_loads_and_predicts() {
        let text = r#"
version = 1
model = "behavdt"
majority_label = "Decline"

[schema]
class_attribute = "action"

[[schema.attribute]]
name = "relationship"

[config]
confidence_threshold = 0.8
exception_policy = "majority-deviation"

[[nodes]]
id = 0
kind = "root"
label = "Decline"
confidence = 0.8
support = 10
split_attribute = "relationship"

[nodes.branches]
boss = 1

[[nodes]]
id = 1
kind = "leaf"
label = "Answer"
confidence = 1.0
support = 2
"#;
        let model = deserialize(text).unwrap();
        let p = predict(&model, &values(&["boss"])).unwrap();
        assert_eq!(p.label, "Answer");
        assert_eq!(p.source_node, Some(1));
        let p = predict(&model, &values(&["mother"])).unwrap();
        assert_eq!(p.label, "Decline");
    }

    #[test]
    fn malformed_documents_are_rejected_with_structure_errors() {
        let good = serialize(&meeting_model());

        let backward = good.replace("\"boss\" = 1", "\"boss\" = 0");
        assert!(matches!(
            deserialize(&backward),
            Err(Error::ModelStructure(_))
        ));

        let dangling = good.replace("\"boss\" = 1", "\"boss\" = 7");
        assert!(matches!(
            deserialize(&dangling),
            Err(Error::ModelStructure(_))
        ));

        let id_mismatch = good.replace("id = 1", "id = 3");
        assert!(matches!(
            deserialize(&id_mismatch),
            Err(Error::ModelStructure(_))
        ));

        let unknown_attr = good.replace(
            "split_attribute = \"relationship\"",
            "split_attribute = \"nonexistent\"",
        );
        assert!(matches!(
            deserialize(&unknown_attr),
            Err(Error::ModelStructure(_))
        ));

        let not_toml = "version = ";
        assert!(matches!(deserialize(not_toml), Err(Error::ModelParse(_))));
    }

    #[test]
    fn rules_export_matches_the_documented_shape() {
        let model = meeting_model();
        let rules = export_rules(&model);
        let lines: Vec<&str> = rules.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "IF TRUE THEN Decline [conf=0.800, sup=50, type=interior]");
        assert_eq!(
            lines[1],
            "IF relationship=boss THEN Answer [conf=1.000, sup=10, type=leaf]"
        );

        let zero: TrainedModel = build_zero_r(&meeting_dataset()).unwrap().into();
        assert_eq!(export_rules(&zero), "IF TRUE THEN Decline [type=majority]\n");
    }

    #[test]
    fn dot_export_has_one_graph_node_per_tree_node() {
        let model = noisy_model(7);
        let dot = export_dot(&model);
        assert!(dot.starts_with("digraph behavdt {"));
        let tree_size = model.root().unwrap().size();
        let node_lines = dot.lines().filter(|l| l.contains("[label=") && !l.contains("->")).count();
        assert_eq!(node_lines, tree_size);
        let edge_lines = dot.lines().filter(|l| l.contains("->")).count();
        assert_eq!(edge_lines, tree_size - 1);
    }
}
