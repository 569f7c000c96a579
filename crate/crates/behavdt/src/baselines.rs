//! Comparator models: an ID3-style traditional decision tree and the ZeroR
//! majority-class floor.

use crate::dataset::{ContextSchema, Dataset};
use crate::error::{Error, Result};
use crate::learner::{grow_root, BehavNode, CodedData, GrowMode};
use crate::metrics::{dominant_behavior, ClassDistribution};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineVariant {
    TraditionalDt,
    ZeroR,
}

impl BaselineVariant {
    pub fn as_str(&self) -> &'static str {
        match self {
            BaselineVariant::TraditionalDt => "traditional-dt",
            BaselineVariant::ZeroR => "zero-r",
        }
    }
}

/// A trained baseline. The traditional tree reuses [`BehavNode`] with labels
/// on leaves only; ZeroR carries no tree at all.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineModel {
    pub variant: BaselineVariant,
    pub tree: Option<BehavNode>,
    pub schema: ContextSchema,
    pub majority_label: String,
}

/// Top-down ID3-style induction: split on the best attribute at every impure
/// node, one branch per present value, leaves on purity or attribute
/// exhaustion. Tie-breaking matches the BehavDT learner exactly.
pub fn build_traditional_dt(train: &Dataset) -> Result<BaselineModel> {
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if train.schema.is_empty() {
        return Err(Error::Schema("dataset has no context attributes".into()));
    }
    let data = CodedData::from_dataset(train);
    let root = grow_root(&data, &GrowMode::Traditional);
    Ok(BaselineModel {
        variant: BaselineVariant::TraditionalDt,
        tree: Some(root),
        schema: train.schema.clone(),
        majority_label: data.majority_label(),
    })
}

/// Majority-class predictor (ties break to the lexicographically smallest
/// label). Works even on datasets with zero context attributes.
pub fn build_zero_r(train: &Dataset) -> Result<BaselineModel> {
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let dist = ClassDistribution::from_labels(train.instances.iter().map(|i| i.label.as_str()));
    let (majority_label, _) = dominant_behavior(&dist)?;
    Ok(BaselineModel {
        variant: BaselineVariant::ZeroR,
        tree: None,
        schema: train.schema.clone(),
        majority_label,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Attribute, Instance};

    fn single_attr_dataset(rows: &[(&str, &str)]) -> Dataset {
        let schema = ContextSchema::new(vec![Attribute::new("relationship")], "action").unwrap();
        let instances = rows.iter().map(|(v, l)| Instance::new([*v], *l)).collect();
        Dataset::new(schema, instances).unwrap()
    }

    fn walk<'a>(node: &'a BehavNode, out: &mut Vec<&'a BehavNode>) {
        out.push(node);
        for child in node.branches.values() {
            walk(child, out);
        }
    }

    #[test]
    fn traditional_dt_grows_one_leaf_per_relationship() {
        let mut rows = Vec::new();
        for value in ["friend", "colleague", "xyz", "boss", "unknown"] {
            for _ in 0..10 {
                rows.push((value, if value == "boss" { "Answer" } else { "Decline" }));
            }
        }
        let model = build_traditional_dt(&single_attr_dataset(&rows)).unwrap();
        let root = model.tree.as_ref().unwrap();
        assert!(root.label.is_none());
        assert_eq!(root.split_attribute.as_deref(), Some("relationship"));
        assert_eq!(root.branches.len(), 5);
        let mut nodes = Vec::new();
        walk(root, &mut nodes);
        let labeled: Vec<_> = nodes.iter().filter(|n| n.is_labeled()).collect();
        assert_eq!(labeled.len(), 5);
        assert!(labeled.iter().all(|n| n.branches.is_empty()));
        assert_eq!(root.branches["boss"].label.as_deref(), Some("Answer"));
    }

    #[test]
    fn traditional_dt_on_pure_data_is_a_single_leaf() {
        let model =
            build_traditional_dt(&single_attr_dataset(&[("a", "X"), ("b", "X")])).unwrap();
        let root = model.tree.as_ref().unwrap();
        assert_eq!(root.label.as_deref(), Some("X"));
        assert!(root.branches.is_empty());
        assert_eq!(root.size(), 1);
    }

    #[test]
    fn traditional_dt_labels_leaves_only() {
        let rows: Vec<(&str, &str)> = vec![
            ("a", "X"),
            ("a", "Y"),
            ("b", "X"),
            ("b", "X"),
            ("c", "Y"),
        ];
        let model = build_traditional_dt(&single_attr_dataset(&rows)).unwrap();
        let mut nodes = Vec::new();
        walk(model.tree.as_ref().unwrap(), &mut nodes);
        for node in nodes {
            if node.is_labeled() {
                assert!(node.branches.is_empty());
            } else {
                assert!(!node.branches.is_empty());
            }
        }
    }

    #[test]
    fn zero_r_stores_the_majority_with_lexicographic_ties() {
        let mut rows = vec![("x", "Decline"); 6];
        rows.extend(vec![("x", "Answer"); 4]);
        let model = build_zero_r(&single_attr_dataset(&rows)).unwrap();
        assert_eq!(model.majority_label, "Decline");
        assert!(model.tree.is_none());

        let tied = single_attr_dataset(&[("x", "B"), ("x", "A"), ("y", "A"), ("y", "B")]);
        assert_eq!(build_zero_r(&tied).unwrap().majority_label, "A");

        let pure = single_attr_dataset(&[("x", "Only")]);
        assert_eq!(build_zero_r(&pure).unwrap().majority_label, "Only");
    }

    #[test]
    fn baselines_reject_empty_training_data() {
        let empty = Dataset::new(
            ContextSchema::new(vec![Attribute::new("a")], "label").unwrap(),
            vec![],
        )
        .unwrap();
        assert!(build_traditional_dt(&empty).is_err());
        assert!(build_zero_r(&empty).is_err());
    }
}
