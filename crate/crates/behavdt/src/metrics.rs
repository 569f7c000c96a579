//! Information-theoretic attribute scoring and behavior-distribution
//! statistics shared by every learner.

use std::collections::BTreeMap;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Gains closer than this are ties; the earliest attribute in schema order
/// wins. Absolute tolerance so orderings don't depend on platform rounding.
pub const GAIN_TIE_TOLERANCE: f64 = 1e-12;

/// Occurrence counts of behavior classes within some subset of instances.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClassDistribution {
    counts: BTreeMap<String, u64>,
    total: u64,
}

impl ClassDistribution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_counts(counts: BTreeMap<String, u64>) -> Self {
        let total = counts.values().sum();
        ClassDistribution { counts, total }
    }

    pub fn from_labels<'a, I>(labels: I) -> Self
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut dist = Self::new();
        for label in labels {
            dist.add(label);
        }
        dist
    }

    pub fn add(&mut self, class: &str) {
        *self.counts.entry(class.to_owned()).or_insert(0) += 1;
        self.total += 1;
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Number of classes with a nonzero count.
    pub fn distinct(&self) -> usize {
        self.counts.values().filter(|&&c| c > 0).count()
    }
}

/// An attribute's information gain on some subset, in bits.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeScore {
    pub attribute: String,
    pub gain: f64,
}

/// Shannon entropy over raw counts; the shared core under both the public
/// entry points and the integer-coded tree builders.
pub(crate) fn entropy_from_counts<I>(counts: I, total: u64) -> f64
where
    I: IntoIterator<Item = u64>,
{
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    counts
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / t;
            -p * p.log2()
        })
        .sum()
}

/// Shannon entropy of a class distribution in bits, with 0·log2(0) = 0.
/// An empty distribution has entropy 0.
pub fn entropy(dist: &ClassDistribution) -> f64 {
    entropy_from_counts(dist.counts.values().copied(), dist.total)
}

/// Information gain of splitting `subset` by `attribute`: H(S) minus the
/// size-weighted entropy of the value-induced partition. Gain is 0 on an
/// empty subset. Tiny negative values (within rounding of zero) are possible
/// and left unclamped.
pub fn information_gain(subset: &Dataset, attribute: &str) -> Result<AttributeScore> {
    let idx = subset
        .schema
        .attribute_index(attribute)
        .ok_or_else(|| Error::UnknownAttribute(attribute.to_owned()))?;
    let parent = ClassDistribution::from_labels(subset.instances.iter().map(|i| i.label.as_str()));
    let mut cells: BTreeMap<&str, ClassDistribution> = BTreeMap::new();
    for inst in &subset.instances {
        cells
            .entry(inst.values[idx].as_str())
            .or_default()
            .add(&inst.label);
    }
    let total = parent.total() as f64;
    let mut gain = entropy(&parent);
    for cell in cells.values() {
        gain -= (cell.total() as f64 / total) * entropy(cell);
    }
    if parent.is_empty() {
        gain = 0.0;
    }
    Ok(AttributeScore {
        attribute: attribute.to_owned(),
        gain,
    })
}

/// The class with the most occurrences and its share of the total. Ties go
/// to the lexicographically smallest class token.
pub fn dominant_behavior(dist: &ClassDistribution) -> Result<(String, f64)> {
    if dist.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let mut best: Option<(&String, u64)> = None;
    for (class, &count) in dist.counts() {
        // strictly greater keeps the first (smallest) key on ties
        if best.is_none_or(|(_, c)| count > c) {
            best = Some((class, count));
        }
    }
    let (class, count) = best.expect("non-empty");
    Ok((class.clone(), count as f64 / dist.total() as f64))
}

/// The candidate with maximal information gain on `subset`; gains within
/// [`GAIN_TIE_TOLERANCE`] are tied and resolved toward the earliest schema
/// position.
pub fn best_attribute(subset: &Dataset, candidates: &[&str]) -> Result<String> {
    if candidates.is_empty() {
        return Err(Error::Config("no candidate attributes".into()));
    }
    if subset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut ordered: Vec<(usize, &str)> = candidates
        .iter()
        .map(|&name| {
            subset
                .schema
                .attribute_index(name)
                .map(|idx| (idx, name))
                .ok_or_else(|| Error::UnknownAttribute(name.to_owned()))
        })
        .collect::<Result<_>>()?;
    ordered.sort_unstable();
    ordered.dedup();

    let mut best: Option<(&str, f64)> = None;
    for (_, name) in ordered {
        let score = information_gain(subset, name)?;
        if best.is_none_or(|(_, g)| score.gain > g + GAIN_TIE_TOLERANCE) {
            best = Some((name, score.gain));
        }
    }
    Ok(best.expect("candidates non-empty").0.to_owned())
}
