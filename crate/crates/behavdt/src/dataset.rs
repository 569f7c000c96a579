//! Dataset ingestion, preprocessing, synthesis, and k-fold partitioning.
//!
//! Everything downstream (learners, evaluation, the CLI) consumes the
//! [`Dataset`] type defined here: an ordered categorical schema plus a list
//! of labeled instances. All randomized operations take an explicit seed and
//! are deterministic; the generator is pinned in FORMATS.md so datasets and
//! folds reproduce across implementations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::rng::XorShift64Star;

/// Token substituted for empty CSV cells. Treated as an ordinary category
/// value throughout learning, never as a special case.
pub const MISSING: &str = "?";

/// One context attribute: a name plus an optional declared value domain.
///
/// A declared domain is required for synthetic generation and enforced on
/// CSV ingestion when a schema hint is supplied; inferred schemas carry the
/// observed value set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub domain: Option<BTreeSet<String>>,
}

impl Attribute {
    pub fn new(name: impl Into<String>) -> Self {
        Attribute {
            name: name.into(),
            domain: None,
        }
    }

    pub fn with_domain<I, S>(name: impl Into<String>, values: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Attribute {
            name: name.into(),
            domain: Some(values.into_iter().map(Into::into).collect()),
        }
    }
}

/// Ordered context attributes plus the name of the behavior-label column.
///
/// Attribute order is significant: it is the tie-break order for attribute
/// selection and the column order of the canonical CSV form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextSchema {
    pub attributes: Vec<Attribute>,
    pub class_attribute: String,
}

impl ContextSchema {
    pub fn new(attributes: Vec<Attribute>, class_attribute: impl Into<String>) -> Result<Self> {
        let class_attribute = class_attribute.into();
        if class_attribute.is_empty() {
            return Err(Error::Schema("class attribute name is empty".into()));
        }
        let mut seen = BTreeSet::new();
        for attr in &attributes {
            if attr.name.is_empty() {
                return Err(Error::Schema("attribute with empty name".into()));
            }
            if !seen.insert(attr.name.as_str()) {
                return Err(Error::Schema(format!(
                    "duplicate attribute name `{}`",
                    attr.name
                )));
            }
        }
        if seen.contains(class_attribute.as_str()) {
            return Err(Error::Schema(format!(
                "class attribute `{class_attribute}` collides with a context attribute"
            )));
        }
        Ok(ContextSchema {
            attributes,
            class_attribute,
        })
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }
}

/// One labeled observation: a category token per schema attribute plus the
/// behavior class.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Instance {
    pub values: Vec<String>,
    pub label: String,
}

impl Instance {
    pub fn new<I, S>(values: I, label: impl Into<String>) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Instance {
            values: values.into_iter().map(Into::into).collect(),
            label: label.into(),
        }
    }
}

/// A schema plus its instances. Duplicates are allowed and meaningful:
/// distributions are computed over occurrence counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub schema: ContextSchema,
    pub instances: Vec<Instance>,
}

impl Dataset {
    /// Validates that every instance matches the schema arity and carries a
    /// non-empty label.
    pub fn new(schema: ContextSchema, instances: Vec<Instance>) -> Result<Self> {
        let expected = schema.len();
        for inst in &instances {
            if inst.values.len() != expected {
                return Err(Error::InstanceArity {
                    expected,
                    found: inst.values.len(),
                });
            }
            if inst.label.is_empty() {
                return Err(Error::Schema("instance with empty label".into()));
            }
        }
        Ok(Dataset { schema, instances })
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }
}

// ---------------------------------------------------------------------------
// CSV ingestion
// ---------------------------------------------------------------------------

/// Loads a dataset from a comma-separated file with a header row.
///
/// Without a hint the class column is the last column and every attribute's
/// domain is the set of values observed in the file. With a hint the class
/// column is located by name, the remaining columns must match the hint's
/// attributes in order, and declared domains are enforced (the MISSING token
/// is always admitted). Empty cells become [`MISSING`].
pub fn load_csv(path: impl AsRef<Path>, schema_hint: Option<&ContextSchema>) -> Result<Dataset> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let file = std::fs::File::open(path).map_err(|e| Error::io(&display, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(io::BufReader::new(file));

    let mut records = reader.records();
    let header = match records.next() {
        Some(rec) => rec.map_err(|e| Error::Csv {
            path: display.clone(),
            source: e,
        })?,
        None => return Err(Error::EmptyFile { path: display }),
    };
    let header: Vec<String> = header.iter().map(str::to_owned).collect();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(Error::EmptyFile { path: display });
    }

    // Map each schema slot to its source column, and find the class column.
    let (class_col, ctx_cols): (usize, Vec<usize>) = match schema_hint {
        None => {
            let class_col = header.len() - 1;
            (class_col, (0..class_col).collect())
        }
        Some(hint) => {
            let class_col = header
                .iter()
                .position(|h| *h == hint.class_attribute)
                .ok_or_else(|| {
                    Error::Schema(format!(
                        "class attribute `{}` not found in header",
                        hint.class_attribute
                    ))
                })?;
            let ctx_cols: Vec<usize> = (0..header.len()).filter(|&i| i != class_col).collect();
            if ctx_cols.len() != hint.len() {
                return Err(Error::Schema(format!(
                    "header has {} context columns but the schema defines {}",
                    ctx_cols.len(),
                    hint.len()
                )));
            }
            for (slot, &col) in ctx_cols.iter().enumerate() {
                if header[col] != hint.attributes[slot].name {
                    return Err(Error::Schema(format!(
                        "header column `{}` does not match schema attribute `{}`",
                        header[col], hint.attributes[slot].name
                    )));
                }
            }
            (class_col, ctx_cols)
        }
    };

    let mut instances = Vec::new();
    let mut observed: Vec<BTreeSet<String>> = vec![BTreeSet::new(); ctx_cols.len()];
    for (idx, rec) in records.enumerate() {
        let row = idx as u64 + 1; // 1-based over data rows
        let rec = rec.map_err(|e| Error::Csv {
            path: display.clone(),
            source: e,
        })?;
        if rec.len() != header.len() {
            return Err(Error::RowArity {
                row,
                expected: header.len(),
                found: rec.len(),
            });
        }
        let mut values = Vec::with_capacity(ctx_cols.len());
        for (slot, &col) in ctx_cols.iter().enumerate() {
            let cell = rec.get(col).unwrap_or("");
            let value = if cell.is_empty() { MISSING } else { cell };
            if let Some(hint) = schema_hint {
                if let Some(domain) = &hint.attributes[slot].domain {
                    if value != MISSING && !domain.contains(value) {
                        return Err(Error::RowValue {
                            row,
                            message: format!(
                                "value `{value}` is not in the declared domain of `{}`",
                                hint.attributes[slot].name
                            ),
                        });
                    }
                }
            }
            observed[slot].insert(value.to_owned());
            values.push(value.to_owned());
        }
        let label = rec.get(class_col).unwrap_or("");
        if label.is_empty() {
            return Err(Error::RowValue {
                row,
                message: "empty class label".into(),
            });
        }
        instances.push(Instance {
            values,
            label: label.to_owned(),
        });
    }

    let schema = match schema_hint {
        Some(hint) => hint.clone(),
        None => {
            let attributes = ctx_cols
                .iter()
                .zip(observed)
                .map(|(&col, domain)| Attribute {
                    name: header[col].clone(),
                    domain: Some(domain),
                })
                .collect();
            ContextSchema::new(attributes, header[class_col].clone())?
        }
    };
    Dataset::new(schema, instances)
}

/// Writes the canonical CSV form: context attributes in schema order, class
/// column last, MISSING rendered as an empty cell.
pub fn write_csv<W: io::Write>(dataset: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let wrap = |e: csv::Error| Error::Csv {
        path: "<writer>".into(),
        source: e,
    };
    let mut header: Vec<&str> = dataset
        .schema
        .attributes
        .iter()
        .map(|a| a.name.as_str())
        .collect();
    header.push(dataset.schema.class_attribute.as_str());
    w.write_record(&header).map_err(wrap)?;
    for inst in &dataset.instances {
        let mut rec: Vec<&str> = inst
            .values
            .iter()
            .map(|v| if v == MISSING { "" } else { v.as_str() })
            .collect();
        rec.push(inst.label.as_str());
        w.write_record(&rec).map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::io("<writer>", e))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Raw-log discretization
// ---------------------------------------------------------------------------

/// One row of a raw context log: `timestamp,contact_id,location,label` with
/// Unix-seconds timestamps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawLogRow {
    pub timestamp: i64,
    pub contact_id: String,
    pub location: String,
    pub label: String,
}

/// Loads a raw context log CSV (header `timestamp,contact_id,location,label`).
pub fn load_raw_log(path: impl AsRef<Path>) -> Result<Vec<RawLogRow>> {
    const COLUMNS: [&str; 4] = ["timestamp", "contact_id", "location", "label"];
    let path = path.as_ref();
    let display = path.display().to_string();
    let file = std::fs::File::open(path).map_err(|e| Error::io(&display, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(io::BufReader::new(file));

    let mut records = reader.records();
    let header = match records.next() {
        Some(rec) => rec.map_err(|e| Error::Csv {
            path: display.clone(),
            source: e,
        })?,
        None => return Err(Error::EmptyFile { path: display }),
    };
    if header.iter().ne(COLUMNS) {
        return Err(Error::Schema(format!(
            "raw log header must be `{}`",
            COLUMNS.join(",")
        )));
    }

    let mut rows = Vec::new();
    for (idx, rec) in records.enumerate() {
        let row = idx as u64 + 1;
        let rec = rec.map_err(|e| Error::Csv {
            path: display.clone(),
            source: e,
        })?;
        if rec.len() != COLUMNS.len() {
            return Err(Error::RowArity {
                row,
                expected: COLUMNS.len(),
                found: rec.len(),
            });
        }
        let timestamp: i64 = rec[0].trim().parse().map_err(|_| Error::RowValue {
            row,
            message: format!("invalid timestamp `{}`", &rec[0]),
        })?;
        let label = &rec[3];
        if label.is_empty() {
            return Err(Error::RowValue {
                row,
                message: "empty class label".into(),
            });
        }
        let location = if rec[2].is_empty() { MISSING } else { &rec[2] };
        rows.push(RawLogRow {
            timestamp,
            contact_id: rec[1].to_owned(),
            location: location.to_owned(),
            label: label.to_owned(),
        });
    }
    Ok(rows)
}

/// A time-of-day bin: instances at or after `start_minute` (and before the
/// next bin's start) fall into it. The last bin wraps past midnight up to the
/// first bin's start.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimeBin {
    pub label: String,
    pub start_minute: u16,
}

impl TimeBin {
    pub fn new(label: impl Into<String>, start_minute: u16) -> Self {
        TimeBin {
            label: label.into(),
            start_minute,
        }
    }
}

/// Controls how raw log rows become categorical instances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscretizationConfig {
    pub time_bins: Vec<TimeBin>,
    pub include_weekday: bool,
    pub contact_map: BTreeMap<String, String>,
    /// Relationship token for contacts absent from `contact_map`.
    pub default_relationship: String,
    /// Fixed offset applied to timestamps before computing local time-of-day
    /// and weekday. No daylight-saving handling.
    pub utc_offset_minutes: i32,
}

impl DiscretizationConfig {
    pub fn new(
        time_bins: Vec<TimeBin>,
        include_weekday: bool,
        contact_map: BTreeMap<String, String>,
        default_relationship: impl Into<String>,
        utc_offset_minutes: i32,
    ) -> Result<Self> {
        let config = DiscretizationConfig {
            time_bins,
            include_weekday,
            contact_map,
            default_relationship: default_relationship.into(),
            utc_offset_minutes,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.time_bins.is_empty() {
            return Err(Error::Config("at least one time bin is required".into()));
        }
        let mut labels = BTreeSet::new();
        for bin in &self.time_bins {
            if bin.label.is_empty() {
                return Err(Error::Config("time bin with empty label".into()));
            }
            if bin.start_minute > 1439 {
                return Err(Error::Config(format!(
                    "time bin `{}` starts at minute {} (max 1439)",
                    bin.label, bin.start_minute
                )));
            }
            if !labels.insert(bin.label.as_str()) {
                return Err(Error::Config(format!(
                    "duplicate time bin label `{}`",
                    bin.label
                )));
            }
        }
        for pair in self.time_bins.windows(2) {
            if pair[1].start_minute <= pair[0].start_minute {
                return Err(Error::Config(
                    "time bin starts must be strictly increasing".into(),
                ));
            }
        }
        if self.default_relationship.is_empty() {
            return Err(Error::Config("default relationship is empty".into()));
        }
        Ok(())
    }

    fn segment(&self, timestamp: i64) -> String {
        // Unix epoch fell on a Thursday; weekday and minute-of-day both come
        // from plain euclidean arithmetic so pre-1970 timestamps work too.
        const WEEKDAYS: [&str; 7] = ["Thu", "Fri", "Sat", "Sun", "Mon", "Tue", "Wed"];
        let local = timestamp + i64::from(self.utc_offset_minutes) * 60;
        let minute = (local.rem_euclid(86_400) / 60) as u16;
        let bin = self
            .time_bins
            .iter()
            .rev()
            .find(|b| b.start_minute <= minute)
            // before the first start: the last bin wraps past midnight
            .unwrap_or_else(|| self.time_bins.last().expect("validated non-empty"));
        if self.include_weekday {
            let day = WEEKDAYS[local.div_euclid(86_400).rem_euclid(7) as usize];
            format!("{day}[{}]", bin.label)
        } else {
            bin.label.clone()
        }
    }
}

/// Turns raw log rows into a categorical dataset with attributes
/// `time_segment`, `relationship`, `location` and class `label`.
pub fn discretize(rows: &[RawLogRow], config: &DiscretizationConfig) -> Result<Dataset> {
    config.validate()?;
    let mut instances = Vec::with_capacity(rows.len());
    let mut domains: [BTreeSet<String>; 3] = Default::default();
    for row in rows {
        let segment = config.segment(row.timestamp);
        let relationship = config
            .contact_map
            .get(&row.contact_id)
            .cloned()
            .unwrap_or_else(|| config.default_relationship.clone());
        let values = vec![segment, relationship, row.location.clone()];
        for (slot, value) in values.iter().enumerate() {
            domains[slot].insert(value.clone());
        }
        instances.push(Instance {
            values,
            label: row.label.clone(),
        });
    }
    let [time_domain, rel_domain, loc_domain] = domains;
    let schema = ContextSchema::new(
        vec![
            Attribute {
                name: "time_segment".into(),
                domain: Some(time_domain),
            },
            Attribute {
                name: "relationship".into(),
                domain: Some(rel_domain),
            },
            Attribute {
                name: "location".into(),
                domain: Some(loc_domain),
            },
        ],
        "label",
    )?;
    Dataset::new(schema, instances)
}

// ---------------------------------------------------------------------------
// Synthetic generation
// ---------------------------------------------------------------------------

/// One planted rule: a partial assignment of attribute→value plus the label
/// emitted when every condition matches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantedRule {
    pub when: BTreeMap<String, String>,
    pub label: String,
}

/// Declarative recipe for a synthetic dataset: a schema with declared
/// domains, ordered first-match rules, a default label, label noise, size,
/// and seed. Identical specs generate identical datasets.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedTreeSpec {
    pub schema: ContextSchema,
    pub rules: Vec<PlantedRule>,
    pub default_label: String,
    pub noise_rate: f64,
    pub instance_count: usize,
    pub seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecDoc {
    class_attribute: String,
    default_label: String,
    #[serde(default)]
    noise_rate: f64,
    instance_count: usize,
    #[serde(default)]
    seed: u64,
    #[serde(rename = "attribute")]
    attributes: Vec<SpecAttrDoc>,
    #[serde(rename = "rule", default)]
    rules: Vec<SpecRuleDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecAttrDoc {
    name: String,
    values: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecRuleDoc {
    label: String,
    #[serde(default)]
    when: BTreeMap<String, String>,
}

impl PlantedTreeSpec {
    /// Parses the TOML spec format documented in FORMATS.md.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let doc: SpecDoc =
            toml::from_str(text).map_err(|e| Error::Spec(format!("parse error: {e}")))?;
        let attributes = doc
            .attributes
            .into_iter()
            .map(|a| Attribute {
                name: a.name,
                domain: Some(a.values.into_iter().collect()),
            })
            .collect();
        let schema = ContextSchema::new(attributes, doc.class_attribute)
            .map_err(|e| Error::Spec(e.to_string()))?;
        let rules = doc
            .rules
            .into_iter()
            .map(|r| PlantedRule {
                when: r.when,
                label: r.label,
            })
            .collect();
        let spec = PlantedTreeSpec {
            schema,
            rules,
            default_label: doc.default_label,
            noise_rate: doc.noise_rate,
            instance_count: doc.instance_count,
            seed: doc.seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for attr in &self.schema.attributes {
            match &attr.domain {
                Some(domain) if !domain.is_empty() => {}
                _ => {
                    return Err(Error::Spec(format!(
                        "attribute `{}` has no declared values",
                        attr.name
                    )))
                }
            }
        }
        if self.default_label.is_empty() {
            return Err(Error::Spec("default label is empty".into()));
        }
        if !(0.0..=1.0).contains(&self.noise_rate) {
            return Err(Error::Spec(format!(
                "noise rate {} is outside [0, 1]",
                self.noise_rate
            )));
        }
        if self.instance_count == 0 {
            return Err(Error::Spec("instance count must be positive".into()));
        }
        for (i, rule) in self.rules.iter().enumerate() {
            if rule.label.is_empty() {
                return Err(Error::Spec(format!("rule {} has an empty label", i + 1)));
            }
            for (attr_name, value) in &rule.when {
                let Some(idx) = self.schema.attribute_index(attr_name) else {
                    return Err(Error::Spec(format!(
                        "rule {} references unknown attribute `{attr_name}`",
                        i + 1
                    )));
                };
                let domain = self.schema.attributes[idx]
                    .domain
                    .as_ref()
                    .expect("checked above");
                if !domain.contains(value) {
                    return Err(Error::Spec(format!(
                        "rule {} uses `{value}`, not a declared value of `{attr_name}`",
                        i + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// The label the planted rules assign to `values`: first matching rule
    /// wins, the default applies when none match.
    pub fn label_for(&self, values: &[String]) -> &str {
        for rule in &self.rules {
            let matches = rule.when.iter().all(|(attr, want)| {
                self.schema
                    .attribute_index(attr)
                    .is_some_and(|idx| values[idx] == *want)
            });
            if matches {
                return &rule.label;
            }
        }
        &self.default_label
    }

    /// All class tokens the generator can emit, sorted: rule labels plus the
    /// default. Noise flips stay inside this set.
    pub fn class_universe(&self) -> Vec<String> {
        let mut classes: BTreeSet<&str> = self.rules.iter().map(|r| r.label.as_str()).collect();
        classes.insert(&self.default_label);
        classes.into_iter().map(str::to_owned).collect()
    }
}

/// Generates `spec.instance_count` instances: each attribute value is drawn
/// uniformly from its sorted domain, the label comes from the first matching
/// rule, and with probability `noise_rate` the label is flipped to a
/// uniformly chosen different class. Draw order is fixed (see FORMATS.md) so
/// identical specs produce identical datasets.
pub fn generate_synthetic(spec: &PlantedTreeSpec) -> Result<Dataset> {
    spec.validate()?;
    let domains: Vec<Vec<&String>> = spec
        .schema
        .attributes
        .iter()
        .map(|a| a.domain.as_ref().expect("validated").iter().collect())
        .collect();
    let classes = spec.class_universe();
    let mut rng = XorShift64Star::new(spec.seed);
    let mut instances = Vec::with_capacity(spec.instance_count);
    for _ in 0..spec.instance_count {
        let values: Vec<String> = domains
            .iter()
            .map(|domain| domain[rng.next_index(domain.len())].clone())
            .collect();
        let mut label = spec.label_for(&values).to_owned();
        if spec.noise_rate > 0.0 && rng.next_unit() < spec.noise_rate && classes.len() > 1 {
            let others: Vec<&String> = classes.iter().filter(|c| **c != label).collect();
            label = others[rng.next_index(others.len())].clone();
        }
        instances.push(Instance { values, label });
    }
    Dataset::new(spec.schema.clone(), instances)
}

// ---------------------------------------------------------------------------
// k-fold partitioning
// ---------------------------------------------------------------------------

fn kfold_guard(dataset: &Dataset, k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::Config(format!("k must be at least 2, got {k}")));
    }
    if k > dataset.len() {
        return Err(Error::Config(format!(
            "k = {k} exceeds the instance count {}",
            dataset.len()
        )));
    }
    Ok(())
}

fn assemble_folds(dataset: &Dataset, folds: Vec<Vec<usize>>) -> Vec<(Dataset, Dataset)> {
    let k = folds.len();
    let mut pairs = Vec::with_capacity(k);
    for test_idx in 0..k {
        let mut train = Vec::with_capacity(dataset.len() - folds[test_idx].len());
        for (i, fold) in folds.iter().enumerate() {
            if i != test_idx {
                train.extend(fold.iter().map(|&j| dataset.instances[j].clone()));
            }
        }
        let test = folds[test_idx]
            .iter()
            .map(|&j| dataset.instances[j].clone())
            .collect();
        pairs.push((
            Dataset {
                schema: dataset.schema.clone(),
                instances: train,
            },
            Dataset {
                schema: dataset.schema.clone(),
                instances: test,
            },
        ));
    }
    pairs
}

/// Shuffles instances with the seeded generator and slices them into k folds
/// whose sizes differ by at most one (the first `n mod k` folds get the extra
/// instance). Pair i uses fold i as test and the remaining folds, in fold
/// order, as train.
pub fn split_kfold(dataset: &Dataset, k: usize, seed: u64) -> Result<Vec<(Dataset, Dataset)>> {
    kfold_guard(dataset, k)?;
    let n = dataset.len();
    let mut order: Vec<usize> = (0..n).collect();
    XorShift64Star::new(seed).shuffle(&mut order);
    let base = n / k;
    let extra = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for i in 0..k {
        let size = base + usize::from(i < extra);
        folds.push(order[start..start + size].to_vec());
        start += size;
    }
    Ok(assemble_folds(dataset, folds))
}

/// Stratified variant: after the same seeded shuffle, instances are grouped
/// by class (classes ordered by first appearance in the shuffled order) and
/// dealt round-robin by a single running counter, so both the overall fold
/// sizes and each class's per-fold counts differ by at most one.
pub fn split_kfold_stratified(
    dataset: &Dataset,
    k: usize,
    seed: u64,
) -> Result<Vec<(Dataset, Dataset)>> {
    kfold_guard(dataset, k)?;
    let n = dataset.len();
    let mut order: Vec<usize> = (0..n).collect();
    XorShift64Star::new(seed).shuffle(&mut order);

    let mut class_order: Vec<&str> = Vec::new();
    let mut by_class: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for &idx in &order {
        let label = dataset.instances[idx].label.as_str();
        by_class.entry(label).or_insert_with(|| {
            class_order.push(label);
            Vec::new()
        });
        by_class.get_mut(label).expect("just inserted").push(idx);
    }

    let mut folds: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut counter = 0usize;
    for label in class_order {
        for idx in &by_class[label] {
            folds[counter % k].push(*idx);
            counter += 1;
        }
    }
    Ok(assemble_folds(dataset, folds))
}

/// Renders a spec back to its TOML form (used by tests and docs; the format
/// is documented in FORMATS.md).
pub fn spec_to_toml(spec: &PlantedTreeSpec) -> String {
    let mut out = String::new();
    let esc = |s: &str| s.replace('\\', "\\\\").replace('"', "\\\"");
    let _ = writeln!(out, "class_attribute = \"{}\"", esc(&spec.schema.class_attribute));
    let _ = writeln!(out, "default_label = \"{}\"", esc(&spec.default_label));
    let _ = writeln!(out, "noise_rate = {}", spec.noise_rate);
    let _ = writeln!(out, "instance_count = {}", spec.instance_count);
    let _ = writeln!(out, "seed = {}", spec.seed);
    for attr in &spec.schema.attributes {
        let _ = writeln!(out, "\n[[attribute]]");
        let _ = writeln!(out, "name = \"{}\"", esc(&attr.name));
        let values: Vec<String> = attr
            .domain
            .iter()
            .flatten()
            .map(|v| format!("\"{}\"", esc(v)))
            .collect();
        let _ = writeln!(out, "values = [{}]", values.join(", "));
    }
    for rule in &spec.rules {
        let _ = writeln!(out, "\n[[rule]]");
        let _ = writeln!(out, "label = \"{}\"", esc(&rule.label));
        let when: Vec<String> = rule
            .when
            .iter()
            .map(|(a, v)| format!("\"{}\" = \"{}\"", esc(a), esc(v)))
            .collect();
        let _ = writeln!(out, "when = {{ {} }}", when.join(", "));
    }
    out
}
