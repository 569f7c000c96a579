//! Fixtures shared by the integration suites: a tiny single-attribute
//! contrast set, the worked four-attribute example whose generalized tree is
//! known node by node, and the frozen synthetic specification used by the
//! experiment-level checks.
#![allow(dead_code)]

use behavdt::dataset::{
    generate_synthetic, Attribute, ContextSchema, Dataset, Instance, PlantedTreeSpec,
};

/// Frozen specification for the experiment-scale dataset (10 attributes,
/// 15% exception mass, 5% label noise, 5000 instances, seed 42).
pub const ACCEPTANCE_SPEC: &str =
    include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../specs/acceptance.toml"));

/// A 1000-instance planted set with three behaviors and a couple of
/// exceptions; small enough for fast round-trip and determinism checks.
pub const REFERENCE_SPEC: &str = r#"
class_attribute = "action"
default_label = "Decline"
noise_rate = 0.03
instance_count = 1000
seed = 7

[[attribute]]
name = "situation"
values = ["home", "meeting", "office"]

[[attribute]]
name = "relationship"
values = ["boss", "friend", "mother", "unknown"]

[[attribute]]
name = "daypart"
values = ["evening", "morning"]

[[attribute]]
name = "battery"
values = ["high", "low"]

[[attribute]]
name = "network"
values = ["cell", "wifi"]

[[rule]]
label = "Answer"
when = { situation = "meeting", relationship = "boss" }

[[rule]]
label = "Ignore"
when = { situation = "office", daypart = "morning" }

[[rule]]
label = "Answer"
when = { situation = "home" }
"#;

pub fn acceptance_spec() -> PlantedTreeSpec {
    PlantedTreeSpec::from_toml_str(ACCEPTANCE_SPEC).expect("acceptance spec parses")
}

pub fn acceptance_dataset() -> Dataset {
    generate_synthetic(&acceptance_spec()).expect("acceptance dataset generates")
}

pub fn reference_spec() -> PlantedTreeSpec {
    PlantedTreeSpec::from_toml_str(REFERENCE_SPEC).expect("reference spec parses")
}

pub fn reference_dataset() -> Dataset {
    generate_synthetic(&reference_spec()).expect("reference dataset generates")
}

pub const RELATIONSHIPS: [&str; 5] = ["Boss", "Colleague", "Friend", "Mother", "Unknown"];

/// Fifty meeting-time instances over a single relationship attribute: ten per
/// relationship, boss answered and everyone else declined.
pub fn meeting_dataset() -> Dataset {
    let schema = ContextSchema::new(
        vec![Attribute::with_domain("relationship", RELATIONSHIPS)],
        "action",
    )
    .expect("schema");
    let mut instances = Vec::new();
    for rel in RELATIONSHIPS {
        let label = if rel == "Boss" { "Answer" } else { "Decline" };
        for _ in 0..10 {
            instances.push(Instance::new([rel], label));
        }
    }
    Dataset::new(schema, instances).expect("dataset")
}

const HOME_MARKET: [&str; 2] = ["Home", "Market"];
const EVE_MOR: [&str; 2] = ["Mon[Eve]", "Mon[Mor]"];

/// The worked example: 260 instances over situation, relationship, location,
/// and time whose 0.8-threshold tree is known exactly — two generalized
/// interior nodes (meetings and unknown situations both decline) and five
/// exception or routing leaves beneath them.
pub fn worked_example_dataset() -> Dataset {
    let schema = ContextSchema::new(
        vec![
            Attribute::with_domain("situation", ["Meeting", "Office", "Unknown"]),
            Attribute::with_domain("relationship", ["Boss", "Colleague", "Friend", "Mother"]),
            Attribute::with_domain("location", HOME_MARKET),
            Attribute::with_domain("time", EVE_MOR),
        ],
        "action",
    )
    .expect("schema");

    let mut instances = Vec::new();
    let mut push = |s: &str, r: &str, l: &str, t: &str, label: &str| {
        instances.push(Instance::new([s, r, l, t], label));
    };

    // Meetings: the boss is answered, everyone else is declined. Location
    // and time cycle evenly so neither carries information here.
    for i in 0..12 {
        push(
            "Meeting",
            "Boss",
            HOME_MARKET[(i / 2) % 2],
            EVE_MOR[i % 2],
            "Answer",
        );
    }
    for rel in ["Colleague", "Friend", "Mother"] {
        for i in 0..16 {
            push(
                "Meeting",
                rel,
                HOME_MARKET[(i / 2) % 2],
                EVE_MOR[i % 2],
                "Decline",
            );
        }
    }

    // Office: mother is always answered; friends depend on the time of day.
    for l in HOME_MARKET {
        for t in EVE_MOR {
            for _ in 0..22 {
                push("Office", "Mother", l, t, "Answer");
            }
        }
    }
    for l in HOME_MARKET {
        for _ in 0..18 {
            push("Office", "Friend", l, "Mon[Mor]", "Decline");
        }
        for _ in 0..18 {
            push("Office", "Friend", l, "Mon[Eve]", "Answer");
        }
    }

    // Unknown situations: declined unless at home.
    for i in 0..8 {
        push(
            "Unknown",
            RELATIONSHIPS[i % 4],
            "Home",
            EVE_MOR[i % 2],
            "Answer",
        );
    }
    for rel in ["Boss", "Colleague", "Friend", "Mother"] {
        for i in 0..8 {
            push("Unknown", rel, "Market", EVE_MOR[i % 2], "Decline");
        }
    }

    Dataset::new(schema, instances).expect("dataset")
}

/// The seven decision nodes the worked example must produce, as
/// (node type, behavior, context path) triples sorted by path then behavior.
pub fn worked_example_rows() -> Vec<(String, String, Vec<String>)> {
    let mut rows: Vec<(String, String, Vec<String>)> = [
        ("interior", "Decline", vec!["Meeting"]),
        ("interior", "Decline", vec!["Unknown"]),
        ("leaf", "Answer", vec!["Meeting", "Boss"]),
        ("leaf", "Answer", vec!["Office", "Mother"]),
        ("leaf", "Decline", vec!["Office", "Friend", "Mon[Mor]"]),
        ("leaf", "Answer", vec!["Office", "Friend", "Mon[Eve]"]),
        ("leaf", "Answer", vec!["Unknown", "Home"]),
    ]
    .into_iter()
    .map(|(ty, behavior, path)| {
        (
            ty.to_owned(),
            behavior.to_owned(),
            path.into_iter().map(str::to_owned).collect(),
        )
    })
    .collect();
    rows.sort_by(|a, b| (&a.2, &a.1).cmp(&(&b.2, &b.1)));
    rows
}
