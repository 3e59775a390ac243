//! Kripke models with a knowledge partition and a hope domain per agent.
//!
//! A frame is stored as `(K-partition, hope domain)` per agent, with
//! `H = K ∩ (domain × domain)`. Every frame satisfying the knowledge-and-hope
//! conditions has exactly one such representation, so illegal frames cannot
//! be built. [`RawModel`] carries arbitrary relations and is checked by
//! [`validate`] before [`canonicalize`] converts it.

mod document;
mod enumerate;
mod model;
mod raw;

use thiserror::Error;

use crate::formula::Agent;

pub use document::ModelDocument;
pub use enumerate::{
    bell, enumerate_models, model_count, restricted_growth_strings, EnumerationError, ModelSpace,
    DEFAULT_MAX_MODELS,
};
pub use model::{hope_from_correctness, AgentFrame, KripkeModel, ModelBuilder};
pub use raw::{canonicalize, validate, FrameViolation, RawModel, Relation, ViolationKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("a model needs at least one world")]
    NoWorlds,
    #[error("world '{0}' declared twice")]
    DuplicateWorld(String),
    #[error("invalid world id '{0}'")]
    InvalidWorld(String),
    #[error("unknown world '{0}'")]
    UnknownWorld(String),
    #[error("invalid agent id '{0}'")]
    InvalidAgent(String),
    #[error("agent '{0}' declared twice")]
    DuplicateAgent(Agent),
    #[error("unknown agent '{0}'")]
    UnknownAgent(Agent),
    #[error("invalid atom name '{0}'")]
    InvalidAtom(String),
    #[error("agent '{0}' has an empty K-block")]
    EmptyBlock(Agent),
    #[error("K-blocks of agent '{agent}' overlap at world '{world}'")]
    OverlappingBlocks { agent: Agent, world: String },
    #[error("K-blocks of agent '{agent}' do not cover world '{world}'")]
    UncoveredWorld { agent: Agent, world: String },
    #[error("document mixes K/Hdom with Krel/Hrel")]
    MixedForms,
    #[error("malformed model document: {0}")]
    Json(String),
    #[error("model violates frame conditions: {}", list(.0))]
    FrameViolations(Vec<FrameViolation>),
}

fn list(v: &[FrameViolation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{BTreeMap, BTreeSet};

    fn ag(id: &str) -> Agent {
        Agent::new(id).unwrap()
    }

    fn rel(pairs: &[(&str, &str)]) -> Relation {
        pairs
            .iter()
            .map(|(s, t)| (s.to_string(), t.to_string()))
            .collect()
    }

    fn raw(worlds: &[&str], k: &[(&str, &str)], h: &[(&str, &str)]) -> RawModel {
        RawModel::new(
            worlds.iter().map(|w| w.to_string()).collect(),
            vec![ag("a")],
            BTreeMap::from([(ag("a"), rel(k))]),
            BTreeMap::from([(ag("a"), rel(h))]),
            BTreeMap::new(),
        )
        .unwrap()
    }

    #[test]
    fn empty_hope_relation_is_legal() {
        let m = raw(&["s"], &[("s", "s")], &[]);
        assert!(validate(&m).is_empty());
        let c = canonicalize(&m).unwrap();
        assert!(c.frame(&ag("a")).unwrap().hope_domain().is_empty());
    }

    #[test]
    fn hope_outside_knowledge_is_flagged() {
        let m = raw(
            &["s", "t"],
            &[("s", "s"), ("t", "t")],
            &[("s", "t"), ("t", "s"), ("s", "s"), ("t", "t")],
        );
        let v = validate(&m);
        assert!(v.contains(&FrameViolation {
            agent: ag("a"),
            kind: ViolationKind::HNotSubsetOfK,
            witness: vec!["s".into(), "t".into()],
        }));
    }

    #[test]
    fn mixed_condition_is_flagged() {
        let m = raw(
            &["s", "t"],
            &[("s", "s"), ("s", "t"), ("t", "s"), ("t", "t")],
            &[("s", "s"), ("t", "t")],
        );
        let v = validate(&m);
        assert_eq!(
            v,
            vec![FrameViolation {
                agent: ag("a"),
                kind: ViolationKind::MixedConditionViolated,
                witness: vec!["s".into(), "t".into()],
            }]
        );
        assert!(matches!(
            canonicalize(&m),
            Err(ModelError::FrameViolations(_))
        ));
    }

    #[test]
    fn transitivity_witness_is_a_triple() {
        let m = raw(
            &["s", "t", "u"],
            &[
                ("s", "s"),
                ("t", "t"),
                ("u", "u"),
                ("s", "t"),
                ("t", "s"),
                ("t", "u"),
                ("u", "t"),
            ],
            &[],
        );
        let v = validate(&m);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::KNotTransitive);
        assert_eq!(v[0].witness, vec!["s", "t", "u"]);
    }

    #[test]
    fn canonical_hope_domain_from_reflexive_points() {
        let m = raw(
            &["s", "t", "u"],
            &[("s", "s"), ("s", "t"), ("t", "s"), ("t", "t"), ("u", "u")],
            &[("s", "s"), ("s", "t"), ("t", "s"), ("t", "t")],
        );
        let c = canonicalize(&m).unwrap();
        let a = ag("a");
        assert_eq!(c.hope_domain_names(&a).unwrap(), vec!["s", "t"]);
        assert_eq!(
            c.partition_names(&a).unwrap(),
            vec![vec!["s".to_string(), "t".into()], vec!["u".into()]]
        );
        assert_eq!(c.to_raw(), m);
    }

    #[test]
    fn correctness_determines_hope() {
        let a = ag("a");
        let parts = BTreeMap::from([(a.clone(), vec![vec!["s".to_string(), "t".to_string()]])]);
        let all = BTreeMap::from([(
            a.clone(),
            BTreeSet::from(["s".to_string(), "t".to_string()]),
        )]);
        let dom = hope_from_correctness(&parts, &all);
        let m = KripkeModel::builder(["s", "t"])
            .agent("a", parts[&a].clone(), dom[&a].clone())
            .build()
            .unwrap();
        assert_eq!(m.h_pairs(&a), m.k_pairs(&a));

        let none = hope_from_correctness(&parts, &BTreeMap::new());
        assert!(none[&a].is_empty());

        let only_s = BTreeMap::from([(a.clone(), BTreeSet::from(["s".to_string()]))]);
        let dom = hope_from_correctness(&parts, &only_s);
        let m = KripkeModel::builder(["s", "t"])
            .agent("a", parts[&a].clone(), dom[&a].clone())
            .build()
            .unwrap();
        assert_eq!(m.h_pairs(&a).unwrap(), rel(&[("s", "s")]));
        assert!(validate(&m.to_raw()).is_empty());
    }

    #[test]
    fn builder_rejects_bad_partitions() {
        let overlap = KripkeModel::builder(["s", "t"])
            .agent("a", [vec!["s", "t"], vec!["t"]], Vec::<&str>::new())
            .build();
        assert!(matches!(overlap, Err(ModelError::OverlappingBlocks { .. })));
        let uncovered = KripkeModel::builder(["s", "t"])
            .agent("a", [vec!["s"]], Vec::<&str>::new())
            .build();
        assert!(matches!(uncovered, Err(ModelError::UncoveredWorld { .. })));
        let unknown = KripkeModel::builder(["s"])
            .agent("a", [vec!["s"]], ["x"])
            .build();
        assert_eq!(unknown.unwrap_err(), ModelError::UnknownWorld("x".into()));
        let bad_atom = KripkeModel::builder(["s"]).atom("K", ["s"]).build();
        assert_eq!(bad_atom.unwrap_err(), ModelError::InvalidAtom("K".into()));
        assert_eq!(
            KripkeModel::builder(Vec::<String>::new())
                .build()
                .unwrap_err(),
            ModelError::NoWorlds
        );
    }

    #[test]
    fn document_round_trip() {
        let m = KripkeModel::builder(["s", "t", "u"])
            .agent("a", [vec!["s", "t"], vec!["u"]], ["s", "t"])
            .agent("b", [vec!["s"], vec!["t", "u"]], ["u"])
            .atom("p", ["s", "u"])
            .build()
            .unwrap();
        let json = m.to_document().to_json_pretty();
        let back = KripkeModel::from_json(&json).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn raw_document_goes_through_validation() {
        let text = r#"{"worlds":["s","t"],"agents":["a"],
            "Krel":{"a":[["s","s"],["t","t"]]},
            "Hrel":{"a":[["s","t"],["t","s"],["s","s"],["t","t"]]}}"#;
        let doc = ModelDocument::from_json(text).unwrap();
        let violations = doc.load().unwrap().unwrap_err();
        assert_eq!(violations[0].kind, ViolationKind::HNotSubsetOfK);
    }

    #[test]
    fn canonical_document_with_overlapping_blocks_is_reported() {
        let text = r#"{"worlds":["s","t"],"agents":["a"],
            "K":{"a":[["s","t"],["t"]]},"Hdom":{"a":[]}}"#;
        assert_eq!(
            ModelDocument::from_json(text).unwrap().load().unwrap_err(),
            ModelError::OverlappingBlocks {
                agent: ag("a"),
                world: "t".into()
            }
        );
    }

    #[test]
    fn document_errors() {
        let mixed = r#"{"worlds":["s"],"agents":["a"],"K":{"a":[["s"]]},"Krel":{"a":[]}}"#;
        assert_eq!(
            ModelDocument::from_json(mixed)
                .unwrap()
                .to_raw()
                .unwrap_err(),
            ModelError::MixedForms
        );
        let unknown = r#"{"worlds":["s"],"agents":["a"],"K":{"b":[["s"]]}}"#;
        assert!(matches!(
            ModelDocument::from_json(unknown).unwrap().to_raw(),
            Err(ModelError::UnknownAgent(_))
        ));
        assert!(matches!(
            ModelDocument::from_json("{\"worlds\": 3}"),
            Err(ModelError::Json(_))
        ));
    }

    #[test]
    fn enumeration_counts_small_cases() {
        let one: BTreeSet<Agent> = [ag("a")].into();
        let none = BTreeSet::new();
        let p: BTreeSet<String> = ["p".to_string()].into();
        assert_eq!(
            enumerate_models(&one, &none, 1, DEFAULT_MAX_MODELS)
                .unwrap()
                .count(),
            2
        );
        assert_eq!(
            enumerate_models(&one, &none, 2, DEFAULT_MAX_MODELS)
                .unwrap()
                .count(),
            8
        );
        assert_eq!(
            enumerate_models(&one, &p, 2, DEFAULT_MAX_MODELS)
                .unwrap()
                .count(),
            32
        );
    }

    #[test]
    fn enumeration_ceiling() {
        let agents: BTreeSet<Agent> = [ag("a"), ag("b")].into();
        let atoms: BTreeSet<String> = ["p".to_string()].into();
        // 5^2 * 2^6 * 2^3 = 12800
        assert!(matches!(
            ModelSpace::new(&agents, &atoms, 3, 12_799),
            Err(EnumerationError::TooManyModels { .. })
        ));
        assert_eq!(
            ModelSpace::new(&agents, &atoms, 3, 12_800).unwrap().len(),
            12_800
        );
        assert_eq!(
            ModelSpace::new(&agents, &atoms, 0, 10).unwrap_err(),
            EnumerationError::NoWorlds
        );
        assert!(ModelSpace::new(&agents, &atoms, 200, u64::MAX).is_err());
    }

    #[test]
    fn bell_numbers() {
        let expected = [1u128, 1, 2, 5, 15, 52, 203, 877, 4140];
        for (n, b) in expected.iter().enumerate() {
            assert_eq!(bell(n), Some(*b));
            assert_eq!(restricted_growth_strings(n).len() as u128, *b);
        }
        assert_eq!(bell(1000), None);
    }
}
