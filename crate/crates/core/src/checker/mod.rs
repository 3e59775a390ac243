//! Truth evaluation, bounded validity search and the axiom self-test.
//!
//! Formulas are desugared and compiled against a model's agent and atom
//! lists, then evaluated bottom-up to the set of worlds where they hold.

mod axioms;
mod eval;
mod search;

use thiserror::Error;

use crate::formula::{Agent, FormulaError};
use crate::kripke::EnumerationError;

pub use axioms::{
    axiom_suite, default_samples, AxiomFailure, AxiomReport, AxiomSuite, Schema, SchemaFamily,
    SchemaResult,
};
pub use eval::{
    compile_for_model, eval, sat_in_model, truth_set_of, valid_in_model, CompiledFormula,
};
pub use search::{bounded_sat, bounded_validity, SatVerdict, SearchConfig, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("unknown world '{0}'")]
    UnknownWorld(String),
    #[error("agent '{0}' is not part of the model")]
    UnknownAgent(Agent),
    #[error("formula was compiled for a different model layout")]
    LayoutMismatch,
    #[error("the axiom suite needs at least one sample formula")]
    NoSamples,
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, Formula};
    use crate::kripke::{enumerate_models, KripkeModel, DEFAULT_MAX_MODELS};
    use std::collections::BTreeSet;

    fn ag(id: &str) -> Agent {
        Agent::new(id).unwrap()
    }

    fn agents(ids: &[&str]) -> BTreeSet<Agent> {
        ids.iter().map(|i| ag(i)).collect()
    }

    fn f(text: &str, ids: &[&str]) -> Formula {
        parse(text, &agents(ids)).unwrap()
    }

    fn two_worlds() -> KripkeModel {
        KripkeModel::builder(["s", "t"])
            .agent("a", [vec!["s", "t"]], ["s"])
            .atom("p", ["s"])
            .build()
            .unwrap()
    }

    #[test]
    fn hope_is_vacuous_outside_domain() {
        let m = two_worlds();
        let hb = f("H[a] bot", &["a"]);
        assert!(eval(&m, "t", &hb).unwrap());
        assert!(!eval(&m, "s", &hb).unwrap());
    }

    #[test]
    fn correctness_is_domain_membership() {
        let m = two_worlds();
        let c = f("correct(a)", &["a"]);
        assert!(eval(&m, "s", &c).unwrap());
        assert!(!eval(&m, "t", &c).unwrap());
    }

    #[test]
    fn knowledge_quantifies_over_block() {
        let m = two_worlds();
        assert!(!eval(&m, "s", &f("K[a] p", &["a"])).unwrap());
        assert!(eval(&m, "s", &f("p", &["a"])).unwrap());
        // the hope class of s is {s}, where p holds
        assert!(eval(&m, "s", &f("H[a] p", &["a"])).unwrap());
        assert!(eval(&m, "s", &f("B[a] p", &["a"])).unwrap());
    }

    #[test]
    fn eval_errors() {
        let m = two_worlds();
        assert_eq!(
            eval(&m, "x", &Formula::Top).unwrap_err(),
            CheckError::UnknownWorld("x".into())
        );
        assert_eq!(
            eval(&m, "s", &Formula::k(ag("b"), Formula::Top)).unwrap_err(),
            CheckError::UnknownAgent(ag("b"))
        );
        assert!(matches!(
            eval(&m, "s", &Formula::Byz(2)).unwrap_err(),
            CheckError::Formula(FormulaError::ByzTooLarge { .. })
        ));
    }

    #[test]
    fn unknown_atoms_are_false() {
        let m = two_worlds();
        assert!(!eval(&m, "s", &Formula::atom("zzz")).unwrap());
    }

    #[test]
    fn validity_and_satisfiability_in_model() {
        let m = two_worlds();
        assert!(valid_in_model(&m, &Formula::Top).unwrap());
        assert_eq!(
            sat_in_model(&m, &f("!p", &["a"])).unwrap(),
            Some("t".into())
        );
        let faulty = KripkeModel::builder(["s"])
            .agent("a", [vec!["s"]], Vec::<&str>::new())
            .build()
            .unwrap();
        assert_eq!(
            sat_in_model(&faulty, &f("correct(a)", &["a"])).unwrap(),
            None
        );
    }

    #[test]
    fn belief_implies_hope_on_small_models() {
        let a = agents(&["a"]);
        let atoms: BTreeSet<String> = ["p".to_string()].into();
        let phi = f("B[a] p -> H[a] p", &["a"]);
        let mut count = 0;
        for w in 1..=2 {
            for m in enumerate_models(&a, &atoms, w, DEFAULT_MAX_MODELS).unwrap() {
                assert!(valid_in_model(&m, &phi).unwrap());
                count += 1;
            }
        }
        assert_eq!(count, 4 + 32);
    }

    #[test]
    fn factivity_of_knowledge_has_no_countermodel() {
        let v = bounded_validity(
            &f("K[a] p -> p", &["a"]),
            &agents(&["a"]),
            3,
            &SearchConfig::default(),
        )
        .unwrap();
        assert_eq!(v, Verdict::NoCounterexampleUpTo { bound: 3 });
    }

    #[test]
    fn hope_alone_is_not_factive_under_byz() {
        let u = agents(&["1", "2"]);
        let v = bounded_validity(
            &f("(byz(1) & H[1] p) -> p", &["1", "2"]),
            &u,
            3,
            &SearchConfig::default(),
        )
        .unwrap();
        let expected = KripkeModel::builder(["w0"])
            .agent("1", [vec!["w0"]], Vec::<&str>::new())
            .agent("2", [vec!["w0"]], ["w0"])
            .atom("p", Vec::<&str>::new())
            .build()
            .unwrap();
        assert_eq!(
            v,
            Verdict::Counterexample {
                model: expected,
                world: "w0".into()
            }
        );
    }

    #[test]
    fn sequential_and_parallel_scans_agree() {
        let u = agents(&["a", "b"]);
        let phi = f("K[a] H[b] p -> H[b] K[a] p", &["a", "b"]);
        let par = bounded_validity(&phi, &u, 3, &SearchConfig::default()).unwrap();
        let seq = bounded_validity(
            &phi,
            &u,
            3,
            &SearchConfig {
                parallel: false,
                ..SearchConfig::default()
            },
        )
        .unwrap();
        assert_eq!(par, seq);
        assert!(!par.is_valid());
    }

    #[test]
    fn bounded_sat_finds_witness() {
        let u = agents(&["a"]);
        let v = bounded_sat(&f("p & !K[a] p", &["a"]), &u, 3, &SearchConfig::default()).unwrap();
        match v {
            SatVerdict::Satisfiable { model, world } => {
                assert_eq!(model.world_count(), 2);
                assert!(eval(&model, &world, &f("p & !K[a] p", &["a"])).unwrap());
            }
            other => panic!("expected a witness, got {other:?}"),
        }
        let unsat =
            bounded_sat(&f("K[a] p & !p", &["a"]), &u, 2, &SearchConfig::default()).unwrap();
        assert_eq!(unsat, SatVerdict::UnsatisfiableUpTo { bound: 2 });
    }

    #[test]
    fn search_respects_ceiling() {
        let u = agents(&["a", "b"]);
        let phi = f("K[a] p & K[b] q & r & s", &["a", "b"]);
        let cfg = SearchConfig {
            max_models: 1000,
            parallel: false,
        };
        assert!(matches!(
            bounded_validity(&phi, &u, 3, &cfg),
            Err(CheckError::Enumeration(
                EnumerationError::TooManyModels { .. }
            ))
        ));
    }

    #[test]
    fn kh_schema_on_model() {
        let m = two_worlds();
        let report = axiom_suite(&m, &[f("p", &["a"])]).unwrap();
        assert!(report.passed());
        assert!(report.result(Schema::Kh).unwrap().passed());
    }

    #[test]
    fn suite_needs_samples() {
        assert_eq!(
            axiom_suite(&two_worlds(), &[]).unwrap_err(),
            CheckError::NoSamples
        );
    }

    #[test]
    fn verdict_json_shape() {
        let v = Verdict::NoCounterexampleUpTo { bound: 3 };
        assert_eq!(
            v.to_json().to_string(),
            r#"{"verdict":"valid-up-to","bound":3}"#
        );
    }
}
