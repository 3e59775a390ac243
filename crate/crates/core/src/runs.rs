//! Finite run systems and their compilation into Kripke models.
//!
//! A world is a point `(run, time)`, written `run@time`. Agent `i` cannot
//! tell two points apart when its local-state tokens there are equal, and is
//! H-defined exactly at points of runs where it is flagged correct.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{is_atom_name, is_identifier, Agent, Formula};
use crate::kripke::{hope_from_correctness, KripkeModel, ModelError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error("a run system needs at least one run")]
    NoRuns,
    #[error("time bound must be positive")]
    ZeroTimeBound,
    #[error("invalid run id '{0}'")]
    InvalidRunId(String),
    #[error("run '{0}' declared twice")]
    DuplicateRun(String),
    #[error("agent '{0}' declared twice")]
    DuplicateAgent(Agent),
    #[error("run '{run}' mentions undeclared agent '{agent}'")]
    UnknownAgent { run: String, agent: Agent },
    #[error("run '{run}' has no local states for agent '{agent}'")]
    MissingLocalStates { run: String, agent: Agent },
    #[error("run '{run}' gives agent '{agent}' {found} local states, expected {expected}")]
    LocalStateLength {
        run: String,
        agent: Agent,
        found: usize,
        expected: usize,
    },
    #[error("run '{run}' has no correctness flag for agent '{agent}'")]
    MissingCorrectness { run: String, agent: Agent },
    #[error("invalid atom name '{0}'")]
    InvalidAtom(String),
    #[error("run '{run}' gives atom '{atom}' {found} values, expected {expected}")]
    AtomLength {
        run: String,
        atom: String,
        found: usize,
        expected: usize,
    },
    #[error("malformed run system document: {0}")]
    Json(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// One run: per-agent local-state tokens for each time, a correctness flag
/// per agent and atom truth values per time. Atoms missing from a run are
/// false throughout it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Run {
    pub id: String,
    pub local: BTreeMap<Agent, Vec<String>>,
    pub correct: BTreeMap<Agent, bool>,
    #[serde(default)]
    pub atoms: BTreeMap<String, Vec<bool>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RunSystem {
    pub agents: Vec<Agent>,
    pub time_bound: usize,
    pub runs: Vec<Run>,
}

/// Name of the world for point `(run, time)`.
pub fn point_name(run: &str, time: usize) -> String {
    format!("{run}@{time}")
}

impl RunSystem {
    pub fn from_json(text: &str) -> Result<Self, RunError> {
        serde_json::from_str(text).map_err(|e| RunError::Json(e.to_string()))
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("run systems serialize")
    }

    /// Checks that every run is total on agents and times.
    pub fn check(&self) -> Result<(), RunError> {
        if self.runs.is_empty() {
            return Err(RunError::NoRuns);
        }
        if self.time_bound == 0 {
            return Err(RunError::ZeroTimeBound);
        }
        let mut agents = BTreeSet::new();
        for a in &self.agents {
            if !agents.insert(a) {
                return Err(RunError::DuplicateAgent(a.clone()));
            }
        }
        let mut ids = BTreeSet::new();
        for run in &self.runs {
            if !is_identifier(&run.id) {
                return Err(RunError::InvalidRunId(run.id.clone()));
            }
            if !ids.insert(&run.id) {
                return Err(RunError::DuplicateRun(run.id.clone()));
            }
            let unknown = run
                .local
                .keys()
                .chain(run.correct.keys())
                .find(|a| !agents.contains(a));
            if let Some(agent) = unknown {
                return Err(RunError::UnknownAgent {
                    run: run.id.clone(),
                    agent: agent.clone(),
                });
            }
            for &agent in &agents {
                let states = run
                    .local
                    .get(agent)
                    .ok_or_else(|| RunError::MissingLocalStates {
                        run: run.id.clone(),
                        agent: agent.clone(),
                    })?;
                if states.len() != self.time_bound {
                    return Err(RunError::LocalStateLength {
                        run: run.id.clone(),
                        agent: agent.clone(),
                        found: states.len(),
                        expected: self.time_bound,
                    });
                }
                if !run.correct.contains_key(agent) {
                    return Err(RunError::MissingCorrectness {
                        run: run.id.clone(),
                        agent: agent.clone(),
                    });
                }
            }
            for (atom, values) in &run.atoms {
                if !is_atom_name(atom) {
                    return Err(RunError::InvalidAtom(atom.clone()));
                }
                if values.len() != self.time_bound {
                    return Err(RunError::AtomLength {
                        run: run.id.clone(),
                        atom: atom.clone(),
                        found: values.len(),
                        expected: self.time_bound,
                    });
                }
            }
        }
        Ok(())
    }

    /// All points in run order, then time order.
    pub fn points(&self) -> impl Iterator<Item = (&Run, usize)> {
        self.runs
            .iter()
            .flat_map(move |r| (0..self.time_bound).map(move |t| (r, t)))
    }

    pub fn compile(&self) -> Result<KripkeModel, RunError> {
        self.check()?;
        let mut partitions = BTreeMap::new();
        let mut correct = BTreeMap::new();
        for agent in &self.agents {
            let mut classes: BTreeMap<&str, Vec<String>> = BTreeMap::new();
            let mut good = BTreeSet::new();
            for (run, t) in self.points() {
                let name = point_name(&run.id, t);
                if run.correct[agent] {
                    good.insert(name.clone());
                }
                classes
                    .entry(run.local[agent][t].as_str())
                    .or_default()
                    .push(name);
            }
            partitions.insert(agent.clone(), classes.into_values().collect::<Vec<_>>());
            correct.insert(agent.clone(), good);
        }
        let domains = hope_from_correctness(&partitions, &correct);

        let mut builder = KripkeModel::builder(self.points().map(|(r, t)| point_name(&r.id, t)));
        for (agent, blocks) in partitions {
            let domain = domains[&agent].clone();
            builder = builder.agent(agent.id(), blocks, domain);
        }
        let mut valuation: BTreeMap<&str, Vec<String>> = BTreeMap::new();
        for run in &self.runs {
            for (atom, values) in &run.atoms {
                let worlds = valuation.entry(atom.as_str()).or_default();
                for (t, _) in values.iter().enumerate().filter(|(_, v)| **v) {
                    worlds.push(point_name(&run.id, t));
                }
            }
        }
        for (atom, worlds) in valuation {
            builder = builder.atom(atom, worlds);
        }
        Ok(builder.build()?)
    }
}

/// An expected truth value of a formula at a named world.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Claim {
    pub world: String,
    pub formula: Formula,
    pub expected: bool,
}

/// Two runs that agent `a` cannot tell apart at time 0. In `r` the event `e`
/// happened and `a` is correct; in `r_vat` the same record is fake and `a` is
/// faulty. Agent `b` sees the difference.
pub fn brain_in_vat_example() -> (RunSystem, Vec<Claim>) {
    let a = Agent::new("a").expect("valid id");
    let b = Agent::new("b").expect("valid id");
    let run = |id: &str, b_state: &str, a_correct: bool, e: bool| Run {
        id: id.into(),
        local: BTreeMap::from([
            (a.clone(), vec!["saw_e".to_string()]),
            (b.clone(), vec![b_state.to_string()]),
        ]),
        correct: BTreeMap::from([(a.clone(), a_correct), (b.clone(), true)]),
        atoms: BTreeMap::from([("e".to_string(), vec![e])]),
    };
    let system = RunSystem {
        agents: vec![a.clone(), b.clone()],
        time_bound: 1,
        runs: vec![
            run("r", "real", true, true),
            run("r_vat", "vat", false, false),
        ],
    };
    let e = Formula::atom("e");
    let claim = |world: &str, formula: Formula, expected: bool| Claim {
        world: world.into(),
        formula,
        expected,
    };
    let claims = vec![
        claim("r@0", Formula::k(a.clone(), e.clone()), false),
        claim("r@0", Formula::b(a.clone(), e.clone()), true),
        claim("r@0", e.clone(), true),
        claim("r_vat@0", Formula::Correct(a.clone()), false),
        claim("r@0", Formula::k(b.clone(), e), true),
    ];
    (system, claims)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::eval;
    use crate::kripke::validate;
    use proptest::prelude::*;

    fn ag(id: &str) -> Agent {
        Agent::new(id).unwrap()
    }

    fn run(id: &str, local: &[(&str, &[&str])], correct: &[(&str, bool)]) -> Run {
        Run {
            id: id.into(),
            local: local
                .iter()
                .map(|(a, ts)| (ag(a), ts.iter().map(|t| t.to_string()).collect()))
                .collect(),
            correct: correct.iter().map(|(a, c)| (ag(a), *c)).collect(),
            atoms: BTreeMap::new(),
        }
    }

    #[test]
    fn single_point() {
        let sys = RunSystem {
            agents: vec![ag("a")],
            time_bound: 1,
            runs: vec![run("r", &[("a", &["x"])], &[("a", false)])],
        };
        let m = sys.compile().unwrap();
        assert_eq!(m.worlds(), ["r@0"]);
        assert_eq!(
            m.partition_names(&ag("a")).unwrap(),
            vec![vec!["r@0".to_string()]]
        );
        assert!(m.hope_domain_names(&ag("a")).unwrap().is_empty());
    }

    #[test]
    fn local_state_equality_groups_points() {
        let sys = RunSystem {
            agents: vec![ag("a"), ag("b")],
            time_bound: 1,
            runs: vec![
                run(
                    "r",
                    &[("a", &["x"]), ("b", &["u"])],
                    &[("a", true), ("b", true)],
                ),
                run(
                    "s",
                    &[("a", &["x"]), ("b", &["v"])],
                    &[("a", true), ("b", true)],
                ),
            ],
        };
        let m = sys.compile().unwrap();
        assert_eq!(
            m.partition_names(&ag("a")).unwrap(),
            vec![vec!["r@0".to_string(), "s@0".into()]]
        );
        assert_eq!(
            m.partition_names(&ag("b")).unwrap(),
            vec![vec!["r@0".to_string()], vec!["s@0".into()]]
        );
    }

    #[test]
    fn correctness_is_invisible_to_knowledge() {
        let sys = RunSystem {
            agents: vec![ag("a")],
            time_bound: 1,
            runs: vec![
                run("r", &[("a", &["x"])], &[("a", true)]),
                run("s", &[("a", &["x"])], &[("a", false)]),
            ],
        };
        let m = sys.compile().unwrap();
        let c = Formula::Correct(ag("a"));
        assert!(eval(&m, "r@0", &c).unwrap());
        assert!(!eval(&m, "s@0", &c).unwrap());
        assert!(m.frame(&ag("a")).unwrap().knows(0, 1));
    }

    #[test]
    fn brain_in_vat_claims_hold() {
        let (sys, claims) = brain_in_vat_example();
        let m = sys.compile().unwrap();
        assert!(validate(&m.to_raw()).is_empty());
        for c in claims {
            assert_eq!(
                eval(&m, &c.world, &c.formula).unwrap(),
                c.expected,
                "{}",
                c.formula
            );
        }
    }

    #[test]
    fn ill_formed_systems_are_rejected() {
        let good = || RunSystem {
            agents: vec![ag("a")],
            time_bound: 2,
            runs: vec![run("r", &[("a", &["x", "y"])], &[("a", true)])],
        };
        let mut s = good();
        s.runs[0].local.clear();
        assert!(matches!(
            s.compile(),
            Err(RunError::MissingLocalStates { .. })
        ));
        let mut s = good();
        s.runs[0].local.get_mut(&ag("a")).unwrap().pop();
        assert!(matches!(
            s.compile(),
            Err(RunError::LocalStateLength { found: 1, .. })
        ));
        let mut s = good();
        s.runs[0].correct.clear();
        assert!(matches!(
            s.compile(),
            Err(RunError::MissingCorrectness { .. })
        ));
        let mut s = good();
        s.runs[0].correct.insert(ag("z"), true);
        assert!(matches!(s.compile(), Err(RunError::UnknownAgent { .. })));
        let mut s = good();
        s.runs.push(s.runs[0].clone());
        assert_eq!(s.compile().unwrap_err(), RunError::DuplicateRun("r".into()));
        let mut s = good();
        s.time_bound = 0;
        assert_eq!(s.compile().unwrap_err(), RunError::ZeroTimeBound);
        let mut s = good();
        s.runs.clear();
        assert_eq!(s.compile().unwrap_err(), RunError::NoRuns);
        let mut s = good();
        s.runs[0].atoms.insert("p".into(), vec![true]);
        assert!(matches!(s.compile(), Err(RunError::AtomLength { .. })));
        let mut s = good();
        s.runs[0].atoms.insert("K".into(), vec![true, true]);
        assert_eq!(s.compile().unwrap_err(), RunError::InvalidAtom("K".into()));
    }

    #[test]
    fn json_round_trip() {
        let (sys, _) = brain_in_vat_example();
        let text = sys.to_json_pretty();
        assert!(text.contains("\"timeBound\": 1"));
        assert_eq!(RunSystem::from_json(&text).unwrap(), sys);
        assert!(matches!(
            RunSystem::from_json("{\"agents\":[]}"),
            Err(RunError::Json(_))
        ));
    }

    fn systems() -> impl Strategy<Value = RunSystem> {
        (1usize..=2, 1usize..=2, 1usize..=2).prop_flat_map(|(agents, runs, t)| {
            let run = (
                proptest::collection::vec(proptest::collection::vec(0u8..2, t), agents),
                proptest::collection::vec(any::<bool>(), agents),
                proptest::collection::vec(any::<bool>(), t),
            );
            proptest::collection::vec(run, runs).prop_map(move |rs| {
                let ids: Vec<Agent> = (0..agents).map(|i| ag(&format!("a{i}"))).collect();
                RunSystem {
                    agents: ids.clone(),
                    time_bound: t,
                    runs: rs
                        .into_iter()
                        .enumerate()
                        .map(|(n, (local, correct, p))| Run {
                            id: format!("r{n}"),
                            local: ids
                                .iter()
                                .zip(local)
                                .map(|(a, ts)| {
                                    (a.clone(), ts.iter().map(|x| format!("s{x}")).collect())
                                })
                                .collect(),
                            correct: ids.iter().cloned().zip(correct).collect(),
                            atoms: BTreeMap::from([("p".to_string(), p)]),
                        })
                        .collect(),
                }
            })
        })
    }

    proptest! {
        #[test]
        fn compiled_knowledge_matches_indistinguishability(sys in systems()) {
            let m = sys.compile().unwrap();
            prop_assert!(validate(&m.to_raw()).is_empty());
            for agent in &sys.agents {
                let kp = Formula::k(agent.clone(), Formula::atom("p"));
                for (run, t) in sys.points() {
                    let here = point_name(&run.id, t);
                    let expected = sys.points().all(|(r2, t2)| {
                        r2.local[agent][t2] != run.local[agent][t] || r2.atoms["p"][t2]
                    });
                    prop_assert_eq!(eval(&m, &here, &kp).unwrap(), expected);
                    prop_assert_eq!(
                        eval(&m, &here, &Formula::Correct(agent.clone())).unwrap(),
                        run.correct[agent]
                    );
                }
            }
        }
    }
}
