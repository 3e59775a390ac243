#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use hopecheck::formula::{Agent, AgentGroup, Formula};
use hopecheck::kripke::{KripkeModel, ModelSpace};
use hopecheck::runs::{Run, RunSystem};
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

pub fn ag(id: &str) -> Agent {
    Agent::new(id).unwrap()
}

pub fn agents(ids: &[&str]) -> BTreeSet<Agent> {
    ids.iter().map(|i| ag(i)).collect()
}

pub fn atoms(names: &[&str]) -> BTreeSet<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Formulas over the given agents and atoms `p`, `q`, using every
/// constructor. `byz(f)` stays within `f <= agents.len()`.
pub fn formula(ids: Vec<Agent>, depth: u32) -> impl Strategy<Value = Formula> {
    let n = ids.len();
    let agent = proptest::sample::select(ids.clone());
    let leaf = prop_oneof![
        Just(Formula::Bot),
        Just(Formula::Top),
        proptest::sample::select(vec!["p", "q"]).prop_map(Formula::atom),
        agent.clone().prop_map(Formula::Correct),
        (
            agent.clone(),
            proptest::sample::select(vec!["knight", "knave"])
        )
            .prop_map(|(a, t)| Formula::type_atom(a, t)),
        (0..=n).prop_map(Formula::Byz),
    ];
    leaf.prop_recursive(depth, 24, 2, move |inner| {
        let agent = proptest::sample::select(ids.clone());
        let group = proptest::sample::subsequence(ids.clone(), 1..=ids.len())
            .prop_map(|g| AgentGroup::new(g).unwrap());
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::iff(a, b)),
            (agent.clone(), inner.clone()).prop_map(|(a, f)| Formula::k(a, f)),
            (agent.clone(), inner.clone()).prop_map(|(a, f)| Formula::h(a, f)),
            (agent, inner.clone()).prop_map(|(a, f)| Formula::b(a, f)),
            (group, inner).prop_map(|(g, f)| Formula::mutual_hope(g, f)),
        ]
    })
}

/// A uniformly chosen model from the enumeration space.
pub fn model(
    agents: BTreeSet<Agent>,
    atoms: BTreeSet<String>,
    max_worlds: usize,
) -> impl Strategy<Value = KripkeModel> {
    (1..=max_worlds, any::<u64>()).prop_map(move |(w, seed)| {
        let space = ModelSpace::new(&agents, &atoms, w, u64::MAX).unwrap();
        space.model_at(seed % space.len())
    })
}

/// Run systems with up to `max_runs` runs, `max_agents` agents and time
/// bound up to `max_time`, over one atom `e` and two local-state tokens.
pub fn run_system(
    max_runs: usize,
    max_agents: usize,
    max_time: usize,
) -> impl Strategy<Value = RunSystem> {
    (1..=max_agents, 1..=max_runs, 1..=max_time).prop_flat_map(|(n, runs, t)| {
        let run = (
            proptest::collection::vec(proptest::collection::vec(0u8..2, t), n),
            proptest::collection::vec(any::<bool>(), n),
            proptest::collection::vec(any::<bool>(), t),
        );
        proptest::collection::vec(run, runs).prop_map(move |rs| {
            let ids: Vec<Agent> = (0..n).map(|i| ag(&format!("a{i}"))).collect();
            RunSystem {
                agents: ids.clone(),
                time_bound: t,
                runs: rs
                    .into_iter()
                    .enumerate()
                    .map(|(k, (local, correct, e))| Run {
                        id: format!("r{k}"),
                        local: ids
                            .iter()
                            .zip(local)
                            .map(|(a, ts)| {
                                (a.clone(), ts.iter().map(|x| format!("s{x}")).collect())
                            })
                            .collect(),
                        correct: ids.iter().cloned().zip(correct).collect(),
                        atoms: BTreeMap::from([("e".to_string(), e)]),
                    })
                    .collect(),
            }
        })
    })
}

/// `count` values drawn from `strategy` with a fixed seed.
pub fn samples<S: Strategy>(strategy: S, count: usize) -> Vec<S::Value> {
    let mut runner = TestRunner::new_with_rng(
        Config::default(),
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    );
    (0..count)
        .map(|_| strategy.new_tree(&mut runner).unwrap().current())
        .collect()
}

/// n choose k.
pub fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Bell numbers through Stirling numbers of the second kind.
pub fn bell_by_stirling(n: usize) -> u128 {
    let mut s = vec![vec![0u128; n + 1]; n + 1];
    s[0][0] = 1;
    for i in 1..=n {
        for k in 1..=i {
            s[i][k] = k as u128 * s[i - 1][k] + s[i - 1][k - 1];
        }
    }
    s[n].iter().sum()
}
