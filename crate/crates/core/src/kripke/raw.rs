use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::formula::{is_valuation_atom, Agent};

use super::model::KripkeModel;
use super::ModelError;

/// Relational input: explicit K and H relations per agent, before any frame
/// condition has been checked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawModel {
    worlds: Vec<String>,
    agents: Vec<Agent>,
    k_relation: BTreeMap<Agent, BTreeSet<(String, String)>>,
    h_relation: BTreeMap<Agent, BTreeSet<(String, String)>>,
    valuation: BTreeMap<String, BTreeSet<String>>,
}

pub type Relation = BTreeSet<(String, String)>;

impl RawModel {
    /// Checks only that every name refers to a declared world, agent or
    /// valid atom. Agents missing from a relation map get the empty relation.
    pub fn new(
        worlds: Vec<String>,
        agents: Vec<Agent>,
        k_relation: BTreeMap<Agent, Relation>,
        h_relation: BTreeMap<Agent, Relation>,
        valuation: BTreeMap<String, BTreeSet<String>>,
    ) -> Result<Self, ModelError> {
        let mut worlds = worlds;
        if worlds.is_empty() {
            return Err(ModelError::NoWorlds);
        }
        worlds.sort();
        if let Some(w) = worlds.windows(2).find(|w| w[0] == w[1]) {
            return Err(ModelError::DuplicateWorld(w[0].clone()));
        }
        let mut agents = agents;
        agents.sort();
        if let Some(a) = agents.windows(2).find(|a| a[0] == a[1]) {
            return Err(ModelError::DuplicateAgent(a[0].clone()));
        }
        let known = |w: &String| worlds.binary_search(w).is_ok();
        for rel in [&k_relation, &h_relation] {
            for (agent, pairs) in rel {
                if agents.binary_search(agent).is_err() {
                    return Err(ModelError::UnknownAgent(agent.clone()));
                }
                for (s, t) in pairs {
                    for w in [s, t] {
                        if !known(w) {
                            return Err(ModelError::UnknownWorld(w.clone()));
                        }
                    }
                }
            }
        }
        for (atom, ws) in &valuation {
            if !is_valuation_atom(atom) {
                return Err(ModelError::InvalidAtom(atom.clone()));
            }
            if let Some(w) = ws.iter().find(|w| !known(w)) {
                return Err(ModelError::UnknownWorld(w.clone()));
            }
        }
        let mut k_relation = k_relation;
        let mut h_relation = h_relation;
        for a in &agents {
            k_relation.entry(a.clone()).or_default();
            h_relation.entry(a.clone()).or_default();
        }
        Ok(RawModel {
            worlds,
            agents,
            k_relation,
            h_relation,
            valuation,
        })
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn k_relation(&self, agent: &Agent) -> Option<&Relation> {
        self.k_relation.get(agent)
    }

    pub fn h_relation(&self, agent: &Agent) -> Option<&Relation> {
        self.h_relation.get(agent)
    }

    pub fn valuation(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.valuation
    }
}

impl KripkeModel {
    /// Writes the model back out as explicit relations.
    pub fn to_raw(&self) -> RawModel {
        let mut k_relation = BTreeMap::new();
        let mut h_relation = BTreeMap::new();
        for agent in self.agents.iter() {
            k_relation.insert(agent.clone(), self.k_pairs(agent).expect("own agent"));
            h_relation.insert(agent.clone(), self.h_pairs(agent).expect("own agent"));
        }
        let valuation = self
            .atoms
            .iter()
            .zip(&self.valuation)
            .filter(|(_, s)| !s.is_empty())
            .map(|(a, s)| (a.clone(), self.names(s).into_iter().collect()))
            .collect();
        RawModel {
            worlds: self.worlds.to_vec(),
            agents: self.agents.to_vec(),
            k_relation,
            h_relation,
            valuation,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ViolationKind {
    #[serde(rename = "K-not-reflexive")]
    KNotReflexive,
    #[serde(rename = "K-not-symmetric")]
    KNotSymmetric,
    #[serde(rename = "K-not-transitive")]
    KNotTransitive,
    #[serde(rename = "H-not-symmetric")]
    HNotSymmetric,
    #[serde(rename = "H-not-transitive")]
    HNotTransitive,
    #[serde(rename = "H-not-subset-of-K")]
    HNotSubsetOfK,
    #[serde(rename = "mixed-condition-violated")]
    MixedConditionViolated,
}

impl ViolationKind {
    pub const ALL: [ViolationKind; 7] = [
        ViolationKind::KNotReflexive,
        ViolationKind::KNotSymmetric,
        ViolationKind::KNotTransitive,
        ViolationKind::HNotSymmetric,
        ViolationKind::HNotTransitive,
        ViolationKind::HNotSubsetOfK,
        ViolationKind::MixedConditionViolated,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ViolationKind::KNotReflexive => "K-not-reflexive",
            ViolationKind::KNotSymmetric => "K-not-symmetric",
            ViolationKind::KNotTransitive => "K-not-transitive",
            ViolationKind::HNotSymmetric => "H-not-symmetric",
            ViolationKind::HNotTransitive => "H-not-transitive",
            ViolationKind::HNotSubsetOfK => "H-not-subset-of-K",
            ViolationKind::MixedConditionViolated => "mixed-condition-violated",
        }
    }
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A failed frame condition for one agent, with worlds instantiating it.
///
/// Witness shapes: reflexivity `(s)`; symmetry, subset and mixed condition
/// `(s, t)`; transitivity `(s, t, u)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameViolation {
    pub agent: Agent,
    pub kind: ViolationKind,
    pub witness: Vec<String>,
}

impl fmt::Display for FrameViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "agent {}: {} at ({})",
            self.agent,
            self.kind,
            self.witness.join(", ")
        )
    }
}

struct Matrix {
    n: usize,
    bits: Vec<bool>,
}

impl Matrix {
    fn from_pairs(worlds: &[String], pairs: &Relation) -> Self {
        let n = worlds.len();
        let mut bits = vec![false; n * n];
        for (s, t) in pairs {
            let i = worlds.binary_search(s).expect("checked in RawModel::new");
            let j = worlds.binary_search(t).expect("checked in RawModel::new");
            bits[i * n + j] = true;
        }
        Matrix { n, bits }
    }

    fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.n + j]
    }

    fn defined(&self, i: usize) -> bool {
        (0..self.n).any(|j| self.get(i, j))
    }
}

fn first_asymmetry(m: &Matrix) -> Option<(usize, usize)> {
    (0..m.n)
        .flat_map(|i| (0..m.n).map(move |j| (i, j)))
        .find(|&(i, j)| m.get(i, j) && !m.get(j, i))
}

fn first_intransitivity(m: &Matrix) -> Option<(usize, usize, usize)> {
    for i in 0..m.n {
        for j in (0..m.n).filter(|&j| m.get(i, j)) {
            if let Some(k) = (0..m.n).find(|&k| m.get(j, k) && !m.get(i, k)) {
                return Some((i, j, k));
            }
        }
    }
    None
}

/// Checks the frame conditions for every agent, reporting the first witness
/// of each failed condition family.
pub fn validate(raw: &RawModel) -> Vec<FrameViolation> {
    let w = &raw.worlds;
    let n = w.len();
    let mut out = Vec::new();
    for agent in &raw.agents {
        let k = Matrix::from_pairs(w, &raw.k_relation[agent]);
        let h = Matrix::from_pairs(w, &raw.h_relation[agent]);
        let mut report = |kind, idx: &[usize]| {
            out.push(FrameViolation {
                agent: agent.clone(),
                kind,
                witness: idx.iter().map(|&i| w[i].clone()).collect(),
            })
        };
        if let Some(s) = (0..n).find(|&s| !k.get(s, s)) {
            report(ViolationKind::KNotReflexive, &[s]);
        }
        if let Some((s, t)) = first_asymmetry(&k) {
            report(ViolationKind::KNotSymmetric, &[s, t]);
        }
        if let Some((s, t, u)) = first_intransitivity(&k) {
            report(ViolationKind::KNotTransitive, &[s, t, u]);
        }
        if let Some((s, t)) = first_asymmetry(&h) {
            report(ViolationKind::HNotSymmetric, &[s, t]);
        }
        if let Some((s, t, u)) = first_intransitivity(&h) {
            report(ViolationKind::HNotTransitive, &[s, t, u]);
        }
        let pairs = || (0..n).flat_map(|s| (0..n).map(move |t| (s, t)));
        if let Some((s, t)) = pairs().find(|&(s, t)| h.get(s, t) && !k.get(s, t)) {
            report(ViolationKind::HNotSubsetOfK, &[s, t]);
        }
        if let Some((s, t)) =
            pairs().find(|&(s, t)| k.get(s, t) && h.defined(s) && h.defined(t) && !h.get(s, t))
        {
            report(ViolationKind::MixedConditionViolated, &[s, t]);
        }
    }
    out
}

/// Turns a raw model satisfying every frame condition into canonical form:
/// K-classes become the partition, H-reflexive worlds the hope domain.
pub fn canonicalize(raw: &RawModel) -> Result<KripkeModel, ModelError> {
    let violations = validate(raw);
    if !violations.is_empty() {
        return Err(ModelError::FrameViolations(violations));
    }
    let mut builder = KripkeModel::builder(raw.worlds.iter().cloned());
    for agent in &raw.agents {
        let k = &raw.k_relation[agent];
        let mut seen: BTreeSet<&String> = BTreeSet::new();
        let mut blocks = Vec::new();
        for s in &raw.worlds {
            if seen.contains(s) {
                continue;
            }
            let class: Vec<String> = raw
                .worlds
                .iter()
                .filter(|t| k.contains(&(s.clone(), (*t).clone())))
                .cloned()
                .collect();
            seen.extend(raw.worlds.iter().filter(|t| class.contains(t)));
            blocks.push(class);
        }
        let h = &raw.h_relation[agent];
        let domain: Vec<String> = raw
            .worlds
            .iter()
            .filter(|s| h.contains(&((*s).clone(), (*s).clone())))
            .cloned()
            .collect();
        builder = builder.agent(agent.id(), blocks, domain);
    }
    for (atom, ws) in &raw.valuation {
        builder = builder.atom(atom.clone(), ws.iter().cloned());
    }
    builder.build()
}
