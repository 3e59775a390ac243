//! JSON form of models.
//!
//! Canonical documents give each agent's K-partition (`"K"`) and hope domain
//! (`"Hdom"`); raw documents give explicit pair lists (`"Krel"`, `"Hrel"`).
//! Both are routed through [`validate`](super::validate) on load.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::formula::Agent;

use super::model::KripkeModel;
use super::raw::{canonicalize, validate, FrameViolation, RawModel, Relation};
use super::ModelError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub worlds: Vec<String>,
    #[serde(default)]
    pub agents: Vec<String>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<BTreeMap<String, Vec<Vec<String>>>>,
    #[serde(rename = "Hdom", default, skip_serializing_if = "Option::is_none")]
    pub hdom: Option<BTreeMap<String, Vec<String>>>,
    #[serde(rename = "Krel", default, skip_serializing_if = "Option::is_none")]
    pub krel: Option<BTreeMap<String, Vec<(String, String)>>>,
    #[serde(rename = "Hrel", default, skip_serializing_if = "Option::is_none")]
    pub hrel: Option<BTreeMap<String, Vec<(String, String)>>>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
}

fn agent(id: &str) -> Result<Agent, ModelError> {
    Agent::new(id).map_err(|_| ModelError::InvalidAgent(id.to_string()))
}

fn agent_map<V>(
    map: &Option<BTreeMap<String, V>>,
    mut convert: impl FnMut(&V) -> Relation,
) -> Result<BTreeMap<Agent, Relation>, ModelError> {
    let mut out = BTreeMap::new();
    if let Some(map) = map {
        for (id, value) in map {
            out.insert(agent(id)?, convert(value));
        }
    }
    Ok(out)
}

impl ModelDocument {
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    pub fn is_raw(&self) -> bool {
        self.krel.is_some() || self.hrel.is_some()
    }

    /// Expands either form into explicit relations. Canonical documents
    /// contribute `K = ⋃ block × block` and `H = K ∩ (Hdom × Hdom)`.
    pub fn to_raw(&self) -> Result<RawModel, ModelError> {
        let canonical = self.k.is_some() || self.hdom.is_some();
        if canonical && self.is_raw() {
            return Err(ModelError::MixedForms);
        }
        let agents = self
            .agents
            .iter()
            .map(|a| agent(a))
            .collect::<Result<Vec<_>, _>>()?;
        for id in self
            .k
            .iter()
            .flat_map(|m| m.keys())
            .chain(self.hdom.iter().flat_map(|m| m.keys()))
        {
            if !agents.contains(&agent(id)?) {
                return Err(ModelError::UnknownAgent(agent(id)?));
            }
        }
        let (k_relation, h_relation) = if self.is_raw() {
            let pairs = |v: &Vec<(String, String)>| v.iter().cloned().collect::<Relation>();
            (agent_map(&self.krel, pairs)?, agent_map(&self.hrel, pairs)?)
        } else {
            for (id, blocks) in self.k.iter().flatten() {
                let mut seen = BTreeSet::new();
                if let Some(w) = blocks.iter().flatten().find(|w| !seen.insert(*w)) {
                    return Err(ModelError::OverlappingBlocks {
                        agent: agent(id)?,
                        world: w.clone(),
                    });
                }
            }
            let k_relation = agent_map(&self.k, |blocks| {
                blocks
                    .iter()
                    .flat_map(|b| {
                        b.iter()
                            .flat_map(move |s| b.iter().map(move |t| (s.clone(), t.clone())))
                    })
                    .collect()
            })?;
            let no_domains = BTreeMap::new();
            let domains = self.hdom.as_ref().unwrap_or(&no_domains);
            if let Some(w) = domains
                .values()
                .flatten()
                .find(|w| !self.worlds.contains(w))
            {
                return Err(ModelError::UnknownWorld(w.clone()));
            }
            let mut h_relation = BTreeMap::new();
            for (a, k) in &k_relation {
                let dom: BTreeSet<&String> = domains
                    .get(a.id())
                    .map(|d| d.iter().collect())
                    .unwrap_or_default();
                let h: Relation = k
                    .iter()
                    .filter(|(s, t)| dom.contains(s) && dom.contains(t))
                    .cloned()
                    .collect();
                h_relation.insert(a.clone(), h);
            }
            (k_relation, h_relation)
        };
        let valuation = self
            .valuation
            .iter()
            .map(|(atom, ws)| (atom.clone(), ws.iter().cloned().collect()))
            .collect();
        RawModel::new(
            self.worlds.clone(),
            agents,
            k_relation,
            h_relation,
            valuation,
        )
    }

    /// Loads either form. Frame violations are returned as data in `Err`.
    pub fn load(&self) -> Result<Result<KripkeModel, Vec<FrameViolation>>, ModelError> {
        let raw = self.to_raw()?;
        let violations = validate(&raw);
        if !violations.is_empty() {
            return Ok(Err(violations));
        }
        canonicalize(&raw).map(Ok)
    }
}

impl KripkeModel {
    pub fn to_document(&self) -> ModelDocument {
        let mut k = BTreeMap::new();
        let mut hdom = BTreeMap::new();
        for a in self.agents.iter() {
            k.insert(
                a.id().to_string(),
                self.partition_names(a).expect("own agent"),
            );
            hdom.insert(
                a.id().to_string(),
                self.hope_domain_names(a).expect("own agent"),
            );
        }
        let valuation = self
            .atoms
            .iter()
            .zip(&self.valuation)
            .map(|(atom, set)| (atom.clone(), self.names(set)))
            .collect();
        ModelDocument {
            worlds: self.worlds.to_vec(),
            agents: self.agents.iter().map(|a| a.id().to_string()).collect(),
            k: Some(k),
            hdom: Some(hdom),
            krel: None,
            hrel: None,
            valuation,
        }
    }

    /// Parses a model document and requires it to satisfy every frame condition.
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        ModelDocument::from_json(text)?
            .load()?
            .map_err(ModelError::FrameViolations)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self.to_document()).expect("documents always serialize")
    }
}
