//! Exhaustive enumeration of knowledge-and-hope models of a fixed size.
//!
//! A model is determined by one set partition of the worlds and one hope
//! domain per agent, plus one truth set per atom. Models are addressed by a
//! mixed-radix index whose digits, most significant first, are the agents'
//! partitions, the agents' hope domains and the atoms' truth sets. Any index
//! range can therefore be scanned independently.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::formula::Agent;
use crate::worldset::WorldSet;

use super::model::{AgentFrame, KripkeModel};

/// Default refusal threshold for enumeration.
pub const DEFAULT_MAX_MODELS: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error("world count must be at least 1")]
    NoWorlds,
    #[error("{count} models exceed the enumeration ceiling of {limit}")]
    TooManyModels { count: String, limit: u64 },
}

/// Bell numbers via the Bell triangle. `None` on overflow.
pub fn bell(n: usize) -> Option<u128> {
    let mut row: Vec<u128> = vec![1];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().expect("rows are non-empty"));
        for v in &row {
            let sum = next.last().expect("pushed above").checked_add(*v)?;
            next.push(sum);
        }
        row = next;
    }
    Some(row[0])
}

/// All set partitions of `0..n` as restricted growth strings: `rgs[i]` is the
/// block of element `i`, and each element opens at most one new block.
pub fn restricted_growth_strings(n: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, n: usize, max: Option<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let limit = max.map_or(0, |m| m + 1);
        for v in 0..=limit {
            prefix.push(v);
            extend(prefix, n, Some(max.map_or(v, |m| m.max(v))), out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::with_capacity(n), n, None, &mut out);
    out
}

/// Number of models with `worlds` worlds:
/// `Bell(w)^agents · 2^(w·agents) · 2^(w·atoms)`. `None` on overflow.
pub fn model_count(worlds: usize, agents: usize, atoms: usize) -> Option<u128> {
    let b = bell(worlds)?;
    let per_agent = b.checked_mul(1u128.checked_shl(u32::try_from(worlds).ok()?)?)?;
    let mut total = per_agent.checked_pow(u32::try_from(agents).ok()?)?;
    let bits = worlds.checked_mul(atoms)?;
    if bits >= 128 {
        return None;
    }
    total = total.checked_mul(1u128 << bits)?;
    Some(total)
}

pub(crate) fn world_names(n: usize) -> Vec<String> {
    let mut names: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
    names.sort();
    names
}

/// The indexed space of all models over fixed agents, atoms and world count.
#[derive(Clone, Debug)]
pub struct ModelSpace {
    n: usize,
    worlds: Arc<[String]>,
    agents: Arc<[Agent]>,
    atoms: Arc<[String]>,
    partitions: Vec<Vec<WorldSet>>,
    len: u64,
}

impl ModelSpace {
    /// Fails if the space holds more than `max_models` models.
    pub fn new(
        agents: &BTreeSet<Agent>,
        atoms: &BTreeSet<String>,
        world_count: usize,
        max_models: u64,
    ) -> Result<Self, EnumerationError> {
        if world_count == 0 {
            return Err(EnumerationError::NoWorlds);
        }
        let len = match model_count(world_count, agents.len(), atoms.len()) {
            Some(c) if c <= u128::from(max_models) => c as u64,
            Some(c) => {
                return Err(EnumerationError::TooManyModels {
                    count: c.to_string(),
                    limit: max_models,
                })
            }
            None => {
                return Err(EnumerationError::TooManyModels {
                    count: "more than 2^128".into(),
                    limit: max_models,
                })
            }
        };
        let n = world_count;
        let partitions = restricted_growth_strings(n)
            .into_iter()
            .map(|rgs| {
                let blocks = rgs.iter().max().map_or(0, |m| m + 1);
                let mut sets = vec![WorldSet::empty(n); blocks];
                for (w, b) in rgs.iter().enumerate() {
                    sets[*b].insert(w);
                }
                sets
            })
            .collect();
        Ok(ModelSpace {
            n,
            worlds: world_names(n).into(),
            agents: agents.iter().cloned().collect(),
            atoms: atoms.iter().cloned().collect(),
            partitions,
            len,
        })
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn world_count(&self) -> usize {
        self.n
    }

    pub fn agents(&self) -> &Arc<[Agent]> {
        &self.agents
    }

    pub fn atoms(&self) -> &Arc<[String]> {
        &self.atoms
    }

    /// The model at `index` (`index < len`).
    pub fn model_at(&self, index: u64) -> KripkeModel {
        assert!(index < self.len, "model index {index} out of range");
        let subsets = 1u64 << self.n;
        let mut rest = index;
        let mut valuation = vec![WorldSet::default(); self.atoms.len()];
        for slot in valuation.iter_mut().rev() {
            *slot = WorldSet::from_mask(self.n, rest % subsets);
            rest /= subsets;
        }
        let mut domains = vec![WorldSet::default(); self.agents.len()];
        for slot in domains.iter_mut().rev() {
            *slot = WorldSet::from_mask(self.n, rest % subsets);
            rest /= subsets;
        }
        let bell = self.partitions.len() as u64;
        let mut partition_ix = vec![0usize; self.agents.len()];
        for slot in partition_ix.iter_mut().rev() {
            *slot = (rest % bell) as usize;
            rest /= bell;
        }
        let frames = partition_ix
            .into_iter()
            .zip(domains)
            .map(|(p, hope_domain)| AgentFrame {
                blocks: self.partitions[p].clone(),
                hope_domain,
            })
            .collect();
        KripkeModel {
            worlds: self.worlds.clone(),
            agents: self.agents.clone(),
            atoms: self.atoms.clone(),
            frames,
            valuation,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = KripkeModel> + '_ {
        (0..self.len).map(move |i| self.model_at(i))
    }
}

/// Every model with exactly `world_count` worlds over the given agents and
/// atoms, in index order.
pub fn enumerate_models(
    agents: &BTreeSet<Agent>,
    atoms: &BTreeSet<String>,
    world_count: usize,
    max_models: u64,
) -> Result<impl Iterator<Item = KripkeModel>, EnumerationError> {
    let space = ModelSpace::new(agents, atoms, world_count, max_models)?;
    Ok((0..space.len()).map(move |i| space.model_at(i)))
}
