use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::formula::{is_valuation_atom, Agent};
use crate::worldset::WorldSet;

use super::ModelError;

/// Accessibility data of one agent: the blocks of its K-partition and the
/// domain of its hope relation. `H = K ∩ (domain × domain)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AgentFrame {
    pub(crate) blocks: Vec<WorldSet>,
    pub(crate) hope_domain: WorldSet,
}

impl AgentFrame {
    /// Blocks ordered by their smallest world.
    pub fn blocks(&self) -> &[WorldSet] {
        &self.blocks
    }

    pub fn hope_domain(&self) -> &WorldSet {
        &self.hope_domain
    }

    pub fn block_of(&self, world: usize) -> &WorldSet {
        self.blocks
            .iter()
            .find(|b| b.contains(world))
            .expect("partition covers every world")
    }

    pub fn knows(&self, s: usize, t: usize) -> bool {
        self.block_of(s).contains(t)
    }

    pub fn hopes(&self, s: usize, t: usize) -> bool {
        self.hope_domain.contains(s) && self.hope_domain.contains(t) && self.knows(s, t)
    }
}

/// A finite Kripke model for knowledge and hope.
///
/// Worlds, agents and atoms are kept sorted; world and atom indices refer to
/// positions in those sorted lists. Atoms not listed are false everywhere.
#[derive(Clone, Debug)]
pub struct KripkeModel {
    pub(crate) worlds: Arc<[String]>,
    pub(crate) agents: Arc<[Agent]>,
    pub(crate) atoms: Arc<[String]>,
    pub(crate) frames: Vec<AgentFrame>,
    pub(crate) valuation: Vec<WorldSet>,
}

impl PartialEq for KripkeModel {
    fn eq(&self, other: &Self) -> bool {
        self.worlds == other.worlds
            && self.agents == other.agents
            && self.frames == other.frames
            && self.valuation_map() == other.valuation_map()
    }
}

impl Eq for KripkeModel {}

impl KripkeModel {
    pub fn builder<I, S>(worlds: I) -> ModelBuilder
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ModelBuilder {
            worlds: worlds.into_iter().map(Into::into).collect(),
            agents: Vec::new(),
            valuation: Vec::new(),
        }
    }

    pub fn world_count(&self) -> usize {
        self.worlds.len()
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn world_name(&self, index: usize) -> &str {
        &self.worlds[index]
    }

    pub fn world_index(&self, name: &str) -> Option<usize> {
        self.worlds.binary_search_by(|w| w.as_str().cmp(name)).ok()
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn agent_index(&self, agent: &Agent) -> Option<usize> {
        self.agents.binary_search(agent).ok()
    }

    pub fn frame(&self, agent: &Agent) -> Option<&AgentFrame> {
        self.agent_index(agent).map(|i| &self.frames[i])
    }

    pub(crate) fn frame_at(&self, index: usize) -> &AgentFrame {
        &self.frames[index]
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub(crate) fn atom_index(&self, atom: &str) -> Option<usize> {
        self.atoms.binary_search_by(|a| a.as_str().cmp(atom)).ok()
    }

    pub(crate) fn atom_set(&self, index: usize) -> &WorldSet {
        &self.valuation[index]
    }

    /// Worlds where `atom` holds; empty for atoms the model does not mention.
    pub fn truth_of(&self, atom: &str) -> WorldSet {
        match self.atom_index(atom) {
            Some(i) => self.valuation[i].clone(),
            None => WorldSet::empty(self.world_count()),
        }
    }

    pub(crate) fn same_layout(&self, agents: &Arc<[Agent]>, atoms: &Arc<[String]>) -> bool {
        (Arc::ptr_eq(&self.agents, agents) || self.agents == *agents)
            && (Arc::ptr_eq(&self.atoms, atoms) || self.atoms == *atoms)
    }

    pub(crate) fn layout(&self) -> (Arc<[Agent]>, Arc<[String]>) {
        (self.agents.clone(), self.atoms.clone())
    }

    pub fn names(&self, set: &WorldSet) -> Vec<String> {
        set.iter().map(|i| self.worlds[i].clone()).collect()
    }

    /// Valuation restricted to atoms true somewhere.
    fn valuation_map(&self) -> BTreeMap<&str, &WorldSet> {
        self.atoms
            .iter()
            .zip(&self.valuation)
            .filter(|(_, s)| !s.is_empty())
            .map(|(a, s)| (a.as_str(), s))
            .collect()
    }

    /// K-partition of `agent` as lists of world names.
    pub fn partition_names(&self, agent: &Agent) -> Option<Vec<Vec<String>>> {
        self.frame(agent)
            .map(|f| f.blocks.iter().map(|b| self.names(b)).collect())
    }

    pub fn hope_domain_names(&self, agent: &Agent) -> Option<Vec<String>> {
        self.frame(agent).map(|f| self.names(&f.hope_domain))
    }

    /// The explicit K relation of an agent as world-name pairs.
    pub fn k_pairs(&self, agent: &Agent) -> Option<BTreeSet<(String, String)>> {
        let frame = self.frame(agent)?;
        let mut out = BTreeSet::new();
        for block in &frame.blocks {
            for s in block.iter() {
                for t in block.iter() {
                    out.insert((self.worlds[s].clone(), self.worlds[t].clone()));
                }
            }
        }
        Some(out)
    }

    /// The explicit H relation of an agent as world-name pairs.
    pub fn h_pairs(&self, agent: &Agent) -> Option<BTreeSet<(String, String)>> {
        let frame = self.frame(agent)?;
        let mut out = BTreeSet::new();
        for block in &frame.blocks {
            let dom = block.intersection(&frame.hope_domain);
            for s in dom.iter() {
                for t in dom.iter() {
                    out.insert((self.worlds[s].clone(), self.worlds[t].clone()));
                }
            }
        }
        Some(out)
    }
}

/// Incremental construction of a [`KripkeModel`] from world names.
#[derive(Clone, Debug)]
pub struct ModelBuilder {
    worlds: Vec<String>,
    agents: Vec<(String, Vec<Vec<String>>, Vec<String>)>,
    valuation: Vec<(String, Vec<String>)>,
}

fn strings<I, S>(items: I) -> Vec<String>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    items.into_iter().map(Into::into).collect()
}

impl ModelBuilder {
    /// Declares an agent with its K-partition and hope domain.
    pub fn agent<B, W, S, D, T>(
        mut self,
        id: impl Into<String>,
        partition: B,
        hope_domain: D,
    ) -> Self
    where
        B: IntoIterator<Item = W>,
        W: IntoIterator<Item = S>,
        S: Into<String>,
        D: IntoIterator<Item = T>,
        T: Into<String>,
    {
        let blocks = partition.into_iter().map(strings).collect();
        self.agents.push((id.into(), blocks, strings(hope_domain)));
        self
    }

    pub fn atom<W, S>(mut self, name: impl Into<String>, worlds: W) -> Self
    where
        W: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.valuation.push((name.into(), strings(worlds)));
        self
    }

    pub fn build(self) -> Result<KripkeModel, ModelError> {
        let mut worlds = self.worlds;
        if worlds.is_empty() {
            return Err(ModelError::NoWorlds);
        }
        worlds.sort();
        if let Some(w) = worlds.windows(2).find(|w| w[0] == w[1]) {
            return Err(ModelError::DuplicateWorld(w[0].clone()));
        }
        if let Some(w) = worlds.iter().find(|w| w.is_empty()) {
            return Err(ModelError::InvalidWorld(w.clone()));
        }
        let n = worlds.len();
        let index = |name: &str| -> Result<usize, ModelError> {
            worlds
                .binary_search_by(|w| w.as_str().cmp(name))
                .map_err(|_| ModelError::UnknownWorld(name.to_string()))
        };

        let mut agents: Vec<(Agent, AgentFrame)> = Vec::new();
        for (id, partition, domain) in &self.agents {
            let agent = Agent::new(id.clone()).map_err(|_| ModelError::InvalidAgent(id.clone()))?;
            if agents.iter().any(|(a, _)| *a == agent) {
                return Err(ModelError::DuplicateAgent(agent));
            }
            let mut covered = WorldSet::empty(n);
            let mut blocks = Vec::with_capacity(partition.len());
            for block in partition {
                if block.is_empty() {
                    return Err(ModelError::EmptyBlock(agent));
                }
                let mut set = WorldSet::empty(n);
                for w in block {
                    let i = index(w)?;
                    if covered.contains(i) || set.contains(i) {
                        return Err(ModelError::OverlappingBlocks {
                            agent,
                            world: w.clone(),
                        });
                    }
                    set.insert(i);
                }
                covered.union_with(&set);
                blocks.push(set);
            }
            if let Some(missing) = covered.complement(n).first() {
                return Err(ModelError::UncoveredWorld {
                    agent,
                    world: worlds[missing].clone(),
                });
            }
            let mut hope_domain = WorldSet::empty(n);
            for w in domain {
                hope_domain.insert(index(w)?);
            }
            blocks.sort_by_key(|b| b.first());
            agents.push((
                agent,
                AgentFrame {
                    blocks,
                    hope_domain,
                },
            ));
        }
        agents.sort_by(|a, b| a.0.cmp(&b.0));

        let mut valuation: BTreeMap<String, WorldSet> = BTreeMap::new();
        for (atom, ws) in &self.valuation {
            if !is_valuation_atom(atom) {
                return Err(ModelError::InvalidAtom(atom.clone()));
            }
            let set = valuation
                .entry(atom.clone())
                .or_insert_with(|| WorldSet::empty(n));
            for w in ws {
                set.insert(index(w)?);
            }
        }

        let (agent_ids, frames): (Vec<Agent>, Vec<AgentFrame>) = agents.into_iter().unzip();
        let (atoms, sets): (Vec<String>, Vec<WorldSet>) = valuation.into_iter().unzip();
        Ok(KripkeModel {
            worlds: worlds.into(),
            agents: agent_ids.into(),
            atoms: atoms.into(),
            frames,
            valuation: sets,
        })
    }
}

/// Hope domains induced by correctness: agent `i` is H-defined exactly at the
/// worlds where it is correct, so `!H[i] bot` holds precisely there.
///
/// Agents without an entry in `correct` get an empty domain.
pub fn hope_from_correctness(
    partitions: &BTreeMap<Agent, Vec<Vec<String>>>,
    correct: &BTreeMap<Agent, BTreeSet<String>>,
) -> BTreeMap<Agent, BTreeSet<String>> {
    partitions
        .iter()
        .map(|(agent, blocks)| {
            let worlds: BTreeSet<&String> = blocks.iter().flatten().collect();
            let domain = correct
                .get(agent)
                .map(|c| c.iter().filter(|w| worlds.contains(w)).cloned().collect())
                .unwrap_or_default();
            (agent.clone(), domain)
        })
        .collect()
}
