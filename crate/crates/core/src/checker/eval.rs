use std::collections::BTreeSet;
use std::sync::Arc;

use crate::formula::{desugar, Agent, CoreFormula, Formula};
use crate::kripke::KripkeModel;
use crate::worldset::WorldSet;

use super::CheckError;

#[derive(Clone, Debug)]
enum Node {
    Bot,
    /// `None` for atoms the model does not mention.
    Atom(Option<usize>),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    K(usize, Box<Node>),
    H(usize, Box<Node>),
}

/// A core formula with agents and atoms resolved against one model layout
/// (its sorted agent and atom lists). Every model produced by the same
/// [`ModelSpace`](crate::kripke::ModelSpace) shares that layout.
#[derive(Clone, Debug)]
pub struct CompiledFormula {
    agents: Arc<[Agent]>,
    atoms: Arc<[String]>,
    root: Node,
}

fn resolve(f: &CoreFormula, agents: &[Agent], atoms: &[String]) -> Result<Node, CheckError> {
    let agent = |a: &Agent| {
        agents
            .binary_search(a)
            .map_err(|_| CheckError::UnknownAgent(a.clone()))
    };
    Ok(match f {
        CoreFormula::Bot => Node::Bot,
        CoreFormula::Atom(p) => Node::Atom(atoms.binary_search(p).ok()),
        CoreFormula::Not(g) => Node::Not(Box::new(resolve(g, agents, atoms)?)),
        CoreFormula::And(a, b) => Node::And(
            Box::new(resolve(a, agents, atoms)?),
            Box::new(resolve(b, agents, atoms)?),
        ),
        CoreFormula::K(i, g) => Node::K(agent(i)?, Box::new(resolve(g, agents, atoms)?)),
        CoreFormula::H(i, g) => Node::H(agent(i)?, Box::new(resolve(g, agents, atoms)?)),
    })
}

impl CompiledFormula {
    pub fn compile(f: &CoreFormula, model: &KripkeModel) -> Result<Self, CheckError> {
        let (agents, atoms) = model.layout();
        Self::for_layout(f, agents, atoms)
    }

    pub(crate) fn for_layout(
        f: &CoreFormula,
        agents: Arc<[Agent]>,
        atoms: Arc<[String]>,
    ) -> Result<Self, CheckError> {
        let root = resolve(f, &agents, &atoms)?;
        Ok(CompiledFormula {
            agents,
            atoms,
            root,
        })
    }

    /// Whether `model` has the layout this formula was compiled for.
    pub fn fits(&self, model: &KripkeModel) -> bool {
        model.same_layout(&self.agents, &self.atoms)
    }

    /// The set of worlds where the formula holds.
    pub fn truth_set(&self, model: &KripkeModel) -> Result<WorldSet, CheckError> {
        if !self.fits(model) {
            return Err(CheckError::LayoutMismatch);
        }
        Ok(truth_set(&self.root, model))
    }
}

fn truth_set(node: &Node, m: &KripkeModel) -> WorldSet {
    let n = m.world_count();
    match node {
        Node::Bot => WorldSet::empty(n),
        Node::Atom(Some(i)) => m.atom_set(*i).clone(),
        Node::Atom(None) => WorldSet::empty(n),
        Node::Not(g) => truth_set(g, m).complement(n),
        Node::And(a, b) => {
            let mut s = truth_set(a, m);
            if !s.is_empty() {
                s.intersect_with(&truth_set(b, m));
            }
            s
        }
        Node::K(i, g) => {
            let body = truth_set(g, m);
            let mut out = WorldSet::empty(n);
            for block in m.frame_at(*i).blocks() {
                if block.is_subset(&body) {
                    out.union_with(block);
                }
            }
            out
        }
        Node::H(i, g) => {
            // Outside the hope domain H[i] holds vacuously. Inside, it holds on
            // a block iff the body holds on the block's hope-defined worlds.
            let body = truth_set(g, m);
            let frame = m.frame_at(*i);
            let domain = frame.hope_domain();
            let mut out = domain.complement(n);
            for block in frame.blocks() {
                if block.intersection(domain).is_subset(&body) {
                    out.union_with(block);
                }
            }
            out
        }
    }
}

fn universe(model: &KripkeModel) -> BTreeSet<Agent> {
    model.agents().iter().cloned().collect()
}

/// Desugars `f` with the model's agents as universe and compiles it.
pub fn compile_for_model(f: &Formula, model: &KripkeModel) -> Result<CompiledFormula, CheckError> {
    let core = desugar(f, &universe(model))?;
    CompiledFormula::compile(&core, model)
}

/// Worlds of `model` where `f` holds.
pub fn truth_set_of(model: &KripkeModel, f: &Formula) -> Result<WorldSet, CheckError> {
    compile_for_model(f, model)?.truth_set(model)
}

/// Truth of `f` at the named world.
pub fn eval(model: &KripkeModel, world: &str, f: &Formula) -> Result<bool, CheckError> {
    let index = model
        .world_index(world)
        .ok_or_else(|| CheckError::UnknownWorld(world.to_string()))?;
    Ok(truth_set_of(model, f)?.contains(index))
}

pub fn valid_in_model(model: &KripkeModel, f: &Formula) -> Result<bool, CheckError> {
    Ok(truth_set_of(model, f)?.len() == model.world_count())
}

/// First world (in sorted order) where `f` holds.
pub fn sat_in_model(model: &KripkeModel, f: &Formula) -> Result<Option<String>, CheckError> {
    Ok(truth_set_of(model, f)?
        .first()
        .map(|i| model.world_name(i).to_string()))
}
