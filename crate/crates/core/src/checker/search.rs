use std::collections::BTreeSet;

use rayon::prelude::*;
use serde_json::json;

use crate::formula::{analyze_core, desugar, Agent, CoreFormula, Formula};
use crate::kripke::{model_count, EnumerationError, KripkeModel, ModelSpace, DEFAULT_MAX_MODELS};

use super::eval::CompiledFormula;
use super::CheckError;

/// Enumeration limits for bounded searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Refuse searches that would visit more models than this in total.
    pub max_models: u64,
    /// Scan index ranges on the rayon pool. Results are identical either way.
    pub parallel: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_models: DEFAULT_MAX_MODELS,
            parallel: true,
        }
    }
}

/// Outcome of a bounded validity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    NoCounterexampleUpTo { bound: usize },
    Counterexample { model: KripkeModel, world: String },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::NoCounterexampleUpTo { .. })
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Verdict::NoCounterexampleUpTo { bound } => {
                json!({"verdict": "valid-up-to", "bound": bound})
            }
            Verdict::Counterexample { model, world } => json!({
                "verdict": "counterexample",
                "model": model.to_json_value(),
                "world": world,
            }),
        }
    }
}

/// Outcome of a bounded satisfiability search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatVerdict {
    Satisfiable { model: KripkeModel, world: String },
    UnsatisfiableUpTo { bound: usize },
}

impl SatVerdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatVerdict::Satisfiable { .. })
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            SatVerdict::UnsatisfiableUpTo { bound } => {
                json!({"verdict": "unsat-up-to", "bound": bound})
            }
            SatVerdict::Satisfiable { model, world } => json!({
                "verdict": "satisfiable",
                "model": model.to_json_value(),
                "world": world,
            }),
        }
    }
}

/// Total number of models a scan over `1..=max_worlds` visits, checked
/// against the ceiling before anything is enumerated.
fn check_budget(
    agents: usize,
    atoms: usize,
    max_worlds: usize,
    config: &SearchConfig,
) -> Result<(), CheckError> {
    let mut total: u128 = 0;
    for w in 1..=max_worlds {
        let c = model_count(w, agents, atoms).and_then(|c| total.checked_add(c));
        match c {
            Some(t) if t <= u128::from(config.max_models) => total = t,
            other => {
                return Err(CheckError::Enumeration(EnumerationError::TooManyModels {
                    count: other.map_or("more than 2^128".into(), |t| t.to_string()),
                    limit: config.max_models,
                }))
            }
        }
    }
    Ok(())
}

/// Scans models with 1..=max_worlds worlds in canonical order and returns the
/// first model with a world where `f` evaluates to `want`.
fn first_model_where(
    core: &CoreFormula,
    max_worlds: usize,
    want: bool,
    config: &SearchConfig,
) -> Result<Option<(KripkeModel, String)>, CheckError> {
    if max_worlds == 0 {
        return Err(CheckError::Enumeration(EnumerationError::NoWorlds));
    }
    let analysis = analyze_core(core);
    check_budget(
        analysis.agents.len(),
        analysis.atoms.len(),
        max_worlds,
        config,
    )?;
    for w in 1..=max_worlds {
        let space = ModelSpace::new(&analysis.agents, &analysis.atoms, w, config.max_models)?;
        let compiled =
            CompiledFormula::for_layout(core, space.agents().clone(), space.atoms().clone())?;
        let witness = |index: u64| -> Option<(u64, usize)> {
            let model = space.model_at(index);
            let truth = compiled.truth_set(&model).expect("same layout");
            let hits = if want { truth } else { truth.complement(w) };
            hits.first().map(|world| (index, world))
        };
        let found = if config.parallel {
            (0..space.len()).into_par_iter().find_map_first(witness)
        } else {
            (0..space.len()).find_map(witness)
        };
        if let Some((index, world)) = found {
            let model = space.model_at(index);
            let name = model.world_name(world).to_string();
            return Ok(Some((model, name)));
        }
    }
    Ok(None)
}

/// Searches for a countermodel of `f` over all models with at most
/// `max_worlds` worlds. Agents and atoms are those of `desugar(f)`.
pub fn bounded_validity(
    f: &Formula,
    universe: &BTreeSet<Agent>,
    max_worlds: usize,
    config: &SearchConfig,
) -> Result<Verdict, CheckError> {
    let core = desugar(f, universe)?;
    Ok(match first_model_where(&core, max_worlds, false, config)? {
        Some((model, world)) => Verdict::Counterexample { model, world },
        None => Verdict::NoCounterexampleUpTo { bound: max_worlds },
    })
}

pub fn bounded_sat(
    f: &Formula,
    universe: &BTreeSet<Agent>,
    max_worlds: usize,
    config: &SearchConfig,
) -> Result<SatVerdict, CheckError> {
    let core = desugar(f, universe)?;
    Ok(match first_model_where(&core, max_worlds, true, config)? {
        Some((model, world)) => SatVerdict::Satisfiable { model, world },
        None => SatVerdict::UnsatisfiableUpTo { bound: max_worlds },
    })
}
