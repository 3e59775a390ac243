//! Semantic self-test of the knowledge-and-hope axiom schemas.
//!
//! Each schema is instantiated for every agent and every sample formula (or
//! pair of sample formulas) and checked at every world of the models given.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde_json::json;

use crate::formula::{desugar, Agent, CoreFormula, Formula};
use crate::kripke::{KripkeModel, ModelSpace};

use super::eval::CompiledFormula;
use super::search::SearchConfig;
use super::CheckError;

/// Where a schema comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchemaFamily {
    /// Axioms of the logic KH itself.
    Kh,
    /// Theorems about the derived operators (belief, correctness, hope).
    Derived,
}

impl SchemaFamily {
    pub fn name(self) -> &'static str {
        match self {
            SchemaFamily::Kh => "KH",
            SchemaFamily::Derived => "derived",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Schema {
    /// `H[i] !H[i] bot`
    DH,
    /// `K[i](φ -> ψ) -> K[i] φ -> K[i] ψ`
    KK,
    /// `K[i] φ -> K[i] K[i] φ`
    FourK,
    /// `!K[i] φ -> K[i] !K[i] φ`
    FiveK,
    /// `K[i] φ -> φ`
    TK,
    /// `H[i] φ <-> (!H[i] bot -> K[i](!H[i] bot -> φ))`
    Kh,
    /// `H[i](φ -> ψ) -> H[i] φ -> H[i] ψ`
    KH,
    /// `H[i] φ -> H[i] H[i] φ`
    FourH,
    /// `φ -> H[i] !H[i] !φ`
    BH,
    /// `!H[i] φ -> H[i] !H[i] φ`
    FiveH,
    /// `B[i](φ -> ψ) -> B[i] φ -> B[i] ψ`
    KB,
    /// `B[i] φ -> B[i] B[i] φ`
    FourB,
    /// `!B[i] φ -> B[i] !B[i] φ`
    FiveB,
    /// `correct(i) -> B[i] φ -> φ`
    BeliefFactiveWhenCorrect,
    /// `B[i] correct(i)`
    BelievesOwnCorrectness,
    /// `correct(i) -> H[i] φ -> φ`
    HopeFactiveWhenCorrect,
    /// `H[i] correct(i)`
    HopesOwnCorrectness,
    /// `!correct(i) -> H[i] φ`
    FaultyHopesAnything,
    /// `B[i] φ -> H[i] φ`
    BeliefImpliesHope,
    /// `(correct(i) -> B[i] φ) & (!correct(i) -> top) <-> H[i] φ`
    HopeIsMessageContent,
}

impl Schema {
    pub const ALL: [Schema; 20] = [
        Schema::DH,
        Schema::KK,
        Schema::FourK,
        Schema::FiveK,
        Schema::TK,
        Schema::Kh,
        Schema::KH,
        Schema::FourH,
        Schema::BH,
        Schema::FiveH,
        Schema::KB,
        Schema::FourB,
        Schema::FiveB,
        Schema::BeliefFactiveWhenCorrect,
        Schema::BelievesOwnCorrectness,
        Schema::HopeFactiveWhenCorrect,
        Schema::HopesOwnCorrectness,
        Schema::FaultyHopesAnything,
        Schema::BeliefImpliesHope,
        Schema::HopeIsMessageContent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Schema::DH => "d^H",
            Schema::KK => "k^K",
            Schema::FourK => "4^K",
            Schema::FiveK => "5^K",
            Schema::TK => "t^K",
            Schema::Kh => "kh",
            Schema::KH => "k^H",
            Schema::FourH => "4^H",
            Schema::BH => "b^H",
            Schema::FiveH => "5^H",
            Schema::KB => "k^B",
            Schema::FourB => "4^B",
            Schema::FiveB => "5^B",
            Schema::BeliefFactiveWhenCorrect => "belief-factive-when-correct",
            Schema::BelievesOwnCorrectness => "belief-in-own-correctness",
            Schema::HopeFactiveWhenCorrect => "hope-factive-when-correct",
            Schema::HopesOwnCorrectness => "hope-in-own-correctness",
            Schema::FaultyHopesAnything => "faulty-hopes-anything",
            Schema::BeliefImpliesHope => "belief-implies-hope",
            Schema::HopeIsMessageContent => "hope-is-message-content",
        }
    }

    pub fn family(self) -> SchemaFamily {
        match self {
            Schema::DH | Schema::KK | Schema::FourK | Schema::FiveK | Schema::TK | Schema::Kh => {
                SchemaFamily::Kh
            }
            _ => SchemaFamily::Derived,
        }
    }

    pub fn by_family(family: SchemaFamily) -> Vec<Schema> {
        Schema::ALL
            .into_iter()
            .filter(|s| s.family() == family)
            .collect()
    }

    /// Number of formula metavariables.
    pub fn arity(self) -> usize {
        match self {
            Schema::DH | Schema::BelievesOwnCorrectness | Schema::HopesOwnCorrectness => 0,
            Schema::KK | Schema::KH | Schema::KB => 2,
            _ => 1,
        }
    }

    /// The instance for agent `i`; unused metavariables are ignored.
    pub fn instantiate(self, i: &Agent, phi: &Formula, psi: &Formula) -> Formula {
        let k = |f: Formula| Formula::k(i.clone(), f);
        let h = |f: Formula| Formula::h(i.clone(), f);
        let b = |f: Formula| Formula::b(i.clone(), f);
        let not = Formula::not;
        let imp = Formula::implies;
        let correct = || Formula::Correct(i.clone());
        let hope_falsum = || h(Formula::Bot);
        let (p, q) = (phi.clone(), psi.clone());
        match self {
            Schema::DH => h(not(hope_falsum())),
            Schema::KK => imp(k(imp(p.clone(), q.clone())), imp(k(p), k(q))),
            Schema::FourK => imp(k(p.clone()), k(k(p))),
            Schema::FiveK => imp(not(k(p.clone())), k(not(k(p)))),
            Schema::TK => imp(k(p.clone()), p),
            Schema::Kh => Formula::iff(
                h(p.clone()),
                imp(not(hope_falsum()), k(imp(not(hope_falsum()), p))),
            ),
            Schema::KH => imp(h(imp(p.clone(), q.clone())), imp(h(p), h(q))),
            Schema::FourH => imp(h(p.clone()), h(h(p))),
            Schema::BH => imp(p.clone(), h(not(h(not(p))))),
            Schema::FiveH => imp(not(h(p.clone())), h(not(h(p)))),
            Schema::KB => imp(b(imp(p.clone(), q.clone())), imp(b(p), b(q))),
            Schema::FourB => imp(b(p.clone()), b(b(p))),
            Schema::FiveB => imp(not(b(p.clone())), b(not(b(p)))),
            Schema::BeliefFactiveWhenCorrect => imp(correct(), imp(b(p.clone()), p)),
            Schema::BelievesOwnCorrectness => b(correct()),
            Schema::HopeFactiveWhenCorrect => imp(correct(), imp(h(p.clone()), p)),
            Schema::HopesOwnCorrectness => h(correct()),
            Schema::FaultyHopesAnything => imp(not(correct()), h(p)),
            Schema::BeliefImpliesHope => imp(b(p.clone()), h(p)),
            Schema::HopeIsMessageContent => Formula::iff(
                Formula::and(
                    imp(correct(), b(p.clone())),
                    imp(not(correct()), Formula::Top),
                ),
                h(p),
            ),
        }
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `{p, !p, p & q, K[i] p, H[i] p}` over the first two atoms and every agent.
/// `p & q` is left out when fewer than two atoms are given.
pub fn default_samples(agents: &BTreeSet<Agent>, atoms: &BTreeSet<String>) -> Vec<Formula> {
    let mut it = atoms.iter();
    let p = Formula::atom(it.next().map_or("p", |s| s.as_str()));
    let mut out = vec![p.clone(), Formula::not(p.clone())];
    if let Some(q) = it.next() {
        out.push(Formula::and(p.clone(), Formula::atom(q.as_str())));
    }
    for a in agents {
        out.push(Formula::k(a.clone(), p.clone()));
        out.push(Formula::h(a.clone(), p.clone()));
    }
    out
}

/// A falsified schema instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomFailure {
    pub formula: Formula,
    pub model: KripkeModel,
    pub world: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemaResult {
    pub schema: Schema,
    /// Instantiated formulas per model.
    pub instances: usize,
    /// First failure in scan order, if any.
    pub failure: Option<AxiomFailure>,
}

impl SchemaResult {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub models_checked: u64,
    pub results: Vec<SchemaResult>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(SchemaResult::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &SchemaResult> {
        self.results.iter().filter(|r| !r.passed())
    }

    pub fn result(&self, schema: Schema) -> Option<&SchemaResult> {
        self.results.iter().find(|r| r.schema == schema)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let schemas: Vec<_> = self
            .results
            .iter()
            .map(|r| {
                json!({
                    "name": r.schema.name(),
                    "family": r.schema.family().name(),
                    "instances": r.instances,
                    "passed": r.passed(),
                    "failure": r.failure.as_ref().map(|f| json!({
                        "formula": f.formula.to_string(),
                        "model": f.model.to_json_value(),
                        "world": f.world,
                    })),
                })
            })
            .collect();
        json!({
            "passed": self.passed(),
            "models": self.models_checked,
            "schemas": schemas,
        })
    }
}

struct Instance {
    schema_ix: usize,
    formula: Formula,
    core: CoreFormula,
}

/// Schema instances prepared for repeated checking.
pub struct AxiomSuite {
    schemas: Vec<Schema>,
    instances: Vec<Instance>,
}

/// First failure seen while scanning, keyed by scan position.
type Found = Option<((usize, u64), AxiomFailure)>;

impl AxiomSuite {
    pub fn new(agents: &BTreeSet<Agent>, samples: &[Formula]) -> Result<Self, CheckError> {
        Self::with_schemas(&Schema::ALL, agents, samples)
    }

    pub fn with_schemas(
        schemas: &[Schema],
        agents: &BTreeSet<Agent>,
        samples: &[Formula],
    ) -> Result<Self, CheckError> {
        if samples.is_empty() {
            return Err(CheckError::NoSamples);
        }
        let mut instances = Vec::new();
        for (schema_ix, schema) in schemas.iter().enumerate() {
            for agent in agents {
                let mut push = |formula: Formula| -> Result<(), CheckError> {
                    let core = desugar(&formula, agents)?;
                    instances.push(Instance {
                        schema_ix,
                        formula,
                        core,
                    });
                    Ok(())
                };
                match schema.arity() {
                    0 => push(schema.instantiate(agent, &Formula::Top, &Formula::Top))?,
                    1 => {
                        for phi in samples {
                            push(schema.instantiate(agent, phi, phi))?;
                        }
                    }
                    _ => {
                        for phi in samples {
                            for psi in samples {
                                push(schema.instantiate(agent, phi, psi))?;
                            }
                        }
                    }
                }
            }
        }
        Ok(AxiomSuite {
            schemas: schemas.to_vec(),
            instances,
        })
    }

    pub fn instance_count(&self) -> usize {
        self.instances.len()
    }

    fn empty_report(&self) -> AxiomReport {
        AxiomReport {
            models_checked: 0,
            results: self
                .schemas
                .iter()
                .enumerate()
                .map(|(ix, s)| SchemaResult {
                    schema: *s,
                    instances: self.instances.iter().filter(|i| i.schema_ix == ix).count(),
                    failure: None,
                })
                .collect(),
        }
    }

    fn compile(&self, model: &KripkeModel) -> Result<Vec<CompiledFormula>, CheckError> {
        self.instances
            .iter()
            .map(|i| CompiledFormula::compile(&i.core, model))
            .collect()
    }

    fn scan(
        &self,
        compiled: &[CompiledFormula],
        model: &KripkeModel,
        key: (usize, u64),
        found: &mut [Found],
    ) {
        for (inst, c) in self.instances.iter().zip(compiled) {
            let slot = &mut found[inst.schema_ix];
            if slot.as_ref().is_some_and(|(k, _)| *k <= key) {
                continue;
            }
            let truth = c.truth_set(model).expect("compiled for this layout");
            if let Some(world) = truth.complement(model.world_count()).first() {
                *slot = Some((
                    key,
                    AxiomFailure {
                        formula: inst.formula.clone(),
                        model: model.clone(),
                        world: model.world_name(world).to_string(),
                    },
                ));
            }
        }
    }

    /// Checks every instance at every world of one model.
    pub fn check(&self, model: &KripkeModel) -> Result<AxiomReport, CheckError> {
        let compiled = self.compile(model)?;
        let mut found: Vec<Found> = vec![None; self.schemas.len()];
        self.scan(&compiled, model, (0, 0), &mut found);
        Ok(self.finish(found, 1))
    }

    /// Checks every model with `1..=max_worlds` worlds over `agents` and `atoms`.
    pub fn sweep(
        &self,
        agents: &BTreeSet<Agent>,
        atoms: &BTreeSet<String>,
        max_worlds: usize,
        config: &SearchConfig,
    ) -> Result<AxiomReport, CheckError> {
        let mut found: Vec<Found> = vec![None; self.schemas.len()];
        let mut models = 0;
        for w in 1..=max_worlds {
            let space = ModelSpace::new(agents, atoms, w, config.max_models)?;
            let first = space.model_at(0);
            let compiled = self.compile(&first)?;
            let scan_range = |range: std::ops::Range<u64>| {
                let mut local: Vec<Found> = vec![None; self.schemas.len()];
                for index in range {
                    let model = space.model_at(index);
                    self.scan(&compiled, &model, (w, index), &mut local);
                }
                local
            };
            let chunk = 4096u64;
            let chunks: Vec<std::ops::Range<u64>> = (0..space.len().div_ceil(chunk))
                .map(|c| c * chunk..((c + 1) * chunk).min(space.len()))
                .collect();
            let partials: Vec<Vec<Found>> = if config.parallel {
                chunks.into_par_iter().map(scan_range).collect()
            } else {
                chunks.into_iter().map(scan_range).collect()
            };
            for partial in partials {
                for (slot, cand) in found.iter_mut().zip(partial) {
                    if let Some((k, f)) = cand {
                        if slot.as_ref().is_none_or(|(sk, _)| k < *sk) {
                            *slot = Some((k, f));
                        }
                    }
                }
            }
            models += space.len();
        }
        Ok(self.finish(found, models))
    }

    fn finish(&self, found: Vec<Found>, models: u64) -> AxiomReport {
        let mut report = self.empty_report();
        report.models_checked = models;
        for (result, f) in report.results.iter_mut().zip(found) {
            result.failure = f.map(|(_, failure)| failure);
        }
        report
    }
}

/// Runs every schema on one model with the given samples.
pub fn axiom_suite(model: &KripkeModel, samples: &[Formula]) -> Result<AxiomReport, CheckError> {
    let agents: BTreeSet<Agent> = model.agents().iter().cloned().collect();
    AxiomSuite::new(&agents, samples)?.check(model)
}
