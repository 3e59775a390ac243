//! Command-line front end.
//!
//! Exit status: 0 when the check comes out the expected way (valid, a
//! satisfying model found, no frame violations, a unique puzzle solution),
//! 1 for the logical negative, 2 for usage, I/O and parse errors.

use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::json;
use thiserror::Error;

use crate::checker::{
    bounded_sat, bounded_validity, default_samples, eval, truth_set_of, AxiomReport, AxiomSuite,
    CheckError, SatVerdict, SearchConfig, Verdict,
};
use crate::creed::{CreedError, PuzzleDocument};
use crate::formula::{parse, parse_agent_list, Agent, Formula, FormulaError, ParseError};
use crate::kripke::{KripkeModel, ModelDocument, ModelError, DEFAULT_MAX_MODELS};
use crate::runs::{brain_in_vat_example, RunError, RunSystem};

pub const MAX_MODELS_ENV: &str = "HOPECHECK_MAX_MODELS";

#[derive(Debug, Parser)]
#[command(
    name = "hopecheck",
    version,
    about = "Model checker for the logic of knowledge and hope"
)]
pub struct Cli {
    /// Emit machine-readable JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads for model enumeration (1 disables parallel scanning).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Refuse searches visiting more models than this.
    #[arg(long, global = true)]
    pub max_models: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a formula in a model, at one world or at all of them.
    Check {
        model: PathBuf,
        formula: String,
        #[arg(long)]
        world: Option<String>,
    },
    /// Check a model against the frame conditions.
    Validate { model: PathBuf },
    /// Search for a countermodel with at most `max-worlds` worlds.
    Validity {
        formula: String,
        #[arg(long)]
        agents: String,
        #[arg(long, default_value_t = 3)]
        max_worlds: usize,
    },
    /// Search for a satisfying model with at most `max-worlds` worlds.
    Sat {
        formula: String,
        #[arg(long)]
        agents: String,
        #[arg(long, default_value_t = 3)]
        max_worlds: usize,
    },
    /// Run the axiom suite on one model, or on every model within bounds.
    Axioms {
        model: Option<PathBuf>,
        #[arg(long, conflicts_with = "model")]
        agents: Option<String>,
        #[arg(long, default_value = "p", conflicts_with = "model")]
        atoms: String,
        #[arg(long, default_value_t = 2, conflicts_with = "model")]
        max_worlds: usize,
        /// Sample formula substituted into schemas (repeatable).
        #[arg(long = "sample")]
        samples: Vec<String>,
    },
    /// Compile a run-system document into a model document.
    CompileRuns { runs: PathBuf, out: PathBuf },
    /// Solve a knights-and-knaves puzzle.
    Puzzle { puzzle: PathBuf },
    /// Run a built-in demonstration (available: brain-in-vat).
    Demo { name: String },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Model { path: PathBuf, source: ModelError },
    #[error("{path}: {source}")]
    Runs { path: PathBuf, source: RunError },
    #[error("{path}: {source}")]
    Puzzle { path: PathBuf, source: CreedError },
    #[error("formula, {0}")]
    Parse(#[from] ParseError),
    #[error("--agents: {0}")]
    Agents(FormulaError),
    #[error("{0}")]
    Check(#[from] CheckError),
    #[error("invalid {MAX_MODELS_ENV} value '{0}'")]
    MaxModelsEnv(String),
    #[error("unknown demo '{0}' (available: brain-in-vat)")]
    UnknownDemo(String),
    #[error("axioms needs a model file or --agents")]
    AxiomBounds,
    #[error("writing output: {0}")]
    Output(#[from] io::Error),
}

/// How a successful command ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Expected,
    Negative,
}

impl Outcome {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Expected
        } else {
            Outcome::Negative
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Expected => 0,
            Outcome::Negative => 1,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn model_error(path: &Path) -> impl Fn(ModelError) -> CliError + '_ {
    move |source| CliError::Model {
        path: path.to_path_buf(),
        source,
    }
}

/// Loads a model document and insists on a legal frame.
fn load_model(path: &Path) -> Result<KripkeModel, CliError> {
    let doc = ModelDocument::from_json(&read(path)?).map_err(model_error(path))?;
    doc.load()
        .map_err(model_error(path))?
        .map_err(|v| model_error(path)(ModelError::FrameViolations(v)))
}

fn universe_of(model: &KripkeModel) -> BTreeSet<Agent> {
    model.agents().iter().cloned().collect()
}

impl Cli {
    fn config(&self) -> Result<SearchConfig, CliError> {
        let max_models = match self.max_models {
            Some(m) => m,
            None => match std::env::var(MAX_MODELS_ENV) {
                Ok(v) => v.trim().parse().map_err(|_| CliError::MaxModelsEnv(v))?,
                Err(_) => DEFAULT_MAX_MODELS,
            },
        };
        Ok(SearchConfig {
            max_models,
            parallel: self.jobs != Some(1),
        })
    }
}

/// Executes a parsed command, writing its report to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<Outcome, CliError> {
    if let Some(jobs) = cli.jobs.filter(|j| *j > 1) {
        // The global pool can only be set once per process; later calls keep it.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    let config = cli.config()?;
    let json = cli.json;
    match &cli.command {
        Command::Check {
            model,
            formula,
            world,
        } => {
            let m = load_model(model)?;
            let f = parse(formula, &universe_of(&m))?;
            if let Some(w) = world {
                let holds = eval(&m, w, &f)?;
                if json {
                    writeln!(out, "{}", json!({"world": w, "holds": holds}))?;
                } else {
                    writeln!(out, "{holds}")?;
                }
                return Ok(Outcome::from_bool(holds));
            }
            let truth = truth_set_of(&m, &f)?;
            let valid = truth.len() == m.world_count();
            if json {
                let map: serde_json::Map<String, serde_json::Value> = m
                    .worlds()
                    .iter()
                    .enumerate()
                    .map(|(i, w)| (w.clone(), truth.contains(i).into()))
                    .collect();
                writeln!(out, "{}", json!({"truth": map, "valid": valid}))?;
            } else {
                for (i, w) in m.worlds().iter().enumerate() {
                    writeln!(out, "{w}: {}", truth.contains(i))?;
                }
            }
            Ok(Outcome::from_bool(valid))
        }
        Command::Validate { model } => {
            let doc = ModelDocument::from_json(&read(model)?).map_err(model_error(model))?;
            let violations = match doc.load().map_err(model_error(model))? {
                Ok(_) => Vec::new(),
                Err(v) => v,
            };
            if json {
                writeln!(
                    out,
                    "{}",
                    json!({"valid": violations.is_empty(), "violations": violations})
                )?;
            } else if violations.is_empty() {
                writeln!(out, "ok")?;
            } else {
                for v in &violations {
                    writeln!(out, "{v}")?;
                }
            }
            Ok(Outcome::from_bool(violations.is_empty()))
        }
        Command::Validity {
            formula,
            agents,
            max_worlds,
        } => {
            let universe = parse_agent_list(agents).map_err(CliError::Agents)?;
            let f = parse(formula, &universe)?;
            let verdict = bounded_validity(&f, &universe, *max_worlds, &config)?;
            if json {
                writeln!(out, "{}", verdict.to_json())?;
            } else {
                match &verdict {
                    Verdict::NoCounterexampleUpTo { bound } => {
                        writeln!(out, "valid-up-to {bound}")?
                    }
                    Verdict::Counterexample { model, world } => {
                        writeln!(out, "counterexample at world {world}")?;
                        writeln!(out, "{}", model.to_document().to_json_pretty())?;
                    }
                }
            }
            Ok(Outcome::from_bool(verdict.is_valid()))
        }
        Command::Sat {
            formula,
            agents,
            max_worlds,
        } => {
            let universe = parse_agent_list(agents).map_err(CliError::Agents)?;
            let f = parse(formula, &universe)?;
            let verdict = bounded_sat(&f, &universe, *max_worlds, &config)?;
            if json {
                writeln!(out, "{}", verdict.to_json())?;
            } else {
                match &verdict {
                    SatVerdict::UnsatisfiableUpTo { bound } => {
                        writeln!(out, "unsat-up-to {bound}")?
                    }
                    SatVerdict::Satisfiable { model, world } => {
                        writeln!(out, "satisfiable at world {world}")?;
                        writeln!(out, "{}", model.to_document().to_json_pretty())?;
                    }
                }
            }
            Ok(Outcome::from_bool(verdict.is_sat()))
        }
        Command::Axioms {
            model,
            agents,
            atoms,
            max_worlds,
            samples,
        } => {
            let report = axioms(
                model.as_deref(),
                agents.as_deref(),
                atoms,
                *max_worlds,
                samples,
                &config,
            )?;
            if json {
                writeln!(out, "{}", report.to_json())?;
            } else {
                write_report(out, &report)?;
            }
            Ok(Outcome::from_bool(report.passed()))
        }
        Command::CompileRuns { runs, out: target } => {
            let sys = RunSystem::from_json(&read(runs)?).map_err(|source| CliError::Runs {
                path: runs.clone(),
                source,
            })?;
            let model = sys.compile().map_err(|source| CliError::Runs {
                path: runs.clone(),
                source,
            })?;
            let text = model.to_document().to_json_pretty() + "\n";
            fs::write(target, text).map_err(|source| CliError::Io {
                path: target.clone(),
                source,
            })?;
            if json {
                writeln!(
                    out,
                    "{}",
                    json!({"out": target.display().to_string(), "worlds": model.world_count()})
                )?;
            } else {
                writeln!(
                    out,
                    "wrote {} worlds to {}",
                    model.world_count(),
                    target.display()
                )?;
            }
            Ok(Outcome::Expected)
        }
        Command::Puzzle { puzzle } => {
            let err = |source| CliError::Puzzle {
                path: puzzle.clone(),
                source,
            };
            let doc = PuzzleDocument::from_json(&read(puzzle)?).map_err(err)?;
            let solutions = doc.solve().map_err(err)?;
            let unique = solutions.len() == 1;
            if json {
                writeln!(out, "{}", json!({"solutions": solutions, "unique": unique}))?;
            } else if solutions.is_empty() {
                writeln!(out, "no solution")?;
            } else if unique {
                writeln!(out, "{} (unique)", solutions[0])?;
            } else {
                for s in &solutions {
                    writeln!(out, "{s}")?;
                }
                writeln!(out, "({} solutions)", solutions.len())?;
            }
            Ok(Outcome::from_bool(unique))
        }
        Command::Demo { name } => {
            if name != "brain-in-vat" {
                return Err(CliError::UnknownDemo(name.clone()));
            }
            let (sys, claims) = brain_in_vat_example();
            let model = sys.compile().expect("built-in system compiles");
            let mut all = true;
            let mut rows = Vec::new();
            for c in &claims {
                let actual = eval(&model, &c.world, &c.formula)?;
                let passed = actual == c.expected;
                all &= passed;
                if json {
                    rows.push(json!({
                        "world": c.world,
                        "formula": c.formula.to_string(),
                        "expected": c.expected,
                        "actual": actual,
                        "passed": passed,
                    }));
                } else {
                    let mark = if passed { "PASS" } else { "FAIL" };
                    writeln!(out, "{mark} {} at {} is {actual}", c.formula, c.world)?;
                }
            }
            if json {
                writeln!(
                    out,
                    "{}",
                    json!({"demo": name, "claims": rows, "passed": all})
                )?;
            }
            Ok(Outcome::from_bool(all))
        }
    }
}

fn axioms(
    model: Option<&Path>,
    agents: Option<&str>,
    atoms: &str,
    max_worlds: usize,
    samples: &[String],
    config: &SearchConfig,
) -> Result<AxiomReport, CliError> {
    let parse_samples = |universe: &BTreeSet<Agent>| -> Result<Vec<Formula>, CliError> {
        samples
            .iter()
            .map(|s| parse(s, universe).map_err(CliError::from))
            .collect()
    };
    if let Some(path) = model {
        let m = load_model(path)?;
        let universe = universe_of(&m);
        let mut given = parse_samples(&universe)?;
        if given.is_empty() {
            let atoms: BTreeSet<String> = m.atoms().iter().cloned().collect();
            given = default_samples(&universe, &atoms);
        }
        return Ok(AxiomSuite::new(&universe, &given)?.check(&m)?);
    }
    let universe =
        parse_agent_list(agents.ok_or(CliError::AxiomBounds)?).map_err(CliError::Agents)?;
    let atom_set: BTreeSet<String> = atoms
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect();
    let mut given = parse_samples(&universe)?;
    if given.is_empty() {
        given = default_samples(&universe, &atom_set);
    }
    Ok(AxiomSuite::new(&universe, &given)?.sweep(&universe, &atom_set, max_worlds, config)?)
}

fn write_report(out: &mut dyn Write, report: &AxiomReport) -> io::Result<()> {
    for r in &report.results {
        match &r.failure {
            None => writeln!(out, "PASS {} ({} instances)", r.schema, r.instances)?,
            Some(f) => writeln!(
                out,
                "FAIL {}: {} fails at world {} of\n{}",
                r.schema,
                f.formula,
                f.world,
                f.model.to_document().to_json_pretty()
            )?,
        }
    }
    writeln!(out, "models checked: {}", report.models_checked)
}

/// Parses `args`, runs the command and returns the process exit status.
pub fn main_with<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(&cli, &mut out) {
        Ok(outcome) => outcome.exit_code(),
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            2
        }
    }
}
