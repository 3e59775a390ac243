//! Model checking for the multi-agent logic of knowledge and hope.
//!
//! The crate evaluates formulas with knowledge (`K`) and hope (`H`)
//! modalities on finite Kripke models, searches bounded model spaces for
//! countermodels, compiles run systems of distributed protocols into models,
//! and interprets utterances of typed agents.

pub mod checker;
pub mod cli;
pub mod creed;
pub mod formula;
pub mod kripke;
pub mod runs;
pub mod worldset;

pub use checker::{bounded_sat, bounded_validity, eval, SearchConfig, Verdict};
pub use formula::{parse, Agent, AgentGroup, CoreFormula, Formula};
pub use kripke::{KripkeModel, RawModel};
