//! Syntax of the logic of knowledge and hope: AST, text grammar and the
//! reduction of derived operators to the `{atom, bot, !, &, K, H}` core.

mod ast;
mod desugar;
mod parser;
mod printer;

use thiserror::Error;

pub use ast::{
    decode_type_atom, is_atom_name, is_identifier, is_valuation_atom, parse_agent_list,
    type_atom_name, Agent, AgentGroup, CoreFormula, Formula, RESERVED_WORDS,
};
pub use desugar::{analyze, analyze_core, byz_groups, correct_core, desugar, expand_byz, Analysis};
pub use parser::{parse, ParseError, ParseErrorKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("invalid agent id '{0}'")]
    InvalidAgent(String),
    #[error("agent '{0}' listed twice")]
    DuplicateAgent(Agent),
    #[error("byz({f}) needs f <= n, but the universe has {n} agents")]
    ByzTooLarge { f: usize, n: usize },
    #[error("mutual hope over an empty group")]
    EmptyGroup,
}
