use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::FormulaError;

/// Keywords of the concrete syntax. None of them may be used as an atom name.
pub const RESERVED_WORDS: &[&str] = &["bot", "top", "correct", "type", "byz", "K", "H", "B", "EH"];

/// Prefix of the ordinary atoms that encode type atoms after desugaring.
pub(crate) const TYPE_ATOM_PREFIX: &str = "type$";

/// An agent identifier.
///
/// Ids consist of ASCII letters, digits and underscores, so both `a` and `1`
/// are valid agents.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Agent(String);

impl Agent {
    pub fn new(id: impl Into<String>) -> Result<Self, FormulaError> {
        let id = id.into();
        if is_word(&id) {
            Ok(Agent(id))
        } else {
            Err(FormulaError::InvalidAgent(id))
        }
    }

    pub fn id(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Agent {
    type Err = FormulaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Agent::new(s)
    }
}

impl Serialize for Agent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.id())
    }
}

impl<'de> Deserialize<'de> for Agent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let id = String::deserialize(d)?;
        Agent::new(id).map_err(serde::de::Error::custom)
    }
}

/// Parses a comma separated agent list such as `1,2,3`.
pub fn parse_agent_list(text: &str) -> Result<BTreeSet<Agent>, FormulaError> {
    let mut out = BTreeSet::new();
    for part in text.split(',') {
        let agent = Agent::new(part.trim())?;
        if !out.insert(agent.clone()) {
            return Err(FormulaError::DuplicateAgent(agent));
        }
    }
    Ok(out)
}

/// A finite set of agents, used by mutual hope.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct AgentGroup(BTreeSet<Agent>);

impl AgentGroup {
    /// Builds a group, rejecting duplicate members.
    pub fn new(members: impl IntoIterator<Item = Agent>) -> Result<Self, FormulaError> {
        let mut set = BTreeSet::new();
        for a in members {
            if !set.insert(a.clone()) {
                return Err(FormulaError::DuplicateAgent(a));
            }
        }
        Ok(AgentGroup(set))
    }

    pub fn members(&self) -> &BTreeSet<Agent> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Agent> {
        self.0.iter()
    }
}

/// Surface syntax of the logic of knowledge and hope.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Formula {
    Bot,
    Top,
    Atom(String),
    /// `correct(i)`, shorthand for `!H[i] bot`.
    Correct(Agent),
    /// `type(i, name)`: agent `i` has the given type.
    TypeAtom(Agent, String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    K(Agent, Box<Formula>),
    H(Agent, Box<Formula>),
    /// Belief as defeasible knowledge: `K[i](correct(i) -> φ)`.
    B(Agent, Box<Formula>),
    /// Mutual hope: conjunction of `H[i] φ` over the group.
    MutualHope(AgentGroup, Box<Formula>),
    /// At most `f` agents of the universe are faulty.
    Byz(usize),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Atom(name.into())
    }

    pub fn type_atom(agent: Agent, type_name: impl Into<String>) -> Formula {
        Formula::TypeAtom(agent, type_name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn k(agent: Agent, f: Formula) -> Formula {
        Formula::K(agent, Box::new(f))
    }

    pub fn h(agent: Agent, f: Formula) -> Formula {
        Formula::H(agent, Box::new(f))
    }

    pub fn b(agent: Agent, f: Formula) -> Formula {
        Formula::B(agent, Box::new(f))
    }

    pub fn mutual_hope(group: AgentGroup, f: Formula) -> Formula {
        Formula::MutualHope(group, Box::new(f))
    }

    /// Left-nested conjunction; `Top` for an empty iterator.
    pub fn conjunction(items: impl IntoIterator<Item = Formula>) -> Formula {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::Top)
    }

    /// Left-nested disjunction; `Bot` for an empty iterator.
    pub fn disjunction(items: impl IntoIterator<Item = Formula>) -> Formula {
        items
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::Bot)
    }

    /// True if the formula contains a K, H, B or mutual hope operator, or a
    /// Byz hypothesis (which expands to hope formulas).
    pub fn is_modal(&self) -> bool {
        match self {
            Formula::Bot | Formula::Top | Formula::Atom(_) | Formula::TypeAtom(..) => false,
            Formula::Correct(_) | Formula::Byz(_) => true,
            Formula::K(..) | Formula::H(..) | Formula::B(..) | Formula::MutualHope(..) => true,
            Formula::Not(a) => a.is_modal(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => a.is_modal() || b.is_modal(),
        }
    }

    /// Agents mentioned syntactically (not counting those introduced by Byz).
    pub fn mentioned_agents(&self) -> BTreeSet<Agent> {
        let mut out = BTreeSet::new();
        self.collect_agents(&mut out);
        out
    }

    fn collect_agents(&self, out: &mut BTreeSet<Agent>) {
        match self {
            Formula::Bot | Formula::Top | Formula::Atom(_) | Formula::Byz(_) => {}
            Formula::Correct(a) | Formula::TypeAtom(a, _) => {
                out.insert(a.clone());
            }
            Formula::Not(f) => f.collect_agents(out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.collect_agents(out);
                b.collect_agents(out);
            }
            Formula::K(a, f) | Formula::H(a, f) | Formula::B(a, f) => {
                out.insert(a.clone());
                f.collect_agents(out);
            }
            Formula::MutualHope(g, f) => {
                out.extend(g.iter().cloned());
                f.collect_agents(out);
            }
        }
    }
}

/// Core fragment: atoms, falsum, negation, conjunction, K and H.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum CoreFormula {
    Bot,
    Atom(String),
    Not(Box<CoreFormula>),
    And(Box<CoreFormula>, Box<CoreFormula>),
    K(Agent, Box<CoreFormula>),
    H(Agent, Box<CoreFormula>),
}

impl From<&CoreFormula> for Formula {
    fn from(core: &CoreFormula) -> Self {
        match core {
            CoreFormula::Bot => Formula::Bot,
            CoreFormula::Atom(name) => match decode_type_atom(name) {
                Some((agent, ty)) => Formula::TypeAtom(agent, ty),
                None => Formula::Atom(name.clone()),
            },
            CoreFormula::Not(f) => Formula::not(f.as_ref().into()),
            CoreFormula::And(a, b) => Formula::and(a.as_ref().into(), b.as_ref().into()),
            CoreFormula::K(i, f) => Formula::k(i.clone(), f.as_ref().into()),
            CoreFormula::H(i, f) => Formula::h(i.clone(), f.as_ref().into()),
        }
    }
}

impl From<CoreFormula> for Formula {
    fn from(core: CoreFormula) -> Self {
        Formula::from(&core)
    }
}

/// Name of the ordinary atom standing for `type(agent, type_name)`.
pub fn type_atom_name(agent: &Agent, type_name: &str) -> String {
    format!("{TYPE_ATOM_PREFIX}{agent}${type_name}")
}

/// Inverse of [`type_atom_name`].
pub fn decode_type_atom(name: &str) -> Option<(Agent, String)> {
    let rest = name.strip_prefix(TYPE_ATOM_PREFIX)?;
    let (agent, ty) = rest.split_once('$')?;
    if !is_identifier(ty) {
        return None;
    }
    Some((Agent::new(agent).ok()?, ty.to_string()))
}

/// Letters, digits and underscores, at least one character.
pub(crate) fn is_word(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A word starting with a letter.
pub fn is_identifier(s: &str) -> bool {
    is_word(s) && s.starts_with(|c: char| c.is_ascii_alphabetic())
}

/// An identifier usable as an ordinary atom name.
pub fn is_atom_name(s: &str) -> bool {
    is_identifier(s) && !RESERVED_WORDS.contains(&s)
}

/// Atom names accepted in model valuations: ordinary atoms and encoded type atoms.
pub fn is_valuation_atom(s: &str) -> bool {
    is_atom_name(s) || decode_type_atom(s).is_some()
}
