//! Typed communication: what a listener learns from an utterance given the
//! types the speaker might have.
//!
//! A [`TypeSystem`] names the agent types and, for every listener/speaker
//! type pair, a [`Transformer`] giving the precondition a speaker of that type
//! must satisfy to say `φ`. The creed of `φ` for speaker type `S` is
//! `S_a -> K[a] f(φ)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{parse, Agent, Formula, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CreedError {
    #[error("unknown agent type '{0}'")]
    UnknownType(String),
    #[error("agent type '{0}' declared twice")]
    DuplicateType(String),
    #[error("a type system needs at least one type")]
    NoTypes,
    #[error("no transformer for listener type '{listener}' and speaker type '{speaker}'")]
    MissingTransformer { listener: String, speaker: String },
    #[error("unknown transformer '{0}'")]
    UnknownTransformer(String),
    #[error("informational content needs at least one candidate type")]
    EmptyCandidates,
    #[error("agent '{0}' is not part of the puzzle")]
    UnknownAgent(Agent),
    #[error("agent '{0}' declared twice")]
    DuplicateAgent(Agent),
    #[error("utterance by '{0}' uses modal operators or correctness, which the puzzle solver does not support")]
    ModalContent(Agent),
    #[error("utterance by '{speaker}' mentions plain atom '{atom}'; puzzle contents may only use type atoms")]
    PlainAtom { speaker: Agent, atom: String },
    #[error("the puzzle solver supports exactly the types knight and knave, got {0:?}")]
    UnsupportedTypes(Vec<String>),
    #[error("formula of utterance {index}: {source}")]
    Parse { index: usize, source: ParseError },
    #[error("malformed puzzle document: {0}")]
    Json(String),
}

/// Precondition transformers for speaking `φ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Transformer {
    /// `φ`: the speaker tells the truth.
    Identity,
    /// `!φ`: the speaker lies.
    Negation,
    /// `correct(a) -> φ`: the speaker is truthful while correct.
    BeliefGuard,
    /// `top`: anything may be said.
    ConstantTop,
}

impl Transformer {
    pub const ALL: [Transformer; 4] = [
        Transformer::Identity,
        Transformer::Negation,
        Transformer::BeliefGuard,
        Transformer::ConstantTop,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Transformer::Identity => "identity",
            Transformer::Negation => "negation",
            Transformer::BeliefGuard => "belief-guard",
            Transformer::ConstantTop => "constant-top",
        }
    }

    pub fn apply(self, speaker: &Agent, phi: &Formula) -> Formula {
        match self {
            Transformer::Identity => phi.clone(),
            Transformer::Negation => Formula::not(phi.clone()),
            Transformer::BeliefGuard => {
                Formula::implies(Formula::Correct(speaker.clone()), phi.clone())
            }
            Transformer::ConstantTop => Formula::Top,
        }
    }
}

impl fmt::Display for Transformer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Transformer {
    type Err = CreedError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Transformer::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| CreedError::UnknownTransformer(s.to_string()))
    }
}

/// How "agent `a` has type `S`" is expressed as a formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TypeGuard {
    /// The type atom `type(a,S)`.
    #[default]
    Atom,
    /// `correct(a)`.
    Correct,
    /// `!correct(a)`.
    Faulty,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeSystem {
    types: Vec<String>,
    transformers: BTreeMap<(String, String), Transformer>,
    guards: BTreeMap<String, TypeGuard>,
}

impl TypeSystem {
    /// `transformers` must cover every (listener, speaker) pair of `types`.
    pub fn new<I, S>(
        types: I,
        transformers: BTreeMap<(String, String), Transformer>,
    ) -> Result<Self, CreedError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let types: Vec<String> = types.into_iter().map(Into::into).collect();
        if types.is_empty() {
            return Err(CreedError::NoTypes);
        }
        let mut seen = BTreeSet::new();
        for t in &types {
            if !seen.insert(t) {
                return Err(CreedError::DuplicateType(t.clone()));
            }
        }
        for (l, s) in transformers.keys() {
            for t in [l, s] {
                if !seen.contains(t) {
                    return Err(CreedError::UnknownType(t.clone()));
                }
            }
        }
        for l in &types {
            for s in &types {
                if !transformers.contains_key(&(l.clone(), s.clone())) {
                    return Err(CreedError::MissingTransformer {
                        listener: l.clone(),
                        speaker: s.clone(),
                    });
                }
            }
        }
        Ok(TypeSystem {
            types,
            transformers,
            guards: BTreeMap::new(),
        })
    }

    /// Type system where each speaker type uses the same transformer for
    /// every listener.
    pub fn uniform<'a>(
        pairs: impl IntoIterator<Item = (&'a str, Transformer)>,
    ) -> Result<Self, CreedError> {
        let pairs: Vec<(&str, Transformer)> = pairs.into_iter().collect();
        let mut transformers = BTreeMap::new();
        for (listener, _) in &pairs {
            for (speaker, t) in &pairs {
                transformers.insert((listener.to_string(), speaker.to_string()), *t);
            }
        }
        TypeSystem::new(pairs.iter().map(|(s, _)| *s), transformers)
    }

    /// Knights say only what they know to be true, knaves only what they
    /// know to be false.
    pub fn knights_and_knaves() -> Self {
        TypeSystem::uniform([
            ("knight", Transformer::Identity),
            ("knave", Transformer::Negation),
        ])
        .expect("well-formed")
    }

    /// Correct agents speak what they believe; faulty agents may say
    /// anything. Types are expressed through correctness, not type atoms.
    pub fn correct_and_faulty() -> Self {
        TypeSystem::uniform([
            ("correct", Transformer::BeliefGuard),
            ("faulty", Transformer::ConstantTop),
        ])
        .expect("well-formed")
        .with_guard("correct", TypeGuard::Correct)
        .expect("declared")
        .with_guard("faulty", TypeGuard::Faulty)
        .expect("declared")
    }

    pub fn with_guard(mut self, type_name: &str, guard: TypeGuard) -> Result<Self, CreedError> {
        self.require(type_name)?;
        self.guards.insert(type_name.to_string(), guard);
        Ok(self)
    }

    pub fn types(&self) -> &[String] {
        &self.types
    }

    fn require(&self, type_name: &str) -> Result<(), CreedError> {
        if self.types.iter().any(|t| t == type_name) {
            Ok(())
        } else {
            Err(CreedError::UnknownType(type_name.to_string()))
        }
    }

    pub fn transformer(&self, listener: &str, speaker: &str) -> Result<Transformer, CreedError> {
        self.require(listener)?;
        self.require(speaker)?;
        Ok(self.transformers[&(listener.to_string(), speaker.to_string())])
    }

    /// The formula stating that `agent` has type `type_name`.
    pub fn type_formula(&self, agent: &Agent, type_name: &str) -> Result<Formula, CreedError> {
        self.require(type_name)?;
        Ok(
            match self.guards.get(type_name).copied().unwrap_or_default() {
                TypeGuard::Atom => Formula::type_atom(agent.clone(), type_name),
                TypeGuard::Correct => Formula::Correct(agent.clone()),
                TypeGuard::Faulty => Formula::not(Formula::Correct(agent.clone())),
            },
        )
    }

    /// Each agent has exactly one type. With two types this is
    /// `S_j <-> !T_j`; otherwise the types are pairwise exclusive and
    /// jointly exhaustive.
    pub fn constraints(&self, agents: &[Agent]) -> Vec<Formula> {
        let mut out = Vec::new();
        for a in agents {
            let atoms: Vec<Formula> = self
                .types
                .iter()
                .map(|t| self.type_formula(a, t).expect("declared"))
                .collect();
            if let [s, t] = atoms.as_slice() {
                out.push(Formula::iff(s.clone(), Formula::not(t.clone())));
                continue;
            }
            out.push(Formula::disjunction(atoms.iter().cloned()));
            for (i, s) in atoms.iter().enumerate() {
                for t in &atoms[i + 1..] {
                    out.push(Formula::not(Formula::and(s.clone(), t.clone())));
                }
            }
        }
        out
    }
}

/// `speaker` says `content`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Utterance {
    pub speaker: Agent,
    pub content: Formula,
}

impl Utterance {
    pub fn new(speaker: Agent, content: Formula) -> Self {
        Utterance { speaker, content }
    }
}

/// `S_a -> K[a] f_LS(φ)`.
pub fn creed_formula(
    ts: &TypeSystem,
    listener_type: &str,
    speaker: &Agent,
    speaker_type: &str,
    phi: &Formula,
) -> Result<Formula, CreedError> {
    let transformer = ts.transformer(listener_type, speaker_type)?;
    Ok(Formula::implies(
        ts.type_formula(speaker, speaker_type)?,
        Formula::k(speaker.clone(), transformer.apply(speaker, phi)),
    ))
}

/// Conjunction of the creed formulas of `utt` over `candidates`, in order.
/// A single candidate yields its creed formula unwrapped.
pub fn informational_content(
    ts: &TypeSystem,
    listener_type: &str,
    utt: &Utterance,
    candidates: &[&str],
) -> Result<Formula, CreedError> {
    let mut parts = candidates
        .iter()
        .map(|s| creed_formula(ts, listener_type, &utt.speaker, s, &utt.content));
    let first = parts.next().ok_or(CreedError::EmptyCandidates)??;
    parts.try_fold(first, |acc, next| Ok(Formula::and(acc, next?)))
}

/// A type for every puzzle agent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct TypeAssignment(pub BTreeMap<Agent, String>);

impl TypeAssignment {
    pub fn type_of(&self, agent: &Agent) -> Option<&str> {
        self.0.get(agent).map(String::as_str)
    }

    /// Conjunction of the type atoms describing this assignment.
    pub fn to_formula(&self) -> Formula {
        Formula::conjunction(
            self.0
                .iter()
                .map(|(a, t)| Formula::type_atom(a.clone(), t.clone())),
        )
    }
}

impl fmt::Display for TypeAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (a, t) in &self.0 {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{a}={t}")?;
        }
        Ok(())
    }
}

const KNIGHT: &str = "knight";
const KNAVE: &str = "knave";

fn check_content(speaker: &Agent, f: &Formula) -> Result<(), CreedError> {
    match f {
        Formula::Bot | Formula::Top | Formula::TypeAtom(..) => Ok(()),
        Formula::Atom(p) => Err(CreedError::PlainAtom {
            speaker: speaker.clone(),
            atom: p.clone(),
        }),
        Formula::Not(g) => check_content(speaker, g),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            check_content(speaker, a)?;
            check_content(speaker, b)
        }
        Formula::Correct(_)
        | Formula::K(..)
        | Formula::H(..)
        | Formula::B(..)
        | Formula::MutualHope(..)
        | Formula::Byz(_) => Err(CreedError::ModalContent(speaker.clone())),
    }
}

fn holds(f: &Formula, sigma: &BTreeMap<Agent, &str>) -> bool {
    match f {
        Formula::Top => true,
        Formula::TypeAtom(a, t) => sigma[a] == t,
        Formula::Not(g) => !holds(g, sigma),
        Formula::And(a, b) => holds(a, sigma) && holds(b, sigma),
        Formula::Or(a, b) => holds(a, sigma) || holds(b, sigma),
        Formula::Implies(a, b) => !holds(a, sigma) || holds(b, sigma),
        Formula::Iff(a, b) => holds(a, sigma) == holds(b, sigma),
        _ => false,
    }
}

fn check_type_atoms(f: &Formula, agents: &BTreeSet<&Agent>) -> Result<(), CreedError> {
    match f {
        Formula::TypeAtom(a, t) => {
            if !agents.contains(a) {
                Err(CreedError::UnknownAgent(a.clone()))
            } else if t != KNIGHT && t != KNAVE {
                Err(CreedError::UnknownType(t.clone()))
            } else {
                Ok(())
            }
        }
        Formula::Not(g) => check_type_atoms(g, agents),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            check_type_atoms(a, agents)?;
            check_type_atoms(b, agents)
        }
        _ => Ok(()),
    }
}

/// All knight/knave assignments under which knights' utterances are true and
/// knaves' utterances false. Assignments are listed with the first agent
/// varying slowest and knight before knave.
pub fn solve_puzzle(
    agents: &[Agent],
    utterances: &[Utterance],
) -> Result<Vec<TypeAssignment>, CreedError> {
    let mut declared = BTreeSet::new();
    for a in agents {
        if !declared.insert(a) {
            return Err(CreedError::DuplicateAgent(a.clone()));
        }
    }
    for u in utterances {
        if !declared.contains(&u.speaker) {
            return Err(CreedError::UnknownAgent(u.speaker.clone()));
        }
        check_content(&u.speaker, &u.content)?;
        check_type_atoms(&u.content, &declared)?;
    }
    let n = agents.len();
    let mut out = Vec::new();
    for bits in 0u64..(1u64 << n) {
        let sigma: BTreeMap<Agent, &str> = agents
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let knave = bits >> (n - 1 - i) & 1 == 1;
                (a.clone(), if knave { KNAVE } else { KNIGHT })
            })
            .collect();
        let consistent = utterances
            .iter()
            .all(|u| holds(&u.content, &sigma) == (sigma[&u.speaker] == KNIGHT));
        if consistent {
            out.push(TypeAssignment(
                sigma.into_iter().map(|(a, t)| (a, t.to_string())).collect(),
            ));
        }
    }
    Ok(out)
}

/// `(contents of all utterances) & (type constraints) -> conclusion`, with
/// contents read by a knight listener over the candidates knight and knave.
pub fn puzzle_implication(
    agents: &[Agent],
    utterances: &[Utterance],
    conclusion: Formula,
) -> Result<Formula, CreedError> {
    let ts = TypeSystem::knights_and_knaves();
    let mut premises = Vec::new();
    for u in utterances {
        premises.push(informational_content(&ts, KNIGHT, u, &[KNIGHT, KNAVE])?);
    }
    premises.extend(ts.constraints(agents));
    Ok(Formula::implies(Formula::conjunction(premises), conclusion))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UtteranceDocument {
    pub speaker: Agent,
    pub formula: String,
}

/// Puzzle file: agents, the type names (knight and knave) and utterances
/// with formulas in the text grammar.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PuzzleDocument {
    pub agents: Vec<Agent>,
    #[serde(default = "default_types")]
    pub types: Vec<String>,
    pub utterances: Vec<UtteranceDocument>,
}

fn default_types() -> Vec<String> {
    vec![KNIGHT.into(), KNAVE.into()]
}

impl PuzzleDocument {
    pub fn from_json(text: &str) -> Result<Self, CreedError> {
        serde_json::from_str(text).map_err(|e| CreedError::Json(e.to_string()))
    }

    pub fn utterances(&self) -> Result<Vec<Utterance>, CreedError> {
        let mut types = self.types.clone();
        types.sort();
        if types != [KNAVE, KNIGHT] {
            return Err(CreedError::UnsupportedTypes(self.types.clone()));
        }
        let universe: BTreeSet<Agent> = self.agents.iter().cloned().collect();
        self.utterances
            .iter()
            .enumerate()
            .map(|(index, u)| {
                let content = parse(&u.formula, &universe)
                    .map_err(|source| CreedError::Parse { index, source })?;
                Ok(Utterance::new(u.speaker.clone(), content))
            })
            .collect()
    }

    pub fn solve(&self) -> Result<Vec<TypeAssignment>, CreedError> {
        solve_puzzle(&self.agents, &self.utterances()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::{bounded_validity, SearchConfig};
    use crate::kripke::enumerate_models;

    fn ag(id: &str) -> Agent {
        Agent::new(id).unwrap()
    }

    fn knave(a: &str) -> Formula {
        Formula::type_atom(ag(a), KNAVE)
    }

    fn smullyan() -> (Vec<Agent>, Vec<Utterance>) {
        (
            vec![ag("a"), ag("b")],
            vec![Utterance::new(ag("a"), Formula::or(knave("a"), knave("b")))],
        )
    }

    #[test]
    fn knight_and_knave_creeds() {
        let ts = TypeSystem::knights_and_knaves();
        let p = Formula::atom("p");
        assert_eq!(
            creed_formula(&ts, KNIGHT, &ag("a"), KNIGHT, &p)
                .unwrap()
                .to_string(),
            "type(a,knight) -> K[a] p"
        );
        assert_eq!(
            creed_formula(&ts, KNIGHT, &ag("a"), KNAVE, &p)
                .unwrap()
                .to_string(),
            "type(a,knave) -> K[a] !p"
        );
        assert_eq!(
            creed_formula(&ts, KNIGHT, &ag("a"), "squire", &p).unwrap_err(),
            CreedError::UnknownType("squire".into())
        );
    }

    #[test]
    fn identity_transformer_gives_hope_shape() {
        let ts = TypeSystem::uniform([("s", Transformer::Identity)]).unwrap();
        let p = Formula::atom("p");
        assert_eq!(
            creed_formula(&ts, "s", &ag("a"), "s", &p).unwrap(),
            Formula::implies(Formula::type_atom(ag("a"), "s"), Formula::k(ag("a"), p))
        );
    }

    #[test]
    fn smullyan_content_as_printed() {
        let ts = TypeSystem::knights_and_knaves();
        let (_, utts) = smullyan();
        let f = informational_content(&ts, KNIGHT, &utts[0], &[KNIGHT, KNAVE]).unwrap();
        assert_eq!(
            f.to_string(),
            "(type(a,knight) -> K[a](type(a,knave) | type(b,knave))) & \
             (type(a,knave) -> K[a] !(type(a,knave) | type(b,knave)))"
        );
    }

    #[test]
    fn single_candidate_is_unwrapped() {
        let ts = TypeSystem::knights_and_knaves();
        let (_, utts) = smullyan();
        let f = informational_content(&ts, KNIGHT, &utts[0], &[KNAVE]).unwrap();
        assert!(matches!(f, Formula::Implies(..)));
        assert_eq!(
            informational_content(&ts, KNIGHT, &utts[0], &[]).unwrap_err(),
            CreedError::EmptyCandidates
        );
    }

    #[test]
    fn hope_is_the_content_for_correct_and_faulty() {
        let ts = TypeSystem::correct_and_faulty();
        let a = ag("a");
        let p = Formula::atom("p");
        let content = informational_content(
            &ts,
            "correct",
            &Utterance::new(a.clone(), p.clone()),
            &["correct", "faulty"],
        )
        .unwrap();
        let eq = Formula::iff(content, Formula::h(a.clone(), p));
        let agents = [a].into();
        let atoms = ["p".to_string()].into();
        for w in 1..=3 {
            for m in enumerate_models(&agents, &atoms, w, u64::MAX).unwrap() {
                assert!(crate::checker::valid_in_model(&m, &eq).unwrap());
            }
        }
    }

    #[test]
    fn type_system_totality() {
        let partial = BTreeMap::from([(("x".to_string(), "x".to_string()), Transformer::Identity)]);
        assert!(matches!(
            TypeSystem::new(["x", "y"], partial),
            Err(CreedError::MissingTransformer { .. })
        ));
        assert_eq!(
            TypeSystem::new(Vec::<String>::new(), BTreeMap::new()).unwrap_err(),
            CreedError::NoTypes
        );
        assert_eq!(
            "belief-guard".parse::<Transformer>().unwrap(),
            Transformer::BeliefGuard
        );
        assert!("nope".parse::<Transformer>().is_err());
    }

    #[test]
    fn constraints() {
        let kk = TypeSystem::knights_and_knaves();
        assert_eq!(
            kk.constraints(&[ag("a")])[0].to_string(),
            "type(a,knight) <-> !type(a,knave)"
        );
        let three = TypeSystem::uniform([
            ("x", Transformer::Identity),
            ("y", Transformer::Negation),
            ("z", Transformer::ConstantTop),
        ])
        .unwrap();
        // one disjunction plus three exclusions
        assert_eq!(three.constraints(&[ag("a")]).len(), 4);
    }

    #[test]
    fn smullyan_has_unique_solution() {
        let (agents, utts) = smullyan();
        let sols = solve_puzzle(&agents, &utts).unwrap();
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0].to_string(), "a=knight b=knave");
    }

    #[test]
    fn liar_has_no_solution() {
        let sols = solve_puzzle(&[ag("a")], &[Utterance::new(ag("a"), knave("a"))]).unwrap();
        assert!(sols.is_empty());
    }

    #[test]
    fn silence_allows_everything() {
        let sols = solve_puzzle(&[ag("a")], &[]).unwrap();
        let names: Vec<String> = sols.iter().map(|s| s.to_string()).collect();
        assert_eq!(names, ["a=knight", "a=knave"]);
    }

    #[test]
    fn solver_rejects_unsupported_content() {
        let modal = Utterance::new(ag("a"), Formula::k(ag("a"), knave("a")));
        assert_eq!(
            solve_puzzle(&[ag("a")], &[modal]).unwrap_err(),
            CreedError::ModalContent(ag("a"))
        );
        let plain = Utterance::new(ag("a"), Formula::atom("p"));
        assert!(matches!(
            solve_puzzle(&[ag("a")], &[plain]),
            Err(CreedError::PlainAtom { .. })
        ));
        let stranger = Utterance::new(ag("a"), knave("z"));
        assert_eq!(
            solve_puzzle(&[ag("a")], &[stranger]).unwrap_err(),
            CreedError::UnknownAgent(ag("z"))
        );
    }

    #[test]
    fn smullyan_follows_modally() {
        let (agents, utts) = smullyan();
        let sol = &solve_puzzle(&agents, &utts).unwrap()[0];
        let f = puzzle_implication(&agents, &utts, sol.to_formula()).unwrap();
        let universe = agents.iter().cloned().collect();
        let v = bounded_validity(&f, &universe, 3, &SearchConfig::default()).unwrap();
        assert!(v.is_valid());
    }

    #[test]
    fn puzzle_document() {
        let doc = PuzzleDocument::from_json(
            r#"{"agents":["a","b"],"types":["knight","knave"],
                "utterances":[{"speaker":"a","formula":"type(a,knave) | type(b,knave)"}]}"#,
        )
        .unwrap();
        let sols = doc.solve().unwrap();
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0].type_of(&ag("b")), Some(KNAVE));
        assert_eq!(
            serde_json::to_string(&sols[0]).unwrap(),
            r#"{"a":"knight","b":"knave"}"#
        );
        let bad =
            PuzzleDocument::from_json(r#"{"agents":["a"],"types":["x"],"utterances":[]}"#).unwrap();
        assert!(matches!(bad.solve(), Err(CreedError::UnsupportedTypes(_))));
        let broken = PuzzleDocument::from_json(
            r#"{"agents":["a"],"utterances":[{"speaker":"a","formula":"type(a,"}]}"#,
        )
        .unwrap();
        assert!(matches!(
            broken.solve(),
            Err(CreedError::Parse { index: 0, .. })
        ));
    }
}
