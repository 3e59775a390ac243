use std::collections::BTreeSet;

use super::ast::{type_atom_name, Agent, CoreFormula, Formula};
use super::FormulaError;

fn not(f: CoreFormula) -> CoreFormula {
    CoreFormula::Not(Box::new(f))
}

/// Negation that cancels an outer negation instead of stacking a second one.
fn neg(f: CoreFormula) -> CoreFormula {
    match f {
        CoreFormula::Not(inner) => *inner,
        other => not(other),
    }
}

fn and(a: CoreFormula, b: CoreFormula) -> CoreFormula {
    CoreFormula::And(Box::new(a), Box::new(b))
}

fn or(a: CoreFormula, b: CoreFormula) -> CoreFormula {
    not(and(neg(a), neg(b)))
}

fn implies(a: CoreFormula, b: CoreFormula) -> CoreFormula {
    not(and(a, neg(b)))
}

fn top() -> CoreFormula {
    not(CoreFormula::Bot)
}

/// `!H[i] bot`
pub fn correct_core(agent: &Agent) -> CoreFormula {
    not(CoreFormula::H(agent.clone(), Box::new(CoreFormula::Bot)))
}

/// The groups of size `n - f` whose joint correctness makes up `byz(f)`,
/// in lexicographic order over the sorted universe.
pub fn byz_groups(universe: &BTreeSet<Agent>, f: usize) -> Result<Vec<Vec<Agent>>, FormulaError> {
    let n = universe.len();
    if f > n {
        return Err(FormulaError::ByzTooLarge { f, n });
    }
    let agents: Vec<&Agent> = universe.iter().collect();
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(n - f);
    choose(&agents, 0, n - f, &mut chosen, &mut out);
    Ok(out)
}

fn choose<'a>(
    agents: &[&'a Agent],
    from: usize,
    size: usize,
    chosen: &mut Vec<&'a Agent>,
    out: &mut Vec<Vec<Agent>>,
) {
    if chosen.len() == size {
        out.push(chosen.iter().map(|a| (*a).clone()).collect());
        return;
    }
    let remaining = size - chosen.len();
    for i in from..agents.len() {
        if agents.len() - i < remaining {
            break;
        }
        chosen.push(agents[i]);
        choose(agents, i + 1, size, chosen, out);
        chosen.pop();
    }
}

/// `byz(f)` written out with the surface connectives: a disjunction over the
/// `(n - f)`-element groups of the conjunction of their members' correctness.
pub fn expand_byz(universe: &BTreeSet<Agent>, f: usize) -> Result<Formula, FormulaError> {
    let groups = byz_groups(universe, f)?;
    Ok(Formula::disjunction(groups.into_iter().map(|g| {
        Formula::conjunction(g.into_iter().map(Formula::Correct))
    })))
}

/// Rewrites every derived operator into the core fragment.
///
/// `universe` is the agent set `byz(f)` quantifies over.
pub fn desugar(f: &Formula, universe: &BTreeSet<Agent>) -> Result<CoreFormula, FormulaError> {
    Ok(match f {
        Formula::Bot => CoreFormula::Bot,
        Formula::Top => top(),
        Formula::Atom(p) => CoreFormula::Atom(p.clone()),
        Formula::Correct(i) => correct_core(i),
        Formula::TypeAtom(i, t) => CoreFormula::Atom(type_atom_name(i, t)),
        Formula::Not(g) => not(desugar(g, universe)?),
        Formula::And(a, b) => and(desugar(a, universe)?, desugar(b, universe)?),
        Formula::Or(a, b) => or(desugar(a, universe)?, desugar(b, universe)?),
        Formula::Implies(a, b) => implies(desugar(a, universe)?, desugar(b, universe)?),
        Formula::Iff(a, b) => {
            let a = desugar(a, universe)?;
            let b = desugar(b, universe)?;
            and(implies(a.clone(), b.clone()), implies(b, a))
        }
        Formula::K(i, g) => CoreFormula::K(i.clone(), Box::new(desugar(g, universe)?)),
        Formula::H(i, g) => CoreFormula::H(i.clone(), Box::new(desugar(g, universe)?)),
        Formula::B(i, g) => CoreFormula::K(
            i.clone(),
            Box::new(implies(correct_core(i), desugar(g, universe)?)),
        ),
        Formula::MutualHope(group, g) => {
            if group.is_empty() {
                return Err(FormulaError::EmptyGroup);
            }
            let body = desugar(g, universe)?;
            group
                .iter()
                .map(|i| CoreFormula::H(i.clone(), Box::new(body.clone())))
                .reduce(and)
                .expect("non-empty group")
        }
        Formula::Byz(n) => desugar(&expand_byz(universe, *n)?, universe)?,
    })
}

/// Agents, atoms and modal depth of a core formula.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Analysis {
    pub agents: BTreeSet<Agent>,
    pub atoms: BTreeSet<String>,
    pub modal_depth: usize,
}

pub fn analyze_core(f: &CoreFormula) -> Analysis {
    let mut out = Analysis::default();
    out.modal_depth = walk(f, &mut out);
    out
}

fn walk(f: &CoreFormula, out: &mut Analysis) -> usize {
    match f {
        CoreFormula::Bot => 0,
        CoreFormula::Atom(p) => {
            out.atoms.insert(p.clone());
            0
        }
        CoreFormula::Not(g) => walk(g, out),
        CoreFormula::And(a, b) => walk(a, out).max(walk(b, out)),
        CoreFormula::K(i, g) | CoreFormula::H(i, g) => {
            out.agents.insert(i.clone());
            1 + walk(g, out)
        }
    }
}

/// Agents, atoms and modal depth of `desugar(f)`.
pub fn analyze(f: &Formula, universe: &BTreeSet<Agent>) -> Result<Analysis, FormulaError> {
    Ok(analyze_core(&desugar(f, universe)?))
}
