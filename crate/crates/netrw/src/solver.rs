//! Problems, presolution search over transducer compositions, n-th order
//! class families and the bounded evolution loop.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::abstraction::{multidim_theta, AbstractionError, AbstractionRelation, Kind, MULTIDIM_LIMIT};
use crate::net::{canonical_form, is_isomorphic, Jungle, Net};
use crate::transducer::{run_td, td_compose, Transducer, TransducerError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("base abstraction is not distinct: {0}")]
    NotDistinct(String),
    #[error(transparent)]
    Transducer(#[from] TransducerError),
    #[error(transparent)]
    Abstraction(#[from] AbstractionError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Transition {
    Key(Vec<u8>),
    Any,
}

/// Finite-state acceptor reading the sorted canonical keys of a jungle.
/// Exact key transitions take precedence over `Any`; a missing transition
/// rejects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recognizer {
    pub start: usize,
    pub delta: Vec<Vec<(Transition, usize)>>,
    /// Final states with their type names.
    pub finals: BTreeMap<usize, String>,
}

impl Recognizer {
    pub fn accept_all() -> Self {
        Recognizer { start: 0, delta: vec![vec![(Transition::Any, 0)]], finals: BTreeMap::from([(0, "any".into())]) }
    }

    /// Accepts exactly the jungle `j`.
    pub fn exactly(j: &Jungle) -> Self {
        let keys: Vec<&Vec<u8>> = j.keys().collect();
        let mut delta: Vec<Vec<(Transition, usize)>> = keys.iter().enumerate().map(|(i, k)| vec![(Transition::Key((*k).clone()), i + 1)]).collect();
        delta.push(Vec::new());
        Recognizer { start: 0, delta, finals: BTreeMap::from([(keys.len(), "exact".into())]) }
    }

    /// Accepts jungles containing `n`.
    pub fn contains(n: &Net) -> Self {
        let k = canonical_form(n);
        Recognizer {
            start: 0,
            delta: vec![vec![(Transition::Key(k), 1), (Transition::Any, 0)], vec![(Transition::Any, 1)]],
            finals: BTreeMap::from([(1, "contains".into())]),
        }
    }

    /// Final state type reached on `j`, if any.
    pub fn run(&self, j: &Jungle) -> Option<&str> {
        let mut q = self.start;
        for k in j.keys() {
            let row = self.delta.get(q)?;
            let exact = row.iter().find(|(t, _)| matches!(t, Transition::Key(x) if x == k));
            let any = row.iter().find(|(t, _)| *t == Transition::Any);
            q = exact.or(any)?.1;
        }
        self.finals.get(&q).map(|s| s.as_str())
    }

    pub fn accepts(&self, j: &Jungle) -> bool {
        self.run(j).is_some()
    }
}

pub type Demand = Arc<dyn Fn(&Transducer, &Jungle) -> bool + Send + Sync>;

#[derive(Clone)]
pub struct Limits {
    pub max_depth: usize,
    /// Largest carrier a solution may have, in vertices.
    pub max_carrier: Option<usize>,
    pub custom: Vec<(String, Demand)>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_depth: 3, max_carrier: None, custom: Vec::new() }
    }
}

impl fmt::Debug for Limits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Limits")
            .field("max_depth", &self.max_depth)
            .field("max_carrier", &self.max_carrier)
            .field("custom", &self.custom.iter().map(|(n, _)| n).collect::<Vec<_>>())
            .finish()
    }
}

#[derive(Clone, Debug)]
pub struct Problem {
    pub subject: Jungle,
    pub recognizer: Recognizer,
    pub limits: Limits,
}

impl Problem {
    pub fn new(subject: Jungle, recognizer: Recognizer) -> Self {
        Problem { subject, recognizer, limits: Limits::default() }
    }

    pub fn with_depth(mut self, d: usize) -> Self {
        self.limits.max_depth = d;
        self
    }

    pub fn demands_met(&self, td: &Transducer, product: &Jungle) -> bool {
        self.limits.max_carrier.is_none_or(|m| td.carrier.len() <= m) && self.limits.custom.iter().all(|(_, d)| d(td, product))
    }
}

#[derive(Clone, Debug)]
pub struct SolutionRecord {
    pub td: Transducer,
    /// Library indices composed, in order.
    pub path: Vec<usize>,
    pub product: Jungle,
    pub demands_met: bool,
    pub exhausted: bool,
}

#[derive(Clone, Debug, Default)]
pub struct SolveResult {
    pub records: Vec<SolutionRecord>,
    /// The depth limit stopped a search that still had new products.
    pub exhausted: bool,
}

impl SolveResult {
    pub fn solutions(&self) -> impl Iterator<Item = &SolutionRecord> {
        self.records.iter().filter(|r| r.demands_met)
    }

    pub fn solved(&self) -> bool {
        self.solutions().next().is_some()
    }
}

/// Breadth-first search over compositions of library members up to the
/// depth limit. A composite whose product was already reached is recorded
/// if accepted but not extended.
pub fn solve(p: &Problem, library: &[Transducer]) -> Result<SolveResult, SolverError> {
    let mut result = SolveResult::default();
    let mut seen: BTreeSet<Vec<Vec<u8>>> = BTreeSet::new();
    let mut frontier: Vec<(Vec<usize>, Transducer, Jungle)> = Vec::new();
    for depth in 1..=p.limits.max_depth {
        let parents: Vec<(Vec<usize>, Option<Transducer>, Jungle)> = if depth == 1 {
            vec![(Vec::new(), None, p.subject.clone())]
        } else {
            frontier.drain(..).map(|(path, td, j)| (path, Some(td), j)).collect()
        };
        let mut next = Vec::new();
        for (path, td, input) in parents {
            for (i, lib) in library.iter().enumerate() {
                let composite = match &td {
                    None => lib.clone(),
                    Some(t) => match td_compose(t, lib) {
                        Ok(c) => c,
                        Err(TransducerError::InterfaceMismatch(_)) => continue,
                        Err(e) => return Err(e.into()),
                    },
                };
                let out = run_td(lib, &input)?;
                let mut path = path.clone();
                path.push(i);
                if p.recognizer.accepts(&out.jungle) {
                    let demands_met = p.demands_met(&composite, &out.jungle);
                    result.records.push(SolutionRecord { td: composite.clone(), path: path.clone(), product: out.jungle.clone(), demands_met, exhausted: out.exhausted });
                }
                if seen.insert(out.jungle.keys().cloned().collect()) {
                    next.push((path, composite, out.jungle));
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    result.exhausted = !frontier.is_empty();
    Ok(result)
}

/// Base abstraction as the kernel of a symbol collapse. Primes are
/// stripped before the collapse map applies.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolCollapse {
    pub map: BTreeMap<String, String>,
}

impl SymbolCollapse {
    pub fn new(pairs: &[(&str, &str)]) -> Self {
        SymbolCollapse { map: pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect() }
    }

    pub fn image(&self, n: &Net) -> Net {
        let map: BTreeMap<String, String> = n
            .symbols()
            .into_iter()
            .map(|s| {
                let base = s.trim_end_matches('\'').to_string();
                let to = self.map.get(&base).cloned().unwrap_or(base);
                (s, to)
            })
            .collect();
        n.rename_symbols(&map)
    }

    pub fn key(&self, n: &Net) -> Vec<u8> {
        canonical_form(&self.image(n))
    }

    pub fn relation(&self, universe: &Jungle) -> AbstractionRelation {
        AbstractionRelation::kernel_onto(Kind::Nbh, universe, |n| self.image(n), "collapse")
    }

    /// Whether transducers have collapse-equal carriers.
    pub fn td_related(&self, p: &Transducer, q: &Transducer) -> bool {
        self.key(&p.carrier) == self.key(&q.carrier)
    }
}

/// Bounds for the evolution loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvolutionBudget {
    pub max_library: usize,
    pub max_members: usize,
}

impl Default for EvolutionBudget {
    fn default() -> Self {
        EvolutionBudget { max_library: 64, max_members: 256 }
    }
}

/// One class family of order n: a sequence of order-0 classes, with the
/// composites it stands for.
#[derive(Clone, Debug)]
pub struct Family {
    pub classes: Vec<usize>,
    pub members: Vec<Transducer>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureViolation {
    pub family: Vec<usize>,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct LevelResult {
    pub order: usize,
    pub k: usize,
    pub families: Vec<Family>,
    pub violations: Vec<ClosureViolation>,
}

impl LevelResult {
    pub fn closed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct EvolutionState {
    pub universe: Jungle,
    pub theta: SymbolCollapse,
    pub library: Vec<Transducer>,
    pub problems: Vec<Problem>,
    pub level: usize,
    /// Per evolution level, the problems solved with the library then.
    pub solved: Vec<BTreeSet<usize>>,
    pub levels: Vec<LevelResult>,
    pub budget: EvolutionBudget,
}

impl EvolutionState {
    pub fn new(universe: Jungle, theta: SymbolCollapse, seed: Vec<Transducer>, problems: Vec<Problem>) -> Self {
        EvolutionState { universe, theta, library: seed, problems, level: 0, solved: Vec::new(), levels: Vec::new(), budget: EvolutionBudget::default() }
    }

    /// Order-0 classes of the library under the carrier relation.
    pub fn td_classes(&self) -> Vec<Vec<usize>> {
        let mut by: BTreeMap<Vec<u8>, Vec<usize>> = BTreeMap::new();
        let mut order = Vec::new();
        for (i, td) in self.library.iter().enumerate() {
            let k = self.theta.key(&td.carrier);
            if !by.contains_key(&k) {
                order.push(k.clone());
            }
            by.entry(k).or_default().push(i);
        }
        order.into_iter().map(|k| by.remove(&k).expect("class")).collect()
    }
}

/// Members of different base classes must not be isomorphic.
pub fn check_distinct(universe: &Jungle, theta: &SymbolCollapse) -> Result<(), SolverError> {
    let nets: Vec<&Net> = universe.iter().collect();
    for (i, a) in nets.iter().enumerate() {
        for b in &nets[i + 1..] {
            if theta.key(a) != theta.key(b) && is_isomorphic(a, b) {
                return Err(SolverError::NotDistinct(format!("{a} and {b} are isomorphic in different classes")));
            }
        }
    }
    Ok(())
}

fn compose_all(parts: &[&Transducer]) -> Result<Transducer, TransducerError> {
    let mut it = parts.iter();
    let mut td = (*it.next().expect("nonempty")).clone();
    for p in it {
        td = td_compose(&td, p)?;
    }
    Ok(td)
}

/// Class families of order `n` at multidimensional level `k`, with their
/// closure inclusions checked: every family's members are pairwise related
/// and, from each level-k class, all products lie in one base class.
pub fn n_level_solve(state: &EvolutionState, n: usize, k: usize) -> Result<LevelResult, SolverError> {
    check_distinct(&state.universe, &state.theta)?;
    let base = state.theta.relation(&state.universe);
    let level = multidim_theta(&[base], k, MULTIDIM_LIMIT)?;
    let mut input_classes: Vec<Jungle> = Vec::new();
    for a in &state.universe {
        let c = level.relation.class_of(a);
        if !input_classes.contains(&c) {
            input_classes.push(c);
        }
    }
    let classes = state.td_classes();
    let mut seqs: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..=n {
        seqs = seqs.into_iter().flat_map(|s| (0..classes.len()).map(move |c| [s.clone(), vec![c]].concat())).collect();
    }
    let mut families = Vec::new();
    let mut violations = Vec::new();
    for seq in seqs {
        let mut choices: Vec<Vec<usize>> = vec![Vec::new()];
        for c in &seq {
            choices = choices.into_iter().flat_map(|s| classes[*c].iter().map(move |m| [s.clone(), vec![*m]].concat())).collect();
            if choices.len() > state.budget.max_members {
                return Err(SolverError::BudgetExceeded(format!("family {seq:?} exceeds {} members", state.budget.max_members)));
            }
        }
        let mut members = Vec::new();
        for pick in &choices {
            let parts: Vec<&Transducer> = pick.iter().map(|i| &state.library[*i]).collect();
            match compose_all(&parts) {
                Ok(td) => members.push(td),
                Err(TransducerError::InterfaceMismatch(_)) => {}
                Err(e) => return Err(e.into()),
            }
        }
        if members.is_empty() {
            continue;
        }
        if let Some((x, y)) = members.iter().enumerate().flat_map(|(i, p)| members[i + 1..].iter().map(move |q| (p, q))).find(|(p, q)| !state.theta.td_related(p, q)) {
            violations.push(ClosureViolation { family: seq.clone(), detail: format!("carriers {} and {} unrelated", x.carrier, y.carrier) });
        }
        for class in &input_classes {
            let mut keys = BTreeSet::new();
            let mut sample = None;
            for td in &members {
                for a in class {
                    let out = run_td(td, &Jungle::singleton(a.clone()))?;
                    for b in &out.jungle {
                        if keys.insert(state.theta.key(b)) && sample.is_none() {
                            sample = Some(b.to_string());
                        }
                    }
                }
            }
            if keys.len() > 1 {
                violations.push(ClosureViolation {
                    family: seq.clone(),
                    detail: format!("products span {} base classes from a class of {} nets", keys.len(), class.len()),
                });
            }
        }
        families.push(Family { classes: seq, members });
    }
    Ok(LevelResult { order: n, k, families, violations })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceLine {
    pub level: usize,
    pub order: usize,
    pub families: usize,
    pub solutions: usize,
    pub exhausted: bool,
}

impl fmt::Display for TraceLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "level={} order={} families={} solutions={} exhausted={}", self.level, self.order, self.families, self.solutions, self.exhausted)
    }
}

/// Runs evolution levels `0..=m_max`. Level m builds order `n_m` families
/// at depth `k_m` from `schedule` (its last entry repeats), solves every
/// problem with the current library and adds new solutions to it. Stops
/// early, with an exhausted line, once the library outgrows its budget.
pub fn evolve(mut state: EvolutionState, m_max: usize, schedule: &[(usize, usize)]) -> Result<(EvolutionState, Vec<TraceLine>), SolverError> {
    let mut trace = Vec::new();
    let mut known: BTreeSet<Vec<u8>> = state.library.iter().map(|t| t.fingerprint()).collect();
    for m in 0..=m_max {
        let (n, k) = schedule.get(m).or(schedule.last()).copied().unwrap_or((0, 0));
        let level = match n_level_solve(&state, n, k) {
            Ok(l) => l,
            Err(SolverError::BudgetExceeded(_)) => {
                trace.push(TraceLine { level: m, order: n, families: 0, solutions: 0, exhausted: true });
                break;
            }
            Err(e) => return Err(e),
        };
        let mut solved = BTreeSet::new();
        let mut found = Vec::new();
        for (i, p) in state.problems.iter().enumerate() {
            let r = solve(&p.clone().with_depth(p.limits.max_depth.max(n + 1)), &state.library)?;
            if r.solved() {
                solved.insert(i);
            }
            found.extend(r.solutions().map(|s| s.td.clone()));
        }
        let mut exhausted = false;
        for td in found {
            if known.insert(td.fingerprint()) {
                if state.library.len() >= state.budget.max_library {
                    exhausted = true;
                    break;
                }
                state.library.push(td);
            }
        }
        trace.push(TraceLine { level: m, order: n, families: level.families.len(), solutions: solved.len(), exhausted });
        state.solved.push(solved);
        state.levels.push(level);
        state.level = m;
        if exhausted {
            break;
        }
    }
    Ok((state, trace))
}

pub fn format_trace(trace: &[TraceLine]) -> String {
    trace.iter().map(|l| format!("{l}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{Label, Port, RankedSymbol};
    use crate::rewrite::{relabel_rule, Rns};
    use crate::transducer::Operator;

    fn sym(n: &str) -> RankedSymbol {
        RankedSymbol::simple(n, 1, 1)
    }

    fn one(n: &str) -> Net {
        Net::build([(0, Label::Symbol(sym(n)))], Vec::new(), vec![(Port::inp(0, 1), "x".into()), (Port::out(0, 1), "y".into())], None).unwrap()
    }

    fn step(name: &str, pairs: &[(&str, &str)]) -> Transducer {
        let rules = pairs.iter().map(|(a, b)| relabel_rule(&format!("{a}{b}"), &sym(a), &sym(b))).collect();
        Transducer::single(name, vec![Operator::Step(Rns::new(rules).unwrap())])
    }

    #[test]
    fn recognizers() {
        let j: Jungle = [one("a"), one("b")].into_iter().collect();
        assert!(Recognizer::accept_all().accepts(&j));
        assert!(Recognizer::exactly(&j).accepts(&j));
        assert!(!Recognizer::exactly(&j).accepts(&Jungle::singleton(one("a"))));
        assert!(Recognizer::contains(&one("b")).accepts(&j));
        assert!(!Recognizer::contains(&one("c")).accepts(&j));
    }

    #[test]
    fn composite_solution_at_depth_two() {
        let lib = vec![step("p", &[("a", "b")]), step("q", &[("b", "c")])];
        let p = Problem::new(Jungle::singleton(one("a")), Recognizer::exactly(&Jungle::singleton(one("c")))).with_depth(2);
        let r = solve(&p, &lib).unwrap();
        let s = r.solutions().next().expect("solution");
        assert_eq!(s.path, vec![0, 1]);
        assert_eq!(run_td(&s.td, &p.subject).unwrap().jungle, s.product);
        let shallow = solve(&p.clone().with_depth(1), &lib).unwrap();
        assert!(!shallow.solved() && shallow.exhausted);
        let all = solve(&Problem::new(p.subject.clone(), Recognizer::accept_all()).with_depth(1), &lib).unwrap();
        assert_eq!(all.records.len(), 2);
    }

    #[test]
    fn distinctness_refusal() {
        let u: Jungle = [one("a"), one("b")].into_iter().collect();
        let st = EvolutionState::new(u, SymbolCollapse::default(), vec![step("p", &[("a", "c")])], Vec::new());
        assert!(matches!(n_level_solve(&st, 0, 0), Err(SolverError::NotDistinct(_))));
    }

    fn seeded() -> EvolutionState {
        let u: Jungle = [one("a"), one("b")].into_iter().collect();
        let theta = SymbolCollapse::new(&[("b", "a"), ("d", "c"), ("q", "p")]);
        let seed = vec![step("p", &[("a", "c"), ("b", "d")]), step("q", &[("a", "d"), ("b", "c")])];
        let problems = vec![
            Problem::new(Jungle::singleton(one("a")), Recognizer::contains(&one("c"))).with_depth(1),
            Problem::new(Jungle::singleton(one("a")), Recognizer::contains(&one("z"))).with_depth(1),
        ];
        EvolutionState::new(u, theta, seed, problems)
    }

    #[test]
    fn closure_at_low_orders() {
        let st = seeded();
        for n in 0..=2 {
            let l = n_level_solve(&st, n, 1).unwrap();
            assert!(l.closed(), "{:?}", l.violations);
            assert_eq!(l.families.len(), 1);
        }
    }

    #[test]
    fn evolution_is_monotone_and_replays() {
        let (st, trace) = evolve(seeded(), 3, &[(0, 0), (1, 1)]).unwrap();
        for w in st.solved.windows(2) {
            assert!(w[0].is_subset(&w[1]));
        }
        let (_, again) = evolve(seeded(), 3, &[(0, 0), (1, 1)]).unwrap();
        assert_eq!(format_trace(&trace), format_trace(&again));
        assert_eq!(trace.len(), 4);
        assert!(format_trace(&trace).starts_with("level=0 order=0 families=1 solutions=1 exhausted=false\n"));
        let mut tight = seeded();
        tight.budget.max_members = 1;
        let (_, partial) = evolve(tight, 3, &[(0, 0)]).unwrap();
        assert!(partial.last().unwrap().exhausted);
    }
}
