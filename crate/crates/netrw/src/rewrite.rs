//! Renetting systems: rules, matching, rewriting, closure and normal forms.
//!
//! A rule side is a net whose frontier vertices and free ports form its
//! interface. A frontier vertex named `x` attached to a ranked port, or a
//! free port lettered `x`, is the interface point `x`; both kinds share one
//! namespace. When a left side matches, every interface point is bound to
//! the host port on the other side of the boundary (or to nothing when the
//! host port is itself free). The right side then reconnects its interface
//! points of the same name to those bindings.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::morphism::NetSubstitution;
use crate::net::{
    assemble, canonical_form, cut_letter, embeddings, Jungle, Label, Net, NetError, Port, Position, Slot,
    VertexId,
};

mod classify;

pub use classify::*;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("rule `{rule}` drops interface `{point}` while the environment is linked to it")]
    DanglingEnvironment { rule: String, point: String },
    #[error("match enumeration exceeded the bound of {0}")]
    BudgetExceeded(usize),
    #[error("malformed rule `{0}`: {1}")]
    Rule(String, String),
    #[error(transparent)]
    Net(#[from] NetError),
}

/// Interface point of a rule side: the ranked port it sits on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterfacePoint {
    pub port: Port,
    pub frontier: Option<VertexId>,
}

/// Rule preform `left → right` with its substitution relations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RulePreform {
    pub name: String,
    pub left: Net,
    pub right: Net,
    pub left_sub_domain: BTreeSet<String>,
    pub right_subs: Vec<NetSubstitution>,
}

/// Interface points of a rule side, by name. Fails on duplicate names.
pub fn interface(side: &Net) -> Result<BTreeMap<String, InterfacePoint>, String> {
    let mut out = BTreeMap::new();
    for (v, l) in side.labels() {
        if let Label::Frontier { letter, dir } = l {
            let p = Port::new(*v, *dir, 1);
            let pt = match side.partner(p) {
                Some(q) if !side.labels()[&q.vertex].is_frontier() => InterfacePoint { port: q, frontier: Some(*v) },
                Some(_) => return Err(format!("frontier `{letter}` is linked to another frontier")),
                None => InterfacePoint { port: p, frontier: Some(*v) },
            };
            if out.insert(letter.clone(), pt).is_some() {
                return Err(format!("interface name `{letter}` used twice"));
            }
        }
    }
    for (p, letter) in side.dangling() {
        if side.labels()[&p.vertex].is_frontier() {
            continue;
        }
        if out.insert(letter.clone(), InterfacePoint { port: p, frontier: None }).is_some() {
            return Err(format!("interface name `{letter}` used twice"));
        }
    }
    Ok(out)
}

/// The ranked part of a side, with frontier attachments turned into free
/// ports lettered by the frontier name.
pub fn apex(side: &Net) -> Net {
    let ranked = side.ranked_vertices();
    let mut fix = Vec::new();
    for (v, l) in side.labels() {
        if let Label::Frontier { letter, dir } = l {
            if let Some(q) = side.partner(Port::new(*v, *dir, 1)) {
                if ranked.contains(&q.vertex) {
                    fix.push((q, letter.clone()));
                }
            }
        }
    }
    let base = side.induced(&ranked);
    crate::morphism::relabel_ports(&base, &fix)
}

impl RulePreform {
    /// Builds and validates a rule.
    pub fn new(name: impl Into<String>, left: Net, right: Net, right_subs: Vec<NetSubstitution>) -> Result<Self, RewriteError> {
        let name = name.into();
        let left_sub_domain = left.frontier_letters();
        let r = RulePreform { name, left, right, left_sub_domain, right_subs };
        r.validate()?;
        Ok(r)
    }

    pub fn simple(name: impl Into<String>, left: Net, right: Net) -> Result<Self, RewriteError> {
        Self::new(name, left, right, Vec::new())
    }

    pub fn validate(&self) -> Result<(), RewriteError> {
        let err = |m: String| RewriteError::Rule(self.name.clone(), m);
        let li = interface(&self.left).map_err(err)?;
        let ri = interface(&self.right).map_err(err)?;
        for (n, rp) in &ri {
            if let Some(lp) = li.get(n) {
                if lp.port.dir != rp.port.dir {
                    return Err(err(format!("interface `{n}` changes direction")));
                }
            }
        }
        let rsub_dom: BTreeSet<String> = self.right_subs.iter().flat_map(|g| g.domain()).collect();
        for x in self.right.frontier_letters() {
            if !li.contains_key(&x) && !rsub_dom.contains(&x) {
                return Err(err(format!("right frontier `{x}` is neither bound on the left nor substituted")));
            }
        }
        for g in &self.right_subs {
            g.validate().map_err(|e| err(e.to_string()))?;
            for (x, frag) in &g.map {
                let rp = ri.get(x).ok_or_else(|| err(format!("substitution for `{x}` has no right interface point")))?;
                let dp = frag.port_with_letter(x).expect("validated");
                let want = if rp.port.vertex == rp.frontier.unwrap_or(u32::MAX) { rp.port.dir } else { rp.port.dir.flip() };
                if dp.dir != want {
                    return Err(err(format!("fragment for `{x}` attaches with the wrong direction")));
                }
            }
        }
        Ok(())
    }

    /// Left side without frontier vertices.
    pub fn left_apex(&self) -> Net {
        apex(&self.left)
    }

    pub fn right_apex(&self) -> Net {
        apex(&self.right)
    }

    /// True when the left side has no ranked vertex.
    pub fn is_wildcard(&self) -> bool {
        self.left.ranked_vertices().is_empty()
    }
}

impl fmt::Display for RulePreform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule {} ({} -> {} vertices)", self.name, self.left.len(), self.right.len())
    }
}

pub type Predicate = Arc<dyn Fn(&Net, &MatchRecord) -> bool + Send + Sync>;

/// Conditional demands on rule application.
#[derive(Clone, Default)]
pub struct ConditionSet {
    /// Priority order: the first rule in this order that matches a net is
    /// the only one applied to it.
    pub application_order: Option<Vec<String>>,
    pub instance_sensitive: bool,
    /// Allowed right-substitution indices per rule.
    pub binding: BTreeMap<String, BTreeSet<usize>>,
    pub custom_predicates: Vec<(String, Predicate)>,
    /// Rules allowed to sever environment links of interface points they drop.
    pub cut_environment: BTreeSet<String>,
}

impl fmt::Debug for ConditionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConditionSet")
            .field("application_order", &self.application_order)
            .field("instance_sensitive", &self.instance_sensitive)
            .field("binding", &self.binding)
            .field("custom_predicates", &self.custom_predicates.iter().map(|p| &p.0).collect::<Vec<_>>())
            .field("cut_environment", &self.cut_environment)
            .finish()
    }
}

impl PartialEq for ConditionSet {
    fn eq(&self, o: &Self) -> bool {
        self.application_order == o.application_order
            && self.instance_sensitive == o.instance_sensitive
            && self.binding == o.binding
            && self.cut_environment == o.cut_environment
            && self.custom_predicates.iter().map(|p| &p.0).eq(o.custom_predicates.iter().map(|p| &p.0))
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Rns {
    pub rules: Vec<RulePreform>,
    pub conditions: ConditionSet,
}

impl Rns {
    pub fn new(rules: Vec<RulePreform>) -> Result<Self, RewriteError> {
        let mut seen = BTreeSet::new();
        for r in &rules {
            if !seen.insert(r.name.clone()) {
                return Err(RewriteError::Rule(r.name.clone(), "duplicate rule name".into()));
            }
        }
        Ok(Rns { rules, conditions: ConditionSet::default() })
    }

    pub fn empty() -> Self {
        Rns::default()
    }

    pub fn rule(&self, name: &str) -> Option<&RulePreform> {
        self.rules.iter().find(|r| r.name == name)
    }

    pub fn with_conditions(mut self, c: ConditionSet) -> Self {
        self.conditions = c;
        self
    }

    /// Rules in application order.
    pub fn ordered_rules(&self) -> Vec<&RulePreform> {
        match &self.conditions.application_order {
            Some(order) => {
                let mut v: Vec<&RulePreform> = order.iter().filter_map(|n| self.rule(n)).collect();
                for r in &self.rules {
                    if !order.contains(&r.name) {
                        v.push(r);
                    }
                }
                v
            }
            None => self.rules.iter().collect(),
        }
    }

    /// Right substitutions usable by `rule`; `None` stands for reusing the
    /// match bindings.
    pub fn substitution_choices<'a>(&'a self, rule: &'a RulePreform) -> Vec<Option<&'a NetSubstitution>> {
        if rule.right_subs.is_empty() {
            return vec![None];
        }
        let allowed = self.conditions.binding.get(&rule.name);
        rule.right_subs
            .iter()
            .enumerate()
            .filter(|(i, _)| allowed.is_none_or(|a| a.contains(i)))
            .map(|(_, g)| Some(g))
            .collect()
    }

    /// Symbols occurring in any rule side.
    pub fn symbols(&self) -> BTreeSet<String> {
        self.rules.iter().flat_map(|r| r.left.symbols().into_iter().chain(r.right.symbols())).collect()
    }
}

/// A redex: rule, occurrence, and the bindings of the left interface.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct MatchRecord {
    pub rule: String,
    pub position: Position,
    /// Left ranked vertex ↦ host vertex.
    pub vertex_map: BTreeMap<VertexId, VertexId>,
    /// Left interface name ↦ host port across the boundary.
    pub bindings: BTreeMap<String, Option<Port>>,
}

impl MatchRecord {
    /// Host vertices of the occurrence.
    pub fn occurrence(&self) -> BTreeSet<VertexId> {
        self.vertex_map.values().copied().collect()
    }

    /// The substitution found for the left frontier letters: each letter
    /// bound to a host port maps to the single vertex owning that port.
    pub fn assignment(&self, host: &Net, rule: &RulePreform) -> NetSubstitution {
        let mut f = NetSubstitution::new();
        for x in &rule.left_sub_domain {
            if let Some(Some(p)) = self.bindings.get(x) {
                f.map.insert(x.clone(), neighbour_fragment(host, *p, x));
            }
        }
        f
    }
}

/// Single-vertex fragment of `host` owning `p`, designated at `p` by `x`.
pub fn neighbour_fragment(host: &Net, p: Port, x: &str) -> Net {
    let one = host.induced(&BTreeSet::from([p.vertex])).with_root(None);
    let one = one.map_letters(|l| if l == x { format!("{l}'") } else { l.to_string() });
    crate::morphism::relabel_ports(&one, &[(p, x.to_string())])
}

pub const DEFAULT_MATCH_LIMIT: usize = 100_000;

/// All matches of all rules in `s`, ordered by rule order then position.
pub fn find_matches(r: &Rns, s: &Net) -> Result<Vec<MatchRecord>, RewriteError> {
    let mut out = Vec::new();
    for rule in r.ordered_rules() {
        out.extend(matches_of(rule, s)?);
    }
    Ok(out)
}

/// Matches of one rule. Wildcard rules match every vertex.
pub fn matches_of(rule: &RulePreform, s: &Net) -> Result<Vec<MatchRecord>, RewriteError> {
    if rule.is_wildcard() {
        return Ok(s
            .vertex_ids()
            .map(|v| MatchRecord {
                rule: rule.name.clone(),
                position: Position::of([v]),
                vertex_map: BTreeMap::new(),
                bindings: BTreeMap::new(),
            })
            .collect());
    }
    let left_apex = rule.left.induced(&rule.left.ranked_vertices());
    let iface = interface(&rule.left).map_err(|m| RewriteError::Rule(rule.name.clone(), m))?;
    let embs = embeddings(&left_apex, s);
    if embs.len() > DEFAULT_MATCH_LIMIT {
        return Err(RewriteError::BudgetExceeded(DEFAULT_MATCH_LIMIT));
    }
    let all: BTreeSet<VertexId> = s.vertex_ids().collect();
    let mut out = Vec::new();
    for m in embs {
        let occ: BTreeSet<VertexId> = m.values().copied().collect();
        let mut bindings = BTreeMap::new();
        for (name, pt) in &iface {
            if pt.frontier == Some(pt.port.vertex) {
                continue;
            }
            let hp = Port::new(m[&pt.port.vertex], pt.port.dir, pt.port.index);
            bindings.insert(name.clone(), s.partner(hp));
        }
        let position = if occ == all { Position::whole() } else { Position::of(occ) };
        out.push(MatchRecord { rule: rule.name.clone(), position, vertex_map: m, bindings });
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Matches that pass the condition set, honouring application order.
pub fn applicable_matches(r: &Rns, s: &Net) -> Result<Vec<MatchRecord>, RewriteError> {
    let prioritized = r.conditions.application_order.is_some();
    let mut out = Vec::new();
    for rule in r.ordered_rules() {
        if rule.is_wildcard() {
            continue;
        }
        let ms: Vec<MatchRecord> = matches_of(rule, s)?
            .into_iter()
            .filter(|m| r.conditions.custom_predicates.iter().all(|(_, p)| p(s, m)))
            .collect();
        if ms.is_empty() {
            continue;
        }
        out.extend(ms);
        if prioritized {
            break;
        }
    }
    Ok(out)
}

/// Result of one replacement together with where the right side landed.
#[derive(Clone, Debug)]
pub struct Replacement {
    pub net: Net,
    /// Right-side vertex ↦ result vertex.
    pub right_map: BTreeMap<VertexId, VertexId>,
    /// Vertices contributed by right substitution fragments.
    pub fragment_vertices: BTreeSet<VertexId>,
}

/// Replaces the occurrence of `m` in `host` by the right side of `rule`,
/// using substitution `g` (or the bindings when `None`).
pub fn replace(
    host: &Net,
    rule: &RulePreform,
    m: &MatchRecord,
    g: Option<&NetSubstitution>,
    cut_env: bool,
) -> Result<Replacement, RewriteError> {
    let occ = m.occurrence();
    let ri = interface(&rule.right).map_err(|e| RewriteError::Rule(rule.name.clone(), e))?;
    let mut labels: BTreeMap<VertexId, Label> =
        host.labels().iter().filter(|(v, _)| !occ.contains(v)).map(|(v, l)| (*v, l.clone())).collect();
    let mut slots: BTreeMap<Port, Slot> = BTreeMap::new();
    for (p, s) in host.slots() {
        if occ.contains(&p.vertex) {
            continue;
        }
        let s2 = match s {
            Slot::Linked(q) if occ.contains(&q.vertex) => Slot::Free(cut_letter(*p)),
            other => other.clone(),
        };
        slots.insert(*p, s2);
    }
    let mut next = host.next_id();
    let placed_frontier: BTreeSet<VertexId> = ri
        .values()
        .filter(|pt| pt.frontier.is_some() && pt.frontier != Some(pt.port.vertex))
        .filter_map(|pt| pt.frontier)
        .collect();
    let mut right_map = BTreeMap::new();
    for (v, l) in rule.right.labels() {
        if placed_frontier.contains(v) || l.is_frontier() {
            continue;
        }
        right_map.insert(*v, next);
        labels.insert(next, l.clone());
        next += 1;
    }
    let rp = |p: &Port| Port::new(right_map[&p.vertex], p.dir, p.index);
    for (p, s) in rule.right.slots() {
        if !right_map.contains_key(&p.vertex) {
            continue;
        }
        let s2 = match s {
            Slot::Linked(q) if right_map.contains_key(&q.vertex) => Slot::Linked(rp(q)),
            _ => Slot::Free(cut_letter(rp(p))),
        };
        slots.insert(rp(p), s2);
    }
    let link = |slots: &mut BTreeMap<Port, Slot>, a: Port, b: Port| {
        slots.insert(a, Slot::Linked(b));
        slots.insert(b, Slot::Linked(a));
    };
    let mut fragment_vertices = BTreeSet::new();
    let mut used: BTreeSet<String> = BTreeSet::new();
    for (name, pt) in &ri {
        let bare = pt.frontier == Some(pt.port.vertex);
        if let Some(frag) = g.and_then(|g| g.get(name)) {
            let dp = frag.port_with_letter(name).expect("validated fragment");
            let off = next;
            next += frag.next_id();
            let fr = frag.shifted(off);
            for (v, l) in fr.labels() {
                labels.insert(*v, l.clone());
                fragment_vertices.insert(*v);
            }
            for (p, s) in fr.slots() {
                let s2 = match s {
                    Slot::Free(_) => Slot::Free(cut_letter(*p)),
                    other => other.clone(),
                };
                slots.insert(*p, s2);
            }
            if !bare {
                link(&mut slots, Port::new(dp.vertex + off, dp.dir, dp.index), rp(&pt.port));
            }
            continue;
        }
        if bare {
            continue;
        }
        if let Some(Some(env)) = m.bindings.get(name) {
            link(&mut slots, *env, rp(&pt.port));
            used.insert(name.clone());
        }
    }
    for (name, b) in &m.bindings {
        if used.contains(name) || b.is_none() {
            continue;
        }
        let covered = g.is_some_and(|g| g.map.contains_key(name));
        if !covered && !cut_env {
            return Err(RewriteError::DanglingEnvironment { rule: rule.name.clone(), point: name.clone() });
        }
    }
    let root = match host.root() {
        Some(r) if !occ.contains(&r) => Some(r),
        _ => rule.right.root().and_then(|r| right_map.get(&r).copied()),
    };
    Ok(Replacement { net: assemble(labels, slots, root), right_map, fragment_vertices })
}

/// Every result of rewriting one member of `s` at one redex. Members
/// without a redex contribute nothing.
pub fn rewrite_step(r: &Rns, s: &Jungle) -> Result<Jungle, RewriteError> {
    let mut out = Jungle::new();
    for n in s {
        out.extend(&successors(r, n)?);
    }
    Ok(out)
}

/// One-step successors of a single net.
pub fn successors(r: &Rns, n: &Net) -> Result<Jungle, RewriteError> {
    let mut out = Jungle::new();
    for m in applicable_matches(r, n)? {
        let rule = r.rule(&m.rule).expect("match names a rule");
        let cut = r.conditions.cut_environment.contains(&rule.name);
        for g in r.substitution_choices(rule) {
            out.insert(replace(n, rule, &m, g, cut)?.net);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_steps: usize,
    pub max_net_size: usize,
    pub max_jungle: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_steps: 32, max_net_size: 24, max_jungle: 4096 }
    }
}

impl Budget {
    pub fn new(max_steps: usize, max_net_size: usize, max_jungle: usize) -> Self {
        Budget { max_steps, max_net_size, max_jungle }
    }

    /// Componentwise order.
    pub fn le(&self, o: &Budget) -> bool {
        self.max_steps <= o.max_steps && self.max_net_size <= o.max_net_size && self.max_jungle <= o.max_jungle
    }
}

/// A jungle plus the flag telling whether a budget bound the computation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub jungle: Jungle,
    pub exhausted: bool,
}

/// Closure with its one-step rewrite graph over canonical forms.
#[derive(Clone, Debug, Default)]
pub struct ClosureRun {
    pub jungle: Jungle,
    pub exhausted: bool,
    pub graph: BTreeMap<Vec<u8>, BTreeSet<Vec<u8>>>,
}

/// Catenation closure of `s` under `r`, layer by layer from `s`.
pub fn closure(r: &Rns, s: &Jungle, budget: Budget) -> Result<Outcome, RewriteError> {
    let run = closure_run(r, s, budget)?;
    Ok(Outcome { jungle: run.jungle, exhausted: run.exhausted })
}

pub fn closure_run(r: &Rns, s: &Jungle, budget: Budget) -> Result<ClosureRun, RewriteError> {
    let mut run = ClosureRun::default();
    let mut layer: Vec<Net> = Vec::new();
    for n in s {
        if n.len() > budget.max_net_size {
            run.exhausted = true;
            continue;
        }
        if run.jungle.len() >= budget.max_jungle {
            run.exhausted = true;
            break;
        }
        run.jungle.insert(n.clone());
        layer.push(n.clone());
    }
    let mut steps = 0;
    while !layer.is_empty() {
        if steps == budget.max_steps {
            for n in &layer {
                let next = successors(r, n)?;
                if next.iter().any(|m| !run.jungle.contains(m)) {
                    run.exhausted = true;
                    break;
                }
            }
            break;
        }
        let mut fresh = Vec::new();
        for n in &layer {
            let key = canonical_form(n);
            let next = successors(r, n)?;
            let mut targets = BTreeSet::new();
            for (k, m) in next.entries() {
                if m.len() > budget.max_net_size {
                    run.exhausted = true;
                    continue;
                }
                if run.jungle.contains_key(k) {
                    targets.insert(k.clone());
                    continue;
                }
                if run.jungle.len() >= budget.max_jungle {
                    run.exhausted = true;
                    continue;
                }
                targets.insert(k.clone());
                run.jungle.insert(m.clone());
                fresh.push(m.clone());
            }
            run.graph.insert(key, targets);
        }
        layer = fresh;
        steps += 1;
    }
    Ok(run)
}

/// Irreducible members of the closure. Also flagged exhausted when the
/// rewrite graph on the closure has a cycle, since then some derivations
/// never terminate.
pub fn normal_forms(r: &Rns, s: &Jungle, budget: Budget) -> Result<Outcome, RewriteError> {
    let run = closure_run(r, s, budget)?;
    let mut nf = Jungle::new();
    for (k, n) in run.jungle.entries() {
        let irreducible = match run.graph.get(k) {
            Some(t) => t.is_empty() && applicable_matches(r, n)?.is_empty(),
            None => successors(r, n)?.is_empty(),
        };
        if irreducible {
            nf.insert(n.clone());
        }
    }
    let exhausted = run.exhausted || has_cycle(&run.graph);
    Ok(Outcome { jungle: nf, exhausted })
}

pub(crate) fn has_cycle(g: &BTreeMap<Vec<u8>, BTreeSet<Vec<u8>>>) -> bool {
    let mut indeg: BTreeMap<&Vec<u8>, usize> = BTreeMap::new();
    for (k, ts) in g {
        indeg.entry(k).or_insert(0);
        for t in ts {
            *indeg.entry(t).or_insert(0) += 1;
        }
    }
    let mut q: VecDeque<&Vec<u8>> = indeg.iter().filter(|(_, d)| **d == 0).map(|(k, _)| *k).collect();
    let mut seen = 0;
    while let Some(k) = q.pop_front() {
        seen += 1;
        if let Some(ts) = g.get(k) {
            for t in ts {
                let d = indeg.get_mut(t).expect("counted");
                *d -= 1;
                if *d == 0 {
                    q.push_back(t);
                }
            }
        }
    }
    seen != indeg.len()
}

/// Convenience: a rule between two single-vertex nets over the same port
/// sets, with matching interface letters.
pub fn relabel_rule(name: &str, from: &crate::net::RankedSymbol, to: &crate::net::RankedSymbol) -> RulePreform {
    assert!(from.same_rank(to), "relabel rule needs equal ranks");
    let side = |s: &crate::net::RankedSymbol| {
        let mut b = crate::net::NetBuilder::new().vertex(0, s.clone());
        for &i in &s.ins {
            b = b.free(Port::inp(0, i), format!("i{i}"));
        }
        for &j in &s.outs {
            b = b.free(Port::out(0, j), format!("o{j}"));
        }
        b.build().expect("single vertex")
    };
    RulePreform::simple(name, side(from), side(to)).expect("well-formed relabel rule")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{Dir, NetBuilder, RankedSymbol};

    fn sym(n: &str) -> RankedSymbol {
        RankedSymbol::simple(n, 1, 1)
    }

    fn single(n: &str) -> Net {
        NetBuilder::new().vertex(0, sym(n)).build().unwrap()
    }

    fn rns(rules: Vec<RulePreform>) -> Rns {
        Rns::new(rules).unwrap()
    }

    #[test]
    fn no_redex_gives_nothing() {
        let r = rns(vec![relabel_rule("ab", &sym("a"), &sym("b"))]);
        assert!(rewrite_step(&r, &Jungle::singleton(single("c"))).unwrap().is_empty());
    }

    #[test]
    fn smallest_rewrite() {
        let r = rns(vec![relabel_rule("ab", &sym("a"), &sym("b"))]);
        let out = rewrite_step(&r, &Jungle::singleton(single("a"))).unwrap();
        assert_eq!(out, Jungle::singleton(single("b")));
    }

    #[test]
    fn two_matches_found() {
        let r = rns(vec![relabel_rule("ab", &sym("a"), &sym("b"))]);
        let host = NetBuilder::new().vertex(0, sym("a")).vertex(1, sym("a")).edge(0, 1, 1, 1).build().unwrap();
        assert_eq!(find_matches(&r, &host).unwrap().len(), 2);
        // rewriting either end gives two distinct chains
        assert_eq!(rewrite_step(&r, &Jungle::singleton(host)).unwrap().len(), 2);
    }

    #[test]
    fn wildcard_matches_every_vertex() {
        let left = NetBuilder::new().frontier(0, "x", Dir::Out).build().unwrap();
        let rule = RulePreform::simple("w", left.clone(), left).unwrap();
        let host = NetBuilder::new().vertex(0, sym("a")).vertex(1, sym("b")).edge(0, 1, 1, 1).build().unwrap();
        assert_eq!(find_matches(&rns(vec![rule]), &host).unwrap().len(), 2);
    }

    #[test]
    fn environment_is_reattached() {
        let r = rns(vec![relabel_rule("ab", &sym("a"), &sym("b"))]);
        let host = NetBuilder::new().vertex(0, sym("c")).vertex(1, sym("a")).edge(0, 1, 1, 1).build().unwrap();
        let want = NetBuilder::new().vertex(0, sym("c")).vertex(1, sym("b")).edge(0, 1, 1, 1).build().unwrap();
        assert_eq!(rewrite_step(&r, &Jungle::singleton(host)).unwrap(), Jungle::singleton(want));
    }

    #[test]
    fn dropped_interface_with_live_link_fails() {
        let left = NetBuilder::new().vertex(0, sym("a")).free(Port::inp(0, 1), "i").free(Port::out(0, 1), "o").build().unwrap();
        let right = NetBuilder::new().vertex(0, RankedSymbol::simple("b", 0, 1)).free(Port::out(0, 1), "o").build().unwrap();
        let rule = RulePreform::simple("drop", left, right).unwrap();
        let host = NetBuilder::new().vertex(0, sym("c")).vertex(1, sym("a")).edge(0, 1, 1, 1).build().unwrap();
        let mut r = rns(vec![rule]);
        assert!(matches!(
            rewrite_step(&r, &Jungle::singleton(host.clone())),
            Err(RewriteError::DanglingEnvironment { .. })
        ));
        r.conditions.cut_environment.insert("drop".into());
        assert_eq!(rewrite_step(&r, &Jungle::singleton(host)).unwrap().len(), 1);
    }

    #[test]
    fn two_right_substitutions_give_two_results() {
        let left = NetBuilder::new().vertex(0, sym("a")).frontier(1, "x", Dir::Out).edge(1, 1, 0, 1).build().unwrap();
        let right = NetBuilder::new().vertex(0, sym("b")).frontier(1, "x", Dir::Out).edge(1, 1, 0, 1).build().unwrap();
        let frag = |n: &str| NetBuilder::new().vertex(0, sym(n)).free(Port::out(0, 1), "x").build().unwrap();
        let g1 = NetSubstitution::new().with("x", frag("p"));
        let g2 = NetSubstitution::new().with("x", frag("q"));
        let rule = RulePreform::new("r", left, right, vec![g1, g2]).unwrap();
        let out = rewrite_step(&rns(vec![rule]), &Jungle::singleton(single("a"))).unwrap();
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn closure_and_normal_forms_of_a_chain_of_rules() {
        let r = rns(vec![relabel_rule("ab", &sym("a"), &sym("b")), relabel_rule("bc", &sym("b"), &sym("c"))]);
        let s = Jungle::singleton(single("a"));
        let c = closure(&r, &s, Budget::default()).unwrap();
        assert_eq!(c.jungle.len(), 3);
        assert!(!c.exhausted);
        let nf = normal_forms(&r, &s, Budget::default()).unwrap();
        assert_eq!(nf.jungle, Jungle::singleton(single("c")));
    }

    #[test]
    fn looping_rule_has_no_normal_form() {
        let r = rns(vec![relabel_rule("aa", &sym("a"), &sym("a"))]);
        let nf = normal_forms(&r, &Jungle::singleton(single("a")), Budget::default()).unwrap();
        assert!(nf.jungle.is_empty());
        assert!(nf.exhausted);
    }

    #[test]
    fn growing_rule_hits_size_budget() {
        let left = NetBuilder::new().vertex(0, sym("a")).free(Port::inp(0, 1), "i").free(Port::out(0, 1), "o").build().unwrap();
        let right = NetBuilder::new()
            .vertex(0, sym("a"))
            .vertex(1, sym("b"))
            .edge(1, 1, 0, 1)
            .free(Port::inp(1, 1), "i")
            .free(Port::out(0, 1), "o")
            .build()
            .unwrap();
        let r = rns(vec![RulePreform::simple("grow", left, right).unwrap()]);
        let c = closure(&r, &Jungle::singleton(single("a")), Budget::new(100, 3, 100)).unwrap();
        assert!(c.exhausted);
        assert_eq!(c.jungle.len(), 3);
    }

    #[test]
    fn application_order_is_priority() {
        let mut r = rns(vec![relabel_rule("ab", &sym("a"), &sym("b")), relabel_rule("ac", &sym("a"), &sym("c"))]);
        r.conditions.application_order = Some(vec!["ac".into(), "ab".into()]);
        let out = rewrite_step(&r, &Jungle::singleton(single("a"))).unwrap();
        assert_eq!(out, Jungle::singleton(single("c")));
    }
}
