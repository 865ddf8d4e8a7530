//! Brute-force reference implementations.
//!
//! Nothing here reuses the engine's matcher, replacement or closure code;
//! only the net data model and [`canonical_form`] are shared.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::net::{canonical_form, Dir, Edge, Jungle, Label, Net, Port, RankedSymbol, Slot, VertexId};
use crate::rewrite::{Budget, Outcome, Rns, RulePreform};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("enumeration exceeded the bound of {0}")]
    BudgetExceeded(usize),
    #[error("rule `{0}` cannot be replayed: {1}")]
    Replay(String, String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationSpec {
    pub alphabet: Vec<RankedSymbol>,
    pub max_vertices: usize,
    pub max_edges: usize,
    pub allow_loops: bool,
}

impl EnumerationSpec {
    pub fn new(alphabet: Vec<RankedSymbol>) -> Self {
        EnumerationSpec { alphabet, max_vertices: 3, max_edges: 6, allow_loops: true }
    }

    pub fn vertices(mut self, n: usize) -> Self {
        self.max_vertices = n;
        self
    }

    pub fn edges(mut self, n: usize) -> Self {
        self.max_edges = n;
        self
    }

    pub fn loops(mut self, allow: bool) -> Self {
        self.allow_loops = allow;
        self
    }
}

pub const DEFAULT_CANDIDATE_LIMIT: usize = 2_000_000;

/// Every valid net within the bounds, deduplicated.
pub fn enumerate_nets(spec: &EnumerationSpec) -> Result<Jungle, OracleError> {
    enumerate_nets_bounded(spec, DEFAULT_CANDIDATE_LIMIT)
}

pub fn enumerate_nets_bounded(spec: &EnumerationSpec, limit: usize) -> Result<Jungle, OracleError> {
    let mut out = Jungle::new();
    let mut candidates = 0usize;
    for size in 1..=spec.max_vertices {
        for multiset in multisets(spec.alphabet.len(), size) {
            let syms: Vec<&RankedSymbol> = multiset.iter().map(|&i| &spec.alphabet[i]).collect();
            let outs: Vec<Port> = syms
                .iter()
                .enumerate()
                .flat_map(|(v, s)| s.outs.iter().map(move |&j| Port::out(v as VertexId, j)))
                .collect();
            let ins: Vec<Port> = syms
                .iter()
                .enumerate()
                .flat_map(|(v, s)| s.ins.iter().map(move |&i| Port::inp(v as VertexId, i)))
                .collect();
            let mut edges = Vec::new();
            let mut used_in = vec![false; ins.len()];
            let mut emit = |edges: &Vec<Edge>| -> Result<(), OracleError> {
                candidates += 1;
                if candidates > limit {
                    return Err(OracleError::BudgetExceeded(limit));
                }
                let vs = syms.iter().enumerate().map(|(v, s)| (v as VertexId, Label::Symbol((*s).clone())));
                let linked: BTreeSet<Port> = edges.iter().flat_map(|e| [e.from_port(), e.to_port()]).collect();
                let free: Vec<(Port, String)> = outs
                    .iter()
                    .chain(ins.iter())
                    .filter(|p| !linked.contains(p))
                    .map(|p| (*p, format!("f{}", p)))
                    .collect();
                let n = Net::build(vs, edges.iter().copied(), free, None).expect("enumerated net is valid");
                out.insert(n);
                Ok(())
            };
            matchings(&outs, &ins, 0, &mut used_in, &mut edges, spec, &mut emit)?;
        }
    }
    Ok(out)
}

fn multisets(k: usize, size: usize) -> Vec<Vec<usize>> {
    fn go(k: usize, size: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..k {
            cur.push(i);
            go(k, size, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(k, size, 0, &mut Vec::new(), &mut out);
    out
}

fn matchings(
    outs: &[Port],
    ins: &[Port],
    i: usize,
    used_in: &mut Vec<bool>,
    edges: &mut Vec<Edge>,
    spec: &EnumerationSpec,
    emit: &mut dyn FnMut(&Vec<Edge>) -> Result<(), OracleError>,
) -> Result<(), OracleError> {
    if i == outs.len() {
        return emit(edges);
    }
    matchings(outs, ins, i + 1, used_in, edges, spec, emit)?;
    if edges.len() == spec.max_edges {
        return Ok(());
    }
    let o = outs[i];
    for (k, p) in ins.iter().enumerate() {
        if used_in[k] || (!spec.allow_loops && p.vertex == o.vertex) {
            continue;
        }
        used_in[k] = true;
        edges.push(Edge::new(o.vertex, o.index, p.vertex, p.index));
        matchings(outs, ins, i + 1, used_in, edges, spec, emit)?;
        edges.pop();
        used_in[k] = false;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Naive rewriting

/// Ports of a rule side that act as interface points, by name, each given
/// as the ranked port it sits on (or the frontier's own port when bare).
fn naive_interface(side: &Net) -> BTreeMap<String, (Port, bool)> {
    let mut m = BTreeMap::new();
    for (p, s) in side.slots() {
        let l = &side.labels()[&p.vertex];
        match (l, s) {
            (Label::Frontier { letter, .. }, Slot::Free(_)) => {
                m.insert(letter.clone(), (*p, true));
            }
            (Label::Frontier { letter, .. }, Slot::Linked(q)) => {
                m.insert(letter.clone(), (*q, false));
            }
            (Label::Symbol(_), Slot::Free(letter)) => {
                m.insert(letter.clone(), (*p, false));
            }
            _ => {}
        }
    }
    m
}

fn ranked(n: &Net) -> Vec<VertexId> {
    n.labels().iter().filter(|(_, l)| !l.is_frontier()).map(|(v, _)| *v).collect()
}

/// All injective maps from the ranked vertices of `left` into `host` that
/// are label-preserving and induced.
fn naive_matches(left: &Net, host: &Net) -> Vec<BTreeMap<VertexId, VertexId>> {
    let lv = ranked(left);
    let hv: Vec<VertexId> = host.vertex_ids().collect();
    let mut out = Vec::new();
    if lv.is_empty() {
        return out;
    }
    let mut cur: Vec<VertexId> = Vec::new();
    fn go(
        left: &Net,
        host: &Net,
        lv: &[VertexId],
        hv: &[VertexId],
        cur: &mut Vec<VertexId>,
        out: &mut Vec<BTreeMap<VertexId, VertexId>>,
    ) {
        if cur.len() == lv.len() {
            let m: BTreeMap<VertexId, VertexId> = lv.iter().copied().zip(cur.iter().copied()).collect();
            if consistent(left, host, &m) {
                out.push(m);
            }
            return;
        }
        for &h in hv {
            if cur.contains(&h) || left.labels()[&lv[cur.len()]] != host.labels()[&h] {
                continue;
            }
            cur.push(h);
            go(left, host, lv, hv, cur, out);
            cur.pop();
        }
    }
    go(left, host, &lv, &hv, &mut cur, &mut out);
    out
}

fn consistent(left: &Net, host: &Net, m: &BTreeMap<VertexId, VertexId>) -> bool {
    let image: BTreeSet<VertexId> = m.values().copied().collect();
    for (p, s) in left.slots() {
        let Some(&hv) = m.get(&p.vertex) else { continue };
        let hp = Port::new(hv, p.dir, p.index);
        let partner = host.partner(hp);
        match s {
            Slot::Linked(q) if m.contains_key(&q.vertex) => {
                if partner != Some(Port::new(m[&q.vertex], q.dir, q.index)) {
                    return false;
                }
            }
            _ => {
                if let Some(x) = partner {
                    if image.contains(&x.vertex) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

struct Draft {
    labels: BTreeMap<VertexId, Label>,
    edges: BTreeSet<(Port, Port)>,
    next: VertexId,
}

impl Draft {
    fn build(self) -> Net {
        let linked: BTreeSet<Port> = self.edges.iter().flat_map(|(a, b)| [*a, *b]).collect();
        let mut free = Vec::new();
        for (v, l) in &self.labels {
            for (d, i) in l.ports() {
                let p = Port::new(*v, d, i);
                if !linked.contains(&p) {
                    free.push((p, format!("d{p}")));
                }
            }
        }
        let edges = self.edges.iter().map(|(o, i)| Edge::new(o.vertex, o.index, i.vertex, i.index));
        Net::build(self.labels, edges, free, None).expect("replayed net is valid")
    }

    fn link(&mut self, a: Port, b: Port) {
        let (o, i) = if a.dir == Dir::Out { (a, b) } else { (b, a) };
        self.edges.insert((o, i));
    }

    fn paste(&mut self, n: &Net) -> BTreeMap<VertexId, VertexId> {
        let mut map = BTreeMap::new();
        for (v, l) in n.labels() {
            map.insert(*v, self.next);
            self.labels.insert(self.next, l.clone());
            self.next += 1;
        }
        for e in n.edges() {
            self.link(Port::out(map[&e.src], e.out), Port::inp(map[&e.tgt], e.inp));
        }
        map
    }
}

fn replay(
    host: &Net,
    rule: &RulePreform,
    m: &BTreeMap<VertexId, VertexId>,
    g: Option<&crate::morphism::NetSubstitution>,
    cut: bool,
) -> Result<Net, OracleError> {
    let occ: BTreeSet<VertexId> = m.values().copied().collect();
    let left_if = naive_interface(&rule.left);
    let mut bound: BTreeMap<String, Port> = BTreeMap::new();
    for (name, (p, bare)) in &left_if {
        if *bare {
            continue;
        }
        if let Some(x) = host.partner(Port::new(m[&p.vertex], p.dir, p.index)) {
            bound.insert(name.clone(), x);
        }
    }
    let mut d = Draft { labels: BTreeMap::new(), edges: BTreeSet::new(), next: 0 };
    for (v, l) in host.labels() {
        if !occ.contains(v) {
            d.labels.insert(*v, l.clone());
        }
    }
    d.next = host.labels().keys().max().map_or(0, |v| v + 1);
    for e in host.edges() {
        if !occ.contains(&e.src) && !occ.contains(&e.tgt) {
            d.link(e.from_port(), e.to_port());
        }
    }
    let rv: BTreeSet<VertexId> = ranked(&rule.right).into_iter().collect();
    let right_core = rule.right.induced(&rv);
    let rmap = d.paste(&right_core);
    let mut served = BTreeSet::new();
    for (name, (p, bare)) in naive_interface(&rule.right) {
        if let Some(frag) = g.and_then(|g| g.map.get(&name)) {
            let fmap = d.paste(frag);
            if !bare {
                let dp = frag.port_with_letter(&name).ok_or_else(|| OracleError::Replay(rule.name.clone(), name.clone()))?;
                d.link(Port::new(fmap[&dp.vertex], dp.dir, dp.index), Port::new(rmap[&p.vertex], p.dir, p.index));
            }
            continue;
        }
        if bare {
            continue;
        }
        if let Some(x) = bound.get(&name) {
            d.link(*x, Port::new(rmap[&p.vertex], p.dir, p.index));
            served.insert(name);
        }
    }
    for name in bound.keys() {
        let covered = g.is_some_and(|g| g.map.contains_key(name));
        if !served.contains(name) && !covered && !cut {
            return Err(OracleError::Replay(rule.name.clone(), format!("environment of `{name}` left dangling")));
        }
    }
    Ok(d.build())
}

fn naive_successors(r: &Rns, n: &Net) -> Result<Jungle, OracleError> {
    let mut names: Vec<String> = match &r.conditions.application_order {
        Some(o) => o.clone(),
        None => Vec::new(),
    };
    for rule in &r.rules {
        if !names.contains(&rule.name) {
            names.push(rule.name.clone());
        }
    }
    let mut out = Jungle::new();
    for name in names {
        let Some(rule) = r.rules.iter().find(|x| x.name == name) else { continue };
        let mut fired = false;
        for m in naive_matches(&rule.left, n) {
            let rec = crate::rewrite::MatchRecord {
                rule: rule.name.clone(),
                position: crate::net::Position::of(m.values().copied()),
                vertex_map: m.clone(),
                bindings: BTreeMap::new(),
            };
            let rec = full_record(n, rule, rec);
            if !r.conditions.custom_predicates.iter().all(|(_, p)| p(n, &rec)) {
                continue;
            }
            fired = true;
            let cut = r.conditions.cut_environment.contains(&rule.name);
            if rule.right_subs.is_empty() {
                out.insert(replay(n, rule, &m, None, cut)?);
            } else {
                for (i, g) in rule.right_subs.iter().enumerate() {
                    if r.conditions.binding.get(&rule.name).is_none_or(|a| a.contains(&i)) {
                        out.insert(replay(n, rule, &m, Some(g), cut)?);
                    }
                }
            }
        }
        if fired && r.conditions.application_order.is_some() {
            break;
        }
    }
    Ok(out)
}

fn full_record(host: &Net, rule: &RulePreform, mut rec: crate::rewrite::MatchRecord) -> crate::rewrite::MatchRecord {
    let all: BTreeSet<VertexId> = host.vertex_ids().collect();
    if rec.vertex_map.values().copied().collect::<BTreeSet<_>>() == all {
        rec.position = crate::net::Position::whole();
    }
    for (name, (p, bare)) in naive_interface(&rule.left) {
        if !bare {
            rec.bindings.insert(name, host.partner(Port::new(rec.vertex_map[&p.vertex], p.dir, p.index)));
        }
    }
    rec
}

/// Closure by plain breadth-first replay, with the engine's budget
/// semantics.
pub fn naive_rewrite_closure(r: &Rns, s: &Jungle, budget: Budget) -> Result<Outcome, OracleError> {
    Ok(naive_run(r, s, budget)?.0)
}

/// Members of the naive closure with no successor; exhausted also when the
/// successor relation on the closure has a cycle.
pub fn naive_normal_forms(r: &Rns, s: &Jungle, budget: Budget) -> Result<Outcome, OracleError> {
    let (c, edges) = naive_run(r, s, budget)?;
    let mut nf = Jungle::new();
    for n in &c.jungle {
        if naive_successors(r, n)?.is_empty() {
            nf.insert(n.clone());
        }
    }
    let cyclic = naive_cycle(&edges);
    Ok(Outcome { jungle: nf, exhausted: c.exhausted || cyclic })
}

type EdgeSet = BTreeSet<(Vec<u8>, Vec<u8>)>;

fn naive_run(r: &Rns, s: &Jungle, budget: Budget) -> Result<(Outcome, EdgeSet), OracleError> {
    let mut seen = Jungle::new();
    let mut exhausted = false;
    let mut edges = EdgeSet::new();
    let mut layer = Vec::new();
    for n in s {
        if n.len() > budget.max_net_size {
            exhausted = true;
        } else if seen.len() >= budget.max_jungle {
            exhausted = true;
            break;
        } else {
            seen.insert(n.clone());
            layer.push(n.clone());
        }
    }
    for step in 0..=budget.max_steps {
        if layer.is_empty() {
            break;
        }
        let mut next_layer = Vec::new();
        for n in &layer {
            let from = canonical_form(n);
            for m in &naive_successors(r, n)? {
                if step == budget.max_steps {
                    if !seen.contains(m) {
                        exhausted = true;
                    }
                    continue;
                }
                if m.len() > budget.max_net_size {
                    exhausted = true;
                    continue;
                }
                if seen.contains(m) {
                    edges.insert((from.clone(), canonical_form(m)));
                    continue;
                }
                if seen.len() >= budget.max_jungle {
                    exhausted = true;
                    continue;
                }
                edges.insert((from.clone(), canonical_form(m)));
                seen.insert(m.clone());
                next_layer.push(m.clone());
            }
        }
        layer = next_layer;
    }
    Ok((Outcome { jungle: seen, exhausted }, edges))
}

fn naive_cycle(edges: &EdgeSet) -> bool {
    let nodes: BTreeSet<&Vec<u8>> = edges.iter().flat_map(|(a, b)| [a, b]).collect();
    // repeatedly strip nodes without outgoing edges; anything left lies on or
    // leads into a cycle
    let mut alive: BTreeSet<&Vec<u8>> = nodes;
    loop {
        let sinks: Vec<&Vec<u8>> = alive
            .iter()
            .copied()
            .filter(|n| !edges.iter().any(|(a, b)| a == *n && alive.contains(b)))
            .collect();
        if sinks.is_empty() {
            return !alive.is_empty();
        }
        for s in sinks {
            alive.remove(s);
        }
    }
}

/// Outcome of comparing an engine result with its oracle counterpart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail { only_engine: Vec<Vec<u8>>, only_oracle: Vec<Vec<u8>>, flag: Option<(bool, bool)> },
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => write!(f, "PASS"),
            Verdict::Fail { only_engine, only_oracle, flag } => {
                write!(f, "FAIL")?;
                for k in only_engine {
                    write!(f, " engine-only={}", hex(k))?;
                }
                for k in only_oracle {
                    write!(f, " oracle-only={}", hex(k))?;
                }
                if let Some((e, o)) = flag {
                    write!(f, " exhausted engine={e} oracle={o}")?;
                }
                Ok(())
            }
        }
    }
}

fn hex(b: &[u8]) -> String {
    b.iter().map(|x| format!("{x:02x}")).collect()
}

pub fn oracle_compare(engine: &Outcome, oracle: &Outcome) -> Verdict {
    let only_engine: Vec<Vec<u8>> = engine.jungle.keys().filter(|k| !oracle.jungle.contains_key(k)).cloned().collect();
    let only_oracle: Vec<Vec<u8>> = oracle.jungle.keys().filter(|k| !engine.jungle.contains_key(k)).cloned().collect();
    let flag = (engine.exhausted != oracle.exhausted).then_some((engine.exhausted, oracle.exhausted));
    if only_engine.is_empty() && only_oracle.is_empty() && flag.is_none() {
        Verdict::Pass
    } else {
        Verdict::Fail { only_engine, only_oracle, flag }
    }
}

/// Boundary counts of a vertex set, recomputed from the edge list.
pub fn naive_link_counts(host: &Net, vs: &BTreeSet<VertexId>) -> (usize, usize, usize) {
    let mut ilc = 0;
    let mut olc = 0;
    for e in host.edges() {
        match (vs.contains(&e.src), vs.contains(&e.tgt)) {
            (false, true) => ilc += 1,
            (true, false) => olc += 1,
            _ => {}
        }
    }
    let free = host.dangling().iter().filter(|(p, _)| vs.contains(&p.vertex)).count();
    (ilc, olc, free)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::{closure, normal_forms, relabel_rule};

    fn sym(n: &str) -> RankedSymbol {
        RankedSymbol::simple(n, 1, 1)
    }

    #[test]
    fn unary_symbol_one_vertex() {
        let j = enumerate_nets(&EnumerationSpec::new(vec![sym("a")]).vertices(1)).unwrap();
        assert_eq!(j.len(), 2);
    }

    #[test]
    fn zero_vertices() {
        assert!(enumerate_nets(&EnumerationSpec::new(vec![sym("a")]).vertices(0)).unwrap().is_empty());
    }

    #[test]
    fn deterministic() {
        let s = EnumerationSpec::new(vec![sym("a"), sym("b")]).vertices(2);
        assert_eq!(enumerate_nets(&s).unwrap(), enumerate_nets(&s).unwrap());
    }

    #[test]
    fn oracle_agrees_on_small_chain() {
        let r = Rns::new(vec![relabel_rule("ab", &sym("a"), &sym("b"))]).unwrap();
        let nets = enumerate_nets(&EnumerationSpec::new(vec![sym("a"), sym("b")]).vertices(2)).unwrap();
        for n in &nets {
            let s = Jungle::singleton(n.clone());
            let e = closure(&r, &s, Budget::default()).unwrap();
            let o = naive_rewrite_closure(&r, &s, Budget::default()).unwrap();
            assert!(oracle_compare(&e, &o).is_pass());
            let e = normal_forms(&r, &s, Budget::default()).unwrap();
            let o = naive_normal_forms(&r, &s, Budget::default()).unwrap();
            assert!(oracle_compare(&e, &o).is_pass());
        }
    }

    #[test]
    fn compare_reports_differences() {
        let a = Outcome { jungle: Jungle::new(), exhausted: false };
        let b = Outcome {
            jungle: Jungle::singleton(crate::net::NetBuilder::new().vertex(0, sym("a")).build().unwrap()),
            exhausted: true,
        };
        match oracle_compare(&a, &b) {
            Verdict::Fail { only_oracle, flag, .. } => {
                assert_eq!(only_oracle.len(), 1);
                assert_eq!(flag, Some((false, true)));
            }
            Verdict::Pass => panic!("expected a difference"),
        }
    }
}
