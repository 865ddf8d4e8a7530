//! Transducers: carrier nets whose operation vertices apply attached
//! renetting systems to the jungles flowing along their links.
//!
//! Every free in-port of the carrier receives the input jungle. An
//! operation vertex with symbol ω sends to its out-port j the union over its
//! in-ports i of the operators attached at (ω, i, j) applied to the jungle
//! arriving at i. The output is the union over the free out-ports. Carriers
//! with cycles are evaluated to a fixpoint within `max_rounds`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::morphism::NetSubstitution;
use crate::net::{canonical_form, is_isomorphic, isomorphism, Dir, Edge, Jungle, Label, Net, NetError, Port, RankedSymbol, Slot};
use crate::rewrite::{normal_forms, successors, Budget, Outcome, RewriteError, Rns, RulePreform};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransducerError {
    #[error("evaluation exceeded the budget of {0} rounds")]
    BudgetExceeded(usize),
    #[error("operation vertex `{0}` has no attached operator")]
    UnattachedVertex(String),
    #[error("interface mismatch: {0}")]
    InterfaceMismatch(String),
    #[error("no macro for `{0}` under the intervening system")]
    MissingMacro(String),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Net(#[from] NetError),
}

/// What an operation vertex does to a jungle.
#[derive(Clone, Debug, PartialEq)]
pub enum Operator {
    Identity,
    /// One rewrite step per member; irreducible members pass through.
    Step(Rns),
    /// Normal forms under the budget.
    NormalForm(Rns),
    /// Left-to-right composition.
    Sequence(Vec<Operator>),
}

impl Operator {
    pub fn apply(&self, s: &Jungle, budget: Budget) -> Result<Outcome, TransducerError> {
        match self {
            Operator::Identity => Ok(Outcome { jungle: s.clone(), exhausted: false }),
            Operator::Step(r) => {
                let mut out = Jungle::new();
                for n in s {
                    let succ = successors(r, n)?;
                    if succ.is_empty() {
                        out.insert(n.clone());
                    } else {
                        out.extend(&succ);
                    }
                }
                Ok(Outcome { jungle: out, exhausted: false })
            }
            Operator::NormalForm(r) => Ok(normal_forms(r, s, budget)?),
            Operator::Sequence(ops) => {
                let mut cur = Outcome { jungle: s.clone(), exhausted: false };
                for op in ops {
                    let next = op.apply(&cur.jungle, budget)?;
                    cur = Outcome { jungle: next.jungle, exhausted: cur.exhausted || next.exhausted };
                }
                Ok(cur)
            }
        }
    }

    /// The same operator with every `Step` turned into `NormalForm`.
    pub fn normalized(&self) -> Operator {
        match self {
            Operator::Step(r) => Operator::NormalForm(r.clone()),
            Operator::Sequence(ops) => Operator::Sequence(ops.iter().map(|o| o.normalized()).collect()),
            other => other.clone(),
        }
    }

    /// Byte string identifying the operator up to vertex ids and letters.
    pub fn fingerprint(&self) -> Vec<u8> {
        match self {
            Operator::Identity => b"I".to_vec(),
            Operator::Step(r) => [b"S".to_vec(), rns_fingerprint(r)].concat(),
            Operator::NormalForm(r) => [b"N".to_vec(), rns_fingerprint(r)].concat(),
            Operator::Sequence(ops) => {
                let mut out = b"Q".to_vec();
                for o in ops {
                    let f = o.fingerprint();
                    out.extend_from_slice(&(f.len() as u32).to_be_bytes());
                    out.extend(f);
                }
                out
            }
        }
    }
}

/// Rule sides by canonical form, order-independent.
pub fn rns_fingerprint(r: &Rns) -> Vec<u8> {
    let mut rules: Vec<Vec<u8>> = r
        .rules
        .iter()
        .map(|rule| {
            let mut v = canonical_form(&rule.left);
            v.push(0xff);
            v.extend(canonical_form(&rule.right));
            for g in &rule.right_subs {
                for (x, frag) in &g.map {
                    v.push(0xfe);
                    v.extend(x.as_bytes());
                    v.extend(canonical_form(frag));
                }
            }
            v
        })
        .collect();
    rules.sort();
    let mut out = Vec::new();
    for r in rules {
        out.extend_from_slice(&(r.len() as u32).to_be_bytes());
        out.extend(r);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct AttachKey {
    pub symbol: String,
    pub input: u32,
    pub output: u32,
}

impl AttachKey {
    pub fn new(symbol: impl Into<String>, input: u32, output: u32) -> Self {
        AttachKey { symbol: symbol.into(), input, output }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Transducer {
    pub carrier: Net,
    pub attach: BTreeMap<AttachKey, Vec<Operator>>,
    pub budget: Budget,
    pub max_rounds: usize,
}

pub const DEFAULT_ROUNDS: usize = 64;

impl Transducer {
    pub fn new(carrier: Net, attach: BTreeMap<AttachKey, Vec<Operator>>) -> Self {
        Transducer { carrier, attach, budget: Budget::default(), max_rounds: DEFAULT_ROUNDS }
    }

    /// One unary operation vertex named `name`.
    pub fn single(name: &str, ops: Vec<Operator>) -> Self {
        let carrier = Net::build(
            BTreeMap::from([(0, Label::Symbol(RankedSymbol::simple(name, 1, 1)))]),
            Vec::new(),
            vec![(Port::inp(0, 1), "in".into()), (Port::out(0, 1), "out".into())],
            None,
        )
        .expect("single vertex carrier");
        Transducer::new(carrier, BTreeMap::from([(AttachKey::new(name, 1, 1), ops)]))
    }

    pub fn identity() -> Self {
        Transducer::single("id", vec![Operator::Identity])
    }

    /// Unary vertices in sequence, the first receiving the input.
    pub fn chain(stages: Vec<(&str, Vec<Operator>)>) -> Result<Self, TransducerError> {
        let mut it = stages.into_iter();
        let (n, ops) = it.next().ok_or_else(|| TransducerError::InterfaceMismatch("empty chain".into()))?;
        let mut td = Transducer::single(n, ops);
        for (n, ops) in it {
            td = td_compose(&td, &Transducer::single(n, ops))?;
        }
        Ok(td)
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }

    /// Attached systems, in key order.
    pub fn nest(&self) -> Vec<(&AttachKey, &Rns)> {
        fn walk<'a>(k: &'a AttachKey, op: &'a Operator, out: &mut Vec<(&'a AttachKey, &'a Rns)>) {
            match op {
                Operator::Step(r) | Operator::NormalForm(r) => out.push((k, r)),
                Operator::Sequence(ops) => ops.iter().for_each(|o| walk(k, o, out)),
                Operator::Identity => {}
            }
        }
        let mut out = Vec::new();
        for (k, ops) in &self.attach {
            for op in ops {
                walk(k, op, &mut out);
            }
        }
        out
    }

    /// True when no two attachment keys carry the same operators.
    pub fn attach_is_injective(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.attach.values().all(|ops| {
            let mut f: Vec<Vec<u8>> = ops.iter().map(|o| o.fingerprint()).collect();
            f.sort();
            seen.insert(f)
        })
    }

    /// Byte string identifying the transducer up to carrier ids.
    pub fn fingerprint(&self) -> Vec<u8> {
        let mut out = canonical_form(&self.carrier);
        for (k, ops) in &self.attach {
            out.extend(format!("|{}:{}:{}", k.symbol, k.input, k.output).into_bytes());
            let mut f: Vec<Vec<u8>> = ops.iter().map(|o| o.fingerprint()).collect();
            f.sort();
            for x in f {
                out.extend_from_slice(&(x.len() as u32).to_be_bytes());
                out.extend(x);
            }
        }
        out
    }

    fn free_ports(&self, dir: Dir) -> Vec<Port> {
        self.carrier.dangling().into_iter().map(|(p, _)| p).filter(|p| p.dir == dir).collect()
    }
}

impl fmt::Display for Transducer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "td {} with {} attachments", self.carrier, self.attach.len())
    }
}

/// Runs `td` on `s` with the transducer's own budget.
pub fn run_td(td: &Transducer, s: &Jungle) -> Result<Outcome, TransducerError> {
    run_td_with(td, s, td.budget)
}

pub fn run_td_with(td: &Transducer, s: &Jungle, budget: Budget) -> Result<Outcome, TransducerError> {
    let c = &td.carrier;
    for v in c.ranked_vertices() {
        let name = c.label(v).expect("vertex").name().to_string();
        if !td.attach.keys().any(|k| k.symbol == name) {
            return Err(TransducerError::UnattachedVertex(name));
        }
    }
    let mut at_in: BTreeMap<Port, Jungle> = BTreeMap::new();
    for p in td.free_ports(Dir::In) {
        at_in.insert(p, s.clone());
    }
    let mut output = Jungle::new();
    let mut exhausted = false;
    let mut cache: BTreeMap<(AttachKey, Vec<Vec<u8>>), Outcome> = BTreeMap::new();
    let mut rounds = 0;
    loop {
        if rounds == td.max_rounds {
            return Ok(Outcome { jungle: output, exhausted: true });
        }
        rounds += 1;
        let mut changed = false;
        for v in c.ranked_vertices() {
            let label = c.label(v).expect("vertex");
            let ins: Vec<Port> = c.ports_of(v).into_iter().filter(|p| p.dir == Dir::In).collect();
            for out in c.ports_of(v).into_iter().filter(|p| p.dir == Dir::Out) {
                let mut produced = Jungle::new();
                for i in &ins {
                    let Some(input) = at_in.get(i) else { continue };
                    let key = AttachKey::new(label.name(), i.index, out.index);
                    let Some(ops) = td.attach.get(&key) else { continue };
                    let ck = (key.clone(), input.keys().cloned().collect());
                    if !cache.contains_key(&ck) {
                        let mut acc = Outcome { jungle: Jungle::new(), exhausted: false };
                        for op in ops {
                            let o = op.apply(input, budget)?;
                            acc.jungle.extend(&o.jungle);
                            acc.exhausted |= o.exhausted;
                        }
                        cache.insert(ck.clone(), acc);
                    }
                    let o = &cache[&ck];
                    exhausted |= o.exhausted;
                    produced.extend(&o.jungle);
                }
                match c.slot(out) {
                    Some(Slot::Linked(q)) => {
                        let slot = at_in.entry(*q).or_default();
                        if !produced.is_subset(slot) {
                            slot.extend(&produced);
                            changed = true;
                        }
                    }
                    _ => {
                        if !produced.is_subset(&output) {
                            output.extend(&produced);
                            changed = true;
                        }
                    }
                }
            }
        }
        if !changed {
            return Ok(Outcome { jungle: output, exhausted });
        }
    }
}

/// Every attached system replaced by its normal-form operator.
pub fn td_normal_form(td: &Transducer) -> Transducer {
    let attach = td.attach.iter().map(|(k, ops)| (k.clone(), ops.iter().map(|o| o.normalized()).collect())).collect();
    Transducer { attach, ..td.clone() }
}

fn prime_clashes(t: &Transducer, taken: &BTreeSet<String>) -> Transducer {
    let mut map = BTreeMap::new();
    let mut used = taken.clone();
    for s in t.carrier.symbols() {
        if used.contains(&s) {
            let mut n = format!("{s}'");
            while used.contains(&n) || t.carrier.symbols().contains(&n) {
                n.push('\'');
            }
            used.insert(n.clone());
            map.insert(s, n);
        }
    }
    if map.is_empty() {
        return t.clone();
    }
    let carrier = t.carrier.rename_symbols(&map);
    let attach = t
        .attach
        .iter()
        .map(|(k, ops)| {
            let sym = map.get(&k.symbol).cloned().unwrap_or_else(|| k.symbol.clone());
            (AttachKey { symbol: sym, ..k.clone() }, ops.clone())
        })
        .collect();
    Transducer { carrier, attach, ..t.clone() }
}

/// Feeds the single output of `s` into the single input of `t`. Carrier
/// symbols of `t` that clash with `s` are primed.
pub fn td_compose(s: &Transducer, t: &Transducer) -> Result<Transducer, TransducerError> {
    let outs = s.free_ports(Dir::Out);
    let ins = t.free_ports(Dir::In);
    if outs.len() != 1 || ins.len() != 1 {
        return Err(TransducerError::InterfaceMismatch(format!(
            "{} free out-ports meet {} free in-ports",
            outs.len(),
            ins.len()
        )));
    }
    let t = prime_clashes(t, &s.carrier.symbols());
    let off = s.carrier.next_id();
    let shifted = t.carrier.shifted(off);
    let mut labels = s.carrier.labels().clone();
    labels.extend(shifted.labels().iter().map(|(v, l)| (*v, l.clone())));
    let mut edges: Vec<Edge> = s.carrier.edges();
    edges.extend(shifted.edges());
    let o = outs[0];
    let i = Port::new(ins[0].vertex + off, Dir::In, ins[0].index);
    edges.push(Edge::new(o.vertex, o.index, i.vertex, i.index));
    let mut dangling: Vec<(Port, String)> = s.carrier.dangling().into_iter().filter(|(p, _)| *p != o).collect();
    dangling.extend(shifted.dangling().into_iter().filter(|(p, _)| *p != i));
    let carrier = Net::build(labels, edges, dangling, s.carrier.root())?;
    let mut attach = s.attach.clone();
    attach.extend(t.attach.clone());
    Ok(Transducer { carrier, attach, budget: s.budget, max_rounds: s.max_rounds + t.max_rounds })
}

/// Symbol renaming carried by an intervening system whose rules each turn
/// one fully free vertex into another of the same ports and letters.
pub fn renaming_of(w: &Rns) -> Option<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for rule in &w.rules {
        let (l, r) = (&rule.left, &rule.right);
        if l.len() != 1 || r.len() != 1 || !l.edges().is_empty() || !r.edges().is_empty() || !rule.right_subs.is_empty() {
            return None;
        }
        let (Some(Label::Symbol(a)), Some(Label::Symbol(b))) = (l.labels().values().next(), r.labels().values().next())
        else {
            return None;
        };
        if !a.same_rank(b) || l.dangling().into_iter().map(|(p, x)| (p.dir, p.index, x)).collect::<Vec<_>>()
            != r.dangling().into_iter().map(|(p, x)| (p.dir, p.index, x)).collect::<Vec<_>>()
        {
            return None;
        }
        if map.insert(a.name.clone(), b.name.clone()).is_some() {
            return None;
        }
    }
    let targets: BTreeSet<&String> = map.values().collect();
    if targets.len() != map.len() || targets.iter().any(|t| map.contains_key(*t)) {
        return None;
    }
    Some(map)
}

/// `r` with symbols renamed through `map` in every rule side and fragment.
pub fn rename_rns(r: &Rns, map: &BTreeMap<String, String>) -> Rns {
    let rules = r
        .rules
        .iter()
        .map(|rule| RulePreform {
            left: rule.left.rename_symbols(map),
            right: rule.right.rename_symbols(map),
            right_subs: rule
                .right_subs
                .iter()
                .map(|g| NetSubstitution { map: g.map.iter().map(|(x, f)| (x.clone(), f.rename_symbols(map))).collect() })
                .collect(),
            ..rule.clone()
        })
        .collect();
    Rns { rules, conditions: r.conditions.clone() }
}

/// Macro of `r` under the renaming system `w`, with the reversing system.
pub fn conjugate(r: &Rns, w: &Rns) -> Result<(Rns, Rns), TransducerError> {
    let map = renaming_of(w).ok_or_else(|| TransducerError::MissingMacro("intervening system is not a renaming".into()))?;
    if map.values().any(|t| r.symbols().contains(t)) {
        return Err(TransducerError::MissingMacro("renamed letters are not fresh for the system".into()));
    }
    let macro_r = rename_rns(r, &map);
    let rules = w
        .rules
        .iter()
        .map(|rule| RulePreform { name: format!("undo-{}", rule.name), left: rule.right.clone(), right: rule.left.clone(), ..rule.clone() })
        .collect();
    Ok((macro_r, Rns::new(rules)?))
}

/// The composite W^ · R_M^ · W_o^ standing in for `r` under `w`.
pub fn universal_macro(r: &Rns, w: &Rns) -> Result<Operator, TransducerError> {
    let (m, wo) = conjugate(r, w)?;
    Ok(Operator::Sequence(vec![Operator::NormalForm(w.clone()), Operator::NormalForm(m), Operator::NormalForm(wo)]))
}

/// Each attached system replaced by its universal macro under `w`; with no
/// intervening system the transducer is returned unchanged.
pub fn uma_build(td: &Transducer, w: Option<&Rns>) -> Result<Transducer, TransducerError> {
    let Some(w) = w else { return Ok(td.clone()) };
    fn lift(op: &Operator, w: &Rns) -> Result<Operator, TransducerError> {
        Ok(match op {
            Operator::Identity => Operator::Identity,
            Operator::Step(r) | Operator::NormalForm(r) => universal_macro(r, w)?,
            Operator::Sequence(ops) => Operator::Sequence(ops.iter().map(|o| lift(o, w)).collect::<Result<_, _>>()?),
        })
    }
    let mut attach = BTreeMap::new();
    for (k, ops) in &td.attach {
        attach.insert(k.clone(), ops.iter().map(|o| lift(o, w)).collect::<Result<Vec<_>, _>>()?);
    }
    Ok(Transducer { attach, ..td.clone() })
}

/// Per sample net: (W^ · R_M^ · W_o^, R^), both as normal-form jungles.
pub fn commutative_pairs(r: &Rns, w: &Rns, sample: &Jungle, budget: Budget) -> Result<Vec<(Net, Outcome, Outcome)>, TransducerError> {
    let composite = universal_macro(r, w)?;
    let direct = Operator::NormalForm(r.clone());
    let mut out = Vec::new();
    for n in sample {
        let one = Jungle::singleton(n.clone());
        out.push((n.clone(), composite.apply(&one, budget)?, direct.apply(&one, budget)?));
    }
    Ok(out)
}

/// A rank-preserving symbol bijection carrying `a`'s rules onto `b`'s.
pub fn rns_parallel(a: &Rns, b: &Rns) -> Option<BTreeMap<String, String>> {
    if a.rules.len() != b.rules.len() {
        return None;
    }
    let ranks = |r: &Rns| -> BTreeMap<String, RankedSymbol> {
        let mut m = BTreeMap::new();
        for rule in &r.rules {
            for n in [&rule.left, &rule.right].into_iter().chain(rule.right_subs.iter().flat_map(|g| g.map.values())) {
                for l in n.labels().values() {
                    if let Label::Symbol(s) = l {
                        m.insert(s.name.clone(), s.clone());
                    }
                }
            }
        }
        m
    };
    let (ra, rb) = (ranks(a), ranks(b));
    if ra.len() != rb.len() {
        return None;
    }
    let want = rns_fingerprint(b);
    let names: Vec<&String> = ra.keys().collect();
    let mut used = BTreeSet::new();
    let mut map = BTreeMap::new();
    fn go(
        i: usize,
        names: &[&String],
        ra: &BTreeMap<String, RankedSymbol>,
        rb: &BTreeMap<String, RankedSymbol>,
        used: &mut BTreeSet<String>,
        map: &mut BTreeMap<String, String>,
        a: &Rns,
        want: &[u8],
    ) -> bool {
        if i == names.len() {
            return rns_fingerprint(&rename_rns(a, map)) == want;
        }
        let s = &ra[names[i]];
        for (n, t) in rb {
            if used.contains(n) || !s.same_rank(t) {
                continue;
            }
            used.insert(n.clone());
            map.insert(names[i].clone(), n.clone());
            if go(i + 1, names, ra, rb, used, map, a, want) {
                return true;
            }
            map.remove(names[i]);
            used.remove(n);
        }
        false
    }
    go(0, &names, &ra, &rb, &mut used, &mut map, a, &want).then_some(map)
}

/// The system an operator stands for, looking through universal macros.
fn core(op: &Operator) -> Option<(bool, Rns)> {
    match op {
        Operator::Identity => Some((true, Rns::empty())),
        Operator::Step(r) => Some((false, r.clone())),
        Operator::NormalForm(r) => Some((true, r.clone())),
        Operator::Sequence(ops) => match ops.as_slice() {
            [Operator::NormalForm(w), Operator::NormalForm(m), Operator::NormalForm(wo)] => {
                let fwd = renaming_of(w)?;
                let back = renaming_of(wo)?;
                if fwd.iter().any(|(a, b)| back.get(b) != Some(a)) {
                    return None;
                }
                Some((true, rename_rns(m, &back)))
            }
            [one] => core(one),
            _ => None,
        },
    }
}

/// Whether `q` arises from `p` by swapping attached systems for parallel
/// ones and taking universal macros. The carriers must be isomorphic.
pub fn parallel_td_check(p: &Transducer, q: &Transducer) -> bool {
    if !is_isomorphic(&p.carrier, &q.carrier) {
        return false;
    }
    let Some(iso) = isomorphism(&p.carrier, &q.carrier) else { return false };
    let mut sym: BTreeMap<String, String> = BTreeMap::new();
    for (a, b) in &iso {
        let (la, lb) = (p.carrier.label(*a).expect("vertex"), q.carrier.label(*b).expect("vertex"));
        sym.insert(la.name().to_string(), lb.name().to_string());
    }
    if p.attach.len() != q.attach.len() {
        return false;
    }
    for (k, ops) in &p.attach {
        let Some(target) = sym.get(&k.symbol) else { return false };
        let Some(qops) = q.attach.get(&AttachKey::new(target.clone(), k.input, k.output)) else { return false };
        if ops.len() != qops.len() {
            return false;
        }
        let mut left: Vec<Option<(bool, Rns)>> = qops.iter().map(core).collect();
        for op in ops {
            let Some((nf, r)) = core(op) else { return false };
            let hit = left.iter().position(|c| match c {
                Some((nf2, r2)) => *nf2 == nf && rns_parallel(&r, r2).is_some(),
                None => false,
            });
            match hit {
                Some(i) => {
                    left.remove(i);
                }
                None => return false,
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::relabel_rule;

    fn sym(n: &str) -> RankedSymbol {
        RankedSymbol::simple(n, 1, 1)
    }

    fn one(n: &str) -> Net {
        Net::build(BTreeMap::from([(0, Label::Symbol(sym(n)))]), Vec::new(), vec![(Port::inp(0, 1), "x".into()), (Port::out(0, 1), "y".into())], None).unwrap()
    }

    fn rel(a: &str, b: &str) -> Rns {
        Rns::new(vec![relabel_rule(&format!("{a}{b}"), &sym(a), &sym(b))]).unwrap()
    }

    #[test]
    fn identity_passes_through() {
        let s = Jungle::singleton(one("a"));
        assert_eq!(run_td(&Transducer::identity(), &s).unwrap().jungle, s);
        let empty = Transducer::single("e", vec![Operator::Step(Rns::empty())]);
        assert_eq!(run_td(&empty, &s).unwrap().jungle, s);
    }

    #[test]
    fn chain_of_steps() {
        let td = Transducer::chain(vec![("p", vec![Operator::Step(rel("a", "b"))]), ("q", vec![Operator::Step(rel("b", "c"))])]).unwrap();
        assert_eq!(run_td(&td, &Jungle::singleton(one("a"))).unwrap().jungle, Jungle::singleton(one("c")));
    }

    #[test]
    fn two_systems_on_one_vertex() {
        let td = Transducer::single("p", vec![Operator::Step(rel("a", "b")), Operator::Step(rel("a", "c"))]);
        let out = run_td(&td, &Jungle::singleton(one("a"))).unwrap().jungle;
        assert_eq!(out, [one("b"), one("c")].into_iter().collect());
    }

    #[test]
    fn normal_form_td() {
        let both = Rns::new(vec![relabel_rule("ab", &sym("a"), &sym("b")), relabel_rule("bc", &sym("b"), &sym("c"))]).unwrap();
        let td = Transducer::single("p", vec![Operator::Step(both)]);
        let s = Jungle::singleton(one("a"));
        assert_eq!(run_td(&td, &s).unwrap().jungle, Jungle::singleton(one("b")));
        assert_eq!(run_td(&td_normal_form(&td), &s).unwrap().jungle, Jungle::singleton(one("c")));
        let looping = Transducer::single("p", vec![Operator::Step(rel("a", "a"))]);
        assert!(run_td(&td_normal_form(&looping), &s).unwrap().exhausted);
    }

    #[test]
    fn composition_and_mismatch() {
        let ab = Transducer::single("p", vec![Operator::Step(rel("a", "b"))]);
        let bc = Transducer::single("p", vec![Operator::Step(rel("b", "c"))]);
        let s = Jungle::singleton(one("a"));
        let comp = td_compose(&ab, &bc).unwrap();
        assert_eq!(run_td(&comp, &s).unwrap().jungle, run_td(&bc, &run_td(&ab, &s).unwrap().jungle).unwrap().jungle);
        let with_id = td_compose(&ab, &Transducer::identity()).unwrap();
        assert_eq!(run_td(&with_id, &s).unwrap().jungle, run_td(&ab, &s).unwrap().jungle);
        let closed = Transducer::new(Net::empty(), BTreeMap::new());
        assert!(matches!(td_compose(&ab, &closed), Err(TransducerError::InterfaceMismatch(_))));
    }

    #[test]
    fn unattached_vertex() {
        let td = Transducer { attach: BTreeMap::new(), ..Transducer::identity() };
        assert!(matches!(run_td(&td, &Jungle::new()), Err(TransducerError::UnattachedVertex(_))));
    }

    #[test]
    fn universal_macro_commutes() {
        let r = Rns::new(vec![relabel_rule("ab", &sym("a"), &sym("b")), relabel_rule("bc", &sym("b"), &sym("c"))]).unwrap();
        let w = Rns::new(vec![relabel_rule("wa", &sym("a"), &sym("A")), relabel_rule("wb", &sym("b"), &sym("B"))]).unwrap();
        let sample: Jungle = [one("a"), one("b"), one("c")].into_iter().collect();
        for (_, x, y) in commutative_pairs(&r, &w, &sample, Budget::default()).unwrap() {
            assert_eq!(x.jungle, y.jungle);
        }
        let td = Transducer::single("p", vec![Operator::NormalForm(r.clone())]);
        let u = uma_build(&td, Some(&w)).unwrap();
        assert!(parallel_td_check(&td, &u));
        assert_eq!(uma_build(&td, None).unwrap(), td);
        let bad = Rns::new(vec![relabel_rule("x", &sym("a"), &sym("c"))]).unwrap();
        assert!(matches!(uma_build(&td, Some(&bad)), Err(TransducerError::MissingMacro(_))));
    }

    #[test]
    fn parallel_by_renaming() {
        let p = Transducer::single("p", vec![Operator::Step(rel("a", "b"))]);
        let q = Transducer::single("q", vec![Operator::Step(rel("x", "y"))]);
        assert!(parallel_td_check(&p, &p));
        assert!(parallel_td_check(&p, &q));
        let two = Transducer::chain(vec![("p", vec![Operator::Step(rel("a", "b"))]), ("q", vec![Operator::Identity])]).unwrap();
        assert!(!parallel_td_check(&p, &two));
    }
}
