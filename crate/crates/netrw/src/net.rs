//! Nets: port graphs over a ranked alphabet.
//!
//! A vertex is labelled either by a [`RankedSymbol`] with ordered in- and
//! out-arity index sets, or by a frontier letter with exactly one port.
//! Every port is either linked to exactly one partner port or left free
//! with an arity letter. Loops are allowed.
//!
//! Two notions of sameness are provided. [`canonical_form`] identifies nets
//! up to vertex ids and arity-letter names; [`Jungle`] deduplicates by it.
//! [`is_isomorphic`] additionally lets symbols and frontier letters be
//! renamed by a rank-preserving bijection.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

pub type VertexId = u32;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RankedSymbol {
    pub name: String,
    pub ins: Vec<u32>,
    pub outs: Vec<u32>,
}

impl RankedSymbol {
    /// Builds a symbol; arity indices are sorted and deduplicated.
    pub fn new(name: impl Into<String>, ins: &[u32], outs: &[u32]) -> Self {
        let mut ins = ins.to_vec();
        let mut outs = outs.to_vec();
        ins.sort_unstable();
        ins.dedup();
        outs.sort_unstable();
        outs.dedup();
        RankedSymbol { name: name.into(), ins, outs }
    }

    /// Symbol with in-arities `1..=k` and out-arities `1..=m`.
    pub fn simple(name: impl Into<String>, k: u32, m: u32) -> Self {
        let ins: Vec<u32> = (1..=k).collect();
        let outs: Vec<u32> = (1..=m).collect();
        RankedSymbol::new(name, &ins, &outs)
    }

    pub fn rank(&self) -> usize {
        self.ins.len() + self.outs.len()
    }

    pub fn same_rank(&self, other: &RankedSymbol) -> bool {
        self.ins == other.ins && self.outs == other.outs
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dir {
    In,
    Out,
}

impl Dir {
    pub fn flip(self) -> Dir {
        match self {
            Dir::In => Dir::Out,
            Dir::Out => Dir::In,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Symbol(RankedSymbol),
    /// A frontier (manoeuvre) letter. Its single port is `dir` index 1.
    Frontier { letter: String, dir: Dir },
}

impl Label {
    pub fn ports(&self) -> Vec<(Dir, u32)> {
        match self {
            Label::Symbol(s) => s
                .ins
                .iter()
                .map(|&i| (Dir::In, i))
                .chain(s.outs.iter().map(|&j| (Dir::Out, j)))
                .collect(),
            Label::Frontier { dir, .. } => vec![(*dir, 1)],
        }
    }

    pub fn has_port(&self, dir: Dir, index: u32) -> bool {
        match self {
            Label::Symbol(s) => match dir {
                Dir::In => s.ins.binary_search(&index).is_ok(),
                Dir::Out => s.outs.binary_search(&index).is_ok(),
            },
            Label::Frontier { dir: d, .. } => *d == dir && index == 1,
        }
    }

    pub fn symbol(&self) -> Option<&RankedSymbol> {
        match self {
            Label::Symbol(s) => Some(s),
            Label::Frontier { .. } => None,
        }
    }

    pub fn is_frontier(&self) -> bool {
        matches!(self, Label::Frontier { .. })
    }

    pub fn name(&self) -> &str {
        match self {
            Label::Symbol(s) => &s.name,
            Label::Frontier { letter, .. } => letter,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Port {
    pub vertex: VertexId,
    pub dir: Dir,
    pub index: u32,
}

impl Port {
    pub fn new(vertex: VertexId, dir: Dir, index: u32) -> Self {
        Port { vertex, dir, index }
    }
    pub fn inp(vertex: VertexId, index: u32) -> Self {
        Port::new(vertex, Dir::In, index)
    }
    pub fn out(vertex: VertexId, index: u32) -> Self {
        Port::new(vertex, Dir::Out, index)
    }
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = match self.dir {
            Dir::In => "in",
            Dir::Out => "out",
        };
        write!(f, "v{}.{}{}", self.vertex, d, self.index)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub src: VertexId,
    pub out: u32,
    pub tgt: VertexId,
    pub inp: u32,
}

impl Edge {
    pub fn new(src: VertexId, out: u32, tgt: VertexId, inp: u32) -> Self {
        Edge { src, out, tgt, inp }
    }
    pub fn from_port(&self) -> Port {
        Port::out(self.src, self.out)
    }
    pub fn to_port(&self) -> Port {
        Port::inp(self.tgt, self.inp)
    }
}

/// Occupancy of one port.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Linked(Port),
    Free(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error("port {0} is occupied more than once")]
    DuplicatePortOccupancy(Port),
    #[error("unknown port {0}")]
    UnknownPort(Port),
    #[error("frontier vertex v{0} must have exactly one port")]
    FrontierArityViolation(VertexId),
    #[error("port {0} is neither linked nor free")]
    UncoveredPort(Port),
    #[error("vertex v{0} declared twice")]
    DuplicateVertex(VertexId),
    #[error("edge must run from an out-port to an in-port: {0} -> {1}")]
    EdgeDirection(Port, Port),
    #[error("position does not address an occurrence of the pattern")]
    InvalidPosition,
    #[error("enumeration exceeded the bound of {0}")]
    SizeBudgetExceeded(usize),
    #[error("gluing conflict: {0}")]
    GluingConflict(String),
}

/// An immutable, validated net.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Net {
    labels: BTreeMap<VertexId, Label>,
    slots: BTreeMap<Port, Slot>,
    root: Option<VertexId>,
}

impl Net {
    pub fn empty() -> Net {
        Net { labels: BTreeMap::new(), slots: BTreeMap::new(), root: None }
    }

    /// Validating constructor. Every port must be covered exactly once,
    /// either by an edge endpoint or by a dangling entry.
    pub fn build(
        vertices: impl IntoIterator<Item = (VertexId, Label)>,
        edges: impl IntoIterator<Item = Edge>,
        dangling: impl IntoIterator<Item = (Port, String)>,
        root: Option<VertexId>,
    ) -> Result<Net, NetError> {
        let mut labels = BTreeMap::new();
        for (id, label) in vertices {
            if labels.insert(id, label).is_some() {
                return Err(NetError::DuplicateVertex(id));
            }
        }
        let mut slots: BTreeMap<Port, Slot> = BTreeMap::new();
        let check = |labels: &BTreeMap<VertexId, Label>, p: Port| -> Result<(), NetError> {
            match labels.get(&p.vertex) {
                Some(l) if l.has_port(p.dir, p.index) => Ok(()),
                Some(Label::Frontier { .. }) => Err(NetError::FrontierArityViolation(p.vertex)),
                _ => Err(NetError::UnknownPort(p)),
            }
        };
        for e in edges {
            let a = e.from_port();
            let b = e.to_port();
            check(&labels, a)?;
            check(&labels, b)?;
            if slots.contains_key(&a) {
                return Err(NetError::DuplicatePortOccupancy(a));
            }
            slots.insert(a, Slot::Linked(b));
            if slots.contains_key(&b) {
                return Err(NetError::DuplicatePortOccupancy(b));
            }
            slots.insert(b, Slot::Linked(a));
        }
        for (p, letter) in dangling {
            check(&labels, p)?;
            if slots.contains_key(&p) {
                return Err(NetError::DuplicatePortOccupancy(p));
            }
            slots.insert(p, Slot::Free(letter));
        }
        for (&v, l) in &labels {
            for (d, i) in l.ports() {
                let p = Port::new(v, d, i);
                if !slots.contains_key(&p) {
                    return Err(NetError::UncoveredPort(p));
                }
            }
        }
        if let Some(r) = root {
            if !labels.contains_key(&r) {
                return Err(NetError::UnknownPort(Port::inp(r, 0)));
            }
        }
        Ok(Net { labels, slots, root })
    }

    pub fn labels(&self) -> &BTreeMap<VertexId, Label> {
        &self.labels
    }

    pub fn label(&self, v: VertexId) -> Option<&Label> {
        self.labels.get(&v)
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.labels.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn root(&self) -> Option<VertexId> {
        self.root
    }

    pub fn slots(&self) -> &BTreeMap<Port, Slot> {
        &self.slots
    }

    pub fn slot(&self, p: Port) -> Option<&Slot> {
        self.slots.get(&p)
    }

    pub fn partner(&self, p: Port) -> Option<Port> {
        match self.slots.get(&p) {
            Some(Slot::Linked(q)) => Some(*q),
            _ => None,
        }
    }

    pub fn ports_of(&self, v: VertexId) -> Vec<Port> {
        self.labels
            .get(&v)
            .map(|l| l.ports().into_iter().map(|(d, i)| Port::new(v, d, i)).collect())
            .unwrap_or_default()
    }

    pub fn edges(&self) -> Vec<Edge> {
        self.slots
            .iter()
            .filter_map(|(p, s)| match (p.dir, s) {
                (Dir::Out, Slot::Linked(q)) => Some(Edge::new(p.vertex, p.index, q.vertex, q.index)),
                _ => None,
            })
            .collect()
    }

    pub fn dangling(&self) -> Vec<(Port, String)> {
        self.slots
            .iter()
            .filter_map(|(p, s)| match s {
                Slot::Free(l) => Some((*p, l.clone())),
                _ => None,
            })
            .collect()
    }

    /// Number of free ports.
    pub fn rank(&self) -> usize {
        self.slots.values().filter(|s| matches!(s, Slot::Free(_))).count()
    }

    /// Total number of ports over all vertices.
    pub fn port_count(&self) -> usize {
        self.slots.len()
    }

    /// Port holding the given free letter, if exactly one does.
    pub fn port_with_letter(&self, letter: &str) -> Option<Port> {
        let mut it = self
            .slots
            .iter()
            .filter(|(_, s)| matches!(s, Slot::Free(l) if l == letter))
            .map(|(p, _)| *p);
        let first = it.next()?;
        if it.next().is_some() {
            None
        } else {
            Some(first)
        }
    }

    /// Names of ranked symbols occurring in the net.
    pub fn symbols(&self) -> BTreeSet<String> {
        self.labels
            .values()
            .filter_map(|l| l.symbol().map(|s| s.name.clone()))
            .collect()
    }

    pub fn frontier_letters(&self) -> BTreeSet<String> {
        self.labels
            .values()
            .filter_map(|l| match l {
                Label::Frontier { letter, .. } => Some(letter.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn ranked_vertices(&self) -> BTreeSet<VertexId> {
        self.labels
            .iter()
            .filter(|(_, l)| !l.is_frontier())
            .map(|(v, _)| *v)
            .collect()
    }

    pub fn next_id(&self) -> VertexId {
        self.labels.keys().next_back().map(|v| v + 1).unwrap_or(0)
    }

    pub fn with_root(&self, root: Option<VertexId>) -> Net {
        let mut n = self.clone();
        n.root = root.filter(|r| n.labels.contains_key(r));
        n
    }

    /// Neighbouring vertices through linked ports.
    pub fn neighbours(&self, v: VertexId) -> BTreeSet<VertexId> {
        self.ports_of(v)
            .into_iter()
            .filter_map(|p| self.partner(p).map(|q| q.vertex))
            .collect()
    }

    /// Connected components as sorted vertex sets.
    pub fn components(&self) -> Vec<BTreeSet<VertexId>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for v in self.vertex_ids() {
            if seen.contains(&v) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut q = VecDeque::from([v]);
            seen.insert(v);
            while let Some(u) = q.pop_front() {
                comp.insert(u);
                for w in self.neighbours(u) {
                    if seen.insert(w) {
                        q.push_back(w);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Subnet induced by `keep`: links leaving the set become free ports
    /// with fresh letters.
    pub fn induced(&self, keep: &BTreeSet<VertexId>) -> Net {
        let labels: BTreeMap<VertexId, Label> = self
            .labels
            .iter()
            .filter(|(v, _)| keep.contains(v))
            .map(|(v, l)| (*v, l.clone()))
            .collect();
        let mut slots = BTreeMap::new();
        for (p, s) in &self.slots {
            if !keep.contains(&p.vertex) {
                continue;
            }
            let s2 = match s {
                Slot::Linked(q) if keep.contains(&q.vertex) => Slot::Linked(*q),
                Slot::Linked(_) => Slot::Free(cut_letter(*p)),
                Slot::Free(l) => Slot::Free(l.clone()),
            };
            slots.insert(*p, s2);
        }
        let root = self.root.filter(|r| keep.contains(r));
        Net { labels, slots, root }
    }

    /// Renames vertex ids through `f` (must be injective).
    pub fn map_ids(&self, f: impl Fn(VertexId) -> VertexId) -> Net {
        let labels = self.labels.iter().map(|(v, l)| (f(*v), l.clone())).collect();
        let mp = |p: &Port| Port::new(f(p.vertex), p.dir, p.index);
        let slots = self
            .slots
            .iter()
            .map(|(p, s)| {
                let s2 = match s {
                    Slot::Linked(q) => Slot::Linked(mp(q)),
                    Slot::Free(l) => Slot::Free(l.clone()),
                };
                (mp(p), s2)
            })
            .collect();
        Net { labels, slots, root: self.root.map(&f) }
    }

    /// Shifts every vertex id by `offset`.
    pub fn shifted(&self, offset: VertexId) -> Net {
        self.map_ids(|v| v + offset)
    }

    /// Replaces every label through `f`; `f` must keep the port sets.
    pub fn map_labels(&self, f: impl Fn(&Label) -> Label) -> Net {
        let labels: BTreeMap<VertexId, Label> = self.labels.iter().map(|(v, l)| (*v, f(l))).collect();
        for (v, l) in &labels {
            assert_eq!(l.ports(), self.labels[v].ports(), "label map must preserve ports");
        }
        Net { labels, slots: self.slots.clone(), root: self.root }
    }

    /// Renames free letters through `f`.
    pub fn map_letters(&self, f: impl Fn(&str) -> String) -> Net {
        let slots = self
            .slots
            .iter()
            .map(|(p, s)| {
                let s2 = match s {
                    Slot::Free(l) => Slot::Free(f(l)),
                    other => other.clone(),
                };
                (*p, s2)
            })
            .collect();
        Net { labels: self.labels.clone(), slots, root: self.root }
    }

    /// Renames ranked symbols by name, keeping ranks.
    pub fn rename_symbols(&self, map: &BTreeMap<String, String>) -> Net {
        self.map_labels(|l| match l {
            Label::Symbol(s) => match map.get(&s.name) {
                Some(n) => Label::Symbol(RankedSymbol { name: n.clone(), ..s.clone() }),
                None => l.clone(),
            },
            other => other.clone(),
        })
    }

    /// Gives every free port a distinct letter derived from its port.
    pub fn with_port_letters(&self) -> Net {
        let slots = self
            .slots
            .iter()
            .map(|(p, s)| {
                let s2 = match s {
                    Slot::Free(_) => Slot::Free(cut_letter(*p)),
                    other => other.clone(),
                };
                (*p, s2)
            })
            .collect();
        Net { labels: self.labels.clone(), slots, root: self.root }
    }
}

/// Deterministic letter for a port that has been cut free.
pub fn cut_letter(p: Port) -> String {
    let d = match p.dir {
        Dir::In => 'i',
        Dir::Out => 'o',
    };
    format!("~{}{}{}", p.vertex, d, p.index)
}

/// Incremental construction with automatic fresh letters for uncovered
/// ports.
#[derive(Clone, Debug, Default)]
pub struct NetBuilder {
    vertices: Vec<(VertexId, Label)>,
    edges: Vec<Edge>,
    dangling: Vec<(Port, String)>,
    root: Option<VertexId>,
}

impl NetBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(mut self, id: VertexId, sym: RankedSymbol) -> Self {
        self.vertices.push((id, Label::Symbol(sym)));
        self
    }

    pub fn frontier(mut self, id: VertexId, letter: impl Into<String>, dir: Dir) -> Self {
        self.vertices.push((id, Label::Frontier { letter: letter.into(), dir }));
        self
    }

    pub fn edge(mut self, src: VertexId, out: u32, tgt: VertexId, inp: u32) -> Self {
        self.edges.push(Edge::new(src, out, tgt, inp));
        self
    }

    pub fn free(mut self, port: Port, letter: impl Into<String>) -> Self {
        self.dangling.push((port, letter.into()));
        self
    }

    pub fn root(mut self, v: VertexId) -> Self {
        self.root = Some(v);
        self
    }

    /// Validates; ports left uncovered get deterministic fresh letters.
    pub fn build(self) -> Result<Net, NetError> {
        let mut covered: BTreeSet<Port> = BTreeSet::new();
        for e in &self.edges {
            covered.insert(e.from_port());
            covered.insert(e.to_port());
        }
        for (p, _) in &self.dangling {
            covered.insert(*p);
        }
        let mut dangling = self.dangling.clone();
        for (v, l) in &self.vertices {
            for (d, i) in l.ports() {
                let p = Port::new(*v, d, i);
                if !covered.contains(&p) {
                    dangling.push((p, cut_letter(p)));
                }
            }
        }
        Net::build(self.vertices, self.edges, dangling, self.root)
    }
}

// ---------------------------------------------------------------------------
// Canonical form

struct Writer(Vec<u8>);

impl Writer {
    fn u32(&mut self, x: u32) {
        self.0.extend_from_slice(&x.to_be_bytes());
    }
    fn str(&mut self, s: &str) {
        self.u32(s.len() as u32);
        self.0.extend_from_slice(s.as_bytes());
    }
    fn label(&mut self, l: &Label) {
        match l {
            Label::Symbol(s) => {
                self.0.push(1);
                self.str(&s.name);
                self.u32(s.ins.len() as u32);
                for i in &s.ins {
                    self.u32(*i);
                }
                self.u32(s.outs.len() as u32);
                for j in &s.outs {
                    self.u32(*j);
                }
            }
            Label::Frontier { letter, dir } => {
                self.0.push(2);
                self.str(letter);
                self.0.push(*dir as u8);
            }
        }
    }
}

/// Breadth-first numbering of the component of `start`, ports visited in
/// their natural order.
fn bfs_order(net: &Net, start: VertexId) -> Vec<VertexId> {
    let mut order = vec![start];
    let mut seen = BTreeSet::from([start]);
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        for p in net.ports_of(v) {
            if let Some(q) = net.partner(p) {
                if seen.insert(q.vertex) {
                    order.push(q.vertex);
                }
            }
        }
        i += 1;
    }
    order
}

fn encode_order(net: &Net, order: &[VertexId], label_of: &dyn Fn(&Label) -> Label) -> Vec<u8> {
    let pos: BTreeMap<VertexId, u32> = order.iter().enumerate().map(|(i, v)| (*v, i as u32)).collect();
    let mut w = Writer(Vec::new());
    w.u32(order.len() as u32);
    for v in order {
        let l = &net.labels[v];
        w.label(&label_of(l));
        w.0.push(u8::from(net.root == Some(*v)));
        for p in net.ports_of(*v) {
            match &net.slots[&p] {
                Slot::Free(_) => w.0.push(0),
                Slot::Linked(q) => {
                    w.0.push(1);
                    w.u32(pos[&q.vertex]);
                    w.0.push(q.dir as u8);
                    w.u32(q.index);
                }
            }
        }
    }
    w.0
}

/// Canonical component codes together with the vertex order realising them.
fn component_codes(net: &Net, label_of: &dyn Fn(&Label) -> Label) -> Vec<(Vec<u8>, Vec<VertexId>)> {
    let mut codes = Vec::new();
    for comp in net.components() {
        let mut best: Option<(Vec<u8>, Vec<VertexId>)> = None;
        for &s in &comp {
            let order = bfs_order(net, s);
            let code = encode_order(net, &order, label_of);
            if best.as_ref().is_none_or(|(b, _)| code < *b) {
                best = Some((code, order));
            }
        }
        codes.push(best.expect("component is nonempty"));
    }
    codes.sort();
    codes
}

/// Compact one-line form in canonical vertex order, e.g.
/// `{0:a 1:b | 0.out1>1.in1}`. Free ports are not listed.
impl fmt::Display for Net {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let order = canonical_order(self);
        let pos: BTreeMap<VertexId, usize> = order.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        write!(f, "{{")?;
        for (i, v) in order.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            match &self.labels[v] {
                Label::Symbol(s) => write!(f, "{i}:{}", s.name)?,
                Label::Frontier { letter, .. } => write!(f, "{i}:?{letter}")?,
            }
        }
        let mut edges: Vec<String> = self
            .edges()
            .iter()
            .map(|e| format!("{}.out{}>{}.in{}", pos[&e.src], e.out, pos[&e.tgt], e.inp))
            .collect();
        edges.sort();
        if !edges.is_empty() {
            write!(f, " | {}", edges.join(" "))?;
        }
        write!(f, "}}")
    }
}

/// Byte string identifying the net up to vertex ids and arity-letter names.
pub fn canonical_form(n: &Net) -> Vec<u8> {
    let codes = component_codes(n, &|l| l.clone());
    let mut out = Vec::new();
    out.extend_from_slice(&(codes.len() as u32).to_be_bytes());
    for (c, _) in codes {
        out.extend_from_slice(&(c.len() as u32).to_be_bytes());
        out.extend_from_slice(&c);
    }
    out
}

/// Vertex order matching [`canonical_form`].
pub fn canonical_order(n: &Net) -> Vec<VertexId> {
    component_codes(n, &|l| l.clone()).into_iter().flat_map(|(_, o)| o).collect()
}

/// Copy of `n` with vertices renumbered `0..` in canonical order and free
/// letters renamed `prefix1, prefix2, ...` in port order.
pub fn canonicalize(n: &Net, prefix: &str) -> Net {
    let order = canonical_order(n);
    let pos: BTreeMap<VertexId, VertexId> =
        order.iter().enumerate().map(|(i, v)| (*v, i as VertexId)).collect();
    let m = n.map_ids(|v| pos[&v]);
    let mut k = 0;
    let mut rename = BTreeMap::new();
    for (p, s) in m.slots() {
        if let Slot::Free(_) = s {
            k += 1;
            rename.insert(*p, format!("{prefix}{k}"));
        }
    }
    let slots = m
        .slots
        .iter()
        .map(|(p, s)| match s {
            Slot::Free(_) => (*p, Slot::Free(rename[p].clone())),
            other => (*p, other.clone()),
        })
        .collect();
    Net { labels: m.labels, slots, root: m.root }
}

/// Net isomorphism: a vertex bijection preserving links, roots and free
/// positions, together with rank-preserving bijections on symbol names and
/// on frontier letters.
pub fn is_isomorphic(a: &Net, b: &Net) -> bool {
    if a.len() != b.len() || a.port_count() != b.port_count() || a.rank() != b.rank() {
        return false;
    }
    let shape = |l: &Label| match l {
        Label::Symbol(s) => Label::Symbol(RankedSymbol { name: String::new(), ..s.clone() }),
        Label::Frontier { dir, .. } => Label::Frontier { letter: String::new(), dir: *dir },
    };
    if component_codes(a, &shape).iter().map(|c| &c.0).collect::<Vec<_>>()
        != component_codes(b, &shape).iter().map(|c| &c.0).collect::<Vec<_>>()
    {
        return false;
    }
    isomorphism(a, b).is_some()
}

/// A vertex map witnessing [`is_isomorphic`], if one exists.
pub fn isomorphism(a: &Net, b: &Net) -> Option<BTreeMap<VertexId, VertexId>> {
    if a.len() != b.len() || a.port_count() != b.port_count() || a.rank() != b.rank() {
        return None;
    }
    let ca = a.components();
    let cb = b.components();
    let mut used = vec![false; cb.len()];
    let mut maps = NameMaps::default();
    let mut acc = BTreeMap::new();
    iso_components(a, b, &ca, &cb, 0, &mut used, &mut maps, &mut acc).then_some(acc)
}

#[derive(Clone, Default)]
struct NameMaps {
    fwd: BTreeMap<(bool, String), String>,
    bwd: BTreeMap<(bool, String), String>,
}

impl NameMaps {
    fn bind(&mut self, la: &Label, lb: &Label) -> bool {
        let (ka, kb) = match (la, lb) {
            (Label::Symbol(x), Label::Symbol(y)) if x.same_rank(y) => ((true, x.name.clone()), (true, y.name.clone())),
            (Label::Frontier { letter: x, dir: dx }, Label::Frontier { letter: y, dir: dy }) if dx == dy => {
                ((false, x.clone()), (false, y.clone()))
            }
            _ => return false,
        };
        match (self.fwd.get(&ka), self.bwd.get(&kb)) {
            (Some(y), _) if *y != kb.1 => false,
            (_, Some(x)) if *x != ka.1 => false,
            _ => {
                self.fwd.insert(ka.clone(), kb.1.clone());
                self.bwd.insert(kb, ka.1);
                true
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn iso_components(
    a: &Net,
    b: &Net,
    ca: &[BTreeSet<VertexId>],
    cb: &[BTreeSet<VertexId>],
    i: usize,
    used: &mut Vec<bool>,
    maps: &mut NameMaps,
    acc: &mut BTreeMap<VertexId, VertexId>,
) -> bool {
    if i == ca.len() {
        return true;
    }
    let start = *ca[i].iter().next().expect("nonempty");
    for j in 0..cb.len() {
        if used[j] || cb[j].len() != ca[i].len() {
            continue;
        }
        for &t in &cb[j] {
            let saved = maps.clone();
            if let Some(vm) = walk_iso(a, b, start, t, maps) {
                used[j] = true;
                acc.extend(vm.iter().map(|(k, v)| (*k, *v)));
                if iso_components(a, b, ca, cb, i + 1, used, maps, acc) {
                    return true;
                }
                for k in vm.keys() {
                    acc.remove(k);
                }
                used[j] = false;
            }
            *maps = saved;
        }
    }
    false
}

/// Extends `start -> t` along links; the map on a connected component is
/// forced by port order.
fn walk_iso(a: &Net, b: &Net, start: VertexId, t: VertexId, maps: &mut NameMaps) -> Option<BTreeMap<VertexId, VertexId>> {
    let mut vm: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    let mut back: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    let mut q = VecDeque::from([(start, t)]);
    vm.insert(start, t);
    back.insert(t, start);
    while let Some((u, w)) = q.pop_front() {
        let (la, lb) = (&a.labels[&u], &b.labels[&w]);
        if !maps.bind(la, lb) {
            return None;
        }
        if (a.root == Some(u)) != (b.root == Some(w)) {
            return None;
        }
        for p in a.ports_of(u) {
            let pb = Port::new(w, p.dir, p.index);
            match (&a.slots[&p], b.slots.get(&pb)) {
                (Slot::Free(_), Some(Slot::Free(_))) => {}
                (Slot::Linked(x), Some(Slot::Linked(y))) => {
                    if x.dir != y.dir || x.index != y.index {
                        return None;
                    }
                    match (vm.get(&x.vertex), back.get(&y.vertex)) {
                        (Some(m), _) if *m != y.vertex => return None,
                        (_, Some(m)) if *m != x.vertex => return None,
                        (Some(_), Some(_)) => {}
                        _ => {
                            vm.insert(x.vertex, y.vertex);
                            back.insert(y.vertex, x.vertex);
                            q.push_back((x.vertex, y.vertex));
                        }
                    }
                }
                _ => return None,
            }
        }
    }
    Some(vm)
}

// ---------------------------------------------------------------------------
// Jungles

/// A finite set of nets keyed by canonical form. Equality compares the
/// canonical forms only.
#[derive(Clone, Debug, Default)]
pub struct Jungle {
    members: BTreeMap<Vec<u8>, Net>,
}

impl PartialEq for Jungle {
    fn eq(&self, o: &Self) -> bool {
        self.members.keys().eq(o.members.keys())
    }
}

impl Eq for Jungle {}

impl std::hash::Hash for Jungle {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        for k in self.members.keys() {
            k.hash(h);
        }
    }
}

impl Jungle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(n: Net) -> Self {
        let mut j = Jungle::new();
        j.insert(n);
        j
    }

    /// Inserts a net; returns false if an equal net was present.
    pub fn insert(&mut self, n: Net) -> bool {
        let key = canonical_form(&n);
        if self.members.contains_key(&key) {
            return false;
        }
        self.members.insert(key, n);
        true
    }

    pub fn contains(&self, n: &Net) -> bool {
        self.members.contains_key(&canonical_form(n))
    }

    pub fn contains_key(&self, key: &[u8]) -> bool {
        self.members.contains_key(key)
    }

    pub fn get(&self, key: &[u8]) -> Option<&Net> {
        self.members.get(key)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Net> {
        self.members.values()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<u8>, &Net)> {
        self.members.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &Vec<u8>> {
        self.members.keys()
    }

    pub fn extend(&mut self, other: &Jungle) {
        for (k, n) in &other.members {
            self.members.entry(k.clone()).or_insert_with(|| n.clone());
        }
    }

    pub fn union(&self, other: &Jungle) -> Jungle {
        let mut j = self.clone();
        j.extend(other);
        j
    }

    pub fn is_subset(&self, other: &Jungle) -> bool {
        self.members.keys().all(|k| other.members.contains_key(k))
    }

    pub fn retain(&mut self, mut f: impl FnMut(&Net) -> bool) {
        self.members.retain(|_, n| f(n));
    }

    /// Letters (ranked symbol names) over all members.
    pub fn symbols(&self) -> BTreeSet<String> {
        self.iter().flat_map(|n| n.symbols()).collect()
    }
}

impl FromIterator<Net> for Jungle {
    fn from_iter<I: IntoIterator<Item = Net>>(iter: I) -> Self {
        let mut j = Jungle::new();
        for n in iter {
            j.insert(n);
        }
        j
    }
}

impl<'a> IntoIterator for &'a Jungle {
    type Item = &'a Net;
    type IntoIter = std::collections::btree_map::Values<'a, Vec<u8>, Net>;
    fn into_iter(self) -> Self::IntoIter {
        self.members.values()
    }
}

// ---------------------------------------------------------------------------
// Positions, occurrences, enclosures

/// Address of an occurrence: the host vertices it covers, sorted. The empty
/// path denotes the whole net.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    pub path: Vec<VertexId>,
}

impl Position {
    pub fn whole() -> Self {
        Position { path: Vec::new() }
    }

    pub fn of(vs: impl IntoIterator<Item = VertexId>) -> Self {
        let mut path: Vec<VertexId> = vs.into_iter().collect();
        path.sort_unstable();
        path.dedup();
        Position { path }
    }

    /// Covered vertex set; the whole net for the empty path.
    pub fn vertices(&self, host: &Net) -> BTreeSet<VertexId> {
        if self.path.is_empty() {
            host.vertex_ids().collect()
        } else {
            self.path.iter().copied().collect()
        }
    }
}

/// All injective maps from `pattern` vertices into `host` vertices under
/// which the induced subnet of the image equals the pattern (labels, links,
/// free ports; roots ignored).
pub fn embeddings(pattern: &Net, host: &Net) -> Vec<BTreeMap<VertexId, VertexId>> {
    let comps = pattern.components();
    let mut out = Vec::new();
    let mut cur = BTreeMap::new();
    let mut used = BTreeSet::new();
    embed_components(pattern, host, &comps, 0, &mut cur, &mut used, &mut out);
    out
}

fn embed_components(
    pattern: &Net,
    host: &Net,
    comps: &[BTreeSet<VertexId>],
    i: usize,
    cur: &mut BTreeMap<VertexId, VertexId>,
    used: &mut BTreeSet<VertexId>,
    out: &mut Vec<BTreeMap<VertexId, VertexId>>,
) {
    if i == comps.len() {
        if induced_ok(pattern, host, cur) {
            out.push(cur.clone());
        }
        return;
    }
    let start = *comps[i].iter().next().expect("nonempty");
    let want = &pattern.labels[&start];
    for (&h, l) in &host.labels {
        if used.contains(&h) || l != want {
            continue;
        }
        let mut ext = BTreeMap::new();
        if extend_component(pattern, host, start, h, used, &mut ext) {
            for (k, v) in &ext {
                cur.insert(*k, *v);
                used.insert(*v);
            }
            embed_components(pattern, host, comps, i + 1, cur, used, out);
            for (k, v) in &ext {
                cur.remove(k);
                used.remove(v);
            }
        }
    }
}

fn extend_component(
    pattern: &Net,
    host: &Net,
    start: VertexId,
    h: VertexId,
    used: &BTreeSet<VertexId>,
    ext: &mut BTreeMap<VertexId, VertexId>,
) -> bool {
    let mut back: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    ext.insert(start, h);
    back.insert(h, start);
    let mut q = VecDeque::from([start]);
    while let Some(u) = q.pop_front() {
        let w = ext[&u];
        if pattern.labels[&u] != host.labels[&w] {
            return false;
        }
        for p in pattern.ports_of(u) {
            if let Slot::Linked(x) = &pattern.slots[&p] {
                let hp = Port::new(w, p.dir, p.index);
                let y = match host.partner(hp) {
                    Some(y) => y,
                    None => return false,
                };
                if y.dir != x.dir || y.index != x.index {
                    return false;
                }
                match (ext.get(&x.vertex), back.get(&y.vertex)) {
                    (Some(m), _) if *m != y.vertex => return false,
                    (_, Some(m)) if *m != x.vertex => return false,
                    (Some(_), Some(_)) => {}
                    _ => {
                        if used.contains(&y.vertex) {
                            return false;
                        }
                        ext.insert(x.vertex, y.vertex);
                        back.insert(y.vertex, x.vertex);
                        q.push_back(x.vertex);
                    }
                }
            }
        }
    }
    true
}

fn induced_ok(pattern: &Net, host: &Net, map: &BTreeMap<VertexId, VertexId>) -> bool {
    let image: BTreeSet<VertexId> = map.values().copied().collect();
    for (p, s) in &pattern.slots {
        if let Slot::Free(_) = s {
            let hp = Port::new(map[&p.vertex], p.dir, p.index);
            if let Some(q) = host.partner(hp) {
                if image.contains(&q.vertex) {
                    return false;
                }
            }
        }
    }
    true
}

/// Positions of all occurrences of `pattern` in `host`.
pub fn positions_of(host: &Net, pattern: &Net) -> Vec<Position> {
    if pattern.is_empty() {
        return Vec::new();
    }
    let all: BTreeSet<VertexId> = host.vertex_ids().collect();
    let mut set = BTreeSet::new();
    for m in embeddings(pattern, host) {
        let vs: BTreeSet<VertexId> = m.values().copied().collect();
        if vs == all {
            set.insert(Position::whole());
        } else {
            set.insert(Position::of(vs));
        }
    }
    set.into_iter().collect()
}

/// Vertex sets of all connected subnets, bounded by `limit`.
pub fn connected_subsets(n: &Net, limit: usize) -> Result<BTreeSet<BTreeSet<VertexId>>, NetError> {
    let mut found: BTreeSet<BTreeSet<VertexId>> = BTreeSet::new();
    let mut stack: Vec<BTreeSet<VertexId>> = n.vertex_ids().map(|v| BTreeSet::from([v])).collect();
    while let Some(s) = stack.pop() {
        if found.contains(&s) {
            continue;
        }
        if found.len() >= limit {
            return Err(NetError::SizeBudgetExceeded(limit));
        }
        let frontier: BTreeSet<VertexId> = s
            .iter()
            .flat_map(|v| n.neighbours(*v))
            .filter(|w| !s.contains(w))
            .collect();
        for w in frontier {
            let mut t = s.clone();
            t.insert(w);
            if !found.contains(&t) {
                stack.push(t);
            }
        }
        found.insert(s);
    }
    Ok(found)
}

pub const DEFAULT_ENCLOSURE_LIMIT: usize = 100_000;

/// All connected subnets of `n`, deduplicated.
pub fn enclosures(n: &Net) -> Result<Jungle, NetError> {
    enclosures_bounded(n, DEFAULT_ENCLOSURE_LIMIT)
}

pub fn enclosures_bounded(n: &Net, limit: usize) -> Result<Jungle, NetError> {
    Ok(connected_subsets(n, limit)?
        .iter()
        .map(|s| n.induced(s).with_root(None))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct LinkStats {
    pub ilc: usize,
    pub olc: usize,
    pub unoccupied: usize,
    pub orn: usize,
}

/// Boundary statistics of the occurrence of `s` at `at` in `host`.
pub fn link_stats(s: &Net, host: &Net, at: &Position) -> Result<LinkStats, NetError> {
    let vs = at.vertices(host);
    if vs.iter().any(|v| host.label(*v).is_none()) {
        return Err(NetError::InvalidPosition);
    }
    let occ = host.induced(&vs);
    if canonical_form(&occ.with_root(None)) != canonical_form(&s.with_root(None)) {
        return Err(NetError::InvalidPosition);
    }
    Ok(boundary_stats(host, &vs))
}

/// Boundary statistics of an arbitrary vertex set.
pub fn boundary_stats(host: &Net, vs: &BTreeSet<VertexId>) -> LinkStats {
    let mut st = LinkStats::default();
    for v in vs {
        for p in host.ports_of(*v) {
            match &host.slots[&p] {
                Slot::Free(_) => st.unoccupied += 1,
                Slot::Linked(q) if !vs.contains(&q.vertex) => match p.dir {
                    Dir::In => st.ilc += 1,
                    Dir::Out => st.olc += 1,
                },
                Slot::Linked(_) => {}
            }
        }
    }
    st.orn = st.unoccupied + st.ilc;
    st
}

/// A port of one of the parts handed to [`net_union`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PartPort {
    pub part: usize,
    pub port: Port,
}

/// Disjoint union of `parts` with the given free-port pairs joined into
/// edges. Vertex ids of part `i` are shifted past those of earlier parts.
/// The root of the first rooted part is kept.
pub fn net_union(parts: &[Net], gluing: &[(PartPort, PartPort)]) -> Result<Net, NetError> {
    let mut offsets = Vec::new();
    let mut next = 0;
    for p in parts {
        offsets.push(next);
        next += p.next_id();
    }
    let mut labels = BTreeMap::new();
    let mut slots = BTreeMap::new();
    let mut root = None;
    for (i, p) in parts.iter().enumerate() {
        let q = p.shifted(offsets[i]);
        if root.is_none() {
            root = q.root;
        }
        labels.extend(q.labels);
        slots.extend(q.slots);
    }
    let mut touched = BTreeSet::new();
    let lift = |pp: &PartPort| -> Result<Port, NetError> {
        let off = *offsets
            .get(pp.part)
            .ok_or_else(|| NetError::GluingConflict(format!("no part {}", pp.part)))?;
        Ok(Port::new(pp.port.vertex + off, pp.port.dir, pp.port.index))
    };
    for (a, b) in gluing {
        let (pa, pb) = (lift(a)?, lift(b)?);
        for p in [pa, pb] {
            if !touched.insert(p) {
                return Err(NetError::GluingConflict(format!("{p} glued twice")));
            }
            match slots.get(&p) {
                Some(Slot::Free(_)) => {}
                Some(Slot::Linked(_)) => return Err(NetError::GluingConflict(format!("{p} is not free"))),
                None => return Err(NetError::UnknownPort(p)),
            }
        }
        if pa.dir == pb.dir {
            return Err(NetError::GluingConflict(format!("{pa} and {pb} have the same direction")));
        }
        slots.insert(pa, Slot::Linked(pb));
        slots.insert(pb, Slot::Linked(pa));
    }
    Ok(Net { labels, slots, root })
}

/// Joins two free ports of one net into an edge.
pub fn join_ports(n: &Net, a: Port, b: Port) -> Result<Net, NetError> {
    net_union(std::slice::from_ref(n), &[(PartPort { part: 0, port: a }, PartPort { part: 0, port: b })])
}

/// Assembles a net from raw parts without the coverage check; used by the
/// rewriting machinery, which maintains coverage itself.
pub(crate) fn assemble(
    labels: BTreeMap<VertexId, Label>,
    slots: BTreeMap<Port, Slot>,
    root: Option<VertexId>,
) -> Net {
    let n = Net { labels, slots, root };
    debug_assert!(n.check().is_ok(), "{:?}", n.check());
    n
}

impl Net {
    /// Re-runs validation on a net.
    pub fn check(&self) -> Result<(), NetError> {
        for (&v, l) in &self.labels {
            for (d, i) in l.ports() {
                let p = Port::new(v, d, i);
                match self.slots.get(&p) {
                    None => return Err(NetError::UncoveredPort(p)),
                    Some(Slot::Linked(q)) => {
                        if q.dir == p.dir {
                            return Err(NetError::EdgeDirection(p, *q));
                        }
                        if self.slots.get(q) != Some(&Slot::Linked(p)) {
                            return Err(NetError::DuplicatePortOccupancy(*q));
                        }
                    }
                    Some(Slot::Free(_)) => {}
                }
            }
        }
        for p in self.slots.keys() {
            match self.labels.get(&p.vertex) {
                Some(l) if l.has_port(p.dir, p.index) => {}
                _ => return Err(NetError::UnknownPort(*p)),
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a12() -> RankedSymbol {
        RankedSymbol::new("a", &[1, 2], &[1])
    }

    #[test]
    fn single_vertex_all_free() {
        let n = NetBuilder::new().vertex(0, a12()).build().unwrap();
        assert_eq!(n.rank(), 3);
        assert!(n.edges().is_empty());
    }

    #[test]
    fn self_loop_is_valid() {
        let n = NetBuilder::new().vertex(0, a12()).edge(0, 1, 0, 1).build().unwrap();
        assert_eq!(n.edges().len(), 1);
        assert_eq!(n.rank(), 1);
    }

    #[test]
    fn double_occupancy_rejected() {
        let b = RankedSymbol::simple("b", 0, 1);
        let r = NetBuilder::new()
            .vertex(0, a12())
            .vertex(1, b.clone())
            .vertex(2, b)
            .edge(1, 1, 0, 1)
            .edge(2, 1, 0, 1)
            .build();
        assert!(matches!(r, Err(NetError::DuplicatePortOccupancy(_))));
    }

    #[test]
    fn frontier_with_two_ports_rejected() {
        let r = Net::build(
            [(0, Label::Frontier { letter: "x".into(), dir: Dir::Out })],
            [],
            [(Port::out(0, 1), "l".to_string()), (Port::out(0, 2), "m".to_string())],
            None,
        );
        assert!(matches!(r, Err(NetError::FrontierArityViolation(0))));
    }

    #[test]
    fn unknown_port_rejected() {
        let r = NetBuilder::new().vertex(0, a12()).free(Port::inp(0, 7), "q").build();
        assert!(matches!(r, Err(NetError::UnknownPort(_))));
    }

    #[test]
    fn canonical_form_ignores_ids_and_letters() {
        let a = RankedSymbol::simple("a", 1, 1);
        let b = RankedSymbol::simple("b", 1, 1);
        let n1 = NetBuilder::new().vertex(0, a.clone()).vertex(1, b.clone()).edge(0, 1, 1, 1).build().unwrap();
        let n2 = NetBuilder::new()
            .vertex(7, b)
            .vertex(3, a)
            .edge(3, 1, 7, 1)
            .free(Port::inp(3, 1), "zz")
            .build()
            .unwrap();
        assert_eq!(canonical_form(&n1), canonical_form(&n2));
    }

    #[test]
    fn direction_matters() {
        let a = RankedSymbol::simple("a", 1, 1);
        let b = RankedSymbol::simple("b", 1, 1);
        let ab = NetBuilder::new().vertex(0, a.clone()).vertex(1, b.clone()).edge(0, 1, 1, 1).build().unwrap();
        let ba = NetBuilder::new().vertex(0, a).vertex(1, b).edge(1, 1, 0, 1).build().unwrap();
        assert_ne!(canonical_form(&ab), canonical_form(&ba));
    }

    #[test]
    fn symbol_renaming_is_isomorphism() {
        let x = NetBuilder::new().vertex(0, RankedSymbol::simple("a", 1, 1)).build().unwrap();
        let y = NetBuilder::new().vertex(0, RankedSymbol::simple("b", 1, 1)).build().unwrap();
        assert!(is_isomorphic(&x, &y));
        assert_ne!(canonical_form(&x), canonical_form(&y));
        let z = NetBuilder::new().vertex(0, RankedSymbol::simple("b", 2, 0)).build().unwrap();
        let w = NetBuilder::new().vertex(0, RankedSymbol::simple("a", 1, 0)).build().unwrap();
        assert!(!is_isomorphic(&z, &w));
    }

    #[test]
    fn renaming_must_be_consistent() {
        let a = RankedSymbol::simple("a", 1, 1);
        let b = RankedSymbol::simple("b", 1, 1);
        let aa = NetBuilder::new().vertex(0, a.clone()).vertex(1, a.clone()).edge(0, 1, 1, 1).build().unwrap();
        let ab = NetBuilder::new().vertex(0, a).vertex(1, b).edge(0, 1, 1, 1).build().unwrap();
        assert!(!is_isomorphic(&aa, &ab));
    }

    #[test]
    fn positions_of_examples() {
        let a = RankedSymbol::simple("a", 1, 1);
        let host = NetBuilder::new().vertex(0, a.clone()).vertex(1, a.clone()).edge(0, 1, 1, 1).build().unwrap();
        let single = NetBuilder::new().vertex(0, a.clone()).build().unwrap();
        assert_eq!(positions_of(&host, &single).len(), 2);
        assert_eq!(positions_of(&host, &host), vec![Position::whole()]);
        let b = NetBuilder::new().vertex(0, RankedSymbol::simple("b", 1, 1)).build().unwrap();
        assert!(positions_of(&host, &b).is_empty());
    }

    #[test]
    fn enclosure_counts() {
        let a = RankedSymbol::simple("a", 1, 1);
        let b = RankedSymbol::simple("b", 1, 1);
        let chain = NetBuilder::new().vertex(0, a.clone()).vertex(1, b).edge(0, 1, 1, 1).build().unwrap();
        assert_eq!(enclosures(&chain).unwrap().len(), 3);
        let looped = NetBuilder::new().vertex(0, a.clone()).edge(0, 1, 0, 1).build().unwrap();
        assert_eq!(enclosures(&looped).unwrap().len(), 1);
        let single = NetBuilder::new().vertex(0, a).build().unwrap();
        assert_eq!(enclosures(&single).unwrap().len(), 1);
    }

    #[test]
    fn enclosure_budget() {
        let a = RankedSymbol::simple("a", 1, 1);
        let chain = NetBuilder::new().vertex(0, a.clone()).vertex(1, a).edge(0, 1, 1, 1).build().unwrap();
        assert!(matches!(enclosures_bounded(&chain, 2), Err(NetError::SizeBudgetExceeded(2))));
    }

    #[test]
    fn link_stats_examples() {
        let a = RankedSymbol::new("a", &[1, 2], &[1]);
        let c = RankedSymbol::simple("c", 0, 1);
        let host = NetBuilder::new().vertex(0, a.clone()).vertex(1, c).edge(1, 1, 0, 1).build().unwrap();
        let s = NetBuilder::new().vertex(0, a).build().unwrap();
        let st = link_stats(&s, &host, &Position::of([0])).unwrap();
        assert_eq!((st.ilc, st.olc, st.unoccupied, st.orn), (1, 0, 2, 3));
        let whole = link_stats(&host, &host, &Position::whole()).unwrap();
        assert_eq!((whole.ilc, whole.olc), (0, 0));
        assert_eq!(link_stats(&s, &host, &Position::of([1])), Err(NetError::InvalidPosition));
    }

    #[test]
    fn union_and_gluing() {
        let a = NetBuilder::new().vertex(0, RankedSymbol::simple("a", 1, 1)).build().unwrap();
        let b = NetBuilder::new().vertex(0, RankedSymbol::simple("b", 1, 1)).build().unwrap();
        let u = net_union(std::slice::from_ref(&a), &[]).unwrap();
        assert_eq!(canonical_form(&u), canonical_form(&a));
        let pa = PartPort { part: 0, port: Port::out(0, 1) };
        let pb = PartPort { part: 1, port: Port::inp(0, 1) };
        let chain = net_union(&[a.clone(), b.clone()], &[(pa, pb)]).unwrap();
        assert_eq!(chain.edges().len(), 1);
        let pb2 = PartPort { part: 1, port: Port::out(0, 1) };
        assert!(matches!(
            net_union(&[a, b], &[(pa, pb), (pa, pb2)]),
            Err(NetError::GluingConflict(_))
        ));
    }
}
