//! Abstraction relations over finite universes of nets, the laws they must
//! satisfy, partially quotient algebras, multidimensional relations, the
//! parallel-class cardinality bound and the functor commutation check.
//!
//! Every relation lives on an explicit universe; "for all nets" statements
//! are checked on size-bounded enumerations only.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::blocks::{nuo_enumerate, NuoRepresentation};
use crate::morphism::{apply_nbh, classify_nbh, nbh_image, MorphismError, Nbh, NbhType};
use crate::net::{canonical_form, is_isomorphic, isomorphism, Dir, Edge, Jungle, Label, Net, Port, RankedSymbol};
use crate::rewrite::{apex, normal_forms, validate_uprns, Budget, RewriteError, Rns};
use crate::transducer::{rename_rns, Operator, Transducer};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbstractionError {
    #[error("universe of {0} nets exceeds the limit of {1}")]
    BudgetExceeded(usize, usize),
    #[error("relation is not an equivalence: {0}")]
    NotEquivalence(String),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Morphism(#[from] MorphismError),
}

/// Intervening system types, plus block homomorphism abstraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Prns,
    Gprns,
    Clrns,
    Uprns,
    Nbh,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Kind::Prns => "PRNS",
            Kind::Gprns => "GPRNS",
            Kind::Clrns => "CLRNS",
            Kind::Uprns => "UPRNS",
            Kind::Nbh => "NBH",
        };
        f.write_str(s)
    }
}

fn directions_kept(w: &Rns) -> bool {
    w.rules.iter().all(|r| {
        let side = |n: &Net| -> BTreeSet<(String, Dir)> {
            n.dangling().into_iter().map(|(p, l)| (l, p.dir)).collect()
        };
        side(&r.left) == side(&r.right)
    })
}

/// Whether `w` is an intervening system of type `kind` over `c`.
///
/// UPRNS: the universally partitioning conditions hold. GPRNS adds that
/// every rule keeps each interface letter on a port of the same direction.
/// PRNS further asks single-vertex left sides. CLRNS is UPRNS with exactly
/// one normal form for each member of `c`.
pub fn conforms(kind: Kind, w: &Rns, c: &Jungle, budget: Budget) -> Result<bool, AbstractionError> {
    if kind == Kind::Nbh {
        return Ok(false);
    }
    if !validate_uprns(w, c, budget)?.passes() {
        return Ok(false);
    }
    Ok(match kind {
        Kind::Uprns => true,
        Kind::Gprns => directions_kept(w),
        Kind::Prns => directions_kept(w) && w.rules.iter().all(|r| apex(&r.left).len() == 1),
        Kind::Clrns => {
            let mut ok = true;
            for n in c {
                let nf = normal_forms(w, &Jungle::singleton(n.clone()), budget)?;
                ok &= !nf.exhausted && nf.jungle.len() == 1;
            }
            ok
        }
        Kind::Nbh => unreachable!(),
    })
}

type Key = Vec<u8>;

#[derive(Clone, Debug)]
enum Repr {
    /// Kernel of a map: class index per member, with candidate centers.
    Classes { class_of: BTreeMap<Key, usize>, centers: Vec<Vec<Net>>, witness: Vec<String> },
    Pairs { pairs: BTreeSet<(Key, Key)>, witness: BTreeMap<(Key, Key), Vec<String>> },
}

/// A relation on a finite universe of nets, compared by canonical form.
#[derive(Clone, Debug)]
pub struct AbstractionRelation {
    pub kind: Kind,
    pub universe: Jungle,
    repr: Repr,
}

fn minimal_members<'a>(members: impl IntoIterator<Item = &'a Net>) -> Vec<Net> {
    let all: Vec<&Net> = members.into_iter().collect();
    let best = all.iter().map(|n| (n.port_count(), n.len())).min();
    all.into_iter().filter(|n| Some((n.port_count(), n.len())) == best).cloned().collect()
}

impl AbstractionRelation {
    /// Equality on `universe`.
    pub fn identity(kind: Kind, universe: &Jungle) -> Self {
        Self::kernel(kind, universe, canonical_form)
    }

    /// Relates members with equal keys. Centers are the members of least
    /// port count, then least size.
    pub fn kernel(kind: Kind, universe: &Jungle, key: impl Fn(&Net) -> Vec<u8>) -> Self {
        Self::kernel_with_centers(kind, universe, |n| (key(n), None), Vec::new())
    }

    /// Kernel of a map onto nets; each class has the common image as its
    /// center.
    pub fn kernel_onto(kind: Kind, universe: &Jungle, image: impl Fn(&Net) -> Net, witness: &str) -> Self {
        Self::kernel_with_centers(
            kind,
            universe,
            |n| {
                let m = image(n);
                (canonical_form(&m), Some(vec![m]))
            },
            vec![witness.to_string()],
        )
    }

    fn kernel_with_centers(
        kind: Kind,
        universe: &Jungle,
        key: impl Fn(&Net) -> (Vec<u8>, Option<Vec<Net>>),
        witness: Vec<String>,
    ) -> Self {
        let mut ids: BTreeMap<Vec<u8>, usize> = BTreeMap::new();
        let mut class_of = BTreeMap::new();
        let mut members: Vec<Vec<&Net>> = Vec::new();
        let mut given: Vec<Option<Vec<Net>>> = Vec::new();
        for (k, n) in universe.entries() {
            let (kk, centers) = key(n);
            let next = ids.len();
            let id = *ids.entry(kk).or_insert(next);
            if id == members.len() {
                members.push(Vec::new());
                given.push(centers);
            }
            members[id].push(n);
            class_of.insert(k.clone(), id);
        }
        let centers = members
            .iter()
            .zip(given)
            .map(|(m, g)| g.unwrap_or_else(|| minimal_members(m.iter().copied())))
            .collect();
        AbstractionRelation { kind, universe: universe.clone(), repr: Repr::Classes { class_of, centers, witness } }
    }

    /// The symmetric closure of `pairs`, restricted to `universe`.
    pub fn from_pairs(kind: Kind, universe: &Jungle, pairs: &[(Net, Net)], witness: &str) -> Self {
        let mut set = BTreeSet::new();
        let mut wit = BTreeMap::new();
        for (a, b) in pairs {
            let (ka, kb) = (canonical_form(a), canonical_form(b));
            if !universe.contains_key(&ka) || !universe.contains_key(&kb) {
                continue;
            }
            for p in [(ka.clone(), kb.clone()), (kb.clone(), ka.clone())] {
                set.insert(p.clone());
                wit.entry(p).or_insert_with(Vec::new).push(witness.to_string());
            }
        }
        AbstractionRelation { kind, universe: universe.clone(), repr: Repr::Pairs { pairs: set, witness: wit } }
    }

    /// All pairs of `universe` satisfying `pred`, as given.
    pub fn from_predicate(kind: Kind, universe: &Jungle, pred: impl Fn(&Net, &Net) -> bool) -> Self {
        let mut set = BTreeSet::new();
        for (ka, a) in universe.entries() {
            for (kb, b) in universe.entries() {
                if pred(a, b) {
                    set.insert((ka.clone(), kb.clone()));
                }
            }
        }
        AbstractionRelation { kind, universe: universe.clone(), repr: Repr::Pairs { pairs: set, witness: BTreeMap::new() } }
    }

    /// Members related when `h` gives them the same image. A member with
    /// no image is related only to itself. Centers are the images.
    pub fn nbh_abstraction(universe: &Jungle, h: &Nbh, name: &str) -> Result<Self, AbstractionError> {
        let mut images = BTreeMap::new();
        for (k, n) in universe.entries() {
            images.insert(k.clone(), nbh_image(h, n)?);
        }
        Ok(Self::kernel_with_centers(
            Kind::Nbh,
            universe,
            |n| {
                let img = &images[&canonical_form(n)];
                if img.is_empty() {
                    let mut k = vec![0u8];
                    k.extend(canonical_form(n));
                    (k, None)
                } else {
                    let mut k = vec![1u8];
                    for key in img.keys() {
                        k.extend_from_slice(&(key.len() as u32).to_be_bytes());
                        k.extend(key);
                    }
                    (k, Some(img.iter().cloned().collect()))
                }
            },
            vec![name.to_string()],
        ))
    }

    /// Members related when `w` gives them the same normal forms. Centers
    /// are the normal forms.
    pub fn rns_abstraction(kind: Kind, universe: &Jungle, w: &Rns, name: &str, budget: Budget) -> Result<Self, AbstractionError> {
        let mut nfs = BTreeMap::new();
        for (k, n) in universe.entries() {
            nfs.insert(k.clone(), normal_forms(w, &Jungle::singleton(n.clone()), budget)?.jungle);
        }
        Ok(Self::kernel_with_centers(
            kind,
            universe,
            |n| {
                let nf = &nfs[&canonical_form(n)];
                let mut k = Vec::new();
                for key in nf.keys() {
                    k.extend_from_slice(&(key.len() as u32).to_be_bytes());
                    k.extend(key);
                }
                (k, Some(nf.iter().cloned().collect()))
            },
            vec![name.to_string()],
        ))
    }

    fn related_keys(&self, a: &[u8], b: &[u8]) -> bool {
        match &self.repr {
            Repr::Classes { class_of, .. } => match (class_of.get(a), class_of.get(b)) {
                (Some(x), Some(y)) => x == y,
                _ => false,
            },
            Repr::Pairs { pairs, .. } => pairs.contains(&(a.to_vec(), b.to_vec())),
        }
    }

    pub fn related(&self, a: &Net, b: &Net) -> bool {
        self.related_keys(&canonical_form(a), &canonical_form(b))
    }

    /// Universe members related to `a`.
    pub fn class_of(&self, a: &Net) -> Jungle {
        let ka = canonical_form(a);
        self.universe.iter().filter(|b| self.related_keys(&ka, &canonical_form(b))).cloned().collect()
    }

    fn neighbours(&self) -> BTreeMap<Key, BTreeSet<Key>> {
        let mut out: BTreeMap<Key, BTreeSet<Key>> = self.universe.keys().map(|k| (k.clone(), BTreeSet::new())).collect();
        match &self.repr {
            Repr::Classes { class_of, .. } => {
                let mut by: BTreeMap<usize, Vec<&Key>> = BTreeMap::new();
                for (k, c) in class_of {
                    by.entry(*c).or_default().push(k);
                }
                for ks in by.values() {
                    for a in ks {
                        out.get_mut(*a).expect("member").extend(ks.iter().map(|k| (*k).clone()));
                    }
                }
            }
            Repr::Pairs { pairs, .. } => {
                for (a, b) in pairs {
                    out.entry(a.clone()).or_default().insert(b.clone());
                }
            }
        }
        out
    }

    pub fn pair_count(&self) -> usize {
        self.neighbours().values().map(|s| s.len()).sum()
    }

    /// Names of the systems relating `a` and `b`.
    pub fn witness(&self, a: &Net, b: &Net) -> Option<Vec<String>> {
        if !self.related(a, b) {
            return None;
        }
        match &self.repr {
            Repr::Classes { witness, .. } => Some(witness.clone()),
            Repr::Pairs { witness, .. } => {
                Some(witness.get(&(canonical_form(a), canonical_form(b))).cloned().unwrap_or_default())
            }
        }
    }

    /// The classes, for a relation that is an equivalence.
    pub fn partition(&self) -> Result<Partition, AbstractionError> {
        let report = check_equivalence_laws(self);
        if !report.passes() {
            return Err(AbstractionError::NotEquivalence(report.to_string()));
        }
        match &self.repr {
            Repr::Classes { class_of, centers, .. } => {
                let mut classes = vec![Jungle::new(); centers.len()];
                for (k, c) in class_of {
                    classes[*c].insert(self.universe.get(k).expect("member").clone());
                }
                Ok(Partition { classes, centers: centers.clone() })
            }
            Repr::Pairs { .. } => {
                let nb = self.neighbours();
                let mut seen = BTreeSet::new();
                let mut classes = Vec::new();
                for (k, ns) in &nb {
                    if seen.contains(k) {
                        continue;
                    }
                    let class: Jungle = ns.iter().map(|x| self.universe.get(x).expect("member").clone()).collect();
                    seen.extend(ns.iter().cloned());
                    classes.push(class);
                }
                let centers = classes.iter().map(|c| minimal_members(c.iter())).collect();
                Ok(Partition { classes, centers })
            }
        }
    }

    /// Whether members of different classes are never isomorphic.
    pub fn is_distinctive(&self) -> bool {
        let nets: Vec<&Net> = self.universe.iter().collect();
        for (i, a) in nets.iter().enumerate() {
            for b in &nets[i + 1..] {
                if !self.related(a, b) && is_isomorphic(a, b) {
                    return false;
                }
            }
        }
        true
    }
}

/// Disjoint classes covering a universe, with candidate centers per class.
#[derive(Clone, Debug)]
pub struct Partition {
    pub classes: Vec<Jungle>,
    pub centers: Vec<Vec<Net>>,
}

impl Partition {
    pub fn singletons(universe: &Jungle) -> Self {
        let classes: Vec<Jungle> = universe.iter().map(|n| Jungle::singleton(n.clone())).collect();
        let centers = universe.iter().map(|n| vec![n.clone()]).collect();
        Partition { classes, centers }
    }

    /// Index of the class containing `n`.
    pub fn index_of(&self, n: &Net) -> Option<usize> {
        let k = canonical_form(n);
        self.classes.iter().position(|c| c.contains_key(&k))
    }

    pub fn is_disjoint(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.classes.iter().flat_map(|c| c.keys()).all(|k| seen.insert(k.clone()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub law: String,
    pub pass: bool,
    pub witness: Vec<String>,
}

/// Line-oriented verdicts in a stable order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub lines: Vec<Verdict>,
}

impl Report {
    pub fn push(&mut self, law: impl Into<String>, pass: bool, witness: Vec<String>) {
        self.lines.push(Verdict { law: law.into(), pass, witness });
    }

    pub fn passes(&self) -> bool {
        self.lines.iter().all(|v| v.pass)
    }

    pub fn extend(&mut self, other: Report) {
        self.lines.extend(other.lines);
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.lines.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{} {}", if v.pass { "PASS" } else { "FAIL" }, v.law)?;
            for w in &v.witness {
                write!(f, " {w}")?;
            }
        }
        Ok(())
    }
}

fn show(universe: &Jungle, k: &[u8]) -> String {
    universe.get(k).map(|n| n.to_string()).unwrap_or_else(|| "?".into())
}

/// Reflexivity, symmetry and transitivity on the universe, each with a
/// counterexample on failure.
pub fn check_equivalence_laws(rel: &AbstractionRelation) -> Report {
    let nb = rel.neighbours();
    let u = &rel.universe;
    let mut report = Report::default();
    let refl = nb.iter().find(|(k, ns)| !ns.contains(*k)).map(|(k, _)| vec![show(u, k)]);
    report.push("reflexivity", refl.is_none(), refl.unwrap_or_default());
    let mut sym = None;
    'sym: for (a, ns) in &nb {
        for b in ns {
            if !nb.get(b).is_some_and(|m| m.contains(a)) {
                sym = Some(vec![show(u, a), show(u, b)]);
                break 'sym;
            }
        }
    }
    report.push("symmetry", sym.is_none(), sym.unwrap_or_default());
    let mut trans = None;
    'trans: for (a, ns) in &nb {
        for b in ns {
            for c in nb.get(b).into_iter().flatten() {
                if !ns.contains(c) {
                    trans = Some(vec![show(u, a), show(u, b), show(u, c)]);
                    break 'trans;
                }
            }
        }
    }
    report.push("transitivity", trans.is_none(), trans.unwrap_or_default());
    report
}

/// Candidate centers of each class are pairwise isomorphic.
pub fn center_uniqueness(p: &Partition) -> Report {
    let mut report = Report::default();
    let mut bad = None;
    'outer: for (i, cs) in p.centers.iter().enumerate() {
        for (j, a) in cs.iter().enumerate() {
            for b in &cs[j + 1..] {
                if !is_isomorphic(a, b) {
                    bad = Some(vec![format!("class{i}"), a.to_string(), b.to_string()]);
                    break 'outer;
                }
            }
        }
    }
    report.push("center-uniqueness", bad.is_none(), bad.unwrap_or_default());
    report
}

/// How two nets are abstract sisters.
#[derive(Clone, Debug)]
pub enum SisterWitness {
    /// A common origin presented by `rep`, with alphabetic unexpanding
    /// homomorphisms onto each net.
    Nbh { origin: Net, rep: NuoRepresentation, to_s: Nbh, to_t: Nbh },
    /// Library indices of the systems whose normal forms of `s` and of `t`
    /// pair off by isomorphism.
    Rns { via_s: usize, via_t: usize },
}

/// Contraction of a non-overlapping presentation: one vertex per piece,
/// ports in the order of the piece's free ports.
fn contract(rep: &NuoRepresentation) -> Option<(Net, Vec<Net>)> {
    let k = &rep.subject;
    let members: Vec<Net> = rep.piece_nets().into_iter().map(|n| n.with_port_letters()).collect();
    if members.iter().any(|m| m.is_empty()) {
        return None;
    }
    let mut classes: Vec<Vec<u8>> = Vec::new();
    let mut labels = BTreeMap::new();
    let mut port_of: BTreeMap<Port, Port> = BTreeMap::new();
    for (i, m) in members.iter().enumerate() {
        let key = canonical_form(m);
        let c = classes.iter().position(|x| *x == key).unwrap_or_else(|| {
            classes.push(key);
            classes.len() - 1
        });
        let d = m.dangling();
        let ins: Vec<Port> = d.iter().filter(|(p, _)| p.dir == Dir::In).map(|(p, _)| *p).collect();
        let outs: Vec<Port> = d.iter().filter(|(p, _)| p.dir == Dir::Out).map(|(p, _)| *p).collect();
        let v = i as u32;
        for (j, p) in ins.iter().enumerate() {
            port_of.insert(*p, Port::inp(v, j as u32 + 1));
        }
        for (j, p) in outs.iter().enumerate() {
            port_of.insert(*p, Port::out(v, j as u32 + 1));
        }
        labels.insert(v, Label::Symbol(RankedSymbol::simple(format!("p{c}"), ins.len() as u32, outs.len() as u32)));
    }
    let mut edges = Vec::new();
    for e in k.edges() {
        let (a, b) = (port_of.get(&e.from_port()), port_of.get(&e.to_port()));
        if let (Some(a), Some(b)) = (a, b) {
            edges.push(Edge::new(a.vertex, a.index, b.vertex, b.index));
        }
    }
    let dangling: Vec<(Port, String)> = k.dangling().into_iter().filter_map(|(p, l)| port_of.get(&p).map(|q| (*q, l))).collect();
    let net = Net::build(labels, edges, dangling, None).ok()?;
    Some((net, members))
}

/// Alphabetic homomorphism sending piece `i` of `rep` to the vertex of `x`
/// that `phi` assigns to contraction vertex `i`.
fn onto(members: &[Net], x: &Net, phi: &BTreeMap<u32, u32>) -> Option<Nbh> {
    let mut h = Nbh::identity();
    for (i, m) in members.iter().enumerate() {
        let Some(Label::Symbol(sym)) = x.label(phi[&(i as u32)]) else { return None };
        let d = m.dangling();
        let ins: Vec<&String> = d.iter().filter(|(p, _)| p.dir == Dir::In).map(|(_, l)| l).collect();
        let outs: Vec<&String> = d.iter().filter(|(p, _)| p.dir == Dir::Out).map(|(_, l)| l).collect();
        let mut free: Vec<(Port, String)> = ins.iter().enumerate().map(|(j, l)| (Port::inp(0, j as u32 + 1), (*l).clone())).collect();
        free.extend(outs.iter().enumerate().map(|(j, l)| (Port::out(0, j as u32 + 1), (*l).clone())));
        let image = Net::build([(0, Label::Symbol(sym.clone()))], Vec::new(), free, None).ok()?;
        let key = canonical_form(m);
        if h.block.contains_key(&key) {
            continue;
        }
        h.add(m.clone(), image).ok()?;
    }
    Some(h)
}

/// Searches for a witness that `s` and `t` are abstract sisters of `kind`.
///
/// For the block kind the origins tried are `s`, `t` and `origins`, each
/// under its non-overlapping presentations; both homomorphisms must be
/// alphabetic and unexpanding. For system kinds, pairs of `library`
/// members conforming to `kind` are tried.
pub fn sisters_check(
    s: &Net,
    t: &Net,
    kind: Kind,
    origins: &[Net],
    library: &[Rns],
    budget: Budget,
) -> Result<Option<SisterWitness>, AbstractionError> {
    if kind == Kind::Nbh {
        let mut tried = BTreeSet::new();
        for k in [s, t].into_iter().chain(origins.iter()) {
            if !tried.insert(canonical_form(k)) || k.len() > budget.max_net_size {
                continue;
            }
            let reps = nuo_enumerate(k, k.len().max(1)).map_err(|e| MorphismError::BlockMismatch(e.to_string()))?;
            for rep in reps.into_iter().filter(|r| !r.is_overlapping()) {
                let Some((c, members)) = contract(&rep) else { continue };
                let (Some(ps), Some(pt)) = (isomorphism(&c, s), isomorphism(&c, t)) else { continue };
                let (Some(hs), Some(ht)) = (onto(&members, s, &ps), onto(&members, t, &pt)) else { continue };
                let sample = Jungle::singleton(k.clone());
                let ok = |h: &Nbh, x: &Net| -> Result<bool, AbstractionError> {
                    let flags = classify_nbh(h, &sample)?;
                    let img = match apply_nbh(h, &rep) {
                        Ok(n) => n,
                        Err(_) => return Ok(false),
                    };
                    Ok(flags.contains(&NbhType::AlpUnexNBH) && canonical_form(&img) == canonical_form(x))
                };
                if ok(&hs, s)? && ok(&ht, t)? {
                    return Ok(Some(SisterWitness::Nbh { origin: k.clone(), rep, to_s: hs, to_t: ht }));
                }
            }
        }
        return Ok(None);
    }
    let sample: Jungle = [s.clone(), t.clone()].into_iter().collect();
    let mut fit = Vec::new();
    for (i, w) in library.iter().enumerate() {
        if conforms(kind, w, &sample, budget)? {
            let a = normal_forms(w, &Jungle::singleton(s.clone()), budget)?;
            let b = normal_forms(w, &Jungle::singleton(t.clone()), budget)?;
            fit.push((i, a.jungle, b.jungle));
        }
    }
    for (i, a, _) in &fit {
        for (j, _, b) in &fit {
            if iso_bijection(a, b) {
                return Ok(Some(SisterWitness::Rns { via_s: *i, via_t: *j }));
            }
        }
    }
    Ok(None)
}

/// Whether the members of `a` and `b` pair off by isomorphism.
pub fn iso_bijection(a: &Jungle, b: &Jungle) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut left: Vec<&Net> = b.iter().collect();
    for x in a {
        match left.iter().position(|y| is_isomorphic(x, y)) {
            Some(i) => {
                left.remove(i);
            }
            None => return false,
        }
    }
    true
}

/// An operation on nets, producing a jungle.
pub type NetOp = Arc<dyn Fn(&Net) -> Result<Jungle, String> + Send + Sync>;

/// An operation on class indices of a partition.
pub type ClassOp = BTreeMap<usize, BTreeSet<usize>>;

/// Wraps a transducer as a net operation.
pub fn td_op(td: Transducer) -> NetOp {
    Arc::new(move |n: &Net| crate::transducer::run_td(&td, &Jungle::singleton(n.clone())).map(|o| o.jungle).map_err(|e| e.to_string()))
}

/// Wraps an operator as a net operation under `budget`.
pub fn operator_op(op: Operator, budget: Budget) -> NetOp {
    Arc::new(move |n: &Net| op.apply(&Jungle::singleton(n.clone()), budget).map(|o| o.jungle).map_err(|e| e.to_string()))
}

#[derive(Clone)]
pub struct PartiallyQuotientAlgebra {
    pub base_carrier: Jungle,
    pub theta: AbstractionRelation,
    pub partition: Partition,
    pub base_ops: Vec<(String, NetOp)>,
    pub quotient_ops: BTreeMap<String, ClassOp>,
}

impl fmt::Debug for PartiallyQuotientAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PartiallyQuotientAlgebra")
            .field("carrier", &self.base_carrier.len())
            .field("classes", &self.partition.classes.len())
            .field("ops", &self.base_ops.iter().map(|(n, _)| n).collect::<Vec<_>>())
            .finish()
    }
}

fn classes_of(p: &Partition, j: &Jungle) -> BTreeSet<usize> {
    j.iter().filter_map(|n| p.index_of(n)).collect()
}

/// The quotient operation induced by `f`: a class goes to the classes
/// reached from every one of its members.
pub fn induced_quotient_op(p: &Partition, f: &NetOp) -> Result<ClassOp, String> {
    let mut out = ClassOp::new();
    for (i, class) in p.classes.iter().enumerate() {
        let mut acc: Option<BTreeSet<usize>> = None;
        for b in class {
            let c = classes_of(p, &f(b)?);
            acc = Some(match acc {
                None => c,
                Some(a) => a.intersection(&c).copied().collect(),
            });
        }
        out.insert(i, acc.unwrap_or_default());
    }
    Ok(out)
}

impl PartiallyQuotientAlgebra {
    /// The algebra on the classes of `theta` with induced quotient ops.
    pub fn induced(theta: AbstractionRelation, base_ops: Vec<(String, NetOp)>) -> Result<Self, AbstractionError> {
        let partition = theta.partition()?;
        let mut quotient_ops = BTreeMap::new();
        for (name, f) in &base_ops {
            let q = induced_quotient_op(&partition, f).map_err(AbstractionError::NotEquivalence)?;
            quotient_ops.insert(name.clone(), q);
        }
        Ok(PartiallyQuotientAlgebra { base_carrier: theta.universe.clone(), theta, partition, base_ops, quotient_ops })
    }
}

/// Per operation, checks that the quotient op applied to the class of a
/// lands inside the classes of f(a), for every carrier member a.
pub fn check_partially_quotient(pqa: &PartiallyQuotientAlgebra) -> Report {
    let mut report = Report::default();
    let names: BTreeSet<&String> = pqa.base_ops.iter().map(|(n, _)| n).collect();
    let bij = names.len() == pqa.base_ops.len() && names.iter().all(|n| pqa.quotient_ops.contains_key(*n)) && pqa.quotient_ops.len() == names.len();
    report.push("alpha-bijection", bij, Vec::new());
    for (name, f) in &pqa.base_ops {
        let Some(q) = pqa.quotient_ops.get(name) else {
            report.push(format!("commutation {name}"), false, vec!["no quotient op".into()]);
            continue;
        };
        let mut bad = None;
        for a in &pqa.base_carrier {
            let Some(ca) = pqa.partition.index_of(a) else { continue };
            let fa = match f(a) {
                Ok(j) => classes_of(&pqa.partition, &j),
                Err(e) => {
                    bad = Some(vec![a.to_string(), e]);
                    break;
                }
            };
            let img = q.get(&ca).cloned().unwrap_or_default();
            if let Some(x) = img.iter().find(|x| !fa.contains(x)) {
                bad = Some(vec![a.to_string(), format!("class{ca} -> class{x}")]);
                break;
            }
        }
        report.push(format!("commutation {name}"), bad.is_none(), bad.unwrap_or_default());
    }
    if pqa.theta.is_distinctive() {
        report.push("distinctive", true, Vec::new());
    }
    report
}

/// A multidimensional abstraction relation at one level.
#[derive(Clone, Debug)]
pub struct MultidimRelation {
    pub level: usize,
    pub base: Vec<AbstractionRelation>,
    /// Per member, the classes under each relation of the previous level.
    pub saturation_sets: BTreeMap<Vec<u8>, Vec<Jungle>>,
    pub relation: AbstractionRelation,
}

/// Default universe bound for the quantifier evaluation.
pub const MULTIDIM_LIMIT: usize = 400;

/// Level `k` of the multidimensional relation over `base`.
///
/// Level 0 is the intersection of the base relations. At level `k`, s and
/// t are related when some class P of s and some class Q of t (one per
/// relation of level `k-1`) cover each other: every p in P is related to
/// some q in Q under a relation of level `k-1`, and back. The result is
/// closed to an equivalence.
pub fn multidim_theta(base: &[AbstractionRelation], k: usize, limit: usize) -> Result<MultidimRelation, AbstractionError> {
    let Some(first) = base.first() else {
        return Err(AbstractionError::NotEquivalence("no base relation".into()));
    };
    let universe = first.universe.clone();
    if universe.len() > limit {
        return Err(AbstractionError::BudgetExceeded(universe.len(), limit));
    }
    let level0 = AbstractionRelation::from_predicate(first.kind, &universe, |a, b| base.iter().all(|r| r.related(a, b)));
    let mut family: Vec<AbstractionRelation> = base.to_vec();
    let mut current = level0;
    let mut sat = BTreeMap::new();
    for _ in 0..k {
        sat = universe
            .entries()
            .map(|(key, n)| (key.clone(), family.iter().map(|r| r.class_of(n)).collect::<Vec<Jungle>>()))
            .collect::<BTreeMap<_, _>>();
        let covers = |p: &Jungle, q: &Jungle| p.iter().all(|x| q.iter().any(|y| family.iter().any(|r| r.related(x, y))));
        let raw = AbstractionRelation::from_predicate(first.kind, &universe, |a, b| {
            let (sa, sb) = (&sat[&canonical_form(a)], &sat[&canonical_form(b)]);
            sa.iter().any(|p| sb.iter().any(|q| covers(p, q) && covers(q, p)))
        });
        current = equivalence_closure(&raw);
        family = vec![current.clone()];
    }
    Ok(MultidimRelation { level: k, base: base.to_vec(), saturation_sets: sat, relation: current })
}

/// The smallest equivalence containing `rel`.
pub fn equivalence_closure(rel: &AbstractionRelation) -> AbstractionRelation {
    let nb = rel.neighbours();
    let keys: Vec<&Key> = nb.keys().collect();
    let index: BTreeMap<&Key, usize> = keys.iter().enumerate().map(|(i, k)| (*k, i)).collect();
    let mut parent: Vec<usize> = (0..keys.len()).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for (a, ns) in &nb {
        for b in ns {
            if let (Some(&x), Some(&y)) = (index.get(a), index.get(b)) {
                let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                parent[rx] = ry;
            }
        }
    }
    let roots: Vec<usize> = (0..keys.len()).map(|i| find(&mut parent, i)).collect();
    AbstractionRelation::kernel(rel.kind, &rel.universe, |n| {
        let i = index[&canonical_form(n)];
        (roots[i] as u64).to_be_bytes().to_vec()
    })
}

/// Which rules of the nest contribute summands to the bound.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BoundIndex {
    /// Every rule of every attached system.
    #[default]
    AllRules,
    /// The first rule of each attached system.
    FirstRule,
}

/// One summand: left apex `s` of a rule in the nest, a related net `t` of
/// the class `h`, the number of renamings carrying `s` to `t`, and the size
/// of the level-k class of `t`.
#[derive(Clone, Debug)]
pub struct BoundTerm {
    pub system: usize,
    pub rule: String,
    pub s: Net,
    pub t: Net,
    pub renamings: usize,
    pub class_size: usize,
}

impl BoundTerm {
    pub fn value(&self) -> usize {
        self.renamings * self.class_size
    }
}

pub fn bound_from_terms(terms: &[BoundTerm]) -> usize {
    terms.iter().map(|t| t.value()).sum()
}

/// Rank-preserving bijections of `alphabet`.
pub fn alphabet_bijections(alphabet: &[RankedSymbol]) -> Vec<BTreeMap<String, String>> {
    let mut out = Vec::new();
    let mut used = vec![false; alphabet.len()];
    let mut cur = BTreeMap::new();
    fn go(
        i: usize,
        a: &[RankedSymbol],
        used: &mut Vec<bool>,
        cur: &mut BTreeMap<String, String>,
        out: &mut Vec<BTreeMap<String, String>>,
    ) {
        if i == a.len() {
            out.push(cur.clone());
            return;
        }
        for j in 0..a.len() {
            if used[j] || !a[i].same_rank(&a[j]) {
                continue;
            }
            used[j] = true;
            cur.insert(a[i].name.clone(), a[j].name.clone());
            go(i + 1, a, used, cur, out);
            cur.remove(&a[i].name);
            used[j] = false;
        }
    }
    go(0, alphabet, &mut used, &mut cur, &mut out);
    out
}

/// Counting instance: a transducer, the class `h` its renamed left apexes
/// must fall in, the base relation on a universe, and the alphabet.
#[derive(Clone, Debug)]
pub struct BoundInstance {
    pub td: Transducer,
    pub h: Jungle,
    pub theta: AbstractionRelation,
    pub alphabet: Vec<RankedSymbol>,
}

fn nest_systems(td: &Transducer) -> Vec<Rns> {
    td.nest().into_iter().map(|(_, r)| r.clone()).collect()
}

/// The summands of the bound at level `k`.
pub fn bound_terms(inst: &BoundInstance, k: usize, index: BoundIndex) -> Result<Vec<BoundTerm>, AbstractionError> {
    let level = multidim_theta(std::slice::from_ref(&inst.theta), k, MULTIDIM_LIMIT)?;
    let bij = alphabet_bijections(&inst.alphabet);
    let mut terms = Vec::new();
    for (i, r) in nest_systems(&inst.td).iter().enumerate() {
        let rules: Vec<_> = match index {
            BoundIndex::AllRules => r.rules.iter().collect(),
            BoundIndex::FirstRule => r.rules.iter().take(1).collect(),
        };
        for rule in rules {
            let s = apex(&rule.left);
            for t in &inst.h {
                if !inst.theta.related(t, &s) {
                    continue;
                }
                let kt = canonical_form(t);
                let renamings = bij.iter().filter(|m| canonical_form(&s.rename_symbols(m)) == kt).count();
                if renamings == 0 {
                    continue;
                }
                let class_size = level.relation.class_of(t).len().max(1);
                terms.push(BoundTerm { system: i, rule: rule.name.clone(), s: s.clone(), t: t.clone(), renamings, class_size });
            }
        }
    }
    Ok(terms)
}

pub fn cardinality_bound(inst: &BoundInstance, k: usize, index: BoundIndex) -> Result<usize, AbstractionError> {
    Ok(bound_from_terms(&bound_terms(inst, k, index)?))
}

/// Distinct transducers obtained by renaming one attached system so that
/// every renamed left apex lies in `h` and stays related to its original.
pub fn exhaustive_parallel_class(inst: &BoundInstance) -> Vec<Transducer> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let bij = alphabet_bijections(&inst.alphabet);
    let systems = nest_systems(&inst.td);
    for (i, r) in systems.iter().enumerate() {
        for m in &bij {
            let renamed = rename_rns(r, m);
            let ok = r.rules.iter().all(|rule| {
                let s = apex(&rule.left);
                let t = s.rename_symbols(m);
                inst.h.contains(&t) && inst.theta.related(&t, &s)
            });
            if !ok {
                continue;
            }
            let variant = replace_system(&inst.td, i, &renamed);
            if seen.insert(variant.fingerprint()) {
                out.push(variant);
            }
        }
    }
    out
}

fn replace_system(td: &Transducer, index: usize, with: &Rns) -> Transducer {
    fn walk(op: &Operator, index: usize, at: &mut usize, with: &Rns) -> Operator {
        match op {
            Operator::Step(r) | Operator::NormalForm(r) => {
                let here = *at == index;
                *at += 1;
                let r = if here { with.clone() } else { r.clone() };
                if matches!(op, Operator::Step(_)) { Operator::Step(r) } else { Operator::NormalForm(r) }
            }
            Operator::Sequence(ops) => Operator::Sequence(ops.iter().map(|o| walk(o, index, at, with)).collect()),
            Operator::Identity => Operator::Identity,
        }
    }
    let mut at = 0;
    let attach = td
        .attach
        .iter()
        .map(|(k, ops)| (k.clone(), ops.iter().map(|o| walk(o, index, &mut at, with)).collect()))
        .collect();
    Transducer { attach, ..td.clone() }
}

/// A relation with its projection, for the functor check.
pub struct Projected {
    pub name: String,
    pub f: NetOp,
    pub f_gamma: NetOp,
}

/// Checks that projecting then applying the projected relation agrees with
/// applying the relation then projecting, on every object.
pub fn functor_check(gamma: &NetOp, relations: &[Projected], objects: &Jungle) -> Report {
    let mut report = Report::default();
    for rel in relations {
        let mut bad = None;
        for a in objects {
            let run = || -> Result<(Jungle, Jungle), String> {
                let mut left = Jungle::new();
                for x in &gamma(a)? {
                    left.extend(&(rel.f_gamma)(x)?);
                }
                let mut right = Jungle::new();
                for y in &(rel.f)(a)? {
                    right.extend(&gamma(y)?);
                }
                Ok((left, right))
            };
            match run() {
                Ok((l, r)) if l == r => {}
                Ok((l, r)) => {
                    bad = Some(vec![a.to_string(), format!("{} vs {} nets", l.len(), r.len())]);
                    break;
                }
                Err(e) => {
                    bad = Some(vec![a.to_string(), e]);
                    break;
                }
            }
        }
        report.push(format!("functor {}", rel.name), bad.is_none(), bad.unwrap_or_default());
    }
    report
}

/// Whether the carriers of `p` and `q` are related by `theta`.
pub fn td_abstraction_check(p: &Transducer, q: &Transducer, theta: &AbstractionRelation) -> bool {
    theta.related(&p.carrier, &q.carrier)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::NetBuilder;
    use crate::oracle::{enumerate_nets, EnumerationSpec};
    use crate::rewrite::relabel_rule;

    fn sym(n: &str) -> RankedSymbol {
        RankedSymbol::simple(n, 1, 1)
    }

    fn lettered(n: &str) -> Net {
        NetBuilder::new().vertex(0, sym(n)).free(Port::inp(0, 1), "i").free(Port::out(0, 1), "o").build().unwrap()
    }

    fn universe(n: usize) -> Jungle {
        enumerate_nets(&EnumerationSpec::new(vec![sym("a"), sym("b")]).vertices(n)).unwrap()
    }

    #[test]
    fn laws_on_constructed_relations() {
        let u = universe(2);
        assert!(check_equivalence_laws(&AbstractionRelation::identity(Kind::Uprns, &u)).passes());
        let h = Nbh::new(vec![(lettered("a"), lettered("x")), (lettered("b"), lettered("x"))]).unwrap();
        let rel = AbstractionRelation::nbh_abstraction(&u, &h, "h").unwrap();
        assert!(check_equivalence_laws(&rel).passes());
        assert!(center_uniqueness(&rel.partition().unwrap()).passes());
    }

    #[test]
    fn non_transitive_pairs_fail() {
        let (a, b, c) = (lettered("a"), lettered("b"), lettered("c"));
        let u: Jungle = [a.clone(), b.clone(), c.clone()].into_iter().collect();
        let mut pairs = vec![(a.clone(), b.clone()), (b.clone(), c.clone())];
        pairs.extend(u.iter().map(|n| (n.clone(), n.clone())));
        let rep = check_equivalence_laws(&AbstractionRelation::from_pairs(Kind::Uprns, &u, &pairs, "hand"));
        assert!(!rep.passes());
        let line = rep.lines.iter().find(|l| l.law == "transitivity").unwrap();
        assert!(!line.pass && line.witness.len() == 3);
        assert!(rep.to_string().contains("FAIL transitivity"));
    }

    #[test]
    fn centers() {
        let u: Jungle = [lettered("a")].into_iter().collect();
        assert!(center_uniqueness(&Partition::singletons(&u)).passes());
        let two = NetBuilder::new().vertex(0, sym("a")).vertex(1, sym("a")).edge(0, 1, 1, 1).free(Port::inp(0, 1), "i").free(Port::out(1, 1), "o").build().unwrap();
        let p = Partition { classes: vec![u.clone()], centers: vec![vec![lettered("a"), lettered("b")]] };
        assert!(center_uniqueness(&p).passes());
        let q = Partition { classes: vec![u], centers: vec![vec![lettered("a"), two]] };
        assert!(!center_uniqueness(&q).passes());
    }

    #[test]
    fn sisters() {
        let two = |x: &str, y: &str| NetBuilder::new().vertex(0, sym(x)).vertex(1, sym(y)).edge(0, 1, 1, 1).free(Port::inp(0, 1), "i").free(Port::out(1, 1), "o").build().unwrap();
        let b = Budget::default();
        assert!(sisters_check(&lettered("a"), &lettered("a"), Kind::Nbh, &[], &[], b).unwrap().is_some());
        let w = sisters_check(&two("a", "b"), &two("b", "a"), Kind::Nbh, &[two("a", "b")], &[], b).unwrap();
        assert!(matches!(w, Some(SisterWitness::Nbh { .. })));
        assert!(sisters_check(&lettered("a"), &two("a", "a"), Kind::Nbh, &[], &[], b).unwrap().is_none());
        let lib = vec![Rns::new(vec![relabel_rule("ax", &sym("a"), &sym("x")), relabel_rule("by", &sym("b"), &sym("y"))]).unwrap()];
        let r = sisters_check(&lettered("a"), &lettered("b"), Kind::Uprns, &[], &lib, b).unwrap();
        assert!(matches!(r, Some(SisterWitness::Rns { via_s: 0, via_t: 0 })));
        assert!(sisters_check(&lettered("a"), &two("a", "b"), Kind::Uprns, &[], &lib, b).unwrap().is_none());
    }

    #[test]
    fn quotient_commutation() {
        let u = universe(1);
        let h = Nbh::new(vec![(lettered("a"), lettered("x")), (lettered("b"), lettered("x"))]).unwrap();
        let theta = AbstractionRelation::nbh_abstraction(&u, &h, "h").unwrap();
        let op = operator_op(Operator::NormalForm(Rns::new(vec![relabel_rule("ab", &sym("a"), &sym("b"))]).unwrap()), Budget::default());
        let mut pqa = PartiallyQuotientAlgebra::induced(theta.clone(), vec![("ab".into(), op)]).unwrap();
        assert!(check_partially_quotient(&pqa).passes(), "{}", check_partially_quotient(&pqa));
        let classes = pqa.partition.classes.len();
        let q = pqa.quotient_ops.get_mut("ab").unwrap();
        for v in q.values_mut() {
            v.extend(0..classes);
        }
        let vacuous = PartiallyQuotientAlgebra::induced(theta, Vec::new()).unwrap();
        assert!(check_partially_quotient(&vacuous).passes());
        if classes > 1 {
            assert!(!check_partially_quotient(&pqa).passes());
        }
    }

    #[test]
    fn multidim_levels() {
        let u = universe(1);
        let id = AbstractionRelation::identity(Kind::Nbh, &u);
        for k in 0..3 {
            let m = multidim_theta(std::slice::from_ref(&id), k, MULTIDIM_LIMIT).unwrap();
            assert_eq!(m.relation.pair_count(), u.len());
        }
        let pair: Jungle = [lettered("a"), lettered("b")].into_iter().collect();
        let h = Nbh::new(vec![(lettered("a"), lettered("x")), (lettered("b"), lettered("x"))]).unwrap();
        let theta = AbstractionRelation::nbh_abstraction(&pair, &h, "h").unwrap();
        let m = multidim_theta(&[theta], 1, MULTIDIM_LIMIT).unwrap();
        assert_eq!(m.relation.pair_count(), 4);
        assert!(matches!(multidim_theta(&[id], 1, 1), Err(AbstractionError::BudgetExceeded(..))));
    }

    #[test]
    fn bound_sums() {
        assert_eq!(bound_from_terms(&[]), 0);
        let t = |r, c| BoundTerm { system: 0, rule: String::new(), s: Net::empty(), t: Net::empty(), renamings: r, class_size: c };
        assert_eq!(bound_from_terms(&[t(1, 1)]), 1);
        assert_eq!(bound_from_terms(&[t(1, 2), t(3, 1)]), 5);
    }

    #[test]
    fn bound_dominates_count() {
        let alphabet = vec![sym("a"), sym("b"), sym("c")];
        let r = Rns::new(vec![relabel_rule("ab", &sym("a"), &sym("b"))]).unwrap();
        let td = Transducer::single("p", vec![Operator::Step(r)]);
        let u: Jungle = alphabet.iter().map(|s| lettered(&s.name)).collect();
        let theta = AbstractionRelation::kernel(Kind::Nbh, &u, |_| Vec::new());
        let inst = BoundInstance { td, h: u.clone(), theta, alphabet };
        let count = exhaustive_parallel_class(&inst).len();
        for k in 0..=2 {
            assert!(cardinality_bound(&inst, k, BoundIndex::AllRules).unwrap() >= count);
        }
        assert!(count >= 1);
    }

    #[test]
    fn functor_identity_and_mutation() {
        let u = universe(1);
        let id: NetOp = Arc::new(|n: &Net| Ok(Jungle::singleton(n.clone())));
        let ab = operator_op(Operator::NormalForm(Rns::new(vec![relabel_rule("ab", &sym("a"), &sym("b"))]).unwrap()), Budget::default());
        let ok = [Projected { name: "ab".into(), f: ab.clone(), f_gamma: ab.clone() }];
        assert!(functor_check(&id, &ok, &u).passes());
        let bad = [Projected { name: "ab".into(), f: ab, f_gamma: id.clone() }];
        assert!(!functor_check(&id, &bad, &u).passes());
    }
}
