//! Net block homomorphisms.
//!
//! A block member is a net whose free ports carry distinct letters. Its
//! image names the same letters on the ports that take over the member's
//! links; a letter missing from the image drops the link. Frontier vertices
//! in an image are interface points too, unless the frontier map supplies a
//! fragment for them, in which case the fragment is glued there and the
//! outside link is dropped. A symbol occurring in no block member is its own
//! block and maps to itself.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::MorphismError;
use crate::blocks::{block_partitions, nuo_enumerate, NuoRepresentation, Piece};
use crate::net::{
    canonical_form, cut_letter, embeddings, isomorphism, is_isomorphic, Jungle, Label, Net, Port, Slot, VertexId,
};
use crate::rewrite::interface;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NbhType {
    AlpUnexNBH,
    AlpNBH,
    ANBH,
    ESNBH,
    OESNBH,
    LSNBH,
    OLSNBH,
    SANBH,
}

impl fmt::Display for NbhType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Nbh {
    pub block: Jungle,
    pub block_map: BTreeMap<Vec<u8>, Net>,
    pub frontier_map: BTreeMap<String, Net>,
    pub arity_map: BTreeMap<String, String>,
    pub type_flags: BTreeSet<NbhType>,
}

impl Nbh {
    /// The homomorphism fixing every net.
    pub fn identity() -> Self {
        Nbh::default()
    }

    /// Builds from `(block member, image)` pairs. Flags start empty.
    pub fn new(entries: Vec<(Net, Net)>) -> Result<Self, MorphismError> {
        let mut h = Nbh::default();
        for (b, img) in entries {
            h.add(b, img)?;
        }
        Ok(h)
    }

    pub fn add(&mut self, member: Net, image: Net) -> Result<(), MorphismError> {
        let letters: Vec<String> = member.dangling().into_iter().map(|(_, l)| l).collect();
        let distinct: BTreeSet<&String> = letters.iter().collect();
        if distinct.len() != letters.len() {
            return Err(MorphismError::Malformed(format!("{:?}", member.symbols()), "block letters must be distinct".into()));
        }
        if member.is_empty() || member.labels().values().any(|l| l.is_frontier()) {
            return Err(MorphismError::Malformed(format!("{:?}", member.symbols()), "block members are nonempty ranked nets".into()));
        }
        interface(&image).map_err(|m| MorphismError::Malformed(format!("{:?}", image.symbols()), m))?;
        let member = member.with_root(None);
        let key = canonical_form(&member);
        if !self.block.insert(member) {
            return Err(MorphismError::Malformed(format!("{key:?}"), "block member listed twice".into()));
        }
        self.block_map.insert(key, image);
        Ok(())
    }

    pub fn with_frontier(mut self, x: impl Into<String>, fragment: Net) -> Self {
        self.frontier_map.insert(x.into(), fragment);
        self
    }

    pub fn with_flags(mut self, flags: BTreeSet<NbhType>) -> Self {
        self.type_flags = flags;
        self
    }

    /// Entries as `(member, image)` pairs in block order.
    pub fn entries(&self) -> Vec<(&Net, &Net)> {
        self.block.entries().map(|(k, m)| (m, self.block_map.get(k).unwrap_or(m))).collect()
    }

    pub fn max_block_size(&self) -> usize {
        self.block.iter().map(|n| n.len()).max().unwrap_or(1)
    }

    /// Symbols handled by some block member.
    pub fn block_symbols(&self) -> BTreeSet<String> {
        self.block.symbols()
    }

    fn implicit(&self, t: &Net, set: &BTreeSet<VertexId>) -> bool {
        if set.len() != 1 {
            return false;
        }
        let v = *set.iter().next().expect("one vertex");
        match t.label(v) {
            Some(Label::Symbol(s)) => !self.block_symbols().contains(&s.name),
            Some(Label::Frontier { .. }) => true,
            None => false,
        }
    }

    /// Member and image used for the piece `set` of `t`, if it is a block.
    pub fn block_for(&self, t: &Net, set: &BTreeSet<VertexId>) -> Option<(Net, Net)> {
        let piece = t.induced(set).with_root(None);
        let key = canonical_form(&piece);
        if let Some(m) = self.block.get(&key) {
            let img = self.block_map.get(&key).cloned().unwrap_or_else(|| m.clone());
            return Some((m.clone(), img));
        }
        if self.implicit(t, set) {
            return Some((piece.clone(), piece));
        }
        None
    }

    /// Every way the block member for `set` sits on it.
    pub fn bindings_on(&self, t: &Net, set: &BTreeSet<VertexId>) -> Vec<BTreeMap<VertexId, VertexId>> {
        let piece = t.induced(set).with_root(None);
        let key = canonical_form(&piece);
        if let Some(m) = self.block.get(&key) {
            return embeddings(m, &piece);
        }
        if self.implicit(t, set) {
            return vec![set.iter().map(|v| (*v, *v)).collect()];
        }
        Vec::new()
    }
}

/// Result of applying an NBH to a representation, with bookkeeping.
#[derive(Clone, Debug)]
pub struct Traced {
    pub net: Net,
    /// Image pieces, bound from the image nets into `net`.
    pub image_pieces: Vec<Piece>,
    /// Result vertex ↦ (piece, subject vertex) for vertex-preserving images.
    pub provenance: BTreeMap<VertexId, (usize, VertexId)>,
    /// Boundary links of each piece, as out-port of the subject.
    pub live: Vec<BTreeSet<Port>>,
    /// Subject links (by out-port) that survive in `net`.
    pub kept: BTreeSet<Port>,
    /// Boundary ports of owned vertices ↦ the image port taking them over.
    pub port_map: BTreeMap<Port, Port>,
}

fn binding_for(h: &Nbh, r: &NuoRepresentation, i: usize) -> Result<BTreeMap<VertexId, VertexId>, MorphismError> {
    let p = &r.pieces[i];
    match &p.binding {
        Some(b) => Ok(b.clone()),
        None => h
            .bindings_on(&r.subject, &p.vertices)
            .into_iter()
            .next()
            .ok_or_else(|| MorphismError::BlockMismatch(format!("piece {i} is not in the block"))),
    }
}

/// Applies `h` to the representation `r`.
pub fn apply_nbh(h: &Nbh, r: &NuoRepresentation) -> Result<Net, MorphismError> {
    Ok(apply_nbh_traced(h, r)?.net)
}

pub fn apply_nbh_traced(h: &Nbh, r: &NuoRepresentation) -> Result<Traced, MorphismError> {
    let t = &r.subject;
    let mut labels: BTreeMap<VertexId, Label> = BTreeMap::new();
    let mut links: BTreeMap<Port, Port> = BTreeMap::new();
    let mut next: VertexId = 0;
    let mut attach: Vec<BTreeMap<String, Port>> = Vec::new();
    let mut letter_of: Vec<BTreeMap<Port, String>> = Vec::new();
    let mut image_pieces = Vec::new();
    let mut provenance = BTreeMap::new();
    for (i, piece) in r.pieces.iter().enumerate() {
        if piece.vertices.is_empty() {
            attach.push(BTreeMap::new());
            letter_of.push(BTreeMap::new());
            image_pieces.push(Piece::new([]));
            continue;
        }
        let (member, image) = h
            .block_for(t, &piece.vertices)
            .ok_or_else(|| MorphismError::BlockMismatch(format!("piece {i} is not in the block")))?;
        let binding = binding_for(h, r, i)?;
        let mut lo = BTreeMap::new();
        for (p, l) in member.dangling() {
            let sv = *binding
                .get(&p.vertex)
                .ok_or_else(|| MorphismError::BlockMismatch(format!("piece {i} binding misses v{}", p.vertex)))?;
            lo.insert(Port::new(sv, p.dir, p.index), l);
        }
        letter_of.push(lo);
        let iface = interface(&image).map_err(|m| MorphismError::Malformed("image".into(), m))?;
        let skip: BTreeSet<VertexId> = image.labels().iter().filter(|(_, l)| l.is_frontier()).map(|(v, _)| *v).collect();
        let mut pasted: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        for (v, l) in image.labels() {
            if skip.contains(v) {
                continue;
            }
            pasted.insert(*v, next);
            labels.insert(next, l.clone());
            next += 1;
        }
        for e in image.edges() {
            if let (Some(a), Some(b)) = (pasted.get(&e.src), pasted.get(&e.tgt)) {
                links.insert(Port::out(*a, e.out), Port::inp(*b, e.inp));
            }
        }
        let mut at = BTreeMap::new();
        for (name, pt) in &iface {
            let bare = pt.frontier == Some(pt.port.vertex);
            let q = (!bare).then(|| Port::new(pasted[&pt.port.vertex], pt.port.dir, pt.port.index));
            match (pt.frontier.is_some(), h.frontier_map.get(name)) {
                (true, Some(frag)) => {
                    let dp = frag
                        .port_with_letter(name)
                        .ok_or_else(|| MorphismError::Malformed(name.clone(), "fragment lacks its letter".into()))?;
                    let mut fm = BTreeMap::new();
                    for (v, l) in frag.labels() {
                        fm.insert(*v, next);
                        labels.insert(next, l.clone());
                        next += 1;
                    }
                    for e in frag.edges() {
                        links.insert(Port::out(fm[&e.src], e.out), Port::inp(fm[&e.tgt], e.inp));
                    }
                    if let Some(q) = q {
                        let d = Port::new(fm[&dp.vertex], dp.dir, dp.index);
                        let (o, n) = if d.dir == crate::net::Dir::Out { (d, q) } else { (q, d) };
                        links.insert(o, n);
                    }
                }
                _ => {
                    if let Some(q) = q {
                        at.insert(name.clone(), q);
                    }
                }
            }
        }
        attach.push(at);
        image_pieces.push(Piece::bound(pasted.values().copied(), pasted.clone()));
        if let Some(iso) = isomorphism(&member, &image) {
            for (mv, iv) in iso {
                provenance.insert(pasted[&iv], (i, binding[&mv]));
            }
        }
    }
    let mut port_map = BTreeMap::new();
    for (i, lo) in letter_of.iter().enumerate() {
        for (p, l) in lo {
            if r.owner(p.vertex) == Some(i) {
                if let Some(q) = attach[i].get(l) {
                    port_map.insert(*p, *q);
                }
            }
        }
    }
    let mut live: Vec<BTreeSet<Port>> = vec![BTreeSet::new(); r.pieces.len()];
    let mut kept = BTreeSet::new();
    for e in t.edges() {
        let (u, w) = (e.src, e.tgt);
        for (i, p) in r.pieces.iter().enumerate() {
            if p.vertices.contains(&u) != p.vertices.contains(&w) {
                live[i].insert(e.from_port());
            }
        }
        if r.pieces.iter().any(|p| p.vertices.contains(&u) && p.vertices.contains(&w)) {
            kept.insert(e.from_port());
            continue;
        }
        let (Some(a), Some(b)) = (r.owner(u), r.owner(w)) else { continue };
        let la = letter_of[a].get(&e.from_port());
        let lb = letter_of[b].get(&e.to_port());
        if let (Some(la), Some(lb)) = (la, lb) {
            if let (Some(pa), Some(pb)) = (attach[a].get(la), attach[b].get(lb)) {
                if pa.dir != pb.dir {
                    let (o, n) = if pa.dir == crate::net::Dir::Out { (*pa, *pb) } else { (*pb, *pa) };
                    links.insert(o, n);
                    kept.insert(e.from_port());
                }
            }
        }
    }
    let mut slots: BTreeMap<Port, Slot> = BTreeMap::new();
    for (o, n) in &links {
        slots.insert(*o, Slot::Linked(*n));
        slots.insert(*n, Slot::Linked(*o));
    }
    for (v, l) in &labels {
        for (d, idx) in l.ports() {
            let p = Port::new(*v, d, idx);
            slots.entry(p).or_insert_with(|| Slot::Free(cut_letter(p)));
        }
    }
    let net = crate::net::assemble(labels, slots, None);
    Ok(Traced { net, image_pieces, provenance, live, kept, port_map })
}

/// Union of the images of `t` over every block partition and binding.
pub fn nbh_image(h: &Nbh, t: &Net) -> Result<Jungle, MorphismError> {
    let mut out = Jungle::new();
    for rep in block_partitions(h, t) {
        out.insert(apply_nbh(h, &rep)?);
    }
    Ok(out)
}

fn piece_checks(tr: &Traced) -> (bool, bool) {
    let mut es = true;
    let mut ls = true;
    for l in &tr.live {
        if l.is_empty() {
            continue;
        }
        let k = l.iter().filter(|p| tr.kept.contains(p)).count();
        if k == 0 {
            es = false;
        }
        if k < l.len() {
            ls = false;
        }
    }
    (es, ls)
}

/// Flags that hold for `h`: alphabetic ones structurally, linkage ones on
/// every block partition (and every overlapping block cover) of `sample`.
pub fn classify_nbh(h: &Nbh, sample: &Jungle) -> Result<BTreeSet<NbhType>, MorphismError> {
    let mut flags = BTreeSet::new();
    let entries = h.entries();
    let alp = h.frontier_map.is_empty()
        && entries.iter().all(|(_, img)| {
            img.len() == 1 && img.labels().values().all(|l| !l.is_frontier()) && img.edges().is_empty()
        });
    if alp {
        flags.insert(NbhType::AlpNBH);
        if entries.iter().all(|(m, img)| img.rank() <= m.rank()) {
            flags.insert(NbhType::AlpUnexNBH);
        }
    }
    let (mut es, mut ls, mut oes, mut ols) = (true, true, true, true);
    for t in sample {
        for rep in block_partitions(h, t) {
            let (e, l) = piece_checks(&apply_nbh_traced(h, &rep)?);
            es &= e;
            ls &= l;
        }
        let k = t.len().min(3);
        for rep in nuo_enumerate(t, k).map_err(|e| MorphismError::BlockMismatch(e.to_string()))? {
            if !rep.is_overlapping() || rep.pieces.iter().any(|p| h.bindings_on(t, &p.vertices).is_empty()) {
                continue;
            }
            let (e, l) = piece_checks(&apply_nbh_traced(h, &rep)?);
            oes &= e;
            ols &= l;
        }
    }
    for (f, b) in [(NbhType::ESNBH, es), (NbhType::LSNBH, ls), (NbhType::OESNBH, oes), (NbhType::OLSNBH, ols)] {
        if b {
            flags.insert(f);
        }
    }
    let nonempty = entries.iter().all(|(_, img)| !img.is_empty()) && h.frontier_map.values().all(|f| !f.is_empty());
    if nonempty && es {
        flags.insert(NbhType::ANBH);
        if ls {
            flags.insert(NbhType::SANBH);
        }
    }
    Ok(flags)
}

/// The reverse block homomorphism of an ANBH whose block map is injective
/// and whose images keep every block letter.
pub fn invert_anbh(h: &Nbh) -> Result<Nbh, MorphismError> {
    if !h.type_flags.contains(&NbhType::ANBH) {
        return Err(MorphismError::NotANBH);
    }
    if !h.frontier_map.is_empty() {
        return Err(MorphismError::NotReversible("frontier fragments cannot be undone".into()));
    }
    let mut f = Nbh::default();
    let mut seen: BTreeMap<Vec<u8>, &Net> = BTreeMap::new();
    for (m, img) in h.entries() {
        if img.labels().values().any(|l| l.is_frontier()) {
            return Err(MorphismError::NotReversible("image holds a frontier vertex".into()));
        }
        let have: BTreeSet<String> = img.dangling().into_iter().map(|(_, l)| l).collect();
        if let Some((_, l)) = m.dangling().into_iter().find(|(_, l)| !have.contains(l)) {
            return Err(MorphismError::NotReversible(format!("image drops letter `{l}`")));
        }
        if let Some(prev) = seen.insert(canonical_form(img), m) {
            return Err(MorphismError::NotReversible(format!(
                "blocks {:?} and {:?} share an image",
                prev.symbols(),
                m.symbols()
            )));
        }
        f.add(img.clone(), m.clone())?;
    }
    for (m, img) in h.entries() {
        if img.symbols().iter().any(|s| !h.block_symbols().contains(s) && m.symbols().contains(s)) {
            return Err(MorphismError::NotReversible("image letters collide with the source".into()));
        }
    }
    let flags = classify_nbh(&f, &Jungle::new())?;
    Ok(f.with_flags(flags))
}

/// Image representation of a traced application, ready for the inverse.
pub fn image_representation(tr: &Traced) -> NuoRepresentation {
    NuoRepresentation { subject: tr.net.clone(), pieces: tr.image_pieces.clone() }
}

/// Links gained by duplicating the common part of the cover members `q`:
/// ports carried by the image copies of that part beyond its own rank.
pub fn new_link_count(
    h: &Nbh,
    t: &Net,
    cover: &[BTreeSet<VertexId>],
    q: &[usize],
) -> Result<usize, MorphismError> {
    let mut inter: Option<BTreeSet<VertexId>> = None;
    for &i in q {
        let s = cover.get(i).ok_or_else(|| MorphismError::BlockMismatch(format!("no cover member {i}")))?;
        inter = Some(match inter {
            None => s.clone(),
            Some(x) => x.intersection(s).copied().collect(),
        });
    }
    let inter = inter.unwrap_or_default();
    if inter.is_empty() {
        return Err(MorphismError::EmptyIntersection);
    }
    for (m, img) in h.entries() {
        if !is_isomorphic(m, img) {
            return Err(MorphismError::BlockMismatch("image does not preserve the block".into()));
        }
    }
    let rep = NuoRepresentation { subject: t.clone(), pieces: cover.iter().map(|s| Piece::new(s.iter().copied())).collect() };
    let tr = apply_nbh_traced(h, &rep)?;
    let qs: BTreeSet<usize> = q.iter().copied().collect();
    let mut copies = 0;
    for (rv, (piece, sv)) in &tr.provenance {
        if qs.contains(piece) && inter.contains(sv) {
            copies += tr.net.ports_of(*rv).len();
        }
    }
    let own = t.induced(&inter).port_count();
    Ok(copies - own)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{NetBuilder, RankedSymbol};

    fn sym(n: &str) -> RankedSymbol {
        RankedSymbol::simple(n, 1, 1)
    }

    fn lettered(n: &str) -> Net {
        NetBuilder::new().vertex(0, sym(n)).free(Port::inp(0, 1), "i").free(Port::out(0, 1), "o").build().unwrap()
    }

    fn chain(a: &str, b: &str) -> Net {
        NetBuilder::new().vertex(0, sym(a)).vertex(1, sym(b)).edge(0, 1, 1, 1).build().unwrap()
    }

    fn relabel() -> Nbh {
        Nbh::new(vec![(lettered("a"), lettered("x")), (lettered("b"), lettered("y"))]).unwrap()
    }

    #[test]
    fn alphabetic_flags() {
        let f = classify_nbh(&relabel(), &Jungle::singleton(chain("a", "b"))).unwrap();
        for t in [NbhType::AlpNBH, NbhType::AlpUnexNBH, NbhType::ESNBH, NbhType::LSNBH, NbhType::ANBH, NbhType::SANBH] {
            assert!(f.contains(&t), "{t}");
        }
    }

    #[test]
    fn two_block_relabel_image() {
        let img = nbh_image(&relabel(), &chain("a", "b")).unwrap();
        assert_eq!(img, Jungle::singleton(chain("x", "y")));
    }

    #[test]
    fn deleting_context_is_not_anbh() {
        let h = Nbh::new(vec![(lettered("a"), Net::empty()), (lettered("b"), lettered("y"))]).unwrap();
        let f = classify_nbh(&h, &Jungle::singleton(chain("a", "b"))).unwrap();
        assert!(!f.contains(&NbhType::ANBH));
    }

    #[test]
    fn dropping_a_linkage_loses_ls() {
        let x = NetBuilder::new().vertex(0, sym("x")).free(Port::inp(0, 1), "i").build().unwrap();
        let h = Nbh::new(vec![(lettered("a"), x), (lettered("b"), lettered("y"))]).unwrap();
        let f = classify_nbh(&h, &Jungle::singleton(chain("a", "b"))).unwrap();
        assert!(!f.contains(&NbhType::LSNBH));
    }

    #[test]
    fn identity_on_partitions() {
        let t = chain("a", "b");
        for rep in block_partitions(&Nbh::identity(), &t) {
            assert_eq!(canonical_form(&apply_nbh(&Nbh::identity(), &rep).unwrap()), canonical_form(&t));
        }
    }

    #[test]
    fn inverse_round_trip() {
        let mut h = relabel();
        h.type_flags = classify_nbh(&h, &Jungle::singleton(chain("a", "b"))).unwrap();
        let f = invert_anbh(&h).unwrap();
        let t = chain("a", "b");
        for rep in block_partitions(&h, &t) {
            let tr = apply_nbh_traced(&h, &rep).unwrap();
            let back = apply_nbh(&f, &image_representation(&tr)).unwrap();
            assert_eq!(canonical_form(&back), canonical_form(&t));
        }
    }

    #[test]
    fn shared_image_is_not_reversible() {
        let mut h = Nbh::new(vec![(lettered("a"), lettered("x")), (lettered("b"), lettered("x"))]).unwrap();
        h.type_flags.insert(NbhType::ANBH);
        assert!(matches!(invert_anbh(&h), Err(MorphismError::NotReversible(_))));
        assert!(matches!(invert_anbh(&Nbh::identity()), Err(MorphismError::NotANBH)));
    }

    #[test]
    fn new_links_of_a_duplicated_vertex() {
        let t = chain("a", "b");
        let h = Nbh::new(vec![
            (lettered("a"), lettered("x")),
            (lettered("b"), lettered("y")),
            (
                NetBuilder::new()
                    .vertex(0, sym("a"))
                    .vertex(1, sym("b"))
                    .edge(0, 1, 1, 1)
                    .free(Port::inp(0, 1), "i")
                    .free(Port::out(1, 1), "o")
                    .build()
                    .unwrap(),
                NetBuilder::new()
                    .vertex(0, sym("x"))
                    .vertex(1, sym("y"))
                    .edge(0, 1, 1, 1)
                    .free(Port::inp(0, 1), "i")
                    .free(Port::out(1, 1), "o")
                    .build()
                    .unwrap(),
            ),
        ])
        .unwrap();
        let cover = vec![BTreeSet::from([0, 1]), BTreeSet::from([1])];
        assert_eq!(new_link_count(&h, &t, &cover, &[0]).unwrap(), 0);
        assert_eq!(new_link_count(&h, &t, &cover, &[0, 1]).unwrap(), 2);
    }
}
