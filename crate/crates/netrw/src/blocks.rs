//! Overlapping representations of nets and the bridges between block
//! homomorphisms and renetting systems.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::morphism::{MorphismError, Nbh};
use crate::net::{connected_subsets, Net, NetError, Port, Slot, VertexId};
use crate::rewrite::RewriteError;

mod compile;
mod micro;

pub use compile::*;
pub use micro::*;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlocksError {
    #[error("representation enumeration exceeded the bound of {0}")]
    BudgetExceeded(usize),
    #[error("inconsistent occupancy: {0}")]
    InconsistentOccupancy(String),
    #[error("block image of `{0}` contains its own letter")]
    InfiniteBlock(String),
    #[error("no induced preimage within budget: {0}")]
    NoInducedPreimage(String),
    #[error(transparent)]
    Morphism(#[from] MorphismError),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Net(#[from] NetError),
}

/// One member of a representation: a vertex set of the subject, optionally
/// with the way a block net sits on it (block vertex ↦ subject vertex).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Piece {
    pub vertices: BTreeSet<VertexId>,
    pub binding: Option<BTreeMap<VertexId, VertexId>>,
}

impl Piece {
    pub fn new(vertices: impl IntoIterator<Item = VertexId>) -> Self {
        Piece { vertices: vertices.into_iter().collect(), binding: None }
    }

    pub fn bound(vertices: impl IntoIterator<Item = VertexId>, binding: BTreeMap<VertexId, VertexId>) -> Self {
        Piece { vertices: vertices.into_iter().collect(), binding: Some(binding) }
    }
}

/// A net presented as a context (`pieces[0]`) plus attached, possibly
/// overlapping subnets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NuoRepresentation {
    pub subject: Net,
    pub pieces: Vec<Piece>,
}

impl NuoRepresentation {
    pub fn trivial(t: &Net) -> Self {
        NuoRepresentation { subject: t.clone(), pieces: vec![Piece::new(t.vertex_ids())] }
    }

    pub fn context(&self) -> &Piece {
        &self.pieces[0]
    }

    /// Induced subnet of each piece.
    pub fn piece_nets(&self) -> Vec<Net> {
        self.pieces.iter().map(|p| self.subject.induced(&p.vertices).with_root(None)).collect()
    }

    pub fn is_overlapping(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.pieces.iter().flat_map(|p| p.vertices.iter()).any(|v| !seen.insert(*v))
    }

    /// The block: the distinct piece nets.
    pub fn block(&self) -> crate::net::Jungle {
        self.piece_nets().into_iter().filter(|n| !n.is_empty()).collect()
    }

    /// First piece containing `v`.
    pub fn owner(&self, v: VertexId) -> Option<usize> {
        self.pieces.iter().position(|p| p.vertices.contains(&v))
    }

    pub fn check(&self) -> Result<(), BlocksError> {
        let all: BTreeSet<VertexId> = self.subject.vertex_ids().collect();
        let mut covered = BTreeSet::new();
        for (i, p) in self.pieces.iter().enumerate() {
            for v in &p.vertices {
                if !all.contains(v) {
                    return Err(BlocksError::InconsistentOccupancy(format!("piece {i} occupies unknown vertex v{v}")));
                }
                covered.insert(*v);
            }
            if let Some(b) = &p.binding {
                let img: BTreeSet<VertexId> = b.values().copied().collect();
                if img != p.vertices {
                    return Err(BlocksError::InconsistentOccupancy(format!("piece {i} binding does not cover it")));
                }
            }
        }
        if covered != all {
            return Err(BlocksError::InconsistentOccupancy("pieces do not cover the subject".into()));
        }
        Ok(())
    }
}

pub const DEFAULT_COVER_LIMIT: usize = 100_000;

/// One representation per cover of `t` by at most `max_blocks` pieces. A
/// piece is a connected vertex set or the whole vertex set; the largest
/// piece is the context.
pub fn nuo_enumerate(t: &Net, max_blocks: usize) -> Result<Vec<NuoRepresentation>, BlocksError> {
    nuo_enumerate_bounded(t, max_blocks, DEFAULT_COVER_LIMIT)
}

pub fn nuo_enumerate_bounded(t: &Net, max_blocks: usize, limit: usize) -> Result<Vec<NuoRepresentation>, BlocksError> {
    let mut subsets: BTreeSet<BTreeSet<VertexId>> =
        connected_subsets(t, limit).map_err(|_| BlocksError::BudgetExceeded(limit))?;
    let all: BTreeSet<VertexId> = t.vertex_ids().collect();
    if all.is_empty() {
        return Ok(vec![NuoRepresentation::trivial(t)]);
    }
    subsets.insert(all.clone());
    let mut ordered: Vec<BTreeSet<VertexId>> = subsets.into_iter().collect();
    ordered.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    fn go(
        ordered: &[BTreeSet<VertexId>],
        all: &BTreeSet<VertexId>,
        start: usize,
        max: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        limit: usize,
    ) -> Result<(), BlocksError> {
        if !cur.is_empty() {
            let cov: BTreeSet<VertexId> = cur.iter().flat_map(|&i| ordered[i].iter().copied()).collect();
            if &cov == all {
                if out.len() >= limit {
                    return Err(BlocksError::BudgetExceeded(limit));
                }
                out.push(cur.clone());
            }
        }
        if cur.len() == max {
            return Ok(());
        }
        for i in start..ordered.len() {
            cur.push(i);
            go(ordered, all, i + 1, max, cur, out, limit)?;
            cur.pop();
        }
        Ok(())
    }
    let mut covers = Vec::new();
    go(&ordered, &all, 0, max_blocks, &mut cur, &mut covers, limit)?;
    for c in covers {
        out.push(NuoRepresentation {
            subject: t.clone(),
            pieces: c.iter().map(|&i| Piece::new(ordered[i].iter().copied())).collect(),
        });
    }
    Ok(out)
}

/// Reassembles the subject from the piece nets and the boundary links.
pub fn nuo_invert(r: &NuoRepresentation) -> Result<Net, BlocksError> {
    r.check()?;
    let mut labels = BTreeMap::new();
    let mut slots: BTreeMap<Port, Slot> = BTreeMap::new();
    for (i, p) in r.pieces.iter().enumerate() {
        let n = r.subject.induced(&p.vertices);
        for (v, l) in n.labels() {
            if let Some(prev) = labels.insert(*v, l.clone()) {
                if &prev != l {
                    return Err(BlocksError::InconsistentOccupancy(format!("piece {i} relabels v{v}")));
                }
            }
        }
        for (port, s) in n.slots() {
            match s {
                Slot::Linked(_) => {
                    slots.insert(*port, s.clone());
                }
                Slot::Free(_) => {
                    slots.entry(*port).or_insert_with(|| match r.subject.slot(*port) {
                        Some(x) => x.clone(),
                        None => s.clone(),
                    });
                }
            }
        }
    }
    let dangling: Vec<(Port, String)> = slots
        .iter()
        .filter_map(|(p, s)| match s {
            Slot::Free(l) => Some((*p, l.clone())),
            _ => None,
        })
        .collect();
    let edges: Vec<crate::net::Edge> = slots
        .iter()
        .filter_map(|(p, s)| match (p.dir, s) {
            (crate::net::Dir::Out, Slot::Linked(q)) => Some(crate::net::Edge::new(p.vertex, p.index, q.vertex, q.index)),
            _ => None,
        })
        .collect();
    Net::build(labels, edges, dangling, r.subject.root())
        .map_err(|e| BlocksError::InconsistentOccupancy(e.to_string()))
}

/// Removes overlaps: the context loses everything covered by an
/// attachment, and each attachment loses what earlier attachments cover.
pub fn nornuo(r: &NuoRepresentation) -> NuoRepresentation {
    let mut taken: BTreeSet<VertexId> = BTreeSet::new();
    let mut pieces = vec![Piece::new([])];
    for p in r.pieces.iter().skip(1) {
        let rest: BTreeSet<VertexId> = p.vertices.difference(&taken).copied().collect();
        taken.extend(rest.iter().copied());
        if rest.is_empty() {
            continue;
        }
        let binding = if rest == p.vertices { p.binding.clone() } else { None };
        pieces.push(Piece { vertices: rest, binding });
    }
    let ctx = &r.pieces[0];
    let ctx_rest: BTreeSet<VertexId> = ctx.vertices.difference(&taken).copied().collect();
    let binding = if ctx_rest == ctx.vertices { ctx.binding.clone() } else { None };
    pieces[0] = Piece { vertices: ctx_rest, binding };
    NuoRepresentation { subject: r.subject.clone(), pieces }
}

/// All partitions of `t` into pieces accepted by `h`, with every binding of
/// each block member.
pub fn block_partitions(h: &Nbh, t: &Net) -> Vec<NuoRepresentation> {
    let verts: Vec<VertexId> = t.vertex_ids().collect();
    let mut out = Vec::new();
    let mut chosen: Vec<Piece> = Vec::new();
    fn go(h: &Nbh, t: &Net, verts: &[VertexId], taken: &BTreeSet<VertexId>, chosen: &mut Vec<Piece>, out: &mut Vec<NuoRepresentation>) {
        let Some(&v) = verts.iter().find(|v| !taken.contains(v)) else {
            out.push(NuoRepresentation { subject: t.clone(), pieces: chosen.clone() });
            return;
        };
        let free: BTreeSet<VertexId> = verts.iter().copied().filter(|u| !taken.contains(u)).collect();
        for set in pieces_through(t, v, &free, h.max_block_size().max(1)) {
            for binding in h.bindings_on(t, &set) {
                let mut tk = taken.clone();
                tk.extend(set.iter().copied());
                chosen.push(Piece { vertices: set.clone(), binding: Some(binding) });
                go(h, t, verts, &tk, chosen, out);
                chosen.pop();
            }
        }
    }
    go(h, t, &verts, &BTreeSet::new(), &mut chosen, &mut out);
    if out.is_empty() {
        return out;
    }
    for r in &mut out {
        if r.pieces.is_empty() {
            r.pieces.push(Piece::new([]));
        }
    }
    out
}

/// Connected vertex sets inside `free` that contain `v`, up to `max` vertices.
fn pieces_through(t: &Net, v: VertexId, free: &BTreeSet<VertexId>, max: usize) -> Vec<BTreeSet<VertexId>> {
    let mut found: BTreeSet<BTreeSet<VertexId>> = BTreeSet::new();
    let mut stack = vec![BTreeSet::from([v])];
    while let Some(s) = stack.pop() {
        if !found.insert(s.clone()) || s.len() == max {
            continue;
        }
        for u in s.iter().flat_map(|x| t.neighbours(*x)) {
            if free.contains(&u) && !s.contains(&u) {
                let mut n = s.clone();
                n.insert(u);
                if !found.contains(&n) {
                    stack.push(n);
                }
            }
        }
    }
    found.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{canonical_form, NetBuilder, RankedSymbol};

    fn chain() -> Net {
        let a = RankedSymbol::simple("a", 1, 1);
        let b = RankedSymbol::simple("b", 1, 1);
        NetBuilder::new().vertex(0, a).vertex(1, b).edge(0, 1, 1, 1).build().unwrap()
    }

    #[test]
    fn single_vertex_has_only_trivial() {
        let t = NetBuilder::new().vertex(0, RankedSymbol::simple("a", 1, 1)).build().unwrap();
        let reps = nuo_enumerate(&t, 4).unwrap();
        assert_eq!(reps, vec![NuoRepresentation::trivial(&t)]);
    }

    #[test]
    fn chain_covers() {
        let reps = nuo_enumerate(&chain(), 3).unwrap();
        assert_eq!(reps.len(), 5);
        assert_eq!(nuo_enumerate(&chain(), 1).unwrap().len(), 1);
    }

    #[test]
    fn invert_round_trip() {
        let t = chain();
        for r in nuo_enumerate(&t, 3).unwrap() {
            assert_eq!(canonical_form(&nuo_invert(&r).unwrap()), canonical_form(&t));
            assert_eq!(canonical_form(&nuo_invert(&nornuo(&r)).unwrap()), canonical_form(&t));
            assert!(!nornuo(&r).is_overlapping());
        }
    }

    #[test]
    fn corrupted_occupancy() {
        let mut r = NuoRepresentation::trivial(&chain());
        r.pieces[0].vertices.insert(9);
        assert!(matches!(nuo_invert(&r), Err(BlocksError::InconsistentOccupancy(_))));
    }

    #[test]
    fn full_overlap_leaves_empty_context() {
        let t = chain();
        let r = NuoRepresentation { subject: t.clone(), pieces: vec![Piece::new([0, 1]), Piece::new([0, 1])] };
        let n = nornuo(&r);
        assert!(n.context().vertices.is_empty());
        assert_eq!(canonical_form(&nuo_invert(&n).unwrap()), canonical_form(&t));
    }
}
