use std::collections::{BTreeMap, BTreeSet};

use super::{block_partitions, BlocksError, NuoRepresentation, Piece};
use crate::morphism::{apply_nbh, apply_nbh_traced, classify_nbh, relabel_ports, MorphismError, Nbh, NbhType, Traced};
use crate::net::{Dir, Jungle, Label, Net, Port, RankedSymbol, Slot, VertexId};
use crate::rewrite::{interface, matches_of, replace, Budget, MatchRecord, RulePreform};

/// A rule lifted below two alphabetic abstractions of one net, together
/// with everything needed to replay both commuting squares.
#[derive(Clone, Debug)]
pub struct MicroMacro {
    pub rule: RulePreform,
    pub origin: Net,
    pub w1: Nbh,
    pub w2: Nbh,
    pub s: NuoRepresentation,
    pub t: NuoRepresentation,
    /// Common refinement of `s` and `t`.
    pub refinement: NuoRepresentation,
    /// Vertices of the origin under the redex.
    pub region: BTreeSet<VertexId>,
    /// The redex of `rule` in the image of `s`.
    pub anchor: MatchRecord,
    pub micro: RulePreform,
    pub macro_rules: (RulePreform, RulePreform),
    pub w_o1: Nbh,
    pub w3: Nbh,
    pub w_o2: Nbh,
    refined_region: BTreeSet<VertexId>,
}

/// Both composite paths of each square.
#[derive(Clone, Debug)]
pub struct Squares {
    pub first: (Jungle, Jungle),
    pub second: (Jungle, Jungle),
}

impl Squares {
    pub fn closes(&self) -> bool {
        self.first.0 == self.first.1 && self.second.0 == self.second.1
    }
}

fn no_preimage(m: impl Into<String>) -> BlocksError {
    BlocksError::NoInducedPreimage(m.into())
}

fn fresh(base: &str, taken: &BTreeSet<String>) -> String {
    let mut s = format!("{base}'");
    while taken.contains(&s) {
        s.push('\'');
    }
    s
}

/// Single vertex labelled `sym` with every port free and lettered.
fn lettered_vertex(sym: &RankedSymbol) -> Net {
    let label = Label::Symbol(sym.clone());
    let dangling: Vec<(Port, String)> = label
        .ports()
        .into_iter()
        .map(|(d, i)| (Port::new(0, d, i), format!("{}{i}", if d == Dir::In { "i" } else { "o" })))
        .collect();
    Net::build(BTreeMap::from([(0, label)]), Vec::new(), dangling, None).expect("single vertex")
}

fn boundary(k: &Net, region: &BTreeSet<VertexId>) -> Vec<Port> {
    k.slots()
        .iter()
        .filter(|(p, s)| {
            region.contains(&p.vertex)
                && match s {
                    Slot::Free(_) => true,
                    Slot::Linked(q) => !region.contains(&q.vertex),
                }
        })
        .map(|(p, _)| *p)
        .collect()
}

/// Common refinement: connected parts of the pairwise intersections.
fn refine(k: &Net, s: &NuoRepresentation, t: &NuoRepresentation) -> NuoRepresentation {
    let mut pieces = Vec::new();
    for p in &s.pieces {
        for q in &t.pieces {
            let common: BTreeSet<VertexId> = p.vertices.intersection(&q.vertices).copied().collect();
            if common.is_empty() {
                continue;
            }
            for c in k.induced(&common).components() {
                pieces.push(Piece::new(c));
            }
        }
    }
    NuoRepresentation { subject: k.clone(), pieces }
}

/// Alphabetic homomorphism sending each piece of `u` to a fresh symbol that
/// keeps all of the piece's free ports.
fn contraction(u: &NuoRepresentation, taken: &mut BTreeSet<String>) -> Result<Nbh, BlocksError> {
    let mut h = Nbh::identity();
    for p in &u.pieces {
        let member = u.subject.induced(&p.vertices).with_root(None);
        if h.block.contains(&member) {
            continue;
        }
        let dangling = member.dangling();
        let ins: Vec<&(Port, String)> = dangling.iter().filter(|(q, _)| q.dir == Dir::In).collect();
        let outs: Vec<&(Port, String)> = dangling.iter().filter(|(q, _)| q.dir == Dir::Out).collect();
        let name = fresh(&format!("w{}", h.block.len()), taken);
        taken.insert(name.clone());
        let sym = RankedSymbol::simple(name, ins.len() as u32, outs.len() as u32);
        let mut free = Vec::new();
        for (i, (_, l)) in ins.iter().enumerate() {
            free.push((Port::inp(0, i as u32 + 1), l.clone()));
        }
        for (i, (_, l)) in outs.iter().enumerate() {
            free.push((Port::out(0, i as u32 + 1), l.clone()));
        }
        let image = Net::build(BTreeMap::from([(0, Label::Symbol(sym))]), Vec::new(), free, None)?;
        h.add(member, image)?;
    }
    Ok(h)
}

fn require_alphabetic(w: &Nbh, k: &Net) -> Result<(), BlocksError> {
    let flags = classify_nbh(w, &Jungle::singleton(k.clone()))?;
    if flags.contains(&NbhType::AlpNBH) && flags.contains(&NbhType::ANBH) {
        Ok(())
    } else {
        Err(MorphismError::NotANBH.into())
    }
}

/// Lifts `r` below `w1` and builds its two-rule macro through the common
/// refinement of the first block partitions of `k` under `w1` and `w2`.
pub fn micro_macro(r: &RulePreform, k: &Net, w1: &Nbh, w2: &Nbh) -> Result<MicroMacro, BlocksError> {
    let s = block_partitions(w1, k).into_iter().next().ok_or_else(|| no_preimage("origin has no partition under w1"))?;
    let t = block_partitions(w2, k).into_iter().next().ok_or_else(|| no_preimage("origin has no partition under w2"))?;
    micro_macro_with(r, s, t, w1, w2, Budget::default())
}

pub fn micro_macro_with(
    r: &RulePreform,
    s: NuoRepresentation,
    t: NuoRepresentation,
    w1: &Nbh,
    w2: &Nbh,
    budget: Budget,
) -> Result<MicroMacro, BlocksError> {
    let k = s.subject.clone();
    require_alphabetic(w1, &k)?;
    require_alphabetic(w2, &k)?;
    if !r.left.frontier_letters().is_empty() || !r.right.frontier_letters().is_empty() || !r.right_subs.is_empty() {
        return Err(no_preimage(format!("rule `{}` carries frontier letters", r.name)));
    }
    let tr_s = apply_nbh_traced(w1, &s)?;
    let a = &tr_s.net;
    let (anchor, region) = matches_of(r, a)?
        .into_iter()
        .find_map(|m| aligned_region(&tr_s, &s, &m).map(|reg| (m, reg)))
        .ok_or_else(|| no_preimage(format!("rule `{}` has no aligned redex", r.name)))?;
    if region.len() > budget.max_net_size {
        return Err(no_preimage(format!("preimage of `{}` exceeds {} vertices", r.name, budget.max_net_size)));
    }

    // interface names of the region's boundary ports
    let iface = interface(&r.left).map_err(no_preimage)?;
    let by_port: BTreeMap<Port, String> = iface
        .iter()
        .map(|(n, pt)| (Port::new(anchor.vertex_map[&pt.port.vertex], pt.port.dir, pt.port.index), n.clone()))
        .collect();
    let mut names: Vec<(Port, String)> = Vec::new();
    for (j, p) in boundary(&k, &region).into_iter().enumerate() {
        let n = tr_s.port_map.get(&p).and_then(|q| by_port.get(q)).cloned();
        names.push((p, n.unwrap_or_else(|| format!("k{j}"))));
    }

    let mut taken: BTreeSet<String> = k.symbols();
    taken.extend(w1.block_symbols());
    taken.extend(w2.block_symbols());
    taken.extend(r.left.symbols());
    taken.extend(r.right.symbols());
    let mut primed: BTreeMap<String, String> = BTreeMap::new();
    for sym in r.right.symbols() {
        let p = fresh(&sym, &taken);
        taken.insert(p.clone());
        primed.insert(sym, p);
    }
    let micro_left = relabel_ports(&k.induced(&region).with_root(None), &names);
    let micro_right = r.right.rename_symbols(&primed).with_root(None);
    let micro = RulePreform::simple(format!("micro-{}", r.name), micro_left, micro_right)?;

    let mut back = Vec::new();
    for l in r.right.labels().values() {
        if let Label::Symbol(sym) = l {
            let mut p = sym.clone();
            p.name = primed[&sym.name].clone();
            back.push((lettered_vertex(&p), lettered_vertex(sym)));
        }
    }
    let extend = |base: &Nbh| -> Result<Nbh, BlocksError> {
        let mut h = base.clone();
        for (m, img) in &back {
            if !h.block.contains(m) {
                h.add(m.clone(), img.clone())?;
            }
        }
        Ok(h)
    };
    let w_o1 = extend(w1)?;

    let u = refine(&k, &s, &t);
    let w3 = contraction(&u, &mut taken)?;
    let w_o2 = extend(&w3)?;
    let tr_u = apply_nbh_traced(&w3, &u)?;
    let b = apply_nbh(w2, &t)?;
    let r1 = RulePreform::simple(format!("macro1-{}", r.name), b, tr_u.net.clone())?;
    let refined_region: BTreeSet<VertexId> = tr_u
        .image_pieces
        .iter()
        .zip(&u.pieces)
        .filter(|(_, p)| p.vertices.is_subset(&region))
        .flat_map(|(ip, _)| ip.vertices.iter().copied())
        .collect();
    let fix: Vec<(Port, String)> =
        names.iter().filter_map(|(p, n)| tr_u.port_map.get(p).map(|c| (*c, n.clone()))).collect();
    let r2_left = relabel_ports(&tr_u.net.induced(&refined_region), &fix);
    let r2 = RulePreform::simple(format!("macro2-{}", r.name), r2_left, r.right.with_root(None))?;

    Ok(MicroMacro {
        rule: r.clone(),
        origin: k,
        w1: w1.clone(),
        w2: w2.clone(),
        s,
        t,
        refinement: u,
        region,
        anchor,
        micro,
        macro_rules: (r1, r2),
        w_o1,
        w3,
        w_o2,
        refined_region,
    })
}

/// Origin vertices under the redex `m`, when the redex is a union of image
/// pieces.
fn aligned_region(tr: &Traced, s: &NuoRepresentation, m: &MatchRecord) -> Option<BTreeSet<VertexId>> {
    let occ = m.occurrence();
    let mut region = BTreeSet::new();
    let mut covered = BTreeSet::new();
    for (ip, p) in tr.image_pieces.iter().zip(&s.pieces) {
        if ip.vertices.is_empty() || ip.vertices.is_disjoint(&occ) {
            continue;
        }
        if !ip.vertices.is_subset(&occ) {
            return None;
        }
        covered.extend(ip.vertices.iter().copied());
        region.extend(p.vertices.iter().copied());
    }
    (covered == occ && !region.is_empty()).then_some(region)
}

impl MicroMacro {
    fn micro_result(&self) -> Result<(Net, BTreeSet<VertexId>), BlocksError> {
        let m = matches_of(&self.micro, &self.origin)?
            .into_iter()
            .find(|m| m.vertex_map.iter().all(|(a, b)| a == b))
            .ok_or_else(|| no_preimage("micro rule lost its redex"))?;
        let rep = replace(&self.origin, &self.micro, &m, None, true)?;
        Ok((rep.net, rep.right_map.values().copied().collect()))
    }

    fn lifted(&self, net: &Net, pieces: &NuoRepresentation, fresh: &BTreeSet<VertexId>, h: &Nbh) -> Result<Net, BlocksError> {
        let mut kept: Vec<Piece> = pieces
            .pieces
            .iter()
            .filter(|p| !p.vertices.is_empty() && p.vertices.is_disjoint(&self.region))
            .cloned()
            .collect();
        kept.extend(fresh.iter().map(|v| Piece::new([*v])));
        if kept.is_empty() {
            kept.push(Piece::new([]));
        }
        Ok(apply_nbh(h, &NuoRepresentation { subject: net.clone(), pieces: kept })?)
    }

    /// Computes both paths of both squares.
    pub fn squares(&self) -> Result<Squares, BlocksError> {
        let a = apply_nbh(&self.w1, &self.s)?;
        let top = replace(&a, &self.rule, &self.anchor, None, false)?.net;
        let (k1, fresh) = self.micro_result()?;
        let bottom = self.lifted(&k1, &self.s, &fresh, &self.w_o1)?;

        let (r1, r2) = &self.macro_rules;
        let b = apply_nbh(&self.w2, &self.t)?;
        let m1 = matches_of(r1, &b)?.into_iter().next().ok_or_else(|| no_preimage("first macro rule does not match"))?;
        let step1 = replace(&b, r1, &m1, None, false)?;
        let want: BTreeMap<VertexId, VertexId> = self.refined_region.iter().map(|v| (*v, step1.right_map[v])).collect();
        let m2 = matches_of(r2, &step1.net)?
            .into_iter()
            .find(|m| m.vertex_map == want)
            .ok_or_else(|| no_preimage("second macro rule lost its redex"))?;
        let macro_path = replace(&step1.net, r2, &m2, None, true)?.net;
        let lifted = self.lifted(&k1, &self.refinement, &fresh, &self.w_o2)?;
        Ok(Squares {
            first: (Jungle::singleton(top), Jungle::singleton(bottom)),
            second: (Jungle::singleton(macro_path), Jungle::singleton(lifted)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::NetBuilder;

    fn sym(n: &str) -> RankedSymbol {
        RankedSymbol::simple(n, 1, 1)
    }

    fn lettered(n: &str) -> Net {
        lettered_vertex(&sym(n))
    }

    fn chain() -> Net {
        NetBuilder::new().vertex(0, sym("a")).vertex(1, sym("b")).edge(0, 1, 1, 1).build().unwrap()
    }

    fn relabel(pairs: &[(&str, &str)]) -> Nbh {
        Nbh::new(pairs.iter().map(|(a, b)| (lettered(a), lettered(b))).collect()).unwrap()
    }

    #[test]
    fn identity_abstractions() {
        let r = RulePreform::simple("r", lettered("a"), lettered("c")).unwrap();
        let mm = micro_macro(&r, &chain(), &Nbh::identity(), &Nbh::identity()).unwrap();
        assert!(crate::net::is_isomorphic(&mm.micro.left, &r.left));
        assert!(mm.squares().unwrap().closes());
    }

    #[test]
    fn relabeled_squares_close() {
        let r = RulePreform::simple("r", lettered("x"), lettered("z")).unwrap();
        let w1 = relabel(&[("a", "x"), ("b", "y")]);
        let w2 = relabel(&[("a", "p"), ("b", "q")]);
        let mm = micro_macro(&r, &chain(), &w1, &w2).unwrap();
        let sq = mm.squares().unwrap();
        assert!(sq.closes(), "{sq:?}");
    }

    #[test]
    fn unmatched_rule_has_no_preimage() {
        let r = RulePreform::simple("r", lettered("q"), lettered("z")).unwrap();
        let w1 = relabel(&[("a", "x"), ("b", "y")]);
        assert!(matches!(micro_macro(&r, &chain(), &w1, &w1), Err(BlocksError::NoInducedPreimage(_))));
    }
}
