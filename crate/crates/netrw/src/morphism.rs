//! Net homomorphisms, net substitutions and net block homomorphisms.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::net::{net_union, Dir, Jungle, Label, Net, NetError, PartPort, Port, Slot, VertexId};

mod nbh;

pub use nbh::*;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorphismError {
    #[error("no image for `{0}`")]
    DomainGap(String),
    #[error("image enumeration exceeded the bound of {0}")]
    BudgetExceeded(usize),
    #[error("malformed map entry for `{0}`: {1}")]
    Malformed(String, String),
    #[error("block mismatch: {0}")]
    BlockMismatch(String),
    #[error("homomorphism is not an ANBH")]
    NotANBH,
    #[error("block map is not reversible: {0}")]
    NotReversible(String),
    #[error("empty intersection")]
    EmptyIntersection,
    #[error(transparent)]
    Net(#[from] NetError),
}

/// Frontier letters mapped to fragments. A fragment for `x` attaches through
/// its unique free port lettered `x`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct NetSubstitution {
    pub map: BTreeMap<String, Net>,
}

impl NetSubstitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, x: impl Into<String>, fragment: Net) -> Self {
        self.map.insert(x.into(), fragment);
        self
    }

    pub fn domain(&self) -> BTreeSet<String> {
        self.map.keys().cloned().collect()
    }

    pub fn get(&self, x: &str) -> Option<&Net> {
        self.map.get(x)
    }

    /// The port through which fragment `x` attaches.
    pub fn designated(&self, x: &str) -> Option<Port> {
        self.map.get(x).and_then(|n| n.port_with_letter(x))
    }

    /// Checks that every fragment has exactly one free port lettered by its
    /// key.
    pub fn validate(&self) -> Result<(), MorphismError> {
        for (x, n) in &self.map {
            if n.port_with_letter(x).is_none() {
                return Err(MorphismError::Malformed(x.clone(), "fragment needs one free port carrying its letter".into()));
            }
        }
        Ok(())
    }
}

/// Replaces each frontier vertex of `t` by its fragment, glued at the
/// fragment's designated port. Ranked vertices are untouched.
pub fn apply_substitution(f: &NetSubstitution, t: &Net) -> Result<Net, MorphismError> {
    let mut cur = t.clone();
    let frontier: Vec<(VertexId, String, Dir)> = t
        .labels()
        .iter()
        .filter_map(|(v, l)| match l {
            Label::Frontier { letter, dir } => Some((*v, letter.clone(), *dir)),
            _ => None,
        })
        .collect();
    for (v, x, dir) in frontier {
        let frag = f.get(&x).ok_or_else(|| MorphismError::DomainGap(x.clone()))?;
        let dp = frag
            .port_with_letter(&x)
            .ok_or_else(|| MorphismError::Malformed(x.clone(), "no designated port".into()))?;
        if dp.dir != dir {
            return Err(MorphismError::Malformed(x.clone(), "designated port direction differs from the frontier".into()));
        }
        let partner = cur.partner(Port::new(v, dir, 1));
        let keep: BTreeSet<VertexId> = cur.vertex_ids().filter(|u| *u != v).collect();
        let rest = cur.induced(&keep);
        let mut gl = Vec::new();
        if let Some(p) = partner.filter(|p| p.vertex != v) {
            gl.push((PartPort { part: 0, port: p }, PartPort { part: 1, port: dp }));
        }
        cur = net_union(&[rest, frag.clone()], &gl)?;
    }
    Ok(cur)
}

/// Placeholder letter for in-arity `i` of a replacement net.
pub fn in_placeholder(i: u32) -> String {
    format!("in{i}")
}

/// Placeholder letter for out-arity `j` of a replacement net.
pub fn out_placeholder(j: u32) -> String {
    format!("out{j}")
}

/// A relational net homomorphism. Each replacement net for a symbol carries
/// free ports lettered `in<i>` / `out<j>` in bijection with the symbol's
/// arities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NetHomomorphism {
    pub symbol_map: BTreeMap<String, Vec<Net>>,
    pub frontier_map: BTreeMap<String, Vec<Net>>,
    pub arity_map: BTreeMap<String, Vec<String>>,
}

pub const DEFAULT_IMAGE_LIMIT: usize = 10_000;

impl NetHomomorphism {
    /// Identity on the symbols of `t`.
    pub fn identity_on(alphabet: impl IntoIterator<Item = crate::net::RankedSymbol>) -> Self {
        let mut h = NetHomomorphism::default();
        for s in alphabet {
            h.symbol_map.insert(s.name.clone(), vec![symbol_replacement(&s)]);
        }
        h
    }

    /// Composite `other ∘ self`: apply `self`, then `other`.
    pub fn then(&self, other: &NetHomomorphism) -> Result<NetHomomorphism, MorphismError> {
        let mut h = NetHomomorphism::default();
        for (s, imgs) in &self.symbol_map {
            let mut all = Jungle::new();
            for n in imgs {
                all.extend(&apply_homomorphism(other, n)?);
            }
            h.symbol_map.insert(s.clone(), all.iter().cloned().collect());
        }
        for (x, imgs) in &self.frontier_map {
            let mut all = Jungle::new();
            for n in imgs {
                all.extend(&apply_homomorphism(other, n)?);
            }
            h.frontier_map.insert(x.clone(), all.iter().cloned().collect());
        }
        h.arity_map = self.arity_map.clone();
        Ok(h)
    }
}

/// Single-vertex replacement net for `s` with placeholder letters.
pub fn symbol_replacement(s: &crate::net::RankedSymbol) -> Net {
    let mut b = crate::net::NetBuilder::new().vertex(0, s.clone());
    for &i in &s.ins {
        b = b.free(Port::inp(0, i), in_placeholder(i));
    }
    for &j in &s.outs {
        b = b.free(Port::out(0, j), out_placeholder(j));
    }
    b.build().expect("single vertex net")
}

/// All images of `t` under `h`, one per choice of image at each vertex.
pub fn apply_homomorphism(h: &NetHomomorphism, t: &Net) -> Result<Jungle, MorphismError> {
    apply_homomorphism_bounded(h, t, DEFAULT_IMAGE_LIMIT)
}

pub fn apply_homomorphism_bounded(h: &NetHomomorphism, t: &Net, limit: usize) -> Result<Jungle, MorphismError> {
    let verts: Vec<(VertexId, &Label)> = t.labels().iter().map(|(v, l)| (*v, l)).collect();
    let mut options: Vec<&Vec<Net>> = Vec::new();
    for (_, l) in &verts {
        let opts = match l {
            Label::Symbol(s) => h.symbol_map.get(&s.name),
            Label::Frontier { letter, .. } => h.frontier_map.get(letter),
        }
        .ok_or_else(|| MorphismError::DomainGap(l.name().to_string()))?;
        if opts.is_empty() {
            return Ok(Jungle::new());
        }
        options.push(opts);
    }
    let total = options.iter().try_fold(1usize, |acc, o| acc.checked_mul(o.len()));
    match total {
        Some(n) if n <= limit => {}
        _ => return Err(MorphismError::BudgetExceeded(limit)),
    }
    let mut out = Jungle::new();
    let mut choice = vec![0usize; verts.len()];
    loop {
        out.insert(assemble_image(h, t, &verts, &options, &choice)?);
        let mut k = 0;
        while k < choice.len() {
            choice[k] += 1;
            if choice[k] < options[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
        if k == choice.len() {
            break;
        }
    }
    Ok(out)
}

fn image_port(img: &Net, label: &Label, dir: Dir, index: u32) -> Result<Port, MorphismError> {
    let letter = match label {
        Label::Frontier { letter, .. } => letter.clone(),
        Label::Symbol(_) => match dir {
            Dir::In => in_placeholder(index),
            Dir::Out => out_placeholder(index),
        },
    };
    let p = img
        .port_with_letter(&letter)
        .ok_or_else(|| MorphismError::Malformed(label.name().to_string(), format!("image lacks port `{letter}`")))?;
    if p.dir != dir {
        return Err(MorphismError::Malformed(label.name().to_string(), format!("port `{letter}` has the wrong direction")));
    }
    Ok(p)
}

fn assemble_image(
    h: &NetHomomorphism,
    t: &Net,
    verts: &[(VertexId, &Label)],
    options: &[&Vec<Net>],
    choice: &[usize],
) -> Result<Net, MorphismError> {
    let parts: Vec<Net> = (0..verts.len()).map(|k| options[k][choice[k]].clone()).collect();
    let index: BTreeMap<VertexId, usize> = verts.iter().enumerate().map(|(k, (v, _))| (*v, k)).collect();
    let mut gl = Vec::new();
    for e in t.edges() {
        let (ks, kt) = (index[&e.src], index[&e.tgt]);
        let ps = image_port(&parts[ks], verts[ks].1, Dir::Out, e.out)?;
        let pt = image_port(&parts[kt], verts[kt].1, Dir::In, e.inp)?;
        gl.push((PartPort { part: ks, port: ps }, PartPort { part: kt, port: pt }));
    }
    let mut renames: BTreeMap<(usize, Port), String> = BTreeMap::new();
    for (p, letter) in t.dangling() {
        let k = index[&p.vertex];
        let ip = image_port(&parts[k], verts[k].1, p.dir, p.index)?;
        let l = h.arity_map.get(&letter).and_then(|v| v.first()).cloned().unwrap_or(letter);
        renames.insert((k, ip), l);
    }
    let parts: Vec<Net> = parts
        .into_iter()
        .enumerate()
        .map(|(k, n)| {
            let mut slots_fix = Vec::new();
            for (p, s) in n.slots() {
                if let Slot::Free(_) = s {
                    if let Some(l) = renames.get(&(k, *p)) {
                        slots_fix.push((*p, l.clone()));
                    }
                }
            }
            relabel_ports(&n, &slots_fix)
        })
        .collect();
    Ok(net_union(&parts, &gl)?)
}

/// Sets the letters of the listed free ports.
pub fn relabel_ports(n: &Net, fix: &[(Port, String)]) -> Net {
    if fix.is_empty() {
        return n.clone();
    }
    let map: BTreeMap<Port, String> = fix.iter().cloned().collect();
    let dangling: Vec<(Port, String)> = n
        .dangling()
        .into_iter()
        .map(|(p, l)| (p, map.get(&p).cloned().unwrap_or(l)))
        .collect();
    Net::build(n.labels().clone(), n.edges(), dangling, n.root()).expect("relabeling keeps validity")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{canonical_form, NetBuilder, RankedSymbol};

    fn sym(n: &str) -> RankedSymbol {
        RankedSymbol::simple(n, 1, 1)
    }

    #[test]
    fn substitution_without_frontier_is_identity() {
        let t = NetBuilder::new().vertex(0, sym("a")).build().unwrap();
        let f = NetSubstitution::new();
        assert_eq!(apply_substitution(&f, &t).unwrap(), t);
    }

    #[test]
    fn substitution_attaches_fragment() {
        let t = NetBuilder::new().vertex(0, sym("a")).frontier(1, "x", Dir::Out).edge(1, 1, 0, 1).build().unwrap();
        let frag = NetBuilder::new().vertex(0, sym("b")).free(Port::out(0, 1), "x").build().unwrap();
        let f = NetSubstitution::new().with("x", frag);
        let got = apply_substitution(&f, &t).unwrap();
        let want = NetBuilder::new().vertex(0, sym("b")).vertex(1, sym("a")).edge(0, 1, 1, 1).build().unwrap();
        assert_eq!(canonical_form(&got), canonical_form(&want));
    }

    #[test]
    fn substitution_with_looped_fragment() {
        let t = NetBuilder::new().vertex(0, sym("a")).frontier(1, "x", Dir::Out).edge(1, 1, 0, 1).build().unwrap();
        let c = RankedSymbol::new("c", &[1], &[1, 2]);
        let frag = NetBuilder::new().vertex(0, c).edge(0, 1, 0, 1).free(Port::out(0, 2), "x").build().unwrap();
        let got = apply_substitution(&NetSubstitution::new().with("x", frag), &t).unwrap();
        got.check().unwrap();
        assert_eq!(got.edges().len(), 2);
    }

    #[test]
    fn substitution_domain_gap() {
        let t = NetBuilder::new().frontier(0, "y", Dir::In).build().unwrap();
        assert!(matches!(apply_substitution(&NetSubstitution::new(), &t), Err(MorphismError::DomainGap(_))));
    }

    #[test]
    fn identity_homomorphism() {
        let t = NetBuilder::new().vertex(0, sym("a")).vertex(1, sym("a")).edge(0, 1, 1, 1).build().unwrap();
        let h = NetHomomorphism::identity_on([sym("a")]);
        let img = apply_homomorphism(&h, &t).unwrap();
        assert_eq!(img.len(), 1);
        assert!(img.contains(&t));
    }

    #[test]
    fn two_choices_on_a_chain() {
        let t = NetBuilder::new().vertex(0, sym("a")).vertex(1, sym("a")).edge(0, 1, 1, 1).build().unwrap();
        let mut h = NetHomomorphism::default();
        h.symbol_map
            .insert("a".into(), vec![symbol_replacement(&sym("w1")), symbol_replacement(&sym("w2"))]);
        // a chain is directed, so no two choice functions collapse
        assert_eq!(apply_homomorphism(&h, &t).unwrap().len(), 4);
    }
}
