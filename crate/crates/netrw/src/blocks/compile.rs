use std::collections::BTreeSet;
use std::fmt;

use super::BlocksError;
use crate::morphism::{classify_nbh, nbh_image, Nbh, NetSubstitution};
use crate::net::{canonical_form, Jungle, Net};
use crate::rewrite::{apex, normal_forms, Budget, ConditionSet, Rns, RulePreform};

/// The renetting system rewriting each block member into its image.
///
/// Members mapped onto themselves get no rule. Images that drop a block
/// letter cut the corresponding environment link.
pub fn compile_nbh_to_rns(h: &Nbh) -> Result<Rns, BlocksError> {
    for (x, frag) in &h.frontier_map {
        if frag.frontier_letters().contains(x) {
            return Err(BlocksError::InfiniteBlock(x.clone()));
        }
    }
    let mut rules = Vec::new();
    let mut cut = BTreeSet::new();
    for (k, (member, image)) in h.entries().into_iter().enumerate() {
        if member == image {
            continue;
        }
        let name = format!("block{k}");
        let kept: BTreeSet<String> = image.dangling().into_iter().map(|(_, l)| l).chain(image.frontier_letters()).collect();
        if member.dangling().iter().any(|(_, l)| !kept.contains(l)) {
            cut.insert(name.clone());
        }
        let mut g = NetSubstitution::new();
        for x in image.frontier_letters() {
            if let Some(frag) = h.frontier_map.get(&x) {
                g = g.with(x, frag.clone());
            }
        }
        let subs = if g.map.is_empty() { Vec::new() } else { vec![g] };
        rules.push(RulePreform::new(name, member.clone(), image.clone(), subs)?);
    }
    let conditions = ConditionSet { cut_environment: cut, ..ConditionSet::default() };
    Ok(Rns::new(rules)?.with_conditions(conditions))
}

/// The block homomorphism whose block is the left apexes of `r`, mapped
/// to the right sides, with right substitutions as the frontier map.
///
/// Only the first right substitution of a rule is carried over.
pub fn compile_rns_to_nbh(r: &Rns) -> Result<Nbh, BlocksError> {
    let mut h = Nbh::identity();
    for rule in &r.rules {
        h.add(apex(&rule.left), rule.right.clone())?;
        if let Some(g) = rule.right_subs.first() {
            for (x, frag) in &g.map {
                h.frontier_map.insert(x.clone(), frag.clone());
            }
        }
    }
    let flags = classify_nbh(&h, &Jungle::new())?;
    Ok(h.with_flags(flags))
}

#[derive(Clone, Debug)]
pub struct EquivalenceVerdict {
    pub net: Net,
    pub nbh: Jungle,
    pub rns: Jungle,
    pub exhausted: bool,
}

impl EquivalenceVerdict {
    pub fn agrees(&self) -> bool {
        !self.exhausted && self.nbh == self.rns
    }
}

#[derive(Clone, Debug, Default)]
pub struct EquivalenceReport {
    pub verdicts: Vec<EquivalenceVerdict>,
    /// Sample nets with no block partition, left out of the comparison.
    pub skipped: usize,
}

impl EquivalenceReport {
    pub fn passes(&self) -> bool {
        self.verdicts.iter().all(|v| v.agrees())
    }

    pub fn failures(&self) -> impl Iterator<Item = &EquivalenceVerdict> {
        self.verdicts.iter().filter(|v| !v.agrees())
    }
}

impl fmt::Display for EquivalenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bad = self.failures().count();
        write!(f, "{} compared, {} skipped, {} disagreeing", self.verdicts.len(), self.skipped, bad)
    }
}

/// Compares the block image of each sample net with its normal forms.
pub fn equivalence_check(h: &Nbh, r: &Rns, sample: &Jungle, budget: Budget) -> Result<EquivalenceReport, BlocksError> {
    let mut report = EquivalenceReport::default();
    for t in sample {
        let image = nbh_image(h, t)?;
        if image.is_empty() {
            report.skipped += 1;
            continue;
        }
        let nf = normal_forms(r, &Jungle::singleton(t.clone()), budget)?;
        report.verdicts.push(EquivalenceVerdict { net: t.clone(), nbh: image, rns: nf.jungle, exhausted: nf.exhausted });
    }
    Ok(report)
}

/// Nets of `sample` on which the two systems disagree, by canonical key.
pub fn disagreements(report: &EquivalenceReport) -> Vec<Vec<u8>> {
    report.failures().map(|v| canonical_form(&v.net)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{NetBuilder, Port, RankedSymbol};
    use crate::oracle::{enumerate_nets, EnumerationSpec};

    fn sym(n: &str) -> RankedSymbol {
        RankedSymbol::simple(n, 1, 1)
    }

    fn lettered(n: &str) -> Net {
        NetBuilder::new().vertex(0, sym(n)).free(Port::inp(0, 1), "i").free(Port::out(0, 1), "o").build().unwrap()
    }

    fn sample() -> Jungle {
        enumerate_nets(&EnumerationSpec::new(vec![sym("a"), sym("b")]).vertices(2)).unwrap()
    }

    #[test]
    fn identity_compiles_to_nothing() {
        let r = compile_nbh_to_rns(&Nbh::identity()).unwrap();
        assert!(r.rules.is_empty());
        assert!(equivalence_check(&Nbh::identity(), &r, &sample(), Budget::default()).unwrap().passes());
    }

    #[test]
    fn relabel_round_trip() {
        let h = Nbh::new(vec![(lettered("a"), lettered("x")), (lettered("b"), lettered("y"))]).unwrap();
        let r = compile_nbh_to_rns(&h).unwrap();
        assert_eq!(r.rules.len(), 2);
        let rep = equivalence_check(&h, &r, &sample(), Budget::default()).unwrap();
        assert!(rep.passes(), "{rep}");
        assert!(!rep.verdicts.is_empty());
        let back = compile_rns_to_nbh(&r).unwrap();
        assert!(equivalence_check(&back, &r, &sample(), Budget::default()).unwrap().passes());
    }

    #[test]
    fn mutated_rule_is_caught() {
        let h = Nbh::new(vec![(lettered("a"), lettered("x")), (lettered("b"), lettered("y"))]).unwrap();
        let mut r = compile_nbh_to_rns(&h).unwrap();
        r.rules[0].right = lettered("z");
        let rep = equivalence_check(&h, &r, &sample(), Budget::default()).unwrap();
        assert!(!rep.passes());
        assert!(!disagreements(&rep).is_empty());
    }

    #[test]
    fn self_referencing_fragment() {
        let x = NetBuilder::new().vertex(0, sym("a")).frontier(1, "x", crate::net::Dir::In).edge(0, 1, 1, 1).build();
        let frag = x.unwrap();
        let h = Nbh::identity().with_frontier("x", frag);
        assert!(matches!(compile_nbh_to_rns(&h), Err(BlocksError::InfiniteBlock(_))));
    }
}
