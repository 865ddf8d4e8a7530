//! Feedbacking taxonomy and the universally partitioning check.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{
    applicable_matches, closure, neighbour_fragment, normal_forms, replace, rewrite_step, Budget, MatchRecord, Rns,
    RewriteError, RulePreform,
};
use crate::net::{boundary_stats, canonical_form, enclosures, Jungle, Net, Port, Slot, VertexId};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RnsFlags {
    pub feedbacking: bool,
    pub totally_feedbacking: bool,
    pub innerly_feedbacking: bool,
    pub self_feedbacking: bool,
    pub environmentally_saving: bool,
    pub thoroughly_feedbacking: bool,
    pub orn_saving: bool,
    pub instance_sensitive: bool,
}

impl fmt::Display for RnsFlags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items = [
            ("feedbacking", self.feedbacking),
            ("totally_feedbacking", self.totally_feedbacking),
            ("innerly_feedbacking", self.innerly_feedbacking),
            ("self_feedbacking", self.self_feedbacking),
            ("environmentally_saving", self.environmentally_saving),
            ("thoroughly_feedbacking", self.thoroughly_feedbacking),
            ("orn_saving", self.orn_saving),
            ("instance_sensitive", self.instance_sensitive),
        ];
        for (i, (n, v)) in items.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{n}={v}")?;
        }
        Ok(())
    }
}

/// One way a rule applies: a redex, the substitution used, and the images
/// that substitution feeds back.
#[derive(Clone, Debug)]
pub struct Application {
    pub rule: String,
    pub record: MatchRecord,
    pub substitution: Option<usize>,
    pub images: Vec<Net>,
    pub result: Net,
    pub environment_saved: bool,
}

/// Outward rank number of a rule side: free ports of its ranked part plus
/// in-ports fed from frontier vertices.
pub fn side_orn(side: &Net) -> usize {
    boundary_stats(side, &side.ranked_vertices()).orn
}

/// All applications of all applicable rules of `r` in `t`.
pub fn applications(r: &Rns, t: &Net) -> Result<Vec<Application>, RewriteError> {
    let mut out = Vec::new();
    for m in applicable_matches(r, t)? {
        let rule = r.rule(&m.rule).expect("match names a rule");
        let cut = r.conditions.cut_environment.contains(&rule.name);
        let choices = r.substitution_choices(rule);
        for g in choices {
            let images: Vec<Net> = match g {
                Some(g) => g.map.values().cloned().collect(),
                None => binding_images(t, rule, &m),
            };
            let rep = replace(t, rule, &m, g, cut)?;
            let saved = environment_saved(t, &m.occurrence(), &rep.net, &rep.right_map, &rep.fragment_vertices);
            let idx = g.and_then(|g| rule.right_subs.iter().position(|x| x == g));
            out.push(Application {
                rule: rule.name.clone(),
                record: m.clone(),
                substitution: idx,
                images,
                result: rep.net,
                environment_saved: saved,
            });
        }
    }
    Ok(out)
}

fn binding_images(t: &Net, rule: &RulePreform, m: &MatchRecord) -> Vec<Net> {
    rule.left_sub_domain
        .iter()
        .filter_map(|x| match m.bindings.get(x) {
            Some(Some(p)) => Some(neighbour_fragment(t, *p, x)),
            _ => None,
        })
        .collect()
}

fn environment_saved(
    t: &Net,
    occ: &BTreeSet<VertexId>,
    result: &Net,
    right_map: &BTreeMap<VertexId, VertexId>,
    fragment: &BTreeSet<VertexId>,
) -> bool {
    let env: BTreeSet<VertexId> = t.vertex_ids().filter(|v| !occ.contains(v)).collect();
    let new: BTreeSet<VertexId> = right_map.values().copied().chain(fragment.iter().copied()).collect();
    let env_after: BTreeSet<VertexId> = result.vertex_ids().filter(|v| !new.contains(v)).collect();
    if env != env_after {
        return false;
    }
    if canonical_form(&t.induced(&env).with_root(None)) != canonical_form(&result.induced(&env_after).with_root(None)) {
        return false;
    }
    let linked = |n: &Net| -> BTreeSet<Port> {
        n.slots()
            .iter()
            .filter(|(p, s)| env.contains(&p.vertex) && matches!(s, Slot::Linked(_)))
            .map(|(p, _)| *p)
            .collect()
    };
    linked(t) == linked(result)
}

/// Flags of `r` with respect to net `t`.
pub fn classify_rns(r: &Rns, t: &Net) -> Result<RnsFlags, RewriteError> {
    let apps = applications(r, t)?;
    let letters = t.symbols();
    let overlaps = |n: &Net| n.symbols().iter().any(|s| letters.contains(s));
    let app_overlaps = |a: &Application| a.images.is_empty() || a.images.iter().any(overlaps);
    let app_total = |a: &Application| a.images.iter().all(overlaps);
    let mut by_rule: BTreeMap<&str, Vec<&Application>> = BTreeMap::new();
    for a in &apps {
        by_rule.entry(a.rule.as_str()).or_default().push(a);
    }
    let encl = enclosures(t).map_err(RewriteError::Net)?;
    let mut f = RnsFlags {
        feedbacking: by_rule.values().any(|v| v.iter().all(|a| app_overlaps(a))),
        totally_feedbacking: apps.iter().all(app_total),
        innerly_feedbacking: apps.iter().all(|a| a.images.iter().all(|n| encl.contains(&n.with_root(None)))),
        self_feedbacking: apps.iter().any(|a| {
            let redex = t.induced(&a.record.occurrence()).symbols();
            a.images.iter().any(|n| n.symbols().iter().any(|s| redex.contains(s)))
        }),
        environmentally_saving: apps.iter().all(|a| a.environment_saved),
        thoroughly_feedbacking: !by_rule.is_empty() && by_rule.values().all(|v| v.iter().all(|a| app_total(a))),
        orn_saving: r.rules.iter().all(|x| side_orn(&x.left) == side_orn(&x.right)),
        instance_sensitive: false,
    };
    for a in &apps {
        if a.substitution.is_none() {
            continue;
        }
        let rule = r.rule(&a.rule).expect("known rule");
        let fr = a.record.assignment(t, rule);
        let g = &rule.right_subs[a.substitution.expect("checked")];
        for (x, frag) in &g.map {
            let differs = match fr.get(x) {
                Some(b) => canonical_form(b) != canonical_form(frag),
                None => true,
            };
            if differs {
                f.instance_sensitive = true;
            }
        }
    }
    Ok(f)
}

/// Per-condition verdicts of the universally partitioning check.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UprnsReport {
    pub saving: bool,
    pub disjoint: bool,
    pub disjoint_one_step: bool,
    pub fresh_injective: bool,
    pub witnesses: Vec<String>,
}

impl UprnsReport {
    pub fn passes(&self) -> bool {
        self.saving && self.disjoint && self.fresh_injective
    }

    /// Names of the failing conditions, `i`, `ii`, `iii`.
    pub fn failing(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if !self.saving {
            v.push("i");
        }
        if !self.disjoint {
            v.push("ii");
        }
        if !self.fresh_injective {
            v.push("iii");
        }
        v
    }
}

impl fmt::Display for UprnsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = |b: bool| if b { "PASS" } else { "FAIL" };
        writeln!(f, "{} uprns-saving", v(self.saving))?;
        writeln!(f, "{} uprns-disjoint (one-step: {})", v(self.disjoint), v(self.disjoint_one_step))?;
        write!(f, "{} uprns-fresh-injective", v(self.fresh_injective))?;
        for w in &self.witnesses {
            write!(f, "\n  witness {w}")?;
        }
        Ok(())
    }
}

/// Checks the three universally partitioning conditions of `w` over `c`.
pub fn validate_uprns(w: &Rns, c: &Jungle, budget: Budget) -> Result<UprnsReport, RewriteError> {
    let mut rep = UprnsReport { saving: true, disjoint: true, disjoint_one_step: true, fresh_injective: true, witnesses: Vec::new() };
    for rule in &w.rules {
        let (l, r) = (side_orn(&rule.left), side_orn(&rule.right));
        if l != r {
            rep.saving = false;
            rep.witnesses.push(format!("i: rule {} changes the outward rank number {l} -> {r}", rule.name));
        }
    }
    let reach = closure(w, c, budget)?;
    for n in &reach.jungle {
        for a in applications(w, n)? {
            let total = a.images.iter().all(|img| img.symbols().iter().any(|s| n.symbols().contains(s)));
            if !total || !a.environment_saved {
                rep.saving = false;
                rep.witnesses.push(format!(
                    "i: rule {} at {:?} {}",
                    a.rule,
                    a.record.position.path,
                    if total { "alters its environment" } else { "feeds back foreign material" }
                ));
                break;
            }
        }
    }
    let lc = c.symbols();
    let nf = normal_forms(w, c, budget)?;
    let clash: BTreeSet<String> = nf.jungle.symbols().intersection(&lc).cloned().collect();
    if !clash.is_empty() {
        rep.disjoint = false;
        rep.witnesses.push(format!("ii: letters {:?} survive in normal forms", clash));
    }
    if nf.exhausted {
        rep.witnesses.push("ii: normal-form computation exhausted its budget".into());
    }
    let one = rewrite_step(w, c)?;
    rep.disjoint_one_step = one.symbols().is_disjoint(&lc);
    let mut rights: BTreeMap<Vec<u8>, &str> = BTreeMap::new();
    let mut lefts: BTreeMap<Vec<u8>, &str> = BTreeMap::new();
    for rule in &w.rules {
        let ra = rule.right_apex();
        let syms = ra.symbols();
        if ra.len() != 1 {
            rep.fresh_injective = false;
            rep.witnesses.push(format!("iii: right apex of {} has {} vertices", rule.name, ra.len()));
        } else if let Some(z) = syms.iter().find(|z| lc.contains(*z)) {
            rep.fresh_injective = false;
            rep.witnesses.push(format!("iii: right apex of {} reuses letter {z}", rule.name));
        }
        if let Some(other) = rights.insert(canonical_form(&ra), &rule.name) {
            rep.fresh_injective = false;
            rep.witnesses.push(format!("iii: rules {other} and {} share a right side", rule.name));
        }
        if let Some(other) = lefts.insert(canonical_form(&rule.left_apex()), &rule.name) {
            rep.fresh_injective = false;
            rep.witnesses.push(format!("iii: rules {other} and {} share a left side", rule.name));
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{NetBuilder, RankedSymbol};
    use crate::rewrite::relabel_rule;

    fn sym(n: &str) -> RankedSymbol {
        RankedSymbol::simple(n, 1, 1)
    }

    #[test]
    fn identity_rule_is_saving() {
        let r = Rns::new(vec![relabel_rule("aa", &sym("a"), &sym("a"))]).unwrap();
        let t = NetBuilder::new().vertex(0, sym("a")).build().unwrap();
        let f = classify_rns(&r, &t).unwrap();
        assert!(f.orn_saving && f.environmentally_saving);
    }

    #[test]
    fn orn_mismatch() {
        // a: two free ports and one in-link from a frontier; b: one free port and one in-link
        let a = RankedSymbol::new("a", &[1, 2], &[1]);
        let b = RankedSymbol::new("b", &[1], &[1]);
        let left = NetBuilder::new()
            .vertex(0, a)
            .frontier(1, "x", crate::net::Dir::Out)
            .edge(1, 1, 0, 1)
            .free(Port::inp(0, 2), "p")
            .free(Port::out(0, 1), "q")
            .build()
            .unwrap();
        let right = NetBuilder::new()
            .vertex(0, b)
            .frontier(1, "x", crate::net::Dir::Out)
            .edge(1, 1, 0, 1)
            .free(Port::out(0, 1), "q")
            .build()
            .unwrap();
        assert_eq!((side_orn(&left), side_orn(&right)), (3, 2));
        let mut r = Rns::new(vec![RulePreform::simple("m", left, right).unwrap()]).unwrap();
        r.conditions.cut_environment.insert("m".into());
        let t = NetBuilder::new().vertex(0, sym("c")).build().unwrap();
        assert!(!classify_rns(&r, &t).unwrap().orn_saving);
    }

    #[test]
    fn minimal_uprns_passes() {
        let w = Rns::new(vec![relabel_rule("az", &sym("a"), &sym("z"))]).unwrap();
        let c = Jungle::singleton(NetBuilder::new().vertex(0, sym("a")).build().unwrap());
        let rep = validate_uprns(&w, &c, Budget::default()).unwrap();
        assert!(rep.passes(), "{rep}");
    }

    #[test]
    fn reused_letter_fails_freshness() {
        let w = Rns::new(vec![relabel_rule("ab", &sym("a"), &sym("b"))]).unwrap();
        let c: Jungle = ["a", "b"].iter().map(|n| NetBuilder::new().vertex(0, sym(n)).build().unwrap()).collect();
        let rep = validate_uprns(&w, &c, Budget::default()).unwrap();
        assert_eq!(rep.failing(), vec!["ii", "iii"]);
    }

    #[test]
    fn shared_right_side_fails_injectivity() {
        let w = Rns::new(vec![relabel_rule("az", &sym("a"), &sym("z")), relabel_rule("bz", &sym("b"), &sym("z"))]).unwrap();
        let c: Jungle = ["a", "b"].iter().map(|n| NetBuilder::new().vertex(0, sym(n)).build().unwrap()).collect();
        let rep = validate_uprns(&w, &c, Budget::default()).unwrap();
        assert_eq!(rep.failing(), vec!["iii"]);
    }
}
