//! Desk-scale property checks run by `netrw check` and the acceptance suite.
//!
//! Each check builds its own corpus, runs the engine against an independent
//! recomputation or a law, and reports one line.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::{Duration, Instant};

use crate::abstraction::{
    cardinality_bound, center_uniqueness, check_equivalence_laws, check_partially_quotient, equivalence_closure, exhaustive_parallel_class,
    multidim_theta, operator_op, td_abstraction_check, td_op, AbstractionRelation, BoundIndex, BoundInstance, Kind, NetOp,
    PartiallyQuotientAlgebra, Report, MULTIDIM_LIMIT,
};
use crate::blocks::{block_partitions, compile_nbh_to_rns, compile_rns_to_nbh, equivalence_check, micro_macro, BlocksError};
use crate::morphism::{apply_nbh, apply_nbh_traced, classify_nbh, image_representation, invert_anbh, new_link_count, Nbh, NbhType};
use crate::net::{canonical_form, connected_subsets, Jungle, Net, NetBuilder, Port, RankedSymbol, VertexId};
use crate::oracle::{enumerate_nets, naive_normal_forms, naive_rewrite_closure, oracle_compare, EnumerationSpec};
use crate::rewrite::{closure, normal_forms, relabel_rule, validate_uprns, Budget, Rns, RulePreform};
use crate::solver::{evolve, format_trace, n_level_solve, EvolutionState, Problem, Recognizer, SymbolCollapse};
use crate::transducer::{commutative_pairs, parallel_td_check, rename_rns, uma_build, Operator, Transducer};

/// Check ids in suite order.
pub const CHECK_IDS: [&str; 12] = [
    "nbh-to-rns",
    "rns-to-nbh",
    "inverse-anbh",
    "link-formula",
    "uprns-validator",
    "commuting-squares",
    "universal-macro",
    "equivalence-laws",
    "partially-quotient",
    "cardinality-bound",
    "evolution",
    "oracle-agreement",
];

/// Default vertex bound for enumerated samples.
pub const DEFAULT_BOUND: usize = 3;

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub id: &'static str,
    pub pass: bool,
    pub summary: String,
    /// First failures, at most a handful.
    pub failures: Vec<String>,
    pub elapsed: Duration,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", if self.pass { "PASS" } else { "FAIL" }, self.id, self.summary)?;
        for w in &self.failures {
            write!(f, "\n  {w}")?;
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
#[error("unknown check `{0}`")]
pub struct UnknownCheck(pub String);

/// Runs one check with enumerations up to `bound` vertices.
pub fn run_check(id: &str, bound: usize) -> Result<CheckOutcome, UnknownCheck> {
    let start = Instant::now();
    let (name, tally) = match id {
        "nbh-to-rns" => ("nbh-to-rns", nbh_to_rns(bound)),
        "rns-to-nbh" => ("rns-to-nbh", rns_to_nbh(bound)),
        "inverse-anbh" => ("inverse-anbh", inverse_anbh(bound)),
        "link-formula" => ("link-formula", link_formula(bound)),
        "uprns-validator" => ("uprns-validator", uprns_validator()),
        "commuting-squares" => ("commuting-squares", commuting_squares(bound)),
        "universal-macro" => ("universal-macro", universal_macro_check(bound)),
        "equivalence-laws" => ("equivalence-laws", equivalence_laws(bound)),
        "partially-quotient" => ("partially-quotient", partially_quotient(bound)),
        "cardinality-bound" => ("cardinality-bound", cardinality()),
        "evolution" => ("evolution", evolution()),
        "oracle-agreement" => ("oracle-agreement", oracle_agreement(bound)),
        other => return Err(UnknownCheck(other.to_string())),
    };
    Ok(tally.finish(name, start.elapsed()))
}

pub fn run_all(bound: usize) -> Vec<CheckOutcome> {
    CHECK_IDS.iter().map(|id| run_check(id, bound).expect("known id")).collect()
}

/// Case counter shared by the checks.
#[derive(Default)]
struct Tally {
    cases: usize,
    failed: usize,
    /// Smallest case count for a pass.
    need: usize,
    noun: &'static str,
    notes: Vec<String>,
    failures: Vec<String>,
}

const SHOWN_FAILURES: usize = 5;

impl Tally {
    fn new(noun: &'static str, need: usize) -> Self {
        Tally { noun, need, ..Tally::default() }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.fail(what());
        }
    }

    fn fail(&mut self, what: String) {
        self.failed += 1;
        if self.failures.len() < SHOWN_FAILURES {
            self.failures.push(what);
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn finish(self, id: &'static str, elapsed: Duration) -> CheckOutcome {
        let mut failures = self.failures;
        if self.cases < self.need {
            failures.push(format!("only {} {}, need {}", self.cases, self.noun, self.need));
        }
        let mut summary = format!("{} {}, {} failing", self.cases, self.noun, self.failed);
        for n in &self.notes {
            summary.push_str(", ");
            summary.push_str(n);
        }
        summary.push_str(&format!(" ({:.2}s)", elapsed.as_secs_f64()));
        CheckOutcome { id, pass: self.failed == 0 && self.cases >= self.need, summary, failures, elapsed }
    }
}

pub fn sym(n: &str) -> RankedSymbol {
    RankedSymbol::simple(n, 1, 1)
}

/// One vertex with its two ports free as `i` and `o`.
pub fn lettered(n: &str) -> Net {
    NetBuilder::new().vertex(0, sym(n)).free(Port::inp(0, 1), "i").free(Port::out(0, 1), "o").build().expect("single vertex")
}

/// Two vertices linked x -> y, with free ends `i` and `o`.
pub fn lettered_chain(x: &str, y: &str) -> Net {
    NetBuilder::new()
        .vertex(0, sym(x))
        .vertex(1, sym(y))
        .edge(0, 1, 1, 1)
        .free(Port::inp(0, 1), "i")
        .free(Port::out(1, 1), "o")
        .build()
        .expect("chain")
}

/// Nets over `a` and `b` with at most `bound` vertices.
pub fn sample(bound: usize) -> Jungle {
    enumerate_nets(&EnumerationSpec::new(vec![sym("a"), sym("b")]).vertices(bound)).expect("enumeration within limits")
}

/// Replacement nets over letters disjoint from `a`, `b`.
fn fresh_images() -> Vec<Net> {
    vec![
        lettered("x"),
        lettered("y"),
        lettered("z"),
        lettered_chain("x", "y"),
        lettered_chain("y", "x"),
        lettered_chain("x", "x"),
        lettered_chain("z", "y"),
        lettered_chain("z", "z"),
    ]
}

/// Block homomorphisms over `a`, `b`: every pair of images for the two
/// letters, then the chain a -> b as an extra block.
pub fn nbh_corpus() -> Vec<Nbh> {
    let imgs = fresh_images();
    let mut out = Vec::new();
    for ia in &imgs {
        for ib in &imgs {
            out.push(Nbh::new(vec![(lettered("a"), ia.clone()), (lettered("b"), ib.clone())]).expect("distinct members"));
        }
    }
    for ic in &imgs {
        out.push(
            Nbh::new(vec![(lettered("a"), lettered("x")), (lettered("b"), lettered("y")), (lettered_chain("a", "b"), ic.clone())])
                .expect("distinct members"),
        );
    }
    out
}

/// Renetting systems over `a`, `b` whose right sides are fresh. Each
/// letter has a single-vertex rule, so no source letter is left over in a
/// normal form.
pub fn rns_corpus() -> Vec<Rns> {
    let imgs = fresh_images();
    let units = || vec![lettered("a"), lettered("b")];
    let lefts: Vec<Vec<Net>> = vec![
        units(),
        [vec![lettered_chain("a", "b")], units()].concat(),
        [vec![lettered_chain("b", "a")], units()].concat(),
        [vec![lettered_chain("a", "a")], units()].concat(),
        [vec![lettered_chain("b", "b")], units()].concat(),
        [vec![lettered_chain("a", "b"), lettered_chain("b", "a")], units()].concat(),
        [vec![lettered_chain("a", "a"), lettered_chain("b", "b")], units()].concat(),
    ];
    let mut out = Vec::new();
    for (li, ls) in lefts.iter().enumerate() {
        for i in 0..imgs.len() {
            let rules = ls
                .iter()
                .enumerate()
                .map(|(j, l)| RulePreform::simple(format!("r{li}_{j}"), l.clone(), imgs[(i + j) % imgs.len()].clone()).expect("rule"))
                .collect();
            out.push(Rns::new(rules).expect("system"));
        }
    }
    out
}

fn nbh_to_rns(bound: usize) -> Tally {
    let mut t = Tally::new("block homomorphisms", 50);
    let s = sample(bound);
    let (mut compared, mut skipped) = (0, 0);
    for (i, h) in nbh_corpus().iter().enumerate() {
        let outcome = compile_nbh_to_rns(h).and_then(|r| equivalence_check(h, &r, &s, Budget::default()));
        match outcome {
            Ok(rep) => {
                compared += rep.verdicts.len();
                skipped += rep.skipped;
                t.record(rep.passes(), || format!("nbh {i}: {rep}"));
            }
            Err(e) => t.record(false, || format!("nbh {i}: {e}")),
        }
    }
    t.note(format!("{} sample nets, {compared} comparisons, {skipped} nets outside the block domain", s.len()));
    t
}

fn rns_to_nbh(bound: usize) -> Tally {
    let mut t = Tally::new("systems", 50);
    let s = sample(bound);
    let (mut compared, mut skipped) = (0, 0);
    for (i, r) in rns_corpus().iter().enumerate() {
        match compile_rns_to_nbh(r).and_then(|h| equivalence_check(&h, r, &s, Budget::default())) {
            Ok(rep) => {
                compared += rep.verdicts.len();
                skipped += rep.skipped;
                t.record(rep.passes(), || format!("rns {i}: {rep}"));
            }
            Err(e) => t.record(false, || format!("rns {i}: {e}")),
        }
    }
    t.note(format!("{compared} comparisons, {skipped} nets outside the block domain"));
    t
}

fn inverse_anbh(bound: usize) -> Tally {
    let mut t = Tally::new("injective ANBHs", 10);
    let s = sample(bound);
    let mut nets = 0;
    for (i, h) in nbh_corpus().into_iter().enumerate() {
        let Ok(flags) = classify_nbh(&h, &s) else { continue };
        if !flags.contains(&NbhType::ANBH) {
            continue;
        }
        let h = h.with_flags(flags);
        let Ok(f) = invert_anbh(&h) else { continue };
        let mut bad = None;
        for n in &s {
            let run = || -> Result<bool, String> {
                for rep in block_partitions(&h, n) {
                    let tr = apply_nbh_traced(&h, &rep).map_err(|e| e.to_string())?;
                    let back = apply_nbh(&f, &image_representation(&tr)).map_err(|e| e.to_string())?;
                    if canonical_form(&back) != canonical_form(n) {
                        return Ok(false);
                    }
                }
                Ok(true)
            };
            nets += 1;
            match run() {
                Ok(true) => {}
                Ok(false) => {
                    bad = Some(format!("nbh {i}: {n} is not restored"));
                    break;
                }
                Err(e) => {
                    bad = Some(format!("nbh {i}: {e}"));
                    break;
                }
            }
        }
        match bad {
            None => t.record(true, String::new),
            Some(b) => t.record(false, || b),
        }
    }
    t.note(format!("{nets} preimage nets"));
    t
}

/// Ports of `vs` that are linked or free, counted from the edge list.
fn occupied_slots(n: &Net, vs: &BTreeSet<VertexId>) -> usize {
    let ends: usize = n.edges().iter().map(|e| usize::from(vs.contains(&e.src)) + usize::from(vs.contains(&e.tgt))).sum();
    ends + n.dangling().iter().filter(|(p, _)| vs.contains(&p.vertex)).count()
}

fn symbol_ranks(n: &Net, vs: &BTreeSet<VertexId>) -> usize {
    vs.iter().filter_map(|v| n.label(*v)).map(|l| l.ports().len()).sum()
}

/// Blocks for every piece of `cover`, renamed a -> x and b -> y.
fn piece_relabeling(t: &Net, cover: &[BTreeSet<VertexId>]) -> Nbh {
    let map: BTreeMap<String, String> = [("a", "x"), ("b", "y")].iter().map(|(p, q)| (p.to_string(), q.to_string())).collect();
    let mut h = Nbh::identity();
    let mut seen = BTreeSet::new();
    for piece in cover {
        let m = t.induced(piece).with_root(None);
        if seen.insert(canonical_form(&m)) {
            let img = m.rename_symbols(&map);
            h.add(m, img).expect("fresh member");
        }
    }
    h
}

fn link_formula(bound: usize) -> Tally {
    let mut t = Tally::new("(t, cover, Q) instances", 100);
    for host in &sample(bound) {
        if host.len() < 2 || !host.is_connected() {
            continue;
        }
        let Ok(subsets) = connected_subsets(host, 1_000) else { continue };
        let subsets: Vec<BTreeSet<VertexId>> = subsets.into_iter().collect();
        let all: BTreeSet<VertexId> = host.vertex_ids().collect();
        for (i, s1) in subsets.iter().enumerate() {
            for s2 in &subsets[i + 1..] {
                let union: BTreeSet<VertexId> = s1.union(s2).copied().collect();
                if union != all || s1.is_disjoint(s2) {
                    continue;
                }
                let cover = vec![s1.clone(), s2.clone()];
                let h = piece_relabeling(host, &cover);
                for q in [vec![0], vec![1], vec![0, 1]] {
                    let inter: BTreeSet<VertexId> = if q.len() == 1 { cover[q[0]].clone() } else { s1.intersection(s2).copied().collect() };
                    let formula = (q.len() - 1) * symbol_ranks(host, &inter);
                    let engine = new_link_count(&h, host, &cover, &q);
                    let brute = brute_new_links(&h, host, &cover, &q, &inter);
                    let ok = matches!((&engine, &brute), (Ok(e), Ok(b)) if *e == formula && *b == formula);
                    t.record(ok, || format!("{host} cover {cover:?} Q {q:?}: engine {engine:?}, brute {brute:?}, formula {formula}"));
                }
            }
        }
    }
    t
}

fn brute_new_links(h: &Nbh, host: &Net, cover: &[BTreeSet<VertexId>], q: &[usize], inter: &BTreeSet<VertexId>) -> Result<usize, String> {
    let rep = crate::blocks::NuoRepresentation {
        subject: host.clone(),
        pieces: cover.iter().map(|s| crate::blocks::Piece::new(s.iter().copied())).collect(),
    };
    let tr = apply_nbh_traced(h, &rep).map_err(|e| e.to_string())?;
    let copies: BTreeSet<VertexId> =
        tr.provenance.iter().filter(|(_, (piece, sv))| q.contains(piece) && inter.contains(sv)).map(|(rv, _)| *rv).collect();
    Ok(occupied_slots(&tr.net, &copies).saturating_sub(occupied_slots(host, inter)))
}

/// A hand-built valid UPRNS, its sample, and its three single-condition mutants.
struct UprnsCase {
    valid: Rns,
    sample: Jungle,
}

fn renaming_system(pairs: &[(RankedSymbol, RankedSymbol)]) -> Rns {
    Rns::new(pairs.iter().map(|(a, b)| relabel_rule(&format!("{}{}", a.name, b.name), a, b)).collect()).expect("renaming")
}

fn uprns_cases() -> Vec<UprnsCase> {
    let r = |n: &str, k: u32, m: u32| RankedSymbol::simple(n, k, m);
    let alphabets: Vec<Vec<(RankedSymbol, RankedSymbol)>> = vec![
        vec![(r("a", 1, 1), r("x", 1, 1)), (r("b", 1, 1), r("y", 1, 1))],
        vec![(r("a", 1, 1), r("y", 1, 1)), (r("b", 1, 1), r("x", 1, 1))],
        vec![(r("a", 1, 1), r("p", 1, 1)), (r("b", 1, 1), r("q", 1, 1)), (r("c", 1, 1), r("s", 1, 1))],
        vec![(r("a", 2, 1), r("x", 2, 1)), (r("b", 2, 1), r("y", 2, 1))],
        vec![(r("a", 1, 2), r("x", 1, 2)), (r("b", 1, 2), r("y", 1, 2)), (r("c", 1, 1), r("z", 1, 1))],
        vec![(r("a", 1, 1), r("u", 1, 1)), (r("b", 1, 1), r("v", 1, 1)), (r("c", 2, 2), r("w", 2, 2))],
        vec![(r("a", 0, 1), r("x", 0, 1)), (r("b", 0, 1), r("y", 0, 1)), (r("c", 1, 0), r("z", 1, 0))],
        vec![(r("a", 1, 0), r("x", 1, 0)), (r("b", 1, 0), r("y", 1, 0))],
        vec![(r("a", 2, 2), r("x", 2, 2)), (r("b", 2, 2), r("y", 2, 2))],
        vec![(r("a", 1, 1), r("m", 1, 1)), (r("b", 1, 1), r("n", 1, 1)), (r("c", 1, 1), r("o", 1, 1)), (r("d", 1, 1), r("t", 1, 1))],
    ];
    alphabets
        .into_iter()
        .map(|pairs| {
            let sigma: Vec<RankedSymbol> = pairs.iter().map(|(a, _)| a.clone()).collect();
            let sample = enumerate_nets(&EnumerationSpec::new(sigma).vertices(2).edges(2).loops(false)).expect("small enumeration");
            UprnsCase { valid: renaming_system(&pairs), sample }
        })
        .collect()
}

/// Mutant breaking the outward rank of the first rule: its right side loses
/// its last port, and the rule cuts the environment link there.
fn mutate_orn(w: &Rns) -> Rns {
    let mut m = w.clone();
    let rule = &m.rules[0];
    let s = rule.right.labels().values().next().and_then(|l| l.symbol()).cloned().expect("relabel rule");
    let (ins, mut outs) = (s.ins.clone(), s.outs.clone());
    let mut ins = ins;
    if outs.pop().is_none() {
        ins.pop();
    }
    let shrunk = RankedSymbol::new(format!("{}'", s.name), &ins, &outs);
    let mut b = NetBuilder::new().vertex(0, shrunk);
    for &i in &ins {
        b = b.free(Port::inp(0, i), format!("i{i}"));
    }
    for &j in &outs {
        b = b.free(Port::out(0, j), format!("o{j}"));
    }
    let name = rule.name.clone();
    m.rules[0] = RulePreform::simple(name.clone(), rule.left.clone(), b.build().expect("single vertex")).expect("rule");
    m.conditions.cut_environment.insert(name);
    m
}

fn mutate_disjoint(w: &Rns) -> Rns {
    let mut m = w.clone();
    m.rules.pop();
    m
}

/// The second rule rewrites onto the first rule's right side.
fn mutate_injective(w: &Rns) -> Rns {
    let mut m = w.clone();
    let target = m.rules[0].right.clone();
    m.rules[1].right = target;
    m
}

fn uprns_validator() -> Tally {
    let mut t = Tally::new("systems", 40);
    let budget = Budget::default();
    let mut mutants = 0;
    for (i, case) in uprns_cases().iter().enumerate() {
        match validate_uprns(&case.valid, &case.sample, budget) {
            Ok(rep) => t.record(rep.passes(), || format!("valid {i}: {}", rep.failing().join(","))),
            Err(e) => t.record(false, || format!("valid {i}: {e}")),
        }
        let muts: [(&str, Rns); 3] =
            [("i", mutate_orn(&case.valid)), ("ii", mutate_disjoint(&case.valid)), ("iii", mutate_injective(&case.valid))];
        for (cond, m) in muts {
            mutants += 1;
            match validate_uprns(&m, &case.sample, budget) {
                Ok(rep) => t.record(rep.failing() == vec![cond], || format!("case {i} mutant {cond}: fails {:?}", rep.failing())),
                Err(e) => t.record(false, || format!("case {i} mutant {cond}: {e}")),
            }
        }
    }
    t.note(format!("{mutants} of them mutants"));
    t
}

fn relabeling(pairs: &[(&str, &str)]) -> Nbh {
    Nbh::new(pairs.iter().map(|(a, b)| (lettered(a), lettered(b))).collect()).expect("relabeling")
}

fn commuting_squares(bound: usize) -> Tally {
    let mut t = Tally::new("squares", 20);
    let rules = vec![
        RulePreform::simple("xz", lettered("x"), lettered("z")).expect("rule"),
        RulePreform::simple("yz", lettered("y"), lettered("z")).expect("rule"),
        RulePreform::simple("xyz", lettered_chain("x", "y"), lettered("z")).expect("rule"),
        RulePreform::simple("yxz", lettered_chain("y", "x"), lettered_chain("z", "z")).expect("rule"),
    ];
    let w1s = [relabeling(&[("a", "x"), ("b", "y")]), relabeling(&[("a", "y"), ("b", "x")])];
    let w2s = [relabeling(&[("a", "p"), ("b", "q")]), relabeling(&[("a", "x"), ("b", "y")])];
    let mut unmatched = 0;
    for k in &sample(bound) {
        if !k.is_connected() {
            continue;
        }
        for r in &rules {
            for w1 in &w1s {
                for w2 in &w2s {
                    match micro_macro(r, k, w1, w2) {
                        Ok(mm) => match mm.squares() {
                            Ok(sq) => t.record(sq.closes(), || format!("{} on {k}: paths differ", r.name)),
                            Err(e) => t.record(false, || format!("{} on {k}: {e}", r.name)),
                        },
                        Err(BlocksError::NoInducedPreimage(_)) => unmatched += 1,
                        Err(e) => t.record(false, || format!("{} on {k}: {e}", r.name)),
                    }
                }
            }
        }
    }
    t.note(format!("{unmatched} instances without a redex"));
    t
}

fn universal_macro_check(bound: usize) -> Tally {
    let mut t = Tally::new("triples", 20);
    let systems = [renaming_system(&[(sym("a"), sym("c"))]),
        renaming_system(&[(sym("b"), sym("c"))]),
        renaming_system(&[(sym("a"), sym("b"))]),
        renaming_system(&[(sym("b"), sym("a"))]),
        renaming_system(&[(sym("a"), sym("c")), (sym("b"), sym("c"))]),
        renaming_system(&[(sym("a"), sym("b")), (sym("b"), sym("c"))]),
        Rns::new(vec![RulePreform::simple("abc", lettered_chain("a", "b"), lettered("c")).expect("rule")]).expect("system")];
    let ws = [renaming_system(&[(sym("a"), sym("x")), (sym("b"), sym("y"))]),
        renaming_system(&[(sym("a"), sym("y")), (sym("b"), sym("x"))]),
        renaming_system(&[(sym("a"), sym("x"))]),
        renaming_system(&[(sym("b"), sym("y"))])];
    let s = sample(bound.min(2));
    let mut nets = 0;
    for (i, r) in systems.iter().enumerate() {
        for (j, w) in ws.iter().enumerate() {
            match commutative_pairs(r, w, &s, Budget::default()) {
                Ok(rows) => {
                    nets += rows.len();
                    let bad = rows.iter().find(|(_, m, d)| m.jungle != d.jungle || m.exhausted != d.exhausted);
                    t.record(bad.is_none(), || format!("system {i} under w{j}: differs on {}", bad.expect("row").0));
                }
                Err(e) => t.record(false, || format!("system {i} under w{j}: {e}")),
            }
        }
    }
    t.note(format!("{nets} sample runs"));
    t
}

/// Transducers for the parallel relation: systems, renamed systems and
/// their universal macros, on one- and two-stage carriers.
fn td_corpus() -> Vec<Transducer> {
    let base = [
        renaming_system(&[(sym("a"), sym("c"))]),
        renaming_system(&[(sym("b"), sym("c"))]),
        renaming_system(&[(sym("a"), sym("b"))]),
    ];
    let swap: BTreeMap<String, String> = [("a", "b"), ("b", "a")].iter().map(|(p, q)| (p.to_string(), q.to_string())).collect();
    let w = renaming_system(&[(sym("a"), sym("x")), (sym("b"), sym("y"))]);
    let mut out = Vec::new();
    for r in &base {
        for ops in [vec![Operator::NormalForm(r.clone())], vec![Operator::NormalForm(rename_rns(r, &swap))], vec![Operator::Step(r.clone())]] {
            let p = Transducer::single("p", ops.clone());
            if let Ok(u) = uma_build(&p, Some(&w)) {
                out.push(u);
            }
            out.push(p);
            out.push(Transducer::single("q", ops));
        }
    }
    out
}

fn relation_laws(t: &mut Tally, name: &str, rel: &AbstractionRelation) {
    let rep = check_equivalence_laws(rel);
    t.record(rep.passes(), || format!("{name}: {}", failing_lines(&rep)));
}

fn failing_lines(rep: &Report) -> String {
    rep.lines.iter().filter(|l| !l.pass).map(|l| format!("{} {}", l.law, l.witness.join(" "))).collect::<Vec<_>>().join("; ")
}

/// Laws of a relation given as a predicate on a finite list.
fn list_laws<T>(items: &[T], rel: impl Fn(&T, &T) -> bool) -> Result<(), String> {
    let n = items.len();
    let m: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| rel(&items[i], &items[j])).collect()).collect();
    for i in 0..n {
        if !m[i][i] {
            return Err(format!("reflexivity at {i}"));
        }
        for j in 0..n {
            if m[i][j] && !m[j][i] {
                return Err(format!("symmetry at {i},{j}"));
            }
            for k in 0..n {
                if m[i][j] && m[j][k] && !m[i][k] {
                    return Err(format!("transitivity at {i},{j},{k}"));
                }
            }
        }
    }
    Ok(())
}

fn symbol_set_key(n: &Net) -> Vec<u8> {
    n.symbols().into_iter().collect::<Vec<_>>().join(",").into_bytes()
}

fn equivalence_laws(bound: usize) -> Tally {
    let mut t = Tally::new("relations", 10);
    let u = sample(bound);
    let budget = Budget::default();
    relation_laws(&mut t, "identity", &AbstractionRelation::identity(Kind::Uprns, &u));
    relation_laws(&mut t, "symbol-kernel", &AbstractionRelation::kernel(Kind::Gprns, &u, symbol_set_key));
    relation_laws(&mut t, "collapse", &SymbolCollapse::new(&[("b", "a")]).relation(&u));
    for (i, h) in nbh_corpus().iter().enumerate().step_by(9) {
        match AbstractionRelation::nbh_abstraction(&u, h, &format!("h{i}")) {
            Ok(rel) => relation_laws(&mut t, &format!("nbh {i}"), &rel),
            Err(e) => t.record(false, || format!("nbh {i}: {e}")),
        }
    }
    let systems = [
        ("ax-by", renaming_system(&[(sym("a"), sym("x")), (sym("b"), sym("y"))])),
        ("ax-bx", renaming_system(&[(sym("a"), sym("x")), (sym("b"), sym("x"))])),
        ("chain", Rns::new(vec![RulePreform::simple("abz", lettered_chain("a", "b"), lettered("z")).expect("rule")]).expect("system")),
    ];
    for (name, w) in &systems {
        match AbstractionRelation::rns_abstraction(Kind::Uprns, &u, w, name, budget) {
            Ok(rel) => relation_laws(&mut t, &format!("rns {name}"), &rel),
            Err(e) => t.record(false, || format!("rns {name}: {e}")),
        }
    }
    let pairs: Vec<(Net, Net)> = u.iter().zip(u.iter().skip(1)).step_by(2).map(|(a, b)| (a.clone(), b.clone())).collect();
    relation_laws(&mut t, "closure", &equivalence_closure(&AbstractionRelation::from_pairs(Kind::Uprns, &u, &pairs, "pairs")));
    let small = sample(bound.min(2));
    let base = vec![SymbolCollapse::new(&[("b", "a")]).relation(&small), AbstractionRelation::kernel(Kind::Nbh, &small, |n| vec![n.len() as u8])];
    for k in 0..=2 {
        match multidim_theta(&base, k, MULTIDIM_LIMIT) {
            Ok(m) => relation_laws(&mut t, &format!("multidim level {k}"), &m.relation),
            Err(e) => t.record(false, || format!("multidim level {k}: {e}")),
        }
    }
    let tds = td_corpus();
    t.record(list_laws(&tds, parallel_td_check).is_ok(), || format!("parallel: {}", list_laws(&tds, parallel_td_check).unwrap_err()));
    let carriers: Jungle = tds.iter().map(|p| p.carrier.clone()).collect();
    let theta = SymbolCollapse::new(&[("q", "p")]).relation(&carriers);
    let by_carrier = |p: &Transducer, q: &Transducer| td_abstraction_check(p, q, &theta);
    t.record(list_laws(&tds, by_carrier).is_ok(), || format!("carrier relation: {}", list_laws(&tds, by_carrier).unwrap_err()));
    t.note(format!("universe of {} nets, {} transducers", u.len(), tds.len()));
    t
}

fn partially_quotient(bound: usize) -> Tally {
    let mut t = Tally::new("algebras", 5);
    let u = sample(bound.min(2));
    let budget = Budget::default();
    let ops = || -> Vec<(String, NetOp)> {
        vec![
            ("nf-ab".into(), operator_op(Operator::NormalForm(renaming_system(&[(sym("a"), sym("b"))])), budget)),
            ("step-ba".into(), operator_op(Operator::Step(renaming_system(&[(sym("b"), sym("a"))])), budget)),
            ("td-ax".into(), td_op(Transducer::single("p", vec![Operator::NormalForm(renaming_system(&[(sym("a"), sym("x"))]))]))),
        ]
    };
    let mut thetas = vec![
        ("identity".to_string(), AbstractionRelation::identity(Kind::Uprns, &u)),
        ("collapse".to_string(), SymbolCollapse::new(&[("b", "a")]).relation(&u)),
    ];
    let chain = Rns::new(vec![RulePreform::simple("abz", lettered_chain("a", "b"), lettered("z")).expect("rule")]).expect("system");
    for (name, w) in [("rns ax-bx", renaming_system(&[(sym("a"), sym("x")), (sym("b"), sym("x"))])), ("rns chain", chain)] {
        match AbstractionRelation::rns_abstraction(Kind::Uprns, &u, &w, name, budget) {
            Ok(rel) => thetas.push((name.to_string(), rel)),
            Err(e) => t.record(false, || format!("{name}: {e}")),
        }
    }
    for (i, h) in nbh_corpus().iter().enumerate().step_by(21) {
        if let Ok(rel) = AbstractionRelation::nbh_abstraction(&u, h, &format!("h{i}")) {
            thetas.push((format!("nbh {i}"), rel));
        }
    }
    let mut partitions = 0;
    for (name, theta) in thetas {
        match PartiallyQuotientAlgebra::induced(theta, ops()) {
            Ok(pqa) => {
                let mut rep = check_partially_quotient(&pqa);
                rep.extend(center_uniqueness(&pqa.partition));
                partitions += 1;
                t.record(rep.passes(), || format!("{name}: {}", failing_lines(&rep)));
            }
            Err(e) => t.record(false, || format!("{name}: {e}")),
        }
    }
    t.note(format!("{partitions} partitions"));
    t
}

fn cardinality() -> Tally {
    let mut t = Tally::new("instance levels", 6);
    let abc = vec![sym("a"), sym("b"), sym("c")];
    let ab = vec![sym("a"), sym("b")];
    let unary = |alpha: &[RankedSymbol]| -> Jungle { alpha.iter().map(|s| lettered(&s.name)).collect() };
    let mut instances = Vec::new();
    let td1 = Transducer::single("p", vec![Operator::Step(renaming_system(&[(sym("a"), sym("b"))]))]);
    let u = unary(&abc);
    instances.push(BoundInstance { td: td1.clone(), h: u.clone(), theta: AbstractionRelation::kernel(Kind::Nbh, &u, |_| Vec::new()), alphabet: abc.clone() });
    instances.push(BoundInstance { td: td1, h: u.clone(), theta: SymbolCollapse::new(&[("b", "a")]).relation(&u), alphabet: abc.clone() });
    let td2 = Transducer::chain(vec![
        ("p", vec![Operator::NormalForm(renaming_system(&[(sym("a"), sym("b"))]))]),
        ("q", vec![Operator::Step(renaming_system(&[(sym("b"), sym("a"))]))]),
    ])
    .expect("chain");
    let v = unary(&ab);
    instances.push(BoundInstance { td: td2.clone(), h: v.clone(), theta: AbstractionRelation::kernel(Kind::Nbh, &v, |_| Vec::new()), alphabet: ab.clone() });
    instances.push(BoundInstance {
        td: td2,
        h: Jungle::singleton(lettered("a")),
        theta: AbstractionRelation::identity(Kind::Nbh, &v),
        alphabet: ab,
    });
    for (i, inst) in instances.iter().enumerate() {
        let count = exhaustive_parallel_class(inst).len();
        for k in 0..=2 {
            for index in [BoundIndex::AllRules, BoundIndex::FirstRule] {
                match cardinality_bound(inst, k, index) {
                    Ok(mu) => t.record(mu >= count, || format!("instance {i} k={k} {index:?}: bound {mu} < count {count}")),
                    Err(e) => t.record(false, || format!("instance {i} k={k}: {e}")),
                }
            }
        }
    }
    t
}

/// The two-net, two-transducer seed of the evolution check.
pub fn evolution_seed() -> EvolutionState {
    let one = |n: &str| lettered(n);
    let u: Jungle = [one("a"), one("b")].into_iter().collect();
    let theta = SymbolCollapse::new(&[("b", "a"), ("d", "c"), ("q", "p")]);
    let step = |name: &str, pairs: &[(&str, &str)]| {
        let rules: Vec<(RankedSymbol, RankedSymbol)> = pairs.iter().map(|(a, b)| (sym(a), sym(b))).collect();
        Transducer::single(name, vec![Operator::Step(renaming_system(&rules))])
    };
    let seed = vec![step("p", &[("a", "c"), ("b", "d")]), step("q", &[("a", "d"), ("b", "c")])];
    let problems = vec![
        Problem::new(Jungle::singleton(one("a")), Recognizer::contains(&one("c"))).with_depth(1),
        Problem::new(Jungle::singleton(one("b")), Recognizer::contains(&one("d"))).with_depth(1),
        Problem::new(Jungle::singleton(one("a")), Recognizer::contains(&one("z"))).with_depth(1),
    ];
    EvolutionState::new(u, theta, seed, problems)
}

/// Schedule of (order, level) per evolution step.
pub const EVOLUTION_SCHEDULE: [(usize, usize); 3] = [(0, 0), (1, 1), (2, 1)];

fn evolution() -> Tally {
    let mut t = Tally::new("properties", 4);
    let st = evolution_seed();
    for n in 0..=2 {
        for k in 0..=2 {
            match n_level_solve(&st, n, k) {
                Ok(l) => t.record(l.closed(), || format!("order {n} level {k}: {:?}", l.violations)),
                Err(e) => t.record(false, || format!("order {n} level {k}: {e}")),
            }
        }
    }
    match (evolve(evolution_seed(), 3, &EVOLUTION_SCHEDULE), evolve(evolution_seed(), 3, &EVOLUTION_SCHEDULE)) {
        (Ok((a, ta)), Ok((_, tb))) => {
            let mono = a.solved.windows(2).all(|w| w[0].is_subset(&w[1]));
            t.record(mono, || format!("solved sets shrink: {:?}", a.solved));
            t.record(format_trace(&ta) == format_trace(&tb), || "trace differs between runs".into());
            t.note(format!("{} evolution levels", ta.len()));
        }
        (Err(e), _) | (_, Err(e)) => t.record(false, || format!("evolve: {e}")),
    }
    t
}

/// Systems for the oracle comparison, including ones that never stop.
fn oracle_systems() -> Vec<Rns> {
    let mut v = vec![
        renaming_system(&[(sym("a"), sym("b"))]),
        renaming_system(&[(sym("a"), sym("b")), (sym("b"), sym("a"))]),
        renaming_system(&[(sym("a"), sym("b")), (sym("b"), sym("c"))]),
        Rns::new(vec![RulePreform::simple("aab", lettered_chain("a", "a"), lettered("b")).expect("rule")]).expect("system"),
        Rns::new(vec![RulePreform::simple("ab-ba", lettered_chain("a", "b"), lettered_chain("b", "a")).expect("rule")]).expect("system"),
        Rns::new(vec![RulePreform::simple("grow", lettered("a"), lettered_chain("a", "b")).expect("rule")]).expect("system"),
    ];
    v.extend(rns_corpus().into_iter().step_by(4));
    v
}

fn oracle_agreement(bound: usize) -> Tally {
    let mut t = Tally::new("(system, jungle) pairs", 100);
    let s = sample(bound);
    let mut jungles: Vec<Jungle> = s.iter().map(|n| Jungle::singleton(n.clone())).collect();
    let nets: Vec<&Net> = s.iter().collect();
    for w in nets.windows(2).step_by(3) {
        jungles.push(w.iter().map(|n| (*n).clone()).collect());
    }
    let budget = Budget::default();
    for (i, r) in oracle_systems().iter().enumerate() {
        for j in &jungles {
            let engine = (closure(r, j, budget), normal_forms(r, j, budget));
            let oracle = (naive_rewrite_closure(r, j, budget), naive_normal_forms(r, j, budget));
            match (engine, oracle) {
                ((Ok(ec), Ok(en)), (Ok(oc), Ok(on))) => {
                    let (vc, vn) = (oracle_compare(&ec, &oc), oracle_compare(&en, &on));
                    t.record(vc.is_pass() && vn.is_pass(), || format!("system {i}: closure {vc}, normal forms {vn}"));
                }
                (e, o) => t.record(false, || format!("system {i}: engine {:?} oracle {:?}", e.0.err(), o.0.err())),
            }
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_id() {
        assert!(run_check("nope", 1).is_err());
    }

    #[test]
    fn corpora_sizes() {
        assert!(nbh_corpus().len() >= 50);
        assert!(rns_corpus().len() >= 50);
        assert_eq!(uprns_cases().len(), 10);
    }

    #[test]
    fn mutants_differ() {
        let c = &uprns_cases()[0];
        assert_ne!(mutate_disjoint(&c.valid).rules.len(), c.valid.rules.len());
        assert_eq!(mutate_injective(&c.valid).rules[1].right, c.valid.rules[0].right);
    }
}
