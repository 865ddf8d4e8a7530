use netrw::abstraction::{check_equivalence_laws, AbstractionRelation, Kind};
use netrw::checks::{lettered, sample, sym};
use netrw::checks::nbh_corpus;
use netrw::io::{parse_jungle, parse_net, serialize_jungle, serialize_net};
use netrw::morphism::nbh_image;
use netrw::oracle::{naive_normal_forms, oracle_compare};
use netrw::rewrite::{normal_forms, relabel_rule, Budget, Rns};
use netrw::solver::SymbolCollapse;
use netrw::transducer::{run_td, td_compose, Operator, Transducer};
use netrw::{canonical_form, is_isomorphic, Jungle, Net};
use proptest::prelude::*;
use std::sync::OnceLock;

fn nets() -> &'static Vec<Net> {
    static NETS: OnceLock<Vec<Net>> = OnceLock::new();
    NETS.get_or_init(|| sample(3).iter().cloned().collect())
}

fn net() -> impl Strategy<Value = Net> {
    (0..nets().len()).prop_map(|i| nets()[i].clone())
}

fn letter() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["a", "b", "c", "d"])
}

fn renaming() -> impl Strategy<Value = Rns> {
    prop::collection::btree_map(letter(), letter(), 0..3).prop_map(|m| {
        let rules = m.iter().filter(|(a, b)| a != b).map(|(a, b)| relabel_rule(&format!("{a}{b}"), &sym(a), &sym(b))).collect();
        Rns::new(rules).expect("renaming")
    })
}

fn step_td(name: &'static str) -> impl Strategy<Value = Transducer> {
    renaming().prop_map(move |r| Transducer::single(name, vec![Operator::Step(r)]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn serialize_round_trips(n in net()) {
        let back = parse_net(&serialize_net(&n)).unwrap();
        prop_assert!(is_isomorphic(&n, &back));
        prop_assert_eq!(canonical_form(&n), canonical_form(&back));
    }

    #[test]
    fn jungle_serialization_is_stable(ns in prop::collection::vec(net(), 0..5)) {
        let j: Jungle = ns.into_iter().collect();
        let text = serialize_jungle(&j);
        let back = parse_jungle(&text).unwrap();
        prop_assert_eq!(&back, &j);
        prop_assert_eq!(serialize_jungle(&back), text);
    }

    #[test]
    fn compose_is_associative(p in step_td("p"), q in step_td("q"), r in step_td("r"), n in net()) {
        let left = td_compose(&td_compose(&p, &q).unwrap(), &r).unwrap();
        let right = td_compose(&p, &td_compose(&q, &r).unwrap()).unwrap();
        let s = Jungle::singleton(n);
        prop_assert_eq!(run_td(&left, &s).unwrap(), run_td(&right, &s).unwrap());
    }

    #[test]
    fn run_td_is_deterministic(p in step_td("p"), ns in prop::collection::vec(net(), 1..4)) {
        let s: Jungle = ns.into_iter().collect();
        prop_assert_eq!(run_td(&p, &s).unwrap(), run_td(&p, &s).unwrap());
    }

    #[test]
    fn engine_matches_oracle_on_renamings(r in renaming(), n in net()) {
        let r = &r;
        let s = Jungle::singleton(n);
        let budget = Budget::new(8, 8, 256);
        let e = normal_forms(r, &s, budget).unwrap();
        let o = naive_normal_forms(r, &s, budget).unwrap();
        prop_assert!(oracle_compare(&e, &o).is_pass());
    }

    #[test]
    fn nbh_images_never_shrink(i in 0..64usize, n in net()) {
        let h = &nbh_corpus()[8 + i];
        for img in &nbh_image(h, &n).unwrap() {
            prop_assert!(img.len() >= n.len());
        }
    }

    #[test]
    fn collapses_are_equivalences(pairs in prop::collection::vec((letter(), letter()), 0..3)) {
        let u = sample(2);
        let theta = SymbolCollapse::new(&pairs).relation(&u);
        prop_assert!(check_equivalence_laws(&theta).passes());
        prop_assert!(theta.related(&lettered("a"), &lettered("a")));
    }
}

#[test]
fn identity_relation_is_an_equivalence() {
    let rel = AbstractionRelation::identity(Kind::Nbh, &sample(2));
    assert!(check_equivalence_laws(&rel).passes());
}
