mod common;

use bimodal_sat::formula::{parse, Formula, Node};
use bimodal_sat::models::{check_frame, model_check, model_from_tableau, Model};
use bimodal_sat::oracle::{exhaustive_search_in, verify_partial_tableau};
use bimodal_sat::relations::FiniteRelation;
use bimodal_sat::solver::{solve_in, SearchOptions};
use bimodal_sat::tableau::{Logic, TableauUniverse};
use proptest::prelude::*;

fn formula(vars: u64, depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = (0..vars).prop_map(Formula::var);
    leaf.prop_recursive(depth, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::neg),
            inner.clone().prop_map(Formula::nec),
            inner.clone().prop_map(Formula::k),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::and(a, b)),
        ]
    })
}

fn logic() -> impl Strategy<Value = Logic> {
    prop_oneof![Just(Logic::K4xS5), Just(Logic::S4xS5), Just(Logic::Ssl)]
}

fn relation(max: usize) -> impl Strategy<Value = FiniteRelation> {
    (1..=max).prop_flat_map(|s| {
        proptest::collection::vec(any::<bool>(), s * s)
            .prop_map(move |bits| FiniteRelation::from_fn(s, |i, j| bits[i * s + j]))
    })
}

proptest! {
    #[test]
    fn render_parses_back(f in formula(1 << 20, 6)) {
        prop_assert_eq!(parse(&f.render()).unwrap(), f);
    }

    #[test]
    fn whitespace_is_ignored(f in formula(4, 5)) {
        // a space after every token; `[]` and `x<digits>` are single tokens
        let text: Vec<char> = f.render().chars().collect();
        let mut spaced = String::from("  ");
        for (i, &c) in text.iter().enumerate() {
            spaced.push(c);
            let inside = c == '[' || ((c == 'x' || c.is_ascii_digit()) && text.get(i + 1).is_some_and(char::is_ascii_digit));
            if !inside {
                spaced.push_str(" \t");
            }
        }
        prop_assert_eq!(parse(&spaced).unwrap(), f);
    }

    #[test]
    fn lengths_bound_subformulas(f in formula(8, 6)) {
        let lengths = f.lengths();
        let a = f.subformulas().len();
        prop_assert!(a <= lengths.ell);
        prop_assert!(lengths.ell <= lengths.n);
    }

    #[test]
    fn subformula_table_is_topological(f in formula(4, 6)) {
        let table = f.subformulas();
        prop_assert_eq!(table.root(), table.len() - 1);
        prop_assert_eq!(table.formula(table.root()), &f);
        for (i, node) in table.nodes().iter().enumerate() {
            let children: Vec<usize> = match node {
                Node::Atom(_) => vec![],
                Node::Neg(c) | Node::Nec(c) | Node::K(c) => vec![*c],
                Node::And(a, b) => vec![*a, *b],
            };
            prop_assert!(children.iter().all(|&c| c < i));
            prop_assert_eq!(table.index_of(table.formula(i)), Some(i));
        }
    }

    #[test]
    fn mcl_lemmas(r in relation(6), r2 in relation(6)) {
        let r = r.transitive_closure();
        let mcl = r.mcl().unwrap();
        prop_assert!(mcl < r.size());
        prop_assert_eq!(r.inverse().mcl().unwrap(), mcl);
        let strict = r.strict_part();
        prop_assert!(strict.is_transitive());
        prop_assert!((0..r.size()).all(|i| !strict.contains(i, i)));
        if r2.size() == r.size() {
            let r2 = r2.transitive_closure();
            prop_assert!(r.intersection(&r2).unwrap().mcl().unwrap() <= mcl + r2.mcl().unwrap());
        }
    }

    #[test]
    fn equivalence_classes_are_cliques(r in relation(6)) {
        let r = r.transitive_closure();
        for class in r.symmetric_equivalence().equivalence_classes().unwrap() {
            if class.len() >= 2 {
                for &s in &class {
                    for &t in &class {
                        prop_assert!(r.contains(s, t));
                    }
                }
            }
        }
    }

    #[test]
    fn lift_bound(r in relation(5)) {
        let r = r.transitive_closure();
        let lift = r.lift_powerset().unwrap();
        let classes = r.symmetric_equivalence().equivalence_classes().unwrap().len();
        prop_assert!(lift.is_transitive());
        prop_assert!(lift.mcl().unwrap() <= 2 * classes);
        prop_assert!((0..lift.size()).all(|x| lift.contains(x, 0)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solver_agrees_with_oracle(f in formula(2, 4), logic in logic()) {
        let u = TableauUniverse::new(&f, logic).unwrap();
        prop_assume!(u.len() <= 12);
        let verdict = solve_in(&u, &SearchOptions::new(logic).with_witness().audited()).unwrap();
        prop_assert_eq!(verdict.satisfiable, exhaustive_search_in(&u).unwrap());
        if let Some(t) = &verdict.witness {
            prop_assert!(verify_partial_tableau(&u, &t.clouds, &[t.initial]));
            prop_assert!(u.set(t.designated).contains(u.table().root()));
        }
    }

    #[test]
    fn memo_does_not_change_verdicts(f in formula(3, 5), logic in logic()) {
        let u = TableauUniverse::new(&f, logic).unwrap();
        prop_assume!(u.supports_clouds());
        let plain = solve_in(&u, &SearchOptions::new(logic)).unwrap();
        let memo = solve_in(&u, &SearchOptions::new(logic).memoized()).unwrap();
        prop_assert_eq!(plain.satisfiable, memo.satisfiable);
    }

    #[test]
    fn witness_models_round_trip(f in formula(3, 5), logic in logic()) {
        let u = TableauUniverse::new(&f, logic).unwrap();
        prop_assume!(u.supports_clouds());
        let verdict = solve_in(&u, &SearchOptions::new(logic).with_witness()).unwrap();
        if let Some(t) = &verdict.witness {
            let m = model_from_tableau(&u, t).unwrap();
            prop_assert!(check_frame(&m, logic).passed());
            prop_assert!(model_check(&m, m.designated.unwrap(), &f).unwrap());
            let back = Model::from_json_str(&m.to_json_string()).unwrap();
            prop_assert_eq!(back, m);
        }
    }

    #[test]
    fn cloud_relation_is_coherent(seed in any::<u64>(), logic in logic()) {
        use rand::SeedableRng;
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        for m in common::random_valid_models(&mut rng, logic, 3) {
            let q = m.cloud_relation().unwrap();
            prop_assert!(q.relation.is_transitive());
            if logic.is_reflexive() {
                prop_assert!(q.relation.is_preorder());
            }
        }
    }
}
