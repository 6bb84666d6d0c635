//! Corpus generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet};

use bimodal_sat::formula::{Formula, VarId};
use bimodal_sat::models::Model;
use bimodal_sat::relations::FiniteRelation;
use bimodal_sat::tableau::Logic;
use rand::rngs::StdRng;
use rand::Rng;

/// A random formula over `vars` variables whose `ell` is at most `budget`
/// (and at least 1).
pub fn random_formula(rng: &mut StdRng, budget: usize, vars: u64) -> Formula {
    if budget < 2 || rng.gen_bool(0.15) {
        return Formula::var(rng.gen_range(0..vars));
    }
    match rng.gen_range(0..4) {
        0 => Formula::neg(random_formula(rng, budget - 1, vars)),
        1 => Formula::nec(random_formula(rng, budget - 1, vars)),
        2 => Formula::k(random_formula(rng, budget - 1, vars)),
        _ if budget >= 5 => {
            let left = rng.gen_range(1..=budget - 4);
            Formula::and(
                random_formula(rng, left, vars),
                random_formula(rng, budget - 3 - left, vars),
            )
        }
        _ => Formula::neg(random_formula(rng, budget - 1, vars)),
    }
}

/// `count` distinct random formulas with `lo <= ell <= hi`.
pub fn random_corpus(
    rng: &mut StdRng,
    count: usize,
    lo: usize,
    hi: usize,
    vars: u64,
) -> Vec<Formula> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    while out.len() < count {
        let budget = rng.gen_range(lo..=hi);
        let f = random_formula(rng, budget, vars);
        let ell = f.lengths().ell;
        if (lo..=hi).contains(&ell) && seen.insert(f.clone()) {
            out.push(f);
        }
    }
    out
}

fn distinct_subformulas(f: &Formula) -> usize {
    f.subformulas().len()
}

/// Renames variables to `x0, x1, ...` in order of first occurrence.
pub fn canonical(f: &Formula) -> Formula {
    let mut names: BTreeMap<VarId, u64> = BTreeMap::new();
    fn go(f: &Formula, names: &mut BTreeMap<VarId, u64>) -> Formula {
        match f {
            Formula::Var(v) => {
                let next = names.len() as u64;
                Formula::var(*names.entry(v.clone()).or_insert(next))
            }
            Formula::Neg(a) => Formula::neg(go(a, names)),
            Formula::Nec(a) => Formula::nec(go(a, names)),
            Formula::K(a) => Formula::k(go(a, names)),
            Formula::And(a, b) => {
                let a = go(a, names);
                Formula::and(a, go(b, names))
            }
        }
    }
    go(f, &mut names)
}

/// Every formula over `x0, x1` with at most `max_a` distinct subformulas,
/// one representative per variable renaming.
pub fn small_formulas(max_a: usize) -> Vec<Formula> {
    let mut all: Vec<Formula> = vec![Formula::var(0), Formula::var(1)];
    let mut seen: HashSet<Formula> = all.iter().cloned().collect();
    let mut frontier = all.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        let mut consider = |g: Formula, next: &mut Vec<Formula>| {
            if distinct_subformulas(&g) <= max_a && !seen.contains(&g) {
                seen.insert(g.clone());
                next.push(g);
            }
        };
        for f in &frontier {
            consider(Formula::neg(f.clone()), &mut next);
            consider(Formula::nec(f.clone()), &mut next);
            consider(Formula::k(f.clone()), &mut next);
            for g in &all {
                consider(Formula::and(f.clone(), g.clone()), &mut next);
                consider(Formula::and(g.clone(), f.clone()), &mut next);
            }
        }
        all.extend(frontier.iter().cloned());
        for f in &frontier {
            for g in &frontier {
                consider(Formula::and(f.clone(), g.clone()), &mut next);
            }
        }
        frontier = next;
    }
    let mut out: Vec<Formula> = all.into_iter().filter(|f| canonical(f) == *f).collect();
    out.sort_by_key(|f| (f.render().len(), f.render()));
    out
}

/// Frames and valuations on at most four worlds that satisfy every frame
/// condition of `logic`, found by closing random relations.
pub fn random_valid_models(rng: &mut StdRng, logic: Logic, count: usize) -> Vec<Model> {
    let mut out: Vec<Model> = Vec::new();
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        assert!(
            attempts < 100_000,
            "could not generate enough {logic} models"
        );
        let s = rng.gen_range(1..=4);
        let l = random_equivalence(rng, s);
        let mut diamond = FiniteRelation::from_fn(s, |_, _| rng.gen_bool(0.25));
        if logic.is_reflexive() {
            for w in 0..s {
                diamond.insert(w, w);
            }
        }
        let diamond = close_commuting(diamond, &l, logic.needs_right_commutativity());
        let vars = rng.gen_range(1..=2u64);
        let mut valuation: BTreeMap<VarId, BTreeSet<usize>> = BTreeMap::new();
        // SSL needs atoms constant along the diamond relation
        let components = if logic == Logic::Ssl {
            FiniteRelation::from_fn(s, |a, b| {
                diamond.contains(a, b) || diamond.contains(b, a) || a == b
            })
            .transitive_closure()
        } else {
            FiniteRelation::identity(s)
        };
        for v in 0..vars {
            let mut ws = BTreeSet::new();
            for w in 0..s {
                let leader = (0..s).find(|&x| components.contains(w, x)).unwrap();
                if leader == w {
                    if rng.gen_bool(0.5) {
                        ws.insert(w);
                    }
                } else if ws.contains(&leader) {
                    ws.insert(w);
                }
            }
            valuation.insert(VarId::new(v), ws);
        }
        let model = Model::new(diamond, l, valuation);
        if !out.contains(&model) {
            out.push(model);
        }
    }
    out
}

pub fn random_equivalence(rng: &mut StdRng, s: usize) -> FiniteRelation {
    let labels: Vec<usize> = (0..s).map(|_| rng.gen_range(0..s)).collect();
    FiniteRelation::from_fn(s, |a, b| labels[a] == labels[b])
}

pub fn random_transitive(rng: &mut StdRng, s: usize, density: f64) -> FiniteRelation {
    FiniteRelation::from_fn(s, |_, _| rng.gen_bool(density)).transitive_closure()
}

/// A transitive superset of `r` that commutes with `l` on the left
/// (and on the right if asked). Each failing triple is repaired by adding
/// the pair `(w, u')`.
pub fn close_commuting(mut r: FiniteRelation, l: &FiniteRelation, right: bool) -> FiniteRelation {
    loop {
        r = r.transitive_closure();
        if let Some((w, _u, u2)) = r.left_commutativity_violation(l) {
            r.insert(w, u2);
            continue;
        }
        if right {
            if let Some((w, _w2, u2)) = r.right_commutativity_violation(l) {
                r.insert(w, u2);
                continue;
            }
        }
        return r;
    }
}
