//! Brute-force ground truth for small formulas.
//!
//! Everything here is evaluated from the definitions: successor relations
//! are recomputed from tableau-set contents with [`set_successor`] and the
//! cloud relation by explicit quantifiers, never through the universe's
//! precomputed matrix.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::formula::Formula;
use crate::tableau::{
    is_tableau_set, set_successor, Cloud, Logic, TableauError, TableauSet, TableauUniverse,
};

/// Largest `A` for which all `2^A` cloud bitstrings are scanned.
pub const MAX_ORACLE_SETS: usize = 16;
/// Largest number of clouds for the literal subset enumeration.
pub const MAX_SUBSET_CLOUDS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Tableau(#[from] TableauError),
    #[error("too large for the oracle: {0}")]
    TooLarge(String),
}

fn members(u: &TableauUniverse, cloud: Cloud) -> Vec<TableauSet> {
    cloud.members().map(|i| u.set(i)).collect()
}

fn succ(u: &TableauUniverse, f: TableauSet, g: TableauSet) -> bool {
    set_successor(f, g, u.table(), u.logic())
}

/// Cloud successor, by quantifier evaluation over members.
pub fn cloud_successor_literal(u: &TableauUniverse, f: Cloud, g: Cloud) -> bool {
    let fs = members(u, f);
    let gs = members(u, g);
    let backward = gs.iter().all(|&gg| fs.iter().any(|&ff| succ(u, ff, gg)));
    let forward = fs.iter().all(|&ff| gs.iter().any(|&gg| succ(u, ff, gg)));
    match u.logic() {
        Logic::K4xS5 | Logic::S4xS5 => backward && forward,
        Logic::Ssl => backward,
    }
}

/// Cloud conditions from the definition.
pub fn is_cloud_literal(u: &TableauUniverse, cloud: Cloud) -> bool {
    let fs = members(u, cloud);
    if fs.is_empty() || cloud.members().any(|i| i >= u.len()) {
        return false;
    }
    if !fs.iter().all(|&f| is_tableau_set(f, u.table(), u.logic())) {
        return false;
    }
    let table = u.table();
    let k_part = |f: TableauSet| -> Vec<usize> { f.indices().filter(|&i| table.is_k(i)).collect() };
    if fs.iter().any(|&f| k_part(f) != k_part(fs[0])) {
        return false;
    }
    let in_all = |i: usize| fs.iter().all(|f| f.contains(i));
    table.k_entries().all(|(k, chi)| !in_all(chi) || in_all(k))
}

/// Whether obligation (`[]chi` missing from `f` in `cloud`) has a witness
/// in `tableau`.
fn discharged(
    u: &TableauUniverse,
    tableau: &BTreeSet<Cloud>,
    cloud: Cloud,
    f: TableauSet,
    chi: usize,
) -> bool {
    tableau.iter().any(|&g| {
        cloud_successor_literal(u, cloud, g)
            && members(u, g)
                .iter()
                .any(|&gg| succ(u, f, gg) && !gg.contains(chi))
    })
}

fn satisfies_condition_two(u: &TableauUniverse, tableau: &BTreeSet<Cloud>, cloud: Cloud) -> bool {
    members(u, cloud).iter().all(|&f| {
        u.table()
            .nec_entries()
            .filter(|&(nec, _)| !f.contains(nec))
            .all(|(_, chi)| discharged(u, tableau, cloud, f, chi))
    })
}

/// Literal check of the partial-tableau definition for `(phi, seq)`.
///
/// Returns false if `seq` is empty, not a chain of pairwise different
/// clouds, or if any element of `tableau` is not a cloud.
pub fn verify_partial_tableau(
    u: &TableauUniverse,
    tableau: &BTreeSet<Cloud>,
    seq: &[Cloud],
) -> bool {
    if seq.is_empty() {
        return false;
    }
    for (i, &c) in seq.iter().enumerate() {
        if seq[..i].contains(&c) || (i > 0 && !cloud_successor_literal(u, seq[i - 1], c)) {
            return false;
        }
    }
    if !tableau.iter().all(|&c| is_cloud_literal(u, c)) {
        return false;
    }
    // condition 1
    if !seq.iter().all(|c| tableau.contains(c)) {
        return false;
    }
    // condition 2, all but the first m elements of the sequence
    let exempt = &seq[..seq.len() - 1];
    tableau
        .iter()
        .filter(|c| !exempt.contains(c))
        .all(|&c| satisfies_condition_two(u, tableau, c))
}

/// All clouds, by scanning every bitstring of length `A`.
pub fn all_clouds(u: &TableauUniverse) -> Result<Vec<Cloud>, OracleError> {
    let a = u.len();
    if a > MAX_ORACLE_SETS {
        return Err(OracleError::TooLarge(format!(
            "{a} tableau-sets (max {MAX_ORACLE_SETS})"
        )));
    }
    if a == 0 {
        return Ok(Vec::new());
    }
    Ok((1u128..1 << a)
        .map(|v| Cloud(v << (128 - a)))
        .filter(|&c| is_cloud_literal(u, c))
        .collect())
}

/// The largest set of clouds in which every cloud has all its obligations
/// discharged inside the set.
///
/// Condition 2 is monotone in the tableau, so unions of partial tableaux
/// for one-element sequences are again partial tableaux and this set is
/// their union: `(phi, F_0)` has a partial tableau iff `F_0` is in it.
///
/// Each obligation keeps its current witness. When a witness dies the
/// scan resumes after it, since the live set only shrinks.
pub fn greatest_partial_tableau(u: &TableauUniverse) -> Result<BTreeSet<Cloud>, OracleError> {
    let clouds = all_clouds(u)?;
    let n = clouds.len();
    let a = u.len();
    let bit = |i: usize| Cloud::from_indices([i]).0;
    let rows: Vec<u128> = (0..a)
        .map(|i| {
            (0..a)
                .filter(|&j| succ(u, u.set(i), u.set(j)))
                .fold(0, |m, j| m | bit(j))
        })
        .collect();
    let lacking = |chi: usize| {
        (0..a)
            .filter(|&j| !u.set(j).contains(chi))
            .fold(0u128, |m, j| m | bit(j))
    };
    let forward = !matches!(u.logic(), Logic::Ssl);
    let cloud_succ = |f: Cloud, g: Cloud| {
        let sons = f.members().fold(0u128, |m, i| m | rows[i]);
        g.0 & !sons == 0 && (!forward || f.members().all(|i| rows[i] & g.0 != 0))
    };

    struct Obligation {
        cloud: usize,
        need: u128,
        next: usize,
    }
    let mut obligations = Vec::new();
    for (ci, c) in clouds.iter().enumerate() {
        for f in c.members() {
            for (nec, chi) in u.table().nec_entries() {
                if !u.set(f).contains(nec) {
                    obligations.push(Obligation {
                        cloud: ci,
                        need: rows[f] & lacking(chi),
                        next: 0,
                    });
                }
            }
        }
    }

    let mut alive = vec![true; n];
    let mut waiting: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut queue: Vec<usize> = (0..obligations.len()).collect();
    let mut removed = Vec::new();
    loop {
        while let Some(o) = queue.pop() {
            let ob = &mut obligations[o];
            if !alive[ob.cloud] {
                continue;
            }
            let c = clouds[ob.cloud];
            let mut witness = None;
            while ob.next < n {
                let g = ob.next;
                ob.next += 1;
                if alive[g] && clouds[g].0 & ob.need != 0 && cloud_succ(c, clouds[g]) {
                    witness = Some(g);
                    break;
                }
            }
            match witness {
                Some(g) => waiting[g].push(o),
                None => {
                    alive[ob.cloud] = false;
                    removed.push(ob.cloud);
                }
            }
        }
        match removed.pop() {
            Some(r) => queue.extend(std::mem::take(&mut waiting[r])),
            None => break,
        }
    }
    Ok(clouds
        .into_iter()
        .zip(alive)
        .filter_map(|(c, keep)| keep.then_some(c))
        .collect())
}

fn contains_formula(u: &TableauUniverse, cloud: Cloud) -> bool {
    let root = u.table().root();
    cloud.members().any(|i| u.set(i).contains(root))
}

/// True iff some cloud containing a set with the formula has a partial
/// tableau, decided with [`greatest_partial_tableau`].
pub fn exhaustive_search(formula: &Formula, logic: Logic) -> Result<bool, OracleError> {
    let u = TableauUniverse::new(formula, logic)?;
    exhaustive_search_in(&u)
}

pub fn exhaustive_search_in(u: &TableauUniverse) -> Result<bool, OracleError> {
    let greatest = greatest_partial_tableau(u)?;
    Ok(greatest.iter().any(|&c| contains_formula(u, c)))
}

/// The literal search: every subset of the clouds, every initial cloud.
/// Only feasible with at most [`MAX_SUBSET_CLOUDS`] clouds.
pub fn exhaustive_subset_search(formula: &Formula, logic: Logic) -> Result<bool, OracleError> {
    let u = TableauUniverse::new(formula, logic)?;
    let clouds = all_clouds(&u)?;
    if clouds.len() > MAX_SUBSET_CLOUDS {
        return Err(OracleError::TooLarge(format!(
            "{} clouds (max {MAX_SUBSET_CLOUDS})",
            clouds.len()
        )));
    }
    for subset in 1u32..1 << clouds.len() {
        let tableau: BTreeSet<Cloud> = (0..clouds.len())
            .filter(|i| subset >> i & 1 == 1)
            .map(|i| clouds[i])
            .collect();
        for &initial in &tableau {
            if contains_formula(&u, initial) && verify_partial_tableau(&u, &tableau, &[initial]) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}
