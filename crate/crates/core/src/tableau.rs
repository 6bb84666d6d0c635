//! Tableau-sets, tableau-clouds and the successor relations between them.
//!
//! A tableau-set is a subset of the subformula table; it is stored as a
//! `u64` whose most significant bit is subformula 0. A cloud is a set of
//! tableau-sets of one [`TableauUniverse`], stored as a `u128` whose most
//! significant bit is tableau-set 0. With that layout numeric order is the
//! alphabetical order of the bitstrings `s_1 .. s_a` resp. `b_1 .. b_A`,
//! which is the order in which sets and clouds are enumerated.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Formula, Node, SubformulaTable};

/// Widest subformula table a tableau-set can index.
pub const MAX_SUBFORMULAS: usize = 64;
/// Largest universe over which clouds can be formed.
pub const MAX_CLOUD_WIDTH: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Logic {
    #[serde(rename = "k4s5")]
    K4xS5,
    #[serde(rename = "s4s5")]
    S4xS5,
    #[serde(rename = "ssl")]
    Ssl,
}

impl Logic {
    pub const ALL: [Logic; 3] = [Logic::K4xS5, Logic::S4xS5, Logic::Ssl];

    /// Whether `[]chi` in a tableau-set forces `chi` (reflexive diamond relation).
    pub fn is_reflexive(self) -> bool {
        !matches!(self, Logic::K4xS5)
    }

    /// Whether cloud successors must also satisfy the forward condition
    /// (every member has a son), i.e. right commutativity is required.
    pub fn needs_right_commutativity(self) -> bool {
        !matches!(self, Logic::Ssl)
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Logic::K4xS5 => "k4s5",
            Logic::S4xS5 => "s4s5",
            Logic::Ssl => "ssl",
        }
    }
}

impl fmt::Display for Logic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Logic::K4xS5 => "K4xS5",
            Logic::S4xS5 => "S4xS5",
            Logic::Ssl => "SSL",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown logic {0:?} (expected k4s5, s4s5 or ssl)")]
pub struct UnknownLogic(pub String);

impl FromStr for Logic {
    type Err = UnknownLogic;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "k4s5" | "k4xs5" => Ok(Logic::K4xS5),
            "s4s5" | "s4xs5" => Ok(Logic::S4xS5),
            "ssl" => Ok(Logic::Ssl),
            _ => Err(UnknownLogic(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableauError {
    #[error("formula has {0} subformulas; at most {MAX_SUBFORMULAS} are supported")]
    TooManySubformulas(usize),
    #[error("formula has {0} tableau-sets; clouds need at most {MAX_CLOUD_WIDTH}")]
    TooManyTableauSets(usize),
}

/// Bit of subformula `i` in a tableau-set.
#[inline]
pub const fn sf_bit(i: usize) -> u64 {
    1u64 << (63 - i)
}

/// Bit of tableau-set `i` in a cloud.
#[inline]
pub const fn set_bit(i: usize) -> u128 {
    1u128 << (127 - i)
}

/// A subset of the subformula table.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TableauSet(pub u64);

impl TableauSet {
    pub const EMPTY: TableauSet = TableauSet(0);

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        TableauSet(indices.into_iter().fold(0, |acc, i| acc | sf_bit(i)))
    }

    #[inline]
    pub fn contains(self, i: usize) -> bool {
        self.0 & sf_bit(i) != 0
    }

    #[inline]
    pub fn is_subset(self, other: TableauSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..64).filter(move |&i| bits & sf_bit(i) != 0)
    }

    /// The bitstring `s_1 .. s_a`.
    pub fn bitstring(self, width: usize) -> String {
        (0..width)
            .map(|i| if self.contains(i) { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Debug for TableauSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.indices()).finish()
    }
}

/// A set of tableau-sets, by index into a [`TableauUniverse`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Cloud(pub u128);

impl Cloud {
    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        Cloud(indices.into_iter().fold(0, |acc, i| acc | set_bit(i)))
    }

    #[inline]
    pub fn contains(self, i: usize) -> bool {
        self.0 & set_bit(i) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn members(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.leading_zeros() as usize;
            bits &= !set_bit(i);
            Some(i)
        })
    }

    /// The bitstring `b_1 .. b_A`.
    pub fn bitstring(self, width: usize) -> String {
        (0..width)
            .map(|i| if self.contains(i) { '1' } else { '0' })
            .collect()
    }

    pub fn parse_bitstring(s: &str) -> Option<Cloud> {
        if s.len() > MAX_CLOUD_WIDTH {
            return None;
        }
        let mut c = 0u128;
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '1' => c |= set_bit(i),
                '0' => {}
                _ => return None,
            }
        }
        Some(Cloud(c))
    }
}

impl fmt::Debug for Cloud {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.members()).finish()
    }
}

/// Conditions (a)-(c), plus (d) for the reflexive logics.
pub fn is_tableau_set(set: TableauSet, table: &SubformulaTable, logic: Logic) -> bool {
    table.nodes().iter().enumerate().all(|(i, node)| {
        let here = set.contains(i);
        match *node {
            Node::Atom(_) => true,
            Node::Neg(c) => here != set.contains(c),
            Node::And(l, r) => here == (set.contains(l) && set.contains(r)),
            Node::K(c) => !here || set.contains(c),
            Node::Nec(c) => !logic.is_reflexive() || !here || set.contains(c),
        }
    })
}

/// Masks over the subformula table used by the successor relation.
#[derive(Debug, Clone, Copy)]
struct SfMasks {
    nec: u64,
    k: u64,
    atoms: u64,
}

impl SfMasks {
    fn new(table: &SubformulaTable) -> Self {
        let mut m = SfMasks {
            nec: 0,
            k: 0,
            atoms: 0,
        };
        for (i, node) in table.nodes().iter().enumerate() {
            match node {
                Node::Nec(_) => m.nec |= sf_bit(i),
                Node::K(_) => m.k |= sf_bit(i),
                Node::Atom(_) => m.atoms |= sf_bit(i),
                _ => {}
            }
        }
        m
    }
}

/// `{chi | []chi in set}` as a tableau-set mask.
fn nec_bodies(set: TableauSet, table: &SubformulaTable) -> u64 {
    table
        .nec_entries()
        .filter(|&(i, _)| set.contains(i))
        .fold(0, |acc, (_, c)| acc | sf_bit(c))
}

/// `F <=_X G`: G can be an X-successor of F.
pub fn set_successor(f: TableauSet, g: TableauSet, table: &SubformulaTable, logic: Logic) -> bool {
    let masks = SfMasks::new(table);
    successor_with(f, g, nec_bodies(f, table), masks, logic)
}

#[inline]
fn successor_with(
    f: TableauSet,
    g: TableauSet,
    f_bodies: u64,
    masks: SfMasks,
    logic: Logic,
) -> bool {
    let boxes_kept = (f.0 & masks.nec) & !g.0 == 0;
    boxes_kept
        && match logic {
            Logic::K4xS5 => f_bodies & !g.0 == 0,
            Logic::S4xS5 => true,
            Logic::Ssl => f.0 & masks.atoms == g.0 & masks.atoms,
        }
}

/// All tableau-sets of a formula for one logic, in alphabetical order,
/// with the projections and the successor matrix precomputed.
#[derive(Debug, Clone)]
pub struct TableauUniverse {
    formula: Formula,
    table: SubformulaTable,
    logic: Logic,
    sets: Vec<TableauSet>,
    k_proj: Vec<u64>,
    nec_proj: Vec<u64>,
    atom_proj: Vec<u64>,
    bodies: Vec<u64>,
    /// Row `i` is the cloud of all `G` with `sets[i] <= G`; empty when the
    /// universe is too wide for clouds.
    succ: Vec<u128>,
}

impl TableauUniverse {
    pub fn new(formula: &Formula, logic: Logic) -> Result<Self, TableauError> {
        let table = formula.subformulas();
        let sets = enumerate_tableau_sets(&table, logic)?;
        Ok(Self::from_sets(formula.clone(), table, logic, sets))
    }

    fn from_sets(
        formula: Formula,
        table: SubformulaTable,
        logic: Logic,
        sets: Vec<TableauSet>,
    ) -> Self {
        let masks = SfMasks::new(&table);
        let k_proj = sets.iter().map(|s| s.0 & masks.k).collect();
        let nec_proj = sets.iter().map(|s| s.0 & masks.nec).collect();
        let atom_proj = sets.iter().map(|s| s.0 & masks.atoms).collect();
        let bodies: Vec<u64> = sets.iter().map(|&s| nec_bodies(s, &table)).collect();
        let succ = if sets.len() <= MAX_CLOUD_WIDTH {
            sets.iter()
                .zip(&bodies)
                .map(|(&f, &fb)| {
                    sets.iter()
                        .enumerate()
                        .filter(|&(_, &g)| successor_with(f, g, fb, masks, logic))
                        .fold(0u128, |acc, (j, _)| acc | set_bit(j))
                })
                .collect()
        } else {
            Vec::new()
        };
        TableauUniverse {
            formula,
            table,
            logic,
            sets,
            k_proj,
            nec_proj,
            atom_proj,
            bodies,
            succ,
        }
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn table(&self) -> &SubformulaTable {
        &self.table
    }

    pub fn logic(&self) -> Logic {
        self.logic
    }

    pub fn sets(&self) -> &[TableauSet] {
        &self.sets
    }

    pub fn set(&self, i: usize) -> TableauSet {
        self.sets[i]
    }

    /// Number of tableau-sets, `A`.
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn index_of(&self, set: TableauSet) -> Option<usize> {
        self.sets.binary_search(&set).ok()
    }

    pub fn k_projection(&self, i: usize) -> u64 {
        self.k_proj[i]
    }

    pub fn nec_projection(&self, i: usize) -> u64 {
        self.nec_proj[i]
    }

    pub fn atom_projection(&self, i: usize) -> u64 {
        self.atom_proj[i]
    }

    /// `{chi | []chi in F}` for tableau-set `i`.
    pub fn nec_bodies(&self, i: usize) -> u64 {
        self.bodies[i]
    }

    pub fn supports_clouds(&self) -> bool {
        self.sets.len() <= MAX_CLOUD_WIDTH
    }

    pub fn require_clouds(&self) -> Result<(), TableauError> {
        if self.supports_clouds() {
            Ok(())
        } else {
            Err(TableauError::TooManyTableauSets(self.sets.len()))
        }
    }

    /// `sets[i] <= sets[j]`.
    #[inline]
    pub fn successor(&self, i: usize, j: usize) -> bool {
        self.succ[i] & set_bit(j) != 0
    }

    /// Cloud of all `G` with `sets[i] <= G`.
    #[inline]
    pub fn successors(&self, i: usize) -> Cloud {
        Cloud(self.succ[i])
    }

    /// The cloud containing every tableau-set.
    pub fn full_cloud(&self) -> Cloud {
        Cloud::from_indices(0..self.sets.len())
    }

    /// Cloud of the tableau-sets not containing subformula `sf`.
    pub fn lacking(&self, sf: usize) -> Cloud {
        Cloud::from_indices((0..self.sets.len()).filter(|&i| !self.sets[i].contains(sf)))
    }

    /// Cloud of the tableau-sets containing subformula `sf`.
    pub fn having(&self, sf: usize) -> Cloud {
        Cloud::from_indices((0..self.sets.len()).filter(|&i| self.sets[i].contains(sf)))
    }

    /// Cloud conditions (a) and (b), plus nonemptiness.
    pub fn is_cloud(&self, cloud: Cloud) -> bool {
        let mut members = cloud.members();
        let Some(first) = members.next() else {
            return false;
        };
        if first >= self.sets.len() {
            return false;
        }
        let k = self.k_proj[first];
        let mut common = self.sets[first].0;
        for i in members {
            if i >= self.sets.len() || self.k_proj[i] != k {
                return false;
            }
            common &= self.sets[i].0;
        }
        self.table
            .k_entries()
            .all(|(ki, c)| common & sf_bit(c) == 0 || common & sf_bit(ki) != 0)
    }

    /// `f <=_X g` on clouds.
    pub fn cloud_successor(&self, f: Cloud, g: Cloud) -> bool {
        let reach = f.members().fold(0u128, |acc, i| acc | self.succ[i]);
        // every member of g has a father in f
        if g.0 & !reach != 0 {
            return false;
        }
        // every member of f has a son in g
        !self.logic.needs_right_commutativity() || f.members().all(|i| self.succ[i] & g.0 != 0)
    }

    /// Clouds in ascending bitstring order. See [`CloudIter`].
    pub fn clouds(&self) -> CloudIter<'_> {
        CloudIter::new(self)
    }
}

/// Enumerates `T^X_phi` in alphabetical order of the bitstrings `s_1..s_a`.
///
/// Subformula children precede their parents, so fixing bits left to right
/// leaves every negation and conjunction forced and every modality forced
/// off when its body is absent. The search never hits a dead end.
pub fn enumerate_tableau_sets(
    table: &SubformulaTable,
    logic: Logic,
) -> Result<Vec<TableauSet>, TableauError> {
    let mut out = Vec::new();
    for_each_tableau_set(table, logic, |s| out.push(s))?;
    Ok(out)
}

/// Number of tableau-sets, without materialising them.
pub fn count_tableau_sets(table: &SubformulaTable, logic: Logic) -> Result<u64, TableauError> {
    let mut n = 0u64;
    for_each_tableau_set(table, logic, |_| n += 1)?;
    Ok(n)
}

fn for_each_tableau_set(
    table: &SubformulaTable,
    logic: Logic,
    mut emit: impl FnMut(TableauSet),
) -> Result<(), TableauError> {
    if table.len() > MAX_SUBFORMULAS {
        return Err(TableauError::TooManySubformulas(table.len()));
    }
    fn go(
        i: usize,
        bits: u64,
        table: &SubformulaTable,
        logic: Logic,
        emit: &mut dyn FnMut(TableauSet),
    ) {
        if i == table.len() {
            emit(TableauSet(bits));
            return;
        }
        let has = |j: usize| bits & sf_bit(j) != 0;
        let (can_be_out, can_be_in) = match *table.node(i) {
            Node::Atom(_) => (true, true),
            Node::Neg(c) => (has(c), !has(c)),
            Node::And(l, r) => {
                let v = has(l) && has(r);
                (!v, v)
            }
            Node::K(c) => (true, has(c)),
            Node::Nec(c) => (true, !logic.is_reflexive() || has(c)),
        };
        if can_be_out {
            go(i + 1, bits, table, logic, emit);
        }
        if can_be_in {
            go(i + 1, bits | sf_bit(i), table, logic, emit);
        }
    }
    go(0, 0, table, logic, &mut emit);
    Ok(())
}

/// The literal enumeration: test every bitstring of length `a` in order.
pub fn enumerate_tableau_sets_naive(
    table: &SubformulaTable,
    logic: Logic,
) -> Result<Vec<TableauSet>, TableauError> {
    let a = table.len();
    if a > 24 {
        return Err(TableauError::TooManySubformulas(a));
    }
    Ok((0u64..1 << a)
        .map(|v| TableauSet(if a == 0 { 0 } else { v << (64 - a) }))
        .filter(|&s| is_tableau_set(s, table, logic))
        .collect())
}

/// Iterator over clouds in ascending bitstring order.
///
/// The cursor is the last yielded `A`-bit string. Every cloud lies inside
/// one class of tableau-sets with equal `K`-projection, so the next
/// candidate is the least submask of some class above the cursor; the
/// cloud condition (b), an optional restriction mask and a caller filter
/// are then applied.
pub struct CloudIter<'u> {
    universe: &'u TableauUniverse,
    classes: Vec<u128>,
    unit: u128,
    cursor: Option<u128>,
    done: bool,
    filter: Option<Box<dyn FnMut(Cloud) -> bool + 'u>>,
}

impl<'u> CloudIter<'u> {
    pub fn new(universe: &'u TableauUniverse) -> Self {
        let a = universe.len();
        let mut classes: Vec<(u64, u128)> = Vec::new();
        for i in 0..a.min(MAX_CLOUD_WIDTH) {
            let k = universe.k_projection(i);
            match classes.iter_mut().find(|(kk, _)| *kk == k) {
                Some((_, mask)) => *mask |= set_bit(i),
                None => classes.push((k, set_bit(i))),
            }
        }
        CloudIter {
            universe,
            classes: classes.into_iter().map(|(_, m)| m).collect(),
            unit: if a == 0 || a > MAX_CLOUD_WIDTH {
                0
            } else {
                1u128 << (128 - a)
            },
            cursor: None,
            done: a == 0 || a > MAX_CLOUD_WIDTH,
            filter: None,
        }
    }

    /// Only yield clouds that are subsets of `mask`.
    pub fn restrict(mut self, mask: Cloud) -> Self {
        for c in &mut self.classes {
            *c &= mask.0;
        }
        self.classes.retain(|&c| c != 0);
        self
    }

    pub fn with_filter(mut self, filter: impl FnMut(Cloud) -> bool + 'u) -> Self {
        self.filter = Some(Box::new(filter));
        self
    }

    /// Current cursor, the bitstring of the last cloud yielded.
    pub fn cursor(&self) -> Option<Cloud> {
        self.cursor.map(Cloud)
    }

    fn next_candidate(&self) -> Option<u128> {
        let from = match self.cursor {
            None => self.unit,
            Some(c) => c.checked_add(self.unit)?,
        };
        self.classes
            .iter()
            .filter_map(|&m| least_submask_at_least(from, m, self.unit))
            .min()
    }
}

/// Least `s` with `s` a submask of `mask`, `s >= from` and `s` a multiple of
/// `unit` (all masks have zero low bits below `unit`).
fn least_submask_at_least(mut from: u128, mask: u128, unit: u128) -> Option<u128> {
    loop {
        let bad = from & !mask;
        if bad == 0 {
            return Some(from);
        }
        let h = 127 - bad.leading_zeros();
        if h == 127 {
            return None;
        }
        // clear bits 0..=h and carry into bit h+1
        let step = 1u128 << (h + 1);
        from = (from & !(step - 1)).checked_add(step)?;
        debug_assert!(from.is_multiple_of(unit));
    }
}

impl Iterator for CloudIter<'_> {
    type Item = Cloud;

    fn next(&mut self) -> Option<Cloud> {
        while !self.done {
            let Some(c) = self.next_candidate() else {
                self.done = true;
                break;
            };
            self.cursor = Some(c);
            let cloud = Cloud(c);
            if !self.universe.is_cloud(cloud) {
                continue;
            }
            if let Some(filter) = self.filter.as_mut() {
                if !filter(cloud) {
                    continue;
                }
            }
            return Some(cloud);
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn universe(s: &str, logic: Logic) -> TableauUniverse {
        TableauUniverse::new(&parse(s).unwrap(), logic).unwrap()
    }

    fn sets_as_indices(u: &TableauUniverse) -> Vec<Vec<usize>> {
        u.sets().iter().map(|s| s.indices().collect()).collect()
    }

    #[test]
    fn tableau_set_conditions() {
        let t = parse("x0").unwrap().subformulas();
        assert!(is_tableau_set(TableauSet::EMPTY, &t, Logic::S4xS5));

        let t = parse("[]x0").unwrap().subformulas();
        let only_box = TableauSet::from_indices([1]);
        assert!(!is_tableau_set(only_box, &t, Logic::S4xS5));
        assert!(!is_tableau_set(only_box, &t, Logic::Ssl));
        assert!(is_tableau_set(only_box, &t, Logic::K4xS5));

        let t = parse("(x0 & ~x0)").unwrap().subformulas();
        assert!(!is_tableau_set(TableauSet::EMPTY, &t, Logic::K4xS5));
        assert!(is_tableau_set(
            TableauSet::from_indices([1]),
            &t,
            Logic::K4xS5
        ));
        assert!(!is_tableau_set(
            TableauSet::from_indices([0, 1]),
            &t,
            Logic::K4xS5
        ));
    }

    #[test]
    fn enumeration_examples() {
        // sf(x0) = [x0]
        assert_eq!(
            sets_as_indices(&universe("x0", Logic::S4xS5)),
            vec![vec![], vec![0]]
        );
        // sf(Kx0) = [x0, Kx0]
        for logic in Logic::ALL {
            assert_eq!(
                sets_as_indices(&universe("Kx0", logic)),
                vec![vec![], vec![0], vec![0, 1]]
            );
        }
        // alphabetical: 00, 01, 10, 11
        assert_eq!(
            sets_as_indices(&universe("[]x0", Logic::K4xS5)),
            vec![vec![], vec![1], vec![0], vec![0, 1]]
        );
        assert_eq!(sets_as_indices(&universe("[]x0", Logic::S4xS5)).len(), 3);
        assert_eq!(universe("[][][]x0", Logic::S4xS5).len(), 5);
    }

    #[test]
    fn pruned_matches_naive() {
        for s in [
            "x0",
            "~[]~x0",
            "(K[]x0 & <>~Kx0)",
            "((x0 & x1) -> [](x0 | Kx1))",
            "(x0 <-> []x0)",
        ] {
            let t = parse(s).unwrap().subformulas();
            for logic in Logic::ALL {
                assert_eq!(
                    enumerate_tableau_sets(&t, logic).unwrap(),
                    enumerate_tableau_sets_naive(&t, logic).unwrap(),
                    "{s} {logic}"
                );
                assert_eq!(
                    count_tableau_sets(&t, logic).unwrap() as usize,
                    enumerate_tableau_sets(&t, logic).unwrap().len()
                );
            }
        }
    }

    #[test]
    fn set_successor_examples() {
        let t = parse("x0").unwrap().subformulas();
        let x0 = TableauSet::from_indices([0]);
        assert!(!set_successor(x0, TableauSet::EMPTY, &t, Logic::Ssl));
        assert!(set_successor(x0, TableauSet::EMPTY, &t, Logic::S4xS5));

        // sf([]x0) = [x0, []x0]
        let t = parse("[]x0").unwrap().subformulas();
        let boxed = TableauSet::from_indices([1]);
        assert!(!set_successor(
            boxed,
            TableauSet::from_indices([0]),
            &t,
            Logic::K4xS5
        ));
        assert!(set_successor(
            boxed,
            TableauSet::from_indices([0, 1]),
            &t,
            Logic::K4xS5
        ));
        assert!(!set_successor(boxed, boxed, &t, Logic::K4xS5));
    }

    #[test]
    fn matrix_agrees_with_definition() {
        let u = universe("(K[]x0 & <>~Kx0)", Logic::K4xS5);
        for i in 0..u.len() {
            for j in 0..u.len() {
                assert_eq!(
                    u.successor(i, j),
                    set_successor(u.set(i), u.set(j), u.table(), u.logic())
                );
            }
        }
    }

    #[test]
    fn cloud_examples() {
        // sets: 0 = {}, 1 = {x0}, 2 = {x0, Kx0}
        let u = universe("Kx0", Logic::S4xS5);
        assert!(!u.is_cloud(Cloud::from_indices([1])));
        assert!(u.is_cloud(Cloud::from_indices([0, 1])));
        assert!(!u.is_cloud(Cloud::from_indices([0, 2])));
        assert!(!u.is_cloud(Cloud::default()));
    }

    #[test]
    fn cloud_successor_examples() {
        let u = universe("(x0 & <>~x0)", Logic::S4xS5);
        for c in u.clouds() {
            assert!(u.cloud_successor(c, c));
        }

        // sets of []x0 in SSL: 0 = {}, 1 = {x0}, 2 = {x0, []x0}
        // {} has no son in {{x0, []x0}}, which only the backward condition ignores
        let u = universe("[]x0", Logic::Ssl);
        let from = Cloud::from_indices([0, 2]);
        let to = Cloud::from_indices([2]);
        assert!(!u.successor(0, 2));
        assert!(u.cloud_successor(from, to));
        assert!(!u.cloud_successor(to, from));

        // sets of []x0 in K4xS5: 0 = {}, 1 = {[]x0}, 2 = {x0}, 3 = {x0, []x0}
        let u = universe("[]x0", Logic::K4xS5);
        let from = Cloud::from_indices([0, 1]);
        let to = Cloud::from_indices([2]);
        assert!(!u.cloud_successor(from, to));
        assert!(u.cloud_successor(Cloud::from_indices([0]), to));
    }

    #[test]
    fn cloud_iteration_order() {
        let u = universe("Kx0", Logic::S4xS5);
        let all: Vec<_> = u.clouds().collect();
        // bitstrings 001, 100, 110
        assert_eq!(
            all,
            vec![
                Cloud::from_indices([2]),
                Cloud::from_indices([0]),
                Cloud::from_indices([0, 1])
            ]
        );
        assert_eq!(
            all.iter().map(|c| c.bitstring(3)).collect::<Vec<_>>(),
            ["001", "100", "110"]
        );

        let root = u.table().root();
        let with_phi: Vec<_> = u
            .clouds()
            .with_filter(|c| c.members().any(|i| u.set(i).contains(root)))
            .collect();
        assert_eq!(with_phi, vec![Cloud::from_indices([2])]);
    }

    #[test]
    fn cloud_iteration_matches_brute_force() {
        for s in [
            "(Kx0 & []x1)",
            "(K[]x0 & <>~Kx0)",
            "(Lx0 & L~x0)",
            "K(x0 & x1)",
        ] {
            for logic in Logic::ALL {
                let u = universe(s, logic);
                let a = u.len();
                assert!(a <= 20);
                let brute: Vec<Cloud> = (1u128..1 << a)
                    .map(|v| Cloud(v << (128 - a)))
                    .filter(|&c| u.is_cloud(c))
                    .collect();
                assert_eq!(u.clouds().collect::<Vec<_>>(), brute, "{s} {logic}");

                let mask = u.lacking(0);
                let restricted: Vec<Cloud> = brute
                    .iter()
                    .copied()
                    .filter(|c| c.0 & !mask.0 == 0)
                    .collect();
                assert_eq!(u.clouds().restrict(mask).collect::<Vec<_>>(), restricted);
            }
        }
    }

    #[test]
    fn bitstrings_round_trip() {
        let c = Cloud::from_indices([0, 3, 127]);
        let s = c.bitstring(128);
        assert_eq!(Cloud::parse_bitstring(&s), Some(c));
        assert_eq!(Cloud::parse_bitstring("0102"), None);
        assert_eq!(TableauSet::from_indices([1]).bitstring(3), "010");
    }
}
