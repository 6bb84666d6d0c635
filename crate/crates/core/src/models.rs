//! Finite commutator and cross axiom models.
//!
//! A model has a diamond relation, an equivalence `L` and a valuation. The
//! frame obligations depend on the logic:
//!
//! | property              | K4xS5 | S4xS5 | SSL |
//! |-----------------------|-------|-------|-----|
//! | diamond transitive    | yes   | yes   | yes |
//! | diamond reflexive     |       | yes   | yes |
//! | `L` equivalence       | yes   | yes   | yes |
//! | left commutativity    | yes   | yes   | yes |
//! | right commutativity   | yes   | yes   |     |
//! | persistence of atoms  |       |       | yes |

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Formula, Node, SubformulaTable, VarId};
use crate::oracle::verify_partial_tableau;
use crate::relations::FiniteRelation;
use crate::solver::PartialTableau;
use crate::tableau::{Cloud, Logic, TableauSet, TableauUniverse};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("world {0} does not exist")]
    UnknownWorld(usize),
    #[error("frame is not a valid {logic} frame: {report}")]
    InvalidFrame { logic: Logic, report: String },
    #[error("not a partial tableau for the initial cloud")]
    InvalidTableau,
    #[error("universe is too wide to form clouds")]
    TooWide,
    #[error("malformed model: {0}")]
    Malformed(String),
}

/// Where a world built from a tableau came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Origin {
    pub cloud: Cloud,
    /// Tableau-set index in the universe.
    pub set: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub logic: Option<Logic>,
    /// One entry per world; `None` for hand-built models.
    pub origins: Vec<Option<Origin>>,
    pub diamond: FiniteRelation,
    pub l: FiniteRelation,
    pub valuation: BTreeMap<VarId, BTreeSet<usize>>,
    pub designated: Option<usize>,
    /// Number of tableau-sets, needed to print cloud provenance.
    pub tableau_sets: Option<usize>,
}

impl Model {
    /// A model without provenance. Relations must share the universe size.
    pub fn new(
        diamond: FiniteRelation,
        l: FiniteRelation,
        valuation: BTreeMap<VarId, BTreeSet<usize>>,
    ) -> Self {
        assert_eq!(diamond.size(), l.size());
        Model {
            logic: None,
            origins: vec![None; diamond.size()],
            diamond,
            l,
            valuation,
            designated: None,
            tableau_sets: None,
        }
    }

    pub fn world_count(&self) -> usize {
        self.diamond.size()
    }

    pub fn holds_atom(&self, w: usize, v: &VarId) -> bool {
        self.valuation.get(v).is_some_and(|ws| ws.contains(&w))
    }

    /// The relation induced by the diamond relation on `L`-classes.
    pub fn cloud_relation(
        &self,
    ) -> Result<crate::relations::Quotient, crate::relations::RelationError> {
        self.diamond.quotient(&self.l)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FrameProperty {
    NonEmpty,
    DiamondTransitive,
    DiamondReflexive,
    LReflexive,
    LSymmetric,
    LTransitive,
    LeftCommutativity,
    RightCommutativity,
    Persistence,
}

impl FrameProperty {
    pub fn required_for(logic: Logic) -> Vec<FrameProperty> {
        use FrameProperty::*;
        let mut props = vec![NonEmpty, DiamondTransitive];
        if logic.is_reflexive() {
            props.push(DiamondReflexive);
        }
        props.extend([LReflexive, LSymmetric, LTransitive, LeftCommutativity]);
        match logic {
            Logic::K4xS5 | Logic::S4xS5 => props.push(RightCommutativity),
            Logic::Ssl => props.push(Persistence),
        }
        props
    }
}

impl fmt::Display for FrameProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrameProperty::NonEmpty => "nonempty",
            FrameProperty::DiamondTransitive => "diamond transitive",
            FrameProperty::DiamondReflexive => "diamond reflexive",
            FrameProperty::LReflexive => "L reflexive",
            FrameProperty::LSymmetric => "L symmetric",
            FrameProperty::LTransitive => "L transitive",
            FrameProperty::LeftCommutativity => "left commutativity",
            FrameProperty::RightCommutativity => "right commutativity",
            FrameProperty::Persistence => "persistence",
        })
    }
}

/// A failing instance of a frame property.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub worlds: Vec<usize>,
    pub atom: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrameCheck {
    pub property: FrameProperty,
    pub passed: bool,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrameReport {
    pub logic: Logic,
    pub checks: Vec<FrameCheck>,
}

impl FrameReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &FrameCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for FrameReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for check in &self.checks {
            write!(
                f,
                "{:<20} {}",
                check.property.to_string(),
                if check.passed { "PASS" } else { "FAIL" }
            )?;
            if let Some(v) = check.violations.first() {
                write!(f, "  worlds {:?}", v.worlds)?;
                if let Some(a) = &v.atom {
                    write!(f, " atom {a}")?;
                }
                if check.violations.len() > 1 {
                    write!(f, " (+{} more)", check.violations.len() - 1)?;
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn violations(property: FrameProperty, m: &Model) -> Vec<Violation> {
    let s = m.world_count();
    let r = &m.diamond;
    let l = &m.l;
    let worlds = |ws: &[usize]| Violation {
        worlds: ws.to_vec(),
        atom: None,
    };
    let mut out = Vec::new();
    match property {
        FrameProperty::NonEmpty => {
            if s == 0 {
                out.push(worlds(&[]));
            }
        }
        FrameProperty::DiamondTransitive | FrameProperty::LTransitive => {
            let rel = if property == FrameProperty::DiamondTransitive {
                r
            } else {
                l
            };
            for (a, b) in rel.pairs() {
                for c in 0..s {
                    if rel.contains(b, c) && !rel.contains(a, c) {
                        out.push(worlds(&[a, b, c]));
                    }
                }
            }
        }
        FrameProperty::DiamondReflexive | FrameProperty::LReflexive => {
            let rel = if property == FrameProperty::DiamondReflexive {
                r
            } else {
                l
            };
            out.extend(
                (0..s)
                    .filter(|&w| !rel.contains(w, w))
                    .map(|w| worlds(&[w])),
            );
        }
        FrameProperty::LSymmetric => {
            out.extend(
                l.pairs()
                    .filter(|&(a, b)| !l.contains(b, a))
                    .map(|(a, b)| worlds(&[a, b])),
            );
        }
        FrameProperty::LeftCommutativity => {
            for (w, u) in r.pairs() {
                for u2 in 0..s {
                    if l.contains(u, u2)
                        && !(0..s).any(|w2| l.contains(w, w2) && r.contains(w2, u2))
                    {
                        out.push(worlds(&[w, u, u2]));
                    }
                }
            }
        }
        FrameProperty::RightCommutativity => {
            for (w, w2) in l.pairs() {
                for u2 in 0..s {
                    if r.contains(w2, u2) && !(0..s).any(|u| r.contains(w, u) && l.contains(u, u2))
                    {
                        out.push(worlds(&[w, w2, u2]));
                    }
                }
            }
        }
        FrameProperty::Persistence => {
            for (w, v) in r.pairs() {
                for (atom, ws) in &m.valuation {
                    if ws.contains(&w) != ws.contains(&v) {
                        out.push(Violation {
                            worlds: vec![w, v],
                            atom: Some(atom.to_string()),
                        });
                    }
                }
            }
        }
    }
    out
}

/// Checks every frame obligation of `logic`, collecting all violations.
pub fn check_frame(m: &Model, logic: Logic) -> FrameReport {
    let checks = FrameProperty::required_for(logic)
        .into_iter()
        .map(|property| {
            let violations = violations(property, m);
            FrameCheck {
                property,
                passed: violations.is_empty(),
                violations,
            }
        })
        .collect();
    FrameReport { logic, checks }
}

/// Truth value of every subformula at every world: `result[i][w]`.
///
/// Subformulas are evaluated in table order, so each entry only reads
/// entries of smaller index.
pub fn evaluate_all(m: &Model, table: &SubformulaTable) -> Vec<Vec<bool>> {
    let s = m.world_count();
    let mut truth: Vec<Vec<bool>> = Vec::with_capacity(table.len());
    for node in table.nodes() {
        let row: Vec<bool> = match node {
            Node::Atom(v) => (0..s).map(|w| m.holds_atom(w, v)).collect(),
            Node::Neg(c) => truth[*c].iter().map(|b| !b).collect(),
            Node::And(a, b) => (0..s).map(|w| truth[*a][w] && truth[*b][w]).collect(),
            Node::Nec(c) => (0..s)
                .map(|w| (0..s).all(|v| !m.diamond.contains(w, v) || truth[*c][v]))
                .collect(),
            Node::K(c) => (0..s)
                .map(|w| (0..s).all(|v| !m.l.contains(w, v) || truth[*c][v]))
                .collect(),
        };
        truth.push(row);
    }
    truth
}

/// `M, w |= f`.
pub fn model_check(m: &Model, w: usize, f: &Formula) -> Result<bool, ModelError> {
    if w >= m.world_count() {
        return Err(ModelError::UnknownWorld(w));
    }
    let table = f.subformulas();
    Ok(evaluate_all(m, &table)[table.root()][w])
}

/// The model whose worlds are the pairs (cloud, member) of a partial
/// tableau for `(phi, F_0)`.
///
/// Worlds are ordered by cloud bitstring, then by tableau-set index; the
/// designated world is the pair (`F_0`, designated set).
pub fn model_from_tableau(u: &TableauUniverse, t: &PartialTableau) -> Result<Model, ModelError> {
    if !u.supports_clouds() {
        return Err(ModelError::TooWide);
    }
    if !t.initial.contains(t.designated) || !verify_partial_tableau(u, &t.clouds, &[t.initial]) {
        return Err(ModelError::InvalidTableau);
    }
    let origins: Vec<Origin> = t
        .clouds
        .iter()
        .flat_map(|&cloud| cloud.members().map(move |set| Origin { cloud, set }))
        .collect();
    let n = origins.len();
    let diamond = FiniteRelation::from_fn(n, |a, b| {
        let (x, y) = (origins[a], origins[b]);
        u.cloud_successor(x.cloud, y.cloud) && u.successor(x.set, y.set)
    });
    let l = FiniteRelation::from_fn(n, |a, b| origins[a].cloud == origins[b].cloud);
    let table = u.table();
    let mut valuation: BTreeMap<VarId, BTreeSet<usize>> = BTreeMap::new();
    for (i, node) in table.nodes().iter().enumerate() {
        if let Node::Atom(v) = node {
            let ws = (0..n)
                .filter(|&w| u.set(origins[w].set).contains(i))
                .collect();
            valuation.insert(v.clone(), ws);
        }
    }
    let designated = origins
        .iter()
        .position(|o| o.cloud == t.initial && o.set == t.designated)
        .expect("designated world exists");
    Ok(Model {
        logic: Some(u.logic()),
        origins: origins.into_iter().map(Some).collect(),
        diamond,
        l,
        valuation,
        designated: Some(designated),
        tableau_sets: Some(u.len()),
    })
}

/// `sat_phi(w)` for every world.
pub fn sat_sets(m: &Model, table: &SubformulaTable) -> Vec<TableauSet> {
    let truth = evaluate_all(m, table);
    (0..m.world_count())
        .map(|w| TableauSet::from_indices((0..table.len()).filter(|&i| truth[i][w])))
        .collect()
}

/// The tableau `{F_q | q an L-class}` of a model together with the cloud of
/// world `w`, where `F_q = {sat_phi(v) | v in q}`.
pub fn tableau_from_model(
    m: &Model,
    u: &TableauUniverse,
    w: usize,
) -> Result<(BTreeSet<Cloud>, Cloud), ModelError> {
    if w >= m.world_count() {
        return Err(ModelError::UnknownWorld(w));
    }
    if !u.supports_clouds() {
        return Err(ModelError::TooWide);
    }
    let report = check_frame(m, u.logic());
    if !report.passed() {
        return Err(ModelError::InvalidFrame {
            logic: u.logic(),
            report: report.to_string(),
        });
    }
    let sets = sat_sets(m, u.table());
    let index: Vec<usize> = sets
        .iter()
        .map(|&s| {
            u.index_of(s)
                .ok_or_else(|| ModelError::Malformed(format!("sat set {s:?} is not a tableau-set")))
        })
        .collect::<Result<_, _>>()?;
    let cloud_of = |v: usize| {
        Cloud::from_indices(
            (0..m.world_count())
                .filter(|&x| m.l.contains(v, x))
                .map(|x| index[x]),
        )
    };
    let clouds = (0..m.world_count()).map(cloud_of).collect();
    Ok((clouds, cloud_of(w)))
}

// JSON form

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorldJson {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cloud: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub logic: Option<Logic>,
    pub worlds: Vec<WorldJson>,
    /// Bitstrings of the clouds referenced by `worlds[].cloud`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub clouds: Vec<String>,
    pub diamond: Vec<[usize; 2]>,
    #[serde(rename = "L")]
    pub l: Vec<[usize; 2]>,
    /// Variable id in decimal -> worlds where it holds.
    pub valuation: BTreeMap<String, Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub designated: Option<usize>,
}

impl Model {
    pub fn to_json(&self) -> ModelJson {
        let clouds: Vec<Cloud> = {
            let set: BTreeSet<Cloud> = self.origins.iter().flatten().map(|o| o.cloud).collect();
            set.into_iter().collect()
        };
        let width = self.tableau_sets.unwrap_or(0);
        let worlds = self
            .origins
            .iter()
            .enumerate()
            .map(|(id, o)| WorldJson {
                id,
                cloud: o.map(|o| clouds.binary_search(&o.cloud).expect("cloud listed")),
                set: o.map(|o| o.set),
            })
            .collect();
        ModelJson {
            logic: self.logic,
            worlds,
            clouds: clouds.iter().map(|c| c.bitstring(width)).collect(),
            diamond: self.diamond.pairs().map(|(a, b)| [a, b]).collect(),
            l: self.l.pairs().map(|(a, b)| [a, b]).collect(),
            valuation: self
                .valuation
                .iter()
                .map(|(v, ws)| (v.0.to_string(), ws.iter().copied().collect()))
                .collect(),
            designated: self.designated,
        }
    }

    pub fn from_json(json: &ModelJson) -> Result<Model, ModelError> {
        let n = json.worlds.len();
        if n == 0 {
            return Err(ModelError::Malformed("worlds array is empty".into()));
        }
        let mut seen = vec![false; n];
        for w in &json.worlds {
            if w.id >= n || std::mem::replace(&mut seen[w.id], true) {
                return Err(ModelError::Malformed(format!(
                    "world ids must be 0..{n} without repeats (got {})",
                    w.id
                )));
            }
        }
        let clouds: Vec<Cloud> = json
            .clouds
            .iter()
            .map(|s| {
                Cloud::parse_bitstring(s)
                    .ok_or_else(|| ModelError::Malformed(format!("bad cloud bitstring {s:?}")))
            })
            .collect::<Result<_, _>>()?;
        let width = json.clouds.first().map(String::len);
        let mut origins = vec![None; n];
        for w in &json.worlds {
            origins[w.id] = match (w.cloud, w.set) {
                (Some(c), Some(set)) => {
                    let cloud = *clouds.get(c).ok_or_else(|| {
                        ModelError::Malformed(format!("world {} refers to missing cloud {c}", w.id))
                    })?;
                    Some(Origin { cloud, set })
                }
                (None, None) => None,
                _ => {
                    return Err(ModelError::Malformed(format!(
                        "world {} has partial provenance",
                        w.id
                    )))
                }
            };
        }
        let relation = |pairs: &[[usize; 2]], name: &str| -> Result<FiniteRelation, ModelError> {
            if let Some(p) = pairs.iter().find(|p| p[0] >= n || p[1] >= n) {
                return Err(ModelError::Malformed(format!(
                    "{name} pair {p:?} mentions an unknown world"
                )));
            }
            Ok(FiniteRelation::from_pairs(
                n,
                pairs.iter().map(|p| (p[0], p[1])),
            ))
        };
        let diamond = relation(&json.diamond, "diamond")?;
        let l = relation(&json.l, "L")?;
        let mut valuation = BTreeMap::new();
        for (key, ws) in &json.valuation {
            let id: BigUint = key.parse().map_err(|_| {
                ModelError::Malformed(format!(
                    "valuation key {key:?} is not a decimal variable id"
                ))
            })?;
            if let Some(w) = ws.iter().find(|&&w| w >= n) {
                return Err(ModelError::Malformed(format!(
                    "valuation of {key} mentions unknown world {w}"
                )));
            }
            valuation.insert(VarId(id), ws.iter().copied().collect());
        }
        if let Some(d) = json.designated {
            if d >= n {
                return Err(ModelError::Malformed(format!(
                    "designated world {d} does not exist"
                )));
            }
        }
        Ok(Model {
            logic: json.logic,
            origins,
            diamond,
            l,
            valuation,
            designated: json.designated,
            tableau_sets: width,
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("model serialises")
    }

    pub fn from_json_str(s: &str) -> Result<Model, ModelError> {
        let json: ModelJson =
            serde_json::from_str(s).map_err(|e| ModelError::Malformed(e.to_string()))?;
        Model::from_json(&json)
    }
}
