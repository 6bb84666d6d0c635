//! The recursive tableau-cloud search.
//!
//! `alg` receives a chain `F_0 <= .. <= F_m` of pairwise different clouds and
//! checks every pair (`[]chi`, `F`) with `F` in `F_m` and `[]chi` not in `F`.
//! Such a pair is discharged either by looping back to some `F_i` of the
//! chain, or by a fresh successor cloud on which the search recurses. The
//! top level lets `F_0` range over all clouds with a member containing the
//! input formula.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::formula::Formula;
use crate::tableau::{Cloud, Logic, TableauError, TableauSet, TableauUniverse};

/// Default cap on recursive calls.
pub const DEFAULT_STEP_LIMIT: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOptions {
    pub logic: Logic,
    pub collect_tableau: bool,
    /// Cache results per full cloud sequence. Trades memory for time.
    pub memoize: bool,
    /// Overrides the proven depth bound `5 * n * A^2` as the recursion cap.
    pub depth_limit_override: Option<u64>,
    pub step_limit: u64,
    /// Approximate cap on bytes held by the memo table.
    pub memo_byte_limit: Option<usize>,
    /// Check chain discipline on every recursive call.
    pub audit: bool,
}

impl SearchOptions {
    pub fn new(logic: Logic) -> Self {
        SearchOptions {
            logic,
            collect_tableau: false,
            memoize: false,
            depth_limit_override: None,
            step_limit: DEFAULT_STEP_LIMIT,
            memo_byte_limit: None,
            audit: false,
        }
    }

    pub fn with_witness(mut self) -> Self {
        self.collect_tableau = true;
        self
    }

    pub fn memoized(mut self) -> Self {
        self.memoize = true;
        self
    }

    pub fn audited(mut self) -> Self {
        self.audit = true;
        self
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    /// Largest `m` of any call `alg(F_0, .., F_m)`.
    pub max_recursion_depth: u64,
    /// Clouds yielded by the cloud iterators (initial and successor candidates).
    pub clouds_enumerated: u64,
    /// Pairs (`[]chi`, `F`) examined.
    pub pairs_checked: u64,
    /// Recursive calls made.
    pub steps: u64,
    pub memo_hits: u64,
}

/// A set of clouds with a designated initial cloud and a designated member
/// of it that contains the input formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialTableau {
    pub clouds: BTreeSet<Cloud>,
    pub initial: Cloud,
    /// Index of the designated tableau-set in the universe.
    pub designated: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub satisfiable: bool,
    pub stats: SearchStats,
    pub witness: Option<PartialTableau>,
    /// `n`, the formula length.
    pub formula_length: usize,
    /// `A`, the number of tableau-sets.
    pub tableau_sets: usize,
}

impl Verdict {
    /// `5 * n * A^2`.
    pub fn depth_bound(&self) -> u128 {
        depth_bound(self.formula_length, self.tableau_sets)
    }
}

pub fn depth_bound(n: usize, a: usize) -> u128 {
    5 * n as u128 * (a as u128) * (a as u128)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Tableau(#[from] TableauError),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

/// Decides satisfiability of `formula` in `opts.logic`.
pub fn solve(formula: &Formula, opts: &SearchOptions) -> Result<Verdict, SolveError> {
    let universe = TableauUniverse::new(formula, opts.logic)?;
    solve_in(&universe, opts)
}

/// Like [`solve`] on a prebuilt universe. `opts.logic` is ignored in favour
/// of the universe's logic.
pub fn solve_in(universe: &TableauUniverse, opts: &SearchOptions) -> Result<Verdict, SolveError> {
    universe.require_clouds()?;
    let n = universe.formula().lengths().n;
    let bound = depth_bound(n, universe.len());
    let mut search = Search::new(universe, opts, bound);
    let root = universe.table().root();
    let with_root = universe.having(root);

    let mut accepted = None;
    let initial = universe.clouds().with_filter(|c| c.0 & with_root.0 != 0);
    for cloud in initial {
        search.stats.clouds_enumerated += 1;
        let mut seq = vec![cloud];
        if search.alg(&mut seq, None)? {
            accepted = Some(cloud);
            break;
        }
    }

    let witness = match accepted {
        Some(initial) if opts.collect_tableau => {
            let mut clouds = BTreeSet::new();
            let mut seq = vec![initial];
            if !search.alg(&mut seq, Some(&mut clouds))? {
                return Err(SolveError::Invariant(
                    "witness re-run rejected an accepted cloud".into(),
                ));
            }
            let designated = initial
                .members()
                .find(|&i| universe.set(i).contains(root))
                .expect("initial cloud contains the formula");
            Some(PartialTableau {
                clouds,
                initial,
                designated,
            })
        }
        _ => None,
    };

    Ok(Verdict {
        satisfiable: accepted.is_some(),
        stats: search.stats,
        witness,
        formula_length: n,
        tableau_sets: universe.len(),
    })
}

/// Number of tableau-sets of `formula` in `logic`.
pub fn count_tableau_sets(formula: &Formula, logic: Logic) -> Result<u64, TableauError> {
    crate::tableau::count_tableau_sets(&formula.subformulas(), logic)
}

/// Runs `alg` on an explicit cloud sequence. With `collect`, the clouds of
/// the partial tableau built by an accepting run are returned as well.
pub fn alg_rec(
    universe: &TableauUniverse,
    seq: &[Cloud],
    opts: &SearchOptions,
    collect: bool,
) -> Result<(bool, Option<BTreeSet<Cloud>>, SearchStats), SolveError> {
    universe.require_clouds()?;
    let n = universe.formula().lengths().n;
    let mut search = Search::new(universe, opts, depth_bound(n, universe.len()));
    let mut seq = seq.to_vec();
    let mut clouds = BTreeSet::new();
    let ok = search.alg(&mut seq, collect.then_some(&mut clouds))?;
    let clouds = (collect && ok).then_some(clouds);
    Ok((ok, clouds, search.stats))
}

struct Search<'u> {
    universe: &'u TableauUniverse,
    opts: &'u SearchOptions,
    depth_limit: u128,
    /// (`[]chi` index, `chi` index, clouds of sets lacking `chi`)
    obligations: Vec<(usize, usize, Cloud)>,
    memo: HashMap<Vec<Cloud>, bool>,
    memo_bytes: usize,
    stats: SearchStats,
}

impl<'u> Search<'u> {
    fn new(universe: &'u TableauUniverse, opts: &'u SearchOptions, bound: u128) -> Self {
        let obligations = universe
            .table()
            .nec_entries()
            .map(|(b, c)| (b, c, universe.lacking(c)))
            .collect();
        Search {
            universe,
            opts,
            depth_limit: opts.depth_limit_override.map_or(bound, u128::from),
            obligations,
            memo: HashMap::new(),
            memo_bytes: 0,
            stats: SearchStats::default(),
        }
    }

    fn audit(&self, seq: &[Cloud]) -> Result<(), SolveError> {
        let u = self.universe;
        for (i, &c) in seq.iter().enumerate() {
            if !u.is_cloud(c) {
                return Err(SolveError::Invariant(format!(
                    "sequence element {i} is not a cloud"
                )));
            }
            if seq[..i].contains(&c) {
                return Err(SolveError::Invariant(format!(
                    "sequence element {i} repeats an earlier cloud"
                )));
            }
            if i > 0 && !u.cloud_successor(seq[i - 1], c) {
                return Err(SolveError::Invariant(format!(
                    "sequence elements {} and {i} are not chained",
                    i - 1
                )));
            }
        }
        Ok(())
    }

    /// `G in cloud` with `F <= G` and `chi not in G`.
    #[inline]
    fn has_witness(&self, f: usize, lacking_chi: Cloud, cloud: Cloud) -> bool {
        cloud.0 & self.universe.successors(f).0 & lacking_chi.0 != 0
    }

    fn alg(
        &mut self,
        seq: &mut Vec<Cloud>,
        mut collector: Option<&mut BTreeSet<Cloud>>,
    ) -> Result<bool, SolveError> {
        let depth = (seq.len() - 1) as u64;
        self.stats.steps += 1;
        self.stats.max_recursion_depth = self.stats.max_recursion_depth.max(depth);
        if self.stats.steps > self.opts.step_limit {
            return Err(SolveError::ResourceLimit(format!(
                "more than {} recursive steps",
                self.opts.step_limit
            )));
        }
        if u128::from(depth) >= self.depth_limit {
            return Err(match self.opts.depth_limit_override {
                Some(limit) => {
                    SolveError::ResourceLimit(format!("recursion depth reached {limit}"))
                }
                None => SolveError::Invariant(format!(
                    "recursion depth {depth} reached the bound {}",
                    self.depth_limit
                )),
            });
        }
        if self.opts.audit {
            self.audit(seq)?;
        }
        // a memoised "yes" carries no tableau, so collecting runs only reuse "no"
        if self.opts.memoize {
            if let Some(&known) = self.memo.get(seq.as_slice()) {
                if !known || collector.is_none() {
                    self.stats.memo_hits += 1;
                    return Ok(known);
                }
            }
        }

        let result = self.check_pairs(seq, &mut collector)?;

        if self.opts.memoize {
            let bytes = seq.len() * std::mem::size_of::<Cloud>() + 32;
            if self
                .opts
                .memo_byte_limit
                .is_some_and(|limit| self.memo_bytes + bytes > limit)
            {
                return Err(SolveError::ResourceLimit(
                    "memo table exceeded its byte budget".into(),
                ));
            }
            if self.memo.insert(seq.clone(), result).is_none() {
                self.memo_bytes += bytes;
            }
        }
        if result {
            if let Some(c) = collector {
                c.extend(seq.iter().copied());
            }
        }
        Ok(result)
    }

    fn check_pairs(
        &mut self,
        seq: &mut Vec<Cloud>,
        collector: &mut Option<&mut BTreeSet<Cloud>>,
    ) -> Result<bool, SolveError> {
        let u = self.universe;
        let last = *seq.last().expect("nonempty sequence");
        // union of the successor rows of `last`; every candidate lies inside it
        let reach = Cloud(last.members().fold(0u128, |acc, i| acc | u.successors(i).0));

        for k in 0..self.obligations.len() {
            let (nec, _chi, lacking) = self.obligations[k];
            for f in last.members() {
                if u.set(f).contains(nec) {
                    continue;
                }
                self.stats.pairs_checked += 1;
                if !self.has_witness(f, lacking, reach) {
                    return Ok(false);
                }

                // (I) loop back into the chain
                let looped = seq.iter().any(|&earlier| {
                    self.has_witness(f, lacking, earlier) && u.cloud_successor(last, earlier)
                });
                if looped {
                    continue;
                }

                // (II) a fresh successor cloud
                let mut found = false;
                for next in u.clouds().restrict(reach) {
                    self.stats.clouds_enumerated += 1;
                    if !self.has_witness(f, lacking, next)
                        || seq.contains(&next)
                        || !u.cloud_successor(last, next)
                    {
                        continue;
                    }
                    seq.push(next);
                    let accepted = match collector.as_deref_mut() {
                        Some(outer) => {
                            let mut sub = BTreeSet::new();
                            let ok = self.alg(seq, Some(&mut sub));
                            if matches!(ok, Ok(true)) {
                                outer.extend(sub);
                            }
                            ok
                        }
                        None => self.alg(seq, None),
                    };
                    seq.pop();
                    if accepted? {
                        found = true;
                        break;
                    }
                }
                if !found {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// The designated tableau-set of a witness.
pub fn designated_set(universe: &TableauUniverse, tableau: &PartialTableau) -> TableauSet {
    universe.set(tableau.designated)
}
