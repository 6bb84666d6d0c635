//! Finite binary relations: property checks, strict parts, maximum chain
//! length, quotients by an equivalence and the powerset lifting
//! `A <=' B  iff  every b in B has some a in A with a <= b`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelationError {
    #[error("relation is not transitive: ({0}, {1}) and ({1}, {2}) but not ({0}, {2})")]
    NotTransitive(usize, usize, usize),
    #[error("relation is not an equivalence")]
    NotEquivalence,
    #[error("universe of size {0} is too large for the powerset lifting (max {max})", max = LIFT_MAX_UNIVERSE)]
    UniverseTooLarge(usize),
    #[error("relations are over different universes ({0} vs {1})")]
    SizeMismatch(usize, usize),
}

/// Largest universe accepted by [`FiniteRelation::lift_powerset`].
pub const LIFT_MAX_UNIVERSE: usize = 5;

/// A relation on `{0, .., size-1}` stored as a dense boolean matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FiniteRelation {
    size: usize,
    matrix: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub reflexive: bool,
    pub transitive: bool,
    pub symmetric: bool,
}

impl FiniteRelation {
    pub fn empty(size: usize) -> Self {
        FiniteRelation {
            size,
            matrix: vec![false; size * size],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut r = Self::empty(size);
        for i in 0..size {
            r.insert(i, i);
        }
        r
    }

    pub fn total(size: usize) -> Self {
        FiniteRelation {
            size,
            matrix: vec![true; size * size],
        }
    }

    /// Panics if a pair mentions an element outside the universe.
    pub fn from_pairs(size: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut r = Self::empty(size);
        for (i, j) in pairs {
            r.insert(i, j);
        }
        r
    }

    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut r = Self::empty(size);
        for i in 0..size {
            for j in 0..size {
                if f(i, j) {
                    r.insert(i, j);
                }
            }
        }
        r
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.matrix[i * self.size + j]
    }

    pub fn insert(&mut self, i: usize, j: usize) {
        assert!(
            i < self.size && j < self.size,
            "pair ({i}, {j}) outside universe of size {}",
            self.size
        );
        self.matrix[i * self.size + j] = true;
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let s = self.size;
        (0..s * s)
            .filter(move |&k| self.matrix[k])
            .map(move |k| (k / s, k % s))
    }

    pub fn len(&self) -> usize {
        self.matrix.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.matrix.iter().any(|&b| b)
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.size).all(|i| self.contains(i, i))
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs().all(|(i, j)| self.contains(j, i))
    }

    /// First witness `(i, j, k)` of `i R j`, `j R k`, not `i R k`.
    pub fn transitivity_violation(&self) -> Option<(usize, usize, usize)> {
        for (i, j) in self.pairs() {
            for k in 0..self.size {
                if self.contains(j, k) && !self.contains(i, k) {
                    return Some((i, j, k));
                }
            }
        }
        None
    }

    pub fn is_transitive(&self) -> bool {
        self.transitivity_violation().is_none()
    }

    pub fn is_preorder(&self) -> bool {
        self.is_reflexive() && self.is_transitive()
    }

    pub fn is_equivalence(&self) -> bool {
        self.is_reflexive() && self.is_symmetric() && self.is_transitive()
    }

    pub fn classify(&self) -> Classification {
        Classification {
            reflexive: self.is_reflexive(),
            transitive: self.is_transitive(),
            symmetric: self.is_symmetric(),
        }
    }

    fn require_transitive(&self) -> Result<(), RelationError> {
        match self.transitivity_violation() {
            Some((i, j, k)) => Err(RelationError::NotTransitive(i, j, k)),
            None => Ok(()),
        }
    }

    pub fn inverse(&self) -> Self {
        Self::from_fn(self.size, |i, j| self.contains(j, i))
    }

    pub fn intersection(&self, other: &Self) -> Result<Self, RelationError> {
        if self.size != other.size {
            return Err(RelationError::SizeMismatch(self.size, other.size));
        }
        Ok(Self::from_fn(self.size, |i, j| {
            self.contains(i, j) && other.contains(i, j)
        }))
    }

    /// Warshall closure.
    pub fn transitive_closure(&self) -> Self {
        let mut r = self.clone();
        let s = self.size;
        for k in 0..s {
            for i in 0..s {
                if r.contains(i, k) {
                    for j in 0..s {
                        if r.contains(k, j) {
                            r.matrix[i * s + j] = true;
                        }
                    }
                }
            }
        }
        r
    }

    /// `s < t  iff  s <= t and not t <= s`.
    pub fn strict_part(&self) -> Self {
        Self::from_fn(self.size, |i, j| {
            self.contains(i, j) && !self.contains(j, i)
        })
    }

    /// The derived equivalence `s == t  iff  s = t or (s <= t and t <= s)`.
    pub fn symmetric_equivalence(&self) -> Self {
        Self::from_fn(self.size, |i, j| {
            i == j || (self.contains(i, j) && self.contains(j, i))
        })
    }

    /// Maximum chain length: the largest `l` with `s_0 < s_1 < .. < s_l`.
    ///
    /// The strict part of a transitive relation is acyclic, so this is the
    /// longest path in a DAG. Returns 0 on the empty universe.
    pub fn mcl(&self) -> Result<usize, RelationError> {
        self.require_transitive()?;
        let strict = self.strict_part();
        let s = self.size;
        // longest chain starting at i, filled in reverse topological order
        let mut longest: Vec<Option<usize>> = vec![None; s];
        fn visit(i: usize, strict: &FiniteRelation, longest: &mut [Option<usize>]) -> usize {
            if let Some(l) = longest[i] {
                return l;
            }
            let mut best = 0;
            for j in 0..strict.size {
                if strict.contains(i, j) {
                    best = best.max(1 + visit(j, strict, longest));
                }
            }
            longest[i] = Some(best);
            best
        }
        Ok((0..s)
            .map(|i| visit(i, &strict, &mut longest))
            .max()
            .unwrap_or(0))
    }

    /// Classes of an equivalence, each sorted, ordered by least member.
    pub fn equivalence_classes(&self) -> Result<Vec<Vec<usize>>, RelationError> {
        if !self.is_equivalence() {
            return Err(RelationError::NotEquivalence);
        }
        let mut seen = vec![false; self.size];
        let mut classes = Vec::new();
        for i in 0..self.size {
            if seen[i] {
                continue;
            }
            let class: Vec<usize> = (0..self.size).filter(|&j| self.contains(i, j)).collect();
            for &j in &class {
                seen[j] = true;
            }
            classes.push(class);
        }
        Ok(classes)
    }

    /// The relation induced on the classes of `equiv`:
    /// `C R D  iff  some w in C, v in D with w R v`.
    pub fn quotient(&self, equiv: &Self) -> Result<Quotient, RelationError> {
        if self.size != equiv.size {
            return Err(RelationError::SizeMismatch(self.size, equiv.size));
        }
        let classes = equiv.equivalence_classes()?;
        let relation = Self::from_fn(classes.len(), |c, d| {
            classes[c]
                .iter()
                .any(|&w| classes[d].iter().any(|&v| self.contains(w, v)))
        });
        Ok(Quotient { classes, relation })
    }

    /// `A <=' B  iff  for all b in B there is a in A with a <= b`, over all
    /// subsets of the universe. Subset `k` is the set of bits of `k`.
    pub fn lift_powerset(&self) -> Result<Self, RelationError> {
        if self.size > LIFT_MAX_UNIVERSE {
            return Err(RelationError::UniverseTooLarge(self.size));
        }
        self.require_transitive()?;
        let s = self.size;
        let members = |set: usize| (0..s).filter(move |i| set >> i & 1 == 1);
        Ok(Self::from_fn(1 << s, |a, b| {
            members(b).all(|y| members(a).any(|x| self.contains(x, y)))
        }))
    }

    /// `w R u` and `u E u'` imply some `w'` with `w E w'` and `w' R u'`.
    /// Returns the first failing `(w, u, u')`.
    pub fn left_commutativity_violation(&self, equiv: &Self) -> Option<(usize, usize, usize)> {
        let s = self.size;
        for (w, u) in self.pairs() {
            for u2 in 0..s {
                if equiv.contains(u, u2)
                    && !(0..s).any(|w2| equiv.contains(w, w2) && self.contains(w2, u2))
                {
                    return Some((w, u, u2));
                }
            }
        }
        None
    }

    /// `w E w'` and `w' R u'` imply some `u` with `w R u` and `u E u'`.
    /// Returns the first failing `(w, w', u')`.
    pub fn right_commutativity_violation(&self, equiv: &Self) -> Option<(usize, usize, usize)> {
        let s = self.size;
        for (w, w2) in equiv.pairs() {
            for u2 in 0..s {
                if self.contains(w2, u2)
                    && !(0..s).any(|u| self.contains(w, u) && equiv.contains(u, u2))
                {
                    return Some((w, w2, u2));
                }
            }
        }
        None
    }

    pub fn left_commutes_with(&self, equiv: &Self) -> bool {
        self.left_commutativity_violation(equiv).is_none()
    }

    pub fn right_commutes_with(&self, equiv: &Self) -> bool {
        self.right_commutativity_violation(equiv).is_none()
    }
}

impl fmt::Debug for FiniteRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteRelation")
            .field("size", &self.size)
            .field("pairs", &self.pairs().collect::<Vec<_>>())
            .finish()
    }
}

/// Result of [`FiniteRelation::quotient`]: class `c` of the quotient
/// relation is `classes[c]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quotient {
    pub classes: Vec<Vec<usize>>,
    pub relation: FiniteRelation,
}
