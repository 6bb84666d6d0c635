//! Bimodal formulas over `~`, `&`, `[]` and `K`, with an ASCII surface syntax.
//!
//! The surface grammar is
//!
//! ```text
//! formula := '~' formula | '[]' formula | 'K' formula | '<>' formula | 'L' formula
//!          | '(' formula op formula ')' | var
//! op      := '&' | '|' | '->' | '<->'
//! var     := 'x' binnum
//! binnum  := '0' | '1' ('0' | '1')*
//! ```
//!
//! Whitespace between tokens is ignored. `|`, `->`, `<->`, `<>` and `L` are
//! desugared into the primitive connectives while parsing, so a [`Formula`]
//! only ever contains variables, negation, conjunction, `[]` and `K`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifier of a propositional variable, printed as a binary numeral.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VarId(pub BigUint);

impl VarId {
    pub fn new(id: u64) -> Self {
        VarId(BigUint::from(id))
    }

    /// Binary numeral without leading zeros (`0` for zero).
    pub fn binary(&self) -> String {
        self.0.to_str_radix(2)
    }
}

impl From<u64> for VarId {
    fn from(id: u64) -> Self {
        VarId::new(id)
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.binary())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Var(VarId),
    Neg(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    /// The `[]` modality.
    Nec(Box<Formula>),
    /// The `K` modality.
    K(Box<Formula>),
}

impl Formula {
    pub fn var(id: u64) -> Formula {
        Formula::Var(VarId::new(id))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(f: Formula) -> Formula {
        Formula::Neg(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn nec(f: Formula) -> Formula {
        Formula::Nec(Box::new(f))
    }

    pub fn k(f: Formula) -> Formula {
        Formula::K(Box::new(f))
    }

    /// `~[]~f`
    pub fn diamond(f: Formula) -> Formula {
        Formula::neg(Formula::nec(Formula::neg(f)))
    }

    /// `~K~f`
    pub fn l(f: Formula) -> Formula {
        Formula::neg(Formula::k(Formula::neg(f)))
    }

    /// `~(~l & ~r)`
    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::neg(Formula::and(Formula::neg(l), Formula::neg(r)))
    }

    /// `(~l | r)`
    pub fn implies(l: Formula, r: Formula) -> Formula {
        Formula::or(Formula::neg(l), r)
    }

    /// `((~l | r) & (~r | l))`
    pub fn iff(l: Formula, r: Formula) -> Formula {
        Formula::and(
            Formula::or(Formula::neg(l.clone()), r.clone()),
            Formula::or(Formula::neg(r), l),
        )
    }

    /// Canonical, fully parenthesised, primitive-only rendering.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out);
        out
    }

    fn render_into(&self, out: &mut String) {
        match self {
            Formula::Var(v) => {
                out.push('x');
                out.push_str(&v.binary());
            }
            Formula::Neg(f) => {
                out.push('~');
                f.render_into(out);
            }
            Formula::And(l, r) => {
                out.push('(');
                l.render_into(out);
                out.push_str(" & ");
                r.render_into(out);
                out.push(')');
            }
            Formula::Nec(f) => {
                out.push_str("[]");
                f.render_into(out);
            }
            Formula::K(f) => {
                out.push('K');
                f.render_into(out);
            }
        }
    }

    /// Lengths of the formula as a string over `( ) ~ & [] K x 0 1`.
    ///
    /// `n` counts every symbol (each connective and modality is one symbol);
    /// `ell` counts all symbols except the binary digits, so every variable
    /// contributes exactly one.
    pub fn lengths(&self) -> Lengths {
        match self {
            Formula::Var(v) => {
                let digits = v.0.bits().max(1) as usize;
                Lengths {
                    n: 1 + digits,
                    ell: 1,
                }
            }
            Formula::Neg(f) | Formula::Nec(f) | Formula::K(f) => {
                let inner = f.lengths();
                Lengths {
                    n: inner.n + 1,
                    ell: inner.ell + 1,
                }
            }
            Formula::And(l, r) => {
                let (l, r) = (l.lengths(), r.lengths());
                Lengths {
                    n: l.n + r.n + 3,
                    ell: l.ell + r.ell + 3,
                }
            }
        }
    }

    pub fn subformulas(&self) -> SubformulaTable {
        SubformulaTable::new(self)
    }

    /// Distinct variables of the formula in ascending order.
    pub fn vars(&self) -> Vec<VarId> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<VarId>) {
        match self {
            Formula::Var(v) => out.push(v.clone()),
            Formula::Neg(f) | Formula::Nec(f) | Formula::K(f) => f.collect_vars(out),
            Formula::And(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lengths {
    pub n: usize,
    pub ell: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty input")]
    Empty,
    #[error("unexpected end of input at byte {0}")]
    UnexpectedEnd(usize),
    #[error("unexpected token {found:?} at byte {pos}")]
    UnexpectedToken { pos: usize, found: char },
    #[error("unbalanced parentheses at byte {0}")]
    Unbalanced(usize),
    #[error("variable with leading zero at byte {0}")]
    LeadingZero(usize),
    #[error("trailing input at byte {0}")]
    Trailing(usize),
}

impl ParseError {
    pub fn position(&self) -> Option<usize> {
        match self {
            ParseError::Empty => None,
            ParseError::UnexpectedEnd(p)
            | ParseError::Unbalanced(p)
            | ParseError::LeadingZero(p)
            | ParseError::Trailing(p) => Some(*p),
            ParseError::UnexpectedToken { pos, .. } => Some(*pos),
        }
    }
}

pub fn parse(text: &str) -> Result<Formula, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        depth: 0,
    };
    let f = p.formula()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(match p.src[p.pos] {
            b')' => ParseError::Unbalanced(p.pos),
            _ => ParseError::Trailing(p.pos),
        });
    }
    Ok(f)
}

enum BinOp {
    And,
    Or,
    Implies,
    Iff,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    /// Number of currently open parentheses.
    depth: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, token: &str) -> bool {
        if self.src[self.pos..].starts_with(token.as_bytes()) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn unexpected(&self) -> ParseError {
        match self.src.get(self.pos) {
            None if self.depth > 0 => ParseError::Unbalanced(self.pos),
            None => ParseError::UnexpectedEnd(self.pos),
            Some(b')') => ParseError::Unbalanced(self.pos),
            Some(_) => {
                let c = std::str::from_utf8(&self.src[self.pos..])
                    .ok()
                    .and_then(|s| s.chars().next())
                    .unwrap_or(char::REPLACEMENT_CHARACTER);
                ParseError::UnexpectedToken {
                    pos: self.pos,
                    found: c,
                }
            }
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        self.skip_ws();
        if self.eat("~") {
            return Ok(Formula::neg(self.formula()?));
        }
        if self.eat("[]") {
            return Ok(Formula::nec(self.formula()?));
        }
        if self.eat("<>") {
            return Ok(Formula::diamond(self.formula()?));
        }
        if self.eat("K") {
            return Ok(Formula::k(self.formula()?));
        }
        if self.eat("L") {
            return Ok(Formula::l(self.formula()?));
        }
        if self.eat("(") {
            self.depth += 1;
            let lhs = self.formula()?;
            self.skip_ws();
            let op = self.binop()?;
            let rhs = self.formula()?;
            self.skip_ws();
            if !self.eat(")") {
                return Err(match self.peek() {
                    None => ParseError::Unbalanced(self.pos),
                    Some(_) => self.unexpected(),
                });
            }
            self.depth -= 1;
            return Ok(match op {
                BinOp::And => Formula::and(lhs, rhs),
                BinOp::Or => Formula::or(lhs, rhs),
                BinOp::Implies => Formula::implies(lhs, rhs),
                BinOp::Iff => Formula::iff(lhs, rhs),
            });
        }
        if self.peek() == Some(b'x') {
            return self.variable();
        }
        Err(self.unexpected())
    }

    fn binop(&mut self) -> Result<BinOp, ParseError> {
        if self.eat("&") {
            Ok(BinOp::And)
        } else if self.eat("|") {
            Ok(BinOp::Or)
        } else if self.eat("->") {
            Ok(BinOp::Implies)
        } else if self.eat("<->") {
            Ok(BinOp::Iff)
        } else {
            Err(self.unexpected())
        }
    }

    fn variable(&mut self) -> Result<Formula, ParseError> {
        let start = self.pos;
        self.pos += 1;
        let digits_start = self.pos;
        while matches!(self.peek(), Some(b'0' | b'1')) {
            self.pos += 1;
        }
        let digits = &self.src[digits_start..self.pos];
        match digits {
            [] => Err(self.unexpected()),
            [b'0', _, ..] => Err(ParseError::LeadingZero(start)),
            _ => {
                let id = BigUint::parse_bytes(digits, 2).expect("binary digits");
                Ok(Formula::Var(VarId(id)))
            }
        }
    }
}

/// Top-level node of a subformula, with children given as table indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    Atom(VarId),
    Neg(usize),
    And(usize, usize),
    Nec(usize),
    K(usize),
}

/// The subformula closure of a formula, indexed in post-order with
/// first-occurrence deduplication.
///
/// Children always have smaller indices than their parents and the formula
/// itself is the last entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubformulaTable {
    formulas: Vec<Formula>,
    nodes: Vec<Node>,
    index: HashMap<Formula, usize>,
}

impl SubformulaTable {
    pub fn new(root: &Formula) -> Self {
        let mut table = SubformulaTable {
            formulas: Vec::new(),
            nodes: Vec::new(),
            index: HashMap::new(),
        };
        table.visit(root);
        table
    }

    fn visit(&mut self, f: &Formula) -> usize {
        if let Some(&i) = self.index.get(f) {
            return i;
        }
        let node = match f {
            Formula::Var(v) => Node::Atom(v.clone()),
            Formula::Neg(c) => Node::Neg(self.visit(c)),
            Formula::And(l, r) => {
                let l = self.visit(l);
                let r = self.visit(r);
                Node::And(l, r)
            }
            Formula::Nec(c) => Node::Nec(self.visit(c)),
            Formula::K(c) => Node::K(self.visit(c)),
        };
        let i = self.nodes.len();
        self.nodes.push(node);
        self.formulas.push(f.clone());
        self.index.insert(f.clone(), i);
        i
    }

    /// Number of distinct subformulas.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn formula(&self, i: usize) -> &Formula {
        &self.formulas[i]
    }

    pub fn formulas(&self) -> &[Formula] {
        &self.formulas
    }

    pub fn index_of(&self, f: &Formula) -> Option<usize> {
        self.index.get(f).copied()
    }

    pub fn is_atom(&self, i: usize) -> bool {
        matches!(self.nodes[i], Node::Atom(_))
    }

    pub fn is_nec(&self, i: usize) -> bool {
        matches!(self.nodes[i], Node::Nec(_))
    }

    pub fn is_k(&self, i: usize) -> bool {
        matches!(self.nodes[i], Node::K(_))
    }

    /// Indices `i` with `sf[i] = []chi`, paired with the index of `chi`.
    pub fn nec_entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.nodes.iter().enumerate().filter_map(|(i, n)| match n {
            Node::Nec(c) => Some((i, *c)),
            _ => None,
        })
    }

    /// Indices `i` with `sf[i] = K chi`, paired with the index of `chi`.
    pub fn k_entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.nodes.iter().enumerate().filter_map(|(i, n)| match n {
            Node::K(c) => Some((i, *c)),
            _ => None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn parses_primitives() {
        assert_eq!(p("x0"), Formula::var(0));
        assert_eq!(
            p("(x1 & ~x1)"),
            Formula::and(Formula::var(1), Formula::neg(Formula::var(1)))
        );
        assert_eq!(
            p("<>x0"),
            Formula::neg(Formula::nec(Formula::neg(Formula::var(0))))
        );
        assert_eq!(
            p("  K  [] x110 "),
            Formula::k(Formula::nec(Formula::var(6)))
        );
    }

    #[test]
    fn desugars_connectives() {
        assert_eq!(p("Lx0"), p("~K~x0"));
        assert_eq!(p("<>x0"), p("~[]~x0"));
        assert_eq!(p("(x0 | x1)"), p("~(~x0 & ~x1)"));
        assert_eq!(p("(x0 -> x1)"), p("~(~~x0 & ~x1)"));
        assert_eq!(p("(x0 <-> x1)"), p("(~(~~x0 & ~x1) & ~(~~x1 & ~x0))"));
    }

    #[test]
    fn rejects_malformed_input() {
        assert_eq!(parse("x01"), Err(ParseError::LeadingZero(0)));
        assert_eq!(parse(""), Err(ParseError::Empty));
        assert_eq!(parse("   "), Err(ParseError::Empty));
        assert!(matches!(parse("(x0 & x1"), Err(ParseError::Unbalanced(_))));
        assert!(matches!(parse("x0)"), Err(ParseError::Unbalanced(2))));
        assert!(matches!(
            parse("(x0 ^ x1)"),
            Err(ParseError::UnexpectedToken { found: '^', .. })
        ));
        assert!(matches!(parse("x"), Err(ParseError::UnexpectedEnd(1))));
        assert!(matches!(
            parse("x2"),
            Err(ParseError::UnexpectedToken { .. })
        ));
        assert!(matches!(parse("x0 x1"), Err(ParseError::Trailing(3))));
        assert!(matches!(parse("x0 & x1"), Err(ParseError::Trailing(3))));
    }

    #[test]
    fn big_variable_ids() {
        let text = format!("x1{}", "0".repeat(100));
        let f = p(&text);
        match &f {
            Formula::Var(v) => assert_eq!(v.0, BigUint::from(1u8) << 100),
            _ => panic!("expected a variable"),
        }
        assert_eq!(f.render(), text);
    }

    #[test]
    fn renders_canonically() {
        assert_eq!(Formula::var(0).render(), "x0");
        assert_eq!(p("<>x0").render(), "~[]~x0");
        assert_eq!(
            Formula::and(Formula::var(1), Formula::var(2)).render(),
            "(x1 & x10)"
        );
    }

    #[test]
    fn lengths_count_symbols() {
        assert_eq!(p("x0").lengths(), Lengths { n: 2, ell: 1 });
        assert_eq!(p("[]x0").lengths(), Lengths { n: 3, ell: 2 });
        // ( x 1 & ~ x 1 )
        assert_eq!(p("(x1 & ~x1)").lengths(), Lengths { n: 8, ell: 6 });
        assert_eq!(p("x101").lengths(), Lengths { n: 4, ell: 1 });
    }

    #[test]
    fn subformula_order() {
        let t = p("x0").subformulas();
        assert_eq!(t.len(), 1);

        let t = p("(x0 & ~x0)").subformulas();
        let rendered: Vec<_> = t.formulas().iter().map(Formula::render).collect();
        assert_eq!(rendered, ["x0", "~x0", "(x0 & ~x0)"]);
        assert_eq!(t.node(1), &Node::Neg(0));
        assert_eq!(t.node(2), &Node::And(0, 1));

        let t = p("[]x0").subformulas();
        assert_eq!(t.len(), 2);
        assert!(t.is_nec(1));
        assert!(!t.is_k(1));
        assert!(t.is_atom(0));
        assert_eq!(t.root(), 1);
    }
}
