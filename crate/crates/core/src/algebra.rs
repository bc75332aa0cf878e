//! Finite bounded distributive lattices with negation: table representation,
//! equation checking, lattice filters, congruences, the Leibniz congruence
//! (brute force and via the semi-De Morgan characterization), quotients, and
//! the `A*` construction.
//!
//! Carriers are `{0 .. size-1}`; the lattice order is derived from the meet
//! table (`a ≤ b ⇔ a∧b = a`) rather than stored.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::calculi::{preset, CalculiError};
use crate::syntax::{Equation, Formula};

/// A finite algebra `⟨A; ∧, ∨, ¬, ⊥, ⊤⟩` with flat row-major tables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteAlgebra {
    pub size: usize,
    pub meet: Vec<usize>,
    pub join: Vec<usize>,
    pub neg: Vec<usize>,
    pub bot: usize,
    pub top: usize,
}

/// A matrix `⟨A, D⟩`; filter-hood of `D` is checked by operations, not
/// assumed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    pub algebra: FiniteAlgebra,
    pub designated: Vec<usize>,
}

/// A congruence (or candidate partition) as a canonical labeling:
/// `labels[i]` is the block number of element `i`, blocks numbered by first
/// occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Congruence {
    pub labels: Vec<usize>,
}

/// An assignment of carrier elements to variable names.
pub type Valuation = BTreeMap<String, usize>;

/// Errors raised by the algebra operations.
#[derive(Debug, thiserror::Error)]
pub enum AlgebraError {
    #[error("malformed tables: {0}")]
    Malformed(String),
    #[error("no binding for variable {0:?}")]
    MissingVar(String),
    #[error("algebra size {size} exceeds the bound {bound}")]
    OverBound { size: usize, bound: usize },
    #[error("partition is not compatible with the operations")]
    Incompatible,
    #[error("algebra is not a member of {0}")]
    NotInClass(String),
    #[error(transparent)]
    Calculi(#[from] CalculiError),
}

/// Hard bound for the congruence/Leibniz brute force.
pub const CONGRUENCE_BOUND: usize = 7;

impl FiniteAlgebra {
    #[inline]
    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.size + b]
    }

    #[inline]
    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.size + b]
    }

    #[inline]
    pub fn neg(&self, a: usize) -> usize {
        self.neg[a]
    }

    /// Derived order `a ≤ b ⇔ a∧b = a`.
    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.meet(a, b) == a
    }

    /// Check that the tables are total and in-range.
    pub fn check_tables(&self) -> Result<(), AlgebraError> {
        let n = self.size;
        if n == 0 {
            return Err(AlgebraError::Malformed("empty carrier".into()));
        }
        if self.meet.len() != n * n || self.join.len() != n * n || self.neg.len() != n {
            return Err(AlgebraError::Malformed("table dimensions".into()));
        }
        if self
            .meet
            .iter()
            .chain(self.join.iter())
            .chain(self.neg.iter())
            .any(|&x| x >= n)
            || self.bot >= n
            || self.top >= n
        {
            return Err(AlgebraError::Malformed("entry out of range".into()));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Homomorphic evaluation of a formula under a valuation.
pub fn eval(alg: &FiniteAlgebra, v: &Valuation, f: &Formula) -> Result<usize, AlgebraError> {
    match f {
        Formula::Var(name) => v
            .get(name)
            .copied()
            .ok_or_else(|| AlgebraError::MissingVar(name.clone())),
        Formula::Bot => Ok(alg.bot),
        Formula::Top => Ok(alg.top),
        Formula::Neg(inner) => Ok(alg.neg(eval(alg, v, inner)?)),
        Formula::And(l, r) => Ok(alg.meet(eval(alg, v, l)?, eval(alg, v, r)?)),
        Formula::Or(l, r) => Ok(alg.join(eval(alg, v, l)?, eval(alg, v, r)?)),
    }
}

/// A formula compiled to postfix over variable slots, for hot evaluation
/// loops over many valuations.
#[derive(Debug, Clone)]
pub struct Compiled {
    ops: Vec<Op>,
}

#[derive(Debug, Clone, Copy)]
enum Op {
    Var(usize),
    Bot,
    Top,
    Neg,
    And,
    Or,
}

/// Compile `f` against a fixed variable ordering (slot `i` holds the value
/// of `vars[i]`). Variables of `f` must all appear in `vars`.
pub fn compile(f: &Formula, vars: &[String]) -> Result<Compiled, AlgebraError> {
    let mut ops = Vec::new();
    push_ops(f, vars, &mut ops)?;
    Ok(Compiled { ops })
}

fn push_ops(f: &Formula, vars: &[String], ops: &mut Vec<Op>) -> Result<(), AlgebraError> {
    match f {
        Formula::Var(name) => {
            let i = vars
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| AlgebraError::MissingVar(name.clone()))?;
            ops.push(Op::Var(i));
        }
        Formula::Bot => ops.push(Op::Bot),
        Formula::Top => ops.push(Op::Top),
        Formula::Neg(inner) => {
            push_ops(inner, vars, ops)?;
            ops.push(Op::Neg);
        }
        Formula::And(l, r) => {
            push_ops(l, vars, ops)?;
            push_ops(r, vars, ops)?;
            ops.push(Op::And);
        }
        Formula::Or(l, r) => {
            push_ops(l, vars, ops)?;
            push_ops(r, vars, ops)?;
            ops.push(Op::Or);
        }
    }
    Ok(())
}

impl Compiled {
    /// Evaluate against an assignment of the compiled variable slots,
    /// reusing `stack` as scratch space.
    pub fn eval(&self, alg: &FiniteAlgebra, assignment: &[usize], stack: &mut Vec<usize>) -> usize {
        stack.clear();
        for op in &self.ops {
            match *op {
                Op::Var(i) => stack.push(assignment[i]),
                Op::Bot => stack.push(alg.bot),
                Op::Top => stack.push(alg.top),
                Op::Neg => {
                    let a = stack.pop().expect("stack");
                    stack.push(alg.neg(a));
                }
                Op::And => {
                    let b = stack.pop().expect("stack");
                    let a = stack.pop().expect("stack");
                    stack.push(alg.meet(a, b));
                }
                Op::Or => {
                    let b = stack.pop().expect("stack");
                    let a = stack.pop().expect("stack");
                    stack.push(alg.join(a, b));
                }
            }
        }
        stack.pop().expect("stack")
    }
}

/// Advance an odometer over `{0..base-1}^k`; returns false after the last
/// assignment.
pub fn next_assignment(assignment: &mut [usize], base: usize) -> bool {
    for slot in assignment.iter_mut() {
        *slot += 1;
        if *slot < base {
            return true;
        }
        *slot = 0;
    }
    false
}

/// Exhaustive equation check; `None` means the equation holds, otherwise a
/// witness valuation is returned.
pub fn holds(alg: &FiniteAlgebra, eq: &Equation) -> Result<Option<Valuation>, AlgebraError> {
    let vars: Vec<String> = {
        let mut s = eq.lhs.vars();
        s.extend(eq.rhs.vars());
        s.into_iter().collect()
    };
    let lhs = compile(&eq.lhs, &vars)?;
    let rhs = compile(&eq.rhs, &vars)?;
    let mut assignment = vec![0usize; vars.len()];
    let mut stack = Vec::new();
    loop {
        if lhs.eval(alg, &assignment, &mut stack) != rhs.eval(alg, &assignment, &mut stack) {
            return Ok(Some(
                vars.iter().cloned().zip(assignment.iter().copied()).collect(),
            ));
        }
        if !next_assignment(&mut assignment, alg.size) {
            return Ok(None);
        }
    }
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// Per-axiom validation outcome against a preset class.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub class: String,
    /// Per equation: name and, on failure, a witness valuation.
    pub results: Vec<(String, Option<Valuation>)>,
    pub passed: bool,
}

/// Check every axiom of the requested preset class, reporting a concrete
/// violating valuation per failed axiom.
pub fn validate(alg: &FiniteAlgebra, class: &str) -> Result<ValidationReport, AlgebraError> {
    alg.check_tables()?;
    let pres = preset(class)?;
    let mut results = Vec::new();
    let mut passed = true;
    for (name, eq) in &pres.equations {
        let witness = holds(alg, eq)?;
        passed &= witness.is_none();
        results.push((name.clone(), witness));
    }
    Ok(ValidationReport {
        class: pres.name,
        results,
        passed,
    })
}

/// Convenience: does the algebra lie in the preset class?
pub fn is_in_class(alg: &FiniteAlgebra, class: &str) -> Result<bool, AlgebraError> {
    Ok(validate(alg, class)?.passed)
}

// ---------------------------------------------------------------------------
// Filters
// ---------------------------------------------------------------------------

/// All non-empty, upward-closed, meet-closed subsets, as bitmasks in
/// ascending numeric order. Requires `size ≤ 64`.
pub fn filter_masks(alg: &FiniteAlgebra) -> Vec<u64> {
    let n = alg.size;
    let mut out = Vec::new();
    'subsets: for mask in 1u64..(1 << n) {
        for a in 0..n {
            if mask >> a & 1 == 0 {
                continue;
            }
            for b in 0..n {
                if alg.leq(a, b) && mask >> b & 1 == 0 {
                    continue 'subsets; // not up-closed
                }
                if mask >> b & 1 == 1 && mask >> alg.meet(a, b) & 1 == 0 {
                    continue 'subsets; // not meet-closed
                }
            }
        }
        out.push(mask);
    }
    out
}

/// [`filter_masks`] unpacked into element lists.
pub fn filters(alg: &FiniteAlgebra) -> Vec<Vec<usize>> {
    filter_masks(alg)
        .into_iter()
        .map(|m| (0..alg.size).filter(|a| m >> a & 1 == 1).collect())
        .collect()
}

// ---------------------------------------------------------------------------
// Congruences and Leibniz
// ---------------------------------------------------------------------------

impl Congruence {
    /// Canonicalize arbitrary labels into first-occurrence numbering.
    pub fn canonical(raw: &[usize]) -> Congruence {
        let mut map: BTreeMap<usize, usize> = BTreeMap::new();
        let mut labels = Vec::with_capacity(raw.len());
        for &l in raw {
            let next = map.len();
            labels.push(*map.entry(l).or_insert(next));
        }
        Congruence { labels }
    }

    pub fn identity(n: usize) -> Congruence {
        Congruence {
            labels: (0..n).collect(),
        }
    }

    pub fn total(n: usize) -> Congruence {
        Congruence {
            labels: vec![0; n],
        }
    }

    #[inline]
    pub fn related(&self, a: usize, b: usize) -> bool {
        self.labels[a] == self.labels[b]
    }

    pub fn block_count(&self) -> usize {
        self.labels.iter().copied().max().map_or(0, |m| m + 1)
    }

    /// Blocks as element lists, in block-number order.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.block_count()];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }

    /// Set inclusion as relations.
    pub fn refines(&self, other: &Congruence) -> bool {
        let n = self.labels.len();
        (0..n).all(|a| (0..n).all(|b| !self.related(a, b) || other.related(a, b)))
    }
}

fn is_compatible(alg: &FiniteAlgebra, c: &Congruence) -> bool {
    let n = alg.size;
    for a in 0..n {
        for b in (a + 1)..n {
            if !c.related(a, b) {
                continue;
            }
            if !c.related(alg.neg(a), alg.neg(b)) {
                return false;
            }
            for x in 0..n {
                if !c.related(alg.meet(a, x), alg.meet(b, x))
                    || !c.related(alg.join(a, x), alg.join(b, x))
                {
                    return false;
                }
            }
        }
    }
    true
}

/// All congruences, by brute force over restricted-growth-string partitions
/// (Bell(7) = 877 candidates at the bound).
pub fn congruences(alg: &FiniteAlgebra) -> Result<Vec<Congruence>, AlgebraError> {
    let n = alg.size;
    if n > CONGRUENCE_BOUND {
        return Err(AlgebraError::OverBound {
            size: n,
            bound: CONGRUENCE_BOUND,
        });
    }
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    loop {
        let c = Congruence {
            labels: rgs.clone(),
        };
        if is_compatible(alg, &c) {
            out.push(c);
        }
        // next restricted growth string: rgs[i] ≤ 1 + max(rgs[..i]), rgs[0] = 0
        let mut i = n;
        loop {
            if i <= 1 {
                return Ok(out);
            }
            i -= 1;
            let max_prefix = rgs[..i].iter().copied().max().unwrap_or(0);
            if rgs[i] <= max_prefix {
                rgs[i] += 1;
                for slot in rgs[i + 1..].iter_mut() {
                    *slot = 0;
                }
                break;
            }
        }
    }
}

fn designated_mask(m: &Matrix) -> u64 {
    m.designated.iter().fold(0u64, |acc, &d| acc | 1 << d)
}

/// The Leibniz congruence `Ω_A(D)`: the largest congruence compatible with
/// `D` (`a ∈ D` and `a θ b` imply `b ∈ D`). Computed as the transitive
/// closure of the union of all compatible congruences, then verified to be
/// itself compatible — the brute-force definition, used as the oracle.
pub fn leibniz(m: &Matrix) -> Result<Congruence, AlgebraError> {
    let n = m.algebra.size;
    let dmask = designated_mask(m);
    let compatible: Vec<Congruence> = congruences(&m.algebra)?
        .into_iter()
        .filter(|c| {
            (0..n).all(|a| {
                (0..n).all(|b| !c.related(a, b) || (dmask >> a & 1) == (dmask >> b & 1))
            })
        })
        .collect();
    // Union-join via union-find over blocks.
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for c in &compatible {
        for a in 0..n {
            for b in (a + 1)..n {
                if c.related(a, b) {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    if ra != rb {
                        parent[ra] = rb;
                    }
                }
            }
        }
    }
    let raw: Vec<usize> = (0..n).map(|x| find(&mut parent, x)).collect();
    let joined = Congruence::canonical(&raw);
    if !is_compatible(&m.algebra, &joined) {
        return Err(AlgebraError::Incompatible);
    }
    Ok(joined)
}

/// The Leibniz congruence over a semi-De Morgan matrix with filter
/// designation, by the three-clause characterization: `a θ b` iff for all
/// `c₁, c₂, c₃`:
///
/// 1. `a∨c₁ ∈ D ⇔ b∨c₁ ∈ D`;
/// 2. `¬(a∧c₂)∨c₁ ∈ D ⇔ ¬(b∧c₂)∨c₁ ∈ D`;
/// 3. `¬(¬(a∧c₃)∧c₂)∨c₁ ∈ D ⇔ ¬(¬(b∧c₃)∧c₂)∨c₁ ∈ D`.
pub fn leibniz_sdm(m: &Matrix) -> Result<Congruence, AlgebraError> {
    let alg = &m.algebra;
    if !is_in_class(alg, "SDM")? {
        return Err(AlgebraError::NotInClass("SDM".into()));
    }
    let n = alg.size;
    let dmask = designated_mask(m);
    let ind = |x: usize| dmask >> x & 1 == 1;
    let related = |a: usize, b: usize| -> bool {
        for c1 in 0..n {
            if ind(alg.join(a, c1)) != ind(alg.join(b, c1)) {
                return false;
            }
            for c2 in 0..n {
                if ind(alg.join(alg.neg(alg.meet(a, c2)), c1))
                    != ind(alg.join(alg.neg(alg.meet(b, c2)), c1))
                {
                    return false;
                }
                for c3 in 0..n {
                    let la = alg.join(alg.neg(alg.meet(alg.neg(alg.meet(a, c3)), c2)), c1);
                    let lb = alg.join(alg.neg(alg.meet(alg.neg(alg.meet(b, c3)), c2)), c1);
                    if ind(la) != ind(lb) {
                        return false;
                    }
                }
            }
        }
        true
    };
    // The clauses are bi-implications quantified over parameters, so the
    // relation is an equivalence by construction; label by first occurrence.
    let mut raw = vec![usize::MAX; n];
    let mut next = 0usize;
    for a in 0..n {
        if raw[a] != usize::MAX {
            continue;
        }
        raw[a] = next;
        for b in (a + 1)..n {
            if raw[b] == usize::MAX && related(a, b) {
                raw[b] = next;
            }
        }
        next += 1;
    }
    Ok(Congruence::canonical(&raw))
}

/// The quotient algebra `A/θ`: blocks ordered by least representative.
pub fn quotient(alg: &FiniteAlgebra, theta: &Congruence) -> Result<FiniteAlgebra, AlgebraError> {
    if !is_compatible(alg, theta) {
        return Err(AlgebraError::Incompatible);
    }
    // Map block label → new index, ordered by least representative.
    let blocks = theta.blocks();
    let mut order: Vec<usize> = (0..blocks.len()).collect();
    order.sort_by_key(|&l| blocks[l][0]);
    let mut newix = vec![0usize; blocks.len()];
    for (i, &l) in order.iter().enumerate() {
        newix[l] = i;
    }
    let cls = |a: usize| newix[theta.labels[a]];
    let reps: Vec<usize> = order.iter().map(|&l| blocks[l][0]).collect();
    let k = reps.len();
    let mut meet = vec![0usize; k * k];
    let mut join = vec![0usize; k * k];
    let mut negt = vec![0usize; k];
    for (i, &a) in reps.iter().enumerate() {
        negt[i] = cls(alg.neg(a));
        for (j, &b) in reps.iter().enumerate() {
            meet[i * k + j] = cls(alg.meet(a, b));
            join[i * k + j] = cls(alg.join(a, b));
        }
    }
    Ok(FiniteAlgebra {
        size: k,
        meet,
        join,
        neg: negt,
        bot: cls(alg.bot),
        top: cls(alg.top),
    })
}

/// The `A*` construction: carrier = image of ¬ (meet-closed by N2), with
/// `a ∨* b := ¬¬(a ∨ b)`, meet and ¬ restricted, and the original bounds
/// (both lie in the image by SDM1 and N1). For semi-De Morgan input the
/// result is a De Morgan algebra.
pub fn star_algebra(alg: &FiniteAlgebra) -> Result<FiniteAlgebra, AlgebraError> {
    if !is_in_class(alg, "SDM")? {
        return Err(AlgebraError::NotInClass("SDM".into()));
    }
    let image: Vec<usize> = {
        let s: BTreeSet<usize> = (0..alg.size).map(|a| alg.neg(a)).collect();
        s.into_iter().collect()
    };
    let ix = |a: usize| -> usize { image.iter().position(|&x| x == a).expect("in image") };
    let k = image.len();
    let mut meet = vec![0usize; k * k];
    let mut join = vec![0usize; k * k];
    let mut negt = vec![0usize; k];
    for (i, &a) in image.iter().enumerate() {
        negt[i] = ix(alg.neg(a));
        for (j, &b) in image.iter().enumerate() {
            meet[i * k + j] = ix(alg.meet(a, b));
            join[i * k + j] = ix(alg.neg(alg.neg(alg.join(a, b))));
        }
    }
    Ok(FiniteAlgebra {
        size: k,
        meet,
        join,
        neg: negt,
        bot: ix(alg.bot),
        top: ix(alg.top),
    })
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

/// Interchange form of an algebra: nested rows for readability.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub size: usize,
    pub meet: Vec<Vec<usize>>,
    pub join: Vec<Vec<usize>>,
    pub neg: Vec<usize>,
    pub bot: usize,
    pub top: usize,
}

/// Interchange form of a matrix.
#[derive(Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    #[serde(flatten)]
    pub algebra: AlgebraJson,
    pub designated: Vec<usize>,
}

impl From<&FiniteAlgebra> for AlgebraJson {
    fn from(a: &FiniteAlgebra) -> AlgebraJson {
        AlgebraJson {
            size: a.size,
            meet: a.meet.chunks(a.size).map(|r| r.to_vec()).collect(),
            join: a.join.chunks(a.size).map(|r| r.to_vec()).collect(),
            neg: a.neg.clone(),
            bot: a.bot,
            top: a.top,
        }
    }
}

impl AlgebraJson {
    pub fn into_algebra(self) -> Result<FiniteAlgebra, AlgebraError> {
        let alg = FiniteAlgebra {
            size: self.size,
            meet: self.meet.into_iter().flatten().collect(),
            join: self.join.into_iter().flatten().collect(),
            neg: self.neg,
            bot: self.bot,
            top: self.top,
        };
        alg.check_tables()?;
        Ok(alg)
    }
}

impl From<&Matrix> for MatrixJson {
    fn from(m: &Matrix) -> MatrixJson {
        MatrixJson {
            algebra: (&m.algebra).into(),
            designated: m.designated.clone(),
        }
    }
}

impl MatrixJson {
    pub fn into_matrix(self) -> Result<Matrix, AlgebraError> {
        let algebra = self.algebra.into_algebra()?;
        if self.designated.iter().any(|&d| d >= algebra.size) {
            return Err(AlgebraError::Malformed("designated out of range".into()));
        }
        Ok(Matrix {
            algebra,
            designated: self.designated,
        })
    }
}

// ---------------------------------------------------------------------------
// Named sample algebras
// ---------------------------------------------------------------------------

/// A few concrete algebras used throughout the tests and documentation.
pub mod samples {
    use super::FiniteAlgebra;

    /// The two-element Boolean algebra (0 = ⊥, 1 = ⊤).
    pub fn boolean2() -> FiniteAlgebra {
        FiniteAlgebra {
            size: 2,
            meet: vec![0, 0, 0, 1],
            join: vec![0, 1, 1, 1],
            neg: vec![1, 0],
            bot: 0,
            top: 1,
        }
    }

    /// The `n`-element chain `0 < 1 < … < n-1` with the pseudo-complement
    /// negation (`¬0 = ⊤`, `¬a = ⊥` otherwise).
    pub fn chain_pl(n: usize) -> FiniteAlgebra {
        let mut meet = vec![0usize; n * n];
        let mut join = vec![0usize; n * n];
        for a in 0..n {
            for b in 0..n {
                meet[a * n + b] = a.min(b);
                join[a * n + b] = a.max(b);
            }
        }
        let mut neg = vec![0usize; n];
        neg[0] = n - 1;
        FiniteAlgebra {
            size: n,
            meet,
            join,
            neg,
            bot: 0,
            top: n - 1,
        }
    }

    /// The four-element Belnap (De Morgan) algebra: 0 = ⊥, 3 = ⊤, with the
    /// incomparable middle elements 1 = a and 2 = b; ¬ swaps the bounds and
    /// fixes a and b.
    pub fn belnap() -> FiniteAlgebra {
        let meet = vec![
            0, 0, 0, 0, //
            0, 1, 0, 1, //
            0, 0, 2, 2, //
            0, 1, 2, 3,
        ];
        let join = vec![
            0, 1, 2, 3, //
            1, 1, 3, 3, //
            2, 3, 2, 3, //
            3, 3, 3, 3,
        ];
        FiniteAlgebra {
            size: 4,
            meet,
            join,
            neg: vec![3, 1, 2, 0],
            bot: 0,
            top: 3,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::samples::{belnap, boolean2, chain_pl};
    use super::*;
    use crate::syntax::{neg, parse, parse_equation, var};

    #[test]
    fn validate_examples() {
        let b2 = boolean2();
        for class in ["DN", "SDM", "DM", "PL", "O", "berman:1:0", "B"] {
            assert!(is_in_class(&b2, class).unwrap(), "2-Boolean in {class}");
        }
        assert!(is_in_class(&belnap(), "DM").unwrap());
        assert!(is_in_class(&chain_pl(3), "PL").unwrap());
        // The 3-chain p-lattice is not De Morgan (¬¬a = ⊤ ≠ a).
        let rep = validate(&chain_pl(3), "DM").unwrap();
        assert!(!rep.passed);
        let dm = rep.results.iter().find(|(n, _)| n == "DM").unwrap();
        assert!(dm.1.is_some());
    }

    #[test]
    fn eval_examples() {
        let b2 = boolean2();
        let v: Valuation = [("p".to_string(), 1usize)].into_iter().collect();
        assert_eq!(eval(&b2, &v, &neg(var("p"))).unwrap(), 0);
        assert_eq!(eval(&b2, &Valuation::new(), &neg(Formula::Bot)).unwrap(), 1);
        // Belnap: a ∧ ¬a = a (¬a = a).
        let v: Valuation = [("p".to_string(), 1usize)].into_iter().collect();
        assert_eq!(
            eval(&belnap(), &v, &parse("p & ~p").unwrap()).unwrap(),
            1
        );
        assert!(matches!(
            eval(&b2, &Valuation::new(), &var("p")),
            Err(AlgebraError::MissingVar(_))
        ));
    }

    #[test]
    fn holds_examples() {
        let b2 = boolean2();
        assert!(holds(&b2, &parse_equation("~~x = x").unwrap())
            .unwrap()
            .is_none());
        let w = holds(&chain_pl(3), &parse_equation("~~x = x").unwrap())
            .unwrap()
            .expect("fails");
        // Witness must actually falsify: ¬¬a = ⊤ ≠ a.
        assert_eq!(w["x"], 1);
    }

    #[test]
    fn filters_examples() {
        assert_eq!(filters(&boolean2()), vec![vec![1], vec![0, 1]]);
        assert_eq!(
            filters(&chain_pl(3)),
            vec![vec![2], vec![1, 2], vec![0, 1, 2]]
        );
        // Belnap: {⊤}, {a,⊤}, {b,⊤}, all — and none others.
        assert_eq!(
            filters(&belnap()),
            vec![vec![3], vec![1, 3], vec![2, 3], vec![0, 1, 2, 3]]
        );
    }

    #[test]
    fn congruences_examples() {
        let cs = congruences(&boolean2()).unwrap();
        assert_eq!(cs.len(), 2);
        assert!(cs.contains(&Congruence::identity(2)));
        assert!(cs.contains(&Congruence::total(2)));
        let cs4 = congruences(&chain_pl(4)).unwrap();
        assert!(cs4.contains(&Congruence::identity(4)));
        assert!(cs4.contains(&Congruence::total(4)));
        // Frozen against the independent relation-scan oracle below.
        assert_eq!(cs4.len(), congruence_count_oracle(&chain_pl(4)));
        assert_eq!(cs4.len(), 5);
    }

    /// Independent oracle: scan all binary relations on the carrier (as
    /// bitmasks over ordered pairs) for compatible equivalences. Feasible
    /// for size ≤ 4 (2^16 relations).
    fn congruence_count_oracle(alg: &FiniteAlgebra) -> usize {
        let n = alg.size;
        assert!(n <= 4);
        let bit = |r: u32, a: usize, b: usize| r >> (a * n + b) & 1 == 1;
        let mut count = 0;
        'rel: for r in 0u32..1 << (n * n) {
            for a in 0..n {
                if !bit(r, a, a) {
                    continue 'rel;
                }
                for b in 0..n {
                    if bit(r, a, b) != bit(r, b, a) {
                        continue 'rel;
                    }
                    for c in 0..n {
                        if bit(r, a, b) && bit(r, b, c) && !bit(r, a, c) {
                            continue 'rel;
                        }
                    }
                    if bit(r, a, b) {
                        if !bit(r, alg.neg(a), alg.neg(b)) {
                            continue 'rel;
                        }
                        for x in 0..n {
                            if !bit(r, alg.meet(a, x), alg.meet(b, x))
                                || !bit(r, alg.join(a, x), alg.join(b, x))
                            {
                                continue 'rel;
                            }
                        }
                    }
                }
            }
            count += 1;
        }
        count
    }

    #[test]
    fn leibniz_examples() {
        let b2 = boolean2();
        let m = Matrix {
            algebra: b2.clone(),
            designated: vec![1],
        };
        assert_eq!(leibniz(&m).unwrap(), Congruence::identity(2));
        assert_eq!(leibniz_sdm(&m).unwrap(), Congruence::identity(2));
        let all = Matrix {
            algebra: b2,
            designated: vec![0, 1],
        };
        assert_eq!(leibniz(&all).unwrap(), Congruence::total(2));
        // Belnap with F = {a,⊤}: oracle and characterization must agree.
        let mb = Matrix {
            algebra: belnap(),
            designated: vec![1, 3],
        };
        assert_eq!(leibniz(&mb).unwrap(), leibniz_sdm(&mb).unwrap());
        // 3-chain p-lattice with {⊤} is reduced.
        let m3 = Matrix {
            algebra: chain_pl(3),
            designated: vec![2],
        };
        assert_eq!(leibniz(&m3).unwrap(), Congruence::identity(3));
        assert_eq!(leibniz_sdm(&m3).unwrap(), Congruence::identity(3));
    }

    #[test]
    fn quotient_examples() {
        let b = belnap();
        assert_eq!(quotient(&b, &Congruence::identity(4)).unwrap(), b);
        assert_eq!(quotient(&b, &Congruence::total(4)).unwrap().size, 1);
        // On the 3-chain p-lattice, collapsing a with ⊤ is a congruence
        // (¬a = ¬⊤ = ⊥); the quotient is the 2-element Boolean algebra.
        let c3 = chain_pl(3);
        let theta = Congruence::canonical(&[0, 1, 1]);
        let q = quotient(&c3, &theta).unwrap();
        assert_eq!(q, boolean2());
        // Incompatible partition rejected: on Belnap, {⊥,a} is no
        // congruence since ¬⊥ = ⊤ while ¬a = a.
        assert!(quotient(&b, &Congruence::canonical(&[0, 0, 1, 2])).is_err());
        // Quotients preserve equations the input satisfies.
        let eq = parse_equation("x & ~(x & y) = x & ~y").unwrap();
        assert!(holds(&c3, &eq).unwrap().is_none());
        assert!(holds(&q, &eq).unwrap().is_none());
    }

    #[test]
    fn star_algebra_examples() {
        assert_eq!(star_algebra(&boolean2()).unwrap(), boolean2());
        // 3-chain p-lattice: image {⊥,⊤} → 2-Boolean.
        assert_eq!(star_algebra(&chain_pl(3)).unwrap(), boolean2());
        assert!(is_in_class(&star_algebra(&belnap()).unwrap(), "DM").unwrap());
        // Non-SDM input rejected: Belnap with ¬ fixing everything is not SDM.
        let mut bad = belnap();
        bad.neg = vec![0, 1, 2, 3];
        assert!(star_algebra(&bad).is_err());
    }

    #[test]
    fn neg_is_order_reversing_in_dn() {
        // Consequence of N1–N2 checked directly on the samples.
        for alg in [boolean2(), chain_pl(3), chain_pl(4), belnap()] {
            assert!(is_in_class(&alg, "DN").unwrap());
            for a in 0..alg.size {
                for b in 0..alg.size {
                    if alg.leq(a, b) {
                        assert!(alg.leq(alg.neg(b), alg.neg(a)));
                    }
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let m = Matrix {
            algebra: belnap(),
            designated: vec![1, 3],
        };
        let s = serde_json::to_string(&MatrixJson::from(&m)).unwrap();
        let back: MatrixJson = serde_json::from_str(&s).unwrap();
        assert_eq!(back.into_matrix().unwrap(), m);
    }
}
