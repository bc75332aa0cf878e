//! Formula representation, parsing, printing, substitution, and the paper's
//! formula transformations (¬-depth, balancedness, `f_k`, `g_n`, star).
//!
//! The shared signature is `{∧, ∨, ¬, ⊥, ⊤}`; there is deliberately no
//! implication connective. Concrete syntax uses `&`, `|`, `~`, `0`, `1` with
//! precedence `~ > & > |` and left-associative binary connectives.
//!
//! Two variable namespaces exist:
//!
//! - user variables, matching `[a-z][a-zA-Z0-9_]*`;
//! - reserved machine-generated variables, prefixed with `#` (`#q`, `#q0`,
//!   `#t`, `#n[...]`). These realize the paper's freshness side conditions
//!   ({q, q_i, t} disjoint from the variables of the input rules) by
//!   construction: the user-facing parser rejects them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A propositional/algebraic term over `{∧, ∨, ¬, ⊥, ⊤}` and variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Var(String),
    Bot,
    Top,
    Neg(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

/// A finite map from variable names to formulas; variables outside the map
/// are fixed. Application is plain first-order (capture-free) substitution.
pub type Substitution = BTreeMap<String, Formula>;

/// An equation `lhs ≈ rhs` between two terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Equation {
    pub lhs: Formula,
    pub rhs: Formula,
}

/// Convenience constructor: a variable formula.
pub fn var(name: &str) -> Formula {
    Formula::Var(name.to_string())
}

/// Convenience constructor: negation.
pub fn neg(f: Formula) -> Formula {
    Formula::Neg(Box::new(f))
}

/// Convenience constructor: iterated negation `¬ⁿf`.
pub fn neg_n(n: usize, mut f: Formula) -> Formula {
    for _ in 0..n {
        f = neg(f);
    }
    f
}

/// Convenience constructor: conjunction.
pub fn and(l: Formula, r: Formula) -> Formula {
    Formula::And(Box::new(l), Box::new(r))
}

/// Convenience constructor: disjunction.
pub fn or(l: Formula, r: Formula) -> Formula {
    Formula::Or(Box::new(l), Box::new(r))
}

impl Formula {
    /// Number of nodes in the term tree (used by search budgets).
    pub fn size(&self) -> usize {
        match self {
            Formula::Var(_) | Formula::Bot | Formula::Top => 1,
            Formula::Neg(f) => 1 + f.size(),
            Formula::And(l, r) | Formula::Or(l, r) => 1 + l.size() + r.size(),
        }
    }

    /// The set of variable names occurring in the formula.
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Var(v) => {
                out.insert(v.clone());
            }
            Formula::Bot | Formula::Top => {}
            Formula::Neg(f) => f.collect_vars(out),
            Formula::And(l, r) | Formula::Or(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    /// All subformulas (including the formula itself), deduplicated.
    pub fn subformulas(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        self.collect_subformulas(&mut out);
        out
    }

    fn collect_subformulas(&self, out: &mut BTreeSet<Formula>) {
        out.insert(self.clone());
        match self {
            Formula::Var(_) | Formula::Bot | Formula::Top => {}
            Formula::Neg(f) => f.collect_subformulas(out),
            Formula::And(l, r) | Formula::Or(l, r) => {
                l.collect_subformulas(out);
                r.collect_subformulas(out);
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

/// Canonical printer: minimal parentheses under the fixed precedence
/// `~ > & > |` with left-associative `&` and `|`. `parse(print(f)) = f`.
pub fn print(f: &Formula) -> String {
    let mut out = String::new();
    print_prec(f, 0, &mut out);
    out
}

/// Print `f` in a context requiring precedence at least `min_prec`
/// (0 = or-level, 1 = and-level, 2 = neg/atom level).
fn print_prec(f: &Formula, min_prec: u8, out: &mut String) {
    match f {
        Formula::Var(v) => out.push_str(v),
        Formula::Bot => out.push('0'),
        Formula::Top => out.push('1'),
        Formula::Neg(inner) => {
            out.push('~');
            print_prec(inner, 2, out);
        }
        Formula::And(l, r) => {
            let parens = min_prec > 1;
            if parens {
                out.push('(');
            }
            print_prec(l, 1, out);
            out.push_str(" & ");
            print_prec(r, 2, out);
            if parens {
                out.push(')');
            }
        }
        Formula::Or(l, r) => {
            let parens = min_prec > 0;
            if parens {
                out.push('(');
            }
            print_prec(l, 0, out);
            out.push_str(" | ");
            print_prec(r, 1, out);
            if parens {
                out.push(')');
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

/// A syntax error with a byte position into the stripped input line.
#[derive(Debug, Clone, thiserror::Error)]
#[error("syntax error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

/// Parse user-facing formula text. Reserved `#`-prefixed variables are
/// rejected; use [`parse_internal`] for machine-generated text (derivation
/// scripts, serialized rule sets).
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    Parser::new(text, false)?.parse_formula_eof()
}

/// Parse formula text allowing reserved `#`-prefixed variables.
pub fn parse_internal(text: &str) -> Result<Formula, ParseError> {
    Parser::new(text, true)?.parse_formula_eof()
}

/// Strip a `--` end-of-line comment (shared by all the line-oriented file
/// formats in this crate).
pub fn strip_comment(line: &str) -> &str {
    match line.find("--") {
        Some(i) => &line[..i],
        None => line,
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Var(String),
    Zero,
    One,
    Tilde,
    Amp,
    Pipe,
    LParen,
    RParen,
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn new(text: &str, allow_reserved: bool) -> Result<Self, ParseError> {
        let toks = lex(text, allow_reserved)?;
        Ok(Parser {
            toks,
            pos: 0,
            end: text.len(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn parse_formula_eof(&mut self) -> Result<Formula, ParseError> {
        let f = self.disj()?;
        if self.peek().is_some() {
            return Err(ParseError {
                pos: self.here(),
                msg: "unexpected trailing input".into(),
            });
        }
        Ok(f)
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conj()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.bump();
            let rhs = self.conj()?;
            f = or(f, rhs);
        }
        Ok(f)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.negf()?;
        while self.peek() == Some(&Tok::Amp) {
            self.bump();
            let rhs = self.negf()?;
            f = and(f, rhs);
        }
        Ok(f)
    }

    fn negf(&mut self) -> Result<Formula, ParseError> {
        if self.peek() == Some(&Tok::Tilde) {
            self.bump();
            Ok(neg(self.negf()?))
        } else {
            self.atom()
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::Zero) => Ok(Formula::Bot),
            Some(Tok::One) => Ok(Formula::Top),
            Some(Tok::Var(v)) => Ok(Formula::Var(v)),
            Some(Tok::LParen) => {
                let f = self.disj()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(f),
                    _ => Err(ParseError {
                        pos: self.here(),
                        msg: "expected ')'".into(),
                    }),
                }
            }
            other => Err(ParseError {
                pos,
                msg: format!("expected formula atom, found {:?}", other),
            }),
        }
    }
}

fn lex(text: &str, allow_reserved: bool) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\r' | '\n' => i += 1,
            '-' if bytes.get(i + 1) == Some(&b'-') => break, // comment to end of input
            '~' => {
                toks.push((i, Tok::Tilde));
                i += 1;
            }
            '&' => {
                toks.push((i, Tok::Amp));
                i += 1;
            }
            '|' => {
                toks.push((i, Tok::Pipe));
                i += 1;
            }
            '(' => {
                toks.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                toks.push((i, Tok::RParen));
                i += 1;
            }
            '0' => {
                toks.push((i, Tok::Zero));
                i += 1;
            }
            '1' => {
                toks.push((i, Tok::One));
                i += 1;
            }
            'a'..='z' => {
                let start = i;
                i += 1;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((start, Tok::Var(text[start..i].to_string())));
            }
            '#' => {
                if !allow_reserved {
                    return Err(ParseError {
                        pos: i,
                        msg: "reserved '#'-prefixed variables are not allowed in user input"
                            .into(),
                    });
                }
                let start = i;
                i = lex_reserved(text, i)?;
                toks.push((start, Tok::Var(text[start..i].to_string())));
            }
            _ => {
                return Err(ParseError {
                    pos: i,
                    msg: format!("unexpected character {:?}", c),
                })
            }
        }
    }
    Ok(toks)
}

/// Lex a reserved variable starting at the `#` in position `i`; returns the
/// end position. Forms: `#q`, `#q<digits>`, `#t`, `#n[<formula text>]` with
/// balanced brackets.
fn lex_reserved(text: &str, i: usize) -> Result<usize, ParseError> {
    let bytes = text.as_bytes();
    match bytes.get(i + 1) {
        Some(b'q') => {
            let mut j = i + 2;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            Ok(j)
        }
        Some(b't') => Ok(i + 2),
        Some(b'n') if bytes.get(i + 2) == Some(&b'[') => {
            let mut depth = 1usize;
            let mut j = i + 3;
            while j < bytes.len() && depth > 0 {
                match bytes[j] {
                    b'[' => depth += 1,
                    b']' => depth -= 1,
                    _ => {}
                }
                j += 1;
            }
            if depth > 0 {
                return Err(ParseError {
                    pos: i,
                    msg: "unterminated '#n[' variable".into(),
                });
            }
            Ok(j)
        }
        _ => Err(ParseError {
            pos: i,
            msg: "malformed reserved variable (expected #q, #q<digits>, #t or #n[...])".into(),
        }),
    }
}

/// True iff `name` belongs to the reserved machine-generated namespace.
pub fn is_reserved_name(name: &str) -> bool {
    name.starts_with('#')
}

/// Parse an equation line `lhs = rhs` (user-facing variable namespace).
pub fn parse_equation(line: &str) -> Result<Equation, ParseError> {
    let line = strip_comment(line);
    let idx = line.find('=').ok_or(ParseError {
        pos: line.len(),
        msg: "expected '=' in equation".into(),
    })?;
    Ok(Equation {
        lhs: parse(&line[..idx])?,
        rhs: parse(&line[idx + 1..])?,
    })
}

// ---------------------------------------------------------------------------
// Substitution
// ---------------------------------------------------------------------------

/// Homomorphic replacement of variables by formulas.
pub fn substitute(f: &Formula, s: &Substitution) -> Formula {
    match f {
        Formula::Var(v) => match s.get(v) {
            Some(g) => g.clone(),
            None => f.clone(),
        },
        Formula::Bot | Formula::Top => f.clone(),
        Formula::Neg(inner) => neg(substitute(inner, s)),
        Formula::And(l, r) => and(substitute(l, s), substitute(r, s)),
        Formula::Or(l, r) => or(substitute(l, s), substitute(r, s)),
    }
}

/// Composition `s₂ ∘ s₁`: applying the result equals applying `s₁` then `s₂`.
pub fn compose(s1: &Substitution, s2: &Substitution) -> Substitution {
    let mut out: Substitution = s1
        .iter()
        .map(|(v, f)| (v.clone(), substitute(f, s2)))
        .collect();
    for (v, f) in s2 {
        out.entry(v.clone()).or_insert_with(|| f.clone());
    }
    out
}

// ---------------------------------------------------------------------------
// ¬-depth and balancedness
// ---------------------------------------------------------------------------

/// The ¬-depth of a formula: the maximum, over atomic occurrences (variables
/// and constants), of the number of ¬-labelled ancestors of the occurrence.
pub fn neg_depth(f: &Formula) -> usize {
    match f {
        Formula::Var(_) | Formula::Bot | Formula::Top => 0,
        Formula::Neg(inner) => 1 + neg_depth(inner),
        Formula::And(l, r) | Formula::Or(l, r) => neg_depth(l).max(neg_depth(r)),
    }
}

/// Record, for each variable, the set of ¬-depths at which it occurs.
pub fn var_depths(f: &Formula) -> BTreeMap<String, BTreeSet<usize>> {
    let mut out = BTreeMap::new();
    collect_var_depths(f, 0, &mut out);
    out
}

fn collect_var_depths(f: &Formula, d: usize, out: &mut BTreeMap<String, BTreeSet<usize>>) {
    match f {
        Formula::Var(v) => {
            out.entry(v.clone()).or_default().insert(d);
        }
        Formula::Bot | Formula::Top => {}
        Formula::Neg(inner) => collect_var_depths(inner, d + 1, out),
        Formula::And(l, r) | Formula::Or(l, r) => {
            collect_var_depths(l, d, out);
            collect_var_depths(r, d, out);
        }
    }
}

/// The set of depths at which ¬-headed subformula occurrences appear
/// (the depth of the occurrence itself, not counting its own ¬). This is the
/// definition-level oracle for the `f_k` fixed-point law: `f_k` fixes `f`
/// iff `k` is not in this set.
pub fn neg_occurrence_depths(f: &Formula) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    collect_neg_depths(f, 0, &mut out);
    out
}

fn collect_neg_depths(f: &Formula, d: usize, out: &mut BTreeSet<usize>) {
    match f {
        Formula::Var(_) | Formula::Bot | Formula::Top => {}
        Formula::Neg(inner) => {
            out.insert(d);
            collect_neg_depths(inner, d + 1, out);
        }
        Formula::And(l, r) | Formula::Or(l, r) => {
            collect_neg_depths(l, d, out);
            collect_neg_depths(r, d, out);
        }
    }
}

// ---------------------------------------------------------------------------
// f_k, g_n, star
// ---------------------------------------------------------------------------

/// The reserved fresh-variable name indexing a ¬-headed formula: `#n[` +
/// printed `¬ψ` + `]`. Deterministic and injective (the printer is
/// canonical), so `f_k` is stable across runs and rule sets.
pub fn indexed_var_name(negated: &Formula) -> String {
    format!("#n[{}]", print(negated))
}

/// The transformation `f_k`: replaces every ¬-headed subformula occurring at
/// ¬-depth exactly `k` by the fresh variable indexed by it; homomorphic on
/// the other connectives, with `f_k(¬φ) = ¬ f_{k−1}(φ)` for `k > 0`.
pub fn f_k(k: usize, f: &Formula) -> Formula {
    match f {
        Formula::Var(_) | Formula::Bot | Formula::Top => f.clone(),
        Formula::Neg(inner) => {
            if k == 0 {
                Formula::Var(indexed_var_name(f))
            } else {
                neg(f_k(k - 1, inner))
            }
        }
        Formula::And(l, r) => and(f_k(k, l), f_k(k, r)),
        Formula::Or(l, r) => or(f_k(k, l), f_k(k, r)),
    }
}

/// The reserved fresh variable `q_i` used by the layer constructions.
pub fn q_i(i: usize) -> Formula {
    Formula::Var(format!("#q{}", i))
}

/// The reserved outer fresh variable `q` of the `g`-layer rules.
pub fn q_outer() -> Formula {
    Formula::Var("#q".to_string())
}

/// The reserved fresh variable `t` of the `s`-layer rules.
pub fn t_fresh() -> Formula {
    Formula::Var("#t".to_string())
}

/// The pattern `g_n`: `g_0(γ) = γ ∧ q_0`, `g_{n+1}(γ) = ¬g_n(γ) ∧ q_{n+1}`,
/// with the fresh variables `q_i` drawn from the reserved namespace. Satisfies
/// `¬-depth(g_n(γ)) = n + ¬-depth(γ)`.
pub fn g_n(n: usize, f: &Formula) -> Formula {
    let mut acc = and(f.clone(), q_i(0));
    for i in 1..=n {
        acc = and(neg(acc), q_i(i));
    }
    acc
}

/// The star translation `φ*` of §2.1: `¬¬φ` for variables and ⊤ (extended to
/// ⊥ by analogy — the paper's definition omits that case), `¬(φ₁*)` for
/// `¬φ₁`, componentwise for ∧, and `¬¬(φ₁* ∨ φ₂*)` for ∨. The raw recursion
/// is applied with no SDM3 simplification.
pub fn star(f: &Formula) -> Formula {
    match f {
        Formula::Var(_) | Formula::Bot | Formula::Top => neg(neg(f.clone())),
        Formula::Neg(inner) => neg(star(inner)),
        Formula::And(l, r) => and(star(l), star(r)),
        Formula::Or(l, r) => neg(neg(or(star(l), star(r)))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        var("p")
    }
    fn q() -> Formula {
        var("q")
    }

    #[test]
    fn parse_examples() {
        // "~(p & q)" → Neg(And(p,q))
        assert_eq!(parse("~(p & q)").unwrap(), neg(and(p(), q())));
        // "p | q & r" → Or(p, And(q,r))
        assert_eq!(parse("p | q & r").unwrap(), or(p(), and(q(), var("r"))));
        // "~~0" → Neg(Neg(Bot))
        assert_eq!(parse("~~0").unwrap(), neg(neg(Formula::Bot)));
    }

    #[test]
    fn parse_associativity_and_comments() {
        assert_eq!(
            parse("p | q | r").unwrap(),
            or(or(p(), q()), var("r")),
            "| is left-associative"
        );
        assert_eq!(
            parse("p & q & r").unwrap(),
            and(and(p(), q()), var("r")),
            "& is left-associative"
        );
        assert_eq!(parse("p & q -- trailing comment").unwrap(), and(p(), q()));
    }

    #[test]
    fn parse_rejects_reserved_in_user_input() {
        assert!(parse("#q0").is_err());
        assert!(parse_internal("#q0 & p").is_ok());
        assert!(parse_internal("#n[~(p & p)]").is_ok());
        assert!(parse_internal("#n[~(p & p)").is_err(), "unbalanced bracket");
    }

    #[test]
    fn print_examples() {
        assert_eq!(print(&neg(and(p(), q()))), "~(p & q)");
        assert_eq!(print(&or(p(), and(q(), var("r")))), "p | q & r");
        assert_eq!(print(&Formula::Top), "1");
        // Right-nested connectives need parentheses.
        assert_eq!(print(&or(p(), or(q(), var("r")))), "p | (q | r)");
        assert_eq!(print(&and(p(), and(q(), var("r")))), "p & (q & r)");
    }

    #[test]
    fn print_parse_round_trip_spots() {
        for text in [
            "~(p & q) | r",
            "~~~p",
            "(p | q) & (q | r)",
            "~(~(p & #q0) & #q1) & #q2",
            "#n[~(p & p)] & 0",
        ] {
            let f = parse_internal(text).unwrap();
            assert_eq!(parse_internal(&print(&f)).unwrap(), f);
        }
    }

    #[test]
    fn substitute_examples() {
        let s: Substitution = [("p".to_string(), neg(var("r")))].into_iter().collect();
        assert_eq!(substitute(&and(p(), q()), &s), and(neg(var("r")), q()));
        assert_eq!(substitute(&Formula::Top, &s), Formula::Top);
        let s2: Substitution = [("p".to_string(), and(q(), var("r")))].into_iter().collect();
        assert_eq!(
            substitute(&or(p(), p()), &s2),
            or(and(q(), var("r")), and(q(), var("r")))
        );
    }

    #[test]
    fn neg_depth_examples() {
        assert_eq!(neg_depth(&and(p(), q())), 0);
        // ¬(p∧¬q): p at depth 1, q at depth 2
        assert_eq!(neg_depth(&neg(and(p(), neg(q())))), 2);
        assert_eq!(neg_depth(&neg_n(5, p())), 5);
    }

    #[test]
    fn f_k_examples() {
        // f_0(¬p ∧ q) → q_{¬p} ∧ q
        assert_eq!(
            f_k(0, &and(neg(p()), q())),
            and(var("#n[~p]"), q())
        );
        // f_1(¬¬p) → ¬ q_{¬p}
        assert_eq!(f_k(1, &neg(neg(p()))), neg(var("#n[~p]")));
        // f_n(¬ⁿ⁺¹(p∧p)) → ¬ⁿ(q_{¬(p∧p)})
        for n in 0..5 {
            assert_eq!(
                f_k(n, &neg_n(n + 1, and(p(), p()))),
                neg_n(n, var("#n[~(p & p)]"))
            );
        }
    }

    #[test]
    fn g_n_examples() {
        let phi = var("x");
        assert_eq!(g_n(0, &phi), and(phi.clone(), q_i(0)));
        // g_2(φ) = ¬(¬(φ∧q_0)∧q_1) ∧ q_2
        assert_eq!(
            g_n(2, &phi),
            and(
                neg(and(neg(and(phi.clone(), q_i(0))), q_i(1))),
                q_i(2)
            )
        );
        assert_eq!(
            g_n(1, &Formula::Top),
            and(neg(and(Formula::Top, q_i(0))), q_i(1))
        );
    }

    #[test]
    fn star_examples() {
        assert_eq!(star(&p()), neg(neg(p())));
        assert_eq!(star(&neg(q())), neg(neg(neg(q()))));
        // star((p₁∨¬p₂) ∧ ((p₃∧p₄)∨¬p₂))
        let f = and(
            or(var("p1"), neg(var("p2"))),
            or(and(var("p3"), var("p4")), neg(var("p2"))),
        );
        let expected = and(
            neg(neg(or(neg(neg(var("p1"))), neg(neg(neg(var("p2"))))))),
            neg(neg(or(
                and(neg(neg(var("p3"))), neg(neg(var("p4")))),
                neg(neg(neg(var("p2")))),
            ))),
        );
        assert_eq!(star(&f), expected);
    }

    #[test]
    fn equation_parsing() {
        let eq = parse_equation("~(x | y) = ~x & ~y").unwrap();
        assert_eq!(eq.lhs, neg(or(var("x"), var("y"))));
        assert_eq!(eq.rhs, and(neg(var("x")), neg(var("y"))));
    }
}
