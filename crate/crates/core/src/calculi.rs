//! Generation of Hilbert-style rule sets from equational presentations:
//! presets for the varieties of interest, the bidirectional rules `R^Eq`,
//! the ∨/∧/¬ closure layers `R_n`, the `g`-pattern layers, the `s`-layers of
//! the Ockham construction, the fixed auxiliary sets (`R_C`, `R_F`, `R_•`,
//! `S_•`, `R_⊤`), and the reverse rules→equations translation.
//!
//! Rule sets are deduplicated up to canonical variable renaming; a
//! bidirectional rule is identified with the pair of its two directions and
//! counts as one rule.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::syntax::{
    self, and, neg, neg_n, or, parse, parse_internal, print, q_outer, strip_comment, substitute,
    t_fresh, var_depths, Equation, Formula, Substitution,
};

/// Where a rule came from; carried for diagnostics and for the reduced
/// calculus variant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    /// Supplied directly by the user.
    User,
    /// A member of `R^Eq` (one bidirectional rule per equation).
    REq,
    /// Produced by the ∨/∧/¬ closure at layer `n`.
    Layer(usize),
    /// Produced by the `g`-pattern construction at index `n`.
    GLayer(usize),
    /// Produced by the Ockham `s`-construction at index `i`.
    SLayer(usize),
    /// A member of a fixed auxiliary set (`R_C`, `R_F`, `R_•`, `S_•`, `R_⊤`).
    Builtin(String),
}

/// A Hilbert-style rule schema `Γ / φ`, optionally bidirectional (legal only
/// for single-premise rules). Schematic variables are closed under
/// substitution at use sites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub premises: Vec<Formula>,
    pub conclusion: Formula,
    pub bidirectional: bool,
    pub provenance: Provenance,
}

/// Errors raised by the generators.
#[derive(Debug, thiserror::Error)]
pub enum CalculiError {
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("invalid Berman indices m={m}, n={n} (need m >= 1)")]
    InvalidBerman { m: usize, n: usize },
    #[error("rule {0:?} is not formula-to-formula (single premise required)")]
    NotFormulaToFormula(String),
    #[error("unknown builtin rule set {0:?}")]
    UnknownBuiltin(String),
    #[error("bad rule line {line}: {msg}")]
    BadRuleLine { line: usize, msg: String },
}

impl Rule {
    /// Construct a rule, panicking on malformed literals (used only for the
    /// fixed built-in tables, whose text is part of this crate).
    fn fixed(name: &str, premises: &[&str], conclusion: &str, bidi: bool, set: &str) -> Rule {
        Rule {
            name: name.to_string(),
            premises: premises
                .iter()
                .map(|p| parse_internal(p).expect("builtin premise"))
                .collect(),
            conclusion: parse_internal(conclusion).expect("builtin conclusion"),
            bidirectional: bidi,
            provenance: Provenance::Builtin(set.to_string()),
        }
    }

    /// Expand into directions `(premises, conclusion)`; two for a
    /// bidirectional rule, one otherwise.
    pub fn directions(&self) -> Vec<(Vec<Formula>, Formula)> {
        let mut out = vec![(self.premises.clone(), self.conclusion.clone())];
        if self.bidirectional {
            out.push((vec![self.conclusion.clone()], self.premises[0].clone()));
        }
        out
    }

    /// Canonical keys of all directions of this rule.
    pub fn direction_keys(&self) -> Vec<String> {
        self.directions()
            .iter()
            .map(|(p, c)| direction_key(p, c))
            .collect()
    }

    /// All formulas of the rule (premises then conclusion).
    pub fn formulas(&self) -> Vec<&Formula> {
        let mut v: Vec<&Formula> = self.premises.iter().collect();
        v.push(&self.conclusion);
        v
    }

    /// Balancedness: every variable occurs at a single ¬-depth across all
    /// formulas of the rule.
    pub fn is_balanced(&self) -> bool {
        let mut depths: std::collections::BTreeMap<String, BTreeSet<usize>> = Default::default();
        for f in self.formulas() {
            for (v, ds) in var_depths(f) {
                depths.entry(v).or_default().extend(ds);
            }
        }
        depths.values().all(|ds| ds.len() <= 1)
    }

    /// Maximum ¬-depth over the rule's formulas.
    pub fn depth(&self) -> usize {
        self.formulas()
            .iter()
            .map(|f| syntax::neg_depth(f))
            .max()
            .unwrap_or(0)
    }
}

/// Canonical key of a rule direction: variables renamed to `v0, v1, …` in
/// first-occurrence order (premises in listed order, then conclusion), then
/// printed as `p1 , p2 |- c`. Two directions are identified by dedup iff
/// their keys coincide.
pub fn direction_key(premises: &[Formula], conclusion: &Formula) -> String {
    let mut map: Substitution = Substitution::new();
    let mut order: Vec<&Formula> = premises.iter().collect();
    order.push(conclusion);
    for f in &order {
        collect_renaming(f, &mut map);
    }
    let parts: Vec<String> = premises
        .iter()
        .map(|p| print(&substitute(p, &map)))
        .collect();
    format!(
        "{} |- {}",
        parts.join(" , "),
        print(&substitute(conclusion, &map))
    )
}

fn collect_renaming(f: &Formula, map: &mut Substitution) {
    match f {
        Formula::Var(v) => {
            if !map.contains_key(v) {
                let fresh = format!("v{}", map.len());
                map.insert(v.clone(), Formula::Var(fresh));
            }
        }
        Formula::Bot | Formula::Top => {}
        Formula::Neg(inner) => collect_renaming(inner, map),
        Formula::And(l, r) | Formula::Or(l, r) => {
            collect_renaming(l, map);
            collect_renaming(r, map);
        }
    }
}

/// An ordered, deduplicated collection of rules.
#[derive(Debug, Clone, Default)]
pub struct RuleSet {
    pub id: String,
    pub rules: Vec<Rule>,
    keys: BTreeSet<String>,
}

impl RuleSet {
    pub fn new(id: &str) -> RuleSet {
        RuleSet {
            id: id.to_string(),
            rules: Vec::new(),
            keys: BTreeSet::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Look a rule up by name.
    pub fn get(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name == name)
    }

    /// Whether a direction with this canonical key is already present.
    pub fn contains_key(&self, key: &str) -> bool {
        self.keys.contains(key)
    }

    /// Whether every direction of every rule of `other` is present here.
    pub fn covers(&self, other: &RuleSet) -> bool {
        other
            .rules
            .iter()
            .all(|r| r.direction_keys().iter().all(|k| self.contains_key(k)))
    }

    /// Insert `rule`, deduplicating up to canonical renaming and direction
    /// swap:
    ///
    /// - if every direction of `rule` is already covered, it is dropped;
    /// - if a single-premise direction's converse is present as a
    ///   unidirectional rule, that rule is upgraded to bidirectional
    ///   (keeping its name) instead of adding a duplicate;
    /// - otherwise the rule is appended and its direction keys registered.
    pub fn push(&mut self, rule: Rule) {
        let keys = rule.direction_keys();
        if keys.iter().all(|k| self.keys.contains(k)) {
            return;
        }
        if rule.premises.len() == 1 {
            let conv = direction_key(
                std::slice::from_ref(&rule.conclusion),
                &rule.premises[0],
            );
            if self.keys.contains(&conv) {
                for ex in &mut self.rules {
                    if !ex.bidirectional
                        && ex.premises.len() == 1
                        && direction_key(&ex.premises, &ex.conclusion) == conv
                    {
                        ex.bidirectional = true;
                        for k in keys {
                            self.keys.insert(k);
                        }
                        return;
                    }
                }
            }
        }
        for k in keys {
            self.keys.insert(k);
        }
        self.rules.push(rule);
    }

    /// Insert every rule of `other`, deduplicating against `self`.
    pub fn extend_from(&mut self, other: &RuleSet) {
        for r in &other.rules {
            self.push(r.clone());
        }
    }

    /// Balancedness of the whole set (every rule balanced).
    pub fn is_balanced(&self) -> bool {
        self.rules.iter().all(Rule::is_balanced)
    }

    /// Maximum ¬-depth over all rule formulas.
    pub fn depth(&self) -> usize {
        self.rules.iter().map(Rule::depth).max().unwrap_or(0)
    }
}

/// A named equational presentation.
#[derive(Debug, Clone)]
pub struct Presentation {
    pub name: String,
    pub equations: Vec<(String, Equation)>,
}

fn eq(name: &str, lhs: &str, rhs: &str) -> (String, Equation) {
    (
        name.to_string(),
        Equation {
            lhs: parse(lhs).expect("preset lhs"),
            rhs: parse(rhs).expect("preset rhs"),
        },
    )
}

/// The eleven bounded-distributive-lattice equations L1–L6 plus the two
/// negation equations N1, N2 shared by all varieties considered (13 total).
fn dn_equations() -> Vec<(String, Equation)> {
    vec![
        eq("L1a", "x | y", "y | x"),
        eq("L1b", "x & y", "y & x"),
        eq("L2a", "x | (y | z)", "(x | y) | z"),
        eq("L2b", "x & (y & z)", "(x & y) & z"),
        eq("L3a", "x | x", "x"),
        eq("L3b", "x & x", "x"),
        eq("L4a", "x | (x & y)", "x"),
        eq("L4b", "x & (x | y)", "x"),
        eq("L5a", "x & 0", "0"),
        eq("L5b", "x | 1", "1"),
        eq("L6", "x & (y | z)", "(x & y) | (x & z)"),
        eq("N1", "~0", "1"),
        eq("N2", "~(x | y)", "~x & ~y"),
    ]
}

/// Preset equational presentations of the varieties: `DN`, `SDM`, `DM`,
/// `PL`, `O`, `Berman(m,n)`, `B`. Berman accepts the forms `Berman(m,n)`
/// and `berman:m:n` (case-insensitive).
pub fn preset(name: &str) -> Result<Presentation, CalculiError> {
    let lname = name.trim().to_ascii_lowercase();
    if let Some((m, n)) = parse_berman_indices(&lname) {
        if m < 1 {
            return Err(CalculiError::InvalidBerman { m, n });
        }
        let mut eqs = preset("O")?.equations;
        eqs.push((
            "BER".to_string(),
            Equation {
                lhs: neg_n(2 * m + n, Formula::Var("x".into())),
                rhs: neg_n(n, Formula::Var("x".into())),
            },
        ));
        return Ok(Presentation {
            name: format!("Berman({},{})", m, n),
            equations: eqs,
        });
    }
    let mut eqs = dn_equations();
    match lname.as_str() {
        "dn" => {}
        "sdm" | "dm" | "pl" | "b" => {
            eqs.push(eq("SDM1", "~1", "0"));
            eqs.push(eq("SDM2", "~~(x & y)", "~~x & ~~y"));
            eqs.push(eq("SDM3", "~x", "~~~x"));
            match lname.as_str() {
                "dm" => eqs.push(eq("DM", "~~x", "x")),
                "pl" => eqs.push(eq("PL", "x & ~(x & y)", "x & ~y")),
                "b" => {
                    // Boolean algebras presented as De Morgan + pseudocomplemented
                    // laws plus the classical complement laws.
                    eqs.push(eq("DM", "~~x", "x"));
                    eqs.push(eq("PL", "x & ~(x & y)", "x & ~y"));
                    eqs.push(eq("BCOMP1", "x & ~x", "0"));
                    eqs.push(eq("BCOMP2", "x | ~x", "1"));
                }
                _ => {}
            }
        }
        "o" => {
            eqs.push(eq("SDM1", "~1", "0"));
            eqs.push(eq("O", "~(x & y)", "~x | ~y"));
        }
        _ => return Err(CalculiError::UnknownPreset(name.to_string())),
    }
    Ok(Presentation {
        name: name.trim().to_ascii_uppercase(),
        equations: eqs,
    })
}

fn parse_berman_indices(lname: &str) -> Option<(usize, usize)> {
    let rest = lname.strip_prefix("berman")?;
    let rest = rest
        .trim_start_matches([':', '(', ' '])
        .trim_end_matches([')', ' ']);
    let (m, n) = rest.split_once([',', ':'])?;
    Some((m.trim().parse().ok()?, n.trim().parse().ok()?))
}

/// The fixed order of schematic variable names used when renaming equation
/// variables into rule variables.
const SCHEMATIC: [&str; 7] = ["p", "q", "r", "s", "u", "v", "w"];

fn schematic_renaming(formulas: &[&Formula]) -> Substitution {
    let mut map = Substitution::new();
    for f in formulas {
        collect_schematic(f, &mut map);
    }
    map
}

fn collect_schematic(f: &Formula, map: &mut Substitution) {
    match f {
        Formula::Var(v) => {
            if !map.contains_key(v) {
                let i = map.len();
                let fresh = if i < SCHEMATIC.len() {
                    SCHEMATIC[i].to_string()
                } else {
                    format!("p{}", i)
                };
                map.insert(v.clone(), Formula::Var(fresh));
            }
        }
        Formula::Bot | Formula::Top => {}
        Formula::Neg(inner) => collect_schematic(inner, map),
        Formula::And(l, r) | Formula::Or(l, r) => {
            collect_schematic(l, map);
            collect_schematic(r, map);
        }
    }
}

/// One bidirectional rule per equation (`R^Eq`): premise = renamed lhs,
/// conclusion = renamed rhs, variables renamed in first-occurrence order
/// (lhs then rhs) to `p, q, r, …`; rule name = equation name; deduplicated.
pub fn rules_from_equations(eqs: &[(String, Equation)]) -> RuleSet {
    let mut rs = RuleSet::new("R_Eq");
    for (name, e) in eqs {
        let map = schematic_renaming(&[&e.lhs, &e.rhs]);
        rs.push(Rule {
            name: name.clone(),
            premises: vec![substitute(&e.lhs, &map)],
            conclusion: substitute(&e.rhs, &map),
            bidirectional: true,
            provenance: Provenance::REq,
        });
    }
    rs
}

/// The reverse translation: per rule `Γ/φ` the equation `⋀Γ ∧ φ ≈ ⋀Γ` with
/// `⋀` a left-fold in premise order; a bidirectional rule yields two
/// equations; an axiom `/φ` yields `φ ≈ ⊤`.
pub fn equations_from_rules(rs: &RuleSet) -> Vec<Equation> {
    let mut out = Vec::new();
    for r in &rs.rules {
        for (prems, concl) in r.directions() {
            if prems.is_empty() {
                out.push(Equation {
                    lhs: concl,
                    rhs: Formula::Top,
                });
            } else {
                let big = prems
                    .iter()
                    .skip(1)
                    .fold(prems[0].clone(), |acc, p| and(acc, p.clone()));
                out.push(Equation {
                    lhs: and(big.clone(), concl),
                    rhs: big,
                });
            }
        }
    }
    out
}

fn single_premise_directions(
    rs: &RuleSet,
) -> Result<Vec<(String, Formula, Formula)>, CalculiError> {
    let mut dirs = Vec::new();
    for r in &rs.rules {
        if r.premises.len() != 1 {
            return Err(CalculiError::NotFormulaToFormula(r.name.clone()));
        }
        for (prems, concl) in r.directions() {
            dirs.push((r.name.clone(), prems[0].clone(), concl));
        }
    }
    Ok(dirs)
}

/// The `n`-th closure layer `R_n`: `R_0 = rs`; `R_{k+1}` contains, for every
/// direction `φ/ψ` of `R_k`, the rules `(φ∨q_k)/(ψ∨q_k)`, `(φ∧q_k)/(ψ∧q_k)`
/// and `¬ψ/¬φ`, with `q_k` fresh from the reserved namespace. Converse
/// direction pairs are re-merged into bidirectional rules.
pub fn closure_layer(rs: &RuleSet, n: usize) -> Result<RuleSet, CalculiError> {
    let mut dirs = single_premise_directions(rs)?;
    for k in 0..n {
        let qk = Formula::Var(format!("#q{}", k));
        let mut next = Vec::new();
        for (name, phi, psi) in &dirs {
            next.push((
                format!("{}.or{}", name, k),
                or(phi.clone(), qk.clone()),
                or(psi.clone(), qk.clone()),
            ));
            next.push((
                format!("{}.and{}", name, k),
                and(phi.clone(), qk.clone()),
                and(psi.clone(), qk.clone()),
            ));
            next.push((format!("{}.neg{}", name, k), neg(psi.clone()), neg(phi.clone())));
        }
        dirs = next;
    }
    let mut out = RuleSet::new(&format!("{}@layer{}", rs.id, n));
    for (name, phi, psi) in dirs {
        out.push(Rule {
            name,
            premises: vec![phi],
            conclusion: psi,
            bidirectional: false,
            provenance: Provenance::Layer(n),
        });
    }
    Ok(out)
}

/// `R ∪ R_1 ∪ … ∪ R_n`, deduplicated.
pub fn closure_upto(rs: &RuleSet, n: usize) -> Result<RuleSet, CalculiError> {
    let mut out = RuleSet::new(&format!("{}@upto{}", rs.id, n));
    for k in 0..=n {
        out.extend_from(&closure_layer(rs, k)?);
    }
    Ok(out)
}

/// The fixed auxiliary rule sets, transliterated exactly: `R_C`, `R_F`,
/// `R_bullet` (`R_•`), `S_bullet` (`S_•`), `R_top` (`R_⊤`).
pub fn builtin(name: &str) -> Result<RuleSet, CalculiError> {
    let mut rs = RuleSet::new(name);
    let rules: Vec<Rule> = match name {
        "R_C" => vec![
            Rule::fixed("c_and", &["p & q"], "q & p", false, "R_C"),
            Rule::fixed("c_or", &["p | q"], "q | p", false, "R_C"),
        ],
        "R_F" => vec![
            Rule::fixed("ax_top", &[], "1", false, "R_F"),
            Rule::fixed("r_conj", &["p", "q"], "p & q", false, "R_F"),
            Rule::fixed("r_weak", &["p"], "p | q", false, "R_F"),
        ],
        "R_bullet" => vec![
            Rule::fixed("r_or_bot", &["p"], "p | 0", true, "R_bullet"),
            Rule::fixed("r_and_top", &["p | r"], "(p & 1) | r", true, "R_bullet"),
            Rule::fixed("r_neg_top", &["~(p & 1) | r"], "~p | r", true, "R_bullet"),
            Rule::fixed("r_dist", &["(p | q) & r"], "(p & r) | (q & r)", true, "R_bullet"),
            Rule::fixed(
                "r_ass",
                &["((p1 & p2) & p3) | q"],
                "(p1 & (p2 & p3)) | q",
                true,
                "R_bullet",
            ),
            Rule::fixed("r_dm_neg_or", &["~(p | q)"], "~p & ~q", true, "R_bullet"),
        ],
        "S_bullet" => vec![
            Rule::fixed("s_and", &["~~(p & q) | r"], "~~p | r", false, "S_bullet"),
            Rule::fixed("s_neg", &["~(~~p & q)"], "~(p & q)", true, "S_bullet"),
            Rule::fixed(
                "s_neg_and",
                &["~(~p1 & p2)", "~(~(p3 & p4) & p2)"],
                "~(~(p1 & p4) & p2)",
                false,
                "S_bullet",
            ),
        ],
        "R_top" => vec![
            Rule::fixed("r_wp", &["p & (~(p & q) | r)"], "~q | r", false, "R_top"),
            Rule::fixed(
                "r_q",
                &["p & (~(~q & r) | s)"],
                "~(~(p & q) & r) | s",
                false,
                "R_top",
            ),
        ],
        _ => return Err(CalculiError::UnknownBuiltin(name.to_string())),
    };
    for r in rules {
        rs.push(r);
    }
    Ok(rs)
}

/// The Ockham construction's extra conjunction rules `r¹_∧`, `r²_∧`, `r^in_∧`.
fn ockham_extra(name: &str) -> Rule {
    match name {
        "r_and1" => Rule::fixed("r_and1", &["p & q"], "p", false, "O_and"),
        "r_and2" => Rule::fixed("r_and2", &["p & q"], "q", false, "O_and"),
        "r_in_and" => Rule::fixed("r_in_and", &["p", "q"], "p & q", false, "O_and"),
        _ => unreachable!(),
    }
}

/// The `g`-pattern rule of index `n` for a formula-to-formula rule `φ/ψ`:
/// premise `g_n(φ)∨q`, conclusion `g_n(ψ)∨q` for even `n`, with the roles of
/// `φ` and `ψ` swapped for odd `n`; `q` fresh from the reserved namespace.
/// Named `{rule}.g{n}`.
pub fn g_rule(r: &Rule, n: usize) -> Result<Rule, CalculiError> {
    if r.premises.len() != 1 {
        return Err(CalculiError::NotFormulaToFormula(r.name.clone()));
    }
    let (phi, psi) = (&r.premises[0], &r.conclusion);
    let (prem, concl) = if n % 2 == 0 { (phi, psi) } else { (psi, phi) };
    Ok(Rule {
        name: format!("{}.g{}", r.name, n),
        premises: vec![or(syntax::g_n(n, prem), q_outer())],
        conclusion: or(syntax::g_n(n, concl), q_outer()),
        bidirectional: r.bidirectional,
        provenance: Provenance::GLayer(n),
    })
}

/// `R^g_{≤n} = rs ∪ ⋃_{k≤n} {g_rule(r,k) : r ∈ rs}`, deduplicated.
pub fn g_layers(rs: &RuleSet, n: usize) -> Result<RuleSet, CalculiError> {
    let mut out = RuleSet::new(&format!("{}@g{}", rs.id, n));
    out.extend_from(rs);
    for k in 0..=n {
        for r in &rs.rules {
            out.push(g_rule(r, k)?);
        }
    }
    Ok(out)
}

/// Whether `eqs` syntactically contains every SDM preset equation, compared
/// up to canonical variable renaming (in either orientation).
pub fn contains_sdm(eqs: &[(String, Equation)]) -> bool {
    let have: BTreeSet<String> = eqs
        .iter()
        .flat_map(|(_, e)| [equation_key(&e.lhs, &e.rhs), equation_key(&e.rhs, &e.lhs)])
        .collect();
    preset("SDM")
        .expect("SDM preset")
        .equations
        .iter()
        .all(|(_, e)| have.contains(&equation_key(&e.lhs, &e.rhs)))
}

fn equation_key(lhs: &Formula, rhs: &Formula) -> String {
    let mut map = Substitution::new();
    collect_renaming(lhs, &mut map);
    collect_renaming(rhs, &mut map);
    format!("{} = {}", print(&substitute(lhs, &map)), print(&substitute(rhs, &map)))
}

/// The complete semi-De Morgan calculus for a presentation `Eq ⊇ SDM`:
/// `R^g_{≤2}(R^Eq) ∪ S_• ∪ R_• ∪ R_F`, deduplicated across the whole union
/// in that order (so the `N2` rule of `R^Eq` survives and the identical
/// `r_dm_neg_or` of `R_•` is netted out: 75 rules for `Eq = SDM`).
pub fn sdm_calculus(eqs: &[(String, Equation)]) -> Result<RuleSet, CalculiError> {
    let base = rules_from_equations(eqs);
    let mut out = RuleSet::new("sdm");
    out.extend_from(&g_layers(&base, 2)?);
    out.extend_from(&builtin("S_bullet")?);
    out.extend_from(&builtin("R_bullet")?);
    out.extend_from(&builtin("R_F")?);
    Ok(out)
}

/// The reduced variant of [`sdm_calculus`]: the layer-0 copies of `R^Eq` are
/// dropped from the union (59 rules for `Eq = SDM`, matching the accounting
/// `(3×16)+11`).
pub fn sdm_calculus_reduced(eqs: &[(String, Equation)]) -> Result<RuleSet, CalculiError> {
    let full = sdm_calculus(eqs)?;
    let mut out = RuleSet::new("sdm-reduced");
    for r in &full.rules {
        if r.provenance != Provenance::REq {
            out.push(r.clone());
        }
    }
    Ok(out)
}

/// The `s`-layer rule of index `i` for a formula-to-formula rule `φ/ψ`:
/// `¬^{2k}φ∨t / ¬^{2k}ψ∨t` for `i = 2k`, `¬^{2k+1}ψ∨t / ¬^{2k+1}φ∨t` for
/// `i = 2k+1`; `t` fresh from the reserved namespace. Named `{rule}.s{i}`.
pub fn s_rule(r: &Rule, i: usize) -> Result<Rule, CalculiError> {
    if r.premises.len() != 1 {
        return Err(CalculiError::NotFormulaToFormula(r.name.clone()));
    }
    let (phi, psi) = (&r.premises[0], &r.conclusion);
    let (a, b) = if i % 2 == 0 { (phi, psi) } else { (psi, phi) };
    Ok(Rule {
        name: format!("{}.s{}", r.name, i),
        premises: vec![or(neg_n(i, a.clone()), t_fresh())],
        conclusion: or(neg_n(i, b.clone()), t_fresh()),
        bidirectional: r.bidirectional,
        provenance: Provenance::SLayer(i),
    })
}

/// The complete Ockham calculus `O^m_n ∪ {/⊤}` for the Berman variety
/// `K^m_n`: the base `R^{mn}_∧ = R^{Eq^m_n} ∪ {r¹_∧, r²_∧}`, its `s`-layers
/// for `i ≤ 2m+n`, the two-premise `r^in_∧`, and the axiom `/⊤`;
/// deduplicated.
pub fn ockham_calculus(m: usize, n: usize) -> Result<RuleSet, CalculiError> {
    if m < 1 {
        return Err(CalculiError::InvalidBerman { m, n });
    }
    let pres = preset(&format!("berman:{}:{}", m, n))?;
    let mut base = rules_from_equations(&pres.equations);
    base.push(ockham_extra("r_and1"));
    base.push(ockham_extra("r_and2"));
    let mut out = RuleSet::new(&format!("ockham:{}:{}", m, n));
    out.extend_from(&base);
    for i in 0..=(2 * m + n) {
        for r in &base.rules {
            out.push(s_rule(r, i)?);
        }
    }
    out.push(ockham_extra("r_in_and"));
    out.push(Rule::fixed("ax_top", &[], "1", false, "R_F"));
    Ok(out)
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

/// Text form of a rule set: one rule per line, `name: f1 , f2 |- g` or
/// `name: f -||- g` for bidirectional rules.
pub fn ruleset_to_text(rs: &RuleSet) -> String {
    let mut out = String::new();
    for r in &rs.rules {
        if r.bidirectional {
            out.push_str(&format!(
                "{}: {} -||- {}\n",
                r.name,
                print(&r.premises[0]),
                print(&r.conclusion)
            ));
        } else {
            let prems: Vec<String> = r.premises.iter().map(print).collect();
            out.push_str(&format!(
                "{}: {} |- {}\n",
                r.name,
                prems.join(" , "),
                print(&r.conclusion)
            ));
        }
    }
    out
}

/// Parse the text form produced by [`ruleset_to_text`]. Provenance is
/// recorded as `User`.
pub fn ruleset_from_text(id: &str, text: &str) -> Result<RuleSet, CalculiError> {
    let mut rs = RuleSet::new(id);
    for (i, raw) in text.lines().enumerate() {
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: &str| CalculiError::BadRuleLine {
            line: i + 1,
            msg: msg.to_string(),
        };
        let (name, body) = line.split_once(':').ok_or_else(|| bad("missing ':'"))?;
        let parse_f = |s: &str| {
            parse_internal(s).map_err(|e| CalculiError::BadRuleLine {
                line: i + 1,
                msg: e.to_string(),
            })
        };
        if let Some((l, r)) = body.split_once("-||-") {
            rs.push(Rule {
                name: name.trim().to_string(),
                premises: vec![parse_f(l)?],
                conclusion: parse_f(r)?,
                bidirectional: true,
                provenance: Provenance::User,
            });
        } else {
            let (l, r) = body.split_once("|-").ok_or_else(|| bad("missing '|-'"))?;
            let mut premises = Vec::new();
            let l = l.trim();
            if !l.is_empty() {
                for part in l.split(',') {
                    premises.push(parse_f(part)?);
                }
            }
            rs.push(Rule {
                name: name.trim().to_string(),
                premises,
                conclusion: parse_f(r)?,
                bidirectional: false,
                provenance: Provenance::User,
            });
        }
    }
    Ok(rs)
}

/// JSON interchange form of a rule (formulas as canonical text).
#[derive(Debug, Serialize, Deserialize)]
pub struct RuleJson {
    pub name: String,
    pub premises: Vec<String>,
    pub conclusion: String,
    pub bidirectional: bool,
    pub provenance: Provenance,
}

/// JSON interchange form of a rule set.
#[derive(Debug, Serialize, Deserialize)]
pub struct RuleSetJson {
    pub id: String,
    pub rules: Vec<RuleJson>,
}

impl From<&RuleSet> for RuleSetJson {
    fn from(rs: &RuleSet) -> RuleSetJson {
        RuleSetJson {
            id: rs.id.clone(),
            rules: rs
                .rules
                .iter()
                .map(|r| RuleJson {
                    name: r.name.clone(),
                    premises: r.premises.iter().map(print).collect(),
                    conclusion: print(&r.conclusion),
                    bidirectional: r.bidirectional,
                    provenance: r.provenance.clone(),
                })
                .collect(),
        }
    }
}

impl RuleSetJson {
    pub fn into_ruleset(self) -> Result<RuleSet, CalculiError> {
        let mut rs = RuleSet::new(&self.id);
        for (i, r) in self.rules.into_iter().enumerate() {
            let parse_f = |s: &str| {
                parse_internal(s).map_err(|e| CalculiError::BadRuleLine {
                    line: i + 1,
                    msg: e.to_string(),
                })
            };
            let premises = r
                .premises
                .iter()
                .map(|p| parse_f(p))
                .collect::<Result<Vec<_>, _>>()?;
            rs.push(Rule {
                name: r.name,
                premises,
                conclusion: parse_f(&r.conclusion)?,
                bidirectional: r.bidirectional,
                provenance: r.provenance,
            });
        }
        Ok(rs)
    }
}
