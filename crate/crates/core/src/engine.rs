//! Hilbert derivation checking and bounded proof search, plus the shipped
//! corpus of verified derivation scripts.
//!
//! Script format (line-oriented, `--` comments):
//!
//! ```text
//! ruleset: sdm
//! goal: f1 , f2 |- g
//! 1. <formula> ; premise
//! 2. <formula> ; by <rule> [fwd|bwd] {x := <formula>, ...} [from k1, k2]
//! ```
//!
//! Scripts store substitutions explicitly; the checker never searches, so
//! verification is linear in the script size.

use std::collections::BTreeSet;

use crate::calculi::{
    self, g_rule, preset, rules_from_equations, CalculiError, RuleSet,
};
use crate::semantics::Consecution;
use crate::syntax::{parse_internal, print, strip_comment, substitute, Formula, Substitution};

/// One derivation step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub formula: Formula,
    pub just: Justification,
}

/// How a step is justified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    /// The formula is one of the goal's premises.
    Premise,
    /// An instance of a named rule.
    Instance {
        rule: String,
        /// False for the backward direction of a bidirectional rule.
        forward: bool,
        subst: Substitution,
        /// Zero-based indices of the cited prior steps.
        cited: Vec<usize>,
    },
}

/// A derivation of a goal consecution over a named rule set.
#[derive(Debug, Clone)]
pub struct Derivation {
    pub ruleset_id: String,
    pub goal: Consecution,
    pub steps: Vec<Step>,
}

/// Search limits for [`prove`].
#[derive(Debug, Clone, Copy)]
pub struct SearchBudget {
    pub max_formula_size: usize,
    pub max_steps: usize,
    pub max_depth: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_formula_size: 40,
            max_steps: 20_000,
            max_depth: 12,
        }
    }
}

/// Errors raised by script handling and checking.
#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error("script line {line}: {msg}")]
    Script { line: usize, msg: String },
    #[error("step {step}: {reason}")]
    Check { step: usize, reason: String },
    #[error("unknown rule set id {0:?}")]
    UnknownRuleset(String),
    #[error(transparent)]
    Calculi(#[from] CalculiError),
}

// ---------------------------------------------------------------------------
// Checking
// ---------------------------------------------------------------------------

/// Check a derivation against a rule set and goal. `Ok(())` iff every step
/// validates and the final step is the goal's conclusion, with premise
/// steps drawn from the goal's premises. Errors pinpoint the first failing
/// step (1-based).
pub fn check_derivation(
    rs: &RuleSet,
    d: &Derivation,
    goal: &Consecution,
) -> Result<(), EngineError> {
    let fail = |i: usize, reason: String| EngineError::Check {
        step: i + 1,
        reason,
    };
    for (i, step) in d.steps.iter().enumerate() {
        match &step.just {
            Justification::Premise => {
                if !goal.premises.contains(&step.formula) {
                    return Err(fail(i, format!("{} is not a goal premise", print(&step.formula))));
                }
            }
            Justification::Instance {
                rule,
                forward,
                subst,
                cited,
            } => {
                let r = rs
                    .get(rule)
                    .ok_or_else(|| fail(i, format!("unknown rule {rule:?}")))?;
                if !forward && !r.bidirectional {
                    return Err(fail(i, format!("rule {rule:?} is not bidirectional")));
                }
                let (rprems, rconcl): (Vec<&Formula>, &Formula) = if *forward {
                    (r.premises.iter().collect(), &r.conclusion)
                } else {
                    (vec![&r.conclusion], &r.premises[0])
                };
                let mut needed: Vec<Formula> =
                    rprems.iter().map(|p| substitute(p, subst)).collect();
                let mut given = Vec::with_capacity(cited.len());
                for &k in cited {
                    if k >= i {
                        return Err(fail(i, format!("cites step {} which does not precede it", k + 1)));
                    }
                    given.push(d.steps[k].formula.clone());
                }
                needed.sort();
                given.sort();
                if needed != given {
                    return Err(fail(
                        i,
                        format!(
                            "cited formulas do not match the substituted premises of {rule:?}"
                        ),
                    ));
                }
                let concl = substitute(rconcl, subst);
                if concl != step.formula {
                    return Err(fail(
                        i,
                        format!(
                            "substituted conclusion {} differs from step formula {}",
                            print(&concl),
                            print(&step.formula)
                        ),
                    ));
                }
            }
        }
    }
    match d.steps.last() {
        Some(last) if last.formula == goal.conclusion => Ok(()),
        Some(last) => Err(fail(
            d.steps.len() - 1,
            format!(
                "final formula {} is not the goal conclusion {}",
                print(&last.formula),
                print(&goal.conclusion)
            ),
        )),
        None => Err(EngineError::Check {
            step: 0,
            reason: "empty derivation".into(),
        }),
    }
}

// ---------------------------------------------------------------------------
// Script parsing and printing
// ---------------------------------------------------------------------------

/// Parse a consecution `f1 , f2 |- g` (reserved variables allowed).
pub fn parse_consecution(text: &str) -> Result<Consecution, EngineError> {
    let text = strip_comment(text);
    let (l, r) = text.split_once("|-").ok_or_else(|| EngineError::Script {
        line: 0,
        msg: "missing '|-' in consecution".into(),
    })?;
    let err = |e: crate::syntax::ParseError| EngineError::Script {
        line: 0,
        msg: e.to_string(),
    };
    let mut premises = Vec::new();
    if !l.trim().is_empty() {
        for part in l.split(',') {
            premises.push(parse_internal(part).map_err(err)?);
        }
    }
    Ok(Consecution {
        premises,
        conclusion: parse_internal(r).map_err(err)?,
    })
}

/// Parse a derivation script.
pub fn parse_script(text: &str) -> Result<Derivation, EngineError> {
    let mut ruleset_id: Option<String> = None;
    let mut goal: Option<Consecution> = None;
    let mut steps: Vec<Step> = Vec::new();
    for (li, raw) in text.lines().enumerate() {
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| EngineError::Script {
            line: li + 1,
            msg,
        };
        if let Some(rest) = line.strip_prefix("ruleset:") {
            ruleset_id = Some(rest.trim().to_string());
            continue;
        }
        if let Some(rest) = line.strip_prefix("goal:") {
            goal = Some(parse_consecution(rest).map_err(|e| err(e.to_string()))?);
            continue;
        }
        // Step line: `k. formula ; justification`.
        let (num, rest) = line
            .split_once('.')
            .ok_or_else(|| err("expected 'k. formula ; justification'".into()))?;
        let k: usize = num
            .trim()
            .parse()
            .map_err(|_| err(format!("bad step number {num:?}")))?;
        if k != steps.len() + 1 {
            return Err(err(format!("step number {k} out of sequence")));
        }
        let (ftext, jtext) = rest
            .split_once(';')
            .ok_or_else(|| err("missing ';' before justification".into()))?;
        let formula = parse_internal(ftext).map_err(|e| err(e.to_string()))?;
        let jtext = jtext.trim();
        let just = if jtext == "premise" {
            Justification::Premise
        } else if let Some(body) = jtext.strip_prefix("by ") {
            parse_instance(body).map_err(err)?
        } else {
            return Err(err(format!("bad justification {jtext:?}")));
        };
        steps.push(Step { formula, just });
    }
    Ok(Derivation {
        ruleset_id: ruleset_id.ok_or(EngineError::Script {
            line: 0,
            msg: "missing 'ruleset:' header".into(),
        })?,
        goal: goal.ok_or(EngineError::Script {
            line: 0,
            msg: "missing 'goal:' header".into(),
        })?,
        steps,
    })
}

fn parse_instance(body: &str) -> Result<Justification, String> {
    let body = body.trim();
    // Split off `from k1,k2` first (it is always last).
    let (head, cited) = match body.rsplit_once("from") {
        Some((h, tail)) if !tail.contains('}') => {
            let mut cited = Vec::new();
            for part in tail.split(',') {
                let k: usize = part
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad citation {part:?}"))?;
                if k == 0 {
                    return Err("citations are 1-based".into());
                }
                cited.push(k - 1);
            }
            (h.trim(), cited)
        }
        _ => (body, Vec::new()),
    };
    // Optional substitution block `{ ... }`.
    let (head, subst) = match head.split_once('{') {
        Some((h, rest)) => {
            let inner = rest
                .strip_suffix('}')
                .or_else(|| rest.trim_end().strip_suffix('}'))
                .ok_or("unterminated substitution block")?;
            let mut subst = Substitution::new();
            for entry in inner.split(',').filter(|e| !e.trim().is_empty()) {
                let (v, f) = entry
                    .split_once(":=")
                    .ok_or_else(|| format!("bad substitution entry {entry:?}"))?;
                subst.insert(
                    v.trim().to_string(),
                    parse_internal(f).map_err(|e| e.to_string())?,
                );
            }
            (h.trim(), subst)
        }
        None => (head.trim(), Substitution::new()),
    };
    // Remaining: rule name plus optional direction token.
    let mut toks = head.split_whitespace();
    let rule = toks
        .next()
        .ok_or("missing rule name in justification")?
        .to_string();
    let forward = match toks.next() {
        None => true,
        Some("fwd") => true,
        Some("bwd") => false,
        Some(other) => return Err(format!("bad direction token {other:?}")),
    };
    if toks.next().is_some() {
        return Err("trailing tokens in justification".into());
    }
    Ok(Justification::Instance {
        rule,
        forward,
        subst,
        cited,
    })
}

/// Render a derivation in the script format.
pub fn print_script(d: &Derivation) -> String {
    let mut out = String::new();
    out.push_str(&format!("ruleset: {}\n", d.ruleset_id));
    let prems: Vec<String> = d.goal.premises.iter().map(print).collect();
    out.push_str(&format!(
        "goal: {} |- {}\n",
        prems.join(" , "),
        print(&d.goal.conclusion)
    ));
    for (i, step) in d.steps.iter().enumerate() {
        match &step.just {
            Justification::Premise => {
                out.push_str(&format!("{}. {} ; premise\n", i + 1, print(&step.formula)));
            }
            Justification::Instance {
                rule,
                forward,
                subst,
                cited,
            } => {
                let dir = if *forward { "fwd" } else { "bwd" };
                let entries: Vec<String> = subst
                    .iter()
                    .map(|(v, f)| format!("{} := {}", v, print(f)))
                    .collect();
                let from = if cited.is_empty() {
                    String::new()
                } else {
                    format!(
                        " from {}",
                        cited.iter().map(|k| (k + 1).to_string()).collect::<Vec<_>>().join(", ")
                    )
                };
                out.push_str(&format!(
                    "{}. {} ; by {} {} {{{}}}{}\n",
                    i + 1,
                    print(&step.formula),
                    rule,
                    dir,
                    entries.join(", "),
                    from
                ));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Built-in rule set ids
// ---------------------------------------------------------------------------

/// Resolve a built-in rule set id: `sdm`, `sdm-reduced`, `sdm-g4` (the SDM
/// calculus extended with the g-layers 3 and 4), `ockham:m:n`, or
/// `omega:<class>:<n>` (closure layers of `R^Eq` up to `n`, plus `R_F`).
pub fn builtin_ruleset(id: &str) -> Result<RuleSet, EngineError> {
    let sdm_eqs = || preset("SDM").map(|p| p.equations);
    match id {
        "sdm" => Ok(calculi::sdm_calculus(&sdm_eqs()?)?),
        "sdm-reduced" => Ok(calculi::sdm_calculus_reduced(&sdm_eqs()?)?),
        "sdm-g4" => {
            let mut rs = calculi::sdm_calculus(&sdm_eqs()?)?;
            let base = rules_from_equations(&sdm_eqs()?);
            for n in 3..=4 {
                for r in &base.rules {
                    rs.push(g_rule(r, n)?);
                }
            }
            rs.id = "sdm-g4".into();
            Ok(rs)
        }
        _ => {
            if let Some(rest) = id.strip_prefix("ockham:") {
                let (m, n) = rest
                    .split_once(':')
                    .ok_or_else(|| EngineError::UnknownRuleset(id.to_string()))?;
                let (m, n) = (
                    m.parse()
                        .map_err(|_| EngineError::UnknownRuleset(id.to_string()))?,
                    n.parse()
                        .map_err(|_| EngineError::UnknownRuleset(id.to_string()))?,
                );
                return Ok(calculi::ockham_calculus(m, n)?);
            }
            if let Some(rest) = id.strip_prefix("omega:") {
                let (class, n) = rest
                    .split_once(':')
                    .ok_or_else(|| EngineError::UnknownRuleset(id.to_string()))?;
                let n: usize = n
                    .parse()
                    .map_err(|_| EngineError::UnknownRuleset(id.to_string()))?;
                let base = rules_from_equations(&preset(class)?.equations);
                let mut rs = calculi::closure_upto(&base, n)?;
                rs.extend_from(&calculi::builtin("R_F")?);
                rs.id = id.to_string();
                return Ok(rs);
            }
            Err(EngineError::UnknownRuleset(id.to_string()))
        }
    }
}

// ---------------------------------------------------------------------------
// Proof search
// ---------------------------------------------------------------------------

/// Outcome of bounded proof search.
#[derive(Debug)]
pub enum ProveOutcome {
    Proved(Derivation),
    Exhausted(SearchBudget),
}

/// One-way matching: extend `subst` so that `substitute(pat, subst) ==
/// target`; `target` is treated as ground.
fn match_into(pat: &Formula, target: &Formula, subst: &mut Substitution) -> bool {
    match (pat, target) {
        (Formula::Var(v), t) => match subst.get(v) {
            Some(bound) => bound == t,
            None => {
                subst.insert(v.clone(), t.clone());
                true
            }
        },
        (Formula::Bot, Formula::Bot) | (Formula::Top, Formula::Top) => true,
        (Formula::Neg(p), Formula::Neg(t)) => match_into(p, t, subst),
        (Formula::And(pl, pr), Formula::And(tl, tr))
        | (Formula::Or(pl, pr), Formula::Or(tl, tr)) => {
            match_into(pl, tl, subst) && match_into(pr, tr, subst)
        }
        _ => false,
    }
}

/// Bounded forward chaining: generation-wise saturation, matching rule
/// premises against the derived set with binding propagation; free
/// conclusion variables (at most two) are instantiated from a pool of goal
/// subformulas plus ⊤ and ⊥. Any returned derivation passes
/// [`check_derivation`]; exhaustion is a value, not an error. Deterministic.
pub fn prove(rs: &RuleSet, goal: &Consecution, budget: &SearchBudget) -> ProveOutcome {
    // Pool of instantiation candidates, in canonical order.
    let pool: Vec<Formula> = {
        let mut set: BTreeSet<Formula> = goal.conclusion.subformulas();
        for p in &goal.premises {
            set.extend(p.subformulas());
        }
        set.insert(Formula::Top);
        set.insert(Formula::Bot);
        set.into_iter()
            .filter(|f| f.size() <= budget.max_formula_size)
            .collect()
    };
    let mut known: Vec<(Formula, Justification)> = Vec::new();
    let mut index: std::collections::HashMap<Formula, usize> = Default::default();
    let add = |known: &mut Vec<(Formula, Justification)>,
                   index: &mut std::collections::HashMap<Formula, usize>,
                   f: Formula,
                   just: Justification|
     -> Option<usize> {
        if index.contains_key(&f) {
            return None;
        }
        known.push((f.clone(), just));
        index.insert(f, known.len() - 1);
        Some(known.len() - 1)
    };
    for p in &goal.premises {
        add(&mut known, &mut index, p.clone(), Justification::Premise);
    }
    let mut frontier_start = 0usize;
    for _depth in 0..budget.max_depth {
        if index.contains_key(&goal.conclusion) {
            break;
        }
        let frontier_end = known.len();
        let mut new_items: Vec<(Formula, Justification)> = Vec::new();
        for rule in &rs.rules {
            for (di, (rprems, rconcl)) in rule.directions().into_iter().enumerate() {
                // Match premises left to right; at least one cited formula
                // must come from the current frontier (so generations do not
                // redo old work), except for axioms.
                let mut states: Vec<(Substitution, Vec<usize>, bool)> =
                    vec![(Substitution::new(), Vec::new(), rprems.is_empty() && frontier_start == 0)];
                for pat in &rprems {
                    let mut next_states = Vec::new();
                    for (subst, cited, touched) in &states {
                        for (ki, (kf, _)) in known.iter().enumerate().take(frontier_end) {
                            let mut s2 = subst.clone();
                            if match_into(pat, kf, &mut s2) {
                                let mut c2 = cited.clone();
                                c2.push(ki);
                                next_states.push((
                                    s2,
                                    c2,
                                    *touched || ki >= frontier_start,
                                ));
                            }
                        }
                        if next_states.len() > 4000 {
                            break;
                        }
                    }
                    states = next_states;
                    if states.is_empty() {
                        break;
                    }
                }
                for (subst, cited, touched) in states {
                    if !touched {
                        continue;
                    }
                    // Instantiate leftover conclusion variables from the pool.
                    let free: Vec<String> = rconcl
                        .vars()
                        .into_iter()
                        .filter(|v| !subst.contains_key(v))
                        .collect();
                    if free.len() > 2 {
                        continue;
                    }
                    let mut choice = vec![0usize; free.len()];
                    loop {
                        let mut s2 = subst.clone();
                        for (v, &c) in free.iter().zip(choice.iter()) {
                            s2.insert(v.clone(), pool[c].clone());
                        }
                        let concl = substitute(&rconcl, &s2);
                        if concl.size() <= budget.max_formula_size {
                            new_items.push((
                                concl,
                                Justification::Instance {
                                    rule: rule.name.clone(),
                                    forward: di == 0,
                                    subst: s2,
                                    cited: cited.clone(),
                                },
                            ));
                        }
                        if free.is_empty() || !crate::algebra::next_assignment(&mut choice, pool.len())
                        {
                            break;
                        }
                    }
                }
            }
        }
        let before = known.len();
        // Admit small formulas first so the step cap cannot starve them.
        new_items.sort_by_key(|(f, _)| f.size());
        for (f, just) in new_items {
            if known.len() >= budget.max_steps {
                break;
            }
            add(&mut known, &mut index, f, just);
        }
        frontier_start = frontier_end;
        if known.len() == before {
            break; // saturated below the budget
        }
    }
    let Some(&goal_ix) = index.get(&goal.conclusion) else {
        return ProveOutcome::Exhausted(*budget);
    };
    // Extract the needed sub-derivation, in index order.
    let mut needed = BTreeSet::new();
    let mut stack = vec![goal_ix];
    while let Some(i) = stack.pop() {
        if needed.insert(i) {
            if let Justification::Instance { cited, .. } = &known[i].1 {
                stack.extend(cited.iter().copied());
            }
        }
    }
    let order: Vec<usize> = needed.into_iter().collect();
    let renumber: std::collections::HashMap<usize, usize> =
        order.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let steps: Vec<Step> = order
        .iter()
        .map(|&old| {
            let (f, just) = &known[old];
            let just = match just {
                Justification::Premise => Justification::Premise,
                Justification::Instance {
                    rule,
                    forward,
                    subst,
                    cited,
                } => Justification::Instance {
                    rule: rule.clone(),
                    forward: *forward,
                    subst: subst.clone(),
                    cited: cited.iter().map(|c| renumber[c]).collect(),
                },
            };
            Step {
                formula: f.clone(),
                just,
            }
        })
        .collect();
    let d = Derivation {
        ruleset_id: rs.id.clone(),
        goal: goal.clone(),
        steps,
    };
    debug_assert!(check_derivation(rs, &d, goal).is_ok());
    ProveOutcome::Proved(d)
}

/// Apply a substitution to every formula of a derivation, composing it into
/// each step's stored substitution. Validity is preserved: rules are closed
/// under substitution, so the instance is again a correct derivation of the
/// substituted goal.
pub fn substitute_derivation(d: &Derivation, sigma: &Substitution) -> Derivation {
    Derivation {
        ruleset_id: d.ruleset_id.clone(),
        goal: Consecution {
            premises: d.goal.premises.iter().map(|p| substitute(p, sigma)).collect(),
            conclusion: substitute(&d.goal.conclusion, sigma),
        },
        steps: d
            .steps
            .iter()
            .map(|s| Step {
                formula: substitute(&s.formula, sigma),
                just: match &s.just {
                    Justification::Premise => Justification::Premise,
                    Justification::Instance {
                        rule,
                        forward,
                        subst,
                        cited,
                    } => Justification::Instance {
                        rule: rule.clone(),
                        forward: *forward,
                        subst: crate::syntax::compose(subst, sigma),
                        cited: cited.clone(),
                    },
                },
            })
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// Corpus
// ---------------------------------------------------------------------------

/// The shipped derivation scripts, embedded in the binary.
pub const CORPUS: &[(&str, &str)] = &[
    ("cong_base_or", include_str!("../corpus/cong_base_or.drv")),
    ("cong_base_and", include_str!("../corpus/cong_base_and.drv")),
    ("cong_base_neg", include_str!("../corpus/cong_base_neg.drv")),
    ("cong_layer_or", include_str!("../corpus/cong_layer_or.drv")),
    ("cong_layer_and", include_str!("../corpus/cong_layer_and.drv")),
    ("cong_layer_neg", include_str!("../corpus/cong_layer_neg.drv")),
    ("gpattern_step_n0", include_str!("../corpus/gpattern_step_n0.drv")),
    ("gpattern_lift_n0", include_str!("../corpus/gpattern_lift_n0.drv")),
    ("gpattern_step_n1", include_str!("../corpus/gpattern_step_n1.drv")),
    ("gpattern_lift_n1", include_str!("../corpus/gpattern_lift_n1.drv")),
    ("ockham_or_10", include_str!("../corpus/ockham_or_10.drv")),
    ("ockham_or_11", include_str!("../corpus/ockham_or_11.drv")),
    ("ockham_and_10", include_str!("../corpus/ockham_and_10.drv")),
    ("ockham_and_11", include_str!("../corpus/ockham_and_11.drv")),
    ("ockham_neg_a_10", include_str!("../corpus/ockham_neg_a_10.drv")),
    ("ockham_neg_b_10", include_str!("../corpus/ockham_neg_b_10.drv")),
    ("ockham_neg_a_11", include_str!("../corpus/ockham_neg_a_11.drv")),
    ("ockham_neg_b_11", include_str!("../corpus/ockham_neg_b_11.drv")),
];

/// Result of replaying one corpus script.
#[derive(Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub ruleset_id: String,
    pub steps: usize,
    pub result: Result<(), EngineError>,
}

/// Parse and check every shipped script. Rule sets are resolved once per id.
pub fn corpus_replay() -> Vec<CorpusEntry> {
    let mut cache: std::collections::HashMap<String, RuleSet> = Default::default();
    let mut out = Vec::new();
    for (name, text) in CORPUS {
        let entry = match parse_script(text) {
            Err(e) => CorpusEntry {
                name: name.to_string(),
                ruleset_id: String::new(),
                steps: 0,
                result: Err(e),
            },
            Ok(d) => {
                let rs = match cache.get(&d.ruleset_id) {
                    Some(rs) => Ok(rs),
                    None => match builtin_ruleset(&d.ruleset_id) {
                        Ok(rs) => {
                            cache.insert(d.ruleset_id.clone(), rs);
                            Ok(cache.get(&d.ruleset_id).expect("inserted"))
                        }
                        Err(e) => Err(e),
                    },
                };
                match rs {
                    Err(e) => CorpusEntry {
                        name: name.to_string(),
                        ruleset_id: d.ruleset_id.clone(),
                        steps: d.steps.len(),
                        result: Err(e),
                    },
                    Ok(rs) => {
                        let goal = d.goal.clone();
                        CorpusEntry {
                            name: name.to_string(),
                            ruleset_id: d.ruleset_id.clone(),
                            steps: d.steps.len(),
                            result: check_derivation(rs, &d, &goal),
                        }
                    }
                }
            }
        };
        out.push(entry);
    }
    out
}
