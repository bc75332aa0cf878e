//! Finite-algebra semantics: matrix consequence, the order-preserving
//! (inequality) consequence, ⊤-assertional consequence, and rule-soundness
//! checking over collections of finite algebras.
//!
//! Soundness over a variety is approximated by exhaustive checking over all
//! enumerated members up to a size bound: a failure is conclusive, a pass is
//! evidence "sound up to size N". All searches return the first witness in
//! canonical order (algebra, then rule direction, then valuation odometer,
//! then filter in ascending bitmask order), independent of parallelism.

use serde::Serialize;

use crate::algebra::{
    compile, filter_masks, holds, is_in_class, next_assignment, AlgebraError, FiniteAlgebra,
    Matrix, Valuation,
};
use crate::calculi::Rule;
use crate::syntax::{and, Equation, Formula};

/// A consecution `Γ ⊢ φ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Consecution {
    pub premises: Vec<Formula>,
    pub conclusion: Formula,
}

/// How designated sets are chosen when checking soundness over an algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SemanticsMode {
    /// Every non-empty lattice filter is a designated set.
    Filter,
    /// Designated set `{⊤}`.
    Assertional,
    /// A fixed designated set, applied to each algebra.
    FixedMatrix(Vec<usize>),
}

/// A soundness counterexample: which algebra (by index into the checked
/// list), which designated set, which valuation, and which direction of the
/// rule failed.
#[derive(Debug, Clone, Serialize)]
pub struct SoundnessWitness {
    pub algebra_index: usize,
    pub designated: Vec<usize>,
    pub valuation: Valuation,
    /// False when the backward direction of a bidirectional rule failed.
    pub forward: bool,
}

impl Consecution {
    /// All variables of the consecution, sorted.
    pub fn vars(&self) -> Vec<String> {
        let mut s = self.conclusion.vars();
        for p in &self.premises {
            s.extend(p.vars());
        }
        s.into_iter().collect()
    }

    /// The inequality rendering `⋀Γ ∧ φ ≈ ⋀Γ` (i.e. `⋀Γ ≤ φ`), with `⋀` a
    /// left-fold in premise order; empty premises yield `φ ≈ ⊤`.
    pub fn as_equation(&self) -> Equation {
        if self.premises.is_empty() {
            Equation {
                lhs: self.conclusion.clone(),
                rhs: Formula::Top,
            }
        } else {
            let big = self
                .premises
                .iter()
                .skip(1)
                .fold(self.premises[0].clone(), |acc, p| and(acc, p.clone()));
            Equation {
                lhs: and(big.clone(), self.conclusion.clone()),
                rhs: big,
            }
        }
    }
}

/// Matrix consequence: `h(φ) ∈ D` whenever `h(Γ) ⊆ D`, exhaustively over all
/// valuations on the consecution's variables. `None` means the consecution
/// holds; otherwise the first falsifying valuation is returned.
pub fn matrix_entails(m: &Matrix, c: &Consecution) -> Result<Option<Valuation>, AlgebraError> {
    let alg = &m.algebra;
    let dmask: u64 = m.designated.iter().fold(0, |acc, &d| acc | 1 << d);
    let vars = c.vars();
    let prems: Vec<_> = c
        .premises
        .iter()
        .map(|p| compile(p, &vars))
        .collect::<Result<_, _>>()?;
    let concl = compile(&c.conclusion, &vars)?;
    let mut assignment = vec![0usize; vars.len()];
    let mut stack = Vec::new();
    loop {
        let all_in = prems
            .iter()
            .all(|p| dmask >> p.eval(alg, &assignment, &mut stack) & 1 == 1);
        if all_in && dmask >> concl.eval(alg, &assignment, &mut stack) & 1 == 0 {
            return Ok(Some(
                vars.iter().cloned().zip(assignment.iter().copied()).collect(),
            ));
        }
        if !next_assignment(&mut assignment, alg.size) {
            return Ok(None);
        }
    }
}

/// Order-preserving consequence over a list of DN algebras: validity of
/// `⋀Γ ≤ φ` (empty premises: `φ ≈ ⊤`) in every algebra. Witness = algebra
/// index + falsifying valuation.
pub fn order_entails(
    algebras: &[FiniteAlgebra],
    c: &Consecution,
) -> Result<Option<(usize, Valuation)>, AlgebraError> {
    for alg in algebras {
        if !is_in_class(alg, "DN")? {
            return Err(AlgebraError::NotInClass("DN".into()));
        }
    }
    let eq = c.as_equation();
    for (i, alg) in algebras.iter().enumerate() {
        if let Some(v) = holds(alg, &eq)? {
            return Ok(Some((i, v)));
        }
    }
    Ok(None)
}

/// ⊤-assertional consequence: matrix consequence with `D = {⊤}` for each
/// algebra.
pub fn assertional_entails(
    algebras: &[FiniteAlgebra],
    c: &Consecution,
) -> Result<Option<(usize, Valuation)>, AlgebraError> {
    for (i, alg) in algebras.iter().enumerate() {
        let m = Matrix {
            algebra: alg.clone(),
            designated: vec![alg.top],
        };
        if let Some(v) = matrix_entails(&m, c)? {
            return Ok(Some((i, v)));
        }
    }
    Ok(None)
}

fn mode_masks(alg: &FiniteAlgebra, mode: &SemanticsMode) -> Vec<u64> {
    match mode {
        SemanticsMode::Filter => filter_masks(alg),
        SemanticsMode::Assertional => vec![1u64 << alg.top],
        SemanticsMode::FixedMatrix(d) => {
            vec![d.iter().fold(0u64, |acc, &x| acc | 1 << x)]
        }
    }
}

fn mask_elements(mask: u64, size: usize) -> Vec<usize> {
    (0..size).filter(|a| mask >> a & 1 == 1).collect()
}

/// Check a rule (both directions if bidirectional) against every algebra in
/// the list under the given designation mode. For each algebra the premise
/// and conclusion values are computed once per valuation and then tested
/// against every designated set, so the filter sweep is cheap.
pub fn rule_sound(
    r: &Rule,
    algebras: &[FiniteAlgebra],
    mode: &SemanticsMode,
) -> Result<Option<SoundnessWitness>, AlgebraError> {
    for (ai, alg) in algebras.iter().enumerate() {
        let masks = mode_masks(alg, mode);
        for (di, (prems, concl)) in r.directions().into_iter().enumerate() {
            let mut vars = concl.vars();
            for p in &prems {
                vars.extend(p.vars());
            }
            let vars: Vec<String> = vars.into_iter().collect();
            let cprems: Vec<_> = prems
                .iter()
                .map(|p| compile(p, &vars))
                .collect::<Result<_, _>>()?;
            let cconcl = compile(&concl, &vars)?;
            let mut assignment = vec![0usize; vars.len()];
            let mut stack = Vec::new();
            let mut pvals = vec![0usize; cprems.len()];
            loop {
                for (slot, p) in pvals.iter_mut().zip(cprems.iter()) {
                    *slot = p.eval(alg, &assignment, &mut stack);
                }
                let cval = cconcl.eval(alg, &assignment, &mut stack);
                for &mask in &masks {
                    if pvals.iter().all(|&v| mask >> v & 1 == 1) && mask >> cval & 1 == 0 {
                        return Ok(Some(SoundnessWitness {
                            algebra_index: ai,
                            designated: mask_elements(mask, alg.size),
                            valuation: vars
                                .iter()
                                .cloned()
                                .zip(assignment.iter().copied())
                                .collect(),
                            forward: di == 0,
                        }));
                    }
                }
                if !next_assignment(&mut assignment, alg.size) {
                    break;
                }
            }
        }
    }
    Ok(None)
}

/// The conjunction over algebras and all lattice filters of matrix
/// consequence — the reference semantics that [`order_entails`] must agree
/// with on DN algebras.
pub fn all_filters_entails(
    algebras: &[FiniteAlgebra],
    c: &Consecution,
) -> Result<Option<(usize, Vec<usize>, Valuation)>, AlgebraError> {
    for (i, alg) in algebras.iter().enumerate() {
        for mask in filter_masks(alg) {
            let m = Matrix {
                algebra: alg.clone(),
                designated: mask_elements(mask, alg.size),
            };
            if let Some(v) = matrix_entails(&m, c)? {
                return Ok(Some((i, m.designated, v)));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::samples::{belnap, boolean2, chain_pl};
    use crate::calculi::{builtin, preset, rules_from_equations};
    use crate::syntax::{parse, star, substitute, Substitution};

    fn cons(premises: &[&str], conclusion: &str) -> Consecution {
        Consecution {
            premises: premises.iter().map(|p| parse(p).unwrap()).collect(),
            conclusion: parse(conclusion).unwrap(),
        }
    }

    #[test]
    fn matrix_entails_examples() {
        let m = Matrix {
            algebra: boolean2(),
            designated: vec![1],
        };
        assert!(matrix_entails(&m, &cons(&["p", "q"], "p & q"))
            .unwrap()
            .is_none());
        assert!(matrix_entails(&m, &cons(&["p | q"], "p | q")).unwrap().is_none());
        // Belnap, F = {a,⊤}: p∧¬p ⊬ ¬q.  First witness in odometer order
        // is p↦a, q↦b: a∧¬a = a is designated, ¬b = b is not.
        let mb = Matrix {
            algebra: belnap(),
            designated: vec![1, 3],
        };
        let w = matrix_entails(&mb, &cons(&["p & ~p"], "~q"))
            .unwrap()
            .expect("refuted");
        assert_eq!((w["p"], w["q"]), (1, 2));
    }

    #[test]
    fn order_entails_examples() {
        let algs = [boolean2()];
        assert!(order_entails(&algs, &cons(&["p"], "p | q")).unwrap().is_none());
        assert!(order_entails(&algs, &cons(&[], "1")).unwrap().is_none());
        let algs = [belnap()];
        assert!(order_entails(&algs, &cons(&["p & ~p"], "~q"))
            .unwrap()
            .is_some());
        // Non-DN algebra rejected.
        let mut bad = boolean2();
        bad.neg = vec![0, 0];
        assert!(order_entails(&[bad], &cons(&["p"], "p")).is_err());
    }

    #[test]
    fn assertional_examples() {
        // Over ⟨Belnap, {⊤}⟩ the wxc consecution is fine: p∧¬p never hits ⊤.
        let algs = [boolean2(), belnap(), chain_pl(3)];
        assert!(assertional_entails(&algs, &cons(&["p & ~p"], "~q"))
            .unwrap()
            .is_none());
        assert!(assertional_entails(&algs, &cons(&["p"], "~~p"))
            .unwrap()
            .is_none());
        // Assertional is pointwise at least as strong as order-preserving.
        for c in [
            cons(&["p"], "p | q"),
            cons(&["p & q"], "p"),
            cons(&["p & ~p"], "~q"),
            cons(&[], "1"),
        ] {
            if order_entails(&algs, &c).unwrap().is_none() {
                assert!(assertional_entails(&algs, &c).unwrap().is_none());
            }
        }
    }

    #[test]
    fn rule_sound_examples() {
        let algs = [boolean2(), belnap(), chain_pl(3)];
        // r^¬_∧ is sound in filter semantics over SDM algebras.
        let sb = builtin("S_bullet").unwrap();
        let r = sb.get("s_neg_and").unwrap();
        assert!(rule_sound(r, &algs, &SemanticsMode::Filter).unwrap().is_none());
        // r_wxc = p∧¬p / ¬q is filter-unsound over DM algebras.  The sweep
        // (valuations outer, filters in ascending mask order inner) first
        // hits p↦b, q↦a with filter {b,⊤}: b∧¬b = b designated, ¬a = a not.
        let rs = crate::calculi::ruleset_from_text("t", "r_wxc: p & ~p |- ~q").unwrap();
        let w = rule_sound(&rs.rules[0], &[belnap()], &SemanticsMode::Filter)
            .unwrap()
            .expect("unsound");
        assert_eq!(w.designated, vec![2, 3]);
        // ...but assertionally sound there.
        assert!(
            rule_sound(&rs.rules[0], &algs, &SemanticsMode::Assertional)
                .unwrap()
                .is_none()
        );
    }

    #[test]
    fn star_translated_rule_sound() {
        let algs = [boolean2(), chain_pl(3), belnap()];
        // The star translation of a filter-sound consecution stays
        // filter-sound: (p∧q)* / (q∧p)* is ¬¬p∧¬¬q / ¬¬q∧¬¬p.
        let phi = star(&parse("p & q").unwrap());
        let psi = star(&parse("q & p").unwrap());
        let rs = crate::calculi::ruleset_from_text(
            "t",
            &format!("starred: {} |- {}", crate::syntax::print(&phi), crate::syntax::print(&psi)),
        )
        .unwrap();
        assert!(
            rule_sound(&rs.rules[0], &algs, &SemanticsMode::Filter)
                .unwrap()
                .is_none()
        );
        // The star translation of the filter-unsound p∧¬p/¬q is
        // assertionally sound over these algebras: ¬¬p∧¬¬¬p never hits ⊤.
        let phi = star(&parse("p & ~p").unwrap());
        let psi = star(&parse("~q").unwrap());
        let rs = crate::calculi::ruleset_from_text(
            "t",
            &format!("starred: {} |- {}", crate::syntax::print(&phi), crate::syntax::print(&psi)),
        )
        .unwrap();
        assert!(
            rule_sound(&rs.rules[0], &algs, &SemanticsMode::Assertional)
                .unwrap()
                .is_none()
        );
    }

    #[test]
    fn filter_inequality_agreement_spots() {
        let algs = [boolean2(), belnap(), chain_pl(3)];
        for c in [
            cons(&["p"], "p | q"),
            cons(&["p & ~p"], "~q"),
            cons(&["~p"], "~(p & p)"),
            cons(&["p", "q"], "p & q"),
            cons(&[], "~0"),
            cons(&["~~p"], "p"),
        ] {
            assert_eq!(
                order_entails(&algs, &c).unwrap().is_none(),
                all_filters_entails(&algs, &c).unwrap().is_none(),
                "agreement on {:?}",
                c
            );
        }
    }

    #[test]
    fn structurality_spot() {
        // Matrix consequence is invariant under uniform substitution in the
        // "if valid, every substitution instance is valid" direction.
        let m = Matrix {
            algebra: belnap(),
            designated: vec![3],
        };
        let c = cons(&["p", "q"], "p & q");
        assert!(matrix_entails(&m, &c).unwrap().is_none());
        let s: Substitution = [
            ("p".to_string(), parse("~(x | y)").unwrap()),
            ("q".to_string(), parse("x & 1").unwrap()),
        ]
        .into_iter()
        .collect();
        let inst = Consecution {
            premises: c.premises.iter().map(|p| substitute(p, &s)).collect(),
            conclusion: substitute(&c.conclusion, &s),
        };
        assert!(matrix_entails(&m, &inst).unwrap().is_none());
    }

    #[test]
    fn sdm_rules_sound_on_samples() {
        // Every rule of the SDM calculus is filter-sound on the sample SDM
        // algebras (the full enumerated check lives in the acceptance suite).
        let rs = crate::calculi::sdm_calculus(&preset("SDM").unwrap().equations).unwrap();
        let algs = [boolean2(), chain_pl(3), belnap()];
        for r in &rs.rules {
            assert!(
                rule_sound(r, &algs, &SemanticsMode::Filter).unwrap().is_none(),
                "rule {} unsound",
                r.name
            );
        }
    }

    #[test]
    fn dn_base_rules_sound() {
        let rs = rules_from_equations(&preset("DN").unwrap().equations);
        let algs = [boolean2(), belnap(), chain_pl(4)];
        for r in &rs.rules {
            assert!(
                rule_sound(r, &algs, &SemanticsMode::Filter).unwrap().is_none(),
                "rule {} unsound",
                r.name
            );
        }
    }
}
