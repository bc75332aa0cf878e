//! Command-line interface.
//!
//! Exit codes: 0 success, 1 negative verdict (underivable goal, unsound
//! rule, countermodel found, failed check), 2 usage error, 3 internal
//! error.

use std::io::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::algebra::{samples, AlgebraJson, FiniteAlgebra};
use crate::calculi::{self, preset, rules_from_equations, ruleset_from_text, ruleset_to_text, RuleSet};
use crate::engine::{
    self, builtin_ruleset, check_derivation, parse_consecution, parse_script, print_script,
    prove, ProveOutcome, SearchBudget,
};
use crate::search::{enumerate_algebras, find_countermodel, EnumerationSpec, SearchOutcome, Target};
use crate::semantics::{rule_sound, SemanticsMode};

#[derive(Parser)]
#[command(
    name = "hilbert-forge",
    version,
    about = "Compile equational presentations of distributive lattices with negation into Hilbert calculi, and verify them against finite-algebra semantics."
)]
struct Cli {
    /// Worker threads for semantic sweeps (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Maximum algebra size for enumeration-backed commands.
    #[arg(long, global = true, default_value_t = 4)]
    max: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compile an equational presentation into a Hilbert calculus.
    Compile {
        /// Preset presentation: DN, SDM, DM, PL, O, or Berman(m,n).
        #[arg(long, conflicts_with = "eqs")]
        preset: Option<String>,
        /// File of equations, one `name: lhs = rhs` per line.
        #[arg(long)]
        eqs: Option<PathBuf>,
        /// Target calculus: omega:<n>, sdm, ockham:<m>:<n>, or assertional.
        #[arg(long, default_value = "sdm")]
        target: String,
        /// Drop the plain equation rules from the sdm target.
        #[arg(long)]
        reduced: bool,
    },
    /// Search for a derivation of a goal consecution.
    Prove {
        /// Rule set id (sdm, sdm-reduced, sdm-g4, ockham:m:n, omega:class:n)
        /// or a rule set file.
        #[arg(long)]
        ruleset: String,
        /// Goal consecution, e.g. "p & q |- q & p".
        #[arg(long)]
        goal: String,
        #[arg(long, default_value_t = 40)]
        max_size: usize,
        #[arg(long, default_value_t = 20000)]
        max_steps: usize,
        #[arg(long, default_value_t = 12)]
        max_depth: usize,
    },
    /// Check a derivation script.
    Check {
        /// Script file (`-` for stdin).
        file: PathBuf,
    },
    /// Search for a finite countermodel to a goal or a named rule.
    Refute {
        #[arg(long)]
        ruleset: Option<String>,
        /// Name of a rule in the rule set to refute.
        #[arg(long, requires = "ruleset")]
        rule: Option<String>,
        /// Goal consecution to refute.
        #[arg(long, conflicts_with = "rule")]
        goal: Option<String>,
        /// Algebra class to search over.
        #[arg(long, default_value = "DN")]
        class: String,
        /// Use assertional semantics (designated value {1}).
        #[arg(long)]
        assertional: bool,
    },
    /// Check every rule of a rule set for soundness over a class.
    Sound {
        #[arg(long)]
        ruleset: String,
        #[arg(long, default_value = "DN")]
        class: String,
        #[arg(long)]
        assertional: bool,
    },
    /// Enumerate the algebras of a class up to --max.
    Enum {
        #[arg(long, default_value = "DN")]
        class: String,
        #[arg(long)]
        include_trivial: bool,
    },
    /// Leibniz congruences of an algebra, one per lattice filter.
    Leibniz {
        /// Sample name (boolean2, belnap, chain_pl:<n>) or algebra JSON file.
        #[arg(long)]
        algebra: String,
    },
    /// Replay the shipped corpus of derivation scripts.
    Corpus,
}

/// Run the CLI; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(jobs) = cli.jobs {
        // A later duplicate build (e.g. in tests) is harmless to ignore.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    match dispatch(&cli) {
        Ok((text, json, code)) => {
            let payload = match cli.format {
                Format::Text => text,
                Format::Json => format!("{:#}\n", json),
            };
            match &cli.out {
                None => {
                    print!("{payload}");
                    code
                }
                Some(path) => match std::fs::File::create(path)
                    .and_then(|mut f| f.write_all(payload.as_bytes()))
                {
                    Ok(()) => code,
                    Err(e) => {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        3
                    }
                },
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            3
        }
    }
}

type Output = (String, serde_json::Value, i32);

fn dispatch(cli: &Cli) -> anyhow::Result<Output> {
    match &cli.cmd {
        Cmd::Compile {
            preset: preset_name,
            eqs,
            target,
            reduced,
        } => {
            let presentation = match (preset_name, eqs) {
                (Some(name), None) => preset(name)?,
                (None, Some(path)) => {
                    let text = std::fs::read_to_string(path)?;
                    let mut equations = Vec::new();
                    for line in text.lines() {
                        let line = crate::syntax::strip_comment(line);
                        let line = line.trim();
                        if line.is_empty() {
                            continue;
                        }
                        let (name, eq) = line
                            .split_once(':')
                            .ok_or_else(|| anyhow::anyhow!("expected 'name: lhs = rhs' in {line:?}"))?;
                        equations.push((
                            name.trim().to_string(),
                            crate::syntax::parse_equation(eq)?,
                        ));
                    }
                    calculi::Presentation {
                        name: path.display().to_string(),
                        equations,
                    }
                }
                _ => anyhow::bail!("exactly one of --preset and --eqs is required"),
            };
            let rs = compile_target(&presentation, target, *reduced)?;
            let text = ruleset_to_text(&rs);
            let json = serde_json::to_value(calculi::RuleSetJson::from(&rs))?;
            Ok((text, json, 0))
        }
        Cmd::Prove {
            ruleset,
            goal,
            max_size,
            max_steps,
            max_depth,
        } => {
            let rs = resolve_ruleset(ruleset)?;
            let goal = parse_consecution(goal)?;
            let budget = SearchBudget {
                max_formula_size: *max_size,
                max_steps: *max_steps,
                max_depth: *max_depth,
            };
            match prove(&rs, &goal, &budget) {
                ProveOutcome::Proved(d) => {
                    let text = print_script(&d);
                    let json = json!({"proved": true, "steps": d.steps.len(), "script": text});
                    Ok((text, json, 0))
                }
                ProveOutcome::Exhausted(_) => Ok((
                    "exhausted: no derivation within budget\n".into(),
                    json!({"proved": false}),
                    1,
                )),
            }
        }
        Cmd::Check { file } => {
            let text = if file.as_os_str() == "-" {
                std::io::read_to_string(std::io::stdin())?
            } else {
                std::fs::read_to_string(file)?
            };
            let d = parse_script(&text)?;
            let rs = resolve_ruleset(&d.ruleset_id)?;
            let goal = d.goal.clone();
            match check_derivation(&rs, &d, &goal) {
                Ok(()) => Ok((
                    format!("ok: {} steps\n", d.steps.len()),
                    json!({"ok": true, "steps": d.steps.len()}),
                    0,
                )),
                Err(e) => Ok((
                    format!("invalid: {e}\n"),
                    json!({"ok": false, "error": e.to_string()}),
                    1,
                )),
            }
        }
        Cmd::Refute {
            ruleset,
            rule,
            goal,
            class,
            assertional,
        } => {
            let target = match (rule, goal) {
                (Some(name), None) => {
                    let rs = resolve_ruleset(ruleset.as_deref().unwrap_or("sdm"))?;
                    let r = rs
                        .get(name)
                        .ok_or_else(|| anyhow::anyhow!("no rule named {name:?}"))?
                        .clone();
                    Target::Rule(r)
                }
                (None, Some(text)) => {
                    Target::Consecution("goal".into(), parse_consecution(text)?)
                }
                _ => anyhow::bail!("exactly one of --rule and --goal is required"),
            };
            let spec = EnumerationSpec {
                class: class.clone(),
                max_size: cli.max,
                include_trivial: false,
            };
            let mode = if *assertional {
                SemanticsMode::Assertional
            } else {
                SemanticsMode::Filter
            };
            match find_countermodel(&target, &spec, &mode)? {
                SearchOutcome::Refuted(w) => {
                    let text = format!(
                        "refuted: algebra of size {}, designated {:?}, valuation {:?}\n",
                        w.algebra.size, w.designated, w.valuation
                    );
                    let json = serde_json::to_value(&w)?;
                    Ok((text, json, 0))
                }
                SearchOutcome::Exhausted(_) => Ok((
                    format!("exhausted: no countermodel in {class} up to size {}\n", cli.max),
                    json!({"refuted": false}),
                    1,
                )),
            }
        }
        Cmd::Sound {
            ruleset,
            class,
            assertional,
        } => {
            let rs = resolve_ruleset(ruleset)?;
            let spec = EnumerationSpec {
                class: class.clone(),
                max_size: cli.max,
                include_trivial: false,
            };
            let algebras = enumerate_algebras(&spec)?;
            let mode = if *assertional {
                SemanticsMode::Assertional
            } else {
                SemanticsMode::Filter
            };
            let mut lines = String::new();
            let mut entries = Vec::new();
            let mut all_sound = true;
            for r in &rs.rules {
                let verdict = rule_sound(r, &algebras, &mode)?;
                let ok = verdict.is_none();
                all_sound &= ok;
                lines.push_str(&format!(
                    "{}: {}\n",
                    r.name,
                    if ok { "sound" } else { "UNSOUND" }
                ));
                entries.push(json!({"rule": r.name, "sound": ok}));
            }
            Ok((
                lines,
                json!({"all_sound": all_sound, "rules": entries}),
                if all_sound { 0 } else { 1 },
            ))
        }
        Cmd::Enum {
            class,
            include_trivial,
        } => {
            let spec = EnumerationSpec {
                class: class.clone(),
                max_size: cli.max,
                include_trivial: *include_trivial,
            };
            let algebras = enumerate_algebras(&spec)?;
            let mut text = String::new();
            let mut entries = Vec::new();
            for (i, a) in algebras.iter().enumerate() {
                text.push_str(&format!("algebra {i}: size {}\n", a.size));
                entries.push(serde_json::to_value(AlgebraJson::from(a))?);
            }
            text.push_str(&format!("total: {}\n", algebras.len()));
            Ok((text, json!({"count": algebras.len(), "algebras": entries}), 0))
        }
        Cmd::Leibniz { algebra } => {
            let a = resolve_algebra(algebra)?;
            let mut text = String::new();
            let mut entries = Vec::new();
            let sdm = crate::algebra::is_in_class(&a, "SDM")?;
            for d in crate::algebra::filters(&a) {
                let m = crate::algebra::Matrix {
                    algebra: a.clone(),
                    designated: d.clone(),
                };
                let omega = crate::algebra::leibniz(&m)?;
                let agree = if sdm {
                    Some(crate::algebra::leibniz_sdm(&m)? == omega)
                } else {
                    None
                };
                text.push_str(&format!(
                    "filter {:?}: blocks {:?}{}\n",
                    d,
                    omega.blocks(),
                    match agree {
                        Some(true) => " (matches closed form)",
                        Some(false) => " (DIFFERS from closed form)",
                        None => "",
                    }
                ));
                entries.push(json!({"filter": d, "blocks": omega.blocks(), "matches_sdm_form": agree}));
            }
            Ok((text, json!({"filters": entries}), 0))
        }
        Cmd::Corpus => {
            let report = engine::corpus_replay();
            let mut text = String::new();
            let mut entries = Vec::new();
            let mut all_ok = true;
            for e in &report {
                let ok = e.result.is_ok();
                all_ok &= ok;
                text.push_str(&format!(
                    "{}: {} ({} steps, ruleset {})\n",
                    e.name,
                    if ok { "ok" } else { "FAILED" },
                    e.steps,
                    e.ruleset_id
                ));
                entries.push(json!({
                    "name": e.name,
                    "ok": ok,
                    "steps": e.steps,
                    "ruleset": e.ruleset_id,
                }));
            }
            Ok((
                text,
                json!({"all_ok": all_ok, "scripts": entries}),
                if all_ok { 0 } else { 1 },
            ))
        }
    }
}

/// Build the requested target calculus from a presentation.
fn compile_target(
    presentation: &calculi::Presentation,
    target: &str,
    reduced: bool,
) -> anyhow::Result<RuleSet> {
    let eqs = &presentation.equations;
    match target {
        "sdm" => Ok(if reduced {
            calculi::sdm_calculus_reduced(eqs)?
        } else {
            calculi::sdm_calculus(eqs)?
        }),
        "assertional" => {
            let mut rs = rules_from_equations(eqs);
            rs.extend_from(&calculi::builtin("R_top")?);
            rs.id = format!("assertional:{}", presentation.name);
            Ok(rs)
        }
        _ => {
            if let Some(n) = target.strip_prefix("omega:") {
                let n: usize = n.parse().map_err(|_| anyhow::anyhow!("bad target {target:?}"))?;
                let base = rules_from_equations(eqs);
                let mut rs = calculi::closure_upto(&base, n)?;
                rs.extend_from(&calculi::builtin("R_F")?);
                rs.id = format!("omega:{}:{n}", presentation.name);
                return Ok(rs);
            }
            if let Some(rest) = target.strip_prefix("ockham:") {
                let (m, n) = rest
                    .split_once(':')
                    .ok_or_else(|| anyhow::anyhow!("bad target {target:?}"))?;
                return Ok(calculi::ockham_calculus(m.parse()?, n.parse()?)?);
            }
            anyhow::bail!("unknown target {target:?}")
        }
    }
}

/// Resolve a rule set id, falling back to reading a rule set file.
fn resolve_ruleset(id: &str) -> anyhow::Result<RuleSet> {
    match builtin_ruleset(id) {
        Ok(rs) => Ok(rs),
        Err(engine::EngineError::UnknownRuleset(_)) => {
            let text = std::fs::read_to_string(id)
                .map_err(|e| anyhow::anyhow!("{id:?} is neither a built-in rule set id nor a readable file: {e}"))?;
            Ok(ruleset_from_text(id, &text)?)
        }
        Err(e) => Err(e.into()),
    }
}

/// Resolve a sample algebra name or an algebra JSON file.
fn resolve_algebra(spec: &str) -> anyhow::Result<FiniteAlgebra> {
    match spec {
        "boolean2" => Ok(samples::boolean2()),
        "belnap" => Ok(samples::belnap()),
        _ => {
            if let Some(n) = spec.strip_prefix("chain_pl:") {
                return Ok(samples::chain_pl(n.parse()?));
            }
            let text = std::fs::read_to_string(spec)?;
            let j: AlgebraJson = serde_json::from_str(&text)?;
            Ok(j.into_algebra()?)
        }
    }
}
