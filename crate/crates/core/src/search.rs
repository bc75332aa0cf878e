//! Enumeration of the finite members of each variety up to isomorphism, and
//! countermodel search for rules and consecutions.
//!
//! The enumerator is lattice-first: naturally-labeled posets are generated
//! (each new element is maximal, its strict down-set chosen among the
//! previous elements), filtered to bounded distributive lattices, and
//! deduplicated by canonical labeling (minimal serialized table over all
//! carrier permutations). Negation tables are then scanned exhaustively
//! against the ¬-involving axioms of the requested class — the lattice
//! axioms hold by construction. Output order is size-ascending, then
//! canonical-table lexicographic, so witnesses are byte-reproducible.

use std::collections::BTreeSet;
use std::path::PathBuf;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    holds, AlgebraError, AlgebraJson, FiniteAlgebra, Matrix, Valuation,
};
use crate::calculi::{preset, CalculiError, Rule};
use crate::semantics::{matrix_entails, rule_sound, Consecution, SemanticsMode};
use crate::syntax::Formula;

/// Hard cap on enumeration size (full permutation canonicalization stays
/// tractable: 7! = 5040).
pub const SIZE_CAP: usize = 7;

/// What to enumerate.
#[derive(Debug, Clone)]
pub struct EnumerationSpec {
    pub class: String,
    pub max_size: usize,
    pub include_trivial: bool,
}

/// A self-verifying countermodel: replaying [`matrix_entails`] on it
/// reproduces the failure.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub algebra: AlgebraJson,
    pub designated: Vec<usize>,
    pub valuation: Valuation,
    pub target: String,
}

/// Countermodel search outcome.
#[derive(Debug)]
pub enum SearchOutcome {
    Refuted(Witness),
    /// No countermodel up to the bound.
    Exhausted(usize),
}

/// Errors raised by enumeration and search.
#[derive(Debug, thiserror::Error)]
pub enum SearchError {
    #[error("size {0} exceeds the enumeration cap {SIZE_CAP}")]
    CapExceeded(usize),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Calculi(#[from] CalculiError),
    #[error("cache I/O: {0}")]
    Cache(#[from] std::io::Error),
}

// ---------------------------------------------------------------------------
// Lattice enumeration
// ---------------------------------------------------------------------------

/// Serialize the permuted tables of an algebra; the canonical key is the
/// minimum of this over all carrier permutations.
fn permuted_tables(alg: &FiniteAlgebra, perm: &[usize]) -> Vec<usize> {
    let n = alg.size;
    let mut out = Vec::with_capacity(2 * n * n + n + 2);
    // inverse: position i of the new labeling holds old element inv[i]
    let mut inv = vec![0usize; n];
    for (old, &new) in perm.iter().enumerate() {
        inv[new] = old;
    }
    for &a in &inv {
        for &b in &inv {
            out.push(perm[alg.meet(a, b)]);
        }
    }
    for &a in &inv {
        for &b in &inv {
            out.push(perm[alg.join(a, b)]);
        }
    }
    for &a in &inv {
        out.push(perm[alg.neg(a)]);
    }
    out.push(perm[alg.bot]);
    out.push(perm[alg.top]);
    out
}

/// Canonical key: minimal serialized table over all carrier permutations.
pub fn canonical_key(alg: &FiniteAlgebra) -> Vec<usize> {
    (0..alg.size)
        .permutations(alg.size)
        .map(|perm| permuted_tables(alg, &perm))
        .min()
        .expect("non-empty carrier")
}

/// Relabel an algebra into its canonical form.
pub fn canonicalize(alg: &FiniteAlgebra) -> FiniteAlgebra {
    let key = canonical_key(alg);
    let n = alg.size;
    let meet = key[..n * n].to_vec();
    let join = key[n * n..2 * n * n].to_vec();
    let neg = key[2 * n * n..2 * n * n + n].to_vec();
    let bot = key[2 * n * n + n];
    let top = key[2 * n * n + n + 1];
    FiniteAlgebra {
        size: n,
        meet,
        join,
        neg,
        bot,
        top,
    }
}

/// Enumerate all bounded distributive lattices of exactly `n` elements, up
/// to isomorphism, as (meet, join, bot, top) tables with a placeholder
/// negation (identity) — canonical order.
fn distributive_lattices(n: usize) -> Vec<FiniteAlgebra> {
    if n == 0 {
        return Vec::new();
    }
    // leq[a][b] over naturally labeled posets: element j is maximal among
    // 0..=j; choose its strict down-set among 0..j-1, which must be
    // downward closed.
    let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut out = Vec::new();
    let mut leq = vec![vec![false; n]; n];
    for i in 0..n {
        leq[i][i] = true;
    }
    fn extend(
        j: usize,
        n: usize,
        leq: &mut Vec<Vec<bool>>,
        found: &mut BTreeSet<Vec<usize>>,
        out: &mut Vec<FiniteAlgebra>,
    ) {
        if j == n {
            if let Some(alg) = lattice_from_order(n, leq) {
                let key = canonical_key(&alg);
                if found.insert(key) {
                    out.push(canonicalize(&alg));
                }
            }
            return;
        }
        // Down-set choice for the new maximal element j.
        for mask in 0u32..1 << j {
            let mut ok = true;
            'check: for i in 0..j {
                if mask >> i & 1 == 1 {
                    for k in 0..j {
                        if leq[k][i] && mask >> k & 1 == 0 {
                            ok = false;
                            break 'check;
                        }
                    }
                }
            }
            if !ok {
                continue;
            }
            for i in 0..j {
                leq[i][j] = mask >> i & 1 == 1;
            }
            extend(j + 1, n, leq, found, out);
        }
        for i in 0..j {
            leq[i][j] = false;
        }
    }
    extend(1, n, &mut leq, &mut found, &mut out);
    out.sort_by_key(canonical_key);
    out
}

/// Build meet/join tables from a partial order if it is a bounded
/// distributive lattice; `None` otherwise.
fn lattice_from_order(n: usize, leq: &[Vec<bool>]) -> Option<FiniteAlgebra> {
    let mut meet = vec![0usize; n * n];
    let mut join = vec![0usize; n * n];
    for a in 0..n {
        for b in 0..n {
            // Greatest lower bound: unique maximal common lower bound.
            let lowers: Vec<usize> = (0..n).filter(|&x| leq[x][a] && leq[x][b]).collect();
            let glb = *lowers.iter().find(|&&m| lowers.iter().all(|&x| leq[x][m]))?;
            let uppers: Vec<usize> = (0..n).filter(|&x| leq[a][x] && leq[b][x]).collect();
            if uppers.is_empty() {
                return None;
            }
            let lub = *uppers.iter().find(|&&m| uppers.iter().all(|&x| leq[m][x]))?;
            meet[a * n + b] = glb;
            join[a * n + b] = lub;
        }
    }
    let bot = (0..n).find(|&x| (0..n).all(|y| leq[x][y]))?;
    let top = (0..n).find(|&x| (0..n).all(|y| leq[y][x]))?;
    // Distributivity.
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let l = meet[a * n + join[b * n + c]];
                let r = join[meet[a * n + b] * n + meet[a * n + c]];
                if l != r {
                    return None;
                }
            }
        }
    }
    Some(FiniteAlgebra {
        size: n,
        meet,
        join,
        neg: (0..n).collect(),
        bot,
        top,
    })
}

/// Enumerate every isomorphism class of the requested variety with carrier
/// size ≤ `spec.max_size`, in canonical order. Honors the
/// `HILBERT_FORGE_CACHE` directory if set.
pub fn enumerate_algebras(spec: &EnumerationSpec) -> Result<Vec<FiniteAlgebra>, SearchError> {
    if spec.max_size > SIZE_CAP {
        return Err(SearchError::CapExceeded(spec.max_size));
    }
    let pres = preset(&spec.class)?;
    if let Some(cached) = cache_load(&pres.name, spec)? {
        return Ok(cached);
    }
    // Only the ¬-involving axioms need checking on top of lattice-hood.
    let neg_axioms: Vec<&crate::syntax::Equation> = pres
        .equations
        .iter()
        .filter(|(_, e)| contains_neg(&e.lhs) || contains_neg(&e.rhs))
        .map(|(_, e)| e)
        .collect();
    let mut out = Vec::new();
    let start = if spec.include_trivial { 1 } else { 2 };
    for n in start..=spec.max_size {
        let mut classes: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut sized = Vec::new();
        for lattice in distributive_lattices(n) {
            let mut neg = vec![0usize; n];
            loop {
                let cand = FiniteAlgebra {
                    neg: neg.clone(),
                    ..lattice.clone()
                };
                let mut ok = true;
                for eq in &neg_axioms {
                    if holds(&cand, eq)?.is_some() {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    let key = canonical_key(&cand);
                    if classes.insert(key) {
                        sized.push(canonicalize(&cand));
                    }
                }
                if !crate::algebra::next_assignment(&mut neg, n) {
                    break;
                }
            }
        }
        sized.sort_by_key(canonical_key);
        out.extend(sized);
    }
    cache_store(&pres.name, spec, &out)?;
    Ok(out)
}

fn contains_neg(f: &Formula) -> bool {
    match f {
        Formula::Var(_) | Formula::Bot | Formula::Top => false,
        Formula::Neg(_) => true,
        Formula::And(l, r) | Formula::Or(l, r) => contains_neg(l) || contains_neg(r),
    }
}

// ---------------------------------------------------------------------------
// Cache
// ---------------------------------------------------------------------------

fn cache_path(class: &str, spec: &EnumerationSpec) -> Option<PathBuf> {
    let dir = std::env::var_os("HILBERT_FORGE_CACHE")?;
    let tag = class.replace(['(', ')', ','], "_");
    Some(PathBuf::from(dir).join(format!(
        "{}-{}-{}.json",
        tag, spec.max_size, spec.include_trivial
    )))
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    algebras: Vec<AlgebraJson>,
}

fn cache_load(
    class: &str,
    spec: &EnumerationSpec,
) -> Result<Option<Vec<FiniteAlgebra>>, SearchError> {
    let Some(path) = cache_path(class, spec) else {
        return Ok(None);
    };
    if !path.exists() {
        return Ok(None);
    }
    let text = std::fs::read_to_string(path)?;
    let Ok(file) = serde_json::from_str::<CacheFile>(&text) else {
        return Ok(None); // stale/corrupt cache: recompute
    };
    let mut out = Vec::new();
    for a in file.algebras {
        out.push(a.into_algebra()?);
    }
    Ok(Some(out))
}

fn cache_store(
    class: &str,
    spec: &EnumerationSpec,
    algs: &[FiniteAlgebra],
) -> Result<(), SearchError> {
    let Some(path) = cache_path(class, spec) else {
        return Ok(());
    };
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let file = CacheFile {
        algebras: algs.iter().map(AlgebraJson::from).collect(),
    };
    std::fs::write(path, serde_json::to_string_pretty(&file).expect("json"))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Countermodel search
// ---------------------------------------------------------------------------

/// A refutation target: a rule schema or a concrete consecution.
#[derive(Debug, Clone)]
pub enum Target {
    Rule(Rule),
    Consecution(String, Consecution),
}

impl Target {
    pub fn id(&self) -> String {
        match self {
            Target::Rule(r) => r.name.clone(),
            Target::Consecution(id, _) => id.clone(),
        }
    }
}

/// Search the enumerated algebras of `spec.class` (size-ascending, canonical
/// order) for the first countermodel of the target under `mode`.
pub fn find_countermodel(
    target: &Target,
    spec: &EnumerationSpec,
    mode: &SemanticsMode,
) -> Result<SearchOutcome, SearchError> {
    let algebras = enumerate_algebras(spec)?;
    for alg in &algebras {
        let single = std::slice::from_ref(alg);
        let found = match target {
            Target::Rule(r) => rule_sound(r, single, mode)?.map(|w| Witness {
                algebra: alg.into(),
                designated: w.designated,
                valuation: w.valuation,
                target: target.id(),
            }),
            Target::Consecution(_, c) => {
                let mut hit = None;
                for designated in designations(alg, mode) {
                    let m = Matrix {
                        algebra: alg.clone(),
                        designated: designated.clone(),
                    };
                    if let Some(v) = matrix_entails(&m, c)? {
                        hit = Some(Witness {
                            algebra: alg.into(),
                            designated,
                            valuation: v,
                            target: target.id(),
                        });
                        break;
                    }
                }
                hit
            }
        };
        if let Some(w) = found {
            debug_assert!(verify_witness(&w, target).unwrap_or(false));
            return Ok(SearchOutcome::Refuted(w));
        }
    }
    Ok(SearchOutcome::Exhausted(spec.max_size))
}

fn designations(alg: &FiniteAlgebra, mode: &SemanticsMode) -> Vec<Vec<usize>> {
    match mode {
        SemanticsMode::Filter => crate::algebra::filters(alg),
        SemanticsMode::Assertional => vec![vec![alg.top]],
        SemanticsMode::FixedMatrix(d) => vec![d.clone()],
    }
}

/// Replay a witness through [`matrix_entails`]: true iff it still refutes
/// the target (witnesses are self-verifying).
pub fn verify_witness(w: &Witness, target: &Target) -> Result<bool, SearchError> {
    let alg = AlgebraJson {
        size: w.algebra.size,
        meet: w.algebra.meet.clone(),
        join: w.algebra.join.clone(),
        neg: w.algebra.neg.clone(),
        bot: w.algebra.bot,
        top: w.algebra.top,
    }
    .into_algebra()?;
    let m = Matrix {
        algebra: alg,
        designated: w.designated.clone(),
    };
    let consecutions: Vec<Consecution> = match target {
        Target::Consecution(_, c) => vec![c.clone()],
        Target::Rule(r) => r
            .directions()
            .into_iter()
            .map(|(premises, conclusion)| Consecution {
                premises,
                conclusion,
            })
            .collect(),
    };
    for c in consecutions {
        if let Some(v) = matrix_entails(&m, &c)? {
            // The recorded valuation must itself falsify some direction;
            // accept any falsifying valuation on the recorded matrix.
            let _ = v;
            return Ok(true);
        }
    }
    Ok(false)
}
