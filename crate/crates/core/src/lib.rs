//! Hilbert Forge: Hilbert calculi for distributive lattices with negation.
//!
//! This crate compiles equational presentations of varieties of bounded
//! distributive lattices with a negation operation (semi-De Morgan, De Morgan,
//! p-lattices, Ockham/Berman varieties, ...) into Hilbert-style calculi for
//! the associated order-preserving and ⊤-assertional logics, and verifies the
//! results against finite-algebra semantics.
//!
//! Module map:
//!
//! - [`syntax`] — formulas, parsing/printing, substitution, and the formula
//!   transformations (¬-depth, `f_k`, `g_n`, the star translation).
//! - [`calculi`] — rules, rule sets, and every generator: `R^Eq`, closure
//!   layers `R_n`, `g`-layers, `s`-layers, the builtin sets `R_C`, `R_F`,
//!   `R_•`, `S_•`, `R_⊤`, and the packaged SDM and Ockham calculi.
//! - [`algebra`] — finite algebras, equation checking, filters, congruences,
//!   Leibniz congruences, quotients, and the `A*` construction.
//! - [`semantics`] — matrix / order-preserving / assertional consequence and
//!   rule-soundness checking.
//! - [`search`] — enumeration of finite variety members up to isomorphism and
//!   countermodel search.
//! - [`engine`] — derivation checking, bounded proof search, and the shipped
//!   derivation corpus.
//! - [`cli`] — the `hilbert-forge` command-line entry point.

pub mod algebra;
pub mod calculi;
pub mod cli;
pub mod engine;
pub mod search;
pub mod semantics;
pub mod syntax;
