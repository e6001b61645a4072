//! Proof search over constraint-enriched sequent calculi.

pub mod error;
pub mod lex;
pub mod boolean;
pub mod syntax;
pub mod tree;
pub mod engine;
pub mod bi;
pub mod ipl;
pub mod oracles;
pub mod meta;
pub mod blp;
pub mod doc;

pub use error::{Error, Result};
pub use syntax::{coherent_equiv, enumerate_formulas, parse_bunch, parse_formula, parse_sequent, replace_subbunch, Alphabet, Bunch, Ctor, Formula, Sequent};
pub use boolean::{parse_constraint, solve, BoolExpr, Constraint, Interpretation};
pub use tree::{Proof, Reduction};
pub use bi::{check_lbi_proof, prove_bi, ProveOutcome};
pub use ipl::{check_ljplus_proof, prove_ipl, IplOutcome, LjSeq};
pub use oracles::{ipl_decide, k_decide, KripkeModel};
pub use meta::{builtin_calculus, generate_relational_calculus, parse_labelled_sequent, prove_labelled, LabelledCalculus};
pub use blp::{parse_goal, parse_program, run_blp, Answer, Program, Query};
pub use doc::{check_document, DocNode, ProofDocument};
