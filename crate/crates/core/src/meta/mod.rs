//! Relational calculi generated from first-order theories of satisfaction.

pub mod calculus;
pub mod encode;
pub mod formula;
pub mod prover;
pub mod sexpr;
pub mod synth;
pub mod theory;

pub use calculus::{builtin_calculus, calculus_diff, parse_calculus, rules_alpha_equiv, rules_file, Ctx, LRule, LabelledCalculus, MetaSeq};
pub use formula::{bunch_of_term, is_tractable, meta_formula, polarity, polarity_alternations, MAtom, MetaFormula, Polarity, Term};
pub use synth::{generate_relational_calculus, synthesize_rule, SyntheticRule};
pub use theory::{builtin_theory, parse_theory, Clause, Theory};
pub use encode::{ljplus_calculus, propositional_encoding, PropRule, PropSeq};
pub use prover::{check_labelled_proof, check_world_independence_partition, negation_as_implication, parse_labelled_sequent, prove_labelled, to_rjplus, LProof, LSeq};
