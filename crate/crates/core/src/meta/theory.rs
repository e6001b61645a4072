//! Theory files: one s-expression per clause.
//!
//! ```text
//! (clause (iff (sat w (and A B)) (mand (sat w A) (sat w B))))
//! (axiom ref (rel R w w))
//! (option explicit-contraction)
//! ```
//! Free symbols are universally closed. `iff` yields the two implications.

use super::formula::{is_tractable, parse_meta_formula, MetaFormula};
use super::sexpr::{read_all, Sexp};
use crate::error::{syntax, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Clause {
    pub name: Option<String>,
    /// Closed.
    pub formula: MetaFormula,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Theory {
    pub clauses: Vec<Clause>,
    /// Generate a separate contraction rule instead of keeping principal atoms.
    pub explicit_contraction: bool,
}

pub const K_THEORY: &str = include_str!("../../data/k.thy");
pub const K_FULL_THEORY: &str = include_str!("../../data/k-full.thy");
pub const IPL_THEORY: &str = include_str!("../../data/ipl.thy");

fn close_pair(a: &MetaFormula, b: &MetaFormula) -> (MetaFormula, MetaFormula) {
    let both = MetaFormula::imp(a.clone(), b.clone());
    let vars = both.free_vars();
    let close = |f: MetaFormula| vars.iter().rev().fold(f, |acc, v| MetaFormula::forall(v, acc));
    (close(MetaFormula::imp(a.clone(), b.clone())), close(MetaFormula::imp(b.clone(), a.clone())))
}

fn entry(e: &Sexp, th: &mut Theory) -> Result<()> {
    let at = e.offset();
    let Some((head, args)) = e.call() else {
        return syntax(at, "expected `(clause ...)`, `(axiom ...)` or `(option ...)`");
    };
    match head {
        "option" => {
            for a in args {
                match a.sym() {
                    Some("explicit-contraction") => th.explicit_contraction = true,
                    _ => return syntax(a.offset(), format!("unknown option `{a}`")),
                }
            }
            Ok(())
        }
        "clause" | "axiom" => {
            let (name, body) = match args {
                [b] => (None, b),
                [n, b] if n.sym().is_some() => (n.sym().map(str::to_string), b),
                _ => return syntax(at, format!("malformed `{head}`")),
            };
            let formulas = match body.call() {
                Some(("iff", [a, b])) => {
                    let (l, r) = close_pair(&parse_meta_formula(a)?, &parse_meta_formula(b)?);
                    vec![l, r]
                }
                Some(("iff", _)) => return syntax(body.offset(), "`iff` needs two arguments"),
                _ => vec![parse_meta_formula(body)?.closure()],
            };
            for f in formulas {
                if !is_tractable(&f)? {
                    return Err(Error::NotTractable(f.to_string()));
                }
                th.clauses.push(Clause {
                    name: name.clone(),
                    formula: f,
                });
            }
            Ok(())
        }
        _ => syntax(at, format!("unknown entry `{head}`")),
    }
}

/// The bundled theories `k`, `k-full` and `ipl`.
pub fn builtin_theory(name: &str) -> Option<Theory> {
    let src = match name {
        "k" => K_THEORY,
        "k-full" => K_FULL_THEORY,
        "ipl" => IPL_THEORY,
        _ => return None,
    };
    Some(parse_theory(src).expect("bundled theory parses"))
}

pub fn parse_theory(src: &str) -> Result<Theory> {
    let mut th = Theory::default();
    for e in read_all(src)? {
        entry(&e, &mut th)?;
    }
    Ok(th)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_theories_parse() {
        let k = parse_theory(K_THEORY).unwrap();
        assert!(!k.explicit_contraction);
        assert_eq!(k.clauses.len(), 12);
        let ipl = parse_theory(IPL_THEORY).unwrap();
        assert!(ipl.explicit_contraction);
        assert_eq!(ipl.clauses.len(), 12);
        assert!(parse_theory(K_FULL_THEORY).unwrap().clauses.len() > 12);
    }

    #[test]
    fn iff_closes_both_directions() {
        let th = parse_theory("(clause (iff (sat w (not A)) (imp (sat w A) bot)))").unwrap();
        assert_eq!(th.clauses[0].formula.to_string(), "∀w∀A((w : ¬A) ⇒ ((w : A) ⇒ ⊥))");
        assert_eq!(th.clauses[1].formula.to_string(), "∀w∀A(((w : A) ⇒ ⊥) ⇒ (w : ¬A))");
    }

    #[test]
    fn intractable_rejected() {
        let e = parse_theory("(clause (imp (imp (imp (sat w A) (sat w B)) (sat w A)) (sat w A)))");
        assert!(matches!(e, Err(Error::NotTractable(_))));
        assert!(parse_theory("(lemma x)").is_err());
    }
}
