//! First-order meta-formulae over satisfaction and relational atoms.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::sexpr::Sexp;
use crate::error::{syntax, Error, Result};
use crate::syntax::{Bunch, Ctor, Formula};

/// Object terms and world terms share one term language.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Term {
    Var(String),
    Const(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(s: &str) -> Term {
        Term::Var(s.to_string())
    }

    pub fn app(op: &str, args: Vec<Term>) -> Term {
        Term::App(op.to_string(), args)
    }

    pub fn vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone())
                }
            }
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.vars(out)),
        }
    }

    pub fn subst(&self, s: &BTreeMap<String, Term>) -> Term {
        match self {
            Term::Var(v) => s.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::Const(_) => self.clone(),
            Term::App(op, args) => Term::App(op.clone(), args.iter().map(|a| a.subst(s)).collect()),
        }
    }

    /// Replaces every occurrence of `from` (any term) by `to`.
    pub fn replace(&self, from: &Term, to: &Term) -> Term {
        if self == from {
            return to.clone();
        }
        match self {
            Term::App(op, args) => Term::App(op.clone(), args.iter().map(|a| a.replace(from, to)).collect()),
            _ => self.clone(),
        }
    }

    pub fn subterms<'a>(&'a self, out: &mut Vec<&'a Term>) {
        if !out.contains(&self) {
            out.push(self);
        }
        if let Term::App(_, args) = self {
            args.iter().for_each(|a| a.subterms(out));
        }
    }

    fn is_binary_op(&self) -> bool {
        matches!(self, Term::App(op, a) if a.len() == 2 && op_symbol(op).is_some())
    }
}

fn op_symbol(op: &str) -> Option<&'static str> {
    Some(match op {
        "and" => "∧",
        "or" => "∨",
        "imp" => "→",
        "star" => "∗",
        "wand" => "−∗",
        "comma" => ",",
        "semi" => ";",
        "not" => "¬",
        "box" => "□",
        "dia" => "◇",
        "bot" => "⊥",
        "top" => "⊤",
        "mtop" => "⊤*",
        _ => return None,
    })
}

/// Symbol used in rule names for a principal connective.
pub fn connective_symbol(op: &str) -> String {
    op_symbol(op).map(str::to_string).unwrap_or_else(|| op.to_string())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) | Term::Const(v) => write!(f, "{v}"),
            Term::App(op, args) => match (op_symbol(op), args.len()) {
                (Some(s), 0) => write!(f, "{s}"),
                (Some(s), 1) => {
                    if args[0].is_binary_op() {
                        write!(f, "{s}({})", args[0])
                    } else {
                        write!(f, "{s}{}", args[0])
                    }
                }
                (Some(s), 2) => {
                    let side = |f: &mut fmt::Formatter<'_>, t: &Term| {
                        if t.is_binary_op() {
                            write!(f, "({t})")
                        } else {
                            write!(f, "{t}")
                        }
                    };
                    side(f, &args[0])?;
                    if op == "comma" || op == "semi" {
                        write!(f, "{s} ")?;
                    } else {
                        write!(f, " {s} ")?;
                    }
                    side(f, &args[1])
                }
                _ => {
                    write!(f, "{op}(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{a}")?;
                    }
                    write!(f, ")")
                }
            },
        }
    }
}

pub fn term_of_formula(f: &Formula) -> Term {
    let app = |op: &str, xs: Vec<&Formula>| Term::app(op, xs.into_iter().map(term_of_formula).collect());
    match f {
        Formula::Atom(p) => Term::Const(p.clone()),
        Formula::Top => Term::app("top", vec![]),
        Formula::Bot => Term::app("bot", vec![]),
        Formula::MTop => Term::app("mtop", vec![]),
        Formula::Not(a) => app("not", vec![a]),
        Formula::Box(a) => app("box", vec![a]),
        Formula::Dia(a) => app("dia", vec![a]),
        Formula::And(a, b) => app("and", vec![a, b]),
        Formula::Or(a, b) => app("or", vec![a, b]),
        Formula::Imp(a, b) => app("imp", vec![a, b]),
        Formula::Star(a, b) => app("star", vec![a, b]),
        Formula::Wand(a, b) => app("wand", vec![a, b]),
    }
}

pub fn term_of_bunch(b: &Bunch) -> Term {
    match b {
        Bunch::Formula(f) => term_of_formula(f),
        Bunch::Unit(Ctor::Mul) => Term::app("emptyx", vec![]),
        Bunch::Unit(Ctor::Add) => Term::app("emptyplus", vec![]),
        Bunch::Node(c, kids) => {
            let op = match c {
                Ctor::Mul => "comma",
                Ctor::Add => "semi",
            };
            let mut it = kids.iter().rev().map(term_of_bunch);
            let last = it.next().unwrap_or_else(|| Term::app("emptyx", vec![]));
            it.fold(last, |acc, t| Term::app(op, vec![t, acc]))
        }
    }
}

/// Back to an object formula, when the term is one.
/// Inverse of `term_of_bunch`.
pub fn bunch_of_term(t: &Term) -> Option<Bunch> {
    Some(match t {
        Term::App(op, a) if a.is_empty() && op == "emptyx" => Bunch::Unit(Ctor::Mul),
        Term::App(op, a) if a.is_empty() && op == "emptyplus" => Bunch::Unit(Ctor::Add),
        Term::App(op, a) if a.len() == 2 && (op == "comma" || op == "semi") => {
            let c = if op == "comma" { Ctor::Mul } else { Ctor::Add };
            Bunch::node(c, vec![bunch_of_term(&a[0])?, bunch_of_term(&a[1])?])
        }
        _ => Bunch::Formula(formula_of_term(t)?),
    })
}

pub fn formula_of_term(t: &Term) -> Option<Formula> {
    use crate::syntax as s;
    let arg = |i: usize| match t {
        Term::App(_, a) => a.get(i).and_then(formula_of_term),
        _ => None,
    };
    Some(match t {
        Term::Const(p) | Term::Var(p) => s::atom(p),
        Term::App(op, a) => match (op.as_str(), a.len()) {
            ("top", 0) => Formula::Top,
            ("bot", 0) => Formula::Bot,
            ("mtop", 0) => Formula::MTop,
            ("not", 1) => s::not(arg(0)?),
            ("box", 1) => s::boxf(arg(0)?),
            ("dia", 1) => s::dia(arg(0)?),
            ("and", 2) => s::and(arg(0)?, arg(1)?),
            ("or", 2) => s::or(arg(0)?, arg(1)?),
            ("imp", 2) => s::imp(arg(0)?, arg(1)?),
            ("star", 2) => s::star(arg(0)?, arg(1)?),
            ("wand", 2) => s::wand(arg(0)?, arg(1)?),
            _ => return None,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MAtom {
    /// `(w : φ)`
    Sat(Term, Term),
    /// `x R y`
    Rel(String, Term, Term),
    Pred(String, Vec<Term>),
    Bot,
    /// Schematic meta-atom, as in `Φ, Π ▷ Σ, Φ`.
    Any(String),
}

impl MAtom {
    pub fn terms(&self) -> Vec<&Term> {
        match self {
            MAtom::Sat(w, f) => vec![w, f],
            MAtom::Rel(_, a, b) => vec![a, b],
            MAtom::Pred(_, args) => args.iter().collect(),
            MAtom::Bot | MAtom::Any(_) => vec![],
        }
    }

    /// Terms in world position.
    pub fn worlds(&self) -> Vec<&Term> {
        match self {
            MAtom::Sat(w, _) => vec![w],
            MAtom::Rel(_, a, b) => vec![a, b],
            _ => vec![],
        }
    }

    pub fn vars(&self, out: &mut Vec<String>) {
        for t in self.terms() {
            t.vars(out);
        }
    }

    pub fn map_terms(&self, g: &impl Fn(&Term) -> Term) -> MAtom {
        match self {
            MAtom::Sat(w, f) => MAtom::Sat(g(w), g(f)),
            MAtom::Rel(r, a, b) => MAtom::Rel(r.clone(), g(a), g(b)),
            MAtom::Pred(p, args) => MAtom::Pred(p.clone(), args.iter().map(g).collect()),
            _ => self.clone(),
        }
    }

    pub fn subst(&self, s: &BTreeMap<String, Term>) -> MAtom {
        self.map_terms(&|t| t.subst(s))
    }
}

impl fmt::Display for MAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MAtom::Sat(w, t) => write!(f, "({w} : {t})"),
            MAtom::Rel(r, a, b) => write!(f, "{a}{r}{b}"),
            MAtom::Pred(p, args) if args.is_empty() => write!(f, "{p}"),
            MAtom::Pred(p, args) => {
                write!(f, "{p}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
            MAtom::Bot => write!(f, "⊥"),
            MAtom::Any(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MetaFormula {
    Atom(MAtom),
    /// ⩓
    And(Box<MetaFormula>, Box<MetaFormula>),
    /// ⅋
    Or(Box<MetaFormula>, Box<MetaFormula>),
    /// ⇒
    Imp(Box<MetaFormula>, Box<MetaFormula>),
    Forall(String, Box<MetaFormula>),
    Exists(String, Box<MetaFormula>),
}

use MetaFormula as M;

impl MetaFormula {
    pub fn atom(a: MAtom) -> MetaFormula {
        M::Atom(a)
    }
    pub fn bot() -> MetaFormula {
        M::Atom(MAtom::Bot)
    }
    pub fn and(a: MetaFormula, b: MetaFormula) -> MetaFormula {
        M::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: MetaFormula, b: MetaFormula) -> MetaFormula {
        M::Or(Box::new(a), Box::new(b))
    }
    pub fn imp(a: MetaFormula, b: MetaFormula) -> MetaFormula {
        M::Imp(Box::new(a), Box::new(b))
    }
    pub fn forall(x: &str, a: MetaFormula) -> MetaFormula {
        M::Forall(x.to_string(), Box::new(a))
    }
    pub fn exists(x: &str, a: MetaFormula) -> MetaFormula {
        M::Exists(x.to_string(), Box::new(a))
    }

    /// Free term variables in order of first occurrence.
    pub fn free_vars(&self) -> Vec<String> {
        fn go(f: &MetaFormula, bound: &mut Vec<String>, out: &mut Vec<String>) {
            match f {
                M::Atom(a) => {
                    let mut vs = Vec::new();
                    a.vars(&mut vs);
                    for v in vs {
                        if !bound.contains(&v) && !out.contains(&v) {
                            out.push(v);
                        }
                    }
                }
                M::And(a, b) | M::Or(a, b) | M::Imp(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                M::Forall(x, a) | M::Exists(x, a) => {
                    bound.push(x.clone());
                    go(a, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Universal closure over the free variables.
    pub fn closure(&self) -> MetaFormula {
        self.free_vars()
            .iter()
            .rev()
            .fold(self.clone(), |acc, v| M::forall(v, acc))
    }

    /// Substitutes a term for a free variable. Bound names are assumed distinct from
    /// the variables of `t`.
    pub fn instantiate(&self, x: &str, t: &Term) -> MetaFormula {
        match self {
            M::Atom(a) => {
                let s = BTreeMap::from([(x.to_string(), t.clone())]);
                M::Atom(a.subst(&s))
            }
            M::And(a, b) => M::and(a.instantiate(x, t), b.instantiate(x, t)),
            M::Or(a, b) => M::or(a.instantiate(x, t), b.instantiate(x, t)),
            M::Imp(a, b) => M::imp(a.instantiate(x, t), b.instantiate(x, t)),
            M::Forall(y, _) | M::Exists(y, _) if y == x => self.clone(),
            M::Forall(y, a) => M::forall(y, a.instantiate(x, t)),
            M::Exists(y, a) => M::exists(y, a.instantiate(x, t)),
        }
    }

    fn is_binary(&self) -> bool {
        matches!(self, M::And(..) | M::Or(..) | M::Imp(..))
    }
}

impl fmt::Display for MetaFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |f: &mut fmt::Formatter<'_>, x: &MetaFormula| {
            if x.is_binary() {
                write!(f, "({x})")
            } else {
                write!(f, "{x}")
            }
        };
        match self {
            M::Atom(a) => write!(f, "{a}"),
            M::And(a, b) | M::Or(a, b) | M::Imp(a, b) => {
                let s = match self {
                    M::And(..) => "⩓",
                    M::Or(..) => "⅋",
                    _ => "⇒",
                };
                side(f, a)?;
                write!(f, " {s} ")?;
                side(f, b)
            }
            M::Forall(x, a) | M::Exists(x, a) => {
                let q = if matches!(self, M::Forall(..)) { "∀" } else { "∃" };
                match **a {
                    M::Forall(..) | M::Exists(..) => write!(f, "{q}{x}{a}"),
                    _ => write!(f, "{q}{x}({a})"),
                }
            }
        }
    }
}

/// Which sides of the polarized grammar a formula fits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Polarity {
    pub positive: bool,
    pub negative: bool,
}

/// Polarity classification. Atoms are both, ⊥ and ⅋/∃ are positive. An implication is
/// negative whatever its antecedent, and positive as `N ⇒ P`. ∀ keeps the polarity of
/// its body, so universal closures of positive formulas stay positive.
pub fn polarity(f: &MetaFormula) -> Result<Polarity> {
    let both = Polarity {
        positive: true,
        negative: true,
    };
    let pos = Polarity {
        positive: true,
        negative: false,
    };
    let fail = || Err(Error::NotPolarizable(f.to_string()));
    match f {
        M::Atom(MAtom::Bot) => Ok(pos),
        M::Atom(_) => Ok(both),
        M::And(a, b) => {
            let (x, y) = (polarity(a)?, polarity(b)?);
            let p = Polarity {
                positive: x.positive && y.positive,
                negative: x.negative && y.negative,
            };
            if p.positive || p.negative {
                Ok(p)
            } else {
                fail()
            }
        }
        M::Or(a, b) => {
            if polarity(a)?.positive && polarity(b)?.positive {
                Ok(pos)
            } else {
                fail()
            }
        }
        M::Imp(a, b) => Ok(Polarity {
            positive: polarity(a)?.negative && polarity(b)?.positive,
            negative: true,
        }),
        M::Exists(_, a) => {
            if polarity(a)?.positive {
                Ok(pos)
            } else {
                fail()
            }
        }
        M::Forall(_, a) => polarity(a),
    }
}

/// π: the number of polarity alternations (implication nesting).
pub fn polarity_alternations(f: &MetaFormula) -> usize {
    match f {
        M::Atom(_) => 0,
        M::And(a, b) | M::Or(a, b) => polarity_alternations(a).max(polarity_alternations(b)),
        M::Imp(a, b) => 1 + polarity_alternations(a).max(polarity_alternations(b)),
        M::Forall(_, a) | M::Exists(_, a) => polarity_alternations(a),
    }
}

/// Negative with π ≤ 2, or positive with π ≤ 1.
pub fn is_tractable(f: &MetaFormula) -> Result<bool> {
    let p = polarity(f)?;
    let pi = polarity_alternations(f);
    Ok((p.negative && pi <= 2) || (p.positive && pi <= 1))
}

const OBJECT_OPS: [(&str, usize); 15] = [
    ("bot", 0),
    ("top", 0),
    ("mtop", 0),
    ("emptyx", 0),
    ("emptyplus", 0),
    ("not", 1),
    ("box", 1),
    ("dia", 1),
    ("and", 2),
    ("or", 2),
    ("imp", 2),
    ("star", 2),
    ("wand", 2),
    ("comma", 2),
    ("semi", 2),
];

/// Terms in files: bare symbols are variables, `(op args)` are applications.
pub fn parse_term(e: &Sexp) -> Result<Term> {
    match e {
        Sexp::Sym(s, at) => match OBJECT_OPS.iter().find(|(n, _)| n == s) {
            Some((_, 0)) => Ok(Term::app(s, vec![])),
            Some(_) => syntax(*at, format!("`{s}` needs arguments")),
            None => Ok(Term::Var(s.clone())),
        },
        Sexp::List(_, at) => {
            let Some((op, args)) = e.call() else {
                return syntax(*at, "expected a term");
            };
            if let Some((_, k)) = OBJECT_OPS.iter().find(|(n, _)| *n == op) {
                if *k != args.len() {
                    return Err(Error::Arity {
                        name: op.to_string(),
                        expected: *k,
                        found: args.len(),
                        offset: *at,
                    });
                }
            }
            Ok(Term::app(op, args.iter().map(parse_term).collect::<Result<_>>()?))
        }
    }
}

pub fn parse_atom(e: &Sexp) -> Result<MAtom> {
    let at = e.offset();
    match e {
        Sexp::Sym(s, _) if s == "bot" => Ok(MAtom::Bot),
        Sexp::Sym(s, _) => Ok(MAtom::Pred(s.clone(), vec![])),
        Sexp::List(..) => {
            let Some((h, args)) = e.call() else {
                return syntax(at, "expected a meta-atom");
            };
            let arity = |k: usize| {
                if args.len() == k {
                    Ok(())
                } else {
                    Err(Error::Arity {
                        name: h.to_string(),
                        expected: k,
                        found: args.len(),
                        offset: at,
                    })
                }
            };
            match h {
                "sat" => {
                    arity(2)?;
                    Ok(MAtom::Sat(parse_term(&args[0])?, parse_term(&args[1])?))
                }
                "rel" => {
                    arity(3)?;
                    let Some(r) = args[0].sym() else {
                        return syntax(args[0].offset(), "expected a relation name");
                    };
                    Ok(MAtom::Rel(r.to_string(), parse_term(&args[1])?, parse_term(&args[2])?))
                }
                "any" => {
                    arity(1)?;
                    match args[0].sym() {
                        Some(n) => Ok(MAtom::Any(n.to_string())),
                        None => syntax(args[0].offset(), "expected a name"),
                    }
                }
                _ => Ok(MAtom::Pred(h.to_string(), args.iter().map(parse_term).collect::<Result<_>>()?)),
            }
        }
    }
}

/// `sat rel mand mor imp forall exists bot`, anything else is a predicate atom.
pub fn parse_meta_formula(e: &Sexp) -> Result<MetaFormula> {
    let at = e.offset();
    let Some((h, args)) = e.call() else {
        return Ok(M::Atom(parse_atom(e)?));
    };
    let binary = |mk: fn(MetaFormula, MetaFormula) -> MetaFormula| -> Result<MetaFormula> {
        if args.len() < 2 {
            return syntax(at, format!("`{h}` needs two arguments"));
        }
        let mut fs = args.iter().map(parse_meta_formula).collect::<Result<Vec<_>>>()?;
        let last = fs.pop().unwrap();
        Ok(fs.into_iter().rev().fold(last, |acc, x| mk(x, acc)))
    };
    match h {
        "mand" => binary(M::and),
        "mor" => binary(M::or),
        "imp" => {
            if args.len() != 2 {
                return syntax(at, "`imp` needs two arguments");
            }
            Ok(M::imp(parse_meta_formula(&args[0])?, parse_meta_formula(&args[1])?))
        }
        "forall" | "exists" => {
            let (Some(x), Some(body)) = (args.first().and_then(Sexp::sym), args.get(1)) else {
                return syntax(at, format!("`{h}` needs a variable and a body"));
            };
            let b = parse_meta_formula(body)?;
            Ok(if h == "forall" { M::forall(x, b) } else { M::exists(x, b) })
        }
        "iff" => syntax(at, "`iff` is only allowed at the top of a clause"),
        _ => Ok(M::Atom(parse_atom(e)?)),
    }
}

/// Convenience for tests and examples.
pub fn meta_formula(src: &str) -> Result<MetaFormula> {
    let es = super::sexpr::read_all(src)?;
    match es.as_slice() {
        [e] => parse_meta_formula(e),
        _ => syntax(0, "expected exactly one meta-formula"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mf(s: &str) -> MetaFormula {
        meta_formula(s).unwrap()
    }

    #[test]
    fn alternations() {
        assert_eq!(polarity_alternations(&mf("(mor (mand A B) (mand C D))")), 0);
        assert_eq!(polarity_alternations(&mf("(imp (imp (imp A B) C) D)")), 3);
        let imp_clause = "(imp (sat x (imp F G)) (forall y (imp (mand (rel R x y) (sat y F)) (sat y G))))";
        assert_eq!(polarity_alternations(&mf(imp_clause)), 2);
    }

    #[test]
    fn tractability_examples() {
        assert!(is_tractable(&mf("(mor (mand A B) (mand C D))")).unwrap());
        assert!(!is_tractable(&mf("(imp (imp (imp A B) C) D)")).unwrap());
        // geometric implication
        let g = mf("(forall x (imp (mand (P x) (Q x)) (exists y (mor (S x y) (T y)))))");
        assert!(is_tractable(&g).unwrap());
        for d in [
            "(imp (sat x (imp F G)) (forall y (imp (mand (rel R x y) (sat y F)) (sat y G))))",
            "(imp (forall y (imp (mand (rel R x y) (sat y F)) (sat y G))) (sat x (imp F G)))",
        ] {
            let f = mf(d).closure();
            assert!(polarity(&f).unwrap().negative);
            assert!(is_tractable(&f).unwrap());
        }
        assert!(matches!(
            polarity(&mf("(mand (exists x (P x)) (imp (mor A B) C))")),
            Err(Error::NotPolarizable(_))
        ));
    }

    #[test]
    fn closure_and_display() {
        let f = mf("(imp (sat w (and A B)) (mand (sat w A) (sat w B)))").closure();
        assert_eq!(f.free_vars(), Vec::<String>::new());
        assert_eq!(f.to_string(), "∀w∀A∀B((w : A ∧ B) ⇒ ((w : A) ⩓ (w : B)))");
        let g = mf("(forall X (mor (mand (A X) (B X)) (mand (C X) (D X))))");
        assert_eq!(g.to_string(), "∀X((A(X) ⩓ B(X)) ⅋ (C(X) ⩓ D(X)))");
    }

    #[test]
    fn terms_round_trip() {
        let f = crate::parse_formula("~box (p & q) -> dia p", &crate::Alphabet::all()).unwrap();
        let t = term_of_formula(&f);
        assert_eq!(t.to_string(), "¬□(p ∧ q) → ◇p");
        assert_eq!(formula_of_term(&t), Some(f));
    }
}
