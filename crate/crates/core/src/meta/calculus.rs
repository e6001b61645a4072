//! Labelled (relational) calculi: rule schemata over meta-sequents `Π ▷ Σ`.
//!
//! Rule files hold one `(rule ...)` per entry:
//! ```text
//! (rule R□ inv (fresh y) (concl (succ (sat x (box A)))) (prem (ante (rel R x y)) (succ (sat y A))))
//! ```
//! A sequent lists `(ante ...)` and `(succ ...)` atoms; the contexts Π and Σ are kept
//! unless `(pi drop)`, `(pi (rename x y))`, `(sigma drop)` say otherwise.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::formula::{parse_atom, parse_term, MAtom, Term};
use super::sexpr::{read_all, Sexp};
use crate::error::{syntax, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ctx {
    Keep,
    Drop,
    /// `Π[x ↦ y]` on world positions.
    Rename(Term, Term),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetaSeq {
    pub ante: Vec<MAtom>,
    pub succ: Vec<MAtom>,
    pub pi: Ctx,
    pub sigma: Ctx,
}

impl MetaSeq {
    pub fn new(ante: Vec<MAtom>, succ: Vec<MAtom>) -> MetaSeq {
        MetaSeq {
            ante,
            succ,
            pi: Ctx::Keep,
            sigma: Ctx::Keep,
        }
    }

    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        for a in self.ante.iter().chain(&self.succ) {
            a.vars(&mut out);
        }
        for c in [&self.pi, &self.sigma] {
            if let Ctx::Rename(x, y) = c {
                x.vars(&mut out);
                y.vars(&mut out);
            }
        }
        out
    }

    fn schemas(&self) -> Vec<&str> {
        self.ante
            .iter()
            .chain(&self.succ)
            .filter_map(|a| match a {
                MAtom::Any(n) => Some(n.as_str()),
                _ => None,
            })
            .collect()
    }
}

fn ctx_text(c: &Ctx, name: &str) -> Option<String> {
    match c {
        Ctx::Keep => Some(name.to_string()),
        Ctx::Drop => None,
        Ctx::Rename(x, y) => Some(format!("{name}[{x}↦{y}]")),
    }
}

impl fmt::Display for MetaSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut left: Vec<String> = self.ante.iter().map(|a| a.to_string()).collect();
        left.extend(ctx_text(&self.pi, "Π"));
        let mut right: Vec<String> = ctx_text(&self.sigma, "Σ").into_iter().collect();
        right.extend(self.succ.iter().map(|a| a.to_string()));
        let l = left.join(", ");
        let r = right.join(", ");
        match (l.is_empty(), r.is_empty()) {
            (true, true) => write!(f, "▷"),
            (true, false) => write!(f, "▷ {r}"),
            (false, true) => write!(f, "{l} ▷"),
            (false, false) => write!(f, "{l} ▷ {r}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LRule {
    pub name: String,
    pub conclusion: MetaSeq,
    pub premises: Vec<MetaSeq>,
    /// Eigenvariables: instantiated by a world not in the conclusion.
    pub fresh: Vec<String>,
    /// Instantiated by a term already occurring in the conclusion.
    pub occurs: Vec<String>,
    /// Applied without backtracking by the prover.
    pub invertible: bool,
}

impl LRule {
    pub fn is_axiom(&self) -> bool {
        self.premises.is_empty()
    }

    /// `Φ, Π ▷ Σ ⟸ Φ, Φ, Π ▷ Σ` (or its right-hand mirror). Returns `true` for left.
    pub fn contraction_side(&self) -> Option<bool> {
        let [p] = self.premises.as_slice() else {
            return None;
        };
        let c = &self.conclusion;
        let keep = |s: &MetaSeq| s.pi == Ctx::Keep && s.sigma == Ctx::Keep;
        if !keep(c) || !keep(p) {
            return None;
        }
        match (c.ante.as_slice(), c.succ.as_slice()) {
            ([a @ MAtom::Any(_)], []) if p.succ.is_empty() && p.ante == vec![a.clone(), a.clone()] => Some(true),
            ([], [a @ MAtom::Any(_)]) if p.ante.is_empty() && p.succ == vec![a.clone(), a.clone()] => Some(false),
            _ => None,
        }
    }

    /// Every premise keeps the conclusion (contexts and atoms) and adds to it.
    pub fn is_monotone(&self) -> bool {
        let c = &self.conclusion;
        !self.premises.is_empty()
            && self.premises.iter().all(|p| {
                p.pi == Ctx::Keep
                    && p.sigma == Ctx::Keep
                    && c.ante.iter().all(|a| p.ante.contains(a))
                    && c.succ.iter().all(|a| p.succ.contains(a))
            })
    }

    fn validate(&self) -> Result<()> {
        let c = &self.conclusion;
        if c.pi != Ctx::Keep || c.sigma != Ctx::Keep {
            return Err(Error::Invalid(format!("rule `{}`: the conclusion must keep Π and Σ", self.name)));
        }
        let bound: Vec<String> = c.vars().into_iter().chain(self.fresh.clone()).chain(self.occurs.clone()).collect();
        let schemas = c.schemas();
        for p in &self.premises {
            if let Some(v) = p.vars().into_iter().find(|v| !bound.contains(v)) {
                return Err(Error::Invalid(format!("rule `{}`: variable `{v}` is not bound", self.name)));
            }
            if let Some(n) = p.schemas().into_iter().find(|n| !schemas.contains(n)) {
                return Err(Error::Invalid(format!("rule `{}`: schema `{n}` is not in the conclusion", self.name)));
            }
        }
        Ok(())
    }
}

impl fmt::Display for LRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.name, self.conclusion)?;
        if !self.premises.is_empty() {
            let ps: Vec<String> = self.premises.iter().map(|p| p.to_string()).collect();
            write!(f, "  <=  {}", ps.join("  |  "))?;
        }
        for y in &self.fresh {
            write!(f, "  [{y} fresh]")?;
        }
        if !self.occurs.is_empty() {
            write!(f, "  [{} occurs in Π, Σ]", self.occurs.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelledCalculus {
    pub name: String,
    pub rules: Vec<LRule>,
}

impl LabelledCalculus {
    pub fn rule(&self, name: &str) -> Option<&LRule> {
        self.rules.iter().find(|r| r.name == name)
    }
}

impl fmt::Display for LabelledCalculus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

pub const RK_RULES: &str = include_str!("../../data/rk.rules");
pub const RJ_RULES: &str = include_str!("../../data/rj.rules");
pub const RJPLUS_RULES: &str = include_str!("../../data/rjplus.rules");

/// The bundled calculi `rk`, `rj` and `rjplus`.
pub fn builtin_calculus(name: &str) -> Option<LabelledCalculus> {
    let src = match name {
        "rk" => RK_RULES,
        "rj" => RJ_RULES,
        "rjplus" => RJPLUS_RULES,
        _ => return None,
    };
    Some(parse_calculus(name, src).expect("bundled rule file parses"))
}

fn parse_ctx(e: &Sexp) -> Result<Ctx> {
    match e.sym() {
        Some("keep") => return Ok(Ctx::Keep),
        Some("drop") => return Ok(Ctx::Drop),
        _ => {}
    }
    match e.call() {
        Some(("rename", [x, y])) => Ok(Ctx::Rename(parse_term(x)?, parse_term(y)?)),
        _ => syntax(e.offset(), format!("expected `keep`, `drop` or `(rename x y)`, found `{e}`")),
    }
}

fn parse_seq(items: &[Sexp]) -> Result<MetaSeq> {
    let mut s = MetaSeq::new(vec![], vec![]);
    for it in items {
        match it.call() {
            Some(("ante", xs)) => s.ante.extend(xs.iter().map(parse_atom).collect::<Result<Vec<_>>>()?),
            Some(("succ", xs)) => s.succ.extend(xs.iter().map(parse_atom).collect::<Result<Vec<_>>>()?),
            Some(("pi", [c])) => s.pi = parse_ctx(c)?,
            Some(("sigma", [c])) => s.sigma = parse_ctx(c)?,
            _ => return syntax(it.offset(), format!("unexpected `{it}` in a sequent")),
        }
    }
    Ok(s)
}

fn names(xs: &[Sexp]) -> Result<Vec<String>> {
    xs.iter()
        .map(|x| match x.sym() {
            Some(s) => Ok(s.to_string()),
            None => syntax(x.offset(), "expected a variable"),
        })
        .collect()
}

pub fn parse_rule(e: &Sexp) -> Result<LRule> {
    let at = e.offset();
    let Some(("rule", args)) = e.call() else {
        return syntax(at, "expected `(rule NAME ...)`");
    };
    let Some(name) = args.first().and_then(Sexp::sym) else {
        return syntax(at, "a rule needs a name");
    };
    let mut r = LRule {
        name: name.to_string(),
        conclusion: MetaSeq::new(vec![], vec![]),
        premises: vec![],
        fresh: vec![],
        occurs: vec![],
        invertible: false,
    };
    let mut concl = None;
    for a in &args[1..] {
        if a.sym() == Some("inv") {
            r.invertible = true;
            continue;
        }
        match a.call() {
            Some(("concl", xs)) => concl = Some(parse_seq(xs)?),
            Some(("prem", xs)) => r.premises.push(parse_seq(xs)?),
            Some(("fresh", xs)) => r.fresh.extend(names(xs)?),
            Some(("occurs", xs)) => r.occurs.extend(names(xs)?),
            _ => return syntax(a.offset(), format!("unexpected `{a}` in rule `{name}`")),
        }
    }
    r.conclusion = match concl {
        Some(c) => c,
        None => return syntax(at, format!("rule `{name}` has no conclusion")),
    };
    r.validate()?;
    Ok(r)
}

pub fn parse_calculus(name: &str, src: &str) -> Result<LabelledCalculus> {
    let rules = read_all(src)?.iter().map(parse_rule).collect::<Result<Vec<_>>>()?;
    Ok(LabelledCalculus {
        name: name.to_string(),
        rules,
    })
}

fn term_sexp(t: &Term) -> String {
    match t {
        Term::Var(v) | Term::Const(v) => v.clone(),
        Term::App(op, args) if args.is_empty() => op.clone(),
        Term::App(op, args) => {
            let xs: Vec<String> = args.iter().map(term_sexp).collect();
            format!("({op} {})", xs.join(" "))
        }
    }
}

fn atom_sexp(a: &MAtom) -> String {
    match a {
        MAtom::Sat(w, f) => format!("(sat {} {})", term_sexp(w), term_sexp(f)),
        MAtom::Rel(r, x, y) => format!("(rel {r} {} {})", term_sexp(x), term_sexp(y)),
        MAtom::Pred(p, args) if args.is_empty() => p.clone(),
        MAtom::Pred(p, args) => {
            let xs: Vec<String> = args.iter().map(term_sexp).collect();
            format!("({p} {})", xs.join(" "))
        }
        MAtom::Bot => "bot".into(),
        MAtom::Any(n) => format!("(any {n})"),
    }
}

fn seq_sexp(tag: &str, s: &MetaSeq) -> String {
    let mut parts = vec![tag.to_string()];
    let list = |k: &str, xs: &[MAtom]| {
        let v: Vec<String> = xs.iter().map(atom_sexp).collect();
        format!("({k} {})", v.join(" "))
    };
    if !s.ante.is_empty() {
        parts.push(list("ante", &s.ante));
    }
    if !s.succ.is_empty() {
        parts.push(list("succ", &s.succ));
    }
    for (k, c) in [("pi", &s.pi), ("sigma", &s.sigma)] {
        match c {
            Ctx::Keep => {}
            Ctx::Drop => parts.push(format!("({k} drop)")),
            Ctx::Rename(x, y) => parts.push(format!("({k} (rename {} {}))", term_sexp(x), term_sexp(y))),
        }
    }
    format!("({})", parts.join(" "))
}

/// Rule-file text, readable by [`parse_calculus`].
pub fn rules_file(c: &LabelledCalculus) -> String {
    let mut out = String::new();
    for r in &c.rules {
        let mut parts = vec!["rule".to_string(), r.name.clone()];
        if r.invertible {
            parts.push("inv".into());
        }
        if !r.fresh.is_empty() {
            parts.push(format!("(fresh {})", r.fresh.join(" ")));
        }
        if !r.occurs.is_empty() {
            parts.push(format!("(occurs {})", r.occurs.join(" ")));
        }
        parts.push(seq_sexp("concl", &r.conclusion));
        parts.extend(r.premises.iter().map(|p| seq_sexp("prem", p)));
        out.push_str(&format!("({})\n", parts.join(" ")));
    }
    out
}

/// Bijective renaming of variables and schema names, built up during matching.
#[derive(Clone, Default)]
struct Renaming {
    fwd: BTreeMap<String, String>,
    bwd: BTreeMap<String, String>,
}

impl Renaming {
    fn bind(&mut self, a: &str, b: &str) -> bool {
        match (self.fwd.get(a), self.bwd.get(b)) {
            (Some(x), Some(y)) => x == b && y == a,
            (None, None) => {
                self.fwd.insert(a.into(), b.into());
                self.bwd.insert(b.into(), a.into());
                true
            }
            _ => false,
        }
    }

    fn term(&mut self, a: &Term, b: &Term) -> bool {
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => self.bind(x, y),
            (Term::Const(x), Term::Const(y)) => x == y,
            (Term::App(f, xs), Term::App(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.term(x, y))
            }
            _ => false,
        }
    }

    fn atom(&mut self, a: &MAtom, b: &MAtom) -> bool {
        match (a, b) {
            (MAtom::Sat(w, f), MAtom::Sat(v, g)) => self.term(w, v) && self.term(f, g),
            (MAtom::Rel(r, x, y), MAtom::Rel(s, u, v)) => r == s && self.term(x, u) && self.term(y, v),
            (MAtom::Pred(p, xs), MAtom::Pred(q, ys)) => {
                p == q && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.term(x, y))
            }
            (MAtom::Bot, MAtom::Bot) => true,
            (MAtom::Any(x), MAtom::Any(y)) => self.bind(&format!("#{x}"), &format!("#{y}")),
            _ => false,
        }
    }

    fn ctx(&mut self, a: &Ctx, b: &Ctx) -> bool {
        match (a, b) {
            (Ctx::Keep, Ctx::Keep) | (Ctx::Drop, Ctx::Drop) => true,
            (Ctx::Rename(x, y), Ctx::Rename(u, v)) => self.term(x, u) && self.term(y, v),
            _ => false,
        }
    }
}

/// Matches two atom multisets under a growing renaming; calls `k` on success.
fn multiset(xs: &[MAtom], ys: &[MAtom], ren: &Renaming, k: &mut dyn FnMut(&Renaming) -> bool) -> bool {
    if xs.len() != ys.len() {
        return false;
    }
    let Some((x, rest)) = xs.split_first() else {
        return k(ren);
    };
    for (i, y) in ys.iter().enumerate() {
        let mut r = ren.clone();
        if r.atom(x, y) {
            let mut others = ys.to_vec();
            others.remove(i);
            if multiset(rest, &others, &r, k) {
                return true;
            }
        }
    }
    false
}

fn seqs(xs: &[&MetaSeq], ys: &[&MetaSeq], ren: &Renaming, k: &mut dyn FnMut(&Renaming) -> bool) -> bool {
    if xs.len() != ys.len() {
        return false;
    }
    let Some((x, rest)) = xs.split_first() else {
        return k(ren);
    };
    for (i, y) in ys.iter().enumerate() {
        let mut r = ren.clone();
        if !(r.ctx(&x.pi, &y.pi) && r.ctx(&x.sigma, &y.sigma)) {
            continue;
        }
        let mut others = ys.to_vec();
        others.remove(i);
        let found = multiset(&x.ante, &y.ante, &r, &mut |r1| {
            multiset(&x.succ, &y.succ, r1, &mut |r2| seqs(rest, &others, r2, k))
        });
        if found {
            return true;
        }
    }
    false
}

/// Same rule up to renaming of variables and the order of atoms and premises.
/// Names and the invertibility flag are ignored.
pub fn rules_alpha_equiv(a: &LRule, b: &LRule) -> bool {
    let xs: Vec<&MetaSeq> = std::iter::once(&a.conclusion).chain(&a.premises).collect();
    let ys: Vec<&MetaSeq> = std::iter::once(&b.conclusion).chain(&b.premises).collect();
    if xs.len() != ys.len() {
        return false;
    }
    let mut r0 = Renaming::default();
    if !(r0.ctx(&xs[0].pi, &ys[0].pi) && r0.ctx(&xs[0].sigma, &ys[0].sigma)) {
        return false;
    }
    let check_sides = |r: &Renaming| {
        let map = |v: &Vec<String>| {
            let mut m: Vec<String> = v.iter().map(|x| r.fwd.get(x).cloned().unwrap_or_default()).collect();
            m.sort();
            m
        };
        let sorted = |v: &Vec<String>| {
            let mut m = v.clone();
            m.sort();
            m
        };
        map(&a.fresh) == sorted(&b.fresh) && map(&a.occurs) == sorted(&b.occurs)
    };
    multiset(&xs[0].ante, &ys[0].ante, &r0, &mut |r1| {
        multiset(&xs[0].succ, &ys[0].succ, r1, &mut |r2| {
            seqs(&xs[1..], &ys[1..], r2, &mut |r3| check_sides(r3))
        })
    })
}

/// Rule sets equal as multisets up to [`rules_alpha_equiv`]. On failure returns the
/// unmatched rules of each side.
pub fn calculus_diff<'a>(a: &'a LabelledCalculus, b: &'a LabelledCalculus) -> (Vec<&'a LRule>, Vec<&'a LRule>) {
    let mut left: Vec<&LRule> = Vec::new();
    let mut right: Vec<&LRule> = b.rules.iter().collect();
    for r in &a.rules {
        match right.iter().position(|s| rules_alpha_equiv(r, s)) {
            Some(i) => {
                right.remove(i);
            }
            None => left.push(r),
        }
    }
    (left, right)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rule(src: &str) -> LRule {
        parse_rule(&read_all(src).unwrap()[0]).unwrap()
    }

    #[test]
    fn display_and_round_trip() {
        let r = rule(
            "(rule R→ (fresh y) (concl (succ (sat x (imp A B)))) \
             (prem (ante (sat y A)) (pi (rename x y)) (sigma drop) (succ (sat y B))))",
        );
        assert_eq!(r.to_string(), "R→: Π ▷ Σ, (x : A → B)  <=  (y : A), Π[x↦y] ▷ (y : B)  [y fresh]");
        let c = LabelledCalculus {
            name: "t".into(),
            rules: vec![r.clone()],
        };
        assert_eq!(parse_calculus("t", &rules_file(&c)).unwrap(), c);
    }

    #[test]
    fn alpha_equivalence() {
        let a = rule("(rule a (concl (ante (sat x (and A B)))) (prem (ante (sat x A) (sat x B))))");
        let b = rule("(rule b (concl (ante (sat w (and P Q)))) (prem (ante (sat w Q) (sat w P))))");
        let c = rule("(rule c (concl (ante (sat w (and P Q)))) (prem (ante (sat w P) (sat w P))))");
        assert!(rules_alpha_equiv(&a, &b));
        assert!(!rules_alpha_equiv(&a, &c));
        let d = rule("(rule d (occurs y) (concl (ante (sat x (imp A B)))) (prem (succ (rel R x y))))");
        let e = rule("(rule e (fresh y) (concl (ante (sat x (imp A B)))) (prem (succ (rel R x y))))");
        assert!(!rules_alpha_equiv(&d, &e));
    }

    #[test]
    fn unbound_variable_rejected() {
        let e = parse_rule(&read_all("(rule bad (concl (ante (sat x A))) (prem (ante (sat y A))))").unwrap()[0]);
        assert!(matches!(e, Err(Error::Invalid(_))));
    }

    #[test]
    fn structural_shapes() {
        let c = rule("(rule c (concl (ante (any P))) (prem (ante (any P) (any P))))");
        assert_eq!(c.contraction_side(), Some(true));
        let l = rule("(rule L□ (concl (ante (sat x (box A)) (rel R x y))) (prem (ante (sat y A) (sat x (box A)) (rel R x y))))");
        assert!(l.is_monotone());
        assert_eq!(l.contraction_side(), None);
    }

    #[test]
    fn bundled_calculi_parse() {
        for n in ["rk", "rj", "rjplus"] {
            assert!(builtin_calculus(n).is_some());
        }
        assert_eq!(builtin_calculus("rk").unwrap().rules.len(), 14);
        assert_eq!(builtin_calculus("rj").unwrap().rules.len(), 15);
        assert_eq!(builtin_calculus("rjplus").unwrap().rules.len(), 14);
    }
}
