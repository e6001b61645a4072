//! Basic logic programming over hereditary Harrop formulas: the calculus LB, and LB
//! with unification carried as equality constraints on term labels.

use std::cell::Cell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::rc::Rc;

use serde::Serialize;

use crate::error::{syntax, Result};
use crate::tree::{Proof, Reduction};

/// `Label` is a label variable of the unification algebra; it never occurs in parsed input.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Term {
    Var(String),
    Const(String),
    Fun(String, Vec<Term>),
    Label(String),
}

impl Term {
    fn map(&self, f: &impl Fn(&Term) -> Option<Term>) -> Term {
        if let Some(t) = f(self) {
            return t;
        }
        match self {
            Term::Fun(g, xs) => Term::Fun(g.clone(), xs.iter().map(|x| x.map(f)).collect()),
            _ => self.clone(),
        }
    }

    fn walk(&self, out: &mut dyn FnMut(&Term)) {
        out(self);
        if let Term::Fun(_, xs) = self {
            xs.iter().for_each(|x| x.walk(out));
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) | Term::Const(v) => write!(f, "{v}"),
            Term::Label(n) => write!(f, "·{n}"),
            Term::Fun(g, xs) => {
                let a: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
                write!(f, "{g}({})", a.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Atom {
    pub rel: String,
    pub args: Vec<Term>,
}

impl Atom {
    fn map(&self, f: &impl Fn(&Term) -> Option<Term>) -> Atom {
        Atom {
            rel: self.rel.clone(),
            args: self.args.iter().map(|t| t.map(f)).collect(),
        }
    }

    fn similar(&self, o: &Atom) -> bool {
        self.rel == o.rel && self.args.len() == o.args.len()
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            return write!(f, "{}", self.rel);
        }
        let a: Vec<String> = self.args.iter().map(|x| x.to_string()).collect();
        write!(f, "{}({})", self.rel, a.join(","))
    }
}

/// `G ::= A | D → G | G ∧ G | G ∨ G`
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Goal {
    Atom(Atom),
    Imp(Box<Def>, Box<Goal>),
    And(Box<Goal>, Box<Goal>),
    Or(Box<Goal>, Box<Goal>),
}

/// `D ::= A | G → A | D ∧ D`
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Def {
    Atom(Atom),
    Imp(Box<Goal>, Atom),
    And(Box<Def>, Box<Def>),
}

impl Goal {
    fn map(&self, f: &impl Fn(&Term) -> Option<Term>) -> Goal {
        match self {
            Goal::Atom(a) => Goal::Atom(a.map(f)),
            Goal::Imp(d, g) => Goal::Imp(Box::new(d.map(f)), Box::new(g.map(f))),
            Goal::And(a, b) => Goal::And(Box::new(a.map(f)), Box::new(b.map(f))),
            Goal::Or(a, b) => Goal::Or(Box::new(a.map(f)), Box::new(b.map(f))),
        }
    }

    fn terms(&self, out: &mut dyn FnMut(&Term)) {
        match self {
            Goal::Atom(a) => a.args.iter().for_each(|t| t.walk(out)),
            Goal::Imp(d, g) => {
                d.terms(out);
                g.terms(out);
            }
            Goal::And(a, b) | Goal::Or(a, b) => {
                a.terms(out);
                b.terms(out);
            }
        }
    }

    /// Variables in order of first occurrence.
    pub fn vars(&self) -> Vec<String> {
        let mut v = Vec::new();
        self.terms(&mut |t| {
            if let Term::Var(x) = t {
                if !v.contains(x) {
                    v.push(x.clone());
                }
            }
        });
        v
    }
}

impl Def {
    fn map(&self, f: &impl Fn(&Term) -> Option<Term>) -> Def {
        match self {
            Def::Atom(a) => Def::Atom(a.map(f)),
            Def::Imp(g, a) => Def::Imp(Box::new(g.map(f)), a.map(f)),
            Def::And(a, b) => Def::And(Box::new(a.map(f)), Box::new(b.map(f))),
        }
    }

    fn terms(&self, out: &mut dyn FnMut(&Term)) {
        match self {
            Def::Atom(a) => a.args.iter().for_each(|t| t.walk(out)),
            Def::Imp(g, a) => {
                g.terms(out);
                a.args.iter().for_each(|t| t.walk(out));
            }
            Def::And(a, b) => {
                a.terms(out);
                b.terms(out);
            }
        }
    }

    pub fn vars(&self) -> Vec<String> {
        let mut v = Vec::new();
        self.terms(&mut |t| {
            if let Term::Var(x) = t {
                if !v.contains(x) {
                    v.push(x.clone());
                }
            }
        });
        v
    }
}

fn paren_goal(g: &Goal) -> String {
    match g {
        Goal::Atom(_) => g.to_string(),
        _ => format!("({g})"),
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Goal::Atom(a) => write!(f, "{a}"),
            Goal::Imp(d, g) => write!(f, "{} → {}", paren_def(d), paren_goal(g)),
            Goal::And(a, b) => write!(f, "{} ∧ {}", paren_goal(a), paren_goal(b)),
            Goal::Or(a, b) => write!(f, "{} ∨ {}", paren_goal(a), paren_goal(b)),
        }
    }
}

fn paren_def(d: &Def) -> String {
    match d {
        Def::Atom(_) => d.to_string(),
        _ => format!("({d})"),
    }
}

impl fmt::Display for Def {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Def::Atom(a) => write!(f, "{a}"),
            Def::Imp(g, a) => match **g {
                Goal::And(..) => write!(f, "{g} → {a}"),
                _ => write!(f, "{} → {a}", paren_goal(g)),
            },
            Def::And(a, b) => write!(f, "{} ∧ {}", paren_def(a), paren_def(b)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Program {
    pub clauses: Vec<Def>,
}

impl Program {
    /// Clauses with conjunctions split.
    fn flat(&self) -> Vec<Def> {
        fn go(d: &Def, out: &mut Vec<Def>) {
            match d {
                Def::And(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                _ => out.push(d.clone()),
            }
        }
        let mut out = Vec::new();
        self.clauses.iter().for_each(|d| go(d, &mut out));
        out
    }

    /// Constants occurring in the program.
    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for d in &self.clauses {
            d.terms(&mut |t| {
                if let Term::Const(c) = t {
                    out.insert(c.clone());
                }
            });
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Query {
    pub program: Program,
    pub goal: Goal,
}

impl Query {
    /// Assignments of program constants to the goal's variables.
    pub fn candidate_space(&self) -> usize {
        self.program.constants().len().pow(self.goal.vars().len() as u32)
    }
}

// ---------------------------------------------------------------- parsing

#[derive(Debug, Clone, PartialEq)]
enum Tk {
    Id(String),
    LP,
    RP,
    Comma,
    Semi,
    Dot,
    If,
    Arrow,
    Amp,
    Eof,
}

fn lex(src: &str) -> Result<Vec<(Tk, usize)>> {
    let b = src.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    while i < b.len() {
        let c = b[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c == '%' {
            while i < b.len() && b[i] != b'\n' {
                i += 1;
            }
        } else if c.is_ascii_alphanumeric() || c == '_' {
            let s = i;
            while i < b.len() && ((b[i] as char).is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push((Tk::Id(src[s..i].to_string()), s));
        } else if src[i..].starts_with(":-") {
            out.push((Tk::If, i));
            i += 2;
        } else if src[i..].starts_with("=>") {
            out.push((Tk::Arrow, i));
            i += 2;
        } else {
            let t = match c {
                '(' => Tk::LP,
                ')' => Tk::RP,
                ',' => Tk::Comma,
                ';' => Tk::Semi,
                '.' => Tk::Dot,
                '&' => Tk::Amp,
                _ => return syntax(i, format!("unexpected character `{c}`")),
            };
            out.push((t, i));
            i += 1;
        }
    }
    out.push((Tk::Eof, src.len()));
    Ok(out)
}

struct P {
    toks: Vec<(Tk, usize)>,
    pos: usize,
}

fn is_var(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_uppercase() || c == '_')
}

impl P {
    fn peek(&self) -> &Tk {
        &self.toks[self.pos].0
    }

    fn at(&self) -> usize {
        self.toks[self.pos].1
    }

    fn eat(&mut self, t: &Tk) -> bool {
        if self.peek() == t {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tk, what: &str) -> Result<()> {
        if self.eat(t) {
            Ok(())
        } else {
            syntax(self.at(), format!("expected {what}, found {:?}", self.peek()))
        }
    }

    fn term(&mut self) -> Result<Term> {
        let Tk::Id(s) = self.peek().clone() else {
            return syntax(self.at(), "expected a term");
        };
        self.pos += 1;
        if is_var(&s) {
            return Ok(Term::Var(s));
        }
        if self.eat(&Tk::LP) {
            let args = self.terms()?;
            return Ok(Term::Fun(s, args));
        }
        Ok(Term::Const(s))
    }

    fn terms(&mut self) -> Result<Vec<Term>> {
        let mut v = vec![self.term()?];
        while self.eat(&Tk::Comma) {
            v.push(self.term()?);
        }
        self.expect(&Tk::RP, "`)`")?;
        Ok(v)
    }

    fn atom(&mut self) -> Result<Atom> {
        let at = self.at();
        let Tk::Id(s) = self.peek().clone() else {
            return syntax(at, format!("expected an atom, found {:?}", self.peek()));
        };
        if is_var(&s) {
            return syntax(at, format!("`{s}` is a variable, not a relation symbol"));
        }
        self.pos += 1;
        let args = if self.eat(&Tk::LP) { self.terms()? } else { vec![] };
        Ok(Atom { rel: s, args })
    }

    fn def(&mut self) -> Result<Def> {
        let mut d = self.def_prim()?;
        while self.eat(&Tk::Amp) {
            d = Def::And(Box::new(d), Box::new(self.def_prim()?));
        }
        Ok(d)
    }

    fn def_prim(&mut self) -> Result<Def> {
        if self.eat(&Tk::LP) {
            let d = self.def()?;
            self.expect(&Tk::RP, "`)`")?;
            return Ok(d);
        }
        let a = self.atom()?;
        if self.eat(&Tk::If) {
            return Ok(Def::Imp(Box::new(self.goal()?), a));
        }
        if matches!(self.peek(), Tk::Semi) {
            return syntax(self.at(), "a clause head must be an atom");
        }
        Ok(Def::Atom(a))
    }

    fn goal(&mut self) -> Result<Goal> {
        let save = self.pos;
        if let Ok(d) = self.def() {
            if self.eat(&Tk::Arrow) {
                return Ok(Goal::Imp(Box::new(d), Box::new(self.goal()?)));
            }
        }
        self.pos = save;
        let mut g = self.goal_and()?;
        while self.eat(&Tk::Semi) {
            g = Goal::Or(Box::new(g), Box::new(self.goal_and()?));
        }
        Ok(g)
    }

    fn goal_and(&mut self) -> Result<Goal> {
        let mut g = self.goal_prim()?;
        while self.eat(&Tk::Comma) {
            g = Goal::And(Box::new(g), Box::new(self.goal_prim()?));
        }
        Ok(g)
    }

    fn goal_prim(&mut self) -> Result<Goal> {
        if self.eat(&Tk::LP) {
            let g = self.goal()?;
            self.expect(&Tk::RP, "`)`")?;
            return Ok(g);
        }
        Ok(Goal::Atom(self.atom()?))
    }
}

/// Prolog-like clauses: `h(X) :- b1(X), (b2(X) ; b3).` Conjunctions of clauses are
/// written with `&`; goals may contain `D => G`.
pub fn parse_program(text: &str) -> Result<Program> {
    let mut p = P { toks: lex(text)?, pos: 0 };
    let mut clauses = Vec::new();
    while !matches!(p.peek(), Tk::Eof) {
        clauses.push(p.def()?);
        p.expect(&Tk::Dot, "`.` after a clause")?;
    }
    Ok(Program { clauses })
}

pub fn parse_goal(text: &str) -> Result<Goal> {
    let mut p = P { toks: lex(text)?, pos: 0 };
    let g = p.goal()?;
    p.eat(&Tk::Dot);
    if !matches!(p.peek(), Tk::Eof) {
        return syntax(p.at(), format!("unexpected {:?} after the goal", p.peek()));
    }
    Ok(g)
}

// ---------------------------------------------------------------- constraints

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum UConstraint {
    Eq(Term, Term),
    And(Vec<UConstraint>),
    /// Empty: falsum.
    Or(Vec<UConstraint>),
}

impl fmt::Display for UConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |t: &Term| match t {
            Term::Label(n) => n.clone(),
            _ => t.to_string(),
        };
        match self {
            UConstraint::Eq(a, b) => write!(f, "{} = {}", name(a), name(b)),
            UConstraint::And(v) if v.is_empty() => write!(f, "⊤"),
            UConstraint::And(v) => {
                let s: Vec<String> = v.iter().map(|c| c.to_string()).collect();
                write!(f, "{}", s.join(" ⩓ "))
            }
            UConstraint::Or(v) if v.is_empty() => write!(f, "⊥"),
            UConstraint::Or(v) => {
                let single = |c: &UConstraint| match c {
                    UConstraint::Eq(l @ Term::Label(_), k) => Some((l.clone(), k.clone())),
                    UConstraint::And(w) if w.len() == 1 => match &w[0] {
                        UConstraint::Eq(l @ Term::Label(_), k) => Some((l.clone(), k.clone())),
                        _ => None,
                    },
                    _ => None,
                };
                let pairs: Option<Vec<(Term, Term)>> = v.iter().map(single).collect();
                match pairs {
                    Some(ps) if ps.iter().all(|p| p.0 == ps[0].0) => {
                        let ks: Vec<String> = ps.iter().map(|p| name(&p.1)).collect();
                        write!(f, "{} ∈ {{{}}}", name(&ps[0].0), ks.join(", "))
                    }
                    _ => {
                        let s: Vec<String> = v.iter().map(|c| format!("({c})")).collect();
                        write!(f, "{}", s.join(" ⅋ "))
                    }
                }
            }
        }
    }
}

/// Label (or variable) name to term; idempotent.
pub type Substitution = BTreeMap<String, Term>;

fn key(t: &Term) -> Option<&str> {
    match t {
        Term::Label(n) | Term::Var(n) => Some(n),
        _ => None,
    }
}

fn resolve(t: &Term, s: &Substitution) -> Term {
    t.map(&|x| key(x).and_then(|k| s.get(k)).map(|u| resolve(u, s)))
}

fn occurs(k: &str, t: &Term) -> bool {
    let mut hit = false;
    t.walk(&mut |x| hit |= key(x) == Some(k));
    hit
}

fn unify(a: &Term, b: &Term, s: &mut Substitution) -> bool {
    let (a, b) = (resolve(a, s), resolve(b, s));
    if a == b {
        return true;
    }
    match (&a, &b) {
        (x, t) | (t, x) if key(x).is_some() => {
            let k = key(x).unwrap();
            if occurs(k, t) {
                return false;
            }
            s.insert(k.to_string(), t.clone());
            true
        }
        (Term::Fun(f, xs), Term::Fun(g, ys)) if f == g && xs.len() == ys.len() => {
            xs.iter().zip(ys).all(|(x, y)| unify(x, y, s))
        }
        _ => false,
    }
}

/// Every solution: syntactic unification with occurs check, one branch per disjunct.
pub fn solve_unification(cs: &[UConstraint]) -> Vec<Substitution> {
    fn go<'a>(todo: &mut Vec<&'a UConstraint>, s: Substitution, out: &mut Vec<Substitution>) {
        let Some(c) = todo.pop() else {
            let full: Substitution = s.keys().map(|k| (k.clone(), resolve(&s[k], &s))).collect();
            if !out.contains(&full) {
                out.push(full);
            }
            return;
        };
        match c {
            UConstraint::Eq(a, b) => {
                let mut s2 = s;
                if unify(a, b, &mut s2) {
                    go(todo, s2, out);
                }
            }
            UConstraint::And(v) => {
                let n = todo.len();
                todo.extend(v.iter().rev());
                go(todo, s, out);
                todo.truncate(n);
            }
            UConstraint::Or(v) => {
                for alt in v {
                    todo.push(alt);
                    go(todo, s.clone(), out);
                    todo.pop();
                }
            }
        }
        todo.push(c);
    }
    let mut todo: Vec<&UConstraint> = cs.iter().rev().collect();
    let mut out = Vec::new();
    go(&mut todo, Substitution::new(), &mut out);
    out
}

// ---------------------------------------------------------------- LB⊕U

/// `P, extra ▷ goal`; the program itself stays implicit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BSeq {
    pub extra: Vec<Def>,
    pub goal: Goal,
}

impl fmt::Display for BSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P")?;
        for d in &self.extra {
            write!(f, ", {}", paren_def(d))?;
        }
        write!(f, " ▷ {}", self.goal)
    }
}

pub type BReduction = Reduction<BSeq, UConstraint>;

struct Lbu {
    program: Vec<Def>,
    next: Cell<usize>,
}

/// `A ≡ B` as the conjunction of argument equations.
fn equiv(a: &Atom, b: &Atom) -> UConstraint {
    UConstraint::And(a.args.iter().zip(&b.args).map(|(x, y)| UConstraint::Eq(x.clone(), y.clone())).collect())
}

impl Lbu {
    fn fresh(&self, vars: &[String]) -> BTreeMap<String, Term> {
        vars.iter()
            .map(|v| {
                self.next.set(self.next.get() + 1);
                (v.clone(), Term::Label(format!("n{}", self.next.get())))
            })
            .collect()
    }

    fn instantiate(&self, d: &Def) -> Def {
        let th = self.fresh(&d.vars());
        d.map(&|t| match t {
            Term::Var(v) => th.get(v).cloned(),
            _ => None,
        })
    }

    fn step(seq: &BSeq, rule: &str, children: Vec<BReduction>) -> BReduction {
        Reduction::Step {
            seq: seq.clone(),
            rule: rule.to_string(),
            children,
        }
    }

    fn stream(self: &Rc<Self>, seq: BSeq, depth: usize) -> Box<dyn Iterator<Item = BReduction>> {
        let me = self.clone();
        match seq.goal.clone() {
            Goal::And(a, b) => {
                let left = BSeq { extra: seq.extra.clone(), goal: *a };
                let right = BSeq { extra: seq.extra.clone(), goal: *b };
                Box::new(me.stream(left, depth).flat_map(move |ra| {
                    let seq = seq.clone();
                    me.stream(right.clone(), depth)
                        .map(move |rb| Lbu::step(&seq, "∧R", vec![ra.clone(), rb]))
                }))
            }
            Goal::Or(a, b) => {
                let s1 = seq.clone();
                let s2 = seq.clone();
                let l = me.stream(BSeq { extra: seq.extra.clone(), goal: *a }, depth);
                let r = me.stream(BSeq { extra: seq.extra.clone(), goal: *b }, depth);
                Box::new(
                    l.map(move |x| Lbu::step(&s1, "∨R", vec![x]))
                        .chain(r.map(move |x| Lbu::step(&s2, "∨R", vec![x]))),
                )
            }
            Goal::Imp(d, g) => {
                let mut extra = seq.extra.clone();
                extra.push(*d);
                Box::new(me.stream(BSeq { extra, goal: *g }, depth).map(move |x| Lbu::step(&seq, "→R", vec![x])))
            }
            Goal::Atom(b) => {
                if let Some(i) = seq.extra.iter().position(|d| matches!(d, Def::And(..))) {
                    let mut extra = seq.extra.clone();
                    let Def::And(d0, d1) = extra.remove(i) else { unreachable!() };
                    extra.insert(i, *d1);
                    extra.insert(i, *d0);
                    let next = BSeq { extra, goal: seq.goal.clone() };
                    return Box::new(me.stream(next, depth).map(move |x| Lbu::step(&seq, "∧L", vec![x])));
                }
                let ax = self.ax(&seq, &b);
                let res = self.resolutions(seq, b, depth);
                Box::new(std::iter::once(ax).chain(res))
            }
        }
    }

    fn ax(&self, seq: &BSeq, b: &Atom) -> BReduction {
        let mut alts = Vec::new();
        for d in self.program.iter().chain(&seq.extra) {
            if let Def::Atom(a) = d {
                if a.similar(b) {
                    let Def::Atom(a) = self.instantiate(d) else { unreachable!() };
                    alts.push(equiv(b, &a));
                }
            }
        }
        Lbu::step(seq, "ax", vec![Reduction::Side(UConstraint::Or(alts))])
    }

    fn resolutions(self: &Rc<Self>, seq: BSeq, b: Atom, depth: usize) -> Box<dyn Iterator<Item = BReduction>> {
        if depth == 0 {
            return Box::new(std::iter::empty());
        }
        let me = self.clone();
        let cands: Vec<Def> = self
            .program
            .iter()
            .chain(&seq.extra)
            .filter(|d| matches!(d, Def::Imp(_, a) if a.similar(&b)))
            .cloned()
            .collect();
        Box::new(cands.into_iter().flat_map(move |d| {
            let general = !d.vars().is_empty();
            let inst = me.instantiate(&d);
            let Def::Imp(g, a) = inst.clone() else { unreachable!() };
            let mut extra = seq.extra.clone();
            if general {
                extra.push(inst);
            }
            let at = BSeq { extra: extra.clone(), goal: seq.goal.clone() };
            let side = equiv(&a, &b);
            let seq0 = seq.clone();
            me.stream(BSeq { extra, goal: *g }, depth - 1).map(move |r| {
                let l = Lbu::step(&at, "→L", vec![r, Reduction::Side(side.clone())]);
                if general {
                    Lbu::step(&seq0, "∀L", vec![l])
                } else {
                    l
                }
            })
        }))
    }
}

/// Label of the `k`-th goal variable introduced by `∃R`.
fn goal_label(k: usize) -> Term {
    Term::Label(format!("m{k}"))
}

/// Every LB⊕U reduction of the query within `depth` resolution steps per branch, in
/// program-clause order. The goal's variables are labelled `m1, m2, …` by `∃R`.
pub fn reduce_lbu(q: &Query, depth: usize) -> Box<dyn Iterator<Item = BReduction>> {
    let lbu = Rc::new(Lbu {
        program: q.program.flat(),
        next: Cell::new(0),
    });
    let vars = q.goal.vars();
    let root = BSeq { extra: vec![], goal: q.goal.clone() };
    if vars.is_empty() {
        return lbu.stream(root, depth);
    }
    let th: BTreeMap<String, Term> = vars.iter().enumerate().map(|(i, v)| (v.clone(), goal_label(i + 1))).collect();
    let g = q.goal.map(&|t| match t {
        Term::Var(v) => th.get(v).cloned(),
        _ => None,
    });
    Box::new(
        lbu.stream(BSeq { extra: vec![], goal: g }, depth)
            .map(move |r| Lbu::step(&root, "∃R", vec![r])),
    )
}

// ---------------------------------------------------------------- valuation and LB

fn ground(t: &Term, s: &Substitution) -> Term {
    resolve(t, s).map(&|x| match x {
        Term::Label(n) => Some(Term::Var(format!("_{n}"))),
        _ => None,
    })
}

fn val_seq(q: &BSeq, s: &Substitution) -> BSeq {
    let f = |t: &Term| Some(ground(t, s));
    BSeq {
        extra: q.extra.iter().map(|d| d.map(&|t| if matches!(t, Term::Label(_)) { f(t) } else { None })).collect(),
        goal: q.goal.map(&|t| if matches!(t, Term::Label(_)) { f(t) } else { None }),
    }
}

fn match_term(p: &Term, t: &Term, th: &mut BTreeMap<String, Term>) -> bool {
    match p {
        Term::Var(v) => match th.get(v) {
            Some(u) => u == t,
            None => {
                th.insert(v.clone(), t.clone());
                true
            }
        },
        Term::Fun(f, xs) => match t {
            Term::Fun(g, ys) if f == g && xs.len() == ys.len() => xs.iter().zip(ys).all(|(x, y)| match_term(x, y, th)),
            _ => false,
        },
        _ => p == t,
    }
}

fn match_atom(p: &Atom, t: &Atom, th: &mut BTreeMap<String, Term>) -> bool {
    p.similar(t) && p.args.iter().zip(&t.args).all(|(x, y)| match_term(x, y, th))
}

fn match_goal(p: &Goal, t: &Goal, th: &mut BTreeMap<String, Term>) -> bool {
    match (p, t) {
        (Goal::Atom(a), Goal::Atom(b)) => match_atom(a, b, th),
        (Goal::Imp(d, g), Goal::Imp(e, h)) => match_def(d, e, th) && match_goal(g, h, th),
        (Goal::And(a, b), Goal::And(c, d)) | (Goal::Or(a, b), Goal::Or(c, d)) => match_goal(a, c, th) && match_goal(b, d, th),
        _ => false,
    }
}

fn match_def(p: &Def, t: &Def, th: &mut BTreeMap<String, Term>) -> bool {
    match (p, t) {
        (Def::Atom(a), Def::Atom(b)) => match_atom(a, b, th),
        (Def::Imp(g, a), Def::Imp(h, b)) => match_goal(g, h, th) && match_atom(a, b, th),
        (Def::And(a, b), Def::And(c, d)) => match_def(a, c, th) && match_def(b, d, th),
        _ => false,
    }
}

/// The LB proof a solution of the reduction's constraints picks out.
pub fn valuate_lbu(program: &Program, r: &BReduction, s: &Substitution) -> Option<Proof<BSeq>> {
    let Reduction::Step { seq, rule, children } = r else {
        return None;
    };
    let concl = val_seq(seq, s);
    if rule == "ax" {
        let Goal::Atom(b) = &concl.goal else { return None };
        if concl.extra.iter().any(|d| d == &Def::Atom(b.clone())) {
            return Some(Proof::leaf(concl, "ax"));
        }
        for d in program.flat() {
            let Def::Atom(a) = &d else { continue };
            let mut th = BTreeMap::new();
            if match_atom(a, b, &mut th) {
                if d.vars().is_empty() {
                    return Some(Proof::leaf(concl, "ax"));
                }
                let mut prem = concl.clone();
                prem.extra.push(Def::Atom(b.clone()));
                return Some(Proof::new(concl, "∀L", vec![Proof::leaf(prem, "ax")]));
            }
        }
        return None;
    }
    let premises = children
        .iter()
        .filter(|c| !matches!(c, Reduction::Side(_)))
        .map(|c| valuate_lbu(program, c, s))
        .collect::<Option<Vec<_>>>()?;
    Some(Proof::new(concl, rule, premises))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Answer {
    /// Goal variable to term.
    pub bindings: Vec<(String, Term)>,
    pub proof: Proof<BSeq>,
    /// The LB⊕U reduction and the solution it came from.
    #[serde(skip)]
    pub reduction: BReduction,
    #[serde(skip)]
    pub solution: Substitution,
}

impl Answer {
    pub fn line(&self) -> String {
        if self.bindings.is_empty() {
            return "yes".to_string();
        }
        let v: Vec<String> = self.bindings.iter().map(|(x, t)| format!("{x}={t}")).collect();
        v.join(", ")
    }
}

/// Distinct answers: reductions in program-clause order, each followed by the
/// solutions of its constraints in label-domain order.
pub fn run_blp(q: &Query, depth: usize) -> Vec<Answer> {
    let vars = q.goal.vars();
    let mut out: Vec<Answer> = Vec::new();
    for r in reduce_lbu(q, depth) {
        let cs: Vec<UConstraint> = r.constraints().into_iter().cloned().collect();
        for s in solve_unification(&cs) {
            let bindings: Vec<(String, Term)> = vars
                .iter()
                .enumerate()
                .map(|(i, v)| (v.clone(), ground(&goal_label(i + 1), &s)))
                .collect();
            if out.iter().any(|a| a.bindings == bindings) {
                continue;
            }
            if let Some(proof) = valuate_lbu(&q.program, &r, &s) {
                out.push(Answer {
                    bindings,
                    proof,
                    reduction: r.clone(),
                    solution: s,
                });
            }
        }
    }
    out
}

/// Checks every node against the rules of LB.
pub fn check_lb_proof(program: &Program, p: &Proof<BSeq>) -> bool {
    check_lb_node(program, p).is_none()
}

pub fn check_lb_node<'a>(program: &Program, p: &'a Proof<BSeq>) -> Option<&'a Proof<BSeq>> {
    let c = &p.conclusion;
    let kids: Vec<&BSeq> = p.premises.iter().map(|k| &k.conclusion).collect();
    let clauses: Vec<Def> = program.flat().into_iter().chain(c.extra.iter().cloned()).collect();
    let ok = match (p.rule.as_str(), kids.as_slice()) {
        ("ax", []) => match &c.goal {
            Goal::Atom(a) => clauses.iter().any(|d| d == &Def::Atom(a.clone())),
            _ => false,
        },
        ("∃R", [k]) => k.extra == c.extra && match_goal(&c.goal, &k.goal, &mut BTreeMap::new()),
        ("∀L", [k]) => {
            k.goal == c.goal
                && k.extra.len() == c.extra.len() + 1
                && k.extra[..c.extra.len()] == c.extra[..]
                && clauses.iter().any(|d| !d.vars().is_empty() && match_def(d, k.extra.last().unwrap(), &mut BTreeMap::new()))
        }
        ("→L", [k]) => {
            k.extra == c.extra
                && match &c.goal {
                    Goal::Atom(a) => clauses.iter().any(|d| d == &Def::Imp(Box::new(k.goal.clone()), a.clone())),
                    _ => false,
                }
        }
        ("∧L", [k]) => {
            matches!(c.goal, Goal::Atom(_))
                && k.goal == c.goal
                && c.extra.iter().enumerate().any(|(i, d)| match d {
                    Def::And(d0, d1) => {
                        let mut e = c.extra.clone();
                        e.remove(i);
                        e.insert(i, (**d1).clone());
                        e.insert(i, (**d0).clone());
                        e == k.extra
                    }
                    _ => false,
                })
        }
        ("→R", [k]) => match &c.goal {
            Goal::Imp(d, g) => {
                let mut e = c.extra.clone();
                e.push((**d).clone());
                k.extra == e && k.goal == **g
            }
            _ => false,
        },
        ("∧R", [k0, k1]) => match &c.goal {
            Goal::And(a, b) => k0.extra == c.extra && k1.extra == c.extra && k0.goal == **a && k1.goal == **b,
            _ => false,
        },
        ("∨R", [k]) => match &c.goal {
            Goal::Or(a, b) => k.extra == c.extra && (k.goal == **a || k.goal == **b),
            _ => false,
        },
        _ => false,
    };
    if !ok {
        return Some(p);
    }
    p.premises.iter().find_map(|k| check_lb_node(program, k))
}

pub const COURSES: &str = include_str!("../data/courses.pl");

#[cfg(test)]
mod tests {
    use super::*;

    fn courses() -> Program {
        parse_program(COURSES).unwrap()
    }

    fn query(goal: &str) -> Query {
        Query {
            program: courses(),
            goal: parse_goal(goal).unwrap(),
        }
    }

    #[test]
    fn parses_the_course_program() {
        let p = courses();
        assert_eq!(p.clauses.len(), 10);
        assert_eq!(p.clauses[9].to_string(), "(r(X) ∧ g(Y)) ∧ b(Z) → s(X,Y,Z)");
        assert_eq!(p.clauses[0], Def::Atom(Atom { rel: "r".into(), args: vec![Term::Const("al".into())] }));
        assert_eq!(p.constants().len(), 9);
    }

    #[test]
    fn grammar_checks() {
        assert!(parse_program("p :- q ; r.").is_ok());
        assert!(parse_program("p ; q :- r.").is_err());
        assert!(parse_program("X(a).").is_err());
        let g = parse_goal("(p(a) & (q :- p(a))) => q").unwrap();
        assert!(matches!(g, Goal::Imp(..)));
        assert_eq!(g.to_string(), "(p(a) ∧ (p(a) → q)) → q");
    }

    #[test]
    fn course_reduction_constraints() {
        let r = reduce_lbu(&query("s(X,Y,Z)"), 1).nth(1).unwrap();
        let cs: Vec<String> = r.constraints().iter().map(|c| c.to_string()).collect();
        assert_eq!(cs, ["n1 ∈ {al, pr, gr}", "n2 ∈ {lo, ca, au}", "n3 ∈ {da, co, ai}", "n1 = m1 ⩓ n2 = m2 ⩓ n3 = m3"]);
        assert_eq!(reduce_lbu(&query("s(X,Y,Z)"), 1).next().unwrap().constraints()[0].to_string(), "⊥");
    }

    #[test]
    fn course_answers() {
        let q = query("s(X,Y,Z)");
        assert_eq!(q.candidate_space(), 729);
        let answers = run_blp(&q, 4);
        assert_eq!(answers.len(), 27);
        assert_eq!(answers[0].line(), "X=al, Y=lo, Z=da");
        for a in &answers {
            assert!(check_lb_proof(&q.program, &a.proof), "{}", a.proof);
        }
        let a = answers.iter().find(|a| a.line() == "X=al, Y=lo, Z=ai").unwrap();
        assert_eq!(a.proof.rules(), ["∃R", "∀L", "→L", "∧R", "∧R", "ax", "ax", "ax"]);
    }

    #[test]
    fn ground_queries() {
        let a = run_blp(&query("s(al,lo,ai)"), 4);
        assert_eq!(a.len(), 1);
        assert_eq!(a[0].line(), "yes");
        assert_eq!(a[0].proof.rules(), ["∀L", "→L", "∧R", "∧R", "ax", "ax", "ax"]);
        assert!(run_blp(&query("s(pr,gr,ca)"), 4).is_empty());
        let r = reduce_lbu(&query("r(al)"), 1).next().unwrap();
        assert_eq!(r.constraints()[0].to_string(), "(al = al) ⅋ (al = pr) ⅋ (al = gr)");
        assert!(run_blp(&query("nope(al)"), 3).is_empty());
    }

    #[test]
    fn unification() {
        let n = Term::Label("n".into());
        let m = Term::Label("m".into());
        let f = Term::Fun("f".into(), vec![n.clone()]);
        assert!(solve_unification(&[UConstraint::Eq(n.clone(), f)]).is_empty());
        let al = Term::Const("al".into());
        let s = solve_unification(&[UConstraint::Eq(n.clone(), m.clone()), UConstraint::Eq(m, al.clone())]);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0]["n"], al);
        assert_eq!(s[0]["m"], al);
        assert_eq!(solve_unification(&[]), vec![Substitution::new()]);
        assert!(solve_unification(&[UConstraint::Or(vec![])]).is_empty());
    }

    #[test]
    fn hypothetical_goals_and_recursion() {
        let p = parse_program("e(a,b). e(b,c). path(X,Y) :- e(X,Y). path(X,Z) :- e(X,Y), path(Y,Z).").unwrap();
        let q = Query { program: p.clone(), goal: parse_goal("path(a,W)").unwrap() };
        let lines: Vec<String> = run_blp(&q, 3).iter().map(Answer::line).collect();
        assert_eq!(lines, ["W=b", "W=c"]);
        let q = Query { program: p, goal: parse_goal("e(c,d) => path(a,d)").unwrap() };
        let a = run_blp(&q, 3);
        assert_eq!(a.len(), 1);
        assert!(check_lb_proof(&q.program, &a[0].proof), "{}", a[0].proof);
    }
}
