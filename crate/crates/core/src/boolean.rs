//! Two-element Boolean algebra: expressions, quantifier-free constraints, solving.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{syntax, Error, Result};
use crate::lex::{Cursor, Tok};

/// Variable name, ordered by alphabetic prefix then numeric suffix (x2 < x10).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Var(pub String);

impl Var {
    fn key(&self) -> (&str, Option<u64>, &str) {
        let s = self.0.as_str();
        let cut = s.trim_end_matches(|c: char| c.is_ascii_digit()).len();
        let (pre, num) = s.split_at(cut);
        (pre, num.parse().ok(), num)
    }
}

impl Ord for Var {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Var {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BoolExpr {
    Var(Var),
    Zero,
    One,
    Sum(Box<BoolExpr>, Box<BoolExpr>),
    Prod(Box<BoolExpr>, Box<BoolExpr>),
    Not(Box<BoolExpr>),
}

pub fn var(name: &str) -> BoolExpr {
    BoolExpr::Var(Var(name.to_string()))
}

impl BoolExpr {
    pub fn sum(a: BoolExpr, b: BoolExpr) -> BoolExpr {
        BoolExpr::Sum(Box::new(a), Box::new(b))
    }

    /// Product that drops unit factors, so `1·x` stays `x`.
    pub fn prod(a: BoolExpr, b: BoolExpr) -> BoolExpr {
        match (a, b) {
            (BoolExpr::One, e) | (e, BoolExpr::One) => e,
            (a, b) => BoolExpr::Prod(Box::new(a), Box::new(b)),
        }
    }

    pub fn neg(a: BoolExpr) -> BoolExpr {
        BoolExpr::Not(Box::new(a))
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut s = BTreeSet::new();
        self.collect(&mut s);
        s
    }

    fn collect(&self, s: &mut BTreeSet<Var>) {
        match self {
            BoolExpr::Var(v) => {
                s.insert(v.clone());
            }
            BoolExpr::Zero | BoolExpr::One => {}
            BoolExpr::Sum(a, b) | BoolExpr::Prod(a, b) => {
                a.collect(s);
                b.collect(s);
            }
            BoolExpr::Not(a) => a.collect(s),
        }
    }

    fn prec(&self) -> u8 {
        match self {
            BoolExpr::Sum(..) => 1,
            BoolExpr::Prod(..) => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &BoolExpr, p: bool| {
            if p {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            BoolExpr::Var(v) => write!(f, "{v}"),
            BoolExpr::Zero => write!(f, "0"),
            BoolExpr::One => write!(f, "1"),
            BoolExpr::Sum(a, b) => {
                wrap(f, a, false)?;
                write!(f, " + ")?;
                wrap(f, b, b.prec() <= 1)
            }
            BoolExpr::Prod(a, b) => {
                wrap(f, a, a.prec() < 2)?;
                write!(f, "*")?;
                wrap(f, b, b.prec() <= 2)
            }
            BoolExpr::Not(a) => {
                write!(f, "~")?;
                wrap(f, a, a.prec() < 3)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Constraint {
    Eq(BoolExpr, BoolExpr),
    And(Vec<Constraint>),
    Or(Vec<Constraint>),
    Not(Box<Constraint>),
}

impl Constraint {
    pub fn eq(a: BoolExpr, b: BoolExpr) -> Constraint {
        Constraint::Eq(a, b)
    }

    pub fn tt() -> Constraint {
        Constraint::And(vec![])
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut s = BTreeSet::new();
        self.collect(&mut s);
        s
    }

    fn collect(&self, s: &mut BTreeSet<Var>) {
        match self {
            Constraint::Eq(a, b) => {
                a.collect(s);
                b.collect(s);
            }
            Constraint::And(cs) | Constraint::Or(cs) => cs.iter().for_each(|c| c.collect(s)),
            Constraint::Not(c) => c.collect(s),
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Constraint::Or(cs) if cs.len() > 1 => 1,
            Constraint::And(cs) if cs.len() > 1 => 2,
            _ => 3,
        }
    }
}

/// `V = e`: element-wise equations, true for the empty list.
pub fn all_eq(list: &[BoolExpr], e: &BoolExpr) -> Constraint {
    Constraint::And(list.iter().map(|x| Constraint::Eq(x.clone(), e.clone())).collect())
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, cs: &[Constraint], sep: &str, p: u8| {
            for (i, c) in cs.iter().enumerate() {
                if i > 0 {
                    write!(f, " {sep} ")?;
                }
                if c.prec() <= p {
                    write!(f, "({c})")?;
                } else {
                    write!(f, "{c}")?;
                }
            }
            Ok(())
        };
        match self {
            Constraint::Eq(a, b) => write!(f, "{a} = {b}"),
            Constraint::And(cs) if cs.is_empty() => write!(f, "1 = 1"),
            Constraint::Or(cs) if cs.is_empty() => write!(f, "0 = 1"),
            Constraint::And(cs) if cs.len() == 1 => write!(f, "{}", cs[0]),
            Constraint::Or(cs) if cs.len() == 1 => write!(f, "{}", cs[0]),
            Constraint::And(cs) => join(f, cs, "&", 2),
            Constraint::Or(cs) => join(f, cs, "||", 1),
            Constraint::Not(c) => {
                if c.prec() < 3 || matches!(**c, Constraint::Eq(..)) {
                    write!(f, "!({c})")
                } else {
                    write!(f, "!{c}")
                }
            }
        }
    }
}

pub type Interpretation = BTreeMap<Var, bool>;

pub fn eval_expr(e: &BoolExpr, i: &Interpretation) -> Result<bool> {
    Ok(match e {
        BoolExpr::Var(v) => *i.get(v).ok_or_else(|| Error::Unbound(v.0.clone()))?,
        BoolExpr::Zero => false,
        BoolExpr::One => true,
        BoolExpr::Sum(a, b) => eval_expr(a, i)? | eval_expr(b, i)?,
        BoolExpr::Prod(a, b) => eval_expr(a, i)? & eval_expr(b, i)?,
        BoolExpr::Not(a) => !eval_expr(a, i)?,
    })
}

pub fn eval_constraint(c: &Constraint, i: &Interpretation) -> Result<bool> {
    Ok(match c {
        Constraint::Eq(a, b) => eval_expr(a, i)? == eval_expr(b, i)?,
        Constraint::And(cs) => {
            let mut v = true;
            for c in cs {
                v &= eval_constraint(c, i)?;
            }
            v
        }
        Constraint::Or(cs) => {
            let mut v = false;
            for c in cs {
                v |= eval_constraint(c, i)?;
            }
            v
        }
        Constraint::Not(c) => !eval_constraint(c, i)?,
    })
}

/// Fresh variable supply: `x1, x2, …` for a given prefix.
#[derive(Debug, Clone)]
pub struct Fresh {
    prefix: String,
    next: usize,
}

impl Fresh {
    pub fn new(prefix: &str) -> Fresh {
        Fresh {
            prefix: prefix.to_string(),
            next: 1,
        }
    }

    pub fn var(&mut self) -> Var {
        let v = Var(format!("{}{}", self.prefix, self.next));
        self.next += 1;
        v
    }

    pub fn expr(&mut self) -> BoolExpr {
        BoolExpr::Var(self.var())
    }
}

// Algebraic normal form over GF(2): a set of monomials, each a sorted set of
// variable indices; the empty monomial is the constant 1.
type Mono = Vec<u32>;
type Poly = BTreeSet<Mono>;

fn xor(mut a: Poly, b: Poly) -> Poly {
    for m in b {
        if !a.remove(&m) {
            a.insert(m);
        }
    }
    a
}

fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for x in a {
        for y in b {
            let mut m: Mono = x.iter().chain(y.iter()).copied().collect();
            m.sort_unstable();
            m.dedup();
            if !out.remove(&m) {
                out.insert(m);
            }
        }
    }
    out
}

fn one() -> Poly {
    [Mono::new()].into()
}

fn anf(e: &BoolExpr, idx: &BTreeMap<Var, u32>) -> Poly {
    match e {
        BoolExpr::Var(v) => [vec![idx[v]]].into(),
        BoolExpr::Zero => Poly::new(),
        BoolExpr::One => one(),
        BoolExpr::Sum(a, b) => {
            let (pa, pb) = (anf(a, idx), anf(b, idx));
            let ab = mul(&pa, &pb);
            xor(xor(pa, pb), ab)
        }
        BoolExpr::Prod(a, b) => mul(&anf(a, idx), &anf(b, idx)),
        BoolExpr::Not(a) => xor(anf(a, idx), one()),
    }
}

enum Node {
    // holds iff the polynomial is zero
    Atom(Vec<Mono>),
    And(Vec<Node>),
    Or(Vec<Node>),
    Not(Box<Node>),
}

fn compile(c: &Constraint, idx: &BTreeMap<Var, u32>) -> Node {
    match c {
        Constraint::Eq(a, b) => Node::Atom(xor(anf(a, idx), anf(b, idx)).into_iter().collect()),
        Constraint::And(cs) => Node::And(cs.iter().map(|c| compile(c, idx)).collect()),
        Constraint::Or(cs) => Node::Or(cs.iter().map(|c| compile(c, idx)).collect()),
        Constraint::Not(c) => Node::Not(Box::new(compile(c, idx))),
    }
}

// Residual polynomial under a partial assignment (None = unassigned).
fn residual(p: &[Mono], asg: &[Option<bool>]) -> Poly {
    let mut out = Poly::new();
    'mono: for m in p {
        let mut rest = Mono::new();
        for &v in m {
            match asg[v as usize] {
                Some(false) => continue 'mono,
                Some(true) => {}
                None => rest.push(v),
            }
        }
        if !out.remove(&rest) {
            out.insert(rest);
        }
    }
    out
}

fn value(n: &Node, asg: &[Option<bool>]) -> Option<bool> {
    match n {
        Node::Atom(p) => {
            let r = residual(p, asg);
            if r.is_empty() {
                Some(true)
            } else if r.len() == 1 && r.contains(&Mono::new()) {
                Some(false)
            } else {
                None
            }
        }
        Node::And(ns) => {
            let mut all = Some(true);
            for n in ns {
                match value(n, asg) {
                    Some(false) => return Some(false),
                    None => all = None,
                    _ => {}
                }
            }
            all
        }
        Node::Or(ns) => {
            let mut any = Some(false);
            for n in ns {
                match value(n, asg) {
                    Some(true) => return Some(true),
                    None => any = None,
                    _ => {}
                }
            }
            any
        }
        Node::Not(n) => value(n, asg).map(|b| !b),
    }
}

fn units<'a>(n: &'a Node, out: &mut Vec<&'a [Mono]>) {
    match n {
        Node::Atom(p) => out.push(p),
        Node::And(ns) => ns.iter().for_each(|n| units(n, out)),
        _ => {}
    }
}

struct Solver {
    root: Node,
    n: usize,
}

impl Solver {
    fn new(cs: &[Constraint], order: &[Var]) -> Solver {
        let idx: BTreeMap<Var, u32> =
            order.iter().enumerate().map(|(i, v)| (v.clone(), i as u32)).collect();
        Solver {
            root: Node::And(cs.iter().map(|c| compile(c, &idx)).collect()),
            n: order.len(),
        }
    }

    /// Unit propagation over top-level equations; false on conflict.
    fn propagate(&self, asg: &mut [Option<bool>], trail: &mut Vec<usize>) -> bool {
        let mut atoms = Vec::new();
        units(&self.root, &mut atoms);
        loop {
            let mut changed = false;
            for p in &atoms {
                let r = residual(p, asg);
                let mut vars = r.iter().filter(|m| !m.is_empty());
                let has_const = r.contains(&Mono::new());
                match (vars.next(), vars.next()) {
                    (None, _) if has_const => return false,
                    (Some(m), None) if m.len() == 1 => {
                        asg[m[0] as usize] = Some(has_const);
                        trail.push(m[0] as usize);
                        changed = true;
                    }
                    // x·y·… = 1 forces every factor
                    (Some(m), None) if has_const => {
                        for &v in m {
                            asg[v as usize] = Some(true);
                            trail.push(v as usize);
                        }
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn search(&self, asg: &mut Vec<Option<bool>>, all: bool, out: &mut Vec<Vec<bool>>) -> bool {
        let mut trail = Vec::new();
        let ok = (all || self.propagate(asg, &mut trail)) && value(&self.root, asg) != Some(false);
        let mut done = false;
        if ok {
            match (0..self.n).find(|&i| asg[i].is_none()) {
                None => {
                    if value(&self.root, asg) == Some(true) {
                        out.push(asg.iter().map(|b| b.unwrap()).collect());
                        done = !all;
                    }
                }
                Some(i) => {
                    for b in [false, true] {
                        asg[i] = Some(b);
                        if self.search(asg, all, out) {
                            done = true;
                            break;
                        }
                    }
                    asg[i] = None;
                }
            }
        }
        for v in trail {
            asg[v] = None;
        }
        done
    }
}

fn to_interp(order: &[Var], bits: &[bool]) -> Interpretation {
    order.iter().cloned().zip(bits.iter().copied()).collect()
}

/// Lexicographically first model (variables in natural order, 0 before 1).
pub fn solve(cs: &[Constraint]) -> Option<Interpretation> {
    let order: Vec<Var> = cs.iter().flat_map(|c| c.vars()).collect::<BTreeSet<_>>().into_iter().collect();
    let s = Solver::new(cs, &order);
    let mut asg = vec![None; order.len()];
    let mut out = Vec::new();
    s.search(&mut asg, false, &mut out);
    out.pop().map(|bits| to_interp(&order, &bits))
}

/// Every model over `vars`, in lexicographic order of that list.
pub fn all_solutions(cs: &[Constraint], vars: &[Var]) -> Result<Vec<Interpretation>> {
    let known: BTreeSet<&Var> = vars.iter().collect();
    for c in cs {
        if let Some(v) = c.vars().into_iter().find(|v| !known.contains(v)) {
            return Err(Error::Unbound(v.0));
        }
    }
    let s = Solver::new(cs, vars);
    let mut asg = vec![None; vars.len()];
    let mut out = Vec::new();
    s.search(&mut asg, true, &mut out);
    Ok(out.iter().map(|b| to_interp(vars, b)).collect())
}

fn expr_sum(c: &mut Cursor) -> Result<BoolExpr> {
    let mut e = expr_prod(c)?;
    while c.eat(&Tok::Plus) {
        e = BoolExpr::sum(e, expr_prod(c)?);
    }
    Ok(e)
}

fn expr_prod(c: &mut Cursor) -> Result<BoolExpr> {
    let mut e = expr_unary(c)?;
    while c.eat(&Tok::Star) {
        e = BoolExpr::Prod(Box::new(e), Box::new(expr_unary(c)?));
    }
    Ok(e)
}

fn expr_unary(c: &mut Cursor) -> Result<BoolExpr> {
    let at = c.offset();
    match c.bump() {
        Tok::Tilde => Ok(BoolExpr::neg(expr_unary(c)?)),
        Tok::Num(n) if n == "0" => Ok(BoolExpr::Zero),
        Tok::Num(n) if n == "1" => Ok(BoolExpr::One),
        Tok::Ident(v) => Ok(BoolExpr::Var(Var(v))),
        Tok::LParen => {
            let e = expr_sum(c)?;
            c.expect(&Tok::RParen)?;
            Ok(e)
        }
        t => syntax(at, format!("unexpected {}", t.describe())),
    }
}

fn con_or(c: &mut Cursor) -> Result<Constraint> {
    let mut v = vec![con_and(c)?];
    while c.eat(&Tok::OrOr) {
        v.push(con_and(c)?);
    }
    Ok(if v.len() == 1 { v.pop().unwrap() } else { Constraint::Or(v) })
}

fn con_and(c: &mut Cursor) -> Result<Constraint> {
    let mut v = vec![con_unary(c)?];
    while c.eat(&Tok::Amp) {
        v.push(con_unary(c)?);
    }
    Ok(if v.len() == 1 { v.pop().unwrap() } else { Constraint::And(v) })
}

fn con_unary(c: &mut Cursor) -> Result<Constraint> {
    if c.eat(&Tok::Bang) {
        return Ok(Constraint::Not(Box::new(con_unary(c)?)));
    }
    let save = c.pos;
    let eq = (|| {
        let a = expr_sum(c)?;
        c.expect(&Tok::Eq)?;
        Ok(Constraint::Eq(a, expr_sum(c)?))
    })();
    match eq {
        Ok(e) => Ok(e),
        Err(err) => {
            c.pos = save;
            if c.eat(&Tok::LParen) {
                let inner = con_or(c)?;
                c.expect(&Tok::RParen)?;
                Ok(inner)
            } else {
                Err(err)
            }
        }
    }
}

/// Parses the debug syntax, e.g. `x*~y = 1 & z = 0`.
pub fn parse_constraint(text: &str) -> Result<Constraint> {
    let mut c = Cursor::new(text)?;
    let r = con_or(&mut c)?;
    c.expect_eof()?;
    Ok(r)
}

pub fn parse_expr(text: &str) -> Result<BoolExpr> {
    let mut c = Cursor::new(text)?;
    let r = expr_sum(&mut c)?;
    c.expect_eof()?;
    Ok(r)
}

/// The defining equations of a Boolean algebra, instantiated at `a, b, c`.
pub fn boolean_laws(a: &BoolExpr, b: &BoolExpr, c: &BoolExpr) -> Vec<(&'static str, BoolExpr, BoolExpr)> {
    let s = |x: &BoolExpr, y: &BoolExpr| BoolExpr::sum(x.clone(), y.clone());
    let p = |x: &BoolExpr, y: &BoolExpr| BoolExpr::Prod(Box::new(x.clone()), Box::new(y.clone()));
    let n = |x: &BoolExpr| BoolExpr::neg(x.clone());
    vec![
        ("sum-assoc", s(a, &s(b, c)), s(&s(a, b), c)),
        ("prod-assoc", p(a, &p(b, c)), p(&p(a, b), c)),
        ("sum-comm", s(a, b), s(b, a)),
        ("prod-comm", p(a, b), p(b, a)),
        ("sum-absorb", s(a, &p(a, b)), a.clone()),
        ("prod-absorb", p(a, &s(a, b)), a.clone()),
        ("sum-unit", s(a, &BoolExpr::Zero), a.clone()),
        ("prod-unit", p(a, &BoolExpr::One), a.clone()),
        ("sum-distrib", s(a, &p(b, c)), p(&s(a, b), &s(a, c))),
        ("prod-distrib", p(a, &s(b, c)), s(&p(a, b), &p(a, c))),
        ("complement-sum", s(a, &n(a)), BoolExpr::One),
        ("complement-prod", p(a, &n(a)), BoolExpr::Zero),
    ]
}
