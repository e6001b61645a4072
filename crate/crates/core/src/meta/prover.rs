//! Backward search in labelled calculi.

use std::cell::Cell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::calculus::{builtin_calculus, Ctx, LRule, LabelledCalculus, MetaSeq};
use super::formula::{bunch_of_term, term_of_bunch, term_of_formula, MAtom, Term};
use crate::error::{syntax, Error, Result};
use crate::lex::{Cursor, Tok};
use crate::syntax::{Alphabet, Bunch, BunchParser, FormulaParser};

/// A ground labelled sequent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct LSeq {
    pub ante: Vec<MAtom>,
    pub succ: Vec<MAtom>,
}

impl LSeq {
    pub fn new(ante: Vec<MAtom>, succ: Vec<MAtom>) -> LSeq {
        LSeq { ante, succ }
    }

    /// Both sides as sets.
    pub fn key(&self) -> (Vec<MAtom>, Vec<MAtom>) {
        let set = |v: &[MAtom]| v.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        (set(&self.ante), set(&self.succ))
    }

    pub fn worlds(&self) -> BTreeSet<Term> {
        self.ante
            .iter()
            .chain(&self.succ)
            .flat_map(|a| a.worlds().into_iter().cloned())
            .collect()
    }

    /// The input syntax of `parse_labelled_sequent`, when every atom has one.
    pub fn to_text(&self) -> Option<String> {
        let item = |a: &MAtom| -> Option<String> {
            Some(match a {
                MAtom::Sat(Term::Const(w), f) => match bunch_of_term(f)? {
                    Bunch::Formula(x) => format!("{w}: {x}"),
                    b => format!("({w}: {b})"),
                },
                MAtom::Rel(r, Term::Const(x), Term::Const(y)) => format!("{x} {r} {y}"),
                MAtom::Bot => "bot".to_string(),
                _ => return None,
            })
        };
        let side = |v: &[MAtom]| v.iter().map(item).collect::<Option<Vec<_>>>().map(|v| v.join(", "));
        let (l, r) = (side(&self.ante)?, side(&self.succ)?);
        Some(format!("{l} |- {r}").trim().to_string())
    }

    fn names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        fn go(t: &Term, out: &mut BTreeSet<String>) {
            match t {
                Term::Const(c) | Term::Var(c) => {
                    out.insert(c.clone());
                }
                Term::App(_, xs) => xs.iter().for_each(|x| go(x, out)),
            }
        }
        for a in self.ante.iter().chain(&self.succ) {
            a.terms().into_iter().for_each(|t| go(t, &mut out));
        }
        out
    }
}

impl fmt::Display for LSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |v: &[MAtom]| v.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(", ");
        let (l, r) = (side(&self.ante), side(&self.succ));
        match (l.is_empty(), r.is_empty()) {
            (true, true) => write!(f, "▷"),
            (true, false) => write!(f, "▷ {r}"),
            (false, true) => write!(f, "{l} ▷"),
            (false, false) => write!(f, "{l} ▷ {r}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LProof {
    pub sequent: LSeq,
    pub rule: String,
    pub children: Vec<LProof>,
}

impl LProof {
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(LProof::size).sum::<usize>()
    }

    fn render(&self, indent: usize, out: &mut String) {
        out.push_str(&format!("{}{}   [{}]\n", "  ".repeat(indent), self.sequent, self.rule));
        for c in &self.children {
            c.render(indent + 1, out);
        }
    }
}

impl fmt::Display for LProof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.render(0, &mut s);
        write!(f, "{s}")
    }
}

fn labelled_item(c: &mut Cursor, alpha: &Alphabet) -> Result<MAtom> {
    let fp = FormulaParser { alpha };
    match (c.peek().clone(), c.peek_at(1).clone(), c.peek_at(2).clone()) {
        (Tok::Ident(b), Tok::Comma | Tok::Turnstile | Tok::Eof, _) if b == "bot" => {
            c.bump();
            Ok(MAtom::Bot)
        }
        (Tok::LParen, Tok::Ident(w), Tok::Colon) => {
            c.bump();
            c.bump();
            c.bump();
            let b = BunchParser { fp }.semi(c)?;
            c.expect(&Tok::RParen)?;
            Ok(MAtom::Sat(Term::Const(w), term_of_bunch(&b)))
        }
        (Tok::Ident(w), Tok::Colon, _) => {
            c.bump();
            c.bump();
            let f = fp.imp(c)?;
            Ok(MAtom::Sat(Term::Const(w), term_of_formula(&f)))
        }
        (Tok::Ident(x), Tok::Ident(r), Tok::Ident(y)) if r.starts_with(|ch: char| ch.is_ascii_uppercase()) => {
            c.bump();
            c.bump();
            c.bump();
            Ok(MAtom::Rel(r, Term::Const(x), Term::Const(y)))
        }
        _ => syntax(c.offset(), format!("expected `w: φ`, `(w: Γ)` or `x R y`, found {}", c.peek().describe())),
    }
}

fn labelled_side(c: &mut Cursor, alpha: &Alphabet) -> Result<Vec<MAtom>> {
    let mut out = Vec::new();
    if matches!(c.peek(), Tok::Turnstile | Tok::Eof) {
        return Ok(out);
    }
    out.push(labelled_item(c, alpha)?);
    while c.eat(&Tok::Comma) {
        out.push(labelled_item(c, alpha)?);
    }
    Ok(out)
}

/// `w: p & q, (w: r, s), w R u |- w: p`
pub fn parse_labelled_sequent(text: &str) -> Result<LSeq> {
    let alpha = Alphabet::all();
    let mut c = Cursor::new(text)?;
    let ante = labelled_side(&mut c, &alpha)?;
    c.expect(&Tok::Turnstile)?;
    let succ = labelled_side(&mut c, &alpha)?;
    c.expect_eof()?;
    Ok(LSeq { ante, succ })
}

/// Rewrites `¬φ` as `φ → ⊥` (the IPL calculi have no negation rules).
pub fn negation_as_implication(s: &LSeq) -> LSeq {
    fn t(x: &Term) -> Term {
        match x {
            Term::App(op, a) if op == "not" && a.len() == 1 => Term::app("imp", vec![t(&a[0]), Term::app("bot", vec![])]),
            Term::App(op, a) => Term::App(op.clone(), a.iter().map(t).collect()),
            _ => x.clone(),
        }
    }
    let m = |v: &[MAtom]| v.iter().map(|a| a.map_terms(&t)).collect();
    LSeq::new(m(&s.ante), m(&s.succ))
}

#[derive(Debug, Clone, Default)]
struct Binding {
    terms: BTreeMap<String, Term>,
    atoms: BTreeMap<String, MAtom>,
}

fn match_term(p: &Term, g: &Term, b: &mut Binding) -> bool {
    match p {
        Term::Var(v) => match b.terms.get(v) {
            Some(t) => t == g,
            None => {
                b.terms.insert(v.clone(), g.clone());
                true
            }
        },
        Term::Const(_) => p == g,
        Term::App(op, xs) => match g {
            Term::App(op2, ys) if op == op2 && xs.len() == ys.len() => {
                xs.iter().zip(ys).all(|(x, y)| match_term(x, y, b))
            }
            _ => false,
        },
    }
}

fn match_atom(p: &MAtom, g: &MAtom, b: &mut Binding) -> bool {
    match (p, g) {
        (MAtom::Any(n), _) => match b.atoms.get(n) {
            Some(a) => a == g,
            None => {
                b.atoms.insert(n.clone(), g.clone());
                true
            }
        },
        (MAtom::Sat(w, f), MAtom::Sat(v, h)) => match_term(w, v, b) && match_term(f, h, b),
        (MAtom::Rel(r, x, y), MAtom::Rel(s, u, v)) => r == s && match_term(x, u, b) && match_term(y, v, b),
        (MAtom::Pred(p, xs), MAtom::Pred(q, ys)) => {
            p == q && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| match_term(x, y, b))
        }
        (MAtom::Bot, MAtom::Bot) => true,
        _ => false,
    }
}

fn inst_atom(a: &MAtom, b: &Binding) -> MAtom {
    match a {
        MAtom::Any(n) => b.atoms[n].clone(),
        _ => a.subst(&b.terms),
    }
}

fn rename_worlds(a: &MAtom, from: &Term, to: &Term) -> MAtom {
    let r = |t: &Term| if t == from { to.clone() } else { t.clone() };
    match a {
        MAtom::Sat(w, f) => MAtom::Sat(r(w), f.clone()),
        MAtom::Rel(n, x, y) => MAtom::Rel(n.clone(), r(x), r(y)),
        _ => a.clone(),
    }
}

#[derive(Debug, Clone)]
struct Instance {
    b: Binding,
    used_ante: Vec<usize>,
    used_succ: Vec<usize>,
}

fn assign(pats: &[MAtom], side: &[MAtom], used: &mut Vec<usize>, b: Binding, k: &mut dyn FnMut(Binding, &[usize])) {
    let Some((p, rest)) = pats.split_first() else {
        k(b, used);
        return;
    };
    for (i, g) in side.iter().enumerate() {
        if used.contains(&i) {
            continue;
        }
        let mut b2 = b.clone();
        if match_atom(p, g, &mut b2) {
            used.push(i);
            assign(rest, side, used, b2, k);
            used.pop();
        }
    }
}

fn in_world_position(r: &LRule, v: &str) -> bool {
    let is = |t: &Term| matches!(t, Term::Var(x) if x == v);
    r.premises.iter().any(|p| {
        p.ante.iter().chain(&p.succ).any(|a| a.worlds().into_iter().any(is))
            || [&p.pi, &p.sigma].iter().any(|c| matches!(c, Ctx::Rename(x, y) if is(x) || is(y)))
    })
}

fn instances(r: &LRule, s: &LSeq) -> Vec<Instance> {
    let mut matched = Vec::new();
    assign(&r.conclusion.ante, &s.ante, &mut Vec::new(), Binding::default(), &mut |b, ua| {
        let ua = ua.to_vec();
        assign(&r.conclusion.succ, &s.succ, &mut Vec::new(), b, &mut |b2, us| {
            matched.push(Instance {
                b: b2,
                used_ante: ua.clone(),
                used_succ: us.to_vec(),
            })
        })
    });
    if r.occurs.is_empty() && r.fresh.is_empty() {
        return matched;
    }
    let worlds: Vec<Term> = s.worlds().into_iter().collect();
    let mut all_terms: Vec<Term> = Vec::new();
    for a in s.ante.iter().chain(&s.succ) {
        let mut v = Vec::new();
        for t in a.terms() {
            t.subterms(&mut v);
        }
        for t in v {
            if !all_terms.contains(t) {
                all_terms.push(t.clone());
            }
        }
    }
    let mut names = s.names();
    let mut out = Vec::new();
    for m in matched {
        let mut partial = vec![m];
        for v in &r.occurs {
            if partial[0].b.terms.contains_key(v) {
                continue;
            }
            let cands = if in_world_position(r, v) { &worlds } else { &all_terms };
            partial = partial
                .into_iter()
                .flat_map(|p| {
                    cands.iter().map(move |t| {
                        let mut q = p.clone();
                        q.b.terms.insert(v.clone(), t.clone());
                        q
                    })
                })
                .collect();
        }
        for p in partial.iter_mut() {
            for v in &r.fresh {
                let base: String = v.chars().filter(|c| c.is_alphanumeric()).collect();
                let base = if base.is_empty() { "w".to_string() } else { base.to_lowercase() };
                let mut k = 1;
                while names.contains(&format!("{base}{k}")) {
                    k += 1;
                }
                let n = format!("{base}{k}");
                p.b.terms.insert(v.clone(), Term::Const(n.clone()));
                names.insert(n);
            }
            names = s.names();
        }
        out.extend(partial);
    }
    out
}

fn build(p: &MetaSeq, i: &Instance, s: &LSeq) -> LSeq {
    let rest = |side: &[MAtom], used: &[usize], c: &Ctx| -> Vec<MAtom> {
        let kept = side.iter().enumerate().filter(|(k, _)| !used.contains(k)).map(|(_, a)| a);
        match c {
            Ctx::Keep => kept.cloned().collect(),
            Ctx::Drop => vec![],
            Ctx::Rename(x, y) => {
                let (x, y) = (x.subst(&i.b.terms), y.subst(&i.b.terms));
                kept.map(|a| rename_worlds(a, &x, &y)).collect()
            }
        }
    };
    let mut ante: Vec<MAtom> = p.ante.iter().map(|a| inst_atom(a, &i.b)).collect();
    ante.extend(rest(&s.ante, &i.used_ante, &p.pi));
    let mut succ = rest(&s.succ, &i.used_succ, &p.sigma);
    succ.extend(p.succ.iter().map(|a| inst_atom(a, &i.b)));
    LSeq { ante, succ }
}

/// Whether every atom `p` adds to `s` already occurred on the same side of the branch.
fn seen_on_branch(p: &LSeq, s: &LSeq, hist: &[Key]) -> bool {
    let old = |a: &MAtom, left: bool| hist.iter().any(|(l, r)| if left { l.contains(a) } else { r.contains(a) });
    p.ante.iter().filter(|a| !s.ante.contains(a)).all(|a| old(a, true))
        && p.succ.iter().filter(|a| !s.succ.contains(a)).all(|a| old(a, false))
}

/// Nodes visited before a search gives up.
pub const NODE_LIMIT: usize = 2_000_000;

struct Search<'a> {
    axioms: Vec<&'a LRule>,
    eager: Vec<&'a LRule>,
    choice: Vec<&'a LRule>,
    contract: Option<(&'a str, bool, bool)>,
    nodes: Cell<usize>,
}

type Key = (Vec<MAtom>, Vec<MAtom>);

impl<'a> Search<'a> {
    fn new(calc: &'a LabelledCalculus) -> Search<'a> {
        let mut s = Search {
            axioms: vec![],
            eager: vec![],
            choice: vec![],
            contract: None,
            nodes: Cell::new(0),
        };
        for r in &calc.rules {
            if let Some(left) = r.contraction_side() {
                let (name, l, rt) = s.contract.unwrap_or((r.name.as_str(), false, false));
                s.contract = Some((name, l || left, rt || !left));
            } else if r.is_axiom() {
                s.axioms.push(r);
            } else if r.invertible || r.is_monotone() {
                s.eager.push(r);
            } else {
                s.choice.push(r);
            }
        }
        s
    }

    fn all(&self, prems: &[LSeq], depth: usize, hist: &mut Vec<Key>) -> Option<Vec<LProof>> {
        prems.iter().map(|p| self.prove(p, depth, hist)).collect()
    }

    fn prove(&self, s: &LSeq, depth: usize, hist: &mut Vec<Key>) -> Option<LProof> {
        self.nodes.set(self.nodes.get() + 1);
        if self.nodes.get() > NODE_LIMIT {
            return None;
        }
        let leaf = |rule: &str| LProof {
            sequent: s.clone(),
            rule: rule.to_string(),
            children: vec![],
        };
        for r in &self.axioms {
            if !instances(r, s).is_empty() {
                return Some(leaf(&r.name));
            }
        }
        let key = s.key();
        if hist.contains(&key) {
            return None;
        }
        hist.push(key.clone());
        let out = self.step(s, &key, depth, hist);
        hist.pop();
        out
    }

    fn step(&self, s: &LSeq, key: &Key, depth: usize, hist: &mut Vec<Key>) -> Option<LProof> {
        for r in &self.eager {
            for i in instances(r, s) {
                let prems: Vec<LSeq> = r.premises.iter().map(|p| build(p, &i, s)).collect();
                if prems.iter().any(|p| p.key() == *key) {
                    continue;
                }
                // A rule that keeps its principal may only add what the branch has not had.
                if r.is_monotone() && prems.iter().all(|p| seen_on_branch(p, s, hist)) {
                    continue;
                }
                let children = self.all(&prems, depth, hist)?;
                return Some(LProof {
                    sequent: s.clone(),
                    rule: r.name.clone(),
                    children,
                });
            }
        }
        if depth == 0 {
            return None;
        }
        for r in &self.choice {
            for i in instances(r, s) {
                let mut prems: Vec<LSeq> = r.premises.iter().map(|p| build(p, &i, s)).collect();
                let mut dup_ante = Vec::new();
                let mut dup_succ = Vec::new();
                if let Some((_, left, right)) = self.contract {
                    for p in prems.iter_mut() {
                        for &k in &i.used_ante {
                            if left && !p.ante.contains(&s.ante[k]) {
                                p.ante.insert(0, s.ante[k].clone());
                                if !dup_ante.contains(&k) {
                                    dup_ante.push(k);
                                }
                            }
                        }
                        for &k in &i.used_succ {
                            if right && !p.succ.contains(&s.succ[k]) {
                                p.succ.push(s.succ[k].clone());
                                if !dup_succ.contains(&k) {
                                    dup_succ.push(k);
                                }
                            }
                        }
                    }
                }
                if prems.iter().any(|p| p.key() == *key) {
                    continue;
                }
                let Some(children) = self.all(&prems, depth - 1, hist) else {
                    continue;
                };
                return Some(self.wrap_contractions(s, &dup_ante, &dup_succ, r, &i, children));
            }
        }
        None
    }

    /// The rule node, below one contraction node per duplicated principal atom.
    fn wrap_contractions(&self, s: &LSeq, dup_ante: &[usize], dup_succ: &[usize], r: &LRule, i: &Instance, children: Vec<LProof>) -> LProof {
        let mut chain = vec![s.clone()];
        let mut cur = s.clone();
        for &k in dup_ante {
            cur.ante.insert(k + 1, s.ante[k].clone());
            chain.push(cur.clone());
        }
        for &k in dup_succ {
            cur.succ.push(s.succ[k].clone());
            chain.push(cur.clone());
        }
        let _ = i;
        let mut node = LProof {
            sequent: chain.pop().unwrap(),
            rule: r.name.clone(),
            children,
        };
        let cname = self.contract.map(|c| c.0).unwrap_or("c");
        while let Some(seq) = chain.pop() {
            node = LProof {
                sequent: seq,
                rule: cname.to_string(),
                children: vec![node],
            };
        }
        node
    }
}

/// Depth-bounded backward search. Rules marked invertible, and rules whose premises
/// only add to the conclusion, are applied without backtracking; the others are choice
/// points and cost one unit of depth. Contraction, when the calculus has it, is applied
/// to the principal atoms of a choice step. Repeated sequents on a branch are cut.
pub fn prove_labelled(calc: &LabelledCalculus, goal: &LSeq, depth: usize) -> Option<LProof> {
    Search::new(calc).prove(goal, depth, &mut Vec::new())
}

/// Checks that every node is an instance of its rule (contraction nodes duplicate one atom).
pub fn check_labelled_proof(calc: &LabelledCalculus, p: &LProof) -> bool {
    let Some(r) = calc.rule(&p.rule) else {
        return false;
    };
    let same = |a: &LSeq, b: &LSeq| {
        let sort = |v: &[MAtom]| {
            let mut v = v.to_vec();
            v.sort();
            v
        };
        sort(&a.ante) == sort(&b.ante) && sort(&a.succ) == sort(&b.succ)
    };
    let kids: Vec<&LSeq> = p.children.iter().map(|c| &c.sequent).collect();
    let ok = instances(r, &p.sequent).iter().any(|i| {
        let prems: Vec<LSeq> = r.premises.iter().map(|q| build(q, i, &p.sequent)).collect();
        prems.len() == kids.len() && prems.iter().zip(&kids).all(|(a, b)| same(a, b))
    });
    ok && p.children.iter().all(|c| check_labelled_proof(calc, c))
}

/// The goal, checked to be a sequent of `(w : Γ)` atoms at one world, with RJ+.
pub fn to_rjplus(goal: &LSeq) -> Result<(LSeq, LabelledCalculus)> {
    let worlds = goal.worlds();
    if worlds.len() > 1 {
        return Err(Error::Invalid(format!("goal `{goal}` mentions more than one world")));
    }
    if let Some(a) = goal.ante.iter().chain(&goal.succ).find(|a| !matches!(a, MAtom::Sat(..))) {
        return Err(Error::Invalid(format!("`{a}` is not a satisfaction atom")));
    }
    let calc = builtin_calculus("rjplus").expect("bundled");
    Ok((negation_as_implication(goal), calc))
}

/// Connected components of atoms linked by shared world terms.
pub fn check_world_independence_partition(ante: &[MAtom], succ: &[MAtom]) -> Vec<LSeq> {
    let atoms: Vec<(bool, &MAtom)> = ante.iter().map(|a| (true, a)).chain(succ.iter().map(|a| (false, a))).collect();
    let n = atoms.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let mut owner: BTreeMap<Term, usize> = BTreeMap::new();
    for (i, (_, a)) in atoms.iter().enumerate() {
        for w in a.worlds() {
            match owner.get(w) {
                Some(&j) => {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    parent[ri] = rj;
                }
                None => {
                    owner.insert(w.clone(), i);
                }
            }
        }
    }
    let mut order: Vec<usize> = Vec::new();
    let mut comps: BTreeMap<usize, LSeq> = BTreeMap::new();
    for (i, (left, a)) in atoms.iter().enumerate() {
        let r = find(&mut parent, i);
        if !comps.contains_key(&r) {
            order.push(r);
        }
        let c = comps.entry(r).or_insert_with(|| LSeq::new(vec![], vec![]));
        if *left {
            c.ante.push((*a).clone());
        } else {
            c.succ.push((*a).clone());
        }
    }
    order.into_iter().map(|r| comps.remove(&r).unwrap()).collect()
}
