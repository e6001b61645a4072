//! IPL through classical combinatorics: the LK+⊕B constraint system, the
//! choice ergo, and instance checkers for LJ+ and LJ.

use std::cell::{Cell, RefCell};
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::boolean::{eval_constraint, eval_expr, BoolExpr, Constraint, Interpretation, Var};
use crate::engine::{stream, Step, System};
use crate::error::{Error, Result};
use crate::syntax::{Bunch, Ctor, Formula, Sequent};
use crate::tree::{Proof, Reduction};

/// Plain multi-succedent sequent: `,`-multiset ▷ `;`-multiset.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LjSeq {
    pub ante: Vec<Formula>,
    pub succ: Vec<Formula>,
}

fn sorted(v: &[Formula]) -> Vec<Formula> {
    let mut v = v.to_vec();
    v.sort();
    v
}

fn remove_one(v: &[Formula], f: &Formula) -> Option<Vec<Formula>> {
    let i = v.iter().position(|g| g == f)?;
    let mut out = v.to_vec();
    out.remove(i);
    Some(out)
}

fn with(v: &[Formula], extra: &[&Formula]) -> Vec<Formula> {
    let mut out = v.to_vec();
    out.extend(extra.iter().map(|f| (*f).clone()));
    out
}

fn same(a: &[Formula], b: &[Formula]) -> bool {
    a.len() == b.len() && sorted(a) == sorted(b)
}

impl LjSeq {
    pub fn new(ante: Vec<Formula>, succ: Vec<Formula>) -> LjSeq {
        LjSeq { ante, succ }
    }

    /// Reads both sides as flat lists of formulas; units vanish.
    pub fn from_sequent(s: &Sequent) -> LjSeq {
        LjSeq {
            ante: s.ante.formulas().into_iter().cloned().collect(),
            succ: s.succ.formulas().into_iter().cloned().collect(),
        }
    }

    pub fn to_sequent(&self) -> Sequent {
        let side = |v: &[Formula], c: Ctor| match v.len() {
            0 => Bunch::Unit(c),
            1 => Bunch::Formula(v[0].clone()),
            _ => Bunch::Node(c, v.iter().cloned().map(Bunch::Formula).collect()),
        };
        Sequent::new(side(&self.ante, Ctor::Mul), side(&self.succ, Ctor::Add))
    }

    /// Equality up to exchange.
    pub fn equiv(&self, o: &LjSeq) -> bool {
        same(&self.ante, &o.ante) && same(&self.succ, &o.succ)
    }
}

impl fmt::Display for LjSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[Formula], sep: &str| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep);
        let a = join(&self.ante, " , ");
        let s = join(&self.succ, " ; ");
        match (a.is_empty(), s.is_empty()) {
            (true, true) => write!(f, "|-"),
            (true, false) => write!(f, "|- {s}"),
            (false, true) => write!(f, "{a} |-"),
            (false, false) => write!(f, "{a} |- {s}"),
        }
    }
}

pub type Labelled = (Formula, BoolExpr);

/// Enriched LJ sequent: every formula carries a Boolean label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ELjSeq {
    pub ante: Vec<Labelled>,
    pub succ: Vec<Labelled>,
}

impl ELjSeq {
    pub fn lift(s: &LjSeq) -> ELjSeq {
        let one = |v: &[Formula]| v.iter().map(|f| (f.clone(), BoolExpr::One)).collect();
        ELjSeq {
            ante: one(&s.ante),
            succ: one(&s.succ),
        }
    }
}

fn write_labelled(f: &mut fmt::Formatter<'_>, v: &[Labelled], sep: &str) -> fmt::Result {
    for (i, (x, l)) in v.iter().enumerate() {
        if i > 0 {
            write!(f, " {sep} ")?;
        }
        let compound = x.children().len() == 2;
        if compound && *l != BoolExpr::One {
            write!(f, "({x})")?;
        } else {
            write!(f, "{x}")?;
        }
        match l {
            BoolExpr::One => {}
            BoolExpr::Var(_) | BoolExpr::Zero => write!(f, "·{l}")?,
            BoolExpr::Not(y) if matches!(**y, BoolExpr::Var(_)) => write!(f, "·{l}")?,
            _ => write!(f, "·({l})")?,
        }
    }
    Ok(())
}

impl fmt::Display for ELjSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_labelled(f, &self.ante, ",")?;
        if self.ante.is_empty() {
            write!(f, "|-")?;
        } else {
            write!(f, " |-")?;
        }
        if !self.succ.is_empty() {
            write!(f, " ")?;
        }
        write_labelled(f, &self.succ, ";")
    }
}

pub type IplReduction = Reduction<ELjSeq>;

/// σ_I: keep the formulas whose label evaluates to 1.
pub fn choice_ergo(s: &ELjSeq, i: &Interpretation) -> Result<LjSeq> {
    let keep = |v: &[Labelled]| -> Result<Vec<Formula>> {
        let mut out = Vec::new();
        for (f, l) in v {
            if eval_expr(l, i)? {
                out.push(f.clone());
            }
        }
        Ok(out)
    };
    Ok(LjSeq {
        ante: keep(&s.ante)?,
        succ: keep(&s.succ)?,
    })
}

fn eq1(e: &BoolExpr) -> Constraint {
    Constraint::Eq(e.clone(), BoolExpr::One)
}

fn ones(es: &[&BoolExpr]) -> Constraint {
    let v: Vec<Constraint> = es.iter().filter(|e| ***e != BoolExpr::One).map(|e| eq1(e)).collect();
    match v.len() {
        1 => v.into_iter().next().unwrap(),
        _ => Constraint::And(v),
    }
}

/// `f·l` is on the right, possibly already taken apart by ∧R or ∨R.
fn on_right(f: &Formula, l: &BoolExpr, succ: &[Labelled]) -> bool {
    if succ.iter().any(|(g, m)| g == f && m == l) {
        return true;
    }
    match f {
        Formula::And(a, b) => on_right(a, l, succ) || on_right(b, l, succ),
        Formula::Or(a, b) => {
            let ys: BTreeSet<Var> = succ.iter().flat_map(|(_, m)| m.vars()).collect();
            ys.into_iter().any(|y| {
                let y = BoolExpr::Var(y);
                on_right(a, &BoolExpr::prod(l.clone(), y.clone()), succ)
                    && on_right(b, &BoolExpr::prod(l.clone(), BoolExpr::neg(y)), succ)
            })
        }
        _ => false,
    }
}

/// `f` is on the left, possibly already taken apart by ∧L or ∨L.
fn on_left(f: &Formula, ante: &[Labelled]) -> bool {
    ante.iter().any(|(g, _)| g == f)
        || match f {
            Formula::And(a, b) => on_left(a, ante) && on_left(b, ante),
            Formula::Or(a, b) => on_left(a, ante) || on_left(b, ante),
            _ => false,
        }
}

/// The LK+⊕B constraint system.
#[derive(Debug, Default)]
pub struct LkPlusB {
    fresh: Cell<usize>,
}

impl LkPlusB {
    pub fn new() -> LkPlusB {
        LkPlusB::default()
    }

    fn fresh(&self) -> BoolExpr {
        let n = self.fresh.get() + 1;
        self.fresh.set(n);
        BoolExpr::Var(Var(format!("x{n}")))
    }

    fn axioms(&self, s: &ELjSeq) -> Vec<Step<ELjSeq>> {
        let mut out = Vec::new();
        let mut seen = Vec::new();
        for (a, la) in &s.ante {
            for (b, lb) in &s.succ {
                if a == b && !seen.contains(&(la, lb)) {
                    seen.push((la, lb));
                    out.push(Step::new("ax", vec![], vec![ones(&[la, lb])]));
                }
            }
            if *a == Formula::Bot {
                out.push(Step::new("⊥L", vec![], vec![ones(&[la])]));
            }
        }
        for (b, lb) in &s.succ {
            if *b == Formula::Top {
                out.push(Step::new("⊤R", vec![], vec![ones(&[lb])]));
            }
        }
        out
    }

    fn invertible(&self, s: &ELjSeq) -> Option<Step<ELjSeq>> {
        let free = |mut st: Step<ELjSeq>| {
            st.cost = 0;
            Some(st)
        };
        for (i, (f, l)) in s.ante.iter().enumerate() {
            let put = |parts: Vec<&Formula>| {
                let mut t = s.clone();
                t.ante.splice(i..=i, parts.into_iter().map(|g| (g.clone(), l.clone())));
                t
            };
            match f {
                Formula::And(a, b) => return free(Step::new("∧L", vec![put(vec![a, b])], vec![])),
                Formula::Or(a, b) => {
                    let p1 = put(vec![a]);
                    let p2 = put(vec![b]);
                    return free(Step::new("∨L", vec![p1, p2], vec![]));
                }
                _ => {}
            }
        }
        for (j, (f, l)) in s.succ.iter().enumerate() {
            match f {
                Formula::And(a, b) => {
                    let mut p1 = s.clone();
                    p1.succ[j] = ((**a).clone(), l.clone());
                    let mut p2 = s.clone();
                    p2.succ[j] = ((**b).clone(), l.clone());
                    return free(Step::new("∧R", vec![p1, p2], vec![]));
                }
                Formula::Or(a, b) => {
                    let y = self.fresh();
                    let mut p = s.clone();
                    p.succ.splice(
                        j..=j,
                        [
                            ((**a).clone(), BoolExpr::prod(l.clone(), y.clone())),
                            ((**b).clone(), BoolExpr::prod(l.clone(), BoolExpr::neg(y))),
                        ],
                    );
                    return free(Step::new("∨R", vec![p], vec![]));
                }
                _ => {}
            }
        }
        None
    }

    fn right(&self, s: &ELjSeq) -> Vec<Step<ELjSeq>> {
        let mut out = Vec::new();
        for (j, (f, x)) in s.succ.iter().enumerate() {
            let (hyp, concl, rule) = match f {
                Formula::Imp(a, b) => (a, Some(b), "→R"),
                Formula::Not(a) => (a, None, "¬R"),
                _ => continue,
            };
            let y = self.fresh();
            let xy = BoolExpr::prod(x.clone(), y.clone());
            let ny = BoolExpr::neg(y);
            let mut p = s.clone();
            p.ante.push(((**hyp).clone(), xy.clone()));
            let mut succ = Vec::new();
            for (k, (g, l)) in s.succ.iter().enumerate() {
                if k == j {
                    if let Some(b) = concl {
                        succ.push(((**b).clone(), xy.clone()));
                    }
                } else {
                    succ.push((g.clone(), BoolExpr::prod(l.clone(), ny.clone())));
                }
            }
            p.succ = succ;
            out.push(Step::new(rule, vec![p], vec![eq1(&xy)]));
        }
        out
    }

    /// The first left implication or negation whose premisses add something:
    /// its hypothesis is not yet on the right with the same label and its
    /// conclusion not yet on the left. A single occurrence is contracted
    /// first, so the principal survives in the premisses.
    fn left(&self, s: &ELjSeq) -> Option<Step<ELjSeq>> {
        for (i, (f, l)) in s.ante.iter().enumerate() {
            let (hyp, rest) = match f {
                Formula::Imp(a, b) => (a, Some(b)),
                Formula::Not(a) => (a, None),
                _ => continue,
            };
            if on_right(hyp, l, &s.succ) || rest.is_some_and(|b| on_left(b, &s.ante)) {
                continue;
            }
            let free = |mut st: Step<ELjSeq>| {
                st.cost = 0;
                Some(st)
            };
            if s.ante.iter().filter(|g| g.0 == *f).count() == 1 {
                let mut p = s.clone();
                p.ante.insert(i, (f.clone(), l.clone()));
                return free(Step::new("cL", vec![p], vec![]));
            }
            let mut p1 = s.clone();
            p1.ante.remove(i);
            p1.succ.push(((**hyp).clone(), l.clone()));
            return match rest {
                Some(b) => {
                    let mut p2 = s.clone();
                    p2.ante[i] = ((**b).clone(), l.clone());
                    free(Step::new("→L", vec![p1, p2], vec![]))
                }
                None => free(Step::new("¬L", vec![p1], vec![])),
            };
        }
        None
    }
}

impl System for LkPlusB {
    type Seq = ELjSeq;

    fn steps(&self, s: &ELjSeq) -> Vec<Step<ELjSeq>> {
        let mut out = self.axioms(s);
        match self.invertible(s) {
            Some(st) => out.push(st),
            None => match self.left(s) {
                Some(st) => out.push(st),
                None => out.extend(self.right(s)),
            },
        }
        out
    }
}

fn lift_goal(goal: &Sequent) -> ELjSeq {
    ELjSeq::lift(&LjSeq::from_sequent(goal))
}

/// Every closed LK+⊕B reduction of the 1-labelled goal within `depth`.
pub fn reduce_lkplusb(goal: &Sequent, depth: usize) -> Box<dyn Iterator<Item = IplReduction>> {
    stream(Rc::new(LkPlusB::new()), lift_goal(goal), depth)
}

fn multiset_minus(a: &[Formula], b: &[Formula]) -> Vec<Formula> {
    let mut rest = b.to_vec();
    let mut out = Vec::new();
    for f in a {
        match rest.iter().position(|g| g == f) {
            Some(i) => {
                rest.remove(i);
            }
            None => out.push(f.clone()),
        }
    }
    out
}

/// Pointwise σ_I over a reduction. Vacuous inferences collapse; an ∨R whose
/// image keeps a single disjunct is followed by the matching right weakening.
pub fn ergo_reduction(r: &IplReduction, i: &Interpretation) -> Result<Proof<LjSeq>> {
    for c in r.constraints() {
        if !eval_constraint(c, i)? {
            return Err(Error::Unsatisfied);
        }
    }
    fn go(r: &IplReduction, i: &Interpretation) -> Result<Proof<LjSeq>> {
        match r {
            Reduction::Step { seq, rule, .. } => {
                let concl = choice_ergo(seq, i)?;
                let prems = r.premises().into_iter().map(|p| go(p, i)).collect::<Result<Vec<_>>>()?;
                if let Some(k) = prems.iter().position(|p| p.conclusion.equiv(&concl)) {
                    return Ok(prems.into_iter().nth(k).unwrap());
                }
                if rule == "∨R" {
                    let p = &prems[0];
                    let gone = multiset_minus(&concl.succ, &p.conclusion.succ);
                    if let [Formula::Or(a, b)] = gone.as_slice() {
                        let added = multiset_minus(&p.conclusion.succ, &concl.succ);
                        let missing = if added.as_slice() == [(**a).clone()] { b } else { a };
                        if added.len() == 1 {
                            let mut mid = p.conclusion.clone();
                            mid.succ.push((**missing).clone());
                            let w = Proof::new(mid, "wR", prems);
                            return Ok(Proof::new(concl, "∨R", vec![w]));
                        }
                    }
                }
                Ok(Proof::new(concl, rule, prems))
            }
            Reduction::Open(s) => Err(Error::OpenLeaf(s.to_string())),
            Reduction::Side(_) => Err(Error::Invalid("constraint at a sequent position".into())),
        }
    }
    go(r, i)
}

#[derive(Debug, Clone)]
pub struct IplOutcome {
    pub reduction: IplReduction,
    pub interpretation: Interpretation,
    pub proof: Proof<LjSeq>,
}

fn reduction_vars(r: &IplReduction) -> Vec<Var> {
    let mut out = std::collections::BTreeSet::new();
    fn go(r: &IplReduction, out: &mut std::collections::BTreeSet<Var>) {
        match r {
            Reduction::Step { seq, children, .. } => {
                for (_, l) in seq.ante.iter().chain(&seq.succ) {
                    out.extend(l.vars());
                }
                children.iter().for_each(|c| go(c, out));
            }
            Reduction::Open(seq) => {
                for (_, l) in seq.ante.iter().chain(&seq.succ) {
                    out.extend(l.vars());
                }
            }
            Reduction::Side(c) => out.extend(c.vars()),
        }
    }
    go(r, &mut out);
    out.into_iter().collect()
}

/// Extends `i` with 0 for labels the side-conditions leave free.
pub fn complete(r: &IplReduction, mut i: Interpretation) -> Interpretation {
    for v in reduction_vars(r) {
        i.entry(v).or_insert(false);
    }
    i
}

/// First coherent LK+⊕B reduction with its interpretation and LJ+ image.
pub fn prove_ipl(goal: &Sequent, depth: usize) -> Result<Option<IplOutcome>> {
    let search = LiteralSearch {
        sys: LkPlusB::new(),
        failed: RefCell::new(HashMap::new()),
    };
    let mut found = None;
    search.node(&lift_goal(goal), depth, &Assign::new(), &mut |r, a| {
        found = Some((r, a.clone()));
        true
    });
    let Some((reduction, a)) = found else { return Ok(None) };
    let i = complete(&reduction, a.into_iter().map(|(n, b)| (Var(format!("x{n}")), b)).collect());
    let proof = ergo_reduction(&reduction, &i)?;
    Ok(Some(IplOutcome {
        reduction,
        interpretation: i,
        proof,
    }))
}

type Assign = BTreeMap<usize, bool>;

fn var_index(v: &Var) -> usize {
    v.0[1..].parse().expect("search variables are x<n>")
}

/// Literals of a product label; `None` if it contains 0.
fn literals(e: &BoolExpr, out: &mut Vec<(usize, bool)>) -> bool {
    match e {
        BoolExpr::One => true,
        BoolExpr::Zero => false,
        BoolExpr::Var(v) => {
            out.push((var_index(v), true));
            true
        }
        BoolExpr::Not(b) => match &**b {
            BoolExpr::Var(v) => {
                out.push((var_index(v), false));
                true
            }
            BoolExpr::Zero => true,
            BoolExpr::One => false,
            _ => panic!("LK+⊕B labels are products of literals"),
        },
        BoolExpr::Prod(a, b) => literals(a, out) && literals(b, out),
        BoolExpr::Sum(..) => panic!("LK+⊕B labels are products of literals"),
    }
}

fn require(c: &Constraint, a: &mut Assign) -> bool {
    match c {
        Constraint::And(cs) => cs.iter().all(|c| require(c, a)),
        Constraint::Eq(e, BoolExpr::One) => {
            let mut ls = Vec::new();
            literals(e, &mut ls) && ls.into_iter().all(|(v, b)| *a.entry(v).or_insert(b) == b)
        }
        _ => panic!("LK+⊕B side conditions are label = 1"),
    }
}

/// Backward search specialised to literal constraints: the constraint set is
/// a partial assignment. Subgoals that have no solution under an assignment
/// are remembered by their live part, and solutions of a subgoal are only
/// distinguished by what they fix among variables older than the subgoal.
struct LiteralSearch {
    sys: LkPlusB,
    failed: RefCell<HashMap<String, usize>>,
}

type Found<'a> = dyn FnMut(IplReduction, &Assign) -> bool + 'a;
type FoundAll<'a> = dyn FnMut(Vec<IplReduction>, &Assign) -> bool + 'a;

impl LiteralSearch {
    fn key(s: &ELjSeq, a: &Assign) -> String {
        let mut names: HashMap<usize, usize> = HashMap::new();
        let mut out = String::new();
        let mut side = |fs: &[Labelled], out: &mut String| {
            let mut live: Vec<(String, Vec<(usize, bool)>)> = Vec::new();
            for (f, l) in fs {
                let mut ls = Vec::new();
                if !literals(l, &mut ls) || ls.iter().any(|(v, b)| a.get(v).is_some_and(|x| x != b)) {
                    continue;
                }
                ls.retain(|(v, _)| !a.contains_key(v));
                live.push((f.to_string(), ls));
            }
            live.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.len().cmp(&y.1.len())));
            for (f, ls) in live {
                let mut open: Vec<String> = ls
                    .into_iter()
                    .map(|(v, b)| {
                        let n = names.len();
                        let k = *names.entry(v).or_insert(n);
                        format!("{}{k}", if b { "" } else { "~" })
                    })
                    .collect();
                open.sort();
                open.dedup();
                out.push_str(&format!("{f}[{}],", open.join("")));
            }
        };
        side(&s.ante, &mut out);
        out.push('|');
        side(&s.succ, &mut out);
        out
    }

    fn node(&self, s: &ELjSeq, depth: usize, a: &Assign, k: &mut Found) -> bool {
        if depth == 0 {
            return false;
        }
        let key = Self::key(s, a);
        if self.failed.borrow().get(&key).is_some_and(|&d| d >= depth) {
            return false;
        }
        let entry = self.sys.fresh.get();
        let mut any = false;
        let mut seen: HashSet<Vec<(usize, bool)>> = HashSet::new();
        for step in self.sys.steps(s) {
            if step.cost > depth {
                continue;
            }
            let mut a2 = a.clone();
            if !step.side.iter().all(|c| require(c, &mut a2)) {
                continue;
            }
            let Step { rule, premises, side, cost } = step;
            let stop = self.premises(&premises, depth - cost, &a2, Vec::new(), &mut |mut kids, a3| {
                any = true;
                let old: Vec<(usize, bool)> = a3.range(..=entry).map(|(v, b)| (*v, *b)).collect();
                if !seen.insert(old) {
                    return false;
                }
                kids.extend(side.iter().cloned().map(Reduction::Side));
                let r = Reduction::Step {
                    seq: s.clone(),
                    rule: rule.clone(),
                    children: kids,
                };
                k(r, a3)
            });
            if stop {
                return true;
            }
        }
        if !any {
            let mut f = self.failed.borrow_mut();
            let d = f.entry(key).or_insert(0);
            *d = (*d).max(depth);
        }
        false
    }

    fn premises(&self, ps: &[ELjSeq], depth: usize, a: &Assign, acc: Vec<IplReduction>, k: &mut FoundAll) -> bool {
        let Some((first, rest)) = ps.split_first() else {
            return k(acc, a);
        };
        self.node(first, depth, a, &mut |r, a2| {
            let mut acc2 = acc.clone();
            acc2.push(r);
            self.premises(rest, depth, a2, acc2, k)
        })
    }
}

type Check = std::result::Result<(), String>;

fn need(n: usize, ps: &[&LjSeq], rule: &str) -> Check {
    if ps.len() == n {
        Ok(())
    } else {
        Err(format!("{rule} expects {n} premise(s), found {}", ps.len()))
    }
}

fn verdict(ok: bool, rule: &str) -> Check {
    if ok {
        Ok(())
    } else {
        Err(format!("not an instance of {rule}"))
    }
}

fn distinct(v: &[Formula]) -> Vec<&Formula> {
    let mut out: Vec<&Formula> = Vec::new();
    for f in v {
        if !out.contains(&f) {
            out.push(f);
        }
    }
    out
}

fn check_ljplus_node(c: &LjSeq, ps: &[&LjSeq], rule: &str) -> Check {
    let eq = |a: &[Formula], b: &[Formula]| same(a, b);
    let ok = match rule {
        "ax" => {
            need(0, ps, rule)?;
            c.ante.iter().any(|f| c.succ.contains(f))
        }
        "⊥L" => {
            need(0, ps, rule)?;
            c.ante.contains(&Formula::Bot)
        }
        "⊤R" => {
            need(0, ps, rule)?;
            c.succ.contains(&Formula::Top)
        }
        "wL" | "wR" | "cL" | "e" => {
            need(1, ps, rule)?;
            let p = ps[0];
            match rule {
                "wL" => eq(&p.succ, &c.succ) && distinct(&c.ante).iter().any(|f| eq(&p.ante, &remove_one(&c.ante, f).unwrap())),
                "wR" => eq(&p.ante, &c.ante) && distinct(&c.succ).iter().any(|f| eq(&p.succ, &remove_one(&c.succ, f).unwrap())),
                "cL" => eq(&p.succ, &c.succ) && distinct(&c.ante).iter().any(|f| eq(&p.ante, &with(&c.ante, &[f]))),
                _ => p.equiv(c),
            }
        }
        "¬L" => {
            need(1, ps, rule)?;
            distinct(&c.ante).iter().any(|f| match f {
                Formula::Not(a) => {
                    let g = remove_one(&c.ante, f).unwrap();
                    eq(&ps[0].ante, &g) && eq(&ps[0].succ, &with(&c.succ, &[a]))
                }
                _ => false,
            })
        }
        "¬R" => {
            need(1, ps, rule)?;
            c.succ.iter().any(|f| match f {
                Formula::Not(a) => eq(&ps[0].ante, &with(&c.ante, &[a])) && ps[0].succ.is_empty(),
                _ => false,
            })
        }
        "∧L" => {
            need(1, ps, rule)?;
            distinct(&c.ante).iter().any(|f| match f {
                Formula::And(a, b) => {
                    let g = remove_one(&c.ante, f).unwrap();
                    eq(&ps[0].ante, &with(&g, &[a, b])) && eq(&ps[0].succ, &c.succ)
                }
                _ => false,
            })
        }
        "∧R" => {
            need(2, ps, rule)?;
            distinct(&c.succ).iter().any(|f| match f {
                Formula::And(a, b) => {
                    let d = remove_one(&c.succ, f).unwrap();
                    eq(&ps[0].ante, &c.ante)
                        && eq(&ps[1].ante, &c.ante)
                        && eq(&ps[0].succ, &with(&d, &[a]))
                        && eq(&ps[1].succ, &with(&d, &[b]))
                }
                _ => false,
            })
        }
        "∨L" => {
            need(2, ps, rule)?;
            distinct(&c.ante).iter().any(|f| match f {
                Formula::Or(a, b) => {
                    let g = remove_one(&c.ante, f).unwrap();
                    eq(&ps[0].ante, &with(&g, &[a]))
                        && eq(&ps[1].ante, &with(&g, &[b]))
                        && eq(&ps[0].succ, &c.succ)
                        && eq(&ps[1].succ, &c.succ)
                }
                _ => false,
            })
        }
        "∨R" => {
            need(1, ps, rule)?;
            distinct(&c.succ).iter().any(|f| match f {
                Formula::Or(a, b) => {
                    let d = remove_one(&c.succ, f).unwrap();
                    eq(&ps[0].ante, &c.ante) && eq(&ps[0].succ, &with(&d, &[a, b]))
                }
                _ => false,
            })
        }
        "→L" => {
            need(2, ps, rule)?;
            distinct(&c.ante).iter().any(|f| match f {
                Formula::Imp(a, b) => {
                    let g = remove_one(&c.ante, f).unwrap();
                    eq(&ps[0].ante, &g)
                        && eq(&ps[0].succ, &with(&c.succ, &[a]))
                        && eq(&ps[1].ante, &with(&g, &[b]))
                        && eq(&ps[1].succ, &c.succ)
                }
                _ => false,
            })
        }
        "→R" => {
            need(1, ps, rule)?;
            c.succ.iter().any(|f| match f {
                Formula::Imp(a, b) => eq(&ps[0].ante, &with(&c.ante, &[a])) && ps[0].succ == [(**b).clone()],
                _ => false,
            })
        }
        _ => return Err(format!("unknown rule {rule}")),
    };
    verdict(ok, rule)
}

fn check_lj_node(c: &LjSeq, ps: &[&LjSeq], rule: &str) -> Check {
    if c.succ.len() > 1 || ps.iter().any(|p| p.succ.len() > 1) {
        return Err("succedent with more than one formula".into());
    }
    let eq = |a: &[Formula], b: &[Formula]| same(a, b);
    let ok = match rule {
        "ax" => {
            need(0, ps, rule)?;
            c.ante.len() == 1 && c.succ == c.ante
        }
        "wL" | "cL" | "e" => check_ljplus_node(c, ps, rule).is_ok(),
        "wR" => {
            need(1, ps, rule)?;
            c.succ.len() == 1 && ps[0].succ.is_empty() && eq(&ps[0].ante, &c.ante)
        }
        "∧R" | "∨L" | "→R" | "¬R" => check_ljplus_node(c, ps, rule).is_ok(),
        "∧L1" | "∧L2" => {
            need(1, ps, rule)?;
            distinct(&c.ante).iter().any(|f| match f {
                Formula::And(a, b) => {
                    let g = remove_one(&c.ante, f).unwrap();
                    let pick = if rule == "∧L1" { a } else { b };
                    eq(&ps[0].ante, &with(&g, &[pick])) && eq(&ps[0].succ, &c.succ)
                }
                _ => false,
            })
        }
        "∨R1" | "∨R2" => {
            need(1, ps, rule)?;
            match c.succ.as_slice() {
                [Formula::Or(a, b)] => {
                    let pick = if rule == "∨R1" { a } else { b };
                    eq(&ps[0].ante, &c.ante) && ps[0].succ == [(**pick).clone()]
                }
                _ => false,
            }
        }
        "¬L" => {
            need(1, ps, rule)?;
            c.succ.is_empty()
                && distinct(&c.ante).iter().any(|f| match f {
                    Formula::Not(a) => {
                        eq(&ps[0].ante, &remove_one(&c.ante, f).unwrap()) && ps[0].succ == [(**a).clone()]
                    }
                    _ => false,
                })
        }
        "→L" => {
            need(2, ps, rule)?;
            distinct(&c.ante).iter().any(|f| match f {
                Formula::Imp(a, b) => {
                    let g = remove_one(&c.ante, f).unwrap();
                    let Some(g2) = remove_one(&ps[1].ante, b) else { return false };
                    ps[0].succ == [(**a).clone()]
                        && eq(&ps[1].succ, &c.succ)
                        && eq(&g, &with(&ps[0].ante, &g2.iter().collect::<Vec<_>>()))
                }
                _ => false,
            })
        }
        _ => return Err(format!("unknown rule {rule}")),
    };
    verdict(ok, rule)
}

fn diag(p: &Proof<LjSeq>, node: &dyn Fn(&LjSeq, &[&LjSeq], &str) -> Check) -> Option<(Vec<usize>, String)> {
    let ps: Vec<&LjSeq> = p.premises.iter().map(|q| &q.conclusion).collect();
    if let Err(m) = node(&p.conclusion, &ps, &p.rule) {
        return Some((vec![], format!("{}: {m}", p.conclusion)));
    }
    for (i, q) in p.premises.iter().enumerate() {
        if let Some((mut path, m)) = diag(q, node) {
            path.insert(0, i);
            return Some((path, m));
        }
    }
    None
}

pub fn check_ljplus_proof_diag(p: &Proof<LjSeq>) -> Option<(Vec<usize>, String)> {
    diag(p, &check_ljplus_node)
}

pub fn check_ljplus_proof(p: &Proof<LjSeq>) -> bool {
    check_ljplus_proof_diag(p).is_none()
}

pub fn check_lj_proof_diag(p: &Proof<LjSeq>) -> Option<(Vec<usize>, String)> {
    diag(p, &check_lj_node)
}

pub fn check_lj_proof(p: &Proof<LjSeq>) -> bool {
    check_lj_proof_diag(p).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolean::{solve, var};
    use crate::syntax::{parse_formula, parse_sequent, Alphabet};

    fn ps(s: &str) -> Sequent {
        parse_sequent(s, &Alphabet::ipl()).unwrap()
    }

    fn lj(s: &str) -> LjSeq {
        LjSeq::from_sequent(&ps(s))
    }

    #[test]
    fn ergo_examples() {
        let f = |s: &str| parse_formula(s, &Alphabet::ipl()).unwrap();
        let s = ELjSeq {
            ante: vec![(f("r"), BoolExpr::One), (f("p"), var("x"))],
            succ: vec![(f("s"), BoolExpr::neg(var("x"))), (f("q"), var("x"))],
        };
        assert_eq!(s.to_string(), "r , p·x |- s·~x ; q·x");
        let one: Interpretation = [(Var("x".into()), true)].into();
        assert_eq!(choice_ergo(&s, &one).unwrap(), lj("r , p |- q"));
        let zero: Interpretation = [(Var("x".into()), false)].into();
        assert_eq!(choice_ergo(&s, &zero).unwrap(), lj("r |- s"));
        let plain = lj("p , q |- r ; s");
        assert_eq!(choice_ergo(&ELjSeq::lift(&plain), &Interpretation::new()).unwrap(), plain);
        assert!(choice_ergo(&s, &Interpretation::new()).is_err());
    }

    #[test]
    fn identity_implication() {
        let r = reduce_lkplusb(&ps("|- p -> p"), 2).next().unwrap();
        assert_eq!(r.rule(), Some("→R"));
        let out = prove_ipl(&ps("|- p -> p"), 2).unwrap().unwrap();
        assert_eq!(out.proof.rules(), ["→R", "ax"]);
        assert!(check_ljplus_proof(&out.proof));
    }

    #[test]
    fn known_goals() {
        for g in ["p & (p -> q) |- q", "|- ~~(p | ~p)", "p | q |- q | p", "|- (p -> q) -> (~q -> ~p)", "~~~p |- ~p"] {
            let out = prove_ipl(&ps(g), 8).unwrap().unwrap_or_else(|| panic!("{g}"));
            assert!(check_ljplus_proof(&out.proof), "{g}\n{}\n{:?}", out.proof, check_ljplus_proof_diag(&out.proof));
            assert!(out.proof.conclusion.equiv(&lj(g)));
        }
        for g in ["|- p | ~p", "|- ((p -> q) -> p) -> p", "~~p |- p", "|- (~p -> q) -> (p | q)"] {
            assert!(prove_ipl(&ps(g), 8).unwrap().is_none(), "{g}");
        }
    }

    #[test]
    fn excluded_middle_reductions_are_incoherent() {
        let g = ps("|- p | ~p");
        let mut n = 0;
        for r in reduce_lkplusb(&g, 6).take(200) {
            n += 1;
            let cs: Vec<Constraint> = r.constraints().into_iter().cloned().collect();
            assert!(solve(&cs).is_none());
        }
        assert!(n > 0);
    }

    #[test]
    fn ljplus_checker_rejects_classical_implication() {
        let bad = Proof::new(lj("|- p -> q ; p"), "→R", vec![Proof::leaf(lj("p |- q ; p"), "ax")]);
        assert!(!check_ljplus_proof(&bad));
        let good = Proof::new(lj("|- p -> p ; q"), "→R", vec![Proof::leaf(lj("p |- p"), "ax")]);
        assert!(check_ljplus_proof(&good));
    }

    #[test]
    fn lj_checker() {
        assert!(check_lj_proof(&Proof::leaf(lj("p |- p"), "ax")));
        let classical = Proof::new(lj("|- p -> q ; p"), "→R", vec![Proof::leaf(lj("p |- q ; p"), "ax")]);
        assert!(!check_lj_proof(&classical));
        // a -> b , b -> c |- a -> c
        let inner = Proof::new(
            lj("a , a -> b |- b"),
            "→L",
            vec![Proof::leaf(lj("a |- a"), "ax"), Proof::leaf(lj("b |- b"), "ax")],
        );
        let mid = Proof::new(lj("a , a -> b , b -> c |- c"), "→L", vec![inner, Proof::leaf(lj("c |- c"), "ax")]);
        let top = Proof::new(lj("a -> b , b -> c |- a -> c"), "→R", vec![mid]);
        assert!(check_lj_proof(&top), "{:?}", check_lj_proof_diag(&top));
        let wrong = Proof::new(lj("a -> b , b -> c |- a -> c"), "→R", vec![Proof::leaf(lj("a , b -> c |- c"), "ax")]);
        assert_eq!(check_lj_proof_diag(&wrong).unwrap().0, Vec::<usize>::new());
    }
}
