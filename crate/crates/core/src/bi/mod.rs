//! Resource distribution via Boolean constraints for BI.

mod check;
mod rules;

use std::fmt;

use crate::boolean::{eval_constraint, eval_expr, solve, BoolExpr, Constraint, Interpretation};
use crate::error::{Error, Result};
use crate::syntax::{Bunch, Ctor, Formula, Sequent};
use crate::tree::{Proof, Reduction};

pub use check::{check_lbi_proof, check_lbi_proof_diag};
pub use rules::{complete, prove_bi, reduce_lbib, Lbib, ProveOutcome};

/// Bunch whose every node carries a Boolean label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LBunch {
    pub label: BoolExpr,
    pub node: LNode,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LNode {
    Formula(Formula),
    Unit(Ctor),
    Node(Ctor, Vec<LBunch>),
}

impl LBunch {
    pub fn new(label: BoolExpr, node: LNode) -> LBunch {
        LBunch { label, node }
    }

    pub fn formula(f: Formula, label: BoolExpr) -> LBunch {
        LBunch::new(label, LNode::Formula(f))
    }

    pub fn unit(c: Ctor) -> LBunch {
        LBunch::new(BoolExpr::One, LNode::Unit(c))
    }

    /// Every label 1.
    pub fn lift(b: &Bunch) -> LBunch {
        let node = match b {
            Bunch::Formula(f) => LNode::Formula(f.clone()),
            Bunch::Unit(c) => LNode::Unit(*c),
            Bunch::Node(c, kids) => LNode::Node(*c, kids.iter().map(LBunch::lift).collect()),
        };
        LBunch::new(BoolExpr::One, node).norm()
    }

    pub fn relabel(&self, extra: &BoolExpr) -> LBunch {
        LBunch::new(BoolExpr::prod(self.label.clone(), extra.clone()), self.node.clone())
    }

    /// Order-preserving normalization: flatten same-constructor nesting (pushing
    /// labels down), drop same-constructor units, collapse singleton nodes.
    pub fn norm(&self) -> LBunch {
        match &self.node {
            LNode::Node(c, kids) => {
                let mut flat = Vec::new();
                for k in kids {
                    let k = k.norm();
                    match k.node {
                        LNode::Unit(u) if u == *c => {}
                        LNode::Node(d, inner) if d == *c => {
                            flat.extend(inner.into_iter().map(|g| g.relabel_front(&k.label)))
                        }
                        _ => flat.push(k),
                    }
                }
                match flat.len() {
                    0 => LBunch::new(self.label.clone(), LNode::Unit(*c)),
                    1 => flat.pop().unwrap().relabel_front(&self.label),
                    _ => LBunch::new(self.label.clone(), LNode::Node(*c, flat)),
                }
            }
            _ => self.clone(),
        }
    }

    fn relabel_front(&self, outer: &BoolExpr) -> LBunch {
        LBunch::new(BoolExpr::prod(outer.clone(), self.label.clone()), self.node.clone())
    }

    pub fn get(&self, path: &[usize]) -> Option<&LBunch> {
        match path.split_first() {
            None => Some(self),
            Some((i, rest)) => match &self.node {
                LNode::Node(_, kids) => kids.get(*i)?.get(rest),
                _ => None,
            },
        }
    }

    /// Product of labels from the root down to `path`, inclusive.
    pub fn effective(&self, path: &[usize]) -> BoolExpr {
        let mut e = self.label.clone();
        let mut cur = self;
        for &i in path {
            if let LNode::Node(_, kids) = &cur.node {
                cur = &kids[i];
                e = BoolExpr::prod(e, cur.label.clone());
            }
        }
        e
    }

    pub fn replace(&self, path: &[usize], new: LBunch) -> LBunch {
        match path.split_first() {
            None => new,
            Some((i, rest)) => match &self.node {
                LNode::Node(c, kids) => {
                    let mut kids = kids.clone();
                    kids[*i] = kids[*i].replace(rest, new);
                    LBunch::new(self.label.clone(), LNode::Node(*c, kids))
                }
                _ => self.clone(),
            },
        }
    }

    /// Paths and nodes, pre-order.
    pub fn positions(&self) -> Vec<(Vec<usize>, &LBunch)> {
        let mut out = vec![(vec![], self)];
        if let LNode::Node(_, kids) = &self.node {
            for (i, k) in kids.iter().enumerate() {
                for (mut p, b) in k.positions() {
                    p.insert(0, i);
                    out.push((p, b));
                }
            }
        }
        out
    }

    /// Top-level multiplicative items with the root label pushed in.
    pub fn items(&self) -> Vec<LBunch> {
        match &self.node {
            LNode::Node(Ctor::Mul, kids) => kids.iter().map(|k| k.relabel_front(&self.label)).collect(),
            _ => vec![self.clone()],
        }
    }

    pub fn from_items(items: Vec<LBunch>) -> LBunch {
        LBunch::new(BoolExpr::One, LNode::Node(Ctor::Mul, items)).norm()
    }

    /// Plain bunch, labels forgotten.
    pub fn erase(&self) -> Bunch {
        match &self.node {
            LNode::Formula(f) => Bunch::Formula(f.clone()),
            LNode::Unit(c) => Bunch::Unit(*c),
            LNode::Node(c, kids) => Bunch::Node(*c, kids.iter().map(|k| k.erase()).collect()),
        }
    }

    pub fn labels(&self) -> Vec<&BoolExpr> {
        let mut v = vec![&self.label];
        if let LNode::Node(_, kids) = &self.node {
            for k in kids {
                v.extend(k.labels());
            }
        }
        v
    }
}

impl fmt::Display for LBunch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn lab(f: &mut fmt::Formatter<'_>, e: &BoolExpr) -> fmt::Result {
            match e {
                BoolExpr::One => Ok(()),
                BoolExpr::Var(_) | BoolExpr::Zero => write!(f, "·{e}"),
                BoolExpr::Not(x) if matches!(**x, BoolExpr::Var(_)) => write!(f, "·{e}"),
                _ => write!(f, "·({e})"),
            }
        }
        fn inner(f: &mut fmt::Formatter<'_>, b: &LBunch, top: bool) -> fmt::Result {
            match &b.node {
                LNode::Formula(x) => {
                    if b.label != BoolExpr::One && x.children().len() == 2 {
                        write!(f, "({x})")?;
                    } else {
                        write!(f, "{x}")?;
                    }
                }
                LNode::Unit(c) => write!(f, "{}", c.unit())?,
                LNode::Node(c, kids) => {
                    let paren = !top || b.label != BoolExpr::One;
                    if paren {
                        write!(f, "(")?;
                    }
                    for (i, k) in kids.iter().enumerate() {
                        if i > 0 {
                            write!(f, " {} ", c.sep())?;
                        }
                        inner(f, k, false)?;
                    }
                    if paren {
                        write!(f, ")")?;
                    }
                }
            }
            lab(f, &b.label)
        }
        inner(f, self, true)
    }
}

/// Number of top-level multiplicative positions of a bunch.
pub fn positions_count(b: &Bunch) -> usize {
    match b {
        Bunch::Node(Ctor::Mul, kids) => kids.iter().map(positions_count).sum(),
        _ => 1,
    }
}

/// Distributes `labels` over the top-level multiplicative positions of `b`.
pub fn annotate(b: &Bunch, labels: &[BoolExpr]) -> Result<LBunch> {
    let need = positions_count(b);
    if need != labels.len() {
        return Err(Error::LabelCount {
            expected: need,
            found: labels.len(),
        });
    }
    fn go(b: &Bunch, labels: &mut std::slice::Iter<'_, BoolExpr>) -> LBunch {
        match b {
            Bunch::Node(Ctor::Mul, kids) => LBunch::new(
                BoolExpr::One,
                LNode::Node(Ctor::Mul, kids.iter().map(|k| go(k, labels)).collect()),
            ),
            other => {
                let mut l = LBunch::lift(other);
                l.label = BoolExpr::prod(labels.next().unwrap().clone(), l.label);
                l
            }
        }
    }
    Ok(go(b, &mut labels.iter()))
}

/// LBI_B sequent: labelled antecedent, succedent formula (its label is always 1).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ESequent {
    pub ante: LBunch,
    pub succ: Formula,
}

impl ESequent {
    pub fn lift(s: &Sequent) -> Result<ESequent> {
        let succ = s
            .succ
            .normalize()
            .as_formula()
            .cloned()
            .ok_or_else(|| Error::Invalid(format!("succedent of a BI sequent must be a formula: {}", s.succ)))?;
        Ok(ESequent {
            ante: LBunch::lift(&s.ante),
            succ,
        })
    }
}

impl fmt::Display for ESequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} |- {}", self.ante, self.succ)
    }
}

pub type BiReduction = Reduction<ESequent>;

/// Same-constructor units dropped, nesting flattened, order kept.
pub fn unit_normalize(b: &Bunch) -> Bunch {
    match b {
        Bunch::Node(c, kids) => {
            let mut flat = Vec::new();
            for k in kids {
                match unit_normalize(k) {
                    Bunch::Unit(u) if u == *c => {}
                    Bunch::Node(d, inner) if d == *c => flat.extend(inner),
                    n => flat.push(n),
                }
            }
            match flat.len() {
                0 => Bunch::Unit(*c),
                1 => flat.pop().unwrap(),
                _ => Bunch::Node(*c, flat),
            }
        }
        b => b.clone(),
    }
}

/// ν_I on a labelled bunch: 0-labelled nodes become the enclosing unit.
pub fn valuate_bunch(b: &LBunch, i: &Interpretation) -> Result<Bunch> {
    fn go(b: &LBunch, parent: Ctor, i: &Interpretation) -> Result<Bunch> {
        if !eval_expr(&b.label, i)? {
            return Ok(Bunch::Unit(parent));
        }
        Ok(match &b.node {
            LNode::Formula(f) => Bunch::Formula(f.clone()),
            LNode::Unit(c) => Bunch::Unit(*c),
            LNode::Node(c, kids) => {
                Bunch::Node(*c, kids.iter().map(|k| go(k, *c, i)).collect::<Result<_>>()?)
            }
        })
    }
    Ok(unit_normalize(&go(b, Ctor::Mul, i)?))
}

pub fn valuate_sequent(s: &ESequent, i: &Interpretation) -> Result<Sequent> {
    Ok(Sequent::new(valuate_bunch(&s.ante, i)?, Bunch::Formula(s.succ.clone())))
}

/// Interpretation solving the side-conditions of a closed reduction.
pub fn coherence(r: &BiReduction) -> Result<Option<Interpretation>> {
    if let Some(s) = r.open_leaf() {
        return Err(Error::OpenLeaf(s.to_string()));
    }
    let cs: Vec<Constraint> = r.constraints().into_iter().cloned().collect();
    Ok(solve(&cs))
}

/// ν_I on a reduction: constraint leaves removed, vacuous inferences collapsed.
pub fn valuate(r: &BiReduction, i: &Interpretation) -> Result<Proof<Sequent>> {
    for c in r.constraints() {
        if !eval_constraint(c, i)? {
            return Err(Error::Unsatisfied);
        }
    }
    fn go(r: &BiReduction, i: &Interpretation) -> Result<Proof<Sequent>> {
        match r {
            Reduction::Step { seq, rule, .. } => {
                let concl = valuate_sequent(seq, i)?;
                let prems = r
                    .premises()
                    .into_iter()
                    .map(|p| go(p, i))
                    .collect::<Result<Vec<_>>>()?;
                if prems.len() == 1 && prems[0].conclusion.equiv(&concl) {
                    return Ok(prems.into_iter().next().unwrap());
                }
                Ok(Proof::new(concl, rule, prems))
            }
            Reduction::Open(s) => Err(Error::OpenLeaf(s.to_string())),
            Reduction::Side(_) => Err(Error::Invalid("constraint at a sequent position".into())),
        }
    }
    go(r, i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolean::var;
    use crate::syntax::{parse_bunch, Alphabet};

    fn pb(s: &str) -> Bunch {
        parse_bunch(s, &Alphabet::bi()).unwrap()
    }

    #[test]
    fn annotate_examples() {
        let l = annotate(&pb("p , (q ; r)"), &[var("x"), var("y")]).unwrap();
        assert_eq!(l.to_string(), "p·x , (q ; r)·y");
        assert_eq!(annotate(&pb("p"), &[BoolExpr::One]).unwrap().to_string(), "p");
        assert_eq!(annotate(&pb("p ; q"), &[var("x")]).unwrap().to_string(), "(p ; q)·x");
        assert_eq!(
            annotate(&pb("p , q"), &[var("x")]),
            Err(Error::LabelCount { expected: 2, found: 1 })
        );
        let nested = annotate(&pb("p , (q , r)"), &[var("a"), var("b"), var("c")]).unwrap();
        assert_eq!(nested.norm().to_string(), "p·a , q·b , r·c");
    }

    #[test]
    fn erased_context_valuation() {
        let s = ESequent {
            ante: annotate(&pb("p , q"), &[var("y"), var("v")]).unwrap(),
            succ: crate::syntax::atom("p"),
        };
        let i: Interpretation = [(crate::boolean::Var("y".into()), true), (crate::boolean::Var("v".into()), false)].into();
        assert_eq!(valuate_sequent(&s, &i).unwrap().to_string(), "p |- p");
    }

    #[test]
    fn zero_label_in_additive_becomes_additive_unit() {
        let b = LBunch::new(
            BoolExpr::One,
            LNode::Node(
                Ctor::Add,
                vec![
                    LBunch::formula(crate::syntax::atom("p"), BoolExpr::Zero),
                    LBunch::formula(crate::syntax::atom("q"), BoolExpr::One),
                ],
            ),
        );
        assert_eq!(valuate_bunch(&b, &Interpretation::new()).unwrap(), pb("q"));
        let all_gone = b.relabel(&BoolExpr::Zero);
        assert_eq!(valuate_bunch(&all_gone, &Interpretation::new()).unwrap(), Bunch::Unit(Ctor::Mul));
    }

    #[test]
    fn norm_pushes_labels() {
        let inner = LBunch::new(
            var("a"),
            LNode::Node(
                Ctor::Mul,
                vec![LBunch::formula(crate::syntax::atom("q"), var("b")), LBunch::unit(Ctor::Mul)],
            ),
        );
        let b = LBunch::new(
            BoolExpr::One,
            LNode::Node(Ctor::Mul, vec![LBunch::formula(crate::syntax::atom("p"), BoolExpr::One), inner]),
        );
        assert_eq!(b.norm().to_string(), "p , q·(a*b)");
    }
}
