use std::cell::Cell;
use std::collections::BTreeSet;
use std::rc::Rc;

use super::{valuate, BiReduction, ESequent, LBunch, LNode};
use crate::boolean::{solve, BoolExpr, Constraint, Interpretation, Var};
use crate::engine::{dfs, stream, Step, System};
use crate::error::Result;
use crate::syntax::{Ctor, Formula, Sequent};
use crate::tree::{Proof, Reduction};

fn eq1(e: BoolExpr) -> Constraint {
    Constraint::Eq(e, BoolExpr::One)
}

fn eq0(e: BoolExpr) -> Constraint {
    Constraint::Eq(e, BoolExpr::Zero)
}

fn conj(mut v: Vec<Constraint>) -> Constraint {
    if v.len() == 1 {
        v.pop().unwrap()
    } else {
        Constraint::And(v)
    }
}

fn seq(ante: LBunch, succ: Formula) -> ESequent {
    ESequent { ante: ante.norm(), succ }
}

/// The LBI_B constraint system.
#[derive(Debug, Default)]
pub struct Lbib {
    fresh: Cell<usize>,
    /// Allow weakening that does not immediately enable an axiom.
    pub free_weakening: bool,
}

impl Lbib {
    pub fn new() -> Lbib {
        Lbib::default()
    }

    pub fn fresh(&self) -> BoolExpr {
        let n = self.fresh.get() + 1;
        self.fresh.set(n);
        BoolExpr::Var(Var(format!("x{n}")))
    }

    pub fn axioms(&self, s: &ESequent) -> Vec<Step<ESequent>> {
        let mut out = Vec::new();
        let items = s.ante.items();
        let pick = |i: usize| {
            let v = items
                .iter()
                .enumerate()
                .map(|(j, it)| if j == i { eq1(it.label.clone()) } else { eq0(it.label.clone()) })
                .collect();
            conj(v)
        };
        for (i, it) in items.iter().enumerate() {
            if it.node == LNode::Formula(s.succ.clone()) {
                out.push(Step::new("taut", vec![], vec![pick(i)]));
            }
        }
        for (path, b) in s.ante.positions() {
            if b.node == LNode::Formula(Formula::Bot) {
                out.push(Step::new("⊥L", vec![], vec![eq1(s.ante.effective(&path))]));
            }
        }
        if s.succ == Formula::MTop {
            let v = items
                .iter()
                .filter(|it| it.node != LNode::Unit(Ctor::Mul))
                .map(|it| eq0(it.label.clone()))
                .collect();
            out.push(Step::new("⊤*R", vec![], vec![conj(v)]));
        }
        if s.succ == Formula::Top {
            for (i, it) in items.iter().enumerate() {
                if it.node == LNode::Unit(Ctor::Add) {
                    out.push(Step::new("⊤R", vec![], vec![pick(i)]));
                }
            }
        }
        out
    }

    pub fn right(&self, s: &ESequent) -> Vec<Step<ESequent>> {
        let ante = &s.ante;
        match &s.succ {
            Formula::Star(a, b) => {
                let items = ante.items();
                let vs: Vec<BoolExpr> = items.iter().map(|_| self.fresh()).collect();
                let left = items.iter().zip(&vs).map(|(it, v)| it.relabel(v)).collect();
                let right = items.iter().zip(&vs).map(|(it, v)| it.relabel(&BoolExpr::neg(v.clone()))).collect();
                vec![Step::new(
                    "*R",
                    vec![
                        seq(LBunch::from_items(left), (**a).clone()),
                        seq(LBunch::from_items(right), (**b).clone()),
                    ],
                    vec![],
                )]
            }
            Formula::Wand(a, b) => {
                let mut items = ante.items();
                items.push(LBunch::formula((**a).clone(), BoolExpr::One));
                vec![Step::new(
                    "-*R",
                    vec![seq(LBunch::from_items(items), (**b).clone())],
                    vec![eq1(BoolExpr::One)],
                )]
            }
            Formula::Imp(a, b) => {
                let node = LNode::Node(Ctor::Add, vec![ante.clone(), LBunch::formula((**a).clone(), BoolExpr::One)]);
                vec![Step::new(
                    "→R",
                    vec![seq(LBunch::new(BoolExpr::One, node), (**b).clone())],
                    vec![eq1(BoolExpr::One)],
                )]
            }
            Formula::And(a, b) => vec![Step::new(
                "∧R",
                vec![seq(ante.clone(), (**a).clone()), seq(ante.clone(), (**b).clone())],
                vec![],
            )],
            Formula::Or(a, b) => vec![
                Step::new("∨R1", vec![seq(ante.clone(), (**a).clone())], vec![]),
                Step::new("∨R2", vec![seq(ante.clone(), (**b).clone())], vec![]),
            ],
            _ => vec![],
        }
    }

    /// Invertible left rule on the first eligible leaf, if any.
    pub fn left_invertible(&self, s: &ESequent) -> Option<Step<ESequent>> {
        for (path, b) in s.ante.positions() {
            let LNode::Formula(f) = &b.node else { continue };
            let own = b.label.clone();
            let side = vec![eq1(s.ante.effective(&path))];
            let put = |n: LNode| seq(s.ante.replace(&path, LBunch::new(own.clone(), n)), s.succ.clone());
            let pair = |c: Ctor, x: &Formula, y: &Formula| {
                LNode::Node(
                    c,
                    vec![LBunch::formula(x.clone(), BoolExpr::One), LBunch::formula(y.clone(), BoolExpr::One)],
                )
            };
            let step = match f {
                Formula::And(x, y) => Step::new("∧L", vec![put(pair(Ctor::Add, x, y))], side),
                Formula::Star(x, y) => Step::new("*L", vec![put(pair(Ctor::Mul, x, y))], side),
                Formula::Or(x, y) => Step::new(
                    "∨L",
                    vec![put(LNode::Formula((**x).clone())), put(LNode::Formula((**y).clone()))],
                    side,
                ),
                Formula::Top => Step::new("⊤L", vec![put(LNode::Unit(Ctor::Add))], side),
                Formula::MTop => Step::new("⊤*L", vec![put(LNode::Unit(Ctor::Mul))], side),
                _ => continue,
            };
            return Some(step);
        }
        None
    }

    fn parent_of<'a>(&self, ante: &'a LBunch, path: &[usize], c: Ctor) -> Option<(Vec<usize>, &'a Vec<LBunch>)> {
        let (_, pp) = path.split_last()?;
        match &ante.get(pp)?.node {
            LNode::Node(d, kids) if *d == c => Some((pp.to_vec(), kids)),
            _ => None,
        }
    }

    pub fn left_branching(&self, s: &ESequent) -> Vec<Step<ESequent>> {
        let mut out = Vec::new();
        let ante = &s.ante;
        for (path, b) in ante.positions() {
            let LNode::Formula(f) = &b.node else { continue };
            let own = b.label.clone();
            let side = vec![eq1(ante.effective(&path))];
            match f {
                Formula::Imp(x, y) => {
                    let delta = match self.parent_of(ante, &path, Ctor::Add) {
                        Some((pp, kids)) => {
                            let pe = ante.effective(&pp);
                            let me = *path.last().unwrap();
                            let sibs = kids
                                .iter()
                                .enumerate()
                                .filter(|(i, _)| *i != me)
                                .map(|(_, k)| k.relabel_front(&pe))
                                .collect();
                            LBunch::new(BoolExpr::One, LNode::Node(Ctor::Add, sibs))
                        }
                        None => LBunch::unit(Ctor::Add),
                    };
                    let rest = ante.replace(&path, LBunch::formula((**y).clone(), own));
                    out.push(Step::new(
                        "→L",
                        vec![seq(delta, (**x).clone()), seq(rest, s.succ.clone())],
                        side,
                    ));
                }
                Formula::Wand(x, y) => {
                    let (left, rest) = match self.parent_of(ante, &path, Ctor::Mul) {
                        Some((pp, kids)) => {
                            let pe = ante.effective(&pp);
                            let me = *path.last().unwrap();
                            let mut left = Vec::new();
                            let mut kept = Vec::new();
                            for (i, k) in kids.iter().enumerate() {
                                if i == me {
                                    kept.push(LBunch::formula((**y).clone(), own.clone()));
                                } else {
                                    let v = self.fresh();
                                    left.push(k.relabel_front(&pe).relabel(&v));
                                    kept.push(k.relabel(&BoolExpr::neg(v)));
                                }
                            }
                            let plabel = ante.get(&pp).unwrap().label.clone();
                            let parent = LBunch::new(plabel, LNode::Node(Ctor::Mul, kept));
                            (LBunch::from_items(left), ante.replace(&pp, parent))
                        }
                        None => (
                            LBunch::unit(Ctor::Mul),
                            ante.replace(&path, LBunch::formula((**y).clone(), own)),
                        ),
                    };
                    out.push(Step::new(
                        "-*L",
                        vec![seq(left, (**x).clone()), seq(rest, s.succ.clone())],
                        side,
                    ));
                }
                _ => {}
            }
        }
        out
    }

    pub fn weakening(&self, s: &ESequent) -> Vec<Step<ESequent>> {
        let mut out = Vec::new();
        for (path, b) in s.ante.positions() {
            let LNode::Node(Ctor::Add, kids) = &b.node else { continue };
            for i in 0..kids.len() {
                let mut k = kids.clone();
                k.remove(i);
                let node = LBunch::new(b.label.clone(), LNode::Node(Ctor::Add, k));
                let prem = seq(s.ante.replace(&path, node), s.succ.clone());
                if self.free_weakening || !self.axioms(&prem).is_empty() {
                    out.push(Step::new("w", vec![prem], vec![eq1(s.ante.effective(&path))]));
                }
            }
        }
        out
    }

    pub fn contraction(&self, s: &ESequent) -> Vec<Step<ESequent>> {
        let mut out = Vec::new();
        for (path, b) in s.ante.positions() {
            let LNode::Formula(f) = &b.node else { continue };
            if !matches!(f, Formula::Imp(..) | Formula::Wand(..)) {
                continue;
            }
            let dup = self
                .parent_of(&s.ante, &path, Ctor::Add)
                .map(|(_, kids)| kids.iter().filter(|k| k.node == b.node).count() > 1)
                .unwrap_or(false);
            if dup {
                continue;
            }
            let pair = LNode::Node(
                Ctor::Add,
                vec![LBunch::formula(f.clone(), BoolExpr::One), LBunch::formula(f.clone(), BoolExpr::One)],
            );
            let prem = seq(s.ante.replace(&path, LBunch::new(b.label.clone(), pair)), s.succ.clone());
            out.push(Step::new("c", vec![prem], vec![eq1(s.ante.effective(&path))]));
        }
        out
    }
}

impl System for Lbib {
    type Seq = ESequent;

    fn steps(&self, s: &ESequent) -> Vec<Step<ESequent>> {
        let mut out = self.axioms(s);
        out.extend(self.right(s));
        match self.left_invertible(s) {
            Some(step) => out.push(step),
            None => {
                out.extend(self.left_branching(s));
                out.extend(self.weakening(s));
                out.extend(self.contraction(s));
            }
        }
        out
    }
}

/// Every closed LBI_B reduction of the 1-annotated goal within `depth`.
pub fn reduce_lbib(goal: &Sequent, depth: usize) -> Result<Box<dyn Iterator<Item = BiReduction>>> {
    let g = ESequent::lift(goal)?;
    Ok(stream(Rc::new(Lbib::new()), g, depth))
}

/// Boolean variables occurring anywhere in a reduction.
pub fn reduction_vars(r: &BiReduction) -> BTreeSet<Var> {
    let mut out = BTreeSet::new();
    fn go(r: &BiReduction, out: &mut BTreeSet<Var>) {
        match r {
            Reduction::Step { seq, children, .. } => {
                for l in seq.ante.labels() {
                    out.extend(l.vars());
                }
                children.iter().for_each(|c| go(c, out));
            }
            Reduction::Open(seq) => {
                for l in seq.ante.labels() {
                    out.extend(l.vars());
                }
            }
            Reduction::Side(c) => out.extend(c.vars()),
        }
    }
    go(r, &mut out);
    out
}

/// Extends `i` with 0 for variables the side-conditions leave free.
pub fn complete(r: &BiReduction, mut i: Interpretation) -> Interpretation {
    for v in reduction_vars(r) {
        i.entry(v).or_insert(false);
    }
    i
}

#[derive(Debug, Clone)]
pub struct ProveOutcome {
    pub reduction: BiReduction,
    pub interpretation: Interpretation,
    pub proof: Proof<Sequent>,
}

/// First coherent reduction, its solution, and the valuated LBI proof.
pub fn prove_bi(goal: &Sequent, depth: usize) -> Result<Option<ProveOutcome>> {
    let g = ESequent::lift(goal)?;
    let sys = Lbib::new();
    let mut found = None;
    let mut err = None;
    dfs(&sys, g, depth, true, &mut |r, cs| {
        let Some(i) = solve(cs) else { return false };
        let i = complete(&r, i);
        match valuate(&r, &i) {
            Ok(proof) => {
                found = Some(ProveOutcome {
                    reduction: r,
                    interpretation: i,
                    proof,
                });
                true
            }
            Err(e) => {
                err = Some(e);
                true
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(found),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bi::{check_lbi_proof, check_lbi_proof_diag, coherence};
    use crate::syntax::{and, atom, imp, or, parse_sequent, star, wand, Alphabet, Bunch};
    use proptest::prelude::*;

    fn ps(s: &str) -> Sequent {
        parse_sequent(s, &Alphabet::bi()).unwrap()
    }

    #[test]
    fn first_reduction_is_the_distribution_example() {
        let r = reduce_lbib(&ps("p , q , r |- p * (q * r)"), 4).unwrap().next().unwrap();
        assert_eq!(r.rule(), Some("*R"));
        let left = r.premises()[0];
        assert_eq!(left.seq().unwrap().to_string(), "p·x1 , q·x2 , r·x3 |- p");
        assert_eq!(left.constraints()[0].to_string(), "x1 = 1 & x2 = 0 & x3 = 0");
        let right = r.premises()[1];
        assert_eq!(right.seq().unwrap().to_string(), "p·~x1 , q·~x2 , r·~x3 |- q * r");
        let rl = right.premises()[0];
        assert_eq!(rl.constraints()[0].to_string(), "~x1*x4 = 0 & ~x2*x5 = 1 & ~x3*x6 = 0");
        let rr = right.premises()[1];
        assert_eq!(rr.constraints()[0].to_string(), "~x1*~x4 = 0 & ~x2*~x5 = 0 & ~x3*~x6 = 1");
        let i = coherence(&r).unwrap().unwrap();
        let bits: Vec<bool> = ["x1", "x2", "x3", "x4", "x5", "x6"].iter().map(|v| i[&Var(v.to_string())]).collect();
        assert_eq!(bits, [true, false, false, false, true, false]);
    }

    #[test]
    fn identity_and_mismatch() {
        let all: Vec<_> = reduce_lbib(&ps("p |- p"), 1).unwrap().collect();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].rule(), Some("taut"));
        assert_eq!(all[0].constraints()[0].to_string(), "1 = 1");
        assert_eq!(reduce_lbib(&ps("p |- q"), 1).unwrap().count(), 0);
        assert!(prove_bi(&ps("p |- q"), 6).unwrap().is_none());
    }

    #[test]
    fn no_duplication_of_resources() {
        assert!(prove_bi(&ps("p |- p * p"), 6).unwrap().is_none());
        let n = reduce_lbib(&ps("p |- p * p"), 6).unwrap().filter(|r| coherence(r).unwrap().is_some()).count();
        assert_eq!(n, 0);
    }

    #[test]
    fn unit_axiom() {
        let out = prove_bi(&ps("ex |- mtop"), 2).unwrap().unwrap();
        assert_eq!(out.proof.rule, "⊤*R");
        assert!(check_lbi_proof(&out.proof));
    }

    #[test]
    fn assorted_goals_prove_and_check() {
        for g in [
            "p , q |- q * p",
            "p * q |- q * p",
            "p , p -* q |- q",
            "p ; p -> q |- q",
            "|- p -* p",
            "|- p -> p",
            "p & q |- q & p",
            "p | q |- q | p",
            "p , (q ; r) |- p * q",
            "bot , q |- p",
            "e+ |- top",
            "mtop , p |- p",
        ] {
            let out = prove_bi(&ps(g), 6).unwrap().unwrap_or_else(|| panic!("{g}"));
            assert!(check_lbi_proof(&out.proof), "{g}\n{}", out.proof);
        }
        for g in ["p , q |- p", "p |- p * q", "p -* q |- q", "p ; q |- p * q"] {
            assert!(prove_bi(&ps(g), 6).unwrap().is_none(), "{g}");
        }
    }

    fn arb_bi() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            4 => prop::sample::select(vec!["p", "q", "r"]).prop_map(atom),
            1 => Just(Formula::Top),
            1 => Just(Formula::Bot),
            1 => Just(Formula::MTop),
        ];
        leaf.prop_recursive(2, 6, 2, |inner| {
            (0..5u8, inner.clone(), inner).prop_map(|(k, a, b)| match k {
                0 => and(a, b),
                1 => or(a, b),
                2 => imp(a, b),
                3 => star(a, b),
                _ => wand(a, b),
            })
        })
    }

    fn arb_goal() -> impl Strategy<Value = Sequent> {
        (prop::collection::vec((arb_bi(), any::<bool>()), 0..3), arb_bi()).prop_map(|(items, succ)| {
            let mut ante = Bunch::Unit(Ctor::Mul);
            for (f, add) in items {
                let c = if add { Ctor::Add } else { Ctor::Mul };
                ante = Bunch::Node(c, vec![ante, Bunch::Formula(f)]);
            }
            Sequent::new(ante, Bunch::Formula(succ))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn coherent_reductions_valuate_to_lbi_proofs(goal in arb_goal()) {
            for r in reduce_lbib(&goal, 4).unwrap().take(40) {
                for i in all_solutions_of(&r).into_iter().take(4) {
                    let p = valuate(&r, &i).unwrap();
                    prop_assert!(p.conclusion.equiv(&goal));
                    prop_assert!(check_lbi_proof(&p), "{}\n{:?}", p, check_lbi_proof_diag(&p));
                }
            }
        }
    }

    fn all_solutions_of(r: &BiReduction) -> Vec<Interpretation> {
        let cs: Vec<Constraint> = r.constraints().into_iter().cloned().collect();
        let vars: Vec<Var> = reduction_vars(r).into_iter().collect();
        if vars.len() > 12 {
            return solve(&cs).map(|i| complete(r, i)).into_iter().collect();
        }
        crate::boolean::all_solutions(&cs, &vars).unwrap()
    }
}
