//! Re-expanding a formula with the plain G3c rules, right side first, gives the
//! premises of its synthetic rule.

use ck_core::meta::{is_tractable, meta_formula, parse_theory, synthesize_rule, MAtom, MetaFormula, Term};
use proptest::prelude::*;

type Leaf = (Vec<MAtom>, Vec<MAtom>);

struct Names {
    n: usize,
}

impl Names {
    fn next(&mut self) -> Term {
        self.n += 1;
        Term::Var(format!("v{}", self.n))
    }
}

fn expand(mut ante: Vec<MetaFormula>, mut succ: Vec<MetaFormula>, ns: &mut Names, out: &mut Vec<Leaf>) {
    use MetaFormula as M;
    if let Some(i) = succ.iter().rposition(|f| !matches!(f, M::Atom(_))) {
        let f = succ.remove(i);
        match f {
            M::And(a, b) => {
                let mut s2 = succ.clone();
                s2.push(*b);
                succ.push(*a);
                expand(ante.clone(), succ, ns, out);
                expand(ante, s2, ns, out);
            }
            M::Or(a, b) => {
                succ.push(*a);
                succ.push(*b);
                expand(ante, succ, ns, out);
            }
            M::Imp(a, b) => {
                ante.push(*a);
                succ.push(*b);
                expand(ante, succ, ns, out);
            }
            M::Forall(x, a) => {
                let t = ns.next();
                succ.push(a.instantiate(&x, &t));
                expand(ante, succ, ns, out);
            }
            M::Exists(x, a) => {
                let t = ns.next();
                succ.push(a.instantiate(&x, &t));
                expand(ante, succ, ns, out);
            }
            M::Atom(_) => unreachable!(),
        }
        return;
    }
    if let Some(i) = ante.iter().rposition(|f| !matches!(f, M::Atom(_))) {
        let f = ante.remove(i);
        match f {
            M::And(a, b) => {
                ante.push(*a);
                ante.push(*b);
                expand(ante, succ, ns, out);
            }
            M::Or(a, b) => {
                let mut a2 = ante.clone();
                a2.push(*b);
                ante.push(*a);
                expand(ante, succ.clone(), ns, out);
                expand(a2, succ, ns, out);
            }
            M::Imp(a, b) => {
                let mut s2 = succ.clone();
                s2.push(*a);
                expand(ante.clone(), s2, ns, out);
                ante.push(*b);
                expand(ante, succ, ns, out);
            }
            M::Forall(x, a) => {
                let t = ns.next();
                ante.push(a.instantiate(&x, &t));
                expand(ante, succ, ns, out);
            }
            M::Exists(x, a) => {
                let t = ns.next();
                ante.push(a.instantiate(&x, &t));
                expand(ante, succ, ns, out);
            }
            M::Atom(_) => unreachable!(),
        }
        return;
    }
    let atoms = |v: Vec<MetaFormula>| {
        let mut v: Vec<MAtom> = v
            .into_iter()
            .map(|f| match f {
                MetaFormula::Atom(a) => a,
                _ => unreachable!(),
            })
            .collect();
        v.sort();
        v
    };
    out.push((atoms(ante), atoms(succ)));
}

fn permutations(xs: &[String]) -> Vec<Vec<String>> {
    if xs.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for i in 0..xs.len() {
        let mut rest = xs.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x.clone());
            out.push(p);
        }
    }
    out
}

/// A leaf with its variables renamed to `_0`, `_1`, ... in the way that sorts least.
fn canon_leaf((a, s): &Leaf) -> Leaf {
    let mut vars = Vec::new();
    for x in a.iter().chain(s) {
        x.vars(&mut vars);
    }
    vars.sort();
    vars.dedup();
    let mut best: Option<Leaf> = None;
    for p in permutations(&vars) {
        let map = p.iter().cloned().enumerate().map(|(i, v)| (v, Term::Var(format!("_{i}")))).collect();
        let f = |xs: &Vec<MAtom>| {
            let mut ys: Vec<MAtom> = xs.iter().map(|x| x.subst(&map)).collect();
            ys.sort();
            ys
        };
        let c = (f(a), f(s));
        if best.as_ref().map_or(true, |b| c < *b) {
            best = Some(c);
        }
    }
    best.unwrap()
}

fn canon(leaves: &[Leaf]) -> Vec<Leaf> {
    let mut v: Vec<Leaf> = leaves.iter().map(canon_leaf).collect();
    v.sort();
    v
}

/// Whether the synthetic rule for `phi` has the premises of the right-first expansion,
/// each up to renaming. Instantiations made before a split are shared by the branches in
/// one order and duplicated in the other, so they are compared branch by branch.
fn round_trips(phi: &MetaFormula) -> Result<(), String> {
    let r = synthesize_rule(phi).map_err(|e| e.to_string())?;
    let mut ns = Names { n: 0 };
    let mut leaves = Vec::new();
    expand(vec![phi.clone()], vec![], &mut ns, &mut leaves);
    let theirs: Vec<Leaf> = r.premises.iter().map(|p| (p.ante.clone(), p.succ.clone())).collect();
    if canon(&leaves) == canon(&theirs) {
        Ok(())
    } else {
        Err(format!("premises differ for {phi}: {r}"))
    }
}

#[test]
fn worked_examples_round_trip() {
    for src in [
        "(mor (mand A B) (mand C D))",
        "(forall X (mor (mand (A X) (B X)) (mand (C X) (D X))))",
        "(exists X (mand (P X) (forall Z (Q X Z))))",
        "(forall w (forall u (imp (rel R w u) (sat u A))))",
    ] {
        round_trips(&meta_formula(src).unwrap()).unwrap();
    }
}

#[test]
fn bundled_theory_clauses_round_trip() {
    use ck_core::meta::theory::{IPL_THEORY, K_FULL_THEORY, K_THEORY};
    for src in [K_THEORY, K_FULL_THEORY, IPL_THEORY] {
        for c in parse_theory(src).unwrap().clauses {
            round_trips(&c.formula).unwrap();
        }
    }
}

fn arb_meta() -> impl Strategy<Value = MetaFormula> {
    let var = prop_oneof![Just("x"), Just("y")];
    let leaf = prop_oneof![
        var.clone().prop_map(|v| MetaFormula::Atom(MAtom::Pred("P".into(), vec![Term::var(v)]))),
        (var.clone(), var.clone()).prop_map(|(a, b)| MetaFormula::Atom(MAtom::Rel("R".into(), Term::var(a), Term::var(b)))),
        Just(MetaFormula::bot()),
    ];
    leaf.prop_recursive(4, 16, 2, move |inner| {
        let var = prop_oneof![Just("x"), Just("y")];
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| MetaFormula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| MetaFormula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| MetaFormula::imp(a, b)),
            (var.clone(), inner.clone()).prop_map(|(v, a)| MetaFormula::forall(v, a)),
            (var, inner).prop_map(|(v, a)| MetaFormula::exists(v, a)),
        ]
    })
}

proptest! {
    #[test]
    fn tractable_formulas_round_trip(f in arb_meta()) {
        let f = f.closure();
        if is_tractable(&f).unwrap_or(false) {
            prop_assert!(round_trips(&f).is_ok(), "{}", round_trips(&f).unwrap_err());
        }
    }
}
