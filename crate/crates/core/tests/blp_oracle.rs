//! LB⊕U against naive LB search that enumerates substitutions over program constants.

use ck_core::blp::{check_lb_proof, run_blp, Atom, Def, Goal, Program, Query, Term};
use proptest::prelude::*;

const CONSTS: [&str; 3] = ["a", "b", "c"];

fn all_thetas(vars: &[String]) -> Vec<Vec<(String, Term)>> {
    let mut out = vec![vec![]];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|th: Vec<(String, Term)>| {
                CONSTS.iter().map(move |c| {
                    let mut t = th.clone();
                    t.push((v.clone(), Term::Const(c.to_string())));
                    t
                })
            })
            .collect();
    }
    out
}

fn inst_atom(a: &Atom, th: &[(String, Term)]) -> Atom {
    Atom {
        rel: a.rel.clone(),
        args: a
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) => th.iter().find(|(x, _)| x == v).map(|p| p.1.clone()).unwrap_or(t.clone()),
                _ => t.clone(),
            })
            .collect(),
    }
}

fn inst_goal(g: &Goal, th: &[(String, Term)]) -> Goal {
    match g {
        Goal::Atom(a) => Goal::Atom(inst_atom(a, th)),
        Goal::And(a, b) => Goal::And(Box::new(inst_goal(a, th)), Box::new(inst_goal(b, th))),
        Goal::Or(a, b) => Goal::Or(Box::new(inst_goal(a, th)), Box::new(inst_goal(b, th))),
        Goal::Imp(..) => unimplemented!(),
    }
}

fn naive_goal(p: &Program, g: &Goal, depth: usize) -> bool {
    match g {
        Goal::Atom(a) => naive_atom(p, a, depth),
        Goal::And(x, y) => naive_goal(p, x, depth) && naive_goal(p, y, depth),
        Goal::Or(x, y) => naive_goal(p, x, depth) || naive_goal(p, y, depth),
        Goal::Imp(..) => unimplemented!(),
    }
}

fn naive_atom(p: &Program, a: &Atom, depth: usize) -> bool {
    for d in &p.clauses {
        for th in all_thetas(&d.vars()) {
            match d {
                Def::Atom(f) if inst_atom(f, &th) == *a => return true,
                Def::Imp(g, h) if depth > 0 && inst_atom(h, &th) == *a => {
                    if naive_goal(p, &inst_goal(g, &th), depth - 1) {
                        return true;
                    }
                }
                _ => {}
            }
        }
    }
    false
}

fn arb_term() -> impl Strategy<Value = Term> {
    prop_oneof![
        prop::sample::select(CONSTS.to_vec()).prop_map(|c| Term::Const(c.into())),
        prop::sample::select(vec!["X", "Y", "Z"]).prop_map(|v| Term::Var(v.into())),
    ]
}

fn arb_atom() -> impl Strategy<Value = Atom> {
    prop_oneof![
        (prop::sample::select(vec!["p", "q"]), arb_term()).prop_map(|(r, t)| Atom { rel: r.into(), args: vec![t] }),
        (arb_term(), arb_term()).prop_map(|(s, t)| Atom { rel: "e".into(), args: vec![s, t] }),
    ]
}

fn arb_body() -> impl Strategy<Value = Goal> {
    arb_atom().prop_map(Goal::Atom).prop_recursive(2, 4, 2, |g| {
        prop_oneof![
            (g.clone(), g.clone()).prop_map(|(a, b)| Goal::And(Box::new(a), Box::new(b))),
            (g.clone(), g).prop_map(|(a, b)| Goal::Or(Box::new(a), Box::new(b))),
        ]
    })
}

fn arb_clause() -> impl Strategy<Value = Def> {
    prop_oneof![
        arb_atom().prop_map(Def::Atom),
        (arb_body(), arb_atom()).prop_map(|(g, a)| Def::Imp(Box::new(g), a)),
    ]
}

fn ground(a: &Atom) -> Atom {
    inst_atom(a, &[("X".into(), Term::Const("a".into())), ("Y".into(), Term::Const("b".into())), ("Z".into(), Term::Const("c".into()))])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]
    #[test]
    fn ground_queries_agree_with_naive_search(
        clauses in prop::collection::vec(arb_clause(), 1..=12),
        goal in arb_atom(),
        depth in 0usize..3,
    ) {
        let program = Program { clauses };
        let goal = Goal::Atom(ground(&goal));
        let q = Query { program: program.clone(), goal: goal.clone() };
        let answers = run_blp(&q, depth);
        prop_assert_eq!(!answers.is_empty(), naive_goal(&program, &goal, depth), "{:?} ▷ {}", program.clauses, goal);
        for a in &answers {
            prop_assert!(check_lb_proof(&program, &a.proof), "{}", a.proof);
        }
    }

    #[test]
    fn answers_are_idempotent_and_checked(
        clauses in prop::collection::vec(arb_clause(), 1..=8),
        goal in arb_atom(),
    ) {
        let program = Program { clauses };
        let q = Query { program: program.clone(), goal: Goal::Atom(goal) };
        for a in run_blp(&q, 2) {
            for (k, t) in &a.solution {
                let mut hit = false;
                let mut walk = vec![t.clone()];
                while let Some(x) = walk.pop() {
                    match x {
                        Term::Label(n) | Term::Var(n) => hit |= &n == k || a.solution.contains_key(&n),
                        Term::Fun(_, xs) => walk.extend(xs),
                        Term::Const(_) => {}
                    }
                }
                prop_assert!(!hit, "{} ↦ {} is not idempotent", k, t);
            }
            prop_assert!(check_lb_proof(&program, &a.proof), "{}", a.proof);
        }
    }
}
