//! One PASS/FAIL line per acceptance criterion. Runs as a plain binary so the
//! lines always reach stdout; exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ck_core::bi::{check_lbi_proof, coherence, complete, prove_bi, reduce_lbib, valuate, BiReduction};
use ck_core::blp::{check_lb_proof, parse_goal, parse_program, run_blp, Query, COURSES};
use ck_core::boolean::{all_solutions, boolean_laws, eval_constraint, eval_expr, solve, BoolExpr, Constraint, Interpretation, Var};
use ck_core::ipl::{check_ljplus_proof, prove_ipl};
use ck_core::meta::formula::term_of_formula;
use ck_core::meta::{
    builtin_calculus, builtin_theory, calculus_diff, check_labelled_proof, is_tractable, ljplus_calculus, meta_formula, polarity,
    polarity_alternations, propositional_encoding, prove_labelled, rules_alpha_equiv, synthesize_rule, LSeq, MAtom, Term,
};
use ck_core::oracles::{ipl_decide, k_decide};
use ck_core::syntax::{and, atom, boxf, dia, enumerate_formulas, imp, not, or, parse_sequent, star, wand, Alphabet, Bunch, Ctor, Formula, Sequent};
use ck_core::tree::Proof;

type Outcome = Result<String, String>;

fn seed() -> u64 {
    std::env::var("CK_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(7)
}

fn within(t: Instant, limit: Duration, what: &str) -> Result<Duration, String> {
    let e = t.elapsed();
    if e < limit {
        Ok(e)
    } else {
        Err(format!("{what} took {e:.2?}, limit {limit:?}"))
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn blp_courses() -> Outcome {
    let t = Instant::now();
    let q = Query {
        program: parse_program(COURSES).map_err(|e| e.to_string())?,
        goal: parse_goal("s(X,Y,Z)").map_err(|e| e.to_string())?,
    };
    let answers = run_blp(&q, 6);
    let e = within(t, Duration::from_secs(1), "query")?;
    ensure(answers.len() == 27, || format!("{} answers", answers.len()))?;
    ensure(q.candidate_space() == 729, || format!("candidate space {}", q.candidate_space()))?;
    for a in &answers {
        ensure(check_lb_proof(&q.program, &a.proof), || format!("LB check failed for {}", a.line()))?;
    }
    let a = answers
        .iter()
        .find(|a| a.line() == "X=al, Y=lo, Z=ai")
        .ok_or("no answer X=al, Y=lo, Z=ai")?;
    let want = ["∃R", "∀L", "→L", "∧R", "∧R", "ax", "ax", "ax"];
    ensure(a.proof.rules() == want, || format!("trace {:?}", a.proof.rules()))?;
    Ok(format!("27 answers of 729 candidates, trace {}, {e:.2?}", want.join(" ")))
}

fn bi_distribution() -> Outcome {
    let p = |s: &str| parse_sequent(s, &Alphabet::bi()).unwrap();
    let t = Instant::now();
    let o = prove_bi(&p("p , q , r |- p * (q * r)"), 4).map_err(|e| e.to_string())?.ok_or("not provable")?;
    let e = within(t, Duration::from_secs(1), "search")?;
    let bits: Vec<u8> = ["x1", "x2", "x3"].iter().map(|v| u8::from(o.interpretation[&Var(v.to_string())])).collect();
    ensure(bits == [1, 0, 0], || format!("first split {bits:?}"))?;
    let want = Proof::new(
        p("p , q , r |- p * (q * r)"),
        "*R",
        vec![
            Proof::leaf(p("p |- p"), "taut"),
            Proof::new(p("q , r |- q * r"), "*R", vec![Proof::leaf(p("q |- q"), "taut"), Proof::leaf(p("r |- r"), "taut")]),
        ],
    );
    ensure(o.proof == want, || format!("valuation differs:\n{}", o.proof))?;
    ensure(check_lbi_proof(&o.proof), || "checker rejects".into())?;
    Ok(format!("first split (1,0,0), valuation equals the expected LBI proof, checked, {e:.2?}"))
}

fn random_bi(rng: &mut ChaCha8Rng, depth: u32) -> Formula {
    if depth == 0 || rng.gen_ratio(1, 3) {
        return match rng.gen_range(0..7) {
            0 => Formula::Top,
            1 => Formula::MTop,
            2 => Formula::Bot,
            k => atom(["p", "q", "r", "p"][k - 3]),
        };
    }
    let a = random_bi(rng, depth - 1);
    let b = random_bi(rng, depth - 1);
    match rng.gen_range(0..5) {
        0 => and(a, b),
        1 => or(a, b),
        2 => imp(a, b),
        3 => star(a, b),
        _ => wand(a, b),
    }
}

fn random_bi_goal(rng: &mut ChaCha8Rng) -> Sequent {
    let mut ante = Bunch::Unit(Ctor::Mul);
    for _ in 0..rng.gen_range(0..4) {
        let c = if rng.gen_bool(0.5) { Ctor::Add } else { Ctor::Mul };
        ante = Bunch::Node(c, vec![ante, Bunch::Formula(random_bi(rng, 2))]);
    }
    Sequent::new(ante, Bunch::Formula(random_bi(rng, 2)))
}

fn reduction_vars(r: &BiReduction) -> Vec<Var> {
    let mut out = std::collections::BTreeSet::new();
    for c in r.constraints() {
        out.extend(c.vars());
    }
    out.extend(complete(r, Interpretation::new()).into_keys());
    out.into_iter().collect()
}

/// Reductions per goal and interpretations per reduction are capped to keep the
/// run short; the caps are printed.
fn bi_faithfulness() -> Outcome {
    const GOALS: usize = 250;
    const REDUCTIONS: usize = 60;
    const MODELS: usize = 16;
    let mut rng = ChaCha8Rng::seed_from_u64(seed());
    let (mut reductions, mut valuations, mut proved) = (0, 0, 0);
    for _ in 0..GOALS {
        let goal = random_bi_goal(&mut rng);
        let mut any = false;
        for r in reduce_lbib(&goal, 4).map_err(|e| e.to_string())?.take(REDUCTIONS) {
            if coherence(&r).map_err(|e| e.to_string())?.is_none() {
                continue;
            }
            reductions += 1;
            any = true;
            let cs: Vec<Constraint> = r.constraints().into_iter().cloned().collect();
            let vars = reduction_vars(&r);
            let models = if vars.len() <= 12 {
                all_solutions(&cs, &vars).map_err(|e| e.to_string())?
            } else {
                solve(&cs).map(|i| complete(&r, i)).into_iter().collect()
            };
            for i in models.into_iter().take(MODELS) {
                let p = valuate(&r, &i).map_err(|e| format!("{goal}: {e}"))?;
                valuations += 1;
                ensure(p.conclusion.equiv(&goal), || format!("{goal}: valuation proves {}", p.conclusion))?;
                ensure(check_lbi_proof(&p), || format!("{goal}: rejected\n{p}"))?;
            }
        }
        proved += usize::from(any);
    }
    ensure(proved > 0, || "no goal had a coherent reduction".into())?;
    Ok(format!(
        "{GOALS} goals ({proved} provable), {reductions} coherent reductions, {valuations} valuations checked, 0 failures \
         (≤{REDUCTIONS} reductions/goal, ≤{MODELS} models/reduction)"
    ))
}

fn random_ipl(rng: &mut ChaCha8Rng, n: usize) -> Formula {
    if n == 0 {
        return atom(if rng.gen_bool(0.5) { "p" } else { "q" });
    }
    match rng.gen_range(0..4) {
        0 => not(random_ipl(rng, n - 1)),
        k => {
            let l = rng.gen_range(0..n);
            let a = random_ipl(rng, l);
            let b = random_ipl(rng, n - 1 - l);
            [and, or, imp][k - 1](a, b)
        }
    }
}

fn ipl_agreement() -> Outcome {
    let t = Instant::now();
    let mut corpus: Vec<Formula> = (0..=3).flat_map(|k| enumerate_formulas(&["p", "q"], &[not], &[and, or, imp], k)).collect();
    let exhaustive = corpus.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed());
    for _ in 0..2000 {
        let n = rng.gen_range(4..=7);
        corpus.push(random_ipl(&mut rng, n));
    }
    let (p, q) = (atom("p"), atom("q"));
    let peirce = imp(imp(imp(p.clone(), q), p.clone()), p.clone());
    let lem = or(p.clone(), not(p.clone()));
    let named = [(lem.clone(), false), (not(not(lem)), true), (peirce, false)];
    corpus.extend(named.iter().map(|(f, _)| f.clone()));
    let mut valid = 0;
    for f in &corpus {
        let s = Sequent::new(Bunch::Unit(Ctor::Add), f.clone().into());
        let oracle = ipl_decide(&s);
        let got = prove_ipl(&s, 8).map_err(|e| format!("{f}: {e}"))?;
        ensure(got.is_some() == oracle, || format!("{f}: prover {}, oracle {oracle}", got.is_some()))?;
        if let Some(o) = got {
            ensure(check_ljplus_proof(&o.proof), || format!("{f}: LJ+ check failed"))?;
            valid += 1;
        }
    }
    for (f, v) in &named {
        ensure(ipl_decide(&Sequent::new(Bunch::Unit(Ctor::Add), f.clone().into())) == *v, || format!("{f} misjudged"))?;
    }
    let e = within(t, Duration::from_secs(120), "corpus")?;
    Ok(format!(
        "{} formulas ({exhaustive} exhaustive ≤3 connectives + 2000 sampled 4..7, seed {}), {valid} valid, 100% agreement, {e:.2?}",
        corpus.len(),
        seed()
    ))
}

fn calculus_snapshots() -> Outcome {
    let mut parts = Vec::new();
    for (th, name) in [("k", "rk"), ("ipl", "rj")] {
        let g = ck_core::meta::generate_relational_calculus(&builtin_theory(th).unwrap(), true).map_err(|e| e.to_string())?;
        let golden = builtin_calculus(name).unwrap();
        let (a, b) = calculus_diff(&g, &golden);
        let show = |v: Vec<&ck_core::meta::LRule>| v.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("; ");
        ensure(a.is_empty() && b.is_empty(), || format!("{th} vs {name}: generated only [{}], golden only [{}]", show(a), show(b)))?;
        parts.push(format!("{th} → {name} ({} rules)", golden.rules.len()));
    }
    Ok(parts.join(", "))
}

fn propositional_encoding_ljplus() -> Outcome {
    let nu = propositional_encoding(&builtin_calculus("rjplus").unwrap()).map_err(|e| e.to_string())?;
    let lj = ljplus_calculus();
    let names: Vec<&str> = nu.iter().map(|r| r.name.as_str()).collect();
    ensure(names == ["c", "taut", "L∧", "R∧", "L∨", "R∨", "L→", "R→"], || format!("rules {names:?}"))?;
    for r in &nu {
        ensure(lj.rules.iter().any(|l| rules_alpha_equiv(&r.to_labelled(), l)), || format!("{r} is not an LJ+ rule"))?;
    }
    Ok(format!("{} encoded rules, each an LJ+ rule", nu.len()))
}

fn k_agreement() -> Outcome {
    let t = Instant::now();
    let calc = ck_core::meta::generate_relational_calculus(&builtin_theory("k-full").unwrap(), true).map_err(|e| e.to_string())?;
    let mut n = 0;
    let mut valid = 0;
    for k in 0..=6 {
        for f in enumerate_formulas(&["p"], &[not, boxf, dia], &[and, or, imp], k) {
            if f.size() > 7 || f.modal_depth() > 2 {
                continue;
            }
            n += 1;
            let goal = LSeq::new(vec![], vec![MAtom::Sat(Term::Const("w".into()), term_of_formula(&f))]);
            let got = prove_labelled(&calc, &goal, 6);
            let oracle = k_decide(&f).map_err(|e| format!("{f}: {e}"))?;
            ensure(got.is_some() == oracle, || format!("{f}: prover {}, oracle {oracle}", got.is_some()))?;
            if let Some(p) = got {
                ensure(check_labelled_proof(&calc, &p), || format!("{f}: proof does not check"))?;
                valid += 1;
            }
        }
    }
    let e = within(t, Duration::from_secs(60), "corpus")?;
    Ok(format!("{n} formulas, {valid} valid, 100% agreement, {e:.2?}"))
}

fn tractability() -> Outcome {
    let mf = |s: &str| meta_formula(s).unwrap();
    let cases = [
        ("(sat w A)", 0),
        ("(mand (imp A B) (mor C D))", 1),
        ("(forall X (exists Y (imp (P X) (Q Y))))", 1),
        ("(imp (imp A B) (mand C D))", 2),
    ];
    for (s, want) in cases {
        let got = polarity_alternations(&mf(s));
        ensure(got == want, || format!("π{s} = {got}, expected {want}"))?;
    }
    for g in [
        "(forall x (imp (mand (P x) (Q x)) (exists y (mor (S x y) (T y)))))",
        "(forall x (forall y (forall z (imp (mand (R x y) (R y z)) (R x z)))))",
        "(forall x (exists y (R x y)))",
    ] {
        ensure(is_tractable(&mf(g)).unwrap_or(false), || format!("geometric {g} not tractable"))?;
    }
    let deep = mf("(imp (imp (imp A B) C) D)");
    ensure(polarity_alternations(&deep) == 3, || "π ≠ 3".into())?;
    ensure(polarity(&deep).map(|p| p.negative).unwrap_or(false), || "not negative".into())?;
    ensure(!is_tractable(&deep).unwrap(), || "π = 3 accepted".into())?;
    ensure(synthesize_rule(&deep).is_err(), || "synthesized from π = 3".into())?;
    for (src, golden) in [
        ("(mor (mand A B) (mand C D))", include_str!("../data/collapse1.txt")),
        ("(forall X (mor (mand (A X) (B X)) (mand (C X) (D X))))", include_str!("../data/collapse2.txt")),
    ] {
        let r = synthesize_rule(&mf(src)).map_err(|e| e.to_string())?;
        ensure(r.to_string().trim() == golden.trim(), || format!("collapse of {src}:\n{r}"))?;
    }
    Ok("π cases 0/1/1/2, 3 geometric implications tractable, π=3 rejected, 2 collapses match".into())
}

fn random_expr(rng: &mut ChaCha8Rng, vars: usize, depth: u32) -> BoolExpr {
    if depth == 0 || rng.gen_ratio(1, 4) {
        return match rng.gen_range(0..8) {
            0 => BoolExpr::Zero,
            1 => BoolExpr::One,
            _ => BoolExpr::Var(Var(format!("v{}", rng.gen_range(0..vars)))),
        };
    }
    match rng.gen_range(0..3) {
        0 => BoolExpr::Sum(Box::new(random_expr(rng, vars, depth - 1)), Box::new(random_expr(rng, vars, depth - 1))),
        1 => BoolExpr::Prod(Box::new(random_expr(rng, vars, depth - 1)), Box::new(random_expr(rng, vars, depth - 1))),
        _ => BoolExpr::Not(Box::new(random_expr(rng, vars, depth - 1))),
    }
}

fn random_interpretation(rng: &mut ChaCha8Rng, vars: usize) -> Interpretation {
    (0..vars).map(|k| (Var(format!("v{k}")), rng.gen_bool(0.5))).collect()
}

fn exhaustive_sat(cs: &[Constraint], vars: &[Var]) -> bool {
    (0u32..1 << vars.len()).any(|bits| {
        let i: Interpretation = vars.iter().enumerate().map(|(k, v)| (v.clone(), bits >> k & 1 == 1)).collect();
        cs.iter().all(|c| eval_constraint(c, &i).unwrap())
    })
}

fn boolean_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed());
    let mut laws = 0;
    for _ in 0..10_000 {
        let (a, b, c) = (random_expr(&mut rng, 4, 3), random_expr(&mut rng, 4, 3), random_expr(&mut rng, 4, 3));
        let i = random_interpretation(&mut rng, 4);
        for (name, l, r) in boolean_laws(&a, &b, &c) {
            let (x, y) = (eval_expr(&l, &i).unwrap(), eval_expr(&r, &i).unwrap());
            ensure(x == y, || format!("{name} fails at a={a}, b={b}, c={c}"))?;
            laws += 1;
        }
    }
    let (mut sat, mut unsat) = (0, 0);
    for _ in 0..1000 {
        let nvars = rng.gen_range(1..=12);
        let cs: Vec<Constraint> = (0..rng.gen_range(1..=8))
            .map(|_| {
                let e = random_expr(&mut rng, nvars, 3);
                let k = if rng.gen_bool(0.5) { BoolExpr::One } else { BoolExpr::Zero };
                Constraint::Eq(e, k)
            })
            .collect();
        let vars: Vec<Var> = (0..nvars).map(|k| Var(format!("v{k}"))).collect();
        let want = exhaustive_sat(&cs, &vars);
        match solve(&cs) {
            Some(m) => {
                let mut m = m;
                for v in &vars {
                    m.entry(v.clone()).or_insert(false);
                }
                ensure(want && cs.iter().all(|c| eval_constraint(c, &m).unwrap()), || {
                    format!("solve returned a non-model for {cs:?}")
                })?;
                sat += 1;
            }
            None => {
                ensure(!want, || format!("solve missed a model of {cs:?}"))?;
                unsat += 1;
            }
        }
    }
    Ok(format!("10000 pairs × 12 laws ({laws} checks), 1000 systems ({sat} sat, {unsat} unsat) match exhaustive search"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("blp course example", blp_courses),
        ("bi resource distribution example", bi_distribution),
        ("bi faithfulness suite", bi_faithfulness),
        ("ipl oracle agreement", ipl_agreement),
        ("calculus generation snapshot", calculus_snapshots),
        ("propositional encoding of RJ+", propositional_encoding_ljplus),
        ("modal K cross-validation", k_agreement),
        ("tractability", tractability),
        ("boolean algebra", boolean_algebra),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let r = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match r {
            Ok(detail) => println!("PASS {} {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
