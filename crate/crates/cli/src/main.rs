use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ck_core::bi::{coherence, complete, reduce_lbib, valuate};
use ck_core::blp::{check_lb_proof, parse_goal, parse_program, run_blp, Query, COURSES};
use ck_core::boolean::{all_solutions, parse_constraint, solve};
use ck_core::doc::{check_document, DocNode, ProofDocument};
use ck_core::ipl::{ergo_reduction, reduce_lkplusb};
use ck_core::meta::{
    builtin_calculus, builtin_theory, generate_relational_calculus, parse_calculus, parse_labelled_sequent, parse_theory,
    propositional_encoding, prove_labelled, rules_file, LabelledCalculus,
};
use ck_core::oracles::{ipl_countermodel, ipl_decide, k_countermodel, k_decide};
use ck_core::syntax::{parse_formula, parse_sequent, Alphabet, Sequent};
use ck_core::{prove_bi, prove_ipl, Interpretation};

#[derive(Parser)]
#[command(name = "ck", version, about = "Proof search with constraints, generated relational calculi, and oracles")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Search for a proof of a sequent.
    Prove(ProveArgs),
    /// Decide validity with the model-theoretic oracles.
    Oracle(OracleArgs),
    /// Generate a labelled calculus from a theory of satisfaction.
    GenCalc(GenArgs),
    /// Answer a query against a logic program.
    Blp(BlpArgs),
    /// Solve a system of Boolean constraints.
    Solve(SolveArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Logic {
    Bi,
    Ipl,
    K,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Tree,
    Json,
    Ljplus,
    Rules,
    Proof,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 6)]
    depth: usize,
    #[arg(long, value_enum, default_value_t = Emit::Tree)]
    emit: Emit,
    /// Worker threads for independent goals.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct ProveArgs {
    goal: String,
    #[arg(long, value_enum)]
    logic: Option<Logic>,
    /// `rk`, `rj`, `rjplus`, a bundled theory (`k`, `k-full`, `ipl`), a rule file, or a
    /// theory file (`.thy`). Theories are turned into simplified calculi.
    #[arg(long)]
    calc: Option<String>,
    #[arg(long)]
    show_constraints: bool,
    /// Every distinct proof within the depth bound.
    #[arg(long)]
    all: bool,
    /// Reload the emitted document and re-run the checker.
    #[arg(long)]
    check: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(required = true)]
    goals: Vec<String>,
    #[arg(long, value_enum, default_value_t = Logic::Ipl)]
    logic: Logic,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct GenArgs {
    /// `k`, `k-full`, `ipl`, or a theory file.
    #[arg(long)]
    theory: String,
    #[arg(long)]
    simplify: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct BlpArgs {
    /// Program file; `courses` names the bundled example.
    #[arg(long)]
    program: String,
    #[arg(long)]
    goal: String,
    #[arg(long)]
    all: bool,
    #[arg(long)]
    check: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SolveArgs {
    /// Constraint in debug syntax, e.g. `x*~y = 1 & z = 0`.
    constraint: String,
    #[arg(long)]
    all: bool,
    #[command(flatten)]
    common: Common,
}

/// Provable / not provable; input errors go through `Err`.
type Found = bool;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match &cli.cmd {
        Cmd::Prove(a) => prove(a),
        Cmd::Oracle(a) => oracle(a),
        Cmd::GenCalc(a) => gen_calc(a),
        Cmd::Blp(a) => blp(a),
        Cmd::Solve(a) => solve_cmd(a),
    };
    match r {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &str) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {path}"))
}

fn load_theory(name: &str) -> Result<ck_core::meta::Theory> {
    match builtin_theory(name) {
        Some(t) => Ok(t),
        None => Ok(parse_theory(&read(name)?)?),
    }
}

fn load_calculus(name: &str) -> Result<LabelledCalculus> {
    if let Some(c) = builtin_calculus(name) {
        return Ok(c);
    }
    if let Some(th) = builtin_theory(name) {
        let mut c = generate_relational_calculus(&th, true)?;
        c.name = name.to_string();
        return Ok(c);
    }
    let src = read(name)?;
    if Path::new(name).extension().is_some_and(|e| e == "thy") {
        let mut c = generate_relational_calculus(&parse_theory(&src)?, true)?;
        c.name = name.to_string();
        return Ok(c);
    }
    Ok(parse_calculus(name, &src)?)
}

fn interpretation_json(i: &Interpretation) -> BTreeMap<String, Value> {
    i.iter().map(|(v, b)| (v.0.clone(), json!(b))).collect()
}

fn interpretation_line(i: &Interpretation) -> String {
    let v: Vec<String> = i.iter().map(|(x, b)| format!("{}={}", x.0, u8::from(*b))).collect();
    v.join(", ")
}

fn millis(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn emit_document(d: &ProofDocument, a: &ProveArgs, calc: Option<&LabelledCalculus>) -> Result<()> {
    let text = d.to_json();
    println!("{text}");
    if a.check {
        let back = ProofDocument::from_json(&text)?;
        if !check_document(&back, calc)? {
            bail!("the emitted proof does not check");
        }
        eprintln!("check: ok");
    }
    Ok(())
}

fn prove(a: &ProveArgs) -> Result<Found> {
    let logic = a.logic;
    if a.calc.is_some() || logic == Some(Logic::K) {
        return prove_labelled_cmd(a);
    }
    match logic {
        Some(Logic::Bi) | None => prove_bi_cmd(a),
        Some(Logic::Ipl) => prove_ipl_cmd(a),
        Some(Logic::K) => unreachable!(),
    }
}

fn prove_bi_cmd(a: &ProveArgs) -> Result<Found> {
    let goal = parse_sequent(&a.goal, &Alphabet::bi())?;
    let t = Instant::now();
    if a.all {
        return all_proofs(reduce_lbib(&goal, a.common.depth)?.filter_map(|r| {
            let i = coherence(&r).ok()??;
            valuate(&r, &complete(&r, i)).ok()
        }));
    }
    let Some(o) = prove_bi(&goal, a.common.depth)? else {
        println!("not provable within depth {}", a.common.depth);
        return Ok(false);
    };
    match a.common.emit {
        Emit::Json => {
            let mut d = ProofDocument::new("bi", &goal.to_string(), DocNode::from_reduction(&o.reduction), millis(t));
            d.proof = Some(DocNode::from_proof(&o.proof));
            d.interpretation = interpretation_json(&o.interpretation);
            emit_document(&d, a, None)?;
        }
        Emit::Tree | Emit::Proof => {
            if a.show_constraints {
                print!("{}", o.reduction.render());
                println!("interpretation: {}", interpretation_line(&o.interpretation));
            } else {
                print!("{}", o.proof);
            }
            check_flag(a, ck_core::check_lbi_proof(&o.proof))?;
        }
        Emit::Ljplus | Emit::Rules => bail!("--emit ljplus and --emit rules do not apply to BI"),
    }
    Ok(true)
}

fn prove_ipl_cmd(a: &ProveArgs) -> Result<Found> {
    let goal = ipl_goal(&a.goal)?;
    let t = Instant::now();
    if a.all {
        return all_proofs(reduce_lkplusb(&goal, a.common.depth).filter_map(|r| {
            let cs: Vec<_> = r.constraints().into_iter().cloned().collect();
            let i = ck_core::ipl::complete(&r, solve(&cs)?);
            ergo_reduction(&r, &i).ok()
        }));
    }
    let Some(o) = prove_ipl(&goal, a.common.depth)? else {
        println!("not provable within depth {}", a.common.depth);
        return Ok(false);
    };
    match a.common.emit {
        Emit::Json => {
            let mut d = ProofDocument::new("ipl", &goal.to_string(), DocNode::from_reduction(&o.reduction), millis(t));
            d.proof = Some(DocNode::from_proof(&o.proof));
            d.interpretation = interpretation_json(&o.interpretation);
            emit_document(&d, a, None)?;
        }
        Emit::Ljplus | Emit::Proof => {
            print!("{}", o.proof);
            check_flag(a, ck_core::check_ljplus_proof(&o.proof))?;
        }
        Emit::Tree => {
            print!("{}", o.reduction.render());
            if a.show_constraints {
                println!("interpretation: {}", interpretation_line(&o.interpretation));
            }
            check_flag(a, ck_core::check_ljplus_proof(&o.proof))?;
        }
        Emit::Rules => bail!("--emit rules belongs to gen-calc"),
    }
    Ok(true)
}

fn prove_labelled_cmd(a: &ProveArgs) -> Result<Found> {
    let name = a.calc.clone().unwrap_or_else(|| "k-full".into());
    let calc = load_calculus(&name)?;
    let text = if a.goal.contains(':') { a.goal.clone() } else { format!("|- x: {}", a.goal) };
    let goal = parse_labelled_sequent(&text)?;
    let t = Instant::now();
    let Some(p) = prove_labelled(&calc, &goal, a.common.depth) else {
        println!("not provable within depth {}", a.common.depth);
        return Ok(false);
    };
    match a.common.emit {
        Emit::Json => {
            let logic = if a.logic == Some(Logic::K) { "k" } else { "labelled" };
            let mut d = ProofDocument::new(logic, &text, DocNode::from_labelled(&p), millis(t));
            d.calculus = Some(name);
            emit_document(&d, a, Some(&calc))?;
        }
        Emit::Tree | Emit::Proof => {
            print!("{p}");
            check_flag(a, ck_core::meta::check_labelled_proof(&calc, &p))?;
        }
        Emit::Ljplus | Emit::Rules => bail!("labelled proofs are emitted as tree or json"),
    }
    Ok(true)
}

fn check_flag(a: &ProveArgs, ok: bool) -> Result<()> {
    if a.check {
        if !ok {
            bail!("the proof does not check");
        }
        eprintln!("check: ok");
    }
    Ok(())
}

fn all_proofs<S: std::fmt::Display>(proofs: impl Iterator<Item = ck_core::Proof<S>>) -> Result<Found> {
    let mut seen = std::collections::HashSet::new();
    for p in proofs {
        let text = p.render();
        if seen.insert(text.clone()) {
            if seen.len() > 1 {
                println!();
            }
            print!("{text}");
        }
    }
    if seen.is_empty() {
        println!("not provable");
    }
    Ok(!seen.is_empty())
}

/// A bare formula is read as a goal with an empty antecedent.
fn ipl_goal(text: &str) -> Result<Sequent> {
    if text.contains("|-") {
        Ok(parse_sequent(text, &Alphabet::ipl())?)
    } else {
        Ok(parse_sequent(&format!("|- {text}"), &Alphabet::ipl())?)
    }
}

fn oracle(a: &OracleArgs) -> Result<Found> {
    let one = |g: &String| -> Result<(bool, String)> {
        match a.logic {
            Logic::Ipl => {
                let s = ipl_goal(g)?;
                if ipl_decide(&s) {
                    Ok((true, "valid\n".into()))
                } else {
                    let m = ipl_countermodel(&s, 4).map(|m| m.to_string()).unwrap_or_default();
                    Ok((false, format!("invalid\n{m}")))
                }
            }
            Logic::K => {
                let f = parse_formula(g, &Alphabet::modal())?;
                if k_decide(&f)? {
                    Ok((true, "valid\n".into()))
                } else {
                    let m = k_countermodel(&f)?.map(|m| m.to_string()).unwrap_or_default();
                    Ok((false, format!("invalid\n{m}")))
                }
            }
            Logic::Bi => Err(anyhow!("no oracle for BI")),
        }
    };
    let results = parallel_map(&a.goals, a.common.jobs, one);
    let mut all_valid = true;
    let many = a.goals.len() > 1;
    for (g, r) in a.goals.iter().zip(results) {
        let (valid, text) = r?;
        all_valid &= valid;
        if many {
            print!("{g}: {text}");
        } else {
            print!("{text}");
        }
    }
    Ok(all_valid)
}

/// Order-preserving map over `jobs` scoped threads.
fn parallel_map<T: Sync, R: Send>(xs: &[T], jobs: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let jobs = jobs.clamp(1, xs.len().max(1));
    if jobs == 1 {
        return xs.iter().map(&f).collect();
    }
    let chunk = xs.len().div_ceil(jobs);
    std::thread::scope(|s| {
        let handles: Vec<_> = xs.chunks(chunk).map(|c| s.spawn(|| c.iter().map(&f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

fn gen_calc(a: &GenArgs) -> Result<Found> {
    let th = load_theory(&a.theory)?;
    let mut c = generate_relational_calculus(&th, a.simplify)?;
    c.name = a.theory.clone();
    match a.common.emit {
        Emit::Rules | Emit::Tree => print!("{}", rules_file(&c)),
        Emit::Json => println!("{}", serde_json::to_string_pretty(&c)?),
        Emit::Ljplus => {
            for r in propositional_encoding(&c)? {
                println!("{r}");
            }
        }
        Emit::Proof => bail!("gen-calc emits rules, json or ljplus"),
    }
    Ok(true)
}

fn blp(a: &BlpArgs) -> Result<Found> {
    let src = if a.program == "courses" { COURSES.to_string() } else { read(&a.program)? };
    let program = parse_program(&src)?;
    let goal = parse_goal(&a.goal)?;
    let q = Query { program: program.clone(), goal };
    let mut answers = run_blp(&q, a.common.depth);
    if !a.all {
        answers.truncate(1);
    }
    if a.check {
        for x in &answers {
            if !check_lb_proof(&program, &x.proof) {
                bail!("proof of `{}` does not check", x.line());
            }
        }
    }
    match a.common.emit {
        Emit::Json => println!("{}", serde_json::to_string_pretty(&answers)?),
        Emit::Proof => {
            for (i, x) in answers.iter().enumerate() {
                if i > 0 {
                    println!();
                }
                println!("{}", x.line());
                print!("{}", x.proof);
            }
        }
        Emit::Tree => {
            for x in &answers {
                println!("{}", x.line());
            }
        }
        Emit::Ljplus | Emit::Rules => bail!("blp emits answers as tree, proof or json"),
    }
    if answers.is_empty() {
        println!("no");
    }
    Ok(!answers.is_empty())
}

fn solve_cmd(a: &SolveArgs) -> Result<Found> {
    let c = parse_constraint(&a.constraint)?;
    let cs = [c];
    let sols = if a.all {
        let vars: Vec<_> = cs[0].vars().into_iter().collect();
        all_solutions(&cs, &vars)?
    } else {
        solve(&cs).into_iter().collect()
    };
    match a.common.emit {
        Emit::Json => {
            let v: Vec<_> = sols.iter().map(interpretation_json).collect();
            println!("{}", serde_json::to_string_pretty(&v)?);
        }
        _ => {
            for s in &sols {
                println!("{}", interpretation_line(s));
            }
            if sols.is_empty() {
                println!("unsat");
            }
        }
    }
    Ok(!sols.is_empty())
}
