use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use ck_bench::{BI_GOALS, IPL_GOALS, K_GOALS};
use ck_core::blp::{parse_program, run_blp, Goal, Query, COURSES};
use ck_core::boolean::{parse_constraint, solve};
use ck_core::meta::{builtin_theory, generate_relational_calculus, parse_labelled_sequent, prove_labelled};
use ck_core::syntax::{parse_sequent, Alphabet};
use ck_core::{prove_bi, prove_ipl};

fn bi(c: &mut Criterion) {
    let goals: Vec<_> = BI_GOALS.iter().map(|g| parse_sequent(g, &Alphabet::bi()).unwrap()).collect();
    c.bench_function("prove_bi", |b| {
        b.iter(|| {
            for g in &goals {
                black_box(prove_bi(g, 4).unwrap());
            }
        })
    });
}

fn ipl(c: &mut Criterion) {
    let goals: Vec<_> = IPL_GOALS.iter().map(|g| parse_sequent(g, &Alphabet::ipl()).unwrap()).collect();
    c.bench_function("prove_ipl", |b| {
        b.iter(|| {
            for g in &goals {
                black_box(prove_ipl(g, 8).unwrap());
            }
        })
    });
}

fn labelled(c: &mut Criterion) {
    let th = builtin_theory("k-full").unwrap();
    c.bench_function("generate_k_full", |b| b.iter(|| black_box(generate_relational_calculus(&th, true).unwrap())));
    let calc = generate_relational_calculus(&th, true).unwrap();
    let goals: Vec<_> = K_GOALS.iter().map(|g| parse_labelled_sequent(g).unwrap()).collect();
    c.bench_function("prove_labelled_k", |b| {
        b.iter(|| {
            for g in &goals {
                black_box(prove_labelled(&calc, g, 6));
            }
        })
    });
}

fn blp(c: &mut Criterion) {
    let q = Query {
        program: parse_program(COURSES).unwrap(),
        goal: ck_core::blp::parse_goal("s(X,Y,Z)").unwrap(),
    };
    assert!(matches!(q.goal, Goal::Atom(_)));
    c.bench_function("blp_courses_all", |b| b.iter(|| black_box(run_blp(&q, 1).len())));
}

fn boolean(c: &mut Criterion) {
    let cs = [parse_constraint("x1*~x2 = 1 & (x3 = 1 || x4*x5 = 1) & x6 + x7 = 1 & ~x1*x3 = 0").unwrap()];
    c.bench_function("solve", |b| b.iter(|| black_box(solve(&cs))));
}

criterion_group!(benches, bi, ipl, labelled, blp, boolean);
criterion_main!(benches);
