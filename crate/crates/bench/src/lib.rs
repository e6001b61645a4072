//! Goal sets shared by the benches.

pub const BI_GOALS: &[&str] = &[
    "p , q , r |- p * (q * r)",
    "p , q |- q * p",
    "p * q |- q * p",
    "p -* q , p |- q",
    "(p ; q) |- p & q",
];

pub const IPL_GOALS: &[&str] = &[
    "|- ~~(p | ~p)",
    "p -> q , q -> r |- p -> r",
    "|- (p & q) -> (q & p)",
    "p | q |- q | p",
];

pub const K_GOALS: &[&str] = &[
    "|- x: box (p -> q) -> box p -> box q",
    "x: box (p & q) |- x: box p & box q",
    "|- x: ~box p -> dia ~p",
];
