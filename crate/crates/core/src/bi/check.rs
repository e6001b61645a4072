use crate::syntax::{coherent_equiv, Bunch, Ctor, Formula, Sequent};
use crate::tree::Proof;

fn positions(b: &Bunch) -> Vec<(Vec<usize>, &Bunch)> {
    let mut out = vec![(vec![], b)];
    if let Bunch::Node(_, kids) = b {
        for (i, k) in kids.iter().enumerate() {
            for (mut p, x) in positions(k) {
                p.insert(0, i);
                out.push((p, x));
            }
        }
    }
    out
}

fn put(b: &Bunch, path: &[usize], new: Bunch) -> Bunch {
    match path.split_first() {
        None => new,
        Some((i, rest)) => match b {
            Bunch::Node(c, kids) => {
                let mut kids = kids.clone();
                kids[*i] = put(&kids[*i], rest, new);
                Bunch::Node(*c, kids)
            }
            _ => b.clone(),
        },
    }
}

fn parent<'a>(b: &'a Bunch, path: &[usize], c: Ctor) -> Option<&'a Vec<Bunch>> {
    let (_, pp) = path.split_last()?;
    match b.get(pp)? {
        Bunch::Node(d, kids) if *d == c => Some(kids),
        _ => None,
    }
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    let n = n.min(16);
    (0u32..(1 << n)).map(move |m| (0..n).filter(|i| m >> i & 1 == 1).collect())
}

fn pick(kids: &[Bunch], ix: &[usize]) -> Vec<Bunch> {
    ix.iter().map(|&i| kids[i].clone()).collect()
}

fn node(c: Ctor, kids: Vec<Bunch>) -> Bunch {
    match kids.len() {
        0 => Bunch::Unit(c),
        _ => Bunch::Node(c, kids),
    }
}

fn succ(s: &Sequent) -> Option<Formula> {
    s.succ.normalize().as_formula().cloned()
}

/// Leaf occurrences of formulas in the normalized antecedent.
fn leaves(ante: &Bunch) -> Vec<(Vec<usize>, Formula)> {
    positions(ante)
        .into_iter()
        .filter_map(|(p, b)| b.as_formula().map(|f| (p, f.clone())))
        .collect()
}

fn check_node(c: &Sequent, prems: &[&Sequent], rule: &str) -> Result<(), String> {
    let ante = c.ante.normalize();
    let phi = succ(c).ok_or("succedent is not a formula")?;
    let ps: Vec<(Bunch, Formula)> = prems
        .iter()
        .map(|p| succ(p).map(|f| (p.ante.normalize(), f)))
        .collect::<Option<_>>()
        .ok_or("premise succedent is not a formula")?;
    let eqv = |a: &Bunch, b: &Bunch| coherent_equiv(a, b);
    let arity = |n: usize| {
        if ps.len() == n {
            Ok(())
        } else {
            Err(format!("{rule} expects {n} premise(s), found {}", ps.len()))
        }
    };
    let same_succ = |i: usize| ps[i].1 == phi;
    let ok = match rule {
        "taut" | "ax" => {
            arity(0)?;
            eqv(&ante, &Bunch::Formula(phi.clone()))
        }
        "⊥L" => {
            arity(0)?;
            leaves(&ante).iter().any(|(_, f)| *f == Formula::Bot)
        }
        "⊤*R" => {
            arity(0)?;
            phi == Formula::MTop && eqv(&ante, &Bunch::Unit(Ctor::Mul))
        }
        "⊤R" => {
            arity(0)?;
            phi == Formula::Top && eqv(&ante, &Bunch::Unit(Ctor::Add))
        }
        "*R" => {
            arity(2)?;
            match &phi {
                Formula::Star(a, b) => {
                    ps[0].1 == **a
                        && ps[1].1 == **b
                        && eqv(&ante, &Bunch::Node(Ctor::Mul, vec![ps[0].0.clone(), ps[1].0.clone()]))
                }
                _ => false,
            }
        }
        "-*R" | "→R" => {
            arity(1)?;
            let (c, a, b) = match (&phi, rule) {
                (Formula::Wand(a, b), "-*R") => (Ctor::Mul, a, b),
                (Formula::Imp(a, b), "→R") => (Ctor::Add, a, b),
                _ => return Err(format!("{rule} on {phi}")),
            };
            ps[0].1 == **b && eqv(&ps[0].0, &Bunch::Node(c, vec![ante.clone(), Bunch::Formula((**a).clone())]))
        }
        "∧R" => {
            arity(2)?;
            match &phi {
                Formula::And(a, b) => {
                    ps[0].1 == **a && ps[1].1 == **b && eqv(&ps[0].0, &ante) && eqv(&ps[1].0, &ante)
                }
                _ => false,
            }
        }
        "∨R1" | "∨R2" => {
            arity(1)?;
            match &phi {
                Formula::Or(a, b) => {
                    let want = if rule == "∨R1" { a } else { b };
                    ps[0].1 == **want && eqv(&ps[0].0, &ante)
                }
                _ => false,
            }
        }
        "∧L" | "*L" | "⊤L" | "⊤*L" => {
            arity(1)?;
            same_succ(0)
                && leaves(&ante).iter().any(|(p, f)| {
                    let new = match (f, rule) {
                        (Formula::And(a, b), "∧L") => {
                            Bunch::Node(Ctor::Add, vec![Bunch::Formula((**a).clone()), Bunch::Formula((**b).clone())])
                        }
                        (Formula::Star(a, b), "*L") => {
                            Bunch::Node(Ctor::Mul, vec![Bunch::Formula((**a).clone()), Bunch::Formula((**b).clone())])
                        }
                        (Formula::Top, "⊤L") => Bunch::Unit(Ctor::Add),
                        (Formula::MTop, "⊤*L") => Bunch::Unit(Ctor::Mul),
                        _ => return false,
                    };
                    eqv(&ps[0].0, &put(&ante, p, new))
                })
        }
        "∨L" => {
            arity(2)?;
            same_succ(0)
                && same_succ(1)
                && leaves(&ante).iter().any(|(p, f)| match f {
                    Formula::Or(a, b) => {
                        eqv(&ps[0].0, &put(&ante, p, Bunch::Formula((**a).clone())))
                            && eqv(&ps[1].0, &put(&ante, p, Bunch::Formula((**b).clone())))
                    }
                    _ => false,
                })
        }
        "→L" => {
            arity(2)?;
            same_succ(1)
                && leaves(&ante).iter().any(|(p, f)| {
                    let Formula::Imp(a, b) = f else { return false };
                    if ps[0].1 != **a || !eqv(&ps[1].0, &put(&ante, p, Bunch::Formula((**b).clone()))) {
                        return false;
                    }
                    let me = p.last().copied();
                    let sibs: Vec<Bunch> = parent(&ante, p, Ctor::Add)
                        .map(|k| k.iter().enumerate().filter(|(i, _)| Some(*i) != me).map(|(_, x)| x.clone()).collect())
                        .unwrap_or_default();
                    subsets(sibs.len()).any(|ix| eqv(&ps[0].0, &node(Ctor::Add, pick(&sibs, &ix))))
                })
        }
        "-*L" => {
            arity(2)?;
            same_succ(1)
                && leaves(&ante).iter().any(|(p, f)| {
                    let Formula::Wand(a, b) = f else { return false };
                    if ps[0].1 != **a {
                        return false;
                    }
                    let psi = Bunch::Formula((**b).clone());
                    let Some(kids) = parent(&ante, p, Ctor::Mul) else {
                        return eqv(&ps[0].0, &Bunch::Unit(Ctor::Mul)) && eqv(&ps[1].0, &put(&ante, p, psi));
                    };
                    let me = *p.last().unwrap();
                    let pp = &p[..p.len() - 1];
                    let others: Vec<usize> = (0..kids.len()).filter(|i| *i != me).collect();
                    subsets(others.len()).any(|ix| {
                        let chosen: Vec<usize> = ix.iter().map(|&j| others[j]).collect();
                        let left = node(Ctor::Mul, pick(kids, &chosen));
                        let rest: Vec<Bunch> = kids
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| !chosen.contains(i))
                            .map(|(i, k)| if i == me { psi.clone() } else { k.clone() })
                            .collect();
                        eqv(&ps[0].0, &left) && eqv(&ps[1].0, &put(&ante, pp, node(Ctor::Mul, rest)))
                    })
                })
        }
        "w" => {
            arity(1)?;
            same_succ(0)
                && positions(&ante).iter().any(|(p, b)| {
                    if eqv(&ps[0].0, &put(&ante, p, Bunch::Unit(Ctor::Add))) {
                        return true;
                    }
                    let Bunch::Node(Ctor::Add, kids) = b else { return false };
                    subsets(kids.len()).any(|ix| {
                        let keep = pick(kids, &ix);
                        keep.len() < kids.len() && eqv(&ps[0].0, &put(&ante, p, node(Ctor::Add, keep)))
                    })
                })
        }
        "c" => {
            arity(1)?;
            same_succ(0)
                && positions(&ante).iter().any(|(p, b)| {
                    if eqv(&ps[0].0, &put(&ante, p, Bunch::Node(Ctor::Add, vec![(*b).clone(), (*b).clone()]))) {
                        return true;
                    }
                    let Bunch::Node(Ctor::Add, kids) = b else { return false };
                    subsets(kids.len()).any(|ix| {
                        let mut more = kids.clone();
                        more.extend(pick(kids, &ix));
                        !ix.is_empty() && eqv(&ps[0].0, &put(&ante, p, Bunch::Node(Ctor::Add, more)))
                    })
                })
        }
        "e" | "≡" => {
            arity(1)?;
            same_succ(0) && eqv(&ps[0].0, &ante)
        }
        _ => return Err(format!("unknown rule {rule}")),
    };
    if ok {
        Ok(())
    } else {
        Err(format!("not an instance of {rule}"))
    }
}

/// First failing inference: its path (premise indices from the root) and a message.
pub fn check_lbi_proof_diag(p: &Proof<Sequent>) -> Option<(Vec<usize>, String)> {
    let prems: Vec<&Sequent> = p.premises.iter().map(|q| &q.conclusion).collect();
    if let Err(msg) = check_node(&p.conclusion, &prems, &p.rule) {
        return Some((vec![], format!("{}: {msg}", p.conclusion)));
    }
    for (i, q) in p.premises.iter().enumerate() {
        if let Some((mut path, msg)) = check_lbi_proof_diag(q) {
            path.insert(0, i);
            return Some((path, msg));
        }
    }
    None
}

/// Whether `p` is an LBI proof, inferences read modulo coherent equivalence.
pub fn check_lbi_proof(p: &Proof<Sequent>) -> bool {
    check_lbi_proof_diag(p).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_sequent, Alphabet};

    fn s(x: &str) -> Sequent {
        parse_sequent(x, &Alphabet::bi()).unwrap()
    }

    #[test]
    fn hand_written_proofs() {
        let p = Proof::new(
            s("q , p |- p * q"),
            "*R",
            vec![Proof::leaf(s("p |- p"), "taut"), Proof::leaf(s("q |- q"), "taut")],
        );
        assert!(check_lbi_proof(&p));
        let bad = Proof::new(
            s("p |- p * p"),
            "*R",
            vec![Proof::leaf(s("p |- p"), "taut"), Proof::leaf(s("p |- p"), "taut")],
        );
        let (path, _) = check_lbi_proof_diag(&bad).unwrap();
        assert!(path.is_empty());
        let nested = Proof::new(
            s("p ; q |- p"),
            "w",
            vec![Proof::leaf(s("q |- p"), "taut")],
        );
        assert!(check_lbi_proof(&Proof::new(s("p ; q |- p"), "w", vec![Proof::leaf(s("p |- p"), "taut")])));
        assert_eq!(check_lbi_proof_diag(&nested).unwrap().0, vec![0]);
    }

    #[test]
    fn left_rules() {
        let wand = Proof::new(
            s("r , p , p -* q |- q * r"),
            "-*L",
            vec![
                Proof::leaf(s("p |- p"), "taut"),
                Proof::new(
                    s("r , q |- q * r"),
                    "*R",
                    vec![Proof::leaf(s("q |- q"), "taut"), Proof::leaf(s("r |- r"), "taut")],
                ),
            ],
        );
        assert!(check_lbi_proof(&wand));
        let imp = Proof::new(
            s("p ; p -> q |- q"),
            "→L",
            vec![Proof::leaf(s("p |- p"), "taut"), Proof::new(s("p ; q |- q"), "w", vec![Proof::leaf(s("q |- q"), "taut")])],
        );
        assert!(check_lbi_proof(&imp));
        let dup = Proof::new(s("p |- p & p"), "∧R", vec![Proof::leaf(s("p |- p"), "taut"), Proof::leaf(s("p |- p"), "taut")]);
        assert!(check_lbi_proof(&dup));
        let contr = Proof::new(s("p |- q"), "c", vec![Proof::leaf(s("p ; p |- q"), "taut")]);
        assert_eq!(check_lbi_proof_diag(&contr).unwrap().0, vec![0]);
    }
}
