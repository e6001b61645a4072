//! Synthetic rules by generic hereditary reduction in G3c, and calculus generation.

use std::collections::BTreeSet;
use std::fmt;

use super::calculus::{LRule, LabelledCalculus, MetaSeq};
use super::formula::{connective_symbol, is_tractable, MAtom, MetaFormula, Term};
use super::theory::Theory;
use crate::error::{Error, Result};

use MetaFormula as M;

/// A collapsed reduction `Φ, Π ▷ Σ ⟸ premises`.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticRule {
    pub principal: MetaFormula,
    pub premises: Vec<MetaSeq>,
    pub fresh: Vec<String>,
    pub occurs: Vec<String>,
}

impl fmt::Display for SyntheticRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}, Π ▷ Σ", self.principal)?;
        if !self.premises.is_empty() {
            let ps: Vec<String> = self.premises.iter().map(|p| p.to_string()).collect();
            write!(f, "  <=  {}", ps.join("  |  "))?;
        }
        for y in &self.fresh {
            write!(f, "  [{y} fresh]")?;
        }
        if !self.occurs.is_empty() {
            write!(f, "  [{} occurs in Π, Σ]", self.occurs.join(", "))?;
        }
        Ok(())
    }
}

/// Names for instantiation terms and eigenvariables.
struct Namer {
    used: BTreeSet<String>,
    /// `T`, `T1`, ... and `Y`, `Y1`, ... instead of the bound names.
    schematic: bool,
}

impl Namer {
    fn pick(&mut self, base: &str) -> String {
        let mut n = base.to_string();
        let mut i = 0;
        while self.used.contains(&n) {
            i += 1;
            n = if self.schematic { format!("{base}{i}") } else { format!("{base}{}", "'".repeat(i)) };
        }
        self.used.insert(n.clone());
        n
    }
}

#[derive(Default)]
struct Trace {
    fresh: Vec<String>,
    occurs: Vec<String>,
}

fn atom_of(f: &MetaFormula) -> Option<MAtom> {
    match f {
        M::Atom(a) => Some(a.clone()),
        _ => None,
    }
}

/// Reduces every non-atomic formula, left side first, until only meta-atoms remain.
fn reduce(mut ante: Vec<MetaFormula>, mut succ: Vec<MetaFormula>, nm: &mut Namer, tr: &mut Trace) -> Vec<MetaSeq> {
    if let Some(i) = ante.iter().position(|f| !matches!(f, M::Atom(_))) {
        let f = ante.remove(i);
        return match f {
            M::And(a, b) => {
                ante.insert(i, *b);
                ante.insert(i, *a);
                reduce(ante, succ, nm, tr)
            }
            M::Or(a, b) => {
                let mut l = ante.clone();
                l.insert(i, *a);
                let mut r = ante;
                r.insert(i, *b);
                let mut out = reduce(l, succ.clone(), nm, tr);
                out.extend(reduce(r, succ, nm, tr));
                out
            }
            M::Imp(a, b) => {
                let mut s1 = succ.clone();
                s1.push(*a);
                let mut out = reduce(ante.clone(), s1, nm, tr);
                ante.insert(i, *b);
                out.extend(reduce(ante, succ, nm, tr));
                out
            }
            M::Forall(x, body) => {
                let t = nm.pick(if nm.schematic { "T" } else { &x });
                tr.occurs.push(t.clone());
                ante.insert(i, body.instantiate(&x, &Term::Var(t)));
                reduce(ante, succ, nm, tr)
            }
            M::Exists(x, body) => {
                let y = nm.pick(if nm.schematic { "Y" } else { &x });
                tr.fresh.push(y.clone());
                ante.insert(i, body.instantiate(&x, &Term::Var(y)));
                reduce(ante, succ, nm, tr)
            }
            M::Atom(_) => unreachable!(),
        };
    }
    if let Some(i) = succ.iter().position(|f| !matches!(f, M::Atom(_))) {
        let f = succ.remove(i);
        return match f {
            M::And(a, b) => {
                let mut l = succ.clone();
                l.insert(i, *a);
                let mut r = succ;
                r.insert(i, *b);
                let mut out = reduce(ante.clone(), l, nm, tr);
                out.extend(reduce(ante, r, nm, tr));
                out
            }
            M::Or(a, b) => {
                succ.insert(i, *b);
                succ.insert(i, *a);
                reduce(ante, succ, nm, tr)
            }
            M::Imp(a, b) => {
                ante.push(*a);
                succ.insert(i, *b);
                reduce(ante, succ, nm, tr)
            }
            M::Forall(x, body) => {
                let y = nm.pick(if nm.schematic { "Y" } else { &x });
                tr.fresh.push(y.clone());
                succ.insert(i, body.instantiate(&x, &Term::Var(y)));
                reduce(ante, succ, nm, tr)
            }
            M::Exists(x, body) => {
                let t = nm.pick(if nm.schematic { "T" } else { &x });
                tr.occurs.push(t.clone());
                succ.insert(i, body.instantiate(&x, &Term::Var(t)));
                reduce(ante, succ, nm, tr)
            }
            M::Atom(_) => unreachable!(),
        };
    }
    vec![MetaSeq::new(
        ante.iter().filter_map(atom_of).collect(),
        succ.iter().filter_map(atom_of).collect(),
    )]
}

fn bound_names(f: &MetaFormula, out: &mut BTreeSet<String>) {
    match f {
        M::Atom(a) => {
            let mut v = Vec::new();
            a.vars(&mut v);
            out.extend(v);
        }
        M::And(a, b) | M::Or(a, b) | M::Imp(a, b) => {
            bound_names(a, out);
            bound_names(b, out);
        }
        M::Forall(x, a) | M::Exists(x, a) => {
            out.insert(x.clone());
            bound_names(a, out);
        }
    }
}

/// Collapses the generic hereditary reduction of `Φ, Π ▷ Σ`. Instantiation terms are
/// named `T…` and eigenvariables `Y…`.
pub fn synthesize_rule(phi: &MetaFormula) -> Result<SyntheticRule> {
    if !is_tractable(phi)? {
        return Err(Error::NotTractable(phi.to_string()));
    }
    let mut used = BTreeSet::new();
    bound_names(phi, &mut used);
    let mut nm = Namer { used, schematic: true };
    let mut tr = Trace::default();
    let premises = reduce(vec![phi.clone()], vec![], &mut nm, &mut tr);
    Ok(SyntheticRule {
        principal: phi.clone(),
        premises,
        fresh: tr.fresh,
        occurs: tr.occurs,
    })
}

/// The atom a clause defines: `(w : ∘(…))` on one side of the top implication.
/// `true` when it is the hypothesis (the rule then acts on the left).
fn head(body: &MetaFormula) -> Option<(MAtom, bool)> {
    let defined = |f: &MetaFormula| match f {
        M::Atom(a @ MAtom::Sat(_, Term::App(..))) => Some(a.clone()),
        _ => None,
    };
    match body {
        M::Imp(a, b) => defined(a).map(|h| (h, true)).or_else(|| defined(b).map(|h| (h, false))),
        _ => None,
    }
}

fn strip_closure(f: &MetaFormula) -> (Vec<String>, &MetaFormula) {
    let mut vars = Vec::new();
    let mut cur = f;
    while let M::Forall(x, b) = cur {
        vars.push(x.clone());
        cur = b;
    }
    (vars, cur)
}

fn any(n: &str) -> MAtom {
    MAtom::Any(n.to_string())
}

fn structural(simplify: bool, explicit: bool) -> Vec<LRule> {
    let rule = |name: &str, c: MetaSeq, ps: Vec<MetaSeq>| LRule {
        name: name.to_string(),
        conclusion: c,
        premises: ps,
        fresh: vec![],
        occurs: vec![],
        invertible: false,
    };
    let mut out = vec![
        rule("ax", MetaSeq::new(vec![any("Φ")], vec![any("Φ")]), vec![]),
        rule("⊥", MetaSeq::new(vec![MAtom::Bot], vec![]), vec![]),
    ];
    let cl = rule(
        "cL",
        MetaSeq::new(vec![any("Φ")], vec![]),
        vec![MetaSeq::new(vec![any("Φ"), any("Φ")], vec![])],
    );
    let cr = rule(
        "cR",
        MetaSeq::new(vec![], vec![any("Φ")]),
        vec![MetaSeq::new(vec![], vec![any("Φ"), any("Φ")])],
    );
    match (simplify, explicit) {
        (false, _) => out.extend([cl, cr]),
        (true, true) => out.push(LRule { name: "c".into(), ..cl }),
        (true, false) => {}
    }
    out
}

fn only(p: &MetaSeq) -> Option<(&MAtom, bool)> {
    match (p.ante.as_slice(), p.succ.as_slice()) {
        ([a], []) => Some((a, true)),
        ([], [a]) => Some((a, false)),
        _ => None,
    }
}

/// Forward/back-chaining post-pass. A premise consisting of one atom on the right
/// closes by `ax` exactly when that atom is already on the left, so the atom moves into
/// the conclusion; dually on the left. The defined atom of a clause always moves; with
/// implicit contraction relational hypotheses move too, and the moved atoms are kept in
/// the premises when the rule instantiates an inner quantifier. Clauses without a
/// defined atom (frame conditions) move all their hypotheses and keep them.
fn simplify(raw: &LRule, closure: &[String], hd: Option<(MAtom, bool)>, explicit: bool) -> LRule {
    let mut prem = raw.premises.clone();
    let mut concl = MetaSeq::new(vec![], vec![]);
    let take = |prem: &mut Vec<MetaSeq>, pred: &dyn Fn(&MAtom, bool) -> bool| -> Vec<(MAtom, bool)> {
        let mut moved = Vec::new();
        prem.retain(|p| match only(p) {
            Some((a, left)) if pred(a, left) => {
                moved.push((a.clone(), left));
                false
            }
            _ => true,
        });
        moved
    };
    let inner: Vec<&String> = raw.occurs.iter().filter(|v| !closure.contains(v)).collect();
    let mut moved = Vec::new();
    let keep;
    match &hd {
        Some((h, hyp)) => {
            moved.extend(take(&mut prem, &|a, left| a == h && left != *hyp));
            if !explicit {
                moved.extend(take(&mut prem, &|a, left| !left && matches!(a, MAtom::Rel(..))));
            }
            keep = !explicit && !inner.is_empty();
        }
        None => {
            moved.extend(take(&mut prem, &|_, left| !left));
            if moved.is_empty() && prem.len() == 1 {
                moved.extend(take(&mut prem, &|_, left| left));
            }
            keep = true;
        }
    }
    for (a, left) in &moved {
        if *left {
            concl.succ.push(a.clone());
        } else {
            concl.ante.push(a.clone());
        }
    }
    if keep {
        for p in prem.iter_mut() {
            let mut ante = concl.ante.clone();
            ante.append(&mut p.ante);
            p.ante = ante;
            let mut succ = concl.succ.clone();
            succ.append(&mut p.succ);
            p.succ = succ;
        }
    }
    if prem.len() > 1 {
        prem.retain(|p| !(p.ante == vec![MAtom::Bot] && p.succ.is_empty()));
    }
    let cvars = concl.vars();
    let occurs: Vec<String> = raw.occurs.iter().filter(|v| !cvars.contains(v)).cloned().collect();
    LRule {
        name: raw.name.clone(),
        invertible: occurs.is_empty(),
        conclusion: concl,
        premises: prem,
        fresh: raw.fresh.clone(),
        occurs,
    }
}

fn rule_name(hd: &Option<(MAtom, bool)>, clause_name: &Option<String>, i: usize) -> String {
    match (hd, clause_name) {
        (Some((MAtom::Sat(_, Term::App(op, _)), hyp)), _) => {
            format!("{}{}", if *hyp { "L" } else { "R" }, connective_symbol(op))
        }
        (_, Some(n)) => n.clone(),
        _ => format!("r{i}"),
    }
}

/// G3c(Ω): `ax`, `⊥`, contraction and one synthetic rule per clause, with Ω suppressed.
/// With `simplify` the rules go through the chaining post-pass; contraction is then
/// dropped (implicit) or kept as a single left rule `c` (explicit-contraction theories).
pub fn generate_relational_calculus(theory: &Theory, simplify_rules: bool) -> Result<LabelledCalculus> {
    let explicit = theory.explicit_contraction;
    let mut rules = structural(simplify_rules, explicit);
    for (i, cl) in theory.clauses.iter().enumerate() {
        if !is_tractable(&cl.formula)? {
            return Err(Error::NotTractable(cl.formula.to_string()));
        }
        let (closure, body) = strip_closure(&cl.formula);
        let mut used = BTreeSet::new();
        bound_names(&cl.formula, &mut used);
        let mut nm = Namer { used, schematic: false };
        let mut tr = Trace::default();
        let premises = reduce(vec![body.clone()], vec![], &mut nm, &mut tr);
        let hd = head(body);
        let mut occurs = closure.clone();
        occurs.extend(tr.occurs);
        let raw = LRule {
            name: rule_name(&hd, &cl.name, i),
            conclusion: MetaSeq::new(vec![], vec![]),
            premises,
            fresh: tr.fresh,
            occurs,
            invertible: false,
        };
        rules.push(if simplify_rules { simplify(&raw, &closure, hd, explicit) } else { raw });
    }
    Ok(LabelledCalculus {
        name: "generated".into(),
        rules,
    })
}
