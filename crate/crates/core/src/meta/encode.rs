//! Propositional encoding of basic labelled rules.
//!
//! A basic sequent `(w : Γ1), …, (w : Γm), Π ▷ Σ, (w : Δ1), …, (w : Δn)` is read as
//! `Γ1, …, Γm, Γ ▷ Δ; Δ1; …; Δn`.

use std::fmt;

use super::calculus::{parse_calculus, Ctx, LRule, LabelledCalculus, MetaSeq};
use super::formula::{MAtom, Term};
use crate::error::{Error, Result};

pub const LJPLUS_RULES: &str = include_str!("../../data/ljplus.rules");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropSeq {
    pub ante: Vec<Term>,
    /// The context `Γ` is present.
    pub gamma: bool,
    pub succ: Vec<Term>,
    /// The context `Δ` is present.
    pub delta: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropRule {
    pub name: String,
    pub conclusion: PropSeq,
    pub premises: Vec<PropSeq>,
}

impl fmt::Display for PropSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut l: Vec<String> = self.ante.iter().map(|t| t.to_string()).collect();
        if self.gamma {
            l.push("Γ".into());
        }
        let mut r: Vec<String> = Vec::new();
        if self.delta {
            r.push("Δ".into());
        }
        r.extend(self.succ.iter().map(|t| t.to_string()));
        let r = if r.is_empty() { "∅".to_string() } else { r.join("; ") };
        if l.is_empty() {
            write!(f, "▷ {r}")
        } else {
            write!(f, "{} ▷ {r}", l.join(", "))
        }
    }
}

impl fmt::Display for PropRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.name, self.conclusion)?;
        if !self.premises.is_empty() {
            let ps: Vec<String> = self.premises.iter().map(|p| p.to_string()).collect();
            write!(f, "  <=  {}", ps.join("  |  "))?;
        }
        Ok(())
    }
}

impl PropRule {
    /// The same rule over the single world `w`.
    pub fn to_labelled(&self) -> LRule {
        let lift = |s: &PropSeq| {
            let sat = |t: &Term| MAtom::Sat(Term::var("w"), t.clone());
            MetaSeq {
                ante: s.ante.iter().map(sat).collect(),
                succ: s.succ.iter().map(sat).collect(),
                pi: if s.gamma { Ctx::Keep } else { Ctx::Drop },
                sigma: if s.delta { Ctx::Keep } else { Ctx::Drop },
            }
        };
        LRule {
            name: self.name.clone(),
            conclusion: lift(&self.conclusion),
            premises: self.premises.iter().map(lift).collect(),
            fresh: vec![],
            occurs: vec![],
            invertible: false,
        }
    }
}

fn encode_seq(rule: &str, s: &MetaSeq) -> Result<PropSeq> {
    let mut world: Option<Term> = None;
    let mut side = |v: &'_ [MAtom]| -> Result<Vec<Term>> {
        let mut out = Vec::new();
        for a in v {
            match a {
                MAtom::Sat(w, f) => {
                    if world.as_ref().is_some_and(|x| x != w) {
                        return Err(Error::NotBasic(rule.to_string()));
                    }
                    world = Some(w.clone());
                    out.push(f.clone());
                }
                MAtom::Any(n) => out.push(Term::var(n)),
                _ => return Err(Error::NotBasic(rule.to_string())),
            }
        }
        Ok(out)
    };
    let ante = side(&s.ante)?;
    let succ = side(&s.succ)?;
    Ok(PropSeq {
        ante,
        gamma: s.pi != Ctx::Drop,
        succ,
        delta: s.sigma != Ctx::Drop,
    })
}

fn same_multiset(a: &[Term], b: &[Term]) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort();
    b.sort();
    a == b
}

/// `ν` applied rule by rule. Rules without satisfaction atoms (`⊥`, reflexivity) and
/// rules whose encoding is the identity (the data constructors) are omitted.
pub fn propositional_encoding(c: &LabelledCalculus) -> Result<Vec<PropRule>> {
    let mut out = Vec::new();
    for r in &c.rules {
        let seqs = std::iter::once(&r.conclusion).chain(&r.premises);
        let atoms: Vec<&MAtom> = seqs.clone().flat_map(|s| s.ante.iter().chain(&s.succ)).collect();
        if atoms.iter().any(|a| matches!(a, MAtom::Bot)) || !atoms.iter().any(|a| matches!(a, MAtom::Sat(..) | MAtom::Any(_))) {
            continue;
        }
        let conclusion = encode_seq(&r.name, &r.conclusion)?;
        let premises = r.premises.iter().map(|p| encode_seq(&r.name, p)).collect::<Result<Vec<_>>>()?;
        if let [p] = premises.as_slice() {
            let c = &conclusion;
            let flat = |ts: &[Term]| -> Vec<Term> {
                let mut out = Vec::new();
                for t in ts {
                    flatten(t, &mut out);
                }
                out
            };
            if p.gamma == c.gamma
                && p.delta == c.delta
                && same_multiset(&flat(&p.ante), &flat(&c.ante))
                && same_multiset(&flat(&p.succ), &flat(&c.succ))
            {
                continue;
            }
        }
        out.push(PropRule {
            name: r.name.clone(),
            conclusion,
            premises,
        });
    }
    Ok(out)
}

/// Bunch constructors are read as the sequent's own separators.
fn flatten(t: &Term, out: &mut Vec<Term>) {
    match t {
        Term::App(op, a) if (op == "comma" || op == "semi") && a.len() == 2 => {
            flatten(&a[0], out);
            flatten(&a[1], out);
        }
        _ => out.push(t.clone()),
    }
}

/// LJ+ as a single-world calculus, for comparing encodings against.
pub fn ljplus_calculus() -> LabelledCalculus {
    parse_calculus("ljplus", LJPLUS_RULES).expect("bundled rule file parses")
}
