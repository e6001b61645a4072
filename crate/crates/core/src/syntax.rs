//! Object-language syntax: alphabets, formulas, bunches and sequents.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lex::{Cursor, Tok};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Formula {
    Atom(String),
    Top,
    Bot,
    MTop,
    Not(Box<Formula>),
    Box(Box<Formula>),
    Dia(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Star(Box<Formula>, Box<Formula>),
    Wand(Box<Formula>, Box<Formula>),
}

pub fn atom(s: &str) -> Formula {
    Formula::Atom(s.to_string())
}
pub fn not(a: Formula) -> Formula {
    Formula::Not(Box::new(a))
}
pub fn boxf(a: Formula) -> Formula {
    Formula::Box(Box::new(a))
}
pub fn dia(a: Formula) -> Formula {
    Formula::Dia(Box::new(a))
}
pub fn and(a: Formula, b: Formula) -> Formula {
    Formula::And(Box::new(a), Box::new(b))
}
pub fn or(a: Formula, b: Formula) -> Formula {
    Formula::Or(Box::new(a), Box::new(b))
}
pub fn imp(a: Formula, b: Formula) -> Formula {
    Formula::Imp(Box::new(a), Box::new(b))
}
pub fn star(a: Formula, b: Formula) -> Formula {
    Formula::Star(Box::new(a), Box::new(b))
}
pub fn wand(a: Formula, b: Formula) -> Formula {
    Formula::Wand(Box::new(a), Box::new(b))
}

impl Formula {
    /// Operator name as used in alphabets and generic `op(args)` syntax.
    pub fn op_name(&self) -> Option<&'static str> {
        Some(match self {
            Formula::Atom(_) => return None,
            Formula::Top => "top",
            Formula::Bot => "bot",
            Formula::MTop => "mtop",
            Formula::Not(_) => "not",
            Formula::Box(_) => "box",
            Formula::Dia(_) => "dia",
            Formula::And(..) => "and",
            Formula::Or(..) => "or",
            Formula::Imp(..) => "imp",
            Formula::Star(..) => "star",
            Formula::Wand(..) => "wand",
        })
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(_) | Formula::Top | Formula::Bot | Formula::MTop => vec![],
            Formula::Not(a) | Formula::Box(a) | Formula::Dia(a) => vec![a],
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Imp(a, b)
            | Formula::Star(a, b)
            | Formula::Wand(a, b) => vec![a, b],
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn modal_depth(&self) -> usize {
        let inner = self.children().iter().map(|c| c.modal_depth()).max().unwrap_or(0);
        match self {
            Formula::Box(_) | Formula::Dia(_) => inner + 1,
            _ => inner,
        }
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut s = BTreeSet::new();
        self.collect_atoms(&mut s);
        s
    }

    fn collect_atoms(&self, s: &mut BTreeSet<String>) {
        if let Formula::Atom(a) = self {
            s.insert(a.clone());
        }
        for c in self.children() {
            c.collect_atoms(s);
        }
    }

    /// Distinct subformulas, children before parents.
    pub fn subformulas(&self) -> Vec<Formula> {
        let mut out: Vec<Formula> = Vec::new();
        self.collect_subs(&mut out);
        out
    }

    fn collect_subs(&self, out: &mut Vec<Formula>) {
        for c in self.children() {
            c.collect_subs(out);
        }
        if !out.contains(self) {
            out.push(self.clone());
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Formula::Imp(..) | Formula::Wand(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) | Formula::Star(..) => 3,
            _ => 4,
        }
    }
}

/// All formulas with exactly `n` connectives over `atoms`.
pub fn enumerate_formulas(
    atoms: &[&str],
    unary: &[fn(Formula) -> Formula],
    binary: &[fn(Formula, Formula) -> Formula],
    n: usize,
) -> Vec<Formula> {
    let mut by: Vec<Vec<Formula>> = vec![atoms.iter().map(|a| atom(a)).collect()];
    for k in 1..=n {
        let mut out = Vec::new();
        for u in unary {
            out.extend(by[k - 1].iter().map(|f| u(f.clone())));
        }
        for b in binary {
            for i in 0..k {
                for l in &by[i] {
                    for r in &by[k - 1 - i] {
                        out.push(b(l.clone(), r.clone()));
                    }
                }
            }
        }
        by.push(out);
    }
    by.swap_remove(n)
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn side(f: &mut fmt::Formatter<'_>, c: &Formula, paren: bool) -> fmt::Result {
            if paren {
                write!(f, "({c})")
            } else {
                write!(f, "{c}")
            }
        }
        match self {
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Top => write!(f, "top"),
            Formula::Bot => write!(f, "bot"),
            Formula::MTop => write!(f, "mtop"),
            Formula::Not(a) => {
                write!(f, "~")?;
                side(f, a, a.prec() < 4)
            }
            Formula::Box(a) | Formula::Dia(a) => {
                write!(f, "{} ", self.op_name().unwrap())?;
                side(f, a, a.prec() < 4)
            }
            Formula::And(a, b) | Formula::Star(a, b) | Formula::Or(a, b) => {
                let p = self.prec();
                let sym = match self {
                    Formula::And(..) => "&",
                    Formula::Star(..) => "*",
                    _ => "|",
                };
                side(f, a, a.prec() < p)?;
                write!(f, " {sym} ")?;
                side(f, b, b.prec() <= p)
            }
            Formula::Imp(a, b) | Formula::Wand(a, b) => {
                let sym = if matches!(self, Formula::Imp(..)) { "->" } else { "-*" };
                side(f, a, a.prec() <= 1)?;
                write!(f, " {sym} ")?;
                side(f, b, b.prec() < 1)
            }
        }
    }
}

/// A propositional alphabet. `atoms == None` admits every lowercase identifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    pub atoms: Option<BTreeSet<String>>,
    pub operators: BTreeMap<String, usize>,
    pub data_constructors: BTreeMap<String, usize>,
}

impl Alphabet {
    fn with(ops: &[(&str, usize)]) -> Alphabet {
        Alphabet {
            atoms: None,
            operators: ops.iter().map(|(n, a)| (n.to_string(), *a)).collect(),
            data_constructors: [(",".to_string(), 2), (";".to_string(), 2)].into(),
        }
    }

    pub fn bi() -> Alphabet {
        Alphabet::with(&[
            ("top", 0),
            ("bot", 0),
            ("mtop", 0),
            ("and", 2),
            ("or", 2),
            ("imp", 2),
            ("star", 2),
            ("wand", 2),
        ])
    }

    pub fn ipl() -> Alphabet {
        Alphabet::with(&[("top", 0), ("bot", 0), ("not", 1), ("and", 2), ("or", 2), ("imp", 2)])
    }

    pub fn modal() -> Alphabet {
        let mut a = Alphabet::ipl();
        a.operators.insert("box".into(), 1);
        a.operators.insert("dia".into(), 1);
        a
    }

    pub fn all() -> Alphabet {
        let mut a = Alphabet::bi();
        for (n, k) in [("not", 1), ("box", 1), ("dia", 1)] {
            a.operators.insert(n.into(), k);
        }
        a
    }

    fn check_op(&self, name: &str, found: usize, offset: usize) -> Result<()> {
        match self.operators.get(name) {
            None => Err(Error::UnknownSymbol {
                name: name.to_string(),
                offset,
            }),
            Some(&k) if k != found => Err(Error::Arity {
                name: name.to_string(),
                expected: k,
                found,
                offset,
            }),
            Some(_) => Ok(()),
        }
    }

    fn check_atom(&self, name: &str, offset: usize) -> Result<()> {
        match &self.atoms {
            Some(set) if !set.contains(name) => Err(Error::UnknownSymbol {
                name: name.to_string(),
                offset,
            }),
            _ => Ok(()),
        }
    }
}

impl Default for Alphabet {
    fn default() -> Self {
        Alphabet::all()
    }
}

fn build(name: &str, mut args: Vec<Formula>) -> Formula {
    let mut next = || Box::new(args.remove(0));
    match name {
        "top" => Formula::Top,
        "bot" => Formula::Bot,
        "mtop" => Formula::MTop,
        "not" => Formula::Not(next()),
        "box" => Formula::Box(next()),
        "dia" => Formula::Dia(next()),
        "and" => Formula::And(next(), next()),
        "or" => Formula::Or(next(), next()),
        "imp" => Formula::Imp(next(), next()),
        "star" => Formula::Star(next(), next()),
        "wand" => Formula::Wand(next(), next()),
        _ => unreachable!("unknown operator {name}"),
    }
}

const OPS: [&str; 11] = [
    "top", "bot", "mtop", "not", "box", "dia", "and", "or", "imp", "star", "wand",
];

pub(crate) fn is_atom_name(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_lowercase()) && !OPS.contains(&s) && s != "ex"
}

pub(crate) struct FormulaParser<'a> {
    pub alpha: &'a Alphabet,
}

impl FormulaParser<'_> {
    pub fn imp(&self, c: &mut Cursor) -> Result<Formula> {
        let at = c.offset();
        let lhs = self.or(c)?;
        let name = match c.peek() {
            Tok::Arrow => "imp",
            Tok::Wand => "wand",
            _ => return Ok(lhs),
        };
        self.alpha.check_op(name, 2, at)?;
        c.bump();
        let rhs = self.imp(c)?;
        Ok(build(name, vec![lhs, rhs]))
    }

    fn or(&self, c: &mut Cursor) -> Result<Formula> {
        let mut lhs = self.and(c)?;
        while *c.peek() == Tok::Bar {
            self.alpha.check_op("or", 2, c.offset())?;
            c.bump();
            let rhs = self.and(c)?;
            lhs = or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&self, c: &mut Cursor) -> Result<Formula> {
        let mut lhs = self.unary(c)?;
        loop {
            let name = match c.peek() {
                Tok::Amp => "and",
                Tok::Star => "star",
                _ => return Ok(lhs),
            };
            self.alpha.check_op(name, 2, c.offset())?;
            c.bump();
            let rhs = self.unary(c)?;
            lhs = build(name, vec![lhs, rhs]);
        }
    }

    fn unary(&self, c: &mut Cursor) -> Result<Formula> {
        let at = c.offset();
        match c.peek().clone() {
            Tok::Tilde => {
                self.alpha.check_op("not", 1, at)?;
                c.bump();
                Ok(not(self.unary(c)?))
            }
            Tok::LParen => {
                c.bump();
                let f = self.imp(c)?;
                c.expect(&Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(name) => {
                c.bump();
                if *c.peek() == Tok::LParen && name != "box" && name != "dia" {
                    if !OPS.contains(&name.as_str()) || self.alpha.operators.get(&name).is_none() {
                        return Err(Error::UnknownSymbol { name, offset: at });
                    }
                    c.bump();
                    let mut args = Vec::new();
                    if *c.peek() != Tok::RParen {
                        args.push(self.imp(c)?);
                        while c.eat(&Tok::Comma) {
                            args.push(self.imp(c)?);
                        }
                    }
                    c.expect(&Tok::RParen)?;
                    self.alpha.check_op(&name, args.len(), at)?;
                    return Ok(build(&name, args));
                }
                match name.as_str() {
                    "top" | "bot" | "mtop" => {
                        self.alpha.check_op(&name, 0, at)?;
                        Ok(build(&name, vec![]))
                    }
                    "box" | "dia" => {
                        self.alpha.check_op(&name, 1, at)?;
                        let a = self.unary(c)?;
                        Ok(build(&name, vec![a]))
                    }
                    _ if is_atom_name(&name) => {
                        self.alpha.check_atom(&name, at)?;
                        Ok(Formula::Atom(name))
                    }
                    _ => Err(Error::UnknownSymbol { name, offset: at }),
                }
            }
            _ => c.unexpected(),
        }
    }
}

pub fn parse_formula(text: &str, alphabet: &Alphabet) -> Result<Formula> {
    let mut c = Cursor::new(text)?;
    let f = FormulaParser { alpha: alphabet }.imp(&mut c)?;
    c.expect_eof()?;
    Ok(f)
}

/// Bunch constructors: `;` (additive, unit ∅+) and `,` (multiplicative, unit ∅×).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Ctor {
    Add,
    Mul,
}

impl Ctor {
    pub fn sep(self) -> &'static str {
        match self {
            Ctor::Add => ";",
            Ctor::Mul => ",",
        }
    }
    pub fn unit(self) -> &'static str {
        match self {
            Ctor::Add => "e+",
            Ctor::Mul => "ex",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Bunch {
    Formula(Formula),
    Unit(Ctor),
    Node(Ctor, Vec<Bunch>),
}

impl Bunch {
    pub fn node(c: Ctor, kids: Vec<Bunch>) -> Bunch {
        Bunch::Node(c, kids)
    }

    pub fn as_formula(&self) -> Option<&Formula> {
        match self {
            Bunch::Formula(f) => Some(f),
            _ => None,
        }
    }

    /// Canonical representative of the ≡-class.
    pub fn normalize(&self) -> Bunch {
        match self {
            Bunch::Node(c, kids) => {
                let mut flat = Vec::new();
                for k in kids {
                    match k.normalize() {
                        Bunch::Unit(u) if u == *c => {}
                        Bunch::Node(d, inner) if d == *c => flat.extend(inner),
                        n => flat.push(n),
                    }
                }
                flat.sort();
                match flat.len() {
                    0 => Bunch::Unit(*c),
                    1 => flat.pop().unwrap(),
                    _ => Bunch::Node(*c, flat),
                }
            }
            b => b.clone(),
        }
    }

    pub fn get(&self, path: &[usize]) -> Option<&Bunch> {
        match path.split_first() {
            None => Some(self),
            Some((i, rest)) => match self {
                Bunch::Node(_, kids) => kids.get(*i)?.get(rest),
                _ => None,
            },
        }
    }

    /// All formula leaves, left to right.
    pub fn formulas(&self) -> Vec<&Formula> {
        match self {
            Bunch::Formula(f) => vec![f],
            Bunch::Unit(_) => vec![],
            Bunch::Node(_, kids) => kids.iter().flat_map(|k| k.formulas()).collect(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Bunch::Node(_, kids) => 1 + kids.iter().map(|k| k.size()).sum::<usize>(),
            _ => 1,
        }
    }
}

impl From<Formula> for Bunch {
    fn from(f: Formula) -> Bunch {
        Bunch::Formula(f)
    }
}

impl fmt::Display for Bunch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bunch::Formula(x) => write!(f, "{x}"),
            Bunch::Unit(c) => write!(f, "{}", c.unit()),
            Bunch::Node(c, kids) => {
                for (i, k) in kids.iter().enumerate() {
                    if i > 0 {
                        write!(f, " {} ", c.sep())?;
                    }
                    match k {
                        Bunch::Node(..) => write!(f, "({k})")?,
                        _ => write!(f, "{k}")?,
                    }
                }
                Ok(())
            }
        }
    }
}

pub fn coherent_equiv(b1: &Bunch, b2: &Bunch) -> bool {
    b1.normalize() == b2.normalize()
}

pub fn replace_subbunch(whole: &Bunch, path: &[usize], replacement: Bunch) -> Result<Bunch> {
    fn go(b: &Bunch, path: &[usize], full: &[usize], r: Bunch) -> Result<Bunch> {
        match path.split_first() {
            None => Ok(r),
            Some((i, rest)) => match b {
                Bunch::Node(c, kids) if *i < kids.len() => {
                    let mut kids = kids.clone();
                    kids[*i] = go(&kids[*i], rest, full, r)?;
                    Ok(Bunch::Node(*c, kids))
                }
                _ => Err(Error::InvalidPath(full.to_vec())),
            },
        }
    }
    go(whole, path, path, replacement)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Sequent {
    pub ante: Bunch,
    pub succ: Bunch,
}

impl Sequent {
    pub fn new(ante: Bunch, succ: Bunch) -> Sequent {
        Sequent { ante, succ }
    }

    pub fn equiv(&self, other: &Sequent) -> bool {
        coherent_equiv(&self.ante, &other.ante) && coherent_equiv(&self.succ, &other.succ)
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} |- {}", self.ante, self.succ)
    }
}

pub(crate) struct BunchParser<'a> {
    pub fp: FormulaParser<'a>,
}

impl BunchParser<'_> {
    pub fn semi(&self, c: &mut Cursor) -> Result<Bunch> {
        self.level(c, Ctor::Add)
    }

    fn level(&self, c: &mut Cursor, ctor: Ctor) -> Result<Bunch> {
        let item = |c: &mut Cursor| match ctor {
            Ctor::Add => self.level(c, Ctor::Mul),
            Ctor::Mul => self.item(c),
        };
        let tok = match ctor {
            Ctor::Add => Tok::Semi,
            Ctor::Mul => Tok::Comma,
        };
        let mut items = vec![item(c)?];
        while c.eat(&tok) {
            items.push(item(c)?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Bunch::Node(ctor, items)
        })
    }

    fn item(&self, c: &mut Cursor) -> Result<Bunch> {
        match c.peek() {
            Tok::EPlus => {
                c.bump();
                return Ok(Bunch::Unit(Ctor::Add));
            }
            Tok::Ident(s) if s == "ex" => {
                c.bump();
                return Ok(Bunch::Unit(Ctor::Mul));
            }
            _ => {}
        }
        let save = c.pos;
        let first = self.fp.imp(c);
        if let Ok(f) = &first {
            if matches!(
                c.peek(),
                Tok::Comma | Tok::Semi | Tok::RParen | Tok::Turnstile | Tok::Eof
            ) {
                return Ok(Bunch::Formula(f.clone()));
            }
        }
        let ferr_pos = c.pos;
        c.pos = save;
        if *c.peek() == Tok::LParen {
            c.bump();
            let b = self.semi(c)?;
            c.expect(&Tok::RParen)?;
            return Ok(b);
        }
        match first {
            Err(e) => Err(e),
            Ok(_) => {
                c.pos = ferr_pos;
                c.unexpected()
            }
        }
    }
}

pub fn parse_bunch(text: &str, alphabet: &Alphabet) -> Result<Bunch> {
    let mut c = Cursor::new(text)?;
    let b = BunchParser {
        fp: FormulaParser { alpha: alphabet },
    }
    .semi(&mut c)?;
    c.expect_eof()?;
    Ok(b)
}

/// `<bunch> |- <datum>`; an empty side parses as ∅×.
pub fn parse_sequent(text: &str, alphabet: &Alphabet) -> Result<Sequent> {
    let mut c = Cursor::new(text)?;
    let p = BunchParser {
        fp: FormulaParser { alpha: alphabet },
    };
    let ante = if *c.peek() == Tok::Turnstile {
        Bunch::Unit(Ctor::Mul)
    } else {
        p.semi(&mut c)?
    };
    c.expect(&Tok::Turnstile)?;
    let succ = if *c.peek() == Tok::Eof {
        Bunch::Unit(Ctor::Mul)
    } else {
        p.semi(&mut c)?
    };
    c.expect_eof()?;
    Ok(Sequent { ante, succ })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pf(s: &str) -> Formula {
        parse_formula(s, &Alphabet::all()).unwrap()
    }
    fn pb(s: &str) -> Bunch {
        parse_bunch(s, &Alphabet::all()).unwrap()
    }

    #[test]
    fn parses_star_tree() {
        assert_eq!(pf("p * (q * r)"), star(atom("p"), star(atom("q"), atom("r"))));
        assert_eq!(pf("(p -> q) -> p"), imp(imp(atom("p"), atom("q")), atom("p")));
    }

    #[test]
    fn precedence() {
        assert_eq!(pf("~p & q | r -> s"), imp(or(and(not(atom("p")), atom("q")), atom("r")), atom("s")));
        assert_eq!(pf("p -> q -> r"), imp(atom("p"), imp(atom("q"), atom("r"))));
        assert_eq!(pf("p * q & r"), and(star(atom("p"), atom("q")), atom("r")));
        assert_eq!(pf("box ~dia p"), boxf(not(dia(atom("p")))));
    }

    #[test]
    fn trailing_comma_offset() {
        assert!(matches!(
            parse_formula("p ,", &Alphabet::all()),
            Err(Error::Syntax { offset: 2, .. })
        ));
    }

    #[test]
    fn unknown_and_arity() {
        assert!(matches!(
            parse_formula("box p", &Alphabet::bi()),
            Err(Error::UnknownSymbol { .. })
        ));
        assert!(matches!(
            parse_formula("and(p)", &Alphabet::all()),
            Err(Error::Arity { expected: 2, found: 1, .. })
        ));
        assert!(matches!(
            parse_formula("frob(p)", &Alphabet::all()),
            Err(Error::UnknownSymbol { .. })
        ));
        assert_eq!(pf("imp(p, and(q, r))"), pf("p -> q & r"));
        let mut a = Alphabet::all();
        a.atoms = Some(["p".to_string()].into());
        assert!(matches!(parse_formula("p & q", &a), Err(Error::UnknownSymbol { .. })));
    }

    #[test]
    fn bunch_parse_and_print() {
        let b = pb("p , (q ; r)");
        assert_eq!(
            b,
            Bunch::Node(
                Ctor::Mul,
                vec![
                    atom("p").into(),
                    Bunch::Node(Ctor::Add, vec![atom("q").into(), atom("r").into()])
                ]
            )
        );
        assert_eq!(b.to_string(), "p , (q ; r)");
        assert_eq!(pb("(p -> q) , e+ ; ex").to_string(), "(p -> q , e+) ; ex");
        assert_eq!(pb("((p , q))"), pb("p , q"));
    }

    #[test]
    fn coherence_examples() {
        assert!(coherent_equiv(&pb("p ; q"), &pb("q ; p")));
        assert!(coherent_equiv(&pb("p , ex"), &pb("p")));
        assert!(!coherent_equiv(&pb("p ; q"), &pb("p , q")));
        assert!(coherent_equiv(&pb("p , (q , r)"), &pb("(r , p) , q")));
        assert!(!coherent_equiv(&pb("p , e+"), &pb("p")));
    }

    #[test]
    fn replace_examples() {
        let b = pb("p , q");
        assert_eq!(replace_subbunch(&b, &[1], pb("r ; s")).unwrap(), pb("p , (r ; s)"));
        assert_eq!(replace_subbunch(&b, &[], Bunch::Unit(Ctor::Add)).unwrap(), Bunch::Unit(Ctor::Add));
        assert_eq!(replace_subbunch(&b, &[0, 0], pb("r")), Err(Error::InvalidPath(vec![0, 0])));
        assert!(replace_subbunch(&b, &[2], pb("r")).is_err());
    }

    #[test]
    fn sequent_parse() {
        let s = parse_sequent("p , q , r |- p * (q * r)", &Alphabet::bi()).unwrap();
        assert_eq!(s.ante, pb("p , q , r"));
        let e = parse_sequent("|- p | ~p", &Alphabet::ipl()).unwrap();
        assert_eq!(e.ante, Bunch::Unit(Ctor::Mul));
        assert_eq!(parse_sequent("e+ |- p", &Alphabet::ipl()).unwrap().ante, Bunch::Unit(Ctor::Add));
    }

    pub(crate) fn arb_formula() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            prop::sample::select(vec!["p", "q", "r", "s1"]).prop_map(atom),
            Just(Formula::Top),
            Just(Formula::Bot),
            Just(Formula::MTop),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(not),
                inner.clone().prop_map(boxf),
                inner.clone().prop_map(dia),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| or(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| imp(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| star(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| wand(a, b)),
            ]
        })
    }

    fn arb_bunch() -> impl Strategy<Value = Bunch> {
        let leaf = prop_oneof![
            4 => prop::sample::select(vec!["p", "q", "r"]).prop_map(|s| Bunch::Formula(atom(s))),
            1 => Just(Bunch::Unit(Ctor::Add)),
            1 => Just(Bunch::Unit(Ctor::Mul)),
        ];
        leaf.prop_recursive(3, 12, 3, |inner| {
            (
                prop::sample::select(vec![Ctor::Add, Ctor::Mul]),
                prop::collection::vec(inner, 2..4),
            )
                .prop_map(|(c, k)| Bunch::Node(c, k))
        })
    }

    /// Random coherence-preserving rewrites: permute, regroup, insert units.
    fn shuffle(b: &Bunch, seed: &mut u64) -> Bunch {
        fn next(seed: &mut u64) -> usize {
            *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (*seed >> 33) as usize
        }
        match b {
            Bunch::Node(c, kids) => {
                let mut k: Vec<Bunch> = kids.iter().map(|x| shuffle(x, seed)).collect();
                let n = k.len();
                let r = next(seed);
                k.rotate_left(r % n);
                if next(seed) % 3 == 0 {
                    k.push(Bunch::Unit(*c));
                }
                if k.len() > 2 && next(seed) % 2 == 0 {
                    let tail = k.split_off(1);
                    k.push(Bunch::Node(*c, tail));
                }
                Bunch::Node(*c, k)
            }
            other => {
                if next(seed) % 4 == 0 {
                    Bunch::Node(Ctor::Mul, vec![other.clone(), Bunch::Unit(Ctor::Mul)])
                } else {
                    other.clone()
                }
            }
        }
    }

    proptest! {
        #[test]
        fn print_parse_roundtrip(f in arb_formula()) {
            prop_assert_eq!(parse_formula(&f.to_string(), &Alphabet::all()).unwrap(), f);
        }

        #[test]
        fn bunch_roundtrip(b in arb_bunch()) {
            let back = parse_bunch(&b.to_string(), &Alphabet::all()).unwrap();
            prop_assert!(coherent_equiv(&back, &b));
        }

        #[test]
        fn equiv_is_equivalence(a in arb_bunch(), b in arb_bunch(), c in arb_bunch()) {
            prop_assert!(coherent_equiv(&a, &a));
            prop_assert_eq!(coherent_equiv(&a, &b), coherent_equiv(&b, &a));
            if coherent_equiv(&a, &b) && coherent_equiv(&b, &c) {
                prop_assert!(coherent_equiv(&a, &c));
            }
        }

        #[test]
        fn shuffles_are_equivalent(a in arb_bunch(), seed in any::<u64>()) {
            let mut s = seed;
            let a2 = shuffle(&a, &mut s);
            prop_assert!(coherent_equiv(&a, &a2));
            let b = shuffle(&a2, &mut s);
            prop_assert!(coherent_equiv(&a, &b));
        }

        #[test]
        fn equiv_is_congruence(d in arb_bunch(), ctx in arb_bunch(), seed in any::<u64>()) {
            let mut s = seed;
            let d2 = shuffle(&d, &mut s);
            let paths = leaf_paths(&ctx);
            let path = &paths[(seed as usize) % paths.len()];
            let g1 = replace_subbunch(&ctx, path, d).unwrap();
            let g2 = replace_subbunch(&ctx, path, d2).unwrap();
            prop_assert!(coherent_equiv(&g1, &g2));
        }
    }

    fn leaf_paths(b: &Bunch) -> Vec<Vec<usize>> {
        match b {
            Bunch::Node(_, kids) => kids
                .iter()
                .enumerate()
                .flat_map(|(i, k)| {
                    leaf_paths(k).into_iter().map(move |mut p| {
                        p.insert(0, i);
                        p
                    })
                })
                .collect(),
            _ => vec![vec![]],
        }
    }
}
