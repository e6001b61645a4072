//! Independent ground truth: IPL and K validity, Kripke model evaluation.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::syntax::{Formula, Sequent};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    K,
    Ipl,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KripkeModel {
    pub worlds: usize,
    pub rel: BTreeSet<(usize, usize)>,
    pub val: BTreeMap<String, BTreeSet<usize>>,
}

impl KripkeModel {
    pub fn succ(&self, w: usize) -> impl Iterator<Item = usize> + '_ {
        self.rel.range((w, 0)..(w + 1, 0)).map(|&(_, u)| u)
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.worlds).all(|w| self.rel.contains(&(w, w)))
    }

    /// Atom valuations are upward closed along R.
    pub fn is_persistent(&self) -> bool {
        self.val.values().all(|ws| ws.iter().all(|&w| self.succ(w).all(|u| ws.contains(&u))))
    }
}

impl fmt::Display for KripkeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "worlds: {}", self.worlds)?;
        let r: Vec<String> = self.rel.iter().map(|(a, b)| format!("{a}R{b}")).collect();
        writeln!(f, "R: {{{}}}", r.join(", "))?;
        for (p, ws) in &self.val {
            let ws: Vec<String> = ws.iter().map(|w| w.to_string()).collect();
            writeln!(f, "{p}: {{{}}}", ws.join(", "))?;
        }
        Ok(())
    }
}

/// Clause-directed satisfaction. In IPL mode `¬φ` is read as `φ → ⊥` and R must be reflexive.
pub fn model_check(m: &KripkeModel, w: usize, phi: &Formula, mode: Mode) -> Result<bool> {
    if w >= m.worlds {
        return Err(Error::Invalid(format!("world {w} not in model")));
    }
    if mode == Mode::Ipl && !m.is_reflexive() {
        return Err(Error::Invalid("intuitionistic frames are reflexive".into()));
    }
    fn go(m: &KripkeModel, w: usize, phi: &Formula, mode: Mode) -> Result<bool> {
        let all = |f: &Formula, g: Option<&Formula>| -> Result<bool> {
            for u in m.succ(w) {
                let pre = match g {
                    Some(g) => go(m, u, g, mode)?,
                    None => true,
                };
                if pre && !go(m, u, f, mode)? {
                    return Ok(false);
                }
            }
            Ok(true)
        };
        Ok(match phi {
            Formula::Atom(p) => m.val.get(p).ok_or_else(|| Error::Unbound(p.clone()))?.contains(&w),
            Formula::Top | Formula::MTop => true,
            Formula::Bot => false,
            Formula::And(a, b) | Formula::Star(a, b) => go(m, w, a, mode)? && go(m, w, b, mode)?,
            Formula::Or(a, b) => go(m, w, a, mode)? || go(m, w, b, mode)?,
            Formula::Imp(a, b) | Formula::Wand(a, b) => match mode {
                Mode::K => !go(m, w, a, mode)? || go(m, w, b, mode)?,
                Mode::Ipl => all(b, Some(a))?,
            },
            Formula::Not(a) => match mode {
                Mode::K => !go(m, w, a, mode)?,
                Mode::Ipl => all(&Formula::Bot, Some(a))?,
            },
            Formula::Box(a) => all(a, None)?,
            Formula::Dia(a) => {
                let mut any = false;
                for u in m.succ(w) {
                    if go(m, u, a, mode)? {
                        any = true;
                        break;
                    }
                }
                any
            }
        })
    }
    go(m, w, phi, mode)
}

// ---------------------------------------------------------------------------
// IPL: multi-succedent search

type Side = BTreeSet<Formula>;

fn ipl_search(mut g: Side, mut d: Side, hist: &mut Vec<(Side, Side)>) -> bool {
    // saturate with the invertible rules
    loop {
        if g.iter().any(|f| d.contains(f)) || g.contains(&Formula::Bot) || d.contains(&Formula::Top) {
            return true;
        }
        let lf = g.iter().find(|f| matches!(f, Formula::And(..) | Formula::Or(..) | Formula::Top)).cloned();
        if let Some(f) = lf {
            g.remove(&f);
            match f {
                Formula::And(a, b) => {
                    g.insert(*a);
                    g.insert(*b);
                }
                Formula::Or(a, b) => {
                    let mut g2 = g.clone();
                    g.insert(*a);
                    g2.insert(*b);
                    return ipl_search(g, d.clone(), hist) && ipl_search(g2, d, hist);
                }
                _ => {}
            }
            continue;
        }
        // principals stay in Δ; a disjunction or conjunction with a part
        // already present is redundant
        let rf = d
            .iter()
            .find(|f| match f {
                Formula::And(a, b) => !d.contains(a) && !d.contains(b),
                Formula::Or(a, b) => !d.contains(a) || !d.contains(b),
                _ => false,
            })
            .cloned();
        if let Some(f) = rf {
            match f {
                Formula::And(a, b) => {
                    let mut d2 = d.clone();
                    d.insert(*a);
                    d2.insert(*b);
                    return ipl_search(g.clone(), d, hist) && ipl_search(g, d2, hist);
                }
                Formula::Or(a, b) => {
                    d.insert(*a);
                    d.insert(*b);
                }
                _ => {}
            }
            continue;
        }
        // left implication / negation: principal kept on the left premiss
        let li = g.iter().find_map(|f| match f {
            Formula::Imp(a, b) if !d.contains(a) && !g.contains(b) => Some((f.clone(), (**a).clone(), Some((**b).clone()))),
            Formula::Not(a) if !d.contains(a) => Some((f.clone(), (**a).clone(), None)),
            _ => None,
        });
        if let Some((f, a, b)) = li {
            let mut d1 = d.clone();
            d1.insert(a);
            if !ipl_search(g.clone(), d1, hist) {
                return false;
            }
            match b {
                Some(b) => {
                    g.remove(&f);
                    g.insert(b);
                    continue;
                }
                None => return true,
            }
        }
        break;
    }
    if hist.iter().any(|(hg, hd)| *hg == g && *hd == d) {
        return false;
    }
    hist.push((g.clone(), d.clone()));
    let mut found = false;
    for f in &d {
        let (a, b) = match f {
            Formula::Imp(a, b) => (a, Some(b)),
            Formula::Not(a) => (a, None),
            _ => continue,
        };
        let mut g2 = g.clone();
        g2.insert((**a).clone());
        let d2: Side = b.map(|b| (**b).clone()).into_iter().collect();
        if ipl_search(g2, d2, hist) {
            found = true;
            break;
        }
    }
    hist.pop();
    found
}

/// IPL validity of a (possibly multi-succedent) sequent by exhaustive
/// multi-succedent search with a per-branch loop check.
pub fn ipl_decide(goal: &Sequent) -> bool {
    let g: Side = goal.ante.formulas().into_iter().cloned().collect();
    let d: Side = goal.succ.formulas().into_iter().cloned().collect();
    ipl_search(g, d, &mut Vec::new())
}

/// Rooted partial orders on `n` worlds with 0 least, as up-set bitmasks per world.
fn rooted_posets(n: usize) -> Vec<Vec<u8>> {
    let pairs: Vec<(usize, usize)> = (1..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        let mut up: Vec<u8> = (0..n).map(|i| 1 << i).collect();
        up[0] = ((1u32 << n) - 1) as u8;
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if mask >> k & 1 == 1 {
                up[i] |= 1 << j;
            }
        }
        let transitive = (0..n).all(|i| (0..n).all(|j| up[i] >> j & 1 == 0 || up[j] & !up[i] == 0));
        if transitive {
            out.push(up);
        }
    }
    out
}

fn upsets(up: &[u8]) -> Vec<u8> {
    let n = up.len();
    (0u16..(1 << n))
        .map(|s| s as u8)
        .filter(|&s| (0..n).all(|w| s >> w & 1 == 0 || up[w] & !s == 0))
        .collect()
}

fn truth_set(f: &Formula, up: &[u8], val: &HashMap<&str, u8>) -> u8 {
    let n = up.len();
    let full = ((1u32 << n) - 1) as u8;
    let imp = |a: u8, b: u8| -> u8 { (0..n).filter(|&w| up[w] & a & !b == 0).fold(0, |s, w| s | 1 << w) };
    match f {
        Formula::Atom(p) => val.get(p.as_str()).copied().unwrap_or(0),
        Formula::Top | Formula::MTop => full,
        Formula::Bot => 0,
        Formula::And(a, b) | Formula::Star(a, b) => truth_set(a, up, val) & truth_set(b, up, val),
        Formula::Or(a, b) => truth_set(a, up, val) | truth_set(b, up, val),
        Formula::Imp(a, b) | Formula::Wand(a, b) => imp(truth_set(a, up, val), truth_set(b, up, val)),
        Formula::Not(a) => imp(truth_set(a, up, val), 0),
        Formula::Box(a) | Formula::Dia(a) => truth_set(a, up, val),
    }
}

/// Countermodel search over rooted posets with at most `max_worlds` worlds
/// (at most 7): all antecedent formulas true and all succedent formulas false at the root.
pub fn ipl_countermodel(goal: &Sequent, max_worlds: usize) -> Option<KripkeModel> {
    let gs: Vec<&Formula> = goal.ante.formulas();
    let ds: Vec<&Formula> = goal.succ.formulas();
    let mut atoms = BTreeSet::new();
    for f in gs.iter().chain(&ds) {
        atoms.extend(f.atoms());
    }
    let atoms: Vec<String> = atoms.into_iter().collect();
    for n in 1..=max_worlds.min(7) {
        for up in rooted_posets(n) {
            let us = upsets(&up);
            let total = us.len().pow(atoms.len() as u32);
            for code in 0..total {
                let mut c = code;
                let mut val = HashMap::new();
                for a in &atoms {
                    val.insert(a.as_str(), us[c % us.len()]);
                    c /= us.len();
                }
                let holds = |f: &&Formula| truth_set(f, &up, &val) & 1 == 1;
                if gs.iter().all(holds) && !ds.iter().any(holds) {
                    let upr = &up;
                    let rel = (0..n).flat_map(|i| (0..n).filter(move |&j| upr[i] >> j & 1 == 1).map(move |j| (i, j))).collect();
                    let val = atoms
                        .iter()
                        .map(|a| (a.clone(), (0..n).filter(|&w| val[a.as_str()] >> w & 1 == 1).collect()))
                        .collect();
                    return Some(KripkeModel { worlds: n, rel, val });
                }
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// K: sweep over truth profiles of finite trees

/// Candidate (valuation, child set) pairs examined before giving up.
pub const K_LIMIT: usize = 2_000_000;

struct Profile {
    bits: u128,
    val: u32,
    kids: Vec<usize>,
}

fn k_profile(subs: &[Formula], atoms: &[String], val: u32, kids: &[&Profile]) -> u128 {
    let mut bits = 0u128;
    for (i, f) in subs.iter().enumerate() {
        let idx = |g: &Formula| subs.iter().position(|h| h == g).unwrap();
        let t = |g: &Formula, b: u128| b >> idx(g) & 1 == 1;
        let v = match f {
            Formula::Atom(p) => val >> atoms.iter().position(|a| a == p).unwrap() & 1 == 1,
            Formula::Top | Formula::MTop => true,
            Formula::Bot => false,
            Formula::Not(a) => !t(a, bits),
            Formula::And(a, b) | Formula::Star(a, b) => t(a, bits) && t(b, bits),
            Formula::Or(a, b) => t(a, bits) || t(b, bits),
            Formula::Imp(a, b) | Formula::Wand(a, b) => !t(a, bits) || t(b, bits),
            Formula::Box(a) => kids.iter().all(|k| t(a, k.bits)),
            Formula::Dia(a) => kids.iter().any(|k| t(a, k.bits)),
        };
        if v {
            bits |= 1 << i;
        }
    }
    bits
}

fn combinations(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    if !out(cur) {
        return false;
    }
    if cur.len() == k {
        return true;
    }
    for i in start..n {
        cur.push(i);
        let go_on = combinations(n, k, i + 1, cur, out);
        cur.pop();
        if !go_on {
            return false;
        }
    }
    true
}

/// A countermodel to `phi` in K, if one exists. Every truth profile realizable
/// by a finite tree of height at most the modal depth is generated level by
/// level, children restricted to at most one witness per modal subformula.
pub fn k_countermodel(phi: &Formula) -> Result<Option<KripkeModel>> {
    let mut subs = phi.subformulas();
    subs.sort_by_key(|f| f.size());
    subs.dedup();
    if subs.len() > 128 {
        return Err(Error::BoundExceeded(format!("{} subformulas (limit 128)", subs.len())));
    }
    let atoms: Vec<String> = phi.atoms().into_iter().collect();
    let modal = subs.iter().filter(|f| matches!(f, Formula::Box(_) | Formula::Dia(_))).count();
    let top = subs.iter().position(|f| f == phi).unwrap();
    let mut profiles: Vec<Profile> = Vec::new();
    let mut index: HashMap<u128, usize> = HashMap::new();
    let mut budget = K_LIMIT;
    for level in 0..=phi.modal_depth() {
        let prev = profiles.len();
        let mut fresh = Vec::new();
        for val in 0u32..(1 << atoms.len()) {
            let mut exhausted = false;
            let mut visit = |kids: &[usize]| {
                if budget == 0 {
                    exhausted = true;
                    return false;
                }
                budget -= 1;
                if level == 0 && !kids.is_empty() {
                    return false;
                }
                let ks: Vec<&Profile> = kids.iter().map(|&k| &profiles[k]).collect();
                let bits = k_profile(&subs, &atoms, val, &ks);
                if !index.contains_key(&bits) && !fresh.iter().any(|p: &Profile| p.bits == bits) {
                    fresh.push(Profile { bits, val, kids: kids.to_vec() });
                }
                true
            };
            combinations(prev, modal.min(prev), 0, &mut Vec::new(), &mut visit);
            if exhausted {
                return Err(Error::BoundExceeded(format!("more than {K_LIMIT} candidate worlds")));
            }
        }
        for p in fresh {
            index.insert(p.bits, profiles.len());
            profiles.push(p);
        }
    }
    let Some(root) = profiles.iter().position(|p| p.bits >> top & 1 == 0) else {
        return Ok(None);
    };
    let mut m = KripkeModel {
        worlds: 0,
        rel: BTreeSet::new(),
        val: atoms.iter().map(|a| (a.clone(), BTreeSet::new())).collect(),
    };
    fn unfold(p: usize, profiles: &[Profile], atoms: &[String], m: &mut KripkeModel) -> usize {
        let w = m.worlds;
        m.worlds += 1;
        for (i, a) in atoms.iter().enumerate() {
            if profiles[p].val >> i & 1 == 1 {
                m.val.get_mut(a).unwrap().insert(w);
            }
        }
        for &k in &profiles[p].kids {
            let u = unfold(k, profiles, atoms, m);
            m.rel.insert((w, u));
        }
        w
    }
    unfold(root, &profiles, &atoms, &mut m);
    Ok(Some(m))
}

/// Validity in K.
pub fn k_decide(phi: &Formula) -> Result<bool> {
    Ok(k_countermodel(phi)?.is_none())
}
