//! Generic backward search over a constraint system.

use std::rc::Rc;

use crate::boolean::{solve, Constraint};
use crate::tree::Reduction;

#[derive(Debug, Clone)]
pub struct Step<S> {
    pub rule: String,
    pub premises: Vec<S>,
    pub side: Vec<Constraint>,
    /// Depth consumed; 0 for bookkeeping steps bounded by other means.
    pub cost: usize,
}

impl<S> Step<S> {
    pub fn new(rule: &str, premises: Vec<S>, side: Vec<Constraint>) -> Step<S> {
        Step {
            rule: rule.to_string(),
            premises,
            side,
            cost: 1,
        }
    }
}

/// A constraint system: the rule instances applicable backwards to a sequent.
pub trait System {
    type Seq: Clone;
    fn steps(&self, s: &Self::Seq) -> Vec<Step<Self::Seq>>;
}

/// Lazy stream of every closed reduction of `goal` within `depth`.
pub fn stream<Sys>(sys: Rc<Sys>, goal: Sys::Seq, depth: usize) -> Box<dyn Iterator<Item = Reduction<Sys::Seq>>>
where
    Sys: System + 'static,
    Sys::Seq: 'static,
{
    if depth == 0 {
        return Box::new(std::iter::empty());
    }
    let steps = sys.steps(&goal);
    Box::new(steps.into_iter().filter(move |s| s.cost <= depth).flat_map(move |step| {
        let seq = goal.clone();
        let d = depth - step.cost;
        let Step { rule, premises, side, .. } = step;
        product(sys.clone(), premises, d).map(move |mut kids| {
            kids.extend(side.iter().cloned().map(Reduction::Side));
            Reduction::Step {
                seq: seq.clone(),
                rule: rule.clone(),
                children: kids,
            }
        })
    }))
}

fn product<Sys>(sys: Rc<Sys>, goals: Vec<Sys::Seq>, depth: usize) -> Box<dyn Iterator<Item = Vec<Reduction<Sys::Seq>>>>
where
    Sys: System + 'static,
    Sys::Seq: 'static,
{
    if goals.is_empty() {
        return Box::new(std::iter::once(vec![]));
    }
    let mut rest = goals;
    let first = rest.remove(0);
    Box::new(stream(sys.clone(), first, depth).flat_map(move |r| {
        product(sys.clone(), rest.clone(), depth).map(move |mut tail| {
            tail.insert(0, r.clone());
            tail
        })
    }))
}

enum Kid {
    Node(usize),
    Side(Constraint),
}

struct Slot<S> {
    seq: S,
    exp: Option<(String, Vec<Kid>)>,
}

/// Depth-first enumeration of closed reductions in stream order. With `prune`,
/// partial reductions whose side-conditions are already unsatisfiable are cut.
/// `visit` returns true to stop; the result reports whether it stopped.
pub fn dfs<Sys: System>(
    sys: &Sys,
    goal: Sys::Seq,
    depth: usize,
    prune: bool,
    visit: &mut dyn FnMut(Reduction<Sys::Seq>, &[Constraint]) -> bool,
) -> bool {
    let mut st = Dfs {
        sys,
        prune,
        arena: vec![Slot { seq: goal, exp: None }],
        agenda: vec![(0, depth)],
        cs: Vec::new(),
        visit,
    };
    st.go()
}

struct Dfs<'a, Sys: System> {
    sys: &'a Sys,
    prune: bool,
    arena: Vec<Slot<Sys::Seq>>,
    agenda: Vec<(usize, usize)>,
    cs: Vec<Constraint>,
    visit: &'a mut dyn FnMut(Reduction<Sys::Seq>, &[Constraint]) -> bool,
}

impl<Sys: System> Dfs<'_, Sys> {
    fn go(&mut self) -> bool {
        let Some((idx, d)) = self.agenda.pop() else {
            let r = self.build(0);
            return (self.visit)(r, &self.cs);
        };
        if d > 0 {
            for step in self.sys.steps(&self.arena[idx].seq) {
                if step.cost > d {
                    continue;
                }
                let (arena_len, agenda_len, cs_len) = (self.arena.len(), self.agenda.len(), self.cs.len());
                let trivial = step.side.iter().all(|c| matches!(c, Constraint::Eq(a, b) if a == b));
                self.cs.extend(step.side.iter().cloned());
                if self.prune && !trivial && solve(&self.cs).is_none() {
                    self.cs.truncate(cs_len);
                    continue;
                }
                let mut kids = Vec::new();
                for p in step.premises {
                    kids.push(Kid::Node(self.arena.len()));
                    self.arena.push(Slot { seq: p, exp: None });
                }
                let first_prem = arena_len;
                let n = kids.len();
                kids.extend(step.side.into_iter().map(Kid::Side));
                self.arena[idx].exp = Some((step.rule, kids));
                for k in (0..n).rev() {
                    self.agenda.push((first_prem + k, d - step.cost));
                }
                if self.go() {
                    return true;
                }
                self.agenda.truncate(agenda_len);
                self.arena.truncate(arena_len);
                self.arena[idx].exp = None;
                self.cs.truncate(cs_len);
            }
        }
        self.agenda.push((idx, d));
        false
    }

    fn build(&self, idx: usize) -> Reduction<Sys::Seq> {
        let slot = &self.arena[idx];
        match &slot.exp {
            None => Reduction::Open(slot.seq.clone()),
            Some((rule, kids)) => Reduction::Step {
                seq: slot.seq.clone(),
                rule: rule.clone(),
                children: kids
                    .iter()
                    .map(|k| match k {
                        Kid::Node(i) => self.build(*i),
                        Kid::Side(c) => Reduction::Side(c.clone()),
                    })
                    .collect(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolean::{parse_constraint, BoolExpr};

    // Toy system over integers: n splits into n-1 twice (side x_n = 1) or closes at 0.
    struct Toy;
    impl System for Toy {
        type Seq = u32;
        fn steps(&self, s: &u32) -> Vec<Step<u32>> {
            if *s == 0 {
                vec![Step::new("ax", vec![], vec![]), Step::new("ax2", vec![], vec![])]
            } else {
                let c = parse_constraint(&format!("x{s} = 1")).unwrap();
                vec![Step::new("split", vec![s - 1, s - 1], vec![c])]
            }
        }
    }

    #[test]
    fn stream_and_dfs_agree() {
        let all: Vec<_> = stream(Rc::new(Toy), 2, 3).collect();
        // 2 choices at each of 4 leaves
        assert_eq!(all.len(), 16);
        let mut seen = Vec::new();
        dfs(&Toy, 2, 3, false, &mut |r, _| {
            seen.push(r);
            false
        });
        assert_eq!(seen, all);
        assert_eq!(stream(Rc::new(Toy), 2, 2).count(), 0);
    }

    #[test]
    fn dfs_prunes_unsat() {
        struct Bad;
        impl System for Bad {
            type Seq = u8;
            fn steps(&self, s: &u8) -> Vec<Step<u8>> {
                let x = BoolExpr::Var(crate::boolean::Var("x".into()));
                match s {
                    0 => vec![Step::new("a", vec![1], vec![Constraint::Eq(x, BoolExpr::One)])],
                    _ => vec![
                        Step::new("no", vec![], vec![Constraint::Eq(x.clone(), BoolExpr::Zero)]),
                        Step::new("yes", vec![], vec![Constraint::Eq(x, BoolExpr::One)]),
                    ],
                }
            }
        }
        let mut first = None;
        dfs(&Bad, 0, 4, true, &mut |r, _| {
            first = Some(r);
            true
        });
        let r = first.unwrap();
        assert_eq!(r.premises()[0].rule(), Some("yes"));
    }
}
