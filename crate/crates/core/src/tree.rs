//! Proof trees and constraint-carrying reductions.

use std::fmt::{self, Display, Write};

use serde::{Deserialize, Serialize};

use crate::boolean::Constraint;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Proof<S> {
    pub conclusion: S,
    pub rule: String,
    pub premises: Vec<Proof<S>>,
}

impl<S> Proof<S> {
    pub fn new(conclusion: S, rule: &str, premises: Vec<Proof<S>>) -> Proof<S> {
        Proof {
            conclusion,
            rule: rule.to_string(),
            premises,
        }
    }

    pub fn leaf(conclusion: S, rule: &str) -> Proof<S> {
        Proof::new(conclusion, rule, vec![])
    }

    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(|p| p.height()).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(|p| p.size()).sum::<usize>()
    }

    /// Rule names in pre-order.
    pub fn rules(&self) -> Vec<&str> {
        let mut v = vec![self.rule.as_str()];
        for p in &self.premises {
            v.extend(p.rules());
        }
        v
    }

    pub fn map<T>(&self, f: &impl Fn(&S) -> T) -> Proof<T> {
        Proof {
            conclusion: f(&self.conclusion),
            rule: self.rule.clone(),
            premises: self.premises.iter().map(|p| p.map(f)).collect(),
        }
    }
}

impl<S: Display> Proof<S> {
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out, 0);
        out
    }

    fn render_into(&self, out: &mut String, indent: usize) {
        let _ = writeln!(out, "{:indent$}{}   [{}]", "", self.conclusion, self.rule, indent = indent);
        for p in &self.premises {
            p.render_into(out, indent + 2);
        }
    }
}

impl<S: Display> Display for Proof<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Backward-built tree whose leaves are open sequents or side-conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reduction<S, C = Constraint> {
    Step {
        seq: S,
        rule: String,
        children: Vec<Reduction<S, C>>,
    },
    Side(C),
    Open(S),
}

impl<S, C> Reduction<S, C> {
    pub fn constraints(&self) -> Vec<&C> {
        let mut v = Vec::new();
        self.collect(&mut v);
        v
    }

    fn collect<'a>(&'a self, v: &mut Vec<&'a C>) {
        match self {
            Reduction::Side(c) => v.push(c),
            Reduction::Open(_) => {}
            Reduction::Step { children, .. } => children.iter().for_each(|c| c.collect(v)),
        }
    }

    pub fn open_leaf(&self) -> Option<&S> {
        match self {
            Reduction::Open(s) => Some(s),
            Reduction::Side(_) => None,
            Reduction::Step { children, .. } => children.iter().find_map(|c| c.open_leaf()),
        }
    }

    pub fn seq(&self) -> Option<&S> {
        match self {
            Reduction::Step { seq, .. } | Reduction::Open(seq) => Some(seq),
            Reduction::Side(_) => None,
        }
    }

    pub fn rule(&self) -> Option<&str> {
        match self {
            Reduction::Step { rule, .. } => Some(rule),
            _ => None,
        }
    }

    /// Sequent-valued children, side-conditions skipped.
    pub fn premises(&self) -> Vec<&Reduction<S, C>> {
        match self {
            Reduction::Step { children, .. } => {
                children.iter().filter(|c| !matches!(c, Reduction::Side(_))).collect()
            }
            _ => vec![],
        }
    }

    pub fn height(&self) -> usize {
        match self {
            Reduction::Step { children, .. } => {
                1 + children.iter().map(|c| c.height()).max().unwrap_or(0)
            }
            _ => 0,
        }
    }
}

impl<S: Display, C: Display> Reduction<S, C> {
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out, 0);
        out
    }

    fn render_into(&self, out: &mut String, indent: usize) {
        match self {
            Reduction::Step { seq, rule, children } => {
                let _ = writeln!(out, "{:indent$}{}   [{}]", "", seq, rule, indent = indent);
                for c in children {
                    c.render_into(out, indent + 2);
                }
            }
            Reduction::Side(c) => {
                let _ = writeln!(out, "{:indent$}{{ {} }}", "", c, indent = indent);
            }
            Reduction::Open(s) => {
                let _ = writeln!(out, "{:indent$}{}   [?]", "", s, indent = indent);
            }
        }
    }
}
