//! JSON proof documents.

use std::collections::BTreeMap;
use std::fmt::Display;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bi::check_lbi_proof;
use crate::error::{Error, Result};
use crate::ipl::{check_ljplus_proof, LjSeq};
use crate::meta::{check_labelled_proof, parse_labelled_sequent, LProof, LabelledCalculus};
use crate::syntax::{parse_sequent, Alphabet};
use crate::tree::{Proof, Reduction};

pub const DOC_VERSION: &str = "ck-proof/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocNode {
    pub sequent: String,
    pub rule: String,
    #[serde(default)]
    pub constraints: Vec<String>,
    #[serde(default)]
    pub children: Vec<DocNode>,
}

impl DocNode {
    /// Side-conditions become the `constraints` of the node that emits them.
    pub fn from_reduction<S: Display, C: Display>(r: &Reduction<S, C>) -> DocNode {
        match r {
            Reduction::Step { seq, rule, children } => DocNode {
                sequent: seq.to_string(),
                rule: rule.clone(),
                constraints: children
                    .iter()
                    .filter_map(|c| match c {
                        Reduction::Side(x) => Some(x.to_string()),
                        _ => None,
                    })
                    .collect(),
                children: children
                    .iter()
                    .filter(|c| !matches!(c, Reduction::Side(_)))
                    .map(DocNode::from_reduction)
                    .collect(),
            },
            Reduction::Open(s) => DocNode {
                sequent: s.to_string(),
                rule: "open".into(),
                constraints: vec![],
                children: vec![],
            },
            Reduction::Side(c) => DocNode {
                sequent: String::new(),
                rule: "side".into(),
                constraints: vec![c.to_string()],
                children: vec![],
            },
        }
    }

    pub fn from_proof<S: Display>(p: &Proof<S>) -> DocNode {
        DocNode {
            sequent: p.conclusion.to_string(),
            rule: p.rule.clone(),
            constraints: vec![],
            children: p.premises.iter().map(DocNode::from_proof).collect(),
        }
    }

    /// Labelled sequents are written in the goal syntax so they can be read back.
    pub fn from_labelled(p: &LProof) -> DocNode {
        DocNode {
            sequent: p.sequent.to_text().unwrap_or_else(|| p.sequent.to_string()),
            rule: p.rule.clone(),
            constraints: vec![],
            children: p.children.iter().map(DocNode::from_labelled).collect(),
        }
    }

    pub fn to_proof<S>(&self, parse: &impl Fn(&str) -> Result<S>) -> Result<Proof<S>> {
        Ok(Proof {
            conclusion: parse(&self.sequent)?,
            rule: self.rule.clone(),
            premises: self.children.iter().map(|c| c.to_proof(parse)).collect::<Result<_>>()?,
        })
    }

    fn to_labelled(&self) -> Result<LProof> {
        Ok(LProof {
            sequent: parse_labelled_sequent(&self.sequent)?,
            rule: self.rule.clone(),
            children: self.children.iter().map(DocNode::to_labelled).collect::<Result<_>>()?,
        })
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(DocNode::size).sum::<usize>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub millis: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProofDocument {
    pub version: String,
    pub logic: String,
    pub goal: String,
    /// The constraint reduction where there is one, otherwise the proof.
    pub tree: DocNode,
    /// The proof in the target calculus, when `tree` is a reduction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proof: Option<DocNode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calculus: Option<String>,
    #[serde(default)]
    pub interpretation: BTreeMap<String, Value>,
    pub timing: Timing,
}

impl ProofDocument {
    pub fn new(logic: &str, goal: &str, tree: DocNode, millis: f64) -> ProofDocument {
        ProofDocument {
            version: DOC_VERSION.into(),
            logic: logic.into(),
            goal: goal.into(),
            tree,
            proof: None,
            calculus: None,
            interpretation: BTreeMap::new(),
            timing: Timing { millis },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    pub fn from_json(text: &str) -> Result<ProofDocument> {
        let d: ProofDocument = serde_json::from_str(text).map_err(|e| Error::Invalid(format!("proof document: {e}")))?;
        if d.version != DOC_VERSION {
            return Err(Error::Invalid(format!("unsupported document version `{}`", d.version)));
        }
        Ok(d)
    }
}

/// Re-reads the proof of a document and runs the checker of its logic. Labelled
/// proofs need the calculus they were found in.
pub fn check_document(d: &ProofDocument, calc: Option<&LabelledCalculus>) -> Result<bool> {
    let proof = d.proof.as_ref().unwrap_or(&d.tree);
    match d.logic.as_str() {
        "bi" => {
            let a = Alphabet::bi();
            Ok(check_lbi_proof(&proof.to_proof(&|s| parse_sequent(s, &a))?))
        }
        "ipl" => {
            let a = Alphabet::all();
            Ok(check_ljplus_proof(&proof.to_proof(&|s| Ok(LjSeq::from_sequent(&parse_sequent(s, &a)?)))?))
        }
        "k" | "labelled" => {
            let calc = calc.ok_or_else(|| Error::Invalid("a labelled proof needs its calculus".into()))?;
            Ok(check_labelled_proof(calc, &proof.to_labelled()?))
        }
        l => Err(Error::Invalid(format!("no checker for logic `{l}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bi::prove_bi;
    use crate::ipl::prove_ipl;
    use crate::meta::{builtin_calculus, prove_labelled};

    #[test]
    fn bi_round_trip() {
        let g = parse_sequent("p , q , r |- p * (q * r)", &Alphabet::bi()).unwrap();
        let o = prove_bi(&g, 4).unwrap().unwrap();
        let mut d = ProofDocument::new("bi", &g.to_string(), DocNode::from_reduction(&o.reduction), 1.0);
        d.proof = Some(DocNode::from_proof(&o.proof));
        assert!(!d.tree.children.is_empty());
        let back = ProofDocument::from_json(&d.to_json()).unwrap();
        assert_eq!(back, d);
        assert!(check_document(&back, None).unwrap());
        let mut bad = back.clone();
        bad.proof.as_mut().unwrap().rule = "∗R".into();
        bad.proof.as_mut().unwrap().children.clear();
        assert!(!check_document(&bad, None).unwrap());
    }

    #[test]
    fn ipl_and_labelled_round_trip() {
        let g = parse_sequent("|- ~~(p | ~p)", &Alphabet::all()).unwrap();
        let o = prove_ipl(&g, 8).unwrap().unwrap();
        let mut d = ProofDocument::new("ipl", &g.to_string(), DocNode::from_reduction(&o.reduction), 1.0);
        d.proof = Some(DocNode::from_proof(&o.proof));
        assert!(check_document(&ProofDocument::from_json(&d.to_json()).unwrap(), None).unwrap());

        let rk = builtin_calculus("rk").unwrap();
        let p = prove_labelled(&rk, &parse_labelled_sequent("x: box (p & q) |- x: box p & box q").unwrap(), 6).unwrap();
        let d = ProofDocument::new("k", "x: box (p & q) |- x: box p & box q", DocNode::from_labelled(&p), 1.0);
        let back = ProofDocument::from_json(&d.to_json()).unwrap();
        assert!(check_document(&back, Some(&rk)).unwrap());
        assert!(check_document(&back, None).is_err());
        assert!(ProofDocument::from_json("{\"version\": \"x\"}").is_err());
    }
}
