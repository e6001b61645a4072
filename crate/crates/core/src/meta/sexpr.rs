//! Minimal s-expression reader for theory and rule files.

use std::fmt;

use crate::error::{syntax, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Sym(String, usize),
    List(Vec<Sexp>, usize),
}

impl Sexp {
    pub fn offset(&self) -> usize {
        match self {
            Sexp::Sym(_, o) | Sexp::List(_, o) => *o,
        }
    }

    pub fn sym(&self) -> Option<&str> {
        match self {
            Sexp::Sym(s, _) => Some(s),
            _ => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(v, _) => Some(v),
            _ => None,
        }
    }

    /// `(head args...)` split, if this is a list starting with a symbol.
    pub fn call(&self) -> Option<(&str, &[Sexp])> {
        let v = self.list()?;
        let h = v.first()?.sym()?;
        Some((h, &v[1..]))
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Sym(s, _) => write!(f, "{s}"),
            Sexp::List(v, _) => {
                write!(f, "(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Reads every top-level expression. `;` at the start of a token begins a line comment.
pub fn read_all(src: &str) -> Result<Vec<Sexp>> {
    let mut stack: Vec<(Vec<Sexp>, usize)> = Vec::new();
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == ';' {
            while let Some(&(_, d)) = chars.peek() {
                if d == '\n' {
                    break;
                }
                chars.next();
            }
        } else if c == '(' {
            chars.next();
            stack.push((Vec::new(), i));
        } else if c == ')' {
            chars.next();
            let Some((items, at)) = stack.pop() else {
                return syntax(i, "unbalanced `)`");
            };
            let e = Sexp::List(items, at);
            match stack.last_mut() {
                Some((v, _)) => v.push(e),
                None => out.push(e),
            }
        } else {
            let mut s = String::new();
            while let Some(&(_, d)) = chars.peek() {
                if d.is_whitespace() || d == '(' || d == ')' {
                    break;
                }
                s.push(d);
                chars.next();
            }
            let e = Sexp::Sym(s, i);
            match stack.last_mut() {
                Some((v, _)) => v.push(e),
                None => out.push(e),
            }
        }
    }
    if let Some((_, at)) = stack.pop() {
        return syntax(at, "unclosed `(`");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_with_comments() {
        let v = read_all("; k\n(clause (iff (sat w A) bot)) (R;)").unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v[0].to_string(), "(clause (iff (sat w A) bot))");
        assert_eq!(v[0].call().unwrap().0, "clause");
        assert_eq!(v[1].to_string(), "(R;)");
    }

    #[test]
    fn unbalanced() {
        assert!(read_all("(a (b)").is_err());
        assert!(read_all("a)").is_err());
    }
}
