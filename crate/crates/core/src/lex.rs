//! Shared tokenizer for every surface syntax in the crate.

use crate::error::{syntax, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Amp,
    Bar,
    OrOr,
    Arrow,
    Wand,
    Tilde,
    Star,
    Plus,
    Bang,
    Eq,
    Comma,
    Semi,
    Colon,
    Turnstile,
    Neck,
    Dot,
    EPlus,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Num(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
            t => format!("`{}`", t.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Amp => "&",
            Tok::Bar => "|",
            Tok::OrOr => "||",
            Tok::Arrow => "->",
            Tok::Wand => "-*",
            Tok::Tilde => "~",
            Tok::Star => "*",
            Tok::Plus => "+",
            Tok::Bang => "!",
            Tok::Eq => "=",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Turnstile => "|-",
            Tok::Neck => ":-",
            Tok::Dot => ".",
            Tok::EPlus => "e+",
            _ => "",
        }
    }
}

pub fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>> {
    let b = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'%' {
            while i < b.len() && b[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            let word = &src[start..i];
            if word == "e" && i < b.len() && b[i] == b'+' {
                i += 1;
                out.push((Tok::EPlus, start));
            } else {
                out.push((Tok::Ident(word.to_string()), start));
            }
            continue;
        }
        if c.is_ascii_digit() {
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            out.push((Tok::Num(src[start..i].to_string()), start));
            continue;
        }
        let next = b.get(i + 1).copied();
        let (tok, len) = match (c, next) {
            (b'-', Some(b'>')) => (Tok::Arrow, 2),
            (b'-', Some(b'*')) => (Tok::Wand, 2),
            (b'|', Some(b'-')) => (Tok::Turnstile, 2),
            (b'|', Some(b'|')) => (Tok::OrOr, 2),
            (b':', Some(b'-')) => (Tok::Neck, 2),
            (b'|', _) => (Tok::Bar, 1),
            (b'(', _) => (Tok::LParen, 1),
            (b')', _) => (Tok::RParen, 1),
            (b'{', _) => (Tok::LBrace, 1),
            (b'}', _) => (Tok::RBrace, 1),
            (b'&', _) => (Tok::Amp, 1),
            (b'~', _) => (Tok::Tilde, 1),
            (b'*', _) => (Tok::Star, 1),
            (b'+', _) => (Tok::Plus, 1),
            (b'!', _) => (Tok::Bang, 1),
            (b'=', _) => (Tok::Eq, 1),
            (b',', _) => (Tok::Comma, 1),
            (b';', _) => (Tok::Semi, 1),
            (b':', _) => (Tok::Colon, 1),
            (b'.', _) => (Tok::Dot, 1),
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return syntax(i, format!("unexpected character `{ch}`"));
            }
        };
        out.push((tok, start));
        i += len;
    }
    out.push((Tok::Eof, src.len()));
    Ok(out)
}

/// Cursor over a token vector with backtracking by position.
#[derive(Debug, Clone)]
pub struct Cursor {
    toks: Vec<(Tok, usize)>,
    pub pos: usize,
}

impl Cursor {
    pub fn new(src: &str) -> Result<Cursor> {
        Ok(Cursor {
            toks: tokenize(src)?,
            pos: 0,
        })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    pub fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    pub fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, t: &Tok) -> Result<()> {
        if self.eat(t) {
            Ok(())
        } else {
            syntax(
                self.offset(),
                format!("expected {}, found {}", t.describe(), self.peek().describe()),
            )
        }
    }

    pub fn expect_eof(&self) -> Result<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            syntax(self.offset(), format!("unexpected {}", self.peek().describe()))
        }
    }

    pub fn unexpected<T>(&self) -> Result<T> {
        syntax(self.offset(), format!("unexpected {}", self.peek().describe()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compound_tokens() {
        let t: Vec<Tok> = tokenize("p -* q |- e+ ; ex -> r || s :- t.")
            .unwrap()
            .into_iter()
            .map(|x| x.0)
            .collect();
        assert_eq!(t[1], Tok::Wand);
        assert_eq!(t[3], Tok::Turnstile);
        assert_eq!(t[4], Tok::EPlus);
        assert_eq!(t[7], Tok::Arrow);
        assert_eq!(t[9], Tok::OrOr);
        assert_eq!(t[11], Tok::Neck);
        assert_eq!(t[13], Tok::Dot);
    }

    #[test]
    fn bad_char_offset() {
        assert_eq!(
            tokenize("p # q"),
            Err(crate::Error::Syntax {
                offset: 2,
                msg: "unexpected character `#`".into()
            })
        );
    }
}
