// SPDX-License-Identifier: Apache-2.0

use super::{ParseError, SourceSpan};

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Num(u64),
    Colon,
    Comma,
    Semicolon,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Assign,
    Forall,
    Exists,
    Not,
    And,
    Or,
    Arrow,
    Iff,
    Bottom,
    Eq,
    Comment(String),
    /// A character outside the grammar; only legal inside skipped prose.
    Stray(char),
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(n) => format!("`{n}`"),
            Tok::Comment(_) => "comment".into(),
            Tok::Stray(c) => format!("unexpected character `{c}`"),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::Colon => ":",
            Tok::Comma => ",",
            Tok::Semicolon => ";",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Assign => ":=",
            Tok::Forall => "∀",
            Tok::Exists => "∃",
            Tok::Not => "¬",
            Tok::And => "∧",
            Tok::Or => "∨",
            Tok::Arrow => "→",
            Tok::Iff => "↔",
            Tok::Bottom => "⊥",
            Tok::Eq => "=",
            _ => "",
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '\'' | '!')
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn starts_with(&self, s: &str) -> bool {
        self.src[self.pos..].starts_with(s)
    }

    fn bump_str(&mut self, s: &str) {
        for _ in s.chars() {
            self.bump();
        }
    }
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut cur = Cursor {
        src,
        pos: 0,
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    loop {
        while cur.peek().is_some_and(char::is_whitespace) {
            cur.bump();
        }
        let (start, line, column) = (cur.pos, cur.line, cur.col);
        let span_to = |cur: &Cursor| SourceSpan {
            start,
            end: cur.pos,
            line,
            column,
        };
        let Some(c) = cur.peek() else {
            out.push(Token {
                tok: Tok::Eof,
                span: span_to(&cur),
            });
            return Ok(out);
        };

        let tok = if cur.starts_with("--") {
            cur.bump_str("--");
            let text_start = cur.pos;
            while cur.peek().is_some_and(|c| c != '\n') {
                cur.bump();
            }
            Tok::Comment(src[text_start..cur.pos].trim().to_string())
        } else if cur.starts_with("/-") {
            cur.bump_str("/-");
            let text_start = cur.pos;
            loop {
                if cur.starts_with("-/") {
                    let text = src[text_start..cur.pos].trim().to_string();
                    cur.bump_str("-/");
                    break Tok::Comment(text);
                }
                if cur.bump().is_none() {
                    return Err(ParseError {
                        span: span_to(&cur),
                        message: "unterminated block comment".into(),
                    });
                }
            }
        } else if is_ident_start(c) {
            let s = cur.pos;
            cur.bump();
            loop {
                match cur.peek() {
                    Some(c) if is_ident_continue(c) => {
                        cur.bump();
                    }
                    // Dotted names such as `and.intro`.
                    Some('.') if cur.peek2().is_some_and(is_ident_start) => {
                        cur.bump();
                    }
                    _ => break,
                }
            }
            match &src[s..cur.pos] {
                "forall" => Tok::Forall,
                "exists" => Tok::Exists,
                "false" => Tok::Bottom,
                word => Tok::Ident(word.to_string()),
            }
        } else if c.is_ascii_digit() {
            let s = cur.pos;
            while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                cur.bump();
            }
            match src[s..cur.pos].parse() {
                Ok(n) => Tok::Num(n),
                Err(_) => {
                    return Err(ParseError {
                        span: span_to(&cur),
                        message: "numeral out of range".into(),
                    })
                }
            }
        } else {
            let two: &[(&str, Tok)] = &[
                (":=", Tok::Assign),
                ("<->", Tok::Iff),
                ("->", Tok::Arrow),
                ("/\\", Tok::And),
                ("\\/", Tok::Or),
            ];
            if let Some((s, t)) = two.iter().find(|(s, _)| cur.starts_with(s)) {
                cur.bump_str(s);
                t.clone()
            } else {
                cur.bump();
                match c {
                    ':' => Tok::Colon,
                    ',' => Tok::Comma,
                    ';' => Tok::Semicolon,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '∀' | 'Π' => Tok::Forall,
                    '∃' => Tok::Exists,
                    '¬' | '~' => Tok::Not,
                    '∧' => Tok::And,
                    '∨' => Tok::Or,
                    '→' => Tok::Arrow,
                    '↔' => Tok::Iff,
                    '⊥' => Tok::Bottom,
                    '=' => Tok::Eq,
                    other => Tok::Stray(other),
                }
            }
        };
        out.push(Token {
            tok,
            span: span_to(&cur),
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn ascii_and_unicode_connectives_agree() {
        assert_eq!(toks("∀ ¬ ∧ ∨ → ↔"), toks("forall ~ /\\ \\/ -> <->"));
    }

    #[test]
    fn dotted_identifiers_and_comments() {
        assert_eq!(
            toks("and.intro H1 -- note\n,"),
            vec![
                Tok::Ident("and.intro".into()),
                Tok::Ident("H1".into()),
                Tok::Comment("note".into()),
                Tok::Comma,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn spans_track_lines_and_columns() {
        let ts = tokenize("a\n  bc").unwrap();
        assert_eq!((ts[1].span.line, ts[1].span.column), (2, 3));
        assert_eq!((ts[1].span.start, ts[1].span.end), (4, 6));
    }

    #[test]
    fn stray_character_has_span() {
        let ts = tokenize("axiom A : P @").unwrap();
        assert_eq!(ts[4].tok, Tok::Stray('@'));
        assert_eq!(ts[4].span.start, 12);
    }
}
