//! Minimal S-expression reader shared by the netlist, rule, component and
//! loop-form text formats.
//!
//! Atoms are runs of characters other than whitespace, parentheses and `;`.
//! A `#` or `;` starts a comment running to end of line. Every node carries
//! the source position it started at so format parsers can report errors
//! against the original text.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s, _) => Some(s),
            Sexp::List(..) => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items, _) => Some(items),
            Sexp::Atom(..) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at {pos}: {msg}")]
pub struct SyntaxError {
    pub pos: Pos,
    pub msg: String,
}

impl SyntaxError {
    pub fn new(pos: Pos, msg: impl Into<String>) -> Self {
        SyntaxError {
            pos,
            msg: msg.into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    line: u32,
    col: u32,
}

#[derive(Debug)]
enum Token {
    Open(Pos),
    Close(Pos),
    Atom(String, Pos),
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src,
            chars: src.char_indices().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<(usize, char)> {
        let next = self.chars.next();
        if let Some((_, c)) = next {
            if c == '\n' {
                self.line += 1;
                self.col = 1;
            } else {
                self.col += 1;
            }
        }
        next
    }

    fn next_token(&mut self) -> Result<Option<Token>, SyntaxError> {
        loop {
            let &(idx, c) = match self.chars.peek() {
                Some(pair) => pair,
                None => return Ok(None),
            };
            let pos = Pos {
                line: self.line,
                col: self.col,
            };
            match c {
                c if c.is_whitespace() => {
                    self.bump();
                }
                '#' | ';' => {
                    while let Some(&(_, c)) = self.chars.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                '(' => {
                    self.bump();
                    return Ok(Some(Token::Open(pos)));
                }
                ')' => {
                    self.bump();
                    return Ok(Some(Token::Close(pos)));
                }
                _ => {
                    let start = idx;
                    let mut end = idx + c.len_utf8();
                    self.bump();
                    while let Some(&(i, c)) = self.chars.peek() {
                        if c.is_whitespace() || c == '(' || c == ')' || c == '#' || c == ';' {
                            break;
                        }
                        end = i + c.len_utf8();
                        self.bump();
                    }
                    return Ok(Some(Token::Atom(self.src[start..end].to_string(), pos)));
                }
            }
        }
    }
}

/// Parse every top-level form in `src`.
pub fn parse_many(src: &str) -> Result<Vec<Sexp>, SyntaxError> {
    let mut lexer = Lexer::new(src);
    let mut stack: Vec<(Vec<Sexp>, Pos)> = Vec::new();
    let mut top = Vec::new();
    while let Some(tok) = lexer.next_token()? {
        match tok {
            Token::Open(pos) => stack.push((Vec::new(), pos)),
            Token::Close(pos) => {
                let (items, open_pos) = stack
                    .pop()
                    .ok_or_else(|| SyntaxError::new(pos, "unbalanced ')'"))?;
                let sexp = Sexp::List(items, open_pos);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(sexp),
                    None => top.push(sexp),
                }
            }
            Token::Atom(text, pos) => {
                let sexp = Sexp::Atom(text, pos);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(sexp),
                    None => top.push(sexp),
                }
            }
        }
    }
    if let Some((_, pos)) = stack.last() {
        return Err(SyntaxError::new(*pos, "unclosed '('"));
    }
    Ok(top)
}

/// Parse exactly one top-level form.
pub fn parse_one(src: &str) -> Result<Sexp, SyntaxError> {
    let mut forms = parse_many(src)?;
    match forms.len() {
        1 => Ok(forms.remove(0)),
        0 => Err(SyntaxError::new(
            Pos { line: 1, col: 1 },
            "expected an s-expression, found nothing",
        )),
        _ => Err(SyntaxError::new(
            forms[1].pos(),
            "expected a single s-expression, found trailing forms",
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested_lists() {
        let s = parse_one("(a (b c) d)").unwrap();
        let items = s.list().unwrap();
        assert_eq!(items.len(), 3);
        assert_eq!(items[0].atom(), Some("a"));
        assert_eq!(items[1].list().unwrap()[1].atom(), Some("c"));
    }

    #[test]
    fn comments_are_skipped() {
        let forms = parse_many("# header\n(a) ; trailing\n(b)").unwrap();
        assert_eq!(forms.len(), 2);
    }

    #[test]
    fn unbalanced_parens_error_with_position() {
        let err = parse_one("(a (b)").unwrap_err();
        assert_eq!(err.pos.line, 1);
        assert_eq!(err.pos.col, 1);
        let err = parse_many(")").unwrap_err();
        assert!(err.msg.contains("unbalanced"));
    }
}
