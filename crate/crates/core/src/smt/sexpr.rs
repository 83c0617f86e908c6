//! Minimal S-expression reader for solver output.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExpr {
    Atom(String),
    List(Vec<SExpr>),
}

impl SExpr {
    pub fn as_atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom(s) => Some(s),
            SExpr::List(_) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items) => Some(items),
            SExpr::Atom(_) => None,
        }
    }

    /// The head atom of a list, if any.
    pub fn head(&self) -> Option<&str> {
        self.as_list()?.first()?.as_atom()
    }
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExpr::Atom(s) => f.write_str(s),
            SExpr::List(items) => {
                f.write_str("(")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{it}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed solver output at byte {pos}: {msg}")]
pub struct SExprError {
    pub pos: usize,
    pub msg: &'static str,
}

/// Reads every top-level expression. `|quoted|` symbols lose their bars;
/// string literals keep their quotes; `;` starts a line comment.
pub fn parse_all(text: &str) -> Result<Vec<SExpr>, SExprError> {
    let bytes = text.as_bytes();
    let mut stack: Vec<Vec<SExpr>> = vec![Vec::new()];
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b'(' => {
                stack.push(Vec::new());
                i += 1;
            }
            b')' => {
                if stack.len() < 2 {
                    return Err(SExprError { pos: i, msg: "unbalanced `)`" });
                }
                let done = stack.pop().unwrap_or_default();
                if let Some(top) = stack.last_mut() {
                    top.push(SExpr::List(done));
                }
                i += 1;
            }
            b';' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            c if c.is_ascii_whitespace() => i += 1,
            b'|' => {
                let start = i + 1;
                let end = text[start..]
                    .find('|')
                    .map(|k| start + k)
                    .ok_or(SExprError { pos: i, msg: "unterminated `|`" })?;
                push_atom(&mut stack, &text[start..end]);
                i = end + 1;
            }
            b'"' => {
                let mut j = i + 1;
                loop {
                    match bytes.get(j) {
                        None => return Err(SExprError { pos: i, msg: "unterminated string" }),
                        Some(b'"') if bytes.get(j + 1) == Some(&b'"') => j += 2,
                        Some(b'"') => break,
                        Some(_) => j += 1,
                    }
                }
                push_atom(&mut stack, &text[i..=j]);
                i = j + 1;
            }
            _ => {
                let start = i;
                while i < bytes.len() && !bytes[i].is_ascii_whitespace() && !b"()|;\"".contains(&bytes[i]) {
                    i += 1;
                }
                push_atom(&mut stack, &text[start..i]);
            }
        }
    }
    if stack.len() != 1 {
        return Err(SExprError {
            pos: bytes.len(),
            msg: "unbalanced `(`",
        });
    }
    Ok(stack.pop().unwrap_or_default())
}

fn push_atom(stack: &mut [Vec<SExpr>], s: &str) {
    if let Some(top) = stack.last_mut() {
        top.push(SExpr::Atom(s.to_string()));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_lists_and_quoting() {
        let v = parse_all("sat\n((define-fun |w1^n| () Real (- 1.0)))").unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v[0], SExpr::Atom("sat".into()));
        let inner = &v[1].as_list().unwrap()[0];
        assert_eq!(inner.head(), Some("define-fun"));
        assert_eq!(inner.as_list().unwrap()[1], SExpr::Atom("w1^n".into()));
        assert_eq!(inner.to_string(), "(define-fun w1^n () Real (- 1.0))");
    }

    #[test]
    fn errors() {
        assert!(parse_all("(a b").is_err());
        assert!(parse_all("a)").is_err());
        assert!(parse_all("(error \"x").is_err());
    }

    #[test]
    fn strings_and_comments() {
        let v = parse_all("; hi\n(error \"line \"\"3\"\"\")").unwrap();
        assert_eq!(v[0].as_list().unwrap()[1], SExpr::Atom("\"line \"\"3\"\"\"".into()));
    }
}
