//! Tokenizer and expression tree shared by the profile and body mini-grammars.
//!
//! ```text
//! expr := number | ident [ "(" arg ("," arg)* ")" ]
//! arg  := ident "=" raw-text | expr
//! ```

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{message} at position {position} (token `{token}`)")]
pub struct ParseError {
    pub message: String,
    pub token: String,
    pub position: usize,
}

impl ParseError {
    pub fn new(message: impl Into<String>, token: impl Into<String>, position: usize) -> Self {
        Self { message: message.into(), token: token.into(), position }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Number { value: f64, position: usize, text: String },
    Call { name: String, args: Vec<Arg>, position: usize, bare: bool },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Arg {
    Expr(Expr),
    Keyword { key: String, value: String, position: usize },
}

impl Expr {
    pub fn position(&self) -> usize {
        match self {
            Expr::Number { position, .. } | Expr::Call { position, .. } => *position,
        }
    }

    /// Source-like rendering used in error messages.
    pub fn token(&self) -> String {
        match self {
            Expr::Number { text, .. } => text.clone(),
            Expr::Call { name, .. } => name.clone(),
        }
    }

    pub fn as_number(&self) -> Result<f64, ParseError> {
        match self {
            Expr::Number { value, .. } => Ok(*value),
            Expr::Call { name, bare: true, .. } if name == "inf" => Ok(f64::INFINITY),
            other => Err(ParseError::new("expected a number", other.token(), other.position())),
        }
    }
}

impl Arg {
    pub fn position(&self) -> usize {
        match self {
            Arg::Expr(e) => e.position(),
            Arg::Keyword { position, .. } => *position,
        }
    }

    pub fn expr(&self) -> Result<&Expr, ParseError> {
        match self {
            Arg::Expr(e) => Ok(e),
            Arg::Keyword { key, position, .. } => {
                Err(ParseError::new("unexpected keyword argument", key.clone(), *position))
            }
        }
    }

    pub fn number(&self) -> Result<f64, ParseError> {
        self.expr()?.as_number()
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn next_token_text(&self) -> String {
        let rest = &self.src[self.pos..];
        let end = rest
            .char_indices()
            .find(|&(i, c)| i > 0 && (c.is_whitespace() || "(),=".contains(c)))
            .map_or(rest.len(), |(i, _)| i);
        if end == 0 {
            "<end of input>".into()
        } else {
            rest[..end].to_string()
        }
    }

    fn error(&self, message: &str) -> ParseError {
        ParseError::new(message, self.next_token_text(), self.pos)
    }

    fn ident(&mut self) -> Option<(String, usize)> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let mut chars = rest.char_indices();
        match chars.next() {
            Some((_, c)) if c.is_ascii_alphabetic() || c == '_' => {}
            _ => return None,
        }
        let end = chars
            .find(|&(_, c)| !(c.is_ascii_alphanumeric() || c == '_'))
            .map_or(rest.len(), |(i, _)| i);
        self.pos = start + end;
        Some((rest[..end].to_string(), start))
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let end = rest
            .char_indices()
            .find(|&(i, c)| {
                !(c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || ((c == '-' || c == '+') && (i == 0 || matches!(rest.as_bytes()[i - 1], b'e' | b'E'))))
            })
            .map_or(rest.len(), |(i, _)| i);
        let text = &rest[..end];
        match text.parse::<f64>() {
            Ok(value) if value.is_finite() => {
                self.pos = start + end;
                Ok(Expr::Number { value, position: start, text: text.to_string() })
            }
            _ => Err(ParseError::new("malformed number", if text.is_empty() { self.next_token_text() } else { text.to_string() }, start)),
        }
    }

    fn raw_value(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        let mut depth = 0usize;
        for (i, c) in self.src[start..].char_indices() {
            match c {
                '(' => depth += 1,
                ')' if depth == 0 => {
                    self.pos = start + i;
                    return self.src[start..start + i].trim().to_string();
                }
                ')' => depth -= 1,
                ',' if depth == 0 => {
                    self.pos = start + i;
                    return self.src[start..start + i].trim().to_string();
                }
                _ => {}
            }
        }
        self.pos = self.src.len();
        self.src[start..].trim().to_string()
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '-' || c == '+' || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let (name, position) = self.ident().expect("peeked an identifier");
                if self.peek() != Some('(') {
                    return Ok(Expr::Call { name, args: vec![], position, bare: true });
                }
                self.pos += 1;
                let mut args = Vec::new();
                if self.peek() == Some(')') {
                    self.pos += 1;
                    return Ok(Expr::Call { name, args, position, bare: false });
                }
                loop {
                    args.push(self.arg()?);
                    match self.peek() {
                        Some(',') => self.pos += 1,
                        Some(')') => {
                            self.pos += 1;
                            break;
                        }
                        _ => return Err(self.error("expected `,` or `)`")),
                    }
                }
                Ok(Expr::Call { name, args, position, bare: false })
            }
            _ => Err(self.error("expected a number or a name")),
        }
    }

    fn arg(&mut self) -> Result<Arg, ParseError> {
        let save = self.pos;
        if let Some((key, position)) = self.ident() {
            if self.peek() == Some('=') {
                self.pos += 1;
                let value = self.raw_value();
                return Ok(Arg::Keyword { key, value, position });
            }
        }
        self.pos = save;
        self.expr().map(Arg::Expr)
    }
}

/// Parses a complete expression; trailing input is an error.
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { src, pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

/// Checks the argument count of a call node.
pub fn arity(name: &str, args: &[Arg], expected: usize, position: usize) -> Result<(), ParseError> {
    if args.len() == expected {
        Ok(())
    } else {
        Err(ParseError::new(
            format!("`{name}` takes {expected} argument(s), got {}", args.len()),
            name,
            position,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_calls_and_keywords() {
        let e = parse_expr("product(power(-1), exp_power(2.5e0))").unwrap();
        let Expr::Call { name, args, .. } = e else { panic!() };
        assert_eq!(name, "product");
        assert_eq!(args.len(), 2);
        let e = parse_expr("polytope(file = /tmp/a b.txt)").unwrap();
        let Expr::Call { args, .. } = e else { panic!() };
        assert_eq!(args[0], Arg::Keyword { key: "file".into(), value: "/tmp/a b.txt".into(), position: 9 });
    }

    #[test]
    fn errors_name_token_and_position() {
        let err = parse_expr("exp_power(1.5").unwrap_err();
        assert_eq!(err.position, 13);
        let err = parse_expr("sum(power(1) # x)").unwrap_err();
        assert_eq!(err.token, "#");
        assert_eq!(err.position, 13);
        let err = parse_expr("g(3, 1..2)").unwrap_err();
        assert_eq!(err.token, "1..2");
        assert!(parse_expr("ball(3) extra").is_err());
    }
}
