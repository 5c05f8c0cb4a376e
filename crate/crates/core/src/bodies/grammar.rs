use std::path::Path;

use super::{BodyError, NormBody};
use crate::grammar::{arity, parse_expr, Arg, Expr, ParseError};
use crate::Real;

/// Parses the body mini-grammar:
///
/// ```text
/// ball(n)  cube(n)  lp(n, p)  ellipsoid(n, m₁₁, …, mₙₙ)  ellipsoid(n, d₁, …, dₙ)
/// polytope(file=path)  dilate(body, λ)
/// ```
///
/// `p` may be `inf`. A diagonal ellipsoid may be given by its `n` diagonal entries.
pub fn parse_body<T: Real>(text: &str) -> Result<NormBody<T>, BodyError> {
    build(&parse_expr(text)?)
}

fn dim(arg: &Arg) -> Result<usize, BodyError> {
    let v = arg.number()?;
    if v >= 1.0 && v == v.round() && v <= 64.0 {
        Ok(v as usize)
    } else {
        Err(ParseError::new("dimension must be an integer in 1..=64", arg.expr()?.token(), arg.position()).into())
    }
}

fn build<T: Real>(expr: &Expr) -> Result<NormBody<T>, BodyError> {
    let Expr::Call { name, args, position, bare } = expr else {
        return Err(ParseError::new("expected a body, found a number", expr.token(), expr.position()).into());
    };
    if *bare {
        return Err(ParseError::new("expected `(` after body name", name.clone(), *position).into());
    }
    let pos = *position;
    let a = args.as_slice();
    match name.as_str() {
        "ball" => {
            arity(name, a, 1, pos)?;
            NormBody::ball(dim(&a[0])?)
        }
        "cube" => {
            arity(name, a, 1, pos)?;
            NormBody::cube(dim(&a[0])?)
        }
        "lp" | "lp_ball" => {
            arity(name, a, 2, pos)?;
            NormBody::lp(dim(&a[0])?, T::lit(a[1].number()?))
        }
        "cross" => {
            arity(name, a, 1, pos)?;
            NormBody::lp(dim(&a[0])?, T::one())
        }
        "ellipsoid" => {
            let Some(first) = a.first() else {
                return Err(ParseError::new("`ellipsoid` needs a dimension", name.clone(), pos).into());
            };
            let n = dim(first)?;
            let entries = a[1..].iter().map(|x| x.number().map(T::lit)).collect::<Result<Vec<T>, _>>()?;
            let m = if entries.len() == n * n {
                entries.chunks(n).map(<[T]>::to_vec).collect()
            } else if entries.len() == n {
                (0..n).map(|i| (0..n).map(|j| if i == j { entries[i] } else { T::zero() }).collect()).collect()
            } else {
                return Err(ParseError::new(
                    format!("`ellipsoid({n}, …)` needs {n} diagonal or {} matrix entries, got {}", n * n, entries.len()),
                    name.clone(),
                    pos,
                )
                .into());
            };
            NormBody::ellipsoid(m)
        }
        "polytope" => {
            arity(name, a, 1, pos)?;
            match &a[0] {
                Arg::Keyword { key, value, .. } if key == "file" => NormBody::polytope(read_polytope_file(value)?),
                other => Err(ParseError::new("expected `file=<path>`", other.expr().map_or_else(|_| "?".into(), Expr::token), other.position()).into()),
            }
        }
        "dilate" => {
            arity(name, a, 2, pos)?;
            build::<T>(a[0].expr()?)?.dilate(T::lit(a[1].number()?))
        }
        _ => Err(ParseError::new("unknown body", name.clone(), pos).into()),
    }
}

/// Reads a halfspace file: one row `a₁ … aₙ` per constraint `⟨a, x⟩ ≤ 1`
/// (the opposite constraint is implied); `#` starts a comment.
pub fn read_polytope_file<T: Real>(path: impl AsRef<Path>) -> Result<Vec<Vec<T>>, BodyError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| BodyError::Io { path: path.display().to_string(), message: e.to_string() })?;
    let mut rows: Vec<Vec<T>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let row = content
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|tok| {
                tok.parse::<f64>().map(T::lit).map_err(|_| BodyError::Io {
                    path: path.display().to_string(),
                    message: format!("line {}: cannot parse `{tok}` as a number", lineno + 1),
                })
            })
            .collect::<Result<Vec<T>, _>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(BodyError::Io {
                    path: path.display().to_string(),
                    message: format!("line {}: expected {} entries, got {}", lineno + 1, first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(BodyError::Io { path: path.display().to_string(), message: "no constraints".into() });
    }
    Ok(rows)
}
