use super::{ProfileError, RadialProfile};
use crate::grammar::{arity, parse_expr, Arg, Expr, ParseError};
use crate::Real;

/// Parses the profile mini-grammar:
///
/// ```text
/// power(α)  exp_power(p)  g(n, p)  admissible(n, α)  truncated(α, a)
/// smoothed(α, a, ε)  scale(c, f)  sum(f, g, …)  product(f, g, …)
/// mixture(w₁, f₁, w₂, f₂, …)
/// ```
pub fn parse_profile<T: Real>(text: &str) -> Result<RadialProfile<T>, ProfileError> {
    let expr = parse_expr(text)?;
    build(&expr)
}

fn dim(arg: &Arg) -> Result<usize, ProfileError> {
    let v = arg.number()?;
    if v >= 1.0 && v == v.round() && v < 1e6 {
        Ok(v as usize)
    } else {
        Err(ParseError::new("dimension must be a positive integer", arg.expr()?.token(), arg.position()).into())
    }
}

fn num<T: Real>(arg: &Arg) -> Result<T, ProfileError> {
    Ok(T::lit(arg.number()?))
}

fn sub<T: Real>(arg: &Arg) -> Result<RadialProfile<T>, ProfileError> {
    build(arg.expr()?)
}

fn build<T: Real>(expr: &Expr) -> Result<RadialProfile<T>, ProfileError> {
    let Expr::Call { name, args, position, bare } = expr else {
        return Err(ParseError::new("expected a profile, found a number", expr.token(), expr.position()).into());
    };
    if *bare {
        return Err(ParseError::new("expected `(` after profile name", name.clone(), *position).into());
    }
    let pos = *position;
    let a = args.as_slice();
    let profile = match name.as_str() {
        "power" => {
            arity(name, a, 1, pos)?;
            RadialProfile::power(num(&a[0])?)?
        }
        "exp_power" => {
            arity(name, a, 1, pos)?;
            RadialProfile::exp_power(num(&a[0])?)?
        }
        "g" | "g_profile" => {
            arity(name, a, 2, pos)?;
            RadialProfile::g_profile(dim(&a[0])?, num(&a[1])?)?
        }
        "admissible" | "admissible_omega_profile" => {
            arity(name, a, 2, pos)?;
            RadialProfile::admissible_omega_profile(dim(&a[0])?, num(&a[1])?)?
        }
        "truncated" | "truncated_power" => {
            arity(name, a, 2, pos)?;
            RadialProfile::truncated_power(num(&a[0])?, num(&a[1])?)?
        }
        "smoothed" | "smoothed_truncated_power" => {
            arity(name, a, 3, pos)?;
            RadialProfile::smoothed_truncated_power(num(&a[0])?, num(&a[1])?, num(&a[2])?)?
        }
        "scale" => {
            arity(name, a, 2, pos)?;
            RadialProfile::scale(num(&a[0])?, &sub(&a[1])?)?
        }
        "sum" | "product" => {
            if a.len() < 2 {
                return Err(ParseError::new(format!("`{name}` takes at least 2 arguments"), name.clone(), pos).into());
            }
            let mut acc = sub(&a[0])?;
            for arg in &a[1..] {
                let next = sub(arg)?;
                acc = if name == "sum" { RadialProfile::sum(&acc, &next) } else { RadialProfile::product(&acc, &next) };
            }
            acc
        }
        "mixture" => {
            if a.is_empty() || a.len() % 2 != 0 {
                return Err(ParseError::new("`mixture` takes weight, profile pairs", name.clone(), pos).into());
            }
            let parts = a
                .chunks(2)
                .map(|c| Ok((num::<T>(&c[0])?, sub(&c[1])?)))
                .collect::<Result<Vec<_>, ProfileError>>()?;
            RadialProfile::mixture(&parts)?
        }
        _ => return Err(ParseError::new("unknown profile", name.clone(), pos).into()),
    };
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Decay;

    #[test]
    fn parses_builtins_and_combinators() {
        let f: RadialProfile<f64> = parse_profile("exp_power(1.5)").unwrap();
        assert!((f.eval(1.0) - (-1.0f64).exp()).abs() < 1e-15);
        let f: RadialProfile<f64> = parse_profile("product(power(-1), exp_power(2))").unwrap();
        assert!((f.eval(2.0) - 0.5 * (-4.0f64).exp()).abs() < 1e-15);
        let f: RadialProfile<f64> = parse_profile("g(3, 3.0)").unwrap();
        assert_eq!(f.singularity_exponent, -2.0);
        let f: RadialProfile<f64> = parse_profile("mixture(0.5, exp_power(1), 2, admissible(3,-1.5))").unwrap();
        assert_eq!(f.decay, Decay::Exponential { rate: 1.0, power: 1.0 });
        let f: RadialProfile<f64> = parse_profile(" smoothed( -1.5 , 1 , 0.1 ) ").unwrap();
        assert_eq!(f.decay, Decay::CompactSupport { radius: 1.1 });
        let f: RadialProfile<f64> = parse_profile("scale(3, sum(power(0), truncated(1, 2)))").unwrap();
        assert!((f.eval(1.0) - 6.0).abs() < 1e-15);
    }

    #[test]
    fn errors_point_at_offending_token() {
        let e = parse_profile::<f64>("exp_pwer(2)").unwrap_err();
        let ProfileError::Parse(p) = e else { panic!("{e:?}") };
        assert_eq!((p.token.as_str(), p.position), ("exp_pwer", 0));
        let ProfileError::Parse(p) = parse_profile::<f64>("sum(power(1), g(3.5, 1))").unwrap_err() else { panic!() };
        assert_eq!((p.token.as_str(), p.position), ("3.5", 16));
        let ProfileError::Parse(p) = parse_profile::<f64>("power(1, 2)").unwrap_err() else { panic!() };
        assert_eq!(p.token, "power");
        assert!(matches!(parse_profile::<f64>("exp_power(-1)"), Err(ProfileError::InvalidParameter(_))));
        assert!(parse_profile::<f64>("power").is_err());
        assert!(parse_profile::<f64>("3").is_err());
    }
}
