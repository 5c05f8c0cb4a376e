use posdef_core::bodies::parse_body;
use posdef_core::criteria::{
    gram_test, polya_verdict, verify_thm_convex, verify_thm_decreasing, verify_thm_omega, ConvexOptions, GramSpec,
    OmegaOptions, PsiKind, DEFAULT_TOL,
};
use posdef_core::grammar::{parse_expr, Expr};
use posdef_core::profiles::Thm2Branch;
use posdef_core::transforms::TestFunction;

use super::{body, grid, profile, value_list, verdict_report};
use crate::config::{parse_value, Params};
use crate::error::CliError;
use crate::output::Report;

pub const SUBCOMMANDS: &[&str] = &["thm-decreasing", "thm-omega", "thm-convex", "polya", "gram"];

pub fn run(which: &str, p: &mut Params) -> Result<Report, CliError> {
    let verdict = match which {
        "thm-decreasing" => {
            let f = profile(p, "profile")?;
            let n: usize = p.parse("n")?;
            let branch: u32 = p.parse_or("branch", 1)?;
            let branch = Thm2Branch::try_from(branch)?;
            let grid = grid(p)?;
            let tol = p.parse_or("tol", DEFAULT_TOL)?;
            verify_thm_decreasing(&f, n, branch, &grid, tol)?
        }
        "thm-omega" => {
            let f = profile(p, "profile")?;
            let k = body(p, "body")?;
            let count: usize = p.parse_or("battery", 20)?;
            let mut o = OmegaOptions::new(p.parse_or("samples", 100_000)?, p.parse_or("seed", 0)?);
            o.sectional = p.flag("sectional")?;
            o.allow_finite_difference = p.flag("allow-fd")?;
            o.tol = p.parse_or("tol", DEFAULT_TOL)?;
            o.waivers = p.text_or("waive", "").split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect();
            if count == 0 {
                return Err(CliError::Usage("--battery must be at least 1".into()));
            }
            let battery = TestFunction::battery(k.dim, count, o.seed)?;
            verify_thm_omega(&f, &k, &battery, &o)?
        }
        "thm-convex" => {
            let k = body(p, "body")?;
            let psi = psi_kind(&p.text_or("psi", "ball(1)"))?;
            let alpha: f64 = p.parse_or("alpha", 2.0 - k.dim as f64)?;
            let mut o = ConvexOptions::new(p.parse_or("samples", 100_000)?, p.parse_or("seed", 0)?);
            o.tol = p.parse_or("tol", DEFAULT_TOL)?;
            verify_thm_convex(&k, psi, alpha, &o)?
        }
        "polya" => {
            let f = profile(p, "profile")?;
            let grid = grid(p)?;
            let tol = p.parse_or("tol", DEFAULT_TOL)?;
            polya_verdict(&f, &grid, tol)?
        }
        "gram" => {
            let f = profile(p, "function")?;
            let n: usize = p.parse("n")?;
            let norm_text = p.text_or("body", &format!("ball({n})"));
            let k = parse_body::<f64>(&norm_text).map_err(|e| CliError::Usage(format!("--body: {e}")))?;
            if k.dim != n {
                return Err(CliError::Usage(format!("--body is in dimension {}, --n is {n}", k.dim)));
            }
            let seed: u64 = p.parse_or("seed", 0)?;
            let spec = points(n, &p.text("points")?, seed)?;
            let tol = p.parse_or("tol", DEFAULT_TOL)?;
            let func = move |x: &[f64]| f.eval(k.norm(x));
            gram_test(&func, &spec, tol)?
        }
        other => return Err(CliError::Usage(format!("unknown check `{other}`"))),
    };
    Ok(verdict_report(verdict))
}

/// `ball(r)` or `gaussian(σ)`.
pub fn psi_kind(text: &str) -> Result<PsiKind, CliError> {
    let bad = |m: String| CliError::Usage(format!("--psi: {m}"));
    let expr = parse_expr(text).map_err(|e| bad(e.to_string()))?;
    let Expr::Call { name, args, bare: false, .. } = &expr else {
        return Err(bad(format!("expected ball(r) or gaussian(σ), got `{}`", expr.token())));
    };
    let [arg] = args.as_slice() else {
        return Err(bad(format!("`{name}` takes one argument")));
    };
    let x = arg.number().map_err(|e| bad(e.to_string()))?;
    if !(x > 0.0 && x.is_finite()) {
        return Err(bad(format!("`{name}` needs a positive finite argument, got {x}")));
    }
    match name.as_str() {
        "ball" => Ok(PsiKind::Ball { radius: x }),
        "gaussian" => Ok(PsiKind::Gaussian { sigma: x }),
        other => Err(bad(format!("unknown ψ `{other}`"))),
    }
}

/// `grid:a:b:k` (k points per axis on `[a, b]ⁿ`) or `random:k:h` (uniform in `[−h, h]ⁿ`).
pub fn points(n: usize, text: &str, seed: u64) -> Result<GramSpec, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        ["grid", a, b, k] => {
            let (a, b): (f64, f64) = (parse_value("points", a)?, parse_value("points", b)?);
            let k: usize = parse_value("points", k)?;
            let axis = GramSpec::grid_1d(a, b, k)?;
            let mut pts = vec![Vec::new()];
            for _ in 0..n {
                pts = pts
                    .into_iter()
                    .flat_map(|p: Vec<f64>| axis.points.iter().map(move |x| [p.clone(), x.clone()].concat()))
                    .collect();
                if pts.len() > posdef_core::criteria::MAX_GRAM_POINTS {
                    return Err(CliError::Usage(format!("--points: {k}^{n} points exceed the cap")));
                }
            }
            Ok(GramSpec::new(n, pts, None)?)
        }
        ["random", k, h] => {
            let k: usize = parse_value("points", k)?;
            let h: f64 = parse_value("points", h)?;
            Ok(GramSpec::random(n, k, seed, h)?)
        }
        ["list", list] => {
            let flat = value_list("points", list)?;
            if flat.len() % n != 0 {
                return Err(CliError::Usage(format!("--points: {} coordinates do not split into dimension {n}", flat.len())));
            }
            Ok(GramSpec::new(n, flat.chunks(n).map(<[f64]>::to_vec).collect(), None)?)
        }
        _ => Err(CliError::Usage(format!(
            "--points: cannot parse `{text}` (expected grid:a:b:k, random:k:h or list:x1,x2,…)"
        ))),
    }
}
