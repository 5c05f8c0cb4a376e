use std::ffi::OsString;

use clap::parser::ValueSource;
use clap::{Arg, ArgAction, ArgMatches, Command};

use crate::commands::{check, identity, sweep, transform};
use crate::config::RunConfig;
use crate::error::{CliError, EXIT_USAGE};
use crate::output::{render, Format, Report};

/// Exit code and captured streams of one invocation.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: Vec<u8>,
    pub stderr: Vec<String>,
}

/// Options per leaf command: `(name, takes a value, help)`.
type Opts = &'static [(&'static str, bool, &'static str)];

const TRANSFORM: Opts = &[
    ("profile", true, "radial profile, e.g. exp_power(2)"),
    ("n", true, "dimension"),
    ("grid", true, "frequencies: log:a:b:N, lin:a:b:N or a comma list"),
    ("tol", true, "quadrature tolerance"),
];

fn check_opts(sub: &str) -> Opts {
    match sub {
        "thm-decreasing" => &[
            ("profile", true, "radial profile f"),
            ("n", true, "dimension (3 or more)"),
            ("branch", true, "integrability branch, 1 or 2"),
            ("grid", true, "frequency grid"),
            ("tol", true, "relative tolerance"),
        ],
        "thm-omega" => &[
            ("profile", true, "radial profile f"),
            ("body", true, "star body, e.g. cube(3)"),
            ("battery", true, "number of test functions"),
            ("seed", true, "master seed"),
            ("samples", true, "Monte Carlo samples per pairing"),
            ("sectional", false, "also run the sectional route"),
            ("waive", true, "comma separated hypothesis names to skip"),
            ("allow-fd", false, "allow finite-difference derivatives"),
            ("tol", true, "relative tolerance"),
        ],
        "thm-convex" => &[
            ("body", true, "convex body"),
            ("psi", true, "ball(r) or gaussian(sigma)"),
            ("alpha", true, "exponent of |x|, in (-n, 2-n]"),
            ("samples", true, "Monte Carlo directions"),
            ("seed", true, "seed"),
            ("tol", true, "relative tolerance"),
        ],
        "polya" => &[
            ("profile", true, "profile on the line"),
            ("grid", true, "frequency grid for the confirming scan"),
            ("tol", true, "relative tolerance"),
        ],
        "gram" => &[
            ("function", true, "profile f, evaluated at the body norm"),
            ("n", true, "dimension"),
            ("body", true, "norm body (default ball(n))"),
            ("points", true, "grid:a:b:k, random:k:h or list:x1,x2,..."),
            ("seed", true, "seed for random points"),
            ("tol", true, "relative tolerance"),
        ],
        _ => &[],
    }
}

fn identity_opts(sub: &str) -> Opts {
    match sub {
        "slice" => &[
            ("n", true, "dimension(s)"),
            ("trials", true, "trials per dimension"),
            ("seed", true, "seed"),
            ("tol", true, "absolute residual threshold"),
        ],
        "radon-average" => &[
            ("n", true, "dimension(s), 3 or more"),
            ("r", true, "radii"),
            ("sigma", true, "Gaussian width"),
            ("tol", true, "relative residual threshold"),
        ],
        "dilation" => &[
            ("body", true, "body"),
            ("lambda", true, "dilation factors"),
            ("xi", true, "frequency vector, comma separated"),
            ("tol", true, "residual threshold relative to the volume"),
        ],
        "lemma1" => &[
            ("pairs", true, "number of (a, b) pairs, a square"),
            ("min", true, "smallest a and b"),
            ("max", true, "largest a and b"),
            ("tol", true, "absolute residual threshold"),
        ],
        _ => &[],
    }
}

fn sweep_opts(sub: &str) -> Opts {
    match sub {
        "schoenberg" => &[
            ("n", true, "dimension"),
            ("p", true, "norm exponents: a:b:N or a comma list"),
            ("q", true, "powers in (0, 4]"),
            ("points", true, "Gram point set"),
            ("seed", true, "seed"),
            ("tol", true, "relative tolerance"),
        ],
        "gnp" => &[
            ("n", true, "dimension(s), 3 or more"),
            ("p", true, "exponents"),
            ("grid", true, "frequency grid"),
            ("tol", true, "relative tolerance"),
        ],
        _ => &[],
    }
}

fn leaf(name: &'static str, about: &'static str, opts: Opts) -> Command {
    let mut cmd = Command::new(name).about(about);
    for &(id, value, help) in opts {
        let arg = Arg::new(id).long(id).help(help);
        cmd = cmd.arg(if value { arg.value_name("VALUE").allow_hyphen_values(true).action(ArgAction::Set) } else { arg.action(ArgAction::SetTrue) });
    }
    cmd
}

fn group(name: &'static str, about: &'static str, subs: &[&'static str], opts: fn(&str) -> Opts) -> Command {
    Command::new(name)
        .about(about)
        .subcommand_required(true)
        .arg_required_else_help(true)
        .subcommands(subs.iter().map(|&s| leaf(s, "", opts(s))))
}

fn cli() -> Command {
    Command::new("posdef")
        .about("Positive-definiteness checks for radial and norm-dependent functions")
        .version(crate::output::VERSION)
        .subcommand_required(true)
        .arg_required_else_help(true)
        .arg(Arg::new("config").long("config").global(true).value_name("FILE").help("read parameters from a config file"))
        .arg(Arg::new("save-config").long("save-config").global(true).value_name("FILE").help("write the resolved config"))
        .arg(Arg::new("format").long("format").global(true).value_name("csv|json").help("output format"))
        .arg(Arg::new("output").long("output").global(true).value_name("FILE").help("write output here instead of stdout"))
        .subcommand(leaf("transform", "radial Fourier transform on a grid", TRANSFORM))
        .subcommand(group("check", "verdict engines", check::SUBCOMMANDS, check_opts))
        .subcommand(group("identity", "identity residual tables", identity::SUBCOMMANDS, identity_opts))
        .subcommand(group("sweep", "parameter sweeps", sweep::SUBCOMMANDS, sweep_opts))
        .subcommand(Command::new("run").about("re-run the command recorded in --config"))
}

/// Command path and command-line parameters of the leaf.
fn leaf_params(m: &ArgMatches) -> (Vec<String>, &ArgMatches) {
    let mut path = Vec::new();
    let mut cur = m;
    while let Some((name, sub)) = cur.subcommand() {
        path.push(name.to_string());
        cur = sub;
    }
    (path, cur)
}

fn given(m: &ArgMatches, id: &str) -> Option<String> {
    if m.value_source(id) != Some(ValueSource::CommandLine) {
        return None;
    }
    m.try_get_one::<String>(id).ok().flatten().cloned()
}

fn dispatch(path: &[String], config: &mut RunConfig) -> Result<Report, CliError> {
    let mut p = config.params();
    match path.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["transform"] => transform::run(&mut p),
        ["check", sub] => check::run(sub, &mut p),
        ["identity", sub] => identity::run(sub, &mut p),
        ["sweep", sub] => sweep::run(sub, &mut p),
        _ => Err(CliError::Usage(format!("unknown command `{}`", path.join(" ")))),
    }
}

fn known_keys(path: &[String]) -> Option<Opts> {
    match path.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["transform"] => Some(TRANSFORM),
        ["check", s] if check::SUBCOMMANDS.contains(s) => Some(check_opts(s)),
        ["identity", s] if identity::SUBCOMMANDS.contains(s) => Some(identity_opts(s)),
        ["sweep", s] if sweep::SUBCOMMANDS.contains(s) => Some(sweep_opts(s)),
        _ => None,
    }
}

fn execute(m: &ArgMatches) -> Result<Outcome, CliError> {
    let (path, leaf) = leaf_params(m);
    let config_path = given(leaf, "config").or_else(|| given(m, "config"));
    let global = |id: &str| given(leaf, id).or_else(|| given(m, id));

    let mut config = match &config_path {
        Some(file) => RunConfig::load(file)?,
        None => RunConfig::default(),
    };
    if path == ["run"] {
        if config_path.is_none() {
            return Err(CliError::Usage("`run` needs --config".into()));
        }
        if config.command.is_empty() {
            return Err(CliError::Usage("config file records no command".into()));
        }
    } else {
        if config_path.is_some() && !config.command.is_empty() && config.command != path {
            return Err(CliError::Usage(format!(
                "config file is for `{}`, not `{}`",
                config.command.join(" "),
                path.join(" ")
            )));
        }
        config.command = path.clone();
        if let Some(opts) = known_keys(&path) {
            for &(id, value, _) in opts {
                if value {
                    if let Some(v) = given(leaf, id) {
                        config.params.insert(id.to_string(), v);
                    }
                } else if leaf.value_source(id) == Some(ValueSource::CommandLine) && leaf.get_flag(id) {
                    config.params.insert(id.to_string(), "true".into());
                }
            }
        }
    }
    let command = config.command.clone();
    let Some(opts) = known_keys(&command) else {
        return Err(CliError::Usage(format!("unknown command `{}`", command.join(" "))));
    };
    if let Some(key) = config.params.keys().find(|k| *k != "format" && !opts.iter().any(|(id, _, _)| id == k)) {
        return Err(CliError::Usage(format!("`{key}` is not a parameter of `{}`", command.join(" "))));
    }
    if let Some(f) = global("format") {
        config.params.insert("format".into(), f);
    }
    let default_format = if command[0] == "check" { Format::Json } else { Format::Csv };
    let format = Format::parse(&config.params().text_or("format", default_format.as_str()))?;

    if let Some(threads) = std::env::var_os("POSDEF_THREADS") {
        let n: usize = threads
            .to_str()
            .and_then(|s| s.trim().parse().ok())
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Usage(format!("POSDEF_THREADS must be a positive integer, got {threads:?}")))?;
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }

    let report = dispatch(&command, &mut config)?;
    let bytes = render(&report, &config, format)?;
    if let Some(file) = global("save-config") {
        std::fs::write(&file, config.to_text()).map_err(|e| CliError::io(&file, e))?;
    }
    let stdout = match global("output") {
        Some(file) => {
            std::fs::write(&file, &bytes).map_err(|e| CliError::io(&file, e))?;
            Vec::new()
        }
        None => bytes,
    };
    Ok(Outcome { code: report.exit, stdout, stderr: report.summary })
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match cli().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text.into_bytes(), stderr: Vec::new() }
            } else {
                Outcome { code, stdout: Vec::new(), stderr: vec![text.trim_end().to_string()] }
            };
        }
    };
    match execute(&matches) {
        Ok(o) => o,
        Err(e) => Outcome { code: e.exit_code(), stdout: Vec::new(), stderr: vec![format!("error: {e}")] },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_tree_is_consistent() {
        cli().debug_assert();
    }

    #[test]
    fn usage_errors_exit_64() {
        assert_eq!(run(["posdef", "transform", "--bogus", "1"]).code, 64);
        assert_eq!(run(["posdef", "transform", "--profile", "exp_power(", "--n", "3"]).code, 64);
        assert_eq!(run(["posdef", "sweep", "gnp", "--n", "3", "--p", ""]).code, 64);
        assert_eq!(run(["posdef", "run"]).code, 64);
        assert_eq!(run(["posdef", "--help"]).code, 0);
        assert_eq!(run(["posdef", "check", "thm-convex", "--body", "ball(3)", "--alpha", "-3"]).code, 64);
    }
}
