//! `analyze`: runs the library analyses on built-in or user-supplied systems.
//!
//! Exit codes: 0 on success, 1 when `--strict` is set and a verdict is
//! Undecided, 2 on input errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use selfsim_core::action::{builtin, enumerate_msfw, hausdorff_test, load_spec, parse_sys_word, AutomatonSystem};
use selfsim_core::germs::{default_witness_periods, regular_open_test, restrict_bisection};
use selfsim_core::isg::Triple;
use selfsim_core::katsura::{KatsuraTriple, PAPER_PRESET};
use selfsim_core::report::{
    grig_report, hausdorff_json, kats_report, region_verdict_json, support_json, to_pretty, words_json,
    KatsReportOptions, REPORT_SCHEMA,
};
use selfsim_core::steinberg::{singular_test, AlgebraElement};
use selfsim_core::{Bounds, Error, Field, SelfSimilar};

#[derive(Parser, Debug)]
#[command(name = "analyze", version, about = "Analyses of self-similar actions, their germ groupoids and Steinberg algebras")]
struct Cli {
    /// Built-in system: grigorchuk, odometer2, katsura-paper.
    #[arg(long, global = true)]
    system: Option<String>,
    /// System file (JSON or TOML): an automaton table or Katsura matrices.
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    /// Coefficient field: Q or GF<p>.
    #[arg(long, global = true, default_value = "Q")]
    field: String,
    /// Search depth (word length for msfw, restriction depth for regular-open).
    #[arg(long, global = true)]
    depth: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Search limit for state, nucleus and pair searches (pairs get ten times this).
    #[arg(long, global = true)]
    bound: Option<usize>,
    /// Exit with status 1 when a verdict is Undecided.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether the germ groupoid is Hausdorff.
    Hausdorff,
    /// Minimal strongly fixed words of an element.
    Msfw {
        #[arg(long)]
        element: String,
    },
    /// Nucleus of a contracting automaton system.
    Nucleus,
    /// Whether a union of basic bisections is regular open.
    RegularOpen {
        /// A bisection `alpha,g,beta`; repeat for a union.
        #[arg(long = "set", required = true)]
        sets: Vec<String>,
    },
    /// Whether an algebra element has support with empty interior.
    Singular {
        /// `nucleus:c_e,c_b,c_c,c_d[@m]`, an inline JSON term list or a JSON file.
        #[arg(long)]
        element: String,
    },
    /// Convolution product of two algebra elements.
    Convolve {
        #[arg(long)]
        element: String,
        #[arg(long)]
        other: String,
    },
    /// Minimality, Hausdorffness, effectiveness and the fixator condition of a Katsura triple.
    KatsuraReport {
        #[arg(long, default_value_t = 8)]
        max_ell: i64,
        #[arg(long, default_value_t = 3)]
        max_size: usize,
        #[arg(long, default_value_t = 60)]
        samples: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
    /// The full set of Grigorchuk computations.
    GrigReport {
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Hausdorff => "hausdorff",
            Command::Msfw { .. } => "msfw",
            Command::Nucleus => "nucleus",
            Command::RegularOpen { .. } => "regular-open",
            Command::Singular { .. } => "singular",
            Command::Convolve { .. } => "convolve",
            Command::KatsuraReport { .. } => "katsura-report",
            Command::GrigReport { .. } => "grig-report",
        }
    }
}

enum Loaded {
    Automaton(AutomatonSystem),
    Katsura(KatsuraTriple),
}

/// Input problems, reported with exit status 2.
struct InputError(String);

impl From<Error> for InputError {
    fn from(e: Error) -> Self {
        InputError(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, InputError>;

fn load(cli: &Cli) -> CliResult<Loaded> {
    match (&cli.system, &cli.spec) {
        (Some(_), Some(_)) => Err(InputError("give either --system or --spec, not both".into())),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| InputError(format!("cannot read {}: {e}", path.display())))?;
            let is_katsura = path.extension().is_some_and(|e| e == "toml")
                && text.lines().any(|l| l.trim_start().starts_with("A ") || l.trim_start().starts_with("A="))
                || serde_json::from_str::<Value>(&text).is_ok_and(|v| v.get("A").is_some());
            let loaded = if is_katsura {
                KatsuraTriple::load(path).map(Loaded::Katsura)
            } else {
                load_spec(path).map(Loaded::Automaton)
            };
            loaded.map_err(|e| InputError(format!("malformed spec file {}: {e}", path.display())))
        }
        (name, None) => {
            let default = if matches!(cli.command, Command::KatsuraReport { .. }) { PAPER_PRESET } else { "grigorchuk" };
            let name = name.as_deref().unwrap_or(default);
            if name == PAPER_PRESET {
                return Ok(Loaded::Katsura(KatsuraTriple::paper()?));
            }
            builtin(name)
                .map(Loaded::Automaton)
                .map_err(|_| InputError(format!("unknown built-in system `{name}` (known: grigorchuk, odometer2, {PAPER_PRESET})")))
        }
    }
}

/// `U_{g,m}` coefficients for `g = e, b, c, d`.
fn nucleus_element<S: SelfSimilar>(sys: &S, field: Field, spec: &str) -> CliResult<AlgebraElement<S::Elem, S::Key>> {
    let (coeffs, m) = match spec.split_once('@') {
        Some((c, m)) => (c, m.trim().parse::<usize>().map_err(|_| InputError(format!("bad depth in `{spec}`")))?),
        None => (spec, 1),
    };
    let coeffs: Vec<&str> = coeffs.split(',').collect();
    if coeffs.len() != 4 {
        return Err(InputError("nucleus: expects four coefficients for e, b, c, d".into()));
    }
    let mut f = AlgebraElement::zero(field);
    for (name, c) in ["e", "b", "c", "d"].iter().zip(coeffs) {
        let g = sys.parse_elem(name)?;
        let u = restrict_bisection(sys, &Triple::new(sys, vec![], g, vec![])?, &vec![1; m])?;
        f.add_term(sys, u, field.parse_scalar(c)?)?;
    }
    Ok(f)
}

fn algebra_element<S: SelfSimilar>(sys: &S, field: Field, spec: &str) -> CliResult<AlgebraElement<S::Elem, S::Key>> {
    if let Some(rest) = spec.strip_prefix("nucleus:") {
        return nucleus_element(sys, field, rest);
    }
    let text = if spec.trim_start().starts_with('[') {
        spec.to_string()
    } else {
        std::fs::read_to_string(spec).map_err(|e| InputError(format!("cannot read element file {spec}: {e}")))?
    };
    let v: Value = serde_json::from_str(&text).map_err(|e| InputError(format!("malformed element JSON: {e}")))?;
    Ok(AlgebraElement::from_json(sys, field, &v)?)
}

fn bisection<S: SelfSimilar>(sys: &S, spec: &str) -> CliResult<Triple<S::Elem>> {
    let parts: Vec<&str> = spec.split(',').collect();
    let [a, g, b] = parts[..] else {
        return Err(InputError(format!("bisection `{spec}` must be alpha,g,beta")));
    };
    Ok(Triple::new(sys, parse_sys_word(sys, a)?, sys.parse_elem(g)?, parse_sys_word(sys, b)?)?)
}

/// Result of one command. Library errors that mean a search bound was hit
/// become Undecided verdicts; other library errors are input errors.
fn command_result<S: SelfSimilar>(sys: &S, cli: &Cli, field: Field) -> CliResult<Value> {
    let undecided = |e: Error| -> CliResult<Value> {
        if e.is_bound() {
            Ok(json!({"verdict": "Undecided", "reason": format!("bound exceeded: {e}")}))
        } else {
            Err(e.into())
        }
    };
    let out = match &cli.command {
        Command::Hausdorff => {
            let nucleus = match sys.nucleus_elements() {
                Ok(n) => n,
                Err(e) => return undecided(e),
            };
            match hausdorff_test(sys, &nucleus) {
                Ok(v) => hausdorff_json(sys, &v),
                Err(e) => return undecided(e),
            }
        }
        Command::Nucleus => match sys.nucleus_elements() {
            Ok(n) => json!({"size": n.len(), "elements": n.iter().map(|g| sys.format_elem(g)).collect::<Vec<_>>()}),
            Err(e) => return undecided(e),
        },
        Command::Msfw { element } => {
            let g = sys.parse_elem(element)?;
            let len = cli.depth.unwrap_or(12);
            match enumerate_msfw(sys, &g, len) {
                Ok(ws) => json!({"element": sys.format_elem(&g), "max_length": len, "count": ws.len(), "words": words_json(sys, &ws)}),
                Err(e) => return undecided(e),
            }
        }
        Command::RegularOpen { sets } => {
            let ts = sets.iter().map(|s| bisection(sys, s)).collect::<CliResult<Vec<_>>>()?;
            match regular_open_test(sys, &ts, cli.depth.unwrap_or(4), &default_witness_periods()) {
                Ok(r) => region_verdict_json(sys, &r),
                Err(e) => return undecided(e),
            }
        }
        Command::Singular { element } => {
            let f = algebra_element(sys, field, element)?;
            match singular_test(sys, &f) {
                Ok(r) => {
                    let mut v = support_json(sys, &r);
                    v["element"] = f.to_json(sys);
                    v
                }
                Err(e) => return undecided(e),
            }
        }
        Command::Convolve { element, other } => {
            let f = algebra_element(sys, field, element)?;
            let g = algebra_element(sys, field, other)?;
            match f.convolve(sys, &g) {
                Ok(h) => json!({"product": h.to_json(sys), "text": h.format(sys), "terms": h.len()}),
                Err(e) => return undecided(e),
            }
        }
        Command::KatsuraReport { .. } | Command::GrigReport { .. } => unreachable!("handled by dispatch"),
    };
    Ok(out)
}

fn run_generic<S: SelfSimilar>(sys: &S, cli: &Cli, field: Field) -> CliResult<Value> {
    Ok(json!({
        "schema": REPORT_SCHEMA,
        "command": cli.command.name(),
        "system": sys.name(),
        "field": field.to_string(),
        "result": command_result(sys, cli, field)?,
    }))
}

fn dispatch(cli: &Cli) -> CliResult<Value> {
    let field: Field = cli.field.parse().map_err(|e: Error| InputError(e.to_string()))?;
    let mut sys = load(cli)?;
    if let Some(n) = cli.bound {
        let b = Bounds {
            pairs: n.saturating_mul(10),
            nucleus: n,
            states: n,
            ..Bounds::default()
        };
        match &mut sys {
            Loaded::Automaton(s) => s.set_bounds(b),
            Loaded::Katsura(t) => t.set_bounds(b),
        }
    }
    match (&cli.command, &sys) {
        (Command::KatsuraReport { max_ell, max_size, samples, seed }, Loaded::Katsura(t)) => {
            if *max_ell < 1 || *max_size < 1 {
                return Err(InputError("--max-ell and --max-size must be positive".into()));
            }
            let opts = KatsReportOptions {
                max_ell: *max_ell,
                max_set_size: *max_size,
                samples_per_vertex: *samples,
                seed: *seed,
                ..KatsReportOptions::default()
            };
            Ok(kats_report(t, opts)?)
        }
        (Command::KatsuraReport { .. }, _) => Err(InputError("katsura-report needs a Katsura system".into())),
        (Command::GrigReport { samples, seed }, Loaded::Automaton(s)) => {
            Ok(grig_report(s, cli.depth.unwrap_or(12), *samples, *seed)?)
        }
        (Command::GrigReport { .. }, _) => Err(InputError("grig-report needs the grigorchuk system".into())),
        (_, Loaded::Automaton(s)) => run_generic(s, cli, field),
        (_, Loaded::Katsura(t)) => run_generic(t, cli, field),
    }
}

fn is_undecided(v: &Value) -> bool {
    match v {
        Value::Object(m) => m.get("verdict").is_some_and(|x| x == "Undecided") || m.values().any(is_undecided),
        Value::Array(a) => a.iter().any(is_undecided),
        _ => false,
    }
}

/// Indented `key: value` lines.
fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match x {
                    Value::Object(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_text(x, indent + 1, out);
                    }
                    Value::Array(a)
                        if a
                            .iter()
                            .any(|y| y.is_object() || y.is_array() || y.as_str().is_some_and(|t| t.len() > 40)) =>
                    {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_text(x, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}\n", scalar_text(x))),
                }
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                if x.is_object() || x.is_array() {
                    out.push_str(&format!("{pad}- [{i}]\n"));
                    render_text(x, indent + 1, out);
                } else {
                    out.push_str(&format!("{pad}- {}\n", scalar_text(x)));
                }
            }
        }
        x => out.push_str(&format!("{pad}{}\n", scalar_text(x))),
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(scalar_text).collect::<Vec<_>>().join(", "),
        x => x.to_string(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(v) => {
            match cli.format {
                Format::Json => print!("{}", to_pretty(&v)),
                Format::Text => {
                    let mut s = String::new();
                    render_text(&v, 0, &mut s);
                    print!("{s}");
                }
            }
            if cli.strict && is_undecided(&v) {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
