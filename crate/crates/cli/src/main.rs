//! `hyperwit` command-line front end.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or input error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hyperwit::entanglement::{self, procedure_alpha, schmidt};
use hyperwit::hypergraph::{parse_edge_list, Bipartition, Family, Hypergraph};
use hyperwit::locc::{certified_lower_bound, reduce, reduce_all};
use hyperwit::measurement::{product_settings, witness_settings_capped, SettingMode, SettingReport};
use hyperwit::random::{lower_bound_campaign, RandomSpec};
use hyperwit::report::{campaign_csv, entanglement_csv, robustness_csv, settings_csv, to_json};
use hyperwit::scalar::{Rational, Scalar};
use hyperwit::states::{build_state, extract_hypergraph, projector_identity_check, verify_basis, verify_stabilizers, SignState, SignStateDump};
use hyperwit::witness::{
    build_witness, detect_family, expectation, feasibility_check, optimality_epsilon, resolve_alpha, robustness_table, AlphaSource, NoisyState,
    WitnessKind, WitnessSpec,
};
use hyperwit::{Error, Result};

#[derive(Parser)]
#[command(name = "hyperwit", version, about = "Entanglement of hypergraph states: exact states, geometric measure, LOCC bounds, witnesses")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (falls back to HYPERWIT_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Largest n for exhaustive bipartition sweeps.
    #[arg(long = "cap-sweep", global = true, default_value_t = entanglement::DEFAULT_SWEEP_CAP)]
    cap_sweep: usize,
    /// Largest n for dense-matrix checks.
    #[arg(long = "cap-dense", global = true, default_value_t = hyperwit::states::DEFAULT_DENSE_CAP)]
    cap_dense: usize,
    /// Largest n for the symbolic projector expansion.
    #[arg(long = "cap-symbolic", global = true, default_value_t = hyperwit::measurement::PROJECTOR_CAP)]
    cap_symbolic: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args, Clone)]
struct Input {
    /// single-max | all-n-1 | all-ge-n-1
    #[arg(long)]
    family: Option<Family>,
    /// Edge list as JSON, e.g. "[[1,2],[2,3,4]]".
    #[arg(long)]
    edges: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Text form, e.g. "n=3; edges=[[1,2,3]]".
    #[arg(long)]
    hypergraph: Option<String>,
}

impl Input {
    fn resolve(&self) -> Result<Hypergraph> {
        match (&self.family, &self.edges, &self.hypergraph) {
            (Some(f), None, None) => Hypergraph::family(*f, self.need_n()?),
            (None, Some(e), None) => Hypergraph::canonicalize(parse_edge_list(e)?, self.need_n()?),
            (None, None, Some(t)) => t.parse(),
            _ => Err(Error::Parameter("give exactly one of --family, --edges or --hypergraph".into())),
        }
    }

    fn need_n(&self) -> Result<usize> {
        self.n.ok_or_else(|| Error::Parameter("--n is required".into()))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build or inspect sign-state tables.
    #[command(subcommand)]
    State(StateCmd),
    /// Exact stabilizer checks.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Geometric entanglement.
    Entanglement {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = Method::Brute)]
        method: Method,
        /// Compare brute force with the closed form and the procedure.
        #[arg(long = "cross-check")]
        cross_check: bool,
        /// Only this bipartition, e.g. 1,2.
        #[arg(long = "partA")]
        part_a: Option<String>,
    },
    /// Reduction certificate across one or all bipartitions.
    Reduce {
        #[command(flatten)]
        input: Input,
        #[arg(long = "partA")]
        part_a: Option<String>,
    },
    /// Entanglement witnesses.
    #[command(subcommand)]
    Witness(WitnessCmd),
    /// Local measurement settings.
    #[command(subcommand)]
    Settings(SettingsCmd),
    /// Randomized audits.
    #[command(subcommand)]
    Campaign(CampaignCmd),
}

#[derive(Subcommand)]
enum StateCmd {
    /// Sign table of |H> as a hex dump.
    Build {
        #[command(flatten)]
        input: Input,
    },
    /// Amplitudes and recovered hypergraph of a hex dump or hypergraph.
    Dump {
        #[command(flatten)]
        input: Input,
        /// Hex sign bitmap (use with --n).
        #[arg(long)]
        hex: Option<String>,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    Stabilizers {
        #[command(flatten)]
        input: Input,
    },
    Basis {
        #[command(flatten)]
        input: Input,
    },
    Projector {
        #[command(flatten)]
        input: Input,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Brute,
    Procedure,
    ClosedForm,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Projector,
    Stabilizer,
}

impl From<Kind> for WitnessKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Projector => WitnessKind::Projector,
            Kind::Stabilizer => WitnessKind::Stabilizer,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Source {
    Auto,
    Bound,
    Measured,
}

impl From<Source> for AlphaSource {
    fn from(s: Source) -> Self {
        match s {
            Source::Auto => AlphaSource::Auto,
            Source::Bound => AlphaSource::Bound,
            Source::Measured => AlphaSource::Measured,
        }
    }
}

#[derive(Args, Clone)]
struct WitnessArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum, default_value_t = Kind::Projector)]
    kind: Kind,
    #[arg(long = "alpha-source", value_enum, default_value_t = Source::Auto)]
    alpha_source: Source,
}

#[derive(Subcommand)]
enum WitnessCmd {
    Build {
        #[command(flatten)]
        args: WitnessArgs,
    },
    /// Expectation on the white-noise mixture with noise fraction --p.
    Eval {
        #[command(flatten)]
        args: WitnessArgs,
        /// Fraction like 1/6 or decimal like 0.25.
        #[arg(long)]
        p: String,
    },
    /// Robustness parameters over a range of n.
    Table {
        #[arg(long)]
        family: Family,
        /// Range like 2..8 (inclusive) or a single n.
        #[arg(long)]
        n: String,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Canonical,
    Greedy,
}

impl From<Mode> for SettingMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Canonical => SettingMode::Canonical,
            Mode::Greedy => SettingMode::Greedy,
        }
    }
}

#[derive(Args, Clone)]
struct SettingsArgs {
    #[command(flatten)]
    witness: WitnessArgs,
    #[arg(long, value_enum, default_value_t = Mode::Canonical)]
    mode: Mode,
    /// Settings of a stabilizer product instead of a witness, e.g. 1,2.
    #[arg(long)]
    product: Option<String>,
}

#[derive(Subcommand)]
enum SettingsCmd {
    Count {
        #[command(flatten)]
        args: SettingsArgs,
    },
    List {
        #[command(flatten)]
        args: SettingsArgs,
    },
}

#[derive(Subcommand)]
enum CampaignCmd {
    /// Check E >= 1/2^(k_max-1) on seeded random connected hypergraphs.
    LowerBound {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long = "n-min", default_value_t = 3)]
        n_min: usize,
        #[arg(long = "n-max", default_value_t = 8)]
        n_max: usize,
        #[arg(long = "max-edge", default_value_t = 4)]
        max_edge: usize,
        #[arg(long = "extra-edges", default_value_t = 3)]
        extra_edges: usize,
        /// Also certify every bipartition by reduction up to this n.
        #[arg(long = "certify-up-to")]
        certify_up_to: Option<usize>,
    },
}

/// Rendered output plus whether every check in it passed.
struct Outcome {
    text: String,
    ok: bool,
}

impl Outcome {
    fn pass(text: String) -> Self {
        Outcome { text, ok: true }
    }
}

fn parse_vertices(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad vertex '{t}' in '{s}'"))))
        .collect()
}

fn parse_range(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::Parse(format!("bad range '{s}'"));
    match s.split_once("..") {
        Some((a, b)) => {
            let a: usize = a.trim().parse().map_err(|_| bad())?;
            let b: usize = b.trim_start_matches('=').trim().parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            Ok((a..=b).collect())
        }
        None => Ok(vec![s.trim().parse().map_err(|_| bad())?]),
    }
}

/// `a/b` or a finite decimal, as an exact rational.
fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("bad number '{s}'"));
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: i128 = a.trim().parse().map_err(|_| bad())?;
        let b: i128 = b.trim().parse().map_err(|_| bad())?;
        if b == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(a, b));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if frac.len() > 30 || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let den = 10i128.pow(frac.len() as u32);
    let whole = format!("{int}{frac}");
    let num: i128 = whole.parse().map_err(|_| bad())?;
    Ok(Rational::new(num, den))
}

fn format_or(cli: &Cli, default: Format) -> Format {
    cli.format.unwrap_or(default)
}

fn unsupported(format: Format) -> Error {
    Error::Parameter(format!(
        "format '{}' is not available for this command",
        format.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
    ))
}

fn scalar_json(s: Scalar) -> Value {
    serde_json::to_value(s).expect("scalar serializes")
}

fn value_text(v: &Value) -> Result<String> {
    to_json(v)
}

fn run_state(cli: &Cli, cmd: &StateCmd) -> Result<Outcome> {
    match cmd {
        StateCmd::Build { input } => {
            let h = input.resolve()?;
            let state = build_state(&h)?;
            let dump = SignStateDump::from(&state);
            match format_or(cli, Format::Json) {
                Format::Json => Ok(Outcome::pass(value_text(&json!({
                    "hypergraph": h,
                    "text": h.to_string(),
                    "n": dump.n,
                    "signs_hex": dump.signs_hex,
                    "negative_count": state.negative_count(),
                }))?)),
                Format::Text => Ok(Outcome::pass(format!("{}\n", dump.signs_hex))),
                f => Err(unsupported(f)),
            }
        }
        StateCmd::Dump { input, hex } => {
            let state = match hex {
                Some(hex) => SignState::from_hex(input.need_n()?, hex)?,
                None => build_state(&input.resolve()?)?,
            };
            let (h, global_sign) = extract_hypergraph(&state)?;
            let n = state.n();
            let rows: Vec<(usize, String, i8)> = (0..state.dim()).map(|x| (x, format!("{x:0n$b}"), state.sign(x))).collect();
            match format_or(cli, Format::Json) {
                Format::Json => {
                    let amps: Vec<Value> = rows.iter().map(|(x, b, s)| json!({"label": x, "bits": b, "sign": s})).collect();
                    Ok(Outcome::pass(value_text(&json!({
                        "n": n,
                        "signs_hex": state.to_hex(),
                        "hypergraph": h,
                        "text": h.to_string(),
                        "global_sign": global_sign,
                        "normalization": format!("1/sqrt(2^{n})"),
                        "amplitudes": amps,
                    }))?))
                }
                Format::Csv => {
                    let mut out = String::from("label,bits,sign\n");
                    for (x, b, s) in rows {
                        out.push_str(&format!("{x},{b},{s}\n"));
                    }
                    Ok(Outcome::pass(out))
                }
                Format::Text => Ok(Outcome::pass(format!("{h}\n"))),
            }
        }
    }
}

fn run_verify(cli: &Cli, cmd: &VerifyCmd) -> Result<Outcome> {
    let (check, input) = match cmd {
        VerifyCmd::Stabilizers { input } => ("stabilizers", input),
        VerifyCmd::Basis { input } => ("basis", input),
        VerifyCmd::Projector { input } => ("projector", input),
    };
    let h = input.resolve()?;
    let (holds, details) = match cmd {
        VerifyCmd::Stabilizers { .. } => (verify_stabilizers(&h)?, Value::Null),
        VerifyCmd::Basis { .. } => {
            let b = verify_basis(&h, cli.cap_dense)?;
            (b.eigen_relations_hold && num_traits::Zero::is_zero(&b.max_orthonormality_error), serde_json::to_value(&b).unwrap())
        }
        VerifyCmd::Projector { .. } => {
            let p = projector_identity_check(&h, cli.cap_dense)?;
            (p.holds(), serde_json::to_value(&p).unwrap())
        }
    };
    let text = match format_or(cli, Format::Json) {
        Format::Json => value_text(&json!({"check": check, "hypergraph": h.to_string(), "holds": holds, "details": details}))?,
        Format::Text => format!("{check}: {}\n", if holds { "ok" } else { "FAILED" }),
        f => return Err(unsupported(f)),
    };
    Ok(Outcome { text, ok: holds })
}

fn run_entanglement(cli: &Cli, input: &Input, method: Method, cross_check: bool, part_a: &Option<String>) -> Result<Outcome> {
    let h = input.resolve()?;
    let format = format_or(cli, Format::Json);
    if let Some(p) = part_a {
        let bp = Bipartition::new(h.n(), &parse_vertices(p)?)?;
        let spec = schmidt(&build_state(&h)?, &bp)?;
        let v = json!({"bipartition": bp, "text": bp.to_string(), "alpha": spec.alpha(), "E": 1.0 - spec.alpha(),
                       "schmidt_coefficients": spec.coefficients, "rank": spec.rank});
        return match format {
            Format::Json => Ok(Outcome::pass(value_text(&v)?)),
            f => Err(unsupported(f)),
        };
    }
    let family = input.family.or_else(|| detect_family(&h));
    let mut value = match method {
        Method::Brute => {
            if h.n() > cli.cap_sweep {
                return Err(Error::CapExceeded { what: "bipartition sweep (--cap-sweep)", n: h.n(), cap: cli.cap_sweep });
            }
            let report = entanglement::alpha_multipartite(&build_state(&h)?, cli.cap_sweep)?;
            if format == Format::Csv {
                return Ok(Outcome::pass(entanglement_csv(&report)?));
            }
            serde_json::to_value(&report).unwrap()
        }
        Method::Procedure => serde_json::to_value(procedure_alpha(&h, cli.cap_sweep)?).unwrap(),
        Method::ClosedForm => {
            let f = family.ok_or_else(|| Error::Parameter("closed form needs one of the three families".into()))?;
            json!({"family": f, "n": h.n(), "alpha": scalar_json(entanglement::closed_form_alpha(f, h.n())?),
                   "E": scalar_json(entanglement::closed_form_e(f, h.n())?)})
        }
    };
    if format != Format::Json {
        return Err(unsupported(format));
    }
    let mut ok = true;
    if cross_check {
        let brute = entanglement::alpha_multipartite(&build_state(&h)?, cli.cap_sweep)?.alpha;
        let closed = family.map(|f| entanglement::closed_form_alpha(f, h.n())).transpose()?;
        let procedure = procedure_alpha(&h, cli.cap_sweep).ok().map(|r| r.alpha);
        let agree = |v: f64| (v - brute).abs() < entanglement::SPECTRAL_TOL;
        let matched = closed.is_none_or(|c| agree(c.to_f64())) && procedure.is_none_or(agree);
        ok = matched;
        value["cross_check"] = json!({
            "brute_force": brute,
            "closed_form": closed.map(scalar_json),
            "procedure": procedure,
            "match": matched,
        });
    }
    Ok(Outcome { text: value_text(&value)?, ok })
}

fn run_reduce(cli: &Cli, input: &Input, part_a: &Option<String>) -> Result<Outcome> {
    let h = input.resolve()?;
    if format_or(cli, Format::Json) != Format::Json {
        return Err(unsupported(cli.format.unwrap()));
    }
    match part_a {
        Some(p) => {
            let bp = Bipartition::new(h.n(), &parse_vertices(p)?)?;
            let cert = reduce(&h, &bp)?;
            let ok = cert.validated || !cert.oracle_checked;
            let mut v = serde_json::to_value(&cert).unwrap();
            v["bound_float"] = json!(cert.bound.to_f64());
            Ok(Outcome { text: value_text(&v)?, ok })
        }
        None => {
            let certs = reduce_all(&h)?;
            let ok = certs.iter().all(|c| c.validated || !c.oracle_checked);
            let lower = certified_lower_bound(&certs).map(Scalar::from);
            let v = json!({
                "hypergraph": h.to_string(),
                "certified_lower_bound": lower.map(scalar_json),
                "certificates": certs,
            });
            Ok(Outcome { text: value_text(&v)?, ok })
        }
    }
}

fn build_from(args: &WitnessArgs) -> Result<WitnessSpec> {
    let h = args.input.resolve()?;
    let alpha = resolve_alpha(&h, args.alpha_source.into())?;
    build_witness(args.kind.into(), &h, alpha)
}

fn witness_json(w: &WitnessSpec) -> Value {
    let (num, den) = match w.robustness {
        Scalar::Exact(r) => (json!(*r.numer() as i64), json!(*r.denom() as i64)),
        Scalar::Approx(_) => (Value::Null, Value::Null),
    };
    let mut v = json!({
        "kind": w.kind,
        "hypergraph": w.hypergraph.to_string(),
        "alpha": scalar_json(w.alpha),
        "robustness": scalar_json(w.robustness),
        "robustness_num": num,
        "robustness_den": den,
    });
    if let (Some(beta), Some(c)) = (w.beta, w.c) {
        v["beta"] = scalar_json(beta);
        v["C"] = scalar_json(c);
        let at = feasibility_check(&w.hypergraph, w.alpha, beta, c);
        let below = feasibility_check(&w.hypergraph, w.alpha, beta.sub(optimality_epsilon()), c);
        v["feasibility"] = json!({"feasible": at.feasible, "margins": at.margins, "feasible_below_optimum": below.feasible});
    }
    v
}

fn run_witness(cli: &Cli, cmd: &WitnessCmd) -> Result<Outcome> {
    match cmd {
        WitnessCmd::Build { args } => {
            let w = build_from(args)?;
            let v = witness_json(&w);
            let ok = v.get("feasibility").is_none_or(|f| f["feasible"] == json!(true));
            match format_or(cli, Format::Json) {
                Format::Json => Ok(Outcome { text: value_text(&v)?, ok }),
                f => Err(unsupported(f)),
            }
        }
        WitnessCmd::Eval { args, p } => {
            let w = build_from(args)?;
            let p = Scalar::Exact(parse_rational(p)?);
            let state = NoisyState::new(w.hypergraph.clone(), p)?;
            let e = expectation(&w, &state)?;
            let v = json!({
                "witness": witness_json(&w),
                "p": scalar_json(p),
                "expectation": scalar_json(e),
                "detected": e.is_negative(),
            });
            match format_or(cli, Format::Json) {
                Format::Json => Ok(Outcome::pass(value_text(&v)?)),
                f => Err(unsupported(f)),
            }
        }
        WitnessCmd::Table { family, n } => {
            let rows = robustness_table(*family, parse_range(n)?)?;
            match format_or(cli, Format::Csv) {
                Format::Csv => Ok(Outcome::pass(robustness_csv(&rows)?)),
                Format::Json => Ok(Outcome::pass(to_json(&json!({"family": family, "rows": rows}))?)),
                f => Err(unsupported(f)),
            }
        }
    }
}

fn run_settings(cli: &Cli, cmd: &SettingsCmd) -> Result<Outcome> {
    let (args, list) = match cmd {
        SettingsCmd::Count { args } => (args, false),
        SettingsCmd::List { args } => (args, true),
    };
    let report: SettingReport = match &args.product {
        Some(p) => product_settings(&args.witness.input.resolve()?, &parse_vertices(p)?, args.mode.into())?,
        None => witness_settings_capped(&build_from(&args.witness)?, args.mode.into(), cli.cap_symbolic)?,
    };
    match format_or(cli, Format::Json) {
        Format::Json if list => Ok(Outcome::pass(to_json(&report)?)),
        Format::Json => Ok(Outcome::pass(to_json(&json!({"mode": report.mode, "count": report.count}))?)),
        Format::Csv => Ok(Outcome::pass(settings_csv(&report)?)),
        Format::Text => Ok(Outcome::pass(format!("{}\n", report.count))),
    }
}

fn run_campaign(cli: &Cli, cmd: &CampaignCmd) -> Result<Outcome> {
    let CampaignCmd::LowerBound { seed, count, n_min, n_max, max_edge, extra_edges, certify_up_to } = cmd;
    let spec = RandomSpec { n_min: *n_min, n_max: *n_max, max_edge: *max_edge, extra_edges: *extra_edges };
    if *n_max > cli.cap_sweep {
        return Err(Error::CapExceeded { what: "bipartition sweep (--cap-sweep)", n: *n_max, cap: cli.cap_sweep });
    }
    let report = lower_bound_campaign(*seed, *count, &spec, cli.cap_sweep, *certify_up_to)?;
    let text = match format_or(cli, Format::Json) {
        Format::Json => to_json(&report)?,
        Format::Csv => campaign_csv(&report)?,
        f => return Err(unsupported(f)),
    };
    Ok(Outcome { text, ok: report.all_hold })
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::State(c) => run_state(cli, c),
        Command::Verify(c) => run_verify(cli, c),
        Command::Entanglement { input, method, cross_check, part_a } => run_entanglement(cli, input, *method, *cross_check, part_a),
        Command::Reduce { input, part_a } => run_reduce(cli, input, part_a),
        Command::Witness(c) => run_witness(cli, c),
        Command::Settings(c) => run_settings(cli, c),
        Command::Campaign(c) => run_campaign(cli, c),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::OracleMismatch(_) | Error::StepBudget(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let threads = cli.threads.or_else(|| std::env::var("HYPERWIT_THREADS").ok().and_then(|t| t.parse().ok()));
    if let Some(t) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot set thread count: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(outcome) => {
            match &cli.out {
                Some(path) => {
                    if let Err(e) = fs::write(path, &outcome.text) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{}", outcome.text),
            }
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("check failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
