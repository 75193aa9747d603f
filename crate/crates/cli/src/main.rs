mod spec;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use nu_chord::delay_example::closed_form_distance;
use nu_chord::{
    certify_with_nominal, coprime_factorize, d_cr_factored, kappa, margin, margin_via_norm, selftest, AlgebraInstance,
    BoundaryPoint, CoprimeFactorization, Domain, GridBudget, InstanceKind, SampledCurve, Tolerances,
};

use spec::{instance_name, parse_instance, BuildError, PlantFile};

/// Worked-example specs shipped with the binary, addressable as `@name`.
const BUNDLED: &[(&str, &str)] = &[
    ("p1", include_str!("../specs/p1.json")),
    ("pa_template", include_str!("../specs/pa_template.json")),
    ("p_a1.2", include_str!("../specs/p_a1.2.json")),
    ("p_a0.5", include_str!("../specs/p_a0.5.json")),
    ("controller", include_str!("../specs/controller.json")),
    ("zero", include_str!("../specs/zero.json")),
    (
        "unstable_first_order",
        include_str!("../specs/unstable_first_order.json"),
    ),
];

const EXIT_SELFTEST: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_FACTORIZATION: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "nu-chord",
    version,
    about = "Chordal distance, stability margins and robustness certificates"
)]
struct Cli {
    /// Override the algebra instance of every spec file
    #[arg(long, global = true)]
    instance: Option<String>,
    /// Target tolerance for boundary sup/inf searches
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Largest number of grid points per boundary scan (rounded down to a power of two)
    #[arg(long, global = true)]
    max_grid: Option<usize>,
    /// Emit a JSON record instead of text
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Distance between two plants
    Metric {
        p1: String,
        p2: String,
        /// Write (theta, omega, kappa) samples to this file
        #[arg(long)]
        kappa_csv: Option<PathBuf>,
    },
    /// Stability margin of a plant/controller pair
    Margin { plant: String, controller: String },
    /// Robust-stabilization certificate for `plant` near `nominal`
    Certify {
        nominal: String,
        controller: String,
        plant: String,
        /// Also compute the margin of the perturbed loop
        #[arg(long)]
        direct_mu: bool,
    },
    /// Certify a one-parameter family instantiated from a template
    Sweep {
        nominal: String,
        controller: String,
        /// a0:a1:step
        #[arg(long)]
        param_range: String,
        #[arg(long)]
        template: String,
        /// Use this lower bound on the nominal margin instead of computing it
        #[arg(long)]
        mu_bound: Option<f64>,
    },
    /// Run the built-in invariant suite
    Selftest {
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
    },
    /// Reproduce the delay-plant example from the bundled specs
    Example,
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Core(nu_chord::Error),
}

impl From<BuildError> for CliError {
    fn from(e: BuildError) -> Self {
        match e {
            BuildError::Spec(msg) => CliError::Input(msg),
            BuildError::Core(e) => CliError::Core(e),
        }
    }
}

impl From<nu_chord::Error> for CliError {
    fn from(e: nu_chord::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use nu_chord::Error::*;
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Core(e) => match e {
                InvalidElement(_) | InvalidInstance(_) | InvalidCurve(_) | DomainMismatch | GridMismatch
                | VariantMismatch => EXIT_INPUT,
                NotCoprime(_)
                | SolveFailed(_)
                | DegenerateDenominator { .. }
                | MissingWitness
                | NotAUnit
                | SpectralFactorizationFailed(_)
                | NotNormalized(_) => EXIT_FACTORIZATION,
                _ => EXIT_NUMERICAL,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

struct Loaded {
    arg: String,
    text: String,
    file: PlantFile,
}

fn load(arg: &str) -> CliResult<Loaded> {
    let text = match arg.strip_prefix('@') {
        Some(name) => BUNDLED
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, t)| t.to_string())
            .ok_or_else(|| CliError::Input(format!("no bundled spec named {name:?}")))?,
        None => std::fs::read_to_string(arg).map_err(|e| CliError::Input(format!("{arg}: {e}")))?,
    };
    let file = PlantFile::parse(&text).map_err(|e| CliError::Input(format!("{arg}: {e}")))?;
    Ok(Loaded {
        arg: arg.to_string(),
        text,
        file,
    })
}

/// Settings shared by every command.
struct Context {
    instance_override: Option<InstanceKind>,
    tol: f64,
    max_grid: Option<usize>,
}

impl Context {
    fn from_cli(cli: &Cli) -> CliResult<Self> {
        let instance_override = cli
            .instance
            .as_deref()
            .map(parse_instance)
            .transpose()
            .map_err(CliError::Input)?;
        if !(cli.tol.is_finite() && cli.tol > 0.0) {
            return Err(CliError::Input("--tol must be a positive number".into()));
        }
        Ok(Context {
            instance_override,
            tol: cli.tol,
            max_grid: cli.max_grid,
        })
    }

    fn flags(&self) -> String {
        format!(
            "instance={:?};tol={:e};max_grid={:?}",
            self.instance_override.map(instance_name),
            self.tol,
            self.max_grid
        )
    }

    fn instance(&self, files: &[&Loaded]) -> CliResult<AlgebraInstance> {
        let kind = match self.instance_override {
            Some(k) => k,
            None => {
                let kinds = files
                    .iter()
                    .map(|l| l.file.kind().map_err(|e| CliError::Input(format!("{}: {e}", l.arg))))
                    .collect::<CliResult<Vec<_>>>()?;
                if kinds.windows(2).any(|w| w[0] != w[1]) {
                    return Err(CliError::Input(format!(
                        "spec files use different instances: {}",
                        kinds.iter().map(|k| instance_name(*k)).collect::<Vec<_>>().join(", ")
                    )));
                }
                kinds[0]
            }
        };
        let mut grid = GridBudget::default();
        if let Some(n) = self.max_grid {
            if n < 16 {
                return Err(CliError::Input("--max-grid must be at least 16".into()));
            }
            grid.max_log2 = n.ilog2().min(26);
            grid.initial_log2 = grid.initial_log2.min(grid.max_log2);
        }
        let tolerances = Tolerances {
            sup_tol: self.tol,
            ..Tolerances::default()
        };
        Ok(AlgebraInstance::new(kind)
            .with_tolerances(tolerances)?
            .with_grid(grid)?)
    }
}

fn factorize(l: &Loaded, instance: &AlgebraInstance, param: Option<f64>) -> CliResult<CoprimeFactorization> {
    let p = l.file.fraction(instance, param)?;
    Ok(coprime_factorize(&p, instance)?)
}

fn digest(command: &str, inputs: &[&Loaded], extra: &str, ctx: &Context) -> String {
    let mut h = Sha256::new();
    h.update(command.as_bytes());
    for l in inputs {
        h.update([0u8]);
        h.update(l.text.as_bytes());
    }
    h.update([0u8]);
    h.update(extra.as_bytes());
    h.update([0u8]);
    h.update(ctx.flags().as_bytes());
    hex::encode(h.finalize())
}

#[derive(Serialize)]
struct Record {
    command: String,
    inputs_digest: String,
    instance: &'static str,
    requested_tol: f64,
    max_grid_points: usize,
    result: Value,
    wall_time_ms: u64,
}

struct Outcome {
    command: &'static str,
    digest: String,
    instance: AlgebraInstance,
    result: Value,
    /// Text emitted instead of the key/value listing in text mode.
    text: Option<String>,
}

fn cmd_metric(ctx: &Context, p1: &str, p2: &str, kappa_csv: Option<&Path>) -> CliResult<Outcome> {
    let (a, b) = (load(p1)?, load(p2)?);
    let instance = ctx.instance(&[&a, &b])?;
    let cf1 = factorize(&a, &instance, None)?;
    let cf2 = factorize(&b, &instance, None)?;
    let r = d_cr_factored(&cf1, &cf2)?;
    if let Some(path) = kappa_csv {
        write_kappa_csv(path, &cf1, &cf2, &instance)?;
    }
    let result = json!({
        "d_cr": r.value,
        "branch": r.branch,
        "condition": r.condition,
        "grid_points": r.grid_report.grid_points,
        "achieved_tol": r.grid_report.achieved_tol,
        "window": r.grid_report.window,
        "branch_ambiguous": r.grid_report.branch_ambiguous,
        "witness": r.witness,
    });
    Ok(Outcome {
        command: "metric",
        digest: digest("metric", &[&a, &b], "", ctx),
        instance,
        result,
        text: None,
    })
}

fn write_kappa_csv(
    path: &Path,
    cf1: &CoprimeFactorization,
    cf2: &CoprimeFactorization,
    instance: &AlgebraInstance,
) -> CliResult<()> {
    let grid = SampledCurve::uniform_grid(1 << instance.grid.initial_log2);
    let curve = kappa(cf1, cf2, &grid)?;
    let io = |e: csv::Error| CliError::Input(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(["theta", "omega", "kappa"]).map_err(io)?;
    for (theta, k) in curve.thetas().iter().zip(curve.values()) {
        let omega = match instance.domain() {
            Domain::HalfPlane => BoundaryPoint::wrap(*theta)
                .omega()
                .map(|o| o.to_string())
                .unwrap_or_default(),
            Domain::Circle => String::new(),
        };
        w.write_record([theta.to_string(), omega, k.re.to_string()])
            .map_err(io)?;
    }
    w.flush()
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn cmd_margin(ctx: &Context, p: &str, c: &str) -> CliResult<Outcome> {
    let (a, b) = (load(p)?, load(c)?);
    let instance = ctx.instance(&[&a, &b])?;
    let cfp = factorize(&a, &instance, None)?;
    let cfc = factorize(&b, &instance, None)?;
    let m = margin(&cfp, &cfc)?;
    let via_norm = if m.stabilizes {
        Some(margin_via_norm(&cfp, &cfc)?)
    } else {
        None
    };
    let result = json!({
        "mu": m.value,
        "mu_inverse": if m.value > 0.0 { Some(1.0 / m.value) } else { None },
        "stabilizes": m.stabilizes,
        "mu_via_norm": via_norm.as_ref().map(|v| v.value),
        "formula_delta": via_norm.as_ref().map(|v| (v.value - m.value).abs()),
        "grid_points": m.grid_points,
        "achieved_tol": m.achieved_tol,
        "via_norm_achieved_tol": via_norm.as_ref().map(|v| v.achieved_tol),
        "window": m.window,
    });
    Ok(Outcome {
        command: "margin",
        digest: digest("margin", &[&a, &b], "", ctx),
        instance,
        result,
        text: None,
    })
}

fn cmd_certify(ctx: &Context, p0: &str, c: &str, p: &str, direct_mu: bool) -> CliResult<Outcome> {
    let (l0, lc, lp) = (load(p0)?, load(c)?, load(p)?);
    let instance = ctx.instance(&[&l0, &lc, &lp])?;
    let cf0 = factorize(&l0, &instance, None)?;
    let cfc = factorize(&lc, &instance, None)?;
    let cfp = factorize(&lp, &instance, None)?;
    let nominal = margin(&cf0, &cfc)?;
    let cert = certify_with_nominal(nominal.value, &cfc, &cfp, &cf0, direct_mu)?;
    let result = json!({
        "certificate": cert,
        "mu_nominal_grid_points": nominal.grid_points,
        "mu_nominal_achieved_tol": nominal.achieved_tol,
    });
    Ok(Outcome {
        command: "certify",
        digest: digest("certify", &[&l0, &lc, &lp], &format!("direct_mu={direct_mu}"), ctx),
        instance,
        result,
        text: None,
    })
}

fn parse_range(text: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::Input(format!("--param-range expects a0:a1:step, got {text:?}"));
    let parts: Vec<f64> = text
        .split(':')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    let [a0, a1, step] = parts[..] else { return Err(bad()) };
    if !(a0.is_finite() && a1.is_finite() && step.is_finite() && step > 0.0 && a1 >= a0) {
        return Err(bad());
    }
    let count = ((a1 - a0) / step + 1e-9).floor() as usize + 1;
    if count > 100_000 {
        return Err(CliError::Input("--param-range has more than 100000 points".into()));
    }
    // round away accumulated binary noise so 0.7 + 2 * 0.05 prints as 0.8
    Ok((0..count)
        .map(|k| ((a0 + k as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

#[derive(Serialize)]
struct SweepRow {
    a: f64,
    d_cr: f64,
    closed_form: f64,
    mu_lower_bound: f64,
    certified: bool,
    achieved_tol: f64,
}

fn cmd_sweep(
    ctx: &Context,
    nominal: &str,
    controller: &str,
    range: &str,
    template: &str,
    mu_bound: Option<f64>,
) -> CliResult<Outcome> {
    use rayon::prelude::*;

    let params = parse_range(range)?;
    let (l0, lc, lt) = (load(nominal)?, load(controller)?, load(template)?);
    let instance = ctx.instance(&[&l0, &lc, &lt])?;
    let cf0 = factorize(&l0, &instance, None)?;
    let cfc = factorize(&lc, &instance, None)?;
    if let Some(b) = mu_bound {
        if !(b.is_finite() && b > 0.0) {
            return Err(CliError::Input("--mu-bound must be a positive number".into()));
        }
    }
    let mu = margin(&cf0, &cfc)?;
    let mu_used = mu_bound.unwrap_or(mu.value);
    let rows = params
        .par_iter()
        .map(|&a| {
            let cfp = factorize(&lt, &instance, Some(a))?;
            let dist = d_cr_factored(&cfp, &cf0)?;
            let lower = mu_used - dist.value;
            Ok(SweepRow {
                a,
                d_cr: dist.value,
                closed_form: closed_form_distance(a),
                mu_lower_bound: lower,
                certified: lower > 0.0,
                achieved_tol: dist.grid_report.achieved_tol.max(mu.achieved_tol),
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &rows {
        w.serialize(row).map_err(|e| CliError::Input(e.to_string()))?;
    }
    let csv =
        String::from_utf8(w.into_inner().map_err(|e| CliError::Input(e.to_string()))?).expect("csv output is utf-8");
    let result = json!({
        "mu_nominal": mu.value,
        "mu_nominal_achieved_tol": mu.achieved_tol,
        "mu_used": mu_used,
        "rows": rows,
    });
    Ok(Outcome {
        command: "sweep",
        digest: digest(
            "sweep",
            &[&l0, &lc, &lt],
            &format!("{range};mu_bound={mu_bound:?}"),
            ctx,
        ),
        instance,
        result,
        text: Some(csv),
    })
}

fn cmd_example(ctx: &Context) -> CliResult<Vec<Outcome>> {
    Ok(vec![
        cmd_metric(ctx, "@p1", "@p_a1.2", None)?,
        cmd_margin(ctx, "@p1", "@controller")?,
        cmd_certify(ctx, "@p1", "@controller", "@p_a1.2", true)?,
        cmd_certify(ctx, "@p1", "@controller", "@p_a0.5", false)?,
        cmd_sweep(ctx, "@p1", "@controller", "0.7:1.45:0.05", "@pa_template", None)?,
    ])
}

fn render_text(result: &Value) -> String {
    let mut out = String::new();
    if let Value::Object(map) = result {
        for (k, v) in map {
            out.push_str(&format!("{k}: {v}\n"));
        }
    }
    out
}

fn emit(outcome: &Outcome, json_mode: bool, max_grid: usize, elapsed_ms: u64) {
    if json_mode {
        let record = Record {
            command: outcome.command.to_string(),
            inputs_digest: outcome.digest.clone(),
            instance: instance_name(outcome.instance.kind),
            requested_tol: outcome.instance.tolerances.sup_tol,
            max_grid_points: max_grid,
            result: outcome.result.clone(),
            wall_time_ms: elapsed_ms,
        };
        println!("{}", serde_json::to_string_pretty(&record).expect("record serializes"));
    } else {
        match &outcome.text {
            Some(t) => print!("{t}"),
            None => print!("{}", render_text(&outcome.result)),
        }
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("NU_CHORD_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Input(format!("NU_CHORD_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Input(e.to_string()))
}

fn run_selftest(seed: u64, json_mode: bool) -> ExitCode {
    let outcomes = selftest::run(seed);
    let ok = outcomes.iter().all(|o| o.passed);
    if json_mode {
        let v = json!({"command": "selftest", "seed": seed, "passed": ok, "checks": outcomes});
        println!("{}", serde_json::to_string_pretty(&v).expect("record serializes"));
    } else {
        for o in &outcomes {
            println!(
                "{:<24} {}  {}",
                o.name,
                if o.passed { "PASS" } else { "FAIL" },
                o.detail
            );
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_SELFTEST)
    }
}

fn run(cli: &Cli) -> CliResult<ExitCode> {
    configure_threads()?;
    let ctx = Context::from_cli(cli)?;
    let start = Instant::now();
    let outcomes = match &cli.command {
        Command::Selftest { seed } => return Ok(run_selftest(*seed, cli.json)),
        Command::Metric { p1, p2, kappa_csv } => vec![cmd_metric(&ctx, p1, p2, kappa_csv.as_deref())?],
        Command::Margin { plant, controller } => vec![cmd_margin(&ctx, plant, controller)?],
        Command::Certify {
            nominal,
            controller,
            plant,
            direct_mu,
        } => vec![cmd_certify(&ctx, nominal, controller, plant, *direct_mu)?],
        Command::Sweep {
            nominal,
            controller,
            param_range,
            template,
            mu_bound,
        } => vec![cmd_sweep(&ctx, nominal, controller, param_range, template, *mu_bound)?],
        Command::Example => cmd_example(&ctx)?,
    };
    let elapsed = start.elapsed().as_millis() as u64;
    let several = outcomes.len() > 1;
    for o in &outcomes {
        if several && !cli.json {
            println!("== {}", o.command);
        }
        emit(o, cli.json, 1 << o.instance.grid.max_log2, elapsed);
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
