//! Command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use hardyheat_core::forms::{bump_suite, dirichlet_form, gsr_terms, potential_term, semigroup_form_with, FormValue, TestFunction};
use hardyheat_core::kernels::GaussianConstants;
use hardyheat_core::{EvalPoint, EvalResult, Method, PerturbedKernel, SeriesControl};

use crate::cache::Cache;
use crate::certify::run_suite;
use crate::config::{read_json, Coupling, Format, MethodArg, RatioArg, RunConfig};
use crate::error::{usage, Error, Result};
use crate::report::{overall, Status};
use crate::store::KernelStore;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_EVAL: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "hardyheat", version, about = "Radial fractional heat kernels with Hardy potentials: evaluation and certification")]
pub struct Cli {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a kernel at one point.
    Eval(Flags),
    /// Evaluate a kernel over the (t, r, s) grid and write a CSV table.
    Sweep(Flags),
    /// Run a check suite and write the JSON reports.
    Certify(Flags),
    /// Evaluate the quadratic forms on the test-function suite.
    Forms(Flags),
    /// Inspect or clear the evaluation cache.
    Cache {
        #[command(subcommand)]
        op: CacheOp,
        #[arg(long, global = true)]
        cache: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum CacheOp {
    Stats,
    Clear,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    #[arg(long, allow_negative_numbers = true)]
    pub zeta: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub eta: Option<f64>,
    /// Space dimension (channel form, with --ell and --kappa).
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long)]
    pub ell: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// Grid specification: a JSON file or inline JSON.
    #[arg(long)]
    pub grid: Option<String>,
    /// Accuracy budget: a JSON file or inline JSON.
    #[arg(long)]
    pub budget: Option<String>,
    #[arg(long)]
    pub suite: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub cache: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Fill the ratio column of a sweep with value/envelope.
    #[arg(long, value_enum)]
    pub ratio: Option<RatioArg>,
}

impl Flags {
    fn into_config(self) -> Result<RunConfig> {
        Ok(RunConfig {
            zeta: self.zeta,
            alpha: self.alpha,
            eta: self.eta,
            d: self.d,
            ell: self.ell,
            kappa: self.kappa,
            t: self.t,
            r: self.r,
            s: self.s,
            method: self.method,
            grid: self.grid.as_deref().map(read_json).transpose()?,
            budget: self.budget.as_deref().map(read_json).transpose()?,
            suite: self.suite,
            out: self.out,
            cache: self.cache,
            format: self.format,
            seed: self.seed,
            ratio: self.ratio,
        })
    }
}

/// Parses the arguments and runs the command; returns the exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    match run(cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    let file = cli.config.as_deref().map(RunConfig::load).transpose()?.unwrap_or_default();
    match cli.command {
        Command::Cache { op, cache } => {
            let config = file.merge(RunConfig {
                cache,
                ..Default::default()
            });
            cache_op(op, &config, out)
        }
        Command::Eval(f) => eval(&file.merge(f.into_config()?), out),
        Command::Sweep(f) => sweep(&file.merge(f.into_config()?), out),
        Command::Certify(f) => certify(&file.merge(f.into_config()?), out),
        Command::Forms(f) => forms(&file.merge(f.into_config()?), out),
    }
}

fn store(config: &RunConfig) -> Result<KernelStore> {
    let cache = config.cache.as_deref().map(Cache::open).transpose()?;
    Ok(KernelStore::new(cache, config.budget()?, SeriesControl::default()))
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |e| Error::io(path, e)
}

/// Writes to --out when given, else to `out`.
fn emit(config: &RunConfig, bytes: &[u8], out: &mut dyn Write) -> Result<()> {
    match &config.out {
        Some(path) => std::fs::write(path, bytes).map_err(io_err(path)),
        None => out.write_all(bytes).map_err(io_err(Path::new("<stdout>"))),
    }
}

fn free_method(m: MethodArg, alpha: f64) -> Result<Option<Method>> {
    Ok(match m {
        MethodArg::Auto => None,
        MethodArg::Closed if alpha == 2.0 => Some(Method::ClosedAlpha2),
        MethodArg::Closed if alpha == 1.0 => Some(Method::ClosedAlpha1),
        MethodArg::Closed => return Err(usage!("closed forms exist for alpha = 1 and alpha = 2 only, got alpha = {alpha}")),
        MethodArg::Subordination => Some(Method::Subordination),
        MethodArg::Spectral => Some(Method::Spectral),
        MethodArg::Series => return Err(usage!("--method series applies to the perturbed kernel (eta != 0)")),
    })
}

/// The forced free-kernel method, or a usage error when `m` does not apply.
fn resolve_method(c: Coupling, m: MethodArg) -> Result<Option<Method>> {
    if c.eta == 0.0 {
        return free_method(m, c.alpha);
    }
    match m {
        MethodArg::Auto | MethodArg::Series => Ok(None),
        MethodArg::Closed if c.alpha == 2.0 => Ok(None),
        other => {
            let name = other.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
            Err(usage!("--method {name} is not available for the perturbed kernel; use auto or series"))
        }
    }
}

fn point_value(store: &mut KernelStore, c: Coupling, p: EvalPoint, method: Option<Method>) -> Result<EvalResult> {
    if c.eta == 0.0 {
        store.free_point(c.zeta, c.alpha, p, method)
    } else {
        store.perturbed_point(c.params()?, p)
    }
}

fn eval(config: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let c = config.coupling()?;
    let p = config.point()?;
    let mut store = store(config)?;
    let method = resolve_method(c, config.method.unwrap_or(MethodArg::Auto))?;
    let r = point_value(&mut store, c, p, method)?;
    let text = match config.format() {
        Format::Json => {
            let v = json!({"zeta": c.zeta, "alpha": c.alpha, "eta": c.eta, "t": p.t, "r": p.r, "s": p.s,
                           "value": r.value, "err_est": r.err_est, "method": r.method});
            format!("{}\n", serde_json::to_string_pretty(&v)?)
        }
        Format::Csv => format!("value,err_est,method\n{:?},{:?},{}\n", r.value, r.err_est, r.method),
    };
    emit(config, text.as_bytes(), out)?;
    Ok(EXIT_PASS)
}

#[derive(Debug, Serialize)]
pub struct SweepRow {
    pub check: &'static str,
    pub zeta: f64,
    pub alpha: f64,
    pub eta: f64,
    pub t: f64,
    pub r: f64,
    pub s: f64,
    pub value: Option<f64>,
    pub envelope: Option<f64>,
    pub ratio: Option<f64>,
    pub method: Option<String>,
    pub err_est: Option<f64>,
    pub error: Option<String>,
}

fn sweep(config: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let c = config.coupling()?;
    let grid = config.grid();
    grid.rs.validate()?;
    let method = resolve_method(c, config.method.unwrap_or(MethodArg::Auto))?;
    let with_ratio = config.ratio == Some(RatioArg::Envelope);
    let mut store = store(config)?;
    let free = store.free(c.zeta, c.alpha)?;
    let perturbed = if c.eta == 0.0 { None } else { Some(store.perturbed(c.params()?)?) };
    let xs = grid.rs.values();
    let mut rows = Vec::new();
    let mut clean = true;
    for &t in &grid.t_values {
        for &r in &xs {
            for &s in &xs {
                let mut row = SweepRow {
                    check: "sweep",
                    zeta: c.zeta,
                    alpha: c.alpha,
                    eta: c.eta,
                    t,
                    r,
                    s,
                    value: None,
                    envelope: None,
                    ratio: None,
                    method: None,
                    err_est: None,
                    error: None,
                };
                let res = EvalPoint::new(t, r, s).map_err(Error::from).and_then(|p| {
                    let v = point_value(&mut store, c, p, method)?;
                    let env = match &perturbed {
                        Some(k) => k.envelope(p)?,
                        None => free.envelope(p, GaussianConstants::default())?,
                    };
                    Ok((v, env.lower))
                });
                match res {
                    Ok((v, env)) => {
                        row.value = Some(v.value);
                        row.err_est = Some(v.err_est);
                        row.method = Some(v.method.to_string());
                        row.envelope = Some(env);
                        if with_ratio {
                            row.ratio = Some(v.value / env);
                        }
                    }
                    Err(e) => {
                        clean = false;
                        row.error = Some(e.to_string());
                    }
                }
                rows.push(row);
            }
        }
    }
    let bytes = match config.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in &rows {
                w.serialize(row).map_err(|e| usage!("csv: {e}"))?;
            }
            w.into_inner().map_err(|e| usage!("csv: {e}"))?
        }
        Format::Json => {
            let mut v = serde_json::to_vec_pretty(&rows)?;
            v.push(b'\n');
            v
        }
    };
    emit(config, &bytes, out)?;
    Ok(if clean { EXIT_PASS } else { EXIT_EVAL })
}

/// `<out>.timing.json`: wall times are kept out of the reports so that the
/// reports themselves are reproducible byte for byte.
pub fn timing_path(out: &Path) -> PathBuf {
    let mut p = out.as_os_str().to_owned();
    p.push(".timing.json");
    PathBuf::from(p)
}

fn certify(config: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    if config.format() == Format::Csv {
        return Err(usage!("certify writes JSON reports; use sweep for CSV tables"));
    }
    let suite = config.suite.as_deref().unwrap_or("all");
    let grid = config.grid();
    let mut store = store(config)?;
    let started = Instant::now();
    let reports = run_suite(suite, &grid, &mut store)?;
    let total = started.elapsed().as_secs_f64();
    let mut bytes = serde_json::to_vec_pretty(&reports)?;
    bytes.push(b'\n');
    emit(config, &bytes, out)?;
    if let Some(path) = &config.out {
        let timing = json!({
            "suite": suite,
            "total_seconds": total,
            "checks": reports.iter().map(|r| json!({"check_name": r.check_name, "params": r.params, "runtime_seconds": r.runtime_seconds})).collect::<Vec<_>>(),
        });
        let tp = timing_path(path);
        std::fs::write(&tp, serde_json::to_vec_pretty(&timing)?).map_err(io_err(&tp))?;
    }
    for r in &reports {
        log::info!("{} {} {:?}", r.check_name, r.params, r.status);
    }
    Ok(match overall(&reports) {
        Status::Pass => EXIT_PASS,
        Status::Fail => EXIT_FAIL,
        Status::Warn => EXIT_EVAL,
    })
}

#[derive(Debug, Serialize)]
struct FormRow {
    test_function: TestFunction,
    dirichlet: FormValue,
    potential: FormValue,
    #[serde(skip_serializing_if = "Option::is_none")]
    hardy: Option<FormValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gsr_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    semigroup: Option<FormValue>,
}

fn forms(config: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let c = config.coupling()?;
    if config.format() == Format::Csv {
        return Err(usage!("forms writes JSON"));
    }
    let kernel = match config.t {
        None => None,
        Some(_) if c.eta == 0.0 => Some(Arc::new(PerturbedKernel::new(hardyheat_core::CouplingParams::free(c.zeta, c.alpha)?, SeriesControl::default())?)),
        Some(_) => Some(store(config)?.perturbed(c.params()?)?),
    };
    let mut rows = Vec::new();
    for u in bump_suite() {
        let (dirichlet, potential, hardy, gsr_residual) = if c.eta == 0.0 {
            (dirichlet_form(c.zeta, c.alpha, &u)?, potential_term(c.zeta, c.alpha, &u)?, None, None)
        } else {
            let g = gsr_terms(c.params()?, &u)?;
            (g.dirichlet, g.potential, Some(g.hardy), Some(g.residual))
        };
        let semigroup = match (&kernel, config.t) {
            (Some(k), Some(t)) => Some(semigroup_form_with(k, t, &u)?),
            _ => None,
        };
        rows.push(FormRow {
            test_function: u,
            dirichlet,
            potential,
            hardy,
            gsr_residual,
            semigroup,
        });
    }
    let mut bytes = serde_json::to_vec_pretty(&json!({"zeta": c.zeta, "alpha": c.alpha, "eta": c.eta, "forms": rows}))?;
    bytes.push(b'\n');
    emit(config, &bytes, out)?;
    Ok(EXIT_PASS)
}

fn cache_op(op: CacheOp, config: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let path = config.cache.as_deref().ok_or_else(|| usage!("--cache <path> is required"))?;
    match op {
        CacheOp::Stats => {
            let c = Cache::open(path)?;
            let mut bytes = serde_json::to_vec_pretty(&c.stats())?;
            bytes.push(b'\n');
            out.write_all(&bytes).map_err(io_err(Path::new("<stdout>")))?;
        }
        CacheOp::Clear => Cache::clear(path)?,
    }
    Ok(EXIT_PASS)
}
