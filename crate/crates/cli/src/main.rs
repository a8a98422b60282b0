//! `stripmap`: preimage domains, capacities, flows and parameter studies for
//! strips with slits, driven by a JSON problem file.
//!
//! Exit status: 0 on success, 1 for bad input or geometry, 2 when an
//! iteration does not converge.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use stripmap_core::elliptic::{exact_cap_horizontal, exact_cap_vertical};
use stripmap_core::flow::{stream_grid, Flow};
use stripmap_core::preimage::{iterate_observed, IterationRecord};
use stripmap_core::problem::{Numerics, ProblemFile};
use stripmap_core::study::{capacity_study, write_study_csv};
use stripmap_core::{capacity::capacity_on, Complex64, Error, IterationConfig, PreimageResult, SlitExtraction};

#[derive(Parser)]
#[command(name = "stripmap", version, about = "Conformal maps of strips with slits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the preimage domain and write its ellipses, history and boundary samples.
    Preimage(Common),
    /// Capacity of the condenser given by the slits and their levels.
    Capacity {
        #[command(flatten)]
        common: Common,
        /// Compare with a closed form: `vertical:s` for [−is, is], `horizontal:s` for [−s, s].
        #[arg(long, value_name = "KIND:S")]
        exact: Option<String>,
    },
    /// Sample the stream function of uniform flow on the problem's grid.
    Flow {
        #[command(flatten)]
        common: Common,
        /// Print streamline diagnostics and fail if they are not met.
        #[arg(long)]
        check: bool,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Closed-form capacity of a single centered slit.
    Exact {
        /// `vertical:s` or `horizontal:s`.
        #[arg(value_name = "KIND:S")]
        spec: String,
    },
    /// Run the parameter study described in the problem file.
    Study {
        #[command(flatten)]
        common: Common,
        /// Seed for random families.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Extraction {
    Nodes,
    Parabola,
    Newton,
}

#[derive(Args)]
struct Common {
    /// Problem file (JSON).
    #[arg(long, short)]
    input: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long, value_enum)]
    extraction: Option<Extraction>,
    /// Append one JSON line per outer iteration to this file.
    #[arg(long)]
    log: Option<PathBuf>,
    /// Print the resolved problem and numerical settings, then exit.
    #[arg(long)]
    emit_config: bool,
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self { code: if e.is_numerical() { 2 } else { 1 }, message: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self { code: 1, message: e.to_string() }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Preimage(c) => cmd_preimage(&c),
        Command::Capacity { common, exact } => cmd_capacity(&common, exact.as_deref()),
        Command::Flow { common, check, format } => cmd_flow(&common, check, format),
        Command::Exact { spec } => cmd_exact(&spec),
        Command::Study { common, seed, format } => cmd_study(&common, seed, format),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

impl Common {
    /// Reads the problem file and applies the command line overrides.
    fn problem(&self) -> Result<ProblemFile, Failure> {
        let mut p = match &self.input {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| input_error(format!("{}: {e}", path.display())))?;
                ProblemFile::parse(&text)?
            }
            None if self.emit_config => ProblemFile { slits: Vec::new(), delta: None, numerics: Numerics::default(), study: None, flow: None },
            None => return Err(input_error("--input is required")),
        };
        let num = &mut p.numerics;
        if let Some(n) = self.n {
            num.n = n;
        }
        if let Some(r) = self.r {
            num.r = r;
        }
        if let Some(eps) = self.eps {
            num.eps = eps;
        }
        if let Some(m) = self.max_iter {
            num.max_iter = m;
        }
        if let Some(e) = self.extraction {
            num.extraction = match e {
                Extraction::Nodes => SlitExtraction::Nodes,
                Extraction::Parabola => SlitExtraction::Parabola,
                Extraction::Newton => SlitExtraction::Newton,
            };
        }
        p.config().validate()?;
        Ok(p)
    }

    fn writer(&self) -> Result<Box<dyn Write>, Failure> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout())),
        })
    }

    fn emit_json(&self, value: &Value) -> Result<(), Failure> {
        let mut w = self.writer()?;
        serde_json::to_writer_pretty(&mut w, value).map_err(|e| input_error(e.to_string()))?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    /// Handles `--emit-config`; returns true when the command should stop.
    fn emitted(&self, p: &ProblemFile) -> Result<bool, Failure> {
        if !self.emit_config {
            return Ok(false);
        }
        let mut out = io::stdout();
        writeln!(out, "{}", p.to_json())?;
        Ok(true)
    }

    fn run_preimage(&self, p: &ProblemFile, cfg: &IterationConfig) -> Result<PreimageResult, Failure> {
        let domain = p.domain()?;
        let mut log = match &self.log {
            Some(path) => Some(BufWriter::new(File::create(path)?)),
            None => None,
        };
        let mut log_err = None;
        let pre = iterate_observed(&domain, cfg, None, |rec: &IterationRecord| {
            if let Some(w) = log.as_mut() {
                let line = serde_json::to_string(rec).expect("records serialize");
                if let Err(e) = writeln!(w, "{line}") {
                    log_err.get_or_insert(e);
                }
            }
        })?;
        if let Some(e) = log_err {
            return Err(e.into());
        }
        if let Some(mut w) = log {
            w.flush()?;
        }
        if let Some(reason) = &pre.aborted {
            eprintln!("iteration stopped: {reason}");
        }
        Ok(pre)
    }
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// `x` with 15 significant digits.
fn sig15(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let decimals = (14 - x.abs().log10().floor() as i32).max(0) as usize;
    format!("{x:.decimals$}")
}

fn history_json(pre: &PreimageResult) -> Value {
    json!({
        "converged": pre.converged,
        "iterations": pre.iterations(),
        "E_k": pre.error_history,
        "gmres_iterations": pre.gmres_history,
        "aborted": pre.aborted,
    })
}

fn convergence_code(pre: &PreimageResult) -> u8 {
    if pre.converged {
        0
    } else {
        eprintln!("preimage iteration did not reach eps after {} steps", pre.iterations());
        2
    }
}

#[derive(Serialize)]
struct BoundarySample {
    component: usize,
    index: usize,
    eta: [f64; 2],
    zeta: [f64; 2],
}

fn cmd_preimage(c: &Common) -> Outcome {
    let p = c.problem()?;
    if c.emitted(&p)? {
        return Ok(0);
    }
    let cfg = p.config();
    let pre = c.run_preimage(&p, &cfg)?;
    let md = &pre.map;
    let ellipses: Vec<Value> = pre
        .params
        .iter()
        .map(|e| json!({"center": pair(e.center), "major": e.major, "theta": e.theta, "r": e.r}))
        .collect();
    let boundary: Vec<BoundarySample> = (0..md.bp.total())
        .map(|i| BoundarySample {
            component: md.bp.component_of(i),
            index: i % md.n(),
            eta: pair(md.bp.eta[i]),
            zeta: pair(md.zeta[i]),
        })
        .collect();
    c.emit_json(&json!({
        "numerics": Numerics::from(cfg),
        "history": history_json(&pre),
        "ellipses": ellipses,
        "alpha": pair(md.alpha),
        "slit_images": md.slit_images().map_err(Failure::from)?.iter().map(|s| json!({"center": pair(s.center), "length": s.length, "theta": s.theta})).collect::<Vec<_>>(),
        "boundary": boundary,
    }))?;
    Ok(convergence_code(&pre))
}

/// Parses `vertical:s` or `horizontal:s` into the closed-form capacity.
fn exact_value(spec: &str) -> Result<(String, f64, f64), Failure> {
    let (kind, s) = spec.split_once(':').ok_or_else(|| input_error(format!("expected KIND:S, got {spec}")))?;
    let s: f64 = s.trim().parse().map_err(|_| input_error(format!("bad number in {spec}")))?;
    let value = match kind.trim() {
        "vertical" => exact_cap_vertical(s)?,
        "horizontal" => exact_cap_horizontal(s)?,
        other => return Err(input_error(format!("unknown slit kind {other}"))),
    };
    Ok((kind.trim().to_string(), s, value))
}

fn cmd_capacity(c: &Common, exact: Option<&str>) -> Outcome {
    let p = c.problem()?;
    let reference = exact.map(exact_value).transpose()?;
    if c.emitted(&p)? {
        return Ok(0);
    }
    let cfg = p.config();
    let defaulted = p.delta.is_none();
    if defaulted {
        eprintln!("no delta given: all {} plates at level 1", p.slits.len());
    }
    let delta = p.levels();
    let pre = c.run_preimage(&p, &cfg)?;
    let code = convergence_code(&pre);
    let res = capacity_on(pre, &delta, &cfg)?;
    eprintln!("cap = {}", sig15(res.cap));
    let mut out = json!({
        "cap": res.cap,
        "cap_15": sig15(res.cap),
        "delta": delta,
        "delta_defaulted": defaulted,
        "charges": res.a,
        "numerics": Numerics::from(cfg),
        "history": history_json(&res.preimage),
    });
    if let Some((kind, s, value)) = reference {
        let rel = (res.cap - value).abs() / value;
        eprintln!("exact = {}  relative error = {rel:.3e}", sig15(value));
        out["exact"] = json!({"kind": kind, "s": s, "value": value, "relative_error": rel});
    }
    c.emit_json(&out)?;
    Ok(code)
}

fn cmd_flow(c: &Common, check: bool, format: Format) -> Outcome {
    let p = c.problem()?;
    if c.emitted(&p)? {
        return Ok(0);
    }
    let spec = p.flow.ok_or_else(|| input_error("the problem file has no \"flow\" grid"))?;
    spec.grid().validate()?;
    let cfg = p.config();
    let (flow, code) = if p.slits.is_empty() {
        (Flow::without_slits(cfg.n, &cfg)?, 0)
    } else {
        let pre = c.run_preimage(&p, &cfg)?;
        (Flow::new(&pre, &cfg)?, convergence_code(&pre))
    };
    let field = stream_grid(&flow, &spec.grid(), spec.exclusion)?;
    match format {
        Format::Csv => {
            let mut w = c.writer()?;
            field.write_csv(&mut w)?;
            w.flush()?;
        }
        Format::Json => c.emit_json(&serde_json::to_value(&field).map_err(|e| input_error(e.to_string()))?)?,
    }
    if check {
        let slit = flow.slit_level_spread();
        let wall = flow.wall_deviation();
        let ok = slit <= 1e-8 && wall <= 1e-8 && field.failed == 0;
        eprintln!("slit constancy  {slit:.3e}  (<= 1e-8)");
        eprintln!("wall deviation  {wall:.3e}  (<= 1e-8)");
        eprintln!("failed points   {}", field.failed);
        eprintln!("masked points   {} of {}", field.masked(), field.psi.len());
        eprintln!("check {}", if ok { "passed" } else { "FAILED" });
        if !ok {
            return Ok(2);
        }
    }
    Ok(code)
}

fn cmd_exact(spec: &str) -> Outcome {
    let (kind, s, value) = exact_value(spec)?;
    println!("{}", serde_json::to_string_pretty(&json!({"kind": kind, "s": s, "cap": value, "cap_15": sig15(value)})).expect("json"));
    Ok(0)
}

fn cmd_study(c: &Common, seed: u64, format: Format) -> Outcome {
    let p = c.problem()?;
    if c.emitted(&p)? {
        return Ok(0);
    }
    let family = p.study.as_ref().ok_or_else(|| input_error("the problem file has no \"study\""))?;
    let rows = capacity_study(family, p.delta.as_deref(), &p.config(), seed, |row| {
        match (&row.cap, &row.error) {
            (Some(cap), _) => eprintln!("{}: {}", row.param, sig15(*cap)),
            (None, Some(e)) => eprintln!("{}: {e}", row.param),
            _ => {}
        }
    })?;
    match format {
        Format::Csv => {
            let mut w = c.writer()?;
            write_study_csv(&rows, &mut w)?;
            w.flush()?;
        }
        Format::Json => c.emit_json(&json!({"seed": seed, "rows": rows}))?,
    }
    Ok(if rows.iter().all(|r| r.error.is_none() && r.converged) { 0 } else { 2 })
}
