//! `mcc`: verification suites, dimension tables, box tensor products and
//! window arithmetic from the command line.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use mcc_tensor::checks::{self, Check, SuiteConfig, DEFAULT_DEPTH_CAP, DEFAULT_SEED};
use mcc_tensor::f2cat::F2Matrix;
use mcc_tensor::floer::{
    box_power_capped, box_tensor_capped, cfda_ta, cfda_tb_inv, hfk_dimensions, vanishing_certificate,
    DABimodule, MATERIALIZE_CAP,
};
use mcc_tensor::mcc::{apply_mcc, MccWindow};
use mcc_tensor::solenoidal::GraphBasis;

/// Highest level for which `dims fig8` computes the Floer column.
const FLOER_LEVEL_CAP: usize = 3;

#[derive(Parser)]
#[command(name = "mcc", version, about = "Conditionally convergent tensor powers over F2")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Args)]
struct Common {
    /// Output format.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the artifact (table, bimodule or window) here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include per-phase timings in the report.
    #[arg(long)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run every verification suite.
    Verify {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_DEPTH_CAP as u64, value_parser = clap::value_parser!(u64).range(0..=3))]
        depth_cap: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Staircase dimensions of a graph basis (a file, or `fig8`).
    Dims {
        graph: String,
        max_level: usize,
        /// Same as `--format`.
        #[arg(value_enum)]
        table_format: Option<Format>,
        #[command(flatten)]
        common: Common,
    },
    /// Box tensor product of two bimodule files (or `cfda_tb_inv`, `cfda_ta`).
    Box {
        left: String,
        right: String,
        #[arg(long, default_value_t = 1)]
        power: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Hochschild generators and the vanishing certificate of a bimodule.
    Hh {
        bimodule: String,
        #[command(flatten)]
        common: Common,
    },
    /// Window arithmetic.
    Mcc {
        #[command(subcommand)]
        op: MccOp,
    },
}

#[derive(Subcommand)]
enum MccOp {
    /// Apply a matrix to a window.
    Apply {
        matrix: PathBuf,
        window: PathBuf,
        /// Output depth; defaults to the window depth.
        #[arg(long)]
        depth: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Serialize)]
struct RunReport {
    command: String,
    passed: bool,
    checks: Vec<Check>,
    #[serde(skip_serializing_if = "Value::is_null")]
    result: Value,
    artifacts: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing_ms: Option<BTreeMap<String, u128>>,
}

struct Timer {
    on: bool,
    phases: BTreeMap<String, u128>,
}

impl Timer {
    fn new(on: bool) -> Self {
        Self {
            on,
            phases: BTreeMap::new(),
        }
    }

    fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.phases.insert(phase.to_string(), start.elapsed().as_millis());
        out
    }

    fn finish(self) -> Option<BTreeMap<String, u128>> {
        self.on.then_some(self.phases)
    }
}

fn check(name: &str, passed: bool, summary: String, witness: Option<String>) -> Check {
    Check {
        name: name.to_string(),
        passed,
        cases: 1,
        summary,
        witness,
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_bimodule(source: &str) -> Result<DABimodule> {
    match source {
        "cfda_tb_inv" => Ok(cfda_tb_inv()),
        "cfda_ta" => Ok(cfda_ta()),
        path => {
            let text = read(Path::new(path))?;
            DABimodule::from_json(&text).with_context(|| format!("in {path}"))
        }
    }
}

fn load_graph(source: &str) -> Result<GraphBasis> {
    if source == "fig8" {
        return Ok(GraphBasis::fig8());
    }
    let text = read(Path::new(source))?;
    GraphBasis::parse(&text).with_context(|| format!("in {source}"))
}

fn render(report: &RunReport, format: Format) -> String {
    match format {
        Format::Json | Format::Csv => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = format!("{}\n", report.command);
            for c in &report.checks {
                let status = if c.passed { "PASS" } else { "FAIL" };
                s.push_str(&format!("{status} {}: {}\n", c.name, c.summary));
                if let Some(w) = &c.witness {
                    s.push_str(&format!("  witness: {w}\n"));
                }
            }
            if !report.result.is_null() {
                s.push_str(&format!("{}\n", report.result));
            }
            for a in &report.artifacts {
                s.push_str(&format!("wrote {a}\n"));
            }
            if let Some(t) = &report.timing_ms {
                for (phase, ms) in t {
                    s.push_str(&format!("{phase}: {ms} ms\n"));
                }
            }
            s.push_str(if report.passed { "all checks passed\n" } else { "some checks failed\n" });
            s
        }
    }
}

fn finish(report: RunReport, format: Format) -> ExitCode {
    print!("{}", render(&report, format));
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn report(command: String, checks: Vec<Check>, result: Value, artifacts: Vec<String>, timer: Timer) -> RunReport {
    RunReport {
        command,
        passed: checks.iter().all(|c| c.passed),
        checks,
        result,
        artifacts,
        timing_ms: timer.finish(),
    }
}

fn cmd_verify(seed: u64, depth_cap: usize, common: &Common) -> Result<ExitCode> {
    let format = common.format.unwrap_or(Format::Json);
    if format == Format::Csv {
        bail!("verify reports are json or text");
    }
    let cfg = SuiteConfig { seed, depth_cap };
    let mut timer = Timer::new(common.timing);
    let checks: Vec<Check> = vec![
        timer.time("functoriality", || checks::functoriality(&cfg, 200)),
        timer.time("sigma_level_independence", || checks::sigma_level_independence(&cfg, 100)),
        timer.time("sector_idempotence", || checks::sector_idempotence(&cfg, 60)),
        timer.time("solenoidal_functor_law", || checks::solenoidal_functor_law(&cfg, 60)),
        timer.time("incompatibility_counterexample", || checks::incompatibility_counterexample(&cfg)),
        timer.time("box_table_golden", checks::box_table_golden),
        timer.time("vanishing_certificates", || checks::certificates(&cfg)),
        timer.time("dimension_bridge", || checks::dimension_bridge(&cfg)),
        timer.time("hh0_oracle", || checks::hh0_oracle(&cfg, 50)),
        timer.time("change_of_basis", || checks::change_of_basis(&cfg, 50)),
        timer.time("series_vectors", || checks::series_vectors(&cfg)),
    ];
    let command = format!("verify --seed {seed} --depth-cap {depth_cap}");
    let mut artifacts = Vec::new();
    let r = report(command, checks, Value::Null, vec![], timer);
    if let Some(out) = &common.out {
        write(out, &render(&r, Format::Json))?;
        artifacts.push(out.display().to_string());
    }
    Ok(finish(RunReport { artifacts, ..r }, format))
}

fn dims_csv(rows: &[(usize, u128)]) -> String {
    let mut s = String::from("level,dimension\n");
    for (m, d) in rows {
        s.push_str(&format!("{m},{d}\n"));
    }
    s
}

fn cmd_dims(graph: &str, max_level: usize, table_format: Option<Format>, common: &Common) -> Result<ExitCode> {
    let format = common.format.or(table_format).unwrap_or(Format::Json);
    let g = load_graph(graph)?;
    let mut timer = Timer::new(common.timing);
    let dims = timer
        .time("staircase", || checks::staircase_table(&g, max_level))
        .map_err(anyhow::Error::msg)?;
    let rows: Vec<(usize, u128)> = dims.iter().copied().enumerate().collect();
    let mut checks = Vec::new();
    let mut table: Vec<Value> = rows
        .iter()
        .map(|&(m, d)| json!({"level": m, "dimension": d.to_string()}))
        .collect();
    if graph == "fig8" {
        let upto = max_level.min(FLOER_LEVEL_CAP);
        match timer.time("floer", || hfk_dimensions(upto)) {
            Ok(floer) => {
                for r in &floer {
                    let row = table[r.level].as_object_mut().expect("row object");
                    row.insert("grading_minus".into(), json!(r.grading_minus.to_string()));
                    row.insert("grading_zero".into(), json!(r.grading_zero.to_string()));
                    row.insert("grading_plus".into(), json!(r.grading_plus.to_string()));
                    row.insert("floer_total".into(), json!(r.total.to_string()));
                }
                checks.push(check(
                    "floer_cross_check",
                    true,
                    format!("levels 0..={upto} agree with the Hochschild generator counts"),
                    None,
                ));
            }
            Err(e) => checks.push(check("floer_cross_check", false, "failed".into(), Some(e.to_string()))),
        }
    }
    let command = format!("dims {graph} {max_level}");
    let mut artifacts = Vec::new();
    if format == Format::Csv {
        let csv = dims_csv(&rows);
        let failed = checks.iter().any(|c| !c.passed);
        match &common.out {
            Some(out) => write(out, &csv)?,
            None => print!("{csv}"),
        }
        for c in checks.iter().filter(|c| !c.passed) {
            eprintln!("FAIL {}: {}", c.name, c.witness.as_deref().unwrap_or(""));
        }
        return Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS });
    }
    let result = json!({ "rows": table });
    if let Some(out) = &common.out {
        let mut text = serde_json::to_string_pretty(&result)?;
        text.push('\n');
        write(out, &text)?;
        artifacts.push(out.display().to_string());
    }
    Ok(finish(report(command, checks, result, artifacts, timer), format))
}

fn cmd_box(left: &str, right: &str, power: usize, common: &Common) -> Result<ExitCode> {
    let format = common.format.unwrap_or(Format::Json);
    let (l, r) = (load_bimodule(left)?, load_bimodule(right)?);
    let mut timer = Timer::new(common.timing);
    let product = timer.time("box", || -> Result<DABimodule> {
        let p = box_tensor_capped(&l, &r, MATERIALIZE_CAP)?;
        Ok(box_power_capped(&p, power, MATERIALIZE_CAP)?)
    })?;
    let mut result = json!({
        "generators": product.generators().len(),
        "terms": product.terms().len(),
    });
    let mut artifacts = Vec::new();
    match &common.out {
        Some(out) => {
            write(out, &product.to_json())?;
            artifacts.push(out.display().to_string());
        }
        None => {
            result["table"] = serde_json::to_value(product.to_file())?;
        }
    }
    let command = format!("box {left} {right} --power {power}");
    Ok(finish(report(command, vec![], result, artifacts, timer), format))
}

fn cmd_hh(source: &str, common: &Common) -> Result<ExitCode> {
    let format = common.format.unwrap_or(Format::Json);
    let p = load_bimodule(source)?;
    let mut timer = Timer::new(common.timing);
    let gens: Vec<&str> = p.hochschild_generators().into_iter().map(|g| p.name(g)).collect();
    let cert = timer.time("certificate", || vanishing_certificate(&p));
    let mut result = json!({
        "hochschild_generators": gens,
        "count": gens.len(),
    });
    let c = match &cert {
        Ok(cert) => {
            result["fixpoint"] = json!(cert.fixpoint_names());
            result["zero_input_seed"] = json!(cert.seed_names());
            check(
                "vanishing_certificate",
                true,
                format!("granted, fixpoint {{{}}}", cert.fixpoint_names().join(", ")),
                None,
            )
        }
        Err(e) => check("vanishing_certificate", false, "refused".into(), Some(e.to_string())),
    };
    let mut artifacts = Vec::new();
    if let Some(out) = &common.out {
        let mut text = serde_json::to_string_pretty(&result)?;
        text.push('\n');
        write(out, &text)?;
        artifacts.push(out.display().to_string());
    }
    Ok(finish(report(format!("hh {source}"), vec![c], result, artifacts, timer), format))
}

fn tower_line(text: &str) -> Option<String> {
    text.lines()
        .map(str::trim)
        .find_map(|l| l.strip_prefix("tower:").map(|t| t.trim().to_string()))
}

fn cmd_mcc_apply(matrix: &Path, window: &Path, depth: Option<usize>, common: &Common) -> Result<ExitCode> {
    let format = common.format.unwrap_or(Format::Json);
    let m = F2Matrix::parse(&read(matrix)?).with_context(|| format!("in {}", matrix.display()))?;
    let wtext = read(window)?;
    let w = MccWindow::parse(&wtext, window.parent()).with_context(|| format!("in {}", window.display()))?;
    let d = depth.unwrap_or(w.depth());
    let mut timer = Timer::new(common.timing);
    let out = timer.time("apply", || apply_mcc(&m, &w, d))?;
    let tower_ref = tower_line(&wtext).unwrap_or_else(|| "dyadic 0".into());
    let text = out.to_text(&tower_ref);
    let mut result = json!({
        "depth": out.depth(),
        "inv_level": out.inv_level(),
        "support": out.support_words(),
    });
    let mut artifacts = Vec::new();
    match &common.out {
        Some(path) => {
            write(path, &text)?;
            artifacts.push(path.display().to_string());
        }
        None => result["window"] = json!(text),
    }
    let command = format!("mcc apply {} {} --depth {d}", matrix.display(), window.display());
    Ok(finish(report(command, vec![], result, artifacts, timer), format))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Verify {
            seed,
            depth_cap,
            common,
        } => cmd_verify(*seed, *depth_cap as usize, common),
        Command::Dims {
            graph,
            max_level,
            table_format,
            common,
        } => cmd_dims(graph, *max_level, *table_format, common),
        Command::Box {
            left,
            right,
            power,
            common,
        } => cmd_box(left, right, *power, common),
        Command::Hh { bimodule, common } => cmd_hh(bimodule, common),
        Command::Mcc {
            op:
                MccOp::Apply {
                    matrix,
                    window,
                    depth,
                    common,
                },
        } => cmd_mcc_apply(matrix, window, *depth, common),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(2)
    })
}
