//! `gof`: runs scenario files and built-in presets, writes JSON reports and spectra.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use gof_core::presets;
use gof_core::scenario::{self, Scenario};
use gof_core::{GofError, Tolerances};
use serde_json::{json, Value};

const EXIT_SCHEMA: u8 = 2;
const EXIT_FINDINGS: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "gof", version, about = "Matrix-valued Gabor frame scenario runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run scenario files and/or presets.
    Run(RunArgs),
    /// List the built-in presets.
    ListPresets,
}

#[derive(Parser, Debug)]
struct RunArgs {
    /// Scenario JSON file (repeatable).
    #[arg(long = "scenario", value_name = "PATH")]
    scenarios: Vec<PathBuf>,
    /// Built-in preset name (repeatable).
    #[arg(long = "preset", value_name = "NAME")]
    presets: Vec<String>,
    /// Report path; stdout when omitted. With several inputs each report gets the scenario name as suffix.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// CSV of the first frame-operator spectrum; later spectra get `.taskN` suffixes.
    #[arg(long, value_name = "PATH")]
    spectra: Option<PathBuf>,
    /// PSD and kernel tolerance, overriding the scenario and the environment.
    #[arg(long, value_name = "FLOAT")]
    tol: Option<f64>,
    /// Fallback tolerance when neither --tol nor the scenario sets one.
    #[arg(long, env = "GOF_DEFAULT_TOL", value_name = "FLOAT", hide = true)]
    default_tol: Option<f64>,
    /// Exit with status 3 when any finding is reported.
    #[arg(long)]
    strict: bool,
    /// Number of scenarios run concurrently.
    #[arg(long, default_value_t = 1, value_name = "N")]
    jobs: usize,
}

/// One input as loaded; schema failures are kept so every bad input gets reported.
struct Input {
    label: String,
    loaded: std::result::Result<Scenario, Vec<String>>,
}

struct Outcome {
    label: String,
    report_path: Option<PathBuf>,
    report: Value,
    findings: usize,
    checks: (usize, usize),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListPresets => {
            for p in presets::PRESETS.iter() {
                println!("{:<16} {}", p.name, p.description);
            }
            ExitCode::SUCCESS
        }
        Command::Run(args) => match run(args) {
            Ok(code) => code,
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::FAILURE
            }
        },
    }
}

fn load_file(path: &Path) -> Result<Input> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let loaded = Scenario::from_json_str(&text, path.parent()).map_err(schema_errors);
    let label = match &loaded {
        Ok(sc) => sc.name.clone(),
        Err(_) => None,
    }
    .unwrap_or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default());
    Ok(Input { label, loaded })
}

fn load_preset(name: &str) -> Input {
    let loaded = presets::scenario(name)
        .and_then(|doc| Scenario::from_value(&doc, None))
        .map_err(schema_errors);
    Input { label: name.to_string(), loaded }
}

fn schema_errors(e: GofError) -> Vec<String> {
    match e {
        GofError::Schema(errs) => errs,
        other => vec![format!("/: {other}")],
    }
}

fn tolerances(args: &RunArgs, sc: &Scenario) -> Tolerances {
    if let Some(t) = args.tol {
        Tolerances::with_psd(t)
    } else if let Some(t) = sc.tolerances {
        t
    } else if let Some(t) = args.default_tol {
        Tolerances::with_psd(t)
    } else {
        Tolerances::default()
    }
}

/// `dir/report.json` + `tag` → `dir/report.tag.json`.
fn with_suffix(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{tag}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{tag}"),
    };
    path.with_file_name(name)
}

fn write_spectrum(path: &Path, values: &[f64]) -> Result<()> {
    let mut s = String::from("index,eigenvalue\n");
    for (i, v) in values.iter().enumerate() {
        s.push_str(&format!("{i},{v:e}\n"));
    }
    fs::write(path, s).with_context(|| format!("writing {}", path.display()))
}

fn execute(args: &RunArgs, label: &str, sc: &Scenario, many: bool) -> Result<Outcome> {
    let tol = tolerances(args, sc);
    let out = scenario::run(sc, tol);
    let mut report = scenario::report(sc, tol, &out);
    if let Some(base) = &args.spectra {
        let base = if many { with_suffix(base, label) } else { base.clone() };
        for (k, (task, values)) in out.spectra.iter().enumerate() {
            let path = if k == 0 { base.clone() } else { with_suffix(&base, &format!("task{task}")) };
            write_spectrum(&path, values)?;
            if let Some(entry) = report.pointer_mut(&format!("/results/tasks/{task}")) {
                entry["spectrum_file"] = json!(path.to_string_lossy());
            }
        }
    }
    let report_path = args.out.as_ref().map(|p| if many { with_suffix(p, label) } else { p.clone() });
    if let Some(p) = &report_path {
        let text = serde_json::to_string_pretty(&report)? + "\n";
        fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
    }
    let passed = out.checks.iter().filter(|c| c.pass).count();
    Ok(Outcome {
        label: label.to_string(),
        report_path,
        report,
        findings: out.findings.len(),
        checks: (passed, out.checks.len()),
    })
}

fn run(args: RunArgs) -> Result<ExitCode> {
    if args.scenarios.is_empty() && args.presets.is_empty() {
        anyhow::bail!("nothing to run: pass --scenario PATH or --preset NAME");
    }
    for (flag, v) in [("--tol", args.tol), ("GOF_DEFAULT_TOL", args.default_tol)] {
        if let Some(t) = v {
            if !(t > 0.0 && t.is_finite()) {
                anyhow::bail!("{flag} must be a positive number, got {t}");
            }
        }
    }
    let mut inputs = Vec::new();
    for p in &args.scenarios {
        inputs.push(load_file(p)?);
    }
    inputs.extend(args.presets.iter().map(|n| load_preset(n)));

    let mut bad = false;
    for input in &inputs {
        if let Err(errs) = &input.loaded {
            bad = true;
            eprintln!("{}: schema errors", input.label);
            for e in errs {
                eprintln!("  {e}");
            }
        }
    }
    if bad {
        return Ok(ExitCode::from(EXIT_SCHEMA));
    }

    let many = inputs.len() > 1;
    if many && args.out.is_none() {
        anyhow::bail!("--out is required when running several scenarios");
    }
    let jobs: Vec<(&str, &Scenario)> = inputs
        .iter()
        .map(|i| (i.label.as_str(), i.loaded.as_ref().expect("checked above")))
        .collect();
    let results: Vec<Mutex<Option<Result<Outcome>>>> = jobs.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..args.jobs.clamp(1, jobs.len()) {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some((label, sc)) = jobs.get(k) else { break };
                let r = execute(&args, label, sc, many);
                *results[k].lock().expect("no poisoned slots") = Some(r);
            });
        }
    });

    let mut findings = 0;
    for slot in results {
        let o = slot.into_inner().expect("no poisoned slots").expect("every job ran")?;
        findings += o.findings;
        match &o.report_path {
            Some(p) => eprintln!(
                "{}: {}/{} checks passed, {} findings -> {}",
                o.label,
                o.checks.0,
                o.checks.1,
                o.findings,
                p.display()
            ),
            None => {
                println!("{}", serde_json::to_string_pretty(&o.report)?);
                eprintln!("{}: {}/{} checks passed, {} findings", o.label, o.checks.0, o.checks.1, o.findings);
            }
        }
    }
    if args.strict && findings > 0 {
        return Ok(ExitCode::from(EXIT_FINDINGS));
    }
    Ok(ExitCode::SUCCESS)
}
