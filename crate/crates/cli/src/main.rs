//! `renorm`: command-line driver for the torus renormalization experiments.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex;
use serde_json::{json, Value};
use torus_renorm::divisors::{omega_recursive, rho, DecoratedTree};
use torus_renorm::harness::{
    classical_sweep, measure_sweep, residual_sweep, run_acceptance, spectrum_sweep, Scenario, Status,
};
use torus_renorm::lattice::SymbolFile;
use torus_renorm::lindstedt::counterterm;
use torus_renorm::trees::{enumerate_delta, TreeIndexSet};
use torus_renorm::weyl::Bracket;
use torus_renorm::{Error, Idx};

use output::{Emit, RunDir};

#[derive(Parser, Debug)]
#[command(name = "renorm", version, about = "Lindstedt renormalization experiments on the torus")]
struct Cli {
    /// Output root; each run writes into a subdirectory named by the scenario hash.
    #[arg(long, env = "OUT_DIR", global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: logical cores).
    #[arg(long, env = "WORKERS", global = true)]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value = "both", global = true)]
    emit: Emit,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct ScenarioArg {
    #[arg(long)]
    scenario: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate tree index sets Δ(n).
    Trees {
        /// Print counts only.
        #[arg(long)]
        count: bool,
        #[arg(long, default_value_t = 8)]
        max: usize,
    },
    /// Small-divisor coefficients Ω₁, Ω₂ of one decorated tree.
    Omega {
        /// Child-count vector, comma separated.
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        delta: Vec<usize>,
        /// Node weights, `n·d` integers in node order.
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        v: Vec<i32>,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        omega: Vec<f64>,
    },
    /// Lindstedt orders H_n, R′_n for every ħ of the scenario and the classical limit.
    Lindstedt(ScenarioArg),
    /// Counterterms R(t) and the classical conjugation sweep.
    Renormalize(ScenarioArg),
    /// Residual, spectrum and measure sweeps with pass/fail assertions.
    Verify(ScenarioArg),
    Spectra(ScenarioArg),
    Measures(ScenarioArg),
    /// Full acceptance battery; writes summary.json.
    Suite(ScenarioArg),
}

enum Failure {
    Validation(Error),
    Numerical(Error),
    Assertion { dir: Option<PathBuf>, failures: Vec<String> },
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Numerical(_) => Failure::Numerical(e),
            _ => Failure::Validation(e),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers.filter(|&n| n > 0) {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().expect("thread pool is built once");
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (code, report) = match f {
                Failure::Validation(e) => (2, json!({ "status": "invalid", "error": e.to_string() })),
                Failure::Numerical(e) => (3, json!({ "status": "numerical", "error": e.to_string() })),
                Failure::Assertion { dir, failures } => {
                    let report = json!({ "status": "assertion", "failures": failures });
                    if let Some(dir) = dir {
                        let _ = std::fs::write(dir.join("error.json"), format!("{report:#}\n"));
                    }
                    (3, report)
                }
            };
            eprintln!("{report}");
            ExitCode::from(code)
        }
    }
}

fn out_root(cli: &Cli, scn: &Scenario) -> PathBuf {
    cli.out.clone().or_else(|| scn.out_dir.clone()).unwrap_or_else(|| PathBuf::from("out"))
}

fn open(cli: &Cli, path: &Path) -> Result<(Scenario, RunDir), Failure> {
    let scn = Scenario::load(path)?;
    let dir = RunDir::create(&out_root(cli, &scn), &scn, cli.emit)?;
    Ok((scn, dir))
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Trees { count, max } => trees(*count, *max),
        Command::Omega { delta, v, omega } => omega_cmd(delta, v, omega),
        Command::Lindstedt(a) => lindstedt(cli, &a.scenario),
        Command::Renormalize(a) => renormalize(cli, &a.scenario),
        Command::Verify(a) => verify(cli, &a.scenario),
        Command::Spectra(a) => {
            let (scn, dir) = open(cli, &a.scenario)?;
            dir.write_rows("spectra", &spectrum_sweep(&scn)?)?;
            announce(&dir);
            Ok(())
        }
        Command::Measures(a) => {
            let (scn, dir) = open(cli, &a.scenario)?;
            dir.write_rows("measures", &measure_sweep(&scn)?)?;
            announce(&dir);
            Ok(())
        }
        Command::Suite(a) => suite(cli, &a.scenario),
    }
}

fn announce(dir: &RunDir) {
    println!("wrote {}", dir.path.display());
}

fn trees(count: bool, max: usize) -> Result<(), Failure> {
    if max == 0 || max > 12 {
        return Err(Error::Invalid(format!("--max must be in 1..=12, got {max}")).into());
    }
    if count {
        println!("n,count");
    }
    for n in 1..=max {
        let all = enumerate_delta(n)?;
        if count {
            println!("{n},{}", all.len());
        } else {
            for t in &all {
                println!("{}", TreeIndexSet::delta(t).iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","));
            }
        }
    }
    Ok(())
}

fn omega_cmd(delta: &[usize], v: &[i32], omega: &[f64]) -> Result<(), Failure> {
    let d = omega.len();
    if v.len() != delta.len() * d {
        return Err(Error::Invalid(format!("--v needs {} entries for {} nodes in d = {d}", delta.len() * d, delta.len())).into());
    }
    let weights = v.chunks(d).map(Idx::from_slice).collect();
    let tree = DecoratedTree::new(TreeIndexSet::from_delta(delta)?, d, weights)?;
    let pair = omega_recursive(&tree, omega)?;
    let c = |z: Complex<f64>| json!({ "re": z.re, "im": z.im });
    let classes = if tree.n() <= 10 { Value::from(rho(&tree)?) } else { Value::Null };
    println!(
        "{:#}",
        json!({ "delta": delta, "v": v, "omega": omega, "omega1": c(pair.omega1), "omega2": c(pair.omega2), "classes": classes })
    );
    Ok(())
}

fn brackets(scn: &Scenario) -> Vec<(String, Option<f64>, Bracket<f64>)> {
    let mut out: Vec<_> = scn.hbar.iter().map(|&h| ("moyal".to_string(), Some(h), Bracket::Moyal(h))).collect();
    out.push(("poisson".to_string(), None, Bracket::Poisson));
    out
}

#[derive(serde::Serialize)]
struct NormRow {
    bracket: String,
    hbar: Option<f64>,
    n: usize,
    h_norm: f64,
    r_norm: f64,
    cohomological_residual: f64,
}

fn lindstedt(cli: &Cli, path: &Path) -> Result<(), Failure> {
    let (scn, dir) = open(cli, path)?;
    let mut series_json = Vec::new();
    let mut rows = Vec::new();
    for (name, hbar, bracket) in brackets(&scn) {
        let s = scn.series(bracket)?;
        let mut orders = Vec::new();
        for n in 1..=s.len() {
            let residual = s.cohomological_residual(n)?;
            rows.push(NormRow {
                bracket: name.clone(),
                hbar,
                n,
                h_norm: s.h(n).analytic_norm(0.0),
                r_norm: s.r(n).analytic_norm(0.0),
                cohomological_residual: residual,
            });
            orders.push(json!({ "n": n, "H": SymbolFile::from_symbol(s.h(n)), "R": SymbolFile::from_symbol(s.r(n)) }));
        }
        series_json.push(json!({ "bracket": name, "hbar": hbar, "orders": orders }));
    }
    dir.write_json("lindstedt.json", json!({ "series": series_json }))?;
    dir.write_rows("norms", &rows)?;
    announce(&dir);
    Ok(())
}

fn renormalize(cli: &Cli, path: &Path) -> Result<(), Failure> {
    let (scn, dir) = open(cli, path)?;
    let mut counterterms = Vec::new();
    for (name, hbar, bracket) in brackets(&scn) {
        let s = scn.series(bracket)?;
        for &t in &scn.t {
            counterterms.push(json!({ "bracket": name, "hbar": hbar, "t": t, "R": SymbolFile::from_symbol(&counterterm(&s, t)) }));
        }
    }
    dir.write_json("counterterms.json", json!({ "counterterms": counterterms }))?;
    dir.write_rows("classical", &classical_sweep(&scn)?)?;
    announce(&dir);
    Ok(())
}

fn verify(cli: &Cli, path: &Path) -> Result<(), Failure> {
    let (scn, dir) = open(cli, path)?;
    let tol = scn.tolerances;
    let residuals = residual_sweep(&scn)?;
    let spectra = spectrum_sweep(&scn)?;
    let measures = measure_sweep(&scn)?;
    dir.write_rows("residuals", &residuals)?;
    dir.write_rows("spectra", &spectra)?;
    dir.write_rows("measures", &measures)?;
    let mut failures = Vec::new();
    for r in &residuals {
        let bound = tol.residual_factor * r.t.powi(r.n as i32 + 1) + tol.noise_floor;
        if r.residual > bound {
            failures.push(format!("residual {:.3e} > {bound:.3e} at ħ = {}, t = {}", r.residual, r.hbar, r.t));
        }
    }
    for s in &spectra {
        if s.matched_fraction < tol.matched_fraction {
            failures.push(format!("matched fraction {:.3} at ħ = {}, t = {}", s.matched_fraction, s.hbar, s.t));
        }
    }
    for m in &measures {
        if m.abs_error > tol.measure_deviation {
            failures.push(format!("measure test {} off by {:.3e} at ħ = {}, t = {}", m.test, m.abs_error, m.hbar, m.t));
        }
    }
    announce(&dir);
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Assertion { dir: Some(dir.path.clone()), failures })
    }
}

fn suite(cli: &Cli, path: &Path) -> Result<(), Failure> {
    let (scn, dir) = open(cli, path)?;
    let summary = run_acceptance(&scn)?;
    for c in &summary.criteria {
        let tag = if c.status == Status::Pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {:>2} {:<34} {}", c.id, c.name, c.detail);
    }
    dir.write_json("summary.json", serde_json::to_value(&summary).map_err(Error::from)?)?;
    announce(&dir);
    if summary.all_passed() {
        Ok(())
    } else {
        let failures = summary
            .criteria
            .iter()
            .filter(|c| c.status == Status::Fail)
            .map(|c| format!("criterion {}: {}", c.id, c.detail))
            .collect();
        Err(Failure::Assertion { dir: Some(dir.path.clone()), failures })
    }
}
