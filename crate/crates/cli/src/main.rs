use std::error::Error as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use metrikos_cli::config::Overrides;
use metrikos_cli::error::EXIT_INPUT;
use metrikos_cli::{run, Command};

/// Validators, certificates and explicit metrics for generalized metric spaces.
#[derive(Parser)]
#[command(name = "metrikos", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check distance axioms and the structure's triangle-type inequality.
    Validate(Opts),
    /// Compute and replay regularity certificates.
    Regularity(Opts),
    /// Build the chain metric and report distortion.
    Metrize(Opts),
    /// Search random spaces for counterexamples.
    Fuzz(Opts),
}

#[derive(Args)]
struct Opts {
    /// JSON job configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// b, f or theta.
    #[arg(long)]
    structure: Option<String>,
    /// JSON space file (matrix or points + formula).
    #[arg(long)]
    space: Option<PathBuf>,
    /// b-metric constant (number or constant expression).
    #[arg(long = "K")]
    k_const: Option<String>,
    /// F-metric function of t.
    #[arg(long)]
    f: Option<String>,
    /// F-metric offset (number or constant expression).
    #[arg(long)]
    alpha: Option<String>,
    /// B-action in s and t.
    #[arg(long)]
    theta: Option<String>,
    /// Comma-separated eps scales.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    /// Comma-separated k (or t) scales.
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<f64>>,
    /// Comma-separated anchor labels.
    #[arg(long, value_delimiter = ',')]
    anchor: Option<Vec<String>>,
    /// identity, power:<x>, snowflake or custom:<expr>.
    #[arg(long)]
    transform: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Relative tolerance for conclusions.
    #[arg(long)]
    tol: Option<f64>,
    /// Let heuristic checks decide the exit code.
    #[arg(long)]
    strict: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Opts {
    fn overrides(&self) -> Overrides {
        Overrides {
            structure: self.structure.clone(),
            space: self.space.clone(),
            k: self.k_const.clone(),
            f: self.f.clone(),
            alpha: self.alpha.clone(),
            theta: self.theta.clone(),
            eps: self.eps.clone(),
            k_scales: self.k.clone(),
            anchors: self.anchor.clone(),
            transform: self.transform.clone(),
            seed: self.seed,
            trials: self.trials,
            tol: self.tol,
            strict: self.strict,
        }
    }
}

fn summary(report: &serde_json::Value) -> String {
    let mut lines = Vec::new();
    for c in report["checks"].as_array().into_iter().flatten() {
        lines.push(format!("{}: {}", c["name"].as_str().unwrap_or("?"), if c["pass"] == true { "pass" } else { "FAIL" }));
    }
    for c in report["heuristic_checks"].as_array().into_iter().flatten() {
        let state = if c["pass"] == true { "pass" } else { "FAIL" };
        lines.push(format!("{} (heuristic): {state}", c["name"].as_str().unwrap_or("?")));
    }
    if let Some(d) = report["metric"]["max_distortion"].as_f64() {
        lines.push(format!("max_distortion: {d}"));
    }
    if let Some(n) = report["fuzz"]["violations"].as_u64() {
        lines.push(format!("violations: {n}"));
    }
    let failures = report["failures"].as_array().map_or(0, Vec::len);
    if failures > 0 {
        lines.push(format!("failures: {failures}"));
    }
    lines.push(format!("overall: {}", if report["pass"] == true { "pass" } else { "FAIL" }));
    lines.join("\n")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, opts) = match &cli.command {
        Cmd::Validate(o) => (Command::Validate, o),
        Cmd::Regularity(o) => (Command::Regularity, o),
        Cmd::Metrize(o) => (Command::Metrize, o),
        Cmd::Fuzz(o) => (Command::Fuzz, o),
    };
    match run(command, opts.config.as_deref(), &opts.overrides()) {
        Ok((report, code)) => {
            let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
            match &opts.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text) {
                        eprintln!("error: {}: {e}", path.display());
                        return ExitCode::from(EXIT_INPUT as u8);
                    }
                    println!("{}", summary(&report));
                }
                None => {
                    print!("{text}");
                    eprintln!("{}", summary(&report));
                }
            }
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprint!("error: {e}");
            let mut source = e.source();
            while let Some(s) = source {
                if !e.to_string().contains(&s.to_string()) {
                    eprint!(": {s}");
                }
                source = s.source();
            }
            eprintln!();
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}
