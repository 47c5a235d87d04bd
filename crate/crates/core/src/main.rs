use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use layerpot::cli::{self, RunConfig, EXIT_CONFIG_ERROR};
use layerpot::Error;

/// Verification suites for double layer potentials.
#[derive(Parser, Debug)]
#[command(name = "layerpot", version)]
struct Args {
    /// Operator id, e.g. `laplace` or `yukawa3d:lambda=1`.
    #[arg(long)]
    operator: Option<String>,
    /// Boundary id, e.g. `circle:R=1` or `ellipsoid:a=1,b=1,c=2`.
    #[arg(long)]
    boundary: Option<String>,
    /// structure, kernel-class, dlp, maximal, regularity or all.
    #[arg(long)]
    suite: Option<String>,
    /// Refinement level, 0 to 5.
    #[arg(long)]
    level: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Plain-text `key = value` file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Allowed drift across the final two levels, in percent.
    #[arg(long)]
    stability_pct: Option<f64>,
    /// Hoelder exponent of the non-smooth test density.
    #[arg(long)]
    beta: Option<f64>,
    /// Print the operator and boundary catalogs.
    #[arg(long)]
    list: bool,
    /// Print a curve from an existing report as CSV instead of running.
    #[arg(long, value_name = "CURVE")]
    emit: Option<String>,
    /// Report read by `--emit`; defaults to `<out>/report.json`.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn config(args: &Args) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.apply_file_text(&text)?;
    }
    let flags: [(&str, Option<String>); 7] = [
        ("operator", args.operator.clone()),
        ("boundary", args.boundary.clone()),
        ("suite", args.suite.clone()),
        ("level", args.level.map(|v| v.to_string())),
        ("seed", args.seed.map(|v| v.to_string())),
        ("stability_pct", args.stability_pct.map(|v| v.to_string())),
        ("beta", args.beta.map(|v| v.to_string())),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            cfg.set(k, &v)?;
        }
    }
    if let Some(out) = &args.out {
        cfg.out = out.clone();
    }
    Ok(cfg)
}

fn run(args: &Args) -> Result<i32, Error> {
    if args.list {
        print!("{}", cli::listing());
        return Ok(0);
    }
    let cfg = config(args)?;
    if let Some(sel) = &args.emit {
        let report = args.report.clone().unwrap_or_else(|| cfg.out.join("report.json"));
        print!("{}", cli::emit_plot_data(&report, sel)?);
        return Ok(0);
    }
    let report = cli::run_suite(&cfg)?;
    cli::write_outputs(&report, &cfg.out)?;
    print!("{}", cli::summary_text(&report));
    Ok(report.exit_code)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let code = match run(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::MissingCurve(_) | Error::MalformedReport(_) | Error::Io(_) => EXIT_CONFIG_ERROR,
                _ => cli::exit_code(&e),
            }
        }
    };
    ExitCode::from(code as u8)
}
