use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use relsteinberg::config::{parse_relations, parse_suites, JobConfig, RootSpec};
use relsteinberg::suite;
use relsteinberg::Error;

/// Verify relative Steinberg presentations over finite rings.
///
/// Exit status: 0 when every check passes, 1 on a verification failure,
/// 2 on a configuration or context error.
#[derive(Parser, Debug)]
#[command(name = "relsteinberg", version)]
struct Args {
    /// TOML job file; without it Mat(4, Z/8) with A = 2·Mat(4, Z/8) and
    /// root system A3 are used.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma separated: relations, elimination, chevalley, ft, all, none.
    #[arg(long)]
    suite: Option<String>,
    /// Comma separated relation ids, e.g. `St1,Conj2,HW`.
    #[arg(long)]
    relations: Option<String>,
    /// Random instances per relation id or check.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = automatic).
    #[arg(long)]
    jobs: Option<usize>,
    /// Report path; the report goes to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn build_config(args: &Args) -> Result<JobConfig, Error> {
    let mut cfg = match &args.config {
        Some(p) => JobConfig::load(p)?,
        None => {
            let mut c = JobConfig::matrix(4, 8, 2);
            c.roots = Some(RootSpec { system: "A3".into(), orientation: None });
            c
        }
    };
    if let Some(s) = &args.suite {
        cfg.job.suites = parse_suites(s)?;
    }
    if let Some(r) = &args.relations {
        cfg.job.relations = Some(parse_relations(r)?);
    }
    if let Some(n) = args.samples {
        cfg.job.samples = n;
    }
    if let Some(s) = args.seed {
        cfg.job.seed = s;
    }
    if let Some(j) = args.jobs {
        cfg.job.jobs = j;
    }
    if args.out.is_some() {
        cfg.job.out.clone_from(&args.out);
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match build_config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let outcome = suite::run(&cfg);
    let code = suite::exit_code(&outcome);
    let report = match outcome {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(code);
        }
    };
    let json = report.to_json();
    match &cfg.job.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &json) {
                eprintln!("error: cannot write {}: {e}", p.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{json}"),
    }
    for s in &report.suites {
        let failed: Vec<&str> = s.checks.iter().filter(|c| !c.pass()).map(|c| c.name.as_str()).collect();
        let status = if s.pass { "PASS" } else { "FAIL" };
        eprintln!("{status} {} ({} checks){}", s.suite.name(), s.checks.len(), if failed.is_empty() { String::new() } else { format!(": {}", failed.join(", ")) });
        for f in &s.ft {
            eprintln!("     ft {:?}: factors {:?}, free rank {}", f.scope, f.invariant_factors, f.free_rank);
        }
    }
    ExitCode::from(code)
}
