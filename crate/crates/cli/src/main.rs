use std::collections::BTreeMap;
use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use malcev_core::alphabet::MultiDegree;
use malcev_core::assoc::{lie_dim, witt_dim};
use malcev_core::basis::verify_basis;
use malcev_core::expr::expr_zero_in_m;
use malcev_core::subdirect::{dim_j, dim_m};

use malcev_cli::catalog;
use malcev_cli::parser;
use malcev_cli::runner::{RunConfig, Runner, ZeroMode};

/// Exact workbench for the free Malcev algebra on x, y, z: zero tests,
/// graded dimensions, basis checks and the identity-catalog verifier.
#[derive(Parser)]
#[command(name = "malcev", version, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact zero test of an expression in the free Malcev algebra
    Zero {
        /// expression over x, y, z, e.g. "J(x,y,z) J(x,y,z)"
        expr: String,
    },
    /// Graded dimensions at one multidegree
    Dim {
        dx: u32,
        dy: u32,
        dz: u32,
    },
    /// Enumerate and verify the basis of J(M,M,M) at one multidegree
    Basis {
        dx: u32,
        dy: u32,
        dz: u32,
    },
    /// Check the identities from one spec file
    CheckIdentity {
        /// path to an identity-spec JSON file
        #[arg(long)]
        spec: std::path::PathBuf,
        #[arg(long, default_value_t = 7)]
        degree_cap: u32,
        #[arg(long, default_value_t = 9)]
        zero_cap: u32,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Verify the whole built-in identity catalog
    VerifyPaper {
        #[arg(long, default_value_t = 7)]
        degree_cap: u32,
        /// largest multilinear degree attempted as a T-ideal membership
        /// before falling back to subdirect zero tests
        #[arg(long, default_value_t = 6)]
        consequence_cap: u32,
        #[arg(long, default_value_t = 9)]
        zero_cap: u32,
        #[arg(long, default_value_t = 6)]
        dim_cap: u32,
        /// worker threads (0 = automatic; MALCEV_JOBS overrides the default)
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// clamp integer catalog parameters to this maximum
        #[arg(long)]
        params: Option<i64>,
        /// symbolic (exact) or randomized zero tests
        #[arg(long, default_value = "symbolic")]
        mode: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        trials: u32,
        /// include wall-clock timings (report is no longer byte-stable)
        #[arg(long, default_value_t = false)]
        timings: bool,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Zero { expr } => {
            let e = parser::parse(&expr).map_err(|e| e.to_string())?;
            let zero = expr_zero_in_m(&e, &BTreeMap::new()).map_err(|e| e.to_string())?;
            println!("{zero}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Dim { dx, dy, dz } => {
            let d = MultiDegree(vec![dx, dy, dz]);
            if d.total() == 0 {
                return Err("total degree must be at least 1".into());
            }
            let dm = dim_m(&d);
            let dl = lie_dim(&d);
            let wd = witt_dim(&d);
            let dj = if d.total() >= 3 { dim_j(&d) } else { dm - dl };
            println!(
                "{{\"dim_M\":{dm},\"lie_dim\":{dl},\"witt_dim\":{wd},\"dim_J\":{dj}}}"
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Basis { dx, dy, dz } => {
            let d = MultiDegree(vec![dx, dy, dz]);
            if d.total() < 3 {
                println!(
                    "{{\"multidegree\":\"{d}\",\"count\":0,\"rank\":0,\"dim_j\":0,\
                     \"independent\":true,\"spanning\":true}}"
                );
                return Ok(ExitCode::SUCCESS);
            }
            let r = verify_basis(&d).map_err(|e| e.to_string())?;
            println!(
                "{{\"multidegree\":\"{}\",\"count\":{},\"rank\":{},\"dim_j\":{},\
                 \"independent\":{},\"spanning\":{}}}",
                r.multidegree, r.count, r.rank, r.dim_j, r.independent, r.spanning
            );
            Ok(if r.ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::CheckIdentity {
            spec,
            degree_cap,
            zero_cap,
            out,
        } => {
            let text = std::fs::read_to_string(&spec)
                .map_err(|e| format!("cannot read {}: {e}", spec.display()))?;
            let item = catalog::parse_spec(&spec.display().to_string(), &text)
                .map_err(|e| e.to_string())?;
            let config = RunConfig {
                degree_cap,
                consequence_attempt_cap: degree_cap,
                zero_degree_cap: zero_cap,
                ..RunConfig::default()
            };
            let runner = Runner::new(config);
            let report = runner.run_catalog(std::slice::from_ref(&item));
            emit_report(&report, out.as_deref())?;
            Ok(exit_for(&report))
        }
        Command::VerifyPaper {
            degree_cap,
            consequence_cap,
            zero_cap,
            dim_cap,
            jobs,
            params,
            mode,
            seed,
            trials,
            timings,
            out,
        } => {
            let jobs = effective_jobs(jobs);
            if jobs > 0 {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(jobs)
                    .build_global()
                    .map_err(|e| e.to_string())?;
            }
            let mode = match mode.as_str() {
                "symbolic" => ZeroMode::Symbolic,
                "randomized" => ZeroMode::Randomized { trials },
                other => return Err(format!("unknown mode `{other}`")),
            };
            let config = RunConfig {
                degree_cap,
                consequence_attempt_cap: consequence_cap.min(degree_cap),
                zero_degree_cap: zero_cap,
                dim_degree_cap: dim_cap,
                params_max: params,
                mode,
                seed,
                timings,
                jobs,
            };
            let items = catalog::builtin().map_err(|e| e.to_string())?;
            let runner = Runner::new(config);
            let report = runner.run_catalog(&items);
            emit_report(&report, out.as_deref())?;
            Ok(exit_for(&report))
        }
    }
}

fn effective_jobs(cli_jobs: usize) -> usize {
    if cli_jobs > 0 {
        return cli_jobs;
    }
    std::env::var("MALCEV_JOBS")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}

fn emit_report(
    report: &malcev_cli::report::Report,
    out: Option<&std::path::Path>,
) -> Result<(), String> {
    let json = report.to_json();
    match out {
        Some(path) => {
            let mut f = std::fs::File::create(path)
                .map_err(|e| format!("cannot create {}: {e}", path.display()))?;
            f.write_all(json.as_bytes())
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            for item in &report.items {
                println!("{}: {}", item.id, status_str(item.status));
            }
        }
        None => print!("{json}"),
    }
    Ok(())
}

fn status_str(s: malcev_cli::report::Status) -> &'static str {
    match s {
        malcev_cli::report::Status::ProvedConsequence => "proved-consequence",
        malcev_cli::report::Status::VerifiedSubstitutions => "verified-substitutions",
        malcev_cli::report::Status::Failed => "FAILED",
        malcev_cli::report::Status::Skipped => "skipped",
    }
}

fn exit_for(report: &malcev_cli::report::Report) -> ExitCode {
    if report.any_failed() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
