use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qmi::config::{Method, Overrides};
use qmi::output::{emit_dat_file, read_summary_json, write_run_outputs};
use qmi::run::{run_batch, summarize};
use qmi::verify::{export_fixtures, run_suites, FixtureSource, SUITES};

const EXIT_CONFIG: u8 = 1;
const EXIT_VERIFY: u8 = 2;

#[derive(Parser)]
#[command(name = "qmi", version = concat!(env!("CARGO_PKG_VERSION"), " (", env!("QMI_GIT_DESCRIBE"), ")"))]
#[command(about = "Maximize S(A) - S(B) over bipartite unitaries on random tripartite pure states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the seeded method comparison and write records, summary and .dat files.
    Run(RunArgs),
    /// Check the library against the bundled fixtures.
    Verify {
        /// Run only this suite.
        #[arg(long)]
        suite: Option<String>,
        /// Read `<suite>.kv` fixture files from this directory.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        /// Write the bundled fixtures to this directory and exit.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Re-emit a two-column .dat file from a stored summary.json.
    Emit {
        summary: PathBuf,
        /// x column: state_index, s_c, s_ab, rank_c, relative_error, perm, or a method name.
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, short)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// key = value config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// d_A = d_B = d.
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    da: Option<usize>,
    #[arg(long)]
    db: Option<usize>,
    #[arg(long)]
    dc: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated subset of theorem1, exhaustive, closed_form_d2, rgnp, adam.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<Method>>,
    /// Generate states with this rank of rho_C.
    #[arg(long)]
    rank_c: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    adam_lr: Option<f64>,
    #[arg(long)]
    adam_max_iters: Option<usize>,
    #[arg(long)]
    adam_restarts: Option<usize>,
    #[arg(long)]
    adam_tol: Option<f64>,
    #[arg(long)]
    adam_patience: Option<usize>,
    /// Suppress per-state progress on stderr.
    #[arg(long, short)]
    quiet: bool,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            d: self.d,
            d_a: self.da,
            d_b: self.db,
            d_c: self.dc,
            n_states: self.n,
            seed: self.seed,
            methods: self.methods.as_ref().map(|ms| {
                let mut out: Vec<Method> = Vec::new();
                for m in ms {
                    if !out.contains(m) {
                        out.push(*m);
                    }
                }
                out
            }),
            rank_c: self.rank_c,
            out_dir: self.out_dir.clone(),
            adam_lr: self.adam_lr,
            adam_max_iters: self.adam_max_iters,
            adam_restarts: self.adam_restarts,
            adam_tol: self.adam_tol,
            adam_patience: self.adam_patience,
        }
    }
}

fn cmd_run(args: &RunArgs) -> Result<(), (u8, String)> {
    let config_err = |e: qmi::config::ConfigError| (EXIT_CONFIG, e.to_string());
    let base = match &args.config {
        Some(p) => Overrides::from_file(p).map_err(config_err)?,
        None => Overrides::default(),
    };
    let cfg = base.merged(&args.overrides()).resolve().map_err(config_err)?;
    let quiet = args.quiet;
    let records = run_batch(&cfg, |i, r| {
        if !quiet {
            let rel = r.relative_error.map(|x| format!(" rel_err {x:.3e}")).unwrap_or_default();
            eprintln!("state {}/{}: s_c {:.6}{rel}", i + 1, cfg.n_states, r.s_c);
        }
    });
    let summary = summarize(&cfg, records);
    write_run_outputs(&summary, &cfg.out_dir).map_err(|e| (EXIT_CONFIG, e.to_string()))?;
    for m in &summary.methods {
        match m.delta_s {
            Some(s) => println!("{:<15} n={:<4} mean {:.6} min {:.6} max {:.6}", m.method.name(), s.count, s.mean, s.min, s.max),
            None => println!("{:<15} no values", m.method.name()),
        }
    }
    if let Some(s) = summary.relative_error.signed {
        println!(
            "relative error  n={:<4} mean {:.4e} min {:.4e} max {:.4e} (flagged {})",
            s.count, s.mean, s.min, s.max, summary.relative_error.flagged
        );
    }
    println!("ceiling violations: {}", summary.ceiling_violations);
    println!("wrote {}", cfg.out_dir.display());
    Ok(())
}

fn cmd_verify(suite: Option<&str>, fixtures: Option<PathBuf>) -> Result<(), (u8, String)> {
    if let Some(s) = suite {
        if !SUITES.contains(&s) {
            return Err((EXIT_CONFIG, format!("unknown suite `{s}` (available: {})", SUITES.join(", "))));
        }
    }
    let source = fixtures.map(FixtureSource::Dir).unwrap_or_default();
    let report = run_suites(&source, suite);
    print!("{}", report.render());
    if report.all_passed() {
        Ok(())
    } else {
        Err((EXIT_VERIFY, "verification failures present".into()))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Run(args) => cmd_run(&args),
        Command::Verify { export: Some(dir), .. } => {
            export_fixtures(&dir).map_err(|e| (EXIT_CONFIG, format!("{}: {e}", dir.display())))
        }
        Command::Verify { suite, fixtures, .. } => cmd_verify(suite.as_deref(), fixtures),
        Command::Emit { summary, x, y, out } => read_summary_json(&summary)
            .and_then(|s| emit_dat_file(&s.records, &x, &y, &out))
            .map(|n| eprintln!("wrote {n} lines to {}", out.display()))
            .map_err(|e| (EXIT_CONFIG, e.to_string())),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
