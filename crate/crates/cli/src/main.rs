//! Command-line front end: simulation, verification, and the extremal-gap
//! KS pipeline.
//!
//! Exit codes: 0 on success, 1 on a failed check or runtime error, 2 on
//! usage errors (handled by the argument parser). All randomness flows from
//! `--seed`; `--threads` (or the `KAKUTANI_THREADS` environment variable)
//! changes wall time only, never output.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use kakutani_core::embeddings;
use kakutani_core::harness::{self, Figure1Profile, DEFAULT_SEED};
use kakutani_core::process::{self, WatchConfig};
use kakutani_core::verify::{self, VerifyConfig};
use kakutani_core::{closed_forms, Error, RandomStream};

#[derive(Parser)]
#[command(
    name = "kakutani",
    version,
    about = "Simulate Kakutani's interval-splitting process and verify its limit laws"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct SeedArgs {
    /// Base seed for all randomness (fixed default, never the wall clock).
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args, Clone, Copy)]
struct ThreadArgs {
    /// Worker threads; falls back to KAKUTANI_THREADS, then to all cores.
    #[arg(long)]
    threads: Option<usize>,
}

impl ThreadArgs {
    fn resolve(&self) -> usize {
        self.threads
            .or_else(|| {
                std::env::var("KAKUTANI_THREADS").ok().and_then(|v| v.parse().ok())
            })
            .unwrap_or(0)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Full,
    Ci,
}

impl From<ProfileArg> for Figure1Profile {
    fn from(p: ProfileArg) -> Self {
        match p {
            ProfileArg::Full => Figure1Profile::Full,
            ProfileArg::Ci => Figure1Profile::Ci,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Tsv,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Run one path and print its extremal gaps.
    Simulate {
        /// Number of splits.
        #[arg(long)]
        n: u64,
        /// Stream index (replication id).
        #[arg(long, default_value_t = 0)]
        stream: u64,
        /// Thresholds whose crossing times N_t should be reported.
        #[arg(long, value_delimiter = ',')]
        thresholds: Vec<f64>,
        #[command(flatten)]
        seed: SeedArgs,
    },
    /// Report threshold crossing times N_t, optionally Monte Carlo moments.
    Thresholds {
        /// Threshold values t.
        #[arg(long, value_delimiter = ',', required = true)]
        thresholds: Vec<f64>,
        /// Number of sampled paths (1 = print the single-path times).
        #[arg(long, default_value_t = 1)]
        samples: u64,
        #[command(flatten)]
        seed: SeedArgs,
    },
    /// Run both extremal-gap KS panels and write result files.
    Figure1 {
        #[arg(long, value_enum, default_value_t = ProfileArg::Ci)]
        profile: ProfileArg,
        /// Output directory for JSON/CSV/TSV files.
        #[arg(long, default_value = "figure1-out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::All)]
        format: FormatArg,
        #[command(flatten)]
        seed: SeedArgs,
        #[command(flatten)]
        threads: ThreadArgs,
    },
    /// Run the full property suite; exit 0 iff every check passes.
    Verify {
        /// Cut Monte Carlo budgets roughly tenfold.
        #[arg(long)]
        quick: bool,
        #[command(flatten)]
        seed: SeedArgs,
        #[command(flatten)]
        threads: ThreadArgs,
    },
    /// Print the closed-form moment functions mu, v, w.
    Moments {
        /// Thresholds to tabulate (defaults to a standard spread).
        #[arg(long, value_delimiter = ',')]
        t: Vec<f64>,
    },
    /// Sample the branching, parking, and branching-random-walk embeddings.
    Embeddings {
        /// Population horizon tau.
        #[arg(long, default_value_t = std::f64::consts::LN_2)]
        tau: f64,
        /// Kerb length x for the parking count.
        #[arg(long, default_value_t = 2.0)]
        kerb: f64,
        /// Branching events for the walk extremes.
        #[arg(long, default_value_t = 400)]
        n: u64,
        /// Samples of each quantity.
        #[arg(long, default_value_t = 5)]
        samples: u64,
        #[command(flatten)]
        seed: SeedArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Simulate { n, stream, thresholds, seed } => {
            let mut rng = RandomStream::new(seed.seed, stream);
            let watch = WatchConfig { thresholds: thresholds.clone(), ..WatchConfig::default() };
            let obs = process::run(n, &mut rng, &watch)?;
            println!("n = {}", obs.n_final);
            println!("M_n = {:.12e}", obs.max_final);
            println!("m_n = {:.12e}", obs.min_final);
            for (t, nt) in &obs.threshold_times {
                match nt {
                    Some(step) => println!("N_{} = {}", t, step),
                    None => println!("N_{} = not crossed by step {}", t, obs.n_final),
                }
            }
            Ok(true)
        }
        Command::Thresholds { thresholds, samples, seed } => {
            if samples <= 1 {
                let mut rng = RandomStream::new(seed.seed, 0);
                let result = embeddings::threshold_times(&thresholds, &mut rng)?;
                for (t, n) in result.thresholds.iter().zip(result.times.iter()) {
                    println!("N_{} = {}", t, n);
                }
            } else {
                let mut sorted = thresholds.clone();
                sorted.sort_by(|a, b| a.total_cmp(b));
                let mut sums = vec![0.0f64; sorted.len()];
                let mut sq_sums = vec![0.0f64; sorted.len()];
                for i in 0..samples {
                    let mut rng = RandomStream::new(seed.seed, i);
                    let result = embeddings::threshold_times(&sorted, &mut rng)?;
                    for (j, &n) in result.times.iter().enumerate() {
                        sums[j] += n as f64;
                        sq_sums[j] += (n as f64) * (n as f64);
                    }
                }
                println!("{:>10} {:>12} {:>12} {:>12} {:>12}", "t", "mean N_t", "mu(t)", "var N_t", "v(t)");
                for (j, &t) in sorted.iter().enumerate() {
                    let mean = sums[j] / samples as f64;
                    let var = sq_sums[j] / samples as f64 - mean * mean;
                    println!(
                        "{:>10} {:>12.4} {:>12.4} {:>12.4} {:>12.4}",
                        t,
                        mean,
                        closed_forms::mu(t)?,
                        var,
                        closed_forms::v(t)?
                    );
                }
            }
            Ok(true)
        }
        Command::Figure1 { profile, out, format, seed, threads } => {
            let profile: Figure1Profile = profile.into();
            let output = harness::run_figure1(profile, seed.seed, threads.resolve())?;
            fs::create_dir_all(&out).map_err(|e| Error::Config(e.to_string()))?;
            let write = |name: &str, contents: &str| -> Result<(), Error> {
                fs::write(out.join(name), contents).map_err(|e| Error::Config(e.to_string()))
            };
            if matches!(format, FormatArg::Json | FormatArg::All) {
                write("figure1_left.json", &harness::to_json(&output.left))?;
                write("figure1_right.json", &harness::to_json(&output.right))?;
            }
            if matches!(format, FormatArg::Csv | FormatArg::All) {
                write("figure1.csv", &harness::to_csv(&[&output.left, &output.right]))?;
            }
            if matches!(format, FormatArg::Tsv | FormatArg::All) {
                write("figure1_left.tsv", &harness::to_tsv(&output.left))?;
                write("figure1_right.tsv", &harness::to_tsv(&output.right))?;
            }
            for (panel, result) in [("left", &output.left), ("right", &output.right)] {
                let fit = result.fit.as_ref().expect("three sizes");
                println!(
                    "{} panel ({}): slope = {:.4}, intercept = {:.4}, mean log KS = {:?}",
                    panel,
                    result.statistic,
                    fit.slope,
                    fit.intercept,
                    result
                        .per_size
                        .iter()
                        .map(|r| (r.mean_log_ks * 1e4).round() / 1e4)
                        .collect::<Vec<_>>()
                );
            }
            println!("wall time: {:.1} s; files in {}", output.left.metadata.wall_time_secs, out.display());
            Ok(true)
        }
        Command::Verify { quick, seed, threads } => {
            let cfg = VerifyConfig { seed: seed.seed, threads: threads.resolve(), quick };
            let results = verify::run_all(&cfg);
            let mut all_passed = true;
            let mut group: &str = "";
            for check in &results {
                if check.group != group {
                    group = check.group;
                    println!("== {}", group);
                }
                let tag = if check.passed { "[PASS]" } else { "[FAIL]" };
                if check.detail.is_empty() {
                    println!("{} {}", tag, check.name);
                } else {
                    println!("{} {} ({})", tag, check.name, check.detail);
                }
                all_passed &= check.passed;
            }
            let failed: Vec<&str> =
                results.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
            if all_passed {
                println!("verify: all {} checks passed", results.len());
            } else {
                println!("verify: FAILED: {}", failed.join("; "));
            }
            Ok(all_passed)
        }
        Command::Moments { t } => {
            let ts = if t.is_empty() {
                vec![0.9, 0.75, 0.6, 0.5, 0.25, 0.1, 0.05, 0.01]
            } else {
                t
            };
            println!("{:>10} {:>14} {:>14} {:>14}", "t", "mu(t)", "v(t)", "w(t)");
            for t in ts {
                println!(
                    "{:>10} {:>14.8} {:>14.8} {:>14.8}",
                    t,
                    closed_forms::mu(t)?,
                    closed_forms::v(t)?,
                    closed_forms::w(t)
                );
            }
            Ok(true)
        }
        Command::Embeddings { tau, kerb, n, samples, seed } => {
            println!("population counts T_tau at tau = {} (= N_t at t = {:.6}):", tau, (-tau).exp());
            for i in 0..samples {
                let mut rng = RandomStream::new(seed.seed, i);
                print!(" {}", embeddings::cmj_population(tau, &mut rng)?);
            }
            println!();
            println!("parking counts P_0,x at kerb x = {} (= N_t at t = {:.6}):", kerb, 1.0 / kerb);
            for i in 0..samples {
                let mut rng = RandomStream::new(seed.seed, i);
                print!(" {}", embeddings::parking_count(kerb, &mut rng)?);
            }
            println!();
            println!("walk extremes (l_n, r_n) at n = {}:", n);
            for i in 0..samples {
                let mut rng = RandomStream::new(seed.seed, i);
                let (l, r) = embeddings::brw_extremes(n, &mut rng)?;
                println!(" ({:.6}, {:.6})", l, r);
            }
            Ok(true)
        }
    }
}
