//! Command-line driver: analyze configuration files, build gallery
//! entries, run searches, and self-test.
//!
//! Exit codes: 0 success, 2 validation or input failure, 3 consistency
//! alerts (an engine-bug signal), 4 resource-bound refusal.

use clap::{Parser, Subcommand, ValueEnum};
use covertori::config::ConfigFile;
use covertori::error::Error;
use covertori::gallery;
use covertori::report::{self, AnalysisReport};
use covertori::search::{self, Predicate, SearchSpec};
use covertori::verdicts::ApplicabilityMode;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "covertori", version, about = "Exact calculator for abelian covers of products of elliptic curves: pushforwards, Hodge diamonds, vanishing loci, and cohomology-torus verdicts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// Gate theorem applicability on the certified cohomology-torus
    /// verdict plus the general-type proxy.
    Rct,
    /// Gate on chi(omega) = 0 plus the general-type proxy.
    Chi0,
}

impl From<Mode> for ApplicabilityMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Rct => ApplicabilityMode::Rct,
            Mode::Chi0 => ApplicabilityMode::Chi0,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Config,
    Report,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a configuration file and print the report.
    Analyze {
        /// Path to a JSON configuration ("-" for stdin).
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
        report: ReportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Mode::Chi0)]
        mode: Mode,
    },
    /// Build a named example construction.
    Gallery {
        #[arg(long)]
        name: Option<String>,
        /// JSON object of builder parameters.
        #[arg(long, default_value = "{}")]
        params: String,
        #[arg(long, value_enum, default_value_t = Emit::Report)]
        emit: Emit,
        #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
        report: ReportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
        /// List the available entries and exit.
        #[arg(long)]
        list: bool,
    },
    /// Enumerate a configuration space and emit certificates as JSONL.
    Search {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = default_jobs())]
        jobs: usize,
        /// Collapse configurations equivalent under factor permutations
        /// and group automorphisms.
        #[arg(long, value_parser = parse_on_off, default_value = "off")]
        symmetry: bool,
    },
    /// Run the gallery goldens and the exhaustive small-space sweeps.
    Selftest {
        #[arg(long, default_value_t = default_jobs())]
        jobs: usize,
        /// Skip the exhaustive sweeps (reported as skipped, never as
        /// passed).
        #[arg(long)]
        quick: bool,
    },
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn parse_on_off(s: &str) -> Result<bool, String> {
    match s {
        "on" => Ok(true),
        "off" => Ok(false),
        _ => Err("expected on or off".into()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Resource(_) => ExitCode::from(4),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn write_out(out: &Option<PathBuf>, content: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| Error::malformed(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .map_err(|e| Error::malformed(format!("cannot write stdout: {e}")))
        }
    }
}

fn render(report: &AnalysisReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = report.to_json();
            s.push('\n');
            s
        }
        ReportFormat::Text => report.to_text(),
    }
}

fn report_exit(report: &AnalysisReport) -> ExitCode {
    if !report.validation.valid {
        ExitCode::from(2)
    } else if !report.alerts.is_empty() {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Analyze { input, report: format, out, mode } => {
            let text = if input.as_os_str() == "-" {
                std::io::read_to_string(std::io::stdin())
                    .map_err(|e| Error::malformed(format!("cannot read stdin: {e}")))?
            } else {
                std::fs::read_to_string(&input)
                    .map_err(|e| Error::malformed(format!("cannot read {}: {e}", input.display())))?
            };
            let file = ConfigFile::from_json(&text)?;
            let report = report::analyze(&file, mode.into())?;
            write_out(&out, &render(&report, format))?;
            Ok(report_exit(&report))
        }
        Command::Gallery { name, params, emit, report: format, out, list } => {
            if list {
                let mut s = String::new();
                for entry in gallery::ENTRY_NAMES {
                    s.push_str(entry);
                    s.push('\n');
                }
                write_out(&out, &s)?;
                return Ok(ExitCode::SUCCESS);
            }
            let name = name.ok_or_else(|| Error::malformed("--name is required"))?;
            let params: serde_json::Value = serde_json::from_str(&params)
                .map_err(|e| Error::malformed(format!("--params is not valid JSON: {e}")))?;
            match emit {
                Emit::Config => {
                    let config = gallery::build(&name, &params)?;
                    let file = ConfigFile::from_configuration(&config);
                    let mut s = file.to_json();
                    s.push('\n');
                    write_out(&out, &s)?;
                    Ok(ExitCode::SUCCESS)
                }
                Emit::Report => {
                    let report = gallery::analyze_entry(&name, &params)?;
                    write_out(&out, &render(&report, format))?;
                    Ok(report_exit(&report))
                }
            }
        }
        Command::Search { spec, out, jobs, symmetry } => {
            let text = std::fs::read_to_string(&spec)
                .map_err(|e| Error::malformed(format!("cannot read {}: {e}", spec.display())))?;
            let mut spec = SearchSpec::from_json(&text)?;
            spec.symmetry = symmetry || spec.symmetry;
            let output = search::run_search(&spec, jobs)?;
            let mut content = output.lines.join("\n");
            content.push('\n');
            write_out(&out, &content)?;
            eprintln!(
                "space {} analyzed {} emitted {}",
                output.stats.space, output.stats.analyzed, output.stats.emitted
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Selftest { jobs, quick } => selftest(jobs, quick),
    }
}

fn selftest(jobs: usize, quick: bool) -> Result<ExitCode, Error> {
    let mut failures = 0usize;
    println!("gallery goldens:");
    for name in gallery::ENTRY_NAMES {
        match gallery::golden_check(name, &serde_json::json!({})) {
            Ok(diffs) if diffs.is_empty() => println!("  {name}: pass"),
            Ok(diffs) => {
                failures += 1;
                println!("  {name}: FAIL");
                for d in diffs {
                    println!("    {}: expected {}, got {}", d.field, d.expected, d.got);
                }
            }
            Err(e) => {
                failures += 1;
                println!("  {name}: ERROR {e}");
            }
        }
    }
    // extra golden: the prime family scales
    for p in [3u64, 5] {
        match gallery::golden_check("chi0_p2", &serde_json::json!({ "p": p })) {
            Ok(diffs) if diffs.is_empty() => println!("  chi0_p2(p={p}): pass"),
            Ok(diffs) => {
                failures += 1;
                println!("  chi0_p2(p={p}): FAIL ({} diffs)", diffs.len());
            }
            Err(e) => {
                failures += 1;
                println!("  chi0_p2(p={p}): ERROR {e}");
            }
        }
    }

    if quick {
        println!("exhaustive sweeps: skipped (--quick)");
        return Ok(if failures == 0 { ExitCode::SUCCESS } else { ExitCode::from(3) });
    }

    println!("exhaustive sweeps:");
    let mut specs = search::small_space_specs(3, vec![Predicate::AnyInvariantViolated]);
    specs.push(search::four_factor_z2_spec(vec![Predicate::AnyInvariantViolated]));
    let mut total_analyzed = 0u64;
    let mut total_violations = 0u64;
    for (i, spec) in specs.iter().enumerate() {
        let out = search::run_search(spec, jobs)?;
        total_analyzed += out.stats.analyzed;
        if out.stats.emitted > 0 {
            failures += 1;
            total_violations += out.stats.emitted;
            println!("  space {i}: {} violations", out.stats.emitted);
        }
    }
    println!(
        "  swept {total_analyzed} configurations across {} spaces, {total_violations} violations",
        specs.len()
    );
    if failures == 0 {
        println!("selftest: all pass");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("selftest: {failures} FAILURES");
        Ok(ExitCode::from(3))
    }
}
