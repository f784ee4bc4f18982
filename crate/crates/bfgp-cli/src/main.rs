//! `bfgp` — synthesize, validate, generate, and encode looping pointer
//! programs from the command line.
//!
//! Exit codes: 0 on success, 1 when a search finds no program or a
//! validation has failures, 2 on usage errors (bad flags, unknown domains,
//! unreadable or malformed files).

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use bfgp::program::encoding::{bit_len, decode, encode};
use bfgp::{
    bfgp as run_search, make_problem, make_validation_set, parse_eval_list, parse_program,
    read_problem_dir, render_csv, render_json, validate, write_problem_dir, Aggregator, DomainId,
    GPProblem, GenParams, PlanningProgram, SearchConfig, SearchOutcome, ValidationMode,
    VALIDATION_BOUND, VALIDATION_SEED,
};

#[derive(Parser)]
#[command(name = "bfgp", version, about = "Best-first synthesis of looping pointer programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a program that solves every instance of a problem set
    Synth(SynthArgs),
    /// Run a program over a validation set and report per-instance results
    Validate(ValidateArgs),
    /// Generate a directory of random instances plus a manifest
    Gen(GenArgs),
    /// Print the fixed-width bit encoding of a program
    Encode(EncodeArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Built-in domain whose training set to solve
    #[arg(long, conflicts_with = "problem")]
    domain: Option<String>,
    /// Problem directory written by `gen` to solve instead
    #[arg(long)]
    problem: Option<PathBuf>,
    /// Program length in lines (default: the domain's known-sufficient length)
    #[arg(long)]
    lines: Option<usize>,
    /// Expected pointer count; the run aborts if the problem disagrees
    #[arg(long)]
    pointers: Option<usize>,
    /// Comma-separated evaluation functions (f1,f2,f3,h4,h5,f6), compared lexicographically
    #[arg(long, default_value = "h5,f1")]
    eval: String,
    /// Keep searching after the first solution and keep the cheapest
    #[arg(long)]
    anytime: bool,
    /// Seed for regenerating the built-in training instances
    #[arg(long, requires = "domain")]
    seed: Option<u64>,
    /// Wall-clock budget in seconds
    #[arg(long)]
    timeout: Option<u64>,
    /// Stop after expanding this many programs
    #[arg(long)]
    node_budget: Option<u64>,
    /// Per-execution step budget (default: scaled to the instance sizes)
    #[arg(long)]
    max_steps: Option<u64>,
    /// Worker threads; results are identical for any count
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Directory for solution.txt, stats.csv, and manifest.json
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    /// Program file (the format written by `synth`)
    #[arg(long)]
    program: PathBuf,
    /// Built-in domain whose validation set to use
    #[arg(long, conflicts_with = "problem")]
    domain: Option<String>,
    /// Use the large validation set instead of the desk-sized one
    #[arg(long, requires = "domain")]
    full: bool,
    /// Seed for regenerating the validation instances
    #[arg(long, requires = "domain")]
    seed: Option<u64>,
    /// Problem directory written by `gen` to validate against instead
    #[arg(long)]
    problem: Option<PathBuf>,
    /// Hash visited states and classify any revisit as an infinite run
    #[arg(long)]
    detect_infinite: bool,
    /// Per-run step budget
    #[arg(long, default_value_t = 10_000_000)]
    max_steps: u64,
    /// Directory for validation.csv and validation.json
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    /// Built-in domain to draw instances from
    #[arg(long)]
    domain: String,
    /// Number of instances to generate
    #[arg(long)]
    count: usize,
    /// Instance size as a single value or an inclusive range, e.g. 6 or 2..21
    /// (default: the domain's training range)
    #[arg(long)]
    sizes: Option<String>,
    /// Seed for the instance generator
    #[arg(long)]
    seed: Option<u64>,
    /// Cap on register values and arithmetic results
    #[arg(long)]
    bound: Option<i64>,
    /// Directory for the .inst files and manifest.json
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct EncodeArgs {
    /// Program file to encode
    #[arg(long)]
    program: PathBuf,
    /// Built-in domain supplying the action table
    #[arg(long)]
    domain: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(args) => cmd_synth(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Encode(args) => cmd_encode(args),
    };
    match result {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

/// What `synth` ran and what it produced; `outputs` maps each written file
/// that has reproducible bytes to its SHA-256. Wall-clock times stay out so
/// that identical configurations serialize identically.
#[derive(Serialize)]
struct RunManifest {
    command: String,
    domain: String,
    problem_dir: Option<String>,
    lines: usize,
    pointer_count: usize,
    eval_fns: Vec<String>,
    aggregator: String,
    seed: Option<u64>,
    node_budget: Option<u64>,
    max_steps: Option<u64>,
    timeout_secs: Option<u64>,
    anytime: bool,
    workers: usize,
    solved: bool,
    expanded: u64,
    evaluated: u64,
    peak_open: usize,
    outputs: BTreeMap<String, String>,
}

fn cmd_synth(args: SynthArgs) -> Result<ExitCode, String> {
    let (problem, domain_name, default_lines) = load_problem_source(
        args.domain.as_deref(),
        args.problem.as_deref(),
        args.seed,
    )?;
    if let Some(k) = args.pointers {
        if k != problem.pointer_count() {
            return Err(format!(
                "--pointers {k} but the problem has {} pointers ({})",
                problem.pointer_count(),
                problem.pointer_names.join(", ")
            ));
        }
    }
    let lines = args.lines.unwrap_or(default_lines);
    if lines < 2 {
        return Err(format!("--lines {lines}: a program needs at least 2 lines"));
    }
    if args.workers == 0 {
        return Err("--workers must be at least 1".to_string());
    }
    let eval_fns = parse_eval_list(&args.eval).map_err(|e| e.to_string())?;
    let config = SearchConfig {
        eval_fns: eval_fns.clone(),
        aggregator: Aggregator::Sum,
        max_steps: args.max_steps,
        node_budget: args.node_budget,
        time_budget: args.timeout.map(Duration::from_secs),
        anytime: args.anytime,
        workers: args.workers,
        check_duplicates: false,
    };

    let outcome = run_search(&problem, lines, &config);
    let stats = outcome.stats();
    let fn_names: Vec<String> = eval_fns.iter().map(|f| f.name().to_string()).collect();

    fs::create_dir_all(&args.out).map_err(|e| format!("{}: {e}", args.out.display()))?;
    let mut outputs = BTreeMap::new();
    let solved = matches!(outcome, SearchOutcome::Solved { .. });
    if let SearchOutcome::Solved { ref program, .. } = outcome {
        let text = program.to_text(&problem.actions);
        let path = args.out.join("solution.txt");
        fs::write(&path, &text).map_err(|e| format!("{}: {e}", path.display()))?;
        outputs.insert("solution.txt".to_string(), sha256_hex(text.as_bytes()));
        print!("{text}");
    }

    append_stats_row(
        &args.out.join("stats.csv"),
        &domain_name,
        lines,
        problem.pointer_count(),
        &fn_names,
        stats.elapsed.as_secs_f64(),
        stats.expanded,
        stats.evaluated,
        stats.peak_open,
    )?;

    let manifest = RunManifest {
        command: "synth".to_string(),
        domain: domain_name.clone(),
        problem_dir: args.problem.as_ref().map(|p| p.display().to_string()),
        lines,
        pointer_count: problem.pointer_count(),
        eval_fns: fn_names,
        aggregator: "sum".to_string(),
        seed: args.seed,
        node_budget: args.node_budget,
        max_steps: args.max_steps,
        timeout_secs: args.timeout,
        anytime: args.anytime,
        workers: args.workers,
        solved,
        expanded: stats.expanded,
        evaluated: stats.evaluated,
        peak_open: stats.peak_open,
        outputs,
    };
    let manifest_path = args.out.join("manifest.json");
    fs::write(
        &manifest_path,
        serde_json::to_string_pretty(&manifest).map_err(|e| e.to_string())?,
    )
    .map_err(|e| format!("{}: {e}", manifest_path.display()))?;

    eprintln!(
        "{domain_name}: {} (expanded {}, evaluated {}, {:.2}s)",
        if solved { "solved" } else { "no solution" },
        stats.expanded,
        stats.evaluated,
        stats.elapsed.as_secs_f64()
    );
    Ok(if solved { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_validate(args: ValidateArgs) -> Result<ExitCode, String> {
    let problem = match (args.domain.as_deref(), args.problem.as_deref()) {
        (Some(name), None) => {
            let domain = DomainId::parse(name).map_err(|e| e.to_string())?;
            let seed = args.seed.unwrap_or(VALIDATION_SEED);
            let instances =
                make_validation_set(name, seed, args.full).map_err(|e| e.to_string())?;
            let pointer_names =
                domain.pointer_names().iter().map(|s| s.to_string()).collect();
            GPProblem::new(instances, domain.actions(), pointer_names, VALIDATION_BOUND)
        }
        (None, Some(dir)) => read_problem_dir(dir).map_err(|e| e.to_string())?.0,
        _ => return Err("exactly one of --domain or --problem is required".to_string()),
    };

    let program = read_program(&args.program, &problem)?;
    let mode = if args.detect_infinite {
        ValidationMode::DetectInfinite
    } else {
        ValidationMode::Fast
    };
    let report = validate(&program, &problem, mode, args.max_steps);

    fs::create_dir_all(&args.out).map_err(|e| format!("{}: {e}", args.out.display()))?;
    let csv_path = args.out.join("validation.csv");
    fs::write(&csv_path, render_csv(&report)).map_err(|e| format!("{}: {e}", csv_path.display()))?;
    let json_path = args.out.join("validation.json");
    fs::write(&json_path, render_json(&report))
        .map_err(|e| format!("{}: {e}", json_path.display()))?;

    println!(
        "solved {}/{} in {:.2}s ({} mode, peak memory estimate {} bytes)",
        report.solved,
        report.rows.len(),
        report.total_duration.as_secs_f64(),
        report.mode.name(),
        report.peak_memory_estimate
    );
    if report.all_solved() {
        Ok(ExitCode::SUCCESS)
    } else {
        let failing = report.failing_labels();
        let shown = failing.iter().take(10).cloned().collect::<Vec<_>>().join(", ");
        let suffix = if failing.len() > 10 {
            format!(", and {} more", failing.len() - 10)
        } else {
            String::new()
        };
        eprintln!("failed: {shown}{suffix}");
        Ok(ExitCode::from(1))
    }
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode, String> {
    let domain = DomainId::parse(&args.domain).map_err(|e| e.to_string())?;
    if args.count == 0 {
        return Err("--count must be at least 1".to_string());
    }
    let mut params = domain.training_params();
    params.count = args.count;
    if let Some(sizes) = &args.sizes {
        let (min, max) = parse_sizes(sizes)?;
        params.min_size = min;
        params.max_size = max;
    }
    if let Some(seed) = args.seed {
        params.seed = seed;
    }
    if let Some(bound) = args.bound {
        if bound <= 0 {
            return Err(format!("--bound {bound}: must be positive"));
        }
        params.arithmetic_bound = bound;
    }
    let problem = make_problem(domain, params).map_err(|e| e.to_string())?;
    let manifest = write_problem_dir(&problem, domain, params, &args.out)
        .map_err(|e| e.to_string())?;
    println!(
        "wrote {} {} instance(s) (sizes {}..{}) to {}",
        manifest.files.len(),
        domain.name(),
        params.min_size,
        params.max_size,
        args.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_encode(args: EncodeArgs) -> Result<ExitCode, String> {
    let domain = DomainId::parse(&args.domain).map_err(|e| e.to_string())?;
    let actions = domain.actions();
    let text = fs::read_to_string(&args.program)
        .map_err(|e| format!("{}: {e}", args.program.display()))?;
    let program = parse_program(&text, &actions)
        .map_err(|e| format!("{}: {e}", args.program.display()))?;
    let encoding = encode(&program, actions.len()).map_err(|e| e.to_string())?;
    let bits: String = encoding.bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
    println!("lines: {}", program.len());
    println!("actions: {}", actions.len());
    println!("bits: {}", bit_len(program.len(), actions.len()));
    println!("{bits}");
    let back = decode(&encoding).map_err(|e| e.to_string())?;
    if back == program {
        println!("round-trip: ok");
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("round-trip: MISMATCH");
        Ok(ExitCode::from(1))
    }
}

/// Resolves `--domain`/`--problem` into a problem set, its display name, and
/// the default program length.
fn load_problem_source(
    domain: Option<&str>,
    problem_dir: Option<&Path>,
    seed: Option<u64>,
) -> Result<(GPProblem, String, usize), String> {
    match (domain, problem_dir) {
        (Some(name), None) => {
            let domain = DomainId::parse(name).map_err(|e| e.to_string())?;
            let mut params: GenParams = domain.training_params();
            if let Some(seed) = seed {
                params.seed = seed;
            }
            let problem = make_problem(domain, params).map_err(|e| e.to_string())?;
            Ok((problem, domain.name().to_string(), domain.default_lines()))
        }
        (None, Some(dir)) => {
            let (problem, manifest) = read_problem_dir(dir).map_err(|e| e.to_string())?;
            let domain = DomainId::parse(&manifest.domain).map_err(|e| e.to_string())?;
            Ok((problem, manifest.domain, domain.default_lines()))
        }
        _ => Err("exactly one of --domain or --problem is required".to_string()),
    }
}

fn read_program(path: &Path, problem: &GPProblem) -> Result<PlanningProgram, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_program(&text, &problem.actions).map_err(|e| format!("{}: {e}", path.display()))
}

/// Parses `--sizes`: either one size or an inclusive range `min..max`.
fn parse_sizes(spec: &str) -> Result<(usize, usize), String> {
    let bad = |detail: &str| format!("--sizes {spec}: {detail}");
    if let Some((lo, hi)) = spec.split_once("..") {
        let hi = hi.strip_prefix('=').unwrap_or(hi);
        let min: usize = lo.trim().parse().map_err(|_| bad("expected a number before `..`"))?;
        let max: usize = hi.trim().parse().map_err(|_| bad("expected a number after `..`"))?;
        if min > max {
            return Err(bad("range is empty"));
        }
        Ok((min, max))
    } else {
        let size: usize = spec.trim().parse().map_err(|_| bad("expected a size or min..max"))?;
        Ok((size, size))
    }
}

#[allow(clippy::too_many_arguments)]
fn append_stats_row(
    path: &Path,
    domain: &str,
    lines: usize,
    pointers: usize,
    fn_names: &[String],
    time_secs: f64,
    expanded: u64,
    evaluated: u64,
    peak_open: usize,
) -> Result<(), String> {
    let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut file = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    if fresh {
        writeln!(file, "domain,n,pointers,fns,time_secs,expanded,evaluated,peak_open")
            .map_err(|e| e.to_string())?;
    }
    writeln!(
        file,
        "{domain},{lines},{pointers},{},{time_secs:.3},{expanded},{evaluated},{peak_open}",
        fn_names.join("+")
    )
    .map_err(|e| e.to_string())?;
    Ok(())
}

fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
