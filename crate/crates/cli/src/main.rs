use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::Parser;
use golodlab_cli::run::report_exit_code;
use golodlab_cli::{emit, run, CliError, Command, Format, ProblemSpec, Report, RunOptions};

/// Golod verdicts and transfer-theorem checks for graded rings and modules.
#[derive(Parser, Debug)]
#[command(name = "golodlab", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// A spec file, or a directory whose *.json files are all run.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Homological cap H.
    #[arg(long)]
    max_h: Option<usize>,
    /// Internal degree cap D.
    #[arg(long)]
    max_d: Option<usize>,
    /// `q` or `p:PRIME`; overrides the spec.
    #[arg(long)]
    field: Option<String>,
    /// Worker threads for corpus directories and resolutions.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Skip the Jacobian certificates.
    #[arg(long)]
    no_certify: bool,
    /// Leave `elapsed_ms` out so reruns are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

fn load(path: &Path) -> Result<ProblemSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    ProblemSpec::from_json(&text)
}

fn inputs(path: &Path) -> Result<Vec<PathBuf>, CliError> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let dir = std::fs::read_dir(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut files: Vec<PathBuf> =
        dir.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.extension().is_some_and(|x| x == "json")).collect();
    files.sort();
    Ok(files)
}

fn diagnose(path: &Path, err: &CliError) {
    eprintln!("error: {}: {err}", path.display());
    if err.exit_code() == 4 {
        eprintln!("--- diagnostic dump ---");
        eprintln!("input: {}", path.display());
        eprintln!("error: {err:?}");
        if let Ok(text) = std::fs::read_to_string(path) {
            eprintln!("spec:\n{text}");
        }
        eprintln!("--- end of dump ---");
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let opts = RunOptions {
        max_h: args.max_h,
        max_d: args.max_d,
        field: args.field.clone(),
        jobs: args.jobs.max(1),
        certify: !args.no_certify,
        timing: !args.no_timing,
    };
    let files = match inputs(&args.input) {
        Ok(f) => f,
        Err(e) => {
            diagnose(&args.input, &e);
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let single = !args.input.is_dir();
    let results: Vec<Mutex<Option<Result<Report, CliError>>>> = files.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = if single { 1 } else { opts.jobs.min(files.len()).max(1) };
    // within a corpus the parallelism is across files
    let per_file = RunOptions { jobs: if single { opts.jobs } else { 1 }, ..opts.clone() };
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= files.len() {
                    break;
                }
                let r = load(&files[i]).and_then(|spec| run(args.command, &spec, &per_file));
                *results[i].lock().expect("no worker panics") = Some(r);
            });
        }
    });

    let mut code = 0;
    let mut reports = Vec::new();
    for (path, slot) in files.iter().zip(results) {
        match slot.into_inner().expect("no worker panics").expect("every file was run") {
            Ok(r) => {
                let c = report_exit_code(&r);
                if c != 0 {
                    eprintln!("error: {}: theorem violated", path.display());
                }
                code = code.max(c);
                reports.push(r);
            }
            Err(e) => {
                diagnose(path, &e);
                code = code.max(e.exit_code());
            }
        }
    }
    match (single, args.format) {
        (true, f) => {
            if let Some(r) = reports.first() {
                print!("{}", emit(r, f));
            }
        }
        (false, Format::Json) => {
            let mut s = serde_json::to_string_pretty(&reports).expect("reports serialize");
            s.push('\n');
            print!("{s}");
        }
        (false, Format::Text) => {
            for r in &reports {
                print!("{}", emit(r, Format::Text));
                println!();
            }
        }
    }
    ExitCode::from(code as u8)
}
