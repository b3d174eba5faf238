//! Command execution. Exit codes: 0 success, 1 runtime failure, 2 when the
//! run succeeded but a validation boolean failed, 64 for bad invocations.

use std::path::{Path, PathBuf};

use domainwall::solver::MAX_EPS;
use domainwall::validate::rate_study_detailed;
use domainwall::{
    analytic_spectrum, default_reduced_mesh, solve_heteroclinic, solve_reduced, validate_profile,
};

use crate::config::{
    Cli, Command, Format, ReducedArgs, SolveArgs, SpectrumArgs, SweepArgs, ValidateArgs,
};
use crate::error::CliError;
use crate::io;

/// Environment variable naming the directory that relative output paths
/// resolve against.
pub const OUT_DIR_ENV: &str = "DOMAINWALL_OUT_DIR";

pub fn execute(cli: Cli) -> i32 {
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Solve(args) => solve_cmd(args),
        Command::Reduced(args) => reduced_cmd(args),
        Command::Validate(args) => validate_cmd(args),
        Command::Sweep(args) => sweep_cmd(args),
        Command::Spectrum(args) => spectrum_cmd(args),
    }
}

/// Resolve a relative path against `DOMAINWALL_OUT_DIR` (absolute paths and
/// unset environments pass through).
fn resolve(path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) => PathBuf::from(dir).join(path),
        None => path.to_path_buf(),
    }
}

fn default_name(stem: &str, format: Format) -> PathBuf {
    PathBuf::from(match format {
        Format::Csv => format!("{stem}.csv"),
        Format::Json => format!("{stem}.json"),
    })
}

fn solve_cmd(args: SolveArgs) -> Result<i32, CliError> {
    let params = args.strength.to_params(args.lambda)?;
    let config = args.solver.to_config(args.lambda)?;
    let profile = solve_heteroclinic(&params, &config)?;
    let report = validate_profile(&profile)?;

    let out = resolve(&args.out.unwrap_or_else(|| default_name("profile", args.format)));
    io::save_profile(&out, &profile, args.format)?;
    let report_path = resolve(&args.report.unwrap_or_else(|| PathBuf::from("report.json")));
    let document = io::ReportDocument::new(&profile, report.clone());
    io::save_json(&report_path, &document)?;

    if report.shape_ok() {
        Ok(0)
    } else {
        eprintln!("validation failed: a shape check is false in {}", report_path.display());
        Ok(2)
    }
}

fn reduced_cmd(args: ReducedArgs) -> Result<i32, CliError> {
    if !(args.lambda.is_finite() && args.lambda >= 1.0) {
        return Err(CliError::Usage(format!(
            "--lambda must be finite and >= 1, got {}",
            args.lambda
        )));
    }
    let (default_half, default_n) = default_reduced_mesh(args.lambda);
    let half_length = args.half_length.unwrap_or(default_half);
    let n = args.nodes.unwrap_or(default_n);
    let reduced = solve_reduced(args.lambda, half_length, n)?;
    let out = resolve(&args.out.unwrap_or_else(|| default_name("reduced", args.format)));
    io::save_reduced(&out, &reduced, args.format)?;
    Ok(0)
}

fn validate_cmd(args: ValidateArgs) -> Result<i32, CliError> {
    let profile = io::load_profile(&resolve(&args.input))?;
    let report = validate_profile(&profile)?;
    let ok = report.shape_ok();
    let document = io::ReportDocument::new(&profile, report);
    match args.report {
        Some(path) => io::save_json(&resolve(&path), &document)?,
        None => print!("{}", io::render_json(&document)?),
    }
    Ok(if ok { 0 } else { 2 })
}

fn sweep_cmd(args: SweepArgs) -> Result<i32, CliError> {
    if args.eps_list.is_empty() {
        return Err(CliError::Usage("--eps-list must not be empty".into()));
    }
    if args.eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(CliError::Usage(
            "--eps-list must be strictly decreasing".into(),
        ));
    }
    if args.eps_list.iter().any(|&e| !(0.0..=MAX_EPS).contains(&e) || e == 0.0) {
        return Err(CliError::Usage(format!(
            "--eps-list entries must lie in (0, {MAX_EPS}]"
        )));
    }
    let config = args.solver.to_config(args.lambda)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.workers)
        .build()
        .map_err(|e| CliError::Usage(format!("could not build worker pool: {e}")))?;
    let (study, profiles) =
        pool.install(|| rate_study_detailed(args.lambda, &args.eps_list, &config))?;

    // One collector writes every file, in ladder order.
    let mut names = Vec::with_capacity(profiles.len());
    for (eps, profile) in args.eps_list.iter().zip(&profiles) {
        let name = PathBuf::from(format!("profile_eps_{eps}.csv"));
        io::save_profile(&resolve(&args.out_dir.join(&name)), profile, Format::Csv)?;
        names.push(name);
    }
    let document = io::StudyDocument {
        study,
        profiles: names,
    };
    io::save_json(&resolve(&args.out_dir.join("study.json")), &document)?;
    Ok(0)
}

fn spectrum_cmd(args: SpectrumArgs) -> Result<i32, CliError> {
    if !(args.lambda.is_finite() && args.lambda >= 1.0) {
        return Err(CliError::Usage(format!(
            "--lambda must be finite and >= 1, got {}",
            args.lambda
        )));
    }
    let params = args.strength.to_params(args.lambda)?;
    let spec = analytic_spectrum(args.side.into(), &params);
    let document = io::SpectrumDocument {
        lambda: params.lambda(),
        coupling: params.coupling(),
        eps: params.eps(),
        spec,
    };
    match args.out {
        Some(path) => io::save_json(&resolve(&path), &document)?,
        None => print!("{}", io::render_json(&document)?),
    }
    Ok(0)
}
