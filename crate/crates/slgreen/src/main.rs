//! Batch front-end: read a coefficient spec, run the pipeline, emit
//! reports and plot-ready CSV.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use slgreen::coeff::{build_weight_field, load_spec, WeightField, Window};
use slgreen::criteria::{self, Verdict};
use slgreen::error::Error;
use slgreen::fss::compute_fss;
use slgreen::geometry::{self, HEval, SEARCH_RADIUS_FACTOR};
use slgreen::report;
use slgreen::{hardy, spectral, verify};

#[derive(Parser)]
#[command(
    name = "slgreen",
    about = "Sturm-Liouville solvability and resolvent-compactness toolkit",
    version,
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Coefficient spec file (key=value format)
    #[arg(long)]
    spec: PathBuf,
    /// Window half-width X
    #[arg(long, default_value_t = 20.0)]
    window: f64,
    /// Sample count on [-X, X]
    #[arg(long, default_value_t = 401)]
    samples: usize,
    /// Seed for randomized probe points
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output directory for report files
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full solvability/compactness pipeline
    Analyze {
        #[command(flatten)]
        common: CommonOpts,
        /// Output format for stdout
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Verdict matrix for the exponential family over sign classes
    Table {
        /// Comma-separated alpha values
        #[arg(long, default_value = "-1,0,1")]
        alphas: String,
        /// Comma-separated beta values
        #[arg(long, default_value = "-1,0,1")]
        betas: String,
        #[arg(long, default_value_t = 30.0)]
        window: f64,
        #[arg(long, default_value_t = 601)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Chain of kappa-balls tiling the window
    Covering {
        #[command(flatten)]
        common: CommonOpts,
        /// Chain origin
        #[arg(long, default_value_t = 0.0)]
        x: f64,
        /// Which length function drives the half-widths: d or s
        #[arg(long, default_value = "d")]
        kind: String,
    },
    /// Top eigenvalues of the discretized Green operator (p = 2)
    Spectrum {
        #[command(flatten)]
        common: CommonOpts,
        /// Discretization size
        #[arg(long, default_value_t = 512)]
        n: usize,
        /// How many eigenvalues to report
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
    /// Run the full invariant suite and exit nonzero on any violation
    Verify {
        #[command(flatten)]
        common: CommonOpts,
        /// Exponent for the operator-norm checks
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Discretization size for the operator checks
        #[arg(long, default_value_t = 256)]
        n: usize,
    },
}

fn log_enabled() -> bool {
    std::env::var_os("SRT_LOG").is_some()
}

fn load_field(common: &CommonOpts) -> Result<(WeightField, Window), Error> {
    let spec = load_spec(&common.spec)?;
    if log_enabled() {
        eprintln!(
            "slgreen: loaded {} spec from {}",
            spec.kind_name(),
            common.spec.display()
        );
    }
    let field = build_weight_field(spec)?;
    let window = Window::new(common.window, common.samples)?;
    Ok((field, window))
}

fn write_out(dir: &Option<PathBuf>, name: &str, content: &str) -> Result<(), Error> {
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(name), content)?;
    }
    Ok(())
}

fn cmd_analyze(common: &CommonOpts, format: &str) -> Result<u8, Error> {
    let (field, window) = load_field(common)?;
    let out = criteria::analyze(&field, &window)?;
    let rep = report::AnalyzeReport {
        kind: field.spec().kind_name(),
        window,
        hypotheses: &out.hypotheses,
        criteria: &out.report,
    };
    match format {
        "csv" => print!(
            "{}",
            report::criteria_samples_csv(&out.aux, out.fss.as_ref(), &field)
        ),
        _ => print!("{}", report::to_json(&rep)),
    }
    write_out(&common.out, "report.json", &report::to_json(&rep))?;
    write_out(
        &common.out,
        "aux_profile.csv",
        &report::aux_profile_csv(&out.aux),
    )?;
    if let Some(fss) = &out.fss {
        write_out(&common.out, "fss.csv", &report::fss_csv(fss))?;
    }
    if out.report.solvable == Verdict::Inconclusive
        || out.report.compact == Verdict::Inconclusive
    {
        return Ok(2);
    }
    Ok(0)
}

fn parse_list(text: &str) -> Result<Vec<f64>, Error> {
    let vals: Result<Vec<f64>, _> = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<f64>())
        .collect();
    let vals = vals.map_err(|e| Error::ConfigParse(format!("bad list {text:?}: {e}")))?;
    if vals.is_empty() {
        return Err(Error::ConfigParse("empty value list".into()));
    }
    Ok(vals)
}

fn cmd_table(
    alphas: &str,
    betas: &str,
    window: f64,
    samples: usize,
    out: &Option<PathBuf>,
) -> Result<u8, Error> {
    let alphas = parse_list(alphas)?;
    let betas = parse_list(betas)?;
    let window = Window::new(window, samples)?;
    let table = criteria::exponential_table(&alphas, &betas, &window);
    print!("{}", report::to_json(&table));
    write_out(out, "table.json", &report::to_json(&table))?;
    if table.all_match {
        Ok(0)
    } else {
        Ok(1)
    }
}

fn cmd_covering(common: &CommonOpts, x: f64, kind: &str) -> Result<u8, Error> {
    let (field, window) = load_field(common)?;
    let max_radius = SEARCH_RADIUS_FACTOR * window.half_width;
    let covering = match kind {
        "d" => {
            let h_eval = HEval::new(&field, max_radius);
            let kappa = |t: f64| geometry::solve_d(&field, &h_eval, t, max_radius);
            geometry::build_covering(&kappa, x, &window, "d")?
        }
        "s" => {
            let fss = compute_fss(&field, &window)?;
            let log_rho = |t: f64| fss.log_rho_at(t);
            let kappa = |t: f64| geometry::solve_s(&field, &log_rho, t, max_radius);
            geometry::build_covering(&kappa, x, &window, "s")?
        }
        other => {
            return Err(Error::ConfigParse(format!(
                "kind must be d or s, got {other:?}"
            )))
        }
    };
    let csv = report::covering_csv(&covering);
    print!("{csv}");
    write_out(&common.out, "covering.csv", &csv)?;
    Ok(0)
}

fn cmd_spectrum(common: &CommonOpts, n: usize, top: usize) -> Result<u8, Error> {
    let (field, window) = load_field(common)?;
    let fss = compute_fss(&field, &window)?;
    let mut rep = spectral::eigen_top(&fss, &window, n, top)?;
    // attach the window supremum of h d when that route has roots
    let aux = geometry::compute_aux_profile(&field, &window, None);
    let b = aux
        .h
        .iter()
        .zip(aux.d.iter())
        .filter_map(|(h, d)| h.and_then(|h| d.map(|d| h * d)))
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))));
    if let Some(b) = b {
        spectral::check_eigen_vs_b(&mut rep, b);
    }
    print!("{}", report::to_json(&rep));
    write_out(
        &common.out,
        "spectrum.csv",
        &report::spectrum_csv(&rep.eigenvalues),
    )?;
    let norms = hardy::split_operator_norms(&fss, &field, 2.0, &window, n.min(512))?;
    write_out(&common.out, "norms.json", &report::to_json(&norms))?;
    Ok(0)
}

fn cmd_verify(common: &CommonOpts, p: f64, n: usize) -> Result<u8, Error> {
    let (field, window) = load_field(common)?;
    let rep = verify::run(&field, &window, common.seed, p, n)?;
    for check in &rep.checks {
        let status = if check.pass { "ok  " } else { "FAIL" };
        if check.detail.is_empty() {
            println!("{status} {}", check.name);
        } else {
            println!("{status} {} — {}", check.name, check.detail);
        }
    }
    write_out(&common.out, "verify.json", &report::to_json(&rep))?;
    if rep.all_pass {
        println!("verify: all {} checks passed", rep.checks.len());
        Ok(0)
    } else {
        let failed = rep.checks.iter().filter(|c| !c.pass).count();
        println!("verify: {failed} of {} checks FAILED", rep.checks.len());
        Ok(1)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Analyze { common, format } => cmd_analyze(common, format),
        Command::Table {
            alphas,
            betas,
            window,
            samples,
            out,
        } => cmd_table(alphas, betas, *window, *samples, out),
        Command::Covering { common, x, kind } => cmd_covering(common, *x, kind),
        Command::Spectrum { common, n, top } => cmd_spectrum(common, *n, *top),
        Command::Verify { common, p, n } => cmd_verify(common, *p, *n),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("slgreen: error: {e}");
            ExitCode::from(1)
        }
    }
}
