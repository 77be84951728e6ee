//! `vertex`: verification suites, spectra and the appendix tables for the
//! antiperiodic dynamical 6-vertex and periodic 8-vertex chains.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails or a
//! computation errors, 2 on invalid input.

mod config;
mod report;

use clap::{Args, Parser, Subcommand};
use config::{ModelChoice, RunConfig, Settings};
use report::*;
use std::path::PathBuf;
use std::process::ExitCode;
use vertex_core::appendix::{reproduce, Table, CASES};
use vertex_core::gauge::lift_to_8v;
use vertex_core::spectrum::{
    build_system, compare_spectra, merge_sources, set_distance, solve_system, Source, SpectrumRecord, Strategy,
};
use vertex_core::verify::{self, Bound, Check, Context, Suite};
use vertex_core::{sov::SovBasis, ChainParams, C};

#[derive(Parser)]
#[command(name = "vertex", version, about = "Transfer-matrix spectra and identity checks for odd spin-1/2 chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and report every residual.
    Verify(Flags),
    /// Compute dynamical 6-vertex and/or 8-vertex spectra.
    Spectrum(Flags),
    /// Recompute the five published three-site tables.
    ReproduceAppendix(Flags),
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// Flat `key = value` file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Published parameter set, 1 to 5.
    #[arg(long)]
    case: Option<usize>,
    /// Number of sites (odd).
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated inhomogeneities.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    xi: Option<Vec<f64>>,
    /// Crossing parameter `η`.
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<f64>,
    /// Real nome `t`, with `ω = −i ln(t)/π`.
    #[arg(long)]
    t: Option<f64>,
    /// Transfer matrices to treat (default both).
    #[arg(long, value_enum)]
    model: Option<ModelChoice>,
    /// ybe, qdet, sov, spectrum, gauge or all.
    #[arg(long)]
    suite: Option<Suite>,
    /// Seed for the randomized draws (default 1).
    #[arg(long)]
    seed: Option<u64>,
    /// Random spectral points per identity.
    #[arg(long)]
    draws: Option<usize>,
    /// Write the JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write the CSV export here.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Residual threshold; for reproduce-appendix, the deviation threshold.
    #[arg(long)]
    tol: Option<f64>,
}

impl Flags {
    fn settings(&self) -> Result<Settings, String> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
                Settings::parse_file(&text)?
            }
            None => Settings::default(),
        };
        Ok(file.merge(Settings {
            case: self.case,
            n: self.n,
            xi: self.xi.clone(),
            eta: self.eta,
            t: self.t,
            model: self.model,
            suite: self.suite,
            seed: self.seed,
            draws: self.draws,
            tol: self.tol,
            json: self.json.clone(),
            csv: self.csv.clone(),
        }))
    }
}

enum Failure {
    Input(String),
    Run(String),
}

impl From<vertex_core::Error> for Failure {
    fn from(e: vertex_core::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

fn init_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("VERTEX_THREADS") else { return Ok(()) };
    let n: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("VERTEX_THREADS must be a positive integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn meta(command: &'static str, cfg: &RunConfig, params: bool) -> Meta {
    Meta {
        command,
        params: params.then(|| Params::new(&cfg.params, cfg.case)),
        tolerances: TolerancesOut::new(&cfg.tol, cfg.appendix_tol),
        seed: cfg.seed,
        version: env!("CARGO_PKG_VERSION"),
    }
}

fn print_check(c: &Check) {
    let tag = if c.passed { "PASS" } else { "FAIL" };
    println!("{tag} {:9} {:52} {:>12.3e}  {}", c.suite, c.name, c.value, c.bound);
}

fn finish<R: serde::Serialize>(
    report: &Report<R>,
    cfg: &RunConfig,
    csv: impl FnOnce(&std::path::Path) -> Result<(), String>,
) -> Result<bool, Failure> {
    if let Some(path) = &cfg.json {
        report.write_json(path).map_err(Failure::Run)?;
    }
    if let Some(path) = &cfg.csv {
        csv(path).map_err(Failure::Run)?;
    }
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    println!("{} checks, {failed} failed", report.checks.len());
    Ok(failed == 0)
}

fn cmd_verify(cfg: &RunConfig) -> Result<bool, Failure> {
    let mut ctx = Context::new(cfg.params.clone(), cfg.seed, cfg.draws, cfg.tol);
    let checks = verify::run(cfg.suite, &mut ctx)?;
    checks.iter().for_each(print_check);
    let checks: Vec<CheckOut> = checks.iter().map(CheckOut::from).collect();
    let report = Report::<SpectrumOut> { meta: meta("verify", cfg, true), records: Vec::new(), checks };
    finish(&report, cfg, |path| checks_csv(path, &report.checks))
}

fn source_label(s: Source) -> &'static str {
    match s {
        Source::Diagonalization => "diagonalization",
        Source::SystemSolver => "solver",
        Source::Both => "both",
    }
}

fn records_out(records: &[SpectrumRecord], set_tol: f64) -> Vec<SpectrumOut> {
    let scale = records.iter().flat_map(|r| r.t_at_xi.iter().map(|z| z.norm())).fold(1.0, f64::max);
    records
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let neg: Vec<C> = r.t_at_xi.iter().map(|z| -z).collect();
            let sign_partner =
                records.iter().position(|s| s.t_at_xi.iter().zip(&neg).all(|(a, b)| (a - b).norm() <= set_tol * scale));
            SpectrumOut {
                model: r.model.label(),
                index: k,
                t_at_xi: r.t_at_xi.iter().map(|&z| z.into()).collect(),
                multiplicity: r.multiplicity,
                source: source_label(r.source),
                functional_residual: finite(r.functional_residual),
                eigen_residual: r.eigen_residual.and_then(finite),
                sign_partner,
                nearest_six: None,
                inclusion_distance: None,
                lifted: None,
                lift_residual: None,
            }
        })
        .collect()
}

fn max_functional(records: &[SpectrumRecord]) -> f64 {
    records.iter().map(|r| r.functional_residual).fold(0.0, f64::max)
}

fn print_record(r: &SpectrumOut) {
    let t: Vec<String> = r.t_at_xi.iter().map(|z| format!("{:+.10e}{:+.3e}i", z.re, z.im)).collect();
    println!(
        "{:3} {:4} mult {} fn {:.1e} [{}]",
        r.model,
        r.index,
        r.multiplicity,
        r.functional_residual.unwrap_or(f64::NAN),
        t.join(", ")
    );
}

fn cmd_spectrum(cfg: &RunConfig) -> Result<bool, Failure> {
    let p = &cfg.params;
    let tol = cfg.tol;
    let dim = p.dim() as f64;
    let mut ctx = Context::new(p.clone(), cfg.seed, cfg.draws, tol);
    let mut checks = Vec::new();
    let mut records = Vec::new();
    let with_six = cfg.model != ModelChoice::EightVertex;
    let with_eight = cfg.model != ModelChoice::SixVertex;

    let mut six: Vec<SpectrumRecord> = if with_six { ctx.six()?.to_vec() } else { Vec::new() };
    if with_six {
        let solved = solve_system(&build_system(p)?, &Strategy::Homotopy { seed: cfg.seed });
        let tuples: Vec<Vec<C>> = six.iter().map(|r| r.t_at_xi.clone()).collect();
        let scale = tuples.iter().flat_map(|x| x.iter().map(|z| z.norm())).fold(1.0, f64::max);
        let distance = set_distance(&solved.solutions, &tuples).unwrap_or(f64::INFINITY) / scale;
        let extra = merge_sources(&mut six, &solved.solutions, p)?;
        six.extend(extra);
        checks.push(Check::new("spectrum", "dynamical 6-vertex eigenvalues", tuples.len() as f64, Bound::Equals(dim)));
        checks.push(Check::new(
            "spectrum",
            "quadratic system solutions",
            solved.solutions.len() as f64,
            Bound::Equals(dim),
        ));
        checks.push(Check::new("spectrum", "solver vs diagonalization", distance, Bound::Below(tol.set)));
        checks.push(Check::new(
            "spectrum",
            "functional equation (6-vertex)",
            max_functional(&six),
            Bound::Below(tol.set),
        ));
    }
    let eight: Vec<SpectrumRecord> = if with_eight { ctx.eight()?.to_vec() } else { Vec::new() };
    if with_eight {
        checks.push(Check::new("spectrum", "distinct 8-vertex eigenvalues", eight.len() as f64, Bound::Report));
        checks.push(Check::new(
            "spectrum",
            "functional equation (8-vertex)",
            max_functional(&eight),
            Bound::Below(tol.set),
        ));
        let mult = eight.iter().map(|r| r.multiplicity).min().unwrap_or(0);
        checks.push(Check::new("spectrum", "8-vertex multiplicity (min)", mult as f64, Bound::Report));
    }

    let mut six_out = records_out(&six, tol.set);
    let mut eight_out = records_out(&eight, tol.set);
    if with_six && with_eight {
        let cmp = compare_spectra(&six, &eight);
        for e in &cmp.inclusion {
            eight_out[e.eight].nearest_six = Some(e.nearest_six);
            eight_out[e.eight].inclusion_distance = finite(e.distance);
        }
        let scale = six.iter().flat_map(|r| r.t_at_xi.iter().map(|z| z.norm())).fold(1.0, f64::max);
        checks.push(Check::new(
            "spectrum",
            "8-vertex inclusion distance",
            cmp.max_inclusion_distance / scale,
            Bound::Below(tol.set),
        ));
        let basis = SovBasis::new(p)?;
        let mut lifted = 0;
        let mut worst: f64 = 0.0;
        for (k, r) in six.iter().enumerate() {
            let lift = lift_to_8v(&r.t_at_xi, &basis, p, cfg.seed.wrapping_add(k as u64))?;
            six_out[k].lifted = Some(lift.is_some());
            if let Some(l) = lift {
                lifted += 1;
                worst = worst.max(l.residual);
                six_out[k].lift_residual = finite(l.residual);
            }
        }
        checks.push(Check::new("gauge", "lifted eigenvectors", lifted as f64, Bound::Report));
        checks.push(Check::new("gauge", "lift eigen-residual", worst, Bound::Below(tol.lift)));
    }
    records.extend(six_out);
    records.extend(eight_out);
    records.iter().for_each(print_record);
    checks.iter().for_each(print_check);
    let checks: Vec<CheckOut> = checks.iter().map(CheckOut::from).collect();
    let report = Report { meta: meta("spectrum", cfg, true), records, checks };
    finish(&report, cfg, |path| spectrum_csv(path, &report.records))
}

fn fmt3(x: &[f64; 3]) -> String {
    format!("[{:+.15e}, {:+.15e}, {:+.15e}]", x[0], x[1], x[2])
}

fn cmd_reproduce(cfg: &RunConfig) -> Result<bool, Failure> {
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for (k, case) in CASES.iter().enumerate() {
        let report = reproduce(k, cfg.seed)?;
        println!("case {}: xi = {:?}, eta = {}, t = {}", k + 1, case.xi, case.eta, case.nome);
        if case.printed_eta != case.eta {
            let printed = ChainParams::real(&case.xi, case.printed_eta, case.nome)?;
            let sys = build_system(&printed)?;
            let residual =
                case.z.iter().map(|row| sys.relative_residual(&row.map(|v| C::new(v, 0.0)))).fold(0.0, f64::max);
            println!(
                "  note: the tables do not fit the printed eta = {} (relative residual {residual:.2e}); rows computed with eta = {}",
                case.printed_eta, case.eta
            );
            checks.push(Check::new(
                "appendix",
                format!("case {} residual at printed eta", k + 1),
                residual,
                Bound::Report,
            ));
        }
        for (table, label, compared) in [(Table::W, "w", &report.w), (Table::Z, "z", &report.z)] {
            for r in compared {
                println!("  {label}({}) published {}", r.row + 1, fmt3(&r.published));
                println!("  {label}({}) computed  {}  max dev {:.2e}", r.row + 1, fmt3(&r.computed), r.max_deviation);
                for &c in &r.typo_cells {
                    println!(
                        "  {label}({}) entry {}: published {} vs computed {} (known misprint, excluded)",
                        r.row + 1,
                        c + 1,
                        r.published[c],
                        r.computed[c]
                    );
                }
                rows.push(AppendixRow {
                    case: k + 1,
                    table: label,
                    row: r.row + 1,
                    eta: case.eta,
                    printed_eta: case.printed_eta,
                    published: r.published,
                    computed: r.computed,
                    deviations: r.deviations,
                    max_deviation: finite(r.max_deviation),
                    typo_cells: r.typo_cells.iter().map(|c| c + 1).collect(),
                });
            }
            let name = format!("case {} {label} deviation", k + 1);
            checks.push(Check::new("appendix", name, report.max_deviation(table), Bound::Below(cfg.appendix_tol)));
        }
        checks.push(Check::new(
            "appendix",
            format!("case {} solutions", k + 1),
            report.solutions as f64,
            Bound::Equals(8.0),
        ));
    }
    checks.iter().for_each(print_check);
    let checks: Vec<CheckOut> = checks.iter().map(CheckOut::from).collect();
    let report = Report { meta: meta("reproduce-appendix", cfg, false), records: rows, checks };
    finish(&report, cfg, |path| appendix_csv(path, &report.records))
}

type Handler = fn(&RunConfig) -> Result<bool, Failure>;

fn run(cli: Cli) -> Result<bool, Failure> {
    init_threads().map_err(Failure::Input)?;
    let (flags, command): (&Flags, Handler) = match &cli.command {
        Command::Verify(f) => (f, cmd_verify),
        Command::Spectrum(f) => (f, cmd_spectrum),
        Command::ReproduceAppendix(f) => (f, cmd_reproduce),
    };
    let cfg = RunConfig::resolve(flags.settings().map_err(Failure::Input)?).map_err(Failure::Input)?;
    command(&cfg)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("invalid input: {msg}");
            ExitCode::from(2)
        }
    }
}
