//! quadspec: spectra of 2D superintegrable systems from their quadratic
//! symmetry algebras.
//!
//! Exit codes are a contract for CI: 0 success, 2 partial (some requested
//! work inadmissible or undefined), 3 verification failure, 64 usage error,
//! 65 malformed input data, 1 internal error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use quadspec::algebra::Flavor;
use quadspec::catalog::{self, Branch, Params, PotentialId};
use quadspec::matrixrep::ResidualReport;
use quadspec::{classical, matrixrep, output, repsolve, Algebra64, Error};

const EXIT_OK: u8 = 0;
const EXIT_INTERNAL: u8 = 1;
const EXIT_PARTIAL: u8 = 2;
const EXIT_VERIFY: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;

#[derive(Parser)]
#[command(
    name = "quadspec",
    version,
    about = "Energy spectra of 2D superintegrable systems via quadratic symmetry algebras"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

/// Physical parameters; each slot accepts either the μ-form or the k-form.
#[derive(Args, Debug, Default)]
struct ParamArgs {
    #[arg(long, help = "Planck constant (default 1)")]
    hbar: Option<f64>,
    #[arg(long, help = "oscillator frequency (potentials i, ii; default 1)")]
    omega: Option<f64>,
    #[arg(long, help = "inverse-square strength mu1 (i, iii) or direct mu1 (iv)")]
    mu1: Option<f64>,
    #[arg(long, help = "inverse-square strength mu2 (i, iii) or direct mu2 (iv)")]
    mu2: Option<f64>,
    #[arg(long, help = "inverse-square strength mu (potential ii)")]
    mu: Option<f64>,
    #[arg(long, help = "k-form of mu1: mu1 = (k1^2 - 1/4) hbar^2 (hbar^2/2 for iii)")]
    k1: Option<f64>,
    #[arg(long, help = "k-form of mu2")]
    k2: Option<f64>,
    #[arg(long, help = "k-form of mu (potential ii)")]
    k: Option<f64>,
    #[arg(long, help = "Coulomb strength (potentials iii, iv; default 1)")]
    kc: Option<f64>,
    #[arg(long, help = "lambda = kc / hbar^2 (potential iv)")]
    lambda: Option<f64>,
    #[arg(long, help = "nu^2 = nu1^2 + nu2^2, split symmetrically (potential iv)")]
    nu2: Option<f64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed-form spectrum table, re-validated by matrix residuals.
    Spectrum {
        #[arg(long)]
        potential: String,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, conflicts_with = "p_max")]
        p: Option<usize>,
        #[arg(long = "p-max")]
        p_max: Option<usize>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        branches: Vec<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Build the (p+1)-dimensional matrices and check all relations.
    VerifyRep {
        #[arg(long)]
        potential: String,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, conflicts_with = "p_max")]
        p: Option<usize>,
        #[arg(long = "p-max", default_value_t = 8)]
        p_max: usize,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        branches: Vec<String>,
        #[arg(long = "perturb-e", default_value_t = 0.0)]
        perturb_e: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long = "dump-matrices")]
        dump_matrices: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Verify the classical Poisson algebra over a seeded sample.
    VerifyClassical {
        #[arg(long)]
        potential: String,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, help = "RNG seed (falls back to QUADSPEC_SEED, then 42)")]
        seed: Option<u64>,
        #[arg(long = "tol-commute", default_value_t = 1e-8)]
        tol_commute: f64,
        #[arg(long = "tol-closure", default_value_t = 1e-6)]
        tol_closure: f64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Solve Phi(0) = Phi(p+1) = 0 over a search box.
    Solve {
        #[arg(long, conflicts_with = "algebra")]
        potential: Option<String>,
        #[arg(long, help = "custom algebra JSON file")]
        algebra: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value = "quantum")]
        flavor: FlavorArg,
        #[arg(long, default_value_t = 0)]
        p: usize,
        #[arg(long = "u-min", allow_hyphen_values = true)]
        u_min: Option<f64>,
        #[arg(long = "u-max", allow_hyphen_values = true)]
        u_max: Option<f64>,
        #[arg(long = "e-min", allow_hyphen_values = true)]
        e_min: Option<f64>,
        #[arg(long = "e-max", allow_hyphen_values = true)]
        e_max: Option<f64>,
        #[arg(long = "require-positive-a")]
        require_positive_a: bool,
        #[arg(long, help = "also run the grid-scan oracle and report agreement")]
        oracle: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Dump the catalog tables (constants, Casimirs, hbar-limit checks).
    Catalog {
        #[arg(long)]
        potential: Option<String>,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FlavorArg {
    Quantum,
    Classical,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_USAGE,
            message: msg.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match &e {
            Error::UnknownPotential(_) | Error::InvalidParams(_) => EXIT_USAGE,
            Error::Schema(_) | Error::Io(_) | Error::Json(_) => EXIT_DATA,
            Error::CaseUndefinedOnBox | Error::InadmissibleBranch { .. } => EXIT_PARTIAL,
            _ => EXIT_INTERNAL,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn resolve_params(id: PotentialId, a: &ParamArgs) -> Result<Params, Failure> {
    let conflicts: [(&str, bool); 5] = [
        ("--mu1 and --k1", a.mu1.is_some() && a.k1.is_some()),
        ("--mu2 and --k2", a.mu2.is_some() && a.k2.is_some()),
        ("--mu and --k", a.mu.is_some() && a.k.is_some()),
        ("--kc and --lambda", a.kc.is_some() && a.lambda.is_some()),
        (
            "--nu2 and --mu1/--mu2",
            a.nu2.is_some() && (a.mu1.is_some() || a.mu2.is_some()),
        ),
    ];
    for (what, clash) in conflicts {
        if clash {
            return Err(Failure::usage(format!("conflicting parameter flags: {what}")));
        }
    }
    let hbar = a.hbar.unwrap_or(1.0);
    if hbar <= 0.0 {
        return Err(Failure::usage("--hbar must be positive"));
    }
    let mut p = Params {
        hbar,
        omega: a.omega.unwrap_or(1.0),
        ..Params::default()
    };
    let from_k = |k: Option<f64>| -> Result<Option<f64>, Failure> {
        k.map(|kv| catalog::mu_from_k(id, kv, hbar).map_err(Failure::from))
            .transpose()
    };
    match id {
        PotentialId::I => {
            p.mu1 = a.mu1.or(from_k(a.k1)?).unwrap_or(0.0);
            p.mu2 = a.mu2.or(from_k(a.k2)?).unwrap_or(0.0);
        }
        PotentialId::II => {
            p.mu = a.mu.or(from_k(a.k)?).unwrap_or(0.0);
        }
        PotentialId::III => {
            p.k = a.kc.unwrap_or(1.0);
            p.mu1 = a.mu1.or(from_k(a.k1)?).unwrap_or(0.0);
            p.mu2 = a.mu2.or(from_k(a.k2)?).unwrap_or(0.0);
        }
        PotentialId::IV => {
            p.k = a
                .kc
                .or(a.lambda.map(|l| l * hbar * hbar))
                .unwrap_or(1.0);
            if let Some(n2) = a.nu2 {
                if n2 < 0.0 {
                    return Err(Failure::usage("--nu2 must be non-negative"));
                }
                let nu = (n2 / 2.0).sqrt();
                p.mu1 = nu * hbar * hbar;
                p.mu2 = nu * hbar * hbar;
            } else {
                p.mu1 = a.mu1.unwrap_or(0.0);
                p.mu2 = a.mu2.unwrap_or(0.0);
            }
        }
    }
    Ok(p)
}

fn parse_branches(id: PotentialId, raw: &[String]) -> Result<Vec<Branch>, Failure> {
    if raw.is_empty() {
        return Ok(catalog::branches_for(id));
    }
    let all = catalog::branches_for(id);
    let mut out = Vec::new();
    for s in raw {
        let b = Branch::from_str(s).map_err(Failure::from)?;
        if !all.contains(&b) {
            return Err(Failure::usage(format!(
                "branch {b} does not apply to potential {id}"
            )));
        }
        out.push(b);
    }
    Ok(out)
}

fn emit(text: &str, path: &Option<PathBuf>) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::from(Error::Io(e))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct SpectrumBody<'a> {
    potential: String,
    params: &'a Params,
    p_max: usize,
    rows: &'a [repsolve::SpectrumRow],
    skipped: &'a [(String, String)],
}

fn cmd_spectrum(
    potential: &str,
    params: &ParamArgs,
    p: Option<usize>,
    p_max: Option<usize>,
    branches: &[String],
    format: Format,
    out_path: &Option<PathBuf>,
) -> Result<u8, Failure> {
    let id = PotentialId::from_str(potential).map_err(Failure::from)?;
    let params = resolve_params(id, params)?;
    let spec = catalog::get_potential(id, &params)?;
    let branches = parse_branches(id, branches)?;
    let p_max = p_max.or(p).unwrap_or(3);
    let table = repsolve::spectrum(&spec, p_max, &branches)?;
    let text = match format {
        Format::Json => {
            let body = SpectrumBody {
                potential: id.to_string(),
                params: &params,
                p_max,
                rows: &table.rows,
                skipped: &table.skipped,
            };
            output::to_json_string(&output::envelope("spectrum", &body))
        }
        Format::Csv => output::spectrum_csv(&table),
        Format::Text => output::spectrum_text(&table),
    };
    emit(&text, out_path)?;
    Ok(if table.skipped.is_empty() {
        EXIT_OK
    } else {
        EXIT_PARTIAL
    })
}

#[derive(Serialize)]
struct RepRow {
    p: usize,
    branch: String,
    e: f64,
    u: f64,
    pass: bool,
    residuals: ResidualReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    matrices: Option<Value>,
}

#[derive(Serialize)]
struct RepBody<'a> {
    potential: String,
    params: &'a Params,
    perturb_e: f64,
    tol: f64,
    pass: bool,
    rows: Vec<RepRow>,
    skipped: Vec<(String, String)>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify_rep(
    potential: &str,
    params: &ParamArgs,
    p: Option<usize>,
    p_max: usize,
    branches: &[String],
    perturb_e: f64,
    tol: f64,
    dump_matrices: bool,
    format: Format,
    out_path: &Option<PathBuf>,
) -> Result<u8, Failure> {
    let id = PotentialId::from_str(potential).map_err(Failure::from)?;
    let params = resolve_params(id, params)?;
    let spec = catalog::get_potential(id, &params)?;
    let branches = parse_branches(id, branches)?;
    let ps: Vec<usize> = match p {
        Some(p) => vec![p],
        None => (0..=p_max).collect(),
    };
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for &branch in &branches {
        match catalog::check_admissible(id, branch, spec.k1, spec.k2) {
            Ok(()) => {}
            Err(Error::InadmissibleBranch { constraint, .. }) => {
                skipped.push((branch.to_string(), constraint));
                continue;
            }
            Err(other) => return Err(other.into()),
        }
        for &pp in &ps {
            for cf in catalog::closed_form_energy_for(&spec, pp, branch).map_err(Failure::from)? {
                let e = cf.e + perturb_e;
                let rep = matrixrep::build_generators(&spec.quantum, cf.u, e, pp)
                    .map_err(Failure::from)?;
                let residuals = matrixrep::verify(&rep, &spec.quantum);
                rows.push(RepRow {
                    p: pp,
                    branch: branch.to_string(),
                    e,
                    u: cf.u,
                    pass: residuals.max() <= tol,
                    matrices: dump_matrices.then(|| output::matrices_json(&rep)),
                    residuals,
                });
            }
        }
    }
    let pass = rows.iter().all(|r| r.pass);
    let body = RepBody {
        potential: id.to_string(),
        params: &params,
        perturb_e,
        tol,
        pass,
        rows,
        skipped,
    };
    let text = match format {
        Format::Json => output::to_json_string(&output::envelope("verify-rep", &body)),
        _ => {
            let mut s = String::new();
            for r in &body.rows {
                s.push_str(&output::residual_text(
                    &format!("p={} branch={} E={:.15e}", r.p, r.branch, r.e),
                    &r.residuals,
                ));
            }
            s.push_str(if pass { "PASS\n" } else { "FAIL\n" });
            s
        }
    };
    emit(&text, out_path)?;
    Ok(if pass { EXIT_OK } else { EXIT_VERIFY })
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.or_else(|| {
        std::env::var("QUADSPEC_SEED")
            .ok()
            .and_then(|s| s.parse().ok())
    })
    .unwrap_or(42)
}

#[derive(Serialize)]
struct ClassicalBody<'a> {
    params: &'a Params,
    tol_commute: f64,
    tol_closure: f64,
    pass: bool,
    #[serde(flatten)]
    report: classical::ClosureReport,
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify_classical(
    potential: &str,
    params: &ParamArgs,
    samples: usize,
    seed: Option<u64>,
    tol_commute: f64,
    tol_closure: f64,
    format: Format,
    out_path: &Option<PathBuf>,
) -> Result<u8, Failure> {
    if samples == 0 {
        return Err(Failure::usage("--samples must be positive"));
    }
    let id = PotentialId::from_str(potential).map_err(Failure::from)?;
    let params = resolve_params(id, params)?;
    let seed = resolve_seed(seed);
    let report = classical::verify_closure(id, &params, samples, seed).map_err(Failure::from)?;
    let pass = report.max.ha <= tol_commute
        && report.max.hb <= tol_commute
        && report.max.ac <= tol_closure
        && report.max.bc <= tol_closure
        && report.max.casimir <= tol_closure;
    let text = match format {
        Format::Json => {
            let body = ClassicalBody {
                params: &params,
                tol_commute,
                tol_closure,
                pass,
                report: report.clone(),
            };
            output::to_json_string(&output::envelope("verify-classical", &body))
        }
        _ => {
            let mut s = output::closure_text(&report);
            s.push_str(if pass { "PASS\n" } else { "FAIL\n" });
            s
        }
    };
    emit(&text, out_path)?;
    Ok(if pass { EXIT_OK } else { EXIT_VERIFY })
}

#[derive(Serialize)]
struct SolveBody<'a> {
    p: usize,
    search_box: repsolve::SearchBox,
    #[serde(flatten)]
    outcome: &'a repsolve::SolveOutcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_agrees: Option<bool>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    potential: &Option<String>,
    algebra_path: &Option<PathBuf>,
    params: &ParamArgs,
    flavor: FlavorArg,
    p: usize,
    bounds: (Option<f64>, Option<f64>, Option<f64>, Option<f64>),
    require_positive_a: bool,
    oracle: bool,
    format: Format,
    out_path: &Option<PathBuf>,
) -> Result<u8, Failure> {
    let (algebra, default_box): (Algebra64, repsolve::SearchBox) = match (potential, algebra_path)
    {
        (Some(pot), None) => {
            let id = PotentialId::from_str(pot).map_err(Failure::from)?;
            let params = resolve_params(id, params)?;
            let spec = catalog::get_potential(id, &params)?;
            let alg = match flavor {
                FlavorArg::Quantum => spec.quantum.clone(),
                FlavorArg::Classical => spec.classical.clone(),
            };
            (alg, repsolve::default_box(id, p, &params))
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(path).map_err(|e| Failure {
                code: EXIT_DATA,
                message: format!("cannot read {}: {e}", path.display()),
            })?;
            let alg = Algebra64::from_json_str(&text).map_err(Failure::from)?;
            let sb = repsolve::SearchBox {
                u_min: -2.0,
                u_max: p as f64 + 4.0,
                e_min: -10.0,
                e_max: 10.0,
            };
            (alg, sb)
        }
        _ => {
            return Err(Failure::usage(
                "exactly one of --potential or --algebra is required",
            ))
        }
    };
    if algebra.flavor == Flavor::Quantum && algebra.hbar.is_none() {
        return Err(Failure {
            code: EXIT_DATA,
            message: "quantum algebra without hbar".into(),
        });
    }
    let search_box = repsolve::SearchBox {
        u_min: bounds.0.unwrap_or(default_box.u_min),
        u_max: bounds.1.unwrap_or(default_box.u_max),
        e_min: bounds.2.unwrap_or(default_box.e_min),
        e_max: bounds.3.unwrap_or(default_box.e_max),
    };
    if search_box.u_min >= search_box.u_max || search_box.e_min >= search_box.e_max {
        return Err(Failure::usage("search box is empty"));
    }
    let mut opts = repsolve::SolveOptions::new(search_box);
    opts.require_positive_a = require_positive_a;
    let outcome = repsolve::solve_representations(&algebra, p, &opts).map_err(Failure::from)?;
    let oracle_agrees = if oracle {
        let scan = repsolve::brute_force_scan(&algebra, p, &opts, 64).map_err(Failure::from)?;
        let agree = scan.solutions.len() == outcome.solutions.len()
            && scan
                .solutions
                .iter()
                .zip(&outcome.solutions)
                .all(|(a, b)| (a.u - b.u).abs() < 1e-6 && (a.e - b.e).abs() < 1e-6);
        Some(agree)
    } else {
        None
    };
    let body = SolveBody {
        p,
        search_box,
        outcome: &outcome,
        oracle_agrees,
    };
    let text = match format {
        Format::Json => output::to_json_string(&output::envelope("solve", &body)),
        _ => output::solve_text(&outcome),
    };
    emit(&text, out_path)?;
    Ok(if oracle_agrees == Some(false) {
        EXIT_VERIFY
    } else {
        EXIT_OK
    })
}

fn catalog_entry(id: PotentialId, args: &ParamArgs) -> Result<Value, Failure> {
    let params = resolve_params(id, args)?;
    let spec = catalog::get_potential(id, &params)?;
    let checks = catalog::hbar_limit_check(id, &params).map_err(Failure::from)?;
    Ok(serde_json::json!({
        "id": id.to_string(),
        "params": params,
        "k1": spec.k1,
        "k2": spec.k2,
        "branches": catalog::branches_for(id)
            .iter()
            .map(|b| b.to_string())
            .collect::<Vec<_>>(),
        "classical": spec.classical.to_json_value(),
        "quantum": spec.quantum.to_json_value(),
        "hbar_limit": checks,
    }))
}

fn cmd_catalog(
    potential: &Option<String>,
    params: &ParamArgs,
    out_path: &Option<PathBuf>,
) -> Result<u8, Failure> {
    let ids: Vec<PotentialId> = match potential {
        Some(p) => vec![PotentialId::from_str(p).map_err(Failure::from)?],
        None => PotentialId::ALL.to_vec(),
    };
    let entries: Result<Vec<Value>, Failure> =
        ids.into_iter().map(|id| catalog_entry(id, params)).collect();
    let body = serde_json::json!({ "potentials": entries? });
    emit(
        &output::to_json_string(&output::envelope("catalog", &body)),
        out_path,
    )?;
    Ok(EXIT_OK)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.cmd {
        Cmd::Spectrum {
            potential,
            params,
            p,
            p_max,
            branches,
            format,
            output,
        } => cmd_spectrum(&potential, &params, p, p_max, &branches, format, &output),
        Cmd::VerifyRep {
            potential,
            params,
            p,
            p_max,
            branches,
            perturb_e,
            tol,
            dump_matrices,
            format,
            output,
        } => cmd_verify_rep(
            &potential,
            &params,
            p,
            p_max,
            &branches,
            perturb_e,
            tol,
            dump_matrices,
            format,
            &output,
        ),
        Cmd::VerifyClassical {
            potential,
            params,
            samples,
            seed,
            tol_commute,
            tol_closure,
            format,
            output,
        } => cmd_verify_classical(
            &potential,
            &params,
            samples,
            seed,
            tol_commute,
            tol_closure,
            format,
            &output,
        ),
        Cmd::Solve {
            potential,
            algebra,
            params,
            flavor,
            p,
            u_min,
            u_max,
            e_min,
            e_max,
            require_positive_a,
            oracle,
            format,
            output,
        } => cmd_solve(
            &potential,
            &algebra,
            &params,
            flavor,
            p,
            (u_min, u_max, e_min, e_max),
            require_positive_a,
            oracle,
            format,
            &output,
        ),
        Cmd::Catalog {
            potential,
            params,
            output,
        } => cmd_catalog(&potential, &params, &output),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::from(EXIT_OK);
            }
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("quadspec: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
