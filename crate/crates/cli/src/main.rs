//! `periodlab`: period matrices, property suites, resolution sweeps and
//! Beltrami variations from the command line.
//!
//! Exit codes: 0 success, 1 input error, 2 numerical conditioning failure,
//! 3 property failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use periodlab::io::{render_matrix, BeltramiSpec, DiffeoSpec, Format};
use periodlab::linalg::max_abs;
use periodlab::suite::{run_verify, sweep, sweep_csv, RunConfig};
use periodlab::{
    beltrami_to_vector, blocks, disc_moments, period_point, rauch_first_variation,
    schottky_residual, Error, PeriodDiagnostics, TangentHom,
};
use serde_json::json;

#[derive(Debug, Parser)]
#[command(
    name = "periodlab",
    version,
    about = "Period mapping of Diff(S¹)/Möb(S¹) into the Siegel disc"
)]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Opts {
    /// Mode cutoff N.
    #[arg(long, global = true, env = "PERIODLAB_MODES", default_value_t = 32)]
    modes: usize,
    /// Quadrature samples M (power of two, at least 8N).
    #[arg(long, global = true, env = "PERIODLAB_SAMPLES", default_value_t = 2048)]
    samples: usize,
    /// Size of the leading block used for diagnostics (at most N/2).
    #[arg(long, global = true, env = "PERIODLAB_INTERIOR", default_value_t = 16)]
    interior: usize,
    /// Threshold of the symmetry and equivariance checks.
    #[arg(long, global = true, env = "PERIODLAB_TOL", default_value_t = 1e-6)]
    tol: f64,
    /// Seed of the random inputs of `verify`.
    #[arg(long, global = true, env = "PERIODLAB_SEED", default_value_t = 42)]
    seed: u64,
    /// Output format: json or csv (default: csv for `sweep`, json otherwise).
    #[arg(long, global = true, env = "PERIODLAB_FORMAT")]
    format: Option<Format>,
    /// Output file (default: stdout; `period` defaults to `period_z.<format>`).
    #[arg(long, global = true, env = "PERIODLAB_OUT")]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Period matrix Z of a diffeomorphism spec, plus diagnostics.
    Period { spec: PathBuf },
    /// Run every property criterion on seeded random inputs.
    Verify,
    /// Residuals and Z stabilization over increasing resolutions.
    Sweep {
        spec: PathBuf,
        /// Comma-separated, strictly increasing mode cutoffs.
        #[arg(long, value_delimiter = ',', default_value = "8,16,32")]
        n_list: Vec<usize>,
        /// Comma-separated sample counts, one per N (default: 64N rounded up to a power of two).
        #[arg(long, value_delimiter = ',')]
        m_list: Vec<usize>,
    },
    /// First-order period variation of a Beltrami coefficient.
    Variation {
        beltrami: PathBuf,
        /// Deformation parameter t.
        #[arg(long, default_value_t = 0.01, allow_negative_numbers = true)]
        t: f64,
    },
}

enum Failure {
    Input(String),
    Conditioning(String),
    Property(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_conditioning() {
            Failure::Conditioning(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Conditioning(_) => 2,
            Failure::Property(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Conditioning(m) | Failure::Property(m) => m,
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("periodlab: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let opts = &cli.opts;
    let config = |default: Format| RunConfig {
        n_modes: opts.modes,
        samples: opts.samples,
        interior: opts.interior,
        tol: opts.tol,
        seed: opts.seed,
        format: opts.format.unwrap_or(default),
        out: opts.out.clone(),
    };
    match &cli.command {
        Command::Period { spec } => cmd_period(spec, &config(Format::Json)),
        Command::Verify => cmd_verify(&config(Format::Json)),
        Command::Sweep {
            spec,
            n_list,
            m_list,
        } => cmd_sweep(spec, n_list, m_list, &config(Format::Csv)),
        Command::Variation { beltrami, t } => cmd_variation(beltrami, *t, &config(Format::Json)),
    }
}

fn write_or_print(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn extension(format: Format) -> &'static str {
    match format {
        Format::Json => "json",
        Format::Csv => "csv",
    }
}

fn to_json(value: &impl serde::Serialize) -> Result<String, Failure> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Failure::Input(e.to_string()))
}

fn cmd_period(spec: &Path, cfg: &RunConfig) -> Outcome {
    cfg.validate()?;
    let phi = DiffeoSpec::from_path(spec)?.build(cfg.samples)?;
    let (point, _) = period_point(&phi, cfg.n_modes, cfg.samples, cfg.interior)?;
    let b_hs_norm = blocks(&phi, cfg.n_modes, cfg.samples)?.b().norm();
    let matrix_path = cfg
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("period_z.{}", extension(cfg.format))));
    let diag_path = matrix_path.with_extension("diagnostics.json");
    let diagnostics = PeriodDiagnostics::from(&point);
    write_or_print(Some(&matrix_path), &render_matrix(&point.z, cfg.format)?)?;
    write_or_print(Some(&diag_path), &to_json(&diagnostics)?)?;
    let summary = json!({
        "cond_A": diagnostics.cond_a,
        "sym_residual": diagnostics.sym_residual,
        "min_eig": diagnostics.min_eig,
        "z_max": max_abs(&point.z),
        "b_hs_norm": b_hs_norm,
        "matrix": matrix_path,
        "diagnostics": diag_path,
    });
    write_or_print(None, &to_json(&summary)?)
}

fn cmd_verify(cfg: &RunConfig) -> Outcome {
    let report = run_verify(cfg)?;
    for (id, name, pass) in report.criteria() {
        eprintln!(
            "{} criterion {id:>2} {name}",
            if pass { "PASS" } else { "FAIL" }
        );
    }
    write_or_print(cfg.out.as_deref(), &report.render(cfg.format)?)?;
    if report.pass {
        Ok(())
    } else {
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect();
        Err(Failure::Property(format!(
            "failed checks: {}",
            failed.join(", ")
        )))
    }
}

fn cmd_sweep(spec: &Path, n_list: &[usize], m_list: &[usize], cfg: &RunConfig) -> Outcome {
    if n_list.is_empty() {
        return Err(Failure::Input("--n-list must not be empty".into()));
    }
    let m_list: Vec<usize> = if m_list.is_empty() {
        n_list
            .iter()
            .map(|n| (64 * n).next_power_of_two())
            .collect()
    } else if m_list.len() == n_list.len() {
        m_list.to_vec()
    } else {
        return Err(Failure::Input(format!(
            "--m-list has {} entries but --n-list has {}",
            m_list.len(),
            n_list.len()
        )));
    };
    let resolutions: Vec<(usize, usize)> = n_list.iter().copied().zip(m_list).collect();
    let finest = resolutions.iter().map(|r| r.1).max().unwrap_or(cfg.samples);
    let phi = DiffeoSpec::from_path(spec)?.build(finest)?;
    let rows = sweep(&phi, &resolutions, cfg.interior)?;
    let text = match cfg.format {
        Format::Csv => sweep_csv(&rows),
        Format::Json => to_json(&rows)?,
    };
    write_or_print(cfg.out.as_deref(), &text)
}

fn cmd_variation(path: &Path, t: f64, cfg: &RunConfig) -> Outcome {
    if !t.is_finite() {
        return Err(Failure::Input(format!("--t must be finite, got {t}")));
    }
    if cfg.n_modes == 0 {
        return Err(Failure::Input("--modes must be positive".into()));
    }
    let spec = BeltramiSpec::from_path(path)?;
    let mu = spec.build()?;
    if !mu.is_admissible_at(t) {
        eprintln!(
            "periodlab: warning: |t|·sup|μ| = {:.3} >= 1, t·μ is not a Beltrami coefficient",
            t.abs() * mu.sup_bound()
        );
    }
    let n_max = 2 * cfg.n_modes;
    let degree = spec.degree() as usize;
    // Exact for polynomial μ: the integrand's radial degree and angular
    // frequency are both bounded by degree + n_max.
    let n_r = (degree + n_max) / 2 + 2;
    let n_a = (4 * (degree + n_max)).next_power_of_two();
    let moments = disc_moments(&mu, n_max, n_r, n_a)?;
    let variation = rauch_first_variation(&moments, t, cfg.n_modes)?;
    let text = match cfg.format {
        Format::Csv => render_matrix(&variation, Format::Csv)?,
        Format::Json => {
            let pairs = |values: &[periodlab::Complex64]| -> Vec<serde_json::Value> {
                values
                    .iter()
                    .enumerate()
                    .map(|(k, z)| json!({"n": k + 2, "re": z.re, "im": z.im}))
                    .collect()
            };
            let residual = schottky_residual(&TangentHom::new(variation.clone())?);
            to_json(&json!({
                "t": t,
                "n": cfg.n_modes,
                "moments": pairs(moments.values()),
                "schottky_params": pairs(&beltrami_to_vector(&moments)),
                "schottky_residual": residual,
                "variation": periodlab::io::MatrixJson::from(&variation),
            }))?
        }
    };
    write_or_print(cfg.out.as_deref(), &text)
}
