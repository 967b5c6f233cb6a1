//! `pbtk`: build and verify deformed ladder-operator systems from the
//! command line.
//!
//! Exit status: 0 when every check passes, 1 when any check fails,
//! 2 on configuration or input errors.

mod config;
mod output;
mod runner;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{load_config, RunConfig};
use output::{write_csvs, write_report, ReportDoc};

#[derive(Parser, Debug)]
#[command(
    name = "pbtk",
    about = "Construction and identity verification for deformed ladder-operator systems",
    version
)]
struct Cli {
    /// TOML or JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write the verification report (JSON) to this path.
    #[arg(long, global = true)]
    report: Option<PathBuf>,

    /// Directory for CSV artifacts.
    #[arg(long = "csv-dir", global = true)]
    csv_dir: Option<PathBuf>,

    /// Base relative tolerance (also settable via PBTK_TOL).
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Seed for every randomized construction; fixed seed means
    /// byte-identical reports.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Two-level ladder pair: explicit model and optional decompositions.
    Pf {
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long)]
        theta: Option<f64>,
    },
    /// Extended ladder system on an (M+1)-dimensional basis.
    Epf {
        #[arg(long = "M")]
        m: Option<usize>,
        /// Basis kind: "random" or "standard".
        #[arg(long)]
        basis: Option<String>,
        /// Condition number of the random basis.
        #[arg(long)]
        kappa: Option<f64>,
    },
    /// Truncated boson system with bi-coherent diagnostics.
    Dpb {
        #[arg(long)]
        cutoff: Option<usize>,
        /// Similarity kind: "identity", "random", or "diagonal".
        #[arg(long = "s-kind")]
        s_kind: Option<String>,
        #[arg(long)]
        kappa: Option<f64>,
        /// Quadrature radius; omit for the tail rule.
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long = "n-r")]
        n_r: Option<usize>,
        #[arg(long = "n-theta")]
        n_theta: Option<usize>,
    },
    /// Polynomial-Gaussian two-oscillator model.
    Gauss2d {
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        xi: Option<i8>,
        #[arg(long = "n-max")]
        n_max: Option<usize>,
    },
    /// Consolidated verification across all domains.
    VerifyAll,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    let mut cfg = match &cli.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };

    // Environment overrides config; flags override both.
    if let Ok(text) = std::env::var("PBTK_TOL") {
        let v: f64 = text
            .parse()
            .map_err(|e| format!("PBTK_TOL={text:?} is not a number: {e}"))?;
        cfg.tolerance = Some(v);
    }
    if let Some(t) = cli.tol {
        cfg.tolerance = Some(t);
    }
    if let Some(s) = cli.seed {
        cfg.seed = Some(s);
    }
    if let Some(r) = &cli.report {
        cfg.report = Some(r.clone());
    }
    if let Some(d) = &cli.csv_dir {
        cfg.csv_dir = Some(d.clone());
    }
    if let Some(t) = cfg.tolerance {
        if !(t > 0.0 && t.is_finite()) {
            return Err(format!("tolerance must be positive and finite, got {t}"));
        }
    }

    let command = apply_command_flags(&mut cfg, cli.command)?;

    let outcome = runner::dispatch(&command, &cfg)?;
    let (total, passed, failed) = outcome.report.summary();

    for e in &outcome.report.entries {
        let status = if e.pass { "PASS" } else { "FAIL" };
        println!(
            "[{status}] {} residual {:.3e} tolerance {:.3e} ({})",
            e.check, e.residual, e.tolerance, e.context
        );
    }
    println!("{command}: {passed}/{total} checks passed, {failed} failed");

    if let Some(path) = &cfg.report {
        let doc = ReportDoc {
            command: &command,
            seed: cfg.seed.unwrap_or(7),
            tolerance: cfg.tolerance.unwrap_or(1e-10),
            report: &outcome.report,
        };
        write_report(path, &doc)?;
    }
    if let Some(dir) = &cfg.csv_dir {
        write_csvs(dir, &outcome.csvs)?;
    }
    Ok(outcome.report.all_pass())
}

/// Fold subcommand flags into the config and return the command name; with
/// no subcommand the config file must name one.
fn apply_command_flags(cfg: &mut RunConfig, command: Option<Command>) -> Result<String, String> {
    let name = match command {
        None => {
            return cfg
                .command
                .clone()
                .ok_or_else(|| "no command given (flag or config `command` key)".to_string());
        }
        Some(Command::Pf {
            delta,
            omega,
            theta,
        }) => {
            if let Some(v) = delta {
                cfg.pf.delta = v;
            }
            if let Some(v) = omega {
                cfg.pf.omega = v;
            }
            if let Some(v) = theta {
                cfg.pf.theta = v;
            }
            "pf"
        }
        Some(Command::Epf { m, basis, kappa }) => {
            if let Some(v) = m {
                cfg.epf.m = v;
            }
            if let Some(v) = basis {
                cfg.epf.basis = v;
            }
            if let Some(v) = kappa {
                cfg.epf.kappa = v;
            }
            "epf"
        }
        Some(Command::Dpb {
            cutoff,
            s_kind,
            kappa,
            radius,
            n_r,
            n_theta,
        }) => {
            if let Some(v) = cutoff {
                cfg.dpb.cutoff = v;
            }
            if let Some(v) = s_kind {
                cfg.dpb.s_kind = v;
            }
            if let Some(v) = kappa {
                cfg.dpb.kappa = v;
            }
            if let Some(v) = radius {
                cfg.dpb.radius = Some(v);
            }
            if let Some(v) = n_r {
                cfg.dpb.n_r = v;
            }
            if let Some(v) = n_theta {
                cfg.dpb.n_theta = Some(v);
            }
            "dpb"
        }
        Some(Command::Gauss2d { epsilon, xi, n_max }) => {
            if let Some(v) = epsilon {
                cfg.gauss2d.epsilon = v;
            }
            if let Some(v) = xi {
                cfg.gauss2d.xi = v;
            }
            if let Some(v) = n_max {
                cfg.gauss2d.n_max = v;
            }
            "gauss2d"
        }
        Some(Command::VerifyAll) => "verify-all",
    };
    // A config file may also name a command; an explicit subcommand wins,
    // but a contradiction is almost certainly a mistake.
    if let Some(cfg_cmd) = &cfg.command {
        if cfg_cmd != name {
            return Err(format!(
                "config names command {cfg_cmd:?} but the command line says {name:?}"
            ));
        }
    }
    Ok(name.to_string())
}
