//! Command line front end for the toric singularity toolkit.
//!
//! Every subcommand prints a single JSON report to stdout (or to `--out`).
//! Exit code 0 means the report was produced, 1 means the invocation was
//! malformed, and 2 means the input was outside a routine's mathematical
//! domain; in the latter case the report stream carries a JSON diagnostic.

mod checks;
mod io;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use mldkit::algebra::{rat_int, LatticeVector};
use mldkit::blowup::{regular_tower, weighted_blowup};
use mldkit::canonize::{canonize, verify_algorithm_lemmas};
use mldkit::classify::classify_curve;
use mldkit::ideals::MonomialRIdeal;
use mldkit::surface::{blowup_sequence, computing_wblowup_search};
use mldkit::valuations::{
    a_lc_threshold, lc_threshold, mld_with_options, CentreFace, ToricValuation,
};

use io::AppError;

#[derive(Parser)]
#[command(
    name = "mldkit",
    about = "Exact minimal log discrepancies, thresholds, and weighted blow-ups on toric germs",
    version
)]
struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Minimal log discrepancy of a pair over a centre face.
    ///
    /// The environment variable MLD_BOX_LIMIT caps the search box.
    Mld {
        /// Germ: "smooth2", "smooth3", or "1/r(a1,...,ad)".
        #[arg(long)]
        germ: String,
        /// R-ideal as inline JSON or a path to a JSON file.
        #[arg(long)]
        ideal: String,
        /// Centre face as comma-separated coordinate indices; the origin
        /// when omitted.
        #[arg(long)]
        centre: Option<String>,
    },
    /// Log canonical threshold of an ideal over a base pair.
    Lct {
        /// Germ: "smooth2", "smooth3", or "1/r(a1,...,ad)".
        #[arg(long)]
        germ: String,
        /// R-ideal whose threshold is computed.
        #[arg(long)]
        ideal: String,
        /// Base R-ideal already on the pair; trivial when omitted.
        #[arg(long)]
        base: Option<String>,
    },
    /// Largest t with mld(base * ideal^t) at least the target value.
    Threshold {
        /// Germ: "smooth2", "smooth3", or "1/r(a1,...,ad)".
        #[arg(long)]
        germ: String,
        /// Cosupport-at-origin R-ideal being raised to t.
        #[arg(long)]
        ideal: String,
        /// Base R-ideal already on the pair; trivial when omitted.
        #[arg(long)]
        base: Option<String>,
        /// Target mld value.
        #[arg(long, default_value = "1")]
        target: String,
    },
    /// Weighted blow-up of a germ at a weight vector.
    Blowup {
        /// Germ: "smooth2", "smooth3", or "1/r(a1,...,ad)".
        #[arg(long)]
        germ: String,
        /// Weight vector, e.g. "2,1,1".
        #[arg(long)]
        w: String,
    },
    /// Regular tower of smooth blow-ups reaching a weight over a smooth germ.
    Tower {
        /// Weight vector, e.g. "3,2"; its length fixes the dimension.
        #[arg(long)]
        w: String,
    },
    /// Computing weighted blow-up and blow-up sequence for a surface pair.
    SurfaceMld {
        /// Two-dimensional R-ideal as inline JSON or a file path.
        #[arg(long)]
        ideal: String,
    },
    /// Run the crepant pull-back construction on a threefold monomial ideal.
    Canonize {
        /// Plain monomial ideal as inline JSON or a file path.
        #[arg(long)]
        ideal: String,
        /// Exponent the ideal is raised to; must be positive.
        #[arg(long)]
        q: String,
        /// Mld gap the run may consume; defaults to q/20.
        #[arg(long)]
        epsilon: Option<String>,
        /// Also write the full step-by-step trace to this file.
        #[arg(long, value_name = "FILE")]
        trace: Option<PathBuf>,
    },
    /// Classify a crepant divisor datum over the weighted plane.
    Classify {
        /// Larger weight.
        #[arg(long)]
        w1: u64,
        /// Smaller weight.
        #[arg(long)]
        w2: u64,
        /// Weighted-homogeneous polynomial as inline JSON or a file path.
        #[arg(long)]
        poly: String,
    },
    /// Run the named consistency checks and print the manifest.
    VerifySuite {
        /// Seed for the deterministic corpora.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Base instance count per randomized check.
        #[arg(long, default_value_t = 100)]
        count: u64,
        /// Run a single check by name instead of the full list.
        #[arg(long)]
        check: Option<String>,
    },
}

fn run(cmd: &Cmd) -> Result<Value, AppError> {
    match cmd {
        Cmd::Mld {
            germ,
            ideal,
            centre,
        } => {
            let germ = io::parse_germ(germ)?;
            let ideal = io::parse_rideal(ideal)?;
            let centre = match centre {
                Some(text) => io::parse_centre(text, germ.dim())?,
                None => CentreFace::origin(germ.dim()),
            };
            let options = io::box_options_from_env()?;
            let report = mld_with_options(&germ, &ideal, &centre, &options)?;
            Ok(io::mld_report_value(&report))
        }
        Cmd::Lct { germ, ideal, base } => {
            let germ = io::parse_germ(germ)?;
            let ideal = io::parse_rideal(ideal)?;
            let base = match base {
                Some(text) => io::parse_rideal(text)?,
                None => MonomialRIdeal::trivial(germ.dim()),
            };
            let threshold = lc_threshold(&germ, &base, &ideal)?;
            Ok(io::threshold_value(&threshold))
        }
        Cmd::Threshold {
            germ,
            ideal,
            base,
            target,
        } => {
            let germ = io::parse_germ(germ)?;
            let ideal = io::parse_rideal(ideal)?;
            let base = match base {
                Some(text) => io::parse_rideal(text)?,
                None => MonomialRIdeal::trivial(germ.dim()),
            };
            let target = io::parse_rational_arg(target, "target")?;
            let value = a_lc_threshold(&germ, &base, &ideal, &target)?;
            Ok(json!({ "value": io::rational_value(&value) }))
        }
        Cmd::Blowup { germ, w } => {
            let germ = io::parse_germ(germ)?;
            let coords = io::parse_weight_list(w)?;
            if coords.len() != germ.dim() {
                return Err(AppError::usage(format!(
                    "weight has {} entries but the germ has dimension {}",
                    coords.len(),
                    germ.dim()
                )));
            }
            let w = ToricValuation::new(&germ, &LatticeVector::from_integers(&coords))?;
            let bl = weighted_blowup(&germ, &w)?;
            Ok(io::blowup_value(&bl))
        }
        Cmd::Tower { w } => {
            let coords = io::parse_weight_list(w)?;
            let germ = mldkit::valuations::ToricGerm::smooth(coords.len());
            let w = ToricValuation::new(&germ, &LatticeVector::from_integers(&coords))?;
            let tower = regular_tower(&germ, &w)?;
            Ok(json!({ "tower": io::tower_value(&tower.vectors()) }))
        }
        Cmd::SurfaceMld { ideal } => {
            let ideal = io::parse_rideal(ideal)?;
            let (weights, report) = computing_wblowup_search(&ideal)?;
            let sequence = blowup_sequence(&ideal)?;
            Ok(json!({
                "weights": [io::bigint_value(&weights.0), io::bigint_value(&weights.1)],
                "value": report.value.to_string(),
                "witness": report
                    .witness
                    .as_ref()
                    .map(|w| io::coords_value(w.weight().coords())),
                "certified": report.certified,
                "sequence": io::sequence_value(&sequence),
            }))
        }
        Cmd::Canonize {
            ideal,
            q,
            epsilon,
            trace,
        } => {
            let ideal = io::parse_ideal(ideal)?;
            let q = io::parse_rational_arg(q, "q")?;
            let epsilon = match epsilon {
                Some(text) => io::parse_rational_arg(text, "epsilon")?,
                None => &q / rat_int(20),
            };
            let (run, ledger) = canonize(&ideal, &q, &epsilon)?;
            let lemmas = verify_algorithm_lemmas(&run);
            if let Some(path) = trace {
                let full = io::canonize_trace_value(&run, &ledger, &lemmas, &epsilon)?;
                fs::write(path, format!("{}\n", serde_json::to_string_pretty(&full)?))?;
            }
            Ok(io::canonize_report_value(&run, &ledger, &lemmas))
        }
        Cmd::Classify { w1, w2, poly } => {
            let poly = io::parse_poly(poly, *w1, *w2)?;
            let case = classify_curve(*w1, *w2, &poly)?;
            Ok(io::classify_value(&case))
        }
        Cmd::VerifySuite { seed, count, check } => {
            checks::run_suite(*seed, *count, check.as_deref())
        }
    }
}

fn emit(out: Option<&PathBuf>, report: &Value) -> Result<(), AppError> {
    let text = format!("{}\n", serde_json::to_string(report)?);
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders --help and --version on stdout with success.
            let code = ExitCode::from(u8::from(e.use_stderr()));
            let _ = e.print();
            return code;
        }
    };
    match run(&cli.cmd) {
        Ok(report) => match emit(cli.out.as_ref(), &report) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(AppError::Math { domain, message }) => {
            let diagnostic = json!({ "error": { "domain": domain, "message": message } });
            match emit(cli.out.as_ref(), &diagnostic) {
                Ok(()) => ExitCode::from(2),
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
    }
}
