mod config;

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use suprelax::envelopes::{cartesian_lc_envelope_with, hat_density, slc_envelope_with};
use suprelax::functionals::evaluate_sup;
use suprelax::hulls::{
    cartesian_closure, cartesian_hull_with, hat_subset, separately_convex_hull_with,
};
use suprelax::oracle::{lsc_experiment, oscillation_sequence, relax_oracle_with, RelaxReport};
use suprelax::{io, Error, Exec, Settings, SlopeField};

#[derive(Parser, Debug)]
#[command(
    name = "suprelax",
    version,
    about = "Hulls, envelopes and relaxation oracles for nonlocal supremal functionals"
)]
struct Cli {
    /// Worker threads (1 runs everything sequentially). Outputs do not depend on it.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Convexify a pair mask.
    Hull {
        #[arg(long = "in", value_name = "MASK_CSV")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = HullKind::Sc)]
        kind: HullKind,
        /// Also write the Cartesian hull factors as JSON (`--kind cartesian` only).
        #[arg(long, value_name = "JSON")]
        polytopes: Option<PathBuf>,
    },
    /// Envelope of a density; levels and fixups go to a `.json` sidecar next to `--out`.
    Envelope {
        #[arg(long, value_name = "CFG_JSON")]
        density: PathBuf,
        #[arg(long, value_enum)]
        kind: EnvelopeKind,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print J(u) for the primitive of a slope field.
    Eval {
        #[arg(long, value_name = "CFG_JSON")]
        density: PathBuf,
        #[arg(long, value_name = "FIELD_CSV")]
        field: PathBuf,
    },
    /// Relaxed value by subset search, compared with the envelope.
    Relax {
        #[arg(long, value_name = "CFG_JSON")]
        density: PathBuf,
        #[arg(long, value_name = "FIELD_CSV")]
        field: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recovery sequence element built from a relax report's witness.
    Oscillate {
        #[arg(long, value_name = "REPORT_JSON")]
        witness: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Lower-semicontinuity experiment over several refinements.
    CheckLsc {
        #[arg(long, value_name = "CFG_JSON")]
        density: PathBuf,
        #[arg(long, value_name = "FIELD_CSV")]
        field: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum HullKind {
    Sc,
    Hat,
    Cartesian,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EnvelopeKind {
    Slc,
    Xlc,
    Hat,
}

/// An error with the flag or file it came from and its exit code.
pub struct Failure {
    message: String,
    code: u8,
}

impl Failure {
    pub fn at(context: &str, e: Error) -> Failure {
        Failure {
            code: if e.is_resource() { 2 } else { 1 },
            message: format!("{context}: {e}"),
        }
    }

    pub fn usage(message: String) -> Failure {
        Failure { message, code: 1 }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

type Outcome<T = ()> = std::result::Result<T, Failure>;

fn create(flag: &str, path: &Path) -> Outcome<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::at(&format!("{flag} {}", path.display()), e.into()))
}

fn open(flag: &str, path: &Path) -> Outcome<File> {
    File::open(path).map_err(|e| Failure::at(&format!("{flag} {}", path.display()), e.into()))
}

fn write_with(
    flag: &str,
    path: &Path,
    f: impl FnOnce(&mut BufWriter<File>) -> suprelax::Result<()>,
) -> Outcome {
    let ctx = format!("{flag} {}", path.display());
    let mut w = create(flag, path)?;
    f(&mut w).map_err(|e| Failure::at(&ctx, e))?;
    w.flush().map_err(|e| Failure::at(&ctx, e.into()))
}

fn read_field(path: &Path) -> Outcome<SlopeField> {
    io::read_field(open("--field", path)?)
        .map_err(|e| Failure::at(&format!("--field {}", path.display()), e))
}

fn settings(threads: Option<usize>) -> Outcome<Settings> {
    let mut s = Settings::default();
    match threads {
        Some(0) => return Err(Failure::usage("--threads: must be at least 1".into())),
        Some(1) => s.exec = Exec::Sequential,
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::usage(format!("--threads {n}: {e}")))?,
        None => {}
    }
    if let Ok(raw) = std::env::var("SUPRELAX_CLIQUE_CAP") {
        s.clique_cap = raw.trim().parse().map_err(|_| {
            Failure::usage(format!(
                "SUPRELAX_CLIQUE_CAP: `{raw}` is not a nonnegative integer"
            ))
        })?;
    }
    Ok(s)
}

fn run(cli: Cli) -> Outcome {
    let settings = settings(cli.threads)?;
    let exec = settings.exec;
    match cli.command {
        Command::Hull {
            input,
            out,
            kind,
            polytopes,
        } => {
            let ctx = format!("--in {}", input.display());
            let mask = io::read_mask(open("--in", &input)?).map_err(|e| Failure::at(&ctx, e))?;
            if polytopes.is_some() && !matches!(kind, HullKind::Cartesian) {
                return Err(Failure::usage(
                    "--polytopes: only valid with --kind cartesian".into(),
                ));
            }
            let hull = match kind {
                HullKind::Sc => separately_convex_hull_with(&mask, exec),
                HullKind::Hat => Ok(hat_subset(&mask)),
                HullKind::Cartesian => cartesian_closure(&mask, &settings),
            }
            .map_err(|e| Failure::at(&format!("--kind {}", kind_name(kind)), e))?;
            if let Some(path) = polytopes {
                let set = cartesian_hull_with(&mask, &settings)
                    .map_err(|e| Failure::at("--kind cartesian", e))?;
                write_with("--polytopes", &path, |w| {
                    io::write_product_set(&set, &mut *w)?;
                    writeln!(w)?;
                    Ok(())
                })?;
            }
            write_with("--out", &out, |w| io::write_mask(&hull, w))
        }
        Command::Envelope { density, kind, out } => {
            let w = config::load_density(&density, exec)?;
            let flag = match kind {
                EnvelopeKind::Slc => "--kind slc",
                EnvelopeKind::Xlc => "--kind xlc",
                EnvelopeKind::Hat => "--kind hat",
            };
            let result = match kind {
                EnvelopeKind::Hat => {
                    return write_with("--out", &out, |f| io::write_density(&hat_density(&w), f));
                }
                EnvelopeKind::Slc => slc_envelope_with(&w, exec),
                EnvelopeKind::Xlc => cartesian_lc_envelope_with(&w, &settings),
            }
            .map_err(|e| Failure::at(flag, e))?;
            write_with("--out", &out, |f| io::write_density(&result.table, f))?;
            write_with("--out (sidecar)", &out.with_extension("json"), |f| {
                io::write_json(&result.sidecar(), f)
            })
        }
        Command::Eval { density, field } => {
            let w = config::load_density(&density, exec)?;
            let s = read_field(&field)?;
            let j = evaluate_sup(&w, &s)
                .map_err(|e| Failure::at(&format!("--field {}", field.display()), e))?;
            println!("{j}");
            Ok(())
        }
        Command::Relax {
            density,
            field,
            out,
        } => {
            let w = config::load_density(&density, exec)?;
            let s = read_field(&field)?;
            let report =
                relax_oracle_with(&w, &s, &settings).map_err(|e| Failure::at("relax", e))?;
            write_with("--out", &out, |f| io::write_json(&report, f))?;
            if report.cap_failure {
                return Err(Failure::at(
                    "relax",
                    Error::SubsetCap {
                        cap: settings.subset_cap,
                    },
                ));
            }
            Ok(())
        }
        Command::Oscillate { witness, k, out } => {
            let ctx = format!("--witness {}", witness.display());
            let report: RelaxReport =
                io::read_json(open("--witness", &witness)?).map_err(|e| Failure::at(&ctx, e))?;
            let wit = report
                .witness
                .as_ref()
                .ok_or_else(|| Failure::usage(format!("{ctx}: report has no witness")))?;
            let osc =
                oscillation_sequence(&wit.slopes, &wit.weights, &report.target, k, report.h / 2.0)
                    .map_err(|e| Failure::at(&ctx, e))?;
            write_with("--out", &out, |f| io::write_pw_affine(&osc.sequence, f))?;
            println!("{}", osc.sup_distance);
            Ok(())
        }
        Command::CheckLsc {
            density,
            field,
            k,
            out,
        } => {
            let w = config::load_density(&density, exec)?;
            let s = read_field(&field)?;
            let report =
                lsc_experiment(&w, &s, &k, &settings).map_err(|e| Failure::at("check-lsc", e))?;
            write_with("--out", &out, |f| io::write_json(&report, f))?;
            println!("{}", report.verdict);
            Ok(())
        }
    }
}

fn kind_name(kind: HullKind) -> &'static str {
    match kind {
        HullKind::Sc => "sc",
        HullKind::Hat => "hat",
        HullKind::Cartesian => "cartesian",
    }
}

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
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
