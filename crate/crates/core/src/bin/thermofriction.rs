use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thermofriction::polarizability::{BroadeningPolicy, EvaluationMode};
use thermofriction::quadrature::QuadratureSpec;
use thermofriction::sweep::{self, Command, Format, Spacing, SweepConfig, DATA_DIR_ENV};
use thermofriction::{Error, Evaluation};

#[derive(Parser)]
#[command(version, about = "Blackbody and non-contact friction of atoms")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Blackbody friction and attenuation time over a temperature sweep
    Bb(Common),
    /// Non-contact friction near a surface over a temperature sweep
    Qf(Common),
    /// Distance-normalized damping constant
    Gamma0(Common),
    /// One-loop Im alpha on a frequency grid plus the tree-level line list
    ImAlpha {
        #[command(flatten)]
        common: Common,
        /// Lower frequency bound (hartree)
        #[arg(long, default_value_t = 1e-4)]
        omega_min: f64,
        /// Upper frequency bound (hartree)
        #[arg(long, default_value_t = 0.3)]
        omega_max: f64,
    },
    /// Numeric result next to the low-temperature closed form
    CompareAsymptotic {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Process::Bb)]
        process: Process,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Process {
    Bb,
    Qf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Total,
    TreeOnly,
    OneloopOnly,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpacingArg {
    Linear,
    Log,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    /// Atom dataset: file path or name
    #[arg(long)]
    atom: String,
    /// Material dataset: file path or name
    #[arg(long)]
    material: Option<String>,
    /// Single temperature (K); overrides the sweep range
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, default_value_t = 10.0)]
    t_min: f64,
    #[arg(long, default_value_t = 3000.0)]
    t_max: f64,
    #[arg(long, default_value_t = 50)]
    points: usize,
    #[arg(long, value_enum, default_value_t = SpacingArg::Log)]
    spacing: SpacingArg,
    /// Atom-surface distance (m)
    #[arg(long)]
    distance: Option<f64>,
    #[arg(long, value_enum, default_value_t = ModeArg::Total)]
    mode: ModeArg,
    /// Lorentzian linewidth (hartree); lifts the strict validity guard
    #[arg(long)]
    broaden: Option<f64>,
    /// Treat pseudo-lines as tree-level lines too
    #[arg(long)]
    include_pseudo_lines: bool,
    #[arg(long, default_value_t = 1e-9)]
    rel_tol: f64,
    /// Worker threads (default: all cores)
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

impl Common {
    fn config(&self, command: Command) -> Result<SweepConfig, Error> {
        let policy = match self.broaden {
            Some(gamma) => BroadeningPolicy::lorentzian(gamma).map_err(|e| rename(e, "broaden"))?,
            None => BroadeningPolicy::None,
        };
        let quadrature = QuadratureSpec::default().with_rel_tol(self.rel_tol)?;
        let mode = match self.mode {
            ModeArg::Total => EvaluationMode::Total,
            ModeArg::TreeOnly => EvaluationMode::TreeOnly,
            ModeArg::OneloopOnly => EvaluationMode::OneloopOnly,
        };
        let (lower, upper, points) = match self.t {
            Some(t) => (t, t, 1),
            None => (self.t_min, self.t_max, self.points),
        };
        Ok(SweepConfig {
            command,
            atom: self.atom.clone(),
            material: self.material.clone(),
            lower,
            upper,
            points,
            spacing: match self.spacing {
                SpacingArg::Linear => Spacing::Linear,
                SpacingArg::Log => Spacing::Log,
            },
            distance: self.distance,
            evaluation: Evaluation {
                mode,
                policy,
                quadrature,
                include_pseudo_lines: self.include_pseudo_lines,
            },
            data_dir: std::env::var_os(DATA_DIR_ENV).map(PathBuf::from),
        })
    }

    fn format(&self) -> Format {
        match self.format {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

fn rename(err: Error, field: &str) -> Error {
    match err {
        Error::Validation { message, .. } => Error::Validation {
            field: field.to_string(),
            message,
        },
        other => other,
    }
}

fn execute(cli: Cli) -> Result<(), Error> {
    let (common, config) = match &cli.command {
        Sub::Bb(c) => (c, c.config(Command::Bb)?),
        Sub::Qf(c) => (c, c.config(Command::Qf)?),
        Sub::Gamma0(c) => (c, c.config(Command::Gamma0)?),
        Sub::ImAlpha {
            common,
            omega_min,
            omega_max,
        } => {
            let mut config = common.config(Command::ImAlpha)?;
            config.lower = *omega_min;
            config.upper = *omega_max;
            (common, config)
        }
        Sub::CompareAsymptotic { common, process } => {
            let command = match process {
                Process::Bb => Command::CompareBb,
                Process::Qf => Command::CompareQf,
            };
            (common, common.config(command)?)
        }
    };
    let output = common.output.as_deref();
    match common.jobs {
        Some(0) => Err(Error::Validation {
            field: "jobs".into(),
            message: "must be at least 1".into(),
        }),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
            pool.install(|| sweep::run_to(&config, common.format(), output))
        }
        None => sweep::run_to(&config, common.format(), output),
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
