use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};

use triphoton::mermin::{mermin_delta_sweep, MerminSearch};
use triphoton::simulate::{simulate_batch, DepressionParams, DEFAULT_CAP};
use triphoton::states::{basis_label, DeltaRange};
use triphoton::strength::{strength_delta_sweep, DEFAULT_TARGET_EXPONENT};
use triphoton::table::{Cell, Table};
use triphoton::{
    best_lr_model, delta_family_state, geometry_from_angles, mercedes_state, mermin_extremize, ortho_state,
    strength_table, tangle_scan, Error, EventModel, ObservableSettings, PureState, SpinZ,
};

const WORKERS_ENV: &str = "TRIPHOTON_WORKERS";

#[derive(Parser, Debug)]
#[command(name = "triphoton", version, about = "Entanglement and Mermin analysis of three-photon positronium decay")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Worker threads (defaults to $TRIPHOTON_WORKERS, then the CPU count).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Three-photon polarization state for one decay geometry.
    State {
        /// Opening angles θ12,θ13 in degrees.
        #[arg(long, value_parser = parse_geometry)]
        geometry: (f64, f64),
        /// Positronium spin projection: -1, 0 or 1.
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        sz: i32,
    },
    /// Tangle of the S_z = 0 state over the (θ12, θ13) plane.
    TangleScan {
        /// Grid step in degrees, in (0, 10].
        #[arg(long, default_value_t = 1.0)]
        step: f64,
    },
    /// Mermin inequality analyses.
    Mermin {
        #[command(subcommand)]
        command: MerminCommand,
    },
    /// Trials needed to rule out local realism.
    Strength {
        #[command(subcommand)]
        command: StrengthCommand,
    },
    /// Monte Carlo of the depressing factor reaching its target.
    Simulate {
        /// Probability of the tested event under quantum mechanics.
        #[arg(long, required_unless_present = "delta", conflicts_with = "delta")]
        q: Option<f64>,
        /// Probability assigned by the local-realistic model.
        #[arg(long, required_unless_present = "delta", conflicts_with = "delta")]
        r: Option<f64>,
        /// Take q and r from the δ family and its best LR model.
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        runs: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TARGET_EXPONENT)]
        target_exponent: f64,
        /// Give up after this many trials.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
}

#[derive(Subcommand, Debug)]
enum MerminCommand {
    /// Multi-start search for stationary minima over symmetric settings.
    Extremize {
        /// mercedes, mercedes-helicity, ghz or delta:D
        #[arg(long, default_value = "mercedes")]
        state: StateChoice,
        #[arg(long, default_value_t = 64)]
        starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Mermin value of the δ family at the y/x settings.
    Sweep {
        /// FROM:TO:STEP in degrees.
        #[arg(long, default_value = "0:180:1")]
        delta: DeltaRange,
    },
}

#[derive(Subcommand, Debug)]
enum StrengthCommand {
    /// GHZ, positronium and singlet trial counts.
    Table,
    /// Trial counts of the δ family.
    Sweep {
        /// FROM:TO:STEP in degrees.
        #[arg(long, default_value = "90:180:10")]
        delta: DeltaRange,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum StateChoice {
    /// Two-product form, the basis where y/x settings are optimal.
    Mercedes,
    /// Helicity-basis form at the Mercedes-star geometry.
    MercedesHelicity,
    Ghz,
    Delta(f64),
}

impl FromStr for StateChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "mercedes" => Ok(Self::Mercedes),
            "mercedes-helicity" => Ok(Self::MercedesHelicity),
            "ghz" => Ok(Self::Ghz),
            _ => {
                let d = s
                    .strip_prefix("delta:")
                    .ok_or_else(|| format!("unknown state '{s}'; use mercedes, mercedes-helicity, ghz or delta:D"))?;
                d.parse().map(Self::Delta).map_err(|_| format!("'{d}' is not an angle"))
            }
        }
    }
}

impl StateChoice {
    fn build(self) -> triphoton::Result<PureState> {
        match self {
            Self::Mercedes => delta_family_state(120.0),
            Self::MercedesHelicity => Ok(mercedes_state()),
            Self::Ghz => Ok(PureState::ghz()),
            Self::Delta(d) => delta_family_state(d),
        }
    }
}

fn parse_geometry(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected θ12,θ13")?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("'{t}' is not an angle"));
    Ok((num(a)?, num(b)?))
}

fn state_table(s: &PureState) -> Table {
    let mut t = Table::new(vec!["index", "basis", "re", "im"]);
    for (i, a) in s.amplitudes().iter().enumerate() {
        t.push(vec![Cell::Int(i as i64), Cell::Text(basis_label(i)), Cell::Num(a.re), Cell::Num(a.im)]);
    }
    t
}

fn search_table(search: &MerminSearch) -> Table {
    let mut t = Table::new(vec![
        "rank",
        "mermin_value",
        "theta_deg",
        "phi_deg",
        "theta_p_deg",
        "phi_p_deg",
        "gradient_norm",
        "starts",
        "skipped",
    ]);
    for (rank, m) in search.minima.iter().enumerate() {
        let st = m.settings;
        t.push(vec![
            Cell::Int(rank as i64),
            Cell::Num(m.value),
            Cell::Num(st.theta),
            Cell::Num(st.phi),
            Cell::Num(st.theta_p),
            Cell::Num(st.phi_p),
            Cell::Num(m.gradient_norm),
            Cell::Int(search.starts as i64),
            Cell::Int(search.skipped as i64),
        ]);
    }
    t
}

fn run(command: Command) -> triphoton::Result<Table> {
    match command {
        Command::State { geometry: (a, b), sz } => {
            let g = geometry_from_angles(a, b)?;
            Ok(state_table(&ortho_state(&g, SpinZ::try_from(sz)?)?))
        }
        Command::TangleScan { step } => Ok(tangle_scan(step)?.to_table()),
        Command::Mermin { command: MerminCommand::Extremize { state, starts, seed } } => {
            Ok(search_table(&mermin_extremize(&state.build()?, starts, seed)?))
        }
        Command::Mermin { command: MerminCommand::Sweep { delta } } => Ok(mermin_delta_sweep(&delta)?.to_table()),
        Command::Strength { command: StrengthCommand::Table } => Ok(strength_table()?.to_table()),
        Command::Strength { command: StrengthCommand::Sweep { delta } } => Ok(strength_delta_sweep(&delta)?.to_table()),
        Command::Simulate { q, r, delta, runs, seed, target_exponent, cap } => {
            let (q, r) = match delta {
                Some(d) => {
                    let model = EventModel::from_state(&delta_family_state(d)?, &ObservableSettings::Y_X)?;
                    let report = best_lr_model(&model)?;
                    (report.q1, report.r1)
                }
                None => (q.expect("clap requires q"), r.expect("clap requires r")),
            };
            let params = DepressionParams::new(q, r, target_exponent, cap)?;
            Ok(simulate_batch(&params, seed, runs).to_table())
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Infeasible { .. } => 3,
        _ => 2,
    }
}

fn worker_count(flag: Option<usize>) -> Result<Option<usize>, String> {
    let n = match flag {
        Some(n) => n,
        None => match std::env::var(WORKERS_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| format!("{WORKERS_ENV}='{v}' is not a worker count"))?,
            Err(_) => return Ok(None),
        },
    };
    if n == 0 {
        return Err("worker count must be at least 1".into());
    }
    Ok(Some(n))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };

    let workers = match worker_count(cli.workers) {
        Ok(w) => w,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };

    let table = match pool.install(|| run(cli.command)) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let text = match cli.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    let written = match &cli.output {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
