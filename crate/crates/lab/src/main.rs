use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pnc_lab::config::{parse_grid, ExperimentConfig, ExperimentKind};
use pnc_lab::{csv, sched, tables, LabError, Result};

#[derive(Parser)]
#[command(name = "pnc-lab", version, about = "PNC link, rate and scheduling experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// `key = value` file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo BER sweep of the XOR at the relay.
    Ber {
        #[command(flatten)]
        common: Common,
        /// uncoded | joint-cnc | mud-xor | xor-cd
        #[arg(long)]
        scheme: Option<String>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        phi: Option<f64>,
        /// start:step:stop or a comma list in dB; `inf` disables noise.
        #[arg(long, allow_hyphen_values = true)]
        ebn0: Option<String>,
        #[arg(long)]
        packets: Option<usize>,
        /// Source bits per packet.
        #[arg(long)]
        bits: Option<usize>,
        #[arg(long)]
        max_iter: Option<usize>,
    },
    /// Symmetric exchange rates and the cut-set bound per power.
    Rates {
        #[command(flatten)]
        common: Common,
        /// Power grid in dB.
        #[arg(long, allow_hyphen_values = true)]
        db: Option<String>,
    },
    /// Per-node energy for each scheme at the SNC rate of each power.
    Energy {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        db: Option<String>,
    },
    /// Cut-set corner point and lattice-code rates against the uplink fraction.
    Locus {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 101)]
        steps: usize,
        /// P1R,P2R,PR1,PR2 in dB.
        #[arg(long, default_value = "10,10,10,10", allow_hyphen_values = true)]
        powers: String,
    },
    /// Frame lengths of random line-network instances.
    Netsched {
        #[command(flatten)]
        common: Common,
        /// Comma list of node counts.
        #[arg(long, default_value = "64,256,1024")]
        nodes: String,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Replay every schedule and report violations.
        #[arg(long)]
        validate: bool,
    },
}

fn base(kind: ExperimentKind, common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(kind, path)?,
        None => ExperimentConfig::new(kind),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.out = Some(out.clone());
    }
    Ok(cfg)
}

fn emit(cfg: &ExperimentConfig, text: &str) -> Result<()> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn table_config(kind: ExperimentKind, common: &Common, db: &Option<String>) -> Result<ExperimentConfig> {
    let mut cfg = base(kind, common)?;
    if let Some(db) = db {
        cfg.ebn0_grid = parse_grid(db)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ber { common, scheme, delta, phi, ebn0, packets, bits, max_iter } => {
            let kind = match scheme.as_deref() {
                None | Some("uncoded") => ExperimentKind::BerUncoded,
                Some(_) => ExperimentKind::BerCoded,
            };
            let mut cfg = base(kind, &common)?;
            if let Some(s) = scheme {
                cfg.set("scheme", &s)?;
                if common.config.is_none() {
                    let defaults = ExperimentConfig::new(cfg.kind);
                    cfg.source_bits = defaults.source_bits;
                    cfg.ebn0_grid = defaults.ebn0_grid;
                }
            }
            if let Some(v) = delta {
                cfg.delta = v;
            }
            if let Some(v) = phi {
                cfg.phi = v;
            }
            if let Some(g) = ebn0 {
                cfg.ebn0_grid = parse_grid(&g)?;
            }
            if let Some(v) = packets {
                cfg.packets = v;
            }
            if let Some(v) = bits {
                cfg.source_bits = v;
            }
            if let Some(v) = max_iter {
                cfg.max_iter = v;
            }
            let points = pnc_lab::run_ber_sweep(&cfg)?;
            emit(&cfg, &csv::ber_csv(&points, cfg.scheme, cfg.delta, cfg.phi, cfg.seed))
        }
        Command::Rates { common, db } => {
            let cfg = table_config(ExperimentKind::RatesTable3, &common, &db)?;
            emit(&cfg, &csv::table3_csv(&tables::run_table3(&cfg.ebn0_grid)?))
        }
        Command::Energy { common, db } => {
            let cfg = table_config(ExperimentKind::EnergyTable4, &common, &db)?;
            emit(&cfg, &csv::table4_csv(&tables::run_table4(&cfg.ebn0_grid)?))
        }
        Command::Locus { common, steps, powers } => {
            let cfg = base(ExperimentKind::RegionLocus, &common)?;
            let powers = tables::parse_powers_db(&powers)?;
            emit(&cfg, &csv::locus_csv(&tables::run_locus(&powers, steps)?))
        }
        Command::Netsched { common, nodes, trials, validate } => {
            let cfg = base(ExperimentKind::Netsched, &common)?;
            let nodes: Vec<usize> = nodes
                .split(',')
                .map(|s| s.trim().parse().map_err(|_| LabError::usage(format!("bad node count {s:?}"))))
                .collect::<Result<_>>()?;
            let rows = sched::run_netsched(&nodes, trials, cfg.seed, validate)?;
            emit(&cfg, &csv::netsched_csv(&rows, cfg.seed))?;
            if rows.iter().any(|r| r.violations.is_some_and(|v| v > 0)) {
                return Err(LabError::Failed("schedule validation failed".into()));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pnc-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
