use std::fs::File;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use meshplan::link_budget::compute_pl_max;
use meshplan::plan::{run_plan, ModeName, PlanConfig, PlanError};
use meshplan::report::{render_outputs, rerender_heatmaps, write_outputs};
use meshplan::synth::{synth_scenario, SynthConfig};

#[derive(Parser)]
#[command(name = "meshplan", version, about = "Balanced cluster and gateway planning for wireless mesh networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic roster and raw path-loss matrix.
    Synth(SynthArgs),
    /// Compute the maximum tolerable path loss.
    Budget(BudgetArgs),
    /// Run the full planning pipeline.
    Plan(PlanArgs),
    /// Re-render heatmaps from the matrix CSVs of a previous plan.
    Report {
        #[arg(long)]
        dir: PathBuf,
    },
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 155)]
    nodes: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 6500.0)]
    width_m: f64,
    #[arg(long, default_value_t = 6500.0)]
    height_m: f64,
    #[arg(long, default_value_t = 925e6)]
    frequency_hz: f64,
    #[arg(long, default_value_t = 3.0)]
    exponent: f64,
    #[arg(long, default_value_t = 0.18)]
    foliage_db_per_m: f64,
    #[arg(long, default_value_t = 0.1)]
    foliage_fraction: f64,
    #[arg(long, default_value_t = 4.0)]
    sigma_db: f64,
    /// Directory receiving roster.csv and pathloss.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BudgetArgs {
    #[arg(long, default_value_t = 30.0, allow_negative_numbers = true)]
    tx_power_dbm: f64,
    #[arg(long, default_value_t = 6.0, allow_negative_numbers = true)]
    tx_gain_dbi: f64,
    #[arg(long, default_value_t = 6.0, allow_negative_numbers = true)]
    rx_gain_dbi: f64,
    #[arg(long, default_value_t = -11.62, allow_negative_numbers = true)]
    system_losses_db: f64,
    #[arg(long, default_value_t = -113.41, allow_negative_numbers = true)]
    rx_sensitivity_dbm: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    link_margin_db: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Greedy,
}

#[derive(Args)]
struct PlanArgs {
    /// TOML config file; flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    roster: Option<PathBuf>,
    #[arg(long)]
    pathloss: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    capacity: Option<usize>,
    #[arg(long)]
    no_lower_bound: bool,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long)]
    sim_lo: Option<f64>,
    #[arg(long)]
    sim_hi: Option<f64>,
    #[arg(long)]
    pl_min_db: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    tx_power_dbm: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    tx_gain_dbi: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    rx_gain_dbi: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    system_losses_db: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    rx_sensitivity_dbm: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    link_margin_db: Option<f64>,
    /// Also write eigenvalues.csv.
    #[arg(long)]
    dump_eigenvalues: bool,
}

impl PlanArgs {
    fn into_config(self) -> Result<PlanConfig, PlanError> {
        let mut cfg = match &self.config {
            Some(path) => PlanConfig::load(path)?,
            None => PlanConfig::default(),
        };
        fn set<T>(slot: &mut T, v: Option<T>) {
            if let Some(v) = v {
                *slot = v;
            }
        }
        if self.roster.is_some() {
            cfg.roster = self.roster;
        }
        if self.pathloss.is_some() {
            cfg.pathloss = self.pathloss;
        }
        if self.out.is_some() {
            cfg.output_dir = self.out;
        }
        cfg.dump_eigenvalues |= self.dump_eigenvalues;
        let c = &mut cfg.clustering;
        set(&mut c.k, self.k);
        if self.capacity.is_some() {
            c.capacity = self.capacity;
        }
        if self.no_lower_bound {
            c.lower_bound = false;
        }
        if self.dim.is_some() {
            c.dim = self.dim;
        }
        set(&mut c.seed, self.seed);
        set(&mut c.restarts, self.restarts);
        set(&mut c.max_iters, self.max_iters);
        set(
            &mut c.mode,
            self.mode.map(|m| match m {
                Mode::Exact => ModeName::Exact,
                Mode::Greedy => ModeName::Greedy,
            }),
        );
        set(&mut cfg.kernel.sim_lo, self.sim_lo);
        set(&mut cfg.kernel.sim_hi, self.sim_hi);
        if self.pl_min_db.is_some() {
            cfg.kernel.pl_min_db = self.pl_min_db;
        }
        let b = &mut cfg.link_budget;
        set(&mut b.tx_power_dbm, self.tx_power_dbm);
        set(&mut b.tx_gain_dbi, self.tx_gain_dbi);
        set(&mut b.rx_gain_dbi, self.rx_gain_dbi);
        set(&mut b.system_losses_db, self.system_losses_db);
        set(&mut b.rx_sensitivity_dbm, self.rx_sensitivity_dbm);
        set(&mut b.link_margin_db, self.link_margin_db);
        Ok(cfg)
    }
}

fn synth(args: SynthArgs) -> Result<(), PlanError> {
    let cfg = SynthConfig {
        n_nodes: args.nodes,
        region_width_m: args.width_m,
        region_height_m: args.height_m,
        frequency_hz: args.frequency_hz,
        path_loss_exponent: args.exponent,
        foliage_db_per_m: args.foliage_db_per_m,
        foliage_fraction: args.foliage_fraction,
        shadowing_sigma_db: args.sigma_db,
        seed: args.seed,
        ..SynthConfig::default()
    };
    let scenario =
        synth_scenario::<f64>(&cfg).map_err(|e| PlanError::Config(e.to_string()))?;
    std::fs::create_dir_all(&args.out)?;
    scenario
        .roster
        .write_csv(File::create(args.out.join("roster.csv"))?)?;
    meshplan::ingest::write_matrix_csv(
        File::create(args.out.join("pathloss.csv"))?,
        &scenario.roster.ids(),
        &scenario.raw.values,
        |v| format!("{v:.6}"),
    )?;
    println!(
        "wrote {} nodes to {}",
        scenario.roster.len(),
        args.out.display()
    );
    Ok(())
}

fn budget(a: BudgetArgs) -> Result<(), PlanError> {
    let params = meshplan::LinkBudgetParams64 {
        tx_power_dbm: a.tx_power_dbm,
        tx_gain_dbi: a.tx_gain_dbi,
        rx_gain_dbi: a.rx_gain_dbi,
        system_losses_db: a.system_losses_db,
        rx_sensitivity_dbm: a.rx_sensitivity_dbm,
        link_margin_db: a.link_margin_db,
    };
    let r = compute_pl_max(&params)?;
    println!("{:.2}", r.pl_max_db);
    Ok(())
}

fn plan(args: PlanArgs) -> Result<(), PlanError> {
    let cfg = args.into_config()?;
    let out = cfg.output_path()?.to_path_buf();
    let report = run_plan::<f64>(&cfg)?;
    let files = render_outputs(&report, cfg.dump_eigenvalues)?;
    write_outputs(&out, &files)?;
    if report.component_count() > 1 {
        eprintln!(
            "warning: usable-link graph has {} connected components",
            report.component_count()
        );
    }
    println!(
        "planned {} nodes into {} clusters ({} gateways) -> {}",
        report.n(),
        report.k(),
        report.gateways.gateway_set.len(),
        out.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(a) => synth(a),
        Command::Budget(a) => budget(a),
        Command::Plan(a) => plan(a),
        Command::Report { dir } => rerender_heatmaps(&dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
