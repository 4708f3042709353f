use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use coherence_trap::experiments::{run_scenario, Scenario, ScenarioConfig};
use coherence_trap::experiments::config::Scan;
use coherence_trap::{Error, Result};

#[derive(Parser)]
#[command(name = "ctsim", version, about = "Coherence-trapping frequency estimation scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entangled bound vs trapping error as a function of probe number
    Fig1(RunArgs),
    /// Optimal Ramsey uncertainty vs interrogation time
    Fig2a(RunArgs),
    /// Ramsey uncertainty vs probe frequency at fixed interrogation time
    Fig2b(RunArgs),
    /// Single trajectory of the probe decoherence function
    Evolve(RunArgs),
    /// Entangled bound vs interrogation time
    Bound(RunArgs),
    /// Equilibrium, normal modes and couplings of the ion crystal
    Modes(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON config; missing keys take the scenario defaults
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for ω sweeps (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Integrator step in seconds
    #[arg(long)]
    dt: Option<f64>,
    /// Mean mode occupations, comma separated
    #[arg(long, value_delimiter = ',')]
    n_bar: Option<Vec<f64>>,
    /// Probe frequency scan as min,max,points with min and max in Hz
    #[arg(long, value_delimiter = ',', num_args = 1)]
    omega_scan: Option<Vec<f64>>,
    /// Print the resolved config as JSON and exit
    #[arg(long)]
    print_config: bool,
}

impl Command {
    fn split(self) -> (Scenario, RunArgs) {
        match self {
            Command::Fig1(a) => (Scenario::Fig1, a),
            Command::Fig2a(a) => (Scenario::Fig2a, a),
            Command::Fig2b(a) => (Scenario::Fig2b, a),
            Command::Evolve(a) => (Scenario::Evolve, a),
            Command::Bound(a) => (Scenario::Bound, a),
            Command::Modes(a) => (Scenario::Modes, a),
        }
    }
}

fn resolve(scenario: Scenario, args: &RunArgs) -> Result<ScenarioConfig> {
    let mut config = match &args.config {
        Some(path) => ScenarioConfig::load(path, scenario)?,
        None => ScenarioConfig::default_for(scenario),
    };
    if config.scenario != scenario {
        return Err(Error::Config(format!("config is for {}, not {scenario}", config.scenario)));
    }
    if let Some(out) = &args.out {
        config.output_dir = out.clone();
    }
    if let Some(dt) = args.dt {
        config.dt = Some(dt);
    }
    if let Some(n_bar) = &args.n_bar {
        config.n_bar_list = n_bar.clone();
        if let Some(&first) = n_bar.first() {
            config.params.n_bar = first;
        }
    }
    if let Some(scan) = &args.omega_scan {
        let [min, max, points] = scan[..] else {
            return Err(Error::Config("--omega-scan takes min,max,points".into()));
        };
        if points.fract() != 0.0 || points < 0.0 {
            return Err(Error::Config(format!("scan point count {points} is not an integer")));
        }
        config.scan = Some(Scan { min, max, points: points as usize });
    }
    config.validate()?;
    Ok(config)
}

fn run(scenario: Scenario, args: RunArgs) -> Result<()> {
    let config = resolve(scenario, &args)?;
    if args.print_config {
        println!("{}", config.to_json_pretty());
        return Ok(());
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be positive".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let start = Instant::now();
    let output = pool.install(|| run_scenario(&config))?;
    print!("{}", output.report);
    for path in output.write(&config, &config.output_dir)? {
        println!("wrote {}", path.display());
    }
    eprintln!("{scenario} finished in {:.1} s", start.elapsed().as_secs_f64());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (scenario, args) = cli.command.split();
    match run(scenario, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
