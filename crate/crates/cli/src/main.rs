use clap::{Parser, Subcommand};
use fiberq::commands::{
    cmd_compile, cmd_emit_plotdata, cmd_fit_from_file, cmd_run, cmd_verify_clifford_table,
    load_config, GlobalOpts,
};
use fiberq_fit::DecayShape;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "fiberq",
    version,
    about = "Fiber-array qubit control simulator: compile circuits to RF schedules, run experiments, fit the curves"
)]
struct Cli {
    /// Override the configuration's master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (run, compile) or file (fit, emit-plotdata).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; results are identical for any value.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Evaluate exact outcome probabilities instead of sampling shots.
    #[arg(long, global = true)]
    analytic: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured experiment and write results + resolved config.
    Run {
        /// Path to a run configuration (JSON).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Bundled preset name (see `fiberq preset --list`).
        #[arg(long)]
        preset: Option<String>,
    },
    /// Compile a circuit file to per-channel schedule documents.
    Compile {
        /// Circuit text file.
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
        /// Also render waveform binaries at this sample rate (Hz).
        #[arg(long)]
        sample_rate: Option<f64>,
    },
    /// Fit a results file with a named model.
    Fit {
        #[arg(long)]
        results: PathBuf,
        /// One of: rb, damped_cosine, gaussian_decay.
        #[arg(long)]
        model: String,
        /// Pin the decay envelope: exponential or gaussian.
        #[arg(long)]
        shape: Option<String>,
    },
    /// Write delimited plot data for a results file.
    EmitPlotdata {
        #[arg(long)]
        results: PathBuf,
    },
    /// Check the gate table decompositions and group closure.
    VerifyCliffordTable,
    /// Print a bundled preset configuration (or list them).
    Preset {
        name: Option<String>,
        #[arg(long)]
        list: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    pool.install(|| run(cli))
}

fn run(cli: Cli) -> ExitCode {
    let opts = GlobalOpts {
        seed: cli.seed,
        analytic: cli.analytic,
    };
    match cli.command {
        Command::Run { config, preset } => {
            let out = match &cli.out {
                Some(out) => out.clone(),
                None => {
                    eprintln!("error: run needs --out <dir>");
                    return ExitCode::FAILURE;
                }
            };
            match load_config(config.as_deref(), preset.as_deref(), &opts)
                .and_then(|(config, name)| cmd_run(&config, name.as_deref(), &out))
            {
                Ok(artifacts) => {
                    println!("{}", artifacts.summary);
                    for path in artifacts.written {
                        println!("wrote {}", path.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
            }
        }
        Command::Compile {
            circuit,
            config,
            preset,
            sample_rate,
        } => {
            let out = match &cli.out {
                Some(out) => out.clone(),
                None => {
                    eprintln!("error: compile needs --out <dir>");
                    return ExitCode::FAILURE;
                }
            };
            match load_config(config.as_deref(), preset.as_deref(), &opts)
                .and_then(|(config, _)| cmd_compile(&circuit, &config, &out, sample_rate))
            {
                Ok(artifacts) => {
                    println!("{}", artifacts.summary);
                    for path in artifacts.written {
                        println!("wrote {}", path.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
            }
        }
        Command::Fit {
            results,
            model,
            shape,
        } => {
            let shape = match shape.as_deref() {
                None => None,
                Some("exponential") => Some(DecayShape::Exponential),
                Some("gaussian") => Some(DecayShape::Gaussian),
                Some(other) => {
                    eprintln!("error: unknown shape `{other}` (exponential, gaussian)");
                    return ExitCode::FAILURE;
                }
            };
            match cmd_fit_from_file(&results, &model, shape, cli.out.as_deref()) {
                Ok(report) => {
                    for site_fit in &report.fits {
                        let status = if site_fit.fit.converged {
                            "ok"
                        } else {
                            "NOT CONVERGED"
                        };
                        let params: Vec<String> = site_fit
                            .fit
                            .params
                            .iter()
                            .map(|p| match p.std_error {
                                Some(e) => format!("{}={:.6e}({:.1e})", p.name, p.value, e),
                                None => format!("{}={:.6e}", p.name, p.value),
                            })
                            .collect();
                        println!("site {} [{status}] {}", site_fit.site, params.join(" "));
                    }
                    if report.all_converged() {
                        ExitCode::SUCCESS
                    } else {
                        eprintln!("error: one or more fits did not converge");
                        ExitCode::from(2)
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
            }
        }
        Command::EmitPlotdata { results } => {
            match cmd_emit_plotdata(&results, cli.out.as_deref()) {
                Ok(text) => {
                    if cli.out.is_none() {
                        print!("{text}");
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
            }
        }
        Command::VerifyCliffordTable => {
            let report = cmd_verify_clifford_table();
            println!(
                "entries: max deviation {:.3e} (unitarity {:.3e})",
                report.max_entry_deviation, report.max_unitarity_error
            );
            println!(
                "closure: {} pairs, max deviation {:.3e}",
                report.closure_pairs_checked, report.max_closure_deviation
            );
            if report.passed {
                println!("clifford table OK");
                ExitCode::SUCCESS
            } else {
                eprintln!("error: clifford table verification FAILED");
                ExitCode::FAILURE
            }
        }
        Command::Preset { name, list } => {
            if list || name.is_none() {
                for name in fiberq::presets::PRESET_NAMES {
                    let config = fiberq::presets::preset(name).expect("bundled preset");
                    println!(
                        "{name}: {}",
                        config.description.as_deref().unwrap_or_default()
                    );
                }
                return ExitCode::SUCCESS;
            }
            let name = name.unwrap();
            match fiberq::presets::preset(&name) {
                Some(config) => {
                    let text = config.to_json();
                    match &cli.out {
                        Some(path) => {
                            if let Err(e) = fiberq::io::atomic_write(path, text.as_bytes()) {
                                eprintln!("error: {e}");
                                return ExitCode::FAILURE;
                            }
                            println!("wrote {}", path.display());
                        }
                        None => print!("{text}"),
                    }
                    ExitCode::SUCCESS
                }
                None => {
                    eprintln!(
                        "error: unknown preset `{name}` (available: {})",
                        fiberq::presets::PRESET_NAMES.join(", ")
                    );
                    ExitCode::FAILURE
                }
            }
        }
    }
}
