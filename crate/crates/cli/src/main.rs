use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use qdesk::anneal::Schedule;
use qdesk_cli::{
    cmd_anneal, cmd_embed, cmd_qaoa_grid, cmd_qaoa_optimize, cmd_run, cmd_solve, CliError,
    EmbedArgs, QaoaGridArgs, QaoaOptimizeArgs, RunFormat, SaArgs, SolveMethod,
};

#[derive(Parser)]
#[command(
    name = "qdesk",
    version,
    about = "Desk-scale circuit simulation, annealing, and embedding runs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Counts,
    Statevector,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Brute,
    Sa,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a circuit file, printing counts or the final state vector.
    Run {
        circuit: PathBuf,
        #[arg(long, default_value_t = 1000)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Counts)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Scan or optimize the variational angle landscape of a problem.
    Qaoa {
        problem: PathBuf,
        /// Number of alternation layers; the grid scan needs exactly 1.
        #[arg(long, default_value_t = 1)]
        p: usize,
        /// Run the derivative-free optimizer instead of the grid scan.
        #[arg(long)]
        optimize: bool,
        #[arg(long, default_value_t = 64)]
        betas: usize,
        #[arg(long, default_value_t = 128)]
        gammas: usize,
        /// Success-probability bitstring; defaults to the brute-force optimum.
        #[arg(long)]
        target: Option<String>,
        /// Starting betas for --optimize, comma separated, one per layer.
        #[arg(long, value_delimiter = ',')]
        init_betas: Vec<f64>,
        /// Starting gammas for --optimize, comma separated, one per layer.
        #[arg(long, value_delimiter = ',')]
        init_gammas: Vec<f64>,
        #[arg(long, default_value_t = 400)]
        max_evaluations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Evolve a problem under an annealing schedule and report probabilities.
    Anneal {
        problem: PathBuf,
        /// Built-in schedule name.
        #[arg(long, default_value = "linear")]
        schedule: String,
        /// CSV file of (s, A, B) points; overrides --schedule.
        #[arg(long, conflicts_with = "schedule")]
        schedule_file: Option<PathBuf>,
        #[arg(long, default_value_t = 20.0)]
        t_max: f64,
        #[arg(long, default_value_t = 2000)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Solve a problem by brute force or simulated annealing.
    Solve {
        problem: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long, default_value_t = 100)]
        reads: usize,
        #[arg(long, default_value_t = 200)]
        sweeps: usize,
        #[arg(long, default_value_t = 0.1)]
        beta_start: f64,
        #[arg(long, default_value_t = 5.0)]
        beta_end: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Embed a problem into a Chimera graph and emit the physical model.
    Embed {
        problem: PathBuf,
        /// Chimera dimensions: rows, columns, shore size.
        #[arg(long, num_args = 3, value_names = ["M", "N", "T"], required = true)]
        chimera: Vec<usize>,
        #[arg(long, default_value_t = 32)]
        tries: usize,
        #[arg(long, default_value_t = 1.0)]
        chain_strength: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Destination for the embedding JSON; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Destination for the physical problem JSON; stdout when omitted.
        #[arg(long)]
        physical_output: Option<PathBuf>,
    },
}

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run {
            circuit,
            shots,
            seed,
            format,
            output,
        } => {
            let source = read_input(&circuit)?;
            let format = match format {
                Format::Counts => RunFormat::Counts,
                Format::Statevector => RunFormat::Statevector,
            };
            let text = cmd_run(&source, shots, seed, format)?;
            emit(&text, output.as_deref())
        }
        Command::Qaoa {
            problem,
            p,
            optimize,
            betas,
            gammas,
            target,
            init_betas,
            init_gammas,
            max_evaluations,
            seed,
            output,
        } => {
            let text = read_input(&problem)?;
            let rendered = if optimize {
                let fill = |given: Vec<f64>| -> Result<Vec<f64>, CliError> {
                    if given.is_empty() {
                        Ok(vec![0.1; p])
                    } else if given.len() == p {
                        Ok(given)
                    } else {
                        Err(CliError::Usage(format!(
                            "expected {p} starting angles, got {}",
                            given.len()
                        )))
                    }
                };
                cmd_qaoa_optimize(
                    &text,
                    QaoaOptimizeArgs {
                        p,
                        init_betas: fill(init_betas)?,
                        init_gammas: fill(init_gammas)?,
                        max_evaluations,
                    },
                    seed,
                )?
            } else {
                if p != 1 {
                    return Err(CliError::Usage(format!(
                        "the landscape grid is defined for p = 1, got p = {p}"
                    )));
                }
                cmd_qaoa_grid(&text, QaoaGridArgs { betas, gammas, target }, seed)?
            };
            emit(&rendered, output.as_deref())
        }
        Command::Anneal {
            problem,
            schedule,
            schedule_file,
            t_max,
            steps,
            seed,
            output,
        } => {
            let text = read_input(&problem)?;
            let (sched, name) = match schedule_file {
                Some(path) => {
                    let csv = read_input(&path)?;
                    (
                        Schedule::from_csv(&csv).map_err(CliError::from)?,
                        path.display().to_string(),
                    )
                }
                None => (
                    Schedule::builtin(&schedule).map_err(CliError::from)?,
                    schedule,
                ),
            };
            let rendered = cmd_anneal(&text, &sched, &name, t_max, steps, seed)?;
            emit(&rendered, output.as_deref())
        }
        Command::Solve {
            problem,
            method,
            reads,
            sweeps,
            beta_start,
            beta_end,
            seed,
            output,
        } => {
            let text = read_input(&problem)?;
            let method = match method {
                Method::Brute => SolveMethod::Brute,
                Method::Sa => SolveMethod::Sa,
            };
            let sa = SaArgs {
                reads,
                sweeps,
                beta_start,
                beta_end,
            };
            let rendered = cmd_solve(&text, method, sa, seed)?;
            emit(&rendered, output.as_deref())
        }
        Command::Embed {
            problem,
            chimera,
            tries,
            chain_strength,
            seed,
            output,
            physical_output,
        } => {
            let text = read_input(&problem)?;
            let args = EmbedArgs {
                chimera: (chimera[0], chimera[1], chimera[2]),
                tries,
                chain_strength,
            };
            let (embedding_doc, physical_doc) = cmd_embed(&text, args, seed)?;
            emit(&embedding_doc, output.as_deref())?;
            emit(&physical_doc, physical_output.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
