use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use husimi::mvhermite::{MultiIndex, OverlapSpec};
use husimi::states::Parity;
use husimi::trajectory::FrequencyProfile;
use husimi_cli::{
    run_canonical, run_scenario_file, CliError, CliResult, FranckCondonRequest, OutputKind, OverlapRequest,
    QDeformRequest, RunSummary, Scenario, StateRequest,
};
use num_complex::Complex64 as C64;

#[derive(Parser)]
#[command(name = "husimi", version, about = "Exact parametric-oscillator dynamics from the shell")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a full scenario file.
    Run {
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Integrate ε(t) and write trajectory.csv.
    Evolve(EvolveArgs),
    /// Write squeezing.csv with closed-form variances along ε(t).
    Squeeze(EvolveArgs),
    /// Build one state at a sample time; writes its wavefunction and states.json.
    States(StatesArgs),
    /// Ladder-algebra residuals at deformation λ; writes qreport.json.
    Qdeform {
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 64)]
        n_max: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Closed-form Gaussian overlap against quadrature; writes overlap.json.
    Overlap {
        /// JSON file holding an overlap spec.
        #[arg(long)]
        spec: PathBuf,
        /// Comma-separated multi-index, e.g. 1,2.
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        m: Vec<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Transition amplitudes between the t = 0 and t number bases.
    Fc {
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long)]
        time: f64,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileKind {
    Constant,
    Free,
    Step,
    Modulated,
    Tabulated,
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long, value_enum, default_value = "constant")]
    profile: ProfileKind,
    #[arg(long, default_value_t = 1.0)]
    omega0: f64,
    #[arg(long)]
    omega1: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    t_switch: f64,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    /// JSON profile description; required for `--profile tabulated`, overrides the other flags otherwise.
    #[arg(long)]
    profile_file: Option<PathBuf>,
}

#[derive(Args)]
struct EvolveArgs {
    #[command(flatten)]
    profile: ProfileArgs,
    #[arg(long)]
    t_end: f64,
    #[arg(long, default_value_t = 0.01)]
    dt_out: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum StateKind {
    Ground,
    Coherent,
    Number,
    Even,
    Odd,
    Qcoherent,
}

#[derive(Args)]
struct StatesArgs {
    #[command(flatten)]
    profile: ProfileArgs,
    #[arg(long, value_enum)]
    state: StateKind,
    /// Eigenvalue as re,im.
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.0], allow_negative_numbers = true)]
    alpha: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    n: usize,
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    #[arg(long, default_value_t = 40)]
    n_max: usize,
    #[arg(long, default_value_t = 0.0)]
    sample_time: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long)]
    out: PathBuf,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> CliResult<T> {
    let bytes = std::fs::read(path).map_err(CliError::io(path.display().to_string()))?;
    serde_json::from_slice(&bytes).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))
}

fn schema(e: husimi::Error) -> CliError {
    CliError::Schema(e.to_string())
}

impl ProfileArgs {
    fn build(&self) -> CliResult<FrequencyProfile> {
        if let Some(path) = &self.profile_file {
            return read_json(path);
        }
        let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| CliError::Schema(format!("--{flag} is required for this profile")));
        match self.profile {
            ProfileKind::Constant => FrequencyProfile::constant(self.omega0).map_err(schema),
            ProfileKind::Free => Ok(FrequencyProfile::free()),
            ProfileKind::Step => FrequencyProfile::step(need(self.omega1, "omega1")?, self.t_switch).map_err(schema),
            ProfileKind::Modulated => {
                FrequencyProfile::modulated(need(self.kappa, "kappa")?, need(self.nu, "nu")?).map_err(schema)
            }
            ProfileKind::Tabulated => Err(CliError::Schema("--profile-file is required for a tabulated profile".into())),
        }
    }
}

fn base(profile: FrequencyProfile, t_end: f64, dt_out: f64, tol: f64, outputs: Vec<OutputKind>) -> Scenario {
    Scenario {
        profile,
        t_end,
        dt_out,
        solver_tol: tol,
        states: Vec::new(),
        grid: None,
        sample_time: None,
        qdeform: None,
        overlap: None,
        franck_condon: None,
        outputs,
    }
}

fn dispatch(command: Command) -> CliResult<(RunSummary, PathBuf)> {
    let (scenario, out) = match command {
        Command::Run { scenario, out } => return run_scenario_file(&scenario, &out).map(|s| (s, out)),
        Command::Evolve(a) => (base(a.profile.build()?, a.t_end, a.dt_out, a.tol, vec![OutputKind::TrajectoryCsv]), a.out),
        Command::Squeeze(a) => (base(a.profile.build()?, a.t_end, a.dt_out, a.tol, vec![OutputKind::SqueezingCsv]), a.out),
        Command::States(a) => {
            let [re, im] = a.alpha[..] else {
                return Err(CliError::Schema(format!("--alpha needs exactly two values re,im, got {}", a.alpha.len())));
            };
            let alpha = C64::new(re, im);
            let state = match a.state {
                StateKind::Ground => StateRequest::Ground,
                StateKind::Coherent => StateRequest::Coherent { alpha },
                StateKind::Number => StateRequest::Number { n: a.n },
                StateKind::Even => StateRequest::Cat { parity: Parity::Even, alpha },
                StateKind::Odd => StateRequest::Cat { parity: Parity::Odd, alpha },
                StateKind::Qcoherent => StateRequest::Qcoherent { alpha, lambda: a.lambda, n_max: a.n_max },
            };
            let t_end = a.sample_time;
            let mut s = base(
                a.profile.build()?,
                t_end,
                t_end.max(1.0),
                a.tol,
                vec![OutputKind::WavefunctionCsv, OutputKind::StatesJson],
            );
            s.states.push(state);
            (s, a.out)
        }
        Command::Qdeform { lambda, n_max, out } => {
            let mut s = base(FrequencyProfile::free(), 0.0, 1.0, 1e-10, vec![OutputKind::QreportJson]);
            s.qdeform = Some(QDeformRequest { lambda, n_max });
            (s, out)
        }
        Command::Overlap { spec, n, m, out } => {
            let spec: OverlapSpec = read_json(&spec)?;
            let mut s = base(FrequencyProfile::free(), 0.0, 1.0, 1e-10, vec![OutputKind::OverlapJson]);
            s.overlap = Some(OverlapRequest { spec, n: MultiIndex::new(n).map_err(schema)?, m: MultiIndex::new(m).map_err(schema)? });
            (s, out)
        }
        Command::Fc { profile, time, n_max, tol, out } => {
            let mut s = base(profile.build()?, time, time.max(1.0), tol, vec![OutputKind::FranckCondonJson]);
            s.franck_condon = Some(FranckCondonRequest { n_max, time: Some(time) });
            (s, out)
        }
    };
    run_canonical(&scenario, &out).map(|s| (s, out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok((summary, out)) => {
            for a in &summary.artifacts {
                println!("wrote {}", out.join(a).display());
            }
            println!("{}", serde_json::to_string(&summary).expect("summary serializes"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("husimi: {e}");
            e.exit_code()
        }
    }
}
