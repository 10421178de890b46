use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ergokit::correlations::{correlation_report, main_identity_at};
use ergokit::dissipation::{self, c_parameter, evolve_sampled, psi_minus, psi_plus, steady_state};
use ergokit::extraction::{build_protocol_with, power_bound, PowerOptions, Schedule};
use ergokit::io::{parse_hamiltonian, parse_state};
use ergokit::qmath::{trace_distance, C64};
use ergokit::states::{random_density_matrix, thermal_state};
use ergokit::sweep::{c_range, run_sweep, to_csv, SweepConfig};
use ergokit::verify::{run_verify, Check};
use ergokit::{DensityMatrix, DissipationParams, ErgotropyReport, Error, Hamiltonian, SteadyStateParams};

#[derive(Parser)]
#[command(name = "ergokit", version, about = "Ergotropy, correlations and collective dissipation of small quantum systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ergotropy and correlation report for a state file.
    Analyze(AnalyzeArgs),
    /// Steady-state sweep over c and beta_e.
    Sweep(SweepArgs),
    /// Collective-dissipation trajectory towards the steady state.
    Simulate(SimulateArgs),
    /// Seeded check of every identity and inequality.
    Verify(VerifyArgs),
    /// Average-power bound of the extraction protocol.
    Power(PowerArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// State JSON: {"dims": [...], "re": [...], "im": [...]}.
    #[arg(long)]
    state: PathBuf,
    /// `two-qubit`, `qubit` or a Hamiltonian JSON file.
    #[arg(long, default_value = "two-qubit")]
    hamiltonian: String,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// Use this beta instead of fitting it from the marginals.
    #[arg(long)]
    beta: Option<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated bath inverse temperatures.
    #[arg(long, value_delimiter = ',', default_values_t = [0.01, 1.0, 10.0])]
    beta_e: Vec<f64>,
    /// `start:stop:step` or a comma-separated list of c values.
    #[arg(long, default_value = "0:1:0.005")]
    c_grid: String,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Coupling {
    Collective,
    Independent,
}

#[derive(Args)]
struct SimulateArgs {
    /// `gg`, `ee`, `psi-minus`, `psi-plus`, `random` or a state JSON file.
    #[arg(long, default_value = "gg")]
    initial: String,
    #[arg(long, default_value_t = 1.0)]
    beta_e: f64,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Exchange coupling; defaults to 0.1 gamma.
    #[arg(long)]
    f: Option<f64>,
    #[arg(long, value_enum, default_value_t = Coupling::Collective)]
    coupling: Coupling,
    #[arg(long, default_value_t = 50.0)]
    t_final: f64,
    /// Time step; defaults to the largest accepted step.
    #[arg(long)]
    dt: Option<f64>,
    /// Number of output rows after the initial one.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Seed for `--initial random`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 1000)]
    seeds: u64,
    /// First seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, hide = true)]
    inject_fault: Option<String>,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScheduleArg {
    Smoothstep,
    Sinusoidal,
}

#[derive(Args)]
struct PowerArgs {
    /// State JSON file; otherwise the steady state at --c and --beta-e.
    #[arg(long)]
    state: Option<PathBuf>,
    #[arg(long, default_value_t = 0.2)]
    c: f64,
    #[arg(long, default_value_t = 1.0)]
    beta_e: f64,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    #[arg(long, value_enum, default_value_t = ScheduleArg::Smoothstep)]
    schedule: ScheduleArg,
    /// Energy cap Omega; used only when larger than the computed one.
    #[arg(long)]
    omega_cap: Option<f64>,
    #[command(flatten)]
    output: Output,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    let result = match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Sweep(a) => sweep(a),
        Command::Simulate(a) => simulate(a),
        Command::Verify(a) => verify(a),
        Command::Power(a) => power(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::PassiveInput | Error::BetaZero) => 3,
        _ => 2,
    }
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("ERGOKIT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().with_context(|| format!("ERGOKIT_THREADS must be a positive integer, got `{raw}`"))?;
    if n == 0 {
        bail!("ERGOKIT_THREADS must be a positive integer, got `{raw}`");
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn emit(output: &Output, text: &str) -> anyhow::Result<()> {
    match &output.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialise");
    s.push('\n');
    s
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_state(path: &Path) -> anyhow::Result<DensityMatrix> {
    parse_state(&read(path)?).with_context(|| format!("invalid state in {}", path.display()))
}

fn load_hamiltonian(spec: &str, omega: f64) -> anyhow::Result<Hamiltonian> {
    match spec {
        "two-qubit" => Ok(Hamiltonian::two_qubit(omega)),
        "qubit" => Ok(Hamiltonian::qubit(omega)),
        path => parse_hamiltonian(&read(Path::new(path))?).with_context(|| format!("invalid Hamiltonian in {path}")),
    }
}

fn analyze(a: AnalyzeArgs) -> anyhow::Result<ExitCode> {
    let rho = load_state(&a.state)?;
    let h = load_hamiltonian(&a.hamiltonian, a.omega)?;
    let erg = ErgotropyReport::new(&rho, &h)?;
    let corr = match (a.beta, rho.dims().len()) {
        (Some(beta), 2) => Some(main_identity_at(&rho, &h, beta)?),
        (None, 2) => Some(correlation_report(&rho, &h)?),
        _ => None,
    };
    let passive = erg.passive_state.matrix();
    let report = json!({
        "ergotropy": {
            "ergotropy": erg.ergotropy,
            "ergotropy_overlap_form": erg.ergotropy_overlap_form,
            "bound_ergotropy": erg.bound_ergotropy,
            "total": erg.total(),
            "equal_entropy_beta": erg.equal_entropy_beta,
            "passive_populations": passive.real_diagonal(),
        },
        "correlations": corr,
    });
    emit(&a.output, &pretty(&report))?;
    Ok(ExitCode::SUCCESS)
}

fn parse_c_grid(s: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let [start, stop, step] = [parts[0], parts[1], parts[2]].map(|p| p.trim().parse::<f64>());
        let (start, stop, step) = (start?, stop?, step?);
        if !(step > 0.0) || stop < start {
            bail!("c grid `{s}` needs start <= stop and a positive step");
        }
        let intervals = ((stop - start) / step).round() as usize;
        return Ok(c_range(start, stop, intervals));
    }
    s.split(',')
        .map(|p| p.trim().parse::<f64>().with_context(|| format!("bad c value `{p}`")))
        .collect()
}

fn sweep(a: SweepArgs) -> anyhow::Result<ExitCode> {
    let config = SweepConfig { beta_e: a.beta_e, c_grid: parse_c_grid(&a.c_grid)?, omega: a.omega };
    let rows = run_sweep(&config)?;
    let text = match a.output.format.unwrap_or(Format::Csv) {
        Format::Csv => to_csv(&rows),
        Format::Json => pretty(&rows),
    };
    emit(&a.output, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn initial_state(spec: &str, seed: u64) -> anyhow::Result<DensityMatrix> {
    let basis = |i: usize| {
        let mut v = [C64::new(0.0, 0.0); 4];
        v[i] = C64::new(1.0, 0.0);
        v
    };
    let psi = match spec {
        "gg" => basis(0),
        "ee" => basis(3),
        "psi-minus" => psi_minus(),
        "psi-plus" => psi_plus(),
        "random" => return Ok(random_density_matrix(&[2, 2], 4, seed)?),
        path => return load_state(Path::new(path)),
    };
    Ok(DensityMatrix::pure(&psi, vec![2, 2])?)
}

fn simulate(a: SimulateArgs) -> anyhow::Result<ExitCode> {
    let rho0 = initial_state(&a.initial, a.seed)?;
    let base = match a.coupling {
        Coupling::Collective => DissipationParams::collective(a.omega, a.gamma, a.beta_e)?,
        Coupling::Independent => DissipationParams::independent(a.omega, a.gamma, a.beta_e)?,
    };
    let params = match a.f {
        Some(f) => base.with_coupling(f)?,
        None => base,
    };
    let c0 = c_parameter(&rho0)?;
    let target = match a.coupling {
        Coupling::Collective => steady_state(&SteadyStateParams { c: c0, beta_e: a.beta_e, omega: a.omega })?,
        Coupling::Independent => thermal_state(&Hamiltonian::two_qubit(a.omega), a.beta_e)?,
    };
    let dt = a.dt.unwrap_or_else(|| params.max_step());
    let steps = (a.t_final / dt).ceil().max(1.0) as usize;
    let every = (steps / a.samples.max(1)).max(1);
    let traj = evolve_sampled(&rho0, &params, a.t_final, dt, every)?;

    let mut rows = Vec::with_capacity(traj.states.len());
    for (t, s) in traj.times.iter().zip(&traj.states) {
        rows.push((*t, trace_distance(s.matrix(), target.matrix())?, dissipation::c_parameter(s)?, s.purity()));
    }
    let text = match a.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut out = String::from("t,trace_distance_to_ss,c,purity\n");
            for (t, d, c, p) in &rows {
                out.push_str(&format!("{t},{d},{c},{p}\n"));
            }
            out
        }
        Format::Json => pretty(
            &rows
                .iter()
                .map(|(t, d, c, p)| json!({"t": t, "trace_distance_to_ss": d, "c": c, "purity": p}))
                .collect::<Vec<_>>(),
        ),
    };
    emit(&a.output, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn verify(a: VerifyArgs) -> anyhow::Result<ExitCode> {
    let fault = a.inject_fault.as_deref().map(str::parse::<Check>).transpose()?;
    let report = run_verify(a.seed, a.seeds, fault)?;
    emit(&a.output, &pretty(&report))?;
    if let Some(f) = &report.first_failure {
        eprintln!("property failure: {} at seed {} (residual {:e})", f.check, f.seed, f.residual);
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn power(a: PowerArgs) -> anyhow::Result<ExitCode> {
    let rho = match &a.state {
        Some(path) => load_state(path)?,
        None => steady_state(&SteadyStateParams { c: a.c, beta_e: a.beta_e, omega: a.omega })?,
    };
    let h = Hamiltonian::two_qubit(a.omega);
    let schedule = match a.schedule {
        ScheduleArg::Smoothstep => Schedule::Smoothstep,
        ScheduleArg::Sinusoidal => Schedule::Sinusoidal,
    };
    let protocol = build_protocol_with(&rho, &h, a.tau, schedule)?;
    let opts = PowerOptions { omega: a.omega_cap, ..PowerOptions::default() };
    let report = power_bound(&rho, &protocol, &opts)?;
    emit(&a.output, &pretty(&report))?;
    if !report.holds {
        eprintln!("property failure: average power {} exceeds bound {}", report.avg_power, report.power_bound);
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}
