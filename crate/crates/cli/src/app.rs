use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use carbundle::maneuvers::{
    cycle_step, parking_cycle_count, plan_parallel_park, DEFAULT_CYCLE_CAP,
};
use carbundle::transport::{fixed_steer_circle, fixed_steer_closed_form, integrate_with_limit};
use carbundle::{CarParams, Configuration, Error, ParkingOutcome, Sample, Trajectory};

use crate::scenario::Scenario;
use crate::svg::{self, SvgOptions};
use crate::trajectory_csv;
use crate::verify::{self, VerifyConfig};

/// Process exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    /// A verification check failed or a parking plan missed its contract.
    Failed = 1,
    /// Bad arguments or an invalid scenario file.
    Usage = 2,
    SteeringLimit = 3,
    CycleCap = 4,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "carbundle",
    version,
    about = "Car kinematics as a connection on the E(2) bundle: simulate, park, verify"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the driver program of a scenario file.
    Simulate(SimulateArgs),
    /// Plan and run a parallel-parking maneuver built from sideways cycles.
    Park(ParkArgs),
    /// Evaluate the exact fixed-steer circular arc.
    ClosedForm(ClosedFormArgs),
    /// Check the model's geometric identities numerically.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Trajectory CSV path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// SVG plot of the path.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Heading tick every N samples in the SVG (default: about 20 ticks).
    #[arg(long, value_name = "N")]
    pub tick_every: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario JSON file.
    pub scenario: PathBuf,
    /// Override the scenario's integration step.
    #[arg(long)]
    pub step: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CarArgs {
    /// Wheel radius R.
    #[arg(
        allow_hyphen_values = true,
        short = 'R',
        long = "wheel-radius",
        default_value_t = 1.0
    )]
    pub wheel_radius: f64,
    /// Tie-rod length l.
    #[arg(
        allow_hyphen_values = true,
        short = 'l',
        long = "rod-length",
        default_value_t = 1.0
    )]
    pub rod_length: f64,
}

#[derive(Debug, Args)]
pub struct PoseArgs {
    #[arg(allow_hyphen_values = true, long, default_value_t = 0.0)]
    pub x: f64,
    #[arg(allow_hyphen_values = true, long, default_value_t = 0.0)]
    pub y: f64,
    #[arg(allow_hyphen_values = true, long, default_value_t = 0.0)]
    pub phi: f64,
}

#[derive(Debug, Args)]
pub struct ParkArgs {
    /// Sideways shift to the right of the initial heading (negative: left).
    #[arg(allow_hyphen_values = true, long)]
    pub lateral: f64,
    /// Cycle size, in (0, 0.3].
    #[arg(allow_hyphen_values = true, long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = DEFAULT_CYCLE_CAP)]
    pub cycle_cap: u64,
    /// Integration step (further limited to eps/20).
    #[arg(allow_hyphen_values = true, long, default_value_t = 1e-3)]
    pub step: f64,
    #[arg(allow_hyphen_values = true, long, default_value_t = 0.0)]
    pub alpha: f64,
    #[arg(allow_hyphen_values = true, long, default_value_t = 0.0)]
    pub beta: f64,
    #[command(flatten)]
    pub pose: PoseArgs,
    #[command(flatten)]
    pub car: CarArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ClosedFormArgs {
    /// Fixed steering angle.
    #[arg(allow_hyphen_values = true, long)]
    pub beta0: f64,
    /// Wheel rotation driven.
    #[arg(allow_hyphen_values = true, long)]
    pub alpha: f64,
    #[command(flatten)]
    pub pose: PoseArgs,
    #[command(flatten)]
    pub car: CarArgs,
    /// Also sample the arc at this many intervals and write it as CSV.
    #[arg(long, default_value_t = 0)]
    pub samples: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random samples per identity check.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Replace every tolerance with this value.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Tolerance for one check, as CHECK=VALUE (repeatable).
    #[arg(long = "tol", value_name = "CHECK=VALUE", value_parser = parse_override)]
    pub tol: Vec<(String, f64)>,
}

fn parse_override(s: &str) -> Result<(String, f64), String> {
    let (key, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected CHECK=VALUE, got `{s}`"))?;
    let value: f64 = value
        .parse()
        .map_err(|e| format!("tolerance for `{key}`: {e}"))?;
    Ok((key.to_owned(), value))
}

/// A failed command: exit status plus a message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub exit: Exit,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            exit: Exit::Usage,
            message: message.into(),
        }
    }

    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        Self {
            exit: Exit::Failed,
            message: format!("cannot write {}: {e}", path.display()),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let exit = match e {
            Error::SteeringLimit { .. } => Exit::SteeringLimit,
            Error::CycleCapExceeded { .. } => Exit::CycleCap,
            _ => Exit::Usage,
        };
        Self {
            exit,
            message: e.to_string(),
        }
    }
}

type CommandResult = Result<Exit, Failure>;

/// Parses `args` and runs the command, writing normal output to `out` and
/// diagnostics to `err`. Returns the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                Exit::Usage.code()
            } else {
                // --help and --version
                let _ = write!(out, "{}", e.render());
                Exit::Success.code()
            };
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => simulate(&a, out, err),
        Command::Park(a) => park(&a, out),
        Command::ClosedForm(a) => closed_form(&a, out),
        Command::Verify(a) => run_verify(&a, out, err),
    };
    match result {
        Ok(exit) => exit.code(),
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.exit.code()
        }
    }
}

fn car_params(car: &CarArgs) -> Result<CarParams, Failure> {
    CarParams::new(car.wheel_radius, car.rod_length).map_err(|e| Failure::usage(e.to_string()))
}

fn write_outputs(
    trajectory: &Trajectory,
    output: &OutputArgs,
    out: &mut dyn Write,
    csv_to_stdout: bool,
) -> Result<(), Failure> {
    match &output.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| Failure::io(path, e))?;
            trajectory_csv::write_trajectory(BufWriter::new(file), trajectory)
                .map_err(|e| Failure::io(path, e))?;
        }
        None if csv_to_stdout => {
            trajectory_csv::write_trajectory(&mut *out, trajectory)
                .map_err(|e| Failure::io(Path::new("<stdout>"), e))?;
        }
        None => {}
    }
    if let Some(path) = &output.svg {
        let options = match output.tick_every {
            Some(n) => SvgOptions {
                tick_every: n,
                ..SvgOptions::default()
            },
            None => SvgOptions::auto_ticks(trajectory.len()),
        };
        std::fs::write(path, svg::render(trajectory, &options))
            .map_err(|e| Failure::io(path, e))?;
    }
    Ok(())
}

fn simulate(args: &SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> CommandResult {
    let scenario = Scenario::load(&args.scenario).map_err(|e| Failure::usage(e.to_string()))?;
    let step = args.step.unwrap_or(scenario.step);
    if !(step.is_finite() && step > 0.0) {
        return Err(Failure::usage(format!(
            "--step must be finite and positive, got {step}"
        )));
    }
    let trajectory = integrate_with_limit(
        &scenario.program,
        &scenario.initial,
        &scenario.params,
        step,
        scenario.steering_limit,
    )?;
    write_outputs(&trajectory, &args.output, out, true)?;
    let end = trajectory.end();
    let _ = writeln!(
        err,
        "{} samples; end t={:.6} x={:.9} y={:.9} phi={:.9}",
        trajectory.len(),
        end.t,
        end.config.pose.x,
        end.config.pose.y,
        end.config.pose.phi
    );
    Ok(Exit::Success)
}

fn park(args: &ParkArgs, out: &mut dyn Write) -> CommandResult {
    let k = car_params(&args.car)?;
    if !(args.step.is_finite() && args.step > 0.0) {
        return Err(Failure::usage(format!(
            "--step must be finite and positive, got {}",
            args.step
        )));
    }
    let start = Configuration::new(
        args.alpha,
        args.beta,
        args.pose.x,
        args.pose.y,
        args.pose.phi,
    );
    let program = plan_parallel_park(&start, args.lateral, args.eps, &k, args.cycle_cap)?;
    let cycles = parking_cycle_count(args.lateral, args.eps, &k);
    let step = cycle_step(args.step, args.eps);

    let trajectory = integrate_with_limit(&program, &start, &k, step, None)?;
    let outcome = ParkingOutcome::measure(&start, &trajectory.end().config, args.lateral, cycles);
    write_outputs(&trajectory, &args.output, out, false)?;

    let met = outcome.within_contract(args.eps);
    let _ = writeln!(out, "cycles: {cycles}");
    let _ = writeln!(out, "requested lateral: {:.6e}", -outcome.predicted_offset);
    let _ = writeln!(out, "achieved lateral: {:.6e}", -outcome.achieved_offset);
    let _ = writeln!(out, "relative error: {:.3e}", outcome.relative_error());
    let _ = writeln!(out, "heading change: {:.3e}", outcome.heading_change);
    let _ = writeln!(out, "contract: {}", if met { "met" } else { "missed" });
    Ok(if met { Exit::Success } else { Exit::Failed })
}

fn closed_form(args: &ClosedFormArgs, out: &mut dyn Write) -> CommandResult {
    let k = car_params(&args.car)?;
    if !(args.beta0.is_finite() && args.alpha.is_finite()) {
        return Err(Failure::usage("--beta0 and --alpha must be finite"));
    }
    let start = carbundle::Pose::new(args.pose.x, args.pose.y, args.pose.phi);
    let end = fixed_steer_closed_form(args.beta0, args.alpha, &start, &k);
    let _ = writeln!(out, "x: {:.16e}", end.x);
    let _ = writeln!(out, "y: {:.16e}", end.y);
    let _ = writeln!(out, "phi: {:.16e}", end.phi);
    match fixed_steer_circle(args.beta0, &start, &k) {
        Some(c) => {
            let _ = writeln!(out, "turning radius: {:.16e}", c.radius);
            let _ = writeln!(
                out,
                "turning center: {:.16e} {:.16e}",
                c.center[0], c.center[1]
            );
        }
        None => {
            let _ = writeln!(out, "turning radius: inf (straight line)");
        }
    }

    if args.samples > 0 {
        let n = args.samples;
        // time parameter: the wheel turns at unit rate
        let samples: Vec<Sample> = (0..=n)
            .map(|i| {
                let a = args.alpha * i as f64 / n as f64;
                let p = fixed_steer_closed_form(args.beta0, a, &start, &k);
                Sample {
                    t: a.abs(),
                    config: Configuration::new(a, args.beta0, p.x, p.y, p.phi),
                }
            })
            .collect();
        let trajectory = Trajectory::from_samples(samples)
            .ok_or_else(|| Failure::usage("--samples needs a non-zero --alpha"))?;
        write_outputs(&trajectory, &args.output, out, false)?;
    }
    Ok(Exit::Success)
}

fn run_verify(args: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> CommandResult {
    let config = VerifyConfig {
        seed: args.seed,
        samples: args.samples,
        tolerance: args.tolerance,
        overrides: args.tol.clone(),
    };
    config
        .check_overrides()
        .map_err(|e| Failure::usage(e.to_string()))?;
    if let Some(t) = config.tolerance.filter(|t| t.is_nan() || *t < 0.0) {
        return Err(Failure::usage(format!(
            "--tolerance must be non-negative, got {t}"
        )));
    }
    let results = verify::run_checks(&config);
    let _ = write!(out, "{}", verify::render_report(&config, &results));
    let failed: Vec<&str> = results
        .iter()
        .filter(|r| !r.passed())
        .map(|r| r.key)
        .collect();
    if failed.is_empty() {
        Ok(Exit::Success)
    } else {
        let _ = writeln!(err, "failed checks: {}", failed.join(", "));
        Ok(Exit::Failed)
    }
}
