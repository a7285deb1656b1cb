//! `jmm`: generate, analyze, fit, compare and export handover motions.
//!
//! Angles are degrees on the command line and in every file; everything is
//! radians inside the library.

mod config;

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use handover_jmm::analysis::{
    analyze, AnalysisConfig, KeypointRecording, NormalizedSeries, TrackConfig, TrackSeed,
};
use handover_jmm::fitting::{fit_poly7, fit_sigmoid_with, FitReport, LmSettings};
use handover_jmm::kinematics::RobotDefinition;
use handover_jmm::trajectory::{
    compare, generate_jmm, generate_ljst, metrics, HandoverSpec, MetricsReport, Trajectory,
};
use handover_jmm::{
    ElbowVariant, EvalMode, ForearmDirection, PrimitiveKind, ProfileSet, SigmoidCoefficients,
};
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use config::{FileConfig, Overrides};

/// `println!` that tolerates a closed stdout (e.g. piped into `head`).
macro_rules! say {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

/// A failure with its process exit code: 2 for bad input, 1 for anything
/// that went wrong while computing.
#[derive(Debug)]
pub struct CliError {
    code: u8,
    msg: String,
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self {
            code: 2,
            msg: msg.into(),
        }
    }

    pub fn runtime(msg: impl Into<String>) -> Self {
        Self {
            code: 1,
            msg: msg.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.msg)
    }
}

impl From<handover_jmm::Error> for CliError {
    fn from(e: handover_jmm::Error) -> Self {
        Self {
            code: if e.is_validation() { 2 } else { 1 },
            msg: e.to_string(),
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "jmm", version, about = "Profile-based handover arm motions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a handover trajectory for a robot and write it as CSV.
    Generate(GenerateArgs),
    /// Recover a normalized joint profile from skeleton keypoints.
    Analyze(AnalyzeArgs),
    /// Fit a sigmoid or degree-7 polynomial to a normalized series.
    Fit(FitArgs),
    /// Compare two trajectory CSVs joint by joint.
    Compare(CompareArgs),
    /// Write profile curves or robot descriptions.
    #[command(subcommand)]
    Export(ExportCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    /// Profile-based joint motion
    Jmm,
    /// Linear joint-space baseline
    Ljst,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    V1,
    V2,
}

impl From<Variant> for ElbowVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::V1 => ElbowVariant::V1,
            Variant::V2 => ElbowVariant::V2,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Anchored,
    Literal,
}

impl From<Mode> for EvalMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Anchored => EvalMode::Anchored,
            Mode::Literal => EvalMode::Literal,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    Pronation,
    Supination,
}

impl From<Direction> for ForearmDirection {
    fn from(d: Direction) -> Self {
        match d {
            Direction::Pronation => ForearmDirection::Pronation,
            Direction::Supination => ForearmDirection::Supination,
        }
    }
}

fn parse_primitive_angle(s: &str) -> Result<(PrimitiveKind, f64), String> {
    let (k, v) = s.split_once('=').ok_or("expected <primitive>=<degrees>")?;
    let kind = PrimitiveKind::parse(k.trim()).map_err(|e| e.to_string())?;
    let deg: f64 = v
        .trim()
        .parse()
        .map_err(|_| format!("'{v}' is not a number"))?;
    if !deg.is_finite() {
        return Err("angle must be finite".into());
    }
    Ok((kind, deg))
}

#[derive(Args)]
struct GenerateArgs {
    /// JSON config with robot, defaults, endpoint angles (degrees) and
    /// coefficient overrides.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Builtin robot name (humanoid-arm, arm-5dof) or robot JSON path.
    #[arg(long)]
    robot: Option<String>,
    #[arg(long, value_enum, default_value_t = Model::Jmm)]
    model: Model,
    /// Elbow profile variant [default: v1].
    #[arg(long, value_enum)]
    variant: Option<Variant>,
    /// Handover duration, seconds [default: 1.2].
    #[arg(long)]
    duration: Option<f64>,
    /// Sample rate, Hz [default: 100].
    #[arg(long)]
    rate: Option<f64>,
    /// How profile curves map to joint angles [default: anchored].
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Forearm rotation label [default: pronation].
    #[arg(long, value_enum)]
    forearm: Option<Direction>,
    /// Start angle, `<primitive>=<degrees>`; repeatable.
    #[arg(long = "start", value_parser = parse_primitive_angle)]
    start: Vec<(PrimitiveKind, f64)>,
    /// End angle, `<primitive>=<degrees>`; repeatable.
    #[arg(long = "end", value_parser = parse_primitive_angle)]
    end: Vec<(PrimitiveKind, f64)>,
    /// Trajectory CSV (joint angles in degrees, end effector in meters).
    #[arg(long)]
    out: PathBuf,
    /// Also write the metrics report as JSON.
    #[arg(long)]
    metrics: Option<PathBuf>,
}

fn parse_analysis_primitive(s: &str) -> Result<PrimitiveKind, String> {
    match PrimitiveKind::parse(s).map_err(|e| e.to_string())? {
        PrimitiveKind::ForearmRotation => {
            Err("forearm rotation cannot be measured from keypoints".into())
        }
        k => Ok(k),
    }
}

fn parse_seed(s: &str) -> Result<TrackSeed, String> {
    match s {
        "leftmost" => Ok(TrackSeed::Leftmost),
        "rightmost" => Ok(TrackSeed::Rightmost),
        _ => {
            let v: Vec<f64> = s
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| "expected leftmost, rightmost or x0,y0,x1,y1".to_string())?;
            match v[..] {
                [x0, y0, x1, y1] if x0 <= x1 && y0 <= y1 => Ok(TrackSeed::Region([x0, y0, x1, y1])),
                _ => Err("region must be x0,y0,x1,y1 with x0<=x1 and y0<=y1".into()),
            }
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Keypoint recording (JSON).
    #[arg(long)]
    input: PathBuf,
    /// shoulder (flexion), adduction or elbow.
    #[arg(long, value_parser = parse_analysis_primitive)]
    primitive: PrimitiveKind,
    /// Directory for angles.csv, smoothed.csv, normalized.csv and label.json.
    #[arg(long)]
    out_dir: PathBuf,
    /// Person to follow: leftmost, rightmost or an image box x0,y0,x1,y1.
    #[arg(long, value_parser = parse_seed, default_value = "leftmost")]
    person: TrackSeed,
    /// Largest centroid jump between frames, image units [default: unlimited].
    #[arg(long)]
    max_jump: Option<f64>,
    /// Savitzky-Golay window, samples [default: 11 at >= 60 fps, else 5].
    #[arg(long, requires = "order")]
    window: Option<usize>,
    /// Savitzky-Golay polynomial order.
    #[arg(long, requires = "window")]
    order: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Profile {
    Sigmoid,
    Poly7,
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| "expected a,b,c".to_string())?;
    <[f64; 3]>::try_from(v).map_err(|_| "expected three numbers a,b,c".to_string())
}

#[derive(Args)]
struct FitArgs {
    #[arg(long, value_enum)]
    profile: Profile,
    /// Normalized series CSV (`u,v`).
    #[arg(long)]
    input: PathBuf,
    /// Pin the polynomial constant term (poly7 only).
    #[arg(long)]
    fix_intercept: Option<f64>,
    /// Sigmoid starting point a,b,c.
    #[arg(long, value_parser = parse_triple, default_value = "1,1,10")]
    init: [f64; 3],
    /// Levenberg-Marquardt iteration cap (sigmoid only).
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u32).range(1..))]
    max_iterations: u32,
    /// Fit report JSON; printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    a: PathBuf,
    b: PathBuf,
    /// Comparison JSON (radians, as in the library report).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Curve {
    /// Shoulder flexion sigmoid
    Shoulder,
    /// Shoulder adduction sigmoid
    Adduction,
    /// Elbow variant 1 polynomial
    ElbowV1,
    /// Elbow variant 2 polynomial
    ElbowV2,
    /// Forearm rotation polynomial
    Forearm,
}

#[derive(Subcommand)]
enum ExportCommand {
    /// Write a normalized profile curve `u,v` sampled on a uniform grid.
    Profile {
        #[arg(long, value_enum)]
        curve: Curve,
        /// Config whose `profiles` entry overrides the built-in coefficients.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 101)]
        points: usize,
        /// Standard deviation of added Gaussian noise, curve units.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a robot description as JSON (limits and rest angles in degrees).
    Robot {
        /// Builtin robot name or robot JSON path.
        #[arg(long)]
        robot: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn create(path: &Path) -> CliResult<fs::File> {
    fs::File::create(path)
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))
}

fn read_input(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::runtime(e.to_string()))?;
    fs::write(path, text + "\n")
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))
}

fn print_metrics(names: &[String], m: &MetricsReport) {
    say!(
        "{:<16} {:>16} {:>20}",
        "joint",
        "max |w| (deg/s)",
        "mean sq jerk (rad2/s6)"
    );
    for (j, name) in names.iter().enumerate() {
        say!(
            "{:<16} {:>16.3} {:>20.6e}",
            name,
            m.max_angular_velocity[j].to_degrees(),
            m.mean_squared_jerk[j]
        );
    }
    say!("end-effector path length: {:.6} m", m.ee_path_length);
    if let Some(err) = &m.endpoint_error {
        let worst = err.iter().copied().fold(0.0, f64::max);
        say!("max endpoint error: {:.3e} deg", worst.to_degrees());
    }
}

fn cmd_generate(args: GenerateArgs) -> CliResult {
    let file = match &args.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let r = config::resolve(
        file,
        Overrides {
            robot: args.robot,
            duration: args.duration,
            rate: args.rate,
            mode: args.mode.map(Into::into),
            variant: args.variant.map(Into::into),
            forearm_direction: args.forearm.map(Into::into),
            start_deg: args.start,
            end_deg: args.end,
        },
    )?;
    let mut spec = HandoverSpec::new(r.start, r.end, r.duration)?;
    spec.elbow_variant = r.variant;
    spec.forearm_direction = r.forearm_direction;
    spec.mode = r.mode;
    spec.windows = r.windows;
    spec.profiles = r.profiles;
    spec.validate()?;

    let traj = match args.model {
        Model::Jmm => generate_jmm(&spec, &r.robot, &r.mapping, r.rate)?,
        Model::Ljst => generate_ljst(&spec, &r.robot, &r.mapping, r.rate)?,
    };
    traj.write_csv(create(&args.out)?)?;
    let m = metrics(&traj)?;
    if let Some(path) = &args.metrics {
        write_json(path, &m)?;
    }
    say!(
        "{}: {} samples over {:.3} s at {} Hz -> {}",
        r.robot.name,
        traj.frames.len(),
        traj.duration(),
        r.rate,
        args.out.display()
    );
    if traj.clamped_frames > 0 {
        say!("joint limits hit in {} frames", traj.clamped_frames);
    }
    print_metrics(&traj.joint_names, &m);
    Ok(())
}

#[derive(Serialize)]
struct LabelFile {
    primitive: PrimitiveKind,
    t_start: f64,
    t_end: f64,
    label: Option<handover_jmm::analysis::VariantLabel>,
}

fn cmd_analyze(args: AnalyzeArgs) -> CliResult {
    let rec = KeypointRecording::from_json(&read_input(&args.input)?)
        .map_err(|e| CliError::usage(format!("{}: {e}", args.input.display())))?;
    let mut cfg = AnalysisConfig::new(args.primitive);
    cfg.seed = args.person;
    cfg.track = TrackConfig {
        radius: args.max_jump.unwrap_or(f64::INFINITY),
        ..TrackConfig::default()
    };
    if let (Some(w), Some(o)) = (args.window, args.order) {
        cfg.sg = Some((w, o));
    }
    let out = analyze(&rec, &cfg).map_err(|e| CliError::runtime(format!("stage {e}")))?;

    fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::runtime(format!("cannot create {}: {e}", args.out_dir.display())))?;
    out.raw
        .write_csv(create(&args.out_dir.join("angles.csv"))?)?;
    out.smoothed
        .write_csv(create(&args.out_dir.join("smoothed.csv"))?)?;
    out.normalized
        .write_csv(create(&args.out_dir.join("normalized.csv"))?)?;
    write_json(
        &args.out_dir.join("label.json"),
        &LabelFile {
            primitive: args.primitive,
            t_start: out.segment.t_start,
            t_end: out.segment.t_end,
            label: out.label,
        },
    )?;

    say!(
        "{}: motion {:.3}-{:.3} s ({} frames)",
        args.primitive,
        out.segment.t_start,
        out.segment.t_end,
        out.segment.i_end - out.segment.i_start + 1
    );
    if let Some(l) = out.label {
        say!(
            "label {:?}: min at u={:.2}, rebound {:.3}",
            l.label,
            l.u_min,
            l.rebound
        );
    }
    Ok(())
}

fn cmd_fit(args: FitArgs) -> CliResult {
    let text = read_input(&args.input)?;
    let data = NormalizedSeries::read_csv(text.as_bytes())
        .map_err(|e| CliError::usage(format!("{}: {e}", args.input.display())))?;
    let report: FitReport = match args.profile {
        Profile::Sigmoid => {
            if args.fix_intercept.is_some() {
                return Err(CliError::usage("--fix-intercept applies to poly7 only"));
            }
            let [a, b, c] = args.init;
            let lm = LmSettings {
                max_iterations: args.max_iterations as usize,
                ..LmSettings::default()
            };
            fit_sigmoid_with(&data, &SigmoidCoefficients::new(a, b, c)?, &lm)?
        }
        Profile::Poly7 => fit_poly7(&data, args.fix_intercept)?,
    };
    match &args.out {
        Some(path) => {
            write_json(path, &report)?;
            say!(
                "{}: sse {:.6e}, r2 {:.6}, {} iterations, converged {}",
                report.model.name(),
                report.sse,
                report.r_squared,
                report.iterations,
                report.converged
            );
        }
        None => {
            let text = serde_json::to_string_pretty(&report)
                .map_err(|e| CliError::runtime(e.to_string()))?;
            say!("{text}");
        }
    }
    if !report.converged {
        return Err(CliError::runtime(format!(
            "fit did not converge after {} iterations (report written)",
            report.iterations
        )));
    }
    Ok(())
}

fn read_trajectory(path: &Path) -> CliResult<Trajectory> {
    let text = read_input(path)?;
    Trajectory::read_csv(text.as_bytes())
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn cmd_compare(args: CompareArgs) -> CliResult {
    let a = read_trajectory(&args.a)?;
    let b = read_trajectory(&args.b)?;
    if a.joint_names.len() != b.joint_names.len() {
        return Err(CliError::usage(format!(
            "joint counts differ: {} has {}, {} has {}",
            args.a.display(),
            a.joint_names.len(),
            args.b.display(),
            b.joint_names.len()
        )));
    }
    let c = compare(&a, &b)?;
    if let Some(path) = &args.out {
        write_json(path, &c)?;
    }
    say!(
        "{:<16} {:>14} {:>14} {:>14} {:>14} {:>14}",
        "joint",
        "max diff",
        "start diff",
        "end diff",
        "max |w| a",
        "max |w| b"
    );
    for (j, name) in c.joint_names.iter().enumerate() {
        say!(
            "{:<16} {:>14.6} {:>14.6} {:>14.6} {:>14.3} {:>14.3}",
            name,
            c.max_difference[j].to_degrees(),
            c.start_difference[j].to_degrees(),
            c.end_difference[j].to_degrees(),
            c.a.max_angular_velocity[j].to_degrees(),
            c.b.max_angular_velocity[j].to_degrees()
        );
    }
    say!("(angles in degrees, velocities in deg/s)");
    say!(
        "end-effector path length: a {:.6} m, b {:.6} m",
        c.a.ee_path_length,
        c.b.ee_path_length
    );
    Ok(())
}

fn cmd_export(cmd: ExportCommand) -> CliResult {
    match cmd {
        ExportCommand::Profile {
            curve,
            config,
            points,
            noise,
            seed,
            out,
        } => {
            if points < 2 {
                return Err(CliError::usage("--points must be at least 2"));
            }
            if !(noise >= 0.0 && noise.is_finite()) {
                return Err(CliError::usage(
                    "--noise must be a finite, non-negative number",
                ));
            }
            let profiles = match config {
                Some(p) => FileConfig::load(&p)?.profiles.unwrap_or_default(),
                None => ProfileSet::default(),
            };
            let eval = |u: f64| -> handover_jmm::Result<f64> {
                use handover_jmm::profiles::{eval_poly7, eval_sigmoid};
                match curve {
                    Curve::Shoulder => eval_sigmoid(&profiles.shoulder_flexion, u),
                    Curve::Adduction => eval_sigmoid(&profiles.shoulder_adduction, u),
                    Curve::ElbowV1 => eval_poly7(&profiles.elbow_v1, u),
                    Curve::ElbowV2 => eval_poly7(&profiles.elbow_v2, u),
                    Curve::Forearm => eval_poly7(&profiles.forearm, u),
                }
            };
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            let dist = Normal::new(0.0, noise).map_err(|e| CliError::usage(e.to_string()))?;
            let u: Vec<f64> = (0..points)
                .map(|i| i as f64 / (points - 1) as f64)
                .collect();
            let v = u
                .iter()
                .map(|&x| {
                    Ok(eval(x)?
                        + if noise > 0.0 {
                            dist.sample(&mut rng)
                        } else {
                            0.0
                        })
                })
                .collect::<handover_jmm::Result<Vec<f64>>>()?;
            NormalizedSeries::new(u, v)?.write_csv(create(&out)?)?;
        }
        ExportCommand::Robot { robot, out } => {
            let (model, mapping) = config::robot_from_source(&robot)?;
            let text = RobotDefinition::from_model(&model, &mapping).to_json()?;
            create(&out)?
                .write_all((text + "\n").as_bytes())
                .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", out.display())))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Export(c) => cmd_export(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
