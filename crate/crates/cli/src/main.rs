use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use raybench::animation::AnimationError;
use raybench::bench::{self, BenchError, MicroResult, SweepConfig};
use raybench::metrics::{load_model, summarize};
use raybench::renderer::{render_image, RenderSettings};
use raybench::scene::{parse_scene, Scene};

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ExitStatus {
    Success = 0,
    Usage = 1,
    Input = 2,
    Runtime = 3,
}

struct Failure {
    status: ExitStatus,
    message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Failure {
        Failure { status: ExitStatus::Input, message: message.to_string() }
    }

    fn runtime(message: impl ToString) -> Failure {
        Failure { status: ExitStatus::Runtime, message: message.to_string() }
    }

    fn usage(message: impl ToString) -> Failure {
        Failure { status: ExitStatus::Usage, message: message.to_string() }
    }
}

impl From<BenchError> for Failure {
    fn from(e: BenchError) -> Failure {
        match e {
            BenchError::InvalidArgument(_) => Failure::usage(e),
            BenchError::Scene(_) => Failure::input(e),
            BenchError::Animation(AnimationError::Write { .. }) => Failure::runtime(e),
            BenchError::Animation(_) => Failure::input(e),
            _ => Failure::runtime(e),
        }
    }
}

#[derive(Parser)]
#[command(name = "raybench", version, about = "Ray tracer, CPU-time benchmarks and OO metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render one frame of a scene to a TGA file.
    Render {
        scene: PathBuf,
        out: PathBuf,
        #[command(flatten)]
        opts: RenderOpts,
    },
    /// Render every step of the scene's paths as frame_NNNNN.tga plus timings.csv.
    Animate {
        scene: PathBuf,
        out_dir: PathBuf,
        #[command(flatten)]
        opts: RenderOpts,
    },
    /// Timing experiments.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Print size and class-level metrics for a class model file.
    Metrics {
        model: PathBuf,
        /// Also write the report as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RenderOpts {
    /// Override the camera's image size, e.g. 1024x768.
    #[arg(long, value_parser = parse_size)]
    size: Option<(u32, u32)>,
    /// Override the scene's recursion limit.
    #[arg(long)]
    max_depth: Option<u32>,
    #[arg(long, value_enum, default_value_t = Toggle::On)]
    parallel: Toggle,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Average flat-scan frame time against object count.
    Sweep {
        #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u32).range(1..),
              default_values_t = bench::DEFAULT_SWEEP_COUNTS.map(|c| c as u32))]
        counts: Vec<u32>,
        #[arg(long, default_value_t = bench::DEFAULT_FRAMES_PER_POINT as u32,
              value_parser = clap::value_parser!(u32).range(1..))]
        frames: u32,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_parser = parse_size, default_value = "320x240")]
        size: (u32, u32),
        /// CSV output path (the report is always printed too).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Virtual set_position call loop.
    Micro {
        #[arg(long, default_value_t = bench::DEFAULT_MICRO_SPHERES as u64,
              value_parser = clap::value_parser!(u64).range(1..))]
        spheres: u64,
        #[arg(long, default_value_t = bench::DEFAULT_MICRO_REPEATS,
              value_parser = clap::value_parser!(u64).range(1..))]
        repeats: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_size(s: &str) -> Result<(u32, u32), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or("expected WIDTHxHEIGHT")?;
    let w: u32 = w.parse().map_err(|_| format!("bad width `{w}`"))?;
    let h: u32 = h.parse().map_err(|_| format!("bad height `{h}`"))?;
    if w == 0 || h == 0 || w > u16::MAX as u32 || h > u16::MAX as u32 {
        return Err(format!("size must be between 1 and {} per side", u16::MAX));
    }
    Ok((w, h))
}

fn load_scene(path: &Path, opts: &RenderOpts) -> Result<(Scene, RenderSettings), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let mut scene = parse_scene(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    if let Some((w, h)) = opts.size {
        scene.camera = scene.camera.with_size(w, h).map_err(Failure::usage)?;
    }
    if let Some(d) = opts.max_depth {
        scene.max_depth = d;
    }
    let settings = RenderSettings {
        parallel: opts.parallel == Toggle::On,
        ..RenderSettings::for_scene(&scene)
    };
    Ok((scene, settings))
}

fn write_csv<T: bench::ReportRow>(rows: &[T], out: Option<&Path>) -> Result<(), Failure> {
    bench::write_report_to(rows, std::io::stdout().lock())?;
    if let Some(path) = out {
        bench::write_report(rows, path)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Render { scene, out, opts } => {
            let (scene, settings) = load_scene(&scene, &opts)?;
            let (ms, image) = bench::time_cpu(|| render_image(&scene, &settings))?;
            image
                .write_to(&out)
                .map_err(|e| Failure::runtime(format!("{}: {e}", out.display())))?;
            println!("frame_index,cpu_millis");
            println!("0,{ms}");
        }
        Command::Animate { scene, out_dir, opts } => {
            let (scene, settings) = load_scene(&scene, &opts)?;
            raybench::animation::frame_count(&scene).map_err(Failure::input)?;
            std::fs::create_dir_all(&out_dir).map_err(|e| Failure::runtime(format!("{}: {e}", out_dir.display())))?;
            let (paths, timings) = bench::time_animation_to_dir(&scene, &settings, &out_dir)?;
            bench::write_report(&timings, &out_dir.join("timings.csv"))?;
            eprintln!("wrote {} frames to {}", paths.len(), out_dir.display());
            bench::write_report_to(&timings, std::io::stdout().lock())?;
        }
        Command::Bench(BenchCommand::Sweep { counts, frames, seed, size, out }) => {
            let config = SweepConfig {
                counts: counts.into_iter().map(|c| c as usize).collect(),
                frames_per_point: frames as usize,
                seed,
                width: size.0,
                height: size.1,
            };
            let points = bench::sweep_objects(&config)?;
            write_csv(&points, out.as_deref())?;
        }
        Command::Bench(BenchCommand::Micro { spheres, repeats, out }) => {
            let spheres = usize::try_from(spheres).map_err(Failure::usage)?;
            let result: MicroResult = bench::micro_set_position(spheres, repeats)?;
            write_csv(&[result], out.as_deref())?;
        }
        Command::Metrics { model, csv } => {
            let text = std::fs::read_to_string(&model).map_err(|e| Failure::input(format!("{}: {e}", model.display())))?;
            let model_data = load_model(&text).map_err(|e| Failure::input(format!("{}: {e}", model.display())))?;
            let report = summarize(&model_data);
            print!("{report}");
            if let Some(path) = csv {
                std::fs::write(&path, report.to_csv()).map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let status = if e.use_stderr() { ExitStatus::Usage } else { ExitStatus::Success };
            let _ = e.print();
            return ExitCode::from(status as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::from(ExitStatus::Success as u8),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.status as u8)
        }
    }
}
