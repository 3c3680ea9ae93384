use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cervipre::imagecore::{io, Connectivity};
use cervipre::inpaint::HarmonicSolverConfig;
use cervipre::pipeline::batch::{collect_inputs, process_batch, thread_cap_from_env};
use cervipre::pipeline::eval::{eval_directories, load_groups, Group};
use cervipre::pipeline::synth::{generate_synthetic, SyntheticSpec};
use cervipre::pipeline::PipelineConfig;
use cervipre::specular::SpecularConfig;
use cervipre::Error;

const EXIT_FAILURES: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "cervipre",
    version,
    about = "Glare removal and cervix ROI extraction for colposcopy images"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Remove glare and extract the ROI from each input image.
    Process(ProcessArgs),
    /// Generate synthetic cervigrams with ground-truth masks.
    Synth(SynthArgs),
    /// Grade saved ROI masks against ground truth.
    Eval(EvalArgs),
}

#[derive(Args)]
struct ProcessArgs {
    /// Image files or directories of images.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Per-channel white cutoff in (0, 1].
    #[arg(long, default_value_t = SpecularConfig::default().white_threshold)]
    threshold: f64,
    #[arg(long, default_value_t = SpecularConfig::default().se_radius)]
    se_radius: u32,
    #[arg(long, default_value_t = PipelineConfig::default().k)]
    k: usize,
    #[arg(long, default_value_t = PipelineConfig::default().seed)]
    seed: u64,
    /// Solver residual tolerance.
    #[arg(long, default_value_t = HarmonicSolverConfig::default().tolerance)]
    tol: f64,
    #[arg(long, default_value_t = HarmonicSolverConfig::default().max_iterations)]
    max_iters: usize,
    /// SOR relaxation factor in (0, 2).
    #[arg(long, default_value_t = HarmonicSolverConfig::default().relaxation_factor)]
    omega: f64,
    /// Connectivity for ROI components: 4 or 8.
    #[arg(long, default_value_t = 8)]
    connectivity: u32,
    /// Record per-stage wall-clock times in the reports.
    #[arg(long)]
    timings: bool,
    /// Print all reports as a JSON array on stdout.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    count: u32,
    /// Seed of the first image; image i uses seed + i.
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    speckles: Option<u32>,
    #[arg(long)]
    speckle_size: Option<u32>,
    #[arg(long)]
    width: Option<u32>,
    #[arg(long)]
    height: Option<u32>,
    #[arg(long)]
    semi_axis_x: Option<f64>,
    #[arg(long)]
    semi_axis_y: Option<f64>,
    #[arg(long)]
    noise: Option<u8>,
    #[arg(long)]
    no_text_bar: bool,
    /// Make every Nth image a diseased case with acetowhite patches (0 = none).
    #[arg(long, default_value_t = 0)]
    diseased_every: u32,
}

#[derive(Args)]
struct EvalArgs {
    /// Directory holding predicted `<stem>.roimask.png` files.
    #[arg(long)]
    pred: PathBuf,
    /// Directory holding ground-truth `<stem>.roimask.png` files.
    #[arg(long)]
    truth: PathBuf,
    /// JSON object mapping each stem to "normal" or "diseased".
    #[arg(long)]
    groups: PathBuf,
    #[arg(long, default_value_t = cervipre::roi::DEFAULT_SLACK)]
    slack: f64,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Process(args) => run_process(args),
        Command::Synth(args) => run_synth(args),
        Command::Eval(args) => run_eval(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::InvalidConfig(_) | Error::InvalidSpec(_)) {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::from(EXIT_FAILURES)
            }
        }
    }
}

fn run_process(args: ProcessArgs) -> cervipre::Result<ExitCode> {
    let connectivity = Connectivity::from_count(args.connectivity)
        .ok_or_else(|| Error::InvalidConfig(format!("connectivity must be 4 or 8, got {}", args.connectivity)))?;
    let cfg = PipelineConfig {
        specular: SpecularConfig {
            white_threshold: args.threshold,
            se_radius: args.se_radius,
        },
        solver: HarmonicSolverConfig {
            tolerance: args.tol,
            max_iterations: args.max_iters,
            relaxation_factor: args.omega,
        },
        k: args.k,
        seed: args.seed,
        connectivity,
        record_timings: args.timings,
        ..PipelineConfig::default()
    };
    cfg.validate()?;

    let inputs = collect_inputs(&args.inputs)?;
    let reports = process_batch(&inputs, &args.out, &cfg, thread_cap_from_env())?;

    let mut failed = 0;
    for r in &reports {
        match (&r.error, &r.roi) {
            (None, Some(roi)) => eprintln!(
                "ok      {}: glare {} px, roi {} px ({:.1}%)",
                r.input_path,
                r.specular_pixel_count,
                roi.pixel_count,
                roi.area_fraction * 100.0
            ),
            (err, _) => {
                failed += 1;
                eprintln!(
                    "FAILED  {}: {}",
                    r.input_path,
                    err.as_deref().unwrap_or("unknown error")
                );
            }
        }
    }
    if args.json {
        println!("{}", serde_json::to_string_pretty(&reports).expect("reports serialize"));
    }
    eprintln!("{} processed, {} failed", reports.len(), failed);
    Ok(if failed > 0 {
        ExitCode::from(EXIT_FAILURES)
    } else {
        ExitCode::SUCCESS
    })
}

fn mkdir(path: &Path) -> cervipre::Result<()> {
    std::fs::create_dir_all(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn run_synth(args: SynthArgs) -> cervipre::Result<ExitCode> {
    let defaults = SyntheticSpec::default();
    let spec = SyntheticSpec {
        speckles: args.speckles.unwrap_or(defaults.speckles),
        speckle_size: args.speckle_size.unwrap_or(defaults.speckle_size),
        width: args.width.unwrap_or(defaults.width),
        height: args.height.unwrap_or(defaults.height),
        semi_axis_x: args.semi_axis_x.unwrap_or(defaults.semi_axis_x),
        semi_axis_y: args.semi_axis_y.unwrap_or(defaults.semi_axis_y),
        noise: args.noise.unwrap_or(defaults.noise),
        text_bar: !args.no_text_bar,
        ..defaults
    };
    spec.validate()?;

    let images = args.out.join("images");
    let truth = args.out.join("truth");
    mkdir(&images)?;
    mkdir(&truth)?;

    let mut groups = BTreeMap::new();
    for i in 0..args.count {
        let seed = args.seed + i as u64;
        let diseased = args.diseased_every > 0 && (i + 1) % args.diseased_every == 0;
        let spec = SyntheticSpec {
            acetowhite_patches: if diseased { 2 } else { 0 },
            ..spec.clone()
        };
        let sample = generate_synthetic(seed, &spec)?;
        let stem = format!("synth_{seed:05}");
        io::save_png(&sample.image, &images.join(format!("{stem}.png")))?;
        io::save_mask_png(&sample.roi_truth, &truth.join(format!("{stem}.roimask.png")))?;
        io::save_mask_png(&sample.glare_truth, &truth.join(format!("{stem}.glaremask.png")))?;
        groups.insert(stem, if diseased { Group::Diseased } else { Group::Normal });
    }
    let groups_path = args.out.join("groups.json");
    let text = serde_json::to_string_pretty(&groups).expect("groups serialize") + "\n";
    std::fs::write(&groups_path, text).map_err(|source| Error::Io {
        path: groups_path.clone(),
        source,
    })?;
    eprintln!("wrote {} images to {}", args.count, args.out.display());
    Ok(ExitCode::SUCCESS)
}

fn run_eval(args: EvalArgs) -> cervipre::Result<ExitCode> {
    cervipre::roi::validate_slack(args.slack)?;
    let groups = load_groups(&args.groups)?;
    let report = eval_directories(&args.pred, &args.truth, &groups, args.slack)?;
    print!("{}", report.to_json());
    for g in &report.summary.groups {
        eprintln!(
            "{:<8} n={:<4} correct {:5.1}%  more {:5.1}%  less {:5.1}%  failed {:5.1}%",
            format!("{:?}", g.group).to_lowercase(),
            g.total,
            g.correct.percent,
            g.more.percent,
            g.less.percent,
            g.failed.percent
        );
    }
    Ok(if report.summary.failed() > 0 {
        ExitCode::from(EXIT_FAILURES)
    } else {
        ExitCode::SUCCESS
    })
}
