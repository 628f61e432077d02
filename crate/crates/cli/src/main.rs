use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use yfi_core::calibration::{
    build_profile, load_knowledge, load_profile, save_profile, CalibrationOptions,
    CalibrationProfile, Comparator, SeSpec,
};
use yfi_core::detection::{detect, DetectionReport};
use yfi_core::overlay::save_overlay;
use yfi_core::raster::{load_mask, load_raster, save_mask, save_raster, Connectivity};
use yfi_core::score::score_masks;
use yfi_core::spectral::build_stack;
use yfi_core::synth::{
    generate_scene, make_knowledge_from_truth, KnowledgeSelector, LandClass, SceneSpec,
};

#[derive(Parser, Debug)]
#[command(
    name = "yfi",
    version,
    about = "Flowering Yellow Flag Iris detection in multispectral orthomosaics"
)]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic scene with ground truth.
    Synth(SynthArgs),
    /// Calibrate a detection profile from a raster and a labeled mask.
    Calibrate(CalibrateArgs),
    /// Detect flowering stands with a calibrated profile.
    Detect(DetectArgs),
    /// Score a detection mask against a truth mask.
    Score(ScoreArgs),
    /// Print a summary of a detection report.
    Report(ReportArgs),
    /// Render the GREEN channel with accepted-region outlines.
    Overlay(OverlayArgs),
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// Scene description (JSON).
    spec: PathBuf,
    outdir: PathBuf,
    /// Overrides the seed in the scene description.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of iris patches marked as labeled knowledge (default: all).
    #[arg(long)]
    labeled: Option<usize>,
}

#[derive(Args, Debug)]
struct CalibrateArgs {
    raster: PathBuf,
    /// Labeled knowledge mask (PGM).
    kmask: PathBuf,
    /// Output profile (JSON).
    profile: PathBuf,
    #[arg(long, default_value = "8", value_parser = parse_connectivity)]
    connectivity: Connectivity,
    #[arg(long, default_value_t = 0.95, value_parser = parse_fraction)]
    retention: f64,
    #[arg(long, default_value_t = 0.01, value_parser = parse_fraction)]
    peak_fraction: f64,
    /// Reference subset id for channel ranges (1-based).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    ref_subset: Option<u32>,
    #[arg(long, default_value_t = 15, value_parser = parse_odd)]
    se_diamond: usize,
    #[arg(long, default_value_t = 3, value_parser = parse_odd)]
    se_cross: usize,
    #[arg(long, default_value_t = 5, value_parser = parse_odd)]
    se_square: usize,
    #[arg(long, default_value_t = 18, value_parser = parse_positive)]
    se_disk: usize,
    /// Accept regions only when peak counts strictly exceed the minima.
    #[arg(long)]
    strict: bool,
}

#[derive(Args, Debug)]
struct DetectArgs {
    raster: PathBuf,
    profile: PathBuf,
    outdir: PathBuf,
    /// Also write overlay.png.
    #[arg(long)]
    overlay: bool,
}

#[derive(Args, Debug)]
struct ScoreArgs {
    /// Final detection mask (PGM).
    mask: PathBuf,
    /// Ground-truth mask (PGM).
    truth: PathBuf,
    /// Write metrics here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReportArgs {
    report: PathBuf,
}

#[derive(Args, Debug)]
struct OverlayArgs {
    raster: PathBuf,
    report: PathBuf,
    out: PathBuf,
}

fn parse_connectivity(s: &str) -> Result<Connectivity, String> {
    match s {
        "4" => Ok(Connectivity::Four),
        "8" => Ok(Connectivity::Eight),
        _ => Err(format!("expected 4 or 8, got {s}")),
    }
}

fn parse_fraction(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("must lie strictly between 0 and 1, got {v}"))
    }
}

fn parse_positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        Ok(_) => Err("must be positive".into()),
        Err(e) => Err(format!("{e}")),
    }
}

fn parse_odd(s: &str) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|e| format!("{e}"))?;
    if v % 2 == 1 {
        Ok(v)
    } else {
        Err(format!("must be an odd positive size, got {v}"))
    }
}

fn create_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn cmd_synth(args: &SynthArgs) -> anyhow::Result<()> {
    let text = fs::read(&args.spec).with_context(|| format!("reading {}", args.spec.display()))?;
    let mut spec: SceneSpec = serde_json::from_slice(&text)
        .with_context(|| format!("parsing scene spec {}", args.spec.display()))?;
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    let scene = generate_scene(&spec)?;
    create_dir(&args.outdir)?;
    save_raster(&scene.raster, args.outdir.join("scene.json"))?;
    let truth = &scene.truth;
    save_mask(&truth.yfi_mask, args.outdir.join("truth_yfi.pgm"))?;
    save_mask(
        &truth.class_mask(LandClass::Water),
        args.outdir.join("truth_water.pgm"),
    )?;
    save_mask(
        &truth.class_mask(LandClass::GreenVegetation),
        args.outdir.join("truth_vegetation.pgm"),
    )?;
    let selector = match args.labeled {
        Some(n) => KnowledgeSelector::First(n),
        None => KnowledgeSelector::All,
    };
    match make_knowledge_from_truth(truth, &selector, Connectivity::Eight) {
        Ok(k) => save_mask(&k.mask_k, args.outdir.join("knowledge.pgm"))?,
        Err(e) => log::warn!("no knowledge mask written: {e}"),
    }
    let doc = serde_json::json!({
        "patches": truth.patches,
        "flowers": truth.flower_positions,
        "flower_footprint": truth.flower_footprint,
    });
    let mut bytes = serde_json::to_vec_pretty(&doc)?;
    bytes.push(b'\n');
    let path = args.outdir.join("truth.json");
    fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
    println!(
        "scene {}x{} seed {}: {} iris patches, {} flowers -> {}",
        spec.width,
        spec.height,
        spec.seed,
        truth.patch_ids(LandClass::Yfi).len(),
        truth.flower_positions.len(),
        args.outdir.display()
    );
    Ok(())
}

fn print_profile_summary(p: &CalibrationProfile) {
    println!(
        "L = {} labeled subsets, reference subset {}",
        p.q_green.len(),
        p.reference_subset
    );
    for (name, q) in [
        ("GREEN", &p.channels.green),
        ("RED", &p.channels.red),
        ("NDVI", &p.channels.ndvi),
        ("CIGREEN", &p.channels.cigreen),
        ("CIEDGE", &p.channels.ciedge),
    ] {
        println!(
            "  {name:<8} open [{:.6}, {:.6}]  close [{:.6}, {:.6}]",
            q.t_open_lo, q.t_open_hi, q.t_close_lo, q.t_close_hi
        );
    }
    println!("  T_a green {:.6}  red {:.6}", p.t_a_green, p.t_a_red);
    println!("  Q_green {:?}", p.q_green);
    println!("  Q_red   {:?}", p.q_red);
    println!("  q_min green {}  red {}", p.q_min_green, p.q_min_red);
}

fn cmd_calibrate(args: &CalibrateArgs) -> anyhow::Result<()> {
    let raster = load_raster(&args.raster)?;
    let stack = build_stack(&raster)?;
    let k = load_knowledge(&args.kmask, args.connectivity)?;
    let options = CalibrationOptions {
        retention: args.retention,
        peak_fraction: args.peak_fraction,
        connectivity: args.connectivity,
        se: SeSpec {
            diamond: args.se_diamond,
            cross: args.se_cross,
            square: args.se_square,
            disk: args.se_disk,
        },
        reference_subset: args.ref_subset,
        comparator: if args.strict {
            Comparator::Greater
        } else {
            Comparator::AtLeast
        },
        ..Default::default()
    };
    let profile = build_profile(&stack, &k, &options)?;
    if let Some(dir) = args.profile.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    save_profile(&profile, &args.profile)?;
    print_profile_summary(&profile);
    println!(
        "profile {} -> {}",
        profile.fingerprint(),
        args.profile.display()
    );
    Ok(())
}

fn image_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn cmd_detect(args: &DetectArgs) -> anyhow::Result<()> {
    let profile = load_profile(&args.profile)?;
    let raster = load_raster(&args.raster)?;
    let stack = build_stack(&raster)?;
    let mut report = detect(&stack, &profile)?;
    report.image_id = image_id(&args.raster);
    create_dir(&args.outdir)?;
    save_mask(&report.final_mask_f, args.outdir.join("final_mask.pgm"))?;
    let path = args.outdir.join("report.json");
    fs::write(&path, report.to_json()?).with_context(|| format!("writing {}", path.display()))?;
    if args.overlay {
        save_overlay(
            &args.outdir.join("overlay.png"),
            raster.band("GREEN")?,
            &report,
        )?;
    }
    println!(
        "{} accepted, {} rejected (stages {} -> {} -> {})",
        report.detections.len(),
        report.rejected.len(),
        report.stage_counts.raw,
        report.stage_counts.after_open5,
        report.stage_counts.after_dilate_close18
    );
    Ok(())
}

fn cmd_score(args: &ScoreArgs) -> anyhow::Result<()> {
    let mask = load_mask(&args.mask)?;
    let truth = load_mask(&args.truth)?;
    let metrics = score_masks(&mask, &truth, Connectivity::Eight)?;
    let mut bytes = serde_json::to_vec_pretty(&metrics)?;
    bytes.push(b'\n');
    match &args.out {
        Some(path) => {
            fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{}", String::from_utf8(bytes)?),
    }
    Ok(())
}

fn read_report(path: &Path) -> anyhow::Result<DetectionReport> {
    let text = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_slice(&text).with_context(|| format!("parsing report {}", path.display()))
}

fn cmd_report(args: &ReportArgs) -> anyhow::Result<()> {
    let report = read_report(&args.report)?;
    println!(
        "image {}  profile {}",
        report.image_id, report.profile_fingerprint
    );
    println!(
        "stages: raw {}  after open5 {}  after dilate/close18 {}",
        report.stage_counts.raw,
        report.stage_counts.after_open5,
        report.stage_counts.after_dilate_close18
    );
    println!("accepted {}", report.detections.len());
    for d in &report.detections {
        println!(
            "  #{:<4} area {:>7}  centroid ({:.1}, {:.1})  q_green {:>3}  q_red {:>3}",
            d.id, d.area, d.centroid[0], d.centroid[1], d.q_green, d.q_red
        );
    }
    println!("rejected {}", report.rejected.len());
    Ok(())
}

fn cmd_overlay(args: &OverlayArgs) -> anyhow::Result<()> {
    let raster = load_raster(&args.raster)?;
    let report = read_report(&args.report)?;
    let green = raster.band("GREEN")?;
    if let Some(d) = report.detections.iter().find(|d| {
        d.polygon
            .iter()
            .any(|&[r, c]| r >= green.height() || c >= green.width())
    }) {
        bail!(
            "region {} lies outside the {}x{} raster",
            d.id,
            green.width(),
            green.height()
        );
    }
    save_overlay(&args.out, green, &report)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let result = match &cli.command {
        Command::Synth(a) => cmd_synth(a),
        Command::Calibrate(a) => cmd_calibrate(a),
        Command::Detect(a) => cmd_detect(a),
        Command::Score(a) => cmd_score(a),
        Command::Report(a) => cmd_report(a),
        Command::Overlay(a) => cmd_overlay(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
