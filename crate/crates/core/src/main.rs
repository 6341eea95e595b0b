use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use twostream::descriptor::{describe_sequence, save_descriptor_matrix};
use twostream::frame::{read_rgb_dir, write_ppm};
use twostream::optflow::{flow_sequence, flow_to_color, read_flo, write_flo};
use twostream::pipeline::synthetic::{generate, write_dataset, SyntheticSpec};
use twostream::pipeline::{
    apply_config_file, extract_manifest, loocv, render_kv, render_table, repeated_split,
    set_config_value, DatasetManifest, EvalReport, PipelineConfig, VideoSource,
};
use twostream::svm::{predict, read_model, train, write_model};
use twostream::{encode, Error, FeatureVector, PoolOp, PyramidConfig};

#[derive(Parser)]
#[command(name = "twostream", version, about = "Two-stream motion/appearance video classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct ConfigArgs {
    /// `key = value` file overriding pipeline defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Single override, `key=value`; may be repeated, applied after --config.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Temporal pyramid depth.
    #[arg(long)]
    pyramid_levels: Option<usize>,
    /// Comma-separated pooling operators, e.g. `max,sum,grad_pos,grad_neg,var`.
    #[arg(long)]
    operators: Option<String>,
    /// Named pyramid depth: first-person (4 levels) or third-person (3 levels).
    #[arg(long)]
    preset: Option<String>,
}

impl ConfigArgs {
    fn build(&self) -> twostream::Result<PipelineConfig> {
        let mut c = PipelineConfig::default();
        if let Some(p) = &self.config {
            apply_config_file(&mut c, p)?;
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got `{kv}`")))?;
            set_config_value(&mut c, k, v)?;
        }
        if let Some(p) = &self.preset {
            set_config_value(&mut c, "preset", p)?;
        }
        if let Some(l) = self.pyramid_levels {
            set_config_value(&mut c, "pyramid_levels", &l.to_string())?;
        }
        if let Some(o) = &self.operators {
            set_config_value(&mut c, "operators", o)?;
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Protocol {
    Loocv,
    Split,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Kv,
    Both,
}

#[derive(Args)]
struct ProtocolArgs {
    #[arg(long, value_enum, default_value = "loocv")]
    protocol: Protocol,
    /// Number of random splits for `--protocol split`.
    #[arg(long, default_value_t = 100)]
    runs: usize,
    /// Seed for the split permutations.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "both")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Horn-Schunck flow between consecutive frames of a directory, one .flo per pair.
    Flow {
        #[arg(long)]
        frames: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Colorize a .flo file as a PPM image.
    FlowViz {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Flow magnitude mapped to full saturation (default: the field's maximum).
        #[arg(long)]
        max_radius: Option<f64>,
    },
    /// Per-frame descriptors of a frame directory (or a directory of .flo files,
    /// colorized first) as a PMTX series, one row per frame.
    Describe {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Which stream's descriptor parameters to use.
        #[arg(long, value_enum, default_value = "motion")]
        stream: Stream,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Pooled time-series encoding of a PMTX descriptor series.
    Encode {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Train a one-vs-rest SVM on every manifest entry.
    Train {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Manifest paths are single-row PMTX feature vectors.
        #[arg(long)]
        features: bool,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Predict every manifest entry with a saved model.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        features: bool,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Run an evaluation protocol on a manifest.
    Eval {
        #[arg(long)]
        manifest: PathBuf,
        /// Manifest paths are single-row PMTX feature vectors.
        #[arg(long)]
        features: bool,
        #[command(flatten)]
        protocol: ProtocolArgs,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// End to end: flow, description, encoding, classification and report.
    Pipeline {
        #[arg(long)]
        manifest: PathBuf,
        /// Also report accuracy with the variance operator toggled.
        #[arg(long)]
        compare_variance: bool,
        #[command(flatten)]
        protocol: ProtocolArgs,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Write the seeded synthetic motion dataset (frames and manifest).
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 20)]
        clips_per_class: usize,
        #[arg(long, default_value_t = 16)]
        frames: usize,
        #[arg(long, default_value_t = 64)]
        size: usize,
        #[arg(long, default_value_t = 2018)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Stream {
    Motion,
    Appearance,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            if !e.use_stderr() {
                return ExitCode::SUCCESS;
            }
            eprintln!("\n{}", Cli::command().render_help());
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_data_error() { 2 } else { 1 })
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn flo_files(dir: &Path) -> twostream::Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let p = entry.map_err(io_err(dir))?.path();
        if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("flo")) {
            out.push(p);
        }
    }
    out.sort();
    Ok(out)
}

fn feature_vectors(manifest: &DatasetManifest) -> twostream::Result<Vec<FeatureVector>> {
    manifest
        .entries()
        .iter()
        .map(|e| match &e.source {
            VideoSource::Descriptors { motion, appearance: None } => FeatureVector::load(motion),
            _ => Err(Error::InvalidInput(format!(
                "video `{}`: --features needs a single .pmtx path per entry",
                e.video_id
            ))),
        })
        .collect()
}

fn manifest_vectors(
    manifest: &DatasetManifest,
    features: bool,
    config: &PipelineConfig,
) -> twostream::Result<Vec<FeatureVector>> {
    if features {
        feature_vectors(manifest)
    } else {
        extract_manifest(manifest, config)?
            .iter()
            .map(|s| s.represent(config))
            .collect()
    }
}

fn evaluate(
    features: &[FeatureVector],
    labels: &[String],
    p: &ProtocolArgs,
    config: &PipelineConfig,
) -> twostream::Result<EvalReport> {
    match p.protocol {
        Protocol::Loocv => loocv(features, labels, &config.kernel, &config.train),
        Protocol::Split => {
            repeated_split(features, labels, p.runs, p.seed, &config.kernel, &config.train)
        }
    }
}

fn print_report(r: &EvalReport, format: Format, prefix: &str) {
    if matches!(format, Format::Table | Format::Both) {
        println!("{}", render_table(r));
    }
    if matches!(format, Format::Kv | Format::Both) {
        for line in render_kv(r).lines() {
            println!("{prefix}{line}");
        }
    }
}

fn run(cmd: Command) -> twostream::Result<()> {
    match cmd {
        Command::Flow { frames, out, cfg } => {
            let config = cfg.build()?;
            let gray: Vec<_> = read_rgb_dir(&frames)?.iter().map(|f| f.to_gray()).collect();
            let flows = flow_sequence(&gray, &config.flow)?;
            fs::create_dir_all(&out).map_err(io_err(&out))?;
            for (t, f) in flows.iter().enumerate() {
                write_flo(f, &out.join(format!("flow_{t:04}.flo")))?;
            }
            println!("wrote {} flow fields to {}", flows.len(), out.display());
        }
        Command::FlowViz { input, out, max_radius } => {
            let flow = read_flo(&input)?;
            write_ppm(&flow_to_color(&flow, max_radius)?, &out)?;
        }
        Command::Describe { input, out, stream, cfg } => {
            let config = cfg.build()?;
            let flos = flo_files(&input)?;
            let frames = if flos.is_empty() {
                read_rgb_dir(&input)?
            } else {
                flos.iter()
                    .map(|p| flow_to_color(&read_flo(p)?, config.flow_max_radius))
                    .collect::<twostream::Result<Vec<_>>>()?
            };
            if frames.is_empty() {
                return Err(Error::InvalidInput(format!(
                    "no frames or .flo files in {}",
                    input.display()
                )));
            }
            let spec = match stream {
                Stream::Motion => &config.motion_descriptor,
                Stream::Appearance => &config.appearance_descriptor,
            };
            let series = describe_sequence(&frames, spec)?;
            save_descriptor_matrix(&series, &out)?;
            println!("{} x {}", series.length(), series.channels());
        }
        Command::Encode { input, out, cfg } => {
            let config = cfg.build()?;
            let series = twostream::descriptor::load_descriptor_matrix(&input)?;
            let v = encode(&series, &config.pyramid)?;
            v.save(&out)?;
            println!("dim={}", v.dim());
            println!("windows_per_channel={}", config.pyramid.window_count());
        }
        Command::Train { manifest, out, features, cfg } => {
            let config = cfg.build()?;
            let m = DatasetManifest::load(&manifest)?;
            let x: Vec<Vec<f64>> = manifest_vectors(&m, features, &config)?
                .into_iter()
                .map(FeatureVector::into_inner)
                .collect();
            let model = train(&x, &m.labels(), &config.train, &config.kernel)?;
            write_model(&model, &out)?;
            println!("classes={}", model.classes().join(","));
            println!("dim={}", model.dim());
            println!("support_vectors={}", model.vectors().len());
        }
        Command::Predict { model, manifest, features, cfg } => {
            let config = cfg.build()?;
            let model = read_model(&model)?;
            let m = DatasetManifest::load(&manifest)?;
            let x = manifest_vectors(&m, features, &config)?;
            for (e, v) in m.entries().iter().zip(&x) {
                let p = predict(&model, v.as_slice())?;
                println!("{}\t{}\t{}", e.video_id, e.label, p.label);
            }
        }
        Command::Eval { manifest, features, protocol, cfg } => {
            let config = cfg.build()?;
            let m = DatasetManifest::load(&manifest)?;
            let x = manifest_vectors(&m, features, &config)?;
            let r = evaluate(&x, &m.labels(), &protocol, &config)?;
            print_report(&r, protocol.format, "");
        }
        Command::Pipeline { manifest, compare_variance, protocol, cfg } => {
            let config = cfg.build()?;
            let m = DatasetManifest::load(&manifest)?;
            let streams = extract_manifest(&m, &config)?;
            let labels = m.labels();
            let run_with = |c: &PipelineConfig| -> twostream::Result<EvalReport> {
                let x = streams
                    .iter()
                    .map(|s| s.represent(c))
                    .collect::<twostream::Result<Vec<_>>>()?;
                let tag = if compare_variance {
                    let has_var = c.pyramid.operator_order().contains(&PoolOp::Var);
                    if has_var { "with_var." } else { "without_var." }
                } else {
                    ""
                };
                println!("{tag}windows_per_channel={}", c.pyramid.window_count());
                println!("{tag}feature_dim={}", x.first().map_or(0, FeatureVector::dim));
                evaluate(&x, &labels, &protocol, c)
            };
            if !compare_variance {
                let r = run_with(&config)?;
                print_report(&r, protocol.format, "");
                return Ok(());
            }
            let ops = config.pyramid.operator_order();
            let without: Vec<PoolOp> = ops.iter().copied().filter(|o| *o != PoolOp::Var).collect();
            let mut with = without.clone();
            with.push(PoolOp::Var);
            if ops.contains(&PoolOp::Var) {
                with = ops.to_vec();
            }
            let mut accuracies = Vec::new();
            for (name, order) in [("with_var", with), ("without_var", without)] {
                let mut c = config.clone();
                c.pyramid = PyramidConfig::new(config.pyramid.levels(), order)?;
                let r = run_with(&c)?;
                print_report(&r, protocol.format, &format!("{name}."));
                accuracies.push((name, r.mean_accuracy));
            }
            for (name, a) in accuracies {
                println!("accuracy.{name}={a}");
            }
        }
        Command::Synth { out, clips_per_class, frames, size, seed } => {
            let spec = SyntheticSpec { clips_per_class, frames, size, seed };
            let path = write_dataset(&generate(&spec)?, &out)?;
            println!("manifest={}", path.display());
        }
    }
    Ok(())
}
