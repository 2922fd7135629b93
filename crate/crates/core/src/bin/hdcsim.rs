//! Command-line front end: train models, run inference on either backend,
//! sweep a parameter, and generate synthetic corpora.
//!
//! Settings resolve in three layers -- task defaults, then a JSON config
//! file (`--config`), then flags -- later layers winning. Exit codes: 0
//! success, 2 bad input or I/O, 3 model/config mismatch or unreadable
//! model/config file, 4 internal invariant breach.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use hdcsim::crossbar::{AmCrossbar, ImCrossbarPair};
use hdcsim::datasets::synth::SynthConfig;
use hdcsim::datasets::{self, write_corpus};
use hdcsim::model::EncoderState;
use hdcsim::runner::{
    evaluate, load_data, sweep, train_model, write_reports, write_sweep, Backend,
    NoisePresetKind, RunConfig, RunOverrides, SweepParam,
};
use hdcsim::{EncoderKind, Error, Metric, PermMode, Result, TaskKind, TrainedModel};

#[derive(Parser)]
#[command(
    name = "hdcsim",
    version,
    about = "Hyperdimensional classifier with a digital reference backend and a simulated in-memory crossbar backend"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Train a model on a corpus and write it to a model file.
    Train(TrainArgs),
    /// Classify a test set with a trained model and write report files.
    Infer(InferArgs),
    /// Evaluate the run at several values of one parameter.
    Sweep(SweepArgs),
    /// Generate a seeded synthetic text corpus with a difficulty knob.
    SynthGen(SynthGenArgs),
}

/// Settings shared by train/infer/sweep; every flag overrides the config
/// file, which overrides the task defaults.
#[derive(Args)]
struct OverrideFlags {
    /// JSON config file with the same keys as these flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Root directory that relative manifest entries resolve against
    /// (default: the manifest's own directory; env: HDCSIM_DATA_ROOT).
    #[arg(long)]
    data_root: Option<PathBuf>,
    /// Hypervector dimension.
    #[arg(long)]
    dim: Option<usize>,
    /// Master seed for item memories, noise, and synthetic draws.
    #[arg(long)]
    seed: Option<u64>,
    /// n-gram order.
    #[arg(long)]
    ngram: Option<usize>,
    /// n-gram computation: exact, all-minterm, or two-minterm.
    #[arg(long, value_enum)]
    encoder: Option<EncoderKind>,
    /// Permutation flavor: circular or plain (shift-register style).
    #[arg(long, value_enum)]
    perm: Option<PermMode>,
    /// Similarity metric for the associative memory.
    #[arg(long, value_enum)]
    metric: Option<Metric>,
    /// Evaluation backend.
    #[arg(long, value_enum)]
    backend: Option<Backend>,
    /// Crossbar partition count (must divide the dimension).
    #[arg(long)]
    partitions: Option<usize>,
    /// Device-model preset; ideal also bypasses the ADC.
    #[arg(long, value_enum)]
    noise: Option<NoisePresetKind>,
    /// Programming spread of the set state, siemens.
    #[arg(long)]
    g_set_sigma: Option<f64>,
    /// Programming spread of the reset state, siemens.
    #[arg(long)]
    g_reset_sigma: Option<f64>,
    /// End-to-end fractional set-state tilt along columns.
    #[arg(long)]
    col_gradient: Option<f64>,
    /// End-to-end fractional set-state tilt along rows.
    #[arg(long)]
    row_gradient: Option<f64>,
    /// Instantaneous read noise as a fraction of the cell current.
    #[arg(long)]
    read_noise: Option<f64>,
    /// Column ADC resolution in bits (1-16).
    #[arg(long)]
    adc_bits: Option<u32>,
    /// Enable or bypass the column ADC.
    #[arg(long)]
    adc_enabled: Option<bool>,
    /// Shift direction of the complement datapath in the in-memory encoder.
    #[arg(long, value_enum)]
    comp_shift: Option<hdcsim::crossbar::ComplementShift>,
    /// Stop-word list file for the news task (one word per line).
    #[arg(long)]
    stoplist: Option<PathBuf>,
    /// Keep every k-th raw sample of the sensor stream.
    #[arg(long)]
    downsample: Option<usize>,
    /// Samples reserved for training when the stream is long enough.
    #[arg(long)]
    train_samples: Option<usize>,
    /// Quantization levels of the sensor stream.
    #[arg(long)]
    levels: Option<u8>,
}

impl OverrideFlags {
    fn overrides(&self) -> RunOverrides {
        RunOverrides {
            dim: self.dim,
            seed: self.seed,
            ngram: self.ngram,
            encoder: self.encoder,
            perm: self.perm,
            metric: self.metric,
            backend: self.backend,
            partitions: self.partitions,
            noise: self.noise,
            g_set_sigma: self.g_set_sigma,
            g_reset_sigma: self.g_reset_sigma,
            col_gradient: self.col_gradient,
            row_gradient: self.row_gradient,
            read_noise: self.read_noise,
            adc_bits: self.adc_bits,
            adc_enabled: self.adc_enabled,
            comp_shift: self.comp_shift,
            stoplist: self.stoplist.clone(),
            downsample: self.downsample,
            train_samples: self.train_samples,
            levels: self.levels,
        }
    }

    /// Layer config file and flags onto `base` and freeze the result.
    fn resolve_onto(&self, mut base: RunConfig) -> Result<RunConfig> {
        if let Some(path) = &self.config {
            RunOverrides::from_file(path)?.apply(&mut base);
        }
        self.overrides().apply(&mut base);
        base.finalize()?;
        Ok(base)
    }

    fn data_root(&self) -> Option<PathBuf> {
        self.data_root
            .clone()
            .or_else(|| std::env::var_os("HDCSIM_DATA_ROOT").map(PathBuf::from))
    }
}

#[derive(Args)]
struct TrainArgs {
    /// Which task the corpus belongs to.
    #[arg(long, value_enum)]
    task: TaskKind,
    /// Corpus manifest (text tasks) or sample table (spatial task).
    #[arg(long)]
    data: PathBuf,
    /// Output model file.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    flags: OverrideFlags,
}

#[derive(Args)]
struct InferArgs {
    /// Trained model file.
    #[arg(long)]
    model: PathBuf,
    /// Corpus manifest (text tasks) or sample table (spatial task).
    #[arg(long)]
    data: PathBuf,
    /// Directory for metrics.csv, confusion.csv, predictions.csv,
    /// report.json.
    #[arg(long)]
    out: PathBuf,
    /// Also dump programmed conductances (CSV, siemens) into this directory.
    #[arg(long)]
    export_conductance: Option<PathBuf>,
    #[command(flatten)]
    flags: OverrideFlags,
}

#[derive(Args)]
struct SweepArgs {
    /// Which task the corpus belongs to.
    #[arg(long, value_enum)]
    task: TaskKind,
    /// Corpus manifest (text tasks) or sample table (spatial task).
    #[arg(long)]
    data: PathBuf,
    /// Directory for sweep.csv and sweep.json.
    #[arg(long)]
    out: PathBuf,
    /// The knob to vary.
    #[arg(long, value_enum)]
    param: SweepParam,
    /// Comma-separated values for the knob.
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<f64>,
    /// Analog instances per value (instance r re-seeds noise with seed+r).
    #[arg(long, default_value_t = 1)]
    repeats: u64,
    #[command(flatten)]
    flags: OverrideFlags,
}

#[derive(Args)]
struct SynthGenArgs {
    /// Directory to write class files and manifest.json into.
    #[arg(long)]
    out: PathBuf,
    /// Number of classes (2-26).
    #[arg(long)]
    classes: Option<usize>,
    /// Generator seed.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Training symbols per class.
    #[arg(long)]
    train_len: Option<usize>,
    /// Symbols per query.
    #[arg(long)]
    query_len: Option<usize>,
    /// Queries per class.
    #[arg(long)]
    queries: Option<usize>,
    /// Difficulty knob in [0,1]: 0 = fully private letter statistics per
    /// class, 1 = statistically identical classes.
    #[arg(long)]
    mixing: Option<f64>,
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let cfg = args.flags.resolve_onto(RunConfig::for_task(args.task))?;
    let preproc = cfg.preproc()?;
    let data = load_data(&cfg, &args.data, args.flags.data_root().as_deref(), &preproc)?;
    let model = train_model(&cfg, &data)?;
    model.write_to(&args.out)?;
    let hash = model.content_hash()?;
    println!(
        "trained {} model: {} classes, d={}, {}-gram {}/{}",
        cfg.task.as_str(),
        model.memory.len(),
        cfg.dim,
        cfg.ngram,
        cfg.encoder.as_str(),
        cfg.perm.as_str(),
    );
    println!("wrote {} (sha256 {})", args.out.display(), &hash[..16]);
    Ok(())
}

fn export_conductances(model: &TrainedModel, cfg: &RunConfig, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let write = |name: &str, array: &hdcsim::crossbar::CrossbarArray| -> Result<()> {
        let mut file = std::io::BufWriter::new(std::fs::File::create(dir.join(name))?);
        array.write_csv(&mut file)
    };
    let am = AmCrossbar::build(
        &model.memory,
        cfg.partitions,
        &cfg.noise,
        None,
    )?;
    write("am_main.csv", am.main())?;
    write("am_complement.csv", am.complement())?;
    if let EncoderState::Text(im) = &model.state {
        if model.cfg.kind == EncoderKind::TwoMinterm && model.cfg.perm == PermMode::Plain {
            let pair = ImCrossbarPair::build(im, &cfg.noise, cfg.comp_shift)?;
            write("im_direct.csv", pair.direct())?;
            write("im_complement.csv", pair.complement())?;
        }
    }
    Ok(())
}

fn cmd_infer(args: InferArgs) -> Result<()> {
    let model = TrainedModel::read_from(&args.model)?;
    let cfg = args.flags.resolve_onto(RunConfig::for_model(&model))?;
    let data = load_data(&cfg, &args.data, args.flags.data_root().as_deref(), &model.preproc)?;
    let outcome = evaluate(&model, &cfg, &data)?;
    write_reports(&args.out, &cfg, &model.content_hash()?, &outcome)?;
    if let Some(dir) = &args.export_conductance {
        if cfg.backend != Backend::Crossbar {
            return Err(Error::InvalidArgument(
                "--export-conductance needs --backend crossbar".into(),
            ));
        }
        export_conductances(&model, &cfg, dir)?;
    }
    println!(
        "{} on {}: accuracy {:.4} ({}/{} queries, {} skipped)",
        cfg.task.as_str(),
        cfg.backend.as_str(),
        outcome.accuracy,
        outcome.correct,
        outcome.evaluated,
        outcome.skipped,
    );
    println!("reports in {}", args.out.display());
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let cfg = args.flags.resolve_onto(RunConfig::for_task(args.task))?;
    let report = sweep(
        &cfg,
        &args.data,
        args.flags.data_root().as_deref(),
        args.param,
        &args.values,
        args.repeats,
    )?;
    write_sweep(&args.out, &report)?;
    for row in &report.summary {
        println!(
            "{} = {}: accuracy {:.4} +/- {:.4} (min {:.4}, max {:.4})",
            report.param, row.value, row.mean, row.std, row.min, row.max
        );
    }
    println!("sweep files in {}", args.out.display());
    Ok(())
}

fn cmd_synth_gen(args: SynthGenArgs) -> Result<()> {
    let mut cfg = SynthConfig::calibrated(args.seed);
    if let Some(v) = args.classes {
        cfg.classes = v;
    }
    if let Some(v) = args.train_len {
        cfg.train_len = v;
    }
    if let Some(v) = args.query_len {
        cfg.query_len = v;
    }
    if let Some(v) = args.queries {
        cfg.queries_per_class = v;
    }
    if let Some(v) = args.mixing {
        cfg.mixing = v;
    }
    let corpus = datasets::synth::generate(&cfg)?;
    let manifest = write_corpus(&corpus, &args.out)?;
    println!(
        "generated {} classes x {} training symbols, {} queries x {} symbols, mixing {}",
        cfg.classes,
        cfg.train_len,
        corpus.test.len(),
        cfg.query_len,
        cfg.mixing,
    );
    println!("manifest at {}", manifest.display());
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Train(args) => cmd_train(args),
        Cmd::Infer(args) => cmd_infer(args),
        Cmd::Sweep(args) => cmd_sweep(args),
        Cmd::SynthGen(args) => cmd_synth_gen(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
