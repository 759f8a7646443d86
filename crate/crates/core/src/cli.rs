//! Command-line front end: `select`, `label`, `evaluate` and `synth`.

use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dataio::{parse_dataset, SparseDataset};
use crate::enumeration::enumerate_partitions;
use crate::error::{Error, Result};
use crate::format::fmt10;
use crate::geometry::F6Mode;
use crate::harness::synth::{augment_random_columns, generate_synthetic, SynthSpec};
use crate::harness::wrapper::{compare_predictions, parse_labels, wrapper_label, write_labels, LabelRecord};
use crate::harness::SvmParams;
use crate::linalg::{RankTolerance, TolerancePolicy};
use crate::report::{read_predictions, write_evaluation, write_selection, EVALUATION};
use crate::selector::{select, ModelCoefficients, SelectOptions};

pub const LABELS_FILE: &str = "labels.tsv";
pub const VECTORS_FILE: &str = "vectors.txt";
pub const BOUNDARIES_FILE: &str = "boundaries.txt";

#[derive(Debug, Parser)]
#[command(
    name = "geofs",
    version,
    about = "Affine-geometry feature-type selection for linear SVMs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score every feature-type subset for every binary classifier.
    Select(SelectArgs),
    /// Label every subset by training and testing a linear SVM on it.
    Label(LabelArgs),
    /// Compare selection verdicts with oracle labels.
    Evaluate(EvaluateArgs),
    /// Write a synthetic dataset, or augment one with random columns.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    #[arg(long)]
    pub vectors: PathBuf,
    #[arg(long)]
    pub boundaries: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PolicyArg {
    Relative,
    Absolute,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum F6Arg {
    Class,
    Table1,
}

#[derive(Debug, Args)]
pub struct GeometryArgs {
    /// Rank tolerance epsilon (default: machine epsilon).
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long, value_enum, default_value = "relative")]
    pub tolerance_policy: PolicyArg,
    #[arg(long, value_enum, default_value = "class")]
    pub f6_mode: F6Arg,
}

impl GeometryArgs {
    fn options(&self) -> Result<SelectOptions> {
        let policy = match self.tolerance_policy {
            PolicyArg::Relative => TolerancePolicy::Relative,
            PolicyArg::Absolute => TolerancePolicy::Absolute,
        };
        let tolerance = match (self.tolerance, policy) {
            (None, TolerancePolicy::Relative) => RankTolerance::default(),
            (None, TolerancePolicy::Absolute) => {
                return Err(Error::InvalidParameter(
                    "--tolerance-policy absolute needs --tolerance".into(),
                ))
            }
            (Some(eps), p) => RankTolerance::new(p, eps)?,
        };
        let f6_mode = match self.f6_mode {
            F6Arg::Class => F6Mode::ClassVsClass,
            F6Arg::Table1 => F6Mode::Table1Literal,
        };
        Ok(SelectOptions { tolerance, f6_mode })
    }
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub geometry: GeometryArgs,
    /// Coefficients file overriding the built-in models.
    #[arg(long)]
    pub coefficients: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Also write per-subset wall times to timing.tsv.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct SvmArgs {
    #[arg(long, default_value_t = 1.0)]
    pub svm_c: f64,
    #[arg(long, default_value_t = 1000)]
    pub svm_epochs: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub svm_tolerance: f64,
    /// Seed for the SVM's coordinate order.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl SvmArgs {
    fn params(&self) -> SvmParams {
        SvmParams {
            c: self.svm_c,
            max_epochs: self.svm_epochs,
            tolerance: self.svm_tolerance,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Args)]
pub struct LabelArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub svm: SvmArgs,
    #[arg(long, default_value_t = 0)]
    pub split_seed: u64,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Directory written by `select`; evaluation.tsv is written here too.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Labels file written by `label`.
    #[arg(long)]
    pub labels: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Augment this dataset instead of generating one (needs --boundaries).
    #[arg(long, requires = "boundaries")]
    pub vectors: Option<PathBuf>,
    #[arg(long, requires = "vectors")]
    pub boundaries: Option<PathBuf>,
    #[arg(long, default_value_t = 0.25)]
    pub fraction: f64,
    #[arg(long, default_value_t = 0.1)]
    pub density: f64,

    #[arg(long, default_value_t = 2)]
    pub classes: usize,
    #[arg(long, value_delimiter = ',', default_value = "20,20")]
    pub block_columns: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    pub rows_per_class: usize,
    /// One rank target, or one per class.
    #[arg(long, value_delimiter = ',', default_value = "3")]
    pub ranks: Vec<usize>,
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0.5)]
    pub template_density: f64,
    #[arg(long)]
    pub shared_templates: bool,
}

fn require(path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::MissingInput(path.to_path_buf()))
    }
}

fn open(path: &Path) -> Result<BufReader<fs::File>> {
    require(path)?;
    fs::File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

pub fn load_dataset(vectors: &Path, boundaries: &Path) -> Result<SparseDataset> {
    let v = open(vectors)?;
    let b = open(boundaries)?;
    parse_dataset(v, b)
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<fs::File>) -> std::io::Result<()>) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    f(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        None => f(),
        Some(0) => Err(Error::InvalidParameter("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .install(f),
    }
}

pub fn cmd_select(args: &SelectArgs) -> Result<()> {
    let ds = load_dataset(&args.input.vectors, &args.input.boundaries)?;
    let opts = args.geometry.options()?;
    let coeffs = match &args.coefficients {
        Some(p) => ModelCoefficients::parse(open(p)?)?,
        None => ModelCoefficients::default(),
    };
    let report = with_threads(args.threads, || select(&ds, &coeffs, opts))?;
    write_selection(&report, &opts, &args.out_dir, args.timing)?;
    for p in &report.partitions {
        eprintln!(
            "{}: {} of {} subsets selected",
            p.partition,
            p.selected().count(),
            p.results.len()
        );
    }
    Ok(())
}

pub fn cmd_label(args: &LabelArgs) -> Result<()> {
    let ds = load_dataset(&args.input.vectors, &args.input.boundaries)?;
    let params = args.svm.params();
    let partitions = enumerate_partitions(&ds.label_set())?;
    let mut records = Vec::new();
    for part in &partitions {
        let labels = with_threads(args.threads, || wrapper_label(&ds, part, params, args.split_seed))?;
        for l in &labels {
            if !args.quiet {
                eprintln!("{part}\t{}\taccuracy {}", l.subset, fmt10(l.test_accuracy));
            }
            records.push(LabelRecord::from_label(part, l));
        }
    }
    fs::create_dir_all(&args.out_dir).map_err(|e| Error::io(&args.out_dir, e))?;
    write_file(&args.out_dir.join(LABELS_FILE), |w| write_labels(&records, w))
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<()> {
    let truth = parse_labels(open(&args.labels)?)?;
    let predicted = read_predictions(&args.out_dir)?;
    let quality = compare_predictions(&predicted, &truth)?;
    let mut text = Vec::new();
    write_evaluation(&quality, &mut text)?;
    write_file(&args.out_dir.join(EVALUATION), |w| w.write_all(&text))?;
    print!("{}", String::from_utf8_lossy(&text));
    Ok(())
}

pub fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let ds = match (&args.vectors, &args.boundaries) {
        (Some(v), Some(b)) => augment_random_columns(&load_dataset(v, b)?, args.fraction, args.density, args.seed)?,
        _ => generate_synthetic(&SynthSpec {
            classes: args.classes,
            block_columns: args.block_columns.clone(),
            rows_per_class: args.rows_per_class,
            rank_targets: args.ranks.clone(),
            noise: args.noise,
            template_density: args.template_density,
            shared_templates: args.shared_templates,
            seed: args.seed,
        })?,
    };
    fs::create_dir_all(&args.out_dir).map_err(|e| Error::io(&args.out_dir, e))?;
    write_file(&args.out_dir.join(VECTORS_FILE), |w| ds.write_vectors(w))?;
    write_file(&args.out_dir.join(BOUNDARIES_FILE), |w| ds.layout().write(w))?;
    eprintln!(
        "wrote {} rows x {} columns to {}",
        ds.n_rows(),
        ds.n_columns(),
        args.out_dir.display()
    );
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Select(a) => cmd_select(a),
        Command::Label(a) => cmd_label(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Synth(a) => cmd_synth(a),
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
