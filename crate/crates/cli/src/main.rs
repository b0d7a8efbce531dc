use std::fs::File;
use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use mmcmc::io;
use mmcmc::{
    asgn_fit, compare_dmrs, default_priors, evaluate, format_summary, mmcmc_detect,
    plot_dmr_region, simulate_dataset, summarize_dmrs, DetectConfig, McmcConfig,
    MethylationMatrix, PriorSpec, SimConfig,
};

/// Region-level detection of differentially methylated regions by
/// multistage MCMC with Bayes-factor splitting decisions.
#[derive(Parser)]
#[command(name = "mmcmc", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect differentially methylated regions between two groups.
    Detect(DetectArgs),
    /// Fit the ASGN model to a one-column series of reals.
    Fit(FitArgs),
    /// Summarize a detected DMR table.
    Summarize(SummarizeArgs),
    /// Report overlaps between two DMR tables.
    Compare(CompareArgs),
    /// Render one detected region as an SVG line chart.
    Plot(PlotArgs),
    /// Generate a synthetic cancer/normal pair with injected DMRs.
    Simulate(SimulateArgs),
    /// Score a DMR table against simulation ground truth.
    Evaluate(EvaluateArgs),
}

#[derive(Args)]
struct DetectArgs {
    /// Cancer-group methylation CSV.
    #[arg(long)]
    cancer: PathBuf,
    /// Normal-group methylation CSV.
    #[arg(long)]
    normal: PathBuf,
    /// Output path for the DMR table CSV.
    #[arg(long)]
    out: PathBuf,
    /// Starting stage of the procedure.
    #[arg(long, default_value_t = 1)]
    stage: u32,
    /// Maximum number of splitting stages.
    #[arg(long, default_value_t = 3)]
    max_stages: u32,
    /// Subsegments created per split (bounded by the CpG count).
    #[arg(long, default_value_t = 50)]
    num_splits: usize,
    /// Comma-separated per-stage Bayes factor thresholds.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_values_t = vec![0.5, 0.8, 1.05]
    )]
    bf_thresholds: Vec<f64>,
    /// Burn-in iterations per fit.
    #[arg(long, default_value_t = 5000)]
    nburn: usize,
    /// Post-burn-in iterations per fit.
    #[arg(long, default_value_t = 10000)]
    niter: usize,
    /// Retain every thin-th iteration.
    #[arg(long, default_value_t = 1)]
    thin: usize,
    /// Master seed; all randomness derives from it.
    #[arg(long, default_value_t = 2021)]
    seed: u64,
    /// Cancer-group prior as alpha=A,mu=M,sigma2=S.
    #[arg(long)]
    prior_cancer: Option<PriorSpec>,
    /// Normal-group prior as alpha=A,mu=M,sigma2=S.
    #[arg(long)]
    prior_normal: Option<PriorSpec>,
    /// Worker threads (0 = all cores); the output is identical for any
    /// value.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Inputs hold beta-values; apply the logit transform at load.
    #[arg(long, default_value_t = false)]
    beta: bool,
    /// Replace MCMC fits with moment stubs (segmentation-path runs).
    #[arg(long, default_value_t = false)]
    fit_stub: bool,
}

#[derive(Args)]
struct FitArgs {
    /// One-column CSV of reals (an optional header line is tolerated).
    #[arg(long)]
    data: PathBuf,
    /// Burn-in iterations.
    #[arg(long, default_value_t = 5000)]
    nburn: usize,
    /// Post-burn-in iterations.
    #[arg(long, default_value_t = 10000)]
    niter: usize,
    /// Retain every thin-th iteration.
    #[arg(long, default_value_t = 1)]
    thin: usize,
    /// RNG seed.
    #[arg(long, default_value_t = 2021)]
    seed: u64,
    /// Prior as alpha=A,mu=M,sigma2=S; data-derived when omitted.
    #[arg(long)]
    prior: Option<PriorSpec>,
}

#[derive(Args)]
struct SummarizeArgs {
    /// DMR table CSV.
    #[arg(long)]
    dmrs: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    /// First DMR table CSV.
    #[arg(long)]
    a: PathBuf,
    /// Second DMR table CSV.
    #[arg(long)]
    b: PathBuf,
    /// Methylation CSV resolving CpG identifiers to rows.
    #[arg(long)]
    index: PathBuf,
}

#[derive(Args)]
struct PlotArgs {
    /// DMR table CSV.
    #[arg(long)]
    dmrs: PathBuf,
    /// Cancer-group methylation CSV.
    #[arg(long)]
    cancer: PathBuf,
    /// Normal-group methylation CSV.
    #[arg(long)]
    normal: PathBuf,
    /// 1-based record index to plot.
    #[arg(long)]
    index: usize,
    /// Output SVG path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    /// Baseline methylation CSV used as background.
    #[arg(long)]
    baseline: PathBuf,
    /// Standard deviation of the per-cell Gaussian noise.
    #[arg(long, default_value_t = 0.5)]
    noise_sd: f64,
    /// Number of regions to inject.
    #[arg(long, default_value_t = 10)]
    n_dmrs: usize,
    /// Comma-separated candidate mean shifts.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_values_t = vec![1.0, 2.0]
    )]
    shifts: Vec<f64>,
    /// Comma-separated candidate region lengths in CpGs.
    #[arg(long, value_delimiter = ',', default_values_t = vec![10, 20, 50])]
    lengths: Vec<usize>,
    /// RNG seed.
    #[arg(long, default_value_t = 2021)]
    seed: u64,
    /// Directory receiving cancer.csv, normal.csv and truth.csv.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Detected DMR table CSV.
    #[arg(long)]
    detected: PathBuf,
    /// Ground-truth CSV written by `simulate`.
    #[arg(long)]
    truth: PathBuf,
    /// Methylation CSV resolving CpG identifiers to rows.
    #[arg(long)]
    index: PathBuf,
    /// Detection runtime in seconds, echoed into the output.
    #[arg(long)]
    runtime: Option<f64>,
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Detect(args) => detect(args),
        Command::Fit(args) => fit(args),
        Command::Summarize(args) => summarize(args),
        Command::Compare(args) => compare(args),
        Command::Plot(args) => plot(args),
        Command::Simulate(args) => simulate(args),
        Command::Evaluate(args) => eval(args),
    }
}

fn load_matrix(path: &PathBuf, beta: bool) -> anyhow::Result<MethylationMatrix> {
    let mut matrix = io::load_methylation_csv(path)
        .with_context(|| format!("loading {}", path.display()))?;
    if beta {
        io::convert_beta_matrix(&mut matrix, io::DEFAULT_BETA_OFFSET)
            .with_context(|| format!("transforming beta-values of {}", path.display()))?;
    }
    Ok(matrix)
}

fn detect(args: DetectArgs) -> anyhow::Result<()> {
    let cancer = load_matrix(&args.cancer, args.beta)?;
    let normal = load_matrix(&args.normal, args.beta)?;
    eprintln!(
        "detect: {} CpGs, {} cancer and {} normal samples",
        cancer.n_cpg(),
        cancer.n_samples(),
        normal.n_samples()
    );
    let config = DetectConfig {
        stage: args.stage,
        max_stages: args.max_stages,
        num_splits: args.num_splits,
        bf_thresholds: args.bf_thresholds,
        mcmc: McmcConfig {
            nburn: args.nburn,
            niter: args.niter,
            thin: args.thin,
            seed: args.seed,
        },
        priors_cancer: args.prior_cancer,
        priors_normal: args.prior_normal,
        master_seed: args.seed,
        threads: args.threads,
        fit_stub: args.fit_stub,
        equal_group_seeds: false,
    };
    let table = mmcmc_detect(&cancer, &normal, &config)?;
    io::save_dmr_table(&table, &args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    eprintln!(
        "detect: {} DMRs written to {}",
        table.len(),
        args.out.display()
    );
    Ok(())
}

fn fit(args: FitArgs) -> anyhow::Result<()> {
    let data = io::load_series(&args.data).with_context(|| format!("loading {}", args.data.display()))?;
    let priors = match args.prior {
        Some(spec) => spec.to_priors()?,
        None => default_priors(&data)?,
    };
    let mcmc = McmcConfig {
        nburn: args.nburn,
        niter: args.niter,
        thin: args.thin,
        seed: args.seed,
    };
    let summary = asgn_fit(&data, &priors, &mcmc)?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "parameter,mean,ci_lower,ci_upper")?;
    for (name, mean, lo, hi) in [
        (
            "alpha",
            summary.mean.alpha,
            summary.ci_lower.alpha,
            summary.ci_upper.alpha,
        ),
        ("nu", summary.mean.nu, summary.ci_lower.nu, summary.ci_upper.nu),
        (
            "delta2",
            summary.mean.delta2,
            summary.ci_lower.delta2,
            summary.ci_upper.delta2,
        ),
    ] {
        writeln!(out, "{name},{mean:.6},{lo:.6},{hi:.6}")?;
    }
    eprintln!(
        "fit: acceptance rates {:.3} {:.3} {:.3} over {} retained samples",
        summary.acceptance_rates[0],
        summary.acceptance_rates[1],
        summary.acceptance_rates[2],
        summary.n_retained
    );
    Ok(())
}

fn summarize(args: SummarizeArgs) -> anyhow::Result<()> {
    let table = io::load_dmr_table(&args.dmrs)?;
    print!("{}", format_summary(&summarize_dmrs(&table)));
    Ok(())
}

fn compare(args: CompareArgs) -> anyhow::Result<()> {
    let a = io::load_dmr_table(&args.a)?;
    let b = io::load_dmr_table(&args.b)?;
    let index = load_matrix(&args.index, false)?;
    let report = compare_dmrs(&a, &b, &index)?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "index_a,index_b,overlap_percent")?;
    for pair in &report.pairs {
        writeln!(
            out,
            "{},{},{:.2}",
            pair.index_a, pair.index_b, pair.overlap_percent
        )?;
    }
    if report.is_empty() {
        eprintln!("compare: no overlapping regions");
    }
    Ok(())
}

fn plot(args: PlotArgs) -> anyhow::Result<()> {
    let table = io::load_dmr_table(&args.dmrs)?;
    let cancer = load_matrix(&args.cancer, false)?;
    let normal = load_matrix(&args.normal, false)?;
    let region = plot_dmr_region(&table, &cancer, &normal, args.index)?;
    let mut file = File::create(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    file.write_all(region.to_svg().as_bytes())?;
    eprintln!("plot: wrote {}", args.out.display());
    Ok(())
}

fn simulate(args: SimulateArgs) -> anyhow::Result<()> {
    let baseline = load_matrix(&args.baseline, false)?;
    let config = SimConfig {
        noise_sd: args.noise_sd,
        n_dmrs: args.n_dmrs,
        shifts: args.shifts,
        lengths: args.lengths,
        seed: args.seed,
    };
    let (cancer, normal, truth) = simulate_dataset(&baseline, &config)?;
    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    io::save_methylation_csv(&cancer, args.out_dir.join("cancer.csv"))?;
    io::save_methylation_csv(&normal, args.out_dir.join("normal.csv"))?;
    io::save_ground_truth(&truth, args.out_dir.join("truth.csv"))?;
    eprintln!(
        "simulate: {} regions injected, files in {}",
        truth.intervals.len(),
        args.out_dir.display()
    );
    Ok(())
}

fn eval(args: EvaluateArgs) -> anyhow::Result<()> {
    let detected = io::load_dmr_table(&args.detected)?;
    let truth = io::load_ground_truth(&args.truth)?;
    let index = load_matrix(&args.index, false)?;
    let metrics = evaluate(&detected, &truth, &index)?;
    let runtime = args
        .runtime
        .map(|r| format!("{r}"))
        .unwrap_or_default();
    let mut out = std::io::stdout().lock();
    writeln!(
        out,
        "sensitivity,fdr,n_detected,n_truth,false_discoveries,cpg_precision,cpg_recall,runtime"
    )?;
    writeln!(
        out,
        "{:.6},{:.6},{},{},{},{:.6},{:.6},{}",
        metrics.sensitivity,
        metrics.fdr,
        metrics.n_detected,
        metrics.n_truth,
        metrics.false_discoveries,
        metrics.cpg_precision,
        metrics.cpg_recall,
        runtime
    )?;
    Ok(())
}
