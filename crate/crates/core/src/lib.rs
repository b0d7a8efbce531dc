//! Detection of differentially methylated regions (DMRs) from paired
//! cancer/normal methylation matrices.
//!
//! Sample-wise regional mean M-values are modeled per group with the
//! alpha-skew generalized normal distribution, fitted by a seeded
//! Metropolis-within-Gibbs sampler. A multistage driver starts from
//! whole-chromosome segments and recursively splits any segment whose
//! Bayes factor beats the stage threshold, reporting final-stage
//! survivors as DMRs. Companion modules cover CSV ingestion, result
//! summaries and comparisons, SVG region plots, and synthetic benchmark
//! generation with sensitivity/FDR scoring.

pub mod analysis;
pub mod engine;
pub mod error;
pub mod io;
pub mod matrix;
pub mod model;
pub mod simulate;

pub use analysis::{
    compare_dmrs, format_summary, plot_dmr_region, summarize_dmrs, DmrSummary, OverlapPair,
    OverlapReport, RegionPlot, SixNumber,
};
pub use engine::{
    bayes_factor, mmcmc_detect, mmcmc_detect_trace, region_means, split_segment, DetectConfig,
    DmrRecord, DmrTable, Segment, SegmentDecision, SegmentEvaluation,
};
pub use error::{Error, Result};
pub use matrix::MethylationMatrix;
pub use model::{
    asgn_density, asgn_fit, asgn_log_density, child_priors, default_priors, log_prior, AsgnParams,
    AsgnPriors, McmcConfig, PosteriorSummary, PriorSpec,
};
pub use simulate::{evaluate, simulate_dataset, EvalMetrics, GroundTruth, SimConfig, TruthInterval};
