//! Multistage region-splitting driver.
//!
//! Each chromosome starts as a single stage-1 segment. A segment is
//! scored with a Bayes factor comparing the summed ASGN densities of the
//! two groups' regional means under their own posterior-mean parameters.
//! Segments beating the stage threshold are split and re-examined at the
//! next stage until the final stage, where they are reported as DMRs.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::io::validate_pair;
use crate::matrix::MethylationMatrix;
use crate::model::{
    asgn_fit, child_priors, default_priors, log_density_unchecked, mean_and_variance, AsgnParams,
    AsgnPriors, McmcConfig, PosteriorSummary, PriorSpec, VARIANCE_FLOOR,
};

/// A contiguous run of CpG rows within one chromosome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub chromosome: String,
    /// Zero-based inclusive row range into the methylation matrices.
    pub start_row: usize,
    pub end_row: usize,
    pub stage: u32,
}

impl Segment {
    pub fn cpg_count(&self) -> usize {
        self.end_row - self.start_row + 1
    }
}

/// Configuration of [`mmcmc_detect`].
#[derive(Debug, Clone)]
pub struct DetectConfig {
    /// Starting stage, normally 1.
    pub stage: u32,
    pub max_stages: u32,
    /// Subsegments per split; the effective count is bounded by the
    /// segment's CpG count.
    pub num_splits: usize,
    /// Per-stage decision thresholds; must cover every stage up to
    /// `max_stages`.
    pub bf_thresholds: Vec<f64>,
    pub mcmc: McmcConfig,
    pub priors_cancer: Option<PriorSpec>,
    pub priors_normal: Option<PriorSpec>,
    /// Root of all per-segment fit seeds.
    pub master_seed: u64,
    /// Worker threads for segment fits; 0 uses all available cores.
    /// Output does not depend on this value.
    pub threads: usize,
    /// Replace MCMC fits with moment-based summaries. Exercises the
    /// segmentation path only; useful for structural runs.
    pub fit_stub: bool,
    /// Derive identical fit seeds for both groups of a segment.
    pub equal_group_seeds: bool,
}

impl Default for DetectConfig {
    fn default() -> Self {
        Self {
            stage: 1,
            max_stages: 3,
            num_splits: 50,
            bf_thresholds: vec![0.5, 0.8, 1.05],
            mcmc: McmcConfig::default(),
            priors_cancer: None,
            priors_normal: None,
            master_seed: 0,
            threads: 0,
            fit_stub: false,
            equal_group_seeds: false,
        }
    }
}

impl DetectConfig {
    pub fn validate(&self) -> Result<()> {
        if self.stage < 1 {
            return Err(Error::InvalidConfig("stage must be at least 1".into()));
        }
        if self.max_stages < self.stage {
            return Err(Error::InvalidConfig(format!(
                "max_stages ({}) must be at least the starting stage ({})",
                self.max_stages, self.stage
            )));
        }
        if self.num_splits < 2 {
            return Err(Error::InvalidConfig("num_splits must be at least 2".into()));
        }
        if self.bf_thresholds.len() < self.max_stages as usize {
            return Err(Error::InvalidConfig(format!(
                "{} thresholds given but max_stages is {}",
                self.bf_thresholds.len(),
                self.max_stages
            )));
        }
        if self.bf_thresholds.iter().any(|t| t.is_nan()) {
            return Err(Error::InvalidConfig("thresholds must not be NaN".into()));
        }
        self.mcmc.validate()
    }
}

/// One detected region.
#[derive(Debug, Clone, PartialEq)]
pub struct DmrRecord {
    pub chromosome: String,
    pub start_cpg_id: String,
    pub end_cpg_id: String,
    pub cpg_count: usize,
    /// The Bayes factor that cleared the stage threshold.
    pub decision_value: f64,
    pub stage: u32,
}

/// Detected regions in genomic order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DmrTable {
    pub records: Vec<DmrRecord>,
}

impl DmrTable {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// What happened to one evaluated segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentDecision {
    /// Beat the threshold and was split for the next stage.
    Split,
    /// Beat the threshold at the final stage (or was an unsplittable
    /// singleton) and was reported.
    Emitted,
    /// Fell at or below the threshold; kept without a record.
    Retained,
    /// Not scored: fewer than 3 finite regional values in a group.
    Skipped,
}

/// Evaluation trace entry for one segment.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentEvaluation {
    pub chromosome: String,
    pub start_row: usize,
    pub end_row: usize,
    pub stage: u32,
    /// `None` when the segment was skipped before fitting.
    pub bayes_factor: Option<f64>,
    pub decision: SegmentDecision,
}

/// Per-sample arithmetic means of the finite M-values over a segment's
/// rows. A sample with no available measurement yields `NaN`.
pub fn region_means(matrix: &MethylationMatrix, segment: &Segment) -> Vec<f64> {
    let n_samples = matrix.n_samples();
    let mut sums = vec![0.0f64; n_samples];
    let mut counts = vec![0usize; n_samples];
    for row in segment.start_row..=segment.end_row {
        for (j, &v) in matrix.row(row).iter().enumerate() {
            if v.is_finite() {
                sums[j] += v;
                counts[j] += 1;
            }
        }
    }
    (0..n_samples)
        .map(|j| {
            if counts[j] == 0 {
                f64::NAN
            } else {
                sums[j] / counts[j] as f64
            }
        })
        .collect()
}

/// Splits a segment into `min(num_splits, cpg_count)` contiguous,
/// covering subsegments in genomic order at the next stage. When the
/// count does not divide evenly the leading subsegments take the extra
/// row.
pub fn split_segment(segment: &Segment, num_splits: usize) -> Vec<Segment> {
    let n = segment.cpg_count();
    let s = num_splits.min(n).max(1);
    let q = n / s;
    let r = n % s;
    let mut out = Vec::with_capacity(s);
    let mut start = segment.start_row;
    for i in 0..s {
        let size = if i < r { q + 1 } else { q };
        out.push(Segment {
            chromosome: segment.chromosome.clone(),
            start_row: start,
            end_row: start + size - 1,
            stage: segment.stage + 1,
        });
        start += size;
    }
    debug_assert_eq!(start, segment.end_row + 1);
    out
}

/// Ratio of summed ASGN densities: each group's finite regional values
/// evaluated under that group's posterior-mean parameters, cancer over
/// normal. Computed in log space via log-sum-exp.
pub fn bayes_factor(
    cancer_means: &[f64],
    normal_means: &[f64],
    fit_cancer: &PosteriorSummary,
    fit_normal: &PosteriorSummary,
) -> Result<f64> {
    let num = log_sum_density(cancer_means, &fit_cancer.mean)?;
    let den = log_sum_density(normal_means, &fit_normal.mean)?;
    let bf = (num - den).exp();
    if !bf.is_finite() || bf <= 0.0 {
        return Err(Error::DegenerateBayesFactor(format!(
            "ratio {bf} from log sums {num} and {den}"
        )));
    }
    Ok(bf)
}

fn log_sum_density(values: &[f64], params: &AsgnParams) -> Result<f64> {
    params.validate()?;
    let logs: Vec<f64> = values
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .map(|y| log_density_unchecked(y, params.alpha, params.nu, params.delta2))
        .collect();
    if logs.is_empty() {
        return Err(Error::DegenerateBayesFactor(
            "no finite regional values".into(),
        ));
    }
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Err(Error::DegenerateBayesFactor(
            "density sum is zero or non-finite".into(),
        ));
    }
    Ok(max + logs.iter().map(|l| (l - max).exp()).sum::<f64>().ln())
}

struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf29ce484222325)
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0 ^ u64::from(b)).wrapping_mul(0x100000001b3);
        }
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Stable fit seed for one (segment, group) pair. Depends only on the
/// segment's identity, never on scheduling, so runs are reproducible at
/// any thread count.
fn derive_seed(
    master: u64,
    chromosome: &str,
    stage: u32,
    start_row: usize,
    end_row: usize,
    group: u8,
) -> u64 {
    let mut h = Fnv::new();
    h.write(&master.to_le_bytes());
    h.write(chromosome.as_bytes());
    h.write(&[0xFF]);
    h.write(&stage.to_le_bytes());
    h.write(&(start_row as u64).to_le_bytes());
    h.write(&(end_row as u64).to_le_bytes());
    h.write(&[group]);
    splitmix64(h.0)
}

fn stub_fit(values: &[f64]) -> PosteriorSummary {
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    let (mean, var) = mean_and_variance(&finite);
    let params = AsgnParams {
        alpha: 0.0,
        nu: mean,
        delta2: var.max(VARIANCE_FLOOR),
    };
    PosteriorSummary {
        mean: params,
        ci_lower: params,
        ci_upper: params,
        acceptance_rates: [0.5; 3],
        n_retained: 0,
    }
}

#[derive(Clone)]
struct Work {
    seg: Segment,
    parent_cancer: Option<PosteriorSummary>,
    parent_normal: Option<PosteriorSummary>,
}

enum StepOutcome {
    Skipped,
    Retained {
        bf: f64,
    },
    Emitted {
        bf: f64,
        record: DmrRecord,
    },
    Split {
        bf: f64,
        children: Vec<Segment>,
        fit_cancer: PosteriorSummary,
        fit_normal: PosteriorSummary,
    },
}

/// Runs the multistage detection and returns the detected regions.
pub fn mmcmc_detect(
    cancer: &MethylationMatrix,
    normal: &MethylationMatrix,
    config: &DetectConfig,
) -> Result<DmrTable> {
    mmcmc_detect_trace(cancer, normal, config).map(|(table, _)| table)
}

/// As [`mmcmc_detect`], additionally returning the evaluation trace of
/// every examined segment in processing order.
pub fn mmcmc_detect_trace(
    cancer: &MethylationMatrix,
    normal: &MethylationMatrix,
    config: &DetectConfig,
) -> Result<(DmrTable, Vec<SegmentEvaluation>)> {
    validate_pair(cancer, normal)?;
    config.validate()?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;

    let mut live: Vec<Work> = cancer
        .chromosome_runs()
        .into_iter()
        .map(|(chromosome, start_row, end_row)| Work {
            seg: Segment {
                chromosome,
                start_row,
                end_row,
                stage: config.stage,
            },
            parent_cancer: None,
            parent_normal: None,
        })
        .collect();

    let mut emitted: Vec<(usize, DmrRecord)> = Vec::new();
    let mut trace: Vec<SegmentEvaluation> = Vec::new();

    while !live.is_empty() {
        let outcomes: Result<Vec<StepOutcome>> = pool.install(|| {
            live.par_iter()
                .map(|work| process_segment(cancer, normal, config, work))
                .collect()
        });
        let outcomes = outcomes?;

        let mut next = Vec::new();
        for (work, outcome) in live.iter().zip(outcomes) {
            let seg = &work.seg;
            let (bf, decision) = match outcome {
                StepOutcome::Skipped => (None, SegmentDecision::Skipped),
                StepOutcome::Retained { bf } => (Some(bf), SegmentDecision::Retained),
                StepOutcome::Emitted { bf, record } => {
                    emitted.push((seg.start_row, record));
                    (Some(bf), SegmentDecision::Emitted)
                }
                StepOutcome::Split {
                    bf,
                    children,
                    fit_cancer,
                    fit_normal,
                } => {
                    next.extend(children.into_iter().map(|child| Work {
                        seg: child,
                        parent_cancer: Some(fit_cancer.clone()),
                        parent_normal: Some(fit_normal.clone()),
                    }));
                    (Some(bf), SegmentDecision::Split)
                }
            };
            trace.push(SegmentEvaluation {
                chromosome: seg.chromosome.clone(),
                start_row: seg.start_row,
                end_row: seg.end_row,
                stage: seg.stage,
                bayes_factor: bf,
                decision,
            });
        }
        live = next;
    }

    emitted.sort_by_key(|(start_row, _)| *start_row);
    let table = DmrTable {
        records: emitted.into_iter().map(|(_, r)| r).collect(),
    };
    Ok((table, trace))
}

fn process_segment(
    cancer: &MethylationMatrix,
    normal: &MethylationMatrix,
    config: &DetectConfig,
    work: &Work,
) -> Result<StepOutcome> {
    let seg = &work.seg;
    let means_cancer = region_means(cancer, seg);
    let means_normal = region_means(normal, seg);
    let finite = |v: &[f64]| v.iter().filter(|x| x.is_finite()).count();
    if finite(&means_cancer) < 3 || finite(&means_normal) < 3 {
        return Ok(StepOutcome::Skipped);
    }

    let fit_cancer = fit_group(
        config,
        seg,
        &means_cancer,
        config.priors_cancer,
        work.parent_cancer.as_ref(),
        0,
    )?;
    let fit_normal = fit_group(
        config,
        seg,
        &means_normal,
        config.priors_normal,
        work.parent_normal.as_ref(),
        1,
    )?;

    let bf = bayes_factor(&means_cancer, &means_normal, &fit_cancer, &fit_normal)?;
    let threshold = config.bf_thresholds[(seg.stage - 1) as usize];
    if bf > threshold {
        if seg.stage < config.max_stages && seg.cpg_count() >= 2 {
            Ok(StepOutcome::Split {
                bf,
                children: split_segment(seg, config.num_splits),
                fit_cancer,
                fit_normal,
            })
        } else {
            Ok(StepOutcome::Emitted {
                bf,
                record: DmrRecord {
                    chromosome: seg.chromosome.clone(),
                    start_cpg_id: cancer.cpg_ids()[seg.start_row].clone(),
                    end_cpg_id: cancer.cpg_ids()[seg.end_row].clone(),
                    cpg_count: seg.cpg_count(),
                    decision_value: bf,
                    stage: seg.stage,
                },
            })
        }
    } else {
        Ok(StepOutcome::Retained { bf })
    }
}

fn fit_group(
    config: &DetectConfig,
    seg: &Segment,
    means: &[f64],
    user_priors: Option<PriorSpec>,
    parent: Option<&PosteriorSummary>,
    group: u8,
) -> Result<PosteriorSummary> {
    if config.fit_stub {
        return Ok(stub_fit(means));
    }
    let priors: AsgnPriors = if seg.stage == config.stage {
        match user_priors {
            Some(spec) => spec.to_priors()?,
            None => default_priors(means)?,
        }
    } else {
        child_priors(parent.expect("non-root segment carries its parent fit"))
    };
    let group_tag = if config.equal_group_seeds { 0 } else { group };
    let seed = derive_seed(
        config.master_seed,
        &seg.chromosome,
        seg.stage,
        seg.start_row,
        seg.end_row,
        group_tag,
    );
    asgn_fit(means, &priors, &config.mcmc.with_seed(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::MethylationMatrix;
    use approx::assert_relative_eq;

    fn matrix(rows: Vec<Vec<f64>>, chrom: &str) -> MethylationMatrix {
        let n = rows.len();
        let samples = rows[0].len();
        MethylationMatrix::new(
            (0..n).map(|i| format!("cg{i:08}")).collect(),
            vec![chrom.to_string(); n],
            (0..samples).map(|j| format!("M_sample_{}", j + 1)).collect(),
            rows.into_iter().flatten().collect(),
        )
        .unwrap()
    }

    fn seg(start: usize, end: usize, stage: u32) -> Segment {
        Segment {
            chromosome: "6".into(),
            start_row: start,
            end_row: end,
            stage,
        }
    }

    #[test]
    fn region_means_examples() {
        let m = matrix(vec![vec![1.0, 2.0, f64::NAN]], "6");
        let means = region_means(&m, &seg(0, 0, 1));
        assert_eq!(means[0], 1.0);
        assert_eq!(means[1], 2.0);
        assert!(means[2].is_nan());

        let m = matrix(vec![vec![1.0], vec![f64::NAN]], "6");
        assert_eq!(region_means(&m, &seg(0, 1, 1)), vec![1.0]);

        let m = matrix(vec![vec![1.0], vec![2.0], vec![3.0]], "6");
        assert_eq!(region_means(&m, &seg(0, 2, 1)), vec![2.0]);
    }

    #[test]
    fn split_sizes_match_paper_arithmetic() {
        let sizes = |n: usize, k: usize| -> Vec<usize> {
            split_segment(&seg(0, n - 1, 1), k)
                .iter()
                .map(Segment::cpg_count)
                .collect()
        };

        let s = sizes(36438, 50);
        assert_eq!(s.len(), 50);
        assert!(s[..38].iter().all(|&x| x == 729));
        assert!(s[38..].iter().all(|&x| x == 728));
        assert_eq!(s.iter().sum::<usize>(), 36438);

        assert_eq!(sizes(5000, 5), vec![1000; 5]);
        assert_eq!(sizes(3, 50), vec![1, 1, 1]);
    }

    #[test]
    fn split_children_are_contiguous_and_staged() {
        let parent = seg(10, 46, 2);
        let children = split_segment(&parent, 5);
        assert_eq!(children[0].start_row, 10);
        assert_eq!(children.last().unwrap().end_row, 46);
        for pair in children.windows(2) {
            assert_eq!(pair[1].start_row, pair[0].end_row + 1);
        }
        assert!(children.iter().all(|c| c.stage == 3));
    }

    fn fixed_fit(alpha: f64, nu: f64, delta2: f64) -> PosteriorSummary {
        let p = AsgnParams { alpha, nu, delta2 };
        PosteriorSummary {
            mean: p,
            ci_lower: p,
            ci_upper: p,
            acceptance_rates: [0.5; 3],
            n_retained: 0,
        }
    }

    #[test]
    fn bayes_factor_symmetry_and_sums() {
        let fit = fixed_fit(0.3, 1.0, 0.5);
        let values = [0.8, 1.1, 0.9];
        assert_eq!(bayes_factor(&values, &values, &fit, &fit).unwrap(), 1.0);

        // Sum semantics: two equal points over one equal point double the ratio.
        let fit = fixed_fit(0.0, 0.0, 1.0);
        let bf = bayes_factor(&[0.5, 0.5], &[0.5], &fit, &fit).unwrap();
        assert_relative_eq!(bf, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn bayes_factor_separated_groups() {
        let fit = fixed_fit(0.0, 0.0, 1.0);
        let bf = bayes_factor(&[0.0, 0.0], &[3.0, 3.0], &fit, &fit).unwrap();
        // Direct density arithmetic: phi(0)/phi(3).
        assert_relative_eq!(bf, 0.3989422804014327 / 0.004431848411938008, epsilon = 1e-9);
        assert_relative_eq!(bf, 90.02, epsilon = 0.01);
    }

    #[test]
    fn bayes_factor_skips_missing_and_rejects_empty() {
        let fit = fixed_fit(0.0, 0.0, 1.0);
        let bf = bayes_factor(&[0.5, f64::NAN], &[0.5], &fit, &fit).unwrap();
        assert_relative_eq!(bf, 1.0, epsilon = 1e-12);
        assert!(bayes_factor(&[f64::NAN], &[0.5], &fit, &fit).is_err());
    }

    #[test]
    fn derive_seed_is_stable_and_distinguishes_inputs() {
        let s = derive_seed(7, "6", 1, 0, 99, 0);
        assert_eq!(s, derive_seed(7, "6", 1, 0, 99, 0));
        assert_ne!(s, derive_seed(7, "6", 1, 0, 99, 1));
        assert_ne!(s, derive_seed(7, "6", 2, 0, 99, 0));
        assert_ne!(s, derive_seed(8, "6", 1, 0, 99, 0));
        assert_ne!(s, derive_seed(7, "7", 1, 0, 99, 0));
        assert_ne!(s, derive_seed(7, "6", 1, 0, 98, 0));
    }

    fn demo_pair(n: usize, samples: usize, shift: f64) -> (MethylationMatrix, MethylationMatrix) {
        // Smooth deterministic values; cancer shifted by `shift`.
        let value = |i: usize, j: usize| ((i * 31 + j * 17) % 97) as f64 / 97.0 - 0.5;
        let normal = matrix(
            (0..n)
                .map(|i| (0..samples).map(|j| value(i, j)).collect())
                .collect(),
            "6",
        );
        let cancer = matrix(
            (0..n)
                .map(|i| (0..samples).map(|j| value(i, j) + shift).collect())
                .collect(),
            "6",
        );
        (cancer, normal)
    }

    #[test]
    fn detect_identical_groups_with_equal_seeds_gives_unit_bf() {
        let (_, normal) = demo_pair(200, 6, 0.0);
        let cancer = normal.clone();
        let config = DetectConfig {
            max_stages: 2,
            num_splits: 4,
            bf_thresholds: vec![1.5, 1.5],
            mcmc: McmcConfig {
                nburn: 100,
                niter: 200,
                thin: 1,
                seed: 0,
            },
            equal_group_seeds: true,
            ..DetectConfig::default()
        };
        let (table, trace) = mmcmc_detect_trace(&cancer, &normal, &config).unwrap();
        assert!(table.is_empty());
        for eval in &trace {
            assert_eq!(eval.bayes_factor, Some(1.0));
            assert_eq!(eval.decision, SegmentDecision::Retained);
        }
        assert_eq!(trace.len(), 1);
    }

    #[test]
    fn detect_stub_always_split_partitions_rows() {
        let (cancer, normal) = demo_pair(1000, 5, 1.0);
        let config = DetectConfig {
            max_stages: 3,
            num_splits: 10,
            bf_thresholds: vec![f64::NEG_INFINITY; 3],
            fit_stub: true,
            ..DetectConfig::default()
        };
        let (table, trace) = mmcmc_detect_trace(&cancer, &normal, &config).unwrap();
        // 1000 -> 10 x 100 -> 10 x 10 each: all stage-3 segments emitted.
        assert_eq!(table.len(), 100);
        assert!(table.records.iter().all(|r| r.cpg_count == 10 && r.stage == 3));
        assert_eq!(trace.len(), 1 + 10 + 100);

        // Emitted records partition the chromosome in genomic order.
        let index = cancer.cpg_row_index();
        let mut next_row = 0usize;
        for r in &table.records {
            let start = index[r.start_cpg_id.as_str()];
            let end = index[r.end_cpg_id.as_str()];
            assert_eq!(start, next_row);
            assert_eq!(end - start + 1, r.cpg_count);
            next_row = end + 1;
        }
        assert_eq!(next_row, 1000);
    }

    #[test]
    fn detect_skips_segments_with_sparse_groups() {
        // Normal group has only 2 finite columns: every segment skipped.
        let cancer = matrix(
            (0..30).map(|i| vec![i as f64, 1.0, 2.0, 3.0]).collect(),
            "6",
        );
        let normal = matrix(
            (0..30)
                .map(|i| vec![i as f64, 0.5, f64::NAN, f64::NAN])
                .collect(),
            "6",
        );
        let config = DetectConfig {
            fit_stub: true,
            bf_thresholds: vec![f64::NEG_INFINITY; 3],
            ..DetectConfig::default()
        };
        let (table, trace) = mmcmc_detect_trace(&cancer, &normal, &config).unwrap();
        assert!(table.is_empty());
        assert_eq!(trace.len(), 1);
        assert_eq!(trace[0].decision, SegmentDecision::Skipped);
        assert_eq!(trace[0].bayes_factor, None);
    }

    #[test]
    fn detect_respects_chromosome_boundaries() {
        let n = 40;
        let chroms: Vec<String> = (0..n)
            .map(|i| if i < 25 { "1".into() } else { "2".into() })
            .collect();
        let m = MethylationMatrix::new(
            (0..n).map(|i| format!("cg{i:08}")).collect(),
            chroms,
            (0..4).map(|j| format!("s{j}")).collect(),
            (0..n * 4).map(|k| (k % 13) as f64 * 0.1).collect(),
        )
        .unwrap();
        let config = DetectConfig {
            max_stages: 1,
            bf_thresholds: vec![f64::NEG_INFINITY],
            fit_stub: true,
            ..DetectConfig::default()
        };
        let (table, _) = mmcmc_detect_trace(&m, &m, &config).unwrap();
        assert_eq!(table.len(), 2);
        assert_eq!(table.records[0].chromosome, "1");
        assert_eq!(table.records[0].cpg_count, 25);
        assert_eq!(table.records[1].chromosome, "2");
        assert_eq!(table.records[1].cpg_count, 15);
    }

    #[test]
    fn detect_is_thread_count_invariant() {
        let (cancer, normal) = demo_pair(300, 6, 0.8);
        let base = DetectConfig {
            max_stages: 2,
            num_splits: 6,
            bf_thresholds: vec![0.5, 0.8, 1.05],
            mcmc: McmcConfig {
                nburn: 100,
                niter: 200,
                thin: 1,
                seed: 0,
            },
            master_seed: 17,
            ..DetectConfig::default()
        };
        let one = mmcmc_detect(
            &cancer,
            &normal,
            &DetectConfig {
                threads: 1,
                ..base.clone()
            },
        )
        .unwrap();
        let eight = mmcmc_detect(
            &cancer,
            &normal,
            &DetectConfig {
                threads: 8,
                ..base
            },
        )
        .unwrap();
        assert_eq!(one, eight);
    }

    #[test]
    fn detect_rejects_short_threshold_list() {
        let (cancer, normal) = demo_pair(10, 4, 0.0);
        let config = DetectConfig {
            max_stages: 3,
            bf_thresholds: vec![0.5, 0.8],
            ..DetectConfig::default()
        };
        assert!(matches!(
            mmcmc_detect(&cancer, &normal, &config),
            Err(Error::InvalidConfig(_))
        ));
    }
}
