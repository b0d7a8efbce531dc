//! Synthetic benchmark generation and detection scoring.
//!
//! Both groups are the baseline matrix plus independent Gaussian noise;
//! a configurable number of non-overlapping regions receive an additive
//! mean shift in the cancer group only.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::engine::DmrTable;
use crate::error::{Error, Result};
use crate::matrix::MethylationMatrix;

const MAX_PLACEMENT_ATTEMPTS: usize = 10_000;

/// Generation settings; the baseline matrix is passed separately.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub noise_sd: f64,
    pub n_dmrs: usize,
    pub shifts: Vec<f64>,
    pub lengths: Vec<usize>,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            noise_sd: 0.5,
            n_dmrs: 10,
            shifts: vec![1.0, 2.0],
            lengths: vec![10, 20, 50],
            seed: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.noise_sd.is_finite() && self.noise_sd > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "noise_sd must be positive, got {}",
                self.noise_sd
            )));
        }
        if self.shifts.is_empty() || self.shifts.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidConfig("shifts must be finite and non-empty".into()));
        }
        if self.lengths.is_empty() || self.lengths.contains(&0) {
            return Err(Error::InvalidConfig(
                "lengths must be non-empty and positive".into(),
            ));
        }
        Ok(())
    }
}

/// One injected region, zero-based inclusive rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruthInterval {
    pub start_row: usize,
    pub end_row: usize,
    pub shift: f64,
}

/// Injected regions in genomic order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GroundTruth {
    pub intervals: Vec<TruthInterval>,
}

impl GroundTruth {
    /// Validates that intervals are pairwise disjoint and sorted.
    pub fn new(mut intervals: Vec<TruthInterval>) -> Result<Self> {
        intervals.sort_by_key(|t| t.start_row);
        for pair in intervals.windows(2) {
            if pair[1].start_row <= pair[0].end_row {
                return Err(Error::InvalidRegion(format!(
                    "truth intervals [{}, {}] and [{}, {}] overlap",
                    pair[0].start_row, pair[0].end_row, pair[1].start_row, pair[1].end_row
                )));
            }
        }
        Ok(Self { intervals })
    }

    pub fn contains_row(&self, row: usize) -> bool {
        self.intervals
            .iter()
            .any(|t| t.start_row <= row && row <= t.end_row)
    }
}

/// Simulates a cancer/normal pair from a baseline. Draw order is fixed:
/// region lengths, shifts, placements, cancer noise, normal noise — so
/// output is fully determined by `config.seed`.
pub fn simulate_dataset(
    baseline: &MethylationMatrix,
    config: &SimConfig,
) -> Result<(MethylationMatrix, MethylationMatrix, GroundTruth)> {
    config.validate()?;
    let n_cpg = baseline.n_cpg();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let lengths: Vec<usize> = (0..config.n_dmrs)
        .map(|_| config.lengths[rng.random_range(0..config.lengths.len())])
        .collect();
    let shifts: Vec<f64> = (0..config.n_dmrs)
        .map(|_| config.shifts[rng.random_range(0..config.shifts.len())])
        .collect();
    if lengths.iter().sum::<usize>() > n_cpg {
        return Err(Error::InfeasiblePlacement {
            placed: 0,
            requested: config.n_dmrs,
        });
    }

    let mut placed: Vec<TruthInterval> = Vec::with_capacity(config.n_dmrs);
    for (i, (&len, &shift)) in lengths.iter().zip(&shifts).enumerate() {
        if len > n_cpg {
            return Err(Error::InfeasiblePlacement {
                placed: i,
                requested: config.n_dmrs,
            });
        }
        let mut found = None;
        for _ in 0..MAX_PLACEMENT_ATTEMPTS {
            let start = rng.random_range(0..=(n_cpg - len));
            let end = start + len - 1;
            if baseline.chromosomes()[start] != baseline.chromosomes()[end] {
                continue;
            }
            if placed
                .iter()
                .any(|t| start <= t.end_row && t.start_row <= end)
            {
                continue;
            }
            found = Some(TruthInterval {
                start_row: start,
                end_row: end,
                shift,
            });
            break;
        }
        match found {
            Some(t) => placed.push(t),
            None => {
                return Err(Error::InfeasiblePlacement {
                    placed: i,
                    requested: config.n_dmrs,
                })
            }
        }
    }
    let truth = GroundTruth::new(placed)?;

    let mut cancer = baseline.clone();
    add_noise(&mut cancer, config.noise_sd, &mut rng);
    let mut normal = baseline.clone();
    add_noise(&mut normal, config.noise_sd, &mut rng);

    let n_samples = cancer.n_samples();
    for t in &truth.intervals {
        let values = cancer.values_mut();
        for row in t.start_row..=t.end_row {
            for col in 0..n_samples {
                values[row * n_samples + col] += t.shift;
            }
        }
    }

    Ok((cancer, normal, truth))
}

fn add_noise(matrix: &mut MethylationMatrix, sd: f64, rng: &mut ChaCha8Rng) {
    for v in matrix.values_mut() {
        let z: f64 = rng.sample(StandardNormal);
        *v += sd * z; // NaN stays NaN
    }
}

/// Detection quality of a DMR table against the injected truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalMetrics {
    /// Fraction of truth intervals overlapped by at least one detection.
    pub sensitivity: f64,
    /// Fraction of detections overlapping no truth interval.
    pub fdr: f64,
    pub n_detected: usize,
    pub n_truth: usize,
    /// Raw count of detections overlapping no truth interval.
    pub false_discoveries: usize,
    /// CpG-level precision over row sets.
    pub cpg_precision: f64,
    /// CpG-level recall over row sets.
    pub cpg_recall: f64,
}

/// Scores detections against truth. Overlap means at least one shared
/// CpG row; detected regions are resolved to rows through `cpg_index`.
pub fn evaluate(
    detected: &DmrTable,
    truth: &GroundTruth,
    cpg_index: &MethylationMatrix,
) -> Result<EvalMetrics> {
    let index = cpg_index.cpg_row_index();
    let mut ranges = Vec::with_capacity(detected.records.len());
    for r in &detected.records {
        let start = *index
            .get(r.start_cpg_id.as_str())
            .ok_or_else(|| Error::UnknownCpg(r.start_cpg_id.clone()))?;
        let end = *index
            .get(r.end_cpg_id.as_str())
            .ok_or_else(|| Error::UnknownCpg(r.end_cpg_id.clone()))?;
        if end < start {
            return Err(Error::InvalidRegion(format!(
                "record {} .. {} maps to rows {} .. {}",
                r.start_cpg_id, r.end_cpg_id, start, end
            )));
        }
        ranges.push((start, end));
    }

    let overlaps = |a: (usize, usize), b: (usize, usize)| a.0 <= b.1 && b.0 <= a.1;

    let n_truth = truth.intervals.len();
    let covered = truth
        .intervals
        .iter()
        .filter(|t| ranges.iter().any(|&r| overlaps(r, (t.start_row, t.end_row))))
        .count();
    let false_discoveries = ranges
        .iter()
        .filter(|&&r| {
            !truth
                .intervals
                .iter()
                .any(|t| overlaps(r, (t.start_row, t.end_row)))
        })
        .count();

    let n_rows = cpg_index.n_cpg();
    let mut detected_rows = vec![false; n_rows];
    for &(s, e) in &ranges {
        for row in s..=e.min(n_rows - 1) {
            detected_rows[row] = true;
        }
    }
    let mut truth_rows = vec![false; n_rows];
    for t in &truth.intervals {
        for row in t.start_row..=t.end_row.min(n_rows - 1) {
            truth_rows[row] = true;
        }
    }
    let n_detected_rows = detected_rows.iter().filter(|&&b| b).count();
    let n_truth_rows = truth_rows.iter().filter(|&&b| b).count();
    let n_hit_rows = detected_rows
        .iter()
        .zip(&truth_rows)
        .filter(|(&d, &t)| d && t)
        .count();

    Ok(EvalMetrics {
        sensitivity: covered as f64 / n_truth.max(1) as f64,
        fdr: false_discoveries as f64 / ranges.len().max(1) as f64,
        n_detected: ranges.len(),
        n_truth,
        false_discoveries,
        cpg_precision: if n_detected_rows == 0 {
            0.0
        } else {
            n_hit_rows as f64 / n_detected_rows as f64
        },
        cpg_recall: if n_truth_rows == 0 {
            0.0
        } else {
            n_hit_rows as f64 / n_truth_rows as f64
        },
    })
}
