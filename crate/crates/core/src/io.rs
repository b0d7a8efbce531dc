//! CSV ingestion and serialization, pairing validation, and the
//! beta-to-M transform.
//!
//! Methylation input files are UTF-8, comma-delimited, with a header row
//! whose first two columns are `CpG_ID` and `Chromosome`; every further
//! column is a numeric sample column. Empty cells and the literal token
//! `NA` are missing values.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::engine::{DmrRecord, DmrTable};
use crate::error::{Error, Result};
use crate::matrix::MethylationMatrix;
use crate::simulate::{GroundTruth, TruthInterval};

/// Offset used by [`beta_to_m`] unless overridden.
pub const DEFAULT_BETA_OFFSET: f64 = 1e-6;

/// Column order of a DMR table file.
pub const DMR_HEADER: [&str; 6] = [
    "Chromosome",
    "Start_CpG",
    "End_CpG",
    "CpG_Count",
    "Decision_Value",
    "Stage",
];

/// Logit transform of a beta-value in `[0, 1]` with stabilizing offset
/// `c`: `log((beta + c) / (1 - beta + c))`, natural log.
pub fn beta_to_m(beta: f64, c: f64) -> Result<f64> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "beta offset must be positive, got {c}"
        )));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidParams(format!(
            "beta-value {beta} outside [0, 1]"
        )));
    }
    Ok(((beta + c) / (1.0 - beta + c)).ln())
}

/// Applies [`beta_to_m`] to every present value of the matrix in place.
pub fn convert_beta_matrix(matrix: &mut MethylationMatrix, c: f64) -> Result<()> {
    for v in matrix.values_mut() {
        if v.is_finite() {
            *v = beta_to_m(*v, c)?;
        }
    }
    Ok(())
}

fn parse_cell(cell: &str) -> std::result::Result<f64, String> {
    if cell.is_empty() || cell == "NA" {
        return Ok(f64::NAN);
    }
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!(
            "expected a finite number, an empty cell or NA, got '{cell}'"
        )),
    }
}

/// Parses a methylation matrix from any reader; `source` labels errors.
pub fn read_methylation_csv<R: Read>(reader: R, source: &str) -> Result<MethylationMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers = rdr.headers()?.clone();
    if headers.len() < 3 {
        return Err(Error::Parse {
            path: source.into(),
            row: 1,
            col: headers.len().max(1),
            msg: "need CpG_ID, Chromosome and at least one sample column".into(),
        });
    }
    if &headers[0] != "CpG_ID" || &headers[1] != "Chromosome" {
        return Err(Error::Parse {
            path: source.into(),
            row: 1,
            col: 1,
            msg: format!(
                "first two header columns must be CpG_ID,Chromosome; got {},{}",
                &headers[0], &headers[1]
            ),
        });
    }
    let sample_names: Vec<String> = headers.iter().skip(2).map(String::from).collect();

    let mut cpg_ids = Vec::new();
    let mut chromosomes = Vec::new();
    let mut values = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let row = i + 2; // 1-based, counting the header
        let id = record.get(0).unwrap_or("");
        let chromosome = record.get(1).unwrap_or("");
        if id.is_empty() || chromosome.is_empty() {
            return Err(Error::Parse {
                path: source.into(),
                row,
                col: if id.is_empty() { 1 } else { 2 },
                msg: "CpG_ID and Chromosome must not be empty".into(),
            });
        }
        cpg_ids.push(id.to_string());
        chromosomes.push(chromosome.to_string());
        for (j, cell) in record.iter().enumerate().skip(2) {
            let v = parse_cell(cell).map_err(|msg| Error::Parse {
                path: source.into(),
                row,
                col: j + 1,
                msg,
            })?;
            values.push(v);
        }
    }

    MethylationMatrix::new(cpg_ids, chromosomes, sample_names, values)
}

/// Loads a methylation matrix from a CSV file.
pub fn load_methylation_csv(path: impl AsRef<Path>) -> Result<MethylationMatrix> {
    let path = path.as_ref();
    let file = File::open(path)?;
    read_methylation_csv(BufReader::new(file), &path.display().to_string())
}

/// Checks that two matrices describe the same CpG sites in the same row
/// order; sample counts may differ. Row numbers in errors are 1-based
/// data rows.
pub fn validate_pair(cancer: &MethylationMatrix, normal: &MethylationMatrix) -> Result<()> {
    let shared = cancer.n_cpg().min(normal.n_cpg());
    for row in 0..shared {
        if cancer.cpg_ids()[row] != normal.cpg_ids()[row] {
            return Err(Error::PairMismatch {
                row: row + 1,
                msg: format!(
                    "CpG_ID '{}' vs '{}'",
                    cancer.cpg_ids()[row],
                    normal.cpg_ids()[row]
                ),
            });
        }
        if cancer.chromosomes()[row] != normal.chromosomes()[row] {
            return Err(Error::PairMismatch {
                row: row + 1,
                msg: format!(
                    "chromosome '{}' vs '{}' for CpG '{}'",
                    cancer.chromosomes()[row],
                    normal.chromosomes()[row],
                    cancer.cpg_ids()[row]
                ),
            });
        }
    }
    if cancer.n_cpg() != normal.n_cpg() {
        return Err(Error::PairMismatch {
            row: shared + 1,
            msg: format!("row counts differ ({} vs {})", cancer.n_cpg(), normal.n_cpg()),
        });
    }
    Ok(())
}

/// Writes a DMR table as CSV, `Decision_Value` with six decimal places.
pub fn write_dmr_table<W: Write>(table: &DmrTable, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(DMR_HEADER)?;
    for r in &table.records {
        w.write_record(&[
            r.chromosome.as_str(),
            r.start_cpg_id.as_str(),
            r.end_cpg_id.as_str(),
            &r.cpg_count.to_string(),
            &format!("{:.6}", r.decision_value),
            &r.stage.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_dmr_table(table: &DmrTable, path: impl AsRef<Path>) -> Result<()> {
    write_dmr_table(table, File::create(path)?)
}

/// Parses a DMR table written by [`write_dmr_table`].
pub fn read_dmr_table<R: Read>(reader: R, source: &str) -> Result<DmrTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(DMR_HEADER) {
        return Err(Error::Parse {
            path: source.into(),
            row: 1,
            col: 1,
            msg: format!("expected header {}", DMR_HEADER.join(",")),
        });
    }
    let mut records = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let row = i + 2;
        let field = |col: usize| record.get(col).unwrap_or("");
        let parse_err = |col: usize, msg: String| Error::Parse {
            path: source.into(),
            row,
            col: col + 1,
            msg,
        };
        let cpg_count: usize = field(3)
            .parse()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| parse_err(3, format!("invalid CpG_Count '{}'", field(3))))?;
        let decision_value: f64 = field(4)
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite() && *v > 0.0)
            .ok_or_else(|| parse_err(4, format!("invalid Decision_Value '{}'", field(4))))?;
        let stage: u32 = field(5)
            .parse()
            .ok()
            .filter(|&s| s >= 1)
            .ok_or_else(|| parse_err(5, format!("invalid Stage '{}'", field(5))))?;
        if field(0).is_empty() || field(1).is_empty() || field(2).is_empty() {
            return Err(parse_err(0, "empty identifier field".into()));
        }
        records.push(DmrRecord {
            chromosome: field(0).to_string(),
            start_cpg_id: field(1).to_string(),
            end_cpg_id: field(2).to_string(),
            cpg_count,
            decision_value,
            stage,
        });
    }
    Ok(DmrTable { records })
}

pub fn load_dmr_table(path: impl AsRef<Path>) -> Result<DmrTable> {
    let path = path.as_ref();
    let file = File::open(path)?;
    read_dmr_table(BufReader::new(file), &path.display().to_string())
}

/// Writes ground-truth intervals as `start_row,end_row,shift`.
pub fn write_ground_truth<W: Write>(truth: &GroundTruth, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["start_row", "end_row", "shift"])?;
    for t in &truth.intervals {
        w.write_record(&[
            t.start_row.to_string(),
            t.end_row.to_string(),
            format!("{}", t.shift),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_ground_truth(truth: &GroundTruth, path: impl AsRef<Path>) -> Result<()> {
    write_ground_truth(truth, File::create(path)?)
}

/// Parses ground-truth intervals; they must be disjoint and sorted.
pub fn read_ground_truth<R: Read>(reader: R, source: &str) -> Result<GroundTruth> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(["start_row", "end_row", "shift"]) {
        return Err(Error::Parse {
            path: source.into(),
            row: 1,
            col: 1,
            msg: "expected header start_row,end_row,shift".into(),
        });
    }
    let mut intervals = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let row = i + 2;
        let parse_err = |col: usize, msg: String| Error::Parse {
            path: source.into(),
            row,
            col,
            msg,
        };
        let start_row: usize = record
            .get(0)
            .unwrap_or("")
            .parse()
            .map_err(|_| parse_err(1, "invalid start_row".into()))?;
        let end_row: usize = record
            .get(1)
            .unwrap_or("")
            .parse()
            .map_err(|_| parse_err(2, "invalid end_row".into()))?;
        let shift: f64 = record
            .get(2)
            .unwrap_or("")
            .parse()
            .map_err(|_| parse_err(3, "invalid shift".into()))?;
        if end_row < start_row {
            return Err(parse_err(2, "end_row precedes start_row".into()));
        }
        intervals.push(TruthInterval {
            start_row,
            end_row,
            shift,
        });
    }
    GroundTruth::new(intervals)
}

pub fn load_ground_truth(path: impl AsRef<Path>) -> Result<GroundTruth> {
    let path = path.as_ref();
    let file = File::open(path)?;
    read_ground_truth(BufReader::new(file), &path.display().to_string())
}

/// Reads a one-column series of reals; a single leading non-numeric line
/// is tolerated as a header, and NA/empty lines are missing values.
pub fn read_series<R: Read>(reader: R, source: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let cell = line.trim();
        match parse_cell(cell) {
            Ok(v) => values.push(v),
            Err(msg) => {
                if i == 0 {
                    continue; // header line
                }
                return Err(Error::Parse {
                    path: source.into(),
                    row: i + 1,
                    col: 1,
                    msg,
                });
            }
        }
    }
    Ok(values)
}

pub fn load_series(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let file = File::open(path)?;
    read_series(BufReader::new(file), &path.display().to_string())
}

/// Writes a methylation matrix back to CSV (`NA` for missing cells).
pub fn write_methylation_csv<W: Write>(matrix: &MethylationMatrix, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["CpG_ID".to_string(), "Chromosome".to_string()];
    header.extend(matrix.sample_names().iter().cloned());
    w.write_record(&header)?;
    let mut record = Vec::with_capacity(header.len());
    for row in 0..matrix.n_cpg() {
        record.clear();
        record.push(matrix.cpg_ids()[row].clone());
        record.push(matrix.chromosomes()[row].clone());
        for &v in matrix.row(row) {
            record.push(if v.is_finite() {
                format!("{v}")
            } else {
                "NA".to_string()
            });
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_methylation_csv(matrix: &MethylationMatrix, path: impl AsRef<Path>) -> Result<()> {
    write_methylation_csv(matrix, File::create(path)?)
}
