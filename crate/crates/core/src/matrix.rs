//! In-memory CpG-by-sample methylation matrix.

use std::collections::HashMap;
use std::collections::HashSet;

use crate::error::{Error, Result};

/// A table of M-values with one row per CpG site and one column per
/// sample. Missing measurements are stored as `NaN`. Rows must be grouped
/// by chromosome (contiguous runs); sorting by genomic position within a
/// chromosome is the caller's responsibility.
#[derive(Debug, Clone, PartialEq)]
pub struct MethylationMatrix {
    cpg_ids: Vec<String>,
    chromosomes: Vec<String>,
    sample_names: Vec<String>,
    /// Row-major, `n_cpg * n_samples`.
    values: Vec<f64>,
}

impl MethylationMatrix {
    pub fn new(
        cpg_ids: Vec<String>,
        chromosomes: Vec<String>,
        sample_names: Vec<String>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if cpg_ids.len() != chromosomes.len() {
            return Err(Error::InvalidConfig(format!(
                "{} CpG ids but {} chromosome labels",
                cpg_ids.len(),
                chromosomes.len()
            )));
        }
        if sample_names.is_empty() {
            return Err(Error::InvalidConfig("need at least one sample column".into()));
        }
        if values.len() != cpg_ids.len() * sample_names.len() {
            return Err(Error::InvalidConfig(format!(
                "value grid has {} cells, expected {} rows x {} samples",
                values.len(),
                cpg_ids.len(),
                sample_names.len()
            )));
        }

        let mut seen_ids: HashSet<&str> = HashSet::with_capacity(cpg_ids.len());
        for (row, id) in cpg_ids.iter().enumerate() {
            if !seen_ids.insert(id.as_str()) {
                return Err(Error::DuplicateCpg {
                    id: id.clone(),
                    row: row + 1,
                });
            }
        }

        let mut closed: HashSet<&str> = HashSet::new();
        let mut current: Option<&str> = None;
        for (row, label) in chromosomes.iter().enumerate() {
            match current {
                Some(cur) if cur == label.as_str() => {}
                _ => {
                    if let Some(cur) = current {
                        closed.insert(cur);
                    }
                    if closed.contains(label.as_str()) {
                        return Err(Error::NonContiguousChromosome {
                            label: label.clone(),
                            row: row + 1,
                        });
                    }
                    current = Some(label.as_str());
                }
            }
        }

        Ok(Self {
            cpg_ids,
            chromosomes,
            sample_names,
            values,
        })
    }

    pub fn n_cpg(&self) -> usize {
        self.cpg_ids.len()
    }

    pub fn n_samples(&self) -> usize {
        self.sample_names.len()
    }

    pub fn cpg_ids(&self) -> &[String] {
        &self.cpg_ids
    }

    pub fn chromosomes(&self) -> &[String] {
        &self.chromosomes
    }

    pub fn sample_names(&self) -> &[String] {
        &self.sample_names
    }

    /// Value at `(row, col)`; `NaN` means missing.
    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.sample_names.len() + col]
    }

    /// All sample values of one CpG row.
    pub fn row(&self, row: usize) -> &[f64] {
        let w = self.sample_names.len();
        &self.values[row * w..(row + 1) * w]
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Contiguous chromosome runs as `(label, first_row, last_row)`,
    /// inclusive, in row order.
    pub fn chromosome_runs(&self) -> Vec<(String, usize, usize)> {
        let mut runs = Vec::new();
        let mut start = 0usize;
        for row in 1..=self.chromosomes.len() {
            if row == self.chromosomes.len() || self.chromosomes[row] != self.chromosomes[start] {
                runs.push((self.chromosomes[start].clone(), start, row - 1));
                start = row;
            }
        }
        runs
    }

    /// Lookup table from CpG identifier to row index.
    pub fn cpg_row_index(&self) -> HashMap<&str, usize> {
        self.cpg_ids
            .iter()
            .enumerate()
            .map(|(row, id)| (id.as_str(), row))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("cg{i:08}")).collect()
    }

    #[test]
    fn rejects_duplicate_ids() {
        let mut id = ids(3);
        id[2] = id[0].clone();
        let err = MethylationMatrix::new(
            id,
            vec!["6".into(); 3],
            vec!["s1".into()],
            vec![0.0; 3],
        );
        assert!(matches!(err, Err(Error::DuplicateCpg { row: 3, .. })));
    }

    #[test]
    fn rejects_noncontiguous_chromosomes() {
        let err = MethylationMatrix::new(
            ids(3),
            vec!["6".into(), "7".into(), "6".into()],
            vec!["s1".into()],
            vec![0.0; 3],
        );
        assert!(matches!(
            err,
            Err(Error::NonContiguousChromosome { row: 3, .. })
        ));
    }

    #[test]
    fn chromosome_runs_cover_rows() {
        let m = MethylationMatrix::new(
            ids(5),
            vec!["1".into(), "1".into(), "2".into(), "2".into(), "3".into()],
            vec!["s1".into()],
            vec![0.0; 5],
        )
        .unwrap();
        assert_eq!(
            m.chromosome_runs(),
            vec![
                ("1".to_string(), 0, 1),
                ("2".to_string(), 2, 3),
                ("3".to_string(), 4, 4)
            ]
        );
    }

    #[test]
    fn rejects_empty_samples_and_bad_grid() {
        assert!(MethylationMatrix::new(ids(2), vec!["6".into(); 2], vec![], vec![]).is_err());
        assert!(MethylationMatrix::new(
            ids(2),
            vec!["6".into(); 2],
            vec!["s1".into()],
            vec![0.0; 3]
        )
        .is_err());
    }
}
