//! Count-table ingestion: TSV/CSV reading, prevalence filtering, zero
//! replacement, and normalization into compositions.

use std::path::Path;

use crate::composition::CompositionMatrix;
use crate::error::{CoatError, Result};
use crate::mat::Mat;
use crate::num::{c, Real};

/// Raw read counts with sample and taxon labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    /// One row of nonnegative counts per sample.
    pub counts: Vec<Vec<u64>>,
    pub sample_ids: Vec<String>,
    pub taxon_ids: Vec<String>,
}

impl CountTable {
    pub fn n_samples(&self) -> usize {
        self.counts.len()
    }

    pub fn n_taxa(&self) -> usize {
        self.taxon_ids.len()
    }

    /// Drop taxa observed (count > 0) in fewer than `min_prevalence`
    /// samples.
    pub fn filter_prevalence(&self, min_prevalence: usize) -> CountTable {
        let keep: Vec<usize> = (0..self.n_taxa())
            .filter(|&j| {
                self.counts.iter().filter(|row| row[j] > 0).count() >= min_prevalence
            })
            .collect();
        CountTable {
            counts: self
                .counts
                .iter()
                .map(|row| keep.iter().map(|&j| row[j]).collect())
                .collect(),
            sample_ids: self.sample_ids.clone(),
            taxon_ids: keep.iter().map(|&j| self.taxon_ids[j].clone()).collect(),
        }
    }

    /// Replace zeros with a pseudo-count and normalize rows to compositions.
    pub fn to_composition<F: Real>(&self, pseudo_count: f64) -> Result<CompositionMatrix<F>> {
        if !(pseudo_count > 0.0) {
            return Err(CoatError::Config(format!(
                "pseudo-count must be positive, got {pseudo_count}"
            )));
        }
        let (n, p) = (self.n_samples(), self.n_taxa());
        if n < 2 || p < 2 {
            return Err(CoatError::Data(format!(
                "need at least 2 samples and 2 taxa after filtering, have {n}x{p}"
            )));
        }
        let pseudo = c::<F>(pseudo_count);
        let values = Mat::from_fn(n, p, |i, j| {
            let count = self.counts[i][j];
            if count == 0 {
                pseudo
            } else {
                c::<F>(count as f64)
            }
        });
        CompositionMatrix::normalize(values, self.sample_ids.clone(), self.taxon_ids.clone())
    }
}

/// Read a count table from a TSV or CSV file.
///
/// The first header cell names the sample-id column; the rest are taxon
/// ids. The delimiter is taken from the header: tab wins if present,
/// otherwise comma. Cells must parse as nonnegative integers and no sample
/// row may be entirely zero.
pub fn read_count_table(path: &Path) -> Result<CountTable> {
    let text = std::fs::read_to_string(path)?;
    parse_count_table(&text)
}

pub(crate) fn parse_count_table(text: &str) -> Result<CountTable> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| CoatError::Data("empty count table".into()))?;
    let sep = if header.contains('\t') { '\t' } else { ',' };
    let header_cells: Vec<&str> = header.split(sep).collect();
    if header_cells.len() < 2 {
        return Err(CoatError::Data(
            "header must name a sample-id column and at least one taxon".into(),
        ));
    }
    let taxon_ids: Vec<String> = header_cells[1..].iter().map(|s| s.trim().to_string()).collect();
    let p = taxon_ids.len();

    let mut counts = Vec::new();
    let mut sample_ids = Vec::new();
    for (line_idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(sep).collect();
        if cells.len() != p + 1 {
            return Err(CoatError::Parse {
                line: line_idx + 1,
                col: cells.len(),
                reason: format!("expected {} cells, found {}", p + 1, cells.len()),
            });
        }
        let mut row = Vec::with_capacity(p);
        for (j, cell) in cells[1..].iter().enumerate() {
            let trimmed = cell.trim();
            let value: u64 = trimmed.parse().map_err(|_| CoatError::Parse {
                line: line_idx + 1,
                col: j + 2,
                reason: format!("'{trimmed}' is not a nonnegative integer count"),
            })?;
            row.push(value);
        }
        if row.iter().all(|&v| v == 0) {
            return Err(CoatError::Data(format!(
                "sample '{}' (line {}) has all-zero counts",
                cells[0].trim(),
                line_idx + 1
            )));
        }
        sample_ids.push(cells[0].trim().to_string());
        counts.push(row);
    }
    if counts.is_empty() {
        return Err(CoatError::Data("count table has no sample rows".into()));
    }
    Ok(CountTable {
        counts,
        sample_ids,
        taxon_ids,
    })
}

/// Ingest a count table into a composition with the standard 0.5
/// zero replacement.
pub fn ingest_counts<F: Real>(path: &Path, min_prevalence: usize) -> Result<CompositionMatrix<F>> {
    ingest_counts_with(path, min_prevalence, 0.5).map(|(_, x)| x)
}

/// Ingest with an explicit pseudo-count, returning the filtered table too.
pub fn ingest_counts_with<F: Real>(
    path: &Path,
    min_prevalence: usize,
    pseudo_count: f64,
) -> Result<(CountTable, CompositionMatrix<F>)> {
    let table = read_count_table(path)?.filter_prevalence(min_prevalence);
    let composition = table.to_composition(pseudo_count)?;
    Ok((table, composition))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_replacement_follows_stated_rule() {
        let table = parse_count_table("sample_id,a,b\ns1,0,2\ns2,1,1\n").unwrap();
        let x = table.to_composition::<f64>(0.5).unwrap();
        // counts (0, 2) become (0.5, 2) -> (0.2, 0.8)
        assert_relative_eq!(x.values()[(0, 0)], 0.2, epsilon = 1e-15);
        assert_relative_eq!(x.values()[(0, 1)], 0.8, epsilon = 1e-15);
    }

    #[test]
    fn tsv_and_csv_both_parse() {
        let csv = parse_count_table("sample_id,a,b\ns1,1,2\ns2,3,4\n").unwrap();
        let tsv = parse_count_table("sample_id\ta\tb\ns1\t1\t2\ns2\t3\t4\n").unwrap();
        assert_eq!(csv, tsv);
        assert_eq!(csv.taxon_ids, vec!["a", "b"]);
        assert_eq!(csv.counts[1], vec![3, 4]);
    }

    #[test]
    fn prevalence_filter_drops_rare_taxa() {
        let table =
            parse_count_table("sample_id,a,b,c\ns1,1,0,0\ns2,2,0,1\ns3,3,0,1\n").unwrap();
        let filtered = table.filter_prevalence(1);
        assert_eq!(filtered.taxon_ids, vec!["a", "c"]);
        let filtered2 = table.filter_prevalence(3);
        assert_eq!(filtered2.taxon_ids, vec!["a"]);
    }

    #[test]
    fn negative_and_garbage_cells_are_parse_errors() {
        let err = parse_count_table("sample_id,a,b\ns1,-1,2\n").unwrap_err();
        match err {
            CoatError::Parse { line, col, .. } => assert_eq!((line, col), (2, 2)),
            other => panic!("unexpected error {other:?}"),
        }
        assert!(matches!(
            parse_count_table("sample_id,a,b\ns1,x,2\n"),
            Err(CoatError::Parse { .. })
        ));
    }

    #[test]
    fn all_zero_row_is_a_data_error() {
        assert!(matches!(
            parse_count_table("sample_id,a,b\ns1,0,0\ns2,1,1\n"),
            Err(CoatError::Data(_))
        ));
    }

    #[test]
    fn too_few_taxa_after_filtering_is_a_data_error() {
        let table = parse_count_table("sample_id,a,b\ns1,1,0\ns2,2,0\n").unwrap();
        let filtered = table.filter_prevalence(1);
        assert!(matches!(
            filtered.to_composition::<f64>(0.5),
            Err(CoatError::Data(_))
        ));
    }

    #[test]
    fn rejects_nonpositive_pseudo_count() {
        let table = parse_count_table("sample_id,a,b\ns1,1,2\ns2,3,4\n").unwrap();
        assert!(table.to_composition::<f64>(0.0).is_err());
    }
}
