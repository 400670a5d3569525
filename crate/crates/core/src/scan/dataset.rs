//! CSV ingestion: a header row, feature columns, and an integer class in the
//! last column.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Read;

use crate::error::{Error, Result};
use crate::model::Omdd;
use crate::space::{ClassValue, FeatureSpace};

/// How raw cells of one feature column map to codes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColumnCoding {
    /// The column holds non-negative integers, used as codes directly.
    Identity,
    /// Distinct symbols in sorted order; the code is the position.
    Symbols(Vec<String>),
}

#[derive(Clone, Debug)]
pub struct Dataset {
    pub space: FeatureSpace,
    pub codings: Vec<ColumnCoding>,
    /// Rows kept, in file order.
    pub rows: Vec<(Vec<u32>, ClassValue)>,
    /// Rows dropped because an earlier row had the same features and another class.
    pub dropped: usize,
}

/// Reads a CSV and keeps a consistent subset: a row whose features repeat an
/// earlier kept row with a different class is dropped.
pub fn load_consistent_dataset(input: impl Read) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header.len() < 2 {
        return Err(Error::Dataset(
            "need at least one feature column and a class column".into(),
        ));
    }
    let m = header.len() - 1;
    let mut raw: Vec<(Vec<String>, ClassValue)> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let class_cell = &record[m];
        let class: ClassValue = class_cell.parse().map_err(|_| {
            Error::Dataset(format!(
                "row {}: class {class_cell:?} is not an integer",
                line + 1
            ))
        })?;
        raw.push((record.iter().take(m).map(str::to_string).collect(), class));
    }
    if raw.is_empty() {
        return Err(Error::Dataset("no data rows".into()));
    }

    let mut codings = Vec::with_capacity(m);
    let mut domains = Vec::with_capacity(m);
    for j in 0..m {
        let ints: Option<Vec<u32>> = raw.iter().map(|(cells, _)| cells[j].parse().ok()).collect();
        match ints {
            Some(values) => {
                let max = values.iter().copied().max().unwrap_or(0);
                codings.push(ColumnCoding::Identity);
                domains.push((max + 1).max(2));
            }
            None => {
                let symbols: BTreeSet<&str> = raw.iter().map(|(c, _)| c[j].as_str()).collect();
                domains.push((symbols.len() as u32).max(2));
                codings.push(ColumnCoding::Symbols(
                    symbols.into_iter().map(str::to_string).collect(),
                ));
            }
        }
    }
    let space = FeatureSpace::with_names(header[..m].to_vec(), domains)?;

    let code = |j: usize, cell: &str| -> u32 {
        match &codings[j] {
            ColumnCoding::Identity => cell.parse().expect("column checked numeric"),
            ColumnCoding::Symbols(symbols) => symbols
                .binary_search_by(|s| s.as_str().cmp(cell))
                .expect("symbol collected above") as u32,
        }
    };
    let mut seen: HashMap<Vec<u32>, ClassValue> = HashMap::new();
    let mut rows = Vec::new();
    let mut dropped = 0;
    for (cells, class) in &raw {
        let x: Vec<u32> = cells.iter().enumerate().map(|(j, c)| code(j, c)).collect();
        match seen.get(&x) {
            Some(&first) if first != *class => dropped += 1,
            Some(_) => rows.push((x, *class)),
            None => {
                seen.insert(x.clone(), *class);
                rows.push((x, *class));
            }
        }
    }
    Ok(Dataset {
        space,
        codings,
        rows,
        dropped,
    })
}

/// Class given to points no row covers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Completion {
    /// The most frequent class among the kept rows; ties go to the smallest.
    #[default]
    Majority,
    Class(ClassValue),
}

impl Dataset {
    pub fn majority_class(&self) -> ClassValue {
        let mut counts: BTreeMap<ClassValue, usize> = BTreeMap::new();
        for (_, c) in &self.rows {
            *counts.entry(*c).or_default() += 1;
        }
        // max_by_key keeps the last maximum, so scan from the largest label down
        counts
            .into_iter()
            .rev()
            .max_by_key(|&(_, n)| n)
            .map(|(c, _)| c)
            .expect("datasets are never empty")
    }
}

/// Reduced diagram in column order that agrees with every kept row and
/// gives uncovered points the completion class.
pub fn build_omdd_from_dataset(data: &Dataset, completion: Completion) -> Result<Omdd> {
    let default = match completion {
        Completion::Majority => data.majority_class(),
        Completion::Class(c) => c,
    };
    Omdd::from_partial(
        data.space.clone(),
        (0..data.space.m()).collect(),
        &data.rows,
        default,
    )
}
