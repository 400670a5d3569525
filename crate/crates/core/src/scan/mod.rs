//! Corpus scans for instances where Shapley values rank an irrelevant feature
//! above a relevant one.

mod dataset;

pub use dataset::{build_omdd_from_dataset, load_consistent_dataset, ColumnCoding, Completion, Dataset};

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::explain::{relevancy_report, Engine};
use crate::model::{Backend, Model};
use crate::problem::ExplanationProblem;
use crate::rational::decimal4;
use crate::report::to_json_text;
use crate::shapley::shapley_values;
use crate::space::{ClassValue, FeatureSet, Limits, Point};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanRecord {
    /// Mixed-radix index of the instance.
    pub index: u64,
    pub instance: Point,
    pub class: ClassValue,
    pub sv: Vec<BigRational>,
    pub relevant: FeatureSet,
    /// Largest |Sv| over the irrelevant features.
    pub v_i: Option<BigRational>,
    /// Smallest |Sv| over the relevant features.
    pub v_j: Option<BigRational>,
    /// Some irrelevant feature has a larger |Sv| than some relevant one.
    pub issue: bool,
}

impl ScanRecord {
    /// A relevant feature got a Shapley value of exactly zero.
    pub fn zero_sv_relevant(&self) -> bool {
        self.relevant.iter().any(|i| self.sv[i].is_zero())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ScanOptions {
    pub backend: Backend,
    pub engine: Engine,
}

pub fn analyze_instance(p: &ExplanationProblem, options: ScanOptions) -> Result<ScanRecord> {
    let sv = shapley_values(p, options.backend)?.sv;
    let relevant = relevancy_report(p, options.engine)?.relevant;
    let m = p.m();
    let v_i = relevant
        .complement(m)
        .iter()
        .map(|i| sv[i].abs())
        .max();
    let v_j = relevant.iter().map(|i| sv[i].abs()).min();
    let issue = matches!((&v_i, &v_j), (Some(a), Some(b)) if a > b);
    Ok(ScanRecord {
        index: p.space().index_of(p.instance().values()),
        instance: p.instance().clone(),
        class: p.class(),
        sv,
        relevant,
        v_i,
        v_j,
        issue,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selection {
    All,
    /// `n` distinct points drawn without replacement by
    /// `rand::seq::index::sample` from a ChaCha8 stream seeded with `seed`.
    Sample { n: u64, seed: u64 },
}

/// Mixed-radix indices of the selected points, ascending.
pub fn select_indices(total: u64, selection: Selection) -> Vec<u64> {
    match selection {
        Selection::Sample { n, seed } if n < total => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut picked: Vec<u64> =
                rand::seq::index::sample(&mut rng, total as usize, n as usize)
                    .into_iter()
                    .map(|i| i as u64)
                    .collect();
            picked.sort_unstable();
            picked
        }
        _ => (0..total).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanSummary {
    pub total: u64,
    pub issues: u64,
    pub fraction: f64,
    pub zero_sv_relevant: u64,
}

impl ScanSummary {
    pub fn from_records(records: &[ScanRecord]) -> Self {
        let total = records.len() as u64;
        let issues = records.iter().filter(|r| r.issue).count() as u64;
        ScanSummary {
            total,
            issues,
            fraction: if total == 0 { 0.0 } else { issues as f64 / total as f64 },
            zero_sv_relevant: records.iter().filter(|r| r.zero_sv_relevant()).count() as u64,
        }
    }

    pub fn to_json(&self) -> String {
        to_json_text(self)
    }
}

/// Analyses every selected point on the current rayon pool. Records come
/// back sorted by instance index.
pub fn scan_model(
    model: &Model,
    selection: Selection,
    options: ScanOptions,
    limits: &Limits,
) -> Result<(Vec<ScanRecord>, ScanSummary)> {
    let space = model.space();
    if matches!(selection, Selection::All) {
        limits.check_points("full scan", space.total_points())?;
    }
    let indices = select_indices(space.total_points(), selection);
    let records = indices
        .into_par_iter()
        .map(|k| {
            let p = ExplanationProblem::new(model, space.point_at(k))?.with_limits(*limits);
            analyze_instance(&p, options)
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = ScanSummary::from_records(&records);
    Ok((records, summary))
}

/// CSV with one line per record; rationals as 4-place decimals.
pub fn records_to_csv(records: &[ScanRecord], m: usize) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["instance_index".to_string()];
    header.extend((1..=m).map(|i| format!("x{i}")));
    header.push("class".into());
    header.extend((1..=m).map(|i| format!("sv_{i}")));
    header.extend(["relevant", "issue", "v_i", "v_j"].map(String::from));
    w.write_record(&header)?;
    let opt = |q: &Option<BigRational>| q.as_ref().map(decimal4).unwrap_or_default();
    for r in records {
        let mut row = vec![r.index.to_string()];
        row.extend(r.instance.values().iter().map(u32::to_string));
        row.push(r.class.to_string());
        row.extend(r.sv.iter().map(decimal4));
        row.push(
            r.relevant
                .to_one_based()
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(";"),
        );
        row.push(if r.issue { "1" } else { "0" }.into());
        row.push(opt(&r.v_i));
        row.push(opt(&r.v_j));
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("CSV of ASCII fields"))
}
