use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::space::{ClassValue, FeatureSpace, Limits, Point};

/// A classifier given by its complete truth table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TabularClassifier {
    space: FeatureSpace,
    // indexed by mixed-radix point index
    labels: Vec<ClassValue>,
}

impl TabularClassifier {
    /// Builds a table from one label per point, in mixed-radix order.
    pub fn new(space: FeatureSpace, labels: Vec<ClassValue>) -> Result<Self> {
        if labels.len() as u64 != space.total_points() {
            return Err(Error::model(format!(
                "table has {} labels, the feature space has {} points",
                labels.len(),
                space.total_points()
            )));
        }
        if labels.iter().all(|&c| c == labels[0]) {
            return Err(Error::ConstantClassifier);
        }
        Ok(TabularClassifier { space, labels })
    }

    /// Builds a table from explicit rows, which must cover every point exactly once.
    pub fn from_rows<I>(space: FeatureSpace, rows: I, limits: &Limits) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, ClassValue)>,
    {
        limits.check_points("tabular classifier", space.total_points())?;
        let mut labels: Vec<Option<ClassValue>> = vec![None; space.total_points() as usize];
        for (x, c) in rows {
            space.check_values(&x)?;
            let slot = &mut labels[space.index_of(&x) as usize];
            if slot.is_some() {
                return Err(Error::model(format!(
                    "duplicate row for point {}",
                    space.point_at(space.index_of(&x))
                )));
            }
            *slot = Some(c);
        }
        let labels = labels
            .into_iter()
            .enumerate()
            .map(|(k, c)| {
                c.ok_or_else(|| {
                    Error::model(format!(
                        "table is incomplete: no row for point {}",
                        space.point_at(k as u64)
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(space, labels)
    }

    /// Tabulates an arbitrary function over the whole space.
    pub fn from_fn(
        space: FeatureSpace,
        f: impl Fn(&[u32]) -> ClassValue,
        limits: &Limits,
    ) -> Result<Self> {
        limits.check_points("tabular classifier", space.total_points())?;
        let mut labels = Vec::with_capacity(space.total_points() as usize);
        space.visit_all(|x| {
            labels.push(f(x));
            true
        });
        Self::new(space, labels)
    }

    pub fn space(&self) -> &FeatureSpace {
        &self.space
    }

    pub fn labels(&self) -> &[ClassValue] {
        &self.labels
    }

    pub fn classify(&self, x: &[u32]) -> ClassValue {
        self.labels[self.space.index_of(x) as usize]
    }

    /// Rows in mixed-radix order.
    pub fn rows(&self) -> impl Iterator<Item = (Point, ClassValue)> + '_ {
        self.labels
            .iter()
            .enumerate()
            .map(|(k, &c)| (self.space.point_at(k as u64), c))
    }

    pub fn classes(&self) -> Vec<ClassValue> {
        self.labels
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }
}
