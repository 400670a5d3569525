//! Discrete classifier representations and the queries every analysis needs:
//! evaluation, sums over the points agreeing with an instance on a feature
//! subset, and uniformity of the class over such a cube.

mod file;
mod omdd;
mod table;
mod tree;

pub use file::{read_model, render_model, write_model, FeatureJson, ModelFile};
pub use omdd::{NodeId, Omdd, OmddNode};
pub use table::TabularClassifier;
pub use tree::{DecisionTree, TreeEdge, TreeNode};

use crate::error::{Error, Result};
use crate::space::{ClassValue, FeatureSet, FeatureSpace, Limits, Point};

/// How sums of the classifier over a cube are obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Backend {
    /// Visit every point of the cube.
    #[default]
    Enumerate,
    /// Count the points reaching each leaf or terminal. Tables are compiled to
    /// a decision diagram first.
    Paths,
}

#[derive(Clone, Debug)]
pub enum Model {
    Table(TabularClassifier),
    Tree(DecisionTree),
    Omdd(Omdd),
}

impl From<TabularClassifier> for Model {
    fn from(t: TabularClassifier) -> Self {
        Model::Table(t)
    }
}

impl From<DecisionTree> for Model {
    fn from(t: DecisionTree) -> Self {
        Model::Tree(t)
    }
}

impl From<Omdd> for Model {
    fn from(d: Omdd) -> Self {
        Model::Omdd(d)
    }
}

impl Model {
    pub fn space(&self) -> &FeatureSpace {
        match self {
            Model::Table(t) => t.space(),
            Model::Tree(t) => t.space(),
            Model::Omdd(d) => d.space(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Model::Table(_) => "table",
            Model::Tree(_) => "dt",
            Model::Omdd(_) => "omdd",
        }
    }

    /// Class of a point already known to be valid.
    pub fn classify(&self, x: &[u32]) -> ClassValue {
        match self {
            Model::Table(t) => t.classify(x),
            Model::Tree(t) => t.classify(x),
            Model::Omdd(d) => d.classify(x),
        }
    }

    pub fn evaluate(&self, x: &Point) -> Result<ClassValue> {
        self.space().check_values(x.values())?;
        Ok(self.classify(x.values()))
    }

    /// Distinct class values the model can output, sorted.
    pub fn classes(&self) -> Vec<ClassValue> {
        match self {
            Model::Table(t) => t.classes(),
            Model::Tree(t) => t.classes(),
            Model::Omdd(d) => d.classes(),
        }
    }

    /// Sum of the classifier over the points agreeing with `v` on `fixed`.
    pub fn cube_sum(
        &self,
        fixed: FeatureSet,
        v: &[u32],
        backend: Backend,
        limits: &Limits,
    ) -> Result<i128> {
        let space = self.space();
        space.check_set(fixed)?;
        space.check_values(v)?;
        match (backend, self) {
            (Backend::Enumerate, _) => {
                limits.check_points("cube enumeration", space.cube_size(fixed))?;
                let mut total: i128 = 0;
                space.visit_cube(fixed, v, |x| {
                    total += self.classify(x) as i128;
                    true
                });
                Ok(total)
            }
            (Backend::Paths, Model::Tree(t)) => t.path_sum(fixed, v),
            (Backend::Paths, Model::Omdd(d)) => d.path_sum(fixed, v),
            (Backend::Paths, Model::Table(t)) => {
                let d = tabular_to_omdd(t, (0..space.m()).collect(), limits)?;
                d.path_sum(fixed, v)
            }
        }
    }

    /// Whether every point agreeing with `v` on `fixed` has class `class`.
    pub fn cube_is_uniform(
        &self,
        fixed: FeatureSet,
        v: &[u32],
        class: ClassValue,
        limits: &Limits,
    ) -> Result<bool> {
        Ok(match self {
            Model::Table(_) => self.find_other_class(fixed, v, class, limits)?.is_none(),
            Model::Tree(t) => t.cube_is_uniform(fixed, v, class),
            Model::Omdd(d) => d.cube_is_uniform(fixed, v, class),
        })
    }

    /// Some point agreeing with `v` on `fixed` whose class differs from `class`.
    /// Tables and trees return the lexicographically smallest such point.
    pub fn find_other_class(
        &self,
        fixed: FeatureSet,
        v: &[u32],
        class: ClassValue,
        limits: &Limits,
    ) -> Result<Option<Vec<u32>>> {
        match self {
            Model::Tree(t) => Ok(t.find_other_class(fixed, v, class)),
            Model::Omdd(d) => Ok(d.find_other_class(fixed, v, class)),
            Model::Table(_) => {
                let space = self.space();
                limits.check_points("cube enumeration", space.cube_size(fixed))?;
                let mut found = None;
                space.visit_cube(fixed, v, |x| {
                    if self.classify(x) != class {
                        found = Some(x.to_vec());
                        false
                    } else {
                        true
                    }
                });
                Ok(found)
            }
        }
    }

    pub fn to_tabular(&self, limits: &Limits) -> Result<TabularClassifier> {
        match self {
            Model::Table(t) => Ok(t.clone()),
            _ => TabularClassifier::from_fn(self.space().clone(), |x| self.classify(x), limits),
        }
    }

    /// Compiles the model to a reduced diagram under `order` (0-based features).
    pub fn to_omdd(&self, order: Vec<usize>, limits: &Limits) -> Result<Omdd> {
        Omdd::from_fn(self.space().clone(), order, |x| self.classify(x), limits)
    }
}

/// Number of points agreeing with any point on `fixed`.
pub fn cube_size(space: &FeatureSpace, fixed: FeatureSet) -> Result<u64> {
    space.check_set(fixed)?;
    Ok(space.cube_size(fixed))
}

/// Sum of the classifier over the cube of `v` and `fixed`.
pub fn sum_kappa_over_cube(
    model: &Model,
    fixed: FeatureSet,
    v: &Point,
    backend: Backend,
    limits: &Limits,
) -> Result<i128> {
    model.cube_sum(fixed, v.values(), backend, limits)
}

pub fn tabular_to_omdd(
    table: &TabularClassifier,
    order: Vec<usize>,
    limits: &Limits,
) -> Result<Omdd> {
    Omdd::from_fn(table.space().clone(), order, |x| table.classify(x), limits)
}

pub fn dt_to_tabular(dt: &DecisionTree, limits: &Limits) -> Result<TabularClassifier> {
    TabularClassifier::from_fn(dt.space().clone(), |x| dt.classify(x), limits)
}

pub fn omdd_to_tabular(dd: &Omdd, limits: &Limits) -> Result<TabularClassifier> {
    TabularClassifier::from_fn(dd.space().clone(), |x| dd.classify(x), limits)
}

/// Converts a 1-based variable order to 0-based feature indices, validating it.
pub fn order_from_one_based(space: &FeatureSpace, one_based: &[usize]) -> Result<Vec<usize>> {
    if one_based.contains(&0) {
        return Err(Error::input("feature numbers in an order start at 1"));
    }
    let order: Vec<usize> = one_based.iter().map(|f| f - 1).collect();
    omdd::check_order(space, &order)?;
    Ok(order)
}
