//! Exact Shapley values, formal explanations, feature relevancy and minimal
//! adversarial change-sets for discrete classifiers given as tables,
//! set-labelled decision trees or ordered multi-valued decision diagrams.

pub mod adversarial;
pub mod error;
pub mod explain;
pub mod families;
pub mod model;
pub mod problem;
pub mod random;
pub mod rational;
pub mod report;
pub mod scan;
pub mod shapley;
pub mod space;

pub use adversarial::AdversarialSet;
pub use error::{Error, Result};
pub use explain::{Engine, RelevancyReport};
pub use families::{FamilyId, FamilySpec, Strategy};
pub use model::{Backend, DecisionTree, Model, Omdd, OmddNode, TabularClassifier};
pub use problem::ExplanationProblem;
pub use shapley::SvReport;
pub use space::{ClassValue, FeatureSet, FeatureSpace, Limits, Point};
