use crate::error::{Error, Result};
use crate::model::Model;
use crate::space::{ClassValue, FeatureSet, FeatureSpace, Limits, Point};

/// A classifier paired with an instance and the class it predicts there.
#[derive(Clone, Debug)]
pub struct ExplanationProblem<'m> {
    model: &'m Model,
    instance: Point,
    class: ClassValue,
    limits: Limits,
}

impl<'m> ExplanationProblem<'m> {
    /// Evaluates the model on `instance` to obtain the predicted class.
    pub fn new(model: &'m Model, instance: Point) -> Result<Self> {
        let class = model.evaluate(&instance)?;
        Ok(ExplanationProblem {
            model,
            instance,
            class,
            limits: Limits::default(),
        })
    }

    /// Like [`ExplanationProblem::new`], but checks a class supplied by the caller.
    pub fn with_class(model: &'m Model, instance: Point, class: ClassValue) -> Result<Self> {
        let p = Self::new(model, instance)?;
        if p.class != class {
            return Err(Error::input(format!(
                "the model predicts {} at {}, not {class}",
                p.class, p.instance
            )));
        }
        Ok(p)
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub fn model(&self) -> &'m Model {
        self.model
    }

    pub fn space(&self) -> &'m FeatureSpace {
        self.model.space()
    }

    pub fn m(&self) -> usize {
        self.space().m()
    }

    pub fn instance(&self) -> &Point {
        &self.instance
    }

    pub fn class(&self) -> ClassValue {
        self.class
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    pub fn all_features(&self) -> FeatureSet {
        FeatureSet::full(self.m())
    }

    pub(crate) fn v(&self) -> &[u32] {
        self.instance.values()
    }
}
