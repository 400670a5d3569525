//! Abductive (sufficient) and contrastive (counterfactual) explanations,
//! their complete enumeration, and the relevancy of each feature.

mod hitting;

pub use hitting::{minimal_hitting_sets, minimize_family};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::problem::ExplanationProblem;
use crate::report::to_json_text;
use crate::space::{sort_family, FeatureSet};

/// Whether fixing the features of `fixed` to the instance's values forces
/// the predicted class.
pub fn is_sufficient(p: &ExplanationProblem, fixed: FeatureSet) -> Result<bool> {
    p.space().check_set(fixed)?;
    p.model()
        .cube_is_uniform(fixed, p.v(), p.class(), p.limits())
}

/// Whether freeing the features of `freed` (keeping the others at the
/// instance's values) allows a different class.
pub fn is_counterfactual(p: &ExplanationProblem, freed: FeatureSet) -> Result<bool> {
    p.space().check_set(freed)?;
    Ok(!is_sufficient(p, freed.complement(p.m()))?)
}

fn check_order(p: &ExplanationProblem, order: &[usize]) -> Result<()> {
    let m = p.m();
    let mut seen = FeatureSet::EMPTY;
    for &i in order {
        if i >= m || seen.contains(i) {
            return Err(Error::input(
                "elimination order must list each feature once",
            ));
        }
        seen = seen.with(i);
    }
    if seen.len() != m {
        return Err(Error::input("elimination order must list every feature"));
    }
    Ok(())
}

fn ascending(p: &ExplanationProblem) -> Vec<usize> {
    (0..p.m()).collect()
}

/// Deletion-based shrinking of a sufficient set.
fn shrink_sufficient(
    p: &ExplanationProblem,
    mut set: FeatureSet,
    order: &[usize],
) -> Result<FeatureSet> {
    for &i in order {
        if set.contains(i) && is_sufficient(p, set.without(i))? {
            set = set.without(i);
        }
    }
    Ok(set)
}

/// Deletion-based shrinking of a counterfactual set.
fn shrink_counterfactual(
    p: &ExplanationProblem,
    mut set: FeatureSet,
    order: &[usize],
) -> Result<FeatureSet> {
    for &i in order {
        if set.contains(i) && is_counterfactual(p, set.without(i))? {
            set = set.without(i);
        }
    }
    Ok(set)
}

/// One abductive explanation, dropping features in ascending order.
pub fn one_axp(p: &ExplanationProblem) -> Result<FeatureSet> {
    one_axp_with_order(p, &ascending(p))
}

/// One abductive explanation, trying to drop features in `order` (0-based).
pub fn one_axp_with_order(p: &ExplanationProblem, order: &[usize]) -> Result<FeatureSet> {
    check_order(p, order)?;
    shrink_sufficient(p, p.all_features(), order)
}

/// One contrastive explanation, dropping features in ascending order.
pub fn one_cxp(p: &ExplanationProblem) -> Result<FeatureSet> {
    one_cxp_with_order(p, &ascending(p))
}

pub fn one_cxp_with_order(p: &ExplanationProblem, order: &[usize]) -> Result<FeatureSet> {
    check_order(p, order)?;
    shrink_counterfactual(p, p.all_features(), order)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Engine {
    /// Test every subset of the features.
    BruteForce,
    /// Alternate minimal hitting sets of the contrastive explanations found so
    /// far with sufficiency checks.
    #[default]
    Duality,
}

/// Complete sets of abductive and contrastive explanations, each sorted
/// lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Explanations {
    pub axps: Vec<FeatureSet>,
    pub cxps: Vec<FeatureSet>,
}

pub fn enumerate_explanations(p: &ExplanationProblem, engine: Engine) -> Result<Explanations> {
    p.limits()
        .check_features("explanation enumeration", p.m())?;
    match engine {
        Engine::BruteForce => brute_force(p),
        Engine::Duality => duality(p),
    }
}

fn brute_force(p: &ExplanationProblem) -> Result<Explanations> {
    let m = p.m();
    let sufficient = FeatureSet::all_subsets(m)
        .map(|s| is_sufficient(p, s))
        .collect::<Result<Vec<bool>>>()?;
    let suff = |s: FeatureSet| sufficient[s.bits() as usize];
    let cf = |s: FeatureSet| !suff(s.complement(m));
    let mut axps: Vec<FeatureSet> = FeatureSet::all_subsets(m)
        .filter(|&s| suff(s) && s.iter().all(|i| !suff(s.without(i))))
        .collect();
    let mut cxps: Vec<FeatureSet> = FeatureSet::all_subsets(m)
        .filter(|&s| cf(s) && s.iter().all(|i| !cf(s.without(i))))
        .collect();
    sort_family(&mut axps);
    sort_family(&mut cxps);
    Ok(Explanations { axps, cxps })
}

fn duality(p: &ExplanationProblem) -> Result<Explanations> {
    let order = ascending(p);
    let mut axps: Vec<FeatureSet> = Vec::new();
    let mut cxps: Vec<FeatureSet> = Vec::new();
    loop {
        // a minimal hitting set of the known CXps that is not a known AXp
        let candidate = minimal_hitting_sets(&cxps)
            .into_iter()
            .find(|h| !axps.contains(h));
        let Some(h) = candidate else { break };
        match p
            .model()
            .find_other_class(h, p.v(), p.class(), p.limits())?
        {
            // every proper subset misses some CXp, so h is already minimal
            None => axps.push(h),
            Some(x) => {
                let freed = p.instance().diff_set(&x);
                cxps.push(shrink_counterfactual(p, freed, &order)?);
            }
        }
    }
    sort_family(&mut axps);
    sort_family(&mut cxps);
    Ok(Explanations { axps, cxps })
}

/// Explanations plus the relevant, necessary and irrelevant features.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelevancyReport {
    pub axps: Vec<FeatureSet>,
    pub cxps: Vec<FeatureSet>,
    /// Features occurring in some AXp.
    pub relevant: FeatureSet,
    /// Features occurring in every AXp.
    pub necessary: FeatureSet,
    pub irrelevant: FeatureSet,
}

#[derive(Serialize)]
struct RelevancyJson {
    axps: Vec<Vec<usize>>,
    cxps: Vec<Vec<usize>>,
    relevant: Vec<usize>,
    necessary: Vec<usize>,
    irrelevant: Vec<usize>,
}

impl RelevancyReport {
    pub fn from_explanations(m: usize, e: Explanations) -> Self {
        let relevant = e
            .axps
            .iter()
            .fold(FeatureSet::EMPTY, |acc, s| acc.union(*s));
        let necessary = e
            .axps
            .iter()
            .fold(FeatureSet::full(m), |acc, s| acc.intersection(*s));
        let necessary = if e.axps.is_empty() {
            FeatureSet::EMPTY
        } else {
            necessary
        };
        RelevancyReport {
            axps: e.axps,
            cxps: e.cxps,
            relevant,
            necessary,
            irrelevant: relevant.complement(m),
        }
    }

    /// The AXps of smallest size.
    pub fn smallest_axps(&self) -> Vec<FeatureSet> {
        let k = self.axps.iter().map(|s| s.len()).min().unwrap_or(0);
        self.axps.iter().copied().filter(|s| s.len() == k).collect()
    }

    pub fn is_relevant(&self, feature: usize) -> bool {
        self.relevant.contains(feature)
    }

    pub fn to_json(&self) -> String {
        let sets = |f: &[FeatureSet]| f.iter().map(|s| s.to_one_based()).collect();
        to_json_text(&RelevancyJson {
            axps: sets(&self.axps),
            cxps: sets(&self.cxps),
            relevant: self.relevant.to_one_based(),
            necessary: self.necessary.to_one_based(),
            irrelevant: self.irrelevant.to_one_based(),
        })
    }
}

pub fn relevancy_report(p: &ExplanationProblem, engine: Engine) -> Result<RelevancyReport> {
    Ok(RelevancyReport::from_explanations(
        p.m(),
        enumerate_explanations(p, engine)?,
    ))
}

/// Renders an AXp as `IF x1=1 AND x3=0 THEN class=2`.
pub fn axp_rule(p: &ExplanationProblem, axp: FeatureSet) -> Result<String> {
    let mut minimal = is_sufficient(p, axp)?;
    for i in axp.iter() {
        minimal = minimal && !is_sufficient(p, axp.without(i))?;
    }
    if !minimal {
        return Err(Error::input(format!("{axp:?} is not an abductive explanation")));
    }
    let space = p.space();
    let literals: Vec<String> = axp
        .iter()
        .map(|i| format!("{}={}", space.name(i), p.v()[i]))
        .collect();
    let premise = if literals.is_empty() {
        "TRUE".to_string()
    } else {
        literals.join(" AND ")
    };
    Ok(format!("IF {premise} THEN class={}", p.class()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Model, TabularClassifier};
    use crate::space::{ClassValue, FeatureSpace, Point};

    fn k1() -> Model {
        let space = FeatureSpace::new(vec![2, 2, 2]).unwrap();
        let f = |x: &[u32]| -> ClassValue {
            match (x[0], x[1], x[2]) {
                (1, _, _) => 1,
                (0, _, 1) => 3,
                (0, 1, 0) => 2,
                _ => 0,
            }
        };
        TabularClassifier::from_fn(space, f, &Default::default())
            .unwrap()
            .into()
    }

    fn set(one_based: &[usize]) -> FeatureSet {
        FeatureSet::from_one_based(one_based.iter().copied())
    }

    #[test]
    fn k1_predicates() {
        let m = k1();
        let p = ExplanationProblem::new(&m, Point::from(vec![1, 0, 0])).unwrap();
        assert_eq!(p.class(), 1);
        assert!(is_sufficient(&p, set(&[1])).unwrap());
        assert!(!is_sufficient(&p, FeatureSet::EMPTY).unwrap());
        assert!(is_sufficient(&p, set(&[1, 2, 3])).unwrap());
        assert!(is_counterfactual(&p, set(&[1])).unwrap());
        assert!(!is_counterfactual(&p, set(&[2, 3])).unwrap());
        assert!(!is_counterfactual(&p, FeatureSet::EMPTY).unwrap());
    }

    #[test]
    fn k1_explanations() {
        let m = k1();
        let p = ExplanationProblem::new(&m, Point::from(vec![1, 0, 0])).unwrap();
        for order in [[0, 1, 2], [2, 1, 0], [1, 2, 0]] {
            assert_eq!(one_axp_with_order(&p, &order).unwrap(), set(&[1]));
            assert_eq!(one_cxp_with_order(&p, &order).unwrap(), set(&[1]));
        }
        for engine in [Engine::BruteForce, Engine::Duality] {
            let r = relevancy_report(&p, engine).unwrap();
            assert_eq!(r.axps, vec![set(&[1])]);
            assert_eq!(r.cxps, vec![set(&[1])]);
            assert_eq!(r.necessary, set(&[1]));
            assert_eq!(r.irrelevant, set(&[2, 3]));
        }
        assert_eq!(axp_rule(&p, set(&[1])).unwrap(), "IF x1=1 THEN class=1");
        assert!(axp_rule(&p, set(&[1, 2])).is_err());
    }

    #[test]
    fn report_json() {
        let m = k1();
        let p = ExplanationProblem::new(&m, Point::from(vec![0, 1, 0])).unwrap();
        let r = relevancy_report(&p, Engine::Duality).unwrap();
        assert_eq!(r, relevancy_report(&p, Engine::BruteForce).unwrap());
        assert_eq!(
            r.to_json(),
            "{\n  \"axps\": [\n    [1,2,3]\n  ],\n  \"cxps\": [\n    [1],\n    [2],\n    [3]\n  ],\n  \"relevant\": [1,2,3],\n  \"necessary\": [1,2,3],\n  \"irrelevant\": []\n}\n"
        );
    }

    #[test]
    fn bad_orders_are_rejected() {
        let m = k1();
        let p = ExplanationProblem::new(&m, Point::from(vec![1, 0, 0])).unwrap();
        assert!(one_axp_with_order(&p, &[0, 1]).is_err());
        assert!(one_axp_with_order(&p, &[0, 0, 1]).is_err());
        assert!(one_axp_with_order(&p, &[0, 1, 3]).is_err());
    }
}
