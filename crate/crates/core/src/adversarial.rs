//! Minimal l0 adversarial examples, represented by the set of features a
//! witness changes. A witness differs from the instance on exactly its set.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::Result;
use crate::explain::minimize_family;
use crate::problem::ExplanationProblem;
use crate::report::to_json_text;
use crate::space::{diff_set, sort_family, ClassValue, FeatureSet, Point};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdversarialSet {
    pub changed: FeatureSet,
    pub witness: Point,
    /// Class of the witness, different from the instance's.
    pub class: ClassValue,
}

/// The lexicographically smallest point changing exactly `changed` and
/// flipping the class, if any.
pub fn find_witness(p: &ExplanationProblem, changed: FeatureSet) -> Result<Option<AdversarialSet>> {
    let space = p.space();
    space.check_set(changed)?;
    p.limits()
        .check_points("change enumeration", space.cube_size(changed.complement(p.m())))?;
    let mut found = None;
    space.visit_changes(changed, p.v(), |x| {
        let class = p.model().classify(x);
        if class != p.class() {
            found = Some(AdversarialSet {
                changed,
                witness: Point::from(x.to_vec()),
                class,
            });
            false
        } else {
            true
        }
    });
    Ok(found)
}

/// Every change-set that has a witness, with its lexicographically smallest
/// witness, from one pass over the space.
fn all_adversarial(p: &ExplanationProblem) -> Result<BTreeMap<u64, AdversarialSet>> {
    let space = p.space();
    p.limits()
        .check_points("point enumeration", space.total_points())?;
    let mut found: BTreeMap<u64, AdversarialSet> = BTreeMap::new();
    space.visit_all(|x| {
        let class = p.model().classify(x);
        if class != p.class() {
            let changed = diff_set(x, p.v());
            // points arrive in lexicographic order, so the first one wins
            found.entry(changed.bits()).or_insert_with(|| AdversarialSet {
                changed,
                witness: Point::from(x.to_vec()),
                class,
            });
        }
        true
    });
    Ok(found)
}

/// All subset-minimal change-sets, sorted lexicographically, one witness each.
pub fn minimal_adversarial_sets(p: &ExplanationProblem) -> Result<Vec<AdversarialSet>> {
    let mut all = all_adversarial(p)?;
    let mut minimal: Vec<FeatureSet> = all.values().map(|a| a.changed).collect();
    minimize_family(&mut minimal);
    sort_family(&mut minimal);
    Ok(minimal
        .into_iter()
        .map(|s| all.remove(&s.bits()).expect("minimal set comes from the map"))
        .collect())
}

/// Smallest number of changed features that flips the class, with every
/// witness at that distance in lexicographic order. `None` when no point has
/// another class.
pub fn min_l0_distance(p: &ExplanationProblem) -> Result<Option<(usize, Vec<AdversarialSet>)>> {
    let space = p.space();
    p.limits()
        .check_points("point enumeration", space.total_points())?;
    let mut best: Option<(usize, Vec<AdversarialSet>)> = None;
    space.visit_all(|x| {
        let class = p.model().classify(x);
        if class == p.class() {
            return true;
        }
        let changed = diff_set(x, p.v());
        let d = changed.len();
        let entry = AdversarialSet {
            changed,
            witness: Point::from(x.to_vec()),
            class,
        };
        match &mut best {
            Some((k, list)) if *k == d => list.push(entry),
            Some((k, _)) if *k < d => {}
            _ => best = Some((d, vec![entry])),
        }
        true
    });
    Ok(best)
}

/// Union of the subset-minimal change-sets: the features some minimal
/// adversarial example has to touch.
pub fn ae_feature_set(p: &ExplanationProblem) -> Result<FeatureSet> {
    Ok(minimal_adversarial_sets(p)?
        .iter()
        .fold(FeatureSet::EMPTY, |acc, a| acc.union(a.changed)))
}

#[derive(Serialize)]
struct SetJson {
    changed: Vec<usize>,
    witness: Vec<u32>,
    class: ClassValue,
}

#[derive(Serialize)]
struct AdversarialJson {
    min_l0: Option<usize>,
    minimal_sets: Vec<SetJson>,
}

/// Report with the minimum distance and every subset-minimal change-set.
pub fn adversarial_report(p: &ExplanationProblem) -> Result<String> {
    let sets = minimal_adversarial_sets(p)?;
    let min_l0 = sets.iter().map(|a| a.changed.len()).min();
    Ok(to_json_text(&AdversarialJson {
        min_l0,
        minimal_sets: sets
            .into_iter()
            .map(|a| SetJson {
                changed: a.changed.to_one_based(),
                witness: a.witness.into_values(),
                class: a.class,
            })
            .collect(),
    }))
}
