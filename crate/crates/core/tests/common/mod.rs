//! Independent oracles: plain enumeration with no shared code paths beyond
//! point classification.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use xpaudit_core::{FeatureSpace, Model, Point};

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn set(one_based: &[usize]) -> BTreeSet<usize> {
    one_based.iter().copied().collect()
}

/// Every point of the space, in lexicographic order.
pub fn points(space: &FeatureSpace) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for &d in space.domains() {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..d).map(move |a| {
                    let mut q = p.clone();
                    q.push(a);
                    q
                })
            })
            .collect();
    }
    out
}

/// Subsets of `1..=m` as sorted sets of 1-based features.
pub fn subsets(m: usize) -> Vec<BTreeSet<usize>> {
    (0..1u32 << m)
        .map(|b| (1..=m).filter(|i| b >> (i - 1) & 1 == 1).collect())
        .collect()
}

fn agrees(x: &[u32], v: &[u32], s: &BTreeSet<usize>) -> bool {
    s.iter().all(|&i| x[i - 1] == v[i - 1])
}

pub fn phi(model: &Model, v: &[u32], s: &BTreeSet<usize>) -> BigRational {
    let mut sum = BigInt::from(0);
    let mut count = 0i64;
    for x in points(model.space()) {
        if agrees(&x, v, s) {
            sum += model.classify(&x);
            count += 1;
        }
    }
    BigRational::new(sum, count.into())
}

/// Shapley values as the average marginal contribution over all orderings.
pub fn shapley_by_permutations(model: &Model, v: &[u32]) -> Vec<BigRational> {
    let m = model.space().m();
    let mut perms: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..m {
        perms = perms
            .into_iter()
            .flat_map(|p| {
                let free: Vec<usize> = (1..=m).filter(|i| !p.contains(i)).collect();
                free.into_iter().map(move |i| {
                    let mut q = p.clone();
                    q.push(i);
                    q
                })
            })
            .collect();
    }
    let mut cache = std::collections::HashMap::new();
    let mut phi_of = |s: &BTreeSet<usize>| {
        cache
            .entry(s.clone())
            .or_insert_with(|| phi(model, v, s))
            .clone()
    };
    let mut sv = vec![BigRational::from_integer(0.into()); m];
    for p in &perms {
        let mut before = BTreeSet::new();
        for &i in p {
            let mut after = before.clone();
            after.insert(i);
            sv[i - 1] += phi_of(&after) - phi_of(&before);
            before = after;
        }
    }
    let n = BigRational::from_integer(perms.len().into());
    sv.into_iter().map(|x| x / &n).collect()
}

pub fn sufficient(model: &Model, v: &[u32], s: &BTreeSet<usize>) -> bool {
    let c = model.classify(v);
    points(model.space())
        .iter()
        .filter(|x| agrees(x, v, s))
        .all(|x| model.classify(x) == c)
}

fn complement(m: usize, s: &BTreeSet<usize>) -> BTreeSet<usize> {
    (1..=m).filter(|i| !s.contains(i)).collect()
}

fn minimal(family: Vec<BTreeSet<usize>>) -> Vec<BTreeSet<usize>> {
    let mut out: Vec<BTreeSet<usize>> = family
        .iter()
        .filter(|s| !family.iter().any(|t| t != *s && t.is_subset(s)))
        .cloned()
        .collect();
    out.sort();
    out.dedup();
    out
}

/// (AXps, CXps), each sorted.
pub fn explanations(model: &Model, v: &[u32]) -> (Vec<BTreeSet<usize>>, Vec<BTreeSet<usize>>) {
    let m = model.space().m();
    let all = subsets(m);
    let axps = minimal(all.iter().filter(|s| sufficient(model, v, s)).cloned().collect());
    let cxps = minimal(
        all.iter()
            .filter(|s| !sufficient(model, v, &complement(m, s)))
            .cloned()
            .collect(),
    );
    (axps, cxps)
}

/// Subset-minimal change-sets with a witness of another class.
pub fn minimal_change_sets(model: &Model, v: &[u32]) -> Vec<BTreeSet<usize>> {
    let c = model.classify(v);
    let sets: Vec<BTreeSet<usize>> = points(model.space())
        .iter()
        .filter(|x| model.classify(x) != c)
        .map(|x| (1..=x.len()).filter(|&i| x[i - 1] != v[i - 1]).collect())
        .collect();
    minimal(sets)
}

pub fn to_sets(family: &[xpaudit_core::FeatureSet]) -> Vec<BTreeSet<usize>> {
    let mut out: Vec<BTreeSet<usize>> = family
        .iter()
        .map(|s| s.to_one_based().into_iter().collect())
        .collect();
    out.sort();
    out
}

pub fn point(values: &[u32]) -> Point {
    Point::from(values.to_vec())
}

/// κ1: x1=1 → 1; otherwise x3=1 → 3, x2=1 → 2, else 0.
pub fn k1() -> Model {
    let space = FeatureSpace::new(vec![2, 2, 2]).unwrap();
    xpaudit_core::TabularClassifier::new(space, vec![0, 3, 2, 3, 1, 1, 1, 1])
        .unwrap()
        .into()
}
