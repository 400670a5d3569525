//! Exact Shapley values under the uniform input distribution.
//!
//! With `P` the number of points and `scaled(S) = φ(S)·P` (an integer: the
//! cube sum times the product of the fixed domains), feature `i` gets
//! `Sv(i)·m!·P = Σ_{S∌i} |S|!(m−|S|−1)!·(scaled(S∪i) − scaled(S))`, so every
//! value is one big integer over a common denominator.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::model::{tabular_to_omdd, Backend, Model};
use crate::problem::ExplanationProblem;
use crate::rational::{fraction, RationalJson};
use crate::report::to_json_text;
use crate::space::{ClassValue, FeatureSet};

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Weight of a coalition of size `k` not containing the feature, among `m`
/// features: `k!(m−k−1)!/m!`.
pub fn coalition_weight(m: usize, k: usize) -> BigRational {
    assert!(k < m, "coalition of size {k} cannot exclude a feature of {m}");
    BigRational::new(factorial(k) * factorial(m - k - 1), factorial(m))
}

/// Average class over the points agreeing with the instance on `fixed`.
pub fn phi(p: &ExplanationProblem, fixed: FeatureSet, backend: Backend) -> Result<BigRational> {
    let sum = p.model().cube_sum(fixed, p.v(), backend, p.limits())?;
    let size = crate::model::cube_size(p.space(), fixed)?;
    Ok(BigRational::new(sum.into(), size.into()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SvReport {
    /// One value per feature, in feature order.
    pub sv: Vec<BigRational>,
    pub phi_empty: BigRational,
    pub predicted: ClassValue,
    /// `Σ Sv + φ(∅) − predicted`, zero for a correct report.
    pub residual: BigRational,
}

#[derive(Serialize)]
struct SvEntry {
    feature: usize,
    #[serde(flatten)]
    value: RationalJson,
}

#[derive(Serialize)]
struct SvJson {
    sv: Vec<SvEntry>,
    phi_empty: RationalJson,
    residual: String,
}

impl SvReport {
    pub fn to_json(&self) -> String {
        to_json_text(&SvJson {
            sv: self
                .sv
                .iter()
                .enumerate()
                .map(|(i, q)| SvEntry {
                    feature: i + 1,
                    value: q.into(),
                })
                .collect(),
            phi_empty: (&self.phi_empty).into(),
            residual: fraction(&self.residual),
        })
    }
}

/// Cube sums for every subset of the features, indexed by bitmask.
fn all_cube_sums(p: &ExplanationProblem, backend: Backend) -> Result<Vec<i128>> {
    let space = p.space();
    let m = p.m();
    let v = p.v();
    match backend {
        Backend::Enumerate => {
            // h[T]: sum over the points agreeing with v exactly on T
            p.limits()
                .check_points("point enumeration", space.total_points())?;
            let mut sums = vec![0i128; 1 << m];
            space.visit_all(|x| {
                let agree = crate::space::diff_set(x, v).complement(m);
                sums[agree.bits() as usize] += p.model().classify(x) as i128;
                true
            });
            // superset sums: cube(S) collects every T ⊇ S
            for i in 0..m {
                let bit = 1usize << i;
                for s in 0..sums.len() {
                    if s & bit == 0 {
                        sums[s] += sums[s | bit];
                    }
                }
            }
            Ok(sums)
        }
        Backend::Paths => {
            let compiled;
            let model = match p.model() {
                Model::Table(t) => {
                    compiled = Model::Omdd(tabular_to_omdd(t, (0..m).collect(), p.limits())?);
                    &compiled
                }
                other => other,
            };
            FeatureSet::all_subsets(m)
                .collect::<Vec<_>>()
                .into_par_iter()
                .map(|s| model.cube_sum(s, v, Backend::Paths, p.limits()))
                .collect()
        }
    }
}

/// i128 accumulator that spills into a big integer on overflow.
#[derive(Default)]
struct Acc {
    small: i128,
    big: BigInt,
}

impl Acc {
    fn add(&mut self, t: i128) {
        match self.small.checked_add(t) {
            Some(s) => self.small = s,
            None => {
                self.big += self.small;
                self.small = t;
            }
        }
    }

    fn total(self) -> BigInt {
        self.big + self.small
    }
}

pub fn shapley_values(p: &ExplanationProblem, backend: Backend) -> Result<SvReport> {
    let m = p.m();
    p.limits().check_features("Shapley coalition enumeration", m)?;
    let space = p.space();
    let sums = all_cube_sums(p, backend)?;

    // scaled[S] = sum[S] · ∏_{j∈S} d_j; None marks the rare i128 overflow
    let fixed_product = |s: usize| -> i128 {
        (0..m)
            .filter(|j| s >> j & 1 == 1)
            .map(|j| space.domain(j) as i128)
            .product()
    };
    let scaled_small: Vec<Option<i128>> = (0..sums.len())
        .into_par_iter()
        .map(|s| sums[s].checked_mul(fixed_product(s)))
        .collect();
    let scaled_big = |s: usize| BigInt::from(sums[s]) * fixed_product(s);

    let weights: Vec<BigInt> = (0..m)
        .map(|k| factorial(k) * factorial(m - k - 1))
        .collect();
    let total = BigInt::from(space.total_points());
    let denominator = factorial(m) * &total;

    let sv: Vec<BigRational> = (0..m)
        .into_par_iter()
        .map(|i| {
            let bit = 1usize << i;
            let mut per_size: Vec<Acc> = (0..m).map(|_| Acc::default()).collect();
            let mut spilled: Vec<BigInt> = vec![BigInt::zero(); m];
            for s in (0..sums.len()).filter(|s| s & bit == 0) {
                let k = (s as u64).count_ones() as usize;
                let diff = match (scaled_small[s | bit], scaled_small[s]) {
                    (Some(a), Some(b)) => a.checked_sub(b),
                    _ => None,
                };
                match diff {
                    Some(d) => per_size[k].add(d),
                    None => spilled[k] += scaled_big(s | bit) - scaled_big(s),
                }
            }
            let numerator = per_size
                .into_iter()
                .zip(spilled)
                .zip(&weights)
                .fold(BigInt::zero(), |acc, ((a, b), w)| acc + (a.total() + b) * w);
            BigRational::new(numerator, denominator.clone())
        })
        .collect();

    let phi_empty = BigRational::new(sums[0].into(), total);
    let predicted = p.class();
    let residual = residual_of(&sv, &phi_empty, predicted);
    Ok(SvReport {
        sv,
        phi_empty,
        predicted,
        residual,
    })
}

fn residual_of(sv: &[BigRational], phi_empty: &BigRational, predicted: ClassValue) -> BigRational {
    sv.iter().fold(phi_empty.clone(), |acc, q| acc + q) - BigRational::from_integer(predicted.into())
}

/// Recomputes `Σ Sv + φ(∅) − κ(v)` for a report against its problem; the
/// contract is that this is zero.
pub fn validate_efficiency(p: &ExplanationProblem, report: &SvReport) -> Result<BigRational> {
    let phi_empty = phi(p, FeatureSet::EMPTY, Backend::Enumerate)
        .or_else(|_| phi(p, FeatureSet::EMPTY, Backend::Paths))?;
    Ok(residual_of(&report.sv, &phi_empty, p.class()))
}
