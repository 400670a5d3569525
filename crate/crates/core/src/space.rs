//! Feature spaces, points and feature subsets.
//!
//! Features are indexed from 0 internally. Every user-facing rendering
//! (reports, rules, CLI flags) uses 1-based feature numbers.

use std::fmt;

use crate::error::{Error, Result};

/// Integer class label.
pub type ClassValue = i64;

/// Hard upper bound on the number of features (feature sets are 64-bit masks).
pub const MAX_FEATURES: usize = 64;

/// Hard upper bound on the number of points of any feature space.
pub const MAX_POINTS: u64 = 1 << 62;

/// Guardrails for the exhaustive parts of the library.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of points any single enumeration may visit.
    pub max_points: u64,
    /// Maximum number of features for coalition and subset enumeration.
    pub max_features: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_points: 1 << 24,
            max_features: 24,
        }
    }
}

impl Limits {
    pub(crate) fn check_points(&self, what: &'static str, needed: u64) -> Result<()> {
        if needed > self.max_points {
            return Err(Error::Capacity {
                what,
                needed: needed as u128,
                limit: self.max_points as u128,
            });
        }
        Ok(())
    }

    pub(crate) fn check_features(&self, what: &'static str, m: usize) -> Result<()> {
        if m > self.max_features {
            return Err(Error::Capacity {
                what,
                needed: m as u128,
                limit: self.max_features as u128,
            });
        }
        Ok(())
    }
}

/// A set of features, stored as a bitmask over feature indices.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct FeatureSet(u64);

impl FeatureSet {
    pub const EMPTY: FeatureSet = FeatureSet(0);

    pub fn full(m: usize) -> Self {
        if m >= 64 {
            FeatureSet(u64::MAX)
        } else {
            FeatureSet((1u64 << m) - 1)
        }
    }

    pub const fn from_bits(bits: u64) -> Self {
        FeatureSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(i: usize) -> Self {
        FeatureSet(1 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        indices
            .into_iter()
            .fold(FeatureSet::EMPTY, |s, i| s.with(i))
    }

    /// Builds a set from 1-based feature numbers.
    pub fn from_one_based<I: IntoIterator<Item = usize>>(features: I) -> Self {
        Self::from_indices(features.into_iter().map(|i| i - 1))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    #[must_use]
    pub fn with(self, i: usize) -> Self {
        FeatureSet(self.0 | 1 << i)
    }

    #[must_use]
    pub fn without(self, i: usize) -> Self {
        FeatureSet(self.0 & !(1 << i))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: FeatureSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_proper_subset(self, other: FeatureSet) -> bool {
        self != other && self.is_subset(other)
    }

    pub fn intersects(self, other: FeatureSet) -> bool {
        self.0 & other.0 != 0
    }

    #[must_use]
    pub fn union(self, other: FeatureSet) -> Self {
        FeatureSet(self.0 | other.0)
    }

    #[must_use]
    pub fn intersection(self, other: FeatureSet) -> Self {
        FeatureSet(self.0 & other.0)
    }

    #[must_use]
    pub fn difference(self, other: FeatureSet) -> Self {
        FeatureSet(self.0 & !other.0)
    }

    /// Complement relative to the features `0..m`.
    #[must_use]
    pub fn complement(self, m: usize) -> Self {
        FeatureSet::full(m).difference(self)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    pub fn to_indices(self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn to_one_based(self) -> Vec<usize> {
        self.iter().map(|i| i + 1).collect()
    }

    /// Lexicographic comparison of the sorted element lists, so `{1} < {1,2} < {2}`.
    pub fn cmp_lex(&self, other: &FeatureSet) -> std::cmp::Ordering {
        self.iter().cmp(other.iter())
    }

    /// Every subset of `0..m`, by increasing bitmask.
    pub fn all_subsets(m: usize) -> impl Iterator<Item = FeatureSet> {
        debug_assert!(m < 64);
        (0..1u64 << m).map(FeatureSet)
    }
}

impl fmt::Debug for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|i| i + 1)).finish()
    }
}

/// Sorts a family of feature sets lexicographically and removes duplicates.
pub fn sort_family(family: &mut Vec<FeatureSet>) {
    family.sort_by(FeatureSet::cmp_lex);
    family.dedup();
}

/// A point of a feature space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point(Vec<u32>);

impl Point {
    pub fn values(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_values(self) -> Vec<u32> {
        self.0
    }

    /// Number of coordinates where the two points differ.
    pub fn hamming(&self, other: &Point) -> usize {
        hamming(&self.0, &other.0)
    }

    /// Features on which the two points differ.
    pub fn diff_set(&self, other: &[u32]) -> FeatureSet {
        diff_set(&self.0, other)
    }
}

/// Wraps raw values; validity is checked by whatever consumes the point.
impl From<Vec<u32>> for Point {
    fn from(values: Vec<u32>) -> Self {
        Point(values)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn hamming(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

pub(crate) fn diff_set(a: &[u32], b: &[u32]) -> FeatureSet {
    a.iter()
        .zip(b)
        .enumerate()
        .filter(|(_, (x, y))| x != y)
        .fold(FeatureSet::EMPTY, |s, (i, _)| s.with(i))
}

/// The cartesian product of the feature domains `0..d_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeatureSpace {
    names: Vec<String>,
    domains: Vec<u32>,
    total: u64,
}

impl FeatureSpace {
    /// Space with default feature names `x1..xm`.
    pub fn new(domains: Vec<u32>) -> Result<Self> {
        let names = (1..=domains.len()).map(|i| format!("x{i}")).collect();
        Self::with_names(names, domains)
    }

    pub fn with_names(names: Vec<String>, domains: Vec<u32>) -> Result<Self> {
        let m = domains.len();
        if m == 0 {
            return Err(Error::input("a feature space needs at least one feature"));
        }
        if m > MAX_FEATURES {
            return Err(Error::Capacity {
                what: "feature count",
                needed: m as u128,
                limit: MAX_FEATURES as u128,
            });
        }
        if names.len() != m {
            return Err(Error::input(format!(
                "{} feature names for {m} features",
                names.len()
            )));
        }
        if let Some(i) = domains.iter().position(|&d| d < 2) {
            return Err(Error::input(format!(
                "feature {} has domain size {}, at least 2 is required",
                i + 1,
                domains[i]
            )));
        }
        let mut total: u64 = 1;
        for &d in &domains {
            total = total
                .checked_mul(d as u64)
                .filter(|&t| t <= MAX_POINTS)
                .ok_or(Error::Capacity {
                    what: "feature-space size",
                    needed: u128::MAX,
                    limit: MAX_POINTS as u128,
                })?;
        }
        Ok(FeatureSpace {
            names,
            domains,
            total,
        })
    }

    pub fn m(&self) -> usize {
        self.domains.len()
    }

    pub fn domains(&self) -> &[u32] {
        &self.domains
    }

    pub fn domain(&self, i: usize) -> u32 {
        self.domains[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn total_points(&self) -> u64 {
        self.total
    }

    pub fn all_features(&self) -> FeatureSet {
        FeatureSet::full(self.m())
    }

    /// Validates raw values as a point of this space.
    pub fn point(&self, values: Vec<u32>) -> Result<Point> {
        self.check_values(&values)?;
        Ok(Point(values))
    }

    pub(crate) fn check_values(&self, values: &[u32]) -> Result<()> {
        if values.len() != self.m() {
            return Err(Error::input(format!(
                "point has {} values, the feature space has {} features",
                values.len(),
                self.m()
            )));
        }
        for (i, (&x, &d)) in values.iter().zip(&self.domains).enumerate() {
            if x >= d {
                return Err(Error::input(format!(
                    "value {x} of feature {} is outside its domain 0..{}",
                    i + 1,
                    d - 1
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn check_set(&self, s: FeatureSet) -> Result<()> {
        if !s.is_subset(self.all_features()) {
            return Err(Error::input(format!(
                "feature set {s:?} is not contained in 1..{}",
                self.m()
            )));
        }
        Ok(())
    }

    /// Mixed-radix index of a point, with feature 1 the most significant digit.
    pub fn index_of(&self, values: &[u32]) -> u64 {
        values
            .iter()
            .zip(&self.domains)
            .fold(0u64, |acc, (&x, &d)| acc * d as u64 + x as u64)
    }

    /// Inverse of [`FeatureSpace::index_of`].
    pub fn point_at(&self, mut index: u64) -> Point {
        let mut values = vec![0u32; self.m()];
        for (slot, &d) in values.iter_mut().zip(&self.domains).rev() {
            *slot = (index % d as u64) as u32;
            index /= d as u64;
        }
        Point(values)
    }

    /// Number of points agreeing with any fixed point on `fixed`: the product of
    /// the domain sizes of the free features.
    pub fn cube_size(&self, fixed: FeatureSet) -> u64 {
        self.domains
            .iter()
            .enumerate()
            .filter(|(i, _)| !fixed.contains(*i))
            .map(|(_, &d)| d as u64)
            .product()
    }

    /// Visits every point agreeing with `v` on `fixed`, in lexicographic order.
    /// The visitor returns `false` to stop early; the return value tells whether
    /// the visit ran to completion.
    pub fn visit_cube(
        &self,
        fixed: FeatureSet,
        v: &[u32],
        mut visit: impl FnMut(&[u32]) -> bool,
    ) -> bool {
        let m = self.m();
        let mut x: Vec<u32> = (0..m)
            .map(|i| if fixed.contains(i) { v[i] } else { 0 })
            .collect();
        let free: Vec<usize> = (0..m).filter(|&i| !fixed.contains(i)).collect();
        loop {
            if !visit(&x) {
                return false;
            }
            // odometer over the free features, last feature fastest
            let mut k = free.len();
            loop {
                if k == 0 {
                    return true;
                }
                k -= 1;
                let i = free[k];
                x[i] += 1;
                if x[i] < self.domains[i] {
                    break;
                }
                x[i] = 0;
            }
        }
    }

    /// Visits every point of the space in mixed-radix order.
    pub fn visit_all(&self, visit: impl FnMut(&[u32]) -> bool) -> bool {
        self.visit_cube(FeatureSet::EMPTY, &vec![0; self.m()], visit)
    }

    /// Visits the points that differ from `v` on exactly the features of `changed`.
    pub fn visit_changes(
        &self,
        changed: FeatureSet,
        v: &[u32],
        mut visit: impl FnMut(&[u32]) -> bool,
    ) -> bool {
        self.visit_cube(changed.complement(self.m()), v, |x| {
            if changed.iter().all(|i| x[i] != v[i]) {
                visit(x)
            } else {
                true
            }
        })
    }
}
