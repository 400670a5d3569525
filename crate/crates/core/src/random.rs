//! Random classifiers for property tests and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{DecisionTree, TabularClassifier, TreeEdge, TreeNode};
use crate::space::{ClassValue, FeatureSet, FeatureSpace, Point};

/// Random domain sizes in `2..=max_domain`.
pub fn random_space(rng: &mut impl Rng, m: usize, max_domain: u32) -> FeatureSpace {
    let domains = (0..m).map(|_| rng.random_range(2..=max_domain.max(2))).collect();
    FeatureSpace::new(domains).expect("small random spaces are valid")
}

/// A non-constant table with classes drawn from `0..classes` (at least 2).
pub fn random_table(rng: &mut impl Rng, space: FeatureSpace, classes: ClassValue) -> TabularClassifier {
    let n = space.total_points() as usize;
    let k = classes.max(2);
    loop {
        let labels: Vec<ClassValue> = (0..n).map(|_| rng.random_range(0..k)).collect();
        if let Ok(t) = TabularClassifier::new(space.clone(), labels) {
            return t;
        }
    }
}

/// A non-constant read-once decision tree of at most `depth` levels. Each
/// split groups the feature's values into 2 or more random edge labels.
pub fn random_tree(
    rng: &mut impl Rng,
    space: FeatureSpace,
    depth: usize,
    classes: ClassValue,
) -> DecisionTree {
    let k = classes.max(2);
    fn grow(
        rng: &mut impl Rng,
        space: &FeatureSpace,
        used: FeatureSet,
        depth: usize,
        k: ClassValue,
        nodes: &mut Vec<TreeNode>,
    ) -> usize {
        let free: Vec<usize> = (0..space.m()).filter(|&i| !used.contains(i)).collect();
        let stop = depth == 0 || free.is_empty() || (used.len() > 0 && rng.random_bool(0.25));
        if stop {
            nodes.push(TreeNode::Leaf {
                class: rng.random_range(0..k),
            });
            return nodes.len() - 1;
        }
        let feature = free[rng.random_range(0..free.len())];
        let d = space.domain(feature);
        let groups = rng.random_range(2..=d);
        let mut values: Vec<u32> = (0..d).collect();
        values.shuffle(rng);
        let mut labels: Vec<Vec<u32>> = vec![Vec::new(); groups as usize];
        for (pos, a) in values.into_iter().enumerate() {
            // the first `groups` values seed distinct labels, the rest land anywhere
            let g = if (pos as u32) < groups {
                pos
            } else {
                rng.random_range(0..groups as usize)
            };
            labels[g].push(a);
        }
        let edges = labels
            .into_iter()
            .map(|mut vals| {
                vals.sort_unstable();
                let child = grow(rng, space, used.with(feature), depth - 1, k, nodes);
                TreeEdge { values: vals, child }
            })
            .collect();
        nodes.push(TreeNode::Split { feature, edges });
        nodes.len() - 1
    }
    loop {
        let mut nodes = Vec::new();
        let root = grow(rng, &space, FeatureSet::EMPTY, depth, k, &mut nodes);
        if let Ok(t) = DecisionTree::new(space.clone(), nodes, root) {
            return t;
        }
    }
}

/// A uniformly random point of `space`.
pub fn random_point(rng: &mut impl Rng, space: &FeatureSpace) -> Point {
    Point::from(
        space
            .domains()
            .iter()
            .map(|&d| rng.random_range(0..d))
            .collect::<Vec<_>>(),
    )
}
