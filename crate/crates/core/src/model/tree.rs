use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::space::{ClassValue, FeatureSet, FeatureSpace};

/// An outgoing edge of a decision-tree node, labelled with a set of values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeEdge {
    pub values: Vec<u32>,
    pub child: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeNode {
    Leaf { class: ClassValue },
    Split { feature: usize, edges: Vec<TreeEdge> },
}

/// Features tested along one root-to-leaf path, with the values each test admits.
#[derive(Clone, Debug)]
struct LeafPath {
    class: ClassValue,
    tests: Vec<(usize, Vec<u32>)>,
}

/// A decision tree with set-labelled edges.
///
/// Each split partitions the domain of its feature, and no feature is
/// tested twice on the same path, so the points reaching a leaf form a
/// product of value sets and can be counted without enumeration.
#[derive(Clone, Debug)]
pub struct DecisionTree {
    space: FeatureSpace,
    nodes: Vec<TreeNode>,
    root: usize,
    // value -> child, per split node
    routes: Vec<Vec<usize>>,
    paths: Vec<LeafPath>,
}

impl DecisionTree {
    pub fn new(space: FeatureSpace, nodes: Vec<TreeNode>, root: usize) -> Result<Self> {
        if root >= nodes.len() {
            return Err(Error::model("root index out of range"));
        }
        let mut routes = vec![Vec::new(); nodes.len()];
        for (id, node) in nodes.iter().enumerate() {
            if let TreeNode::Split { feature, edges } = node {
                if *feature >= space.m() {
                    return Err(Error::model(format!(
                        "node {id} tests feature {} outside 1..{}",
                        feature + 1,
                        space.m()
                    )));
                }
                let d = space.domain(*feature) as usize;
                let mut route = vec![usize::MAX; d];
                for e in edges {
                    if e.values.is_empty() {
                        return Err(Error::model(format!("node {id} has an empty edge label")));
                    }
                    if e.child >= nodes.len() {
                        return Err(Error::model(format!("node {id} points to a missing node")));
                    }
                    for &a in &e.values {
                        if a as usize >= d {
                            return Err(Error::model(format!(
                                "node {id}: value {a} outside the domain of feature {}",
                                feature + 1
                            )));
                        }
                        if route[a as usize] != usize::MAX {
                            return Err(Error::model(format!(
                                "node {id}: edge labels overlap on value {a}"
                            )));
                        }
                        route[a as usize] = e.child;
                    }
                }
                if route.contains(&usize::MAX) {
                    return Err(Error::model(format!(
                        "node {id}: edge labels do not cover the domain of feature {}",
                        feature + 1
                    )));
                }
                routes[id] = route;
            }
        }

        // walk from the root: tree shape, read-once paths, leaf path collection
        let mut visited = vec![false; nodes.len()];
        let mut paths = Vec::new();
        let mut stack = vec![(root, FeatureSet::EMPTY, Vec::<(usize, Vec<u32>)>::new())];
        while let Some((id, tested, tests)) = stack.pop() {
            if visited[id] {
                return Err(Error::model(format!(
                    "node {id} is reachable along two paths; the model is not a tree"
                )));
            }
            visited[id] = true;
            match &nodes[id] {
                TreeNode::Leaf { class } => paths.push(LeafPath {
                    class: *class,
                    tests,
                }),
                TreeNode::Split { feature, edges } => {
                    if tested.contains(*feature) {
                        return Err(Error::model(format!(
                            "feature {} is tested twice on a path through node {id}",
                            feature + 1
                        )));
                    }
                    for e in edges.iter().rev() {
                        let mut t = tests.clone();
                        let mut values = e.values.clone();
                        values.sort_unstable();
                        t.push((*feature, values));
                        stack.push((e.child, tested.with(*feature), t));
                    }
                }
            }
        }
        if let Some(id) = visited.iter().position(|v| !v) {
            return Err(Error::model(format!("node {id} is unreachable from the root")));
        }
        let classes: BTreeSet<_> = paths.iter().map(|p| p.class).collect();
        if classes.len() < 2 {
            return Err(Error::ConstantClassifier);
        }
        Ok(DecisionTree {
            space,
            nodes,
            root,
            routes,
            paths,
        })
    }

    pub fn space(&self) -> &FeatureSpace {
        &self.space
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn classes(&self) -> Vec<ClassValue> {
        self.paths
            .iter()
            .map(|p| p.class)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    pub fn classify(&self, x: &[u32]) -> ClassValue {
        let mut id = self.root;
        loop {
            match &self.nodes[id] {
                TreeNode::Leaf { class } => return *class,
                TreeNode::Split { feature, .. } => id = self.routes[id][x[*feature] as usize],
            }
        }
    }

    /// Sum of the classifier over the points agreeing with `v` on `fixed`, by
    /// counting the points that reach each leaf.
    pub fn path_sum(&self, fixed: FeatureSet, v: &[u32]) -> Result<i128> {
        let mut total: i128 = 0;
        for path in &self.paths {
            let mut count: u64 = 1;
            let mut tested = FeatureSet::EMPTY;
            let mut reachable = true;
            for (f, values) in &path.tests {
                tested = tested.with(*f);
                if fixed.contains(*f) {
                    if values.binary_search(&v[*f]).is_err() {
                        reachable = false;
                        break;
                    }
                } else {
                    count *= values.len() as u64;
                }
            }
            if !reachable {
                continue;
            }
            for f in (0..self.space.m()).filter(|&f| !fixed.contains(f) && !tested.contains(f)) {
                count *= self.space.domain(f) as u64;
            }
            total = (count as i128)
                .checked_mul(path.class as i128)
                .and_then(|t| total.checked_add(t))
                .ok_or(Error::Overflow("decision-tree path sum"))?;
        }
        Ok(total)
    }

    /// Whether every point agreeing with `v` on `fixed` is classified as `class`.
    pub fn cube_is_uniform(&self, fixed: FeatureSet, v: &[u32], class: ClassValue) -> bool {
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            match &self.nodes[id] {
                TreeNode::Leaf { class: c } => {
                    if *c != class {
                        return false;
                    }
                }
                TreeNode::Split { feature, edges } => {
                    if fixed.contains(*feature) {
                        stack.push(self.routes[id][v[*feature] as usize]);
                    } else {
                        stack.extend(edges.iter().map(|e| e.child));
                    }
                }
            }
        }
        true
    }

    /// Lexicographically smallest point agreeing with `v` on `fixed` whose class is not `class`.
    pub fn find_other_class(
        &self,
        fixed: FeatureSet,
        v: &[u32],
        class: ClassValue,
    ) -> Option<Vec<u32>> {
        // every leaf path describes a product of value sets; its smallest member
        // takes the minimum admitted value per feature
        let mut best: Option<Vec<u32>> = None;
        'paths: for path in self.paths.iter().filter(|p| p.class != class) {
            let mut x: Vec<u32> = (0..self.space.m())
                .map(|i| if fixed.contains(i) { v[i] } else { 0 })
                .collect();
            for (f, values) in &path.tests {
                if fixed.contains(*f) {
                    if values.binary_search(&v[*f]).is_err() {
                        continue 'paths;
                    }
                } else {
                    x[*f] = values[0];
                }
            }
            if best.as_ref().is_none_or(|b| x < *b) {
                best = Some(x);
            }
        }
        best
    }
}
