use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::space::{ClassValue, FeatureSet, FeatureSpace, Limits};

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum OmddNode {
    Terminal(ClassValue),
    /// A node at position `level` of the variable order, one child per value.
    Inner { level: usize, children: Vec<NodeId> },
}

/// A reduced ordered multi-valued decision diagram with one terminal per class.
///
/// Node ids are topological: every child id is smaller than its parent's.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Omdd {
    space: FeatureSpace,
    order: Vec<usize>,
    nodes: Vec<OmddNode>,
    root: NodeId,
}

/// Hash-consing node factory.
pub(crate) struct OmddBuilder {
    m: usize,
    nodes: Vec<OmddNode>,
    unique: HashMap<OmddNode, NodeId>,
}

impl OmddBuilder {
    pub(crate) fn new(m: usize) -> Self {
        OmddBuilder {
            m,
            nodes: Vec::new(),
            unique: HashMap::new(),
        }
    }

    fn intern(&mut self, node: OmddNode) -> NodeId {
        if let Some(&id) = self.unique.get(&node) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(node.clone());
        self.unique.insert(node, id);
        id
    }

    pub(crate) fn terminal(&mut self, class: ClassValue) -> NodeId {
        self.intern(OmddNode::Terminal(class))
    }

    pub(crate) fn inner(&mut self, level: usize, children: Vec<NodeId>) -> NodeId {
        debug_assert!(level < self.m);
        if children.iter().all(|&c| c == children[0]) {
            return children[0];
        }
        self.intern(OmddNode::Inner { level, children })
    }

    pub(crate) fn finish(self, space: FeatureSpace, order: Vec<usize>, root: NodeId) -> Result<Omdd> {
        if matches!(self.nodes[root], OmddNode::Terminal(_)) {
            return Err(Error::ConstantClassifier);
        }
        // drop nodes not reachable from the root, keeping topological ids
        let mut live = vec![false; self.nodes.len()];
        live[root] = true;
        for id in (0..self.nodes.len()).rev() {
            if live[id] {
                if let OmddNode::Inner { children, .. } = &self.nodes[id] {
                    for &c in children {
                        live[c] = true;
                    }
                }
            }
        }
        let mut remap = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        for (id, node) in self.nodes.into_iter().enumerate() {
            if !live[id] {
                continue;
            }
            remap[id] = nodes.len();
            nodes.push(match node {
                OmddNode::Inner { level, children } => OmddNode::Inner {
                    level,
                    children: children.into_iter().map(|c| remap[c]).collect(),
                },
                t => t,
            });
        }
        Ok(Omdd {
            space,
            order,
            nodes,
            root: remap[root],
        })
    }
}

pub(crate) fn check_order(space: &FeatureSpace, order: &[usize]) -> Result<()> {
    let m = space.m();
    let mut seen = vec![false; m];
    if order.len() != m {
        return Err(Error::input(format!(
            "variable order lists {} features, expected {m}",
            order.len()
        )));
    }
    for &f in order {
        if f >= m || seen[f] {
            return Err(Error::input(
                "variable order must be a permutation of the features",
            ));
        }
        seen[f] = true;
    }
    Ok(())
}

impl Omdd {
    /// Compiles an arbitrary function under the given variable order
    /// (0-based feature indices), enumerating the whole space.
    pub fn from_fn(
        space: FeatureSpace,
        order: Vec<usize>,
        f: impl Fn(&[u32]) -> ClassValue,
        limits: &Limits,
    ) -> Result<Self> {
        check_order(&space, &order)?;
        limits.check_points("decision-diagram compilation", space.total_points())?;
        fn build(
            b: &mut OmddBuilder,
            space: &FeatureSpace,
            order: &[usize],
            level: usize,
            x: &mut Vec<u32>,
            f: &dyn Fn(&[u32]) -> ClassValue,
        ) -> NodeId {
            if level == order.len() {
                return b.terminal(f(x));
            }
            let feature = order[level];
            let children = (0..space.domain(feature))
                .map(|a| {
                    x[feature] = a;
                    build(b, space, order, level + 1, x, f)
                })
                .collect();
            b.inner(level, children)
        }
        let mut b = OmddBuilder::new(space.m());
        let mut x = vec![0; space.m()];
        let root = build(&mut b, &space, &order, 0, &mut x, &f);
        b.finish(space, order, root)
    }

    /// Compiles a partial function given by consistent rows; points without a
    /// row get `default`.
    pub fn from_partial(
        space: FeatureSpace,
        order: Vec<usize>,
        rows: &[(Vec<u32>, ClassValue)],
        default: ClassValue,
    ) -> Result<Self> {
        check_order(&space, &order)?;
        for (x, _) in rows {
            space.check_values(x)?;
        }
        fn build(
            b: &mut OmddBuilder,
            space: &FeatureSpace,
            order: &[usize],
            level: usize,
            rows: &[&(Vec<u32>, ClassValue)],
            default: ClassValue,
        ) -> Result<NodeId> {
            if rows.is_empty() {
                return Ok(b.terminal(default));
            }
            if level == order.len() {
                let c = rows[0].1;
                if rows.iter().any(|r| r.1 != c) {
                    return Err(Error::Dataset(format!(
                        "contradictory rows for point {:?}",
                        rows[0].0
                    )));
                }
                return Ok(b.terminal(c));
            }
            let feature = order[level];
            let mut buckets: Vec<Vec<&(Vec<u32>, ClassValue)>> =
                vec![Vec::new(); space.domain(feature) as usize];
            for r in rows {
                buckets[r.0[feature] as usize].push(r);
            }
            let children = buckets
                .iter()
                .map(|bucket| build(b, space, order, level + 1, bucket, default))
                .collect::<Result<Vec<_>>>()?;
            Ok(b.inner(level, children))
        }
        let refs: Vec<_> = rows.iter().collect();
        let mut b = OmddBuilder::new(space.m());
        let root = build(&mut b, &space, &order, 0, &refs, default)?;
        b.finish(space, order, root)
    }

    /// Assembles a diagram from raw nodes, validating layering and reducing it.
    /// `nodes[k]` may reference any other node; the result is canonical.
    pub fn from_nodes(
        space: FeatureSpace,
        order: Vec<usize>,
        nodes: &[OmddNode],
        root: NodeId,
    ) -> Result<Self> {
        check_order(&space, &order)?;
        if root >= nodes.len() {
            return Err(Error::model("root index out of range"));
        }
        let m = space.m();
        let level_of = |id: NodeId| match &nodes[id] {
            OmddNode::Terminal(_) => m,
            OmddNode::Inner { level, .. } => *level,
        };
        for (id, node) in nodes.iter().enumerate() {
            if let OmddNode::Inner { level, children } = node {
                if *level >= m {
                    return Err(Error::model(format!("node {id} has an invalid level")));
                }
                if children.len() != space.domain(order[*level]) as usize {
                    return Err(Error::model(format!(
                        "node {id} must have one child per value of feature {}",
                        order[*level] + 1
                    )));
                }
                for &c in children {
                    if c >= nodes.len() {
                        return Err(Error::model(format!("node {id} points to a missing node")));
                    }
                    if level_of(c) <= *level {
                        return Err(Error::model(format!(
                            "node {id} has an edge that does not respect the variable order"
                        )));
                    }
                }
            }
        }
        // levels strictly increase along edges, so the recursion terminates
        fn rebuild(
            b: &mut OmddBuilder,
            nodes: &[OmddNode],
            id: NodeId,
            memo: &mut HashMap<NodeId, NodeId>,
        ) -> NodeId {
            if let Some(&n) = memo.get(&id) {
                return n;
            }
            let n = match &nodes[id] {
                OmddNode::Terminal(c) => b.terminal(*c),
                OmddNode::Inner { level, children } => {
                    let ch = children
                        .iter()
                        .map(|&c| rebuild(b, nodes, c, memo))
                        .collect();
                    b.inner(*level, ch)
                }
            };
            memo.insert(id, n);
            n
        }
        let mut b = OmddBuilder::new(m);
        let new_root = rebuild(&mut b, nodes, root, &mut HashMap::new());
        b.finish(space, order, new_root)
    }

    /// Re-applies merging of identical nodes and removal of redundant tests.
    pub fn reduce(&self) -> Result<Self> {
        Self::from_nodes(self.space.clone(), self.order.clone(), &self.nodes, self.root)
    }

    pub fn space(&self) -> &FeatureSpace {
        &self.space
    }

    /// Variable order as 0-based feature indices.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn nodes(&self) -> &[OmddNode] {
        &self.nodes
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn inner_node_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, OmddNode::Inner { .. }))
            .count()
    }

    pub fn classes(&self) -> Vec<ClassValue> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                OmddNode::Terminal(c) => Some(*c),
                _ => None,
            })
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    pub fn classify(&self, x: &[u32]) -> ClassValue {
        let mut id = self.root;
        loop {
            match &self.nodes[id] {
                OmddNode::Terminal(c) => return *c,
                OmddNode::Inner { level, children } => {
                    id = children[x[self.order[*level]] as usize];
                }
            }
        }
    }

    fn level_of(&self, id: NodeId) -> usize {
        match &self.nodes[id] {
            OmddNode::Terminal(_) => self.space.m(),
            OmddNode::Inner { level, .. } => *level,
        }
    }

    /// Number of completions of the features at levels `from..to` (exclusive).
    fn skipped(&self, fixed: FeatureSet, from: usize, to: usize) -> u64 {
        self.order[from..to]
            .iter()
            .filter(|&&f| !fixed.contains(f))
            .map(|&f| self.space.domain(f) as u64)
            .product()
    }

    /// Sum of the classifier over the points agreeing with `v` on `fixed`, by
    /// weighted model counting bottom-up over the diagram.
    pub fn path_sum(&self, fixed: FeatureSet, v: &[u32]) -> Result<i128> {
        let overflow = || Error::Overflow("decision-diagram path sum");
        let mut sums: Vec<i128> = vec![0; self.nodes.len()];
        for (id, node) in self.nodes.iter().enumerate() {
            sums[id] = match node {
                OmddNode::Terminal(c) => *c as i128,
                OmddNode::Inner { level, children } => {
                    let f = self.order[*level];
                    let mut acc: i128 = 0;
                    let values: Box<dyn Iterator<Item = usize>> = if fixed.contains(f) {
                        Box::new(std::iter::once(v[f] as usize))
                    } else {
                        Box::new(0..children.len())
                    };
                    for a in values {
                        let c = children[a];
                        let w = self.skipped(fixed, level + 1, self.level_of(c)) as i128;
                        acc = w
                            .checked_mul(sums[c])
                            .and_then(|t| acc.checked_add(t))
                            .ok_or_else(overflow)?;
                    }
                    acc
                }
            };
        }
        let top = self.skipped(fixed, 0, self.level_of(self.root)) as i128;
        top.checked_mul(sums[self.root]).ok_or_else(overflow)
    }

    /// Some point agreeing with `v` on `fixed` whose class is not `class`.
    /// Free features off the witness path take value 0.
    pub fn find_other_class(
        &self,
        fixed: FeatureSet,
        v: &[u32],
        class: ClassValue,
    ) -> Option<Vec<u32>> {
        // dead[id]: no terminal other than `class` is reachable from id
        let mut dead = vec![false; self.nodes.len()];
        let mut x: Vec<u32> = (0..self.space.m())
            .map(|i| if fixed.contains(i) { v[i] } else { 0 })
            .collect();
        fn search(
            dd: &Omdd,
            id: NodeId,
            fixed: FeatureSet,
            class: ClassValue,
            dead: &mut [bool],
            x: &mut [u32],
        ) -> bool {
            if dead[id] {
                return false;
            }
            let found = match &dd.nodes[id] {
                OmddNode::Terminal(c) => *c != class,
                OmddNode::Inner { level, children } => {
                    let f = dd.order[*level];
                    if fixed.contains(f) {
                        search(dd, children[x[f] as usize], fixed, class, dead, x)
                    } else {
                        let mut hit = false;
                        for (a, &c) in children.iter().enumerate() {
                            x[f] = a as u32;
                            if search(dd, c, fixed, class, dead, x) {
                                hit = true;
                                break;
                            }
                        }
                        if !hit {
                            x[f] = 0;
                        }
                        hit
                    }
                }
            };
            if !found {
                dead[id] = true;
            }
            found
        }
        search(self, self.root, fixed, class, &mut dead, &mut x).then_some(x)
    }

    /// Whether every point agreeing with `v` on `fixed` is classified as `class`.
    pub fn cube_is_uniform(&self, fixed: FeatureSet, v: &[u32], class: ClassValue) -> bool {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            if std::mem::replace(&mut seen[id], true) {
                continue;
            }
            match &self.nodes[id] {
                OmddNode::Terminal(c) => {
                    if *c != class {
                        return false;
                    }
                }
                OmddNode::Inner { level, children } => {
                    let f = self.order[*level];
                    if fixed.contains(f) {
                        stack.push(children[v[f] as usize]);
                    } else {
                        stack.extend(children.iter().copied());
                    }
                }
            }
        }
        true
    }
}
