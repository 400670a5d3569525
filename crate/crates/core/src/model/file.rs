//! The JSON model file shared by every command.
//!
//! ```json
//! {"type":"table","features":[{"name":"x1","domain":2}],"classes":[0,1],
//!  "rows":[[0,0],[1,1]]}
//! ```
//!
//! Trees carry `"nodes"` (splits `{"id","feature","edges":[{"values","to"}]}`
//! and leaves `{"id","class"}`) plus an optional `"root"` (default: first
//! node). Diagrams add `"order"`. Feature numbers are 1-based; values are
//! 0-based codes. Only integers are accepted.

use std::collections::{BTreeSet, HashMap};
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{DecisionTree, Model, Omdd, OmddNode, TabularClassifier, TreeEdge, TreeNode};
use crate::error::{Error, Result};
use crate::space::{ClassValue, FeatureSpace, Limits};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureJson {
    pub name: String,
    pub domain: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeJson {
    pub values: Vec<u32>,
    pub to: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NodeJson {
    Split {
        id: i64,
        feature: usize,
        edges: Vec<EdgeJson>,
    },
    Leaf {
        id: i64,
        class: ClassValue,
    },
}

impl NodeJson {
    fn id(&self) -> i64 {
        match self {
            NodeJson::Split { id, .. } | NodeJson::Leaf { id, .. } => *id,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ModelFile {
    Table {
        features: Vec<FeatureJson>,
        classes: Vec<ClassValue>,
        rows: Vec<Vec<i64>>,
    },
    Dt {
        features: Vec<FeatureJson>,
        classes: Vec<ClassValue>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        root: Option<i64>,
        nodes: Vec<NodeJson>,
    },
    Omdd {
        features: Vec<FeatureJson>,
        classes: Vec<ClassValue>,
        order: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        root: Option<i64>,
        nodes: Vec<NodeJson>,
    },
}

fn space_of(features: &[FeatureJson]) -> Result<FeatureSpace> {
    FeatureSpace::with_names(
        features.iter().map(|f| f.name.clone()).collect(),
        features.iter().map(|f| f.domain).collect(),
    )
}

fn features_of(space: &FeatureSpace) -> Vec<FeatureJson> {
    space
        .names()
        .iter()
        .zip(space.domains())
        .map(|(name, &domain)| FeatureJson {
            name: name.clone(),
            domain,
        })
        .collect()
}

fn check_classes(declared: &[ClassValue], used: &[ClassValue]) -> Result<()> {
    let declared: BTreeSet<_> = declared.iter().collect();
    match used.iter().find(|c| !declared.contains(c)) {
        Some(c) => Err(Error::model(format!(
            "class {c} is not listed in \"classes\""
        ))),
        None => Ok(()),
    }
}

fn index_nodes(nodes: &[NodeJson]) -> Result<HashMap<i64, usize>> {
    let mut index = HashMap::new();
    for (k, n) in nodes.iter().enumerate() {
        if index.insert(n.id(), k).is_some() {
            return Err(Error::model(format!("duplicate node id {}", n.id())));
        }
    }
    if index.is_empty() {
        return Err(Error::model("model has no nodes"));
    }
    Ok(index)
}

fn resolve(index: &HashMap<i64, usize>, id: i64) -> Result<usize> {
    index
        .get(&id)
        .copied()
        .ok_or_else(|| Error::model(format!("reference to unknown node {id}")))
}

fn feature_index(space: &FeatureSpace, feature: usize) -> Result<usize> {
    if feature == 0 || feature > space.m() {
        return Err(Error::model(format!(
            "feature {feature} outside 1..{}",
            space.m()
        )));
    }
    Ok(feature - 1)
}

impl ModelFile {
    pub fn into_model(self, limits: &Limits) -> Result<Model> {
        match self {
            ModelFile::Table {
                features,
                classes,
                rows,
            } => {
                let space = space_of(&features)?;
                let m = space.m();
                let rows = rows
                    .into_iter()
                    .map(|r| {
                        if r.len() != m + 1 {
                            return Err(Error::model(format!(
                                "table row {r:?} must hold {m} values and a class"
                            )));
                        }
                        let x = r[..m]
                            .iter()
                            .map(|&a| u32::try_from(a).map_err(|_| Error::model(format!("negative or oversized value in row {r:?}"))))
                            .collect::<Result<Vec<_>>>()?;
                        Ok((x, r[m]))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let t = TabularClassifier::from_rows(space, rows, limits)?;
                check_classes(&classes, &t.classes())?;
                Ok(Model::Table(t))
            }
            ModelFile::Dt {
                features,
                classes,
                root,
                nodes,
            } => {
                let space = space_of(&features)?;
                let index = index_nodes(&nodes)?;
                let tree_nodes = nodes
                    .iter()
                    .map(|n| match n {
                        NodeJson::Leaf { class, .. } => Ok(TreeNode::Leaf { class: *class }),
                        NodeJson::Split { feature, edges, .. } => Ok(TreeNode::Split {
                            feature: feature_index(&space, *feature)?,
                            edges: edges
                                .iter()
                                .map(|e| {
                                    Ok(TreeEdge {
                                        values: e.values.clone(),
                                        child: resolve(&index, e.to)?,
                                    })
                                })
                                .collect::<Result<_>>()?,
                        }),
                    })
                    .collect::<Result<Vec<_>>>()?;
                let root = match root {
                    Some(r) => resolve(&index, r)?,
                    None => 0,
                };
                let t = DecisionTree::new(space, tree_nodes, root)?;
                check_classes(&classes, &t.classes())?;
                Ok(Model::Tree(t))
            }
            ModelFile::Omdd {
                features,
                classes,
                order,
                root,
                nodes,
            } => {
                let space = space_of(&features)?;
                let order = super::order_from_one_based(&space, &order)?;
                let mut level_of = vec![0; space.m()];
                for (k, &f) in order.iter().enumerate() {
                    level_of[f] = k;
                }
                let index = index_nodes(&nodes)?;
                let raw = nodes
                    .iter()
                    .map(|n| match n {
                        NodeJson::Leaf { class, .. } => Ok(OmddNode::Terminal(*class)),
                        NodeJson::Split { id, feature, edges } => {
                            let f = feature_index(&space, *feature)?;
                            let d = space.domain(f) as usize;
                            let mut children = vec![usize::MAX; d];
                            for e in edges {
                                let to = resolve(&index, e.to)?;
                                for &a in &e.values {
                                    let slot = children.get_mut(a as usize).ok_or_else(|| {
                                        Error::model(format!(
                                            "node {id}: value {a} outside the domain of feature {feature}"
                                        ))
                                    })?;
                                    if *slot != usize::MAX {
                                        return Err(Error::model(format!(
                                            "node {id}: edge labels overlap on value {a}"
                                        )));
                                    }
                                    *slot = to;
                                }
                            }
                            if children.contains(&usize::MAX) {
                                return Err(Error::model(format!(
                                    "node {id}: edge labels do not cover the domain of feature {feature}"
                                )));
                            }
                            Ok(OmddNode::Inner {
                                level: level_of[f],
                                children,
                            })
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                let root = match root {
                    Some(r) => resolve(&index, r)?,
                    None => 0,
                };
                let d = Omdd::from_nodes(space, order, &raw, root)?;
                check_classes(&classes, &d.classes())?;
                Ok(Model::Omdd(d))
            }
        }
    }

    pub fn from_model(model: &Model) -> Self {
        let space = model.space();
        let features = features_of(space);
        let classes = model.classes();
        match model {
            Model::Table(t) => ModelFile::Table {
                features,
                classes,
                rows: t
                    .rows()
                    .map(|(x, c)| {
                        x.values()
                            .iter()
                            .map(|&a| a as i64)
                            .chain(std::iter::once(c))
                            .collect()
                    })
                    .collect(),
            },
            Model::Tree(t) => ModelFile::Dt {
                features,
                classes,
                root: Some(t.root() as i64),
                nodes: t
                    .nodes()
                    .iter()
                    .enumerate()
                    .map(|(id, n)| match n {
                        TreeNode::Leaf { class } => NodeJson::Leaf {
                            id: id as i64,
                            class: *class,
                        },
                        TreeNode::Split { feature, edges } => NodeJson::Split {
                            id: id as i64,
                            feature: feature + 1,
                            edges: edges
                                .iter()
                                .map(|e| EdgeJson {
                                    values: e.values.clone(),
                                    to: e.child as i64,
                                })
                                .collect(),
                        },
                    })
                    .collect(),
            },
            Model::Omdd(d) => ModelFile::Omdd {
                features,
                classes,
                order: d.order().iter().map(|f| f + 1).collect(),
                root: Some(d.root() as i64),
                nodes: d
                    .nodes()
                    .iter()
                    .enumerate()
                    .map(|(id, n)| match n {
                        OmddNode::Terminal(c) => NodeJson::Leaf {
                            id: id as i64,
                            class: *c,
                        },
                        OmddNode::Inner { level, children } => {
                            // group values sharing a child into one set-labelled edge
                            let mut edges: Vec<EdgeJson> = Vec::new();
                            for (a, &c) in children.iter().enumerate() {
                                match edges.iter_mut().find(|e| e.to == c as i64) {
                                    Some(e) => e.values.push(a as u32),
                                    None => edges.push(EdgeJson {
                                        values: vec![a as u32],
                                        to: c as i64,
                                    }),
                                }
                            }
                            NodeJson::Split {
                                id: id as i64,
                                feature: d.order()[*level] + 1,
                                edges,
                            }
                        }
                    })
                    .collect(),
            },
        }
    }
}

/// Parses and validates a model file.
pub fn read_model(text: &str, limits: &Limits) -> Result<Model> {
    let file: ModelFile = serde_json::from_str(text)?;
    file.into_model(limits)
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("model file values always serialize")
}

fn list<T: Serialize>(out: &mut String, key: &str, items: &[T], last: bool) {
    out.push_str(&format!("  \"{key}\": [\n"));
    for (k, item) in items.iter().enumerate() {
        out.push_str("    ");
        out.push_str(&json(item));
        out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
    }
    out.push_str(if last { "  ]\n" } else { "  ],\n" });
}

/// Renders a model file with one row, feature or node per line.
pub fn render_model(model: &Model) -> String {
    let file = ModelFile::from_model(model);
    let mut out = String::from("{\n");
    let (kind, features, classes) = match &file {
        ModelFile::Table {
            features, classes, ..
        } => ("table", features, classes),
        ModelFile::Dt {
            features, classes, ..
        } => ("dt", features, classes),
        ModelFile::Omdd {
            features, classes, ..
        } => ("omdd", features, classes),
    };
    out.push_str(&format!("  \"type\": \"{kind}\",\n"));
    list(&mut out, "features", features, false);
    out.push_str(&format!("  \"classes\": {},\n", json(classes)));
    match &file {
        ModelFile::Table { rows, .. } => list(&mut out, "rows", rows, true),
        ModelFile::Dt { root, nodes, .. } => {
            out.push_str(&format!("  \"root\": {},\n", json(root)));
            list(&mut out, "nodes", nodes, true);
        }
        ModelFile::Omdd {
            order, root, nodes, ..
        } => {
            out.push_str(&format!("  \"order\": {},\n", json(order)));
            out.push_str(&format!("  \"root\": {},\n", json(root)));
            list(&mut out, "nodes", nodes, true);
        }
    }
    out.push_str("}\n");
    out
}

pub fn write_model(model: &Model, mut w: impl Write) -> Result<()> {
    w.write_all(render_model(model).as_bytes())?;
    Ok(())
}
