//! Seeded fixtures shared by the benchmarks.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use xpaudit_core::random::{random_point, random_space, random_table, random_tree};
use xpaudit_core::{FeatureSpace, Model, Point};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random table over `m` features with domains up to `max_domain`.
pub fn table_fixture(seed: u64, m: usize, max_domain: u32) -> (Model, Point) {
    let mut r = rng(seed);
    let space = random_space(&mut r, m, max_domain);
    let model = Model::Table(random_table(&mut r, space.clone(), 4));
    let v = random_point(&mut r, &space);
    (model, v)
}

/// A random read-once tree over `m` binary features.
pub fn tree_fixture(seed: u64, m: usize, depth: usize) -> (Model, Point) {
    let mut r = rng(seed);
    let space = FeatureSpace::new(vec![2; m]).expect("binary space");
    let model = Model::Tree(random_tree(&mut r, space.clone(), depth, 4));
    let v = random_point(&mut r, &space);
    (model, v)
}
