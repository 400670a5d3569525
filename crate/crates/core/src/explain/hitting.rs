use crate::space::{sort_family, FeatureSet};

/// Removes every set that strictly contains another member, and duplicates.
pub fn minimize_family(family: &mut Vec<FeatureSet>) {
    family.sort_by_key(|s| (s.len(), s.bits()));
    family.dedup();
    let mut kept: Vec<FeatureSet> = Vec::with_capacity(family.len());
    for &s in family.iter() {
        if !kept.iter().any(|k| k.is_subset(s)) {
            kept.push(s);
        }
    }
    *family = kept;
}

/// All minimal hitting sets of `family` (Berge's incremental algorithm),
/// sorted lexicographically. The empty family is hit by the empty set; a
/// family containing the empty set has no hitting set.
pub fn minimal_hitting_sets(family: &[FeatureSet]) -> Vec<FeatureSet> {
    let mut hs = vec![FeatureSet::EMPTY];
    for &edge in family {
        let mut next = Vec::with_capacity(hs.len());
        for &h in &hs {
            if h.intersects(edge) {
                next.push(h);
            } else {
                next.extend(edge.iter().map(|e| h.with(e)));
            }
        }
        minimize_family(&mut next);
        hs = next;
    }
    sort_family(&mut hs);
    hs
}
