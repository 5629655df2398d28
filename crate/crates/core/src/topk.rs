use std::cmp::Ordering;

/// Sorts, drops adjacent duplicates and keeps the first `cap` entries.
///
/// The result depends only on the multiset of inputs, so shards can be
/// compacted independently and merged in any order.
pub(crate) fn compact<T>(
    items: &mut Vec<T>,
    cap: usize,
    order: fn(&T, &T) -> Ordering,
    same: fn(&T, &T) -> bool,
) {
    items.sort_by(order);
    items.dedup_by(|a, b| same(a, b));
    items.truncate(cap);
}

pub(crate) fn cmp_slices(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}
