//! Stable counting sort for items keyed by small integers.

/// Reorders `items` stably by `key`, which must be below `buckets`.
pub(crate) fn counting_sort<T: Copy>(items: &[T], buckets: usize, key: impl Fn(T) -> usize) -> Vec<T> {
    let Some(&filler) = items.first() else {
        return Vec::new();
    };
    let mut start = vec![0usize; buckets + 1];
    for &x in items {
        start[key(x) + 1] += 1;
    }
    for b in 0..buckets {
        start[b + 1] += start[b];
    }
    let mut out = vec![filler; items.len()];
    for &x in items {
        let k = key(x);
        out[start[k]] = x;
        start[k] += 1;
    }
    out
}

/// Reorders `items` by `(major, minor)`, stably.
pub(crate) fn sort_by_pair<T: Copy>(
    items: &[T],
    buckets: usize,
    major: impl Fn(T) -> usize,
    minor: impl Fn(T) -> usize,
) -> Vec<T> {
    let by_minor = counting_sort(items, buckets, minor);
    counting_sort(&by_minor, buckets, major)
}
