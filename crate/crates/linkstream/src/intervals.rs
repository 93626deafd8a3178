//! Interval arithmetic on sorted, disjoint `(begin, end)` lists.
//!
//! Every interval set in this crate is kept in normal form: sorted by
//! begin, pairwise disjoint, with touching intervals merged. All helpers
//! here preserve that form.

/// Merges an arbitrary list of intervals into normal form.
/// Empty and reversed inputs are dropped.
pub(crate) fn normalize(mut intervals: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    intervals.retain(|&(b, e)| e > b);
    intervals.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
    for (b, e) in intervals {
        match out.last_mut() {
            Some(last) if b <= last.1 => last.1 = last.1.max(e),
            _ => out.push((b, e)),
        }
    }
    out
}

/// Total length of a normalized interval list.
pub(crate) fn measure(intervals: &[(f64, f64)]) -> f64 {
    intervals.iter().map(|&(b, e)| e - b).sum()
}

/// Intersection of two normalized lists, in normal form.
pub(crate) fn intersect(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if hi > lo {
            out.push((lo, hi));
        }
        if a[i].1 <= b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

/// True if `t` lies in some interval, half-open convention `[begin, end)`.
pub(crate) fn contains(intervals: &[(f64, f64)], t: f64) -> bool {
    intervals.iter().any(|&(b, e)| b <= t && t < e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_merges_overlaps_and_touching() {
        let v = normalize(vec![(3.0, 5.0), (0.0, 2.0), (2.0, 3.5), (7.0, 7.0)]);
        assert_eq!(v, vec![(0.0, 5.0)]);
    }

    #[test]
    fn intersect_basic() {
        let a = vec![(0.0, 4.0), (6.0, 9.0)];
        let b = vec![(2.0, 7.0)];
        assert_eq!(intersect(&a, &b), vec![(2.0, 4.0), (6.0, 7.0)]);
        assert_eq!(measure(&intersect(&a, &b)), 3.0);
    }

    #[test]
    fn contains_is_half_open() {
        let a = vec![(0.0, 5.0)];
        assert!(contains(&a, 0.0));
        assert!(contains(&a, 4.999));
        assert!(!contains(&a, 5.0));
    }
}
