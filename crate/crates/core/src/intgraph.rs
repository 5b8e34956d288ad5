//! Narrowed intervals and the intersection graph they induce.
//!
//! Interval `i` shrunk by the factor `n` about its center is
//! `[c_i - r_i/n, c_i + r_i/n]`. Two indices are adjacent when their narrowed
//! intervals intersect as closed sets. The clique number of this interval
//! graph bounds the enumeration width of the solver.

use crate::model::Instance;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NarrowedInterval {
    pub lo: f64,
    pub hi: f64,
    pub owner: usize,
}

impl NarrowedInterval {
    pub fn intersects(&self, other: &NarrowedInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn contains(&self, t: f64) -> bool {
        self.lo <= t && t <= self.hi
    }
}

/// Narrowed endpoints of coordinate `i`. Shared by the sweep and the solver
/// schedule so that both see bit-identical values.
#[inline]
pub(crate) fn narrowed_bounds(instance: &Instance, i: usize) -> (f64, f64) {
    let n = instance.len() as f64;
    let c = instance.center()[i];
    let w = instance.radius()[i] / n;
    // `+ 0.0` folds -0.0 into +0.0 so total ordering agrees with `==`.
    (c - w + 0.0, c + w + 0.0)
}

pub fn narrowed_intervals(instance: &Instance) -> Vec<NarrowedInterval> {
    (0..instance.len())
        .map(|i| {
            let (lo, hi) = narrowed_bounds(instance, i);
            NarrowedInterval { lo, hi, owner: i }
        })
        .collect()
}

/// Maximum number of narrowed intervals sharing a common point, which for an
/// interval graph is its clique number.
///
/// Begin events sort before end events at equal coordinates, so intervals
/// touching at a single point count as overlapping.
pub fn omega_sweep(instance: &Instance) -> usize {
    let mut events: Vec<(f64, bool)> = Vec::with_capacity(2 * instance.len());
    for i in 0..instance.len() {
        let (lo, hi) = narrowed_bounds(instance, i);
        events.push((lo, false));
        events.push((hi, true));
    }
    events.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut open = 0usize;
    let mut best = 0usize;
    for (_, is_end) in events {
        if is_end {
            open -= 1;
        } else {
            open += 1;
            best = best.max(open);
        }
    }
    best
}

/// Edges `{i, j}` with `i < j`, sorted lexicographically.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeList {
    edges: Vec<(usize, usize)>,
}

impl EdgeList {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut edges: Vec<(usize, usize)> = pairs
            .into_iter()
            .filter(|(i, j)| i != j)
            .map(|(i, j)| (i.min(j), i.max(j)))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        EdgeList { edges }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        let key = (i.min(j), i.max(j));
        self.edges.binary_search(&key).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }
}

/// All intersecting pairs of narrowed intervals. Quadratic; intended for
/// small instances and cross-checks.
///
/// The closed test `lo_i <= hi_j && lo_j <= hi_i` is the same predicate as
/// `|c_i - c_j| <= (r_i + r_j)/n`, evaluated on the stored endpoints.
pub fn edge_list(instance: &Instance) -> EdgeList {
    let nis = narrowed_intervals(instance);
    let mut pairs = Vec::new();
    for (a, x) in nis.iter().enumerate() {
        for y in &nis[a + 1..] {
            if x.intersects(y) {
                pairs.push((x.owner, y.owner));
            }
        }
    }
    EdgeList { edges: pairs }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(pairs: &[(f64, f64)]) -> Instance {
        Instance::new(
            pairs.iter().map(|p| p.0).collect(),
            pairs.iter().map(|p| p.1).collect(),
        )
        .unwrap()
    }

    #[test]
    fn narrowed_examples() {
        let two = narrowed_intervals(&inst(&[(0.0, 1.0), (5.0, 5.0)]));
        assert_eq!((two[0].lo, two[0].hi), (0.25, 0.75));
        assert_eq!((two[1].lo, two[1].hi), (5.0, 5.0));
        assert_eq!(two.iter().map(|x| x.owner).collect::<Vec<_>>(), [0, 1]);

        let one = narrowed_intervals(&inst(&[(0.0, 1.0)]));
        assert_eq!((one[0].lo, one[0].hi), (0.0, 1.0));
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega_sweep(&inst(&[(0.0, 1.0), (0.0, 1.0)])), 2);
        assert_eq!(omega_sweep(&inst(&[(0.0, 1.0), (10.0, 11.0)])), 1);
        let far: Vec<(f64, f64)> = (0..50)
            .map(|i| (i as f64 * 100.0, i as f64 * 100.0 + 1.0))
            .collect();
        assert_eq!(omega_sweep(&inst(&far)), 1);
        assert_eq!(omega_sweep(&inst(&[(4.0, 4.0)])), 1);
    }

    #[test]
    fn edge_examples() {
        let same = edge_list(&inst(&[(0.0, 1.0), (0.0, 1.0)]));
        assert_eq!(same.iter().collect::<Vec<_>>(), [(0, 1)]);
        assert!(edge_list(&inst(&[(0.0, 1.0), (10.0, 11.0)])).is_empty());

        // centers 0 and 1, radii 1, n = 2: narrowed [-0.5, 0.5] and [0.5, 1.5]
        let touching = inst(&[(-1.0, 1.0), (0.0, 2.0)]);
        assert!(edge_list(&touching).contains(0, 1));
        assert_eq!(omega_sweep(&touching), 2);
    }

    #[test]
    fn touching_at_signed_zero() {
        let x = inst(&[(-0.0, -0.0), (0.0, 0.0)]);
        let nis = narrowed_intervals(&x);
        assert!(nis[0].intersects(&nis[1]));
        assert_eq!(omega_sweep(&x), 2);
    }
}
