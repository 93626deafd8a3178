//! Stream-graph metrics on event sets: number of links, density, degrees,
//! clustering coefficient, clique test and a per-sample k-core.
//!
//! Everything here is evaluated exactly on interval endpoints; the sample
//! grid only enters for the k-core, which is defined per snapshot.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::events::{substream, Cluster, EdgeEventSet};
use crate::grid::TimeGrid;
use crate::intervals;

/// The neighborhood cluster of a node: one `(interval, neighbor)` entry
/// per maximal co-activity interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Neighborhood {
    pub center: usize,
    pub entries: Vec<((f64, f64), usize)>,
}

impl Neighborhood {
    /// Total measure |N(v)| of the neighborhood.
    pub fn measure(&self) -> f64 {
        self.entries.iter().map(|((b, e), _)| e - b).sum()
    }
}

/// m = |E| / |T|: each pair contributes proportionally to its active time.
pub fn num_links(events: &EdgeEventSet) -> f64 {
    events.measure() / events.time_measure()
}

/// delta(L) = |E| / (|T| * n(n-1)/2), the probability that a random
/// (time, pair) triplet is active.
pub fn density(events: &EdgeEventSet) -> Result<f64> {
    let n = events.num_nodes();
    if n < 2 {
        return Err(Error::InvalidEvents(format!(
            "density needs at least 2 nodes, got {n}"
        )));
    }
    let pairs = (n * (n - 1)) as f64 / 2.0;
    Ok(events.measure() / (events.time_measure() * pairs))
}

/// N(v): the intervals during which each neighbor is connected to `v`.
pub fn neighborhood(events: &EdgeEventSet, v: &str) -> Result<Neighborhood> {
    let vi = events.node_id(v)?;
    let mut entries = Vec::new();
    for (i, j) in events.pairs() {
        let u = if i == vi {
            j
        } else if j == vi {
            i
        } else {
            continue;
        };
        for &iv in events.intervals_of(i, j) {
            entries.push((iv, u));
        }
    }
    Ok(Neighborhood {
        center: vi,
        entries,
    })
}

/// d(v) = |N(v)| / |T|.
pub fn degree(events: &EdgeEventSet, v: &str) -> Result<f64> {
    Ok(neighborhood(events, v)?.measure() / events.time_measure())
}

/// d_t(v): number of neighbors of `v` active at time `t`.
pub fn instantaneous_degree(events: &EdgeEventSet, v: &str, t: f64) -> Result<usize> {
    let vi = events.node_id(v)?;
    Ok(events
        .pairs()
        .filter(|&(i, j)| (i == vi || j == vi) && events.active_at(i, j, t))
        .count())
}

/// Clustering coefficient of `v`: the probability that two neighbors
/// sampled at a common time are themselves connected.
///
/// Both integrals are piecewise constant between interval endpoints, so
/// they are evaluated exactly on the breakpoint partition. Returns `None`
/// when `v` never has two simultaneous neighbors.
pub fn clustering_coefficient(events: &EdgeEventSet, v: &str) -> Result<Option<f64>> {
    let vi = events.node_id(v)?;
    let breakpoints = events.breakpoints();
    let pairs: Vec<(usize, usize)> = events.pairs().collect();
    let mut numerator = 0.0;
    let mut denominator = 0.0;
    for w in breakpoints.windows(2) {
        let (a, b) = (w[0], w[1]);
        let t = 0.5 * (a + b);
        if !intervals::contains(events.domain(), t) {
            continue;
        }
        let neighbors: Vec<usize> = pairs
            .iter()
            .filter(|&&(i, j)| (i == vi || j == vi) && events.active_at(i, j, t))
            .map(|&(i, j)| if i == vi { j } else { i })
            .collect();
        let d = neighbors.len();
        if d < 2 {
            continue;
        }
        let len = b - a;
        denominator += len * (d * (d - 1)) as f64 / 2.0;
        for (x, &u) in neighbors.iter().enumerate() {
            for &w2 in &neighbors[x + 1..] {
                if events.active_at(u, w2, t) {
                    numerator += len;
                }
            }
        }
    }
    if denominator == 0.0 {
        return Ok(None);
    }
    Ok(Some(numerator / denominator))
}

/// Density of the substream induced by the cluster.
pub fn cluster_density(events: &EdgeEventSet, cluster: &Cluster) -> Result<f64> {
    if cluster.nodes().len() < 2 {
        return Err(Error::InvalidCluster(
            "cluster density needs at least 2 nodes".into(),
        ));
    }
    density(&substream(events, cluster)?)
}

/// C is a clique when the restricted density reaches 1 (within 1e-9).
pub fn is_clique(events: &EdgeEventSet, cluster: &Cluster) -> Result<bool> {
    Ok((cluster_density(events, cluster)? - 1.0).abs() <= 1e-9)
}

/// Per-sample k-core: each grid snapshot is peeled to its classic k-core;
/// entry `j` of the result is the surviving node set at sample `j`.
pub fn kcore(events: &EdgeEventSet, k: usize, grid: &TimeGrid) -> Vec<BTreeSet<usize>> {
    let pairs: Vec<(usize, usize)> = events.pairs().collect();
    (0..grid.len())
        .map(|j| {
            let t = grid.midpoint(j);
            let snapshot: Vec<(usize, usize)> = pairs
                .iter()
                .copied()
                .filter(|&(a, b)| events.active_at(a, b, t))
                .collect();
            peel_core(events.num_nodes(), &snapshot, k)
        })
        .collect()
}

/// Classic k-core peeling on a static edge list.
fn peel_core(n: usize, edges: &[(usize, usize)], k: usize) -> BTreeSet<usize> {
    let mut alive: Vec<bool> = vec![false; n];
    let mut deg = vec![0usize; n];
    for &(a, b) in edges {
        alive[a] = true;
        alive[b] = true;
        deg[a] += 1;
        deg[b] += 1;
    }
    loop {
        let mut removed = false;
        for v in 0..n {
            if alive[v] && deg[v] < k {
                alive[v] = false;
                removed = true;
                for &(a, b) in edges {
                    if a == v && alive[b] {
                        deg[b] -= 1;
                    } else if b == v && alive[a] {
                        deg[a] -= 1;
                    }
                }
            }
        }
        if !removed {
            break;
        }
    }
    (0..n).filter(|&v| alive[v]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    /// T=[0,10], ab on [0,5], bc on [0,10] (the running two-pair fixture).
    fn two_pair() -> EdgeEventSet {
        EdgeEventSet::from_links(
            0.0,
            10.0,
            names(&["a", "b", "c"]),
            &[(0.0, 5.0, "a", "b"), (0.0, 10.0, "b", "c")],
        )
        .unwrap()
    }

    fn triangle(t_ac: (f64, f64)) -> EdgeEventSet {
        EdgeEventSet::from_links(
            0.0,
            10.0,
            names(&["a", "b", "c"]),
            &[
                (0.0, 10.0, "a", "b"),
                (0.0, 10.0, "b", "c"),
                (t_ac.0, t_ac.1, "a", "c"),
            ],
        )
        .unwrap()
    }

    #[test]
    fn num_links_counts_fractional_edges() {
        let empty = EdgeEventSet::empty(0.0, 10.0, names(&["a", "b"])).unwrap();
        assert_eq!(num_links(&empty), 0.0);
        assert_eq!(num_links(&two_pair()), 1.5);
        // graph-equivalent stream of a 3-edge graph
        assert_eq!(num_links(&triangle((0.0, 10.0))), 3.0);
    }

    #[test]
    fn density_matches_measure_arithmetic() {
        assert_eq!(density(&two_pair()).unwrap(), 0.5);
        assert_eq!(density(&triangle((0.0, 10.0))).unwrap(), 1.0);
        let empty = EdgeEventSet::empty(0.0, 10.0, names(&["a", "b"])).unwrap();
        assert_eq!(density(&empty).unwrap(), 0.0);
        let single = EdgeEventSet::empty(0.0, 10.0, names(&["a"])).unwrap();
        assert!(density(&single).is_err());
        // identity: density = 2m / (n(n-1))
        let e = two_pair();
        let n = e.num_nodes() as f64;
        assert!((density(&e).unwrap() - 2.0 * num_links(&e) / (n * (n - 1.0))).abs() < 1e-12);
    }

    #[test]
    fn degrees_interval_based() {
        let e = two_pair();
        assert_eq!(degree(&e, "b").unwrap(), 1.5);
        assert_eq!(degree(&e, "a").unwrap(), 0.5);
        assert_eq!(instantaneous_degree(&e, "b", 3.0).unwrap(), 2);
        assert_eq!(instantaneous_degree(&e, "b", 7.0).unwrap(), 1);
        assert!(degree(&e, "zz").is_err());
        // isolated node
        let iso = EdgeEventSet::empty(0.0, 10.0, names(&["a", "b"])).unwrap();
        assert_eq!(degree(&iso, "a").unwrap(), 0.0);
    }

    #[test]
    fn handshake_identity() {
        let e = two_pair();
        let total: f64 = ["a", "b", "c"]
            .iter()
            .map(|v| degree(&e, v).unwrap())
            .sum();
        assert!((total - 2.0 * num_links(&e)).abs() < 1e-12);
    }

    #[test]
    fn clustering_coefficient_cases() {
        // path a-b-c: no edge ac, cc(b) = 0
        let path = EdgeEventSet::from_links(
            0.0,
            10.0,
            names(&["a", "b", "c"]),
            &[(0.0, 10.0, "a", "b"), (0.0, 10.0, "b", "c")],
        )
        .unwrap();
        assert_eq!(clustering_coefficient(&path, "b").unwrap(), Some(0.0));
        // a never has 2 simultaneous neighbors: undefined
        assert_eq!(clustering_coefficient(&path, "a").unwrap(), None);

        // full triangle: cc = 1 everywhere
        let tri = triangle((0.0, 10.0));
        for v in ["a", "b", "c"] {
            assert_eq!(clustering_coefficient(&tri, v).unwrap(), Some(1.0));
        }

        // ac only active on [0,5]: cc(b) = 0.5
        let half = triangle((0.0, 5.0));
        assert_eq!(clustering_coefficient(&half, "b").unwrap(), Some(0.5));
    }

    #[test]
    fn clique_detection() {
        let e = two_pair();
        let c = Cluster::new(names(&["a", "b"]), vec![(0.0, 5.0)]).unwrap();
        assert!(is_clique(&e, &c).unwrap());
        assert_eq!(cluster_density(&e, &c).unwrap(), 1.0);
        let c2 = Cluster::new(names(&["a", "b"]), vec![(0.0, 10.0)]).unwrap();
        assert!(!is_clique(&e, &c2).unwrap());
        let c3 = Cluster::new(names(&["a", "c"]), vec![(0.0, 10.0)]).unwrap();
        assert!(!is_clique(&e, &c3).unwrap());
        let degenerate = Cluster::new(names(&["a"]), vec![(0.0, 10.0)]).unwrap();
        assert!(cluster_density(&e, &degenerate).is_err());
    }

    #[test]
    fn kcore_peels_per_snapshot() {
        let grid = TimeGrid::new(0.0, 10.0, 10).unwrap();
        let empty = EdgeEventSet::empty(0.0, 10.0, names(&["a", "b"])).unwrap();
        assert!(kcore(&empty, 1, &grid).iter().all(|s| s.is_empty()));

        // triangle active only on [0,5]: 2-core = all three nodes there
        let tri = EdgeEventSet::from_links(
            0.0,
            10.0,
            names(&["a", "b", "c"]),
            &[
                (0.0, 5.0, "a", "b"),
                (0.0, 5.0, "b", "c"),
                (0.0, 5.0, "a", "c"),
            ],
        )
        .unwrap();
        let cores = kcore(&tri, 2, &grid);
        for (j, core) in cores.iter().enumerate() {
            if j < 5 {
                assert_eq!(core.len(), 3);
            } else {
                assert!(core.is_empty());
            }
        }
        // nesting: (k+1)-core inside k-core
        let c1 = kcore(&tri, 1, &grid);
        for (a, b) in cores.iter().zip(c1.iter()) {
            assert!(a.is_subset(b));
        }
    }
}
