use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::intervals;

/// Set-of-intervals representation of an undirected, unweighted link
/// stream: each unordered node pair carries the disjoint maximal
/// intervals during which it is active.
///
/// The time domain is a union of disjoint intervals; it starts out as a
/// single interval and only becomes fragmented through [`substream`].
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeEventSet {
    domain: Vec<(f64, f64)>,
    nodes: Vec<String>,
    node_index: HashMap<String, usize>,
    // key is (min, max) node index; values are normalized interval lists
    links: BTreeMap<(usize, usize), Vec<(f64, f64)>>,
}

impl EdgeEventSet {
    /// Builds an event set on `[t_start, t_end]` from `(begin, end, u, v)`
    /// activity records. Overlapping and touching intervals of the same
    /// pair are merged.
    pub fn from_links<S: AsRef<str>>(
        t_start: f64,
        t_end: f64,
        nodes: Vec<String>,
        links: &[(f64, f64, S, S)],
    ) -> Result<Self> {
        if !(t_start.is_finite() && t_end.is_finite()) || t_end <= t_start {
            return Err(Error::InvalidEvents(format!(
                "invalid time bounds [{t_start}, {t_end}]"
            )));
        }
        let mut node_index = HashMap::with_capacity(nodes.len());
        for (i, name) in nodes.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::InvalidEvents("empty node identifier".into()));
            }
            if node_index.insert(name.clone(), i).is_some() {
                return Err(Error::InvalidEvents(format!("duplicate node {name:?}")));
            }
        }
        let mut raw: BTreeMap<(usize, usize), Vec<(f64, f64)>> = BTreeMap::new();
        for (begin, end, u, v) in links {
            let (begin, end) = (*begin, *end);
            if !(begin.is_finite() && end.is_finite()) || end <= begin {
                return Err(Error::InvalidEvents(format!(
                    "invalid interval [{begin}, {end}]"
                )));
            }
            if begin < t_start || end > t_end {
                return Err(Error::InvalidEvents(format!(
                    "interval [{begin}, {end}] outside [{t_start}, {t_end}]"
                )));
            }
            let ui = *node_index
                .get(u.as_ref())
                .ok_or_else(|| Error::UnknownNode(u.as_ref().to_string()))?;
            let vi = *node_index
                .get(v.as_ref())
                .ok_or_else(|| Error::UnknownNode(v.as_ref().to_string()))?;
            if ui == vi {
                return Err(Error::InvalidEvents(format!(
                    "pair endpoints must differ, got {:?} twice",
                    u.as_ref()
                )));
            }
            let key = (ui.min(vi), ui.max(vi));
            raw.entry(key).or_default().push((begin, end));
        }
        let links = raw
            .into_iter()
            .map(|(k, v)| (k, intervals::normalize(v)))
            .collect();
        Ok(Self {
            domain: vec![(t_start, t_end)],
            nodes,
            node_index,
            links,
        })
    }

    /// An empty event set over `[t_start, t_end]` with the given nodes.
    pub fn empty(t_start: f64, t_end: f64, nodes: Vec<String>) -> Result<Self> {
        Self::from_links::<&str>(t_start, t_end, nodes, &[])
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_name(&self, i: usize) -> &str {
        &self.nodes[i]
    }

    pub fn node_id(&self, name: &str) -> Result<usize> {
        self.node_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Earliest domain time.
    pub fn t_start(&self) -> f64 {
        self.domain.first().map(|i| i.0).unwrap_or(0.0)
    }

    /// Latest domain time.
    pub fn t_end(&self) -> f64 {
        self.domain.last().map(|i| i.1).unwrap_or(0.0)
    }

    /// The time domain as disjoint intervals.
    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    /// |T|: total measure of the time domain.
    pub fn time_measure(&self) -> f64 {
        intervals::measure(&self.domain)
    }

    /// |E|: total activity measure summed over pairs.
    pub fn measure(&self) -> f64 {
        self.links.values().map(|v| intervals::measure(v)).sum()
    }

    /// Unordered pairs with positive activity, as `(i, j)` node indices
    /// with `i < j`, in index order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.links.keys().copied()
    }

    /// Active intervals of the pair `{i, j}` (normalized, possibly empty).
    pub fn intervals_of(&self, i: usize, j: usize) -> &[(f64, f64)] {
        let key = (i.min(j), i.max(j));
        self.links.get(&key).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Whether pair `{i, j}` is active at `t` (half-open intervals).
    pub fn active_at(&self, i: usize, j: usize, t: f64) -> bool {
        intervals::contains(self.intervals_of(i, j), t)
    }

    /// All interval endpoints plus domain bounds, sorted and deduplicated.
    /// The integrands of the interval-exact metrics are constant between
    /// consecutive entries.
    pub(crate) fn breakpoints(&self) -> Vec<f64> {
        let mut ts: Vec<f64> = self
            .domain
            .iter()
            .chain(self.links.values().flatten())
            .flat_map(|&(b, e)| [b, e])
            .collect();
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ts.dedup();
        ts
    }
}

/// A set of temporal nodes `T' x V'` used to restrict an event set.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    nodes: Vec<String>,
    intervals: Vec<(f64, f64)>,
}

impl Cluster {
    pub fn new(nodes: Vec<String>, time_intervals: Vec<(f64, f64)>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidCluster("node subset is empty".into()));
        }
        let mut dedup = nodes.clone();
        dedup.sort();
        dedup.dedup();
        if dedup.len() != nodes.len() {
            return Err(Error::InvalidCluster("duplicate node in subset".into()));
        }
        for &(b, e) in &time_intervals {
            if !(b.is_finite() && e.is_finite()) || e <= b {
                return Err(Error::InvalidCluster(format!("invalid interval [{b}, {e}]")));
            }
        }
        let normalized = intervals::normalize(time_intervals);
        if normalized.is_empty() {
            return Err(Error::InvalidCluster("time subset is empty".into()));
        }
        Ok(Self {
            nodes,
            intervals: normalized,
        })
    }

    /// Full-domain cluster over the given nodes.
    pub fn over(nodes: Vec<String>, t_start: f64, t_end: f64) -> Result<Self> {
        Self::new(nodes, vec![(t_start, t_end)])
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn time_intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn time_measure(&self) -> f64 {
        intervals::measure(&self.intervals)
    }
}

/// Restriction of `events` to the cluster: intervals are intersected with
/// the cluster's time subset and only pairs inside the node subset
/// survive. The result's time domain is the restricted one.
pub fn substream(events: &EdgeEventSet, cluster: &Cluster) -> Result<EdgeEventSet> {
    let mut keep = vec![false; events.num_nodes()];
    for name in cluster.nodes() {
        keep[events.node_id(name)?] = true;
    }
    for &(b, e) in cluster.time_intervals() {
        if b < events.t_start() || e > events.t_end() {
            return Err(Error::InvalidCluster(format!(
                "interval [{b}, {e}] outside the event domain"
            )));
        }
    }
    let domain = intervals::intersect(&events.domain, cluster.time_intervals());
    if domain.is_empty() {
        return Err(Error::InvalidCluster(
            "time subset misses the event domain".into(),
        ));
    }
    let nodes: Vec<String> = events
        .nodes
        .iter()
        .enumerate()
        .filter(|(i, _)| keep[*i])
        .map(|(_, n)| n.clone())
        .collect();
    let mut node_index = HashMap::with_capacity(nodes.len());
    for (i, n) in nodes.iter().enumerate() {
        node_index.insert(n.clone(), i);
    }
    let mut links = BTreeMap::new();
    for (&(i, j), ivs) in &events.links {
        if !(keep[i] && keep[j]) {
            continue;
        }
        let cut = intervals::intersect(ivs, &domain);
        if !cut.is_empty() {
            let a = node_index[&events.nodes[i]];
            let b = node_index[&events.nodes[j]];
            links.insert((a.min(b), a.max(b)), cut);
        }
    }
    Ok(EdgeEventSet {
        domain,
        nodes,
        node_index,
        links,
    })
}

/// The static graph aggregating every pair active at some time, as
/// name pairs in node-index order.
pub fn induced_graph(events: &EdgeEventSet) -> Vec<(String, String)> {
    events
        .pairs()
        .map(|(i, j)| (events.nodes[i].clone(), events.nodes[j].clone()))
        .collect()
}

/// True when every induced pair is active over the whole domain, up to
/// `tol` of missing measure. Vacuously true for an empty set.
pub fn is_graph_equivalent(events: &EdgeEventSet, tol: f64) -> bool {
    let total = events.time_measure();
    events
        .links
        .values()
        .all(|ivs| total - intervals::measure(ivs) <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn two_pair_fixture() -> EdgeEventSet {
        // uv on [0,5], bc on [0,10] over T=[0,10] with V={u,v,b,c}? The
        // canonical 3-node variant: nodes a,b,c with ab on [0,5], bc on [0,10].
        EdgeEventSet::from_links(
            0.0,
            10.0,
            names(&["a", "b", "c"]),
            &[(0.0, 5.0, "a", "b"), (0.0, 10.0, "b", "c")],
        )
        .unwrap()
    }

    #[test]
    fn construction_merges_and_validates() {
        let e = EdgeEventSet::from_links(
            0.0,
            10.0,
            names(&["a", "b"]),
            &[(0.0, 2.0, "a", "b"), (1.0, 4.0, "b", "a")],
        )
        .unwrap();
        assert_eq!(e.intervals_of(0, 1), &[(0.0, 4.0)]);
        assert_eq!(e.measure(), 4.0);

        assert!(EdgeEventSet::from_links(
            0.0,
            10.0,
            names(&["a", "b"]),
            &[(3.0, 2.0, "a", "b")]
        )
        .is_err());
        assert!(EdgeEventSet::from_links(
            0.0,
            10.0,
            names(&["a", "b"]),
            &[(0.0, 2.0, "a", "a")]
        )
        .is_err());
        assert!(EdgeEventSet::from_links(
            0.0,
            10.0,
            names(&["a", "b"]),
            &[(0.0, 11.0, "a", "b")]
        )
        .is_err());
    }

    #[test]
    fn substream_restricts_time_and_nodes() {
        let e = two_pair_fixture();

        let full = Cluster::over(names(&["a", "b", "c"]), 0.0, 10.0).unwrap();
        assert_eq!(substream(&e, &full).unwrap(), e);

        let ab_only = Cluster::over(names(&["a", "b"]), 0.0, 10.0).unwrap();
        let sub = substream(&e, &ab_only).unwrap();
        assert_eq!(sub.pairs().count(), 1);
        assert_eq!(sub.measure(), 5.0);

        // pair active on [2,5] cut to T'=[0,3] keeps [2,3]
        let e2 = EdgeEventSet::from_links(
            0.0,
            10.0,
            names(&["u", "v"]),
            &[(2.0, 5.0, "u", "v")],
        )
        .unwrap();
        let c = Cluster::new(names(&["u", "v"]), vec![(0.0, 3.0)]).unwrap();
        let sub = substream(&e2, &c).unwrap();
        assert_eq!(sub.intervals_of(0, 1), &[(2.0, 3.0)]);
        assert_eq!(sub.time_measure(), 3.0);
    }

    #[test]
    fn substream_to_disjoint_nodes_is_empty() {
        let e = two_pair_fixture();
        let c = Cluster::over(names(&["a", "c"]), 0.0, 10.0).unwrap();
        let sub = substream(&e, &c).unwrap();
        assert_eq!(sub.pairs().count(), 0);
        assert_eq!(sub.measure(), 0.0);
    }

    #[test]
    fn substream_is_idempotent() {
        let e = two_pair_fixture();
        let c = Cluster::new(names(&["a", "b"]), vec![(1.0, 4.0), (6.0, 8.0)]).unwrap();
        let once = substream(&e, &c).unwrap();
        let twice = substream(&once, &c).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn induced_graph_projects_pairs() {
        let e = two_pair_fixture();
        assert_eq!(
            induced_graph(&e),
            vec![
                ("a".to_string(), "b".to_string()),
                ("b".to_string(), "c".to_string())
            ]
        );
        let empty = EdgeEventSet::empty(0.0, 1.0, names(&["a"])).unwrap();
        assert!(induced_graph(&empty).is_empty());
    }

    #[test]
    fn graph_equivalence_checks_full_coverage() {
        let full = EdgeEventSet::from_links(
            0.0,
            10.0,
            names(&["a", "b"]),
            &[(0.0, 10.0, "a", "b")],
        )
        .unwrap();
        assert!(is_graph_equivalent(&full, 1e-9));
        assert!(!is_graph_equivalent(&two_pair_fixture(), 1e-9));
        let empty = EdgeEventSet::empty(0.0, 1.0, names(&["a", "b"])).unwrap();
        assert!(is_graph_equivalent(&empty, 1e-9));
    }
}
