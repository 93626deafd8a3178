//! Temporal paths over finite contact-event lists: validity, the three
//! classic optimality notions (shortest / fastest / foremost) and strong
//! connectedness at probe times.
//!
//! Contacts sharing a timestamp may be chained within a path, so every
//! sweep processes same-time batches to a fixpoint.

use crate::error::{Error, Result};
use crate::events::EdgeEventSet;
use crate::grid::TimeGrid;

/// An undirected contact `(t, {u, v})`, endpoint indices normalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactEvent {
    pub t: f64,
    pub u: usize,
    pub v: usize,
}

/// Finite sorted list of contact events over a node universe.
#[derive(Debug, Clone)]
pub struct EventList {
    nodes: Vec<String>,
    events: Vec<ContactEvent>,
    t_start: f64,
    t_end: f64,
}

impl EventList {
    pub fn new<S: AsRef<str>>(
        nodes: Vec<String>,
        contacts: &[(f64, S, S)],
        t_start: f64,
        t_end: f64,
    ) -> Result<Self> {
        if t_end < t_start {
            return Err(Error::InvalidEvents(format!(
                "invalid bounds [{t_start}, {t_end}]"
            )));
        }
        let index: std::collections::HashMap<&str, usize> = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        if index.len() != nodes.len() {
            return Err(Error::InvalidEvents("duplicate node".into()));
        }
        let mut events = Vec::with_capacity(contacts.len());
        for (t, u, v) in contacts {
            let (t, u, v) = (*t, u.as_ref(), v.as_ref());
            if !t.is_finite() || t < t_start || t > t_end {
                return Err(Error::InvalidEvents(format!(
                    "contact time {t} outside [{t_start}, {t_end}]"
                )));
            }
            let ui = *index
                .get(u)
                .ok_or_else(|| Error::UnknownNode(u.to_string()))?;
            let vi = *index
                .get(v)
                .ok_or_else(|| Error::UnknownNode(v.to_string()))?;
            if ui == vi {
                return Err(Error::InvalidEvents(format!(
                    "contact endpoints must differ, got {u:?} twice"
                )));
            }
            events.push(ContactEvent {
                t,
                u: ui.min(vi),
                v: ui.max(vi),
            });
        }
        events.sort_by(|a, b| (a.t, a.u, a.v).partial_cmp(&(b.t, b.u, b.v)).unwrap());
        events.dedup_by(|a, b| a.t == b.t && a.u == b.u && a.v == b.v);
        Ok(Self {
            nodes,
            events,
            t_start,
            t_end,
        })
    }

    /// One contact per grid sample during which a pair is active,
    /// stamped at the sample midpoint.
    pub fn from_event_set(events: &EdgeEventSet, grid: &TimeGrid) -> Result<Self> {
        let mut contacts: Vec<(f64, &str, &str)> = Vec::new();
        for j in 0..grid.len() {
            let t = grid.midpoint(j);
            for (a, b) in events.pairs() {
                if events.active_at(a, b, t) {
                    contacts.push((t, events.node_name(a), events.node_name(b)));
                }
            }
        }
        Self::new(
            events.nodes().to_vec(),
            &contacts,
            events.t_start(),
            events.t_end(),
        )
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_name(&self, i: usize) -> &str {
        &self.nodes[i]
    }

    pub fn node_id(&self, name: &str) -> Result<usize> {
        self.nodes
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    pub fn events(&self) -> &[ContactEvent] {
        &self.events
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    /// Distinct contact timestamps in increasing order.
    pub fn event_times(&self) -> Vec<f64> {
        let mut ts: Vec<f64> = self.events.iter().map(|e| e.t).collect();
        ts.dedup();
        ts
    }

    fn has_contact(&self, t: f64, a: usize, b: usize) -> bool {
        let (u, v) = (a.min(b), a.max(b));
        self.events.iter().any(|e| e.t == t && e.u == u && e.v == v)
    }
}

/// One traversed contact within a path: `from -> to` at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathHop {
    pub t: f64,
    pub from: usize,
    pub to: usize,
}

/// A time-respecting path from `(alpha, source)` to `(omega, target)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalPath {
    pub alpha: f64,
    pub source: usize,
    pub omega: f64,
    pub target: usize,
    pub hops: Vec<PathHop>,
}

impl TemporalPath {
    /// Number of contacts traversed.
    pub fn length(&self) -> usize {
        self.hops.len()
    }

    /// Time between the first and last contact; 0 for the empty path.
    pub fn duration(&self) -> f64 {
        match (self.hops.first(), self.hops.last()) {
            (Some(a), Some(b)) => b.t - a.t,
            _ => 0.0,
        }
    }

    /// Time of the last contact, or `alpha` for the empty path.
    pub fn arrival(&self) -> f64 {
        self.hops.last().map(|h| h.t).unwrap_or(self.alpha)
    }
}

/// Checks the path axioms and that every traversed contact exists.
pub fn is_valid_path(path: &TemporalPath, list: &EventList) -> bool {
    if path.alpha > path.omega {
        return false;
    }
    if path.hops.is_empty() {
        return path.source == path.target;
    }
    if path.hops[0].from != path.source || path.hops.last().unwrap().to != path.target {
        return false;
    }
    if path.hops[0].t < path.alpha || path.hops.last().unwrap().t > path.omega {
        return false;
    }
    for pair in path.hops.windows(2) {
        if pair[0].t > pair[1].t || pair[0].to != pair[1].from {
            return false;
        }
    }
    path.hops
        .iter()
        .all(|h| h.from != h.to && list.has_contact(h.t, h.from, h.to))
}

/// Earliest-arrival state produced by one chronological sweep.
struct Sweep {
    arrival: Vec<Option<f64>>,
    parent: Vec<Option<PathHop>>,
}

/// Chronological sweep from `(alpha, source)` using contacts in
/// `[alpha, omega]`, relaxing same-time batches until fixpoint.
fn sweep(list: &EventList, alpha: f64, source: usize, omega: f64) -> Sweep {
    let n = list.nodes.len();
    let mut arrival: Vec<Option<f64>> = vec![None; n];
    let mut parent: Vec<Option<PathHop>> = vec![None; n];
    arrival[source] = Some(alpha);
    let events = &list.events;
    let mut i = 0;
    while i < events.len() {
        let t = events[i].t;
        let mut j = i;
        while j < events.len() && events[j].t == t {
            j += 1;
        }
        if t > omega {
            break;
        }
        if t >= alpha {
            loop {
                let mut changed = false;
                for e in &events[i..j] {
                    for (a, b) in [(e.u, e.v), (e.v, e.u)] {
                        let reachable = arrival[a].is_some_and(|x| x <= t);
                        if reachable && arrival[b].map_or(true, |x| x > t) {
                            arrival[b] = Some(t);
                            parent[b] = Some(PathHop { t, from: a, to: b });
                            changed = true;
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
        }
        i = j;
    }
    Sweep { arrival, parent }
}

fn rebuild(sweep: &Sweep, alpha: f64, source: usize, omega: f64, target: usize) -> TemporalPath {
    let mut hops = Vec::new();
    let mut cur = target;
    while cur != source {
        match sweep.parent[cur] {
            Some(hop) => {
                hops.push(hop);
                cur = hop.from;
            }
            None => break,
        }
    }
    hops.reverse();
    TemporalPath {
        alpha,
        source,
        omega,
        target,
        hops,
    }
}

/// A path minimizing arrival time at `target`, departing `source` no
/// earlier than `alpha`.
pub fn foremost_path(
    list: &EventList,
    alpha: f64,
    source: &str,
    target: &str,
) -> Result<Option<TemporalPath>> {
    let s = list.node_id(source)?;
    let v = list.node_id(target)?;
    if s == v {
        return Ok(Some(TemporalPath {
            alpha,
            source: s,
            omega: alpha,
            target: v,
            hops: vec![],
        }));
    }
    let sw = sweep(list, alpha, s, f64::INFINITY);
    Ok(sw.arrival[v].map(|arr| rebuild(&sw, alpha, s, arr, v)))
}

/// omega - alpha for the foremost path, if any.
pub fn time_to_reach(list: &EventList, alpha: f64, source: &str, target: &str) -> Result<Option<f64>> {
    Ok(foremost_path(list, alpha, source, target)?.map(|p| p.arrival() - alpha))
}

/// A path of minimal duration within `[alpha, omega]`.
///
/// One foremost sweep is restarted at each distinct contact time at which
/// the source is involved; the best reconstructed path wins.
pub fn fastest_path(
    list: &EventList,
    alpha: f64,
    source: &str,
    omega: f64,
    target: &str,
) -> Result<Option<TemporalPath>> {
    if alpha > omega {
        return Err(Error::InvalidEvents(format!(
            "alpha ({alpha}) must not exceed omega ({omega})"
        )));
    }
    let s = list.node_id(source)?;
    let v = list.node_id(target)?;
    if s == v {
        return Ok(Some(TemporalPath {
            alpha,
            source: s,
            omega,
            target: v,
            hops: vec![],
        }));
    }
    let mut starts: Vec<f64> = list
        .events
        .iter()
        .filter(|e| (e.u == s || e.v == s) && e.t >= alpha && e.t <= omega)
        .map(|e| e.t)
        .collect();
    starts.dedup();
    let mut best: Option<TemporalPath> = None;
    for t0 in starts {
        let sw = sweep(list, t0, s, omega);
        if sw.arrival[v].is_none() {
            continue;
        }
        let candidate = rebuild(&sw, alpha, s, omega, v);
        if best
            .as_ref()
            .map_or(true, |b| candidate.duration() < b.duration())
        {
            best = Some(candidate);
        }
    }
    Ok(best)
}

/// Duration of the fastest path, if any.
pub fn latency(
    list: &EventList,
    alpha: f64,
    source: &str,
    omega: f64,
    target: &str,
) -> Result<Option<f64>> {
    Ok(fastest_path(list, alpha, source, omega, target)?.map(|p| p.duration()))
}

/// A path of minimal length (contact count) within `[alpha, omega]`,
/// found by a breadth-layered sweep over (node, earliest-arrival) states.
pub fn shortest_path(
    list: &EventList,
    alpha: f64,
    source: &str,
    omega: f64,
    target: &str,
) -> Result<Option<TemporalPath>> {
    if alpha > omega {
        return Err(Error::InvalidEvents(format!(
            "alpha ({alpha}) must not exceed omega ({omega})"
        )));
    }
    let s = list.node_id(source)?;
    let v = list.node_id(target)?;
    if s == v {
        return Ok(Some(TemporalPath {
            alpha,
            source: s,
            omega,
            target: v,
            hops: vec![],
        }));
    }
    let n = list.nodes.len();
    // arrivals[h][x]: earliest arrival at x using at most h contacts
    let mut arrivals: Vec<Vec<Option<f64>>> = vec![vec![None; n]];
    arrivals[0][s] = Some(alpha);
    let mut parents: Vec<Vec<Option<PathHop>>> = vec![vec![None; n]];
    loop {
        let prev = arrivals.last().unwrap().clone();
        if prev[v].is_some() {
            break;
        }
        let mut next = prev.clone();
        let mut par: Vec<Option<PathHop>> = vec![None; n];
        for e in &list.events {
            if e.t < alpha || e.t > omega {
                continue;
            }
            for (a, b) in [(e.u, e.v), (e.v, e.u)] {
                if prev[a].is_some_and(|x| x <= e.t) && next[b].map_or(true, |x| x > e.t) {
                    next[b] = Some(e.t);
                    par[b] = Some(PathHop {
                        t: e.t,
                        from: a,
                        to: b,
                    });
                }
            }
        }
        if next == prev {
            return Ok(None);
        }
        arrivals.push(next);
        parents.push(par);
    }
    // walk back from the first layer that reached the target
    let mut hops = Vec::new();
    let mut h = arrivals.len() - 1;
    let mut cur = v;
    while cur != s {
        match parents[h][cur] {
            Some(hop) => {
                hops.push(hop);
                cur = hop.from;
                h -= 1;
            }
            None => h -= 1, // reached at an earlier layer already
        }
    }
    hops.reverse();
    Ok(Some(TemporalPath {
        alpha,
        source: s,
        omega,
        target: v,
        hops,
    }))
}

/// Length of the shortest path, if any.
pub fn distance(
    list: &EventList,
    alpha: f64,
    source: &str,
    omega: f64,
    target: &str,
) -> Result<Option<usize>> {
    Ok(shortest_path(list, alpha, source, omega, target)?.map(|p| p.length()))
}

/// True when, for every probe time and every ordered node pair, a path
/// exists from `(probe, u)` to `(t_end, v)`.
pub fn is_strongly_connected(list: &EventList, probe_times: &[f64]) -> bool {
    let n = list.nodes.len();
    for &alpha in probe_times {
        for s in 0..n {
            let sw = sweep(list, alpha, s, list.t_end);
            if sw.arrival.iter().any(|a| a.is_none()) {
                return false;
            }
        }
    }
    true
}
