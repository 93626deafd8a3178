use ndarray::Array2;

use crate::error::{Error, Result};
use crate::events::EdgeEventSet;
use crate::grid::TimeGrid;
use crate::intervals;
use crate::space::RelationSpace;

/// Symmetry tolerance used when collapsing direction pairs back into
/// undirected events.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// A link stream as a weight function on the sample x relation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkStream {
    grid: TimeGrid,
    space: RelationSpace,
    weights: Array2<f64>,
}

impl LinkStream {
    /// Validates shape and finiteness and wraps the weight matrix.
    pub fn new(grid: TimeGrid, space: RelationSpace, weights: Array2<f64>) -> Result<Self> {
        let (rows, cols) = weights.dim();
        if rows != grid.len() || cols != space.num_relations() {
            return Err(Error::ShapeMismatch {
                rows: grid.len(),
                cols: space.num_relations(),
                got_rows: rows,
                got_cols: cols,
            });
        }
        for ((j, k), w) in weights.indexed_iter() {
            if !w.is_finite() {
                return Err(Error::NonFiniteWeight {
                    sample: j,
                    relation: k,
                });
            }
        }
        Ok(Self {
            grid,
            space,
            weights,
        })
    }

    /// The all-zero stream on the given domain.
    pub fn zeros(grid: TimeGrid, space: RelationSpace) -> Self {
        let weights = Array2::zeros((grid.len(), space.num_relations()));
        Self {
            grid,
            space,
            weights,
        }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn space(&self) -> &RelationSpace {
        &self.space
    }

    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }

    pub fn weight(&self, sample: usize, relation: usize) -> f64 {
        self.weights[(sample, relation)]
    }

    pub fn num_samples(&self) -> usize {
        self.grid.len()
    }

    pub fn num_relations(&self) -> usize {
        self.space.num_relations()
    }

    /// Checks that `other` lives on the same grid and relation space.
    pub fn check_same_domain(&self, other: &LinkStream) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::DomainMismatch("time grids differ".into()));
        }
        if self.space != other.space {
            return Err(Error::DomainMismatch("relation spaces differ".into()));
        }
        Ok(())
    }

    /// Builds a new stream on the same domain from a weight matrix.
    pub(crate) fn with_weights(&self, weights: Array2<f64>) -> LinkStream {
        LinkStream {
            grid: self.grid,
            space: self.space.clone(),
            weights,
        }
    }
}

/// Paints an event set onto a grid as a weighted stream.
///
/// The output relation space is the complete directed space over the
/// event set's nodes, so event sets sharing a node list land on a common
/// domain. Each unordered active pair feeds both of its directed
/// relations; the weight of sample `j` is the fraction of the sample
/// interval covered by the pair's activity, in `[0, 1]`.
pub fn from_event_set(events: &EdgeEventSet, grid: &TimeGrid) -> Result<LinkStream> {
    if grid.t_start() != events.t_start() || grid.t_end() != events.t_end() {
        return Err(Error::DomainMismatch(format!(
            "grid [{}, {}] does not span the event domain [{}, {}]",
            grid.t_start(),
            grid.t_end(),
            events.t_start(),
            events.t_end()
        )));
    }
    let space = RelationSpace::complete_directed(events.nodes().to_vec())?;
    let mut weights = Array2::zeros((grid.len(), space.num_relations()));
    for (i, j) in events.pairs() {
        let (u, v) = (events.node_name(i), events.node_name(j));
        let forward = space.relation_id(u, v)?;
        let backward = space.relation_id(v, u)?;
        for &(begin, end) in events.intervals_of(i, j) {
            let first = grid.bin_of(begin)?;
            let last = grid.bin_of(end)?;
            for bin in first..=last {
                let c = grid.coverage(bin, begin, end);
                if c > 0.0 {
                    weights[(bin, forward)] += c;
                    weights[(bin, backward)] += c;
                }
            }
        }
    }
    LinkStream::new(*grid, space, weights)
}

/// Inverse bridge: collapses a direction-symmetric stream back into an
/// event set, activating a pair on the union of sample intervals whose
/// weight exceeds `threshold`.
pub fn to_event_set(stream: &LinkStream, threshold: f64) -> Result<EdgeEventSet> {
    let space = stream.space();
    let grid = stream.grid();
    let mut raw: Vec<(f64, f64, String, String)> = Vec::new();
    for k in 0..space.num_relations() {
        let (u, v) = space.relations()[k];
        if u == v {
            // self-relations have no undirected counterpart
            if (0..grid.len()).any(|j| stream.weight(j, k) > threshold) {
                return Err(Error::AsymmetricStream(format!(
                    "active self-relation on {:?}",
                    space.node_name(u)
                )));
            }
            continue;
        }
        if u > v {
            continue; // handled from the (min, max) direction
        }
        let rev = space.reverse_of(k).ok_or_else(|| {
            let (a, b) = space.relation_names(k);
            Error::AsymmetricStream(format!("relation ({a:?}, {b:?}) lacks its reverse"))
        })?;
        let mut active: Vec<(f64, f64)> = Vec::new();
        for j in 0..grid.len() {
            let w = stream.weight(j, k);
            let wr = stream.weight(j, rev);
            if (w - wr).abs() > SYMMETRY_TOL {
                let (a, b) = space.relation_names(k);
                return Err(Error::AsymmetricStream(format!(
                    "weights differ at sample {j} for ({a:?}, {b:?}): {w} vs {wr}"
                )));
            }
            if w > threshold {
                active.push((grid.edge(j), grid.edge(j + 1)));
            }
        }
        let merged = intervals::normalize(active);
        let (a, b) = space.relation_names(k);
        for (begin, end) in merged {
            raw.push((begin, end, a.to_string(), b.to_string()));
        }
    }
    let links: Vec<(f64, f64, &str, &str)> = raw
        .iter()
        .map(|(b, e, u, v)| (*b, *e, u.as_str(), v.as_str()))
        .collect();
    EdgeEventSet::from_links(
        grid.t_start(),
        grid.t_end(),
        space.nodes().to_vec(),
        &links,
    )
}
