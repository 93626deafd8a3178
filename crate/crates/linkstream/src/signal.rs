//! Elementary signal operations on link streams: pointwise algebra,
//! correlation / energy / distance, Lipschitz regularity, shifting,
//! cross-correlation over time and relation lags, and the difference
//! operators (derivatives, gradient norm, total variation, Laplacian).
//!
//! Integrals over the time axis are Riemann sums times `dt`. The time
//! axis is zero-extended outside the grid; the relation axis is circular.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::stream::LinkStream;

/// Pointwise scaling by a constant.
pub fn scale(s: &LinkStream, c: f64) -> LinkStream {
    s.with_weights(s.weights() * c)
}

/// Pointwise sum of two streams on the same domain.
pub fn add(s1: &LinkStream, s2: &LinkStream) -> Result<LinkStream> {
    s1.check_same_domain(s2)?;
    Ok(s1.with_weights(s1.weights() + s2.weights()))
}

/// Pointwise difference `s1 - s2`.
pub fn subtract(s1: &LinkStream, s2: &LinkStream) -> Result<LinkStream> {
    s1.check_same_domain(s2)?;
    Ok(s1.with_weights(s1.weights() - s2.weights()))
}

/// Pointwise product of two streams on the same domain.
pub fn multiply(s1: &LinkStream, s2: &LinkStream) -> Result<LinkStream> {
    s1.check_same_domain(s2)?;
    Ok(s1.with_weights(s1.weights() * s2.weights()))
}

/// Zero-lag correlation: sum over relations of the time integral of the
/// pointwise product.
pub fn correlation(s1: &LinkStream, s2: &LinkStream) -> Result<f64> {
    s1.check_same_domain(s2)?;
    let dot: f64 = s1
        .weights()
        .iter()
        .zip(s2.weights().iter())
        .map(|(a, b)| a * b)
        .sum();
    Ok(dot * s1.grid().dt())
}

/// Correlation of a stream with itself.
pub fn energy(s: &LinkStream) -> f64 {
    s.weights().iter().map(|w| w * w).sum::<f64>() * s.grid().dt()
}

/// Square root of the energy of the difference.
pub fn stream_distance(s1: &LinkStream, s2: &LinkStream) -> Result<f64> {
    Ok(energy(&subtract(s1, s2)?).sqrt())
}

/// Pointwise and global Lipschitz regularity constants.
#[derive(Debug, Clone)]
pub struct RegularityReport {
    /// Worst difference quotient along the time axis, per point.
    pub r_t: Array2<f64>,
    /// Worst difference quotient along the relation axis, per point.
    pub r_r: Array2<f64>,
    /// Pointwise max of the two.
    pub r: Array2<f64>,
    /// Global maximum.
    pub reg: f64,
}

/// Exhaustive evaluation of the regularity constants on the grid.
/// With a single relation `r_r` is identically zero; with a single
/// sample `r_t` is.
pub fn regularity(s: &LinkStream) -> RegularityReport {
    let (n, m) = s.weights().dim();
    let dt = s.grid().dt();
    let w = s.weights();
    let mut r_t = Array2::zeros((n, m));
    let mut r_r = Array2::zeros((n, m));
    for j in 0..n {
        for k in 0..m {
            let mut best_t: f64 = 0.0;
            for j2 in 0..n {
                if j2 != j {
                    let q = (w[(j, k)] - w[(j2, k)]).abs()
                        / ((j as f64 - j2 as f64).abs() * dt);
                    best_t = best_t.max(q);
                }
            }
            let mut best_r: f64 = 0.0;
            for k2 in 0..m {
                if k2 != k {
                    let q = (w[(j, k)] - w[(j, k2)]).abs() / (k as f64 - k2 as f64).abs();
                    best_r = best_r.max(q);
                }
            }
            r_t[(j, k)] = best_t;
            r_r[(j, k)] = best_r;
        }
    }
    let r = ndarray::Zip::from(&r_t)
        .and(&r_r)
        .map_collect(|a, b| a.max(*b));
    let reg = r.iter().copied().fold(0.0, f64::max);
    RegularityReport { r_t, r_r, r, reg }
}

/// Shift by `steps_t` samples in time (zero-extended) and `eta` positions
/// along the circular relation axis:
/// `out(j, k) = in(j - steps_t, (k - eta) mod M)`.
pub fn shift(s: &LinkStream, steps_t: i64, eta: i64) -> Result<LinkStream> {
    let (n, m) = s.weights().dim();
    if steps_t.unsigned_abs() as usize > n {
        return Err(Error::ShiftOutOfRange {
            steps: steps_t,
            max: n,
        });
    }
    let w = s.weights();
    let mut out = Array2::zeros((n, m));
    for j in 0..n {
        let src_j = j as i64 - steps_t;
        if src_j < 0 || src_j >= n as i64 {
            continue;
        }
        for k in 0..m {
            let src_k = (k as i64 - eta).rem_euclid(m as i64) as usize;
            out[(j, k)] = w[(src_j as usize, src_k)];
        }
    }
    Ok(s.with_weights(out))
}

/// Cross-correlation surface over all time lags `tau = a*dt`,
/// `a in [-(N-1), N-1]`, and relation lags `eta in [0, M-1]`.
///
/// The lag convention is detection-oriented: `surface(tau, eta)` is the
/// correlation of `s1` shifted by `(tau, eta)` against `s2`, so a copy of
/// `s1` delayed by `(p*dt, q)` produces its peak at positive `(p*dt, q)`.
#[derive(Debug, Clone)]
pub struct LagSurface {
    n: usize,
    m: usize,
    dt: f64,
    /// Row `a` holds time lag `(a - (N-1)) * dt`; column is the relation lag.
    pub values: Array2<f64>,
}

impl LagSurface {
    pub fn num_time_lags(&self) -> usize {
        2 * self.n - 1
    }

    pub fn num_relation_lags(&self) -> usize {
        self.m
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Time lag in seconds for row index `row`.
    pub fn tau_of_row(&self, row: usize) -> f64 {
        (row as i64 - (self.n as i64 - 1)) as f64 * self.dt
    }

    /// Value at a signed sample lag and relation lag.
    pub fn value(&self, steps_t: i64, eta: usize) -> f64 {
        let row = (steps_t + self.n as i64 - 1) as usize;
        self.values[(row, eta)]
    }

    /// All `(steps_t, eta, value)` triples in row-major order.
    pub fn iter_lags(&self) -> impl Iterator<Item = (i64, usize, f64)> + '_ {
        self.values
            .indexed_iter()
            .map(|((row, eta), &v)| (row as i64 - (self.n as i64 - 1), eta, v))
    }

    /// Global argmax. Near-ties (within 1e-12 of the running best, scaled)
    /// are broken deterministically: positive time lag first, then smaller
    /// relation lag, then smaller |time lag|.
    pub fn argmax(&self) -> (i64, usize, f64) {
        self.argmax_filtered(|_, _| true)
            .expect("surface is never empty")
    }

    /// Argmax excluding the origin lag (0, 0).
    pub fn argmax_off_origin(&self) -> Option<(i64, usize, f64)> {
        self.argmax_filtered(|a, eta| !(a == 0 && eta == 0))
    }

    /// Argmax restricted to |time lag| <= `max_steps` samples.
    pub fn argmax_within(&self, max_steps: Option<i64>) -> Option<(i64, usize, f64)> {
        self.argmax_filtered(|a, _| max_steps.map_or(true, |m| a.abs() <= m))
    }

    /// Off-origin argmax restricted to |time lag| <= `max_steps` samples.
    pub fn argmax_off_origin_within(&self, max_steps: Option<i64>) -> Option<(i64, usize, f64)> {
        self.argmax_filtered(|a, eta| {
            !(a == 0 && eta == 0) && max_steps.map_or(true, |m| a.abs() <= m)
        })
    }

    fn argmax_filtered<F: Fn(i64, usize) -> bool>(&self, keep: F) -> Option<(i64, usize, f64)> {
        let scale = self
            .values
            .iter()
            .fold(0.0f64, |acc, v| acc.max(v.abs()));
        let tol = 1e-12 * scale.max(1.0);
        let mut best: Option<(i64, usize, f64)> = None;
        for (a, eta, v) in self.iter_lags() {
            if !keep(a, eta) {
                continue;
            }
            let better = match best {
                None => true,
                Some((ba, beta, bv)) => {
                    if v > bv + tol {
                        true
                    } else if v >= bv - tol {
                        preference(a, eta) > preference(ba, beta)
                    } else {
                        false
                    }
                }
            };
            if better {
                best = Some((a, eta, v));
            }
        }
        best
    }
}

/// Tie-break order for equal-valued lags; higher wins. Autocorrelation
/// surfaces are symmetric under lag negation, so the reported argmax is
/// pinned to the non-negative-time representative.
fn preference(steps_t: i64, eta: usize) -> (bool, std::cmp::Reverse<usize>, std::cmp::Reverse<i64>) {
    (
        steps_t >= 0,
        std::cmp::Reverse(eta),
        std::cmp::Reverse(steps_t.abs()),
    )
}

/// Evaluates the full lag surface by shifting `s1` against `s2`.
pub fn cross_correlation(s1: &LinkStream, s2: &LinkStream) -> Result<LagSurface> {
    s1.check_same_domain(s2)?;
    let (n, m) = s1.weights().dim();
    let mut values = Array2::zeros((2 * n - 1, m));
    for a in -(n as i64 - 1)..=(n as i64 - 1) {
        for eta in 0..m {
            let shifted = shift(s1, a, eta as i64)?;
            values[((a + n as i64 - 1) as usize, eta)] = correlation(&shifted, s2)?;
        }
    }
    Ok(LagSurface {
        n,
        m,
        dt: s1.grid().dt(),
        values,
    })
}

/// Forward time difference divided by `dt` (zero-extended at the last
/// sample, which therefore carries a boundary artifact).
pub fn d_dt(s: &LinkStream) -> LinkStream {
    let advanced = shift(s, -1, 0).expect("|steps| = 1 <= N");
    scale(
        &subtract(&advanced, s).expect("same domain by construction"),
        1.0 / s.grid().dt(),
    )
}

/// Circular relational difference: `out(j,k) = in(j, k+1 mod M) - in(j, k)`.
pub fn d_de(s: &LinkStream) -> LinkStream {
    let rotated = shift(s, 0, -1).expect("relational shift is total");
    subtract(&rotated, s).expect("same domain by construction")
}

/// Mixed derivative; the two orders commute exactly.
pub fn d2_dedt(s: &LinkStream) -> LinkStream {
    d_de(&d_dt(s))
}

/// Pointwise Euclidean norm of the (time, relation) gradient.
pub fn gradient_norm(s: &LinkStream) -> LinkStream {
    let gt = d_dt(s);
    let ge = d_de(s);
    let w = ndarray::Zip::from(gt.weights())
        .and(ge.weights())
        .map_collect(|a, b| (a * a + b * b).sqrt());
    s.with_weights(w)
}

/// Energy of the gradient norm.
pub fn total_variation(s: &LinkStream) -> f64 {
    energy(&gradient_norm(s))
}

/// Second forward time difference over `dt^2` plus second circular
/// relational difference.
pub fn laplacian(s: &LinkStream) -> LinkStream {
    let tt = d_dt(&d_dt(s));
    let ee = d_de(&d_de(s));
    add(&tt, &ee).expect("same domain by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TimeGrid;
    use crate::space::RelationSpace;
    use crate::stream::from_event_set;
    use crate::events::EdgeEventSet;
    use ndarray::array;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    /// A stream over M synthetic relations a->r0.., values given row-major.
    fn stream(n: usize, m: usize, span: f64, rows: &[f64]) -> LinkStream {
        let grid = TimeGrid::new(0.0, span, n).unwrap();
        let mut nodes = vec!["hub".to_string()];
        nodes.extend((0..m).map(|i| format!("n{i}")));
        let pairs: Vec<(String, String)> = (0..m)
            .map(|i| ("hub".to_string(), format!("n{i}")))
            .collect();
        let space = RelationSpace::new(nodes, &pairs).unwrap();
        let w = Array2::from_shape_vec((n, m), rows.to_vec()).unwrap();
        LinkStream::new(grid, space, w).unwrap()
    }

    #[test]
    fn algebra_is_pointwise() {
        let s = stream(2, 2, 2.0, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(scale(&s, 0.0).weights(), &Array2::<f64>::zeros((2, 2)));
        let zero = add(&s, &scale(&s, -1.0)).unwrap();
        assert_eq!(zero.weights(), &Array2::<f64>::zeros((2, 2)));
        let sq = multiply(&s, &s).unwrap();
        assert_eq!(sq.weights(), &array![[1.0, 4.0], [9.0, 16.0]]);
    }

    #[test]
    fn product_of_indicators_is_intersection() {
        let a = stream(4, 1, 4.0, &[1.0, 1.0, 0.0, 0.0]);
        let b = stream(4, 1, 4.0, &[0.0, 1.0, 1.0, 0.0]);
        let p = multiply(&a, &b).unwrap();
        assert_eq!(
            p.weights().as_slice().unwrap(),
            &[0.0, 1.0, 0.0, 0.0]
        );
    }

    #[test]
    fn correlation_hand_sum() {
        let s1 = stream(2, 1, 2.0, &[1.0, 2.0]);
        let s2 = stream(2, 1, 2.0, &[3.0, 4.0]);
        assert_eq!(correlation(&s1, &s2).unwrap(), 11.0);
        let zero = scale(&s1, 0.0);
        assert_eq!(correlation(&s1, &zero).unwrap(), 0.0);
    }

    #[test]
    fn energy_and_distance() {
        let s = stream(2, 2, 1.0, &[1.0, 1.0, 1.0, 1.0]); // dt = 0.5
        assert_eq!(energy(&s), 2.0);
        assert_eq!(energy(&scale(&s, 0.0)), 0.0);
        let s1 = stream(1, 1, 1.0, &[1.0]);
        let s2 = stream(1, 1, 1.0, &[4.0]);
        assert_eq!(stream_distance(&s1, &s2).unwrap(), 3.0);
        assert_eq!(stream_distance(&s1, &s1).unwrap(), 0.0);
    }

    #[test]
    fn set_identities_on_unweighted_streams() {
        let grid = TimeGrid::new(0.0, 8.0, 8).unwrap();
        let e1 = EdgeEventSet::from_links(
            0.0,
            8.0,
            names(&["a", "b", "c"]),
            &[(0.0, 4.0, "a", "b"), (2.0, 8.0, "b", "c")],
        )
        .unwrap();
        let e2 = EdgeEventSet::from_links(
            0.0,
            8.0,
            names(&["a", "b", "c"]),
            &[(2.0, 6.0, "a", "b")],
        )
        .unwrap();
        let s1 = from_event_set(&e1, &grid).unwrap();
        let s2 = from_event_set(&e2, &grid).unwrap();
        // corr = 2|E1 ∩ E2|: intersection is ab on [2,4]
        assert!((correlation(&s1, &s2).unwrap() - 2.0 * 2.0).abs() < 1e-12);
        // energy = 2|E|
        assert!((energy(&s1) - 2.0 * 10.0).abs() < 1e-12);
        // d^2 = 2|E1 Δ E2|: ab differs on [0,2] ∪ [4,6], bc on [2,8]
        let d = stream_distance(&s1, &s2).unwrap();
        assert!((d * d - 2.0 * (4.0 + 6.0)).abs() < 1e-12);
    }

    #[test]
    fn regularity_cases() {
        let c = stream(3, 2, 3.0, &[5.0; 6]);
        let rep = regularity(&c);
        assert_eq!(rep.reg, 0.0);

        // M=1: r_R identically zero
        let s = stream(4, 1, 4.0, &[0.0, 1.0, 3.0, 3.0]);
        let rep = regularity(&s);
        assert!(rep.r_r.iter().all(|&x| x == 0.0));
        assert_eq!(rep.reg, 2.0); // |3-1|/1

        // N=1, M=3, row [0,1,3]: r_R at k=0 is max(1, 3/2)
        let s = stream(1, 3, 1.0, &[0.0, 1.0, 3.0]);
        let rep = regularity(&s);
        assert_eq!(rep.r_r[(0, 0)], 1.5);
        assert!(rep.r_t.iter().all(|&x| x == 0.0));
        assert_eq!(rep.r[(0, 0)], 1.5);

        // scaling: reg(c*s) = |c|*reg(s)
        let rep2 = regularity(&scale(&s, -3.0));
        assert!((rep2.reg - 3.0 * rep.reg).abs() < 1e-12);
    }

    #[test]
    fn shift_semantics() {
        let s = stream(4, 4, 4.0, &{
            let mut v = vec![0.0; 16];
            v[0] = 1.0; // impulse at (j=0, k=0)
            v
        });
        assert_eq!(shift(&s, 0, 0).unwrap(), s);

        // M=4, eta=2, k=1 reads from k' = 3
        let mut w = vec![0.0; 4];
        w[3] = 7.0;
        let row = stream(1, 4, 1.0, &w);
        let shifted = shift(&row, 0, 2).unwrap();
        assert_eq!(shifted.weight(0, 1), 7.0);

        // time shift moves the impulse and preserves energy
        let moved = shift(&s, 1, 0).unwrap();
        assert_eq!(moved.weight(1, 0), 1.0);
        assert_eq!(energy(&moved), energy(&s));
        // shifting out of the window clips
        let gone = shift(&s, -1, 0).unwrap();
        assert_eq!(energy(&gone), 0.0);
        assert!(shift(&s, 5, 0).is_err());

        // circular relation axis: eta and eta + M coincide
        let a = shift(&s, 0, 3).unwrap();
        let b = shift(&s, 0, 7).unwrap();
        assert_eq!(a, b);

        // composition while support stays inside the window
        let ab = shift(&shift(&s, 1, 1).unwrap(), 2, 2).unwrap();
        let once = shift(&s, 3, 3).unwrap();
        assert_eq!(ab, once);
    }

    #[test]
    fn cross_correlation_peaks_at_the_applied_lag() {
        let mut v = vec![0.0; 6 * 3];
        v[0] = 2.0; // (0,0)
        v[4] = 1.0; // (1,1)
        let s1 = stream(6, 3, 6.0, &v);
        let s2 = shift(&s1, 2, 1).unwrap();
        let surface = cross_correlation(&s1, &s2).unwrap();
        assert_eq!(surface.value(0, 0), correlation(&s1, &s2).unwrap());
        let (a, eta, _) = surface.argmax();
        assert_eq!((a, eta), (2, 1));

        // zero-lag self term is the energy
        let auto = cross_correlation(&s1, &s1).unwrap();
        assert!((auto.value(0, 0) - energy(&s1)).abs() < 1e-12);
    }

    #[test]
    fn derivative_operators() {
        let n = 5;
        let dt = 0.5;
        let linear: Vec<f64> = (0..n).flat_map(|j| [j as f64 * dt; 2]).collect();
        let s = stream(n, 2, n as f64 * dt, &linear);
        let g = d_dt(&s);
        for j in 0..n - 1 {
            assert!((g.weight(j, 0) - 1.0).abs() < 1e-12);
        }

        let c = stream(3, 4, 3.0, &[2.0; 12]);
        assert!(d_de(&c).weights().iter().all(|&x| x == 0.0));
        let gt = d_dt(&c);
        for j in 0..2 {
            for k in 0..4 {
                assert_eq!(gt.weight(j, k), 0.0);
            }
        }

        // circular difference on a single row
        let row = stream(1, 4, 1.0, &[1.0, 0.0, 0.0, 0.0]);
        let ge = d_de(&row);
        assert_eq!(ge.weights().as_slice().unwrap(), &[-1.0, 0.0, 0.0, 1.0]);

        // commutativity
        let s = stream(4, 3, 4.0, &(0..12).map(|x| (x * x) as f64).collect::<Vec<_>>());
        assert_eq!(d2_dedt(&s), d_dt(&d_de(&s)));
    }

    #[test]
    fn gradient_tv_laplacian() {
        let c = stream(4, 4, 4.0, &[3.0; 16]);
        let lap = laplacian(&c);
        for j in 0..2 {
            for k in 0..4 {
                assert_eq!(lap.weight(j, k), 0.0);
            }
        }
        let g = gradient_norm(&c);
        for j in 0..3 {
            for k in 0..4 {
                assert_eq!(g.weight(j, k), 0.0);
            }
        }

        // M=1 reduces to the classical squared-derivative measure
        let x = [0.0, 1.0, 3.0, 6.0];
        let s = stream(4, 1, 4.0, &x);
        let expected: f64 = (0..3)
            .map(|j| (x[j + 1] - x[j]).powi(2))
            .sum::<f64>()
            + x[3] * x[3]; // boundary artifact at the last sample
        assert!((total_variation(&s) - expected).abs() < 1e-12);
    }
}
