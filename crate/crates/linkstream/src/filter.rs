//! Frequency and structure filtering.
//!
//! Time filtering convolves every relation's series with an impulse
//! response; in circular mode each temporal coefficient of the joint
//! decomposition is scaled by the filter's frequency response. Structural
//! filtering multiplies each sample row (in padded coordinates) by a
//! relational kernel; the kernel assembled from per-atom gains rescales
//! each structural coefficient by its gain.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::stream::LinkStream;
use crate::transform::{fs_transform_padded, FsCoefficients, StructuralBasis};

/// A finite impulse response applied along the time axis. Convolution
/// sums carry the `dt` factor, so a unit impulse has amplitude `1/dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeFilter {
    taps: Vec<f64>,
}

impl TimeFilter {
    pub fn new(taps: Vec<f64>) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::InvalidConfig("impulse response is empty".into()));
        }
        if taps.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidConfig(
                "impulse response has a non-finite tap".into(),
            ));
        }
        Ok(Self { taps })
    }

    /// The identity filter on a grid: a single tap of height `1/dt`.
    pub fn unit_impulse(grid: &TimeGrid) -> Self {
        Self {
            taps: vec![1.0 / grid.dt()],
        }
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Frequency response on an `N`-sample grid:
    /// `gamma_f = dt * sum_tau h(tau) e^(-2 pi i f tau / N)`,
    /// the Riemann form of the filter's Fourier coefficient. Circular
    /// convolution scales the decomposition's frequency-`f` coefficients
    /// by exactly this factor.
    pub fn frequency_response(&self, grid: &TimeGrid) -> Result<Vec<Complex64>> {
        let n = grid.len();
        if self.taps.len() > n {
            return Err(Error::FilterTooLong {
                len: self.taps.len(),
                max: n,
            });
        }
        let dt = grid.dt();
        let mut gamma = vec![Complex64::new(0.0, 0.0); n];
        for (f, g) in gamma.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (tau, &h) in self.taps.iter().enumerate() {
                let angle = -2.0 * std::f64::consts::PI * f as f64 * tau as f64 / n as f64;
                acc += h * Complex64::from_polar(1.0, angle);
            }
            *g = acc * dt;
        }
        Ok(gamma)
    }
}

/// Time-axis boundary handling for convolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvolutionMode {
    /// Wraps the time axis; satisfies the frequency-response scaling
    /// identity exactly.
    Circular,
    /// Zero-extends the time axis; causal, but the scaling identity only
    /// holds away from the boundary.
    Linear,
}

/// Convolves every relation's series with the impulse response:
/// `out(j) = dt * sum_tau h(tau) in(j - tau)`.
pub fn time_convolve(
    stream: &LinkStream,
    filter: &TimeFilter,
    mode: ConvolutionMode,
) -> Result<LinkStream> {
    let (n, m) = stream.weights().dim();
    if filter.len() > n {
        return Err(Error::FilterTooLong {
            len: filter.len(),
            max: n,
        });
    }
    let dt = stream.grid().dt();
    let w = stream.weights();
    let mut out = Array2::zeros((n, m));
    for k in 0..m {
        for j in 0..n {
            let mut acc = 0.0;
            for (tau, &h) in filter.taps().iter().enumerate() {
                let src = j as i64 - tau as i64;
                let x = match mode {
                    ConvolutionMode::Circular => w[(src.rem_euclid(n as i64) as usize, k)],
                    ConvolutionMode::Linear => {
                        if src < 0 {
                            0.0
                        } else {
                            w[(src as usize, k)]
                        }
                    }
                };
                acc += h * x;
            }
            out[(j, k)] = acc * dt;
        }
    }
    Ok(stream.with_weights(out))
}

/// One gain per basis atom: `sigma` for scaling atoms, `nu[block][node]`
/// for detail atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuralGains {
    sigma: Vec<f64>,
    nu: Vec<Vec<f64>>,
}

impl StructuralGains {
    /// Validates that exactly one gain is supplied per atom of the basis.
    pub fn new(sigma: Vec<f64>, nu: Vec<Vec<f64>>, basis: &StructuralBasis) -> Result<Self> {
        if sigma.len() != basis.num_blocks() {
            return Err(Error::GainMismatch(format!(
                "{} scaling gains for {} blocks",
                sigma.len(),
                basis.num_blocks()
            )));
        }
        if nu.len() != basis.num_blocks() {
            return Err(Error::GainMismatch(format!(
                "{} detail gain rows for {} blocks",
                nu.len(),
                basis.num_blocks()
            )));
        }
        for (i, row) in nu.iter().enumerate() {
            let expected = basis.block_width(i) - 1;
            if row.len() != expected {
                return Err(Error::GainMismatch(format!(
                    "block {i} needs {expected} detail gains, got {}",
                    row.len()
                )));
            }
        }
        for g in sigma.iter().chain(nu.iter().flatten()) {
            if !g.is_finite() {
                return Err(Error::GainMismatch("non-finite gain".into()));
            }
        }
        Ok(Self { sigma, nu })
    }

    /// All-ones gains (the identity filter).
    pub fn unit(basis: &StructuralBasis) -> Self {
        Self {
            sigma: vec![1.0; basis.num_blocks()],
            nu: (0..basis.num_blocks())
                .map(|i| vec![1.0; basis.block_width(i) - 1])
                .collect(),
        }
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn nu(&self) -> &[Vec<f64>] {
        &self.nu
    }

    /// Gains flattened into basis atom order.
    pub fn per_atom(&self, basis: &StructuralBasis) -> Vec<f64> {
        basis
            .atoms()
            .iter()
            .map(|a| match *a {
                crate::transform::Atom::Scaling { block } => self.sigma[block],
                crate::transform::Atom::Detail { block, node } => self.nu[block][node],
            })
            .collect()
    }
}

/// A relational convolution kernel over padded coordinates, together
/// with the padding layout needed to apply it to a stream.
#[derive(Debug, Clone)]
pub struct RelationalKernel {
    matrix: Array2<f64>,
    basis: StructuralBasis,
}

impl RelationalKernel {
    /// Wraps an arbitrary square kernel over the padded relation space.
    pub fn from_matrix(matrix: Array2<f64>, basis: &StructuralBasis) -> Result<Self> {
        let (r, c) = matrix.dim();
        if r != basis.padded_len() || c != basis.padded_len() {
            return Err(Error::LengthMismatch {
                expected: basis.padded_len(),
                got: r.max(c),
            });
        }
        Ok(Self {
            matrix,
            basis: basis.clone(),
        })
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    pub fn basis(&self) -> &StructuralBasis {
        &self.basis
    }
}

/// Assembles the structural filter kernel
/// `q(e', e) = sum_i sigma_i phi_i(e') phi_i(e)
///           + sum_{i,l} nu_i^(l) theta_i^(l)(e') theta_i^(l)(e)`.
/// Unit gains give the identity matrix.
pub fn build_qfilt(basis: &StructuralBasis, gains: &StructuralGains) -> Result<RelationalKernel> {
    // revalidate shape against this basis
    let gains = StructuralGains::new(gains.sigma.clone(), gains.nu.clone(), basis)?;
    let p = basis.padded_len();
    let mut q = Array2::zeros((p, p));
    for (atom, gain) in basis.atoms().iter().zip(gains.per_atom(basis)) {
        if gain == 0.0 {
            continue;
        }
        let v = basis.atom_vector(*atom);
        for (a, &va) in v.iter().enumerate() {
            if va == 0.0 {
                continue;
            }
            for (b, &vb) in v.iter().enumerate() {
                q[(a, b)] += gain * va * vb;
            }
        }
    }
    RelationalKernel::from_matrix(q, basis)
}

/// Result of a relational convolution. The padded rows are kept because
/// structural filtering may deposit weight on virtual slots; the joint
/// coefficient-scaling identity is stated on these padded rows, while
/// [`FilteredStream::stream`] strips them for real-relation use.
#[derive(Debug, Clone)]
pub struct FilteredStream {
    grid: TimeGrid,
    basis: StructuralBasis,
    padded_rows: Array2<f64>,
}

impl FilteredStream {
    pub fn padded_rows(&self) -> &Array2<f64> {
        &self.padded_rows
    }

    /// Largest absolute weight parked on a virtual relation slot.
    pub fn max_virtual_leakage(&self) -> f64 {
        self.padded_rows
            .outer_iter()
            .map(|row| self.basis.virtual_leakage(&row.to_vec()))
            .fold(0.0, f64::max)
    }

    /// The filtered stream on the real relations.
    pub fn stream(&self) -> Result<LinkStream> {
        let m = self.basis.space().num_relations();
        let n = self.grid.len();
        let mut weights = Array2::zeros((n, m));
        for (j, row) in self.padded_rows.outer_iter().enumerate() {
            for (k, v) in self.basis.strip_row(&row.to_vec())?.into_iter().enumerate() {
                weights[(j, k)] = v;
            }
        }
        LinkStream::new(self.grid, self.basis.space().clone(), weights)
    }

    /// Joint coefficients of the padded output.
    pub fn fs_coefficients(&self) -> Result<FsCoefficients> {
        fs_transform_padded(&self.padded_rows, &self.grid, &self.basis)
    }
}

/// Relational convolution: each sample row (padded with zero virtual
/// slots) is replaced by `row * q`.
pub fn relational_convolve(stream: &LinkStream, kernel: &RelationalKernel) -> Result<FilteredStream> {
    let basis = kernel.basis();
    if stream.space() != basis.space() {
        return Err(Error::DomainMismatch(
            "stream and kernel relation spaces differ".into(),
        ));
    }
    let n = stream.num_samples();
    let p = basis.padded_len();
    let mut padded = Array2::zeros((n, p));
    for j in 0..n {
        let row = basis.pad_row(&stream.weights().row(j).to_vec())?;
        for (i, v) in row.into_iter().enumerate() {
            padded[(j, i)] = v;
        }
    }
    let out = padded.dot(kernel.matrix());
    Ok(FilteredStream {
        grid: *stream.grid(),
        basis: basis.clone(),
        padded_rows: out,
    })
}

/// Joint frequency-structure filtering: circular time convolution
/// followed by the structural kernel. The two stages act on disjoint
/// axes, so their order does not matter.
pub fn joint_filter(
    stream: &LinkStream,
    filter: &TimeFilter,
    gains: &StructuralGains,
    basis: &StructuralBasis,
) -> Result<LinkStream> {
    let smoothed = time_convolve(stream, filter, ConvolutionMode::Circular)?;
    let kernel = build_qfilt(basis, gains)?;
    relational_convolve(&smoothed, &kernel)?.stream()
}
