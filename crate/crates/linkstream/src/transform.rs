//! Joint frequency-structure decomposition.
//!
//! The relation axis is analyzed against a user-chosen disjoint partition
//! of the relations ("substructures"). Each block is padded to a power of
//! two with virtual relations, carries one normalized indicator atom and
//! a tree of recursive mean-difference atoms; together they form an
//! orthonormal basis of the padded relation space. The time axis is
//! analyzed with a unitary discrete Fourier transform. Applying the
//! structural analysis per sample and the temporal one per atom yields
//! one complex coefficient per (frequency, atom) pair.

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::space::RelationSpace;
use crate::stream::LinkStream;

/// A disjoint partition of the relation indices `[0, M-1]` into
/// substructure blocks. Block order and member order are preserved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuralDictionary {
    blocks: Vec<Vec<usize>>,
}

impl StructuralDictionary {
    pub fn new(blocks: Vec<Vec<usize>>, num_relations: usize) -> Result<Self> {
        let mut seen = vec![false; num_relations];
        let mut covered = 0;
        for (i, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidDictionary(format!("block {i} is empty")));
            }
            for &k in block {
                if k >= num_relations {
                    return Err(Error::InvalidDictionary(format!(
                        "block {i} references relation {k}, but only {num_relations} exist"
                    )));
                }
                if seen[k] {
                    return Err(Error::InvalidDictionary(format!(
                        "relation {k} appears in more than one block"
                    )));
                }
                seen[k] = true;
                covered += 1;
            }
        }
        if covered != num_relations {
            return Err(Error::InvalidDictionary(format!(
                "blocks cover {covered} of {num_relations} relations"
            )));
        }
        Ok(Self { blocks })
    }

    /// All relations in one block.
    pub fn single_block(num_relations: usize) -> Result<Self> {
        Self::new(vec![(0..num_relations).collect()], num_relations)
    }

    /// One block per relation (no padding, no detail atoms).
    pub fn singletons(num_relations: usize) -> Result<Self> {
        Self::new((0..num_relations).map(|k| vec![k]).collect(), num_relations)
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }
}

/// One basis atom: the scaling (indicator) function of a block or a
/// detail function at a node of the block's halving tree, identified by
/// its breadth-first index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Atom {
    Scaling { block: usize },
    Detail { block: usize, node: usize },
}

#[derive(Debug, Clone)]
struct BasisBlock {
    /// Real relation indices, ascending (relation order is the split order).
    members: Vec<usize>,
    /// Power-of-two block width after appending virtual slots.
    padded: usize,
    /// First padded coordinate of the block.
    offset: usize,
}

impl BasisBlock {
    /// Width and first local coordinate of tree node `node`.
    fn tree_range(&self, node: usize) -> (usize, usize) {
        let depth = (node + 1).ilog2() as usize;
        let width = self.padded >> depth;
        let start = (node + 1 - (1 << depth)) * width;
        (width, start)
    }
}

/// Orthonormal structural basis derived from a dictionary over a
/// relation space.
#[derive(Debug, Clone)]
pub struct StructuralBasis {
    space: RelationSpace,
    blocks: Vec<BasisBlock>,
    padded_total: usize,
    real_to_padded: Vec<usize>,
    atoms: Vec<Atom>,
}

/// Pads each block to the next power of two (virtual slots appended after
/// the real members, which are kept in relation order) and enumerates the
/// atoms: per block, the scaling atom followed by its `padded - 1` detail
/// atoms in breadth-first tree order.
pub fn build_basis(space: &RelationSpace, dict: &StructuralDictionary) -> Result<StructuralBasis> {
    let m = space.num_relations();
    // revalidate against this space
    let dict = StructuralDictionary::new(dict.blocks().to_vec(), m)?;
    let mut blocks = Vec::with_capacity(dict.blocks().len());
    let mut real_to_padded = vec![0usize; m];
    let mut offset = 0;
    let mut atoms = Vec::new();
    for (i, raw) in dict.blocks().iter().enumerate() {
        let mut members = raw.clone();
        members.sort_unstable();
        let padded = members.len().next_power_of_two();
        for (slot, &k) in members.iter().enumerate() {
            real_to_padded[k] = offset + slot;
        }
        atoms.push(Atom::Scaling { block: i });
        for node in 0..padded.saturating_sub(1) {
            atoms.push(Atom::Detail { block: i, node });
        }
        blocks.push(BasisBlock {
            members,
            padded,
            offset,
        });
        offset += padded;
    }
    Ok(StructuralBasis {
        space: space.clone(),
        blocks,
        padded_total: offset,
        real_to_padded,
        atoms,
    })
}

impl StructuralBasis {
    pub fn space(&self) -> &RelationSpace {
        &self.space
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Total padded relation count; also the number of atoms.
    pub fn padded_len(&self) -> usize {
        self.padded_total
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Padded width of block `i`.
    pub fn block_width(&self, i: usize) -> usize {
        self.blocks[i].padded
    }

    /// Real members of block `i`, ascending.
    pub fn block_members(&self, i: usize) -> &[usize] {
        &self.blocks[i].members
    }

    /// Padded coordinate of a real relation.
    pub fn padded_index(&self, relation: usize) -> usize {
        self.real_to_padded[relation]
    }

    /// Width of the tree node an atom differentiates (its parent set),
    /// or the block width for a scaling atom.
    pub fn atom_set_width(&self, atom: Atom) -> usize {
        match atom {
            Atom::Scaling { block } => self.blocks[block].padded,
            Atom::Detail { block, node } => self.blocks[block].tree_range(node).0,
        }
    }

    /// Scatters a real-relation row into padded coordinates.
    pub fn pad_row(&self, real_row: &[f64]) -> Result<Vec<f64>> {
        if real_row.len() != self.space.num_relations() {
            return Err(Error::LengthMismatch {
                expected: self.space.num_relations(),
                got: real_row.len(),
            });
        }
        let mut padded = vec![0.0; self.padded_total];
        for (k, &w) in real_row.iter().enumerate() {
            padded[self.real_to_padded[k]] = w;
        }
        Ok(padded)
    }

    /// Gathers the real-relation coordinates out of a padded row.
    pub fn strip_row(&self, padded: &[f64]) -> Result<Vec<f64>> {
        if padded.len() != self.padded_total {
            return Err(Error::LengthMismatch {
                expected: self.padded_total,
                got: padded.len(),
            });
        }
        Ok(self
            .real_to_padded
            .iter()
            .map(|&p| padded[p])
            .collect())
    }

    /// Largest absolute value sitting on a virtual slot.
    pub fn virtual_leakage(&self, padded: &[f64]) -> f64 {
        let mut real = vec![false; self.padded_total];
        for &p in &self.real_to_padded {
            real[p] = true;
        }
        padded
            .iter()
            .enumerate()
            .filter(|(i, _)| !real[*i])
            .fold(0.0, |acc, (_, v)| acc.max(v.abs()))
    }

    /// Dense padded-coordinate vector of one atom.
    pub fn atom_vector(&self, atom: Atom) -> Vec<f64> {
        let mut v = vec![0.0; self.padded_total];
        match atom {
            Atom::Scaling { block } => {
                let b = &self.blocks[block];
                let a = 1.0 / (b.padded as f64).sqrt();
                for slot in 0..b.padded {
                    v[b.offset + slot] = a;
                }
            }
            Atom::Detail { block, node } => {
                let b = &self.blocks[block];
                let (width, start) = b.tree_range(node);
                let a = 1.0 / (width as f64).sqrt();
                for slot in 0..width / 2 {
                    v[b.offset + start + slot] = a;
                    v[b.offset + start + width / 2 + slot] = -a;
                }
            }
        }
        v
    }

    /// Projects a padded row onto every atom, in atom order.
    pub fn analyze_row(&self, padded: &[f64]) -> Result<Vec<f64>> {
        if padded.len() != self.padded_total {
            return Err(Error::LengthMismatch {
                expected: self.padded_total,
                got: padded.len(),
            });
        }
        let mut coeffs = Vec::with_capacity(self.num_atoms());
        for b in &self.blocks {
            let local = &padded[b.offset..b.offset + b.padded];
            // prefix sums make every tree-node sum O(1)
            let mut prefix = vec![0.0; b.padded + 1];
            for (i, &x) in local.iter().enumerate() {
                prefix[i + 1] = prefix[i] + x;
            }
            let sum = |from: usize, to: usize| prefix[to] - prefix[from];
            coeffs.push(sum(0, b.padded) / (b.padded as f64).sqrt());
            for node in 0..b.padded.saturating_sub(1) {
                let (width, start) = b.tree_range(node);
                let half = width / 2;
                let w = (sum(start, start + half) - sum(start + half, start + width))
                    / (width as f64).sqrt();
                coeffs.push(w);
            }
        }
        Ok(coeffs)
    }

    /// Rebuilds the padded row from atom coefficients.
    pub fn synthesize_row(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        if coeffs.len() != self.num_atoms() {
            return Err(Error::LengthMismatch {
                expected: self.num_atoms(),
                got: coeffs.len(),
            });
        }
        let mut padded = vec![0.0; self.padded_total];
        let mut idx = 0;
        for b in &self.blocks {
            let s = coeffs[idx];
            idx += 1;
            let a = s / (b.padded as f64).sqrt();
            for slot in 0..b.padded {
                padded[b.offset + slot] += a;
            }
            for node in 0..b.padded.saturating_sub(1) {
                let w = coeffs[idx];
                idx += 1;
                let (width, start) = b.tree_range(node);
                let a = w / (width as f64).sqrt();
                let half = width / 2;
                for slot in 0..half {
                    padded[b.offset + start + slot] += a;
                    padded[b.offset + start + half + slot] -= a;
                }
            }
        }
        Ok(padded)
    }
}

/// Projection of one padded row onto the basis (spec order: the scaling
/// coefficient of each block followed by its detail coefficients).
pub fn structural_forward(basis: &StructuralBasis, padded_row: &[f64]) -> Result<Vec<f64>> {
    basis.analyze_row(padded_row)
}

/// Exact inverse of [`structural_forward`].
pub fn structural_inverse(basis: &StructuralBasis, coeffs: &[f64]) -> Result<Vec<f64>> {
    basis.synthesize_row(coeffs)
}

/// The worked mean-difference pyramid on a power-of-two value vector:
/// the mean plus one halved mean-difference per tree node, breadth-first.
/// Each value is recovered as `mean + sum over ancestors of +/- detail`.
pub fn mean_difference_forward(values: &[f64]) -> Result<(f64, Vec<f64>)> {
    let p = values.len();
    if p == 0 || !p.is_power_of_two() {
        return Err(Error::InvalidDictionary(format!(
            "mean-difference needs a power-of-two length, got {p}"
        )));
    }
    let mean = values.iter().sum::<f64>() / p as f64;
    let mut details = Vec::with_capacity(p - 1);
    for node in 0..p - 1 {
        let depth = (node + 1).ilog2() as usize;
        let width = p >> depth;
        let start = (node + 1 - (1 << depth)) * width;
        let half = width / 2;
        let first: f64 = values[start..start + half].iter().sum::<f64>() / half as f64;
        let second: f64 = values[start + half..start + width].iter().sum::<f64>() / half as f64;
        details.push((first - second) / 2.0);
    }
    Ok((mean, details))
}

/// Inverse of [`mean_difference_forward`].
pub fn mean_difference_inverse(mean: f64, details: &[f64]) -> Result<Vec<f64>> {
    let p = details.len() + 1;
    if !p.is_power_of_two() {
        return Err(Error::InvalidDictionary(format!(
            "detail count {} is not a power of two minus one",
            details.len()
        )));
    }
    let mut values = vec![mean; p];
    for (node, &d) in details.iter().enumerate() {
        let depth = (node + 1).ilog2() as usize;
        let width = p >> depth;
        let start = (node + 1 - (1 << depth)) * width;
        let half = width / 2;
        for slot in 0..half {
            values[start + slot] += d;
            values[start + half + slot] -= d;
        }
    }
    Ok(values)
}

/// Unitary forward DFT (scale `1/sqrt(N)`).
pub fn temporal_dft(series: &[Complex64]) -> Vec<Complex64> {
    let n = series.len();
    let mut buf = series.to_vec();
    if n > 1 {
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    }
    let scale = 1.0 / (n as f64).sqrt();
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

/// Unitary inverse DFT; `temporal_idft(temporal_dft(x)) == x`.
pub fn temporal_idft(spectrum: &[Complex64]) -> Vec<Complex64> {
    let n = spectrum.len();
    let mut buf = spectrum.to_vec();
    if n > 1 {
        FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    }
    let scale = 1.0 / (n as f64).sqrt();
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

/// The coefficient table of the joint decomposition: one complex value
/// per (frequency, atom) pair. Because both stages are unitary,
/// `dt * sum |coeff|^2` equals the stream energy.
#[derive(Debug, Clone)]
pub struct FsCoefficients {
    grid: TimeGrid,
    atoms: Vec<Atom>,
    pub(crate) table: Array2<Complex64>,
}

impl FsCoefficients {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn num_frequencies(&self) -> usize {
        self.table.nrows()
    }

    pub fn num_atoms(&self) -> usize {
        self.table.ncols()
    }

    pub fn table(&self) -> &Array2<Complex64> {
        &self.table
    }

    pub fn value(&self, frequency: usize, atom: usize) -> Complex64 {
        self.table[(frequency, atom)]
    }

    /// `dt * sum |coeff|^2`; equals the energy of the analyzed stream.
    pub fn energy(&self) -> f64 {
        self.table.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.dt()
    }

    /// Column index of a block's scaling coefficient.
    pub fn scaling_column(&self, block: usize) -> Option<usize> {
        self.atoms
            .iter()
            .position(|a| *a == Atom::Scaling { block })
    }

    /// Column index of a block's detail coefficient.
    pub fn detail_column(&self, block: usize, node: usize) -> Option<usize> {
        self.atoms
            .iter()
            .position(|a| *a == Atom::Detail { block, node })
    }
}

/// Analyzes a padded sample x padded-relation matrix: structural stage
/// per sample, then a unitary DFT down each atom column.
pub fn fs_transform_padded(
    padded_rows: &Array2<f64>,
    grid: &TimeGrid,
    basis: &StructuralBasis,
) -> Result<FsCoefficients> {
    let (n, p) = padded_rows.dim();
    if n != grid.len() || p != basis.padded_len() {
        return Err(Error::LengthMismatch {
            expected: basis.padded_len(),
            got: p,
        });
    }
    let a = basis.num_atoms();
    let mut time_coeffs = Array2::zeros((n, a));
    for (j, row) in padded_rows.outer_iter().enumerate() {
        let coeffs = basis.analyze_row(&row.to_vec())?;
        for (c, v) in coeffs.into_iter().enumerate() {
            time_coeffs[(j, c)] = v;
        }
    }
    let mut table = Array2::from_elem((n, a), Complex64::new(0.0, 0.0));
    for c in 0..a {
        let series: Vec<Complex64> = (0..n)
            .map(|j| Complex64::new(time_coeffs[(j, c)], 0.0))
            .collect();
        for (f, v) in temporal_dft(&series).into_iter().enumerate() {
            table[(f, c)] = v;
        }
    }
    Ok(FsCoefficients {
        grid: *grid,
        atoms: basis.atoms().to_vec(),
        table,
    })
}

/// Fourier-Structure transform of a stream against a basis built on the
/// same relation space.
pub fn fs_transform(stream: &LinkStream, basis: &StructuralBasis) -> Result<FsCoefficients> {
    if stream.space() != basis.space() {
        return Err(Error::DomainMismatch(
            "stream and basis relation spaces differ".into(),
        ));
    }
    let n = stream.num_samples();
    let mut padded = Array2::zeros((n, basis.padded_len()));
    for j in 0..n {
        let row: Vec<f64> = stream.weights().row(j).to_vec();
        for (p, v) in basis.pad_row(&row)?.into_iter().enumerate() {
            padded[(j, p)] = v;
        }
    }
    fs_transform_padded(&padded, stream.grid(), basis)
}

/// Inverse transform; virtual slots are stripped from the synthesized
/// rows (they are zero whenever the coefficients came from a real
/// stream). The imaginary residue of the inverse DFT is dropped.
pub fn fs_inverse(coeffs: &FsCoefficients, basis: &StructuralBasis) -> Result<LinkStream> {
    if coeffs.atoms() != basis.atoms() {
        return Err(Error::DomainMismatch(
            "coefficients were produced against a different basis".into(),
        ));
    }
    let n = coeffs.num_frequencies();
    if n != coeffs.grid.len() {
        return Err(Error::LengthMismatch {
            expected: coeffs.grid.len(),
            got: n,
        });
    }
    let a = coeffs.num_atoms();
    let mut time_coeffs = Array2::zeros((n, a));
    for c in 0..a {
        let spectrum: Vec<Complex64> = (0..n).map(|f| coeffs.table[(f, c)]).collect();
        for (j, v) in temporal_idft(&spectrum).into_iter().enumerate() {
            time_coeffs[(j, c)] = v.re;
        }
    }
    let m = basis.space().num_relations();
    let mut weights = Array2::zeros((n, m));
    for j in 0..n {
        let row: Vec<f64> = time_coeffs.row(j).to_vec();
        let padded = basis.synthesize_row(&row)?;
        for (k, v) in basis.strip_row(&padded)?.into_iter().enumerate() {
            weights[(j, k)] = v;
        }
    }
    LinkStream::new(coeffs.grid, basis.space().clone(), weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::energy;
    use ndarray::array;

    fn space(m: usize) -> RelationSpace {
        let mut nodes = vec!["hub".to_string()];
        nodes.extend((0..m).map(|i| format!("n{i}")));
        let pairs: Vec<(String, String)> = (0..m)
            .map(|i| ("hub".to_string(), format!("n{i}")))
            .collect();
        RelationSpace::new(nodes, &pairs).unwrap()
    }

    fn stream_from(rows: Array2<f64>, span: f64) -> LinkStream {
        let (n, m) = rows.dim();
        let grid = TimeGrid::new(0.0, span, n).unwrap();
        LinkStream::new(grid, space(m), rows).unwrap()
    }

    #[test]
    fn dictionary_must_partition() {
        assert!(StructuralDictionary::new(vec![vec![0, 1], vec![1]], 2).is_err());
        assert!(StructuralDictionary::new(vec![vec![0]], 2).is_err());
        assert!(StructuralDictionary::new(vec![vec![0, 5]], 2).is_err());
        assert!(StructuralDictionary::new(vec![vec![0], vec![]], 1).is_err());
        assert!(StructuralDictionary::new(vec![vec![1, 0], vec![2]], 3).is_ok());
    }

    #[test]
    fn padding_to_power_of_two() {
        let dict = StructuralDictionary::new(vec![vec![0, 1, 2], vec![3]], 4).unwrap();
        let basis = build_basis(&space(4), &dict).unwrap();
        assert_eq!(basis.block_width(0), 4);
        assert_eq!(basis.block_width(1), 1);
        assert_eq!(basis.padded_len(), 5);
        // 3 detail functions for the padded-to-4 block, none for the singleton
        let details = basis
            .atoms()
            .iter()
            .filter(|a| matches!(a, Atom::Detail { block: 0, .. }))
            .count();
        assert_eq!(details, 3);
        assert!(!basis
            .atoms()
            .iter()
            .any(|a| matches!(a, Atom::Detail { block: 1, .. })));
    }

    #[test]
    fn basis_is_orthonormal() {
        let dict = StructuralDictionary::new(vec![vec![0, 2, 4], vec![1, 3], vec![5]], 6).unwrap();
        let basis = build_basis(&space(6), &dict).unwrap();
        let vectors: Vec<Vec<f64>> = basis
            .atoms()
            .iter()
            .map(|&a| basis.atom_vector(a))
            .collect();
        assert_eq!(vectors.len(), basis.padded_len());
        for (i, vi) in vectors.iter().enumerate() {
            for (j, vj) in vectors.iter().enumerate() {
                let dot: f64 = vi.iter().zip(vj).map(|(a, b)| a * b).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (dot - expected).abs() < 1e-12,
                    "gram[{i}][{j}] = {dot}"
                );
            }
        }
    }

    #[test]
    fn worked_four_point_block() {
        let dict = StructuralDictionary::single_block(4).unwrap();
        let basis = build_basis(&space(4), &dict).unwrap();
        let g = [1.0, 2.0, 3.0, 4.0];
        let coeffs = structural_forward(&basis, &g).unwrap();
        // normalized scaling coefficient: (1+2+3+4)/sqrt(4)
        assert!((coeffs[0] - 5.0).abs() < 1e-12);
        // the worked mean-difference scheme on the same values
        let (mean, details) = mean_difference_forward(&g).unwrap();
        assert_eq!(mean, 2.5);
        assert_eq!(details, vec![-1.0, -0.5, -0.5]);
        // normalized detail = scheme detail * sqrt(parent width)
        for (i, atom) in basis.atoms().iter().enumerate().skip(1) {
            let width = basis.atom_set_width(*atom) as f64;
            assert!((coeffs[i] - details[i - 1] * width.sqrt()).abs() < 1e-12);
        }
        // recovery identities a = mean + w0 + w1, etc.
        assert_eq!(mean_difference_inverse(mean, &details).unwrap(), g.to_vec());
        assert!((mean + details[0] + details[1] - 1.0).abs() < 1e-15);
        assert!((mean + details[0] - details[1] - 2.0).abs() < 1e-15);
        assert!((mean - details[0] + details[2] - 3.0).abs() < 1e-15);
        assert!((mean - details[0] - details[2] - 4.0).abs() < 1e-15);
        // exact round trip through the orthonormal basis as well
        let back = structural_inverse(&basis, &coeffs).unwrap();
        for (a, b) in back.iter().zip(&g) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn singleton_block_has_scaling_only() {
        let dict = StructuralDictionary::singletons(3).unwrap();
        let basis = build_basis(&space(3), &dict).unwrap();
        assert_eq!(basis.num_atoms(), 3);
        assert!(basis
            .atoms()
            .iter()
            .all(|a| matches!(a, Atom::Scaling { .. })));
        let coeffs = structural_forward(&basis, &[7.0, -1.0, 2.0]).unwrap();
        assert_eq!(coeffs, vec![7.0, -1.0, 2.0]);
    }

    #[test]
    fn whole_graph_dictionary_splits_single_edge_into_mean_plus_details() {
        let dict = StructuralDictionary::single_block(4).unwrap();
        let basis = build_basis(&space(4), &dict).unwrap();
        let g = [1.0, 0.0, 0.0, 0.0];
        let coeffs = structural_forward(&basis, &g).unwrap();
        // scaling term alone reconstructs the uniform mean
        let mut mean_only = coeffs.clone();
        for c in mean_only.iter_mut().skip(1) {
            *c = 0.0;
        }
        let approx = structural_inverse(&basis, &mean_only).unwrap();
        assert!(approx.iter().all(|&x| (x - 0.25).abs() < 1e-12));
        // details carry exactly the remainder
        let full = structural_inverse(&basis, &coeffs).unwrap();
        for (a, b) in full.iter().zip(&g) {
            assert!((a - b).abs() < 1e-12);
        }
        // zero vector maps to zero coefficients
        let z = structural_forward(&basis, &[0.0; 4]).unwrap();
        assert!(z.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn dft_conventions() {
        let x: Vec<Complex64> = [1.0, 0.0, 0.0, 0.0]
            .iter()
            .map(|&r| Complex64::new(r, 0.0))
            .collect();
        let spec = temporal_dft(&x);
        for c in &spec {
            assert!((c - Complex64::new(0.5, 0.0)).norm() < 1e-12);
        }

        let constant = vec![Complex64::new(2.0, 0.0); 8];
        let spec = temporal_dft(&constant);
        assert!((spec[0].re - 2.0 * (8.0f64).sqrt()).abs() < 1e-12);
        for c in &spec[1..] {
            assert!(c.norm() < 1e-12);
        }

        // a pure exponential at bin 3 concentrates at index 3
        let n = 16;
        let wave: Vec<Complex64> = (0..n)
            .map(|j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * 3.0 * j as f64 / n as f64))
            .collect();
        let spec = temporal_dft(&wave);
        for (f, c) in spec.iter().enumerate() {
            if f == 3 {
                assert!((c.norm() - (n as f64).sqrt()).abs() < 1e-9);
            } else {
                assert!(c.norm() < 1e-9);
            }
        }

        // unitary round trip and Parseval
        let x: Vec<Complex64> = (0..7)
            .map(|i| Complex64::new(i as f64 - 2.5, (i * i) as f64 * 0.1))
            .collect();
        let back = temporal_idft(&temporal_dft(&x));
        for (a, b) in back.iter().zip(&x) {
            assert!((a - b).norm() < 1e-12);
        }
        let ex: f64 = x.iter().map(|c| c.norm_sqr()).sum();
        let ef: f64 = temporal_dft(&x).iter().map(|c| c.norm_sqr()).sum();
        assert!((ex - ef).abs() < 1e-9);
    }

    #[test]
    fn fs_round_trip_and_parseval() {
        let rows = array![
            [1.0, 0.5, -2.0, 3.0, 0.0],
            [0.0, 1.5, 2.5, -1.0, 4.0],
            [2.0, 2.0, 2.0, 2.0, 2.0],
            [-1.0, 0.0, 1.0, 0.5, 0.25],
        ];
        let s = stream_from(rows, 2.0);
        let dict = StructuralDictionary::new(vec![vec![0, 1, 2], vec![3, 4]], 5).unwrap();
        let basis = build_basis(s.space(), &dict).unwrap();
        let coeffs = fs_transform(&s, &basis).unwrap();
        assert_eq!(coeffs.num_frequencies(), 4);
        assert_eq!(coeffs.num_atoms(), 4 + 2); // padded 4 + 2
        let back = fs_inverse(&coeffs, &basis).unwrap();
        let err = back
            .weights()
            .iter()
            .zip(s.weights().iter())
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
        assert!(err < 1e-12, "max abs err {err}");
        assert!((coeffs.energy() - energy(&s)).abs() < 1e-9 * energy(&s).max(1.0));
    }

    #[test]
    fn zero_stream_has_zero_coefficients() {
        let s = stream_from(Array2::zeros((3, 2)), 3.0);
        let dict = StructuralDictionary::single_block(2).unwrap();
        let basis = build_basis(s.space(), &dict).unwrap();
        let coeffs = fs_transform(&s, &basis).unwrap();
        assert!(coeffs.table().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn singleton_relation_reduces_to_plain_dft() {
        let x = [1.0, -2.0, 0.5, 3.0, 0.0, 1.0, 1.0, -1.0];
        let rows = Array2::from_shape_vec((8, 1), x.to_vec()).unwrap();
        let s = stream_from(rows, 4.0);
        let dict = StructuralDictionary::single_block(1).unwrap();
        let basis = build_basis(s.space(), &dict).unwrap();
        let coeffs = fs_transform(&s, &basis).unwrap();
        let reference = temporal_dft(
            &x.iter()
                .map(|&r| Complex64::new(r, 0.0))
                .collect::<Vec<_>>(),
        );
        for f in 0..8 {
            assert!((coeffs.value(f, 0) - reference[f]).norm() < 1e-12);
        }
    }

    #[test]
    fn scaling_atom_cosine_concentrates_energy() {
        // stream = phi_0(e) * cos(2 pi f0 t / span) over a padded block
        let n = 32;
        let f0 = 5;
        let m = 3; // padded to 4
        let dict = StructuralDictionary::single_block(m).unwrap();
        let sp = space(m);
        let basis = build_basis(&sp, &dict).unwrap();
        let phi = basis.atom_vector(Atom::Scaling { block: 0 });
        let mut rows = Array2::zeros((n, m));
        for j in 0..n {
            let c = (2.0 * std::f64::consts::PI * f0 as f64 * j as f64 / n as f64).cos();
            for k in 0..m {
                rows[(j, k)] = phi[basis.padded_index(k)] * c;
            }
        }
        let grid = TimeGrid::new(0.0, 8.0, n).unwrap();
        let s = LinkStream::new(grid, sp, rows).unwrap();
        let coeffs = fs_transform(&s, &basis).unwrap();
        let total: f64 = coeffs.table().iter().map(|c| c.norm_sqr()).sum();
        // the cosine projects into the +/- f0 scaling coefficients, plus the
        // detail atoms that compensate the virtual padding slot
        let col = coeffs.scaling_column(0).unwrap();
        let at_f0 = coeffs.value(f0, col).norm_sqr() + coeffs.value(n - f0, col).norm_sqr();
        let scaling_total: f64 = (0..n).map(|f| coeffs.value(f, col).norm_sqr()).sum();
        assert!((at_f0 - scaling_total).abs() < 1e-9);
        assert!(at_f0 > 0.5 * total);
    }
}
